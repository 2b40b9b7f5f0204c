use super::objective::disagreement_gain;
use crate::error::{Error, Result};
use crate::graph::unit_complete_graph;
use crate::spectral::{eig_sym, SymMatrix};

/// Upper bound on the disagreement a `k`-sparse, cube-constrained adversary
/// can add: `λ_max(Σ)·k + √k·min{2 d_max √k, 2 λ_max(Σ) √n}`.
pub fn sparsity_bound(laplacian: &SymMatrix, k: usize) -> f64 {
    if k == 0 {
        return 0.0;
    }
    let n = laplacian.dim() as f64;
    let d_max = laplacian.diagonal().into_iter().fold(0.0, f64::max);
    let top = eig_sym(laplacian)
        .values()
        .iter()
        .map(|&l| disagreement_gain(l.max(0.0)))
        .fold(0.0, f64::max);
    let k = k as f64;
    top * k + k.sqrt() * (2.0 * d_max * k.sqrt()).min(2.0 * top * n.sqrt())
}

/// `(1/n)·L_{K_n}` together with the seed `s^k` (first `k` entries one).
pub fn clique_sparsity_instance(n: usize, k: usize) -> Result<(SymMatrix, Vec<f64>)> {
    if n < 2 {
        return Err(Error::InvalidArgument("clique needs n >= 2".into()));
    }
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!(
            "k must lie in 1..={n}, got {k}"
        )));
    }
    let l = unit_complete_graph(n)?.laplacian().scaled(1.0 / n as f64);
    let s = (0..n).map(|i| if i < k { 1.0 } else { 0.0 }).collect();
    Ok((l, s))
}

/// `(s^k)ᵀ Σ s^k` on `(1/n)·L_{K_n}`, computed densely. Equals
/// `k(n−k)/(4n)`.
pub fn clique_sparsity_example(n: usize, k: usize) -> Result<f64> {
    let (l, s) = clique_sparsity_instance(n, k)?;
    let sig = eig_sym(&l).matrix_function(|y| disagreement_gain(y.max(0.0)));
    Ok(sig.quad_form(&s))
}
