//! Exact optimizers for ℓ2-budgeted adversaries.
//!
//! Every objective here is a quadratic form sharing eigenvectors with `L`, so
//! the optimum is `R²` times the best per-eigenspace gain and the optimizers
//! are the length-`R` vectors of the winning eigenspace(s).

use nalgebra::DMatrix;
use serde::Serialize;

use super::objective::{disagreement_gain, ObjectiveKind, ObjectiveSpec};
use crate::error::{Error, Result};
use crate::spectral::{eig_sym, EigenDecomposition, EigenspaceBasis, SymMatrix};

/// Relative tolerance under which two eigenspace gains count as tied.
pub const TIE_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct AttackResult {
    pub optimal_value: f64,
    /// Eigenvalue of `L` attaining the maximum (the first one when several tie).
    pub argmax_eigenvalue: f64,
    /// 1-based positions in the ascending spectrum of `L` spanned by
    /// `seed_basis`.
    pub eigen_indices: Vec<usize>,
    /// Orthonormal columns scaled to length `R`.
    pub seed_basis: DMatrix<f64>,
    /// False when distinct eigenvalues of `L` tie for the maximum.
    pub is_unique_eigenspace: bool,
}

impl AttackResult {
    pub fn seed(&self, k: usize) -> Vec<f64> {
        self.seed_basis.column(k).iter().copied().collect()
    }

    pub fn seeds(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        (0..self.seed_basis.ncols()).map(|k| self.seed(k))
    }
}

pub(crate) fn require_connected(eig: &EigenDecomposition, op: &'static str) -> Result<()> {
    if eig.dim() >= 2 && eig.values()[1] <= eig.cluster_tolerance() {
        return Err(Error::Disconnected(op));
    }
    Ok(())
}

fn from_spaces(spaces: &[&EigenspaceBasis], value: f64, budget: f64) -> AttackResult {
    let n = spaces[0].basis.nrows();
    let cols: usize = spaces.iter().map(|s| s.multiplicity()).sum();
    let mut seed_basis = DMatrix::zeros(n, cols);
    let mut eigen_indices = Vec::with_capacity(cols);
    let mut c = 0;
    for s in spaces {
        for k in 0..s.multiplicity() {
            seed_basis.set_column(c, &(s.basis.column(k) * budget));
            c += 1;
        }
        eigen_indices.extend(s.indices.clone().map(|i| i + 1));
    }
    AttackResult {
        optimal_value: budget * budget * value,
        argmax_eigenvalue: spaces[0].eigenvalue,
        eigen_indices,
        seed_basis,
        is_unique_eigenspace: spaces.len() == 1,
    }
}

/// Picks the eigenspaces maximizing `gain`. Returns the winners and the
/// maximal gain.
fn best_spaces(
    spaces: &[EigenspaceBasis],
    gain: impl Fn(f64) -> f64,
) -> (Vec<&EigenspaceBasis>, f64) {
    let gains: Vec<f64> = spaces.iter().map(|s| gain(s.eigenvalue)).collect();
    let best = gains.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let cutoff = best - TIE_TOL * best.abs();
    let winners = spaces
        .iter()
        .zip(&gains)
        .filter(|(_, &g)| g >= cutoff)
        .map(|(s, _)| s)
        .collect();
    (winners, best)
}

/// Optimal ℓ2-budgeted seed for `obj` on a connected graph.
pub fn l2_attack(laplacian: &SymMatrix, obj: &ObjectiveSpec) -> Result<AttackResult> {
    let eig = eig_sym(laplacian);
    require_connected(&eig, "l2_attack")?;
    if obj.kind == ObjectiveKind::PolarizationDisagreement {
        return pd_from_eig(&eig, obj.budget);
    }
    let spaces = kernel_snapped(&eig);
    let kind = obj.kind;
    let (winners, best) = best_spaces(&spaces, |l| kind.transfer(l).expect("resolvent form"));
    Ok(from_spaces(&winners, best, obj.budget))
}

/// Eigenspaces with the consensus eigenvalue pinned to exactly zero.
fn kernel_snapped(eig: &EigenDecomposition) -> Vec<EigenspaceBasis> {
    let tol = eig.cluster_tolerance();
    let mut spaces = eig.eigenspaces();
    for s in &mut spaces {
        if s.eigenvalue.abs() <= tol {
            s.eigenvalue = 0.0;
        }
    }
    spaces
}

/// Maximizer of the polarization-disagreement index: `±R·V₂` with value
/// `R²/(1+λ₂)`.
pub fn pd_optimal(laplacian: &SymMatrix, budget: f64) -> Result<AttackResult> {
    if !(budget > 0.0 && budget.is_finite()) {
        return Err(Error::InvalidArgument("budget must be positive".into()));
    }
    let eig = eig_sym(laplacian);
    require_connected(&eig, "pd_optimal")?;
    pd_from_eig(&eig, budget)
}

fn pd_from_eig(eig: &EigenDecomposition, budget: f64) -> Result<AttackResult> {
    if eig.dim() < 2 {
        return Err(Error::InvalidArgument(
            "polarization needs at least two nodes".into(),
        ));
    }
    let v2 = eig.eigenspace_of(1);
    let value = 1.0 / (1.0 + v2.eigenvalue);
    Ok(from_spaces(&[&v2], value, budget))
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub t: f64,
    /// First 1-based eigen index of the winning eigenspace(s).
    pub argmax_index: usize,
    pub eigen_indices: Vec<usize>,
    /// Optimal disagreement on `tL` with `R = 1`.
    pub value: f64,
    /// True for the exact peak points `t = 1/λ_i`.
    pub critical: bool,
}

/// Disagreement optimum of `tL` over a log grid with `points_per_decade`
/// points spanning `[0.1/λ_n, 10/λ_2]`, merged with the exact peak points
/// `t = 1/λ_i`. Rows are sorted by `t`.
pub fn t_sweep(laplacian: &SymMatrix, points_per_decade: usize) -> Result<Vec<SweepRow>> {
    if points_per_decade < 2 {
        return Err(Error::InvalidArgument(
            "sweep resolution must be at least 2".into(),
        ));
    }
    let eig = eig_sym(laplacian);
    require_connected(&eig, "t_sweep")?;
    let spaces = kernel_snapped(&eig);
    let nonzero: Vec<f64> = spaces
        .iter()
        .map(|s| s.eigenvalue)
        .filter(|&l| l > 0.0)
        .collect();
    if nonzero.is_empty() {
        return Ok(Vec::new());
    }
    let lo = (0.1 / nonzero[nonzero.len() - 1]).log10();
    let hi = (10.0 / nonzero[0]).log10();
    let steps = ((hi - lo) * points_per_decade as f64).ceil().max(1.0) as usize;

    let mut ts: Vec<(f64, bool)> = (0..=steps)
        .map(|k| (10f64.powf(lo + (hi - lo) * k as f64 / steps as f64), false))
        .collect();
    ts.extend(nonzero.iter().map(|&l| (1.0 / l, true)));
    ts.sort_by(|a, b| a.0.total_cmp(&b.0));

    Ok(ts
        .into_iter()
        .map(|(t, critical)| {
            let (winners, best) = best_spaces(&spaces, |l| disagreement_gain(t * l));
            let eigen_indices: Vec<usize> = winners
                .iter()
                .flat_map(|s| s.indices.clone().map(|i| i + 1))
                .collect();
            SweepRow {
                t,
                argmax_index: eigen_indices[0],
                eigen_indices,
                value: best,
                critical,
            }
        })
        .collect())
}
