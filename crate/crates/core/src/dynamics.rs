//! Friedkin-Johnsen opinion dynamics and the disagreement / polarization
//! functionals.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::spectral::SymMatrix;

/// Opinion per node.
#[derive(Debug, Clone, PartialEq)]
pub struct OpinionVector(Vec<f64>);

impl OpinionVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "opinion at node {i} is not finite"
            )));
        }
        Ok(Self(values))
    }

    pub fn constant(n: usize, c: f64) -> Self {
        Self(vec![c; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    /// `x − mean(x)·1`.
    pub fn demeaned(&self) -> Self {
        Self(demean(&self.0))
    }
}

impl From<OpinionVector> for Vec<f64> {
    fn from(v: OpinionVector) -> Self {
        v.0
    }
}

pub(crate) fn demean(x: &[f64]) -> Vec<f64> {
    if x.is_empty() {
        return Vec::new();
    }
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    x.iter().map(|v| v - mean).collect()
}

/// Solves `(I+L) z = s` with a Cholesky factorization.
pub fn fj_equilibrium(laplacian: &SymMatrix, s: &OpinionVector) -> Result<OpinionVector> {
    laplacian.check_dim(s.len())?;
    let z = resolvent_solve(laplacian, s.as_slice());
    OpinionVector::new(z)
}

/// `(I+L)^-1 x`.
pub(crate) fn resolvent_solve(laplacian: &SymMatrix, x: &[f64]) -> Vec<f64> {
    let n = laplacian.dim();
    let shifted = laplacian.as_matrix() + nalgebra::DMatrix::<f64>::identity(n, n);
    let chol = shifted
        .cholesky()
        .expect("I + L is positive definite for any Laplacian");
    chol.solve(&DVector::from_column_slice(x))
        .iter()
        .copied()
        .collect()
}

/// Runs the averaging update from `z⁰ = s` until successive iterates differ
/// by at most `tol` in the max norm. Returns the final iterate and the number
/// of updates applied.
pub fn fj_iterate(
    g: &Graph,
    s: &OpinionVector,
    tol: f64,
    max_steps: usize,
) -> Result<(OpinionVector, usize)> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let n = g.n();
    if s.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: s.len(),
        });
    }
    let denom: Vec<f64> = (0..n).map(|i| 1.0 + g.degree(i)).collect();
    let mut z = s.as_slice().to_vec();
    let mut next = vec![0.0; n];
    for step in 1..=max_steps {
        next.copy_from_slice(s.as_slice());
        for e in g.edges() {
            next[e.u] += e.w * z[e.v];
            next[e.v] += e.w * z[e.u];
        }
        let mut change = 0.0_f64;
        for i in 0..n {
            next[i] /= denom[i];
            change = change.max((next[i] - z[i]).abs());
        }
        std::mem::swap(&mut z, &mut next);
        if change <= tol {
            return Ok((OpinionVector(z), step));
        }
    }
    Err(Error::IterationLimit {
        steps: max_steps,
        last: z,
    })
}

/// `Σ_edges w (x_u − x_v)² = xᵀ L x`.
pub fn disagreement(g: &Graph, x: &OpinionVector) -> Result<f64> {
    if x.len() != g.n() {
        return Err(Error::DimensionMismatch {
            expected: g.n(),
            got: x.len(),
        });
    }
    let x = x.as_slice();
    Ok(g.edges()
        .iter()
        .map(|e| e.w * (x[e.u] - x[e.v]).powi(2))
        .sum())
}

/// `‖x − mean(x)·1‖²`.
pub fn polarization(x: &OpinionVector) -> f64 {
    demean(x.as_slice()).iter().map(|v| v * v).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{cycle_graph, path_graph, star_graph};

    fn ov(v: &[f64]) -> OpinionVector {
        OpinionVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn equilibrium_p2() {
        let l = path_graph(2).unwrap().laplacian();
        let z = fj_equilibrium(&l, &ov(&[1.0, 0.0])).unwrap();
        assert!((z.as_slice()[0] - 2.0 / 3.0).abs() < 1e-14);
        assert!((z.as_slice()[1] - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn equilibrium_fixes_consensus_and_zero() {
        let l = star_graph(3).unwrap().laplacian();
        let z = fj_equilibrium(&l, &OpinionVector::constant(4, 2.5)).unwrap();
        assert!(z.as_slice().iter().all(|v| (v - 2.5).abs() < 1e-13));
        let z = fj_equilibrium(&l, &OpinionVector::constant(4, 0.0)).unwrap();
        assert!(z.as_slice().iter().all(|&v| v == 0.0));
        assert!(fj_equilibrium(&l, &OpinionVector::constant(3, 0.0)).is_err());
    }

    #[test]
    fn iteration_matches_direct_solve() {
        let g = path_graph(2).unwrap();
        let (z, _) = fj_iterate(&g, &ov(&[1.0, 0.0]), 1e-10, 10_000).unwrap();
        assert!((z.as_slice()[0] - 2.0 / 3.0).abs() < 1e-9);

        let (z, steps) = fj_iterate(&g, &OpinionVector::constant(2, 1.0), 1e-10, 10).unwrap();
        assert_eq!(steps, 1);
        assert_eq!(z.as_slice(), &[1.0, 1.0]);

        let s3 = star_graph(3).unwrap();
        let s = ov(&[1.0, 0.0, 0.0, 0.0]);
        let (zi, _) = fj_iterate(&s3, &s, 1e-12, 100_000).unwrap();
        let zd = fj_equilibrium(&s3.laplacian(), &s).unwrap();
        for (a, b) in zi.as_slice().iter().zip(zd.as_slice()) {
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn iteration_limit_carries_last_iterate() {
        let g = star_graph(3).unwrap();
        let s = ov(&[1.0, 0.0, 0.0, 0.0]);
        match fj_iterate(&g, &s, 1e-14, 2) {
            Err(Error::IterationLimit { steps, last }) => {
                assert_eq!(steps, 2);
                assert_eq!(last.len(), 4);
            }
            other => panic!("expected iteration limit, got {other:?}"),
        }
        assert!(fj_iterate(&g, &s, 0.0, 2).is_err());
    }

    #[test]
    fn disagreement_values() {
        let p2 = path_graph(2).unwrap();
        assert_eq!(disagreement(&p2, &ov(&[1.0, -1.0])).unwrap(), 4.0);
        let c4 = cycle_graph(4).unwrap();
        assert_eq!(
            disagreement(&c4, &OpinionVector::constant(4, 3.0)).unwrap(),
            0.0
        );
        let x = ov(&[1.0, -1.0, 1.0, -1.0]);
        assert_eq!(disagreement(&c4, &x).unwrap(), 16.0);
        assert_eq!(c4.laplacian().quad_form(x.as_slice()), 16.0);
    }

    #[test]
    fn polarization_values() {
        assert_eq!(polarization(&ov(&[1.0, -1.0])), 2.0);
        assert_eq!(polarization(&OpinionVector::constant(5, 7.0)), 0.0);
        assert!((polarization(&ov(&[2.0, 0.0, 0.0, 0.0])) - 3.0).abs() < 1e-15);
    }
}
