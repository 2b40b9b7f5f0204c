use serde::Serialize;

use super::objective::SigmaMatrix;

/// Optimal ℓ1-budgeted seed: all mass on the node with the largest diagonal
/// entry of `Σ`, bracketed by the spectral average and the spectral maximum.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct L1Attack {
    pub index: usize,
    pub value: f64,
    /// `Tr(Σ)/n`.
    pub lower_bound: f64,
    /// `λ_max(Σ)`.
    pub upper_bound: f64,
}

pub fn l1_attack(sigma: &SigmaMatrix) -> L1Attack {
    let diag = sigma.matrix().diagonal();
    let (index, value) =
        diag.iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, d)| {
                if d > best.1 {
                    (i, d)
                } else {
                    best
                }
            });
    L1Attack {
        index,
        value,
        lower_bound: sigma.matrix().trace() / diag.len() as f64,
        upper_bound: sigma.lambda_max(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::objective::{sigma, ObjectiveSpec};
    use crate::graph::{path_graph, star_graph, unit_complete_graph};
    use crate::spectral::SymMatrix;

    fn attack(l: &SymMatrix) -> L1Attack {
        l1_attack(&sigma(l, &ObjectiveSpec::disagreement(1.0).unwrap()).unwrap())
    }

    #[test]
    fn k3_is_tight() {
        let a = attack(&unit_complete_graph(3).unwrap().laplacian());
        assert!((a.value - 0.125).abs() < 1e-14);
        assert!((a.lower_bound - 0.125).abs() < 1e-14);
        assert!((a.upper_bound - 3.0 / 16.0).abs() < 1e-14);
    }

    #[test]
    fn p2_is_tight() {
        let a = attack(&path_graph(2).unwrap().laplacian());
        assert!((a.value - 1.0 / 9.0).abs() < 1e-14);
        assert!((a.lower_bound - 1.0 / 9.0).abs() < 1e-14);
    }

    #[test]
    fn star_prefers_a_leaf() {
        let l = star_graph(3).unwrap().laplacian();
        let sig = sigma(&l, &ObjectiveSpec::disagreement(1.0).unwrap()).unwrap();
        let a = l1_attack(&sig);
        assert_eq!(a.index, 1);
        assert!((a.value - 0.18).abs() < 1e-14);
        assert!(
            a.lower_bound <= a.value && a.value <= a.upper_bound && a.upper_bound <= 0.25 + 1e-15
        );
    }
}
