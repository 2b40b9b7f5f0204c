use serde::{Deserialize, Serialize};

use crate::dynamics::{demean, resolvent_solve};
use crate::error::{Error, Result};
use crate::spectral::{eig_sym, EigenDecomposition, SymMatrix};

/// Number of extra periods in the repeated-disagreement game.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Horizon {
    Finite(u32),
    Infinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveKind {
    /// `zᵀ L z` at equilibrium.
    Disagreement,
    /// Disagreement summed over `T+1` re-seeded periods.
    RepeatedDisagreement(Horizon),
    /// Polarization plus disagreement; `s̄ᵀ (I+L)^-1 s̄`.
    PolarizationDisagreement,
    /// `‖(I+L)^-1 s‖²`.
    AbsoluteDisplacement,
}

/// Which adversary problem to solve and the ℓ2 budget `R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveSpec {
    pub kind: ObjectiveKind,
    pub budget: f64,
}

impl ObjectiveSpec {
    pub fn new(kind: ObjectiveKind, budget: f64) -> Result<Self> {
        if !(budget > 0.0 && budget.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "budget must be positive, got {budget}"
            )));
        }
        Ok(Self { kind, budget })
    }

    pub fn disagreement(budget: f64) -> Result<Self> {
        Self::new(ObjectiveKind::Disagreement, budget)
    }
}

impl ObjectiveKind {
    /// Eigenvalue of `(I+L)^-1 f(L) (I+L)^-1` on the eigenvector of `L` with
    /// eigenvalue `lambda`, i.e. `f(λ)/(1+λ)²`. `None` for the
    /// polarization-disagreement index, which is not of that form.
    ///
    /// `lambda` values at or below zero are treated as the consensus mode.
    pub fn transfer(&self, lambda: f64) -> Option<f64> {
        let lambda = lambda.max(0.0);
        let one_plus = 1.0 + lambda;
        match *self {
            ObjectiveKind::Disagreement => Some(disagreement_gain(lambda)),
            ObjectiveKind::RepeatedDisagreement(h) => Some(repeated_gain(lambda, h)),
            ObjectiveKind::AbsoluteDisplacement => Some(1.0 / (one_plus * one_plus)),
            ObjectiveKind::PolarizationDisagreement => None,
        }
    }

    pub fn name(&self) -> String {
        match self {
            ObjectiveKind::Disagreement => "disagreement".into(),
            ObjectiveKind::RepeatedDisagreement(Horizon::Finite(t)) => format!("repeated:{t}"),
            ObjectiveKind::RepeatedDisagreement(Horizon::Infinite) => "repeated:inf".into(),
            ObjectiveKind::PolarizationDisagreement => "pd-index".into(),
            ObjectiveKind::AbsoluteDisplacement => "displacement".into(),
        }
    }
}

impl std::str::FromStr for ObjectiveKind {
    type Err = Error;

    /// Inverse of [`ObjectiveKind::name`].
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "disagreement" => ObjectiveKind::Disagreement,
            "pd-index" => ObjectiveKind::PolarizationDisagreement,
            "displacement" => ObjectiveKind::AbsoluteDisplacement,
            "repeated:inf" => ObjectiveKind::RepeatedDisagreement(Horizon::Infinite),
            _ => match s.strip_prefix("repeated:").map(str::parse::<u32>) {
                Some(Ok(t)) => ObjectiveKind::RepeatedDisagreement(Horizon::Finite(t)),
                _ => {
                    return Err(Error::InvalidArgument(format!(
                        "unknown objective `{s}`; expected disagreement, repeated:<T>, repeated:inf, pd-index or displacement"
                    )))
                }
            },
        })
    }
}

/// `x/(1+x)²`; peaks at `1/4` when `x = 1`.
pub fn disagreement_gain(x: f64) -> f64 {
    x / ((1.0 + x) * (1.0 + x))
}

/// `Σ_{i=1}^{T+1} λ/(1+λ)^{2i} = (1 − (1+λ)^{−2(T+1)})/(2+λ)`, zero at `λ = 0`
/// for every horizon.
fn repeated_gain(lambda: f64, h: Horizon) -> f64 {
    if lambda == 0.0 {
        return 0.0;
    }
    match h {
        Horizon::Infinite => 1.0 / (2.0 + lambda),
        Horizon::Finite(t) => {
            // 1 − (1+λ)^(−2(T+1)) without cancellation for small λ.
            let tail = -(-2.0 * (t as f64 + 1.0) * lambda.ln_1p()).exp_m1();
            tail / (2.0 + lambda)
        }
    }
}

/// `Σ = (I+L)^-1 f(L) (I+L)^-1`. PSD and diagonal in the eigenbasis of `L`.
#[derive(Debug, Clone)]
pub struct SigmaMatrix {
    matrix: SymMatrix,
}

impl SigmaMatrix {
    /// Wraps an arbitrary PSD matrix, for callers that build their own form.
    pub fn from_psd(matrix: SymMatrix) -> Result<Self> {
        let lmin = eig_sym(&matrix).lambda_min();
        if lmin < -1e-10 * matrix.max_abs().max(1.0) {
            return Err(Error::NotPsd(lmin));
        }
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &SymMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn lambda_max(&self) -> f64 {
        eig_sym(&self.matrix).lambda_max()
    }
}

pub fn sigma(laplacian: &SymMatrix, obj: &ObjectiveSpec) -> Result<SigmaMatrix> {
    let eig = eig_sym(laplacian);
    sigma_from_eig(&eig, obj.kind)
}

pub(crate) fn sigma_from_eig(eig: &EigenDecomposition, kind: ObjectiveKind) -> Result<SigmaMatrix> {
    if kind == ObjectiveKind::PolarizationDisagreement {
        return Err(Error::InvalidArgument(
            "the polarization-disagreement index is not a resolvent quadratic form; use pd_optimal"
                .into(),
        ));
    }
    let zero = eig.cluster_tolerance();
    let values: Vec<f64> = eig
        .values()
        .iter()
        .map(|&l| {
            let l = if l <= zero { 0.0 } else { l };
            kind.transfer(l).expect("checked above")
        })
        .collect();
    Ok(SigmaMatrix {
        matrix: eig.with_values(&values),
    })
}

/// Evaluates an objective at seed `s` by direct linear solves, without any
/// eigendecomposition. The infinite horizon is summed until the terms stop
/// contributing.
pub fn evaluate_objective(laplacian: &SymMatrix, kind: ObjectiveKind, s: &[f64]) -> Result<f64> {
    laplacian.check_dim(s.len())?;
    let value = match kind {
        ObjectiveKind::Disagreement => {
            let z = resolvent_solve(laplacian, s);
            laplacian.quad_form(&z)
        }
        ObjectiveKind::AbsoluteDisplacement => {
            resolvent_solve(laplacian, s).iter().map(|v| v * v).sum()
        }
        ObjectiveKind::PolarizationDisagreement => {
            let bar = demean(s);
            let z = resolvent_solve(laplacian, &bar);
            bar.iter().zip(&z).map(|(a, b)| a * b).sum()
        }
        ObjectiveKind::RepeatedDisagreement(h) => {
            let periods = match h {
                Horizon::Finite(t) => Some(t as usize + 1),
                Horizon::Infinite => None,
            };
            let mut z = s.to_vec();
            let mut total = 0.0;
            let mut period = 0usize;
            loop {
                z = resolvent_solve(laplacian, &z);
                let term = laplacian.quad_form(&z);
                total += term;
                period += 1;
                match periods {
                    Some(p) if period >= p => break,
                    None if term <= 1e-17 * total.max(f64::MIN_POSITIVE)
                        || period >= 10_000_000 =>
                    {
                        break
                    }
                    _ => {}
                }
            }
            total
        }
    };
    Ok(value)
}
