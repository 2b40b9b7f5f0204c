//! The defender's min-max game.
//!
//! The defender picks node weights `w > 0` with `h(w) = h(1)`; the adversary
//! then maximizes `sᵀΣs` over `‖s‖_w ≤ R`. The optimal weights come from the
//! smallest diagonal matrix (in `h`) that dominates `Σ` in the Loewner order,
//! rescaled back onto the budget surface.

use serde::Serialize;

use crate::adversary::{sigma, ObjectiveSpec, SigmaMatrix};
use crate::error::{Error, Result};
use crate::sdp::{solve_diagonal_sdp, DiagonalCost, DiagonalSdpSolution, SdpOptions};
use crate::spectral::{eig_sym, SymMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BudgetFunction {
    /// `h(w) = Σ |w_i|`, homogeneous of degree one.
    L1,
    /// `h(w) = Σ w_i²`, homogeneous of degree two.
    SquaredL2,
}

impl BudgetFunction {
    pub fn eval(self, w: &[f64]) -> f64 {
        match self {
            BudgetFunction::L1 => w.iter().map(|v| v.abs()).sum(),
            BudgetFunction::SquaredL2 => w.iter().map(|v| v * v).sum(),
        }
    }

    /// `h(1)`; equal to `n` for both functions.
    pub fn of_ones(self, n: usize) -> f64 {
        n as f64
    }

    /// The `t ≥ 0` with `h(t·w) = h(1)`.
    pub fn rescaling(self, w: &[f64]) -> f64 {
        let n = w.len() as f64;
        match self {
            BudgetFunction::L1 => n / self.eval(w),
            BudgetFunction::SquaredL2 => (n / self.eval(w)).sqrt(),
        }
    }

    fn cost(self) -> DiagonalCost {
        match self {
            BudgetFunction::L1 => DiagonalCost::Linear,
            BudgetFunction::SquaredL2 => DiagonalCost::Squared,
        }
    }
}

/// Solver settings for the defender; tighter than the adversary default.
pub fn default_defense_options() -> SdpOptions {
    SdpOptions {
        rel_gap: 1e-10,
        ..SdpOptions::default()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DefenseResult {
    /// `w* = t·w′`, on the budget surface `h(w*) = h(1)`.
    pub weights: Vec<f64>,
    /// Adversary's best value against `w*` (`R²/t`).
    pub defense_value: f64,
    /// Lower end of the error bar on `defense_value` implied by the SDP gap.
    pub defense_value_lower: f64,
    /// Minimal dominating diagonal `w′` before rescaling.
    pub sdp_weights: Vec<f64>,
    pub rescaling: f64,
    /// `λ_min(diag(w′) − Σ)`.
    pub feasibility_slack: f64,
    /// `R²·λ_max(Σ)`, the value with uniform weights.
    pub undefended_value: f64,
}

/// Minimizes `h(w)` subject to `diag(w) ⪰ Σ`.
pub fn solve_dominating_diagonal(
    sigma: &SigmaMatrix,
    h: BudgetFunction,
    opts: &SdpOptions,
) -> Result<DiagonalSdpSolution> {
    let diag = sigma.matrix().diagonal();
    let scale = sigma.matrix().max_abs();
    if let Some(i) = diag.iter().position(|&d| d <= 1e-14 * scale) {
        return Err(Error::Degenerate(format!(
            "Σ has a zero diagonal entry at node {i}; the optimal weight would vanish"
        )));
    }
    solve_diagonal_sdp(sigma.matrix(), h.cost(), opts)
}

pub fn defend(
    laplacian: &SymMatrix,
    obj: &ObjectiveSpec,
    h: BudgetFunction,
) -> Result<DefenseResult> {
    let sig = sigma(laplacian, obj)?;
    defend_sigma(&sig, h, obj.budget, &default_defense_options())
}

pub fn defend_sigma(
    sigma: &SigmaMatrix,
    h: BudgetFunction,
    budget: f64,
    opts: &SdpOptions,
) -> Result<DefenseResult> {
    let sol = solve_dominating_diagonal(sigma, h, opts)?;
    let w_prime = sol.weights.clone();
    let t = h.rescaling(&w_prime);
    let r2 = budget * budget;
    let n = sigma.dim();
    let lower = match h {
        BudgetFunction::L1 => sol.lower / h.of_ones(n),
        BudgetFunction::SquaredL2 => (sol.lower.max(0.0) / h.of_ones(n)).sqrt(),
    };
    Ok(DefenseResult {
        weights: w_prime.iter().map(|w| t * w).collect(),
        defense_value: r2 / t,
        defense_value_lower: r2 * lower,
        feasibility_slack: dominance_slack(sigma, &w_prime)?,
        sdp_weights: w_prime,
        rescaling: t,
        undefended_value: r2 * sigma.lambda_max(),
    })
}

/// `λ_min(diag(w) − Σ)`.
pub fn dominance_slack(sigma: &SigmaMatrix, w: &[f64]) -> Result<f64> {
    sigma.matrix().check_dim(w.len())?;
    let d = SymMatrix::from_diagonal(w).sub(sigma.matrix())?;
    Ok(eig_sym(&d).lambda_min())
}

/// Adversary's optimum against fixed weights with `R = 1`:
/// `λ_max(W^{-1/2} Σ W^{-1/2})`.
pub fn verify_defense(sigma: &SigmaMatrix, w: &[f64]) -> Result<f64> {
    sigma.matrix().check_dim(w.len())?;
    if let Some(i) = w.iter().position(|&x| !(x > 0.0)) {
        return Err(Error::InvalidArgument(format!(
            "weight at node {i} is not positive"
        )));
    }
    let inv_sqrt: Vec<f64> = w.iter().map(|x| 1.0 / x.sqrt()).collect();
    let scaled = sigma
        .matrix()
        .congruence(&SymMatrix::from_diagonal(&inv_sqrt))?;
    Ok(eig_sym(&scaled).lambda_max())
}
