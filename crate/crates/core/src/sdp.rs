//! Semidefinite programs whose only coupling constraint is on the diagonal.
//!
//! Both the ℓ∞ adversary relaxation and the defender's weighting problem are
//! instances of
//!
//! ```text
//!     minimize h(w)  subject to  diag(w) ⪰ Z
//! ```
//!
//! for a PSD matrix `Z`, with `h(w) = Σ w_i` or `h(w) = Σ w_i²`. The
//! Lagrangian dual is a maximization over `X ⪰ 0`:
//!
//! ```text
//!     Σ w_i   : maximize Tr(ZX)              s.t. X_ii = 1
//!     Σ w_i²  : maximize Tr(ZX) − ¼ Σ X_ii²
//! ```
//!
//! The dual is solved over a factorization `X = V Vᵀ` by exact block
//! coordinate ascent on the rows of `V`. After every few sweeps the
//! stationarity conditions give a candidate `w`; shifting it by the most
//! negative eigenvalue of `diag(w) − Z` makes it feasible, and the
//! difference between `h(w)` and the dual objective is a certified
//! optimality gap. The loop stops once that gap is small.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::spectral::{eig_sym, SymMatrix};

/// Objective on the diagonal weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagonalCost {
    /// `Σ w_i`; dual has unit-diagonal `X`.
    Linear,
    /// `Σ w_i²`.
    Squared,
}

impl DiagonalCost {
    pub fn eval(self, w: &[f64]) -> f64 {
        match self {
            DiagonalCost::Linear => w.iter().sum(),
            DiagonalCost::Squared => w.iter().map(|v| v * v).sum(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SdpOptions {
    /// Stop once `(upper − lower) ≤ rel_gap · max(upper, Tr Z)`.
    pub rel_gap: f64,
    pub max_sweeps: usize,
    /// Sweeps between certificate evaluations.
    pub check_every: usize,
    /// Seed for the random initial factor.
    pub seed: u64,
    /// Columns of the factor; `None` uses `n`.
    pub rank: Option<usize>,
}

impl Default for SdpOptions {
    fn default() -> Self {
        Self {
            rel_gap: 1e-6,
            max_sweeps: 100_000,
            check_every: 5,
            seed: 0x5eed,
            rank: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DiagonalSdpSolution {
    /// Feasible weights: `diag(weights) ⪰ Z` up to rounding.
    pub weights: Vec<f64>,
    /// `h(weights)`; an upper bound on the optimum of the minimization.
    pub upper: f64,
    /// Dual objective at the returned factor; a lower bound.
    pub lower: f64,
    /// Rows are the factor `V` with `X = V Vᵀ`.
    pub factor: DMatrix<f64>,
    /// `λ_min(diag(weights) − Z)` after the feasibility shift.
    pub slack: f64,
    pub sweeps: usize,
}

impl DiagonalSdpSolution {
    pub fn gap(&self) -> f64 {
        self.upper - self.lower
    }
}

pub fn solve_diagonal_sdp(
    z: &SymMatrix,
    cost: DiagonalCost,
    opts: &SdpOptions,
) -> Result<DiagonalSdpSolution> {
    let n = z.dim();
    let k = opts.rank.unwrap_or(n).max(1);
    let zm = z.as_matrix();
    let scale = z.trace().abs().max(z.max_abs()).max(f64::MIN_POSITIVE);

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut v = DMatrix::<f64>::from_fn(n, k, |_, _| StandardNormal.sample(&mut rng));
    for i in 0..n {
        let norm = v.row(i).norm();
        let target = match cost {
            DiagonalCost::Linear => 1.0,
            DiagonalCost::Squared => (2.0 * zm[(i, i)].max(0.0)).sqrt(),
        };
        v.row_mut(i).scale_mut(target / norm);
    }

    let mut best: Option<DiagonalSdpSolution> = None;
    let mut g = vec![0.0; k];
    let check_every = opts.check_every.max(1);
    for sweep in 1..=opts.max_sweeps {
        for i in 0..n {
            g.iter_mut().for_each(|x| *x = 0.0);
            for j in 0..n {
                let zij = zm[(i, j)];
                if j == i || zij == 0.0 {
                    continue;
                }
                for (gc, vc) in g.iter_mut().zip(v.row(j).iter()) {
                    *gc += zij * vc;
                }
            }
            let gnorm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
            let radius = match cost {
                DiagonalCost::Linear => 1.0,
                DiagonalCost::Squared => cubic_root(zm[(i, i)].max(0.0), gnorm),
            };
            if gnorm > 0.0 {
                for (c, gc) in g.iter().enumerate() {
                    v[(i, c)] = radius * gc / gnorm;
                }
            } else {
                let norm = v.row(i).norm();
                if norm > 0.0 {
                    v.row_mut(i).scale_mut(radius / norm);
                }
            }
        }

        if sweep % check_every == 0 || sweep == opts.max_sweeps {
            let cand = certify(z, &v, cost, sweep);
            let done = cand.gap() <= opts.rel_gap * cand.upper.abs().max(scale);
            if best.as_ref().is_none_or(|b| cand.gap() < b.gap()) {
                best = Some(cand);
            }
            if done {
                return Ok(best.expect("just set"));
            }
        }
    }
    let best = best.expect("at least one certificate evaluated");
    Err(Error::NotConverged {
        what: "diagonal SDP",
        iterations: opts.max_sweeps,
        best: best.upper,
    })
}

/// Positive root of `r³ − 2a r − 2b = 0` for `a, b ≥ 0`: the optimal row
/// length for the squared cost, where `a = Z_ii` and `b = ‖g_i‖`.
fn cubic_root(a: f64, b: f64) -> f64 {
    // p(r0) ≥ 0 and p is convex on r > 0, so Newton decreases monotonically.
    let mut r = (2.0 * a).sqrt() + (2.0 * b).cbrt();
    if r == 0.0 {
        return 0.0;
    }
    for _ in 0..100 {
        let p = r * r * r - 2.0 * a * r - 2.0 * b;
        let dp = 3.0 * r * r - 2.0 * a;
        if dp <= 0.0 {
            break;
        }
        let next = r - p / dp;
        if !(next < r) {
            break;
        }
        r = next;
    }
    r
}

fn certify(
    z: &SymMatrix,
    v: &DMatrix<f64>,
    cost: DiagonalCost,
    sweeps: usize,
) -> DiagonalSdpSolution {
    let n = z.dim();
    let x = v * v.transpose();
    let zx_trace: f64 = (0..n)
        .map(|i| (0..n).map(|j| z.get(i, j) * x[(i, j)]).sum::<f64>())
        .sum();
    let (mut w, lower) = match cost {
        DiagonalCost::Linear => {
            let w: Vec<f64> = (0..n)
                .map(|i| (0..n).map(|j| z.get(i, j) * x[(i, j)]).sum())
                .collect();
            (w, zx_trace)
        }
        DiagonalCost::Squared => {
            let w: Vec<f64> = (0..n).map(|i| 0.5 * x[(i, i)]).collect();
            let pen: f64 = (0..n).map(|i| x[(i, i)] * x[(i, i)]).sum();
            (w, zx_trace - 0.25 * pen)
        }
    };
    let slack_before = {
        let mut s = z.scaled(-1.0).into_inner();
        for i in 0..n {
            s[(i, i)] += w[i];
        }
        eig_sym(&SymMatrix::symmetrized(s)).lambda_min()
    };
    if slack_before < 0.0 {
        w.iter_mut().for_each(|wi| *wi -= slack_before);
    }
    DiagonalSdpSolution {
        upper: cost.eval(&w),
        weights: w,
        lower,
        factor: v.clone(),
        slack: slack_before.max(0.0),
        sweeps,
    }
}
