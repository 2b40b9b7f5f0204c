//! ℓ∞-budgeted adversary: the optimum sits on a sign vector, the unit-diagonal
//! SDP relaxation is within π/2 of it, and hyperplane rounding of the SDP's
//! Gram vectors recovers a good sign vector.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::objective::SigmaMatrix;
use crate::error::{Error, Result};
use crate::sdp::{solve_diagonal_sdp, DiagonalCost, SdpOptions};

/// Largest `n` accepted by [`linf_brute`].
pub const BRUTE_FORCE_MAX_N: usize = 22;

pub const DEFAULT_ROUNDING_TRIALS: usize = 200;

#[derive(Debug, Clone)]
pub struct LinfRelaxation {
    /// Certified upper bound on `max Tr(ΣX)` over unit-diagonal `X ⪰ 0`.
    pub sdp_value: f64,
    /// `Tr(ΣX)` at the returned Gram vectors.
    pub primal_value: f64,
    /// Row `i` is the unit vector `x_i`.
    pub gram_vectors: DMatrix<f64>,
    pub sweeps: usize,
}

pub fn linf_attack_sdp(sigma: &SigmaMatrix, opts: &SdpOptions) -> Result<LinfRelaxation> {
    let sol = solve_diagonal_sdp(sigma.matrix(), DiagonalCost::Linear, opts)?;
    Ok(LinfRelaxation {
        sdp_value: sol.upper,
        primal_value: sol.lower,
        gram_vectors: sol.factor,
        sweeps: sol.sweeps,
    })
}

/// Best of `trials` random-hyperplane roundings of `gram_vectors`: draw a
/// Gaussian normal `h` and set `s_i = sign⟨x_i, h⟩`.
pub fn linf_round(
    sigma: &SigmaMatrix,
    gram_vectors: &DMatrix<f64>,
    trials: usize,
    rng_seed: u64,
) -> Result<(Vec<f64>, f64)> {
    if trials == 0 {
        return Err(Error::InvalidArgument(
            "need at least one rounding trial".into(),
        ));
    }
    let n = sigma.dim();
    if gram_vectors.nrows() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: gram_vectors.nrows(),
        });
    }
    let k = gram_vectors.ncols();
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut best: Option<(Vec<f64>, f64)> = None;
    for _ in 0..trials {
        let h: Vec<f64> = (0..k).map(|_| StandardNormal.sample(&mut rng)).collect();
        let s: Vec<f64> = (0..n)
            .map(|i| {
                let dot: f64 = gram_vectors.row(i).iter().zip(&h).map(|(a, b)| a * b).sum();
                if dot >= 0.0 {
                    1.0
                } else {
                    -1.0
                }
            })
            .collect();
        let value = sigma.matrix().quad_form(&s);
        if best.as_ref().is_none_or(|b| value > b.1) {
            best = Some((s, value));
        }
    }
    Ok(best.expect("trials > 0"))
}

/// Exact `max sᵀΣs` over sign vectors by Gray-code enumeration with `s_0 = +1`.
pub fn linf_brute(sigma: &SigmaMatrix) -> Result<(Vec<f64>, f64)> {
    let n = sigma.dim();
    if n > BRUTE_FORCE_MAX_N {
        return Err(Error::InvalidArgument(format!(
            "brute force limited to n <= {BRUTE_FORCE_MAX_N}, got {n}"
        )));
    }
    if n == 0 {
        return Ok((Vec::new(), 0.0));
    }
    let z = sigma.matrix();
    let mut s = vec![1.0; n];
    let mut zs = z.mul_vec(&s);
    let mut value: f64 = zs.iter().sum();
    let mut best = (s.clone(), value);
    for step in 1u64..(1u64 << (n - 1)) {
        // Gray code flips bit `trailing_zeros(step)`; node 0 stays fixed.
        let j = step.trailing_zeros() as usize + 1;
        let sj = s[j];
        let zjj = z.get(j, j);
        value += -4.0 * sj * (zs[j] - zjj * sj);
        s[j] = -sj;
        for (i, zsi) in zs.iter_mut().enumerate() {
            *zsi -= 2.0 * sj * z.get(i, j);
        }
        if value > best.1 {
            best = (s.clone(), value);
        }
    }
    // Recompute the winner exactly to drop accumulated drift.
    let exact = z.quad_form(&best.0);
    Ok((best.0, exact))
}
