//! Opinions evolve on `G1` (Laplacian `L`) while disagreement is measured on
//! `G2` (Laplacian `M`). The adversary's ℓ2 power is
//! `λ_max((I+L)^-1 M (I+L)^-1)`; the functions here compute it and the
//! lower bounds and brackets that relate it to the two graphs' spectra,
//! similarity and cut structure.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::adversary::disagreement_gain;
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeSet};
use crate::spectral::{eig_sym, SymMatrix};

/// Largest `n` accepted by the exhaustive cut sweep.
pub const EXHAUSTIVE_MAX_N: usize = 22;

/// Opinion graph `g1` and measurement graph `g2` on the same node set.
#[derive(Debug, Clone)]
pub struct GraphPair {
    g1: Graph,
    g2: Graph,
    l: SymMatrix,
    m: SymMatrix,
}

impl GraphPair {
    pub fn new(g1: Graph, g2: Graph) -> Result<Self> {
        if g1.n() != g2.n() {
            return Err(Error::DimensionMismatch {
                expected: g1.n(),
                got: g2.n(),
            });
        }
        let l = g1.laplacian();
        let m = g2.laplacian();
        Ok(Self { g1, g2, l, m })
    }

    pub fn n(&self) -> usize {
        self.g1.n()
    }

    pub fn opinion_graph(&self) -> &Graph {
        &self.g1
    }

    pub fn measurement_graph(&self) -> &Graph {
        &self.g2
    }

    /// `L`, Laplacian of the opinion graph.
    pub fn opinion_laplacian(&self) -> &SymMatrix {
        &self.l
    }

    /// `M`, Laplacian of the measurement graph.
    pub fn measurement_laplacian(&self) -> &SymMatrix {
        &self.m
    }

    /// `(I+L)^-1 M (I+L)^-1`.
    pub fn mixed_form(&self) -> SymMatrix {
        let resolvent = eig_sym(&self.l).matrix_function(|y| 1.0 / (1.0 + y));
        self.m.congruence(&resolvent).expect("same dimension")
    }
}

/// `λ_max((I+L)^-1 M (I+L)^-1)`.
pub fn mixed_objective(pair: &GraphPair) -> f64 {
    eig_sym(&pair.mixed_form()).lambda_max()
}

/// `max_k λ_k(M) / (1+λ_k(L))²` with both spectra ascending.
pub fn mixed_lower_bound(pair: &GraphPair) -> f64 {
    let lv = eig_sym(&pair.l);
    let mv = eig_sym(&pair.m);
    lv.values()
        .iter()
        .zip(mv.values())
        .map(|(&l, &m)| m.max(0.0) / (1.0 + l.max(0.0)).powi(2))
        .fold(0.0, f64::max)
}

/// Bounds on `λ_max(CBC)` for PSD `B`, `C`:
/// `max_k λ_{n−k+1}(C)² λ_k(B) ≤ λ_max(CBC) ≤ λ_max(C)² λ_max(B)`.
pub fn matbound(b: &SymMatrix, c: &SymMatrix) -> Result<(f64, f64)> {
    b.check_dim(c.dim())?;
    let bv = eig_sym(b);
    let cv = eig_sym(c);
    for d in [&bv, &cv] {
        let scale = d.operator_norm().max(1.0);
        if d.lambda_min() < -1e-8 * scale {
            return Err(Error::NotPsd(d.lambda_min()));
        }
    }
    let n = b.dim();
    let cvals = cv.values();
    let bvals = bv.values();
    let lower = (0..n)
        .map(|k| cvals[n - 1 - k].max(0.0).powi(2) * bvals[k].max(0.0))
        .fold(0.0, f64::max);
    let upper = cv.lambda_max().max(0.0).powi(2) * bv.lambda_max().max(0.0);
    Ok((lower, upper))
}

#[derive(Debug, Clone, Serialize)]
pub struct SimilarityReport {
    /// Smallest `ε` with `L/(1+ε) ⪯ M ⪯ (1+ε)L`; infinite when the kernels
    /// differ.
    pub epsilon_spectral: f64,
    /// `‖M − L‖`.
    pub delta_operator: f64,
    /// Largest per-node weighted neighborhood symmetric difference.
    pub eta: f64,
    /// Largest absolute difference of weighted degrees.
    pub gamma: f64,
    pub diagnostic: Option<String>,
}

pub fn spectral_similarity(pair: &GraphPair) -> SimilarityReport {
    let n = pair.n();
    let (l, m) = (&pair.l, &pair.m);
    let mut eta = 0.0_f64;
    let mut gamma = 0.0_f64;
    for i in 0..n {
        let row: f64 = (0..n)
            .filter(|&j| j != i)
            .map(|j| (l.get(i, j) - m.get(i, j)).abs())
            .sum();
        eta = eta.max(row);
        gamma = gamma.max((l.get(i, i) - m.get(i, i)).abs());
    }
    let delta_operator = eig_sym(&m.sub(l).expect("same dimension")).operator_norm();
    let (epsilon_spectral, diagnostic) = match relative_condition(l, m) {
        Ok(eps) => (eps, None),
        Err(msg) => (f64::INFINITY, Some(msg)),
    };
    SimilarityReport {
        epsilon_spectral,
        delta_operator,
        eta,
        gamma,
        diagnostic,
    }
}

/// `max(λ_max(M|L), λ_max(L|M)) − 1` on the complement of the shared kernel,
/// where `λ_max(A|B)` is the top generalized eigenvalue of the pencil.
fn relative_condition(l: &SymMatrix, m: &SymMatrix) -> std::result::Result<f64, String> {
    let le = eig_sym(l);
    let me = eig_sym(m);
    let ltol = le.cluster_tolerance();
    let mtol = me.cluster_tolerance();
    let l_kernel = le.values().iter().filter(|&&v| v <= ltol).count();
    let m_kernel = me.values().iter().filter(|&&v| v <= mtol).count();
    if l_kernel != m_kernel {
        return Err(format!(
            "kernel dimensions differ ({l_kernel} vs {m_kernel}); no finite spectral approximation"
        ));
    }
    let n = l.dim();
    let range = n - l_kernel;
    if range == 0 {
        return Ok(0.0);
    }
    // M must vanish on the kernel of L.
    for k in 0..l_kernel {
        let v = le.vector(k);
        let mv = m.mul_vec(&v);
        let norm = mv.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-7 * me.operator_norm().max(f64::MIN_POSITIVE) {
            return Err("kernels of L and M differ; no finite spectral approximation".into());
        }
    }
    // Whitened pencil: Λ^{-1/2} Qᵀ M Q Λ^{-1/2} with Q the range of L.
    let q = le.vectors().columns(l_kernel, range);
    let inv_sqrt: Vec<f64> = le.values()[l_kernel..]
        .iter()
        .map(|v| 1.0 / v.sqrt())
        .collect();
    let mq = q.transpose() * m.as_matrix() * q;
    let whitened =
        nalgebra::DMatrix::from_fn(range, range, |i, j| inv_sqrt[i] * mq[(i, j)] * inv_sqrt[j]);
    let w = eig_sym(&SymMatrix::symmetrized(whitened));
    let (lo, hi) = (w.lambda_min(), w.lambda_max());
    if !(lo > 0.0) {
        return Err("M is singular on the range of L".into());
    }
    Ok((hi.max(1.0 / lo) - 1.0).max(0.0))
}

fn gain_range(lambda: f64, lo_c: f64, hi_c: f64) -> (f64, f64) {
    let a = disagreement_gain(lo_c * lambda);
    let b = disagreement_gain(hi_c * lambda);
    let max = if lambda > 0.0 && lo_c * lambda <= 1.0 && 1.0 <= hi_c * lambda {
        0.25
    } else {
        a.max(b)
    };
    (a.min(b), max)
}

/// Bracket on the mixed objective for an `eps`-spectral approximation pair,
/// from the spectrum of `M` alone.
pub fn similarity_bracket(pair: &GraphPair, eps: f64) -> Result<(f64, f64)> {
    if !(eps >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "eps must be nonnegative, got {eps}"
        )));
    }
    let (lo_c, hi_c) = (1.0 / (1.0 + eps), 1.0 + eps);
    let mv = eig_sym(&pair.m);
    let (mut lower, mut upper) = (0.0_f64, 0.0_f64);
    for &lambda in mv.values() {
        let (mn, mx) = gain_range(lambda.max(0.0), lo_c, hi_c);
        lower = lower.max(mn);
        upper = upper.max(mx);
    }
    Ok((lower / (1.0 + eps), upper * (1.0 + eps)))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct PhysicalBracket {
    pub lower: f64,
    pub upper: f64,
    /// `‖M − L‖`.
    pub delta: f64,
}

/// Bracket from operator-norm closeness `Δ = ‖M − L‖`.
pub fn physical_similarity_bracket(pair: &GraphPair) -> PhysicalBracket {
    let delta = eig_sym(&pair.m.sub(&pair.l).expect("same dimension")).operator_norm();
    let mv = eig_sym(&pair.m);
    let mut lower = f64::NEG_INFINITY;
    let mut upper = 0.0_f64;
    for &lambda in mv.values() {
        let lambda = lambda.max(0.0);
        lower = lower.max((lambda - 2.0 * delta) / (1.0 + lambda + delta).powi(2));
        upper = upper.max((lambda + 2.0 * delta) / (1.0 + (lambda - delta).max(0.0)).powi(2));
    }
    PhysicalBracket {
        lower,
        upper,
        delta,
    }
}

/// `xᵀMx / (n + (‖L‖+2)·xᵀLx)` for a test vector with `‖x‖² = n`.
pub fn bad_approx_bound(pair: &GraphPair, x: &[f64]) -> Result<f64> {
    let n = pair.n();
    if x.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: x.len(),
        });
    }
    let norm2: f64 = x.iter().map(|v| v * v).sum();
    if (norm2 - n as f64).abs() > 1e-8 * n as f64 {
        return Err(Error::InvalidArgument(format!(
            "test vector must have squared norm {n}, got {norm2}"
        )));
    }
    let eps = pair.l.quad_form(x).max(0.0);
    let eta = pair.m.quad_form(x).max(0.0);
    let l_norm = eig_sym(&pair.l).operator_norm();
    Ok(eta / (n as f64 + (l_norm + 2.0) * eps))
}

/// Cut-based lower bounds on the mixed objective for one node set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CutBounds {
    /// `4cut₂(S) / (n + 8(Δ_{G1}+1)·cut₁(S))` with `Δ_{G1}` the max degree.
    pub bound_cor: f64,
    /// `4cut₂(S) / (n + 4(‖L‖+2)·cut₁(S))`.
    pub bound_cor_exact: f64,
    /// `(4cut₂(S)/n) / (1 + 2√2·cut₁(S)/√n)²`.
    pub bound_prop: f64,
}

struct CutConstants {
    n: f64,
    max_degree: f64,
    l_norm: f64,
}

impl CutConstants {
    fn new(pair: &GraphPair) -> Self {
        Self {
            n: pair.n() as f64,
            max_degree: pair.g1.max_degree(),
            l_norm: eig_sym(&pair.l).operator_norm(),
        }
    }

    fn bounds(&self, cut1: f64, cut2: f64) -> CutBounds {
        let n = self.n;
        CutBounds {
            bound_cor: 4.0 * cut2 / (n + 8.0 * (self.max_degree + 1.0) * cut1),
            bound_cor_exact: 4.0 * cut2 / (n + 4.0 * (self.l_norm + 2.0) * cut1),
            bound_prop: (4.0 * cut2 / n)
                / (1.0 + 2.0 * std::f64::consts::SQRT_2 * cut1 / n.sqrt()).powi(2),
        }
    }
}

pub fn cut_bounds(pair: &GraphPair, s: &NodeSet) -> Result<CutBounds> {
    let n = pair.n();
    if s.universe() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: s.universe(),
        });
    }
    if s.is_empty() || s.len() == n {
        return Err(Error::InvalidArgument(
            "cut set must be nonempty and proper".into(),
        ));
    }
    let cut1 = pair.g1.cut(s)?;
    let cut2 = pair.g2.cut(s)?;
    Ok(CutConstants::new(pair).bounds(cut1, cut2))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepMode {
    Exhaustive,
    Random {
        samples: usize,
    },
    /// Prefix cuts of every eigenvector of `L` and of `M`, entries sorted
    /// ascending. Deterministic and polynomial; useful past the exhaustive
    /// size limit.
    Spectral,
}

#[derive(Debug, Clone, Serialize)]
pub struct BestCut {
    pub set: Vec<usize>,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CutSweep {
    pub best_prop: BestCut,
    pub best_cor: BestCut,
    pub best_cor_exact: BestCut,
    pub subsets_examined: u64,
}

#[derive(Clone, Copy)]
struct Best {
    value: f64,
    key: u64,
}

impl Best {
    const NONE: Best = Best {
        value: 0.0,
        key: u64::MAX,
    };

    fn offer(&mut self, value: f64, key: u64) {
        if value > self.value || (value == self.value && key < self.key) {
            *self = Best { value, key };
        }
    }

    fn merge(mut self, other: Best) -> Best {
        self.offer(other.value, other.key);
        self
    }
}

/// Maximizes each cut bound over node sets, either over every subset (up to
/// complement) or over `samples` uniformly random subsets.
pub fn cut_bounds_sweep(pair: &GraphPair, mode: SweepMode, rng_seed: u64) -> Result<CutSweep> {
    let n = pair.n();
    let consts = CutConstants::new(pair);
    let (_, examined, sets) = match mode {
        SweepMode::Exhaustive => {
            if n > EXHAUSTIVE_MAX_N {
                return Err(Error::InvalidArgument(format!(
                    "exhaustive sweep limited to n <= {EXHAUSTIVE_MAX_N}, got {n}"
                )));
            }
            let (bests, examined) = exhaustive(pair, &consts);
            let sets = bests.map(|b| {
                if b.key == u64::MAX {
                    Vec::new()
                } else {
                    NodeSet::from_bits(n, b.key).members().collect()
                }
            });
            (bests, examined, sets)
        }
        SweepMode::Random { samples } => {
            let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
            let mut bests = [Best::NONE; 3];
            let mut drawn: Vec<Vec<bool>> = Vec::new();
            let mut examined = 0u64;
            if n >= 2 {
                while (examined as usize) < samples {
                    let mask: Vec<bool> = (0..n).map(|_| rng.random::<bool>()).collect();
                    let s = NodeSet::from_mask(mask.clone());
                    if s.is_empty() || s.len() == n {
                        continue;
                    }
                    let b = consts.bounds(pair.g1.cut(&s)?, pair.g2.cut(&s)?);
                    let key = drawn.len() as u64;
                    drawn.push(mask);
                    for (slot, v) in
                        bests
                            .iter_mut()
                            .zip([b.bound_prop, b.bound_cor, b.bound_cor_exact])
                    {
                        slot.offer(v, key);
                    }
                    examined += 1;
                }
            }
            let sets = bests.map(|b| {
                if b.key == u64::MAX {
                    Vec::new()
                } else {
                    NodeSet::from_mask(drawn[b.key as usize].clone())
                        .members()
                        .collect()
                }
            });
            (bests, examined, sets)
        }
        SweepMode::Spectral => spectral_candidates(pair, &consts)?,
    };
    let [sp, sc, se] = sets;
    // Re-evaluate winners from scratch.
    let exact = |set: &Vec<usize>, pick: fn(&CutBounds) -> f64| -> Result<f64> {
        if set.is_empty() {
            return Ok(0.0);
        }
        let s = NodeSet::new(n, set.iter().copied())?;
        Ok(pick(&consts.bounds(pair.g1.cut(&s)?, pair.g2.cut(&s)?)))
    };
    Ok(CutSweep {
        best_prop: BestCut {
            value: exact(&sp, |b| b.bound_prop)?,
            set: sp,
        },
        best_cor: BestCut {
            value: exact(&sc, |b| b.bound_cor)?,
            set: sc,
        },
        best_cor_exact: BestCut {
            value: exact(&se, |b| b.bound_cor_exact)?,
            set: se,
        },
        subsets_examined: examined,
    })
}

fn spectral_candidates(
    pair: &GraphPair,
    consts: &CutConstants,
) -> Result<([Best; 3], u64, [Vec<usize>; 3])> {
    let n = pair.n();
    let mut bests = [Best::NONE; 3];
    let mut candidates: Vec<Vec<usize>> = Vec::new();
    if n >= 2 {
        for eig in [eig_sym(&pair.l), eig_sym(&pair.m)] {
            for k in 0..n {
                let v = eig.vector(k);
                let mut order: Vec<usize> = (0..n).collect();
                order.sort_by(|&a, &b| v[a].total_cmp(&v[b]).then(a.cmp(&b)));
                for size in 1..n {
                    let mut set = order[..size].to_vec();
                    set.sort_unstable();
                    let s = NodeSet::new(n, set.iter().copied())?;
                    let b = consts.bounds(pair.g1.cut(&s)?, pair.g2.cut(&s)?);
                    let key = candidates.len() as u64;
                    candidates.push(set);
                    for (slot, v) in
                        bests
                            .iter_mut()
                            .zip([b.bound_prop, b.bound_cor, b.bound_cor_exact])
                    {
                        slot.offer(v, key);
                    }
                }
            }
        }
    }
    let sets = bests.map(|b| {
        if b.key == u64::MAX {
            Vec::new()
        } else {
            candidates[b.key as usize].clone()
        }
    });
    Ok((bests, candidates.len() as u64, sets))
}

/// Gray-code enumeration of all nonempty subsets of `0..n-1` (node `n−1` is
/// always outside, which covers every cut once). Chunks over the high bits
/// run in parallel.
fn exhaustive(pair: &GraphPair, consts: &CutConstants) -> ([Best; 3], u64) {
    let n = pair.n();
    if n < 2 {
        return ([Best::NONE; 3], 0);
    }
    let free = n - 1;
    let low = free.min(14);
    let high = free - low;
    let w1 = pair.g1.clone();
    let w2 = pair.g2.clone();
    let deg1: Vec<f64> = (0..n).map(|u| w1.degree(u)).collect();
    let deg2: Vec<f64> = (0..n).map(|u| w2.degree(u)).collect();

    let chunk = |c: u64| -> [Best; 3] {
        let base = c << low;
        let mut in_s = vec![false; n];
        for (u, slot) in in_s.iter_mut().enumerate().take(free) {
            *slot = base >> u & 1 == 1;
        }
        // Weight from each node into S, per graph.
        let mut into1 = vec![0.0; n];
        let mut into2 = vec![0.0; n];
        let mut cut1 = 0.0;
        let mut cut2 = 0.0;
        for u in 0..n {
            for v in 0..n {
                if in_s[v] {
                    into1[u] += w1.weight(u, v);
                    into2[u] += w2.weight(u, v);
                }
            }
            if in_s[u] {
                cut1 += deg1[u] - into1[u];
                cut2 += deg2[u] - into2[u];
            }
        }
        let mut bests = [Best::NONE; 3];
        let mut mask = base;
        let record = |mask: u64, cut1: f64, cut2: f64, bests: &mut [Best; 3]| {
            if mask != 0 {
                let b = consts.bounds(cut1.max(0.0), cut2.max(0.0));
                for (slot, v) in
                    bests
                        .iter_mut()
                        .zip([b.bound_prop, b.bound_cor, b.bound_cor_exact])
                {
                    slot.offer(v, mask);
                }
            }
        };
        record(mask, cut1, cut2, &mut bests);
        for step in 1u64..(1u64 << low) {
            let v = step.trailing_zeros() as usize;
            if in_s[v] {
                in_s[v] = false;
                cut1 += -deg1[v] + 2.0 * into1[v];
                cut2 += -deg2[v] + 2.0 * into2[v];
                for u in 0..n {
                    into1[u] -= w1.weight(u, v);
                    into2[u] -= w2.weight(u, v);
                }
            } else {
                cut1 += deg1[v] - 2.0 * into1[v];
                cut2 += deg2[v] - 2.0 * into2[v];
                in_s[v] = true;
                for u in 0..n {
                    into1[u] += w1.weight(u, v);
                    into2[u] += w2.weight(u, v);
                }
            }
            mask ^= 1 << v;
            record(mask, cut1, cut2, &mut bests);
        }
        bests
    };

    let bests = (0..1u64 << high).into_par_iter().map(chunk).reduce(
        || [Best::NONE; 3],
        |a, b| [a[0].merge(b[0]), a[1].merge(b[1]), a[2].merge(b[2])],
    );
    let examined = (1u64 << free) - 1;
    (bests, examined)
}

/// Shifts `η` of spectral mass from the third to the second eigenvalue of
/// `M`: `M + η(v₂v₂ᵀ − v₃v₃ᵀ)`. Requires `λ₂(M) < λ₃(M)`. The trace is
/// unchanged; whether the result is still a Laplacian depends on `η`.
pub fn spectral_swap(m: &SymMatrix, eta: f64) -> Result<SymMatrix> {
    let eig = eig_sym(m);
    if eig.dim() < 3 {
        return Err(Error::InvalidArgument("need at least three nodes".into()));
    }
    let vals = eig.values();
    let tol = eig.cluster_tolerance();
    let simple = |k: usize| {
        (k == 0 || vals[k] - vals[k - 1] > tol)
            && (k + 1 == vals.len() || vals[k + 1] - vals[k] > tol)
    };
    if !(simple(1) && simple(2)) {
        return Err(Error::InvalidArgument(
            "second and third eigenvalues must be simple".into(),
        ));
    }
    let mut shifted = vals.to_vec();
    shifted[1] += eta;
    shifted[2] -= eta;
    Ok(eig.with_values(&shifted))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::{l2_attack, ObjectiveSpec};
    use crate::graph::{complement_graph, cycle_graph, path_graph, unit_complete_graph};

    fn pair(a: Graph, b: Graph) -> GraphPair {
        GraphPair::new(a, b).unwrap()
    }

    #[test]
    fn same_graph_reduces_to_single_graph() {
        let g = cycle_graph(5).unwrap();
        let p = pair(g.clone(), g.clone());
        let single = l2_attack(&g.laplacian(), &ObjectiveSpec::disagreement(1.0).unwrap())
            .unwrap()
            .optimal_value;
        assert!((mixed_objective(&p) - single).abs() < 1e-12);
        assert!((mixed_lower_bound(&p) - single).abs() < 1e-12);
    }

    #[test]
    fn c4_against_its_complement() {
        let c4 = cycle_graph(4).unwrap();
        let p = pair(c4.clone(), complement_graph(&c4).unwrap());
        assert!((mixed_objective(&p) - 2.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn matbound_identities() {
        let b = cycle_graph(5).unwrap().laplacian();
        let (lo, hi) = matbound(&b, &SymMatrix::identity(5)).unwrap();
        let top = eig_sym(&b).lambda_max();
        assert!((lo - top).abs() < 1e-12 && (hi - top).abs() < 1e-12);

        let c = path_graph(5).unwrap().laplacian();
        let (lo, hi) = matbound(&SymMatrix::identity(5), &c).unwrap();
        let c2 = eig_sym(&c).lambda_max().powi(2);
        assert!(lo <= c2 + 1e-12 && c2 <= hi + 1e-12);

        assert!(matbound(
            &SymMatrix::identity(2).scaled(-1.0),
            &SymMatrix::identity(2)
        )
        .is_err());
    }

    #[test]
    fn similarity_of_scaled_and_permuted() {
        let g = path_graph(5).unwrap();
        let r = spectral_similarity(&pair(g.clone(), g.clone()));
        assert!(r.epsilon_spectral.abs() < 1e-12);
        assert_eq!(r.delta_operator, 0.0);

        let scaled = crate::graph::graph_from_laplacian(&g.laplacian().scaled(1.5)).unwrap();
        let r = spectral_similarity(&pair(g.clone(), scaled));
        assert!((r.epsilon_spectral - 0.5).abs() < 1e-10);

        let c4 = cycle_graph(4).unwrap();
        let rot = c4.permuted(&[1, 2, 3, 0]).unwrap();
        assert!(
            spectral_similarity(&pair(c4.clone(), rot))
                .epsilon_spectral
                .abs()
                < 1e-10
        );
        let swap = c4.permuted(&[1, 0, 2, 3]).unwrap();
        let r = spectral_similarity(&pair(c4, swap));
        assert!(r.epsilon_spectral.is_finite() && r.epsilon_spectral > 0.1);
    }

    #[test]
    fn similarity_with_mismatched_kernels() {
        let two = Graph::new(4, [(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        let r = spectral_similarity(&pair(two, cycle_graph(4).unwrap()));
        assert!(r.epsilon_spectral.is_infinite());
        assert!(r.diagnostic.is_some());
    }

    #[test]
    fn brackets_degenerate_at_zero() {
        let g = star_graph_pair();
        let single = mixed_objective(&g);
        let (lo, hi) = similarity_bracket(&g, 0.0).unwrap();
        assert!((lo - single).abs() < 1e-12 && (hi - single).abs() < 1e-12);
        let b = physical_similarity_bracket(&g);
        assert_eq!(b.delta, 0.0);
        assert!((b.lower - single).abs() < 1e-12 && (b.upper - single).abs() < 1e-12);
        assert!(similarity_bracket(&g, -0.1).is_err());
    }

    fn star_graph_pair() -> GraphPair {
        let s = crate::graph::star_graph(4).unwrap();
        pair(s.clone(), s)
    }

    #[test]
    fn p2_cut_bounds() {
        let p2 = path_graph(2).unwrap();
        let p = pair(p2.clone(), p2);
        let b = cut_bounds(&p, &NodeSet::new(2, [0]).unwrap()).unwrap();
        assert!((b.bound_prop - 2.0 / 9.0).abs() < 1e-15);
        assert!(cut_bounds(&p, &NodeSet::new(2, []).unwrap()).is_err());
        assert!(cut_bounds(&p, &NodeSet::new(2, [0, 1]).unwrap()).is_err());
    }

    #[test]
    fn empty_measurement_graph_gives_zero() {
        let p = pair(cycle_graph(5).unwrap(), Graph::empty(5).unwrap());
        let b = cut_bounds(&p, &NodeSet::new(5, [0, 2]).unwrap()).unwrap();
        assert_eq!(
            (b.bound_cor, b.bound_cor_exact, b.bound_prop),
            (0.0, 0.0, 0.0)
        );
    }

    #[test]
    fn bad_approx_checks_normalization() {
        let k = unit_complete_graph(4).unwrap();
        let p = pair(cycle_graph(4).unwrap(), k);
        assert_eq!(bad_approx_bound(&p, &[1.0; 4]).unwrap(), 0.0);
        assert!(bad_approx_bound(&p, &[1.0, 0.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn single_node_sweep() {
        let p = pair(Graph::empty(1).unwrap(), Graph::empty(1).unwrap());
        let s = cut_bounds_sweep(&p, SweepMode::Exhaustive, 0).unwrap();
        assert_eq!(s.best_prop.value, 0.0);
        assert!(s.best_prop.set.is_empty());
        for mode in [SweepMode::Random { samples: 10 }, SweepMode::Spectral] {
            let s = cut_bounds_sweep(&p, mode, 0).unwrap();
            assert_eq!(s.subsets_examined, 0);
        }
    }

    #[test]
    fn sweep_matches_direct_enumeration() {
        let g1 = path_graph(7).unwrap();
        let g2 = cycle_graph(7).unwrap();
        let p = pair(g1, g2);
        let sweep = cut_bounds_sweep(&p, SweepMode::Exhaustive, 0).unwrap();
        let mut best = 0.0_f64;
        for bits in 1u64..(1 << 7) - 1 {
            let s = NodeSet::from_bits(7, bits);
            best = best.max(cut_bounds(&p, &s).unwrap().bound_prop);
        }
        assert!((sweep.best_prop.value - best).abs() < 1e-12);
        assert_eq!(sweep.subsets_examined, 63);
        for mode in [SweepMode::Random { samples: 200 }, SweepMode::Spectral] {
            let s = cut_bounds_sweep(&p, mode, 3).unwrap();
            assert!(s.best_prop.value <= best + 1e-12);
        }
    }

    #[test]
    fn spectral_sweep_finds_the_misaligned_side() {
        let cliques = crate::graph::two_cliques(6, &[]).unwrap();
        let bip = crate::graph::complete_bipartite_graph(6, 6).unwrap();
        let p = pair(cliques, bip);
        let s = cut_bounds_sweep(&p, SweepMode::Spectral, 0).unwrap();
        assert!((s.best_prop.value - 12.0).abs() < 1e-9);
        assert!(
            s.best_prop.set == (0..6).collect::<Vec<_>>()
                || s.best_prop.set == (6..12).collect::<Vec<_>>()
        );
    }
}
