#![allow(clippy::needless_range_loop)]

mod common;

use discord_lab::adversary::{disagreement_gain, l2_attack, ObjectiveSpec};
use discord_lab::graph::{
    complement_graph, complete_bipartite_graph, cycle_graph, hypercube_graph, two_cliques,
    unit_complete_graph, Graph, NodeSet,
};
use discord_lab::mixed::{
    bad_approx_bound, cut_bounds, matbound, mixed_lower_bound, mixed_objective,
    physical_similarity_bracket, similarity_bracket, spectral_similarity, GraphPair,
};
use discord_lab::spectral::{eig_sym, SymMatrix};
use rand::Rng;

#[test]
fn commuting_pairs_follow_the_closed_form() {
    // d-regular unweighted graphs and their complements share eigenvectors:
    // M = nI − J − L.
    let graphs = [
        cycle_graph(5).unwrap(),
        cycle_graph(8).unwrap(),
        hypercube_graph(3).unwrap(),
        complete_bipartite_graph(3, 3).unwrap(),
        complete_bipartite_graph(5, 5).unwrap(),
    ];
    for g in graphs {
        let n = g.n() as f64;
        let pair = GraphPair::new(g.clone(), complement_graph(&g).unwrap()).unwrap();
        let closed = eig_sym(&g.laplacian())
            .values()
            .iter()
            .skip(1)
            .map(|&l| (n - l) / (1.0 + l).powi(2))
            .fold(0.0, f64::max);
        let got = mixed_objective(&pair);
        assert!((got - closed).abs() <= 1e-8, "n = {n}: {got} vs {closed}");
    }
}

#[test]
fn complete_measurement_graph_favours_complete_opinion_graph() {
    let n = 7;
    let kn = unit_complete_graph(n).unwrap();
    let single = l2_attack(&kn.laplacian(), &ObjectiveSpec::disagreement(1.0).unwrap())
        .unwrap()
        .optimal_value;
    let mut rng = common::rng(31);
    for _ in 0..200 {
        let g = common::random_connected(&mut rng, n, 0.5, false);
        let scale = kn.total_weight() / g.total_weight();
        let g = Graph::new(n, g.edges().iter().map(|e| (e.u, e.v, e.w * scale))).unwrap();
        let pair = GraphPair::new(g, kn.clone()).unwrap();
        assert!(mixed_lower_bound(&pair) >= single - 1e-10);
        assert!(mixed_objective(&pair) >= single - 1e-10);
    }
}

fn random_psd(rng: &mut rand_chacha::ChaCha8Rng, n: usize, rank: usize) -> SymMatrix {
    let a = nalgebra::DMatrix::from_fn(n, rank, |_, _| rng.random_range(-1.0..1.0));
    SymMatrix::symmetrized(&a * a.transpose())
}

#[test]
fn matbound_sandwich_on_random_psd_pairs() {
    let mut rng = common::rng(32);
    for _ in 0..100 {
        let n = rng.random_range(1..=30);
        let rb = rng.random_range(1..=n);
        let rc = rng.random_range(1..=n);
        let b = random_psd(&mut rng, n, rb);
        let c = random_psd(&mut rng, n, rc);
        let (lo, hi) = matbound(&b, &c).unwrap();
        let exact = eig_sym(&b.congruence(&c).unwrap()).lambda_max();
        let scale = hi.max(1.0);
        assert!(
            lo <= exact + 1e-8 * scale && exact <= hi + 1e-8 * scale,
            "{lo} {exact} {hi}"
        );
    }
}

/// Keeps each edge of `dense` with probability `p`, reweighted by `1/p`.
fn sparsify(rng: &mut rand_chacha::ChaCha8Rng, dense: &Graph, p: f64) -> Option<Graph> {
    let kept: Vec<(usize, usize, f64)> = dense
        .edges()
        .iter()
        .filter(|_| rng.random_bool(p))
        .map(|e| (e.u, e.v, e.w / p))
        .collect();
    let g = Graph::new(dense.n(), kept).ok()?;
    g.is_connected().then_some(g)
}

#[test]
fn brackets_hold_for_sampled_sparsifiers() {
    let mut rng = common::rng(33);
    let mut tested = 0;
    for _ in 0..60 {
        let n = rng.random_range(8..=30);
        let dense = common::random_connected(&mut rng, n, 0.8, false);
        let Some(sparse) = sparsify(&mut rng, &dense, 0.6) else {
            continue;
        };
        let pair = GraphPair::new(sparse, dense).unwrap();
        let sim = spectral_similarity(&pair);
        assert!(sim.epsilon_spectral.is_finite());
        let obj = mixed_objective(&pair);
        let (lo, hi) = similarity_bracket(&pair, sim.epsilon_spectral).unwrap();
        assert!(
            lo <= obj + 1e-8 && obj <= hi + 1e-8,
            "[{lo}, {hi}] vs {obj}"
        );
        tested += 1;
    }
    assert!(tested >= 30);
}

#[test]
fn similarity_bracket_with_identical_graphs() {
    let g = cycle_graph(6).unwrap();
    let pair = GraphPair::new(g.clone(), g).unwrap();
    let single = mixed_objective(&pair);
    let (lo, hi) = similarity_bracket(&pair, 0.5).unwrap();
    assert!(lo <= single && single <= hi);
    assert!(hi / lo <= 1.5 * 1.5 * 4.0);
}

#[test]
fn physical_bracket_narrows_with_perturbation_size() {
    let mut rng = common::rng(34);
    for _ in 0..10 {
        let base = common::random_connected(&mut rng, 12, 0.4, false);
        let noise = common::random_connected(&mut rng, 12, 0.3, false);
        let mut last_width = f64::INFINITY;
        for eta in [0.1, 0.05, 0.02, 0.01, 0.0] {
            let m = base
                .laplacian()
                .add(&noise.laplacian().scaled(eta))
                .unwrap();
            let g2 = discord_lab::graph::graph_from_laplacian(&m).unwrap();
            let pair = GraphPair::new(base.clone(), g2).unwrap();
            let b = physical_similarity_bracket(&pair);
            let obj = mixed_objective(&pair);
            assert!(b.lower <= obj + 1e-8 && obj <= b.upper + 1e-8);
            let width = b.upper - b.lower;
            assert!(width <= last_width + 1e-12, "width grew at η = {eta}");
            last_width = width;
        }
        assert!(last_width.abs() <= 1e-10);
    }
}

#[test]
fn test_vector_bounds_on_misaligned_pair() {
    let k = 20;
    let n = 2 * k;
    let pair = GraphPair::new(
        two_cliques(k, &[]).unwrap(),
        complete_bipartite_graph(k, k).unwrap(),
    )
    .unwrap();
    let side = NodeSet::new(n, 0..k).unwrap();
    let chi = side.signed_indicator();
    let obj = mixed_objective(&pair);
    let b = bad_approx_bound(&pair, &chi).unwrap();
    // χ is invisible to G1, so the bound is χᵀMχ / n = 4k²/2k.
    assert!((b - 2.0 * k as f64).abs() <= 1e-9);
    assert!(b <= obj + 1e-8);
    let c = cut_bounds(&pair, &side).unwrap();
    assert!((c.bound_prop - 2.0 * k as f64).abs() <= 1e-9);
    assert!((c.bound_cor - 2.0 * k as f64).abs() <= 1e-9);

    // A handful of crossing edges shrinks the cut bounds well below 2k.
    let crossed = GraphPair::new(
        two_cliques(k, &[(0, 0), (1, 1), (2, 2)]).unwrap(),
        complete_bipartite_graph(k, k).unwrap(),
    )
    .unwrap();
    let c2 = cut_bounds(&crossed, &side).unwrap();
    assert!(c2.bound_prop < c.bound_prop && c2.bound_cor < c2.bound_prop);
    assert!(c2.bound_prop <= mixed_objective(&crossed) + 1e-8);
}

#[test]
fn top_eigenvector_test_vector_on_identical_graphs() {
    let g = cycle_graph(7).unwrap();
    let pair = GraphPair::new(g.clone(), g.clone()).unwrap();
    let e = eig_sym(&g.laplacian());
    let x: Vec<f64> = e.vector(6).iter().map(|v| v * 7f64.sqrt()).collect();
    let b = bad_approx_bound(&pair, &x).unwrap();
    let single = e
        .values()
        .iter()
        .map(|&l| disagreement_gain(l.max(0.0)))
        .fold(0.0, f64::max);
    assert!(b <= single + 1e-12);
    assert!(bad_approx_bound(&pair, &[1.0; 7]).unwrap().abs() < 1e-15);
}

/// K4 edges grouped by perfect matching; moving weight between matchings
/// keeps every weighted degree fixed.
const MATCHINGS: [[(usize, usize); 2]; 3] = [[(0, 1), (2, 3)], [(0, 2), (1, 3)], [(0, 3), (1, 2)]];

/// Mixed objective for every degree-preserving reweighting of `g2` on a
/// fine grid, skipping infeasible (negative) or disconnected points.
fn degree_preserving_values(g2: &Graph, steps: usize) -> Vec<(f64, [f64; 3])> {
    let base = g2.laplacian();
    let w0 = |u: usize, v: usize| -base.get(u, v);
    let mut out = Vec::new();
    for i in 0..=steps {
        for j in 0..=steps {
            let a = -1.0 + 2.0 * i as f64 / steps as f64;
            let b = -1.0 + 2.0 * j as f64 / steps as f64;
            let shift = [a, b, -a - b];
            let mut edges = Vec::new();
            let mut ok = true;
            for (m, d) in MATCHINGS.iter().zip(shift) {
                for &(u, v) in m {
                    let w = w0(u, v) + d;
                    if w < -1e-12 {
                        ok = false;
                    } else if w > 1e-12 {
                        edges.push((u, v, w));
                    }
                }
            }
            if !ok {
                continue;
            }
            let g1 = Graph::new(4, edges).unwrap();
            if !g1.is_connected() {
                continue;
            }
            let pair = GraphPair::new(g1, g2.clone()).unwrap();
            out.push((mixed_objective(&pair), shift));
        }
    }
    out
}

#[test]
fn path_is_beaten_by_a_degree_preserving_reweighting() {
    // The search does not confirm that P4 is optimal for itself: moving
    // weight from {01, 23} onto {02, 13} drops the objective to 2/9.
    let p4 = discord_lab::graph::path_graph(4).unwrap();
    let own = mixed_objective(&GraphPair::new(p4.clone(), p4.clone()).unwrap());
    let lam = 2.0 - 2f64.sqrt();
    assert!((own - lam / (1.0 + lam).powi(2)).abs() <= 1e-12, "{own}");
    let values = degree_preserving_values(&p4, 400);
    assert!(values.len() > 1000);
    let (best, at) =
        values.iter().cloned().fold(
            (f64::INFINITY, [0.0; 3]),
            |m, v| if v.0 < m.0 { v } else { m },
        );
    assert!((best - 2.0 / 9.0).abs() <= 1e-9, "{best} at {at:?}");
    assert!(own - best > 0.01);

    let g1 = Graph::new(
        4,
        [
            (0, 1, 0.9),
            (2, 3, 0.9),
            (0, 2, 0.1),
            (1, 3, 0.1),
            (1, 2, 1.0),
        ],
    )
    .unwrap();
    let direct = mixed_objective(&GraphPair::new(g1, p4).unwrap());
    assert!((direct - 2.0 / 9.0).abs() <= 1e-9, "{direct}");
}

#[test]
fn cycle_improves_under_degree_preserving_reweighting() {
    let c4 = cycle_graph(4).unwrap();
    let own = mixed_objective(&GraphPair::new(c4.clone(), c4.clone()).unwrap());
    let values = degree_preserving_values(&c4, 400);
    let (best, at) =
        values.iter().cloned().fold(
            (f64::INFINITY, [0.0; 3]),
            |m, v| if v.0 < m.0 { v } else { m },
        );
    assert!(best < own - 0.02, "{best} vs {own}");
    assert!(
        (best - 0.1929).abs() <= 2e-3,
        "grid minimum {best} at {at:?}"
    );
    // Cycle edges lose weight, diagonals gain twice as much.
    assert!(at[1] > 0.0 && at[0] < 0.0 && at[2] < 0.0);
}
