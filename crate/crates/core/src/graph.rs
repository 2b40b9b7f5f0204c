//! Weighted undirected simple graphs, their Laplacians and cuts.

use std::collections::HashSet;
use std::fmt::Write as _;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::spectral::SymMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

/// Weighted undirected simple graph on nodes `0..n`.
///
/// Edges are validated on construction: no self-loops, no duplicate
/// undirected pairs, finite strictly positive weights. A dense weight matrix
/// is kept alongside the edge list.
#[derive(Debug, Clone)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    weights: DMatrix<f64>,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.weights == other.weights
    }
}

impl Graph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        let mut g = GraphBuilder::new(n)?;
        for (u, v, w) in edges {
            g.add(u, v, w)?;
        }
        Ok(g.finish())
    }

    /// Graph on `n` nodes with no edges.
    pub fn empty(n: usize) -> Result<Self> {
        Self::new(n, [])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn weight(&self, u: usize, v: usize) -> f64 {
        self.weights[(u, v)]
    }

    /// Sum of all edge weights (`m`).
    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.w).sum()
    }

    pub fn degree(&self, u: usize) -> f64 {
        self.weights.row(u).sum()
    }

    pub fn max_degree(&self) -> f64 {
        (0..self.n).map(|u| self.degree(u)).fold(0.0, f64::max)
    }

    pub fn is_unweighted(&self) -> bool {
        self.edges.iter().all(|e| e.w == 1.0)
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for v in 0..self.n {
                if !seen[v] && self.weights[(u, v)] > 0.0 {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == self.n
    }

    /// `L = D − A`.
    pub fn laplacian(&self) -> SymMatrix {
        let mut l = -self.weights.clone();
        for u in 0..self.n {
            l[(u, u)] = self.degree(u);
        }
        SymMatrix::symmetrized(l)
    }

    /// Total weight of edges with one endpoint in `s` and the other in `t`.
    pub fn cut_value(&self, s: &NodeSet, t: &NodeSet) -> Result<f64> {
        s.check_universe(self.n)?;
        t.check_universe(self.n)?;
        if s.members().any(|u| t.contains(u)) {
            return Err(Error::InvalidArgument("cut sets must be disjoint".into()));
        }
        Ok(s.members()
            .map(|u| t.members().map(|v| self.weights[(u, v)]).sum::<f64>())
            .sum())
    }

    /// `cut(S, Sᶜ)`.
    pub fn cut(&self, s: &NodeSet) -> Result<f64> {
        self.cut_value(s, &s.complement())
    }

    /// Relabels nodes: node `u` becomes `perm[u]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: perm.len(),
            });
        }
        let mut seen = vec![false; self.n];
        for &p in perm {
            if p >= self.n || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidArgument("not a permutation".into()));
            }
        }
        Self::new(
            self.n,
            self.edges.iter().map(|e| (perm[e.u], perm[e.v], e.w)),
        )
    }

    /// Edge-list text accepted by [`load_graph`].
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("n {}\n", self.n);
        for e in &self.edges {
            let _ = writeln!(out, "{} {} {:?}", e.u, e.v, e.w);
        }
        out
    }
}

struct GraphBuilder {
    n: usize,
    edges: Vec<Edge>,
    weights: DMatrix<f64>,
}

impl GraphBuilder {
    fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument(
                "graph needs at least one node".into(),
            ));
        }
        Ok(Self {
            n,
            edges: Vec::new(),
            weights: DMatrix::zeros(n, n),
        })
    }

    fn add(&mut self, u: usize, v: usize, w: f64) -> Result<()> {
        if u >= self.n || v >= self.n {
            return Err(Error::InvalidArgument(format!(
                "edge ({u}, {v}) out of range for {} nodes",
                self.n
            )));
        }
        if u == v {
            return Err(Error::InvalidArgument(format!("self-loop at node {u}")));
        }
        if !(w.is_finite() && w > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "edge ({u}, {v}) has nonpositive weight {w}"
            )));
        }
        if self.weights[(u, v)] != 0.0 {
            return Err(Error::InvalidArgument(format!("duplicate edge ({u}, {v})")));
        }
        self.weights[(u, v)] = w;
        self.weights[(v, u)] = w;
        self.edges.push(Edge { u, v, w });
        Ok(())
    }

    fn finish(self) -> Graph {
        Graph {
            n: self.n,
            edges: self.edges,
            weights: self.weights,
        }
    }
}

/// Parses the edge-list format:
///
/// ```text
/// # comment
/// n 4
/// 0 1 1.0
/// 1 2 0.5
/// ```
///
/// The `n` header is optional; without it the node count is one more than
/// the largest id seen.
pub fn load_graph(text: &str) -> Result<Graph> {
    let mut header: Option<(usize, usize)> = None;
    let mut raw = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let perr = |msg: String| Error::Parse { line: lineno, msg };
        if fields[0] == "n" {
            if header.is_some() {
                return Err(perr("repeated node-count header".into()));
            }
            if !raw.is_empty() {
                return Err(perr("node-count header must precede edges".into()));
            }
            let [_, count] = fields[..] else {
                return Err(perr("expected `n <count>`".into()));
            };
            let count = count
                .parse()
                .map_err(|_| perr(format!("bad node count `{count}`")))?;
            header = Some((count, lineno));
            continue;
        }
        let [u, v, w] = fields[..] else {
            return Err(perr(format!(
                "expected `u v w`, got {} fields",
                fields.len()
            )));
        };
        let u: usize = u.parse().map_err(|_| perr(format!("bad node id `{u}`")))?;
        let v: usize = v.parse().map_err(|_| perr(format!("bad node id `{v}`")))?;
        let w: f64 = w.parse().map_err(|_| perr(format!("bad weight `{w}`")))?;
        raw.push((lineno, u, v, w));
    }

    let n = match header {
        Some((n, _)) => n,
        None => raw
            .iter()
            .map(|&(_, u, v, _)| u.max(v) + 1)
            .max()
            .unwrap_or(0),
    };
    let mut b = GraphBuilder::new(n).map_err(|e| Error::Parse {
        line: header.map_or(0, |h| h.1),
        msg: e.to_string(),
    })?;
    for (lineno, u, v, w) in raw {
        b.add(u, v, w).map_err(|e| Error::Parse {
            line: lineno,
            msg: match e {
                Error::InvalidArgument(m) => m,
                other => other.to_string(),
            },
        })?;
    }
    Ok(b.finish())
}

/// Subset of the node range `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NodeSet {
    mask: Vec<bool>,
}

impl NodeSet {
    pub fn new(n: usize, members: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut mask = vec![false; n];
        for u in members {
            if u >= n {
                return Err(Error::InvalidArgument(format!("node {u} outside 0..{n}")));
            }
            mask[u] = true;
        }
        Ok(Self { mask })
    }

    pub fn from_mask(mask: Vec<bool>) -> Self {
        Self { mask }
    }

    /// Bit `u` of `bits` selects node `u`.
    pub fn from_bits(n: usize, bits: u64) -> Self {
        Self {
            mask: (0..n).map(|u| bits >> u & 1 == 1).collect(),
        }
    }

    pub fn universe(&self) -> usize {
        self.mask.len()
    }

    pub fn contains(&self, u: usize) -> bool {
        self.mask.get(u).copied().unwrap_or(false)
    }

    pub fn len(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        self.mask
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(u, _)| u)
    }

    pub fn complement(&self) -> Self {
        Self {
            mask: self.mask.iter().map(|b| !b).collect(),
        }
    }

    /// `χ_S`: +1 on members, −1 elsewhere.
    pub fn signed_indicator(&self) -> Vec<f64> {
        self.mask
            .iter()
            .map(|&b| if b { 1.0 } else { -1.0 })
            .collect()
    }

    fn check_universe(&self, n: usize) -> Result<()> {
        if self.universe() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: self.universe(),
            });
        }
        Ok(())
    }
}

/// Recovers the graph whose Laplacian is `l`. Off-diagonal entries must be
/// nonpositive; magnitudes below `1e-12·max|l|` are dropped as absent edges.
pub fn graph_from_laplacian(l: &SymMatrix) -> Result<Graph> {
    let n = l.dim();
    let floor = 1e-12 * l.max_abs();
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let w = -l.get(u, v);
            if w < -floor {
                return Err(Error::InvalidArgument(format!(
                    "positive off-diagonal entry at ({u}, {v}); not a Laplacian"
                )));
            }
            if w > floor {
                edges.push((u, v, w));
            }
        }
    }
    Graph::new(n, edges)
}

/// Complete graph with uniform weight `total_weight / (n(n−1)/2)`.
pub fn complete_graph(n: usize, total_weight: f64) -> Result<Graph> {
    if n < 2 {
        return Err(Error::InvalidArgument("complete graph needs n >= 2".into()));
    }
    if !(total_weight > 0.0 && total_weight.is_finite()) {
        return Err(Error::InvalidArgument(
            "total weight must be positive".into(),
        ));
    }
    let w = total_weight / (n * (n - 1) / 2) as f64;
    Graph::new(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v, w))))
}

/// Unweighted `K_n`.
pub fn unit_complete_graph(n: usize) -> Result<Graph> {
    complete_graph(n, (n * (n - 1) / 2) as f64)
}

/// Complement of an unweighted graph.
pub fn complement_graph(g: &Graph) -> Result<Graph> {
    if !g.is_unweighted() {
        return Err(Error::InvalidArgument(
            "complement is only defined for unweighted graphs".into(),
        ));
    }
    let n = g.n();
    let present: HashSet<(usize, usize)> = g
        .edges()
        .iter()
        .map(|e| (e.u.min(e.v), e.u.max(e.v)))
        .collect();
    Graph::new(
        n,
        (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .filter(|p| !present.contains(p))
            .map(|(u, v)| (u, v, 1.0)),
    )
}

pub fn path_graph(n: usize) -> Result<Graph> {
    Graph::new(n, (1..n).map(|v| (v - 1, v, 1.0)))
}

pub fn cycle_graph(n: usize) -> Result<Graph> {
    if n < 3 {
        return Err(Error::InvalidArgument("cycle needs n >= 3".into()));
    }
    Graph::new(n, (0..n).map(|u| (u, (u + 1) % n, 1.0)))
}

/// Star with center 0 and `leaves` unit spokes.
pub fn star_graph(leaves: usize) -> Result<Graph> {
    Graph::new(leaves + 1, (1..=leaves).map(|v| (0, v, 1.0)))
}

/// `d`-dimensional hypercube `Q_d`.
pub fn hypercube_graph(d: u32) -> Result<Graph> {
    let n = 1usize << d;
    Graph::new(
        n,
        (0..n).flat_map(|u| {
            (0..d)
                .map(move |b| (u, u ^ (1 << b)))
                .filter(|&(u, v)| u < v)
                .map(|(u, v)| (u, v, 1.0))
        }),
    )
}

/// `K_{a,b}` with sides `0..a` and `a..a+b`.
pub fn complete_bipartite_graph(a: usize, b: usize) -> Result<Graph> {
    Graph::new(
        a + b,
        (0..a).flat_map(|u| (a..a + b).map(move |v| (u, v, 1.0))),
    )
}

/// Two unit-weight `k`-cliques on `0..k` and `k..2k` joined by the listed
/// crossing edges `(i, j)` meaning `i ↔ k + j`.
pub fn two_cliques(k: usize, crossing: &[(usize, usize)]) -> Result<Graph> {
    let clique = move |off: usize| {
        (0..k).flat_map(move |u| (u + 1..k).map(move |v| (off + u, off + v, 1.0)))
    };
    Graph::new(
        2 * k,
        clique(0)
            .chain(clique(k))
            .chain(crossing.iter().map(|&(i, j)| (i, k + j, 1.0))),
    )
}
