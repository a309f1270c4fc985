//! Planar dual of the triangular grid on the 3-simplex and lower-bound certificates.
//!
//! Every unit triangle of the grid is a dual node, plus three outer nodes
//! `O_1, O_2, O_3`, where `O_i` sits beyond the side `x_i = 0`. Each primal edge
//! yields exactly one dual edge: between its two triangles, or between its only
//! triangle and the outer node of the side it lies on. There are no edges among
//! the outer nodes.
//!
//! A ball cut contains three edge-disjoint dual paths from one triangle to the
//! three outer nodes; a 3-corner (2-corner) cut contains three (two) edge-disjoint
//! paths among the outer nodes. Shortest-path distances therefore bound the
//! cost of every cut in each family from below.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::ops::Add;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::instance_digest;
use crate::rational::{q, qi, Q};
use crate::simplex::{Grid, WeightFunction};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Up,
    Down,
}

/// A unit triangle of the grid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    pub orientation: Orientation,
    /// Point indices into the grid.
    pub vertices: [usize; 3],
    /// Centroid numerators over `3n`.
    pub centroid: [u32; 3],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DualNode {
    Face { centroid: [u32; 3] },
    Outer(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DualEdge {
    pub a: usize,
    pub b: usize,
    pub primal: usize,
}

/// Weight-free structure of the dual graph.
#[derive(Debug)]
pub struct DualTopology {
    grid: Arc<Grid>,
    faces: Vec<Face>,
    edges: Vec<DualEdge>,
    adj: Vec<Vec<(usize, usize)>>,
}

impl DualTopology {
    pub fn new(n: u32) -> Result<Self> {
        let grid = Grid::new(3, n)?;
        let idx = |c: [u32; 3]| grid.point_index(&c).expect("face vertex on grid");
        let mut faces = Vec::with_capacity((n * n) as usize);
        for a in 0..n {
            for b in 0..n - a {
                let c = n - 1 - a - b;
                faces.push(Face {
                    orientation: Orientation::Up,
                    vertices: [idx([a + 1, b, c]), idx([a, b + 1, c]), idx([a, b, c + 1])],
                    centroid: [3 * a + 1, 3 * b + 1, 3 * c + 1],
                });
            }
        }
        if n >= 2 {
            for a in 0..n - 1 {
                for b in 0..n - 1 - a {
                    let c = n - 2 - a - b;
                    faces.push(Face {
                        orientation: Orientation::Down,
                        vertices: [idx([a, b + 1, c + 1]), idx([a + 1, b, c + 1]), idx([a + 1, b + 1, c])],
                        centroid: [3 * a + 2, 3 * b + 2, 3 * c + 2],
                    });
                }
            }
        }
        faces.sort_by_key(|f| f.centroid);

        let mut owners: Vec<Vec<usize>> = vec![Vec::new(); grid.num_edges()];
        for (f, face) in faces.iter().enumerate() {
            let [p, r, s] = face.vertices;
            for (x, y) in [(p, r), (r, s), (p, s)] {
                let e = grid.edge_between(x, y).expect("triangle sides are grid edges");
                owners[e].push(f);
            }
        }
        let outer = faces.len();
        let mut edges = Vec::with_capacity(grid.num_edges());
        for (e, own) in owners.iter().enumerate() {
            let (a, b) = match own.as_slice() {
                [f, g] => (*f, *g),
                [f] => {
                    let (u, v) = grid.edge_pairs()[e];
                    let (pu, pv) = (grid.point(u).coords(), grid.point(v).coords());
                    let side = (0..3)
                        .find(|&c| pu[c] == 0 && pv[c] == 0)
                        .expect("boundary edge lies on a side");
                    (*f, outer + side)
                }
                _ => unreachable!("each grid edge borders one or two triangles"),
            };
            edges.push(DualEdge { a, b, primal: e });
        }
        let mut adj = vec![Vec::new(); outer + 3];
        for (d, de) in edges.iter().enumerate() {
            adj[de.a].push((de.b, d));
            adj[de.b].push((de.a, d));
        }
        Ok(Self { grid, faces, edges, adj })
    }

    pub fn n(&self) -> u32 {
        self.grid.n()
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn edges(&self) -> &[DualEdge] {
        &self.edges
    }

    pub fn num_nodes(&self) -> usize {
        self.faces.len() + 3
    }

    pub fn outer(&self, i: usize) -> usize {
        self.faces.len() + i
    }

    pub fn node(&self, v: usize) -> DualNode {
        match self.faces.get(v) {
            Some(f) => DualNode::Face { centroid: f.centroid },
            None => DualNode::Outer(v - self.faces.len()),
        }
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.adj[v]
    }

    /// Single-source shortest paths; `weight` maps a primal edge index to its length.
    ///
    /// Outer nodes other than the source are endpoints only: paths never pass
    /// through them, since the path systems being bounded are non-intersecting.
    pub fn shortest_paths<T, F>(&self, source: usize, weight: F) -> ShortestPaths<T>
    where
        T: Clone + Ord + Zero + Add<Output = T>,
        F: Fn(usize) -> T,
    {
        let m = self.num_nodes();
        let mut dist: Vec<Option<T>> = vec![None; m];
        let mut pred = vec![None; m];
        let mut done = vec![false; m];
        let mut heap = BinaryHeap::new();
        dist[source] = Some(T::zero());
        heap.push(Reverse((T::zero(), source)));
        while let Some(Reverse((d, v))) = heap.pop() {
            if done[v] {
                continue;
            }
            done[v] = true;
            if v != source && v >= self.faces.len() {
                continue;
            }
            for &(u, de) in &self.adj[v] {
                if done[u] {
                    continue;
                }
                let cand = d.clone() + weight(self.edges[de].primal);
                if dist[u].as_ref().is_none_or(|cur| cand < *cur) {
                    dist[u] = Some(cand.clone());
                    pred[u] = Some((v, de));
                    heap.push(Reverse((cand, u)));
                }
            }
        }
        ShortestPaths {
            source,
            dist: dist.into_iter().map(|d| d.expect("dual graph is connected")).collect(),
            pred,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ShortestPaths<T> {
    pub source: usize,
    pub dist: Vec<T>,
    pred: Vec<Option<(usize, usize)>>,
}

impl<T> ShortestPaths<T> {
    /// Dual edges of the shortest path from the source to `target`, source first.
    pub fn path_edges(&self, target: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut v = target;
        while let Some((p, de)) = self.pred[v] {
            out.push(de);
            v = p;
        }
        out.reverse();
        out
    }

    pub fn path_nodes(&self, target: usize) -> Vec<usize> {
        let mut out = vec![target];
        let mut v = target;
        while let Some((p, _)) = self.pred[v] {
            out.push(p);
            v = p;
        }
        out.reverse();
        out
    }
}

/// The dual graph together with the weights of the primal edges.
#[derive(Debug)]
pub struct DualGraph {
    topology: DualTopology,
    weights: WeightFunction,
}

pub fn build_dual(n: u32, w: &WeightFunction) -> Result<DualGraph> {
    if w.k() != 3 {
        return Err(Error::InvalidArgument(format!("dual graph needs k = 3, got k = {}", w.k())));
    }
    if w.n() != n {
        return Err(Error::Mismatch(3, n as usize, w.k(), w.n() as usize));
    }
    Ok(DualGraph { topology: DualTopology::new(n)?, weights: w.clone() })
}

impl DualGraph {
    pub fn topology(&self) -> &DualTopology {
        &self.topology
    }

    pub fn weights(&self) -> &WeightFunction {
        &self.weights
    }

    pub fn edge_weight(&self, dual_edge: usize) -> Q {
        self.weights.weight(self.topology.edges[dual_edge].primal)
    }

    /// Exact shortest paths, as numerators over the weights' common denominator.
    pub fn exact_paths(&self, source: usize) -> ShortestPaths<BigInt> {
        let (nums, _) = self.weights.scaled();
        self.topology.shortest_paths(source, |e| nums[e].clone())
    }

    pub fn to_q(&self, scaled: &BigInt) -> Q {
        Q::new(scaled.clone(), self.weights.scaled().1.clone())
    }
}

/// Exact dual distance between two nodes with a witness path of dual edges.
pub fn dual_path(g: &DualGraph, s: usize, t: usize) -> (Q, Vec<usize>) {
    let sp = g.exact_paths(s);
    (g.to_q(&sp.dist[t]), sp.path_edges(t))
}

pub fn dual_distance(g: &DualGraph, s: usize, t: usize) -> Q {
    dual_path(g, s, t).0
}

/// Value of the potential `Φ_i` at a dual node.
///
/// Defined on `O_i` and on every triangle, which is located by its centroid.
pub fn potential(i: usize, node: DualNode, n: u32) -> Result<Q> {
    if i >= 3 {
        return Err(Error::InvalidArgument(format!("potential index {} out of range", i + 1)));
    }
    let centroid = match node {
        DualNode::Outer(j) if j == i => return Ok(Q::zero()),
        DualNode::Outer(j) => {
            return Err(Error::InvalidArgument(format!("Φ_{} is not defined at O_{}", i + 1, j + 1)))
        }
        DualNode::Face { centroid } => centroid,
    };
    let n = i64::from(n);
    let m = centroid.map(i64::from);
    // centroid numerators are never 2n, so corner membership is strict
    match (0..3).find(|&c| m[c] > 2 * n) {
        Some(c) if c == i => Ok(q(2, 3)),
        Some(c) => {
            let other = 3 - i - c;
            Ok(q(n + m[i] - m[other], 6 * n))
        }
        None => {
            let ceil = (2 * m[i] + 2) / 3;
            Ok(q(ceil, 2 * n))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CertFamily {
    NonOpposite,
    ThreeWay,
}

impl CertFamily {
    pub fn as_str(self) -> &'static str {
        match self {
            CertFamily::NonOpposite => "nonopposite",
            CertFamily::ThreeWay => "threeway",
        }
    }
}

impl std::str::FromStr for CertFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nonopposite" => Ok(CertFamily::NonOpposite),
            "threeway" => Ok(CertFamily::ThreeWay),
            _ => Err(Error::InvalidArgument(format!("unknown family {s:?}"))),
        }
    }
}

/// A machine-checkable lower bound on the minimum cut cost of a family.
#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub digest: String,
    pub family: CertFamily,
    /// `d(O_1,O_2)`, `d(O_1,O_3)`, `d(O_2,O_3)`.
    pub pairwise: [Q; 3],
    pub ball: Q,
    /// Vertex coordinates of the witness triangle.
    pub witness_vertices: [[u32; 3]; 3],
    pub corner: Q,
    pub two_corner: Q,
    pub overall: Q,
    pub target: Q,
    pub pass: bool,
}

/// Shortest-path data the certificate is assembled from.
pub struct OuterDistances {
    pub from_outer: [ShortestPaths<BigInt>; 3],
    pub denom: BigInt,
}

pub fn outer_distances(g: &DualGraph) -> OuterDistances {
    let t = g.topology();
    OuterDistances {
        from_outer: [0, 1, 2].map(|i| g.exact_paths(t.outer(i))),
        denom: g.weights().scaled().1.clone(),
    }
}

pub fn certify(n: u32, w: &WeightFunction, family: CertFamily, target: &Q) -> Result<Certificate> {
    let g = build_dual(n, w)?;
    let topo = g.topology();
    let od = outer_distances(&g);
    let to_q = |v: &BigInt| Q::new(v.clone(), od.denom.clone());
    let [d1, d2, d3] = &od.from_outer;
    let pair = [&d1.dist[topo.outer(1)], &d1.dist[topo.outer(2)], &d2.dist[topo.outer(2)]];

    let (witness_face, ball_scaled) = (0..topo.faces().len())
        .map(|f| (f, &d1.dist[f] + &d2.dist[f] + &d3.dist[f]))
        .min_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)))
        .expect("at least one triangle");
    let corner_scaled: BigInt = pair.iter().copied().sum();
    let mut sorted = pair;
    sorted.sort();
    let two_corner_scaled = sorted[0] + sorted[1];

    let ball = to_q(&ball_scaled);
    let corner = to_q(&corner_scaled);
    let two_corner = to_q(&two_corner_scaled);
    let overall = match family {
        CertFamily::NonOpposite => ball.clone().min(corner.clone()),
        CertFamily::ThreeWay => ball.clone().min(two_corner.clone()),
    };
    let grid = topo.grid();
    let witness_vertices = topo.faces()[witness_face].vertices.map(|p| {
        let c = grid.point(p).coords();
        [c[0], c[1], c[2]]
    });
    Ok(Certificate {
        digest: instance_digest(w),
        family,
        pairwise: pair.map(to_q),
        ball,
        witness_vertices,
        corner,
        two_corner,
        pass: overall >= *target,
        overall,
        target: target.clone(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub enum PotentialViolation {
    /// `|Φ_i(a) − Φ_i(b)|` exceeds the weight of the shared edge.
    Lipschitz { i: usize, a: usize, b: usize, difference: Q, weight: Q },
    /// `Φ_i(F) + w` below `1/3` for a triangle `F` next to `O_j`.
    CornerMargin { i: usize, j: usize, face: usize, value: Q },
    /// `Φ_1(F) + Φ_2(F) + Φ_3(F) < 1`.
    BallSum { face: usize, sum: Q },
}

#[derive(Clone, Debug, PartialEq)]
pub struct PotentialReport {
    pub lipschitz_checks: usize,
    pub margin_checks: usize,
    pub sum_checks: usize,
    pub violation: Option<PotentialViolation>,
}

impl PotentialReport {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

/// Checks the three facts the potential argument rests on, stopping at the first failure.
pub fn check_potentials(n: u32, w: &WeightFunction) -> Result<PotentialReport> {
    let g = build_dual(n, w)?;
    let topo = g.topology();
    let faces = topo.faces().len();
    let mut phi = vec![vec![Q::zero(); topo.num_nodes()]; 3];
    for (i, row) in phi.iter_mut().enumerate() {
        for (v, slot) in row.iter_mut().enumerate().take(faces) {
            *slot = potential(i, topo.node(v), n)?;
        }
    }
    let mut report = PotentialReport { lipschitz_checks: 0, margin_checks: 0, sum_checks: 0, violation: None };
    let third = q(1, 3);

    for (i, row) in phi.iter().enumerate() {
        for (d, de) in topo.edges().iter().enumerate() {
            let weight = g.edge_weight(d);
            let outer_b = de.b >= faces;
            if outer_b && de.b != topo.outer(i) {
                let j = de.b - faces;
                report.margin_checks += 1;
                let value = &row[de.a] + &weight;
                if value < third {
                    report.violation = Some(PotentialViolation::CornerMargin { i, j, face: de.a, value });
                    return Ok(report);
                }
                continue;
            }
            report.lipschitz_checks += 1;
            let difference = (&row[de.a] - &row[de.b]).abs();
            if difference > weight {
                report.violation = Some(PotentialViolation::Lipschitz { i, a: de.a, b: de.b, difference, weight });
                return Ok(report);
            }
        }
    }
    let [p1, p2, p3] = [&phi[0], &phi[1], &phi[2]];
    for (f, ((a, b), c)) in p1.iter().zip(p2).zip(p3).take(faces).enumerate() {
        report.sum_checks += 1;
        let sum = a + b + c;
        if sum < qi(1) {
            report.violation = Some(PotentialViolation::BallSum { face: f, sum });
            return Ok(report);
        }
    }
    Ok(report)
}
