//! Grid simplices, their edge sets, weight functions and cuts.
//!
//! A point of the grid simplex with `k` coordinates and resolution `n` is stored
//! as integer numerators summing to `n`. Points are enumerated in lexicographic
//! order of their numerators; edges join points that differ by moving one unit
//! from one coordinate to another.
//!
//! Cluster labels are 0-based in memory: terminal `i` carries label `i`, and
//! the extra cluster of a non-opposite cut is label `k`.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::rational::{lcm_of_denominators, Q};

/// Upper limit on `k`; supports are kept as 64-bit masks.
pub const MAX_K: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GridPoint {
    coords: Vec<u32>,
}

impl GridPoint {
    pub fn new(coords: Vec<u32>) -> Result<Self> {
        if coords.len() < 2 || coords.len() > MAX_K {
            return Err(Error::InvalidGrid(format!("point {coords:?} needs 2..={MAX_K} coordinates")));
        }
        if coords.iter().all(|&c| c == 0) {
            return Err(Error::InvalidGrid(format!("point {coords:?} has empty support")));
        }
        Ok(Self { coords })
    }

    pub fn terminal(k: usize, n: u32, i: usize) -> Self {
        let mut coords = vec![0; k];
        coords[i] = n;
        Self { coords }
    }

    pub fn coords(&self) -> &[u32] {
        &self.coords
    }

    pub fn k(&self) -> usize {
        self.coords.len()
    }

    pub fn n(&self) -> u32 {
        self.coords.iter().sum()
    }

    pub fn support_mask(&self) -> u64 {
        support_mask(&self.coords)
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.k()).filter(|&i| self.coords[i] > 0).collect()
    }

    pub fn in_support(&self, i: usize) -> bool {
        self.coords.get(i).is_some_and(|&c| c > 0)
    }

    pub fn terminal_index(&self) -> Option<usize> {
        let n = self.n();
        self.coords.iter().position(|&c| c == n)
    }
}

impl fmt::Display for GridPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.coords)
    }
}

pub(crate) fn support_mask(coords: &[u32]) -> u64 {
    coords
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .fold(0, |m, (i, _)| m | (1 << i))
}

/// An edge of the grid graph, endpoints in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    u: GridPoint,
    v: GridPoint,
}

impl Edge {
    pub fn new(a: GridPoint, b: GridPoint) -> Result<Self> {
        if transfer(&a, &b).is_none() {
            return Err(Error::InvalidEdge(format!("{a} and {b} are not adjacent grid points")));
        }
        Ok(if a < b { Self { u: a, v: b } } else { Self { u: b, v: a } })
    }

    pub fn u(&self) -> &GridPoint {
        &self.u
    }

    pub fn v(&self) -> &GridPoint {
        &self.v
    }

    pub fn support_union(&self) -> u64 {
        self.u.support_mask() | self.v.support_mask()
    }
}

/// For adjacent points, the pair `(i, j)` with `b = a - e_i + e_j`.
pub(crate) fn transfer(a: &GridPoint, b: &GridPoint) -> Option<(usize, usize)> {
    if a.k() != b.k() || a.n() != b.n() {
        return None;
    }
    let mut minus = None;
    let mut plus = None;
    for (i, (&x, &y)) in a.coords.iter().zip(&b.coords).enumerate() {
        match i64::from(y) - i64::from(x) {
            0 => {}
            -1 if minus.is_none() => minus = Some(i),
            1 if plus.is_none() => plus = Some(i),
            _ => return None,
        }
    }
    Some((minus?, plus?))
}

fn check_params(k: usize, n: u32) -> Result<()> {
    if !(2..=MAX_K).contains(&k) {
        return Err(Error::InvalidGrid(format!("k must be in 2..={MAX_K}, got {k}")));
    }
    if n < 1 {
        return Err(Error::InvalidGrid("n must be at least 1".into()));
    }
    Ok(())
}

/// All points of the grid simplex in lexicographic order.
pub fn enumerate_points(k: usize, n: u32) -> Result<Vec<GridPoint>> {
    check_params(k, n)?;
    let mut out = Vec::new();
    let mut cur = vec![0u32; k];
    fill_compositions(&mut cur, 0, n, &mut out);
    Ok(out)
}

fn fill_compositions(cur: &mut [u32], pos: usize, left: u32, out: &mut Vec<GridPoint>) {
    if pos + 1 == cur.len() {
        cur[pos] = left;
        out.push(GridPoint { coords: cur.to_vec() });
        return;
    }
    for c in 0..=left {
        cur[pos] = c;
        fill_compositions(cur, pos + 1, left - c, out);
    }
}

/// All edges of the grid graph in canonical order.
pub fn enumerate_edges(k: usize, n: u32) -> Result<Vec<Edge>> {
    let grid = Grid::new(k, n)?;
    Ok((0..grid.num_edges()).map(|e| grid.edge(e)).collect())
}

/// Materialized grid: points, edges and index lookups.
#[derive(Debug)]
pub struct Grid {
    k: usize,
    n: u32,
    points: Vec<GridPoint>,
    index: HashMap<Vec<u32>, usize>,
    edges: Vec<(usize, usize)>,
    edge_index: HashMap<(usize, usize), usize>,
    terminals: Vec<usize>,
}

impl Grid {
    pub fn new(k: usize, n: u32) -> Result<Arc<Self>> {
        let points = enumerate_points(k, n)?;
        let index: HashMap<Vec<u32>, usize> = points
            .iter()
            .enumerate()
            .map(|(i, p)| (p.coords.clone(), i))
            .collect();
        let mut edges = Vec::new();
        let mut buf = vec![0u32; k];
        for (a, p) in points.iter().enumerate() {
            for i in 0..k {
                if p.coords[i] == 0 {
                    continue;
                }
                for j in 0..k {
                    if i == j {
                        continue;
                    }
                    buf.copy_from_slice(&p.coords);
                    buf[i] -= 1;
                    buf[j] += 1;
                    let b = index[&buf];
                    // Lexicographic point order equals index order.
                    if b > a {
                        edges.push((a, b));
                    }
                }
            }
        }
        edges.sort_unstable();
        let edge_index = edges.iter().enumerate().map(|(e, &p)| (p, e)).collect();
        let terminals = (0..k)
            .map(|i| index[GridPoint::terminal(k, n, i).coords()])
            .collect();
        Ok(Arc::new(Self { k, n, points, index, edges, edge_index, terminals }))
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn points(&self) -> &[GridPoint] {
        &self.points
    }

    pub fn point(&self, idx: usize) -> &GridPoint {
        &self.points[idx]
    }

    pub fn num_points(&self) -> usize {
        self.points.len()
    }

    pub fn point_index(&self, coords: &[u32]) -> Option<usize> {
        self.index.get(coords).copied()
    }

    pub fn edge_pairs(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edge(&self, e: usize) -> Edge {
        let (a, b) = self.edges[e];
        Edge { u: self.points[a].clone(), v: self.points[b].clone() }
    }

    pub fn edge_between(&self, a: usize, b: usize) -> Option<usize> {
        let key = if a < b { (a, b) } else { (b, a) };
        self.edge_index.get(&key).copied()
    }

    pub fn edge_index_of(&self, edge: &Edge) -> Option<usize> {
        let a = self.point_index(edge.u.coords())?;
        let b = self.point_index(edge.v.coords())?;
        self.edge_between(a, b)
    }

    pub fn terminal(&self, i: usize) -> usize {
        self.terminals[i]
    }

    pub fn edge_support_union(&self, e: usize) -> u64 {
        let (a, b) = self.edges[e];
        self.points[a].support_mask() | self.points[b].support_mask()
    }

    /// Coordinates that change along edge `e`, and the remaining (constant) ones.
    pub fn edge_transfer(&self, e: usize) -> (usize, usize) {
        let (a, b) = self.edges[e];
        transfer(&self.points[a], &self.points[b]).expect("grid edges are unit transfers")
    }

    /// Adjacency lists: `(neighbor, edge)` per point.
    pub fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.points.len()];
        for (e, &(a, b)) in self.edges.iter().enumerate() {
            adj[a].push((b, e));
            adj[b].push((a, e));
        }
        adj
    }

    pub fn same_shape(&self, other: &Grid) -> bool {
        self.k == other.k && self.n == other.n
    }

    fn check_same(&self, other: &Grid) -> Result<()> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(Error::Mismatch(self.k, self.n as usize, other.k, other.n as usize))
        }
    }
}

/// Exact nonnegative weights on the grid edges.
///
/// Stored as integer numerators over one common denominator so that cut costs
/// are plain integer sums.
#[derive(Clone, Debug)]
pub struct WeightFunction {
    grid: Arc<Grid>,
    numerators: Vec<BigInt>,
    denom: BigInt,
}

impl PartialEq for WeightFunction {
    fn eq(&self, other: &Self) -> bool {
        self.grid.same_shape(&other.grid) && self.weights() == other.weights()
    }
}

impl WeightFunction {
    pub fn zero(grid: Arc<Grid>) -> Self {
        let m = grid.num_edges();
        Self { grid, numerators: vec![BigInt::zero(); m], denom: BigInt::one() }
    }

    /// Weights indexed like `grid.edge_pairs()`.
    pub fn from_dense(grid: Arc<Grid>, weights: Vec<Q>) -> Result<Self> {
        if weights.len() != grid.num_edges() {
            return Err(Error::InvalidArgument(format!(
                "expected {} weights, got {}",
                grid.num_edges(),
                weights.len()
            )));
        }
        if let Some(e) = weights.iter().position(|w| w.is_negative()) {
            return Err(Error::InvalidArgument(format!("negative weight on edge {:?}", grid.edge(e))));
        }
        let denom = lcm_of_denominators(&weights);
        let numerators = weights
            .iter()
            .map(|w| w.numer() * (&denom / w.denom()))
            .collect();
        Ok(Self { grid, numerators, denom })
    }

    pub fn from_edges(grid: Arc<Grid>, entries: impl IntoIterator<Item = (Edge, Q)>) -> Result<Self> {
        let mut dense = vec![Q::zero(); grid.num_edges()];
        for (edge, w) in entries {
            let e = grid
                .edge_index_of(&edge)
                .ok_or_else(|| Error::InvalidEdge(format!("{edge:?} not in E_({}, {})", grid.k, grid.n)))?;
            dense[e] = w;
        }
        Self::from_dense(grid, dense)
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn k(&self) -> usize {
        self.grid.k
    }

    pub fn n(&self) -> u32 {
        self.grid.n
    }

    pub fn weight(&self, e: usize) -> Q {
        Q::new(self.numerators[e].clone(), self.denom.clone())
    }

    pub fn weight_of(&self, edge: &Edge) -> Result<Q> {
        let e = self
            .grid
            .edge_index_of(edge)
            .ok_or_else(|| Error::InvalidEdge(format!("{edge:?}")))?;
        Ok(self.weight(e))
    }

    pub fn weights(&self) -> Vec<Q> {
        (0..self.numerators.len()).map(|e| self.weight(e)).collect()
    }

    pub fn is_zero_at(&self, e: usize) -> bool {
        self.numerators[e].is_zero()
    }

    /// Common denominator and per-edge numerators.
    pub fn scaled(&self) -> (&[BigInt], &BigInt) {
        (&self.numerators, &self.denom)
    }

    /// Same as [`scaled`](Self::scaled) when every numerator fits in `i128`.
    pub fn scaled_i128(&self) -> Option<Vec<i128>> {
        self.numerators.iter().map(|v| v.to_i128()).collect()
    }

    pub fn total(&self) -> Q {
        let s: BigInt = self.numerators.iter().sum();
        Q::new(s, self.denom.clone())
    }

    pub fn with_weight(&self, e: usize, w: Q) -> Result<Self> {
        let mut dense = self.weights();
        dense[e] = w;
        Self::from_dense(self.grid.clone(), dense)
    }

    /// `Σ coeff_t · w_t` over weight functions on the same grid.
    pub fn combine(terms: &[(Q, &WeightFunction)]) -> Result<Self> {
        let (_, first) = terms
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty combination".into()))?;
        let grid = first.grid.clone();
        let mut dense = vec![Q::zero(); grid.num_edges()];
        for (c, w) in terms {
            grid.check_same(&w.grid)?;
            if c.is_negative() {
                return Err(Error::InvalidArgument("negative coefficient".into()));
            }
            for (e, slot) in dense.iter_mut().enumerate() {
                if !w.numerators[e].is_zero() {
                    *slot += c * w.weight(e);
                }
            }
        }
        Self::from_dense(grid, dense)
    }

    pub fn lpc(&self) -> Q {
        self.total() / Q::from_integer(BigInt::from(self.grid.n))
    }
}

/// Canonical LP value: `(1/n) Σ w(e)`.
pub fn lpc(w: &WeightFunction) -> Q {
    w.lpc()
}

/// Total weight of edges whose endpoints carry different labels.
pub fn cost(p: &Cut, w: &WeightFunction) -> Result<Q> {
    p.cost(w)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CutFamily {
    /// Labels in `0..k`.
    KWay,
    /// Labels in `supp(x) ∪ {k}`.
    NonOpposite,
}

impl CutFamily {
    pub fn as_str(self) -> &'static str {
        match self {
            CutFamily::KWay => "kway",
            CutFamily::NonOpposite => "nonopposite",
        }
    }
}

/// A labeling of every grid point with terminals pinned to their own cluster.
#[derive(Clone, Debug)]
pub struct Cut {
    grid: Arc<Grid>,
    family: CutFamily,
    labels: Vec<usize>,
}

impl PartialEq for Cut {
    fn eq(&self, other: &Self) -> bool {
        self.grid.same_shape(&other.grid) && self.family == other.family && self.labels == other.labels
    }
}

impl Eq for Cut {}

impl Cut {
    pub fn new(grid: Arc<Grid>, family: CutFamily, labels: Vec<usize>) -> Result<Self> {
        if labels.len() != grid.num_points() {
            return Err(Error::InvalidCut(format!(
                "expected {} labels, got {}",
                grid.num_points(),
                labels.len()
            )));
        }
        let k = grid.k;
        for i in 0..k {
            if labels[grid.terminal(i)] != i {
                return Err(Error::InvalidCut(format!("terminal {} not labeled {}", i + 1, i + 1)));
            }
        }
        for (idx, &l) in labels.iter().enumerate() {
            let ok = match family {
                CutFamily::KWay => l < k,
                CutFamily::NonOpposite => l == k || grid.points[idx].in_support(l),
            };
            if !ok {
                return Err(Error::InvalidCut(format!(
                    "label {} not allowed at {} in a {} cut",
                    l + 1,
                    grid.points[idx],
                    family.as_str()
                )));
            }
        }
        Ok(Self { grid, family, labels })
    }

    /// Each point goes to its largest coordinate, ties to the lowest index.
    pub fn argmax(grid: Arc<Grid>) -> Self {
        let labels = grid
            .points
            .iter()
            .map(|p| {
                let max = *p.coords.iter().max().expect("k >= 2");
                p.coords.iter().position(|&c| c == max).expect("max exists")
            })
            .collect();
        Self { grid, family: CutFamily::KWay, labels }
    }

    /// Uniform label in `0..k` for every non-terminal point.
    pub fn random_kway<R: Rng + ?Sized>(grid: Arc<Grid>, rng: &mut R) -> Self {
        let k = grid.k;
        let labels = grid
            .points
            .iter()
            .map(|p| p.terminal_index().unwrap_or_else(|| rng.gen_range(0..k)))
            .collect();
        Self { grid, family: CutFamily::KWay, labels }
    }

    /// Uniform label in `supp(x) ∪ {k}` for every non-terminal point.
    pub fn random_nonopposite<R: Rng + ?Sized>(grid: Arc<Grid>, rng: &mut R) -> Self {
        let k = grid.k;
        let labels = grid
            .points
            .iter()
            .map(|p| match p.terminal_index() {
                Some(i) => i,
                None => {
                    let supp = p.support();
                    let pick = rng.gen_range(0..=supp.len());
                    supp.get(pick).copied().unwrap_or(k)
                }
            })
            .collect();
        Self { grid, family: CutFamily::NonOpposite, labels }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn k(&self) -> usize {
        self.grid.k
    }

    pub fn n(&self) -> u32 {
        self.grid.n
    }

    pub fn family(&self) -> CutFamily {
        self.family
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label(&self, idx: usize) -> usize {
        self.labels[idx]
    }

    pub fn label_of(&self, p: &GridPoint) -> Option<usize> {
        self.grid.point_index(p.coords()).map(|i| self.labels[i])
    }

    pub fn is_cut(&self, e: usize) -> bool {
        let (a, b) = self.grid.edges[e];
        self.labels[a] != self.labels[b]
    }

    pub fn cut_edges(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.grid.num_edges()).filter(|&e| self.is_cut(e))
    }

    /// Whether every label lies in the point's support or is the extra cluster.
    pub fn is_nonopposite(&self) -> bool {
        let k = self.grid.k;
        self.labels
            .iter()
            .zip(&self.grid.points)
            .all(|(&l, p)| l == k || p.in_support(l))
    }

    pub fn cost(&self, w: &WeightFunction) -> Result<Q> {
        self.grid.check_same(&w.grid)?;
        let s: BigInt = self.cut_edges().map(|e| &w.numerators[e]).sum();
        Ok(Q::new(s, w.denom.clone()))
    }
}

/// `C(n, r)` as u64.
pub fn binomial(n: u64, r: u64) -> u64 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    (0..r).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Greatest common divisor helper for tests and reports.
pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn brute_edge_count(k: usize, n: u32) -> usize {
        let pts = enumerate_points(k, n).unwrap();
        let mut count = 0;
        for a in 0..pts.len() {
            for b in a + 1..pts.len() {
                let l1: u32 = pts[a]
                    .coords()
                    .iter()
                    .zip(pts[b].coords())
                    .map(|(x, y)| x.abs_diff(*y))
                    .sum();
                if l1 == 2 {
                    count += 1;
                }
            }
        }
        count
    }

    #[test]
    fn point_counts() {
        assert_eq!(enumerate_points(3, 1).unwrap().len(), 3);
        assert_eq!(enumerate_points(3, 2).unwrap().len(), 6);
        assert_eq!(enumerate_points(4, 3).unwrap().len(), 20);
        for k in 2..6 {
            for n in 1..7 {
                let expect = binomial(n as u64 + k as u64 - 1, k as u64 - 1) as usize;
                assert_eq!(enumerate_points(k, n).unwrap().len(), expect);
            }
        }
    }

    #[test]
    fn points_are_lexicographic() {
        let pts = enumerate_points(4, 3).unwrap();
        assert!(pts.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(pts[0].coords(), &[0, 0, 0, 3]);
    }

    #[test]
    fn rejects_bad_params() {
        assert!(enumerate_points(1, 3).is_err());
        assert!(enumerate_points(3, 0).is_err());
        assert!(enumerate_edges(1, 2).is_err());
    }

    #[test]
    fn edge_counts() {
        assert_eq!(enumerate_edges(3, 1).unwrap().len(), 3);
        assert_eq!(enumerate_edges(3, 2).unwrap().len(), 9);
        assert_eq!(brute_edge_count(3, 2), 9);
        assert_eq!(enumerate_edges(3, 6).unwrap().len(), 63);
        assert_eq!(brute_edge_count(3, 6), 63);
        for k in 2..6 {
            for n in 1..5 {
                assert_eq!(enumerate_edges(k, n).unwrap().len(), brute_edge_count(k, n));
            }
        }
        for n in 1..12u32 {
            assert_eq!(enumerate_edges(3, n).unwrap().len() as u32, 3 * n * (n + 1) / 2);
        }
    }

    #[test]
    fn edges_are_canonical() {
        let edges = enumerate_edges(4, 3).unwrap();
        assert!(edges.windows(2).all(|w| w[0] < w[1]));
        for e in &edges {
            assert!(e.u() < e.v());
            assert!(transfer(e.u(), e.v()).is_some());
        }
    }

    #[test]
    fn edge_constructor_validates() {
        let a = GridPoint::new(vec![2, 0, 0]).unwrap();
        let b = GridPoint::new(vec![1, 1, 0]).unwrap();
        let c = GridPoint::new(vec![0, 2, 0]).unwrap();
        let e = Edge::new(b.clone(), a.clone()).unwrap();
        assert_eq!(e.u(), &b);
        assert!(Edge::new(a.clone(), c).is_err());
        assert!(Edge::new(a.clone(), a).is_err());
    }

    #[test]
    fn lpc_and_cost_on_zero_weights() {
        let grid = Grid::new(3, 4).unwrap();
        let w = WeightFunction::zero(grid.clone());
        assert_eq!(lpc(&w), qi(0));
        let cut = Cut::argmax(grid);
        assert_eq!(cost(&cut, &w).unwrap(), qi(0));
    }

    #[test]
    fn cost_rejects_mismatch() {
        let w = WeightFunction::zero(Grid::new(3, 4).unwrap());
        let cut = Cut::argmax(Grid::new(3, 3).unwrap());
        assert!(matches!(cost(&cut, &w), Err(Error::Mismatch(..))));
    }

    #[test]
    fn cut_validation() {
        let grid = Grid::new(3, 2).unwrap();
        let mut labels = Cut::argmax(grid.clone()).labels().to_vec();
        labels[grid.terminal(0)] = 1;
        assert!(Cut::new(grid.clone(), CutFamily::KWay, labels).is_err());
        // (1,1,0) labeled 3 is opposite.
        let mut labels = Cut::argmax(grid.clone()).labels().to_vec();
        let mid = grid.point_index(&[1, 1, 0]).unwrap();
        labels[mid] = 2;
        assert!(Cut::new(grid.clone(), CutFamily::KWay, labels.clone()).is_ok());
        assert!(Cut::new(grid.clone(), CutFamily::NonOpposite, labels.clone()).is_err());
        labels[mid] = 3;
        assert!(Cut::new(grid.clone(), CutFamily::KWay, labels.clone()).is_err());
        assert!(Cut::new(grid, CutFamily::NonOpposite, labels).is_ok());
    }

    #[test]
    fn random_cuts_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let grid = Grid::new(4, 3).unwrap();
        for _ in 0..50 {
            let c = Cut::random_kway(grid.clone(), &mut rng);
            Cut::new(grid.clone(), CutFamily::KWay, c.labels().to_vec()).unwrap();
            let c = Cut::random_nonopposite(grid.clone(), &mut rng);
            Cut::new(grid.clone(), CutFamily::NonOpposite, c.labels().to_vec()).unwrap();
        }
    }

    #[test]
    fn distinct_points_are_at_least_one_step_apart() {
        let pts = enumerate_points(4, 3).unwrap();
        for a in &pts {
            for b in &pts {
                if a != b {
                    let l1: u32 = a.coords().iter().zip(b.coords()).map(|(x, y)| x.abs_diff(*y)).sum();
                    assert!(l1 >= 2);
                }
            }
        }
    }

    fn arb_weights(k: usize, n: u32) -> impl Strategy<Value = WeightFunction> {
        let m = Grid::new(k, n).unwrap().num_edges();
        prop::collection::vec((0i64..20, 1i64..7), m).prop_map(move |v| {
            let grid = Grid::new(k, n).unwrap();
            WeightFunction::from_dense(grid, v.into_iter().map(|(a, b)| q(a, b)).collect()).unwrap()
        })
    }

    proptest! {
        #[test]
        fn lpc_is_linear(w1 in arb_weights(3, 3), w2 in arb_weights(3, 3), a in 0i64..5, b in 1i64..5) {
            let (ca, cb) = (q(a, 3), q(b, 2));
            let mix = WeightFunction::combine(&[(ca.clone(), &w1), (cb.clone(), &w2)]).unwrap();
            prop_assert_eq!(lpc(&mix), ca * lpc(&w1) + cb * lpc(&w2));
        }

        #[test]
        fn cost_is_linear_and_monotone(w1 in arb_weights(3, 3), w2 in arb_weights(3, 3), seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let cut = Cut::random_kway(w1.grid().clone(), &mut rng);
            let sum = WeightFunction::combine(&[(qi(1), &w1), (qi(1), &w2)]).unwrap();
            let c1 = cut.cost(&w1).unwrap();
            let c2 = cut.cost(&w2).unwrap();
            let cs = cut.cost(&sum).unwrap();
            prop_assert_eq!(&cs, &(&c1 + &c2));
            prop_assert!(cs >= c1);
        }

        #[test]
        fn edge_endpoints_differ_in_two_coordinates(k in 2usize..6, n in 1u32..5) {
            for e in enumerate_edges(k, n).unwrap() {
                let diff = e.u().coords().iter().zip(e.v().coords()).filter(|(x, y)| x != y).count();
                prop_assert_eq!(diff, 2);
                let su = e.u().support_mask().count_ones();
                prop_assert!(e.support_union().count_ones() <= su + 1);
            }
        }
    }
}
