//! Row-generation search for low-LP-value weights on Δ_{3,n} whose ball and
//! corner path systems all cost at least one.

use std::cmp::Ordering;
use std::ops::Add;

use minilp::{ComparisonOp, OptimizationDirection, Problem, Solution, Variable};
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::dual::{certify, CertFamily, DualTopology, ShortestPaths};
use crate::error::{Error, Result};
use crate::rational::{qi, serde_q, Q};
use crate::simplex::WeightFunction;

/// Final weights are rounded to this denominator before the exact recheck.
pub const ROUNDING_DENOM: i64 = 1_000_000_000_000;
/// Ball constraints added per iteration, most violated faces first.
pub const FACES_PER_ITERATION: usize = 8;

/// Totally ordered float for Dijkstra on LP iterates.
#[derive(Clone, Copy, Debug, PartialEq)]
struct Len(f64);

impl Eq for Len {}

impl PartialOrd for Len {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Len {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl Add for Len {
    type Output = Len;
    fn add(self, o: Len) -> Len {
        Len(self.0 + o.0)
    }
}

impl Zero for Len {
    fn zero() -> Self {
        Len(0.0)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WitnessKind {
    /// Paths from one triangle to the three outer nodes.
    Ball { face: usize },
    /// Paths between the three pairs of outer nodes.
    Corner,
}

/// `Σ mult(e)·w(e) ≥ 1` over the primal edges of a path system.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PathConstraint {
    pub kind: WitnessKind,
    /// `(primal edge, multiplicity)`, ascending by edge.
    pub terms: Vec<(usize, u32)>,
}

impl PathConstraint {
    fn from_paths(kind: WitnessKind, topo: &DualTopology, paths: &[Vec<usize>]) -> Self {
        let mut terms: Vec<(usize, u32)> = Vec::new();
        let mut primal: Vec<usize> = paths.iter().flatten().map(|&de| topo.edges()[de].primal).collect();
        primal.sort_unstable();
        for e in primal {
            match terms.last_mut() {
                Some((last, m)) if *last == e => *m += 1,
                _ => terms.push((e, 1)),
            }
        }
        Self { kind, terms }
    }

    pub fn value(&self, w: &[f64]) -> f64 {
        self.terms.iter().map(|&(e, m)| f64::from(m) * w[e]).sum()
    }

    pub fn exact_value(&self, w: &WeightFunction) -> Q {
        self.terms.iter().map(|&(e, m)| w.weight(e) * qi(i64::from(m))).sum()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct IterationLog {
    pub iteration: usize,
    pub objective: f64,
    pub ball: f64,
    pub corner: f64,
    pub added: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExactRecheck {
    /// Certified lower bound of the rounded weights before rescaling.
    #[serde(with = "serde_q")]
    pub bound: Q,
    #[serde(with = "serde_q")]
    pub lpc_exact: Q,
    pub certified: bool,
    #[serde(skip)]
    pub weights: WeightFunction,
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchState {
    pub n: u32,
    pub tol: f64,
    pub weights: Vec<f64>,
    pub constraints: Vec<PathConstraint>,
    pub log: Vec<IterationLog>,
    pub converged: bool,
    pub recheck: Option<ExactRecheck>,
}

impl SearchState {
    pub fn iterations(&self) -> usize {
        self.log.len()
    }

    pub fn objective_is_monotone(&self) -> bool {
        self.log.windows(2).all(|w| w[1].objective >= w[0].objective - 1e-9)
    }
}

struct Separation {
    ball: f64,
    corner: f64,
    violated: Vec<PathConstraint>,
}

fn separate(topo: &DualTopology, w: &[f64], tol: f64) -> Separation {
    let sp: Vec<ShortestPaths<Len>> =
        (0..3).map(|i| topo.shortest_paths(topo.outer(i), |e| Len(w[e].max(0.0)))).collect();
    let faces = topo.faces().len();
    let mut sums: Vec<(f64, usize)> = (0..faces)
        .map(|f| (sp.iter().map(|s| s.dist[f].0).sum::<f64>(), f))
        .collect();
    sums.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let ball = sums[0].0;
    let (o2, o3) = (topo.outer(1), topo.outer(2));
    let corner = sp[0].dist[o2].0 + sp[0].dist[o3].0 + sp[1].dist[o3].0;
    let mut violated = Vec::new();
    for &(value, f) in sums.iter().take(FACES_PER_ITERATION) {
        if value >= 1.0 - tol {
            break;
        }
        let paths: Vec<Vec<usize>> = sp.iter().map(|s| s.path_edges(f)).collect();
        violated.push(PathConstraint::from_paths(WitnessKind::Ball { face: f }, topo, &paths));
    }
    if corner < 1.0 - tol {
        let paths = vec![sp[0].path_edges(o2), sp[0].path_edges(o3), sp[1].path_edges(o3)];
        violated.push(PathConstraint::from_paths(WitnessKind::Corner, topo, &paths));
    }
    Separation { ball, corner, violated }
}

fn lp_error(e: minilp::Error) -> Error {
    Error::Lp(e.to_string())
}

fn expr(vars: &[Variable], c: &PathConstraint) -> Vec<(Variable, f64)> {
    c.terms.iter().map(|&(e, m)| (vars[e], f64::from(m))).collect()
}

fn master(n: u32, edges: usize) -> (Problem, Vec<Variable>) {
    let mut problem = Problem::new(OptimizationDirection::Minimize);
    let obj = 1.0 / f64::from(n);
    let vars = (0..edges).map(|_| problem.add_var(obj, (0.0, f64::INFINITY))).collect();
    (problem, vars)
}

fn values(sol: &Solution, vars: &[Variable]) -> Vec<f64> {
    vars.iter().map(|&v| *sol.var_value(v)).collect()
}

/// Minimizes `Σ w / n` over `w ≥ 0` subject to the given constraints.
pub fn solve_lp(constraints: &[PathConstraint], n: u32, edges: usize) -> Result<(Vec<f64>, f64)> {
    let (mut problem, vars) = master(n, edges);
    for c in constraints {
        problem.add_constraint(expr(&vars, c), ComparisonOp::Ge, 1.0);
    }
    let sol = problem.solve().map_err(lp_error)?;
    Ok((values(&sol, &vars), sol.objective()))
}

/// Rounds to the fixed denominator, clearing solver noise below zero.
fn round_weights(w: &[f64], topo: &DualTopology) -> Result<WeightFunction> {
    let dense = w
        .iter()
        .map(|&v| {
            let r = crate::rational::round_f64(v.max(0.0), ROUNDING_DENOM);
            if r.is_negative() {
                Q::zero()
            } else {
                r
            }
        })
        .collect();
    WeightFunction::from_dense(topo.grid().clone(), dense)
}

/// Exact recheck: certify the rounded weights, rescale by the bound, and certify again at 1.
pub fn exact_recheck(n: u32, w: &[f64]) -> Result<ExactRecheck> {
    let topo = DualTopology::new(n)?;
    let rounded = round_weights(w, &topo)?;
    let cert = certify(n, &rounded, CertFamily::NonOpposite, &qi(1))?;
    let bound = cert.overall;
    if !bound.is_positive() {
        return Ok(ExactRecheck { lpc_exact: Q::zero(), bound, certified: false, weights: rounded });
    }
    let inv = Q::new(bound.denom().clone(), bound.numer().clone());
    let scaled = WeightFunction::combine(&[(inv, &rounded)])?;
    let check = certify(n, &scaled, CertFamily::NonOpposite, &qi(1))?;
    Ok(ExactRecheck { lpc_exact: scaled.lpc(), bound, certified: check.pass, weights: scaled })
}

/// Cutting-plane loop: solve the master LP, add violated path systems, repeat.
pub fn search(n: u32, tol: f64, max_iter: usize) -> Result<SearchState> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!("n must be at least 3, got {n}")));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let topo = DualTopology::new(n)?;
    let edges = topo.grid().num_edges();
    let (problem, vars) = master(n, edges);
    let mut sol = problem.solve().map_err(lp_error)?;
    let mut state = SearchState {
        n,
        tol,
        weights: values(&sol, &vars),
        constraints: Vec::new(),
        log: Vec::new(),
        converged: false,
        recheck: None,
    };
    for iteration in 0..max_iter {
        let sep = separate(&topo, &state.weights, tol);
        state.log.push(IterationLog {
            iteration,
            objective: sol.objective(),
            ball: sep.ball,
            corner: sep.corner,
            added: sep.violated.len(),
        });
        if sep.violated.is_empty() {
            state.converged = true;
            break;
        }
        for c in sep.violated {
            sol = sol.add_constraint(expr(&vars, &c), ComparisonOp::Ge, 1.0).map_err(lp_error)?;
            state.constraints.push(c);
        }
        state.weights = values(&sol, &vars);
    }
    state.recheck = Some(exact_recheck(n, &state.weights)?);
    Ok(state)
}
