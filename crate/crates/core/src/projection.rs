//! Restricting k-way cuts to 3-faces and through injections, boundary label
//! statistics, and exact checks of the resulting probability and cost bounds.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_traits::{One, Zero};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{q, qi, serde_q, Q};
use crate::simplex::{Cut, CutFamily, Grid, WeightFunction};
use crate::weights::{build_w_hat, build_w_prime, build_w_tilde};

/// Exhaustive triple enumeration up to this many terminals; sampled beyond.
pub const EXHAUSTIVE_MAX_K: usize = 12;
const SAMPLED_TRIPLES: usize = 4000;
const SAMPLE_SEED: u64 = 0x5eed_7219;

#[derive(Clone, Debug)]
pub struct RestrictionResult {
    /// Labels on Δ_{3,n} before the fix-up, in `0..4` (3 is the extra cluster).
    pub raw: Vec<usize>,
    pub fixed: Cut,
    /// Two-coordinate points whose raw label is the opposite terminal.
    pub bad_points: Vec<usize>,
}

/// Point of Δ_{k,n} with `x` placed on the coordinates `face`.
fn embed(x: &[u32], face: &[usize], k: usize) -> Vec<u32> {
    let mut y = vec![0; k];
    for (&c, &i) in x.iter().zip(face) {
        y[i] = c;
    }
    y
}

fn check_triple(k: usize, t: [usize; 3]) -> Result<()> {
    if t.iter().any(|&i| i >= k) {
        return Err(Error::InvalidArgument(format!("triple {t:?} out of range for k = {k}")));
    }
    if t[0] == t[1] || t[0] == t[2] || t[1] == t[2] {
        return Err(Error::InvalidArgument(format!("triple {t:?} has repeated indices")));
    }
    Ok(())
}

/// The cut induced by `p` on the face spanned by terminals `triple` (0-based).
pub fn restrict_triple(p: &Cut, triple: [usize; 3]) -> Result<RestrictionResult> {
    check_triple(p.k(), triple)?;
    let grid = p.grid();
    let tri = Grid::new(3, p.n())?;
    let mut raw = Vec::with_capacity(tri.num_points());
    let mut bad_points = Vec::new();
    for (v, x) in tri.points().iter().enumerate() {
        let y = grid.point_index(&embed(x.coords(), &triple, p.k())).expect("embedded point is on the grid");
        let label = triple.iter().position(|&i| i == p.label(y)).unwrap_or(3);
        if label < 3 && !x.in_support(label) && x.support().len() == 2 {
            bad_points.push(v);
        }
        raw.push(label);
    }
    let mut labels = raw.clone();
    for &v in &bad_points {
        labels[v] = 3;
    }
    let fixed = Cut::new(tri, CutFamily::NonOpposite, labels)?;
    Ok(RestrictionResult { raw, fixed, bad_points })
}

fn check_injection(big_k: usize, k: usize, f: &[usize]) -> Result<()> {
    if f.len() != k {
        return Err(Error::InvalidArgument(format!("injection has {} entries, expected {k}", f.len())));
    }
    let distinct: BTreeSet<_> = f.iter().collect();
    if distinct.len() != k || f.iter().any(|&i| i >= big_k) {
        return Err(Error::InvalidArgument(format!("{f:?} is not an injection into 0..{big_k}")));
    }
    Ok(())
}

/// Pulls a K-way cut back to a non-opposite cut of Δ_{k,n} through `f: [k] → [K]`.
///
/// A point keeps the preimage of its label when that label lies on its
/// support; otherwise it goes to the extra cluster `k`.
pub fn restrict_injection(p: &Cut, k: usize, f: &[usize]) -> Result<Cut> {
    check_injection(p.k(), k, f)?;
    let grid = p.grid();
    let small = Grid::new(k, p.n())?;
    let labels = small
        .points()
        .iter()
        .map(|x| {
            let y = grid.point_index(&embed(x.coords(), f, p.k())).expect("embedded point is on the grid");
            let label = p.label(y);
            match f.iter().position(|&i| i == label) {
                Some(j) if x.in_support(j) => j,
                _ => k,
            }
        })
        .collect();
    Cut::new(small, CutFamily::NonOpposite, labels)
}

/// Points of Δ_{k,n} whose image is labeled by `f` of a coordinate off their support.
pub fn injection_bad_points(p: &Cut, k: usize, f: &[usize]) -> Result<Vec<usize>> {
    check_injection(p.k(), k, f)?;
    let grid = p.grid();
    let small = Grid::new(k, p.n())?;
    Ok(small
        .points()
        .iter()
        .enumerate()
        .filter(|(_, x)| {
            let y = grid.point_index(&embed(x.coords(), f, p.k())).expect("embedded point is on the grid");
            let label = p.label(y);
            f.iter().position(|&i| i == label).is_some_and(|j| !x.in_support(j))
        })
        .map(|(v, _)| v)
        .collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct DProfile {
    /// `((i, j), labels)` for `i < j`, labels 0-based.
    pub per_pair: Vec<((usize, usize), BTreeSet<usize>)>,
    #[serde(with = "serde_q")]
    pub mean: Q,
}

/// Labels used on each boundary line, terminals included, and their mean count.
pub fn d_profile(p: &Cut) -> DProfile {
    let (k, n) = (p.k(), p.n());
    let grid = p.grid();
    let mut per_pair = Vec::new();
    let mut total = 0usize;
    for i in 0..k {
        for j in i + 1..k {
            let set: BTreeSet<usize> = (0..=n)
                .map(|a| {
                    let mut y = vec![0; k];
                    y[i] = a;
                    y[j] = n - a;
                    p.label(grid.point_index(&y).expect("line point is on the grid"))
                })
                .collect();
            total += set.len();
            per_pair.push(((i, j), set));
        }
    }
    let mean = q(total as i64, per_pair.len() as i64);
    DProfile { per_pair, mean }
}

fn clamp0(v: Q) -> Q {
    if v < Q::zero() {
        Q::zero()
    } else {
        v
    }
}

/// `max(0, 1 − 3(D − 2)/(k − 2))`.
pub fn refined_bound(d: &Q, k: usize) -> Q {
    clamp0(qi(1) - qi(3) * (d - qi(2)) / qi(k as i64 - 2))
}

/// `max(0, 1 − 3(n − 1)/(k − 2))`.
pub fn coarse_bound(n: u32, k: usize) -> Q {
    clamp0(qi(1) - q(3 * (n as i64 - 1), k as i64 - 2))
}

#[derive(Clone, Debug, Serialize)]
pub struct ProjectionReport {
    pub k: usize,
    pub n: u32,
    pub triples: usize,
    pub good_triples: usize,
    #[serde(with = "serde_q")]
    pub fraction: Q,
    #[serde(with = "serde_q")]
    pub d: Q,
    #[serde(with = "serde_q")]
    pub refined_bound: Q,
    #[serde(with = "serde_q")]
    pub coarse_bound: Q,
    /// Whether triples were sampled rather than enumerated.
    pub sampled: bool,
    /// Three standard errors of the sampled fraction; zero when exhaustive.
    pub ci3sigma: f64,
    pub holds: bool,
}

fn triples(k: usize) -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    for a in 0..k {
        for b in a + 1..k {
            for c in b + 1..k {
                out.push([a, b, c]);
            }
        }
    }
    out
}

/// Fraction of 3-faces on which `p` restricts to a non-opposite cut, against
/// the refined and the coarse lower bounds.
pub fn check_projection_bounds(p: &Cut) -> Result<ProjectionReport> {
    let k = p.k();
    if k < 3 {
        return Err(Error::InvalidArgument(format!("projection bounds need k >= 3, got {k}")));
    }
    let sampled = k > EXHAUSTIVE_MAX_K;
    let set = if sampled {
        let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
        let mut out = Vec::with_capacity(SAMPLED_TRIPLES);
        for _ in 0..SAMPLED_TRIPLES {
            let mut t: Vec<usize> = sample(&mut rng, k, 3).into_vec();
            t.sort_unstable();
            out.push([t[0], t[1], t[2]]);
        }
        out
    } else {
        triples(k)
    };
    let mut good = 0;
    for &t in &set {
        if restrict_triple(p, t)?.bad_points.is_empty() {
            good += 1;
        }
    }
    let fraction = q(good as i64, set.len() as i64);
    let d = d_profile(p).mean;
    let refined = refined_bound(&d, k);
    let coarse = coarse_bound(p.n(), k);
    let (ci3sigma, holds) = if sampled {
        let phat = good as f64 / set.len() as f64;
        let ci = 3.0 * (phat * (1.0 - phat) / set.len() as f64).sqrt();
        let bound = crate::rational::to_f64(&refined).max(crate::rational::to_f64(&coarse));
        (ci, phat + ci >= bound)
    } else {
        (0.0, fraction >= refined && fraction >= coarse)
    };
    Ok(ProjectionReport {
        k,
        n: p.n(),
        triples: set.len(),
        good_triples: good,
        fraction,
        d,
        refined_bound: refined,
        coarse_bound: coarse,
        sampled,
        ci3sigma,
        holds,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CostLemmaReport {
    #[serde(with = "serde_q")]
    pub d: Q,
    #[serde(with = "serde_q")]
    pub cost_hat: Q,
    #[serde(with = "serde_q")]
    pub hat_bound: Q,
    #[serde(with = "serde_q")]
    pub hat_coarse_bound: Q,
    #[serde(with = "serde_q")]
    pub cost_prime: Q,
    #[serde(with = "serde_q")]
    pub prime_bound: Q,
    #[serde(with = "serde_q")]
    pub cost_tilde: Q,
    /// Names of violated inequalities with their exact slack.
    pub violations: Vec<(String, String)>,
}

impl CostLemmaReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Caches the three k-terminal weight functions for repeated checks.
pub struct CostLemmaChecker {
    k: usize,
    n: u32,
    hat: WeightFunction,
    prime: WeightFunction,
    tilde: WeightFunction,
}

impl CostLemmaChecker {
    pub fn new(k: usize, n: u32) -> Result<Self> {
        Ok(Self {
            k,
            n,
            hat: build_w_hat(k, n)?,
            prime: build_w_prime(k, n)?,
            tilde: build_w_tilde(k, n)?,
        })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.hat.grid()
    }

    pub fn weights(&self) -> [&WeightFunction; 3] {
        [&self.hat, &self.prime, &self.tilde]
    }

    /// Checks `cost(ŵ) ≥ 1 − (D − 2)/(k − 2)`, `cost(ŵ) ≥ 1 − 3(n − 1)/(k − 2)`,
    /// `cost(w′) ≥ D − 1` and `cost(w̃) ≥ 1` exactly.
    pub fn check(&self, p: &Cut) -> Result<CostLemmaReport> {
        if p.k() != self.k || p.n() != self.n {
            return Err(Error::Mismatch(self.k, self.n as usize, p.k(), p.n() as usize));
        }
        let d = d_profile(p).mean;
        let cost_hat = p.cost(&self.hat)?;
        let cost_prime = p.cost(&self.prime)?;
        let cost_tilde = p.cost(&self.tilde)?;
        let hat_bound = qi(1) - (&d - qi(2)) / qi(self.k as i64 - 2);
        let hat_coarse_bound = coarse_bound(self.n, self.k);
        let prime_bound = &d - qi(1);
        let mut violations = Vec::new();
        let mut need = |name: &str, lhs: &Q, rhs: &Q| {
            if lhs < rhs {
                violations.push((name.to_string(), crate::rational::format_q(&(lhs - rhs))));
            }
        };
        need("hat_refined", &cost_hat, &hat_bound);
        need("hat_coarse", &cost_hat, &hat_coarse_bound);
        need("prime", &cost_prime, &prime_bound);
        need("tilde", &cost_tilde, &Q::one());
        Ok(CostLemmaReport { d, cost_hat, hat_bound, hat_coarse_bound, cost_prime, prime_bound, cost_tilde, violations })
    }
}

pub fn check_cost_lemmas(p: &Cut, n: u32) -> Result<CostLemmaReport> {
    CostLemmaChecker::new(p.k(), n)?.check(p)
}
