//! The corner/ball mixture over non-opposite cuts of Δ_3 and a Monte Carlo
//! estimate of its maximum separation density on the grid.

use std::cmp::Ordering;
use std::ops::{Mul, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{q, qi, serde_q, Q};
use crate::simplex::Grid;

/// Parameters are drawn from the midpoints of 2^48 equal cells.
pub const CELL_BITS: u32 = 48;
/// Independent RNG streams used by [`estimate_density`], fixed so that the
/// result does not depend on the thread count.
pub const STREAMS: u64 = 64;
/// Cap on consecutive degenerate draws before giving up.
const MAX_RESAMPLES: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Diagonal {
    /// From (2/3, 1/3, 0) to (0, 2/3, 1/3).
    A,
    /// From (2/3, 0, 1/3) to (0, 1/3, 2/3).
    B,
}

impl Diagonal {
    /// Point at parameter `t` along the diagonal.
    pub fn point(self, t: &Q) -> [Q; 3] {
        let first = q(2, 3) * (qi(1) - t);
        let low = t / qi(3);
        let high = q(1, 3) + t / qi(3);
        match self {
            Diagonal::A => [first, high, low],
            Diagonal::B => [first, low, high],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SampledCut {
    /// `x` goes to `i` when `x_i > r`, to the extra cluster otherwise.
    Corner {
        #[serde(with = "serde_q")]
        r: Q,
    },
    /// Three arms from the center `diag(t)`, one ending on each side.
    ///
    /// `side_choice[j]` selects the arm ending on the side `x_j = 0`: `false`
    /// is the arm along `x_a = r_a` for the smaller index `a ≠ j`, `true` the
    /// larger one.
    Ball {
        diag: Diagonal,
        #[serde(with = "serde_q")]
        t: Q,
        side_choice: [bool; 3],
    },
}

/// Midpoint of a uniformly chosen cell of `[0, 1)`.
fn unit_midpoint<R: Rng + ?Sized>(rng: &mut R) -> Q {
    let u: u64 = rng.gen::<u64>() >> (64 - CELL_BITS);
    Q::new(BigInt::from(2 * u + 1), BigInt::one() << (CELL_BITS + 1))
}

/// Draws `true` with probability `p` exactly, for `0 ≤ p ≤ 1` with a 64-bit denominator.
fn bernoulli<R: Rng + ?Sized>(rng: &mut R, p: &Q) -> bool {
    let den = p.denom().to_u64().expect("probability denominator fits in 64 bits");
    let num = p.numer().to_u64().expect("probability numerator fits in 64 bits");
    rng.gen_range(0..den) < num
}

fn check_probability(p: &Q) -> Result<()> {
    if p.is_negative() || *p > qi(1) || p.denom().to_u64().is_none() {
        return Err(Error::InvalidArgument(format!("p_corner must lie in [0, 1] with a 64-bit denominator, got {p}")));
    }
    Ok(())
}

impl SampledCut {
    pub fn sample<R: Rng + ?Sized>(rng: &mut R, p_corner: &Q) -> Result<Self> {
        check_probability(p_corner)?;
        Ok(if bernoulli(rng, p_corner) {
            SampledCut::Corner { r: q(2, 3) + unit_midpoint(rng) / qi(3) }
        } else {
            let diag = if rng.gen::<bool>() { Diagonal::B } else { Diagonal::A };
            let t = unit_midpoint(rng);
            let side_choice = [rng.gen(), rng.gen(), rng.gen()];
            SampledCut::Ball { diag, t, side_choice }
        })
    }

    pub fn is_corner(&self) -> bool {
        matches!(self, SampledCut::Corner { .. })
    }

    /// Label of a point of Δ_3 given by exact barycentric coordinates.
    pub fn evaluate(&self, x: &[Q; 3]) -> Result<usize> {
        check_point(x)?;
        match self {
            SampledCut::Corner { r } => Ok(corner_label(x, r)),
            SampledCut::Ball { diag, t, side_choice } => evaluate_ball_at(&diag.point(t), *side_choice, x),
        }
    }

    /// Labels of every point of Δ_{3,n}, in grid order.
    pub fn labels_on_grid(&self, grid: &Grid) -> Result<Vec<usize>> {
        if grid.k() != 3 {
            return Err(Error::InvalidArgument(format!("rounding lives on k = 3, got {}", grid.k())));
        }
        match self {
            SampledCut::Corner { r } => {
                let n = BigInt::from(grid.n());
                let (num, den) = (r.numer() * &n, r.denom());
                Ok(grid
                    .points()
                    .iter()
                    .map(|x| {
                        let above: Vec<usize> =
                            (0..3).filter(|&i| BigInt::from(x.coords()[i]) * den > num).collect();
                        assert!(above.len() <= 1, "two coordinates above a threshold of at least 2/3");
                        above.first().copied().unwrap_or(3)
                    })
                    .collect())
            }
            SampledCut::Ball { diag, t, side_choice } => {
                let center = diag.point(t);
                let den = center.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
                let scale = &den * BigInt::from(grid.n());
                let cnum: Vec<BigInt> = center.iter().map(|c| c.numer() * (&den / c.denom()) * grid.n()).collect();
                let pts = grid.points().iter().map(|x| {
                    let c = x.coords();
                    [BigInt::from(c[0]) * &den, BigInt::from(c[1]) * &den]
                });
                if scale.bits() < 62 {
                    let conv = |v: &BigInt| v.to_i128().expect("checked range");
                    let geo = BallGeometry::new(conv(&scale), [conv(&cnum[0]), conv(&cnum[1]), conv(&cnum[2])], *side_choice);
                    pts.map(|[a, b]| geo.label([conv(&a), conv(&b)])).collect()
                } else {
                    let geo = BallGeometry::new(scale, [cnum[0].clone(), cnum[1].clone(), cnum[2].clone()], *side_choice);
                    pts.map(|p| geo.label(p)).collect()
                }
            }
        }
    }
}

fn check_point(x: &[Q; 3]) -> Result<()> {
    if x.iter().any(|c| c.is_negative()) || x.iter().sum::<Q>() != qi(1) {
        return Err(Error::InvalidArgument("point is not in the simplex".into()));
    }
    Ok(())
}

fn corner_label(x: &[Q; 3], r: &Q) -> usize {
    let above: Vec<usize> = (0..3).filter(|&i| x[i] > *r).collect();
    assert!(above.len() <= 1, "two coordinates above a threshold of at least 2/3");
    above.first().copied().unwrap_or(3)
}

/// Ball-cut label for an arbitrary interior center.
pub fn evaluate_ball_at(center: &[Q; 3], side_choice: [bool; 3], x: &[Q; 3]) -> Result<usize> {
    check_point(x)?;
    check_point(center)?;
    if center.iter().any(|c| c.is_zero()) {
        return Err(Error::InvalidArgument("ball center must be interior".into()));
    }
    let den = center.iter().chain(x.iter()).fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let scaled = |c: &Q| c.numer() * (&den / c.denom());
    let geo = BallGeometry::new(den.clone(), [scaled(&center[0]), scaled(&center[1]), scaled(&center[2])], side_choice);
    geo.label([scaled(&x[0]), scaled(&x[1])])
}

/// Planar points use the first two barycentric coordinates, scaled to integers.
type P2<T> = [T; 2];

fn orient<T>(a: &P2<T>, b: &P2<T>, c: &P2<T>) -> Ordering
where
    T: Clone + Ord + Zero + Sub<Output = T> + Mul<Output = T>,
{
    let l = (b[0].clone() - a[0].clone()) * (c[1].clone() - a[1].clone());
    let r = (b[1].clone() - a[1].clone()) * (c[0].clone() - a[0].clone());
    l.cmp(&r)
}

fn within<T: Clone + Ord>(a: &P2<T>, b: &P2<T>, p: &P2<T>) -> bool {
    (0..2).all(|i| {
        let (lo, hi) = if a[i] <= b[i] { (&a[i], &b[i]) } else { (&b[i], &a[i]) };
        *lo <= p[i] && p[i] <= *hi
    })
}

/// Whether closed segments `ab` and `cd` share a point.
fn segments_meet<T>(a: &P2<T>, b: &P2<T>, c: &P2<T>, d: &P2<T>) -> bool
where
    T: Clone + Ord + Zero + Sub<Output = T> + Mul<Output = T>,
{
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    if o1 != o2 && o3 != o4 && o1 != Ordering::Equal && o2 != Ordering::Equal && o3 != Ordering::Equal && o4 != Ordering::Equal {
        return true;
    }
    (o1 == Ordering::Equal && within(a, b, c))
        || (o2 == Ordering::Equal && within(a, b, d))
        || (o3 == Ordering::Equal && within(c, d, a))
        || (o4 == Ordering::Equal && within(c, d, b))
}

struct BallGeometry<T> {
    corners: [P2<T>; 3],
    center: P2<T>,
    arm_ends: [P2<T>; 3],
}

impl<T> BallGeometry<T>
where
    T: Clone + Ord + Zero + Sub<Output = T> + Mul<Output = T> + std::fmt::Debug,
{
    /// `scale` is the common denominator; `center` holds numerators summing to it.
    fn new(scale: T, center: [T; 3], side_choice: [bool; 3]) -> Self {
        let z = T::zero();
        let corners = [[scale.clone(), z.clone()], [z.clone(), scale.clone()], [z.clone(), z.clone()]];
        let arm_ends = std::array::from_fn(|j| {
            let others: Vec<usize> = (0..3).filter(|&a| a != j).collect();
            let (line, w) = if side_choice[j] { (others[1], others[0]) } else { (others[0], others[1]) };
            let mut end = [z.clone(), z.clone(), z.clone()];
            end[line] = center[line].clone();
            end[w] = scale.clone() - center[line].clone();
            [end[0].clone(), end[1].clone()]
        });
        Self { corners, center: [center[0].clone(), center[1].clone()], arm_ends }
    }

    /// The corner whose segment to `x` meets no arm; it must be unique.
    fn label(&self, x: P2<T>) -> Result<usize> {
        let mut found = None;
        for (i, corner) in self.corners.iter().enumerate() {
            let clear = self.arm_ends.iter().all(|end| !segments_meet(&x, corner, &self.center, end));
            if clear {
                if found.is_some() {
                    return Err(Error::Degenerate(format!("{x:?} sees two corners")));
                }
                found = Some(i);
            }
        }
        found.ok_or_else(|| Error::Degenerate(format!("{x:?} sees no corner")))
    }
}

/// Draws a cut whose grid labeling is well defined, redrawing on collisions.
pub fn sample_on_grid<R: Rng + ?Sized>(rng: &mut R, p_corner: &Q, grid: &Grid) -> Result<(SampledCut, Vec<usize>, usize)> {
    for redraws in 0..MAX_RESAMPLES {
        let cut = SampledCut::sample(rng, p_corner)?;
        match cut.labels_on_grid(grid) {
            Ok(labels) => return Ok((cut, labels, redraws)),
            Err(Error::Degenerate(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::Degenerate(format!("{MAX_RESAMPLES} consecutive degenerate draws")))
}

#[derive(Clone, Debug, Serialize)]
pub struct PairDensity {
    pub x: Vec<u32>,
    pub y: Vec<u32>,
    pub separations: u64,
    pub density: f64,
    pub ci3sigma: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DensityEstimate {
    pub n: u32,
    pub samples: u64,
    pub seed: u64,
    /// Separation count per grid edge, in canonical edge order.
    pub separations: Vec<u64>,
    pub corner_samples: u64,
    pub redraws: u64,
    pub tau_hat: f64,
    pub worst_pair: PairDensity,
    /// Three standard errors of the worst pair's density.
    pub ci3sigma: f64,
    /// Largest per-pair standard error in density units.
    pub max_sigma: f64,
    pub corner_fraction: f64,
    pub corner_ci3sigma: f64,
}

impl DensityEstimate {
    /// Estimated density `p̂ · n` of edge `e`.
    pub fn density(&self, e: usize) -> f64 {
        self.separations[e] as f64 / self.samples as f64 * f64::from(self.n)
    }

    /// Standard error of the density of edge `e`.
    pub fn sigma(&self, e: usize) -> f64 {
        let p = self.separations[e] as f64 / self.samples as f64;
        (p * (1.0 - p) / self.samples as f64).sqrt() * f64::from(self.n)
    }
}

struct StreamCounts {
    separations: Vec<u64>,
    corner: u64,
    redraws: u64,
}

fn run_stream(grid: &Grid, p_corner: &Q, seed: u64, stream: u64, count: u64) -> Result<StreamCounts> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut separations = vec![0u64; grid.num_edges()];
    let (mut corner, mut redraws) = (0, 0);
    for _ in 0..count {
        let (cut, labels, r) = sample_on_grid(&mut rng, p_corner, grid)?;
        redraws += r as u64;
        corner += u64::from(cut.is_corner());
        for (e, &(a, b)) in grid.edge_pairs().iter().enumerate() {
            if labels[a] != labels[b] {
                separations[e] += 1;
            }
        }
    }
    Ok(StreamCounts { separations, corner, redraws })
}

/// Separation frequencies of every grid edge under `samples` draws.
///
/// Every grid pair is joined by a grid path of `n·½‖x − y‖₁` edges, and a cut
/// separating the pair separates some edge of that path, so the largest edge
/// density bounds the density of every pair.
pub fn estimate_density(n: u32, samples: u64, p_corner: &Q, seed: u64) -> Result<DensityEstimate> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("n must be at least 2, got {n}")));
    }
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be positive".into()));
    }
    check_probability(p_corner)?;
    let grid = Grid::new(3, n)?;
    let per = samples / STREAMS;
    let extra = samples % STREAMS;
    let parts: Vec<StreamCounts> = (0..STREAMS)
        .into_par_iter()
        .map(|s| run_stream(&grid, p_corner, seed, s, per + u64::from(s < extra)))
        .collect::<Result<_>>()?;
    let mut separations = vec![0u64; grid.num_edges()];
    let (mut corner_samples, mut redraws) = (0, 0);
    for part in &parts {
        for (acc, v) in separations.iter_mut().zip(&part.separations) {
            *acc += v;
        }
        corner_samples += part.corner;
        redraws += part.redraws;
    }
    let mut est = DensityEstimate {
        n,
        samples,
        seed,
        separations,
        corner_samples,
        redraws,
        tau_hat: 0.0,
        worst_pair: PairDensity { x: Vec::new(), y: Vec::new(), separations: 0, density: 0.0, ci3sigma: 0.0 },
        ci3sigma: 0.0,
        max_sigma: 0.0,
        corner_fraction: 0.0,
        corner_ci3sigma: 0.0,
    };
    let mut worst = 0;
    for e in 0..grid.num_edges() {
        if est.separations[e] > est.separations[worst] {
            worst = e;
        }
        est.max_sigma = est.max_sigma.max(est.sigma(e));
    }
    let (a, b) = grid.edge_pairs()[worst];
    est.tau_hat = est.density(worst);
    est.ci3sigma = 3.0 * est.sigma(worst);
    est.worst_pair = PairDensity {
        x: grid.point(a).coords().to_vec(),
        y: grid.point(b).coords().to_vec(),
        separations: est.separations[worst],
        density: est.tau_hat,
        ci3sigma: est.ci3sigma,
    };
    let f = corner_samples as f64 / samples as f64;
    est.corner_fraction = f;
    let p = crate::rational::to_f64(p_corner);
    est.corner_ci3sigma = 3.0 * (p * (1.0 - p) / samples as f64).sqrt();
    Ok(est)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simplex::{Cut, CutFamily};
    use proptest::prelude::*;

    fn pt(a: i64, b: i64, c: i64, d: i64) -> [Q; 3] {
        [q(a, d), q(b, d), q(c, d)]
    }

    #[test]
    fn corner_examples() {
        let c = SampledCut::Corner { r: q(7, 10) };
        assert_eq!(c.evaluate(&pt(8, 1, 1, 10)).unwrap(), 0);
        assert_eq!(c.evaluate(&[q(1, 2), q(3, 10), q(1, 5)]).unwrap(), 3);
        assert_eq!(c.evaluate(&pt(1, 0, 0, 1)).unwrap(), 0);
    }

    #[test]
    fn ball_with_central_center() {
        let center = pt(1, 1, 1, 3);
        for bits in 0..8u8 {
            let choice = [bits & 1 != 0, bits & 2 != 0, bits & 4 != 0];
            assert_eq!(evaluate_ball_at(&center, choice, &[q(9, 10), q(1, 20), q(1, 20)]).unwrap(), 0);
            for i in 0..3 {
                let mut e = [Q::zero(), Q::zero(), Q::zero()];
                e[i] = qi(1);
                assert_eq!(evaluate_ball_at(&center, choice, &e).unwrap(), i);
            }
        }
    }

    #[test]
    fn point_on_an_arm_is_degenerate() {
        // With every choice false the arm for side x_3 = 0 runs along x_1 = 1/3.
        let center = pt(1, 1, 1, 3);
        let on_arm = [q(1, 3), q(1, 2), q(1, 6)];
        assert!(matches!(evaluate_ball_at(&center, [false; 3], &on_arm), Err(Error::Degenerate(_))));
    }

    #[test]
    fn diagonal_endpoints() {
        assert_eq!(Diagonal::A.point(&qi(0)), pt(2, 1, 0, 3));
        assert_eq!(Diagonal::A.point(&qi(1)), pt(0, 2, 1, 3));
        assert_eq!(Diagonal::B.point(&qi(0)), pt(2, 0, 1, 3));
        assert_eq!(Diagonal::B.point(&qi(1)), pt(0, 1, 2, 3));
    }

    #[test]
    fn p_corner_extremes() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            assert!(SampledCut::sample(&mut rng, &qi(1)).unwrap().is_corner());
            assert!(!SampledCut::sample(&mut rng, &qi(0)).unwrap().is_corner());
        }
        assert!(SampledCut::sample(&mut rng, &q(3, 2)).is_err());
    }

    #[test]
    fn sampled_parameters_avoid_endpoints() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..500 {
            match SampledCut::sample(&mut rng, &q(1, 2)).unwrap() {
                SampledCut::Corner { r } => assert!(r > q(2, 3) && r < qi(1)),
                SampledCut::Ball { t, .. } => assert!(t > qi(0) && t < qi(1)),
            }
        }
    }

    #[test]
    fn grid_fast_path_matches_exact_evaluation() {
        let grid = Grid::new(3, 6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let (cut, labels, _) = sample_on_grid(&mut rng, &q(1, 5), &grid).unwrap();
            for (v, x) in grid.points().iter().enumerate() {
                let c = x.coords();
                let exact = cut.evaluate(&pt(c[0].into(), c[1].into(), c[2].into(), 6)).unwrap();
                assert_eq!(labels[v], exact);
            }
        }
    }

    #[test]
    fn ball_regions_are_three_connected_classes() {
        let grid = Grid::new(3, 9).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..300 {
            let (cut, labels, _) = sample_on_grid(&mut rng, &qi(0), &grid).unwrap();
            assert!(!cut.is_corner());
            assert!(!labels.contains(&3));
            let p = Cut::new(grid.clone(), CutFamily::NonOpposite, labels).unwrap();
            assert_eq!(crate::normalize::cut_shape(&p), crate::normalize::CutShape::Ball);
        }
    }

    #[test]
    fn pure_corner_terminal_pair_density() {
        // Separation of e^1 from its neighbor needs r ≥ (n − 1)/n: probability 3/n.
        let n = 6;
        let est = estimate_density(n, 60_000, &qi(1), 3).unwrap();
        let grid = Grid::new(3, n).unwrap();
        let a = grid.point_index(&[5, 1, 0]).unwrap();
        let b = grid.point_index(&[6, 0, 0]).unwrap();
        let e = grid.edge_between(a, b).unwrap();
        let expected = 3.0;
        assert!((est.density(e) - expected).abs() <= 3.0 * est.sigma(e) + 1e-12, "{}", est.density(e));
        assert_eq!(est.corner_samples, est.samples);
    }

    #[test]
    fn adjacent_pairs_dominate_longer_pairs() {
        let n = 4;
        let grid = Grid::new(3, n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mut edge_counts = vec![0u64; grid.num_edges()];
        let m = grid.num_points();
        let mut pair_counts = vec![0u64; m * m];
        let samples = 4000;
        for _ in 0..samples {
            let (_, labels, _) = sample_on_grid(&mut rng, &q(1, 5), &grid).unwrap();
            for (e, &(a, b)) in grid.edge_pairs().iter().enumerate() {
                edge_counts[e] += u64::from(labels[a] != labels[b]);
            }
            for a in 0..m {
                for b in 0..m {
                    pair_counts[a * m + b] += u64::from(labels[a] != labels[b]);
                }
            }
        }
        let max_edge = *edge_counts.iter().max().unwrap();
        for a in 0..m {
            for b in a + 1..m {
                let hops: u32 = grid.point(a).coords().iter().zip(grid.point(b).coords()).map(|(x, y)| x.abs_diff(*y)).sum::<u32>() / 2;
                // count / hops is the pair density in units of the edge density
                assert!(pair_counts[a * m + b] <= u64::from(hops) * max_edge);
            }
        }
    }

    #[test]
    fn estimate_is_thread_independent() {
        let a = estimate_density(3, 3000, &q(1, 5), 7).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| estimate_density(3, 3000, &q(1, 5), 7).unwrap());
        assert_eq!(a.separations, b.separations);
        assert_eq!(a.corner_samples, b.corner_samples);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn sampled_cuts_are_nonopposite(seed in any::<u64>(), n in 2u32..10) {
            let grid = Grid::new(3, n).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (_, labels, _) = sample_on_grid(&mut rng, &q(1, 5), &grid).unwrap();
            for (x, &l) in grid.points().iter().zip(&labels) {
                prop_assert!(l == 3 || x.in_support(l));
                if let Some(i) = x.terminal_index() {
                    prop_assert_eq!(l, i);
                }
            }
        }

        #[test]
        fn ball_labels_from_any_interior_center(a in 1i64..20, b in 1i64..20, c in 1i64..20, choice in any::<[bool; 3]>(),
                                                 xa in 0i64..30, xb in 0i64..30) {
            let s = a + b + c;
            let center = [q(a, s), q(b, s), q(c, s)];
            let xc = 60 - xa - xb;
            let x = [q(xa, 60), q(xb, 60), q(xc, 60)];
            match evaluate_ball_at(&center, choice, &x) {
                Ok(l) => {
                    prop_assert!(l < 3);
                    // the segment to the chosen corner stays on the corner's side of the center
                    prop_assert!(x[l] > Q::zero() || x == center);
                }
                Err(Error::Degenerate(_)) => {}
                Err(e) => prop_assert!(false, "{e}"),
            }
        }
    }
}
