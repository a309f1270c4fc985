//! Constructors for the gap weight functions.
//!
//! * [`build_w3`]: the triangle gap on the 3-simplex grid (corner triangles and
//!   middle hexagon).
//! * [`build_fk`]: the Freund–Karloff weights on the 6-point grid.
//! * [`build_w_hat`]: `build_w3` embedded in every 3-face of the k-simplex and averaged.
//! * [`build_w_prime`]: uniform weight on the simplex edges (lines between two vertices).
//! * [`build_w_tilde`]: `((k-2)/(k-1))·ŵ + (1/(k-1))·w′`.

use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::rational::{q, qi, Q};
use crate::simplex::{binomial, Grid, GridPoint, WeightFunction};

/// Region of the 3-simplex a point belongs to. The lines `x_i = 2/3` carry two tags.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RegionTag {
    CornerTriangle(usize),
    MiddleHexagon,
}

/// Tags of a point given by numerators over a common denominator `den`.
pub fn region_tags(nums: [i64; 3], den: i64) -> Vec<RegionTag> {
    let mut tags: Vec<RegionTag> = (0..3)
        .filter(|&i| 3 * nums[i] >= 2 * den)
        .map(RegionTag::CornerTriangle)
        .collect();
    if nums.iter().all(|&m| 3 * m <= 2 * den) {
        tags.push(RegionTag::MiddleHexagon);
    }
    tags
}

pub fn point_regions(p: &GridPoint) -> Result<Vec<RegionTag>> {
    if p.k() != 3 {
        return Err(Error::InvalidArgument("regions are defined on the 3-simplex only".into()));
    }
    let c = p.coords();
    Ok(region_tags([c[0] as i64, c[1] as i64, c[2] as i64], p.n() as i64))
}

fn check_divisible(n: u32) -> Result<()> {
    if n < 3 || !n.is_multiple_of(3) {
        return Err(Error::InvalidGrid(format!("n must be a positive multiple of 3, got {n}")));
    }
    Ok(())
}

/// Weight of the triangle-gap edge `e` of `grid`, in units of `ρ = 1/(2n)`.
fn w3_units(grid: &Grid, e: usize) -> i64 {
    let n = grid.n() as i64;
    let third = n / 3;
    let (i, j) = grid.edge_transfer(e);
    let c = 3 - i - j;
    let (a, b) = grid.edge_pairs()[e];
    let (pa, pb) = (grid.point(a).coords(), grid.point(b).coords());
    let m_c = pa[c] as i64;
    if 3 * m_c > 2 * n {
        // inside the corner triangle at e^c, parallel to the opposite side
        0
    } else if m_c == 0 {
        let v = pa[j].min(pb[j]) as i64;
        let u = pa[i].min(pb[i]) as i64;
        if v < third {
            third - v
        } else if u < third {
            third - u
        } else {
            1
        }
    } else {
        1
    }
}

pub fn build_w3(n: u32) -> Result<WeightFunction> {
    check_divisible(n)?;
    let grid = Grid::new(3, n)?;
    let rho = q(1, 2 * n as i64);
    let dense = (0..grid.num_edges())
        .map(|e| qi(w3_units(&grid, e)) * &rho)
        .collect();
    WeightFunction::from_dense(grid, dense)
}

pub fn build_fk() -> Result<WeightFunction> {
    let grid = Grid::new(3, 2)?;
    let dense = grid
        .edge_pairs()
        .iter()
        .map(|&(a, b)| {
            let touches_vertex = grid.point(a).terminal_index().is_some()
                || grid.point(b).terminal_index().is_some();
            if touches_vertex {
                q(1, 6)
            } else {
                q(1, 4)
            }
        })
        .collect();
    WeightFunction::from_dense(grid, dense)
}

/// Coordinates of `p` restricted to `face`, as a point of the 3-simplex grid.
pub(crate) fn project(p: &GridPoint, face: [usize; 3]) -> Vec<u32> {
    face.iter().map(|&i| p.coords()[i]).collect()
}

/// Smallest 3-face (lexicographically) containing the support mask.
fn face_containing(mask: u64, k: usize) -> [usize; 3] {
    let mut face: Vec<usize> = (0..k).filter(|&i| mask & (1 << i) != 0).collect();
    for i in 0..k {
        if face.len() == 3 {
            break;
        }
        if mask & (1 << i) == 0 {
            face.push(i);
        }
    }
    face.sort_unstable();
    [face[0], face[1], face[2]]
}

/// Face average of the embedded triangle gap, via the face-count shortcut.
pub fn build_w_hat(k: usize, n: u32) -> Result<WeightFunction> {
    if k < 3 {
        return Err(Error::InvalidGrid(format!("k must be at least 3, got {k}")));
    }
    let w3 = build_w3(n)?;
    let tri = w3.grid().clone();
    let grid = Grid::new(k, n)?;
    let faces = binomial(k as u64, 3) as i64;
    let mut dense = vec![Q::zero(); grid.num_edges()];
    for (e, &(a, b)) in grid.edge_pairs().iter().enumerate() {
        let mask = grid.edge_support_union(e);
        let s = mask.count_ones() as u64;
        if s > 3 {
            continue;
        }
        let face = face_containing(mask, k);
        let pa = tri.point_index(&project(grid.point(a), face)).expect("projection lies on the grid");
        let pb = tri.point_index(&project(grid.point(b), face)).expect("projection lies on the grid");
        let te = tri.edge_between(pa, pb).expect("projection of an edge is an edge");
        let count = binomial(k as u64 - s, 3 - s) as i64;
        dense[e] = w3.weight(te) * q(count, faces);
    }
    WeightFunction::from_dense(grid, dense)
}

pub fn build_w_prime(k: usize, n: u32) -> Result<WeightFunction> {
    if k < 2 || n < 2 {
        return Err(Error::InvalidGrid(format!("need k >= 2 and n >= 2, got ({k}, {n})")));
    }
    let grid = Grid::new(k, n)?;
    let per_line = q(1, binomial(k as u64, 2) as i64);
    let dense = (0..grid.num_edges())
        .map(|e| {
            if grid.edge_support_union(e).count_ones() == 2 {
                per_line.clone()
            } else {
                Q::zero()
            }
        })
        .collect();
    WeightFunction::from_dense(grid, dense)
}

pub fn build_w_tilde(k: usize, n: u32) -> Result<WeightFunction> {
    let (hat, prime) = (build_w_hat(k, n)?, build_w_prime(k, n)?);
    let km1 = k as i64 - 1;
    WeightFunction::combine(&[(q(k as i64 - 2, km1), &hat), (q(1, km1), &prime)])
}

/// Closed form of `lpc(build_w3(n))` and `lpc(build_w_hat(k, n))`.
pub fn w3_lpc_closed_form(n: u32) -> Q {
    q(5, 6) + q(1, 2 * n as i64)
}

/// Closed form of `lpc(build_w_tilde(k, n))`.
pub fn w_tilde_lpc_closed_form(k: usize, n: u32) -> Q {
    let km1 = k as i64 - 1;
    q(k as i64 - 2, km1) * w3_lpc_closed_form(n) + q(1, km1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightKind {
    W3,
    Fk,
    WHat,
    WPrime,
    WTilde,
}

impl WeightKind {
    pub fn build(self, k: usize, n: u32) -> Result<WeightFunction> {
        let need_three = |k: usize| {
            if k == 3 {
                Ok(())
            } else {
                Err(Error::InvalidArgument(format!("{} is defined for k = 3 only", self.as_str())))
            }
        };
        match self {
            WeightKind::W3 => need_three(k).and_then(|_| build_w3(n)),
            WeightKind::Fk => {
                need_three(k)?;
                if n != 2 {
                    return Err(Error::InvalidArgument("fk is defined for n = 2 only".into()));
                }
                build_fk()
            }
            WeightKind::WHat => build_w_hat(k, n),
            WeightKind::WPrime => build_w_prime(k, n),
            WeightKind::WTilde => build_w_tilde(k, n),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            WeightKind::W3 => "w3",
            WeightKind::Fk => "fk",
            WeightKind::WHat => "what",
            WeightKind::WPrime => "wprime",
            WeightKind::WTilde => "wtilde",
        }
    }
}

impl FromStr for WeightKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "w3" => WeightKind::W3,
            "fk" => WeightKind::Fk,
            "what" => WeightKind::WHat,
            "wprime" => WeightKind::WPrime,
            "wtilde" => WeightKind::WTilde,
            _ => return Err(Error::InvalidArgument(format!("unknown weight family {s:?}"))),
        })
    }
}

/// Literal average of the embedded triangle gap over all 3-faces.
#[doc(hidden)]
pub fn w_hat_by_face_average(k: usize, n: u32) -> Result<WeightFunction> {
    let w3 = build_w3(n)?;
    let tri: Arc<Grid> = w3.grid().clone();
    let grid = Grid::new(k, n)?;
    let mut dense = vec![Q::zero(); grid.num_edges()];
    let mut faces = 0i64;
    for i1 in 0..k {
        for i2 in i1 + 1..k {
            for i3 in i2 + 1..k {
                faces += 1;
                let face_mask: u64 = (1 << i1) | (1 << i2) | (1 << i3);
                for (e, &(a, b)) in grid.edge_pairs().iter().enumerate() {
                    if grid.edge_support_union(e) & !face_mask != 0 {
                        continue;
                    }
                    let face = [i1, i2, i3];
                    let pa = tri.point_index(&project(grid.point(a), face)).unwrap();
                    let pb = tri.point_index(&project(grid.point(b), face)).unwrap();
                    dense[e] += w3.weight(tri.edge_between(pa, pb).unwrap());
                }
            }
        }
    }
    let faces = Q::from_integer(BigInt::from(faces));
    WeightFunction::from_dense(grid, dense.into_iter().map(|w| w / &faces).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simplex::Edge;

    fn pt(c: &[u32]) -> GridPoint {
        GridPoint::new(c.to_vec()).unwrap()
    }

    fn w_at(w: &WeightFunction, a: &[u32], b: &[u32]) -> Q {
        w.weight_of(&Edge::new(pt(a), pt(b)).unwrap()).unwrap()
    }

    #[test]
    fn w3_corner_side_edge() {
        let w = build_w3(9).unwrap();
        assert_eq!(w_at(&w, &[9, 0, 0], &[8, 1, 0]), q(1, 6));
        assert_eq!(w_at(&w, &[8, 1, 0], &[7, 2, 0]), q(2, 18));
        assert_eq!(w_at(&w, &[7, 2, 0], &[6, 3, 0]), q(1, 18));
        assert_eq!(w_at(&w, &[5, 4, 0], &[4, 5, 0]), q(1, 18));
        assert_eq!(w_at(&w, &[0, 9, 0], &[1, 8, 0]), q(1, 6));
    }

    #[test]
    fn w3_dashed_edges_are_zero() {
        let w = build_w3(9).unwrap();
        // parallel to (e^1, e^2) with third numerator 7: inside T_3
        assert_eq!(w_at(&w, &[2, 0, 7], &[1, 1, 7]), Q::zero());
        assert_eq!(w_at(&w, &[1, 0, 8], &[0, 1, 8]), Q::zero());
        // border line x_3 = 2/3 belongs to the hexagon
        assert_eq!(w_at(&w, &[2, 1, 6], &[1, 2, 6]), q(1, 18));
        // inside T_3 but not parallel to the opposite side
        assert_eq!(w_at(&w, &[1, 1, 7], &[1, 0, 8]), q(1, 18));
    }

    #[test]
    fn w3_direction_totals() {
        for n in (3..=30).step_by(3) {
            let w = build_w3(n).unwrap();
            let grid = w.grid();
            let rho = q(1, 2 * n as i64);
            let nn = n as i64;
            let expect = (q(5 * nn * nn, 9) + q(nn, 3)) * &rho;
            for c in 0..3 {
                let total: Q = (0..grid.num_edges())
                    .filter(|&e| {
                        let (i, j) = grid.edge_transfer(e);
                        3 - i - j == c
                    })
                    .map(|e| w.weight(e))
                    .sum();
                assert_eq!(total, expect, "n = {n}, direction {c}");
            }
            assert_eq!(w.lpc(), w3_lpc_closed_form(n));
        }
        assert_eq!(build_w3(3).unwrap().lpc(), qi(1));
    }

    #[test]
    fn w3_rejects_bad_n() {
        assert!(build_w3(4).is_err());
        assert!(build_w3(0).is_err());
        assert!(build_w_hat(4, 5).is_err());
    }

    #[test]
    fn w3_is_symmetric() {
        let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        for n in [3, 6, 9] {
            let w = build_w3(n).unwrap();
            let grid = w.grid();
            for perm in perms {
                for e in 0..grid.num_edges() {
                    let edge = grid.edge(e);
                    let map = |p: &GridPoint| pt(&perm.map(|i| p.coords()[i]));
                    let image = Edge::new(map(edge.u()), map(edge.v())).unwrap();
                    assert_eq!(w.weight_of(&image).unwrap(), w.weight(e));
                }
            }
        }
    }

    #[test]
    fn fk_values() {
        let w = build_fk().unwrap();
        assert_eq!(w.lpc(), q(7, 8));
        assert_eq!(w_at(&w, &[2, 0, 0], &[1, 1, 0]), q(1, 6));
        assert_eq!(w_at(&w, &[1, 1, 0], &[1, 0, 1]), q(1, 4));
    }

    #[test]
    fn w_hat_matches_face_average() {
        for k in 3..=5 {
            assert_eq!(build_w_hat(k, 3).unwrap(), w_hat_by_face_average(k, 3).unwrap(), "k = {k}");
        }
        assert_eq!(build_w_hat(4, 6).unwrap(), w_hat_by_face_average(4, 6).unwrap());
    }

    #[test]
    fn w_hat_k3_is_w3() {
        assert_eq!(build_w_hat(3, 9).unwrap(), build_w3(9).unwrap());
    }

    #[test]
    fn w_hat_lpc_and_support() {
        for k in 3..=6 {
            for n in [3, 6] {
                let w = build_w_hat(k, n).unwrap();
                assert_eq!(w.lpc(), w3_lpc_closed_form(n));
                for e in 0..w.grid().num_edges() {
                    if w.grid().edge_support_union(e).count_ones() >= 4 {
                        assert!(w.is_zero_at(e));
                    }
                }
            }
        }
    }

    #[test]
    fn w_hat_is_permutation_invariant() {
        let w = build_w_hat(4, 3).unwrap();
        let grid = w.grid();
        let perms = [[1, 0, 2, 3], [0, 2, 3, 1], [3, 2, 1, 0]];
        for perm in perms {
            for e in 0..grid.num_edges() {
                let edge = grid.edge(e);
                let map = |p: &GridPoint| pt(&perm.map(|i| p.coords()[i]));
                let image = Edge::new(map(edge.u()), map(edge.v())).unwrap();
                assert_eq!(w.weight_of(&image).unwrap(), w.weight(e));
            }
        }
    }

    #[test]
    fn w_prime_values() {
        for k in 2..=8 {
            for n in [2, 3, 6] {
                assert_eq!(build_w_prime(k, n).unwrap().lpc(), qi(1), "k = {k}, n = {n}");
            }
        }
        let w = build_w_prime(3, 2).unwrap();
        for e in 0..w.grid().num_edges() {
            let expect = if w.grid().edge_support_union(e).count_ones() == 2 { q(1, 3) } else { Q::zero() };
            assert_eq!(w.weight(e), expect);
        }
        let w = build_w_prime(3, 3).unwrap();
        assert_eq!(w_at(&w, &[1, 1, 1], &[0, 2, 1]), Q::zero());
        assert!(build_w_prime(3, 1).is_err());
    }

    #[test]
    fn w_tilde_lpc() {
        assert_eq!(build_w_tilde(3, 9).unwrap().lpc(), q(17, 18));
        for k in 3..=6 {
            for n in [3, 6] {
                let l = build_w_tilde(k, n).unwrap().lpc();
                assert_eq!(l, w_tilde_lpc_closed_form(k, n));
                let slack = &l - (q(5, 1) + q(1, k as i64 - 1)) / qi(6);
                assert_eq!(slack, q(k as i64 - 2, k as i64 - 1) * q(1, 2 * n as i64));
                assert!(slack <= q(1, 2 * n as i64));
            }
        }
    }

    #[test]
    fn weight_denominators_are_bounded() {
        for k in 3..=8 {
            let n = 3;
            let bound = 2 * n as u64 * binomial(k as u64, 3) * binomial(k as u64, 2) * (k as u64 - 1);
            for w in [build_w_hat(k, n).unwrap(), build_w_prime(k, n).unwrap(), build_w_tilde(k, n).unwrap()] {
                for v in w.weights() {
                    let d: u64 = v.denom().try_into().unwrap();
                    assert_eq!(bound % d, 0, "k = {k}, weight {v}");
                }
            }
        }
    }

    #[test]
    fn region_overlap_lines() {
        assert_eq!(point_regions(&pt(&[6, 3, 0])).unwrap(), vec![RegionTag::CornerTriangle(0), RegionTag::MiddleHexagon]);
        assert_eq!(point_regions(&pt(&[7, 2, 0])).unwrap(), vec![RegionTag::CornerTriangle(0)]);
        assert_eq!(point_regions(&pt(&[3, 3, 3])).unwrap(), vec![RegionTag::MiddleHexagon]);
    }

    #[test]
    fn kind_parsing() {
        assert_eq!("wtilde".parse::<WeightKind>().unwrap(), WeightKind::WTilde);
        assert!("w4".parse::<WeightKind>().is_err());
        assert!(WeightKind::Fk.build(3, 3).is_err());
        assert!(WeightKind::W3.build(4, 3).is_err());
    }
}
