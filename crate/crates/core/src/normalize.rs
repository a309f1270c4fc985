//! Component relabeling that turns any non-opposite cut of Δ_{3,n} into a
//! ball cut or a 3-corner cut without cutting any previously uncut edge.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::simplex::{Cut, CutFamily, Grid, WeightFunction};

/// Connected components of the uncut subgraph, in order of their smallest point.
#[derive(Clone, Debug)]
pub struct Components {
    /// Component id per point.
    pub of: Vec<usize>,
    /// Points of each component, ascending.
    pub members: Vec<Vec<usize>>,
}

pub fn uncut_components(p: &Cut) -> Components {
    let grid = p.grid();
    let adj = grid.adjacency();
    let mut of = vec![usize::MAX; grid.num_points()];
    let mut members = Vec::new();
    for start in 0..grid.num_points() {
        if of[start] != usize::MAX {
            continue;
        }
        let id = members.len();
        let label = p.label(start);
        let mut stack = vec![start];
        let mut comp = Vec::new();
        of[start] = id;
        while let Some(v) = stack.pop() {
            comp.push(v);
            for &(u, _) in &adj[v] {
                if of[u] == usize::MAX && p.label(u) == label {
                    of[u] = id;
                    stack.push(u);
                }
            }
        }
        comp.sort_unstable();
        members.push(comp);
    }
    Components { of, members }
}

/// Bit `i` set when some point of `pts` lies on the side `x_i = 0`.
fn sides_touched(grid: &Grid, pts: &[usize]) -> u8 {
    let mut mask = 0;
    for &v in pts {
        for (i, &c) in grid.point(v).coords().iter().enumerate() {
            if c == 0 {
                mask |= 1 << i;
            }
        }
    }
    mask
}

/// Whether relabeling all of `pts` to `label` keeps the cut non-opposite.
fn legal(grid: &Grid, pts: &[usize], label: usize) -> bool {
    label == 3 || pts.iter().all(|&v| grid.point(v).coords()[label] > 0)
}

fn check_input(p: &Cut) -> Result<()> {
    if p.k() != 3 {
        return Err(Error::InvalidArgument(format!("normalization needs k = 3, got {}", p.k())));
    }
    if !p.is_nonopposite() {
        return Err(Error::InvalidCut("input is not a non-opposite cut".into()));
    }
    Ok(())
}

/// One relabeling step, or `None` at the fixpoint.
///
/// Rule (a) takes precedence. Rule (b) moves the first component, in scan
/// order, that has a legal neighboring label; a component with none may
/// become movable once a later component has merged with its terminal.
fn step(p: &Cut, comps: &Components) -> Result<Option<(usize, usize)>> {
    let grid = p.grid();
    for pts in &comps.members {
        if p.label(pts[0]) == 3 && sides_touched(grid, pts) != 0b111 {
            let to = (0..3)
                .find(|&l| legal(grid, pts, l))
                .expect("a side that is not touched gives a positive coordinate");
            return Ok(Some((comps.of[pts[0]], to)));
        }
    }
    let adj = grid.adjacency();
    let mut stuck = None;
    for (id, pts) in comps.members.iter().enumerate() {
        let label = p.label(pts[0]);
        if label == 3 || pts.contains(&grid.terminal(label)) {
            continue;
        }
        let mut neighbor_labels = [false; 4];
        for &v in pts {
            for &(u, _) in &adj[v] {
                if comps.of[u] != id {
                    neighbor_labels[p.label(u)] = true;
                }
            }
        }
        match (0..4).find(|&l| neighbor_labels[l] && legal(grid, pts, l)) {
            Some(to) => return Ok(Some((id, to))),
            None => {
                stuck.get_or_insert(pts[0]);
            }
        }
    }
    match stuck {
        Some(v) => Err(Error::Structural(grid.point(v).coords().to_vec())),
        None => Ok(None),
    }
}

/// Applies both relabeling rules until nothing changes.
///
/// Rule (a): an extra-cluster component missing some side moves to the smallest
/// terminal label that keeps the cut non-opposite. Rule (b): a terminal-labeled
/// component without its terminal joins the smallest legal neighboring label.
/// The weights only matter for the caller's cost comparison; the relabeling
/// never cuts an uncut edge, so the cost cannot grow under any weights.
pub fn normalize_cut(p: &Cut, w: &WeightFunction) -> Result<Cut> {
    check_input(p)?;
    if !p.grid().same_shape(w.grid()) {
        return Err(Error::Mismatch(p.k(), p.n() as usize, w.k(), w.n() as usize));
    }
    let mut labels = p.labels().to_vec();
    let mut current = p.clone();
    // Every step either merges two components or removes an extra-cluster
    // component, so the number of steps is bounded by twice the point count.
    let limit = 2 * p.grid().num_points() + 1;
    for _ in 0..limit {
        let comps = uncut_components(&current);
        match step(&current, &comps)? {
            None => return Ok(current),
            Some((id, to)) => {
                for &v in &comps.members[id] {
                    labels[v] = to;
                }
                current = Cut::new(p.grid().clone(), CutFamily::NonOpposite, labels.clone())?;
            }
        }
    }
    Err(Error::Structural(Vec::new()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CutShape {
    /// Three connected classes, each holding its terminal, no extra cluster.
    Ball,
    /// As a ball cut plus one connected extra cluster touching all three sides.
    ThreeCorner,
    Other,
}

pub fn cut_shape(p: &Cut) -> CutShape {
    if p.k() != 3 || !p.is_nonopposite() {
        return CutShape::Other;
    }
    let grid = p.grid();
    let comps = uncut_components(p);
    let mut per_label = [0usize; 4];
    for pts in &comps.members {
        let l = p.label(pts[0]);
        per_label[l] += 1;
        if l < 3 && !pts.contains(&grid.terminal(l)) {
            return CutShape::Other;
        }
        if l == 3 && sides_touched(grid, pts) != 0b111 {
            return CutShape::Other;
        }
    }
    match per_label {
        [1, 1, 1, 0] => CutShape::Ball,
        [1, 1, 1, 1] => CutShape::ThreeCorner,
        _ => CutShape::Other,
    }
}

/// Whether every edge uncut in `before` is also uncut in `after`.
pub fn preserves_uncut(before: &Cut, after: &Cut) -> bool {
    (0..before.grid().num_edges()).all(|e| before.is_cut(e) || !after.is_cut(e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::build_w3;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn ball_cut_is_fixed() {
        let grid = Grid::new(3, 6).unwrap();
        let a = Cut::argmax(grid.clone());
        let ball = Cut::new(grid, CutFamily::NonOpposite, a.labels().to_vec()).unwrap();
        let w = build_w3(6).unwrap();
        assert_eq!(cut_shape(&ball), CutShape::Ball);
        assert_eq!(normalize_cut(&ball, &w).unwrap().labels(), ball.labels());
    }

    #[test]
    fn interior_singleton_is_absorbed() {
        let grid = Grid::new(3, 3).unwrap();
        let mut labels = Cut::argmax(grid.clone()).labels().to_vec();
        let center = grid.point_index(&[1, 1, 1]).unwrap();
        labels[center] = 3;
        let p = Cut::new(grid.clone(), CutFamily::NonOpposite, labels).unwrap();
        assert_eq!(cut_shape(&p), CutShape::Other);
        let w = build_w3(3).unwrap();
        let out = normalize_cut(&p, &w).unwrap();
        // Rule (a) sends the center to label 1, which joins the class of e^1.
        assert_eq!(out.label(center), 0);
        assert_eq!(cut_shape(&out), CutShape::Ball);
        assert!(preserves_uncut(&p, &out));
        assert!(out.cost(&w).unwrap() <= p.cost(&w).unwrap());
    }

    #[test]
    fn three_corner_is_fixed() {
        let grid = Grid::new(3, 3).unwrap();
        let labels = grid
            .points()
            .iter()
            .map(|x| x.terminal_index().unwrap_or(3))
            .collect();
        let p = Cut::new(grid, CutFamily::NonOpposite, labels).unwrap();
        assert_eq!(cut_shape(&p), CutShape::ThreeCorner);
        let w = build_w3(3).unwrap();
        assert_eq!(normalize_cut(&p, &w).unwrap(), p);
    }

    #[test]
    fn rejects_opposite_and_kway_inputs() {
        let grid = Grid::new(3, 3).unwrap();
        let w = build_w3(3).unwrap();
        let mut labels = Cut::argmax(grid.clone()).labels().to_vec();
        labels[grid.point_index(&[2, 1, 0]).unwrap()] = 2;
        let p = Cut::new(grid, CutFamily::KWay, labels).unwrap();
        assert!(normalize_cut(&p, &w).is_err());
    }

    #[test]
    fn blocked_component_waits_for_a_merge() {
        // After rule (a) the middle column {(1,0,2), (1,1,1), (1,2,0)} is labeled 1
        // with no legal neighbor label; it becomes whole once (2,1,0) joins e^1.
        let grid = Grid::new(3, 3).unwrap();
        let labels = vec![3, 2, 2, 2, 4, 4, 1, 3, 2, 1].into_iter().map(|c| c - 1).collect();
        let p = Cut::new(grid, CutFamily::NonOpposite, labels).unwrap();
        let w = build_w3(3).unwrap();
        let out = normalize_cut(&p, &w).unwrap();
        assert_eq!(cut_shape(&out), CutShape::Ball);
        assert!(preserves_uncut(&p, &out));
    }

    fn random_trials(n: u32, trials: u64) {
        let grid = Grid::new(3, n).unwrap();
        let w = build_w3(n).unwrap();
        for seed in 0..trials {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = Cut::random_nonopposite(grid.clone(), &mut rng);
            let out = normalize_cut(&p, &w).unwrap();
            assert!(out.is_nonopposite());
            assert!(preserves_uncut(&p, &out), "seed {seed}");
            assert!(out.cost(&w).unwrap() <= p.cost(&w).unwrap());
            assert_ne!(cut_shape(&out), CutShape::Other, "seed {seed}");
        }
    }

    #[test]
    fn random_cuts_n3() {
        random_trials(3, 300);
    }

    #[test]
    fn random_cuts_n6() {
        random_trials(6, 300);
    }
}
