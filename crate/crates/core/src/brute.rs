//! Exhaustive minimum cut over all non-opposite or all 3-way cuts of a tiny grid.

use num_bigint::BigInt;

use crate::dual::CertFamily;
use crate::error::{Error, Result};
use crate::rational::Q;
use crate::simplex::{Cut, CutFamily, WeightFunction};

/// Largest grid searched exhaustively: Δ_{3,4} has 15 points.
pub const MAX_POINTS: usize = 15;

struct Search {
    choices: Vec<Vec<usize>>,
    /// Earlier neighbors of each point with the scaled edge weight.
    back: Vec<Vec<(usize, i128)>>,
    labels: Vec<usize>,
    best: i128,
    best_labels: Vec<usize>,
}

impl Search {
    fn dfs(&mut self, v: usize, partial: i128) {
        if partial >= self.best {
            return;
        }
        if v == self.labels.len() {
            self.best = partial;
            self.best_labels.clone_from(&self.labels);
            return;
        }
        for c in 0..self.choices[v].len() {
            let label = self.choices[v][c];
            let added: i128 = self.back[v]
                .iter()
                .filter(|&&(u, _)| self.labels[u] != label)
                .map(|&(_, wt)| wt)
                .sum();
            self.labels[v] = label;
            self.dfs(v + 1, partial + added);
        }
    }
}

/// Exact minimum cost over the family and one cut attaining it.
///
/// Points are assigned in lexicographic order; a branch is dropped as soon as
/// its partial cost reaches the best complete cost found so far.
pub fn brute_force_min_cut(n: u32, w: &WeightFunction, family: CertFamily) -> Result<(Q, Cut)> {
    if w.k() != 3 {
        return Err(Error::InvalidArgument(format!("exhaustive search needs k = 3, got {}", w.k())));
    }
    if w.n() != n {
        return Err(Error::Mismatch(3, n as usize, w.k(), w.n() as usize));
    }
    let grid = w.grid().clone();
    if grid.num_points() > MAX_POINTS {
        return Err(Error::TooLarge(format!(
            "n = {n} has {} points, limit is {MAX_POINTS}",
            grid.num_points()
        )));
    }
    let scaled = w
        .scaled_i128()
        .ok_or_else(|| Error::TooLarge("weights exceed the 128-bit search range".into()))?;
    let choices: Vec<Vec<usize>> = grid
        .points()
        .iter()
        .map(|x| match (x.terminal_index(), family) {
            (Some(i), _) => vec![i],
            (None, CertFamily::ThreeWay) => vec![0, 1, 2],
            (None, CertFamily::NonOpposite) => {
                let mut s = x.support();
                s.push(3);
                s
            }
        })
        .collect();
    let mut back = vec![Vec::new(); grid.num_points()];
    for (e, &(a, b)) in grid.edge_pairs().iter().enumerate() {
        back[b].push((a, scaled[e]));
    }
    let mut search = Search {
        labels: vec![0; grid.num_points()],
        best_labels: Vec::new(),
        best: i128::MAX,
        choices,
        back,
    };
    search.dfs(0, 0);
    let cut_family = match family {
        CertFamily::NonOpposite => CutFamily::NonOpposite,
        CertFamily::ThreeWay => CutFamily::KWay,
    };
    let cut = Cut::new(grid, cut_family, search.best_labels)?;
    let (_, den) = w.scaled();
    let min = Q::new(BigInt::from(search.best), den.clone());
    debug_assert_eq!(cut.cost(w)?, min);
    Ok((min, cut))
}
