//! Maximum-weight bipartite matching by the Hungarian method.
//!
//! The solver is generic over an ordered abelian group so the same code runs on
//! scaled integers, exact rationals and lexicographic pairs. A matching may leave
//! any agent unmatched: the square problem is padded with one private dummy
//! partner per agent.

use std::fmt::Debug;
use std::ops::{Add, Neg, Sub};

use crate::rational::Rat;
use num_traits::Zero;

pub trait Weight:
    Copy + Ord + Debug + Add<Output = Self> + Sub<Output = Self> + Neg<Output = Self>
{
    fn zero() -> Self;
}

impl Weight for i128 {
    fn zero() -> Self {
        0
    }
}

impl Weight for Rat {
    fn zero() -> Self {
        <Rat as Zero>::zero()
    }
}

/// Lexicographically ordered pair; the first component dominates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lex<T>(pub T, pub T);

impl<T: Add<Output = T>> Add for Lex<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Lex(self.0 + o.0, self.1 + o.1)
    }
}

impl<T: Sub<Output = T>> Sub for Lex<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Lex(self.0 - o.0, self.1 - o.1)
    }
}

impl<T: Neg<Output = T>> Neg for Lex<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Lex(-self.0, -self.1)
    }
}

impl<T: Weight> Weight for Lex<T> {
    fn zero() -> Self {
        Lex(T::zero(), T::zero())
    }
}

/// `rows[i][j]` is the weight of buyer `i` with seller `j`, `None` when there is no edge.
pub type Table<W> = [Vec<Option<W>>];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assignment<W> {
    /// Seller matched to each buyer.
    pub mate: Vec<Option<usize>>,
    pub weight: W,
}

struct Solved<W> {
    size: usize,
    cost: Vec<Vec<Option<W>>>,
    u: Vec<W>,
    v: Vec<W>,
    /// row matched to each column (0-based)
    col_row: Vec<usize>,
}

fn padded<W: Weight>(rows: &Table<W>, m: usize) -> Vec<Vec<Option<W>>> {
    let n = rows.len();
    let size = n + m;
    let mut cost = vec![vec![None; size]; size];
    for (i, row) in rows.iter().enumerate() {
        assert_eq!(row.len(), m, "ragged weight table");
        for (j, w) in row.iter().enumerate() {
            cost[i][j] = w.map(|w| -w);
        }
        cost[i][m + i] = Some(W::zero());
    }
    for j in 0..m {
        cost[n + j][j] = Some(W::zero());
        for k in 0..n {
            cost[n + j][m + k] = Some(W::zero());
        }
    }
    cost
}

/// Min-cost perfect assignment with potentials (rows `u`, columns `v`).
fn hungarian<W: Weight>(cost: Vec<Vec<Option<W>>>) -> Solved<W> {
    let size = cost.len();
    let zero = W::zero();
    let mut u = vec![zero; size + 1];
    let mut v = vec![zero; size + 1];
    let mut p = vec![0usize; size + 1];
    let mut way = vec![0usize; size + 1];
    for i in 1..=size {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv: Vec<Option<W>> = vec![None; size + 1];
        let mut used = vec![false; size + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta: Option<W> = None;
            let mut j1 = 0usize;
            for j in 1..=size {
                if used[j] {
                    continue;
                }
                if let Some(c) = cost[i0 - 1][j - 1] {
                    let cur = c - u[i0] - v[j];
                    if minv[j].is_none_or(|mv| cur < mv) {
                        minv[j] = Some(cur);
                        way[j] = j0;
                    }
                }
                if let Some(mv) = minv[j] {
                    if delta.is_none_or(|d| mv < d) {
                        delta = Some(mv);
                        j1 = j;
                    }
                }
            }
            let delta = delta.expect("padded problem always has a perfect assignment");
            for j in 0..=size {
                if used[j] {
                    u[p[j]] = u[p[j]] + delta;
                    v[j] = v[j] - delta;
                } else if let Some(mv) = minv[j] {
                    minv[j] = Some(mv - delta);
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let col_row = (1..=size).map(|j| p[j] - 1).collect();
    Solved { size, cost, u: u[1..].to_vec(), v: v[1..].to_vec(), col_row }
}

/// Optimal weight only.
pub fn optimum<W: Weight>(rows: &Table<W>, m: usize) -> W {
    let n = rows.len();
    let s = hungarian(padded(rows, m));
    let mut total = W::zero();
    for (j, &i) in s.col_row[..m].iter().enumerate() {
        if i < n {
            total = total + rows[i][j].expect("matched along an edge");
        }
    }
    total
}

/// Maximum-weight matching; among optima each buyer in index order takes the
/// lowest-index seller still possible, with "unmatched" ranked last.
pub fn solve<W: Weight>(rows: &Table<W>, m: usize) -> Assignment<W> {
    let n = rows.len();
    let s = hungarian(padded(rows, m));
    let size = s.size;
    let tight = |i: usize, j: usize| -> bool {
        match s.cost[i][j] {
            Some(c) => s.u[i] + s.v[j] == c,
            None => false,
        }
    };
    let mut row_col = vec![0usize; size];
    let mut col_row = s.col_row.clone();
    for (j, &i) in col_row.iter().enumerate() {
        row_col[i] = j;
    }
    let mut fixed_col = vec![false; size];
    for i in 0..n {
        let mut candidates: Vec<usize> = (0..m).filter(|&j| rows[i][j].is_some()).collect();
        candidates.push(m + i);
        for target in candidates {
            if fixed_col[target] || !tight(i, target) {
                continue;
            }
            if row_col[i] == target {
                fixed_col[target] = true;
                break;
            }
            if let Some(path) = reroute(size, &tight, &row_col, &col_row, &fixed_col, i, target) {
                // path: alternating columns starting at `target`, ending at row_col[i]
                let mut cur_row = col_row[target];
                row_col[i] = target;
                col_row[target] = i;
                for &c in &path {
                    let next_row = col_row[c];
                    row_col[cur_row] = c;
                    col_row[c] = cur_row;
                    cur_row = next_row;
                }
                fixed_col[target] = true;
                break;
            }
        }
        debug_assert!(fixed_col[row_col[i]]);
    }
    let mut mate = vec![None; n];
    let mut weight = W::zero();
    for i in 0..n {
        let j = row_col[i];
        if j < m {
            mate[i] = Some(j);
            weight = weight + rows[i][j].expect("matched along an edge");
        }
    }
    Assignment { mate, weight }
}

/// Finds an alternating path in the tight graph that lets row `i` take column
/// `target`: from the row currently holding `target`, through free (non-fixed)
/// columns, ending at the column currently held by `i`. Returns the sequence of
/// columns the displaced rows move to.
fn reroute(
    size: usize,
    tight: &impl Fn(usize, usize) -> bool,
    row_col: &[usize],
    col_row: &[usize],
    fixed_col: &[bool],
    i: usize,
    target: usize,
) -> Option<Vec<usize>> {
    let goal = row_col[i];
    let start = col_row[target];
    let mut came_from: Vec<Option<usize>> = vec![None; size];
    let mut seen_row = vec![false; size];
    seen_row[start] = true;
    let mut queue = std::collections::VecDeque::from([start]);
    while let Some(r) = queue.pop_front() {
        for c in 0..size {
            if c == target || fixed_col[c] || came_from[c].is_some() || !tight(r, c) {
                continue;
            }
            if c != goal && col_row[c] == r {
                continue;
            }
            came_from[c] = Some(r);
            if c == goal {
                let mut cols = vec![c];
                let mut row = r;
                while row != start {
                    let col = row_col[row];
                    cols.push(col);
                    row = came_from[col].expect("bfs tree");
                }
                cols.reverse();
                return Some(cols);
            }
            let nr = col_row[c];
            if !seen_row[nr] {
                seen_row[nr] = true;
                queue.push_back(nr);
            }
        }
    }
    None
}
