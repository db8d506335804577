//! Rational front end to the assignment solver.
//!
//! Rational tables are scaled to integers by the common denominator whenever that
//! fits comfortably in `i128`; otherwise the solver runs on rationals directly.

use crate::assignment::{self, Assignment, Lex};
use crate::market::{BipartiteMarket, EdgeSet, Matching};
use crate::rational::{common_denominator, scaled, Rat};
use crate::Error;

const SCALED_LIMIT: i128 = 1 << 96;

fn scale_of<'a>(vals: impl IntoIterator<Item = &'a Rat>) -> Option<i128> {
    let vals: Vec<&Rat> = vals.into_iter().collect();
    let l = common_denominator(vals.iter().copied())?;
    for v in vals {
        let s = scaled(v, l)?;
        if s.abs() >= SCALED_LIMIT {
            return None;
        }
    }
    Some(l)
}

fn to_int(t: &[Vec<Option<Rat>>], l: i128) -> Vec<Vec<Option<i128>>> {
    t.iter()
        .map(|r| r.iter().map(|x| x.map(|x| scaled(&x, l).expect("checked scale"))).collect())
        .collect()
}

/// Maximum weight of a matching in the table.
pub fn welfare(t: &[Vec<Option<Rat>>], m: usize) -> Rat {
    match scale_of(t.iter().flatten().flatten()) {
        Some(l) => Rat::new(assignment::optimum(&to_int(t, l), m), l),
        None => assignment::optimum(t, m),
    }
}

/// Maximum-weight matching with the solver's deterministic tie-break.
pub fn best_matching(t: &[Vec<Option<Rat>>], m: usize) -> Assignment<Rat> {
    match scale_of(t.iter().flatten().flatten()) {
        Some(l) => {
            let a = assignment::solve(&to_int(t, l), m);
            Assignment { mate: a.mate, weight: Rat::new(a.weight, l) }
        }
        None => assignment::solve(t, m),
    }
}

/// Maximum-weight matching under lexicographic (primary, secondary) weights.
pub fn best_matching_lex(t: &[Vec<Option<(Rat, Rat)>>], m: usize) -> Assignment<(Rat, Rat)> {
    let firsts: Vec<Vec<Option<Rat>>> =
        t.iter().map(|r| r.iter().map(|x| x.map(|x| x.0)).collect()).collect();
    let seconds: Vec<Vec<Option<Rat>>> =
        t.iter().map(|r| r.iter().map(|x| x.map(|x| x.1)).collect()).collect();
    let l1 = scale_of(firsts.iter().flatten().flatten());
    let l2 = scale_of(seconds.iter().flatten().flatten());
    if let (Some(l1), Some(l2)) = (l1, l2) {
        let (a, b) = (to_int(&firsts, l1), to_int(&seconds, l2));
        let rows: Vec<Vec<Option<Lex<i128>>>> = a
            .iter()
            .zip(&b)
            .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x.map(|x| Lex(x, y.unwrap()))).collect())
            .collect();
        let s = assignment::solve(&rows, m);
        return Assignment { mate: s.mate, weight: (Rat::new(s.weight.0, l1), Rat::new(s.weight.1, l2)) };
    }
    let rows: Vec<Vec<Option<Lex<Rat>>>> =
        t.iter().map(|r| r.iter().map(|x| x.map(|(p, q)| Lex(p, q))).collect()).collect();
    let s = assignment::solve(&rows, m);
    Assignment { mate: s.mate, weight: (s.weight.0, s.weight.1) }
}

/// Same table with seller `j` removed (its column emptied).
pub fn without_seller<T: Clone>(t: &[Vec<Option<T>>], j: usize) -> Vec<Vec<Option<T>>> {
    let mut out = t.to_vec();
    for r in &mut out {
        r[j] = None;
    }
    out
}

/// Same table with an identical copy of seller `j` appended as a new column.
pub fn with_seller_copy<T: Clone>(t: &[Vec<Option<T>>], j: usize) -> Vec<Vec<Option<T>>> {
    let mut out = t.to_vec();
    for r in &mut out {
        let c = r[j].clone();
        r.push(c);
    }
    out
}

pub fn max_weight_matching(market: &BipartiteMarket, edges: &EdgeSet) -> Result<(Matching, Rat), Error> {
    market.check_edges(edges)?;
    let a = best_matching(&market.table(edges), market.sellers());
    Ok((Matching::from_mates(&a.mate), a.weight))
}

/// Welfare W(G) of the market restricted to `edges`.
pub fn market_welfare(market: &BipartiteMarket, edges: &EdgeSet) -> Rat {
    welfare(&market.table(edges), market.sellers())
}
