use std::collections::BTreeSet;

use num_traits::Zero;

use crate::rational::Rat;
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GoodsClass {
    General,
    /// every buyer values every seller equally: v_ij = v_i
    Homogeneous,
    /// every nonzero value equals one constant
    Identity,
}

/// Set of (buyer, seller) pairs kept sorted for deterministic iteration.
pub type EdgeSet = BTreeSet<(usize, usize)>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartiteMarket {
    n: usize,
    m: usize,
    values: Vec<Vec<Rat>>,
    world: EdgeSet,
    class: GoodsClass,
}

impl BipartiteMarket {
    pub fn new(
        values: Vec<Vec<Rat>>,
        m: usize,
        world: impl IntoIterator<Item = (usize, usize)>,
        class: GoodsClass,
    ) -> Result<Self, Error> {
        let n = values.len();
        for (i, row) in values.iter().enumerate() {
            if row.len() != m {
                return Err(Error::Input(format!("buyer {i} has {} values, expected {m}", row.len())));
            }
            if let Some(j) = row.iter().position(|v| *v < Rat::zero()) {
                return Err(Error::Input(format!("negative value for pair ({i},{j})")));
            }
        }
        let mut edges = EdgeSet::new();
        for (i, j) in world {
            if i >= n || j >= m {
                return Err(Error::Input(format!("world edge ({i},{j}) out of range")));
            }
            if !edges.insert((i, j)) {
                return Err(Error::Input(format!("duplicate world edge ({i},{j})")));
            }
        }
        match class {
            GoodsClass::General => {}
            GoodsClass::Homogeneous => {
                if let Some(i) = values.iter().position(|r| r.iter().any(|v| *v != r[0])) {
                    return Err(Error::Input(format!("buyer {i} is not homogeneous")));
                }
            }
            GoodsClass::Identity => {
                let mut nz = values.iter().flatten().filter(|v| !v.is_zero());
                if let Some(c) = nz.next() {
                    if nz.any(|v| v != c) {
                        return Err(Error::Input("identity goods need one common nonzero value".into()));
                    }
                }
            }
        }
        Ok(BipartiteMarket { n, m, values, world: edges, class })
    }

    /// Homogeneous market from per-buyer values.
    pub fn homogeneous(
        buyer_values: &[Rat],
        m: usize,
        world: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, Error> {
        let values = buyer_values.iter().map(|v| vec![*v; m]).collect();
        Self::new(values, m, world, GoodsClass::Homogeneous)
    }

    pub fn buyers(&self) -> usize {
        self.n
    }

    pub fn sellers(&self) -> usize {
        self.m
    }

    pub fn value(&self, i: usize, j: usize) -> Rat {
        self.values[i][j]
    }

    pub fn values(&self) -> &[Vec<Rat>] {
        &self.values
    }

    pub fn world_edges(&self) -> &EdgeSet {
        &self.world
    }

    pub fn goods_class(&self) -> GoodsClass {
        self.class
    }

    /// Per-buyer value for homogeneous data: the first column (0 without sellers).
    pub fn buyer_value(&self, i: usize) -> Rat {
        self.values[i].first().copied().unwrap_or_else(Rat::zero)
    }

    pub fn all_pairs(&self) -> EdgeSet {
        (0..self.n).flat_map(|i| (0..self.m).map(move |j| (i, j))).collect()
    }

    pub fn check_edges(&self, edges: &EdgeSet) -> Result<(), Error> {
        match edges.iter().find(|(i, j)| *i >= self.n || *j >= self.m) {
            Some((i, j)) => Err(Error::Input(format!("edge ({i},{j}) out of range"))),
            None => Ok(()),
        }
    }

    /// Weight table restricted to `edges`.
    pub fn table(&self, edges: &EdgeSet) -> Vec<Vec<Option<Rat>>> {
        let mut t = vec![vec![None; self.m]; self.n];
        for &(i, j) in edges {
            t[i][j] = Some(self.values[i][j]);
        }
        t
    }
}

/// A matching as a sorted set of (buyer, seller) pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Matching {
    pub pairs: BTreeSet<(usize, usize)>,
}

impl Matching {
    pub fn from_mates(mate: &[Option<usize>]) -> Self {
        let pairs = mate.iter().enumerate().filter_map(|(i, j)| j.map(|j| (i, j))).collect();
        Matching { pairs }
    }

    pub fn seller_of(&self, buyer: usize) -> Option<usize> {
        self.pairs.iter().find(|p| p.0 == buyer).map(|p| p.1)
    }

    pub fn buyer_of(&self, seller: usize) -> Option<usize> {
        self.pairs.iter().find(|p| p.1 == seller).map(|p| p.0)
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn weight(&self, market: &BipartiteMarket) -> Rat {
        self.pairs.iter().map(|&(i, j)| market.value(i, j)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    #[test]
    fn validates_shape_and_class() {
        assert!(BipartiteMarket::new(vec![vec![int(1)]], 2, [], GoodsClass::General).is_err());
        assert!(BipartiteMarket::new(vec![vec![int(1)]], 1, [(0, 1)], GoodsClass::General).is_err());
        assert!(BipartiteMarket::new(vec![vec![int(1)]], 1, [(0, 0), (0, 0)], GoodsClass::General).is_err());
        let v = vec![vec![int(1), int(2)]];
        assert!(BipartiteMarket::new(v.clone(), 2, [], GoodsClass::Homogeneous).is_err());
        assert!(BipartiteMarket::new(v, 2, [], GoodsClass::Identity).is_err());
        let id = vec![vec![int(2), int(0)], vec![int(2), int(2)]];
        assert!(BipartiteMarket::new(id, 2, [(1, 0)], GoodsClass::Identity).is_ok());
    }

    #[test]
    fn homogeneous_rows() {
        let mk = BipartiteMarket::homogeneous(&[int(3), int(1)], 2, [(0, 1)]).unwrap();
        assert_eq!(mk.value(0, 0), int(3));
        assert_eq!(mk.buyer_value(1), int(1));
        assert_eq!(mk.all_pairs().len(), 4);
    }
}
