//! Reward functions `f : 2^[n] -> [0, 1]` accessed through a value oracle.

use num_traits::{One, Signed, Zero};

use crate::action_set::ActionSet;
use crate::error::{ensure_size, Error, Result};
use crate::graph::Graph;
use crate::rational::{int, Rational};

/// Largest ground set for which an explicit value table may be stored.
pub const MAX_TABLE_N: usize = 16;
/// Largest ground set for which structural properties are checked by enumeration.
pub const MAX_ENUMERATION_N: usize = 16;

#[derive(Clone, Debug, PartialEq)]
pub enum Valuation {
    /// `f(S) = sum of weights over S`.
    Additive(Vec<Rational>),
    /// `f(S) = |E(S)| / C(n, 2)`.
    Graph(Graph),
    /// Explicit table indexed by subset bitmask.
    Table { n: usize, values: Vec<Rational> },
}

impl Valuation {
    pub fn additive(weights: Vec<Rational>) -> Result<Self> {
        ensure_size("additive valuation", weights.len(), crate::action_set::MAX_ELEMENTS)?;
        Ok(Valuation::Additive(weights))
    }

    pub fn graph(graph: Graph) -> Self {
        Valuation::Graph(graph)
    }

    pub fn table(n: usize, values: Vec<Rational>) -> Result<Self> {
        ensure_size("table valuation", n, MAX_TABLE_N)?;
        if values.len() != 1usize << n {
            return Err(Error::InvalidParameter(format!(
                "table for n = {n} needs {} values, got {}",
                1usize << n,
                values.len()
            )));
        }
        Ok(Valuation::Table { n, values })
    }

    /// Tabulates any closure over all `2^n` subsets.
    pub fn table_from_fn(n: usize, f: impl Fn(ActionSet) -> Rational) -> Result<Self> {
        ensure_size("table valuation", n, MAX_TABLE_N)?;
        let values = (0..1u128 << n).map(|bits| f(ActionSet::from_bits(bits))).collect();
        Valuation::table(n, values)
    }

    pub fn n(&self) -> usize {
        match self {
            Valuation::Additive(w) => w.len(),
            Valuation::Graph(g) => g.n(),
            Valuation::Table { n, .. } => *n,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Valuation::Additive(_) => "additive",
            Valuation::Graph(_) => "graph",
            Valuation::Table { .. } => "table",
        }
    }

    /// Exact `f(S)`.
    pub fn value(&self, s: ActionSet) -> Rational {
        debug_assert!(s.within(self.n()));
        match self {
            Valuation::Additive(w) => s.iter().fold(Rational::zero(), |acc, i| acc + &w[i]),
            Valuation::Graph(g) => {
                let e_max = g.e_max();
                if e_max == 0 {
                    Rational::zero()
                } else {
                    Rational::new((g.edges_in(s) as u64).into(), e_max.into())
                }
            }
            Valuation::Table { values, .. } => values[s.bits() as usize].clone(),
        }
    }

    /// `f(i | S) = f(S + i) - f(S)` for `i` outside `S`.
    pub fn marginal(&self, i: usize, s: ActionSet) -> Rational {
        debug_assert!(!s.contains(i), "marginal is defined for i outside S");
        match self {
            Valuation::Additive(w) => w[i].clone(),
            Valuation::Graph(g) => {
                let e_max = g.e_max();
                if e_max == 0 {
                    Rational::zero()
                } else {
                    Rational::new((g.degree_in(i, s) as u64).into(), e_max.into())
                }
            }
            Valuation::Table { .. } => self.value(s.with(i)) - self.value(s),
        }
    }

    fn enumerate_values(&self) -> Vec<Rational> {
        (0..1u128 << self.n())
            .map(|bits| self.value(ActionSet::from_bits(bits)))
            .collect()
    }

    /// Increasing marginal returns: `f(i|S) <= f(i|T)` whenever `S ⊆ T`, `i ∉ T`.
    ///
    /// Checked through the equivalent local exchange condition
    /// `f(S+i) + f(S+j) <= f(S+i+j) + f(S)` over all `S` and `i ≠ j` outside `S`.
    /// Additive and graph valuations above the enumeration limit are
    /// supermodular by construction.
    pub fn is_supermodular(&self) -> Result<bool> {
        let n = self.n();
        if n > MAX_ENUMERATION_N {
            return match self {
                Valuation::Additive(_) | Valuation::Graph(_) => Ok(true),
                Valuation::Table { .. } => Err(Error::Size {
                    what: "supermodularity check",
                    n,
                    limit: MAX_ENUMERATION_N,
                }),
            };
        }
        let values = self.enumerate_values();
        for s in 0..1usize << n {
            for i in (0..n).filter(|i| s >> i & 1 == 0) {
                for j in (i + 1..n).filter(|j| s >> j & 1 == 0) {
                    let lhs = &values[s | 1 << i] + &values[s | 1 << j];
                    let rhs = &values[s | 1 << i | 1 << j] + &values[s];
                    if lhs > rhs {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    /// `f(∅) = 0`, `f(S) <= 1` and `T ⊆ S ⇒ f(T) <= f(S)`.
    pub fn is_monotone_normalized(&self) -> Result<bool> {
        let n = self.n();
        match self {
            Valuation::Graph(_) => return Ok(true),
            Valuation::Additive(w) => {
                let total = w.iter().fold(Rational::zero(), |acc, x| acc + x);
                return Ok(w.iter().all(|x| !x.is_negative()) && total <= Rational::one());
            }
            Valuation::Table { .. } => ensure_size("monotonicity check", n, MAX_ENUMERATION_N)?,
        }
        let values = self.enumerate_values();
        if !values[0].is_zero() {
            return Ok(false);
        }
        let one = int(1);
        for s in 0..1usize << n {
            if values[s] > one {
                return Ok(false);
            }
            for i in (0..n).filter(|i| s >> i & 1 == 0) {
                if values[s | 1 << i] < values[s] {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use proptest::prelude::*;

    fn set(xs: &[usize]) -> ActionSet {
        xs.iter().copied().collect()
    }

    fn c4() -> Valuation {
        Valuation::graph(Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap())
    }

    #[test]
    fn graph_values() {
        let tri = Valuation::graph(Graph::complete(3).unwrap());
        assert_eq!(tri.value(set(&[0, 1, 2])), int(1));
        assert_eq!(tri.value(ActionSet::EMPTY), int(0));
        assert_eq!(c4().value(set(&[0, 1, 2])), rat(2, 6));
    }

    #[test]
    fn graph_marginals() {
        let tri = Valuation::graph(Graph::complete(3).unwrap());
        assert_eq!(tri.marginal(2, set(&[0, 1])), rat(2, 3));
        assert_eq!(c4().marginal(3, set(&[0, 1, 2])), rat(2, 6));
        let add = Valuation::additive(vec![rat(1, 4), rat(1, 2)]).unwrap();
        assert_eq!(add.marginal(1, ActionSet::EMPTY), rat(1, 2));
    }

    #[test]
    fn supermodularity_checks() {
        assert!(c4().is_supermodular().unwrap());
        let add = Valuation::additive(vec![rat(1, 2), rat(1, 4), rat(1, 4)]).unwrap();
        assert!(add.is_supermodular().unwrap());

        // Coverage of {a,b,c} by A0={a,b}, A1={b,c}, A2={c}: element overlap makes
        // marginals shrink, e.g. f(2|∅) = 1/3 > f(2|{1}) = 0.
        let cover = [0b011u8, 0b110, 0b100];
        let coverage = Valuation::table_from_fn(3, |s| {
            let covered = s.iter().fold(0u8, |acc, i| acc | cover[i]);
            rat(covered.count_ones() as i64, 3)
        })
        .unwrap();
        assert!(!coverage.is_supermodular().unwrap());
        assert!(coverage.is_monotone_normalized().unwrap());
    }

    #[test]
    fn monotone_normalized_checks() {
        assert!(c4().is_monotone_normalized().unwrap());
        let shifted = Valuation::table(1, vec![rat(1, 2), int(1)]).unwrap();
        assert!(!shifted.is_monotone_normalized().unwrap());
        // f({1}) = 1/2 > f({1,2}) = 1/4 with actions 1, 2 at bits 0, 1.
        let decreasing = Valuation::table(2, vec![int(0), rat(1, 2), int(0), rat(1, 4)]).unwrap();
        assert!(!decreasing.is_monotone_normalized().unwrap());
    }

    #[test]
    fn table_guards() {
        assert!(matches!(
            Valuation::table(17, vec![]),
            Err(Error::Size { .. })
        ));
        assert!(Valuation::table(2, vec![int(0)]).is_err());
    }

    fn random_graph(n: usize, bits: &[bool]) -> Graph {
        let mut g = Graph::empty(n).unwrap();
        let mut k = 0;
        for u in 0..n {
            for v in u + 1..n {
                if bits[k % bits.len()] {
                    g.try_add_edge(u, v).unwrap();
                }
                k += 1;
            }
        }
        g
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn graph_marginal_scales_to_degree(
            n in 2usize..=10,
            bits in proptest::collection::vec(any::<bool>(), 45),
            s_bits in any::<u16>(),
            i in 0usize..10,
        ) {
            let g = random_graph(n, &bits);
            let i = i % n;
            let s = ActionSet::from_bits(s_bits as u128).intersection(ActionSet::full(n)).without(i);
            let v = Valuation::graph(g.clone());
            let m = v.marginal(i, s);
            prop_assert_eq!(m.clone() * int(g.e_max() as i64), int(g.degree_in(i, s) as i64));
            prop_assert_eq!(v.value(s.with(i)) - v.value(s), m);
        }

        #[test]
        fn graph_valuations_are_supermodular(
            n in 1usize..=10,
            bits in proptest::collection::vec(any::<bool>(), 45),
        ) {
            let v = Valuation::graph(random_graph(n, &bits));
            prop_assert!(v.is_supermodular().unwrap());
        }

        #[test]
        fn additive_value_matches_streamed_sum(
            weights in proptest::collection::vec(1i64..20, 1..8),
            s_bits in any::<u8>(),
        ) {
            let n = weights.len();
            let w: Vec<Rational> = weights.iter().map(|&x| rat(x, 200)).collect();
            let v = Valuation::additive(w.clone()).unwrap();
            let s = ActionSet::from_bits(s_bits as u128).intersection(ActionSet::full(n));
            let mut streamed = Rational::zero();
            let mut acc = ActionSet::EMPTY;
            for i in s.iter() {
                streamed += v.marginal(i, acc);
                acc.insert(i);
            }
            prop_assert_eq!(v.value(s), streamed);
        }
    }
}
