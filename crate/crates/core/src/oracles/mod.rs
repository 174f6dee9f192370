//! Demand and agent oracles.
//!
//! A demand oracle maps prices `p` to a set maximizing `f(S) - Σ_{i∈S} p_i`.
//! Both implementations here break ties the same way: among maximizers the
//! set with the largest `f(S)`, and among those the smallest bitmask.

mod maxflow;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::action_set::ActionSet;
use crate::error::{ensure_size, Result};
use crate::graph::Graph;
use crate::rational::{lcm_of_denominators, Rational};
use crate::valuations::Valuation;

use maxflow::FlowNetwork;

/// Largest ground set accepted by [`demand_bruteforce`].
pub const MAX_BRUTEFORCE_DEMAND_N: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Price {
    Finite(Rational),
    Infinite,
}

impl Price {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            Price::Finite(p) => Some(p),
            Price::Infinite => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PriceVector(pub Vec<Price>);

impl PriceVector {
    pub fn all_infinite(n: usize) -> Self {
        PriceVector(vec![Price::Infinite; n])
    }

    pub fn uniform(n: usize, price: Rational) -> Self {
        PriceVector(vec![Price::Finite(price); n])
    }

    /// Prices `c_i / t` seen by an agent under contract `t` (infinite at `t = 0`).
    pub fn from_contract(costs: &[Rational], t: &Rational) -> Self {
        if t.is_zero() {
            return PriceVector::all_infinite(costs.len());
        }
        PriceVector(costs.iter().map(|c| Price::Finite(c / t)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn affordable(&self) -> ActionSet {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, p)| matches!(p, Price::Finite(_)))
            .map(|(i, _)| i)
            .collect()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OracleStats {
    pub demand_calls: u64,
    pub value_calls: u64,
}

pub trait DemandOracle {
    fn ground_size(&self) -> usize;
    fn valuation(&self) -> &Valuation;
    fn demand(&self, prices: &PriceVector) -> ActionSet;
}

/// Exhaustive demand oracle over every subset of the affordable actions.
pub fn demand_bruteforce(v: &Valuation, prices: &PriceVector) -> Result<ActionSet> {
    ensure_size("brute-force demand", v.n(), MAX_BRUTEFORCE_DEMAND_N)?;
    assert_eq!(prices.len(), v.n(), "one price per action");
    let allowed: Vec<usize> = prices.affordable().iter().collect();
    let mut best: Option<(Rational, Rational, ActionSet)> = None;
    // Mapping the counter bits onto `allowed` preserves bitmask order.
    for counter in 0u64..1 << allowed.len() {
        let s: ActionSet = allowed
            .iter()
            .enumerate()
            .filter(|(k, _)| counter >> k & 1 == 1)
            .map(|(_, &i)| i)
            .collect();
        let value = v.value(s);
        let price: Rational = s
            .iter()
            .map(|i| prices.0[i].finite().expect("affordable"))
            .sum();
        let utility = &value - price;
        let better = match &best {
            None => true,
            Some((bu, bf, _)) => utility > *bu || (utility == *bu && value > *bf),
        };
        if better {
            best = Some((utility, value, s));
        }
    }
    Ok(best.map(|(_, _, s)| s).unwrap_or_default())
}

pub struct BruteForceDemand<'a> {
    valuation: &'a Valuation,
}

impl<'a> BruteForceDemand<'a> {
    pub fn new(valuation: &'a Valuation) -> Result<Self> {
        ensure_size("brute-force demand", valuation.n(), MAX_BRUTEFORCE_DEMAND_N)?;
        Ok(BruteForceDemand { valuation })
    }
}

impl DemandOracle for BruteForceDemand<'_> {
    fn ground_size(&self) -> usize {
        self.valuation.n()
    }

    fn valuation(&self) -> &Valuation {
        self.valuation
    }

    fn demand(&self, prices: &PriceVector) -> ActionSet {
        demand_bruteforce(self.valuation, prices).expect("size checked at construction")
    }
}

/// Maximum-closure demand oracle for graph-supermodular valuations.
///
/// One project node per edge earns `profit_per_edge` and requires both
/// endpoint nodes, each of which costs its price. The returned set is the
/// vertex part of the maximal source side of a minimum cut, which is the
/// largest maximizer; with positive prices it coincides with the brute-force
/// tie-break.
fn max_closure(graph: &Graph, profit_per_edge: &Rational, vertex_cost: &[Price]) -> ActionSet {
    let n = graph.n();
    let edges = graph.edges();
    if edges.is_empty() || !profit_per_edge.is_positive() {
        return ActionSet::EMPTY;
    }
    let finite_costs = vertex_cost.iter().filter_map(Price::finite);
    let scale = lcm_of_denominators(std::iter::once(profit_per_edge).chain(finite_costs));
    let to_int = |r: &Rational| -> BigInt { (r * Rational::from_integer(scale.clone())).to_integer() };

    let edge_cap = to_int(profit_per_edge);
    let vertex_caps: Vec<Option<BigInt>> = vertex_cost
        .iter()
        .map(|p| p.finite().map(to_int))
        .collect();
    let finite_total: BigInt = &edge_cap * BigInt::from(edges.len())
        + vertex_caps.iter().flatten().sum::<BigInt>();
    let unbounded: BigInt = finite_total + 1;

    let (source, sink) = (0, 1);
    let vertex_node = |v: usize| 2 + v;
    let edge_node = |e: usize| 2 + n + e;
    let mut net = FlowNetwork::new(2 + n + edges.len());
    for (e, &(u, v)) in edges.iter().enumerate() {
        net.add_arc(source, edge_node(e), edge_cap.clone());
        net.add_arc(edge_node(e), vertex_node(u), unbounded.clone());
        net.add_arc(edge_node(e), vertex_node(v), unbounded.clone());
    }
    for (v, cap) in vertex_caps.into_iter().enumerate() {
        let cap = cap.unwrap_or_else(|| unbounded.clone());
        if !cap.is_zero() {
            net.add_arc(vertex_node(v), sink, cap);
        }
    }
    net.max_flow(source, sink);
    let reaches_sink = net.can_reach_sink(sink);
    (0..n).filter(|&v| !reaches_sink[vertex_node(v)]).collect()
}

/// Agent best response `argmax t·f(S) - c(S)` for a graph-supermodular `f`,
/// computed by min cut. Requires `t > 0`.
pub fn demand_mincut(graph: &Graph, t: &Rational, costs: &[Rational]) -> ActionSet {
    assert!(t.is_positive(), "min-cut demand needs a positive contract");
    assert_eq!(costs.len(), graph.n(), "one cost per node");
    if graph.e_max() == 0 {
        return ActionSet::EMPTY;
    }
    let profit = t / Rational::from_integer(graph.e_max().into());
    let prices: Vec<Price> = costs.iter().cloned().map(Price::Finite).collect();
    max_closure(graph, &profit, &prices)
}

pub struct MinCutDemand<'a> {
    valuation: &'a Valuation,
    graph: &'a Graph,
}

impl<'a> MinCutDemand<'a> {
    /// `None` unless the valuation is graph-supermodular.
    pub fn new(valuation: &'a Valuation) -> Option<Self> {
        match valuation {
            Valuation::Graph(graph) => Some(MinCutDemand { valuation, graph }),
            _ => None,
        }
    }
}

impl DemandOracle for MinCutDemand<'_> {
    fn ground_size(&self) -> usize {
        self.graph.n()
    }

    fn valuation(&self) -> &Valuation {
        self.valuation
    }

    fn demand(&self, prices: &PriceVector) -> ActionSet {
        if self.graph.e_max() == 0 {
            return ActionSet::EMPTY;
        }
        let profit = Rational::new(1.into(), self.graph.e_max().into());
        max_closure(self.graph, &profit, &prices.0)
    }
}

/// Separable demand for additive valuations: take every action whose weight
/// covers its price, skipping zero-weight ties (they add no value).
pub struct AdditiveDemand<'a> {
    valuation: &'a Valuation,
    weights: &'a [Rational],
}

impl<'a> AdditiveDemand<'a> {
    /// `None` unless the valuation is additive.
    pub fn new(valuation: &'a Valuation) -> Option<Self> {
        match valuation {
            Valuation::Additive(weights) => Some(AdditiveDemand { valuation, weights }),
            _ => None,
        }
    }
}

impl DemandOracle for AdditiveDemand<'_> {
    fn ground_size(&self) -> usize {
        self.weights.len()
    }

    fn valuation(&self) -> &Valuation {
        self.valuation
    }

    fn demand(&self, prices: &PriceVector) -> ActionSet {
        self.weights
            .iter()
            .zip(&prices.0)
            .enumerate()
            .filter(|(_, (w, p))| match p {
                Price::Finite(p) => w.is_positive() && *w >= p,
                Price::Infinite => false,
            })
            .map(|(i, _)| i)
            .collect()
    }
}

/// The most specific exact oracle for `valuation`: min-cut for graphs, the
/// separable rule for additive weights, enumeration for tables.
pub fn oracle_for(valuation: &Valuation) -> Result<Box<dyn DemandOracle + Sync + '_>> {
    if let Some(o) = MinCutDemand::new(valuation) {
        return Ok(Box::new(o));
    }
    if let Some(o) = AdditiveDemand::new(valuation) {
        return Ok(Box::new(o));
    }
    Ok(Box::new(BruteForceDemand::new(valuation)?))
}

/// `Φ(t)`: the agent's best response to contract `t`, realized as a demand
/// query at prices `c_i / t`. Every call counts as one demand query.
pub fn agent_oracle(
    oracle: &dyn DemandOracle,
    costs: &[Rational],
    t: &Rational,
    stats: &mut OracleStats,
) -> ActionSet {
    assert!(!t.is_negative(), "contracts are nonnegative");
    stats.demand_calls += 1;
    if t.is_zero() {
        return ActionSet::EMPTY;
    }
    oracle.demand(&PriceVector::from_contract(costs, t))
}
