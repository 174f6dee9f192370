//! Uniform-cost graph-supermodular multi-agent contracts (U-GSC).
//!
//! Costs use the reparameterized convention: the `1/E_max` factor of each
//! agent's marginal reward is absorbed into the cost, so `c ∈ [0, 1)` and
//!
//! ```text
//! μ_p(S) = (1 - Σ_{i∈S} c / deg_S(i)) · |E(S)| / E_max
//! ```
//!
//! A selected node with no neighbour inside `S` needs an infinite payment;
//! such sets evaluate to [`Utility::NegInfinity`].

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::action_set::ActionSet;
use crate::error::{ensure_size, Error, Result};
use crate::graph::Graph;
use crate::rational::{int, to_f64, Rational};

pub const MAX_BRUTEFORCE_OPTIMUM_N: usize = 22;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphInstance {
    graph: Graph,
    cost: Rational,
}

impl GraphInstance {
    /// `cost` is the reparameterized uniform cost, `0 <= c < 1`.
    pub fn new(graph: Graph, cost: Rational) -> Result<Self> {
        if cost.is_negative() || cost >= Rational::one() {
            return Err(Error::InvalidParameter(format!(
                "reparameterized cost {cost} outside [0, 1)"
            )));
        }
        Ok(GraphInstance { graph, cost })
    }

    /// Converts an absolute per-agent cost `c_abs` to `c = c_abs · E_max`.
    pub fn from_absolute_cost(graph: Graph, absolute: &Rational) -> Result<Self> {
        let cost = absolute * Rational::from_integer(graph.e_max().into());
        GraphInstance::new(graph, cost)
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn cost(&self) -> &Rational {
        &self.cost
    }

    pub fn absolute_cost(&self) -> Rational {
        match self.graph.e_max() {
            0 => Rational::zero(),
            e => &self.cost / Rational::from_integer(e.into()),
        }
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }
}

/// An exact utility value, possibly `-∞`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Utility {
    NegInfinity,
    Finite(Rational),
}

impl Utility {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            Utility::Finite(r) => Some(r),
            Utility::NegInfinity => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Utility::Finite(r) => to_f64(r),
            Utility::NegInfinity => f64::NEG_INFINITY,
        }
    }
}

impl Ord for Utility {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Utility::NegInfinity, Utility::NegInfinity) => Ordering::Equal,
            (Utility::NegInfinity, _) => Ordering::Less,
            (_, Utility::NegInfinity) => Ordering::Greater,
            (Utility::Finite(a), Utility::Finite(b)) => a.cmp(b),
        }
    }
}

impl PartialOrd for Utility {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Serialize for Utility {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Utility::Finite(r) => s.serialize_str(&crate::rational::format_rational(r)),
            Utility::NegInfinity => s.serialize_str("-inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Utility {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        if text == "-inf" {
            return Ok(Utility::NegInfinity);
        }
        crate::rational::parse_rational(&text)
            .map(Utility::Finite)
            .map_err(serde::de::Error::custom)
    }
}

/// `L(S)`, `R(S)` and `μ_p(S) = L·R`, exact with float mirrors.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UtilityBreakdown {
    pub left: Utility,
    #[serde(with = "crate::rational::serde_str")]
    pub right: Rational,
    pub mu: Utility,
    pub finite: bool,
    pub left_f64: f64,
    pub right_f64: f64,
    pub mu_f64: f64,
}

pub fn mu_p(g: &GraphInstance, s: ActionSet) -> UtilityBreakdown {
    debug_assert!(s.within(g.n()));
    let graph = &g.graph;
    let e_max = graph.e_max();
    let right = if e_max == 0 {
        Rational::zero()
    } else {
        Rational::new((graph.edges_in(s) as u64).into(), e_max.into())
    };
    let isolated = s.iter().any(|v| graph.degree_in(v, s) == 0);
    let (left, mu) = if isolated {
        (Utility::NegInfinity, Utility::NegInfinity)
    } else {
        let inverse_degrees: Rational = s
            .iter()
            .map(|v| Rational::new(BigInt::one(), BigInt::from(graph.degree_in(v, s))))
            .sum();
        let left = Rational::one() - &g.cost * inverse_degrees;
        let mu = &left * &right;
        (Utility::Finite(left), Utility::Finite(mu))
    };
    UtilityBreakdown {
        left_f64: left.to_f64(),
        right_f64: to_f64(&right),
        mu_f64: mu.to_f64(),
        finite: !isolated,
        left,
        right,
        mu,
    }
}

/// Float evaluation of `μ_p(S)`; `-∞` when some selected node is isolated in `S`.
pub fn mu_p_f64(g: &GraphInstance, cost: f64, s: ActionSet) -> f64 {
    let graph = &g.graph;
    let mut inverse = 0.0;
    let mut degree_sum = 0usize;
    for v in s.iter() {
        let d = graph.degree_in(v, s);
        if d == 0 {
            return f64::NEG_INFINITY;
        }
        inverse += 1.0 / d as f64;
        degree_sum += d;
    }
    if s.is_empty() {
        return 0.0;
    }
    (1.0 - cost * inverse) * (degree_sum / 2) as f64 / graph.e_max() as f64
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Payment {
    Finite(Rational),
    Infinite,
}

/// Cheapest contract shares that make `S` an equilibrium: `t_i = c / deg_S(i)`
/// for `i ∈ S` (the reparameterized form of `c_i / f(i|S)`), infinite when
/// `deg_S(i) = 0`, and zero outside `S`. `1 - Σ t_i` is `L(S)`.
pub fn payments_for_set(g: &GraphInstance, s: ActionSet) -> Vec<Payment> {
    (0..g.n())
        .map(|i| {
            if !s.contains(i) {
                return Payment::Finite(Rational::zero());
            }
            match g.graph.degree_in(i, s) {
                0 => Payment::Infinite,
                d => Payment::Finite(&g.cost / Rational::from_integer(BigInt::from(d))),
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Optimum {
    pub set: ActionSet,
    #[serde(with = "crate::rational::serde_str")]
    pub mu: Rational,
}

fn lcm_up_to(m: usize) -> u64 {
    (1..=m as u64).fold(1u64, |acc, k| {
        let g = num_integer::gcd(acc, k);
        acc / g * k
    })
}

/// Exact `argmax_S μ_p(S)` over all `2^n` subsets (`n <= 22`).
/// Ties prefer the smaller set, then the smaller bitmask.
pub fn bruteforce_optimum(g: &GraphInstance) -> Result<Optimum> {
    let n = g.n();
    ensure_size("brute-force optimum", n, MAX_BRUTEFORCE_OPTIMUM_N)?;
    if g.graph.e_max() == 0 {
        return Ok(Optimum { set: ActionSet::EMPTY, mu: Rational::zero() });
    }
    let (p, q) = match (g.cost.numer().to_i64(), g.cost.denom().to_i64()) {
        (Some(p), Some(q)) => (p as i128, q as i128),
        _ => {
            return Err(Error::InvalidParameter(
                "cost numerator/denominator too large for exact brute force".into(),
            ))
        }
    };
    // μ_p(S) · (D·q·E_max) = (D·q - p·Σ D/deg) · |E(S)|, with D = lcm(1..n-1).
    let d = lcm_up_to(n - 1) as i128;
    let inverse: Vec<i128> = (0..n).map(|k| if k == 0 { 0 } else { d / k as i128 }).collect();
    let graph = &g.graph;
    let score = |bits: u128| -> Option<i128> {
        let s = ActionSet::from_bits(bits);
        let mut inv_sum = 0i128;
        let mut degree_sum = 0i128;
        for v in s.iter() {
            let deg = graph.degree_in(v, s);
            if deg == 0 {
                return None;
            }
            inv_sum += inverse[deg];
            degree_sum += deg as i128;
        }
        Some((d * q - p * inv_sum) * (degree_sum / 2))
    };
    // (score, size, bits): better = higher score, then smaller size, then smaller bits.
    let better = |a: &(i128, u32, u128), b: &(i128, u32, u128)| -> bool {
        a.0 > b.0 || (a.0 == b.0 && (a.1 < b.1 || (a.1 == b.1 && a.2 < b.2)))
    };
    let total = 1u128 << n;
    let chunk = (total / 64).max(1);
    let best = (0..total.div_ceil(chunk))
        .into_par_iter()
        .map(|c| {
            let mut best = (0i128, 0u32, 0u128);
            for bits in c * chunk..((c + 1) * chunk).min(total) {
                if let Some(sc) = score(bits) {
                    let cand = (sc, bits.count_ones(), bits);
                    if better(&cand, &best) {
                        best = cand;
                    }
                }
            }
            best
        })
        .reduce(|| (0i128, 0u32, 0u128), |a, b| if better(&b, &a) { b } else { a });
    let scale = BigInt::from(d) * BigInt::from(q) * BigInt::from(graph.e_max());
    Ok(Optimum {
        set: ActionSet::from_bits(best.2),
        mu: Rational::new(BigInt::from(best.0), scale),
    })
}

/// Result of minimum-degree peeling.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Peeling {
    pub core: ActionSet,
    /// Removed nodes in removal order.
    pub removed: Vec<usize>,
}

/// Repeatedly removes a minimum-degree node (smallest index on ties) while
/// some node of the remaining set has degree below `k`.
pub fn k_core_peeling(graph: &Graph, s: ActionSet, k: usize) -> Peeling {
    let mut current = s;
    let mut removed = Vec::new();
    loop {
        let min = current
            .iter()
            .map(|v| (graph.degree_in(v, current), v))
            .min();
        match min {
            Some((deg, v)) if deg < k => {
                current.remove(v);
                removed.push(v);
            }
            _ => break,
        }
    }
    Peeling { core: current, removed }
}

/// The `k`-core of the subgraph induced by `s`: the unique maximal `T ⊆ S`
/// with `deg_T(v) >= k` for all `v ∈ T`.
pub fn k_core(graph: &Graph, s: ActionSet, k: usize) -> ActionSet {
    k_core_peeling(graph, s, k).core
}

/// `𝓛(S) = 1 - Σ_{i∈S} c / (deg_S(i) + 1)`, an upper bound on `L(S)` that
/// never decreases along minimum-degree peeling.
pub fn relaxed_left(g: &GraphInstance, s: ActionSet) -> Rational {
    let sum: Rational = s
        .iter()
        .map(|v| Rational::new(BigInt::one(), BigInt::from(g.graph.degree_in(v, s) + 1)))
        .sum();
    int(1) - &g.cost * sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn set(xs: &[usize]) -> ActionSet {
        xs.iter().copied().collect()
    }

    fn triangle(cost: Rational) -> GraphInstance {
        GraphInstance::new(Graph::complete(3).unwrap(), cost).unwrap()
    }

    #[test]
    fn mu_examples() {
        let g = triangle(rat(3, 10));
        let empty = mu_p(&g, ActionSet::EMPTY);
        assert_eq!(empty.mu, Utility::Finite(int(0)));
        assert_eq!(empty.left, Utility::Finite(int(1)));
        assert!(empty.finite);

        let all = mu_p(&g, ActionSet::full(3));
        assert_eq!(all.left, Utility::Finite(rat(11, 20)));
        assert_eq!(all.right, int(1));
        assert_eq!(all.mu, Utility::Finite(rat(11, 20)));
        assert!((all.mu_f64 - 0.55).abs() < 1e-12);
        assert!((mu_p_f64(&g, 0.3, ActionSet::full(3)) - 0.55).abs() < 1e-12);

        let g = GraphInstance::new(Graph::from_edges(3, &[(0, 1)]).unwrap(), rat(1, 10)).unwrap();
        let b = mu_p(&g, ActionSet::full(3));
        assert!(!b.finite);
        assert_eq!(b.mu, Utility::NegInfinity);
        assert_eq!(b.mu_f64, f64::NEG_INFINITY);
        assert_eq!(mu_p_f64(&g, 0.1, ActionSet::full(3)), f64::NEG_INFINITY);
    }

    #[test]
    fn payments() {
        let g = triangle(rat(3, 10));
        let all = payments_for_set(&g, ActionSet::full(3));
        assert_eq!(all, vec![Payment::Finite(rat(3, 20)); 3]);
        let pair = payments_for_set(&g, set(&[0, 1]));
        assert_eq!(pair[2], Payment::Finite(int(0)));
        let lonely = GraphInstance::new(Graph::from_edges(3, &[(0, 1)]).unwrap(), rat(1, 10)).unwrap();
        assert_eq!(payments_for_set(&lonely, set(&[0, 2]))[2], Payment::Infinite);
    }

    #[test]
    fn payments_sum_to_one_minus_left() {
        let g = triangle(rat(3, 10));
        let total: Rational = payments_for_set(&g, ActionSet::full(3))
            .into_iter()
            .map(|p| match p {
                Payment::Finite(r) => r,
                Payment::Infinite => unreachable!(),
            })
            .sum();
        assert_eq!(Utility::Finite(int(1) - total), mu_p(&g, ActionSet::full(3)).left);
    }

    #[test]
    fn brute_force_examples() {
        let empty = GraphInstance::new(Graph::empty(5).unwrap(), rat(1, 2)).unwrap();
        assert_eq!(
            bruteforce_optimum(&empty).unwrap(),
            Optimum { set: ActionSet::EMPTY, mu: int(0) }
        );
        // K4 with absolute cost (1/6)(2/3) = 1/9, i.e. reparameterized 2/3.
        let k4 = GraphInstance::from_absolute_cost(Graph::complete(4).unwrap(), &rat(1, 9)).unwrap();
        assert_eq!(k4.cost(), &rat(2, 3));
        let opt = bruteforce_optimum(&k4).unwrap();
        assert_eq!(opt.set, ActionSet::full(4));
        assert_eq!(opt.mu, rat(1, 9));
        assert!(bruteforce_optimum(
            &GraphInstance::new(Graph::empty(23).unwrap(), int(0)).unwrap()
        )
        .is_err());
    }

    #[test]
    fn brute_force_matches_exact_scan() {
        // Bull graph plus a pendant; compare against a plain rational scan.
        let graph =
            Graph::from_edges(6, &[(0, 1), (1, 2), (0, 2), (2, 3), (1, 4), (3, 5), (4, 5)]).unwrap();
        let g = GraphInstance::new(graph, rat(1, 7)).unwrap();
        let mut best = (Utility::Finite(int(0)), 0usize, ActionSet::EMPTY);
        for bits in 0u128..64 {
            let s = ActionSet::from_bits(bits);
            let mu = mu_p(&g, s).mu;
            if mu > best.0 || (mu == best.0 && s.len() < best.1) {
                best = (mu, s.len(), s);
            }
        }
        let opt = bruteforce_optimum(&g).unwrap();
        assert_eq!(Utility::Finite(opt.mu), best.0);
        assert_eq!(opt.set, best.2);
    }

    #[test]
    fn k_core_examples() {
        let path = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        assert_eq!(k_core(&path, path.vertices(), 2), ActionSet::EMPTY);
        let tri = Graph::complete(3).unwrap();
        assert_eq!(k_core(&tri, tri.vertices(), 2), ActionSet::full(3));

        let mut k5_pendant = Graph::complete(5).unwrap().disjoint_union(&Graph::empty(1).unwrap()).unwrap();
        k5_pendant.try_add_edge(4, 5).unwrap();
        let peel = k_core_peeling(&k5_pendant, k5_pendant.vertices(), 3);
        assert_eq!(peel.core, ActionSet::full(5));
        assert_eq!(peel.removed, vec![5]);
        assert!(peel.core.iter().all(|v| k5_pendant.degree_in(v, peel.core) >= 3));
    }

    #[test]
    fn relaxed_left_examples() {
        let g = triangle(rat(3, 10));
        assert_eq!(relaxed_left(&g, ActionSet::EMPTY), int(1));
        assert_eq!(relaxed_left(&g, ActionSet::full(3)), rat(7, 10));
    }

    #[test]
    fn cost_range_is_validated() {
        assert!(GraphInstance::new(Graph::complete(3).unwrap(), int(1)).is_err());
        assert!(GraphInstance::new(Graph::complete(3).unwrap(), rat(-1, 2)).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn instance() -> impl Strategy<Value = GraphInstance> {
            (2usize..=10, any::<u64>(), 0u32..20).prop_map(|(n, mask, c)| {
                let mut graph = Graph::empty(n).unwrap();
                let mut bit = 0;
                for u in 0..n {
                    for v in u + 1..n {
                        if mask >> (bit % 64) & 1 == 1 {
                            graph.try_add_edge(u, v).unwrap();
                        }
                        bit += 1;
                    }
                }
                GraphInstance::new(graph, rat(c as i64, 20)).unwrap()
            })
        }

        proptest! {
            #[test]
            fn utility_bounded_by_edge_density(g in instance(), bits in any::<u128>()) {
                let s = ActionSet::from_bits(bits & ActionSet::full(g.n()).bits());
                let b = mu_p(&g, s);
                prop_assert!(b.right <= int(1));
                if let Utility::Finite(mu) = &b.mu {
                    prop_assert!(mu <= &b.right);
                    prop_assert!(b.left.finite().unwrap() <= &relaxed_left(&g, s));
                }
            }

            #[test]
            fn small_sets_have_small_utility(g in instance(), bits in any::<u128>(), eps in 1u32..10) {
                let s = ActionSet::from_bits(bits & ActionSet::full(g.n()).bits());
                let eps = rat(eps as i64, 10);
                if int(s.len() as i64) < &eps * int(g.n() as i64) {
                    prop_assert!(mu_p(&g, s).mu < Utility::Finite(eps));
                }
            }

            #[test]
            fn peeling_keeps_relaxed_left_and_bounds_edge_loss(
                g in instance(), bits in any::<u128>(), k in 0usize..6
            ) {
                let s = ActionSet::from_bits(bits & ActionSet::full(g.n()).bits());
                let peel = k_core_peeling(g.graph(), s, k);
                let mut current = s;
                let mut previous = relaxed_left(&g, current);
                for &v in &peel.removed {
                    current.remove(v);
                    let next = relaxed_left(&g, current);
                    prop_assert!(next >= previous);
                    previous = next;
                }
                prop_assert_eq!(current, peel.core);
                let loss = g.graph().edges_in(s) - g.graph().edges_in(peel.core);
                prop_assert!(loss <= k * s.len());
                prop_assert!(peel.core.iter().all(|v| g.graph().degree_in(v, peel.core) >= k));
            }
        }
    }
}
