//! Instance generators: the k-clique hardness reduction, the densest-k
//! counterexample, the almost-clique reduction, and random graphs.
//!
//! All costs are emitted in the reparameterized convention; where a
//! construction is naturally stated with absolute costs the conversion
//! factor `E_max` is recorded in the metadata.

use num_bigint::BigInt;
use num_traits::{One, Signed};
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::action_set::ActionSet;
use crate::error::{ensure_size, Error, Result};
use crate::graph::Graph;
use crate::multiagent::{mu_p, GraphInstance, Utility};
use crate::rational::{int, rat, Rational};

/// Enumeration guard for [`has_k_clique`] and [`densest_k_bruteforce`].
pub const MAX_ENUMERATION_N: usize = 26;

/// Construction parameters and analytic targets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "provenance", rename_all = "kebab-case")]
pub enum Metadata {
    KcliqueReduction {
        k: usize,
        /// Absolute cost = reparameterized cost / this factor.
        cost_conversion_factor: u64,
        /// `k / (2·E_max·(k-1))`: the utility of any `k`-clique.
        #[serde(with = "crate::rational::serde_str")]
        clique_utility: Rational,
    },
    Example1 {
        n: usize,
        /// The complete bipartite block.
        bipartite: ActionSet,
        clique: ActionSet,
        pendants: ActionSet,
        #[serde(with = "crate::rational::serde_str")]
        bipartite_utility: Rational,
        #[serde(with = "crate::rational::serde_str")]
        bipartite_lower_bound: Rational,
        /// Closed-form densest-k utility estimates, indexed by `k = 0..=n`.
        regime_estimates: Vec<f64>,
    },
    Lsac {
        #[serde(with = "crate::rational::serde_str")]
        epsilon: Rational,
        #[serde(with = "crate::rational::serde_str")]
        delta: Rational,
        cost_conversion_factor: u64,
        clique_size: usize,
        /// `f(K)` for a clique of `clique_size` nodes.
        #[serde(with = "crate::rational::serde_str")]
        clique_value: Rational,
        /// Exact `μ_p(K) = (ε·s - 1)/(s - 1) · f(K)`.
        #[serde(with = "crate::rational::serde_str")]
        clique_utility: Rational,
        /// `ε·f(K)`, approached by `clique_utility` as the clique grows.
        #[serde(with = "crate::rational::serde_str")]
        positive_case_bound: Rational,
        /// `ε(1-ε)·f(K)`.
        #[serde(with = "crate::rational::serde_str")]
        negative_case_bound: Rational,
    },
    Gnp {
        p: f64,
        seed: u64,
    },
    PlantedClique {
        p: f64,
        seed: u64,
        clique: ActionSet,
        #[serde(with = "crate::rational::serde_str")]
        clique_utility: Rational,
    },
}

impl Metadata {
    pub fn provenance(&self) -> &'static str {
        match self {
            Metadata::KcliqueReduction { .. } => "kclique-reduction",
            Metadata::Example1 { .. } => "example1",
            Metadata::Lsac { .. } => "lsac",
            Metadata::Gnp { .. } => "gnp",
            Metadata::PlantedClique { .. } => "planted-clique",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeneratedInstance {
    pub instance: GraphInstance,
    pub metadata: Metadata,
}

fn clique_mu(instance: &GraphInstance, s: ActionSet) -> Rational {
    match mu_p(instance, s).mu {
        Utility::Finite(r) => r,
        // Cliques of one node; only reachable with degenerate parameters.
        Utility::NegInfinity => int(0),
    }
}

impl GeneratedInstance {
    /// Recomputes every stored target from the graph and parameters.
    pub fn verify_metadata(&self) -> bool {
        let g = &self.instance;
        let e_max = g.graph().e_max();
        match &self.metadata {
            Metadata::KcliqueReduction { k, cost_conversion_factor, clique_utility } => {
                *cost_conversion_factor == e_max
                    && g.cost() == &kclique_cost(*k)
                    && clique_utility == &kclique_target(*k, e_max)
            }
            Metadata::Example1 { n, bipartite, bipartite_utility, regime_estimates, .. } => {
                g.n() == *n
                    && &clique_mu(g, *bipartite) == bipartite_utility
                    && regime_estimates == &example1_estimates(*n)
            }
            Metadata::Lsac { epsilon, clique_size, clique_utility, clique_value, .. } => {
                g.cost() == &(int(1) - epsilon)
                    && clique_value == &clique_fraction(*clique_size, e_max)
                    && clique_utility == &lsac_clique_utility(epsilon, *clique_size, e_max)
            }
            Metadata::Gnp { p, seed } => gnp_graph(g.n(), *p, *seed).is_ok_and(|graph| &graph == g.graph()),
            Metadata::PlantedClique { clique, clique_utility, .. } => {
                g.graph().is_clique(*clique) && &clique_mu(g, *clique) == clique_utility
            }
        }
    }
}

/// `(k-2)/(k-1)`.
pub fn kclique_cost(k: usize) -> Rational {
    rat(k as i64 - 2, k as i64 - 1)
}

/// `k / (2·E_max·(k-1))`.
pub fn kclique_target(k: usize, e_max: u64) -> Rational {
    Rational::new(BigInt::from(k), BigInt::from(2 * e_max) * BigInt::from(k - 1))
}

/// The base graph with cost `(k-2)/(k-1)`: a `k`-clique earns exactly
/// [`kclique_target`], while without a `k`-clique no set earns more than 0.
pub fn gen_kclique_reduction(base: Graph, k: usize) -> Result<GeneratedInstance> {
    if k < 3 {
        return Err(Error::InvalidParameter(format!("clique size {k} must be at least 3")));
    }
    let e_max = base.e_max();
    let instance = GraphInstance::new(base, kclique_cost(k))?;
    Ok(GeneratedInstance {
        instance,
        metadata: Metadata::KcliqueReduction {
            k,
            cost_conversion_factor: e_max,
            clique_utility: kclique_target(k, e_max),
        },
    })
}

/// Closed-form utility of the densest `δn`-subgraph in the two-component
/// counterexample, with edge counts normalized by `n²/2`.
pub fn example1_regime_utility(delta: f64) -> f64 {
    let d = delta;
    if d <= 1.0 / 6.0 {
        0.75 * d * d
    } else if d <= 0.5 {
        (-432.0 * d.powi(3) + 396.0 * d * d - 42.0 * d + 1.0) / (864.0 * d)
    } else if d < 2.0 / 3.0 {
        -(36.0 * d * d - 36.0 * d + 19.0) / 864.0
    } else {
        (-36.0 * d * d + 54.0 * d - 19.0) * (24.0 * d - 5.0) / (864.0 * (2.0 * d - 1.0))
    }
}

fn example1_estimates(n: usize) -> Vec<f64> {
    (0..=n).map(|k| example1_regime_utility(k as f64 / n as f64)).collect()
}

/// Two components on `n` nodes (`n` a multiple of 12), cost `1/4`:
/// nodes `0..n/6` form a clique `H`, nodes `n/6..n/2` (`P`) are each joined
/// to all of `H`, and nodes `n/2..n` form `K_{n/4,n/4}`. The bipartite block
/// earns at least `1/16` while no densest-`k` subgraph does.
pub fn gen_example1(n: usize) -> Result<GeneratedInstance> {
    if n == 0 || !n.is_multiple_of(12) {
        return Err(Error::InvalidParameter(format!("node count {n} must be a positive multiple of 12")));
    }
    let mut graph = Graph::empty(n)?;
    let (h, half, quarter) = (n / 6, n / 2, n / 4);
    for u in 0..h {
        for v in u + 1..half {
            graph.add_edge_unchecked(u, v);
        }
    }
    for u in half..half + quarter {
        for v in half + quarter..n {
            graph.add_edge_unchecked(u, v);
        }
    }
    let clique: ActionSet = (0..h).collect();
    let pendants: ActionSet = (h..half).collect();
    let bipartite: ActionSet = (half..n).collect();
    let instance = GraphInstance::new(graph, rat(1, 4))?;
    let bipartite_utility = clique_mu(&instance, bipartite);
    Ok(GeneratedInstance {
        instance,
        metadata: Metadata::Example1 {
            n,
            bipartite,
            clique,
            pendants,
            bipartite_utility,
            bipartite_lower_bound: rat(1, 16),
            regime_estimates: example1_estimates(n),
        },
    })
}

fn clique_fraction(s: usize, e_max: u64) -> Rational {
    if e_max == 0 {
        return int(0);
    }
    Rational::new(BigInt::from(s * s.saturating_sub(1) / 2), BigInt::from(e_max))
}

/// `μ_p(K) = (1 - (1-ε)·s/(s-1))·f(K)` for an `s`-clique at cost `1 - ε`.
pub fn lsac_clique_utility(epsilon: &Rational, s: usize, e_max: u64) -> Rational {
    if s < 2 {
        return int(0);
    }
    let s_r = Rational::from_integer(BigInt::from(s));
    let left = int(1) - (int(1) - epsilon) * &s_r / (&s_r - int(1));
    left * clique_fraction(s, e_max)
}

/// The base graph with cost `1 - ε`. Metadata describes a hypothetical
/// clique on `⌈δn⌉` nodes.
pub fn gen_lsac(base: Graph, epsilon: Rational, delta: Rational) -> Result<GeneratedInstance> {
    if !epsilon.is_positive() || epsilon >= Rational::one() {
        return Err(Error::InvalidParameter(format!("epsilon {epsilon} outside (0, 1)")));
    }
    if !delta.is_positive() || delta > Rational::one() {
        return Err(Error::InvalidParameter(format!("delta {delta} outside (0, 1]")));
    }
    let n = base.n();
    let e_max = base.e_max();
    let size = (&delta * Rational::from_integer(BigInt::from(n))).ceil().to_integer();
    let clique_size: usize = size.try_into().map_err(|_| Error::Internal("clique size".into()))?;
    let clique_value = clique_fraction(clique_size, e_max);
    let instance = GraphInstance::new(base, int(1) - &epsilon)?;
    Ok(GeneratedInstance {
        instance,
        metadata: Metadata::Lsac {
            clique_utility: lsac_clique_utility(&epsilon, clique_size, e_max),
            positive_case_bound: &epsilon * &clique_value,
            negative_case_bound: &epsilon * (int(1) - &epsilon) * &clique_value,
            epsilon,
            delta,
            cost_conversion_factor: e_max,
            clique_size,
            clique_value,
        },
    })
}

fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("edge probability {p} outside [0, 1]")))
    }
}

fn add_random_edges(graph: &mut Graph, p: f64, rng: &mut ChaCha8Rng) {
    let n = graph.n();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen::<f64>() < p && !graph.has_edge(u, v) {
                graph.add_edge_unchecked(u, v);
            }
        }
    }
}

fn gnp_graph(n: usize, p: f64, seed: u64) -> Result<Graph> {
    check_probability(p)?;
    let mut graph = Graph::empty(n)?;
    add_random_edges(&mut graph, p, &mut ChaCha8Rng::seed_from_u64(seed));
    Ok(graph)
}

/// Erdős–Rényi `G(n, p)`; pairs are visited in `(u, v)`, `u < v` order.
pub fn gen_gnp(n: usize, p: f64, seed: u64, cost: Rational) -> Result<GeneratedInstance> {
    let graph = gnp_graph(n, p, seed)?;
    Ok(GeneratedInstance {
        instance: GraphInstance::new(graph, cost)?,
        metadata: Metadata::Gnp { p, seed },
    })
}

/// A clique on a seeded random subset of `clique_size` nodes over a
/// `G(n, p)` background.
pub fn gen_planted(
    n: usize,
    clique_size: usize,
    p: f64,
    seed: u64,
    cost: Rational,
) -> Result<GeneratedInstance> {
    check_probability(p)?;
    if clique_size > n {
        return Err(Error::InvalidParameter(format!("clique size {clique_size} exceeds {n} nodes")));
    }
    let mut graph = Graph::empty(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let clique: ActionSet = index::sample(&mut rng, n, clique_size).into_iter().collect();
    for u in clique.iter() {
        for v in clique.iter().filter(|&v| v > u) {
            graph.add_edge_unchecked(u, v);
        }
    }
    add_random_edges(&mut graph, p, &mut rng);
    let instance = GraphInstance::new(graph, cost)?;
    let clique_utility = clique_mu(&instance, clique);
    Ok(GeneratedInstance {
        instance,
        metadata: Metadata::PlantedClique { p, seed, clique, clique_utility },
    })
}

/// Complete `r`-partite graph on `n` nodes with balanced parts (`v mod r`);
/// the densest graph without an `(r+1)`-clique.
pub fn turan_graph(n: usize, r: usize) -> Result<Graph> {
    if r == 0 {
        return Err(Error::InvalidParameter("Turán graph needs at least one part".into()));
    }
    let mut graph = Graph::empty(n)?;
    for u in 0..n {
        for v in u + 1..n {
            if u % r != v % r {
                graph.add_edge_unchecked(u, v);
            }
        }
    }
    Ok(graph)
}

fn extend_clique(graph: &Graph, candidates: ActionSet, need: usize) -> bool {
    if need == 0 {
        return true;
    }
    if candidates.len() < need {
        return false;
    }
    let mut rest = candidates;
    for v in candidates.iter() {
        rest.remove(v);
        if extend_clique(graph, rest.intersection(graph.neighbors(v)), need - 1) {
            return true;
        }
        if rest.len() < need {
            break;
        }
    }
    false
}

pub fn has_k_clique(graph: &Graph, k: usize) -> Result<bool> {
    ensure_size("clique search", graph.n(), MAX_ENUMERATION_N)?;
    Ok(extend_clique(graph, graph.vertices(), k))
}

/// Next integer with the same popcount.
fn next_combination(x: u128) -> u128 {
    let c = x & x.wrapping_neg();
    let r = x + c;
    (((r ^ x) >> 2) / c) | r
}

/// A `k`-subset with the most induced edges; ties go to the smallest bitmask.
pub fn densest_k_bruteforce(graph: &Graph, k: usize) -> Result<ActionSet> {
    let n = graph.n();
    ensure_size("densest-k enumeration", n, MAX_ENUMERATION_N)?;
    if k > n {
        return Err(Error::InvalidParameter(format!("k = {k} exceeds {n} nodes")));
    }
    if k == 0 {
        return Ok(ActionSet::EMPTY);
    }
    let limit = 1u128 << n;
    let mut bits = (1u128 << k) - 1;
    let mut best = (graph.edges_in(ActionSet::from_bits(bits)), bits);
    while bits < limit {
        let edges = graph.edges_in(ActionSet::from_bits(bits));
        if edges > best.0 {
            best = (edges, bits);
        }
        bits = next_combination(bits);
    }
    Ok(ActionSet::from_bits(best.1))
}
