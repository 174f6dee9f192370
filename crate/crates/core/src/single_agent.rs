//! Single-agent linear contracts: breakpoint enumeration and the optimal contract.
//!
//! The agent's utility `max_S t·f(S) - c(S)` is convex piecewise linear in
//! the contract `t`. A breakpoint is the smallest contract at which a set
//! becomes the agent's best response; the principal's optimum is always at
//! one of them.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::action_set::ActionSet;
use crate::error::{ensure_size, Error, Result};
use crate::oracles::{agent_oracle, DemandOracle, OracleStats};
use crate::rational::{int, Rational};
use crate::valuations::Valuation;

pub const MAX_BRUTEFORCE_CURVE_N: usize = 12;

#[derive(Clone, Debug, PartialEq)]
pub struct SingleAgentInstance {
    valuation: Valuation,
    costs: Vec<Rational>,
}

impl SingleAgentInstance {
    /// Costs must be strictly positive, one per action.
    pub fn new(valuation: Valuation, costs: Vec<Rational>) -> Result<Self> {
        if costs.len() != valuation.n() {
            return Err(Error::InvalidParameter(format!(
                "{} costs for {} actions",
                costs.len(),
                valuation.n()
            )));
        }
        if let Some(i) = costs.iter().position(|c| !c.is_positive()) {
            return Err(Error::InvalidParameter(format!(
                "cost of action {i} must be positive"
            )));
        }
        Ok(SingleAgentInstance { valuation, costs })
    }

    pub fn valuation(&self) -> &Valuation {
        &self.valuation
    }

    pub fn costs(&self) -> &[Rational] {
        &self.costs
    }

    pub fn n(&self) -> usize {
        self.costs.len()
    }

    pub fn cost_of(&self, s: ActionSet) -> Rational {
        s.iter().map(|i| &self.costs[i]).sum()
    }

    /// `μ_a(S, t) = t·f(S) - c(S)`.
    pub fn agent_utility(&self, s: ActionSet, t: &Rational) -> Rational {
        t * self.valuation.value(s) - self.cost_of(s)
    }
}

/// `μ_p(S, t) = (1 - t)·f(S)`.
pub fn principal_utility(v: &Valuation, s: ActionSet, t: &Rational) -> Rational {
    (int(1) - t) * v.value(s)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Breakpoint {
    #[serde(with = "crate::rational::serde_str")]
    pub t: Rational,
    pub set: ActionSet,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BreakpointCurve {
    pub n: usize,
    pub points: Vec<Breakpoint>,
}

impl BreakpointCurve {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// `IC(L, R) = (c(L) - c(R)) / (f(L) - f(R))`, the contract at which `L` and
/// `R` give the agent equal utility.
pub fn intersection_contract(
    l: ActionSet,
    r: ActionSet,
    v: &Valuation,
    costs: &[Rational],
) -> Result<Rational> {
    let (fl, fr) = (v.value(l), v.value(r));
    if fl == fr {
        return Err(Error::DegeneratePair {
            value: crate::rational::format_rational(&fl),
        });
    }
    let cost = |s: ActionSet| -> Rational { s.iter().map(|i| &costs[i]).sum() };
    Ok((cost(l) - cost(r)) / (fl - fr))
}

struct Demanded {
    set: ActionSet,
    value: Rational,
    cost: Rational,
}

struct Enumerator<'a> {
    instance: &'a SingleAgentInstance,
    oracle: &'a dyn DemandOracle,
    stats: &'a mut OracleStats,
    depth_limit: usize,
    found: Vec<Breakpoint>,
}

impl Enumerator<'_> {
    fn demanded_at(&mut self, t: &Rational) -> Demanded {
        let set = agent_oracle(self.oracle, &self.instance.costs, t, self.stats);
        self.stats.value_calls += 1;
        Demanded {
            value: self.instance.valuation.value(set),
            cost: self.instance.cost_of(set),
            set,
        }
    }

    /// Appends every breakpoint in `(κ_L, κ_R]`, in increasing order.
    fn between(&mut self, l: &Demanded, r: &Demanded, depth: usize) -> Result<()> {
        if depth > self.depth_limit {
            return Err(Error::Internal(format!(
                "breakpoint recursion exceeded depth {}",
                self.depth_limit
            )));
        }
        let t = (&l.cost - &r.cost) / (&l.value - &r.value);
        let s = self.demanded_at(&t);
        if s.value == r.value {
            self.found.push(Breakpoint { t, set: s.set });
            return Ok(());
        }
        if s.value <= l.value || s.value > r.value {
            return Err(Error::Internal(format!(
                "demand at IC({}, {}) returned {} outside the bracket",
                l.set, r.set, s.set
            )));
        }
        self.between(l, &s, depth + 1)?;
        self.between(&s, r, depth + 1)
    }
}

/// Enumerates all breakpoints in `[0, 1]` by recursive bisection on
/// intersection contracts, starting from `Φ(0) = ∅` and `Φ(1)`.
///
/// Uses at most `2·|curve| + 1` demand queries.
pub fn breakpoints(
    instance: &SingleAgentInstance,
    oracle: &dyn DemandOracle,
    stats: &mut OracleStats,
) -> Result<BreakpointCurve> {
    if oracle.ground_size() != instance.n() {
        return Err(Error::InvalidParameter(
            "oracle and instance disagree on the number of actions".into(),
        ));
    }
    if !instance.valuation.is_monotone_normalized()? {
        return Err(Error::InvalidParameter(
            "valuation must be monotone and normalized".into(),
        ));
    }
    let n = instance.n();
    let mut run = Enumerator {
        instance,
        oracle,
        stats,
        depth_limit: 4 * n + 4,
        found: vec![],
    };
    let low = run.demanded_at(&Rational::zero());
    let high = run.demanded_at(&Rational::one());
    let mut points = vec![Breakpoint {
        t: Rational::zero(),
        set: low.set,
    }];
    if high.value != low.value {
        run.between(&low, &high, 0)?;
        points.append(&mut run.found);
    }
    Ok(BreakpointCurve { n, points })
}

/// Reference curve: evaluates a brute-force best response at every pairwise
/// intersection contract in `(0, 1]`, at `1`, and between consecutive
/// candidates. Feasible for `n <= 12`.
pub fn bruteforce_breakpoints(instance: &SingleAgentInstance) -> Result<BreakpointCurve> {
    let n = instance.n();
    ensure_size("brute-force breakpoints", n, MAX_BRUTEFORCE_CURVE_N)?;
    let v = &instance.valuation;

    // Lines t ↦ t·f(S) - c(S). A line with another of at least the same value
    // and at most the same cost never wins for t > 0, so only the frontier is kept.
    let mut lines: Vec<(Rational, Rational, ActionSet)> = (0..1u128 << n)
        .map(ActionSet::from_bits)
        .map(|s| (v.value(s), instance.cost_of(s), s))
        .collect();
    lines.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.cmp(&b.1)).then_with(|| a.2.cmp(&b.2)));
    let mut frontier: Vec<(Rational, Rational, ActionSet)> = Vec::new();
    for line in lines {
        if frontier.last().is_none_or(|best| line.1 < best.1) {
            frontier.push(line);
        }
    }

    let best_response = |t: &Rational| -> ActionSet {
        if t.is_zero() {
            return ActionSet::EMPTY;
        }
        let mut best: Option<(Rational, &Rational, ActionSet)> = None;
        for (f, c, s) in &frontier {
            let u = t * f - c;
            let wins = match &best {
                None => true,
                Some((bu, bf, bs)) => {
                    u > *bu || (u == *bu && (f > *bf || (f == *bf && s < bs)))
                }
            };
            if wins {
                best = Some((u, f, *s));
            }
        }
        best.map(|b| b.2).unwrap_or_default()
    };

    let one = Rational::one();
    let mut candidates = vec![one.clone()];
    for (i, a) in frontier.iter().enumerate() {
        for b in &frontier[i + 1..] {
            let t = (&a.1 - &b.1) / (&a.0 - &b.0);
            if t.is_positive() && t <= one {
                candidates.push(t);
            }
        }
    }
    candidates.sort();
    candidates.dedup();

    let mut points = vec![Breakpoint {
        t: Rational::zero(),
        set: ActionSet::EMPTY,
    }];
    let mut previous_t = Rational::zero();
    for t in candidates {
        let midpoint = (&previous_t + &t) / int(2);
        let current = points.last().expect("nonempty").set;
        if best_response(&midpoint) != current {
            return Err(Error::Internal(format!(
                "best response changed strictly between candidates at t = {midpoint}"
            )));
        }
        let s = best_response(&t);
        if s != current {
            points.push(Breakpoint { t: t.clone(), set: s });
        }
        previous_t = t;
    }
    Ok(BreakpointCurve { n, points })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OptimalContract {
    #[serde(with = "crate::rational::serde_str")]
    pub t: Rational,
    pub set: ActionSet,
    #[serde(with = "crate::rational::serde_str")]
    pub utility: Rational,
}

/// Maximizes `(1 - t)·f(S)` over the breakpoints; ties go to the smaller contract.
pub fn optimal_contract(curve: &BreakpointCurve, v: &Valuation) -> OptimalContract {
    let mut best = OptimalContract {
        t: Rational::zero(),
        set: ActionSet::EMPTY,
        utility: Rational::zero(),
    };
    let mut seen = false;
    for p in &curve.points {
        let utility = principal_utility(v, p.set, &p.t);
        if !seen || utility > best.utility {
            best = OptimalContract {
                t: p.t.clone(),
                set: p.set,
                utility,
            };
            seen = true;
        }
    }
    best
}

/// True iff the demanded sets form a strictly increasing chain with at most
/// `n + 1` members.
pub fn verify_nested_chain(curve: &BreakpointCurve) -> bool {
    curve.points.len() <= curve.n + 1
        && curve
            .points
            .windows(2)
            .all(|w| w[0].set.is_strict_subset(w[1].set))
}

/// `max_S t·f(S) - c(S)` by enumeration.
pub fn agent_value_bruteforce(instance: &SingleAgentInstance, t: &Rational) -> Result<Rational> {
    ensure_size("agent utility", instance.n(), crate::oracles::MAX_BRUTEFORCE_DEMAND_N)?;
    Ok((0..1u128 << instance.n())
        .map(|bits| instance.agent_utility(ActionSet::from_bits(bits), t))
        .max()
        .expect("at least the empty set"))
}
