//! Seeded property suites over generated corpora, run by
//! `contractlab verify-properties`. Each property reports how many cases it
//! checked and how many violated it.

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::action_set::ActionSet;
use crate::error::Result;
use crate::generators::{gen_gnp, gen_kclique_reduction, gen_planted, has_k_clique, turan_graph, Metadata};
use crate::graph::Graph;
use crate::io::{instance_to_string, parse_instance, InstanceFile, Report};
use crate::multiagent::{bruteforce_optimum, k_core_peeling, mu_p, relaxed_left, GraphInstance, Utility};
use crate::oracles::{demand_bruteforce, demand_mincut, oracle_for, OracleStats, PriceVector};
use crate::ptas::{build_h, degree_estimates, good_sample_check, ptas_solve, sample_multiset, LpModel, PtasConfig};
use crate::rational::{int, rat, Rational};
use crate::single_agent::{breakpoints, bruteforce_breakpoints, verify_nested_chain, SingleAgentInstance};
use crate::valuations::Valuation;

/// Random instance families shared by the suites and the test harnesses.
pub mod corpus {
    use super::*;

    /// A positive rational with denominator at most 12.
    pub fn random_cost(rng: &mut impl Rng) -> Rational {
        let q = rng.gen_range(1..=12i64);
        rat(rng.gen_range(1..=q + q / 2), q)
    }

    pub fn random_costs(n: usize, rng: &mut impl Rng) -> Vec<Rational> {
        (0..n).map(|_| random_cost(rng)).collect()
    }

    /// Nonnegative weights summing to 1.
    pub fn random_additive(n: usize, rng: &mut impl Rng) -> Valuation {
        let raw: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=9)).collect();
        let total = raw.iter().sum::<i64>().max(1);
        Valuation::additive(raw.into_iter().map(|w| rat(w, total)).collect()).expect("n <= 128")
    }

    pub fn random_graph(n: usize, p: f64, rng: &mut impl Rng) -> Graph {
        let mut graph = Graph::empty(n).expect("n <= 128");
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen::<f64>() < p {
                    graph.try_add_edge(u, v).expect("fresh pair");
                }
            }
        }
        graph
    }

    /// Normalized sum of nonnegative singleton, pair and triple terms.
    pub fn random_supermodular_table(n: usize, rng: &mut impl Rng) -> Valuation {
        let mut terms: Vec<(u128, i64)> = Vec::new();
        for i in 0..n {
            terms.push((1 << i, rng.gen_range(0..=3)));
            for j in i + 1..n {
                if rng.gen_bool(0.4) {
                    terms.push((1 << i | 1 << j, rng.gen_range(1..=4)));
                }
                for k in j + 1..n {
                    if rng.gen_bool(0.08) {
                        terms.push((1 << i | 1 << j | 1 << k, rng.gen_range(1..=5)));
                    }
                }
            }
        }
        if n > 0 && terms.iter().all(|&(_, w)| w == 0) {
            terms.push((1, 1));
        }
        let raw = |s: ActionSet| -> i64 {
            terms.iter().filter(|(m, _)| m & s.bits() == *m).map(|(_, w)| w).sum()
        };
        let total = raw(ActionSet::full(n)).max(1);
        Valuation::table_from_fn(n, |s| rat(raw(s), total)).expect("n <= 16")
    }

    /// Additive, graph and table instances in rotation.
    pub fn random_single_agent(index: usize, max_n: usize, rng: &mut impl Rng) -> SingleAgentInstance {
        let n = rng.gen_range(1..=max_n);
        let valuation = match index % 3 {
            0 => random_additive(n, rng),
            1 => {
                let p = rng.gen_range(0.2..0.9);
                Valuation::graph(random_graph(n.max(2), p, rng))
            }
            _ => random_supermodular_table(n, rng),
        };
        let costs = random_costs(valuation.n(), rng);
        SingleAgentInstance::new(valuation, costs).expect("positive costs")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PropertyRow {
    pub suite: &'static str,
    pub property: &'static str,
    pub cases: u64,
    pub violations: u64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub seed: u64,
    pub max_n: usize,
    pub rows: Vec<PropertyRow>,
    pub all_passed: bool,
}

impl Report for VerificationReport {
    fn csv_header(&self) -> &'static [&'static str] {
        &["suite", "property", "cases", "violations", "passed"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| {
                vec![
                    r.suite.into(),
                    r.property.into(),
                    r.cases.to_string(),
                    r.violations.to_string(),
                    r.passed.to_string(),
                ]
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Largest instance size for enumeration-backed checks.
    pub max_n: usize,
    pub cases: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { seed: 0, max_n: 8, cases: 40 }
    }
}

struct Tally {
    suite: &'static str,
    property: &'static str,
    cases: u64,
    violations: u64,
}

impl Tally {
    fn new(suite: &'static str, property: &'static str) -> Self {
        Tally { suite, property, cases: 0, violations: 0 }
    }

    fn check(&mut self, ok: bool) {
        self.cases += 1;
        if !ok {
            self.violations += 1;
        }
    }

    fn row(self) -> PropertyRow {
        PropertyRow {
            suite: self.suite,
            property: self.property,
            cases: self.cases,
            violations: self.violations,
            passed: self.violations == 0,
        }
    }
}

fn valuation_suite(cfg: &VerifyConfig, rng: &mut ChaCha8Rng, rows: &mut Vec<PropertyRow>) -> Result<()> {
    let mut supermodular = Tally::new("valuations", "generated valuations are supermodular");
    let mut monotone = Tally::new("valuations", "generated valuations are monotone and normalized");
    for i in 0..cfg.cases {
        let v = corpus::random_single_agent(i, cfg.max_n, rng).valuation().clone();
        supermodular.check(v.is_supermodular()?);
        monotone.check(v.is_monotone_normalized()?);
    }
    rows.extend([supermodular.row(), monotone.row()]);
    Ok(())
}

fn oracle_suite(cfg: &VerifyConfig, rng: &mut ChaCha8Rng, rows: &mut Vec<PropertyRow>) -> Result<()> {
    let mut agree = Tally::new("oracles", "min-cut demand equals brute-force demand");
    for _ in 0..cfg.cases {
        let n = rng.gen_range(2..=cfg.max_n.max(2));
        let graph = corpus::random_graph(n, rng.gen_range(0.2..0.9), rng);
        let costs = corpus::random_costs(n, rng);
        let t = rat(rng.gen_range(1..=12), 12);
        let v = Valuation::graph(graph.clone());
        let expected = demand_bruteforce(&v, &PriceVector::from_contract(&costs, &t))?;
        agree.check(demand_mincut(&graph, &t, &costs) == expected);
    }
    rows.push(agree.row());
    Ok(())
}

fn single_agent_suite(cfg: &VerifyConfig, rng: &mut ChaCha8Rng, rows: &mut Vec<PropertyRow>) -> Result<()> {
    let mut equal = Tally::new("single_agent", "breakpoints equal the brute-force curve");
    let mut bound = Tally::new("single_agent", "demand queries <= 2|curve| + 1");
    let mut nested = Tally::new("single_agent", "supermodular curves are nested chains");
    for i in 0..cfg.cases {
        let instance = corpus::random_single_agent(i, cfg.max_n, rng);
        let oracle = oracle_for(instance.valuation())?;
        let mut stats = OracleStats::default();
        let curve = breakpoints(&instance, oracle.as_ref(), &mut stats)?;
        equal.check(curve == bruteforce_breakpoints(&instance)?);
        bound.check(stats.demand_calls <= 2 * curve.len() as u64 + 1);
        nested.check(verify_nested_chain(&curve));
    }
    rows.extend([equal.row(), bound.row(), nested.row()]);
    Ok(())
}

fn multiagent_suite(cfg: &VerifyConfig, rng: &mut ChaCha8Rng, rows: &mut Vec<PropertyRow>) -> Result<()> {
    let mut bounded = Tally::new("multiagent_core", "mu_p <= |E(S)|/E_max and L <= relaxed L");
    let mut peel = Tally::new("multiagent_core", "peeling never lowers the relaxed L");
    let mut loss = Tally::new("multiagent_core", "coring loses at most k|S| edges");
    let mut small = Tally::new("multiagent_core", "sets below eps*n earn less than eps");
    for _ in 0..cfg.cases {
        let n = rng.gen_range(2..=3 * cfg.max_n);
        let graph = corpus::random_graph(n, rng.gen_range(0.1..0.9), rng);
        let g = GraphInstance::new(graph, rat(rng.gen_range(0..20), 20))?;
        let s = ActionSet::from_bits(rng.gen::<u128>() & ActionSet::full(n).bits());
        let b = mu_p(&g, s);
        bounded.check(match (&b.left, &b.mu) {
            (Utility::Finite(l), Utility::Finite(mu)) => mu <= &b.right && *l <= relaxed_left(&g, s),
            _ => true,
        });
        let k = rng.gen_range(0..=n / 2);
        let trace = k_core_peeling(g.graph(), s, k);
        let mut current = s;
        let mut ok = true;
        for &v in &trace.removed {
            let before = relaxed_left(&g, current);
            current.remove(v);
            ok &= relaxed_left(&g, current) >= before;
        }
        peel.check(ok);
        loss.check(g.graph().edges_in(s) - g.graph().edges_in(trace.core) <= k * s.len());
        let eps = rat(rng.gen_range(1..10), 10);
        if int(s.len() as i64) < &eps * int(n as i64) {
            small.check(b.mu < Utility::Finite(eps));
        }
    }
    rows.extend([bounded.row(), peel.row(), loss.row(), small.row()]);
    Ok(())
}

fn generator_suite(cfg: &VerifyConfig, rng: &mut ChaCha8Rng, rows: &mut Vec<PropertyRow>) -> Result<()> {
    let mut dichotomy = Tally::new("generators", "k-clique reduction: optimum > 0 iff a k-clique exists");
    let mut turan = Tally::new("generators", "clique-free sets obey the Turan edge bound");
    let mut metadata = Tally::new("generators", "stored targets match recomputation");
    let limit = cfg.max_n.clamp(4, 12);
    for i in 0..cfg.cases {
        let n = rng.gen_range(4..=limit);
        let k = rng.gen_range(3..=4);
        let base = if i % 4 == 0 {
            turan_graph(n, k - 1)?
        } else {
            corpus::random_graph(n, rng.gen_range(0.3..0.8), rng)
        };
        let has = has_k_clique(&base, k)?;
        let generated = gen_kclique_reduction(base.clone(), k)?;
        metadata.check(generated.verify_metadata());
        let opt = bruteforce_optimum(&generated.instance)?;
        dichotomy.check(opt.mu.is_positive() == has && (has || opt.set.is_empty()));
        if !has {
            let mut ok = true;
            for bits in 0u128..1 << n {
                let s = ActionSet::from_bits(bits);
                let size = s.len() as i64;
                // |E(S)| <= ((k-2)/(k-1))·|S|²/2
                ok &= int(base.edges_in(s) as i64) * int(2 * (k as i64 - 1))
                    <= int((k as i64 - 2) * size * size);
            }
            turan.check(ok);
        }
    }
    let planted = gen_planted(40, 12, 0.1, rng.gen(), rat(1, 4))?;
    metadata.check(planted.verify_metadata());
    rows.extend([dichotomy.row(), turan.row(), metadata.row()]);
    Ok(())
}

fn ptas_suite(cfg: &VerifyConfig, rng: &mut ChaCha8Rng, rows: &mut Vec<PropertyRow>) -> Result<()> {
    let mut truth = Tally::new("ptas", "good samples make the core's indicator LP-feasible");
    let mut nonnegative = Tally::new("ptas", "returned utility is at least 0");
    let mut deterministic = Tally::new("ptas", "identical seeds give identical reports");
    let eps = 0.25;
    for _ in 0..cfg.cases.min(20) {
        let generated = gen_planted(60, 24, 0.05, rng.gen(), rat(1, 4))?;
        let Metadata::PlantedClique { clique, .. } = generated.metadata else { unreachable!() };
        let graph = generated.instance.graph();
        let members = clique.to_vec();
        let multiset: Vec<usize> = sample_multiset(members.len(), 40, rng).into_iter().map(|i| members[i]).collect();
        let estimates = degree_estimates(graph, &multiset, clique.len());
        let h = build_h(&estimates, graph.n(), eps);
        if good_sample_check(graph, clique, h, &estimates, eps) {
            let model = LpModel::build(graph, h, &estimates.d_hat, 0.25, eps, graph.edges_in(clique) as u64)?;
            truth.check(model.is_feasible(&model.indicator(clique)));
        }
    }
    for _ in 0..3 {
        let generated = gen_gnp(24, rng.gen_range(0.2..0.8), rng.gen(), rat(1, 5))?;
        let config = PtasConfig { reps: 8, ..PtasConfig::desk(24, 0.25, rng.gen()) };
        let a = ptas_solve(&generated.instance, &config)?;
        let b = ptas_solve(&generated.instance, &config)?;
        nonnegative.check(a.mu >= Utility::Finite(Rational::zero()));
        deterministic.check(a == b);
    }
    rows.extend([truth.row(), nonnegative.row(), deterministic.row()]);
    Ok(())
}

fn io_suite(cfg: &VerifyConfig, rng: &mut ChaCha8Rng, rows: &mut Vec<PropertyRow>) -> Result<()> {
    let mut round_trip = Tally::new("io", "instance files round-trip");
    for i in 0..cfg.cases {
        let file = if i % 2 == 0 {
            InstanceFile::from_single(&corpus::random_single_agent(i / 2, cfg.max_n, rng))
        } else {
            let n = rng.gen_range(0..=3 * cfg.max_n);
            let graph = corpus::random_graph(n, 0.4, rng);
            InstanceFile::from_graph(&GraphInstance::new(graph, rat(rng.gen_range(0..7), 7))?)
        };
        let back = parse_instance(&instance_to_string(&file)?)?;
        round_trip.check(back == file && back.to_instance()? == file.to_instance()?);
    }
    rows.push(round_trip.row());
    Ok(())
}

/// Runs every suite with its own seeded stream.
pub fn run_all(cfg: &VerifyConfig) -> Result<VerificationReport> {
    type Suite = fn(&VerifyConfig, &mut ChaCha8Rng, &mut Vec<PropertyRow>) -> Result<()>;
    let suites: [Suite; 7] = [
        valuation_suite,
        oracle_suite,
        single_agent_suite,
        multiagent_suite,
        generator_suite,
        ptas_suite,
        io_suite,
    ];
    let mut rows = Vec::new();
    for (stream, suite) in suites.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(stream as u64);
        suite(cfg, &mut rng, &mut rows)?;
    }
    let all_passed = rows.iter().all(|r| r.passed);
    Ok(VerificationReport { seed: cfg.seed, max_n: cfg.max_n, rows, all_passed })
}
