//! Additive PTAS for U-GSC: sample a multiset, estimate degrees into the
//! unknown near-optimal core, keep the high-degree nodes `H`, solve the
//! surrogate LP for a grid of edge-count guesses and round.
//!
//! The constants that make the guarantee hold (`n^Θ(log(1/ε)/ε⁴)`
//! repetitions, `Θ(ln n/ε⁴)` samples) are far out of reach, so every loop
//! bound is a [`PtasConfig`] knob with small desk defaults.

pub mod lp;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::action_set::ActionSet;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::multiagent::{mu_p, mu_p_f64, GraphInstance, Utility};
use crate::rational::{format_rational, to_f64};

pub use lp::{solve_lp, LpModel, LpSolution, LpStatus, Row, LP_TOLERANCE};
use lp::LpFamily;

/// Largest accepted `ε`; the analysis needs `ε < 1/2`.
pub const MAX_EPSILON: f64 = 0.5;
/// `ε` up to which the approximation analysis is stated.
pub const GUARANTEE_EPSILON: f64 = 1.0 / 7.0;
pub const DESK_REPS: usize = 200;
pub const DESK_ROUNDING_DRAWS: usize = 20;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PtasConfig {
    pub epsilon: f64,
    pub reps: usize,
    /// Multiset size.
    pub m: usize,
    pub rounding_draws: usize,
    pub seed: u64,
    /// Ratio of both guess grids; `1 + ε` when unset.
    pub grid_ratio: Option<f64>,
    /// Explicit `|K|` guesses replacing the geometric grid.
    pub size_guesses: Option<Vec<usize>>,
    /// Inclusive edge-guess range replacing `[⌈ε²n²/18⌉, n²]`.
    pub edge_guess_range: Option<(u64, u64)>,
}

/// `min(n, ⌈40 ln n⌉)`, at least 1.
pub fn desk_m(n: usize) -> usize {
    let logn = (n.max(1) as f64).ln();
    ((40.0 * logn).ceil() as usize).min(n).max(1)
}

fn ceil_tolerant(x: f64) -> u64 {
    (x - 1e-9).ceil().max(0.0) as u64
}

/// `lo, ⌈lo·r⌉, …` strictly increasing and ending exactly at `hi`.
fn geometric_grid(lo: u64, hi: u64, ratio: f64) -> Vec<u64> {
    let lo = lo.max(1);
    if lo > hi {
        return vec![hi];
    }
    let mut grid = vec![lo];
    let mut v = lo;
    while v < hi {
        v = ((v as f64 * ratio).ceil() as u64).max(v + 1).min(hi);
        grid.push(v);
    }
    grid
}

impl PtasConfig {
    pub fn desk(n: usize, epsilon: f64, seed: u64) -> Self {
        PtasConfig {
            epsilon,
            reps: DESK_REPS,
            m: desk_m(n),
            rounding_draws: DESK_ROUNDING_DRAWS,
            seed,
            grid_ratio: None,
            size_guesses: None,
            edge_guess_range: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.epsilon > 0.0 && self.epsilon <= MAX_EPSILON) {
            return bad(format!("epsilon {} outside (0, {MAX_EPSILON}]", self.epsilon));
        }
        if self.reps == 0 || self.m == 0 || self.rounding_draws == 0 {
            return bad("reps, m and rounding_draws must be at least 1".into());
        }
        if let Some(r) = self.grid_ratio {
            if !(r.is_finite() && r > 1.0) {
                return bad(format!("grid ratio {r} must be a finite number > 1"));
            }
        }
        if let Some(sizes) = &self.size_guesses {
            if sizes.is_empty() || sizes.contains(&0) {
                return bad("size guesses must be a nonempty list of positive integers".into());
            }
        }
        if let Some((lo, hi)) = self.edge_guess_range {
            if lo > hi {
                return bad(format!("empty edge-guess range [{lo}, {hi}]"));
            }
        }
        Ok(())
    }

    pub fn in_guarantee_range(&self) -> bool {
        self.epsilon <= GUARANTEE_EPSILON
    }

    pub fn ratio(&self) -> f64 {
        self.grid_ratio.unwrap_or(1.0 + self.epsilon)
    }

    /// Guesses for `|K|`: geometric from `⌈εn/3⌉` to `n`.
    pub fn size_grid(&self, n: usize) -> Vec<usize> {
        if let Some(sizes) = &self.size_guesses {
            let mut sizes = sizes.clone();
            sizes.sort_unstable();
            sizes.dedup();
            return sizes;
        }
        let lo = ceil_tolerant(self.epsilon * n as f64 / 3.0);
        geometric_grid(lo, n as u64, self.ratio()).into_iter().map(|v| v as usize).collect()
    }

    /// Guesses for `|E(S̃)|`: geometric from `⌈ε²n²/18⌉` to `n²`.
    pub fn edge_grid(&self, n: usize) -> Vec<u64> {
        let (lo, hi) = self.edge_guess_range.unwrap_or_else(|| {
            let n2 = (n * n) as f64;
            (ceil_tolerant(self.epsilon * self.epsilon * n2 / 18.0), (n * n) as u64)
        });
        geometric_grid(lo, hi, self.ratio())
    }
}

/// Estimates `d̂_v` of `deg_K(v)` for one multiset and one `|K|` guess.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DegreeEstimates {
    pub d_hat: Vec<f64>,
    pub multiset_id: usize,
    pub size_guess: usize,
}

/// `m` i.i.d. uniform draws from `0..n` with replacement.
pub fn sample_multiset<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Vec<usize> {
    assert!(n > 0, "cannot sample from an empty ground set");
    (0..m).map(|_| rng.gen_range(0..n)).collect()
}

/// `count[v]` = number of draws of `multiset` adjacent to `v`, with multiplicity.
fn neighbor_counts(graph: &Graph, multiset: &[usize]) -> Vec<usize> {
    let mut counts = vec![0; graph.n()];
    for &x in multiset {
        for v in graph.neighbors(x).iter() {
            counts[v] += 1;
        }
    }
    counts
}

fn estimates_from_counts(
    counts: &[usize],
    m: usize,
    size_guess: usize,
    multiset_id: usize,
) -> DegreeEstimates {
    let n = counts.len() as f64;
    let scale = size_guess as f64 / m as f64;
    DegreeEstimates {
        d_hat: counts.iter().map(|&c| (scale * c as f64).min(n)).collect(),
        multiset_id,
        size_guess,
    }
}

/// `d̂_v = min(|K|/m · deg_M(v), n)` with `m = |M|`.
pub fn degree_estimates(graph: &Graph, multiset: &[usize], size_guess: usize) -> DegreeEstimates {
    let m = multiset.len().max(1);
    estimates_from_counts(&neighbor_counts(graph, multiset), m, size_guess, 0)
}

/// `β = (1-ε)ε/3`.
pub fn beta(epsilon: f64) -> f64 {
    (1.0 - epsilon) * epsilon / 3.0
}

/// `H = {v : d̂_v ≥ βn}`.
pub fn build_h(estimates: &DegreeEstimates, n: usize, epsilon: f64) -> ActionSet {
    let threshold = beta(epsilon) * n as f64;
    (0..n).filter(|&v| estimates.d_hat[v] >= threshold).collect()
}

/// Includes each variable's node independently with probability `x_v`.
pub fn round_solution<R: Rng + ?Sized>(model: &LpModel, solution: &LpSolution, rng: &mut R) -> ActionSet {
    model
        .nodes
        .iter()
        .zip(&solution.x)
        .filter_map(|(&v, &x)| (rng.gen::<f64>() < x.clamp(0.0, 1.0)).then_some(v))
        .collect()
}

/// The sampling event the analysis conditions on: `S̃ ⊆ H`, every node of
/// `H` has `deg_S̃(v) > (εβ/9)·n`, and every estimate on `H` is within a
/// `(1 ± ε)` factor of `deg_S̃(v)`.
pub fn good_sample_check(
    graph: &Graph,
    s_tilde: ActionSet,
    h: ActionSet,
    estimates: &DegreeEstimates,
    epsilon: f64,
) -> bool {
    let floor = epsilon * beta(epsilon) / 9.0 * graph.n() as f64;
    s_tilde.is_subset(h)
        && h.iter().all(|v| {
            let deg = graph.degree_in(v, s_tilde) as f64;
            let ratio = estimates.d_hat[v] / deg;
            deg > floor && (1.0 - epsilon) <= ratio && ratio <= (1.0 + epsilon)
        })
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct StageCounts {
    pub repetitions: u64,
    pub size_guesses: u64,
    pub empty_h: u64,
    /// Size guesses whose neighbourhood rows are infeasible for every edge guess.
    pub neighborhood_infeasible: u64,
    pub lps_built: u64,
    pub lps_optimal: u64,
    pub lps_infeasible: u64,
    /// Larger edge guesses skipped after the first infeasible one.
    pub lps_skipped: u64,
    pub lp_errors: u64,
    pub rounded_candidates: u64,
    pub infinite_candidates: u64,
}

impl StageCounts {
    fn absorb(&mut self, other: &StageCounts) {
        self.repetitions += other.repetitions;
        self.size_guesses += other.size_guesses;
        self.empty_h += other.empty_h;
        self.neighborhood_infeasible += other.neighborhood_infeasible;
        self.lps_built += other.lps_built;
        self.lps_optimal += other.lps_optimal;
        self.lps_infeasible += other.lps_infeasible;
        self.lps_skipped += other.lps_skipped;
        self.lp_errors += other.lp_errors;
        self.rounded_candidates += other.rounded_candidates;
        self.infinite_candidates += other.infinite_candidates;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub rep: usize,
    pub size_guess: usize,
    pub edge_guess: u64,
    pub draw: usize,
}

/// Best rounding of one optimal LP.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CandidateRow {
    pub rep: usize,
    pub size_guess: usize,
    pub edge_guess: u64,
    pub h_size: usize,
    pub lp_objective: f64,
    pub best_draw: usize,
    pub set: String,
    pub set_size: usize,
    pub mu: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConfigEcho {
    pub epsilon: f64,
    pub epsilon_in_guarantee_range: bool,
    pub reps: usize,
    pub m: usize,
    pub rounding_draws: usize,
    pub seed: u64,
    pub grid_ratio: f64,
    pub size_guesses: Vec<usize>,
    pub edge_guesses: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BestReport {
    pub set: ActionSet,
    pub set_size: usize,
    pub mu: Utility,
    pub mu_f64: f64,
    pub left: Utility,
    pub right: String,
    pub left_f64: f64,
    pub right_f64: f64,
    /// `None` when the empty contract wins.
    pub provenance: Option<Provenance>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PtasReport {
    pub n: usize,
    pub edges: usize,
    pub cost: String,
    pub config: ConfigEcho,
    pub stages: StageCounts,
    pub best: BestReport,
    pub candidates: Vec<CandidateRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PtasOutcome {
    pub set: ActionSet,
    pub mu: Utility,
    pub report: PtasReport,
}

struct RepOutput {
    stages: StageCounts,
    rows: Vec<(CandidateRow, ActionSet, Provenance)>,
}

/// `(mu, size, bits)` with higher mu, then smaller set, then smaller mask first.
fn float_better(a: (f64, ActionSet), b: (f64, ActionSet)) -> bool {
    a.0 > b.0 || (a.0 == b.0 && (a.1.len(), a.1) < (b.1.len(), b.1))
}

struct Context<'a> {
    instance: &'a GraphInstance,
    config: &'a PtasConfig,
    cost: f64,
    sizes: Vec<usize>,
    edges: Vec<u64>,
}

impl Context<'_> {
    fn run_rep(&self, rep: usize) -> RepOutput {
        let graph = self.instance.graph();
        let n = graph.n();
        let eps = self.config.epsilon;
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed);
        rng.set_stream(rep as u64);
        let mut stages = StageCounts { repetitions: 1, ..Default::default() };
        let mut rows = Vec::new();

        let multiset = sample_multiset(n, self.config.m, &mut rng);
        let counts = neighbor_counts(graph, &multiset);
        for &size_guess in &self.sizes {
            stages.size_guesses += 1;
            let estimates = estimates_from_counts(&counts, self.config.m, size_guess, rep);
            let h = build_h(&estimates, n, eps);
            // A zero estimate can only reach H when βn = 0, i.e. never for n ≥ 1.
            let Ok(template) = LpModel::build(graph, h, &estimates.d_hat, self.cost, eps, 0) else {
                stages.empty_h += 1;
                continue;
            };
            let family = match LpFamily::new(&template) {
                Ok(f) if f.is_feasible() => f,
                Ok(_) => {
                    stages.neighborhood_infeasible += 1;
                    continue;
                }
                Err(_) => {
                    stages.lp_errors += 1;
                    continue;
                }
            };
            for (i, &edge_guess) in self.edges.iter().enumerate() {
                let mut model = template.clone();
                model.edge_guess = edge_guess;
                model.coverage.rhs = 2.0 * (1.0 - eps) * edge_guess as f64;
                stages.lps_built += 1;
                let solution = match family.solve(&model) {
                    Ok(s) => s,
                    Err(_) => {
                        stages.lp_errors += 1;
                        continue;
                    }
                };
                if !solution.is_optimal() {
                    // The coverage row only tightens as the guess grows.
                    stages.lps_infeasible += 1;
                    stages.lps_skipped += (self.edges.len() - i - 1) as u64;
                    break;
                }
                stages.lps_optimal += 1;
                let mut best: Option<(f64, ActionSet, usize)> = None;
                for draw in 0..self.config.rounding_draws {
                    let s = round_solution(&model, &solution, &mut rng);
                    let mu = mu_p_f64(self.instance, self.cost, s);
                    stages.rounded_candidates += 1;
                    if mu == f64::NEG_INFINITY {
                        stages.infinite_candidates += 1;
                    }
                    if best.is_none_or(|(bm, bs, _)| float_better((mu, s), (bm, bs))) {
                        best = Some((mu, s, draw));
                    }
                }
                let (mu, set, draw) = best.expect("at least one rounding draw");
                let provenance = Provenance { rep, size_guess, edge_guess, draw };
                rows.push((
                    CandidateRow {
                        rep,
                        size_guess,
                        edge_guess,
                        h_size: model.num_vars(),
                        lp_objective: solution.objective,
                        best_draw: draw,
                        set: set.to_hex(),
                        set_size: set.len(),
                        mu,
                    },
                    set,
                    provenance,
                ));
            }
        }
        RepOutput { stages, rows }
    }
}

/// Runs the PTAS and returns the best candidate, always at least as good
/// as the empty contract.
pub fn ptas_solve(instance: &GraphInstance, config: &PtasConfig) -> Result<PtasOutcome> {
    config.validate()?;
    let graph = instance.graph();
    let n = graph.n();
    let ctx = Context {
        instance,
        config,
        cost: to_f64(instance.cost()),
        sizes: config.size_grid(n),
        edges: config.edge_grid(n),
    };
    let outputs: Vec<RepOutput> = if n == 0 {
        Vec::new()
    } else {
        (0..config.reps).into_par_iter().map(|rep| ctx.run_rep(rep)).collect()
    };

    let mut stages = StageCounts::default();
    let mut candidates = Vec::new();
    let mut contenders = Vec::new();
    for out in outputs {
        stages.absorb(&out.stages);
        for (row, set, provenance) in out.rows {
            contenders.push((row.mu, set, provenance));
            candidates.push(row);
        }
    }

    // Float prefilter, exact decision among the near-best.
    let top = contenders.iter().map(|c| c.0).fold(0.0f64, f64::max);
    let mut best_set = ActionSet::EMPTY;
    let mut best_mu = Utility::Finite(num_traits::Zero::zero());
    let mut best_provenance = None;
    for (mu, set, provenance) in contenders {
        if mu < top - 1e-9 || set == best_set {
            continue;
        }
        let exact = mu_p(instance, set).mu;
        let wins = exact > best_mu
            || (exact == best_mu && (set.len(), set) < (best_set.len(), best_set));
        if wins {
            best_set = set;
            best_mu = exact;
            best_provenance = Some(provenance);
        }
    }

    let breakdown = mu_p(instance, best_set);
    let report = PtasReport {
        n,
        edges: graph.edge_count(),
        cost: format_rational(instance.cost()),
        config: ConfigEcho {
            epsilon: config.epsilon,
            epsilon_in_guarantee_range: config.in_guarantee_range(),
            reps: config.reps,
            m: config.m,
            rounding_draws: config.rounding_draws,
            seed: config.seed,
            grid_ratio: ctx.config.ratio(),
            size_guesses: ctx.sizes.clone(),
            edge_guesses: ctx.edges.clone(),
        },
        stages,
        best: BestReport {
            set: best_set,
            set_size: best_set.len(),
            mu: breakdown.mu.clone(),
            mu_f64: breakdown.mu_f64,
            left: breakdown.left,
            right: format_rational(&breakdown.right),
            left_f64: breakdown.left_f64,
            right_f64: breakdown.right_f64,
            provenance: best_provenance,
        },
        candidates,
    };
    Ok(PtasOutcome { set: best_set, mu: breakdown.mu, report })
}
