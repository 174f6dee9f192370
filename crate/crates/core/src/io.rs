//! Instance files (JSON, plus a bare edge-list format) and report writers.
//!
//! Every rational crosses the boundary as a `"p/q"` string. Graph instances
//! must state whether their cost is absolute or already reparameterized.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::action_set::ActionSet;
use crate::error::{Error, Result};
use crate::generators::GeneratedInstance;
use crate::graph::Graph;
use crate::multiagent::{mu_p, GraphInstance, Optimum};
use crate::ptas::PtasReport;
use crate::rational::{format_rational, to_f64, Rational};
use crate::single_agent::{principal_utility, BreakpointCurve, OptimalContract, SingleAgentInstance};
use crate::valuations::Valuation;

pub const FORMAT_VERSION: &str = "1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CostConvention {
    /// Cost in reward units; divided out by `E_max` on load.
    Absolute,
    /// Cost already multiplied by `E_max`, in `[0, 1)`.
    Reparameterized,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ValuationSpec {
    Additive {
        #[serde(with = "crate::rational::serde_vec")]
        weights: Vec<Rational>,
    },
    Graph {
        edges: Vec<[usize; 2]>,
    },
    /// `values[mask] = f(mask)` for every subset bitmask.
    Table {
        #[serde(with = "crate::rational::serde_vec")]
        values: Vec<Rational>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InstanceFile {
    SingleAgent {
        version: String,
        n: usize,
        valuation: ValuationSpec,
        #[serde(with = "crate::rational::serde_vec")]
        costs: Vec<Rational>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        metadata: Option<Value>,
    },
    MultiAgentGraph {
        version: String,
        n: usize,
        edges: Vec<[usize; 2]>,
        #[serde(with = "crate::rational::serde_str")]
        cost: Rational,
        cost_convention: CostConvention,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        metadata: Option<Value>,
    },
}

/// A validated in-memory instance.
#[derive(Clone, Debug, PartialEq)]
pub enum Instance {
    Single(SingleAgentInstance),
    Multi(GraphInstance),
}

fn edge_pairs(graph: &Graph) -> Vec<[usize; 2]> {
    graph.edges().into_iter().map(|(u, v)| [u, v]).collect()
}

fn graph_from_pairs(n: usize, edges: &[[usize; 2]]) -> Result<Graph> {
    let pairs: Vec<(usize, usize)> = edges.iter().map(|&[u, v]| (u, v)).collect();
    Graph::from_edges(n, &pairs)
}

impl InstanceFile {
    pub fn from_single(instance: &SingleAgentInstance) -> Self {
        let valuation = match instance.valuation() {
            Valuation::Additive(w) => ValuationSpec::Additive { weights: w.clone() },
            Valuation::Graph(g) => ValuationSpec::Graph { edges: edge_pairs(g) },
            Valuation::Table { values, .. } => ValuationSpec::Table { values: values.clone() },
        };
        InstanceFile::SingleAgent {
            version: FORMAT_VERSION.into(),
            n: instance.n(),
            valuation,
            costs: instance.costs().to_vec(),
            metadata: None,
        }
    }

    /// Written in the reparameterized convention.
    pub fn from_graph(instance: &GraphInstance) -> Self {
        InstanceFile::MultiAgentGraph {
            version: FORMAT_VERSION.into(),
            n: instance.n(),
            edges: edge_pairs(instance.graph()),
            cost: instance.cost().clone(),
            cost_convention: CostConvention::Reparameterized,
            metadata: None,
        }
    }

    pub fn from_generated(generated: &GeneratedInstance) -> Result<Self> {
        let mut file = InstanceFile::from_graph(&generated.instance);
        if let InstanceFile::MultiAgentGraph { metadata, .. } = &mut file {
            *metadata = Some(serde_json::to_value(&generated.metadata)?);
        }
        Ok(file)
    }

    pub fn metadata(&self) -> Option<&Value> {
        match self {
            InstanceFile::SingleAgent { metadata, .. } | InstanceFile::MultiAgentGraph { metadata, .. } => {
                metadata.as_ref()
            }
        }
    }

    /// Validates the file and builds the instance it describes.
    pub fn to_instance(&self) -> Result<Instance> {
        match self {
            InstanceFile::SingleAgent { version, n, valuation, costs, .. } => {
                check_version(version)?;
                let valuation = match valuation {
                    ValuationSpec::Additive { weights } => {
                        if weights.len() != *n {
                            return Err(Error::Parse(format!(
                                "valuation.weights: expected {n} entries, got {}",
                                weights.len()
                            )));
                        }
                        Valuation::additive(weights.clone())?
                    }
                    ValuationSpec::Graph { edges } => Valuation::graph(graph_from_pairs(*n, edges)?),
                    ValuationSpec::Table { values } => Valuation::table(*n, values.clone())?,
                };
                Ok(Instance::Single(SingleAgentInstance::new(valuation, costs.clone())?))
            }
            InstanceFile::MultiAgentGraph { version, n, edges, cost, cost_convention, .. } => {
                check_version(version)?;
                let graph = graph_from_pairs(*n, edges)?;
                let instance = match cost_convention {
                    CostConvention::Absolute => GraphInstance::from_absolute_cost(graph, cost)?,
                    CostConvention::Reparameterized => GraphInstance::new(graph, cost.clone())?,
                };
                Ok(Instance::Multi(instance))
            }
        }
    }
}

fn check_version(version: &str) -> Result<()> {
    if version == FORMAT_VERSION {
        Ok(())
    } else {
        Err(Error::Parse(format!("unsupported format version {version:?}, expected {FORMAT_VERSION:?}")))
    }
}

pub fn parse_instance(text: &str) -> Result<InstanceFile> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

pub fn instance_to_string(file: &InstanceFile) -> Result<String> {
    Ok(serde_json::to_string_pretty(file)? + "\n")
}

pub fn load_instance(path: &Path) -> Result<InstanceFile> {
    let text = fs::read_to_string(path)?;
    parse_instance(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

pub fn save_instance(file: &InstanceFile, path: &Path) -> Result<()> {
    fs::write(path, instance_to_string(file)?)?;
    Ok(())
}

/// One `u v` pair per line; blank lines and `#` comments are skipped.
/// The node count is `n` when given, else one past the largest index.
pub fn parse_edge_list(text: &str, n: Option<usize>) -> Result<Graph> {
    let mut edges = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let parsed: Option<Vec<usize>> = fields.iter().map(|f| f.parse().ok()).collect();
        match parsed.as_deref() {
            Some(&[u, v]) => edges.push((u, v)),
            _ => {
                return Err(Error::Parse(format!(
                    "line {}: expected two node indices, got {line:?}",
                    lineno + 1
                )))
            }
        }
    }
    let n = n.unwrap_or_else(|| edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0));
    Graph::from_edges(n, &edges)
}

pub fn load_edge_list(path: &Path, n: Option<usize>) -> Result<Graph> {
    let text = fs::read_to_string(path)?;
    parse_edge_list(&text, n).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(Error::Parse(format!("unknown report format {other:?}"))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Json => "json",
            Format::Csv => "csv",
        })
    }
}

/// A report with a JSON form (via serde) and a flat CSV table.
pub trait Report: Serialize {
    fn csv_header(&self) -> &'static [&'static str];
    fn csv_rows(&self) -> Vec<Vec<String>>;
}

pub fn render_report<R: Report>(report: &R, format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Json => {
            let mut out = serde_json::to_vec_pretty(report)?;
            out.push(b'\n');
            Ok(out)
        }
        Format::Csv => {
            let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
            writer.write_record(report.csv_header())?;
            for row in report.csv_rows() {
                writer.write_record(&row)?;
            }
            writer.into_inner().map_err(|e| Error::Io(e.into_error()))
        }
    }
}

/// Writes to `path`, or to stdout when `path` is `None`.
pub fn write_report<R: Report>(report: &R, path: Option<&Path>, format: Format) -> Result<()> {
    let bytes = render_report(report, format)?;
    match path {
        Some(path) => fs::write(path, bytes)?,
        None => std::io::stdout().lock().write_all(&bytes)?,
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CurveRow {
    pub t: String,
    pub bitmask: String,
    pub f: String,
    pub mu_p: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SingleAgentReport {
    pub n: usize,
    pub valuation: &'static str,
    pub demand_calls: u64,
    pub nested_chain: bool,
    pub curve: Vec<CurveRow>,
    pub optimal: OptimalContract,
}

impl SingleAgentReport {
    pub fn new(
        instance: &SingleAgentInstance,
        curve: &BreakpointCurve,
        optimal: OptimalContract,
        demand_calls: u64,
    ) -> Self {
        let v = instance.valuation();
        SingleAgentReport {
            n: instance.n(),
            valuation: v.kind_name(),
            demand_calls,
            nested_chain: crate::single_agent::verify_nested_chain(curve),
            curve: curve
                .points
                .iter()
                .map(|p| CurveRow {
                    t: format_rational(&p.t),
                    bitmask: p.set.to_hex(),
                    f: format_rational(&v.value(p.set)),
                    mu_p: format_rational(&principal_utility(v, p.set, &p.t)),
                })
                .collect(),
            optimal,
        }
    }
}

impl Report for SingleAgentReport {
    fn csv_header(&self) -> &'static [&'static str] {
        &["t", "bitmask", "f", "mu_p"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.curve
            .iter()
            .map(|r| vec![r.t.clone(), r.bitmask.clone(), r.f.clone(), r.mu_p.clone()])
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BruteForceReport {
    pub n: usize,
    pub edges: usize,
    pub cost: String,
    pub absolute_cost: String,
    pub set: ActionSet,
    pub set_size: usize,
    pub mu: String,
    pub mu_f64: f64,
    pub left: String,
    pub right: String,
}

impl BruteForceReport {
    pub fn new(instance: &GraphInstance, optimum: &Optimum) -> Self {
        let breakdown = mu_p(instance, optimum.set);
        let left = breakdown.left.finite().map_or_else(|| "-inf".to_string(), format_rational);
        BruteForceReport {
            n: instance.n(),
            edges: instance.graph().edge_count(),
            cost: format_rational(instance.cost()),
            absolute_cost: format_rational(&instance.absolute_cost()),
            set: optimum.set,
            set_size: optimum.set.len(),
            mu: format_rational(&optimum.mu),
            mu_f64: to_f64(&optimum.mu),
            left,
            right: format_rational(&breakdown.right),
        }
    }
}

impl Report for BruteForceReport {
    fn csv_header(&self) -> &'static [&'static str] {
        &["bitmask", "size", "mu", "mu_f64", "left", "right"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        vec![vec![
            self.set.to_hex(),
            self.set_size.to_string(),
            self.mu.clone(),
            self.mu_f64.to_string(),
            self.left.clone(),
            self.right.clone(),
        ]]
    }
}

impl Report for PtasReport {
    fn csv_header(&self) -> &'static [&'static str] {
        &[
            "rep",
            "size_guess",
            "edge_guess",
            "h_size",
            "lp_objective",
            "best_draw",
            "bitmask",
            "set_size",
            "mu",
        ]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.candidates
            .iter()
            .map(|c| {
                vec![
                    c.rep.to_string(),
                    c.size_guess.to_string(),
                    c.edge_guess.to_string(),
                    c.h_size.to_string(),
                    c.lp_objective.to_string(),
                    c.best_draw.to_string(),
                    c.set.clone(),
                    c.set_size.to_string(),
                    c.mu.to_string(),
                ]
            })
            .collect()
    }
}
