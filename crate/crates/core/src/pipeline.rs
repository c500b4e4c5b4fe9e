//! Experiment configuration, execution and MIS read-out.
//!
//! A config names the graph (catalog entry, edge list, wired-graph file or
//! atom array), the drive, optional noise and readout error, and the
//! sampling budget. [`run_experiment`] simulates it, projects wire atoms
//! away, drops frustrated outcomes and compares the extracted solution set
//! with the exact oracle on the target graph.
//!
//! Config files are TOML with a mandatory `format = 1`:
//!
//! ```toml
//! format = 1
//! name = "C6"
//! mode = "graph"                  # or "physical"
//! shots = 0                       # 0 = exact distribution
//! seed = 7
//! expected = [[2, 4], [1, 3]]     # optional reference solution set
//!
//! [source]                        # exactly one of catalog / edges / wired / array
//! catalog = "C6"
//!
//! [schedule]                      # MHz and μs
//! t_f = 4.0
//! delta_i = -3.0
//! delta_f = 3.0
//! omega_0 = 0.88                  # always 2π × MHz
//! two_pi = true                   # detunings in 2π × MHz
//! interaction_u = 50.0            # graph-mode U, 2π × MHz
//! dt = 0.001
//!
//! [geometry]                      # optional; required in physical mode
//! array = "c6"                    # bundled table or a file path
//! vertex_map = [1, 2, 3, 4, 5, 6]
//! r_b = 9.8
//!
//! [noise]                         # optional; fields default to typical levels
//! trajectories = 200
//!
//! [spam]                          # optional
//! p0_given_1 = 0.18
//! p1_given_0 = 0.03
//! correct = true
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::catalog;
use crate::error::{Error, Result};
use crate::geometry::{
    bundled_array, induced_graph, validate_embedding, AtomArray, BlockadeParams, Role,
};
use crate::graph::{Graph, VertexSet};
use crate::histogram::{bitstring, Histogram};
use crate::noise::{spam_apply, spam_correct, trajectory_sample, NoiseParams, SpamModel};
use crate::sim::evolve::{Evolver, Perturbation, DEFAULT_DT};
use crate::sim::hamiltonian::{HamiltonianSpec, Mode};
use crate::sim::schedule::{angular, AnnealSchedule};
use crate::sim::state::{sample_counts, StateVector};
use crate::wire::{analyze, is_base_independent, is_frustrated, target_of, Wire, WiredGraph};

pub const FORMAT_VERSION: u32 = 1;
pub const DEFAULT_BLOCKADE_RADIUS: f64 = 9.8;
const SAMPLING_SALT: u64 = 0x5851_f42d_4c95_7f2d;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceConfig {
    pub catalog: Option<String>,
    pub edges: Option<String>,
    pub wired: Option<String>,
    pub array: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleConfig {
    pub t_f: f64,
    pub delta_i: f64,
    pub delta_f: f64,
    #[serde(default = "default_omega")]
    pub omega_0: f64,
    #[serde(default = "default_true")]
    pub two_pi: bool,
    #[serde(default = "default_u")]
    pub interaction_u: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
}

fn default_omega() -> f64 {
    0.88
}
fn default_true() -> bool {
    true
}
fn default_u() -> f64 {
    50.0
}
fn default_dt() -> f64 {
    DEFAULT_DT
}
fn default_r_b() -> f64 {
    DEFAULT_BLOCKADE_RADIUS
}
fn default_trajectories() -> usize {
    200
}

impl ScheduleConfig {
    pub fn schedule(&self) -> Result<AnnealSchedule> {
        AnnealSchedule::from_mhz(
            self.t_f,
            self.delta_i,
            self.delta_f,
            self.omega_0,
            self.two_pi,
        )
    }

    /// Graph-mode interaction in rad/μs.
    pub fn u(&self) -> f64 {
        angular(self.interaction_u)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub array: String,
    /// `vertex_map[i]` is the graph vertex of the array's atom `i + 1`.
    pub vertex_map: Option<Vec<usize>>,
    #[serde(default = "default_r_b")]
    pub r_b: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseConfig {
    #[serde(default = "default_trajectories")]
    pub trajectories: usize,
    #[serde(flatten)]
    pub params: NoiseParams,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        NoiseConfig {
            trajectories: default_trajectories(),
            params: NoiseParams::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpamConfig {
    #[serde(default = "default_p01")]
    pub p0_given_1: f64,
    #[serde(default = "default_p10")]
    pub p1_given_0: f64,
    #[serde(default = "default_true")]
    pub correct: bool,
}

fn default_p01() -> f64 {
    SpamModel::default().p0_given_1
}
fn default_p10() -> f64 {
    SpamModel::default().p1_given_0
}

impl Default for SpamConfig {
    fn default() -> Self {
        SpamConfig {
            p0_given_1: default_p01(),
            p1_given_0: default_p10(),
            correct: true,
        }
    }
}

impl SpamConfig {
    pub fn model(&self) -> Result<SpamModel> {
        SpamModel::new(self.p0_given_1, self.p1_given_0)
    }
}

/// Outcome selection before the structural filters of [`extract_mis`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ThresholdPolicy {
    /// Keep outcomes with at least this fraction of the top probability.
    pub relative: f64,
    /// The top outcome must exceed `min_contrast / 2^N`.
    pub min_contrast: f64,
}

impl Default for ThresholdPolicy {
    fn default() -> Self {
        ThresholdPolicy {
            relative: 0.25,
            min_contrast: 2.0,
        }
    }
}

impl ThresholdPolicy {
    pub fn relative(relative: f64) -> Self {
        ThresholdPolicy {
            relative,
            ..ThresholdPolicy::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub format: u32,
    pub name: String,
    pub source: SourceConfig,
    #[serde(default = "default_mode")]
    pub mode: Mode,
    pub schedule: ScheduleConfig,
    pub geometry: Option<GeometryConfig>,
    pub noise: Option<NoiseConfig>,
    pub spam: Option<SpamConfig>,
    #[serde(default)]
    pub shots: u64,
    /// Measurement count of the corresponding experiment, for reference.
    pub repetitions: Option<u64>,
    #[serde(default)]
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub expected: Option<BTreeSet<VertexSet>>,
    #[serde(default)]
    pub threshold: ThresholdPolicy,
    /// Directory for resolving relative paths; set when loaded from a file.
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

fn default_mode() -> Mode {
    Mode::Graph
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::Configuration(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut cfg = ExperimentConfig::from_toml(&fs::read_to_string(path)?)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf);
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.format != FORMAT_VERSION {
            return Err(Error::Configuration(format!(
                "unsupported config format {} (expected {FORMAT_VERSION})",
                self.format
            )));
        }
        let s = &self.source;
        let given = [&s.catalog, &s.edges, &s.wired, &s.array]
            .iter()
            .filter(|x| x.is_some())
            .count();
        if given != 1 {
            return Err(Error::Configuration(format!(
                "[source] needs exactly one of catalog, edges, wired, array (got {given})"
            )));
        }
        self.schedule.schedule()?;
        if self.schedule.dt.is_nan() || self.schedule.dt <= 0.0 {
            return Err(Error::Configuration("schedule.dt must be positive".into()));
        }
        if let Some(n) = &self.noise {
            n.params.validate()?;
            if n.trajectories == 0 {
                return Err(Error::Configuration(
                    "noise.trajectories must be >= 1".into(),
                ));
            }
        }
        if let Some(sp) = &self.spam {
            sp.model()?;
        }
        Ok(())
    }

    fn resolve(&self, p: &str) -> PathBuf {
        match &self.base_dir {
            Some(dir) if Path::new(p).is_relative() => dir.join(p),
            _ => PathBuf::from(p),
        }
    }

    fn load_array(&self, name: &str) -> Result<AtomArray> {
        if let Ok(arr) = bundled_array(name) {
            return Ok(arr);
        }
        let path = self.resolve(name);
        if path.exists() {
            return AtomArray::from_text(&fs::read_to_string(path)?);
        }
        Err(Error::Configuration(format!(
            "array `{name}` is neither a bundled table nor a readable file"
        )))
    }

    /// The wired graph and, when given, the atom positions in graph labels.
    pub fn system(&self) -> Result<(WiredGraph, Option<AtomArray>)> {
        let map_array = |arr: AtomArray| -> Result<AtomArray> {
            match self.geometry.as_ref().and_then(|g| g.vertex_map.as_ref()) {
                Some(map) => arr.relabeled(map),
                None => Ok(arr),
            }
        };
        let r_b = self
            .geometry
            .as_ref()
            .map_or(DEFAULT_BLOCKADE_RADIUS, |g| g.r_b);
        let s = &self.source;
        let (wg, array) = if let Some(name) = &s.catalog {
            (catalog::wired(name)?, None)
        } else if let Some(p) = &s.edges {
            let g = Graph::from_edge_list(&fs::read_to_string(self.resolve(p))?)?;
            (WiredGraph::bare(g), None)
        } else if let Some(p) = &s.wired {
            (
                WiredGraph::from_text(&fs::read_to_string(self.resolve(p))?)?,
                None,
            )
        } else {
            let arr = map_array(self.load_array(s.array.as_deref().unwrap_or_default())?)?;
            (wired_from_array(&arr, r_b)?, Some(arr))
        };
        let array = match (array, &self.geometry) {
            (Some(a), _) => Some(a),
            (None, Some(g)) => Some(map_array(self.load_array(&g.array)?)?),
            (None, None) => None,
        };
        Ok((wg, array))
    }
}

/// Recovers a wired graph from an array whose qubit atoms come first.
/// Every connected run of wire atoms must be a path whose end atoms touch
/// qubits; an end touching several qubits is a fan-out.
pub fn wired_from_array(arr: &AtomArray, r_b: f64) -> Result<WiredGraph> {
    let g = induced_graph(arr, r_b);
    let nq = arr
        .roles()
        .iter()
        .take_while(|r| **r == Role::Qubit)
        .count();
    if arr.roles()[nq..].contains(&Role::Qubit) {
        return Err(Error::Configuration(
            "qubit atoms must precede wire atoms".into(),
        ));
    }
    let base = g.restrict_to_prefix(nq);
    let n = arr.len();
    let mut seen = vec![false; n + 1];
    let mut wires = Vec::new();
    for start in nq + 1..=n {
        if seen[start] {
            continue;
        }
        let mut comp = vec![start];
        seen[start] = true;
        let mut i = 0;
        while i < comp.len() {
            let v = comp[i];
            for u in g.neighbors(v).filter(|&u| u > nq) {
                if !seen[u] {
                    seen[u] = true;
                    comp.push(u);
                }
            }
            i += 1;
        }
        let inner_deg = |v: usize| g.neighbors(v).filter(|&u| u > nq).count();
        let ends: Vec<usize> = comp
            .iter()
            .copied()
            .filter(|&v| inner_deg(v) <= 1)
            .collect();
        let edges: usize = comp.iter().map(|&v| inner_deg(v)).sum::<usize>() / 2;
        if ends.len() != 2 || edges + 1 != comp.len() {
            return Err(Error::Configuration(format!(
                "wire atoms {comp:?} do not form a simple chain"
            )));
        }
        let qubits_of = |v: usize| -> Vec<usize> { g.neighbors(v).filter(|&u| u <= nq).collect() };
        let mut chain = vec![ends[0]];
        while chain.len() < comp.len() {
            let last = *chain.last().unwrap();
            let prev = chain.len().checked_sub(2).map(|i| chain[i]);
            let next = g
                .neighbors(last)
                .find(|&u| u > nq && Some(u) != prev)
                .expect("chain continues");
            chain.push(next);
        }
        if chain[1..chain.len() - 1]
            .iter()
            .any(|&v| !qubits_of(v).is_empty())
        {
            return Err(Error::Configuration(format!(
                "interior wire atoms of {chain:?} touch qubits"
            )));
        }
        let (qa, qb) = (qubits_of(chain[0]), qubits_of(*chain.last().unwrap()));
        let wire = match (qa.len(), qb.len()) {
            (1, 1) if qa[0] > qb[0] => {
                chain.reverse();
                Wire::new(qb[0], qa[0], chain)?
            }
            (1, _) => Wire::fan_out(qa[0], qb, chain)?,
            (_, 1) => {
                chain.reverse();
                Wire::fan_out(qb[0], qa, chain)?
            }
            _ => {
                return Err(Error::Configuration(format!(
                    "wire {chain:?} needs a single-qubit end"
                )))
            }
        };
        wires.push(wire);
    }
    let wg = WiredGraph::new(base, wires)?;
    if wg.combined() != &g {
        return Err(Error::Configuration(
            "array does not realize a qubit graph with simple wires".into(),
        ));
    }
    Ok(wg)
}

/// Keeps outcomes at or above the policy threshold, removes sets that are
/// dependent on the qubit graph or frustrate a wire, and returns the
/// largest survivors.
pub fn extract_mis(
    h: &Histogram,
    wg: &WiredGraph,
    policy: &ThresholdPolicy,
) -> Result<BTreeSet<VertexSet>> {
    let n = h.n_atoms();
    if n != wg.n_qubits() {
        return Err(Error::InvalidInput(format!(
            "histogram has {n} bits, graph has {} qubits",
            wg.n_qubits()
        )));
    }
    let top = h.max_prob();
    // for one or two atoms the contrast floor would reach 1; a strict majority suffices there
    let floor = (policy.min_contrast / (1u64 << n) as f64).min(0.5);
    if top.is_nan() || top <= floor {
        return Err(Error::ExtractionFailed(format!(
            "top outcome probability {top:.4} does not exceed {floor:.4}; no dominant structure"
        )));
    }
    let candidates: Vec<(VertexSet, f64)> = h
        .nonzero()
        .filter(|&(_, p)| p >= policy.relative * top)
        .map(|(i, p)| (VertexSet::from_index(i, n), p))
        .collect();
    let survivors: Vec<&VertexSet> = candidates
        .iter()
        .map(|(s, _)| s)
        .filter(|s| is_base_independent(s, wg) && !is_frustrated(s, wg))
        .collect();
    let Some(best) = survivors.iter().map(|s| s.len()).max() else {
        let list: Vec<String> = candidates
            .iter()
            .map(|(s, p)| format!("{s}:{p:.4}"))
            .collect();
        return Err(Error::ExtractionFailed(format!(
            "no candidate survives the independence and frustration filters; candidates {}",
            list.join(" ")
        )));
    };
    Ok(survivors
        .into_iter()
        .filter(|s| s.len() == best)
        .cloned()
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutcomeClass {
    Mis,
    Frustrated,
    Other,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Outcome {
    pub bits: String,
    pub set: VertexSet,
    pub probability: f64,
    pub class: OutcomeClass,
    pub dominant: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeometrySummary {
    pub r_b: f64,
    pub clean: bool,
    pub missing: Vec<(usize, usize)>,
    pub spurious: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScheduleSummary {
    pub t_f: f64,
    pub delta_i: f64,
    pub delta_f: f64,
    pub omega_0: f64,
    pub dt: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MisReport {
    pub name: String,
    pub mode: Mode,
    pub n_qubits: usize,
    pub n_atoms: usize,
    /// Angular units.
    pub schedule: ScheduleSummary,
    pub shots: u64,
    pub seed: u64,
    pub noise: Option<NoiseConfig>,
    pub spam: Option<SpamConfig>,
    pub spam_corrected: bool,
    pub clamped: bool,
    pub geometry: Option<GeometrySummary>,
    pub threshold: ThresholdPolicy,
    /// Nonzero projected probabilities keyed by qubit bitstring.
    pub projected: BTreeMap<String, f64>,
    /// Projected outcomes by decreasing probability.
    pub outcomes: Vec<Outcome>,
    pub extracted: BTreeSet<VertexSet>,
    pub oracle: BTreeSet<VertexSet>,
    /// Projected oracle sets of the combined graph that frustrate a wire.
    pub oracle_frustrated: BTreeSet<VertexSet>,
    pub expected: Option<BTreeSet<VertexSet>>,
    #[serde(rename = "match")]
    pub is_match: bool,
    pub matches_expected: Option<bool>,
    pub mis_probability: f64,
    /// Largest deviation of the state norm from 1 over all steps (noiseless runs).
    pub norm_drift: Option<f64>,
    /// Before readout correction, when correction was applied.
    pub mis_probability_uncorrected: Option<f64>,
    pub extraction_error: Option<String>,
}

impl MisReport {
    pub fn dominant(&self) -> impl Iterator<Item = &Outcome> {
        self.outcomes.iter().filter(|o| o.dominant)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Everything a run produces.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub report: MisReport,
    /// Full-register distribution as measured (after correction, if any).
    pub histogram: Histogram,
    pub projected: Histogram,
}

fn mis_probability(h: &Histogram, oracle: &BTreeSet<VertexSet>) -> f64 {
    oracle.iter().map(|s| h.prob_of_set(s)).sum()
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let (wg, array) = cfg.system()?;
    let schedule = cfg.schedule.schedule()?;
    let r_b = cfg
        .geometry
        .as_ref()
        .map_or(DEFAULT_BLOCKADE_RADIUS, |g| g.r_b);
    let geometry = match &array {
        Some(arr) => {
            let v = validate_embedding(arr, wg.combined(), r_b)?;
            if !v.is_clean() {
                log::warn!(
                    "{}: geometry does not induce the wired graph\n{v}",
                    cfg.name
                );
            }
            Some(GeometrySummary {
                r_b,
                clean: v.is_clean(),
                missing: v.missing.iter().map(|p| p.pair).collect(),
                spurious: v.spurious.iter().map(|p| p.pair).collect(),
            })
        }
        None => None,
    };
    let c6 = match cfg.mode {
        Mode::Physical => BlockadeParams::from_radius(r_b, schedule.omega_0)?.c6_over_hbar,
        Mode::Graph => 0.0,
    };
    let spec = HamiltonianSpec::for_mode(
        cfg.mode,
        wg.combined(),
        array.as_ref(),
        cfg.schedule.u(),
        c6,
    )?;
    spec.check_detuning(schedule.delta_f)?;

    let n = wg.n_atoms();
    let psi0 = StateVector::ground(n)?;
    log::info!("{}: {} atoms, {} mode", cfg.name, n, cfg.mode);
    let mut norm_drift = None;
    let exact = match &cfg.noise {
        None => {
            let mut drift = 0.0f64;
            let psi = Evolver::new(&spec, &schedule, cfg.schedule.dt)?.run_observed(
                &psi0,
                &Perturbation::default(),
                &mut |_, amps| {
                    let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
                    drift = drift.max((norm.sqrt() - 1.0).abs());
                },
            )?;
            norm_drift = Some(drift);
            Histogram::exact(n, psi.probabilities())
        }
        Some(nc) => trajectory_sample(
            &psi0,
            &spec,
            &schedule,
            &nc.params,
            nc.trajectories,
            cfg.seed,
            cfg.schedule.dt,
        )?,
    };
    let spam = cfg.spam.as_ref().map(|s| s.model()).transpose()?;
    let read = match &spam {
        Some(m) => spam_apply(&exact, m),
        None => exact,
    };
    let sampled = if cfg.shots > 0 {
        sample_counts(n, read.probs(), cfg.shots, cfg.seed ^ SAMPLING_SALT)
    } else {
        read
    };
    let analysis = analyze(&wg)?;
    let oracle = crate::graph::mis_brute_force(&target_of(&wg))?;
    let mut uncorrected = None;
    let histogram = match (&spam, &cfg.spam) {
        (Some(m), Some(sc)) if sc.correct => {
            uncorrected = Some(mis_probability(&sampled.project(wg.n_qubits()), &oracle));
            spam_correct(&sampled, m)?
        }
        _ => sampled,
    };
    let projected = histogram.project(wg.n_qubits());
    let (extracted, extraction_error) = match extract_mis(&projected, &wg, &cfg.threshold) {
        Ok(s) => (s, None),
        Err(e @ Error::ExtractionFailed(_)) => (BTreeSet::new(), Some(e.to_string())),
        Err(e) => return Err(e),
    };
    let top = projected.max_prob();
    let nq = wg.n_qubits();
    let mut outcomes: Vec<Outcome> = projected
        .nonzero()
        .map(|(i, p)| {
            let set = VertexSet::from_index(i, nq);
            let class = if oracle.contains(&set) {
                OutcomeClass::Mis
            } else if is_frustrated(&set, &wg) {
                OutcomeClass::Frustrated
            } else {
                OutcomeClass::Other
            };
            Outcome {
                bits: bitstring(i, nq),
                set,
                probability: p,
                class,
                dominant: p >= cfg.threshold.relative * top,
            }
        })
        .collect();
    outcomes.sort_by(|a, b| {
        b.probability
            .total_cmp(&a.probability)
            .then(a.bits.cmp(&b.bits))
    });

    let report = MisReport {
        name: cfg.name.clone(),
        mode: cfg.mode,
        n_qubits: nq,
        n_atoms: n,
        schedule: ScheduleSummary {
            t_f: schedule.t_f,
            delta_i: schedule.delta_i,
            delta_f: schedule.delta_f,
            omega_0: schedule.omega_0,
            dt: cfg.schedule.dt,
        },
        shots: cfg.shots,
        seed: cfg.seed,
        noise: cfg.noise.clone(),
        spam: cfg.spam.clone(),
        spam_corrected: histogram.spam_corrected,
        clamped: histogram.clamped,
        geometry,
        threshold: cfg.threshold,
        projected: projected.to_map(),
        outcomes,
        is_match: extraction_error.is_none() && extracted == oracle,
        matches_expected: cfg.expected.as_ref().map(|e| *e == extracted),
        expected: cfg.expected.clone(),
        mis_probability: mis_probability(&projected, &oracle),
        norm_drift,
        mis_probability_uncorrected: uncorrected,
        extracted,
        oracle,
        oracle_frustrated: analysis.frustrated,
        extraction_error,
    };
    Ok(RunOutput {
        report,
        histogram,
        projected,
    })
}

fn slug(name: &str) -> String {
    name.chars()
        .filter_map(|c| match c {
            c if c.is_ascii_alphanumeric() => Some(c.to_ascii_lowercase()),
            ',' | '-' | '_' => None,
            _ => Some('_'),
        })
        .collect()
}

impl RunOutput {
    fn meta(&self) -> Vec<(&'static str, String)> {
        let r = &self.report;
        let s = &r.schedule;
        vec![
            ("graph", r.name.clone()),
            ("mode", r.mode.to_string()),
            (
                "schedule",
                format!(
                    "t_f={} us, delta_i={} rad/us, delta_f={} rad/us, omega_0={} rad/us, dt={} us",
                    s.t_f, s.delta_i, s.delta_f, s.omega_0, s.dt
                ),
            ),
            ("seed", r.seed.to_string()),
        ]
    }

    /// Bar-chart data: one row per projected outcome, sorted by excitation
    /// number and then bitstring.
    pub fn bars(&self) -> String {
        let mut rows: Vec<&Outcome> = self.report.outcomes.iter().collect();
        rows.sort_by(|a, b| a.set.len().cmp(&b.set.len()).then(a.bits.cmp(&b.bits)));
        let mut out = String::from("# index bitstring n_e probability class\n");
        for (i, o) in rows.iter().enumerate() {
            let class = match o.class {
                OutcomeClass::Mis => "mis",
                OutcomeClass::Frustrated => "frustrated",
                OutcomeClass::Other => "other",
            };
            writeln!(
                out,
                "{i} {} {} {:e} {class}",
                o.bits,
                o.set.len(),
                o.probability
            )
            .unwrap();
        }
        out
    }

    /// Writes histogram CSV/JSON, projected CSV, report JSON and bar data.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let stem = slug(&self.report.name);
        let meta = self.meta();
        let mut pmeta = meta.clone();
        pmeta.push(("projection", "qubit atoms only".into()));
        let files = [
            (
                format!("{stem}_histogram.csv"),
                self.histogram.to_csv(&meta),
            ),
            (
                format!("{stem}_histogram.json"),
                self.histogram.to_json(&meta),
            ),
            (
                format!("{stem}_projected.csv"),
                self.projected.to_csv(&pmeta),
            ),
            (format!("{stem}_report.json"), self.report.to_json()),
            (format!("{stem}_bars.dat"), self.bars()),
        ];
        let mut written = Vec::new();
        for (name, body) in files {
            let path = dir.join(name);
            fs::write(&path, body)?;
            written.push(path);
        }
        Ok(written)
    }
}

/// Bundled experiment configs, keyed by file stem.
pub const BUNDLED_EXPERIMENTS: &[(&str, &str)] = &[
    ("p4", include_str!("../data/experiments/p4.toml")),
    ("c4", include_str!("../data/experiments/c4.toml")),
    ("c6", include_str!("../data/experiments/c6.toml")),
    ("s4", include_str!("../data/experiments/s4.toml")),
    ("3pan", include_str!("../data/experiments/3pan.toml")),
    ("5pan", include_str!("../data/experiments/5pan.toml")),
    ("k5exp", include_str!("../data/experiments/k5exp.toml")),
    ("k33exp", include_str!("../data/experiments/k33exp.toml")),
    ("s6exp", include_str!("../data/experiments/s6exp.toml")),
];

pub fn bundled_experiment(stem: &str) -> Result<ExperimentConfig> {
    let text = BUNDLED_EXPERIMENTS
        .iter()
        .find(|(k, _)| *k == stem)
        .map(|(_, t)| *t)
        .ok_or_else(|| Error::Lookup(stem.to_string()))?;
    ExperimentConfig::from_toml(text)
}

/// Bundled experiments behind each figure panel group.
pub fn figure_experiments(figure: u32) -> Result<&'static [&'static str]> {
    match figure {
        2 => Ok(&["p4", "c4", "c6", "s4", "3pan", "5pan"]),
        3 => Ok(&["k5exp", "k33exp"]),
        4 => Ok(&["s6exp"]),
        _ => Err(Error::Lookup(format!("figure {figure}"))),
    }
}

/// Runs every bundled experiment of a figure with its noiseless defaults.
pub fn reproduce(figure: u32) -> Result<Vec<RunOutput>> {
    figure_experiments(figure)?
        .iter()
        .map(|stem| run_experiment(&bundled_experiment(stem)?))
        .collect()
}

fn format_family(f: &BTreeSet<VertexSet>) -> String {
    crate::graph::format_family(f)
}

/// Plain-text comparison of extracted, oracle and reference solution sets.
pub fn comparison_table(reports: &[MisReport]) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "{:<10} {:>5} {:>8}  {:<28} {:<28} {:<28} match",
        "graph", "atoms", "P(MIS)", "extracted", "oracle", "reference"
    )
    .unwrap();
    for r in reports {
        let reference = r.expected.as_ref().map_or("-".to_string(), format_family);
        let verdict = match (r.is_match, r.matches_expected) {
            (true, Some(false)) => "oracle only",
            (true, _) => "yes",
            (false, _) => "NO",
        };
        writeln!(
            out,
            "{:<10} {:>5} {:>8.4}  {:<28} {:<28} {:<28} {verdict}",
            r.name,
            r.n_atoms,
            r.mis_probability,
            format_family(&r.extracted),
            format_family(&r.oracle),
            reference
        )
        .unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn family(sets: &[&[usize]]) -> BTreeSet<VertexSet> {
        sets.iter().map(|s| s.iter().copied().collect()).collect()
    }

    #[test]
    fn bundled_configs_parse() {
        for (stem, _) in BUNDLED_EXPERIMENTS {
            let cfg = bundled_experiment(stem).unwrap();
            let (wg, arr) = cfg.system().unwrap();
            assert_eq!(arr.unwrap().len(), wg.n_atoms(), "{stem}");
        }
    }

    #[test]
    fn config_round_trip_and_errors() {
        let cfg = bundled_experiment("c6").unwrap();
        assert_eq!(ExperimentConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
        let two = cfg
            .to_toml()
            .replace("[source]", "[source]\nedges = \"g.txt\"");
        assert!(matches!(
            ExperimentConfig::from_toml(&two),
            Err(Error::Configuration(_))
        ));
        let v2 = cfg.to_toml().replace("format = 1", "format = 2");
        assert!(ExperimentConfig::from_toml(&v2).is_err());
        assert!(ExperimentConfig::from_toml("format = 1\nname = \"x\"").is_err());
    }

    #[test]
    fn five_pan_peaks_extract_to_target() {
        let wg = catalog::wired("5-pan").unwrap();
        let h = Histogram::from_entries(
            4,
            [("1001", 0.3), ("0101", 0.3), ("1101", 0.3), ("0000", 0.1)],
        )
        .unwrap();
        let got = extract_mis(&h, &wg, &ThresholdPolicy::default()).unwrap();
        assert_eq!(got, family(&[&[1, 4], &[2, 4]]));
    }

    #[test]
    fn uniform_histogram_fails_extraction() {
        let wg = catalog::wired("C6").unwrap();
        let r = extract_mis(&Histogram::uniform(4), &wg, &ThresholdPolicy::default());
        assert!(matches!(r, Err(Error::ExtractionFailed(_))));
    }

    #[test]
    fn dependent_candidates_only_fail_extraction() {
        let wg = catalog::wired("P4").unwrap();
        let h = Histogram::from_entries(4, [("1100", 0.9), ("0000", 0.1)]).unwrap();
        assert!(matches!(
            extract_mis(&h, &wg, &ThresholdPolicy::default()),
            Err(Error::ExtractionFailed(_))
        ));
    }

    #[test]
    fn single_atom_end_to_end() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("one.txt"), "n 1\n").unwrap();
        let text = r#"
            format = 1
            name = "single"
            [source]
            edges = "one.txt"
            [schedule]
            t_f = 1.0
            delta_i = -3.0
            delta_f = 3.0
        "#;
        fs::write(dir.path().join("one.toml"), text).unwrap();
        let cfg = ExperimentConfig::load(&dir.path().join("one.toml")).unwrap();
        let out = run_experiment(&cfg).unwrap();
        assert_eq!(out.report.extracted, family(&[&[1]]));
        assert!(out.report.is_match);
        let files = out.write(&dir.path().join("out")).unwrap();
        assert_eq!(files.len(), 5);
        let csv = fs::read_to_string(&files[0]).unwrap();
        assert!(csv.contains("# graph: single"));
        assert!(csv.contains("# bit_order:"));
    }

    #[test]
    fn arrays_recover_wired_graphs() {
        for (stem, name) in [
            ("c6", "C6"),
            ("5pan", "5-pan"),
            ("k33", "K3,3exp"),
            ("s6", "S6exp"),
        ] {
            let arr = bundled_array(stem).unwrap();
            let wg = wired_from_array(&arr, 9.8).unwrap();
            assert_eq!(wg.combined(), &catalog::graph(name).unwrap(), "{stem}");
            assert_eq!(
                crate::wire::mis_via_wires(&wg).unwrap(),
                crate::wire::mis_via_wires(&catalog::wired(name).unwrap()).unwrap(),
                "{stem}"
            );
        }
    }

    #[test]
    fn slugs() {
        assert_eq!(slug("K3,3exp"), "k33exp");
        assert_eq!(slug("5-pan"), "5pan");
        assert_eq!(slug("Moser spindle"), "moser_spindle");
    }
}
