//! Strong-scaling sweeps over thread counts and placement schemes.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::connectivity::build_connectivity;
use crate::engine::{run_simulation, RunOptions};
use crate::error::{Error, Result};
use crate::metrics::{phase_fractions, rtf, PhaseFractions};
use crate::model::{load_network_spec_file, validate, NetworkSpec};
use crate::placement::{PlacementPlan, Scheme, TopologyModel};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchmarkConfig {
    pub spec: PathBuf,
    pub threads: Vec<usize>,
    pub scheme: Scheme,
    #[serde(default)]
    pub topology: TopologyModel,
    /// Model time in s; the spec's value when absent.
    #[serde(default)]
    pub t_model: Option<f64>,
    /// Discarded initial model time in s; the spec's value when absent.
    #[serde(default)]
    pub t_transient: Option<f64>,
    #[serde(default = "one")]
    pub repetitions: usize,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

fn one() -> usize {
    1
}

impl BenchmarkConfig {
    pub fn check(&self) -> Result<()> {
        self.topology.check()?;
        if self.repetitions == 0 {
            return Err(Error::Config("repetitions must be at least 1".into()));
        }
        if self.threads.is_empty() {
            return Err(Error::Config("no thread counts given".into()));
        }
        for &n in &self.threads {
            if n == 0 || n > self.topology.total_cores() {
                return Err(Error::Config(format!(
                    "thread count {n} outside 1..={}",
                    self.topology.total_cores()
                )));
            }
        }
        for t in [self.t_model, self.t_transient].into_iter().flatten() {
            if !(t >= 0.0) {
                return Err(Error::Config(format!("times must be >= 0, got {t}")));
            }
        }
        Ok(())
    }

    /// `spec` with the configured model and transient times applied.
    pub fn apply_times(&self, spec: &NetworkSpec) -> NetworkSpec {
        let mut spec = spec.clone();
        if let Some(t) = self.t_model {
            spec.grid.t_model = t * 1000.0;
        }
        if let Some(t) = self.t_transient {
            spec.grid.t_transient = t * 1000.0;
        }
        spec
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub n_threads: usize,
    pub scheme: Scheme,
    pub rep: usize,
    /// s
    pub t_wall: f64,
    pub rtf: f64,
    pub fractions: PhaseFractions,
    pub spikes: u64,
    pub syn_events: u64,
    pub pinned: bool,
    /// Why the run failed; timing columns are NaN when set.
    pub error: Option<String>,
}

impl ScalingRow {
    fn failed(n_threads: usize, scheme: Scheme, rep: usize, err: Error) -> Self {
        Self {
            n_threads,
            scheme,
            rep,
            t_wall: f64::NAN,
            rtf: f64::NAN,
            fractions: PhaseFractions {
                f_update: f64::NAN,
                f_deliver: f64::NAN,
                f_communicate: f64::NAN,
                f_other: f64::NAN,
            },
            spikes: 0,
            syn_events: 0,
            pinned: false,
            error: Some(err.to_string()),
        }
    }
}

/// Loads the configured spec and runs the sweep.
pub fn run_sweep(cfg: &BenchmarkConfig) -> Result<Vec<ScalingRow>> {
    let spec = load_network_spec_file(&cfg.spec)?;
    sweep(&spec, cfg)
}

/// Runs every configured thread count `repetitions` times, in order. The
/// connectivity is built once and shared; a failing run yields a row with
/// its error and the sweep continues.
pub fn sweep(spec: &NetworkSpec, cfg: &BenchmarkConfig) -> Result<Vec<ScalingRow>> {
    cfg.check()?;
    let spec = cfg.apply_times(spec);
    validate(&spec).map_err(Error::Invalid)?;
    let t_model_s = spec.grid.t_model / 1000.0;
    let table = build_connectivity::<f64>(&spec, cfg.threads[0])?;

    let mut rows = Vec::with_capacity(cfg.threads.len() * cfg.repetitions);
    for &n in &cfg.threads {
        for rep in 0..cfg.repetitions {
            let row = (|| {
                let plan = PlacementPlan::new(&cfg.topology, cfg.scheme, n)?;
                let opts = RunOptions {
                    n_vp: n,
                    record_spikes: false,
                    placement: Some(&plan),
                };
                let out = run_simulation(&spec, &table, &opts)?;
                Ok(ScalingRow {
                    n_threads: n,
                    scheme: cfg.scheme,
                    rep,
                    t_wall: out.timers.t_total,
                    rtf: rtf(out.timers.t_total, t_model_s)?,
                    fractions: phase_fractions(&out.timers)?,
                    spikes: out.counts.spikes_emitted,
                    syn_events: out.counts.synaptic_events_delivered,
                    pinned: out.pinned,
                    error: None,
                })
            })()
            .unwrap_or_else(|e| ScalingRow::failed(n, cfg.scheme, rep, e));
            rows.push(row);
        }
    }
    Ok(rows)
}

pub const SCALING_COLUMNS: [&str; 12] = [
    "n_threads",
    "scheme",
    "rep",
    "t_wall_s",
    "rtf",
    "f_update",
    "f_deliver",
    "f_communicate",
    "f_other",
    "spikes",
    "syn_events",
    "pinned",
];

#[derive(Serialize, Deserialize)]
struct CsvRow {
    n_threads: usize,
    scheme: Scheme,
    rep: usize,
    t_wall_s: f64,
    rtf: f64,
    f_update: f64,
    f_deliver: f64,
    f_communicate: f64,
    f_other: f64,
    spikes: u64,
    syn_events: u64,
    pinned: bool,
}

/// Header plus one line per row, in the given order.
pub fn emit_scaling_table(rows: &[ScalingRow]) -> String {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    w.write_record(SCALING_COLUMNS).expect("in-memory write");
    for r in rows {
        w.serialize(CsvRow {
            n_threads: r.n_threads,
            scheme: r.scheme,
            rep: r.rep,
            t_wall_s: r.t_wall,
            rtf: r.rtf,
            f_update: r.fractions.f_update,
            f_deliver: r.fractions.f_deliver,
            f_communicate: r.fractions.f_communicate,
            f_other: r.fractions.f_other,
            spikes: r.spikes,
            syn_events: r.syn_events,
            pinned: r.pinned,
        })
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
}

pub fn parse_scaling_table(doc: &str) -> Result<Vec<ScalingRow>> {
    let mut r = csv::Reader::from_reader(doc.as_bytes());
    if r.headers()?.iter().ne(SCALING_COLUMNS) {
        return Err(Error::Format("unexpected scaling table header".into()));
    }
    r.deserialize::<CsvRow>()
        .map(|row| {
            let c = row?;
            Ok(ScalingRow {
                n_threads: c.n_threads,
                scheme: c.scheme,
                rep: c.rep,
                t_wall: c.t_wall_s,
                rtf: c.rtf,
                fractions: PhaseFractions {
                    f_update: c.f_update,
                    f_deliver: c.f_deliver,
                    f_communicate: c.f_communicate,
                    f_other: c.f_other,
                },
                spikes: c.spikes,
                syn_events: c.syn_events,
                pinned: c.pinned,
                error: None,
            })
        })
        .collect()
}
