//! Executes a configuration and renders its report.

use std::io::Write;
use std::path::Path;

use overlap_core::nbt_paths::{self, BipartitePhasedGraph, Identity, IdentityCheck, PhasedGraph};
use overlap_core::statistics::{self, EntryMoments, MCReport, Ratios, StatisticRequest, Target, TestFunction};
use overlap_core::ChebSeries;
use serde::{Deserialize, Serialize};

use crate::config::{ConfigError, ExperimentConfig, Format, Mode, WeightModel};

/// Exit status for a run whose gates all passed.
pub const EXIT_PASS: i32 = 0;
/// Exit status for a failed gate or a runtime error.
pub const EXIT_FAIL: i32 = 1;
/// Exit status for an invalid configuration.
pub const EXIT_INVALID: i32 = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Gate {
    pub fn line(&self) -> String {
        format!("{} {}: {}", if self.pass { "PASS" } else { "FAIL" }, self.name, self.detail)
    }
}

/// One identity check of the suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityRow {
    pub identity: Identity,
    pub graph: String,
    pub weights: WeightModel,
    pub k: usize,
    /// `exact-pass`, `tolerance-pass` or `fail`.
    pub status: String,
    pub paths: u64,
    pub lhs: f64,
    pub rhs: f64,
    pub max_abs_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRow {
    pub k: String,
    pub l: String,
    pub gamma: f64,
    pub prediction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Results {
    Identities { rows: Vec<IdentityRow> },
    MonteCarlo { report: MCReport, notes: Vec<String> },
    Predictions { rows: Vec<PredictionRow> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub library_version: String,
    pub seed: u64,
    pub config: ExperimentConfig,
    pub results: Results,
    pub gates: Vec<Gate>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.gates.iter().all(|g| g.pass)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            EXIT_PASS
        } else {
            EXIT_FAIL
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => serde_json::to_string_pretty(self).expect("report serializes") + "\n",
            Format::Csv => self.to_csv(),
        }
    }

    /// CSV table preceded by `#` lines carrying the version, seed and
    /// config, and followed by one `#` line per gate.
    fn to_csv(&self) -> String {
        let mut out = format!(
            "# library_version: {}\n# seed: {}\n# config: {}\n",
            self.library_version,
            self.seed,
            serde_json::to_string(&self.config).expect("config serializes")
        );
        let mut w = csv::Writer::from_writer(Vec::new());
        match &self.results {
            Results::Identities { rows } => {
                w.write_record(["identity", "graph", "weights", "k", "status", "paths", "lhs", "rhs"]).unwrap();
                for r in rows {
                    w.write_record([
                        enum_name(&r.identity),
                        r.graph.clone(),
                        enum_name(&r.weights),
                        r.k.to_string(),
                        r.status.clone(),
                        r.paths.to_string(),
                        r.lhs.to_string(),
                        r.rhs.to_string(),
                    ])
                    .unwrap();
                }
            }
            Results::MonteCarlo { report, notes } => {
                for n in notes {
                    out.push_str(&format!("# note: {n}\n"));
                }
                out.push_str(&report.to_csv().expect("in-memory csv"));
            }
            Results::Predictions { rows } => {
                w.write_record(["k", "l", "gamma", "prediction"]).unwrap();
                for r in rows {
                    w.write_record([r.k.clone(), r.l.clone(), r.gamma.to_string(), r.prediction.to_string()]).unwrap();
                }
            }
        }
        out.push_str(std::str::from_utf8(&w.into_inner().unwrap()).expect("csv is UTF-8"));
        for g in &self.gates {
            out.push_str(&format!("# {}\n", g.line()));
        }
        out
    }
}

fn enum_name<T: Serialize>(v: &T) -> String {
    serde_json::to_value(v).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default()
}

/// Why a run did not produce a report.
#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] overlap_core::Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => EXIT_INVALID,
            RunError::Core(_) => EXIT_FAIL,
        }
    }
}

pub fn run(config: &ExperimentConfig) -> Result<Report, RunError> {
    config.validate()?;
    let (results, gates) = match config.mode {
        Mode::Identities => run_identities(config)?,
        Mode::Predict => run_predict(config)?,
        Mode::WignerMc | Mode::CovarianceMc | Mode::C1Mc => run_mc(config)?,
    };
    Ok(Report {
        library_version: overlap_core::VERSION.to_string(),
        seed: config.seed,
        config: config.clone(),
        results,
        gates,
    })
}

/// Writes `contents` to `path` through a temporary file in the same
/// directory, so readers never observe a partial report.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

fn identity_row(check: IdentityCheck, graph: &str, weights: WeightModel) -> IdentityRow {
    let status = match (check.holds, check.exact) {
        (true, true) => "exact-pass",
        (true, false) => "tolerance-pass",
        (false, _) => "fail",
    };
    IdentityRow {
        identity: check.identity,
        graph: graph.to_string(),
        weights,
        k: check.k,
        status: status.to_string(),
        paths: check.paths,
        lhs: check.lhs,
        rhs: check.rhs,
        max_abs_error: check.max_abs_error,
    }
}

/// Distinct, reproducible phase seed for each graph of the suite.
fn phase_seed(seed: u64, graph: &str) -> u64 {
    graph.bytes().fold(seed ^ 0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

fn run_identities(config: &ExperimentConfig) -> Result<(Results, Vec<Gate>), RunError> {
    let suite = config.identity_suite();
    let mut rows = Vec::new();
    let regular: Vec<(String, PhasedGraph)> = suite
        .complete
        .iter()
        .map(|&n| (format!("K{n}"), PhasedGraph::complete(n)))
        .chain(suite.cycles.iter().map(|&n| (format!("C{n}"), PhasedGraph::cycle(n).expect("validated"))))
        .collect();
    for (name, base) in &regular {
        for &w in &suite.weights {
            let g = match w.phases() {
                Some(model) => base.with_random_phases(model, phase_seed(config.seed, name)),
                None => base.clone(),
            };
            for k in 1..=suite.max_k {
                rows.push(identity_row(nbt_paths::verify_nb_paths_regular(&g, k)?, name, w));
                rows.push(identity_row(nbt_paths::verify_nbt_closed_regular(&g, k)?, name, w));
            }
        }
    }
    for &[m, n] in &suite.bipartite {
        // path sums hold with either part as V; the closed-path identity needs c >= d, i.e. the smaller part as V
        let mut sides = vec![(m, n)];
        if m != n {
            sides.push((n, m));
        }
        for (nv, nw) in sides {
            let name = format!("K{nv},{nw}");
            let base = BipartitePhasedGraph::complete(nv, nw);
            for &w in &suite.weights {
                let g = match w.phases() {
                    Some(model) => base.with_random_phases(model, phase_seed(config.seed, &name)),
                    None => base.clone(),
                };
                for k in 1..=suite.max_k {
                    rows.push(identity_row(nbt_paths::verify_nb_paths_biregular(&g, k)?, &name, w));
                    if nv <= nw {
                        rows.push(identity_row(nbt_paths::verify_nbt_closed_biregular(&g, k)?, &name, w));
                    }
                }
            }
        }
    }
    let gates = [
        Identity::NbPathsRegular,
        Identity::NbtClosedRegular,
        Identity::NbPathsBiregular,
        Identity::NbtClosedBiregular,
    ]
    .into_iter()
    .map(|id| {
        let of_kind: Vec<&IdentityRow> = rows.iter().filter(|r| r.identity == id).collect();
        let failed = of_kind.iter().filter(|r| r.status == "fail").count();
        let exact = of_kind.iter().filter(|r| r.status == "exact-pass").count();
        Gate {
            name: format!("identity {}", enum_name(&id)),
            pass: failed == 0,
            detail: format!("{} checks, {exact} exact, {failed} failed", of_kind.len()),
        }
    })
    .collect();
    Ok((Results::Identities { rows }, gates))
}

fn run_predict(config: &ExperimentConfig) -> Result<(Results, Vec<Gate>), RunError> {
    let table = config.predict_table();
    let moments = EntryMoments { d2: table.d2, m4: table.m4, beta: table.beta };
    let mut rows = Vec::new();
    for &gamma in &table.gammas {
        let ratios = match table.target {
            Target::Wigner => Ratios::Wigner { a: 1.0, b: 1.0, delta: gamma },
            Target::SampleCovariance => {
                let s = gamma.sqrt();
                Ratios::SampleCovariance { a1: 1.0, a2: 1.0, b1: 1.0, b2: 1.0, delta1: s, delta2: s }
            }
        };
        for f in &table.functions {
            for g in &table.functions {
                let req = StatisticRequest { f: f.clone(), g: g.clone(), ratios, moments };
                rows.push(PredictionRow { k: f.label(), l: g.label(), gamma, prediction: statistics::predict(&req)? });
            }
        }
    }
    Ok((Results::Predictions { rows }, Vec::new()))
}

/// Additive finite-size allowance: `0.05 (1 + |p|)` at `n = 256`, scaling as `1/n`.
pub fn finite_size_allowance(n: usize, prediction: f64) -> f64 {
    0.05 * 256.0 / n as f64 * (1.0 + prediction.abs())
}

/// `|estimate - prediction| <= 4 stderr + allowance`.
pub fn within_band(estimate: f64, stderr: f64, prediction: f64, n: usize) -> bool {
    (estimate - prediction).abs() <= 4.0 * stderr + finite_size_allowance(n, prediction)
}

fn run_mc(config: &ExperimentConfig) -> Result<(Results, Vec<Gate>), RunError> {
    let geometry = config.geometry_spec()?;
    let ratios = config.ratios()?;
    let moments = EntryMoments { d2: config.diagonal.d2(), m4: config.entries.m4(), beta: config.entries.beta() };
    let predict = |f: &TestFunction, g: &TestFunction| {
        statistics::predict(&StatisticRequest { f: f.clone(), g: g.clone(), ratios, moments }).ok()
    };
    let report =
        statistics::mc_covariance(&geometry, &config.f, config.g_functions(), config.trials, config.seed, &predict)?;
    let mut notes = Vec::new();
    let outside = config.outside_hypotheses();
    if outside {
        notes.push("outside theorem hypotheses: smooth non-polynomial function with entries lacking a Poincare inequality; gates not asserted".to_string());
    }
    let mut gates = Vec::new();
    if !outside {
        for row in &report.rows {
            let Some(p) = row.prediction else { continue };
            gates.push(Gate {
                name: format!("cov({},{})", row.k, row.l),
                pass: within_band(row.estimate, row.stderr, p, config.n),
                detail: format!(
                    "estimate {:.6} stderr {:.6} prediction {:.6} allowance {:.6}",
                    row.estimate,
                    row.stderr,
                    p,
                    finite_size_allowance(config.n, p)
                ),
            });
        }
    }
    if config.gaussianity {
        for s in &report.statistics {
            let Some(shape) = s.shape else { continue };
            gates.push(Gate {
                name: format!("gaussianity {}({})", s.side, s.function),
                pass: shape.skewness_z().abs() <= 5.0 && shape.kurtosis_z().abs() <= 5.0,
                detail: format!("skewness z {:.3}, excess kurtosis z {:.3}", shape.skewness_z(), shape.kurtosis_z()),
            });
        }
    }
    Ok((Results::MonteCarlo { report, notes }, gates))
}

/// Chebyshev coefficients of a registry function, as written by `coeffs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientDump {
    pub function: String,
    pub series: ChebSeries,
}
