//! Experiment configuration: the JSON document every run starts from.

use std::path::{Path, PathBuf};

use overlap_core::statistics::{Ratios, SmoothFunction, Target, TestFunction};
use overlap_core::{DiagonalSpec, EntryDistribution, Normalization, PhaseModel};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Identities,
    WignerMc,
    CovarianceMc,
    C1Mc,
    Predict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Matrix normalization; `root` divides by `√n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormalizationChoice {
    #[default]
    Standard,
    Shifted,
    Root,
}

impl NormalizationChoice {
    pub fn resolve(self, n: usize) -> Normalization {
        match self {
            NormalizationChoice::Standard => Normalization::Standard,
            NormalizationChoice::Shifted => Normalization::Shifted,
            NormalizationChoice::Root => Normalization::Root { reference: n as f64 },
        }
    }
}

/// Edge weights used by the identity suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightModel {
    AllOnes,
    Sign,
    UnitCircle,
}

impl WeightModel {
    pub fn phases(self) -> Option<PhaseModel> {
        match self {
            WeightModel::AllOnes => None,
            WeightModel::Sign => Some(PhaseModel::Sign),
            WeightModel::UnitCircle => Some(PhaseModel::UnitCircle),
        }
    }
}

/// Graphs and path lengths covered by `identities` mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IdentitySuite {
    pub max_k: usize,
    /// Sizes of complete graphs `K_n`.
    pub complete: Vec<usize>,
    /// Sizes of cycles `C_n`.
    pub cycles: Vec<usize>,
    /// Complete bipartite graphs `K_{m,n}`, given as `[m, n]`.
    pub bipartite: Vec<[usize; 2]>,
    pub weights: Vec<WeightModel>,
}

impl Default for IdentitySuite {
    fn default() -> Self {
        IdentitySuite {
            max_k: 6,
            complete: (3..=7).collect(),
            cycles: (3..=12).collect(),
            bipartite: (2..=5).flat_map(|m| (2..=m).map(move |n| [m, n])).collect(),
            weights: vec![WeightModel::AllOnes, WeightModel::Sign, WeightModel::UnitCircle],
        }
    }
}

/// Closed-form table produced by `predict` mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PredictTable {
    pub target: Target,
    pub functions: Vec<TestFunction>,
    pub gammas: Vec<f64>,
    pub d2: f64,
    pub m4: f64,
    pub beta: u8,
}

impl Default for PredictTable {
    fn default() -> Self {
        PredictTable {
            target: Target::Wigner,
            functions: (1..=6).map(TestFunction::Cheb).collect(),
            gammas: vec![0.25, 0.5, 1.0],
            d2: 0.0,
            m4: 1.0,
            beta: 1,
        }
    }
}

/// Overlap geometry as fractions of the base size `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GeometryRatios {
    Wigner { a: f64, b: f64, delta: f64 },
    Rect { a1: f64, a2: f64, b1: f64, b2: f64, delta1: f64, delta2: f64 },
}

/// `round(ratio · n)`.
pub fn scaled(ratio: f64, n: usize) -> usize {
    (ratio * n as f64).round() as usize
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub mode: Mode,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Base size: matrix dimensions are `round(ratio · n)` and predictions
    /// use the ratios of the rounded sizes to `n`.
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub geometry: Option<GeometryRatios>,
    #[serde(default = "default_entries")]
    pub entries: EntryDistribution,
    #[serde(default = "default_diagonal")]
    pub diagonal: DiagonalSpec,
    #[serde(default)]
    pub normalization: NormalizationChoice,
    /// Functions applied to `A`.
    #[serde(default)]
    pub f: Vec<TestFunction>,
    /// Functions applied to `B`; defaults to `f`.
    #[serde(default)]
    pub g: Vec<TestFunction>,
    /// Also gate on skewness and excess kurtosis z-scores (|z| <= 5).
    #[serde(default)]
    pub gaussianity: bool,
    #[serde(default)]
    pub identities: Option<IdentitySuite>,
    #[serde(default)]
    pub predict: Option<PredictTable>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

fn default_seed() -> u64 {
    1
}

fn default_n() -> usize {
    256
}

fn default_trials() -> usize {
    1000
}

fn default_entries() -> EntryDistribution {
    EntryDistribution::Rademacher
}

fn default_diagonal() -> DiagonalSpec {
    DiagonalSpec::Zero
}

/// Rejected configuration; the CLI exits with status 2.
#[derive(Debug, thiserror::Error)]
#[error("invalid config: {0}")]
pub struct ConfigError(pub String);

impl ExperimentConfig {
    /// Defaults for `mode` with no other fields set.
    pub fn for_mode(mode: Mode) -> Self {
        serde_json::from_value(serde_json::json!({ "mode": mode })).expect("defaults deserialize")
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| ConfigError(format!("{}: {e}", path.display())))
    }

    /// Functions for `B`.
    pub fn g_functions(&self) -> &[TestFunction] {
        if self.g.is_empty() {
            &self.f
        } else {
            &self.g
        }
    }

    pub fn identity_suite(&self) -> IdentitySuite {
        self.identities.clone().unwrap_or_default()
    }

    pub fn predict_table(&self) -> PredictTable {
        self.predict.clone().unwrap_or_default()
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let err = |m: String| Err(ConfigError(m));
        match self.mode {
            Mode::Identities => {
                let suite = self.identity_suite();
                if suite.max_k == 0 {
                    return err("identities.max_k must be positive".into());
                }
                if suite.cycles.iter().any(|&n| n < 3) {
                    return err("cycles need at least 3 vertices".into());
                }
                if suite.complete.iter().any(|&n| n < 3) {
                    return err("complete graphs need at least 3 vertices".into());
                }
                if suite.bipartite.iter().flatten().any(|&n| n < 2) {
                    return err("bipartite parts need at least 2 vertices".into());
                }
                Ok(())
            }
            Mode::Predict => {
                let t = self.predict_table();
                if t.functions.is_empty() || t.gammas.is_empty() {
                    return err("predict needs at least one function and one gamma".into());
                }
                if t.gammas.iter().any(|g| !(0.0..=1.0).contains(g)) {
                    return err("gammas must lie in [0, 1]".into());
                }
                if !matches!(t.beta, 1 | 2) {
                    return err(format!("beta must be 1 or 2, got {}", t.beta));
                }
                Ok(())
            }
            Mode::WignerMc | Mode::CovarianceMc | Mode::C1Mc => {
                if self.trials < 100 {
                    return err(format!("trials must be at least 100, got {}", self.trials));
                }
                if self.f.is_empty() {
                    return err("f must list at least one test function".into());
                }
                let geometry = self.geometry.ok_or_else(|| ConfigError("geometry is required".into()))?;
                match (self.mode, geometry) {
                    (Mode::CovarianceMc, GeometryRatios::Rect { .. }) => {}
                    (Mode::WignerMc | Mode::C1Mc, GeometryRatios::Wigner { .. }) => {}
                    _ => return err("geometry does not match mode".into()),
                }
                if self.mode == Mode::C1Mc
                    && self.f.iter().chain(self.g_functions()).any(|f| !matches!(f, TestFunction::Smooth(_)))
                {
                    return err("c1-mc takes smooth functions only".into());
                }
                self.geometry_spec()?;
                Ok(())
            }
        }
    }

    /// Core geometry with integer sizes.
    pub fn geometry_spec(&self) -> Result<overlap_core::Geometry, ConfigError> {
        let n = self.n;
        let normalization = self.normalization.resolve(n);
        let geometry = match self.geometry.ok_or_else(|| ConfigError("geometry is required".into()))? {
            GeometryRatios::Wigner { a, b, delta } => overlap_core::Geometry::Wigner(overlap_core::WignerOverlapSpec {
                a: scaled(a, n),
                b: scaled(b, n),
                delta: scaled(delta, n),
                offdiag: self.entries,
                diag: self.diagonal,
                normalization,
            }),
            GeometryRatios::Rect { a1, a2, b1, b2, delta1, delta2 } => {
                overlap_core::Geometry::Rect(overlap_core::RectOverlapSpec {
                    a1: scaled(a1, n),
                    a2: scaled(a2, n),
                    b1: scaled(b1, n),
                    b2: scaled(b2, n),
                    delta1: scaled(delta1, n),
                    delta2: scaled(delta2, n),
                    entries: self.entries,
                    normalization,
                })
            }
        };
        let checked = match &geometry {
            overlap_core::Geometry::Wigner(s) => s.validate(),
            overlap_core::Geometry::Rect(s) => s.validate(),
        };
        checked.map_err(|e| ConfigError(e.to_string()))?;
        Ok(geometry)
    }

    /// Size ratios of the rounded integer sizes to `n`, as the predictors
    /// expect them.
    pub fn ratios(&self) -> Result<Ratios, ConfigError> {
        let n = self.n as f64;
        Ok(match self.geometry_spec()? {
            overlap_core::Geometry::Wigner(s) => {
                Ratios::Wigner { a: s.a as f64 / n, b: s.b as f64 / n, delta: s.delta as f64 / n }
            }
            overlap_core::Geometry::Rect(s) => Ratios::SampleCovariance {
                a1: s.a1 as f64 / n,
                a2: s.a2 as f64 / n,
                b1: s.b1 as f64 / n,
                b2: s.b2 as f64 / n,
                delta1: s.delta1 as f64 / n,
                delta2: s.delta2 as f64 / n,
            },
        })
    }

    /// True when a smooth function outside the polynomials is evaluated on
    /// entries without a Poincaré inequality, where the smooth-function
    /// limit theorem makes no claim.
    pub fn outside_hypotheses(&self) -> bool {
        let non_polynomial = self
            .f
            .iter()
            .chain(self.g_functions())
            .any(|f| matches!(f, TestFunction::Smooth(SmoothFunction::Exp | SmoothFunction::AbsCube)));
        let poincare = self.entries.has_poincare()
            && match self.diagonal {
                DiagonalSpec::Zero => true,
                DiagonalSpec::Scaled { dist, .. } => dist.has_poincare(),
            };
        non_polynomial && !poincare
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let c: ExperimentConfig = serde_json::from_str(r#"{"mode": "identities"}"#).unwrap();
        assert_eq!(c.seed, 1);
        assert_eq!(c.identity_suite().complete, vec![3, 4, 5, 6, 7]);
        assert_eq!(c.identity_suite().bipartite.len(), 10);
        c.validate().unwrap();
    }

    #[test]
    fn mc_config_parses() {
        let c: ExperimentConfig = serde_json::from_str(
            r#"{"mode": "wigner-mc", "n": 64, "trials": 100,
                "geometry": {"a": 1, "b": 1, "delta": 0.5},
                "entries": {"kind": "standard-gaussian"},
                "diagonal": {"kind": "scaled", "dist": {"kind": "standard-gaussian"}, "d2": 1.0},
                "f": [{"cheb": 1}, {"cheb": 2}], "format": "csv"}"#,
        )
        .unwrap();
        c.validate().unwrap();
        assert_eq!(c.g_functions().len(), 2);
        assert_eq!(c.ratios().unwrap(), Ratios::Wigner { a: 1.0, b: 1.0, delta: 0.5 });
    }

    #[test]
    fn bad_configs_rejected() {
        let parse = |s: &str| serde_json::from_str::<ExperimentConfig>(s);
        assert!(parse(r#"{"mode": "nope"}"#).is_err());
        assert!(parse(r#"{"mode": "predict", "typo": 1}"#).is_err());
        let c = parse(r#"{"mode": "wigner-mc", "trials": 50, "geometry": {"a":1,"b":1,"delta":1}, "f":[{"cheb":1}]}"#)
            .unwrap();
        assert!(c.validate().is_err());
        let c = parse(r#"{"mode": "covariance-mc", "geometry": {"a":1,"b":1,"delta":1}, "f":[{"cheb":1}]}"#).unwrap();
        assert!(c.validate().is_err());
        let c = parse(r#"{"mode": "wigner-mc", "geometry": {"a":1,"b":1,"delta":2}, "f":[{"cheb":1}]}"#).unwrap();
        assert!(c.validate().is_err());
        let c = parse(r#"{"mode": "c1-mc", "geometry": {"a":1,"b":1,"delta":1}, "f":[{"cheb":1}]}"#).unwrap();
        assert!(c.validate().is_err());
    }

    #[test]
    fn hypotheses_label() {
        let mut c: ExperimentConfig =
            serde_json::from_str(r#"{"mode": "c1-mc", "geometry": {"a":1,"b":1,"delta":1}, "f":[{"smooth":"exp"}]}"#)
                .unwrap();
        assert!(c.outside_hypotheses());
        c.entries = EntryDistribution::StandardGaussian;
        assert!(!c.outside_hypotheses());
        c.f = vec![TestFunction::Smooth(SmoothFunction::Cube)];
        c.entries = EntryDistribution::Rademacher;
        assert!(!c.outside_hypotheses());
    }
}
