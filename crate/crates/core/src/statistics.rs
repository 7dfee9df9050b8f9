//! Linear eigenvalue statistics, Monte Carlo covariance estimation and the
//! closed-form limiting covariances they are compared against.

use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chebyshev::{self, ChebSeries, Poly};
use crate::combinatorics::catalan;
use crate::ensembles::{
    build_w, normalize_wigner, sample_rect_a, sample_rect_pair, sample_wigner_a, sample_wigner_pair, Geometry,
    MatrixPair, Side,
};
use crate::error::{Error, Result};
use crate::matrix::HermitianMatrix;

/// Tail budget `Σ_{k>K} k c_k²` for adaptively truncated series.
pub const SERIES_TAIL_TOLERANCE: f64 = 1e-10;

const MAX_SERIES_DEGREE: usize = 4096;

/// Smooth test functions with a known name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SmoothFunction {
    /// `x³`
    #[serde(rename = "x^3")]
    Cube,
    /// `eˣ`
    Exp,
    /// `|x|³`
    #[serde(rename = "|x|^3")]
    AbsCube,
    /// A user-supplied Chebyshev series.
    Series(ChebSeries),
}

impl SmoothFunction {
    pub fn id(&self) -> &'static str {
        match self {
            SmoothFunction::Cube => "x^3",
            SmoothFunction::Exp => "exp",
            SmoothFunction::AbsCube => "|x|^3",
            SmoothFunction::Series(_) => "series",
        }
    }

    /// Registry lookup by [`SmoothFunction::id`].
    pub fn from_id(id: &str) -> Option<Self> {
        match id {
            "x^3" | "cube" => Some(SmoothFunction::Cube),
            "exp" => Some(SmoothFunction::Exp),
            "|x|^3" | "abs-cube" => Some(SmoothFunction::AbsCube),
            _ => None,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            SmoothFunction::Cube => x * x * x,
            SmoothFunction::Exp => x.exp(),
            SmoothFunction::AbsCube => x.abs().powi(3),
            SmoothFunction::Series(s) => s.eval(x),
        }
    }

    /// Chebyshev series on `[-1, 1]`, truncated adaptively: the degree `K`
    /// doubles until `Σ_{K<k<=2K} k c_k² < 1e-10`.
    pub fn series(&self) -> Result<ChebSeries> {
        if let SmoothFunction::Series(s) = self {
            return Ok(s.clone());
        }
        let mut k = 16;
        loop {
            let s = chebyshev::cheb_coefficients(|x| self.eval(x), 2 * k, 8 * k)?;
            let tail = s.weighted_tail(k + 1);
            if tail < SERIES_TAIL_TOLERANCE {
                return Ok(s.truncated(k));
            }
            if 2 * k > MAX_SERIES_DEGREE {
                return Err(Error::SeriesTail { tail });
            }
            k *= 2;
        }
    }
}

/// The `f` in `N(f, M) = Tr f(M)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TestFunction {
    /// `T_k`
    Cheb(usize),
    /// `x^k`
    Monomial(usize),
    Smooth(SmoothFunction),
}

impl TestFunction {
    /// Column label in reports: the index for `T_k` and `x^k`, the registry
    /// id for smooth functions.
    pub fn label(&self) -> String {
        match self {
            TestFunction::Cheb(k) | TestFunction::Monomial(k) => k.to_string(),
            TestFunction::Smooth(f) => f.id().to_string(),
        }
    }

    /// Chebyshev series of the function.
    pub fn series(&self) -> Result<ChebSeries> {
        match self {
            TestFunction::Cheb(k) => Ok(ChebSeries::unit(*k)),
            TestFunction::Monomial(k) => Ok(ChebSeries::from_poly(&monomial(*k))),
            TestFunction::Smooth(f) => f.series(),
        }
    }
}

fn monomial(k: usize) -> Poly {
    let mut coeffs = vec![0; k + 1];
    coeffs[k] = 1;
    Poly::from_integers(&coeffs)
}

/// `N(f, M)` for one function.
///
/// `T_k` uses the matrix recurrence, `x^k` the power sequence, and smooth
/// functions a checked eigendecomposition.
pub fn linear_statistic(f: &TestFunction, m: &HermitianMatrix) -> Result<f64> {
    match f {
        TestFunction::Cheb(k) => Ok(chebyshev::trace_cheb(*k, m)),
        TestFunction::Monomial(k) => chebyshev::trace_poly(&monomial(*k), m),
        TestFunction::Smooth(g) => Ok(m.eigenvalues()?.iter().map(|&x| g.eval(x)).sum()),
    }
}

/// `N(f, M)` for several functions at once, sharing matrix products and at
/// most one eigendecomposition.
pub fn linear_statistics(fs: &[TestFunction], m: &HermitianMatrix) -> Result<Vec<f64>> {
    let max_cheb = fs.iter().filter_map(|f| if let TestFunction::Cheb(k) = f { Some(*k) } else { None }).max();
    let max_pow = fs.iter().filter_map(|f| if let TestFunction::Monomial(k) = f { Some(*k) } else { None }).max();
    let cheb = max_cheb.map(|k| chebyshev::cheb_traces(m, k));
    let pow = max_pow.map(|k| chebyshev::power_traces(m, k));
    let eig = if fs.iter().any(|f| matches!(f, TestFunction::Smooth(_))) { Some(m.eigenvalues()?) } else { None };
    Ok(fs
        .iter()
        .map(|f| match f {
            TestFunction::Cheb(k) => cheb.as_ref().expect("computed above")[*k],
            TestFunction::Monomial(k) => pow.as_ref().expect("computed above")[*k],
            TestFunction::Smooth(g) => eig.as_ref().expect("computed above").iter().map(|&x| g.eval(x)).sum(),
        })
        .collect())
}

/// Neumaier's compensated summation.
#[derive(Debug, Clone, Copy, Default)]
struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

fn compensated(xs: impl IntoIterator<Item = f64>) -> f64 {
    let mut s = CompensatedSum::default();
    xs.into_iter().for_each(|x| s.add(x));
    s.value()
}

fn mean(xs: &[f64]) -> f64 {
    compensated(xs.iter().copied()) / xs.len() as f64
}

/// Skewness and excess kurtosis with their null standard errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gaussianity {
    pub skewness: f64,
    pub skewness_se: f64,
    pub excess_kurtosis: f64,
    pub kurtosis_se: f64,
}

impl Gaussianity {
    pub fn skewness_z(&self) -> f64 {
        self.skewness / self.skewness_se
    }

    pub fn kurtosis_z(&self) -> f64 {
        self.excess_kurtosis / self.kurtosis_se
    }
}

fn shape(samples: &[f64]) -> Option<Gaussianity> {
    let n = samples.len() as f64;
    let m = mean(samples);
    let m2 = compensated(samples.iter().map(|x| (x - m).powi(2))) / n;
    if m2 <= 0.0 || !m2.is_finite() {
        return None;
    }
    let m3 = compensated(samples.iter().map(|x| (x - m).powi(3))) / n;
    let m4 = compensated(samples.iter().map(|x| (x - m).powi(4))) / n;
    Some(Gaussianity {
        skewness: m3 / m2.powf(1.5),
        skewness_se: (6.0 / n).sqrt(),
        excess_kurtosis: m4 / (m2 * m2) - 3.0,
        kurtosis_se: (24.0 / n).sqrt(),
    })
}

/// Sample skewness and excess kurtosis, with standard errors `√(6/T)` and
/// `√(24/T)` valid under a Gaussian null.
pub fn gaussianity_diagnostics(samples: &[f64]) -> Result<Gaussianity> {
    if samples.len() < 1000 {
        return Err(Error::InvalidArgument(format!("need at least 1000 samples, got {}", samples.len())));
    }
    shape(samples).ok_or_else(|| Error::Degenerate("sample variance is zero".into()))
}

/// One `(f, g)` cell of a Monte Carlo covariance report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovarianceRow {
    pub k: String,
    pub l: String,
    pub estimate: f64,
    pub stderr: f64,
    pub count: usize,
    pub prediction: Option<f64>,
    /// `(estimate - prediction) / stderr`; absent without a prediction or
    /// when the standard error is zero.
    pub zscore: Option<f64>,
}

/// Distribution summary of one statistic across trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatisticSummary {
    pub side: String,
    pub function: String,
    pub mean: f64,
    pub variance: f64,
    pub shape: Option<Gaussianity>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MCReport {
    pub trials: usize,
    pub seed: u64,
    pub rows: Vec<CovarianceRow>,
    pub statistics: Vec<StatisticSummary>,
}

impl MCReport {
    /// CSV with columns `k,l,estimate,stderr,prediction,zscore`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["k", "l", "estimate", "stderr", "prediction", "zscore"]).map_err(|e| Error::Io(e.into()))?;
        let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
        for r in &self.rows {
            w.write_record([
                r.k.clone(),
                r.l.clone(),
                r.estimate.to_string(),
                r.stderr.to_string(),
                opt(r.prediction),
                opt(r.zscore),
            ])
            .map_err(|e| Error::Io(e.into()))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }

    pub fn row(&self, k: &str, l: &str) -> Option<&CovarianceRow> {
        self.rows.iter().find(|r| r.k == k && r.l == l)
    }

    pub fn summary(&self, side: &str, function: &str) -> Option<&StatisticSummary> {
        self.statistics.iter().find(|s| s.side == side && s.function == function)
    }
}

/// Whether `B` is bit-identical to `A` for every sample of this geometry.
fn full_overlap(geometry: &Geometry) -> bool {
    match geometry {
        Geometry::Wigner(s) => s.a == s.b && s.delta == s.a,
        Geometry::Rect(s) => s.a1 == s.b1 && s.a2 == s.b2 && s.delta1 == s.a1 && s.delta2 == s.a2,
    }
}

fn sample_pair(geometry: &Geometry, seed: u64, trial: u64) -> Result<MatrixPair> {
    match geometry {
        Geometry::Wigner(s) => sample_wigner_pair(s, seed, trial),
        Geometry::Rect(s) => sample_rect_pair(s, seed, trial),
    }
}

/// The normalized `A` alone.
fn sample_normalized_a(geometry: &Geometry, seed: u64, trial: u64) -> Result<HermitianMatrix> {
    match geometry {
        Geometry::Wigner(s) => normalize_wigner(&sample_wigner_a(s, seed, trial)?, s, Side::A),
        Geometry::Rect(s) => build_w(&sample_rect_a(s, seed, trial)?, s, Side::A),
    }
}

fn validate_geometry(geometry: &Geometry) -> Result<()> {
    match geometry {
        Geometry::Wigner(s) => s.validate(),
        Geometry::Rect(s) => s.validate(),
    }
}

/// Statistics `N(f, A)` for `f` in `fs` and `N(g, B)` for `g` in `gs`, one
/// row per trial in trial order.
fn trial_statistics(
    geometry: &Geometry,
    fs: &[TestFunction],
    gs: &[TestFunction],
    trials: usize,
    seed: u64,
) -> Result<Vec<(Vec<f64>, Vec<f64>)>> {
    let same = full_overlap(geometry);
    (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            if same {
                let a = sample_normalized_a(geometry, seed, t)?;
                let mut all = fs.to_vec();
                all.extend_from_slice(gs);
                let mut values = linear_statistics(&all, &a)?;
                let bs = values.split_off(fs.len());
                Ok((values, bs))
            } else {
                let (a, b) = sample_pair(geometry, seed, t)?.normalized()?;
                Ok((linear_statistics(fs, &a)?, linear_statistics(gs, &b)?))
            }
        })
        .collect()
}

/// Monte Carlo estimate of `Cov(N(f, A), N(g, B))` for all `f` in `fs`,
/// `g` in `gs`.
///
/// The estimate uses Bessel's correction; its standard error is the sample
/// standard deviation of the centred products divided by `√T`. Trials run in
/// parallel but are reduced in trial order with compensated sums, so the
/// report depends only on the inputs.
pub fn mc_covariance(
    geometry: &Geometry,
    fs: &[TestFunction],
    gs: &[TestFunction],
    trials: usize,
    seed: u64,
    predict: &dyn Fn(&TestFunction, &TestFunction) -> Option<f64>,
) -> Result<MCReport> {
    if trials < 100 {
        return Err(Error::InvalidArgument(format!("need at least 100 trials, got {trials}")));
    }
    validate_geometry(geometry)?;
    let records = trial_statistics(geometry, fs, gs, trials, seed)?;
    let column = |side: usize, i: usize| -> Vec<f64> {
        records.iter().map(|r| if side == 0 { r.0[i] } else { r.1[i] }).collect()
    };
    let xs: Vec<Vec<f64>> = (0..fs.len()).map(|i| column(0, i)).collect();
    let ys: Vec<Vec<f64>> = (0..gs.len()).map(|j| column(1, j)).collect();
    let t = trials as f64;

    let mut rows = Vec::with_capacity(fs.len() * gs.len());
    for (f, x) in fs.iter().zip(&xs) {
        let mx = mean(x);
        for (g, y) in gs.iter().zip(&ys) {
            let my = mean(y);
            let products: Vec<f64> = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).collect();
            let sum = compensated(products.iter().copied());
            let estimate = sum / (t - 1.0);
            let pm = sum / t;
            let pvar = compensated(products.iter().map(|p| (p - pm).powi(2))) / (t - 1.0);
            let stderr = (pvar / t).sqrt();
            let prediction = predict(f, g);
            let zscore = prediction.filter(|_| stderr > 0.0).map(|p| (estimate - p) / stderr);
            rows.push(CovarianceRow {
                k: f.label(),
                l: g.label(),
                estimate,
                stderr,
                count: trials,
                prediction,
                zscore,
            });
        }
    }

    let summarize = |side: &str, f: &TestFunction, x: &[f64]| {
        let m = mean(x);
        StatisticSummary {
            side: side.to_string(),
            function: f.label(),
            mean: m,
            variance: compensated(x.iter().map(|v| (v - m).powi(2))) / (t - 1.0),
            shape: shape(x),
        }
    };
    let statistics = fs
        .iter()
        .zip(&xs)
        .map(|(f, x)| summarize("A", f, x))
        .chain(gs.iter().zip(&ys).map(|(g, y)| summarize("B", g, y)))
        .collect();
    Ok(MCReport { trials, seed, rows, statistics })
}

/// Limit of `Cov(N°(T_k, Ã), N°(T_l, B̃))` for overlapping real Wigner
/// matrices with diagonal variance `d2` and off-diagonal fourth moment `m4`.
pub fn predict_wigner(k: usize, l: usize, a: f64, b: f64, delta: f64, d2: f64, m4: f64) -> f64 {
    let gamma = delta / (a * b).sqrt();
    match (k, l) {
        _ if k != l => 0.0,
        (1, 1) => d2 / 4.0 * gamma,
        (2, 2) => (m4 - 1.0) / 2.0 * gamma * gamma,
        _ if k >= 3 => k as f64 / 2.0 * gamma.powi(k as i32),
        _ => 0.0,
    }
}

fn check_beta(beta: u8) -> Result<f64> {
    match beta {
        1 | 2 => Ok(beta as f64),
        _ => Err(Error::InvalidArgument(format!("beta must be 1 or 2, got {beta}"))),
    }
}

/// The same limit for the `±1` (`β = 1`) and unit-circle (`β = 2`) models
/// with zero diagonal.
pub fn predict_simple_wigner(k: usize, l: usize, a: f64, b: f64, delta: f64, beta: u8) -> Result<f64> {
    let beta = check_beta(beta)?;
    if k != l || k < 3 {
        return Ok(0.0);
    }
    Ok(k as f64 / (2.0 * beta) * (delta / (a * b).sqrt()).powi(k as i32))
}

/// Limit of `Cov(N°(T_k, W_A), N°(T_l, W_B))` for overlapping sample
/// covariance matrices.
pub fn predict_cov_matrices(k: usize, l: usize, gamma: f64, m4: f64) -> f64 {
    match (k, l) {
        _ if k != l => 0.0,
        (0, 0) => 0.0,
        (1, 1) => (m4 - 1.0) / 4.0 * gamma,
        _ => k as f64 / 2.0 * gamma.powi(k as i32),
    }
}

/// The sample covariance limit for the `±1` and unit-circle models.
pub fn predict_simple_cov(k: usize, l: usize, gamma: f64, beta: u8) -> Result<f64> {
    let beta = check_beta(beta)?;
    if k != l || k < 2 {
        return Ok(0.0);
    }
    Ok(k as f64 / (2.0 * beta) * gamma.powi(k as i32))
}

/// Limiting covariance matrix of `(N°(f, Ã), N°(g, B̃))` from Chebyshev
/// coefficients. The series are taken as exact; use
/// [`SmoothFunction::series`] to truncate a function within the tail budget.
pub fn predict_c1(f: &ChebSeries, g: &ChebSeries, gamma: f64, d2: f64, m4: f64) -> Result<[[f64; 2]; 2]> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::InvalidArgument(format!("overlap ratio {gamma} outside [0, 1]")));
    }
    let pair = |p: &ChebSeries, q: &ChebSeries, gamma: f64| {
        let head = d2 / 2.0 * p.coeff(1) * q.coeff(1) * gamma + (m4 - 1.0) * p.coeff(2) * q.coeff(2) * gamma * gamma;
        let top = p.len().max(q.len());
        let tail = compensated((3..top).map(|k| k as f64 * p.coeff(k) * q.coeff(k) * gamma.powi(k as i32)));
        0.5 * (head + tail)
    };
    let v12 = pair(f, g, gamma);
    Ok([[pair(f, f, 1.0), v12], [v12, pair(g, g, 1.0)]])
}

/// `[c_0, ..., c_m]` of `C(x)^r`, the `r`-fold convolution power of the
/// Catalan sequence: `c_s = Σ_{s_1+...+s_r = s} Π C_{s_i}`.
fn catalan_power(r: usize, m: usize) -> Vec<f64> {
    let cat: Vec<f64> = (0..=m as u64).map(|s| catalan(s).to_f64().unwrap_or(f64::INFINITY)).collect();
    let mut acc = vec![0.0; m + 1];
    acc[0] = 1.0;
    for _ in 0..r {
        acc = (0..=m).map(|s| (0..=s).map(|i| acc[i] * cat[s - i]).sum()).collect();
    }
    acc
}

fn catalan_at_half(twice: usize) -> f64 {
    if twice % 2 == 1 {
        0.0
    } else {
        catalan(twice as u64 / 2).to_f64().unwrap_or(f64::INFINITY)
    }
}

/// Limit of `Cov(Tr(A/√t)^k, Tr(B/√t)^l)` with `a, b, Δ` the sizes divided
/// by `t`.
pub fn predict_monomial_trace_cov(k: usize, l: usize, a: f64, b: f64, delta: f64, d2: f64, m4: f64) -> f64 {
    if k == 0 || l == 0 {
        return 0.0;
    }
    let (kf, lf) = (k as f64, l as f64);
    let mut total = 0.0;
    if k % 2 == 1 && l % 2 == 1 {
        total += d2
            * kf
            * lf
            * catalan_at_half(k - 1)
            * catalan_at_half(l - 1)
            * delta
            * a.powf((kf - 1.0) / 2.0)
            * b.powf((lf - 1.0) / 2.0);
    }
    if k.is_multiple_of(2) && l.is_multiple_of(2) {
        total += (m4 - 1.0) * kf * lf / 2.0
            * catalan_at_half(k)
            * catalan_at_half(l)
            * delta
            * delta
            * a.powf(kf / 2.0 - 1.0)
            * b.powf(lf / 2.0 - 1.0);
    }
    for r in (3..=k.min(l)).filter(|r| (k - r).is_multiple_of(2) && (l - r).is_multiple_of(2)) {
        let (mk, ml) = ((k - r) / 2, (l - r) / 2);
        let fk = catalan_power(r, mk)[mk];
        let fl = catalan_power(r, ml)[ml];
        total += 2.0 * kf * lf / r as f64 * fk * fl * delta.powi(r as i32) * a.powi(mk as i32) * b.powi(ml as i32);
    }
    total
}

/// Which family of limit theorems a prediction comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Target {
    Wigner,
    SampleCovariance,
}

/// Size ratios (sizes divided by the reference scale `t_N`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "target", rename_all = "kebab-case")]
pub enum Ratios {
    Wigner { a: f64, b: f64, delta: f64 },
    SampleCovariance { a1: f64, a2: f64, b1: f64, b2: f64, delta1: f64, delta2: f64 },
}

impl Ratios {
    pub fn target(&self) -> Target {
        match self {
            Ratios::Wigner { .. } => Target::Wigner,
            Ratios::SampleCovariance { .. } => Target::SampleCovariance,
        }
    }

    pub fn gamma(&self) -> f64 {
        match *self {
            Ratios::Wigner { a, b, delta } => delta / (a * b).sqrt(),
            Ratios::SampleCovariance { a1, a2, b1, b2, delta1, delta2 } => delta1 * delta2 / (a1 * a2 * b1 * b2).sqrt(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |x: f64| x > 0.0 && x.is_finite();
        let fine = match *self {
            Ratios::Wigner { a, b, delta } => ok(a) && ok(b) && delta >= 0.0 && delta <= a.min(b),
            Ratios::SampleCovariance { a1, a2, b1, b2, delta1, delta2 } => {
                [a1, a2, b1, b2].into_iter().all(ok)
                    && delta1 >= 0.0
                    && delta2 >= 0.0
                    && delta1 <= a1.min(b1)
                    && delta2 <= a2.min(b2)
            }
        };
        if fine {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("invalid ratios {self:?}")))
        }
    }
}

/// Moments of the entry laws that survive in the limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntryMoments {
    pub d2: f64,
    pub m4: f64,
    pub beta: u8,
}

/// Everything needed to predict one covariance cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatisticRequest {
    pub f: TestFunction,
    pub g: TestFunction,
    pub ratios: Ratios,
    pub moments: EntryMoments,
}

/// Dispatches a request to the matching closed form.
///
/// Chebyshev pairs use the general theorem for real entries and the simple
/// model for `β = 2`; monomial pairs use the trace-of-powers formula; any
/// smooth function goes through the Chebyshev-coefficient covariance.
pub fn predict(req: &StatisticRequest) -> Result<f64> {
    req.ratios.validate()?;
    let EntryMoments { d2, m4, beta } = req.moments;
    match (&req.f, &req.g, req.ratios) {
        (TestFunction::Cheb(k), TestFunction::Cheb(l), Ratios::Wigner { a, b, delta }) => {
            if beta == 2 {
                predict_simple_wigner(*k, *l, a, b, delta, beta)
            } else {
                check_beta(beta)?;
                Ok(predict_wigner(*k, *l, a, b, delta, d2, m4))
            }
        }
        (TestFunction::Cheb(k), TestFunction::Cheb(l), r @ Ratios::SampleCovariance { .. }) => {
            if beta == 2 {
                predict_simple_cov(*k, *l, r.gamma(), beta)
            } else {
                check_beta(beta)?;
                Ok(predict_cov_matrices(*k, *l, r.gamma(), m4))
            }
        }
        (TestFunction::Monomial(k), TestFunction::Monomial(l), Ratios::Wigner { a, b, delta }) => {
            Ok(predict_monomial_trace_cov(*k, *l, a, b, delta, d2, m4))
        }
        (f, g, r @ Ratios::Wigner { .. }) if beta == 1 => {
            let v = predict_c1(&f.series()?, &g.series()?, r.gamma(), d2, m4)?;
            Ok(v[0][1])
        }
        _ => Err(Error::InvalidArgument(format!(
            "no closed form for ({}, {}) on {:?} with beta {beta}",
            req.f.label(),
            req.g.label(),
            req.ratios.target()
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{DiagonalSpec, EntryDistribution, Normalization, WignerOverlapSpec};
    use approx::assert_relative_eq;
    use num_bigint::BigUint;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_distr::{Exp1, StandardNormal};
    use rand_xoshiro::Xoshiro256PlusPlus;

    #[test]
    fn statistic_examples() {
        let m = HermitianMatrix::diagonal(&[0.5, -0.5, 0.25]);
        assert_eq!(linear_statistic(&TestFunction::Cheb(0), &m).unwrap(), 3.0);
        assert_eq!(linear_statistic(&TestFunction::Cheb(1), &m).unwrap(), 0.25);
        let sym = HermitianMatrix::diagonal(&[0.5, -0.5]);
        let cube = TestFunction::Smooth(SmoothFunction::Cube);
        assert!(linear_statistic(&cube, &sym).unwrap().abs() < 1e-15);
    }

    #[test]
    fn batched_statistics_agree_with_single() {
        let spec = WignerOverlapSpec {
            a: 30,
            b: 30,
            delta: 10,
            offdiag: EntryDistribution::UnitCircle,
            diag: DiagonalSpec::Scaled { dist: EntryDistribution::StandardGaussian, d2: 1.0 },
            normalization: Normalization::Standard,
        };
        let (a, _) = sample_wigner_pair(&spec, 5, 0).unwrap().normalized().unwrap();
        let fs: Vec<TestFunction> = (0..7)
            .map(TestFunction::Cheb)
            .chain((0..6).map(TestFunction::Monomial))
            .chain([TestFunction::Smooth(SmoothFunction::Exp), TestFunction::Smooth(SmoothFunction::Cube)])
            .collect();
        let batch = linear_statistics(&fs, &a).unwrap();
        for (f, v) in fs.iter().zip(batch) {
            let single = linear_statistic(f, &a).unwrap();
            assert_relative_eq!(v, single, epsilon = 1e-9, max_relative = 1e-9);
        }
    }

    #[test]
    fn predictor_examples() {
        assert_eq!(predict_wigner(3, 3, 1.0, 1.0, 1.0, 0.0, 1.0), 1.5);
        assert_eq!(predict_wigner(2, 2, 1.0, 1.0, 1.0, 0.0, 1.0), 0.0);
        assert_eq!(predict_wigner(2, 3, 1.0, 1.0, 1.0, 1.0, 3.0), 0.0);
        assert_eq!(predict_wigner(3, 3, 1.0, 1.0, 0.5, 0.0, 1.0), 0.1875);
        assert_eq!(predict_simple_wigner(4, 4, 1.0, 1.0, 1.0, 2).unwrap(), 1.0);
        assert_eq!(predict_simple_wigner(2, 2, 1.0, 1.0, 1.0, 1).unwrap(), 0.0);
        assert_eq!(predict_simple_wigner(3, 4, 1.0, 1.0, 1.0, 1).unwrap(), 0.0);
        assert!(predict_simple_wigner(3, 3, 1.0, 1.0, 1.0, 3).is_err());
        assert_eq!(predict_cov_matrices(1, 1, 1.0, 3.0), 0.5);
        assert_eq!(predict_cov_matrices(2, 2, 0.5, 3.0), 0.25);
        assert_eq!(predict_cov_matrices(1, 2, 0.5, 3.0), 0.0);
        assert_eq!(predict_simple_cov(1, 1, 1.0, 1).unwrap(), 0.0);
        assert_eq!(predict_simple_cov(2, 2, 1.0, 2).unwrap(), 0.5);
    }

    #[test]
    fn c1_examples() {
        let t3 = ChebSeries::unit(3);
        let v = predict_c1(&t3, &t3, 1.0, 0.0, 1.0).unwrap();
        assert_eq!(v, [[1.5, 1.5], [1.5, 1.5]]);
        let cube = SmoothFunction::Cube.series().unwrap();
        assert!((cube.coeff(1) - 0.75).abs() < 1e-12 && (cube.coeff(3) - 0.25).abs() < 1e-12);
        let v = predict_c1(&cube, &cube, 1.0, 0.0, 1.0).unwrap();
        assert!((v[0][0] - 3.0 / 32.0).abs() < 1e-12);
        let v = predict_c1(&cube, &cube, 1.0, 2.0, 3.0).unwrap();
        assert!((v[0][0] - 0.375).abs() < 1e-12);
        let v = predict_c1(&cube, &cube, 0.0, 2.0, 3.0).unwrap();
        assert_eq!(v[0][1], 0.0);
        assert!(predict_c1(&cube, &cube, 1.5, 2.0, 3.0).is_err());
    }

    #[test]
    fn smooth_series_converge() {
        for f in [SmoothFunction::Exp, SmoothFunction::AbsCube] {
            let s = f.series().unwrap();
            for x in [-1.0, -0.3, 0.0, 0.7, 1.0] {
                assert!((s.eval(x) - f.eval(x)).abs() < 1e-5, "{f:?} at {x}");
            }
        }
        // exp: c_k = 2 I_k(1), so c_1 = 2 I_1(1)
        let s = SmoothFunction::Exp.series().unwrap();
        assert!((s.coeff(1) - 1.130_318_207_984_97).abs() < 1e-13);
    }

    #[test]
    fn monomial_examples() {
        let (a, b, delta) = (1.0, 1.0, 0.5);
        assert_eq!(predict_monomial_trace_cov(1, 1, a, b, delta, 2.0, 3.0), 1.0);
        assert_eq!(predict_monomial_trace_cov(2, 2, a, b, delta, 2.0, 3.0), 2.0 * 2.0 * 0.25);
        assert_eq!(predict_monomial_trace_cov(1, 2, a, b, delta, 2.0, 3.0), 0.0);
        assert!((predict_monomial_trace_cov(3, 3, a, b, delta, 1.0, 3.0) - 5.25).abs() < 1e-12);
        assert!((predict_monomial_trace_cov(4, 4, a, b, delta, 1.0, 3.0) - 16.5).abs() < 1e-12);
        assert!((predict_monomial_trace_cov(3, 1, a, b, delta, 1.0, 3.0) - 1.5).abs() < 1e-12);
    }

    #[test]
    fn catalan_power_closed_form() {
        // [x^m] C(x)^r = r/(2m+r) binom(2m+r, m)
        for r in 1..7usize {
            let powers = catalan_power(r, 8);
            for (m, &v) in powers.iter().enumerate() {
                let n = 2 * m + r;
                let binom = num_integer::binomial(BigUint::from(n), BigUint::from(m));
                let expected = binom.to_f64().unwrap() * r as f64 / n as f64;
                assert!((v - expected).abs() < 1e-9 * expected.max(1.0), "r={r} m={m}");
            }
        }
    }

    #[test]
    fn gaussianity_checks() {
        assert!(matches!(gaussianity_diagnostics(&vec![1.0; 2000]), Err(Error::Degenerate(_))));
        assert!(gaussianity_diagnostics(&[1.0, 2.0]).is_err());
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(3);
        let normal: Vec<f64> = (0..100_000).map(|_| rng.sample(StandardNormal)).collect();
        let g = gaussianity_diagnostics(&normal).unwrap();
        assert!(g.skewness.abs() < 4.0 * g.skewness_se);
        assert!(g.excess_kurtosis.abs() < 5.0 * g.kurtosis_se);
        let exp: Vec<f64> = (0..100_000).map(|_| rng.sample(Exp1)).collect();
        assert!(gaussianity_diagnostics(&exp).unwrap().skewness_z() > 10.0);
    }

    #[test]
    fn compensated_sum_recovers_cancellation() {
        assert_eq!(compensated([1e16, 1.0, -1e16]), 1.0);
        let xs: Vec<f64> = (0..1000).map(|i| 0.1 * i as f64).collect();
        assert!((compensated(xs.iter().copied()) - 49950.0).abs() < 1e-9);
    }

    fn small_wigner(delta: usize) -> Geometry {
        Geometry::Wigner(WignerOverlapSpec {
            a: 24,
            b: 24,
            delta,
            offdiag: EntryDistribution::StandardGaussian,
            diag: DiagonalSpec::Scaled { dist: EntryDistribution::StandardGaussian, d2: 1.0 },
            normalization: Normalization::Standard,
        })
    }

    #[test]
    fn full_overlap_covariance_is_variance() {
        let fs = [TestFunction::Cheb(3), TestFunction::Cheb(4)];
        let r = mc_covariance(&small_wigner(24), &fs, &fs, 300, 1, &|_, _| None).unwrap();
        for f in ["3", "4"] {
            let cov = r.row(f, f).unwrap().estimate;
            let var = r.summary("A", f).unwrap().variance;
            assert_relative_eq!(cov, var, max_relative = 1e-12);
        }
    }

    #[test]
    fn independent_pairs_have_no_covariance() {
        let fs = [TestFunction::Cheb(1), TestFunction::Cheb(2), TestFunction::Cheb(3)];
        let r = mc_covariance(&small_wigner(0), &fs, &fs, 2000, 9, &|_, _| Some(0.0)).unwrap();
        for row in &r.rows {
            assert!(row.estimate.abs() < 4.0 * row.stderr, "{row:?}");
        }
    }

    #[test]
    fn reports_are_deterministic_and_serializable() {
        let fs = [TestFunction::Cheb(2)];
        let run = || mc_covariance(&small_wigner(12), &fs, &fs, 100, 4, &|_, _| Some(0.1)).unwrap();
        let (r1, r2) = (run(), run());
        assert_eq!(serde_json::to_string(&r1).unwrap(), serde_json::to_string(&r2).unwrap());
        let csv = r1.to_csv().unwrap();
        assert!(csv.starts_with("k,l,estimate,stderr,prediction,zscore\n2,2,"));
        assert!(mc_covariance(&small_wigner(12), &fs, &fs, 99, 4, &|_, _| None).is_err());
    }

    #[test]
    fn dispatcher_routes() {
        let moments = EntryMoments { d2: 1.0, m4: 3.0, beta: 1 };
        let wig = Ratios::Wigner { a: 1.0, b: 1.0, delta: 0.5 };
        let req = |f, g, ratios, moments| StatisticRequest { f, g, ratios, moments };
        let p = predict(&req(TestFunction::Cheb(1), TestFunction::Cheb(1), wig, moments)).unwrap();
        assert_eq!(p, 0.125);
        let p = predict(&req(TestFunction::Cheb(2), TestFunction::Cheb(2), wig, moments)).unwrap();
        assert_eq!(p, 0.25);
        let cube = TestFunction::Smooth(SmoothFunction::Cube);
        let p = predict(&req(cube.clone(), cube.clone(), wig, moments)).unwrap();
        assert!((p - 0.5 * (0.25 * 0.5625 + 3.0 * 0.0625 * 0.125)).abs() < 1e-12);
        let unit = EntryMoments { d2: 0.0, m4: 1.0, beta: 2 };
        assert!(predict(&req(cube.clone(), cube, wig, unit)).is_err());
        let cov = Ratios::SampleCovariance { a1: 1.0, a2: 1.0, b1: 1.0, b2: 1.0, delta1: 0.5, delta2: 0.5 };
        let p = predict(&req(TestFunction::Cheb(2), TestFunction::Cheb(2), cov, moments)).unwrap();
        assert_eq!(p, 0.0625);
        let p = predict(&req(TestFunction::Cheb(2), TestFunction::Cheb(2), cov, unit)).unwrap();
        assert_eq!(p, 0.0625 / 2.0);
    }

    proptest! {
        #[test]
        fn simple_model_is_special_case(k in 1usize..12, a in 0.1f64..5.0, b in 0.1f64..5.0, frac in 0.0f64..1.0) {
            let delta = frac * a.min(b);
            let general = predict_wigner(k, k, a, b, delta, 0.0, 1.0);
            let simple = predict_simple_wigner(k, k, a, b, delta, 1).unwrap();
            prop_assert!((general - simple).abs() <= 1e-12 * (1.0 + general.abs()));
        }

        #[test]
        fn c1_reproduces_chebyshev_covariance(
            k in 1usize..10, l in 1usize..10, gamma in 0.0f64..1.0, d2 in 0.0f64..3.0, m4 in 1.0f64..5.0
        ) {
            let v = predict_c1(&ChebSeries::unit(k), &ChebSeries::unit(l), gamma, d2, m4).unwrap();
            let direct = predict_wigner(k, l, 1.0, 1.0, gamma, d2, m4);
            prop_assert!((v[0][1] - direct).abs() <= 1e-12 * (1.0 + direct.abs()));
        }

        #[test]
        fn wigner_prediction_is_homogeneous(
            k in 1usize..10, a in 0.1f64..5.0, b in 0.1f64..5.0, frac in 0.0f64..1.0, lambda in 0.01f64..100.0
        ) {
            let delta = frac * a.min(b);
            let p = predict_wigner(k, k, a, b, delta, 1.5, 2.5);
            let q = predict_wigner(k, k, lambda * a, lambda * b, lambda * delta, 1.5, 2.5);
            prop_assert!((p - q).abs() <= 1e-10 * (1.0 + p.abs()));
        }

        #[test]
        fn monomial_covariance_vanishes_for_odd_total(
            k in 1usize..9, l in 1usize..9, a in 0.5f64..3.0, b in 0.5f64..3.0, frac in 0.0f64..1.0
        ) {
            prop_assume!((k + l) % 2 == 1);
            prop_assert_eq!(predict_monomial_trace_cov(k, l, a, b, frac * a.min(b), 1.0, 3.0), 0.0);
        }

        #[test]
        fn predictors_symmetric_under_swap(
            k in 1usize..9, l in 1usize..9, a in 0.5f64..3.0, b in 0.5f64..3.0, frac in 0.0f64..1.0
        ) {
            let delta = frac * a.min(b);
            let m = predict_monomial_trace_cov(k, l, a, b, delta, 1.0, 3.0);
            let s = predict_monomial_trace_cov(l, k, b, a, delta, 1.0, 3.0);
            prop_assert!((m - s).abs() <= 1e-10 * (1.0 + m.abs()));
            prop_assert_eq!(predict_wigner(k, l, a, b, delta, 1.0, 3.0), predict_wigner(l, k, b, a, delta, 1.0, 3.0));
        }
    }
}
