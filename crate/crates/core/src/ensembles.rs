//! Seed-reproducible sampling of overlapping matrix pairs.
//!
//! Both matrices of a pair are windows into one lazily defined infinite
//! matrix `X`. Each entry of `X` is a pure function of
//! `(seed, trial, row, column)`: the tuple is hashed into the state of a
//! SplitMix64 generator, which then draws one value. Shared indices
//! therefore give bit-identical entries no matter which matrix, thread, or
//! evaluation order asked for them.
//!
//! `B`'s window starts at offset `a - Δ`, so the overlap is the trailing
//! `Δ × Δ` block of `A` and the leading block of `B`.

use std::f64::consts::TAU;

use ndarray::Array2;
use num_complex::Complex64;
use rand::{Rng, RngCore, SeedableRng};
use rand_distr::StandardNormal;
use rand_xoshiro::SplitMix64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{HermitianMatrix, Scalar};

/// Distribution of a single matrix entry: mean 0, `E|X|² = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EntryDistribution {
    /// `±1` with probability 1/2 each.
    Rademacher,
    /// Uniform on the complex unit circle.
    UnitCircle,
    StandardGaussian,
    /// Uniform on `[-√3, √3]`.
    CenteredUniform,
    /// `x_plus` with probability `p`, otherwise `x_minus`.
    TwoPointGeneral {
        p: f64,
        x_plus: f64,
        x_minus: f64,
    },
}

impl EntryDistribution {
    /// The centred two-point law with unit variance and `P(X > 0) = p`.
    pub fn two_point(p: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidSpec(format!("two-point probability {p} outside (0, 1)")));
        }
        let dist =
            EntryDistribution::TwoPointGeneral { p, x_plus: ((1.0 - p) / p).sqrt(), x_minus: -(p / (1.0 - p)).sqrt() };
        dist.validate()?;
        Ok(dist)
    }

    pub fn validate(&self) -> Result<()> {
        if let EntryDistribution::TwoPointGeneral { p, x_plus, x_minus } = *self {
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::InvalidSpec(format!("two-point probability {p} outside (0, 1)")));
            }
            let mean = p * x_plus + (1.0 - p) * x_minus;
            let var = p * x_plus * x_plus + (1.0 - p) * x_minus * x_minus;
            if mean.abs() > 1e-12 || (var - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidSpec(format!(
                    "two-point law must have mean 0 and variance 1, got mean {mean}, variance {var}"
                )));
            }
        }
        Ok(())
    }

    /// `E|X|⁴`.
    pub fn m4(&self) -> f64 {
        match *self {
            EntryDistribution::Rademacher | EntryDistribution::UnitCircle => 1.0,
            EntryDistribution::StandardGaussian => 3.0,
            EntryDistribution::CenteredUniform => 1.8,
            EntryDistribution::TwoPointGeneral { p, x_plus, x_minus } => {
                p * x_plus.powi(4) + (1.0 - p) * x_minus.powi(4)
            }
        }
    }

    /// 1 for real entries, 2 for complex.
    pub fn beta(&self) -> u8 {
        if self.is_complex() {
            2
        } else {
            1
        }
    }

    pub fn is_complex(&self) -> bool {
        matches!(self, EntryDistribution::UnitCircle)
    }

    /// Entries of this law satisfy a Poincaré inequality.
    pub fn has_poincare(&self) -> bool {
        matches!(self, EntryDistribution::StandardGaussian | EntryDistribution::CenteredUniform)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Complex64 {
        let re = match *self {
            EntryDistribution::Rademacher => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            EntryDistribution::UnitCircle => return Complex64::from_polar(1.0, TAU * rng.random::<f64>()),
            EntryDistribution::StandardGaussian => rng.sample(StandardNormal),
            EntryDistribution::CenteredUniform => {
                let s = 3f64.sqrt();
                rng.random_range(-s..s)
            }
            EntryDistribution::TwoPointGeneral { p, x_plus, x_minus } => {
                if rng.random::<f64>() < p {
                    x_plus
                } else {
                    x_minus
                }
            }
        };
        Complex64::new(re, 0.0)
    }
}

fn mix(state: u64, value: u64) -> u64 {
    SplitMix64::seed_from_u64(state ^ value.wrapping_mul(0x9E37_79B9_7F4A_7C15)).next_u64()
}

/// Seed of trial `trial` of an experiment seeded with `seed`.
pub fn trial_seed(seed: u64, trial: u64) -> u64 {
    mix(mix(seed, 0x7472_6961_6c00_0000), trial)
}

fn draw(dist: &EntryDistribution, key: u64) -> Complex64 {
    dist.sample(&mut SplitMix64::seed_from_u64(key))
}

/// Entry `(i, j)` of the Hermitian matrix keyed by `seed`:
/// `entry_at(i, j) = conj(entry_at(j, i))`.
pub fn entry_at(dist: &EntryDistribution, seed: u64, i: u64, j: u64) -> Complex64 {
    let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
    let z = draw(dist, mix(mix(seed, lo), hi));
    if i > j {
        z.conj()
    } else {
        z
    }
}

/// Entry `(i, j)` of the unsymmetric matrix keyed by `seed`.
pub fn rect_entry_at(dist: &EntryDistribution, seed: u64, i: u64, j: u64) -> Complex64 {
    draw(dist, mix(mix(mix(seed, 0x7265_6374), i), j))
}

/// Distribution of the diagonal of a Wigner matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DiagonalSpec {
    Zero,
    /// `√d2 · Y` with `Y` drawn from `dist`.
    Scaled {
        dist: EntryDistribution,
        d2: f64,
    },
}

impl DiagonalSpec {
    pub fn d2(&self) -> f64 {
        match self {
            DiagonalSpec::Zero => 0.0,
            DiagonalSpec::Scaled { d2, .. } => *d2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    /// Wigner: `M / 2√a`. Sample covariance: `[MM* - (a1+a2)I] / 2√(a1 a2)`.
    Standard,
    /// Wigner: `M / 2√(a-2)`. Sample covariance:
    /// `[MM* - (a1+a2-2)I] / 2√((a1-1)(a2-1))`.
    Shifted,
    /// Wigner only: `M / √reference`, for traces of powers.
    Root { reference: f64 },
}

/// Two overlapping Wigner matrices of sizes `a` and `b` sharing `delta`
/// rows and columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WignerOverlapSpec {
    pub a: usize,
    pub b: usize,
    pub delta: usize,
    pub offdiag: EntryDistribution,
    pub diag: DiagonalSpec,
    pub normalization: Normalization,
}

impl WignerOverlapSpec {
    pub fn validate(&self) -> Result<()> {
        if self.a == 0 || self.b == 0 {
            return Err(Error::InvalidSpec("matrix sizes must be positive".into()));
        }
        if self.delta > self.a.min(self.b) {
            return Err(Error::InvalidSpec(format!(
                "overlap {} exceeds min(a, b) = {}",
                self.delta,
                self.a.min(self.b)
            )));
        }
        self.offdiag.validate()?;
        if let DiagonalSpec::Scaled { dist, d2 } = &self.diag {
            dist.validate()?;
            if !(*d2 >= 0.0 && d2.is_finite()) {
                return Err(Error::InvalidSpec(format!("diagonal variance {d2} must be finite and nonnegative")));
            }
            if dist.is_complex() {
                return Err(Error::InvalidSpec("diagonal of a Hermitian matrix must be real".into()));
            }
        }
        match self.normalization {
            Normalization::Shifted if self.a < 4 || self.b < 4 => {
                Err(Error::InvalidSpec("shifted normalization needs a, b >= 4".into()))
            }
            Normalization::Root { reference } if !(reference > 0.0 && reference.is_finite()) => {
                Err(Error::InvalidSpec(format!("reference size {reference} must be positive")))
            }
            _ => Ok(()),
        }
    }

    /// `Δ / √(ab)`.
    pub fn gamma(&self) -> f64 {
        self.delta as f64 / (self.a as f64 * self.b as f64).sqrt()
    }
}

/// Two overlapping rectangular matrices, `a1 × a2` and `b1 × b2`, sharing
/// `delta1` rows and `delta2` columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RectOverlapSpec {
    pub a1: usize,
    pub a2: usize,
    pub b1: usize,
    pub b2: usize,
    pub delta1: usize,
    pub delta2: usize,
    pub entries: EntryDistribution,
    pub normalization: Normalization,
}

impl RectOverlapSpec {
    pub fn validate(&self) -> Result<()> {
        if [self.a1, self.a2, self.b1, self.b2].contains(&0) {
            return Err(Error::InvalidSpec("matrix sizes must be positive".into()));
        }
        if self.delta1 > self.a1.min(self.b1) || self.delta2 > self.a2.min(self.b2) {
            return Err(Error::InvalidSpec("overlap exceeds matrix dimensions".into()));
        }
        self.entries.validate()?;
        match self.normalization {
            Normalization::Root { .. } => {
                Err(Error::InvalidSpec("root normalization applies to Wigner matrices only".into()))
            }
            Normalization::Shifted if [self.a1, self.a2, self.b1, self.b2].contains(&1) => {
                Err(Error::InvalidSpec("shifted normalization needs all dimensions >= 2".into()))
            }
            _ => Ok(()),
        }
    }

    /// `Δ1 Δ2 / √(a1 a2 b1 b2)`.
    pub fn gamma(&self) -> f64 {
        (self.delta1 * self.delta2) as f64 / ((self.a1 * self.a2) as f64 * (self.b1 * self.b2) as f64).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum Geometry {
    Wigner(WignerOverlapSpec),
    Rect(RectOverlapSpec),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

/// Dense real or complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum DenseMatrix {
    Real(Array2<f64>),
    Complex(Array2<Complex64>),
}

impl DenseMatrix {
    fn build(rows: usize, cols: usize, complex: bool, f: impl Fn(usize, usize) -> Complex64) -> Self {
        if complex {
            DenseMatrix::Complex(Array2::from_shape_fn((rows, cols), |(i, j)| f(i, j)))
        } else {
            DenseMatrix::Real(Array2::from_shape_fn((rows, cols), |(i, j)| f(i, j).re))
        }
    }

    pub fn dim(&self) -> (usize, usize) {
        match self {
            DenseMatrix::Real(m) => m.dim(),
            DenseMatrix::Complex(m) => m.dim(),
        }
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        match self {
            DenseMatrix::Real(m) => Complex64::new(m[[i, j]], 0.0),
            DenseMatrix::Complex(m) => m[[i, j]],
        }
    }
}

/// A sampled pair with the parameters that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixPair {
    pub a: DenseMatrix,
    pub b: DenseMatrix,
    pub geometry: Geometry,
    pub seed: u64,
    pub trial: u64,
}

/// Hermitian window `[offset, offset + size)²` of the Wigner matrix of one trial.
fn wigner_window(spec: &WignerOverlapSpec, key: u64, offset: usize, size: usize) -> DenseMatrix {
    let diag_key = mix(key, 0x6469_6167);
    let upper = |i: usize, j: usize| {
        let (gi, gj) = ((offset + i) as u64, (offset + j) as u64);
        if i != j {
            return entry_at(&spec.offdiag, key, gi, gj);
        }
        match &spec.diag {
            DiagonalSpec::Zero => Complex64::new(0.0, 0.0),
            DiagonalSpec::Scaled { dist, d2 } => entry_at(dist, diag_key, gi, gi) * d2.sqrt(),
        }
    };
    if spec.offdiag.is_complex() {
        DenseMatrix::Complex(hermitian_fill(size, upper))
    } else {
        DenseMatrix::Real(hermitian_fill(size, upper))
    }
}

/// Fills the upper triangle from `upper` and mirrors it, so each entry is drawn once.
fn hermitian_fill<S: Scalar>(size: usize, upper: impl Fn(usize, usize) -> Complex64) -> Array2<S> {
    let mut m = Array2::from_elem((size, size), S::zero());
    for i in 0..size {
        for j in i..size {
            let v = S::from_complex(upper(i, j));
            m[[i, j]] = v;
            m[[j, i]] = v.conj();
        }
    }
    m
}

/// `A = X[0..a, 0..a]`, `B = X[a-Δ .. a-Δ+b, a-Δ .. a-Δ+b]`.
pub fn sample_wigner_pair(spec: &WignerOverlapSpec, seed: u64, trial: u64) -> Result<MatrixPair> {
    spec.validate()?;
    let key = trial_seed(seed, trial);
    Ok(MatrixPair {
        a: wigner_window(spec, key, 0, spec.a),
        b: wigner_window(spec, key, spec.a - spec.delta, spec.b),
        geometry: Geometry::Wigner(spec.clone()),
        seed,
        trial,
    })
}

/// Just `A` of [`sample_wigner_pair`], for statistics that only need one side.
pub fn sample_wigner_a(spec: &WignerOverlapSpec, seed: u64, trial: u64) -> Result<DenseMatrix> {
    spec.validate()?;
    Ok(wigner_window(spec, trial_seed(seed, trial), 0, spec.a))
}

fn rect_window(spec: &RectOverlapSpec, key: u64, r0: usize, c0: usize, rows: usize, cols: usize) -> DenseMatrix {
    DenseMatrix::build(rows, cols, spec.entries.is_complex(), |i, j| {
        rect_entry_at(&spec.entries, key, (r0 + i) as u64, (c0 + j) as u64)
    })
}

/// `A = X[0..a1, 0..a2]`, `B = X[a1-Δ1 .. a1-Δ1+b1, a2-Δ2 .. a2-Δ2+b2]`.
pub fn sample_rect_pair(spec: &RectOverlapSpec, seed: u64, trial: u64) -> Result<MatrixPair> {
    spec.validate()?;
    let key = trial_seed(seed, trial);
    Ok(MatrixPair {
        a: rect_window(spec, key, 0, 0, spec.a1, spec.a2),
        b: rect_window(spec, key, spec.a1 - spec.delta1, spec.a2 - spec.delta2, spec.b1, spec.b2),
        geometry: Geometry::Rect(spec.clone()),
        seed,
        trial,
    })
}

/// Just `A` of [`sample_rect_pair`].
pub fn sample_rect_a(spec: &RectOverlapSpec, seed: u64, trial: u64) -> Result<DenseMatrix> {
    spec.validate()?;
    Ok(rect_window(spec, trial_seed(seed, trial), 0, 0, spec.a1, spec.a2))
}

fn scaled_hermitian<S: Scalar>(m: &Array2<S>, factor: f64) -> Array2<S> {
    m * S::from_f64(factor)
}

/// `Ã = M / 2√a` (or the shifted/root variant) for side `side` of `spec`.
pub fn normalize_wigner(m: &DenseMatrix, spec: &WignerOverlapSpec, side: Side) -> Result<HermitianMatrix> {
    let size = match side {
        Side::A => spec.a,
        Side::B => spec.b,
    };
    if m.dim() != (size, size) {
        return Err(Error::InvalidSpec(format!("matrix is {:?}, spec expects {size}x{size}", m.dim())));
    }
    let factor = match spec.normalization {
        Normalization::Standard => 0.5 / (size as f64).sqrt(),
        Normalization::Shifted => 0.5 / (size as f64 - 2.0).sqrt(),
        Normalization::Root { reference } => 1.0 / reference.sqrt(),
    };
    Ok(match m {
        DenseMatrix::Real(x) => HermitianMatrix::Real(scaled_hermitian(x, factor)),
        DenseMatrix::Complex(x) => HermitianMatrix::Complex(scaled_hermitian(x, factor)),
    })
}

fn gram_shifted<S: Scalar>(m: &Array2<S>, shift: f64, scale: f64) -> Array2<S> {
    let adjoint = m.t().mapv(|x| x.conj());
    let mut g = m.dot(&adjoint);
    let n = g.nrows();
    // gemm does not promise bitwise symmetry, so average with the adjoint
    for i in 0..n {
        g[[i, i]] = S::from_f64((g[[i, i]].re() - shift) * scale);
        for j in 0..i {
            let v = (g[[i, j]] + g[[j, i]].conj()) * S::from_f64(0.5 * scale);
            g[[i, j]] = v;
            g[[j, i]] = v.conj();
        }
    }
    g
}

/// Normalized sample covariance matrix of side `side` of `spec`.
pub fn build_w(m: &DenseMatrix, spec: &RectOverlapSpec, side: Side) -> Result<HermitianMatrix> {
    let (rows, cols) = match side {
        Side::A => (spec.a1, spec.a2),
        Side::B => (spec.b1, spec.b2),
    };
    if m.dim() != (rows, cols) {
        return Err(Error::InvalidSpec(format!("matrix is {:?}, spec expects {rows}x{cols}", m.dim())));
    }
    let (r, c) = (rows as f64, cols as f64);
    let (shift, scale) = match spec.normalization {
        Normalization::Standard => (r + c, 0.5 / (r * c).sqrt()),
        Normalization::Shifted => (r + c - 2.0, 0.5 / ((r - 1.0) * (c - 1.0)).sqrt()),
        Normalization::Root { .. } => {
            return Err(Error::InvalidSpec("root normalization applies to Wigner matrices only".into()))
        }
    };
    Ok(match m {
        DenseMatrix::Real(x) => HermitianMatrix::Real(gram_shifted(x, shift, scale)),
        DenseMatrix::Complex(x) => HermitianMatrix::Complex(gram_shifted(x, shift, scale)),
    })
}

impl MatrixPair {
    /// Both matrices after the normalization of their geometry.
    pub fn normalized(&self) -> Result<(HermitianMatrix, HermitianMatrix)> {
        match &self.geometry {
            Geometry::Wigner(spec) => {
                Ok((normalize_wigner(&self.a, spec, Side::A)?, normalize_wigner(&self.b, spec, Side::B)?))
            }
            Geometry::Rect(spec) => Ok((build_w(&self.a, spec, Side::A)?, build_w(&self.b, spec, Side::B)?)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wigner(a: usize, b: usize, delta: usize, offdiag: EntryDistribution) -> WignerOverlapSpec {
        WignerOverlapSpec {
            a,
            b,
            delta,
            offdiag,
            diag: DiagonalSpec::Scaled { dist: EntryDistribution::StandardGaussian, d2: 2.0 },
            normalization: Normalization::Standard,
        }
    }

    #[test]
    fn entries_are_deterministic() {
        for dist in [EntryDistribution::Rademacher, EntryDistribution::UnitCircle, EntryDistribution::StandardGaussian]
        {
            assert_eq!(entry_at(&dist, 42, 3, 9), entry_at(&dist, 42, 3, 9));
            assert_eq!(entry_at(&dist, 42, 9, 3), entry_at(&dist, 42, 3, 9).conj());
        }
        assert_ne!(
            entry_at(&EntryDistribution::StandardGaussian, 1, 0, 1),
            entry_at(&EntryDistribution::StandardGaussian, 2, 0, 1)
        );
    }

    #[test]
    fn rademacher_support() {
        for i in 0..200 {
            let x = entry_at(&EntryDistribution::Rademacher, 5, i, i + 1);
            assert!(x == Complex64::new(1.0, 0.0) || x == Complex64::new(-1.0, 0.0));
        }
    }

    #[test]
    fn unit_circle_modulus() {
        for i in 0..200 {
            let x = entry_at(&EntryDistribution::UnitCircle, 5, i, 2 * i + 1);
            assert!((x.norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn moments_of_all_laws() {
        let n = 1_000_000u64;
        let laws = [
            EntryDistribution::Rademacher,
            EntryDistribution::UnitCircle,
            EntryDistribution::StandardGaussian,
            EntryDistribution::CenteredUniform,
            EntryDistribution::two_point(0.2).unwrap(),
        ];
        for dist in laws {
            let (mut s1, mut s4, mut s8) = (Complex64::new(0.0, 0.0), 0.0, 0.0);
            for t in 0..n {
                let x = entry_at(&dist, 17, t, t + n);
                s1 += x;
                let q = x.norm_sqr() * x.norm_sqr();
                s4 += q;
                s8 += q * q;
            }
            let nf = n as f64;
            assert!(s1.norm() / nf < 4.0 / nf.sqrt(), "{dist:?} mean {}", s1 / nf);
            let m4 = s4 / nf;
            let se = ((s8 / nf - m4 * m4) / nf).sqrt();
            assert!((m4 - dist.m4()).abs() <= 5.0 * se + 1e-12, "{dist:?} m4 {m4} vs {}", dist.m4());
        }
    }

    #[test]
    fn two_point_validation() {
        assert!(EntryDistribution::two_point(0.0).is_err());
        let bad = EntryDistribution::TwoPointGeneral { p: 0.5, x_plus: 1.0, x_minus: -0.5 };
        assert!(bad.validate().is_err());
        let ok = EntryDistribution::TwoPointGeneral { p: 0.5, x_plus: 1.0, x_minus: -1.0 };
        assert_eq!(ok.m4(), 1.0);
    }

    #[test]
    fn full_overlap_gives_equal_matrices() {
        let spec = wigner(12, 12, 12, EntryDistribution::StandardGaussian);
        let pair = sample_wigner_pair(&spec, 3, 0).unwrap();
        assert_eq!(pair.a, pair.b);
        let rect = RectOverlapSpec {
            a1: 5,
            a2: 7,
            b1: 5,
            b2: 7,
            delta1: 5,
            delta2: 7,
            entries: EntryDistribution::CenteredUniform,
            normalization: Normalization::Standard,
        };
        let pair = sample_rect_pair(&rect, 3, 0).unwrap();
        assert_eq!(pair.a, pair.b);
    }

    #[test]
    fn disjoint_windows() {
        let spec = wigner(6, 6, 0, EntryDistribution::StandardGaussian);
        let pair = sample_wigner_pair(&spec, 3, 0).unwrap();
        assert_ne!(pair.a, pair.b);
        assert_eq!(pair.b.get(0, 1), entry_at(&spec.offdiag, trial_seed(3, 0), 6, 7));
    }

    #[test]
    fn overlap_block_is_shared() {
        let mut rng = SplitMix64::seed_from_u64(99);
        for trial in 0..100 {
            let a = rng.random_range(1..10);
            let b = rng.random_range(1..10);
            let delta = rng.random_range(0..=a.min(b));
            let spec = wigner(a, b, delta, EntryDistribution::UnitCircle);
            let pair = sample_wigner_pair(&spec, 7, trial).unwrap();
            let off = a - delta;
            for i in 0..delta {
                for j in 0..delta {
                    assert_eq!(pair.a.get(off + i, off + j), pair.b.get(i, j));
                }
            }
            let (a1, a2, b1, b2) =
                (rng.random_range(1..8), rng.random_range(1..8), rng.random_range(1..8), rng.random_range(1..8));
            let rect = RectOverlapSpec {
                a1,
                a2,
                b1,
                b2,
                delta1: rng.random_range(0..=a1.min(b1)),
                delta2: rng.random_range(0..=a2.min(b2)),
                entries: EntryDistribution::Rademacher,
                normalization: Normalization::Standard,
            };
            let pair = sample_rect_pair(&rect, 7, trial).unwrap();
            let (r0, c0) = (a1 - rect.delta1, a2 - rect.delta2);
            for i in 0..rect.delta1 {
                for j in 0..rect.delta2 {
                    assert_eq!(pair.a.get(r0 + i, c0 + j), pair.b.get(i, j));
                }
            }
        }
    }

    #[test]
    fn zero_diagonal() {
        let mut spec = wigner(8, 8, 4, EntryDistribution::Rademacher);
        spec.diag = DiagonalSpec::Zero;
        let pair = sample_wigner_pair(&spec, 1, 1).unwrap();
        for i in 0..8 {
            assert_eq!(pair.a.get(i, i), Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn invalid_specs_rejected() {
        assert!(sample_wigner_pair(&wigner(4, 5, 5, EntryDistribution::Rademacher), 0, 0).is_err());
        let mut spec = wigner(3, 3, 1, EntryDistribution::Rademacher);
        spec.normalization = Normalization::Shifted;
        assert!(spec.validate().is_err());
    }

    #[test]
    fn zero_matrix_gram() {
        let spec = RectOverlapSpec {
            a1: 3,
            a2: 5,
            b1: 3,
            b2: 5,
            delta1: 1,
            delta2: 1,
            entries: EntryDistribution::Rademacher,
            normalization: Normalization::Standard,
        };
        let w = build_w(&DenseMatrix::Real(Array2::zeros((3, 5))), &spec, Side::A).unwrap();
        let expected = -8.0 / (2.0 * 15f64.sqrt());
        for i in 0..3 {
            for j in 0..3 {
                let e = if i == j { expected } else { 0.0 };
                assert!((w.get(i, j).re - e).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn sample_covariance_exactly_hermitian() {
        let spec = RectOverlapSpec {
            a1: 9,
            a2: 13,
            b1: 9,
            b2: 13,
            delta1: 4,
            delta2: 6,
            entries: EntryDistribution::UnitCircle,
            normalization: Normalization::Shifted,
        };
        let pair = sample_rect_pair(&spec, 11, 2).unwrap();
        let (wa, _) = pair.normalized().unwrap();
        for i in 0..9 {
            for j in 0..9 {
                assert_eq!(wa.get(i, j), wa.get(j, i).conj());
            }
        }
    }

    #[test]
    fn semicircle_edge() {
        let spec = wigner(256, 256, 128, EntryDistribution::StandardGaussian);
        let pair = sample_wigner_pair(&spec, 2024, 0).unwrap();
        let (a, _) = pair.normalized().unwrap();
        let ev = a.eigenvalues().unwrap();
        assert!(ev[0] > -1.1 && ev[ev.len() - 1] < 1.1);
    }

    #[test]
    fn spec_round_trips_through_json() {
        let spec = wigner(10, 12, 4, EntryDistribution::two_point(0.3).unwrap());
        let json = serde_json::to_string(&spec).unwrap();
        assert_eq!(serde_json::from_str::<WignerOverlapSpec>(&json).unwrap(), spec);
        let rect: RectOverlapSpec = serde_json::from_str(
            r#"{"a1":4,"a2":4,"b1":4,"b2":4,"delta1":2,"delta2":2,
                "entries":{"kind":"standard-gaussian"},"normalization":"shifted"}"#,
        )
        .unwrap();
        assert_eq!(rect.normalization, Normalization::Shifted);
    }
}
