//! Exact polynomial algebra for the Chebyshev families and the
//! non-backtracking path polynomials built from them, plus the floating
//! point side: Horner evaluation, traces of matrix polynomials, and
//! Gauss–Chebyshev coefficient quadrature.
//!
//! All identity checks run in exact rational arithmetic. Polynomials of the
//! form `m^{k/2} p(x / (2√m))` have rational coefficients whenever `p` has
//! the parity of `k`, which is the case for every `T_k` and `U_k`; see
//! [`rescale_by_root`].

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use ndarray::Array2;
use num_bigint::BigInt;
use num_integer::Roots;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{self, HermitianMatrix, Scalar};

/// Dense polynomial with exact rational coefficients; `coeffs[i]` multiplies `x^i`.
///
/// Trailing zeros are always trimmed, so the zero polynomial has no
/// coefficients and the last coefficient of any other polynomial is nonzero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    coeffs: Vec<BigRational>,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    /// The monomial `x`.
    pub fn x() -> Self {
        Poly::from_coeffs(vec![BigRational::zero(), BigRational::one()])
    }

    pub fn constant(c: BigRational) -> Self {
        Poly::from_coeffs(vec![c])
    }

    pub fn from_coeffs(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_integers(coeffs: &[i64]) -> Self {
        Poly::from_coeffs(coeffs.iter().map(|&c| rat(c)).collect())
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Coefficient of `x^i` (zero past the degree).
    pub fn coeff(&self, i: usize) -> BigRational {
        self.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> BigRational {
        self.coeffs.last().cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn scale(&self, factor: &BigRational) -> Poly {
        Poly::from_coeffs(self.coeffs.iter().map(|c| c * factor).collect())
    }

    /// `p(x + shift)`, expanded exactly.
    pub fn shift(&self, shift: &BigRational) -> Poly {
        // Horner in polynomial form: p(x+s) = (((c_n)(x+s) + c_{n-1})(x+s) + ...)
        let linear = Poly::from_coeffs(vec![shift.clone(), BigRational::one()]);
        self.coeffs.iter().rev().fold(Poly::zero(), |acc, c| &(&acc * &linear) + &Poly::constant(c.clone()))
    }

    /// `p(-x)`.
    pub fn reflect(&self) -> Poly {
        Poly::from_coeffs(
            self.coeffs.iter().enumerate().map(|(i, c)| if i % 2 == 1 { -c } else { c.clone() }).collect(),
        )
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect()
    }

    /// Horner evaluation in floating point.
    pub fn eval(&self, x: f64) -> f64 {
        self.to_f64().iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn eval_exact(&self, x: &BigRational) -> BigRational {
        self.coeffs.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_complex(&self, z: num_complex::Complex64) -> num_complex::Complex64 {
        self.to_f64().iter().rev().fold(num_complex::Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.coeffs.iter().map(|c| c.to_string())).finish()
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            match (i, a.is_one()) {
                (0, _) => write!(f, "{a}")?,
                (1, true) => write!(f, "x")?,
                (1, false) => write!(f, "{a}*x")?,
                (_, true) => write!(f, "x^{i}")?,
                (_, false) => write!(f, "{a}*x^{i}")?,
            }
        }
        Ok(())
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::from_coeffs((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::from_coeffs((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::from_coeffs(out)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::from_coeffs(self.coeffs.iter().map(|c| -c).collect())
    }
}

/// Shared three-term recursion `q_k = (α x + β) q_{k-1} - γ q_{k-2}`.
fn three_term(first: Poly, second: Poly, k: usize, step: &Poly, back: &BigRational) -> Poly {
    if k == 0 {
        return first;
    }
    let (mut prev, mut cur) = (first, second);
    for _ in 1..k {
        let next = &(step * &cur) - &prev.scale(back);
        prev = cur;
        cur = next;
    }
    cur
}

/// Chebyshev polynomial of the first kind, `T_k(cos θ) = cos kθ`.
pub fn cheb_t(k: usize) -> Poly {
    three_term(Poly::one(), Poly::x(), k, &Poly::from_integers(&[0, 2]), &BigRational::one())
}

/// Chebyshev polynomial of the second kind, `U_k(cos θ) = sin((k+1)θ) / sin θ`.
pub fn cheb_u(k: usize) -> Poly {
    three_term(Poly::one(), Poly::from_integers(&[0, 2]), k, &Poly::from_integers(&[0, 2]), &BigRational::one())
}

/// Non-backtracking path polynomial on a `(d+1)`-regular graph:
/// `P_1 = x`, `P_2 = x² - (d+1)`, `P_k = x P_{k-1} - d P_{k-2}`.
///
/// # Panics
/// If `k == 0`.
pub fn p_poly(k: usize, d: u64) -> Poly {
    assert!(k >= 1, "P_k is defined for k >= 1");
    let d = rat(d as i64);
    let p1 = Poly::x();
    let p2 = &Poly::from_integers(&[0, 0, 1]) - &Poly::constant(&d + BigRational::one());
    three_term(p1, p2, k - 1, &Poly::x(), &d)
}

/// Non-backtracking path polynomial on a `(c+1, d+1)`-biregular bipartite
/// graph, evaluated at `AA*`:
/// `F_1 = x - (c+1)`, `F_2 = x² - (2c+d+1)x + (c+1)c`,
/// `F_k = (x - (c+d)) F_{k-1} - cd F_{k-2}`.
///
/// # Panics
/// If `k == 0`.
pub fn f_poly(k: usize, c: u64, d: u64) -> Poly {
    assert!(k >= 1, "F_k is defined for k >= 1");
    let (ci, di) = (c as i64, d as i64);
    let f1 = Poly::from_integers(&[-(ci + 1), 1]);
    let f2 = Poly::from_integers(&[(ci + 1) * ci, -(2 * ci + di + 1), 1]);
    let step = Poly::from_integers(&[-(ci + di), 1]);
    three_term(f1, f2, k - 1, &step, &rat(ci * di))
}

/// `m^{k/2} p(x / (2√m))` for a polynomial `p` of parity `k`.
///
/// The coefficient of `x^j` is `p_j m^{(k-j)/2} / 2^j`; since `p_j` vanishes
/// unless `k - j` is even, only integer powers of `m` appear. Returns `None`
/// when `p` has a coefficient of the wrong parity.
pub fn rescale_by_root(p: &Poly, k: usize, m: u64) -> Option<Poly> {
    let m = BigInt::from(m);
    let mut out = Vec::with_capacity(p.coeffs.len());
    for (j, c) in p.coeffs.iter().enumerate() {
        if c.is_zero() {
            out.push(BigRational::zero());
            continue;
        }
        if j > k || (k - j) % 2 == 1 {
            return None;
        }
        let num = m.pow(((k - j) / 2) as u32);
        let den = BigInt::from(2).pow(j as u32);
        out.push(c * BigRational::new(num, den));
    }
    Some(Poly::from_coeffs(out))
}

/// `m^{k/2} T_k(x / (2√m))`.
pub fn t_scaled(k: usize, m: u64) -> Poly {
    rescale_by_root(&cheb_t(k), k, m).expect("T_k has parity k")
}

/// `m^{k/2} U_k(x / (2√m))`, with `U_k = 0` for negative `k`.
pub fn u_scaled(k: i64, m: u64) -> Poly {
    if k < 0 {
        return Poly::zero();
    }
    let k = k as usize;
    rescale_by_root(&cheb_u(k), k, m).expect("U_k has parity k")
}

/// `T̃_k(x) = (cd)^{k/2} T_k((x - (c+d)) / (2√(cd)))`.
pub fn t_modified(k: usize, c: u64, d: u64) -> Poly {
    t_scaled(k, c * d).shift(&rat(-((c + d) as i64)))
}

/// `Ũ_k(x) = (cd)^{k/2} U_k((x - (c+d)) / (2√(cd)))`, zero for negative `k`.
pub fn u_modified(k: i64, c: u64, d: u64) -> Poly {
    u_scaled(k, c * d).shift(&rat(-((c + d) as i64)))
}

/// `s_{c,d,k} = ((c-d)(-d)^k + cd - 1) / (d+1)`.
pub fn s_constant(k: usize, c: u64, d: u64) -> BigRational {
    let (c, d) = (BigInt::from(c), BigInt::from(d));
    let minus_d_pow = (-&d).pow(k as u32);
    let num = (&c - &d) * minus_d_pow + &c * &d - BigInt::one();
    BigRational::new(num, d + BigInt::one())
}

/// `S_k(x) = 2 T̃_k(x) + s_{c,d,k}`.
pub fn s_poly(k: usize, c: u64, d: u64) -> Poly {
    &t_modified(k, c, d).scale(&rat(2)) + &Poly::constant(s_constant(k, c, d))
}

/// The trace polynomial for closed tailless paths on a `(d+1)`-regular graph:
/// `2 d^{k/2} T_k(x / (2√d))`, plus `(d-1)` when `k` is even.
pub fn nbt_closed_poly(k: usize, d: u64) -> Poly {
    let base = t_scaled(k, d).scale(&rat(2));
    if k.is_multiple_of(2) {
        &base + &Poly::constant(rat(d as i64 - 1))
    } else {
        base
    }
}

/// `U_k = 2(T_k + T_{k-2} + ... + T_ε) + (ε - 1)`, ε = k mod 2.
pub fn check_relation_u_t(k: usize) -> bool {
    let eps = k % 2;
    let sum = (eps..=k).step_by(2).fold(Poly::zero(), |acc, j| &acc + &cheb_t(j));
    let rhs = &sum.scale(&rat(2)) + &Poly::constant(rat(eps as i64 - 1));
    cheb_u(k) == rhs
}

fn perfect_square_root(m: u64) -> Option<u64> {
    let r = m.sqrt();
    (r * r == m).then_some(r)
}

/// Sample points `0, 1, ..., count-1` shifted to straddle the spectrum.
fn sample_points(count: usize) -> impl Iterator<Item = i64> {
    (0..count as i64).map(move |i| i - (count as i64) / 2)
}

/// `q^j U_j(y / (2q))` evaluated exactly at rational `y`, zero for negative `j`.
fn u_direct_exact(j: i64, q: u64, y: &BigRational) -> BigRational {
    if j < 0 {
        return BigRational::zero();
    }
    let q = rat(q as i64);
    let arg = y / (&q * rat(2));
    cheb_u(j as usize).eval_exact(&arg) * num_traits::pow(q, j as usize)
}

fn u_direct_float(j: i64, m: f64, y: f64) -> f64 {
    if j < 0 {
        return 0.0;
    }
    m.powf(j as f64 / 2.0) * cheb_u(j as usize).eval(y / (2.0 * m.sqrt()))
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()))
}

/// `P_k(x) = d^{k/2} U_k(x/(2√d)) - d^{(k-2)/2} U_{k-2}(x/(2√d))`.
///
/// Checked by exact expansion, and additionally by pointwise evaluation at
/// `k + 2` points: exactly in rationals when `d` is a perfect square,
/// in floating point otherwise.
pub fn check_relation_p_u(k: usize, d: u64) -> bool {
    if k == 0 {
        return false;
    }
    let lhs = p_poly(k, d);
    let ki = k as i64;
    let expanded = &u_scaled(ki, d) - &u_scaled(ki - 2, d);
    if lhs != expanded {
        return false;
    }
    sample_points(k + 2).all(|x| match perfect_square_root(d) {
        Some(q) => {
            let xr = rat(x);
            lhs.eval_exact(&xr) == u_direct_exact(ki, q, &xr) - u_direct_exact(ki - 2, q, &xr)
        }
        None => {
            let xf = x as f64;
            let direct = u_direct_float(ki, d as f64, xf) - u_direct_float(ki - 2, d as f64, xf);
            close(lhs.eval(xf), direct)
        }
    })
}

/// `F_k = Ũ_k + (d-1) Ũ_{k-1} - d Ũ_{k-2}`, checked the same two ways as
/// [`check_relation_p_u`] with `cd` in place of `d`.
pub fn check_relation_f_u(k: usize, c: u64, d: u64) -> bool {
    if k == 0 {
        return false;
    }
    let lhs = f_poly(k, c, d);
    let ki = k as i64;
    let dm1 = rat(d as i64 - 1);
    let dr = rat(d as i64);
    let expanded =
        &(&u_modified(ki, c, d) + &u_modified(ki - 1, c, d).scale(&dm1)) - &u_modified(ki - 2, c, d).scale(&dr);
    if lhs != expanded {
        return false;
    }
    let shift = (c + d) as i64;
    sample_points(k + 2).all(|x| match perfect_square_root(c * d) {
        Some(q) => {
            let xr = rat(x);
            let y = rat(x - shift);
            let direct =
                u_direct_exact(ki, q, &y) + &dm1 * u_direct_exact(ki - 1, q, &y) - &dr * u_direct_exact(ki - 2, q, &y);
            lhs.eval_exact(&xr) == direct
        }
        None => {
            let m = (c * d) as f64;
            let y = (x - shift) as f64;
            let direct = u_direct_float(ki, m, y) + (d as f64 - 1.0) * u_direct_float(ki - 1, m, y)
                - d as f64 * u_direct_float(ki - 2, m, y);
            close(lhs.eval(x as f64), direct)
        }
    })
}

/// Horner evaluation of `p` at `x`.
pub fn eval_poly(p: &Poly, x: f64) -> f64 {
    p.eval(x)
}

/// `Tr p(M)`, accumulated along the power sequence `I, M, M², ...`.
pub fn trace_poly(p: &Poly, m: &HermitianMatrix) -> Result<f64> {
    let coeffs = p.to_f64();
    let (re, im) = match m {
        HermitianMatrix::Real(a) => power_trace_sum(&coeffs, a),
        HermitianMatrix::Complex(a) => power_trace_sum(&coeffs, a),
    };
    if im.abs() >= 1e-9 * (1.0 + re.abs()) {
        return Err(Error::NotHermitian { residual: im.abs(), tolerance: 1e-9 * (1.0 + re.abs()) });
    }
    Ok(re)
}

fn power_trace_sum<S: Scalar>(coeffs: &[f64], m: &Array2<S>) -> (f64, f64) {
    let n = m.nrows();
    let mut power = matrix::identity::<S>(n);
    let (mut re, mut im) = (0.0, 0.0);
    for (j, &c) in coeffs.iter().enumerate() {
        if j > 0 {
            power = power.dot(m);
        }
        if c != 0.0 {
            let tr = power.diag().iter().fold(S::zero(), |acc, &x| acc + x);
            re += c * tr.re();
            im += c * tr.im();
        }
    }
    (re, im)
}

/// `Tr T_k(M)` by the matrix recurrence `T_j(M) = 2M T_{j-1}(M) - T_{j-2}(M)`.
pub fn trace_cheb(k: usize, m: &HermitianMatrix) -> f64 {
    match m {
        HermitianMatrix::Real(a) => trace_cheb_recurrence(k, a),
        HermitianMatrix::Complex(a) => trace_cheb_recurrence(k, a),
    }
}

fn trace_cheb_recurrence<S: Scalar>(k: usize, m: &Array2<S>) -> f64 {
    let n = m.nrows();
    match k {
        0 => n as f64,
        1 => matrix::trace(m),
        _ => {
            let two = S::from_f64(2.0);
            let mut prev = matrix::identity::<S>(n);
            let mut cur = m.clone();
            for _ in 2..k {
                let next = m.dot(&cur) * two - &prev;
                prev = cur;
                cur = next;
            }
            // last step only needs the trace: Tr(2 M T_{k-1} - T_{k-2})
            2.0 * matrix::trace_of_product(m, &cur) - matrix::trace(&prev)
        }
    }
}

/// `[Tr T_0(M), ..., Tr T_K(M)]` using `T_{2j} = 2T_j² - 1` and
/// `T_{2j+1} = 2T_j T_{j+1} - T_1`, which needs only `⌈K/2⌉ - 1` products.
pub fn cheb_traces(m: &HermitianMatrix, max_k: usize) -> Vec<f64> {
    match m {
        HermitianMatrix::Real(a) => cheb_traces_doubling(a, max_k),
        HermitianMatrix::Complex(a) => cheb_traces_doubling(a, max_k),
    }
}

fn cheb_traces_doubling<S: Scalar>(m: &Array2<S>, max_k: usize) -> Vec<f64> {
    let n = m.nrows() as f64;
    let tr1 = matrix::trace(m);
    let half = max_k.div_ceil(2);
    let two = S::from_f64(2.0);
    let mut ts: Vec<Array2<S>> = vec![matrix::identity::<S>(m.nrows()), m.clone()];
    while ts.len() <= half {
        let j = ts.len();
        let next = m.dot(&ts[j - 1]) * two - &ts[j - 2];
        ts.push(next);
    }
    (0..=max_k)
        .map(|k| match k {
            0 => n,
            1 => tr1,
            _ if k % 2 == 0 => 2.0 * matrix::trace_of_product(&ts[k / 2], &ts[k / 2]) - n,
            _ => 2.0 * matrix::trace_of_product(&ts[k / 2], &ts[k / 2 + 1]) - tr1,
        })
        .collect()
}

/// `[Tr M^0, ..., Tr M^K]` using `Tr M^{2j} = <M^j, M^j>` and
/// `Tr M^{2j+1} = <M^j, M^{j+1}>`.
pub fn power_traces(m: &HermitianMatrix, max_k: usize) -> Vec<f64> {
    match m {
        HermitianMatrix::Real(a) => power_traces_doubling(a, max_k),
        HermitianMatrix::Complex(a) => power_traces_doubling(a, max_k),
    }
}

fn power_traces_doubling<S: Scalar>(m: &Array2<S>, max_k: usize) -> Vec<f64> {
    let half = max_k.div_ceil(2);
    let mut powers: Vec<Array2<S>> = vec![matrix::identity::<S>(m.nrows()), m.clone()];
    while powers.len() <= half {
        let next = powers[powers.len() - 1].dot(m);
        powers.push(next);
    }
    (0..=max_k)
        .map(|k| match k {
            0 => m.nrows() as f64,
            1 => matrix::trace(m),
            _ => matrix::trace_of_product(&powers[k / 2], &powers[k.div_ceil(2)]),
        })
        .collect()
}

/// Truncated Chebyshev expansion `f ≈ Σ_{k=0}^{K} c_k T_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChebSeries {
    coeffs: Vec<f64>,
}

impl ChebSeries {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if let Some(bad) = coeffs.iter().find(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite Chebyshev coefficient {bad}")));
        }
        Ok(ChebSeries { coeffs })
    }

    /// The series with a single coefficient `c_k = 1`.
    pub fn unit(k: usize) -> Self {
        let mut coeffs = vec![0.0; k + 1];
        coeffs[k] = 1.0;
        ChebSeries { coeffs }
    }

    /// Exact change of basis from monomials to Chebyshev polynomials.
    pub fn from_poly(p: &Poly) -> Self {
        let Some(deg) = p.degree() else {
            return ChebSeries { coeffs: vec![0.0] };
        };
        let mut rest = p.clone();
        let mut coeffs = vec![BigRational::zero(); deg + 1];
        for j in (0..=deg).rev() {
            let t = cheb_t(j);
            let c = rest.coeff(j) / t.leading();
            rest = &rest - &t.scale(&c);
            coeffs[j] = c;
        }
        ChebSeries { coeffs: coeffs.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect() }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// `c_k`, zero past the truncation.
    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Clenshaw evaluation of `Σ c_k T_k(x)`.
    pub fn eval(&self, x: f64) -> f64 {
        let (mut b1, mut b2) = (0.0, 0.0);
        for &c in self.coeffs.iter().skip(1).rev() {
            let b0 = 2.0 * x * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        x * b1 - b2 + self.coeff(0)
    }

    /// `Σ_{k >= from} k c_k²`.
    pub fn weighted_tail(&self, from: usize) -> f64 {
        self.coeffs.iter().enumerate().skip(from).map(|(k, c)| k as f64 * c * c).sum()
    }

    pub fn truncated(&self, max_k: usize) -> ChebSeries {
        ChebSeries { coeffs: self.coeffs.iter().take(max_k + 1).copied().collect() }
    }
}

/// Chebyshev coefficients of `f` on `[-1, 1]` by Gauss–Chebyshev quadrature:
/// `c_k = (2/N) Σ_j f(cos θ_j) cos(kθ_j)` for `k >= 1` and `c_0 = (1/N) Σ_j f(cos θ_j)`,
/// with `θ_j = π(j + ½)/N`. Exact for polynomials of degree below `N`.
pub fn cheb_coefficients<F: Fn(f64) -> f64>(f: F, max_k: usize, nodes: usize) -> Result<ChebSeries> {
    if nodes == 0 || nodes < 4 * max_k {
        return Err(Error::TooFewNodes { degree: max_k, nodes });
    }
    let thetas: Vec<f64> = (0..nodes).map(|j| PI * (j as f64 + 0.5) / nodes as f64).collect();
    let values: Vec<f64> = thetas.iter().map(|t| f(t.cos())).collect();
    let coeffs = (0..=max_k)
        .map(|k| {
            let s: f64 = thetas.iter().zip(&values).map(|(t, v)| v * (k as f64 * t).cos()).sum();
            let w = if k == 0 { 1.0 } else { 2.0 };
            w * s / nodes as f64
        })
        .collect();
    ChebSeries::new(coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn ints(p: &Poly) -> Vec<i64> {
        p.coeffs().iter().map(|c| c.to_integer().to_i64().unwrap()).collect()
    }

    #[test]
    fn first_kind_examples() {
        assert_eq!(ints(&cheb_t(0)), vec![1]);
        assert_eq!(ints(&cheb_t(1)), vec![0, 1]);
        assert_eq!(ints(&cheb_t(3)), vec![0, -3, 0, 4]);
    }

    #[test]
    fn second_kind_examples() {
        assert_eq!(ints(&cheb_u(1)), vec![0, 2]);
        assert_eq!(ints(&cheb_u(2)), vec![-1, 0, 4]);
        assert_eq!(ints(&cheb_u(4)), vec![1, 0, -12, 0, 16]);
    }

    #[test]
    fn p_poly_examples() {
        assert_eq!(ints(&p_poly(1, 2)), vec![0, 1]);
        assert_eq!(ints(&p_poly(2, 2)), vec![-3, 0, 1]);
        assert_eq!(ints(&p_poly(3, 2)), vec![0, -5, 0, 1]);
    }

    #[test]
    fn f_poly_examples() {
        assert_eq!(ints(&f_poly(1, 2, 1)), vec![-3, 1]);
        assert_eq!(ints(&f_poly(2, 2, 1)), vec![6, -6, 1]);
        // (x - 3)(x² - 6x + 6) - 2(x - 3) = x³ - 9x² + 22x - 12
        let f3 = f_poly(3, 2, 1);
        assert_eq!(f3.degree(), Some(3));
        assert_eq!(ints(&f3), vec![-12, 22, -9, 1]);
    }

    #[test]
    fn t_modified_examples() {
        let half = BigRational::new(1.into(), 2.into());
        for (c, d) in [(1, 1), (2, 1), (3, 2)] {
            let expected = Poly::from_integers(&[-((c + d) as i64), 1]).scale(&half);
            assert_eq!(t_modified(1, c, d), expected);
        }
        // (x-2)²/2 - 1 = x²/2 - 2x + 1
        let expected = Poly::from_coeffs(vec![rat(1), rat(-2), half.clone()]);
        assert_eq!(t_modified(2, 1, 1), expected);
        for k in 1..=8 {
            assert_eq!(t_modified(k, 3, 2).degree(), Some(k));
        }
    }

    #[test]
    fn s_constant_examples() {
        for d in 1..6 {
            for k in 1..6 {
                assert_eq!(s_constant(k, d, d), rat(d as i64 - 1));
            }
        }
        for k in 1..8 {
            assert!(s_constant(k, 1, 1).is_zero());
        }
        assert!(s_constant(1, 2, 1).is_zero());
        let s = s_poly(1, 2, 1);
        assert_eq!(s, t_modified(1, 2, 1).scale(&rat(2)));
    }

    #[test]
    fn relation_examples() {
        assert!(check_relation_u_t(3));
        assert!(check_relation_u_t(2));
        for k in 1..=8 {
            for c in 1..=4 {
                for d in 1..=4 {
                    assert!(check_relation_f_u(k, c, d), "k={k} c={c} d={d}");
                }
            }
        }
    }

    #[test]
    fn relation_checks_reject_wrong_polynomials() {
        // Perturbing the recursion must break the identity.
        let wrong = &p_poly(4, 2) + &Poly::one();
        assert_ne!(wrong, &u_scaled(4, 2) - &u_scaled(2, 2));
        assert!(!check_relation_p_u(0, 2));
    }

    #[test]
    fn eval_examples() {
        assert!((eval_poly(&cheb_t(2), 0.5) + 0.5).abs() < 1e-15);
        let m = HermitianMatrix::diagonal(&[1.0, -1.0]);
        for k in 0..8 {
            let expected = 1.0 + if k % 2 == 0 { 1.0 } else { -1.0 };
            assert!((trace_poly(&cheb_t(k), &m).unwrap() - expected).abs() < 1e-12);
            assert!((trace_cheb(k, &m) - expected).abs() < 1e-12);
        }
        let k3 = HermitianMatrix::new_real(array![[0., 1., 1.], [1., 0., 1.], [1., 1., 0.]]).unwrap();
        let p = Poly::from_integers(&[-2, 0, 1]);
        assert!(trace_poly(&p, &k3).unwrap().abs() < 1e-12);
    }

    #[test]
    fn trace_cheb_examples() {
        let thetas = [0.1, 0.7, 1.3, 2.9];
        let m = HermitianMatrix::diagonal(&thetas.map(f64::cos));
        assert_eq!(trace_cheb(0, &m), 4.0);
        assert!((trace_cheb(1, &m) - m.trace()).abs() < 1e-15);
        for k in 0..10 {
            let expected: f64 = thetas.iter().map(|t| (k as f64 * t).cos()).sum();
            assert!((trace_cheb(k, &m) - expected).abs() < 1e-12);
            assert!((cheb_traces(&m, 9)[k] - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn power_traces_of_diagonal() {
        let m = HermitianMatrix::diagonal(&[0.5, -2.0, 3.0]);
        let traces = power_traces(&m, 5);
        for (k, tr) in traces.iter().enumerate() {
            let expected: f64 = [0.5f64, -2.0, 3.0].iter().map(|x| x.powi(k as i32)).sum();
            assert!((tr - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn quadrature_examples() {
        let s = cheb_coefficients(|x| x.powi(3), 6, 32).unwrap();
        for (k, &c) in s.coeffs().iter().enumerate() {
            let expected = match k {
                1 => 0.75,
                3 => 0.25,
                _ => 0.0,
            };
            assert!((c - expected).abs() < 1e-12, "k={k} c={c}");
        }
        let t5 = cheb_t(5);
        let s = cheb_coefficients(|x| t5.eval(x), 8, 32).unwrap();
        for (k, &c) in s.coeffs().iter().enumerate() {
            assert!((c - if k == 5 { 1.0 } else { 0.0 }).abs() < 1e-12);
        }
        let s = cheb_coefficients(|_| 1.0, 4, 16).unwrap();
        assert!((s.coeff(0) - 1.0).abs() < 1e-15);
        assert!(s.coeffs()[1..].iter().all(|c| c.abs() < 1e-12));
    }

    #[test]
    fn quadrature_needs_enough_nodes() {
        assert!(matches!(cheb_coefficients(|x| x, 5, 19), Err(Error::TooFewNodes { .. })));
        assert!(cheb_coefficients(|x| x, 5, 20).is_ok());
        assert!(cheb_coefficients(|x| x, 0, 0).is_err());
    }

    #[test]
    fn from_poly_matches_quadrature() {
        let p = Poly::from_integers(&[1, -2, 0, 5, 3]);
        let exact = ChebSeries::from_poly(&p);
        let quad = cheb_coefficients(|x| p.eval(x), 4, 16).unwrap();
        for k in 0..=4 {
            assert!((exact.coeff(k) - quad.coeff(k)).abs() < 1e-12);
        }
        for x in [-0.9, -0.1, 0.3, 0.99] {
            assert!((exact.eval(x) - p.eval(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn display_is_readable() {
        assert_eq!(cheb_t(3).to_string(), "4*x^3 - 3*x");
        assert_eq!(Poly::zero().to_string(), "0");
    }
}
