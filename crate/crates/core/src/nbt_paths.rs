//! Non-backtracking paths on small regular and biregular graphs whose edges
//! carry unit-modulus weights, and exact verification of the identities
//! that turn path sums into traces of Chebyshev-type matrix polynomials.
//!
//! Paths are directed and based: a closed path and its rotations and
//! reversal are all counted separately.
//!
//! When every weight is `±1` both sides of each identity are computed in
//! exact arithmetic (integers on the path side, rationals on the matrix
//! side). Otherwise complex floating point is used with an absolute
//! tolerance of `1e-9` times the number of paths.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use ndarray::Array2;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::{Deserialize, Serialize};

use crate::chebyshev::{self, Poly};
use crate::error::{Error, Result};

/// Upper bound on `n (d+1) d^{k-1}`, the number of non-backtracking walks
/// of length `k` on an `n`-vertex `(d+1)`-regular graph.
pub const REGULAR_PATH_LIMIT: f64 = 1e8;

/// Upper bound on `n_V (c+1) d^k c^{k-1}`, the number of non-backtracking
/// walks of length `2k` from `V` in a `(c+1, d+1)`-biregular graph.
pub const BIPARTITE_PATH_LIMIT: f64 = 2e8;

const FLOAT_TOLERANCE: f64 = 1e-9;

/// How edge phases are drawn by [`PhasedGraph::with_random_phases`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhaseModel {
    /// `±1` with probability 1/2 each.
    Sign,
    /// Uniform on the unit circle.
    UnitCircle,
}

fn draw_phase(rng: &mut Xoshiro256PlusPlus, model: PhaseModel) -> Complex64 {
    match model {
        PhaseModel::Sign => Complex64::new(if rng.random::<bool>() { 1.0 } else { -1.0 }, 0.0),
        PhaseModel::UnitCircle => Complex64::from_polar(1.0, TAU * rng.random::<f64>()),
    }
}

fn is_unit(w: Complex64) -> bool {
    (w.norm() - 1.0).abs() <= 1e-12
}

fn is_sign(w: Complex64) -> bool {
    w.im == 0.0 && (w.re == 1.0 || w.re == -1.0)
}

/// Undirected simple graph with a Hermitian unit-modulus weight on each edge
/// (the generalized adjacency matrix).
#[derive(Debug, Clone, PartialEq)]
pub struct PhasedGraph {
    adjacency: Vec<Vec<usize>>,
    weights: Array2<Complex64>,
}

impl PhasedGraph {
    /// Graph on `n` vertices with all edge weights equal to 1.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); n];
        let mut weights = Array2::zeros((n, n));
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!("edge ({u}, {v}) out of range for {n} vertices")));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("loop at vertex {u}")));
            }
            if weights[[u, v]] != Complex64::zero() {
                return Err(Error::InvalidGraph(format!("duplicate edge ({u}, {v})")));
            }
            weights[[u, v]] = Complex64::one();
            weights[[v, u]] = Complex64::one();
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for nbrs in &mut adjacency {
            nbrs.sort_unstable();
        }
        Ok(PhasedGraph { adjacency, weights })
    }

    pub fn complete(n: usize) -> Self {
        let edges: Vec<_> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        Self::new(n, &edges).expect("complete graph is simple")
    }

    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidGraph(format!("cycle needs at least 3 vertices, got {n}")));
        }
        let edges: Vec<_> = (0..n).map(|u| (u, (u + 1) % n)).collect();
        Self::new(n, &edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.adjacency[u]
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, nbrs)| nbrs.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    /// Weight of the ordered edge `(u, v)`; zero for non-edges.
    pub fn weight(&self, u: usize, v: usize) -> Complex64 {
        self.weights[[u, v]]
    }

    /// Sets `w` on `(u, v)` and `conj(w)` on `(v, u)`.
    pub fn set_weight(&mut self, u: usize, v: usize, w: Complex64) -> Result<()> {
        if self.weights[[u, v]] == Complex64::zero() {
            return Err(Error::InvalidGraph(format!("({u}, {v}) is not an edge")));
        }
        if !is_unit(w) {
            return Err(Error::InvalidGraph(format!("weight {w} is not unit modulus")));
        }
        self.weights[[u, v]] = w;
        self.weights[[v, u]] = w.conj();
        Ok(())
    }

    /// Same graph with phases drawn independently per edge, deterministic in `seed`.
    pub fn with_random_phases(&self, model: PhaseModel, seed: u64) -> Self {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
        let mut g = self.clone();
        let edges: Vec<_> = self.edges().collect();
        for (u, v) in edges {
            g.set_weight(u, v, draw_phase(&mut rng, model)).expect("edge exists and phase is unit");
        }
        g
    }

    /// The common degree `d + 1`, if every vertex has it.
    pub fn regular_degree(&self) -> Option<usize> {
        let first = self.adjacency.first()?.len();
        self.adjacency.iter().all(|a| a.len() == first).then_some(first)
    }

    fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// `d` for a `(d+1)`-regular graph with `d >= 1`.
    fn branching(&self) -> Result<u64> {
        match self.regular_degree() {
            Some(deg) if deg >= 2 => Ok(deg as u64 - 1),
            Some(deg) => Err(Error::NotRegular(format!("of degree at least 2 (degree {deg})"))),
            None => Err(Error::NotRegular("regular".into())),
        }
    }

    pub fn is_sign_weighted(&self) -> bool {
        self.edges().all(|(u, v)| is_sign(self.weight(u, v)))
    }

    /// Generalized adjacency matrix.
    pub fn adjacency_matrix(&self) -> Array2<Complex64> {
        self.weights.clone()
    }

    fn check_bound(&self, k: usize) -> Result<()> {
        let deg = self.max_degree() as f64;
        let estimate = self.vertex_count() as f64 * deg * (deg - 1.0).max(1.0).powi(k as i32 - 1);
        if estimate > REGULAR_PATH_LIMIT {
            return Err(Error::EnumerationBound { estimate, limit: REGULAR_PATH_LIMIT });
        }
        Ok(())
    }
}

/// Bipartite graph with parts `V` (`n_v` vertices) and `W` (`n_w` vertices)
/// and a unit-modulus weight `A[v, w]` on each edge.
///
/// Paths through it use combined vertex indices: `V` is `0..n_v` and `W` is
/// `n_v..n_v + n_w`.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartitePhasedGraph {
    weights: Array2<Complex64>,
}

impl BipartitePhasedGraph {
    pub fn new(n_v: usize, n_w: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut weights = Array2::zeros((n_v, n_w));
        for &(v, w) in edges {
            if v >= n_v || w >= n_w {
                return Err(Error::InvalidGraph(format!("edge ({v}, {w}) out of range")));
            }
            if weights[[v, w]] != Complex64::zero() {
                return Err(Error::InvalidGraph(format!("duplicate edge ({v}, {w})")));
            }
            weights[[v, w]] = Complex64::one();
        }
        Ok(BipartitePhasedGraph { weights })
    }

    /// `K_{n_v, n_w}`.
    pub fn complete(n_v: usize, n_w: usize) -> Self {
        let edges: Vec<_> = (0..n_v).flat_map(|v| (0..n_w).map(move |w| (v, w))).collect();
        Self::new(n_v, n_w, &edges).expect("complete bipartite graph is simple")
    }

    pub fn part_sizes(&self) -> (usize, usize) {
        self.weights.dim()
    }

    pub fn weight(&self, v: usize, w: usize) -> Complex64 {
        self.weights[[v, w]]
    }

    pub fn set_weight(&mut self, v: usize, w: usize, value: Complex64) -> Result<()> {
        if self.weights[[v, w]] == Complex64::zero() {
            return Err(Error::InvalidGraph(format!("({v}, {w}) is not an edge")));
        }
        if !is_unit(value) {
            return Err(Error::InvalidGraph(format!("weight {value} is not unit modulus")));
        }
        self.weights[[v, w]] = value;
        Ok(())
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.weights.indexed_iter().filter(|(_, w)| **w != Complex64::zero()).map(|((v, w), _)| (v, w))
    }

    pub fn with_random_phases(&self, model: PhaseModel, seed: u64) -> Self {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
        let mut g = self.clone();
        let edges: Vec<_> = self.edges().collect();
        for (v, w) in edges {
            g.set_weight(v, w, draw_phase(&mut rng, model)).expect("edge exists and phase is unit");
        }
        g
    }

    /// `(c, d)` when every `V` vertex has degree `c + 1 >= 2` and every `W`
    /// vertex has degree `d + 1 >= 2`.
    pub fn biregularity(&self) -> Option<(u64, u64)> {
        let (n_v, n_w) = self.part_sizes();
        let deg_v: Vec<usize> = (0..n_v).map(|v| self.weights.row(v).iter().filter(|x| !x.is_zero()).count()).collect();
        let deg_w: Vec<usize> =
            (0..n_w).map(|w| self.weights.column(w).iter().filter(|x| !x.is_zero()).count()).collect();
        let c1 = *deg_v.first()?;
        let d1 = *deg_w.first()?;
        let uniform = deg_v.iter().all(|&x| x == c1) && deg_w.iter().all(|&x| x == d1);
        (uniform && c1 >= 2 && d1 >= 2).then_some((c1 as u64 - 1, d1 as u64 - 1))
    }

    fn require_biregular(&self) -> Result<(u64, u64)> {
        self.biregularity().ok_or_else(|| Error::NotRegular("biregular with both degrees at least 2".into()))
    }

    pub fn is_sign_weighted(&self) -> bool {
        self.edges().all(|(v, w)| is_sign(self.weight(v, w)))
    }

    /// The `n_v × n_w` generalized adjacency matrix.
    pub fn adjacency_matrix(&self) -> Array2<Complex64> {
        self.weights.clone()
    }

    /// The whole graph as a [`PhasedGraph`] whose weights are `A[v, w]` on
    /// `V → W` steps and `conj(A[v, w])` on `W → V` steps, so that its path
    /// weights are the alternating products of [`bipartite_weight`].
    pub fn as_phased_graph(&self) -> PhasedGraph {
        let (n_v, n_w) = self.part_sizes();
        let edges: Vec<_> = self.edges().map(|(v, w)| (v, n_v + w)).collect();
        let mut g = PhasedGraph::new(n_v + n_w, &edges).expect("bipartite graph is simple");
        for (v, w) in self.edges() {
            g.set_weight(v, n_v + w, self.weight(v, w)).expect("edge exists");
        }
        g
    }

    fn check_bound(&self, k: usize) -> Result<()> {
        let (c, d) = self.require_biregular()?;
        let (c, d) = (c as f64, d as f64);
        let n_v = self.part_sizes().0 as f64;
        let estimate = n_v * (c + 1.0) * d.powi(k as i32) * c.powi(k as i32 - 1);
        if estimate > BIPARTITE_PATH_LIMIT {
            return Err(Error::EnumerationBound { estimate, limit: BIPARTITE_PATH_LIMIT });
        }
        Ok(())
    }
}

/// A walk `u_0, u_1, ..., u_k` through adjacent vertices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path {
    vertices: Vec<usize>,
}

impl Path {
    pub fn new(vertices: Vec<usize>) -> Self {
        Path { vertices }
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    /// Number of steps.
    pub fn len(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_closed(&self) -> bool {
        self.vertices.first() == self.vertices.last()
    }

    pub fn is_non_backtracking(&self) -> bool {
        self.vertices.windows(3).all(|w| w[0] != w[2])
    }

    /// Closed, non-backtracking, and `u_{k-1} != u_1`.
    pub fn is_tailless(&self) -> bool {
        let n = self.vertices.len();
        self.is_closed() && self.is_non_backtracking() && n >= 3 && self.vertices[n - 2] != self.vertices[1]
    }

    /// Length of the tail: the largest `l` with `u_j = u_{k-j}` for all `j <= l`.
    pub fn tail_length(&self) -> usize {
        let k = self.len();
        (1..=k / 2).take_while(|&j| self.vertices[j] == self.vertices[k - j]).count()
    }

    pub fn reversed(&self) -> Path {
        Path { vertices: self.vertices.iter().rev().copied().collect() }
    }
}

/// Depth-first enumeration of non-backtracking walks of length `len` from
/// `start`, carrying the running product of step weights. `step(u, v)` is
/// the weight of moving from `u` to `v`.
fn walk<W, S, F>(graph: &PhasedGraph, start: usize, len: usize, step: &S, visit: &mut F)
where
    W: Copy + std::ops::Mul<Output = W> + One,
    S: Fn(usize, usize) -> W,
    F: FnMut(&[usize], W),
{
    fn rec<W, S, F>(graph: &PhasedGraph, path: &mut Vec<usize>, len: usize, acc: W, step: &S, visit: &mut F)
    where
        W: Copy + std::ops::Mul<Output = W> + One,
        S: Fn(usize, usize) -> W,
        F: FnMut(&[usize], W),
    {
        if path.len() == len + 1 {
            visit(path, acc);
            return;
        }
        let u = *path.last().expect("path starts non-empty");
        let back = (path.len() >= 2).then(|| path[path.len() - 2]);
        for &v in graph.neighbors(u) {
            if Some(v) == back {
                continue;
            }
            path.push(v);
            rec(graph, path, len, acc * step(u, v), step, visit);
            path.pop();
        }
    }
    let mut path = Vec::with_capacity(len + 1);
    path.push(start);
    rec(graph, &mut path, len, W::one(), step, visit);
}

fn ends_tailless(path: &[usize]) -> bool {
    let n = path.len();
    path[0] == path[n - 1] && n >= 3 && path[n - 2] != path[1]
}

/// All closed non-backtracking tailless paths of length `k`.
pub fn enumerate_nbt_closed(graph: &PhasedGraph, k: usize) -> Result<Vec<Path>> {
    if k == 0 {
        return Err(Error::InvalidArgument("path length must be positive".into()));
    }
    graph.check_bound(k)?;
    let mut out = Vec::new();
    let unit = |_: usize, _: usize| 1i64;
    for start in 0..graph.vertex_count() {
        walk(graph, start, k, &unit, &mut |p: &[usize], _| {
            if ends_tailless(p) {
                out.push(Path::new(p.to_vec()));
            }
        });
    }
    Ok(out)
}

/// All non-backtracking paths of length `k` (open or closed).
pub fn enumerate_nb_paths(graph: &PhasedGraph, k: usize) -> Result<Vec<Path>> {
    if k == 0 {
        return Err(Error::InvalidArgument("path length must be positive".into()));
    }
    graph.check_bound(k)?;
    let mut out = Vec::new();
    let unit = |_: usize, _: usize| 1i64;
    for start in 0..graph.vertex_count() {
        walk(graph, start, k, &unit, &mut |p: &[usize], _| out.push(Path::new(p.to_vec())));
    }
    Ok(out)
}

/// `A(γ) = A_{u0 u1} A_{u1 u2} ... A_{u_{k-1} u_k}`.
pub fn path_weight(graph: &PhasedGraph, path: &Path) -> Result<Complex64> {
    path.vertices.windows(2).try_fold(Complex64::one(), |acc, w| {
        let x = graph.weight(w[0], w[1]);
        if x.is_zero() {
            Err(Error::InvalidPath(format!("{} and {} are not adjacent", w[0], w[1])))
        } else {
            Ok(acc * x)
        }
    })
}

/// `A_2(γ) = A_{v0 w1} conj(A_{v1 w1}) ... A_{v_{k-1} w_k} conj(A_{v_k w_k})`
/// for `γ = (v0, w1, v1, ..., w_k, v_k)` in combined vertex indexing.
pub fn bipartite_weight(graph: &BipartitePhasedGraph, path: &Path) -> Result<Complex64> {
    let (n_v, n_w) = graph.part_sizes();
    let vs = path.vertices();
    if vs.len().is_multiple_of(2) {
        return Err(Error::InvalidPath("alternating V-W path must start and end in V".into()));
    }
    let mut acc = Complex64::one();
    for (i, pair) in vs.windows(2).enumerate() {
        let (v, w) = if i % 2 == 0 { (pair[0], pair[1]) } else { (pair[1], pair[0]) };
        if v >= n_v || w < n_v || w >= n_v + n_w {
            return Err(Error::InvalidPath(format!("path does not alternate V, W at step {i}")));
        }
        let a = graph.weight(v, w - n_v);
        if a.is_zero() {
            return Err(Error::InvalidPath(format!("{v} and {} are not adjacent", w - n_v)));
        }
        acc *= if i % 2 == 0 { a } else { a.conj() };
    }
    Ok(acc)
}

/// Which path identity a check refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Identity {
    /// NB path sums between vertex pairs equal `P_k(A)` entries.
    NbPathsRegular,
    /// Closed tailless path sum equals the trace of `2 d^{k/2} T_k(A/2√d)` (+ `(d-1)I`).
    NbtClosedRegular,
    /// NB path sums on a biregular graph equal `F_k(AA*)` entries.
    NbPathsBiregular,
    /// Closed tailless path sum from `V` equals `Tr[2 T̃_k(AA*) + s_{c,d,k} I]`.
    NbtClosedBiregular,
}

/// Outcome of comparing the path side with the matrix side of an identity.
///
/// For trace identities `lhs`/`rhs` are the two sides; for entrywise
/// identities they are the sums of all entries of each side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub identity: Identity,
    pub k: usize,
    pub paths: u64,
    pub exact: bool,
    pub holds: bool,
    pub max_abs_error: f64,
    pub lhs: f64,
    pub rhs: f64,
}

/// Square matrix over exact rationals, for the exact side of identity checks.
#[derive(Debug, Clone, PartialEq)]
struct RationalMatrix {
    n: usize,
    data: Vec<BigRational>,
}

impl RationalMatrix {
    fn from_signs(m: &Array2<Complex64>) -> Self {
        let n = m.nrows();
        let data = m.iter().map(|x| BigRational::from_integer(BigInt::from(x.re as i64))).collect();
        RationalMatrix { n, data }
    }

    fn identity_scaled(n: usize, c: &BigRational) -> Self {
        let mut data = vec![BigRational::zero(); n * n];
        for i in 0..n {
            data[i * n + i] = c.clone();
        }
        RationalMatrix { n, data }
    }

    fn at(&self, i: usize, j: usize) -> &BigRational {
        &self.data[i * self.n + j]
    }

    fn mul(&self, other: &Self) -> Self {
        let n = self.n;
        let mut data = vec![BigRational::zero(); n * n];
        for i in 0..n {
            for l in 0..n {
                let a = self.at(i, l);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    data[i * n + j] += a * other.at(l, j);
                }
            }
        }
        RationalMatrix { n, data }
    }

    /// `p(self)` by Horner's rule.
    fn poly(&self, p: &Poly) -> Self {
        let mut acc = RationalMatrix::identity_scaled(self.n, &BigRational::zero());
        for c in p.coeffs().iter().rev() {
            acc = acc.mul(self);
            for i in 0..self.n {
                acc.data[i * self.n + i] += c;
            }
        }
        acc
    }

    fn trace(&self) -> BigRational {
        (0..self.n).map(|i| self.at(i, i).clone()).sum()
    }
}

/// `p(M)` for a complex matrix by Horner's rule.
fn complex_poly(m: &Array2<Complex64>, p: &Poly) -> Array2<Complex64> {
    let n = m.nrows();
    let mut acc = Array2::<Complex64>::zeros((n, n));
    for c in p.to_f64().iter().rev() {
        acc = acc.dot(m);
        for i in 0..n {
            acc[[i, i]] += c;
        }
    }
    acc
}

fn rat_to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Compares an entrywise path sum with a polynomial of `base`.
///
/// `exact_lhs` is `Some` when all weights were `±1`.
fn compare_entries(
    identity: Identity,
    k: usize,
    paths: u64,
    exact_lhs: Option<&BTreeMap<(usize, usize), i64>>,
    float_lhs: &Array2<Complex64>,
    base: &Array2<Complex64>,
    poly: &Poly,
) -> IdentityCheck {
    let n = base.nrows();
    match exact_lhs {
        Some(lhs) => {
            let rhs = RationalMatrix::from_signs(base).poly(poly);
            let mut holds = true;
            let mut max_err = 0.0f64;
            let mut lhs_sum = 0i64;
            let mut rhs_sum = BigRational::zero();
            for i in 0..n {
                for j in 0..n {
                    let l = lhs.get(&(i, j)).copied().unwrap_or(0);
                    let r = rhs.at(i, j);
                    lhs_sum += l;
                    rhs_sum += r;
                    let diff = BigRational::from_integer(l.into()) - r;
                    if !diff.is_zero() {
                        holds = false;
                        max_err = max_err.max(rat_to_f64(&diff).abs());
                    }
                }
            }
            IdentityCheck {
                identity,
                k,
                paths,
                exact: true,
                holds,
                max_abs_error: max_err,
                lhs: lhs_sum as f64,
                rhs: rat_to_f64(&rhs_sum),
            }
        }
        None => {
            let rhs = complex_poly(base, poly);
            let max_err = float_lhs.iter().zip(rhs.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            IdentityCheck {
                identity,
                k,
                paths,
                exact: false,
                holds: max_err <= FLOAT_TOLERANCE * (paths.max(1) as f64),
                max_abs_error: max_err,
                lhs: float_lhs.iter().map(|x| x.re).sum(),
                rhs: rhs.iter().map(|x| x.re).sum(),
            }
        }
    }
}

fn compare_traces(
    identity: Identity,
    k: usize,
    paths: u64,
    exact_lhs: Option<i64>,
    float_lhs: Complex64,
    base: &Array2<Complex64>,
    poly: &Poly,
) -> IdentityCheck {
    match exact_lhs {
        Some(lhs) => {
            let rhs = RationalMatrix::from_signs(base).poly(poly).trace();
            let diff = BigRational::from_integer(lhs.into()) - &rhs;
            IdentityCheck {
                identity,
                k,
                paths,
                exact: true,
                holds: diff.is_zero(),
                max_abs_error: rat_to_f64(&diff).abs(),
                lhs: lhs as f64,
                rhs: rat_to_f64(&rhs),
            }
        }
        None => {
            let rhs = complex_poly(base, poly).diag().sum();
            let err = (float_lhs - rhs).norm();
            IdentityCheck {
                identity,
                k,
                paths,
                exact: false,
                holds: err <= FLOAT_TOLERANCE * (paths.max(1) as f64),
                max_abs_error: err,
                lhs: float_lhs.re,
                rhs: rhs.re,
            }
        }
    }
}

fn sign(w: Complex64) -> i64 {
    w.re as i64
}

/// For a `(d+1)`-regular graph: the sum of `A(γ)` over non-backtracking
/// paths of length `k` from `u` to `v` equals `[P_k(A)]_{uv}` for every pair.
pub fn verify_nb_paths_regular(graph: &PhasedGraph, k: usize) -> Result<IdentityCheck> {
    let d = graph.branching()?;
    if k == 0 {
        return Err(Error::InvalidArgument("path length must be positive".into()));
    }
    graph.check_bound(k)?;
    let n = graph.vertex_count();
    let exact = graph.is_sign_weighted();
    let mut paths = 0u64;
    let mut exact_lhs = BTreeMap::new();
    let mut float_lhs = Array2::<Complex64>::zeros((n, n));
    for start in 0..n {
        if exact {
            let step = |u: usize, v: usize| sign(graph.weight(u, v));
            walk(graph, start, k, &step, &mut |p: &[usize], w: i64| {
                paths += 1;
                *exact_lhs.entry((start, p[k])).or_insert(0) += w;
            });
        } else {
            let step = |u: usize, v: usize| graph.weight(u, v);
            walk(graph, start, k, &step, &mut |p: &[usize], w: Complex64| {
                paths += 1;
                float_lhs[[start, p[k]]] += w;
            });
        }
    }
    Ok(compare_entries(
        Identity::NbPathsRegular,
        k,
        paths,
        exact.then_some(&exact_lhs),
        &float_lhs,
        &graph.adjacency_matrix(),
        &chebyshev::p_poly(k, d),
    ))
}

/// For a `(d+1)`-regular graph: the sum of `A(γ)` over closed
/// non-backtracking tailless paths of length `k` equals
/// `Tr[2 d^{k/2} T_k(A / 2√d)]`, plus `(d-1) n` for even `k`.
pub fn verify_nbt_closed_regular(graph: &PhasedGraph, k: usize) -> Result<IdentityCheck> {
    let d = graph.branching()?;
    if k == 0 {
        return Err(Error::InvalidArgument("path length must be positive".into()));
    }
    graph.check_bound(k)?;
    let exact = graph.is_sign_weighted();
    let mut paths = 0u64;
    let mut exact_lhs = 0i64;
    let mut float_lhs = Complex64::zero();
    for start in 0..graph.vertex_count() {
        if exact {
            let step = |u: usize, v: usize| sign(graph.weight(u, v));
            walk(graph, start, k, &step, &mut |p: &[usize], w: i64| {
                if ends_tailless(p) {
                    paths += 1;
                    exact_lhs += w;
                }
            });
        } else {
            let step = |u: usize, v: usize| graph.weight(u, v);
            walk(graph, start, k, &step, &mut |p: &[usize], w: Complex64| {
                if ends_tailless(p) {
                    paths += 1;
                    float_lhs += w;
                }
            });
        }
    }
    Ok(compare_traces(
        Identity::NbtClosedRegular,
        k,
        paths,
        exact.then_some(exact_lhs),
        float_lhs,
        &graph.adjacency_matrix(),
        &chebyshev::nbt_closed_poly(k, d),
    ))
}

/// For a `(c+1, d+1)`-biregular graph: the sum of `A_2(γ)` over
/// non-backtracking paths of length `2k` from `v_0 ∈ V` to `v_k ∈ V` equals
/// `[F_k(AA*)]_{v_0 v_k}` for every pair.
pub fn verify_nb_paths_biregular(graph: &BipartitePhasedGraph, k: usize) -> Result<IdentityCheck> {
    let (c, d) = graph.require_biregular()?;
    if k == 0 {
        return Err(Error::InvalidArgument("path length must be positive".into()));
    }
    graph.check_bound(k)?;
    let (n_v, _) = graph.part_sizes();
    let whole = graph.as_phased_graph();
    let exact = graph.is_sign_weighted();
    let len = 2 * k;
    let mut paths = 0u64;
    let mut exact_lhs = BTreeMap::new();
    let mut float_lhs = Array2::<Complex64>::zeros((n_v, n_v));
    for start in 0..n_v {
        if exact {
            let step = |u: usize, v: usize| sign(whole.weight(u, v));
            walk(&whole, start, len, &step, &mut |p: &[usize], w: i64| {
                paths += 1;
                *exact_lhs.entry((start, p[len])).or_insert(0) += w;
            });
        } else {
            let step = |u: usize, v: usize| whole.weight(u, v);
            walk(&whole, start, len, &step, &mut |p: &[usize], w: Complex64| {
                paths += 1;
                float_lhs[[start, p[len]]] += w;
            });
        }
    }
    let a = graph.adjacency_matrix();
    let gram = a.dot(&a.t().mapv(|x| x.conj()));
    Ok(compare_entries(
        Identity::NbPathsBiregular,
        k,
        paths,
        exact.then_some(&exact_lhs),
        &float_lhs,
        &gram,
        &chebyshev::f_poly(k, c, d),
    ))
}

/// For a `(c+1, d+1)`-biregular graph with `c >= d`: the sum of `A_2(γ)`
/// over closed non-backtracking tailless paths of length `2k` starting in
/// `V` equals `Tr[2 T̃_k(AA*) + s_{c,d,k} I]`.
pub fn verify_nbt_closed_biregular(graph: &BipartitePhasedGraph, k: usize) -> Result<IdentityCheck> {
    let (c, d) = graph.require_biregular()?;
    if c < d {
        return Err(Error::BiregularOrder { c, d });
    }
    if k == 0 {
        return Err(Error::InvalidArgument("path length must be positive".into()));
    }
    graph.check_bound(k)?;
    let (n_v, _) = graph.part_sizes();
    let whole = graph.as_phased_graph();
    let exact = graph.is_sign_weighted();
    let len = 2 * k;
    let mut paths = 0u64;
    let mut exact_lhs = 0i64;
    let mut float_lhs = Complex64::zero();
    for start in 0..n_v {
        if exact {
            let step = |u: usize, v: usize| sign(whole.weight(u, v));
            walk(&whole, start, len, &step, &mut |p: &[usize], w: i64| {
                if ends_tailless(p) {
                    paths += 1;
                    exact_lhs += w;
                }
            });
        } else {
            let step = |u: usize, v: usize| whole.weight(u, v);
            walk(&whole, start, len, &step, &mut |p: &[usize], w: Complex64| {
                if ends_tailless(p) {
                    paths += 1;
                    float_lhs += w;
                }
            });
        }
    }
    let a = graph.adjacency_matrix();
    let gram = a.dot(&a.t().mapv(|x| x.conj()));
    Ok(compare_traces(
        Identity::NbtClosedBiregular,
        k,
        paths,
        exact.then_some(exact_lhs),
        float_lhs,
        &gram,
        &chebyshev::s_poly(k, c, d),
    ))
}

/// Counts used by the tail decomposition of closed non-backtracking paths:
/// `(closed NB paths of length k with tail length exactly 1,
///   (d-1) × closed tailless paths of length k-2)`.
pub fn tail_decomposition(graph: &PhasedGraph, k: usize) -> Result<(u64, u64)> {
    let d = graph.branching()?;
    if k < 3 {
        return Err(Error::InvalidArgument("tail decomposition needs k >= 3".into()));
    }
    graph.check_bound(k)?;
    let unit = |_: usize, _: usize| 1i64;
    let mut with_tail = 0u64;
    let mut shorter = 0u64;
    for start in 0..graph.vertex_count() {
        walk(graph, start, k, &unit, &mut |p: &[usize], _| {
            let path = Path { vertices: p.to_vec() };
            if path.is_closed() && path.tail_length() == 1 {
                with_tail += 1;
            }
        });
        walk(graph, start, k - 2, &unit, &mut |p: &[usize], _| {
            if ends_tailless(p) {
                shorter += 1;
            }
        });
    }
    Ok((with_tail, (d - 1) * shorter))
}
