//! Catalan and Narayana numbers, the `R_k(a1, a2)` sum that controls the
//! fourth-moment correction for sample covariance matrices, and brute-force
//! enumerators (non-crossing partitions, plane trees) used as oracles for the
//! counting identities.

use num_bigint::BigUint;
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Largest `n` accepted by [`nc_partition_count`].
pub const MAX_PARTITION_N: usize = 12;
/// Largest edge count accepted by [`plane_tree_count`].
pub const MAX_TREE_EDGES: usize = 10;

fn binom(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    binomial(BigUint::from(n), BigUint::from(k))
}

/// `C_k = binom(2k, k) / (k + 1)`.
pub fn catalan(k: u64) -> BigUint {
    binom(2 * k, k) / BigUint::from(k + 1)
}

/// Catalan number at the half-integer index `twice_k / 2`: zero unless the
/// index is a nonnegative integer.
pub fn catalan_half(twice_k: i64) -> BigUint {
    if twice_k < 0 || twice_k % 2 != 0 {
        BigUint::zero()
    } else {
        catalan((twice_k / 2) as u64)
    }
}

/// Narayana number `N(n, k) = binom(n-1, k-1) binom(n, k-1) / k`; zero
/// outside `1 <= k <= n`.
pub fn narayana(n: u64, k: u64) -> BigUint {
    if k == 0 || k > n {
        return BigUint::zero();
    }
    binom(n - 1, k - 1) * binom(n, k - 1) / BigUint::from(k)
}

/// A set partition of `{1, ..., n}` with blocks listed in order of their
/// smallest element, each block sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NcPartition {
    blocks: Vec<Vec<usize>>,
}

impl NcPartition {
    /// Builds a partition from a restricted growth string (`labels[i]` is
    /// the block of element `i + 1`). Returns `None` when it is crossing.
    pub fn from_labels(labels: &[usize]) -> Option<Self> {
        let count = labels.iter().max().map_or(0, |m| m + 1);
        let mut blocks = vec![Vec::new(); count];
        for (i, &b) in labels.iter().enumerate() {
            blocks[b].push(i + 1);
        }
        blocks.retain(|b| !b.is_empty());
        let p = NcPartition { blocks };
        p.is_non_crossing().then_some(p)
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    /// No `a < b < c < d` with `a, c` in one block and `b, d` in another.
    ///
    /// Equivalent to no two interleaving arcs between consecutive elements
    /// of the same block.
    pub fn is_non_crossing(&self) -> bool {
        let arcs: Vec<(usize, usize)> = self.blocks.iter().flat_map(|b| b.windows(2).map(|w| (w[0], w[1]))).collect();
        arcs.iter().all(|&(a, c)| arcs.iter().all(|&(b, d)| !(a < b && b < c && c < d)))
    }
}

/// Calls `visit` with every restricted growth string of length `n`.
fn for_each_set_partition(n: usize, mut visit: impl FnMut(&[usize])) {
    if n == 0 {
        return;
    }
    let mut labels = vec![0usize; n];
    let mut max_prefix = vec![0usize; n];
    loop {
        visit(&labels);
        // increment: find rightmost position that can grow
        let mut i = n - 1;
        loop {
            if i == 0 {
                return;
            }
            if labels[i] <= max_prefix[i - 1] {
                labels[i] += 1;
                break;
            }
            i -= 1;
        }
        max_prefix[i] = max_prefix[i - 1].max(labels[i]);
        for j in i + 1..n {
            labels[j] = 0;
            max_prefix[j] = max_prefix[i];
        }
    }
}

/// Non-crossing partitions of `{1, ..., n}` counted by block count
/// (index `k` holds the count with `k` blocks), by exhaustive enumeration.
pub fn nc_partition_counts(n: usize) -> Result<Vec<BigUint>> {
    if n > MAX_PARTITION_N {
        return Err(Error::OracleTooLarge { n, max: MAX_PARTITION_N });
    }
    let mut counts = vec![0u64; n + 1];
    for_each_set_partition(n, |labels| {
        if let Some(p) = NcPartition::from_labels(labels) {
            counts[p.block_count()] += 1;
        }
    });
    Ok(counts.into_iter().map(BigUint::from).collect())
}

/// Number of non-crossing partitions of `{1, ..., n}` with `k` blocks.
pub fn nc_partition_count(n: usize, k: usize) -> Result<BigUint> {
    let counts = nc_partition_counts(n)?;
    Ok(counts.get(k).cloned().unwrap_or_default())
}

/// A rooted plane tree stored as its Dyck word (`true` = step away from the
/// root). The word is the canonical form: two plane trees are isomorphic
/// exactly when their words are equal. Vertices are properly 2-colored by
/// depth parity.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PlaneTree {
    word: Vec<bool>,
}

impl PlaneTree {
    pub fn from_word(word: Vec<bool>) -> Option<Self> {
        let mut depth = 0i64;
        for &down in &word {
            depth += if down { 1 } else { -1 };
            if depth < 0 {
                return None;
            }
        }
        (depth == 0).then_some(PlaneTree { word })
    }

    pub fn edges(&self) -> usize {
        self.word.len() / 2
    }

    /// Children of each vertex in preorder, vertex 0 being the root.
    pub fn children(&self) -> Vec<Vec<usize>> {
        let mut children = vec![Vec::new()];
        let mut stack = vec![0usize];
        for &down in &self.word {
            if down {
                let v = children.len();
                children.push(Vec::new());
                children[*stack.last().expect("root stays on stack")].push(v);
                stack.push(v);
            } else {
                stack.pop();
            }
        }
        children
    }

    /// `(vertices at even depth, vertices at odd depth)`; the first class
    /// contains the root.
    pub fn class_sizes(&self) -> (usize, usize) {
        let mut depth = 0usize;
        let (mut even, mut odd) = (1, 0);
        for &down in &self.word {
            if down {
                depth += 1;
                if depth.is_multiple_of(2) {
                    even += 1;
                } else {
                    odd += 1;
                }
            } else {
                depth -= 1;
            }
        }
        (even, odd)
    }

    /// All plane trees with `n` edges.
    pub fn all(n: usize) -> Vec<PlaneTree> {
        let mut out = Vec::new();
        let mut word = Vec::with_capacity(2 * n);
        fn rec(word: &mut Vec<bool>, open: usize, close: usize, n: usize, out: &mut Vec<PlaneTree>) {
            if word.len() == 2 * n {
                out.push(PlaneTree { word: word.clone() });
                return;
            }
            if open < n {
                word.push(true);
                rec(word, open + 1, close, n, out);
                word.pop();
            }
            if close < open {
                word.push(false);
                rec(word, open, close + 1, n, out);
                word.pop();
            }
        }
        rec(&mut word, 0, 0, n, &mut out);
        out
    }
}

/// Counts of plane trees with `n` edges having exactly `k` vertices in a
/// given color class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlaneTreeCount {
    pub total: BigUint,
    pub root_class: BigUint,
    pub non_root_class: BigUint,
}

pub fn plane_tree_count(n: usize, k: usize) -> Result<PlaneTreeCount> {
    if n > MAX_TREE_EDGES {
        return Err(Error::OracleTooLarge { n, max: MAX_TREE_EDGES });
    }
    let trees = PlaneTree::all(n);
    let (mut root_class, mut non_root_class) = (0u64, 0u64);
    for t in &trees {
        let (even, odd) = t.class_sizes();
        root_class += u64::from(even == k);
        non_root_class += u64::from(odd == k);
    }
    Ok(PlaneTreeCount {
        total: BigUint::from(trees.len()),
        root_class: BigUint::from(root_class),
        non_root_class: BigUint::from(non_root_class),
    })
}

/// `R_k(a1, a2)` evaluated from its defining double sum over Narayana numbers.
///
/// # Panics
/// If `k == 0` or either argument is not positive.
pub fn r_k_sum(k: u64, a1: f64, a2: f64) -> f64 {
    assert!(k >= 1 && a1 > 0.0 && a2 > 0.0, "R_k needs k >= 1 and positive a1, a2");
    let prefactor = ((a1 + a2) / (2.0 * (a1 * a2).sqrt())).powi(k as i32) * (a2 / a1).sqrt();
    let sum: f64 = (1..=k)
        .map(|s| {
            let inner: f64 =
                (1..=s).map(|t| to_f64(&narayana(s, t)) * a1.powi(t as i32) * a2.powi((s - t) as i32)).sum();
            (-1.0 / (a1 + a2)).powi(s as i32) * to_f64(&binom(k, s)) * s as f64 * inner
        })
        .sum();
    prefactor * sum
}

/// Closed form of `R_k`: `-binom(k, (k-1)/2) / 2^k` for odd `k`, zero for even `k`.
pub fn r_k_closed(k: u64) -> BigRational {
    if k.is_multiple_of(2) {
        return BigRational::zero();
    }
    let num = binom(k, (k - 1) / 2);
    let den = BigUint::one() << k;
    -BigRational::new(num.into(), den.into())
}

fn to_f64(x: &BigUint) -> f64 {
    x.to_f64().unwrap_or(f64::INFINITY)
}
