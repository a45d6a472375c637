//! Exact moment sequences and a brute-force r-plane-tree counter.
//!
//! An r-plane tree is a plane tree whose vertices carry colours in `1..=r`
//! such that the colours at the ends of every edge sum to at most `r + 1`.
//! There are `C⟨r⟩_k = r/(k+1)·binom((r+1)k, k)` of them on `k + 1`
//! vertices; the enumerator here checks that by exhaustion.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CombinatoricsError {
    #[error("order must be at least 1, got {0}")]
    InvalidOrder(usize),
    #[error("a tree needs at least one vertex")]
    NoVertices,
    #[error("{vertices} vertices exceeds the enumeration cap of {cap}")]
    ResourceLimit { vertices: usize, cap: usize },
}

/// `binom(n, k)` by the multiplicative formula, cancelling common factors
/// before each multiplication.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..k {
        let mut a = BigUint::from(n - i);
        let mut b = BigUint::from(i + 1);
        let g = a.gcd(&den);
        a /= &g;
        den /= &g;
        let g = num.gcd(&b);
        num /= &g;
        b /= &g;
        num *= a;
        den *= b;
        let g = num.gcd(&den);
        num /= &g;
        den /= &g;
    }
    debug_assert!(den.is_one());
    num
}

fn check_order(r: usize) -> Result<(), CombinatoricsError> {
    if r < 1 {
        Err(CombinatoricsError::InvalidOrder(r))
    } else {
        Ok(())
    }
}

pub fn catalan(k: usize) -> BigUint {
    binomial(2 * k as u64, k as u64) / BigUint::from(k + 1)
}

/// `C⟨r⟩_k = r/(k+1)·binom((r+1)k, k)`.
pub fn gen_catalan(r: usize, k: usize) -> Result<BigUint, CombinatoricsError> {
    check_order(r)?;
    let b = binomial(((r + 1) * k) as u64, k as u64);
    Ok(b * BigUint::from(r) / BigUint::from(k + 1))
}

/// `m_k = binom((r+1)k, k)/(k+1)`, the k-th moment of the limit law.
pub fn limit_moment(r: usize, k: usize) -> Result<BigRational, CombinatoricsError> {
    check_order(r)?;
    let b = binomial(((r + 1) * k) as u64, k as u64);
    Ok(BigRational::new(BigInt::from(b), BigInt::from(k + 1)))
}

/// `FC_{r,k} = binom(rk + k, k)/(rk + 1)`.
pub fn fuss_catalan(r: usize, k: usize) -> Result<BigUint, CombinatoricsError> {
    check_order(r)?;
    let b = binomial(((r + 1) * k) as u64, k as u64);
    Ok(b / BigUint::from(r * k + 1))
}

/// `k^k / ((k+1)·k!)`, with `0^0 = 1`.
pub fn dh_moment(k: usize) -> BigRational {
    let num = num_traits::pow(BigInt::from(k), k);
    let mut den = BigInt::from(k + 1);
    for i in 2..=k {
        den *= BigInt::from(i);
    }
    BigRational::new(num, den)
}

/// `C⟨r⟩_k / r^{k+1}`, which tends to `dh_moment(k)` as `r → ∞`.
pub fn dh_scaled_gen_catalan(r: usize, k: usize) -> Result<BigRational, CombinatoricsError> {
    let c = gen_catalan(r, k)?;
    Ok(BigRational::new(
        BigInt::from(c),
        num_traits::pow(BigInt::from(r), k + 1),
    ))
}

/// Largest vertex count the tree enumerator accepts by default.
pub const DEFAULT_MAX_VERTICES: usize = 12;

/// A plane tree as a Dyck word: `true` steps down to a new child, `false`
/// returns to the parent. Vertices are numbered in preorder, root = 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PlaneTree {
    word: Vec<bool>,
}

impl PlaneTree {
    /// Validates a Dyck word.
    pub fn from_word(word: Vec<bool>) -> Option<Self> {
        let mut depth = 0i64;
        for &up in &word {
            depth += if up { 1 } else { -1 };
            if depth < 0 {
                return None;
            }
        }
        (depth == 0).then_some(Self { word })
    }

    pub fn word(&self) -> &[bool] {
        &self.word
    }

    pub fn vertices(&self) -> usize {
        self.word.len() / 2 + 1
    }

    /// Parent of each non-root vertex; `parents()[v - 1]` is the parent of `v`.
    pub fn parents(&self) -> Vec<usize> {
        let mut stack = vec![0usize];
        let mut next = 1;
        let mut parents = Vec::with_capacity(self.vertices() - 1);
        for &up in &self.word {
            if up {
                parents.push(*stack.last().expect("root stays on the stack"));
                stack.push(next);
                next += 1;
            } else {
                stack.pop();
            }
        }
        parents
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.parents()
            .into_iter()
            .enumerate()
            .map(|(i, p)| (p, i + 1))
            .collect()
    }

    /// Parenthesis rendering, e.g. `(()())`.
    pub fn to_parens(&self) -> String {
        self.word
            .iter()
            .map(|&u| if u { '(' } else { ')' })
            .collect()
    }
}

/// All plane trees on a fixed number of vertices, in lexicographic order of
/// their Dyck words with `(` before `)`.
#[derive(Debug, Clone)]
pub struct PlaneTrees {
    next: Option<Vec<bool>>,
}

impl Iterator for PlaneTrees {
    type Item = PlaneTree;

    fn next(&mut self) -> Option<PlaneTree> {
        let current = self.next.take()?;
        self.next = dyck_successor(&current);
        Some(PlaneTree { word: current })
    }
}

/// Next Dyck word in lexicographic order, if any.
fn dyck_successor(word: &[bool]) -> Option<Vec<bool>> {
    let len = word.len();
    let mut depth_before: Vec<i64> = Vec::with_capacity(len);
    let mut depth = 0;
    for &up in word {
        depth_before.push(depth);
        depth += if up { 1 } else { -1 };
    }
    // rightmost `(` that can become `)` and still be completed
    for i in (0..len).rev() {
        if !word[i] || depth_before[i] < 1 {
            continue;
        }
        let depth_after = depth_before[i] - 1;
        let rest = (len - i - 1) as i64;
        if depth_after > rest {
            continue;
        }
        let opens = ((rest - depth_after) / 2) as usize;
        let mut out = word[..i].to_vec();
        out.push(false);
        out.extend(std::iter::repeat(true).take(opens));
        out.extend(std::iter::repeat(false).take(len - out.len()));
        return Some(out);
    }
    None
}

/// Enumerates the plane trees on `n` vertices, refusing `n > cap`.
pub fn enumerate_plane_trees(n: usize, cap: usize) -> Result<PlaneTrees, CombinatoricsError> {
    if n == 0 {
        return Err(CombinatoricsError::NoVertices);
    }
    if n > cap {
        return Err(CombinatoricsError::ResourceLimit { vertices: n, cap });
    }
    let m = n - 1;
    let mut first = vec![true; m];
    first.extend(std::iter::repeat(false).take(m));
    Ok(PlaneTrees { next: Some(first) })
}

/// A plane tree with a vertex colouring.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RPlaneTree {
    pub tree: PlaneTree,
    /// Colour of each vertex in preorder, each in `1..=r`.
    pub colours: Vec<usize>,
}

impl RPlaneTree {
    /// Whether the colouring satisfies the edge condition for order `r`.
    pub fn is_valid(&self, r: usize) -> bool {
        self.colours.len() == self.tree.vertices()
            && self.colours.iter().all(|&c| (1..=r).contains(&c))
            && self
                .tree
                .edges()
                .iter()
                .all(|&(u, v)| self.colours[u] + self.colours[v] <= r + 1)
    }
}

/// Counts admissible colourings of one tree by depth-first search in
/// preorder. Every vertex after the root has its parent already coloured,
/// so the feasible colours are `1..=r+1-c(parent)`.
fn count_colourings(parents: &[usize], r: usize) -> u64 {
    fn go(v: usize, colours: &mut [usize], parents: &[usize], r: usize) -> u64 {
        if v == colours.len() {
            return 1;
        }
        let limit = if v == 0 {
            r
        } else {
            r + 1 - colours[parents[v - 1]]
        };
        let mut total = 0;
        for c in 1..=limit {
            colours[v] = c;
            total += go(v + 1, colours, parents, r);
        }
        total
    }
    let mut colours = vec![0; parents.len() + 1];
    go(0, &mut colours, parents, r)
}

/// Number of r-plane trees on `n` vertices, by exhaustive enumeration.
pub fn count_r_plane_trees(r: usize, n: usize, cap: usize) -> Result<BigUint, CombinatoricsError> {
    check_order(r)?;
    let mut total = BigUint::zero();
    for tree in enumerate_plane_trees(n, cap)? {
        total += count_colourings(&tree.parents(), r);
    }
    Ok(total)
}

/// Every r-plane tree on `n` vertices.
pub fn enumerate_r_plane_trees(
    r: usize,
    n: usize,
    cap: usize,
) -> Result<Vec<RPlaneTree>, CombinatoricsError> {
    check_order(r)?;
    let mut out = Vec::new();
    for tree in enumerate_plane_trees(n, cap)? {
        let parents = tree.parents();
        let mut colours = vec![1usize; n];
        loop {
            let ok = parents
                .iter()
                .enumerate()
                .all(|(i, &p)| colours[p] + colours[i + 1] <= r + 1);
            if ok {
                out.push(RPlaneTree {
                    tree: tree.clone(),
                    colours: colours.clone(),
                });
            }
            // odometer over 1..=r
            let mut i = 0;
            while i < n && colours[i] == r {
                colours[i] = 1;
                i += 1;
            }
            if i == n {
                break;
            }
            colours[i] += 1;
        }
    }
    Ok(out)
}
