//! Families of node bipartitions that alternate along every short id sequence.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{input, invariant, Result};

/// Largest `N^k` verified by full enumeration.
pub const EXHAUSTIVE_LIMIT: f64 = 1e7;
/// Random sequences tested when enumeration is too large.
pub const SPOT_CHECKS: usize = 100_000;
/// Fresh samples tried before giving up.
const MAX_RESAMPLES: u32 = 64;

/// Functions `f_1..f_T` from ids `1..=N` to bits such that every sequence of
/// `k` distinct ids `x_1..x_k` has some `f_i` with `f_i(x_j) = j mod 2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartitionFamily {
    n: usize,
    k: usize,
    /// `functions[i][id - 1]`.
    functions: Vec<Vec<bool>>,
    exhaustive: bool,
}

impl BipartitionFamily {
    /// Wraps explicit functions; each must have one bit per id.
    pub fn from_functions(n: usize, k: usize, functions: Vec<Vec<bool>>) -> Result<Self> {
        check_params(n, k)?;
        if functions.iter().any(|f| f.len() != n) {
            return input(format!("every function needs {n} bits"));
        }
        Ok(BipartitionFamily { n, k, functions, exhaustive: false })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    /// Whether construction verified every sequence rather than a sample.
    pub fn exhaustive(&self) -> bool {
        self.exhaustive
    }

    /// `f_i(id)` for `i` in `0..T` and `id` in `1..=N`.
    pub fn bit(&self, i: usize, id: usize) -> bool {
        self.functions[i][id - 1]
    }

    pub fn function(&self, i: usize) -> &[bool] {
        &self.functions[i]
    }

    /// A sequence of distinct ids with no alternating function, if any.
    /// Enumerates all sequences.
    pub fn find_counterexample(&self) -> Option<Vec<usize>> {
        let words = self.functions.len().div_ceil(64).max(1);
        let masks = self.masks(words);
        let mut full = vec![0u64; words];
        for i in 0..self.functions.len() {
            full[i / 64] |= 1 << (i % 64);
        }
        let mut prefix = Vec::with_capacity(self.k);
        let mut used = vec![false; self.n];
        self.search(&masks, &full, &mut prefix, &mut used)
    }

    /// Per id, bitsets of functions mapping it to 1 and to 0.
    fn masks(&self, words: usize) -> Vec<[Vec<u64>; 2]> {
        (0..self.n)
            .map(|x| {
                let mut ones = vec![0u64; words];
                let mut zeros = vec![0u64; words];
                for (i, f) in self.functions.iter().enumerate() {
                    let target = if f[x] { &mut ones } else { &mut zeros };
                    target[i / 64] |= 1 << (i % 64);
                }
                [zeros, ones]
            })
            .collect()
    }

    fn search(
        &self,
        masks: &[[Vec<u64>; 2]],
        alive: &[u64],
        prefix: &mut Vec<usize>,
        used: &mut [bool],
    ) -> Option<Vec<usize>> {
        if alive.iter().all(|&w| w == 0) {
            // Any completion of this prefix is a counterexample.
            let mut seq: Vec<usize> = prefix.iter().map(|&x| x + 1).collect();
            seq.extend((0..self.n).filter(|&x| !used[x]).take(self.k - prefix.len()).map(|x| x + 1));
            return Some(seq);
        }
        if prefix.len() == self.k {
            return None;
        }
        let want = (prefix.len() + 1) % 2;
        for x in 0..self.n {
            if used[x] {
                continue;
            }
            let next: Vec<u64> = alive.iter().zip(&masks[x][want]).map(|(a, b)| a & b).collect();
            used[x] = true;
            prefix.push(x);
            let found = self.search(masks, &next, prefix, used);
            prefix.pop();
            used[x] = false;
            if found.is_some() {
                return found;
            }
        }
        None
    }

    /// Whether some function alternates along `seq` (ids in `1..=N`).
    pub fn covers(&self, seq: &[usize]) -> bool {
        self.functions
            .iter()
            .any(|f| seq.iter().enumerate().all(|(j, &x)| f[x - 1] == ((j + 1) % 2 == 1)))
    }
}

fn check_params(n: usize, k: usize) -> Result<()> {
    if k < 1 || k > n {
        return input(format!("need 1 ≤ k ≤ N, got k = {k}, N = {n}"));
    }
    Ok(())
}

/// Number of random functions sampled: `⌈k·2^k·ln N⌉ + 1`.
pub fn family_size(n: usize, k: usize) -> usize {
    let t = (k as f64) * 2f64.powi(k as i32) * (n as f64).ln();
    t.max(0.0).ceil() as usize + 1
}

/// Samples [`family_size`] uniform functions and verifies the property,
/// exhaustively when `N^k ≤ 10^7` and on [`SPOT_CHECKS`] random sequences
/// otherwise, resampling on failure. For `k = 1` the constant-1 function is
/// returned.
pub fn build_bipartition_family(n: usize, k: usize, seed: u64) -> Result<BipartitionFamily> {
    check_params(n, k)?;
    if k == 1 {
        return Ok(BipartitionFamily { n, k, functions: vec![vec![true; n]], exhaustive: true });
    }
    let t = family_size(n, k);
    let exhaustive = (n as f64).powi(k as i32) <= EXHAUSTIVE_LIMIT;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_RESAMPLES {
        let functions: Vec<Vec<bool>> = (0..t).map(|_| (0..n).map(|_| rng.random()).collect()).collect();
        let mut family = BipartitionFamily { n, k, functions, exhaustive };
        let ok = if exhaustive {
            family.find_counterexample().is_none()
        } else {
            (0..SPOT_CHECKS).all(|_| {
                let seq = rand::seq::index::sample(&mut rng, n, k).into_iter().map(|x| x + 1).collect::<Vec<_>>();
                family.covers(&seq)
            })
        };
        if ok {
            family.exhaustive = exhaustive;
            return Ok(family);
        }
    }
    invariant(format!("no valid family for N = {n}, k = {k} after {MAX_RESAMPLES} samples"))
}
