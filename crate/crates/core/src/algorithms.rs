//! Reference query algorithms.
//!
//! Binary search is lifted to the query model as a sequence of basis
//! permutations. Before query `j` the index register holds the classical
//! probe and the workspace holds the answers to queries `1..j`; after the
//! oracle, `U_j` moves the answer bit `b` into workspace bit `j - 1` and
//! swaps the old probe for the next one. Every `U_j` is an exact bijection on
//! basis states.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::query::{
    BasisPermutation, Identity, QueryAlgorithm, RotationProduct, Transform, TwoLevelRotation,
};
use crate::state::BasisLayout;

/// Largest dimension for which random algorithms are generated.
pub const RANDOM_DIMENSION_LIMIT: usize = 1 << 14;

/// i-field of the probe made by query `round` (1-based), given the answers
/// to the earlier queries in the low bits of `z`.
fn probe_field(levels: u32, round: u32, z: usize) -> usize {
    lower_bound(levels, round - 1, z) + (1usize << (levels - round)) - 1
}

/// Smallest candidate for `k` after `rounds` answers. Answer 0 to the probe
/// of round `j` means `k >= probe`, i.e. bit `levels - j` of `k` is set.
fn lower_bound(levels: u32, rounds: u32, z: usize) -> usize {
    (1..=rounds)
        .filter(|&j| (z >> (j - 1)) & 1 == 0)
        .map(|j| 1usize << (levels - j))
        .sum()
}

/// Binary search over `[0, n - 1]` stopped after `rounds` queries; the
/// output is the lower end of the remaining candidate range.
fn binary_search(n: usize, rounds: u32, name: String) -> Result<QueryAlgorithm> {
    let layout = BasisLayout::new(n, rounds)?;
    let levels = layout.index_bits();
    let w = layout.workspace_bits();
    let zmask = layout.workspace_len() - 1;

    let step = move |round_done: Option<u32>, next: Option<u32>| {
        move |x: usize| {
            let mut z = x & zmask;
            let mut b = (x >> w) & 1;
            let mut field = x >> (w + 1);
            if let Some(j) = round_done {
                let zbit = (z >> (j - 1)) & 1;
                z = (z & !(1 << (j - 1))) | (b << (j - 1));
                b = zbit;
                field ^= probe_field(levels, j, z);
            }
            field ^= match next {
                Some(j) => probe_field(levels, j, z),
                None => lower_bound(levels, rounds, z),
            };
            (field << (w + 1)) | (b << w) | z
        }
    };

    let mut unitaries: Vec<Arc<dyn Transform>> = Vec::with_capacity(rounds as usize + 1);
    for j in 0..=rounds {
        let done = (j > 0).then_some(j);
        let next = (j < rounds).then_some(j + 1);
        unitaries.push(Arc::new(BasisPermutation::new(
            format!("U_{j}"),
            step(done, next),
        )));
    }
    QueryAlgorithm::new(name, layout, unitaries)
}

/// Classical binary search as a query algorithm with `log2 n` queries and
/// `log2 n` workspace bits. Outputs `k` with certainty on every input.
pub fn lifted_binary_search(n: usize) -> Result<QueryAlgorithm> {
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    binary_search(n, n.trailing_zeros(), "lifted-bs".into())
}

/// The first `rounds` queries of [`lifted_binary_search`], `rounds < log2 n`.
pub fn truncated_binary_search(n: usize, rounds: u32) -> Result<QueryAlgorithm> {
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    let levels = n.trailing_zeros();
    if rounds >= levels {
        return Err(Error::AlgorithmSpec(format!(
            "truncated binary search needs fewer than {levels} rounds, got {rounds}"
        )));
    }
    binary_search(n, rounds, format!("truncated-bs:{rounds}"))
}

/// No queries; `U_0` is the identity.
pub fn zero_query(n: usize) -> Result<QueryAlgorithm> {
    let layout = BasisLayout::new(n, 0)?;
    QueryAlgorithm::new("zero-query", layout, vec![Arc::new(Identity)])
}

/// `queries + 1` unitaries, each a product of `d` random two-level rotations
/// drawn from a ChaCha8 stream seeded with `seed`.
pub fn random_algorithm(
    n: usize,
    queries: usize,
    workspace_bits: u32,
    seed: u64,
) -> Result<QueryAlgorithm> {
    let layout = BasisLayout::new(n, workspace_bits)?;
    let d = layout.dimension();
    if d > RANDOM_DIMENSION_LIMIT {
        return Err(Error::TooLarge {
            what: "random algorithm",
            dimension: d,
            limit: RANDOM_DIMENSION_LIMIT,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let unitaries: Vec<Arc<dyn Transform>> = (0..=queries)
        .map(|_| Arc::new(random_rotations(d, &mut rng)) as Arc<dyn Transform>)
        .collect();
    QueryAlgorithm::new(
        format!("random:T={queries},w={workspace_bits},seed={seed}"),
        layout,
        unitaries,
    )
}

fn random_rotations<R: Rng>(d: usize, rng: &mut R) -> RotationProduct {
    use std::f64::consts::{FRAC_PI_2, TAU};
    let rotations = (0..d)
        .map(|_| {
            let a = rng.random_range(0..d);
            let mut b = rng.random_range(0..d - 1);
            if b >= a {
                b += 1;
            }
            let theta = rng.random_range(0.0..FRAC_PI_2);
            let alpha = Complex64::from_polar(theta.cos(), rng.random_range(0.0..TAU));
            let beta = Complex64::from_polar(theta.sin(), rng.random_range(0.0..TAU));
            TwoLevelRotation { a, b, alpha, beta }
        })
        .collect();
    RotationProduct::new(rotations)
}

/// Algorithm selector used on the command line:
/// `lifted-bs`, `truncated-bs:2`, `zero-query`, `random:T=4,w=3,seed=17`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlgorithmSpec {
    LiftedBs,
    TruncatedBs {
        rounds: u32,
    },
    ZeroQuery,
    Random {
        queries: usize,
        workspace_bits: u32,
        seed: Option<u64>,
    },
}

impl AlgorithmSpec {
    /// Builds the algorithm for `n` elements. `default_seed` fills in a
    /// missing `seed=` for random algorithms.
    pub fn build(&self, n: usize, default_seed: u64) -> Result<QueryAlgorithm> {
        match *self {
            AlgorithmSpec::LiftedBs => lifted_binary_search(n),
            AlgorithmSpec::TruncatedBs { rounds } => truncated_binary_search(n, rounds),
            AlgorithmSpec::ZeroQuery => zero_query(n),
            AlgorithmSpec::Random {
                queries,
                workspace_bits,
                seed,
            } => random_algorithm(n, queries, workspace_bits, seed.unwrap_or(default_seed)),
        }
    }
}

impl FromStr for AlgorithmSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: &str| Error::AlgorithmSpec(format!("{s:?}: {msg}"));
        let (kind, params) = match s.split_once(':') {
            Some((k, p)) => (k.trim(), Some(p.trim())),
            None => (s.trim(), None),
        };
        match (kind, params) {
            ("lifted-bs", None) => Ok(AlgorithmSpec::LiftedBs),
            ("zero-query", None) => Ok(AlgorithmSpec::ZeroQuery),
            ("truncated-bs", Some(p)) => p
                .parse()
                .map(|rounds| AlgorithmSpec::TruncatedBs { rounds })
                .map_err(|_| bad("expected truncated-bs:<rounds>")),
            ("random", Some(p)) => {
                let (mut queries, mut workspace_bits, mut seed) = (None, 0, None);
                for kv in p.split(',').filter(|kv| !kv.trim().is_empty()) {
                    let (key, value) = kv
                        .split_once('=')
                        .ok_or_else(|| bad("expected key=value"))?;
                    let value = value.trim();
                    match key.trim() {
                        "T" => {
                            queries = Some(value.parse().map_err(|_| bad("T must be an integer"))?)
                        }
                        "w" => {
                            workspace_bits =
                                value.parse().map_err(|_| bad("w must be an integer"))?
                        }
                        "seed" => {
                            seed = Some(value.parse().map_err(|_| bad("seed must be an integer"))?)
                        }
                        other => return Err(bad(&format!("unknown key {other}"))),
                    }
                }
                Ok(AlgorithmSpec::Random {
                    queries: queries.ok_or_else(|| bad("random needs T="))?,
                    workspace_bits,
                    seed,
                })
            }
            _ => Err(bad("unknown algorithm")),
        }
    }
}

impl fmt::Display for AlgorithmSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgorithmSpec::LiftedBs => write!(f, "lifted-bs"),
            AlgorithmSpec::TruncatedBs { rounds } => write!(f, "truncated-bs:{rounds}"),
            AlgorithmSpec::ZeroQuery => write!(f, "zero-query"),
            AlgorithmSpec::Random {
                queries,
                workspace_bits,
                seed,
            } => {
                write!(f, "random:T={queries},w={workspace_bits}")?;
                if let Some(seed) = seed {
                    write!(f, ",seed={seed}")?;
                }
                Ok(())
            }
        }
    }
}
