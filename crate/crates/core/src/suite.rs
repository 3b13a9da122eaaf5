//! Randomized inequality suite.
//!
//! Runs nested subdivisions on seeded random algorithms and records, for
//! every inequality of the lower-bound argument, how many instances were
//! evaluated, how many failed, and the smallest slack `bound − value`.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::adversary::{derive_params, subdivide, AdversaryParams, Interval, SubdivideRecord};
use crate::algorithms::{lifted_binary_search, random_algorithm};
use crate::error::Result;
use crate::state::{random_unit_state, BasisLayout, StateVector};
use crate::verifier::{bv_gap, hybrid_profile, HybridReport};
use crate::{Complex64, IDENTITY_TOL, NORM_TOL};

pub const SUM_CONTRACTION: &str = "sum_contraction";
pub const SUBINTERVAL_MIN: &str = "subinterval_min";
pub const SUBINTERVAL_SUM: &str = "subinterval_sum";
pub const PREFIX_DIVERGENCE: &str = "prefix_divergence";
pub const PROJECTED_DIVERGENCE: &str = "projected_divergence";
pub const TAIL_SUM: &str = "tail_sum";
pub const PYTHAGOREAN: &str = "pythagorean";
pub const PER_STEP_PERTURBATION: &str = "per_step_perturbation";
pub const TRIANGLE: &str = "triangle";
pub const VARIATIONAL_GAP: &str = "variational_gap";
pub const GEOMETRIC_TAIL: &str = "geometric_tail";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteConfig {
    pub n: usize,
    pub t: usize,
    pub q: f64,
    pub u: u32,
    pub algorithms: usize,
    pub queries: usize,
    pub workspace_bits: u32,
    /// Nesting levels per descent; `None` descends until blocks have length 1.
    pub depth: Option<u32>,
    pub seed: u64,
    pub bv_pairs: usize,
    pub bv_n: usize,
    pub bv_constant: f64,
    /// Size for the exhaustive adjacent-pair check of lifted binary search; 0 skips it.
    pub lifted_n: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            n: 512,
            t: 8,
            q: 18.3,
            u: 4,
            algorithms: 20,
            queries: 4,
            workspace_bits: 1,
            depth: None,
            seed: 1,
            bv_pairs: 1000,
            bv_n: 16,
            bv_constant: 4.0,
            lifted_n: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckStats {
    pub evaluated: usize,
    pub violations: usize,
    /// Smallest `bound − value` seen; `+inf` when nothing was evaluated.
    pub worst_slack: f64,
}

impl Default for CheckStats {
    fn default() -> Self {
        Self {
            evaluated: 0,
            violations: 0,
            worst_slack: f64::INFINITY,
        }
    }
}

impl CheckStats {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Named counters; each check is `value <= bound + tol`.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CheckLedger {
    checks: BTreeMap<String, CheckStats>,
}

impl CheckLedger {
    pub fn record(&mut self, name: &str, value: f64, bound: f64, tol: f64) -> bool {
        let ok = value <= bound + tol;
        let stats = self.checks.entry(name.to_owned()).or_default();
        stats.evaluated += 1;
        if !ok {
            stats.violations += 1;
        }
        stats.worst_slack = stats.worst_slack.min(bound - value);
        ok
    }

    /// Strict `value < bound`.
    pub fn record_strict(&mut self, name: &str, value: f64, bound: f64) -> bool {
        let ok = value < bound;
        let stats = self.checks.entry(name.to_owned()).or_default();
        stats.evaluated += 1;
        if !ok {
            stats.violations += 1;
        }
        stats.worst_slack = stats.worst_slack.min(bound - value);
        ok
    }

    pub fn get(&self, name: &str) -> Option<&CheckStats> {
        self.checks.get(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &CheckStats)> {
        self.checks.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn total_violations(&self) -> usize {
        self.checks.values().map(|c| c.violations).sum()
    }

    /// Every per-record bound: contraction of S, the subinterval minimum and
    /// sum, prefix divergence, the reordered tail sum and the Pythagorean split.
    pub fn check_record(&mut self, record: &SubdivideRecord, params: &AdversaryParams) {
        let sqrt_t = (params.t() as f64).sqrt();
        let s_before = record.sum_before;
        self.record(
            SUM_CONTRACTION,
            record.sum_after,
            params.q_prime() * s_before,
            NORM_TOL,
        );
        self.record(
            SUBINTERVAL_MIN,
            record.min_sum(),
            s_before / sqrt_t,
            NORM_TOL,
        );
        let sum: f64 = record.subinterval_sums.iter().sum();
        self.record(SUBINTERVAL_SUM, sum, sqrt_t * s_before, NORM_TOL);
        for row in &record.divergence {
            self.record(PREFIX_DIVERGENCE, row.state_distance, row.bound, NORM_TOL);
            self.record(
                PROJECTED_DIVERGENCE,
                row.projected_distance,
                row.bound,
                NORM_TOL,
            );
        }

        // Σ_i q^{s−i} Σ_{j<i} ‖ψ_j‖ <= S/(q − 1).
        let q = params.q();
        let s = record.s;
        let mut prefix = 0.0;
        let mut reordered = 0.0;
        for (k, norm) in record.psi_total.iter().enumerate() {
            reordered += q.powi((s - (k + 1)) as i32) * prefix;
            prefix += norm;
        }
        self.record(TAIL_SUM, reordered, s_before / (q - 1.0), NORM_TOL);

        for (row, total) in record.psi_norms.iter().zip(&record.psi_total) {
            let squares: f64 = row.iter().map(|x| x * x).sum();
            self.record(
                PYTHAGOREAN,
                (squares - total * total).abs(),
                0.0,
                IDENTITY_TOL,
            );
        }
    }

    pub fn check_hybrid(&mut self, report: &HybridReport) {
        for (d, psi) in report.per_step_distance.iter().zip(&report.per_step_psi) {
            self.record(PER_STEP_PERTURBATION, *d, 2.0 * psi, NORM_TOL);
        }
        self.record(
            TRIANGLE,
            report.total_distance,
            report.triangle_sum,
            NORM_TOL,
        );
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub config: SuiteConfig,
    pub params: AdversaryParams,
    pub subdivides: usize,
    pub hybrid_pairs: usize,
    pub bv_samples: usize,
    /// Largest observed `variational / l2`.
    pub bv_max_ratio: f64,
    /// Samples whose ratio exceeded 2 (monitored, not asserted).
    pub bv_above_two: usize,
    pub checks: CheckLedger,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.total_violations() == 0
    }
}

/// Geometric tails `Σ_{i=1}^{N} q^{−i} < 1/(q − 1)`, for every `N` whose
/// remaining gap is well above rounding.
pub fn check_geometric_tails(ledger: &mut CheckLedger, qs: &[f64]) {
    for &q in qs {
        let bound = 1.0 / (q - 1.0);
        let n_max = ((10.0 / q.log10()).floor() as usize).clamp(1, 60);
        let mut sum = 0.0;
        for i in 1..=n_max {
            sum += q.powi(-(i as i32));
            ledger.record_strict(GEOMETRIC_TAIL, sum, bound);
        }
    }
}

/// Samples unit pairs at size `n` and checks `variational <= constant · l2`.
/// Half the pairs are independent; the rest are small perturbations.
/// Returns `(samples, max ratio, count above 2)`.
pub fn sample_bv(
    ledger: &mut CheckLedger,
    n: usize,
    pairs: usize,
    constant: f64,
    seed: u64,
) -> Result<(usize, f64, usize)> {
    let layout = BasisLayout::new(n, 0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_ratio: f64 = 0.0;
    let mut above_two = 0;
    for idx in 0..pairs {
        let psi = random_unit_state(layout, &mut rng);
        let phi = if idx % 2 == 0 {
            random_unit_state(layout, &mut rng)
        } else {
            let eps = 10f64.powf(rng.random_range(-3.0..0.0));
            let noise = random_unit_state(layout, &mut rng);
            let mixed: Vec<Complex64> = psi
                .amplitudes()
                .iter()
                .zip(noise.amplitudes())
                .map(|(a, b)| a + b * eps)
                .collect();
            let norm = mixed.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            StateVector::from_amplitudes(layout, mixed.into_iter().map(|a| a / norm).collect())?
        };
        let gap = bv_gap(&psi, &phi)?;
        ledger.record(
            VARIATIONAL_GAP,
            gap.variational,
            constant * gap.l2,
            NORM_TOL,
        );
        if let Some(ratio) = gap.ratio() {
            max_ratio = max_ratio.max(ratio);
            if ratio > 2.0 {
                above_two += 1;
            }
        }
    }
    Ok((pairs, max_ratio, above_two))
}

/// Nested subdivisions at a fixed step `s`, from `[1, n]` down to `depth`
/// levels (or blocks of length 1).
pub fn descend(
    alg: &crate::query::QueryAlgorithm,
    params: &AdversaryParams,
    s: usize,
    depth: Option<u32>,
) -> Result<Vec<SubdivideRecord>> {
    let mut interval = Interval::root(alg.layout().n());
    let mut records = Vec::new();
    while interval.m() >= params.t() && depth.is_none_or(|d| records.len() < d as usize) {
        let record = subdivide(alg, interval, s, params)?;
        interval = record.child;
        records.push(record);
    }
    Ok(records)
}

pub fn run_suite(config: &SuiteConfig) -> Result<SuiteReport> {
    let params = derive_params(config.q, config.t, config.u)?;
    let mut checks = CheckLedger::default();
    let mut subdivides = 0;
    let mut hybrid_pairs = 0;

    for a in 0..config.algorithms {
        let seed = config.seed.wrapping_mul(1_000_003).wrapping_add(a as u64);
        let alg = random_algorithm(config.n, config.queries, config.workspace_bits, seed)?;
        for s in 1..=config.queries.max(1) {
            let records = descend(&alg, &params, s, config.depth)?;
            for record in &records {
                checks.check_record(record, &params);
            }
            subdivides += records.len();
            if let Some(last) = records.last() {
                let hybrid = hybrid_profile(&alg, last.child, alg.queries(), params.q())?;
                checks.check_hybrid(&hybrid);
                hybrid_pairs += 1;
            }
        }
    }

    if config.lifted_n >= 2 {
        let alg = lifted_binary_search(config.lifted_n)?;
        for k in 1..=config.lifted_n {
            let interval = Interval::new(config.lifted_n, k, 1)?;
            let hybrid = hybrid_profile(&alg, interval, alg.queries(), params.q())?;
            checks.check_hybrid(&hybrid);
            hybrid_pairs += 1;
        }
    }

    check_geometric_tails(&mut checks, &[1.5, 2.0, 3.0, config.q, 100.0]);
    let (bv_samples, bv_max_ratio, bv_above_two) = sample_bv(
        &mut checks,
        config.bv_n,
        config.bv_pairs,
        config.bv_constant,
        config.seed ^ 0x5eed_b0b0,
    )?;

    Ok(SuiteReport {
        config: config.clone(),
        params,
        subdivides,
        hybrid_pairs,
        bv_samples,
        bv_max_ratio,
        bv_above_two,
        checks,
    })
}
