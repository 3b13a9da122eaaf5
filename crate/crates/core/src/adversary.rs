//! The weighted interval-subdivision adversary.
//!
//! Starting from `[1, n]`, the adversary repeatedly splits its interval into
//! `t` equal blocks and descends into the block whose geometrically weighted
//! query mass `S_r = Σ_i q^{s-i} ‖ψ_{i,r}‖` is smallest. Oracles are always
//! the threshold at the right end of the current interval. The weighted mass
//! of the current interval shrinks by at least `q' = 1/√t + 2/(q-1)` per
//! subdivision and grows by at most `x -> 1 + q·x` when the weighting moves
//! to the next query step.
//!
//! Query steps past the algorithm's last query carry no amplitude: `ψ_i = 0`
//! for `i > T`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::query::{prefix_states, QueryAlgorithm, ThresholdInput};
use crate::NORM_TOL;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdversaryParams {
    q: f64,
    t: usize,
    u: u32,
    q_prime: f64,
    v: u32,
}

fn check_raw(q: f64, t: usize, u: u32) -> Result<()> {
    if !(q.is_finite() && q > 1.0) {
        return Err(Error::InvalidParams(format!(
            "q must be a finite real > 1, got {q}"
        )));
    }
    if t < 2 || !t.is_power_of_two() {
        return Err(Error::InvalidParams(format!(
            "t must be a power of two >= 2, got {t}"
        )));
    }
    if u == 0 {
        return Err(Error::InvalidParams("u must be positive".into()));
    }
    Ok(())
}

/// `1/√t + 2/(q-1)`.
pub fn q_prime(q: f64, t: usize) -> f64 {
    1.0 / (t as f64).sqrt() + 2.0 / (q - 1.0)
}

/// `(1/10)(1 - q q'^u)(1 - 1/q)`, the level `q'^v` must reach.
pub fn v_threshold(q: f64, t: usize, u: u32) -> f64 {
    0.1 * (1.0 - q * q_prime(q, t).powi(u as i32)) * (1.0 - 1.0 / q)
}

/// Smallest `v` with `q'^v <= (1/10)(1 - q q'^u)(1 - 1/q)`.
pub fn compute_v(q: f64, t: usize, u: u32) -> Result<u32> {
    check_raw(q, t, u)?;
    let qp = q_prime(q, t);
    let contraction = q * qp.powi(u as i32);
    if contraction >= 1.0 {
        return Err(Error::ParamsRejected {
            inequality: "q * q'^u < 1",
            detail: format!("q * q'^u = {contraction}"),
        });
    }
    let threshold = v_threshold(q, t, u);
    // Start from the closed form, then settle on the exact smallest power.
    let mut v = (threshold.ln() / qp.ln()).ceil().max(1.0) as i32;
    while qp.powi(v) > threshold {
        v += 1;
    }
    while v > 1 && qp.powi(v - 1) <= threshold {
        v -= 1;
    }
    Ok(v as u32)
}

/// Validates `(q, t, u)` and derives `q'` and `v`.
pub fn derive_params(q: f64, t: usize, u: u32) -> Result<AdversaryParams> {
    let v = compute_v(q, t, u)?;
    if v < u {
        return Err(Error::ParamsRejected {
            inequality: "v >= u",
            detail: format!("v = {v}, u = {u}"),
        });
    }
    Ok(AdversaryParams {
        q,
        t,
        u,
        q_prime: q_prime(q, t),
        v,
    })
}

impl AdversaryParams {
    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn u(&self) -> u32 {
        self.u
    }

    pub fn q_prime(&self) -> f64 {
        self.q_prime
    }

    pub fn v(&self) -> u32 {
        self.v
    }

    /// `q · q'^u`.
    pub fn contraction(&self) -> f64 {
        self.q * self.q_prime.powi(self.u as i32)
    }

    pub fn v_threshold(&self) -> f64 {
        v_threshold(self.q, self.t, self.u)
    }

    /// `log2 t`.
    pub fn log2_t(&self) -> u32 {
        self.t.trailing_zeros()
    }

    /// Coefficient of `log2 n` in the query lower bound, `1/(u log2 t)`.
    pub fn coefficient(&self) -> f64 {
        1.0 / f64::from(self.u * self.log2_t())
    }

    /// Bound on `S` at the start of each outer iteration, `1/(1 - q q'^u)`.
    pub fn start_bound(&self) -> f64 {
        1.0 / (1.0 - self.contraction())
    }

    /// Bound on `S` after the `u` subdivisions of an iteration.
    pub fn end_bound(&self) -> f64 {
        self.q_prime.powi(self.u as i32) * self.start_bound()
    }
}

/// The block `[(l-1)m + 1, lm]` of `[1, n]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Interval {
    n: usize,
    l: usize,
    m: usize,
}

impl Interval {
    pub fn new(n: usize, l: usize, m: usize) -> Result<Self> {
        if m == 0 || !n.is_multiple_of(m) {
            return Err(Error::InvalidInterval(format!(
                "block length {m} does not divide {n}"
            )));
        }
        if l == 0 || l > n / m {
            return Err(Error::InvalidInterval(format!(
                "block index {l} outside [1, {}]",
                n / m
            )));
        }
        Ok(Self { n, l, m })
    }

    pub fn root(n: usize) -> Self {
        Self { n, l: 1, m: n }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn lo(&self) -> usize {
        (self.l - 1) * self.m + 1
    }

    /// `lm`, the right end; also the threshold of the interval's oracle.
    pub fn hi(&self) -> usize {
        self.l * self.m
    }

    /// The `r`-th of `t` equal blocks (1-based), with index `(l-1)t + r`.
    pub fn child(&self, r: usize, t: usize) -> Result<Interval> {
        if t == 0 || !self.m.is_multiple_of(t) {
            return Err(Error::NotDivisible { m: self.m, t });
        }
        if r == 0 || r > t {
            return Err(Error::InvalidInterval(format!(
                "sub-block {r} outside [1, {t}]"
            )));
        }
        Ok(Interval {
            n: self.n,
            l: (self.l - 1) * t + r,
            m: self.m / t,
        })
    }

    pub fn contains(&self, other: &Interval) -> bool {
        self.n == other.n && self.lo() <= other.lo() && other.hi() <= self.hi()
    }

    fn oracle(&self) -> ThresholdInput {
        ThresholdInput::new(self.n, self.hi()).expect("hi <= n")
    }
}

/// `Σ_{i=1}^{s} q^{s-i} norms[i-1]`: the last entry has weight 1, the first `q^{s-1}`.
pub fn weighted_sum(norms: &[f64], q: f64) -> Result<f64> {
    if norms.is_empty() {
        return Err(Error::InvalidParams(
            "weighted sum over no query steps".into(),
        ));
    }
    Ok(norms.iter().fold(0.0, |acc, x| acc * q + x))
}

/// Where a subdivision sits in the adversary's schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Standalone,
    /// Inside outer iteration `n` (1-based).
    Loop(usize),
    /// After the loop, when the stopping depth exceeds `u`.
    Tail,
}

/// Per-step comparison of the prefix states under the parent's and child's oracles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DivergenceRow {
    pub i: usize,
    /// `‖φ_i − φ'_i‖`.
    pub state_distance: f64,
    /// `‖ψ_{i,r} − ψ'_i‖`.
    pub projected_distance: f64,
    /// `2(‖ψ_1‖ + ... + ‖ψ_{i-1}‖)`.
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubdivideRecord {
    pub parent: Interval,
    pub child: Interval,
    pub s: usize,
    pub stage: Stage,
    /// `S_1 ..= S_t`.
    pub subinterval_sums: Vec<f64>,
    /// 1-based.
    pub chosen_r: usize,
    /// `S` of the parent under the parent's oracle.
    pub sum_before: f64,
    /// `S'` of the child under the child's oracle.
    pub sum_after: f64,
    /// `psi_norms[i-1][r-1] = ‖ψ_{i,r}‖`.
    pub psi_norms: Vec<Vec<f64>>,
    /// `‖ψ_i‖` for the parent interval.
    pub psi_total: Vec<f64>,
    /// `‖ψ'_i‖` for the child interval under the child's oracle.
    pub child_psi: Vec<f64>,
    /// One row per query step `i <= min(s, T)`.
    pub divergence: Vec<DivergenceRow>,
}

impl SubdivideRecord {
    pub fn min_sum(&self) -> f64 {
        self.subinterval_sums[self.chosen_r - 1]
    }
}

fn padded(mut norms: Vec<f64>, s: usize) -> Vec<f64> {
    norms.resize(s, 0.0);
    norms
}

/// One subdivision of `interval` using the first `s` query steps.
pub fn subdivide(
    alg: &QueryAlgorithm,
    interval: Interval,
    s: usize,
    params: &AdversaryParams,
) -> Result<SubdivideRecord> {
    let t = params.t();
    if interval.n() != alg.layout().n() {
        return Err(Error::LayoutMismatch(format!(
            "interval over [1, {}] but algorithm has n = {}",
            interval.n(),
            alg.layout().n()
        )));
    }
    if s == 0 {
        return Err(Error::StepOutOfRange {
            step: 0,
            min: 1,
            max: usize::MAX,
        });
    }
    if !interval.m().is_multiple_of(t) {
        return Err(Error::NotDivisible { m: interval.m(), t });
    }
    let q = params.q();
    let sub_len = interval.m() / t;

    let parent_states = prefix_states(alg, &interval.oracle(), s)?;
    let mut psi_norms = Vec::with_capacity(s);
    let mut psi_total = Vec::with_capacity(s);
    for state in &parent_states {
        let row = (0..t)
            .map(|r| {
                let lo = interval.lo() + r * sub_len;
                state.range_norm(lo, lo + sub_len - 1)
            })
            .collect::<Result<Vec<f64>>>()?;
        psi_norms.push(row);
        psi_total.push(state.range_norm(interval.lo(), interval.hi())?);
    }
    psi_norms.resize(s, vec![0.0; t]);
    let psi_total = padded(psi_total, s);

    let subinterval_sums = (0..t)
        .map(|r| {
            let column: Vec<f64> = psi_norms.iter().map(|row| row[r]).collect();
            weighted_sum(&column, q)
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut best = 0;
    for (r, value) in subinterval_sums.iter().enumerate() {
        if *value < subinterval_sums[best] {
            best = r;
        }
    }
    let chosen_r = best + 1;
    let child = interval.child(chosen_r, t)?;

    let child_states = prefix_states(alg, &child.oracle(), s)?;
    let child_psi = child_states
        .iter()
        .map(|st| st.range_norm(child.lo(), child.hi()))
        .collect::<Result<Vec<f64>>>()?;
    let child_psi = padded(child_psi, s);

    let mut divergence = Vec::with_capacity(parent_states.len());
    let mut cumulative = 0.0;
    for (idx, (phi, phi_child)) in parent_states.iter().zip(&child_states).enumerate() {
        divergence.push(DivergenceRow {
            i: idx + 1,
            state_distance: phi.l2_distance(phi_child)?,
            projected_distance: phi.range_distance(phi_child, child.lo(), child.hi())?,
            bound: 2.0 * cumulative,
        });
        cumulative += psi_total[idx];
    }

    Ok(SubdivideRecord {
        parent: interval,
        child,
        s,
        stage: Stage::Standalone,
        subinterval_sums,
        chosen_r,
        sum_before: weighted_sum(&psi_total, q)?,
        sum_after: weighted_sum(&child_psi, q)?,
        psi_norms,
        psi_total,
        child_psi,
        divergence,
    })
}

/// `S` of `interval` at step `s` under the interval's own oracle, together
/// with the per-step norms `‖ψ_i‖`, `i = 1..=s`.
pub fn weighted_potential(
    alg: &QueryAlgorithm,
    interval: Interval,
    s: usize,
    q: f64,
) -> Result<(f64, Vec<f64>)> {
    let norms = prefix_states(alg, &interval.oracle(), s)?
        .iter()
        .map(|st| st.range_norm(interval.lo(), interval.hi()))
        .collect::<Result<Vec<f64>>>()?;
    let norms = padded(norms, s);
    Ok((weighted_sum(&norms, q)?, norms))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PlannedStep {
    pub s: usize,
    pub stage: Stage,
}

/// The subdivision sequence the outer loop performs, fixed by `(n, t, u, v)` alone.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Schedule {
    pub depth: u32,
    pub steps: Vec<PlannedStep>,
    pub outer_iterations: usize,
    pub final_s: usize,
    pub final_m: usize,
}

/// Exponent `j` with `t^j = n`, if any.
fn log_base(n: usize, t: usize) -> Option<u32> {
    let mut m = n;
    let mut j = 0;
    while m > 1 {
        if !m.is_multiple_of(t) {
            return None;
        }
        m /= t;
        j += 1;
    }
    Some(j)
}

/// Plans `m = n, s = 1; while m >= t^v { u subdivisions; s += 1 }; v - u more`.
/// `depth_override` replaces `v` as the stopping depth.
pub fn plan_schedule(
    n: usize,
    params: &AdversaryParams,
    depth_override: Option<u32>,
) -> Result<Schedule> {
    let t = params.t();
    let u = params.u();
    let depth = depth_override.unwrap_or(params.v());
    if depth == 0 {
        return Err(Error::Config("stopping depth must be at least 1".into()));
    }
    if depth < u {
        return Err(Error::Schedule(format!(
            "stopping depth {depth} is smaller than u = {u}"
        )));
    }
    if log_base(n, t).is_none() {
        return Err(Error::NotPowerOfT { n, t });
    }
    let stop = t.checked_pow(depth);

    let mut steps = Vec::new();
    let (mut m, mut s, mut iterations) = (n, 1usize, 0usize);
    while stop.is_some_and(|stop| m >= stop) {
        iterations += 1;
        for _ in 0..u {
            steps.push(PlannedStep {
                s,
                stage: Stage::Loop(iterations),
            });
            m /= t;
        }
        s += 1;
    }
    for _ in 0..depth - u {
        if m < t {
            return Err(Error::Schedule(format!(
                "n = {n} is too small for {} trailing subdivisions at depth {depth}",
                depth - u
            )));
        }
        steps.push(PlannedStep {
            s,
            stage: Stage::Tail,
        });
        m /= t;
    }
    Ok(Schedule {
        depth,
        steps,
        outer_iterations: iterations,
        final_s: s,
        final_m: m,
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AttackOptions {
    /// Stopping depth used instead of the derived `v`.
    pub depth_override: Option<u32>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdversaryTrace {
    pub params: AdversaryParams,
    pub n: usize,
    pub queries: usize,
    pub depth: u32,
    pub records: Vec<SubdivideRecord>,
    pub outer_iterations: usize,
    pub final_interval: Interval,
    pub final_s: usize,
    pub final_sum: f64,
    /// `‖ψ_i‖` of the final interval at the final step, `i = 1..=final_s`.
    pub final_psi: Vec<f64>,
}

impl AdversaryTrace {
    /// `(log n − depth·log t)/(u log t)`, the guaranteed number of outer iterations.
    pub fn iteration_lower_bound(&self) -> f64 {
        let log_t = f64::from(self.params.log2_t());
        ((self.n as f64).log2() - f64::from(self.depth) * log_t)
            / (f64::from(self.params.u()) * log_t)
    }

    /// The adjacent inputs `(lm − 1, lm)` that differ only at the final interval's right end.
    pub fn hard_pair(&self) -> (ThresholdInput, ThresholdInput) {
        let hi = self.final_interval.hi();
        (
            ThresholdInput::new(self.n, hi - 1).expect("hi >= 1"),
            ThresholdInput::new(self.n, hi).expect("hi <= n"),
        )
    }
}

/// Runs the full adversary schedule against `alg`.
///
/// Fails with [`Error::Regime`] when the algorithm makes more queries than
/// the schedule's final step covers; the hybrid argument says nothing then.
pub fn construct_hard_input(
    alg: &QueryAlgorithm,
    params: &AdversaryParams,
    options: &AttackOptions,
) -> Result<AdversaryTrace> {
    let n = alg.layout().n();
    let schedule = plan_schedule(n, params, options.depth_override)?;
    if alg.queries() > schedule.final_s {
        return Err(Error::Regime {
            queries: alg.queries(),
            covered: schedule.final_s,
        });
    }
    let mut interval = Interval::root(n);
    let mut records = Vec::with_capacity(schedule.steps.len());
    for step in &schedule.steps {
        let mut record = subdivide(alg, interval, step.s, params)?;
        record.stage = step.stage;
        interval = record.child;
        records.push(record);
    }
    let (final_sum, final_psi) = weighted_potential(alg, interval, schedule.final_s, params.q())?;
    Ok(AdversaryTrace {
        params: *params,
        n,
        queries: alg.queries(),
        depth: schedule.depth,
        records,
        outer_iterations: schedule.outer_iterations,
        final_interval: interval,
        final_s: schedule.final_s,
        final_sum,
        final_psi,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundCheck {
    pub value: f64,
    pub bound: f64,
    pub holds: bool,
}

impl BoundCheck {
    pub fn new(value: f64, bound: f64) -> Self {
        Self {
            value,
            bound,
            holds: value <= bound + NORM_TOL,
        }
    }

    pub fn slack(&self) -> f64 {
        self.bound - self.value
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationCheck {
    pub iteration: usize,
    pub s: usize,
    /// `S <= 1/(1 − q q'^u)` before the iteration's first subdivision.
    pub start: BoundCheck,
    /// `S <= q'^u/(1 − q q'^u)` after its last subdivision.
    pub end: BoundCheck,
    /// `S` at step `s + 1` against `1 + q·S_end`.
    pub advance: BoundCheck,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvariantReport {
    pub iterations: Vec<IterationCheck>,
    /// `S' <= q' S` for every record.
    pub contraction: Vec<BoundCheck>,
    /// Final `S` against `q'^(depth − u)/(1 − q q'^u)`.
    pub tail: BoundCheck,
    /// `‖ψ_i‖ <= (1 − 1/q)/(10 q^{s−i})` at the final step.
    pub per_step: Vec<BoundCheck>,
    /// Final `S <= (1/10)(1 − 1/q)`.
    pub final_sum: BoundCheck,
}

impl InvariantReport {
    pub fn holds(&self) -> bool {
        self.iterations
            .iter()
            .all(|it| it.start.holds && it.end.holds && it.advance.holds)
            && self.contraction.iter().all(|c| c.holds)
            && self.tail.holds
            && self.per_step.iter().all(|c| c.holds)
            && self.final_sum.holds
    }
}

/// Evaluates every bound of the outer-loop invariant on a completed trace.
pub fn check_step_invariant(trace: &AdversaryTrace) -> InvariantReport {
    let p = &trace.params;
    let q = p.q();

    let mut iterations = Vec::new();
    let mut idx = 0;
    while idx < trace.records.len() {
        let Stage::Loop(iteration) = trace.records[idx].stage else {
            idx += 1;
            continue;
        };
        let first = &trace.records[idx];
        let mut last = first;
        while idx < trace.records.len() && trace.records[idx].stage == Stage::Loop(iteration) {
            last = &trace.records[idx];
            idx += 1;
        }
        let next_start = trace
            .records
            .get(idx)
            .map_or(trace.final_sum, |r| r.sum_before);
        iterations.push(IterationCheck {
            iteration,
            s: first.s,
            start: BoundCheck::new(first.sum_before, p.start_bound()),
            end: BoundCheck::new(last.sum_after, p.end_bound()),
            advance: BoundCheck::new(next_start, 1.0 + q * last.sum_after),
        });
    }

    let contraction = trace
        .records
        .iter()
        .map(|r| BoundCheck::new(r.sum_after, p.q_prime() * r.sum_before))
        .collect();

    let tail_steps = trace.depth.saturating_sub(p.u()) as i32;
    let tail = BoundCheck::new(
        trace.final_sum,
        p.q_prime().powi(tail_steps) * p.start_bound(),
    );

    let s = trace.final_s;
    let per_step = trace
        .final_psi
        .iter()
        .enumerate()
        .map(|(k, norm)| {
            let i = k + 1;
            BoundCheck::new(*norm, (1.0 - 1.0 / q) / (10.0 * q.powi((s - i) as i32)))
        })
        .collect();

    InvariantReport {
        iterations,
        contraction,
        tail,
        per_step,
        final_sum: BoundCheck::new(trace.final_sum, 0.1 * (1.0 - 1.0 / q)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::{random_algorithm, truncated_binary_search, zero_query};
    use crate::query::Identity;
    use crate::state::BasisLayout;
    use std::sync::Arc;

    fn standard() -> AdversaryParams {
        derive_params(18.3, 8, 4).unwrap()
    }

    #[test]
    fn standard_parameters() {
        let p = standard();
        assert!((p.q_prime() - 0.469_160_327_009_458_7).abs() < 1e-15);
        assert!((p.contraction() - 0.886_617_320_116_828_5).abs() < 1e-14);
        assert!(p.contraction() < 1.0);
        assert_eq!(p.v(), 6);
        assert_eq!(p.coefficient(), 1.0 / 12.0);
    }

    #[test]
    fn v_is_the_smallest_sufficient_power() {
        // Extended-precision value of the threshold: 0.0107186905026167550...
        let p = standard();
        let thr = p.v_threshold();
        assert!((thr - 0.010_718_690_502_616_755).abs() < 1e-15);
        assert!(p.q_prime().powi(6) <= thr);
        assert!(p.q_prime().powi(5) > thr);
    }

    #[test]
    fn rejections() {
        match derive_params(3.0, 4, 1) {
            Err(Error::ParamsRejected { inequality, .. }) => assert_eq!(inequality, "q * q'^u < 1"),
            other => panic!("{other:?}"),
        }
        assert!((q_prime(3.0, 4) - 1.5).abs() < 1e-15);
        assert!(matches!(
            derive_params(1.0, 8, 4),
            Err(Error::InvalidParams(_))
        ));
        assert!(matches!(
            derive_params(18.3, 6, 4),
            Err(Error::InvalidParams(_))
        ));
        assert!(matches!(
            derive_params(18.3, 8, 0),
            Err(Error::InvalidParams(_))
        ));
        assert!(compute_v(3.0, 4, 1).is_err());
    }

    #[test]
    fn v_characterization_over_a_grid() {
        for q in [6.0, 10.0, 18.3, 25.0, 40.0] {
            for t in [4usize, 8, 16, 64, 256] {
                for u in 1..=8 {
                    let Ok(v) = compute_v(q, t, u) else { continue };
                    let qp = q_prime(q, t);
                    let thr = v_threshold(q, t, u);
                    assert!(qp.powi(v as i32) <= thr);
                    assert!(v == 1 || qp.powi(v as i32 - 1) > thr);
                }
            }
        }
    }

    #[test]
    fn v_weakly_decreases_with_t() {
        for q in [10.0, 18.3, 30.0] {
            let mut last = u32::MAX;
            for t in [16usize, 64, 256, 1024, 4096] {
                if let Ok(v) = compute_v(q, t, 1) {
                    assert!(v <= last, "q={q} t={t}");
                    last = v;
                }
            }
        }
    }

    #[test]
    fn weighted_sum_examples() {
        assert_eq!(weighted_sum(&[1.0], 7.0).unwrap(), 1.0);
        assert!((weighted_sum(&[0.1, 0.2], 2.0).unwrap() - 0.4).abs() < 1e-15);
        assert_eq!(weighted_sum(&[0.0; 5], 3.0).unwrap(), 0.0);
        assert!(weighted_sum(&[], 2.0).is_err());
    }

    #[test]
    fn interval_arithmetic() {
        let root = Interval::root(64);
        assert_eq!((root.lo(), root.hi()), (1, 64));
        let c = root.child(3, 8).unwrap();
        assert_eq!((c.l(), c.m(), c.lo(), c.hi()), (3, 8, 17, 24));
        let g = c.child(8, 8).unwrap();
        assert_eq!((g.l(), g.m(), g.lo(), g.hi()), (24, 1, 24, 24));
        assert!(root.contains(&c) && c.contains(&g) && !g.contains(&c));
        assert!(g.child(1, 8).is_err());
        assert!(Interval::new(64, 9, 8).is_err());
        assert!(Interval::new(64, 1, 6).is_err());
    }

    #[test]
    fn tie_break_on_untouched_interval() {
        // All query mass sits on list index 1, outside [9, 16].
        let alg = zero_query(16).unwrap();
        let alg = QueryAlgorithm::new(
            "identity-1",
            *alg.layout(),
            vec![Arc::new(Identity), Arc::new(Identity)],
        )
        .unwrap();
        let params = AdversaryParams {
            q: 18.3,
            t: 2,
            u: 1,
            q_prime: q_prime(18.3, 2),
            v: 1,
        };
        let rec = subdivide(&alg, Interval::new(16, 2, 8).unwrap(), 1, &params).unwrap();
        assert_eq!(rec.subinterval_sums, vec![0.0, 0.0]);
        assert_eq!(rec.chosen_r, 1);
        assert_eq!(rec.child, Interval::new(16, 3, 4).unwrap());
    }

    #[test]
    fn identity_prefix_puts_mass_on_first_block() {
        // T = 1, U_0 = identity, n = t = 8: φ_1 = |0> queries list index 1.
        let layout = BasisLayout::new(8, 0).unwrap();
        let alg = QueryAlgorithm::new(
            "identity-1",
            layout,
            vec![Arc::new(Identity), Arc::new(Identity)],
        )
        .unwrap();
        let rec = subdivide(&alg, Interval::root(8), 1, &standard()).unwrap();
        assert_eq!(rec.subinterval_sums[0], 1.0);
        assert!(rec.subinterval_sums[1..].iter().all(|s| *s == 0.0));
        assert_eq!(rec.chosen_r, 2);
        assert_eq!(rec.child, Interval::new(8, 2, 1).unwrap());
        assert_eq!(rec.sum_before, 1.0);
        assert_eq!(rec.sum_after, 0.0);
    }

    #[test]
    fn subdivide_errors() {
        let alg = random_algorithm(16, 2, 0, 1).unwrap();
        let p = standard();
        assert!(subdivide(&alg, Interval::root(16), 1, &p).is_ok());
        assert!(matches!(
            subdivide(&alg, Interval::new(16, 1, 4).unwrap(), 1, &p),
            Err(Error::NotDivisible { m: 4, t: 8 })
        ));
        assert!(subdivide(&alg, Interval::root(16), 0, &p).is_err());
        assert!(subdivide(&alg, Interval::root(32), 1, &p).is_err());
    }

    #[test]
    fn subdivide_bounds_on_random_algorithms() {
        let p = standard();
        for seed in 0..6 {
            let alg = random_algorithm(64, 3, 1, seed).unwrap();
            for s in 1..=4 {
                let mut interval = Interval::root(64);
                while interval.m() >= 8 {
                    let rec = subdivide(&alg, interval, s, &p).unwrap();
                    assert!(rec.sum_after <= p.q_prime() * rec.sum_before + NORM_TOL);
                    assert!(rec.min_sum() <= rec.sum_before / 8f64.sqrt() + NORM_TOL);
                    let total: f64 = rec.subinterval_sums.iter().sum();
                    assert!(total <= 8f64.sqrt() * rec.sum_before + NORM_TOL);
                    for c in &rec.divergence {
                        assert!(c.state_distance <= c.bound + NORM_TOL);
                        assert!(c.projected_distance <= c.state_distance + NORM_TOL);
                    }
                    assert!(interval.contains(&rec.child));
                    assert_eq!(rec.child.m() * 8, interval.m());
                    interval = rec.child;
                }
            }
        }
    }

    #[test]
    fn schedule_shapes() {
        let p = standard();
        // 8^4 with depth 4: one iteration of four subdivisions, no tail.
        let s = plan_schedule(4096, &p, Some(4)).unwrap();
        assert_eq!(s.outer_iterations, 1);
        assert_eq!(s.steps.len(), 4);
        assert!(s
            .steps
            .iter()
            .all(|st| st.s == 1 && st.stage == Stage::Loop(1)));
        assert_eq!((s.final_s, s.final_m), (2, 1));

        // 8^8 with depth 6: 8^8 >= 8^6 once, then 8^4 < 8^6, tail of 2.
        let s = plan_schedule(1 << 24, &p, None).unwrap();
        assert_eq!(s.outer_iterations, 1);
        assert_eq!(s.steps.len(), 6);
        assert_eq!(
            s.steps[5],
            PlannedStep {
                s: 2,
                stage: Stage::Tail
            }
        );
        assert_eq!(s.final_m, 8 * 8);

        assert!(matches!(
            plan_schedule(512, &p, Some(3)),
            Err(Error::Schedule(_))
        ));
        assert!(matches!(
            plan_schedule(1000, &p, Some(4)),
            Err(Error::NotPowerOfT { .. })
        ));
        assert!(plan_schedule(64, &p, Some(6)).is_ok());
        assert!(matches!(
            plan_schedule(8, &p, Some(6)),
            Err(Error::Schedule(_))
        ));
    }

    #[test]
    fn schedule_iteration_count_meets_lower_bound() {
        let p = standard();
        for exp in 4..=9u32 {
            let n = 8usize.pow(exp);
            for depth in 4..=exp {
                let s = plan_schedule(n, &p, Some(depth)).unwrap();
                let lower = (f64::from(exp) * 3.0 - f64::from(depth) * 3.0) / (4.0 * 3.0);
                assert!(s.outer_iterations as f64 >= lower);
                let total = s.steps.len() as u32;
                assert_eq!(s.final_m, n / 8usize.pow(total));
            }
        }
    }

    #[test]
    fn hard_input_on_zero_query() {
        let p = standard();
        let alg = zero_query(4096).unwrap();
        let trace = construct_hard_input(
            &alg,
            &p,
            &AttackOptions {
                depth_override: Some(4),
            },
        )
        .unwrap();
        assert_eq!(trace.records.len(), 4);
        assert_eq!(trace.final_interval.m(), 1);
        assert_eq!(trace.final_sum, 0.0);
        let report = check_step_invariant(&trace);
        assert!(report.holds(), "{report:?}");
        for pair in trace.records.windows(2) {
            assert!(pair[0].child.contains(&pair[1].child));
            assert_eq!(pair[0].child, pair[1].parent);
        }
    }

    #[test]
    fn regime_error_for_long_algorithms() {
        let p = standard();
        let alg = truncated_binary_search(4096, 3).unwrap();
        assert!(matches!(
            construct_hard_input(
                &alg,
                &p,
                &AttackOptions {
                    depth_override: Some(4)
                }
            ),
            Err(Error::Regime {
                queries: 3,
                covered: 2
            })
        ));
    }

    #[test]
    fn truncated_search_trace() {
        let p = standard();
        let alg = truncated_binary_search(4096, 2).unwrap();
        let trace = construct_hard_input(
            &alg,
            &p,
            &AttackOptions {
                depth_override: Some(4),
            },
        )
        .unwrap();
        // The first probe (list index 2048) lies in block 4; block 1 wins the tie-break.
        assert_eq!(trace.records[0].subinterval_sums[3], 1.0);
        assert_eq!(trace.records[0].chosen_r, 1);
        let report = check_step_invariant(&trace);
        assert!(report.holds(), "{report:?}");
        assert_eq!(report.iterations.len(), 1);
        assert!(report.iterations[0].start.value <= 1.0);
    }
}
