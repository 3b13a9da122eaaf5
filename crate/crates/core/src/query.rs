//! Threshold oracles and execution of query algorithms.
//!
//! An algorithm with `T` queries is `U_T O U_{T-1} ... U_1 O U_0` applied to
//! `|0>`. The unitaries are opaque [`Transform`]s so structured algorithms
//! never materialize a matrix.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::state::{BasisLayout, StateVector};

/// The monotone input `x_1 = ... = x_k = 0, x_{k+1} = ... = x_n = 1`.
///
/// `k` ranges over `[0, n]`. `k = n` (all zeros) arises as the adversary's
/// first oracle; its answer does not fit in the index register, so no
/// measurement outcome designates it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct ThresholdInput {
    n: usize,
    k: usize,
}

impl ThresholdInput {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if k > n {
            return Err(Error::ThresholdOutOfRange { k, n });
        }
        Ok(Self { n, k })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Value of `x_i` for a 1-based list index.
    pub fn bit(&self, list_index: usize) -> bool {
        list_index > self.k
    }

    /// i-field value a correct algorithm outputs: `k` itself, when `k < n`.
    pub fn designated_answer(&self) -> Option<usize> {
        (self.k < self.n).then_some(self.k)
    }
}

/// A norm-preserving transformation acting in place on a state.
pub trait Transform: Send + Sync + fmt::Debug {
    fn apply(&self, state: &mut StateVector);
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Identity;

impl Transform for Identity {
    fn apply(&self, _state: &mut StateVector) {}
}

/// A permutation of basis states given by a bijective map on basis indices.
pub struct BasisPermutation {
    label: String,
    map: Box<dyn Fn(usize) -> usize + Send + Sync>,
}

impl BasisPermutation {
    /// `map` must be a bijection on `0..dimension`.
    pub fn new<F>(label: impl Into<String>, map: F) -> Self
    where
        F: Fn(usize) -> usize + Send + Sync + 'static,
    {
        Self {
            label: label.into(),
            map: Box::new(map),
        }
    }

    pub fn image(&self, basis: usize) -> usize {
        (self.map)(basis)
    }
}

impl fmt::Debug for BasisPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BasisPermutation")
            .field("label", &self.label)
            .finish()
    }
}

impl Transform for BasisPermutation {
    fn apply(&self, state: &mut StateVector) {
        let amps = state.amplitudes_mut();
        let old = amps.to_vec();
        for (basis, a) in old.into_iter().enumerate() {
            amps[(self.map)(basis)] = a;
        }
    }
}

/// A rotation acting on the two-dimensional span of basis states `a` and `b`
/// as the SU(2) matrix `[[alpha, -conj(beta)], [beta, conj(alpha)]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLevelRotation {
    pub a: usize,
    pub b: usize,
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl TwoLevelRotation {
    fn apply(&self, amps: &mut [Complex64]) {
        let (xa, xb) = (amps[self.a], amps[self.b]);
        amps[self.a] = self.alpha * xa - self.beta.conj() * xb;
        amps[self.b] = self.beta * xa + self.alpha.conj() * xb;
    }
}

/// Product of two-level rotations, applied in order.
#[derive(Debug, Clone, PartialEq)]
pub struct RotationProduct {
    rotations: Vec<TwoLevelRotation>,
}

impl RotationProduct {
    pub fn new(rotations: Vec<TwoLevelRotation>) -> Self {
        Self { rotations }
    }

    pub fn rotations(&self) -> &[TwoLevelRotation] {
        &self.rotations
    }
}

impl Transform for RotationProduct {
    fn apply(&self, state: &mut StateVector) {
        let amps = state.amplitudes_mut();
        for r in &self.rotations {
            r.apply(amps);
        }
    }
}

/// `U_0, O, U_1, ..., O, U_T` over a fixed layout.
#[derive(Debug, Clone)]
pub struct QueryAlgorithm {
    name: String,
    layout: BasisLayout,
    unitaries: Vec<Arc<dyn Transform>>,
}

impl QueryAlgorithm {
    /// `unitaries` holds `U_0 ..= U_T`; the query count is `len - 1`.
    pub fn new(
        name: impl Into<String>,
        layout: BasisLayout,
        unitaries: Vec<Arc<dyn Transform>>,
    ) -> Result<Self> {
        if unitaries.is_empty() {
            return Err(Error::AlgorithmSpec(
                "an algorithm needs at least U_0".into(),
            ));
        }
        Ok(Self {
            name: name.into(),
            layout,
            unitaries,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn layout(&self) -> &BasisLayout {
        &self.layout
    }

    /// Number of oracle calls `T`.
    pub fn queries(&self) -> usize {
        self.unitaries.len() - 1
    }

    pub fn unitary(&self, j: usize) -> &dyn Transform {
        self.unitaries[j].as_ref()
    }

    /// Dense matrix of `U_j` (column `c` is the image of basis state `c`).
    /// Only for small test dimensions.
    pub fn dense_unitary(&self, j: usize) -> Result<Vec<Vec<Complex64>>> {
        const LIMIT: usize = 1 << 10;
        let d = self.layout.dimension();
        if d > LIMIT {
            return Err(Error::TooLarge {
                what: "dense unitary",
                dimension: d,
                limit: LIMIT,
            });
        }
        if j > self.queries() {
            return Err(Error::StepOutOfRange {
                step: j,
                min: 0,
                max: self.queries(),
            });
        }
        let mut columns = Vec::with_capacity(d);
        for c in 0..d {
            let mut s = StateVector::null(self.layout);
            s.amplitudes_mut()[c] = Complex64::new(1.0, 0.0);
            self.unitaries[j].apply(&mut s);
            columns.push(s.into_amplitudes());
        }
        Ok(columns)
    }

    fn check_input(&self, input: &ThresholdInput) -> Result<()> {
        if input.n() != self.layout.n() {
            return Err(Error::LayoutMismatch(format!(
                "input has n = {}, algorithm has n = {}",
                input.n(),
                self.layout.n()
            )));
        }
        Ok(())
    }
}

/// Flips the b-field of every component whose list index exceeds `k`.
pub fn apply_oracle_in_place(state: &mut StateVector, input: &ThresholdInput) -> Result<()> {
    let layout = *state.layout();
    if input.n() != layout.n() {
        return Err(Error::LayoutMismatch(format!(
            "input has n = {}, state has n = {}",
            input.n(),
            layout.n()
        )));
    }
    let half = layout.workspace_len();
    let start = input.k() * layout.block_len();
    for block in state.amplitudes_mut()[start..].chunks_exact_mut(2 * half) {
        let (b0, b1) = block.split_at_mut(half);
        b0.swap_with_slice(b1);
    }
    Ok(())
}

/// `O_k`: `|i, b, z> -> |i, b xor x_i, z>`.
pub fn apply_oracle(state: &StateVector, input: &ThresholdInput) -> Result<StateVector> {
    let mut out = state.clone();
    apply_oracle_in_place(&mut out, input)?;
    Ok(out)
}

/// Final state `U_T O_k ... U_1 O_k U_0 |0>`.
pub fn run_full(alg: &QueryAlgorithm, input: &ThresholdInput) -> Result<StateVector> {
    run_hybrid(alg, alg.queries(), input, input)
}

/// State immediately before the `s`-th query, `1 <= s <= T`.
pub fn run_prefix(alg: &QueryAlgorithm, input: &ThresholdInput, s: usize) -> Result<StateVector> {
    if s == 0 || s > alg.queries() {
        return Err(Error::StepOutOfRange {
            step: s,
            min: 1,
            max: alg.queries(),
        });
    }
    Ok(prefix_states(alg, input, s)?.pop().expect("s >= 1"))
}

/// States before queries `1..=upto`, in order. `upto` is clamped to `T`.
pub fn prefix_states(
    alg: &QueryAlgorithm,
    input: &ThresholdInput,
    upto: usize,
) -> Result<Vec<StateVector>> {
    alg.check_input(input)?;
    let upto = upto.min(alg.queries());
    let mut out = Vec::with_capacity(upto);
    if upto == 0 {
        return Ok(out);
    }
    let mut state = StateVector::zero_state(alg.layout);
    alg.unitaries[0].apply(&mut state);
    out.push(state.clone());
    for j in 1..upto {
        apply_oracle_in_place(&mut state, input)?;
        alg.unitaries[j].apply(&mut state);
        out.push(state.clone());
    }
    Ok(out)
}

/// Continues a run from the state just before query `next` (1-based) to the
/// end, answering the remaining queries with `input`.
pub fn resume(
    alg: &QueryAlgorithm,
    mut state: StateVector,
    next: usize,
    input: &ThresholdInput,
) -> Result<StateVector> {
    alg.check_input(input)?;
    for j in next..=alg.queries() {
        apply_oracle_in_place(&mut state, input)?;
        alg.unitaries[j].apply(&mut state);
    }
    Ok(state)
}

/// Final state when the first `i` queries use `early` and the remaining
/// `T - i` use `late`.
pub fn run_hybrid(
    alg: &QueryAlgorithm,
    i: usize,
    early: &ThresholdInput,
    late: &ThresholdInput,
) -> Result<StateVector> {
    alg.check_input(early)?;
    alg.check_input(late)?;
    if i > alg.queries() {
        return Err(Error::StepOutOfRange {
            step: i,
            min: 0,
            max: alg.queries(),
        });
    }
    let mut state = StateVector::zero_state(alg.layout);
    alg.unitaries[0].apply(&mut state);
    for j in 1..=alg.queries() {
        let oracle = if j <= i { early } else { late };
        apply_oracle_in_place(&mut state, oracle)?;
        alg.unitaries[j].apply(&mut state);
    }
    Ok(state)
}

/// Probability that measuring the index register of the final state yields
/// the designated answer for `input`. Zero for `k = n`, which no outcome encodes.
pub fn success_probability(alg: &QueryAlgorithm, input: &ThresholdInput) -> Result<f64> {
    let dist = run_full(alg, input)?.measure_index_distribution();
    Ok(input
        .designated_answer()
        .map_or(0.0, |k| dist.probabilities()[k]))
}
