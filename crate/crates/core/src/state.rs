//! Amplitude vectors over the `|i, b, z>` register layout.
//!
//! The basis index of `|i, b, z>` is `((i - 1) << (w + 1)) | (b << w) | z`,
//! so the index register occupies the most significant bits. All amplitudes
//! sharing one list index form a contiguous block of `2^(w+1)` entries, and a
//! list range `[lo, hi]` is a contiguous slice of the amplitude array.

use std::ops::Range;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::NORM_TOL;

/// Largest register width the simulator accepts.
pub const MAX_QUBITS: u32 = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct BasisLayout {
    n: usize,
    index_bits: u32,
    workspace_bits: u32,
}

impl BasisLayout {
    pub fn new(n: usize, workspace_bits: u32) -> Result<Self> {
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(n));
        }
        let index_bits = n.trailing_zeros();
        let qubits = index_bits + 1 + workspace_bits;
        if qubits > MAX_QUBITS {
            return Err(Error::LayoutTooLarge {
                qubits,
                limit: MAX_QUBITS,
            });
        }
        Ok(Self {
            n,
            index_bits,
            workspace_bits,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn index_bits(&self) -> u32 {
        self.index_bits
    }

    pub fn workspace_bits(&self) -> u32 {
        self.workspace_bits
    }

    pub fn qubits(&self) -> u32 {
        self.index_bits + 1 + self.workspace_bits
    }

    pub fn dimension(&self) -> usize {
        self.n << (self.workspace_bits + 1)
    }

    /// Amplitudes per list index (`2 * 2^w`).
    pub fn block_len(&self) -> usize {
        2usize << self.workspace_bits
    }

    /// Number of workspace values, `2^w`; also the offset of the `b = 1` half of a block.
    pub fn workspace_len(&self) -> usize {
        1usize << self.workspace_bits
    }

    /// Basis index of `|i, b, z>` for a 1-based list index `i`.
    pub fn encode(&self, list_index: usize, b: bool, z: usize) -> usize {
        debug_assert!((1..=self.n).contains(&list_index));
        debug_assert!(z < self.workspace_len());
        ((list_index - 1) << (self.workspace_bits + 1)) | ((b as usize) << self.workspace_bits) | z
    }

    /// Inverse of [`BasisLayout::encode`]: `(list index, b, z)`.
    pub fn decode(&self, basis: usize) -> (usize, bool, usize) {
        let z = basis & (self.workspace_len() - 1);
        let b = (basis >> self.workspace_bits) & 1 == 1;
        let i_field = basis >> (self.workspace_bits + 1);
        (i_field + 1, b, z)
    }

    pub fn check_range(&self, lo: usize, hi: usize) -> Result<()> {
        if lo == 0 || lo > hi || hi > self.n {
            return Err(Error::RangeOutOfBounds { lo, hi, n: self.n });
        }
        Ok(())
    }

    /// Slice of the amplitude array holding list indices `lo..=hi`.
    pub fn span(&self, lo: usize, hi: usize) -> Result<Range<usize>> {
        self.check_range(lo, hi)?;
        Ok((lo - 1) * self.block_len()..hi * self.block_len())
    }

    fn ensure_same(&self, other: &BasisLayout) -> Result<()> {
        if self != other {
            return Err(Error::LayoutMismatch(format!("{self:?} vs {other:?}")));
        }
        Ok(())
    }
}

/// A possibly sub-normalized state. Projections are not renormalized.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    layout: BasisLayout,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// The all-zero basis state `|0>`, i.e. `|i = 1, b = 0, z = 0>`.
    pub fn zero_state(layout: BasisLayout) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); layout.dimension()];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Self { layout, amplitudes }
    }

    /// The null vector (every amplitude zero).
    pub fn null(layout: BasisLayout) -> Self {
        Self {
            layout,
            amplitudes: vec![Complex64::new(0.0, 0.0); layout.dimension()],
        }
    }

    pub fn basis_state(layout: BasisLayout, list_index: usize, b: bool, z: usize) -> Result<Self> {
        layout.check_range(list_index, list_index)?;
        if z >= layout.workspace_len() {
            return Err(Error::InvalidState(format!(
                "workspace value {z} needs more than {} bits",
                layout.workspace_bits()
            )));
        }
        let mut s = Self::null(layout);
        s.amplitudes[layout.encode(list_index, b, z)] = Complex64::new(1.0, 0.0);
        Ok(s)
    }

    pub fn from_amplitudes(layout: BasisLayout, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != layout.dimension() {
            return Err(Error::DimensionMismatch {
                expected: layout.dimension(),
                got: amplitudes.len(),
            });
        }
        if amplitudes
            .iter()
            .any(|a| !a.re.is_finite() || !a.im.is_finite())
        {
            return Err(Error::InvalidState("non-finite amplitude".into()));
        }
        let s = Self { layout, amplitudes };
        let norm = s.norm();
        if norm > 1.0 + NORM_TOL {
            return Err(Error::InvalidState(format!("norm {norm} exceeds 1")));
        }
        Ok(s)
    }

    pub fn layout(&self) -> &BasisLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Raw mutable access for transformations. Callers must keep the
    /// amplitudes finite and must not increase the norm.
    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn amplitude(&self, list_index: usize, b: bool, z: usize) -> Complex64 {
        self.amplitudes[self.layout.encode(list_index, b, z)]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn l2_distance(&self, other: &StateVector) -> Result<f64> {
        self.layout.ensure_same(&other.layout)?;
        Ok(squared_distance(&self.amplitudes, &other.amplitudes).sqrt())
    }

    /// Keeps the components whose index register holds a list index in
    /// `[lo, hi]` and zeroes the rest.
    pub fn project_query_range(&self, lo: usize, hi: usize) -> Result<StateVector> {
        let span = self.layout.span(lo, hi)?;
        let mut out = Self::null(self.layout);
        out.amplitudes[span.clone()].copy_from_slice(&self.amplitudes[span]);
        Ok(out)
    }

    /// `‖project_query_range(lo, hi)‖` without materializing the projection.
    pub fn range_norm(&self, lo: usize, hi: usize) -> Result<f64> {
        let span = self.layout.span(lo, hi)?;
        Ok(self.amplitudes[span]
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    /// `‖P(self) − P(other)‖` for the projection `P` onto list indices `[lo, hi]`.
    pub fn range_distance(&self, other: &StateVector, lo: usize, hi: usize) -> Result<f64> {
        self.layout.ensure_same(&other.layout)?;
        let span = self.layout.span(lo, hi)?;
        Ok(squared_distance(&self.amplitudes[span.clone()], &other.amplitudes[span]).sqrt())
    }

    /// Distribution of the index register: `p[i] = Σ_{b,z} |a(i, b, z)|²`.
    pub fn measure_index_distribution(&self) -> IndexDistribution {
        let probabilities = self
            .amplitudes
            .chunks_exact(self.layout.block_len())
            .map(|block| block.iter().map(|a| a.norm_sqr()).sum())
            .collect();
        IndexDistribution { probabilities }
    }
}

fn squared_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum()
}

/// Haar-like random unit vector: i.i.d. complex Gaussians, normalized.
pub fn random_unit_state<R: Rng + ?Sized>(layout: BasisLayout, rng: &mut R) -> StateVector {
    loop {
        let mut amplitudes: Vec<Complex64> = (0..layout.dimension())
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            amplitudes.iter_mut().for_each(|a| *a /= norm);
            return StateVector { layout, amplitudes };
        }
    }
}

/// Outcome distribution of measuring the index register. Entry `j` is the
/// probability of reading i-field value `j`, i.e. list index `j + 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndexDistribution {
    probabilities: Vec<f64>,
}

impl IndexDistribution {
    pub fn new(probabilities: Vec<f64>) -> Result<Self> {
        if probabilities.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidState(
                "probabilities must be finite and >= 0".into(),
            ));
        }
        let total: f64 = probabilities.iter().sum();
        if total > 1.0 + NORM_TOL {
            return Err(Error::InvalidState(format!("probabilities sum to {total}")));
        }
        Ok(Self { probabilities })
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    /// Probability of reading the 1-based list index `i`.
    pub fn of_list_index(&self, list_index: usize) -> f64 {
        list_index
            .checked_sub(1)
            .and_then(|j| self.probabilities.get(j))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }

    /// `Σ_x |p(x) − p'(x)|`, in `[0, 2]` for probability distributions.
    pub fn variational_distance(&self, other: &IndexDistribution) -> Result<f64> {
        if self.probabilities.len() != other.probabilities.len() {
            return Err(Error::LengthMismatch(
                self.probabilities.len(),
                other.probabilities.len(),
            ));
        }
        Ok(self
            .probabilities
            .iter()
            .zip(&other.probabilities)
            .map(|(p, r)| (p - r).abs())
            .sum())
    }
}
