//! Output documents: attack traces with their hybrid section, parameter
//! reports and sweeps.
//!
//! JSON documents write every real with 17 significant digits in exponent
//! form, which round-trips `f64` exactly and keeps output byte-stable.

use std::io;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::adversary::{
    check_step_invariant, compute_v, q_prime, v_threshold, AdversaryParams, AdversaryTrace,
    InvariantReport,
};
use crate::error::{Error, Result};
use crate::verifier::{HybridReport, Verdict};

/// Pretty JSON formatter that prints floats as `d.dddddddddddddddde±x`.
struct FixedDigits<'a> {
    inner: PrettyFormatter<'a>,
}

impl Formatter for FixedDigits<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.inner.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.inner.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object_value(w)
    }
}

/// Serializes `value` as pretty JSON with fixed-precision reals.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let formatter = FixedDigits {
        inner: PrettyFormatter::with_indent(b"  "),
    };
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, formatter);
    value
        .serialize(&mut ser)
        .map_err(|e| Error::Config(format!("serialization failed: {e}")))?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

/// Fifteen significant digits, for CSV cells.
pub fn format_real(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.14e}")
    } else {
        x.to_string()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ParamsDoc {
    pub q: f64,
    pub t: usize,
    pub u: u32,
    pub q_prime: f64,
    pub v: u32,
}

impl From<&AdversaryParams> for ParamsDoc {
    fn from(p: &AdversaryParams) -> Self {
        Self {
            q: p.q(),
            t: p.t(),
            u: p.u(),
            q_prime: p.q_prime(),
            v: p.v(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IntervalDoc {
    pub l: usize,
    pub m: usize,
}

#[derive(Debug, Clone, Serialize)]
#[allow(non_snake_case)]
pub struct RecordDoc {
    pub s: usize,
    pub parent: IntervalDoc,
    pub child: IntervalDoc,
    pub S_values: Vec<f64>,
    pub chosen_r: usize,
    pub S_before: f64,
    pub S_after: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerdictDoc {
    pub distinguishable: bool,
    pub reason: String,
    pub contradiction: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct HybridDoc {
    pub k_early: usize,
    pub k_late: usize,
    pub s: usize,
    pub per_step_distance: Vec<f64>,
    pub per_step_bound: Vec<f64>,
    pub per_step_psi: Vec<f64>,
    pub total_distance: f64,
    pub triangle_sum: f64,
    pub total_bound: f64,
    pub success_lo: f64,
    pub success_hi: f64,
    pub variational: f64,
    pub verdict: VerdictDoc,
}

#[derive(Debug, Clone, Serialize)]
#[allow(non_snake_case)]
pub struct AttackDoc {
    pub algorithm: String,
    pub params: ParamsDoc,
    pub n: usize,
    pub queries: usize,
    pub depth: u32,
    pub outer_iterations: usize,
    pub iteration_lower_bound: f64,
    pub final_interval: IntervalDoc,
    pub final_s: usize,
    pub final_S: f64,
    pub records: Vec<RecordDoc>,
    pub invariants: InvariantReport,
    pub hybrid: HybridDoc,
}

impl AttackDoc {
    pub fn new(
        algorithm: &str,
        trace: &AdversaryTrace,
        hybrid: &HybridReport,
        verdict: &Verdict,
    ) -> Self {
        let iv = |i: &crate::adversary::Interval| IntervalDoc { l: i.l(), m: i.m() };
        Self {
            algorithm: algorithm.to_owned(),
            params: ParamsDoc::from(&trace.params),
            n: trace.n,
            queries: trace.queries,
            depth: trace.depth,
            outer_iterations: trace.outer_iterations,
            iteration_lower_bound: trace.iteration_lower_bound(),
            final_interval: iv(&trace.final_interval),
            final_s: trace.final_s,
            final_S: trace.final_sum,
            records: trace
                .records
                .iter()
                .map(|r| RecordDoc {
                    s: r.s,
                    parent: iv(&r.parent),
                    child: iv(&r.child),
                    S_values: r.subinterval_sums.clone(),
                    chosen_r: r.chosen_r,
                    S_before: r.sum_before,
                    S_after: r.sum_after,
                })
                .collect(),
            invariants: check_step_invariant(trace),
            hybrid: HybridDoc {
                k_early: hybrid.k_early,
                k_late: hybrid.k_late,
                s: hybrid.s,
                per_step_distance: hybrid.per_step_distance.clone(),
                per_step_bound: hybrid.per_step_bound.clone(),
                per_step_psi: hybrid.per_step_psi.clone(),
                total_distance: hybrid.total_distance,
                triangle_sum: hybrid.triangle_sum,
                total_bound: hybrid.total_bound,
                success_lo: hybrid.success_lo,
                success_hi: hybrid.success_hi,
                variational: hybrid.variational,
                verdict: VerdictDoc {
                    distinguishable: verdict.distinguishable,
                    reason: verdict.reason.clone(),
                    contradiction: verdict.contradiction,
                },
            },
        }
    }
}

/// Everything the parameter check prints for one `(q, t, u)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamsReport {
    pub q: f64,
    pub t: usize,
    pub u: u32,
    pub accepted: bool,
    pub q_prime: f64,
    /// `q · q'^u`.
    pub contraction: f64,
    pub v: Option<u32>,
    /// `(1/10)(1 − q q'^u)(1 − 1/q)`.
    pub v_threshold: f64,
    /// `q'^v`, when `v` exists.
    pub q_prime_pow_v: Option<f64>,
    /// `1/(u log2 t)`.
    pub coefficient: f64,
    pub coefficient_fraction: String,
    pub rejection: Option<String>,
}

/// Evaluates `(q, t, u)`. Only malformed input (q <= 1, t not a power of
/// two, u = 0) is an error; failed inequalities give `accepted = false`.
pub fn params_report(q: f64, t: usize, u: u32) -> Result<ParamsReport> {
    if !(q.is_finite() && q > 1.0) || t < 2 || !t.is_power_of_two() || u == 0 {
        // Reuse the validation message.
        compute_v(q, t, u)?;
    }
    let qp = q_prime(q, t);
    let contraction = q * qp.powi(u as i32);
    let denom = u * t.trailing_zeros();
    let (v, rejection) = match crate::adversary::derive_params(q, t, u) {
        Ok(p) => (Some(p.v()), None),
        Err(Error::ParamsRejected { inequality, detail }) => {
            let v = compute_v(q, t, u).ok();
            (v, Some(format!("{inequality} fails ({detail})")))
        }
        Err(e) => return Err(e),
    };
    Ok(ParamsReport {
        q,
        t,
        u,
        accepted: rejection.is_none(),
        q_prime: qp,
        contraction,
        v,
        v_threshold: v_threshold(q, t, u),
        q_prime_pow_v: v.map(|v| qp.powi(v as i32)),
        coefficient: 1.0 / f64::from(denom),
        coefficient_fraction: format!("1/{denom}"),
        rejection,
    })
}

/// Parameter grid, sorted by coefficient (descending), then `q`, `t`, `u`.
pub fn sweep(qs: &[f64], ts: &[usize], us: &[u32]) -> Result<Vec<ParamsReport>> {
    if qs.is_empty() || ts.is_empty() || us.is_empty() {
        return Err(Error::Config("sweep grid is empty".into()));
    }
    let mut rows = Vec::with_capacity(qs.len() * ts.len() * us.len());
    for &q in qs {
        for &t in ts {
            for &u in us {
                rows.push(params_report(q, t, u)?);
            }
        }
    }
    rows.sort_by(|a, b| {
        b.coefficient
            .total_cmp(&a.coefficient)
            .then(a.q.total_cmp(&b.q))
            .then(a.t.cmp(&b.t))
            .then(a.u.cmp(&b.u))
    });
    Ok(rows)
}

pub const SWEEP_HEADER: [&str; 10] = [
    "q",
    "t",
    "u",
    "accepted",
    "q_prime",
    "contraction",
    "v",
    "coefficient",
    "coefficient_fraction",
    "rejection",
];

impl ParamsReport {
    pub fn csv_row(&self) -> Vec<String> {
        vec![
            format_real(self.q),
            self.t.to_string(),
            self.u.to_string(),
            self.accepted.to_string(),
            format_real(self.q_prime),
            format_real(self.contraction),
            self.v.map(|v| v.to_string()).unwrap_or_default(),
            format_real(self.coefficient),
            self.coefficient_fraction.clone(),
            self.rejection.clone().unwrap_or_default(),
        ]
    }
}
