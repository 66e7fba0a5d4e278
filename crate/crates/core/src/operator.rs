//! The sign-additive operator `a ⊗ b = sign(a·b)(|a| + |b|)` and the vector
//! products built from it.
//!
//! The checked entry points reject NaN and infinities. Transform kernels use
//! the `*_unchecked` forms on data already validated at construction time.
//!
//! Operation counting is opt-in: every kernel takes a `&mut impl OpTally`.
//! Pass [`NoTally`] for zero overhead or an [`OpCounter`] to record the
//! number of sign, absolute-value and addition steps.

use std::ops::AddAssign;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sink for primitive-operation counts.
pub trait OpTally {
    /// One real `⊗`: a sign decision, two absolute values, one addition.
    fn real_mf(&mut self);
    /// One complex `⊗`: four real `⊗` plus the two combining additions.
    fn complex_mf(&mut self);
    /// One ordinary complex multiplication.
    fn complex_mul(&mut self);
    /// `n` ordinary real additions (branch combines, accumulations).
    fn adds(&mut self, n: u64);
}

/// Discards all counts.
#[derive(Debug, Default, Clone, Copy)]
pub struct NoTally;

impl OpTally for NoTally {
    #[inline(always)]
    fn real_mf(&mut self) {}
    #[inline(always)]
    fn complex_mf(&mut self) {}
    #[inline(always)]
    fn complex_mul(&mut self) {}
    #[inline(always)]
    fn adds(&mut self, _n: u64) {}
}

/// Operation counts attributed to the `⊗` operator and to ordinary complex
/// multiplications.
///
/// `sign_ops`, `abs_ops` and `add_ops` only count work done *inside* `⊗`;
/// the additions that accumulate transform outputs are tracked separately
/// in `accumulate_adds` so that `k` complex `⊗` calls always read
/// `(4k, 8k, 6k, k)`.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpCountReport {
    pub sign_ops: u64,
    pub abs_ops: u64,
    pub add_ops: u64,
    pub complex_mf_ops: u64,
    pub complex_mul_ops: u64,
    pub accumulate_adds: u64,
}

impl OpCountReport {
    pub fn is_multiplication_free(&self) -> bool {
        self.complex_mul_ops == 0
    }
}

impl AddAssign for OpCountReport {
    fn add_assign(&mut self, rhs: Self) {
        self.sign_ops += rhs.sign_ops;
        self.abs_ops += rhs.abs_ops;
        self.add_ops += rhs.add_ops;
        self.complex_mf_ops += rhs.complex_mf_ops;
        self.complex_mul_ops += rhs.complex_mul_ops;
        self.accumulate_adds += rhs.accumulate_adds;
    }
}

impl std::iter::Sum for OpCountReport {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::default(), |mut acc, r| {
            acc += r;
            acc
        })
    }
}

/// Single-owner counting context. Workers each own one and merge the
/// resulting reports by summation.
#[derive(Debug, Default, Clone)]
pub struct OpCounter {
    report: OpCountReport,
}

impl OpCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn report(&self) -> OpCountReport {
        self.report
    }

    pub fn into_report(self) -> OpCountReport {
        self.report
    }
}

impl OpTally for OpCounter {
    #[inline]
    fn real_mf(&mut self) {
        self.report.sign_ops += 1;
        self.report.abs_ops += 2;
        self.report.add_ops += 1;
    }

    #[inline]
    fn complex_mf(&mut self) {
        self.report.sign_ops += 4;
        self.report.abs_ops += 8;
        self.report.add_ops += 6;
        self.report.complex_mf_ops += 1;
    }

    #[inline]
    fn complex_mul(&mut self) {
        self.report.complex_mul_ops += 1;
    }

    #[inline]
    fn adds(&mut self, n: u64) {
        self.report.accumulate_adds += n;
    }
}

fn check_finite(what: &'static str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite { what, value })
    }
}

#[inline(always)]
fn strict_sign(v: f64) -> i8 {
    // -0.0 compares equal to 0.0 and lands in the zero branch.
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

/// Three-valued sign of `a·b`, computed without multiplying.
#[inline(always)]
pub fn mf_sign_unchecked(a: f64, b: f64) -> i8 {
    strict_sign(a) * strict_sign(b)
}

pub fn mf_sign(a: f64, b: f64) -> Result<i8> {
    check_finite("mf_sign operand", a)?;
    check_finite("mf_sign operand", b)?;
    Ok(mf_sign_unchecked(a, b))
}

#[inline(always)]
pub fn mf_real_unchecked(a: f64, b: f64) -> f64 {
    let sum = a.abs() + b.abs();
    match mf_sign_unchecked(a, b) {
        1 => sum,
        -1 => -sum,
        _ => 0.0,
    }
}

/// Real `a ⊗ b`.
pub fn mf_real(a: f64, b: f64, tally: &mut impl OpTally) -> Result<f64> {
    check_finite("mf_real operand", a)?;
    check_finite("mf_real operand", b)?;
    tally.real_mf();
    Ok(mf_real_unchecked(a, b))
}

/// Complex `a ⊗ b = (a_r⊗b_r − a_i⊗b_i) + j(a_i⊗b_r + b_i⊗a_r)`.
#[inline(always)]
pub fn mf_complex_unchecked(a: Complex64, b: Complex64) -> Complex64 {
    Complex64::new(
        mf_real_unchecked(a.re, b.re) - mf_real_unchecked(a.im, b.im),
        mf_real_unchecked(a.im, b.re) + mf_real_unchecked(b.im, a.re),
    )
}

/// Complex `⊗` with tallying; the kernels' hot path.
#[inline(always)]
pub(crate) fn mf_complex_tallied(a: Complex64, b: Complex64, tally: &mut impl OpTally) -> Complex64 {
    tally.complex_mf();
    mf_complex_unchecked(a, b)
}

pub fn mf_complex(a: Complex64, b: Complex64, tally: &mut impl OpTally) -> Result<Complex64> {
    for v in [a.re, a.im, b.re, b.im] {
        check_finite("mf_complex operand", v)?;
    }
    Ok(mf_complex_tallied(a, b, tally))
}

/// `<x ⊙ y> = Σ x_i ⊗ y_i`.
pub fn vector_product(x: &[f64], y: &[f64], tally: &mut impl OpTally) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch { left: x.len(), right: y.len() });
    }
    if x.is_empty() {
        return Err(Error::Empty("vector_product operands"));
    }
    let mut acc = 0.0;
    for (&a, &b) in x.iter().zip(y) {
        acc += mf_real(a, b, tally)?;
    }
    tally.adds(x.len() as u64 - 1);
    Ok(acc)
}

/// Element-wise `a ⊗ x(i)`.
pub fn scalar_vector(a: f64, x: &[f64], tally: &mut impl OpTally) -> Result<Vec<f64>> {
    x.iter().map(|&v| mf_real(a, v, tally)).collect()
}
