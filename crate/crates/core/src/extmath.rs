//! Extended reals `[-∞, +∞]`.
//!
//! Two additions are provided because `-∞ + +∞` has no canonical value:
//!
//! | operation | `-∞ + +∞` | used for |
//! |-----------|-----------|----------|
//! | [`add_lower`] | `-∞` | lower bounds (`f ∔ s`) |
//! | [`add_upper`] | `+∞` | upper bounds and subadditive sequences (`f +̇ s`) |
//!
//! Scalar multiplication follows `0 · (±∞) = 0`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Neg;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

/// Error raised when a NaN is offered as an extended real.
#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
#[error("NaN is not an extended real")]
pub struct NanError;

/// A value in `[-∞, +∞]`. Never NaN, so the order is total.
#[derive(Clone, Copy, PartialEq)]
pub struct ExtReal(f64);

impl ExtReal {
    pub const NEG_INF: ExtReal = ExtReal(f64::NEG_INFINITY);
    pub const POS_INF: ExtReal = ExtReal(f64::INFINITY);
    pub const ZERO: ExtReal = ExtReal(0.0);

    /// Wraps an `f64`; IEEE infinities map to `±∞`.
    pub fn new(value: f64) -> Result<Self, NanError> {
        if value.is_nan() {
            Err(NanError)
        } else {
            Ok(ExtReal(value))
        }
    }

    /// Wraps an `f64` that is known not to be NaN.
    ///
    /// # Panics
    /// On NaN input.
    #[track_caller]
    pub fn of(value: f64) -> Self {
        assert!(!value.is_nan(), "NaN is not an extended real");
        ExtReal(value)
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    #[inline]
    pub fn is_neg_inf(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }

    #[inline]
    pub fn is_pos_inf(self) -> bool {
        self.0 == f64::INFINITY
    }

    /// `t · self` with `0 · (±∞) = 0`.
    pub fn scale(self, t: f64) -> Self {
        assert!(!t.is_nan(), "NaN scale factor");
        if t == 0.0 {
            ExtReal::ZERO
        } else {
            ExtReal(t * self.0)
        }
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }
}

impl Default for ExtReal {
    fn default() -> Self {
        ExtReal::ZERO
    }
}

impl Eq for ExtReal {}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtReal {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .partial_cmp(&other.0)
            .expect("ExtReal never holds NaN")
    }
}

impl Neg for ExtReal {
    type Output = ExtReal;
    fn neg(self) -> ExtReal {
        ExtReal(-self.0)
    }
}

impl From<ExtReal> for f64 {
    fn from(v: ExtReal) -> f64 {
        v.0
    }
}

impl TryFrom<f64> for ExtReal {
    type Error = NanError;
    fn try_from(v: f64) -> Result<Self, NanError> {
        ExtReal::new(v)
    }
}

impl fmt::Debug for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_pos_inf() {
            f.write_str("+inf")
        } else if self.is_neg_inf() {
            f.write_str("-inf")
        } else {
            fmt::Display::fmt(&self.0, f)
        }
    }
}

/// Addition where `-∞` absorbs everything: `-∞ ∔ +∞ = -∞`.
pub fn add_lower(a: ExtReal, b: ExtReal) -> ExtReal {
    if a.is_neg_inf() || b.is_neg_inf() {
        ExtReal::NEG_INF
    } else {
        ExtReal(a.0 + b.0)
    }
}

/// Addition where `+∞` absorbs everything: `-∞ +̇ +∞ = +∞`.
pub fn add_upper(a: ExtReal, b: ExtReal) -> ExtReal {
    if a.is_pos_inf() || b.is_pos_inf() {
        ExtReal::POS_INF
    } else {
        ExtReal(a.0 + b.0)
    }
}

/// `log Σ exp(t_i)`; `-∞` terms carry no mass and the empty sum is `-∞`.
pub fn log_sum_exp(terms: &[ExtReal]) -> ExtReal {
    let mut acc = LogSumExp::new();
    for &t in terms {
        acc.push(t.0);
    }
    acc.total()
}

/// `log(e^a + e^b)` on raw log-values (`-∞` allowed).
#[inline]
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    if hi == f64::INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// Streaming log-sum-exp accumulator with a running maximum.
///
/// Terms are rescaled whenever a new maximum appears, so no intermediate
/// exponential overflows.
#[derive(Debug, Clone, Copy)]
pub struct LogSumExp {
    max: f64,
    scaled_sum: f64,
}

impl Default for LogSumExp {
    fn default() -> Self {
        Self::new()
    }
}

impl LogSumExp {
    pub fn new() -> Self {
        LogSumExp {
            max: f64::NEG_INFINITY,
            scaled_sum: 0.0,
        }
    }

    #[inline]
    pub fn push(&mut self, t: f64) {
        debug_assert!(!t.is_nan());
        if t == f64::NEG_INFINITY {
            return;
        }
        if t == f64::INFINITY || self.max == f64::INFINITY {
            self.max = f64::INFINITY;
            return;
        }
        if t <= self.max {
            self.scaled_sum += (t - self.max).exp();
        } else {
            self.scaled_sum = self.scaled_sum * (self.max - t).exp() + 1.0;
            self.max = t;
        }
    }

    pub fn total(&self) -> ExtReal {
        if self.max == f64::NEG_INFINITY || self.max == f64::INFINITY {
            ExtReal(self.max)
        } else {
            ExtReal(self.max + self.scaled_sum.ln())
        }
    }
}

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if self.is_pos_inf() {
            serializer.serialize_str("+inf")
        } else if self.is_neg_inf() {
            serializer.serialize_str("-inf")
        } else {
            serializer.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct ExtVisitor;

        impl Visitor<'_> for ExtVisitor {
            type Value = ExtReal;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a finite number or one of \"+inf\", \"-inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<ExtReal, E> {
                if v.is_finite() {
                    Ok(ExtReal(v))
                } else {
                    Err(E::custom("non-finite numbers must be written as strings"))
                }
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<ExtReal, E> {
                Ok(ExtReal(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<ExtReal, E> {
                Ok(ExtReal(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<ExtReal, E> {
                match v {
                    "+inf" => Ok(ExtReal::POS_INF),
                    "-inf" => Ok(ExtReal::NEG_INF),
                    other => Err(E::invalid_value(de::Unexpected::Str(other), &self)),
                }
            }
        }

        deserializer.deserialize_any(ExtVisitor)
    }
}
