use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arithmetic backend for fields and solves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NumericMode {
    /// Arbitrary-precision rationals; results are bit-identical across runs.
    Exact,
    /// binary64 with banded elimination.
    Float,
}

impl NumericMode {
    pub const ENV_VAR: &'static str = "TWOENDED_MODE";

    /// Reads [`Self::ENV_VAR`], if set.
    pub fn from_env() -> Result<Option<Self>> {
        match std::env::var(Self::ENV_VAR) {
            Ok(v) => v.parse().map(Some),
            Err(_) => Ok(None),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            NumericMode::Exact => "exact",
            NumericMode::Float => "float",
        }
    }
}

impl FromStr for NumericMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "exact" => Ok(NumericMode::Exact),
            "float" => Ok(NumericMode::Float),
            other => Err(Error::Parse(format!("unknown numeric mode `{other}`"))),
        }
    }
}

/// A field element usable by the solvers: exact rationals or `f64`.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + PartialOrd
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    const MODE: NumericMode;

    fn from_i64(v: i64) -> Self;

    /// Exact for rationals: the binary value of `v` is converted without rounding.
    fn from_f64(v: f64) -> Self;

    fn to_f64(&self) -> f64;

    fn abs(&self) -> Self;

    /// Default zero-test tolerance: 0 for exact arithmetic, `1e-10` for floats.
    fn tolerance() -> Self;

    /// `"p/q"` for rationals, shortest round-trip decimal for floats.
    fn to_text(&self) -> String;

    fn to_json(&self) -> serde_json::Value;

    fn is_negligible(&self, tol: &Self) -> bool {
        self.abs() <= *tol
    }
}

impl Scalar for f64 {
    const MODE: NumericMode = NumericMode::Float;

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn from_f64(v: f64) -> Self {
        v
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn abs(&self) -> Self {
        f64::abs(*self)
    }

    fn tolerance() -> Self {
        1e-10
    }

    fn to_text(&self) -> String {
        format!("{self:?}")
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::json!(*self)
    }
}

impl Scalar for BigRational {
    const MODE: NumericMode = NumericMode::Exact;

    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn from_f64(v: f64) -> Self {
        BigRational::from_float(v).expect("finite float")
    }

    fn to_f64(&self) -> f64 {
        // Direct conversion overflows for huge numerators/denominators, so
        // scale both down to ~64 significant bits first.
        if let Some(v) = self.to_f64_direct() {
            return v;
        }
        let num = self.numer();
        let den = self.denom();
        let shift = num.bits().max(den.bits()).saturating_sub(1000);
        let n = (num >> shift).to_f64().unwrap_or(f64::NAN);
        let d = (den >> shift).to_f64().unwrap_or(f64::NAN);
        n / d
    }

    fn abs(&self) -> Self {
        Signed::abs(self)
    }

    fn tolerance() -> Self {
        BigRational::zero()
    }

    fn to_text(&self) -> String {
        format!("{}/{}", self.numer(), self.denom())
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::String(self.to_text())
    }
}

trait DirectF64 {
    fn to_f64_direct(&self) -> Option<f64>;
}

impl DirectF64 for BigRational {
    fn to_f64_direct(&self) -> Option<f64> {
        let n = self.numer().to_f64()?;
        let d = self.denom().to_f64()?;
        let v = n / d;
        v.is_finite().then_some(v)
    }
}

/// Parses `"p/q"` or an integer into a rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let parse_int = |t: &str| {
        t.trim()
            .parse::<BigInt>()
            .map_err(|e| Error::Parse(format!("bad rational `{s}`: {e}")))
    };
    match s.split_once('/') {
        Some((p, q)) => {
            let q = parse_int(q)?;
            if q.is_zero() {
                return Err(Error::Parse(format!("zero denominator in `{s}`")));
            }
            Ok(BigRational::new(parse_int(p)?, q))
        }
        None => Ok(BigRational::from_integer(parse_int(s)?)),
    }
}

pub fn rational(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}
