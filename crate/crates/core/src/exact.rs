//! Exact rational evaluation of bound expressions.
//!
//! Inputs are read back from their shortest decimal representation, so
//! `0.05` becomes `1/20` rather than the nearest binary fraction. Any
//! intermediate overflow yields `None`.

use alloc::format;
use alloc::string::String;
use core::fmt;

use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, Zero};

use crate::model::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Exact(Ratio<i128>);

impl Exact {
    pub fn from_int(n: i128) -> Self {
        Exact(Ratio::from_integer(n))
    }

    /// Parses the shortest round-trip decimal form of `x`.
    pub fn from_f64(x: f64) -> Option<Self> {
        if !x.is_finite() {
            return None;
        }
        let text = format!("{x}");
        let (neg, digits) = match text.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, text.as_str()),
        };
        let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
        let mut numer: i128 = 0;
        for ch in int_part.bytes().chain(frac_part.bytes()) {
            let d = (ch as char).to_digit(10)? as i128;
            numer = numer.checked_mul(10)?.checked_add(d)?;
        }
        let denom = 10i128.checked_pow(u32::try_from(frac_part.len()).ok()?)?;
        let numer = if neg { -numer } else { numer };
        Some(Exact(Ratio::new(numer, denom)))
    }

    pub fn numer(&self) -> i128 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i128 {
        *self.0.denom()
    }

    pub fn to_f64(&self) -> f64 {
        self.numer() as f64 / self.denom() as f64
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn checked_add(self, o: Exact) -> Option<Exact> {
        self.0.checked_add(&o.0).map(Exact)
    }

    pub fn checked_sub(self, o: Exact) -> Option<Exact> {
        self.0.checked_sub(&o.0).map(Exact)
    }

    pub fn checked_mul(self, o: Exact) -> Option<Exact> {
        self.0.checked_mul(&o.0).map(Exact)
    }

    pub fn checked_div(self, o: Exact) -> Option<Exact> {
        if o.is_zero() {
            return None;
        }
        self.0.checked_div(&o.0).map(Exact)
    }

    pub fn recip(self) -> Option<Exact> {
        Exact::from_int(1).checked_div(self)
    }

    pub fn to_string_ratio(&self) -> String {
        format!("{self}")
    }
}

impl core::ops::Neg for Exact {
    type Output = Exact;

    fn neg(self) -> Exact {
        Exact(-self.0)
    }
}

impl fmt::Display for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom() == 1 {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

/// Exact counterparts of the model constants and the derived quantities.
#[derive(Debug, Clone, Copy)]
pub struct ExactParams {
    pub r: Exact,
    pub k: Exact,
    pub alpha: Exact,
    pub gamma: Exact,
    pub c: Exact,
}

impl ExactParams {
    pub fn from_params(p: &ModelParams) -> Option<Self> {
        Some(Self {
            r: Exact::from_f64(p.r())?,
            k: Exact::from_f64(p.k())?,
            alpha: Exact::from_f64(p.alpha())?,
            gamma: Exact::from_f64(p.gamma())?,
            c: Exact::from_f64(p.c())?,
        })
    }

    pub fn beta_k(&self) -> Option<Exact> {
        self.alpha.checked_mul(self.gamma)?.checked_mul(self.k)
    }

    pub fn theta(&self) -> Option<Exact> {
        self.beta_k()?.checked_sub(self.c)
    }

    pub fn neg_trace(&self) -> Option<Exact> {
        self.r.checked_mul(self.c)?.checked_div(self.beta_k()?)
    }

    pub fn det(&self) -> Option<Exact> {
        self.theta()?.checked_mul(self.neg_trace()?)
    }
}
