//! Scalar types for the series recursion.
//!
//! The recursion's intermediate series can have coefficients that grow
//! geometrically while the final coefficients stay bounded, so everything
//! cancels. Doubles lose the race once the intermediates pass ~2^50; the
//! [`Dyadic`] scalar keeps going: a complex number `(re + i im) * 2^{-shift}`
//! with big-integer parts and a fixed binary shift chosen per computation.
//! Every operation rounds to the shared shift, so the absolute rounding
//! error per operation is one ulp (`2^{-shift}`) regardless of magnitude.

use num::bigint::BigInt;
use num::complex::Complex64;
use num::{Signed, Zero};

/// Arithmetic interface the series engine needs.
pub trait SeriesScalar: Clone + Send + Sync {
    /// A new scalar with the same precision context as `self`.
    fn lift(&self, re: f64) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn div(&self, other: &Self) -> Self;
    fn to_complex64(&self) -> Complex64;
    /// Rough upper estimate of the magnitude, for noise accounting.
    fn mag_upper(&self) -> f64;
}

impl SeriesScalar for Complex64 {
    fn lift(&self, re: f64) -> Self {
        Complex64::new(re, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn div(&self, other: &Self) -> Self {
        self / other
    }
    fn to_complex64(&self) -> Complex64 {
        *self
    }
    fn mag_upper(&self) -> f64 {
        self.re.abs() + self.im.abs()
    }
}

/// Fixed-point complex number `(re + i im) * 2^{-shift}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dyadic {
    re: BigInt,
    im: BigInt,
    shift: u32,
}

impl Dyadic {
    pub fn zero(shift: u32) -> Self {
        Dyadic {
            re: BigInt::zero(),
            im: BigInt::zero(),
            shift,
        }
    }

    pub fn from_f64(x: f64, shift: u32) -> Self {
        Dyadic {
            re: scaled_bigint(x, shift),
            im: BigInt::zero(),
            shift,
        }
    }

    pub fn shift(&self) -> u32 {
        self.shift
    }
}

/// Exact `round(x * 2^shift)` for finite doubles.
fn scaled_bigint(x: f64, shift: u32) -> BigInt {
    if x == 0.0 || !x.is_finite() {
        return BigInt::zero();
    }
    let bits = x.to_bits();
    let sign = if bits >> 63 == 1 { -1 } else { 1 };
    let biased = ((bits >> 52) & 0x7ff) as i64;
    let (mantissa, exponent) = if biased == 0 {
        (bits & ((1u64 << 52) - 1), -1074i64)
    } else {
        ((bits & ((1u64 << 52) - 1)) | (1u64 << 52), biased - 1075)
    };
    let total = exponent + shift as i64;
    let mut v = BigInt::from(mantissa);
    if total >= 0 {
        v <<= total as usize;
    } else {
        let down = (-total) as usize;
        // round to nearest on the way down
        v += BigInt::from(1) << (down - 1);
        v >>= down;
    }
    v * sign
}

/// `x * 2^{-shift}` as a double, exponent handled outside the f64 range.
fn scaled_to_f64(x: &BigInt, shift: u32) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    let bits = x.bits();
    if bits <= 960 {
        let approx = x.to_string().parse::<f64>().unwrap_or(0.0);
        return approx * 2f64.powi(-(shift as i32));
    }
    // take the top 64 bits and account for the rest in the exponent
    let drop = (bits - 64) as i64;
    let top: BigInt = x >> (drop as usize);
    let approx = top.to_string().parse::<f64>().unwrap_or(0.0);
    approx * 2f64.powi((drop - shift as i64).clamp(i32::MIN as i64, i32::MAX as i64) as i32)
}

fn rounding_shr(x: BigInt, shift: u32) -> BigInt {
    // plain floor shift; the guard bits in the chosen shift absorb the bias
    x >> (shift as usize)
}

impl SeriesScalar for Dyadic {
    fn lift(&self, re: f64) -> Self {
        Dyadic::from_f64(re, self.shift)
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.shift, other.shift);
        Dyadic {
            re: &self.re + &other.re,
            im: &self.im + &other.im,
            shift: self.shift,
        }
    }

    fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.shift, other.shift);
        Dyadic {
            re: &self.re - &other.re,
            im: &self.im - &other.im,
            shift: self.shift,
        }
    }

    fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.shift, other.shift);
        let re = &self.re * &other.re - &self.im * &other.im;
        let im = &self.re * &other.im + &self.im * &other.re;
        Dyadic {
            re: rounding_shr(re, self.shift),
            im: rounding_shr(im, self.shift),
            shift: self.shift,
        }
    }

    fn div(&self, other: &Self) -> Self {
        debug_assert_eq!(self.shift, other.shift);
        // a / b = a conj(b) / |b|^2; numerators carry shift 2s, |b|^2 too,
        // so the quotient is dimensionless and gets scaled back up to s
        let norm = &other.re * &other.re + &other.im * &other.im;
        assert!(!norm.is_zero(), "dyadic division by zero");
        let num_re = (&self.re * &other.re + &self.im * &other.im) << (self.shift as usize);
        let num_im = (&self.im * &other.re - &self.re * &other.im) << (self.shift as usize);
        Dyadic {
            re: num_re / &norm,
            im: num_im / &norm,
            shift: self.shift,
        }
    }

    fn to_complex64(&self) -> Complex64 {
        Complex64::new(
            scaled_to_f64(&self.re, self.shift),
            scaled_to_f64(&self.im, self.shift),
        )
    }

    fn mag_upper(&self) -> f64 {
        scaled_to_f64(&self.re.abs(), self.shift) + scaled_to_f64(&self.im.abs(), self.shift)
    }
}
