//! Exact polynomials with arbitrary-precision rational coefficients.
//!
//! These carry the coefficient sequences that the divisibility checkers
//! compare; everything here is exact, there are no tolerances.

use num::complex::Complex64;
use num::{BigRational, ToPrimitive, Zero};

/// A polynomial in one variable with `BigRational` coefficients. Trailing
/// zero coefficients are trimmed so `degree` is consistent; the zero
/// polynomial has an empty coefficient vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalPoly {
    coeffs: Vec<BigRational>,
}

impl RationalPoly {
    pub fn zero() -> Self {
        RationalPoly { coeffs: Vec::new() }
    }

    pub fn from_coeffs(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        RationalPoly { coeffs }
    }

    pub fn constant(c: BigRational) -> Self {
        Self::from_coeffs(vec![c])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree of the polynomial; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> BigRational {
        self.coeffs.get(k).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Index of the first nonzero coefficient; `None` for the zero
    /// polynomial (order infinity).
    pub fn order(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            out.push(self.coeff(k) + other.coeff(k));
        }
        Self::from_coeffs(out)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            out.push(self.coeff(k) - other.coeff(k));
        }
        Self::from_coeffs(out)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        Self::from_coeffs(out)
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Evaluation with coefficients promoted to complex doubles.
    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * z + Complex64::new(c.to_f64().unwrap_or(f64::NAN), 0.0);
        }
        acc
    }
}

/// Parses a rational from either `p/q` or a finite decimal like `-0.25`.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    use num::BigInt;
    use std::str::FromStr;
    let text = text.trim();
    if let Some((p, q)) = text.split_once('/') {
        let num = BigInt::from_str(p.trim()).ok()?;
        let den = BigInt::from_str(q.trim()).ok()?;
        if den.is_zero() {
            return None;
        }
        return Some(BigRational::new(num, den));
    }
    if let Some((int_part, frac_part)) = text.split_once('.') {
        let neg = int_part.starts_with('-');
        let int_digits = int_part.trim_start_matches(['-', '+']);
        let int = if int_digits.is_empty() {
            BigInt::zero()
        } else {
            BigInt::from_str(int_digits).ok()?
        };
        let frac = if frac_part.is_empty() {
            BigInt::zero()
        } else {
            BigInt::from_str(frac_part).ok()?
        };
        let scale = num::pow::pow(BigInt::from(10), frac_part.len());
        let mut value = BigRational::new(int * &scale + frac, scale);
        if neg {
            value = -value;
        }
        Some(value)
    } else {
        let num = BigInt::from_str(text).ok()?;
        Some(BigRational::from_integer(num))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::FromPrimitive;

    fn r(n: i64) -> BigRational {
        BigRational::from_i64(n).unwrap()
    }

    #[test]
    fn trims_and_reports_order() {
        let p = RationalPoly::from_coeffs(vec![r(0), r(0), r(3), r(0)]);
        assert_eq!(p.degree(), Some(2));
        assert_eq!(p.order(), Some(2));
        assert!(RationalPoly::zero().order().is_none());
    }

    #[test]
    fn arithmetic_and_eval() {
        let p = RationalPoly::from_coeffs(vec![r(1), r(2)]); // 1 + 2x
        let q = RationalPoly::from_coeffs(vec![r(3), r(-2)]); // 3 - 2x
        assert_eq!(p.add(&q).coeffs(), &[r(4)]);
        let prod = p.mul(&q); // 3 + 4x - 4x^2
        assert_eq!(prod.coeffs(), &[r(3), r(4), r(-4)]);
        assert_eq!(prod.eval(&r(2)), r(3 + 8 - 16));
    }

    #[test]
    fn parses_rationals() {
        assert_eq!(parse_rational("3/2").unwrap(), BigRational::new(3.into(), 2.into()));
        assert_eq!(parse_rational("0.25").unwrap(), BigRational::new(1.into(), 4.into()));
        assert_eq!(parse_rational("-1.5").unwrap(), BigRational::new((-3).into(), 2.into()));
        assert_eq!(parse_rational("7").unwrap(), r(7));
        assert!(parse_rational("1/0").is_none());
    }
}
