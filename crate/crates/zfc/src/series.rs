//! Truncated complex power-series arithmetic, the numeric substrate of the
//! approximation algorithm.
//!
//! A [`TruncatedSeries`] with degree bound `m` stores exactly the
//! coefficients `a_0..a_m` of a formal power series modulo `z^{m+1}`.
//! Multiplication is the schoolbook Cauchy product: at the tens of
//! coefficients the algorithm actually needs, it is exactly reproducible and
//! there is nothing to gain from a transform-based product. Division runs a
//! Newton iteration on the reciprocal, falling back to forward substitution
//! at small bounds.

use num::complex::Complex64;

use crate::error::{Error, Result};

/// Magnitude below which a constant term counts as vanishing for division.
pub const DIV_EPS: f64 = 1e-300;

/// Bound below which division uses plain forward substitution.
const NEWTON_CUTOFF: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries {
    coeffs: Vec<Complex64>,
}

impl TruncatedSeries {
    /// Builds a series from coefficients `a_0..a_m`; the degree bound is
    /// `coeffs.len() - 1`.
    pub fn from_coeffs(coeffs: Vec<Complex64>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least a_0");
        TruncatedSeries { coeffs }
    }

    pub fn zero(bound: usize) -> Self {
        TruncatedSeries {
            coeffs: vec![Complex64::new(0.0, 0.0); bound + 1],
        }
    }

    pub fn constant(value: Complex64, bound: usize) -> Self {
        let mut s = Self::zero(bound);
        s.coeffs[0] = value;
        s
    }

    pub fn bound(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs
            .get(k)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Drops to a smaller degree bound.
    pub fn truncate(&self, bound: usize) -> Self {
        assert!(bound <= self.bound());
        TruncatedSeries {
            coeffs: self.coeffs[..=bound].to_vec(),
        }
    }

    fn check_bound(&self, other: &Self) -> Result<()> {
        if self.bound() != other.bound() {
            return Err(Error::Argument(format!(
                "degree bounds differ: {} vs {}",
                self.bound(),
                other.bound()
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_bound(other)?;
        Ok(TruncatedSeries {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_bound(other)?;
        Ok(TruncatedSeries {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn scale(&self, k: Complex64) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|a| a * k).collect(),
        }
    }

    /// Adds a constant to the coefficient of `z^0`.
    pub fn add_constant(&self, k: Complex64) -> Self {
        let mut out = self.clone();
        out.coeffs[0] += k;
        out
    }

    /// Cauchy product truncated at the shared bound.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_bound(other)?;
        Ok(TruncatedSeries {
            coeffs: mul_trunc(&self.coeffs, &other.coeffs, self.bound()),
        })
    }

    /// Truncated quotient: the series `h` with `h * g = f mod z^{m+1}`.
    /// Requires `|g(0)|` above [`DIV_EPS`].
    pub fn div(&self, other: &Self) -> Result<Self> {
        self.check_bound(other)?;
        let recip = other.reciprocal()?;
        self.mul(&recip)
    }

    /// Truncated reciprocal by Newton iteration, doubling the covered length
    /// per step; forward substitution below [`NEWTON_CUTOFF`].
    pub fn reciprocal(&self) -> Result<Self> {
        let g0 = self.coeffs[0];
        if g0.norm() <= DIV_EPS {
            return Err(Error::SeriesDivision(format!(
                "constant term {g0} of divisor with bound {}",
                self.bound()
            )));
        }
        let m = self.bound();
        if m < NEWTON_CUTOFF {
            return Ok(TruncatedSeries {
                coeffs: recip_forward(&self.coeffs),
            });
        }
        // Newton: r <- r (2 - g r), doubling precision each round.
        let mut len = NEWTON_CUTOFF;
        let mut r = recip_forward(&self.coeffs[..len]);
        while len <= m {
            len = (2 * len).min(m + 1);
            let g = &self.coeffs[..len];
            let gr = mul_trunc(g, &r, len - 1);
            let mut two_minus = gr.iter().map(|c| -c).collect::<Vec<_>>();
            two_minus[0] += 2.0;
            r = mul_trunc(&r, &two_minus, len - 1);
            if len == m + 1 {
                break;
            }
        }
        Ok(TruncatedSeries { coeffs: r })
    }

    /// Multiplication by the variable: shifts coefficients up one degree and
    /// keeps the bound, dropping the old top coefficient.
    pub fn shift_up(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        coeffs.push(Complex64::new(0.0, 0.0));
        coeffs.extend_from_slice(&self.coeffs[..self.coeffs.len() - 1]);
        TruncatedSeries { coeffs }
    }

    /// Multiplication by the variable, growing the bound by one so no
    /// coefficient is lost.
    pub fn shift_up_grow(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(Complex64::new(0.0, 0.0));
        coeffs.extend_from_slice(&self.coeffs);
        TruncatedSeries { coeffs }
    }

    /// Horner evaluation of the truncated polynomial.
    pub fn eval(&self, z0: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * z0 + c;
        }
        acc
    }

    pub fn max_coeff_distance(&self, other: &Self) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Minimal truncated-series arithmetic over a generic scalar, for the
/// recursion internals. The public [`TruncatedSeries`] stays double
/// precision; this engine exists because the recursion's intermediate
/// coefficients can outgrow doubles while the final ones stay small.
pub(crate) mod engine {
    use crate::scalar::SeriesScalar;

    #[derive(Clone)]
    pub struct GSeries<S> {
        pub coeffs: Vec<S>,
    }

    impl<S: SeriesScalar> GSeries<S> {
        pub fn constant(proto: &S, value: f64, bound: usize) -> Self {
            let mut coeffs = vec![proto.lift(0.0); bound + 1];
            coeffs[0] = proto.lift(value);
            GSeries { coeffs }
        }

        pub fn bound(&self) -> usize {
            self.coeffs.len() - 1
        }

        pub fn scale_f64(&self, factor: f64) -> Self {
            let f = self.coeffs[0].lift(factor);
            GSeries {
                coeffs: self.coeffs.iter().map(|c| c.mul(&f)).collect(),
            }
        }

        pub fn add(&self, other: &Self) -> Self {
            debug_assert_eq!(self.bound(), other.bound());
            GSeries {
                coeffs: self
                    .coeffs
                    .iter()
                    .zip(&other.coeffs)
                    .map(|(a, b)| a.add(b))
                    .collect(),
            }
        }

        pub fn add_constant_f64(mut self, value: f64) -> Self {
            let v = self.coeffs[0].lift(value);
            self.coeffs[0] = self.coeffs[0].add(&v);
            self
        }

        /// Cauchy product truncated at the shared bound.
        pub fn mul(&self, other: &Self) -> Self {
            debug_assert_eq!(self.bound(), other.bound());
            let bound = self.bound();
            let zero = self.coeffs[0].lift(0.0);
            let mut out = vec![zero; bound + 1];
            for (i, a) in self.coeffs.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for (j, b) in other.coeffs.iter().enumerate().take(bound + 1 - i) {
                    if !b.is_zero() {
                        out[i + j] = out[i + j].add(&a.mul(b));
                    }
                }
            }
            GSeries { coeffs: out }
        }

        /// Truncated reciprocal by forward substitution; the constant term
        /// must be nonzero (the recursion guarantees it is `beta >= 1`).
        pub fn recip(&self) -> Self {
            let g0 = &self.coeffs[0];
            assert!(!g0.is_zero(), "reciprocal of a series vanishing at 0");
            let one = g0.lift(1.0);
            let mut out = Vec::with_capacity(self.coeffs.len());
            out.push(one.div(g0));
            for j in 1..self.coeffs.len() {
                let mut s = self.coeffs[0].lift(0.0);
                for i in 1..=j {
                    if !self.coeffs[i].is_zero() {
                        s = s.add(&self.coeffs[i].mul(&out[j - i]));
                    }
                }
                out.push(s.lift(0.0).sub(&s).div(g0));
            }
            GSeries { coeffs: out }
        }

        /// Multiplication by the variable, growing the bound by one.
        pub fn shift_up_grow(&self) -> Self {
            let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
            coeffs.push(self.coeffs[0].lift(0.0));
            coeffs.extend(self.coeffs.iter().cloned());
            GSeries { coeffs }
        }

        pub fn max_mag(&self) -> f64 {
            self.coeffs.iter().map(SeriesScalar::mag_upper).fold(0.0, f64::max)
        }

        pub fn to_truncated(&self) -> super::TruncatedSeries {
            super::TruncatedSeries::from_coeffs(
                self.coeffs.iter().map(SeriesScalar::to_complex64).collect(),
            )
        }
    }
}

fn mul_trunc(a: &[Complex64], b: &[Complex64], bound: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); bound + 1];
    for (i, &ai) in a.iter().enumerate().take(bound + 1) {
        if ai.re == 0.0 && ai.im == 0.0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate().take(bound + 1 - i) {
            out[i + j] += ai * bj;
        }
    }
    out
}

fn recip_forward(g: &[Complex64]) -> Vec<Complex64> {
    let mut r = vec![Complex64::new(0.0, 0.0); g.len()];
    r[0] = 1.0 / g[0];
    for j in 1..g.len() {
        let mut s = Complex64::new(0.0, 0.0);
        for i in 1..=j {
            s += g[i] * r[j - i];
        }
        r[j] = -s / g[0];
    }
    r
}
