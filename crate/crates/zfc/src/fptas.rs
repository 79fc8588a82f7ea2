//! The main approximation algorithm: the partition function as a
//! telescoping product of edge-deletion ratios, each ratio approximated by
//! a truncated Taylor series computed on three self-avoiding-walk trees.
//!
//! For the edge `e_i = (u,v)` on the prefix graph `G_i` the ratio is
//! assembled from three pinned marginal-ratio series,
//!
//! ```text
//! P = 1 - (1 - 1/beta) (R1 R2 + 1) / (R1 R2 + 1 + R3 + R2)
//! R1 = R_{G_i,v}^{u+}, R2 = R_{G_i,u}^{v-}, R3 = R_{G_i,v}^{u-}
//! ```
//!
//! which forces the constant term `P(0) = 1/beta`. The truncation degree is
//! chosen adaptively: the closed-form degree of the analysis depends on
//! non-constructive compactness constants, so the implementation doubles the
//! degree until evaluation stabilizes to within `eps/(8m)` per edge.

use num::complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, Pinning, Spin};
use crate::sawtree::saw_ratio_gseries;
use crate::scalar::Dyadic;
use crate::series::TruncatedSeries;

/// Ratios with magnitude at or below this trip the near-zero guard.
const RATIO_EPS: f64 = 1e-12;

/// Options for [`approx_z_with`].
#[derive(Debug, Clone)]
pub struct ApproxOptions {
    /// Fixed truncation degree; skips the adaptive loop.
    pub k_override: Option<usize>,
    /// First candidate degree of the doubling schedule.
    pub k_start: usize,
    /// Largest degree the adaptive loop may return.
    pub k_max: usize,
    /// Keep the per-edge ratio values in the result.
    pub keep_ratios: bool,
    /// Skip the certified-region checks (`beta > 1`, `|lambda| < 1`,
    /// `epsilon < 1`); outside the region nothing is guaranteed and the
    /// numeric guards are the only safety net.
    pub allow_outside_region: bool,
}

impl Default for ApproxOptions {
    fn default() -> Self {
        ApproxOptions {
            k_override: None,
            k_start: 8,
            k_max: 96,
            keep_ratios: false,
            allow_outside_region: false,
        }
    }
}

/// One round of the adaptive truncation loop.
#[derive(Debug, Clone, Serialize)]
pub struct AdaptiveStep {
    pub k_from: usize,
    pub k_to: usize,
    pub worst_relative_change: f64,
    pub worst_edge: usize,
}

/// Output of [`approx_z`].
#[derive(Debug, Clone, Serialize)]
pub struct ApproxResult {
    pub z_estimate_re: f64,
    pub z_estimate_im: f64,
    pub k_used: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_edge_ratios: Option<Vec<(f64, f64)>>,
    pub adaptive_trace: Vec<AdaptiveStep>,
}

impl ApproxResult {
    pub fn z_estimate(&self) -> Complex64 {
        Complex64::new(self.z_estimate_re, self.z_estimate_im)
    }
}

/// Default absolute coefficient tolerance for standalone series queries.
const SERIES_ABS_TOL: f64 = 1e-10;

/// Largest dyadic precision the escalation loop will try.
const MAX_PRECISION_BITS: u32 = 8192;

/// Truncated Taylor series of the edge-deletion ratio `Z_{g-e}/Z_g` in the
/// uniform field variable, to degree `k`, computed on the self-avoiding-walk
/// trees of `g`. The constant term equals `1/beta`. Precision escalates
/// automatically when double arithmetic cannot deliver the coefficients.
pub fn edge_ratio_series(g: &Graph, beta: f64, e: usize, k: usize) -> Result<TruncatedSeries> {
    edge_ratio_series_with(g, beta, e, k, SERIES_ABS_TOL)
}

/// The recursion's intermediate coefficients grow geometrically while the
/// output stays bounded, so the usable precision is dictated by the largest
/// intermediate. A double pass runs first and reports that magnitude; when
/// the implied noise exceeds `abs_tol`, the computation reruns on the
/// dyadic big-integer scalar with enough bits, doubling until its own noise
/// bound clears the tolerance.
pub fn edge_ratio_series_with(
    g: &Graph,
    beta: f64,
    e: usize,
    k: usize,
    abs_tol: f64,
) -> Result<TruncatedSeries> {
    if !(beta > 1.0) {
        return Err(Error::Domain(format!(
            "edge activity {beta} must exceed 1 for the ratio recursion"
        )));
    }
    if k < 1 {
        return Err(Error::Argument("truncation degree must be at least 1".into()));
    }
    g.edge(e)?;
    let mut mag = 0.0f64;
    let series = assemble_ratio(g, beta, e, k, &Complex64::new(0.0, 0.0), &mut mag)?;
    let ops = k as f64 + 1.0;
    let noise = mag * ops * 2f64.powi(-48);
    if noise.is_finite() && noise <= abs_tol {
        return Ok(series.to_truncated());
    }
    let mut bits: u32 = if mag.is_finite() {
        (mag.log2().max(0.0).ceil() as u32)
            .saturating_add((-abs_tol.log2()).max(0.0).ceil() as u32)
            .saturating_add(64)
    } else {
        1024
    };
    loop {
        bits = bits.min(MAX_PRECISION_BITS);
        let mut mag_hp = 0.0f64;
        let series = assemble_ratio(g, beta, e, k, &Dyadic::zero(bits), &mut mag_hp)?;
        let noise = mag_hp * ops * 2f64.powi(-(bits as i32) + 2);
        if noise.is_finite() && noise <= abs_tol {
            return Ok(series.to_truncated());
        }
        if bits >= MAX_PRECISION_BITS {
            return Err(Error::Numeric(format!(
                "edge {e}: intermediate magnitude {mag_hp:.2e} defeats {bits} bits of precision"
            )));
        }
        bits = bits.saturating_mul(2);
    }
}

/// Three pinned ratio series combined into the edge-deletion ratio, over
/// any scalar.
fn assemble_ratio<S: crate::scalar::SeriesScalar>(
    g: &Graph,
    beta: f64,
    e: usize,
    k: usize,
    proto: &S,
    max_mag: &mut f64,
) -> Result<crate::series::engine::GSeries<S>> {
    let (u, v) = g.edge(e)?;
    let pin = |w: usize, s: Spin| {
        let mut p = Pinning::new();
        p.insert(w, s);
        p
    };
    let r1 = saw_ratio_gseries(g, v, &pin(u, Spin::Plus), beta, k, proto, max_mag)?;
    let r2 = saw_ratio_gseries(g, u, &pin(v, Spin::Minus), beta, k, proto, max_mag)?;
    let r3 = saw_ratio_gseries(g, v, &pin(u, Spin::Minus), beta, k, proto, max_mag)?;

    let numerator = r1.mul(&r2).add_constant_f64(1.0);
    let denominator = numerator.add(&r3).add(&r2);
    *max_mag = max_mag.max(numerator.max_mag()).max(denominator.max_mag());
    let quotient = numerator.mul(&denominator.recip());
    *max_mag = max_mag.max(quotient.max_mag());
    Ok(quotient.scale_f64(-(1.0 - 1.0 / beta)).add_constant_f64(1.0))
}

/// Per-edge ratio series on the telescoping prefix graphs `G_1..G_m` at a
/// common degree bound. Edge `i` of the telescoping is the last edge of its
/// prefix. Computed in parallel, collected in edge order.
fn prefix_ratio_series(
    g: &Graph,
    beta: f64,
    k: usize,
    abs_tol: f64,
) -> Result<Vec<TruncatedSeries>> {
    (1..=g.edge_count())
        .into_par_iter()
        .map(|i| {
            let prefix = g.edge_prefix(i);
            edge_ratio_series_with(&prefix, beta, i - 1, k, abs_tol)
        })
        .collect()
}

/// Smallest degree of the doubling schedule at which every prefix edge ratio
/// stabilizes, returning the doubled degree that witnessed stabilization.
pub fn choose_truncation(g: &Graph, beta: f64, lambda: Complex64, epsilon: f64) -> Result<usize> {
    let opts = ApproxOptions::default();
    Ok(adaptive_series(g, beta, lambda, epsilon, &opts)?.0)
}

/// Absolute coefficient tolerance matching a per-edge relative threshold:
/// ratio values live on the `1/beta` scale, and a factor of 20 keeps the
/// noise well under the stabilization test it feeds.
fn coefficient_tolerance(threshold: f64, beta: f64) -> f64 {
    threshold / (beta * 20.0)
}

fn adaptive_series(
    g: &Graph,
    beta: f64,
    lambda: Complex64,
    epsilon: f64,
    opts: &ApproxOptions,
) -> Result<(usize, Vec<TruncatedSeries>, Vec<AdaptiveStep>)> {
    let m = g.edge_count();
    let threshold = epsilon / (8.0 * m.max(1) as f64);
    let abs_tol = coefficient_tolerance(threshold, beta);
    let mut k = opts.k_start;
    let mut series = prefix_ratio_series(g, beta, k, abs_tol)?;
    let mut trace = Vec::new();
    loop {
        let k_next = (2 * k).min(opts.k_max);
        let next = prefix_ratio_series(g, beta, k_next, abs_tol)?;
        let mut worst = 0.0f64;
        let mut worst_edge = 0;
        for (i, (a, b)) in series.iter().zip(&next).enumerate() {
            let va = a.eval(lambda);
            let vb = b.eval(lambda);
            let rel = (vb - va).norm() / va.norm().max(f64::MIN_POSITIVE);
            if rel > worst {
                worst = rel;
                worst_edge = i;
            }
        }
        trace.push(AdaptiveStep {
            k_from: k,
            k_to: k_next,
            worst_relative_change: worst,
            worst_edge,
        });
        if worst <= threshold {
            return Ok((k_next, next, trace));
        }
        if k_next >= opts.k_max {
            return Err(Error::Convergence {
                k_max: opts.k_max,
                worst_edge,
                relative_change: worst,
            });
        }
        k = k_next;
        series = next;
    }
}

/// Approximates `Z_g(beta, lambda)` to relative error `epsilon` by the
/// telescoping product of truncated edge-deletion-ratio series.
pub fn approx_z(
    g: &Graph,
    beta: f64,
    lambda: Complex64,
    epsilon: f64,
    k_override: Option<usize>,
) -> Result<ApproxResult> {
    approx_z_with(
        g,
        beta,
        lambda,
        epsilon,
        &ApproxOptions {
            k_override,
            ..ApproxOptions::default()
        },
    )
}

pub fn approx_z_with(
    g: &Graph,
    beta: f64,
    lambda: Complex64,
    epsilon: f64,
    opts: &ApproxOptions,
) -> Result<ApproxResult> {
    if opts.allow_outside_region {
        if !(beta > 0.0) {
            return Err(Error::Domain(format!("edge activity {beta} must be positive")));
        }
        if !(epsilon > 0.0) {
            return Err(Error::Domain(format!("epsilon {epsilon} must be positive")));
        }
    } else {
        if !(beta > 1.0) {
            return Err(Error::Domain(format!("edge activity {beta} must exceed 1")));
        }
        if lambda.norm() >= 1.0 {
            return Err(Error::Domain(format!(
                "field magnitude {} is outside the open unit disk",
                lambda.norm()
            )));
        }
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::Domain(format!("epsilon {epsilon} outside (0,1)")));
        }
    }

    let (k_used, series, trace) = match opts.k_override {
        Some(k) => {
            if k < 1 {
                return Err(Error::Argument("truncation degree must be at least 1".into()));
            }
            let threshold = epsilon / (8.0 * g.edge_count().max(1) as f64);
            let abs_tol = coefficient_tolerance(threshold, beta);
            (k, prefix_ratio_series(g, beta, k, abs_tol)?, Vec::new())
        }
        None => adaptive_series(g, beta, lambda, epsilon, opts)?,
    };

    let mut ratios = Vec::with_capacity(series.len());
    for (i, s) in series.iter().enumerate() {
        let value = s.eval(lambda);
        if value.norm() <= RATIO_EPS {
            return Err(Error::Numeric(format!(
                "edge {i}: truncated ratio evaluates to {value}, too close to zero to divide by"
            )));
        }
        ratios.push(value);
    }

    // (1 + lambda)^{|V|} by repeated multiplication
    let mut z = Complex64::new(1.0, 0.0);
    let base = Complex64::new(1.0, 0.0) + lambda;
    for _ in 0..g.vertex_count() {
        z *= base;
    }
    for &r in &ratios {
        z /= r;
    }

    Ok(ApproxResult {
        z_estimate_re: z.re,
        z_estimate_im: z.im,
        k_used,
        per_edge_ratios: opts
            .keep_ratios
            .then(|| ratios.iter().map(|r| (r.re, r.im)).collect()),
        adaptive_trace: trace,
    })
}
