//! Empirical measurement of the spatial-mixing statements: scans that vary
//! boundary conditions at increasing distance from a probe and record how
//! fast the conditional ratios stop caring.
//!
//! Differences are computed with the exact oracle so the decay measurement
//! is not confounded by truncation error; instance sizes are capped
//! accordingly. The scans cannot prove a theorem, they measure consistency
//! with one: exponential decay shows up as a straight line in the log-diff
//! versus distance table, and [`fit_decay`] reports its slope as a rate.

use num::complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{exact_edge_ratio, exact_z};
use crate::graph::{EdgeActivity, Graph, IsingParams, PartialEvaluation, Pinning};
use crate::rc::{rc_edge_marginal, EdgePinning, MarginalRoute, RCParams};

/// Graph families the scans run on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum GraphFamily {
    Path { n: usize },
    Cycle { n: usize },
    /// 2 x rungs grid.
    Ladder { rungs: usize },
    /// Complete binary tree of the given depth.
    BinaryTree { depth: usize },
}

impl GraphFamily {
    pub fn build(&self) -> Result<Graph> {
        match *self {
            GraphFamily::Path { n } => {
                if n < 2 {
                    return Err(Error::Argument("path needs at least 2 vertices".into()));
                }
                Graph::new(n, (0..n - 1).map(|i| (i, i + 1)).collect())
            }
            GraphFamily::Cycle { n } => {
                if n < 3 {
                    return Err(Error::Argument("cycle needs at least 3 vertices".into()));
                }
                Graph::new(n, (0..n).map(|i| (i, (i + 1) % n)).collect())
            }
            GraphFamily::Ladder { rungs } => {
                if rungs < 2 {
                    return Err(Error::Argument("ladder needs at least 2 rungs".into()));
                }
                // vertices 2i (bottom) and 2i+1 (top); rung first, then rails
                let mut edges = Vec::new();
                for i in 0..rungs {
                    edges.push((2 * i, 2 * i + 1));
                    if i + 1 < rungs {
                        edges.push((2 * i, 2 * i + 2));
                        edges.push((2 * i + 1, 2 * i + 3));
                    }
                }
                Graph::new(2 * rungs, edges)
            }
            GraphFamily::BinaryTree { depth } => {
                let n = (1usize << (depth + 1)) - 1;
                let mut edges = Vec::new();
                for v in 1..n {
                    edges.push(((v - 1) / 2, v));
                }
                Graph::new(n, edges)
            }
        }
    }

    pub fn tag(&self) -> String {
        match *self {
            GraphFamily::Path { n } => format!("path-{n}"),
            GraphFamily::Cycle { n } => format!("cycle-{n}"),
            GraphFamily::Ladder { rungs } => format!("ladder-2x{rungs}"),
            GraphFamily::BinaryTree { depth } => format!("btree-{depth}"),
        }
    }
}

/// Which conditional quantity the scan probes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SsmModel {
    /// Edge-deletion ratio of the Ising model at probe edge 0.
    IsingEdge { beta: f64, lambda: Complex64 },
    /// Field-damped vertex ratio of the Ising model at probe vertex 0.
    IsingVertex { beta: f64, lambda: Complex64, c: f64 },
    /// Conditional unpicked-probability of the random cluster model.
    RcEdge { p: f64, lambda: f64 },
}

impl SsmModel {
    pub fn tag(&self) -> String {
        match *self {
            SsmModel::IsingEdge { beta, lambda } => {
                format!("ising-edge b={beta} l={:.3}{:+.3}i", lambda.re, lambda.im)
            }
            SsmModel::IsingVertex { beta, lambda, c } => {
                format!(
                    "ising-vertex b={beta} l={:.3}{:+.3}i c={c}",
                    lambda.re, lambda.im
                )
            }
            SsmModel::RcEdge { p, lambda } => format!("rc-edge p={p} l={lambda}"),
        }
    }
}

/// The boundary-pair shapes a scan draws from at each distance. Exhaustive
/// boundary enumeration is exponential; this is the worst over a small
/// deterministic catalog.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryShape {
    /// Change a single far element against the empty condition.
    SingleFar,
    /// Change every element at distance >= t against the empty condition.
    AllBeyond,
    /// Two conditions touching every far element with interleaved values.
    MixedOverride,
}

pub const DEFAULT_CATALOG: [BoundaryShape; 3] = [
    BoundaryShape::SingleFar,
    BoundaryShape::AllBeyond,
    BoundaryShape::MixedOverride,
];

#[derive(Debug, Clone, Serialize)]
pub struct DecayRow {
    pub distance: usize,
    pub max_abs_diff: f64,
    pub instance_count: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecayTable {
    pub rows: Vec<DecayRow>,
    pub model_tag: String,
    pub parameter_tag: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecayFit {
    pub log_c: f64,
    pub rate_r: f64,
    pub r_squared: f64,
}

/// Least-squares line through `(x, y)` points: slope, intercept, R^2.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = if sxx == 0.0 { 0.0 } else { sxy / sxx };
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let p = slope * x + intercept;
            (y - p) * (y - p)
        })
        .sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let r2 = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    (slope, intercept, r2)
}

/// Rows below this are double-precision noise and are dropped from fits.
pub const NOISE_FLOOR: f64 = 1e-15;

/// Fits `log(max_abs_diff) = log_c - t log(rate_r)` on the positive rows.
pub fn fit_decay(table: &DecayTable) -> Result<DecayFit> {
    let pts: Vec<(f64, f64)> = table
        .rows
        .iter()
        .filter(|r| r.max_abs_diff > NOISE_FLOOR)
        .map(|r| (r.distance as f64, r.max_abs_diff.ln()))
        .collect();
    if pts.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "{} positive rows, need at least 3",
            pts.len()
        )));
    }
    let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let (slope, intercept, r2) = linear_fit(&xs, &ys);
    Ok(DecayFit {
        log_c: intercept,
        rate_r: (-slope).exp(),
        r_squared: r2,
    })
}

/// The two conditions of one scan instance, as generic assignments
/// `element -> variant` with variant 0/1 mapped model-specifically.
struct BoundaryPair {
    a: Vec<(usize, u8)>,
    b: Vec<(usize, u8)>,
}

fn boundary_pairs(shape: BoundaryShape, far: &[usize]) -> Option<BoundaryPair> {
    if far.is_empty() {
        return None;
    }
    Some(match shape {
        BoundaryShape::SingleFar => BoundaryPair {
            a: vec![(far[0], 0)],
            b: Vec::new(),
        },
        BoundaryShape::AllBeyond => BoundaryPair {
            a: far.iter().map(|&f| (f, 0)).collect(),
            b: Vec::new(),
        },
        BoundaryShape::MixedOverride => BoundaryPair {
            a: far.iter().enumerate().map(|(i, &f)| (f, (i % 2) as u8)).collect(),
            b: far.iter().enumerate().map(|(i, &f)| (f, ((i + 1) % 2) as u8)).collect(),
        },
    })
}

/// Distance-resolved worst difference of the probed conditional quantity
/// over the boundary catalog. Rows for distances with no far elements are
/// omitted.
pub fn ssm_scan(
    family: GraphFamily,
    model: SsmModel,
    catalog: &[BoundaryShape],
    d_max: usize,
) -> Result<DecayTable> {
    let g = family.build()?;
    let rows: Vec<Result<Option<DecayRow>>> = (1..=d_max)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&t| scan_row(&g, model, catalog, t))
        .collect();
    let mut out = Vec::new();
    for row in rows {
        if let Some(r) = row? {
            out.push(r);
        }
    }
    Ok(DecayTable {
        rows: out,
        model_tag: model.tag(),
        parameter_tag: family.tag(),
    })
}

fn scan_row(
    g: &Graph,
    model: SsmModel,
    catalog: &[BoundaryShape],
    t: usize,
) -> Result<Option<DecayRow>> {
    let mut max_diff = 0.0f64;
    let mut count = 0usize;
    match model {
        SsmModel::IsingEdge { beta, lambda } => {
            let probe = 0usize;
            let params = IsingParams::uniform(g, beta, lambda);
            let far: Vec<usize> = (0..g.edge_count())
                .filter(|&f| f != probe)
                .filter(|&f| {
                    g.edge_distance(probe, &[f])
                        .ok()
                        .flatten()
                        .is_some_and(|d| d >= t)
                })
                .collect();
            // variant 0: delete (beta -> 1); variant 1: contract
            let to_eval = |assignment: &[(usize, u8)]| {
                let mut pe = PartialEvaluation::new();
                for &(f, variant) in assignment {
                    pe = pe.with_edge(
                        f,
                        if variant == 0 {
                            EdgeActivity::Finite(1.0)
                        } else {
                            EdgeActivity::Contract
                        },
                    );
                }
                pe
            };
            for &shape in catalog {
                let Some(pair) = boundary_pairs_at(shape, &far, t, |f| {
                    g.edge_distance(probe, &[f]).ok().flatten()
                }) else {
                    continue;
                };
                let ra =
                    exact_edge_ratio(g, &params, probe, EdgeActivity::Finite(1.0), &to_eval(&pair.a))?;
                let rb =
                    exact_edge_ratio(g, &params, probe, EdgeActivity::Finite(1.0), &to_eval(&pair.b))?;
                max_diff = max_diff.max((ra - rb).norm());
                count += 1;
            }
        }
        SsmModel::IsingVertex { beta, lambda, c } => {
            let probe = 0usize;
            let params = IsingParams::uniform(g, beta, lambda);
            let far: Vec<usize> = (1..g.vertex_count())
                .filter(|&u| {
                    g.vertex_set_distance(u, &[probe])
                        .ok()
                        .flatten()
                        .is_some_and(|d| d >= t)
                })
                .collect();
            // variant 0: damp to c*lambda; variant 1: damp to c/2*lambda
            let ratio = |assignment: &[(usize, u8)]| -> Result<Complex64> {
                let mut cond = PartialEvaluation::new();
                for &(u, variant) in assignment {
                    let factor = if variant == 0 { c } else { c / 2.0 };
                    cond = cond.with_vertex(u, lambda * factor);
                }
                let den = exact_z(g, &params, &cond, &Pinning::new())?;
                let with_probe = cond.clone().with_vertex(probe, lambda * c);
                let num = exact_z(g, &params, &with_probe, &Pinning::new())?;
                if den.norm() == 0.0 {
                    return Err(Error::Numeric("zero conditional partition function".into()));
                }
                Ok(num / den)
            };
            for &shape in catalog {
                let Some(pair) = boundary_pairs_at(shape, &far, t, |u| {
                    g.vertex_set_distance(u, &[probe]).ok().flatten()
                }) else {
                    continue;
                };
                let ra = ratio(&pair.a)?;
                let rb = ratio(&pair.b)?;
                max_diff = max_diff.max((ra - rb).norm());
                count += 1;
            }
        }
        SsmModel::RcEdge { p, lambda } => {
            let probe = 0usize;
            let rp = RCParams::uniform(g, p, lambda);
            let far: Vec<usize> = (0..g.edge_count())
                .filter(|&f| f != probe)
                .filter(|&f| {
                    g.edge_distance(probe, &[f])
                        .ok()
                        .flatten()
                        .is_some_and(|d| d >= t)
                })
                .collect();
            // variant 0: pinned out; variant 1: pinned in
            let marginal = |assignment: &[(usize, u8)]| -> Result<f64> {
                let mut cond = EdgePinning::new();
                for &(f, variant) in assignment {
                    cond.insert(f, variant == 1);
                }
                rc_edge_marginal(g, &rp, probe, &cond, MarginalRoute::Direct)
            };
            for &shape in catalog {
                let Some(pair) = boundary_pairs_at(shape, &far, t, |f| {
                    g.edge_distance(probe, &[f]).ok().flatten()
                }) else {
                    continue;
                };
                let ra = marginal(&pair.a)?;
                let rb = marginal(&pair.b)?;
                max_diff = max_diff.max((ra - rb).abs());
                count += 1;
            }
        }
    }
    Ok((count > 0).then_some(DecayRow {
        distance: t,
        max_abs_diff: max_diff,
        instance_count: count,
    }))
}

/// Shapes pick from the far set; `SingleFar` wants an element at distance
/// exactly `t` so the rows probe the advertised distance.
fn boundary_pairs_at(
    shape: BoundaryShape,
    far: &[usize],
    t: usize,
    dist: impl Fn(usize) -> Option<usize>,
) -> Option<BoundaryPair> {
    match shape {
        BoundaryShape::SingleFar => {
            let exact = far.iter().copied().find(|&f| dist(f) == Some(t))?;
            Some(BoundaryPair {
                a: vec![(exact, 0)],
                b: Vec::new(),
            })
        }
        _ => boundary_pairs(shape, far),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn synthetic_geometric_fit() {
        let table = DecayTable {
            rows: (1..=6)
                .map(|t| DecayRow {
                    distance: t,
                    max_abs_diff: 8.0 * 3.0f64.powi(-(t as i32)),
                    instance_count: 1,
                })
                .collect(),
            model_tag: "synthetic".into(),
            parameter_tag: "geometric".into(),
        };
        let fit = fit_decay(&table).unwrap();
        assert!((fit.rate_r - 3.0).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        assert!((fit.log_c - 8.0f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn constant_table_is_flagged_non_decaying() {
        let table = DecayTable {
            rows: (1..=5)
                .map(|t| DecayRow {
                    distance: t,
                    max_abs_diff: 0.25,
                    instance_count: 1,
                })
                .collect(),
            model_tag: "synthetic".into(),
            parameter_tag: "constant".into(),
        };
        let fit = fit_decay(&table).unwrap();
        assert!((fit.rate_r - 1.0).abs() < 1e-12);
    }

    #[test]
    fn too_few_rows_is_an_error() {
        let table = DecayTable {
            rows: vec![DecayRow {
                distance: 1,
                max_abs_diff: 0.5,
                instance_count: 1,
            }],
            model_tag: "x".into(),
            parameter_tag: "y".into(),
        };
        assert!(matches!(fit_decay(&table), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn zero_field_has_zero_differences() {
        let table = ssm_scan(
            GraphFamily::Path { n: 10 },
            SsmModel::IsingEdge {
                beta: 2.0,
                lambda: Complex64::new(0.0, 0.0),
            },
            &DEFAULT_CATALOG,
            5,
        )
        .unwrap();
        for row in &table.rows {
            assert!(row.max_abs_diff < 1e-14, "row {row:?}");
        }
    }

    #[test]
    fn path_scan_decays_geometrically() {
        let table = ssm_scan(
            GraphFamily::Path { n: 14 },
            SsmModel::IsingEdge {
                beta: 2.0,
                lambda: Complex64::new(0.5, 0.0),
            },
            &DEFAULT_CATALOG,
            8,
        )
        .unwrap();
        assert!(table.rows.len() >= 6);
        for w in table.rows.windows(2) {
            assert!(w[1].max_abs_diff <= w[0].max_abs_diff + 1e-15);
            assert!(w[0].max_abs_diff > 0.0);
        }
        let fit = fit_decay(&table).unwrap();
        assert!(fit.rate_r > 1.0, "{fit:?}");
        assert!(fit.r_squared >= 0.98, "{fit:?}");
    }

    #[test]
    fn rc_scan_matches_translated_ising_scan() {
        // p = 1/2 corresponds to beta = 2; boundary variants align
        // (out <-> delete, in <-> contract), so rows agree to oracle accuracy
        let rc = ssm_scan(
            GraphFamily::Path { n: 12 },
            SsmModel::RcEdge { p: 0.5, lambda: 1.0 },
            &DEFAULT_CATALOG,
            6,
        )
        .unwrap();
        let ising = ssm_scan(
            GraphFamily::Path { n: 12 },
            SsmModel::IsingEdge {
                beta: 2.0,
                lambda: Complex64::new(1.0, 0.0),
            },
            &DEFAULT_CATALOG,
            6,
        )
        .unwrap();
        assert_eq!(rc.rows.len(), ising.rows.len());
        for (a, b) in rc.rows.iter().zip(&ising.rows) {
            assert_eq!(a.distance, b.distance);
            assert!(
                (a.max_abs_diff - b.max_abs_diff).abs() <= 1e-10,
                "distance {}: {} vs {}",
                a.distance,
                a.max_abs_diff,
                b.max_abs_diff
            );
        }
    }

    #[test]
    fn ladder_family_shape() {
        let g = GraphFamily::Ladder { rungs: 4 }.build().unwrap();
        assert_eq!(g.vertex_count(), 8);
        assert_eq!(g.edge_count(), 4 + 2 * 3);
        assert_eq!(g.max_degree(), 3);
    }
}
