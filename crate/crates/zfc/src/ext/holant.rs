//! Binary symmetric Holant problems: configurations assign 0/1 to edges,
//! each vertex weighs the count of incident 1-edges through a local table,
//! and every 1-edge carries the activity.
//!
//! Built-in presets cover the weighted even-subgraph model (1 on even
//! counts, rho on odd) and the Ising model on line graphs
//! (`beta^{C(k,2)} beta^{C(d-k,2)}` for degree `d`).

use num::{pow::pow, BigRational, One, Zero};
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::exact::enumeration_cap;
use crate::graph::Graph;
use crate::ldc::{divides, LdcReport};
use crate::rational::RationalPoly;

const DEFAULT_HOLANT_EDGE_CAP: usize = 24;

/// Edge pinning: `true` pins the edge to 1.
pub type EdgeSpinPinning = BTreeMap<usize, bool>;

/// A Holant instance: per-vertex weight tables indexed by the number of
/// incident 1-edges, and a uniform edge activity.
#[derive(Debug, Clone)]
pub struct HolantInstance {
    pub graph: Graph,
    /// `tables[v][k]` weighs `k` incident 1-edges; length `deg(v) + 1`.
    pub tables: Vec<Vec<BigRational>>,
    pub lambda: BigRational,
}

impl HolantInstance {
    pub fn new(graph: Graph, tables: Vec<Vec<BigRational>>, lambda: BigRational) -> Result<Self> {
        if tables.len() != graph.vertex_count() {
            return Err(Error::Argument("one table per vertex required".into()));
        }
        for (v, t) in tables.iter().enumerate() {
            if t.len() != graph.degree(v) + 1 {
                return Err(Error::Argument(format!(
                    "table at vertex {v} has length {}, degree {} needs {}",
                    t.len(),
                    graph.degree(v),
                    graph.degree(v) + 1
                )));
            }
        }
        Ok(HolantInstance {
            graph,
            tables,
            lambda,
        })
    }
}

/// Weighted parity tables: 1 on even counts, `rho` on odd counts.
pub fn even_subgraph_tables(g: &Graph, rho: &BigRational) -> Vec<Vec<BigRational>> {
    (0..g.vertex_count())
        .map(|v| {
            (0..=g.degree(v))
                .map(|k| {
                    if k % 2 == 0 {
                        BigRational::one()
                    } else {
                        rho.clone()
                    }
                })
                .collect()
        })
        .collect()
}

/// Ising-on-line-graph tables: `beta^{C(k,2)} beta^{C(d-k,2)}`.
pub fn ising_line_graph_tables(g: &Graph, beta: &BigRational) -> Vec<Vec<BigRational>> {
    let choose2 = |x: usize| x * x.saturating_sub(1) / 2;
    (0..g.vertex_count())
        .map(|v| {
            let d = g.degree(v);
            (0..=d)
                .map(|k| pow(beta.clone(), choose2(k)) * pow(beta.clone(), choose2(d - k)))
                .collect()
        })
        .collect()
}

/// Exact Holant sum as a polynomial in the edge activity; the coefficient
/// of degree `j` collects configurations with `j` one-edges (pinned ones
/// included).
pub fn holant_z_poly(inst: &HolantInstance, pin: &EdgeSpinPinning) -> Result<RationalPoly> {
    let g = &inst.graph;
    let m = g.edge_count();
    for &e in pin.keys() {
        g.edge(e)?;
    }
    let cap = enumeration_cap(DEFAULT_HOLANT_EDGE_CAP);
    let free: Vec<usize> = (0..m).filter(|e| !pin.contains_key(e)).collect();
    if free.len() > cap {
        return Err(Error::Resource(format!(
            "{} free edges exceed the enumeration cap {cap}",
            free.len()
        )));
    }
    let base: u64 = pin
        .iter()
        .filter(|&(_, &s)| s)
        .map(|(&e, _)| 1u64 << e)
        .sum();
    let mut coeffs = vec![BigRational::zero(); m + 1];
    for subset in 0u64..(1u64 << free.len()) {
        let mut mask = base;
        for (i, &e) in free.iter().enumerate() {
            if subset >> i & 1 == 1 {
                mask |= 1 << e;
            }
        }
        let mut weight = BigRational::one();
        for v in 0..g.vertex_count() {
            let k = g
                .neighbors(v)
                .iter()
                .filter(|&&(_, e)| mask >> e & 1 == 1)
                .count();
            let w = &inst.tables[v][k];
            if w.is_zero() {
                weight = BigRational::zero();
                break;
            }
            weight *= w;
        }
        if !weight.is_zero() {
            coeffs[mask.count_ones() as usize] += weight;
        }
    }
    Ok(RationalPoly::from_coeffs(coeffs))
}

/// Exact Holant value at the instance activity.
pub fn holant_z(inst: &HolantInstance, pin: &EdgeSpinPinning) -> Result<BigRational> {
    Ok(holant_z_poly(inst, pin)?.eval(&inst.lambda))
}

/// Divisibility behind the Holant LDC:
/// `lambda^{d_G(e1,e2)+2}` divides
/// `Z^{pin,+,+} Z^{pin,-,-} - Z^{pin,+,-} Z^{pin,-,+}`.
pub fn holant_ldc(
    inst: &HolantInstance,
    pin: &EdgeSpinPinning,
    e1: usize,
    e2: usize,
) -> Result<LdcReport> {
    if e1 == e2 {
        return Err(Error::Argument("probe edges must be distinct".into()));
    }
    if pin.contains_key(&e1) || pin.contains_key(&e2) {
        return Err(Error::Argument("probe edges must be unpinned".into()));
    }
    let pinned = |s1: bool, s2: bool| -> Result<RationalPoly> {
        let mut p = pin.clone();
        p.insert(e1, s1);
        p.insert(e2, s2);
        holant_z_poly(inst, &p)
    };
    let pp = pinned(true, true)?;
    let mm = pinned(false, false)?;
    let pm = pinned(true, false)?;
    let mp = pinned(false, true)?;
    let difference = pp.mul(&mm).sub(&pm.mul(&mp));
    let required = match inst.graph.edge_distance(e1, &[e2])? {
        Some(d) => d + 2,
        None => 2 * inst.graph.edge_count() + 1,
    };
    Ok(divides(&difference, required))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn triangle() -> Graph {
        Graph::new(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    #[test]
    fn even_subgraphs_of_a_triangle() {
        // rho = 0 counts even subgraphs: the empty set and the full cycle
        let g = triangle();
        let tables = even_subgraph_tables(&g, &rat(0, 1));
        let inst = HolantInstance::new(g, tables, rat(1, 1)).unwrap();
        let z = holant_z(&inst, &EdgeSpinPinning::new()).unwrap();
        assert_eq!(z, rat(2, 1));
    }

    #[test]
    fn unit_tables_count_all_subsets() {
        let g = triangle();
        let tables = even_subgraph_tables(&g, &rat(1, 1));
        let inst = HolantInstance::new(g, tables, rat(1, 1)).unwrap();
        let z = holant_z(&inst, &EdgeSpinPinning::new()).unwrap();
        assert_eq!(z, rat(8, 1));
    }

    #[test]
    fn path_polynomial_by_hand() {
        // P3: 1 + 2 rho^2 x + rho^2 x^2
        let g = Graph::new(3, vec![(0, 1), (1, 2)]).unwrap();
        let rho = rat(1, 2);
        let tables = even_subgraph_tables(&g, &rho);
        let inst = HolantInstance::new(g, tables, rat(1, 1)).unwrap();
        let p = holant_z_poly(&inst, &EdgeSpinPinning::new()).unwrap();
        let rho2 = &rho * &rho;
        assert_eq!(p.coeffs(), &[rat(1, 1), rat(2, 1) * &rho2, rho2]);
    }

    #[test]
    fn line_graph_tables_shape() {
        let g = Graph::new(2, vec![(0, 1)]).unwrap();
        let tables = ising_line_graph_tables(&g, &rat(1, 2));
        // degree-1 vertices: C(k,2) = C(1-k,2) = 0 for k in {0,1}
        assert_eq!(tables[0], vec![rat(1, 1), rat(1, 1)]);
        let inst = HolantInstance::new(g, tables, rat(1, 3)).unwrap();
        let z = holant_z(&inst, &EdgeSpinPinning::new()).unwrap();
        assert_eq!(z, rat(4, 3));
    }

    #[test]
    fn table_length_is_validated() {
        let g = triangle();
        let mut tables = even_subgraph_tables(&g, &rat(1, 2));
        tables[0].pop();
        assert!(HolantInstance::new(g, tables, rat(1, 1)).is_err());
    }

    #[test]
    fn adjacent_edges_need_order_two() {
        let g = triangle();
        let tables = even_subgraph_tables(&g, &rat(1, 2));
        let inst = HolantInstance::new(g, tables, rat(1, 1)).unwrap();
        let r = holant_ldc(&inst, &EdgeSpinPinning::new(), 0, 1).unwrap();
        assert_eq!(r.required_order, 2);
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn disconnected_edges_factorize() {
        let g = Graph::new(4, vec![(0, 1), (2, 3)]).unwrap();
        let tables = even_subgraph_tables(&g, &rat(1, 2));
        let inst = HolantInstance::new(g, tables, rat(1, 1)).unwrap();
        let r = holant_ldc(&inst, &EdgeSpinPinning::new(), 0, 1).unwrap();
        assert_eq!(r.observed_order, None);
        assert!(r.pass);
    }

    #[test]
    fn small_exhaustive_even_subgraph_suite() {
        for sg in enumerate::all_graphs_up_to(5) {
            let g = sg.to_graph();
            let m = g.edge_count();
            for rho in [rat(0, 1), rat(1, 2)] {
                let tables = even_subgraph_tables(&g, &rho);
                let inst = HolantInstance::new(g.clone(), tables, rat(1, 1)).unwrap();
                for e1 in 0..m {
                    for e2 in (e1 + 1)..m {
                        let r = holant_ldc(&inst, &EdgeSpinPinning::new(), e1, e2).unwrap();
                        assert!(r.pass, "graph {:?} rho={rho} edges {e1},{e2}: {r:?}", g.edges());
                    }
                }
            }
        }
    }
}
