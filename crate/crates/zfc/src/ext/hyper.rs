//! Hypergraph independence polynomial: oracle, deletion algebra, marginal
//! ratios, and the divisibility check behind its LDC.
//!
//! An independent set contains no edge entirely; plus means in the set.
//! Mild deletion keeps as many edge constraints as possible (the vertex is
//! removed from every edge), total deletion removes every edge through the
//! vertex. The vertex metric calls two vertices adjacent when they share an
//! edge; that is the reading under which the component-swap bijection
//! measures distance.

use num::{BigRational, One, Zero};

use crate::error::{Error, Result};
use crate::exact::enumeration_cap;
use crate::graph::{Pinning, Spin};
use crate::ldc::{divides, LdcReport};
use crate::rational::RationalPoly;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypergraph {
    vertex_count: usize,
    edges: Vec<Vec<usize>>,
}

impl Hypergraph {
    /// Builds a hypergraph; edges are non-empty vertex sets, stored sorted.
    pub fn new(vertex_count: usize, edges: Vec<Vec<usize>>) -> Result<Self> {
        let mut cleaned = Vec::with_capacity(edges.len());
        for mut e in edges {
            e.sort_unstable();
            e.dedup();
            if e.is_empty() {
                return Err(Error::Argument("empty hyperedge".into()));
            }
            if let Some(&v) = e.iter().find(|&&v| v >= vertex_count) {
                return Err(Error::Argument(format!("vertex id {v} out of range")));
            }
            cleaned.push(e);
        }
        Ok(Hypergraph {
            vertex_count,
            edges: cleaned,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.contains(&v)).count()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.vertex_count).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    /// Shortest-path distance in the shared-edge vertex metric.
    pub fn vertex_distance(&self, a: usize, b: usize) -> Option<usize> {
        if a >= self.vertex_count || b >= self.vertex_count {
            return None;
        }
        let mut dist = vec![None; self.vertex_count];
        dist[a] = Some(0usize);
        let mut queue = std::collections::VecDeque::from([a]);
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap();
            if v == b {
                return Some(d);
            }
            for e in &self.edges {
                if e.contains(&v) {
                    for &w in e {
                        if dist[w].is_none() {
                            dist[w] = Some(d + 1);
                            queue.push_back(w);
                        }
                    }
                }
            }
        }
        dist[b]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeletionKind {
    /// Remove the vertex from every edge, dropping emptied edges.
    Mild,
    /// Remove the vertex and every edge containing it.
    Total,
}

/// Vertex deletion. Remaining vertices are relabeled downwards to keep ids
/// contiguous.
pub fn hyper_ops(h: &Hypergraph, v: usize, kind: DeletionKind) -> Result<Hypergraph> {
    if v >= h.vertex_count {
        return Err(Error::Argument(format!("vertex id {v} out of range")));
    }
    let relabel = |w: usize| if w > v { w - 1 } else { w };
    let mut edges = Vec::new();
    for e in &h.edges {
        match kind {
            DeletionKind::Mild => {
                let reduced: Vec<usize> =
                    e.iter().filter(|&&w| w != v).map(|&w| relabel(w)).collect();
                if !reduced.is_empty() {
                    edges.push(reduced);
                }
            }
            DeletionKind::Total => {
                if !e.contains(&v) {
                    edges.push(e.iter().map(|&w| relabel(w)).collect());
                }
            }
        }
    }
    Hypergraph::new(h.vertex_count - 1, edges)
}

fn pin_masks(h: &Hypergraph, pin: &Pinning) -> Result<(u64, u64)> {
    let mut plus = 0u64;
    let mut minus = 0u64;
    for (&v, &s) in pin {
        if v >= h.vertex_count {
            return Err(Error::Argument(format!("pinned vertex {v} out of range")));
        }
        match s {
            Spin::Plus => plus |= 1 << v,
            Spin::Minus => minus |= 1 << v,
        }
    }
    Ok((plus, minus))
}

fn edge_masks(h: &Hypergraph) -> Vec<u64> {
    h.edges
        .iter()
        .map(|e| e.iter().fold(0u64, |m, &v| m | 1 << v))
        .collect()
}

/// Exact independence polynomial in the activity variable, restricted to
/// configurations extending `pin`. The pin must itself be feasible: its
/// plus part may not contain an edge.
pub fn hyper_z_poly(h: &Hypergraph, pin: &Pinning) -> Result<RationalPoly> {
    let cap = enumeration_cap(crate::exact::DEFAULT_VERTEX_CAP);
    let (plus, minus) = pin_masks(h, pin)?;
    let masks = edge_masks(h);
    if masks.iter().any(|&e| e & plus == e) {
        return Err(Error::Argument(
            "infeasible pin: the plus part contains an edge".into(),
        ));
    }
    let free: Vec<usize> = (0..h.vertex_count)
        .filter(|&v| (plus | minus) >> v & 1 == 0)
        .collect();
    if free.len() > cap {
        return Err(Error::Resource(format!(
            "{} free vertices exceed the enumeration cap {cap}",
            free.len()
        )));
    }
    let mut coeffs = vec![BigRational::zero(); h.vertex_count + 1];
    'subset: for subset in 0u64..(1u64 << free.len()) {
        let mut members = plus;
        for (i, &v) in free.iter().enumerate() {
            if subset >> i & 1 == 1 {
                members |= 1 << v;
            }
        }
        for &e in &masks {
            if e & members == e {
                continue 'subset;
            }
        }
        coeffs[members.count_ones() as usize] += BigRational::one();
    }
    Ok(RationalPoly::from_coeffs(coeffs))
}

/// Exact independence polynomial evaluated at a rational activity.
pub fn hyper_z(h: &Hypergraph, lambda: &BigRational, pin: &Pinning) -> Result<BigRational> {
    Ok(hyper_z_poly(h, pin)?.eval(lambda))
}

/// Marginal probability that `v` is in the independent set, conditioned on
/// `pin`.
pub fn hyper_marginal(
    h: &Hypergraph,
    v: usize,
    lambda: &BigRational,
    pin: &Pinning,
) -> Result<BigRational> {
    if pin.contains_key(&v) {
        return Err(Error::Argument(format!("vertex {v} is pinned")));
    }
    let mut pin_plus = pin.clone();
    pin_plus.insert(v, Spin::Plus);
    let num = match hyper_z_poly(h, &pin_plus) {
        Ok(p) => p.eval(lambda),
        // pinning v plus may be infeasible; the marginal is then zero
        Err(Error::Argument(_)) => BigRational::zero(),
        Err(e) => return Err(e),
    };
    let den = hyper_z(h, lambda, pin)?;
    if den.is_zero() {
        return Err(Error::Numeric("zero conditional independence polynomial".into()));
    }
    Ok(num / den)
}

/// Divisibility behind the hypergraph LDC:
/// `lambda^{d_H(u,v)+1}` divides
/// `Z^{pin,+,+} Z^{pin,-,-} - Z^{pin,+,-} Z^{pin,-,+}`.
pub fn hyper_ldc(h: &Hypergraph, pin: &Pinning, u: usize, v: usize) -> Result<LdcReport> {
    if u == v {
        return Err(Error::Argument("probe vertices must be distinct".into()));
    }
    if pin.contains_key(&u) || pin.contains_key(&v) {
        return Err(Error::Argument("probe vertices must be unpinned".into()));
    }
    let pinned = |su: Spin, sv: Spin| -> Result<RationalPoly> {
        let mut p = pin.clone();
        p.insert(u, su);
        p.insert(v, sv);
        match hyper_z_poly(h, &p) {
            Ok(poly) => Ok(poly),
            Err(Error::Argument(msg)) if msg.starts_with("infeasible pin") => {
                Ok(RationalPoly::zero())
            }
            Err(e) => Err(e),
        }
    };
    let pp = pinned(Spin::Plus, Spin::Plus)?;
    let mm = pinned(Spin::Minus, Spin::Minus)?;
    let pm = pinned(Spin::Plus, Spin::Minus)?;
    let mp = pinned(Spin::Minus, Spin::Plus)?;
    let difference = pp.mul(&mm).sub(&pm.mul(&mp));
    let required = match h.vertex_distance(u, v) {
        Some(d) => d + 1,
        None => 2 * h.vertex_count + 1,
    };
    Ok(divides(&difference, required))
}

/// Zero-freeness threshold `(D-1)^{D-1} / D^D`.
pub fn lambda_s(delta: u32) -> f64 {
    let d = delta as f64;
    (d - 1.0).powi(delta as i32 - 1) / d.powi(delta as i32)
}

/// Uniqueness-style threshold `(D-1)^{D-1} / (D-2)^D`.
pub fn lambda_c(delta: u32) -> f64 {
    let d = delta as f64;
    (d - 1.0).powi(delta as i32 - 1) / (d - 2.0).powi(delta as i32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn random_hypergraph(rng: &mut StdRng, n: usize, m: usize) -> Hypergraph {
        let mut edges = Vec::new();
        for _ in 0..m {
            let size = rng.gen_range(2..=3.min(n));
            let mut e: Vec<usize> = Vec::new();
            while e.len() < size {
                let v = rng.gen_range(0..n);
                if !e.contains(&v) {
                    e.push(v);
                }
            }
            edges.push(e);
        }
        Hypergraph::new(n, edges).unwrap()
    }

    #[test]
    fn single_edge_polynomial() {
        let h = Hypergraph::new(3, vec![vec![0, 1, 2]]).unwrap();
        let p = hyper_z_poly(&h, &Pinning::new()).unwrap();
        // (1+x)^3 - x^3: all subsets except the full edge
        assert_eq!(p.coeffs(), &[rat(1, 1), rat(3, 1), rat(3, 1)]);

        let k2 = Hypergraph::new(2, vec![vec![0, 1]]).unwrap();
        let p = hyper_z_poly(&k2, &Pinning::new()).unwrap();
        assert_eq!(p.coeffs(), &[rat(1, 1), rat(2, 1)]);
    }

    #[test]
    fn deletion_operations() {
        let h = Hypergraph::new(3, vec![vec![0, 1, 2]]).unwrap();
        let mild = hyper_ops(&h, 0, DeletionKind::Mild).unwrap();
        assert_eq!(mild.edges(), &[vec![0, 1]]); // {b,c} after relabeling
        let total = hyper_ops(&h, 0, DeletionKind::Total).unwrap();
        assert!(total.edges().is_empty());
    }

    #[test]
    fn deletion_identities_on_random_instances() {
        let mut rng = StdRng::seed_from_u64(101);
        let lambda = rat(2, 3);
        for _ in 0..100 {
            let n = rng.gen_range(2..=7);
            let m = rng.gen_range(0..=4);
            let h = random_hypergraph(&mut rng, n, m);
            // delete the last vertex so other ids keep their labels
            let v = n - 1;
            let mut pin = Pinning::new();
            pin.insert(v, Spin::Plus);
            let z_plus = match hyper_z_poly(&h, &pin) {
                Ok(p) => p.eval(&lambda),
                Err(_) => continue, // {v} infeasible only with singleton edges, excluded
            };
            let mild = hyper_ops(&h, v, DeletionKind::Mild).unwrap();
            assert_eq!(z_plus, &lambda * hyper_z(&mild, &lambda, &Pinning::new()).unwrap());

            let mut pin = Pinning::new();
            pin.insert(v, Spin::Minus);
            let z_minus = hyper_z(&h, &lambda, &pin).unwrap();
            let total = hyper_ops(&h, v, DeletionKind::Total).unwrap();
            assert_eq!(z_minus, hyper_z(&total, &lambda, &Pinning::new()).unwrap());
        }
    }

    #[test]
    fn conditioning_identity() {
        // P^{pin}_{H,v} = P_{H[pin],v} with H[pin] = (H mild- pin+) total- pin-
        let mut rng = StdRng::seed_from_u64(103);
        let lambda = rat(1, 2);
        for _ in 0..50 {
            let n = rng.gen_range(4..=7);
            let m = rng.gen_range(1..=4);
            let h = random_hypergraph(&mut rng, n, m);
            // pin the top two ids, probe vertex 0
            let mut pin = Pinning::new();
            pin.insert(n - 1, Spin::Plus);
            pin.insert(n - 2, Spin::Minus);
            let plus_feasible = hyper_z_poly(&h, &{
                let mut p = Pinning::new();
                p.insert(n - 1, Spin::Plus);
                p
            })
            .is_ok();
            if !plus_feasible {
                continue;
            }
            let lhs = match hyper_marginal(&h, 0, &lambda, &pin) {
                Ok(x) => x,
                Err(_) => continue,
            };
            let reduced = hyper_ops(&h, n - 1, DeletionKind::Mild).unwrap();
            let reduced = hyper_ops(&reduced, n - 2, DeletionKind::Total).unwrap();
            let rhs = hyper_marginal(&reduced, 0, &lambda, &Pinning::new()).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn marginal_bound() {
        let mut rng = StdRng::seed_from_u64(107);
        for lambda in [rat(1, 4), rat(1, 1), rat(4, 1)] {
            let bound = &lambda / (BigRational::one() + &lambda);
            for _ in 0..40 {
                let n = rng.gen_range(2..=7);
                let m = rng.gen_range(0..=4);
                let h = random_hypergraph(&mut rng, n, m);
                let p = hyper_marginal(&h, 0, &lambda, &Pinning::new()).unwrap();
                assert!(p >= BigRational::zero());
                assert!(p <= bound, "{p} > {bound}");
            }
        }
    }

    #[test]
    fn ldc_shared_edge_and_disconnected() {
        let h = Hypergraph::new(3, vec![vec![0, 1, 2]]).unwrap();
        let r = hyper_ldc(&h, &Pinning::new(), 0, 1).unwrap();
        assert_eq!(r.required_order, 2); // distance 1, plus one
        assert!(r.pass, "{r:?}");

        let h = Hypergraph::new(4, vec![vec![0, 1], vec![2, 3]]).unwrap();
        let r = hyper_ldc(&h, &Pinning::new(), 0, 2).unwrap();
        assert_eq!(r.observed_order, None); // factorizes to exactly zero
        assert!(r.pass);
    }

    #[test]
    fn ldc_small_exhaustive() {
        for h in crate::enumerate::labeled_hypergraphs(4, 3, 2) {
            let hg = Hypergraph::new(4, h).unwrap();
            for u in 0..4 {
                for v in (u + 1)..4 {
                    let r = hyper_ldc(&hg, &Pinning::new(), u, v).unwrap();
                    assert!(r.pass, "{:?} probes {u},{v}: {r:?}", hg.edges());
                }
            }
        }
    }

    #[test]
    fn thresholds() {
        assert!((lambda_s(3) - 4.0 / 27.0).abs() < 1e-15);
        assert!((lambda_c(3) - 4.0).abs() < 1e-15);
    }
}
