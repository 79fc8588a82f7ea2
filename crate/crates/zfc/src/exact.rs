//! Brute-force oracles: exact Ising partition functions, conditional
//! variants, marginal and edge-deletion ratios.
//!
//! The oracle is deliberately simple and independent of the main algorithm.
//! Contracted (infinite-activity) edges are eliminated by union-find before
//! enumeration, realising the limit semantics exactly: a contracted edge
//! contributes weight factor 1 and forces its endpoints equal. Enumeration
//! walks free spin classes in binary-reflected Gray-code order so each step
//! updates the running weight by one class flip.

use num::complex::Complex64;
use num::{BigRational, One, Zero};
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graph::{EdgeActivity, Graph, IsingParams, PartialEvaluation, Pinning, Spin};
use crate::rational::RationalPoly;

/// Default cap on enumerated spin classes.
pub const DEFAULT_VERTEX_CAP: usize = 22;

/// Enumeration cap, overridable through the `ZFC_CAP` environment variable.
pub fn enumeration_cap(default: usize) -> usize {
    std::env::var("ZFC_CAP")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(default)
}

/// Rational edge activity for the exact polynomial path.
#[derive(Debug, Clone, PartialEq)]
pub enum RatActivity {
    Finite(BigRational),
    Contract,
}

/// Partial evaluation with exact rational values.
#[derive(Debug, Clone, Default)]
pub struct RationalEvaluation {
    pub edge_overrides: BTreeMap<usize, RatActivity>,
    pub vertex_overrides: BTreeMap<usize, BigRational>,
}

impl RationalEvaluation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_edge(mut self, e: usize, value: RatActivity) -> Self {
        self.edge_overrides.insert(e, value);
        self
    }

    pub fn with_vertex(mut self, v: usize, value: BigRational) -> Self {
        self.vertex_overrides.insert(v, value);
        self
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }
    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }
    fn union(&mut self, a: usize, b: usize) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// The enumeration skeleton shared by the complex and rational paths:
/// contraction classes, per-class pins, free classes and cross edges.
struct Skeleton {
    /// members per class
    members: Vec<Vec<usize>>,
    /// fixed spin per class, if pinned
    class_pin: Vec<Option<Spin>>,
    /// classes left free, in ascending order
    free: Vec<usize>,
    /// surviving (non-contracted) edges as (edge id, class u, class v),
    /// classes distinct
    cross_edges: Vec<(usize, usize, usize)>,
    /// cross edge positions incident to each class
    incident: Vec<Vec<usize>>,
    /// true if the pinning conflicts with a contraction
    infeasible: bool,
}

fn build_skeleton(g: &Graph, contracted: &[bool], pin: &Pinning) -> Skeleton {
    let n = g.vertex_count();
    let mut uf = UnionFind::new(n);
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        if contracted[e] {
            uf.union(u, v);
        }
    }
    let mut root_to_class = BTreeMap::new();
    let mut class_of = vec![0; n];
    let mut members: Vec<Vec<usize>> = Vec::new();
    for v in 0..n {
        let r = uf.find(v);
        let c = *root_to_class.entry(r).or_insert_with(|| {
            members.push(Vec::new());
            members.len() - 1
        });
        class_of[v] = c;
        members[c].push(v);
    }
    let mut class_pin = vec![None; members.len()];
    let mut infeasible = false;
    for (&v, &s) in pin {
        let c = class_of[v];
        match class_pin[c] {
            None => class_pin[c] = Some(s),
            Some(prev) if prev != s => infeasible = true,
            _ => {}
        }
    }
    let free: Vec<usize> = (0..members.len())
        .filter(|&c| class_pin[c].is_none())
        .collect();
    let mut cross_edges = Vec::new();
    let mut incident = vec![Vec::new(); members.len()];
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        if contracted[e] {
            continue;
        }
        let (cu, cv) = (class_of[u], class_of[v]);
        if cu != cv {
            incident[cu].push(cross_edges.len());
            incident[cv].push(cross_edges.len());
            cross_edges.push((e, cu, cv));
        }
    }
    Skeleton {
        members,
        class_pin,
        free,
        cross_edges,
        incident,
        infeasible,
    }
}

/// Complex product that tolerates exactly-zero factors.
#[derive(Clone, Copy)]
struct ZeroAwareProduct {
    nonzero: Complex64,
    zeros: u32,
}

impl ZeroAwareProduct {
    fn one() -> Self {
        ZeroAwareProduct {
            nonzero: Complex64::new(1.0, 0.0),
            zeros: 0,
        }
    }
    fn mul(&mut self, f: Complex64) {
        if f.re == 0.0 && f.im == 0.0 {
            self.zeros += 1;
        } else {
            self.nonzero *= f;
        }
    }
    fn div(&mut self, f: Complex64) {
        if f.re == 0.0 && f.im == 0.0 {
            self.zeros -= 1;
        } else {
            self.nonzero /= f;
        }
    }
    fn value(&self) -> Complex64 {
        if self.zeros > 0 {
            Complex64::new(0.0, 0.0)
        } else {
            self.nonzero
        }
    }
}

/// Exact conditional partition function. Contracted edges contribute weight
/// factor 1 and force their endpoints equal; a pinning that contradicts a
/// contraction makes the sum empty and returns 0.
pub fn exact_z(
    g: &Graph,
    p: &IsingParams,
    pe: &PartialEvaluation,
    pin: &Pinning,
) -> Result<Complex64> {
    p.validate(g)?;
    pe.validate(g)?;
    for &v in pin.keys() {
        if v >= g.vertex_count() {
            return Err(Error::Argument(format!("pinned vertex {v} out of range")));
        }
    }
    let mut beta_eff = p.beta.clone();
    let mut contracted = vec![false; g.edge_count()];
    for (&e, val) in &pe.edge_overrides {
        match val {
            EdgeActivity::Finite(b) => beta_eff[e] = *b,
            EdgeActivity::Contract => contracted[e] = true,
        }
    }
    let mut lambda_eff = p.lambda.clone();
    for (&v, &val) in &pe.vertex_overrides {
        lambda_eff[v] = val;
    }
    let sk = build_skeleton(g, &contracted, pin);
    if sk.infeasible {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let cap = enumeration_cap(DEFAULT_VERTEX_CAP);
    if sk.free.len() > cap {
        return Err(Error::Resource(format!(
            "{} free spin classes exceed the enumeration cap {cap}",
            sk.free.len()
        )));
    }

    // spins per class: true = plus; free classes start minus
    let mut spin = vec![false; sk.members.len()];
    for (c, pinval) in sk.class_pin.iter().enumerate() {
        spin[c] = matches!(pinval, Some(Spin::Plus));
    }

    let mut beta_prod = 1.0f64;
    for &(e, cu, cv) in &sk.cross_edges {
        if spin[cu] == spin[cv] {
            beta_prod *= beta_eff[e];
        }
    }
    let mut lam_prod = ZeroAwareProduct::one();
    for (c, ms) in sk.members.iter().enumerate() {
        if spin[c] {
            for &v in ms {
                lam_prod.mul(lambda_eff[v]);
            }
        }
    }

    let f = sk.free.len();
    let mut total = lam_prod.value() * beta_prod;
    let steps: u64 = if f == 0 { 0 } else { (1u64 << f) - 1 };
    for i in 1..=steps {
        let c = sk.free[i.trailing_zeros() as usize];
        spin[c] = !spin[c];
        if spin[c] {
            for &v in &sk.members[c] {
                lam_prod.mul(lambda_eff[v]);
            }
        } else {
            for &v in &sk.members[c] {
                lam_prod.div(lambda_eff[v]);
            }
        }
        for &pos in &sk.incident[c] {
            let (e, cu, cv) = sk.cross_edges[pos];
            if spin[cu] == spin[cv] {
                beta_prod *= beta_eff[e];
            } else {
                beta_prod /= beta_eff[e];
            }
        }
        total += lam_prod.value() * beta_prod;
    }
    Ok(total)
}

/// Exact partition polynomial in the field-scaling variable `z`: the
/// coefficient of `z^j` sums the weights of configurations with exactly `j`
/// plus vertices. Exact rational arithmetic throughout.
pub fn exact_z_poly(
    g: &Graph,
    beta: &[BigRational],
    lambda: &[BigRational],
    pe: &RationalEvaluation,
    pin: &Pinning,
) -> Result<RationalPoly> {
    if beta.len() != g.edge_count() || lambda.len() != g.vertex_count() {
        return Err(Error::Argument(
            "parameter vectors do not match the graph".into(),
        ));
    }
    let mut beta_eff = beta.to_vec();
    let mut contracted = vec![false; g.edge_count()];
    for (&e, val) in &pe.edge_overrides {
        if e >= g.edge_count() {
            return Err(Error::Argument(format!("override on unknown edge {e}")));
        }
        match val {
            RatActivity::Finite(b) => beta_eff[e] = b.clone(),
            RatActivity::Contract => contracted[e] = true,
        }
    }
    let mut lambda_eff = lambda.to_vec();
    for (&v, val) in &pe.vertex_overrides {
        if v >= g.vertex_count() {
            return Err(Error::Argument(format!("override on unknown vertex {v}")));
        }
        lambda_eff[v] = val.clone();
    }
    for b in &beta_eff {
        if b.is_zero() {
            return Err(Error::Argument("zero edge activity".into()));
        }
    }
    let sk = build_skeleton(g, &contracted, pin);
    if sk.infeasible {
        return Ok(RationalPoly::zero());
    }
    let cap = enumeration_cap(DEFAULT_VERTEX_CAP);
    if sk.free.len() > cap {
        return Err(Error::Resource(format!(
            "{} free spin classes exceed the enumeration cap {cap}",
            sk.free.len()
        )));
    }

    let mut spin = vec![false; sk.members.len()];
    for (c, pinval) in sk.class_pin.iter().enumerate() {
        spin[c] = matches!(pinval, Some(Spin::Plus));
    }

    let mut beta_prod = BigRational::one();
    for &(e, cu, cv) in &sk.cross_edges {
        if spin[cu] == spin[cv] {
            beta_prod *= &beta_eff[e];
        }
    }
    let mut lam_nonzero = BigRational::one();
    let mut lam_zeros = 0u32;
    let mut plus_vertices = 0usize;
    for (c, ms) in sk.members.iter().enumerate() {
        if spin[c] {
            plus_vertices += ms.len();
            for &v in ms {
                if lambda_eff[v].is_zero() {
                    lam_zeros += 1;
                } else {
                    lam_nonzero *= &lambda_eff[v];
                }
            }
        }
    }

    let mut coeffs = vec![BigRational::zero(); g.vertex_count() + 1];
    let f = sk.free.len();
    if lam_zeros == 0 {
        coeffs[plus_vertices] += &lam_nonzero * &beta_prod;
    }
    let steps: u64 = if f == 0 { 0 } else { (1u64 << f) - 1 };
    for i in 1..=steps {
        let c = sk.free[i.trailing_zeros() as usize];
        spin[c] = !spin[c];
        if spin[c] {
            plus_vertices += sk.members[c].len();
            for &v in &sk.members[c] {
                if lambda_eff[v].is_zero() {
                    lam_zeros += 1;
                } else {
                    lam_nonzero *= &lambda_eff[v];
                }
            }
        } else {
            plus_vertices -= sk.members[c].len();
            for &v in &sk.members[c] {
                if lambda_eff[v].is_zero() {
                    lam_zeros -= 1;
                } else {
                    lam_nonzero /= &lambda_eff[v];
                }
            }
        }
        for &pos in &sk.incident[c] {
            let (e, cu, cv) = sk.cross_edges[pos];
            if spin[cu] == spin[cv] {
                beta_prod *= &beta_eff[e];
            } else {
                beta_prod /= &beta_eff[e];
            }
        }
        if lam_zeros == 0 {
            coeffs[plus_vertices] += &lam_nonzero * &beta_prod;
        }
    }
    Ok(RationalPoly::from_coeffs(coeffs))
}

/// Exact generalized edge ratio `Z^{pe, beta_e -> new} / Z^{pe}`. The plain
/// edge-deletion ratio is `new = Finite(1)`.
pub fn exact_edge_ratio(
    g: &Graph,
    p: &IsingParams,
    e: usize,
    new_activity: EdgeActivity,
    pe: &PartialEvaluation,
) -> Result<Complex64> {
    if pe.edge_overrides.contains_key(&e) {
        return Err(Error::Argument(format!(
            "edge {e} is already fixed by the conditioning evaluation"
        )));
    }
    g.edge(e)?;
    let with_e = pe.clone().with_edge(e, new_activity);
    let num = exact_z(g, p, &with_e, &Pinning::new())?;
    let den = exact_z(g, p, pe, &Pinning::new())?;
    if den.norm() == 0.0 {
        return Err(Error::Numeric(
            "zero denominator partition function (parameters outside the certified region?)"
                .into(),
        ));
    }
    Ok(num / den)
}

/// Exact conditional marginal ratio `Z^{pin, v+} / Z^{pin, v-}`.
pub fn exact_marginal_ratio(
    g: &Graph,
    p: &IsingParams,
    v: usize,
    pin: &Pinning,
) -> Result<Complex64> {
    if pin.contains_key(&v) {
        return Err(Error::Argument(format!("vertex {v} is already pinned")));
    }
    if v >= g.vertex_count() {
        return Err(Error::Argument(format!("vertex id {v} out of range")));
    }
    let mut pin_plus = pin.clone();
    pin_plus.insert(v, Spin::Plus);
    let mut pin_minus = pin.clone();
    pin_minus.insert(v, Spin::Minus);
    let num = exact_z(g, p, &PartialEvaluation::new(), &pin_plus)?;
    let den = exact_z(g, p, &PartialEvaluation::new(), &pin_minus)?;
    if den.norm() == 0.0 {
        return Err(Error::Numeric("zero minus-pinned partition function".into()));
    }
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::{FromPrimitive, ToPrimitive};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn k2() -> Graph {
        Graph::new(2, vec![(0, 1)]).unwrap()
    }

    fn rational(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn random_graph(rng: &mut StdRng, n: usize, p_edge: f64) -> Graph {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                if rng.gen_bool(p_edge) {
                    edges.push((u, v));
                }
            }
        }
        Graph::new(n, edges).unwrap()
    }

    #[test]
    fn edgeless_graph_factorizes() {
        let g = Graph::new(2, vec![]).unwrap();
        let lam = c(0.3, 0.4);
        let p = IsingParams::uniform(&g, 1.0, lam);
        let z = exact_z(&g, &p, &PartialEvaluation::new(), &Pinning::new()).unwrap();
        let expect = (1.0 + lam) * (1.0 + lam);
        assert!((z - expect).norm() < 1e-14);
    }

    #[test]
    fn k2_enumeration() {
        let g = k2();
        let p = IsingParams::uniform(&g, 2.0, c(0.5, 0.0));
        let z = exact_z(&g, &p, &PartialEvaluation::new(), &Pinning::new()).unwrap();
        assert!((z - c(3.5, 0.0)).norm() < 1e-14);

        let mut pin = Pinning::new();
        pin.insert(0, Spin::Plus);
        pin.insert(1, Spin::Plus);
        let z = exact_z(&g, &p, &PartialEvaluation::new(), &pin).unwrap();
        assert!((z - c(0.5, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn k2_polynomial() {
        let g = k2();
        let beta = vec![rational(2, 1)];
        let lambda = vec![rational(1, 1), rational(1, 1)];
        let poly = exact_z_poly(
            &g,
            &beta,
            &lambda,
            &RationalEvaluation::new(),
            &Pinning::new(),
        )
        .unwrap();
        assert_eq!(
            poly.coeffs(),
            &[rational(2, 1), rational(2, 1), rational(2, 1)]
        );
    }

    #[test]
    fn extreme_coefficients_are_products() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..20 {
            let g = random_graph(&mut rng, 6, 0.5);
            let beta: Vec<BigRational> = (0..g.edge_count())
                .map(|_| rational(rng.gen_range(1..5), 1))
                .collect();
            let lambda: Vec<BigRational> = (0..6)
                .map(|_| rational(rng.gen_range(1..4), rng.gen_range(1..3)))
                .collect();
            let poly = exact_z_poly(
                &g,
                &beta,
                &lambda,
                &RationalEvaluation::new(),
                &Pinning::new(),
            )
            .unwrap();
            let beta_prod: BigRational = beta.iter().product();
            let lam_prod: BigRational = lambda.iter().product();
            // all-minus configuration is the unique 0-plus configuration
            assert_eq!(poly.coeff(0), beta_prod.clone());
            // all-plus configuration
            assert_eq!(poly.coeff(6), beta_prod * lam_prod);
        }
    }

    #[test]
    fn pin_partition_identity() {
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..10 {
            let g = random_graph(&mut rng, 6, 0.5);
            let p = IsingParams::uniform(&g, 1.7, c(0.4, 0.2));
            let z = exact_z(&g, &p, &PartialEvaluation::new(), &Pinning::new()).unwrap();
            for v in 0..6 {
                let mut plus = Pinning::new();
                plus.insert(v, Spin::Plus);
                let mut minus = Pinning::new();
                minus.insert(v, Spin::Minus);
                let zp = exact_z(&g, &p, &PartialEvaluation::new(), &plus).unwrap();
                let zm = exact_z(&g, &p, &PartialEvaluation::new(), &minus).unwrap();
                assert!((z - (zp + zm)).norm() < 1e-11 * z.norm());
            }
        }
    }

    #[test]
    fn lee_yang_zero_freeness() {
        let mut rng = StdRng::seed_from_u64(13);
        for _ in 0..200 {
            let n = rng.gen_range(2..=10);
            let g = random_graph(&mut rng, n, 0.4);
            let beta: Vec<f64> = (0..g.edge_count()).map(|_| rng.gen_range(1.0..5.0)).collect();
            let lambda: Vec<Complex64> = (0..n)
                .map(|_| {
                    let r = rng.gen_range(0.0..0.95);
                    let th = rng.gen_range(0.0..std::f64::consts::TAU);
                    Complex64::from_polar(r, th)
                })
                .collect();
            let p = IsingParams { beta, lambda };
            let z = exact_z(&g, &p, &PartialEvaluation::new(), &Pinning::new()).unwrap();
            assert!(z.norm() > 0.0, "Lee-Yang violation on {:?}", g.edges());
        }
    }

    #[test]
    fn poly_at_one_matches_complex_z() {
        let mut rng = StdRng::seed_from_u64(17);
        for _ in 0..10 {
            let g = random_graph(&mut rng, 6, 0.5);
            let beta: Vec<BigRational> = (0..g.edge_count())
                .map(|_| rational(rng.gen_range(1..4), 1))
                .collect();
            let lambda: Vec<BigRational> = (0..6)
                .map(|_| rational(rng.gen_range(0..3), rng.gen_range(1..4)))
                .collect();
            let poly = exact_z_poly(
                &g,
                &beta,
                &lambda,
                &RationalEvaluation::new(),
                &Pinning::new(),
            )
            .unwrap();
            let p = IsingParams {
                beta: beta.iter().map(|b| b.to_f64()).collect::<Option<_>>().unwrap(),
                lambda: lambda
                    .iter()
                    .map(|l| Some(c(l.to_f64()?, 0.0)))
                    .collect::<Option<_>>()
                    .unwrap(),
            };
            let z = exact_z(&g, &p, &PartialEvaluation::new(), &Pinning::new()).unwrap();
            let from_poly = poly.eval_complex(c(1.0, 0.0));
            assert!((z - from_poly).norm() <= 1e-12 * z.norm().max(1.0));
        }
    }

    #[test]
    fn edge_ratio_examples() {
        let g = k2();
        // lambda = 0 forces the ratio to 1/beta
        let p = IsingParams::uniform(&g, 2.0, c(0.0, 0.0));
        let r = exact_edge_ratio(&g, &p, 0, EdgeActivity::Finite(1.0), &PartialEvaluation::new())
            .unwrap();
        assert!((r - c(0.5, 0.0)).norm() < 1e-14);

        let p = IsingParams::uniform(&g, 2.0, c(0.5, 0.0));
        let r = exact_edge_ratio(&g, &p, 0, EdgeActivity::Finite(1.0), &PartialEvaluation::new())
            .unwrap();
        assert!((r - c(9.0 / 14.0, 0.0)).norm() < 1e-14);

        // identity override leaves the ratio at exactly 1
        let r = exact_edge_ratio(&g, &p, 0, EdgeActivity::Finite(2.0), &PartialEvaluation::new())
            .unwrap();
        assert!((r - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn edge_ratio_avoids_zero_and_one() {
        let mut rng = StdRng::seed_from_u64(23);
        for _ in 0..200 {
            let n = rng.gen_range(2..=10);
            let g = random_graph(&mut rng, n, 0.4);
            if g.edge_count() == 0 {
                continue;
            }
            let beta: Vec<f64> = (0..g.edge_count()).map(|_| rng.gen_range(1.0..5.0)).collect();
            let lambda: Vec<Complex64> = (0..n)
                .map(|_| {
                    Complex64::from_polar(
                        rng.gen_range(0.0..0.95),
                        rng.gen_range(0.0..std::f64::consts::TAU),
                    )
                })
                .collect();
            let p = IsingParams { beta, lambda };
            let e = rng.gen_range(0..g.edge_count());
            // an override that genuinely changes the activity
            let r = exact_edge_ratio(&g, &p, e, EdgeActivity::Finite(1.0), &PartialEvaluation::new())
                .unwrap();
            assert!(r.norm() > 1e-12);
            assert!((r - c(1.0, 0.0)).norm() > 1e-12);
        }
    }

    #[test]
    fn marginal_ratio_examples() {
        let single = Graph::new(1, vec![]).unwrap();
        let lam = c(0.3, 0.1);
        let p = IsingParams::uniform(&single, 1.0, lam);
        let r = exact_marginal_ratio(&single, &p, 0, &Pinning::new()).unwrap();
        assert!((r - lam).norm() < 1e-14);

        let g = k2();
        let p = IsingParams::uniform(&g, 2.0, c(0.5, 0.0));
        let mut pin = Pinning::new();
        pin.insert(0, Spin::Plus);
        let r = exact_marginal_ratio(&g, &p, 1, &pin).unwrap();
        assert!((r - c(1.0, 0.0)).norm() < 1e-14); // beta * lambda = 2 * 0.5

        let r = exact_marginal_ratio(&g, &p, 1, &Pinning::new()).unwrap();
        assert!((r - c(0.4, 0.0)).norm() < 1e-14);

        pin.insert(1, Spin::Minus);
        assert!(exact_marginal_ratio(&g, &p, 1, &pin).is_err());
    }

    #[test]
    fn contraction_matches_large_beta_limit() {
        // P3 with the first edge contracted vs a very large finite activity:
        // lim Z(beta)/beta = Z_contracted
        let g = Graph::new(3, vec![(0, 1), (1, 2)]).unwrap();
        let p = IsingParams::uniform(&g, 2.0, c(0.4, 0.1));
        let contracted = exact_z(
            &g,
            &p,
            &PartialEvaluation::new().with_edge(0, EdgeActivity::Contract),
            &Pinning::new(),
        )
        .unwrap();
        let big = 1e9;
        let finite = exact_z(
            &g,
            &p,
            &PartialEvaluation::new().with_edge(0, EdgeActivity::Finite(big)),
            &Pinning::new(),
        )
        .unwrap();
        assert!((finite / big - contracted).norm() < 1e-7 * contracted.norm());
    }

    #[test]
    fn contraction_conflict_is_infeasible() {
        let g = k2();
        let p = IsingParams::uniform(&g, 2.0, c(0.5, 0.0));
        let mut pin = Pinning::new();
        pin.insert(0, Spin::Plus);
        pin.insert(1, Spin::Minus);
        let z = exact_z(
            &g,
            &p,
            &PartialEvaluation::new().with_edge(0, EdgeActivity::Contract),
            &pin,
        )
        .unwrap();
        assert_eq!(z, c(0.0, 0.0));
    }

    #[test]
    fn cap_is_enforced() {
        let g = Graph::new(30, vec![]).unwrap();
        let p = IsingParams::uniform(&g, 1.0, c(0.1, 0.0));
        let err = exact_z(&g, &p, &PartialEvaluation::new(), &Pinning::new());
        assert!(matches!(err, Err(Error::Resource(_))));
    }
}
