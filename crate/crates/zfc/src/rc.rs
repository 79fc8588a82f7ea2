//! The weighted random cluster model: exact oracle, translation to and from
//! the Ising model, conditional edge marginals through both routes, and the
//! single-edge Glauber dynamics with its monotone grand coupling.
//!
//! Configurations are edge subsets weighted by
//! `prod_{e in S} p_e prod_{e notin S} (1-p_e) prod_{C in kappa(V,S)} (1 +
//! prod_{v in C} lambda_v)`. The coupling to the Ising model is
//! `Z_Ising(beta, lambda) = (prod_e beta_e) Z_RC(p, lambda)` with
//! `p = 1 - 1/beta`; pinning an edge out corresponds to `beta_e -> 1` and
//! pinning it in to the contraction sentinel.

use std::collections::BTreeMap;

use num::complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{enumeration_cap, exact_edge_ratio, exact_z};
use crate::graph::{EdgeActivity, Graph, IsingParams, PartialEvaluation, Pinning};

/// Default cap on enumerated edges for the exact random-cluster oracle.
pub const DEFAULT_EDGE_CAP: usize = 24;

/// Per-edge inclusion probabilities and per-vertex weights.
#[derive(Debug, Clone)]
pub struct RCParams {
    pub p: Vec<f64>,
    pub lambda: Vec<f64>,
}

impl RCParams {
    pub fn uniform(g: &Graph, p: f64, lambda: f64) -> Self {
        RCParams {
            p: vec![p; g.edge_count()],
            lambda: vec![lambda; g.vertex_count()],
        }
    }

    /// From Ising activities via `p = 1 - 1/beta`.
    pub fn from_ising(beta: &[f64], lambda: &[f64]) -> Self {
        RCParams {
            p: beta.iter().map(|b| 1.0 - 1.0 / b).collect(),
            lambda: lambda.to_vec(),
        }
    }

    pub fn validate(&self, g: &Graph) -> Result<()> {
        if self.p.len() != g.edge_count() || self.lambda.len() != g.vertex_count() {
            return Err(Error::Argument(
                "parameter vectors do not match the graph".into(),
            ));
        }
        if let Some(p) = self.p.iter().find(|&&p| !(0.0..=1.0).contains(&p)) {
            return Err(Error::Domain(format!("edge probability {p} outside [0,1]")));
        }
        if let Some(l) = self.lambda.iter().find(|&&l| !(0.0..=1.0).contains(&l)) {
            return Err(Error::Domain(format!("vertex weight {l} outside [0,1]")));
        }
        Ok(())
    }
}

/// An edge configuration as a bitset over edge ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RCConfig {
    pub mask: u64,
}

impl RCConfig {
    pub fn empty() -> Self {
        RCConfig { mask: 0 }
    }

    pub fn full(edge_count: usize) -> Self {
        RCConfig {
            mask: if edge_count == 64 {
                u64::MAX
            } else {
                (1u64 << edge_count) - 1
            },
        }
    }

    pub fn contains(&self, e: usize) -> bool {
        self.mask >> e & 1 == 1
    }

    pub fn with(&self, e: usize, included: bool) -> Self {
        RCConfig {
            mask: if included {
                self.mask | (1 << e)
            } else {
                self.mask & !(1 << e)
            },
        }
    }

    pub fn is_subset_of(&self, other: &RCConfig) -> bool {
        self.mask & !other.mask == 0
    }
}

/// Pinning of edges: `true` keeps the edge in every configuration, `false`
/// keeps it out.
pub type EdgePinning = BTreeMap<usize, bool>;

/// Weight of a single configuration.
pub fn rc_weight(g: &Graph, rp: &RCParams, config: RCConfig) -> f64 {
    let mut w = 1.0;
    for e in 0..g.edge_count() {
        w *= if config.contains(e) {
            rp.p[e]
        } else {
            1.0 - rp.p[e]
        };
    }
    w * component_factor(g, &rp.lambda, config)
}

fn component_factor(g: &Graph, lambda: &[f64], config: RCConfig) -> f64 {
    let n = g.vertex_count();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] != x {
            let r = find(parent, parent[x]);
            parent[x] = r;
        }
        parent[x]
    }
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        if config.contains(e) {
            let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
            if ru != rv {
                parent[ru.max(rv)] = ru.min(rv);
            }
        }
    }
    let mut class_prod = vec![1.0f64; n];
    let mut is_root = vec![false; n];
    for v in 0..n {
        let r = find(&mut parent, v);
        is_root[r] = true;
        class_prod[r] *= lambda[v];
    }
    let mut w = 1.0;
    for v in 0..n {
        if is_root[v] {
            w *= 1.0 + class_prod[v];
        }
    }
    w
}

/// Exact conditional random-cluster partition function: the sum over all
/// configurations consistent with the edge pinning.
pub fn rc_z_exact(g: &Graph, rp: &RCParams, cond: &EdgePinning) -> Result<f64> {
    rp.validate(g)?;
    for &e in cond.keys() {
        g.edge(e)?;
    }
    let cap = enumeration_cap(DEFAULT_EDGE_CAP);
    let free: Vec<usize> = (0..g.edge_count()).filter(|e| !cond.contains_key(e)).collect();
    if free.len() > cap {
        return Err(Error::Resource(format!(
            "{} free edges exceed the enumeration cap {cap}",
            free.len()
        )));
    }
    let mut base = RCConfig::empty();
    for (&e, &included) in cond {
        base = base.with(e, included);
    }
    let mut total = 0.0;
    for subset in 0u64..(1u64 << free.len()) {
        let mut config = base;
        for (i, &e) in free.iter().enumerate() {
            if subset >> i & 1 == 1 {
                config = config.with(e, true);
            }
        }
        total += rc_weight(g, rp, config);
    }
    Ok(total)
}

/// Both sides of the Ising / random-cluster identity
/// `Z_Ising = (prod_e beta_e) Z_RC` at `p = 1 - 1/beta`.
pub fn ising_rc_consistency(g: &Graph, beta: &[f64], lambda: &[f64]) -> Result<(f64, f64)> {
    let params = IsingParams {
        beta: beta.to_vec(),
        lambda: lambda.iter().map(|&l| Complex64::new(l, 0.0)).collect(),
    };
    let z_ising = exact_z(g, &params, &PartialEvaluation::new(), &Pinning::new())?.re;
    let rp = RCParams::from_ising(beta, lambda);
    let z_rc = rc_z_exact(g, &rp, &EdgePinning::new())?;
    let beta_prod: f64 = beta.iter().product();
    Ok((z_ising, beta_prod * z_rc))
}

/// Which computation path the conditional marginal takes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MarginalRoute {
    /// Direct subset enumeration of the random-cluster sum.
    Direct,
    /// Through the Ising edge ratio: pinned-out edges become activity 1,
    /// pinned-in edges the contraction sentinel.
    ViaIsing,
}

/// Conditional probability that edge `e` is unpicked.
pub fn rc_edge_marginal(
    g: &Graph,
    rp: &RCParams,
    e: usize,
    cond: &EdgePinning,
    route: MarginalRoute,
) -> Result<f64> {
    if cond.contains_key(&e) {
        return Err(Error::Argument(format!("edge {e} is pinned by the condition")));
    }
    g.edge(e)?;
    match route {
        MarginalRoute::Direct => {
            let mut out = cond.clone();
            out.insert(e, false);
            let num = rc_z_exact(g, rp, &out)?;
            let den = rc_z_exact(g, rp, cond)?;
            if den == 0.0 {
                return Err(Error::Numeric("zero random-cluster partition function".into()));
            }
            Ok(num / den)
        }
        MarginalRoute::ViaIsing => {
            rp.validate(g)?;
            let mut pe = PartialEvaluation::new();
            for (&f, &included) in cond {
                pe = pe.with_edge(
                    f,
                    if included {
                        EdgeActivity::Contract
                    } else {
                        EdgeActivity::Finite(1.0)
                    },
                );
            }
            let mut beta = Vec::with_capacity(g.edge_count());
            for (f, &p) in rp.p.iter().enumerate() {
                if p >= 1.0 && !matches!(cond.get(&f), Some(true)) {
                    return Err(Error::Domain(format!(
                        "edge {f} has p = 1 but is not pinned in; the Ising route needs p < 1"
                    )));
                }
                beta.push(if p >= 1.0 { 1.0 } else { 1.0 / (1.0 - p) });
            }
            let params = IsingParams {
                beta,
                lambda: rp.lambda.iter().map(|&l| Complex64::new(l, 0.0)).collect(),
            };
            Ok(exact_edge_ratio(g, &params, e, EdgeActivity::Finite(1.0), &pe)?.re)
        }
    }
}

/// The single-edge update probability `p(sigma, e)`: the probability the
/// Glauber dynamics includes `e` given the rest of the configuration. Equals
/// `p_e` when `e` is not a cut edge of `sigma + e`; otherwise combines the
/// two component weight products.
pub fn update_probability(g: &Graph, rp: &RCParams, state: RCConfig, e: usize) -> f64 {
    let (u, v) = g.edges()[e];
    let without = state.with(e, false);
    // membership in u's component of (V, state - e)
    let n = g.vertex_count();
    let mut seen = vec![false; n];
    let mut stack = vec![u];
    seen[u] = true;
    while let Some(w) = stack.pop() {
        for &(x, f) in g.neighbors(w) {
            if without.contains(f) && !seen[x] {
                seen[x] = true;
                stack.push(x);
            }
        }
    }
    let p = rp.p[e];
    if seen[v] {
        return p;
    }
    let x1: f64 = component_of(g, without, u)
        .into_iter()
        .map(|w| rp.lambda[w])
        .product();
    let x2: f64 = component_of(g, without, v)
        .into_iter()
        .map(|w| rp.lambda[w])
        .product();
    p * (1.0 + x1 * x2) / (p * (1.0 + x1 * x2) + (1.0 - p) * (1.0 + x1) * (1.0 + x2))
}

fn component_of(g: &Graph, config: RCConfig, start: usize) -> Vec<usize> {
    let mut seen = vec![false; g.vertex_count()];
    let mut stack = vec![start];
    let mut out = vec![start];
    seen[start] = true;
    while let Some(w) = stack.pop() {
        for &(x, f) in g.neighbors(w) {
            if config.contains(f) && !seen[x] {
                seen[x] = true;
                stack.push(x);
                out.push(x);
            }
        }
    }
    out
}

/// One Glauber update with shared randomness: `e` is included exactly when
/// `u01 >= 1 - p(sigma, e)`, which makes the inclusion event monotone in the
/// update probability, as the grand coupling requires.
pub fn glauber_step(g: &Graph, rp: &RCParams, state: RCConfig, e: usize, u01: f64) -> RCConfig {
    let p = update_probability(g, rp, state, e);
    state.with(e, u01 >= 1.0 - p)
}

/// Trace of one grand-coupling run from the all-in and all-out states.
#[derive(Debug, Clone, Serialize)]
pub struct CouplingTrace {
    pub steps: u64,
    pub coalesced: bool,
    pub top_state: RCConfig,
    pub bottom_state: RCConfig,
    pub seed: u64,
}

/// Runs the top and bottom chains under shared `(edge, u01)` randomness
/// until they coalesce or `step_cap` is reached. The containment
/// `bottom <= top` is checked at every step.
pub fn coupling_time(g: &Graph, rp: &RCParams, seed: u64, step_cap: u64) -> Result<CouplingTrace> {
    rp.validate(g)?;
    if rp.p.iter().any(|&p| p >= 1.0) {
        return Err(Error::Domain(
            "the grand coupling needs every p_e < 1".into(),
        ));
    }
    let m = g.edge_count();
    if m == 0 || m > 64 {
        return Err(Error::Argument(format!("edge count {m} outside 1..=64")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut top = RCConfig::full(m);
    let mut bottom = RCConfig::empty();
    for step in 1..=step_cap {
        let e = rng.gen_range(0..m);
        let u01: f64 = rng.gen();
        top = glauber_step(g, rp, top, e, u01);
        bottom = glauber_step(g, rp, bottom, e, u01);
        if !bottom.is_subset_of(&top) {
            return Err(Error::Numeric(format!(
                "monotonicity violated at step {step} (seed {seed})"
            )));
        }
        if top == bottom {
            return Ok(CouplingTrace {
                steps: step,
                coalesced: true,
                top_state: top,
                bottom_state: bottom,
                seed,
            });
        }
    }
    Ok(CouplingTrace {
        steps: step_cap,
        coalesced: false,
        top_state: top,
        bottom_state: bottom,
        seed,
    })
}

/// Visit frequencies of a long single-chain run, for comparing against the
/// exact distribution on small instances. Returns one frequency per edge
/// subset mask.
pub fn glauber_histogram(
    g: &Graph,
    rp: &RCParams,
    seed: u64,
    steps: u64,
    burn_in: u64,
) -> Result<Vec<f64>> {
    rp.validate(g)?;
    let m = g.edge_count();
    if m > 20 {
        return Err(Error::Resource(format!(
            "histogram over 2^{m} states is not reasonable"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = RCConfig::empty();
    let mut counts = vec![0u64; 1 << m];
    for step in 0..steps {
        let e = rng.gen_range(0..m);
        let u01: f64 = rng.gen();
        state = glauber_step(g, rp, state, e, u01);
        if step >= burn_in {
            counts[state.mask as usize] += 1;
        }
    }
    let total = (steps - burn_in) as f64;
    Ok(counts.into_iter().map(|c| c as f64 / total).collect())
}

/// Exact stationary distribution over edge subsets.
pub fn rc_distribution(g: &Graph, rp: &RCParams) -> Result<Vec<f64>> {
    let m = g.edge_count();
    if m > 20 {
        return Err(Error::Resource(format!("2^{m} states is not reasonable")));
    }
    let z = rc_z_exact(g, rp, &EdgePinning::new())?;
    Ok((0u64..1 << m)
        .map(|mask| rc_weight(g, rp, RCConfig { mask }) / z)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k2() -> Graph {
        Graph::new(2, vec![(0, 1)]).unwrap()
    }

    fn path(n: usize) -> Graph {
        Graph::new(n, (0..n - 1).map(|i| (i, i + 1)).collect()).unwrap()
    }

    #[test]
    fn rc_z_examples() {
        let g = k2();
        let rp = RCParams::uniform(&g, 0.5, 1.0);
        let z = rc_z_exact(&g, &rp, &EdgePinning::new()).unwrap();
        assert!((z - 3.0).abs() < 1e-14);

        let edgeless = Graph::new(3, vec![]).unwrap();
        let rp = RCParams::uniform(&edgeless, 0.5, 0.25);
        let z = rc_z_exact(&edgeless, &rp, &EdgePinning::new()).unwrap();
        assert!((z - 1.25f64.powi(3)).abs() < 1e-14);

        // p_e = 1 forces the edge in: only the contracted sum survives
        let g = k2();
        let rp = RCParams::uniform(&g, 1.0, 0.5);
        let z = rc_z_exact(&g, &rp, &EdgePinning::new()).unwrap();
        assert!((z - (1.0 + 0.25)).abs() < 1e-14);
    }

    #[test]
    fn ising_translation() {
        let g = k2();
        let (zi, zrc) = ising_rc_consistency(&g, &[2.0], &[1.0, 1.0]).unwrap();
        assert!((zi - 6.0).abs() < 1e-12);
        assert!((zrc - 6.0).abs() < 1e-12);

        // beta = 1 means p = 0: everything factorizes
        let g = path(4);
        let (zi, zrc) = ising_rc_consistency(&g, &[1.0; 3], &[0.5; 4]).unwrap();
        assert!((zi - zrc).abs() < 1e-12 * zi.abs());
        assert!((zi - 1.5f64.powi(4)).abs() < 1e-12);

        let tri = Graph::new(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap();
        let (zi, zrc) = ising_rc_consistency(&tri, &[3.0; 3], &[0.5; 3]).unwrap();
        assert!((zi - zrc).abs() <= 1e-10 * zi.abs());
    }

    #[test]
    fn marginal_examples() {
        let g = k2();
        let rp = RCParams::uniform(&g, 0.5, 1.0);
        let out = rc_edge_marginal(&g, &rp, 0, &EdgePinning::new(), MarginalRoute::Direct).unwrap();
        assert!((out - 2.0 / 3.0).abs() < 1e-14);

        let rp = RCParams::uniform(&g, 0.0, 0.7);
        let out = rc_edge_marginal(&g, &rp, 0, &EdgePinning::new(), MarginalRoute::Direct).unwrap();
        assert!((out - 1.0).abs() < 1e-14);

        // dual routes agree under a pinned-in condition
        let g = path(3);
        let rp = RCParams::uniform(&g, 0.5, 0.8);
        let mut cond = EdgePinning::new();
        cond.insert(0, true);
        let a = rc_edge_marginal(&g, &rp, 1, &cond, MarginalRoute::Direct).unwrap();
        let b = rc_edge_marginal(&g, &rp, 1, &cond, MarginalRoute::ViaIsing).unwrap();
        assert!((a - b).abs() <= 1e-10);
    }

    #[test]
    fn update_probability_cases() {
        // non-cut edge: probability is exactly p_e
        let tri = Graph::new(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap();
        let rp = RCParams::uniform(&tri, 0.37, 0.6);
        let full = RCConfig::full(3);
        assert_eq!(update_probability(&tri, &rp, full, 0), 0.37);

        // cut edge with unit weights: p/(2-p)
        let g = k2();
        let rp = RCParams::uniform(&g, 0.5, 1.0);
        let p = update_probability(&g, &rp, RCConfig::empty(), 0);
        assert!((p - 1.0 / 3.0).abs() < 1e-14);
        let rp = RCParams::uniform(&g, 0.3, 1.0);
        let p = update_probability(&g, &rp, RCConfig::empty(), 0);
        assert!((p - 0.3 / 1.7).abs() < 1e-14);
    }

    #[test]
    fn update_probability_bounds() {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let mut rng = StdRng::seed_from_u64(97);
        let g = Graph::new(6, vec![(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 5), (1, 4)])
            .unwrap();
        for _ in 0..200 {
            let beta: Vec<f64> = (0..g.edge_count()).map(|_| rng.gen_range(1.2..6.0)).collect();
            let lambda: Vec<f64> = (0..6).map(|_| rng.gen_range(0.0..=1.0)).collect();
            let rp = RCParams::from_ising(&beta, &lambda);
            let state = RCConfig {
                mask: rng.gen_range(0..1 << g.edge_count()),
            };
            let e = rng.gen_range(0..g.edge_count());
            let p = update_probability(&g, &rp, state, e);
            assert!(p <= rp.p[e] + 1e-14);
            assert!(p >= rp.p[e] / 6.0 - 1e-14);
        }
    }

    #[test]
    fn single_edge_coupling_coalesces_quickly() {
        let g = k2();
        let rp = RCParams::uniform(&g, 0.5, 0.8);
        let trace = coupling_time(&g, &rp, 42, 1000).unwrap();
        assert!(trace.coalesced);
        assert_eq!(trace.top_state, trace.bottom_state);
        assert!(trace.steps <= 10);
    }

    #[test]
    fn coupling_is_monotone_across_seeds() {
        let g = Graph::new(6, vec![(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 5)]).unwrap();
        let rp = RCParams::uniform(&g, 0.5, 1.0);
        for seed in 0..50 {
            // coupling_time errors out if containment ever breaks
            let trace = coupling_time(&g, &rp, seed, 5000).unwrap();
            assert!(trace.coalesced, "seed {seed} did not coalesce");
        }
    }

    #[test]
    fn coupling_rejects_p_one()
    {
        let g = k2();
        let rp = RCParams::uniform(&g, 1.0, 1.0);
        assert!(matches!(coupling_time(&g, &rp, 1, 10), Err(Error::Domain(_))));
    }
}
