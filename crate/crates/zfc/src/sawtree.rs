//! Self-avoiding-walk tree construction and the tree recursion producing
//! truncated marginal-ratio series.
//!
//! The construction follows the standard rule: walks start at the root,
//! never revisit a path vertex, stop at boundary-pinned vertices, and close
//! cycles into pinned leaf copies. The cycle-closing pin is fixed by the
//! neighbour-id ordering at the revisited vertex: the leaf copy of `w` is
//! pinned plus when the closing edge is greater (in `w`'s ordering) than the
//! edge through which the walk left `w`, and minus when smaller.
//!
//! Series arithmetic runs in the uniform field variable: a free node with
//! children `c_1..c_d` has `R = field * prod_i (beta R_{c_i} + 1)/(R_{c_i} +
//! beta)`, a pinned-plus child contributes the constant factor `beta`, a
//! pinned-minus child `1/beta`, and a free frontier leaf the zero series
//! (`R(0) = 0` for every free vertex, so the cut is lossless up to the
//! depth the tree was built for).

use num::complex::Complex64;

use crate::error::{Error, Result};
use crate::graph::{Graph, Pinning, Spin};
use crate::series::TruncatedSeries;

/// Pin state of a SAW-tree node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PinState {
    Free,
    Plus,
    Minus,
}

/// Node of a (depth-truncated) self-avoiding-walk tree.
#[derive(Debug, Clone)]
pub struct SawNode {
    /// Vertex of the original graph this node copies.
    pub vertex: usize,
    pub pin: PinState,
    /// Distance from the root of the tree.
    pub depth: usize,
    /// Expansion levels that were requested below this node at build time.
    pub budget: usize,
    /// True when this free node had its children cut by the depth cap.
    pub truncated: bool,
    /// True when no descendant anywhere below was cut.
    pub fully_expanded: bool,
    pub children: Vec<SawNode>,
}

impl SawNode {
    /// Number of nodes in the subtree (including self).
    pub fn size(&self) -> usize {
        1 + self.children.iter().map(SawNode::size).sum::<usize>()
    }

    pub fn max_child_count(&self) -> usize {
        self.children
            .iter()
            .map(SawNode::max_child_count)
            .max()
            .unwrap_or(0)
            .max(self.children.len())
    }
}

/// Builds the SAW tree of `g` rooted at `root`, truncated at depth `k`.
/// Walks reaching a vertex pinned in `pin` end in a leaf with that pin;
/// walks closing a cycle end in a leaf pinned by the ordering rule; free
/// nodes at depth `k` become frontier leaves.
pub fn build_saw_tree(g: &Graph, root: usize, pin: &Pinning, k: usize) -> Result<SawNode> {
    if root >= g.vertex_count() {
        return Err(Error::Argument(format!("root {root} out of range")));
    }
    if pin.contains_key(&root) {
        return Err(Error::Argument(format!("root {root} is pinned")));
    }
    for &v in pin.keys() {
        if v >= g.vertex_count() {
            return Err(Error::Argument(format!("pinned vertex {v} out of range")));
        }
    }
    let mut path = vec![root];
    let mut pos = vec![usize::MAX; g.vertex_count()];
    pos[root] = 0;
    Ok(expand(g, pin, &mut path, &mut pos, 0, k))
}

/// Builds the untruncated tree: self-avoiding walks on `n` vertices cannot
/// exceed depth `n`, so a budget of `vertex_count` expands everything.
pub fn build_full_saw_tree(g: &Graph, root: usize, pin: &Pinning) -> Result<SawNode> {
    build_saw_tree(g, root, pin, g.vertex_count())
}

fn expand(
    g: &Graph,
    pin: &Pinning,
    path: &mut Vec<usize>,
    pos: &mut Vec<usize>,
    depth: usize,
    k: usize,
) -> SawNode {
    let v = *path.last().unwrap();
    let parent = if path.len() >= 2 {
        Some(path[path.len() - 2])
    } else {
        None
    };
    let budget = k - depth;
    let mut has_candidates = false;
    let mut children = Vec::new();
    let mut fully = true;
    for &(x, _) in g.neighbors(v) {
        if Some(x) == parent {
            continue;
        }
        has_candidates = true;
        if budget == 0 {
            continue;
        }
        if let Some(&spin) = pin.get(&x) {
            children.push(SawNode {
                vertex: x,
                pin: match spin {
                    Spin::Plus => PinState::Plus,
                    Spin::Minus => PinState::Minus,
                },
                depth: depth + 1,
                budget: budget - 1,
                truncated: false,
                fully_expanded: true,
                children: Vec::new(),
            });
        } else if pos[x] != usize::MAX {
            // cycle closes at x = path[i]; compare the closing edge (x, v)
            // against the exit edge (x, path[i+1]) in x's neighbour order
            let exit = path[pos[x] + 1];
            let pin_state = if v > exit { PinState::Plus } else { PinState::Minus };
            children.push(SawNode {
                vertex: x,
                pin: pin_state,
                depth: depth + 1,
                budget: budget - 1,
                truncated: false,
                fully_expanded: true,
                children: Vec::new(),
            });
        } else {
            pos[x] = path.len();
            path.push(x);
            let child = expand(g, pin, path, pos, depth + 1, k);
            path.pop();
            pos[x] = usize::MAX;
            fully &= child.fully_expanded;
            children.push(child);
        }
    }
    let truncated = budget == 0 && has_candidates;
    SawNode {
        vertex: v,
        pin: PinState::Free,
        depth,
        budget,
        truncated,
        fully_expanded: fully && !truncated,
        children,
    }
}

/// Accumulates one child's factor into the running product at the product's
/// bound. Shared by the materialized-tree walk and the lazy graph walk so
/// both produce identical floating-point results.
fn apply_child_factor(
    product: TruncatedSeries,
    child: ChildTerm,
    beta: f64,
) -> Result<TruncatedSeries> {
    match child {
        ChildTerm::Plus => Ok(product.scale(Complex64::new(beta, 0.0))),
        ChildTerm::Minus => Ok(product.scale(Complex64::new(1.0 / beta, 0.0))),
        ChildTerm::Series(r) => {
            let b = Complex64::new(beta, 0.0);
            let num = r.scale(b).add_constant(Complex64::new(1.0, 0.0));
            let den = r.add_constant(b);
            product.mul(&num.div(&den)?)
        }
    }
}

enum ChildTerm {
    Plus,
    Minus,
    Series(TruncatedSeries),
}

/// Truncated marginal-ratio series of a free node in the uniform field
/// variable, to degree `k`. A frontier leaf yields the zero series at any
/// bound; asking for more degrees than the subtree was built for is an
/// error.
pub fn ratio_series(node: &SawNode, beta: f64, k: usize) -> Result<TruncatedSeries> {
    if node.pin != PinState::Free {
        return Err(Error::Argument(
            "ratio series is defined at free nodes; pinned nodes enter as constant factors".into(),
        ));
    }
    if node.truncated {
        return Ok(TruncatedSeries::zero(k));
    }
    if k > node.budget && !node.fully_expanded {
        return Err(Error::Argument(format!(
            "series to degree {k} needs build depth {k}, tree provides {}",
            node.budget
        )));
    }
    ratio_series_rec(node, beta, k)
}

fn ratio_series_rec(node: &SawNode, beta: f64, k: usize) -> Result<TruncatedSeries> {
    if k == 0 {
        return Ok(TruncatedSeries::zero(0));
    }
    let mut product = TruncatedSeries::constant(Complex64::new(1.0, 0.0), k - 1);
    for child in &node.children {
        let term = match child.pin {
            PinState::Plus => ChildTerm::Plus,
            PinState::Minus => ChildTerm::Minus,
            PinState::Free => {
                if child.truncated {
                    ChildTerm::Series(TruncatedSeries::zero(k - 1))
                } else {
                    ChildTerm::Series(ratio_series_rec(child, beta, k - 1)?)
                }
            }
        };
        product = apply_child_factor(product, term, beta)?;
    }
    Ok(product.shift_up_grow())
}

/// Lazily expanded equivalent of [`build_saw_tree`] + [`ratio_series`]:
/// walks the graph directly, materializing nothing, with memory `O(k
/// Delta)`. Produces the same series as the materialized route.
pub fn saw_ratio_series(
    g: &Graph,
    root: usize,
    pin: &Pinning,
    beta: f64,
    k: usize,
) -> Result<TruncatedSeries> {
    if root >= g.vertex_count() {
        return Err(Error::Argument(format!("root {root} out of range")));
    }
    if pin.contains_key(&root) {
        return Err(Error::Argument(format!("root {root} is pinned")));
    }
    let mut path = vec![root];
    let mut pos = vec![usize::MAX; g.vertex_count()];
    pos[root] = 0;
    lazy_series(g, pin, &mut path, &mut pos, beta, k)
}

fn lazy_series(
    g: &Graph,
    pin: &Pinning,
    path: &mut Vec<usize>,
    pos: &mut Vec<usize>,
    beta: f64,
    k: usize,
) -> Result<TruncatedSeries> {
    if k == 0 {
        return Ok(TruncatedSeries::zero(0));
    }
    let v = *path.last().unwrap();
    let parent = if path.len() >= 2 {
        Some(path[path.len() - 2])
    } else {
        None
    };
    let mut product = TruncatedSeries::constant(Complex64::new(1.0, 0.0), k - 1);
    for &(x, _) in g.neighbors(v) {
        if Some(x) == parent {
            continue;
        }
        let term = if let Some(&spin) = pin.get(&x) {
            match spin {
                Spin::Plus => ChildTerm::Plus,
                Spin::Minus => ChildTerm::Minus,
            }
        } else if pos[x] != usize::MAX {
            let exit = path[pos[x] + 1];
            if v > exit {
                ChildTerm::Plus
            } else {
                ChildTerm::Minus
            }
        } else {
            pos[x] = path.len();
            path.push(x);
            let r = lazy_series(g, pin, path, pos, beta, k - 1)?;
            path.pop();
            pos[x] = usize::MAX;
            ChildTerm::Series(r)
        };
        product = apply_child_factor(product, term, beta)?;
    }
    Ok(product.shift_up_grow())
}

/// Generic-scalar version of the lazy walk, used by the approximation
/// algorithm so it can escalate precision when the intermediate
/// coefficients outgrow doubles. Tracks the largest intermediate
/// coefficient magnitude seen in `max_mag`.
pub(crate) fn saw_ratio_gseries<S: crate::scalar::SeriesScalar>(
    g: &Graph,
    root: usize,
    pin: &Pinning,
    beta: f64,
    k: usize,
    proto: &S,
    max_mag: &mut f64,
) -> Result<crate::series::engine::GSeries<S>> {
    if root >= g.vertex_count() {
        return Err(Error::Argument(format!("root {root} out of range")));
    }
    if pin.contains_key(&root) {
        return Err(Error::Argument(format!("root {root} is pinned")));
    }
    let mut path = vec![root];
    let mut pos = vec![usize::MAX; g.vertex_count()];
    pos[root] = 0;
    lazy_gseries(g, pin, &mut path, &mut pos, beta, k, proto, max_mag)
}

#[allow(clippy::too_many_arguments)]
fn lazy_gseries<S: crate::scalar::SeriesScalar>(
    g: &Graph,
    pin: &Pinning,
    path: &mut Vec<usize>,
    pos: &mut Vec<usize>,
    beta: f64,
    k: usize,
    proto: &S,
    max_mag: &mut f64,
) -> Result<crate::series::engine::GSeries<S>> {
    use crate::series::engine::GSeries;
    if k == 0 {
        return Ok(GSeries::constant(proto, 0.0, 0));
    }
    let v = *path.last().unwrap();
    let parent = if path.len() >= 2 {
        Some(path[path.len() - 2])
    } else {
        None
    };
    let mut product = GSeries::constant(proto, 1.0, k - 1);
    for &(x, _) in g.neighbors(v) {
        if Some(x) == parent {
            continue;
        }
        if let Some(&spin) = pin.get(&x) {
            product = match spin {
                Spin::Plus => product.scale_f64(beta),
                Spin::Minus => product.scale_f64(1.0 / beta),
            };
        } else if pos[x] != usize::MAX {
            let exit = path[pos[x] + 1];
            product = if v > exit {
                product.scale_f64(beta)
            } else {
                product.scale_f64(1.0 / beta)
            };
        } else {
            pos[x] = path.len();
            path.push(x);
            let r = lazy_gseries(g, pin, path, pos, beta, k - 1, proto, max_mag)?;
            path.pop();
            pos[x] = usize::MAX;
            let num = r.scale_f64(beta).add_constant_f64(1.0);
            let den = r.add_constant_f64(beta);
            let factor = num.mul(&den.recip());
            *max_mag = max_mag.max(factor.max_mag());
            product = product.mul(&factor);
        }
    }
    *max_mag = max_mag.max(product.max_mag());
    Ok(product.shift_up_grow())
}

/// Numeric marginal ratio of the tree at a concrete field value. Frontier
/// leaves contribute `R = 0`, which is the minus-boundary truncation; on a
/// fully expanded tree this is the exact root ratio of the original graph.
pub fn ratio_value(node: &SawNode, beta: f64, lambda: Complex64) -> Result<Complex64> {
    if node.pin != PinState::Free {
        return Err(Error::Argument("ratio value is defined at free nodes".into()));
    }
    Ok(ratio_value_rec(node, beta, lambda))
}

fn ratio_value_rec(node: &SawNode, beta: f64, lambda: Complex64) -> Complex64 {
    if node.truncated {
        return Complex64::new(0.0, 0.0);
    }
    let mut product = Complex64::new(1.0, 0.0);
    for child in &node.children {
        product *= match child.pin {
            PinState::Plus => Complex64::new(beta, 0.0),
            PinState::Minus => Complex64::new(1.0 / beta, 0.0),
            PinState::Free => {
                let r = ratio_value_rec(child, beta, lambda);
                (beta * r + 1.0) / (r + beta)
            }
        };
    }
    lambda * product
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::exact_marginal_ratio;
    use crate::graph::IsingParams;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn path_graph(n: usize) -> Graph {
        Graph::new(n, (0..n - 1).map(|i| (i, i + 1)).collect()).unwrap()
    }

    fn triangle() -> Graph {
        Graph::new(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    #[test]
    fn saw_tree_of_a_tree_is_the_tree() {
        let g = path_graph(4);
        let t = build_full_saw_tree(&g, 0, &Pinning::new()).unwrap();
        assert_eq!(t.vertex, 0);
        assert_eq!(t.children.len(), 1);
        assert_eq!(t.children[0].vertex, 1);
        assert_eq!(t.children[0].children.len(), 1);
        assert_eq!(t.children[0].children[0].vertex, 2);
        assert_eq!(t.children[0].children[0].children[0].vertex, 3);
        assert!(t.fully_expanded);
        assert_eq!(t.size(), 4);

        // pins are copied
        let mut pin = Pinning::new();
        pin.insert(2, Spin::Plus);
        let t = build_full_saw_tree(&g, 0, &pin).unwrap();
        let leaf = &t.children[0].children[0];
        assert_eq!(leaf.pin, PinState::Plus);
        assert!(leaf.children.is_empty());
    }

    #[test]
    fn triangle_walks_close_with_opposite_pins() {
        // self-avoiding walks from 0: 0-1, 0-2, 0-1-2, 0-2-1, and the two
        // cycle-closing walks 0-1-2-0 and 0-2-1-0 ending in pinned copies
        let t = build_full_saw_tree(&triangle(), 0, &Pinning::new()).unwrap();
        assert_eq!(t.size(), 7);
        assert_eq!(t.children.len(), 2);
        for child in &t.children {
            assert_eq!(child.children.len(), 1);
            let grandchild = &child.children[0];
            assert_eq!(grandchild.pin, PinState::Free);
            assert_eq!(grandchild.children.len(), 1);
            let leaf = &grandchild.children[0];
            assert_eq!(leaf.vertex, 0);
            assert!(leaf.children.is_empty());
        }
        // walk 0-1-2 closes at 0: closing neighbour 2 > exit neighbour 1 -> plus
        let via1 = t.children.iter().find(|c| c.vertex == 1).unwrap();
        assert_eq!(via1.children[0].children[0].pin, PinState::Plus);
        // walk 0-2-1 closes at 0: closing neighbour 1 < exit neighbour 2 -> minus
        let via2 = t.children.iter().find(|c| c.vertex == 2).unwrap();
        assert_eq!(via2.children[0].children[0].pin, PinState::Minus);
    }

    #[test]
    fn triangle_root_identity_holds() {
        let g = triangle();
        for root in 0..3 {
            let t = build_full_saw_tree(&g, root, &Pinning::new()).unwrap();
            for &(beta, lam) in &[(2.0, 0.5), (1.3, 0.2), (4.0, 0.7)] {
                let tree_ratio = ratio_value(&t, beta, Complex64::new(lam, 0.0)).unwrap();
                let p = IsingParams::uniform(&g, beta, Complex64::new(lam, 0.0));
                let oracle = exact_marginal_ratio(&g, &p, root, &Pinning::new()).unwrap();
                assert!((tree_ratio - oracle).norm() <= 1e-12 * oracle.norm());
            }
        }
    }

    #[test]
    fn depth_zero_is_a_single_leaf() {
        let t = build_saw_tree(&triangle(), 1, &Pinning::new(), 0).unwrap();
        assert_eq!(t.size(), 1);
        assert_eq!(t.pin, PinState::Free);
        assert!(t.truncated);
    }

    #[test]
    fn pinned_root_is_rejected() {
        let mut pin = Pinning::new();
        pin.insert(0, Spin::Minus);
        assert!(build_saw_tree(&triangle(), 0, &pin, 2).is_err());
    }

    #[test]
    fn series_of_pinned_plus_child() {
        let g = Graph::new(2, vec![(0, 1)]).unwrap();
        let mut pin = Pinning::new();
        pin.insert(0, Spin::Plus);
        let t = build_full_saw_tree(&g, 1, &pin).unwrap();
        let s = ratio_series(&t, 2.0, 1).unwrap();
        assert_eq!(s.coeff(0), Complex64::new(0.0, 0.0));
        assert_eq!(s.coeff(1), Complex64::new(2.0, 0.0));
    }

    #[test]
    fn series_of_free_leaf_child() {
        // root with one free leaf child at bound 2: field/beta + field^2 (1 - 1/beta^2)
        let g = Graph::new(2, vec![(0, 1)]).unwrap();
        let beta = 2.0;
        let t = build_full_saw_tree(&g, 0, &Pinning::new()).unwrap();
        let s = ratio_series(&t, beta, 2).unwrap();
        assert!((s.coeff(1) - Complex64::new(1.0 / beta, 0.0)).norm() < 1e-15);
        assert!((s.coeff(2) - Complex64::new(1.0 - 1.0 / (beta * beta), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn frontier_leaf_gives_zero_series() {
        let t = build_saw_tree(&triangle(), 0, &Pinning::new(), 0).unwrap();
        let s = ratio_series(&t, 2.0, 5).unwrap();
        assert_eq!(s, TruncatedSeries::zero(5));
    }

    #[test]
    fn insufficient_build_depth_is_an_error() {
        let g = path_graph(4);
        let t = build_saw_tree(&g, 0, &Pinning::new(), 1).unwrap();
        assert!(ratio_series(&t, 2.0, 3).is_err());
        // but a fully expanded tree answers any bound
        let t = build_full_saw_tree(&g, 0, &Pinning::new()).unwrap();
        assert!(ratio_series(&t, 2.0, 12).is_ok());
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
    fn full_depth_ratio_matches_exact_marginal() {
        let mut rng = StdRng::seed_from_u64(31);
        for _ in 0..25 {
            let n = rng.gen_range(2..=7);
            let g = random_graph(&mut rng, n, 0.5);
            let root = rng.gen_range(0..n);
            let mut pin = Pinning::new();
            if n > 1 && rng.gen_bool(0.5) {
                let mut w = rng.gen_range(0..n);
                while w == root {
                    w = rng.gen_range(0..n);
                }
                pin.insert(w, if rng.gen_bool(0.5) { Spin::Plus } else { Spin::Minus });
            }
            for &lam in &[0.2, 0.5] {
                let beta = rng.gen_range(1.1..4.0);
                let t = build_full_saw_tree(&g, root, &pin).unwrap();
                let tree_ratio = ratio_value(&t, beta, Complex64::new(lam, 0.0)).unwrap();
                let p = IsingParams::uniform(&g, beta, Complex64::new(lam, 0.0));
                let oracle = exact_marginal_ratio(&g, &p, root, &pin).unwrap();
                assert!(
                    (tree_ratio - oracle).norm() <= 1e-10 * oracle.norm().max(1.0),
                    "tree {tree_ratio} vs oracle {oracle} on {:?}",
                    g.edges()
                );
            }
        }
    }

    #[test]
    fn coefficient_stability_under_deeper_builds() {
        let mut rng = StdRng::seed_from_u64(37);
        for _ in 0..20 {
            let n = rng.gen_range(3..=10);
            let g = random_graph(&mut rng, n, 0.4);
            let root = rng.gen_range(0..n);
            let k = rng.gen_range(1..=8);
            let beta = rng.gen_range(1.1..4.0);
            let shallow = build_saw_tree(&g, root, &Pinning::new(), k).unwrap();
            let deep = build_saw_tree(&g, root, &Pinning::new(), k + 5).unwrap();
            let a = ratio_series(&shallow, beta, k).unwrap();
            let b = ratio_series(&deep, beta, k + 5).unwrap();
            assert!(a.max_coeff_distance(&b.truncate(k)) <= 1e-12);
        }
    }

    #[test]
    fn lazy_walk_matches_materialized_tree() {
        let mut rng = StdRng::seed_from_u64(41);
        for _ in 0..15 {
            let n = rng.gen_range(3..=9);
            let g = random_graph(&mut rng, n, 0.5);
            let root = rng.gen_range(0..n);
            let k = rng.gen_range(1..=6);
            let beta = rng.gen_range(1.1..4.0);
            let mut pin = Pinning::new();
            if rng.gen_bool(0.4) {
                let w = (root + 1) % n;
                pin.insert(w, Spin::Minus);
            }
            let tree = build_saw_tree(&g, root, &pin, k).unwrap();
            let a = ratio_series(&tree, beta, k).unwrap();
            let b = saw_ratio_series(&g, root, &pin, beta, k).unwrap();
            assert_eq!(a.coeffs(), b.coeffs());
        }
    }

    #[test]
    fn child_counts_stay_within_max_degree() {
        let mut rng = StdRng::seed_from_u64(43);
        for _ in 0..10 {
            let n = rng.gen_range(3..=8);
            let g = random_graph(&mut rng, n, 0.6);
            let t = build_full_saw_tree(&g, 0, &Pinning::new()).unwrap();
            assert!(t.max_child_count() <= g.max_degree().max(1));
        }
    }
}
