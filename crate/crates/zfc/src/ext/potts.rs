//! Potts model in Tutte form: the subset expansion
//! `Z_G(q,w) = sum_{F subseteq E} q^{kappa(V,F)} z^{|F|}` with `z = w - 1`,
//! cross-checked against the spin sum at integer `q`, plus the divisibility
//! check `(w-1)^{d_G(e1,e2)}` on the product difference (no `+1` here).

use num::{pow::pow, BigInt, BigRational, Zero};

use crate::error::{Error, Result};
use crate::exact::enumeration_cap;
use crate::graph::Graph;
use crate::ldc::{divides, LdcReport};
use crate::rational::RationalPoly;

const DEFAULT_POTTS_EDGE_CAP: usize = 24;

/// Subset-expansion polynomial in `z = w - 1` with exact component counts.
pub fn potts_z_tutte(g: &Graph, q: u32) -> Result<RationalPoly> {
    if q == 0 {
        return Err(Error::Argument("q must be positive".into()));
    }
    let m = g.edge_count();
    let cap = enumeration_cap(DEFAULT_POTTS_EDGE_CAP);
    if m > cap {
        return Err(Error::Resource(format!(
            "{m} edges exceed the enumeration cap {cap}"
        )));
    }
    let n = g.vertex_count();
    let qi = BigInt::from(q);
    let mut coeffs = vec![BigRational::zero(); m + 1];
    let mut parent = vec![0usize; n];
    for mask in 0u64..(1u64 << m) {
        for (v, p) in parent.iter_mut().enumerate() {
            *p = v;
        }
        fn find(parent: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while parent[r] != r {
                r = parent[r];
            }
            let mut c = x;
            while parent[c] != r {
                let next = parent[c];
                parent[c] = r;
                c = next;
            }
            r
        }
        let mut components = n;
        for (e, &(u, v)) in g.edges().iter().enumerate() {
            if mask >> e & 1 == 1 {
                let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
                if ru != rv {
                    parent[ru.max(rv)] = ru.min(rv);
                    components -= 1;
                }
            }
        }
        coeffs[mask.count_ones() as usize] +=
            BigRational::from_integer(pow(qi.clone(), components));
    }
    Ok(RationalPoly::from_coeffs(coeffs))
}

/// Spin-sum definition at a rational activity, for cross-checking the
/// Tutte form at integer `q`.
pub fn potts_z_spin(g: &Graph, q: u32, w: &BigRational) -> Result<BigRational> {
    if q == 0 {
        return Err(Error::Argument("q must be positive".into()));
    }
    let n = g.vertex_count();
    if (q as f64).powi(n as i32) > 4e6 {
        return Err(Error::Resource(format!("{q}^{n} colourings is too many")));
    }
    let mut total = BigRational::zero();
    let mut colour = vec![0u32; n];
    loop {
        let mono = g
            .edges()
            .iter()
            .filter(|&&(u, v)| colour[u] == colour[v])
            .count();
        total += pow(w.clone(), mono);
        // odometer increment
        let mut i = 0;
        loop {
            if i == n {
                return Ok(total);
            }
            colour[i] += 1;
            if colour[i] < q {
                break;
            }
            colour[i] = 0;
            i += 1;
        }
    }
}

/// Divisibility for the Potts product difference:
/// `(w-1)^{d_G(e1,e2)}` divides
/// `Z_{G-e1} Z_{G-e2} - Z_G Z_{G-e1-e2}` (note: the exponent is the bare
/// distance, with no `+1`).
pub fn potts_ldc(g: &Graph, q: u32, e1: usize, e2: usize) -> Result<LdcReport> {
    if e1 == e2 {
        return Err(Error::Argument("probe edges must be distinct".into()));
    }
    g.edge(e1)?;
    g.edge(e2)?;
    let z = potts_z_tutte(g, q)?;
    let z1 = potts_z_tutte(&g.delete_edges(&[e1])?, q)?;
    let z2 = potts_z_tutte(&g.delete_edges(&[e2])?, q)?;
    let z12 = potts_z_tutte(&g.delete_edges(&[e1, e2])?, q)?;
    let difference = z1.mul(&z2).sub(&z.mul(&z12));
    let required = match g.edge_distance(e1, &[e2])? {
        Some(d) => d,
        None => 2 * g.edge_count() + 1,
    };
    Ok(divides(&difference, required))
}
