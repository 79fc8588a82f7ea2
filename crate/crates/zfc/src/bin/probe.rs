use num::complex::Complex64;
use num::{BigRational, FromPrimitive, ToPrimitive, Zero};
use std::time::Instant;
use zfc::enumerate;
use zfc::exact::{exact_z_poly, RationalEvaluation};
use zfc::fptas::edge_ratio_series_with;
use zfc::graph::{Graph, Pinning};

fn exact_taylor(g: &Graph, beta: i64, e: usize, k: usize) -> Vec<BigRational> {
    let b: Vec<BigRational> = vec![BigRational::from_i64(beta).unwrap(); g.edge_count()];
    let l = vec![BigRational::from_i64(1).unwrap(); g.vertex_count()];
    let den = exact_z_poly(g, &b, &l, &RationalEvaluation::new(), &Pinning::new()).unwrap();
    let gm = g.delete_edges(&[e]).unwrap();
    let bm: Vec<BigRational> = vec![BigRational::from_i64(beta).unwrap(); gm.edge_count()];
    let num = exact_z_poly(&gm, &bm, &l, &RationalEvaluation::new(), &Pinning::new()).unwrap();
    let mut q = vec![BigRational::zero(); k + 1];
    for j in 0..=k {
        let mut s = num.coeff(j);
        for i in 0..j {
            s -= &q[i] * den.coeff(j - i);
        }
        q[j] = s / den.coeff(0);
    }
    q
}

fn main() {
    let n8 = enumerate::connected_graphs(8);
    let g = n8.iter().find(|gg| gg.edge_count() == 14).unwrap().to_graph();
    for beta in [2i64, 5] {
        let t = Instant::now();
        let q = exact_taylor(&g, beta, 13, 64);
        eprintln!("exact_taylor beta={beta}: {:?}", t.elapsed());
        for k in [16usize, 32, 64] {
            let t = Instant::now();
            let s = edge_ratio_series_with(&g, beta as f64, 13, k, 1e-8).unwrap();
            let mut worst = (0usize, 0.0f64);
            for j in 0..=k {
                let err = (s.coeff(j) - Complex64::new(q[j].to_f64().unwrap(), 0.0)).norm();
                if err > worst.1 { worst = (j, err); }
            }
            println!("beta={beta} k={k:3}: worst coeff err {:.3e} at j={} ({:?})", worst.1, worst.0, t.elapsed());
        }
    }
}
