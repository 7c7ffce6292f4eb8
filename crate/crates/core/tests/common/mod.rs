#![allow(dead_code)]

use handsoff::linalg::Lu;
use handsoff::{LinearSystem, LpProblem, Matrix};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Minimum of cᵀz over all basic feasible points of {Az = b, 0 ≤ z ≤ 1}
/// with a nonsingular basis on all rows.
pub fn enumerate_vertices(p: &LpProblem) -> f64 {
    let (r, q) = (p.num_rows(), p.num_vars());
    let mut best = f64::INFINITY;
    let mut basis: Vec<usize> = (0..r).collect();
    loop {
        let mut bmat = Vec::with_capacity(r * r);
        for i in 0..r {
            for &j in &basis {
                bmat.push(p.a_eq[(i, j)]);
            }
        }
        if let Some(lu) = Lu::factor(r, &bmat, 1e-12) {
            let nonbasic: Vec<usize> = (0..q).filter(|j| !basis.contains(j)).collect();
            for mask in 0u32..(1 << nonbasic.len()) {
                let mut z = vec![0.0; q];
                for (t, &j) in nonbasic.iter().enumerate() {
                    z[j] = f64::from((mask >> t) & 1);
                }
                let rhs: Vec<f64> = (0..r)
                    .map(|i| p.b_eq[i] - nonbasic.iter().map(|&j| p.a_eq[(i, j)] * z[j]).sum::<f64>())
                    .collect();
                let zb = lu.solve(&rhs);
                if zb.iter().all(|v| (-1e-10..=1.0 + 1e-10).contains(v)) {
                    for (t, &j) in basis.iter().enumerate() {
                        z[j] = zb[t];
                    }
                    best = best.min(p.c.iter().zip(&z).map(|(a, b)| a * b).sum());
                }
            }
        }
        // Next r-combination of 0..q.
        let mut i = r;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if basis[i] < q - r + i {
                basis[i] += 1;
                for k in i + 1..r {
                    basis[k] = basis[k - 1] + 1;
                }
                break;
            }
        }
    }
}

pub fn random_feasible(rng: &mut ChaCha8Rng) -> LpProblem {
    let rows = rng.gen_range(1..=3);
    let q = rng.gen_range(rows + 1..=12);
    let a = Matrix::new(rows, q, (0..rows * q).map(|_| rng.gen_range(-2.0..2.0)).collect()).unwrap();
    let inside: Vec<f64> = (0..q).map(|_| rng.gen_range(0.0..1.0)).collect();
    let b = a.mul_vec(&inside).unwrap();
    let c = (0..q).map(|_| rng.gen_range(-1.0..1.0)).collect();
    LpProblem::new(c, a, b).unwrap()
}

pub fn random_system(rng: &mut ChaCha8Rng, n: usize) -> LinearSystem {
    let a = Matrix::new(n, n, (0..n * n).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap();
    let b = Matrix::new(n, 1, (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap();
    LinearSystem::new(a, b).unwrap()
}
