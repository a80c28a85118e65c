//! Shared helpers for the integration tests: seeded random Grassmann points
//! and a brute-force critical-angle search used as an oracle for the
//! SVD-based Jordan angles.
#![allow(dead_code)] // each test target compiles its own copy and uses a subset

use gbk_core::grassmann::{self, GrassmannPoint};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random oriented n-plane in R^{n+m} from uniform [-1, 1] spans.
pub fn random_point(r: &mut ChaCha8Rng, n: usize, m: usize) -> GrassmannPoint {
    loop {
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..n + m).map(|_| r.gen_range(-1.0..1.0)).collect())
            .collect();
        if let Ok(p) = grassmann::from_basis(&rows) {
            return p;
        }
    }
}

/// A uniformly random orthonormal basis of R^d (rows), via QR of a random
/// square matrix.
pub fn random_orthonormal(r: &mut ChaCha8Rng, d: usize) -> DMatrix<f64> {
    loop {
        let a = DMatrix::from_fn(d, d, |_, _| r.gen_range(-1.0..1.0));
        let qr = a.qr();
        let q = qr.q();
        let det: f64 = q.determinant();
        if det.abs() > 0.5 {
            return q.transpose();
        }
    }
}

fn zoom1d<F: Fn(f64) -> f64>(eval: F, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let pts = 400usize;
    let mut best = (f64::NEG_INFINITY, lo);
    for _ in 0..4 {
        let step = (hi - lo) / pts as f64;
        for i in 0..=pts {
            let x = lo + step * i as f64;
            let v = eval(x);
            if v > best.0 {
                best = (v, x);
            }
        }
        lo = best.1 - 2.0 * step;
        hi = best.1 + 2.0 * step;
    }
    best
}

fn zoom2d<F: Fn(f64, f64) -> f64>(eval: F, mut bounds: [f64; 4]) -> (f64, f64, f64) {
    let (pu, pv) = (100usize, 200usize);
    let mut best = (f64::NEG_INFINITY, bounds[0], bounds[2]);
    for _ in 0..4 {
        let su = (bounds[1] - bounds[0]) / pu as f64;
        let sv = (bounds[3] - bounds[2]) / pv as f64;
        for i in 0..=pu {
            let u = bounds[0] + su * i as f64;
            for j in 0..=pv {
                let v = bounds[2] + sv * j as f64;
                let val = eval(u, v);
                if val > best.0 {
                    best = (val, u, v);
                }
            }
        }
        bounds = [best.1 - 2.0 * su, best.1 + 2.0 * su, best.2 - 2.0 * sv, best.2 + 2.0 * sv];
    }
    best
}

fn complement_basis(found: &[DVector<f64>], n: usize) -> Vec<DVector<f64>> {
    let mut basis: Vec<DVector<f64>> = Vec::new();
    for k in 0..n {
        let mut v = DVector::zeros(n);
        v[k] = 1.0;
        for f in found.iter().chain(basis.iter()) {
            let d = f.dot(&v);
            v -= f * d;
        }
        if v.norm() > 1e-8 {
            basis.push(v.normalize());
        }
    }
    basis
}

/// Critical angles between two planes by direct maximization of |M c| over
/// unit coefficient vectors, with deflation; returns the same angles as the
/// SVD route (the largest min(n, m) of them, in decreasing order).
pub fn brute_force_angles(p: &GrassmannPoint, q: &GrassmannPoint) -> Vec<f64> {
    let mat = q.frame() * p.frame().transpose();
    let n = p.n();
    assert!(n <= 3, "brute-force search implemented for plane dimension <= 3");
    let mut found: Vec<DVector<f64>> = Vec::new();
    let mut sigmas: Vec<f64> = Vec::new();
    for _ in 0..n {
        let basis = complement_basis(&found, n);
        let eval = |c: &[f64]| -> f64 {
            let mut v = DVector::zeros(n);
            for (ci, b) in c.iter().zip(&basis) {
                v += b * *ci;
            }
            (&mat * &v).norm()
        };
        let (sigma, coeffs): (f64, Vec<f64>) = match basis.len() {
            1 => (eval(&[1.0]), vec![1.0]),
            2 => {
                let (s, phi) = zoom1d(|t: f64| eval(&[t.cos(), t.sin()]), 0.0, std::f64::consts::PI);
                (s, vec![phi.cos(), phi.sin()])
            }
            3 => {
                let (s, u, v) = zoom2d(
                    |u: f64, v: f64| eval(&[u.cos(), u.sin() * v.cos(), u.sin() * v.sin()]),
                    [0.0, std::f64::consts::PI, 0.0, 2.0 * std::f64::consts::PI],
                );
                (s, vec![u.cos(), u.sin() * v.cos(), u.sin() * v.sin()])
            }
            other => panic!("unexpected search dimension {other}"),
        };
        let mut v = DVector::zeros(n);
        for (ci, b) in coeffs.iter().zip(&basis) {
            v += b * *ci;
        }
        found.push(v.normalize());
        sigmas.push(sigma.min(1.0));
    }
    // sigmas decrease; keep the p smallest (largest angles), angles decreasing
    let p_count = p.n().min(p.m());
    let mut angles: Vec<f64> = sigmas
        .iter()
        .skip(n - p_count)
        .map(|s| s.clamp(0.0, 1.0).acos())
        .collect();
    angles.sort_by(|a, b| b.partial_cmp(a).unwrap());
    angles
}
