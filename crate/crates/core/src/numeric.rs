//! Numerical utilities: second-order forward jets (value, gradient, Hessian),
//! bisection on monotone brackets, low-discrepancy sampling, and
//! finite-difference helpers with Richardson verification.

use nalgebra::{DMatrix, DVector};

use crate::error::{GeoError, Result};

/// A second-order jet in `n` variables: carries a value together with its
/// exact gradient and Hessian. Arithmetic propagates both, so any expression
/// built from jets yields analytic first and second derivatives.
#[derive(Clone, Debug)]
pub struct Jet2 {
    pub v: f64,
    pub g: DVector<f64>,
    pub h: DMatrix<f64>,
}

impl Jet2 {
    pub fn constant(v: f64, n: usize) -> Self {
        Jet2 {
            v,
            g: DVector::zeros(n),
            h: DMatrix::zeros(n, n),
        }
    }

    /// The `i`-th coordinate variable at value `v`.
    pub fn variable(v: f64, i: usize, n: usize) -> Self {
        let mut g = DVector::zeros(n);
        g[i] = 1.0;
        Jet2 {
            v,
            g,
            h: DMatrix::zeros(n, n),
        }
    }

    /// Jets of all `n` coordinates at the point `x`.
    pub fn variables(x: &[f64]) -> Vec<Jet2> {
        let n = x.len();
        x.iter()
            .enumerate()
            .map(|(i, &v)| Jet2::variable(v, i, n))
            .collect()
    }

    pub fn nvars(&self) -> usize {
        self.g.len()
    }

    /// Chain rule for a scalar function with derivatives `d1`, `d2` at `self.v`.
    fn unary(&self, v: f64, d1: f64, d2: f64) -> Jet2 {
        Jet2 {
            v,
            g: &self.g * d1,
            h: &self.h * d1 + (&self.g * self.g.transpose()) * d2,
        }
    }

    pub fn recip(&self) -> Jet2 {
        let iv = 1.0 / self.v;
        self.unary(iv, -iv * iv, 2.0 * iv * iv * iv)
    }

    pub fn sqrt(&self) -> Jet2 {
        let s = self.v.sqrt();
        self.unary(s, 0.5 / s, -0.25 / (s * s * s))
    }

    pub fn sin(&self) -> Jet2 {
        self.unary(self.v.sin(), self.v.cos(), -self.v.sin())
    }

    pub fn cos(&self) -> Jet2 {
        self.unary(self.v.cos(), -self.v.sin(), -self.v.cos())
    }

    pub fn exp(&self) -> Jet2 {
        let e = self.v.exp();
        self.unary(e, e, e)
    }

    pub fn ln(&self) -> Jet2 {
        let iv = 1.0 / self.v;
        self.unary(self.v.ln(), iv, -iv * iv)
    }

    pub fn powi(&self, k: i32) -> Jet2 {
        let kf = k as f64;
        self.unary(
            self.v.powi(k),
            kf * self.v.powi(k - 1),
            kf * (kf - 1.0) * self.v.powi(k - 2),
        )
    }

    pub fn powf(&self, p: f64) -> Jet2 {
        self.unary(
            self.v.powf(p),
            p * self.v.powf(p - 1.0),
            p * (p - 1.0) * self.v.powf(p - 2.0),
        )
    }

    pub fn neg(&self) -> Jet2 {
        Jet2 {
            v: -self.v,
            g: -&self.g,
            h: -&self.h,
        }
    }

    pub fn add(&self, o: &Jet2) -> Jet2 {
        Jet2 {
            v: self.v + o.v,
            g: &self.g + &o.g,
            h: &self.h + &o.h,
        }
    }

    pub fn sub(&self, o: &Jet2) -> Jet2 {
        Jet2 {
            v: self.v - o.v,
            g: &self.g - &o.g,
            h: &self.h - &o.h,
        }
    }

    pub fn mul(&self, o: &Jet2) -> Jet2 {
        let gh = &self.g * o.g.transpose();
        Jet2 {
            v: self.v * o.v,
            g: &self.g * o.v + &o.g * self.v,
            h: &self.h * o.v + &o.h * self.v + &gh + gh.transpose(),
        }
    }

    pub fn div(&self, o: &Jet2) -> Jet2 {
        self.mul(&o.recip())
    }

    pub fn scale(&self, s: f64) -> Jet2 {
        Jet2 {
            v: self.v * s,
            g: &self.g * s,
            h: &self.h * s,
        }
    }

    pub fn add_scalar(&self, s: f64) -> Jet2 {
        Jet2 {
            v: self.v + s,
            g: self.g.clone(),
            h: self.h.clone(),
        }
    }

    /// Compose with an externally supplied scalar profile `s(v)` whose first
    /// and second derivatives at `self.v` are given.
    pub fn compose(&self, v: f64, d1: f64, d2: f64) -> Jet2 {
        self.unary(v, d1, d2)
    }
}

/// Euclidean norm of a list of jets, as a jet.
pub fn jet_norm(parts: &[Jet2]) -> Jet2 {
    let n = parts[0].nvars();
    let mut acc = Jet2::constant(0.0, n);
    for p in parts {
        acc = acc.add(&p.mul(p));
    }
    acc.sqrt()
}

/// Gram-Schmidt with coefficients: orthonormalizes `rows` in order and
/// returns (frame, T) with frame_i = sum_k T[(i, k)] rows_k and T lower
/// triangular with positive diagonal.
pub fn gs_with_coeffs(rows: &[DVector<f64>]) -> Result<(Vec<DVector<f64>>, DMatrix<f64>)> {
    let k = rows.len();
    let mut frame: Vec<DVector<f64>> = Vec::with_capacity(k);
    let mut t = DMatrix::zeros(k, k);
    for i in 0..k {
        let mut v = rows[i].clone();
        let mut coeffs = DVector::zeros(k);
        coeffs[i] = 1.0;
        for j in 0..i {
            let c = v.dot(&frame[j]);
            v -= &frame[j] * c;
            for l in 0..=j {
                coeffs[l] -= c * t[(j, l)];
            }
        }
        let norm = v.norm();
        if norm <= 1e-12 {
            return Err(GeoError::DegenerateInput(
                "Gram-Schmidt collapse: dependent rows".into(),
            ));
        }
        frame.push(v / norm);
        for l in 0..=i {
            t[(i, l)] = coeffs[l] / norm;
        }
    }
    Ok((frame, t))
}

/// Bisection for a root of `f` on `[a, b]` with `f(a) <= 0 <= f(b)`.
/// Stops when the bracket is shorter than `tol` or after `max_iter` halvings.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64, max_iter: usize) -> Result<f64> {
    let (fa, fb) = (f(a), f(b));
    if !fa.is_finite() || !fb.is_finite() {
        return Err(GeoError::Numeric("non-finite bracket values".into()));
    }
    if fa > 0.0 || fb < 0.0 {
        return Err(GeoError::Numeric(format!(
            "bracket failure: f({a}) = {fa}, f({b}) = {fb}"
        )));
    }
    for _ in 0..max_iter {
        let mid = 0.5 * (a + b);
        if b - a < tol {
            return Ok(mid);
        }
        if f(mid) <= 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// Bisection for a root of a decreasing function of `beta` on `(0, inf)`,
/// expanding the initial bracket geometrically.
pub fn bisect_decreasing<F: Fn(f64) -> f64>(f: F, target: f64, tol: f64) -> Result<f64> {
    let mut lo = 1e-8;
    let mut hi = 1.0;
    // f decreasing: want f(lo) >= target >= f(hi)
    let mut tries = 0;
    while f(hi) > target {
        hi *= 2.0;
        tries += 1;
        if tries > 200 {
            return Err(GeoError::Numeric("bisection bracket expansion failed (hi)".into()));
        }
    }
    tries = 0;
    while f(lo) < target {
        lo *= 0.5;
        tries += 1;
        if tries > 200 {
            return Err(GeoError::Numeric("bisection bracket expansion failed (lo)".into()));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo < tol {
            return Ok(mid);
        }
        if f(mid) >= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Halton low-discrepancy sequence point `index` in `dim` dimensions, in [0,1)^dim.
pub fn halton(index: usize, dim: usize) -> Vec<f64> {
    const PRIMES: [usize; 10] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29];
    (0..dim)
        .map(|d| {
            let base = PRIMES[d % PRIMES.len()];
            let mut f = 1.0;
            let mut r = 0.0;
            let mut i = index + 1;
            while i > 0 {
                f /= base as f64;
                r += f * (i % base) as f64;
                i /= base;
            }
            r
        })
        .collect()
}

/// Deterministic sample of `count` points in the box `lo..hi` (per axis),
/// skipping points inside the exclusion ball of radius `excl` around 0.
pub fn sample_box(lo: &[f64], hi: &[f64], count: usize, excl: f64) -> Vec<Vec<f64>> {
    let dim = lo.len();
    let mut out = Vec::with_capacity(count);
    let mut idx = 0;
    while out.len() < count {
        let u = halton(idx, dim);
        idx += 1;
        let x: Vec<f64> = (0..dim).map(|d| lo[d] + u[d] * (hi[d] - lo[d])).collect();
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > excl {
            out.push(x);
        }
        if idx > 1000 * count + 1000 {
            break; // box swallowed by the exclusion ball
        }
    }
    out
}

/// Central difference of `f` along coordinate `i` at `x` with step `h`.
pub fn central_diff<F: Fn(&[f64]) -> f64>(f: &F, x: &[f64], i: usize, h: f64) -> f64 {
    let mut xp = x.to_vec();
    let mut xm = x.to_vec();
    xp[i] += h;
    xm[i] -= h;
    (f(&xp) - f(&xm)) / (2.0 * h)
}

/// Richardson-extrapolated central difference (steps `h` and `h/2`).
pub fn central_diff_richardson<F: Fn(&[f64]) -> f64>(f: &F, x: &[f64], i: usize, h: f64) -> f64 {
    let d1 = central_diff(f, x, i, h);
    let d2 = central_diff(f, x, i, h / 2.0);
    (4.0 * d2 - d1) / 3.0
}

/// Laplace-Beltrami operator of the scalar field `u` at `x` for the metric
/// `g(x)` (matrix-valued), by central differences of the divergence form
/// `(1/sqrt g) d_i (sqrt g g^{ij} d_j u)`.
pub fn laplace_beltrami_fd<G, U>(metric: &G, u: &U, x: &[f64], h: f64) -> f64
where
    G: Fn(&[f64]) -> DMatrix<f64>,
    U: Fn(&[f64]) -> f64,
{
    let n = x.len();
    let flux = |y: &[f64], i: usize| -> f64 {
        let g = metric(y);
        let det = g.determinant();
        let ginv = g.try_inverse().expect("metric must be invertible");
        let mut s = 0.0;
        for j in 0..n {
            s += ginv[(i, j)] * central_diff(u, y, j, h);
        }
        det.sqrt() * s
    };
    let g0 = metric(x);
    let sqrt_g0 = g0.determinant().sqrt();
    let mut lap = 0.0;
    for i in 0..n {
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[i] += h;
        xm[i] -= h;
        lap += (flux(&xp, i) - flux(&xm, i)) / (2.0 * h);
    }
    lap / sqrt_g0
}

/// Convergence order estimated from residuals at steps `h` and `h/2`.
pub fn richardson_order(res_h: f64, res_h2: f64) -> f64 {
    (res_h.abs() / res_h2.abs()).log2()
}
