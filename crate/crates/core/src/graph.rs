//! Graphical submanifolds (x, f(x)) of R^{n+m}: induced metric, the volume
//! factor Delta_f, Gauss map, second fundamental form, mean curvature,
//! Laplace-Beltrami on scalar fields, finite-difference verification of the
//! Gauss-map differential identities, and the slope hypothesis checker.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::cones::{coassociative_value, lo_graph_jets, CoassocProfile};
use crate::error::{GeoError, Result};
use crate::grassmann::{self, GrassmannPoint};
use crate::multivector::inner;
use crate::numeric::{
    central_diff, central_diff_richardson, gs_with_coeffs, laplace_beltrami_fd, sample_box, Jet2,
};

/// Default finite-difference step for first derivatives.
pub const DEFAULT_GRAD_STEP: f64 = 1e-4;
/// Default finite-difference step for Laplacians.
pub const DEFAULT_LAP_STEP: f64 = 1e-3;

type JetMap = Arc<dyn Fn(&[Jet2]) -> Vec<Jet2> + Send + Sync>;
type ValueMap = Arc<dyn Fn(&[f64]) -> Result<Vec<f64>> + Send + Sync>;

enum Backend {
    /// Analytic derivatives through jets.
    Analytic(JetMap),
    /// Values only; derivatives by central differences with step `h`.
    Sampled { f: ValueMap, h: f64 },
}

/// A smooth map f: R^n -> R^m whose graph is the submanifold under study.
pub struct GraphMap {
    n: usize,
    m: usize,
    backend: Backend,
}

impl GraphMap {
    pub fn analytic(n: usize, m: usize, eval: JetMap) -> Self {
        GraphMap {
            n,
            m,
            backend: Backend::Analytic(eval),
        }
    }

    pub fn from_values(n: usize, m: usize, f: ValueMap, h: f64) -> Self {
        GraphMap {
            n,
            m,
            backend: Backend::Sampled { f, h },
        }
    }

    /// Tabulated samples (x, f(x)): evaluation by a moving least-squares
    /// quadratic fit on the nearest samples, differentiated by finite
    /// differences.
    pub fn from_table(n: usize, m: usize, rows: Vec<(Vec<f64>, Vec<f64>)>) -> Result<Self> {
        let nterms = 1 + n + n * (n + 1) / 2;
        if rows.len() < 2 * nterms {
            return Err(GeoError::DegenerateInput(format!(
                "need at least {} table rows for a quadratic fit in {n} variables",
                2 * nterms
            )));
        }
        for (x, f) in &rows {
            if x.len() != n || f.len() != m {
                return Err(GeoError::DimensionMismatch(
                    "table rows must have n coordinates and m values".into(),
                ));
            }
        }
        let rows = Arc::new(rows);
        let k_neighbors = (2 * nterms).min(rows.len());
        // typical nearest-neighbor spacing, for the FD step
        let spacing = {
            let (x0, _) = &rows[0];
            let mut best = f64::INFINITY;
            for (x, _) in rows.iter().skip(1) {
                let d: f64 = x.iter().zip(x0).map(|(a, b)| (a - b) * (a - b)).sum();
                best = best.min(d.sqrt());
            }
            best.max(1e-6)
        };
        let f: ValueMap = Arc::new(move |x: &[f64]| {
            let mut order: Vec<usize> = (0..rows.len()).collect();
            let dist = |i: usize| -> f64 {
                rows[i].0.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum()
            };
            order.sort_by(|&a, &b| dist(a).partial_cmp(&dist(b)).unwrap());
            order.truncate(k_neighbors);
            // quadratic basis around x
            let basis = |y: &[f64]| -> Vec<f64> {
                let mut row = Vec::with_capacity(nterms);
                row.push(1.0);
                for i in 0..n {
                    row.push(y[i] - x[i]);
                }
                for i in 0..n {
                    for j in i..n {
                        row.push((y[i] - x[i]) * (y[j] - x[j]));
                    }
                }
                row
            };
            let a = DMatrix::from_fn(k_neighbors, nterms, |r, c| basis(&rows[order[r]].0)[c]);
            let svd = a.svd(true, true);
            let mut out = Vec::with_capacity(m);
            for alpha in 0..m {
                let b = DVector::from_fn(k_neighbors, |r, _| rows[order[r]].1[alpha]);
                let sol = svd
                    .solve(&b, 1e-10)
                    .map_err(|e| GeoError::Numeric(format!("table fit failed: {e}")))?;
                out.push(sol[0]);
            }
            Ok(out)
        });
        Ok(GraphMap {
            n,
            m,
            backend: Backend::Sampled { f, h: spacing },
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    fn check_x(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n {
            return Err(GeoError::DimensionMismatch(format!(
                "expected {} coordinates, got {}",
                self.n,
                x.len()
            )));
        }
        Ok(())
    }

    pub fn value(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_x(x)?;
        match &self.backend {
            Backend::Analytic(eval) => {
                let out = eval(&Jet2::variables(x));
                Ok(out.iter().map(|j| j.v).collect())
            }
            Backend::Sampled { f, .. } => f(x),
        }
    }

    /// Jacobian with entries df[(i, alpha)] = d f^alpha / d x^i.
    pub fn jacobian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        self.check_x(x)?;
        match &self.backend {
            Backend::Analytic(eval) => {
                let out = eval(&Jet2::variables(x));
                Ok(DMatrix::from_fn(self.n, self.m, |i, a| out[a].g[i]))
            }
            Backend::Sampled { f, h } => {
                let mut df = DMatrix::zeros(self.n, self.m);
                for i in 0..self.n {
                    let mut xp = x.to_vec();
                    let mut xm = x.to_vec();
                    xp[i] += h;
                    xm[i] -= h;
                    let (fp, fm) = (f(&xp)?, f(&xm)?);
                    for a in 0..self.m {
                        df[(i, a)] = (fp[a] - fm[a]) / (2.0 * h);
                    }
                }
                Ok(df)
            }
        }
    }

    /// Second derivatives: one symmetric n x n matrix per component of f.
    pub fn hessians(&self, x: &[f64]) -> Result<Vec<DMatrix<f64>>> {
        self.check_x(x)?;
        match &self.backend {
            Backend::Analytic(eval) => {
                let out = eval(&Jet2::variables(x));
                Ok(out.iter().map(|j| j.h.clone()).collect())
            }
            Backend::Sampled { f, h } => {
                let h = h.max(DEFAULT_LAP_STEP);
                let f0 = f(x)?;
                let mut hs = vec![DMatrix::zeros(self.n, self.n); self.m];
                for i in 0..self.n {
                    for j in i..self.n {
                        let vals: Vec<f64> = if i == j {
                            let mut xp = x.to_vec();
                            let mut xm = x.to_vec();
                            xp[i] += h;
                            xm[i] -= h;
                            let (fp, fm) = (f(&xp)?, f(&xm)?);
                            (0..self.m)
                                .map(|a| (fp[a] - 2.0 * f0[a] + fm[a]) / (h * h))
                                .collect()
                        } else {
                            let shift = |si: f64, sj: f64| -> Vec<f64> {
                                let mut y = x.to_vec();
                                y[i] += si * h;
                                y[j] += sj * h;
                                y
                            };
                            let (fpp, fpm, fmp, fmm) = (
                                f(&shift(1.0, 1.0))?,
                                f(&shift(1.0, -1.0))?,
                                f(&shift(-1.0, 1.0))?,
                                f(&shift(-1.0, -1.0))?,
                            );
                            (0..self.m)
                                .map(|a| (fpp[a] - fpm[a] - fmp[a] + fmm[a]) / (4.0 * h * h))
                                .collect()
                        };
                        for a in 0..self.m {
                            hs[a][(i, j)] = vals[a];
                            hs[a][(j, i)] = vals[a];
                        }
                    }
                }
                Ok(hs)
            }
        }
    }
}

/// Built-in examples: "affine", "holomorphic-sq", "lawson-osserman",
/// "coassociative(C)".
pub fn registry(name: &str) -> Result<GraphMap> {
    match name {
        "affine" => {
            let eval: JetMap = Arc::new(|x: &[Jet2]| {
                vec![
                    x[0].scale(0.5).add(&x[1].scale(-0.2)).add(&x[2].scale(0.1)).add_scalar(1.0),
                    x[0].scale(0.3).add(&x[2].scale(0.4)),
                ]
            });
            Ok(GraphMap::analytic(3, 2, eval))
        }
        "holomorphic-sq" => {
            let eval: JetMap = Arc::new(|x: &[Jet2]| {
                vec![
                    x[0].mul(&x[0]).sub(&x[1].mul(&x[1])),
                    x[0].mul(&x[1]).scale(2.0),
                ]
            });
            Ok(GraphMap::analytic(2, 2, eval))
        }
        "lawson-osserman" => {
            let eval: JetMap = Arc::new(|x: &[Jet2]| lo_graph_jets(x));
            Ok(GraphMap::analytic(4, 3, eval))
        }
        _ => {
            if let Some(rest) = name.strip_prefix("coassociative(") {
                let c: f64 = rest
                    .strip_suffix(')')
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| {
                        GeoError::Precondition(format!("malformed registry name {name}"))
                    })?;
                if c == 0.0 {
                    return registry("lawson-osserman");
                }
                let profile = CoassocProfile { c };
                let f: ValueMap = Arc::new(move |x: &[f64]| coassociative_value(x, &profile));
                return Ok(GraphMap::from_values(4, 3, f, DEFAULT_GRAD_STEP));
            }
            Err(GeoError::Precondition(format!("unknown graph example {name}")))
        }
    }
}

/// Pointwise geometric data of the graph submanifold.
#[derive(Clone, Debug)]
pub struct PointGeometry {
    pub x: Vec<f64>,
    pub f: Vec<f64>,
    /// df[(i, alpha)] = d f^alpha / d x^i.
    pub df: DMatrix<f64>,
    /// Induced metric g = I + Df Df^T.
    pub g: DMatrix<f64>,
    pub g_inv: DMatrix<f64>,
    /// Delta_f = sqrt(det g).
    pub delta_f: f64,
    /// Orthonormal tangent frame rows e_i in R^{n+m}.
    pub tangent_frame: DMatrix<f64>,
    /// Orthonormal normal frame rows nu_alpha in R^{n+m}.
    pub normal_frame: DMatrix<f64>,
    /// Gram-Schmidt coefficients: e_i = T_{ik} (eps_k + df_k).
    pub t_coeffs: DMatrix<f64>,
    /// Second fundamental form h_{alpha, ij}, one n x n matrix per normal.
    pub h: Vec<DMatrix<f64>>,
    /// Mean curvature components sum_i h_{alpha, ii} in the normal frame.
    pub mean_curvature: Vec<f64>,
    /// |B|^2 = sum of squared h entries.
    pub b_norm2: f64,
}

impl PointGeometry {
    /// |H|, the mean curvature norm.
    pub fn h_norm(&self) -> f64 {
        self.mean_curvature.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

pub fn geometry_at(f: &GraphMap, x: &[f64]) -> Result<PointGeometry> {
    let n = f.n();
    let m = f.m();
    let fx = f.value(x)?;
    let df = f.jacobian(x)?;
    let hess = f.hessians(x)?;
    if fx.iter().any(|v| !v.is_finite())
        || df.iter().any(|v| !v.is_finite())
        || hess.iter().any(|h| h.iter().any(|v| !v.is_finite()))
    {
        return Err(GeoError::Numeric("non-finite derivative data".into()));
    }
    let g = DMatrix::identity(n, n) + &df * df.transpose();
    let g_inv = g
        .clone()
        .try_inverse()
        .ok_or_else(|| GeoError::Numeric("induced metric not invertible".into()))?;
    let delta_f = g.determinant().sqrt();

    // tangent rows eps_i + df_{i alpha} eps_{n+alpha}, orthonormalized
    let rows: Vec<DVector<f64>> = (0..n)
        .map(|i| {
            let mut v = DVector::zeros(n + m);
            v[i] = 1.0;
            for a in 0..m {
                v[n + a] = df[(i, a)];
            }
            v
        })
        .collect();
    let (e_frames, t_coeffs) = gs_with_coeffs(&rows)?;
    let mut tangent_frame = DMatrix::zeros(n, n + m);
    for (i, e) in e_frames.iter().enumerate() {
        tangent_frame.set_row(i, &e.transpose());
    }

    // normal candidates (-df column alpha, delta_alpha), orthonormalized
    let nrows: Vec<DVector<f64>> = (0..m)
        .map(|a| {
            let mut v = DVector::zeros(n + m);
            for i in 0..n {
                v[i] = -df[(i, a)];
            }
            v[n + a] = 1.0;
            v
        })
        .collect();
    let (nu_frames, _) = gs_with_coeffs(&nrows)?;
    let mut normal_frame = DMatrix::zeros(m, n + m);
    for (a, nu) in nu_frames.iter().enumerate() {
        normal_frame.set_row(a, &nu.transpose());
    }

    // h_{alpha, ij} = T_{ik} T_{jl} <(0, f_{,kl}), nu_alpha>
    let mut h = Vec::with_capacity(m);
    let mut b_norm2 = 0.0;
    let mut mean_curvature = Vec::with_capacity(m);
    for nu in &nu_frames {
        let mut ha = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for k in 0..n {
                    for l in 0..n {
                        let mut sec = 0.0;
                        for b in 0..m {
                            sec += hess[b][(k, l)] * nu[n + b];
                        }
                        s += t_coeffs[(i, k)] * t_coeffs[(j, l)] * sec;
                    }
                }
                ha[(i, j)] = s;
            }
        }
        b_norm2 += ha.iter().map(|v| v * v).sum::<f64>();
        mean_curvature.push(ha.trace());
        h.push(ha);
    }

    Ok(PointGeometry {
        x: x.to_vec(),
        f: fx,
        df,
        g,
        g_inv,
        delta_f,
        tangent_frame,
        normal_frame,
        t_coeffs,
        h,
        mean_curvature,
        b_norm2,
    })
}

/// Gauss map: the oriented tangent plane of the graph at x.
pub fn gauss_map(f: &GraphMap, x: &[f64]) -> Result<GrassmannPoint> {
    let n = f.n();
    let m = f.m();
    let df = f.jacobian(x)?;
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut v = vec![0.0; n + m];
            v[i] = 1.0;
            for a in 0..m {
                v[n + a] = df[(i, a)];
            }
            v
        })
        .collect();
    grassmann::from_basis(&rows)
}

/// Laplace-Beltrami operator of `field` on the graph at x, in divergence
/// form with central differences of step `h`.
pub fn laplace_beltrami<F: Fn(&[f64]) -> f64>(
    f: &GraphMap,
    field: &F,
    x: &[f64],
    h: f64,
) -> Result<f64> {
    f.check_x(x)?;
    let n = f.n();
    let metric = |y: &[f64]| -> DMatrix<f64> {
        let df = f.jacobian(y).expect("jacobian evaluation");
        DMatrix::identity(n, n) + &df * df.transpose()
    };
    let v = laplace_beltrami_fd(&metric, field, x, h);
    if !v.is_finite() {
        return Err(GeoError::Numeric("Laplacian did not evaluate".into()));
    }
    Ok(v)
}

fn coordinate_plucker(n: usize, m: usize) -> crate::multivector::Multivector {
    GrassmannPoint::coordinate_plane(n, m).plucker().clone()
}

/// Max relative residual of the first-derivative identity
/// grad_{e_i} w = h_{alpha, ij} <e_{j alpha}, A> at x, where A is the
/// coordinate-plane Plucker vector and the left side is a Richardson-refined
/// finite difference of w along the tangent frame.
pub fn verify_dw(f: &GraphMap, x: &[f64]) -> Result<f64> {
    let geo = geometry_at(f, x)?;
    let n = f.n();
    let m = f.m();
    let a_vec = coordinate_plucker(n, m);
    let w_of = |y: &[f64]| -> f64 {
        gauss_map(f, y)
            .and_then(|g| inner(g.plucker(), &a_vec))
            .unwrap_or(f64::NAN)
    };
    let grad: Vec<f64> = (0..n)
        .map(|k| central_diff_richardson(&w_of, x, k, DEFAULT_GRAD_STEP))
        .collect();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        // directional derivative along e_i = T_{ik} d_k
        let mut lhs = 0.0;
        for k in 0..n {
            lhs += geo.t_coeffs[(i, k)] * grad[k];
        }
        let mut rhs = 0.0;
        for alpha in 0..m {
            for j in 0..n {
                let e_ja = grassmann::wedge_with_replacements(
                    &geo.tangent_frame,
                    &[(j, &geo.normal_frame.row(alpha).transpose())],
                )?;
                rhs += geo.h[alpha][(i, j)] * inner(&e_ja, &a_vec)?;
            }
        }
        let res = (lhs - rhs).abs() / (1.0 + lhs.abs());
        worst = worst.max(res);
    }
    Ok(worst)
}

/// Relative residual of the Laplacian identity
/// Delta w = -|B|^2 w + sum_{a != b, j != k} h_{a,ij} h_{b,ik} <e_{ja,kb}, A>
/// at x (requires vanishing mean curvature), with FD step `h`.
pub fn verify_delta_w(f: &GraphMap, x: &[f64], h: f64) -> Result<f64> {
    let geo = geometry_at(f, x)?;
    if geo.h_norm() > 1e-6 {
        return Err(GeoError::Precondition(format!(
            "the Laplacian identity needs parallel mean curvature; |H| = {:.3e}",
            geo.h_norm()
        )));
    }
    let n = f.n();
    let m = f.m();
    let a_vec = coordinate_plucker(n, m);
    let w_of = |y: &[f64]| -> f64 {
        gauss_map(f, y)
            .and_then(|g| inner(g.plucker(), &a_vec))
            .unwrap_or(f64::NAN)
    };
    let lhs = laplace_beltrami(f, &w_of, x, h)?;
    let w0 = w_of(x);
    let mut rhs = -geo.b_norm2 * w0;
    for alpha in 0..m {
        for beta in 0..m {
            if alpha == beta {
                continue;
            }
            for j in 0..n {
                for k in 0..n {
                    if j == k {
                        continue;
                    }
                    let e_jakb = grassmann::wedge_with_replacements(
                        &geo.tangent_frame,
                        &[
                            (j, &geo.normal_frame.row(alpha).transpose()),
                            (k, &geo.normal_frame.row(beta).transpose()),
                        ],
                    )?;
                    let pairing = inner(&e_jakb, &a_vec)?;
                    let mut coeff = 0.0;
                    for i in 0..n {
                        coeff += geo.h[alpha][(i, j)] * geo.h[beta][(i, k)];
                    }
                    rhs += coeff * pairing;
                }
            }
        }
    }
    Ok((lhs - rhs).abs() / (1.0 + rhs.abs()))
}

/// Numerical rank of the Gauss map differential at x, from the FD Jacobian
/// in chart coordinates centered at the Gauss image of x.
pub fn gauss_map_rank(f: &GraphMap, x: &[f64], h: f64) -> Result<usize> {
    let n = f.n();
    let m = f.m();
    let center = gauss_map(f, x)?;
    let mut jac = DMatrix::zeros(n * m, n);
    for k in 0..n {
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[k] += h;
        xm[k] -= h;
        let zp = grassmann::matrix_chart(&gauss_map(f, &xp)?, &center)?.z;
        let zm = grassmann::matrix_chart(&gauss_map(f, &xm)?, &center)?.z;
        for i in 0..n {
            for a in 0..m {
                jac[(i * m + a, k)] = (zp[(i, a)] - zm[(i, a)]) / (2.0 * h);
            }
        }
    }
    let sv = jac.svd(false, false).singular_values;
    let smax = sv.iter().cloned().fold(0.0f64, f64::max);
    if smax == 0.0 {
        return Ok(0);
    }
    Ok(sv.iter().filter(|&&s| s > 1e-6 * smax).count())
}

/// (lhs, rhs, ok) for the rank-2 inequality Delta log w <= -|B|^2 at x.
pub fn verify_rank_inequality(f: &GraphMap, x: &[f64], h: f64) -> Result<(f64, f64, bool)> {
    let geo = geometry_at(f, x)?;
    if geo.h_norm() > 1e-6 {
        return Err(GeoError::Precondition(format!(
            "the inequality needs a minimal graph; |H| = {:.3e}",
            geo.h_norm()
        )));
    }
    let rank = gauss_map_rank(f, x, DEFAULT_GRAD_STEP)?;
    if rank > 2 {
        return Err(GeoError::Precondition(format!(
            "Gauss map rank {rank} exceeds 2 at the sample point"
        )));
    }
    let n = f.n();
    let m = f.m();
    let a_vec = coordinate_plucker(n, m);
    let logw = |y: &[f64]| -> f64 {
        gauss_map(f, y)
            .and_then(|g| inner(g.plucker(), &a_vec))
            .map(|w| w.ln())
            .unwrap_or(f64::NAN)
    };
    if !logw(x).is_finite() {
        return Err(GeoError::OutsideChart("w(gauss(x), coordinate plane) <= 0".into()));
    }
    let lhs = laplace_beltrami(f, &logw, x, h)?;
    let rhs = -geo.b_norm2;
    Ok((lhs, rhs, lhs <= rhs + 1e-3 * (1.0 + rhs.abs())))
}

/// Report of the strengthened subharmonicity check.
#[derive(Clone, Debug, Serialize)]
pub struct Subhar3Report {
    /// Delta log w - |grad log w|^2 at x.
    pub lhs: f64,
    pub b_norm2: f64,
    /// -lhs / |B|^2 (the constant the inequality certifies), when |B| > 0.
    pub c1_est: Option<f64>,
    pub ok: bool,
}

/// Check Delta log w - |grad log w|^2 <= 0 at x, valid when
/// w >= 1/3 + delta and the mean curvature is parallel.
pub fn verify_subhar3(f: &GraphMap, x: &[f64], delta: f64, h: f64) -> Result<Subhar3Report> {
    let geo = geometry_at(f, x)?;
    if geo.h_norm() > 1e-6 {
        return Err(GeoError::Precondition(format!(
            "parallel mean curvature required; |H| = {:.3e}",
            geo.h_norm()
        )));
    }
    let n = f.n();
    let m = f.m();
    let a_vec = coordinate_plucker(n, m);
    let w_of = |y: &[f64]| -> f64 {
        gauss_map(f, y)
            .and_then(|g| inner(g.plucker(), &a_vec))
            .unwrap_or(f64::NAN)
    };
    let w0 = w_of(x);
    if w0 < 1.0 / 3.0 + delta {
        return Err(GeoError::Precondition(format!(
            "w = {w0:.6} is below the threshold 1/3 + {delta}"
        )));
    }
    let logw = |y: &[f64]| w_of(y).ln();
    let lap = laplace_beltrami(f, &logw, x, h)?;
    let mut grad2 = 0.0;
    let grad: Vec<f64> = (0..n)
        .map(|k| central_diff(&logw, x, k, DEFAULT_GRAD_STEP))
        .collect();
    for k in 0..n {
        for l in 0..n {
            grad2 += geo.g_inv[(k, l)] * grad[k] * grad[l];
        }
    }
    let lhs = lap - grad2;
    let (ok, c1_est) = if geo.b_norm2 > 1e-10 {
        let c1 = -lhs / geo.b_norm2;
        (lhs <= 1e-6, Some(c1))
    } else {
        (true, None)
    };
    Ok(Subhar3Report {
        lhs,
        b_norm2: geo.b_norm2,
        c1_est,
        ok,
    })
}

/// Ellipticity constants (K1, K2) = ((4 mu/lambda)^n, 4 pi^-2 (mu/lambda)^{n+2}).
pub fn dvp_constants(lambda_min: f64, mu_max: f64, n: usize) -> Result<(f64, f64)> {
    if !(0.0 < lambda_min && lambda_min <= mu_max) {
        return Err(GeoError::Precondition(format!(
            "need 0 < lambda <= mu, got lambda = {lambda_min}, mu = {mu_max}"
        )));
    }
    let ratio = mu_max / lambda_min;
    let k1 = (4.0 * ratio).powi(n as i32);
    let k2 = 4.0 / (std::f64::consts::PI * std::f64::consts::PI) * ratio.powi(n as i32 + 2);
    Ok((k1, k2))
}

/// One sampled point of the hypothesis check.
#[derive(Clone, Debug, Serialize)]
pub struct BernsteinSample {
    pub x: Vec<f64>,
    pub delta_f: f64,
    /// d f^alpha / d x^i at the sample.
    pub slope: f64,
    /// beta1 sqrt(1 + slope^2).
    pub slope_bound: f64,
    /// Delta_f / sqrt(1 + slope^2): the beta1 this sample would need.
    pub required_beta1: f64,
    pub delta_ok: bool,
    pub slope_ok: bool,
    /// 1/beta1^2 (left side of the S-map form of the slope condition).
    pub smap_lhs: f64,
    /// w(gamma, P)^2 + w(gamma, Q)^2 = (1 + slope^2)/Delta_f^2.
    pub smap_rhs: f64,
}

/// Aggregate report of `check_bernstein_hypotheses`.
#[derive(Clone, Debug, Serialize)]
pub struct BernsteinReport {
    pub beta0: f64,
    pub beta1: f64,
    pub alpha: usize,
    pub i: usize,
    /// beta1 < 3, as the theorem requires for its conclusion.
    pub beta1_admissible: bool,
    pub samples: Vec<BernsteinSample>,
    /// Smallest per-sample required beta1 (the best the graph can offer).
    pub min_required_beta1: f64,
    /// Largest per-sample required beta1 (what a uniform bound must reach).
    pub max_required_beta1: f64,
    pub delta_pass: bool,
    pub slope_pass: bool,
    pub pass: bool,
    /// Indices of samples violating either bound.
    pub violations: Vec<usize>,
}

/// Check the volume bound Delta_f <= beta0 and the slope bound
/// Delta_f <= beta1 sqrt(1 + (d f^alpha/d x^i)^2) over a low-discrepancy
/// sample of the box plus user-supplied critical points. `alpha` and `i`
/// are zero-based component/coordinate indices.
#[allow(clippy::too_many_arguments)]
pub fn check_bernstein_hypotheses(
    f: &GraphMap,
    lo: &[f64],
    hi: &[f64],
    count: usize,
    critical_points: &[Vec<f64>],
    beta0: f64,
    beta1: f64,
    alpha: usize,
    i: usize,
) -> Result<BernsteinReport> {
    if alpha >= f.m() || i >= f.n() {
        return Err(GeoError::Precondition(format!(
            "slope indices (alpha = {alpha}, i = {i}) out of range for a {}x{} jacobian",
            f.n(),
            f.m()
        )));
    }
    if lo.len() != f.n() || hi.len() != f.n() {
        return Err(GeoError::DimensionMismatch(
            "sampling box must match the domain dimension".into(),
        ));
    }
    let mut points = sample_box(lo, hi, count, 0.1);
    points.extend(critical_points.iter().cloned());

    let mut samples = Vec::with_capacity(points.len());
    let mut violations = Vec::new();
    let mut min_req = f64::INFINITY;
    let mut max_req: f64 = 0.0;
    let mut delta_pass = true;
    let mut slope_pass = true;
    for (idx, x) in points.iter().enumerate() {
        let geo = geometry_at(f, x)?;
        let slope = geo.df[(i, alpha)];
        let factor = (1.0 + slope * slope).sqrt();
        let required = geo.delta_f / factor;
        min_req = min_req.min(required);
        max_req = max_req.max(required);
        let delta_ok = geo.delta_f <= beta0 + 1e-12;
        let slope_ok = geo.delta_f <= beta1 * factor + 1e-12;
        if !delta_ok {
            delta_pass = false;
        }
        if !slope_ok {
            slope_pass = false;
        }
        if !(delta_ok && slope_ok) {
            violations.push(idx);
        }
        samples.push(BernsteinSample {
            x: x.clone(),
            delta_f: geo.delta_f,
            slope,
            slope_bound: beta1 * factor,
            required_beta1: required,
            delta_ok,
            slope_ok,
            smap_lhs: 1.0 / (beta1 * beta1),
            smap_rhs: factor * factor / (geo.delta_f * geo.delta_f),
        });
    }
    Ok(BernsteinReport {
        beta0,
        beta1,
        alpha,
        i,
        beta1_admissible: beta1 < 3.0,
        samples,
        min_required_beta1: min_req,
        max_required_beta1: max_req,
        delta_pass,
        slope_pass,
        pass: delta_pass && slope_pass,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grassmann::w_function;

    #[test]
    fn affine_geometry() {
        let f = registry("affine").unwrap();
        let geo = geometry_at(&f, &[0.3, -0.7, 1.1]).unwrap();
        assert!(geo.b_norm2 < 1e-20);
        assert!(geo.h_norm() < 1e-20);
        let geo2 = geometry_at(&f, &[2.0, 0.5, -0.3]).unwrap();
        assert!((geo.delta_f - geo2.delta_f).abs() < 1e-12);
        // g = I + Df Df^T
        let gm = DMatrix::identity(3, 3) + &geo.df * geo.df.transpose();
        assert!((&gm - &geo.g).norm() < 1e-12);
        // frames orthonormal and mutually orthogonal
        let all = geo.tangent_frame.clone().insert_rows(3, 2, 0.0);
        let mut all = all;
        for a in 0..2 {
            all.set_row(3 + a, &geo.normal_frame.row(a));
        }
        let gram = &all * all.transpose();
        assert!((gram - DMatrix::identity(5, 5)).norm() < 1e-10);
        // constant Gauss map
        let g1 = gauss_map(&f, &[0.3, -0.7, 1.1]).unwrap();
        let g2 = gauss_map(&f, &[5.0, 2.0, -4.0]).unwrap();
        assert!(crate::grassmann::distance(&g1, &g2).unwrap() < 1e-7);
    }

    #[test]
    fn holomorphic_is_minimal() {
        let f = registry("holomorphic-sq").unwrap();
        for x in [[1.0, 0.0], [0.4, 0.8], [-0.6, 0.3]] {
            let geo = geometry_at(&f, &x).unwrap();
            assert!(geo.h_norm() < 1e-12, "|H| = {}", geo.h_norm());
            assert!(geo.b_norm2 > 1e-6);
        }
    }

    #[test]
    fn w_delta_reciprocal() {
        let f = registry("holomorphic-sq").unwrap();
        let x = [0.7, -0.4];
        let geo = geometry_at(&f, &x).unwrap();
        let g = gauss_map(&f, &x).unwrap();
        let p = GrassmannPoint::coordinate_plane(2, 2);
        let w = w_function(&g, &p).unwrap();
        assert!((w * geo.delta_f - 1.0).abs() < 1e-10);
        // w(gamma, Q) = slope / Delta_f with Q the rotated coordinate plane
        let q = crate::grassmann::from_basis(&[
            vec![0.0, 0.0, 1.0, 0.0],
            vec![0.0, 1.0, 0.0, 0.0],
        ])
        .unwrap();
        let wq = w_function(&g, &q).unwrap();
        assert!((wq.abs() - geo.df[(0, 0)].abs() / geo.delta_f).abs() < 1e-10);
    }

    #[test]
    fn fd_matches_analytic() {
        let analytic = registry("holomorphic-sq").unwrap();
        let value_fn: ValueMap = Arc::new(|x: &[f64]| {
            Ok(vec![x[0] * x[0] - x[1] * x[1], 2.0 * x[0] * x[1]])
        });
        let fd = GraphMap::from_values(2, 2, value_fn, 1e-4);
        let x = [0.8, -0.5];
        let (ja, jf) = (analytic.jacobian(&x).unwrap(), fd.jacobian(&x).unwrap());
        assert!((ja - jf).norm() < 1e-7);
        let (ga, gf) = (geometry_at(&analytic, &x).unwrap(), geometry_at(&fd, &x).unwrap());
        assert!((ga.delta_f - gf.delta_f).abs() < 1e-6);
        assert!((ga.b_norm2 - gf.b_norm2).abs() < 1e-5);
        assert!((ga.h_norm() - gf.h_norm()).abs() < 1e-5);
    }

    #[test]
    fn table_backend_fits_quadratic() {
        let mut rows = Vec::new();
        for i in 0..12 {
            for j in 0..12 {
                let x = -1.0 + i as f64 / 5.5;
                let y = -1.0 + j as f64 / 5.5;
                rows.push((vec![x, y], vec![x * x - y * y, 2.0 * x * y]));
            }
        }
        let f = GraphMap::from_table(2, 2, rows).unwrap();
        let v = f.value(&[0.31, -0.42]).unwrap();
        assert!((v[0] - (0.31f64 * 0.31 - 0.42 * 0.42)).abs() < 1e-8);
        let j = f.jacobian(&[0.31, -0.42]).unwrap();
        assert!((j[(0, 0)] - 0.62).abs() < 1e-5);
    }

    #[test]
    fn laplacian_on_flat_graph() {
        let f = registry("affine").unwrap();
        let field = |y: &[f64]| y.iter().map(|v| v * v).sum::<f64>();
        // affine graph: metric constant, Laplacian of sum x^2 = 2 tr(g^-1)
        let geo = geometry_at(&f, &[0.1, 0.2, 0.3]).unwrap();
        let expect = 2.0 * geo.g_inv.trace();
        let lap = laplace_beltrami(&f, &field, &[0.1, 0.2, 0.3], 1e-3).unwrap();
        assert!((lap - expect).abs() < 1e-6);
    }

    #[test]
    fn dw_identity() {
        let f = registry("holomorphic-sq").unwrap();
        assert!(verify_dw(&f, &[1.0, 0.3]).unwrap() < 1e-4);
        let lo = registry("lawson-osserman").unwrap();
        assert!(verify_dw(&lo, &[0.9, 0.2, 1.1, -0.4]).unwrap() < 1e-4);
        let aff = registry("affine").unwrap();
        assert!(verify_dw(&aff, &[0.5, 0.5, 0.5]).unwrap() < 1e-12);
    }

    #[test]
    fn delta_w_identity() {
        let f = registry("holomorphic-sq").unwrap();
        assert!(verify_delta_w(&f, &[0.8, 0.25], DEFAULT_LAP_STEP).unwrap() < 1e-3);
        let lo = registry("lawson-osserman").unwrap();
        assert!(verify_delta_w(&lo, &[0.9, 0.2, 1.1, -0.4], DEFAULT_LAP_STEP).unwrap() < 1e-3);
    }

    #[test]
    fn rank_inequality_holomorphic() {
        let f = registry("holomorphic-sq").unwrap();
        let (lhs, rhs, ok) = verify_rank_inequality(&f, &[0.6, 0.2], DEFAULT_LAP_STEP).unwrap();
        assert!(ok, "lhs = {lhs}, rhs = {rhs}");
        assert_eq!(gauss_map_rank(&f, &[0.6, 0.2], 1e-4).unwrap(), 2);
    }

    #[test]
    fn subhar3_near_flat() {
        let eval: JetMap = Arc::new(|x: &[Jet2]| {
            vec![
                x[0].mul(&x[0]).sub(&x[1].mul(&x[1])).scale(0.1),
                x[0].mul(&x[1]).scale(0.2),
            ]
        });
        let f = GraphMap::analytic(2, 2, eval);
        let rep = verify_subhar3(&f, &[0.3, 0.2], 0.05, DEFAULT_LAP_STEP).unwrap();
        assert!(rep.ok, "lhs = {}", rep.lhs);
        assert!(rep.c1_est.unwrap() > 0.0);
    }

    #[test]
    fn dvp_values() {
        let (k1, k2) = dvp_constants(1.0, 1.0, 4).unwrap();
        assert!((k1 - 256.0).abs() < 1e-12);
        assert!((k2 - 4.0 / (std::f64::consts::PI * std::f64::consts::PI)).abs() < 1e-12);
        let (k1, k2) = dvp_constants(1.0, 2.0, 3).unwrap();
        assert!((k1 - 512.0).abs() < 1e-12);
        assert!((k2 - 4.0 / (std::f64::consts::PI * std::f64::consts::PI) * 32.0).abs() < 1e-10);
        assert!(dvp_constants(2.0, 1.0, 3).is_err());
    }

    #[test]
    fn bernstein_lo_fails_slope() {
        let f = registry("lawson-osserman").unwrap();
        let report = check_bernstein_hypotheses(
            &f,
            &[-2.0; 4],
            &[2.0; 4],
            50,
            &[vec![0.0, 0.0, 1.0, 0.0]],
            9.5,
            2.99,
            1,
            0,
        )
        .unwrap();
        assert!(report.delta_pass);
        assert!(!report.slope_pass);
        assert!(!report.violations.is_empty());
        assert!((report.min_required_beta1 - 9.0 / 6f64.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn bernstein_affine_passes() {
        let f = registry("affine").unwrap();
        let report = check_bernstein_hypotheses(
            &f,
            &[-3.0; 3],
            &[3.0; 3],
            50,
            &[],
            2.0,
            1.5,
            0,
            0,
        )
        .unwrap();
        assert!(report.pass, "min required {}", report.min_required_beta1);
    }
}
