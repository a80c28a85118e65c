//! Cones over sphere submanifolds: cone second fundamental form, normal
//! Gauss maps and the rigidity hypothesis check, plus the Hopf map, the
//! coassociative profile equation and the Lawson-Osserman cone.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{GeoError, Result};
use crate::grassmann::{self, GrassmannPoint};
use crate::multivector::{hodge_star, inner};
use crate::numeric::{bisect, central_diff, gs_with_coeffs, laplace_beltrami_fd, Jet2};

type JetMap = Arc<dyn Fn(&[Jet2]) -> Vec<Jet2> + Send + Sync>;

/// A parametrized immersion of a k-manifold into the unit sphere of
/// R^ambient, with analytic derivatives through jets.
#[derive(Clone)]
pub struct SphereImmersion {
    k: usize,
    ambient: usize,
    eval: JetMap,
}

/// First and second derivative data of an immersion at one parameter value.
pub struct ImmersionJets {
    /// Position (unit vector).
    pub x: DVector<f64>,
    /// Jacobian, ambient x k.
    pub jac: DMatrix<f64>,
    /// Second derivatives: one k x k matrix per ambient coordinate.
    pub hess: Vec<DMatrix<f64>>,
}

impl SphereImmersion {
    pub fn new(k: usize, ambient: usize, eval: JetMap) -> Self {
        SphereImmersion { k, ambient, eval }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn value(&self, param: &[f64]) -> Vec<f64> {
        let vars = Jet2::variables(param);
        (self.eval)(&vars).iter().map(|j| j.v).collect()
    }

    pub fn jets(&self, param: &[f64]) -> Result<ImmersionJets> {
        if param.len() != self.k {
            return Err(GeoError::DimensionMismatch(format!(
                "expected {} parameters, got {}",
                self.k,
                param.len()
            )));
        }
        let vars = Jet2::variables(param);
        let out = (self.eval)(&vars);
        if out.len() != self.ambient {
            return Err(GeoError::DimensionMismatch(format!(
                "immersion returned {} coordinates, expected {}",
                out.len(),
                self.ambient
            )));
        }
        let x = DVector::from_iterator(self.ambient, out.iter().map(|j| j.v));
        let norm = x.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(GeoError::DegenerateInput(format!(
                "immersion point has norm {norm}, expected 1"
            )));
        }
        let jac = DMatrix::from_fn(self.ambient, self.k, |a, i| out[a].g[i]);
        let hess = out.iter().map(|j| j.h.clone()).collect();
        Ok(ImmersionJets { x, jac, hess })
    }

    /// Induced metric on the parameter domain.
    pub fn metric(&self, param: &[f64]) -> Result<DMatrix<f64>> {
        let jets = self.jets(param)?;
        Ok(jets.jac.transpose() * &jets.jac)
    }
}

/// Registry of built-in sphere immersions: "clifford-torus" and "equator(k)".
pub fn sphere_registry(name: &str) -> Result<SphereImmersion> {
    if name == "clifford-torus" {
        let eval: JetMap = Arc::new(|p: &[Jet2]| {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            vec![
                p[0].cos().scale(s),
                p[0].sin().scale(s),
                p[1].cos().scale(s),
                p[1].sin().scale(s),
            ]
        });
        return Ok(SphereImmersion::new(2, 4, eval));
    }
    if let Some(rest) = name.strip_prefix("equator(") {
        let k: usize = rest
            .strip_suffix(')')
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| GeoError::Precondition(format!("malformed registry name {name}")))?;
        if k == 0 || k > 8 {
            return Err(GeoError::Precondition(format!("equator dimension {k} out of range")));
        }
        // S^k as the equator of S^{k+1} inside R^{k+2}, via spherical angles.
        let eval: JetMap = Arc::new(move |p: &[Jet2]| {
            let n = p[0].nvars();
            let mut out = Vec::with_capacity(k + 2);
            let mut sin_prod = Jet2::constant(1.0, n);
            for i in 0..k {
                out.push(sin_prod.mul(&p[i].cos()));
                sin_prod = sin_prod.mul(&p[i].sin());
            }
            out.push(sin_prod);
            out.push(Jet2::constant(0.0, n));
            out
        });
        return Ok(SphereImmersion::new(k, k + 2, eval));
    }
    Err(GeoError::Precondition(format!("unknown sphere immersion {name}")))
}

/// Geometry of the cone over a sphere immersion at (param, t): adapted
/// frames and the second fundamental forms of the cone and of the link.
pub struct ConePoint {
    pub param: Vec<f64>,
    pub t: f64,
    /// Orthonormal tangent frame of the link directions E_1..E_k.
    pub e_frames: Vec<DVector<f64>>,
    /// The radial direction tau.
    pub tau: DVector<f64>,
    /// Orthonormal normal frame (of both the cone and the link in the sphere).
    pub normals: Vec<DVector<f64>>,
    /// Cone second fundamental form: per normal, a (k+1) x (k+1) matrix over
    /// the frame (E_1, .., E_k, tau).
    pub b_cone: Vec<DMatrix<f64>>,
    /// Second fundamental form of the link in the sphere: per normal, k x k.
    pub b_link: Vec<DMatrix<f64>>,
}

impl ConePoint {
    /// Max deviation from <B^c(E_i, E_j), N_a> = (1/t) <B(e_i, e_j), nu_a>.
    pub fn scaling_residual(&self) -> f64 {
        let k = self.e_frames.len();
        let mut worst: f64 = 0.0;
        for (bc, bl) in self.b_cone.iter().zip(&self.b_link) {
            for i in 0..k {
                for j in 0..k {
                    worst = worst.max((bc[(i, j)] - bl[(i, j)] / self.t).abs());
                }
            }
        }
        worst
    }

    /// Max |<B^c(., tau), N_a>|.
    pub fn radial_residual(&self) -> f64 {
        let k = self.e_frames.len();
        let mut worst: f64 = 0.0;
        for bc in &self.b_cone {
            for a in 0..=k {
                worst = worst.max(bc[(a, k)].abs()).max(bc[(k, a)].abs());
            }
        }
        worst
    }

    /// Squared norm of the cone second fundamental form.
    pub fn b_cone_norm2(&self) -> f64 {
        self.b_cone.iter().map(|b| b.iter().map(|v| v * v).sum::<f64>()).sum()
    }

    /// Squared norm of the link second fundamental form.
    pub fn b_link_norm2(&self) -> f64 {
        self.b_link.iter().map(|b| b.iter().map(|v| v * v).sum::<f64>()).sum()
    }
}

pub fn cone_geometry(imm: &SphereImmersion, param: &[f64], t: f64) -> Result<ConePoint> {
    if t <= 0.0 {
        return Err(GeoError::Domain(format!("cone parameter t = {t} must be positive")));
    }
    let jets = imm.jets(param)?;
    let k = imm.k();
    let amb = imm.ambient();
    let m = amb - k - 1;
    if m == 0 {
        return Err(GeoError::DegenerateInput(
            "immersion has no normal directions inside the sphere".into(),
        ));
    }

    // Link frame with Gram-Schmidt coefficients: e_i = T_{il} d_l x.
    let rows: Vec<DVector<f64>> = (0..k).map(|i| jets.jac.column(i).into_owned()).collect();
    let (e_frames, t_link) = gs_with_coeffs(&rows)?;

    // Normal frame: complement of span{e_1..e_k, x}.
    let mut span = DMatrix::zeros(k + 1, amb);
    for (i, e) in e_frames.iter().enumerate() {
        span.set_row(i, &e.transpose());
    }
    span.set_row(k, &jets.x.transpose());
    let comp = grassmann::orthonormal_complement(&span);
    let normals: Vec<DVector<f64>> = (0..m).map(|a| comp.row(a).transpose()).collect();

    // Link second fundamental form in the sphere.
    let second = |u: usize, v: usize, nu: &DVector<f64>| -> f64 {
        (0..amb).map(|a| jets.hess[a][(u, v)] * nu[a]).sum()
    };
    let mut b_link = Vec::with_capacity(m);
    for nu in &normals {
        let mut b = DMatrix::zeros(k, k);
        for i in 0..k {
            for j in 0..k {
                let mut s = 0.0;
                for u in 0..k {
                    for v in 0..k {
                        s += t_link[(i, u)] * t_link[(j, v)] * second(u, v, nu);
                    }
                }
                b[(i, j)] = s;
            }
        }
        b_link.push(b);
    }

    // Cone second fundamental form from the cone immersion (p, t) -> t x(p):
    // rows t d_i x and x are orthonormalized with their own coefficients.
    let mut cone_rows: Vec<DVector<f64>> = rows.iter().map(|r| r * t).collect();
    cone_rows.push(jets.x.clone());
    let (cone_frames, t_cone) = gs_with_coeffs(&cone_rows)?;
    // Second parameter derivatives of the cone immersion: d_i d_j = t x_{,ij},
    // d_i d_t = x_{,i}, d_t d_t = 0.
    let cone_second = |u: usize, v: usize, nu: &DVector<f64>| -> f64 {
        if u < k && v < k {
            t * second(u, v, nu)
        } else if u == k && v == k {
            0.0
        } else {
            let i = u.min(v);
            jets.jac.column(i).dot(nu)
        }
    };
    let mut b_cone = Vec::with_capacity(m);
    for nu in &normals {
        let mut b = DMatrix::zeros(k + 1, k + 1);
        for i in 0..=k {
            for j in 0..=k {
                let mut s = 0.0;
                for u in 0..=k {
                    for v in 0..=k {
                        s += t_cone[(i, u)] * t_cone[(j, v)] * cone_second(u, v, nu);
                    }
                }
                b[(i, j)] = s;
            }
        }
        b_cone.push(b);
    }

    let tau = cone_frames[k].clone();
    Ok(ConePoint {
        param: param.to_vec(),
        t,
        e_frames: cone_frames[..k].to_vec(),
        tau,
        normals,
        b_cone,
        b_link,
    })
}

/// Gauss map of the cone at (param, t); constant along rays.
pub fn cone_gauss_map(imm: &SphereImmersion, param: &[f64]) -> Result<GrassmannPoint> {
    let jets = imm.jets(param)?;
    let k = imm.k();
    let amb = imm.ambient();
    let mut rows = Vec::with_capacity(k + 1);
    for i in 0..k {
        rows.push((0..amb).map(|a| jets.jac[(a, i)]).collect::<Vec<f64>>());
    }
    rows.push(jets.x.iter().copied().collect());
    grassmann::from_basis(&rows)
}

/// Normal Gauss map: the normal space of the immersed link inside the
/// sphere, as a point of G(m, k+1); oriented so that its Plucker vector is
/// the Hodge dual of the cone tangent plane.
pub fn normal_gauss_map(imm: &SphereImmersion, param: &[f64]) -> Result<GrassmannPoint> {
    let cp = cone_geometry(imm, param, 1.0)?;
    let amb = imm.ambient();
    let rows: Vec<Vec<f64>> = cp
        .normals
        .iter()
        .map(|nu| (0..amb).map(|a| nu[a]).collect())
        .collect();
    let mut point = grassmann::from_basis(&rows)?;
    let cone = cone_gauss_map(imm, param)?;
    let star = hodge_star(cone.plucker())?;
    if inner(point.plucker(), &star)? < 0.0 {
        let mut flipped = rows;
        for v in flipped[0].iter_mut() {
            *v = -*v;
        }
        point = grassmann::from_basis(&flipped)?;
    }
    Ok(point)
}

/// Check the Laplacian scaling of cone-like fields: the cone Laplacian of
/// F(p, t) = f1(p) at (param, t) against (1/t^2) times the link Laplacian.
pub fn verify_cone_laplacian<F>(
    imm: &SphereImmersion,
    param: &[f64],
    t: f64,
    f1: F,
    h: f64,
) -> Result<(f64, f64)>
where
    F: Fn(&[f64]) -> f64,
{
    if t <= 0.0 {
        return Err(GeoError::Domain(format!("t = {t} must be positive")));
    }
    let k = imm.k();
    let imm2 = imm.clone();
    let cone_metric = move |y: &[f64]| -> DMatrix<f64> {
        let (p, tt) = y.split_at(k);
        let gs = imm2.metric(p).expect("metric evaluation");
        let mut g = DMatrix::zeros(k + 1, k + 1);
        for i in 0..k {
            for j in 0..k {
                g[(i, j)] = tt[0] * tt[0] * gs[(i, j)];
            }
        }
        g[(k, k)] = 1.0;
        g
    };
    let cone_field = |y: &[f64]| f1(&y[..k]);
    let mut y = param.to_vec();
    y.push(t);
    let lhs = laplace_beltrami_fd(&cone_metric, &cone_field, &y, h);
    let imm3 = imm.clone();
    let link_metric = move |p: &[f64]| imm3.metric(p).expect("metric evaluation");
    let rhs = laplace_beltrami_fd(&link_metric, &f1, param, h) / (t * t);
    Ok((lhs, rhs))
}

/// One sample of the rigidity check.
#[derive(Clone, Debug, serde::Serialize)]
pub struct RigiditySample {
    pub param: Vec<f64>,
    pub w_p: f64,
    pub w_q: f64,
    pub value: f64,
    pub violates_threshold: bool,
    pub hits_exclusion: bool,
}

/// Report of `check_rigidity_hypothesis`.
#[derive(Clone, Debug, serde::Serialize)]
pub struct RigidityReport {
    pub threshold: f64,
    pub samples: Vec<RigiditySample>,
    pub pass: bool,
}

/// Scan w(N,P)^2 + w(N,Q)^2 of the normal Gauss map over the samples
/// against the rigidity threshold (0 when the Gauss map has rank <= 2,
/// else 1/9), flagging the exclusion clause w(N,Q) = 0 with w(N,P) < 0.
pub fn check_rigidity_hypothesis(
    imm: &SphereImmersion,
    p: &GrassmannPoint,
    q: &GrassmannPoint,
    params: &[Vec<f64>],
    rank_le_2: bool,
) -> Result<RigidityReport> {
    // 1e-6 sits above the arccos conditioning floor for nominally zero angles
    let (ok, _) = grassmann::is_s_orthogonal(p, q, 1e-6)?;
    if !ok {
        return Err(GeoError::Precondition("P and Q must be S-orthogonal".into()));
    }
    let threshold = if rank_le_2 { 0.0 } else { 1.0 / 9.0 };
    let mut samples = Vec::with_capacity(params.len());
    let mut pass = true;
    for prm in params {
        let n_pt = normal_gauss_map(imm, prm)?;
        let w_p = grassmann::w_function(&n_pt, p)?;
        let w_q = grassmann::w_function(&n_pt, q)?;
        let value = w_p * w_p + w_q * w_q;
        let violates = value <= threshold;
        let excl = w_q.abs() < 1e-10 && w_p < 0.0;
        if violates || excl {
            pass = false;
        }
        samples.push(RigiditySample {
            param: prm.clone(),
            w_p,
            w_q,
            value,
            violates_threshold: violates,
            hits_exclusion: excl,
        });
    }
    Ok(RigidityReport {
        threshold,
        samples,
        pass,
    })
}

/// Quaternions as (re, i, j, k) with the convention i j = k.
pub type Quat = [f64; 4];

pub fn quat_mul(a: Quat, b: Quat) -> Quat {
    [
        a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
        a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
        a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
        a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0],
    ]
}

pub fn quat_conj(q: Quat) -> Quat {
    [q[0], -q[1], -q[2], -q[3]]
}

/// Hopf map (z1, z2) -> (|z1|^2 - |z2|^2, 2 z1 conj(z2)) from R^4 to R^3.
pub fn hopf_map(z1: [f64; 2], z2: [f64; 2]) -> [f64; 3] {
    [
        z1[0] * z1[0] + z1[1] * z1[1] - z2[0] * z2[0] - z2[1] * z2[1],
        2.0 * (z1[0] * z2[0] + z1[1] * z2[1]),
        2.0 * (z1[1] * z2[0] - z1[0] * z2[1]),
    ]
}

/// Solve s (4 s^2 - 5 r^2)^2 = C on the branch through s(r; 0) = sqrt(5)/2 r
/// (where the left side is increasing in s).
pub fn coassociative_profile(r: f64, c: f64) -> Result<f64> {
    if r <= 0.0 {
        return Err(GeoError::Domain(format!("r = {r} must be positive")));
    }
    if c < 0.0 {
        return Err(GeoError::Domain(format!("C = {c} must be nonnegative")));
    }
    let lo = 5f64.sqrt() / 2.0 * r;
    if c == 0.0 {
        return Ok(lo);
    }
    let g = |s: f64| s * (4.0 * s * s - 5.0 * r * r).powi(2) - c;
    let mut hi = lo + 1.0;
    let mut tries = 0;
    while g(hi) < 0.0 {
        hi = lo + 2.0 * (hi - lo);
        tries += 1;
        if tries > 200 {
            return Err(GeoError::Numeric("profile bracket expansion failed".into()));
        }
    }
    let s = bisect(g, lo, hi, 1e-14 * (1.0 + hi), 200)?;
    let residual = (s * (4.0 * s * s - 5.0 * r * r).powi(2) - c).abs();
    if residual > 1e-10 * (1.0 + c) {
        return Err(GeoError::Numeric(format!(
            "profile residual {residual:.3e} exceeds tolerance"
        )));
    }
    Ok(s)
}

/// The rescaled profile s~(r) = s(r)/r^2 and its derivative: analytic for
/// C = 0 (the Lawson-Osserman cone), finite differences otherwise.
#[derive(Clone, Copy, Debug)]
pub struct CoassocProfile {
    pub c: f64,
}

impl CoassocProfile {
    pub fn lawson_osserman() -> Self {
        CoassocProfile { c: 0.0 }
    }

    pub fn s(&self, r: f64) -> Result<f64> {
        coassociative_profile(r, self.c)
    }

    pub fn s_tilde(&self, r: f64) -> Result<f64> {
        Ok(self.s(r)? / (r * r))
    }

    pub fn s_tilde_prime(&self, r: f64) -> Result<f64> {
        if self.c == 0.0 {
            return Ok(-5f64.sqrt() / (2.0 * r * r));
        }
        let f = |y: &[f64]| self.s_tilde(y[0]).unwrap_or(f64::NAN);
        let d = central_diff(&f, &[r], 0, 1e-5 * r.max(1.0));
        if !d.is_finite() {
            return Err(GeoError::Numeric("profile derivative did not evaluate".into()));
        }
        Ok(d)
    }
}

/// Frame data of the graph of zeta(x) = s~(|x|) Hopf(x) at x.
#[derive(Clone, Debug)]
pub struct LoFrames {
    /// The adapted orthonormal frame e_0..e_3 of R^4.
    pub e: [DVector<f64>; 4],
    /// Pushforwards zeta_* e_i in R^3.
    pub push: [DVector<f64>; 4],
    /// rho_i^2 = 1/(1 + |zeta_* e_i|^2).
    pub rho_sq: [f64; 4],
    /// Jordan angles arccos(rho_i) against the coordinate 4-plane.
    pub angles: [f64; 4],
    /// w = rho_0 rho_1 rho_2.
    pub w: f64,
    /// The graph tangent plane (e_i, zeta_* e_i) as a point of G(4,3).
    pub gauss: GrassmannPoint,
}

/// Adapted frames, pushforwards, W-matrix entries and Jordan angles of the
/// S^3-invariant coassociative graph at x (both z1 and z2 parts of x must
/// be nonzero for the frame to exist).
pub fn lo_cone_frames(x: &[f64], profile: &CoassocProfile) -> Result<LoFrames> {
    if x.len() != 4 {
        return Err(GeoError::DimensionMismatch("expected x in R^4".into()));
    }
    let r1 = (x[0] * x[0] + x[1] * x[1]).sqrt();
    let r2 = (x[2] * x[2] + x[3] * x[3]).sqrt();
    if r1 <= 1e-8 || r2 <= 1e-8 {
        return Err(GeoError::DegenerateInput(format!(
            "frame degenerates when z1 or z2 vanishes (|z1| = {r1:.3e}, |z2| = {r2:.3e})"
        )));
    }
    let r = (r1 * r1 + r2 * r2).sqrt();
    let (c1, s1) = (x[0] / r1, x[1] / r1);
    let (c2, s2) = (x[2] / r2, x[3] / r2);

    let e0 = DVector::from_vec(vec![x[0] / r, x[1] / r, x[2] / r, x[3] / r]);
    let e1 = DVector::from_vec(vec![
        r2 / r * c1,
        r2 / r * s1,
        -r1 / r * c2,
        -r1 / r * s2,
    ]);
    let e2 = DVector::from_vec(vec![
        -r2 / r * s1,
        r2 / r * c1,
        r1 / r * s2,
        -r1 / r * c2,
    ]);
    let e3 = DVector::from_vec(vec![-r1 * s1 / r, r1 * c1 / r, -r2 * s2 / r, r2 * c2 / r]);

    let st = profile.s_tilde(r)?;
    let stp = profile.s_tilde_prime(r)?;

    let eps = hopf_map([x[0], x[1]], [x[2], x[3]]);
    // unit phase of z1 conj(z2)
    let (ua, ub) = (
        (x[0] * x[2] + x[1] * x[3]) / (r1 * r2),
        (x[1] * x[2] - x[0] * x[3]) / (r1 * r2),
    );
    let push0 = DVector::from_vec(vec![
        (stp + 2.0 * st / r) * eps[0],
        (stp + 2.0 * st / r) * eps[1],
        (stp + 2.0 * st / r) * eps[2],
    ]);
    let push1 = DVector::from_vec(vec![
        st / r * 4.0 * r1 * r2,
        st / r * 2.0 * (r2 * r2 - r1 * r1) * ua,
        st / r * 2.0 * (r2 * r2 - r1 * r1) * ub,
    ]);
    let push2 = DVector::from_vec(vec![0.0, st * r * -2.0 * ub, st * r * 2.0 * ua]);
    let push3 = DVector::zeros(3);

    let e = [e0, e1, e2, e3];
    let push = [push0, push1, push2, push3];
    let mut rho_sq = [0.0; 4];
    let mut angles = [0.0; 4];
    for i in 0..4 {
        rho_sq[i] = 1.0 / (1.0 + push[i].norm_squared());
        angles[i] = rho_sq[i].sqrt().min(1.0).acos();
    }
    let w = (rho_sq[0] * rho_sq[1] * rho_sq[2]).sqrt();

    let rows: Vec<Vec<f64>> = (0..4)
        .map(|i| {
            let mut row: Vec<f64> = e[i].iter().copied().collect();
            row.extend(push[i].iter().copied());
            row
        })
        .collect();
    let gauss = grassmann::from_basis(&rows)?;

    Ok(LoFrames {
        e,
        push,
        rho_sq,
        angles,
        w,
        gauss,
    })
}

/// The Lawson-Osserman graph map over R^4 \ {0} as jets:
/// f = (sqrt5/2) |x| Hopf(x/|x|).
pub fn lo_graph_jets(x: &[Jet2]) -> Vec<Jet2> {
    let n = x[0].nvars();
    let mut r2 = Jet2::constant(0.0, n);
    for xi in x {
        r2 = r2.add(&xi.mul(xi));
    }
    let r = r2.sqrt();
    let half_sqrt5 = 5f64.sqrt() / 2.0;
    let f1 = x[0]
        .mul(&x[0])
        .add(&x[1].mul(&x[1]))
        .sub(&x[2].mul(&x[2]))
        .sub(&x[3].mul(&x[3]))
        .scale(half_sqrt5)
        .div(&r);
    let f2 = x[0]
        .mul(&x[2])
        .add(&x[1].mul(&x[3]))
        .scale(2.0 * half_sqrt5)
        .div(&r);
    let f3 = x[1]
        .mul(&x[2])
        .sub(&x[0].mul(&x[3]))
        .scale(2.0 * half_sqrt5)
        .div(&r);
    vec![f1, f2, f3]
}

/// Value of the coassociative graph map for general C (root-solved profile).
pub fn coassociative_value(x: &[f64], profile: &CoassocProfile) -> Result<Vec<f64>> {
    let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if r <= 1e-12 {
        return Err(GeoError::Domain("the cone apex x = 0 is singular".into()));
    }
    let st = profile.s_tilde(r)?;
    let eps = hopf_map([x[0], x[1]], [x[2], x[3]]);
    Ok(vec![st * eps[0], st * eps[1], st * eps[2]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grassmann::{distance, from_basis, normal_complement, w_function};

    #[test]
    fn hopf_basics() {
        assert_eq!(hopf_map([1.0, 0.0], [0.0, 0.0]), [1.0, 0.0, 0.0]);
        // |hopf(x)| = |x|^2, in particular S^3 -> S^2
        let x = [0.3, -0.4, 0.5, 0.1];
        let h = hopf_map([x[0], x[1]], [x[2], x[3]]);
        let n2: f64 = x.iter().map(|v| v * v).sum();
        let hn = (h[0] * h[0] + h[1] * h[1] + h[2] * h[2]).sqrt();
        assert!((hn - n2).abs() < 1e-12);
    }

    #[test]
    fn hopf_matches_quaternion_identity() {
        // with q = z1 - conj(z2) j, the imaginary part of q i conj(q) is the
        // Hopf image: (|z1|^2 - |z2|^2) i + 2 z1 conj(z2) k, where the complex
        // coefficient of k expands as Re k + Im (ik) = Re k - Im j
        for seed in 0..20 {
            let t = seed as f64;
            let z1 = [(0.7 * t).sin(), (1.3 * t).cos()];
            let z2 = [(0.4 * t).cos(), (2.1 * t).sin()];
            // q = z1 - conj(z2) j = (a, b, -c, d) for z2 = c + d i
            let q: Quat = [z1[0], z1[1], -z2[0], z2[1]];
            let p = quat_mul(q, quat_mul([0.0, 1.0, 0.0, 0.0], quat_conj(q)));
            let h = hopf_map(z1, z2);
            assert!(p[0].abs() < 1e-12);
            assert!((p[1] - h[0]).abs() < 1e-12, "seed {seed}: {p:?} vs {h:?}");
            assert!((p[3] - h[1]).abs() < 1e-12, "seed {seed}: {p:?} vs {h:?}");
            assert!((p[2] + h[2]).abs() < 1e-12, "seed {seed}: {p:?} vs {h:?}");
        }
    }

    #[test]
    fn profile_branch() {
        let s = coassociative_profile(2.0, 0.0).unwrap();
        assert!((s - 5f64.sqrt()).abs() < 1e-14);
        let s = coassociative_profile(1.0, 1.0).unwrap();
        assert!((s * (4.0 * s * s - 5.0).powi(2) - 1.0).abs() < 1e-10);
        // continuity toward C = 0
        let s = coassociative_profile(1.0, 1e-12).unwrap();
        assert!((s - 5f64.sqrt() / 2.0).abs() < 1e-3);
        assert!(coassociative_profile(1.0, -1.0).is_err());
    }

    #[test]
    fn lo_frames_constants() {
        let profile = CoassocProfile::lawson_osserman();
        let x = [0.8, -0.3, 1.2, 0.4];
        let fr = lo_cone_frames(&x, &profile).unwrap();
        assert!((fr.rho_sq[0] - 4.0 / 9.0).abs() < 1e-12);
        assert!((fr.rho_sq[1] - 1.0 / 6.0).abs() < 1e-12);
        assert!((fr.rho_sq[2] - 1.0 / 6.0).abs() < 1e-12);
        assert!((fr.rho_sq[3] - 1.0).abs() < 1e-12);
        assert!((fr.w - 1.0 / 9.0).abs() < 1e-12);
        assert!((fr.angles[0] - (2.0f64 / 3.0).acos()).abs() < 1e-12);
        assert!((fr.angles[1] - (6f64.sqrt() / 6.0).acos()).abs() < 1e-12);
        assert!(fr.angles[3].abs() < 1e-12);
        assert!(fr.push[3].norm() < 1e-14);
        // e-frame orthonormal; pushforwards mutually orthogonal
        for i in 0..4 {
            assert!((fr.e[i].norm() - 1.0).abs() < 1e-12);
            for j in 0..i {
                assert!(fr.e[i].dot(&fr.e[j]).abs() < 1e-12);
                assert!(fr.push[i].dot(&fr.push[j]).abs() < 1e-10);
            }
        }
        assert!(lo_cone_frames(&[1.0, 0.0, 0.0, 0.0], &profile).is_err());
    }

    #[test]
    fn lo_gauss_w_matches() {
        let profile = CoassocProfile::lawson_osserman();
        let x = [0.5, 0.9, -0.7, 0.2];
        let fr = lo_cone_frames(&x, &profile).unwrap();
        let p = GrassmannPoint::coordinate_plane(4, 3);
        let w = w_function(&fr.gauss, &p).unwrap();
        assert!((w.abs() - 1.0 / 9.0).abs() < 1e-10);
    }

    #[test]
    fn lo_graph_slope() {
        let jets = Jet2::variables(&[0.0, 0.0, 1.0, 0.0]);
        let f = lo_graph_jets(&jets);
        // d f^2 / d x^1 = sqrt5 and the slope factor sqrt6
        let slope = f[1].g[0];
        assert!((slope - 5f64.sqrt()).abs() < 1e-12);
        assert!(((1.0 + slope * slope).sqrt() - 6f64.sqrt()).abs() < 1e-12);
        // degree-1 homogeneity
        let a = Jet2::variables(&[0.4, -0.2, 0.9, 0.3]);
        let b = Jet2::variables(&[0.8, -0.4, 1.8, 0.6]);
        let fa = lo_graph_jets(&a);
        let fb = lo_graph_jets(&b);
        for i in 0..3 {
            assert!((2.0 * fa[i].v - fb[i].v).abs() < 1e-12);
        }
    }

    #[test]
    fn lo_graph_equals_coassoc_value() {
        let profile = CoassocProfile::lawson_osserman();
        let x = [0.3, 0.7, -0.2, 0.5];
        let f = coassociative_value(&x, &profile).unwrap();
        let jets = Jet2::variables(&x);
        let g = lo_graph_jets(&jets);
        for i in 0..3 {
            assert!((f[i] - g[i].v).abs() < 1e-12);
        }
    }

    #[test]
    fn great_circle_cone_is_flat() {
        let imm = sphere_registry("equator(1)").unwrap();
        let cp = cone_geometry(&imm, &[0.7], 1.3).unwrap();
        assert!(cp.b_cone_norm2() < 1e-16);
        assert!(cp.scaling_residual() < 1e-10);
    }

    #[test]
    fn clifford_torus_cone() {
        let imm = sphere_registry("clifford-torus").unwrap();
        let cp = cone_geometry(&imm, &[0.4, 1.1], 0.8).unwrap();
        // |B|^2 of the Clifford torus in S^3 is 2
        assert!((cp.b_link_norm2() - 2.0).abs() < 1e-10);
        assert!((cp.b_cone_norm2() - 2.0 / (0.8f64 * 0.8)).abs() < 1e-8);
        assert!(cp.scaling_residual() < 1e-10);
        assert!(cp.radial_residual() < 1e-10);
        assert!(cone_geometry(&imm, &[0.4, 1.1], 0.0).is_err());
    }

    #[test]
    fn cone_laplacian_scaling() {
        let imm = sphere_registry("clifford-torus").unwrap();
        let f1 = |p: &[f64]| (p[0] + 0.5 * p[1]).sin();
        let (lhs, rhs) = verify_cone_laplacian(&imm, &[0.3, 0.9], 1.7, f1, 1e-3).unwrap();
        assert!((lhs - rhs).abs() < 1e-5 * (1.0 + rhs.abs()), "{lhs} vs {rhs}");
    }

    #[test]
    fn cone_like_normal_gauss_identity() {
        let imm = sphere_registry("clifford-torus").unwrap();
        for p in [[0.2, 0.5], [1.1, -0.6], [2.0, 0.1]] {
            let gn = normal_gauss_map(&imm, &p).unwrap();
            let cone = cone_gauss_map(&imm, &p).unwrap();
            let eta = normal_complement(&cone).unwrap();
            // arccos conditioning near 1 leaves ~1e-8 noise per angle
            assert!(distance(&gn, &eta).unwrap() < 1e-7);
        }
    }

    #[test]
    fn equator_normal_gauss_constant() {
        let imm = sphere_registry("equator(2)").unwrap();
        let a = normal_gauss_map(&imm, &[0.4, 0.9]).unwrap();
        let b = normal_gauss_map(&imm, &[1.2, -0.3]).unwrap();
        assert!(distance(&a, &b).unwrap() < 1e-7);
    }

    #[test]
    fn rigidity_equator_passes() {
        let imm = sphere_registry("equator(2)").unwrap();
        let n0 = normal_gauss_map(&imm, &[0.4, 0.9]).unwrap();
        // build an S-orthogonal partner of the constant normal plane
        let rows = crate::grassmann::matrix_rows(n0.frame());
        let comp = crate::grassmann::orthonormal_complement(n0.frame());
        let mut q_rows = rows.clone();
        q_rows[0] = comp.row(0).iter().copied().collect();
        let q = from_basis(&q_rows).unwrap();
        let params: Vec<Vec<f64>> = (0..10).map(|i| vec![0.3 + 0.25 * i as f64, 0.1 + 0.2 * i as f64]).collect();
        let report = check_rigidity_hypothesis(&imm, &n0, &q, &params, false).unwrap();
        assert!(report.pass);
        assert!(report.samples.iter().all(|s| (s.w_p - 1.0).abs() < 1e-8));
        // threshold switches with the rank flag
        let report2 = check_rigidity_hypothesis(&imm, &n0, &q, &params, true).unwrap();
        assert_eq!(report2.threshold, 0.0);
    }
}
