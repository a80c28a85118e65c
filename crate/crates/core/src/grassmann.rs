//! Points of the oriented Grassmannian G(n,m): the w-function, Jordan angles,
//! distance, S-orthogonality, geodesics between S-orthogonal pairs, S-maps,
//! matrix coordinate charts and the normal-complement isometry.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{GeoError, Result};
use crate::multivector::{hodge_star, inner, wedge, Multivector};

/// Tolerance used when classifying Jordan angles as exactly zero.
pub const ANGLE_ZERO_TOL: f64 = 1e-9;

/// An oriented n-plane in R^{n+m}, stored as an oriented orthonormal frame
/// (rows of `frame`) with the unit Plucker n-vector cached.
#[derive(Clone, Debug)]
pub struct GrassmannPoint {
    n: usize,
    m: usize,
    frame: DMatrix<f64>,
    plucker: Multivector,
}

/// Serialized form: row-major frame matrix.
#[derive(Serialize, Deserialize)]
struct FrameJson {
    n: usize,
    m: usize,
    frame: Vec<Vec<f64>>,
}

impl Serialize for GrassmannPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FrameJson {
            n: self.n,
            m: self.m,
            frame: matrix_rows(&self.frame),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GrassmannPoint {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = FrameJson::deserialize(d)?;
        if raw.frame.len() != raw.n {
            return Err(serde::de::Error::custom(format!(
                "expected {} frame rows, got {}",
                raw.n,
                raw.frame.len()
            )));
        }
        for row in &raw.frame {
            if row.len() != raw.n + raw.m {
                return Err(serde::de::Error::custom(format!(
                    "expected frame rows of length {}, got {}",
                    raw.n + raw.m,
                    row.len()
                )));
            }
        }
        from_basis(&raw.frame).map_err(serde::de::Error::custom)
    }
}

pub fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

impl GrassmannPoint {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn ambient_dim(&self) -> usize {
        self.n + self.m
    }

    /// Orthonormal frame rows spanning the plane.
    pub fn frame(&self) -> &DMatrix<f64> {
        &self.frame
    }

    /// Cached unit Plucker vector.
    pub fn plucker(&self) -> &Multivector {
        &self.plucker
    }

    /// The coordinate n-plane span(eps_1 .. eps_n) with standard orientation.
    pub fn coordinate_plane(n: usize, m: usize) -> Self {
        let mut frame = DMatrix::zeros(n, n + m);
        for i in 0..n {
            frame[(i, i)] = 1.0;
        }
        from_frame_unchecked(frame, m)
    }
}

fn from_frame_unchecked(frame: DMatrix<f64>, m: usize) -> GrassmannPoint {
    let n = frame.nrows();
    let plucker = plucker_of_frame(&frame);
    GrassmannPoint { n, m, frame, plucker }
}

fn plucker_of_frame(frame: &DMatrix<f64>) -> Multivector {
    let rows = matrix_rows(frame);
    let w = wedge(&rows).expect("frame rows share the ambient dimension");
    let norm = w.norm();
    w.scale(1.0 / norm)
}

/// Orthonormalize `vectors` by Gram-Schmidt, preserving span and orientation,
/// and cache the Plucker vector.
pub fn from_basis(vectors: &[Vec<f64>]) -> Result<GrassmannPoint> {
    let n = vectors.len();
    if n == 0 {
        return Err(GeoError::DegenerateInput("empty basis".into()));
    }
    let d = vectors[0].len();
    if d < n {
        return Err(GeoError::DimensionMismatch(format!(
            "{n} vectors cannot be independent in dimension {d}"
        )));
    }
    for v in vectors {
        if v.len() != d {
            return Err(GeoError::DimensionMismatch(
                "basis vectors must share the ambient dimension".into(),
            ));
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(GeoError::Numeric("non-finite basis entry".into()));
        }
    }
    let mat = DMatrix::from_fn(n, d, |i, j| vectors[i][j]);
    let svd = mat.clone().svd(false, false);
    let smin = svd.singular_values.iter().cloned().fold(f64::INFINITY, f64::min);
    if smin <= 1e-10 {
        return Err(GeoError::DegenerateInput(format!(
            "basis is numerically rank-deficient (sigma_min = {smin:.3e})"
        )));
    }
    // Sequential Gram-Schmidt keeps the orientation of the input ordering.
    let mut frame = DMatrix::zeros(n, d);
    for i in 0..n {
        let mut v = mat.row(i).transpose();
        for j in 0..i {
            let e = frame.row(j).transpose();
            let c = v.dot(&e);
            v -= e * c;
        }
        let norm = v.norm();
        if norm <= 1e-12 {
            return Err(GeoError::DegenerateInput("Gram-Schmidt collapse".into()));
        }
        frame.set_row(i, &(v / norm).transpose());
    }
    Ok(from_frame_unchecked(frame, d - n))
}

fn check_same_space(p: &GrassmannPoint, q: &GrassmannPoint) -> Result<()> {
    if p.n != q.n || p.m != q.m {
        return Err(GeoError::DimensionMismatch(format!(
            "G({},{}) vs G({},{})",
            p.n, p.m, q.n, q.m
        )));
    }
    Ok(())
}

/// The W-matrix of inner products between the frames of P and Q.
pub fn w_matrix(p: &GrassmannPoint, q: &GrassmannPoint) -> DMatrix<f64> {
    &p.frame * q.frame.transpose()
}

/// w(P,Q) = <psi(P), psi(Q)> = det of the W-matrix; lies in [-1, 1].
pub fn w_function(p: &GrassmannPoint, q: &GrassmannPoint) -> Result<f64> {
    check_same_space(p, q)?;
    inner(&p.plucker, &q.plucker)
}

/// Jordan angles between two planes, with paired angle directions.
#[derive(Clone, Debug)]
pub struct JordanData {
    /// p = min(n,m) angles in [0, pi/2], descending.
    pub angles: Vec<f64>,
    /// Orthonormal angle directions in P, matched to `angles`.
    pub directions_p: Vec<DVector<f64>>,
    /// Matched orthonormal images in Q.
    pub directions_q: Vec<DVector<f64>>,
    /// Number of nonzero angles.
    pub r: usize,
}

/// Jordan angles via the SVD of the W-matrix: theta_i = arccos(sigma_i),
/// with singular values clamped to [0, 1] to absorb round-off.
pub fn jordan_angles(p: &GrassmannPoint, q: &GrassmannPoint) -> Result<JordanData> {
    check_same_space(p, q)?;
    let w = w_matrix(p, q);
    let svd = w.svd(true, true);
    let u = svd.u.as_ref().expect("u requested");
    let vt = svd.v_t.as_ref().expect("v_t requested");
    let n = p.n;
    let pp = p.n.min(p.m);

    // nalgebra returns singular values in descending order; Jordan angles
    // are arccos of them, so the ascending tail holds the large angles.
    let mut entries: Vec<(f64, usize)> = svd
        .singular_values
        .iter()
        .enumerate()
        .map(|(i, &s)| (s.clamp(0.0, 1.0), i))
        .collect();
    entries.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    // At most p angles may be nonzero; keep the p smallest cosines.
    entries.truncate(pp);

    let mut angles = Vec::with_capacity(pp);
    let mut dirs_p = Vec::with_capacity(pp);
    let mut dirs_q = Vec::with_capacity(pp);
    let mut r = 0;
    for &(sigma, col) in &entries {
        let mut theta = sigma.acos();
        if theta < ANGLE_ZERO_TOL {
            theta = 0.0;
        } else {
            r += 1;
        }
        angles.push(theta);
        let mut dp = DVector::zeros(p.ambient_dim());
        let mut dq = DVector::zeros(p.ambient_dim());
        for j in 0..n {
            dp += p.frame.row(j).transpose() * u[(j, col)];
            dq += q.frame.row(j).transpose() * vt[(col, j)];
        }
        dirs_p.push(dp);
        dirs_q.push(dq);
    }
    Ok(JordanData {
        angles,
        directions_p: dirs_p,
        directions_q: dirs_q,
        r,
    })
}

/// d(P,Q) = sqrt(sum of squared Jordan angles).
pub fn distance(p: &GrassmannPoint, q: &GrassmannPoint) -> Result<f64> {
    let jd = jordan_angles(p, q)?;
    Ok(jd.angles.iter().map(|t| t * t).sum::<f64>().sqrt())
}

/// Diagnostic record accompanying the S-orthogonality verdict.
#[derive(Clone, Debug, Serialize)]
pub struct SOrthDiagnostic {
    pub angles: Vec<f64>,
    pub w: f64,
    /// dim(P ∩ Q) computed from the rank of the stacked frames.
    pub dim_intersection: usize,
}

/// True iff exactly one Jordan angle is within `tol` of pi/2 and all the
/// others are within `tol` of 0 (criterion (c) of the equivalence).
pub fn is_s_orthogonal(p: &GrassmannPoint, q: &GrassmannPoint, tol: f64) -> Result<(bool, SOrthDiagnostic)> {
    let jd = jordan_angles(p, q)?;
    let half_pi = std::f64::consts::FRAC_PI_2;
    let near_half_pi = jd.angles.iter().filter(|&&t| (t - half_pi).abs() <= tol).count();
    let near_zero = jd.angles.iter().filter(|&&t| t.abs() <= tol).count();
    let ok = near_half_pi == 1 && near_zero == jd.angles.len() - 1;

    // Cross-check data: dim(P+Q) from the stacked frames, dim(P∩Q) = 2n - dim(P+Q).
    let n = p.n;
    let d = p.ambient_dim();
    let mut stacked = DMatrix::zeros(2 * n, d);
    for i in 0..n {
        stacked.set_row(i, &p.frame.row(i));
        stacked.set_row(n + i, &q.frame.row(i));
    }
    let sv = stacked.svd(false, false).singular_values;
    let rank = sv.iter().filter(|&&s| s > 1e-8).count();
    let diag = SOrthDiagnostic {
        angles: jd.angles.clone(),
        w: w_function(p, q)?,
        dim_intersection: 2 * n - rank,
    };
    Ok((ok, diag))
}

/// Orthonormal basis of the orthogonal complement of the span of the
/// (orthonormal) rows of `rows`, obtained by Gram-Schmidt of the standard
/// basis against them. Deterministic.
pub fn orthonormal_complement(rows: &DMatrix<f64>) -> DMatrix<f64> {
    let k = rows.nrows();
    let d = rows.ncols();
    let mut acc: Vec<DVector<f64>> = (0..k).map(|i| rows.row(i).transpose()).collect();
    let mut comp: Vec<DVector<f64>> = Vec::with_capacity(d - k);
    for j in 0..d {
        if comp.len() == d - k {
            break;
        }
        let mut v = DVector::zeros(d);
        v[j] = 1.0;
        for e in &acc {
            let c = v.dot(e);
            v -= e * c;
        }
        let norm = v.norm();
        if norm > 1e-8 {
            let e = v / norm;
            comp.push(e.clone());
            acc.push(e);
        }
    }
    let mut out = DMatrix::zeros(d - k, d);
    for (i, v) in comp.iter().enumerate() {
        out.set_row(i, &v.transpose());
    }
    out
}

/// An S-orthogonal pair (P, Q) together with the adapted orthonormal basis
/// {e_1, .., e_n, e_{n+1}, .., e_{n+m}} of the ambient space in which
/// psi(P) = e_1 ∧ e_2 ∧ .. ∧ e_n and psi(Q) = e_{n+1} ∧ e_2 ∧ .. ∧ e_n.
#[derive(Clone, Debug)]
pub struct SOrthogonalPair {
    n: usize,
    m: usize,
    /// e_1: the direction of P orthogonal to P ∩ Q.
    pub e1: DVector<f64>,
    /// e_2 .. e_n: orthonormal basis of P ∩ Q (rows).
    pub shared: DMatrix<f64>,
    /// e_{n+1}: the direction of Q orthogonal to P ∩ Q.
    pub en1: DVector<f64>,
    /// e_{n+2} .. e_{n+m}: completion of the above to a basis of R^{n+m}.
    pub rest: DMatrix<f64>,
    p: GrassmannPoint,
    q: GrassmannPoint,
}

impl SOrthogonalPair {
    pub fn new(p: &GrassmannPoint, q: &GrassmannPoint) -> Result<Self> {
        let (ok, diag) = is_s_orthogonal(p, q, 1e-8)?;
        if !ok {
            return Err(GeoError::Precondition(format!(
                "pair is not S-orthogonal (angles {:?}, w = {:.3e})",
                diag.angles, diag.w
            )));
        }
        let n = p.n;
        let m = p.m;
        let d = n + m;
        let w = w_matrix(p, q);
        let svd = w.svd(true, true);
        let u = svd.u.as_ref().unwrap();
        let vt = svd.v_t.as_ref().unwrap();
        // The single sigma ~ 0 column gives e_1 (in P) and e_{n+1} (in Q);
        // sigma ~ 1 columns give the intersection directions.
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| svd.singular_values[a].partial_cmp(&svd.singular_values[b]).unwrap());
        let col0 = order[0];

        let in_p = |col: usize| -> DVector<f64> {
            let mut v = DVector::zeros(d);
            for j in 0..n {
                v += p.frame.row(j).transpose() * u[(j, col)];
            }
            v
        };
        let in_q = |col: usize| -> DVector<f64> {
            let mut v = DVector::zeros(d);
            for j in 0..n {
                v += q.frame.row(j).transpose() * vt[(col, j)];
            }
            v
        };

        let mut e1 = in_p(col0);
        let mut en1 = in_q(col0);
        let mut shared = DMatrix::zeros(n - 1, d);
        for (row, &col) in order[1..].iter().enumerate() {
            shared.set_row(row, &in_p(col).transpose());
        }

        // Fix orientations so that the adapted wedges match the oriented
        // Plucker vectors of P and Q.
        let mut p_rows = vec![e1.iter().copied().collect::<Vec<f64>>()];
        p_rows.extend(matrix_rows(&shared));
        if inner(&wedge(&p_rows)?, p.plucker())? < 0.0 {
            e1 = -e1;
        }
        let mut q_rows = vec![en1.iter().copied().collect::<Vec<f64>>()];
        q_rows.extend(matrix_rows(&shared));
        if inner(&wedge(&q_rows)?, q.plucker())? < 0.0 {
            en1 = -en1;
        }

        let mut span = DMatrix::zeros(n + 1, d);
        span.set_row(0, &e1.transpose());
        for i in 0..n - 1 {
            span.set_row(i + 1, &shared.row(i));
        }
        span.set_row(n, &en1.transpose());
        let rest = orthonormal_complement(&span);

        Ok(SOrthogonalPair {
            n,
            m,
            e1,
            shared,
            en1,
            rest,
            p: p.clone(),
            q: q.clone(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn p(&self) -> &GrassmannPoint {
        &self.p
    }

    pub fn q(&self) -> &GrassmannPoint {
        &self.q
    }

    /// The closed geodesic P_t spanned by {cos t e_1 + sin t e_{n+1}, e_2, .., e_n};
    /// P_0 = P and P_{pi/2} = Q. Period 2 pi.
    pub fn geodesic(&self, t: f64) -> GrassmannPoint {
        let d = self.n + self.m;
        let mut frame = DMatrix::zeros(self.n, d);
        let head = &self.e1 * t.cos() + &self.en1 * t.sin();
        frame.set_row(0, &head.transpose());
        for i in 0..self.n - 1 {
            frame.set_row(i + 1, &self.shared.row(i));
        }
        from_frame_unchecked(frame, self.m)
    }

    /// S-map relative to the pair: S -> (w(S, P_0), w(S, P_{pi/2})).
    pub fn s_map(&self, s: &GrassmannPoint) -> Result<(f64, f64)> {
        Ok((w_function(s, &self.p)?, w_function(s, &self.q)?))
    }

    /// Polar coordinates of the S-map image, r in (0,1], theta in (-pi, pi).
    /// The deleted radius {(a,0): a <= 0} is a hard domain error.
    pub fn polar(&self, s: &GrassmannPoint) -> Result<(f64, f64)> {
        let (x1, x2) = self.s_map(s)?;
        polar_of(x1, x2)
    }

    /// The adapted chart basis at P_t: f_1 = cos t e_1 + sin t e_{n+1},
    /// f_i = e_i for 2 <= i <= n, f_{n+1} = -sin t e_1 + cos t e_{n+1},
    /// f_{n+alpha} = e_{n+alpha} for alpha >= 2.
    pub fn chart_basis(&self, t: f64) -> (DMatrix<f64>, DMatrix<f64>) {
        let d = self.n + self.m;
        let mut tangent = DMatrix::zeros(self.n, d);
        let mut normal = DMatrix::zeros(self.m, d);
        let f1 = &self.e1 * t.cos() + &self.en1 * t.sin();
        let fn1 = -&self.e1 * t.sin() + &self.en1 * t.cos();
        tangent.set_row(0, &f1.transpose());
        for i in 0..self.n - 1 {
            tangent.set_row(i + 1, &self.shared.row(i));
        }
        normal.set_row(0, &fn1.transpose());
        for a in 0..self.m - 1 {
            normal.set_row(a + 1, &self.rest.row(a));
        }
        (tangent, normal)
    }

    /// Matrix coordinates of S in the adapted chart centered at P_t.
    pub fn chart_at(&self, t: f64, s: &GrassmannPoint) -> Result<DMatrix<f64>> {
        let (tangent, normal) = self.chart_basis(t);
        chart_in_basis(s, &tangent, &normal)
    }

    /// Rebuild the point with chart matrix `z` in the chart centered at P_t.
    pub fn point_from_chart(&self, t: f64, z: &DMatrix<f64>) -> Result<GrassmannPoint> {
        let (tangent, normal) = self.chart_basis(t);
        let d = self.n + self.m;
        let mut rows = Vec::with_capacity(self.n);
        for i in 0..self.n {
            let mut v = tangent.row(i).transpose();
            for a in 0..self.m {
                v += normal.row(a).transpose() * z[(i, a)];
            }
            rows.push((0..d).map(|j| v[j]).collect::<Vec<f64>>());
        }
        from_basis(&rows)
    }
}

/// Polar conversion with the deleted radius {(a,0): a <= 0} as a domain error.
pub fn polar_of(x1: f64, x2: f64) -> Result<(f64, f64)> {
    let r = (x1 * x1 + x2 * x2).sqrt();
    if r < 1e-12 || (x1 <= 0.0 && x2.abs() < 1e-12) {
        return Err(GeoError::Domain(format!(
            "S-map image ({x1:.3e}, {x2:.3e}) lies on the deleted radius"
        )));
    }
    Ok((r.min(1.0), x2.atan2(x1)))
}

/// Geodesic P_t for an S-orthogonal pair (constructs the adapted basis).
pub fn geodesic_pt(p: &GrassmannPoint, q: &GrassmannPoint, t: f64) -> Result<GrassmannPoint> {
    Ok(SOrthogonalPair::new(p, q)?.geodesic(t))
}

/// Matrix coordinates of a point with respect to a chart center.
#[derive(Clone, Debug)]
pub struct MatrixChart {
    pub center: GrassmannPoint,
    pub z: DMatrix<f64>,
}

/// Deterministic normal completion used by `matrix_chart` and
/// `MatrixChart::reconstruct`.
pub fn chart_completion(center: &GrassmannPoint) -> DMatrix<f64> {
    orthonormal_complement(center.frame())
}

fn chart_in_basis(s: &GrassmannPoint, tangent: &DMatrix<f64>, normal: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let a = s.frame() * tangent.transpose();
    let b = s.frame() * normal.transpose();
    let det = a.determinant();
    if det <= 1e-10 {
        return Err(GeoError::OutsideChart(format!(
            "w(S, center) = {det:.3e} is not positive"
        )));
    }
    let inv = a.try_inverse().ok_or_else(|| GeoError::OutsideChart("singular W-matrix".into()))?;
    Ok(inv * b)
}

/// Matrix coordinates of `s` in the chart centered at `center`; the rows
/// eps_i + Z_{i alpha} eps_{n+alpha} span `s`.
pub fn matrix_chart(s: &GrassmannPoint, center: &GrassmannPoint) -> Result<MatrixChart> {
    check_same_space(s, center)?;
    let normal = chart_completion(center);
    let z = chart_in_basis(s, center.frame(), &normal)?;
    Ok(MatrixChart {
        center: center.clone(),
        z,
    })
}

impl MatrixChart {
    /// Span the rows eps_i + Z_{i alpha} eps_{n+alpha} and re-orthonormalize.
    pub fn reconstruct(&self) -> Result<GrassmannPoint> {
        let normal = chart_completion(&self.center);
        let n = self.center.n;
        let m = self.center.m;
        let d = n + m;
        let mut rows = Vec::with_capacity(n);
        for i in 0..n {
            let mut v = self.center.frame.row(i).transpose();
            for a in 0..m {
                v += normal.row(a).transpose() * self.z[(i, a)];
            }
            rows.push((0..d).map(|j| v[j]).collect::<Vec<f64>>());
        }
        from_basis(&rows)
    }

    /// det(I + Z Z^T)^{-1/2}, which equals w(S, center).
    pub fn w_from_z(&self) -> f64 {
        w_of_chart_matrix(&self.z)
    }
}

/// det(I_n + Z Z^T)^{-1/2}.
pub fn w_of_chart_matrix(z: &DMatrix<f64>) -> f64 {
    let n = z.nrows();
    let g = DMatrix::identity(n, n) + z * z.transpose();
    g.determinant().sqrt().recip()
}

/// Eigenvalues {(1 + lambda_i^2)(1 + lambda_alpha^2)} of the inverse chart
/// metric, from the singular values lambda of Z (zero beyond min(n,m)).
pub fn chart_metric_eigen(z: &DMatrix<f64>) -> Vec<f64> {
    let n = z.nrows();
    let m = z.ncols();
    let p = n.min(m);
    let sv = z.clone().svd(false, false).singular_values;
    let lam = |k: usize| if k < p { sv[k] } else { 0.0 };
    let mut out = Vec::with_capacity(n * m);
    for i in 0..n {
        for a in 0..m {
            out.push((1.0 + lam(i) * lam(i)) * (1.0 + lam(a) * lam(a)));
        }
    }
    out
}

/// The isometry eta: G(n,m) -> G(m,n) sending a plane to its oriented
/// orthogonal complement; psi(eta(S)) = *(psi(S)).
pub fn normal_complement(s: &GrassmannPoint) -> Result<GrassmannPoint> {
    let star = hodge_star(s.plucker())?;
    let mut comp = orthonormal_complement(s.frame());
    let rows = matrix_rows(&comp);
    let sign = inner(&wedge(&rows)?, &star)?;
    if sign < 0.0 {
        let first = -comp.row(0).clone_owned();
        comp.set_row(0, &first);
    }
    Ok(from_frame_unchecked(comp, s.n))
}

/// (lhs, rhs) of the gradient lower bound for log w at S in the chart of
/// `center`: lhs = sum of tan^2 of the Jordan angles, rhs = p(w^{-2/p} - 1).
pub fn grad_logw_lower_bound(s: &GrassmannPoint, center: &GrassmannPoint) -> Result<(f64, f64)> {
    let w = w_function(s, center)?;
    if w <= 0.0 {
        return Err(GeoError::OutsideChart(format!("w(S, center) = {w:.3e}")));
    }
    let jd = jordan_angles(s, center)?;
    let lhs: f64 = jd.angles.iter().map(|t| t.tan().powi(2)).sum();
    let p = s.n.min(s.m) as f64;
    let rhs = p * (w.powf(-2.0 / p) - 1.0);
    Ok((lhs, rhs))
}

/// Wedge of the frame rows with the rows at positions in `subs` replaced by
/// the given vectors (the simple vectors e_{j alpha}, e_{j alpha, k beta}).
pub fn wedge_with_replacements(frame: &DMatrix<f64>, subs: &[(usize, &DVector<f64>)]) -> Result<Multivector> {
    let mut rows = matrix_rows(frame);
    for &(pos, v) in subs {
        rows[pos] = v.iter().copied().collect();
    }
    wedge(&rows)
}
