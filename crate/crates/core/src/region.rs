//! The annular region of the S-map disk, the level-set function F with its
//! transition constants, the smoothed distance-type functions H-tilde and H
//! built from a bump function, and the target diffeomorphism
//! (phi_1, phi_2) = (theta, T(Z)).

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{GeoError, Result};
use crate::grassmann::{self, GrassmannPoint, SOrthogonalPair};
use crate::numeric::{bisect, bisect_decreasing, central_diff};

/// Number of sample intervals used for the bump-function quadratures.
const PHI_SAMPLES: usize = 4096;

/// Region parameters: an S-orthogonal pair defining the S-map, the inner
/// radius c, the margin delta, and the closed angular window.
#[derive(Clone, Debug)]
pub struct RegionSpec {
    pair: SOrthogonalPair,
    c: f64,
    delta: f64,
    theta_min: f64,
    theta_max: f64,
}

#[derive(Serialize, Deserialize)]
struct RegionSpecJson {
    p: GrassmannPoint,
    q: GrassmannPoint,
    c: f64,
    delta: f64,
    theta_min: f64,
    theta_max: f64,
}

impl Serialize for RegionSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RegionSpecJson {
            p: self.pair.p().clone(),
            q: self.pair.q().clone(),
            c: self.c,
            delta: self.delta,
            theta_min: self.theta_min,
            theta_max: self.theta_max,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for RegionSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RegionSpecJson::deserialize(d)?;
        RegionSpec::new(&raw.p, &raw.q, raw.c, raw.delta, (raw.theta_min, raw.theta_max))
            .map_err(serde::de::Error::custom)
    }
}

/// Report produced by the membership test.
#[derive(Clone, Debug, Serialize)]
pub struct RegionReport {
    pub inside: bool,
    pub r: Option<f64>,
    pub theta: Option<f64>,
    pub on_deleted_radius: bool,
}

/// Collinearity data for the level-set gradient check.
#[derive(Clone, Debug, Serialize)]
pub struct CollinearityReport {
    /// Cosine between the chart gradients of -log w(., P_t) and F.
    pub cosine: f64,
    /// Ratio |grad(-log w)| / |grad F|.
    pub ratio: f64,
    /// tan(theta - t), the predicted ratio.
    pub tan_theta_minus_t: f64,
}

/// Output of the target diffeomorphism.
#[derive(Clone, Debug, Serialize)]
pub struct TargetDiffeo {
    /// First component: the polar angle theta.
    pub phi1: f64,
    /// Second component: T(Z) flattened row-major (n*m entries).
    pub phi2: Vec<f64>,
    /// The Z_11 chart entry at the center P_theta (should vanish).
    pub z11: f64,
}

impl RegionSpec {
    pub fn new(
        p: &GrassmannPoint,
        q: &GrassmannPoint,
        c: f64,
        delta: f64,
        theta_set: (f64, f64),
    ) -> Result<Self> {
        let pair = SOrthogonalPair::new(p, q)?;
        if !(0.0..1.0).contains(&c) {
            return Err(GeoError::Precondition(format!("c = {c} must lie in [0, 1)")));
        }
        if delta <= 0.0 {
            return Err(GeoError::Precondition(format!("delta = {delta} must be positive")));
        }
        if c + 2.0 * delta > 1.0 + 1e-12 {
            return Err(GeoError::Precondition(format!(
                "c + 2 delta = {} exceeds 1",
                c + 2.0 * delta
            )));
        }
        let (lo, hi) = theta_set;
        let pi = std::f64::consts::PI;
        if !(lo <= hi && lo > -pi && hi < pi) {
            return Err(GeoError::Precondition(format!(
                "theta window [{lo}, {hi}] must be a closed interval inside (-pi, pi)"
            )));
        }
        Ok(RegionSpec {
            pair,
            c,
            delta,
            theta_min: lo,
            theta_max: hi,
        })
    }

    pub fn pair(&self) -> &SOrthogonalPair {
        &self.pair
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn theta_set(&self) -> (f64, f64) {
        (self.theta_min, self.theta_max)
    }

    /// Membership in the open region: the S-map image avoids the deleted
    /// radius and lies outside the closed disk of radius c.
    pub fn in_region(&self, s: &GrassmannPoint) -> RegionReport {
        match self.pair.polar(s) {
            Ok((r, theta)) => RegionReport {
                inside: r > self.c,
                r: Some(r),
                theta: Some(theta),
                on_deleted_radius: false,
            },
            Err(_) => RegionReport {
                inside: false,
                r: None,
                theta: None,
                on_deleted_radius: true,
            },
        }
    }

    fn polar_in_closure(&self, s: &GrassmannPoint) -> Result<(f64, f64)> {
        let (r, theta) = self.pair.polar(s)?;
        if r < self.c - 1e-10 {
            return Err(GeoError::Domain(format!(
                "r = {r:.6} is below the inner radius c = {}",
                self.c
            )));
        }
        Ok((r, theta))
    }

    /// F(S) = theta - arccos((c + delta)/r); requires r >= c + 2 delta and
    /// theta inside the angular window.
    pub fn f_value(&self, s: &GrassmannPoint) -> Result<f64> {
        let (r, theta) = self.pair.polar(s)?;
        if r < self.c + 2.0 * self.delta - 1e-12 {
            return Err(GeoError::Domain(format!(
                "r = {r:.6} is below c + 2 delta = {}",
                self.c + 2.0 * self.delta
            )));
        }
        if theta < self.theta_min - 1e-12 || theta > self.theta_max + 1e-12 {
            return Err(GeoError::Domain(format!(
                "theta = {theta:.6} is outside the angular window"
            )));
        }
        Ok(theta - ((self.c + self.delta) / r).acos())
    }

    /// (t, w(S, P_t)) with t = F(S); the w-value must equal c + delta.
    pub fn check_level(&self, s: &GrassmannPoint) -> Result<(f64, f64)> {
        let t = self.f_value(s)?;
        let w = grassmann::w_function(s, &self.pair.geodesic(t))?;
        Ok((t, w))
    }

    /// (C2, C3): the gradient lower-bound constant p((c+delta)^(-2/p) - 1)
    /// and the slope bound sqrt(1-(c+delta)^2)/(c+delta).
    pub fn transition_constants(&self) -> (f64, f64) {
        let cd = self.c + self.delta;
        let p = self.pair.n().min(self.pair.m()) as f64;
        let c2 = p * (cd.powf(-2.0 / p) - 1.0);
        let c3 = (1.0 - cd * cd).max(0.0).sqrt() / cd;
        (c2, c3)
    }

    /// Psi(S, t, u) = r cos(theta - t -/+ phi(u)) + u - phi(u) - 1, with the
    /// minus branch when theta >= t and the plus branch otherwise.
    pub fn psi_value(&self, phi: &PhiFunction, s: &GrassmannPoint, t: f64, u: f64) -> Result<f64> {
        if u < 0.0 {
            return Err(GeoError::Domain(format!("u = {u} must be nonnegative")));
        }
        let (r, theta) = self.polar_in_closure(s)?;
        Ok(psi_raw(r, theta, t, u, phi))
    }

    /// The unique root of Psi_t(S, .) on [m_S, M_S], by bisection to 1e-12.
    pub fn h_tilde(&self, phi: &PhiFunction, s: &GrassmannPoint, t: f64) -> Result<f64> {
        let (r, theta) = self.polar_in_closure(s)?;
        let y = (theta - t).abs();
        let pi = std::f64::consts::PI;
        let m_s = if y <= pi { 0.0 } else { phi.inverse(y - pi)? };
        let m_big = if y == 0.0 { phi.support().0 } else { phi.inverse(y)? };
        let f = |u: f64| psi_raw(r, theta, t, u, phi);
        if f(m_s).abs() < 1e-14 {
            return Ok(m_s);
        }
        bisect(f, m_s, m_big, 1e-12, 200).map_err(|e| {
            GeoError::Numeric(format!(
                "root bracketing for the smoothed distance failed on [{m_s:.6}, {m_big:.6}]: {e}"
            ))
        })
    }

    /// H(S, t) = (exp(mu0 H~) - 1)/(exp((11/12 - 3c/4) mu0) - 1).
    pub fn h_value(
        &self,
        phi: &PhiFunction,
        s: &GrassmannPoint,
        t: f64,
        mu0: f64,
    ) -> Result<f64> {
        if mu0 <= 0.0 {
            return Err(GeoError::Precondition(format!("mu0 = {mu0} must be positive")));
        }
        let ht = self.h_tilde(phi, s, t)?;
        let denom = ((11.0 / 12.0 - 0.75 * self.c) * mu0).exp() - 1.0;
        Ok(((mu0 * ht).exp() - 1.0) / denom)
    }

    /// Target diffeomorphism (phi_1, phi_2) = (theta, T(Z)) with Z the chart
    /// matrix at the geodesic point P_theta and
    /// T(Z) = (det(I + Z Z^T)^(1/2) - 1) Z / |Z|_F. |phi_2| = 1/r - 1.
    pub fn target_diffeo(&self, s: &GrassmannPoint) -> Result<TargetDiffeo> {
        let (_, theta) = self.pair.polar(s)?;
        let z = self.pair.chart_at(theta, s)?;
        let n = z.nrows();
        let g = DMatrix::identity(n, n) + &z * z.transpose();
        let stretch = g.determinant().sqrt() - 1.0;
        let norm = z.norm();
        let mut phi2 = Vec::with_capacity(z.nrows() * z.ncols());
        for i in 0..z.nrows() {
            for a in 0..z.ncols() {
                phi2.push(if norm < 1e-14 { 0.0 } else { stretch * z[(i, a)] / norm });
            }
        }
        Ok(TargetDiffeo {
            phi1: theta,
            phi2,
            z11: z[(0, 0)],
        })
    }

    /// Finite-difference check that -grad log w(., P_t) and grad F point the
    /// same way on the level set, with t = F(S). Gradients are taken with
    /// respect to the chart coordinates centered at S.
    pub fn gradient_collinearity(&self, s: &GrassmannPoint) -> Result<CollinearityReport> {
        let t = self.f_value(s)?;
        let (r, _) = self.pair.polar(s)?;
        let p_t = self.pair.geodesic(t);
        let n = s.n();
        let m = s.m();
        let center = s.clone();
        let point_at = move |coords: &[f64]| -> Result<GrassmannPoint> {
            let z = DMatrix::from_fn(n, m, |i, a| coords[i * m + a]);
            grassmann::MatrixChart { center: center.clone(), z }.reconstruct()
        };
        let f_of = |coords: &[f64]| -> f64 {
            point_at(coords).and_then(|pt| self.f_value(&pt)).unwrap_or(f64::NAN)
        };
        let g_of = |coords: &[f64]| -> f64 {
            point_at(coords)
                .and_then(|pt| grassmann::w_function(&pt, &p_t))
                .map(|w| -w.ln())
                .unwrap_or(f64::NAN)
        };
        let zero = vec![0.0; n * m];
        let h = 1e-5;
        let mut gf = Vec::with_capacity(n * m);
        let mut gg = Vec::with_capacity(n * m);
        for i in 0..n * m {
            gf.push(central_diff(&f_of, &zero, i, h));
            gg.push(central_diff(&g_of, &zero, i, h));
        }
        if gf.iter().chain(gg.iter()).any(|v| !v.is_finite()) {
            return Err(GeoError::Numeric(
                "finite-difference gradient left the chart domain".into(),
            ));
        }
        let nf = gf.iter().map(|v| v * v).sum::<f64>().sqrt();
        let ng = gg.iter().map(|v| v * v).sum::<f64>().sqrt();
        if nf < 1e-14 || ng < 1e-14 {
            return Err(GeoError::Numeric("vanishing gradient in collinearity check".into()));
        }
        let dot: f64 = gf.iter().zip(&gg).map(|(a, b)| a * b).sum();
        Ok(CollinearityReport {
            cosine: dot / (nf * ng),
            ratio: ng / nf,
            tan_theta_minus_t: ((self.c + self.delta) / r).acos().tan(),
        })
    }
}

fn psi_raw(r: f64, theta: f64, t: f64, u: f64, phi: &PhiFunction) -> f64 {
    let pu = phi.value(u);
    let angle = if theta >= t { theta - t - pu } else { theta - t + pu };
    r * angle.cos() + u - pu - 1.0
}

/// The smoothing function phi: zero on [0, a], transition on [a, b] driven
/// by a normalized bump raised to the power beta, and slope one past b, so
/// that u - phi(u) -> 5/6 - c/2.
#[derive(Clone, Debug)]
pub struct PhiFunction {
    c: f64,
    beta: f64,
    a: f64,
    b: f64,
    /// phi at the transition-grid nodes.
    values: Vec<f64>,
    /// phi' = xi_2^beta at the nodes.
    derivs: Vec<f64>,
}

/// Build phi for inner radius `c`; the transition support
/// (11/12 - 3c/4, 3/4 - c/4) is nonempty only for c > 1/3.
pub fn build_phi(c: f64) -> Result<PhiFunction> {
    if !(c > 1.0 / 3.0 && c < 1.0) {
        return Err(GeoError::Precondition(format!(
            "c = {c} must lie in (1/3, 1) for the transition interval to be nonempty"
        )));
    }
    let a = 11.0 / 12.0 - 0.75 * c;
    let b = 0.75 - 0.25 * c;
    let n = PHI_SAMPLES;
    let h = (b - a) / n as f64;

    let bump = |u: f64| -> f64 {
        let s = 2.0 * (u - a) / (b - a) - 1.0;
        if s.abs() >= 1.0 {
            0.0
        } else {
            (-1.0 / (1.0 - s * s)).exp()
        }
    };

    // Cumulative integral of the bump by per-interval Simpson, at nodes and
    // midpoints, then normalized to xi_2 in [0, 1].
    let mut cum_nodes = vec![0.0; n + 1];
    let mut cum_mids = vec![0.0; n];
    for i in 0..n {
        let u0 = a + i as f64 * h;
        let um = u0 + 0.5 * h;
        let u1 = u0 + h;
        cum_mids[i] = cum_nodes[i]
            + h / 12.0 * (bump(u0) + 4.0 * bump(u0 + 0.25 * h) + bump(um));
        cum_nodes[i + 1] = cum_nodes[i] + h / 6.0 * (bump(u0) + 4.0 * bump(um) + bump(u1));
    }
    let total = cum_nodes[n];
    let xi2_nodes: Vec<f64> = cum_nodes.iter().map(|v| v / total).collect();
    let xi2_mids: Vec<f64> = cum_mids.iter().map(|v| v / total).collect();

    // beta solves: integral of xi_2^beta over [a, b] = -1/12 + c/4.
    let integral_pow = |beta: f64| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            s += h / 6.0
                * (xi2_nodes[i].powf(beta)
                    + 4.0 * xi2_mids[i].powf(beta)
                    + xi2_nodes[i + 1].powf(beta));
        }
        s
    };
    let target = -1.0 / 12.0 + 0.25 * c;
    let beta = bisect_decreasing(integral_pow, target, 1e-10)?;

    let derivs: Vec<f64> = xi2_nodes.iter().map(|v| v.powf(beta)).collect();
    let deriv_mids: Vec<f64> = xi2_mids.iter().map(|v| v.powf(beta)).collect();
    let mut values = vec![0.0; n + 1];
    for i in 0..n {
        values[i + 1] = values[i] + h / 6.0 * (derivs[i] + 4.0 * deriv_mids[i] + derivs[i + 1]);
    }

    Ok(PhiFunction {
        c,
        beta,
        a,
        b,
        values,
        derivs,
    })
}

impl PhiFunction {
    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Endpoints (a, b) of the transition interval.
    pub fn support(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    /// The plateau value phi(b) = -1/12 + c/4.
    pub fn plateau(&self) -> f64 {
        *self.values.last().unwrap()
    }

    /// phi(u): 0 below a, cubic Hermite interpolation of the sampled
    /// transition, u - 5/6 + c/2 above b (continued with the sampled value
    /// at b so the function stays continuous).
    pub fn value(&self, u: f64) -> f64 {
        if u <= self.a {
            return 0.0;
        }
        if u >= self.b {
            return self.plateau() + (u - self.b);
        }
        let n = self.values.len() - 1;
        let h = (self.b - self.a) / n as f64;
        let pos = (u - self.a) / h;
        let i = (pos.floor() as usize).min(n - 1);
        let s = pos - i as f64;
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (d0, d1) = (self.derivs[i] * h, self.derivs[i + 1] * h);
        let s2 = s * s;
        let s3 = s2 * s;
        (2.0 * s3 - 3.0 * s2 + 1.0) * y0
            + (s3 - 2.0 * s2 + s) * d0
            + (-2.0 * s3 + 3.0 * s2) * y1
            + (s3 - s2) * d1
    }

    /// phi'(u) by linear interpolation of the sampled xi_2^beta.
    pub fn deriv(&self, u: f64) -> f64 {
        if u <= self.a {
            return 0.0;
        }
        if u >= self.b {
            return 1.0;
        }
        let n = self.derivs.len() - 1;
        let h = (self.b - self.a) / n as f64;
        let pos = (u - self.a) / h;
        let i = (pos.floor() as usize).min(n - 1);
        let s = pos - i as f64;
        self.derivs[i] * (1.0 - s) + self.derivs[i + 1] * s
    }

    /// The smallest u with phi(u) >= y, for y > 0; errors for y <= 0
    /// (the whole plateau [0, a] is a preimage of 0).
    pub fn inverse(&self, y: f64) -> Result<f64> {
        if y <= 0.0 {
            return Err(GeoError::Domain(format!(
                "phi-inverse of {y} is not unique on the zero plateau"
            )));
        }
        if y >= self.plateau() {
            return Ok(y - self.plateau() + self.b);
        }
        bisect(|u| self.value(u) - y, self.a, self.b, 1e-13, 200)
    }
}
