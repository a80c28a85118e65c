//! Independent oracles for the core numerics: hand-rolled cofactor
//! determinants against the Plucker pairing, brute-force critical-angle
//! search against SVD Jordan angles, finite differences against jets, and
//! property-based invariants.

mod common;

use common::{brute_force_angles, random_point, rng};
use gbk_core::grassmann::{self, GrassmannPoint};
use gbk_core::numeric::Jet2;
use gbk_core::region::build_phi;
use nalgebra::DMatrix;
use proptest::prelude::*;

/// Recursive Laplace cofactor expansion, independent of nalgebra's LU.
fn det_cofactor(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    if n == 1 {
        return m[(0, 0)];
    }
    let mut acc = 0.0;
    for j in 0..n {
        let minor = DMatrix::from_fn(n - 1, n - 1, |r, c| {
            m[(r + 1, if c < j { c } else { c + 1 })]
        });
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        acc += sign * m[(0, j)] * det_cofactor(&minor);
    }
    acc
}

#[test]
fn w_equals_cofactor_determinant() {
    let mut r = rng(11);
    for (n, m) in [(2, 2), (3, 2), (2, 3), (4, 3)] {
        for _ in 0..50 {
            let p = random_point(&mut r, n, m);
            let q = random_point(&mut r, n, m);
            let w = grassmann::w_function(&p, &q).unwrap();
            let wm = grassmann::w_matrix(&p, &q);
            assert!(
                (w - det_cofactor(&wm)).abs() < 1e-12,
                "G({n},{m}): {w} vs {}",
                det_cofactor(&wm)
            );
        }
    }
}

#[test]
fn abs_w_is_product_of_cosines() {
    let mut r = rng(12);
    for (n, m) in [(2, 2), (3, 2), (2, 3)] {
        for _ in 0..50 {
            let p = random_point(&mut r, n, m);
            let q = random_point(&mut r, n, m);
            let w = grassmann::w_function(&p, &q).unwrap();
            let jd = grassmann::jordan_angles(&p, &q).unwrap();
            let prod: f64 = jd.angles.iter().map(|a| a.cos()).product();
            assert!((w.abs() - prod).abs() < 1e-10, "G({n},{m}): |{w}| vs {prod}");
        }
    }
}

#[test]
fn jordan_angles_match_brute_force_search() {
    let mut r = rng(13);
    for (n, m) in [(2, 2), (3, 2)] {
        for _ in 0..20 {
            let p = random_point(&mut r, n, m);
            let q = random_point(&mut r, n, m);
            let svd_angles = grassmann::jordan_angles(&p, &q).unwrap().angles;
            let brute = brute_force_angles(&p, &q);
            assert_eq!(svd_angles.len(), brute.len());
            for (a, b) in svd_angles.iter().zip(&brute) {
                assert!((a - b).abs() < 1e-5, "G({n},{m}): {svd_angles:?} vs {brute:?}");
            }
        }
    }
}

#[test]
fn jets_match_finite_differences() {
    // a composite with all supported primitives
    let f = |x: &[f64]| -> f64 {
        (x[0] * x[1]).sin() + (1.0 + x[0] * x[0]).sqrt() * (-x[1]).exp() + x[0] / (2.0 + x[1].cos())
    };
    let jf = |x: &[Jet2]| -> Jet2 {
        let a = x[0].mul(&x[1]).sin();
        let b = x[0].mul(&x[0]).add_scalar(1.0).sqrt().mul(&x[1].neg().exp());
        let c = x[0].div(&x[1].cos().add_scalar(2.0));
        a.add(&b).add(&c)
    };
    let x = [0.7, -0.4];
    let jet = jf(&Jet2::variables(&x));
    assert!((jet.v - f(&x)).abs() < 1e-14);
    let h = 1e-5;
    for i in 0..2 {
        let mut xp = x;
        let mut xm = x;
        xp[i] += h;
        xm[i] -= h;
        let fd = (f(&xp) - f(&xm)) / (2.0 * h);
        assert!((jet.g[i] - fd).abs() < 1e-8, "grad[{i}]: {} vs {fd}", jet.g[i]);
        for j in 0..2 {
            let jet_p = jf(&Jet2::variables(&xp));
            let jet_m = jf(&Jet2::variables(&xm));
            let fd2 = (jet_p.g[j] - jet_m.g[j]) / (2.0 * h);
            assert!((jet.h[(i, j)] - fd2).abs() < 1e-7);
        }
    }
}

#[test]
fn phi_quadrature_consistency() {
    for c in [0.4, 0.55, 0.7, 0.9] {
        let phi = build_phi(c).unwrap();
        let (a, b) = phi.support();
        assert!(a < b);
        // continuity of the linear tail at b pins the normalizing exponent:
        // the transition integral must equal c/4 - 1/12
        let target = c / 4.0 - 1.0 / 12.0;
        assert!((phi.value(b) - target).abs() < 1e-8, "c = {c}");
        assert!((phi.plateau() - target).abs() < 1e-8);
        // independent check of the linear tail and monotonicity
        for k in 1..=20 {
            let u = b + 0.3 * k as f64;
            assert!((phi.value(u) - (u - 5.0 / 6.0 + c / 2.0)).abs() < 1e-10);
        }
        let mut prev = -1.0;
        for k in 0..=200 {
            let u = a + (b + 1.0 - a) * k as f64 / 200.0;
            let v = phi.value(u);
            assert!(v >= prev - 1e-12);
            prev = v;
        }
        // inverse round trip in the strictly increasing range
        for k in 1..=10 {
            let y = target * k as f64 / 10.0 + 0.5 * target;
            let y = y.min(target * 1.4);
            let u = phi.inverse(y).unwrap();
            assert!((phi.value(u) - y).abs() < 1e-10);
        }
    }
}

fn frame_strategy(n: usize, m: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    proptest::collection::vec(
        proptest::collection::vec(-1.0f64..1.0, n + m),
        n,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn plucker_is_unit_and_scale_invariant(rows in frame_strategy(2, 2), scale in 0.1f64..10.0) {
        if let Ok(p) = grassmann::from_basis(&rows) {
            let norm = gbk_core::multivector::inner(p.plucker(), p.plucker()).unwrap();
            prop_assert!((norm - 1.0).abs() < 1e-10);
            let scaled: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|v| v * scale).collect()).collect();
            let ps = grassmann::from_basis(&scaled).unwrap();
            prop_assert!(grassmann::w_function(&p, &ps).unwrap() > 1.0 - 1e-10);
        }
    }

    #[test]
    fn w_symmetric_and_bounded(a in frame_strategy(2, 3), b in frame_strategy(2, 3)) {
        if let (Ok(p), Ok(q)) = (grassmann::from_basis(&a), grassmann::from_basis(&b)) {
            let wpq = grassmann::w_function(&p, &q).unwrap();
            let wqp = grassmann::w_function(&q, &p).unwrap();
            prop_assert!((wpq - wqp).abs() < 1e-12);
            prop_assert!(wpq.abs() <= 1.0 + 1e-12);
            prop_assert!((grassmann::w_function(&p, &p).unwrap() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn jordan_angles_in_range(a in frame_strategy(3, 2), b in frame_strategy(3, 2)) {
        if let (Ok(p), Ok(q)) = (grassmann::from_basis(&a), grassmann::from_basis(&b)) {
            let jd = grassmann::jordan_angles(&p, &q).unwrap();
            prop_assert_eq!(jd.angles.len(), 2);
            for th in &jd.angles {
                prop_assert!((0.0..=std::f64::consts::FRAC_PI_2 + 1e-12).contains(th));
            }
            let d = grassmann::distance(&p, &q).unwrap();
            let dr = grassmann::distance(&q, &p).unwrap();
            prop_assert!((d - dr).abs() < 1e-9);
        }
    }

    #[test]
    fn normal_complement_preserves_w(a in frame_strategy(2, 3), b in frame_strategy(2, 3)) {
        if let (Ok(p), Ok(q)) = (grassmann::from_basis(&a), grassmann::from_basis(&b)) {
            let wpq = grassmann::w_function(&p, &q).unwrap();
            let np = grassmann::normal_complement(&p).unwrap();
            let nq = grassmann::normal_complement(&q).unwrap();
            let wn = grassmann::w_function(&np, &nq).unwrap();
            prop_assert!((wpq - wn).abs() < 1e-10);
        }
    }
}

#[test]
fn s_map_lands_in_unit_disk() {
    let mut r = rng(14);
    let p = GrassmannPoint::coordinate_plane(2, 2);
    let q = grassmann::from_basis(&[
        vec![0.0, 0.0, 1.0, 0.0],
        vec![0.0, 1.0, 0.0, 0.0],
    ])
    .unwrap();
    let pair = grassmann::SOrthogonalPair::new(&p, &q).unwrap();
    for _ in 0..200 {
        let s = random_point(&mut r, 2, 2);
        let (x1, x2) = pair.s_map(&s).unwrap();
        assert!(x1 * x1 + x2 * x2 <= 1.0 + 1e-10);
    }
}
