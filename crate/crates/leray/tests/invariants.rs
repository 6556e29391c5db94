use leray::geometry::{jet2, AffinePoint, Ellipse, Hypersurface, LpSphere, Quadric, Tube, UnitSphere};
use leray::invariants::{
    beltrami_b, classify, fefferman_weight, phi, phi_det, point_invariants, point_invariants_from_jet,
    sharp_exponent,
};
use leray::C64;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[test]
fn spheres_are_flat_models() {
    for n in 1..=3 {
        let s = UnitSphere::new(n).unwrap();
        let u = vec![0.41; s.sample_dim()];
        let p = s.sample(&u).unwrap();
        let inv = point_invariants(&s, &p).unwrap();
        assert!((inv.phi - 1.0).abs() < 1e-12, "n = {n}");
        assert!((inv.fefferman_w - 1.0).abs() < 1e-12, "n = {n}");
        assert!(inv.beta.iter().all(|b| b.norm() < 1e-12));
        if n == 2 {
            assert!(inv.b.unwrap().norm() < 1e-12);
        }
    }
}

#[test]
fn quadric_alpha_beta() {
    let q = Quadric::new(vec![1.0, 3.0], vec![c(0.6, 0.0), c(0.0, 1.5)]).unwrap();
    let o = AffinePoint::origin(3);
    let inv = point_invariants(&q, &o).unwrap();
    let mut ratios: Vec<f64> = inv.alpha.iter().zip(&inv.beta).map(|(a, b)| b.norm() / a).collect();
    ratios.sort_by(|a, b| a.partial_cmp(b).unwrap());
    assert!((ratios[0] - 0.5).abs() < 1e-12 && (ratios[1] - 0.6).abs() < 1e-12);
    assert!((inv.phi - 0.75 * 0.64).abs() < 1e-12);
    assert!((phi_det(&q, &o).unwrap() - inv.phi).abs() < 1e-12);
}

#[test]
fn invariants_ignore_defining_function_scale() {
    let s = LpSphere::new(4.0).unwrap();
    let p = s.point(0.3, 0.5, 2.0);
    let jet = jet2(&s, &p).unwrap();
    let a = point_invariants_from_jet(&jet).unwrap();
    let b = point_invariants_from_jet(&jet.scaled(7.5)).unwrap();
    assert!((a.phi - b.phi).abs() < 1e-12);
    assert!((a.b.unwrap() - b.b.unwrap()).norm() < 1e-12);
    assert!((a.fefferman_w - b.fefferman_w).abs() < 1e-12 * a.fefferman_w);
}

#[test]
fn sharp_density_relation() {
    assert_eq!(sharp_exponent(1), -0.25);
    assert!((sharp_exponent(2) + 1.0 / 3.0).abs() < 1e-15);
    let s = LpSphere::new(3.0).unwrap();
    let p = s.point(0.7, 0.1, 0.2);
    let inv = point_invariants(&s, &p).unwrap();
    let expect = inv.phi.powf(sharp_exponent(2)) * inv.fefferman_w;
    assert!((inv.sharp_w.unwrap() - expect).abs() < 1e-13);
    assert!((phi(&s, &p).unwrap() - 8.0 / 9.0).abs() < 1e-12);
    assert!(fefferman_weight(&s, &p).unwrap() > 0.0);
}

#[test]
fn ellipse_phi_is_one() {
    // every planar curve is locally Möbius flat in the φ sense
    let e = Ellipse::new(3.0, 1.0).unwrap();
    let p = e.sample(&[0.2]).unwrap();
    assert!((phi(&e, &p).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn classification_boundary() {
    let o = AffinePoint::origin(2);
    let convex = classify(&Quadric::planar(1.0, c(0.9, 0.0)).unwrap(), &o).unwrap();
    assert!(convex.strongly_convexlike && convex.pseudoconvex);
    let beyond = classify(&Quadric::planar(1.0, c(0.0, 1.2)).unwrap(), &o).unwrap();
    assert!(!beyond.strongly_convexlike && beyond.pseudoconvex);
    let concave = classify(&Quadric::planar(-1.0, c(0.2, 0.0)).unwrap(), &o).unwrap();
    assert!(!concave.pseudoconvex && !concave.strongly_convexlike);
}

#[test]
fn tubes_are_degenerate() {
    let t = Tube::new(1.0, 1.0).unwrap();
    let p = t.point(c(0.3, 0.4), 0.0);
    assert!((beltrami_b(&t, &p).unwrap().norm() - 1.0).abs() < 1e-12);
    let inv = point_invariants(&t, &p).unwrap();
    assert!(inv.phi.abs() < 1e-12);
    assert!(inv.sharp_w.is_none());
    assert!(!inv.strongly_convexlike);
}

#[test]
fn beltrami_needs_two_dimensions() {
    let s = UnitSphere::new(3).unwrap();
    let p = s.sample(&[0.2, 0.3, 0.4, 0.5, 0.6]).unwrap();
    assert!(beltrami_b(&s, &p).is_err());
}

mod mobius_invariance {
    use super::c;
    use leray::geometry::{Hypersurface, LpSphere, MobiusImage, MobiusMap};
    use leray::invariants::point_invariants;
    use leray::CMat;
    use proptest::prelude::*;
    use std::sync::Arc;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn b_and_phi_survive_projective_maps(
            entries in proptest::collection::vec(-0.2f64..0.2, 18),
            u in proptest::collection::vec(0.05f64..0.95, 3),
            p in 1.3f64..5.0,
        ) {
            let base: Arc<dyn Hypersurface> = Arc::new(LpSphere::new(p).unwrap());
            let m = CMat::identity(3, 3) + CMat::from_fn(3, 3, |i, j| c(entries[2 * (3 * i + j)], entries[2 * (3 * i + j) + 1]));
            let map = MobiusMap::normalized(m).unwrap();
            let image = MobiusImage::new(base.clone(), map.clone()).unwrap();
            let z = base.sample(&u).unwrap();
            let w = map.apply(&z).unwrap();
            let before = point_invariants(base.as_ref(), &z).unwrap();
            let after = point_invariants(&image, &w).unwrap();
            prop_assert!((before.phi - after.phi).abs() < 1e-9);
            prop_assert!((before.b.unwrap().norm() - after.b.unwrap().norm()).abs() < 1e-9);
        }
    }
}
