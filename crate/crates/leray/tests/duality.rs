use leray::duality::{
    contact_check, dual_invariants, dual_jet, dual_jet_fit, dual_point, dual_surface, incidence_residual,
    roundtrip, transport_check, DualChart,
};
use leray::geometry::{jet2, AffinePoint, Ellipse, Hypersurface, LpSphere, PowerGraph, Quadric, UnitSphere};
use leray::invariants::point_invariants_from_jet;
use leray::C64;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[test]
fn dual_point_is_the_tangent_hyperplane() {
    let s = PowerGraph::new(3.0).unwrap();
    let p = s.point(c(0.5, -0.4), 0.3);
    let eta = dual_point(&s, &p).unwrap().eta;
    assert!(incidence_residual(&p, &eta) < 1e-14);
    // the hyperplane contains every complex tangent direction
    let g = jet2(&s, &p).unwrap().grad;
    let e = leray::linalg::complement_basis(&g.map(|x| x.conj()));
    let q = AffinePoint::from_vec(&p.z + e.column(0) * c(0.3, 0.0)).unwrap();
    assert!(incidence_residual(&q, &eta) < 1e-13);
}

#[test]
fn circle_dual_is_reflected_circle() {
    let m = Ellipse::circle(1.0).mesh(32).unwrap();
    let d = dual_surface(&m).unwrap();
    assert_eq!(d.chart, DualChart::Eta);
    for (a, b) in m.nodes.iter().zip(&d.mesh.nodes) {
        assert!((a.z[0] + b.z[0]).norm() < 1e-13);
    }
}

#[test]
fn torus_meshes_use_polar_chart() {
    let m = LpSphere::new(3.0).unwrap().mesh(8).unwrap();
    let d = dual_surface(&m).unwrap();
    assert_eq!(d.chart, DualChart::Polar);
    assert_eq!(d.mesh.len(), m.len());
}

#[test]
fn lp_duality_swaps_conjugate_exponents() {
    // polar dual of Σ_p is Σ_q with 1/p + 1/q = 1 (up to conjugation)
    let s = LpSphere::new(3.0).unwrap();
    let z = s.point(0.4, 0.9, -0.6);
    let jet = jet2(&s, &z).unwrap();
    let (w, _) = dual_jet(&z, &jet, DualChart::Polar).unwrap();
    let q: f64 = 1.5;
    let lhs = w.z[0].norm().powf(q) + w.z[1].norm().powf(q);
    assert!((lhs - 1.0).abs() < 1e-12, "{lhs}");
}

#[test]
fn dual_jet_agrees_with_point_cloud_fit() {
    let q = Quadric::planar(1.0, c(0.3, 0.2)).unwrap();
    let lp = LpSphere::new(3.0).unwrap();
    let cases: Vec<(&dyn Hypersurface, AffinePoint)> =
        vec![(&q, q.point(&[c(0.2, 0.1)], 0.1)), (&lp, lp.point(0.35, 0.8, -0.4))];
    for (s, z) in cases {
        let exact = dual_invariants(s, &z).unwrap();
        let fit = point_invariants_from_jet(&dual_jet_fit(s, &z, 1e-2).unwrap()).unwrap();
        assert!((exact.phi - fit.phi).abs() < 1e-5, "{} vs {}", exact.phi, fit.phi);
        assert!((exact.b.unwrap().norm() - fit.b.unwrap().norm()).abs() < 1e-5);
    }
}

#[test]
fn dual_map_is_contact_and_antilinear_on_spheres() {
    let s = UnitSphere::new(2).unwrap();
    let z = s.sample(&[0.3, 0.2, 0.7]).unwrap();
    let r = contact_check(&s, &z, 1e-5).unwrap();
    assert!(r.contact < 1e-6, "{r:?}");
    assert!(r.linear < 1e-6 * r.antilinear, "{r:?}");
}

#[test]
fn roundtrip_and_transport_in_three_dimensions() {
    let s = UnitSphere::new(3).unwrap();
    let z = s.sample(&[0.2, 0.5, 0.1, 0.9, 0.4]).unwrap();
    assert!(roundtrip(&s, &z).unwrap().distance(&z) < 1e-12);
    assert!(transport_check(&s, &z).unwrap().phi < 1e-12);
}

#[test]
fn contact_needs_two_dimensions() {
    let e = Ellipse::new(2.0, 1.0).unwrap();
    let p = e.sample(&[0.1]).unwrap();
    assert!(contact_check(&e, &p, 1e-5).is_err());
}
