use leray::geometry::{AffinePoint, Ellipse, Hypersurface, LpSphere, PowerGraph, UnitSphere};
use leray::pairing::{hardy_basis, Duality, Section};
use leray::transforms::{
    cauchy_matrix, dual_hardy_space, efficiency_identity, leray_integral, leray_matrix, operator_norm,
    projection_defect, Side,
};
use leray::{CVec, C64};
use std::sync::Arc;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn values(mesh: &leray::geometry::QuadratureMesh, f: impl Fn(C64) -> C64) -> CVec {
    CVec::from_iterator(mesh.len(), mesh.nodes.iter().map(|p| f(p.z[0])))
}

#[test]
fn ellipse_cauchy_splits_interior_and_exterior_functions() {
    let mesh = Ellipse::new(2.0, 1.0).unwrap().placed(c(0.5, -0.2), 0.7).mesh(256).unwrap();
    let cp = cauchy_matrix(&mesh, Side::Plus).unwrap();
    let cm = cauchy_matrix(&mesh, Side::Minus).unwrap();
    let inner = values(&mesh, |z| (z * 0.3).exp() + z * z);
    let outer = values(&mesh, |z| 1.0 / (z - c(0.6, 0.1)));
    assert!((cp.apply(&inner).unwrap() - &inner).norm() < 1e-9 * inner.norm());
    assert!(cm.apply(&inner).unwrap().norm() < 1e-9 * inner.norm());
    assert!(cp.apply(&outer).unwrap().norm() < 1e-9 * outer.norm());
    assert!((cm.apply(&outer).unwrap() - &outer).norm() < 1e-9 * outer.norm());
}

#[test]
fn cauchy_norm_is_euclidean_invariant() {
    let base = operator_norm(&cauchy_matrix(&Ellipse::new(2.0, 1.0).unwrap().mesh(128).unwrap(), Side::Plus).unwrap()).unwrap();
    let moved = Ellipse::new(6.0, 3.0).unwrap().placed(c(-3.0, 7.0), 2.1);
    let other = operator_norm(&cauchy_matrix(&moved.mesh(128).unwrap(), Side::Plus).unwrap()).unwrap();
    assert!((base - other).abs() < 1e-10);
}

#[test]
fn cauchy_norm_grows_with_eccentricity() {
    let norms: Vec<f64> = [1.0, 1.5, 2.0, 3.0]
        .iter()
        .map(|&a| operator_norm(&cauchy_matrix(&Ellipse::new(a, 1.0).unwrap().mesh(128).unwrap(), Side::Plus).unwrap()).unwrap())
        .collect();
    assert!((norms[0] - 1.0).abs() < 1e-10);
    assert!(norms.windows(2).all(|w| w[1] > w[0]), "{norms:?}");
}

#[test]
fn cauchy_needs_even_curve_mesh() {
    let m = Ellipse::circle(1.0).mesh(31).unwrap();
    assert!(cauchy_matrix(&m, Side::Plus).is_err());
    let sphere = UnitSphere::new(2).unwrap().mesh(8).unwrap();
    assert!(cauchy_matrix(&sphere, Side::Plus).is_err());
}

#[test]
fn lp_sphere_leray_is_a_projection_with_norm_above_one() {
    let coarse = operator_norm(&leray_matrix(&LpSphere::new(3.0).unwrap().mesh(16).unwrap()).unwrap()).unwrap();
    let mesh = LpSphere::new(3.0).unwrap().mesh(32).unwrap();
    let l = leray_matrix(&mesh).unwrap();
    let fine = operator_norm(&l).unwrap();
    assert!(fine > 1.0 && coarse > 1.0);
    assert!(projection_defect(&l).unwrap() < 1e-8);
    // limit observed under refinement: φ^{-1/4} with φ = 8/9
    let limit = (8.0f64 / 9.0).powf(-0.25);
    assert!((fine - limit).abs() < (coarse - limit).abs());
    assert!((fine - limit).abs() < 1e-3, "{fine}");
}

#[test]
fn leray_integral_reproduces_holomorphic_functions_inside() {
    let mesh = LpSphere::new(3.0).unwrap().mesh(32).unwrap();
    let z = AffinePoint::new(vec![c(0.2, 0.1), c(-0.3, 0.2)]).unwrap();
    let f = CVec::from_iterator(mesh.len(), mesh.nodes.iter().map(|p| p.z[0] * p.z[1] + 2.0));
    let v = leray_integral(&mesh, &f, &z).unwrap();
    let expect = z.z[0] * z.z[1] + 2.0;
    assert!((v - expect).norm() < 1e-6, "{v} vs {expect}");
}

#[test]
fn leray_needs_structured_mesh() {
    let m = PowerGraph::new(3.0).unwrap().mesh(6).unwrap();
    assert!(leray_matrix(&m).is_err());
}

#[test]
fn dual_hardy_space_of_torus_is_monomials() {
    let m = Arc::new(UnitSphere::new(2).unwrap().mesh(8).unwrap());
    let d = Duality::new(m.clone()).unwrap();
    let basis = dual_hardy_space(&d).unwrap();
    assert_eq!(basis.len(), 16);
    let f = Section::monomial(m.clone(), &[1, 1]).unwrap();
    assert!(hardy_basis(&m, 2).unwrap().len() == 6 && f.values.len() == m.len());
}

#[test]
fn efficiency_report_consistency() {
    let r = efficiency_identity(Arc::new(Ellipse::new(1.5, 1.0).unwrap().mesh(128).unwrap()), 8).unwrap();
    assert!((r.inverse_norm * r.norm - 1.0).abs() < 1e-14);
    assert!(r.residual < 1e-3);
    assert!(r.basis_size == 9 && r.dual_basis_size >= r.basis_size);
}
