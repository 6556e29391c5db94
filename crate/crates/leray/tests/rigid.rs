use leray::geometry::Expr;
use leray::rigid::{
    closedness_check, observed_order, rigid_reconstruct, rigid_reconstruct_with, rigid_residual, LambdaField,
    RectGrid, ReconstructOptions,
};
use leray::C64;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn sector(cells: usize) -> RectGrid {
    RectGrid::covering(0.5, 1.5, -0.5, 0.5, cells).unwrap()
}

/// λ of `Im z₂ = |z₁|^γ`: `(γ−2)/γ · z̄₁/z₁`.
fn power_lambda(gamma: f64, cells: usize) -> LambdaField {
    LambdaField::from_fn(sector(cells), move |z| z.conj() / z * ((gamma - 2.0) / gamma)).unwrap()
}

#[test]
fn expression_and_closure_fields_agree() {
    let expr = Expr::parse("conj(z1)/(3*z1)").unwrap();
    let a = LambdaField::from_expr(sector(16), &expr).unwrap();
    let b = power_lambda(3.0, 16);
    for (x, y) in a.values.iter().zip(&b.values) {
        assert!((x - y).norm() < 1e-15);
    }
}

#[test]
fn every_power_graph_lambda_is_admissible() {
    for gamma in [1.5, 2.5, 3.0, 4.0] {
        let coarse = rigid_residual(&power_lambda(gamma, 20)).max_abs();
        let fine = rigid_residual(&power_lambda(gamma, 80)).max_abs();
        assert!(fine < coarse);
        assert!(observed_order(coarse, fine, 4) > 1.8, "γ = {gamma}");
    }
}

#[test]
fn generic_lambda_fails_the_residual() {
    // not of rigid type: the residual stays O(1) under refinement
    let field = |cells| LambdaField::from_fn(sector(cells), |z| z.conj() * 0.4).unwrap();
    let coarse = rigid_residual(&field(20)).max_abs();
    let fine = rigid_residual(&field(80)).max_abs();
    assert!(fine > 1e-2 && (fine - coarse).abs() < 0.1 * coarse, "{coarse} {fine}");
    assert!(closedness_check(&field(80)) > 1e-2);
    assert!(rigid_reconstruct(&field(40)).is_err());
}

#[test]
fn reconstruction_recovers_the_power_graph() {
    let lambda = power_lambda(3.0, 80);
    let s = rigid_reconstruct(&lambda).unwrap();
    assert!(s.min_levi() > 0.0);
    // Levi density f_{zz̄} = 9|z|/4 up to the normalization of the potential
    let jets = s.jets();
    let ratio: Vec<f64> = s
        .grid
        .nodes()
        .iter()
        .zip(&jets)
        .map(|(z, j)| j.hess_mixed[(0, 0)].re / (2.25 * z.norm()))
        .collect();
    let (lo, hi) = ratio.iter().fold((f64::INFINITY, 0.0f64), |(l, h), r| (l.min(*r), h.max(*r)));
    assert!((hi - lo) / hi < 1e-2, "{lo} {hi}");
    assert!(s.beltrami_error(&lambda).unwrap().max_abs() < 5e-3);
}

#[test]
fn tolerances_are_configurable() {
    let lambda = power_lambda(3.0, 40);
    let strict = ReconstructOptions { residual_tol: 1e-9, ..ReconstructOptions::default() };
    assert!(rigid_reconstruct_with(&lambda, strict).is_err());
    assert!(rigid_reconstruct_with(&lambda, ReconstructOptions::default()).is_ok());
}

#[test]
fn invalid_fields_are_rejected() {
    assert!(LambdaField::constant(sector(8), c(0.99999999999, 0.0)).is_err());
    assert!(LambdaField::new(sector(8), vec![c(0.1, 0.0); 3]).is_err());
    let mut vals = vec![c(0.1, 0.0); sector(8).len()];
    vals[10] = c(f64::NAN, 0.0);
    assert!(LambdaField::new(sector(8), vals).is_err());
    assert!(RectGrid::covering(0.0, 1.0, 0.0, 1.0, 2).is_err());
    // a pole inside the domain
    assert!(LambdaField::from_fn(RectGrid::covering(-0.5, 0.5, -0.5, 0.5, 8).unwrap(), |z| z.conj() / z / 3.0).is_err());
}

#[test]
fn grid_geometry() {
    // `cells` counts along the shorter side
    let g = RectGrid::covering(0.0, 2.0, -1.0, 0.0, 4).unwrap();
    assert!((g.h - 0.25).abs() < 1e-15);
    assert_eq!(g.len(), 9 * 5);
    assert!((g.node(8, 4) - c(2.0, 0.0)).norm() < 1e-14);
    let r = g.refined(2);
    assert_eq!((r.nx, r.ny), (17, 9));
    let inner = g.inner();
    assert_eq!((inner.nx, inner.ny), (7, 3));
}
