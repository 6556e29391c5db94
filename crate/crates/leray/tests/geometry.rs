use leray::geometry::{
    jet2, numeric_jet, project_to_surface, AffinePoint, CustomGraph, Ellipse, Hypersurface, LpSphere, MobiusMap,
    PowerGraph, Quadric, Tube, UnitSphere,
};
use leray::{CMat, CVec, C64};
use std::f64::consts::PI;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn grid_samples(s: &dyn Hypersurface, per_axis: usize) -> Vec<AffinePoint> {
    let k = s.sample_dim();
    let total = per_axis.pow(k as u32);
    (0..total)
        .map(|mut idx| {
            let u: Vec<f64> = (0..k)
                .map(|_| {
                    let v = (idx % per_axis) as f64;
                    idx /= per_axis;
                    (v + 0.37) / per_axis as f64
                })
                .collect();
            s.sample(&u).unwrap()
        })
        .collect()
}

#[test]
fn samples_lie_on_the_surface() {
    let families: Vec<Box<dyn Hypersurface>> = vec![
        Box::new(UnitSphere::new(2).unwrap()),
        Box::new(LpSphere::new(3.0).unwrap()),
        Box::new(PowerGraph::new(1.5).unwrap()),
        Box::new(Quadric::planar(1.0, c(0.2, 0.3)).unwrap()),
        Box::new(Tube::new(1.0, 0.5).unwrap()),
        Box::new(Ellipse::new(2.0, 0.5).unwrap().placed(c(1.0, -1.0), 0.3)),
    ];
    for s in &families {
        for p in grid_samples(s.as_ref(), 3) {
            assert!(jet2(s.as_ref(), &p).unwrap().r.abs() < 1e-12, "{}", s.label());
        }
    }
}

#[test]
fn analytic_and_numeric_jets_agree() {
    let families: Vec<Box<dyn Hypersurface>> = vec![
        Box::new(UnitSphere::new(2).unwrap()),
        Box::new(UnitSphere::new(3).unwrap()),
        Box::new(LpSphere::new(4.0).unwrap()),
        Box::new(PowerGraph::new(3.0).unwrap()),
        Box::new(Quadric::new(vec![1.0, 2.0], vec![c(0.4, 0.0), c(0.1, 0.9)]).unwrap()),
        Box::new(Tube::new(0.5, 1.0).unwrap()),
        Box::new(Ellipse::new(2.0, 1.0).unwrap().placed(c(0.2, 0.1), 1.1)),
    ];
    for s in &families {
        for p in grid_samples(s.as_ref(), 2) {
            if s.dim() == 2 && p.z[0].norm() < 0.2 {
                continue;
            }
            let a = s.analytic_jet(&p).expect("analytic oracle").unwrap();
            let n = numeric_jet(s.as_ref(), &p).unwrap();
            assert!(a.max_difference(&n) < 1e-6, "{}: {}", s.label(), a.max_difference(&n));
        }
    }
}

#[test]
fn custom_graph_matches_builtin_family() {
    let custom = CustomGraph::new(2, "abs(z1)^3").unwrap();
    let power = PowerGraph::new(3.0).unwrap();
    let p = power.point(c(0.6, -0.3), 0.25);
    let a = jet2(&custom, &p).unwrap();
    let b = jet2(&power, &p).unwrap();
    assert!(a.max_difference(&b) < 1e-6);
}

#[test]
fn custom_graph_rejects_bad_expressions() {
    assert!(CustomGraph::new(2, "abs(z1)^").is_err());
    assert!(CustomGraph::new(2, "z3 + 1").is_err());
    assert!(CustomGraph::new(2, "frobnicate(z1)").is_err());
}

#[test]
fn projection_lands_on_surface() {
    let s = LpSphere::new(3.0).unwrap();
    let z = AffinePoint::new(vec![c(0.7, 0.2), c(-0.1, 0.6)]).unwrap();
    let p = project_to_surface(&s, &z).unwrap();
    assert!(jet2(&s, &p).unwrap().r.abs() < 1e-12);
    assert!(p.distance(&z) < 0.3);
}

#[test]
fn non_finite_points_are_rejected() {
    assert!(AffinePoint::new(vec![c(f64::NAN, 0.0), c(0.0, 0.0)]).is_err());
    let s = UnitSphere::new(2).unwrap();
    assert!(jet2(&s, &AffinePoint::origin(3)).is_err());
}

#[test]
fn mesh_areas_match_closed_forms() {
    let circle = Ellipse::circle(2.0).mesh(64).unwrap();
    assert!((circle.area() - 4.0 * PI).abs() < 1e-12);
    let ellipse = Ellipse::new(3.0, 1.0).unwrap();
    let area = ellipse.mesh(256).unwrap().area();
    assert!((area - ellipse.perimeter_adaptive(1e-13)).abs() < 1e-10);
    // |S³| = 2π²
    let sphere = UnitSphere::new(2).unwrap().mesh(24).unwrap();
    assert!((sphere.area() - 2.0 * PI * PI).abs() < 1e-8, "{}", sphere.area());
}

#[test]
fn mobius_group_laws() {
    let m = CMat::from_row_slice(3, 3, &[
        c(1.0, 0.1), c(0.2, 0.0), c(0.0, -0.1),
        c(0.0, 0.3), c(0.9, 0.0), c(0.1, 0.1),
        c(-0.2, 0.0), c(0.0, 0.05), c(1.1, 0.0),
    ]);
    let psi = MobiusMap::normalized(m).unwrap();
    let z = AffinePoint::new(vec![c(0.3, -0.2), c(0.1, 0.4)]).unwrap();
    let back = psi.inverse().apply(&psi.apply(&z).unwrap()).unwrap();
    assert!(back.distance(&z) < 1e-13);
    let id = psi.compose(&psi.inverse());
    assert!((id.matrix() - CMat::identity(3, 3)).norm() < 1e-12);
    assert!(MobiusMap::new(CMat::identity(3, 3) * c(2.0, 0.0)).is_err());
}

#[test]
fn mobius_jacobian_matches_finite_differences() {
    let psi = MobiusMap::normalized(CMat::from_row_slice(3, 3, &[
        c(1.0, 0.0), c(0.1, 0.2), c(0.0, 0.3),
        c(0.2, 0.0), c(1.0, 0.0), c(0.0, 0.0),
        c(0.0, 0.1), c(0.3, 0.0), c(1.0, -0.2),
    ]))
    .unwrap();
    let z = AffinePoint::new(vec![c(0.2, 0.1), c(-0.3, 0.25)]).unwrap();
    let jac = psi.jacobian(&z).unwrap();
    let h = 1e-6;
    for k in 0..2 {
        let mut zp = z.z.clone();
        zp[k] += c(h, 0.0);
        let mut zm = z.z.clone();
        zm[k] -= c(h, 0.0);
        let fp = psi.apply(&AffinePoint::from_vec(zp).unwrap()).unwrap().z;
        let fm = psi.apply(&AffinePoint::from_vec(zm).unwrap()).unwrap().z;
        let col: CVec = (fp - fm) / c(2.0 * h, 0.0);
        assert!((col - jac.column(k)).norm() < 1e-8);
    }
}

#[test]
fn pushed_jet_describes_image_surface() {
    let s = LpSphere::new(3.0).unwrap();
    let psi = MobiusMap::normalized(CMat::from_row_slice(3, 3, &[
        c(1.0, 0.0), c(0.05, 0.0), c(0.0, 0.02),
        c(0.0, 0.1), c(1.0, 0.0), c(0.0, 0.0),
        c(0.1, 0.0), c(0.0, 0.0), c(1.0, 0.05),
    ]))
    .unwrap();
    let p = s.point(0.4, 0.3, 1.7);
    let (w, jet) = psi.push_jet(&jet2(&s, &p).unwrap(), &p).unwrap();
    assert!(w.distance(&psi.apply(&p).unwrap()) < 1e-14);
    // pushed gradient annihilates pushed tangent vectors
    let jac = psi.jacobian(&p).unwrap();
    let g = jet2(&s, &p).unwrap().grad;
    let e = leray::linalg::complement_basis(&g.map(|x| x.conj()));
    let tangent = &jac * e.column(0);
    assert!(jet.grad.dot(&tangent).norm() < 1e-12);
}
