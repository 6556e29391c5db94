use leray::geometry::{Ellipse, Hypersurface, LpSphere, UnitSphere};
use leray::pairing::{
    gram_sharp, hardy_basis, inner_sharp, infsup, norm_fefferman, pairing_matrix, sup_pairing, Duality, Section,
};
use leray::transforms::{cauchy_matrix, dual_hardy_space, operator_norm, Side};
use leray::{CMat, C64};
use std::sync::Arc;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[test]
fn hardy_basis_is_sharp_orthonormal() {
    let m = Arc::new(LpSphere::new(3.0).unwrap().mesh(12).unwrap());
    let b = hardy_basis(&m, 3).unwrap();
    assert_eq!(b.len(), 10);
    let g = gram_sharp(&b).unwrap();
    assert!((g - CMat::identity(10, 10)).norm() < 1e-10);
}

#[test]
fn circle_pairing_is_bilinear_contour_integral() {
    // ⟨⟨zᵃ, wᵇ⟩⟩ on the unit circle and its reflection: ∮ zᵃ (−z)ᵇ dz / i
    let m = Arc::new(Ellipse::circle(1.0).mesh(64).unwrap());
    let d = Duality::new(m.clone()).unwrap();
    let f = Section::monomial(m.clone(), &[2]).unwrap();
    let g = Section::monomial(d.dual.clone(), &[-3]).unwrap();
    let v = d.pair(&f, &g).unwrap();
    assert!((v.norm() - 2.0 * std::f64::consts::PI).abs() < 1e-10, "{v}");
    let g0 = Section::monomial(d.dual.clone(), &[1]).unwrap();
    assert!(d.pair(&f, &g0).unwrap().norm() < 1e-10);
}

#[test]
fn transfer_represents_the_pairing() {
    let m = Arc::new(LpSphere::new(3.0).unwrap().mesh(10).unwrap());
    let d = Duality::new(m.clone()).unwrap();
    let f = Section::from_fn(m.clone(), |p| p.z[0] * p.z[1] - 0.3).unwrap();
    let g = Section::from_fn(d.dual.clone(), |p| p.z[1].conj() + c(0.0, 1.0)).unwrap();
    let tg = d.transfer(&g).unwrap();
    // ⟨⟨f, g⟩⟩ = ⟨f, conj(𝒯g)⟩ in the Fefferman inner product
    let fw = leray::pairing::fefferman_weights(&m).unwrap();
    let direct: C64 = f.values.iter().zip(tg.values.iter()).zip(&fw).map(|((a, t), w)| a * t * *w).sum();
    assert!((direct - d.pair(&f, &g).unwrap()).norm() < 1e-10);
    assert!(norm_fefferman(&g).unwrap() > 0.0);
}

#[test]
fn literal_transfer_differs_by_cube_roots_of_unity() {
    let m = Arc::new(LpSphere::new(3.0).unwrap().mesh(8).unwrap());
    let d = Duality::new(m.clone()).unwrap();
    let g = Section::from_fn(d.dual.clone(), |p| c(1.0, 0.0) + p.z[0]).unwrap();
    let a = d.transfer(&g).unwrap();
    let b = d.transfer_literal(&g).unwrap();
    for (x, y) in a.values.iter().zip(b.values.iter()) {
        let ratio = y / x;
        assert!((ratio.norm() - 1.0).abs() < 1e-8, "{ratio}");
        assert!((ratio.powi(3) - 1.0).norm() < 1e-8, "{ratio}");
    }
    let lifted = d.transfer_lift(&g, 3).unwrap();
    assert!((lifted.values - a.values).norm() < 1e-12);
}

#[test]
fn infsup_grows_with_the_dual_space() {
    let m = Arc::new(Ellipse::new(1.5, 1.0).unwrap().mesh(128).unwrap());
    let d = Duality::new(m.clone()).unwrap();
    let bs = hardy_basis(&m, 6).unwrap();
    let small = hardy_basis(&d.dual, 6).unwrap();
    let full = dual_hardy_space(&d).unwrap();
    let is_small = infsup(&d, &bs, &small).unwrap();
    let is_full = infsup(&d, &bs, &full).unwrap();
    let norm = operator_norm(&cauchy_matrix(&m, Side::Plus).unwrap()).unwrap();
    assert!(is_small <= is_full + 1e-12, "{is_small} vs {is_full}");
    assert!(is_full < 1.0);
    assert!(is_full >= 1.0 / norm - 1e-9, "{is_full} vs {}", 1.0 / norm);
    for f in &bs {
        let s = sup_pairing(&d, f, &full).unwrap();
        assert!(s >= is_full - 1e-12 && s <= 1.0 + 1e-10);
    }
    let p = pairing_matrix(&d, &bs, &small).unwrap();
    assert_eq!(p.shape(), (bs.len(), small.len()));
    // more test functions than dual functions: the inf-sup vanishes
    assert_eq!(infsup(&d, &bs, &small[..2]).unwrap(), 0.0);
}

#[test]
fn sections_on_different_meshes_do_not_mix() {
    let a = Arc::new(UnitSphere::new(2).unwrap().mesh(8).unwrap());
    let b = Arc::new(UnitSphere::new(2).unwrap().mesh(8).unwrap());
    let f = Section::monomial(a, &[1, 0]).unwrap();
    let g = Section::monomial(b, &[1, 0]).unwrap();
    assert!(inner_sharp(&f, &g).is_err());
    assert!(Section::new(f.mesh.clone(), leray::CVec::zeros(3)).is_err());
}

#[test]
fn sphere_reversed_pairing_round_trips() {
    let m = Arc::new(UnitSphere::new(2).unwrap().mesh(10).unwrap());
    let d = Duality::new(m).unwrap();
    let r = d.reversed().unwrap();
    assert!(Arc::ptr_eq(&r.dual, &d.source));
    assert!(d.double_transfer_residual(&r).unwrap() < 1e-10);
}
