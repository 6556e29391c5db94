//! Pointwise Möbius invariants of a hypersurface: Levi and holomorphic
//! second fundamental forms on `H_zS`, the Beltrami coefficient `b` (n = 2),
//! the scalar `φ`, Fefferman and ♯ densities, and convexity classification.

use crate::geometry::{jet2, normal_frame_from_jet, AffinePoint, Hypersurface, Jet2, UnitSphere};
use crate::{c, linalg, CMat, Error, Result, C64};

/// Invariant data at one point.
#[derive(Clone, Debug)]
pub struct PointInvariants {
    /// `𝓛` in an orthonormal basis of `H_zS`, normalized by `|∇r|`.
    pub levi: CMat,
    /// `𝒬` in the same basis.
    pub q_form: CMat,
    /// Beltrami coefficient in the chart trivialization (n = 2 only).
    pub b: Option<C64>,
    pub alpha: Vec<f64>,
    pub beta: Vec<C64>,
    pub phi: f64,
    /// Fefferman density against euclidean `dS`.
    pub fefferman_w: f64,
    /// ♯ density against `dS`; absent unless `φ > 0`.
    pub sharp_w: Option<f64>,
    pub pseudoconvex: bool,
    pub strongly_convexlike: bool,
}

/// Result of [`classify`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Convexity {
    pub strongly_convexlike: bool,
    pub pseudoconvex: bool,
}

/// Exponent `−n/(2(n+1))` relating the ♯ and Fefferman densities.
pub fn sharp_exponent(n: usize) -> f64 {
    -(n as f64) / (2.0 * (n as f64 + 1.0))
}

fn tangent_forms(jet: &Jet2) -> Result<(CMat, CMat)> {
    let gn = jet.grad.norm();
    if gn < 1e-12 {
        return Err(Error::Degenerate("|∂r| ≈ 0: tangent space undefined".into()));
    }
    let kappa = c(2.0 * gn, 0.0);
    let e = linalg::complement_basis(&jet.grad.map(|w| w.conj()));
    let levi = e.transpose() * &jet.hess_mixed * e.map(|w| w.conj()) / kappa;
    let q = e.transpose() * &jet.hess_holo * &e / kappa;
    Ok(((&levi + levi.adjoint()) * c(0.5, 0.0), (&q + q.transpose()) * c(0.5, 0.0)))
}

/// Levi form and holomorphic form on `H_zS` in an orthonormal basis.
pub fn levi_q(surface: &dyn Hypersurface, z: &AffinePoint) -> Result<(CMat, CMat)> {
    tangent_forms(&jet2(surface, z)?)
}

/// Beltrami coefficient as a quotient of bordered determinants.
pub fn beltrami_b_from_jet(jet: &Jet2) -> Result<C64> {
    if jet.dim() != 2 {
        return Err(Error::Dimension("the Beltrami coefficient is defined for n = 2".into()));
    }
    let g = &jet.grad;
    let (r, b) = (&jet.hess_holo, &jet.hess_mixed);
    let zero = c(0.0, 0.0);
    let num = CMat::from_row_slice(3, 3, &[
        zero, g[0], g[1],
        g[0], r[(0, 0)], r[(1, 0)],
        g[1], r[(0, 1)], r[(1, 1)],
    ]);
    let den = CMat::from_row_slice(3, 3, &[
        zero, g[0], g[1],
        g[0].conj(), b[(0, 0)], b[(1, 0)],
        g[1].conj(), b[(0, 1)], b[(1, 1)],
    ]);
    let d = linalg::det(&den);
    let scale = g.norm_squared() * b.norm().max(1e-300);
    if d.norm() <= 1e-13 * scale {
        return Err(Error::NotPseudoconvex("Levi-degenerate point".into()));
    }
    Ok(-linalg::det(&num) / d)
}

pub fn beltrami_b(surface: &dyn Hypersurface, z: &AffinePoint) -> Result<C64> {
    beltrami_b_from_jet(&jet2(surface, z)?)
}

/// `φ = Π (1 − |β_j|²/α_j²)` from the normal frame.
pub fn phi(surface: &dyn Hypersurface, z: &AffinePoint) -> Result<f64> {
    let jet = jet2(surface, z)?;
    Ok(normal_frame_from_jet(z, &jet)?.phi())
}

/// Uncalibrated determinant quotient for `φ`.
fn phi_det_raw(jet: &Jet2) -> Result<f64> {
    let n = jet.dim();
    let g = &jet.grad;
    let (r, b) = (&jet.hess_holo, &jet.hess_mixed);
    let mut d1 = CMat::zeros(n + 1, n + 1);
    for k in 0..n {
        d1[(0, k + 1)] = g[k].conj();
        d1[(k + 1, 0)] = g[k];
        for j in 0..n {
            d1[(j + 1, k + 1)] = b[(j, k)];
        }
    }
    let m = 2 * (n + 1);
    let mut d2 = CMat::zeros(m, m);
    for k in 0..n {
        d2[(0, 2 + k)] = g[k];
        d2[(1, 2 + n + k)] = g[k].conj();
    }
    for j in 0..n {
        d2[(2 + j, 0)] = g[j];
        d2[(2 + n + j, 1)] = g[j].conj();
        for k in 0..n {
            d2[(2 + j, 2 + k)] = r[(j, k)];
            d2[(2 + j, 2 + n + k)] = b[(j, k)];
            d2[(2 + n + j, 2 + k)] = b[(k, j)];
            d2[(2 + n + j, 2 + n + k)] = r[(j, k)].conj();
        }
    }
    let a = linalg::det(&d1);
    if a.norm() <= 1e-13 * g.norm_squared() * b.norm().powi(n as i32 - 1).max(1e-300) {
        return Err(Error::NotPseudoconvex("singular bordered Levi determinant".into()));
    }
    Ok((linalg::det(&d2) / (a * a)).norm())
}

/// `φ` via the affine bordered-determinant formula, calibrated so that
/// the unit sphere gives 1.
pub fn phi_det_from_jet(jet: &Jet2) -> Result<f64> {
    let n = jet.dim();
    let sphere = UnitSphere::new(n)?;
    let mut e = vec![c(0.0, 0.0); n];
    e[n - 1] = c(1.0, 0.0);
    let anchor = phi_det_raw(&jet2(&sphere, &AffinePoint::new(e)?)?)?;
    Ok(phi_det_raw(jet)? / anchor)
}

pub fn phi_det(surface: &dyn Hypersurface, z: &AffinePoint) -> Result<f64> {
    phi_det_from_jet(&jet2(surface, z)?)
}

/// Fefferman density `|det[[0, ∂̄r],[∂r, ∂∂̄r]]|^{1/(n+1)} / |∂r|` against `dS`.
pub fn fefferman_from_jet(jet: &Jet2) -> Result<f64> {
    let n = jet.dim();
    let g = &jet.grad;
    let mut d = CMat::zeros(n + 1, n + 1);
    for k in 0..n {
        d[(0, k + 1)] = g[k].conj();
        d[(k + 1, 0)] = g[k];
        for j in 0..n {
            d[(j + 1, k + 1)] = jet.hess_mixed[(j, k)];
        }
    }
    let det = linalg::det(&d).norm();
    let gn = g.norm();
    if gn < 1e-14 || det <= 1e-14 * gn * gn * jet.hess_mixed.norm().powi(n as i32 - 1) {
        return Err(Error::NotPseudoconvex("Levi-degenerate point".into()));
    }
    Ok(det.powf(1.0 / (n as f64 + 1.0)) / gn)
}

pub fn fefferman_weight(surface: &dyn Hypersurface, z: &AffinePoint) -> Result<f64> {
    fefferman_from_jet(&jet2(surface, z)?)
}

fn convexity(levi: &CMat, alpha: &[f64], beta: &[C64], levi_pd: bool) -> Convexity {
    let ev = linalg::hermitian_eigenvalues(levi);
    let scale = levi.norm().max(1e-300);
    let pseudoconvex = ev.first().is_none_or(|&l| l >= -1e-12 * scale);
    let strongly = levi_pd && alpha.iter().zip(beta).all(|(a, b)| b.norm() < *a);
    Convexity { strongly_convexlike: strongly, pseudoconvex }
}

pub fn classify(surface: &dyn Hypersurface, z: &AffinePoint) -> Result<Convexity> {
    let jet = jet2(surface, z)?;
    let (levi, _) = tangent_forms(&jet)?;
    match normal_frame_from_jet(z, &jet) {
        Ok(f) => Ok(convexity(&levi, &f.alpha, &f.beta, true)),
        Err(Error::NotPseudoconvex(_)) => Ok(convexity(&levi, &[], &[], false)),
        Err(e) => Err(e),
    }
}

/// All invariants from a jet (the point itself is irrelevant).
pub fn point_invariants_from_jet(jet: &Jet2) -> Result<PointInvariants> {
    let n = jet.dim();
    let (levi, q_form) = tangent_forms(jet)?;
    let frame = normal_frame_from_jet(&AffinePoint::origin(n), jet)?;
    let phi = frame.phi();
    let b = if n == 2 { Some(beltrami_b_from_jet(jet)?) } else { None };
    let fefferman_w = fefferman_from_jet(jet)?;
    let sharp_w = (phi > 0.0).then(|| phi.powf(sharp_exponent(n)) * fefferman_w);
    let cv = convexity(&levi, &frame.alpha, &frame.beta, true);
    Ok(PointInvariants {
        levi,
        q_form,
        b,
        alpha: frame.alpha,
        beta: frame.beta,
        phi,
        fefferman_w,
        sharp_w,
        pseudoconvex: cv.pseudoconvex,
        strongly_convexlike: cv.strongly_convexlike,
    })
}

pub fn point_invariants(surface: &dyn Hypersurface, z: &AffinePoint) -> Result<PointInvariants> {
    point_invariants_from_jet(&jet2(surface, z)?)
}
