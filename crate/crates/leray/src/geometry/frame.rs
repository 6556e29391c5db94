use super::{jet2, AffinePoint, Hypersurface, Jet2, MobiusMap};
use crate::{c, linalg, CMat, CVec, Error, Result, C64};

/// Affine normal frame at a point `p`: in coordinates `z = p + A ζ` the
/// surface reads `v = Σ α_j |ζ_j|² + Re Σ β_j ζ_j² + …` with `ζ_n = u + iv`,
/// where the columns of `A` are unit vectors, the first `n−1` spanning the
/// complex tangent space `H_pS`.
#[derive(Clone, Debug)]
pub struct NormalFrame {
    pub point: AffinePoint,
    /// Möbius map taking `p` to `0` and `S` to normal form.
    pub map: MobiusMap,
    pub alpha: Vec<f64>,
    pub beta: Vec<C64>,
    /// The frame matrix `A` (unit columns).
    pub basis: CMat,
    /// Length of the real gradient, `2|∂r(p)|`.
    pub kappa: f64,
    /// `|β_j| < α_j` for every j.
    pub linearly_convex: bool,
}

/// Frame after the dilations enforcing `α_j² − |β_j|² = 1/4`.
#[derive(Clone, Debug)]
pub struct DilatedFrame {
    pub alpha: Vec<f64>,
    pub beta: Vec<C64>,
    /// Dilation factors `s_j` applied to the tangent columns.
    pub scales: Vec<f64>,
    pub basis: CMat,
    /// Map from normalized coordinates back to the chart, `ζ ↦ p + A ζ`.
    pub from_normal: MobiusMap,
}

impl NormalFrame {
    pub fn dim(&self) -> usize {
        self.point.dim()
    }

    /// `Π (1 − |β_j|²/α_j²)`.
    pub fn phi(&self) -> f64 {
        self.alpha.iter().zip(&self.beta).map(|(a, b)| 1.0 - b.norm_sqr() / (a * a)).product()
    }

    pub fn max_ratio(&self) -> f64 {
        self.alpha.iter().zip(&self.beta).map(|(a, b)| b.norm() / a).fold(0.0, f64::max)
    }

    /// Map `ζ ↦ p + A ζ`.
    pub fn from_normal(&self) -> Result<MobiusMap> {
        MobiusMap::affine(&self.point.z, &self.basis)
    }

    /// Jet of `r(p + Aζ)/κ` at `ζ = 0`.
    pub fn normal_jet(&self, jet: &Jet2) -> Jet2 {
        let n = self.dim();
        let zero = vec![CMat::zeros(n, n); n];
        jet.compose_holomorphic(&self.basis, &zero).scaled(1.0 / self.kappa)
    }

    pub fn dilated(&self) -> Result<DilatedFrame> {
        if !self.linearly_convex {
            return Err(Error::NotLinearlyConvex(format!("max |β/α| = {}", self.max_ratio())));
        }
        let m = self.alpha.len();
        let mut basis = self.basis.clone();
        let mut scales = Vec::with_capacity(m);
        let mut alpha = Vec::with_capacity(m);
        let mut beta = Vec::with_capacity(m);
        for j in 0..m {
            let d = self.alpha[j] * self.alpha[j] - self.beta[j].norm_sqr();
            let s = (0.25 / d).sqrt().sqrt();
            let mut col = basis.column_mut(j);
            col *= c(s, 0.0);
            scales.push(s);
            alpha.push(s * s * self.alpha[j]);
            beta.push(self.beta[j] * (s * s));
        }
        let from_normal = MobiusMap::affine(&self.point.z, &basis)?;
        Ok(DilatedFrame { alpha, beta, scales, basis, from_normal })
    }
}

/// Builds the normal frame from a jet at a surface point.
pub fn normal_frame_from_jet(p: &AffinePoint, jet: &Jet2) -> Result<NormalFrame> {
    let n = p.dim();
    let g = &jet.grad;
    let gn = g.norm();
    if gn < 1e-12 {
        return Err(Error::Degenerate("vanishing gradient".into()));
    }
    let kappa = 2.0 * gn;
    let e = linalg::complement_basis(&g.map(|w| w.conj()));
    let mut cols: Vec<(f64, C64, CVec)> = Vec::with_capacity(n - 1);
    if n > 1 {
        let lh = e.transpose() * &jet.hess_mixed * e.map(|w| w.conj()) / c(kappa, 0.0);
        let qh = e.transpose() * &jet.hess_holo * &e / c(kappa, 0.0);
        let (_, si) = linalg::hermitian_sqrt_pair(&lh)?;
        let k = &si * &qh * si.map(|w| w.conj());
        let (u, sig) = linalg::takagi(&k);
        let w = (&si * &u).map(|z| z.conj());
        let f = &e * &w;
        for (a, s) in sig.iter().enumerate().take(n - 1) {
            let col = f.column(a).into_owned();
            let nu2 = col.norm_squared();
            let unit = &col / c(nu2.sqrt(), 0.0);
            cols.push((1.0 / nu2, c(s / nu2, 0.0), unit));
        }
        cols.sort_by(|x, y| {
            y.1.norm().partial_cmp(&x.1.norm()).unwrap().then(y.0.partial_cmp(&x.0).unwrap())
        });
    }
    let an = g.map(|w| c(0.0, 1.0) * w.conj()) / c(gn, 0.0);
    let mut basis = CMat::zeros(n, n);
    for (a, (_, _, v)) in cols.iter().enumerate() {
        basis.set_column(a, v);
    }
    basis.set_column(n - 1, &an);
    let alpha: Vec<f64> = cols.iter().map(|x| x.0).collect();
    let beta: Vec<C64> = cols.iter().map(|x| x.1).collect();
    let linearly_convex = alpha.iter().zip(&beta).all(|(a, b)| b.norm() < *a);
    let map = MobiusMap::affine(&p.z, &basis)?.inverse();
    Ok(NormalFrame { point: p.clone(), map, alpha, beta, basis, kappa, linearly_convex })
}

/// Normal frame of `surface` at `p`. Fails when the Levi form is not
/// positive definite; `|β_j| ≥ α_j` is only flagged.
pub fn normalize_at(surface: &dyn Hypersurface, p: &AffinePoint) -> Result<NormalFrame> {
    let jet = jet2(surface, p)?;
    let tol = 1e-6 * (1.0 + jet.grad.norm() * (1.0 + p.z.norm()));
    if jet.r.abs() > tol {
        return Err(Error::Chart(format!("point is not on the surface (r = {:e})", jet.r)));
    }
    normal_frame_from_jet(p, &jet)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Hypersurface, Quadric, UnitSphere};

    #[test]
    fn quadric_is_already_normal() {
        let q = Quadric::planar(1.0, c(0.5, 0.0)).unwrap();
        let f = normalize_at(&q, &AffinePoint::origin(2)).unwrap();
        assert!((f.alpha[0] - 1.0).abs() < 1e-12);
        assert!((f.beta[0] - c(0.5, 0.0)).norm() < 1e-12);
        assert!((f.phi() - 0.75).abs() < 1e-12);
        let d = f.dilated().unwrap();
        assert!((d.alpha[0].powi(2) - d.beta[0].norm_sqr() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn normal_jet_has_normal_form() {
        let s = UnitSphere::new(3).unwrap();
        let p = s.sample(&[0.2, 0.7, 0.4, 0.9, 0.1]).unwrap();
        let jet = jet2(&s, &p).unwrap();
        let f = normal_frame_from_jet(&p, &jet).unwrap();
        let nj = f.normal_jet(&jet);
        assert!(nj.grad[0].norm() < 1e-12 && nj.grad[1].norm() < 1e-12);
        assert!((nj.grad[2] - c(0.0, 0.5)).norm() < 1e-12);
        for a in 0..2 {
            assert!((nj.hess_mixed[(a, a)].re - f.alpha[a]).abs() < 1e-12);
            assert!((nj.hess_holo[(a, a)] - f.beta[a]).norm() < 1e-12);
        }
        assert!(nj.hess_mixed[(0, 1)].norm() < 1e-12);
    }


}
