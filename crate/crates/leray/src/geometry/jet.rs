use super::{AffinePoint, Hypersurface};
use crate::{c, CMat, CVec, Error, Result, RMat, C64};

/// Second-order jet of a real defining function at a point:
/// `r(z+h) = r + 2Re(grad·h) + Re(hᵀ R h) + hᵀ B h̄ + O(|h|³)` with
/// `grad_j = ∂r/∂z_j`, `R = (∂²r/∂z_j∂z_k)`, `B = (∂²r/∂z_j∂z̄_k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet2 {
    pub r: f64,
    pub grad: CVec,
    pub hess_holo: CMat,
    pub hess_mixed: CMat,
}

impl Jet2 {
    pub fn dim(&self) -> usize {
        self.grad.len()
    }

    /// Builds the complex jet from the value, gradient and Hessian in
    /// interleaved real coordinates `(x₁, y₁, …)`.
    pub fn from_real(r: f64, grad: &[f64], hess: &RMat) -> Self {
        let n = grad.len() / 2;
        let gc = CVec::from_fn(n, |j, _| c(0.5 * grad[2 * j], -0.5 * grad[2 * j + 1]));
        let h = |a: usize, b: usize| 0.5 * (hess[(a, b)] + hess[(b, a)]);
        let hh = CMat::from_fn(n, n, |j, k| {
            let (xj, yj, xk, yk) = (2 * j, 2 * j + 1, 2 * k, 2 * k + 1);
            c(0.25 * (h(xj, xk) - h(yj, yk)), -0.25 * (h(xj, yk) + h(yj, xk)))
        });
        let hm = CMat::from_fn(n, n, |j, k| {
            let (xj, yj, xk, yk) = (2 * j, 2 * j + 1, 2 * k, 2 * k + 1);
            c(0.25 * (h(xj, xk) + h(yj, yk)), 0.25 * (h(xj, yk) - h(yj, xk)))
        });
        Self { r, grad: gc, hess_holo: hh, hess_mixed: hm }
    }

    /// Real gradient in interleaved coordinates.
    pub fn real_gradient(&self) -> Vec<f64> {
        self.grad.iter().flat_map(|g| [2.0 * g.re, -2.0 * g.im]).collect()
    }

    /// Euclidean length of the real gradient, `2|∂r|`.
    pub fn gradient_norm(&self) -> f64 {
        2.0 * self.grad.norm()
    }

    /// Outward unit normal as a real interleaved vector.
    pub fn unit_normal(&self) -> Vec<f64> {
        let g = self.real_gradient();
        let s = self.gradient_norm();
        g.iter().map(|x| x / s).collect()
    }

    /// Outward unit normal as a complex vector, `conj(grad)/|grad|`.
    pub fn complex_normal(&self) -> CVec {
        self.grad.map(|g| g.conj()) / c(self.grad.norm(), 0.0)
    }

    /// Jet of `r ∘ Φ` at `y`, given the jet of `r` at `Φ(y)`, the
    /// holomorphic Jacobian `J_ja = ∂Φ_j/∂y_a` and the second derivatives
    /// `second[j][(a,b)] = ∂²Φ_j/∂y_a∂y_b`.
    pub fn compose_holomorphic(&self, jac: &CMat, second: &[CMat]) -> Self {
        let grad = jac.transpose() * &self.grad;
        let mut hh = jac.transpose() * &self.hess_holo * jac;
        for (j, h) in second.iter().enumerate() {
            hh += h * self.grad[j];
        }
        let hm = jac.transpose() * &self.hess_mixed * jac.map(|z| z.conj());
        Self { r: self.r, grad, hess_holo: hh, hess_mixed: hm }
    }

    /// Jet of `μ r` for a constant `μ > 0`.
    pub fn scaled(&self, mu: f64) -> Self {
        let m = c(mu, 0.0);
        Self {
            r: self.r * mu,
            grad: &self.grad * m,
            hess_holo: &self.hess_holo * m,
            hess_mixed: &self.hess_mixed * m,
        }
    }

    /// Second-order Taylor model evaluated at `z0 + h`.
    pub fn model(&self, h: &CVec) -> f64 {
        let lin = 2.0 * self.grad.dot(h).re;
        let holo = (h.transpose() * &self.hess_holo * h)[(0, 0)].re;
        let mixed = (h.transpose() * &self.hess_mixed * h.map(|z| z.conj()))[(0, 0)].re;
        self.r + lin + holo + mixed
    }

    /// Symmetry defects `(|R − Rᵀ|, |B − Bᴴ|)`.
    pub fn symmetry_defect(&self) -> (f64, f64) {
        (
            (&self.hess_holo - self.hess_holo.transpose()).norm(),
            (&self.hess_mixed - self.hess_mixed.adjoint()).norm(),
        )
    }

    pub fn is_finite(&self) -> bool {
        let fin = |z: &C64| z.re.is_finite() && z.im.is_finite();
        self.r.is_finite()
            && self.grad.iter().all(fin)
            && self.hess_holo.iter().all(fin)
            && self.hess_mixed.iter().all(fin)
    }

    pub fn max_difference(&self, other: &Jet2) -> f64 {
        [
            (self.r - other.r).abs(),
            (&self.grad - &other.grad).camax(),
            (&self.hess_holo - &other.hess_holo).camax(),
            (&self.hess_mixed - &other.hess_mixed).camax(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Exact jets when the surface has an analytic oracle, numeric otherwise.
pub fn jet2(surface: &dyn Hypersurface, z: &AffinePoint) -> Result<Jet2> {
    if z.dim() != surface.dim() {
        return Err(Error::Dimension(format!("point has {} coordinates, surface {}", z.dim(), surface.dim())));
    }
    surface.in_chart(z)?;
    let jet = match surface.analytic_jet(z) {
        Some(j) => j?,
        None => numeric_jet(surface, z)?,
    };
    if !jet.is_finite() {
        return Err(Error::NonFinite("jet".into()));
    }
    Ok(jet)
}

/// Complex-step first derivatives; second derivatives by central
/// differences of the complex-step gradient with step `1e-5 × local scale`.
pub fn numeric_jet(surface: &dyn Hypersurface, z: &AffinePoint) -> Result<Jet2> {
    surface.in_chart(z)?;
    let x = z.real_coords();
    let m = x.len();
    let scale = 1.0 + x.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let hfd = 1e-5 * scale;
    let hcs = 1e-30 * scale;
    let base: Vec<C64> = x.iter().map(|&v| c(v, 0.0)).collect();
    let r0 = surface.eval_complexified(&base)?;
    // gradient of the function at a real point shifted by `shift`
    let grad_at = |shift: Option<(usize, f64)>| -> Result<Vec<f64>> {
        let mut p = base.clone();
        if let Some((b, d)) = shift {
            p[b].re += d;
        }
        (0..m)
            .map(|a| {
                let mut q = p.clone();
                q[a].im += hcs;
                Ok(surface.eval_complexified(&q)?.im / hcs)
            })
            .collect()
    };
    let g = grad_at(None)?;
    let mut hess = RMat::zeros(m, m);
    for b in 0..m {
        let gp = grad_at(Some((b, hfd)))?;
        let gm = grad_at(Some((b, -hfd)))?;
        for a in 0..m {
            hess[(a, b)] = (gp[a] - gm[a]) / (2.0 * hfd);
        }
    }
    let hs = (&hess + hess.transpose()) * 0.5;
    let jet = Jet2::from_real(r0.re, &g, &hs);
    if !jet.is_finite() {
        return Err(Error::NonFinite("numeric jet".into()));
    }
    Ok(jet)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_conversion_of_quadratic() {
        // r = |z|² − 1 on ℂ: grad_real = (2x, 2y), hess = 2I
        let j = Jet2::from_real(0.0, &[2.0 * 0.6, 2.0 * 0.8], &RMat::identity(2, 2).scale(2.0));
        assert!((j.grad[0] - c(0.6, -0.8)).norm() < 1e-15);
        assert!(j.hess_holo[(0, 0)].norm() < 1e-15);
        assert!((j.hess_mixed[(0, 0)] - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn model_matches_quadratic_exactly() {
        // r = Re(z²) + 2|z|² at 0 expanded at h
        let j = Jet2 {
            r: 0.0,
            grad: CVec::from_vec(vec![c(0.0, 0.0)]),
            hess_holo: CMat::from_element(1, 1, c(1.0, 0.0)),
            hess_mixed: CMat::from_element(1, 1, c(2.0, 0.0)),
        };
        let h = CVec::from_vec(vec![c(0.3, -0.7)]);
        let exact = (h[0] * h[0]).re + 2.0 * h[0].norm_sqr();
        assert!((j.model(&h) - exact).abs() < 1e-15);
    }
}
