//! Affine charts of ℂℙⁿ, second-order jets of defining functions, Möbius
//! actions, example hypersurface families, quadrature meshes and
//! per-point projective normal frames.

mod expr;
mod frame;
mod jet;
mod mesh;
mod mobius;
mod scalar;
mod surfaces;

pub use expr::Expr;
pub use frame::{normal_frame_from_jet, normalize_at, DilatedFrame, NormalFrame};
pub use jet::{jet2, numeric_jet, Jet2};
pub use mesh::{area_factor, gauss_legendre, realify, tangent_basis, CurveData, MeshLayout, QuadratureMesh, TorusLayout};
pub use mobius::MobiusMap;
pub use scalar::Scalar;
pub use surfaces::{
    ChartWindow, CustomGraph, Ellipse, Hypersurface, LpSphere, MobiusImage, PowerGraph, Quadric, Tube,
    UnitSphere,
};

use crate::{c, CVec, Error, Result, C64};

/// A point of the affine chart `ζ₀ ≠ 0`, with `z_j = ζ_j/ζ₀`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffinePoint {
    pub z: CVec,
}

impl AffinePoint {
    pub fn new(z: Vec<C64>) -> Result<Self> {
        if z.is_empty() {
            return Err(Error::Dimension("empty point".into()));
        }
        if z.iter().any(|w| !w.re.is_finite() || !w.im.is_finite()) {
            return Err(Error::NonFinite("affine coordinate".into()));
        }
        Ok(Self { z: CVec::from_vec(z) })
    }

    pub fn from_vec(z: CVec) -> Result<Self> {
        Self::new(z.iter().cloned().collect())
    }

    pub fn origin(n: usize) -> Self {
        Self { z: CVec::zeros(n) }
    }

    pub fn dim(&self) -> usize {
        self.z.len()
    }

    /// Homogeneous representative `(1, z₁, …, z_n)`.
    pub fn homogenize(&self) -> CVec {
        let n = self.dim();
        CVec::from_fn(n + 1, |i, _| if i == 0 { c(1.0, 0.0) } else { self.z[i - 1] })
    }

    /// Interleaved real coordinates `(x₁, y₁, …, x_n, y_n)`.
    pub fn real_coords(&self) -> Vec<f64> {
        self.z.iter().flat_map(|w| [w.re, w.im]).collect()
    }

    pub fn from_real_coords(x: &[f64]) -> Self {
        let z: Vec<C64> = x.chunks(2).map(|p| c(p[0], p[1])).collect();
        Self { z: CVec::from_vec(z) }
    }

    pub fn distance(&self, other: &AffinePoint) -> f64 {
        (&self.z - &other.z).norm()
    }
}

/// Converts a real tangent vector (interleaved coordinates) to ℂⁿ.
pub fn real_to_complex(v: &[f64]) -> CVec {
    CVec::from_iterator(v.len() / 2, v.chunks(2).map(|p| c(p[0], p[1])))
}

pub fn complex_to_real(v: &CVec) -> Vec<f64> {
    v.iter().flat_map(|w| [w.re, w.im]).collect()
}

/// Newton projection of a nearby point onto `{r = 0}` along the gradient.
pub fn project_to_surface(surface: &dyn Hypersurface, z: &AffinePoint) -> Result<AffinePoint> {
    let mut p = z.clone();
    for _ in 0..50 {
        let jet = jet2(surface, &p)?;
        let g = jet.real_gradient();
        let g2: f64 = g.iter().map(|x| x * x).sum();
        if g2 == 0.0 {
            return Err(Error::Degenerate("vanishing gradient during projection".into()));
        }
        let step = jet.r / g2;
        let x: Vec<f64> = p.real_coords().iter().zip(&g).map(|(x, gi)| x - step * gi).collect();
        p = AffinePoint::from_real_coords(&x);
        if (step * g2.sqrt()).abs() < 1e-15 * (1.0 + p.z.norm()) {
            let jet = jet2(surface, &p)?;
            if jet.r.abs() <= 1e-13 * (1.0 + jet.grad.norm() * (1.0 + p.z.norm())) {
                return Ok(p);
            }
        }
    }
    let r = surface.value(&p)?;
    if r.abs() < 1e-12 {
        Ok(p)
    } else {
        Err(Error::Numerical(format!("projection onto the surface did not converge (r = {r:e})")))
    }
}
