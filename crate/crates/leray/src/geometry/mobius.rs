use super::{AffinePoint, Jet2};
use crate::{c, linalg, CMat, CVec, Error, Result, C64};

/// A projective automorphism `Ψ_M` of ℂℙⁿ given by `M ∈ SL(n+1, ℂ)`, acting
/// on the affine chart by `Ψ_M(z)_j = (M_{j0} + Σ M_{jk} z_k)/(M_{00} + Σ M_{0k} z_k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MobiusMap {
    m: CMat,
}

const DET_TOL: f64 = 1e-9;

impl MobiusMap {
    /// Wraps a unimodular matrix.
    pub fn new(m: CMat) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() < 2 {
            return Err(Error::Dimension("Möbius matrix must be square of size n+1 ≥ 2".into()));
        }
        let d = linalg::det(&m);
        if (d - c(1.0, 0.0)).norm() > DET_TOL {
            return Err(Error::Degenerate(format!("det M = {d} is not 1")));
        }
        Ok(Self { m })
    }

    /// Rescales an invertible matrix to determinant one (principal root).
    pub fn normalized(m: CMat) -> Result<Self> {
        let k = m.nrows();
        let d = linalg::det(&m);
        if d.norm() < 1e-300 || !d.re.is_finite() {
            return Err(Error::Degenerate("singular Möbius matrix".into()));
        }
        let s = d.powf(-1.0 / k as f64);
        Self::new(m * s)
    }

    pub fn identity(n: usize) -> Self {
        Self { m: CMat::identity(n + 1, n + 1) }
    }

    /// The affine map `z ↦ p + A z`.
    pub fn affine(p: &CVec, a: &CMat) -> Result<Self> {
        let n = p.len();
        let mut m = CMat::zeros(n + 1, n + 1);
        m[(0, 0)] = c(1.0, 0.0);
        for j in 0..n {
            m[(j + 1, 0)] = p[j];
            for k in 0..n {
                m[(j + 1, k + 1)] = a[(j, k)];
            }
        }
        Self::normalized(m)
    }

    pub fn translation(a: &CVec) -> Self {
        let n = a.len();
        let mut m = CMat::identity(n + 1, n + 1);
        for j in 0..n {
            m[(j + 1, 0)] = a[j];
        }
        Self { m }
    }

    pub fn matrix(&self) -> &CMat {
        &self.m
    }

    /// Affine dimension `n`.
    pub fn dim(&self) -> usize {
        self.m.nrows() - 1
    }

    /// `M₀₀ + Σ M₀ₖ zₖ`.
    pub fn denominator(&self, z: &AffinePoint) -> C64 {
        let mut d = self.m[(0, 0)];
        for k in 0..self.dim() {
            d += self.m[(0, k + 1)] * z.z[k];
        }
        d
    }

    fn check(&self, z: &AffinePoint) -> Result<C64> {
        if z.dim() != self.dim() {
            return Err(Error::Dimension(format!("point dim {} vs map dim {}", z.dim(), self.dim())));
        }
        let d = self.denominator(z);
        let scale = 1.0 + z.z.norm();
        if d.norm() <= 1e-13 * scale * self.m.norm() {
            return Err(Error::AtInfinity);
        }
        Ok(d)
    }

    pub fn apply(&self, z: &AffinePoint) -> Result<AffinePoint> {
        let d = self.check(z)?;
        let h = &self.m * z.homogenize();
        AffinePoint::new((1..=self.dim()).map(|j| h[j] / d).collect())
    }

    /// Holomorphic Jacobian `∂Ψ_j/∂z_a` at `z`.
    pub fn jacobian(&self, z: &AffinePoint) -> Result<CMat> {
        let d = self.check(z)?;
        let w = self.apply(z)?;
        let n = self.dim();
        Ok(CMat::from_fn(n, n, |j, a| (self.m[(j + 1, a + 1)] - w.z[j] * self.m[(0, a + 1)]) / d))
    }

    /// Second derivatives `∂²Ψ_j/∂z_a∂z_b`, one matrix per component.
    pub fn second_derivatives(&self, z: &AffinePoint) -> Result<Vec<CMat>> {
        let d = self.check(z)?;
        let jac = self.jacobian(z)?;
        let n = self.dim();
        Ok((0..n)
            .map(|j| {
                CMat::from_fn(n, n, |a, b| {
                    -(jac[(j, b)] * self.m[(0, a + 1)] + jac[(j, a)] * self.m[(0, b + 1)]) / d
                })
            })
            .collect())
    }

    /// `Ψ_{self} ∘ Ψ_{other}`.
    pub fn compose(&self, other: &MobiusMap) -> MobiusMap {
        Self { m: &self.m * &other.m }
    }

    pub fn inverse(&self) -> MobiusMap {
        let inv = self.m.clone().try_inverse().expect("unimodular matrices are invertible");
        Self { m: inv }
    }

    /// The induced map on the dual projective space, `M⁻ᵀ`.
    pub fn dual(&self) -> MobiusMap {
        Self { m: self.inverse().m.transpose() }
    }

    /// Multiplies the matrix by a scalar with `ωⁿ⁺¹ = 1` (same projective map).
    pub fn times_root_of_unity(&self, k: usize) -> MobiusMap {
        let n1 = self.m.nrows() as f64;
        let w = C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / n1);
        Self { m: &self.m * w }
    }

    /// Pull back samples of a section of `𝒪(j,k)`: given `f(Ψ_M(zᵢ))`,
    /// returns `(M*f)(zᵢ) = dᵢʲ d̄ᵢᵏ f(Ψ_M(zᵢ))` with `dᵢ` the denominator at `zᵢ`.
    pub fn pullback_section(&self, points: &[AffinePoint], values: &[C64], j: i32, k: i32) -> Result<Vec<C64>> {
        if points.len() != values.len() {
            return Err(Error::Dimension("points and samples differ in length".into()));
        }
        points
            .iter()
            .zip(values)
            .map(|(z, f)| {
                let d = self.check(z)?;
                Ok(d.powi(j) * d.conj().powi(k) * f)
            })
            .collect()
    }

    /// Jet at `Ψ(z)` of `r ∘ Ψ⁻¹`, given the jet of `r` at `z`.
    pub fn push_jet(&self, jet: &Jet2, z: &AffinePoint) -> Result<(AffinePoint, Jet2)> {
        let w = self.apply(z)?;
        let inv = self.inverse();
        let jac = inv.jacobian(&w)?;
        let sec = inv.second_derivatives(&w)?;
        Ok((w, jet.compose_holomorphic(&jac, &sec)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(v: &[(f64, f64)]) -> AffinePoint {
        AffinePoint::new(v.iter().map(|&(a, b)| c(a, b)).collect()).unwrap()
    }

    #[test]
    fn rejects_non_unimodular() {
        assert!(MobiusMap::new(CMat::identity(3, 3) * c(2.0, 0.0)).is_err());
        assert!(MobiusMap::normalized(CMat::identity(3, 3) * c(2.0, 0.0)).is_ok());
    }

    #[test]
    fn jacobian_matches_difference_quotient() {
        let m = MobiusMap::normalized(CMat::from_row_slice(3, 3, &[
            c(1.0, 0.1), c(0.2, 0.0), c(0.0, -0.1),
            c(0.1, 0.0), c(1.0, 0.0), c(0.3, 0.2),
            c(0.0, 0.2), c(-0.1, 0.0), c(0.9, 0.0),
        ]))
        .unwrap();
        let z = pt(&[(0.3, -0.2), (0.1, 0.4)]);
        let jac = m.jacobian(&z).unwrap();
        let sec = m.second_derivatives(&z).unwrap();
        let h = 1e-6;
        for a in 0..2 {
            let mut zp = z.clone();
            zp.z[a] += c(h, 0.0);
            let mut zm = z.clone();
            zm.z[a] -= c(h, 0.0);
            let d = (m.apply(&zp).unwrap().z - m.apply(&zm).unwrap().z) / c(2.0 * h, 0.0);
            for j in 0..2 {
                assert!((d[j] - jac[(j, a)]).norm() < 1e-8);
            }
            let dj = (m.jacobian(&zp).unwrap() - m.jacobian(&zm).unwrap()) / c(2.0 * h, 0.0);
            for j in 0..2 {
                for b in 0..2 {
                    assert!((dj[(j, b)] - sec[j][(b, a)]).norm() < 1e-7);
                }
            }
        }
    }

    #[test]
    fn infinity_is_reported() {
        let mut m = CMat::identity(2, 2);
        m[(0, 1)] = c(1.0, 0.0);
        let map = MobiusMap::new(m).unwrap();
        assert!(matches!(map.apply(&pt(&[(-1.0, 0.0)])), Err(Error::AtInfinity)));
    }
}
