//! Discretized Cauchy (n = 1) and Leray (n ≥ 2) transforms, ♯ operator
//! norms, the projection and adjointness identities, and the
//! norm–efficiency identity.
//!
//! The Cauchy transform is a Nyström matrix on a uniformly parametrized
//! closed curve. In the `√dz` trivialization the kernel
//! `√z'(s)√z'(t)/(z(t)−z(s))` splits into `½ csc((t−s)/2)`, whose principal
//! value acts on antiperiodic trigonometric data as the sign multiplier,
//! plus a smooth periodic remainder integrated by the trapezoid rule.
//!
//! The Leray transform on a Reinhardt torus mesh in ℂ² is assembled from
//! the expansion `(∂r·(w−z))⁻² = (∂r·w)⁻² Σ_k (k+1) (∂r·z/∂r·w)^k`: each
//! monomial `z^m` contributes a rank-one term, and distinct monomials are
//! orthogonal on the mesh, so the operator is applied with 2-D FFTs per
//! radial ring and its ♯ norm is a maximum over modes.

use crate::duality::DualChart;
use crate::geometry::{AffinePoint, MeshLayout, QuadratureMesh, TorusLayout};
use crate::pairing::{hardy_basis, infsup, range_basis, sharp_weights, Duality, Section};
use crate::{c, linalg, CMat, CVec, Error, Result, C64};
use rustfft::FftPlanner;
use std::f64::consts::PI;
use std::sync::Arc;

/// Which of the complementary Cauchy projections.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// Projection onto boundary values from the Hardy side of the mesh.
    Plus,
    Minus,
}

/// Operator on section values together with the ♯ quadrature weights of
/// its (common) domain and codomain.
#[derive(Clone, Debug)]
pub struct DiscreteOperator {
    pub kind: OperatorKind,
    pub weights: Vec<f64>,
}

#[derive(Clone, Debug)]
pub enum OperatorKind {
    Dense(CMat),
    Modal(ModalLeray),
}

/// Rank-one mode decomposition `L = Σ_m u_m v_mᵀ` on a torus mesh, with
/// `u_m(a,b) = B_m(a) e^{i σ·m 2πb/M}` and `v_m(a,b) = A_m(a) e^{−i σ·m 2πb/M}`.
#[derive(Clone, Debug)]
pub struct ModalLeray {
    pub layout: TorusLayout,
    /// Modes per angular direction: `0 ≤ m_j < modes`.
    pub modes: usize,
    a: Vec<Vec<C64>>,
    b: Vec<Vec<C64>>,
}

impl DiscreteOperator {
    pub fn identity(weights: Vec<f64>) -> Self {
        let n = weights.len();
        Self { kind: OperatorKind::Dense(CMat::identity(n, n)), weights }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn apply(&self, f: &CVec) -> Result<CVec> {
        if f.len() != self.len() {
            return Err(Error::Mesh(format!("operator of size {} applied to {} values", self.len(), f.len())));
        }
        Ok(match &self.kind {
            OperatorKind::Dense(m) => m * f,
            OperatorKind::Modal(l) => l.apply(f),
        })
    }

    pub fn apply_section(&self, f: &Section) -> Result<Section> {
        f.with_values(self.apply(&f.values)?)
    }

    /// Dense matrix (materialized column by column for modal operators).
    pub fn dense(&self) -> Result<CMat> {
        match &self.kind {
            OperatorKind::Dense(m) => Ok(m.clone()),
            OperatorKind::Modal(l) => {
                let n = self.len();
                if n > 8192 {
                    return Err(Error::Numerical(format!("refusing to materialize a {n}×{n} operator")));
                }
                Ok(l.dense())
            }
        }
    }
}

fn weighted(m: &CMat, w: &[f64]) -> Result<CMat> {
    if w.iter().any(|x| !(*x > 0.0)) {
        return Err(Error::Mesh("non-positive operator weight".into()));
    }
    let sq: Vec<f64> = w.iter().map(|x| x.sqrt()).collect();
    Ok(CMat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] * (sq[i] / sq[j])))
}

/// Largest singular value of `W^{1/2} A W^{−1/2}`.
pub fn operator_norm(op: &DiscreteOperator) -> Result<f64> {
    match &op.kind {
        OperatorKind::Dense(m) => Ok(linalg::spectral_norm(&weighted(m, &op.weights)?)),
        OperatorKind::Modal(l) => Ok(l.mode_norms(&op.weights).into_iter().fold(0.0, f64::max)),
    }
}

/// ♯ norm of `A² − A`.
pub fn projection_defect(op: &DiscreteOperator) -> Result<f64> {
    match &op.kind {
        OperatorKind::Dense(m) => Ok(linalg::spectral_norm(&weighted(&(m * m - m), &op.weights)?)),
        OperatorKind::Modal(l) => {
            let norms = l.mode_norms(&op.weights);
            let diag = l.mode_diagonals();
            Ok(norms.iter().zip(diag).map(|(n, d)| n * (d - 1.0).norm()).fold(0.0, f64::max))
        }
    }
}

/// Continuous branch of `√z'` along the parameter.
fn sqrt_branch(d: &[C64]) -> Vec<C64> {
    let mut out: Vec<C64> = Vec::with_capacity(d.len());
    for (k, x) in d.iter().enumerate() {
        let mut s = x.sqrt();
        if k > 0 && (s - out[k - 1]).norm() > (s + out[k - 1]).norm() {
            s = -s;
        }
        out.push(s);
    }
    out
}

/// Nyström matrix of `𝐂_±` on a closed curve mesh with an even number of
/// uniformly spaced parameter nodes, acting on affine values `f` of `f√dz`.
pub fn cauchy_matrix(mesh: &QuadratureMesh, side: Side) -> Result<DiscreteOperator> {
    let cd = mesh
        .curve_data()
        .ok_or_else(|| Error::Mesh("the Cauchy transform needs a curve mesh".into()))?;
    let n = mesh.len();
    if !n.is_multiple_of(2) {
        return Err(Error::Mesh("the Cauchy scheme needs an even node count".into()));
    }
    let z: Vec<C64> = mesh.nodes.iter().map(|p| p.z[0]).collect();
    let sd = sqrt_branch(&cd.derivative);
    if (sd[n - 1] + sd[0]).norm() > (sd[n - 1] - sd[0]).norm() {
        // √z' must be antiperiodic for a simple closed curve
        return Err(Error::Mesh("curve parametrization does not wind once".into()));
    }
    let h = cd.step;
    let mut ct = CMat::zeros(n, n);
    let kfac = c(0.0, -h / (2.0 * PI));
    for j in 0..n {
        for l in 0..n {
            if j == l {
                ct[(j, l)] = c(0.5, 0.0);
                continue;
            }
            let dz = z[l] - z[j];
            if dz.norm() < 1e-14 * (1.0 + z[j].norm()) {
                return Err(Error::Mesh(format!("coincident nodes {j} and {l}")));
            }
            let ds = (l as f64 - j as f64) * h;
            let smooth = sd[j] * sd[l] / dz - c(0.5 / (0.5 * ds).sin(), 0.0);
            let mut v = kfac * smooth;
            let d = j as i64 - l as i64;
            if d.rem_euclid(2) == 1 {
                v += c(0.0, 1.0 / (n as f64 * (PI * d as f64 / n as f64).sin()));
            }
            ct[(j, l)] = v;
        }
    }
    let inner = CMat::from_fn(n, n, |j, l| ct[(j, l)] * sd[l] / sd[j]);
    let id = CMat::identity(n, n);
    let plus = if cd.hardy_left { inner } else { &id - inner };
    let m = match side {
        Side::Plus => plus,
        Side::Minus => id - plus,
    };
    Ok(DiscreteOperator { kind: OperatorKind::Dense(m), weights: sharp_weights(mesh)? })
}

/// Leray density against `dS` for the kernel at `z`:
/// `(n−1)!/(2πⁿ) |∂r| det(EᵀBĒ) (∂r(w)·(w−z))^{−n}`.
fn leray_density(mesh: &QuadratureMesh) -> Result<Vec<f64>> {
    let n = mesh.dim();
    let fact: f64 = (1..n).map(|k| k as f64).product();
    let pref = fact / (2.0 * PI.powi(n as i32));
    let inv = mesh.invariants()?;
    Ok(mesh
        .jets
        .iter()
        .zip(inv)
        .map(|(jet, i)| {
            let g = jet.grad.norm();
            pref * g * linalg::det(&i.levi).re * (2.0 * g).powi(n as i32 - 1)
        })
        .collect())
}

/// The Leray transform as an operator on the mesh: the Cauchy projection
/// `𝐂₊` for curves, the modal operator for Reinhardt torus meshes.
pub fn leray_matrix(mesh: &QuadratureMesh) -> Result<DiscreteOperator> {
    match &mesh.layout {
        MeshLayout::Curve(_) => cauchy_matrix(mesh, Side::Plus),
        MeshLayout::Torus(t) => {
            let modal = ModalLeray::new(mesh, t)?;
            Ok(DiscreteOperator { kind: OperatorKind::Modal(modal), weights: sharp_weights(mesh)? })
        }
        MeshLayout::Scattered => Err(Error::Mesh(
            "the Leray operator needs a curve mesh or a Reinhardt torus mesh".into(),
        )),
    }
}

impl ModalLeray {
    fn new(mesh: &QuadratureMesh, t: &TorusLayout) -> Result<Self> {
        let m = t.angular;
        if mesh.dim() != 2 || mesh.len() != t.radial * m * m {
            return Err(Error::Mesh("torus layout does not match the mesh".into()));
        }
        let dens = leray_density(mesh)?;
        let modes = m / 2;
        let mut a_all = Vec::with_capacity(t.radial);
        let mut b_all = Vec::with_capacity(t.radial);
        for a in 0..t.radial {
            let i0 = t.index(a, 0, 0);
            let w = &mesh.nodes[i0].z;
            let g = &mesh.jets[i0].grad;
            let gw = g.dot(w);
            let q = [g[0] / (w[0].conj() * gw), g[1] / (w[1].conj() * gw)];
            let ring = dens[i0] * mesh.weights[i0];
            // rotational symmetry of the ring
            for b1 in 0..m {
                for b2 in 0..m {
                    let i = t.index(a, b1, b2);
                    let gi = &mesh.jets[i].grad;
                    let wi = &mesh.nodes[i].z;
                    let gwi = gi.dot(wi);
                    let qi = [gi[0] / (wi[0].conj() * gwi), gi[1] / (wi[1].conj() * gwi)];
                    let dq = (qi[0] - q[0]).norm() + (qi[1] - q[1]).norm() + (gwi - gw).norm() / gw.norm();
                    let dr = (dens[i] * mesh.weights[i] - ring).abs() / ring;
                    if dq > 1e-8 * (1.0 + q[0].norm() + q[1].norm()) || dr > 1e-8 {
                        return Err(Error::Mesh("torus mesh is not rotationally symmetric".into()));
                    }
                }
            }
            let e = [C64::from_polar(1.0, t.theta[0]), C64::from_polar(1.0, t.theta[1])];
            let rho = t.rho[a];
            let base = ring / (gw * gw);
            let mut av = vec![c(0.0, 0.0); modes * modes];
            let mut bv = vec![c(0.0, 0.0); modes * modes];
            for m1 in 0..modes {
                for m2 in 0..modes {
                    let k = m1 + m2;
                    let comb = (k + 1) as f64 * binomial(k, m1);
                    let x1 = q[0] * rho[0] * e[0].conj();
                    let x2 = q[1] * rho[1] * e[1].conj();
                    av[m1 * modes + m2] = base * comb * x1.powi(m1 as i32) * x2.powi(m2 as i32);
                    bv[m1 * modes + m2] =
                        (e[0] * rho[0]).powi(m1 as i32) * (e[1] * rho[1]).powi(m2 as i32);
                }
            }
            a_all.push(av);
            b_all.push(bv);
        }
        Ok(Self { layout: t.clone(), modes, a: a_all, b: b_all })
    }

    fn freq(&self, j: usize, m: usize) -> usize {
        let mm = self.layout.angular as i64;
        ((self.layout.sigma[j].signum() as i64 * m as i64).rem_euclid(mm)) as usize
    }

    fn apply(&self, f: &CVec) -> CVec {
        let m = self.layout.angular;
        let mut planner = FftPlanner::<f64>::new();
        let fwd = planner.plan_fft_forward(m);
        let inv = planner.plan_fft_inverse(m);
        let h = self.modes;
        let mut coef = vec![c(0.0, 0.0); h * h];
        let mut rings = Vec::with_capacity(self.layout.radial);
        for a in 0..self.layout.radial {
            let start = self.layout.index(a, 0, 0);
            let mut buf: Vec<C64> = f.as_slice()[start..start + m * m].to_vec();
            fft2(&mut buf, m, &*fwd);
            rings.push(buf);
        }
        for (a, buf) in rings.iter().enumerate() {
            for m1 in 0..h {
                for m2 in 0..h {
                    let k = self.freq(0, m1) * m + self.freq(1, m2);
                    coef[m1 * h + m2] += self.a[a][m1 * h + m2] * buf[k];
                }
            }
        }
        let mut out = CVec::zeros(f.len());
        for a in 0..self.layout.radial {
            let mut buf = vec![c(0.0, 0.0); m * m];
            for m1 in 0..h {
                for m2 in 0..h {
                    let k = self.freq(0, m1) * m + self.freq(1, m2);
                    buf[k] = self.b[a][m1 * h + m2] * coef[m1 * h + m2];
                }
            }
            fft2(&mut buf, m, &*inv);
            let start = self.layout.index(a, 0, 0);
            for (k, v) in buf.into_iter().enumerate() {
                out[start + k] = v;
            }
        }
        out
    }

    fn dense(&self) -> CMat {
        let n = self.layout.radial * self.layout.angular * self.layout.angular;
        let mut out = CMat::zeros(n, n);
        let mut e = CVec::zeros(n);
        for l in 0..n {
            e[l] = c(1.0, 0.0);
            out.set_column(l, &self.apply(&e));
            e[l] = c(0.0, 0.0);
        }
        out
    }

    /// `‖u_m‖_W ‖v_m‖_{W⁻¹}` per mode.
    fn mode_norms(&self, w: &[f64]) -> Vec<f64> {
        let m2 = (self.layout.angular * self.layout.angular) as f64;
        let h = self.modes;
        (0..h * h)
            .map(|k| {
                let (mut nu, mut nv) = (0.0, 0.0);
                for a in 0..self.layout.radial {
                    let wa = w[self.layout.index(a, 0, 0)];
                    nu += m2 * wa * self.b[a][k].norm_sqr();
                    nv += m2 * self.a[a][k].norm_sqr() / wa;
                }
                (nu * nv).sqrt()
            })
            .collect()
    }

    /// `v_m · u_m` per mode (exactly 1 for a projection).
    fn mode_diagonals(&self) -> Vec<C64> {
        let m2 = (self.layout.angular * self.layout.angular) as f64;
        let h = self.modes;
        (0..h * h)
            .map(|k| (0..self.layout.radial).map(|a| self.a[a][k] * self.b[a][k] * m2).sum())
            .collect()
    }
}

fn binomial(k: usize, j: usize) -> f64 {
    let j = j.min(k - j);
    (0..j).fold(1.0, |acc, i| acc * (k - i) as f64 / (i + 1) as f64)
}

/// In-place unnormalized 2-D DFT of a row-major `m × m` block.
fn fft2(buf: &mut [C64], m: usize, plan: &dyn rustfft::Fft<f64>) {
    for row in buf.chunks_mut(m) {
        plan.process(row);
    }
    let mut col = vec![c(0.0, 0.0); m];
    for j in 0..m {
        for i in 0..m {
            col[i] = buf[i * m + j];
        }
        plan.process(&mut col);
        for i in 0..m {
            buf[i * m + j] = col[i];
        }
    }
}

/// Classical Leray integral at a point `z` off the surface.
pub fn leray_integral(mesh: &QuadratureMesh, f: &CVec, z: &AffinePoint) -> Result<C64> {
    let n = mesh.dim();
    if f.len() != mesh.len() || z.dim() != n {
        return Err(Error::Mesh("section or point does not match the mesh".into()));
    }
    let dens = leray_density(mesh)?;
    let mut s = c(0.0, 0.0);
    for (i, (w, jet)) in mesh.nodes.iter().zip(&mesh.jets).enumerate() {
        let d = jet.grad.dot(&(&w.z - &z.z));
        if d.norm() < 1e-12 * jet.grad.norm() {
            return Err(Error::NotLinearlyConvex("Leray denominator vanishes".into()));
        }
        s += f[i] * dens[i] * mesh.weights[i] / d.powi(n as i32);
    }
    Ok(s)
}

/// `((n−1)!/2)(i/π)ⁿ ⟨⟨f, Φ_z⟩⟩` with `Φ_z(ζ*) = (ζ·ζ*)^{−n}`, evaluated at a
/// point `z` off the surface.
pub fn leray_via_pairing(duality: &Duality, f: &Section, z: &AffinePoint) -> Result<C64> {
    let n = duality.dim();
    if z.dim() != n {
        return Err(Error::Dimension("probe point dimension".into()));
    }
    let phi = Section::from_fn(duality.dual.clone(), |w| {
        let s = match duality.chart {
            DualChart::Polar => c(1.0, 0.0) + w.z.dot(&z.z),
            DualChart::Eta => {
                let mut s = w.z[n - 1] + z.z[n - 1];
                for j in 0..n - 1 {
                    s -= z.z[j] * w.z[j];
                }
                s
            }
        };
        s.powi(-(n as i32))
    })?;
    let fact: f64 = (1..n).map(|k| k as f64).product();
    let k = c(fact / 2.0, 0.0) * (C64::i() / PI).powi(n as i32);
    Ok(k * duality.pair(f, &phi)?)
}

/// Largest pairwise discrepancy among `⟨⟨L_S f, g⟩⟩`, `⟨⟨f, L_{S*} g⟩⟩` and
/// `⟨⟨L_S f, L_{S*} g⟩⟩`.
pub fn adjoint_residual(
    duality: &Duality,
    op: &DiscreteOperator,
    op_dual: &DiscreteOperator,
    f: &Section,
    g: &Section,
) -> Result<f64> {
    let lf = op.apply_section(f)?;
    let lg = op_dual.apply_section(g)?;
    let a = duality.pair(&lf, g)?;
    let b = duality.pair(f, &lg)?;
    let c3 = duality.pair(&lf, &lg)?;
    Ok((a - b).norm().max((a - c3).norm()).max((b - c3).norm()))
}

/// `∫ f g dz` along a curve mesh, oriented with the Hardy side on the left.
pub fn curve_pairing(mesh: &QuadratureMesh, f: &CVec, g: &CVec) -> Result<C64> {
    let cd = mesh.curve_data().ok_or_else(|| Error::Mesh("curve mesh required".into()))?;
    let sign = if cd.hardy_left { 1.0 } else { -1.0 };
    Ok(f.iter().zip(g.iter()).zip(&cd.derivative).map(|((a, b), d)| a * b * d).sum::<C64>() * (sign * cd.step))
}

/// Largest discrepancy among `⟨⟨C₊f, g⟩⟩`, `⟨⟨f, C₋g⟩⟩`, `⟨⟨C₊f, C₋g⟩⟩` with the
/// pairing `∫ f g dz` on one curve.
pub fn plemelj_residual(mesh: &QuadratureMesh, f: &CVec, g: &CVec) -> Result<f64> {
    let p = cauchy_matrix(mesh, Side::Plus)?;
    let m = cauchy_matrix(mesh, Side::Minus)?;
    let pf = p.apply(f)?;
    let mg = m.apply(g)?;
    let a = curve_pairing(mesh, &pf, g)?;
    let b = curve_pairing(mesh, f, &mg)?;
    let c3 = curve_pairing(mesh, &pf, &mg)?;
    Ok((a - b).norm().max((a - c3).norm()).max((b - c3).norm()))
}

/// ♯-orthonormal basis of the discrete Hardy space of `S*`: the range of
/// `𝐂₊` on a dual curve, or all representable monomials on a dual torus.
pub fn dual_hardy_space(duality: &Duality) -> Result<Vec<Section>> {
    match &duality.dual.layout {
        MeshLayout::Curve(_) => {
            let c = cauchy_matrix(&duality.dual, Side::Plus)?.dense()?;
            range_basis(&duality.dual, &c)
        }
        MeshLayout::Torus(t) => {
            let w = sharp_weights(&duality.dual)?;
            let h = t.angular / 2;
            let mut out = Vec::with_capacity(h * h);
            for m1 in 0..h as i32 {
                for m2 in 0..h as i32 {
                    let s = Section::monomial(duality.dual.clone(), &[m1, m2])?;
                    let nrm: f64 = s.values.iter().zip(&w).map(|(v, wi)| v.norm_sqr() * wi).sum::<f64>().sqrt();
                    out.push(s.scaled(c(1.0 / nrm, 0.0)));
                }
            }
            Ok(out)
        }
        MeshLayout::Scattered => Err(Error::Mesh("dual Hardy space needs a structured dual mesh".into())),
    }
}

/// Both sides of `inf sup |⟨⟨f,g⟩⟩| = 1/‖L_S‖_♯`.
#[derive(Clone, Debug, PartialEq)]
pub struct EfficiencyReport {
    pub infsup: f64,
    pub norm: f64,
    pub inverse_norm: f64,
    pub residual: f64,
    pub basis_size: usize,
    pub dual_basis_size: usize,
}

/// Inf-sup over the ♯-orthonormalized monomials of degree `≤ degree` on `S`
/// against the full discrete Hardy space of `S*`, compared with `1/‖L_S‖_♯`.
pub fn efficiency_identity(mesh: Arc<QuadratureMesh>, degree: usize) -> Result<EfficiencyReport> {
    let duality = Duality::new(mesh.clone())?;
    let norm = operator_norm(&leray_matrix(&mesh)?)?;
    let basis = hardy_basis(&mesh, degree)?;
    let dual_basis = dual_hardy_space(&duality)?;
    let is = infsup(&duality, &basis, &dual_basis)?;
    Ok(EfficiencyReport {
        infsup: is,
        norm,
        inverse_norm: 1.0 / norm,
        residual: (is - 1.0 / norm).abs(),
        basis_size: basis.len(),
        dual_basis_size: dual_basis.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Ellipse, Hypersurface, UnitSphere};

    #[test]
    fn circle_cauchy_reproduces_hardy_monomials() {
        let mesh = Ellipse::circle(1.0).mesh(32).unwrap();
        let cp = cauchy_matrix(&mesh, Side::Plus).unwrap();
        for k in [-3i32, -1, 0, 2, 5] {
            let f = CVec::from_iterator(32, mesh.nodes.iter().map(|p| p.z[0].powi(k)));
            let g = cp.apply(&f).unwrap();
            let expect = if k >= 0 { f.clone() } else { CVec::zeros(32) };
            assert!((g - expect).norm() < 1e-10, "k = {k}");
        }
        assert!((operator_norm(&cp).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn sphere_leray_modes() {
        let mesh = UnitSphere::new(2).unwrap().mesh(12).unwrap();
        let l = leray_matrix(&mesh).unwrap();
        assert!((operator_norm(&l).unwrap() - 1.0).abs() < 1e-10);
        assert!(projection_defect(&l).unwrap() < 1e-10);
        let f = CVec::from_iterator(mesh.len(), mesh.nodes.iter().map(|p| p.z[0] * p.z[1] * p.z[1]));
        assert!((l.apply(&f).unwrap() - &f).norm() < 1e-10 * f.norm());
        let d = l.dense().unwrap();
        assert!((&d * &f - &f).norm() < 1e-10 * f.norm());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10.0);
        assert_eq!(binomial(0, 0), 1.0);
    }
}
