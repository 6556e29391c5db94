//! Fefferman and ♯ inner products, the transfer map `𝒯_S`, the bilinear
//! pairing `⟨⟨f, g⟩⟩` between sections on `S` and on `S*`, discrete Hardy
//! spaces and the inf-sup efficiency of the pairing.
//!
//! Sections of `𝒪(−n,0)` are stored through their affine trivialization:
//! one complex value per mesh node. On `S*` the chart is the one produced by
//! [`dual_surface`]: η coordinates for curves, polar coordinates otherwise.

use crate::duality::{dual_surface, DualChart};
use crate::geometry::{normal_frame_from_jet, AffinePoint, MeshLayout, QuadratureMesh};
use crate::{c, linalg, CMat, CVec, Error, Result, C64};
use std::sync::Arc;

/// Affine trivialization of a section sampled on a mesh.
#[derive(Clone, Debug)]
pub struct Section {
    pub mesh: Arc<QuadratureMesh>,
    pub values: CVec,
    pub bidegree: (i32, i32),
}

impl Section {
    /// A section of bidegree `(−n, 0)`.
    pub fn new(mesh: Arc<QuadratureMesh>, values: CVec) -> Result<Self> {
        if values.len() != mesh.len() {
            return Err(Error::Mesh(format!("{} values for {} nodes", values.len(), mesh.len())));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("section value".into()));
        }
        let n = mesh.dim() as i32;
        Ok(Self { mesh, values, bidegree: (-n, 0) })
    }

    pub fn from_fn(mesh: Arc<QuadratureMesh>, f: impl Fn(&AffinePoint) -> C64) -> Result<Self> {
        let values = CVec::from_iterator(mesh.len(), mesh.nodes.iter().map(f));
        Self::new(mesh, values)
    }

    pub fn zero(mesh: Arc<QuadratureMesh>) -> Self {
        let n = mesh.dim() as i32;
        Self { values: CVec::zeros(mesh.len()), mesh, bidegree: (-n, 0) }
    }

    /// `z^a` restricted to the mesh (negative exponents allowed).
    pub fn monomial(mesh: Arc<QuadratureMesh>, exponents: &[i32]) -> Result<Self> {
        if exponents.len() != mesh.dim() {
            return Err(Error::Dimension("exponent length differs from n".into()));
        }
        Self::from_fn(mesh, |p| p.z.iter().zip(exponents).map(|(z, &e)| z.powi(e)).product())
    }

    pub fn with_values(&self, values: CVec) -> Result<Self> {
        let mut s = Self::new(self.mesh.clone(), values)?;
        s.bidegree = self.bidegree;
        Ok(s)
    }

    /// Complex conjugate; swaps the bidegree.
    pub fn conj(&self) -> Self {
        Self {
            mesh: self.mesh.clone(),
            values: self.values.map(|v| v.conj()),
            bidegree: (self.bidegree.1, self.bidegree.0),
        }
    }

    pub fn scaled(&self, s: C64) -> Self {
        Self { mesh: self.mesh.clone(), values: &self.values * s, bidegree: self.bidegree }
    }
}

fn same_mesh(a: &Arc<QuadratureMesh>, b: &Arc<QuadratureMesh>) -> Result<()> {
    if Arc::ptr_eq(a, b) {
        Ok(())
    } else {
        Err(Error::Mesh("sections live on different meshes".into()))
    }
}

/// Fefferman density times the quadrature weight at each node.
pub fn fefferman_weights(mesh: &QuadratureMesh) -> Result<Vec<f64>> {
    let inv = mesh.invariants()?;
    Ok(inv.iter().zip(&mesh.weights).map(|(i, w)| i.fefferman_w * w).collect())
}

/// ♯ density times the quadrature weight at each node.
pub fn sharp_weights(mesh: &QuadratureMesh) -> Result<Vec<f64>> {
    let inv = mesh.invariants()?;
    inv.iter()
        .zip(&mesh.weights)
        .map(|(i, w)| match i.sharp_w {
            Some(s) if s > 0.0 && s.is_finite() => Ok(s * w),
            _ => Err(Error::NotLinearlyConvex(format!("φ = {} ≤ 0 at a mesh node", i.phi))),
        })
        .collect()
}

fn weighted_inner(f: &CVec, g: &CVec, w: &[f64]) -> C64 {
    f.iter().zip(g.iter()).zip(w).map(|((a, b), wi)| a * b.conj() * *wi).sum()
}

pub fn inner_fefferman(f: &Section, g: &Section) -> Result<C64> {
    same_mesh(&f.mesh, &g.mesh)?;
    Ok(weighted_inner(&f.values, &g.values, &fefferman_weights(&f.mesh)?))
}

pub fn norm_fefferman(f: &Section) -> Result<f64> {
    Ok(inner_fefferman(f, f)?.re.max(0.0).sqrt())
}

pub fn inner_sharp(f: &Section, g: &Section) -> Result<C64> {
    same_mesh(&f.mesh, &g.mesh)?;
    Ok(weighted_inner(&f.values, &g.values, &sharp_weights(&f.mesh)?))
}

pub fn norm_sharp(f: &Section) -> Result<f64> {
    Ok(inner_sharp(f, f)?.re.max(0.0).sqrt())
}

/// Gram matrix `G_ij = ⟨f_i, f_j⟩_♯`.
pub fn gram_sharp(basis: &[Section]) -> Result<CMat> {
    let Some(first) = basis.first() else {
        return Ok(CMat::zeros(0, 0));
    };
    let w = sharp_weights(&first.mesh)?;
    for b in basis {
        same_mesh(&first.mesh, &b.mesh)?;
    }
    Ok(CMat::from_fn(basis.len(), basis.len(), |i, j| weighted_inner(&basis[i].values, &basis[j].values, &w)))
}

/// A mesh of `S` together with its dual mesh and the pairing density.
#[derive(Clone, Debug)]
pub struct Duality {
    pub source: Arc<QuadratureMesh>,
    pub dual: Arc<QuadratureMesh>,
    pub chart: DualChart,
    /// `⟨⟨f,g⟩⟩ = Σ fᵢ gᵢ densityᵢ dSᵢ` over the source mesh.
    pub density: Vec<C64>,
}

impl Duality {
    pub fn new(source: Arc<QuadratureMesh>) -> Result<Self> {
        let d = dual_surface(&source)?;
        let dual = Arc::new(d.mesh);
        let density = pairing_density(&source)?;
        Ok(Self { source, dual, chart: d.chart, density })
    }

    /// The same pairing built from `S*`: `S*` becomes the source and the
    /// original mesh plays the role of its dual.
    pub fn reversed(&self) -> Result<Self> {
        let back = dual_surface(&self.dual)?;
        let scale = 1.0 + self.source.nodes.iter().map(|p| p.z.norm()).fold(0.0, f64::max);
        let gap = back
            .mesh
            .nodes
            .iter()
            .zip(&self.source.nodes)
            .map(|(a, b)| a.distance(b))
            .fold(0.0, f64::max);
        if gap > 1e-8 * scale {
            return Err(Error::Numerical(format!("bidual mesh misses the source by {gap:e}")));
        }
        let density = pairing_density(&self.dual)?;
        Ok(Self { source: self.dual.clone(), dual: self.source.clone(), chart: back.chart, density })
    }

    pub fn dim(&self) -> usize {
        self.source.dim()
    }

    /// `⟨⟨f, g⟩⟩` for `f` on `S`, `g` on `S*`.
    pub fn pair(&self, f: &Section, g: &Section) -> Result<C64> {
        same_mesh(&f.mesh, &self.source)?;
        same_mesh(&g.mesh, &self.dual)?;
        Ok(self.pair_values(&f.values, &g.values))
    }

    pub(crate) fn pair_values(&self, f: &CVec, g: &CVec) -> C64 {
        f.iter()
            .zip(g.iter())
            .zip(self.density.iter().zip(&self.source.weights))
            .map(|((a, b), (d, w))| a * b * d * *w)
            .sum()
    }

    /// `𝒯_S g`, a section of bidegree `(0, −n)` on `S`, normalized so that
    /// `⟨⟨f, g⟩⟩ = ⟨f, conj(𝒯_S g)⟩_S`.
    pub fn transfer(&self, g: &Section) -> Result<Section> {
        same_mesh(&g.mesh, &self.dual)?;
        let inv = self.source.invariants()?;
        let values = CVec::from_iterator(
            g.values.len(),
            g.values.iter().zip(&self.density).zip(inv).map(|((v, d), i)| v * d / i.fefferman_w),
        );
        let n = self.dim() as i32;
        Ok(Section { mesh: self.source.clone(), values, bidegree: (0, -n) })
    }

    /// `𝒯_S` with a different lift: multiplies by `ω^k`, `ω = e^{2πi/(n+1)}`.
    pub fn transfer_lift(&self, g: &Section, k: u32) -> Result<Section> {
        let omega = C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / (self.dim() as f64 + 1.0));
        Ok(self.transfer(g)?.scaled(omega))
    }

    /// Transfer computed literally from normalized frames: at each node the
    /// dilated normal frame and its dual chart are built and the defining
    /// formula is applied with principal branches of every fractional power.
    /// Agrees with [`Duality::transfer`] up to a root of unity per node.
    pub fn transfer_literal(&self, g: &Section) -> Result<Section> {
        same_mesh(&g.mesh, &self.dual)?;
        let n = self.dim();
        let mut values = CVec::zeros(g.values.len());
        for (i, (p, jet)) in self.source.nodes.iter().zip(&self.source.jets).enumerate() {
            values[i] = g.values[i] * literal_factor(p, jet, self.chart)?;
        }
        Ok(Section { mesh: self.source.clone(), values, bidegree: (0, -(n as i32)) })
    }

    /// ♯-norm of `g` on `S*`.
    pub fn norm_sharp_dual(&self, g: &Section) -> Result<f64> {
        same_mesh(&g.mesh, &self.dual)?;
        norm_sharp(g)
    }

    /// Relative defect of the transfer isometry
    /// `‖φ^{n/(2(n+1))} conj(𝒯_S g)‖_S = ‖g‖_{S*}` (Fefferman norms).
    pub fn isometry_residual(&self, g: &Section) -> Result<f64> {
        let tg = self.transfer(g)?;
        let n = self.dim() as f64;
        let e = n / (n + 1.0);
        let inv = self.source.invariants()?;
        let lhs: f64 = tg
            .values
            .iter()
            .zip(inv)
            .zip(&self.source.weights)
            .map(|((v, i), w)| i.phi.powf(e) * v.norm_sqr() * i.fefferman_w * w)
            .sum::<f64>()
            .sqrt();
        let rhs = norm_fefferman(g)?;
        Ok((lhs - rhs).abs() / rhs.max(1e-300))
    }

    /// Largest pointwise defect of `𝒯_{S*} ∘ conj ∘ 𝒯_S = φ^{−n/(n+1)}`,
    /// given the reversed pairing.
    pub fn double_transfer_residual(&self, reversed: &Duality) -> Result<f64> {
        same_mesh(&reversed.dual, &self.source)?;
        let n = self.dim() as f64;
        let inv = self.source.invariants()?;
        let inv_dual = self.dual.invariants()?;
        Ok(self
            .density
            .iter()
            .zip(&reversed.density)
            .zip(inv.iter().zip(inv_dual))
            .map(|((a, b), (i, j))| {
                let tau = a / i.fefferman_w;
                let tau_dual = b / j.fefferman_w;
                (tau * tau_dual.conj() * i.phi.powf(n / (n + 1.0)) - 1.0).norm()
            })
            .fold(0.0, f64::max))
    }

    /// `|⟨⟨f,g⟩⟩| − ‖f‖_♯ ‖g‖_♯`, non-positive when the Cauchy–Schwarz
    /// inequality of the pairing holds.
    pub fn cauchy_schwarz_excess(&self, f: &Section, g: &Section) -> Result<f64> {
        Ok(self.pair(f, g)?.norm() - norm_sharp(f)? * self.norm_sharp_dual(g)?)
    }

    /// `|⟨⟨f,g⟩⟩_S − ⟨⟨g,f⟩⟩_{S*}| / (‖f‖_♯‖g‖_♯)`, given the reversed pairing.
    pub fn symmetry_residual(&self, reversed: &Duality, f: &Section, g: &Section) -> Result<f64> {
        let a = self.pair(f, g)?;
        let b = reversed.pair(g, f)?;
        Ok((a - b).norm() / (norm_sharp(f)? * self.norm_sharp_dual(g)?).max(1e-300))
    }
}

/// Pairing density against `dS`.
///
/// n = 1 (η chart, `S* = −S`): `⟨⟨f,g⟩⟩ = ±∫ f(z) g(−z) dz`, the sign
/// orienting the curve with its Hardy side on the left.
/// n ≥ 2 (polar chart): `det(EᵀBĒ) |∂r| (i ∂r·z)^{−n}`.
pub fn pairing_density(mesh: &QuadratureMesh) -> Result<Vec<C64>> {
    let n = mesh.dim();
    if n == 1 {
        let cd = mesh
            .curve_data()
            .ok_or_else(|| Error::Mesh("curve mesh without parametrization data".into()))?;
        let sign = if cd.hardy_left { 1.0 } else { -1.0 };
        return Ok(cd.derivative.iter().map(|d| d / d.norm() * sign).collect());
    }
    let inv = mesh.invariants()?;
    mesh.nodes
        .iter()
        .zip(&mesh.jets)
        .zip(inv)
        .map(|((p, jet), i)| {
            let g = jet.grad.norm();
            let det_l = linalg::det(&i.levi).re * (2.0 * g).powi(n as i32 - 1);
            let cz = jet.grad.dot(&p.z);
            if cz.norm() < 1e-12 * g {
                return Err(Error::Chart("tangent hyperplane through the origin".into()));
            }
            Ok(c(det_l * g, 0.0) / (C64::i() * cz).powi(n as i32))
        })
        .collect()
}

/// `c_T (det ∂w/∂η̂)^{n/(n+1)} conj(det A)^{−n/(n+1)}`, with `z = p + Aẑ` the
/// dilated normal frame, `η̂` the η chart of `ẑ` and `w` the dual chart.
fn literal_factor(p: &AffinePoint, jet: &crate::geometry::Jet2, chart: DualChart) -> Result<C64> {
    let n = p.dim();
    if n == 1 || chart != DualChart::Polar {
        return Err(Error::Dimension("the literal transfer path is implemented for polar duals, n ≥ 2".into()));
    }
    let frame = normal_frame_from_jet(p, jet)?;
    let dil = frame.dilated()?;
    let a = &dil.basis;
    let at_inv = a
        .transpose()
        .try_inverse()
        .ok_or_else(|| Error::Degenerate("singular normal frame".into()))?;
    // Hyperplane η̂ in ẑ coordinates is (η̂_n, −η̂', 1)·(1, ẑ) = 0.
    let v = at_inv.column(n - 1).into_owned();
    let c0 = -v.dot(&p.z);
    let mut jw = CMat::zeros(n, n);
    for k in 0..n - 1 {
        let dv = -at_inv.column(k).into_owned();
        let dc = -dv.dot(&p.z);
        jw.set_column(k, &(&dv / c0 - &v * (dc / (c0 * c0))));
    }
    jw.set_column(n - 1, &(-&v / (c0 * c0)));
    let e = n as f64 / (n as f64 + 1.0);
    let prod_alpha: f64 = dil.alpha.iter().product();
    let c_t = 2f64.powf((n * (n - 1)) as f64 / (n as f64 + 1.0)) * prod_alpha.powf(e);
    let dj = linalg::det(&jw);
    let da = linalg::det(a).conj();
    Ok(c(c_t, 0.0) * dj.powf(e) * da.powf(-e))
}

/// Monomials `z^a`, `|a| ≤ d`, orthonormalized in the ♯ metric. On a curve
/// whose Hardy side is the exterior, `z^{−1−k}`, `k ≤ d`, are used instead.
/// Monomials that would push the Gram condition number beyond `1e8` are
/// dropped.
pub fn hardy_basis(mesh: &Arc<QuadratureMesh>, max_degree: usize) -> Result<Vec<Section>> {
    let n = mesh.dim();
    let exterior = matches!(&mesh.layout, MeshLayout::Curve(cd) if !cd.hardy_left);
    let mut exps: Vec<Vec<i32>> = Vec::new();
    for deg in 0..=max_degree {
        multi_indices(n, deg, &mut vec![0; n], 0, &mut exps);
    }
    if exterior {
        for e in &mut exps {
            e[0] = -1 - e[0];
        }
    }
    let raw: Vec<CVec> = exps
        .iter()
        .map(|e| Section::monomial(mesh.clone(), e).map(|s| s.values))
        .collect::<Result<_>>()?;
    let w = sharp_weights(mesh)?;
    let (basis, _) = linalg::weighted_gram_schmidt(&raw, &w, 1e-8);
    if basis.is_empty() {
        return Err(Error::Degenerate("empty Hardy basis".into()));
    }
    basis.into_iter().map(|v| Section::new(mesh.clone(), v)).collect()
}

fn multi_indices(n: usize, left: usize, cur: &mut Vec<i32>, k: usize, out: &mut Vec<Vec<i32>>) {
    if k + 1 == n {
        cur[k] = left as i32;
        out.push(cur.clone());
        return;
    }
    for e in (0..=left).rev() {
        cur[k] = e as i32;
        multi_indices(n, left - e, cur, k + 1, out);
    }
}

/// ♯-orthonormal basis of the range of a projection matrix `P` acting on
/// section values: left singular vectors of `W^{1/2} P W^{−1/2}` with
/// singular value above `1e−6`.
pub fn range_basis(mesh: &Arc<QuadratureMesh>, projection: &CMat) -> Result<Vec<Section>> {
    let w = sharp_weights(mesh)?;
    let n = w.len();
    if projection.nrows() != n || projection.ncols() != n {
        return Err(Error::Mesh("projection size differs from the mesh".into()));
    }
    let sq: Vec<f64> = w.iter().map(|x| x.sqrt()).collect();
    let m = CMat::from_fn(n, n, |i, j| projection[(i, j)] * (sq[i] / sq[j]));
    let svd = m.svd(true, false);
    let u = svd.u.ok_or_else(|| Error::Numerical("SVD failed".into()))?;
    let mut out = Vec::new();
    for (k, s) in svd.singular_values.iter().enumerate() {
        if *s > 1e-6 {
            let v = CVec::from_iterator(n, u.column(k).iter().zip(&sq).map(|(x, r)| x / *r));
            out.push(Section::new(mesh.clone(), v)?);
        }
    }
    if out.is_empty() {
        return Err(Error::Degenerate("projection has empty range".into()));
    }
    Ok(out)
}

/// `P_ij = ⟨⟨f_i, g_j⟩⟩`.
pub fn pairing_matrix(duality: &Duality, basis_s: &[Section], basis_dual: &[Section]) -> Result<CMat> {
    for f in basis_s {
        same_mesh(&f.mesh, &duality.source)?;
    }
    for g in basis_dual {
        same_mesh(&g.mesh, &duality.dual)?;
    }
    let n = duality.source.len();
    let scale: Vec<C64> = duality.density.iter().zip(&duality.source.weights).map(|(d, w)| d * *w).collect();
    let f = CMat::from_fn(basis_s.len(), n, |i, k| basis_s[i].values[k] * scale[k]);
    let g = CMat::from_fn(n, basis_dual.len(), |k, j| basis_dual[j].values[k]);
    Ok(f * g)
}

/// `‖(⟨⟨f, g_i⟩⟩)_i‖` over a ♯-orthonormal basis of `S*` sections.
pub fn sup_pairing(duality: &Duality, f: &Section, dual_basis: &[Section]) -> Result<f64> {
    if dual_basis.is_empty() {
        return Err(Error::Degenerate("empty dual basis".into()));
    }
    let mut s = 0.0;
    for g in dual_basis {
        s += duality.pair(f, g)?.norm_sqr();
    }
    Ok(s.sqrt())
}

/// Smallest singular value of the pairing matrix between two ♯-orthonormal
/// bases: `inf_f sup_g |⟨⟨f,g⟩⟩|` over the spanned spaces.
pub fn infsup(duality: &Duality, basis_s: &[Section], basis_dual: &[Section]) -> Result<f64> {
    if basis_s.is_empty() || basis_dual.is_empty() {
        return Err(Error::Degenerate("empty basis".into()));
    }
    if basis_s.len() > basis_dual.len() {
        return Ok(0.0);
    }
    let p = pairing_matrix(duality, basis_s, basis_dual)?;
    let sv = p.singular_values();
    Ok(sv.iter().cloned().fold(f64::INFINITY, f64::min))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Ellipse, Hypersurface, UnitSphere};

    #[test]
    fn circle_constant_norm() {
        let m = Arc::new(Ellipse::circle(1.0).mesh(64).unwrap());
        let one = Section::from_fn(m.clone(), |_| c(1.0, 0.0)).unwrap();
        let v = inner_fefferman(&one, &one).unwrap();
        assert!((v.re - 2.0 * std::f64::consts::PI).abs() < 1e-12);
        let e1 = Section::monomial(m.clone(), &[1]).unwrap();
        let e2 = Section::monomial(m, &[2]).unwrap();
        assert!(inner_fefferman(&e1, &e2).unwrap().norm() < 1e-12);
    }

    #[test]
    fn circle_pairing_is_perfect() {
        let m = Arc::new(Ellipse::circle(1.0).mesh(64).unwrap());
        let d = Duality::new(m.clone()).unwrap();
        let bs = hardy_basis(&m, 4).unwrap();
        let bd = hardy_basis(&d.dual, 4).unwrap();
        assert!((infsup(&d, &bs, &bd).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn sphere_density_and_symmetry() {
        let s = UnitSphere::new(2).unwrap();
        let m = Arc::new(s.mesh(12).unwrap());
        let d = Duality::new(m.clone()).unwrap();
        for x in &d.density {
            assert!((x - c(-1.0, 0.0)).norm() < 1e-10);
        }
        let r = d.reversed().unwrap();
        for (a, b) in r.density.iter().zip(&d.density) {
            assert!((a - b).norm() < 1e-10);
        }
        assert!(d.double_transfer_residual(&r).unwrap() < 1e-10);
        let f = Section::from_fn(m.clone(), |p| p.z[0] * p.z[1] + 0.5).unwrap();
        let g = Section::from_fn(d.dual.clone(), |p| p.z[0].conj() + 1.0).unwrap();
        assert!(d.symmetry_residual(&r, &f, &g).unwrap() < 1e-10);
        assert!(d.isometry_residual(&g).unwrap() < 1e-10);
        assert!(d.cauchy_schwarz_excess(&f, &g).unwrap() <= 1e-12);
    }
}
