//! Projective duality: the tangent-hyperplane map `𝒟_S`, second-order jets
//! of the dual hypersurface, dual meshes, the round-trip identity and the
//! transport of invariants.
//!
//! Two affine charts of the dual space are used. The η chart writes the
//! tangent hyperplane at `z` as `z_n + η_n = Σ_{j<n} z_j η_j`; the polar
//! chart writes it as `1 + Σ z_j w_j = 0` and is well defined on every
//! hypersurface bounding a domain that contains the origin.

use crate::geometry::{
    jet2, project_to_surface, AffinePoint, CurveData, Hypersurface, Jet2, MeshLayout, QuadratureMesh, TorusLayout,
};
use crate::invariants::{point_invariants_from_jet, PointInvariants};
use crate::geometry::tangent_basis;
use crate::{c, linalg, CMat, CVec, Error, Result, RMat, RVec, C64};
use std::f64::consts::PI;

/// Affine coordinates of a tangent hyperplane in the η chart.
#[derive(Clone, Debug, PartialEq)]
pub struct DualPoint {
    pub eta: CVec,
}

impl DualPoint {
    pub fn to_affine(&self) -> AffinePoint {
        AffinePoint { z: self.eta.clone() }
    }
}

/// Affine chart of the dual projective space.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DualChart {
    /// `η_j = −ζ*_j/ζ*_n (j<n)`, `η_n = ζ*_0/ζ*_n`.
    Eta,
    /// `w_j = ζ*_j/ζ*_0`.
    Polar,
}

/// The dual of a mesh: node `i` is the tangent hyperplane at source node `i`.
#[derive(Clone, Debug)]
pub struct DualMesh {
    pub mesh: QuadratureMesh,
    pub chart: DualChart,
    /// Area Jacobian of `𝒟_S` at each source node.
    pub jacobian: Vec<f64>,
}

fn dg(jet: &Jet2, v: &CVec) -> CVec {
    &jet.hess_holo * v + &jet.hess_mixed * v.map(|x| x.conj())
}

/// `η = 𝒟_S(z)` from the jet at `z`.
pub fn dual_point_from_jet(z: &AffinePoint, jet: &Jet2) -> Result<DualPoint> {
    let n = z.dim();
    let g = &jet.grad;
    let gn = g[n - 1];
    if gn.norm() <= 1e-10 * g.norm() {
        return Err(Error::Chart("∂r/∂z_n vanishes: the η chart does not contain this hyperplane".into()));
    }
    let mut eta = CVec::zeros(n);
    let mut s = c(0.0, 0.0);
    for j in 0..n - 1 {
        eta[j] = -g[j] / gn;
        s += z.z[j] * eta[j];
    }
    eta[n - 1] = s - z.z[n - 1];
    Ok(DualPoint { eta })
}

pub fn dual_point(surface: &dyn Hypersurface, z: &AffinePoint) -> Result<DualPoint> {
    dual_point_from_jet(z, &jet2(surface, z)?)
}

/// `|z_n + η_n − Σ_{j<n} z_j η_j|`.
pub fn incidence_residual(z: &AffinePoint, eta: &CVec) -> f64 {
    let n = z.dim();
    let mut s = z.z[n - 1] + eta[n - 1];
    for j in 0..n - 1 {
        s -= z.z[j] * eta[j];
    }
    s.norm()
}

/// Polar coordinates `w = −∂r/(∂r·z)` of the tangent hyperplane.
pub fn polar_point_from_jet(z: &AffinePoint, jet: &Jet2) -> Result<CVec> {
    let cz = jet.grad.dot(&z.z);
    if cz.norm() <= 1e-10 * jet.grad.norm() * (1.0 + z.z.norm()) {
        return Err(Error::Chart("tangent hyperplane passes through the origin".into()));
    }
    Ok(-&jet.grad / cz)
}

/// Chart-specific first-order data of the dual map at `z`.
struct DualMap<'a> {
    z: &'a AffinePoint,
    jet: &'a Jet2,
    chart: DualChart,
    point: CVec,
    /// `∂r*` is a real multiple of `phase · dir`.
    dir: CVec,
    phase: C64,
}

impl<'a> DualMap<'a> {
    fn new(z: &'a AffinePoint, jet: &'a Jet2, chart: DualChart) -> Result<Self> {
        let n = z.dim();
        let (point, dir, phase) = match chart {
            DualChart::Eta => {
                let eta = dual_point_from_jet(z, jet)?.eta;
                let mut dir = z.z.clone();
                dir[n - 1] = c(-1.0, 0.0);
                (eta, dir, jet.grad[n - 1])
            }
            DualChart::Polar => {
                let w = polar_point_from_jet(z, jet)?;
                (w, z.z.clone(), jet.grad.dot(&z.z))
            }
        };
        Ok(Self { z, jet, chart, point, dir, phase })
    }

    /// Derivative of the dual map along a real tangent vector `v` (as ℂⁿ).
    fn derivative(&self, v: &CVec) -> CVec {
        let g = &self.jet.grad;
        let d = dg(self.jet, v);
        let n = v.len();
        match self.chart {
            DualChart::Eta => {
                let gn = g[n - 1];
                let mut out = CVec::zeros(n);
                let mut s = -v[n - 1];
                for j in 0..n - 1 {
                    out[j] = -(d[j] * gn - g[j] * d[n - 1]) / (gn * gn);
                    s += v[j] * self.point[j] + self.z.z[j] * out[j];
                }
                out[n - 1] = s;
                out
            }
            DualChart::Polar => {
                let cz = self.phase;
                let dc = d.dot(&self.z.z) + g.dot(v);
                -&d / cz + g * (dc / (cz * cz))
            }
        }
    }

    /// Derivative of `dir` along `v`.
    fn dir_derivative(&self, v: &CVec) -> CVec {
        match self.chart {
            DualChart::Eta => {
                let mut out = v.clone();
                let n = v.len();
                out[n - 1] = c(0.0, 0.0);
                out
            }
            DualChart::Polar => v.clone(),
        }
    }
}

/// Second-order jet of a dual defining function at `𝒟_S(z)`, from the jet
/// of `S` at `z`. The dual defining function is normalized to `|∂r*| = 1`
/// and oriented so that its Levi form is positive.
pub fn dual_jet(z: &AffinePoint, jet: &Jet2, chart: DualChart) -> Result<(AffinePoint, Jet2)> {
    let n = z.dim();
    if n == 1 {
        return dual_jet_curve(z, jet, chart);
    }
    let map = DualMap::new(z, jet, chart)?;
    let m = n - 1;
    let e = linalg::complement_basis(&jet.grad.map(|x| x.conj()));
    let es = linalg::complement_basis(&map.dir.map(|x| x.conj()));
    // Real matrix of 𝒟'|_H : H → H* in the bases {e_a, i e_a}, {e*_a, i e*_a}.
    let mut dm = RMat::zeros(2 * m, 2 * m);
    for a in 0..m {
        for (k, v) in [e.column(a).into_owned(), e.column(a).into_owned() * C64::i()].iter().enumerate() {
            let w = map.derivative(v);
            let om = es.adjoint() * &w;
            for b in 0..m {
                dm[(2 * b, 2 * a + k)] = om[b].re;
                dm[(2 * b + 1, 2 * a + k)] = om[b].im;
            }
        }
    }
    let inv = linalg::real_inverse(&dm)
        .map_err(|_| Error::NotLinearlyConvex("the dual map is singular on H_zS".into()))?;
    // M(W) = P((𝒟'|_H)⁻¹ W), up to the real factor fixed below.
    let apply_m = |col: usize| -> CVec {
        let x = inv.column(col);
        let mut v = CVec::zeros(n);
        for a in 0..m {
            v += e.column(a) * c(x[2 * a], x[2 * a + 1]);
        }
        map.dir_derivative(&v)
    };
    let mut at = CMat::zeros(n, m);
    let mut bt = CMat::zeros(n, m);
    for a in 0..m {
        let m1 = apply_m(2 * a);
        let m2 = apply_m(2 * a + 1);
        at.set_column(a, &((&m1 - &m2 * C64::i()) * c(0.5, 0.0)));
        bt.set_column(a, &((&m1 + &m2 * C64::i()) * c(0.5, 0.0)));
    }
    let mut lam = map.phase / c(map.phase.norm() * map.dir.norm(), 0.0);
    let q = es.transpose() * &at * lam;
    let mut l = es.transpose() * &bt * lam;
    l = (&l + l.adjoint()) * c(0.5, 0.0);
    let mut q = (&q + q.transpose()) * c(0.5, 0.0);
    let ev = linalg::hermitian_eigenvalues(&l);
    if ev[0] < 0.0 {
        if ev[m - 1] > 0.0 {
            return Err(Error::NotLinearlyConvex("dual Levi form is indefinite".into()));
        }
        lam = -lam;
        l = -l;
        q = -q;
    }
    let esc = es.map(|x| x.conj());
    let hess_holo = &esc * q * es.adjoint();
    let hess_mixed = &esc * l * es.transpose();
    let grad = &map.dir * lam;
    Ok((AffinePoint { z: map.point.clone() }, Jet2 { r: 0.0, grad, hess_holo, hess_mixed }))
}

/// n = 1: the η chart dual is `−S` with defining function `−r(−η)`;
/// the polar dual is `w = −1/z` with `−r(−1/w)`.
fn dual_jet_curve(z: &AffinePoint, jet: &Jet2, chart: DualChart) -> Result<(AffinePoint, Jet2)> {
    let z0 = z.z[0];
    match chart {
        DualChart::Eta => {
            let p = AffinePoint { z: CVec::from_vec(vec![-z0]) };
            Ok((p, Jet2 { r: -jet.r, grad: jet.grad.clone(), hess_holo: -&jet.hess_holo, hess_mixed: -&jet.hess_mixed }))
        }
        DualChart::Polar => {
            if z0.norm() < 1e-14 {
                return Err(Error::Chart("polar dual of a curve through 0".into()));
            }
            let w = -1.0 / z0;
            // Φ(w) = −1/w, Φ' = 1/w², Φ'' = −2/w³
            let jac = CMat::from_element(1, 1, 1.0 / (w * w));
            let sec = vec![CMat::from_element(1, 1, -2.0 / (w * w * w))];
            let j = jet.compose_holomorphic(&jac, &sec).scaled(-1.0);
            Ok((AffinePoint { z: CVec::from_vec(vec![w]) }, j))
        }
    }
}

/// Ratio of dual to source surface measure: `√det Gram(𝒟'T)` over an
/// orthonormal basis `T` of `T_zS`.
pub fn dual_area_factor(z: &AffinePoint, jet: &Jet2, chart: DualChart) -> Result<f64> {
    if z.dim() == 1 {
        return Ok(match chart {
            DualChart::Eta => 1.0,
            DualChart::Polar => 1.0 / z.z[0].norm_sqr(),
        });
    }
    let map = DualMap::new(z, jet, chart)?;
    let t = tangent_basis(&jet.unit_normal());
    let n = z.dim();
    let mut img = RMat::zeros(2 * n, t.ncols());
    for k in 0..t.ncols() {
        let v = CVec::from_fn(n, |j, _| c(t[(2 * j, k)], t[(2 * j + 1, k)]));
        let w = map.derivative(&v);
        for j in 0..n {
            img[(2 * j, k)] = w[j].re;
            img[(2 * j + 1, k)] = w[j].im;
        }
    }
    Ok((img.transpose() * img).determinant().abs().sqrt())
}

/// Dual mesh: the η chart (`S* = −S`) for curves, the polar chart otherwise.
pub fn dual_surface(mesh: &QuadratureMesh) -> Result<DualMesh> {
    let n = mesh.dim();
    let chart = if n == 1 { DualChart::Eta } else { DualChart::Polar };
    let mut nodes = Vec::with_capacity(mesh.len());
    let mut jets = Vec::with_capacity(mesh.len());
    let mut jac = Vec::with_capacity(mesh.len());
    for (z, jet) in mesh.nodes.iter().zip(&mesh.jets) {
        let (p, j) = dual_jet(z, jet, chart)?;
        nodes.push(p);
        jets.push(j);
        jac.push(dual_area_factor(z, jet, chart)?);
    }
    let weights: Vec<f64> = mesh.weights.iter().zip(&jac).map(|(w, j)| w * j).collect();
    let layout = match &mesh.layout {
        MeshLayout::Curve(cd) => MeshLayout::Curve(CurveData {
            derivative: cd.derivative.iter().map(|d| -d).collect(),
            step: cd.step,
            hardy_left: !cd.hardy_left,
        }),
        MeshLayout::Torus(t) => dual_torus(t, &nodes).map_or(MeshLayout::Scattered, MeshLayout::Torus),
        MeshLayout::Scattered => MeshLayout::Scattered,
    };
    Ok(DualMesh { mesh: QuadratureMesh::from_parts(nodes, weights, jets, layout)?, chart, jacobian: jac })
}

/// Recognizes the polar dual of a Reinhardt torus mesh as a torus mesh.
fn dual_torus(t: &TorusLayout, nodes: &[AffinePoint]) -> Option<TorusLayout> {
    let m = t.angular;
    let theta = [PI - t.theta[0], PI - t.theta[1]];
    let sigma = [-t.sigma[0], -t.sigma[1]];
    let dphi = 2.0 * PI / m as f64;
    let mut rho = Vec::with_capacity(t.radial);
    for a in 0..t.radial {
        let p = &nodes[t.index(a, 0, 0)];
        rho.push([p.z[0].norm(), p.z[1].norm()]);
        for b1 in 0..m {
            for b2 in 0..m {
                let q = &nodes[t.index(a, b1, b2)];
                let e1 = C64::from_polar(rho[a][0], theta[0] + sigma[0] * dphi * b1 as f64);
                let e2 = C64::from_polar(rho[a][1], theta[1] + sigma[1] * dphi * b2 as f64);
                if (q.z[0] - e1).norm() + (q.z[1] - e2).norm() > 1e-9 * (1.0 + q.z.norm()) {
                    return None;
                }
            }
        }
    }
    Some(TorusLayout { radial: t.radial, angular: m, rho, theta, sigma })
}

/// `𝒟_{S*}(𝒟_S(z))` computed from the dual jet in the η chart.
pub fn roundtrip(surface: &dyn Hypersurface, z: &AffinePoint) -> Result<AffinePoint> {
    let jet = jet2(surface, z)?;
    let (eta, dj) = dual_jet(z, &jet, DualChart::Eta)?;
    Ok(dual_point_from_jet(&eta, &dj)?.to_affine())
}

/// Chart for pointwise dual computations: η when available, else polar.
fn pointwise_chart(jet: &Jet2) -> DualChart {
    let n = jet.dim();
    if jet.grad[n - 1].norm() > 1e-3 * jet.grad.norm() {
        DualChart::Eta
    } else {
        DualChart::Polar
    }
}

/// Invariants of `S*` at `𝒟_S(z)`.
pub fn dual_invariants(surface: &dyn Hypersurface, z: &AffinePoint) -> Result<PointInvariants> {
    let jet = jet2(surface, z)?;
    let (_, dj) = dual_jet(z, &jet, pointwise_chart(&jet))?;
    point_invariants_from_jet(&dj)
}

/// Residuals of the transport laws `|b_{S*}|∘𝒟 = |b_S|` (n = 2 only) and
/// `φ_{S*}∘𝒟 = φ_S`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransportResidual {
    pub b: Option<f64>,
    pub phi: f64,
}

pub fn transport_check(surface: &dyn Hypersurface, z: &AffinePoint) -> Result<TransportResidual> {
    let jet = jet2(surface, z)?;
    let here = point_invariants_from_jet(&jet)?;
    let (_, dj) = dual_jet(z, &jet, pointwise_chart(&jet))?;
    let there = point_invariants_from_jet(&dj)?;
    let b = match (here.b, there.b) {
        (Some(x), Some(y)) => Some((x.norm() - y.norm()).abs()),
        _ => None,
    };
    Ok(TransportResidual { b, phi: (here.phi - there.phi).abs() })
}

/// Contact and (anti)linearity of the numerically differentiated dual map.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContactReport {
    /// Largest relative component of `𝒟'(H_zS)` transverse to `H*`.
    pub contact: f64,
    /// Norm of the ℂ-linear part of `𝒟'|_H`.
    pub linear: f64,
    /// Norm of the ℂ-antilinear part of `𝒟'|_H`.
    pub antilinear: f64,
}

pub fn contact_check(surface: &dyn Hypersurface, z: &AffinePoint, eps: f64) -> Result<ContactReport> {
    let n = z.dim();
    if n < 2 {
        return Err(Error::Dimension("contact structure needs n ≥ 2".into()));
    }
    let jet = jet2(surface, z)?;
    let e = linalg::complement_basis(&jet.grad.map(|x| x.conj()));
    let mut dir = z.z.clone();
    dir[n - 1] = c(-1.0, 0.0);
    let diff = |v: &CVec| -> Result<CVec> {
        let zp = project_to_surface(surface, &AffinePoint { z: &z.z + v * c(eps, 0.0) })?;
        let zm = project_to_surface(surface, &AffinePoint { z: &z.z - v * c(eps, 0.0) })?;
        Ok((dual_point(surface, &zp)?.eta - dual_point(surface, &zm)?.eta) / c(2.0 * eps, 0.0))
    };
    let (mut contact, mut lin, mut anti) = (0.0f64, 0.0f64, 0.0f64);
    for a in 0..n - 1 {
        let v = e.column(a).into_owned();
        let d1 = diff(&v)?;
        let d2 = diff(&(&v * C64::i()))?;
        for d in [&d1, &d2] {
            contact = contact.max(dir.dot(d).norm() / (dir.norm() * d.norm().max(1e-300)));
        }
        lin = lin.hypot(((&d1 - &d2 * C64::i()) * c(0.5, 0.0)).norm());
        anti = anti.hypot(((&d1 + &d2 * C64::i()) * c(0.5, 0.0)).norm());
    }
    Ok(ContactReport { contact, linear: lin, antilinear: anti })
}

/// Independent estimate of the dual jet at `𝒟_S(z)` (η chart): the dual
/// point cloud of a neighbourhood of `z` is fitted by a quartic graph over
/// its approximate tangent space.
pub fn dual_jet_fit(surface: &dyn Hypersurface, z: &AffinePoint, radius: f64) -> Result<Jet2> {
    let n = z.dim();
    let jet = jet2(surface, z)?;
    let eta0 = dual_point_from_jet(z, &jet)?.eta;
    let x0 = crate::geometry::complex_to_real(&eta0);
    // The incidence direction fixes the complex normal line of S*; the real
    // normal inside it is the direction along which the cloud is flattest.
    let mut dir = z.z.clone();
    dir[n - 1] = c(-1.0, 0.0);
    let u: Vec<f64> = dir.iter().flat_map(|d| [d.re, -d.im]).collect();
    let ju: Vec<f64> = u.chunks(2).flat_map(|p| [-p[1], p[0]]).collect();
    let un = u.iter().map(|x| x * x).sum::<f64>().sqrt();
    let u = RVec::from_iterator(2 * n, u.iter().map(|x| x / un));
    let ju = RVec::from_iterator(2 * n, ju.iter().map(|x| x / un));
    let ts = tangent_basis(&jet.unit_normal());
    let dims = 2 * n - 1;
    let per = 5usize;
    let total = per.pow(dims as u32);
    let mut cloud = Vec::with_capacity(total);
    for idx in 0..total {
        let mut rem = idx;
        let mut v = RVec::zeros(2 * n);
        for k in 0..dims {
            let s = (rem % per) as f64 / (per - 1) as f64 * 2.0 - 1.0;
            rem /= per;
            v += ts.column(k) * (radius * s);
        }
        let p = project_to_surface(surface, &AffinePoint { z: &z.z + crate::geometry::real_to_complex(v.as_slice()) })?;
        let eta = dual_point(surface, &p)?.eta;
        let x = crate::geometry::complex_to_real(&eta);
        cloud.push(RVec::from_iterator(2 * n, x.iter().zip(&x0).map(|(a, b)| a - b)));
    }
    let mut cov = nalgebra::Matrix2::<f64>::zeros();
    for dx in &cloud {
        let v = nalgebra::Vector2::new(u.dot(dx), ju.dot(dx));
        cov += v * v.transpose();
    }
    let eig = nalgebra::SymmetricEigen::new(cov);
    let k = if eig.eigenvalues[0] <= eig.eigenvalues[1] { 0 } else { 1 };
    let nuv = &u * eig.eigenvectors[(0, k)] + &ju * eig.eigenvectors[(1, k)];
    let tb = tangent_basis(nuv.as_slice());
    let taus: Vec<RVec> = cloud.iter().map(|dx| tb.transpose() * dx).collect();
    let hs: Vec<f64> = cloud.iter().map(|dx| nuv.dot(dx)).collect();
    let monos = monomials(dims, 4);
    let a = RMat::from_fn(taus.len(), monos.len(), |i, k| {
        monos[k].iter().enumerate().map(|(d, &e)| taus[i][d].powi(e as i32)).product()
    });
    let b = RVec::from_vec(hs);
    let coef = a
        .svd(true, true)
        .solve(&b, 1e-14)
        .map_err(|e| Error::Numerical(format!("least squares failed: {e}")))?;
    // gradient and Hessian of h at τ = 0
    let mut gh = RVec::zeros(dims);
    let mut hh = RMat::zeros(dims, dims);
    for (k, e) in monos.iter().enumerate() {
        let deg: usize = e.iter().sum();
        if deg == 1 {
            let d = e.iter().position(|&x| x == 1).unwrap();
            gh[d] = coef[k];
        } else if deg == 2 {
            match e.iter().position(|&x| x == 2) {
                Some(d) => hh[(d, d)] = 2.0 * coef[k],
                None => {
                    let idx: Vec<usize> = (0..dims).filter(|&d| e[d] == 1).collect();
                    hh[(idx[0], idx[1])] = coef[k];
                    hh[(idx[1], idx[0])] = coef[k];
                }
            }
        }
    }
    // r(x) = h(Tᵀ(x − x0)) − νᵀ(x − x0) + h(0) correction is below tolerance
    let grad = &tb * gh - nuv;
    let hess = &tb * hh * tb.transpose();
    let fitted = Jet2::from_real(coef[0], grad.as_slice(), &hess);
    // orient like `dual_jet`: positive Levi form
    let e = linalg::complement_basis(&fitted.grad.map(|x| x.conj()));
    let levi = e.transpose() * &fitted.hess_mixed * e.map(|x| x.conj());
    Ok(if levi.trace().re < 0.0 { fitted.scaled(-1.0) } else { fitted })
}

fn monomials(dims: usize, max_deg: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![0; dims]];
    for deg in 1..=max_deg {
        let mut cur = vec![0; dims];
        fill(&mut out, &mut cur, 0, deg);
    }
    fn fill(out: &mut Vec<Vec<usize>>, cur: &mut Vec<usize>, k: usize, left: usize) {
        if k + 1 == cur.len() {
            cur[k] = left;
            out.push(cur.clone());
            return;
        }
        for e in (0..=left).rev() {
            cur[k] = e;
            fill(out, cur, k + 1, left - e);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{LpSphere, Quadric, UnitSphere};

    #[test]
    fn sphere_dual_point() {
        let s = UnitSphere::new(2).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let z = AffinePoint::new(vec![c(r, 0.0), c(r, 0.0)]).unwrap();
        let eta = dual_point(&s, &z).unwrap().eta;
        assert!((eta[0] - c(-1.0, 0.0)).norm() < 1e-14);
        assert!((eta[1] - c(-2f64.sqrt(), 0.0)).norm() < 1e-14);
        assert!(incidence_residual(&z, &eta) < 1e-14);
    }

    #[test]
    fn quadric_dual_invariants() {
        let q = Quadric::planar(1.0, c(0.5, 0.0)).unwrap();
        let o = AffinePoint::origin(2);
        assert!(dual_point(&q, &o).unwrap().eta.norm() < 1e-15);
        let t = transport_check(&q, &o).unwrap();
        assert!(t.b.unwrap() < 1e-12 && t.phi < 1e-12);
    }

    #[test]
    fn lp_dual_has_conjugate_exponent() {
        let s = LpSphere::new(3.0).unwrap();
        let z = s.point(0.37, 0.2, 1.3);
        let inv = dual_invariants(&s, &z).unwrap();
        assert!((inv.b.unwrap().norm() - 1.0 / 3.0).abs() < 1e-10);
        let back = roundtrip(&s, &z).unwrap();
        assert!(back.distance(&z) < 1e-12);
    }

    #[test]
    fn polar_sphere_is_self_dual() {
        let s = UnitSphere::new(2).unwrap();
        let z = s.sample(&[0.3, 0.6, 0.1]).unwrap();
        let jet = jet2(&s, &z).unwrap();
        let (w, dj) = dual_jet(&z, &jet, DualChart::Polar).unwrap();
        assert!((&w.z + z.z.map(|x| x.conj())).norm() < 1e-14);
        let inv = point_invariants_from_jet(&dj).unwrap();
        assert!((inv.phi - 1.0).abs() < 1e-12);
        assert!((inv.fefferman_w - 1.0).abs() < 1e-12);
        assert!((dual_area_factor(&z, &jet, DualChart::Polar).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn monomial_count() {
        assert_eq!(monomials(3, 4).len(), 35);
    }
}
