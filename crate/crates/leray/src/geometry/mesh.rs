use super::{jet2, AffinePoint, Hypersurface, Jet2, MobiusMap};
use crate::invariants::{point_invariants_from_jet, PointInvariants};
use crate::{Error, Result, RMat, C64};
use std::sync::OnceLock;

/// Gauss–Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut t = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, t);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * t * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
                p1 = t;
            }
            dp = n as f64 * (t * p1 - p0) / (t * t - 1.0);
            let dt = p1 / dp;
            t -= dt;
            if dt.abs() < 1e-16 {
                break;
            }
        }
        x[n - 1 - i] = 0.5 * (1.0 + t);
        w[n - 1 - i] = 1.0 / ((1.0 - t * t) * dp * dp);
    }
    (x, w)
}

/// Curve data for n = 1 meshes: uniform periodic parameter with step `step`.
#[derive(Clone, Debug, PartialEq)]
pub struct CurveData {
    /// `dz/ds` at each node.
    pub derivative: Vec<C64>,
    pub step: f64,
    /// Whether the Hardy side lies to the left of the parametrization.
    pub hardy_left: bool,
}

/// Structured Reinhardt (n = 2) mesh:
/// `z = (ρ₁(t_a) e^{iφ₁}, ρ₂(t_a) e^{iφ₂})` with `φ_j = θ_j + σ_j 2π b_j / M`.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusLayout {
    pub radial: usize,
    pub angular: usize,
    pub rho: Vec<[f64; 2]>,
    pub theta: [f64; 2],
    pub sigma: [f64; 2],
}

impl TorusLayout {
    pub fn index(&self, a: usize, b1: usize, b2: usize) -> usize {
        (a * self.angular + b1) * self.angular + b2
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum MeshLayout {
    Curve(CurveData),
    Torus(TorusLayout),
    Scattered,
}

/// Surface samples with euclidean area weights, unit normals and jets.
#[derive(Clone, Debug)]
pub struct QuadratureMesh {
    pub nodes: Vec<AffinePoint>,
    pub weights: Vec<f64>,
    pub normals: Vec<Vec<f64>>,
    pub jets: Vec<Jet2>,
    pub layout: MeshLayout,
    cache: OnceLock<Result<Vec<PointInvariants>>>,
}

impl QuadratureMesh {
    /// Assembles a mesh, validating weights and jets.
    pub fn from_parts(nodes: Vec<AffinePoint>, weights: Vec<f64>, jets: Vec<Jet2>, layout: MeshLayout) -> Result<Self> {
        if nodes.is_empty() || nodes.len() != weights.len() || nodes.len() != jets.len() {
            return Err(Error::Mesh("nodes, weights and jets must have equal, non-zero length".into()));
        }
        if let Some(w) = weights.iter().find(|w| !(**w > 0.0) || !w.is_finite()) {
            return Err(Error::Mesh(format!("non-positive quadrature weight {w}")));
        }
        if jets.iter().any(|j| j.grad.norm() < 1e-14) {
            return Err(Error::Degenerate("vanishing gradient at a mesh node".into()));
        }
        let normals = jets.iter().map(|j| j.unit_normal()).collect();
        Ok(Self { nodes, weights, normals, jets, layout, cache: OnceLock::new() })
    }

    /// Closed curve mesh from nodes and parameter derivatives.
    pub fn curve(surface: &dyn Hypersurface, nodes: Vec<C64>, derivative: Vec<C64>, step: f64, hardy_left: bool) -> Result<Self> {
        let pts: Vec<AffinePoint> = nodes.iter().map(|&z| AffinePoint::new(vec![z])).collect::<Result<_>>()?;
        let jets = pts.iter().map(|p| jet2(surface, p)).collect::<Result<Vec<_>>>()?;
        let weights: Vec<f64> = derivative.iter().map(|d| d.norm() * step).collect();
        if weights.iter().any(|w| *w < 1e-300) {
            return Err(Error::Degenerate("parametrization derivative vanishes".into()));
        }
        Self::from_parts(pts, weights, jets, MeshLayout::Curve(CurveData { derivative, step, hardy_left }))
    }

    /// Reinhardt torus mesh for n = 2, with `profile(t) = (ρ, ρ')`.
    pub fn torus(surface: &dyn Hypersurface, radial: usize, angular: usize, profile: &dyn Fn(f64) -> ([f64; 2], [f64; 2])) -> Result<Self> {
        if surface.dim() != 2 || angular < 2 || radial == 0 {
            return Err(Error::Mesh("torus meshes need n = 2, M ≥ 2, K ≥ 1".into()));
        }
        let (t, wt) = gauss_legendre(radial);
        let dphi = 2.0 * std::f64::consts::PI / angular as f64;
        let mut nodes = Vec::with_capacity(radial * angular * angular);
        let mut weights = Vec::with_capacity(nodes.capacity());
        let mut rhos = Vec::with_capacity(radial);
        for a in 0..radial {
            let (rho, drho) = profile(t[a]);
            let jac = rho[0] * rho[1] * (drho[0] * drho[0] + drho[1] * drho[1]).sqrt();
            if !(jac > 0.0) {
                return Err(Error::Degenerate("torus parametrization Jacobian vanishes".into()));
            }
            rhos.push(rho);
            for b1 in 0..angular {
                for b2 in 0..angular {
                    nodes.push(AffinePoint::new(vec![
                        C64::from_polar(rho[0], b1 as f64 * dphi),
                        C64::from_polar(rho[1], b2 as f64 * dphi),
                    ])?);
                    weights.push(jac * wt[a] * dphi * dphi);
                }
            }
        }
        let jets = nodes.iter().map(|p| jet2(surface, p)).collect::<Result<Vec<_>>>()?;
        let layout = TorusLayout { radial, angular, rho: rhos, theta: [0.0; 2], sigma: [1.0; 2] };
        Self::from_parts(nodes, weights, jets, MeshLayout::Torus(layout))
    }

    /// Unstructured mesh; `density(node, jet)` multiplies the optional
    /// parameter-space weights.
    pub fn scattered(surface: &dyn Hypersurface, nodes: Vec<AffinePoint>, density: impl Fn(&AffinePoint, &Jet2) -> f64, param_weights: Option<Vec<f64>>) -> Result<Self> {
        let jets = nodes.iter().map(|p| jet2(surface, p)).collect::<Result<Vec<_>>>()?;
        let base = param_weights.unwrap_or_else(|| vec![1.0; nodes.len()]);
        let weights = nodes.iter().zip(&jets).zip(&base).map(|((p, j), w)| w * density(p, j)).collect();
        Self::from_parts(nodes, weights, jets, MeshLayout::Scattered)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.nodes[0].dim()
    }

    pub fn area(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn curve_data(&self) -> Option<&CurveData> {
        match &self.layout {
            MeshLayout::Curve(c) => Some(c),
            _ => None,
        }
    }

    pub fn torus_layout(&self) -> Option<&TorusLayout> {
        match &self.layout {
            MeshLayout::Torus(t) => Some(t),
            _ => None,
        }
    }

    /// Pointwise invariants at every node, computed once.
    pub fn invariants(&self) -> Result<&[PointInvariants]> {
        self.cache
            .get_or_init(|| self.jets.iter().map(point_invariants_from_jet).collect())
            .as_ref()
            .map(|v| v.as_slice())
            .map_err(|e| e.clone())
    }

    /// Image of the mesh under a Möbius map; jets are pushed forward and
    /// weights rescaled by the area Jacobian.
    pub fn mobius_image(&self, map: &MobiusMap) -> Result<Self> {
        let mut nodes = Vec::with_capacity(self.len());
        let mut jets = Vec::with_capacity(self.len());
        let mut weights = Vec::with_capacity(self.len());
        let mut derivs = Vec::new();
        for (i, z) in self.nodes.iter().enumerate() {
            let (w, jet) = map.push_jet(&self.jets[i], z)?;
            let jac = map.jacobian(z)?;
            weights.push(self.weights[i] * area_factor(&jac, &self.normals[i]));
            if let MeshLayout::Curve(cd) = &self.layout {
                derivs.push(jac[(0, 0)] * cd.derivative[i]);
            }
            nodes.push(w);
            jets.push(jet);
        }
        let layout = match &self.layout {
            MeshLayout::Curve(cd) => {
                // keep the weights consistent with |w'| h exactly
                for (w, d) in weights.iter_mut().zip(&derivs) {
                    *w = d.norm() * cd.step;
                }
                MeshLayout::Curve(CurveData { derivative: derivs, step: cd.step, hardy_left: cd.hardy_left })
            }
            _ => MeshLayout::Scattered,
        };
        Self::from_parts(nodes, weights, jets, layout)
    }
}

/// Real representation of a complex linear map on interleaved coordinates.
pub fn realify(m: &crate::CMat) -> RMat {
    let (r, k) = m.shape();
    let mut out = RMat::zeros(2 * r, 2 * k);
    for i in 0..r {
        for j in 0..k {
            let z = m[(i, j)];
            out[(2 * i, 2 * j)] = z.re;
            out[(2 * i, 2 * j + 1)] = -z.im;
            out[(2 * i + 1, 2 * j)] = z.im;
            out[(2 * i + 1, 2 * j + 1)] = z.re;
        }
    }
    out
}

/// Orthonormal basis (columns) of the real orthogonal complement of `normal`.
pub fn tangent_basis(normal: &[f64]) -> RMat {
    let m = normal.len();
    let nv = nalgebra::DVector::from_column_slice(normal);
    let mut cols: Vec<nalgebra::DVector<f64>> = Vec::new();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| normal[a].abs().partial_cmp(&normal[b].abs()).unwrap());
    for &a in &order {
        if cols.len() == m - 1 {
            break;
        }
        let mut u = nalgebra::DVector::<f64>::zeros(m);
        u[a] = 1.0;
        for _ in 0..2 {
            u -= &nv * nv.dot(&u);
            for q in &cols {
                u -= q * q.dot(&u);
            }
        }
        let nu = u.norm();
        if nu > 1e-8 {
            cols.push(u / nu);
        }
    }
    RMat::from_columns(&cols)
}

/// Ratio of image to source surface measure under a holomorphic map with
/// Jacobian `jac`, at a point with unit normal `normal`.
pub fn area_factor(jac: &crate::CMat, normal: &[f64]) -> f64 {
    let t = tangent_basis(normal);
    let jt = realify(jac) * t;
    (jt.transpose() * jt).determinant().abs().sqrt()
}
