//! Example hypersurface families. Every defining function is negative on
//! the pseudoconvex side.

use super::mesh::{gauss_legendre, QuadratureMesh};
use super::{AffinePoint, Expr, Jet2, MobiusMap, Scalar};
use crate::{c, CMat, CVec, Error, Result, RMat, C64};
use std::f64::consts::PI;
use std::fmt::Debug;
use std::sync::Arc;

/// A real hypersurface `{r = 0}` in an affine chart of ℂℙⁿ.
pub trait Hypersurface: Send + Sync + Debug {
    fn dim(&self) -> usize;

    fn label(&self) -> String;

    /// The defining function continued analytically to complex values of
    /// the interleaved real coordinates `(x₁, y₁, …, x_n, y_n)`.
    fn eval_complexified(&self, x: &[C64]) -> Result<C64>;

    fn value(&self, z: &AffinePoint) -> Result<f64> {
        let x: Vec<C64> = z.real_coords().into_iter().map(|v| c(v, 0.0)).collect();
        Ok(self.eval_complexified(&x)?.re)
    }

    /// Hand-coded jet, if the family has one.
    fn analytic_jet(&self, _z: &AffinePoint) -> Option<Result<Jet2>> {
        None
    }

    fn in_chart(&self, _z: &AffinePoint) -> Result<()> {
        Ok(())
    }

    /// Number of parameters taken by [`Hypersurface::sample`].
    fn sample_dim(&self) -> usize {
        2 * self.dim() - 1
    }

    /// Maps parameters in `[0,1]^k` to a point of the surface.
    fn sample(&self, u: &[f64]) -> Result<AffinePoint>;

    /// Quadrature mesh at the given resolution.
    fn mesh(&self, resolution: usize) -> Result<QuadratureMesh>;

    /// Closed-form Beltrami coefficient (n = 2), when known.
    fn closed_form_b(&self, _z: &AffinePoint) -> Option<C64> {
        None
    }
}

fn real_point<T: Scalar>(x: &[T]) -> Vec<T> {
    x.to_vec()
}

/// Rectangular parameter window for graph surfaces, one interval per real
/// parameter `(x₁, y₁, …, x_{n−1}, y_{n−1}, u)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChartWindow {
    pub ranges: Vec<(f64, f64)>,
}

impl ChartWindow {
    pub fn new(ranges: Vec<(f64, f64)>) -> Result<Self> {
        if ranges.iter().any(|(a, b)| !(a < b) || !a.is_finite() || !b.is_finite()) {
            return Err(Error::Config("chart window intervals must satisfy lo < hi".into()));
        }
        Ok(Self { ranges })
    }

    /// Default window for an n-dimensional graph: `z' ∈ [0.5,1.5]×[−0.5,0.5]`
    /// per coordinate and `u ∈ [−0.5, 0.5]`.
    pub fn default_for(n: usize) -> Self {
        let mut r = Vec::new();
        for _ in 0..n - 1 {
            r.push((0.5, 1.5));
            r.push((-0.5, 0.5));
        }
        r.push((-0.5, 0.5));
        Self { ranges: r }
    }

    fn at(&self, u: &[f64]) -> Vec<f64> {
        self.ranges.iter().zip(u).map(|(&(a, b), &t)| a + (b - a) * t.clamp(0.0, 1.0)).collect()
    }
}

/// Point `(z', u + iF)` of a graph surface `Im z_n = F(z', u)`.
fn graph_point(params: &[f64], height: f64) -> Result<AffinePoint> {
    let mut x = params.to_vec();
    x.push(height);
    Ok(AffinePoint::from_real_coords(&x))
}

/// Tensor Gauss–Legendre mesh over a graph window.
fn graph_mesh(surface: &dyn Hypersurface, window: &ChartWindow, resolution: usize, height: &dyn Fn(&[f64]) -> Result<f64>) -> Result<QuadratureMesh> {
    if resolution == 0 {
        return Err(Error::Mesh("resolution must be positive".into()));
    }
    let (t, w) = gauss_legendre(resolution);
    let d = window.ranges.len();
    let total = resolution.pow(d as u32);
    let mut nodes = Vec::with_capacity(total);
    let mut vol = Vec::with_capacity(total);
    for idx in 0..total {
        let mut rem = idx;
        let mut params = Vec::with_capacity(d);
        let mut wt = 1.0;
        for &(a, b) in &window.ranges {
            let i = rem % resolution;
            rem /= resolution;
            params.push(a + (b - a) * t[i]);
            wt *= (b - a) * w[i];
        }
        nodes.push(graph_point(&params, height(&params)?)?);
        vol.push(wt);
    }
    // dS = |∇r| / |∂r/∂v| dV = |∇r| dV for r = F − v
    QuadratureMesh::scattered(surface, nodes, |_, jet| jet.gradient_norm(), Some(vol))
}

// ---------------------------------------------------------------- spheres

/// The unit sphere `|z|² = 1` in ℂⁿ.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitSphere {
    pub n: usize,
}

impl UnitSphere {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Dimension("n ≥ 1 required".into()));
        }
        Ok(Self { n })
    }
}

impl Hypersurface for UnitSphere {
    fn dim(&self) -> usize {
        self.n
    }

    fn label(&self) -> String {
        format!("unit sphere in C^{}", self.n)
    }

    fn eval_complexified(&self, x: &[C64]) -> Result<C64> {
        Ok(x.iter().map(|v| v * v).sum::<C64>() - 1.0)
    }

    fn analytic_jet(&self, z: &AffinePoint) -> Option<Result<Jet2>> {
        let n = self.n;
        Some(Ok(Jet2 {
            r: z.z.norm_squared() - 1.0,
            grad: z.z.map(|w| w.conj()),
            hess_holo: CMat::zeros(n, n),
            hess_mixed: CMat::identity(n, n),
        }))
    }

    fn sample(&self, u: &[f64]) -> Result<AffinePoint> {
        match self.n {
            1 => Ok(AffinePoint::new(vec![C64::from_polar(1.0, 2.0 * PI * u[0])])?),
            2 => {
                let t = 0.02 + 0.96 * u[0];
                AffinePoint::new(vec![
                    C64::from_polar((1.0 - t).sqrt(), 2.0 * PI * u[1]),
                    C64::from_polar(t.sqrt(), 2.0 * PI * u[2]),
                ])
            }
            _ => {
                let mut v: Vec<f64> = u.iter().map(|t| 2.0 * t - 1.0).collect();
                v.push(0.5);
                let s = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                Ok(AffinePoint::from_real_coords(&v.iter().map(|x| x / s).collect::<Vec<_>>()))
            }
        }
    }

    fn mesh(&self, resolution: usize) -> Result<QuadratureMesh> {
        match self.n {
            1 => Ellipse::circle(1.0).mesh(resolution),
            2 => QuadratureMesh::torus(self, (resolution / 2).max(2), resolution, &|t| {
                ([(1.0 - t).sqrt(), t.sqrt()], [-0.5 / (1.0 - t).sqrt(), 0.5 / t.sqrt()])
            }),
            _ => Err(Error::Mesh("sphere meshes are available for n ≤ 2".into())),
        }
    }

    fn closed_form_b(&self, _z: &AffinePoint) -> Option<C64> {
        (self.n == 2).then_some(c(0.0, 0.0))
    }
}

/// `Σ⁽¹⁾_p`: the unit sphere of ℓᵖ on ℂ², `|z₁|ᵖ + |z₂|ᵖ = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct LpSphere {
    pub p: f64,
}

impl LpSphere {
    pub fn new(p: f64) -> Result<Self> {
        if !(p > 1.0) || !p.is_finite() {
            return Err(Error::Config(format!("ℓᵖ sphere needs p > 1, got {p}")));
        }
        Ok(Self { p })
    }

    fn r_generic<T: Scalar>(&self, x: &[T]) -> T {
        let h = self.p / 2.0;
        (x[0] * x[0] + x[1] * x[1]).powf(h) + (x[2] * x[2] + x[3] * x[3]).powf(h) - T::cst(1.0)
    }

    /// Point with profile parameter `t ∈ (0,1)` and angles.
    pub fn point(&self, t: f64, th1: f64, th2: f64) -> AffinePoint {
        AffinePoint {
            z: CVec::from_vec(vec![
                C64::from_polar((1.0 - t).powf(1.0 / self.p), th1),
                C64::from_polar(t.powf(1.0 / self.p), th2),
            ]),
        }
    }

    pub fn profile(&self, t: f64) -> ([f64; 2], [f64; 2]) {
        let q = 1.0 / self.p;
        let (r1, r2) = ((1.0 - t).powf(q), t.powf(q));
        ([r1, r2], [-q * r1 / (1.0 - t), q * r2 / t])
    }
}

/// `(f_w, f_ww, f_ww̄)` for `f = |w|^p`.
fn power_modulus_derivs(w: C64, p: f64) -> (C64, C64, f64) {
    let s = w.norm_sqr();
    let h = p / 2.0;
    let d1 = w.conj() * (h * s.powf(h - 1.0));
    let d2 = w.conj() * w.conj() * (h * (h - 1.0) * s.powf(h - 2.0));
    let dm = h * h * s.powf(h - 1.0);
    (d1, d2, dm)
}

impl Hypersurface for LpSphere {
    fn dim(&self) -> usize {
        2
    }

    fn label(&self) -> String {
        format!("l^{} sphere", self.p)
    }

    fn eval_complexified(&self, x: &[C64]) -> Result<C64> {
        Ok(self.r_generic(&real_point(x)))
    }

    fn in_chart(&self, z: &AffinePoint) -> Result<()> {
        if z.z.iter().any(|w| w.norm() < 1e-10) {
            return Err(Error::Chart("ℓᵖ sphere jets need z₁z₂ ≠ 0".into()));
        }
        Ok(())
    }

    fn analytic_jet(&self, z: &AffinePoint) -> Option<Result<Jet2>> {
        if let Err(e) = self.in_chart(z) {
            return Some(Err(e));
        }
        let (a1, a2, a3) = power_modulus_derivs(z.z[0], self.p);
        let (b1, b2, b3) = power_modulus_derivs(z.z[1], self.p);
        let r = z.z[0].norm().powf(self.p) + z.z[1].norm().powf(self.p) - 1.0;
        Some(Ok(Jet2 {
            r,
            grad: CVec::from_vec(vec![a1, b1]),
            hess_holo: CMat::from_diagonal(&CVec::from_vec(vec![a2, b2])),
            hess_mixed: CMat::from_diagonal(&CVec::from_vec(vec![c(a3, 0.0), c(b3, 0.0)])),
        }))
    }

    fn sample(&self, u: &[f64]) -> Result<AffinePoint> {
        Ok(self.point(0.02 + 0.96 * u[0], 2.0 * PI * u[1], 2.0 * PI * u[2]))
    }

    fn mesh(&self, resolution: usize) -> Result<QuadratureMesh> {
        QuadratureMesh::torus(self, (resolution / 2).max(2), resolution, &|t| self.profile(t))
    }

    fn closed_form_b(&self, z: &AffinePoint) -> Option<C64> {
        let (z1, z2) = (z.z[0], z.z[1]);
        if z1.norm() == 0.0 || z2.norm() == 0.0 {
            return None;
        }
        Some((z1.conj() * z2.conj()) / (z1 * z2) * ((2.0 - self.p) / self.p))
    }
}

// ----------------------------------------------------------------- graphs

/// `Σ⁽²⁾_γ`: `Im z₂ = |z₁|^γ`.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerGraph {
    pub gamma: f64,
    pub window: ChartWindow,
}

impl PowerGraph {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma > 1.0) || !gamma.is_finite() {
            return Err(Error::Config(format!("power graph needs γ > 1, got {gamma}")));
        }
        Ok(Self { gamma, window: ChartWindow::default_for(2) })
    }

    pub fn with_window(mut self, window: ChartWindow) -> Result<Self> {
        if window.ranges.len() != 3 {
            return Err(Error::Config("power graph window needs 3 intervals".into()));
        }
        self.window = window;
        Ok(self)
    }

    pub fn point(&self, z1: C64, u: f64) -> AffinePoint {
        AffinePoint { z: CVec::from_vec(vec![z1, c(u, z1.norm().powf(self.gamma))]) }
    }
}

impl Hypersurface for PowerGraph {
    fn dim(&self) -> usize {
        2
    }

    fn label(&self) -> String {
        format!("power graph gamma={}", self.gamma)
    }

    fn eval_complexified(&self, x: &[C64]) -> Result<C64> {
        Ok((x[0] * x[0] + x[1] * x[1]).powf(self.gamma / 2.0) - x[3])
    }

    fn in_chart(&self, z: &AffinePoint) -> Result<()> {
        if z.z[0].norm() < 1e-10 {
            return Err(Error::Chart("power graph jets need z₁ ≠ 0".into()));
        }
        Ok(())
    }

    fn analytic_jet(&self, z: &AffinePoint) -> Option<Result<Jet2>> {
        if let Err(e) = self.in_chart(z) {
            return Some(Err(e));
        }
        let (d1, d2, dm) = power_modulus_derivs(z.z[0], self.gamma);
        let mut hh = CMat::zeros(2, 2);
        hh[(0, 0)] = d2;
        let mut hm = CMat::zeros(2, 2);
        hm[(0, 0)] = c(dm, 0.0);
        Some(Ok(Jet2 {
            r: z.z[0].norm().powf(self.gamma) - z.z[1].im,
            grad: CVec::from_vec(vec![d1, c(0.0, 0.5)]),
            hess_holo: hh,
            hess_mixed: hm,
        }))
    }

    fn sample(&self, u: &[f64]) -> Result<AffinePoint> {
        let p = self.window.at(u);
        Ok(self.point(c(p[0], p[1]), p[2]))
    }

    fn mesh(&self, resolution: usize) -> Result<QuadratureMesh> {
        graph_mesh(self, &self.window, resolution, &|p| Ok(c(p[0], p[1]).norm().powf(self.gamma)))
    }

    fn closed_form_b(&self, z: &AffinePoint) -> Option<C64> {
        let z1 = z.z[0];
        (z1.norm() > 0.0).then(|| z1.conj() / z1 * ((self.gamma - 2.0) / self.gamma))
    }
}

/// `Σ⁽³⁾_{α,β}`: `Im z_n = Σ α_j |z_j|² + Re Σ β_j z_j²`.
#[derive(Clone, Debug, PartialEq)]
pub struct Quadric {
    pub alpha: Vec<f64>,
    pub beta: Vec<C64>,
    pub window: ChartWindow,
}

impl Quadric {
    pub fn new(alpha: Vec<f64>, beta: Vec<C64>) -> Result<Self> {
        if alpha.is_empty() || alpha.len() != beta.len() {
            return Err(Error::Config("quadric needs matching, non-empty α and β".into()));
        }
        let n = alpha.len() + 1;
        Ok(Self { alpha, beta, window: ChartWindow::default_for(n) })
    }

    /// The n = 2 member.
    pub fn planar(alpha: f64, beta: C64) -> Result<Self> {
        Self::new(vec![alpha], vec![beta])
    }

    pub fn with_window(mut self, window: ChartWindow) -> Result<Self> {
        if window.ranges.len() != 2 * self.alpha.len() + 1 {
            return Err(Error::Config("quadric window has the wrong number of intervals".into()));
        }
        self.window = window;
        Ok(self)
    }

    fn height(&self, zp: &[C64]) -> f64 {
        zp.iter()
            .enumerate()
            .map(|(j, w)| self.alpha[j] * w.norm_sqr() + (self.beta[j] * w * w).re)
            .sum()
    }

    pub fn point(&self, zp: &[C64], u: f64) -> AffinePoint {
        let mut z = zp.to_vec();
        z.push(c(u, self.height(zp)));
        AffinePoint { z: CVec::from_vec(z) }
    }
}

impl Hypersurface for Quadric {
    fn dim(&self) -> usize {
        self.alpha.len() + 1
    }

    fn label(&self) -> String {
        format!("quadric alpha={:?} beta={:?}", self.alpha, self.beta)
    }

    fn eval_complexified(&self, x: &[C64]) -> Result<C64> {
        let m = self.alpha.len();
        let mut s = -x[2 * m + 1];
        for j in 0..m {
            let (a, b) = (x[2 * j], x[2 * j + 1]);
            let (br, bi) = (self.beta[j].re, self.beta[j].im);
            // Re(β w²) = br (a² − b²) − 2 bi a b
            s += (a * a + b * b) * self.alpha[j] + (a * a - b * b) * br - a * b * (2.0 * bi);
        }
        Ok(s)
    }

    fn analytic_jet(&self, z: &AffinePoint) -> Option<Result<Jet2>> {
        let n = self.dim();
        let m = n - 1;
        let mut grad = CVec::zeros(n);
        let mut hh = CMat::zeros(n, n);
        let mut hm = CMat::zeros(n, n);
        for j in 0..m {
            grad[j] = z.z[j].conj() * self.alpha[j] + self.beta[j] * z.z[j];
            hh[(j, j)] = self.beta[j];
            hm[(j, j)] = c(self.alpha[j], 0.0);
        }
        grad[m] = c(0.0, 0.5);
        let zp: Vec<C64> = z.z.iter().take(m).cloned().collect();
        Some(Ok(Jet2 { r: self.height(&zp) - z.z[m].im, grad, hess_holo: hh, hess_mixed: hm }))
    }

    fn sample(&self, u: &[f64]) -> Result<AffinePoint> {
        let p = self.window.at(u);
        let m = self.alpha.len();
        let zp: Vec<C64> = (0..m).map(|j| c(p[2 * j], p[2 * j + 1])).collect();
        Ok(self.point(&zp, p[2 * m]))
    }

    fn mesh(&self, resolution: usize) -> Result<QuadratureMesh> {
        let m = self.alpha.len();
        graph_mesh(self, &self.window, resolution, &|p| {
            let zp: Vec<C64> = (0..m).map(|j| c(p[2 * j], p[2 * j + 1])).collect();
            Ok(self.height(&zp))
        })
    }

    fn closed_form_b(&self, _z: &AffinePoint) -> Option<C64> {
        (self.alpha.len() == 1).then(|| self.beta[0] / self.alpha[0])
    }
}

/// Tube over a convex profile: `Im z₂ = a₂ (Re z₁)² + a₄ (Re z₁)⁴`.
#[derive(Clone, Debug, PartialEq)]
pub struct Tube {
    pub a2: f64,
    pub a4: f64,
    pub window: ChartWindow,
}

impl Tube {
    pub fn new(a2: f64, a4: f64) -> Result<Self> {
        if !(a2 > 0.0) || a4 < 0.0 {
            return Err(Error::Config("tube profile needs a₂ > 0, a₄ ≥ 0".into()));
        }
        Ok(Self { a2, a4, window: ChartWindow::default_for(2) })
    }

    pub fn with_window(mut self, window: ChartWindow) -> Result<Self> {
        if window.ranges.len() != 3 {
            return Err(Error::Config("tube window needs 3 intervals".into()));
        }
        self.window = window;
        Ok(self)
    }

    fn profile(&self, x: f64) -> (f64, f64, f64) {
        (
            self.a2 * x * x + self.a4 * x.powi(4),
            2.0 * self.a2 * x + 4.0 * self.a4 * x.powi(3),
            2.0 * self.a2 + 12.0 * self.a4 * x * x,
        )
    }

    pub fn point(&self, z1: C64, u: f64) -> AffinePoint {
        AffinePoint { z: CVec::from_vec(vec![z1, c(u, self.profile(z1.re).0)]) }
    }
}

impl Hypersurface for Tube {
    fn dim(&self) -> usize {
        2
    }

    fn label(&self) -> String {
        format!("tube a2={} a4={}", self.a2, self.a4)
    }

    fn eval_complexified(&self, x: &[C64]) -> Result<C64> {
        let x1 = x[0];
        Ok(x1 * x1 * self.a2 + x1 * x1 * x1 * x1 * self.a4 - x[3])
    }

    fn analytic_jet(&self, z: &AffinePoint) -> Option<Result<Jet2>> {
        let (f, f1, f2) = self.profile(z.z[0].re);
        let mut hh = CMat::zeros(2, 2);
        hh[(0, 0)] = c(f2 / 4.0, 0.0);
        let mut hm = CMat::zeros(2, 2);
        hm[(0, 0)] = c(f2 / 4.0, 0.0);
        Some(Ok(Jet2 {
            r: f - z.z[1].im,
            grad: CVec::from_vec(vec![c(f1 / 2.0, 0.0), c(0.0, 0.5)]),
            hess_holo: hh,
            hess_mixed: hm,
        }))
    }

    fn sample(&self, u: &[f64]) -> Result<AffinePoint> {
        let p = self.window.at(u);
        Ok(self.point(c(p[0], p[1]), p[2]))
    }

    fn mesh(&self, resolution: usize) -> Result<QuadratureMesh> {
        graph_mesh(self, &self.window, resolution, &|p| Ok(self.profile(p[0]).0))
    }

    fn closed_form_b(&self, _z: &AffinePoint) -> Option<C64> {
        Some(c(1.0, 0.0))
    }
}

/// User-supplied graph `Im z_n = F(z', Re z_n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CustomGraph {
    pub n: usize,
    pub expr: Expr,
    pub window: ChartWindow,
}

impl CustomGraph {
    pub fn new(n: usize, source: &str) -> Result<Self> {
        if n < 2 {
            return Err(Error::Config("custom graphs need n ≥ 2".into()));
        }
        let expr = Expr::parse(source)?;
        if expr.max_variable() > n - 1 {
            return Err(Error::Config(format!("`{source}` uses z{} but n = {n}", expr.max_variable())));
        }
        Ok(Self { n, expr, window: ChartWindow::default_for(n) })
    }

    pub fn with_window(mut self, window: ChartWindow) -> Result<Self> {
        if window.ranges.len() != 2 * self.n - 1 {
            return Err(Error::Config("custom graph window has the wrong number of intervals".into()));
        }
        self.window = window;
        Ok(self)
    }

    pub fn height(&self, params: &[f64]) -> Result<f64> {
        let m = 2 * (self.n - 1);
        self.expr.eval_real(&params[..m], params[m])
    }
}

impl Hypersurface for CustomGraph {
    fn dim(&self) -> usize {
        self.n
    }

    fn label(&self) -> String {
        format!("graph Im z{} = {}", self.n, self.expr.source())
    }

    fn eval_complexified(&self, x: &[C64]) -> Result<C64> {
        let m = 2 * (self.n - 1);
        Ok(self.expr.eval_real(&x[..m], x[m])? - x[m + 1])
    }

    fn sample(&self, u: &[f64]) -> Result<AffinePoint> {
        let p = self.window.at(u);
        graph_point(&p, self.height(&p)?)
    }

    fn mesh(&self, resolution: usize) -> Result<QuadratureMesh> {
        graph_mesh(self, &self.window, resolution, &|p| self.height(p))
    }
}

// ------------------------------------------------------------------ curves

/// Rotated, translated ellipse in ℂ (n = 1), parametrized counterclockwise
/// by `z(s) = c + e^{iθ}(a cos s + i b sin s)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Ellipse {
    pub a: f64,
    pub b: f64,
    pub center: C64,
    pub angle: f64,
}

impl Ellipse {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0) {
            return Err(Error::Config("ellipse semi-axes must be positive".into()));
        }
        Ok(Self { a, b, center: c(0.0, 0.0), angle: 0.0 })
    }

    pub fn circle(radius: f64) -> Self {
        Self { a: radius, b: radius, center: c(0.0, 0.0), angle: 0.0 }
    }

    pub fn placed(mut self, center: C64, angle: f64) -> Self {
        self.center = center;
        self.angle = angle;
        self
    }

    pub fn at(&self, s: f64) -> C64 {
        self.center + C64::from_polar(1.0, self.angle) * c(self.a * s.cos(), self.b * s.sin())
    }

    pub fn derivative(&self, s: f64) -> C64 {
        C64::from_polar(1.0, self.angle) * c(-self.a * s.sin(), self.b * s.cos())
    }

    /// Perimeter by adaptive Simpson quadrature of `|z'(s)|`.
    pub fn perimeter_adaptive(&self, tol: f64) -> f64 {
        #[allow(clippy::too_many_arguments)]
        fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
            let m = 0.5 * (a + b);
            let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
            let (flm, frm) = (f(lm), f(rm));
            let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
                return left + right + (left + right - whole) / 15.0;
            }
            simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
                + simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
        let f = |s: f64| self.derivative(s).norm();
        let (a, b) = (0.0, 2.0 * PI);
        let (fa, fm, fb) = (f(a), f(PI), f(b));
        let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        simpson(&f, a, b, fa, fm, fb, whole, tol, 40)
    }

    fn local(&self, x: f64, y: f64) -> (f64, f64) {
        let (s, co) = self.angle.sin_cos();
        let (dx, dy) = (x - self.center.re, y - self.center.im);
        (co * dx + s * dy, -s * dx + co * dy)
    }
}

impl Hypersurface for Ellipse {
    fn dim(&self) -> usize {
        1
    }

    fn label(&self) -> String {
        format!("ellipse a={} b={}", self.a, self.b)
    }

    fn eval_complexified(&self, x: &[C64]) -> Result<C64> {
        let (s, co) = self.angle.sin_cos();
        let dx = x[0] - self.center.re;
        let dy = x[1] - self.center.im;
        let xx = dx * co + dy * s;
        let yy = -dx * s + dy * co;
        Ok(xx * xx / (self.a * self.a) + yy * yy / (self.b * self.b) - 1.0)
    }

    fn analytic_jet(&self, z: &AffinePoint) -> Option<Result<Jet2>> {
        let (xx, yy) = self.local(z.z[0].re, z.z[0].im);
        let (s, co) = self.angle.sin_cos();
        let rot = RMat::from_row_slice(2, 2, &[co, s, -s, co]);
        let d = RMat::from_diagonal(&nalgebra::DVector::from_vec(vec![
            1.0 / (self.a * self.a),
            1.0 / (self.b * self.b),
        ]));
        let loc = nalgebra::DVector::from_vec(vec![xx, yy]);
        let g = (rot.transpose() * &d * loc) * 2.0;
        let h = rot.transpose() * d * rot * 2.0;
        let r = xx * xx / (self.a * self.a) + yy * yy / (self.b * self.b) - 1.0;
        Some(Ok(Jet2::from_real(r, g.as_slice(), &h)))
    }

    fn sample_dim(&self) -> usize {
        1
    }

    fn sample(&self, u: &[f64]) -> Result<AffinePoint> {
        AffinePoint::new(vec![self.at(2.0 * PI * u[0])])
    }

    fn mesh(&self, resolution: usize) -> Result<QuadratureMesh> {
        if resolution < 4 {
            return Err(Error::Mesh("curve meshes need at least 4 nodes".into()));
        }
        let h = 2.0 * PI / resolution as f64;
        let s: Vec<f64> = (0..resolution).map(|k| k as f64 * h).collect();
        let nodes: Vec<C64> = s.iter().map(|&t| self.at(t)).collect();
        let der: Vec<C64> = s.iter().map(|&t| self.derivative(t)).collect();
        QuadratureMesh::curve(self, nodes, der, h, true)
    }
}

// ---------------------------------------------------------- Möbius images

/// The image `Ψ_M(S)` of a hypersurface under a Möbius map, with defining
/// function `r ∘ Ψ_M⁻¹`.
#[derive(Clone, Debug)]
pub struct MobiusImage {
    pub base: Arc<dyn Hypersurface>,
    pub map: MobiusMap,
    inverse: MobiusMap,
}

impl MobiusImage {
    pub fn new(base: Arc<dyn Hypersurface>, map: MobiusMap) -> Result<Self> {
        if base.dim() != map.dim() {
            return Err(Error::Dimension("Möbius map and surface dimensions differ".into()));
        }
        let inverse = map.inverse();
        Ok(Self { base, map, inverse })
    }

    pub fn preimage(&self, w: &AffinePoint) -> Result<AffinePoint> {
        self.inverse.apply(w)
    }
}

impl Hypersurface for MobiusImage {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn label(&self) -> String {
        format!("Mobius image of {}", self.base.label())
    }

    fn eval_complexified(&self, x: &[C64]) -> Result<C64> {
        // Holomorphic arithmetic on explicit (re, im) pairs so that the
        // complexification of the real coordinates stays independent of
        // the complex structure of the chart.
        let n = self.dim();
        let m = self.inverse.matrix();
        type P = (C64, C64);
        let mul = |a: P, k: C64| -> P { (a.0 * k.re - a.1 * k.im, a.0 * k.im + a.1 * k.re) };
        let act = |row: usize| -> P {
            let mut s: P = (c(m[(row, 0)].re, 0.0), c(m[(row, 0)].im, 0.0));
            for k in 0..n {
                let t = mul((x[2 * k], x[2 * k + 1]), m[(row, k + 1)]);
                s = (s.0 + t.0, s.1 + t.1);
            }
            s
        };
        let d = act(0);
        let dn = d.0 * d.0 + d.1 * d.1;
        if dn.norm() < 1e-28 {
            return Err(Error::AtInfinity);
        }
        let mut y = Vec::with_capacity(2 * n);
        for j in 0..n {
            let a = act(j + 1);
            y.push((a.0 * d.0 + a.1 * d.1) / dn);
            y.push((a.1 * d.0 - a.0 * d.1) / dn);
        }
        self.base.eval_complexified(&y)
    }

    fn in_chart(&self, z: &AffinePoint) -> Result<()> {
        self.base.in_chart(&self.preimage(z)?)
    }

    fn analytic_jet(&self, z: &AffinePoint) -> Option<Result<Jet2>> {
        let pre = match self.preimage(z) {
            Ok(p) => p,
            Err(e) => return Some(Err(e)),
        };
        let base_jet = self.base.analytic_jet(&pre)?;
        Some(base_jet.and_then(|j| Ok(self.map.push_jet(&j, &pre)?.1)))
    }

    fn sample_dim(&self) -> usize {
        self.base.sample_dim()
    }

    fn sample(&self, u: &[f64]) -> Result<AffinePoint> {
        self.map.apply(&self.base.sample(u)?)
    }

    fn mesh(&self, resolution: usize) -> Result<QuadratureMesh> {
        self.base.mesh(resolution)?.mobius_image(&self.map)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{jet2, numeric_jet};

    #[test]
    fn sphere_jet_example() {
        let s = UnitSphere::new(2).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let z = AffinePoint::new(vec![c(r, 0.0), c(r, 0.0)]).unwrap();
        let j = jet2(&s, &z).unwrap();
        assert!((j.grad[0] - c(r, 0.0)).norm() < 1e-15);
        assert!((&j.hess_mixed - CMat::identity(2, 2)).norm() < 1e-15);
        assert!(j.hess_holo.norm() < 1e-15);
    }

    #[test]
    fn ellipse_numeric_jet_agrees() {
        let e = Ellipse::new(1.3, 0.6).unwrap().placed(c(0.2, -0.1), 0.4);
        let z = e.sample(&[0.3]).unwrap();
        let a = jet2(&e, &z).unwrap();
        let n = numeric_jet(&e, &z).unwrap();
        assert!(a.max_difference(&n) < 1e-8);
        assert!(a.r.abs() < 1e-14);
    }

    #[test]
    fn mobius_image_numeric_matches_pushforward() {
        let base: Arc<dyn Hypersurface> = Arc::new(LpSphere::new(3.0).unwrap());
        let m = MobiusMap::normalized(CMat::from_row_slice(3, 3, &[
            c(1.0, 0.0), c(0.1, 0.05), c(0.0, 0.1),
            c(0.05, 0.0), c(1.0, 0.1), c(0.0, 0.0),
            c(0.0, -0.05), c(0.1, 0.0), c(0.9, 0.0),
        ]))
        .unwrap();
        let img = MobiusImage::new(base.clone(), m.clone()).unwrap();
        let w = img.sample(&[0.4, 0.2, 0.7]).unwrap();
        let a = jet2(&img, &w).unwrap();
        let n = numeric_jet(&img, &w).unwrap();
        assert!(a.max_difference(&n) < 1e-7, "{}", a.max_difference(&n));
        assert!(a.r.abs() < 1e-13);
    }
}
