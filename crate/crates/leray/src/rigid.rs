//! Rigid hypersurfaces `Im z₂ = f(z₁)` in ℂ²: the compatibility condition a
//! Beltrami coefficient `λ(z₁)` must satisfy to be realized by such a
//! surface, and the reconstruction of `f` from an admissible `λ`.
//!
//! Everything lives on a uniform rectangular grid in the `z₁`-plane. First
//! and second derivatives use centered stencils in the interior and
//! second-order one-sided stencils on the boundary, so every field is
//! defined at every node with `O(h²)` truncation error.

use crate::geometry::{Expr, Jet2};
use crate::invariants::beltrami_b_from_jet;
use crate::{c, CMat, CVec, Error, Result, C64};
use nalgebra_sparse::factorization::CscCholesky;
use nalgebra_sparse::{CooMatrix, CscMatrix};

/// Uniform grid `x = x0 + i·h`, `y = y0 + j·h`, `0 ≤ i < nx`, `0 ≤ j < ny`.
/// Node `(i, j)` is stored at index `j·nx + i`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RectGrid {
    pub x0: f64,
    pub y0: f64,
    pub h: f64,
    pub nx: usize,
    pub ny: usize,
}

impl RectGrid {
    pub fn new(x0: f64, y0: f64, h: f64, nx: usize, ny: usize) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::Config(format!("grid spacing must be positive, got {h}")));
        }
        if nx < 5 || ny < 5 {
            return Err(Error::Config(format!("grid needs at least 5×5 nodes, got {nx}×{ny}")));
        }
        Ok(Self { x0, y0, h, nx, ny })
    }

    /// Grid covering `[x_min, x_max] × [y_min, y_max]` with `cells` cells
    /// along the shorter side.
    pub fn covering(x_min: f64, x_max: f64, y_min: f64, y_max: f64, cells: usize) -> Result<Self> {
        let (w, t) = (x_max - x_min, y_max - y_min);
        if !(w > 0.0 && t > 0.0) {
            return Err(Error::Config("empty grid rectangle".into()));
        }
        let h = w.min(t) / cells.max(1) as f64;
        let nx = (w / h).round() as usize + 1;
        let ny = (t / h).round() as usize + 1;
        Self::new(x_min, y_min, h, nx, ny)
    }

    /// The same rectangle with the spacing divided by `factor`.
    pub fn refined(&self, factor: usize) -> Self {
        Self {
            h: self.h / factor as f64,
            nx: (self.nx - 1) * factor + 1,
            ny: (self.ny - 1) * factor + 1,
            ..*self
        }
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn node(&self, i: usize, j: usize) -> C64 {
        c(self.x0 + i as f64 * self.h, self.y0 + j as f64 * self.h)
    }

    pub fn nodes(&self) -> Vec<C64> {
        (0..self.ny).flat_map(|j| (0..self.nx).map(move |i| (i, j))).map(|(i, j)| self.node(i, j)).collect()
    }

    fn is_interior(&self, i: usize, j: usize) -> bool {
        i > 0 && j > 0 && i + 1 < self.nx && j + 1 < self.ny
    }

    /// The grid without its boundary ring.
    pub fn inner(&self) -> RectGrid {
        RectGrid { x0: self.x0 + self.h, y0: self.y0 + self.h, nx: self.nx - 2, ny: self.ny - 2, ..*self }
    }

    /// Grid of cell centres.
    fn cell_centres(&self) -> RectGrid {
        RectGrid { x0: self.x0 + 0.5 * self.h, y0: self.y0 + 0.5 * self.h, nx: self.nx - 1, ny: self.ny - 1, ..*self }
    }
}

/// A real or complex field sampled on a grid.
#[derive(Clone, Debug)]
pub struct GridField<T> {
    pub grid: RectGrid,
    pub values: Vec<T>,
}

impl GridField<f64> {
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest magnitude over nodes at least `margin` (a fraction of the
    /// shorter side) away from the boundary.
    pub fn max_abs_inside(&self, margin: f64) -> f64 {
        let g = &self.grid;
        let k = ((margin * (g.nx.min(g.ny) - 1) as f64).ceil() as usize).min(g.nx.min(g.ny) / 2);
        let mut m: f64 = 0.0;
        for j in k..g.ny - k {
            for i in k..g.nx - k {
                m = m.max(self.values[g.index(i, j)].abs());
            }
        }
        m
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }
}

/// Beltrami coefficient `λ` sampled on a grid.
#[derive(Clone, Debug)]
pub struct LambdaField {
    pub grid: RectGrid,
    pub values: Vec<C64>,
}

impl LambdaField {
    /// Wraps samples, rejecting non-finite values (holes would make the
    /// domain non-simply-connected) and `|λ| ≥ 1`.
    pub fn new(grid: RectGrid, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Dimension(format!("{} λ samples for {} grid nodes", values.len(), grid.len())));
        }
        if let Some(k) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::Degenerate(format!(
                "λ undefined at {}; the grid domain must be simply connected",
                grid.nodes()[k]
            )));
        }
        let top = values.iter().fold(0.0f64, |m, v| m.max(v.norm()));
        if top >= 1.0 - 1e-9 {
            return Err(Error::Degenerate(format!("|λ| reaches {top}; need |λ| < 1 on the grid")));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: RectGrid, f: impl Fn(C64) -> C64) -> Result<Self> {
        let values = grid.nodes().iter().map(|&z| f(z)).collect();
        Self::new(grid, values)
    }

    /// Samples an expression in the variable `z1` (use `conj(z1)` for `z̄₁`).
    pub fn from_expr(grid: RectGrid, expr: &Expr) -> Result<Self> {
        if expr.max_variable() > 1 {
            return Err(Error::Config(format!("λ may only depend on z1, got `{}`", expr.source())));
        }
        let values = grid
            .nodes()
            .iter()
            .map(|z| expr.eval_complex(&[z.re, z.im], 0.0).map(|(re, im)| c(re, im)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(grid, values)
    }

    pub fn constant(grid: RectGrid, value: C64) -> Result<Self> {
        Self::new(grid, vec![value; grid.len()])
    }

    pub fn max_modulus(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }
}

// ---------------------------------------------------------------------------
// Stencils

fn d1(v: &[C64], g: &RectGrid, along_x: bool) -> Vec<C64> {
    let (n, step) = if along_x { (g.nx, 1) } else { (g.ny, g.nx) };
    let inv = 1.0 / g.h;
    (0..g.len())
        .map(|k| {
            let p = if along_x { k % g.nx } else { k / g.nx };
            let at = |o: isize| v[(k as isize + o * step as isize) as usize];
            if p == 0 {
                ((at(1) - at(0)) * 4.0 - (at(2) - at(0))) * (0.5 * inv)
            } else if p + 1 == n {
                ((at(0) - at(-1)) * 4.0 - (at(0) - at(-2))) * (0.5 * inv)
            } else {
                (at(1) - at(-1)) * (0.5 * inv)
            }
        })
        .collect()
}

fn d2(v: &[C64], g: &RectGrid, along_x: bool) -> Vec<C64> {
    let (n, step) = if along_x { (g.nx, 1) } else { (g.ny, g.nx) };
    let inv = 1.0 / (g.h * g.h);
    (0..g.len())
        .map(|k| {
            let p = if along_x { k % g.nx } else { k / g.nx };
            let at = |o: isize| v[(k as isize + o * step as isize) as usize];
            if p == 0 {
                ((at(0) - at(1)) * 2.0 - (at(1) - at(2)) * 3.0 + (at(2) - at(3))) * inv
            } else if p + 1 == n {
                ((at(0) - at(-1)) * 2.0 - (at(-1) - at(-2)) * 3.0 + (at(-2) - at(-3))) * inv
            } else {
                ((at(1) - at(0)) - (at(0) - at(-1))) * inv
            }
        })
        .collect()
}

/// Wirtinger derivatives of a sampled function.
struct Wirtinger {
    z: Vec<C64>,
    zb: Vec<C64>,
    zz: Vec<C64>,
    zzb: Vec<C64>,
    zbzb: Vec<C64>,
}

fn wirtinger(v: &[C64], g: &RectGrid) -> Wirtinger {
    let vx = d1(v, g, true);
    let vy = d1(v, g, false);
    let vxx = d2(v, g, true);
    let vyy = d2(v, g, false);
    let vxy = d1(&vx, g, false);
    let i = c(0.0, 1.0);
    let n = g.len();
    let mut w = Wirtinger {
        z: Vec::with_capacity(n),
        zb: Vec::with_capacity(n),
        zz: Vec::with_capacity(n),
        zzb: Vec::with_capacity(n),
        zbzb: Vec::with_capacity(n),
    };
    for k in 0..n {
        w.z.push((vx[k] - i * vy[k]) * 0.5);
        w.zb.push((vx[k] + i * vy[k]) * 0.5);
        w.zz.push((vxx[k] - vyy[k] - i * vxy[k] * 2.0) * 0.25);
        w.zzb.push((vxx[k] + vyy[k]) * 0.25);
        w.zbzb.push((vxx[k] - vyy[k] + i * vxy[k] * 2.0) * 0.25);
    }
    w
}

/// `h_z = (λ_z̄ + λ λ̄_z)/(1 − |λ|²)` at every node.
fn log_density_gradient(lambda: &LambdaField) -> Vec<C64> {
    let w = wirtinger(&lambda.values, &lambda.grid);
    lambda
        .values
        .iter()
        .enumerate()
        .map(|(k, &l)| (w.zb[k] + l * w.zb[k].conj()) / (1.0 - l.norm_sqr()))
        .collect()
}

// ---------------------------------------------------------------------------
// Compatibility condition

/// Pointwise residual of the rigidity condition
/// `Im(λ_z̄z̄ − λ̄λ_zz̄ + (λ̄λ_z̄² + λλ_z̄λ̄_z̄ − λ̄²λ_zλ_z̄)/(1 − |λ|²))`.
pub fn rigid_residual(lambda: &LambdaField) -> GridField<f64> {
    let w = wirtinger(&lambda.values, &lambda.grid);
    let values = lambda
        .values
        .iter()
        .enumerate()
        .map(|(k, &l)| {
            let lb = l.conj();
            // λ̄_z̄ is the conjugate of λ_z
            let lb_zb = w.z[k].conj();
            let quad = lb * w.zb[k] * w.zb[k] + l * w.zb[k] * lb_zb - lb * lb * w.z[k] * w.zb[k];
            (w.zbzb[k] - lb * w.zzb[k] + quad / (1.0 - l.norm_sqr())).im
        })
        .collect();
    GridField { grid: lambda.grid, values }
}

/// Curl of the real 1-form `h_z dz + h_z̄ dz̄` per grid cell (circulation
/// around the cell divided by its area), on the grid of centres of cells
/// clear of the boundary ring.
/// Vanishes exactly when the form is closed; pointwise it equals
/// `−4·residual/(1 − |λ|²)`.
pub fn closedness_field(lambda: &LambdaField) -> GridField<f64> {
    let g = lambda.grid;
    let p = log_density_gradient(lambda);
    // h_x = 2 Re P, h_y = −2 Im P
    let a: Vec<f64> = p.iter().map(|q| 2.0 * q.re).collect();
    let b: Vec<f64> = p.iter().map(|q| -2.0 * q.im).collect();
    let centres = g.inner().cell_centres();
    let values = (0..centres.len())
        .map(|k| {
            let (i, j) = (k % centres.nx + 1, k / centres.nx + 1);
            let (k00, k10, k01, k11) = (g.index(i, j), g.index(i + 1, j), g.index(i, j + 1), g.index(i + 1, j + 1));
            let circ = 0.5 * (a[k00] + a[k10]) + 0.5 * (b[k10] + b[k11]) - 0.5 * (a[k01] + a[k11]) - 0.5 * (b[k00] + b[k01]);
            circ / g.h
        })
        .collect();
    GridField { grid: centres, values }
}

/// Largest cell curl of the form `h_z dz + conj`.
pub fn closedness_check(lambda: &LambdaField) -> f64 {
    closedness_field(lambda).max_abs()
}

// ---------------------------------------------------------------------------
// Reconstruction

#[derive(Clone, Copy, Debug)]
pub struct ReconstructOptions {
    /// Largest accepted |rigidity residual| on the grid.
    pub residual_tol: f64,
    /// Largest accepted `|∂̄F| / max|F|` for the field integrated into `H`,
    /// measured away from the corners.
    pub holomorphy_tol: f64,
}

impl Default for ReconstructOptions {
    fn default() -> Self {
        Self { residual_tol: 1e-2, holomorphy_tol: 1e-2 }
    }
}

/// A rigid hypersurface `Im z₂ = f(z₁)` reconstructed on the interior nodes
/// of the input grid, with the
/// intermediate fields: `h = log f_zz̄`, the Poisson solution `g` with
/// `g_zz̄ = e^h`, and the holomorphic correction `H` with `f = g + 2 Re H`.
#[derive(Clone, Debug)]
pub struct RigidSurfaceField {
    pub grid: RectGrid,
    pub f: Vec<f64>,
    pub h_log: Vec<f64>,
    pub g: Vec<f64>,
    pub holo: Vec<C64>,
    /// Largest rigidity residual of the input.
    pub residual: f64,
    /// Relative ∂̄ defect of `λe^h − g_zz` before integration.
    pub holomorphy_defect: f64,
}

/// Reconstructs `f` from an admissible `λ` with default tolerances.
pub fn rigid_reconstruct(lambda: &LambdaField) -> Result<RigidSurfaceField> {
    rigid_reconstruct_with(lambda, ReconstructOptions::default())
}

pub fn rigid_reconstruct_with(lambda: &LambdaField, opts: ReconstructOptions) -> Result<RigidSurfaceField> {
    let g = lambda.grid;
    let residual = rigid_residual(lambda).max_abs();
    if !(residual <= opts.residual_tol) {
        return Err(Error::Numerical(format!(
            "λ is not admissible: rigidity residual {residual:.3e} exceeds {:.1e}",
            opts.residual_tol
        )));
    }
    let p = log_density_gradient(lambda);
    // dh = 2 Re(h_z dz)
    let dh: Vec<C64> = p.iter().map(|q| q * 2.0).collect();
    let h_log: Vec<f64> = integrate_dz(&dh, &g).iter().map(|v| v.re).collect();
    let rhs: Vec<f64> = h_log.iter().map(|v| 4.0 * v.exp()).collect();
    let gsol = solve_levi_potential(&rhs, &g)?;

    let gc: Vec<C64> = gsol.iter().map(|&v| c(v, 0.0)).collect();
    let wg = wirtinger(&gc, &g);
    // One-sided stencils on the boundary ring are accurate but not smooth
    // from node to node, which the ∂̄-check and the antiderivatives would
    // amplify; the surface is therefore built on the interior nodes.
    let inner = g.inner();
    let outer_index = |k: usize| g.index(k % inner.nx + 1, k / inner.nx + 1);
    let field: Vec<C64> = (0..inner.len())
        .map(|k| {
            let o = outer_index(k);
            lambda.values[o] * h_log[o].exp() - wg.zz[o]
        })
        .collect();
    let holomorphy_defect = relative_dbar(&field, &inner);
    if !(holomorphy_defect <= opts.holomorphy_tol) {
        return Err(Error::Numerical(format!(
            "holomorphic correction field has relative ∂̄ defect {holomorphy_defect:.3e}"
        )));
    }
    let first = integrate_dz(&field, &inner);
    let holo = integrate_dz(&first, &inner);
    let g_in: Vec<f64> = (0..inner.len()).map(|k| gsol[outer_index(k)]).collect();
    let h_in: Vec<f64> = (0..inner.len()).map(|k| h_log[outer_index(k)]).collect();
    let f: Vec<f64> = (0..inner.len()).map(|k| g_in[k] + 2.0 * holo[k].re).collect();
    Ok(RigidSurfaceField { grid: inner, f, h_log: h_in, g: g_in, holo, residual, holomorphy_defect })
}

/// `max |∂̄F| / max |F|` over nodes a fifth of the way in from the boundary,
/// where the corner behaviour of the zero-Dirichlet solve does not enter.
fn relative_dbar(field: &[C64], g: &RectGrid) -> f64 {
    let w = wirtinger(field, g);
    let scale = field.iter().fold(0.0f64, |m, v| m.max(v.norm())).max(1.0);
    let dbar = GridField { grid: *g, values: w.zb.iter().map(|v| v.norm()).collect() };
    dbar.max_abs_inside(0.2) / scale
}

/// Complex antiderivative `∫ F dz` from the centre node: trapezoid rule
/// along the centre row, then along every column.
fn integrate_dz(field: &[C64], g: &RectGrid) -> Vec<C64> {
    let (ic, jc) = (g.nx / 2, g.ny / 2);
    let dx = c(g.h, 0.0);
    let dy = c(0.0, g.h);
    let mut out = vec![c(0.0, 0.0); g.len()];
    for i in ic + 1..g.nx {
        let (a, b) = (g.index(i - 1, jc), g.index(i, jc));
        out[b] = out[a] + (field[a] + field[b]) * 0.5 * dx;
    }
    for i in (0..ic).rev() {
        let (a, b) = (g.index(i + 1, jc), g.index(i, jc));
        out[b] = out[a] - (field[a] + field[b]) * 0.5 * dx;
    }
    for i in 0..g.nx {
        for j in jc + 1..g.ny {
            let (a, b) = (g.index(i, j - 1), g.index(i, j));
            out[b] = out[a] + (field[a] + field[b]) * 0.5 * dy;
        }
        for j in (0..jc).rev() {
            let (a, b) = (g.index(i, j + 1), g.index(i, j));
            out[b] = out[a] - (field[a] + field[b]) * 0.5 * dy;
        }
    }
    out
}

/// Solves `Δg = rhs` as `g = φ + u`, where `φ` is an explicit polynomial
/// whose Laplacian is the bilinear interpolant of `rhs` through the four
/// corners and `u` vanishes on the boundary. Matching at the corners
/// removes the `r² log r` corner singularities a plain zero-Dirichlet
/// solve would have, keeping second derivatives of `g` bounded.
fn solve_levi_potential(rhs: &[f64], g: &RectGrid) -> Result<Vec<f64>> {
    let (w, t) = ((g.nx - 1) as f64 * g.h, (g.ny - 1) as f64 * g.h);
    let corner = |i: usize, j: usize| rhs[g.index(i, j)];
    let (v00, v10, v01, v11) = (corner(0, 0), corner(g.nx - 1, 0), corner(0, g.ny - 1), corner(g.nx - 1, g.ny - 1));
    let a = 0.25 * (v00 + v10 + v01 + v11);
    let b = ((v10 + v11) - (v00 + v01)) / (2.0 * w);
    let cy = ((v01 + v11) - (v00 + v10)) / (2.0 * t);
    let d = (v11 - v10 - v01 + v00) / (w * t);
    let centre = c(g.x0 + 0.5 * w, g.y0 + 0.5 * t);
    let phi: Vec<f64> = g
        .nodes()
        .iter()
        .map(|z| {
            let (x, y) = (z.re - centre.re, z.im - centre.im);
            a * (x * x + y * y) / 4.0 + b * x.powi(3) / 6.0 + cy * y.powi(3) / 6.0 + d * (x.powi(3) * y + x * y.powi(3)) / 12.0
        })
        .collect();
    let lap_phi: Vec<f64> = g
        .nodes()
        .iter()
        .map(|z| {
            let (x, y) = (z.re - centre.re, z.im - centre.im);
            a + b * x + cy * y + d * x * y
        })
        .collect();
    let reduced: Vec<f64> = rhs.iter().zip(&lap_phi).map(|(r, l)| r - l).collect();
    let u = poisson_dirichlet(&reduced, g)?;
    Ok(phi.iter().zip(&u).map(|(p, u)| p + u).collect())
}

/// Five-point solve of `Δu = rhs` with `u = 0` on the boundary.
fn poisson_dirichlet(rhs: &[f64], g: &RectGrid) -> Result<Vec<f64>> {
    let (mx, my) = (g.nx - 2, g.ny - 2);
    let m = mx * my;
    let unknown = |i: usize, j: usize| (j - 1) * mx + (i - 1);
    let inv = 1.0 / (g.h * g.h);
    // assemble −Δ, which is positive definite
    let mut coo = CooMatrix::new(m, m);
    let mut b = nalgebra::DVector::zeros(m);
    for j in 1..=my {
        for i in 1..=mx {
            let r = unknown(i, j);
            coo.push(r, r, 4.0 * inv);
            for (ii, jj) in [(i - 1, j), (i + 1, j), (i, j - 1), (i, j + 1)] {
                if g.is_interior(ii, jj) {
                    coo.push(r, unknown(ii, jj), -inv);
                }
            }
            b[r] = -rhs[g.index(i, j)];
        }
    }
    let csc = CscMatrix::from(&coo);
    let chol = CscCholesky::factor(&csc).map_err(|e| Error::Numerical(format!("Poisson factorization failed: {e}")))?;
    let x = chol.solve(&b);
    let mut u = vec![0.0; g.len()];
    for j in 1..=my {
        for i in 1..=mx {
            u[g.index(i, j)] = x[(unknown(i, j), 0)];
        }
    }
    Ok(u)
}

impl RigidSurfaceField {
    fn wirtinger_f(&self) -> Wirtinger {
        let fc: Vec<C64> = self.f.iter().map(|&v| c(v, 0.0)).collect();
        wirtinger(&fc, &self.grid)
    }

    /// Second-order jet of `r = f(z₁) − Im z₂` at every node.
    pub fn jets(&self) -> Vec<Jet2> {
        let w = self.wirtinger_f();
        (0..self.grid.len())
            .map(|k| Jet2 {
                r: 0.0,
                grad: CVec::from_vec(vec![w.z[k], c(0.0, 0.5)]),
                hess_holo: CMat::from_row_slice(2, 2, &[w.zz[k], c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]),
                hess_mixed: CMat::from_row_slice(2, 2, &[w.zzb[k], c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]),
            })
            .collect()
    }

    /// Beltrami coefficient of the reconstructed surface at every node.
    pub fn beltrami(&self) -> Result<Vec<C64>> {
        self.jets().iter().map(beltrami_b_from_jet).collect()
    }

    /// `λ` at the surface nodes, which are the interior nodes of the grid
    /// `lambda` was sampled on.
    fn lambda_here(&self, lambda: &LambdaField) -> Vec<C64> {
        let (s, o) = (&self.grid, &lambda.grid);
        (0..s.len()).map(|k| lambda.values[o.index(k % s.nx + 1, k / s.nx + 1)]).collect()
    }

    /// `|b − λ|` at every node.
    pub fn beltrami_error(&self, lambda: &LambdaField) -> Result<GridField<f64>> {
        let b = self.beltrami()?;
        let values = b.iter().zip(self.lambda_here(lambda)).map(|(b, l)| (b - l).norm()).collect();
        Ok(GridField { grid: self.grid, values })
    }

    /// `|f_zz − λ f_zz̄|` at every node.
    pub fn pde_residual(&self, lambda: &LambdaField) -> GridField<f64> {
        let w = self.wirtinger_f();
        let lam = self.lambda_here(lambda);
        let values = (0..self.grid.len()).map(|k| (w.zz[k] - lam[k] * w.zzb[k]).norm()).collect();
        GridField { grid: self.grid, values }
    }

    /// Smallest stencil value of `f_zz̄`; positive for a strongly
    /// pseudoconvex surface.
    pub fn min_levi(&self) -> f64 {
        self.wirtinger_f().zzb.iter().fold(f64::INFINITY, |m, v| m.min(v.re))
    }
}

/// Observed convergence order from errors on grids refined by `factor`.
pub fn observed_order(coarse: f64, fine: f64, factor: usize) -> f64 {
    (coarse / fine).ln() / (factor as f64).ln()
}
