//! Experiment configuration, command pipelines and machine-readable reports
//! behind the `leray` binary.
//!
//! A run reads one JSON [`ExperimentConfig`], executes the selected command
//! at every rung of its resolution ladder, and produces a [`Report`]: one
//! JSON payload per rung, refinement deltas between consecutive rungs, and
//! the outcome of each configured [`Check`]. Per-node tables are emitted as
//! CSV alongside.

use crate::duality::{contact_check, dual_surface, roundtrip, transport_check, DualChart};
use crate::geometry::{
    ChartWindow, CustomGraph, Ellipse, Expr, Hypersurface, LpSphere, MobiusImage, MobiusMap, PowerGraph,
    QuadratureMesh, Quadric, Tube, UnitSphere,
};
use crate::invariants::phi_det_from_jet;
use crate::pairing::{gram_sharp, hardy_basis, infsup, norm_sharp, pairing_matrix, sup_pairing, Duality, Section};
use crate::rigid::{
    closedness_check, rigid_reconstruct_with, rigid_residual, LambdaField, ReconstructOptions, RectGrid,
};
use crate::transforms::{
    adjoint_residual, cauchy_matrix, efficiency_identity, leray_matrix, operator_norm, plemelj_residual,
    projection_defect, Side,
};
use crate::{c, linalg, CMat, CVec, Error, Result, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use std::path::{Path, PathBuf};
use std::sync::Arc;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Invariants,
    Dual,
    Pair,
    CauchyNorm,
    LerayNorm,
    Efficiency,
    RigidCheck,
    RigidBuild,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Invariants => "invariants",
            Command::Dual => "dual",
            Command::Pair => "pair",
            Command::CauchyNorm => "cauchy-norm",
            Command::LerayNorm => "leray-norm",
            Command::Efficiency => "efficiency",
            Command::RigidCheck => "rigid-check",
            Command::RigidBuild => "rigid-build",
        }
    }

    fn is_rigid(self) -> bool {
        matches!(self, Command::RigidCheck | Command::RigidBuild)
    }
}

/// A complex number written as `[re, im]`.
pub type ComplexPair = [f64; 2];

fn cp(v: ComplexPair) -> C64 {
    c(v[0], v[1])
}

/// Surface families selectable from a config.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SurfaceConfig {
    Circle {
        #[serde(default = "one")]
        radius: f64,
    },
    Ellipse {
        a: f64,
        b: f64,
        #[serde(default)]
        center: ComplexPair,
        #[serde(default)]
        angle: f64,
    },
    Sphere {
        #[serde(default = "two")]
        n: usize,
    },
    LpSphere {
        p: f64,
    },
    PowerGraph {
        gamma: f64,
        window: Option<Vec<[f64; 2]>>,
    },
    Quadric {
        alpha: Vec<f64>,
        beta: Vec<ComplexPair>,
        window: Option<Vec<[f64; 2]>>,
    },
    Tube {
        a2: f64,
        #[serde(default)]
        a4: f64,
        window: Option<Vec<[f64; 2]>>,
    },
    Custom {
        n: usize,
        expr: String,
        window: Option<Vec<[f64; 2]>>,
    },
    /// Image of `base` under the automorphism with the given matrix,
    /// rescaled to determinant one.
    Mobius {
        base: Box<SurfaceConfig>,
        matrix: Vec<Vec<ComplexPair>>,
    },
}

fn one() -> f64 {
    1.0
}

fn two() -> usize {
    2
}

fn window(w: &Option<Vec<[f64; 2]>>) -> Result<Option<ChartWindow>> {
    w.as_ref().map(|r| ChartWindow::new(r.iter().map(|p| (p[0], p[1])).collect())).transpose()
}

impl SurfaceConfig {
    pub fn build(&self) -> Result<Arc<dyn Hypersurface>> {
        Ok(match self {
            SurfaceConfig::Circle { radius } => {
                if !(*radius > 0.0) {
                    return Err(Error::Config("circle radius must be positive".into()));
                }
                Arc::new(Ellipse::circle(*radius))
            }
            SurfaceConfig::Ellipse { a, b, center, angle } => Arc::new(Ellipse::new(*a, *b)?.placed(cp(*center), *angle)),
            SurfaceConfig::Sphere { n } => Arc::new(UnitSphere::new(*n)?),
            SurfaceConfig::LpSphere { p } => Arc::new(LpSphere::new(*p)?),
            SurfaceConfig::PowerGraph { gamma, window: w } => {
                let s = PowerGraph::new(*gamma)?;
                Arc::new(match window(w)? {
                    Some(w) => s.with_window(w)?,
                    None => s,
                })
            }
            SurfaceConfig::Quadric { alpha, beta, window: w } => {
                let s = Quadric::new(alpha.clone(), beta.iter().map(|b| cp(*b)).collect())?;
                Arc::new(match window(w)? {
                    Some(w) => s.with_window(w)?,
                    None => s,
                })
            }
            SurfaceConfig::Tube { a2, a4, window: w } => {
                let s = Tube::new(*a2, *a4)?;
                Arc::new(match window(w)? {
                    Some(w) => s.with_window(w)?,
                    None => s,
                })
            }
            SurfaceConfig::Custom { n, expr, window: w } => {
                let s = CustomGraph::new(*n, expr)?;
                Arc::new(match window(w)? {
                    Some(w) => s.with_window(w)?,
                    None => s,
                })
            }
            SurfaceConfig::Mobius { base, matrix } => {
                let k = matrix.len();
                if matrix.iter().any(|row| row.len() != k) {
                    return Err(Error::Config("Möbius matrix must be square".into()));
                }
                let m = CMat::from_fn(k, k, |i, j| cp(matrix[i][j]));
                Arc::new(MobiusImage::new(base.build()?, MobiusMap::normalized(m)?)?)
            }
        })
    }
}

/// Source of `λ` for the rigid commands: an expression in `z1` sampled on
/// `[x₀,x₁] × [y₀,y₁]` at each ladder resolution (cells along the shorter
/// side), or a CSV grid file with columns `x,y,re,im`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LambdaConfig {
    pub expr: Option<String>,
    pub file: Option<PathBuf>,
    #[serde(default = "default_x")]
    pub x: [f64; 2],
    #[serde(default = "default_y")]
    pub y: [f64; 2],
    pub residual_tol: Option<f64>,
    pub holomorphy_tol: Option<f64>,
}

fn default_x() -> [f64; 2] {
    [0.5, 1.5]
}

fn default_y() -> [f64; 2] {
    [-0.5, 0.5]
}

/// When a check is evaluated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckScope {
    /// The finest rung only.
    #[default]
    Last,
    /// Every rung.
    All,
}

/// A pass/fail criterion on one reported quantity, addressed by a dotted
/// path into the rung payload (`"norm"`, `"residuals.projection"`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Check {
    pub quantity: String,
    pub expect: Option<f64>,
    pub tol: Option<f64>,
    pub max: Option<f64>,
    pub min: Option<f64>,
    /// Require the quantity to be non-increasing along the ladder, up to a
    /// 10% noise floor.
    #[serde(default)]
    pub monotone: bool,
    #[serde(default)]
    pub at: CheckScope,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema: u32,
    pub command: Command,
    pub surface: Option<SurfaceConfig>,
    #[serde(default)]
    pub resolutions: Vec<usize>,
    pub degree: Option<usize>,
    #[serde(default)]
    pub checks: Vec<Check>,
    #[serde(default)]
    pub seed: u64,
    /// Number of random probes (points, sections) per rung.
    pub probes: Option<usize>,
    pub lambda: Option<LambdaConfig>,
    /// Default report path; `--out` takes precedence.
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema != SCHEMA_VERSION {
            return Err(Error::Config(format!("unsupported schema {} (expected {SCHEMA_VERSION})", self.schema)));
        }
        if self.resolutions.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("resolutions must be strictly increasing".into()));
        }
        if self.resolutions.contains(&0) {
            return Err(Error::Config("resolutions must be positive".into()));
        }
        for ch in &self.checks {
            for t in [ch.tol, ch.max, ch.min, ch.expect].into_iter().flatten() {
                if !t.is_finite() {
                    return Err(Error::Config(format!("check `{}` has a non-finite bound", ch.quantity)));
                }
            }
            if let Some(t) = ch.tol {
                if !(t > 0.0) {
                    return Err(Error::Config(format!("check `{}`: tolerances must be positive", ch.quantity)));
                }
            }
            if ch.expect.is_some() != ch.tol.is_some() {
                return Err(Error::Config(format!("check `{}`: `expect` and `tol` go together", ch.quantity)));
            }
            if ch.expect.is_none() && ch.max.is_none() && ch.min.is_none() && !ch.monotone {
                return Err(Error::Config(format!("check `{}` has no criterion", ch.quantity)));
            }
        }
        if self.command.is_rigid() {
            let l = self.lambda.as_ref().ok_or_else(|| Error::Config("rigid commands need `lambda`".into()))?;
            if l.expr.is_some() == l.file.is_some() {
                return Err(Error::Config("`lambda` needs exactly one of `expr` and `file`".into()));
            }
            for t in [l.residual_tol, l.holomorphy_tol].into_iter().flatten() {
                if !(t > 0.0) {
                    return Err(Error::Config("rigid tolerances must be positive".into()));
                }
            }
        } else if self.surface.is_none() {
            return Err(Error::Config(format!("`{}` needs a `surface`", self.command.name())));
        }
        if self.command == Command::Efficiency && self.degree.is_none() {
            return Err(Error::Config("`efficiency` needs a `degree`".into()));
        }
        Ok(())
    }

    fn ladder(&self) -> Vec<usize> {
        if !self.resolutions.is_empty() {
            return self.resolutions.clone();
        }
        match self.command {
            Command::RigidCheck | Command::RigidBuild => vec![40],
            Command::CauchyNorm => vec![256],
            Command::Invariants | Command::Dual => vec![8],
            _ => vec![16],
        }
    }
}

/// A per-node table.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let io = |e: csv::Error| Error::Numerical(format!("cannot write {}: {e}", path.display()));
        let mut w = csv::Writer::from_path(path).map_err(io)?;
        w.write_record(&self.header).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| format!("{v:.16e}"))).map_err(io)?;
        }
        w.flush().map_err(|e| Error::Numerical(format!("cannot write {}: {e}", path.display())))
    }

    fn column(&self, name: &str) -> Option<impl Iterator<Item = f64> + '_> {
        let k = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(move |r| r[k]))
    }
}

/// Outcome of one check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub quantity: String,
    pub at: CheckScope,
    pub values: Vec<Option<f64>>,
    pub expect: Option<f64>,
    pub tol: Option<f64>,
    pub max: Option<f64>,
    pub min: Option<f64>,
    pub monotone: bool,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct Report {
    pub json: Value,
    pub checks: Vec<CheckOutcome>,
    pub table: Option<Table>,
    pub pass: bool,
}

impl Report {
    /// Pretty JSON with every float written to 17 significant digits.
    pub fn to_json_string(&self) -> String {
        to_json_string(&self.json)
    }
}

// ---------------------------------------------------------------- running

/// Executes the configured pipeline over the resolution ladder.
pub fn run(config: &ExperimentConfig) -> Result<Report> {
    config.validate()?;
    let ladder = config.ladder();
    let mut rungs = Vec::with_capacity(ladder.len());
    let mut table = None;
    let surface = config.surface.as_ref().map(|s| s.build()).transpose()?;
    for (k, &res) in ladder.iter().enumerate() {
        // independent, reproducible stream per rung
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ (k as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let (payload, t) = match config.command {
            Command::Invariants => invariants_rung(surface.as_deref().unwrap(), res)?,
            Command::Dual => dual_rung(surface.as_deref().unwrap(), res, config.probes.unwrap_or(16))?,
            Command::Pair => (pair_rung(surface.as_deref().unwrap(), res, config.degree.unwrap_or(2), &mut rng)?, None),
            Command::CauchyNorm | Command::LerayNorm | Command::Efficiency => {
                (norm_rung(config.command, surface.as_deref().unwrap(), res, config.degree, &mut rng)?, None)
            }
            Command::RigidCheck => (rigid_check_rung(config.lambda.as_ref().unwrap(), res)?, None),
            Command::RigidBuild => rigid_build_rung(config.lambda.as_ref().unwrap(), res)?,
        };
        rungs.push(payload);
        if t.is_some() {
            table = t;
        }
        if config.command.is_rigid() && config.lambda.as_ref().is_some_and(|l| l.file.is_some()) {
            break;
        }
    }
    let refinement = refinement(&rungs);
    let checks: Vec<CheckOutcome> = config.checks.iter().map(|c| evaluate_check(c, &rungs)).collect();
    let pass = checks.iter().all(|c| c.pass);
    let json = json!({
        "schema": SCHEMA_VERSION,
        "command": config.command.name(),
        "surface": surface.as_ref().map(|s| s.label()),
        "seed": config.seed,
        "degree": config.degree,
        "resolutions": rungs.iter().map(|r| r["resolution"].clone()).collect::<Vec<_>>(),
        "rungs": rungs,
        "refinement": refinement,
        "checks": serde_json::to_value(&checks).expect("check outcomes serialize"),
        "pass": pass,
    });
    Ok(Report { json, checks, table, pass })
}

fn stats(values: impl Iterator<Item = f64>) -> Value {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut any = false;
    for v in values {
        lo = lo.min(v);
        hi = hi.max(v);
        any = true;
    }
    if any {
        json!({ "min": lo, "max": hi })
    } else {
        Value::Null
    }
}

fn invariants_rung(surface: &dyn Hypersurface, res: usize) -> Result<(Value, Option<Table>)> {
    let mesh = surface.mesh(res)?;
    let n = mesh.dim();
    let inv = mesh.invariants()?;
    let mut header: Vec<String> = (1..=n).flat_map(|j| [format!("re_z{j}"), format!("im_z{j}")]).collect();
    header.extend(
        ["b_re", "b_im", "b_abs", "phi", "phi_det", "fefferman", "sharp", "pseudoconvex", "convexlike"].map(String::from),
    );
    let mut rows = Vec::with_capacity(mesh.len());
    let (mut identity, mut det_gap, mut closed_gap) = (0.0f64, 0.0f64, None::<f64>);
    for ((p, jet), i) in mesh.nodes.iter().zip(&mesh.jets).zip(inv) {
        let mut row: Vec<f64> = p.real_coords();
        let b = i.b.unwrap_or(c(f64::NAN, f64::NAN));
        let pd = phi_det_from_jet(jet)?;
        row.extend([b.re, b.im, b.norm(), i.phi, pd, i.fefferman_w, i.sharp_w.unwrap_or(f64::NAN)]);
        row.extend([i.pseudoconvex as u8 as f64, i.strongly_convexlike as u8 as f64]);
        rows.push(row);
        if let Some(b) = i.b {
            identity = identity.max((i.phi - (1.0 - b.norm_sqr())).abs());
            if let Some(exact) = surface.closed_form_b(p) {
                closed_gap = Some(closed_gap.unwrap_or(0.0).max((b - exact).norm()));
            }
        }
        det_gap = det_gap.max((pd - i.phi).abs());
    }
    let table = Table { header, rows };
    let payload = json!({
        "resolution": res,
        "nodes": mesh.len(),
        "b_abs": stats(table.column("b_abs").unwrap().filter(|v| v.is_finite())),
        "phi": stats(table.column("phi").unwrap()),
        "fefferman": stats(table.column("fefferman").unwrap()),
        "residuals": {
            "phi_identity": if n == 2 { json!(identity) } else { Value::Null },
            "phi_det": det_gap,
            "closed_form_b": closed_gap,
        },
        "pseudoconvex": inv.iter().all(|i| i.pseudoconvex),
        "strongly_convexlike": inv.iter().all(|i| i.strongly_convexlike),
    });
    Ok((payload, Some(table)))
}

fn probe_indices(len: usize, probes: usize) -> Vec<usize> {
    let k = probes.clamp(1, len.max(1));
    (0..k).map(|i| i * len / k).collect()
}

fn dual_rung(surface: &dyn Hypersurface, res: usize, probes: usize) -> Result<(Value, Option<Table>)> {
    let mesh = surface.mesh(res)?;
    let n = mesh.dim();
    let dual = dual_surface(&mesh)?;
    let dinv = dual.mesh.invariants()?;
    let (mut rt, mut tb, mut tphi, mut contact) = (0.0f64, None::<f64>, 0.0f64, None::<f64>);
    for k in probe_indices(mesh.len(), probes) {
        let p = &mesh.nodes[k];
        rt = rt.max(roundtrip(surface, p)?.distance(p));
        let t = transport_check(surface, p)?;
        tphi = tphi.max(t.phi);
        if let Some(b) = t.b {
            tb = Some(tb.unwrap_or(0.0).max(b));
        }
        if n >= 2 {
            let cr = contact_check(surface, p, 1e-5)?;
            contact = Some(contact.unwrap_or(0.0).max(cr.contact));
        }
    }
    let mut header: Vec<String> = (1..=n).flat_map(|j| [format!("re_w{j}"), format!("im_w{j}")]).collect();
    header.extend(["b_abs", "phi", "area_jacobian"].map(String::from));
    let rows = dual
        .mesh
        .nodes
        .iter()
        .zip(dinv)
        .zip(&dual.jacobian)
        .map(|((p, i), j)| {
            let mut row = p.real_coords();
            row.extend([i.b.map_or(f64::NAN, |b| b.norm()), i.phi, *j]);
            row
        })
        .collect();
    let table = Table { header, rows };
    let payload = json!({
        "resolution": res,
        "nodes": mesh.len(),
        "chart": match dual.chart { DualChart::Eta => "eta", DualChart::Polar => "polar" },
        "dual_b_abs": stats(table.column("b_abs").unwrap().filter(|v| v.is_finite())),
        "dual_phi": stats(table.column("phi").unwrap()),
        "residuals": { "roundtrip": rt, "transport_b": tb, "transport_phi": tphi, "contact": contact },
    });
    Ok((payload, Some(table)))
}

fn matrix_json(m: &CMat) -> Value {
    let part = |f: fn(&C64) -> f64| -> Vec<Vec<f64>> {
        (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| f(&m[(i, j)])).collect()).collect()
    };
    json!({ "re": part(|z| z.re), "im": part(|z| z.im) })
}

/// Random polynomial in `z` and `z̄` of total degree ≤ 2.
fn random_section(mesh: &Arc<QuadratureMesh>, rng: &mut ChaCha8Rng) -> Result<Section> {
    let n = mesh.dim();
    let vars = 2 * n;
    let mut terms: Vec<(Vec<usize>, C64)> = vec![(vec![], c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))];
    for a in 0..vars {
        terms.push((vec![a], c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))));
        for b in a..vars {
            terms.push((vec![a, b], c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))));
        }
    }
    Section::from_fn(mesh.clone(), |p| {
        let var = |k: usize| if k < n { p.z[k] } else { p.z[k - n].conj() };
        terms.iter().map(|(idx, coef)| idx.iter().fold(*coef, |acc, &k| acc * var(k))).sum()
    })
}

fn unit(s: Section) -> Result<Section> {
    let nrm = norm_sharp(&s)?;
    Ok(s.scaled(c(1.0 / nrm.max(1e-300), 0.0)))
}

fn pair_rung(surface: &dyn Hypersurface, res: usize, degree: usize, rng: &mut ChaCha8Rng) -> Result<Value> {
    let mesh = Arc::new(surface.mesh(res)?);
    let duality = Duality::new(mesh.clone())?;
    let reversed = duality.reversed()?;
    let basis_s = hardy_basis(&mesh, degree)?;
    let basis_d = hardy_basis(&duality.dual, degree)?;
    let p = pairing_matrix(&duality, &basis_s, &basis_d)?;
    let sups = basis_s.iter().map(|f| sup_pairing(&duality, f, &basis_d)).collect::<Result<Vec<_>>>()?;
    let f = unit(random_section(&mesh, rng)?)?;
    let g = random_section(&duality.dual, rng)?;
    let g = g.scaled(c(1.0 / duality.norm_sharp_dual(&g)?.max(1e-300), 0.0));
    let mut cs_excess = f64::NEG_INFINITY;
    for fb in &basis_s {
        for gb in &basis_d {
            cs_excess = cs_excess.max(duality.cauchy_schwarz_excess(fb, gb)?);
        }
    }
    cs_excess = cs_excess.max(duality.cauchy_schwarz_excess(&f, &g)?);
    Ok(json!({
        "resolution": res,
        "degree": degree,
        "gram_S": matrix_json(&gram_sharp(&basis_s)?),
        "gram_Sstar": matrix_json(&gram_sharp(&basis_d)?),
        "pairing_matrix": matrix_json(&p),
        "infsup": infsup(&duality, &basis_s, &basis_d)?,
        "sup_pairing_per_basis_vector": sups,
        "residuals": {
            "isometry": duality.isometry_residual(&g)?,
            "double_transfer": duality.double_transfer_residual(&reversed)?,
            "symmetry": duality.symmetry_residual(&reversed, &f, &g)?,
            "cauchy_schwarz_excess": cs_excess,
        },
    }))
}

/// Largest relative error of the operator on holomorphic monomials of
/// degree ≤ `degree` it can represent.
fn reproduction_error(mesh: &Arc<QuadratureMesh>, op: &crate::transforms::DiscreteOperator, degree: usize) -> Result<f64> {
    let mut worst = 0.0f64;
    for s in hardy_basis_raw(mesh, degree)? {
        let out = op.apply(&s)?;
        worst = worst.max((&out - &s).norm() / s.norm().max(1e-300));
    }
    Ok(worst)
}

fn hardy_basis_raw(mesh: &Arc<QuadratureMesh>, degree: usize) -> Result<Vec<CVec>> {
    let n = mesh.dim();
    let mut out = Vec::new();
    let mut exps = vec![0i32; n];
    loop {
        if exps.iter().sum::<i32>() as usize <= degree {
            out.push(Section::monomial(mesh.clone(), &exps)?.values);
        }
        let mut k = 0;
        loop {
            if k == n {
                return Ok(out);
            }
            exps[k] += 1;
            if exps[k] as usize <= degree {
                break;
            }
            exps[k] = 0;
            k += 1;
        }
    }
}

fn norm_rung(command: Command, surface: &dyn Hypersurface, res: usize, degree: Option<usize>, rng: &mut ChaCha8Rng) -> Result<Value> {
    let mesh = Arc::new(surface.mesh(res)?);
    let n = mesh.dim();
    match (command, n) {
        (Command::CauchyNorm, 1) | (Command::LerayNorm, 2..) | (Command::Efficiency, _) => {}
        (Command::CauchyNorm, _) => return Err(Error::Config("`cauchy-norm` needs a planar curve".into())),
        _ => return Err(Error::Config("`leray-norm` needs a hypersurface in ℂⁿ, n ≥ 2".into())),
    }
    let (norm, projection, adjoint, reproduction, identity) = if n == 1 {
        let cp = cauchy_matrix(&mesh, Side::Plus)?;
        let cm = cauchy_matrix(&mesh, Side::Minus)?;
        let sum = cp.dense()? + cm.dense()? - CMat::identity(mesh.len(), mesh.len());
        let f = random_section(&mesh, rng)?.values;
        let g = random_section(&mesh, rng)?.values;
        let scale = (f.norm() * g.norm()).max(1e-300) * mesh.area() / mesh.len() as f64;
        (
            operator_norm(&cp)?,
            projection_defect(&cp)?,
            plemelj_residual(&mesh, &f, &g)? / scale,
            reproduction_error(&mesh, &cp, degree.unwrap_or(4))?,
            Some(linalg::spectral_norm(&sum)),
        )
    } else {
        let duality = Duality::new(mesh.clone())?;
        let l = leray_matrix(&mesh)?;
        let ld = leray_matrix(&duality.dual)?;
        let f = unit(random_section(&mesh, rng)?)?;
        let g = random_section(&duality.dual, rng)?;
        let g = g.scaled(c(1.0 / duality.norm_sharp_dual(&g)?.max(1e-300), 0.0));
        (
            operator_norm(&l)?,
            projection_defect(&l)?,
            adjoint_residual(&duality, &l, &ld, &f, &g)?,
            reproduction_error(&mesh, &l, degree.unwrap_or(3))?,
            None,
        )
    };
    let eff = match (command, degree) {
        (Command::Efficiency, Some(d)) | (Command::CauchyNorm | Command::LerayNorm, Some(d)) => {
            Some(efficiency_identity(mesh.clone(), d)?)
        }
        _ => None,
    };
    Ok(json!({
        "resolution": res,
        "degree": degree,
        "norm": norm,
        "infsup": eff.as_ref().map(|e| e.infsup),
        "inverse_norm": 1.0 / norm,
        "residuals": {
            "projection": projection,
            "adjoint": adjoint,
            "reproduction": reproduction,
            "identity": eff.as_ref().map(|e| (e.infsup - 1.0 / norm).abs()),
            "direct_sum": identity,
        },
        "basis_size": eff.as_ref().map(|e| e.basis_size),
        "dual_basis_size": eff.as_ref().map(|e| e.dual_basis_size),
    }))
}

fn lambda_field(cfg: &LambdaConfig, cells: usize) -> Result<LambdaField> {
    if let Some(path) = &cfg.file {
        return read_lambda_csv(path);
    }
    let expr = Expr::parse(cfg.expr.as_deref().unwrap_or_default())?;
    let grid = RectGrid::covering(cfg.x[0], cfg.x[1], cfg.y[0], cfg.y[1], cells)?;
    LambdaField::from_expr(grid, &expr)
}

/// Reads `x,y,re,im` rows on a uniform grid, in any order.
pub fn read_lambda_csv(path: &Path) -> Result<LambdaField> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut pts = Vec::new();
    for rec in rdr.deserialize::<(f64, f64, f64, f64)>() {
        pts.push(rec.map_err(|e| Error::Config(format!("bad λ grid row in {}: {e}", path.display())))?);
    }
    let axis = |sel: fn(&(f64, f64, f64, f64)) -> f64| {
        let mut v: Vec<f64> = pts.iter().map(sel).collect();
        v.sort_by(|a, b| a.total_cmp(b));
        v.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * (1.0 + b.abs()));
        v
    };
    let (xs, ys) = (axis(|p| p.0), axis(|p| p.1));
    if xs.len() < 2 || ys.len() < 2 || xs.len() * ys.len() != pts.len() {
        return Err(Error::Config("λ grid file must cover a full rectangular grid".into()));
    }
    let h = xs[1] - xs[0];
    let uniform = |v: &[f64]| v.windows(2).all(|w| ((w[1] - w[0]) - h).abs() <= 1e-6 * h);
    if !uniform(&xs) || !uniform(&ys) {
        return Err(Error::Config("λ grid file must be uniform with equal spacing in x and y".into()));
    }
    let grid = RectGrid::new(xs[0], ys[0], h, xs.len(), ys.len())?;
    let mut values = vec![c(f64::NAN, f64::NAN); grid.len()];
    for p in &pts {
        let i = ((p.0 - xs[0]) / h).round() as usize;
        let j = ((p.1 - ys[0]) / h).round() as usize;
        values[grid.index(i, j)] = c(p.2, p.3);
    }
    LambdaField::new(grid, values)
}

fn rigid_check_rung(cfg: &LambdaConfig, cells: usize) -> Result<Value> {
    let l = lambda_field(cfg, cells)?;
    let r = rigid_residual(&l);
    Ok(json!({
        "resolution": l.grid.nx.min(l.grid.ny) - 1,
        "h": l.grid.h,
        "nodes": l.grid.len(),
        "max_modulus": l.max_modulus(),
        "residual": { "max": r.max_abs(), "interior": r.max_abs_inside(0.1) },
        "closedness": closedness_check(&l),
    }))
}

fn rigid_build_rung(cfg: &LambdaConfig, cells: usize) -> Result<(Value, Option<Table>)> {
    let l = lambda_field(cfg, cells)?;
    let mut opts = ReconstructOptions::default();
    if let Some(t) = cfg.residual_tol {
        opts.residual_tol = t;
    }
    if let Some(t) = cfg.holomorphy_tol {
        opts.holomorphy_tol = t;
    }
    let s = rigid_reconstruct_with(&l, opts)?;
    let b = s.beltrami()?;
    let nodes = s.grid.nodes();
    let rows = (0..s.grid.len())
        .map(|k| vec![nodes[k].re, nodes[k].im, s.f[k], s.h_log[k], b[k].re, b[k].im])
        .collect();
    let table = Table { header: ["x", "y", "f", "h_log", "b_re", "b_im"].map(String::from).to_vec(), rows };
    let payload = json!({
        "resolution": l.grid.nx.min(l.grid.ny) - 1,
        "h": l.grid.h,
        "nodes": s.grid.len(),
        "residual": s.residual,
        "holomorphy_defect": s.holomorphy_defect,
        "pde_residual": s.pde_residual(&l).max_abs(),
        "beltrami_error": s.beltrami_error(&l)?.max_abs(),
        "min_levi": s.min_levi(),
    });
    Ok((payload, Some(table)))
}

// ---------------------------------------------------------------- checks

/// Numeric leaves of a payload keyed by dotted path (arrays skipped).
fn flatten(v: &Value, prefix: &str, out: &mut Vec<(String, f64)>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(x, &key, out);
            }
        }
        Value::Number(x) => {
            if let Some(f) = x.as_f64() {
                out.push((prefix.to_string(), f));
            }
        }
        _ => {}
    }
}

fn lookup(v: &Value, path: &str) -> Option<f64> {
    path.split('.').try_fold(v, |acc, key| acc.get(key))?.as_f64()
}

fn refinement(rungs: &[Value]) -> Value {
    let pairs: Vec<Value> = rungs
        .windows(2)
        .map(|w| {
            let (r0, r1) = (lookup(&w[0], "resolution").unwrap_or(0.0), lookup(&w[1], "resolution").unwrap_or(0.0));
            let mut a = Vec::new();
            flatten(&w[0], "", &mut a);
            let mut deltas = Map::new();
            let mut orders = Map::new();
            for (key, x0) in a {
                if matches!(key.as_str(), "resolution" | "nodes" | "h" | "degree") {
                    continue;
                }
                if let Some(x1) = lookup(&w[1], &key) {
                    deltas.insert(key.clone(), json!(x1 - x0));
                    if (key.contains("residual") || key.contains("error") || key == "closedness") && x0 > 0.0 && x1 > 0.0 && r1 > r0 && r0 > 0.0 {
                        orders.insert(key, json!((x0 / x1).ln() / (r1 / r0).ln()));
                    }
                }
            }
            json!({ "from": r0, "to": r1, "deltas": deltas, "observed_order": orders })
        })
        .collect();
    Value::Array(pairs)
}

fn evaluate_check(ch: &Check, rungs: &[Value]) -> CheckOutcome {
    let all: Vec<Option<f64>> = rungs.iter().map(|r| lookup(r, &ch.quantity)).collect();
    let scoped: Vec<Option<f64>> = match ch.at {
        CheckScope::Last => all.last().cloned().into_iter().collect(),
        CheckScope::All => all.clone(),
    };
    let ok_value = |v: f64| {
        v.is_finite()
            && ch.expect.zip(ch.tol).is_none_or(|(e, t)| (v - e).abs() <= t)
            && ch.max.is_none_or(|m| v <= m)
            && ch.min.is_none_or(|m| v >= m)
    };
    let mut pass = !scoped.is_empty() && scoped.iter().all(|v| v.is_some_and(ok_value));
    if ch.monotone {
        pass &= all.iter().all(|v| v.is_some())
            && all.windows(2).all(|w| {
                let (a, b) = (w[0].unwrap(), w[1].unwrap());
                b <= a * 1.1 + f64::MIN_POSITIVE
            });
    }
    CheckOutcome {
        quantity: ch.quantity.clone(),
        at: ch.at,
        values: scoped,
        expect: ch.expect,
        tol: ch.tol,
        max: ch.max,
        min: ch.min,
        monotone: ch.monotone,
        pass,
    }
}

// ---------------------------------------------------------------- output

/// Pretty printer that writes floats as `{:.16e}`.
struct FixedFloats<'a>(serde_json::ser::PrettyFormatter<'a>);

impl serde_json::ser::Formatter for FixedFloats<'_> {
    fn write_f64<W: ?Sized + std::io::Write>(&mut self, w: &mut W, value: f64) -> std::io::Result<()> {
        write!(w, "{value:.16e}")
    }
    fn begin_array<W: ?Sized + std::io::Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + std::io::Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + std::io::Write>(&mut self, w: &mut W, first: bool) -> std::io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + std::io::Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + std::io::Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + std::io::Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + std::io::Write>(&mut self, w: &mut W, first: bool) -> std::io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + std::io::Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + std::io::Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json_string(v: &Value) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedFloats(serde_json::ser::PrettyFormatter::new()));
    v.serialize(&mut ser).expect("in-memory JSON serialization");
    buf.push(b'\n');
    String::from_utf8(buf).expect("JSON is UTF-8")
}

/// Process exit code for a failed run: 2 for configuration problems, 3 for
/// numerical failures.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) | Error::Dimension(_) => 2,
        _ => 3,
    }
}

/// CSV path paired with a report path.
pub fn table_path(report: &Path) -> PathBuf {
    report.with_extension("csv")
}
