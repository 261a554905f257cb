use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::app::mesh::{render_mesh, MeshFormat};
use crate::app::report::{integrate_entry, verify_report, window_spec, VerifyOptions, TOL_CONFORMAL, TOL_LIOUVILLE, TOL_MEAN_CURVATURE};
use crate::app::{fmt17, Num};
use crate::error::{Error, Result};
use crate::gallery::{conjugate_surface, corrupted, get_example, GalleryEntry, Params, EXAMPLES};
use crate::geometry::{curvatures, fundamental_forms, ShapeReport};
use crate::grid::{Grid, GridSpec, Rect};
use crate::kalg::Eps;
use crate::liouville::{lambda_from_g, liouville_residual};
use crate::lorentz3::{LMat3, LVec3};
use crate::mobius::{AxisAngle, MobiusParams};

/// Tolerance on E, H and K after a rigid motion.
pub const TOL_ISOMETRY: f64 = 1e-6;

#[derive(Debug, Parser)]
#[command(name = "lorentz-minimal", version, about = "Minimal surfaces in Lorentz-Minkowski space")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List gallery entries and their parameter constraints.
    List,
    /// Integrate an example and write a mesh.
    Mesh {
        #[command(flatten)]
        example: ExampleArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "obj")]
        format: MeshFormat,
    },
    /// Check every invariant of an example; exits 1 if any check fails.
    Verify {
        #[command(flatten)]
        example: ExampleArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        json: bool,
    },
    /// Apply a rigid motion given by an axis and angle, write the moved mesh
    /// and compare its geometry with the original.
    Transform {
        #[command(flatten)]
        example: ExampleArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
        axis: LVec3,
        #[arg(long, allow_negative_numbers = true)]
        theta: f64,
        #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
        translate: Option<LVec3>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "obj")]
        format: MeshFormat,
        #[arg(long)]
        json: bool,
    },
    /// The Liouville solution of an example's developing map.
    Liouville {
        #[command(flatten)]
        example: ExampleArgs,
        #[arg(long, default_value_t = 41)]
        nx: usize,
        #[arg(long, default_value_t = 41)]
        ny: usize,
        #[arg(long, value_parser = parse_rect, allow_hyphen_values = true)]
        domain: Option<Rect>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Args)]
pub struct ExampleArgs {
    #[arg(long)]
    pub example: String,
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub b: Option<f64>,
    /// Use the conjugate surface.
    #[arg(long)]
    pub conjugate: bool,
    /// Replace g by its conjugate (a non-holomorphic control).
    #[arg(long)]
    pub corrupt: bool,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long, default_value_t = 201)]
    pub nx: usize,
    #[arg(long, default_value_t = 201)]
    pub ny: usize,
    #[arg(long, value_parser = parse_rect, allow_hyphen_values = true)]
    pub domain: Option<Rect>,
}

fn parse_list<const N: usize>(s: &str) -> std::result::Result<[f64; N], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != N {
        return Err(format!("expected {N} comma-separated numbers"));
    }
    let mut out = [0.0; N];
    for (o, p) in out.iter_mut().zip(parts) {
        let v: f64 = p.parse().map_err(|_| format!("not a number: {p}"))?;
        *o = v;
        if !v.is_finite() {
            return Err(format!("not finite: {p}"));
        }
    }
    Ok(out)
}

fn parse_rect(s: &str) -> std::result::Result<Rect, String> {
    let [x0, x1, y0, y1] = parse_list::<4>(s)?;
    if !(x0 < x1 && y0 < y1) {
        return Err("domain needs X0 < X1 and Y0 < Y1".into());
    }
    Ok(Rect::new(x0, x1, y0, y1))
}

fn parse_vec3(s: &str) -> std::result::Result<LVec3, String> {
    parse_list::<3>(s).map(LVec3::from_array)
}

impl ExampleArgs {
    pub fn resolve(&self) -> Result<GalleryEntry> {
        let mut e = get_example(&self.example, Params::new(self.a, self.b))?;
        if self.conjugate {
            e = conjugate_surface(&e);
        }
        if self.corrupt {
            e = corrupted(&e);
        }
        Ok(e)
    }
}

impl GridArgs {
    fn spec(&self, entry: &GalleryEntry) -> Result<GridSpec> {
        GridSpec::over(self.domain.unwrap_or(entry.default_domain), self.nx, self.ny)
    }

    fn options(&self) -> VerifyOptions {
        VerifyOptions { nx: self.nx, ny: self.ny, domain: self.domain }
    }
}

fn header(entry: &GalleryEntry, spec: GridSpec) -> Vec<String> {
    let mut h = vec![format!("example={}", entry.name)];
    for (k, v) in &entry.params {
        h.push(format!("{k}={}", fmt17(*v)));
    }
    let b = spec.bounds();
    h.push(format!(
        "domain={},{},{},{} nx={} ny={}",
        fmt17(b.x0),
        fmt17(b.x1),
        fmt17(b.y0),
        fmt17(b.y1),
        spec.nx,
        spec.ny
    ));
    h
}

/// Geometry on a grid, or `None` when the grid is too coarse for it.
fn geometry_on(entry: &GalleryEntry, surface: &crate::weierstrass::SurfaceGrid) -> Option<ShapeReport> {
    let mut r = fundamental_forms(surface, Some(&entry.chart)).ok()?;
    curvatures(&mut r, entry.verify_curvature);
    Some(r)
}

#[derive(Debug, Serialize)]
struct IsometryReport {
    example: String,
    eps: Eps,
    mobius: [Num; 4],
    rotation: [[Num; 3]; 3],
    translation: [Num; 3],
    vertices: usize,
    faces: usize,
    max_delta_e: Num,
    max_delta_h: Num,
    max_delta_k: Num,
    max_abs_h: Num,
    max_abs_f: Num,
    max_e_minus_eps_g: Num,
    pass: bool,
}

fn max_delta(a: &Grid<f64>, b: &Grid<f64>) -> f64 {
    a.iter_valid()
        .filter_map(|(i, j, v)| b.get(i, j).map(|w| (v - w).abs()))
        .fold(0.0, f64::max)
}

fn isometry_report(
    entry: &GalleryEntry,
    t: &MobiusParams,
    r: &LMat3,
    shift: LVec3,
    domain: Rect,
    stats: crate::app::mesh::MeshStats,
) -> Result<IsometryReport> {
    let (before, _) = integrate_entry(entry, window_spec(domain)?)?;
    let after = before.transformed(r, shift);
    let mut g0 = fundamental_forms(&before, None)?;
    let mut g1 = fundamental_forms(&after, None)?;
    curvatures(&mut g0, entry.verify_curvature);
    curvatures(&mut g1, entry.verify_curvature);
    let s = g1.summary;
    let de = max_delta(&g0.e, &g1.e);
    let dh = max_delta(&g0.h, &g1.h);
    let dk = max_delta(&g0.k, &g1.k);
    let scale = s.max_e.max(1.0);
    let mut pass = de <= TOL_ISOMETRY * scale && dh <= TOL_ISOMETRY && dk <= TOL_ISOMETRY;
    pass &= s.max_abs_f <= TOL_CONFORMAL * s.max_e && s.max_e_minus_eps_g <= TOL_CONFORMAL * s.max_e;
    if entry.verify_curvature {
        pass &= s.max_abs_h <= TOL_MEAN_CURVATURE;
    }
    let n = |v: f64| Num(v);
    Ok(IsometryReport {
        example: entry.name.clone(),
        eps: entry.eps,
        mobius: [n(t.a().re), n(t.a().im), n(t.b().re), n(t.b().im)],
        rotation: r.0.map(|row| row.map(Num)),
        translation: shift.to_array().map(Num),
        vertices: stats.vertices,
        faces: stats.faces,
        max_delta_e: n(de),
        max_delta_h: n(dh),
        max_delta_k: n(dk),
        max_abs_h: n(s.max_abs_h),
        max_abs_f: n(s.max_abs_f),
        max_e_minus_eps_g: n(s.max_e_minus_eps_g),
        pass,
    })
}

impl IsometryReport {
    fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "example: {}", self.example);
        let _ = writeln!(s, "eps: {}", self.eps);
        let m: Vec<String> = self.mobius.iter().map(|v| fmt17(v.0)).collect();
        let _ = writeln!(s, "mobius a,b: {}", m.join(","));
        for row in &self.rotation {
            let r: Vec<String> = row.iter().map(|v| fmt17(v.0)).collect();
            let _ = writeln!(s, "rotation: {}", r.join(","));
        }
        let t: Vec<String> = self.translation.iter().map(|v| fmt17(v.0)).collect();
        let _ = writeln!(s, "translation: {}", t.join(","));
        let _ = writeln!(s, "mesh: vertices={} faces={}", self.vertices, self.faces);
        for (k, v) in [
            ("max_delta_e", self.max_delta_e),
            ("max_delta_h", self.max_delta_h),
            ("max_delta_k", self.max_delta_k),
            ("max_abs_h", self.max_abs_h),
            ("max_abs_f", self.max_abs_f),
            ("max_e_minus_eps_g", self.max_e_minus_eps_g),
        ] {
            let _ = writeln!(s, "{k}: {}", fmt17(v.0));
        }
        let _ = writeln!(s, "overall: {}", if self.pass { "PASS" } else { "FAIL" });
        s
    }
}

#[derive(Debug, Serialize)]
struct LiouvilleOutput {
    example: String,
    eps: Eps,
    domain: [Num; 4],
    nx: usize,
    ny: usize,
    /// Rows of constant y; masked nodes are null.
    lambda: Vec<Vec<Num>>,
    grid_residual: Num,
    window_residual: Num,
    threshold: Num,
    pass: bool,
}

fn liouville_output(entry: &GalleryEntry, spec: GridSpec) -> Result<LiouvilleOutput> {
    let map = entry.developing_map();
    let lambda = lambda_from_g(&map, spec);
    let rows = (0..spec.ny)
        .map(|j| (0..spec.nx).map(|i| Num(lambda.get(i, j).unwrap_or(f64::NAN))).collect())
        .collect();
    let grid_residual = liouville_residual(&lambda, entry.eps).unwrap_or(f64::NAN);
    let window = lambda_from_g(&map, window_spec(spec.bounds())?);
    let window_residual = liouville_residual(&window, entry.eps)?;
    let b = spec.bounds();
    Ok(LiouvilleOutput {
        example: entry.name.clone(),
        eps: entry.eps,
        domain: [Num(b.x0), Num(b.x1), Num(b.y0), Num(b.y1)],
        nx: spec.nx,
        ny: spec.ny,
        lambda: rows,
        grid_residual: Num(grid_residual),
        window_residual: Num(window_residual),
        threshold: Num(TOL_LIOUVILLE),
        pass: window_residual <= TOL_LIOUVILLE,
    })
}

impl LiouvilleOutput {
    fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "example: {}", self.example);
        let _ = writeln!(s, "eps: {}", self.eps);
        let d: Vec<String> = self.domain.iter().map(|v| fmt17(v.0)).collect();
        let _ = writeln!(s, "domain: {}", d.join(","));
        let _ = writeln!(s, "grid: {}x{}", self.nx, self.ny);
        for row in &self.lambda {
            let r: Vec<String> = row.iter().map(|v| fmt17(v.0)).collect();
            let _ = writeln!(s, "{}", r.join(","));
        }
        let _ = writeln!(s, "grid_residual: {}", fmt17(self.grid_residual.0));
        let _ = writeln!(s, "window_residual: {}", fmt17(self.window_residual.0));
        let _ = writeln!(s, "overall: {}", if self.pass { "PASS" } else { "FAIL" });
        s
    }
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    serde_json::to_string_pretty(v).map_err(|e| Error::ContractViolation(e.to_string()))
}

/// Runs one command; returns the text for stdout and whether every check
/// passed.
pub fn execute(cmd: &Command) -> Result<(String, bool)> {
    match cmd {
        Command::List => {
            let mut s = String::new();
            for (name, constraint) in EXAMPLES {
                let _ = writeln!(s, "{name}\t{constraint}");
            }
            Ok((s, true))
        }
        Command::Mesh { example, grid, out, format } => {
            let entry = example.resolve()?;
            let spec = grid.spec(&entry)?;
            let (surface, _) = integrate_entry(&entry, spec)?;
            let report = match format {
                MeshFormat::Csv => geometry_on(&entry, &surface),
                MeshFormat::Obj => None,
            };
            let stats = render_mesh(&surface, report.as_ref(), out, *format, &header(&entry, spec))?;
            let masked = spec.len() - surface.psi.valid_count();
            Ok((format!("vertices={} faces={} masked={}\n", stats.vertices, stats.faces, masked), true))
        }
        Command::Verify { example, grid, json } => {
            let entry = example.resolve()?;
            let r = verify_report(&entry, &grid.options())?;
            let text = if *json { to_json(&r)? + "\n" } else { r.to_text() };
            Ok((text, r.pass))
        }
        Command::Transform { example, grid, axis, theta, translate, out, format, json } => {
            let entry = example.resolve()?;
            let ax = AxisAngle::normalized(*axis, *theta)?;
            let t = MobiusParams::from_axis_angle(&ax, entry.eps)?;
            let r = t.to_rotation();
            let shift = translate.unwrap_or_default();
            let spec = grid.spec(&entry)?;
            let (surface, _) = integrate_entry(&entry, spec)?;
            let moved = surface.transformed(&r, shift);
            let report = match format {
                MeshFormat::Csv => fundamental_forms(&moved, None).ok().map(|mut g| {
                    curvatures(&mut g, entry.verify_curvature);
                    g
                }),
                MeshFormat::Obj => None,
            };
            let mut h = header(&entry, spec);
            h.push(format!("axis={},{},{} theta={}", fmt17(axis.x1), fmt17(axis.x2), fmt17(axis.x3), fmt17(*theta)));
            let stats = render_mesh(&moved, report.as_ref(), out, *format, &h)?;
            let iso = isometry_report(&entry, &t, &r, shift, spec.bounds(), stats)?;
            let text = if *json { to_json(&iso)? + "\n" } else { iso.to_text() };
            Ok((text, iso.pass))
        }
        Command::Liouville { example, nx, ny, domain, json } => {
            let entry = example.resolve()?;
            let spec = GridSpec::over(domain.unwrap_or(entry.default_domain), *nx, *ny)?;
            let l = liouville_output(&entry, spec)?;
            let text = if *json { to_json(&l)? + "\n" } else { l.to_text() };
            Ok((text, l.pass))
        }
    }
}

/// Process entry point: 0 when every check passes, 1 on a failed check,
/// 2 on an error or bad usage.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli.command) {
        Ok((text, pass)) => {
            let mut out = std::io::stdout().lock();
            if out.write_all(text.as_bytes()).and_then(|_| out.flush()).is_err() {
                return 2;
            }
            if pass {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
