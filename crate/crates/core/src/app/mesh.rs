//! OBJ and CSV export of sampled surfaces.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::app::fmt17;
use crate::error::{Error, Result};
use crate::geometry::ShapeReport;
use crate::weierstrass::SurfaceGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum MeshFormat {
    Obj,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MeshStats {
    pub vertices: usize,
    pub faces: usize,
}

/// Vertices are the valid nodes in row-major order; each grid quad whose four
/// corners are valid becomes two triangles.
pub fn write_obj<W: Write>(out: &mut W, surface: &SurfaceGrid, header: &[String]) -> Result<MeshStats> {
    let psi = &surface.psi;
    let spec = psi.spec;
    if psi.valid_count() == 0 {
        return Err(Error::EmptyMesh);
    }
    writeln!(out, "# eps={}", surface.eps)?;
    for line in header {
        writeln!(out, "# {line}")?;
    }
    let mut number = vec![0usize; spec.len()];
    let mut stats = MeshStats::default();
    for (i, j, p) in psi.iter_valid() {
        stats.vertices += 1;
        number[spec.index(i, j)] = stats.vertices;
        writeln!(out, "v {} {} {}", fmt17(p.x1), fmt17(p.x2), fmt17(p.x3))?;
    }
    for j in 0..spec.ny.saturating_sub(1) {
        for i in 0..spec.nx.saturating_sub(1) {
            let c = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
            if !c.iter().all(|&(a, b)| psi.is_valid(a, b)) {
                continue;
            }
            let [v00, v10, v11, v01] = c.map(|(a, b)| number[spec.index(a, b)]);
            writeln!(out, "f {v00} {v10} {v11}")?;
            writeln!(out, "f {v00} {v11} {v01}")?;
            stats.faces += 2;
        }
    }
    Ok(stats)
}

/// One row per valid node: `x,y,psi1,psi2,psi3,E,H,K,lambda`. Quantities the
/// report does not cover at a node are written as `nan`.
pub fn write_csv<W: Write>(out: &mut W, surface: &SurfaceGrid, report: Option<&ShapeReport>) -> Result<MeshStats> {
    let psi = &surface.psi;
    let spec = psi.spec;
    if psi.valid_count() == 0 {
        return Err(Error::EmptyMesh);
    }
    writeln!(out, "x,y,psi1,psi2,psi3,E,H,K,lambda")?;
    let mut stats = MeshStats::default();
    for (i, j, p) in psi.iter_valid() {
        let (x, y) = spec.point(i, j);
        let field = |g: Option<&crate::grid::Grid<f64>>| g.and_then(|g| g.get(i, j)).unwrap_or(f64::NAN);
        let cols = [
            x,
            y,
            p.x1,
            p.x2,
            p.x3,
            field(report.map(|r| &r.e)),
            field(report.map(|r| &r.h)),
            field(report.map(|r| &r.k)),
            field(report.map(|r| &r.lambda)),
        ];
        let row: Vec<String> = cols.iter().map(|&v| fmt17(v)).collect();
        writeln!(out, "{}", row.join(","))?;
        stats.vertices += 1;
    }
    Ok(stats)
}

pub fn render_mesh(
    surface: &SurfaceGrid,
    report: Option<&ShapeReport>,
    path: &Path,
    format: MeshFormat,
    header: &[String],
) -> Result<MeshStats> {
    if surface.psi.valid_count() == 0 {
        return Err(Error::EmptyMesh);
    }
    let mut out = BufWriter::new(File::create(path)?);
    let stats = match format {
        MeshFormat::Obj => write_obj(&mut out, surface, header)?,
        MeshFormat::Csv => write_csv(&mut out, surface, report)?,
    };
    out.flush()?;
    Ok(stats)
}
