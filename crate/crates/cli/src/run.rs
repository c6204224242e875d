//! Orchestration for the three subcommands. Everything here is
//! single-threaded and file-driven: a spec comes in, SVG/STL/report files
//! and key=value lines go out, and failures surface with the entity name
//! that produced them.

use std::collections::HashSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use gearforge_core::solidify::{write_stl, write_svg};
use log::info;

use crate::dsl::{parse_spec, TrainSpec, Value};
use crate::registry::{merge_meshes, BuilderRegistry, EntityBuilder};

/// Output destinations and thresholds, straight from the command line.
#[derive(Debug, Default)]
pub struct RunFlags {
    pub svg: Option<PathBuf>,
    pub stl: Option<PathBuf>,
    pub report: Option<PathBuf>,
    pub steps: usize,
    pub penetration_tol: Option<f64>,
    pub gap_tol: Option<f64>,
}

pub fn load_spec(path: &Path) -> Result<TrainSpec> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read spec file {}", path.display()))?;
    parse_spec(&text).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))
}

fn builder_for<'r>(reg: &'r BuilderRegistry, kind: &str, entity: &str) -> Result<&'r dyn EntityBuilder> {
    reg.get(kind).ok_or_else(|| {
        anyhow::anyhow!(
            "entity '{entity}': unknown kind '{kind}' (have {})",
            reg.kinds().join(", ")
        )
    })
}

/// Names that some relation entity places itself; drawing them standalone
/// as well would stack a second copy at the origin.
fn claimed_names(spec: &TrainSpec) -> HashSet<&str> {
    let mut names = HashSet::new();
    for e in &spec.entities {
        if e.kind == "pair" {
            for a in &e.attrs {
                if let Value::Ident(name) = &a.value {
                    names.insert(name.as_str());
                }
            }
        }
    }
    names
}

pub fn run_gen(spec: &TrainSpec, reg: &BuilderRegistry, flags: &RunFlags) -> Result<()> {
    if flags.svg.is_none() && flags.stl.is_none() {
        bail!("gen produces nothing without --svg and/or --stl");
    }
    let claimed = claimed_names(spec);
    let mut drawables = Vec::new();
    let mut meshes = Vec::new();
    for e in &spec.entities {
        if claimed.contains(e.name.as_str()) {
            continue;
        }
        let builder = builder_for(reg, &e.kind, &e.name)?;
        if flags.svg.is_some() {
            drawables.extend(
                builder
                    .drawables(e, spec)
                    .with_context(|| format!("entity '{}'", e.name))?,
            );
        }
        if flags.stl.is_some() {
            meshes.push(
                builder
                    .solid(e, spec)
                    .with_context(|| format!("entity '{}'", e.name))?,
            );
        }
    }
    if let Some(path) = &flags.svg {
        let file = fs::File::create(path)
            .with_context(|| format!("cannot create {}", path.display()))?;
        let bytes = write_svg(&drawables, file)?;
        info!("wrote {} ({bytes} bytes, {} polygons)", path.display(), drawables.len());
    }
    if let Some(path) = &flags.stl {
        let merged = merge_meshes(meshes)?;
        let file = fs::File::create(path)
            .with_context(|| format!("cannot create {}", path.display()))?;
        let bytes = write_stl(&merged, file)?;
        info!("wrote {} ({bytes} bytes, {} triangles)", path.display(), merged.triangles().len());
    }
    Ok(())
}

/// Simulates every relation entity. Returns whether any threshold the
/// caller supplied was exceeded; with no thresholds given the answer is
/// always no, and the value of the run is the report.
pub fn run_check(
    spec: &TrainSpec,
    reg: &BuilderRegistry,
    flags: &RunFlags,
    out: &mut impl Write,
) -> Result<bool> {
    let mut exceeded = false;
    let mut checked = 0usize;
    let mut report_text = Vec::new();
    for e in &spec.entities {
        let builder = builder_for(reg, &e.kind, &e.name)?;
        let Some(report) = builder
            .check(e, spec, flags.steps)
            .with_context(|| format!("entity '{}'", e.name))?
        else {
            continue;
        };
        checked += 1;
        let pen = report.max_penetration();
        let gap = report.worst_gap();
        writeln!(
            out,
            "{}: steps={} max_penetration={:.6e} worst_gap={:.6e}",
            e.name,
            report.steps.len(),
            pen,
            gap
        )?;
        if let Some(tol) = flags.penetration_tol {
            if pen > tol {
                exceeded = true;
                writeln!(out, "{}: penetration {pen:.6e} exceeds --penetration-tol {tol:.6e}", e.name)?;
            }
        }
        if let Some(tol) = flags.gap_tol {
            if gap > tol {
                exceeded = true;
                writeln!(out, "{}: gap {gap:.6e} exceeds --gap-tol {tol:.6e}", e.name)?;
            }
        }
        if flags.report.is_some() {
            writeln!(report_text, "# entity {}", e.name)?;
            report.write_tsv(&mut report_text)?;
        }
    }
    if checked == 0 {
        bail!("spec declares nothing to check (no pair or acircular_pair entity)");
    }
    if let Some(path) = &flags.report {
        fs::write(path, &report_text)
            .with_context(|| format!("cannot write {}", path.display()))?;
        info!("wrote {}", path.display());
    }
    Ok(exceeded)
}

/// Prints solved quantities as `key=value` lines, grouped per entity under
/// an `entity=<name>` line.
pub fn run_solve(spec: &TrainSpec, reg: &BuilderRegistry, out: &mut impl Write) -> Result<()> {
    let mut solved = 0usize;
    for e in &spec.entities {
        let builder = builder_for(reg, &e.kind, &e.name)?;
        let rows = builder
            .solve(e, spec)
            .with_context(|| format!("entity '{}'", e.name))?;
        if rows.is_empty() {
            continue;
        }
        solved += 1;
        writeln!(out, "entity={}", e.name)?;
        for (key, value) in rows {
            writeln!(out, "{key}={value:.9}")?;
        }
    }
    if solved == 0 {
        bail!("spec declares nothing to solve");
    }
    Ok(())
}
