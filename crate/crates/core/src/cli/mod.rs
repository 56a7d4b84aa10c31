//! Command-line front end: resolves a [`RunConfig`] against presets and
//! defaults, runs one pipeline and writes CSV, JSON or SVG.

mod args;
mod svg;

pub use args::{Cli, Command, Mode, Opts, RunConfig};

use crate::cauchy::{ImplicitSolution, InitialData, Invariant};
use crate::corpus::{get_example, ExampleId, ExampleParams};
use crate::expr::Expression;
use crate::geometry::{
    boundary_envelopes, coverage_mask, degeneration_locus, envelope_discriminant, envelope_traced,
    family_field, find_gaps, solution_fields, CellClass, DegenerationLocus, Envelope,
};
use crate::inverse::{
    param_for_point, recover_circle, recover_line, CharacteristicFamily, Family, FamilyForm,
    FamilySpec, TracedFamily,
};
use crate::numerics::{scan_roots, Bracket, Tolerance};
use crate::plane::{BBox, Point, Support};
use crate::Error;
use clap::Parser;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use std::f64::consts::{FRAC_PI_2, TAU};
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use svg::Plot;

/// Threshold on the normalized cross product used by degeneration scans.
pub const DEGENERATION_TOL: f64 = 1e-6;
pub const DEFAULT_TOL: f64 = 1e-10;
const DEFAULT_GRID: usize = 200;
/// Grid of the degeneration scan behind boundary envelopes.
const ENVELOPE_GRID: usize = 100;
/// Parameters scanned for discriminant envelopes.
const ENVELOPE_PARAMS: usize = 81;
const DEFAULT_C_RANGE: [f64; 2] = [-10.0, 10.0];
const CIRCLE_MARGIN: f64 = 0.01;
const POLAR_RADII: usize = 400;

/// Parses `args` (program name first), runs and returns the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let json_errors = args.iter().any(|a| a == "--json-errors");
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return 0;
        }
        Err(e) => {
            if json_errors {
                let msg = e.kind().to_string();
                let detail = e.to_string();
                eprintln!(
                    "{}",
                    json!({"error": {"kind": "usage", "code": 1, "message": msg, "detail": detail.trim_end()}})
                );
            } else {
                let _ = e.print();
            }
            return 1;
        }
    };
    let cfg = match cli.command {
        Command::Run { config } => load_config(&config),
        Command::Cauchy(o) => Ok(RunConfig::from_opts(Mode::Cauchy, o)),
        Command::Trace(o) => Ok(RunConfig::from_opts(Mode::Trace, o)),
        Command::Envelope(o) => Ok(RunConfig::from_opts(Mode::Envelope, o)),
        Command::Degeneration(o) => Ok(RunConfig::from_opts(Mode::Degeneration, o)),
        Command::Domain(o) => Ok(RunConfig::from_opts(Mode::Domain, o)),
        Command::InverseLine(o) => Ok(RunConfig::from_opts(Mode::InverseLine, o)),
        Command::InverseCircle(o) => Ok(RunConfig::from_opts(Mode::InverseCircle, o)),
    };
    let stdout = std::io::stdout();
    match cfg.and_then(|cfg| run(&cfg, &mut stdout.lock())) {
        Ok(()) => 0,
        Err(e) => {
            let code = exit_code(&e);
            if json_errors {
                eprintln!(
                    "{}",
                    json!({"error": {"kind": e.kind(), "code": code, "message": e.to_string()}})
                );
            } else {
                eprintln!("error: {e}");
            }
            code
        }
    }
}

/// 2 for mathematical domain errors, 1 for everything else.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_domain() {
        2
    } else {
        1
    }
}

pub fn load_config(path: &Path) -> Result<RunConfig, Error> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

/// A configuration with every default filled in; echoed in JSON reports.
#[derive(Debug, Clone, Serialize)]
pub struct Resolved {
    pub mode: Mode,
    pub example: Option<ExampleId>,
    pub params: Option<ExampleParams>,
    pub data: Option<InitialData>,
    pub families: Option<(FamilySpec, FamilySpec)>,
    pub support: Support,
    pub bbox: BBox,
    pub grid: [usize; 2],
    pub c_values: Vec<f64>,
    /// Parameters scanned for discriminant envelopes.
    pub envelope_c_values: Option<Vec<f64>>,
    pub samples: usize,
    pub norm: Option<[f64; 2]>,
    pub at: Option<[f64; 2]>,
    pub tol: f64,
    pub degeneration_tol: f64,
    pub output: Option<PathBuf>,
    pub svg: Option<PathBuf>,
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn bracket(v: [f64; 2], what: &str) -> Result<Bracket, Error> {
    Bracket::new(v[0], v[1]).map_err(|_| config_err(format!("{what} must satisfy lo < hi, got {v:?}")))
}

fn default_bbox(support: &Support) -> BBox {
    match *support {
        Support::Line { lo, hi } => {
            let w = hi - lo;
            BBox::new(lo - w / 2.0, hi + w / 2.0, -w / 2.0, w / 2.0).expect("ordered")
        }
        Support::UnitCircle => BBox::new(-1.5, 1.5, -1.5, 1.5).expect("ordered"),
    }
}

/// Named constants referenced by an inline family expression.
fn family_constants(phi: &Expression, a: f64, b: f64) -> Vec<(String, f64)> {
    phi.variables()
        .into_iter()
        .filter_map(|v| match v.as_str() {
            "a" => Some(("a".to_string(), a)),
            "b" => Some(("b".to_string(), b)),
            _ => None,
        })
        .collect()
}

pub fn resolve(cfg: &RunConfig) -> Result<Resolved, Error> {
    let tol = cfg.tol.unwrap_or(DEFAULT_TOL);
    if !(tol.is_finite() && tol > 0.0) {
        return Err(config_err(format!("tolerance must be positive, got {tol}")));
    }
    let inline_data = cfg.tau.is_some() || cfg.nu.is_some();
    let inline_families = cfg.phi1.is_some() || cfg.phi2.is_some() || cfg.families.is_some();
    let mut params = None;
    let (data, mut families, support, preset_bbox, preset_c) = if let Some(id) = cfg.example {
        if inline_data || inline_families {
            return Err(config_err("--example cannot be combined with inline expressions"));
        }
        let defaults = ExampleParams::default();
        let p = ExampleParams {
            a: cfg.a.unwrap_or(defaults.a),
            b: cfg.b.unwrap_or(defaults.b),
        };
        let ex = get_example(id, p)?;
        if id != ExampleId::Example1 {
            params = Some(p);
        }
        (ex.initial_data, Some(ex.families), ex.support, Some(ex.bbox), Some(ex.c_values))
    } else {
        let mut support = None;
        let data = if inline_data {
            let (Some(tau), Some(nu)) = (&cfg.tau, &cfg.nu) else {
                return Err(config_err("--tau and --nu must be given together"));
            };
            let s = cfg.support.ok_or_else(|| config_err("--support is required with --tau/--nu"))?;
            let s = bracket(s, "support")?;
            support = Some(Support::Line { lo: s.lo, hi: s.hi });
            Some(InitialData::new(s.lo, s.hi, tau.clone(), nu.clone())?)
        } else {
            None
        };
        let families = if let Some(f) = &cfg.families {
            Some(f.clone())
        } else if inline_families {
            let (Some(phi1), Some(phi2)) = (&cfg.phi1, &cfg.phi2) else {
                return Err(config_err("--phi1 and --phi2 must be given together"));
            };
            let form = cfg.form.unwrap_or(FamilyForm::XOfY);
            let c_range = bracket(cfg.c_range.unwrap_or(DEFAULT_C_RANGE), "c-range")?;
            let defaults = ExampleParams::default();
            let (a, b) = (cfg.a.unwrap_or(defaults.a), cfg.b.unwrap_or(defaults.b));
            let spec = |phi: &Expression, inv| {
                let mut s = FamilySpec::new(form, phi.clone(), inv, c_range);
                s.constants = family_constants(phi, a, b);
                s
            };
            Some((spec(phi1, Invariant::First), spec(phi2, Invariant::Second)))
        } else {
            None
        };
        if data.is_none() && families.is_none() {
            return Err(config_err("no problem given: pass --example, --tau/--nu or --phi1/--phi2"));
        }
        let support = match (support, cfg.support, &families) {
            (Some(s), _, _) => s,
            (None, Some(s), _) => {
                let s = bracket(s, "support")?;
                Support::Line { lo: s.lo, hi: s.hi }
            }
            (None, None, Some((f, _))) if f.form == FamilyForm::PolarImplicit => Support::UnitCircle,
            _ => return Err(config_err("--support is required with line families")),
        };
        (data, families, support, None, None)
    };

    let bbox = match cfg.bbox {
        Some([x0, x1, y0, y1]) => BBox::new(x0, x1, y0, y1)
            .ok_or_else(|| config_err(format!("bbox must satisfy x0 < x1 and y0 < y1, got {:?}", [x0, x1, y0, y1])))?,
        None => preset_bbox.unwrap_or_else(|| default_bbox(&support)),
    };
    if let Some((f1, f2)) = families.as_mut() {
        for f in [f1, f2] {
            if f.free_range.is_none() {
                f.free_range = match f.form {
                    FamilyForm::XOfY => Bracket::new(bbox.y_min, bbox.y_max).ok(),
                    FamilyForm::YOfX => Bracket::new(bbox.x_min, bbox.x_max).ok(),
                    FamilyForm::PolarImplicit => None,
                };
            }
        }
    }
    let grid = cfg.grid.unwrap_or([DEFAULT_GRID, DEFAULT_GRID]);
    if grid[0] == 0 || grid[1] == 0 {
        return Err(config_err("grid dimensions must be positive"));
    }
    let samples = cfg.samples.unwrap_or(match cfg.mode {
        Mode::InverseLine => 41,
        Mode::InverseCircle => 200,
        _ => 201,
    });
    if samples < 2 {
        return Err(config_err("at least 2 samples are required"));
    }
    let mode_needs_data = cfg.mode == Mode::Cauchy;
    let mode_needs_families = matches!(cfg.mode, Mode::InverseLine | Mode::InverseCircle);
    if mode_needs_data && data.is_none() {
        return Err(config_err("cauchy mode needs initial data (--tau/--nu or example1)"));
    }
    if mode_needs_families && families.is_none() {
        return Err(config_err("inverse modes need two families (--phi1/--phi2 or an example)"));
    }
    if cfg.mode == Mode::InverseLine && !matches!(support, Support::Line { .. }) {
        return Err(config_err("inverse-line needs a segment support"));
    }
    let c_values = match (&cfg.c_values, preset_c) {
        (Some(v), _) => v.clone(),
        (None, Some(v)) => v,
        (None, None) => match (&data, &families) {
            (Some(d), _) => d.support().subdivide(8),
            (None, Some(f)) => through_support(&f.0.clone().build()?, &support),
            (None, None) => Vec::new(),
        },
    };
    if c_values.iter().any(|c| !c.is_finite()) {
        return Err(config_err("c-values must be finite"));
    }
    Ok(Resolved {
        mode: cfg.mode,
        example: cfg.example,
        params,
        data,
        families,
        support,
        bbox,
        grid,
        c_values,
        envelope_c_values: cfg.c_values.clone(),
        samples,
        norm: cfg.norm,
        at: cfg.at,
        tol,
        degeneration_tol: DEGENERATION_TOL,
        output: cfg.output.clone(),
        svg: cfg.svg.clone(),
    })
}

/// Parameters of the first-family curves through evenly spaced support points.
fn through_support(fam: &CharacteristicFamily, support: &Support) -> Vec<f64> {
    let points: Vec<Point> = match *support {
        Support::Line { lo, hi } => (0..9).map(|k| Point::new(lo + (hi - lo) * k as f64 / 8.0, 0.0)).collect(),
        Support::UnitCircle => (0..12)
            .map(|k| {
                let t = TAU * (k as f64 + 0.5) / 12.0;
                Point::new(t.cos(), t.sin())
            })
            .collect(),
    };
    points.into_iter().filter_map(|p| param_for_point(fam, p).ok()).collect()
}

impl Resolved {
    fn tolerance(&self) -> Tolerance {
        Tolerance {
            abs_tol: self.tol,
            rel_tol: self.tol,
            max_iter: 200,
        }
    }

    fn solution(&self) -> Result<Option<ImplicitSolution>, Error> {
        self.data
            .as_ref()
            .map(|d| ImplicitSolution::new(d, &self.tolerance()))
            .transpose()
            .map_err(Error::from)
    }

    fn built_families(&self) -> Result<Option<(CharacteristicFamily, CharacteristicFamily)>, Error> {
        match &self.families {
            Some((f1, f2)) => Ok(Some((f1.clone().build()?, f2.clone().build()?))),
            None => Ok(None),
        }
    }

    fn envelope_grid(&self, range: Bracket) -> Vec<f64> {
        self.envelope_c_values
            .clone()
            .unwrap_or_else(|| range.subdivide(ENVELOPE_PARAMS - 1))
    }
}

/// What the forward-geometry modes operate on.
enum Source {
    Data(ImplicitSolution),
    Families(CharacteristicFamily, CharacteristicFamily),
}

fn source(r: &Resolved) -> Result<Source, Error> {
    if let Some(sol) = r.solution()? {
        return Ok(Source::Data(sol));
    }
    let (f1, f2) = r.built_families()?.expect("resolve checks that a source exists");
    Ok(Source::Families(f1, f2))
}

/// Runs `cfg`, writing stdout output to `out` and files where requested.
pub fn run(cfg: &RunConfig, out: &mut dyn Write) -> Result<(), Error> {
    let r = resolve(cfg)?;
    match r.mode {
        Mode::Cauchy => run_cauchy(&r, out),
        Mode::Trace => run_trace(&r, out),
        Mode::Envelope => run_envelope(&r, out),
        Mode::Degeneration => run_degeneration(&r, out),
        Mode::Domain => run_domain(&r, out),
        Mode::InverseLine => run_inverse_line(&r, out),
        Mode::InverseCircle => run_inverse_circle(&r, out),
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Error> {
    std::fs::write(path, bytes).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn io_err(e: std::io::Error) -> Error {
    Error::Io {
        path: "<stdout>".into(),
        source: e,
    }
}

/// Writes to the output file when one is configured, else to `out`.
fn emit(path: Option<&Path>, bytes: &[u8], out: &mut dyn Write) -> Result<(), Error> {
    match path {
        Some(p) => write_file(p, bytes),
        None => out.write_all(bytes).map_err(io_err),
    }
}

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>, Error> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let csv_err = |e: csv::Error| config_err(format!("csv: {e}"));
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(&row).map_err(csv_err)?;
    }
    w.into_inner().map_err(|e| config_err(format!("csv: {e}")))
}

fn json_bytes(value: &serde_json::Value) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s.into_bytes()
}

fn num(v: f64) -> String {
    format!("{v}")
}

/// `v` rounded to 12 significant digits, printed in shortest form.
fn rounded(v: f64) -> f64 {
    let r: f64 = format!("{v:.11e}").parse().expect("float round-trips");
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

fn run_cauchy(r: &Resolved, out: &mut dyn Write) -> Result<(), Error> {
    let sol = r.solution()?.expect("cauchy mode has data");
    let tol = r.tolerance();
    if let Some([x, y]) = r.at {
        let u = sol.solve_u(x, y, &tol)?;
        let line = format!("u = {}\n", rounded(u));
        return emit(r.output.as_deref(), line.as_bytes(), out);
    }
    let [nx, ny] = r.grid;
    let b = r.bbox;
    let nodes: Vec<(usize, usize)> = (0..ny).flat_map(|j| (0..nx).map(move |i| (i, j))).collect();
    let values = nodes
        .par_iter()
        .map(|&(i, j)| {
            let x = b.x_min + b.width() * (i as f64 + 0.5) / nx as f64;
            let y = b.y_min + b.height() * (j as f64 + 0.5) / ny as f64;
            match sol.solve_u(x, y, &tol) {
                Ok(u) => Ok((x, y, Some(u))),
                Err(e) if Error::from(e.clone()).is_domain() => Ok((x, y, None)),
                Err(e) => Err(Error::from(e)),
            }
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let rows = nodes.iter().zip(values).map(|(&(i, j), (x, y, u))| {
        vec![i.to_string(), j.to_string(), num(x), num(y), u.map(num).unwrap_or_default()]
    });
    emit(r.output.as_deref(), &csv_bytes(&["i", "j", "x", "y", "u"], rows)?, out)
}

/// A sampled curve with optional solution values.
struct Curve {
    family: Invariant,
    c: f64,
    points: Vec<Point>,
    u: Option<Vec<f64>>,
}

fn traced_curves(r: &Resolved, src: &Source) -> Result<Vec<Curve>, Error> {
    let b = r.bbox;
    let mut curves = Vec::new();
    match src {
        Source::Data(sol) => {
            let ys = Bracket::new(b.y_min, b.y_max).expect("ordered").subdivide(r.samples - 1);
            for &c in &r.c_values {
                for t in [sol.trace_first(c, &ys)?, sol.trace_second(c, &ys)?] {
                    curves.push(Curve {
                        family: t.curve.family,
                        c,
                        points: t.curve.points,
                        u: Some(t.curve.u_values),
                    });
                }
            }
        }
        Source::Families(f1, f2) => {
            for &c in &r.c_values {
                for f in [f1, f2] {
                    for points in family_curve(f, c, b, r.samples) {
                        curves.push(Curve {
                            family: f.invariant(),
                            c,
                            points,
                            u: None,
                        });
                    }
                }
            }
        }
    }
    Ok(curves)
}

/// Branches of the curve with parameter `c` inside (or near) `bbox`.
fn family_curve(f: &CharacteristicFamily, c: f64, b: BBox, samples: usize) -> Vec<Vec<Point>> {
    match f.form() {
        FamilyForm::XOfY | FamilyForm::YOfX => {
            let free = if f.form() == FamilyForm::XOfY {
                Bracket::new(b.y_min, b.y_max)
            } else {
                Bracket::new(b.x_min, b.x_max)
            }
            .expect("ordered")
            .subdivide(samples - 1);
            let mut branches = vec![Vec::new()];
            for s in free {
                match f.curve(c, &[s]).first() {
                    Some(&p) => branches.last_mut().expect("non-empty").push(p),
                    None if branches.last().is_some_and(|v| !v.is_empty()) => branches.push(Vec::new()),
                    None => {}
                }
            }
            branches.retain(|v| !v.is_empty());
            branches
        }
        FamilyForm::PolarImplicit => polar_curve(f, c, b, samples),
    }
}

/// Root scans of `F(r, θ, c) = 0` along rays, chained into branches by
/// nearest-neighbour matching between consecutive angles.
fn polar_curve(f: &CharacteristicFamily, c: f64, b: BBox, samples: usize) -> Vec<Vec<Point>> {
    let r_max = [(b.x_min, b.y_min), (b.x_min, b.y_max), (b.x_max, b.y_min), (b.x_max, b.y_max)]
        .iter()
        .map(|(x, y)| x.hypot(*y))
        .fold(0.0, f64::max);
    let radii = Bracket::new(1e-9, r_max).expect("ordered").subdivide(POLAR_RADII);
    let tol = Tolerance::new(1e-12, 1e-12, 200).expect("valid tolerance");
    let n = samples.max(4 * POLAR_RADII / 2);
    let link = 4.0 * b.width().hypot(b.height()) / n as f64 * TAU;
    let mut done: Vec<Vec<Point>> = Vec::new();
    let mut open: Vec<Vec<Point>> = Vec::new();
    for k in 0..n {
        let theta = TAU * (k as f64 + 0.5) / n as f64;
        let roots = scan_roots(|r| f.eval(&[r, theta], c).ok(), &radii, &tol);
        let pts: Vec<Point> = roots
            .into_iter()
            .map(|r| Point::new(r * theta.cos(), r * theta.sin()))
            .collect();
        let mut next: Vec<Vec<Point>> = Vec::new();
        let mut taken = vec![false; open.len()];
        for p in pts {
            let best = open
                .iter()
                .enumerate()
                .filter(|(i, _)| !taken[*i])
                .map(|(i, br)| {
                    let q = br.last().expect("branches are non-empty");
                    (i, (q.x - p.x).hypot(q.y - p.y))
                })
                .filter(|&(_, d)| d <= link)
                .min_by(|a, b| a.1.total_cmp(&b.1));
            match best {
                Some((i, _)) => {
                    taken[i] = true;
                    let mut br = std::mem::take(&mut open[i]);
                    br.push(p);
                    next.push(br);
                }
                None => next.push(vec![p]),
            }
        }
        done.extend(open.into_iter().filter(|br| !br.is_empty()));
        open = next;
    }
    done.extend(open);
    done.retain(|br| br.len() >= 2);
    done
}

fn trace_rows(curves: &[Curve]) -> Vec<Vec<String>> {
    let mut rows = Vec::new();
    for cv in curves {
        for (k, p) in cv.points.iter().enumerate() {
            let u = cv.u.as_ref().map(|u| num(u[k])).unwrap_or_default();
            rows.push(vec![cv.family.name().to_string(), num(cv.c), num(p.x), num(p.y), u]);
        }
    }
    rows
}

/// Discriminant envelopes of both families plus boundary envelopes of the
/// degeneration locus.
fn envelopes(r: &Resolved, src: &Source, grid: [usize; 2]) -> Result<Vec<Envelope>, Error> {
    let tol = r.tolerance();
    let mut out = Vec::new();
    let locus = locus(r, src, grid);
    match src {
        Source::Data(sol) => {
            let ys = Bracket::new(r.bbox.y_min, r.bbox.y_max).expect("ordered");
            let cs = r.envelope_grid(sol.data().support());
            for inv in [Invariant::First, Invariant::Second] {
                out.push(envelope_traced(&TracedFamily::new(sol, inv), &cs, ys, &tol));
            }
        }
        Source::Families(f1, f2) => {
            for f in [f1, f2] {
                if f.form() != FamilyForm::PolarImplicit {
                    out.push(envelope_discriminant(f, &r.envelope_grid(f.spec().c_range), &tol)?);
                }
            }
        }
    }
    out.extend(boundary_envelopes(&locus));
    Ok(out)
}

fn locus(r: &Resolved, src: &Source, [nx, ny]: [usize; 2]) -> DegenerationLocus {
    match src {
        Source::Data(sol) => {
            let (s1, s2) = solution_fields(sol);
            degeneration_locus(s1, s2, r.bbox, nx, ny, r.degeneration_tol)
        }
        Source::Families(f1, f2) => {
            degeneration_locus(family_field(f1), family_field(f2), r.bbox, nx, ny, r.degeneration_tol)
        }
    }
}

fn family_stroke(inv: Invariant) -> &'static str {
    match inv {
        Invariant::First => svg::FIRST_STROKE,
        Invariant::Second => svg::SECOND_STROKE,
    }
}

fn draw_support(plot: &mut Plot, r: &Resolved) {
    let step = r.bbox.width().max(r.bbox.height()) / 400.0;
    plot.curve(&r.support.sample(step), svg::SUPPORT_STROKE, 1.5, f64::INFINITY);
}

fn curves_svg(r: &Resolved, curves: &[Curve], envs: &[Envelope]) -> String {
    let mut plot = Plot::new(r.bbox);
    draw_support(&mut plot, r);
    for cv in curves {
        plot.curve(&cv.points, family_stroke(cv.family), 1.0, svg::WIDTH / 4.0);
    }
    for e in envs {
        let pts: Vec<Point> = e.points.iter().map(|p| p.point).collect();
        plot.curve(&pts, svg::ENVELOPE_STROKE, 2.5, svg::WIDTH / 10.0);
    }
    plot.finish()
}

fn run_trace(r: &Resolved, out: &mut dyn Write) -> Result<(), Error> {
    let src = source(r)?;
    let curves = traced_curves(r, &src)?;
    let csv = csv_bytes(&["family", "c", "x", "y", "u"], trace_rows(&curves))?;
    emit(r.output.as_deref(), &csv, out)?;
    if let Some(path) = &r.svg {
        let envs = envelopes(r, &src, [ENVELOPE_GRID, ENVELOPE_GRID])?;
        write_file(path, curves_svg(r, &curves, &envs).as_bytes())?;
    }
    Ok(())
}

fn run_envelope(r: &Resolved, out: &mut dyn Write) -> Result<(), Error> {
    let src = source(r)?;
    let grid = if r.grid == [DEFAULT_GRID, DEFAULT_GRID] {
        [ENVELOPE_GRID, ENVELOPE_GRID]
    } else {
        r.grid
    };
    let envs = envelopes(r, &src, grid)?;
    let report = json!({"config": r, "envelopes": envs});
    emit(r.output.as_deref(), &json_bytes(&report), out)?;
    if let Some(path) = &r.svg {
        let curves = traced_curves(r, &src)?;
        write_file(path, curves_svg(r, &curves, &envs).as_bytes())?;
    }
    Ok(())
}

fn run_degeneration(r: &Resolved, out: &mut dyn Write) -> Result<(), Error> {
    let src = source(r)?;
    let locus = locus(r, &src, r.grid);
    let envs = boundary_envelopes(&locus);
    let report = json!({
        "config": r,
        "cells": locus.cells.len(),
        "points": locus.points,
        "envelopes": envs,
    });
    emit(r.output.as_deref(), &json_bytes(&report), out)?;
    if let Some(path) = &r.svg {
        let mut plot = Plot::new(r.bbox);
        draw_support(&mut plot, r);
        let pts: Vec<Point> = locus.points.iter().map(|p| p.point).collect();
        plot.dots(&pts, svg::ENVELOPE_STROKE, 1.5);
        write_file(path, plot.finish().as_bytes())?;
    }
    Ok(())
}

fn run_domain(r: &Resolved, out: &mut dyn Write) -> Result<(), Error> {
    let src = source(r)?;
    let [nx, ny] = r.grid;
    let grid = match &src {
        Source::Data(sol) => coverage_mask(
            &TracedFamily::new(sol, Invariant::First),
            &TracedFamily::new(sol, Invariant::Second),
            &r.support,
            r.bbox,
            nx,
            ny,
        ),
        Source::Families(f1, f2) => coverage_mask(f1, f2, &r.support, r.bbox, nx, ny),
    };
    let gaps = find_gaps(&grid);
    let classes = [CellClass::Covered, CellClass::Support, CellClass::ExteriorUncovered, CellClass::Gap];
    let counts: serde_json::Map<String, serde_json::Value> =
        classes.iter().map(|&c| (c.name().to_string(), grid.count(c).into())).collect();
    let report = json!({
        "config": r,
        "counts": counts,
        "gap_count": gaps.len(),
        "gaps": gaps
            .iter()
            .map(|g| json!({"cells": g.cells.len(), "area": g.area, "bbox": g.bbox}))
            .collect::<Vec<_>>(),
    });
    out.write_all(&json_bytes(&report)).map_err(io_err)?;
    if let Some(path) = &r.output {
        let rows = (0..ny).flat_map(|j| (0..nx).map(move |i| (i, j))).map(|(i, j)| {
            let p = grid.cell_center(i, j);
            vec![i.to_string(), j.to_string(), num(p.x), num(p.y), grid.class(i, j).name().to_string()]
        });
        write_file(path, &csv_bytes(&["i", "j", "x", "y", "class"], rows)?)?;
    }
    if let Some(path) = &r.svg {
        let mut plot = Plot::new(r.bbox);
        let (w, h) = (grid.cell_width(), grid.cell_height());
        for j in 0..ny {
            for i in 0..nx {
                let fill = match grid.class(i, j) {
                    CellClass::Gap => "#e8a33d",
                    CellClass::ExteriorUncovered => "#dddddd",
                    _ => continue,
                };
                let p = grid.cell_center(i, j);
                plot.rect(p.x - w / 2.0, p.x + w / 2.0, p.y - h / 2.0, p.y + h / 2.0, fill);
            }
        }
        draw_support(&mut plot, r);
        write_file(path, plot.finish().as_bytes())?;
    }
    Ok(())
}

fn run_inverse_line(r: &Resolved, out: &mut dyn Write) -> Result<(), Error> {
    let (f1, f2) = r.built_families()?.expect("inverse modes have families");
    let Support::Line { lo, hi } = r.support else {
        unreachable!("resolve checks the support")
    };
    let interval = Bracket::new(lo, hi).expect("ordered");
    let norm = match r.norm {
        Some([s, u]) => (s, u),
        None if interval.contains(0.0) => (0.0, 0.0),
        None => (lo, 0.0),
    };
    let rec = recover_line(&f1, &f2, interval, r.samples, norm)?;
    let rows = rec
        .samples
        .iter()
        .map(|s| vec![num(s.x), num(s.tau_prime), num(s.nu), num(s.tau)]);
    emit(r.output.as_deref(), &csv_bytes(&["x", "tau_prime", "nu", "tau"], rows)?, out)
}

/// `n` angles spread over `[margin, 2π − margin]`, with `extra` inserted.
fn circle_angles(n: usize, extra: f64) -> Vec<f64> {
    let mut t = Bracket::new(CIRCLE_MARGIN, TAU - CIRCLE_MARGIN)
        .expect("ordered")
        .subdivide(n - 1);
    if !t.iter().any(|&v| (v - extra).abs() < 1e-12) {
        t.push(extra);
        t.sort_by(f64::total_cmp);
    }
    t
}

fn run_inverse_circle(r: &Resolved, out: &mut dyn Write) -> Result<(), Error> {
    let (f1, f2) = r.built_families()?.expect("inverse modes have families");
    let norm = r.norm.map(|[s, u]| (s, u)).unwrap_or((FRAC_PI_2, 0.0));
    let thetas = circle_angles(r.samples, norm.0);
    let rec = recover_circle(&f1, &f2, &thetas, norm)?;
    let rows = rec.samples.iter().map(|s| {
        vec![num(s.theta), num(s.u_x), num(s.u_y), num(s.u_theta), num(s.u_r), num(s.u)]
    });
    emit(
        r.output.as_deref(),
        &csv_bytes(&["theta", "u_x", "u_y", "u_theta", "u_r", "u"], rows)?,
        out,
    )
}
