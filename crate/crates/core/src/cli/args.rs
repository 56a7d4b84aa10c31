//! Command-line flags and the JSON run configuration they map onto.

use crate::corpus::ExampleId;
use crate::expr::Expression;
use crate::inverse::{FamilyForm, FamilySpec};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "charflow", version, about = "Characteristics, inverse recovery and domain geometry")]
pub struct Cli {
    /// Report errors as JSON on standard error.
    #[arg(long, global = true)]
    pub json_errors: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the Cauchy problem at a point or on a grid.
    Cauchy(Opts),
    /// Sample characteristic curves of both families.
    Trace(Opts),
    /// Envelopes of the characteristic families.
    Envelope(Opts),
    /// Parabolic degeneration locus on a grid.
    Degeneration(Opts),
    /// Coverage classes and gaps of the definition domain.
    Domain(Opts),
    /// Recover tau', nu and tau on a segment of y = 0.
    InverseLine(Opts),
    /// Recover the gradient and u on the unit circle.
    InverseCircle(Opts),
    /// Run a JSON configuration file.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Cauchy,
    Trace,
    Envelope,
    Degeneration,
    Domain,
    InverseLine,
    InverseCircle,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Opts {
    /// Built-in preset: example1, example2 or example3.
    #[arg(long)]
    pub example: Option<ExampleId>,
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<f64>,
    /// Initial value u(x, 0).
    #[arg(long, allow_hyphen_values = true)]
    pub tau: Option<Expression>,
    /// Initial normal derivative u_y(x, 0).
    #[arg(long, allow_hyphen_values = true)]
    pub nu: Option<Expression>,
    /// First family (u + y constant along its curves).
    #[arg(long, allow_hyphen_values = true)]
    pub phi1: Option<Expression>,
    /// Second family (u − y constant along its curves).
    #[arg(long, allow_hyphen_values = true)]
    pub phi2: Option<Expression>,
    /// How phi1 and phi2 are written: y_of_x, x_of_y or polar.
    #[arg(long, value_parser = parse_form)]
    pub form: Option<FamilyForm>,
    #[arg(long, value_name = "LO,HI", value_parser = list::<2>, allow_hyphen_values = true)]
    pub support: Option<[f64; 2]>,
    #[arg(long, value_name = "X,Y", value_parser = list::<2>, allow_hyphen_values = true)]
    pub at: Option<[f64; 2]>,
    #[arg(long, value_name = "V1,V2,...", value_parser = values, allow_hyphen_values = true)]
    pub c_values: Option<::std::vec::Vec<f64>>,
    /// Parameter range scanned for the curve through a point.
    #[arg(long, value_name = "LO,HI", value_parser = list::<2>, allow_hyphen_values = true)]
    pub c_range: Option<[f64; 2]>,
    #[arg(long, value_name = "X0,X1,Y0,Y1", value_parser = list::<4>, allow_hyphen_values = true)]
    pub bbox: Option<[f64; 4]>,
    #[arg(long, value_name = "NX,NY", value_parser = counts)]
    pub grid: Option<[usize; 2]>,
    /// Normalization point and value: tau(s) = u, or u(1, s) = u on the circle.
    #[arg(long, value_name = "S,U", value_parser = list::<2>, allow_hyphen_values = true)]
    pub norm: Option<[f64; 2]>,
    /// Number of samples along curves or the support.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Root-finding and quadrature tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(short = 'o', long = "output")]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

/// Everything a run needs; unset fields take mode and source defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Mode,
    #[serde(default)]
    pub example: Option<ExampleId>,
    #[serde(default)]
    pub a: Option<f64>,
    #[serde(default)]
    pub b: Option<f64>,
    #[serde(default)]
    pub tau: Option<Expression>,
    #[serde(default)]
    pub nu: Option<Expression>,
    #[serde(default)]
    pub phi1: Option<Expression>,
    #[serde(default)]
    pub phi2: Option<Expression>,
    #[serde(default)]
    pub form: Option<FamilyForm>,
    /// Full family specifications; take precedence over `phi1`/`phi2`.
    #[serde(default)]
    pub families: Option<(FamilySpec, FamilySpec)>,
    #[serde(default)]
    pub support: Option<[f64; 2]>,
    #[serde(default)]
    pub at: Option<[f64; 2]>,
    #[serde(default)]
    pub c_values: Option<Vec<f64>>,
    #[serde(default)]
    pub c_range: Option<[f64; 2]>,
    #[serde(default)]
    pub bbox: Option<[f64; 4]>,
    #[serde(default)]
    pub grid: Option<[usize; 2]>,
    #[serde(default)]
    pub norm: Option<[f64; 2]>,
    #[serde(default)]
    pub samples: Option<usize>,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub svg: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_opts(mode: Mode, o: Opts) -> Self {
        Self {
            mode,
            example: o.example,
            a: o.a,
            b: o.b,
            tau: o.tau,
            nu: o.nu,
            phi1: o.phi1,
            phi2: o.phi2,
            form: o.form,
            families: None,
            support: o.support,
            at: o.at,
            c_values: o.c_values,
            c_range: o.c_range,
            bbox: o.bbox,
            grid: o.grid,
            norm: o.norm,
            samples: o.samples,
            tol: o.tol,
            output: o.output,
            svg: o.svg,
        }
    }
}

fn parse_form(s: &str) -> Result<FamilyForm, String> {
    match s {
        "y_of_x" => Ok(FamilyForm::YOfX),
        "x_of_y" => Ok(FamilyForm::XOfY),
        "polar" => Ok(FamilyForm::PolarImplicit),
        _ => Err(format!("expected y_of_x, x_of_y or polar, got `{s}`")),
    }
}

fn values(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format!("`{t}` is not a finite number"))
        })
        .collect()
}

fn list<const N: usize>(s: &str) -> Result<[f64; N], String> {
    let v = values(s)?;
    <[f64; N]>::try_from(v.as_slice()).map_err(|_| format!("expected {N} comma-separated numbers, got {}", v.len()))
}

fn counts(s: &str) -> Result<[usize; 2], String> {
    let v: Vec<usize> = s
        .split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|_| format!("`{t}` is not a count")))
        .collect::<Result<_, _>>()?;
    <[usize; 2]>::try_from(v.as_slice()).map_err(|_| "expected NX,NY".to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_lists() {
        assert_eq!(list::<2>("-1, 2.5").unwrap(), [-1.0, 2.5]);
        assert!(list::<2>("1,2,3").is_err());
        assert!(list::<4>("1,x,3,4").is_err());
        assert!(values("1,nan").is_err());
        assert_eq!(counts("10,20").unwrap(), [10, 20]);
        assert!(counts("10").is_err());
    }

    #[test]
    fn config_round_trips() {
        let text = r#"{"mode":"inverse-line","example":"example1","norm":[0,0],"samples":41}"#;
        let cfg: RunConfig = serde_json::from_str(text).unwrap();
        assert_eq!(cfg.mode, Mode::InverseLine);
        assert_eq!(cfg.example, Some(ExampleId::Example1));
        let back: RunConfig = serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg);
        assert!(serde_json::from_str::<RunConfig>(r#"{"mode":"trace","bogus":1}"#).is_err());
    }
}
