//! Inverse problem: recover the initial data from two a-priori families of
//! characteristic curves, on a segment of `y = 0` or on the unit circle.

use crate::cauchy::{CauchyError, ImplicitSolution, Invariant};
use crate::expr::{Expression, Program};
use crate::numerics::{scan_roots, Bracket, CubicSpline, NumericsError, Tolerance};
use crate::plane::{Direction, Point};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use thiserror::Error;

/// Default subdivisions of `c_range` scanned for the curve through a point.
pub const DEFAULT_SUBDIVISIONS: usize = 256;
/// Half-width of the angular band around `θ = 0` excluded on the circle.
pub const DEFAULT_NODE_BAND: f64 = 1e-3;
/// Relative threshold below which two directions count as parallel.
pub const PARALLEL_THRESHOLD: f64 = 1e-12;

const PARAM_TOL: Tolerance = Tolerance {
    abs_tol: 1e-14,
    rel_tol: 1e-14,
    max_iter: 200,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InverseError {
    #[error("invalid family: {0}")]
    InvalidFamily(String),
    #[error("no curve of the family passes through ({x}, {y})")]
    NoParameter { x: f64, y: f64 },
    #[error("{} curves of the family pass through ({x}, {y}): c = {candidates:?}", candidates.len())]
    AmbiguousParameter { x: f64, y: f64, candidates: Vec<f64> },
    #[error("({x}, {y}) is a singular point of the family")]
    SingularPoint { x: f64, y: f64 },
    #[error("characteristic directions coincide at ({x}, {y}): parabolic degeneration")]
    Degenerate { x: f64, y: f64 },
    #[error("family tagged {found} where the {expected} family is required")]
    ConventionMismatch {
        expected: &'static str,
        found: &'static str,
    },
    #[error("invalid sampling: {0}")]
    InvalidSampling(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Cauchy(#[from] CauchyError),
}

pub type Result<T> = std::result::Result<T, InverseError>;

/// How a family's curves are written.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyForm {
    /// `y = φ(x, c)`.
    YOfX,
    /// `x = φ(y, c)`.
    XOfY,
    /// `F(r, θ, c) = 0` in polar coordinates, `θ ∈ [0, 2π)`.
    #[serde(alias = "polar")]
    PolarImplicit,
}

impl FamilyForm {
    fn free_variables(self) -> &'static [&'static str] {
        match self {
            FamilyForm::YOfX => &["x"],
            FamilyForm::XOfY => &["y"],
            FamilyForm::PolarImplicit => &["r", "theta"],
        }
    }

    /// Name of the variable a family in explicit form is solved for.
    pub fn dependent(self) -> Option<&'static str> {
        match self {
            FamilyForm::YOfX => Some("y"),
            FamilyForm::XOfY => Some("x"),
            FamilyForm::PolarImplicit => None,
        }
    }
}

/// Which curve to take when several pass through a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// Several curves through a point is an error.
    #[default]
    Unique,
    /// The curve with the smallest parameter.
    Lowest,
    /// The curve with the largest parameter.
    Highest,
}

/// Serializable description of a one-parameter family of curves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub form: FamilyForm,
    pub phi: Expression,
    pub invariant: Invariant,
    pub c_range: Bracket,
    #[serde(default)]
    pub branch: Branch,
    #[serde(default = "default_subdivisions")]
    pub subdivisions: usize,
    /// Range of the free variable scanned for envelope points.
    #[serde(default)]
    pub free_range: Option<Bracket>,
    /// Values of named parameters appearing in `phi`.
    #[serde(default)]
    pub constants: Vec<(String, f64)>,
}

fn default_subdivisions() -> usize {
    DEFAULT_SUBDIVISIONS
}

impl FamilySpec {
    pub fn new(form: FamilyForm, phi: Expression, invariant: Invariant, c_range: Bracket) -> Self {
        Self {
            form,
            phi,
            invariant,
            c_range,
            branch: Branch::Unique,
            subdivisions: DEFAULT_SUBDIVISIONS,
            free_range: None,
            constants: Vec::new(),
        }
    }

    pub fn build(self) -> Result<CharacteristicFamily> {
        CharacteristicFamily::new(self)
    }
}

/// Operations the inverse solver and the geometry module need from a family.
pub trait Family: Sync {
    fn invariant(&self) -> Invariant;
    fn c_range(&self) -> Bracket;
    fn subdivisions(&self) -> usize;
    fn branch(&self) -> Branch;
    /// Function of `c` vanishing when the curve with parameter `c` passes
    /// through `p`; `None` where it is undefined.
    fn residual_at<'a>(&'a self, p: Point) -> Box<dyn FnMut(f64) -> Option<f64> + 'a>;
    /// Tangent of the curve with parameter `c` at `p`.
    fn direction(&self, p: Point, c: f64) -> Result<Direction>;
}

/// A family given by an expression.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacteristicFamily {
    spec: FamilySpec,
    program: Program,
    c_slot: usize,
}

impl CharacteristicFamily {
    pub fn new(spec: FamilySpec) -> Result<Self> {
        if spec.subdivisions < 2 {
            return Err(InverseError::InvalidFamily("subdivisions must be at least 2".into()));
        }
        if let Some((name, _)) = spec
            .constants
            .iter()
            .find(|(n, _)| n == "c" || spec.form.free_variables().contains(&n.as_str()))
        {
            return Err(InverseError::InvalidFamily(format!(
                "constant `{name}` shadows a family variable"
            )));
        }
        let mut vars: Vec<&str> = spec.form.free_variables().to_vec();
        let c_slot = vars.len();
        vars.push("c");
        vars.extend(spec.constants.iter().map(|(n, _)| n.as_str()));
        let program = spec
            .phi
            .compile(&vars)
            .map_err(|e| InverseError::InvalidFamily(e.to_string()))?;
        let mut fixed = vec![None; vars.len()];
        for (k, (_, v)) in spec.constants.iter().enumerate() {
            fixed[c_slot + 1 + k] = Some(*v);
        }
        let program = program.specialize(&fixed);
        Ok(Self {
            spec,
            program,
            c_slot,
        })
    }

    pub fn spec(&self) -> &FamilySpec {
        &self.spec
    }

    pub fn form(&self) -> FamilyForm {
        self.spec.form
    }

    fn args(&self) -> Vec<f64> {
        vec![f64::NAN; self.program.arity()]
    }

    /// `φ(s, c)` for explicit forms, `F(r, θ, c)` with `s = (r, θ)` packed
    /// as `free[0], free[1]` for the polar form.
    pub fn eval(&self, free: &[f64], c: f64) -> Result<f64> {
        let mut args = self.args();
        args[..free.len()].copy_from_slice(free);
        args[self.c_slot] = c;
        self.program
            .eval(&args)
            .map_err(|f| InverseError::InvalidFamily(format!("evaluation fault: {f}")))
    }

    /// Value and partial derivative with respect to argument `seed`, where
    /// the free variables come first and `c` follows them.
    pub fn eval_dual(&self, free: &[f64], c: f64, seed: usize) -> Option<(f64, f64)> {
        let mut args = self.args();
        args[..free.len()].copy_from_slice(free);
        args[self.c_slot] = c;
        self.program.eval_dual(&args, seed).ok()
    }

    /// Index of `c` among the arguments of [`eval_dual`](Self::eval_dual).
    pub fn c_slot(&self) -> usize {
        self.c_slot
    }

    /// Explicit forms: `(free, target)` at a point, i.e. `(x, y)` for
    /// `y = φ(x, c)` and `(y, x)` for `x = φ(y, c)`.
    fn split(&self, p: Point) -> Option<(f64, f64)> {
        match self.spec.form {
            FamilyForm::YOfX => Some((p.x, p.y)),
            FamilyForm::XOfY => Some((p.y, p.x)),
            FamilyForm::PolarImplicit => None,
        }
    }

    /// Points of the curve with parameter `c`, sampled at the given free
    /// variable values (explicit forms only). Samples where `φ` is undefined
    /// are skipped.
    pub fn curve(&self, c: f64, free: &[f64]) -> Vec<Point> {
        free.iter()
            .filter_map(|&s| {
                let v = self.eval(&[s], c).ok()?;
                match self.spec.form {
                    FamilyForm::YOfX => Some(Point::new(s, v)),
                    FamilyForm::XOfY => Some(Point::new(v, s)),
                    FamilyForm::PolarImplicit => None,
                }
            })
            .collect()
    }
}

impl Family for CharacteristicFamily {
    fn invariant(&self) -> Invariant {
        self.spec.invariant
    }

    fn c_range(&self) -> Bracket {
        self.spec.c_range
    }

    fn subdivisions(&self) -> usize {
        self.spec.subdivisions
    }

    fn branch(&self) -> Branch {
        self.spec.branch
    }

    fn residual_at<'a>(&'a self, p: Point) -> Box<dyn FnMut(f64) -> Option<f64> + 'a> {
        let mut fixed = vec![None; self.program.arity()];
        let target = match self.split(p) {
            Some((free, target)) => {
                fixed[0] = Some(free);
                target
            }
            None => {
                let (r, theta) = p.polar();
                fixed[0] = Some(r);
                fixed[1] = Some(theta);
                0.0
            }
        };
        let program = self.program.specialize(&fixed);
        let mut args = self.args();
        let slot = self.c_slot;
        Box::new(move |c| {
            args[slot] = c;
            program.eval(&args).ok().map(|v| v - target)
        })
    }

    fn direction(&self, p: Point, c: f64) -> Result<Direction> {
        let singular = InverseError::SingularPoint { x: p.x, y: p.y };
        let raw = match self.spec.form {
            FamilyForm::YOfX => {
                let (_, d) = self.eval_dual(&[p.x], c, 0).ok_or(singular.clone())?;
                Direction::raw(1.0, d)
            }
            FamilyForm::XOfY => {
                let (_, d) = self.eval_dual(&[p.y], c, 0).ok_or(singular.clone())?;
                Direction::raw(d, 1.0)
            }
            FamilyForm::PolarImplicit => {
                let (r, theta) = p.polar();
                let (_, f_r) = self.eval_dual(&[r, theta], c, 0).ok_or(singular.clone())?;
                let (_, f_t) = self.eval_dual(&[r, theta], c, 1).ok_or(singular.clone())?;
                let (dr, dt) = (f_t, -f_r);
                let (s, co) = theta.sin_cos();
                Direction::raw(co * dr - r * s * dt, s * dr + r * co * dt)
            }
        };
        Direction::new(raw.dx, raw.dy).ok_or(singular)
    }
}

fn scan_grid(fam: &dyn Family) -> Vec<f64> {
    fam.c_range().subdivide(fam.subdivisions())
}

/// Parameter of the curve of `fam` through `p`.
pub fn param_for_point(fam: &dyn Family, p: Point) -> Result<f64> {
    let roots = scan_roots(fam.residual_at(p), &scan_grid(fam), &PARAM_TOL);
    match (roots.len(), fam.branch()) {
        (0, _) => Err(InverseError::NoParameter { x: p.x, y: p.y }),
        (1, _) => Ok(roots[0]),
        (_, Branch::Lowest) => Ok(roots[0]),
        (_, Branch::Highest) => Ok(roots[roots.len() - 1]),
        (_, Branch::Unique) => Err(InverseError::AmbiguousParameter {
            x: p.x,
            y: p.y,
            candidates: roots,
        }),
    }
}

/// Whether some curve of `fam` passes through `p`.
pub fn covers(fam: &dyn Family, p: Point) -> bool {
    crate::numerics::has_root(fam.residual_at(p), &scan_grid(fam), &PARAM_TOL)
}

/// Parameter and tangent of the curve of `fam` through `p`.
pub fn slope_at(fam: &dyn Family, p: Point) -> Result<(f64, Direction)> {
    let c = param_for_point(fam, p)?;
    Ok((c, fam.direction(p, c)?))
}

/// The gradient `(u_x, u_y)` shared by the first-family direction `m1` and
/// the second-family direction `m2` at a point.
///
/// With `m̂ = dx/dy` this is `u_x = 2/(m̂₂ − m̂₁)`, `u_y = (m̂₁ + m̂₂)/(m̂₁ − m̂₂)`,
/// evaluated on the homogeneous pairs so that horizontal or vertical
/// tangents need no special treatment. On `y = 0` these are `(τ', ν)`.
pub fn recover_pointwise(m1: Direction, m2: Direction) -> Result<(f64, f64)> {
    let cross = m1.dx * m2.dy - m2.dx * m1.dy;
    let scale = m1.norm() * m2.norm();
    if !(cross.abs() > PARALLEL_THRESHOLD * scale) {
        return Err(InverseError::Degenerate {
            x: f64::NAN,
            y: f64::NAN,
        });
    }
    let u_x = 2.0 * m1.dy * m2.dy / (m2.dx * m1.dy - m1.dx * m2.dy);
    let u_y = (m1.dx * m2.dy + m2.dx * m1.dy) / cross;
    Ok((u_x, u_y))
}

fn check_pair(fam1: &dyn Family, fam2: &dyn Family) -> Result<()> {
    for (fam, expected) in [(fam1, Invariant::First), (fam2, Invariant::Second)] {
        if fam.invariant() != expected {
            return Err(InverseError::ConventionMismatch {
                expected: expected.name(),
                found: fam.invariant().name(),
            });
        }
    }
    Ok(())
}

fn gradient_at(fam1: &dyn Family, fam2: &dyn Family, p: Point) -> Result<(f64, f64)> {
    let (_, d1) = slope_at(fam1, p)?;
    let (_, d2) = slope_at(fam2, p)?;
    recover_pointwise(d1, d2).map_err(|e| match e {
        InverseError::Degenerate { .. } => InverseError::Degenerate { x: p.x, y: p.y },
        e => e,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineSample {
    pub x: f64,
    pub tau_prime: f64,
    pub nu: f64,
    pub tau: f64,
}

/// Data recovered on a segment of `y = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineRecovery {
    pub samples: Vec<LineSample>,
    /// `(x*, u*)` with `τ(x*) = u*`.
    pub normalization: (f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircleSample {
    pub theta: f64,
    pub u_x: f64,
    pub u_y: f64,
    pub u_theta: f64,
    pub u_r: f64,
    pub u: f64,
}

/// Data recovered on the unit circle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircleRecovery {
    pub samples: Vec<CircleSample>,
    /// `(θ*, u*)` with `u(1, θ*) = u*`.
    pub normalization: (f64, f64),
}

/// Cumulative integral from `s0` of the cubic spline through `(xs, ys)`.
fn normalized_integral(xs: &[f64], ys: &[f64], s0: f64, u0: f64) -> Result<Vec<f64>> {
    let spline = CubicSpline::new(xs, ys)?;
    Ok(xs.iter().map(|&s| u0 + spline.integral(s0, s)).collect())
}

/// Recovers `τ'`, `ν` and `τ` on `n` uniform samples of `interval`.
pub fn recover_line(
    fam1: &dyn Family,
    fam2: &dyn Family,
    interval: Bracket,
    n: usize,
    norm: (f64, f64),
) -> Result<LineRecovery> {
    check_pair(fam1, fam2)?;
    if n < 2 {
        return Err(InverseError::InvalidSampling("at least 2 samples are required".into()));
    }
    if !interval.contains(norm.0) {
        return Err(InverseError::InvalidSampling(format!(
            "normalization point {} is outside [{}, {}]",
            norm.0, interval.lo, interval.hi
        )));
    }
    let xs = interval.subdivide(n - 1);
    let grads = xs
        .par_iter()
        .map(|&x| gradient_at(fam1, fam2, Point::new(x, 0.0)))
        .collect::<Result<Vec<_>>>()?;
    let tau_prime: Vec<f64> = grads.iter().map(|g| g.0).collect();
    let tau = normalized_integral(&xs, &tau_prime, norm.0, norm.1)?;
    let samples = xs
        .iter()
        .zip(&grads)
        .zip(&tau)
        .map(|((&x, &(tau_prime, nu)), &tau)| LineSample {
            x,
            tau_prime,
            nu,
            tau,
        })
        .collect();
    Ok(LineRecovery {
        samples,
        normalization: norm,
    })
}

/// Recovers the gradient and `u` on the unit circle at the given angles,
/// which must be increasing and avoid the band `|θ mod 2π| < DEFAULT_NODE_BAND`.
pub fn recover_circle(
    fam1: &dyn Family,
    fam2: &dyn Family,
    thetas: &[f64],
    norm: (f64, f64),
) -> Result<CircleRecovery> {
    recover_circle_with_band(fam1, fam2, thetas, norm, DEFAULT_NODE_BAND)
}

pub fn recover_circle_with_band(
    fam1: &dyn Family,
    fam2: &dyn Family,
    thetas: &[f64],
    norm: (f64, f64),
    band: f64,
) -> Result<CircleRecovery> {
    check_pair(fam1, fam2)?;
    if thetas.len() < 2 || thetas.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(InverseError::InvalidSampling(
            "angles must be at least 2 and strictly increasing".into(),
        ));
    }
    let (first, last) = (thetas[0], thetas[thetas.len() - 1]);
    if !(norm.0 >= first && norm.0 <= last) {
        return Err(InverseError::InvalidSampling(format!(
            "normalization angle {} is outside [{first}, {last}]",
            norm.0
        )));
    }
    if let Some(&theta) = thetas.iter().find(|&&t| {
        let m = t.rem_euclid(TAU);
        m < band || TAU - m < band
    }) {
        return Err(InverseError::SingularPoint {
            x: theta.cos(),
            y: theta.sin(),
        });
    }
    let grads = thetas
        .par_iter()
        .map(|&t| gradient_at(fam1, fam2, Point::new(t.cos(), t.sin())))
        .collect::<Result<Vec<_>>>()?;
    let u_theta: Vec<f64> = thetas
        .iter()
        .zip(&grads)
        .map(|(&t, &(u_x, u_y))| -u_x * t.sin() + u_y * t.cos())
        .collect();
    let u = normalized_integral(thetas, &u_theta, norm.0, norm.1)?;
    let samples = thetas
        .iter()
        .zip(&grads)
        .zip(u_theta.iter().zip(&u))
        .map(|((&theta, &(u_x, u_y)), (&u_theta, &u))| CircleSample {
            theta,
            u_x,
            u_y,
            u_theta,
            u_r: u_x * theta.cos() + u_y * theta.sin(),
            u,
        })
        .collect();
    Ok(CircleRecovery {
        samples,
        normalization: norm,
    })
}

/// A characteristic family of a forward solution, parameterized by the
/// abscissa `c` where it leaves the support.
pub struct TracedFamily<'a> {
    sol: &'a ImplicitSolution,
    invariant: Invariant,
    subdivisions: usize,
}

impl<'a> TracedFamily<'a> {
    pub fn new(sol: &'a ImplicitSolution, invariant: Invariant) -> Self {
        Self {
            sol,
            invariant,
            subdivisions: DEFAULT_SUBDIVISIONS,
        }
    }

    /// `x` on the curve with parameter `c` at height `y`.
    pub fn x_at(&self, c: f64, y: f64) -> std::result::Result<f64, CauchyError> {
        let sol = self.sol;
        let tc = sol.tau(c)?;
        match self.invariant {
            Invariant::First => {
                let t = sol.t_inverse(tc - 2.0 * y)?;
                Ok(sol.anchor() + sol.integral_f(c)? + sol.integral_g(t)?)
            }
            Invariant::Second => {
                let t = sol.t_inverse(tc + 2.0 * y)?;
                Ok(sol.anchor() + sol.integral_f(t)? + sol.integral_g(c)?)
            }
        }
    }
    /// `∂x/∂c` along the family at height `y`; it vanishes on envelopes.
    pub fn dx_dc(&self, c: f64, y: f64) -> std::result::Result<f64, CauchyError> {
        let sol = self.sol;
        let tc = sol.tau(c)?;
        let tpc = sol.tau_prime(c)?;
        match self.invariant {
            Invariant::First => {
                let t = sol.t_inverse(tc - 2.0 * y)?;
                Ok(sol.f1(c)? + sol.g1(t)? * tpc / sol.tau_prime(t)?)
            }
            Invariant::Second => {
                let t = sol.t_inverse(tc + 2.0 * y)?;
                Ok(sol.f1(t)? * tpc / sol.tau_prime(t)? + sol.g1(c)?)
            }
        }
    }

    pub fn invariant_tag(&self) -> Invariant {
        self.invariant
    }
}

impl Family for TracedFamily<'_> {
    fn invariant(&self) -> Invariant {
        self.invariant
    }

    fn c_range(&self) -> Bracket {
        self.sol.data().support()
    }

    fn subdivisions(&self) -> usize {
        self.subdivisions
    }

    fn branch(&self) -> Branch {
        Branch::Unique
    }

    fn residual_at<'a>(&'a self, p: Point) -> Box<dyn FnMut(f64) -> Option<f64> + 'a> {
        Box::new(move |c| self.x_at(c, p.y).ok().map(|x| x - p.x))
    }

    fn direction(&self, p: Point, c: f64) -> Result<Direction> {
        let sol = self.sol;
        let tc = sol.tau(c)?;
        let dxdy = match self.invariant {
            Invariant::First => {
                let t = sol.t_inverse(tc - 2.0 * p.y)?;
                -2.0 * sol.g1(t)? / sol.tau_prime(t)?
            }
            Invariant::Second => {
                let t = sol.t_inverse(tc + 2.0 * p.y)?;
                2.0 * sol.f1(t)? / sol.tau_prime(t)?
            }
        };
        Direction::new(dxdy, 1.0).ok_or(InverseError::SingularPoint { x: p.x, y: p.y })
    }
}
