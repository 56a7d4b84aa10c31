//! Forward problem: the implicit integral representation of the solution,
//! pointwise evaluation of `u(x, y)` and tracing of both characteristic
//! families through the data support.

use crate::expr::{ExprError, Expression, Program};
use crate::numerics::{
    find_root, integrate, invert_monotone, scan_roots, Bracket, MonotoneInverse, NumericsError, Tolerance,
};
use crate::plane::{Direction, Point};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Smallest `|τ'|` accepted on the support.
pub const DEGENERACY_THRESHOLD: f64 = 1e-8;
/// Samples used to check `τ'` on the support.
pub const SUPPORT_SAMPLES: usize = 257;
/// Subdivisions of the admissible `u` interval scanned by [`ImplicitSolution::solve_u`].
pub const ROOT_SCAN_SUBDIVISIONS: usize = 128;
/// Nodes of the cached integrals of `F1` and `G1`.
pub const CACHE_NODES: usize = 512;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CauchyError {
    #[error("invalid initial data: {0}")]
    InvalidData(String),
    #[error("evaluating {what} at x = {x}: {source}")]
    Eval {
        what: &'static str,
        x: f64,
        #[source]
        source: ExprError,
    },
    #[error("tau' vanishes on the support near x = {x}")]
    DegenerateSupport { x: f64 },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("({x}, {y}) is outside the definition domain")]
    OutsideDomain { x: f64, y: f64 },
    #[error("implicit relation has {} roots at ({x}, {y}): {roots:?}", roots.len())]
    AmbiguousRoot { x: f64, y: f64, roots: Vec<f64> },
    #[error("parameter {c} is outside the support [{a}, {b}]")]
    ParameterOutOfSupport { c: f64, a: f64, b: f64 },
    #[error("characteristic directions are undefined at ({x}, {y})")]
    SingularDirection { x: f64, y: f64 },
}

pub type Result<T> = std::result::Result<T, CauchyError>;

/// Which characteristic invariant is constant along a family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Invariant {
    /// `u + y = const`.
    First,
    /// `u - y = const`.
    Second,
}

impl Invariant {
    pub fn name(self) -> &'static str {
        match self {
            Invariant::First => "first",
            Invariant::Second => "second",
        }
    }
}

/// How [`ImplicitSolution::solve_u`] treats multiple roots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RootPolicy {
    /// Exactly one root in the admissible interval, otherwise an error.
    #[default]
    Unique,
    /// Keep only roots on the sheet connected to the support, where
    /// `∂R/∂u` has the sign of `τ'`; exactly one must remain.
    Physical,
}

/// Cauchy data `u(x, 0) = τ(x)`, `u_y(x, 0) = ν(x)` on `[a, b]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialData {
    pub a: f64,
    pub b: f64,
    pub tau: Expression,
    pub nu: Expression,
}

impl InitialData {
    pub fn new(a: f64, b: f64, tau: Expression, nu: Expression) -> Result<Self> {
        let data = Self { a, b, tau, nu };
        data.validate()?;
        Ok(data)
    }

    pub fn parse(a: f64, b: f64, tau: &str, nu: &str) -> Result<Self> {
        let parse = |what: &str, text: &str| {
            Expression::parse(text).map_err(|e| CauchyError::InvalidData(format!("{what}: {e}")))
        };
        Self::new(a, b, parse("tau", tau)?, parse("nu", nu)?)
    }

    fn validate(&self) -> Result<()> {
        if !(self.a.is_finite() && self.b.is_finite() && self.a < self.b) {
            return Err(CauchyError::InvalidData(format!(
                "support [{}, {}] must satisfy a < b",
                self.a, self.b
            )));
        }
        for (what, e) in [("tau", &self.tau), ("nu", &self.nu)] {
            if let Some(v) = e.variables().into_iter().find(|v| v != "x") {
                return Err(CauchyError::InvalidData(format!(
                    "{what} may only depend on x, found `{v}`"
                )));
            }
        }
        Ok(())
    }

    pub fn support(&self) -> Bracket {
        Bracket {
            lo: self.a,
            hi: self.b,
        }
    }
}

/// `τ` and `ν` compiled over the single slot `x`.
#[derive(Debug, Clone)]
struct DataPrograms {
    tau: Program,
    nu: Program,
}

impl DataPrograms {
    fn new(data: &InitialData) -> Result<Self> {
        let compile = |e: &Expression| {
            e.compile(&["x"])
                .map_err(|e| CauchyError::InvalidData(e.to_string()))
        };
        Ok(Self {
            tau: compile(&data.tau)?,
            nu: compile(&data.nu)?,
        })
    }

    fn tau(&self, x: f64) -> Result<f64> {
        self.tau.eval(&[x]).map_err(|f| eval_error("tau", x, f))
    }

    fn tau_prime(&self, x: f64) -> Result<f64> {
        self.tau
            .eval_dual(&[x], 0)
            .map(|(_, d)| d)
            .map_err(|f| eval_error("tau'", x, f))
    }

    fn nu(&self, x: f64) -> Result<f64> {
        self.nu.eval(&[x]).map_err(|f| eval_error("nu", x, f))
    }

    fn nu_prime(&self, x: f64) -> Result<f64> {
        match self.nu.eval_dual(&[x], 0) {
            Ok((_, d)) => Ok(d),
            Err(_) => {
                let h = 1e-6 * x.abs().max(1.0);
                Ok((self.nu(x + h)? - self.nu(x - h)?) / (2.0 * h))
            }
        }
    }
}

fn eval_error(what: &'static str, x: f64, f: crate::expr::Fault) -> CauchyError {
    CauchyError::Eval {
        what,
        x,
        source: ExprError::Domain(f),
    }
}

/// Cached `s ↦ ∫_a^s h` for `h = F1` or `G1`, stored at Chebyshev nodes with
/// values, first and second derivatives, interpolated by quintic Hermite.
#[derive(Debug, Clone)]
struct IntegralCache {
    nodes: Vec<f64>,
    value: Vec<f64>,
    d1: Vec<f64>,
    d2: Vec<f64>,
}

impl IntegralCache {
    fn build(
        support: Bracket,
        h: impl Fn(f64) -> Result<f64>,
        dh: impl Fn(f64) -> Result<f64>,
        tol: &Tolerance,
    ) -> Result<Self> {
        let n = CACHE_NODES;
        let (a, b) = (support.lo, support.hi);
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let nodes: Vec<f64> = (0..n)
            .map(|k| match k {
                0 => a,
                k if k == n - 1 => b,
                k => mid - half * (std::f64::consts::PI * k as f64 / (n - 1) as f64).cos(),
            })
            .collect();
        let d1 = nodes.iter().map(|&x| h(x)).collect::<Result<Vec<_>>>()?;
        let d2 = nodes.iter().map(|&x| dh(x)).collect::<Result<Vec<_>>>()?;
        let mut value = Vec::with_capacity(n);
        value.push(0.0);
        let first_error = std::cell::RefCell::new(None);
        for w in nodes.windows(2) {
            let piece = integrate(
                |t| match h(t) {
                    Ok(v) => v,
                    Err(e) => {
                        first_error.borrow_mut().get_or_insert(e);
                        f64::NAN
                    }
                },
                w[0],
                w[1],
                tol,
            );
            if let Some(e) = first_error.borrow_mut().take() {
                return Err(e);
            }
            value.push(value.last().unwrap() + piece?);
        }
        Ok(Self {
            nodes,
            value,
            d1,
            d2,
        })
    }

    fn eval(&self, s: f64) -> Result<f64> {
        let (a, b) = (self.nodes[0], self.nodes[self.nodes.len() - 1]);
        let slack = 1e-12 * (b - a);
        if !(s >= a - slack && s <= b + slack) {
            return Err(NumericsError::OutOfRange { z: s, lo: a, hi: b }.into());
        }
        let s = s.clamp(a, b);
        let k = match self.nodes.partition_point(|&x| x <= s) {
            0 => 0,
            p => (p - 1).min(self.nodes.len() - 2),
        };
        let h = self.nodes[k + 1] - self.nodes[k];
        let t = (s - self.nodes[k]) / h;
        let (t2, t3) = (t * t, t * t * t);
        let (t4, t5) = (t3 * t, t3 * t2);
        let h0 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
        let h1 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
        let h2 = 0.5 * t2 - 1.5 * t3 + 1.5 * t4 - 0.5 * t5;
        let h3 = 0.5 * t3 - t4 + 0.5 * t5;
        let h4 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
        let h5 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
        Ok(self.value[k] * h0
            + h * self.d1[k] * h1
            + h * h * self.d2[k] * h2
            + h * h * self.d2[k + 1] * h3
            + h * self.d1[k + 1] * h4
            + self.value[k + 1] * h5)
    }
}

type TauFn = Box<dyn Fn(f64) -> f64 + Send + Sync>;

/// The solution of the Cauchy problem in implicit form
/// `x = a + ∫_a^{T(u+y)} F1 + ∫_a^{T(u−y)} G1` with `F1 = (1−ν)/2`,
/// `G1 = (1+ν)/2` and `T` the inverse of `τ` on the support.
pub struct ImplicitSolution {
    data: InitialData,
    programs: DataPrograms,
    inverse: MonotoneInverse<TauFn>,
    cache_f: IntegralCache,
    cache_g: IntegralCache,
    tol: Tolerance,
}

impl std::fmt::Debug for ImplicitSolution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ImplicitSolution")
            .field("data", &self.data)
            .field("tau_range", &self.tau_range())
            .field("increasing", &self.increasing())
            .finish()
    }
}

/// Builds the implicit solution with the default tolerance.
pub fn build_solution(data: &InitialData) -> Result<ImplicitSolution> {
    ImplicitSolution::new(data, &Tolerance::default())
}

impl ImplicitSolution {
    pub fn new(data: &InitialData, tol: &Tolerance) -> Result<Self> {
        data.validate()?;
        let programs = DataPrograms::new(data)?;
        let support = data.support();

        let xs = support.subdivide(SUPPORT_SAMPLES - 1);
        let slopes = xs
            .iter()
            .map(|&x| programs.tau_prime(x))
            .collect::<Result<Vec<_>>>()?;
        for (i, &d) in slopes.iter().enumerate() {
            if d.abs() <= DEGENERACY_THRESHOLD {
                return Err(CauchyError::DegenerateSupport { x: xs[i] });
            }
            if i > 0 && d.signum() != slopes[i - 1].signum() {
                let bracket = Bracket::new(xs[i - 1], xs[i])?;
                let x = find_root(
                    |t| programs.tau_prime(t).unwrap_or(f64::NAN),
                    bracket,
                    tol,
                )
                .unwrap_or(0.5 * (xs[i - 1] + xs[i]));
                return Err(CauchyError::DegenerateSupport { x });
            }
        }

        let tau_program = programs.tau.clone();
        let tau_fn: TauFn = Box::new(move |x| tau_program.eval(&[x]).unwrap_or(f64::NAN));
        let inverse_tol = Tolerance {
            abs_tol: 1e-14,
            rel_tol: 1e-15,
            max_iter: 200,
        };
        let inverse = invert_monotone(tau_fn, support, &inverse_tol).map_err(|e| match e {
            NumericsError::NotMonotone { at } => CauchyError::DegenerateSupport { x: at },
            e => e.into(),
        })?;

        let cache_tol = Tolerance {
            abs_tol: (tol.abs_tol / 10.0).min(1e-13),
            rel_tol: (tol.rel_tol / 10.0).min(1e-13),
            max_iter: tol.max_iter.max(200),
        };
        let p = &programs;
        let cache_f = IntegralCache::build(
            support,
            |t| Ok(0.5 * (1.0 - p.nu(t)?)),
            |t| Ok(-0.5 * p.nu_prime(t)?),
            &cache_tol,
        )?;
        let cache_g = IntegralCache::build(
            support,
            |t| Ok(0.5 * (1.0 + p.nu(t)?)),
            |t| Ok(0.5 * p.nu_prime(t)?),
            &cache_tol,
        )?;
        Ok(Self {
            data: data.clone(),
            programs,
            inverse,
            cache_f,
            cache_g,
            tol: *tol,
        })
    }

    pub fn data(&self) -> &InitialData {
        &self.data
    }

    pub fn anchor(&self) -> f64 {
        self.data.a
    }

    pub fn tolerance(&self) -> &Tolerance {
        &self.tol
    }

    pub fn tau_range(&self) -> Bracket {
        self.inverse.range()
    }

    /// Orientation of `τ`: `true` when `τ' > 0`.
    pub fn increasing(&self) -> bool {
        self.inverse.increasing()
    }

    pub fn tau(&self, x: f64) -> Result<f64> {
        self.programs.tau(x)
    }

    pub fn tau_prime(&self, x: f64) -> Result<f64> {
        self.programs.tau_prime(x)
    }

    pub fn nu(&self, x: f64) -> Result<f64> {
        self.programs.nu(x)
    }

    /// `F1(t) = (1 − ν(t))/2`.
    pub fn f1(&self, t: f64) -> Result<f64> {
        Ok(0.5 * (1.0 - self.nu(t)?))
    }

    /// `G1(t) = (1 + ν(t))/2`.
    pub fn g1(&self, t: f64) -> Result<f64> {
        Ok(0.5 * (1.0 + self.nu(t)?))
    }

    /// The inverse `T` of `τ`.
    pub fn t_inverse(&self, z: f64) -> Result<f64> {
        Ok(self.inverse.eval(z)?)
    }

    /// `∫_a^s F1`.
    pub fn integral_f(&self, s: f64) -> Result<f64> {
        self.cache_f.eval(s)
    }

    /// `∫_a^s G1`.
    pub fn integral_g(&self, s: f64) -> Result<f64> {
        self.cache_g.eval(s)
    }

    /// Range of `u` with both `u + y` and `u − y` inside the range of `τ`.
    pub fn admissible(&self, y: f64) -> Option<Bracket> {
        let r = self.tau_range();
        let lo = r.lo + y.abs();
        let hi = r.hi - y.abs();
        if lo < hi {
            Some(Bracket { lo, hi })
        } else if lo == hi {
            Some(Bracket { lo, hi: lo })
        } else {
            None
        }
    }

    /// `a + ∫_a^{T(u+y)} F1 + ∫_a^{T(u−y)} G1 − x`.
    pub fn residual(&self, u: f64, x: f64, y: f64) -> Result<f64> {
        let tp = self.t_inverse(u + y)?;
        let tm = self.t_inverse(u - y)?;
        Ok(self.anchor() + self.integral_f(tp)? + self.integral_g(tm)? - x)
    }

    /// `(∂R/∂u, ∂R/∂y)` of the residual; independent of `x`.
    pub fn residual_partials(&self, u: f64, y: f64) -> Result<(f64, f64)> {
        let tp = self.t_inverse(u + y)?;
        let tm = self.t_inverse(u - y)?;
        let p = self.f1(tp)? / self.tau_prime(tp)?;
        let m = self.g1(tm)? / self.tau_prime(tm)?;
        Ok((p + m, p - m))
    }

    /// `u(x, y)` with the default (unique-root) policy.
    pub fn solve_u(&self, x: f64, y: f64, tol: &Tolerance) -> Result<f64> {
        self.solve_u_with(x, y, tol, RootPolicy::Unique)
    }

    pub fn solve_u_with(&self, x: f64, y: f64, tol: &Tolerance, policy: RootPolicy) -> Result<f64> {
        let Some(range) = self.admissible(y) else {
            return Err(CauchyError::OutsideDomain { x, y });
        };
        let grid = if range.lo == range.hi {
            vec![range.lo]
        } else {
            range.subdivide(ROOT_SCAN_SUBDIVISIONS)
        };
        let mut roots = scan_roots(|u| self.residual(u, x, y).ok(), &grid, tol);
        if policy == RootPolicy::Physical && roots.len() > 1 {
            let sign = if self.increasing() { 1.0 } else { -1.0 };
            roots.retain(|&u| {
                self.residual_partials(u, y)
                    .map(|(ru, _)| sign * ru > 0.0)
                    .unwrap_or(false)
            });
        }
        match roots.len() {
            0 => Err(CauchyError::OutsideDomain { x, y }),
            1 => Ok(roots[0]),
            _ => Err(CauchyError::AmbiguousRoot { x, y, roots }),
        }
    }

    /// `(u_x, u_y)` at a point of the solution surface, by implicit
    /// differentiation of the residual.
    pub fn gradient(&self, u: f64, y: f64) -> Result<(f64, f64)> {
        let (ru, ry) = self.residual_partials(u, y)?;
        if ru == 0.0 {
            return Err(CauchyError::SingularDirection { x: f64::NAN, y });
        }
        Ok((1.0 / ru, -ry / ru))
    }

    /// Directions of the first and second characteristic through `(x, y)`,
    /// on the sheet connected to the support. Their cross product is
    /// `−2 ∂R/∂u`, so the directions coincide exactly on envelopes.
    pub fn characteristic_directions(&self, x: f64, y: f64) -> Result<(Direction, Direction)> {
        let u = self.solve_u_with(x, y, &self.tol, RootPolicy::Physical)?;
        let tp = self.t_inverse(u + y)?;
        let tm = self.t_inverse(u - y)?;
        let first = 2.0 * self.g1(tm)? / self.tau_prime(tm)?;
        let second = -2.0 * self.f1(tp)? / self.tau_prime(tp)?;
        Ok((Direction::raw(first, -1.0), Direction::raw(second, -1.0)))
    }

    fn check_parameter(&self, c: f64) -> Result<()> {
        if self.data.support().contains(c) {
            Ok(())
        } else {
            Err(CauchyError::ParameterOutOfSupport {
                c,
                a: self.data.a,
                b: self.data.b,
            })
        }
    }

    /// The first-family characteristic through `(c, 0)`:
    /// `x(y) = a + ∫_a^c F1 + ∫_a^{T(τ(c)−2y)} G1`, `u = τ(c) − y`.
    pub fn trace_first(&self, c: f64, y_samples: &[f64]) -> Result<Trace> {
        self.check_parameter(c)?;
        let tc = self.tau(c)?;
        let base = self.anchor() + self.integral_f(c)?;
        self.trace(Invariant::First, c, y_samples, |y| {
            let t = self.t_inverse(tc - 2.0 * y)?;
            Ok((base + self.integral_g(t)?, tc - y))
        })
    }

    /// The second-family characteristic through `(c, 0)`:
    /// `x(y) = a + ∫_a^{T(τ(c)+2y)} F1 + ∫_a^c G1`, `u = τ(c) + y`.
    pub fn trace_second(&self, c: f64, y_samples: &[f64]) -> Result<Trace> {
        self.check_parameter(c)?;
        let tc = self.tau(c)?;
        let base = self.anchor() + self.integral_g(c)?;
        self.trace(Invariant::Second, c, y_samples, |y| {
            let t = self.t_inverse(tc + 2.0 * y)?;
            Ok((base + self.integral_f(t)?, tc + y))
        })
    }

    fn trace(
        &self,
        family: Invariant,
        c: f64,
        y_samples: &[f64],
        point: impl Fn(f64) -> Result<(f64, f64)>,
    ) -> Result<Trace> {
        let mut curve = CharacteristicCurve {
            family,
            c,
            points: Vec::new(),
            u_values: Vec::new(),
        };
        let mut dropped = Vec::new();
        for &y in y_samples {
            match point(y) {
                Ok((x, u)) => {
                    curve.points.push(Point::new(x, y));
                    curve.u_values.push(u);
                }
                Err(CauchyError::Numerics(NumericsError::OutOfRange { .. })) => dropped.push(y),
                Err(e) => return Err(e),
            }
        }
        Ok(Trace { curve, dropped })
    }
}

/// A characteristic curve through `(c, 0)` with the solution values on it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharacteristicCurve {
    pub family: Invariant,
    pub c: f64,
    pub points: Vec<Point>,
    pub u_values: Vec<f64>,
}

/// Result of tracing: the curve and the `y` samples that fell outside the
/// range where the curve is defined.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub curve: CharacteristicCurve,
    pub dropped: Vec<f64>,
}

/// Both characteristic directions at a support point, as normalized
/// `(dx, dy)` pairs: first `(ν+1, −τ')`, second `(ν−1, −τ')`.
pub fn support_slopes(data: &InitialData, x0: f64) -> Result<(Direction, Direction)> {
    if !data.support().contains(x0) {
        return Err(CauchyError::ParameterOutOfSupport {
            c: x0,
            a: data.a,
            b: data.b,
        });
    }
    let p = DataPrograms::new(data)?;
    let nu = p.nu(x0)?;
    let tp = p.tau_prime(x0)?;
    let dir = |dx: f64| {
        Direction::new(dx, -tp).ok_or(CauchyError::SingularDirection { x: x0, y: 0.0 })
    };
    Ok((dir(nu + 1.0)?, dir(nu - 1.0)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example(tau: &str, nu: &str) -> ImplicitSolution {
        build_solution(&InitialData::parse(-1.0, 1.0, tau, nu).unwrap()).unwrap()
    }

    #[test]
    fn cache_matches_closed_form() {
        let sol = example("x", "1 - exp(x)");
        for k in 0..=40 {
            let s = -1.0 + k as f64 / 20.0;
            let f = 0.5 * (s.exp() - (-1f64).exp());
            assert!((sol.integral_f(s).unwrap() - f).abs() < 1e-13);
            let g = (s + 1.0) - f;
            assert!((sol.integral_g(s).unwrap() - g).abs() < 1e-13);
        }
    }

    #[test]
    fn symmetric_data_gives_identity() {
        let sol = example("x", "0");
        assert_eq!(sol.f1(0.3).unwrap(), 0.5);
        let u = sol.solve_u(0.25, 0.1, &Tolerance::default()).unwrap();
        assert!((u - 0.25).abs() < 1e-12);
        assert!((sol.residual(0.4, 0.1, 0.3).unwrap() - 0.3).abs() < 1e-13);
    }

    #[test]
    fn decreasing_tau() {
        let sol = example("-2*x", "0.5");
        assert!(!sol.increasing());
        assert_eq!(sol.tau_range(), Bracket { lo: -2.0, hi: 2.0 });
        let u = sol.solve_u(0.3, 0.0, &Tolerance::default()).unwrap();
        assert!((u + 0.6).abs() < 1e-10);
    }

    #[test]
    fn degenerate_support() {
        let data = InitialData::parse(-1.0, 1.0, "x^2", "0").unwrap();
        match build_solution(&data) {
            Err(CauchyError::DegenerateSupport { x }) => assert!(x.abs() < 1e-8),
            other => panic!("unexpected {other:?}"),
        }
        let data = InitialData::parse(-1.0, 0.9, "x^2", "0").unwrap();
        assert!(matches!(build_solution(&data), Err(CauchyError::DegenerateSupport { .. })));
    }

    #[test]
    fn rejects_foreign_variables() {
        assert!(InitialData::parse(0.0, 1.0, "x + y", "0").is_err());
        assert!(InitialData::parse(1.0, 0.0, "x", "0").is_err());
    }

    #[test]
    fn outside_admissible_interval() {
        let sol = example("x", "0");
        assert!(matches!(
            sol.solve_u(0.0, 1.5, &Tolerance::default()),
            Err(CauchyError::OutsideDomain { .. })
        ));
    }

    #[test]
    fn traces_leave_support_at_c() {
        let sol = example("x + x^3/3", "0.2*sin(x)");
        for c in [-0.7, 0.0, 0.4] {
            let t1 = sol.trace_first(c, &[0.0]).unwrap();
            let t2 = sol.trace_second(c, &[0.0]).unwrap();
            assert!((t1.curve.points[0].x - c).abs() < 1e-12);
            assert!((t2.curve.points[0].x - c).abs() < 1e-12);
        }
        assert!(sol.trace_first(1.5, &[0.0]).is_err());
        let far = sol.trace_first(0.0, &[0.0, 5.0]).unwrap();
        assert_eq!(far.dropped, vec![5.0]);
    }

    #[test]
    fn forward_directions_match_support_slopes() {
        let data = InitialData::parse(-1.0, 1.0, "x", "1 - exp(x)").unwrap();
        let sol = build_solution(&data).unwrap();
        let (f, s) = sol.characteristic_directions(0.3, 0.0).unwrap();
        let (f0, s0) = support_slopes(&data, 0.3).unwrap();
        assert!(f.normalized_cross(&f0).abs() < 1e-9);
        assert!(s.normalized_cross(&s0).abs() < 1e-9);
    }
}
