//! Built-in examples with their closed-form reference formulas.

use crate::cauchy::{InitialData, Invariant};
use crate::expr::{Bindings, ExprError, Expression};
use crate::inverse::{Branch, FamilyForm, FamilySpec};
use crate::numerics::Bracket;
use crate::plane::{BBox, Support};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CorpusError {
    #[error("invalid parameters: {0}")]
    Parameter(String),
    #[error("unknown example `{0}` (expected example1, example2 or example3)")]
    NotFound(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExampleId {
    Example1,
    Example2,
    Example3,
}

impl ExampleId {
    pub const ALL: [ExampleId; 3] = [ExampleId::Example1, ExampleId::Example2, ExampleId::Example3];

    pub fn name(self) -> &'static str {
        match self {
            ExampleId::Example1 => "example1",
            ExampleId::Example2 => "example2",
            ExampleId::Example3 => "example3",
        }
    }
}

impl fmt::Display for ExampleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExampleId {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ExampleId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| CorpusError::NotFound(s.to_string()))
    }
}

/// Shape parameters of examples 2 and 3; ignored by example 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExampleParams {
    pub a: f64,
    pub b: f64,
}

impl Default for ExampleParams {
    fn default() -> Self {
        Self { a: 2.0, b: 1.0 }
    }
}

/// A ready-to-run example: data, families, plotting defaults and
/// reference formulas.
#[derive(Debug, Clone, PartialEq)]
pub struct ExampleBundle {
    pub id: ExampleId,
    pub params: ExampleParams,
    pub initial_data: Option<InitialData>,
    pub families: (FamilySpec, FamilySpec),
    pub support: Support,
    /// Window used by default for figures, degeneration and domain scans.
    pub bbox: BBox,
    /// Parameters of the curves drawn by default.
    pub c_values: Vec<f64>,
    oracles: Vec<(&'static str, Expression)>,
}

impl ExampleBundle {
    /// Names of the reference formulas.
    pub fn oracle_names(&self) -> Vec<&'static str> {
        self.oracles.iter().map(|(n, _)| *n).collect()
    }

    pub fn oracle(&self, name: &str) -> Option<&Expression> {
        self.oracles.iter().find(|(n, _)| *n == name).map(|(_, e)| e)
    }

    /// Evaluates a reference formula with `a` and `b` bound from the
    /// example parameters in addition to `vars`.
    pub fn eval_oracle(&self, name: &str, vars: &[(&str, f64)]) -> Result<f64, ExprError> {
        let e = self
            .oracle(name)
            .ok_or_else(|| ExprError::Unbound(format!("oracle {name}")))?;
        let mut b = Bindings::new()
            .with("a", self.params.a)
            .with("b", self.params.b);
        for (k, v) in vars {
            b.set(k, *v);
        }
        e.eval(&b)
    }
}

fn expr(text: &str) -> Expression {
    Expression::parse(text).expect("built-in expression parses")
}

fn bracket(lo: f64, hi: f64) -> Bracket {
    Bracket::new(lo, hi).expect("built-in bracket is ordered")
}

fn bbox(x0: f64, x1: f64, y0: f64, y1: f64) -> BBox {
    BBox::new(x0, x1, y0, y1).expect("built-in bbox is ordered")
}

pub fn get_example(id: ExampleId, params: ExampleParams) -> Result<ExampleBundle, CorpusError> {
    match id {
        ExampleId::Example1 => Ok(example1()),
        ExampleId::Example2 => {
            check_params(params)?;
            Ok(example2(params))
        }
        ExampleId::Example3 => {
            check_params(params)?;
            Ok(example3(params))
        }
    }
}

fn check_params(p: ExampleParams) -> Result<(), CorpusError> {
    if p.a.is_finite() && p.b.is_finite() && p.a > p.b && p.b > 0.0 {
        Ok(())
    } else {
        Err(CorpusError::Parameter(format!(
            "a > b > 0 is required, got a = {}, b = {}",
            p.a, p.b
        )))
    }
}

fn example1() -> ExampleBundle {
    let c_range = bracket(-1.0, 1.0);
    let free = Some(bracket(-1.5, 1.5));
    let mut fam1 = FamilySpec::new(
        FamilyForm::XOfY,
        expr("1/2*exp(c) - 1/2*exp(c - 2*y) + c - 2*y"),
        Invariant::First,
        c_range,
    );
    fam1.free_range = free;
    let mut fam2 = FamilySpec::new(
        FamilyForm::XOfY,
        expr("-1/2*exp(c) + 1/2*exp(c + 2*y) + c"),
        Invariant::Second,
        c_range,
    );
    fam2.free_range = free;
    let oracles = vec![
        ("tau", "x"),
        ("nu", "1 - exp(x)"),
        ("tau_prime", "1"),
        ("implicit_residual", "1/2*exp(u + y) + u - y - 1/2*exp(u - y) - x"),
        ("first_family", "1/2*exp(c) - 1/2*exp(c - 2*y) + c - 2*y"),
        ("second_family", "-1/2*exp(c) + 1/2*exp(c + 2*y) + c"),
        ("first_family_dc", "1/2*exp(c)*(1 - exp(-2*y)) + 1"),
        ("envelope", "exp(1 + x)*(1 - exp(2*y)) - 2"),
        ("envelope_c", "ln(2/(exp(-2*y) - 1))"),
        ("degeneration", "exp(u)*(exp(y) - exp(-y))/2 + 1"),
        ("first_slope_dx_dy", "exp(x) - 2"),
        ("second_slope_dx_dy", "exp(x)"),
    ];
    ExampleBundle {
        id: ExampleId::Example1,
        params: ExampleParams::default(),
        initial_data: Some(InitialData {
            a: -1.0,
            b: 1.0,
            tau: expr("x"),
            nu: expr("1 - exp(x)"),
        }),
        families: (fam1, fam2),
        support: Support::Line { lo: -1.0, hi: 1.0 },
        bbox: bbox(-3.0, 3.0, -1.0, 1.0),
        c_values: (0..=8).map(|k| -1.0 + 0.25 * k as f64).collect(),
        oracles: oracles.into_iter().map(|(n, t)| (n, expr(t))).collect(),
    }
}

fn example2(p: ExampleParams) -> ExampleBundle {
    let constants = vec![("a".to_string(), p.a), ("b".to_string(), p.b)];
    let free = Some(bracket(-p.b, p.a - p.b));
    let family = |phi: &str, inv| {
        let mut spec = FamilySpec::new(FamilyForm::XOfY, expr(phi), inv, bracket(-10.0, 10.0));
        spec.free_range = free;
        spec.constants = constants.clone();
        spec
    };
    let fam1 = family("c - a*sqrt(a/(y + b) - 1)", Invariant::First);
    let fam2 = family("c + a*sqrt(a/(y + b) - 1)", Invariant::Second);
    let k = "(2*b^2/a^2)*sqrt((a - b)/b)";
    let oracles = vec![
        ("tau_prime", format!("-{k}")),
        ("nu", "0".to_string()),
        ("tau", format!("-{k}*x")),
        ("first_param", "x + a*sqrt((a - b)/b)".to_string()),
        ("second_param", "x - a*sqrt((a - b)/b)".to_string()),
        ("first_slope_dx_dy", "a^2/(2*b^2*sqrt((a - b)/b))".to_string()),
        ("degeneration_upper", "a - b".to_string()),
        ("degeneration_lower", "-b".to_string()),
    ];
    let w = 2.0 * p.a;
    ExampleBundle {
        id: ExampleId::Example2,
        params: p,
        initial_data: None,
        families: (fam1, fam2),
        support: Support::Line { lo: -1.0, hi: 1.0 },
        bbox: bbox(-w, w, -p.b, p.a - p.b + 0.4 * p.b),
        c_values: (0..=8).map(|k| -w + 0.25 * w * k as f64).collect(),
        oracles: oracles.into_iter().map(|(n, t)| (n, expr(&t))).collect(),
    }
}

fn example3(p: ExampleParams) -> ExampleBundle {
    let constants = vec![("a".to_string(), p.a), ("b".to_string(), p.b)];
    let phi = "2*b*(1 - r*cos(theta))/(r^2 - 2*r*cos(theta) + 1) \
               - a^3/(a^2 + (2*b*r*sin(theta)/(r^2 - 2*r*cos(theta) + 1) + c)^2)";
    let family = |inv, branch| {
        let mut spec = FamilySpec::new(FamilyForm::PolarImplicit, expr(phi), inv, bracket(-256.0, 256.0));
        spec.branch = branch;
        spec.subdivisions = 512;
        spec.constants = constants.clone();
        spec
    };
    let fam1 = family(Invariant::First, Branch::Highest);
    let fam2 = family(Invariant::Second, Branch::Lowest);
    let alpha = "((2*b^2/a^2)*sqrt((a - b)/b))";
    let oracles = vec![
        ("alpha", alpha.to_string()),
        ("alpha_squared_identity", format!("{alpha}^2 - 4*b^3*(a - b)/a^4")),
        (
            "u_x",
            format!("(cos(theta)^2 - 4*b^3*(a - b)/a^4*sin(theta)^2)/{alpha}"),
        ),
        ("u_y", format!("({alpha}^2 + 1)/{alpha}*cos(theta)*sin(theta)")),
        ("u_theta", format!("{alpha}*sin(theta)")),
        ("u_r", format!("cos(theta)/{alpha}")),
        ("u", format!("-{alpha}*cos(theta)")),
        ("gap", "((x - 1)*a + b)^2 + y^2*a^2 - b^2".to_string()),
        ("family", phi.to_string()),
    ];
    ExampleBundle {
        id: ExampleId::Example3,
        params: p,
        initial_data: None,
        families: (fam1, fam2),
        support: Support::UnitCircle,
        bbox: bbox(-1.5, 1.2, -1.0, 1.0),
        c_values: (1..=12).map(|k| -6.0 + k as f64).collect(),
        oracles: oracles.into_iter().map(|(n, t)| (n, expr(&t))).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parameters_are_checked() {
        let bad = ExampleParams { a: 1.0, b: 2.0 };
        assert!(matches!(get_example(ExampleId::Example3, bad), Err(CorpusError::Parameter(_))));
        let bad = ExampleParams { a: 1.0, b: 0.0 };
        assert!(get_example(ExampleId::Example2, bad).is_err());
        assert!(matches!("example9".parse::<ExampleId>(), Err(CorpusError::NotFound(_))));
    }

    #[test]
    fn all_families_build() {
        for id in ExampleId::ALL {
            let ex = get_example(id, ExampleParams::default()).unwrap();
            ex.families.0.clone().build().unwrap();
            ex.families.1.clone().build().unwrap();
        }
    }
}
