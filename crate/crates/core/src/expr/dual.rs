//! Forward-mode dual numbers and the scalar abstraction shared by the plain
//! and differentiating evaluators.

use super::{Fault, Func};

/// `v + d·ε` with `ε² = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dual {
    pub v: f64,
    pub d: f64,
}

impl Dual {
    pub fn new(v: f64, d: f64) -> Self {
        Self { v, d }
    }
}

/// Arithmetic needed by the evaluator. Each operation reports domain faults
/// instead of producing NaN or infinities.
pub trait Scalar: Copy {
    fn constant(v: f64) -> Self;
    fn value(self) -> f64;
    fn add(self, o: Self) -> Self;
    fn sub(self, o: Self) -> Self;
    fn mul(self, o: Self) -> Self;
    fn div(self, o: Self) -> Result<Self, Fault>;
    fn neg(self) -> Self;
    fn pow(self, o: Self) -> Result<Self, Fault>;
    fn apply(self, f: Func) -> Result<Self, Fault>;
}

fn integer_exponent(e: f64) -> Option<i32> {
    (e.fract() == 0.0 && e.abs() <= i32::MAX as f64).then_some(e as i32)
}

fn finite(v: f64) -> Result<f64, Fault> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Fault::Overflow)
    }
}

fn real_pow(base: f64, e: f64) -> Result<f64, Fault> {
    if let Some(n) = integer_exponent(e) {
        if base == 0.0 && n < 0 {
            return Err(Fault::DivisionByZero);
        }
        return finite(base.powi(n));
    }
    if base < 0.0 {
        return Err(Fault::NegativeBasePower);
    }
    if base == 0.0 {
        return if e > 0.0 {
            Ok(0.0)
        } else {
            Err(Fault::DivisionByZero)
        };
    }
    finite(base.powf(e))
}

fn real_apply(x: f64, f: Func) -> Result<f64, Fault> {
    let v = match f {
        Func::Exp => x.exp(),
        Func::Ln => {
            if x <= 0.0 {
                return Err(Fault::LogNonPositive);
            }
            x.ln()
        }
        Func::Sqrt => {
            if x < 0.0 {
                return Err(Fault::SqrtNegative);
            }
            x.sqrt()
        }
        Func::Sin => x.sin(),
        Func::Cos => x.cos(),
        Func::Tan => x.tan(),
        Func::Atan => x.atan(),
        Func::Abs => x.abs(),
    };
    finite(v)
}

impl Scalar for f64 {
    fn constant(v: f64) -> Self {
        v
    }
    fn value(self) -> f64 {
        self
    }
    fn add(self, o: Self) -> Self {
        self + o
    }
    fn sub(self, o: Self) -> Self {
        self - o
    }
    fn mul(self, o: Self) -> Self {
        self * o
    }
    fn div(self, o: Self) -> Result<Self, Fault> {
        if o == 0.0 {
            Err(Fault::DivisionByZero)
        } else {
            finite(self / o)
        }
    }
    fn neg(self) -> Self {
        -self
    }
    fn pow(self, o: Self) -> Result<Self, Fault> {
        real_pow(self, o)
    }
    fn apply(self, f: Func) -> Result<Self, Fault> {
        real_apply(self, f)
    }
}

impl Scalar for Dual {
    fn constant(v: f64) -> Self {
        Dual { v, d: 0.0 }
    }
    fn value(self) -> f64 {
        self.v
    }
    fn add(self, o: Self) -> Self {
        Dual::new(self.v + o.v, self.d + o.d)
    }
    fn sub(self, o: Self) -> Self {
        Dual::new(self.v - o.v, self.d - o.d)
    }
    fn mul(self, o: Self) -> Self {
        Dual::new(self.v * o.v, self.d * o.v + self.v * o.d)
    }
    fn div(self, o: Self) -> Result<Self, Fault> {
        let v = self.v.div(o.v)?;
        Ok(Dual::new(v, finite((self.d - v * o.d) / o.v)?))
    }
    fn neg(self) -> Self {
        Dual::new(-self.v, -self.d)
    }
    fn pow(self, o: Self) -> Result<Self, Fault> {
        let v = real_pow(self.v, o.v)?;
        if o.d == 0.0 {
            if let Some(n) = integer_exponent(o.v) {
                let d = match n {
                    0 => 0.0,
                    _ => n as f64 * real_pow(self.v, (n - 1) as f64)? * self.d,
                };
                return Ok(Dual::new(v, finite(d)?));
            }
        }
        if self.v == 0.0 {
            // x^e at x = 0 with e > 0: derivative e·x^(e-1)·dx is finite only for e ≥ 1.
            if o.d != 0.0 || (o.v < 1.0 && self.d != 0.0) {
                return Err(Fault::Derivative);
            }
            let d = if o.v == 1.0 { self.d } else { 0.0 };
            return Ok(Dual::new(v, d));
        }
        let d = v * (o.d * self.v.ln() + o.v * self.d / self.v);
        Ok(Dual::new(v, finite(d)?))
    }
    fn apply(self, f: Func) -> Result<Self, Fault> {
        let v = real_apply(self.v, f)?;
        let x = self.v;
        let dfdx = match f {
            Func::Exp => v,
            Func::Ln => 1.0 / x,
            Func::Sqrt => {
                if v == 0.0 {
                    if self.d == 0.0 {
                        return Ok(Dual::new(0.0, 0.0));
                    }
                    return Err(Fault::Derivative);
                }
                0.5 / v
            }
            Func::Sin => x.cos(),
            Func::Cos => -x.sin(),
            Func::Tan => 1.0 + v * v,
            Func::Atan => 1.0 / (1.0 + x * x),
            Func::Abs => {
                if x == 0.0 {
                    if self.d == 0.0 {
                        return Ok(Dual::new(0.0, 0.0));
                    }
                    return Err(Fault::Derivative);
                }
                x.signum()
            }
        };
        Ok(Dual::new(v, finite(dfdx * self.d)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_rule() {
        let x = Dual::new(3.0, 1.0);
        let y = x.mul(x);
        assert_eq!(y, Dual::new(9.0, 6.0));
    }

    #[test]
    fn sqrt_at_zero_flags_derivative() {
        let x = Dual::new(0.0, 1.0);
        assert_eq!(x.apply(Func::Sqrt), Err(Fault::Derivative));
        assert_eq!(Dual::new(0.0, 0.0).apply(Func::Sqrt), Ok(Dual::new(0.0, 0.0)));
    }

    #[test]
    fn pow_negative_base_fractional_exponent() {
        assert_eq!((-2.0f64).pow(0.5), Err(Fault::NegativeBasePower));
        assert_eq!((-2.0f64).pow(3.0), Ok(-8.0));
        let d = Dual::new(-2.0, 1.0).pow(Dual::constant(3.0)).unwrap();
        assert_eq!(d, Dual::new(-8.0, 12.0));
    }

    #[test]
    fn variable_exponent() {
        // d/dx 2^x = 2^x ln 2
        let d = Dual::constant(2.0).pow(Dual::new(3.0, 1.0)).unwrap();
        assert!((d.d - 8.0 * 2f64.ln()).abs() < 1e-14);
    }
}
