//! Deterministic scalar kernels: adaptive quadrature, bracketed root finding,
//! monotone inversion, root scanning and cubic spline integration.
//!
//! Every routine here is a pure function of its inputs. Closures returning a
//! non-finite value are reported as [`NumericsError::NonFinite`] rather than
//! propagated.

use serde::{Deserialize, Serialize};
use std::collections::BinaryHeap;
use thiserror::Error;

/// Default number of uniform samples used to check monotonicity.
pub const DEFAULT_MONOTONE_SAMPLES: usize = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("no convergence after {iterations} iterations (best estimate {estimate})")]
    NonConvergence { estimate: f64, iterations: usize },
    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    NoSignChange {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },
    #[error("function value is not finite at {at}")]
    NonFinite { at: f64 },
    #[error("{z} is outside the range [{lo}, {hi}] of the inverted function")]
    OutOfRange { z: f64, lo: f64, hi: f64 },
    #[error("function is not strictly monotone near {at}")]
    NotMonotone { at: f64 },
    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),
    #[error("invalid bracket [{lo}, {hi}]")]
    InvalidBracket { lo: f64, hi: f64 },
    #[error("spline needs at least 2 strictly increasing abscissae")]
    InvalidSpline,
}

pub type Result<T> = std::result::Result<T, NumericsError>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_iter: usize,
}

impl Tolerance {
    pub fn new(abs_tol: f64, rel_tol: f64, max_iter: usize) -> Result<Self> {
        if !(abs_tol > 0.0 && abs_tol.is_finite()) {
            return Err(NumericsError::InvalidTolerance(format!(
                "abs_tol must be positive, got {abs_tol}"
            )));
        }
        if !(rel_tol >= 0.0 && rel_tol.is_finite()) {
            return Err(NumericsError::InvalidTolerance(format!(
                "rel_tol must be non-negative, got {rel_tol}"
            )));
        }
        if max_iter == 0 {
            return Err(NumericsError::InvalidTolerance(
                "max_iter must be at least 1".into(),
            ));
        }
        Ok(Self {
            abs_tol,
            rel_tol,
            max_iter,
        })
    }

    /// Same limits with both tolerances divided by `factor`.
    pub fn tightened(&self, factor: f64) -> Self {
        Self {
            abs_tol: self.abs_tol / factor,
            rel_tol: self.rel_tol / factor,
            max_iter: self.max_iter,
        }
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_iter: 200,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
}

impl Bracket {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_finite() && hi.is_finite() && lo < hi {
            Ok(Self { lo, hi })
        } else {
            Err(NumericsError::InvalidBracket { lo, hi })
        }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.lo && t <= self.hi
    }

    /// `n + 1` uniformly spaced points from `lo` to `hi` inclusive.
    pub fn subdivide(&self, n: usize) -> Vec<f64> {
        let n = n.max(1);
        (0..=n)
            .map(|k| {
                if k == n {
                    self.hi
                } else {
                    self.lo + self.width() * k as f64 / n as f64
                }
            })
            .collect()
    }
}

fn checked(at: f64, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(NumericsError::NonFinite { at })
    }
}

// 15-point Kronrod abscissae and weights with the embedded 7-point Gauss rule.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<(f64, f64)> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = checked(center, f(center))?;
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = checked(center - dx, f(center - dx))?;
        let f2 = checked(center + dx, f(center + dx))?;
        kronrod += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    Ok((kronrod * half, ((kronrod - gauss) * half).abs()))
}

struct Panel {
    a: f64,
    b: f64,
    estimate: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Oriented integral of `f` from `lo` to `hi`.
///
/// Globally adaptive Gauss-Kronrod (7/15): the panel with the largest error
/// estimate is bisected until the summed estimate satisfies
/// `abs_tol + rel_tol·|I|`. `max_iter` bounds the number of bisections.
pub fn integrate<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: &Tolerance) -> Result<f64> {
    if lo == hi {
        return Ok(0.0);
    }
    if lo > hi {
        return integrate(f, hi, lo, tol).map(|v| -v);
    }
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(NumericsError::InvalidBracket { lo, hi });
    }
    let (estimate, error) = gauss_kronrod(&f, lo, hi)?;
    let mut heap = BinaryHeap::new();
    heap.push(Panel {
        a: lo,
        b: hi,
        estimate,
        error,
    });
    let mut total = estimate;
    let mut total_err = error;
    for _ in 0..tol.max_iter {
        if total_err <= tol.abs_tol + tol.rel_tol * total.abs() {
            return Ok(total);
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Panel cannot be split further in floating point.
            heap.push(worst);
            break;
        }
        let (e1, r1) = gauss_kronrod(&f, worst.a, mid)?;
        let (e2, r2) = gauss_kronrod(&f, mid, worst.b)?;
        total += e1 + e2 - worst.estimate;
        total_err += r1 + r2 - worst.error;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            estimate: e1,
            error: r1,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            estimate: e2,
            error: r2,
        });
    }
    // Re-sum to shed accumulated update error before the final check.
    let total: f64 = heap.iter().map(|p| p.estimate).sum();
    let total_err: f64 = heap.iter().map(|p| p.error).sum();
    if total_err <= tol.abs_tol + tol.rel_tol * total.abs() {
        Ok(total)
    } else {
        Err(NumericsError::NonConvergence {
            estimate: total,
            iterations: tol.max_iter,
        })
    }
}

/// Root of `f` inside `bracket` by Brent's method.
///
/// Inverse quadratic / secant steps are accepted only while they stay inside
/// the current bracket and shrink it fast enough; otherwise the step is a
/// bisection. The returned value always lies in `[bracket.lo, bracket.hi]`.
pub fn find_root<F: FnMut(f64) -> f64>(mut f: F, bracket: Bracket, tol: &Tolerance) -> Result<f64> {
    let (mut a, mut b) = (bracket.lo, bracket.hi);
    let mut fa = checked(a, f(a))?;
    let mut fb = checked(b, f(b))?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(NumericsError::NoSignChange {
            lo: a,
            hi: b,
            f_lo: fa,
            f_hi: fb,
        });
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..tol.max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * (tol.abs_tol + tol.rel_tol * b.abs());
        let m = 0.5 * (c - b);
        if m.abs() <= tol1 || fb == 0.0 || fb.abs() <= tol.abs_tol {
            return Ok(b.clamp(bracket.lo, bracket.hi));
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol1 * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 {
            d
        } else {
            tol1.copysign(m)
        };
        fb = checked(b, f(b))?;
    }
    Err(NumericsError::NonConvergence {
        estimate: b.clamp(bracket.lo, bracket.hi),
        iterations: tol.max_iter,
    })
}

/// Numerical inverse of a strictly monotone function over a bracket.
#[derive(Clone)]
pub struct MonotoneInverse<G> {
    g: G,
    domain: Bracket,
    g_lo: f64,
    g_hi: f64,
    tol: Tolerance,
}

impl<G: Fn(f64) -> f64> MonotoneInverse<G> {
    pub fn increasing(&self) -> bool {
        self.g_hi > self.g_lo
    }

    pub fn domain(&self) -> Bracket {
        self.domain
    }

    /// Range of `g` over the domain as an ordered bracket.
    pub fn range(&self) -> Bracket {
        Bracket {
            lo: self.g_lo.min(self.g_hi),
            hi: self.g_lo.max(self.g_hi),
        }
    }

    /// Solves `g(x) = z`. Values a few ulps outside the range are clamped.
    pub fn eval(&self, z: f64) -> Result<f64> {
        let range = self.range();
        let slack = 8.0 * f64::EPSILON * (range.lo.abs().max(range.hi.abs()) + 1.0);
        if !(z >= range.lo - slack && z <= range.hi + slack) {
            return Err(NumericsError::OutOfRange {
                z,
                lo: range.lo,
                hi: range.hi,
            });
        }
        if z == self.g_lo || (self.increasing() && z <= self.g_lo) || (!self.increasing() && z >= self.g_lo) {
            return Ok(self.domain.lo);
        }
        if z == self.g_hi || (self.increasing() && z >= self.g_hi) || (!self.increasing() && z <= self.g_hi) {
            return Ok(self.domain.hi);
        }
        find_root(|x| (self.g)(x) - z, self.domain, &self.tol)
    }
}

/// Builds `T` with `g(T(z)) = z`, checking monotonicity on
/// [`DEFAULT_MONOTONE_SAMPLES`] uniform samples.
pub fn invert_monotone<G: Fn(f64) -> f64>(
    g: G,
    domain: Bracket,
    tol: &Tolerance,
) -> Result<MonotoneInverse<G>> {
    invert_monotone_sampled(g, domain, tol, DEFAULT_MONOTONE_SAMPLES)
}

pub fn invert_monotone_sampled<G: Fn(f64) -> f64>(
    g: G,
    domain: Bracket,
    tol: &Tolerance,
    samples: usize,
) -> Result<MonotoneInverse<G>> {
    let xs = domain.subdivide(samples.max(2) - 1);
    let values = xs
        .iter()
        .map(|&x| checked(x, g(x)))
        .collect::<Result<Vec<_>>>()?;
    let increasing = values[values.len() - 1] > values[0];
    for (w, x) in values.windows(2).zip(&xs) {
        let ok = if increasing { w[1] > w[0] } else { w[1] < w[0] };
        if !ok {
            return Err(NumericsError::NotMonotone { at: *x });
        }
    }
    Ok(MonotoneInverse {
        g_lo: values[0],
        g_hi: values[values.len() - 1],
        g,
        domain,
        tol: *tol,
    })
}

/// Brackets a minimum of `f` on `[a, b]` by golden-section search.
/// Undefined values count as `+∞`.
fn golden_minimum<F: FnMut(f64) -> Option<f64>>(f: &mut F, mut a: f64, mut b: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let val = |f: &mut F, t: f64| f(t).unwrap_or(f64::INFINITY);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = val(f, c);
    let mut fd = val(f, d);
    for _ in 0..80 {
        if (b - a).abs() <= 4.0 * f64::EPSILON * (a.abs() + b.abs()) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = val(f, c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = val(f, d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// All roots of `f` on the sample grid.
///
/// Sign changes between neighbouring samples are refined with [`find_root`];
/// samples with `|f| ≤ tol.abs_tol` count as roots. A sample whose magnitude
/// is a strict local minimum without a neighbouring sign change triggers a
/// golden-section search, which exposes pairs of close roots that fall
/// between two samples. `None` marks points where `f` is undefined; no
/// bracket is formed across them. Roots are returned in increasing order.
pub fn scan_roots<F: FnMut(f64) -> Option<f64>>(mut f: F, grid: &[f64], tol: &Tolerance) -> Vec<f64> {
    let values: Vec<Option<f64>> = grid
        .iter()
        .map(|&t| f(t).filter(|v| v.is_finite()))
        .collect();
    let is_zero = |v: Option<f64>| matches!(v, Some(v) if v.abs() <= tol.abs_tol);
    let mut roots = Vec::new();
    let refine = |f: &mut F, lo: f64, hi: f64, roots: &mut Vec<f64>| {
        if let Ok(b) = Bracket::new(lo, hi) {
            if let Ok(r) = find_root(|t| f(t).unwrap_or(f64::NAN), b, tol) {
                roots.push(r);
            }
        }
    };
    for i in 0..grid.len() {
        if is_zero(values[i]) && !(i > 0 && is_zero(values[i - 1])) {
            roots.push(grid[i]);
        }
    }
    for i in 0..grid.len().saturating_sub(1) {
        if let (Some(v0), Some(v1)) = (values[i], values[i + 1]) {
            if !is_zero(values[i]) && !is_zero(values[i + 1]) && v0.signum() != v1.signum() {
                refine(&mut f, grid[i], grid[i + 1], &mut roots);
            }
        }
    }
    for i in 1..grid.len().saturating_sub(1) {
        let (Some(l), Some(m), Some(r)) = (values[i - 1], values[i], values[i + 1]) else {
            continue;
        };
        if is_zero(values[i]) || l.signum() != m.signum() || r.signum() != m.signum() {
            continue;
        }
        if !(m.abs() < l.abs() && m.abs() <= r.abs()) {
            continue;
        }
        let s = m.signum();
        let (t_min, v_min) = golden_minimum(&mut |t| f(t).map(|v| s * v), grid[i - 1], grid[i + 1]);
        if v_min.abs() <= tol.abs_tol {
            roots.push(t_min);
        } else if v_min < 0.0 {
            refine(&mut f, grid[i - 1], t_min, &mut roots);
            refine(&mut f, t_min, grid[i + 1], &mut roots);
        }
    }
    roots.sort_by(f64::total_cmp);
    let span = grid.last().copied().unwrap_or(0.0) - grid.first().copied().unwrap_or(0.0);
    let merge = 1e-12 * span.abs().max(1.0);
    roots.dedup_by(|a, b| (*a - *b).abs() <= merge);
    roots
}

/// Whether `f` has at least one root on the grid, stopping at the first
/// sign change. Same detection rules as [`scan_roots`].
pub fn has_root<F: FnMut(f64) -> Option<f64>>(mut f: F, grid: &[f64], tol: &Tolerance) -> bool {
    let mut values: Vec<Option<f64>> = Vec::with_capacity(grid.len());
    for &t in grid {
        let v = f(t).filter(|v| v.is_finite());
        if let Some(v) = v {
            if v.abs() <= tol.abs_tol {
                return true;
            }
            if let Some(Some(prev)) = values.last() {
                if prev.signum() != v.signum() {
                    return true;
                }
            }
        }
        values.push(v);
    }
    for i in 1..grid.len().saturating_sub(1) {
        let (Some(l), Some(m), Some(r)) = (values[i - 1], values[i], values[i + 1]) else {
            continue;
        };
        if m.abs() < l.abs() && m.abs() <= r.abs() {
            let s = m.signum();
            let (_, v_min) = golden_minimum(&mut |t| f(t).map(|v| s * v), grid[i - 1], grid[i + 1]);
            if v_min <= tol.abs_tol {
                return true;
            }
        }
    }
    false
}

/// Not-a-knot cubic spline through `(xs, ys)` with exact piecewise integrals.
///
/// Falls back to a natural spline for three points and to linear
/// interpolation for two.
#[derive(Debug, Clone)]
pub struct CubicSpline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    // second derivatives at the knots
    m: Vec<f64>,
    // cumulative integral from xs[0] to each knot
    cumulative: Vec<f64>,
}

impl CubicSpline {
    pub fn new(xs: &[f64], ys: &[f64]) -> Result<Self> {
        let n = xs.len();
        if n < 2 || ys.len() != n || xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(NumericsError::InvalidSpline);
        }
        let m = if n == 2 {
            vec![0.0; 2]
        } else if n == 3 {
            natural_second_derivatives(xs, ys)
        } else {
            not_a_knot_second_derivatives(xs, ys)
        };
        let mut spline = Self {
            xs: xs.to_vec(),
            ys: ys.to_vec(),
            m,
            cumulative: vec![0.0; n],
        };
        for i in 1..n {
            spline.cumulative[i] = spline.cumulative[i - 1] + spline.segment_integral(i - 1, 1.0);
        }
        Ok(spline)
    }

    fn segment(&self, x: f64) -> usize {
        let i = self.xs.partition_point(|&k| k <= x);
        i.saturating_sub(1).min(self.xs.len() - 2)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let (y0, y1, m0, m1) = (self.ys[i], self.ys[i + 1], self.m[i], self.m[i + 1]);
        (1.0 - t) * y0 + t * y1 + h * h / 6.0 * (((1.0 - t).powi(3) - (1.0 - t)) * m0 + (t.powi(3) - t) * m1)
    }

    // Integral over segment i from its left knot to fraction t of its width.
    fn segment_integral(&self, i: usize, t: f64) -> f64 {
        let h = self.xs[i + 1] - self.xs[i];
        let (y0, y1, m0, m1) = (self.ys[i], self.ys[i + 1], self.m[i], self.m[i + 1]);
        let s = 1.0 - t;
        let lin = y0 * (1.0 - s * s) / 2.0 + y1 * t * t / 2.0;
        let a = -(s.powi(4) - 1.0) / 4.0 + (s * s - 1.0) / 2.0;
        let b = t.powi(4) / 4.0 - t * t / 2.0;
        h * lin + h.powi(3) / 6.0 * (a * m0 + b * m1)
    }

    /// `∫ s(x) dx` from `xs[0]` to `x`; extrapolates with the end cubics.
    pub fn antiderivative(&self, x: f64) -> f64 {
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        self.cumulative[i] + self.segment_integral(i, (x - self.xs[i]) / h)
    }

    pub fn integral(&self, from: f64, to: f64) -> f64 {
        self.antiderivative(to) - self.antiderivative(from)
    }
}

fn thomas(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = sup.first().copied().unwrap_or(0.0) / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let denom = diag[i] - sub[i - 1] * c[i - 1];
        c[i] = if i < n - 1 { sup[i] / denom } else { 0.0 };
        d[i] = (rhs[i] - sub[i - 1] * d[i - 1]) / denom;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}

fn interior_rhs(xs: &[f64], ys: &[f64], i: usize) -> f64 {
    let h0 = xs[i] - xs[i - 1];
    let h1 = xs[i + 1] - xs[i];
    6.0 * ((ys[i + 1] - ys[i]) / h1 - (ys[i] - ys[i - 1]) / h0)
}

fn natural_second_derivatives(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let k = n - 2;
    let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
    let diag: Vec<f64> = (1..=k).map(|i| 2.0 * (h[i - 1] + h[i])).collect();
    let off: Vec<f64> = (1..k).map(|i| h[i]).collect();
    let rhs: Vec<f64> = (1..=k).map(|i| interior_rhs(xs, ys, i)).collect();
    let inner = thomas(&off, &diag, &off, &rhs);
    let mut m = vec![0.0; n];
    m[1..=k].copy_from_slice(&inner);
    m
}

// Not-a-knot: third derivative continuous across the first and last interior
// knots. The end unknowns are eliminated so the interior system stays
// tridiagonal.
fn not_a_knot_second_derivatives(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
    let k = n - 2; // unknowns m[1..=n-2]
    let mut sub = vec![0.0; k - 1];
    let mut diag = vec![0.0; k];
    let mut sup = vec![0.0; k - 1];
    let rhs: Vec<f64> = (1..=k).map(|i| interior_rhs(xs, ys, i)).collect();
    for r in 0..k {
        let i = r + 1;
        diag[r] = 2.0 * (h[i - 1] + h[i]);
        if r > 0 {
            sub[r - 1] = h[i - 1];
        }
        if r + 1 < k {
            sup[r] = h[i];
        }
    }
    // m0 = ((h0 + h1) m1 - h0 m2) / h1
    let (h0, h1) = (h[0], h[1]);
    diag[0] += h0 * (h0 + h1) / h1;
    if k > 1 {
        sup[0] -= h0 * h0 / h1;
    }
    // m_{n-1} = ((h_{n-2} + h_{n-3}) m_{n-2} - h_{n-2} m_{n-3}) / h_{n-3}
    let (hl, hp) = (h[n - 2], h[n - 3]);
    diag[k - 1] += hl * (hl + hp) / hp;
    if k > 1 {
        sub[k - 2] -= hl * hl / hp;
    }
    let inner = thomas(&sub, &diag, &sup, &rhs);
    let mut m = vec![0.0; n];
    m[1..=k].copy_from_slice(&inner);
    m[0] = ((h0 + h1) * m[1] - h0 * m[2]) / h1;
    m[n - 1] = ((hl + hp) * m[n - 2] - hl * m[n - 3]) / hp;
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn integrate_trivial_cases() {
        assert!((integrate(|_| 1.0, 0.0, 1.0, &tol()).unwrap() - 1.0).abs() < 1e-14);
        let e = integrate(f64::exp, 0.0, 1.0, &tol()).unwrap();
        assert!((e - (std::f64::consts::E - 1.0)).abs() < 1e-12);
        assert_eq!(integrate(f64::exp, 0.7, 0.7, &tol()).unwrap(), 0.0);
    }

    #[test]
    fn integrate_reports_best_estimate_on_failure() {
        let t = Tolerance::new(1e-15, 0.0, 2).unwrap();
        match integrate(|x: f64| x.abs().sqrt(), -1.0, 1.0, &t) {
            Err(NumericsError::NonConvergence { estimate, .. }) => {
                assert!((estimate - 4.0 / 3.0).abs() < 1e-2)
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn integrate_rejects_non_finite_values() {
        let r = integrate(|x: f64| 1.0 / x, -1.0, 1.0, &tol());
        assert!(matches!(r, Err(NumericsError::NonFinite { .. })));
    }

    #[test]
    fn find_root_examples() {
        let b = Bracket::new(0.0, 10.0).unwrap();
        assert!((find_root(|u| u - 3.0, b, &tol()).unwrap() - 3.0).abs() < 1e-10);
        let b = Bracket::new(0.0, 3.0).unwrap();
        assert!((find_root(|u| u * u * u - 8.0, b, &tol()).unwrap() - 2.0).abs() < 1e-10);
        let b = Bracket::new(0.0, 1.0).unwrap();
        assert!(matches!(
            find_root(|u| u * u + 1.0, b, &tol()),
            Err(NumericsError::NoSignChange { .. })
        ));
    }

    #[test]
    fn find_root_non_convergence_carries_iterate() {
        let t = Tolerance::new(1e-300, 0.0, 3).unwrap();
        let b = Bracket::new(0.0, 10.0).unwrap();
        match find_root(|u: f64| (u - 3.3).tanh(), b, &t) {
            Err(NumericsError::NonConvergence { estimate, .. }) => assert!(b.contains(estimate)),
            Ok(_) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn invert_monotone_examples() {
        let t = Tolerance::new(1e-14, 0.0, 200).unwrap();
        let id = invert_monotone(|x| x, Bracket::new(0.0, 1.0).unwrap(), &t).unwrap();
        assert!((id.eval(0.5).unwrap() - 0.5).abs() < 1e-14);
        let ex = invert_monotone(f64::exp, Bracket::new(0.0, 1.0).unwrap(), &t).unwrap();
        assert!((ex.eval(2.0).unwrap() - 2f64.ln()).abs() < 1e-13);
        let neg = invert_monotone(|x| -x, Bracket::new(-1.0, 1.0).unwrap(), &t).unwrap();
        assert!((neg.eval(0.3).unwrap() + 0.3).abs() < 1e-14);
        assert!(!neg.increasing());
    }

    #[test]
    fn invert_monotone_errors() {
        let t = tol();
        let sq = invert_monotone(|x| x * x, Bracket::new(-1.0, 1.0).unwrap(), &t);
        assert!(matches!(sq, Err(NumericsError::NotMonotone { .. })));
        let ex = invert_monotone(f64::exp, Bracket::new(0.0, 1.0).unwrap(), &t).unwrap();
        assert!(matches!(ex.eval(5.0), Err(NumericsError::OutOfRange { .. })));
    }

    #[test]
    fn tolerance_validation() {
        assert!(Tolerance::new(0.0, 0.0, 1).is_err());
        assert!(Tolerance::new(1e-3, -1.0, 1).is_err());
        assert!(Tolerance::new(1e-3, 0.0, 0).is_err());
        assert!(Bracket::new(1.0, 1.0).is_err());
    }

    #[test]
    fn scan_finds_close_root_pair_between_samples() {
        // Two roots 1e-3 apart sit inside one grid cell of width 0.1.
        let f = |t: f64| Some((t - 0.5) * (t - 0.5) - 0.25e-6);
        let grid = Bracket::new(0.0, 1.0).unwrap().subdivide(10);
        let roots = scan_roots(f, &grid, &Tolerance::new(1e-14, 0.0, 200).unwrap());
        assert_eq!(roots.len(), 2);
        assert!((roots[0] - 0.4995).abs() < 1e-9);
        assert!((roots[1] - 0.5005).abs() < 1e-9);
        assert!(has_root(f, &grid, &Tolerance::new(1e-14, 0.0, 200).unwrap()));
    }

    #[test]
    fn scan_skips_undefined_samples() {
        let f = |t: f64| if t < 0.3 { None } else { Some(t - 0.6) };
        let grid = Bracket::new(0.0, 1.0).unwrap().subdivide(10);
        let roots = scan_roots(f, &grid, &tol());
        assert_eq!(roots.len(), 1);
        assert!((roots[0] - 0.6).abs() < 1e-10);
        let none = |_t: f64| -> Option<f64> { None };
        assert!(scan_roots(none, &grid, &tol()).is_empty());
        assert!(!has_root(none, &grid, &tol()));
    }

    #[test]
    fn spline_integrates_cubics_exactly() {
        let xs: Vec<f64> = (0..9).map(|k| -1.0 + 0.25 * k as f64).collect();
        let p = |x: f64| 2.0 * x * x * x - x * x + 0.5 * x + 3.0;
        let anti = |x: f64| 0.5 * x.powi(4) - x.powi(3) / 3.0 + 0.25 * x * x + 3.0 * x;
        let ys: Vec<f64> = xs.iter().map(|&x| p(x)).collect();
        let s = CubicSpline::new(&xs, &ys).unwrap();
        for &x in &[-0.9, -0.2, 0.33, 0.97] {
            assert!((s.eval(x) - p(x)).abs() < 1e-12);
            assert!((s.integral(-0.1, x) - (anti(x) - anti(-0.1))).abs() < 1e-12);
        }
    }

    #[test]
    fn short_splines() {
        let s = CubicSpline::new(&[0.0, 1.0], &[1.0, 3.0]).unwrap();
        assert!((s.integral(0.0, 1.0) - 2.0).abs() < 1e-15);
        let s = CubicSpline::new(&[0.0, 1.0, 2.0], &[2.0, 2.0, 2.0]).unwrap();
        assert!((s.integral(0.5, 2.0) - 3.0).abs() < 1e-15);
        assert!(CubicSpline::new(&[0.0, 0.0], &[1.0, 1.0]).is_err());
    }

    proptest! {
        #[test]
        fn integrate_cubic_polynomials(c in prop::array::uniform4(-5.0f64..5.0), lo in -3.0f64..3.0, w in 0.01f64..4.0) {
            let hi = lo + w;
            let p = |x: f64| c[0] + c[1] * x + c[2] * x * x + c[3] * x * x * x;
            let anti = |x: f64| c[0] * x + c[1] * x * x / 2.0 + c[2] * x.powi(3) / 3.0 + c[3] * x.powi(4) / 4.0;
            let exact = anti(hi) - anti(lo);
            let got = integrate(p, lo, hi, &tol()).unwrap();
            prop_assert!((got - exact).abs() <= 1e-10 + 1e-10 * exact.abs() + 1e-12);
        }

        #[test]
        fn integrate_is_antisymmetric(k in -3.0f64..3.0, lo in -2.0f64..2.0, hi in -2.0f64..2.0) {
            let f = |x: f64| (k * x).sin() + x.exp();
            let a = integrate(f, lo, hi, &tol()).unwrap();
            let b = integrate(f, hi, lo, &tol()).unwrap();
            prop_assert_eq!(a, -b);
        }

        #[test]
        fn find_root_stays_in_bracket(shift in -10.0f64..10.0, lo in -5.0f64..0.0, hi in 0.001f64..5.0) {
            let b = Bracket::new(lo, hi).unwrap();
            let f = |u: f64| (u - shift).atan();
            if let Ok(r) = find_root(f, b, &tol()) {
                prop_assert!(b.contains(r));
            }
        }

        #[test]
        fn inverse_composes_to_identity(k in 0.2f64..3.0, s in prop::bool::ANY) {
            let sign = if s { 1.0 } else { -1.0 };
            let g = move |x: f64| sign * (k * x + 0.3 * x.sin());
            let t = Tolerance::new(1e-13, 0.0, 200).unwrap();
            let inv = invert_monotone(g, Bracket::new(-2.0, 2.0).unwrap(), &t).unwrap();
            for i in 0..=20 {
                let x = -2.0 + 0.2 * i as f64;
                prop_assert!((inv.eval(g(x)).unwrap() - x).abs() < 1e-10);
            }
        }
    }
}
