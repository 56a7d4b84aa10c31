//! C ABI over `charflow`.
//!
//! Objects are opaque handles created by `cf_*_new` and released by the
//! matching `cf_*_free`. Every fallible call returns a [`CfStatus`]; on
//! failure the message is kept per thread and read with
//! [`cf_last_error_message`]. Panics are caught at the boundary.

use charflow::cauchy::{ImplicitSolution, InitialData, Invariant};
use charflow::corpus::{get_example, ExampleId, ExampleParams};
use charflow::geometry::{coverage_mask, find_gaps, CellClass, DomainGrid};
use charflow::inverse::{
    param_for_point, recover_circle, recover_line, recover_pointwise, CharacteristicFamily,
    FamilyForm, FamilySpec,
};
use charflow::numerics::{Bracket, Tolerance};
use charflow::plane::{BBox, Direction, Point, Support};
use charflow::{Error, Expression};
use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    /// The point or data lies outside where the problem is solvable.
    Domain = 4,
    Numerics = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CfForm {
    YOfX = 0,
    XOfY = 1,
    Polar = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CfInvariant {
    First = 0,
    Second = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CfCellClass {
    Covered = 0,
    Support = 1,
    ExteriorUncovered = 2,
    Gap = 3,
}

/// Forward solution of a Cauchy problem.
pub struct CfSolution {
    inner: ImplicitSolution,
}

/// A one-parameter family of characteristic curves.
pub struct CfFamily {
    inner: CharacteristicFamily,
}

/// Coverage classification of a window with its gap components.
pub struct CfDomainGrid {
    inner: DomainGrid,
    gap_count: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

struct Failure(CfStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = if e.is_domain() {
            CfStatus::Domain
        } else {
            match e {
                Error::Expr(charflow::ExprError::Parse(_)) => CfStatus::Parse,
                Error::Numerics(_) => CfStatus::Numerics,
                _ => CfStatus::InvalidArgument,
            }
        };
        Failure(status, e.to_string())
    }
}

macro_rules! lift {
    ($($t:ty),*) => {$(
        impl From<$t> for Failure {
            fn from(e: $t) -> Self {
                Error::from(e).into()
            }
        }
    )*};
}
lift!(
    charflow::ExprError,
    charflow::CauchyError,
    charflow::InverseError,
    charflow::NumericsError,
    charflow::corpus::CorpusError
);

impl From<charflow::expr::ParseError> for Failure {
    fn from(e: charflow::expr::ParseError) -> Self {
        Failure(CfStatus::Parse, e.to_string())
    }
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure(CfStatus::InvalidArgument, msg.into())
}

fn null(what: &str) -> Failure {
    Failure(CfStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> CfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            CfStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            CfStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| invalid(format!("{what} is not valid UTF-8")))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out_slice<'a>(p: *mut f64, n: usize, what: &str) -> Result<&'a mut [f64], Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts_mut(p, n))
}

fn invariant(i: CfInvariant) -> Invariant {
    match i {
        CfInvariant::First => Invariant::First,
        CfInvariant::Second => Invariant::Second,
    }
}

/// Copies the calling thread's last error message into `buf` (NUL
/// terminated, truncated to `len`) and returns the full message length.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn cf_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr(), buf.cast::<u8>(), n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Builds the forward solution for `u(x, 0) = tau(x)`, `u_y(x, 0) = nu(x)`
/// on `[a, b]`. `tol` of 0 selects the default tolerance.
///
/// # Safety
/// `tau` and `nu` must be NUL-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cf_solution_new(
    a: f64,
    b: f64,
    tau: *const c_char,
    nu: *const c_char,
    tol: f64,
    out: *mut *mut CfSolution,
) -> CfStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let tau = Expression::parse(str_arg(tau, "tau")?)?;
        let nu = Expression::parse(str_arg(nu, "nu")?)?;
        let data = InitialData::new(a, b, tau, nu)?;
        let tol = if tol == 0.0 {
            Tolerance::default()
        } else {
            Tolerance::new(tol, tol, 200)?
        };
        let inner = ImplicitSolution::new(&data, &tol)?;
        *out = Box::into_raw(Box::new(CfSolution { inner }));
        Ok(())
    })
}

/// # Safety
/// `sol` must be null or a handle from [`cf_solution_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cf_solution_free(sol: *mut CfSolution) {
    if !sol.is_null() {
        drop(Box::from_raw(sol));
    }
}

/// # Safety
/// `sol` must be a live handle; `u` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cf_solution_solve_u(sol: *const CfSolution, x: f64, y: f64, u: *mut f64) -> CfStatus {
    guard(|| {
        let sol = handle(sol, "solution")?;
        let u = out_arg(u, "u")?;
        *u = sol.inner.solve_u(x, y, sol.inner.tolerance())?;
        Ok(())
    })
}

/// Characteristic directions at `(x, y)` as `[dx1, dy1, dx2, dy2]`.
///
/// # Safety
/// `sol` must be a live handle; `out` must point to 4 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn cf_solution_directions(sol: *const CfSolution, x: f64, y: f64, out: *mut f64) -> CfStatus {
    guard(|| {
        let sol = handle(sol, "solution")?;
        let out = out_slice(out, 4, "out")?;
        let (d1, d2) = sol.inner.characteristic_directions(x, y)?;
        out.copy_from_slice(&[d1.dx, d1.dy, d2.dx, d2.dy]);
        Ok(())
    })
}

/// Family from an expression `phi` in variables `x`/`y` (or `r`, `theta`
/// for the polar form) and `c`, scanned over `c ∈ [c_lo, c_hi]`.
///
/// # Safety
/// `phi` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cf_family_new(
    form: CfForm,
    phi: *const c_char,
    inv: CfInvariant,
    c_lo: f64,
    c_hi: f64,
    out: *mut *mut CfFamily,
) -> CfStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let phi = Expression::parse(str_arg(phi, "phi")?)?;
        let form = match form {
            CfForm::YOfX => FamilyForm::YOfX,
            CfForm::XOfY => FamilyForm::XOfY,
            CfForm::Polar => FamilyForm::PolarImplicit,
        };
        let inner = FamilySpec::new(form, phi, invariant(inv), Bracket::new(c_lo, c_hi)?).build()?;
        *out = Box::into_raw(Box::new(CfFamily { inner }));
        Ok(())
    })
}

/// One of the two families of a built-in example (`example` 1, 2 or 3).
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cf_family_from_example(
    example: u32,
    a: f64,
    b: f64,
    inv: CfInvariant,
    out: *mut *mut CfFamily,
) -> CfStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let id = match example {
            1 => ExampleId::Example1,
            2 => ExampleId::Example2,
            3 => ExampleId::Example3,
            n => return Err(invalid(format!("unknown example {n}"))),
        };
        let ex = get_example(id, ExampleParams { a, b })?;
        let spec = match inv {
            CfInvariant::First => ex.families.0,
            CfInvariant::Second => ex.families.1,
        };
        *out = Box::into_raw(Box::new(CfFamily { inner: spec.build()? }));
        Ok(())
    })
}

/// # Safety
/// `fam` must be null or a live family handle.
#[no_mangle]
pub unsafe extern "C" fn cf_family_free(fam: *mut CfFamily) {
    if !fam.is_null() {
        drop(Box::from_raw(fam));
    }
}

/// Parameter of the curve of `fam` through `(x, y)`.
///
/// # Safety
/// `fam` must be a live handle; `c` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cf_family_param(fam: *const CfFamily, x: f64, y: f64, c: *mut f64) -> CfStatus {
    guard(|| {
        let fam = handle(fam, "family")?;
        let c = out_arg(c, "c")?;
        *c = param_for_point(&fam.inner, Point::new(x, y))?;
        Ok(())
    })
}

/// Gradient `(u_x, u_y)` from a first-family tangent `(dx1, dy1)` and a
/// second-family tangent `(dx2, dy2)`.
///
/// # Safety
/// `u_x` and `u_y` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cf_recover_pointwise(
    dx1: f64,
    dy1: f64,
    dx2: f64,
    dy2: f64,
    u_x: *mut f64,
    u_y: *mut f64,
) -> CfStatus {
    guard(|| {
        let u_x = out_arg(u_x, "u_x")?;
        let u_y = out_arg(u_y, "u_y")?;
        let (gx, gy) = recover_pointwise(Direction::raw(dx1, dy1), Direction::raw(dx2, dy2))?;
        *u_x = gx;
        *u_y = gy;
        Ok(())
    })
}

/// Recovers `τ'`, `ν` and `τ` (with `τ(norm_x) = norm_u`) at `n` uniform
/// samples of `[lo, hi]`. Each output array holds `n` doubles.
///
/// # Safety
/// Family handles must be live; output pointers must hold `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn cf_recover_line(
    fam1: *const CfFamily,
    fam2: *const CfFamily,
    lo: f64,
    hi: f64,
    n: usize,
    norm_x: f64,
    norm_u: f64,
    x: *mut f64,
    tau_prime: *mut f64,
    nu: *mut f64,
    tau: *mut f64,
) -> CfStatus {
    guard(|| {
        let f1 = handle(fam1, "fam1")?;
        let f2 = handle(fam2, "fam2")?;
        let outs = [
            out_slice(x, n, "x")?,
            out_slice(tau_prime, n, "tau_prime")?,
            out_slice(nu, n, "nu")?,
            out_slice(tau, n, "tau")?,
        ];
        let rec = recover_line(&f1.inner, &f2.inner, Bracket::new(lo, hi)?, n, (norm_x, norm_u))?;
        let [x, tp, nu, tau] = outs;
        for (k, s) in rec.samples.iter().enumerate() {
            x[k] = s.x;
            tp[k] = s.tau_prime;
            nu[k] = s.nu;
            tau[k] = s.tau;
        }
        Ok(())
    })
}

/// Recovers `u_x`, `u_y` and `u` (with `u(1, norm_theta) = norm_u`) on the
/// unit circle at the `n` increasing angles `theta`.
///
/// # Safety
/// Family handles must be live; `theta` and the outputs must hold `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn cf_recover_circle(
    fam1: *const CfFamily,
    fam2: *const CfFamily,
    theta: *const f64,
    n: usize,
    norm_theta: f64,
    norm_u: f64,
    u_x: *mut f64,
    u_y: *mut f64,
    u: *mut f64,
) -> CfStatus {
    guard(|| {
        let f1 = handle(fam1, "fam1")?;
        let f2 = handle(fam2, "fam2")?;
        if theta.is_null() {
            return Err(null("theta"));
        }
        let thetas = std::slice::from_raw_parts(theta, n);
        let outs = [out_slice(u_x, n, "u_x")?, out_slice(u_y, n, "u_y")?, out_slice(u, n, "u")?];
        let rec = recover_circle(&f1.inner, &f2.inner, thetas, (norm_theta, norm_u))?;
        let [ux, uy, uu] = outs;
        for (k, s) in rec.samples.iter().enumerate() {
            ux[k] = s.u_x;
            uy[k] = s.u_y;
            uu[k] = s.u;
        }
        Ok(())
    })
}

/// Classifies an `nx × ny` grid over `[x0, x1] × [y0, y1]`. The support is
/// the segment `[s_lo, s_hi]` of `y = 0`, or the unit circle when
/// `unit_circle` is true.
///
/// # Safety
/// Family handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cf_domain_grid_new(
    fam1: *const CfFamily,
    fam2: *const CfFamily,
    unit_circle: bool,
    s_lo: f64,
    s_hi: f64,
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    nx: usize,
    ny: usize,
    out: *mut *mut CfDomainGrid,
) -> CfStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let f1 = handle(fam1, "fam1")?;
        let f2 = handle(fam2, "fam2")?;
        let bbox = BBox::new(x0, x1, y0, y1).ok_or_else(|| invalid("bbox must satisfy x0 < x1, y0 < y1"))?;
        if nx == 0 || ny == 0 {
            return Err(invalid("grid dimensions must be positive"));
        }
        let support = if unit_circle {
            Support::UnitCircle
        } else {
            let s = Bracket::new(s_lo, s_hi)?;
            Support::Line { lo: s.lo, hi: s.hi }
        };
        let inner = coverage_mask(&f1.inner, &f2.inner, &support, bbox, nx, ny);
        let gap_count = find_gaps(&inner).len();
        *out = Box::into_raw(Box::new(CfDomainGrid { inner, gap_count }));
        Ok(())
    })
}

/// # Safety
/// `grid` must be null or a live grid handle.
#[no_mangle]
pub unsafe extern "C" fn cf_domain_grid_free(grid: *mut CfDomainGrid) {
    if !grid.is_null() {
        drop(Box::from_raw(grid));
    }
}

/// # Safety
/// `grid` must be a live handle; `class` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cf_domain_grid_class(
    grid: *const CfDomainGrid,
    i: usize,
    j: usize,
    class: *mut CfCellClass,
) -> CfStatus {
    guard(|| {
        let g = &handle(grid, "grid")?.inner;
        let class = out_arg(class, "class")?;
        if i >= g.nx || j >= g.ny {
            return Err(invalid(format!("cell ({i}, {j}) is outside the {}x{} grid", g.nx, g.ny)));
        }
        *class = match g.class(i, j) {
            CellClass::Covered => CfCellClass::Covered,
            CellClass::Support => CfCellClass::Support,
            CellClass::ExteriorUncovered => CfCellClass::ExteriorUncovered,
            CellClass::Gap => CfCellClass::Gap,
        };
        Ok(())
    })
}

/// Number of gap components.
///
/// # Safety
/// `grid` must be a live handle; `count` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cf_domain_grid_gap_count(grid: *const CfDomainGrid, count: *mut usize) -> CfStatus {
    guard(|| {
        let g = handle(grid, "grid")?;
        *out_arg(count, "count")? = g.gap_count;
        Ok(())
    })
}
