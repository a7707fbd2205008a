//! C ABI over the fractafold library.
//!
//! Every fallible function returns an `int32_t` status (`FF_OK` on success)
//! and writes results through out-pointers. The message for the most recent
//! failure on the calling thread is available from [`ff_last_error`].
//! Meshes are opaque handles created by [`ff_mesh_new`] and released with
//! [`ff_mesh_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

use fractafold::decimation::{frak_r, DecimationPolynomial};
use fractafold::fractafold::{extend_eigenfunction, is_forbidden, mesh_spectrum, FractafoldMesh};
use fractafold::graph::{build_graph, edge_graph, Family};
use fractafold::tree::{kernel_radial, Level, TreeParameter};
use fractafold::verify::{self, Suite};
use fractafold::Error;

pub const FF_OK: i32 = 0;
pub const FF_ERR_NULL: i32 = 1;
pub const FF_ERR_INVALID: i32 = 2;
pub const FF_ERR_FORBIDDEN: i32 = 3;
pub const FF_ERR_OUT_OF_RANGE: i32 = 4;
pub const FF_ERR_NUMERIC: i32 = 5;
pub const FF_ERR_BUFFER: i32 = 6;
pub const FF_ERR_PANIC: i32 = 7;

pub const FF_BASE_OCTAHEDRON: u32 = 0;
pub const FF_BASE_CIRCULAR_LADDER_EDGES: u32 = 1;
pub const FF_BASE_TRIANGLE: u32 = 2;

pub const FF_LEVEL_GAMMA: u32 = 0;
pub const FF_LEVEL_GAMMA0: u32 = 1;

/// Refined triangle mesh over a 4-regular or cornered base.
pub struct FfMesh {
    inner: FractafoldMesh,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn code(e: &Error) -> i32 {
    match e {
        Error::InvalidArgument(_) | Error::MismatchedPair | Error::NotInE6(..) | Error::Io(_) | Error::SizeCap { .. } => FF_ERR_INVALID,
        Error::Forbidden(_) | Error::Pole(_) => FF_ERR_FORBIDDEN,
        Error::OutOfRange(_) | Error::OutOfBand(_) | Error::Discriminant { .. } => FF_ERR_OUT_OF_RANGE,
        Error::NonConvergence { .. } | Error::Degenerate(_) => FF_ERR_NUMERIC,
    }
}

fn fail(status: i32, msg: String) -> i32 {
    LAST_ERROR.with(|m| *m.borrow_mut() = msg);
    status
}

fn guard(f: impl FnOnce() -> Result<(), i32>) -> i32 {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FF_OK,
        Ok(Err(status)) => status,
        Err(_) => fail(FF_ERR_PANIC, "internal panic".into()),
    }
}

trait Raise<T> {
    fn raise(self) -> Result<T, i32>;
}

impl<T> Raise<T> for fractafold::Result<T> {
    fn raise(self) -> Result<T, i32> {
        self.map_err(|e| fail(code(&e), e.to_string()))
    }
}

fn null() -> i32 {
    fail(FF_ERR_NULL, "null pointer argument".into())
}

unsafe fn out<'a, T>(p: *mut T) -> Result<&'a mut T, i32> {
    p.as_mut().ok_or_else(null)
}

unsafe fn copy_out(values: &[f64], buf: *mut f64, cap: usize, len: *mut usize) -> Result<(), i32> {
    *out(len)? = values.len();
    if values.len() > cap {
        return Err(fail(FF_ERR_BUFFER, format!("buffer holds {cap} values, {} needed", values.len())));
    }
    if !values.is_empty() {
        if buf.is_null() {
            return Err(null());
        }
        std::ptr::copy_nonoverlapping(values.as_ptr(), buf, values.len());
    }
    Ok(())
}

/// Copies the last error message on this thread into `buf` as a NUL-terminated
/// string, truncating to `cap` bytes. Returns the full message length.
///
/// # Safety
/// `buf` must be null or valid for `cap` bytes.
#[no_mangle]
pub unsafe extern "C" fn ff_last_error(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|m| {
        let m = m.borrow();
        if !buf.is_null() && cap > 0 {
            let n = m.len().min(cap - 1);
            std::ptr::copy_nonoverlapping(m.as_ptr().cast(), buf, n);
            *buf.add(n) = 0;
        }
        m.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ff_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Returns 1 if `lambda` is a forbidden eigenvalue of the gasket mesh operator.
#[no_mangle]
pub extern "C" fn ff_is_forbidden(lambda: f64) -> i32 {
    i32::from(is_forbidden(lambda))
}

/// Evaluates R(z) = z(m - z) for the decimation polynomial with multiplier `m`.
///
/// # Safety
/// `result` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ff_r_apply(multiplier: f64, z: f64, result: *mut f64) -> i32 {
    guard(|| {
        let p = DecimationPolynomial::new(multiplier).raise()?;
        *out(result)? = p.apply(z);
        Ok(())
    })
}

/// Both real preimages of `w` under R, lower branch first.
///
/// # Safety
/// `lo` and `hi` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ff_r_inverse(multiplier: f64, w: f64, lo: *mut f64, hi: *mut f64) -> i32 {
    guard(|| {
        let p = DecimationPolynomial::new(multiplier).raise()?;
        let (a, b) = p.inverse_branches(w).raise()?;
        *out(lo)? = a;
        *out(hi)? = b;
        Ok(())
    })
}

/// Limit of scaled inverse iterates, the function whose zeros give the
/// continuum spectrum of the limiting operator.
///
/// # Safety
/// `result` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ff_frak_r(multiplier: f64, z: f64, tol: f64, result: *mut f64) -> i32 {
    guard(|| {
        let p = DecimationPolynomial::new(multiplier).raise()?;
        *out(result)? = frak_r(&p, z, tol).raise()?;
        Ok(())
    })
}

/// Radial spectral projection kernel on the 3-regular tree (`FF_LEVEL_GAMMA`)
/// or its edge graph (`FF_LEVEL_GAMMA0`) at distance `d`.
///
/// # Safety
/// `result` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ff_tree_kernel(level: u32, lambda: f64, d: usize, result: *mut f64) -> i32 {
    guard(|| {
        let level = match level {
            FF_LEVEL_GAMMA => Level::Gamma,
            FF_LEVEL_GAMMA0 => Level::Gamma0,
            other => return Err(fail(FF_ERR_INVALID, format!("unknown level {other}"))),
        };
        let p = TreeParameter::from_lambda(lambda).raise()?;
        *out(result)? = kernel_radial(level, &p, d).raise()?;
        Ok(())
    })
}

/// Builds a mesh refined `level` times over one of the `FF_BASE_*` bases.
/// `size` is the ladder length for `FF_BASE_CIRCULAR_LADDER_EDGES`.
///
/// # Safety
/// `mesh` must be valid for writes. The handle must be released with
/// [`ff_mesh_free`].
#[no_mangle]
pub unsafe extern "C" fn ff_mesh_new(base: u32, size: usize, level: usize, mesh: *mut *mut FfMesh) -> i32 {
    guard(|| {
        let slot = out(mesh)?;
        *slot = std::ptr::null_mut();
        let g = match base {
            FF_BASE_OCTAHEDRON => edge_graph(&build_graph(Family::K4).raise()?).raise()?,
            FF_BASE_CIRCULAR_LADDER_EDGES => edge_graph(&build_graph(Family::CircularLadder { n: size }).raise()?).raise()?,
            FF_BASE_TRIANGLE => build_graph(Family::SingleTriangle).raise()?,
            other => return Err(fail(FF_ERR_INVALID, format!("unknown base {other}"))),
        };
        let inner = FractafoldMesh::new(g, level).raise()?;
        *slot = Box::into_raw(Box::new(FfMesh { inner }));
        Ok(())
    })
}

/// Releases a mesh handle. Null is ignored.
///
/// # Safety
/// `mesh` must be null or a handle from [`ff_mesh_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ff_mesh_free(mesh: *mut FfMesh) {
    if !mesh.is_null() {
        drop(Box::from_raw(mesh));
    }
}

unsafe fn mesh_ref<'a>(mesh: *const FfMesh) -> Result<&'a FractafoldMesh, i32> {
    mesh.as_ref().map(|m| &m.inner).ok_or_else(null)
}

fn check_level(m: &FractafoldMesh, level: usize) -> Result<(), i32> {
    if level > m.level() {
        return Err(fail(FF_ERR_INVALID, format!("level {level} above mesh level {}", m.level())));
    }
    Ok(())
}

/// Refinement depth of the mesh.
///
/// # Safety
/// `mesh` must be a live handle and `result` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ff_mesh_level(mesh: *const FfMesh, result: *mut usize) -> i32 {
    guard(|| {
        *out(result)? = mesh_ref(mesh)?.level();
        Ok(())
    })
}

/// Number of vertices of the level-`level` graph.
///
/// # Safety
/// `mesh` must be a live handle and `result` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ff_mesh_vertex_count(mesh: *const FfMesh, level: usize, result: *mut usize) -> i32 {
    guard(|| {
        let m = mesh_ref(mesh)?;
        check_level(m, level)?;
        *out(result)? = m.graph(level).len();
        Ok(())
    })
}

/// Ascending eigenvalues of the mesh operator at `level`. Writes the required
/// count to `len`; returns `FF_ERR_BUFFER` if `cap` is too small.
///
/// # Safety
/// `mesh` must be a live handle, `buf` valid for `cap` doubles, `len` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ff_mesh_spectrum(mesh: *const FfMesh, level: usize, buf: *mut f64, cap: usize, len: *mut usize) -> i32 {
    guard(|| {
        let m = mesh_ref(mesh)?;
        check_level(m, level)?;
        let s = mesh_spectrum(m.graph(level)).raise()?;
        copy_out(&s.values, buf, cap, len)
    })
}

/// Extends an eigenfunction `u` at `level` to `level + 1` with eigenvalue
/// `lambda_next`. Output sizing follows [`ff_mesh_spectrum`].
///
/// # Safety
/// `u` must be valid for `u_len` doubles; other pointers as in [`ff_mesh_spectrum`].
#[no_mangle]
pub unsafe extern "C" fn ff_mesh_extend(
    mesh: *const FfMesh,
    level: usize,
    u: *const f64,
    u_len: usize,
    lambda_next: f64,
    buf: *mut f64,
    cap: usize,
    len: *mut usize,
) -> i32 {
    guard(|| {
        let m = mesh_ref(mesh)?;
        if u.is_null() && u_len > 0 {
            return Err(null());
        }
        let u = if u_len == 0 { &[][..] } else { std::slice::from_raw_parts(u, u_len) };
        let v = extend_eigenfunction(m, level, u, lambda_next).raise()?;
        copy_out(&v, buf, cap, len)
    })
}

/// Runs the named check suite and writes 1 to `passed` if every check passed.
///
/// # Safety
/// `suite` must be a NUL-terminated string and `passed` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ff_verify_suite(suite: *const c_char, passed: *mut i32) -> i32 {
    guard(|| {
        if suite.is_null() {
            return Err(null());
        }
        let name = CStr::from_ptr(suite).to_str().map_err(|_| fail(FF_ERR_INVALID, "suite name is not UTF-8".into()))?;
        let s = Suite::from_name(name).ok_or_else(|| fail(FF_ERR_INVALID, format!("unknown suite `{name}`")))?;
        let report = verify::run(&[s], &verify::Options::default());
        *out(passed)? = i32::from(report.passed);
        Ok(())
    })
}
