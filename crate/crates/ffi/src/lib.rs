//! C ABI over `xychain`.
//!
//! Every function returns an [`XyStatus`]; results come back through out
//! pointers. On failure a message is kept per thread and can be read with
//! [`xy_last_error_message`]. Handles are opaque and owned by the caller,
//! who releases them with the matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use xychain::cli::run_verification;
use xychain::entanglement::pair_concurrence;
use xychain::nmr::{
    attenuated_correlation, decoherence_estimate, fidelity, pauli_set, NoiseParams, SpinSystem,
    PAULI_COUNT,
};
use xychain::pipeline::{run_protocol, Mode, Protocol};
use xychain::{ComplexMatrix, DensityMatrix, Error, QubitIndex, C64};

/// Result code of every exported function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XyStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidState = 3,
    DimensionMismatch = 4,
    Numerical = 5,
    Io = 6,
    Parse = 7,
    Panic = 99,
}

/// Spin-system parameters: names, couplings, relaxation times.
pub struct XySpinSystem {
    inner: SpinSystem,
}

/// A validated density matrix.
pub struct XyDensity {
    inner: DensityMatrix,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let text = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(text));
}

fn status_of(err: &Error) -> XyStatus {
    match err {
        Error::DimensionMismatch { .. } => XyStatus::DimensionMismatch,
        Error::QubitOutOfRange { .. }
        | Error::InvalidArgument(_)
        | Error::UnsupportedProtocol(_) => XyStatus::InvalidArgument,
        Error::NotHermitian { .. } | Error::InvalidState(_) => XyStatus::InvalidState,
        Error::Numerical(_) => XyStatus::Numerical,
        Error::Io(_) => XyStatus::Io,
        Error::Json(_) | Error::Config(_) => XyStatus::Parse,
    }
}

struct Failure(XyStatus, String);

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        Failure(status_of(&err), err.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(XyStatus::NullPointer, format!("{what} is null"))
}

/// Runs `body`, converting errors and panics into status codes.
fn guard<F>(body: F) -> XyStatus
where
    F: FnOnce() -> Result<(), Failure>,
{
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => XyStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal panic: {message}"));
            XyStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(XyStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

/// Message of the last failed call on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn xy_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn xy_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn xy_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// The built-in three-spin system.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn xy_spin_system_default(out: *mut *mut XySpinSystem) -> XyStatus {
    guard(|| {
        let handle = Box::new(XySpinSystem {
            inner: SpinSystem::default(),
        });
        write(out, Box::into_raw(handle), "out")
    })
}

/// Parses a spin system from its JSON form.
///
/// # Safety
/// `json` must be NUL-terminated; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn xy_spin_system_from_json(
    json: *const c_char,
    out: *mut *mut XySpinSystem,
) -> XyStatus {
    guard(|| {
        let system = SpinSystem::from_json_str(read_str(json, "json")?)?;
        write(
            out,
            Box::into_raw(Box::new(XySpinSystem { inner: system })),
            "out",
        )
    })
}

/// JSON form of a spin system; free the result with [`xy_string_free`].
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn xy_spin_system_to_json(
    system: *const XySpinSystem,
    out: *mut *mut c_char,
) -> XyStatus {
    guard(|| {
        let text = deref(system, "system")?.inner.to_json_string()?;
        let c = CString::new(text).map_err(|e| Failure(XyStatus::Parse, e.to_string()))?;
        write(out, c.into_raw(), "out")
    })
}

/// # Safety
/// `system` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn xy_spin_system_free(system: *mut XySpinSystem) {
    if !system.is_null() {
        drop(Box::from_raw(system));
    }
}

/// Runs a preparation protocol (`bell-010`, `bell-101`, `w`, `ghz`) in a
/// mode (`ideal`, `compiled`, `schedule`, `schedule-noise`) from a
/// pseudo-pure input with purity fraction `epsilon`.
///
/// # Safety
/// Strings must be NUL-terminated; pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn xy_prepare(
    protocol: *const c_char,
    mode: *const c_char,
    system: *const XySpinSystem,
    epsilon: f64,
    out: *mut *mut XyDensity,
) -> XyStatus {
    guard(|| {
        let protocol: Protocol = read_str(protocol, "protocol")?.parse()?;
        let mode: Mode = read_str(mode, "mode")?.parse()?;
        let system = &deref(system, "system")?.inner;
        let result = run_protocol(protocol, mode, system, &NoiseParams::default(), epsilon)?;
        let handle = Box::new(XyDensity {
            inner: result.final_state,
        });
        write(out, Box::into_raw(handle), "out")
    })
}

/// Builds a density matrix from row-major real and imaginary parts of
/// length `dim * dim`; the matrix is validated.
///
/// # Safety
/// `re` and `im` must each point to `dim * dim` doubles.
#[no_mangle]
pub unsafe extern "C" fn xy_density_from_parts(
    dim: usize,
    re: *const f64,
    im: *const f64,
    out: *mut *mut XyDensity,
) -> XyStatus {
    guard(|| {
        if re.is_null() || im.is_null() {
            return Err(null("matrix data"));
        }
        let len = dim
            .checked_mul(dim)
            .ok_or_else(|| Failure(XyStatus::InvalidArgument, "dimension overflows".into()))?;
        let (re, im) = (
            std::slice::from_raw_parts(re, len),
            std::slice::from_raw_parts(im, len),
        );
        let m = ComplexMatrix::from_fn(dim, dim, |r, c| C64::new(re[r * dim + c], im[r * dim + c]));
        let rho = DensityMatrix::new(m)?;
        write(
            out,
            Box::into_raw(Box::new(XyDensity { inner: rho })),
            "out",
        )
    })
}

/// # Safety
/// `rho` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn xy_density_free(rho: *mut XyDensity) {
    if !rho.is_null() {
        drop(Box::from_raw(rho));
    }
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn xy_density_dim(rho: *const XyDensity, out: *mut usize) -> XyStatus {
    guard(|| write(out, deref(rho, "rho")?.inner.dim(), "out"))
}

/// Entry `(row, col)`, zero-based.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn xy_density_get(
    rho: *const XyDensity,
    row: usize,
    col: usize,
    re: *mut f64,
    im: *mut f64,
) -> XyStatus {
    guard(|| {
        let rho = &deref(rho, "rho")?.inner;
        if row >= rho.dim() || col >= rho.dim() {
            return Err(Failure(
                XyStatus::InvalidArgument,
                format!("entry ({row}, {col}) outside a {0}x{0} matrix", rho.dim()),
            ));
        }
        let z = rho.matrix()[(row, col)];
        write(re, z.re, "re")?;
        write(im, z.im, "im")
    })
}

/// Normalized Hilbert-Schmidt overlap of two states.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn xy_fidelity(
    a: *const XyDensity,
    b: *const XyDensity,
    out: *mut f64,
) -> XyStatus {
    guard(|| {
        let f = fidelity(&deref(a, "a")?.inner, &deref(b, "b")?.inner)?;
        write(out, f, "out")
    })
}

/// `Tr(theory experiment) / Tr(theory^2)`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn xy_attenuated_correlation(
    theory: *const XyDensity,
    experiment: *const XyDensity,
    out: *mut f64,
) -> XyStatus {
    guard(|| {
        let c = attenuated_correlation(
            &deref(theory, "theory")?.inner,
            &deref(experiment, "experiment")?.inner,
        )?;
        write(out, c, "out")
    })
}

/// Concurrence between qubits `i` and `j` (1-based).
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn xy_pair_concurrence(
    rho: *const XyDensity,
    i: usize,
    j: usize,
    out: *mut f64,
) -> XyStatus {
    guard(|| {
        let c = pair_concurrence(
            &deref(rho, "rho")?.inner,
            QubitIndex::new(i)?,
            QubitIndex::new(j)?,
        )?;
        write(out, c, "out")
    })
}

/// The 64 Pauli expectation values of a three-qubit state, `III` first,
/// lexicographic with `I < X < Y < Z`. `len` must be at least 64.
///
/// # Safety
/// `out` must point to `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn xy_pauli_set(
    rho: *const XyDensity,
    out: *mut f64,
    len: usize,
) -> XyStatus {
    guard(|| {
        let set = pauli_set(&deref(rho, "rho")?.inner)?;
        if out.is_null() {
            return Err(null("out"));
        }
        if len < PAULI_COUNT {
            return Err(Failure(
                XyStatus::InvalidArgument,
                format!("buffer holds {len} values, need {PAULI_COUNT}"),
            ));
        }
        std::slice::from_raw_parts_mut(out, PAULI_COUNT).copy_from_slice(set.values());
        Ok(())
    })
}

/// Runs the compiler equivalence checks on `phi_samples` seeded angles.
/// `passed` receives whether every check met its tolerance.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn xy_verify_compiler(
    phi_samples: usize,
    seed: u64,
    passed: *mut bool,
    max_residual: *mut f64,
) -> XyStatus {
    guard(|| {
        let report = run_verification(phi_samples, seed, false)?;
        let worst = report
            .checks
            .iter()
            .map(|c| c.max_residual)
            .fold(0.0, f64::max);
        write(passed, report.passed(), "passed")?;
        write(max_residual, worst, "max_residual")
    })
}

/// Signal retained by a protocol's schedule under relaxation.
///
/// # Safety
/// `protocol` must be NUL-terminated; pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn xy_decoherence_estimate(
    protocol: *const c_char,
    system: *const XySpinSystem,
    out: *mut f64,
) -> XyStatus {
    guard(|| {
        let protocol: Protocol = read_str(protocol, "protocol")?.parse()?;
        let c = decoherence_estimate(protocol, &deref(system, "system")?.inner)?;
        write(out, c, "out")
    })
}
