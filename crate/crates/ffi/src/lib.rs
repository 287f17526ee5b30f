//! C interface to the spectral toolkit.
//!
//! Objects cross the boundary as opaque handles created by `cs_*_new` or
//! `cs_*_solve` style functions and released with the matching `cs_*_free`.
//! Every fallible function returns a [`CsStatus`]; the message of the last
//! failure on the calling thread is available from
//! [`cs_last_error_message`]. Panics are caught and reported as
//! `CS_ERR_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, c_int};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;

use crucispec::eigensolve::generalized_small_pencil;
use crucispec::geometry::{CrossSectionProfile, ProfileKind};
use crucispec::planar::{estimate_lambda_pi, threshold_channel, ChannelOptions, PlanarEstimate};
use crucispec::specfun::{ModeFamily1D, PotentialKind};
use crucispec::trial::{gram_pair, maxmin_certificate, QuadratureSpec, TrialFamily};
use crucispec::waveguide3d::{analyze, DiscreteSpectrumReport, WaveguideOptions};
use crucispec::Error;

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsStatus {
    Ok = 0,
    ErrNullPointer = 1,
    ErrDomain = 2,
    ErrResource = 3,
    ErrConvergence = 4,
    ErrConsistency = 5,
    ErrNotPositiveDefinite = 6,
    ErrAccuracy = 7,
    ErrUnsupported = 8,
    ErrConfig = 9,
    ErrIo = 10,
    ErrBufferTooSmall = 11,
    ErrPanic = 12,
}

/// Profile generators accepted by [`cs_profile_new`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsProfileKind {
    Rhombus = 0,
    Ellipse = 1,
}

/// Model potentials accepted by [`cs_modes_solve`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsPotential {
    AbsLinear = 0,
    Quadratic = 1,
}

/// Opaque cross-section profile.
pub struct CsProfile(CrossSectionProfile);
/// Opaque planar bound-state estimate.
pub struct CsPlanar(Arc<PlanarEstimate>);
/// Opaque family of 1D modes.
pub struct CsModes(ModeFamily1D);
/// Opaque 3D spectrum report.
pub struct CsSpectrum(DiscreteSpectrumReport);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> CsStatus {
    match e {
        Error::Domain(_) => CsStatus::ErrDomain,
        Error::Resource { .. } => CsStatus::ErrResource,
        Error::Convergence { .. } => CsStatus::ErrConvergence,
        Error::Consistency(_) => CsStatus::ErrConsistency,
        Error::NotPositiveDefinite(_) => CsStatus::ErrNotPositiveDefinite,
        Error::Accuracy(_) => CsStatus::ErrAccuracy,
        Error::Unsupported(_) => CsStatus::ErrUnsupported,
        Error::Config(_) => CsStatus::ErrConfig,
        Error::Io(_) | Error::Json(_) => CsStatus::ErrIo,
    }
}

fn fail(status: CsStatus, msg: impl Into<String>) -> CsStatus {
    set_error(msg.into());
    status
}

/// Runs `f`, converting library errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), CsStatus>) -> CsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CsStatus::Ok,
        Ok(Err(s)) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(CsStatus::ErrPanic, msg)
        }
    }
}

trait IntoStatus<T> {
    fn cs(self) -> Result<T, CsStatus>;
}

impl<T> IntoStatus<T> for crucispec::Result<T> {
    fn cs(self) -> Result<T, CsStatus> {
        self.map_err(|e| fail(status_of(&e), e.to_string()))
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, CsStatus> {
    // SAFETY: the caller passes a handle obtained from this library or null.
    unsafe { p.as_ref() }.ok_or_else(|| fail(CsStatus::ErrNullPointer, format!("{what} is null")))
}

unsafe fn write<T>(p: *mut T, v: T, what: &str) -> Result<(), CsStatus> {
    if p.is_null() {
        return Err(fail(CsStatus::ErrNullPointer, format!("{what} is null")));
    }
    // SAFETY: non-null output pointer supplied by the caller.
    unsafe { p.write(v) };
    Ok(())
}

unsafe fn free<T>(p: *mut T) {
    if !p.is_null() {
        // SAFETY: created by Box::into_raw in this library.
        drop(unsafe { Box::from_raw(p) });
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Length in bytes of the last error message on this thread, without the
/// terminating NUL.
#[no_mangle]
pub extern "C" fn cs_last_error_length() -> usize {
    LAST_ERROR.with(|e| e.borrow().len())
}

/// Copies the last error message into `buf` (NUL-terminated, truncated to
/// `len - 1` bytes). Returns the number of bytes written without the NUL.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn cs_last_error_message(buf: *mut c_char, len: usize) -> usize {
    if buf.is_null() || len == 0 {
        return 0;
    }
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let n = msg.len().min(len - 1);
        // SAFETY: `buf` holds `len` bytes and `n < len`.
        unsafe {
            std::ptr::copy_nonoverlapping(msg.as_ptr(), buf.cast::<u8>(), n);
            *buf.add(n) = 0;
        }
        n
    })
}

/// Creates a profile of kind `kind` (a [`CsProfileKind`] value) and
/// elongation `h`.
///
/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn cs_profile_new(kind: c_int, h: f64, out: *mut *mut CsProfile) -> CsStatus {
    guard(|| {
        let k = match kind {
            k if k == CsProfileKind::Rhombus as c_int => ProfileKind::Rhombus,
            k if k == CsProfileKind::Ellipse as c_int => ProfileKind::Ellipse,
            other => return Err(fail(CsStatus::ErrDomain, format!("unknown profile kind {other}"))),
        };
        let p = CrossSectionProfile::new(k, h).cs()?;
        unsafe { write(out, Box::into_raw(Box::new(CsProfile(p))), "out") }
    })
}

/// # Safety
/// `p` must be null or a handle from [`cs_profile_new`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cs_profile_free(p: *mut CsProfile) {
    unsafe { free(p) }
}

/// Full width `h(tau)` of the stretched section.
///
/// # Safety
/// `p` must be a live profile handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cs_profile_width(p: *const CsProfile, tau: f64, out: *mut f64) -> CsStatus {
    guard(|| {
        let p = unsafe { deref(p, "profile") }?;
        let w = p.0.width(tau).cs()?;
        unsafe { write(out, w, "out") }
    })
}

/// Threshold of the continuous spectrum from the channel solver.
///
/// # Safety
/// `p` must be a live profile handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cs_profile_threshold(p: *const CsProfile, out: *mut f64) -> CsStatus {
    guard(|| {
        let p = unsafe { deref(p, "profile") }?;
        let t = threshold_channel(&p.0, &ChannelOptions::default()).cs()?;
        unsafe { write(out, t.lambda_dagger, "out") }
    })
}

/// Two-grid estimate of the planar bound state on the cross truncated at
/// `l`, from spacings `coarse_spacing` and half of it.
///
/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn cs_planar_estimate(l: f64, coarse_spacing: f64, out: *mut *mut CsPlanar) -> CsStatus {
    guard(|| {
        let e = estimate_lambda_pi(l, coarse_spacing).cs()?;
        unsafe { write(out, Box::into_raw(Box::new(CsPlanar(Arc::new(e)))), "out") }
    })
}

/// # Safety
/// `p` must be null or a handle from [`cs_planar_estimate`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cs_planar_free(p: *mut CsPlanar) {
    unsafe { free(p) }
}

/// Extrapolated eigenvalue and its error bar.
///
/// # Safety
/// `p` must be a live handle; `value` and `error_bar` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn cs_planar_lambda(p: *const CsPlanar, value: *mut f64, error_bar: *mut f64) -> CsStatus {
    guard(|| {
        let p = unsafe { deref(p, "planar") }?;
        unsafe { write(value, p.0.lambda, "value") }?;
        unsafe { write(error_bar, p.0.error_bar, "error_bar") }
    })
}

/// The normalized bound state at `(x1, x2)`.
///
/// # Safety
/// `p` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cs_planar_eval(p: *const CsPlanar, x1: f64, x2: f64, out: *mut f64) -> CsStatus {
    guard(|| {
        let p = unsafe { deref(p, "planar") }?;
        unsafe { write(out, p.0.fine.eval(x1, x2), "out") }
    })
}

/// The `count` lowest eigenpairs of the 1D model operator (a
/// [`CsPotential`] value) at `lambda`.
///
/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn cs_modes_solve(potential: c_int, lambda: f64, count: usize, out: *mut *mut CsModes) -> CsStatus {
    guard(|| {
        let kind = match potential {
            p if p == CsPotential::AbsLinear as c_int => PotentialKind::AbsLinear,
            p if p == CsPotential::Quadratic as c_int => PotentialKind::Quadratic,
            other => return Err(fail(CsStatus::ErrDomain, format!("unknown potential {other}"))),
        };
        let fam = crucispec::specfun::modes::solve(kind, lambda, count, None).cs()?;
        unsafe { write(out, Box::into_raw(Box::new(CsModes(fam))), "out") }
    })
}

/// # Safety
/// `m` must be null or a handle from [`cs_modes_solve`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cs_modes_free(m: *mut CsModes) {
    unsafe { free(m) }
}

/// Number of modes in the family, or 0 for a null handle.
///
/// # Safety
/// `m` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cs_modes_count(m: *const CsModes) -> usize {
    unsafe { m.as_ref() }.map_or(0, |m| m.0.modes.len())
}

/// Eigenvalue and parity (0 even, 1 odd) of the mode at `position`.
///
/// # Safety
/// `m` must be a live handle; `value` and `parity` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn cs_modes_eigenvalue(m: *const CsModes, position: usize, value: *mut f64, parity: *mut c_int) -> CsStatus {
    guard(|| {
        let m = unsafe { deref(m, "modes") }?;
        let mode = m
            .0
            .modes
            .get(position)
            .ok_or_else(|| fail(CsStatus::ErrDomain, format!("mode position {position} out of range")))?;
        unsafe { write(value, mode.eigenvalue, "value") }?;
        let p = match mode.parity {
            crucispec::specfun::Parity::Even => 0,
            crucispec::specfun::Parity::Odd => 1,
        };
        unsafe { write(parity, p, "parity") }
    })
}

/// Value of the mode at `position` at `zeta`.
///
/// # Safety
/// `m` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cs_modes_eval(m: *const CsModes, position: usize, zeta: f64, out: *mut f64) -> CsStatus {
    guard(|| {
        let m = unsafe { deref(m, "modes") }?;
        let mode = m
            .0
            .modes
            .get(position)
            .ok_or_else(|| fail(CsStatus::ErrDomain, format!("mode position {position} out of range")))?;
        unsafe { write(out, mode.value(zeta), "out") }
    })
}

/// Max-min upper bounds from `count` trial functions at the profile's `H`.
/// Writes `count` values into `theta` and the number below the threshold
/// into `certified`.
///
/// # Safety
/// Handles must be live; `theta` valid for `theta_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn cs_certify(
    profile: *const CsProfile,
    planar: *const CsPlanar,
    count: usize,
    theta: *mut f64,
    theta_len: usize,
    certified: *mut usize,
) -> CsStatus {
    guard(|| {
        let profile = unsafe { deref(profile, "profile") }?;
        let planar = unsafe { deref(planar, "planar") }?;
        if theta.is_null() {
            return Err(fail(CsStatus::ErrNullPointer, "theta is null"));
        }
        if theta_len < count {
            return Err(fail(CsStatus::ErrBufferTooSmall, format!("theta holds {theta_len}, need {count}")));
        }
        let fam = TrialFamily::new(&profile.0, count, planar.0.lambda, Arc::new(planar.0.fine.clone())).cs()?;
        let gram = gram_pair(&fam, &QuadratureSpec::default()).cs()?;
        let cutoff = threshold_channel(&profile.0, &ChannelOptions::default()).cs()?;
        let mu: Vec<f64> = (0..count).map(|i| fam.mode(i).eigenvalue).collect();
        let cert = maxmin_certificate(&gram, cutoff.lambda_dagger, &mu, profile.0.alpha()).cs()?;
        // SAFETY: `theta` holds at least `count` doubles.
        unsafe { std::ptr::copy_nonoverlapping(cert.theta.as_ptr(), theta, count) };
        unsafe { write(certified, cert.certified_count, "certified") }
    })
}

/// Eigenvalues of the dense pencil `K c = theta M c` (row-major `n x n`).
///
/// # Safety
/// `k` and `m` valid for `n * n` doubles, `out` for `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn cs_generalized_pencil(k: *const f64, m: *const f64, n: usize, out: *mut f64) -> CsStatus {
    guard(|| {
        if k.is_null() || m.is_null() || out.is_null() {
            return Err(fail(CsStatus::ErrNullPointer, "pencil argument is null"));
        }
        // SAFETY: sizes promised by the caller.
        let (ks, ms) = unsafe { (std::slice::from_raw_parts(k, n * n), std::slice::from_raw_parts(m, n * n)) };
        let kd = nalgebra::DMatrix::from_row_slice(n, n, ks);
        let md = nalgebra::DMatrix::from_row_slice(n, n, ms);
        let t = generalized_small_pencil(&kd, &md).cs()?;
        unsafe { std::ptr::copy_nonoverlapping(t.as_ptr(), out, n) };
        Ok(())
    })
}

/// Spectrum of the truncated waveguide over all symmetry sectors.
///
/// # Safety
/// `profile` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cs_waveguide_analyze(
    profile: *const CsProfile,
    arm_halflength: f64,
    spacing_xy: f64,
    spacing_z: f64,
    coarse_check: bool,
    out: *mut *mut CsSpectrum,
) -> CsStatus {
    guard(|| {
        let profile = unsafe { deref(profile, "profile") }?;
        let mut opts = WaveguideOptions::new(arm_halflength, spacing_xy, spacing_z);
        opts.coarse_check = coarse_check;
        let r = analyze(&profile.0, &opts, None).cs()?;
        unsafe { write(out, Box::into_raw(Box::new(CsSpectrum(r))), "out") }
    })
}

/// # Safety
/// `s` must be null or a handle from [`cs_waveguide_analyze`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cs_spectrum_free(s: *mut CsSpectrum) {
    unsafe { free(s) }
}

/// Certified count, threshold, and whether nothing lies below it.
///
/// # Safety
/// `s` must be a live handle; output pointers valid.
#[no_mangle]
pub unsafe extern "C" fn cs_spectrum_summary(s: *const CsSpectrum, count: *mut usize, cutoff: *mut f64, empty_flag: *mut bool) -> CsStatus {
    guard(|| {
        let s = unsafe { deref(s, "spectrum") }?;
        unsafe { write(count, s.0.total_count, "count") }?;
        unsafe { write(cutoff, s.0.cutoff, "cutoff") }?;
        unsafe { write(empty_flag, s.0.existence_flag, "empty_flag") }
    })
}

/// All computed eigenvalues, with multiplicity, ascending. `written`
/// receives the total; fails with `ErrBufferTooSmall` if `len` is short.
///
/// # Safety
/// `s` must be a live handle; `buf` valid for `len` doubles or null when
/// `len` is 0.
#[no_mangle]
pub unsafe extern "C" fn cs_spectrum_eigenvalues(s: *const CsSpectrum, buf: *mut f64, len: usize, written: *mut usize) -> CsStatus {
    guard(|| {
        let s = unsafe { deref(s, "spectrum") }?;
        let v = s.0.merged_eigenvalues();
        unsafe { write(written, v.len(), "written") }?;
        if len < v.len() || buf.is_null() {
            return Err(fail(CsStatus::ErrBufferTooSmall, format!("need {} doubles", v.len())));
        }
        unsafe { std::ptr::copy_nonoverlapping(v.as_ptr(), buf, v.len()) };
        Ok(())
    })
}
