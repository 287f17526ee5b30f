use std::f64::consts::PI;
use std::ffi::{c_int, CStr};
use std::ptr;

use crucispec_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0 as std::ffi::c_char; 512];
    let n = unsafe { cs_last_error_message(buf.as_mut_ptr(), buf.len()) };
    let s = unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned();
    assert_eq!(s.len(), n);
    s
}

#[test]
fn version_is_a_c_string() {
    let v = unsafe { CStr::from_ptr(cs_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn profile_width_and_errors() {
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { cs_profile_new(CsProfileKind::Rhombus as c_int, 10.0, &mut p) }, CsStatus::Ok);
    let mut w = 0.0;
    assert_eq!(unsafe { cs_profile_width(p, 0.0, &mut w) }, CsStatus::Ok);
    assert!((w - 1.0).abs() < 1e-15);
    assert_eq!(unsafe { cs_profile_width(p, 2.5, &mut w) }, CsStatus::Ok);
    assert!((w - 0.5).abs() < 1e-12);
    assert_eq!(unsafe { cs_profile_width(p, 6.0, &mut w) }, CsStatus::ErrDomain);
    assert!(!last_error().is_empty());
    assert_eq!(unsafe { cs_profile_width(p, 0.0, ptr::null_mut()) }, CsStatus::ErrNullPointer);
    unsafe { cs_profile_free(p) };

    let mut q = ptr::null_mut();
    assert_eq!(unsafe { cs_profile_new(7, 10.0, &mut q) }, CsStatus::ErrDomain);
    assert!(last_error().contains("unknown profile kind"));
    assert_eq!(unsafe { cs_profile_new(CsProfileKind::Ellipse as c_int, -1.0, &mut q) }, CsStatus::ErrDomain);
    assert!(q.is_null());
    unsafe { cs_profile_free(ptr::null_mut()) };
}

#[test]
fn oscillator_modes_through_the_boundary() {
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { cs_modes_solve(CsPotential::Quadratic as c_int, PI * PI, 3, &mut m) }, CsStatus::Ok);
    assert_eq!(unsafe { cs_modes_count(m) }, 3);
    for n in 0..3 {
        let (mut mu, mut parity) = (0.0, -1);
        assert_eq!(unsafe { cs_modes_eigenvalue(m, n, &mut mu, &mut parity) }, CsStatus::Ok);
        let exact = 2.0 * PI * (2 * n + 1) as f64;
        assert!((mu - exact).abs() / exact < 1e-8, "{mu} vs {exact}");
        assert_eq!(parity, (n % 2) as c_int);
    }
    let mut v = 0.0;
    assert_eq!(unsafe { cs_modes_eval(m, 0, 0.0, &mut v) }, CsStatus::Ok);
    assert!(v > 0.0);
    let (mut mu, mut parity) = (0.0, 0);
    assert_eq!(unsafe { cs_modes_eigenvalue(m, 9, &mut mu, &mut parity) }, CsStatus::ErrDomain);
    unsafe { cs_modes_free(m) };
    assert_eq!(unsafe { cs_modes_count(ptr::null()) }, 0);
}

#[test]
fn pencil_matches_quotient() {
    let k = [3.0, 0.0, 0.0, 8.0];
    let m = [1.5, 0.0, 0.0, 2.0];
    let mut out = [0.0; 2];
    assert_eq!(unsafe { cs_generalized_pencil(k.as_ptr(), m.as_ptr(), 2, out.as_mut_ptr()) }, CsStatus::Ok);
    assert!((out[0] - 2.0).abs() < 1e-14 && (out[1] - 4.0).abs() < 1e-14);
    let bad = [1.0, 2.0, 2.0, 1.0];
    assert_eq!(
        unsafe { cs_generalized_pencil(k.as_ptr(), bad.as_ptr(), 2, out.as_mut_ptr()) },
        CsStatus::ErrNotPositiveDefinite
    );
}

#[test]
fn planar_certificate_and_spectrum() {
    let mut planar = ptr::null_mut();
    assert_eq!(unsafe { cs_planar_estimate(3.0, 1.0 / 16.0, &mut planar) }, CsStatus::Ok);
    let (mut lam, mut bar) = (0.0, 0.0);
    assert_eq!(unsafe { cs_planar_lambda(planar, &mut lam, &mut bar) }, CsStatus::Ok);
    assert!(lam > 6.4 && lam < 6.7, "{lam}");
    let mut u0 = 0.0;
    assert_eq!(unsafe { cs_planar_eval(planar, 0.0, 0.0, &mut u0) }, CsStatus::Ok);
    assert!(u0 > 0.0);

    let mut profile = ptr::null_mut();
    assert_eq!(unsafe { cs_profile_new(CsProfileKind::Rhombus as c_int, 100.0, &mut profile) }, CsStatus::Ok);
    let mut theta = [0.0; 2];
    let mut certified = 0usize;
    assert_eq!(
        unsafe { cs_certify(profile, planar, 2, theta.as_mut_ptr(), 2, &mut certified) },
        CsStatus::Ok
    );
    assert_eq!(certified, 2);
    assert!(theta[0] > lam && theta[0] < theta[1] && theta[1] < PI * PI);
    assert_eq!(
        unsafe { cs_certify(profile, planar, 3, theta.as_mut_ptr(), 2, &mut certified) },
        CsStatus::ErrBufferTooSmall
    );
    unsafe { cs_profile_free(profile) };
    unsafe { cs_planar_free(planar) };

    let mut disc = ptr::null_mut();
    assert_eq!(unsafe { cs_profile_new(CsProfileKind::Ellipse as c_int, 1.0, &mut disc) }, CsStatus::Ok);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { cs_waveguide_analyze(disc, 3.0, 1.0 / 8.0, 1.0 / 8.0, true, &mut s) }, CsStatus::Ok);
    let (mut count, mut cutoff, mut empty) = (0usize, 0.0, true);
    assert_eq!(unsafe { cs_spectrum_summary(s, &mut count, &mut cutoff, &mut empty) }, CsStatus::Ok);
    assert_eq!(count, 1);
    assert!(!empty);
    let mut written = 0usize;
    assert_eq!(
        unsafe { cs_spectrum_eigenvalues(s, ptr::null_mut(), 0, &mut written) },
        CsStatus::ErrBufferTooSmall
    );
    let mut buf = vec![0.0; written];
    assert_eq!(unsafe { cs_spectrum_eigenvalues(s, buf.as_mut_ptr(), written, &mut written) }, CsStatus::Ok);
    assert!(buf[0] < cutoff && buf.windows(2).all(|p| p[0] <= p[1]));
    unsafe { cs_spectrum_free(s) };
    unsafe { cs_profile_free(disc) };
}

#[test]
fn header_declares_the_interface() {
    let h = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/crucispec.h")).unwrap();
    for f in [
        "cs_version",
        "cs_last_error_message",
        "cs_profile_new",
        "cs_planar_estimate",
        "cs_modes_solve",
        "cs_certify",
        "cs_waveguide_analyze",
        "cs_spectrum_eigenvalues",
        "typedef struct CsProfile CsProfile",
        "CS_STATUS_ERR_PANIC",
    ] {
        assert!(h.contains(f), "{f} missing from header");
    }
}
