//! The C ABI exercised from Rust and from a C program built against the
//! generated header.

use std::f64::consts::PI;
use std::ffi::{c_char, CStr};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use nodal_lab::coeffs::sample_matrix;
use nodal_lab::nodal::{nodal_length, GridSpec};
use nodal_lab::{CoeffLaw, TrigPoly};
use nodal_lab_ffi::*;

fn last_error() -> String {
    let mut buf = [0 as c_char; 256];
    unsafe { nl_last_error(buf.as_mut_ptr(), buf.len()) };
    unsafe { CStr::from_ptr(buf.as_ptr()) }
        .to_string_lossy()
        .into_owned()
}

#[test]
fn sampled_poly_matches_library() {
    let (n, seed) = (12, 5);
    let mut p = ptr::null_mut();
    assert_eq!(
        unsafe { nl_poly_sample(NlLaw::Rademacher as i32, n, seed, &mut p) },
        NlStatus::Ok
    );
    let q = TrigPoly::new(sample_matrix(CoeffLaw::Rademacher, n, seed).unwrap()).unwrap();
    let mut v = 0.0;
    assert_eq!(
        unsafe { nl_poly_eval(p, 0.3, 1.7, 0, &mut v) },
        NlStatus::Ok
    );
    assert_eq!(v, q.eval(0.3, 1.7));
    assert_eq!(
        unsafe { nl_poly_eval(p, 3.0, 5.0, 1, &mut v) },
        NlStatus::Ok
    );
    assert_eq!(v, q.eval_rescaled(3.0, 5.0));

    let mut s = ptr::null_mut();
    assert_eq!(unsafe { nl_nodal_extract(p, &mut s) }, NlStatus::Ok);
    let ns = nodal_length(&q, &GridSpec::global(n)).unwrap();
    let mut len = 0.0;
    assert_eq!(unsafe { nl_nodal_total_length(s, &mut len) }, NlStatus::Ok);
    assert_eq!(len, ns.total_length());
    let mut m = 0.0;
    assert_eq!(unsafe { nl_nodal_max_cell_length(s, &mut m) }, NlStatus::Ok);
    assert_eq!(m, ns.max_cell_length());

    let count = unsafe { nl_nodal_segment_count(s) };
    let mut buf = vec![0.0; 4 * count];
    let mut written = 0;
    assert_eq!(
        unsafe { nl_nodal_segments(s, buf.as_mut_ptr(), buf.len(), &mut written) },
        NlStatus::Ok
    );
    assert_eq!(written, buf.len());
    let sum: f64 = buf
        .chunks_exact(4)
        .map(|c| (c[2] - c[0]).hypot(c[3] - c[1]))
        .sum();
    assert!((sum - len).abs() <= 1e-9 * len);
    unsafe {
        nl_nodal_free(s);
        nl_poly_free(p);
    }
}

#[test]
fn errors_are_reported() {
    let mut p = ptr::null_mut();
    assert_eq!(
        unsafe { nl_poly_sample(NlLaw::Gaussian as i32, 0, 1, &mut p) },
        NlStatus::InvalidArgument
    );
    assert!(p.is_null());
    assert!(last_error().contains("degree"));

    assert_eq!(
        unsafe { nl_poly_sample(9, 3, 1, &mut p) },
        NlStatus::InvalidArgument
    );
    assert!(last_error().contains("law"));

    let bad = [1.0, f64::NAN, 0.0, 1.0];
    assert_eq!(
        unsafe { nl_poly_new(2, bad.as_ptr(), &mut p) },
        NlStatus::InvalidArgument
    );
    assert_eq!(
        unsafe { nl_poly_new(2, ptr::null(), &mut p) },
        NlStatus::NullPointer
    );

    let mut v = 0.0;
    assert_eq!(
        unsafe { nl_poly_eval(ptr::null(), 0.0, 0.0, 0, &mut v) },
        NlStatus::NullPointer
    );
    assert_eq!(
        unsafe { nl_kacrice_expected_length(5, 1.0, 0.0, 0.0, 1.0, 1e-6, &mut v, ptr::null_mut()) },
        NlStatus::InvalidArgument
    );
    assert_eq!(unsafe { nl_poly_degree(ptr::null()) }, 0);
    unsafe {
        nl_poly_free(ptr::null_mut());
        nl_nodal_free(ptr::null_mut());
    }
}

#[test]
fn truncated_error_message() {
    let mut p = ptr::null_mut();
    unsafe { nl_poly_sample(0, 0, 1, &mut p) };
    let mut buf = [1 as c_char; 4];
    let full = unsafe { nl_last_error(buf.as_mut_ptr(), buf.len()) };
    assert!(full > 3);
    assert_eq!(buf[3], 0);
    assert_eq!(unsafe { nl_last_error(ptr::null_mut(), 0) }, full);
}

#[test]
fn arithmetic_entry_points() {
    let (n, k, l, eps) = (25, 1, 1, 0.1);
    let mut g = 0.0;
    assert_eq!(
        unsafe { nl_smallball_gaussian(n, k, l, eps, &mut g) },
        NlStatus::Ok
    );
    assert_eq!(
        g,
        nodal_lab::arith::smallball_gaussian(n, k, l, eps).unwrap()
    );
    let mut h = 0.0;
    assert_eq!(
        unsafe { nl_halasz_integral(NlLaw::Gaussian as i32, n, k, l, eps, &mut h) },
        NlStatus::Ok
    );
    assert!(h > 0.0);
    let mut e = 0.0;
    let mut achieved = 1.0;
    assert_eq!(
        unsafe { nl_kacrice_expected_length(1, 0.0, PI, 0.0, PI, 1e-6, &mut e, &mut achieved) },
        NlStatus::Ok
    );
    assert!((e - 2.0 * PI).abs() < 1e-6);
    let v = unsafe { CStr::from_ptr(nl_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

/// Static library built alongside this test, in `target/<profile>/deps`.
fn static_lib() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().join("libnodal_lab_ffi.a")
}

#[test]
fn c_program_links_against_header() {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let lib = static_lib();
    assert!(lib.exists(), "missing {}", lib.display());
    let exe = Path::new(env!("CARGO_TARGET_TMPDIR")).join("nodal_lab_smoke");
    let status = Command::new("cc")
        .args(["-std=c11", "-D_DEFAULT_SOURCE", "-Wall", "-Werror", "-I"])
        .arg(manifest.join("include"))
        .arg(manifest.join("tests/c/smoke.c"))
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&exe)
        .status()
        .expect("cc");
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok "));
}
