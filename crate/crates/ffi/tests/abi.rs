use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use nyman_ffi::*;

fn parse(text: &str) -> *mut NymanElement {
    let c = CString::new(text).unwrap();
    let mut e = ptr::null_mut();
    assert_eq!(unsafe { nyman_element_parse(c.as_ptr(), &mut e) }, NymanStatus::Ok);
    e
}

fn last_error() -> String {
    let p = nyman_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn inner_products_and_errors() {
    let eng = nyman_engine_new(0.0, 0);
    let a = parse("e:1");
    let b = parse("phi:3");
    let (mut v, mut e) = (0.0, 0.0);
    assert_eq!(unsafe { nyman_inner_product(eng, a, b, &mut v, &mut e) }, NymanStatus::Ok);
    let mut om = 0.0;
    assert_eq!(unsafe { nyman_omega(1.0 / 3.0, &mut om) }, NymanStatus::Ok);
    assert!((v + om).abs() < 1e-12 && e < 1e-12);

    let chi = parse("chi");
    assert_eq!(unsafe { nyman_inner_product(eng, chi, chi, &mut v, &mut e) }, NymanStatus::Ok);
    assert_eq!(v, 1.0);

    let bad = CString::new("e:0").unwrap();
    let mut out = ptr::null_mut();
    let st = unsafe { nyman_element_parse(bad.as_ptr(), &mut out) };
    assert_ne!(st, NymanStatus::Ok);
    assert!(out.is_null());
    assert!(!last_error().is_empty());

    assert_eq!(
        unsafe { nyman_inner_product(eng, ptr::null(), chi, &mut v, &mut e) },
        NymanStatus::NullPointer
    );

    let mut json = ptr::null_mut();
    assert_eq!(unsafe { nyman_element_to_json(a, &mut json) }, NymanStatus::Ok);
    let text = unsafe { CStr::from_ptr(json) }.to_str().unwrap().to_owned();
    assert!(text.contains("\"atom\":\"e\""));
    unsafe {
        nyman_string_free(json);
        nyman_element_free(a);
        nyman_element_free(b);
        nyman_element_free(chi);
        nyman_engine_free(eng);
    }
}

#[test]
fn scalar_functions() {
    let mut mu = 0i8;
    assert_eq!(unsafe { nyman_mobius(30, &mut mu) }, NymanStatus::Ok);
    assert_eq!(mu, -1);
    assert_eq!(unsafe { nyman_mobius(0, &mut mu) }, NymanStatus::Domain);
    let (mut re, mut im) = (0.0, 0.0);
    assert_eq!(unsafe { nyman_zeta(2.0, 0.0, &mut re, &mut im) }, NymanStatus::Ok);
    assert!((re - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-13 && im == 0.0);
    assert_eq!(unsafe { nyman_zeta(1.0, 0.0, &mut re, &mut im) }, NymanStatus::Pole);
    let mut d = 0.0;
    assert_eq!(unsafe { nyman_digamma(1.0, &mut d) }, NymanStatus::Ok);
    assert!((d + 0.5772156649015329).abs() < 1e-14);
    assert_eq!(unsafe { nyman_digamma(-1.0, &mut d) }, NymanStatus::Domain);
}

#[test]
fn arithmetic_functions_and_projection() {
    let eng = nyman_engine_new(1e-10, 10_000_000);
    let chi = parse("chi");
    let (mut v, mut e) = (0.0, 0.0);
    for (n, mu) in [(1u64, 1.0), (2, -1.0), (4, 0.0), (6, 1.0)] {
        assert_eq!(unsafe { nyman_w(eng, chi, n, 0, &mut v, &mut e) }, NymanStatus::Ok);
        assert_eq!(v, mu);
        assert_eq!(unsafe { nyman_w(eng, chi, n, 1, &mut v, &mut e) }, NymanStatus::Ok);
        assert!((v - mu).abs() <= e.max(1e-12));
    }
    assert_eq!(unsafe { nyman_u(eng, chi, 3, 0, &mut v, &mut e) }, NymanStatus::Ok);
    assert_eq!(v, 0.0);

    let mut c = [0.0; 8];
    let (mut written, mut dsq, mut cond) = (0usize, 0.0, 0.0);
    let st = unsafe {
        nyman_project(eng, 5, 0, 0, c.as_mut_ptr(), c.len(), &mut written, &mut dsq, &mut cond)
    };
    assert_eq!(st, NymanStatus::Ok);
    assert_eq!(written, 5);
    assert!(dsq > 0.0 && dsq < 1.0 && cond > 1.0);
    let st = unsafe {
        nyman_project(eng, 5, 0, 0, c.as_mut_ptr(), 2, &mut written, &mut dsq, &mut cond)
    };
    assert_eq!(st, NymanStatus::LengthMismatch);
    let st = unsafe {
        nyman_project(eng, 5, 7, 0, c.as_mut_ptr(), 8, &mut written, &mut dsq, &mut cond)
    };
    assert_eq!(st, NymanStatus::Domain);
    unsafe {
        nyman_element_free(chi);
        nyman_engine_free(eng);
    }
}

#[test]
fn header_declares_the_abi_and_compiles() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let header = dir.join("include").join("nyman.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for f in [
        "nyman_engine_new",
        "nyman_element_parse",
        "nyman_inner_product",
        "nyman_project",
        "nyman_last_error_message",
        "NYMAN_STATUS_NOT_POSITIVE_DEFINITE",
    ] {
        assert!(text.contains(f), "{f} missing from header");
    }
    // Syntax-check with the system C compiler when one is present.
    let src = std::env::temp_dir().join(format!("nyman_header_check_{}.c", std::process::id()));
    std::fs::write(&src, "#include \"nyman.h\"\nint main(void){return NYMAN_STATUS_OK;}\n").unwrap();
    match Command::new("cc")
        .arg("-fsyntax-only")
        .arg("-Wall")
        .arg("-I")
        .arg(header.parent().unwrap())
        .arg(&src)
        .output()
    {
        Ok(o) => assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr)),
        Err(_) => eprintln!("no C compiler found; skipped header compile check"),
    }
    let _ = std::fs::remove_file(src);
}
