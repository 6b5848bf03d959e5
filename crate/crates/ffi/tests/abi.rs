use std::ffi::{c_char, CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use coarse_complex_ffi::*;

fn data(name: &str) -> CString {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data").join(name);
    CString::new(std::fs::read_to_string(path).unwrap()).unwrap()
}

fn last_error() -> String {
    let mut buf = vec![0 as c_char; 256];
    let n = unsafe { cc_last_error(buf.as_mut_ptr(), buf.len()) };
    assert!(n > 0);
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

fn complex(name: &str) -> *mut CcComplex {
    let mut k = ptr::null_mut();
    assert_eq!(unsafe { cc_complex_parse(data(name).as_ptr(), &mut k) }, CcStatus::Ok);
    k
}

#[test]
fn torus_betti_and_counts() {
    let k = complex("torus.cx");
    let (mut b, mut n, mut d) = (0usize, 0usize, 0i64);
    unsafe {
        assert_eq!(cc_complex_betti(k, 1, &mut b), CcStatus::Ok);
        assert_eq!(cc_complex_num_cells(k, &mut n), CcStatus::Ok);
        assert_eq!(cc_complex_dim(k, &mut d), CcStatus::Ok);
        cc_complex_free(k);
    }
    assert_eq!((b, n, d), (2, 7 + 21 + 14, 2));
}

#[test]
fn signatures() {
    let cp2 = complex("cp2.cx");
    let mut s = 0i64;
    assert_eq!(unsafe { cc_complex_signature(cp2, &mut s) }, CcStatus::Ok);
    assert_eq!(s.abs(), 1);
    let (c1, c0) = (complex("cp2_core1.cx"), complex("cp2_core0.cx"));
    let glue = data("cp2_glue.json");
    assert_eq!(unsafe { cc_pair_signature(c1, c0, glue.as_ptr(), &mut s) }, CcStatus::Ok);
    assert_eq!(s, 1);
    let torus = complex("torus.cx");
    assert_eq!(unsafe { cc_complex_signature(torus, &mut s) }, CcStatus::Validation);
    assert!(last_error().contains("divisible by 4"));
    unsafe {
        cc_complex_free(cp2);
        cc_complex_free(c1);
        cc_complex_free(c0);
        cc_complex_free(torus);
    }
}

#[test]
fn metric_distances() {
    let (mut p, mut t) = (ptr::null_mut(), ptr::null_mut());
    unsafe {
        assert_eq!(cc_metric_parse(data("point.ms").as_ptr(), &mut p), CcStatus::Ok);
        assert_eq!(cc_metric_parse(data("triangle345.ms").as_ptr(), &mut t), CcStatus::Ok);
        let (mut lo, mut hi) = (0.0, 0.0);
        assert_eq!(cc_gh_distance(p, t, 1e-9, &mut lo, &mut hi), CcStatus::Ok);
        assert!(lo <= 2.5 && 2.5 <= hi && hi - lo <= 1e-9);
        let mut d = 0.0;
        assert_eq!(cc_lipschitz_top_distance(p, t, &mut d), CcStatus::Ok);
        assert!(d.is_infinite());
        assert_eq!(cc_lipschitz_distance(t, t, 4, &mut d), CcStatus::Ok);
        assert_eq!(d, 0.0);
        let mut n = 0;
        assert_eq!(cc_metric_len(t, &mut n), CcStatus::Ok);
        assert_eq!(n, 3);
        cc_metric_free(p);
        cc_metric_free(t);
    }
}

#[test]
fn errors_are_reported() {
    let mut m = ptr::null_mut();
    let bad = CString::new("3\n0 1 5\n1 0 1\n5 1 0\n").unwrap();
    assert_eq!(unsafe { cc_metric_parse(bad.as_ptr(), &mut m) }, CcStatus::Parse);
    assert!(m.is_null());
    assert!(last_error().starts_with("line 2"));
    assert_eq!(unsafe { cc_metric_parse(ptr::null(), &mut m) }, CcStatus::NullPointer);
    let mut n = 0;
    assert_eq!(unsafe { cc_complex_num_cells(ptr::null(), &mut n) }, CcStatus::NullPointer);
    // short buffers are truncated but report the full length
    let mut tiny = [0 as c_char; 4];
    let full = unsafe { cc_last_error(tiny.as_mut_ptr(), tiny.len()) };
    assert!(full > 3);
    assert_eq!(unsafe { CStr::from_ptr(tiny.as_ptr()) }.to_bytes().len(), 3);
    unsafe { cc_complex_free(ptr::null_mut()) };
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(cc_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_everything_and_compiles() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/coarse_complex.h");
    let text = std::fs::read_to_string(&header).unwrap();
    let src = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("src/lib.rs")).unwrap();
    for name in src.lines().filter_map(|l| l.split("extern \"C\" fn ").nth(1)).map(|l| l.split('(').next().unwrap()) {
        assert!(text.contains(&format!("{name}(")), "{name} missing from header");
    }
    let Ok(out) = Command::new("cc").args(["-fsyntax-only", "-x", "c"]).arg(&header).output() else {
        eprintln!("no C compiler, syntax check skipped");
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
