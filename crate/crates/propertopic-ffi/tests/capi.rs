use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use serde_json::Value;

use propertopic_ffi::*;

fn fixture(name: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name);
    std::fs::read_to_string(p).unwrap()
}

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take(s: *mut c_char) -> String {
    let out = CStr::from_ptr(s).to_str().unwrap().to_string();
    pt_string_free(s);
    out
}

fn last_error() -> String {
    let p = pt_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string()
}

#[test]
fn props_are_built_and_queried() {
    unsafe {
        let mut p = ptr::null_mut();
        assert_eq!(pt_prop_from_json(c(r#"{"kind": "terminal"}"#).as_ptr(), &mut p), PtStatus::Ok);
        assert!(pt_last_error().is_null());
        let mut id = ptr::null_mut();
        assert_eq!(pt_prop_id(p, &mut id), PtStatus::Ok);
        assert_eq!(take(id), "T");
        let x = c(r#"{"owner": "T", "out": ["*"], "in": ["*", "*"], "payload": {"kind": "point"}}"#);
        let mut yes = false;
        assert_eq!(pt_prop_contains(p, x.as_ptr(), &mut yes), PtStatus::Ok);
        assert!(yes);
        pt_prop_free(p);
    }
}

#[test]
fn graphs_evaluate_through_the_boundary() {
    unsafe {
        let mut p = ptr::null_mut();
        assert_eq!(pt_prop_from_json(c(&fixture("free53.prop.json")).as_ptr(), &mut p), PtStatus::Ok);
        let mut out = ptr::null_mut();
        assert_eq!(
            pt_prop_eval_graph(p, c(&fixture("five_three.graph.json")).as_ptr(), &mut out),
            PtStatus::Ok
        );
        let v: Value = serde_json::from_str(&take(out)).unwrap();
        assert_eq!(v["out"].as_array().unwrap().len(), 5);
        assert_eq!(v["in"].as_array().unwrap().len(), 3);
        pt_prop_free(p);
    }
}

#[test]
fn psi_of_or_round_trips_and_is_weak_zero() {
    unsafe {
        let mut x = ptr::null_mut();
        assert_eq!(
            pt_psi_build(c(&fixture("bool_or.algebra.json")).as_ptr(), 3, 0, &mut x),
            PtStatus::Ok
        );
        let mut bound = 0;
        assert_eq!(pt_ptset_bound(x, &mut bound), PtStatus::Ok);
        assert_eq!(bound, 3);
        let mut passed = false;
        let mut report = ptr::null_mut();
        assert_eq!(pt_ptset_check_weak(x, 0, 3, &mut passed, &mut report), PtStatus::Ok);
        assert!(passed);
        let r: Value = serde_json::from_str(&take(report)).unwrap();
        assert!(r["horns_checked"].as_u64().unwrap() > 0);
        let mut ok = true;
        assert_eq!(pt_ptset_validate(x, &mut ok, ptr::null_mut()), PtStatus::Ok);
        assert!(!ok);

        let mut text = ptr::null_mut();
        assert_eq!(pt_ptset_to_json(x, &mut text), PtStatus::Ok);
        let text = take(text);
        let mut y = ptr::null_mut();
        assert_eq!(pt_ptset_from_json(c(&text).as_ptr(), ptr::null(), 3, &mut y), PtStatus::Ok);
        let mut again = ptr::null_mut();
        assert_eq!(pt_ptset_to_json(y, &mut again), PtStatus::Ok);
        assert_eq!(take(again), text);
        pt_ptset_free(x);
        pt_ptset_free(y);
    }
}

#[test]
fn failures_carry_a_status_and_a_message() {
    unsafe {
        let mut p = ptr::null_mut();
        assert_eq!(pt_prop_from_json(ptr::null(), &mut p), PtStatus::NullArgument);
        assert!(last_error().contains("spec_json"));
        assert_eq!(pt_prop_from_json(c("{ nope").as_ptr(), &mut p), PtStatus::Parse);
        assert_eq!(pt_prop_from_json(c(r#"{"kind": "nope"}"#).as_ptr(), &mut p), PtStatus::Parse);
        let bad = [0xffu8, 0];
        assert_eq!(pt_prop_from_json(bad.as_ptr().cast(), &mut p), PtStatus::InvalidUtf8);
        assert_eq!(
            pt_prop_from_json(c(r#"{"kind": "terminal"}"#).as_ptr(), ptr::null_mut()),
            PtStatus::NullArgument
        );
        assert!(p.is_null());
        let mut x = ptr::null_mut();
        assert_eq!(pt_psi_build(c(r#"{"kind": "bool-or"}"#).as_ptr(), 0, 0, &mut x), PtStatus::Parse);
        let mut passed = false;
        assert_eq!(
            pt_ptset_check_weak(ptr::null(), 0, 1, &mut passed, ptr::null_mut()),
            PtStatus::NullArgument
        );
        pt_string_free(ptr::null_mut());
        pt_prop_free(ptr::null_mut());
        pt_ptset_free(ptr::null_mut());
    }
}

#[test]
fn the_header_compiles_and_links_from_c() {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("no C compiler, skipping");
        return;
    }
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().unwrap().parent().unwrap();
    let lib = profile_dir.join("libpropertopic_ffi.a");
    assert!(lib.exists(), "{} missing", lib.display());
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let src = dir.join("capi_smoke.c");
    let bin = dir.join("capi_smoke");
    std::fs::write(
        &src,
        r#"#include <stdio.h>
#include "propertopic.h"
int main(void) {
    PtProp *p = NULL;
    if (pt_prop_from_json("{\"kind\": \"initial\"}", &p) != PT_STATUS_OK) return 1;
    char *id = NULL;
    if (pt_prop_id(p, &id) != PT_STATUS_OK) return 2;
    printf("%s\n", id);
    pt_string_free(id);
    pt_prop_free(p);
    if (pt_prop_from_json("{", &p) != PT_STATUS_PARSE) return 3;
    printf("%s\n", pt_last_error() ? "error set" : "no error");
    return 0;
}
"#,
    )
    .unwrap();
    let include = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    let st = Command::new(&cc)
        .arg(&src)
        .arg("-I")
        .arg(&include)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(st.success());
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "I\nerror set\n");
}
