use std::ffi::{CStr, CString};
use std::ptr;

use mwc_ffi::*;

fn family(spec: &str) -> *mut MwcGraph {
    let spec = CString::new(spec).unwrap();
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { mwc_graph_from_family(spec.as_ptr(), &mut g) }, MwcStatus::Ok);
    g
}

fn last_error() -> String {
    let p = mwc_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string()
}

#[test]
fn expansion_of_the_six_cycle() {
    let g = family("c6");
    let (mut num, mut den) = (0u64, 0u64);
    unsafe {
        assert_eq!(mwc_graph_vertex_count(g), 6);
        assert_eq!(mwc_graph_edge_count(g), 6);
        assert_eq!(mwc_expansion(g, &mut num, &mut den), MwcStatus::Ok);
        assert_eq!((num, den), (2, 3));
        assert_eq!(mwc_kway_expansion(g, 3, &mut num, &mut den), MwcStatus::Ok);
        assert_eq!((num, den), (1, 1));
        mwc_graph_free(g);
    }
}

#[test]
fn graph_from_edges_and_spectrum() {
    let edges: [u32; 12] = [0, 1, 0, 2, 0, 3, 1, 2, 1, 3, 2, 3];
    let mut g = ptr::null_mut();
    let mut values = [0.0f64; 4];
    unsafe {
        assert_eq!(mwc_graph_new(4, edges.as_ptr(), 6, &mut g), MwcStatus::Ok);
        assert_eq!(mwc_spectrum(g, values.as_mut_ptr(), 2), MwcStatus::BufferTooSmall);
        assert_eq!(mwc_spectrum(g, values.as_mut_ptr(), 4), MwcStatus::Ok);
        mwc_graph_free(g);
    }
    for (got, want) in values.iter().zip([0.0, 4.0, 4.0, 4.0]) {
        assert!((got - want).abs() < 1e-9);
    }
}

#[test]
fn edge_list_round_trip() {
    let text = CString::new("3 2\n0 1\n1 2\n").unwrap();
    let mut g = ptr::null_mut();
    unsafe {
        assert_eq!(mwc_graph_from_edge_list(text.as_ptr(), &mut g), MwcStatus::Ok);
        assert_eq!(mwc_graph_edge_count(g), 2);
        mwc_graph_free(g);
    }
}

#[test]
fn errors_set_codes_and_messages() {
    let mut g = ptr::null_mut();
    let bad = CString::new("chain(k3*8").unwrap();
    assert_eq!(unsafe { mwc_graph_from_family(bad.as_ptr(), &mut g) }, MwcStatus::Parse);
    assert!(last_error().contains("parse error"));
    assert!(g.is_null());

    let edges: [u32; 2] = [0, 5];
    assert_eq!(unsafe { mwc_graph_new(3, edges.as_ptr(), 1, &mut g) }, MwcStatus::InvalidArgument);

    let (mut num, mut den) = (0u64, 0u64);
    assert_eq!(unsafe { mwc_expansion(ptr::null(), &mut num, &mut den) }, MwcStatus::NullPointer);

    let big = family("rr(n=40,d=3,seed=1)");
    assert_eq!(unsafe { mwc_expansion(big, &mut num, &mut den) }, MwcStatus::CapExceeded);
    assert!(last_error().contains("cap-subset"));
    assert_eq!(unsafe { mwc_kway_expansion(big, 0, &mut num, &mut den) }, MwcStatus::InvalidArgument);
    unsafe { mwc_graph_free(big) };

    let one = family("e1");
    let mut labels = [0usize; 1];
    let status = unsafe { mwc_partition(one, 2, MwcMode::Exact, labels.as_mut_ptr(), 1, ptr::null_mut()) };
    assert_eq!(status, MwcStatus::InvalidArgument);
    unsafe { mwc_graph_free(one) };
}

#[test]
fn single_vertex_has_zero_one_way_expansion() {
    let g = family("k1");
    let (mut num, mut den) = (0u64, 7u64);
    assert_eq!(unsafe { mwc_kway_expansion(g, 1, &mut num, &mut den) }, MwcStatus::Ok);
    assert_eq!((num, den), (0, 1));
    unsafe { mwc_graph_free(g) };
}

#[test]
fn partition_of_two_triangles() {
    let g = family("2k3");
    let mut labels = [9usize; 6];
    let mut trace = ptr::null_mut();
    unsafe {
        assert_eq!(mwc_partition(g, 2, MwcMode::Exact, labels.as_mut_ptr(), 6, &mut trace), MwcStatus::Ok);
        let json: serde_json::Value = serde_json::from_str(CStr::from_ptr(trace).to_str().unwrap()).unwrap();
        mwc_string_free(trace);
        mwc_graph_free(g);
        assert_eq!(json["divisions"][0]["divided"], "G");
        assert_eq!(json["leaves"].as_array().unwrap().len(), 2);
    }
    assert_eq!(labels, [0, 0, 0, 1, 1, 1]);
}

#[test]
fn verify_returns_reports() {
    let suite = CString::new("cheeger").unwrap();
    let corpus = CString::new("c6;petersen").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { mwc_verify(suite.as_ptr(), corpus.as_ptr(), &mut out) }, MwcStatus::Ok);
    let text = unsafe { CStr::from_ptr(out) }.to_str().unwrap().to_string();
    unsafe { mwc_string_free(out) };
    let lines: Vec<serde_json::Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 2);
    assert!(lines.iter().all(|r| r["verdict"] == "pass"));

    let unknown = CString::new("nope").unwrap();
    assert_eq!(unsafe { mwc_verify(unknown.as_ptr(), ptr::null(), &mut out) }, MwcStatus::InvalidArgument);
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/mwc.h")).unwrap();
    for name in [
        "mwc_last_error",
        "mwc_graph_new",
        "mwc_graph_from_family",
        "mwc_graph_from_edge_list",
        "mwc_graph_free",
        "mwc_graph_vertex_count",
        "mwc_graph_edge_count",
        "mwc_expansion",
        "mwc_kway_expansion",
        "mwc_spectrum",
        "mwc_partition",
        "mwc_verify",
        "mwc_string_free",
        "typedef struct MwcGraph MwcGraph",
        "MWC_STATUS_CAP_EXCEEDED = 4",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}

#[test]
fn header_compiles_as_c() {
    let dir = env!("CARGO_MANIFEST_DIR");
    let status = std::process::Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(format!("{dir}/include"))
        .arg(format!("{dir}/tests/c/smoke.c"))
        .status();
    match status {
        Ok(s) => assert!(s.success(), "cc rejected the header"),
        Err(e) => panic!("no C compiler on PATH: {e}"),
    }
}
