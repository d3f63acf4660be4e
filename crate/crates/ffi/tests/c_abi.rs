use std::ffi::CStr;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use ris_im_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(ris_last_error_message()) }
        .to_string_lossy()
        .into_owned()
}

#[test]
fn constellation_handle_lifecycle() {
    let mut c = ptr::null_mut();
    unsafe {
        assert_eq!(
            ris_constellation_new(RIS_MODULATION_QAM, 16, 1.0, &mut c),
            RisStatus::Ok
        );
        let mut order = 0;
        assert_eq!(ris_constellation_order(c, &mut order), RisStatus::Ok);
        assert_eq!(order, 16);
        let mut energy = 0.0;
        for label in 0..16 {
            let (mut re, mut im) = (0.0, 0.0);
            assert_eq!(ris_constellation_point(c, label, &mut re, &mut im), RisStatus::Ok);
            energy += re * re + im * im;
        }
        assert!((energy / 16.0 - 1.0).abs() < 1e-12);
        let (mut re, mut im) = (0.0, 0.0);
        assert_eq!(
            ris_constellation_point(c, 16, &mut re, &mut im),
            RisStatus::InvalidArgument
        );
        assert!(last_error().contains("out of range"));
        ris_constellation_free(c);
        ris_constellation_free(ptr::null_mut());
    }
}

#[test]
fn invalid_inputs_report_status() {
    let mut c = ptr::null_mut();
    unsafe {
        assert_eq!(
            ris_constellation_new(RIS_MODULATION_QAM, 8, 1.0, &mut c),
            RisStatus::InvalidArgument
        );
        assert!(c.is_null());
        assert_eq!(ris_constellation_new(7, 4, 1.0, &mut c), RisStatus::InvalidArgument);
        assert!(last_error().contains("modulation"));
        assert_eq!(
            ris_constellation_new(RIS_MODULATION_PSK, 4, 1.0, ptr::null_mut()),
            RisStatus::NullPointer
        );
        let mut bep = 0.0;
        assert_eq!(
            ris_theory_bep(RIS_SCHEME_SSK, 9, 64, 2, ptr::null(), -20.0, RIS_MODE_EXACT, &mut bep),
            RisStatus::InvalidArgument
        );
        let mut plan = ptr::null_mut();
        let grid = [-20.0];
        assert_eq!(
            ris_sim_plan_new(
                RIS_SCHEME_SSK,
                RIS_DETECTOR_ML,
                64,
                3,
                ptr::null(),
                grid.as_ptr(),
                1,
                1,
                10,
                1000,
                &mut plan
            ),
            RisStatus::InvalidArgument
        );
        assert!(plan.is_null());
    }
}

#[test]
fn theory_matches_core() {
    let mut bep = 0.0;
    let status = unsafe {
        ris_theory_bep(
            RIS_SCHEME_SSK,
            RIS_DETECTOR_GREEDY,
            64,
            2,
            ptr::null(),
            -24.0,
            RIS_MODE_EXACT,
            &mut bep,
        )
    };
    assert_eq!(status, RisStatus::Ok);
    assert!(last_error().is_empty());
    let mut pep = 0.0;
    let es_n0 = 10f64.powf(-2.4);
    assert_eq!(
        unsafe { ris_pep_ssk_greedy(64, es_n0, RIS_MODE_EXACT, &mut pep) },
        RisStatus::Ok
    );
    // n_R = 2: one index bit, BEP equals the PEP
    assert!((bep - pep).abs() < 1e-15);
    let direct = ris_im::theory::pep_ssk_greedy(64, es_n0, ris_im::theory::BoundMode::Exact).unwrap();
    assert_eq!(pep, direct);
}

#[test]
fn sweep_is_deterministic_across_worker_counts() {
    let grid = [-30.0, -26.0];
    let mut c = ptr::null_mut();
    let mut plan = ptr::null_mut();
    unsafe {
        assert_eq!(ris_constellation_new(RIS_MODULATION_PSK, 4, 1.0, &mut c), RisStatus::Ok);
        assert_eq!(
            ris_sim_plan_new(
                RIS_SCHEME_SM,
                RIS_DETECTOR_ML,
                32,
                2,
                c,
                grid.as_ptr(),
                grid.len(),
                7,
                50,
                40_000,
                &mut plan
            ),
            RisStatus::Ok
        );
        ris_constellation_free(c);
        assert_eq!(ris_sim_plan_set_kappa(plan, 10.0), RisStatus::Ok);
        let mut small = [RisBerRecord {
            snr_db: 0.0,
            bits_sent: 0,
            bit_errors: 0,
            ber: 0.0,
            ci_lo: 0.0,
            ci_hi: 0.0,
            wall_seconds: 0.0,
            truncated: 0,
        }; 2];
        let mut big = small;
        let mut n = 0;
        assert_eq!(
            ris_sim_run_sweep(plan, 1, small.as_mut_ptr(), 1, &mut n),
            RisStatus::BufferTooSmall
        );
        assert_eq!(n, 2);
        assert_eq!(ris_sim_run_sweep(plan, 1, small.as_mut_ptr(), 2, &mut n), RisStatus::Ok);
        assert_eq!(ris_sim_run_sweep(plan, 3, big.as_mut_ptr(), 2, &mut n), RisStatus::Ok);
        for (a, b) in small.iter().zip(&big) {
            assert_eq!((a.bits_sent, a.bit_errors, a.ber), (b.bits_sent, b.bit_errors, b.ber));
            assert!(a.ci_lo <= a.ber && a.ber <= a.ci_hi);
        }
        let mut one = small[0];
        assert_eq!(ris_sim_run_point(plan, -26.0, 2, &mut one), RisStatus::Ok);
        assert_eq!(
            (one.bits_sent, one.bit_errors),
            (small[1].bits_sent, small[1].bit_errors)
        );
        ris_sim_plan_free(plan);
    }
}

fn header() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include/ris_im.h")
}

fn have_cc() -> bool {
    Command::new("cc").arg("--version").output().is_ok()
}

#[test]
fn header_declares_the_abi() {
    let text = std::fs::read_to_string(header()).unwrap();
    for sym in [
        "ris_version",
        "ris_last_error_message",
        "ris_constellation_new",
        "ris_constellation_free",
        "ris_sim_plan_new",
        "ris_sim_plan_free",
        "ris_sim_run_point",
        "ris_sim_run_sweep",
        "ris_theory_bep",
        "ris_pep_ssk_greedy",
        "typedef struct RisSimPlan RisSimPlan",
        "RIS_STATUS_NUMERIC",
    ] {
        assert!(text.contains(sym), "{sym} missing from header");
    }
}

#[test]
fn header_compiles_as_c() {
    if !have_cc() {
        eprintln!("skipped: no C compiler");
        return;
    }
    let out = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-x", "c"])
        .arg(header())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

const C_PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "ris_im.h"

int main(void) {
    RisConstellation *c = NULL;
    if (ris_constellation_new(RIS_MODULATION_PSK, 2, 1.0, &c) != RIS_STATUS_OK) return 1;
    double bep = 0.0;
    if (ris_theory_bep(RIS_SCHEME_SM, RIS_DETECTOR_ML, 64, 2, c, -24.0, RIS_MODE_EXACT, &bep) != RIS_STATUS_OK) return 2;
    if (!(bep > 0.0 && bep < 0.5)) return 3;
    ris_constellation_free(c);
    if (ris_constellation_new(RIS_MODULATION_QAM, 8, 1.0, &c) != RIS_STATUS_INVALID_ARGUMENT) return 4;
    if (strlen(ris_last_error_message()) == 0) return 5;
    printf("%s %.6e\n", ris_version(), bep);
    return 0;
}
"#;

#[test]
fn c_program_links_static_library() {
    if !have_cc() {
        eprintln!("skipped: no C compiler");
        return;
    }
    // target/<profile>/deps/<test exe> -> target/<profile>/libris_im_ffi.a
    let exe = std::env::current_exe().unwrap();
    let lib = exe.parent().and_then(Path::parent).unwrap().join("libris_im_ffi.a");
    if !lib.exists() {
        eprintln!("skipped: {} not built", lib.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    std::fs::write(&src, C_PROGRAM).unwrap();
    let bin = dir.path().join("main");
    let out = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-I"])
        .arg(header().parent().unwrap())
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let run = Command::new(&bin).output().unwrap();
    assert!(run.status.success(), "exit {:?}", run.status.code());
    assert!(String::from_utf8_lossy(&run.stdout).starts_with(env!("CARGO_PKG_VERSION")));
}
