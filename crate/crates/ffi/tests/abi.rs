use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use zslen_ffi::*;

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(zslen_last_error()) }
        .to_string_lossy()
        .into_owned()
}

fn group(lit: &str) -> *mut ZslenGroup {
    let mut g = ptr::null_mut();
    assert_eq!(
        unsafe { zslen_group_parse(cstr(lit).as_ptr(), &mut g) },
        ZslenStatus::Ok
    );
    g
}

#[test]
fn group_handles() {
    let mut g = ptr::null_mut();
    let f = [6u64, 2];
    assert_eq!(unsafe { zslen_group_new(f.as_ptr(), 2, &mut g) }, ZslenStatus::Ok);
    let mut v = 0u64;
    unsafe {
        assert_eq!(zslen_group_order(g, &mut v), ZslenStatus::Ok);
        assert_eq!(v, 12);
        zslen_group_rank(g, &mut v);
        assert_eq!(v, 2);
        zslen_group_exponent(g, &mut v);
        assert_eq!(v, 6);
        zslen_group_dstar(g, &mut v);
        assert_eq!(v, 7);
        zslen_davenport(g, 0, &mut v);
        assert_eq!(v, 7);
        let mut buf = [0u64; 4];
        let mut len = 0usize;
        assert_eq!(zslen_group_factors(g, buf.as_mut_ptr(), 4, &mut len), ZslenStatus::Ok);
        assert_eq!(&buf[..len], &[2, 6]);
        zslen_group_free(g);
        zslen_group_free(ptr::null_mut());
    }
}

#[test]
fn errors_and_null_pointers() {
    let mut g = ptr::null_mut();
    unsafe {
        assert_eq!(zslen_group_parse(cstr("Q8").as_ptr(), &mut g), ZslenStatus::Parse);
        assert!(g.is_null());
        assert!(last_error().contains("parse"));
        assert_eq!(zslen_group_parse(ptr::null(), &mut g), ZslenStatus::NullPointer);
        let f = [0u64];
        assert_eq!(zslen_group_new(f.as_ptr(), 1, &mut g), ZslenStatus::InvalidArgument);
        let mut v = 0u64;
        assert_eq!(zslen_group_order(ptr::null(), &mut v), ZslenStatus::NullPointer);
        assert_eq!(zslen_min_delta_pair_cf(10, 4, &mut v), ZslenStatus::InvalidArgument);
    }
}

#[test]
fn atoms_round_trip() {
    let g = group("C10");
    let mut set = ptr::null_mut();
    unsafe {
        assert_eq!(
            zslen_atoms_enumerate(g, cstr("1,3,7,9").as_ptr(), 0, &mut set),
            ZslenStatus::Ok
        );
        let mut n = 0usize;
        zslen_atoms_count(set, &mut n);
        assert_eq!(n, 18);
        let mut d = 0u64;
        zslen_atoms_davenport(set, &mut d);
        assert_eq!(d, 10);
        let mut k = 0usize;
        zslen_atoms_support_len(set, &mut k);
        assert_eq!(k, 4);
        let mut row = [0u32; 4];
        let mut len = 0usize;
        for i in 0..n {
            assert_eq!(zslen_atoms_get(set, i, row.as_mut_ptr(), 4, &mut len), ZslenStatus::Ok);
            let sum: u64 = [1u64, 3, 7, 9].iter().zip(row).map(|(g, c)| g * c as u64).sum();
            assert_eq!(sum % 10, 0);
        }
        assert_eq!(
            zslen_atoms_get(set, n, row.as_mut_ptr(), 4, &mut len),
            ZslenStatus::InvalidArgument
        );
        let mut text = [0 as std::ffi::c_char; 2];
        assert_eq!(
            zslen_atoms_format(set, 0, text.as_mut_ptr(), 2, &mut len),
            ZslenStatus::BufferTooSmall
        );
        assert!(len > 2);
        let mut atoms_small = ptr::null_mut();
        assert_eq!(
            zslen_atoms_enumerate(g, ptr::null(), 3, &mut atoms_small),
            ZslenStatus::Budget
        );
        zslen_atoms_free(set);
        zslen_group_free(g);
    }
}

#[test]
fn invariants() {
    unsafe {
        let g = group("C10");
        let mut v = 0u64;
        assert_eq!(zslen_min_delta(g, cstr("1,3,7,9").as_ptr(), 0, &mut v), ZslenStatus::Ok);
        assert_eq!(v, 2);
        let mut len = 0usize;
        let mut prov = ZslenProvenance::SandwichOnly;
        assert_eq!(
            zslen_delta_rho_star(g, 0, 0, ptr::null_mut(), 0, &mut len, &mut prov),
            ZslenStatus::BufferTooSmall
        );
        let mut buf = vec![0u64; len];
        assert_eq!(
            zslen_delta_rho_star(g, 0, 0, buf.as_mut_ptr(), len, &mut len, &mut prov),
            ZslenStatus::Ok
        );
        assert_eq!(buf, vec![2, 8]);
        assert_eq!(prov, ZslenProvenance::TheoremCyclic);
        zslen_group_free(g);

        let g = group("C2^4");
        assert_eq!(
            zslen_delta_rho_star(g, 1, 0, buf.as_mut_ptr(), 2, &mut len, &mut prov),
            ZslenStatus::Ok
        );
        assert_eq!(&buf[..len], &[1, 3]);
        assert_eq!(prov, ZslenProvenance::TheoremElem2);
        zslen_group_free(g);

        assert_eq!(zslen_min_delta_pair_cf(10, 3, &mut v), ZslenStatus::Ok);
        assert_eq!(v, 2);
        assert_eq!(zslen_min_delta_quad_cf(17, 4, &mut v), ZslenStatus::Ok);
        assert_eq!(v, 3);
        zslen_cyclic_witness(8, &mut v);
        assert_eq!(v, 0);
        zslen_cyclic_witness(10, &mut v);
        assert_eq!(v, 3);
        let mut q = [0u64; 4];
        assert_eq!(zslen_cf_regular(8, 3, q.as_mut_ptr(), 4, &mut len), ZslenStatus::Ok);
        assert_eq!(&q[..len], &[2, 1, 2]);

        let mut out = [0u64; 32];
        assert_eq!(
            zslen_scan_exceptional(8, 100, ZslenEngine::Both, 3, out.as_mut_ptr(), 32, &mut len),
            ZslenStatus::Ok
        );
        assert_eq!(
            &out[..len],
            &[8, 12, 14, 18, 20, 30, 32, 44, 48, 54, 62, 72, 74, 84, 90]
        );

        let mut p = ZslenLocalProfile::default();
        assert_eq!(zslen_fp_profile(2, cstr("1:3,0:5").as_ptr(), &mut p), ZslenStatus::Ok);
        assert_eq!(
            p,
            ZslenLocalProfile {
                rho_num: 5,
                rho_den: 3,
                d: 2,
                min_delta: 4
            }
        );
    }
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/zslen.h")).unwrap();
    let src = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("src/lib.rs")).unwrap();
    let exports: Vec<&str> = src
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(exports.len() > 20);
    for name in exports {
        assert!(header.contains(&format!("{name}(")), "{name} missing from header");
    }
}

/// Directory holding the static library built for this test run.
fn lib_dir() -> Option<PathBuf> {
    let exe = std::env::current_exe().ok()?;
    let dir = exe.parent()?.parent()?.to_path_buf();
    dir.join("libzslen_ffi.a").exists().then_some(dir)
}

#[test]
fn c_program_links_against_header() {
    let (Some(dir), Ok(cc)) = (lib_dir(), which_cc()) else {
        eprintln!("skipping: no C compiler or static library");
        return;
    };
    let root = Path::new(env!("CARGO_MANIFEST_DIR"));
    let tmp = tempfile::tempdir().unwrap();
    let bin = tmp.path().join("smoke");
    let status = Command::new(&cc)
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(root.join("include"))
        .arg(root.join("tests/c/smoke.c"))
        .arg(dir.join("libzslen_ffi.a"))
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "ok");
}

fn which_cc() -> Result<String, ()> {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    Command::new(&cc).arg("--version").output().map(|_| cc).map_err(|_| ())
}
