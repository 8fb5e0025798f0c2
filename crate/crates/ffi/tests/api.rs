use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use corrconv_ffi::*;

fn code(name: &str) -> *mut CcCode {
    let mut out = ptr::null_mut();
    let n = CString::new(name).unwrap();
    assert_eq!(unsafe { cc_code_builtin(n.as_ptr(), &mut out) }, CcStatus::Ok);
    out
}

#[test]
fn encode_and_decode_round_trip() {
    let c = code("c90");
    unsafe {
        assert_eq!(cc_code_memory(c), 3);
        assert!(cc_code_is_recursive(c));
        let info: Vec<u8> = (0..40).map(|i| ((i * 7) % 3 == 0) as u8).collect();
        let n = cc_code_coded_len(c, 40, true);
        assert_eq!(n, 86);
        let mut coded = vec![0u8; n];
        assert_eq!(cc_encode(c, info.as_ptr(), 40, true, coded.as_mut_ptr(), n), CcStatus::Ok);
        let llr: Vec<f64> = coded.iter().map(|&b| if b == 0 { 2.0 } else { -2.0 }).collect();

        let mut hard = vec![9u8; 40];
        let mut post = vec![0.0; 40];
        let st = cc_sova(c, llr.as_ptr(), n, ptr::null(), true, hard.as_mut_ptr(), post.as_mut_ptr(), 40);
        assert_eq!(st, CcStatus::Ok);
        assert_eq!(hard, info);
        assert!(post.iter().zip(&info).all(|(&p, &b)| (p > 0.5) == (b == 1)));

        let mut xh = vec![0u8; 40];
        let mut yh = vec![0u8; 40];
        let mut iters = 0u32;
        let st = cc_joint_decode(
            c, llr.as_ptr(), llr.as_ptr(), n, 0.9, 0, true,
            xh.as_mut_ptr(), yh.as_mut_ptr(), 40, &mut iters,
        );
        assert_eq!(st, CcStatus::Ok);
        assert_eq!(xh, info);
        assert_eq!(yh, info);
        assert!((1..=5).contains(&iters));

        // wrong lengths and bad arguments
        assert_eq!(
            cc_sova(c, llr.as_ptr(), n - 1, ptr::null(), true, hard.as_mut_ptr(), ptr::null_mut(), 40),
            CcStatus::InvalidArgument
        );
        assert_eq!(
            cc_sova(c, llr.as_ptr(), n, ptr::null(), true, hard.as_mut_ptr(), ptr::null_mut(), 39),
            CcStatus::BufferTooSmall
        );
        let bits = [0u8, 2];
        assert_eq!(cc_encode(c, bits.as_ptr(), 2, true, coded.as_mut_ptr(), n), CcStatus::InvalidArgument);
        assert_eq!(
            cc_joint_decode(c, llr.as_ptr(), llr.as_ptr(), n, 0.2, 0, true,
                xh.as_mut_ptr(), yh.as_mut_ptr(), 40, ptr::null_mut()),
            CcStatus::InvalidArgument
        );
        cc_code_free(c);
    }
}

#[test]
fn bound_and_spectrum_match_core() {
    let c = code("c90");
    unsafe {
        let mut b = 0.0;
        assert_eq!(cc_packet_bound(c, 0.9, 3.0, 100, 10, &mut b), CcStatus::Ok);
        let t = corrconv::CodeSpec::c90().trellis();
        let s = corrconv::spectrum::spectrum_with_offset(&t, 10).unwrap();
        let p = corrconv::PepParams::half_rate_db(0.9, 3.0).unwrap();
        assert_eq!(b, corrconv::pep::packet_error_bound(&s, &p, 100).value);

        let mut sp = ptr::null_mut();
        assert_eq!(cc_spectrum_new(c, 10, &mut sp), CcStatus::Ok);
        assert_eq!(cc_spectrum_len(sp), s.iter().count());
        assert_eq!(cc_spectrum_d_free(sp), s.d_free());
        assert_eq!(cc_spectrum_d_max(sp), s.d_max());
        for (i, (w, d, n)) in s.iter().enumerate() {
            let (mut a, mut bb, mut cnt) = (0, 0, 0);
            assert_eq!(cc_spectrum_get(sp, i, &mut a, &mut bb, &mut cnt), CcStatus::Ok);
            assert_eq!((a, bb, cnt), (w, d, n));
        }
        let (mut a, mut bb, mut cnt) = (0, 0, 0);
        assert_eq!(cc_spectrum_get(sp, 10_000, &mut a, &mut bb, &mut cnt), CcStatus::InvalidArgument);
        cc_spectrum_free(sp);
        cc_code_free(c);
    }
}

#[test]
fn errors_map_to_codes() {
    unsafe {
        let mut out = ptr::null_mut();
        let s = |v: &str| CString::new(v).unwrap();
        let (a, b, h) = (s("1011"), s("1111"), s("1010"));
        assert_eq!(cc_code_new(a.as_ptr(), b.as_ptr(), h.as_ptr(), 3, &mut out), CcStatus::InvalidCode);
        assert_eq!(cc_code_new(ptr::null(), b.as_ptr(), h.as_ptr(), 3, &mut out), CcStatus::NullPointer);
        assert!(out.is_null());
        let unknown = s("c99");
        assert_eq!(cc_code_builtin(unknown.as_ptr(), &mut out), CcStatus::InvalidArgument);
        let mut v = 0.0;
        assert_eq!(cc_averaged_pep(0, 1, 0.5, 0.9, 1.0, &mut v), CcStatus::InvalidArgument);
        assert_eq!(cc_averaged_pep(3, 1, 0.5, 0.9, 1.0, ptr::null_mut()), CcStatus::NullPointer);
        let msg = CStr::from_ptr(cc_status_message(CcStatus::BufferTooSmall));
        assert_eq!(msg.to_str().unwrap(), "buffer too small");
    }
}

/// Compiles `tests/smoke.c` against the generated header and static library.
#[test]
fn c_program_links_against_header() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header = manifest.join("include").join("corrconv.h");
    assert!(header.exists(), "header not generated");
    let text = std::fs::read_to_string(&header).unwrap();
    for sym in ["cc_code_new", "cc_sova", "cc_joint_decode", "cc_packet_bound", "CC_STATUS_CATASTROPHIC"] {
        assert!(text.contains(sym), "{sym} missing from header");
    }

    let Ok(exe) = std::env::current_exe() else { return };
    let profile_dir = exe.parent().and_then(|p| p.parent()).unwrap().to_path_buf();
    let lib = profile_dir.join("libcorrconv_ffi.a");
    if !lib.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping C link test: no static library or C compiler");
        return;
    }
    let dir = tempfile_dir();
    let bin = dir.join("smoke");
    let status = Command::new("cc")
        .arg(manifest.join("tests").join("smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8_lossy(&out.stdout), "ok\n");
    let _ = std::fs::remove_dir_all(&dir);
}

fn tempfile_dir() -> PathBuf {
    let d = std::env::temp_dir().join(format!("corrconv-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}
