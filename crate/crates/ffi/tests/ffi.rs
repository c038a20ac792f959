use std::ffi::{c_char, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use viscomem_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0 as c_char; 512];
    let n = unsafe { vm_last_error_message(buf.as_mut_ptr(), buf.len()) };
    assert!(n >= 0, "no error recorded");
    let bytes: Vec<u8> = buf.iter().take_while(|c| **c != 0).map(|c| *c as u8).collect();
    String::from_utf8(bytes).unwrap()
}

#[test]
fn kernel_and_grid_round_trip() {
    unsafe {
        let mut k = ptr::null_mut();
        assert_eq!(vm_kernel_single_exponential(&mut k), VmStatus::Ok);
        let mut m = 0.0;
        assert_eq!(vm_kernel_evaluate(k, 1.0, &mut m), VmStatus::Ok);
        assert!((m - (-1.0f64).exp()).abs() < 1e-15);

        let mut g = ptr::null_mut();
        assert_eq!(vm_age_grid_build(k, 1e-6, 1e-6, &mut g), VmStatus::Ok);
        let n = vm_age_grid_len(g);
        assert!(n > 10);
        let mut w = vec![0.0; n];
        assert_eq!(vm_age_grid_weights(g, w.as_mut_ptr(), n), VmStatus::Ok);
        let mut tail = 0.0;
        let mut nodes = vec![0.0; n];
        assert_eq!(vm_age_grid_nodes(g, nodes.as_mut_ptr(), n), VmStatus::Ok);
        assert_eq!(vm_kernel_tail_mass(k, nodes[n - 1], &mut tail), VmStatus::Ok);
        assert!((w.iter().sum::<f64>() + tail - 1.0).abs() < 1e-6);

        let mut short = vec![0.0; 2];
        assert_eq!(vm_age_grid_nodes(g, short.as_mut_ptr(), 2), VmStatus::BufferTooSmall);
        assert!(last_error().contains("needed"));

        vm_age_grid_free(g);
        vm_kernel_free(k);
    }
}

#[test]
fn invalid_kernel_reports_message() {
    unsafe {
        let eta = [1.0, -1.0];
        let lambda = [1.0, 2.0];
        let mut k = ptr::null_mut();
        let status = vm_kernel_multi_mode(eta.as_ptr(), lambda.as_ptr(), 2, &mut k);
        assert_eq!(status, VmStatus::InvalidArgument);
        assert!(k.is_null());
        assert!(!last_error().is_empty());
        assert_eq!(vm_kernel_evaluate(ptr::null(), 1.0, &mut 0.0), VmStatus::NullPointer);
    }
}

#[test]
fn measure_evaluates_finger_minus_identity() {
    unsafe {
        let mut m = ptr::null_mut();
        assert_eq!(vm_measure_new(VmMeasureKind::Ucm, 0.0, 0.0, &mut m), VmStatus::Ok);
        // simple shear of amount 1: B − δ = [[0, 1], [1, 1]]
        let g = [1.0, 0.0, 1.0, 1.0];
        let mut s = [0.0; 4];
        assert_eq!(vm_measure_evaluate(m, 2, g.as_ptr(), s.as_mut_ptr()), VmStatus::Ok);
        assert_eq!(s, [1.0, 1.0, 1.0, 0.0]);
        assert_eq!(vm_measure_evaluate(m, 4, g.as_ptr(), s.as_mut_ptr()), VmStatus::InvalidArgument);
        vm_measure_free(m);

        let mut bad = ptr::null_mut();
        assert_eq!(vm_measure_new(VmMeasureKind::Psm, -1.0, 0.5, &mut bad), VmStatus::InvalidArgument);
    }
}

const SHEAR: &str = r#"
[scenario]
name = "ffi_shear"

[geometry]
kind = "homogeneous"
flow = "simple_shear"
rate = 1.0

[fluid]
we = 1.0
omega = 0.5

[kernel]
kind = "exponential"

[measure]
kind = "ucm"

[age_grid]
tail_tol = 1e-8

[time]
t_end = 1.0
dt = 0.01
"#;

#[test]
fn simulation_follows_startup_shear() {
    unsafe {
        let text = CString::new(SHEAR).unwrap();
        let mut sim = ptr::null_mut();
        assert_eq!(vm_simulation_from_toml(text.as_ptr(), &mut sim), VmStatus::Ok);
        assert_eq!(vm_simulation_dim(sim), 2);
        assert_eq!(vm_simulation_step(sim, 100), VmStatus::Ok);
        let t = vm_simulation_time(sim);
        assert!((t - 1.0).abs() < 1e-9);
        let mut tau = [0.0; 4];
        assert_eq!(vm_simulation_mean_stress(sim, tau.as_mut_ptr(), 4), VmStatus::Ok);
        let expected = 0.5 * (1.0 - (-t).exp());
        assert!((tau[1] - expected).abs() < 1e-3 * expected, "{} vs {expected}", tau[1]);
        vm_simulation_free(sim);
    }
}

#[test]
fn malformed_config_is_a_config_error() {
    unsafe {
        let text = CString::new(SHEAR.replace("omega = 0.5", "omega = 2.0")).unwrap();
        let mut sim = ptr::null_mut();
        assert_eq!(vm_simulation_from_toml(text.as_ptr(), &mut sim), VmStatus::Config);
        assert!(sim.is_null());
        assert!(last_error().contains("omega"));
    }
}

#[test]
fn header_is_valid_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/viscomem.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in ["vm_simulation_from_toml", "vm_age_grid_build", "VM_STATUS_OK", "typedef struct VmKernel VmKernel"] {
        assert!(text.contains(name), "{name} missing from header");
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("check.c");
    std::fs::write(&src, "#include \"viscomem.h\"\nint main(void) { return VM_STATUS_OK; }\n").unwrap();
    match Command::new("cc")
        .arg("-fsyntax-only")
        .arg("-I")
        .arg(header.parent().unwrap())
        .arg(&src)
        .status()
    {
        Ok(status) => assert!(status.success(), "header does not compile"),
        Err(_) => eprintln!("no C compiler found; skipping syntax check"),
    }
}
