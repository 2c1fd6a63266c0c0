use std::ffi::CStr;
use std::ptr;

use grinblat_ffi::*;

fn last_error() -> String {
    let p = grinblat_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn pairs(m: *const GrinblatMatching) -> Vec<u32> {
    let len = unsafe { grinblat_matching_len(m) };
    let mut buf = vec![0u32; 2 * len];
    assert_eq!(unsafe { grinblat_matching_pairs(m, buf.as_mut_ptr(), buf.len()) }, GrinblatStatus::Ok);
    buf
}

#[test]
fn parse_solve_verify() {
    let mut inst = ptr::null_mut();
    let text = b"grinblat 1 2 4\nrel 1 1\n0 1\nrel 2 1\n2 3\n";
    assert_eq!(unsafe { grinblat_instance_parse(text.as_ptr(), text.len(), &mut inst) }, GrinblatStatus::Ok);
    assert_eq!(unsafe { grinblat_instance_len(inst) }, 2);
    assert_eq!(unsafe { grinblat_instance_ground_size(inst) }, 4);
    assert_eq!(unsafe { grinblat_instance_min_kernel(inst) }, 2);
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { grinblat_exact(inst, 1000, &mut m) }, GrinblatStatus::Ok);
    let flat = pairs(m);
    assert_eq!(flat, vec![0, 1, 2, 3]);
    assert_eq!(unsafe { grinblat_verify(inst, flat.as_ptr(), 2) }, GrinblatStatus::Ok);
    let bad = [0u32, 1, 0, 3];
    assert_eq!(unsafe { grinblat_verify(inst, bad.as_ptr(), 2) }, GrinblatStatus::InvalidMatching);
    assert!(last_error().contains('0'));
    unsafe {
        grinblat_matching_free(m);
        grinblat_instance_free(inst);
    }
}

#[test]
fn build_from_arrays_and_write() {
    // relation 1: {0,1,2}; relation 2: {0,3}, {1,2}
    let counts = [1usize, 2];
    let sizes = [3usize, 2, 2];
    let elems = [0u32, 1, 2, 0, 3, 1, 2];
    let mut inst = ptr::null_mut();
    let s = unsafe { grinblat_instance_new(4, 2, counts.as_ptr(), sizes.as_ptr(), elems.as_ptr(), &mut inst) };
    assert_eq!(s, GrinblatStatus::Ok);
    let mut text = ptr::null_mut();
    assert_eq!(unsafe { grinblat_instance_write(inst, &mut text) }, GrinblatStatus::Ok);
    let written = unsafe { CStr::from_ptr(text) }.to_str().unwrap().to_owned();
    assert_eq!(written, "grinblat 1 2 4\nrel 1 1\n0 1 2\nrel 2 2\n0 3\n1 2\n");
    unsafe {
        grinblat_string_free(text);
        grinblat_instance_free(inst);
    }
    let bad = [0u32, 0, 2, 0, 3, 1, 2];
    let s = unsafe { grinblat_instance_new(4, 2, counts.as_ptr(), sizes.as_ptr(), bad.as_ptr(), &mut inst) };
    assert_eq!(s, GrinblatStatus::InvalidArgument);
    assert!(last_error().contains("twice"));
}

#[test]
fn status_codes() {
    let mut inst = ptr::null_mut();
    assert_eq!(unsafe { grinblat_gen_lower_bound(4, &mut inst) }, GrinblatStatus::Ok);
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { grinblat_exact(inst, 1_000_000, &mut m) }, GrinblatStatus::NoMatching);
    assert!(m.is_null());
    assert_eq!(unsafe { grinblat_exact(inst, 2, &mut m) }, GrinblatStatus::Budget);
    // too few relations for the constructive path; goes to the exact solver
    assert_eq!(unsafe { grinblat_solve(inst, 0, 0, 1_000_000, &mut m) }, GrinblatStatus::NoMatching);
    unsafe { grinblat_instance_free(inst) };

    let text = b"grinblat 1 1 5\nrel 1 1\n4 4\n";
    assert_eq!(unsafe { grinblat_instance_parse(text.as_ptr(), text.len(), &mut inst) }, GrinblatStatus::Parse);
    assert!(last_error().starts_with("line 3"));
    assert_eq!(unsafe { grinblat_gen_lower_bound(1, &mut inst) }, GrinblatStatus::InvalidArgument);
    assert_eq!(unsafe { grinblat_solve(ptr::null(), 0, 0, 0, &mut m) }, GrinblatStatus::InvalidArgument);
    assert_eq!(unsafe { grinblat_instance_len(ptr::null()) }, 0);
    unsafe {
        grinblat_instance_free(ptr::null_mut());
        grinblat_matching_free(ptr::null_mut());
    }
}

#[test]
fn constructive_solve_through_the_boundary() {
    let mut inst = ptr::null_mut();
    assert_eq!(unsafe { grinblat_gen_random(40, 5000, 3, 0, &mut inst) }, GrinblatStatus::Ok);
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { grinblat_solve(inst, 5000, 0, 10_000_000, &mut m) }, GrinblatStatus::Ok);
    let flat = pairs(m);
    assert_eq!(flat.len(), 80);
    assert_eq!(unsafe { grinblat_verify(inst, flat.as_ptr(), 40) }, GrinblatStatus::Ok);
    let mut small = [0u32; 3];
    assert_eq!(unsafe { grinblat_matching_pairs(m, small.as_mut_ptr(), 3) }, GrinblatStatus::InvalidArgument);
    // asking for a larger constant than the kernels allow
    let mut m2 = ptr::null_mut();
    assert_eq!(unsafe { grinblat_solve(inst, 6000, 0, 10, &mut m2) }, GrinblatStatus::Budget);
    unsafe {
        grinblat_matching_free(m);
        grinblat_instance_free(inst);
    }
}
