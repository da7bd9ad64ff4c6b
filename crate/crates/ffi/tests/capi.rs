use std::ffi::{CStr, CString};
use std::ptr;

use bagsched_ffi::*;

fn instance(p: &[u64], w: &[u64]) -> *mut BagschedInstance {
    let mut out = ptr::null_mut();
    let status = unsafe { bagsched_instance_new(p.as_ptr(), p.len(), w.as_ptr(), w.len(), &mut out) };
    assert_eq!(status, BagschedStatus::Ok);
    out
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(bagsched_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn solve_and_read_back() {
    let inst = instance(&[3, 1], &[1, 1]);
    let mut result = ptr::null_mut();
    let status = unsafe { bagsched_oracle(inst, BagschedObjective::Makespan, &mut result) };
    assert_eq!(status, BagschedStatus::Ok);
    unsafe {
        let exact = CStr::from_ptr(bagsched_result_value_exact(result)).to_str().unwrap();
        assert_eq!(exact, "7/2");
        assert_eq!(bagsched_result_value(result), 3.5);
        assert_eq!(bagsched_result_bag_count(result), 2);
        let mut bags = [9usize; 2];
        assert_eq!(bagsched_result_assignment(result, bags.as_mut_ptr(), 2), BagschedStatus::Ok);
        assert_eq!(bags, [0, 1]);
        assert_eq!(bagsched_result_assignment(result, bags.as_mut_ptr(), 1), BagschedStatus::Validation);
        bagsched_result_free(result);
        bagsched_instance_free(inst);
    }
}

#[test]
fn both_objectives_solve() {
    let inst = instance(&[6, 1, 3, 4, 12, 6], &[0, 1, 2]);
    for objective in [BagschedObjective::Makespan, BagschedObjective::SantaClaus] {
        let mut result = ptr::null_mut();
        let status = unsafe { bagsched_solve(inst, objective, 2, &mut result) };
        assert_eq!(status, BagschedStatus::Ok, "{}", last_error());
        unsafe {
            let count = bagsched_result_bag_count(result);
            assert!((1..=3).contains(&count));
            let mut bags = [usize::MAX; 6];
            assert_eq!(bagsched_result_assignment(result, bags.as_mut_ptr(), 6), BagschedStatus::Ok);
            assert!(bags.iter().all(|&b| b < count));
            assert!(bagsched_result_value(result) > 0.0);
            bagsched_result_free(result);
        }
    }
    unsafe { bagsched_instance_free(inst) };
}

#[test]
fn json_instances() {
    let text = CString::new(r#"{"processing_times":[2,2],"machine_weights":[0,1]}"#).unwrap();
    let mut inst = ptr::null_mut();
    assert_eq!(unsafe { bagsched_instance_from_json(text.as_ptr(), &mut inst) }, BagschedStatus::Ok);
    let mut result = ptr::null_mut();
    assert_eq!(
        unsafe { bagsched_solve(inst, BagschedObjective::SantaClaus, 2, &mut result) },
        BagschedStatus::Ok
    );
    assert_eq!(unsafe { bagsched_result_value(result) }, 2.0);
    unsafe {
        bagsched_result_free(result);
        bagsched_instance_free(inst);
    }

    let bad = CString::new(r#"{"processing_times":[]}"#).unwrap();
    let status = unsafe { bagsched_instance_from_json(bad.as_ptr(), &mut inst) };
    assert_eq!(status, BagschedStatus::Validation);
    assert!(!last_error().is_empty());
}

#[test]
fn errors_map_to_status_codes() {
    let mut inst = ptr::null_mut();
    let w = [1u64];
    let status = unsafe { bagsched_instance_new(ptr::null(), 0, w.as_ptr(), 1, &mut inst) };
    assert_eq!(status, BagschedStatus::Validation);
    assert!(last_error().contains("invalid"));
    let status = unsafe { bagsched_instance_new(ptr::null(), 3, w.as_ptr(), 1, &mut inst) };
    assert_eq!(status, BagschedStatus::NullPointer);

    let inst = instance(&[1, 2], &[1]);
    let mut result = ptr::null_mut();
    assert_eq!(
        unsafe { bagsched_solve(inst, BagschedObjective::Makespan, 0, &mut result) },
        BagschedStatus::Domain
    );
    assert_eq!(
        unsafe { bagsched_solve(ptr::null(), BagschedObjective::Makespan, 2, &mut result) },
        BagschedStatus::NullPointer
    );
    assert_eq!(
        unsafe { bagsched_solve(inst, BagschedObjective::Makespan, 2, ptr::null_mut()) },
        BagschedStatus::NullPointer
    );
    unsafe {
        assert!(bagsched_result_value(ptr::null()).is_nan());
        assert!(bagsched_result_value_exact(ptr::null()).is_null());
        assert_eq!(bagsched_result_bag_count(ptr::null()), 0);
        bagsched_result_free(ptr::null_mut());
        bagsched_instance_free(inst);
        bagsched_instance_free(ptr::null_mut());
    }
}

#[test]
fn header_declares_every_entry_point() {
    let header = include_str!("../include/bagsched.h");
    for name in [
        "bagsched_last_error",
        "bagsched_instance_new",
        "bagsched_instance_from_json",
        "bagsched_instance_free",
        "bagsched_solve",
        "bagsched_oracle",
        "bagsched_result_bag_count",
        "bagsched_result_assignment",
        "bagsched_result_value",
        "bagsched_result_value_exact",
        "bagsched_result_free",
        "BAGSCHED_STATUS_CAPACITY",
        "typedef struct BagschedInstance BagschedInstance",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}
