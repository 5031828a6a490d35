use std::ffi::{c_char, CStr, CString};
use std::ptr;

use qcrb_locc_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0 as c_char; 256];
    let n = unsafe { qcrb_last_error(buf.as_mut_ptr(), buf.len()) };
    assert!(n > 0);
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

fn scenario(name: &str) -> *mut QcrbScenario {
    let name = CString::new(name).unwrap();
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { qcrb_scenario_builtin(name.as_ptr(), &mut s) }, QcrbStatus::Ok);
    assert!(!s.is_null());
    s
}

#[test]
fn ghz_round_trip() {
    let s = scenario("ghz3");
    unsafe {
        let (mut dim, mut n, mut qfi) = (0usize, 0usize, 0.0f64);
        assert_eq!(qcrb_scenario_dimension(s, &mut dim), QcrbStatus::Ok);
        assert_eq!(qcrb_scenario_subsystems(s, &mut n), QcrbStatus::Ok);
        assert_eq!(qcrb_qfi(s, 0.4, &mut qfi), QcrbStatus::Ok);
        assert_eq!((dim, n), (8, 3));
        assert!((qfi - 9.0).abs() < 1e-9);

        let order = [2usize, 0, 1];
        let mut tree = ptr::null_mut();
        assert_eq!(qcrb_synthesize(s, 0.4, order.as_ptr(), order.len(), &mut tree), QcrbStatus::Ok);
        let mut outcomes = 0usize;
        assert_eq!(qcrb_tree_outcomes(tree, &mut outcomes), QcrbStatus::Ok);
        assert_eq!(outcomes, 8);

        let mut json = ptr::null_mut();
        assert_eq!(qcrb_tree_to_json(tree, &mut json), QcrbStatus::Ok);
        let mut back = ptr::null_mut();
        assert_eq!(qcrb_tree_from_json(json, &mut back), QcrbStatus::Ok);
        qcrb_string_free(json);

        let mut report = QcrbVerifyReport::default();
        assert_eq!(qcrb_verify(back, s, 0.4, &mut report), QcrbStatus::Ok);
        assert!(report.saturating);
        assert!((report.fisher_info - report.qfi).abs() < 1e-6 * report.qfi);

        qcrb_tree_free(tree);
        qcrb_tree_free(back);
        qcrb_scenario_free(s);
    }
}

#[test]
fn default_order_and_json_scenario() {
    let json = CString::new(
        r#"{"name":"x","layout":[2,2],"type":"unitary-generator","psi_in":[[0.5,0],[0.5,0],[0.5,0],[0.5,0]],
            "hamiltonian":[{"coeff":1.0,"string":"ZI"},{"coeff":0.5,"string":"XZ"}],"theta_grid":{"start":0,"end":1}}"#,
    )
    .unwrap();
    let mut s = ptr::null_mut();
    let status = unsafe { qcrb_scenario_from_json(json.as_ptr(), &mut s) };
    if status != QcrbStatus::Ok {
        panic!("{}", last_error());
    }
    unsafe {
        let mut tree = ptr::null_mut();
        assert_eq!(qcrb_synthesize(s, 0.2, ptr::null(), 0, &mut tree), QcrbStatus::Ok);
        let mut report = QcrbVerifyReport::default();
        assert_eq!(qcrb_verify(tree, s, 0.2, &mut report), QcrbStatus::Ok);
        assert!(report.saturating);
        qcrb_tree_free(tree);
        qcrb_scenario_free(s);
    }
}

#[test]
fn null_pointers_are_reported() {
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { qcrb_scenario_builtin(ptr::null(), &mut s) }, QcrbStatus::NullPointer);
    assert!(last_error().contains("name"));
    let mut qfi = 0.0;
    assert_eq!(unsafe { qcrb_qfi(ptr::null(), 0.1, &mut qfi) }, QcrbStatus::NullPointer);
    let g = scenario("ghz2");
    assert_eq!(unsafe { qcrb_qfi(g, 0.1, ptr::null_mut()) }, QcrbStatus::NullPointer);
    let mut tree = ptr::null_mut();
    assert_eq!(unsafe { qcrb_synthesize(g, 0.1, ptr::null(), 2, &mut tree) }, QcrbStatus::NullPointer);
    unsafe {
        qcrb_scenario_free(g);
        qcrb_scenario_free(ptr::null_mut());
        qcrb_tree_free(ptr::null_mut());
        qcrb_string_free(ptr::null_mut());
    }
}

#[test]
fn invalid_arguments_carry_messages() {
    let name = CString::new("no-such-scenario").unwrap();
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { qcrb_scenario_builtin(name.as_ptr(), &mut s) }, QcrbStatus::InvalidArgument);
    assert!(s.is_null());
    assert!(last_error().contains("no-such-scenario"));

    let bad = CString::new("{not json").unwrap();
    let mut t = ptr::null_mut();
    assert_eq!(unsafe { qcrb_tree_from_json(bad.as_ptr(), &mut t) }, QcrbStatus::InvalidArgument);

    // a mixture with no single saturating target
    let s = scenario("bell-mixture");
    assert_eq!(unsafe { qcrb_synthesize(s, 0.5, ptr::null(), 0, &mut t) }, QcrbStatus::InvalidArgument);
    let order = [0usize, 0];
    assert_eq!(unsafe { qcrb_synthesize(s, 0.5, order.as_ptr(), 2, &mut t) }, QcrbStatus::InvalidArgument);
    unsafe { qcrb_scenario_free(s) };
}

#[test]
fn error_buffer_truncates() {
    let name = CString::new("no-such-scenario").unwrap();
    let mut s = ptr::null_mut();
    unsafe { qcrb_scenario_builtin(name.as_ptr(), &mut s) };
    let mut buf = [0x7f as c_char; 4];
    let n = unsafe { qcrb_last_error(buf.as_mut_ptr(), buf.len()) };
    assert!(n > 3);
    assert_eq!(buf[3], 0);
    assert_eq!(unsafe { CStr::from_ptr(buf.as_ptr()) }.to_bytes().len(), 3);
    assert_eq!(unsafe { qcrb_last_error(ptr::null_mut(), 0) }, n);
}
