use std::ffi::{CStr, CString};
use std::ptr;

use lunmeb_ffi::*;

fn last_error() -> String {
    let p = lunmeb_last_error();
    assert!(!p.is_null(), "expected an error message");
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn build(schmidt: &[f64]) -> *mut LunmebBasis {
    let mut basis = ptr::null_mut();
    let status = unsafe {
        lunmeb_basis_build_cyclic(schmidt.as_ptr(), schmidt.len(), ptr::null(), &mut basis)
    };
    assert_eq!(status, LunmebStatus::Ok);
    assert!(!basis.is_null());
    basis
}

fn verify(basis: *const LunmebBasis) -> LunmebVerifyReport {
    let mut report = std::mem::MaybeUninit::uninit();
    let status = unsafe { lunmeb_basis_verify(basis, ptr::null(), report.as_mut_ptr()) };
    assert_eq!(status, LunmebStatus::Ok);
    unsafe { report.assume_init() }
}

fn empty_result() -> LunmebExtendResult {
    LunmebExtendResult {
        found: false,
        residual: f64::NAN,
        best_residual: f64::NAN,
        restarts_used: 0,
        iterations_total: 0,
    }
}

#[test]
fn version_is_set() {
    let v = unsafe { CStr::from_ptr(lunmeb_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn build_inspect_and_verify() {
    let basis = build(&[3.0, 2.0, 1.0]);
    unsafe {
        assert_eq!(lunmeb_basis_dim(basis), 3);
        assert_eq!(lunmeb_basis_len(basis), 3);
        let mut g = vec![0.0; 18];
        assert_eq!(
            lunmeb_basis_generator(basis, 0, g.as_mut_ptr(), g.len()),
            LunmebStatus::Ok
        );
        let identity: Vec<f64> = (0..9)
            .flat_map(|i| [if i % 4 == 0 { 1.0 } else { 0.0 }, 0.0])
            .collect();
        assert_eq!(g, identity);
        assert_eq!(
            lunmeb_basis_generator(basis, 3, g.as_mut_ptr(), g.len()),
            LunmebStatus::InvalidArgument
        );
        assert_eq!(
            lunmeb_basis_generator(basis, 0, g.as_mut_ptr(), 4),
            LunmebStatus::InvalidArgument
        );
    }
    let report = verify(basis);
    assert!(report.all_pass);
    assert_eq!(report.size, 3);
    unsafe { lunmeb_basis_free(basis) };
}

#[test]
fn maximal_seed_is_validation_error() {
    let mut basis = ptr::null_mut();
    let seed = [1.0, 1.0];
    let status = unsafe { lunmeb_basis_build_cyclic(seed.as_ptr(), 2, ptr::null(), &mut basis) };
    assert_eq!(status, LunmebStatus::Validation);
    assert!(basis.is_null());
    assert!(last_error().contains("maximally entangled"));
}

#[test]
fn null_arguments_are_reported() {
    unsafe {
        let mut basis = ptr::null_mut();
        assert_eq!(
            lunmeb_basis_build_cyclic(ptr::null(), 2, ptr::null(), &mut basis),
            LunmebStatus::NullPointer
        );
        assert_eq!(lunmeb_basis_dim(ptr::null()), 0);
        assert_eq!(lunmeb_basis_len(ptr::null()), 0);
        let mut r = empty_result();
        assert_eq!(
            lunmeb_basis_extend(ptr::null(), ptr::null(), &mut r, ptr::null_mut(), 0),
            LunmebStatus::NullPointer
        );
        lunmeb_basis_free(ptr::null_mut());
        lunmeb_string_free(ptr::null_mut());
    }
}

#[test]
fn extend_and_append_in_d4() {
    let basis = build(&[2.0, 1.0, 2.0, 1.0]);
    let params = lunmeb_default_search_params();
    let mut result = empty_result();
    let mut v = vec![0.0; 32];
    let status =
        unsafe { lunmeb_basis_extend(basis, &params, &mut result, v.as_mut_ptr(), v.len()) };
    assert_eq!(status, LunmebStatus::Ok);
    assert!(result.found);
    assert!(result.residual < 1e-8);
    unsafe {
        assert_eq!(
            lunmeb_basis_append(basis, v.as_ptr(), v.len(), ptr::null()),
            LunmebStatus::Ok
        );
        assert_eq!(lunmeb_basis_len(basis), 5);
    }
    assert!(verify(basis).all_pass);
    unsafe { lunmeb_basis_free(basis) };
}

#[test]
fn d2_pair_is_not_found() {
    let basis = build(&[2.0, 1.0]);
    let mut params = lunmeb_default_search_params();
    params.method = LunmebMethod::ResidualDescent;
    params.restarts = 8;
    let mut result = empty_result();
    let status = unsafe { lunmeb_basis_extend(basis, &params, &mut result, ptr::null_mut(), 0) };
    assert_eq!(status, LunmebStatus::NotFound);
    assert!(!result.found);
    assert!((result.best_residual - 0.36).abs() < 1e-6);
    assert!(last_error().contains("no extension found"));
    unsafe { lunmeb_basis_free(basis) };
}

#[test]
fn invalid_params_are_rejected() {
    let basis = build(&[2.0, 1.0]);
    let mut params = lunmeb_default_search_params();
    params.restarts = 0;
    let mut result = empty_result();
    let status = unsafe { lunmeb_basis_extend(basis, &params, &mut result, ptr::null_mut(), 0) };
    assert_eq!(status, LunmebStatus::InvalidArgument);
    let tol = LunmebTolerance {
        verify_tol: 1e-3,
        search_tol: 1e-8,
    };
    let mut report = std::mem::MaybeUninit::uninit();
    assert_eq!(
        unsafe { lunmeb_basis_verify(basis, &tol, report.as_mut_ptr()) },
        LunmebStatus::InvalidArgument
    );
    unsafe { lunmeb_basis_free(basis) };
}

#[test]
fn append_rejects_non_unitary() {
    let basis = build(&[2.0, 1.0]);
    let v = [2.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0];
    unsafe {
        assert_eq!(
            lunmeb_basis_append(basis, v.as_ptr(), v.len(), ptr::null()),
            LunmebStatus::Validation
        );
        assert_eq!(
            lunmeb_basis_append(basis, v.as_ptr(), 6, ptr::null()),
            LunmebStatus::InvalidArgument
        );
        assert_eq!(lunmeb_basis_len(basis), 2);
        lunmeb_basis_free(basis);
    }
}

#[test]
fn json_round_trip() {
    let basis = build(&[3.0, 1.0, 1.0]);
    let mut text = ptr::null_mut();
    assert_eq!(
        unsafe { lunmeb_basis_to_json(basis, &mut text) },
        LunmebStatus::Ok
    );
    let json = unsafe { CStr::from_ptr(text) }.to_owned();
    unsafe { lunmeb_string_free(text) };

    let mut back = ptr::null_mut();
    assert_eq!(
        unsafe { lunmeb_basis_from_json(json.as_ptr(), ptr::null(), &mut back) },
        LunmebStatus::Ok
    );
    let mut again = ptr::null_mut();
    assert_eq!(
        unsafe { lunmeb_basis_to_json(back, &mut again) },
        LunmebStatus::Ok
    );
    assert_eq!(unsafe { CStr::from_ptr(again) }, json.as_c_str());
    unsafe {
        lunmeb_string_free(again);
        lunmeb_basis_free(back);
        lunmeb_basis_free(basis);
    }

    let bad = CString::new("{\"d\": 2}").unwrap();
    let mut none = ptr::null_mut();
    assert_eq!(
        unsafe { lunmeb_basis_from_json(bad.as_ptr(), ptr::null(), &mut none) },
        LunmebStatus::Parse
    );
    assert!(last_error().contains("malformed basis file"));
}

#[test]
fn weyl_operator_shift_and_clock() {
    let mut out = vec![0.0; 8];
    unsafe {
        assert_eq!(
            lunmeb_weyl_operator(2, 0, 1, out.as_mut_ptr(), out.len()),
            LunmebStatus::Ok
        );
        assert_eq!(out, [0.0, 0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
        assert_eq!(
            lunmeb_weyl_operator(2, 1, 0, out.as_mut_ptr(), out.len()),
            LunmebStatus::Ok
        );
        assert!((out[6] + 1.0).abs() < 1e-15 && out[0] == 1.0);
        assert_eq!(
            lunmeb_weyl_operator(2, 2, 0, out.as_mut_ptr(), out.len()),
            LunmebStatus::InvalidArgument
        );
    }
}

#[test]
fn success_clears_last_error() {
    let seed = [1.0, 1.0];
    let mut basis = ptr::null_mut();
    unsafe { lunmeb_basis_build_cyclic(seed.as_ptr(), 2, ptr::null(), &mut basis) };
    assert!(!lunmeb_last_error().is_null());
    let basis = build(&[2.0, 1.0]);
    assert!(lunmeb_last_error().is_null());
    unsafe { lunmeb_basis_free(basis) };
}
