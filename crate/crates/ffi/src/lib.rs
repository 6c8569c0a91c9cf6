//! C ABI over the eomq simulator: opaque parameter handles, status codes,
//! and flat-buffer spectrum evaluation, so other languages can bind without
//! touching Rust types.
//!
//! Conventions:
//! * every function returns an [`EomqStatus`]; outputs go through pointers;
//! * `EomqParams` is an opaque handle created by `eomq_params_new` /
//!   `eomq_params_from_json` and released with `eomq_params_free`;
//! * the most recent error message is retrievable per thread with
//!   `eomq_last_error`;
//! * safety contract, uniformly: handles must come from this API and not be
//!   used after free; string arguments are NUL-terminated; output buffers
//!   must provide the documented capacity. NULLs are caught and reported.

// The per-function safety contract is the uniform one above.
#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr};

use eomq::error::Error;
use eomq::model::SystemParams;
use eomq::series::linspace;
use eomq::{analysis, nms, probe, steady_state};

/// Status codes returned by every API call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EomqStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NumericFailure = 3,
    NotBistable = 4,
}

/// Opaque parameter handle.
pub struct EomqParams(SystemParams);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn status_of(err: &Error) -> EomqStatus {
    match err {
        Error::Config(_)
        | Error::NonPositiveRate { .. }
        | Error::SigmaZOutOfRange(_)
        | Error::NegativeCoupling { .. }
        | Error::TooFewPoints { .. } => EomqStatus::InvalidArgument,
        Error::NotBistable => EomqStatus::NotBistable,
        _ => EomqStatus::NumericFailure,
    }
}

fn fail(err: Error) -> EomqStatus {
    let status = status_of(&err);
    set_error(err.to_string());
    status
}

macro_rules! deref {
    ($ptr:expr) => {
        match unsafe { $ptr.as_ref() } {
            Some(p) => &p.0,
            None => {
                set_error("null parameter handle");
                return EomqStatus::NullPointer;
            }
        }
    };
}

macro_rules! out {
    ($ptr:expr, $value:expr) => {
        match unsafe { $ptr.as_mut() } {
            Some(slot) => *slot = $value,
            None => {
                set_error("null output pointer");
                return EomqStatus::NullPointer;
            }
        }
    };
}

/// Copies the most recent error message of this thread into `buf`
/// (NUL-terminated, truncated to `cap` bytes) and returns the full message
/// length in bytes.
#[no_mangle]
pub unsafe extern "C" fn eomq_last_error(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && cap > 0 {
            let n = bytes.len().min(cap - 1);
            unsafe {
                std::ptr::copy_nonoverlapping(bytes.as_ptr(), buf as *mut u8, n);
                *buf.add(n) = 0;
            }
        }
        bytes.len()
    })
}

/// Creates a parameter handle with the documented defaults
/// (red-sideband double-window demo set).
#[no_mangle]
pub extern "C" fn eomq_params_new() -> *mut EomqParams {
    Box::into_raw(Box::new(EomqParams(SystemParams::default())))
}

/// Parses a handle from a JSON object whose keys mirror the parameter names;
/// missing keys take the defaults.
#[no_mangle]
pub unsafe extern "C" fn eomq_params_from_json(
    json: *const c_char,
    out: *mut *mut EomqParams,
) -> EomqStatus {
    if json.is_null() || out.is_null() {
        set_error("null pointer argument");
        return EomqStatus::NullPointer;
    }
    let text = match unsafe { CStr::from_ptr(json) }.to_str() {
        Ok(t) => t,
        Err(_) => {
            set_error("parameter JSON is not valid UTF-8");
            return EomqStatus::InvalidArgument;
        }
    };
    match serde_json::from_str::<SystemParams>(text) {
        Ok(p) => {
            unsafe { *out = Box::into_raw(Box::new(EomqParams(p))) };
            EomqStatus::Ok
        }
        Err(e) => {
            set_error(format!("invalid parameter JSON: {e}"));
            EomqStatus::InvalidArgument
        }
    }
}

/// Releases a parameter handle. Passing NULL is a no-op.
#[no_mangle]
pub unsafe extern "C" fn eomq_params_free(p: *mut EomqParams) {
    if !p.is_null() {
        drop(unsafe { Box::from_raw(p) });
    }
}

/// Sets one named parameter (names mirror the JSON keys).
#[no_mangle]
pub unsafe extern "C" fn eomq_params_set(
    p: *mut EomqParams,
    name: *const c_char,
    value: f64,
) -> EomqStatus {
    let handle = match unsafe { p.as_mut() } {
        Some(h) => h,
        None => {
            set_error("null parameter handle");
            return EomqStatus::NullPointer;
        }
    };
    if name.is_null() {
        set_error("null name pointer");
        return EomqStatus::NullPointer;
    }
    let name = match unsafe { CStr::from_ptr(name) }.to_str() {
        Ok(n) => n,
        Err(_) => {
            set_error("parameter name is not valid UTF-8");
            return EomqStatus::InvalidArgument;
        }
    };
    let q = &mut handle.0;
    let slot = match name {
        "delta_a_eff" => &mut q.delta_a_eff,
        "delta_c" => &mut q.delta_c,
        "omega_q" => &mut q.omega_q,
        "omega_b" => &mut q.omega_b,
        "g_om" => &mut q.g_om,
        "g_em" => &mut q.g_em,
        "g" => &mut q.g,
        "kappa_a" => &mut q.kappa_a,
        "kappa_c" => &mut q.kappa_c,
        "gamma_b" => &mut q.gamma_b,
        "gamma_d" => &mut q.gamma_d,
        "sigma_z" => &mut q.sigma_z,
        "g_om_bare" => &mut q.g_om_bare,
        "e_p" => &mut q.e_p,
        "e_m" => &mut q.e_m,
        _ => {
            set_error(format!("unknown parameter name: {name}"));
            return EomqStatus::InvalidArgument;
        }
    };
    *slot = value;
    EomqStatus::Ok
}

/// Validates the handle's invariants (positive rates, couplings, inversion
/// range).
#[no_mangle]
pub unsafe extern "C" fn eomq_params_validate(p: *const EomqParams) -> EomqStatus {
    let params = deref!(p);
    match eomq::validate(*params) {
        Ok(_) => EomqStatus::Ok,
        Err(e) => fail(e),
    }
}

/// Puts the handle on the mechanical red sideband (all detunings = omega_b).
#[no_mangle]
pub unsafe extern "C" fn eomq_params_red_sideband(p: *mut EomqParams) -> EomqStatus {
    match unsafe { p.as_mut() } {
        Some(h) => {
            h.0 = eomq::red_sideband(h.0);
            EomqStatus::Ok
        }
        None => {
            set_error("null parameter handle");
            EomqStatus::NullPointer
        }
    }
}

/// Probe response eps_T at detuning `delta`; absorption is the real part,
/// dispersion the imaginary part.
#[no_mangle]
pub unsafe extern "C" fn eomq_epsilon_t(
    p: *const EomqParams,
    delta: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> EomqStatus {
    let params = deref!(p);
    match probe::epsilon_t(params, delta) {
        Ok(r) => {
            out!(out_re, r.value.re);
            out!(out_im, r.value.im);
            EomqStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Probe spectrum over `n` uniform offsets x in [x_min, x_max]; fills the
/// caller-allocated arrays `xs`, `re`, `im` (length `n`). Fails without
/// partial output when any grid point hits a pole.
#[no_mangle]
pub unsafe extern "C" fn eomq_probe_spectrum(
    p: *const EomqParams,
    x_min: f64,
    x_max: f64,
    n: usize,
    xs: *mut f64,
    re: *mut f64,
    im: *mut f64,
) -> EomqStatus {
    let params = deref!(p);
    if xs.is_null() || re.is_null() || im.is_null() {
        set_error("null output buffer");
        return EomqStatus::NullPointer;
    }
    if n < 3 || x_min.is_nan() || x_max.is_nan() || x_min >= x_max {
        set_error("need n >= 3 and x_min < x_max");
        return EomqStatus::InvalidArgument;
    }
    let grid = linspace(x_min, x_max, n);
    let series = probe::probe_spectrum(params, &grid);
    if !series.skipped.is_empty() {
        set_error(format!("{} grid points hit a pole", series.skipped.len()));
        return EomqStatus::NumericFailure;
    }
    for (i, (x, y)) in series.x.iter().zip(&series.y).enumerate() {
        unsafe {
            *xs.add(i) = *x;
            *re.add(i) = y.re;
            *im.add(i) = y.im;
        }
    }
    EomqStatus::Ok
}

/// Predicted transparency-window offsets +-sqrt(g_em^2 - 2 g^2 sigma_z).
#[no_mangle]
pub unsafe extern "C" fn eomq_omit_minima(
    p: *const EomqParams,
    out_minus: *mut f64,
    out_plus: *mut f64,
) -> EomqStatus {
    let params = deref!(p);
    match probe::omit_minima_prediction(params) {
        Ok((lo, hi)) => {
            out!(out_minus, lo);
            out!(out_plus, hi);
            EomqStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Predicted absorption-peak offsets (center, +side).
#[no_mangle]
pub unsafe extern "C" fn eomq_omia_peaks(
    p: *const EomqParams,
    out_center: *mut f64,
    out_side: *mut f64,
) -> EomqStatus {
    let params = deref!(p);
    let (center, side, _) = probe::omia_peak_prediction(params);
    out!(out_center, center);
    out!(out_side, side);
    EomqStatus::Ok
}

/// Hybrid-mode poles and numeric residues (red sideband): fills four
/// length-3 arrays and the printed-form deviation.
#[no_mangle]
pub unsafe extern "C" fn eomq_hybrid_poles(
    p: *const EomqParams,
    poles_re: *mut f64,
    poles_im: *mut f64,
    residues_re: *mut f64,
    residues_im: *mut f64,
    max_printed_deviation: *mut f64,
) -> EomqStatus {
    let params = deref!(p);
    if poles_re.is_null() || poles_im.is_null() || residues_re.is_null() || residues_im.is_null() {
        set_error("null output buffer");
        return EomqStatus::NullPointer;
    }
    match probe::hybrid_poles(params) {
        Ok(set) => {
            for i in 0..3 {
                unsafe {
                    *poles_re.add(i) = set.poles[i].re;
                    *poles_im.add(i) = set.poles[i].im;
                    *residues_re.add(i) = set.residues_numeric[i].re;
                    *residues_im.add(i) = set.residues_numeric[i].im;
                }
            }
            out!(max_printed_deviation, set.max_printed_deviation);
            EomqStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Displacement-spectrum value S_x(omega).
#[no_mangle]
pub unsafe extern "C" fn eomq_displacement_spectrum(
    p: *const EomqParams,
    omega: f64,
    out: *mut f64,
) -> EomqStatus {
    let params = deref!(p);
    match nms::displacement_spectrum(params, omega) {
        Ok(v) => {
            out!(out, v);
            EomqStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Prominence-filtered peak count of S_x over `n` frequencies in
/// [omega_min, omega_max].
#[no_mangle]
pub unsafe extern "C" fn eomq_nms_peak_count(
    p: *const EomqParams,
    omega_min: f64,
    omega_max: f64,
    n: usize,
    out_count: *mut usize,
) -> EomqStatus {
    let params = deref!(p);
    if n < 3 || omega_min.is_nan() || omega_max.is_nan() || omega_min >= omega_max {
        set_error("need n >= 3 and omega_min < omega_max");
        return EomqStatus::InvalidArgument;
    }
    let grid = linspace(omega_min, omega_max, n);
    match nms::nms_spectrum(params, &grid) {
        Ok(s) => {
            out!(out_count, analysis::count_nms_peaks(&s));
            EomqStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Steady-state photon-number roots at pump amplitude `e_p`: fills up to 3
/// ascending roots and their stability flags (1 = stable).
#[no_mangle]
pub unsafe extern "C" fn eomq_photon_roots(
    p: *const EomqParams,
    e_p: f64,
    roots: *mut f64,
    stable: *mut u8,
    out_count: *mut usize,
) -> EomqStatus {
    let params = deref!(p);
    if roots.is_null() || stable.is_null() {
        set_error("null output buffer");
        return EomqStatus::NullPointer;
    }
    match steady_state::photon_number_roots(params, e_p) {
        Ok(rs) => {
            for (i, r) in rs.iter().take(3).enumerate() {
                unsafe {
                    *roots.add(i) = r.n;
                    *stable.add(i) = r.stable as u8;
                }
            }
            out!(out_count, rs.len().min(3));
            EomqStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Switching metrics from a pump sweep over `n` amplitudes in
/// [e_min, e_max]; fails with `NOT_BISTABLE` when no turning pair exists.
#[no_mangle]
pub unsafe extern "C" fn eomq_switching_metrics(
    p: *const EomqParams,
    e_min: f64,
    e_max: f64,
    n: usize,
    out_ratio: *mut f64,
    out_e_up: *mut f64,
    out_e_down: *mut f64,
) -> EomqStatus {
    let params = deref!(p);
    if n < 3 || e_min.is_nan() || e_max.is_nan() || e_min >= e_max || e_min < 0.0 {
        set_error("need n >= 3 and 0 <= e_min < e_max");
        return EomqStatus::InvalidArgument;
    }
    let grid = linspace(e_min, e_max, n);
    let branch = match steady_state::sweep_pump(params, &grid) {
        Ok(b) => b,
        Err(e) => return fail(e),
    };
    match steady_state::switching_metrics(&branch) {
        Ok(m) => {
            out!(out_ratio, m.ratio);
            out!(out_e_up, m.e_up);
            out!(out_e_down, m.e_down);
            EomqStatus::Ok
        }
        Err(e) => fail(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CString;

    #[test]
    fn lifecycle_and_epsilon() {
        unsafe {
            let p = eomq_params_new();
            assert!(!p.is_null());
            let (mut re, mut im) = (0.0, 0.0);
            let name = CString::new("g_om").unwrap();
            assert_eq!(eomq_params_set(p, name.as_ptr(), 0.0), EomqStatus::Ok);
            assert_eq!(eomq_epsilon_t(p, 1.0, &mut re, &mut im), EomqStatus::Ok);
            assert!((re - 4.0).abs() < 1e-12 && im.abs() < 1e-12);
            eomq_params_free(p);
        }
    }

    #[test]
    fn json_parse_and_predictions() {
        unsafe {
            let json =
                CString::new(r#"{"g_om": 0.3, "g_em": 0.3, "g": 0.3, "kappa_a": 2.17}"#).unwrap();
            let mut p: *mut EomqParams = std::ptr::null_mut();
            assert_eq!(eomq_params_from_json(json.as_ptr(), &mut p), EomqStatus::Ok);
            assert_eq!(eomq_params_red_sideband(p), EomqStatus::Ok);
            assert_eq!(eomq_params_validate(p), EomqStatus::Ok);
            let (mut lo, mut hi) = (0.0, 0.0);
            assert_eq!(eomq_omit_minima(p, &mut lo, &mut hi), EomqStatus::Ok);
            assert!((hi - 0.5196152422706632).abs() < 1e-12);
            assert_eq!(lo, -hi);
            eomq_params_free(p);
        }
    }

    #[test]
    fn spectrum_fill_and_errors() {
        unsafe {
            let p = eomq_params_new();
            let n = 101;
            let mut xs = vec![0.0; n];
            let mut re = vec![0.0; n];
            let mut im = vec![0.0; n];
            assert_eq!(
                eomq_probe_spectrum(
                    p,
                    -1.0,
                    1.0,
                    n,
                    xs.as_mut_ptr(),
                    re.as_mut_ptr(),
                    im.as_mut_ptr()
                ),
                EomqStatus::Ok
            );
            assert_eq!(xs[0], -1.0);
            assert_eq!(xs[n - 1], 1.0);
            assert!(re.iter().all(|v| *v >= 0.0 && *v <= 4.0));

            // invalid grid
            assert_eq!(
                eomq_probe_spectrum(
                    p,
                    1.0,
                    -1.0,
                    n,
                    xs.as_mut_ptr(),
                    re.as_mut_ptr(),
                    im.as_mut_ptr()
                ),
                EomqStatus::InvalidArgument
            );
            let mut buf = vec![0i8; 128];
            let len = eomq_last_error(buf.as_mut_ptr(), buf.len());
            assert!(len > 0);
            eomq_params_free(p);
        }
    }

    #[test]
    fn null_handling() {
        unsafe {
            let (mut re, mut im) = (0.0, 0.0);
            assert_eq!(
                eomq_epsilon_t(std::ptr::null(), 1.0, &mut re, &mut im),
                EomqStatus::NullPointer
            );
            eomq_params_free(std::ptr::null_mut());
            let p = eomq_params_new();
            assert_eq!(
                eomq_epsilon_t(p, 1.0, std::ptr::null_mut(), &mut im),
                EomqStatus::NullPointer
            );
            eomq_params_free(p);
        }
    }

    #[test]
    fn invalid_params_rejected() {
        unsafe {
            let p = eomq_params_new();
            let name = CString::new("sigma_z").unwrap();
            assert_eq!(eomq_params_set(p, name.as_ptr(), -1.5), EomqStatus::Ok);
            assert_eq!(eomq_params_validate(p), EomqStatus::InvalidArgument);
            let unknown = CString::new("not_a_param").unwrap();
            assert_eq!(
                eomq_params_set(p, unknown.as_ptr(), 1.0),
                EomqStatus::InvalidArgument
            );
            eomq_params_free(p);
        }
    }

    #[test]
    fn poles_and_steady_state() {
        unsafe {
            let p = eomq_params_new();
            let mut pr = [0.0; 3];
            let mut pi = [0.0; 3];
            let mut rr = [0.0; 3];
            let mut ri = [0.0; 3];
            let mut dev = 0.0;
            assert_eq!(
                eomq_hybrid_poles(
                    p,
                    pr.as_mut_ptr(),
                    pi.as_mut_ptr(),
                    rr.as_mut_ptr(),
                    ri.as_mut_ptr(),
                    &mut dev
                ),
                EomqStatus::Ok
            );
            assert!(dev > 0.0);

            // switching metrics for the strong-switching coupling set
            for (name, v) in [
                ("kappa_a", 0.9),
                ("g_em", 0.1),
                ("g", 0.001),
                ("g_om", 0.0),
                ("g_om_bare", 0.06),
                ("e_m", 100.0),
            ] {
                let c = CString::new(name).unwrap();
                assert_eq!(eomq_params_set(p, c.as_ptr(), v), EomqStatus::Ok);
            }
            let (mut ratio, mut e_up, mut e_down) = (0.0, 0.0, 0.0);
            assert_eq!(
                eomq_switching_metrics(p, 0.0, 10.0, 401, &mut ratio, &mut e_up, &mut e_down),
                EomqStatus::Ok
            );
            assert!(e_up > e_down && ratio > 1.0);

            let mut roots = [0.0; 3];
            let mut stable = [0u8; 3];
            let mut count = 0usize;
            let e_mid = 0.5 * (e_up + e_down);
            assert_eq!(
                eomq_photon_roots(
                    p,
                    e_mid,
                    roots.as_mut_ptr(),
                    stable.as_mut_ptr(),
                    &mut count
                ),
                EomqStatus::Ok
            );
            assert_eq!(count, 3);
            assert_eq!(stable, [1, 0, 1]);

            // monostable set reports NOT_BISTABLE
            let c = CString::new("g_om_bare").unwrap();
            assert_eq!(eomq_params_set(p, c.as_ptr(), 0.0), EomqStatus::Ok);
            assert_eq!(
                eomq_switching_metrics(p, 0.0, 10.0, 401, &mut ratio, &mut e_up, &mut e_down),
                EomqStatus::NotBistable
            );
            eomq_params_free(p);
        }
    }

    #[test]
    fn displacement_and_peaks() {
        unsafe {
            let json =
                CString::new(r#"{"g_om": 0.4, "g_em": 0.01, "g": 0.01, "kappa_a": 0.8}"#).unwrap();
            let mut p: *mut EomqParams = std::ptr::null_mut();
            assert_eq!(eomq_params_from_json(json.as_ptr(), &mut p), EomqStatus::Ok);
            let mut v = 0.0;
            assert_eq!(eomq_displacement_spectrum(p, 0.77, &mut v), EomqStatus::Ok);
            assert!(v > 0.0);
            let mut count = 0usize;
            assert_eq!(
                eomq_nms_peak_count(p, 0.05, 2.0, 4001, &mut count),
                EomqStatus::Ok
            );
            assert_eq!(count, 2);
            eomq_params_free(p);
        }
    }
}
