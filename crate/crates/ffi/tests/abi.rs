use std::ffi::CStr;
use std::ptr;

use hemodyn_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(hemodyn_last_error()) }
        .to_string_lossy()
        .into_owned()
}

fn params(delta: f64, beta0: f64, tau_min: f64, tau: f64) -> *mut HemodynParams {
    let mut p = ptr::null_mut();
    let rc = unsafe { hemodyn_params_new(delta, beta0, 1.62e8, 3.0, tau_min, tau, &mut p) };
    assert_eq!(rc, HEMODYN_OK, "{}", last_error());
    p
}

#[test]
fn params_lifecycle_and_validation() {
    let p = params(0.05, 1.77, 0.0, 18.2);
    let mut values = [0.0; 6];
    unsafe {
        assert_eq!(hemodyn_params_get(p, values.as_mut_ptr()), HEMODYN_OK);
        assert_eq!(values, [0.05, 1.77, 1.62e8, 3.0, 0.0, 18.2]);
        assert_eq!(hemodyn_params_set_tau(p, -1.0), HEMODYN_ERR_INVALID);
        assert!(!last_error().is_empty());
        hemodyn_params_get(p, values.as_mut_ptr());
        assert_eq!(values[5], 18.2, "handle unchanged after failed update");
        assert_eq!(hemodyn_params_set_tau(p, 15.0), HEMODYN_OK);
        assert!(last_error().is_empty());
        hemodyn_params_free(p);
        hemodyn_params_free(ptr::null_mut());

        let mut out = ptr::null_mut();
        assert_eq!(
            hemodyn_params_new(0.05, 1.77, 1.62e8, 3.0, 5.0, 5.0, &mut out),
            HEMODYN_ERR_INVALID
        );
        assert!(out.is_null());
        assert_eq!(
            hemodyn_params_new(0.05, 1.77, 1.62e8, 3.0, 0.0, 5.0, ptr::null_mut()),
            HEMODYN_ERR_NULL
        );
    }
}

#[test]
fn equilibrium_and_linearization() {
    let p = params(0.05, 1.77, 0.0, 18.2);
    let mut x_star = 0.0;
    let mut present = false;
    let mut lin = HemodynLinearization {
        beta_star: 0.0,
        delta_plus_beta_star: 0.0,
        ratio: 0.0,
        kappa: 0.0,
        has_kappa: false,
        x_star: 0.0,
    };
    let mut regime = HemodynRegime::Degenerate;
    unsafe {
        assert_eq!(hemodyn_equilibrium(p, &mut x_star, &mut present), HEMODYN_OK);
        assert!(present);
        assert!((x_star / 526_867_199.464_050_66 - 1.0).abs() < 1e-12);
        assert_eq!(hemodyn_linearize(p, &mut lin), HEMODYN_OK);
        assert!(lin.has_kappa);
        assert!((lin.kappa - 0.238_938_053_097_345_13).abs() < 1e-12);
        assert_eq!(hemodyn_regime(p, &mut regime), HEMODYN_OK);
        assert_eq!(regime, HemodynRegime::DelayDependent);
        hemodyn_params_free(p);

        let dying = params(0.05, 0.03, 0.0, 5.0);
        assert_eq!(hemodyn_equilibrium(dying, &mut x_star, &mut present), HEMODYN_OK);
        assert!(!present);
        assert_eq!(hemodyn_linearize(dying, &mut lin), HEMODYN_ERR_INVALID);
        assert_eq!(hemodyn_regime(dying, &mut regime), HEMODYN_OK);
        assert_eq!(regime, HemodynRegime::TrivialGloballyStable);
        assert_eq!(hemodyn_linearize(ptr::null(), &mut lin), HEMODYN_ERR_NULL);
        hemodyn_params_free(dying);
    }
}

#[test]
fn hopf_crossings_and_errors() {
    let p = params(0.05, 1.77, 0.0, 18.2);
    let mut hopf = ptr::null_mut();
    let mut c = HemodynCrossing {
        tau_c: 0.0,
        omega_c: 0.0,
        y: 0.0,
        branch_l: 0,
        branch_side: 0,
        transversality: 0,
    };
    unsafe {
        assert_eq!(hemodyn_hopf(p, 0, &mut hopf), HEMODYN_OK);
        assert_eq!(hemodyn_hopf_count(hopf), 1);
        assert_eq!(hemodyn_hopf_crossing(hopf, 0, &mut c), HEMODYN_OK);
        assert!((c.tau_c - 18.126_975_284_410_39).abs() < 1e-9);
        assert!((c.omega_c - 0.137_975_762_806_763).abs() < 1e-12);
        assert_eq!((c.branch_l, c.branch_side, c.transversality), (1, 1, 1));
        let mut re = 1.0;
        let mut im = 1.0;
        assert_eq!(hemodyn_char_delta(p, c.tau_c, 0.0, c.omega_c, &mut re, &mut im), HEMODYN_OK);
        assert!(re.hypot(im) < 1e-9);
        let mut unstable = false;
        assert_eq!(hemodyn_hopf_predicts_unstable(hopf, 18.2, &mut unstable), HEMODYN_OK);
        assert!(unstable);
        assert_eq!(hemodyn_hopf_crossing(hopf, 1, &mut c), HEMODYN_ERR_INVALID);
        assert!(last_error().contains("out of range"));
        hemodyn_hopf_free(hopf);
        assert_eq!(hemodyn_hopf_count(ptr::null()), 0);
        hemodyn_params_free(p);

        let shifted = params(0.05, 1.77, 1.0, 18.2);
        let mut none = ptr::null_mut();
        assert_eq!(hemodyn_hopf(shifted, 0, &mut none), HEMODYN_ERR_DEGENERATE);
        assert!(none.is_null());
        hemodyn_params_free(shifted);

        // R = 2: δ + β* = 0
        let degenerate = params(0.05, 0.15, 0.0, 18.2);
        assert_eq!(hemodyn_hopf(degenerate, 0, &mut none), HEMODYN_ERR_DEGENERATE);
        hemodyn_params_free(degenerate);
    }
}

#[test]
fn simulation_through_handles() {
    let p = params(0.05, 1.77, 0.0, 15.0);
    let mut opts = HemodynSimOptions {
        dt: 0.0,
        t_end: 0.0,
        scheme: -1,
        quad_panels: 0,
        linear_interp: true,
    };
    let mut traj = ptr::null_mut();
    unsafe {
        assert_eq!(hemodyn_sim_options_default(p, &mut opts), HEMODYN_OK);
        assert_eq!(opts.dt, 0.05);
        opts.t_end = 10.0;
        assert_eq!(hemodyn_simulate_constant(p, 1e8, &opts, &mut traj), HEMODYN_OK);
        let n = hemodyn_trajectory_len(traj);
        assert_eq!(n, 201);
        let mut t = vec![0.0; n];
        let mut x = vec![0.0; n];
        let mut written = 0;
        assert_eq!(
            hemodyn_trajectory_copy(traj, t.as_mut_ptr(), x.as_mut_ptr(), ptr::null_mut(), n, &mut written),
            HEMODYN_OK
        );
        assert_eq!(written, n);
        assert_eq!(t[n - 1], 10.0);
        assert_eq!(x[0], 1e8);
        let mut v = 0.0;
        assert_eq!(hemodyn_trajectory_eval(traj, 10.0, &mut v), HEMODYN_OK);
        assert_eq!(v, x[n - 1]);
        assert_eq!(hemodyn_trajectory_eval(traj, 11.0, &mut v), HEMODYN_ERR_RUNTIME);
        hemodyn_trajectory_free(traj);

        // the table history equals the constant one
        let times = [-15.0, -7.5, 0.0];
        let values = [1e8; 3];
        let mut tab = ptr::null_mut();
        assert_eq!(
            hemodyn_simulate_table(p, times.as_ptr(), values.as_ptr(), 3, &opts, &mut tab),
            HEMODYN_OK
        );
        let mut xt = vec![0.0; n];
        hemodyn_trajectory_copy(tab, ptr::null_mut(), xt.as_mut_ptr(), ptr::null_mut(), n, ptr::null_mut());
        assert_eq!(xt, x);
        hemodyn_trajectory_free(tab);

        let mut bad = opts;
        bad.scheme = 7;
        let mut none = ptr::null_mut();
        assert_eq!(hemodyn_simulate_constant(p, 1e8, &bad, &mut none), HEMODYN_ERR_INVALID);
        assert_eq!(hemodyn_simulate_constant(p, -1.0, &opts, &mut none), HEMODYN_ERR_INVALID);
        assert!(none.is_null());
        assert_eq!(
            hemodyn_simulate_table(p, ptr::null(), values.as_ptr(), 3, &opts, &mut none),
            HEMODYN_ERR_NULL
        );
        hemodyn_params_free(p);
    }
}

#[test]
fn errors_are_thread_local() {
    unsafe {
        let mut out = ptr::null_mut();
        hemodyn_params_new(-1.0, 1.0, 1.0, 1.0, 0.0, 1.0, &mut out);
    }
    assert!(!last_error().is_empty());
    let other = std::thread::spawn(last_error).join().unwrap();
    assert!(other.is_empty());
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(hemodyn_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
