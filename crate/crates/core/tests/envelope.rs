//! Riemann-Lebesgue decay against the closed-form Gaussian Fourier
//! envelope.
//!
//! Scenario: pure Gaussian state `psi(E) = exp(-(E-4)^2)` (center 4, width
//! 1/2) against an observable with diagonal `O_E = E` and kernel
//! `exp(-2(lambda-4)^2 - nu^2/2)`. The correlation integrand separates,
//!
//! ```text
//! conj(rho) O = (1/Z) exp(-4(lambda-4)^2) * exp(-nu^2),
//! ```
//!
//! so the off-diagonal mean-value term is exactly
//! `M(t) = C exp(-t^2/4)` with `C = sqrt(pi/2)`, and the mean decays to the
//! weak-limit value. Parameters put every populated slice's recurrence time
//! `pi*m/(2*lambda)` far beyond the tracked window, so the discrete sums
//! follow the continuum envelope down to the 1e-12 floor at 64x64.

use num_complex::Complex64 as C64;
use qage::{
    build_chart, make_observable, make_pure_state, mean_trajectory, pair, weak_limit, Observable,
    StateFunctional,
};
use std::f64::consts::PI;

const CENTER: f64 = 4.0;

fn scenario() -> (StateFunctional, Observable) {
    let chart = build_chart(20.0, 64, 64).unwrap();
    let state = make_pure_state(&chart, |e| C64::new((-(e - CENTER).powi(2)).exp(), 0.0)).unwrap();
    let obs = make_observable(
        &chart,
        |e| e,
        |e, ep| {
            let l = 0.5 * (e + ep);
            let nu = e - ep;
            C64::new((-2.0 * (l - CENTER).powi(2) - 0.5 * nu * nu).exp(), 0.0)
        },
    )
    .unwrap();
    (state, obs)
}

/// `M(t) = C exp(-t^2/(4a))` with `a = 1`, `C = sqrt(pi/2)`.
fn envelope(t: f64) -> f64 {
    (PI / 2.0).sqrt() * (-t * t / 4.0).exp()
}

#[test]
fn offdiag_magnitude_tracks_the_gaussian_envelope() {
    let (state, obs) = scenario();
    let times: Vec<f64> = (0..=41).map(|i| i as f64 * 0.2).collect(); // up to t = 8.2
    let traj = mean_trajectory(&state, &obs, &times).unwrap();
    for (&t, &got) in times.iter().zip(traj.offdiag_magnitude()) {
        let want = envelope(t);
        assert!(
            (got - want).abs() <= 1e-6 * want + 1e-12,
            "t={t}: measured {got}, envelope {want}, rel {}",
            (got - want).abs() / want
        );
    }
    // floor check: the envelope window really spans down to ~1e-12
    assert!(envelope(times[times.len() - 1]) <= 1e-7);
    assert!(envelope(0.0) > 1.0);
}

#[test]
fn mean_value_reaches_the_weak_limit() {
    let (state, obs) = scenario();
    // analytically determined horizon: envelope down to 1e-9 of its peak
    let c = envelope(0.0);
    let t_star = (4.0 * (c / 1e-9).ln()).sqrt();
    let limit = pair(&weak_limit(&state), &obs).unwrap();
    let traj = mean_trajectory(&state, &obs, &[t_star]).unwrap();
    let gap = (traj.means()[0] - limit).norm();
    assert!(gap <= 1e-8, "gap {gap} at t = {t_star}");
    // the diagonal term sits at the Gaussian's center energy
    assert!((limit.re - CENTER).abs() <= 1e-10);
    assert!(limit.im.abs() <= 1e-12);
}

#[test]
fn diagonal_term_is_time_independent_along_the_trajectory() {
    let (state, obs) = scenario();
    let times = [0.0, 0.7, 2.9];
    let traj = mean_trajectory(&state, &obs, &times).unwrap();
    let limit = pair(&weak_limit(&state), &obs).unwrap();
    for (m, off) in traj.means().iter().zip(traj.offdiag_magnitude()) {
        // mean = diagonal term + correlation term, with |corr| = offdiag
        assert!(((m - limit).norm() - off).abs() <= 1e-12);
    }
}
