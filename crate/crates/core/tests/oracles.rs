//! Embedding-faithfulness checks against independent dense-matrix oracles.
//!
//! Two oracles, both written directly from the textbook mean-value formulas
//! with no functional/kernel machinery:
//!
//! - a chart-point oracle: `<Psi|O|Psi>` / `Tr(rho O)` summed over the
//!   chart's own (E, E') sample points with the chart measure — an
//!   independent code path over the same quadrature, which must agree to
//!   near machine precision on charts of any size;
//! - a continuum oracle: the same formulas on a dense 512^2 tensor grid of
//!   the energy square — a different quadrature entirely, which agrees to
//!   1e-10 once both discretizations resolve the integrand (64x64 charts
//!   with the smooth scenario families).

use num_complex::Complex64 as C64;
use qage::{build_chart, make_mixed_state, make_observable, make_pure_state, pair, LambdaNuChart};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Random smooth wave function: Gaussian with a linear chirp phase.
#[derive(Clone, Copy)]
struct RandomPsi {
    center: f64,
    width: f64,
    chirp: f64,
}

impl RandomPsi {
    fn draw(rng: &mut ChaCha8Rng) -> Self {
        Self {
            center: rng.random_range(9.7..10.3),
            width: rng.random_range(1.4..1.6),
            chirp: rng.random_range(-0.4..0.4),
        }
    }

    fn eval(&self, e: f64) -> C64 {
        let x = (e - self.center) / (2.0 * self.width);
        C64::from_polar((-x * x).exp(), self.chirp * (e - self.center))
    }
}

/// Random Hermitian observable: smooth diagonal profile plus a sum of two
/// Gaussian ridges with odd phase factors.
#[derive(Clone)]
struct RandomObs {
    poly: [f64; 3],
    ridges: Vec<(f64, f64, f64, f64)>, // (amplitude, center, width, phase slope)
}

impl RandomObs {
    fn draw(rng: &mut ChaCha8Rng) -> Self {
        let ridges = (0..2)
            .map(|_| {
                (
                    rng.random_range(-1.0..1.0),
                    rng.random_range(9.0..11.0),
                    rng.random_range(1.4..2.0),
                    rng.random_range(-0.8..0.8),
                )
            })
            .collect();
        Self {
            poly: [
                rng.random_range(-1.0..1.0),
                rng.random_range(-0.2..0.2),
                rng.random_range(-0.02..0.02),
            ],
            ridges,
        }
    }

    fn diag(&self, e: f64) -> f64 {
        self.poly[0] + self.poly[1] * e + self.poly[2] * e * e
    }

    fn kernel(&self, e: f64, ep: f64) -> C64 {
        let mut acc = C64::ZERO;
        for &(a, c, w, theta) in &self.ridges {
            let g = (-(((e - c) / w).powi(2) + ((ep - c) / w).powi(2)) / 2.0).exp();
            acc += a * g * C64::from_polar(1.0, theta * (e - ep));
        }
        acc
    }
}

/// `<Psi|O|Psi>` summed over the chart's own sample points (Eq-2.20 shape:
/// conj(psi(E)) psi(E') O_{EE'}), plus the diagonal term on the nodes.
fn chart_point_oracle_pure(chart: &LambdaNuChart, psi: &RandomPsi, obs: &RandomObs) -> C64 {
    let step = chart.grid().step();
    let mut z = 0.0;
    let mut diag = 0.0;
    for &e in chart.grid().nodes() {
        let p = psi.eval(e).norm_sqr();
        z += step * p;
        diag += step * p * obs.diag(e);
    }
    let mut corr = C64::ZERO;
    for j in 0..chart.n_lambda() {
        let w = chart.sample_weight(j);
        for k in 0..chart.m_nu() {
            let (e, ep) = chart.energy_pair(j, k);
            if chart.in_energy_square(e, ep) {
                corr += w * psi.eval(e).conj() * psi.eval(ep) * obs.kernel(e, ep);
            }
        }
    }
    (c64(diag, 0.0) + corr) / z
}

/// Dense tensor-grid quadrature of the same formulas over the energy
/// square.
fn continuum_oracle_pure(e_max: f64, n: usize, psi: &RandomPsi, obs: &RandomObs) -> C64 {
    let h = e_max / n as f64;
    let nodes: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) * h).collect();
    let samples: Vec<C64> = nodes.iter().map(|&e| psi.eval(e)).collect();
    let mut z = 0.0;
    let mut diag = 0.0;
    for (i, &e) in nodes.iter().enumerate() {
        let p = samples[i].norm_sqr();
        z += h * p;
        diag += h * p * obs.diag(e);
    }
    let mut corr = C64::ZERO;
    for (i, &e) in nodes.iter().enumerate() {
        let mut row = C64::ZERO;
        for (ip, &ep) in nodes.iter().enumerate() {
            row += samples[i].conj() * samples[ip] * obs.kernel(e, ep);
        }
        corr += h * h * row;
    }
    (c64(diag, 0.0) + corr) / z
}

#[test]
fn pure_state_pairing_matches_chart_point_oracle_small_charts() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for &(n_lambda, m_nu) in &[(8usize, 8usize), (12, 12), (16, 16)] {
        let chart = build_chart(20.0, n_lambda, m_nu).unwrap();
        for _ in 0..17 {
            let psi = RandomPsi::draw(&mut rng);
            let obs_spec = RandomObs::draw(&mut rng);
            let state = make_pure_state(&chart, |e| psi.eval(e)).unwrap();
            let obs = make_observable(&chart, |e| obs_spec.diag(e), |e, ep| obs_spec.kernel(e, ep))
                .unwrap();
            let got = pair(&state, &obs).unwrap();
            let want = chart_point_oracle_pure(&chart, &psi, &obs_spec);
            let scale = want.norm().max(1e-6);
            assert!(
                (got - want).norm() <= 1e-8 * scale,
                "chart {n_lambda}x{m_nu}: got {got}, oracle {want}"
            );
        }
    }
}

#[test]
fn pure_state_pairing_matches_continuum_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let chart = build_chart(20.0, 64, 64).unwrap();
    for _ in 0..6 {
        let psi = RandomPsi::draw(&mut rng);
        let obs_spec = RandomObs::draw(&mut rng);
        let state = make_pure_state(&chart, |e| psi.eval(e)).unwrap();
        let obs =
            make_observable(&chart, |e| obs_spec.diag(e), |e, ep| obs_spec.kernel(e, ep)).unwrap();
        let got = pair(&state, &obs).unwrap();
        let want = continuum_oracle_pure(20.0, 512, &psi, &obs_spec);
        let scale = want.norm().max(1e-6);
        assert!(
            (got - want).norm() <= 1e-10 * scale.max(1.0),
            "got {got}, continuum oracle {want}, rel {}",
            (got - want).norm() / scale
        );
    }
}

#[test]
fn unit_jacobian_against_dense_square_quadrature() {
    // the (lambda, nu) chart quadrature of a sampled (E, E') function must
    // agree with a dense tensor quadrature of the energy square: the change
    // of variables has unit Jacobian, and the square lies inside the
    // triangle, so for integrands decaying inside the square both
    // quadratures converge to the same integral; at 16x16 the difference
    // must stay within an O(dl^2 + dnu^2) budget
    use qage::{integrate_kernel, CorrelationKernel};
    let chart = build_chart(20.0, 16, 16).unwrap();
    let cases: Vec<Box<dyn Fn(f64, f64) -> C64>> = vec![
        Box::new(|e: f64, ep: f64| {
            c64((-((e - 10.0) / 2.0).powi(2) - ((ep - 10.0) / 2.0).powi(2)).exp(), 0.0)
        }),
        Box::new(|e: f64, ep: f64| {
            let g = (-((e - 9.0) / 2.2).powi(2) - ((ep - 11.0) / 1.8).powi(2)).exp();
            c64(g * (0.1 * e), g * (e - ep) * 0.05)
        }),
    ];
    let dense = |f: &dyn Fn(f64, f64) -> C64| -> C64 {
        let n = 1024;
        let h = 20.0 / n as f64;
        let mut total = C64::ZERO;
        for i in 0..n {
            let e = (i as f64 + 0.5) * h;
            let mut row = C64::ZERO;
            for ip in 0..n {
                let ep = (ip as f64 + 0.5) * h;
                row += f(e, ep);
            }
            total += h * h * row;
        }
        total
    };
    let h_l = chart.grid().step();
    let h_nu = (0..chart.n_lambda()).map(|j| chart.nu_step(j)).fold(0.0f64, f64::max);
    let budget = h_l * h_l + h_nu * h_nu; // O(dl^2 + dnu^2) with C = 1
    for f in &cases {
        let kernel = CorrelationKernel::from_energy_fn(&chart, f);
        let got = integrate_kernel(&kernel, |_, _| c64(1.0, 0.0));
        let want = dense(f);
        let gap = (got - want).norm();
        assert!(gap <= budget, "chart {got} vs dense {want}: gap {gap} > budget {budget}");
    }
    // at 64x64 both quadratures resolve these integrands and the agreement
    // is spectral, far below the second-order budget
    let fine = build_chart(20.0, 64, 64).unwrap();
    for f in &cases {
        let kernel = CorrelationKernel::from_energy_fn(&fine, f);
        let got = integrate_kernel(&kernel, |_, _| c64(1.0, 0.0));
        let want = dense(f);
        let gap = (got - want).norm();
        assert!(gap <= 1e-9 * want.norm().max(1.0), "fine-chart gap {gap} not spectrally small");
    }
}

#[test]
fn mixed_state_pairing_matches_dense_trace_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let chart = build_chart(20.0, 16, 16).unwrap();
    for _ in 0..12 {
        // density kernel: Hermitian Gaussian ridge in (lambda, nu)
        let lc = rng.random_range(9.5..10.5);
        let lw = rng.random_range(1.2..1.6);
        let nw = rng.random_range(1.2..1.8);
        let twist = rng.random_range(-0.5..0.5);
        let rho_fn = move |e: f64, ep: f64| -> C64 {
            let l = 0.5 * (e + ep);
            let nu = e - ep;
            let g = (-((l - lc) / lw).powi(2) - (nu / (2.0 * nw)).powi(2)).exp();
            g * C64::from_polar(1.0, twist * nu)
        };
        let obs_spec = RandomObs::draw(&mut rng);
        let state = make_mixed_state(&chart, rho_fn).unwrap();
        let obs =
            make_observable(&chart, |e| obs_spec.diag(e), |e, ep| obs_spec.kernel(e, ep)).unwrap();
        let got = pair(&state, &obs).unwrap();

        // Tr(rho O) over the chart points: sum rho(E,E)O_E + conj-free
        // double sum with rho read as a matrix (rho^*_{EE'} = rho_{E'E})
        let step = chart.grid().step();
        let mut z = 0.0;
        let mut diag = 0.0;
        for &e in chart.grid().nodes() {
            let d = rho_fn(e, e).re;
            z += step * d;
            diag += step * d * obs_spec.diag(e);
        }
        let mut corr = C64::ZERO;
        for j in 0..chart.n_lambda() {
            let w = chart.sample_weight(j);
            for k in 0..chart.m_nu() {
                let (e, ep) = chart.energy_pair(j, k);
                if chart.in_energy_square(e, ep) {
                    corr += w * rho_fn(ep, e) * obs_spec.kernel(e, ep);
                }
            }
        }
        let want = (c64(diag, 0.0) + corr) / z;
        let scale = want.norm().max(1e-6);
        assert!(
            (got - want).norm() <= 1e-8 * scale,
            "got {got}, oracle {want}"
        );
    }
}
