//! Oracles run against the closed forms on the reference configuration.

use modvar::cl::{cl_bohmian_position, cl_current, cl_density, B2Reading};
use modvar::model::{make_superposition, reference_superposition, BathParams, Framework, PhysicalConstants, TimeGrid};
use modvar::oracle::{
    characteristic_modular, grid_propagator, pde_residual, pde_residual_with, propagator_convergence,
    trajectory_ode_oracle, OdeOptions, PropagatorGrid, ResidualOptions, SamplePoint, Source,
};
use modvar::schrodinger::{bohmian_position, bohmian_velocity, superposed_amplitude};
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::PI;

fn cl_points(l: f64) -> Vec<SamplePoint> {
    let mut v = Vec::new();
    for t in [0.4, 1.3] {
        for (r, big_r) in [
            (0.0, -25.0),
            (0.3, -24.0),
            (-0.5, 25.5),
            (0.2, 24.5),
            (l, 0.0),
            (-l + 0.4, 0.5),
        ] {
            v.push(SamplePoint { t, r, big_r });
        }
    }
    v
}

#[test]
fn damped_solution_satisfies_master_equation() {
    let c = PhysicalConstants::reference();
    let spec = reference_superposition(0.3);
    for &(gamma, temp) in &[(0.001, 2.0), (0.1, 10.0)] {
        let b = BathParams::new(&c, gamma, temp).unwrap();
        let rep = pde_residual(Framework::CaldeiraLeggett, &spec, &b, &c, &cl_points(50.0));
        assert!(rep.relative_residual < 1e-6, "{rep:?}");
        let ratio = rep.convergence_ratio.unwrap();
        assert!((ratio - 4.0).abs() < 0.5, "{rep:?}");
    }
}

#[test]
fn misread_coefficient_is_caught() {
    // With ħ ≠ 1 the unit reading of the b₂ constant no longer solves the
    // equation, and the residual shows it.
    let c = PhysicalConstants::new(1.0, 0.5, 1.0, -3.0).unwrap();
    let spec = make_superposition(20.0, 1.0, 0.4, 0.0, &c).unwrap();
    let b = BathParams::new(&c, 0.05, 2.0).unwrap();
    let points: Vec<SamplePoint> = [(0.0, 10.0), (0.2, 10.5), (-0.3, 9.5)]
        .iter()
        .map(|&(r, big_r)| SamplePoint { t: 1.0, r, big_r })
        .collect();
    let opts = ResidualOptions::default();
    let good = pde_residual_with(
        Framework::CaldeiraLeggett,
        &spec,
        &b,
        &c,
        &points,
        B2Reading::ReducedPlanck,
        &opts,
    );
    let bad = pde_residual_with(
        Framework::CaldeiraLeggett,
        &spec,
        &b,
        &c,
        &points,
        B2Reading::Unit,
        &opts,
    );
    assert!(good.relative_residual < 1e-6, "{good:?}");
    assert!(bad.relative_residual > 1e-2, "{bad:?}");
}

#[test]
fn guidance_equation_reproduces_closed_trajectories() {
    let c = PhysicalConstants::reference();
    let spec = reference_superposition(0.0);
    let grid = TimeGrid::new(0.0, 2.0, 41).unwrap();
    for x0 in [-26.0, -25.0, -24.2] {
        let p = *spec.left();
        let tr =
            trajectory_ode_oracle(|x, t| bohmian_velocity(&p, &c, x, t), x0, &grid, &OdeOptions::default()).unwrap();
        for &(t, x) in &tr.samples {
            assert!((x - bohmian_position(&p, &c, x0, t)).abs() < 1e-6);
        }
    }

    let b = BathParams::new(&c, 0.1, 10.0).unwrap();
    let v = |x: f64, t: f64| cl_current(&spec, &b, &c, x, t) / cl_density(&spec, &b, &c, x, t);
    for x0 in [-25.5, -25.0, -24.0] {
        let tr = trajectory_ode_oracle(v, x0, &grid, &OdeOptions::default()).unwrap();
        for &(t, x) in &tr.samples {
            let exact = cl_bohmian_position(spec.left(), &b, &c, x0, t);
            assert!((x - exact).abs() < 1e-5, "x0={x0} t={t}: {x} vs {exact}");
        }
    }
}

#[test]
fn characteristic_value_matches_momentum_grid() {
    // ⟨e^{ip̂L/ħ}⟩ = Σ |φ(p)|² e^{ipL/ħ} over a discrete momentum grid.
    let c = PhysicalConstants::reference();
    let spec = reference_superposition(0.0);
    let n = 4096;
    let (lo, hi) = (-60.0, 60.0);
    let dx = (hi - lo) / n as f64;
    let mut buf: Vec<Complex64> = (0..n)
        .map(|i| superposed_amplitude(&spec, &c, lo + i as f64 * dx, 0.0))
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let total: f64 = buf.iter().map(|v| v.norm_sqr()).sum();
    let l = spec.separation();
    let mut acc = Complex64::new(0.0, 0.0);
    for (j, v) in buf.iter().enumerate() {
        let freq = if j < n / 2 { j as f64 } else { j as f64 - n as f64 };
        let k = 2.0 * PI * freq / (hi - lo);
        acc += v.norm_sqr() * Complex64::from_polar(1.0, k * l);
    }
    let fourier = acc / total;
    let src = Source::Schrodinger { spec, constants: c };
    let direct = characteristic_modular(&src, 0.0, l).unwrap();
    assert!((fourier - direct).norm() < 1e-10, "{fourier} vs {direct}");
    assert!((direct.re - 0.497_506).abs() < 1e-6);
}

#[test]
fn propagator_converges_to_closed_form() {
    let c = PhysicalConstants::reference();
    let spec = reference_superposition(0.6);
    let grids = [
        PropagatorGrid::new(512, 4e-3),
        PropagatorGrid::new(1024, 1e-3),
        PropagatorGrid::new(1024, 2.5e-4),
    ];
    let rows = propagator_convergence(&spec, &c, 2.0, &grids).unwrap();
    for pair in rows.windows(2) {
        assert!(pair[1].l2_error < pair[0].l2_error, "{rows:?}");
    }
    let finest = rows.last().unwrap();
    assert!(finest.l2_error < 1e-6 && finest.norm_drift < 1e-10, "{rows:?}");
    let state = grid_propagator(&spec, &c, 2.0, &PropagatorGrid::default()).unwrap();
    assert_eq!(state.steps, 8000);
}
