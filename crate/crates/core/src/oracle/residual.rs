//! Finite-difference residuals of the evolution equations and of the
//! equation of motion for `⟨e^{ip̂L/ħ}⟩`.

use super::characteristic::{momentum_first_moment_translated, richardson_derivative, CharacteristicFunction, Source};
use crate::cl::{B2Reading, ClDensityMatrix};
use crate::error::Result;
use crate::model::{BathParams, Framework, PhysicalConstants, SuperpositionSpec};
use crate::schrodinger::superposed_amplitude;
use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    /// Largest `|residual|` at the finest step.
    pub max_abs_residual: f64,
    /// Largest residual relative to the biggest term of its equation.
    pub relative_residual: f64,
    pub steps: Vec<f64>,
    /// Relative residual at each step.
    pub residuals: Vec<f64>,
    /// Residual ratio between the two coarsest steps; 4 for a second-order
    /// scheme, absent when the residual vanishes identically.
    pub convergence_ratio: Option<f64>,
}

/// One evaluation point. The Schrödinger residual reads the position from
/// `big_r` and ignores `r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplePoint {
    pub t: f64,
    pub r: f64,
    pub big_r: f64,
}

/// Spatial and temporal steps of the coarsest level, halved `levels - 1` times.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualOptions {
    pub space_step: f64,
    pub time_step: f64,
    pub levels: usize,
}

impl Default for ResidualOptions {
    fn default() -> Self {
        Self {
            space_step: 1e-3,
            time_step: 1e-5,
            levels: 3,
        }
    }
}

fn assemble(per_level: Vec<(f64, f64)>, opts: &ResidualOptions) -> ResidualReport {
    let steps = (0..opts.levels)
        .map(|i| opts.space_step / f64::powi(2.0, i as i32))
        .collect();
    let residuals: Vec<f64> = per_level.iter().map(|p| p.1).collect();
    let convergence_ratio = match (residuals.first(), residuals.get(1)) {
        (Some(&a), Some(&b)) if b > 0.0 => Some(a / b),
        _ => None,
    };
    let (max_abs_residual, relative_residual) = *per_level.last().expect("at least one level");
    ResidualReport {
        max_abs_residual,
        relative_residual,
        steps,
        residuals,
        convergence_ratio,
    }
}

/// `|residual| / max(|terms|)`, zero when every term vanishes.
fn relative(res: Complex64, terms: &[Complex64]) -> f64 {
    let scale = terms.iter().map(|t| t.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        0.0
    } else {
        res.norm() / scale
    }
}

/// Residual of `iħ ∂ψ/∂t = -ħ²/2m ∂²ψ/∂x² + m g x ψ` for any `ψ(x, t)`.
pub fn schrodinger_residual_of<F>(
    psi: F,
    c: &PhysicalConstants,
    points: &[(f64, f64)],
    opts: &ResidualOptions,
) -> ResidualReport
where
    F: Fn(f64, f64) -> Complex64,
{
    let i = Complex64::i();
    let (m, hbar, g) = (c.mass, c.hbar, c.gravity);
    let levels = (0..opts.levels.max(1))
        .map(|level| {
            let scale = f64::powi(2.0, level as i32);
            let (h, k) = (opts.space_step / scale, opts.time_step / scale);
            let mut worst = (0.0f64, 0.0f64);
            for &(x, t) in points {
                let v = psi(x, t);
                let dt = (psi(x, t + k) - psi(x, t - k)) / (2.0 * k);
                let dxx = (psi(x + h, t) - 2.0 * v + psi(x - h, t)) / (h * h);
                let lhs = i * hbar * dt;
                let kinetic = -hbar * hbar / (2.0 * m) * dxx;
                let potential = m * g * x * v;
                let res = lhs - kinetic - potential;
                worst.0 = worst.0.max(res.norm());
                worst.1 = worst.1.max(relative(res, &[lhs, kinetic, potential]));
            }
            worst
        })
        .collect();
    assemble(levels, opts)
}

/// Residual of `∂ρ/∂t = [iħ/m ∂r∂R - 2γ r ∂r - D r²/ħ² - i m g r/ħ] ρ` for
/// any `ρ(r, R, t)`.
pub fn cl_residual_of<F>(
    rho: F,
    b: &BathParams,
    c: &PhysicalConstants,
    points: &[SamplePoint],
    opts: &ResidualOptions,
) -> ResidualReport
where
    F: Fn(f64, f64, f64) -> Complex64,
{
    let i = Complex64::i();
    let (m, hbar, g) = (c.mass, c.hbar, c.gravity);
    let (gamma, d) = (b.gamma(), b.diffusion());
    let levels = (0..opts.levels.max(1))
        .map(|level| {
            let scale = f64::powi(2.0, level as i32);
            let (h, k) = (opts.space_step / scale, opts.time_step / scale);
            let mut worst = (0.0f64, 0.0f64);
            for p in points {
                let (r, x, t) = (p.r, p.big_r, p.t);
                let v = rho(r, x, t);
                let dt = (rho(r, x, t + k) - rho(r, x, t - k)) / (2.0 * k);
                let dr = (rho(r + h, x, t) - rho(r - h, x, t)) / (2.0 * h);
                let drr = (rho(r + h, x + h, t) - rho(r + h, x - h, t) - rho(r - h, x + h, t) + rho(r - h, x - h, t))
                    / (4.0 * h * h);
                let mixed = i * hbar / m * drr;
                let friction = -2.0 * gamma * r * dr;
                let diffusion = -d * r * r / (hbar * hbar) * v;
                let gravity = -i * m * g * r / hbar * v;
                let res = dt - mixed - friction - diffusion - gravity;
                worst.0 = worst.0.max(res.norm());
                worst.1 = worst.1.max(relative(res, &[dt, mixed, friction, diffusion, gravity]));
            }
            worst
        })
        .collect();
    assemble(levels, opts)
}

/// Residual of the closed-form state of `framework` at the sample points.
pub fn pde_residual(
    framework: Framework,
    spec: &SuperpositionSpec,
    b: &BathParams,
    c: &PhysicalConstants,
    points: &[SamplePoint],
) -> ResidualReport {
    pde_residual_with(
        framework,
        spec,
        b,
        c,
        points,
        B2Reading::default(),
        &ResidualOptions::default(),
    )
}

pub fn pde_residual_with(
    framework: Framework,
    spec: &SuperpositionSpec,
    b: &BathParams,
    c: &PhysicalConstants,
    points: &[SamplePoint],
    reading: B2Reading,
    opts: &ResidualOptions,
) -> ResidualReport {
    match framework {
        Framework::Schrodinger => {
            let xt: Vec<(f64, f64)> = points.iter().map(|p| (p.big_r, p.t)).collect();
            schrodinger_residual_of(|x, t| superposed_amplitude(spec, c, x, t), c, &xt, opts)
        }
        Framework::CaldeiraLeggett => {
            let model = ClDensityMatrix::new(*spec, *b, *c).with_reading(reading);
            cl_residual_of(|r, x, t| model.value(r, x, t), b, c, points, opts)
        }
    }
}

/// Compare `d⟨e^{ip̂L/ħ}⟩/dt` (central differences in `t` over an automatic
/// step sweep) with
/// `(-i m g L/ħ - D L²/ħ²) ⟨e^{ip̂L/ħ}⟩ - 2iγ (L/ħ) ⟨p̂ e^{ip̂L/ħ}⟩`.
pub fn heisenberg_rhs_check(
    spec: &SuperpositionSpec,
    b: &BathParams,
    c: &PhysicalConstants,
    t: f64,
) -> Result<ResidualReport> {
    let source = Source::CaldeiraLeggett(ClDensityMatrix::new(*spec, *b, *c));
    let l = spec.separation();
    let chi = |s: f64| -> Result<Complex64> { Ok(CharacteristicFunction::new(source, s)?.eval(l)?.value) };
    // Coarsest step: a small fraction of the fastest phase period, and never
    // reaching back past t = 0.
    let omega = (c.mass * c.gravity * l / c.hbar).abs() + b.diffusion() * l * l / (c.hbar * c.hbar) + 1.0;
    let mut h0 = 0.5 / omega;
    if t > 0.0 {
        h0 = h0.min(0.5 * t);
    }
    let est = if t > 0.0 {
        richardson_derivative(chi, t, h0, 7)?
    } else {
        // One-sided start: differentiate the even extension through the
        // second-order forward formula.
        let steps: Vec<f64> = (0..3).map(|i| h0 / f64::powi(2.0, i)).collect();
        let mut vals = Vec::new();
        for &h in &steps {
            vals.push((-3.0 * chi(0.0)? + 4.0 * chi(h)? - chi(2.0 * h)?) / (2.0 * h));
        }
        let ratio = (vals[0] - vals[1]).norm() / (vals[1] - vals[2]).norm();
        super::DerivativeEstimate {
            value: (4.0 * vals[2] - vals[1]) / 3.0,
            error: (vals[2] - vals[1]).norm(),
            steps,
            convergence_ratio: ratio,
        }
    };
    let i = Complex64::i();
    let value = chi(t)?;
    let moment = momentum_first_moment_translated(&source, t, l)?;
    let rotation = -i * c.mass * c.gravity * l / c.hbar * value;
    let damping = -b.diffusion() * l * l / (c.hbar * c.hbar) * value;
    let coupling = -2.0 * i * b.gamma() * l / c.hbar * moment;
    let res = est.value - rotation - damping - coupling;
    let rel = relative(res, &[est.value, rotation, damping, coupling]);
    Ok(ResidualReport {
        max_abs_residual: res.norm(),
        relative_residual: rel,
        steps: est.steps,
        residuals: vec![rel],
        convergence_ratio: Some(est.convergence_ratio),
    })
}
