//! Extended-precision trapezoid sums of complex Gaussians.
//!
//! Used when an integral of oscillating Gaussians is many orders of magnitude
//! smaller than its integrand, so double-precision samples cancel to noise.
//! On a uniform grid `R_n = R_0 + n h` each Gaussian satisfies
//! `f_{n+1} = f_n q_n`, `q_{n+1} = q_n s` with `s = e^{2 c2 h²}`, so only
//! one complex exponential per term is needed.

use crate::error::{Error, Result};
use astro_float::{BigFloat, Consts, RoundingMode};
use num_complex::Complex64;

const RM: RoundingMode = RoundingMode::ToEven;

/// `exp(c0 + c1 R + c2 R²)` with `c2 < 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianTerm {
    pub c0: Complex64,
    pub c1: Complex64,
    pub c2: f64,
}

impl GaussianTerm {
    pub fn eval(&self, x: f64) -> Complex64 {
        (self.c0 + x * (self.c1 + x * self.c2)).exp()
    }
}

#[derive(Clone)]
struct BigComplex {
    re: BigFloat,
    im: BigFloat,
}

impl BigComplex {
    fn zero(p: usize) -> Self {
        Self {
            re: BigFloat::from_f64(0.0, p),
            im: BigFloat::from_f64(0.0, p),
        }
    }

    fn add(&self, o: &Self, p: usize) -> Self {
        Self {
            re: self.re.add(&o.re, p, RM),
            im: self.im.add(&o.im, p, RM),
        }
    }

    fn mul(&self, o: &Self, p: usize) -> Self {
        let re = self.re.mul(&o.re, p, RM).sub(&self.im.mul(&o.im, p, RM), p, RM);
        let im = self.re.mul(&o.im, p, RM).add(&self.im.mul(&o.re, p, RM), p, RM);
        Self { re, im }
    }

    fn scale(&self, s: &BigFloat, p: usize) -> Self {
        Self {
            re: self.re.mul(s, p, RM),
            im: self.im.mul(s, p, RM),
        }
    }

    /// `exp(re + i im)`.
    fn exp_of(re: &BigFloat, im: &BigFloat, p: usize, cc: &mut Consts) -> Self {
        let m = re.exp(p, RM, cc);
        Self {
            re: m.mul(&im.cos(p, RM, cc), p, RM),
            im: m.mul(&im.sin(p, RM, cc), p, RM),
        }
    }
}

fn big(x: f64, p: usize) -> BigFloat {
    BigFloat::from_f64(x, p)
}

fn to_f64(x: &BigFloat) -> Result<f64> {
    if x.is_zero() {
        return Ok(0.0);
    }
    let s = format!("{x}");
    s.parse::<f64>()
        .map_err(|e| Error::Internal(format!("cannot convert extended value `{s}`: {e}")))
}

/// Trapezoid approximation of `∫ Σ_j f_j(R) dR` over the grid
/// `R_n = lo + n h`, `n = 0..=n_steps`, carried out with `bits` of mantissa.
///
/// `h` should be a power of two and `lo` a multiple of it so that every grid
/// point is exactly representable.
pub fn trapezoid_gaussians(terms: &[GaussianTerm], lo: f64, h: f64, n_steps: usize, bits: usize) -> Result<Complex64> {
    if terms.iter().any(|t| !(t.c2 < 0.0)) {
        return Err(Error::param("c2", "every term must decay"));
    }
    if !(h > 0.0) || n_steps == 0 {
        return Err(Error::param("grid", "need h > 0 and at least one step"));
    }
    let p = bits.max(64);
    let mut cc = Consts::new().map_err(|e| Error::Internal(format!("extended constants: {e:?}")))?;
    let hb = big(h, p);
    let r0 = big(lo, p);
    let mut total = BigComplex::zero(p);
    for term in terms {
        let c2 = big(term.c2, p);
        let (c1r, c1i) = (big(term.c1.re, p), big(term.c1.im, p));
        // Exponent at R_0: c0 + c1 R0 + c2 R0².
        let quad = c2.mul(&r0, p, RM).mul(&r0, p, RM);
        let e_re = big(term.c0.re, p).add(&c1r.mul(&r0, p, RM), p, RM).add(&quad, p, RM);
        let e_im = big(term.c0.im, p).add(&c1i.mul(&r0, p, RM), p, RM);
        let mut f = BigComplex::exp_of(&e_re, &e_im, p, &mut cc);
        // Ratio f(R0 + h)/f(R0) = exp(c1 h + c2 (2 R0 h + h²)).
        let two_r0_h_h2 = big(2.0, p)
            .mul(&r0, p, RM)
            .mul(&hb, p, RM)
            .add(&hb.mul(&hb, p, RM), p, RM);
        let q_re = c1r.mul(&hb, p, RM).add(&c2.mul(&two_r0_h_h2, p, RM), p, RM);
        let q_im = c1i.mul(&hb, p, RM);
        let mut q = BigComplex::exp_of(&q_re, &q_im, p, &mut cc);
        let s = big(2.0, p)
            .mul(&c2, p, RM)
            .mul(&hb, p, RM)
            .mul(&hb, p, RM)
            .exp(p, RM, &mut cc);

        let half = big(0.5, p);
        let mut sum = f.scale(&half, p);
        for n in 1..=n_steps {
            f = f.mul(&q, p);
            q = q.scale(&s, p);
            if n == n_steps {
                sum = sum.add(&f.scale(&half, p), p);
            } else {
                sum = sum.add(&f, p);
            }
        }
        total = total.add(&sum, p);
    }
    let total = total.scale(&hb, p);
    Ok(Complex64::new(to_f64(&total.re)?, to_f64(&total.im)?))
}

/// Bits needed so that a sum whose terms reach `e^{log_amplification}` times
/// the result, accumulated over `n_steps` recurrence steps, keeps about 16
/// correct digits.
pub fn required_bits(log_amplification: f64, n_steps: usize) -> usize {
    let amp_bits = (log_amplification.max(0.0) / std::f64::consts::LN_2).ceil() as usize;
    let step_bits = 2 * (usize::BITS - n_steps.max(1).leading_zeros()) as usize;
    64 + amp_bits + step_bits + 24
}
