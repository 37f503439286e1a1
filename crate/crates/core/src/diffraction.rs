//! The diffraction distribution function F of the gTM system.
//!
//! Two independent numerical schemes are implemented:
//!
//! * the Fourier series `F(x) = x + Σ_{m≥1} η(m)/(mπ) · sin(2πmx)` with
//!   exact coefficients ([`f_fourier`], [`f_fourier_grid`]);
//! * the Riesz-product/Volterra iteration: the density
//!   `f_n(x) = ∏_{j<n} ϑ(L^j x)` of the n-th iterate is integrated by the
//!   composite trapezoid rule and renormalised so `F(1) = 1`
//!   ([`f_volterra`]).
//!
//! Both produce samples of the same continuous, strictly increasing but
//! purely singular distribution function. The integration kernel
//! `ϑ(x) = 1 + (2/L) Σ_r α_r cos(2πrx)` is non-negative with
//! `∫₀¹ ϑ = 1` and `∫₀^{1/2} ϑ = 1/2`.
//!
//! The Cantor Devil's staircase ([`cantor_staircase`]) is provided as the
//! classical comparison curve: constant almost everywhere, in contrast to
//! the strictly increasing gTM curves.

use std::fmt;
use std::io::Write;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use rustfft::{num_complex::Complex, FftPlanner};

use crate::autocorrelation::{alpha_row, AutocorrTable};
use crate::{parallel, Error, Params, Result};

/// The integration kernel ϑ of the functional equation.
#[derive(Clone, Debug)]
pub struct Kernel {
    params: Params,
    alphas: Vec<i64>,
}

impl Kernel {
    pub fn new(params: Params) -> Self {
        Kernel {
            params,
            alphas: alpha_row(params),
        }
    }

    pub fn params(&self) -> Params {
        self.params
    }

    /// The coefficients `α_1 … α_{L−1}`.
    pub fn alpha_coeffs(&self) -> &[i64] {
        &self.alphas
    }

    /// Evaluates `ϑ(x) = 1 + (2/L) Σ_{r=1}^{L−1} α_r cos(2πrx)`.
    pub fn eval(&self, x: f64) -> f64 {
        let mut sum = 0.0;
        for (r, &a) in self.alphas.iter().enumerate() {
            sum += a as f64 * (2.0 * std::f64::consts::PI * (r + 1) as f64 * x).cos();
        }
        1.0 + 2.0 * sum / f64::from(self.params.length())
    }

    /// An exact upper bound for `‖ϑ‖∞`: the triangle-inequality constant
    /// `1 + (2/L) Σ_r |α_r|`, which is < L and equals 2 in the classical
    /// case. (The Wiener growth constant of
    /// [`crate::autocorrelation::growth_bound_q`] does *not* bound the
    /// kernel for general parameters; see the kernel sup check.)
    pub fn sup_bound(&self) -> BigRational {
        let l_total = i64::from(self.params.length());
        let sum: i64 = self.alphas.iter().map(|a| a.abs()).sum();
        BigRational::new((l_total + 2 * sum).into(), l_total.into())
    }
}

/// Trapezoid quadrature of ϑ over `[0, 1]` and `[0, 1/2]` with
/// `quadrature_points` intervals each. For a trigonometric polynomial all
/// Euler–Maclaurin endpoint corrections vanish, so the result is accurate
/// to rounding error once the grid resolves every mode. Analytic targets:
/// exactly `(1, 1/2)`.
pub fn kernel_moments(kern: &Kernel, quadrature_points: u32) -> (f64, f64) {
    assert!(quadrature_points >= 2, "need at least 2 quadrature points");
    let trapezoid = |upper: f64| {
        let m = quadrature_points as usize;
        let h = upper / m as f64;
        let mut sum = 0.5 * (kern.eval(0.0) + kern.eval(upper));
        for i in 1..m {
            sum += kern.eval(i as f64 * h);
        }
        sum * h
    };
    (trapezoid(1.0), trapezoid(0.5))
}

/// Checks `max_grid ϑ ≤ sup_bound` on a uniform grid (with a 1e−9 slack
/// for rounding, since the bound is attained for some parameters).
pub fn kernel_sup_bound_check(kern: &Kernel, grid: u32) -> bool {
    let bound = kern.sup_bound().to_f64().expect("finite");
    let max = kernel_grid_max(kern, grid);
    max <= bound + 1e-9
}

/// The maximum of ϑ over the uniform grid `x = i/grid`.
pub fn kernel_grid_max(kern: &Kernel, grid: u32) -> f64 {
    parallel::install(|| {
        (0..grid)
            .into_par_iter()
            .map(|i| kern.eval(f64::from(i) / f64::from(grid)))
            .reduce(|| f64::NEG_INFINITY, f64::max)
    })
}

/// The minimum of ϑ over the uniform grid `x = i/grid`.
pub fn kernel_grid_min(kern: &Kernel, grid: u32) -> f64 {
    parallel::install(|| {
        (0..grid)
            .into_par_iter()
            .map(|i| kern.eval(f64::from(i) / f64::from(grid)))
            .reduce(|| f64::INFINITY, f64::min)
    })
}

/// The truncated Fourier series
/// `F(x) ≈ x + Σ_{m=1}^{terms} η(m)/(mπ) sin(2πmx)` at a single point.
pub fn f_fourier(table: &AutocorrTable, x: f64, terms: u32) -> f64 {
    let mut sum = 0.0;
    for m in 1..=i64::from(terms) {
        sum += table.eta_f64(m) / (m as f64 * std::f64::consts::PI)
            * (2.0 * std::f64::consts::PI * m as f64 * x).sin();
    }
    x + sum
}

/// Evaluation method of a sampled distribution function.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Fourier,
    Volterra,
    Cantor,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Fourier => "fourier",
            Method::Volterra => "volterra",
            Method::Cantor => "cantor",
        })
    }
}

/// Iteration/truncation parameters recorded with a sampled curve.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SampleMeta {
    pub iterations: Option<u32>,
    pub terms: Option<u32>,
}

/// A distribution function sampled on the uniform grid
/// `0, 1/M, …, 1`, extendable to all of ℝ by `F(x+1) = 1 + F(x)` and
/// `F(−x) = −F(x)`.
#[derive(Clone, Debug)]
pub struct DistributionSamples {
    pub params: Option<Params>,
    pub grid_size: usize,
    /// `values[i] = F(i / grid_size)`, length `grid_size + 1`.
    pub values: Vec<f64>,
    pub method: Method,
    pub meta: SampleMeta,
}

impl DistributionSamples {
    /// Evaluates F anywhere on ℝ: periodic lift, skew-symmetry, and
    /// linear interpolation between grid points.
    pub fn eval(&self, x: f64) -> f64 {
        if x < 0.0 {
            return -self.eval(-x);
        }
        let whole = x.floor();
        let frac = x - whole;
        let t = frac * self.grid_size as f64;
        let i = (t.floor() as usize).min(self.grid_size - 1);
        let w = t - i as f64;
        whole + self.values[i] * (1.0 - w) + self.values[i + 1] * w
    }

    /// Whether the samples are monotone non-decreasing.
    pub fn is_non_decreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] >= w[0])
    }

    /// Writes the curve as CSV: `#`-prefixed header lines recording the
    /// parameters, then `x,F` rows with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        match self.params {
            Some(p) => writeln!(
                out,
                "# method={} k={} l={} grid={}",
                self.method,
                p.k(),
                p.l(),
                self.grid_size
            )?,
            None => writeln!(out, "# method={} grid={}", self.method, self.grid_size)?,
        }
        if let Some(n) = self.meta.iterations {
            writeln!(out, "# iterations={n}")?;
        }
        if let Some(t) = self.meta.terms {
            writeln!(out, "# terms={t}")?;
        }
        writeln!(out, "# columns: x,F")?;
        for (i, v) in self.values.iter().enumerate() {
            writeln!(
                out,
                "{},{}",
                format_float(i as f64 / self.grid_size as f64),
                format_float(*v)
            )?;
        }
        Ok(())
    }
}

/// Locale-independent float formatting with 17 significant digits.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Extension of a sampled distribution function to ℝ (free-function form
/// of [`DistributionSamples::eval`]).
pub fn distfn_extend(samples: &DistributionSamples, x: f64) -> f64 {
    samples.eval(x)
}

/// The Riesz-product density `f_n(x) = ∏_{j=0}^{n−1} ϑ(L^j x)` at one
/// point (clamped at 0 against rounding noise in the kernel).
pub fn riesz_density(p: Params, n: u32, x: f64) -> f64 {
    let kern = Kernel::new(p);
    let l_total = f64::from(p.length());
    let mut scale = 1.0;
    let mut product = 1.0;
    for _ in 0..n {
        product *= kern.eval((scale * x).fract()).max(0.0);
        scale *= l_total;
    }
    product
}

/// The smallest admissible grid size for `n` Volterra iterations:
/// 16 sample points per period of the finest kernel oscillation `L^{−n}`.
pub fn volterra_floor(p: Params, iterations: u32) -> u64 {
    16u64.saturating_mul(u64::from(p.length()).saturating_pow(iterations))
}

/// The largest iteration count admissible at grid size `grid`.
pub fn volterra_max_iterations(p: Params, grid: u64) -> u32 {
    let mut n = 0;
    while volterra_floor(p, n + 1) <= grid {
        n += 1;
    }
    n
}

fn riesz_density_grid(p: Params, iterations: u32, grid: usize) -> Vec<f64> {
    let kern = Kernel::new(p);
    let l_total = f64::from(p.length());
    parallel::install(|| {
        (0..=grid)
            .into_par_iter()
            .map(|i| {
                let x = i as f64 / grid as f64;
                let mut scale = 1.0;
                let mut product = 1.0;
                for _ in 0..iterations {
                    product *= kern.eval((scale * x).fract()).max(0.0);
                    scale *= l_total;
                }
                product
            })
            .collect()
    })
}

/// The n-th Volterra iterate of the distribution function, computed as
/// the cumulative trapezoid integral of the Riesz density on a uniform
/// grid, renormalised so that `F(1) = 1` exactly.
pub fn f_volterra(p: Params, iterations: u32, grid_size: u64) -> Result<DistributionSamples> {
    let required = volterra_floor(p, iterations);
    if grid_size < required {
        return Err(Error::ResolutionFloor {
            given: grid_size,
            required,
            iterations,
        });
    }
    let m = grid_size as usize;
    let density = riesz_density_grid(p, iterations, m);
    let mut values = Vec::with_capacity(m + 1);
    let mut acc = 0.0;
    values.push(0.0);
    for i in 0..m {
        acc += 0.5 * (density[i] + density[i + 1]) / m as f64;
        values.push(acc);
    }
    let total = values[m];
    for v in &mut values {
        *v /= total;
    }
    values[m] = 1.0;
    Ok(DistributionSamples {
        params: Some(p),
        grid_size: m,
        values,
        method: Method::Volterra,
        meta: SampleMeta {
            iterations: Some(iterations),
            terms: None,
        },
    })
}

/// Normalised measure masses of the `blocks` equal subintervals of
/// `[0, 1]` under the n-th Riesz iterate, accumulated blockwise from the
/// raw trapezoid increments.
///
/// This is mathematically the difference of the cumulative F at block
/// endpoints, but summing the (strictly positive) local increments avoids
/// the catastrophic cancellation that makes those differences round to
/// zero near dyadic points, where the measure is extremely thin.
pub fn riesz_block_masses(
    p: Params,
    iterations: u32,
    grid_size: u64,
    blocks: usize,
) -> Result<Vec<f64>> {
    let required = volterra_floor(p, iterations);
    if grid_size < required {
        return Err(Error::ResolutionFloor {
            given: grid_size,
            required,
            iterations,
        });
    }
    let m = grid_size as usize;
    assert!(
        blocks >= 1 && m.is_multiple_of(blocks),
        "blocks must divide the grid size"
    );
    let density = riesz_density_grid(p, iterations, m);
    let per = m / blocks;
    let mut masses = Vec::with_capacity(blocks);
    let mut total = 0.0;
    for b in 0..blocks {
        let mut acc = 0.0;
        for i in b * per..(b + 1) * per {
            acc += 0.5 * (density[i] + density[i + 1]) / m as f64;
        }
        masses.push(acc);
        total += acc;
    }
    for v in &mut masses {
        *v /= total;
    }
    Ok(masses)
}

/// Fourier-series samples of F on the uniform grid via a single inverse
/// FFT over the exact coefficients `η(m)/(mπ)`.
pub fn f_fourier_grid(table: &AutocorrTable, grid_size: u64, terms: u32) -> DistributionSamples {
    let m = grid_size as usize;
    assert!(
        (terms as usize) < m,
        "need more grid points than Fourier terms"
    );
    let mut buf = vec![Complex::new(0.0, 0.0); m];
    for (n, c) in buf.iter_mut().enumerate().take(terms as usize + 1).skip(1) {
        c.re = table.eta_f64(n as i64) / (n as f64 * std::f64::consts::PI);
    }
    // Unnormalised inverse FFT: S_i = Σ_n c_n e^{+2πi n i / M}, so
    // F(i/M) = i/M + Im S_i.
    FftPlanner::new()
        .plan_fft_inverse(m)
        .process(&mut buf);
    let mut values: Vec<f64> = (0..m).map(|i| i as f64 / m as f64 + buf[i].im).collect();
    values.push(1.0); // all sine terms vanish at x = 1
    DistributionSamples {
        params: Some(table.params()),
        grid_size: m,
        values,
        method: Method::Fourier,
        meta: SampleMeta {
            iterations: None,
            terms: Some(terms),
        },
    }
}

/// Sup-norm residual of the functional equation
/// `F(x) = (1/L) ∫₀^{Lx} ϑ(y/L) dF(y)` over the sample grid, with the
/// right-hand side evaluated by midpoint quadrature against the sampled
/// Stieltjes increments (extended by `dF(y + 1) = dF(y)`).
pub fn functional_equation_residual(p: Params, samples: &DistributionSamples) -> f64 {
    let kern = Kernel::new(p);
    let l_total = p.length() as usize;
    let m = samples.grid_size;
    let values = &samples.values;
    let mut acc = 0.0;
    let mut worst = values[0].abs();
    for idx in 0..l_total * m {
        let i = idx % m;
        let df = values[i + 1] - values[i];
        let y_mid = (idx as f64 + 0.5) / m as f64;
        acc += kern.eval(y_mid / l_total as f64) * df;
        if (idx + 1) % l_total == 0 {
            let j = (idx + 1) / l_total;
            worst = worst.max((values[j] - acc / l_total as f64).abs());
        }
    }
    worst
}

/// The Cantor function (Devil's staircase) on `[0, 1]`: read ternary
/// digits until the first 1; prior 2-digits become binary 1-digits.
pub fn cantor_staircase(x: f64) -> f64 {
    assert!((0.0..=1.0).contains(&x), "x must lie in [0, 1]");
    let mut rest = x;
    let mut value = 0.0;
    let mut bit = 0.5;
    for _ in 0..64 {
        rest *= 3.0;
        let digit = rest.floor().clamp(0.0, 2.0);
        if digit == 1.0 {
            value += bit;
            break;
        }
        if digit == 2.0 {
            value += bit;
        }
        rest -= digit;
        bit *= 0.5;
        if rest <= 0.0 || bit == 0.0 {
            break;
        }
    }
    value
}

/// The Cantor staircase sampled on a uniform grid, as a comparison curve.
pub fn cantor_samples(grid_size: u64) -> DistributionSamples {
    let m = grid_size as usize;
    let values = (0..=m)
        .map(|i| cantor_staircase(i as f64 / m as f64))
        .collect();
    DistributionSamples {
        params: None,
        grid_size: m,
        values,
        method: Method::Cantor,
        meta: SampleMeta::default(),
    }
}
