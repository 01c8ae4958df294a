//! Adaptive Gauss–Kronrod quadrature (scalar and vector valued) and
//! Gauss–Legendre rules.
//!
//! The 15-point Kronrod extension of the 7-point Gauss rule never samples the
//! interval endpoints, so integrands with integrable endpoint singularities can
//! be handed over directly; bisection concentrates work next to the singular end.
//! Singular points should sit at (or be mapped to) zero, where floating-point
//! resolution allows the bisection to go deep enough.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Stopping rule for the adaptive integrators.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_subdivisions: usize,
}

impl Tolerance {
    pub const fn new(abs: f64, rel: f64) -> Self {
        Tolerance { abs, rel, max_subdivisions: 2000 }
    }

    pub const fn with_max_subdivisions(mut self, n: usize) -> Self {
        self.max_subdivisions = n;
        self
    }

    fn target(&self, value: f64) -> f64 {
        let r = self.rel * value.abs();
        if r > self.abs {
            r
        } else {
            self.abs
        }
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance::new(1e-14, 1e-11)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

struct Panel {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

fn kronrod<F: FnMut(f64) -> f64>(f: &mut F, lo: f64, hi: f64) -> (f64, f64) {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        k += WGK[j] * pair;
        if j % 2 == 1 {
            g += WG[j / 2] * pair;
        }
    }
    (k * half, ((k - g) * half).abs())
}

/// Integrates `f` over the union of consecutive intervals defined by
/// `breakpoints` (at least two, increasing).
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    breakpoints: &[f64],
    tol: Tolerance,
) -> Result<Estimate> {
    let mut panels: Vec<Panel> = Vec::with_capacity(64);
    for w in breakpoints.windows(2) {
        if w[1] > w[0] {
            let (value, error) = kronrod(&mut f, w[0], w[1]);
            panels.push(Panel { lo: w[0], hi: w[1], value, error });
        }
    }
    let mut evaluations = 15 * panels.len();
    loop {
        let (mut value, mut error) = (0.0, 0.0);
        let mut worst = 0;
        for (i, p) in panels.iter().enumerate() {
            value += p.value;
            error += p.error;
            if p.error > panels[worst].error {
                worst = i;
            }
        }
        let estimate = Estimate { value, error, evaluations };
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::Quadrature { what: "adaptive quadrature", estimate: value, error });
        }
        if error <= tol.target(value) || panels.is_empty() {
            return Ok(estimate);
        }
        if panels.len() >= tol.max_subdivisions {
            return Err(Error::Quadrature { what: "adaptive quadrature", estimate: value, error });
        }
        let Panel { lo, hi, .. } = panels.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        if !(mid > lo && mid < hi) {
            // interval exhausted at machine resolution
            return Err(Error::Quadrature { what: "adaptive quadrature", estimate: value, error });
        }
        let (v1, e1) = kronrod(&mut f, lo, mid);
        let (v2, e2) = kronrod(&mut f, mid, hi);
        evaluations += 30;
        panels.push(Panel { lo, hi: mid, value: v1, error: e1 });
        panels.push(Panel { lo: mid, hi, value: v2, error: e2 });
    }
}

struct VecPanel {
    lo: f64,
    hi: f64,
    value: Vec<f64>,
    error: Vec<f64>,
}

fn kronrod_vec<F: FnMut(f64, &mut [f64])>(
    f: &mut F,
    lo: f64,
    hi: f64,
    scratch: &mut [f64],
    value: &mut [f64],
    error: &mut [f64],
) {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let dim = value.len();
    let mut gauss = vec![0.0; dim];
    f(center, scratch);
    for i in 0..dim {
        value[i] = scratch[i] * WGK[7];
        gauss[i] = scratch[i] * WG[3];
    }
    for j in 0..7 {
        let dx = half * XGK[j];
        f(center - dx, scratch);
        let mut pair = scratch.to_vec();
        f(center + dx, scratch);
        for i in 0..dim {
            pair[i] += scratch[i];
            value[i] += WGK[j] * pair[i];
            if j % 2 == 1 {
                gauss[i] += WG[j / 2] * pair[i];
            }
        }
    }
    for i in 0..dim {
        error[i] = ((value[i] - gauss[i]) * half).abs();
        value[i] *= half;
    }
}

/// Vector-valued adaptive integration: every component must meet `tol`
/// individually. `f(t, out)` fills `out` (length `dim`).
pub fn integrate_vec<F: FnMut(f64, &mut [f64])>(
    mut f: F,
    dim: usize,
    breakpoints: &[f64],
    tol: Tolerance,
) -> Result<(Vec<f64>, usize)> {
    let mut scratch = vec![0.0; dim];
    let mut panels: Vec<VecPanel> = Vec::with_capacity(64);
    for w in breakpoints.windows(2) {
        if w[1] > w[0] {
            let mut value = vec![0.0; dim];
            let mut error = vec![0.0; dim];
            kronrod_vec(&mut f, w[0], w[1], &mut scratch, &mut value, &mut error);
            panels.push(VecPanel { lo: w[0], hi: w[1], value, error });
        }
    }
    let mut evaluations = 15 * panels.len();
    let mut total = vec![0.0; dim];
    let mut total_err = vec![0.0; dim];
    loop {
        total.iter_mut().for_each(|v| *v = 0.0);
        total_err.iter_mut().for_each(|v| *v = 0.0);
        for p in &panels {
            for i in 0..dim {
                total[i] += p.value[i];
                total_err[i] += p.error[i];
            }
        }
        let targets: Vec<f64> = total.iter().map(|v| tol.target(*v)).collect();
        let mut ok = true;
        for i in 0..dim {
            if !total[i].is_finite() || !total_err[i].is_finite() {
                return Err(Error::Quadrature {
                    what: "vector quadrature",
                    estimate: total[i],
                    error: total_err[i],
                });
            }
            if total_err[i] > targets[i] {
                ok = false;
            }
        }
        if ok || panels.is_empty() {
            return Ok((total, evaluations));
        }
        if panels.len() >= tol.max_subdivisions {
            let (i, e) = total_err
                .iter()
                .zip(&targets)
                .map(|(e, t)| e / t)
                .enumerate()
                .fold((0, 0.0), |acc, (i, r)| if r > acc.1 { (i, r) } else { acc });
            let _ = e;
            return Err(Error::Quadrature {
                what: "vector quadrature",
                estimate: total[i],
                error: total_err[i],
            });
        }
        // bisect the panel carrying the largest error relative to the per-component target
        let mut worst = 0;
        let mut worst_score = -1.0;
        for (k, p) in panels.iter().enumerate() {
            let score = p
                .error
                .iter()
                .zip(&targets)
                .map(|(e, t)| e / t)
                .fold(0.0, f64::max);
            if score > worst_score {
                worst_score = score;
                worst = k;
            }
        }
        let VecPanel { lo, hi, mut value, mut error } = panels.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        if !(mid > lo && mid < hi) {
            return Err(Error::Quadrature {
                what: "vector quadrature",
                estimate: total[0],
                error: total_err[0],
            });
        }
        let mut value2 = vec![0.0; dim];
        let mut error2 = vec![0.0; dim];
        kronrod_vec(&mut f, lo, mid, &mut scratch, &mut value, &mut error);
        kronrod_vec(&mut f, mid, hi, &mut scratch, &mut value2, &mut error2);
        evaluations += 30;
        panels.push(VecPanel { lo, hi: mid, value, error });
        panels.push(VecPanel { lo: mid, hi, value: value2, error: error2 });
    }
}

/// Gauss–Legendre nodes and weights on [-1, 1] (Newton iteration on P_n).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = (n + 1) / 2;
    let nf = n as f64;
    for i in 0..m {
        let mut x = libm::cos(core::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5));
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else { p1 };
            let pn1 = if n == 0 { 0.0 } else { p0 };
            dp = nf * (x * pn - pn1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Gauss–Legendre rule mapped onto [lo, hi].
pub fn gauss_legendre_on(n: usize, lo: f64, hi: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let c = 0.5 * (lo + hi);
    let h = 0.5 * (hi - lo);
    (x.iter().map(|t| c + h * t).collect(), w.iter().map(|v| v * h).collect())
}
