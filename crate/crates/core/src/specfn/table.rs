use alloc::vec::Vec;
use core::f64::consts::PI;

use super::mittag_leffler::ml_raw;
use crate::error::Result;

const DEGREE: usize = 24;
const MAX_PIECES: usize = 256;
const TAIL_TOL: f64 = 2e-15;

/// Piecewise-Chebyshev interpolant of x ↦ E_{α,β}(−x) on [0, x_max], for
/// callers that evaluate one (α, β) pair many times. Panels are the octaves
/// [0,1], [1,2], [2,4], …, each split uniformly until the trailing Chebyshev
/// coefficients drop below ~1e-15 of the panel scale. Arguments outside the
/// tabulated range are evaluated directly.
#[derive(Clone, Debug)]
pub struct MlTable {
    alpha: f64,
    beta: f64,
    x_max: f64,
    octaves: Vec<Octave>,
}

#[derive(Clone, Debug)]
struct Octave {
    lo: f64,
    width: f64,
    pieces: Vec<[f64; DEGREE + 1]>,
}

fn chebyshev_fit(f: &mut dyn FnMut(f64) -> Result<f64>, lo: f64, hi: f64) -> Result<[f64; DEGREE + 1]> {
    let n = DEGREE + 1;
    let mut values = [0.0; DEGREE + 1];
    for (j, v) in values.iter_mut().enumerate() {
        let t = libm::cos(PI * (j as f64 + 0.5) / n as f64);
        *v = f(0.5 * (lo + hi) + 0.5 * (hi - lo) * t)?;
    }
    let mut coeffs = [0.0; DEGREE + 1];
    for (k, c) in coeffs.iter_mut().enumerate() {
        let mut s = 0.0;
        for (j, v) in values.iter().enumerate() {
            s += v * libm::cos(PI * k as f64 * (j as f64 + 0.5) / n as f64);
        }
        *c = 2.0 * s / n as f64;
    }
    coeffs[0] *= 0.5;
    Ok(coeffs)
}

fn clenshaw(coeffs: &[f64; DEGREE + 1], t: f64) -> f64 {
    let (mut b1, mut b2) = (0.0, 0.0);
    for c in coeffs.iter().skip(1).rev() {
        let b0 = 2.0 * t * b1 - b2 + c;
        b2 = b1;
        b1 = b0;
    }
    t * b1 - b2 + coeffs[0]
}

impl MlTable {
    pub fn new(alpha: f64, beta: f64, x_max: f64) -> Result<Self> {
        let mut octaves = Vec::new();
        if alpha != 1.0 {
            let mut f = |x: f64| ml_raw(alpha, beta, -x);
            let mut lo = 0.0;
            let mut hi = 1.0;
            loop {
                let scale = f(lo)?.abs().max(f(hi)?.abs()).max(f(0.5 * (lo + hi))?.abs());
                let mut pieces_n = 1usize;
                let pieces = loop {
                    let width = (hi - lo) / pieces_n as f64;
                    let mut pieces = Vec::with_capacity(pieces_n);
                    let mut ok = true;
                    let last_try = pieces_n >= MAX_PIECES;
                    for i in 0..pieces_n {
                        let a = lo + width * i as f64;
                        let c = chebyshev_fit(&mut f, a, a + width)?;
                        if !last_try && c[DEGREE].abs() + c[DEGREE - 1].abs() > TAIL_TOL * scale {
                            ok = false;
                            break;
                        }
                        pieces.push(c);
                    }
                    if ok {
                        break pieces;
                    }
                    pieces_n *= 2;
                };
                octaves.push(Octave { lo, width: (hi - lo) / pieces.len() as f64, pieces });
                if hi >= x_max {
                    break;
                }
                lo = hi;
                hi *= 2.0;
            }
        }
        Ok(MlTable { alpha, beta, x_max, octaves })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// E_{α,β}(−x).
    pub fn eval_neg(&self, x: f64) -> Result<f64> {
        if self.octaves.is_empty() || !(x >= 0.0) || x > self.x_max {
            return ml_raw(self.alpha, self.beta, -x);
        }
        let idx = if x < 1.0 {
            0
        } else {
            let (_, e) = libm::frexp(x);
            (e as usize).min(self.octaves.len() - 1)
        };
        let oct = &self.octaves[idx];
        let k = (((x - oct.lo) / oct.width) as usize).min(oct.pieces.len() - 1);
        let a = oct.lo + oct.width * k as f64;
        let t = (2.0 * (x - a) / oct.width - 1.0).clamp(-1.0, 1.0);
        Ok(clenshaw(&oct.pieces[k], t))
    }
}
