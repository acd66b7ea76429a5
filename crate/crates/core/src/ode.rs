//! Adaptive Dormand-Prince 5(4) integrator for complex-valued linear and
//! nonlinear systems, with the fourth-order continuous extension used to
//! report the solution on a caller-supplied time grid.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub trait OdeSystem {
    fn dim(&self) -> usize;
    fn rhs(&self, t: f64, y: &[Complex64], dy: &mut [Complex64]);
}

// Butcher tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// Difference between the fifth- and fourth-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

// Continuous extension.
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, Copy)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
}

impl Dopri5 {
    /// Mixed relative/absolute tolerance, both set to `tol`.
    pub fn new(tol: f64) -> Self {
        Dopri5 { rtol: tol, atol: tol, max_steps: 10_000_000 }
    }

    /// Integrate from `t_grid[0]` and hand the solution at every grid time to
    /// `observe`. The grid must be strictly increasing.
    pub fn integrate<S, F>(&self, sys: &S, y0: &[Complex64], t_grid: &[f64], mut observe: F) -> Result<Stats>
    where
        S: OdeSystem + ?Sized,
        F: FnMut(f64, &[Complex64]),
    {
        let n = sys.dim();
        if y0.len() != n {
            return Err(Error::Structural(format!("initial state has {} entries, system has {n}", y0.len())));
        }
        if !(self.rtol > 0.0 && self.atol > 0.0) {
            return Err(Error::Argument("tolerances must be positive".into()));
        }
        let Some((&t0, rest)) = t_grid.split_first() else {
            return Ok(Stats::default());
        };
        if t_grid.windows(2).any(|w| !(w[1] > w[0])) || t_grid.iter().any(|t| !t.is_finite()) {
            return Err(Error::Argument("time grid must be finite and strictly increasing".into()));
        }
        observe(t0, y0);
        if rest.is_empty() {
            return Ok(Stats::default());
        }
        let t_end = *t_grid.last().unwrap();

        let zero = Complex64::new(0.0, 0.0);
        let mut y = y0.to_vec();
        let mut y_new = vec![zero; n];
        let mut tmp = vec![zero; n];
        let mut k: Vec<Vec<Complex64>> = (0..7).map(|_| vec![zero; n]).collect();
        let mut dense = vec![zero; n];
        let mut rcont5 = vec![zero; n];

        let mut stats = Stats::default();
        let mut t = t0;
        sys.rhs(t, &y, &mut k[0]);
        stats.rhs_evals += 1;
        let mut h = self.initial_step(sys, t, &y, &k[0], t_end - t0, &mut stats);
        let mut next_out = 1;
        let mut last_rejected = false;

        while t < t_end {
            if stats.accepted + stats.rejected >= self.max_steps {
                return Err(Error::Integration { t_reached: t, reason: "step budget exhausted".into() });
            }
            if h < 1e-14 * t.abs().max(1.0) {
                return Err(Error::Integration { t_reached: t, reason: format!("step size underflow (h = {h:.3e})") });
            }
            let last = t + h >= t_end;
            if last {
                h = t_end - t;
            }

            self.stages(sys, t, h, &y, &mut k, &mut tmp, &mut y_new);
            stats.rhs_evals += 6;

            let mut acc = 0.0;
            for i in 0..n {
                let e = h * (E1 * k[0][i] + E3 * k[2][i] + E4 * k[3][i] + E5 * k[4][i] + E6 * k[5][i] + E7 * k[6][i]);
                let scale = self.atol + self.rtol * y[i].norm().max(y_new[i].norm());
                acc += (e.norm() / scale).powi(2);
            }
            let err = (acc / n.max(1) as f64).sqrt();

            if err <= 1.0 {
                stats.accepted += 1;
                let t_new = if last { t_end } else { t + h };
                let mut have_dense = false;
                while next_out < t_grid.len() && t_grid[next_out] <= t_new {
                    let theta = (t_grid[next_out] - t) / h;
                    if t_grid[next_out] == t_new {
                        observe(t_new, &y_new);
                    } else {
                        if !have_dense {
                            for i in 0..n {
                                rcont5[i] = h
                                    * (D1 * k[0][i] + D3 * k[2][i] + D4 * k[3][i] + D5 * k[4][i] + D6 * k[5][i] + D7 * k[6][i]);
                            }
                            have_dense = true;
                        }
                        interpolate(theta, h, &y, &y_new, &k[0], &k[6], &rcont5, &mut dense);
                        observe(t_grid[next_out], &dense);
                    }
                    next_out += 1;
                }
                t = t_new;
                std::mem::swap(&mut y, &mut y_new);
                k.swap(0, 6);
                let mut factor = (SAFETY * err.max(1e-12).powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR);
                if last_rejected {
                    factor = factor.min(1.0);
                }
                last_rejected = false;
                h *= factor;
            } else {
                stats.rejected += 1;
                last_rejected = true;
                let factor = if err.is_finite() {
                    (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, 1.0)
                } else {
                    MIN_FACTOR
                };
                h *= factor;
            }
        }
        Ok(stats)
    }

    #[allow(clippy::too_many_arguments)]
    fn stages<S: OdeSystem + ?Sized>(
        &self,
        sys: &S,
        t: f64,
        h: f64,
        y: &[Complex64],
        k: &mut [Vec<Complex64>],
        tmp: &mut [Complex64],
        y_new: &mut [Complex64],
    ) {
        let n = y.len();
        for i in 0..n {
            tmp[i] = y[i] + h * A21 * k[0][i];
        }
        sys.rhs(t + C2 * h, tmp, &mut k[1]);
        for i in 0..n {
            tmp[i] = y[i] + h * (A31 * k[0][i] + A32 * k[1][i]);
        }
        sys.rhs(t + C3 * h, tmp, &mut k[2]);
        for i in 0..n {
            tmp[i] = y[i] + h * (A41 * k[0][i] + A42 * k[1][i] + A43 * k[2][i]);
        }
        sys.rhs(t + C4 * h, tmp, &mut k[3]);
        for i in 0..n {
            tmp[i] = y[i] + h * (A51 * k[0][i] + A52 * k[1][i] + A53 * k[2][i] + A54 * k[3][i]);
        }
        sys.rhs(t + C5 * h, tmp, &mut k[4]);
        for i in 0..n {
            tmp[i] = y[i] + h * (A61 * k[0][i] + A62 * k[1][i] + A63 * k[2][i] + A64 * k[3][i] + A65 * k[4][i]);
        }
        sys.rhs(t + h, tmp, &mut k[5]);
        for i in 0..n {
            y_new[i] = y[i] + h * (A71 * k[0][i] + A73 * k[2][i] + A74 * k[3][i] + A75 * k[4][i] + A76 * k[5][i]);
        }
        sys.rhs(t + h, y_new, &mut k[6]);
    }

    fn initial_step<S: OdeSystem + ?Sized>(
        &self,
        sys: &S,
        t: f64,
        y: &[Complex64],
        f0: &[Complex64],
        span: f64,
        stats: &mut Stats,
    ) -> f64 {
        let n = y.len().max(1) as f64;
        let scale = |v: Complex64, yi: Complex64| v.norm() / (self.atol + self.rtol * yi.norm());
        let d0 = (y.iter().map(|&v| scale(v, v).powi(2)).sum::<f64>() / n).sqrt();
        let d1 = (f0.iter().zip(y).map(|(&f, &v)| scale(f, v).powi(2)).sum::<f64>() / n).sqrt();
        let mut h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        h0 = h0.min(span);
        let y1: Vec<Complex64> = y.iter().zip(f0).map(|(&v, &f)| v + h0 * f).collect();
        let mut f1 = vec![Complex64::new(0.0, 0.0); y.len()];
        sys.rhs(t + h0, &y1, &mut f1);
        stats.rhs_evals += 1;
        let d2 = (f1.iter().zip(f0).zip(y).map(|((&a, &b), &v)| scale(a - b, v).powi(2)).sum::<f64>() / n).sqrt() / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        (100.0 * h0).min(h1).min(span)
    }
}

#[allow(clippy::too_many_arguments)]
fn interpolate(
    theta: f64,
    h: f64,
    y: &[Complex64],
    y_new: &[Complex64],
    k1: &[Complex64],
    k7: &[Complex64],
    rcont5: &[Complex64],
    out: &mut [Complex64],
) {
    let theta1 = 1.0 - theta;
    for i in 0..y.len() {
        let diff = y_new[i] - y[i];
        let bspl = h * k1[i] - diff;
        let r4 = diff - h * k7[i] - bspl;
        out[i] = y[i] + theta * (diff + theta1 * (bspl + theta * (r4 + theta1 * rcont5[i])));
    }
}
