//! Adaptive Dormand-Prince 5(4) integration with step-size control.
//!
//! Integration direction follows the sign of `t1 - t0`, so inward radial
//! sweeps are just `t0 > t1`.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum OdeError {
    #[error("step size underflow at t = {t}")]
    StepSizeUnderflow { t: f64 },
    #[error("step budget of {max_steps} exhausted at t = {t}")]
    MaxStepsExceeded { t: f64, max_steps: usize },
    #[error("non-finite state at t = {t}")]
    NonFiniteState { t: f64 },
}

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Upper bound on |step|; 0 disables the cap.
    pub max_step: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rtol: 1e-10,
            atol: 1e-14,
            max_step: 0.0,
            max_steps: 1_000_000,
        }
    }
}

// Dormand-Prince coefficients.
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const C: [f64; 6] = [0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrate `y' = f(t, y)` from `t0` to `t1`, returning the final state.
pub fn integrate<const N: usize, F>(
    f: &F,
    t0: f64,
    t1: f64,
    y0: [f64; N],
    opts: &OdeOptions,
) -> Result<[f64; N], OdeError>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    if t0 == t1 {
        return Ok(y0);
    }
    let dir = (t1 - t0).signum();
    let span = (t1 - t0).abs();
    let cap = if opts.max_step > 0.0 {
        opts.max_step.min(span)
    } else {
        span
    };
    let mut h = (span / 100.0).min(cap);
    let mut t = t0;
    let mut y = y0;
    let mut k = [[0.0; N]; 7];
    for _step in 0..opts.max_steps {
        if (t - t1).abs() < 1e-300 || (t1 - t) * dir <= 0.0 {
            return Ok(y);
        }
        h = h.min((t1 - t).abs()).min(cap);
        if h < 1e-14 * t.abs().max(1.0) {
            return Err(OdeError::StepSizeUnderflow { t });
        }
        let hs = h * dir;
        k[0] = f(t, &y);
        for s in 0..6 {
            let mut ys = y;
            for (i, yi) in ys.iter_mut().enumerate() {
                let mut acc = 0.0;
                for (j, kj) in k.iter().enumerate().take(s + 1) {
                    acc += A[s][j] * kj[i];
                }
                *yi += hs * acc;
            }
            k[s + 1] = f(t + C[s] * hs, &ys);
        }
        let mut y5 = y;
        let mut err_sq = 0.0;
        for i in 0..N {
            let mut acc5 = 0.0;
            let mut acc4 = 0.0;
            for (j, kj) in k.iter().enumerate() {
                acc5 += B5[j] * kj[i];
                acc4 += B4[j] * kj[i];
            }
            y5[i] += hs * acc5;
            let e = hs * (acc5 - acc4);
            let scale = opts.atol + opts.rtol * y[i].abs().max(y5[i].abs());
            err_sq += (e / scale) * (e / scale);
        }
        let err = (err_sq / N as f64).sqrt();
        if err <= 1.0 {
            t += hs;
            y = y5;
            if y.iter().any(|v| !v.is_finite()) {
                return Err(OdeError::NonFiniteState { t });
            }
            let grow = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            h *= grow;
        } else {
            h *= (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
        }
    }
    Err(OdeError::MaxStepsExceeded {
        t,
        max_steps: opts.max_steps,
    })
}

/// Integrate along `nodes` (monotone in either direction), returning the
/// state at every node, including the first.
pub fn integrate_along<const N: usize, F>(
    f: &F,
    nodes: &[f64],
    y0: [f64; N],
    opts: &OdeOptions,
) -> Result<Vec<[f64; N]>, OdeError>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let mut out = Vec::with_capacity(nodes.len());
    let mut y = y0;
    out.push(y);
    for w in nodes.windows(2) {
        y = integrate(f, w[0], w[1], y, opts)?;
        out.push(y);
    }
    Ok(out)
}
