//! Embedded adaptive Runge–Kutta integrator (Dormand–Prince 5(4)).

/// Dormand–Prince tableau.
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
/// 5th-order weights (same as the last A row — FSAL).
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
/// Embedded 4th-order weights.
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integration options: mixed tolerance and step bounds.
#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h_initial: f64,
    pub h_max: f64,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rtol: 1e-10,
            atol: 1e-12,
            h_initial: 1e-3,
            h_max: f64::INFINITY,
        }
    }
}

/// Integration failure: the controller could not make progress (typically a
/// non-finite state, i.e. blow-up).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepCollapse {
    pub t: f64,
}

impl std::fmt::Display for StepCollapse {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "adaptive step size collapsed at t = {}", self.t)
    }
}

impl std::error::Error for StepCollapse {}

/// Advances `y` from `t0` to `t1` (forward or backward) with adaptive steps,
/// calling `rhs(t, y, dy)`. Returns the number of accepted steps.
///
/// The optional `post_step` hook runs after each accepted step with
/// `(t_prev, h, y)` and may rescale the state in place — used to apply exact
/// integrating factors for stiff diagonal parts.
pub fn integrate_adaptive<F, P>(
    rhs: &F,
    t0: f64,
    t1: f64,
    y: &mut [f64],
    opts: &OdeOptions,
    mut post_step: P,
) -> Result<usize, StepCollapse>
where
    F: Fn(f64, &[f64], &mut [f64]),
    P: FnMut(f64, f64, &mut [f64]),
{
    if t0 == t1 {
        return Ok(0);
    }
    let dir = (t1 - t0).signum();
    let n = y.len();
    let mut k = vec![vec![0.0; n]; 7];
    let mut y_stage = vec![0.0; n];
    let mut y5 = vec![0.0; n];
    let mut t = t0;
    let mut h = opts.h_initial.min(opts.h_max).min((t1 - t0).abs()) * dir;
    let mut accepted = 0usize;
    let mut first = true;
    loop {
        if (t - t1) * dir >= 0.0 {
            return Ok(accepted);
        }
        if (t + h - t1) * dir > 0.0 {
            h = t1 - t;
        }
        if first {
            rhs(t, y, &mut k[0]);
            first = false;
        }
        for s in 0..6 {
            for i in 0..n {
                let mut acc = 0.0;
                for (j, kj) in k.iter().enumerate().take(s + 1) {
                    acc += A[s][j] * kj[i];
                }
                y_stage[i] = y[i] + h * acc;
            }
            rhs(t + C[s] * h, &y_stage, &mut k[s + 1]);
        }
        // 5th-order solution and embedded error.
        let mut err: f64 = 0.0;
        for i in 0..n {
            let mut v5 = 0.0;
            let mut v4 = 0.0;
            for j in 0..7 {
                v5 += B5[j] * k[j][i];
                v4 += B4[j] * k[j][i];
            }
            y5[i] = y[i] + h * v5;
            let scale = opts.atol + opts.rtol * y[i].abs().max(y5[i].abs());
            let e = h * (v5 - v4) / scale;
            err += e * e;
        }
        err = (err / n as f64).sqrt();
        if err <= 1.0 {
            let t_prev = t;
            t += h;
            y.copy_from_slice(&y5);
            // FSAL: k7 is the derivative at the new point, but post_step may
            // rescale the state, so recompute lazily next iteration instead.
            post_step(t_prev, h, y);
            rhs(t, y, &mut k[0]);
            accepted += 1;
        }
        // Classic step controller with safety factor; non-finite error
        // estimates (blow-up) force maximal shrinkage until collapse.
        let factor = if !err.is_finite() {
            0.2
        } else if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h = (h * factor).clamp(-opts.h_max, opts.h_max);
        if h == 0.0 || !h.is_finite() || t + h == t {
            return Err(StepCollapse { t });
        }
    }
}

/// Convenience wrapper without a post-step hook.
pub fn integrate<F>(
    rhs: &F,
    t0: f64,
    t1: f64,
    y: &mut [f64],
    opts: &OdeOptions,
) -> Result<usize, StepCollapse>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    integrate_adaptive(rhs, t0, t1, y, opts, |_, _, _| {})
}
