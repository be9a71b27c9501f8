//! Least-squares rate fitting on log-log axes, with optional averaging of
//! squared series over fixed log-time windows (for norms that oscillate with
//! a known period in log t).

use thiserror::Error;

/// Result of a power-law fit `value ~ t^exponent` on a window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    pub exponent: f64,
    /// RMS residual of the linear fit in log-log coordinates.
    pub residual: f64,
    pub window: (f64, f64),
    pub samples: usize,
}

#[derive(Debug, Error, PartialEq)]
pub enum FitError {
    #[error("need at least 8 samples in the window, got {0}")]
    TooFewSamples(usize),
    #[error("non-positive value {value} at t = {t} cannot be log-fitted")]
    NonPositive { t: f64, value: f64 },
    #[error("non-positive time {0} cannot be log-fitted")]
    NonPositiveTime(f64),
}

/// Plain linear least squares of `ys` on `xs`; returns (slope, intercept,
/// rms residual).
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let mut ss = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        let r = y - slope * x - intercept;
        ss += r * r;
    }
    (slope, intercept, (ss / n).sqrt())
}

/// Fits `log(value) = exponent * log(t) + c` over samples with
/// `window.0 <= t <= window.1`. Requires at least 8 in-window samples, all
/// positive.
pub fn decay_fit(series: &[(f64, f64)], window: (f64, f64)) -> Result<RateFit, FitError> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &(t, v) in series {
        if t < window.0 || t > window.1 {
            continue;
        }
        if t <= 0.0 {
            return Err(FitError::NonPositiveTime(t));
        }
        if v <= 0.0 {
            return Err(FitError::NonPositive { t, value: v });
        }
        xs.push(t.ln());
        ys.push(v.ln());
    }
    if xs.len() < 8 {
        return Err(FitError::TooFewSamples(xs.len()));
    }
    let (slope, _, residual) = linear_fit(&xs, &ys);
    Ok(RateFit {
        exponent: slope,
        residual,
        window,
        samples: xs.len(),
    })
}

/// Replaces each sample of `series` (assumed sampled at increasing t > 0)
/// with the trapezoid average of `value^2` over the centered log-t window of
/// total width `log_width`, then takes square roots. Samples whose window
/// does not fit inside the sampled range are dropped. Used to remove a known
/// oscillation of period `log_width` in log t before rate fitting.
pub fn log_window_rms(series: &[(f64, f64)], log_width: f64) -> Vec<(f64, f64)> {
    let n = series.len();
    if n < 2 {
        return Vec::new();
    }
    let lnt: Vec<f64> = series.iter().map(|s| s.0.ln()).collect();
    let sq: Vec<f64> = series.iter().map(|s| s.1 * s.1).collect();
    let half = 0.5 * log_width;
    let mut out = Vec::new();
    for i in 0..n {
        let lo = lnt[i] - half;
        let hi = lnt[i] + half;
        if lo < lnt[0] || hi > lnt[n - 1] {
            continue;
        }
        // Trapezoid integral of sq over [lo, hi] in log t, with linear
        // interpolation at the window edges.
        let mut j = lnt.partition_point(|&x| x < lo);
        // sample at the left edge
        let interp = |a: usize, b: usize, x: f64| -> f64 {
            let w = (x - lnt[a]) / (lnt[b] - lnt[a]);
            sq[a] * (1.0 - w) + sq[b] * w
        };
        let mut prev_x = lo;
        let mut prev_y = if j == 0 { sq[0] } else { interp(j - 1, j, lo) };
        let mut acc = 0.0;
        while j < n && lnt[j] <= hi {
            acc += 0.5 * (prev_y + sq[j]) * (lnt[j] - prev_x);
            prev_x = lnt[j];
            prev_y = sq[j];
            j += 1;
        }
        if prev_x < hi && j < n {
            let y_hi = interp(j - 1, j, hi);
            acc += 0.5 * (prev_y + y_hi) * (hi - prev_x);
        }
        out.push((series[i].0, (acc / log_width).max(0.0).sqrt()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geomspace(a: f64, b: f64, n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| a * (b / a).powf(i as f64 / (n - 1) as f64))
            .collect()
    }

    #[test]
    fn exact_power_law() {
        let series: Vec<(f64, f64)> = geomspace(1.0, 100.0, 50)
            .into_iter()
            .map(|t| (t, t.powi(-2)))
            .collect();
        let fit = decay_fit(&series, (1.0, 100.0)).unwrap();
        assert!(
            (fit.exponent + 2.0).abs() < 1e-10,
            "exponent = {}",
            fit.exponent
        );
        assert!(fit.residual < 1e-10);
    }

    #[test]
    fn wobbly_power_law() {
        // value = c t^-3 (1 + 0.1 sin log t): slope recovered to 0.05.
        let series: Vec<(f64, f64)> = geomspace(1.0, 1000.0, 200)
            .into_iter()
            .map(|t| (t, 7.0 * t.powi(-3) * (1.0 + 0.1 * t.ln().sin())))
            .collect();
        let fit = decay_fit(&series, (1.0, 1000.0)).unwrap();
        assert!(
            (fit.exponent + 3.0).abs() < 0.05,
            "exponent = {}",
            fit.exponent
        );
    }

    #[test]
    fn constant_series_zero_exponent() {
        let series: Vec<(f64, f64)> = geomspace(1.0, 50.0, 30)
            .into_iter()
            .map(|t| (t, 4.2))
            .collect();
        let fit = decay_fit(&series, (1.0, 50.0)).unwrap();
        assert!(fit.exponent.abs() < 1e-12, "exponent = {}", fit.exponent);
    }

    #[test]
    fn rejects_bad_input() {
        let few: Vec<(f64, f64)> = vec![(1.0, 1.0); 5];
        assert!(matches!(
            decay_fit(&few, (0.5, 2.0)),
            Err(FitError::TooFewSamples(5))
        ));
        let mut series: Vec<(f64, f64)> = geomspace(1.0, 10.0, 20)
            .into_iter()
            .map(|t| (t, 1.0 / t))
            .collect();
        series[3].1 = 0.0;
        assert!(matches!(
            decay_fit(&series, (1.0, 10.0)),
            Err(FitError::NonPositive { .. })
        ));
    }

    #[test]
    fn window_rms_damps_known_oscillation() {
        // y^2 = t^-1 (1 + cos(2 ln t)) has period pi in ln t. Averaging over
        // one period damps the oscillation by |1/(-1+2i)| = 1/sqrt(5) (the
        // power-law factor inside the window breaks exact cancellation), so
        // the fitted slope lands near -1/2 but not exactly on it; without
        // smoothing the raw fit is far less stable.
        let period = std::f64::consts::PI;
        let series: Vec<(f64, f64)> = geomspace(1.0, 1e4, 800)
            .into_iter()
            .map(|t| {
                let y2 = (1.0 + (2.0 * t.ln()).cos()) / t;
                (t, y2.sqrt())
            })
            .collect();
        let smooth = log_window_rms(&series, period);
        assert!(smooth.len() > 100, "smoothed len = {}", smooth.len());
        let fit = decay_fit(&smooth, (10.0, 2000.0)).unwrap();
        assert!(
            (fit.exponent + 0.5).abs() < 0.05,
            "exponent = {}",
            fit.exponent
        );
        // the damped oscillation leaves an RMS log-residual of about
        // 0.5 * rms(ln(1 + 0.447 cos)) ~ 0.17
        assert!(fit.residual < 0.25, "residual = {}", fit.residual);
        // the unsmoothed series grazes zero inside the window, so its direct
        // fit is far noisier than the smoothed one
        let raw = decay_fit(&series, (10.0, 2000.0)).unwrap();
        assert!(raw.residual > 4.0 * fit.residual, "raw residual = {}", raw.residual);
    }
}
