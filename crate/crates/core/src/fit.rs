//! Small least-squares helpers: straight lines and Gaussian decays.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope, from the given per-point sigmas when provided,
    /// otherwise from the residual scatter.
    pub slope_se: f64,
}

/// Ordinary (or inverse-variance weighted) least squares y = a + b x.
pub fn fit_line(x: &[f64], y: &[f64], sigma: Option<&[f64]>) -> Option<LineFit> {
    let n = x.len();
    if n < 2 || y.len() != n || sigma.is_some_and(|s| s.len() != n) {
        return None;
    }
    let w: Vec<f64> = match sigma {
        Some(s) => s.iter().map(|v| if *v > 0.0 { 1.0 / (v * v) } else { 0.0 }).collect(),
        None => vec![1.0; n],
    };
    let sw: f64 = w.iter().sum();
    if sw <= 0.0 {
        return None;
    }
    let mx = x.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() / sw;
    let my = y.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() / sw;
    let sxx: f64 = x.iter().zip(&w).map(|(a, b)| b * (a - mx) * (a - mx)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let sxy: f64 = (0..n).map(|i| w[i] * (x[i] - mx) * (y[i] - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let slope_se = if sigma.is_some() {
        (1.0 / sxx).sqrt()
    } else if n > 2 {
        let rss: f64 = (0..n).map(|i| (y[i] - intercept - slope * x[i]).powi(2)).sum();
        (rss / (n as f64 - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Some(LineFit { slope, intercept, slope_se })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianDecayFit {
    pub offset: f64,
    pub amplitude: f64,
    /// 1/e time of exp(-(t/tau)^2).
    pub tau: f64,
    pub rss: f64,
}

/// Fits y = offset + A exp(-(t/tau)^2) with `offset` held fixed.
/// `amplitude = Some(a)` also pins the amplitude; otherwise it is solved in closed form per tau.
pub fn fit_gaussian_decay(t: &[f64], y: &[f64], offset: f64, amplitude: Option<f64>) -> Option<GaussianDecayFit> {
    if t.len() < 2 || t.len() != y.len() {
        return None;
    }
    let t_max = t.iter().cloned().fold(0.0_f64, f64::max);
    if t_max <= 0.0 {
        return None;
    }
    let eval = |tau: f64| -> (f64, f64) {
        let e: Vec<f64> = t.iter().map(|ti| (-(ti / tau).powi(2)).exp()).collect();
        let a = amplitude.unwrap_or_else(|| {
            let num: f64 = e.iter().zip(y).map(|(ei, yi)| ei * (yi - offset)).sum();
            let den: f64 = e.iter().map(|ei| ei * ei).sum();
            if den > 0.0 { num / den } else { 0.0 }
        });
        let rss = e.iter().zip(y).map(|(ei, yi)| (yi - offset - a * ei).powi(2)).sum();
        (rss, a)
    };
    // coarse log-grid scan, then golden-section refinement in log tau
    let lo = (t_max * 1e-3).ln();
    let hi = (t_max * 1e3).ln();
    let steps = 400;
    let mut best = (f64::INFINITY, lo);
    for k in 0..=steps {
        let u = lo + (hi - lo) * k as f64 / steps as f64;
        let (rss, _) = eval(u.exp());
        if rss < best.0 {
            best = (rss, u);
        }
    }
    let h = (hi - lo) / steps as f64;
    let (mut a, mut b) = (best.1 - h, best.1 + h);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    for _ in 0..100 {
        if eval(c.exp()).0 < eval(d.exp()).0 {
            b = d;
        } else {
            a = c;
        }
        c = b - g * (b - a);
        d = a + g * (b - a);
    }
    let tau = (0.5 * (a + b)).exp();
    let (rss, amp) = eval(tau);
    Some(GaussianDecayFit { offset, amplitude: amp, tau, rss })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_recovers_exact_data() {
        let x: Vec<f64> = (1..=10).map(f64::from).collect();
        let y: Vec<f64> = x.iter().map(|v| 0.26 - 0.0029 * v).collect();
        let f = fit_line(&x, &y, None).unwrap();
        assert!((f.slope + 0.0029).abs() < 1e-12);
        assert!((f.intercept - 0.26).abs() < 1e-12);
        assert!(f.slope_se < 1e-12);
    }

    #[test]
    fn line_rejects_degenerate_input() {
        assert!(fit_line(&[1.0], &[2.0], None).is_none());
        assert!(fit_line(&[1.0, 1.0], &[2.0, 3.0], None).is_none());
    }

    #[test]
    fn gaussian_recovers_exact_data() {
        let t: Vec<f64> = (0..30).map(|k| k as f64 * 40e-6).collect();
        let y: Vec<f64> = t.iter().map(|v| 0.5 + 0.45 * (-(v / 0.9e-3_f64).powi(2)).exp()).collect();
        let f = fit_gaussian_decay(&t, &y, 0.5, None).unwrap();
        assert!((f.tau - 0.9e-3).abs() < 1e-9, "{}", f.tau);
        assert!((f.amplitude - 0.45).abs() < 1e-9);
        let g = fit_gaussian_decay(&t, &y, 0.5, Some(0.45)).unwrap();
        assert!((g.tau - 0.9e-3).abs() < 1e-9);
    }
}
