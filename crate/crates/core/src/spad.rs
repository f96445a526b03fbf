//! Per-detector dead-time state machine, the recovery-efficiency model, and a
//! two-pulse characterization experiment with parameter fitting.
//!
//! The graded recovery curve is
//!
//! ```text
//! E(t') = 1/2 * (1 + erf((t' - tau_d) / tau_2)) * (1 - exp(-t' / tau_3))
//! ```
//!
//! with `t'` the time since the last click, `tau_d` the dead time, `tau_2` the
//! discrimination jitter and `tau_3` the capacitance recharge time. Binary
//! mode is the on/off limit used by the protocol engine.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::export::format_sig6;
use crate::rng::SplitMix64;
use crate::types::Polarization;

/// Detector recovery model after a click.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum DeadTimeModel {
    /// Fully dead for `tau_d`, then fully efficient.
    Binary { tau_d: f64 },
    /// Smooth recovery with discrimination jitter and recharge time.
    Graded { tau_d: f64, tau_2: f64, tau_3: f64 },
}

impl Default for DeadTimeModel {
    fn default() -> Self {
        DeadTimeModel::Binary { tau_d: 2e-6 }
    }
}

impl DeadTimeModel {
    pub fn binary(tau_d: f64) -> Self {
        DeadTimeModel::Binary { tau_d }
    }

    pub fn graded(tau_d: f64, tau_2: f64, tau_3: f64) -> Self {
        DeadTimeModel::Graded {
            tau_d,
            tau_2,
            tau_3,
        }
    }

    pub fn tau_d(&self) -> f64 {
        match *self {
            DeadTimeModel::Binary { tau_d } => tau_d,
            DeadTimeModel::Graded { tau_d, .. } => tau_d,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            DeadTimeModel::Binary { tau_d } => tau_d > 0.0,
            DeadTimeModel::Graded {
                tau_d,
                tau_2,
                tau_3,
            } => tau_d > 0.0 && tau_2 > 0.0 && tau_3 > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(
                "dead-time constants must all be positive".into(),
            ))
        }
    }

    /// Relative detection efficiency a time `t_prime` after a click.
    pub fn relative_efficiency(&self, t_prime: f64) -> Result<f64> {
        if t_prime < 0.0 {
            return Err(Error::Domain(format!(
                "time since click must be non-negative, got {t_prime}"
            )));
        }
        Ok(match *self {
            DeadTimeModel::Binary { tau_d } => {
                if t_prime < tau_d {
                    0.0
                } else {
                    1.0
                }
            }
            DeadTimeModel::Graded {
                tau_d,
                tau_2,
                tau_3,
            } => graded_efficiency(t_prime, tau_d, tau_2, tau_3),
        })
    }
}

fn graded_efficiency(t_prime: f64, tau_d: f64, tau_2: f64, tau_3: f64) -> f64 {
    0.5 * (1.0 + libm::erf((t_prime - tau_d) / tau_2)) * (1.0 - (-t_prime / tau_3).exp())
}

/// Dead-time state of a single detector.
///
/// Owned by exactly one simulation session; the last-click time is
/// monotonically non-decreasing.
#[derive(Debug, Clone)]
pub struct DetectorState {
    id: Polarization,
    last_click: Option<f64>,
    model: DeadTimeModel,
}

impl DetectorState {
    pub fn new(id: Polarization, model: DeadTimeModel) -> Self {
        Self {
            id,
            last_click: None,
            model,
        }
    }

    pub fn id(&self) -> Polarization {
        self.id
    }

    pub fn last_click(&self) -> Option<f64> {
        self.last_click
    }

    /// Whether the detector can fire at time `t`. `draw` is a uniform
    /// variate in `[0, 1)` consumed only by the graded model, so the answer
    /// is deterministic given the draw.
    pub fn is_active(&self, t: f64, draw: f64) -> Result<bool> {
        let Some(last) = self.last_click else {
            return Ok(true);
        };
        if t < last {
            return Err(Error::Domain(format!(
                "query time {t} precedes last click at {last}"
            )));
        }
        match self.model {
            DeadTimeModel::Binary { tau_d } => Ok(t - last >= tau_d),
            DeadTimeModel::Graded { .. } => Ok(draw < self.model.relative_efficiency(t - last)?),
        }
    }

    pub fn register_click(&mut self, t: f64) -> Result<()> {
        if let Some(last) = self.last_click {
            if t < last {
                return Err(Error::Domain(format!(
                    "click at {t} precedes last click at {last}"
                )));
            }
        }
        self.last_click = Some(t);
        Ok(())
    }
}

/// Two-pulse dead-time characterization: a click at t = 0, then a detection
/// opportunity at each delay. Returns `(delay, observed relative efficiency)`
/// per delay. Trials are Bernoulli in the recovery curve, so the success
/// fraction is already normalized the way the measurement normalizes to its
/// late-delay value.
pub fn simulate_two_pulse_scan(
    model: DeadTimeModel,
    delays: &[f64],
    trials_per_delay: u64,
    seed: u64,
) -> Result<Vec<(f64, f64)>> {
    model.validate()?;
    if delays.is_empty() {
        return Err(Error::InvalidConfig("delay list must be non-empty".into()));
    }
    if trials_per_delay == 0 {
        return Err(Error::InvalidConfig(
            "trials_per_delay must be at least 1".into(),
        ));
    }
    delays
        .iter()
        .enumerate()
        .map(|(j, &delay)| {
            let efficiency = model.relative_efficiency(delay)?;
            let mut rng = SplitMix64::substream(seed, j as u64);
            let successes = (0..trials_per_delay)
                .filter(|_| rng.bernoulli(efficiency))
                .count();
            Ok((delay, successes as f64 / trials_per_delay as f64))
        })
        .collect()
}

/// Result of fitting the graded recovery curve to scan data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoveryFit {
    pub tau_d: f64,
    pub tau_2: f64,
    pub tau_3: f64,
    /// Sum of squared residuals at the fitted parameters.
    pub residual: f64,
}

const FIT_MAX_SWEEPS: usize = 200;
const FIT_RELATIVE_TOL: f64 = 1e-6;

/// Least-squares fit of the graded recovery curve to `(delay, efficiency)`
/// samples: a coarse logarithmic grid over `(tau_d, tau_2, tau_3)` followed
/// by coordinate descent until the relative parameter change drops below
/// 1e-6 or 200 sweeps. Deterministic; no external solver.
pub fn fit_recovery_curve(samples: &[(f64, f64)]) -> Result<RecoveryFit> {
    if samples.len() < 4 {
        return Err(Error::Fit(format!(
            "need at least 4 samples, got {}",
            samples.len()
        )));
    }
    let d_min = samples.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
    let d_max = samples
        .iter()
        .map(|s| s.0)
        .fold(f64::NEG_INFINITY, f64::max);
    if d_min.is_nan() || d_min <= 0.0 || !d_max.is_finite() {
        return Err(Error::Fit("delays must be positive and finite".into()));
    }
    if d_min == d_max {
        return Err(Error::Fit("degenerate scan: all delays equal".into()));
    }
    let e_min = samples.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);
    let e_max = samples
        .iter()
        .map(|s| s.1)
        .fold(f64::NEG_INFINITY, f64::max);
    let midpoint = 0.5 * (e_min + e_max);
    let below = samples.iter().any(|s| s.1 < midpoint);
    let above = samples.iter().any(|s| s.1 > midpoint);
    if !(below && above) {
        return Err(Error::Fit(
            "scan must span delays below and above the efficiency midpoint".into(),
        ));
    }

    let ssr = |p: [f64; 3]| -> f64 {
        samples
            .iter()
            .map(|&(d, e)| {
                let m = graded_efficiency(d, p[0], p[1], p[2]);
                (m - e) * (m - e)
            })
            .sum()
    };

    // Coarse grid. The transition sits inside the scanned delay range, the
    // shape constants may be well below it.
    let tau_d_grid = log_space(d_min, d_max, 24);
    let tau_2_grid = log_space(d_min / 20.0, d_max, 14);
    let tau_3_grid = log_space(d_min / 20.0, d_max, 14);
    let mut best = [tau_d_grid[0], tau_2_grid[0], tau_3_grid[0]];
    let mut best_ssr = f64::INFINITY;
    for &td in &tau_d_grid {
        for &t2 in &tau_2_grid {
            for &t3 in &tau_3_grid {
                let v = ssr([td, t2, t3]);
                if v < best_ssr {
                    best_ssr = v;
                    best = [td, t2, t3];
                }
            }
        }
    }

    // Coordinate descent: golden-section line search in log-space, one
    // parameter at a time, bracket re-centered on the current value.
    for _ in 0..FIT_MAX_SWEEPS {
        let previous = best;
        for k in 0..3 {
            let center = best[k].ln();
            let half_width = 4.0f64.ln();
            best[k] = golden_section(center - half_width, center + half_width, |lnp| {
                let mut p = best;
                p[k] = lnp.exp();
                ssr(p)
            })
            .exp();
        }
        best_ssr = ssr(best);
        let max_rel_change = (0..3)
            .map(|k| ((best[k] - previous[k]) / previous[k]).abs())
            .fold(0.0, f64::max);
        if max_rel_change < FIT_RELATIVE_TOL {
            break;
        }
    }

    Ok(RecoveryFit {
        tau_d: best[0],
        tau_2: best[1],
        tau_3: best[2],
        residual: best_ssr,
    })
}

fn log_space(min: f64, max: f64, steps: usize) -> Vec<f64> {
    let ln_min = min.ln();
    let step = (max.ln() - ln_min) / (steps as f64 - 1.0);
    (0..steps)
        .map(|i| (ln_min + step * i as f64).exp())
        .collect()
}

fn golden_section(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > 1e-12 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    0.5 * (lo + hi)
}

/// Scan results as CSV with columns `delay_s,efficiency`.
pub fn scan_csv(samples: &[(f64, f64)]) -> String {
    let mut out = String::from("delay_s,efficiency\n");
    for &(d, e) in samples {
        out.push_str(&format_sig6(d));
        out.push(',');
        out.push_str(&format_sig6(e));
        out.push('\n');
    }
    out
}
