//! Piecewise-constant functions of time with a fixed step width.
//!
//! Travel times and arc values are both stored as [`StepProfile`]s. Window `k`
//! covers `[k * step, (k + 1) * step)`; the last window extends to infinity,
//! so a query running past the horizon sees the last stored value.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct StepProfile {
    step: f64,
    values: Vec<f64>,
}

impl StepProfile {
    pub fn new(step: f64, values: Vec<f64>) -> Result<Self> {
        if !(step.is_finite() && step > 0.0) {
            return Err(Error::InvalidProfile(format!(
                "step width must be positive and finite, got {step}"
            )));
        }
        if values.is_empty() {
            return Err(Error::InvalidProfile("profile needs at least one window".into()));
        }
        if let Some((k, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v >= 0.0))
        {
            return Err(Error::InvalidProfile(format!(
                "window {k} has invalid value {v}"
            )));
        }
        Ok(Self { step, values })
    }

    /// A single-window profile.
    pub fn constant(value: f64) -> Result<Self> {
        Self::new(1.0, vec![value])
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn window_count(&self) -> usize {
        self.values.len()
    }

    pub fn horizon(&self) -> f64 {
        self.step * self.values.len() as f64
    }

    /// Checked evaluation: negative (or NaN) times are a domain error.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if t.is_nan() || t < 0.0 {
            return Err(Error::NegativeTime(t));
        }
        Ok(self.at(t))
    }

    /// Unchecked evaluation for hot loops. Callers guarantee `t >= 0`.
    #[inline]
    pub fn at(&self, t: f64) -> f64 {
        debug_assert!(t >= 0.0, "profile evaluated at {t}");
        self.values[self.window_index(t)]
    }

    /// Index of the window containing `t`, clamped to the last window.
    #[inline]
    pub fn window_index(&self, t: f64) -> usize {
        let last = self.values.len() - 1;
        if t <= 0.0 {
            return 0;
        }
        let k = (t / self.step).floor();
        if k >= last as f64 + 1.0 {
            return last;
        }
        // The division may round across a boundary; settle on the window
        // with window_start(k) <= t < window_start(k + 1).
        let mut k = k as usize;
        if k > 0 && self.window_start(k) > t {
            k -= 1;
        } else if self.window_start(k + 1) <= t {
            k += 1;
        }
        k.min(last)
    }

    #[inline]
    pub fn window_start(&self, k: usize) -> f64 {
        k as f64 * self.step
    }

    /// End of window `k`, or `None` for the last (unbounded) window.
    #[inline]
    pub fn window_end(&self, k: usize) -> Option<f64> {
        (k + 1 < self.values.len()).then(|| (k + 1) as f64 * self.step)
    }

    pub fn value(&self, k: usize) -> f64 {
        self.values[k]
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Unweighted mean over the stored windows.
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn is_constant(&self) -> bool {
        self.values.iter().all(|v| *v == self.values[0])
    }

    /// Maximum over the windows that intersect `[from, to]`.
    pub fn max_over(&self, from: f64, to: f64) -> f64 {
        if to < from {
            return 0.0;
        }
        let lo = self.window_index(from.max(0.0));
        let hi = self.window_index(to.max(0.0));
        self.values[lo..=hi].iter().copied().fold(0.0, f64::max)
    }

    /// Single-window profile carrying the mean. Constant profiles are kept
    /// as-is so that their value survives bit-exactly.
    pub fn staticized(&self) -> StepProfile {
        if self.is_constant() {
            return StepProfile {
                step: self.step,
                values: vec![self.values[0]],
            };
        }
        StepProfile {
            step: self.step,
            values: vec![self.mean()],
        }
    }

    /// Collapses a profile whose windows are all equal into one window.
    pub fn compacted(self) -> StepProfile {
        if self.values.len() > 1 && self.is_constant() {
            StepProfile {
                step: self.step,
                values: vec![self.values[0]],
            }
        } else {
            self
        }
    }

    /// Latest departure `t` (at or after time zero) with `t + self(t) <= arrive_by`,
    /// scanning windows downwards from the one just below `arrive_by`.
    ///
    /// Inside window `k` every departure in `[tau_k, min(arrive_by - tt_k, tau_{k+1}))`
    /// works, so the supremum is `min(arrive_by - tt_k, tau_{k+1})`. When it is the
    /// open window end it is not attained and `boundary_eps` is subtracted.
    pub fn latest_departure(&self, arrive_by: f64, boundary_eps: f64) -> Option<f64> {
        if arrive_by <= 0.0 {
            return None;
        }
        let last = self.values.len() - 1;
        let above = (arrive_by / self.step).ceil();
        let mut k = if above - 1.0 >= last as f64 {
            last
        } else {
            (above as usize).saturating_sub(1)
        };
        loop {
            let start = self.window_start(k);
            let tt = self.values[k];
            if start + tt <= arrive_by {
                let mut candidate = (arrive_by - tt).max(start);
                while candidate > start && candidate + tt > arrive_by {
                    candidate = candidate.next_down();
                }
                return Some(match self.window_end(k) {
                    Some(end) if candidate >= end => end - boundary_eps,
                    _ => candidate,
                });
            }
            if k == 0 {
                return None;
            }
            k -= 1;
        }
    }
}
