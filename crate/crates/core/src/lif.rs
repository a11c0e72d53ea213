//! Discrete-time leaky integrate-and-fire neuron.
//!
//! Two membrane-update backends share one threshold/reset/refractory rule:
//!
//! * [`LeakMode::Euler`]: forward-Euler decay,
//!   `ṽ[k+1] = (1 − Δt/τ_m)·v[k] + (Δt/C_m)·(Σ_j w_j·s_j[k] + I_bias)`.
//! * [`LeakMode::FixedLeak`]: the hardware datapath,
//!   `ṽ[k+1] = v[k] + Σ_j w_j·s_j[k] − λ·𝟙{v[k] ≠ 0}`, clamped at zero
//!   by default (an unsigned register cannot go negative).
//!
//! Thresholding is shared: a spike fires when `ṽ ≥ v_th` and the
//! refractory counter is zero; firing (or a running refractory window)
//! resets the potential to zero and reloads the counter.
//!
//! Input sampled at cycle `k` produces the output spike labelled `k+1`.
//! The fixed-leak indicator is evaluated against the pre-update potential
//! `v[k]`; a silent neuron resting at zero never drifts negative.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum LifError {
    #[error("spike vector length {spikes} does not match weight count {weights}")]
    DimensionMismatch { spikes: usize, weights: usize },
    #[error("backend requires {expected} leak mode")]
    WrongLeakMode { expected: &'static str },
    #[error("invalid neuron parameters: {0}")]
    InvalidParams(String),
}

/// What happens when the fixed leak would drive the potential below zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ClampPolicy {
    /// Floor the pre-threshold potential at 0 (hardware register behaviour).
    #[default]
    ClampToZero,
    /// Let the potential go negative.
    AllowNegative,
}

/// Membrane leak backend.
#[derive(Debug, Clone, PartialEq)]
pub enum LeakMode {
    /// Forward-Euler decay with factor `1 − dt/tau_m`.
    Euler { tau_m: f64, c_m: f64, dt: f64 },
    /// Constant per-cycle decrement `lambda`, gated on a nonzero potential.
    FixedLeak { lambda: f64, clamp: ClampPolicy },
}

impl LeakMode {
    pub fn fixed(lambda: f64) -> Self {
        LeakMode::FixedLeak {
            lambda,
            clamp: ClampPolicy::ClampToZero,
        }
    }

    pub fn euler(tau_m: f64, c_m: f64, dt: f64) -> Self {
        LeakMode::Euler { tau_m, c_m, dt }
    }
}

/// Per-neuron constants.
#[derive(Debug, Clone, PartialEq)]
pub struct LifParams {
    /// Firing threshold, compared with `>=`.
    pub v_th: f64,
    /// Refractory length in cycles.
    pub r_ref: u32,
    /// Synaptic weight per input line. Hardware weights are 8-bit.
    pub weights: Vec<u8>,
    /// Tonic drive added to the weighted input sum (Euler mode only).
    pub i_bias: f64,
    pub leak: LeakMode,
}

impl LifParams {
    pub fn new(v_th: f64, r_ref: u32, weights: Vec<u8>, leak: LeakMode) -> Result<Self, LifError> {
        let params = Self {
            v_th,
            r_ref,
            weights,
            i_bias: 0.0,
            leak,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn with_bias(mut self, i_bias: f64) -> Self {
        self.i_bias = i_bias;
        self
    }

    pub fn validate(&self) -> Result<(), LifError> {
        if !self.v_th.is_finite() || self.v_th <= 0.0 {
            return Err(LifError::InvalidParams(format!(
                "threshold must be positive, got {}",
                self.v_th
            )));
        }
        if !self.i_bias.is_finite() {
            return Err(LifError::InvalidParams("bias must be finite".into()));
        }
        match self.leak {
            LeakMode::Euler { tau_m, c_m, dt } => {
                let ratio = dt / tau_m;
                if !ratio.is_finite() || ratio <= 0.0 || ratio > 1.0 {
                    return Err(LifError::InvalidParams(format!(
                        "dt/tau_m must lie in (0, 1], got {ratio}"
                    )));
                }
                if !c_m.is_finite() || c_m <= 0.0 {
                    return Err(LifError::InvalidParams(format!(
                        "capacitance must be positive, got {c_m}"
                    )));
                }
            }
            LeakMode::FixedLeak { lambda, .. } => {
                if !lambda.is_finite() || lambda < 0.0 {
                    return Err(LifError::InvalidParams(format!(
                        "leak step must be non-negative, got {lambda}"
                    )));
                }
            }
        }
        Ok(())
    }

    fn weighted_input(&self, spikes: &[bool]) -> Result<f64, LifError> {
        if spikes.len() != self.weights.len() {
            return Err(LifError::DimensionMismatch {
                spikes: spikes.len(),
                weights: self.weights.len(),
            });
        }
        Ok(self
            .weights
            .iter()
            .zip(spikes)
            .filter(|(_, &s)| s)
            .map(|(&w, _)| w as f64)
            .sum())
    }

    /// Euler pre-threshold update. Pure; errors if the params use the
    /// fixed-leak backend.
    pub fn euler_pre_threshold(&self, state: &LifState, spikes: &[bool]) -> Result<f64, LifError> {
        let LeakMode::Euler { tau_m, c_m, dt } = self.leak else {
            return Err(LifError::WrongLeakMode { expected: "Euler" });
        };
        let drive = self.weighted_input(spikes)? + self.i_bias;
        Ok((1.0 - dt / tau_m) * state.v + (dt / c_m) * drive)
    }

    /// Fixed-leak pre-threshold update. The leak indicator reads the
    /// pre-update potential, so an empty neuron accumulates input without
    /// paying the decrement that cycle.
    pub fn fixed_leak_pre_threshold(
        &self,
        state: &LifState,
        spikes: &[bool],
    ) -> Result<f64, LifError> {
        let LeakMode::FixedLeak { lambda, clamp } = self.leak else {
            return Err(LifError::WrongLeakMode {
                expected: "FixedLeak",
            });
        };
        let sum = self.weighted_input(spikes)?;
        let leak = if state.v != 0.0 { lambda } else { 0.0 };
        let v_tilde = state.v + sum - leak;
        Ok(match clamp {
            ClampPolicy::ClampToZero => v_tilde.max(0.0),
            ClampPolicy::AllowNegative => v_tilde,
        })
    }

    /// Pre-threshold update via whichever backend the params select.
    pub fn pre_threshold(&self, state: &LifState, spikes: &[bool]) -> Result<f64, LifError> {
        match self.leak {
            LeakMode::Euler { .. } => self.euler_pre_threshold(state, spikes),
            LeakMode::FixedLeak { .. } => self.fixed_leak_pre_threshold(state, spikes),
        }
    }

    /// Shared threshold / reset / refractory rule. Total on valid inputs.
    ///
    /// Returns `(y, v, r)` for the next cycle: a spike fires iff
    /// `v_tilde >= v_th` with an idle counter; the potential survives only
    /// when the neuron neither fired nor sits in its refractory window.
    pub fn apply_threshold(&self, v_tilde: f64, r: u32) -> (bool, f64, u32) {
        let y = v_tilde >= self.v_th && r == 0;
        let v = if y || r > 0 { 0.0 } else { v_tilde };
        let r = if y { self.r_ref } else { r.saturating_sub(1) };
        (y, v, r)
    }

    /// One full cycle: membrane update followed by thresholding.
    pub fn step(&self, state: &LifState, spikes: &[bool]) -> Result<LifState, LifError> {
        let v_tilde = self.pre_threshold(state, spikes)?;
        let (y, v, r) = self.apply_threshold(v_tilde, state.r);
        Ok(LifState { v, r, y })
    }
}

/// Mutable neuron dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LifState {
    /// Membrane potential.
    pub v: f64,
    /// Refractory cycles remaining.
    pub r: u32,
    /// Output spike published this cycle.
    pub y: bool,
}

impl LifState {
    pub fn new() -> Self {
        Self::default()
    }
}
