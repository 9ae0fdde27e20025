//! Achievable rates of the NOMA group and of the TDMA baseline.
//!
//! Finite-array rates use the effective scalar channels `h̃_k = v_kᴴ H_k w`.
//! The large-array asymptotes keep only the LOS amplitudes:
//!
//! * NOMA: `log₂(ρ p_BS |α₁|² N_UE G)` with `G = min(N_BS, ⌊0.891π/|ψ₁₂|⌋)`
//! * TDMA: `log₂(ρ p_BS |α₁| |α₂| N_UE N_BS)`
//!
//! so NOMA wins exactly when `α₁₂ G ≥ N_BS`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::array::{BeamformerWeights, PhaseDifference};
use crate::beam::{no_control_threshold, select_active_count};
use crate::channel::{ChannelMatrix, ScenarioConfig};
use crate::{Error, Result, HALF_POWER_CONSTANT};

/// Transmit powers and noise level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    tx_power: f64,
    p1: f64,
    p2: f64,
    inv_noise: f64,
}

impl LinkBudget {
    pub fn new(tx_power: f64, p1: f64, p2: f64, noise_power: f64) -> Result<Self> {
        if !(tx_power > 0.0 && noise_power > 0.0 && tx_power.is_finite()) {
            return Err(Error::domain("powers must be positive"));
        }
        if !(p1 >= 0.0 && p2 >= 0.0) || p1 + p2 > tx_power * (1.0 + 1e-12) {
            return Err(Error::domain(format!(
                "power split ({p1}, {p2}) exceeds budget {tx_power}"
            )));
        }
        Ok(Self {
            tx_power,
            p1,
            p2,
            inv_noise: 1.0 / noise_power,
        })
    }

    /// `p₁ = p₂ = p_BS / 2`.
    pub fn equal_power(tx_power: f64, noise_power: f64) -> Result<Self> {
        Self::new(tx_power, tx_power / 2.0, tx_power / 2.0, noise_power)
    }

    pub fn from_scenario(cfg: &ScenarioConfig) -> Result<Self> {
        Self::equal_power(cfg.tx_power_w(), cfg.noise_power_w())
    }

    pub fn tx_power(&self) -> f64 {
        self.tx_power
    }

    pub fn p1(&self) -> f64 {
        self.p1
    }

    pub fn p2(&self) -> f64 {
        self.p2
    }

    pub fn inv_noise(&self) -> f64 {
        self.inv_noise
    }

    pub fn noise_power(&self) -> f64 {
        1.0 / self.inv_noise
    }

    /// Same split with the noise scaled down by `factor` (SNR up by `factor`).
    pub fn with_snr_boost(&self, factor: f64) -> Self {
        Self {
            inv_noise: self.inv_noise * factor,
            ..*self
        }
    }
}

/// Effective scalar channels of the strong (1) and weak (2) user.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectivePair {
    pub h1: Complex64,
    pub h2: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Noma,
    Tdma,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub scheme: Scheme,
    pub rate_user1: f64,
    pub rate_user2: f64,
    pub sum_rate: f64,
    /// The weak user's effective channel exceeded the strong user's, so the
    /// SIC order was swapped.
    pub decoding_order_reversed: bool,
    pub noma_group_formed: bool,
}

impl RateReport {
    fn new(scheme: Scheme, rate_user1: f64, rate_user2: f64, reversed: bool) -> Self {
        Self {
            scheme,
            rate_user1,
            rate_user2,
            sum_rate: rate_user1 + rate_user2,
            decoding_order_reversed: reversed,
            noma_group_formed: scheme == Scheme::Noma,
        }
    }
}

/// `vᴴ H w`.
pub fn effective_channel(
    rx: &BeamformerWeights,
    h: &ChannelMatrix,
    tx: &BeamformerWeights,
) -> Result<Complex64> {
    if rx.len() != h.rows() || tx.len() != h.cols() {
        return Err(Error::domain(format!(
            "cannot form vᴴHw with |v|={}, H {}x{}, |w|={}",
            rx.len(),
            h.rows(),
            h.cols(),
            tx.len()
        )));
    }
    let active = tx.active_count();
    let w = &tx.as_slice()[..active];
    Ok(rx
        .as_slice()
        .iter()
        .enumerate()
        .map(|(r, v)| {
            let hw: Complex64 = h.row(r)[..active].iter().zip(w).map(|(a, b)| a * b).sum();
            v.conj() * hw
        })
        .sum())
}

/// Two-user downlink NOMA with SIC at whichever user has the larger
/// effective channel.
pub fn noma_sum_rate(pair: &EffectivePair, budget: &LinkBudget) -> RateReport {
    let rho = budget.inv_noise;
    let (p1, p2) = (budget.p1, budget.p2);
    let g1 = pair.h1.norm_sqr();
    let g2 = pair.h2.norm_sqr();
    if pair.h1.norm() >= pair.h2.norm() {
        let r1 = (1.0 + rho * p1 * g1).log2();
        let r2 = (1.0 + rho * p2 * g2 / (rho * p1 * g2 + 1.0)).log2();
        RateReport::new(Scheme::Noma, r1, r2, false)
    } else {
        let r2 = (1.0 + rho * p2 * g2).log2();
        let r1 = (1.0 + rho * p1 * g1 / (rho * p2 * g1 + 1.0)).log2();
        RateReport::new(Scheme::Noma, r1, r2, true)
    }
}

/// Equal time sharing; each `h_k` is the user's effective channel under its
/// own full-power slot.
pub fn tdma_sum_rate(pair: &EffectivePair, budget: &LinkBudget) -> RateReport {
    let snr = budget.inv_noise * budget.tx_power;
    let r1 = 0.5 * (1.0 + snr * pair.h1.norm_sqr()).log2();
    let r2 = 0.5 * (1.0 + snr * pair.h2.norm_sqr()).log2();
    RateReport::new(Scheme::Tdma, r1, r2, false)
}

/// Main-lobe response used by the asymptotic analysis: the designed active
/// antenna count.
fn asymptotic_main_lobe(psi12: PhaseDifference, n_bs: usize) -> f64 {
    select_active_count(psi12, n_bs) as f64
}

/// Large-array NOMA sum-rate `log₂(ρ p_BS |α₁|² N_UE G)`.
pub fn asymptotic_noma_sum_rate(
    alpha1_mag: f64,
    psi12: PhaseDifference,
    n_bs: usize,
    cfg: &ScenarioConfig,
) -> Result<f64> {
    if !(alpha1_mag > 0.0) {
        return Err(Error::domain("LOS amplitude must be positive"));
    }
    let g = asymptotic_main_lobe(psi12, n_bs);
    Ok((cfg.inv_noise() * cfg.tx_power_w() * alpha1_mag * alpha1_mag * cfg.n_ue as f64 * g).log2())
}

/// Large-array TDMA sum-rate `log₂(ρ p_BS |α₁| |α₂| N_UE N_BS)`.
pub fn asymptotic_tdma_sum_rate(
    alpha1_mag: f64,
    alpha2_mag: f64,
    n_bs: usize,
    cfg: &ScenarioConfig,
) -> Result<f64> {
    if !(alpha1_mag > 0.0 && alpha2_mag > 0.0) {
        return Err(Error::domain("LOS amplitudes must be positive"));
    }
    Ok((cfg.inv_noise()
        * cfg.tx_power_w()
        * alpha1_mag
        * alpha2_mag
        * cfg.n_ue as f64
        * n_bs as f64)
        .log2())
}

fn check_ratio(alpha12: f64) -> Result<()> {
    if alpha12 >= 1.0 && alpha12.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "gain ratio must be >= 1 (strong user first), got {alpha12}"
        )))
    }
}

/// `α₁₂ · G ≥ N_BS`: NOMA beats TDMA in the large-array limit.
pub fn sufficient_condition(alpha12: f64, psi12: PhaseDifference, n_bs: usize) -> Result<bool> {
    check_ratio(alpha12)?;
    Ok(alpha12 * asymptotic_main_lobe(psi12, n_bs) >= n_bs as f64)
}

/// `log₂(α₁₂ G / N_BS)`, the asymptotic NOMA-over-TDMA gain.
pub fn asymptotic_rate_gain(alpha12: f64, psi12: PhaseDifference, n_bs: usize) -> Result<f64> {
    check_ratio(alpha12)?;
    Ok((alpha12 * asymptotic_main_lobe(psi12, n_bs) / n_bs as f64).log2())
}

/// Rule deciding whether a pair is served as a NOMA group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeasibilityPolicy {
    /// Weak user inside half the (controlled) half-power beamwidth.
    Coverage,
    /// Asymptotic NOMA gain over TDMA is nonnegative.
    Gain,
    /// Weak user inside half the full-array half-power beamwidth.
    CoverageNoControl,
}

impl FeasibilityPolicy {
    pub fn as_str(self) -> &'static str {
        match self {
            FeasibilityPolicy::Coverage => "coverage",
            FeasibilityPolicy::Gain => "gain",
            FeasibilityPolicy::CoverageNoControl => "coverage_no_control",
        }
    }
}

impl std::fmt::Display for FeasibilityPolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn noma_group_feasible(
    psi12: PhaseDifference,
    n_bs: usize,
    policy: FeasibilityPolicy,
    alpha12: f64,
) -> Result<bool> {
    match policy {
        FeasibilityPolicy::CoverageNoControl => Ok(psi12.abs() <= no_control_threshold(n_bs)),
        FeasibilityPolicy::Coverage => {
            let active = select_active_count(psi12, n_bs);
            Ok(psi12.abs() <= HALF_POWER_CONSTANT * std::f64::consts::PI / active as f64)
        }
        FeasibilityPolicy::Gain => sufficient_condition(alpha12, psi12, n_bs),
    }
}
