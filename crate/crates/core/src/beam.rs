//! Analog beamformer design for a two-user NOMA group.
//!
//! The transmit beam is steered to the strong user. Its width is then set by
//! the number of active antennas: the full array when the weak user already
//! falls inside half of the narrowest half-power beamwidth, otherwise the
//! largest count whose half beamwidth still covers `|ψ₁₂|`, i.e.
//! `G = min(N_BS, ⌊0.891π / |ψ₁₂|⌋)`.

use std::f64::consts::PI;

use crate::array::{cbf_weights, BeamformerWeights, PhaseDifference, UlaSpec};
use crate::channel::{ChannelRealization, UserPairScenario};
use crate::{Result, HALF_POWER_CONSTANT};

/// Transmit analog beam chosen for a user pair.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamDesign {
    pub main_direction: f64,
    pub active_count: usize,
    pub main_lobe_response: f64,
    pub tx_weights: BeamformerWeights,
}

/// `2π (d/λ) (cos θ₁ - cos θ₂)`.
pub fn pair_phase_difference(theta1: f64, theta2: f64, spacing: f64) -> Result<PhaseDifference> {
    PhaseDifference::between(theta1, theta2, spacing)
}

/// Half of the full-array half-power beamwidth, `0.891π / N_BS`.
pub fn no_control_threshold(n_bs: usize) -> f64 {
    HALF_POWER_CONSTANT * PI / n_bs as f64
}

/// `⌊0.891π / |ψ|⌋`, saturating at `u64::MAX` as `|ψ| → 0`.
///
/// Quotients within a few ulps of an integer are snapped to it so that the
/// threshold `|ψ| = 0.891π / N` maps back to exactly `N`.
pub fn beamwidth_limited_count(psi_abs: f64) -> u64 {
    let x = HALF_POWER_CONSTANT * PI / psi_abs;
    if !x.is_finite() || x >= u64::MAX as f64 {
        return u64::MAX;
    }
    let nearest = x.round();
    if (x - nearest).abs() <= 4.0 * f64::EPSILON * x {
        nearest as u64
    } else {
        x.floor() as u64
    }
}

/// Main-lobe response `min(N_BS, ⌊0.891π / |ψ₁₂|⌋)` without the lower clamp;
/// can be zero for very separated users.
pub fn optimal_main_lobe_response(psi12: PhaseDifference, n_bs: usize) -> usize {
    if psi12.abs() <= no_control_threshold(n_bs) {
        return n_bs;
    }
    beamwidth_limited_count(psi12.abs()).min(n_bs as u64) as usize
}

/// Number of active antennas, clamped to `[1, N_BS]`.
pub fn select_active_count(psi12: PhaseDifference, n_bs: usize) -> usize {
    optimal_main_lobe_response(psi12, n_bs).max(1)
}

/// CBF toward the strong user's LOS departure angle with a beamwidth wide
/// enough to cover the weak user.
pub fn design_tx_beamformer(scenario: &UserPairScenario, spec_bs: &UlaSpec) -> Result<BeamDesign> {
    let main_direction = scenario.user1().los.aod;
    let active_count = select_active_count(scenario.psi12(), spec_bs.num_antennas());
    let tx_weights = cbf_weights(main_direction, active_count, spec_bs)?;
    Ok(BeamDesign {
        main_direction,
        active_count,
        main_lobe_response: active_count as f64,
        tx_weights,
    })
}

/// Full-aperture receive beam matched to the user's LOS arrival angle.
pub fn design_rx_beamformer(
    realization: &ChannelRealization,
    spec_ue: &UlaSpec,
) -> Result<BeamformerWeights> {
    cbf_weights(realization.los.aoa, spec_ue.num_antennas(), spec_ue)
}
