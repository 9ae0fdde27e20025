//! Uniform linear array geometry and the conventional beamformer (CBF) with a
//! reduced number of active antennas.
//!
//! All angles are measured from the array axis and restricted to `[0, π]`; a
//! ULA cannot tell `θ` from `-θ`. The pattern of a CBF depends only on the
//! phase difference `ψ = 2π (d/λ) (cos θ - cos θ₀)` between the observation
//! direction `θ` and the main direction `θ₀`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result, HALF_POWER_CONSTANT};

/// Below this `|sin(ψ/2)|` the beam response is replaced by its limit.
const SINGULARITY_EPS: f64 = 1e-9;

/// Geometry of a uniform linear array.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UlaSpec {
    num_antennas: usize,
    element_spacing: f64,
}

impl UlaSpec {
    pub const DEFAULT_SPACING: f64 = 0.5;

    /// `element_spacing` is the inter-element distance in wavelengths.
    pub fn new(num_antennas: usize, element_spacing: f64) -> Result<Self> {
        if num_antennas == 0 {
            return Err(Error::domain("array needs at least one antenna"));
        }
        if !(element_spacing.is_finite() && element_spacing > 0.0) {
            return Err(Error::domain(format!(
                "element spacing must be positive, got {element_spacing}"
            )));
        }
        Ok(Self {
            num_antennas,
            element_spacing,
        })
    }

    /// Half-wavelength spaced array.
    pub fn half_wavelength(num_antennas: usize) -> Result<Self> {
        Self::new(num_antennas, Self::DEFAULT_SPACING)
    }

    pub fn num_antennas(&self) -> usize {
        self.num_antennas
    }

    pub fn element_spacing(&self) -> f64 {
        self.element_spacing
    }

    /// Electrical phase step between adjacent elements for a direction.
    fn phase_step(&self, angle: f64) -> f64 {
        TAU * self.element_spacing * angle.cos()
    }
}

/// Phase difference `ψ` between two directions as seen by a ULA.
///
/// Since `cos θ` spans `[-1, 1]`, `|ψ| ≤ 4π·(d/λ)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PhaseDifference(f64);

impl PhaseDifference {
    pub fn new(psi: f64, element_spacing: f64) -> Result<Self> {
        let bound = 2.0 * TAU * element_spacing;
        if !psi.is_finite() || psi.abs() > bound * (1.0 + 1e-12) {
            return Err(Error::domain(format!(
                "phase difference {psi} outside [-{bound}, {bound}]"
            )));
        }
        Ok(Self(psi))
    }

    /// `2π (d/λ) (cos θ₁ - cos θ₂)`.
    pub fn between(theta1: f64, theta2: f64, element_spacing: f64) -> Result<Self> {
        check_angle(theta1)?;
        check_angle(theta2)?;
        Ok(Self(TAU * element_spacing * (theta1.cos() - theta2.cos())))
    }

    pub fn radians(self) -> f64 {
        self.0
    }

    pub fn abs(self) -> f64 {
        self.0.abs()
    }
}

/// Unit-norm analog beamformer whose first `active_count` entries carry
/// constant-modulus phases and whose remaining entries are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamformerWeights {
    weights: Vec<Complex64>,
    active_count: usize,
}

impl BeamformerWeights {
    pub fn as_slice(&self) -> &[Complex64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn active_count(&self) -> usize {
        self.active_count
    }

    pub fn norm_sqr(&self) -> f64 {
        self.weights.iter().map(|w| w.norm_sqr()).sum()
    }
}

fn check_angle(angle: f64) -> Result<()> {
    if (0.0..=PI).contains(&angle) {
        Ok(())
    } else {
        Err(Error::domain(format!("angle {angle} rad outside [0, π]")))
    }
}

/// Array response vector: entry `n` is `exp(-j n 2π (d/λ) cos θ)`.
pub fn steering_vector(angle: f64, spec: &UlaSpec) -> Result<Vec<Complex64>> {
    check_angle(angle)?;
    let step = spec.phase_step(angle);
    Ok((0..spec.num_antennas)
        .map(|n| Complex64::from_polar(1.0, -(n as f64) * step))
        .collect())
}

/// Conventional beamformer steered to `main_direction` using the first
/// `active_count` antennas. Inactive antennas get exactly zero weight.
pub fn cbf_weights(
    main_direction: f64,
    active_count: usize,
    spec: &UlaSpec,
) -> Result<BeamformerWeights> {
    check_angle(main_direction)?;
    if active_count == 0 || active_count > spec.num_antennas {
        return Err(Error::domain(format!(
            "active count {active_count} outside [1, {}]",
            spec.num_antennas
        )));
    }
    let amplitude = 1.0 / (active_count as f64).sqrt();
    let step = spec.phase_step(main_direction);
    let weights = (0..spec.num_antennas)
        .map(|n| {
            if n < active_count {
                Complex64::from_polar(amplitude, -(n as f64) * step)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    Ok(BeamformerWeights {
        weights,
        active_count,
    })
}

/// Power gain of a CBF with `active_count` antennas at phase offset `psi`:
/// `sin²(N'ψ/2) / (N' sin²(ψ/2))`, equal to `N'` on the main lobe.
pub fn beam_response(psi: f64, active_count: usize) -> f64 {
    let n = active_count as f64;
    let den = (psi / 2.0).sin();
    if den.abs() < SINGULARITY_EPS {
        return n;
    }
    let num = (n * psi / 2.0).sin();
    num * num / (n * den * den)
}

/// `|a(θ)ᴴ w|²` by direct summation over the array.
pub fn pattern_by_inner_product(
    weights: &BeamformerWeights,
    theta: f64,
    spec: &UlaSpec,
) -> Result<f64> {
    if weights.len() != spec.num_antennas {
        return Err(Error::domain(format!(
            "weights have {} entries, array has {}",
            weights.len(),
            spec.num_antennas
        )));
    }
    let a = steering_vector(theta, spec)?;
    let inner: Complex64 = a
        .iter()
        .zip(weights.as_slice())
        .map(|(a, w)| a.conj() * w)
        .sum();
    Ok(inner.norm_sqr())
}

/// Main-lobe response of a CBF, i.e. its active antenna count.
pub fn main_lobe_response(active_count: usize) -> f64 {
    active_count as f64
}

/// Main-lobe response implied by a half-power beamwidth through the
/// approximation `G ≈ 0.891 · 2π / ψ_H`.
pub fn main_lobe_response_for_beamwidth(half_power_beamwidth: f64) -> f64 {
    HALF_POWER_CONSTANT * TAU / half_power_beamwidth
}

/// Approximate half-power beamwidth in the phase domain, `0.891 · 2π / N'`.
pub fn half_power_beamwidth_approx(active_count: usize) -> f64 {
    HALF_POWER_CONSTANT * TAU / active_count as f64
}

/// Exact half-power beamwidth in the phase domain, found by bisection on the
/// first lobe `(0, 2π/N')` where the response is monotone.
pub fn half_power_beamwidth_numeric(active_count: usize) -> Result<f64> {
    if active_count < 2 {
        return Err(Error::domain(
            "half-power beamwidth undefined for a single antenna",
        ));
    }
    let target = active_count as f64 / 2.0;
    let mut lo = 0.0_f64;
    let mut hi = TAU / active_count as f64;
    // Bisect until the bracket stops shrinking.
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if beam_response(mid, active_count) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_cvec(actual: &[Complex64], expected: &[Complex64]) {
        assert_eq!(actual.len(), expected.len());
        for (a, e) in actual.iter().zip(expected) {
            assert!((a - e).norm() < 1e-12, "{a} != {e}");
        }
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn steering_vector_examples() {
        let s4 = UlaSpec::half_wavelength(4).unwrap();
        assert_cvec(
            &steering_vector(PI / 2.0, &s4).unwrap(),
            &[c(1.0, 0.0); 4],
        );
        let s2 = UlaSpec::half_wavelength(2).unwrap();
        assert_cvec(
            &steering_vector(0.0, &s2).unwrap(),
            &[c(1.0, 0.0), c(-1.0, 0.0)],
        );
        let s3 = UlaSpec::half_wavelength(3).unwrap();
        assert_cvec(
            &steering_vector(PI / 3.0, &s3).unwrap(),
            &[c(1.0, 0.0), c(0.0, -1.0), c(-1.0, 0.0)],
        );
    }

    #[test]
    fn steering_vector_rejects_back_half_plane() {
        let s = UlaSpec::half_wavelength(4).unwrap();
        assert!(steering_vector(-0.1, &s).is_err());
        assert!(steering_vector(PI + 1e-9, &s).is_err());
    }

    #[test]
    fn spec_validation() {
        assert!(UlaSpec::new(0, 0.5).is_err());
        assert!(UlaSpec::new(4, 0.0).is_err());
        assert!(UlaSpec::new(4, f64::NAN).is_err());
    }

    #[test]
    fn cbf_broadside_reduced_aperture() {
        let s = UlaSpec::half_wavelength(8).unwrap();
        let w = cbf_weights(PI / 2.0, 4, &s).unwrap();
        assert_cvec(
            w.as_slice(),
            &[
                c(0.5, 0.0),
                c(0.5, 0.0),
                c(0.5, 0.0),
                c(0.5, 0.0),
                c(0.0, 0.0),
                c(0.0, 0.0),
                c(0.0, 0.0),
                c(0.0, 0.0),
            ],
        );
        assert_eq!(w.active_count(), 4);
        assert!((w.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cbf_rejects_bad_active_count() {
        let s = UlaSpec::half_wavelength(8).unwrap();
        assert!(cbf_weights(1.0, 0, &s).is_err());
        assert!(cbf_weights(1.0, 9, &s).is_err());
    }

    #[test]
    fn beam_response_examples() {
        for n in [1, 2, 7, 25] {
            assert_eq!(beam_response(0.0, n), n as f64);
            assert_eq!(beam_response(TAU, n), n as f64);
            assert!(beam_response(TAU / n as f64, n).abs() < 1e-20 || n == 1);
        }
        assert!((beam_response(PI / 4.0, 4) - 1.707_106_781_186_547_5).abs() < 1e-12);
    }

    #[test]
    fn pattern_examples() {
        let s = UlaSpec::half_wavelength(16).unwrap();
        let theta0 = 1.2;
        let w = cbf_weights(theta0, 10, &s).unwrap();
        let peak = pattern_by_inner_product(&w, theta0, &s).unwrap();
        assert!((peak - 10.0).abs() < 1e-12);

        // first null: cos θ = cos θ₀ + (2π/N') / (2π d/λ)
        let cos_null = theta0.cos() + 1.0 / (10.0 * 0.5);
        let null = pattern_by_inner_product(&w, cos_null.acos(), &s).unwrap();
        assert!(null.abs() < 1e-10);

        let wrong = UlaSpec::half_wavelength(8).unwrap();
        assert!(pattern_by_inner_product(&w, 1.0, &wrong).is_err());
    }

    #[test]
    fn half_power_approx_values() {
        assert!((half_power_beamwidth_approx(25) - 0.223_932_724_347_880_46).abs() < 1e-12);
        for n in [3, 10, 32] {
            assert_eq!(
                half_power_beamwidth_approx(2 * n),
                half_power_beamwidth_approx(n) / 2.0
            );
        }
    }

    // Reference widths from a 30-digit bisection of the closed-form pattern.
    #[test]
    fn half_power_numeric_values() {
        let cases = [
            (2, std::f64::consts::PI),
            (10, 0.559_040_473_959_987_7),
            (16, 0.348_477_253_677_966_0),
            (25, 0.222_803_069_895_341_25),
            (64, 0.086_981_500_711_627_94),
        ];
        for (n, expected) in cases {
            let got = half_power_beamwidth_numeric(n).unwrap();
            assert!((got - expected).abs() < 1e-10, "N'={n}: {got} vs {expected}");
        }
        // N' = 2: the approximation is 11% narrow.
        let rel = (half_power_beamwidth_approx(2) - PI).abs() / PI;
        assert!(rel > 0.1);
        assert!(half_power_beamwidth_numeric(1).is_err());
    }

    #[test]
    fn half_power_numeric_strictly_decreasing() {
        let widths: Vec<f64> = (2..=128)
            .map(|n| half_power_beamwidth_numeric(n).unwrap())
            .collect();
        assert!(widths.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn half_power_consistency() {
        for n in 2..=128 {
            let half = half_power_beamwidth_numeric(n).unwrap() / 2.0;
            let r = beam_response(half, n);
            assert!((r - n as f64 / 2.0).abs() < 1e-9, "N'={n}: {r}");
        }
    }

    #[test]
    fn main_lobe_tradeoff_is_monotone() {
        // Wider approximate beamwidth never buys a larger main lobe.
        let mut pairs: Vec<(f64, f64)> = (1..=128)
            .map(|n| {
                let bw = half_power_beamwidth_approx(n);
                (bw, main_lobe_response_for_beamwidth(bw))
            })
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        assert!(pairs.windows(2).all(|p| p[1].1 <= p[0].1));
        for n in 1..=128 {
            let g = main_lobe_response_for_beamwidth(half_power_beamwidth_approx(n));
            assert!((g - main_lobe_response(n)).abs() < 1e-9);
        }
    }

    #[test]
    fn peak_is_at_zero_phase() {
        for n in [2, 4, 8, 16, 25, 32, 64] {
            let grid = 20_001;
            let (arg, val) = (0..grid)
                .map(|i| -PI + TAU * i as f64 / (grid - 1) as f64)
                .map(|psi| (psi, beam_response(psi, n)))
                .max_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            assert!(arg.abs() < 1e-12, "N'={n}: argmax {arg}");
            assert_eq!(val, n as f64);
        }
    }

    #[test]
    fn phase_difference_examples() {
        let p = PhaseDifference::between(PI / 2.0, PI / 2.0, 0.5).unwrap();
        assert_eq!(p.radians(), 0.0);
        let p = PhaseDifference::between(PI / 3.0, 2.0 * PI / 3.0, 0.5).unwrap();
        assert!((p.radians() - PI).abs() < 1e-12);
        let p = PhaseDifference::between(PI / 2.0, 80f64.to_radians(), 0.5).unwrap();
        assert!((p.radians() + 0.545_531_839_267_683_6).abs() < 1e-12);
        assert!(PhaseDifference::between(-0.1, 1.0, 0.5).is_err());
        assert!(PhaseDifference::new(2.0 * PI + 0.01, 0.5).is_err());
        assert!(PhaseDifference::new(-2.0 * PI, 0.5).is_ok());
    }
}
