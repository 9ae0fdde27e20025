//! Two-user drops and multipath channel matrices.
//!
//! Each user sees one LOS path and `L` NLOS paths. Path `l` contributes the
//! rank-one term `α_l · a_UE(φ_l) · a_BS(θ_l)ᴴ` to the `N_UE × N_BS` channel.
//! Path amplitudes follow a 28 GHz LOS/NLOS path-loss fit; NLOS paths carry an
//! additional Rayleigh small-scale factor.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::array::{steering_vector, PhaseDifference, UlaSpec};
use crate::{Error, Result};

/// Lognormal shadowing standard deviations (dB), applied only when enabled.
pub const SHADOWING_LOS_DB: f64 = 5.8;
pub const SHADOWING_NLOS_DB: f64 = 8.7;

/// Distance from endfire kept clear when placing the strong user.
pub const ENDFIRE_MARGIN_DEG: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkState {
    Los,
    Nlos,
}

/// Parameters of the simulated cell and link budget.
///
/// Powers are kept in dBm and the angular spread in degrees so that a config
/// survives a JSON round trip bit-for-bit; the SI accessors convert.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub carrier_frequency_hz: f64,
    pub cell_radius_m: f64,
    pub num_nlos_paths: usize,
    pub max_aod_difference_deg: f64,
    pub min_distance_m: f64,
    pub tx_power_dbm: f64,
    pub noise_power_dbm: f64,
    pub n_ue: usize,
    pub element_spacing: f64,
    pub shadowing: bool,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            carrier_frequency_hz: 28e9,
            cell_radius_m: 200.0,
            num_nlos_paths: 10,
            max_aod_difference_deg: 10.0,
            min_distance_m: 10.0,
            tx_power_dbm: 30.0,
            noise_power_dbm: -88.0,
            n_ue: 8,
            element_spacing: UlaSpec::DEFAULT_SPACING,
            shadowing: false,
        }
    }
}

fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("carrier_frequency_hz", self.carrier_frequency_hz),
            ("cell_radius_m", self.cell_radius_m),
            ("min_distance_m", self.min_distance_m),
            ("element_spacing", self.element_spacing),
        ];
        for (key, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::invalid(key, format!("must be positive, got {value}")));
            }
        }
        for (key, value) in [
            ("tx_power_dbm", self.tx_power_dbm),
            ("noise_power_dbm", self.noise_power_dbm),
        ] {
            if !value.is_finite() {
                return Err(Error::invalid(key, "must be finite"));
            }
        }
        if self.min_distance_m < 1.0 {
            return Err(Error::invalid(
                "min_distance_m",
                "path-loss model is only valid beyond 1 m",
            ));
        }
        if self.min_distance_m >= self.cell_radius_m {
            return Err(Error::invalid(
                "min_distance_m",
                format!("must be below cell_radius_m ({})", self.cell_radius_m),
            ));
        }
        if !(self.max_aod_difference_deg > 0.0 && self.max_aod_difference_deg < 180.0) {
            return Err(Error::invalid(
                "max_aod_difference_deg",
                format!("must lie in (0, 180), got {}", self.max_aod_difference_deg),
            ));
        }
        if self.n_ue == 0 {
            return Err(Error::invalid("n_ue", "must be at least 1"));
        }
        Ok(())
    }

    /// `p_BS` in watts.
    pub fn tx_power_w(&self) -> f64 {
        dbm_to_watts(self.tx_power_dbm)
    }

    /// `σ²` in watts.
    pub fn noise_power_w(&self) -> f64 {
        dbm_to_watts(self.noise_power_dbm)
    }

    /// `ρ = 1/σ²`.
    pub fn inv_noise(&self) -> f64 {
        1.0 / self.noise_power_w()
    }

    pub fn max_aod_difference_rad(&self) -> f64 {
        self.max_aod_difference_deg.to_radians()
    }

    pub fn ue_array(&self) -> Result<UlaSpec> {
        UlaSpec::new(self.n_ue, self.element_spacing)
    }

    pub fn bs_array(&self, n_bs: usize) -> Result<UlaSpec> {
        UlaSpec::new(n_bs, self.element_spacing)
    }
}

/// One propagation path: departure/arrival angles and complex amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathComponent {
    pub aod: f64,
    pub aoa: f64,
    pub gain: Complex64,
}

/// One user's multipath channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelRealization {
    pub los: PathComponent,
    pub nlos: Vec<PathComponent>,
    pub distance: f64,
}

impl ChannelRealization {
    /// Same user with the NLOS paths removed.
    pub fn los_only(&self) -> Self {
        Self {
            los: self.los,
            nlos: Vec::new(),
            distance: self.distance,
        }
    }

    pub fn paths(&self) -> impl Iterator<Item = &PathComponent> {
        std::iter::once(&self.los).chain(self.nlos.iter())
    }
}

/// A dropped user pair, labeled so that user 1 has the stronger LOS path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserPairScenario {
    user1: ChannelRealization,
    user2: ChannelRealization,
    gain_ratio: f64,
    psi12: PhaseDifference,
}

impl UserPairScenario {
    /// Orders the two users by LOS amplitude (ties keep the given order) and
    /// derives `α₁₂` and `ψ₁₂`.
    pub fn new(
        a: ChannelRealization,
        b: ChannelRealization,
        element_spacing: f64,
    ) -> Result<Self> {
        for user in [&a, &b] {
            if !(user.los.gain.norm() > 0.0) {
                return Err(Error::domain("LOS gain must be strictly positive"));
            }
        }
        let (user1, user2) = if b.los.gain.norm() > a.los.gain.norm() {
            (b, a)
        } else {
            (a, b)
        };
        let gain_ratio = user1.los.gain.norm() / user2.los.gain.norm();
        let psi12 = PhaseDifference::between(user1.los.aod, user2.los.aod, element_spacing)?;
        Ok(Self {
            user1,
            user2,
            gain_ratio,
            psi12,
        })
    }

    pub fn user1(&self) -> &ChannelRealization {
        &self.user1
    }

    pub fn user2(&self) -> &ChannelRealization {
        &self.user2
    }

    /// `α₁₂ = |α_{1,0}| / |α_{2,0}| ≥ 1`.
    pub fn gain_ratio(&self) -> f64 {
        self.gain_ratio
    }

    pub fn psi12(&self) -> PhaseDifference {
        self.psi12
    }

    /// The same drop with both users reduced to their LOS path.
    pub fn los_only(&self) -> Self {
        Self {
            user1: self.user1.los_only(),
            user2: self.user2.los_only(),
            gain_ratio: self.gain_ratio,
            psi12: self.psi12,
        }
    }
}

/// 28 GHz path loss in dB: `61.4 + 20 log10(d)` (LOS) or
/// `72.0 + 29.2 log10(d)` (NLOS).
pub fn path_loss_db(distance: f64, state: LinkState) -> Result<f64> {
    if !(distance >= 1.0) {
        return Err(Error::domain(format!(
            "path-loss model needs distance >= 1 m, got {distance}"
        )));
    }
    let (intercept, slope) = match state {
        LinkState::Los => (61.4, 20.0),
        LinkState::Nlos => (72.0, 29.2),
    };
    Ok(intercept + slope * distance.log10())
}

fn amplitude_from_db(loss_db: f64) -> f64 {
    10f64.powf(-loss_db / 20.0)
}

fn sample_loss_db<R: Rng + ?Sized>(
    rng: &mut R,
    distance: f64,
    state: LinkState,
    shadowing: bool,
) -> f64 {
    // Distances are drawn from [min_distance, D] with min_distance >= 1.
    let mut loss = path_loss_db(distance, state).expect("distance validated by config");
    if shadowing {
        let sigma = match state {
            LinkState::Los => SHADOWING_LOS_DB,
            LinkState::Nlos => SHADOWING_NLOS_DB,
        };
        loss += Normal::new(0.0, sigma).expect("positive sigma").sample(rng);
    }
    loss
}

/// Distance with density proportional to `r` on `[r_min, r_max]`.
fn sample_disk_radius<R: Rng + ?Sized>(rng: &mut R, r_min: f64, r_max: f64) -> f64 {
    let u: f64 = rng.random();
    (r_min * r_min + u * (r_max * r_max - r_min * r_min)).sqrt()
}

fn sample_user<R: Rng + ?Sized>(
    rng: &mut R,
    cfg: &ScenarioConfig,
    los_aod: f64,
) -> ChannelRealization {
    let distance = sample_disk_radius(rng, cfg.min_distance_m, cfg.cell_radius_m);
    let los_amplitude = amplitude_from_db(sample_loss_db(rng, distance, LinkState::Los, cfg.shadowing));
    let los = PathComponent {
        aod: los_aod,
        aoa: rng.random_range(0.0..=PI),
        gain: Complex64::from_polar(los_amplitude, rng.random_range(0.0..TAU)),
    };
    let nlos = (0..cfg.num_nlos_paths)
        .map(|_| {
            let aod = rng.random_range(0.0..=PI);
            let aoa = rng.random_range(0.0..=PI);
            let amplitude =
                amplitude_from_db(sample_loss_db(rng, distance, LinkState::Nlos, cfg.shadowing));
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            let small_scale = Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2;
            PathComponent {
                aod,
                aoa,
                gain: small_scale * amplitude,
            }
        })
        .collect();
    ChannelRealization {
        los,
        nlos,
        distance,
    }
}

/// Drops two users uniformly in the cell with LOS departure angles at most
/// `max_aod_difference` apart.
pub fn sample_user_pair<R: Rng + ?Sized>(rng: &mut R, cfg: &ScenarioConfig) -> UserPairScenario {
    let margin = ENDFIRE_MARGIN_DEG.to_radians();
    let spread = cfg.max_aod_difference_rad();
    let aod1 = rng.random_range(margin..=PI - margin);
    let aod2 = (aod1 + rng.random_range(-spread..=spread)).clamp(0.0, PI);
    let a = sample_user(rng, cfg, aod1);
    let b = sample_user(rng, cfg, aod2);
    UserPairScenario::new(a, b, cfg.element_spacing)
        .expect("sampled LOS gains are positive and angles lie in [0, π]")
}

/// Dense complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ChannelMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[Complex64] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    /// Adds `gain · u vᴴ`.
    fn add_outer(&mut self, gain: Complex64, u: &[Complex64], v: &[Complex64]) {
        for (r, ur) in u.iter().enumerate() {
            let scaled = gain * ur;
            let row = &mut self.data[r * self.cols..(r + 1) * self.cols];
            for (h, vc) in row.iter_mut().zip(v) {
                *h += scaled * vc.conj();
            }
        }
    }
}

/// `H = Σ_l α_l a_UE(φ_l) a_BS(θ_l)ᴴ` over the LOS and all NLOS paths.
pub fn assemble_channel_matrix(
    realization: &ChannelRealization,
    spec_bs: &UlaSpec,
    spec_ue: &UlaSpec,
) -> Result<ChannelMatrix> {
    let mut h = ChannelMatrix::zeros(spec_ue.num_antennas(), spec_bs.num_antennas());
    for path in realization.paths() {
        let a_ue = steering_vector(path.aoa, spec_ue)?;
        let a_bs = steering_vector(path.aod, spec_bs)?;
        h.add_outer(path.gain, &a_ue, &a_bs);
    }
    Ok(h)
}
