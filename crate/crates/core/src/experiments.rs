//! Seeded Monte-Carlo drivers.
//!
//! Every trial owns a ChaCha8 stream selected by `(master_seed, trial_index)`,
//! so a trial's drop does not depend on which worker runs it. Per-trial
//! results are collected in trial order and reduced sequentially, which keeps
//! aggregates bit-identical for any thread count. All antenna counts in a run
//! are evaluated on the same drops.

use std::f64::consts::{PI, TAU};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::array::{
    beam_response, cbf_weights, half_power_beamwidth_numeric, PhaseDifference,
};
use crate::beam::{
    beamwidth_limited_count, design_rx_beamformer, design_tx_beamformer, no_control_threshold,
};
use crate::channel::{assemble_channel_matrix, sample_user_pair, ScenarioConfig, UserPairScenario};
use crate::rates::{
    asymptotic_noma_sum_rate, asymptotic_rate_gain, asymptotic_tdma_sum_rate, effective_channel,
    noma_group_feasible, noma_sum_rate, sufficient_condition, tdma_sum_rate, EffectivePair,
    FeasibilityPolicy, LinkBudget,
};
use crate::{Error, Result};

/// Linear responses below this floor are reported at -120 dB.
const PATTERN_FLOOR: f64 = 1e-12;

pub const BEAM_PATTERN_POINTS: usize = 1441;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    BeamPattern,
    GainRegion,
    NomaProbability,
    AvgSumRate,
}

impl ExperimentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentKind::BeamPattern => "beam_pattern",
            ExperimentKind::GainRegion => "gain_region",
            ExperimentKind::NomaProbability => "noma_probability",
            ExperimentKind::AvgSumRate => "avg_sum_rate",
        }
    }

    pub fn default_trials(self) -> usize {
        match self {
            ExperimentKind::BeamPattern | ExperimentKind::GainRegion => 1,
            ExperimentKind::NomaProbability => 100_000,
            ExperimentKind::AvgSumRate => 10_000,
        }
    }

    pub fn default_n_bs(self) -> Vec<usize> {
        match self {
            ExperimentKind::BeamPattern => vec![25],
            ExperimentKind::GainRegion => vec![32],
            ExperimentKind::NomaProbability | ExperimentKind::AvgSumRate => {
                vec![16, 24, 32, 40, 48, 56, 64]
            }
        }
    }

    /// Kinds evaluated at a single array size.
    fn single_array(self) -> bool {
        matches!(self, ExperimentKind::BeamPattern | ExperimentKind::GainRegion)
    }
}

/// Rectangular `(|ψ₁₂|, α₁₂)` grid with linearly spaced axes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub abs_psi12_min: f64,
    pub abs_psi12_max: f64,
    pub abs_psi12_points: usize,
    pub alpha12_min: f64,
    pub alpha12_max: f64,
    pub alpha12_points: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            abs_psi12_min: 0.01,
            abs_psi12_max: 1.0,
            abs_psi12_points: 200,
            alpha12_min: 1.0,
            alpha12_max: 10.0,
            alpha12_points: 200,
        }
    }
}

fn linspace(lo: f64, hi: f64, points: usize) -> impl Iterator<Item = f64> {
    (0..points).map(move |i| {
        if points == 1 {
            lo
        } else {
            lo + (hi - lo) * i as f64 / (points - 1) as f64
        }
    })
}

impl GridSpec {
    pub fn validate(&self, element_spacing: f64) -> Result<()> {
        let psi_bound = 2.0 * TAU * element_spacing;
        if !(self.abs_psi12_min >= 0.0
            && self.abs_psi12_min <= self.abs_psi12_max
            && self.abs_psi12_max <= psi_bound)
        {
            return Err(Error::invalid(
                "grid.abs_psi12_min",
                format!("need 0 <= min <= max <= {psi_bound}"),
            ));
        }
        if !(self.alpha12_min >= 1.0 && self.alpha12_min <= self.alpha12_max && self.alpha12_max.is_finite()) {
            return Err(Error::invalid("grid.alpha12_min", "need 1 <= min <= max"));
        }
        if self.abs_psi12_points == 0 {
            return Err(Error::invalid("grid.abs_psi12_points", "must be at least 1"));
        }
        if self.alpha12_points == 0 {
            return Err(Error::invalid("grid.alpha12_points", "must be at least 1"));
        }
        Ok(())
    }

    pub fn abs_psi12_values(&self) -> impl Iterator<Item = f64> {
        linspace(self.abs_psi12_min, self.abs_psi12_max, self.abs_psi12_points)
    }

    pub fn alpha12_values(&self) -> impl Iterator<Item = f64> {
        linspace(self.alpha12_min, self.alpha12_max, self.alpha12_points)
    }
}

/// Everything needed to reproduce one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub master_seed: u64,
    pub trials: usize,
    pub n_bs_values: Vec<usize>,
    pub grid: Option<GridSpec>,
    pub scenario: ScenarioConfig,
    /// NOMA-group rule of the beamwidth-controlled scheme.
    pub policy: FeasibilityPolicy,
}

impl ExperimentSpec {
    pub const DEFAULT_SEED: u64 = 42;

    pub fn new(kind: ExperimentKind) -> Self {
        Self {
            kind,
            master_seed: Self::DEFAULT_SEED,
            trials: kind.default_trials(),
            n_bs_values: kind.default_n_bs(),
            grid: (kind == ExperimentKind::GainRegion).then(GridSpec::default),
            scenario: ScenarioConfig::default(),
            policy: FeasibilityPolicy::Gain,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.scenario.validate()?;
        if self.trials == 0 {
            return Err(Error::invalid("trials", "must be at least 1"));
        }
        if self.n_bs_values.is_empty() {
            return Err(Error::invalid("n_bs_values", "must not be empty"));
        }
        if self.n_bs_values.contains(&0) {
            return Err(Error::invalid("n_bs_values", "N_BS must be at least 1"));
        }
        if !self.n_bs_values.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::invalid("n_bs_values", "must be strictly ascending"));
        }
        if self.kind.single_array() && self.n_bs_values.len() != 1 {
            return Err(Error::invalid(
                "n_bs_values",
                format!("{} takes exactly one array size", self.kind.as_str()),
            ));
        }
        if self.kind == ExperimentKind::BeamPattern && self.n_bs_values[0] < 2 {
            return Err(Error::invalid("n_bs_values", "beam pattern needs N_BS >= 2"));
        }
        if let Some(grid) = &self.grid {
            grid.validate(self.scenario.element_spacing)?;
        }
        Ok(())
    }
}

/// Mean with its standard error over `count` samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_err: f64,
    pub count: usize,
}

impl Estimate {
    /// Sample mean and `s / √n`, accumulated in slice order.
    pub fn from_samples(samples: &[f64]) -> Self {
        let n = samples.len();
        let mean = samples.iter().sum::<f64>() / n as f64;
        let std_err = if n > 1 {
            let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        } else {
            0.0
        };
        Self {
            mean,
            std_err,
            count: n,
        }
    }

    /// Success fraction with the binomial standard error `√(p(1-p)/n)`.
    pub fn binomial(successes: usize, trials: usize) -> Self {
        let p = successes as f64 / trials as f64;
        Self {
            mean: p,
            std_err: (p * (1.0 - p) / trials as f64).sqrt(),
            count: trials,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PatternRow {
    pub theta_deg: f64,
    pub n_active: usize,
    pub response_db: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GainCell {
    pub abs_psi12: f64,
    pub alpha12: f64,
    pub alpha12_db: f64,
    pub gain_bps_hz: f64,
    pub condition: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryCurve {
    /// `|ψ₁₂| = ψ_H^min / 2`: edge of the region reachable without control.
    NoControl,
    /// `α₁₂ ⌊0.891π/|ψ₁₂|⌋ = N_BS`: edge of the gain region with control.
    GainCondition,
}

impl BoundaryCurve {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundaryCurve::NoControl => "no_control",
            BoundaryCurve::GainCondition => "gain_condition",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub curve: BoundaryCurve,
    pub abs_psi12: f64,
    pub alpha12_db: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityRow {
    pub n_bs: usize,
    pub policy: FeasibilityPolicy,
    pub probability: f64,
    pub std_err: f64,
    pub trials: usize,
}

/// Curves of the average sum-rate study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateCurve {
    /// Beamwidth-controlled NOMA, TDMA fallback when the policy rejects.
    NomaWithControl,
    /// Full-array NOMA, TDMA fallback outside the full-array beam.
    NomaWithoutControl,
    Tdma,
    /// Large-array asymptote of the controlled scheme on the LOS parameters.
    Asymptotic,
}

impl RateCurve {
    pub const ALL: [RateCurve; 4] = [
        RateCurve::NomaWithControl,
        RateCurve::NomaWithoutControl,
        RateCurve::Tdma,
        RateCurve::Asymptotic,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RateCurve::NomaWithControl => "noma_with_control",
            RateCurve::NomaWithoutControl => "noma_without_control",
            RateCurve::Tdma => "tdma",
            RateCurve::Asymptotic => "asymptotic",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    pub n_bs: usize,
    pub scheme: RateCurve,
    pub mean_rate_bps_hz: f64,
    pub std_err: f64,
    pub trials: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ResultTable {
    BeamPattern {
        rows: Vec<PatternRow>,
    },
    GainRegion {
        cells: Vec<GainCell>,
        boundary: Vec<BoundaryPoint>,
    },
    NomaProbability {
        rows: Vec<ProbabilityRow>,
    },
    AvgSumRate {
        rows: Vec<RateRow>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateResult {
    pub spec: ExperimentSpec,
    pub table: ResultTable,
}

/// RNG stream of one trial. The seed fills the ChaCha key and the trial index
/// selects the stream, so distinct `(seed, index)` pairs never share a stream.
pub fn trial_rng(master_seed: u64, trial_index: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&master_seed.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(trial_index);
    rng
}

/// Runs `f` on every trial index, in parallel, returning results in index
/// order.
fn map_trials<T, F>(trials: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    (0..trials as u64).into_par_iter().map(f).collect()
}

/// Runs an experiment on the global rayon pool, or on a dedicated pool of
/// `threads` workers.
pub fn run(spec: &ExperimentSpec, threads: Option<usize>) -> Result<AggregateResult> {
    spec.validate()?;
    match threads {
        None => run_inner(spec),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::domain(format!("cannot start {n} workers: {e}")))?;
            pool.install(|| run_inner(spec))
        }
    }
}

fn run_inner(spec: &ExperimentSpec) -> Result<AggregateResult> {
    let table = match spec.kind {
        ExperimentKind::BeamPattern => run_beam_pattern(spec)?,
        ExperimentKind::GainRegion => run_gain_region(spec)?,
        ExperimentKind::NomaProbability => run_noma_probability(spec)?,
        ExperimentKind::AvgSumRate => run_avg_sum_rate(spec)?,
    };
    Ok(AggregateResult {
        spec: spec.clone(),
        table,
    })
}

/// Active counts compared in the beam-pattern study: the full array and the
/// aperture widened by a factor of about 1.5.
pub fn pattern_active_counts(n_bs: usize) -> Vec<usize> {
    let widened = ((n_bs as f64 / 1.5).floor() as usize).max(1);
    if widened == n_bs {
        vec![n_bs]
    } else {
        vec![n_bs, widened]
    }
}

/// Angular (not phase-domain) half-power width of a CBF steered to
/// `main_direction`, from the exact phase-domain width.
pub fn angular_half_power_width(
    main_direction: f64,
    active_count: usize,
    element_spacing: f64,
) -> Result<f64> {
    let half = half_power_beamwidth_numeric(active_count)? / 2.0;
    let shift = half / (TAU * element_spacing);
    let (lo, hi) = (main_direction.cos() - shift, main_direction.cos() + shift);
    if lo < -1.0 || hi > 1.0 {
        return Err(Error::domain("half-power edge falls outside the visible region"));
    }
    Ok(lo.acos() - hi.acos())
}

pub fn run_beam_pattern(spec: &ExperimentSpec) -> Result<ResultTable> {
    let n_bs = spec.n_bs_values[0];
    let spacing = spec.scenario.element_spacing;
    let main_cos = (PI / 2.0).cos();
    let mut rows = Vec::with_capacity(2 * BEAM_PATTERN_POINTS);
    for n_active in pattern_active_counts(n_bs) {
        for theta_deg in linspace(0.0, 180.0, BEAM_PATTERN_POINTS) {
            let psi = TAU * spacing * (theta_deg.to_radians().cos() - main_cos);
            let response = beam_response(psi, n_active).max(PATTERN_FLOOR);
            rows.push(PatternRow {
                theta_deg,
                n_active,
                response_db: 10.0 * response.log10(),
            });
        }
    }
    Ok(ResultTable::BeamPattern { rows })
}

pub fn run_gain_region(spec: &ExperimentSpec) -> Result<ResultTable> {
    let n_bs = spec.n_bs_values[0];
    let spacing = spec.scenario.element_spacing;
    let grid = spec.grid.clone().unwrap_or_default();
    let mut cells = Vec::with_capacity(grid.abs_psi12_points * grid.alpha12_points);
    for abs_psi12 in grid.abs_psi12_values() {
        let psi = PhaseDifference::new(abs_psi12, spacing)?;
        for alpha12 in grid.alpha12_values() {
            cells.push(GainCell {
                abs_psi12,
                alpha12,
                alpha12_db: 20.0 * alpha12.log10(),
                gain_bps_hz: asymptotic_rate_gain(alpha12, psi, n_bs)?,
                condition: sufficient_condition(alpha12, psi, n_bs)?,
            });
        }
    }

    let threshold = no_control_threshold(n_bs);
    let mut boundary: Vec<BoundaryPoint> = grid
        .alpha12_values()
        .map(|alpha12| BoundaryPoint {
            curve: BoundaryCurve::NoControl,
            abs_psi12: threshold,
            alpha12_db: 20.0 * alpha12.log10(),
        })
        .collect();
    for abs_psi12 in grid.abs_psi12_values().filter(|&p| p > threshold) {
        let count = beamwidth_limited_count(abs_psi12).min(n_bs as u64);
        let alpha12 = if count == 0 {
            f64::INFINITY
        } else {
            n_bs as f64 / count as f64
        };
        boundary.push(BoundaryPoint {
            curve: BoundaryCurve::GainCondition,
            abs_psi12,
            alpha12_db: 20.0 * alpha12.log10(),
        });
    }
    Ok(ResultTable::GainRegion { cells, boundary })
}

/// Policies reported by the probability study: the full-array baseline first,
/// then the controlled scheme's policy.
pub fn probability_policies(policy: FeasibilityPolicy) -> Vec<FeasibilityPolicy> {
    let mut policies = vec![FeasibilityPolicy::CoverageNoControl];
    if policy != FeasibilityPolicy::CoverageNoControl {
        policies.push(policy);
    }
    policies
}

pub fn run_noma_probability(spec: &ExperimentSpec) -> Result<ResultTable> {
    let policies = probability_policies(spec.policy);
    let per_trial: Vec<Vec<bool>> = map_trials(spec.trials, |i| {
        let pair = sample_user_pair(&mut trial_rng(spec.master_seed, i), &spec.scenario);
        let mut flags = Vec::with_capacity(spec.n_bs_values.len() * policies.len());
        for &n_bs in &spec.n_bs_values {
            for &policy in &policies {
                flags.push(noma_group_feasible(pair.psi12(), n_bs, policy, pair.gain_ratio())?);
            }
        }
        Ok(flags)
    })?;

    let mut rows = Vec::new();
    let mut column = 0;
    for &n_bs in &spec.n_bs_values {
        for &policy in &policies {
            let successes = per_trial.iter().filter(|f| f[column]).count();
            let est = Estimate::binomial(successes, spec.trials);
            rows.push(ProbabilityRow {
                n_bs,
                policy,
                probability: est.mean,
                std_err: est.std_err,
                trials: spec.trials,
            });
            column += 1;
        }
    }
    Ok(ResultTable::NomaProbability { rows })
}

/// Sum-rates of every [`RateCurve`] for one drop at one array size, in
/// [`RateCurve::ALL`] order.
pub fn evaluate_pair(
    pair: &UserPairScenario,
    n_bs: usize,
    cfg: &ScenarioConfig,
    policy: FeasibilityPolicy,
) -> Result<[f64; 4]> {
    let bs = cfg.bs_array(n_bs)?;
    let ue = cfg.ue_array()?;
    let budget = LinkBudget::from_scenario(cfg)?;
    let (u1, u2) = (pair.user1(), pair.user2());
    let h1 = assemble_channel_matrix(u1, &bs, &ue)?;
    let h2 = assemble_channel_matrix(u2, &bs, &ue)?;
    let v1 = design_rx_beamformer(u1, &ue)?;
    let v2 = design_rx_beamformer(u2, &ue)?;

    let full1 = cbf_weights(u1.los.aod, n_bs, &bs)?;
    let full2 = cbf_weights(u2.los.aod, n_bs, &bs)?;
    let tdma = tdma_sum_rate(
        &EffectivePair {
            h1: effective_channel(&v1, &h1, &full1)?,
            h2: effective_channel(&v2, &h2, &full2)?,
        },
        &budget,
    )
    .sum_rate;

    let alpha12 = pair.gain_ratio();
    let psi12 = pair.psi12();
    let controlled = noma_group_feasible(psi12, n_bs, policy, alpha12)?;
    let with_control = if controlled {
        let design = design_tx_beamformer(pair, &bs)?;
        let w = &design.tx_weights;
        noma_sum_rate(
            &EffectivePair {
                h1: effective_channel(&v1, &h1, w)?,
                h2: effective_channel(&v2, &h2, w)?,
            },
            &budget,
        )
        .sum_rate
    } else {
        tdma
    };

    let uncontrolled =
        noma_group_feasible(psi12, n_bs, FeasibilityPolicy::CoverageNoControl, alpha12)?;
    let without_control = if uncontrolled {
        noma_sum_rate(
            &EffectivePair {
                h1: effective_channel(&v1, &h1, &full1)?,
                h2: effective_channel(&v2, &h2, &full1)?,
            },
            &budget,
        )
        .sum_rate
    } else {
        tdma
    };

    let a1 = u1.los.gain.norm();
    let a2 = u2.los.gain.norm();
    let asymptotic = if controlled {
        asymptotic_noma_sum_rate(a1, psi12, n_bs, cfg)?
    } else {
        asymptotic_tdma_sum_rate(a1, a2, n_bs, cfg)?
    };

    Ok([with_control, without_control, tdma, asymptotic])
}

pub fn run_avg_sum_rate(spec: &ExperimentSpec) -> Result<ResultTable> {
    let per_trial: Vec<Vec<[f64; 4]>> = map_trials(spec.trials, |i| {
        let pair = sample_user_pair(&mut trial_rng(spec.master_seed, i), &spec.scenario);
        spec.n_bs_values
            .iter()
            .map(|&n_bs| evaluate_pair(&pair, n_bs, &spec.scenario, spec.policy))
            .collect()
    })?;

    let mut rows = Vec::new();
    let mut samples = vec![0.0; spec.trials];
    for (col, &n_bs) in spec.n_bs_values.iter().enumerate() {
        for (k, &scheme) in RateCurve::ALL.iter().enumerate() {
            for (slot, trial) in samples.iter_mut().zip(&per_trial) {
                *slot = trial[col][k];
            }
            let est = Estimate::from_samples(&samples);
            rows.push(RateRow {
                n_bs,
                scheme,
                mean_rate_bps_hz: est.mean,
                std_err: est.std_err,
                trials: spec.trials,
            });
        }
    }
    Ok(ResultTable::AvgSumRate { rows })
}
