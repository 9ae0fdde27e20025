//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use beamnoma::Complex64;

/// `|Σ_n exp(j n ψ_n) w_n|²` by direct summation, with the steering phases
/// built from `cos θ` rather than from a precomputed `ψ`.
pub fn direct_pattern(n_total: usize, n_active: usize, spacing: f64, theta: f64, theta0: f64) -> f64 {
    let k = std::f64::consts::TAU * spacing;
    let amp = 1.0 / (n_active as f64).sqrt();
    let mut acc = Complex64::new(0.0, 0.0);
    for n in 0..n_total {
        let a = Complex64::from_polar(1.0, -(n as f64) * k * theta.cos());
        let w = if n < n_active {
            Complex64::from_polar(amp, -(n as f64) * k * theta0.cos())
        } else {
            Complex64::new(0.0, 0.0)
        };
        acc += a.conj() * w;
    }
    acc.norm_sqr()
}

/// Bisection for the angle in `(theta0, hi)` where a decreasing function
/// crosses `target`.
pub fn bisect_decreasing(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, target: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Angular half-power width of the CBF pattern around `theta0`, measured on
/// the direct-summation pattern.
pub fn direct_angular_width(n_active: usize, theta0: f64) -> f64 {
    let peak = n_active as f64;
    // first null lies within 2/N' in cos θ at half-wavelength spacing
    let span = (2.0 / n_active as f64).min(0.5);
    let right = bisect_decreasing(
        |t| direct_pattern(n_active, n_active, 0.5, t, theta0),
        theta0,
        (theta0.cos() - span).acos(),
        peak / 2.0,
    );
    let left = bisect_decreasing(
        |t| direct_pattern(n_active, n_active, 0.5, theta0 - (t - theta0), theta0),
        theta0,
        theta0 + (theta0 - (theta0.cos() + span).acos()),
        peak / 2.0,
    );
    right - (theta0 - (left - theta0))
}

/// Largest singular value by power iteration on `HᴴH`.
pub fn largest_singular_value(h: &beamnoma::channel::ChannelMatrix) -> f64 {
    let (rows, cols) = (h.rows(), h.cols());
    let mut x: Vec<Complex64> = (0..cols)
        .map(|i| Complex64::new(1.0 + 0.1 * i as f64, 0.3 - 0.05 * i as f64))
        .collect();
    let mut sigma = 0.0;
    for _ in 0..200 {
        let y: Vec<Complex64> = (0..rows)
            .map(|r| (0..cols).map(|c| h.get(r, c) * x[c]).sum())
            .collect();
        let z: Vec<Complex64> = (0..cols)
            .map(|c| (0..rows).map(|r| h.get(r, c).conj() * y[r]).sum())
            .collect();
        let xn: f64 = x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        let zn: f64 = z.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        sigma = (zn / xn).sqrt();
        x = z.iter().map(|v| v / zn).collect();
    }
    sigma
}

/// Kolmogorov distance between a sample and a continuous CDF.
pub fn kolmogorov_distance(mut samples: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Effective gains `|h̃₁|²`, `|h̃₂|²` of a pure-LOS pair when the first
/// `active` BS antennas steer toward `theta0`.
pub fn los_gains(
    pair: &beamnoma::channel::UserPairScenario,
    n_bs: usize,
    active: usize,
    theta0: f64,
    cfg: &beamnoma::channel::ScenarioConfig,
) -> (f64, f64) {
    use beamnoma::array::cbf_weights;
    use beamnoma::beam::design_rx_beamformer;
    use beamnoma::channel::assemble_channel_matrix;
    use beamnoma::rates::effective_channel;

    let bs = cfg.bs_array(n_bs).unwrap();
    let ue = cfg.ue_array().unwrap();
    let w = cbf_weights(theta0, active, &bs).unwrap();
    let gain = |u: &beamnoma::channel::ChannelRealization| {
        let h = assemble_channel_matrix(u, &bs, &ue).unwrap();
        let v = design_rx_beamformer(u, &ue).unwrap();
        effective_channel(&v, &h, &w).unwrap().norm_sqr()
    };
    (gain(pair.user1()), gain(pair.user2()))
}

/// Scans the main direction over 500 points between the two users and checks
/// that the strong-user proxy `log₂(ρ p |h̃₁|²)` peaks at the strong user's
/// departure angle.
pub fn check_argmax_at_strong_user(
    pair: &beamnoma::channel::UserPairScenario,
    n_bs: usize,
    cfg: &beamnoma::channel::ScenarioConfig,
) -> Result<(), String> {
    let active = beamnoma::beam::select_active_count(pair.psi12(), n_bs);
    let snr = cfg.inv_noise() * cfg.tx_power_w();
    let (t1, t2) = (pair.user1().los.aod, pair.user2().los.aod);
    let proxy = |theta0: f64| (snr * los_gains(pair, n_bs, active, theta0, cfg).0).log2();
    let at_t1 = proxy(t1);
    let mut best = (0usize, f64::NEG_INFINITY);
    for i in 0..500 {
        let theta0 = t1 + (t2 - t1) * i as f64 / 499.0;
        let p = proxy(theta0);
        if p > best.1 {
            best = (i, p);
        }
    }
    if best.1 > at_t1 + 1e-12 {
        return Err(format!(
            "grid point {} beats θ₁ ({} > {at_t1}) for θ₁={t1}, θ₂={t2}",
            best.0, best.1
        ));
    }
    if (t1 - t2).abs() > 1e-3 && best.0 != 0 {
        return Err(format!("argmax at grid point {} for θ₁={t1}, θ₂={t2}", best.0));
    }
    Ok(())
}
