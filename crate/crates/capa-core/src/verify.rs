//! Numerical verification suites: each closed-form result is checked
//! against an independent discretized-operator or Monte Carlo realization,
//! with pinned tolerances. The CLI `verify` subcommand and the acceptance
//! tests both run these.

use crate::capacity::{
    lambda_star, rates_for_order, sum_rate_capacity, sum_rate_upper_bound, LinkBudget, SicOrder,
};
use crate::channel::Wave;
use crate::error::Result;
use crate::geometry::{ApertureRegion, UserSource};
use crate::operator_lab::{
    discretize, run_sic_pipeline, sample_channel_h, sample_kernel_g, sample_noise,
    whitening_kernel, whitening_residuals_for_roots, Constellation, KernelMatrix, NoiseModel,
};
use crate::quadrature::{
    closed_form_gain_planar, correlation_rho, QuadratureSpec, TwoUserChannel,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

/// Monte Carlo variance must match the projected-noise statistic this closely.
pub const NOISE_VARIANCE_TOL: f64 = 0.03;
/// Acceptable excess-kurtosis window for Gaussianity of the projected noise.
pub const KURTOSIS_RANGE: (f64, f64) = (2.8, 3.2);
/// Inverse-kernel round trip must return functions to this relative residual.
pub const INVERSE_RESIDUAL_TOL: f64 = 1e-8;
/// Whitened autocorrelation off-diagonal residual relative to its diagonal.
pub const WHITENING_RESIDUAL_TOL: f64 = 1e-6;
/// Discretized whitened-combining SNR vs the closed form.
pub const GAMMA2_GRID_TOL: f64 = 0.01;
/// Sum rates of the two decode orders may differ by at most this many bits.
pub const ORDER_INVARIANCE_BITS: f64 = 1e-9;
/// The two whitening roots must give the same decode SNR this tightly.
pub const BRANCH_INVARIANCE_REL: f64 = 1e-10;
/// Monte Carlo SIC SNRs vs their predictions.
pub const PIPELINE_SNR_TOL: f64 = 0.05;

/// Shared knobs for the verification suites.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyConfig {
    /// Cells per axis for the operator grids.
    pub grid: usize,
    /// Monte Carlo trial count.
    pub trials: usize,
    pub seed: u64,
    /// Multiplier applied to the whitening root; 1.0 verifies the whitening identity,
    /// anything else is a deliberate negative control that must fail.
    pub lambda_scale: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            grid: 64,
            trials: 10_000,
            seed: 1,
            lambda_scale: 1.0,
        }
    }
}

/// Outcome of one suite: pass/fail plus the measured residuals.
#[derive(Debug, Clone)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: bool,
    pub details: Vec<String>,
}

impl SuiteResult {
    fn check(name: &'static str, passed: bool, details: Vec<String>) -> Self {
        Self {
            name,
            passed,
            details,
        }
    }
}

/// Results of every suite.
#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub suites: Vec<SuiteResult>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.suites.iter().all(|s| s.passed)
    }
}

fn ref_wave() -> Wave {
    Wave::new(0.0107).expect("valid wavelength")
}

fn ref_user(r: f64) -> UserSource {
    UserSource::new(r, PI / 3.0, PI / 6.0).expect("valid user")
}

/// Projected-noise statistic: the detector output on pure noise is
/// zero-mean complex Gaussian with variance `sigma2 * (dA sum |v|^2)`.
pub fn suite_noise_statistic(cfg: &VerifyConfig) -> Result<SuiteResult> {
    let wave = ref_wave();
    let region = ApertureRegion::planar_rect(0.3, 0.3)?;
    let d = discretize(&region, cfg.grid.min(32))?;
    let user = ref_user(10.0);
    let v = sample_channel_h(&wave, &d, &user);
    let sigma2 = 1.3;
    let nm = NoiseModel::new(sigma2, cfg.seed)?;

    let mut second = 0.0;
    let mut mean = Complex64::new(0.0, 0.0);
    let mut re_parts = Vec::with_capacity(cfg.trials);
    let mut im_parts = Vec::with_capacity(cfg.trials);
    for t in 0..cfg.trials {
        let noise = sample_noise(&d, &nm, t as u64);
        let stat = d.grid_inner(&v, &noise);
        second += stat.norm_sqr();
        mean += stat;
        re_parts.push(stat.re);
        im_parts.push(stat.im);
    }
    let nt = cfg.trials as f64;
    let var_emp = second / nt;
    let expected = sigma2 * d.grid_gain(&v);
    let var_rel = (var_emp / expected - 1.0).abs();

    let kurtosis = |xs: &[f64]| {
        let m = xs.iter().sum::<f64>() / nt;
        let m2 = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / nt;
        let m4 = xs.iter().map(|x| (x - m).powi(4)).sum::<f64>() / nt;
        m4 / (m2 * m2)
    };
    let k_re = kurtosis(&re_parts);
    let k_im = kurtosis(&im_parts);
    let mean_norm = (mean / nt).norm();
    let mean_limit = 4.0 * (expected / nt).sqrt();

    let passed = var_rel <= NOISE_VARIANCE_TOL
        && (KURTOSIS_RANGE.0..=KURTOSIS_RANGE.1).contains(&k_re)
        && (KURTOSIS_RANGE.0..=KURTOSIS_RANGE.1).contains(&k_im)
        && mean_norm <= mean_limit;
    Ok(SuiteResult::check(
        "noise_statistic",
        passed,
        vec![
            format!("variance rel err {var_rel:.4e} (tol {NOISE_VARIANCE_TOL})"),
            format!("kurtosis re {k_re:.3} im {k_im:.3} (range {KURTOSIS_RANGE:?})"),
            format!("mean magnitude {mean_norm:.3e} (limit {mean_limit:.3e})"),
        ],
    ))
}

/// Inverse-kernel round trip: composing the whitening kernel with its
/// closed-form inverse acts as the identity on random sampled functions.
pub fn suite_inverse_kernel(cfg: &VerifyConfig) -> Result<SuiteResult> {
    let wave = ref_wave();
    let region = ApertureRegion::planar_rect(0.25, 0.25)?;
    let d = discretize(&region, cfg.grid.min(24))?;
    let g1 = sample_kernel_g(&wave, &d, &ref_user(10.0));
    let a1 = d.grid_gain(&g1);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(101));
    let mut worst: f64 = 0.0;
    for lam_scale in [0.6, -0.8, 4.0] {
        let lam = lam_scale / a1;
        let k = whitening_kernel(&d, &g1, lam);
        let kinv = crate::operator_lab::inverse_whitening_kernel(&d, &g1, lam);
        let round: KernelMatrix = kinv.compose(&k);
        for _ in 0..34 {
            let f: Vec<Complex64> = (0..d.n())
                .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let out = round.apply(&f);
            let err = out
                .iter()
                .zip(&f)
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                .sqrt();
            let norm = f.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            worst = worst.max(err / norm);
        }
    }
    let passed = worst <= INVERSE_RESIDUAL_TOL;
    Ok(SuiteResult::check(
        "inverse_kernel",
        passed,
        vec![format!(
            "worst relative residual {worst:.3e} over 102 functions (tol {INVERSE_RESIDUAL_TOL:.0e})"
        )],
    ))
}

/// Whitening identity: the whitened autocorrelation is diagonal on the grid
/// for both roots, across randomized two-user geometries.
pub fn suite_whitening(cfg: &VerifyConfig) -> Result<SuiteResult> {
    let wave = ref_wave();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(202));
    let mut details = Vec::new();
    let mut worst: f64 = 0.0;
    for geom in 0..5 {
        let l = rng.random_range(0.1..0.5);
        let (r, phi, theta) = loop {
            let r = rng.random_range(5.0..30.0);
            let phi = rng.random_range(0.05..PI - 0.05);
            let theta = rng.random_range(0.05..PI - 0.05);
            if phi.sin() * theta.sin() >= 0.05 {
                break (r, phi, theta);
            }
        };
        let user = UserSource::new(r, phi, theta)?;
        let region = ApertureRegion::planar_rect(l, l)?;
        let d = discretize(&region, cfg.grid)?;
        let g1 = sample_kernel_g(&wave, &d, &user);
        let gamma1 = 10f64.powf(rng.random_range(1.0..4.0));
        let sigma2 = rng.random_range(0.5..2.0);
        let residuals =
            whitening_residuals_for_roots(&d, &g1, gamma1, sigma2, cfg.lambda_scale)?;
        for (branch, res) in ["plus", "minus"].iter().zip(residuals.iter()) {
            let rel = res.relative();
            worst = worst.max(rel);
            details.push(format!(
                "geometry {geom} branch {branch}: offdiag/diag {rel:.3e} (n = {})",
                res.n
            ));
        }
    }
    let passed = worst <= WHITENING_RESIDUAL_TOL;
    details.push(format!(
        "worst {worst:.3e} (tol {WHITENING_RESIDUAL_TOL:.0e}, lambda scale {})",
        cfg.lambda_scale
    ));
    Ok(SuiteResult::check("whitening", passed, details))
}

/// Whitened-combining SNR: the grid `||hbar||^2` route reproduces the
/// closed form evaluated with quadrature statistics.
pub fn suite_whitened_snr(cfg: &VerifyConfig) -> Result<SuiteResult> {
    let wave = ref_wave();
    let l = 0.16;
    let region = ApertureRegion::planar_rect(l, l)?;
    let u1 = ref_user(10.0);
    let u2 = ref_user(20.0);
    let gamma1 = 1e3;
    let gamma2 = 1e4;

    // closed form with quadrature statistics
    let spec = QuadratureSpec::default();
    let a1q = closed_form_gain_planar(l, l, &u1)?;
    let a2q = closed_form_gain_planar(l, l, &u2)?;
    let rhoq = correlation_rho(&wave, &region, &u1, &u2, &spec)?;
    let ch = TwoUserChannel::new(a1q, a2q, rhoq)?;
    let lb2 = LinkBudget::from_linear(gamma2)?;
    let lamq = lambda_star(gamma1, a1q)?.canonical();
    let gamma2_closed = crate::capacity::gamma2_sic(&lb2, &ch, lamq);

    // discretized whitened-combining route with grid statistics
    let d = discretize(&region, cfg.grid)?;
    let g1 = sample_kernel_g(&wave, &d, &u1);
    let h2 = sample_channel_h(&wave, &d, &u2);
    let a1g = d.grid_gain(&g1);
    let lamg = lambda_star(gamma1, a1g)?.canonical();
    let k_z = whitening_kernel(&d, &g1, lamg);
    let hbar = crate::operator_lab::whitened_channel_hbar(&d, &k_z, &h2);
    let k0 = wave.wavenumber();
    let gamma2_grid =
        gamma2 * (4.0 * PI / (k0 * k0 * wave.impedance().powi(2))) * d.grid_gain(&hbar);

    let rel = (gamma2_grid / gamma2_closed - 1.0).abs();
    let passed = rel <= GAMMA2_GRID_TOL;
    Ok(SuiteResult::check(
        "whitened_snr",
        passed,
        vec![format!(
            "grid {gamma2_grid:.6e} vs closed {gamma2_closed:.6e}: rel err {rel:.3e} (tol {GAMMA2_GRID_TOL})"
        )],
    ))
}

/// Sum-rate consistency: both SIC orders give the same sum rate, which never
/// exceeds the decoupled upper bound, over randomized channel statistics.
pub fn suite_sum_rate_consistency(cfg: &VerifyConfig) -> Result<SuiteResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(303));
    let mut worst_gap: f64 = 0.0;
    let mut worst_branch: f64 = 0.0;
    let n = cfg.trials.max(1);
    for _ in 0..n {
        let g1 = 10f64.powf(rng.random_range(-2.0..4.0));
        let g2 = 10f64.powf(rng.random_range(-2.0..4.0));
        let a1 = 10f64.powf(rng.random_range(-6.0..-0.31));
        let a2 = 10f64.powf(rng.random_range(-6.0..-0.31));
        let ru: f64 = rng.random_range(0.0..=1.0);
        let rho = Complex64::from_polar(ru * (a1 * a2).sqrt(), rng.random_range(0.0..2.0 * PI));
        let ch = TwoUserChannel::new(a1, a2, rho)?;
        let lb1 = LinkBudget::from_linear(g1)?;
        let lb2 = LinkBudget::from_linear(g2)?;
        let s21 = rates_for_order(&lb1, &lb2, &ch, SicOrder::User2First).sum();
        let s12 = rates_for_order(&lb1, &lb2, &ch, SicOrder::User1First).sum();
        let cap = sum_rate_capacity(&lb1, &lb2, &ch);
        worst_gap = worst_gap
            .max((s21 - s12).abs())
            .max((s21 - cap).abs())
            .max((s12 - cap).abs());
        if cap > sum_rate_upper_bound(&lb1, &lb2, &ch) + 1e-12 {
            worst_gap = f64::INFINITY;
        }
        // decode-SNR branch invariance on the same tuple
        let roots = lambda_star(g1, a1)?;
        let gp = crate::capacity::gamma2_sic(&lb2, &ch, roots.plus);
        let gm = crate::capacity::gamma2_sic(&lb2, &ch, roots.minus);
        let denom = gp.abs().max(gm.abs()).max(f64::MIN_POSITIVE);
        worst_branch = worst_branch.max((gp - gm).abs() / denom);
        if gp > g2 * a2 {
            worst_branch = f64::INFINITY;
        }
    }
    let passed = worst_gap <= ORDER_INVARIANCE_BITS && worst_branch <= BRANCH_INVARIANCE_REL;
    Ok(SuiteResult::check(
        "sum_rate_consistency",
        passed,
        vec![
            format!("worst order/sum gap {worst_gap:.3e} bits over {n} tuples (tol {ORDER_INVARIANCE_BITS:.0e})"),
            format!("worst branch mismatch {worst_branch:.3e} (tol {BRANCH_INVARIANCE_REL:.0e})"),
        ],
    ))
}

/// Symbol-level SIC pipeline: empirical per-branch SNRs match predictions,
/// and a noiseless control decodes without error.
pub fn suite_sic_pipeline(cfg: &VerifyConfig) -> Result<SuiteResult> {
    let wave = ref_wave();
    let region = ApertureRegion::planar_rect(0.15, 0.15)?;
    let d = discretize(&region, cfg.grid.min(16))?;
    let u1 = ref_user(10.0);
    let u2 = UserSource::new(8.0, 2.0 * PI / 3.0, PI / 3.0)?;
    let lb1 = LinkBudget::from_db(62.0)?;
    let lb2 = LinkBudget::from_db(64.0)?;
    let nm = NoiseModel::new(1.0, cfg.seed.wrapping_add(404))?;
    let cons = Constellation::qpsk();
    let stats = run_sic_pipeline(
        &wave,
        &d,
        [&u1, &u2],
        [&lb1, &lb2],
        &nm,
        &cons,
        cfg.trials,
    )?;
    let rel1 = (stats.snr1_empirical / stats.gamma1_predicted - 1.0).abs();
    let rel2 = (stats.snr2_empirical / stats.gamma2_predicted - 1.0).abs();

    // noiseless control: physically driven amplitudes, vanishing noise
    let u1n = ref_user(10.0).with_current_density_mag(1.0)?;
    let u2n = UserSource::new(20.0, PI / 3.0, PI / 6.0)?.with_current_density_mag(1.0)?;
    let nm0 = NoiseModel::new(1e-24, cfg.seed.wrapping_add(405))?;
    let clean = run_sic_pipeline(
        &wave,
        &d,
        [&u1n, &u2n],
        [&lb1, &lb2],
        &nm0,
        &cons,
        500.min(cfg.trials),
    )?;

    let passed = rel1 <= PIPELINE_SNR_TOL
        && rel2 <= PIPELINE_SNR_TOL
        && clean.ser_user1 == 0.0
        && clean.ser_user2 == 0.0;
    Ok(SuiteResult::check(
        "sic_pipeline",
        passed,
        vec![
            format!(
                "snr1 {:.4} vs {:.4} (rel {rel1:.3e}), snr2 {:.4} vs {:.4} (rel {rel2:.3e}), tol {PIPELINE_SNR_TOL}",
                stats.snr1_empirical,
                stats.gamma1_predicted,
                stats.snr2_empirical,
                stats.gamma2_predicted
            ),
            format!(
                "noiseless control SER ({}, {}) over {} trials",
                clean.ser_user1, clean.ser_user2, clean.trials
            ),
        ],
    ))
}

/// Run every suite.
pub fn run_all(cfg: &VerifyConfig) -> Result<VerifyReport> {
    Ok(VerifyReport {
        suites: vec![
            suite_noise_statistic(cfg)?,
            suite_inverse_kernel(cfg)?,
            suite_whitening(cfg)?,
            suite_whitened_snr(cfg)?,
            suite_sum_rate_consistency(cfg)?,
            suite_sic_pipeline(cfg)?,
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> VerifyConfig {
        VerifyConfig {
            grid: 12,
            trials: 2000,
            seed: 3,
            lambda_scale: 1.0,
        }
    }

    #[test]
    fn small_grid_suites_pass() {
        let cfg = small();
        for suite in [
            suite_inverse_kernel(&cfg).unwrap(),
            suite_whitening(&cfg).unwrap(),
            suite_sum_rate_consistency(&cfg).unwrap(),
        ] {
            assert!(suite.passed, "{}: {:?}", suite.name, suite.details);
        }
    }

    #[test]
    fn whitening_negative_control_fails() {
        let cfg = VerifyConfig {
            lambda_scale: 1.1,
            ..small()
        };
        let suite = suite_whitening(&cfg).unwrap();
        assert!(!suite.passed);
    }
}
