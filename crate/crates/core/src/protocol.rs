//! Prepare-and-measure Monte Carlo: symbol draws, a thermal-loss channel
//! with heterodyne detection, Bernoulli sifting, moment-based parameter
//! estimation and MAP / minimum-distance symbol decisions.
//!
//! Heterodyne outcomes follow the Husimi convention: for a lossless,
//! noiseless link `p(y|α) = exp(−|y − α|²)/π`, so the complex noise variance
//! is 1. The channel scales amplitudes by `√τ` and adds `τξ/2` of complex
//! variance. Reconciliation and privacy amplification are not simulated.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::bipartite::ChannelModel;
use crate::constellation::Constellation;
use crate::rng;
use crate::{Error, Result, C64};

/// Minimum number of test rounds for parameter estimation.
pub const MIN_TEST_ROUNDS: usize = 30;
/// Minimum protocol length.
pub const MIN_ROUNDS: usize = 100;

/// Complex noise variance per symbol, `1 + τξ/2`.
pub fn noise_variance(ch: &ChannelModel) -> f64 {
    1.0 + ch.tau * ch.xi / 2.0
}

/// `y_j = √τ·x_j + z_j` with circular complex Gaussian `z_j` of variance
/// [`noise_variance`].
pub fn simulate_channel(x: &[C64], ch: &ChannelModel, seed: u64) -> Vec<C64> {
    let mut rng = rng::stream(seed, rng::STREAM_NOISE);
    let gain = ch.tau.sqrt();
    let sd = (noise_variance(ch) / 2.0).sqrt();
    x.iter()
        .map(|&xj| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            xj * gain + C64::new(re * sd, im * sd)
        })
        .collect()
}

/// Nearest point in the received frame, `argmin_k |y − √τ x_k|²`. Ties go to
/// the lowest index.
pub fn md_estimate(y: C64, c: &Constellation, ch: &ChannelModel) -> usize {
    let gain = ch.tau.sqrt();
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (k, x) in c.points().iter().enumerate() {
        let d = (y - x * gain).norm_sqr();
        if d < best_d {
            best = k;
            best_d = d;
        }
    }
    best
}

/// Posterior maximiser `argmax_k p_k·exp(−|y − √τ x_k|²/σ²)`. Ties go to the
/// lowest index; with equal priors this is exactly [`md_estimate`].
pub fn map_estimate(y: C64, c: &Constellation, ch: &ChannelModel) -> usize {
    if c.is_uniform() {
        return md_estimate(y, c, ch);
    }
    let gain = ch.tau.sqrt();
    let var = noise_variance(ch);
    let mut best = 0;
    let mut best_score = f64::NEG_INFINITY;
    for (k, (x, p)) in c.points().iter().zip(c.probs()).enumerate() {
        let score = p.ln() - (y - x * gain).norm_sqr() / var;
        if score > best_score {
            best = k;
            best_score = score;
        }
    }
    best
}

/// Channel estimate from test rounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamEstimate {
    /// Amplitude gain `t̂ = Σ Re(x̄y)/Σ|x|²`.
    pub gain: f64,
    pub tau_hat: f64,
    /// Standard error of `τ̂` by the delta method.
    pub tau_se: f64,
    /// Residual complex variance `(1/n)Σ|y − t̂x|²`.
    pub noise_var: f64,
    pub xi_hat: f64,
    /// `ξ̂` came out negative and was set to zero.
    pub xi_clamped: bool,
    pub n: usize,
}

impl ParamEstimate {
    /// Channel model implied by the estimate; `τ̂` may exceed 1 by
    /// statistical fluctuation and is passed through unchecked.
    pub fn channel(&self) -> ChannelModel {
        ChannelModel {
            tau: self.tau_hat,
            xi: self.xi_hat,
        }
    }
}

/// First- and second-moment estimate of `(τ, ξ)`.
pub fn estimate_params(x_test: &[C64], y_test: &[C64]) -> Result<ParamEstimate> {
    if x_test.len() != y_test.len() {
        return Err(Error::DimensionMismatch(x_test.len(), y_test.len()));
    }
    let n = x_test.len();
    if n < MIN_TEST_ROUNDS {
        return Err(Error::InsufficientTestData(format!(
            "{n} test rounds, need at least {MIN_TEST_ROUNDS}"
        )));
    }
    let energy: f64 = x_test.iter().map(|x| x.norm_sqr()).sum();
    if !(energy > 0.0) {
        return Err(Error::InsufficientTestData("test symbols carry no energy".into()));
    }
    let cross: f64 = x_test.iter().zip(y_test).map(|(x, y)| (x.conj() * y).re).sum();
    let gain = cross / energy;
    let tau_hat = gain * gain;
    if !(tau_hat > 0.0) {
        return Err(Error::InsufficientTestData("estimated gain vanishes".into()));
    }
    let noise_var = x_test
        .iter()
        .zip(y_test)
        .map(|(x, y)| (y - x * gain).norm_sqr())
        .sum::<f64>()
        / n as f64;
    let raw_xi = 2.0 * (noise_var - 1.0) / tau_hat;
    let tau_se = 2.0 * gain.abs() * (noise_var / 2.0 / energy).sqrt();
    Ok(ParamEstimate {
        gain,
        tau_hat,
        tau_se,
        noise_var,
        xi_hat: raw_xi.max(0.0),
        xi_clamped: raw_xi < 0.0,
        n,
    })
}

/// Caller-chosen abort thresholds for the parameter-estimation step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AbortThresholds {
    pub tau_min: f64,
    pub xi_max: f64,
}

/// One protocol execution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolRun {
    pub channel: ChannelModel,
    pub rounds: usize,
    pub test_fraction: f64,
    pub seed: u64,
    #[serde(default)]
    pub abort: Option<AbortThresholds>,
}

impl ProtocolRun {
    pub fn validate(&self) -> Result<()> {
        self.channel.validate()?;
        if self.rounds < MIN_ROUNDS {
            return Err(Error::NonPhysicalInput(format!(
                "rounds must be >= {MIN_ROUNDS}, got {}",
                self.rounds
            )));
        }
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return Err(Error::NonPhysicalInput(format!(
                "test_fraction must lie in (0, 1), got {}",
                self.test_fraction
            )));
        }
        Ok(())
    }
}

/// Terminal outputs of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimationResult {
    pub tau_hat: f64,
    pub tau_se: f64,
    pub xi_hat: f64,
    pub xi_clamped: bool,
    pub n_test: usize,
    pub n_key: usize,
    /// Symbol error rate on key rounds with MAP decisions.
    pub ser_map: f64,
    /// Symbol error rate on key rounds with minimum-distance decisions.
    pub ser_md: f64,
    /// Standard error of the paired difference `ser_map − ser_md`.
    pub ser_diff_se: f64,
    /// Present when abort thresholds were supplied.
    pub aborted: Option<bool>,
}

/// Per-round record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundRecord {
    pub sent: usize,
    pub x: C64,
    pub y: C64,
    pub test: bool,
    pub decision_map: usize,
    pub decision_md: usize,
}

#[derive(Debug, Clone)]
pub struct ProtocolTranscript {
    pub result: EstimationResult,
    pub estimate: ParamEstimate,
    pub rounds: Vec<RoundRecord>,
}

/// Runs state preparation, transmission, sifting, estimation and symbol
/// decisions. Each round joins the test set independently with probability
/// `test_fraction`. Symbols, noise and sifting draw from separate seeded
/// streams, so changing one stage never perturbs the others.
pub fn run_protocol(run: &ProtocolRun, c: &Constellation) -> Result<ProtocolTranscript> {
    run.validate()?;
    let sent = c.sample_indices(run.seed, run.rounds);
    let x: Vec<C64> = sent.iter().map(|&k| c.points()[k]).collect();
    let y = simulate_channel(&x, &run.channel, run.seed);

    let mut sift = rng::stream(run.seed, rng::STREAM_SIFTING);
    let test: Vec<bool> = (0..run.rounds)
        .map(|_| sift.random::<f64>() < run.test_fraction)
        .collect();

    let (mut x_test, mut y_test) = (Vec::new(), Vec::new());
    for j in (0..run.rounds).filter(|&j| test[j]) {
        x_test.push(x[j]);
        y_test.push(y[j]);
    }
    let estimate = estimate_params(&x_test, &y_test)?;
    let detector = estimate.channel();

    let mut rounds = Vec::with_capacity(run.rounds);
    let (mut err_map, mut err_md, mut n_key) = (0usize, 0usize, 0usize);
    let (mut diff_sum, mut diff_sq) = (0.0f64, 0.0f64);
    for j in 0..run.rounds {
        let decision_map = map_estimate(y[j], c, &detector);
        let decision_md = md_estimate(y[j], c, &detector);
        if !test[j] {
            n_key += 1;
            let e_map = (decision_map != sent[j]) as i32;
            let e_md = (decision_md != sent[j]) as i32;
            err_map += e_map as usize;
            err_md += e_md as usize;
            let d = (e_map - e_md) as f64;
            diff_sum += d;
            diff_sq += d * d;
        }
        rounds.push(RoundRecord {
            sent: sent[j],
            x: x[j],
            y: y[j],
            test: test[j],
            decision_map,
            decision_md,
        });
    }
    if n_key == 0 {
        return Err(Error::InsufficientTestData("no key rounds left after sifting".into()));
    }
    let nk = n_key as f64;
    let mean_diff = diff_sum / nk;
    let var_diff = (diff_sq / nk - mean_diff * mean_diff).max(0.0);

    let result = EstimationResult {
        tau_hat: estimate.tau_hat,
        tau_se: estimate.tau_se,
        xi_hat: estimate.xi_hat,
        xi_clamped: estimate.xi_clamped,
        n_test: x_test.len(),
        n_key,
        ser_map: err_map as f64 / nk,
        ser_md: err_md as f64 / nk,
        ser_diff_se: (var_diff / nk).sqrt(),
        aborted: run
            .abort
            .map(|t| estimate.tau_hat < t.tau_min || estimate.xi_hat > t.xi_max),
    };
    Ok(ProtocolTranscript {
        result,
        estimate,
        rounds,
    })
}
