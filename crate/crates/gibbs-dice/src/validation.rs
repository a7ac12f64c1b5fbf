//! Goodness-of-fit testing: Pearson chi-square statistics, toss simulation,
//! and a parametric bootstrap that propagates manufacturing tolerances on the
//! side lengths into the null distribution of the chi-square statistic.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::{
    energy_pairs, fit_beta_global, global_nll_from_pairs, FitOptions, TossCounts, XxyObservation,
};
use crate::geometry::EnergyNormalization;
use crate::gibbs::{pxx_from_pair, ProbabilityVector};

/// Model verdict under the chi2/m rule: the model is taken to describe the
/// data when the statistic does not exceed the number of cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Consistent,
    Rejected,
}

/// A Pearson chi-square statistic together with the chi2/m rule outcome.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GofResult {
    pub chi2: f64,
    /// Number of cuboids (xxy family) or cells (single-die grouping).
    pub m: usize,
    pub chi2_per_m: f64,
    pub verdict: Verdict,
}

impl GofResult {
    fn from_statistic(chi2: f64, m: usize) -> Self {
        let chi2_per_m = chi2 / m as f64;
        let verdict = if chi2_per_m <= 1.0 {
            Verdict::Consistent
        } else {
            Verdict::Rejected
        };
        Self {
            chi2,
            m,
            chi2_per_m,
            verdict,
        }
    }
}

/// Two-cell Pearson statistic summed over an xxy family:
/// `Σ_j [(N_j·p_j − n_xx,j)²/(N_j·p_j) + (N_j·(1−p_j) − (N_j − n_xx,j))²/(N_j·(1−p_j))]`
/// with `p_j = p_xx,j(β)` from the geometric-mean energies.
pub fn chi_square_xxy(obs: &[XxyObservation], beta: f64) -> Result<GofResult> {
    chi_square_xxy_with(obs, beta, EnergyNormalization::GeometricMean)
}

/// [`chi_square_xxy`] under a caller-chosen normalization.
pub fn chi_square_xxy_with(
    obs: &[XxyObservation],
    beta: f64,
    norm: EnergyNormalization,
) -> Result<GofResult> {
    let pairs = energy_pairs(obs, norm)?;
    let mut chi2 = 0.0;
    for (j, (o, &(ex, ey))) in obs.iter().zip(&pairs).enumerate() {
        let p = pxx_from_pair(ex, ey, beta);
        let n = o.n as f64;
        let (exp_xx, exp_xy) = (n * p, n * (1.0 - p));
        if exp_xx <= 0.0 || exp_xy <= 0.0 {
            return Err(Error::DegenerateCell(format!(
                "cuboid {} (sx={}, sy={}) has a zero expected count at beta={beta}",
                j + 1,
                o.sx,
                o.sy
            )));
        }
        let d_xx = exp_xx - o.n_xx as f64;
        let d_xy = exp_xy - (o.n - o.n_xx) as f64;
        chi2 += d_xx * d_xx / exp_xx + d_xy * d_xy / exp_xy;
    }
    Ok(GofResult::from_statistic(chi2, obs.len()))
}

/// Pearson statistic `Σ_i (n_i − N·p_i)²/(N·p_i)` over the `k` states of a
/// single die, reported with `m = k`.
pub fn chi_square_full(counts: &TossCounts, probs: &ProbabilityVector) -> Result<GofResult> {
    if counts.len() != probs.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} count cells vs {} probabilities",
            counts.len(),
            probs.len()
        )));
    }
    let n = counts.total() as f64;
    let mut chi2 = 0.0;
    for (i, (c, p)) in counts.counts().iter().zip(probs.iter()).enumerate() {
        let expected = n * p;
        if expected <= 0.0 {
            return Err(Error::DegenerateCell(format!(
                "state {} has zero expected count",
                i + 1
            )));
        }
        let d = expected - *c as f64;
        chi2 += d * d / expected;
    }
    Ok(GofResult::from_statistic(chi2, counts.len()))
}

/// Count of successes in `n` Bernoulli trials with probability `p`.
pub fn simulate_binomial(p: f64, n: u64, rng: &mut impl Rng) -> Result<u64> {
    if !(p.is_finite() && (0.0..=1.0).contains(&p)) {
        return Err(Error::InvalidParameter(format!(
            "probability must lie in [0, 1], got {p}"
        )));
    }
    Ok(Binomial::new(n, p)
        .expect("validated probability")
        .sample(rng))
}

/// Multinomial draw of `n` tosses over the states of `probs`, via the chain
/// of conditional binomials.
pub fn simulate_multinomial(probs: &ProbabilityVector, n: u64, rng: &mut impl Rng) -> Vec<u64> {
    let k = probs.len();
    let mut counts = vec![0u64; k];
    let mut remaining = n;
    let mut tail = 1.0;
    for i in 0..k - 1 {
        if remaining == 0 || tail <= 0.0 {
            break;
        }
        let cond = (probs[i] / tail).clamp(0.0, 1.0);
        let draw = Binomial::new(remaining, cond)
            .expect("clamped probability")
            .sample(rng);
        counts[i] = draw;
        remaining -= draw;
        tail -= probs[i];
    }
    counts[k - 1] = remaining;
    counts
}

/// Independent random stream for one unit of work: stream `index` of a
/// ChaCha8 generator seeded with `master_seed`. A pure function of its
/// arguments, so parallel consumers reproduce the sequential results exactly.
pub fn substream(master_seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

/// Configuration of the parametric bootstrap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapConfig {
    /// Number of bootstrap iterations.
    pub iterations: u32,
    /// Relative side-length uncertainty (Gaussian standard deviation as a
    /// fraction of the nominal length).
    pub epsilon: f64,
    pub master_seed: u64,
    /// The fitted beta under test; drives both the observed statistic and the
    /// simulated tossing.
    pub beta0: f64,
    /// Refit each iteration with the perturbed side lengths instead of the
    /// nominal ones (sensitivity analysis; the default models an analyst who
    /// only knows the nominal lengths).
    pub refit_with_perturbed: bool,
}

impl BootstrapConfig {
    pub const DEFAULT_ITERATIONS: u32 = 999;

    pub fn new(epsilon: f64, beta0: f64, master_seed: u64) -> Self {
        Self {
            iterations: Self::DEFAULT_ITERATIONS,
            epsilon,
            master_seed,
            beta0,
            refit_with_perturbed: false,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::InvalidParameter(
                "iterations must be >= 1".to_string(),
            ));
        }
        if !(self.epsilon.is_finite() && self.epsilon >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be finite and >= 0, got {}",
                self.epsilon
            )));
        }
        if !(self.beta0.is_finite() && self.beta0 >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "beta0 must be finite and >= 0, got {}",
                self.beta0
            )));
        }
        Ok(())
    }
}

/// Bootstrap outcome: the observed statistic, the simulated sample in
/// iteration order, and the exceedance p-value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapResult {
    pub chi2_observed: f64,
    pub chi2_simulated: Vec<f64>,
    /// `#{chi2_simulated >= chi2_observed} / iterations`.
    pub p_value: f64,
    pub config: BootstrapConfig,
}

/// Parametric bootstrap test of "one constant beta describes the family".
///
/// Per iteration: every cuboid's side lengths are redrawn from Gaussians with
/// relative width epsilon (redrawing any non-positive value), the xx-state
/// probability is evaluated at `beta0` with the perturbed lengths, `N_j`
/// tosses are simulated, beta is refit on the simulated counts (nominal
/// lengths unless `refit_with_perturbed`), and the chi-square of the
/// simulated counts against the refit model at nominal lengths is recorded.
/// The p-value compares the observed chi-square (at `beta0`, nominal lengths)
/// against that simulated sample.
///
/// Iterations run in a rayon pool; each draws from [`substream`]
/// `(master_seed, iteration)`, so results are bit-identical for any number of
/// threads.
pub fn bootstrap_constant_beta(
    obs: &[XxyObservation],
    cfg: &BootstrapConfig,
) -> Result<BootstrapResult> {
    cfg.validate()?;
    if obs.is_empty() {
        return Err(Error::EmptyData("no xxy observations".to_string()));
    }
    let chi2_observed = chi_square_xxy(obs, cfg.beta0)?.chi2;
    let chi2_simulated: Vec<f64> = (0..cfg.iterations as u64)
        .into_par_iter()
        .map(|iteration| bootstrap_iteration(obs, cfg, iteration))
        .collect::<Result<_>>()?;
    let exceedances = chi2_simulated
        .iter()
        .filter(|c| **c >= chi2_observed)
        .count();
    Ok(BootstrapResult {
        chi2_observed,
        p_value: exceedances as f64 / cfg.iterations as f64,
        chi2_simulated,
        config: *cfg,
    })
}

fn bootstrap_iteration(
    obs: &[XxyObservation],
    cfg: &BootstrapConfig,
    iteration: u64,
) -> Result<f64> {
    let mut rng = substream(cfg.master_seed, iteration);
    let mut simulated = Vec::with_capacity(obs.len());
    let mut perturbed = Vec::with_capacity(obs.len());
    for o in obs {
        let sx_star = positive_normal(&mut rng, o.sx, cfg.epsilon * o.sx);
        let sy_star = positive_normal(&mut rng, o.sy, cfg.epsilon * o.sy);
        let (ex, ey) =
            crate::geometry::xxy_energy_pair(sx_star, sy_star, EnergyNormalization::GeometricMean)?;
        let p_star = pxx_from_pair(ex, ey, cfg.beta0);
        let n_star = simulate_binomial(p_star, o.n, &mut rng)?;
        simulated.push(XxyObservation {
            sx: o.sx,
            sy: o.sy,
            n: o.n,
            n_xx: n_star,
        });
        if cfg.refit_with_perturbed {
            perturbed.push(XxyObservation {
                sx: sx_star,
                sy: sy_star,
                n: o.n,
                n_xx: n_star,
            });
        }
    }
    let refit_rows: &[XxyObservation] = if cfg.refit_with_perturbed {
        &perturbed
    } else {
        &simulated
    };
    let beta_star = fit_beta_global(refit_rows, &FitOptions::default())?.beta_hat;
    Ok(chi_square_xxy(&simulated, beta_star)?.chi2)
}

/// Gaussian draw constrained to be positive; non-positive values are redrawn
/// (practically unreachable for relative widths up to a few percent).
fn positive_normal(rng: &mut impl Rng, mean: f64, std_dev: f64) -> f64 {
    let dist = Normal::new(mean, std_dev).expect("finite mean and non-negative std");
    loop {
        let v = dist.sample(rng);
        if v > 0.0 {
            return v;
        }
    }
}

/// Expected beta under a fitted global model, used by callers that need the
/// objective value at the fitted point without refitting.
pub fn global_nll_at(obs: &[XxyObservation], beta: f64) -> Result<f64> {
    let pairs = energy_pairs(obs, EnergyNormalization::GeometricMean)?;
    Ok(global_nll_from_pairs(&pairs, obs, beta))
}
