//! Maximum-likelihood estimation of the inverse temperature.
//!
//! For a single die with energies `E_i` and observed counts `n_i`, the
//! likelihood `L(β) = Π p_i(β)^{n_i}` is maximized by minimizing
//! `N·[ln Z(β) + β·Σ E_i f_i]` with `f_i = n_i/N`, which equals `−ln L(β)`.
//! For a family of xxy-cuboids sharing one `β`, the global version sums the
//! per-cuboid terms. Both objectives are strictly convex in `β` whenever the
//! counts put mass on states of differing energy (the second derivative is
//! `N·Var_{p(β)}[E]`), so a bracketed derivative-free scalar minimizer finds
//! the unique interior minimum.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{xxy_energy_pair, EnergyNormalization, EnergyVector};
use crate::gibbs::log_partition;

/// Non-negative toss counts per resting state; `N` is their sum.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TossCounts(Vec<u64>);

impl TossCounts {
    pub fn new(counts: Vec<u64>) -> Result<Self> {
        if counts.len() < 2 {
            return Err(Error::EmptyData(format!(
                "need counts for at least 2 states, got {}",
                counts.len()
            )));
        }
        if counts.iter().sum::<u64>() == 0 {
            return Err(Error::EmptyData("all counts are zero".to_string()));
        }
        Ok(Self(counts))
    }

    pub fn counts(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    /// Observed frequencies `f_i = n_i / N`.
    pub fn frequencies(&self) -> Vec<f64> {
        let n = self.total() as f64;
        self.0.iter().map(|c| *c as f64 / n).collect()
    }
}

/// One row of an xxy-cuboid tossing series: side lengths, number of tosses
/// `n`, and the count `n_xx` of square-face-up outcomes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XxyObservation {
    pub sx: f64,
    pub sy: f64,
    pub n: u64,
    pub n_xx: u64,
}

impl XxyObservation {
    pub fn new(sx: f64, sy: f64, n: u64, n_xx: u64) -> Result<Self> {
        if !(sx.is_finite() && sx > 0.0 && sy.is_finite() && sy > 0.0) {
            return Err(Error::InvalidGeometry(format!(
                "side lengths must be positive and finite, got sx={sx}, sy={sy}"
            )));
        }
        if n == 0 {
            return Err(Error::EmptyData("observation has zero tosses".to_string()));
        }
        if n_xx > n {
            return Err(Error::InvalidParameter(format!(
                "n_xx ({n_xx}) exceeds the number of tosses ({n})"
            )));
        }
        Ok(Self { sx, sy, n, n_xx })
    }

    pub fn f_xx(&self) -> f64 {
        self.n_xx as f64 / self.n as f64
    }

    pub fn side_ratio(&self) -> f64 {
        self.sy / self.sx
    }
}

/// Options for the scalar fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    /// Search interval for beta.
    pub bracket: (f64, f64),
    /// Termination tolerance on the bracket width.
    pub tol: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            bracket: (0.0, 100.0),
            tol: 1e-6,
        }
    }
}

/// Outcome of a maximum-likelihood fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub beta_hat: f64,
    /// `−ln L` at the minimizer.
    pub neg_log_likelihood: f64,
    /// Golden-section iterations used.
    pub iterations: u32,
    /// The bracket actually searched (widened once if the upper edge was hit).
    pub bracket: (f64, f64),
    pub converged: bool,
    /// The minimizer ran into the upper bracket edge (β̂ → ∞ regime, e.g. all
    /// observations in minimal-energy states).
    pub at_upper_bound: bool,
}

/// `−ln L(β) = N·[ln Z(β) + β·Σ E_i f_i]` for a single die.
pub fn neg_log_likelihood(energies: &EnergyVector, counts: &TossCounts, beta: f64) -> Result<f64> {
    if energies.len() != counts.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} energies vs {} count cells",
            energies.len(),
            counts.len()
        )));
    }
    if !(beta.is_finite() && beta >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "beta must be finite and >= 0, got {beta}"
        )));
    }
    let n = counts.total() as f64;
    let mean_energy: f64 = energies
        .as_slice()
        .iter()
        .zip(counts.counts())
        .map(|(e, c)| e * *c as f64)
        .sum::<f64>()
        / n;
    Ok(n * (log_partition(energies, beta) + beta * mean_energy))
}

/// Fit `β` for a single die by minimizing [`neg_log_likelihood`].
pub fn fit_beta(
    energies: &EnergyVector,
    counts: &TossCounts,
    opts: &FitOptions,
) -> Result<FitResult> {
    if energies.len() != counts.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} energies vs {} count cells",
            energies.len(),
            counts.len()
        )));
    }
    // With all observations in minimal-energy states the likelihood increases
    // without bound in beta; no interior minimum exists.
    let e_min = energies.min();
    let boundary = energies
        .as_slice()
        .iter()
        .zip(counts.counts())
        .all(|(e, c)| *c == 0 || *e == e_min);
    let e = energies.clone();
    let c = counts.clone();
    fit_scalar(
        move |beta| neg_log_likelihood(&e, &c, beta).expect("validated inputs and bracketed beta"),
        opts,
        boundary,
    )
}

/// Global `−ln L(β)` for a family of xxy-cuboids sharing one `β`:
/// `Σ_j [N_j·ln Z_j(β) + β·(n_xx,j·E_y,j + (N_j − n_xx,j)·E_x,j) − (N_j − n_xx,j)·ln 2]`,
/// with the geometric-mean energies. The `ln 2` term is β-independent (the
/// xy-state aggregates four of the six faces); it is kept so the value is the
/// exact negative log of `Π_j p_xx,j^{n_xx,j}·(1 − p_xx,j)^{N_j − n_xx,j}`,
/// not just equal up to a constant.
pub fn global_neg_log_likelihood(obs: &[XxyObservation], beta: f64) -> Result<f64> {
    global_neg_log_likelihood_with(obs, beta, EnergyNormalization::GeometricMean)
}

/// [`global_neg_log_likelihood`] under a caller-chosen normalization.
pub fn global_neg_log_likelihood_with(
    obs: &[XxyObservation],
    beta: f64,
    norm: EnergyNormalization,
) -> Result<f64> {
    if !(beta.is_finite() && beta >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "beta must be finite and >= 0, got {beta}"
        )));
    }
    let pairs = energy_pairs(obs, norm)?;
    Ok(global_nll_from_pairs(&pairs, obs, beta))
}

pub(crate) fn energy_pairs(
    obs: &[XxyObservation],
    norm: EnergyNormalization,
) -> Result<Vec<(f64, f64)>> {
    if obs.is_empty() {
        return Err(Error::EmptyData("no xxy observations".to_string()));
    }
    obs.iter()
        .map(|o| xxy_energy_pair(o.sx, o.sy, norm))
        .collect()
}

pub(crate) fn global_nll_from_pairs(
    pairs: &[(f64, f64)],
    obs: &[XxyObservation],
    beta: f64,
) -> f64 {
    pairs
        .iter()
        .zip(obs)
        .map(|(&(ex, ey), o)| {
            let m = ex.min(ey);
            let ln_z = (2.0 * (-beta * (ex - m)).exp() + (-beta * (ey - m)).exp()).ln() - beta * m;
            let n = o.n as f64;
            let n_xy = n - o.n_xx as f64;
            n * ln_z + beta * (o.n_xx as f64 * ey + n_xy * ex) - n_xy * std::f64::consts::LN_2
        })
        .sum()
}

/// Fit a constant `β` to a family of xxy-cuboids (geometric-mean energies).
pub fn fit_beta_global(obs: &[XxyObservation], opts: &FitOptions) -> Result<FitResult> {
    fit_beta_global_with(obs, opts, EnergyNormalization::GeometricMean)
}

/// [`fit_beta_global`] under a caller-chosen normalization.
pub fn fit_beta_global_with(
    obs: &[XxyObservation],
    opts: &FitOptions,
    norm: EnergyNormalization,
) -> Result<FitResult> {
    let pairs = energy_pairs(obs, norm)?;
    // The beta -> infinity boundary: every cuboid has all tosses in its
    // minimal-energy macro-state.
    let boundary = pairs.iter().zip(obs).all(|(&(ex, ey), o)| {
        if ex == ey {
            true
        } else if ey < ex {
            o.n_xx == o.n
        } else {
            o.n_xx == 0
        }
    });
    let obs = obs.to_vec();
    fit_scalar(
        move |beta| global_nll_from_pairs(&pairs, &obs, beta),
        opts,
        boundary,
    )
}

/// Bracketed scalar minimization shared by the two fits. A boundary dataset
/// (detected by the caller from the sufficient statistic) or a minimizer that
/// lands on the upper bracket edge widens the bracket once by 10x; the edge
/// of the widened bracket is reported as non-convergence.
fn fit_scalar(f: impl Fn(f64) -> f64, opts: &FitOptions, boundary: bool) -> Result<FitResult> {
    let (lo, mut hi) = opts.bracket;
    if !(lo.is_finite() && hi.is_finite() && lo >= 0.0 && hi > lo) {
        return Err(Error::InvalidParameter(format!(
            "bracket must satisfy 0 <= lo < hi, got ({lo}, {hi})"
        )));
    }
    if !(opts.tol.is_finite() && opts.tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {}",
            opts.tol
        )));
    }
    if boundary {
        hi *= 10.0;
        return Ok(FitResult {
            beta_hat: hi,
            neg_log_likelihood: f(hi),
            iterations: 0,
            bracket: (lo, hi),
            converged: false,
            at_upper_bound: true,
        });
    }
    let mut widened = false;
    let mut total_iters = 0u32;
    loop {
        let (x, fx, iters) = golden_section(&f, lo, hi, opts.tol);
        total_iters += iters;
        // The objective can be flat to within f64 granularity near a boundary
        // solution, stalling the search slightly short of the edge; use a
        // relative margin rather than the bare tolerance.
        let at_edge = hi - x <= (2.0 * opts.tol).max(1e-5 * hi);
        if at_edge && !widened {
            hi *= 10.0;
            widened = true;
            continue;
        }
        return Ok(FitResult {
            beta_hat: x,
            neg_log_likelihood: fx,
            iterations: total_iters,
            bracket: (lo, hi),
            converged: !at_edge,
            at_upper_bound: at_edge,
        });
    }
}

/// Golden-section search for the minimum of a unimodal `f` on `[a, b]`.
/// Returns `(x_min, f(x_min), iterations)` with final interval width <= tol.
fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64, u32) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut iters = 0u32;
    while b - a > tol && iters < 200 {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
        iters += 1;
    }
    let x = 0.5 * (a + b);
    (x, f(x), iters)
}
