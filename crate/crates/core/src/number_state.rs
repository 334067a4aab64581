//! Number-state encoding with photon counting through a pure-loss channel.
//!
//! The capacity under a mean photon number budget is computed with a
//! Blahut-Arimoto iteration. Each update tilts the prior by `e^{-lambda n}`
//! with `lambda` re-solved so that every iterate spends exactly
//! `nbar` photons. Alternating maximization over that constraint set makes
//! the mutual information non-decreasing from one iterate to the next.

use std::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::protocols::{CapacityResult, Protocol};

/// Bracket for the energy price, in nats per photon.
pub const LAMBDA_MAX: f64 = 50.0;

/// Prior mass allowed in the top tenth of the photon-number alphabet. A
/// truncated optimum piles mass up against the cutoff, so this catches
/// alphabets too small to hold the true prior.
pub const TAIL_MASS_LIMIT: f64 = 1e-6;

/// Photon-number transition matrix `P(m | n)` for inputs and outputs
/// `0..=cutoff`. Photons are only lost, so row `n` is stored up to `m = n`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteChannel {
    cutoff: usize,
    rows: Vec<Vec<f64>>,
    // sum_m P ln P per row, nats
    neg_entropy: Vec<f64>,
}

impl DiscreteChannel {
    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.cutoff + 1
    }

    /// `P(m | n)`.
    pub fn prob(&self, m: usize, n: usize) -> f64 {
        self.rows[n].get(m).copied().unwrap_or(0.0)
    }

    /// `P(m | n)` for `m = 0..=n`.
    pub fn row(&self, n: usize) -> &[f64] {
        &self.rows[n]
    }
}

/// Binomial photon survival: `P(m | n) = C(n, m) eta^m (1-eta)^(n-m)`.
pub fn pure_loss_transition(eta: f64, cutoff: usize) -> Result<DiscreteChannel> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::InvalidChannel(format!(
            "transmissivity must lie in [0, 1], got {eta}"
        )));
    }
    if cutoff < 1 {
        return Err(Error::Config("photon-number cutoff must be >= 1".into()));
    }
    let dim = cutoff + 1;
    // ln k! for k = 0..=cutoff
    let mut ln_fact = vec![0.0; dim];
    for k in 1..dim {
        ln_fact[k] = ln_fact[k - 1] + (k as f64).ln();
    }
    let (ln_eta, ln_loss) = (eta.ln(), (1.0 - eta).ln());
    let rows: Vec<Vec<f64>> = (0..dim)
        .map(|n| {
            (0..=n)
                .map(|m| {
                    if eta == 1.0 {
                        if m == n {
                            1.0
                        } else {
                            0.0
                        }
                    } else if eta == 0.0 {
                        if m == 0 {
                            1.0
                        } else {
                            0.0
                        }
                    } else {
                        let ln_binom = ln_fact[n] - ln_fact[m] - ln_fact[n - m];
                        (ln_binom + m as f64 * ln_eta + (n - m) as f64 * ln_loss).exp()
                    }
                })
                .collect()
        })
        .collect();
    let neg_entropy = rows
        .iter()
        .map(|row| row.iter().filter(|&&p| p > 0.0).map(|&p| p * p.ln()).sum())
        .collect();
    Ok(DiscreteChannel {
        cutoff,
        rows,
        neg_entropy,
    })
}

/// Starting cutoff when none is given: `8 max(nbar, 1) + 40`.
pub fn default_cutoff(nbar: f64) -> usize {
    (8.0 * nbar.max(1.0)).ceil() as usize + 40
}

/// Largest multiple of the starting cutoff tried by [`number_state_capacity`].
pub const MAX_CUTOFF_GROWTH: usize = 16;

/// Stopping rules: the run ends once the duality gap drops below `tol` or
/// one update raises the mutual information by less than `info_tol`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaOptions {
    /// Energy mismatch and duality gap (bits) tolerance.
    pub tol: f64,
    /// Per-iteration improvement of the mutual information (bits).
    pub info_tol: f64,
    pub max_iter: usize,
}

impl Default for BaOptions {
    fn default() -> Self {
        BaOptions {
            tol: 1e-8,
            info_tol: 1e-10,
            max_iter: 100_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NumberStateCapacity {
    pub result: CapacityResult,
    /// Optimal prior over photon numbers `0..=cutoff`.
    pub prior: Vec<f64>,
    /// Energy price of the last update, nats per photon.
    pub lambda: f64,
    /// Upper bound minus achieved mutual information, bits.
    pub gap: f64,
    /// Mutual information (bits) of every iterate, starting with the initial prior.
    pub history: Vec<f64>,
}

impl NumberStateCapacity {
    pub fn bits(&self) -> f64 {
        self.result.bits
    }

    pub fn mean_photons(&self) -> f64 {
        mean(&self.prior)
    }

    pub fn iterations(&self) -> usize {
        self.history.len()
    }

    pub fn cutoff(&self) -> usize {
        self.prior.len() - 1
    }
}

fn mean(p: &[f64]) -> f64 {
    p.iter().enumerate().map(|(n, &w)| n as f64 * w).sum()
}

/// Normalized `exp(log_w[n] - lambda n)`; returns its mean, variance and
/// log normalizer.
fn tilt(log_w: &[f64], lambda: f64, out: &mut [f64]) -> (f64, f64, f64) {
    let shift = log_w
        .iter()
        .enumerate()
        .map(|(n, &w)| w - lambda * n as f64)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut total = 0.0;
    for (n, (o, &w)) in out.iter_mut().zip(log_w).enumerate() {
        *o = (w - lambda * n as f64 - shift).exp();
        total += *o;
    }
    let (mut m1, mut m2) = (0.0, 0.0);
    for (n, o) in out.iter_mut().enumerate() {
        *o /= total;
        let x = n as f64;
        m1 += x * *o;
        m2 += x * x * *o;
    }
    (m1, (m2 - m1 * m1).max(0.0), shift + total.ln())
}

/// Tilt `log_w` so the result has mean `nbar`; returns the price used and
/// the log normalizer.
/// A zero price is returned when the untilted distribution already spends
/// no more than `nbar`. Newton steps from `guess`, falling back to bisection
/// whenever a step leaves the bracket.
fn tilt_to_mean(log_w: &[f64], nbar: f64, guess: f64, out: &mut [f64]) -> (f64, f64) {
    let (m0, _, log_z) = tilt(log_w, 0.0, out);
    if m0 <= nbar {
        return (0.0, log_z);
    }
    let target = 1e-13 * nbar.max(1.0);
    let (mut lo, mut hi) = (0.0, LAMBDA_MAX);
    let mut lambda = guess.clamp(0.0, LAMBDA_MAX);
    for _ in 0..200 {
        let (m, var, log_z) = tilt(log_w, lambda, out);
        let excess = m - nbar;
        if excess.abs() <= target {
            return (lambda, log_z);
        }
        if excess > 0.0 {
            lo = lambda;
        } else {
            hi = lambda;
        }
        let step = lambda + excess / var;
        lambda = if var > 0.0 && step > lo && step < hi {
            step
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo < 1e-15 {
            break;
        }
    }
    let (_, _, log_z) = tilt(log_w, lambda, out);
    (lambda, log_z)
}

fn upper_bound(divergence: &[f64], nbar: f64, lambda: f64) -> f64 {
    divergence
        .iter()
        .enumerate()
        .map(|(n, d)| d - lambda * (n as f64 - nbar))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// `max_n D_n - lam (n - nbar)` bounds the capacity from above for every
/// `lam >= 0`; it is convex in `lam`, so refine the price by ternary search
/// around the current one.
fn dual_bound(divergence: &[f64], nbar: f64, lambda: f64) -> f64 {
    let bound = |lam: f64| upper_bound(divergence, nbar, lam);
    let (mut lo, mut hi) = (0.0, LAMBDA_MAX.min(2.0 * lambda + 1.0));
    for _ in 0..100 {
        let a = lo + (hi - lo) / 3.0;
        let b = hi - (hi - lo) / 3.0;
        if bound(a) <= bound(b) {
            hi = b;
        } else {
            lo = a;
        }
    }
    bound(0.5 * (lo + hi)).min(bound(lambda))
}

/// Capacity of number-state communication through `ch` with at most `nbar`
/// photons per use on average.
pub fn ba_capacity(
    ch: &DiscreteChannel,
    nbar: f64,
    opts: &BaOptions,
) -> Result<NumberStateCapacity> {
    if !(nbar > 0.0) || !nbar.is_finite() {
        return Err(Error::Domain(format!(
            "number-state capacity needs nbar > 0, got {nbar}"
        )));
    }
    if !(opts.tol > 0.0) || !(opts.info_tol >= 0.0) || opts.max_iter == 0 {
        return Err(Error::Config(
            "tolerances must be positive and max_iter >= 1".into(),
        ));
    }
    let dim = ch.dim();
    if nbar >= ch.cutoff() as f64 {
        return Err(Error::Config(format!(
            "cutoff {} cannot carry {nbar} photons on average",
            ch.cutoff()
        )));
    }

    // The prior is also carried in log form: entries that underflow in
    // linear form must still be able to grow back.
    let mut prior = vec![0.0; dim];
    let mut log_prior = vec![0.0; dim];
    let (mut lambda, log_z) = tilt_to_mean(&log_prior, nbar, 1.0, &mut prior);
    for (n, lp) in log_prior.iter_mut().enumerate() {
        *lp = -lambda * n as f64 - log_z;
    }

    let mut output = vec![0.0; dim];
    let mut ln_output = vec![0.0; dim];
    let mut divergence = vec![0.0; dim];
    let mut log_w = vec![0.0; dim];
    let mut next = vec![0.0; dim];
    let mut history = Vec::new();
    let mut gap = f64::INFINITY;
    let mut converged = false;

    for _ in 0..opts.max_iter {
        output.iter_mut().for_each(|q| *q = 0.0);
        for (n, &pn) in prior.iter().enumerate() {
            for (q, &pmn) in output.iter_mut().zip(ch.row(n)) {
                *q += pn * pmn;
            }
        }
        for (lq, &q) in ln_output.iter_mut().zip(&output) {
            // q underflows only where every contributing prior mass did
            *lq = q.max(f64::MIN_POSITIVE).ln();
        }
        for (n, d) in divergence.iter_mut().enumerate() {
            let cross: f64 = ch.row(n).iter().zip(&ln_output).map(|(p, lq)| p * lq).sum();
            *d = ch.neg_entropy[n] - cross;
        }
        let info: f64 = prior
            .iter()
            .zip(&divergence)
            .filter(|(&p, _)| p > 0.0)
            .map(|(p, d)| p * d)
            .sum();
        let stalled = history
            .last()
            .is_some_and(|&prev| info / LN_2 - prev < opts.info_tol);
        history.push(info / LN_2);

        for n in 0..dim {
            log_w[n] = log_prior[n] + divergence[n];
        }
        let (price, log_z) = tilt_to_mean(&log_w, nbar, lambda, &mut next);
        lambda = price;

        gap = (upper_bound(&divergence, nbar, lambda) - info).max(0.0) / LN_2;
        if gap < opts.tol || stalled {
            gap = (dual_bound(&divergence, nbar, lambda) - info).max(0.0) / LN_2;
            converged = true;
            break;
        }
        std::mem::swap(&mut prior, &mut next);
        for (n, lp) in log_prior.iter_mut().enumerate() {
            *lp = log_w[n] - lambda * n as f64 - log_z;
        }
    }

    let last = *history.last().unwrap_or(&0.0);
    if !converged {
        return Err(Error::Convergence {
            iterations: history.len(),
            last_bits: last,
            gap,
        });
    }
    let top = dim - dim.div_ceil(10);
    let tail_mass: f64 = prior[top..].iter().sum();
    if tail_mass > TAIL_MASS_LIMIT {
        return Err(Error::Truncation { tail_mass });
    }
    let energy = mean(&prior);
    let result = CapacityResult::new(last, Protocol::NumberState)
        .with("lambda", lambda)
        .with("mean_photons", energy)
        .with("cutoff", ch.cutoff() as f64)
        .with("gap", gap)
        .with("iterations", history.len() as f64);
    Ok(NumberStateCapacity {
        result,
        prior,
        lambda,
        gap,
        history,
    })
}

/// Number-state capacity of a pure-loss channel. The cutoff starts at
/// [`default_cutoff`] and doubles while the optimal prior runs into it.
pub fn number_state_capacity(eta: f64, nbar: f64, opts: &BaOptions) -> Result<NumberStateCapacity> {
    let start = default_cutoff(nbar);
    let mut cutoff = start;
    loop {
        let ch = pure_loss_transition(eta, cutoff)?;
        match ba_capacity(&ch, nbar, opts) {
            Err(Error::Truncation { .. }) if cutoff < start * MAX_CUTOFF_GROWTH => cutoff *= 2,
            other => return other,
        }
    }
}
