//! General single-channel Gaussian protocol: squeezed input with squeezing
//! `r`, independent Gaussian displacements of variance `sigma_x^2` and
//! `sigma_p^2`, and a receiver projecting onto displaced squeezed states of
//! squeezing `s`.
//!
//! The optimum is found in stages: the encoding split for fixed `(r, s)`,
//! then `r` for fixed `s`, then `s`. The result always reduces to the better
//! of coherent-state and squeezed-state communication, which
//! [`brute_force_capacity`] checks by exhaustive search.

use crate::error::{Error, Result};
use crate::gaussian::ChannelParams;
use crate::optimize::bisect;
use crate::protocols::{
    check_nbar, coherent_capacity, log2_1p, squeezed_capacity, CapacityResult, Protocol, KEY_R_OPT,
    KEY_SIGMA_P2, KEY_SIGMA_X2, KEY_S_OPT,
};

/// Bisection tolerance in `s` for the two-quadrature feasibility boundary.
const BOUNDARY_TOL: f64 = 1e-10;

/// Coherent and squeezed capacities closer than this are reported as a
/// coherent-state win.
const TIE_TOL: f64 = 1e-12;

/// Input squeezing and displacement variances of the encoding ensemble.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EncodingSpec {
    pub r: f64,
    pub sigma_x2: f64,
    pub sigma_p2: f64,
}

impl EncodingSpec {
    pub fn new(r: f64, sigma_x2: f64, sigma_p2: f64) -> Result<Self> {
        if !r.is_finite() || !(sigma_x2 >= 0.0) || !(sigma_p2 >= 0.0) {
            return Err(Error::Domain(format!(
                "encoding requires finite r and nonnegative variances, got r={r}, \
                 sigma_x2={sigma_x2}, sigma_p2={sigma_p2}"
            )));
        }
        Ok(EncodingSpec {
            r,
            sigma_x2,
            sigma_p2,
        })
    }

    /// Encoding that spends exactly `nbar` photons: `sigma_p^2` takes
    /// whatever `sigma_x^2` and the squeezing leave over.
    pub fn with_energy(nbar: f64, r: f64, sigma_x2: f64) -> Result<Self> {
        check_nbar(nbar)?;
        let budget = 2.0 * (nbar - r.sinh().powi(2));
        let sigma_p2 = budget - sigma_x2;
        // allow rounding noise in the remainder
        if sigma_p2 < 0.0 && sigma_p2 > -1e-12 * (1.0 + budget.abs()) {
            return Self::new(r, sigma_x2, 0.0);
        }
        Self::new(r, sigma_x2, sigma_p2)
    }

    /// `(sigma_x^2 + sigma_p^2)/2 + sinh^2 r`.
    pub fn energy(&self) -> f64 {
        0.5 * (self.sigma_x2 + self.sigma_p2) + self.r.sinh().powi(2)
    }
}

/// Gaussian receiver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeasurementSpec {
    /// Projection onto displaced squeezed states; `s = 0` is heterodyne.
    Projective(f64),
    /// Ideal homodyne detection of `x`.
    HomodyneX,
}

impl MeasurementSpec {
    pub fn heterodyne() -> Self {
        MeasurementSpec::Projective(0.0)
    }
}

/// Mutual information in bits of the general protocol.
pub fn general_capacity(
    ch: &ChannelParams,
    enc: &EncodingSpec,
    meas: MeasurementSpec,
) -> Result<f64> {
    let k = ch.strength();
    let noise = ch.added_noise();
    let r = enc.r;
    let var_x_out = 0.5 * (k * (-2.0 * r).exp() + noise);
    match meas {
        MeasurementSpec::HomodyneX => {
            if enc.sigma_p2 > 0.0 {
                return Err(Error::InvalidCombination(
                    "homodyne-x readout discards p, so sigma_p2 must be 0".into(),
                ));
            }
            if enc.sigma_x2 == 0.0 || k == 0.0 {
                return Ok(0.0);
            }
            Ok(0.5 * log2_1p(k * enc.sigma_x2 / var_x_out))
        }
        MeasurementSpec::Projective(s) => {
            if !s.is_finite() {
                return Err(Error::Domain(format!(
                    "measurement squeezing must be finite, got {s}"
                )));
            }
            let var_p_out = 0.5 * (k * (2.0 * r).exp() + noise);
            let dx = var_x_out + 0.5 * (-2.0 * s).exp();
            let dp = var_p_out + 0.5 * (2.0 * s).exp();
            let term = |sig2: f64, var: f64| {
                if sig2 == 0.0 || k == 0.0 {
                    0.0
                } else {
                    log2_1p(k * sig2 / var)
                }
            };
            Ok(0.5 * (term(enc.sigma_x2, dx) + term(enc.sigma_p2, dp)))
        }
    }
}

/// `1/2 sinh 2r + sinh 2s / (2k)`: half the difference between the two
/// optimal encoding variances.
fn split_imbalance(k: f64, r: f64, s: f64) -> f64 {
    let meas = if s == 0.0 {
        0.0
    } else {
        (2.0 * s).sinh() / (2.0 * k)
    };
    0.5 * (2.0 * r).sinh() + meas
}

/// Water-filling split of the displacement energy between `x` and `p` for
/// fixed input squeezing `r` and receiver squeezing `s`.
///
/// Fails with [`Error::InfeasibleSplit`] when the optimum would put nothing
/// on `p`, i.e. single-quadrature encoding is optimal.
pub fn optimal_encoding_split(ch: &ChannelParams, r: f64, s: f64, nbar: f64) -> Result<(f64, f64)> {
    check_nbar(nbar)?;
    let available = nbar - r.sinh().powi(2);
    let imbalance = split_imbalance(ch.strength(), r, s);
    if !(available > imbalance.abs()) {
        return Err(Error::InfeasibleSplit {
            available,
            imbalance,
        });
    }
    Ok((available + imbalance, available - imbalance))
}

/// Input squeezing that best matches a receiver of squeezing `s`:
/// `e^{2r} = sqrt((N + e^{2s}) / (N + e^{-2s}))`.
pub fn optimal_input_squeezing(ch: &ChannelParams, s: f64) -> f64 {
    let noise = ch.added_noise();
    // ln(N + e^{2s}) = 2s + ln(1 + N e^{-2s}) keeps large s finite
    let ln_num = 2.0 * s + (noise * (-2.0 * s).exp()).ln_1p();
    let ln_den = (noise + (-2.0 * s).exp()).ln();
    0.25 * (ln_num - ln_den)
}

/// Capacity of the two-quadrature scheme after optimizing the split and the
/// input squeezing, as a function of the receiver squeezing `s`.
pub fn two_quadrature_capacity_at(ch: &ChannelParams, nbar: f64, s: f64) -> f64 {
    let k = ch.strength();
    let noise = ch.added_noise();
    let c2s = (2.0 * s).cosh();
    let num = k + 2.0 * k * nbar + noise + c2s;
    let den = k + (1.0 + noise * noise + 2.0 * noise * c2s).sqrt();
    (num / den).log2()
}

/// Stationary point of [`two_quadrature_capacity_at`] in `s > 0`, if any.
///
/// Solves `d/ds = 0` for `c = cosh 2s`: with `y = sqrt(1 + N^2 + 2Nc)`,
/// `y = -k + sqrt(k^2 - 1 + N(2k + 4kn + N))` and
/// `c = (k^2 - 1 + Nk + 2Nkn - k sqrt(...)) / N`.
pub fn interior_critical_point(ch: &ChannelParams, nbar: f64) -> Option<f64> {
    let k = ch.strength();
    let noise = ch.added_noise();
    if noise <= 0.0 {
        return None;
    }
    let disc = -1.0 + k * k + noise * (2.0 * k + 4.0 * k * nbar + noise);
    if disc < 0.0 {
        return None;
    }
    let c2s = (k * k - 1.0 + noise * k + 2.0 * noise * k * nbar - k * disc.sqrt()) / noise;
    if c2s > 1.0 && c2s.is_finite() {
        Some(0.5 * c2s.acosh())
    } else {
        None
    }
}

/// Signed slack of the two-quadrature condition with `r = r_opt(s)`:
/// positive while both quadratures carry signal.
fn feasibility_margin(ch: &ChannelParams, nbar: f64, s: f64) -> f64 {
    let r = optimal_input_squeezing(ch, s);
    let available = nbar - r.sinh().powi(2);
    available - split_imbalance(ch.strength(), r, s).abs()
}

/// Largest `s` for which the two-quadrature scheme is feasible.
pub fn feasibility_boundary(ch: &ChannelParams, nbar: f64) -> Result<f64> {
    check_nbar(nbar)?;
    let k = ch.strength();
    if nbar == 0.0 || k == 0.0 {
        return Ok(0.0);
    }
    let s_cap = (2.0 * k * nbar).asinh() + 5.0;
    debug_assert!(feasibility_margin(ch, nbar, s_cap) < 0.0);
    Ok(bisect(
        |s| feasibility_margin(ch, nbar, s),
        0.0,
        s_cap,
        BOUNDARY_TOL,
    ))
}

/// Maximum of the two-quadrature capacity over the receiver squeezing.
///
/// Candidates are `s = 0`, the interior stationary point when it lies inside
/// the feasible range, and the feasibility boundary.
pub fn two_quadrature_optimum_over_s(ch: &ChannelParams, nbar: f64) -> Result<CapacityResult> {
    check_nbar(nbar)?;
    let k = ch.strength();
    if nbar == 0.0 || k == 0.0 {
        return Ok(CapacityResult::new(0.0, Protocol::GeneralGaussian)
            .with(KEY_S_OPT, 0.0)
            .with(KEY_R_OPT, 0.0)
            .with(KEY_SIGMA_X2, nbar)
            .with(KEY_SIGMA_P2, nbar));
    }
    let boundary = feasibility_boundary(ch, nbar)?;
    let mut candidates = vec![0.0];
    if let Some(s) = interior_critical_point(ch, nbar) {
        if s < boundary {
            candidates.push(s);
        }
    }
    candidates.push(boundary);

    let mut best_s = 0.0;
    let mut best = f64::NEG_INFINITY;
    for s in candidates {
        let c = two_quadrature_capacity_at(ch, nbar, s);
        if c > best {
            best = c;
            best_s = s;
        }
    }
    let r = optimal_input_squeezing(ch, best_s);
    let available = nbar - r.sinh().powi(2);
    let imbalance = split_imbalance(k, r, best_s);
    Ok(CapacityResult::new(best, Protocol::GeneralGaussian)
        .with(KEY_S_OPT, best_s)
        .with(KEY_R_OPT, r)
        .with(KEY_SIGMA_X2, (available + imbalance).max(0.0))
        .with(KEY_SIGMA_P2, (available - imbalance).max(0.0)))
}

/// Best single-channel Gaussian capacity: the larger of the coherent-state
/// and squeezed-state schemes.
pub fn optimal_gaussian_capacity(ch: &ChannelParams, nbar: f64) -> Result<CapacityResult> {
    let coh = coherent_capacity(ch, nbar)?;
    let sq = squeezed_capacity(ch, nbar)?;
    if sq.bits > coh.bits + TIE_TOL {
        Ok(sq)
    } else {
        Ok(coh)
    }
}

/// Search grid for [`brute_force_capacity`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub r_steps: usize,
    pub s_steps: usize,
    pub split_steps: usize,
    /// Defaults to `asinh(sqrt(nbar))`, where squeezing uses all the energy.
    pub r_max: Option<f64>,
    /// Defaults to `asinh(2 k nbar) + 2`.
    pub s_max: Option<f64>,
}

impl GridSpec {
    pub const MIN_STEPS: usize = 16;

    pub fn cube(steps: usize) -> Self {
        GridSpec {
            r_steps: steps,
            s_steps: steps,
            split_steps: steps,
            r_max: None,
            s_max: None,
        }
    }

    fn validate(&self) -> Result<()> {
        let small = [self.r_steps, self.s_steps, self.split_steps]
            .iter()
            .any(|&n| n < Self::MIN_STEPS);
        if small {
            return Err(Error::Config(format!(
                "grid needs at least {} points per axis, got {:?}",
                Self::MIN_STEPS,
                (self.r_steps, self.s_steps, self.split_steps)
            )));
        }
        for (name, bound) in [("r_max", self.r_max), ("s_max", self.s_max)] {
            if let Some(v) = bound {
                if !(v > 0.0) || !v.is_finite() {
                    return Err(Error::Config(format!(
                        "{name} must be finite and > 0, got {v}"
                    )));
                }
            }
        }
        Ok(())
    }
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec::cube(64)
    }
}

fn linspace(max: f64, steps: usize) -> impl Iterator<Item = f64> {
    (0..steps).map(move |i| max * i as f64 / (steps - 1) as f64)
}

/// Exhaustive maximum of [`general_capacity`] over an `(r, s, split)` grid,
/// plus homodyne readout of a single-quadrature encoding for every `r`.
///
/// Grid points are visited in a fixed order and only a strictly larger value
/// replaces the incumbent, so ties resolve to the first point visited.
pub fn brute_force_capacity(
    ch: &ChannelParams,
    nbar: f64,
    grid: &GridSpec,
) -> Result<CapacityResult> {
    check_nbar(nbar)?;
    grid.validate()?;
    let k = ch.strength();
    if nbar == 0.0 || k == 0.0 {
        return Ok(CapacityResult::new(0.0, Protocol::GeneralGaussian));
    }
    let r_max = grid.r_max.unwrap_or_else(|| nbar.sqrt().asinh());
    let s_max = grid.s_max.unwrap_or_else(|| (2.0 * k * nbar).asinh() + 2.0);

    let mut best = f64::NEG_INFINITY;
    let mut arg = (0.0, 0.0, 0.0, 0.0);
    let mut consider = |bits: f64, point: (f64, f64, f64, f64)| {
        if bits > best {
            best = bits;
            arg = point;
        }
    };

    for r in linspace(r_max, grid.r_steps) {
        let budget = 2.0 * (nbar - r.sinh().powi(2));
        if budget < 0.0 {
            continue;
        }
        let enc = EncodingSpec::new(r, budget, 0.0)?;
        let bits = general_capacity(ch, &enc, MeasurementSpec::HomodyneX)?;
        consider(bits, (r, f64::INFINITY, budget, 0.0));

        for s in linspace(s_max, grid.s_steps) {
            for frac in linspace(1.0, grid.split_steps) {
                let sx2 = budget * frac;
                let sp2 = (budget - sx2).max(0.0);
                let enc = EncodingSpec::new(r, sx2, sp2)?;
                let bits = general_capacity(ch, &enc, MeasurementSpec::Projective(s))?;
                consider(bits, (r, s, sx2, sp2));
            }
        }
    }

    let (r, s, sx2, sp2) = arg;
    Ok(CapacityResult::new(best, Protocol::GeneralGaussian)
        .with(KEY_R_OPT, r)
        .with(KEY_S_OPT, s)
        .with(KEY_SIGMA_X2, sx2)
        .with(KEY_SIGMA_P2, sp2))
}
