//! Closed-form capacities of the standard single-channel Gaussian protocols.
//!
//! All capacities are in bits per channel use. `nbar` is the mean photon
//! number available at the channel input.

use std::collections::BTreeMap;
use std::f64::consts::LN_2;
use std::fmt;

use crate::error::{Error, Result};
use crate::gaussian::{ChannelKind, ChannelParams};

/// Below this added noise the channel is treated as noiseless and the
/// analytic limits `e^{2r} = 1 + 2 nbar`, `C = log2(1 + 2 nbar)` are used.
pub const NOISELESS_THRESHOLD: f64 = 1e-12;

pub const KEY_R_OPT: &str = "r_opt";
pub const KEY_S_OPT: &str = "s_opt";
pub const KEY_SIGMA_X2: &str = "sigma_x2";
pub const KEY_SIGMA_P2: &str = "sigma_p2";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Protocol {
    CoherentHeterodyne,
    CoherentHomodyne,
    SqueezedHomodyne,
    GeneralGaussian,
    NumberState,
    HolevoQuantity,
    HolevoBound,
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Protocol::CoherentHeterodyne => "coherent-heterodyne",
            Protocol::CoherentHomodyne => "coherent-homodyne",
            Protocol::SqueezedHomodyne => "squeezed-homodyne",
            Protocol::GeneralGaussian => "general-gaussian",
            Protocol::NumberState => "number-state",
            Protocol::HolevoQuantity => "holevo-quantity",
            Protocol::HolevoBound => "holevo-bound",
        };
        f.write_str(name)
    }
}

/// A capacity together with the parameters that attain it.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacityResult {
    pub bits: f64,
    pub protocol: Protocol,
    pub params: BTreeMap<&'static str, f64>,
}

impl CapacityResult {
    pub fn new(bits: f64, protocol: Protocol) -> Self {
        CapacityResult {
            bits: bits.max(0.0),
            protocol,
            params: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &'static str, value: f64) -> Self {
        self.params.insert(key, value);
        self
    }

    pub fn param(&self, key: &str) -> Option<f64> {
        self.params.get(key).copied()
    }
}

pub(crate) fn check_nbar(nbar: f64) -> Result<()> {
    if nbar >= 0.0 && nbar.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "mean photon number must be finite and >= 0, got {nbar}"
        )))
    }
}

/// `log2(1 + x)` without cancellation for small `x`.
pub(crate) fn log2_1p(x: f64) -> f64 {
    x.ln_1p() / LN_2
}

/// Two-quadrature symmetric encoding on coherent states, heterodyne readout:
/// `log2(1 + 2 k nbar / (1 + k + N))` with `k` the transmissivity or gain.
pub fn coherent_capacity(ch: &ChannelParams, nbar: f64) -> Result<CapacityResult> {
    check_nbar(nbar)?;
    let k = ch.strength();
    let snr = 2.0 * k * nbar / (1.0 + k + ch.added_noise());
    Ok(
        CapacityResult::new(log2_1p(snr), Protocol::CoherentHeterodyne)
            .with(KEY_SIGMA_X2, nbar)
            .with(KEY_SIGMA_P2, nbar),
    )
}

/// All energy displaced along one quadrature of a coherent state, homodyne
/// readout: `1/2 log2(1 + 4 k nbar / (k + N))`.
pub fn coherent_single_quadrature_capacity(
    ch: &ChannelParams,
    nbar: f64,
) -> Result<CapacityResult> {
    check_nbar(nbar)?;
    let k = ch.strength();
    let denom = k + ch.added_noise();
    let bits = if nbar == 0.0 || k == 0.0 {
        0.0
    } else {
        0.5 * log2_1p(4.0 * k * nbar / denom)
    };
    Ok(CapacityResult::new(bits, Protocol::CoherentHomodyne)
        .with(KEY_SIGMA_X2, 2.0 * nbar)
        .with(KEY_SIGMA_P2, 0.0))
}

/// `e^{2 r_opt}` for single-quadrature encoding on a squeezed state.
///
/// Written as `(4 k n + N + 2k) / (sqrt(4 k N n + (N + k)^2) + k)`, which
/// equals `(-k + sqrt(...)) / N` but has no cancellation and tends to
/// `1 + 2n` as `N -> 0`.
fn squeeze_factor(k: f64, noise: f64, nbar: f64) -> f64 {
    if nbar == 0.0 {
        return 1.0;
    }
    if noise < NOISELESS_THRESHOLD {
        return 1.0 + 2.0 * nbar;
    }
    let root = (4.0 * k * noise * nbar + (noise + k).powi(2)).sqrt();
    (4.0 * k * nbar + noise + 2.0 * k) / (root + k)
}

/// Input squeezing that maximizes the single-quadrature homodyne capacity
/// under the energy budget `sinh^2 r + sigma_x^2 / 2 = nbar`.
pub fn optimal_squeezing(ch: &ChannelParams, nbar: f64) -> Result<f64> {
    check_nbar(nbar)?;
    let e2r = squeeze_factor(ch.strength(), ch.added_noise(), nbar);
    let r = 0.5 * e2r.ln();
    debug_assert!(squeeze_energy(e2r) <= nbar * (1.0 + 1e-12) + 1e-15);
    Ok(r.max(0.0))
}

/// `sinh^2 r` expressed through `e^{2r}` as `(e^{2r} - 1)^2 / (4 e^{2r})`.
fn squeeze_energy(e2r: f64) -> f64 {
    (e2r - 1.0).powi(2) / (4.0 * e2r)
}

/// Squeezed-state communication with the optimal squeezing: `log2 e^{2 r_opt}`.
pub fn squeezed_capacity(ch: &ChannelParams, nbar: f64) -> Result<CapacityResult> {
    check_nbar(nbar)?;
    let e2r = squeeze_factor(ch.strength(), ch.added_noise(), nbar);
    let encoding = (nbar - squeeze_energy(e2r)).max(0.0);
    Ok(CapacityResult::new(e2r.log2(), Protocol::SqueezedHomodyne)
        .with(KEY_R_OPT, (0.5 * e2r.ln()).max(0.0))
        .with(KEY_SIGMA_X2, 2.0 * encoding)
        .with(KEY_SIGMA_P2, 0.0))
}

/// Photon number below which squeezed-state communication beats the
/// coherent-state scheme through a thermal loss channel, for every `eta`.
pub fn critical_photon_number(n_th: f64) -> Result<f64> {
    if !(n_th >= 0.0) || !n_th.is_finite() {
        return Err(Error::Domain(format!(
            "thermal occupation must be finite and >= 0, got {n_th}"
        )));
    }
    Ok((4.0 + 2.0 * n_th + 4.0 * (1.0 + n_th).sqrt()) / (1.0 + 2.0 * n_th))
}

/// Coherent-state heterodyne capacity through an amplifier when the receiver
/// adds `w/2` instead of the ideal `1/2` of noise variance.
pub fn coarse_grained_coherent_capacity(
    ch: &ChannelParams,
    nbar: f64,
    w: f64,
) -> Result<CapacityResult> {
    if ch.kind() != ChannelKind::Amplification {
        return Err(Error::UnsupportedProtocol(
            "coarse-grained heterodyne is defined for amplification channels only".into(),
        ));
    }
    if !(w >= 1.0) || !w.is_finite() {
        return Err(Error::Domain(format!(
            "measurement noise factor w must be finite and >= 1, got {w}"
        )));
    }
    check_nbar(nbar)?;
    let g = ch.strength();
    let snr = 2.0 * g * nbar / (w + g + ch.added_noise());
    Ok(
        CapacityResult::new(log2_1p(snr), Protocol::CoherentHeterodyne)
            .with(KEY_SIGMA_X2, nbar)
            .with(KEY_SIGMA_P2, nbar),
    )
}
