//! Single-mode Gaussian states and phase-insensitive channels.
//!
//! Quadratures obey `[x, p] = i`, so the vacuum covariance matrix is `I/2`.
//! Every other module assumes this convention.

use std::f64::consts::LN_2;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Relative slack on `det(cm) >= 1/4` that absorbs rounding in products
/// such as `e^{-2r} e^{2r}`.
const PHYSICALITY_SLACK: f64 = 1e-12;

/// Arguments of `g` below this are treated as the exact limit `g(0) = 0`.
/// At `x = 1e-12` the true value is about `4e-11` bits, well under any
/// tolerance used in this crate.
const G_ZERO_CUTOFF: f64 = 1e-12;

/// Entropy `g(x) = (1+x) log2(1+x) - x log2 x` of a thermal state with mean
/// photon number `x`, in bits.
pub fn g_entropy(x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::Domain(format!("g(x) requires x >= 0, got {x}")));
    }
    Ok(g_unchecked(x))
}

/// `g` without the domain check; callers guarantee `x >= -tiny`.
pub(crate) fn g_unchecked(x: f64) -> f64 {
    if x < G_ZERO_CUTOFF {
        return 0.0;
    }
    ((1.0 + x) * x.ln_1p() - x * x.ln()) / LN_2
}

/// Symmetric 2x2 covariance matrix stored as its three independent entries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Covariance {
    pub xx: f64,
    pub pp: f64,
    pub xp: f64,
}

impl Covariance {
    pub const VACUUM: Covariance = Covariance {
        xx: 0.5,
        pp: 0.5,
        xp: 0.0,
    };

    pub fn diag(xx: f64, pp: f64) -> Self {
        Covariance { xx, pp, xp: 0.0 }
    }

    pub fn det(&self) -> f64 {
        self.xx * self.pp - self.xp * self.xp
    }

    pub fn trace(&self) -> f64 {
        self.xx + self.pp
    }

    /// Symplectic eigenvalue `sqrt(det)`.
    pub fn symplectic_eigenvalue(&self) -> f64 {
        if self.xp == 0.0 {
            // avoids squaring-then-rooting for the diagonal case
            self.xx.sqrt() * self.pp.sqrt()
        } else {
            self.det().sqrt()
        }
    }

    pub fn is_physical(&self) -> bool {
        self.xx > 0.0 && self.pp > 0.0 && self.det() >= 0.25 * (1.0 - PHYSICALITY_SLACK)
    }

    pub fn add_diag(&self, dx: f64, dp: f64) -> Self {
        Covariance {
            xx: self.xx + dx,
            pp: self.pp + dp,
            xp: self.xp,
        }
    }

    pub fn scale(&self, factor: f64) -> Self {
        Covariance {
            xx: self.xx * factor,
            pp: self.pp * factor,
            xp: self.xp * factor,
        }
    }

    /// Phase-space rotation `R cm R^T`.
    pub fn rotate(&self, theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Covariance {
            xx: c * c * self.xx - 2.0 * c * s * self.xp + s * s * self.pp,
            pp: s * s * self.xx + 2.0 * c * s * self.xp + c * c * self.pp,
            xp: c * s * (self.xx - self.pp) + (c * c - s * s) * self.xp,
        }
    }

    pub fn check_physical(&self) -> Result<()> {
        if self.is_physical() {
            Ok(())
        } else {
            Err(Error::Unphysical { det: self.det() })
        }
    }

    /// von Neumann entropy in bits of any Gaussian state with this CM.
    pub fn entropy(&self) -> Result<f64> {
        self.check_physical()?;
        Ok(g_unchecked((self.symplectic_eigenvalue() - 0.5).max(0.0)))
    }
}

/// Gaussian state given by its first moments and covariance matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianState {
    pub mean_x: f64,
    pub mean_p: f64,
    pub cm: Covariance,
}

impl GaussianState {
    pub fn new(mean_x: f64, mean_p: f64, cm: Covariance) -> Result<Self> {
        if cm.xx.is_nan() || cm.pp.is_nan() || cm.xp.is_nan() {
            return Err(Error::Domain("covariance entries must not be NaN".into()));
        }
        cm.check_physical()?;
        Ok(GaussianState { mean_x, mean_p, cm })
    }

    pub fn vacuum() -> Self {
        GaussianState {
            mean_x: 0.0,
            mean_p: 0.0,
            cm: Covariance::VACUUM,
        }
    }

    /// Thermal state with mean photon number `n`.
    pub fn thermal(n: f64) -> Result<Self> {
        if !(n >= 0.0) {
            return Err(Error::Domain(format!(
                "thermal occupation must be >= 0, got {n}"
            )));
        }
        let v = n + 0.5;
        Ok(GaussianState {
            mean_x: 0.0,
            mean_p: 0.0,
            cm: Covariance::diag(v, v),
        })
    }

    /// Displaced squeezed state, x-squeezed for `r > 0`. `r = 0` gives a
    /// coherent state.
    pub fn squeezed(r: f64, x: f64, p: f64) -> Self {
        GaussianState {
            mean_x: x,
            mean_p: p,
            cm: Covariance::diag(0.5 * (-2.0 * r).exp(), 0.5 * (2.0 * r).exp()),
        }
    }

    pub fn entropy(&self) -> f64 {
        // construction guarantees physicality
        g_unchecked((self.cm.symplectic_eigenvalue() - 0.5).max(0.0))
    }

    /// `(tr cm - 1)/2 + (x^2 + p^2)/2`.
    pub fn mean_photon_number(&self) -> f64 {
        let fluct = 0.5 * (self.cm.trace() - 1.0);
        fluct.max(0.0) + 0.5 * (self.mean_x * self.mean_x + self.mean_p * self.mean_p)
    }

    pub fn is_pure(&self) -> bool {
        (self.cm.det() - 0.25).abs() <= 0.25 * PHYSICALITY_SLACK
    }

    pub fn rotate(&self, theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        GaussianState {
            mean_x: c * self.mean_x - s * self.mean_p,
            mean_p: s * self.mean_x + c * self.mean_p,
            cm: self.cm.rotate(theta),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChannelKind {
    Loss,
    Amplification,
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChannelKind::Loss => f.write_str("loss"),
            ChannelKind::Amplification => f.write_str("amp"),
        }
    }
}

impl FromStr for ChannelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "loss" => Ok(ChannelKind::Loss),
            "amp" | "amplification" => Ok(ChannelKind::Amplification),
            other => Err(Error::InvalidChannel(format!(
                "unknown channel kind '{other}'"
            ))),
        }
    }
}

/// Phase-insensitive channel: a thermal beam splitter of transmissivity `eta`
/// or a thermal amplifier of gain `g`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    kind: ChannelKind,
    strength: f64,
    n_th: f64,
}

impl ChannelParams {
    pub fn new(kind: ChannelKind, strength: f64, n_th: f64) -> Result<Self> {
        if !(n_th >= 0.0) || !n_th.is_finite() {
            return Err(Error::InvalidChannel(format!(
                "thermal occupation must be finite and >= 0, got {n_th}"
            )));
        }
        match kind {
            ChannelKind::Loss if !(0.0..=1.0).contains(&strength) => Err(Error::InvalidChannel(
                format!("loss transmissivity must lie in [0, 1], got {strength}"),
            )),
            ChannelKind::Amplification if !(strength >= 1.0) || !strength.is_finite() => {
                Err(Error::InvalidChannel(format!(
                    "amplifier gain must be finite and >= 1, got {strength}"
                )))
            }
            _ => Ok(ChannelParams {
                kind,
                strength,
                n_th,
            }),
        }
    }

    pub fn loss(eta: f64, n_th: f64) -> Result<Self> {
        Self::new(ChannelKind::Loss, eta, n_th)
    }

    pub fn amplification(gain: f64, n_th: f64) -> Result<Self> {
        Self::new(ChannelKind::Amplification, gain, n_th)
    }

    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    /// Transmissivity `eta` for loss, intensity gain `g` for amplification.
    pub fn strength(&self) -> f64 {
        self.strength
    }

    pub fn n_th(&self) -> f64 {
        self.n_th
    }

    /// Environment contribution `N` to each quadrature variance (in units of
    /// twice the vacuum variance): `(1-eta)(1+2n_th)` or `(g-1)(1+2n_th)`.
    pub fn added_noise(&self) -> f64 {
        let excess = match self.kind {
            ChannelKind::Loss => 1.0 - self.strength,
            ChannelKind::Amplification => self.strength - 1.0,
        };
        excess * (1.0 + 2.0 * self.n_th)
    }

    /// Moments of the output state.
    pub fn apply(&self, state: &GaussianState) -> GaussianState {
        let amp = self.strength.sqrt();
        GaussianState {
            mean_x: amp * state.mean_x,
            mean_p: amp * state.mean_p,
            cm: self.apply_cm(&state.cm),
        }
    }

    pub fn apply_cm(&self, cm: &Covariance) -> Covariance {
        let half_noise = 0.5 * self.added_noise();
        cm.scale(self.strength).add_diag(half_noise, half_noise)
    }
}

impl fmt::Display for ChannelParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}(strength={}, n_th={})",
            self.kind, self.strength, self.n_th
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn g_values() {
        assert_eq!(g_entropy(0.0).unwrap(), 0.0);
        assert!(close(g_entropy(1.0).unwrap(), 2.0, 1e-15));
        // 2.5 log2 2.5 - 1.5 log2 1.5
        let expected = 2.5 * 2.5f64.log2() - 1.5 * 1.5f64.log2();
        assert!(close(g_entropy(1.5).unwrap(), expected, 1e-14));
        assert!((g_entropy(1.5).unwrap() - 2.42738).abs() < 5e-6);
        assert!(matches!(g_entropy(-0.1), Err(Error::Domain(_))));
        assert!(g_entropy(f64::NAN).is_err());
    }

    #[test]
    fn g_below_cutoff_is_zero() {
        assert_eq!(g_entropy(1e-13).unwrap(), 0.0);
        assert!(g_entropy(1e-11).unwrap() > 0.0);
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(GaussianState::vacuum().entropy(), 0.0);
        let th = GaussianState::thermal(1.0).unwrap();
        assert!(close(th.entropy(), 2.0, 1e-14));
        for r in [0.1, 0.7, 2.5] {
            let sq = GaussianState::squeezed(r, 0.3, -1.0);
            assert!(sq.entropy().abs() < 1e-9);
            assert!(sq.is_pure());
        }
    }

    #[test]
    fn unphysical_rejected() {
        let cm = Covariance::diag(0.2, 0.5);
        assert!(matches!(
            GaussianState::new(0.0, 0.0, cm),
            Err(Error::Unphysical { .. })
        ));
        assert!(cm.entropy().is_err());
    }

    #[test]
    fn channel_validation() {
        assert!(ChannelParams::loss(1.2, 0.0).is_err());
        assert!(ChannelParams::loss(-0.1, 0.0).is_err());
        assert!(ChannelParams::amplification(0.9, 0.0).is_err());
        assert!(ChannelParams::loss(0.5, -1.0).is_err());
        let ch = ChannelParams::loss(0.3, 1.0).unwrap();
        assert!(close(ch.added_noise(), 0.7 * 3.0, 1e-15));
        let ch = ChannelParams::amplification(2.0, 0.5).unwrap();
        assert!(close(ch.added_noise(), 2.0, 1e-15));
    }

    #[test]
    fn identity_channel() {
        let ch = ChannelParams::loss(1.0, 0.0).unwrap();
        assert_eq!(ch.apply(&GaussianState::vacuum()), GaussianState::vacuum());
    }

    #[test]
    fn squeezed_through_loss() {
        let (r, eta, nth) = (0.4, 0.6, 0.8);
        let ch = ChannelParams::loss(eta, nth).unwrap();
        let out = ch.apply(&GaussianState::squeezed(r, 1.5, -2.0));
        let n = (1.0 - eta) * (1.0 + 2.0 * nth);
        assert!(close(out.mean_x, eta.sqrt() * 1.5, 1e-15));
        assert!(close(out.mean_p, -eta.sqrt() * 2.0, 1e-15));
        assert!(close(out.cm.xx, 0.5 * (eta * (-2.0 * r).exp() + n), 1e-15));
        assert!(close(out.cm.pp, 0.5 * (eta * (2.0 * r).exp() + n), 1e-15));
        assert_eq!(out.cm.xp, 0.0);
    }

    #[test]
    fn vacuum_through_amplifier() {
        let ch = ChannelParams::amplification(2.0, 0.0).unwrap();
        let out = ch.apply(&GaussianState::vacuum());
        assert_eq!(out.cm, Covariance::diag(1.5, 1.5));
    }

    #[test]
    fn photon_numbers() {
        assert_eq!(GaussianState::vacuum().mean_photon_number(), 0.0);
        for r in [0.2f64, 1.0, 1.7] {
            let n = GaussianState::squeezed(r, 0.0, 0.0).mean_photon_number();
            assert!(close(n, r.sinh().powi(2), 1e-13));
        }
        let coh = GaussianState::squeezed(0.0, 1.2, -0.4);
        assert!(close(coh.mean_photon_number(), 0.5 * (1.44 + 0.16), 1e-15));
    }

    #[test]
    fn coherent_photon_number_matches_encoding_energy() {
        // Averaging (x^2 + p^2)/2 over a symmetric Gaussian displacement of
        // variance sigma^2 gives sigma^2; integrate on a quadrature grid.
        let sigma2: f64 = 1.7;
        let sd = sigma2.sqrt();
        let steps = 400;
        let lim = 8.0 * sd;
        let h = 2.0 * lim / steps as f64;
        let mut acc = 0.0;
        let mut norm = 0.0;
        for i in 0..=steps {
            let x = -lim + i as f64 * h;
            let w = (-x * x / (2.0 * sigma2)).exp();
            let n = GaussianState::squeezed(0.0, x, 0.0).mean_photon_number();
            acc += 2.0 * w * n; // x and p contribute equally
            norm += w;
        }
        assert!(close(acc / norm, sigma2, 1e-10));
    }

    #[test]
    fn kind_parsing() {
        assert_eq!("loss".parse::<ChannelKind>().unwrap(), ChannelKind::Loss);
        assert_eq!(
            "amp".parse::<ChannelKind>().unwrap(),
            ChannelKind::Amplification
        );
        assert!("attenuator".parse::<ChannelKind>().is_err());
    }
}
