//! Holevo quantities of Gaussian ensembles and the ultimate single-letter
//! capacity of the phase-insensitive channels.

use crate::error::{Error, Result};
use crate::gaussian::{g_unchecked, ChannelKind, ChannelParams, Covariance};
use crate::protocols::{check_nbar, squeezed_capacity, KEY_R_OPT, KEY_SIGMA_X2};

/// Gaussian-distributed displacements of a fixed seed state, described by
/// moments only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianEnsemble {
    seed: Covariance,
    enc_x2: f64,
    enc_p2: f64,
}

impl GaussianEnsemble {
    pub fn new(seed: Covariance, enc_x2: f64, enc_p2: f64) -> Result<Self> {
        if !(enc_x2 >= 0.0) || !(enc_p2 >= 0.0) {
            return Err(Error::Domain(format!(
                "displacement variances must be >= 0, got ({enc_x2}, {enc_p2})"
            )));
        }
        seed.check_physical()?;
        Ok(GaussianEnsemble {
            seed,
            enc_x2,
            enc_p2,
        })
    }

    /// Symmetric displacements of the vacuum with `nbar` photons on average.
    pub fn coherent(nbar: f64) -> Result<Self> {
        check_nbar(nbar)?;
        Self::new(Covariance::VACUUM, nbar, nbar)
    }

    /// x-displacements of the squeezed state used by capacity-optimal
    /// squeezed-state communication through `ch`.
    pub fn squeezed_for(ch: &ChannelParams, nbar: f64) -> Result<Self> {
        let sq = squeezed_capacity(ch, nbar)?;
        let r = sq.param(KEY_R_OPT).unwrap_or(0.0);
        let enc = sq.param(KEY_SIGMA_X2).unwrap_or(0.0);
        Self::new(
            Covariance::diag(0.5 * (-2.0 * r).exp(), 0.5 * (2.0 * r).exp()),
            enc,
            0.0,
        )
    }

    pub fn seed(&self) -> Covariance {
        self.seed
    }

    /// Covariance of the ensemble-averaged state.
    pub fn average(&self) -> Covariance {
        self.seed.add_diag(self.enc_x2, self.enc_p2)
    }
}

/// `S(E(average)) - S(E(seed))` in bits; displacements leave the entropy of
/// each member unchanged.
pub fn holevo_quantity(ch: &ChannelParams, ens: &GaussianEnsemble) -> Result<f64> {
    let avg = ch.apply_cm(&ens.average()).entropy()?;
    let cond = ch.apply_cm(&ens.seed()).entropy()?;
    Ok((avg - cond).max(0.0))
}

/// Ultimate capacity of the channel at mean input photon number `nbar`.
///
/// The loss channel uses `g(eta n + (1-eta) n_th) - g((1-eta) n_th)`; the
/// amplifier is evaluated as the Holevo quantity of the coherent ensemble.
pub fn holevo_bound(ch: &ChannelParams, nbar: f64) -> Result<f64> {
    check_nbar(nbar)?;
    match ch.kind() {
        ChannelKind::Loss => {
            let eta = ch.strength();
            let env = (1.0 - eta) * ch.n_th();
            Ok((g_unchecked(eta * nbar + env) - g_unchecked(env)).max(0.0))
        }
        ChannelKind::Amplification => holevo_quantity(ch, &GaussianEnsemble::coherent(nbar)?),
    }
}
