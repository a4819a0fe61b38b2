//! Air-to-ground propagation: free-space path loss plus an excess loss whose
//! spread and LoS probability both depend on the elevation angle.
//!
//! Elevation angles are in radians. With the default urban constants the LoS
//! probability rises from about 2% at grazing incidence to 1 overhead; read in
//! degrees the same constants would collapse it to a step at zero.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{ensure, Error, Result};

/// Speed of light used by the free-space term, m/s.
pub const SPEED_OF_LIGHT: f64 = 2.998e8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LinkClass {
    Los,
    Nlos,
}

impl LinkClass {
    pub const BOTH: [LinkClass; 2] = [LinkClass::Los, LinkClass::Nlos];
}

/// How `sample_rss` realizes the time average over `n` samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SamplingMode {
    /// Draw every sample and average them.
    PerSample,
    /// Draw the average directly, with variance reduced by `n`.
    #[default]
    Aggregated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelParams {
    /// Carrier frequency, Hz.
    pub frequency_hz: f64,
    /// LoS-probability scale (dimensionless).
    #[serde(rename = "a_o")]
    pub los_prob_scale: f64,
    /// LoS-probability rate, 1/rad.
    #[serde(rename = "b_o")]
    pub los_prob_rate: f64,
    /// LoS shadowing spread at zero elevation, dB.
    #[serde(rename = "a_los")]
    pub los_sigma_scale: f64,
    /// LoS shadowing decay with elevation, 1/rad.
    #[serde(rename = "b_los")]
    pub los_sigma_decay: f64,
    #[serde(rename = "a_nlos")]
    pub nlos_sigma_scale: f64,
    #[serde(rename = "b_nlos")]
    pub nlos_sigma_decay: f64,
    /// Mean excess path loss, dB.
    #[serde(rename = "mu_los")]
    pub los_excess_mean: f64,
    #[serde(rename = "mu_nlos")]
    pub nlos_excess_mean: f64,
    /// Link-budget constant (transmit power plus RSS transduction), dBm.
    #[serde(rename = "c_offset")]
    pub link_budget_dbm: f64,
}

impl Default for ChannelParams {
    fn default() -> Self {
        Self {
            frequency_hz: 2.0e9,
            los_prob_scale: 47.0,
            los_prob_rate: 20.0,
            los_sigma_scale: 10.0,
            los_sigma_decay: 2.0,
            nlos_sigma_scale: 30.0,
            nlos_sigma_decay: 1.7,
            los_excess_mean: 1.0,
            nlos_excess_mean: 20.0,
            link_budget_dbm: 20.0,
        }
    }
}

/// Horizontal range, altitude, slant distance and elevation of one link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry {
    pub horizontal: f64,
    pub altitude: f64,
    pub slant: f64,
    pub elevation: f64,
}

impl LinkGeometry {
    pub fn new(horizontal: f64, altitude: f64) -> Result<Self> {
        ensure(altitude > 0.0, "altitude", "> 0", altitude)?;
        ensure(horizontal >= 0.0, "horizontal range", ">= 0", horizontal)?;
        Ok(Self {
            horizontal,
            altitude,
            slant: altitude.hypot(horizontal),
            elevation: altitude.atan2(horizontal),
        })
    }
}

fn check_angle(theta: f64) -> Result<()> {
    if (0.0..=FRAC_PI_2).contains(&theta) {
        Ok(())
    } else {
        Err(Error::AngleOutOfRange(theta))
    }
}

impl ChannelParams {
    pub fn validate(&self) -> Result<()> {
        ensure(
            self.frequency_hz > 0.0,
            "frequency_hz",
            "> 0",
            self.frequency_hz,
        )?;
        ensure(self.los_prob_scale > 0.0, "a_o", "> 0", self.los_prob_scale)?;
        ensure(self.los_prob_rate >= 0.0, "b_o", ">= 0", self.los_prob_rate)?;
        ensure(
            self.los_sigma_scale > 0.0,
            "a_los",
            "> 0",
            self.los_sigma_scale,
        )?;
        ensure(
            self.los_sigma_decay >= 0.0,
            "b_los",
            ">= 0",
            self.los_sigma_decay,
        )?;
        ensure(
            self.nlos_sigma_scale > 0.0,
            "a_nlos",
            "> 0",
            self.nlos_sigma_scale,
        )?;
        ensure(
            self.nlos_sigma_decay >= 0.0,
            "b_nlos",
            ">= 0",
            self.nlos_sigma_decay,
        )?;
        ensure(
            self.nlos_sigma_scale > self.los_sigma_scale,
            "a_nlos",
            "> a_los",
            self.nlos_sigma_scale,
        )?;
        for (name, v) in [
            ("mu_los", self.los_excess_mean),
            ("mu_nlos", self.nlos_excess_mean),
            ("c_offset", self.link_budget_dbm),
        ] {
            ensure(v.is_finite(), name, "finite", v)?;
        }
        Ok(())
    }

    /// Same constants with both shadowing spreads forced to zero.
    ///
    /// The result intentionally fails `validate`; it exists for noiseless
    /// consistency runs.
    pub fn without_shadowing(mut self) -> Self {
        self.los_sigma_scale = 0.0;
        self.nlos_sigma_scale = 0.0;
        self
    }

    /// `20 log10(4 pi f / c)`, dB.
    pub fn free_space_constant(&self) -> f64 {
        20.0 * (4.0 * PI * self.frequency_hz / SPEED_OF_LIGHT).log10()
    }

    /// Shadowing standard deviation for `class` at elevation `theta`, dB.
    pub fn shadowing_sigma(&self, theta: f64, class: LinkClass) -> Result<f64> {
        check_angle(theta)?;
        Ok(self.sigma_unchecked(theta, class))
    }

    pub(crate) fn sigma_unchecked(&self, theta: f64, class: LinkClass) -> f64 {
        let (scale, decay) = match class {
            LinkClass::Los => (self.los_sigma_scale, self.los_sigma_decay),
            LinkClass::Nlos => (self.nlos_sigma_scale, self.nlos_sigma_decay),
        };
        scale * (-decay * theta).exp()
    }

    pub fn p_los(&self, theta: f64) -> Result<f64> {
        check_angle(theta)?;
        Ok(self.p_los_unchecked(theta))
    }

    pub fn p_nlos(&self, theta: f64) -> Result<f64> {
        Ok(1.0 - self.p_los(theta)?)
    }

    pub(crate) fn p_los_unchecked(&self, theta: f64) -> f64 {
        1.0 / (1.0 + self.los_prob_scale * (-self.los_prob_rate * theta).exp())
    }

    pub fn excess_mean(&self, class: LinkClass) -> f64 {
        match class {
            LinkClass::Los => self.los_excess_mean,
            LinkClass::Nlos => self.nlos_excess_mean,
        }
    }

    /// Path loss with the excess term at its mean, dB.
    pub fn mean_path_loss(&self, distance: f64, class: LinkClass) -> Result<f64> {
        ensure(distance > 0.0, "distance", "> 0", distance)?;
        Ok(20.0 * distance.log10() + self.free_space_constant() + self.excess_mean(class))
    }

    /// Received power for a given realized excess loss, dBm.
    pub fn rss_with_excess(&self, distance: f64, excess_db: f64) -> f64 {
        self.link_budget_dbm - 20.0 * distance.log10() - self.free_space_constant() - excess_db
    }

    /// Noiseless received power, dBm.
    pub fn mean_rss(&self, distance: f64, class: LinkClass) -> Result<f64> {
        Ok(self.link_budget_dbm - self.mean_path_loss(distance, class)?)
    }

    /// Time-averaged RSS over `n_samples` independent shadowing draws, dBm.
    pub fn sample_rss<R: Rng + ?Sized>(
        &self,
        link: &LinkGeometry,
        class: LinkClass,
        n_samples: usize,
        mode: SamplingMode,
        rng: &mut R,
    ) -> Result<f64> {
        ensure(n_samples >= 1, "n_samples", ">= 1", n_samples as f64)?;
        ensure(link.slant > 0.0, "distance", "> 0", link.slant)?;
        let sigma = self.shadowing_sigma(link.elevation, class)?;
        let mean = self.excess_mean(class);
        match mode {
            SamplingMode::PerSample => {
                let total: f64 = (0..n_samples)
                    .map(|_| mean + sigma * rng.sample::<f64, _>(StandardNormal))
                    .sum();
                Ok(self.rss_with_excess(link.slant, total / n_samples as f64))
            }
            SamplingMode::Aggregated => {
                let z: f64 = rng.sample(StandardNormal);
                Ok(self.averaged_rss(link, class, n_samples, z))
            }
        }
    }

    /// Averaged RSS whose mean excess loss sits `z` standard errors from its
    /// expectation, dBm.
    ///
    /// Lets callers reuse one normal draw across both link classes.
    pub fn averaged_rss(
        &self,
        link: &LinkGeometry,
        class: LinkClass,
        n_samples: usize,
        z: f64,
    ) -> f64 {
        let sigma = self.sigma_unchecked(link.elevation, class);
        let excess = self.excess_mean(class) + sigma * z / (n_samples as f64).sqrt();
        self.rss_with_excess(link.slant, excess)
    }
}
