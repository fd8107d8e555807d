//! Atmospheric turbulence channel: Rytov variance, gamma-gamma fading,
//! static link budget and quasi-static received-power series.

mod bessel;

pub use bessel::{bessel_k, ln_bessel_k};

use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::config::LinkConfig;
use crate::error::{domain, Result};
use crate::scalar::Real;

/// Shape parameters of the gamma-gamma intensity law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaGammaParams<T: Real = f64> {
    /// Large-scale eddy parameter.
    pub alpha: T,
    /// Small-scale eddy parameter.
    pub beta: T,
    pub rytov_var: T,
}

/// One quasi-static channel state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelRealization {
    /// Unit-mean intensity gain.
    pub fading_gain: f64,
    /// Attenuation plus geometric loss, dB.
    pub static_loss_db: f64,
    pub rop_dbm: f64,
}

impl ChannelRealization {
    pub fn new(tx_power_dbm: f64, static_loss_db: f64, fading_gain: f64) -> Self {
        Self {
            fading_gain,
            static_loss_db,
            rop_dbm: tx_power_dbm - static_loss_db + 10.0 * fading_gain.log10(),
        }
    }

    /// Back-to-back state that lands exactly on `rop_dbm`.
    pub fn at_rop(rop_dbm: f64) -> Self {
        Self {
            fading_gain: 1.0,
            static_loss_db: 0.0,
            rop_dbm,
        }
    }

    pub fn rop_mw(&self) -> f64 {
        10f64.powf(self.rop_dbm / 10.0)
    }
}

/// Plane-wave Rytov variance `1.23·Cn²·k^{7/6}·Z^{11/6}` with `k = 2π/λ`.
pub fn rytov_variance<T: Real>(cn2: T, wavelength: T, distance: T) -> Result<T> {
    if cn2 < T::zero() || !(wavelength > T::zero()) || !(distance > T::zero()) {
        return Err(domain(format!(
            "rytov_variance needs cn2 >= 0 and positive wavelength/distance (got {cn2}, {wavelength}, {distance})"
        )));
    }
    let k = T::TAU() / wavelength;
    Ok(T::lit(1.23) * cn2 * k.powf(T::lit(7.0 / 6.0)) * distance.powf(T::lit(11.0 / 6.0)))
}

/// Gamma-gamma shape parameters from the Rytov variance (exponential form
/// for plane waves, zero inner scale).
pub fn gg_params<T: Real>(rytov_var: T) -> Result<GammaGammaParams<T>> {
    if !(rytov_var > T::zero()) || !rytov_var.is_finite() {
        return Err(domain(format!(
            "gg_params needs rytov_var > 0 (got {rytov_var})"
        )));
    }
    let lit = T::lit;
    let s125 = rytov_var.powf(lit(12.0 / 5.0) / lit(2.0));
    let ln_x = lit(0.49) * rytov_var / (T::one() + lit(1.11) * s125).powf(lit(7.0 / 6.0));
    let ln_y = lit(0.51) * rytov_var / (T::one() + lit(0.69) * s125).powf(lit(5.0 / 6.0));
    let params = GammaGammaParams {
        alpha: T::one() / ln_x.exp_m1(),
        beta: T::one() / ln_y.exp_m1(),
        rytov_var,
    };
    Ok(params)
}

/// `σ_I² = 1/α + 1/β + 1/(αβ)`.
pub fn scintillation_index<T: Real>(p: &GammaGammaParams<T>) -> T {
    p.alpha.recip() + p.beta.recip() + (p.alpha * p.beta).recip()
}

/// Draws a unit-mean intensity as the product of two unit-mean gamma variates.
pub fn sample_fading<R: Rng + ?Sized>(p: &GammaGammaParams<f64>, rng: &mut R) -> f64 {
    let x = Gamma::new(p.alpha, 1.0 / p.alpha).expect("alpha > 0");
    let y = Gamma::new(p.beta, 1.0 / p.beta).expect("beta > 0");
    x.sample(rng) * y.sample(rng)
}

/// Gamma-gamma density of the normalized intensity.
pub fn gg_pdf<T: Real>(i: T, p: &GammaGammaParams<T>) -> Result<T> {
    if !(i > T::zero()) {
        return Err(domain(format!("gg_pdf needs i > 0 (got {i})")));
    }
    Ok(ln_gg_pdf(i, p).exp())
}

fn ln_gg_pdf<T: Real>(i: T, p: &GammaGammaParams<T>) -> T {
    let (a, b) = (p.alpha, p.beta);
    let half_sum = (a + b) / T::lit(2.0);
    let ab = a * b;
    let ln_norm = T::LN_2() + half_sum * ab.ln()
        - T::lit(ln_gamma(a.as_f64()))
        - T::lit(ln_gamma(b.as_f64()));
    let arg = T::lit(2.0) * (ab * i).sqrt();
    ln_norm + (half_sum - T::one()) * i.ln() + ln_bessel_k(a - b, arg)
}

/// Tabulated gamma-gamma CDF on `[0, i_max]`, built by integrating the
/// density with the composite Simpson rule and interpolating linearly.
#[derive(Debug, Clone)]
pub struct CdfTable {
    step: f64,
    values: Vec<f64>,
}

impl CdfTable {
    pub fn build(p: &GammaGammaParams<f64>, i_max: f64, intervals: usize) -> Self {
        let n = intervals.max(2);
        let step = i_max / n as f64;
        let pdf = |i: f64| if i <= 0.0 { 0.0 } else { ln_gg_pdf(i, p).exp() };
        let mut values = Vec::with_capacity(n + 1);
        values.push(0.0);
        let mut acc = 0.0;
        for k in 0..n {
            let (a, b) = (k as f64 * step, (k + 1) as f64 * step);
            acc += step / 6.0 * (pdf(a) + 4.0 * pdf(0.5 * (a + b)) + pdf(b));
            values.push(acc);
        }
        Self { step, values }
    }

    pub fn cdf(&self, i: f64) -> f64 {
        if i <= 0.0 {
            return 0.0;
        }
        let x = i / self.step;
        let k = x.floor() as usize;
        if k + 1 >= self.values.len() {
            return *self.values.last().expect("nonempty");
        }
        let f = x - k as f64;
        self.values[k] * (1.0 - f) + self.values[k + 1] * f
    }
}

/// Far-field beam-spread geometric loss, clamped at 0 dB.
pub fn geometric_loss_db(cfg: &LinkConfig) -> f64 {
    let beam = cfg.tx_aperture_m + cfg.beam_divergence_rad * cfg.distance_m;
    (-20.0 * (cfg.rx_aperture_m / beam).log10()).max(0.0)
}

/// Atmospheric attenuation over the link, dB.
pub fn attenuation_db(cfg: &LinkConfig) -> f64 {
    cfg.attenuation_db_per_km * cfg.distance_m / 1000.0
}

/// Static loss: attenuation plus geometric loss.
pub fn link_budget(cfg: &LinkConfig) -> Result<f64> {
    cfg.validate()?;
    Ok(attenuation_db(cfg) + geometric_loss_db(cfg))
}

/// Turbulence parameters for the configured path, or `None` without turbulence.
pub fn link_turbulence(cfg: &LinkConfig) -> Result<Option<GammaGammaParams<f64>>> {
    let s = rytov_variance(cfg.cn2, cfg.wavelength_m, cfg.distance_m)?;
    if s > 0.0 {
        gg_params(s).map(Some)
    } else {
        Ok(None)
    }
}

/// `n` independent quasi-static captures. Capture spacing is far above the
/// channel coherence time, so each draw is independent; the fading stays
/// constant within a capture.
pub fn rop_timeseries<R: Rng + ?Sized>(
    cfg: &LinkConfig,
    n: usize,
    rng: &mut R,
) -> Result<Vec<ChannelRealization>> {
    if n == 0 {
        return Err(domain("rop_timeseries needs n >= 1"));
    }
    let loss = link_budget(cfg)?;
    let params = link_turbulence(cfg)?;
    Ok((0..n)
        .map(|_| {
            let gain = params.as_ref().map_or(1.0, |p| sample_fading(p, rng));
            ChannelRealization::new(cfg.tx_power_dbm, loss, gain)
        })
        .collect())
}
