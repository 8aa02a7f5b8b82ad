//! BPSK over the memoryless AWGN channel.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// AWGN channel operating point for unit-energy BPSK.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    pub ebno_db: f64,
    pub rate: f64,
    /// Noise variance per real dimension.
    pub sigma2: f64,
}

impl ChannelParams {
    /// `sigma2 = 1 / (2 R 10^(ebno_db/10))`.
    pub fn from_ebno_db(ebno_db: f64, rate: f64) -> Result<Self> {
        if !(rate > 0.0 && rate <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "code rate {rate} not in (0, 1]"
            )));
        }
        if !ebno_db.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "Eb/N0 {ebno_db} dB is not finite"
            )));
        }
        let sigma2 = 1.0 / (2.0 * rate * 10f64.powf(ebno_db / 10.0));
        Self::from_sigma2(sigma2).map(|p| ChannelParams { ebno_db, rate, ..p })
    }

    /// Channel given directly by its noise variance (rate and Eb/N0 left at 1 and the implied value).
    pub fn from_sigma2(sigma2: f64) -> Result<Self> {
        if !(sigma2 > 0.0 && sigma2.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "noise variance {sigma2} must be positive"
            )));
        }
        Ok(ChannelParams {
            ebno_db: 10.0 * (1.0 / (2.0 * sigma2)).log10(),
            rate: 1.0,
            sigma2,
        })
    }

    /// Mean of the channel L-value given X = 0.
    pub fn llr_mean(&self) -> f64 {
        2.0 / self.sigma2
    }

    /// Standard deviation of the channel L-value.
    pub fn llr_std(&self) -> f64 {
        2.0 / self.sigma2.sqrt()
    }
}

/// Maps bits 0 -> +1, 1 -> -1 and adds Gaussian noise of variance `sigma2`.
pub fn transmit<R: Rng + ?Sized>(bits: &[u8], params: &ChannelParams, rng: &mut R) -> Vec<f64> {
    let sigma = params.sigma2.sqrt();
    bits.iter()
        .map(|&b| {
            let n: f64 = rng.sample(StandardNormal);
            (1.0 - 2.0 * f64::from(b & 1)) + sigma * n
        })
        .collect()
}

/// Channel L-values `2 y / sigma2`.
pub fn channel_llr(y: &[f64], params: &ChannelParams) -> Vec<f64> {
    let scale = 2.0 / params.sigma2;
    y.iter().map(|&v| scale * v).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn moments(x: &[f64]) -> (f64, f64) {
        let n = x.len() as f64;
        let mean = x.iter().sum::<f64>() / n;
        let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (mean, var)
    }

    #[test]
    fn sigma2_conversion() {
        let p = ChannelParams::from_ebno_db(0.0, 0.5).unwrap();
        assert!((p.sigma2 - 1.0).abs() < 1e-15);
        let p = ChannelParams::from_ebno_db(3.0, 0.5).unwrap();
        assert!((p.sigma2 - 1.0 / 10f64.powf(0.3)).abs() < 1e-15);
        let mut last = f64::INFINITY;
        for i in -20..40 {
            let s = ChannelParams::from_ebno_db(i as f64 * 0.25, 0.5)
                .unwrap()
                .sigma2;
            assert!(s < last);
            last = s;
        }
        assert!(ChannelParams::from_ebno_db(1.0, 0.0).is_err());
        assert!(ChannelParams::from_sigma2(0.0).is_err());
        assert!(ChannelParams::from_sigma2(-1.0).is_err());
    }

    #[test]
    fn noiseless_limit() {
        let p = ChannelParams::from_sigma2(1e-300).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let y = transmit(&[0, 0, 1], &p, &mut rng);
        assert_eq!(y[0], 1.0);
        assert_eq!(y[1], 1.0);
        assert_eq!(y[2], -1.0);
    }

    #[test]
    fn llr_closed_form() {
        let p = ChannelParams::from_sigma2(0.5).unwrap();
        assert_eq!(channel_llr(&[0.0, 1.0, -0.25], &p), vec![0.0, 4.0, -1.0]);
    }

    #[test]
    fn received_moments() {
        let p = ChannelParams::from_ebno_db(2.0, 0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 100_000;
        let y = transmit(&vec![0u8; n], &p, &mut rng);
        let (mean, var) = moments(&y);
        assert!((mean - 1.0).abs() < 4.0 * (p.sigma2 / n as f64).sqrt());
        assert!((var / p.sigma2 - 1.0).abs() < 0.05);
    }

    #[test]
    fn llr_moments() {
        let p = ChannelParams::from_ebno_db(1.5, 0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let l = channel_llr(&transmit(&vec![0u8; 100_000], &p, &mut rng), &p);
        let (mean, var) = moments(&l);
        assert!((mean / p.llr_mean() - 1.0).abs() < 0.05);
        assert!((var / p.llr_std().powi(2) - 1.0).abs() < 0.05);
    }

    #[test]
    fn llr_consistency_condition() {
        let p = ChannelParams::from_ebno_db(2.5, 0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let l = channel_llr(&transmit(&vec![0u8; 1_000_000], &p, &mut rng), &p);
        let (mean, var) = moments(&l);
        assert!((mean / (var / 2.0) - 1.0).abs() < 0.02);
    }
}
