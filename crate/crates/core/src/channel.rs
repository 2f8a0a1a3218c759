//! Antipodal signalling over AWGN and log-likelihood ratios.

use crate::codes::Codeword;
use crate::error::{Error, Result};
use crate::numerics::{db_to_linear, RngStream};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RateInfo {
    Block { k: usize, n: usize },
    /// k info bits per step, L steps, total length N.
    Conv { k: usize, l: usize, big_n: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelConfig {
    pub gamma_b_db: f64,
    pub rate: RateInfo,
    pub e_signal: f64,
    /// Zero noise regardless of SNR.
    pub noiseless: bool,
}

impl ChannelConfig {
    pub fn block(k: usize, n: usize, gamma_b_db: f64) -> Self {
        ChannelConfig {
            gamma_b_db,
            rate: RateInfo::Block { k, n },
            e_signal: 1.0,
            noiseless: false,
        }
    }

    pub fn conv(k: usize, l: usize, big_n: usize, gamma_b_db: f64) -> Self {
        ChannelConfig {
            gamma_b_db,
            rate: RateInfo::Conv { k, l, big_n },
            e_signal: 1.0,
            noiseless: false,
        }
    }

    pub fn with_noiseless(mut self, on: bool) -> Self {
        self.noiseless = on;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.e_signal > 0.0) || !self.gamma_b_db.is_finite() {
            return Err(Error::Domain("need finite SNR and positive signal energy".into()));
        }
        let ok = match self.rate {
            RateInfo::Block { k, n } => k >= 1 && k <= n,
            RateInfo::Conv { k, l, big_n } => k >= 1 && l >= 1 && k * l <= big_n,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!("inconsistent rate parameters {:?}", self.rate)))
        }
    }

    /// Effective information rate: k/n, or kL/N.
    pub fn rate_factor(&self) -> f64 {
        match self.rate {
            RateInfo::Block { k, n } => k as f64 / n as f64,
            RateInfo::Conv { k, l, big_n } => (k * l) as f64 / big_n as f64,
        }
    }

    /// gamma = E/N0, linear.
    pub fn gamma(&self) -> f64 {
        self.rate_factor() * db_to_linear(self.gamma_b_db)
    }

    pub fn n0(&self) -> f64 {
        self.e_signal / self.gamma()
    }

    pub fn noise_stddev(&self) -> f64 {
        if self.noiseless {
            0.0
        } else {
            (self.n0() / 2.0).sqrt()
        }
    }
}

pub fn transmit(codeword: &Codeword, cfg: &ChannelConfig, rng: &mut RngStream) -> Vec<f64> {
    let amp = cfg.e_signal.sqrt();
    let sd = cfg.noise_stddev();
    codeword
        .bits
        .iter()
        .map(|&b| {
            let s = if b == 0 { amp } else { -amp };
            if sd == 0.0 {
                s
            } else {
                s + rng.sample_gaussian(0.0, sd)
            }
        })
        .collect()
}

/// phi_j = 4 sqrt(E) r_j / N0
pub fn llr(received: &[f64], cfg: &ChannelConfig) -> Vec<f64> {
    let scale = 4.0 * cfg.e_signal.sqrt() / cfg.n0();
    received.iter().map(|&r| scale * r).collect()
}

/// y_j = 1 if phi_j < 0, else 0.
pub fn hard_decision(phi: &[f64]) -> Vec<u8> {
    phi.iter().map(|&p| (p < 0.0) as u8).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snr_bookkeeping() {
        let c = ChannelConfig::block(12, 24, 3.0);
        assert!((db_to_linear(3.0) - 2.0 * c.gamma()).abs() < 1e-15);
        for (l, m) in [(100usize, 6usize), (100, 16), (5, 2), (20, 6)] {
            let c = ChannelConfig::conv(1, l, 2 * (l + m), 4.0);
            assert!(c.gamma() < 0.5 * db_to_linear(4.0));
            let expect = 0.5 * db_to_linear(4.0) * l as f64 / (l + m) as f64;
            assert!((c.gamma() - expect).abs() < 1e-14);
        }
        assert!(ChannelConfig::block(13, 12, 0.0).validate().is_err());
    }

    #[test]
    fn noiseless_and_sign_rules() {
        let cfg = ChannelConfig::block(2, 4, 0.0).with_noiseless(true);
        let mut rng = RngStream::new(1);
        let r = transmit(&Codeword::new(vec![0, 1, 1, 0]), &cfg, &mut rng);
        assert_eq!(r, vec![1.0, -1.0, -1.0, 1.0]);
        assert_eq!(hard_decision(&[2.0, -3.0, 0.0]), vec![0, 1, 0]);
        assert_eq!(llr(&[0.0], &cfg), vec![0.0]);
        let phi = llr(&r, &cfg);
        assert_eq!(hard_decision(&phi), vec![0, 1, 1, 0]);
    }

    #[test]
    fn noise_statistics() {
        let cfg = ChannelConfig::block(1, 2, 0.0);
        let mut rng = RngStream::new(99);
        let n = 1_000_000;
        let r = transmit(&Codeword::new(vec![0; n]), &cfg, &mut rng);
        let mean = r.iter().sum::<f64>() / n as f64;
        let sd = cfg.noise_stddev();
        assert!((mean - 1.0).abs() < 4.0 * sd / (n as f64).sqrt());
    }

    #[test]
    fn bit_flip_negates_signal() {
        let cfg = ChannelConfig::block(4, 8, 2.0);
        let x = Codeword::new(vec![0, 1, 0, 0, 1, 1, 0, 1]);
        let y = Codeword::new(x.bits.iter().map(|b| b ^ 1).collect());
        let rx = transmit(&x, &cfg, &mut RngStream::new(5));
        let ry = transmit(&y, &cfg, &mut RngStream::new(5));
        for i in 0..8 {
            // r = s + e, so rx + ry = 2e and rx - ry = 2s.
            let s = if x.bits[i] == 0 { 1.0 } else { -1.0 };
            assert!(((rx[i] - ry[i]) / 2.0 - s).abs() < 1e-12);
        }
    }
}
