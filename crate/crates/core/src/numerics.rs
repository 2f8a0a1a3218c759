//! Special functions, root bracketing and the seeded Gaussian source.
//!
//! Everything here is deterministic: the transcendental functions come from
//! `libm` rather than the platform math library so that simulation streams
//! reproduce bit-for-bit across targets.

use crate::error::{Error, Result};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{PI, SQRT_2};

/// ln(sqrt(2*pi))
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Number of continued-fraction terms used for the scaled erfc tail.
const ERFCX_TERMS: u32 = 120;

/// A natural-log-domain probability (or any nonnegative quantity).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LogProb(pub f64);

impl LogProb {
    pub const ZERO: LogProb = LogProb(f64::NEG_INFINITY);
    pub const ONE: LogProb = LogProb(0.0);

    pub fn from_prob(p: f64) -> Self {
        LogProb(p.ln())
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn exp(self) -> f64 {
        self.0.exp()
    }

    /// ln(e^a + e^b) without overflow.
    pub fn log_add(self, other: LogProb) -> LogProb {
        let (hi, lo) = if self.0 >= other.0 {
            (self.0, other.0)
        } else {
            (other.0, self.0)
        };
        if hi == f64::NEG_INFINITY {
            return LogProb::ZERO;
        }
        LogProb(hi + (lo - hi).exp().ln_1p())
    }
}

/// Unit Gaussian cdf, Phi(x) = erfc(-x/sqrt 2)/2.
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / SQRT_2)
}

/// Standard normal density.
pub fn std_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x - LN_SQRT_2PI).exp()
}

/// Scaled complementary error function e^{z^2} erfc(z), continued fraction,
/// valid for z >= 3.5.
fn erfcx_tail(z: f64) -> f64 {
    let mut t = z;
    for k in (1..=ERFCX_TERMS).rev() {
        t = z + (k as f64 * 0.5) / t;
    }
    1.0 / (t * PI.sqrt())
}

/// ln Phi(x). Finite for any finite x (about -804.6 at x = -40).
pub fn log_std_normal_cdf(x: f64) -> LogProb {
    if x < -5.0 {
        let z = -x / SQRT_2;
        LogProb(-z * z + (0.5 * erfcx_tail(z)).ln())
    } else if x > 0.0 {
        LogProb((-std_normal_cdf(-x)).ln_1p())
    } else {
        LogProb(std_normal_cdf(x).ln())
    }
}

/// Deterministic bisection. Returns as soon as `f(mid) == 0` or the bracket
/// is narrower than `tol`.
pub fn bisect_root<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(tol > 0.0) || !(lo <= hi) {
        return Err(Error::Domain(format!(
            "bisect_root needs lo <= hi and tol > 0 (lo={lo}, hi={hi}, tol={tol})"
        )));
    }
    let (mut a, mut b) = (lo, hi);
    let (fa, fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa * fb > 0.0 || fa.is_nan() || fb.is_nan() {
        return Err(Error::NoSignChange { lo, hi });
    }
    let a_negative = fa < 0.0;
    for _ in 0..2000 {
        if b - a <= tol {
            break;
        }
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm < 0.0) == a_negative {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// ln C(n, d) via log-gamma.
pub fn log_binomial(n: u64, d: u64) -> Result<f64> {
    if d > n {
        return Err(Error::Domain(format!("log_binomial: d={d} > n={n}")));
    }
    if d == 0 || d == n {
        return Ok(0.0);
    }
    let lg = |x: u64| libm::lgamma(x as f64 + 1.0);
    Ok(lg(n) - lg(d) - lg(n - d))
}

/// dB to linear power ratio.
pub fn db_to_linear(db: f64) -> f64 {
    libm::pow(10.0, db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * libm::log10(x)
}

/// Seeded ChaCha8 stream with a Box-Muller Gaussian sampler.
///
/// A single stream must stay with one owner; parallel code derives one stream
/// per worker. `position` counts 64-bit words consumed from the generator.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    rng: ChaCha8Rng,
    position: u64,
    spare: Option<f64>,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        RngStream {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
            position: 0,
            spare: None,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn position(&self) -> u64 {
        self.position
    }

    pub fn next_u64(&mut self) -> u64 {
        self.position += 1;
        self.rng.next_u64()
    }

    /// Uniform on [0, 1) with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Fills `out` with independent fair bits.
    pub fn fill_bits(&mut self, out: &mut [u8]) {
        for chunk in out.chunks_mut(64) {
            let word = self.next_u64();
            for (i, b) in chunk.iter_mut().enumerate() {
                *b = ((word >> i) & 1) as u8;
            }
        }
    }

    /// One standard normal draw.
    ///
    /// Box-Muller: with u1 in (0, 1] and u2 in [0, 1), the pair
    /// sqrt(-2 ln u1) * (cos 2 pi u2, sin 2 pi u2) is returned one value at a
    /// time; the sine half is held until the next call.
    pub fn standard_normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let r = libm::sqrt(-2.0 * libm::log(u1));
        let angle = 2.0 * PI * u2;
        self.spare = Some(r * libm::sin(angle));
        r * libm::cos(angle)
    }

    pub fn sample_gaussian(&mut self, mean: f64, stddev: f64) -> f64 {
        mean + stddev * self.standard_normal()
    }
}
