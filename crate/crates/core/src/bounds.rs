//! Tilted-distribution tail bounds and the complexity bounds built on them.
//!
//! All products of many probabilities are formed in natural-log domain and
//! exponentiated last.

use crate::codes::BlockCode;
use crate::error::{Error, Result};
use crate::numerics::{
    db_to_linear, log_binomial, log_std_normal_cdf, std_normal_cdf, LogProb,
};
use crate::trellis::Trellis;
use std::collections::HashMap;
use std::f64::consts::PI;

/// Berry-Esseen constant used throughout.
pub const BERRY_ESSEEN_C: f64 = 0.7655;

/// Terms whose natural log falls below this are treated as exact zeros.
pub const LOG_DROP: f64 = -700.0;

/// Half-width of the gap kept below sqrt(2 gamma) when bracketing lambda.
const LAMBDA_EDGE: f64 = 1e-9;
const LAMBDA_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundKind {
    BerryEsseen,
    Chernoff,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundVariant {
    pub kind: BoundKind,
    pub c: f64,
}

impl BoundVariant {
    pub fn berry_esseen() -> Self {
        BoundVariant {
            kind: BoundKind::BerryEsseen,
            c: BERRY_ESSEEN_C,
        }
    }

    pub fn chernoff() -> Self {
        BoundVariant {
            kind: BoundKind::Chernoff,
            c: BERRY_ESSEEN_C,
        }
    }

    pub fn is_chernoff(&self) -> bool {
        self.kind == BoundKind::Chernoff
    }
}

impl Default for BoundVariant {
    fn default() -> Self {
        Self::berry_esseen()
    }
}

/// Moment generating function and central moments of a tilted variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TiltedMoments {
    pub m: f64,
    pub mu: f64,
    pub sigma2: f64,
    pub rho: f64,
}

impl TiltedMoments {
    pub fn new(m: f64, mu: f64, sigma2: f64, rho: f64) -> Result<Self> {
        if !(m > 0.0) || !(sigma2 > 0.0) || !(rho >= 0.0) || !mu.is_finite() {
            return Err(Error::Domain(format!(
                "invalid tilted moments m={m} mu={mu} sigma2={sigma2} rho={rho}"
            )));
        }
        Ok(TiltedMoments { m, mu, sigma2, rho })
    }

    /// Moments of a finitely supported variable `(value, probability)` tilted
    /// by `theta`.
    pub fn from_discrete(support: &[(f64, f64)], theta: f64) -> Result<Self> {
        let m: f64 = support.iter().map(|&(x, p)| p * (theta * x).exp()).sum();
        if !(m > 0.0) {
            return Err(Error::Domain("empty support".into()));
        }
        let q: Vec<(f64, f64)> = support
            .iter()
            .map(|&(x, p)| (x, p * (theta * x).exp() / m))
            .collect();
        let mu: f64 = q.iter().map(|&(x, w)| w * x).sum();
        let sigma2: f64 = q.iter().map(|&(x, w)| w * (x - mu).powi(2)).sum();
        let rho: f64 = q.iter().map(|&(x, w)| w * (x - mu).abs().powi(3)).sum();
        Self::new(m, mu, sigma2, rho)
    }
}

/// Upper bound on Pr{X_1 + ... + X_n <= -n alpha} from the tilted moments at
/// `theta`.
pub fn lemma1_tail_bound(
    moments: &TiltedMoments,
    n: u64,
    alpha: f64,
    theta: f64,
    variant: BoundVariant,
) -> Result<f64> {
    if !(theta < 0.0) {
        return Err(Error::Domain(format!("theta must be negative, got {theta}")));
    }
    if n == 0 {
        return Err(Error::Domain("n must be positive".into()));
    }
    let nf = n as f64;
    let log_chernoff = theta * alpha * nf + nf * moments.m.ln();
    let a_n = if variant.is_chernoff() {
        1.0
    } else {
        let TiltedMoments { mu, sigma2, rho, .. } = *moments;
        let sigma = sigma2.sqrt();
        let be = 2.0 * variant.c * rho / (sigma2 * sigma * nf.sqrt());
        let b_n = if alpha > theta * sigma2 - mu {
            let shift = mu + alpha;
            sigma / ((2.0 * PI * nf).sqrt() * (shift - theta * sigma2))
                * (-shift * shift * nf / (2.0 * sigma2)).exp()
                + be
        } else {
            (theta * (theta * sigma2 - 2.0 * (mu + alpha)) * nf / 2.0).exp() + be
        };
        b_n.min(1.0)
    };
    Ok((a_n.ln() + log_chernoff).exp().clamp(0.0, 1.0))
}

/// Mean of min(N(sqrt(2 gamma), 1), 0).
pub fn mu_hat(gamma: f64) -> f64 {
    let s = (2.0 * gamma).sqrt();
    -(-gamma).exp() / (2.0 * PI).sqrt() + s * std_normal_cdf(-s)
}

/// 1 - K/(1 + K Phi(s)) with K = sqrt(4 pi gamma) e^gamma, written so that a
/// large K does not overflow.
pub fn mean_positivity_threshold(gamma: f64) -> f64 {
    let s = (2.0 * gamma).sqrt();
    let inv_k = (-gamma).exp() / (4.0 * PI * gamma).sqrt();
    1.0 - 1.0 / (inv_k + std_normal_cdf(s))
}

fn lambda_residual(lambda: f64, ratio: f64, gamma: f64, phi_s: f64) -> f64 {
    let lhs = if lambda == 0.0 {
        0.0
    } else {
        lambda * (0.5 * lambda * lambda + log_std_normal_cdf(-lambda).0).exp()
    };
    lhs - (1.0 - ratio) / (2.0 * PI).sqrt() + ratio * gamma.exp() * phi_s * lambda
}

/// Root of the saddle-point equation in [0, sqrt(2 gamma)).
///
/// `n` is the total number of summands, `d` the Gaussian ones.
pub fn solve_lambda(d: u64, n: u64, gamma: f64) -> Result<f64> {
    if !(gamma > 0.0) || d == 0 || d >= n {
        return Err(Error::Domain(format!(
            "solve_lambda needs 1 <= d < n and gamma > 0 (d={d}, n={n}, gamma={gamma})"
        )));
    }
    let ratio = d as f64 / n as f64;
    let s = (2.0 * gamma).sqrt();
    let phi_s = std_normal_cdf(s);
    let hi = s - LAMBDA_EDGE;
    let f = |l: f64| lambda_residual(l, ratio, gamma, phi_s);
    crate::numerics::bisect_root(f, 0.0, hi, LAMBDA_TOL)
        .map_err(|_| Error::NoRoot { d, n, gamma })
}

/// Residual of the lambda equation, exposed for diagnostics.
pub fn lambda_equation_residual(d: u64, n: u64, gamma: f64, lambda: f64) -> f64 {
    let ratio = d as f64 / n as f64;
    let s = (2.0 * gamma).sqrt();
    lambda_residual(lambda, ratio, gamma, std_normal_cdf(s))
}

/// The subexponential factor and the tilted quantities it is built from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ATilde {
    pub value: f64,
    pub a: f64,
    pub mu_tilde: f64,
    pub sigma2_tilde: f64,
    pub rho_tilde: f64,
    /// Set when the tilted variance came out nonpositive; `value` is then 1.
    pub invalid_state: bool,
}

/// Tilted mean, variance and third absolute moment of the clipped summand at
/// the saddle point, in closed form.
pub fn tilted_clipped_moments(d: u64, nd: u64, gamma: f64, lambda: f64) -> (f64, f64, f64) {
    let df = d as f64;
    let ndf = nd as f64;
    let nf = df + ndf;
    let l2 = lambda * lambda;
    let e = (2.0 * PI).sqrt() * lambda * gamma.exp() * std_normal_cdf((2.0 * gamma).sqrt());
    let mu = -(df / ndf) * lambda;
    let sigma2 = -df / ndf - nf * df / (ndf * ndf) * l2 + (nf / ndf) / (1.0 + e);
    let tail = (2.0 * PI).sqrt()
        * lambda
        * (0.5 * l2 + log_std_normal_cdf(-nf / ndf * lambda).0).exp();
    let braces = 1.0 - df * (nf + df) / (ndf * ndf) * l2
        + 2.0 * (nf * nf / (ndf * ndf) * l2 + 2.0)
            * (-df * (2.0 * nf - df) * l2 / (2.0 * ndf * ndf)).exp()
        - (df / ndf) * ((nf + df) / ndf * l2 + 3.0) * e
        - (2.0 * nf / ndf) * (nf * nf / (ndf * ndf) * l2 + 3.0) * tail;
    let rho = (nf / ndf) * lambda / (1.0 + e) * braces;
    (mu, sigma2, rho)
}

pub fn compute_a_tilde(
    d: u64,
    nd: u64,
    gamma: f64,
    lambda: f64,
    variant: BoundVariant,
) -> Result<ATilde> {
    if nd == 0 {
        return Err(Error::Domain("compute_a_tilde needs nd >= 1".into()));
    }
    let (mu_tilde, sigma2_tilde, rho_tilde) = tilted_clipped_moments(d, nd, gamma, lambda);
    let s = (2.0 * gamma).sqrt();
    let a = -mu_hat(gamma) + (s - lambda) * sigma2_tilde + mu_tilde;
    let mut out = ATilde {
        value: 1.0,
        a,
        mu_tilde,
        sigma2_tilde,
        rho_tilde,
        invalid_state: false,
    };
    if variant.is_chernoff() {
        return Ok(out);
    }
    if !(sigma2_tilde > 0.0) {
        out.invalid_state = true;
        return Ok(out);
    }
    if a > 0.0 {
        let ndf = nd as f64;
        let sigma = sigma2_tilde.sqrt();
        let raw = sigma / (a * (2.0 * PI * ndf).sqrt())
            + 2.0 * variant.c * rho_tilde / (sigma2_tilde * sigma * ndf.sqrt());
        out.value = raw.min(1.0);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lemma2Inputs {
    pub d: u64,
    pub nd: u64,
    pub gamma: f64,
}

impl Lemma2Inputs {
    pub fn new(d: u64, nd: u64, gamma: f64) -> Result<Self> {
        let v = Lemma2Inputs { d, nd, gamma };
        v.validate()?;
        Ok(v)
    }

    fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0) || !self.gamma.is_finite() {
            return Err(Error::Domain(format!("gamma must be positive, got {}", self.gamma)));
        }
        if self.d + self.nd == 0 {
            return Err(Error::Domain("d + nd must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lemma2Case {
    /// d = 0: every summand is nonpositive.
    NoGaussian,
    /// nd = 0: plain Gaussian tail.
    NoClipped,
    Saddle,
    ConditionFails,
    NoRoot,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lemma2Detail {
    pub case: Lemma2Case,
    pub log_bound: f64,
    pub lambda: Option<f64>,
    pub a_tilde: Option<ATilde>,
    pub first_term: f64,
    pub log_second_term: f64,
}

impl Lemma2Detail {
    pub fn bound(&self) -> f64 {
        self.log_bound.exp()
    }

    fn trivial(case: Lemma2Case) -> Self {
        Lemma2Detail {
            case,
            log_bound: 0.0,
            lambda: None,
            a_tilde: None,
            first_term: 1.0,
            log_second_term: f64::NEG_INFINITY,
        }
    }
}

pub fn lemma2_detail(inp: Lemma2Inputs, variant: BoundVariant) -> Result<Lemma2Detail> {
    inp.validate()?;
    let Lemma2Inputs { d, nd, gamma } = inp;
    if d == 0 {
        return Ok(Lemma2Detail::trivial(Lemma2Case::NoGaussian));
    }
    let s = (2.0 * gamma).sqrt();
    if nd == 0 {
        let lp = log_std_normal_cdf(-(2.0 * gamma * d as f64).sqrt()).0;
        return Ok(Lemma2Detail {
            case: Lemma2Case::NoClipped,
            log_bound: lp.min(0.0),
            lambda: None,
            a_tilde: None,
            first_term: lp.exp(),
            log_second_term: f64::NEG_INFINITY,
        });
    }
    let n = d + nd;
    let ratio = d as f64 / n as f64;
    if ratio < mean_positivity_threshold(gamma) {
        return Ok(Lemma2Detail::trivial(Lemma2Case::ConditionFails));
    }
    let lambda = match solve_lambda(d, n, gamma) {
        Ok(l) => l,
        Err(Error::NoRoot { .. }) => return Ok(Lemma2Detail::trivial(Lemma2Case::NoRoot)),
        Err(e) => return Err(e),
    };
    let at = compute_a_tilde(d, nd, gamma, lambda, variant)?;
    let df = d as f64;
    let ndf = nd as f64;
    let sd = df.sqrt();
    let mh = mu_hat(gamma);
    let first = std_normal_cdf(-(ndf * mh + df * s) / sd);
    let ln_m = LogProb(log_std_normal_cdf(-lambda).0 - gamma + 0.5 * lambda * lambda)
        .log_add(log_std_normal_cdf(s))
        .0;
    let log_second = at.value.ln()
        + ndf * ln_m
        + df * (-gamma + 0.5 * lambda * lambda)
        + log_std_normal_cdf((ndf * mh + lambda * df) / sd).0;
    let total = LogProb(first.ln()).log_add(LogProb(log_second)).0;
    Ok(Lemma2Detail {
        case: Lemma2Case::Saddle,
        log_bound: total.min(0.0),
        lambda: Some(lambda),
        a_tilde: Some(at),
        first_term: first,
        log_second_term: log_second,
    })
}

/// ln B(d, nd, gamma), clamped to at most 0.
pub fn lemma2_log_bound(inp: Lemma2Inputs, variant: BoundVariant) -> Result<f64> {
    Ok(lemma2_detail(inp, variant)?.log_bound)
}

/// Upper bound on Pr{Y <= 0} for d Gaussian and nd clipped summands.
pub fn lemma2_bound(inp: Lemma2Inputs, variant: BoundVariant) -> Result<f64> {
    Ok(lemma2_log_bound(inp, variant)?.exp())
}

/// Bound on the mean number of branch metric computations of the simplified
/// GDA for an (n, k) block code.
pub fn theorem1_bound(code: &BlockCode, gamma_b_db: f64, variant: BoundVariant) -> Result<f64> {
    theorem1_bound_nk(code.n() as u64, code.k() as u64, gamma_b_db, variant)
}

pub fn theorem1_bound_nk(n: u64, k: u64, gamma_b_db: f64, variant: BoundVariant) -> Result<f64> {
    if k == 0 || k > n {
        return Err(Error::Domain(format!("need 1 <= k <= n, got n={n} k={k}")));
    }
    let gamma = (k as f64 / n as f64) * db_to_linear(gamma_b_db);
    let mut sum = 0.0;
    for level in 0..k {
        for d in 0..=level {
            let lb = lemma2_log_bound(Lemma2Inputs::new(d, n - level, gamma)?, variant)?;
            let term = log_binomial(level, d)? + lb;
            if term >= LOG_DROP {
                sum += term.exp();
            }
        }
    }
    Ok(2.0 * sum)
}

/// Bound on the mean number of branch metric computations of the MLSDA on
/// the given trellis.
pub fn theorem2_bound(trellis: &Trellis, gamma_b_db: f64, variant: BoundVariant) -> Result<f64> {
    let code = trellis.code();
    let n_out = code.n_out() as u64;
    let l = trellis.info_length() as u64;
    let big_n = trellis.code_length() as u64;
    let gamma = (l as f64 / big_n as f64) * db_to_linear(gamma_b_db);
    let mut cache: HashMap<(u64, u64), f64> = HashMap::new();
    let mut sum = 0.0;
    for level in 0..l {
        let nd = big_n - level * n_out;
        for state in 0..trellis.num_states() {
            let Some(d) = trellis.dstar(level as usize, state) else {
                continue;
            };
            let d = d as u64;
            let lb = match cache.get(&(d, nd)) {
                Some(&v) => v,
                None => {
                    let v = lemma2_log_bound(Lemma2Inputs::new(d, nd, gamma)?, variant)?;
                    cache.insert((d, nd), v);
                    v
                }
            };
            if lb >= LOG_DROP {
                sum += lb.exp();
            }
        }
    }
    Ok(2.0 * sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn be() -> BoundVariant {
        BoundVariant::berry_esseen()
    }

    fn ch() -> BoundVariant {
        BoundVariant::chernoff()
    }

    /// Composite Simpson on [a, b] with `m` (even) panels.
    fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, m: usize) -> f64 {
        let h = (b - a) / m as f64;
        let mut acc = f(a) + f(b);
        for i in 1..m {
            let x = a + i as f64 * h;
            acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(x);
        }
        acc * h / 3.0
    }

    fn phi(x: f64) -> f64 {
        (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
    }

    /// Tilted moments of min(N(s,1),0) under exp(t z) reweighting, by
    /// quadrature: atom Phi(s) at 0 plus density e^{tz} phi(z - s) on z < 0.
    fn quad_tilted(gamma: f64, lambda: f64) -> (f64, f64, f64) {
        let s = (2.0 * gamma).sqrt();
        let t = lambda - s;
        let atom = std_normal_cdf(s);
        let dens = |z: f64| (t * z).exp() * phi(z - s);
        let lo = -40.0;
        let m = atom + simpson(dens, lo, 0.0, 200_000);
        let mean = simpson(|z| z * dens(z), lo, 0.0, 200_000) / m;
        let var = (atom * mean * mean
            + simpson(|z| (z - mean).powi(2) * dens(z), lo, 0.0, 200_000))
            / m;
        let split = mean.min(0.0);
        let third = (atom * mean.abs().powi(3)
            + simpson(|z| (z - mean).abs().powi(3) * dens(z), lo, split, 200_000)
            + simpson(|z| (z - mean).abs().powi(3) * dens(z), split, 0.0, 200_000))
            / m;
        (mean, var, third)
    }

    #[test]
    fn mu_hat_references() {
        assert!((mu_hat(0.5) - -0.083_315_470_587_686_3).abs() < 1e-14);
        assert!((mu_hat(1.0) - -0.035_535_327_193_216_5).abs() < 1e-14);
        assert!(mu_hat(50.0) < 0.0 && mu_hat(50.0) > -1e-20);
    }

    #[test]
    fn mu_hat_against_quadrature() {
        for &g in &[0.1f64, 0.25, 0.5, 1.0, 2.0, 4.0] {
            let s = (2.0 * g).sqrt();
            let q = simpson(|z| z * phi(z - s), -40.0, 0.0, 100_000);
            assert!((mu_hat(g) - q).abs() < 1e-12, "gamma={g}");
        }
    }

    #[test]
    fn lambda_residual_small() {
        let l = solve_lambda(20, 100, 0.5).unwrap();
        assert!((0.0..1.0).contains(&l));
        assert!(lambda_equation_residual(20, 100, 0.5, l).abs() < 1e-9);
    }

    #[test]
    fn lambda_grid_scan_brackets_root() {
        let (d, n, g) = (20u64, 100u64, 0.5);
        let l = solve_lambda(d, n, g).unwrap();
        let s = (2.0 * g).sqrt();
        let pts = 10_000;
        let mut crossing = None;
        let mut prev = lambda_equation_residual(d, n, g, 0.0);
        for i in 1..=pts {
            let x = s * i as f64 / pts as f64;
            let v = lambda_equation_residual(d, n, g, x);
            if prev < 0.0 && v >= 0.0 {
                crossing = Some((s * (i - 1) as f64 / pts as f64, x));
                break;
            }
            prev = v;
        }
        let (a, b) = crossing.expect("sign change on the grid");
        assert!(l >= a - 1e-12 && l <= b + 1e-12);
    }

    #[test]
    fn lambda_is_stationary_point() {
        let (d, n, g) = (20u64, 100u64, 0.5);
        let l = solve_lambda(d, n, g).unwrap();
        let s = (2.0 * g).sqrt();
        let obj = |x: f64| {
            let inner = std_normal_cdf(-x) * (-g + 0.5 * x * x).exp() + std_normal_cdf(s);
            (n - d) as f64 * inner.ln() + d as f64 * (-g + 0.5 * x * x)
        };
        let h = 1e-5;
        let deriv = (obj(l + h) - obj(l - h)) / (2.0 * h);
        assert!(deriv.abs() < 1e-6, "derivative {deriv}");
    }

    #[test]
    fn lambda_depends_on_ratio_only() {
        for &g in &[0.3f64, 0.5, 1.0] {
            let a = solve_lambda(10, 50, g).unwrap();
            let b = solve_lambda(20, 100, g).unwrap();
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn closed_form_moments_match_quadrature() {
        for &(d, nd, g) in &[(20u64, 80u64, 0.5), (5, 15, 1.0), (40, 160, 0.3), (3, 30, 2.0)] {
            let l = solve_lambda(d, d + nd, g).unwrap();
            let (mu, s2, rho) = tilted_clipped_moments(d, nd, g, l);
            let (qm, qv, qr) = quad_tilted(g, l);
            assert!((mu - qm).abs() < 1e-8, "mean {mu} vs {qm}");
            assert!((s2 - qv).abs() < 1e-8, "var {s2} vs {qv}");
            assert!((rho - qr).abs() < 1e-7, "rho {rho} vs {qr}");
        }
    }

    #[test]
    fn lemma2_special_cases() {
        assert_eq!(lemma2_bound(Lemma2Inputs::new(0, 10, 1.0).unwrap(), be()).unwrap(), 1.0);
        let v = lemma2_bound(Lemma2Inputs::new(1, 0, 0.5).unwrap(), be()).unwrap();
        assert!((v - 0.158_655_253_931_457_05).abs() < 1e-14);
        assert!(Lemma2Inputs::new(0, 0, 1.0).is_err());
        assert!(Lemma2Inputs::new(1, 1, 0.0).is_err());
    }

    #[test]
    fn lemma2_condition_failure_gives_one() {
        // Few Gaussian summands against many clipped ones at low SNR.
        let inp = Lemma2Inputs::new(1, 200, 0.1).unwrap();
        let det = lemma2_detail(inp, be()).unwrap();
        assert_eq!(det.case, Lemma2Case::ConditionFails);
        assert_eq!(det.bound(), 1.0);
    }

    #[test]
    fn lemma2_no_gaussian_underflow() {
        let v = lemma2_log_bound(Lemma2Inputs::new(3000, 0, 5.0).unwrap(), ch()).unwrap();
        assert!(v.is_finite() && v < -10_000.0);
    }

    #[test]
    fn lemma1_binomial_oracle() {
        // X uniform on {-1, +1}, n = 20, tail at -10.
        let theta = -0.5;
        let mom = TiltedMoments::from_discrete(&[(-1.0, 0.5), (1.0, 0.5)], theta).unwrap();
        let n = 20u64;
        let mut exact = 0.0;
        for heads in 0..=n {
            let sum = 2.0 * heads as f64 - n as f64;
            if sum <= -10.0 {
                exact += log_binomial(n, heads).unwrap().exp() * 0.5f64.powi(20);
            }
        }
        for v in [be(), ch()] {
            let b = lemma1_tail_bound(&mom, n, 0.5, theta, v).unwrap();
            assert!(b >= exact, "{b} < {exact}");
        }
        let c = lemma1_tail_bound(&mom, n, 0.5, theta, ch()).unwrap();
        let expect = (theta * 0.5 * 20.0 + 20.0 * mom.m.ln()).exp().min(1.0);
        assert!((c - expect).abs() < 1e-15);
        assert!(lemma1_tail_bound(&mom, n, 0.5, 0.1, ch()).is_err());
        assert!(lemma1_tail_bound(&mom, 0, 0.5, theta, ch()).is_err());
    }

    #[test]
    fn theorem1_minimum_is_2k() {
        let v = theorem1_bound_nk(24, 12, 30.0, be()).unwrap();
        assert!((24.0..24.5).contains(&v), "{v}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]

        #[test]
        fn be_never_exceeds_chernoff(d in 0u64..40, nd in 0u64..120, g in 0.05f64..6.0) {
            prop_assume!(d + nd > 0);
            let inp = Lemma2Inputs::new(d, nd, g).unwrap();
            let a = lemma2_bound(inp, be()).unwrap();
            let b = lemma2_bound(inp, ch()).unwrap();
            prop_assert!(a <= b * (1.0 + 1e-12));
            prop_assert!((0.0..=1.0).contains(&a));
            prop_assert!((0.0..=1.0).contains(&b));
        }

        #[test]
        fn a_tilde_in_unit_interval(d in 1u64..60, nd in 1u64..200, g in 0.05f64..6.0) {
            if let Ok(l) = solve_lambda(d, d + nd, g) {
                let at = compute_a_tilde(d, nd, g, l, be()).unwrap();
                prop_assert!(at.value > 0.0 && at.value <= 1.0);
                prop_assert_eq!(compute_a_tilde(d, nd, g, l, ch()).unwrap().value, 1.0);
            }
        }

        #[test]
        fn lambda_in_bracket(d in 1u64..60, nd in 1u64..200, g in 0.05f64..6.0) {
            let n = d + nd;
            if (d as f64 / n as f64) >= mean_positivity_threshold(g) {
                if let Ok(l) = solve_lambda(d, n, g) {
                    prop_assert!(l >= 0.0 && l < (2.0 * g).sqrt());
                    prop_assert!(lambda_equation_residual(d, n, g, l).abs() < 1e-9);
                }
            }
        }

        #[test]
        fn lemma1_min_construction(p in 0.05f64..0.95, theta in -3.0f64..-0.01, alpha in -0.5f64..1.0, n in 1u64..200) {
            let mom = TiltedMoments::from_discrete(&[(-1.0, p), (1.0, 1.0 - p)], theta).unwrap();
            let a = lemma1_tail_bound(&mom, n, alpha, theta, be()).unwrap();
            let b = lemma1_tail_bound(&mom, n, alpha, theta, ch()).unwrap();
            prop_assert!(a <= b * (1.0 + 1e-12));
        }
    }
}
