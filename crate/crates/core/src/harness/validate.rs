//! Monte Carlo oracles and the cross-module validation suite.

use crate::bounds::{lemma2_bound, BoundVariant, Lemma2Inputs};
use crate::channel::{llr, transmit, ChannelConfig};
use crate::codes::{
    build_extended_golay, conv_2_1_6, conv_3_1_2, encode_block, encode_conv, Codeword,
};
use crate::decoders::{brute_force_ml_block, ml_block_metric, GdaDecoder, MlsdaDecoder, viterbi_ml};
use crate::error::Result;
use crate::numerics::RngStream;
use crate::trellis::{build_trellis, Trellis, ABSENT};

/// Hit counts of {r_1 + ... + r_d + min(w_1,0) + ... + min(w_nd,0) <= 0}
/// for every d in 0..=d_max and nd in 0..=nd_max, all from the same draws.
/// r and w are N(sqrt(2 gamma), 1). Entry [d][nd].
#[derive(Debug, Clone)]
pub struct Lemma2Grid {
    pub samples: u64,
    pub hits: Vec<Vec<u64>>,
}

impl Lemma2Grid {
    pub fn estimate(&self, d: usize, nd: usize) -> f64 {
        self.hits[d][nd] as f64 / self.samples as f64
    }

    pub fn std_error(&self, d: usize, nd: usize) -> f64 {
        let p = self.estimate(d, nd);
        (p * (1.0 - p) / self.samples as f64).sqrt()
    }
}

fn lemma2_grid_worker(
    d_max: usize,
    nd_max: usize,
    gamma: f64,
    samples: u64,
    seed: u64,
) -> Vec<Vec<u64>> {
    let mean = (2.0 * gamma).sqrt();
    let mut rng = RngStream::new(seed);
    let mut hits = vec![vec![0u64; nd_max + 1]; d_max + 1];
    let mut r = vec![0.0; d_max + 1];
    let mut w = vec![0.0; nd_max + 1];
    for _ in 0..samples {
        for i in 1..=d_max {
            r[i] = r[i - 1] + rng.sample_gaussian(mean, 1.0);
        }
        for i in 1..=nd_max {
            w[i] = w[i - 1] + rng.sample_gaussian(mean, 1.0).min(0.0);
        }
        for d in 0..=d_max {
            let row = &mut hits[d];
            // w is nonincreasing, so the hit set in nd is a suffix.
            let first = w.partition_point(|&x| r[d] + x > 0.0);
            for h in row.iter_mut().skip(first) {
                *h += 1;
            }
        }
    }
    hits
}

/// Parallel version of the grid estimate; worker i uses seed ^ i.
pub fn lemma2_mc_grid(
    d_max: usize,
    nd_max: usize,
    gamma: f64,
    samples: u64,
    seed: u64,
    workers: usize,
) -> Lemma2Grid {
    let workers = workers.max(1) as u64;
    let parts: Vec<Vec<Vec<u64>>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|i| {
                let share = samples / workers + u64::from(i < samples % workers);
                s.spawn(move || lemma2_grid_worker(d_max, nd_max, gamma, share, seed ^ i))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    let mut hits = vec![vec![0u64; nd_max + 1]; d_max + 1];
    for p in parts {
        for (d, row) in p.into_iter().enumerate() {
            for (nd, h) in row.into_iter().enumerate() {
                hits[d][nd] += h;
            }
        }
    }
    Lemma2Grid { samples, hits }
}

/// d* by enumerating every information sequence (L <= 16).
pub fn dstar_by_enumeration(trellis: &Trellis) -> Vec<u32> {
    let l = trellis.info_length();
    assert!(l <= 16, "enumeration oracle is for short trellises");
    let n = trellis.code().n_out();
    let states = trellis.num_states();
    let mut table = vec![ABSENT; (trellis.depth() + 1) * states];
    table[0] = 0;
    for info in 0u64..(1 << l) {
        let bits: Vec<u8> = (0..l).map(|i| ((info >> i) & 1) as u8).collect();
        let cw = encode_conv(trellis.code(), &bits).expect("nonempty info");
        let mut state = 0usize;
        let mut weight = 0u32;
        for level in 0..trellis.depth() {
            let u = if level < l { bits[level] as usize } else { 0 };
            state = ((state << 1) | u) & (states - 1);
            weight += cw.bits[level * n..(level + 1) * n]
                .iter()
                .map(|&b| b as u32)
                .sum::<u32>();
            let cell = &mut table[(level + 1) * states + state];
            *cell = (*cell).min(weight);
        }
    }
    table
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn render(&self) -> String {
        self.checks
            .iter()
            .map(|c| {
                format!(
                    "{} {}: {}\n",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.detail
                )
            })
            .collect()
    }

    fn push(&mut self, name: &str, passed: bool, detail: String) {
        self.checks.push(Check {
            name: name.to_string(),
            passed,
            detail,
        });
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ValidationOptions {
    pub seed: u64,
    pub workers: usize,
    /// Samples per cell of the dominance grid.
    pub dominance_samples: u64,
    pub monotonicity_samples: u64,
    pub ml_trials: u64,
    /// Corrupt one d* entry before the d* check (negative control).
    pub corrupt_dstar: bool,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        ValidationOptions {
            seed: 1,
            workers: 4,
            dominance_samples: 100_000,
            monotonicity_samples: 2_000_000,
            ml_trials: 300,
            corrupt_dstar: false,
        }
    }
}

fn check_encoder_fixtures(rep: &mut ValidationReport) {
    let cw = encode_conv(&conv_3_1_2(), &[1, 1, 1, 0, 1]).map(|c| c.to_bit_string());
    let ok = cw.as_deref() == Ok("111010001110100101011");
    rep.push("encoder fixture", ok, format!("{cw:?}"));
    let g = build_extended_golay();
    let (d, count) = g.min_distance();
    rep.push(
        "golay distance",
        d == 8 && count == 759,
        format!("d = {d}, {count} words of weight d"),
    );
}

fn check_dstar(rep: &mut ValidationReport, corrupt: bool) -> Result<()> {
    let mut worst = Vec::new();
    for (code, l) in [(conv_3_1_2(), 5usize), (conv_2_1_6(), 10)] {
        let mut t = build_trellis(&code, l)?;
        if corrupt {
            let v = t.dstar(3, 3).unwrap_or(0);
            t.set_dstar(3, 3, v + 1);
        }
        let oracle = dstar_by_enumeration(&t);
        let bad = t
            .dstar_table()
            .iter()
            .zip(&oracle)
            .filter(|(a, b)| a != b)
            .count();
        worst.push(bad);
    }
    let t = build_trellis(&conv_3_1_2(), 5)?;
    let fig = t.dstar(3, 3);
    let ok = worst.iter().all(|&b| b == 0) && (corrupt || fig == Some(4));
    rep.push(
        "dstar oracle",
        ok,
        format!("mismatched cells {worst:?}, d*_3(3) = {fig:?}"),
    );
    Ok(())
}

fn check_ml(rep: &mut ValidationReport, opts: &ValidationOptions) -> Result<()> {
    let g = build_extended_golay();
    let mut rng = RngStream::new(opts.seed ^ 0x11);
    let mut dec = GdaDecoder::new(&g);
    let mut mismatches = 0u64;
    for snr in [0.0, 2.0, 4.0] {
        let ch = ChannelConfig::block(12, 24, snr);
        for _ in 0..opts.ml_trials {
            let mut info = vec![0u8; 12];
            rng.fill_bits(&mut info);
            let cw = encode_block(&g, &info)?;
            let phi = llr(&transmit(&cw, &ch, &mut rng), &ch);
            let a = dec.decode(&phi)?.decoded;
            let b = brute_force_ml_block(&g, &phi)?;
            let (ma, mb) = (ml_block_metric(&phi, &a), ml_block_metric(&phi, &b));
            if (ma - mb).abs() > 1e-9 * mb.max(1.0) {
                mismatches += 1;
            }
        }
    }
    rep.push(
        "gda ml equivalence",
        mismatches == 0,
        format!("{mismatches} metric mismatches over {} trials", 3 * opts.ml_trials),
    );
    let mut mismatches = 0u64;
    for (code, l) in [(conv_3_1_2(), 5usize), (conv_2_1_6(), 20)] {
        let t = build_trellis(&code, l)?;
        let ch = ChannelConfig::conv(1, l, t.code_length(), 0.0);
        let mut dec = MlsdaDecoder::new(&t);
        for _ in 0..opts.ml_trials {
            let mut info = vec![0u8; l];
            rng.fill_bits(&mut info);
            let cw: Codeword = encode_conv(&code, &info)?;
            let phi = llr(&transmit(&cw, &ch, &mut rng), &ch);
            let out = dec.decode(&phi)?;
            let (_, vm) = viterbi_ml(&t, &phi)?;
            if (out.final_metric - vm).abs() > 1e-9 * vm.max(1.0) {
                mismatches += 1;
            }
        }
    }
    rep.push(
        "mlsda viterbi equivalence",
        mismatches == 0,
        format!("{mismatches} metric mismatches over {} trials", 2 * opts.ml_trials),
    );
    Ok(())
}

fn check_dominance(rep: &mut ValidationReport, opts: &ValidationOptions) -> Result<()> {
    let mut worst = f64::INFINITY;
    let mut worst_at = (0, 0, 0.0);
    for (gi, &gamma) in [0.25, 0.5, 1.0, 2.0].iter().enumerate() {
        let grid = lemma2_mc_grid(10, 30, gamma, opts.dominance_samples, opts.seed ^ (gi as u64) << 8, opts.workers);
        for d in 0..=10usize {
            for nd in 0..=30usize {
                if d + nd == 0 {
                    continue;
                }
                let inp = Lemma2Inputs::new(d as u64, nd as u64, gamma)?;
                for v in [BoundVariant::berry_esseen(), BoundVariant::chernoff()] {
                    let b = lemma2_bound(inp, v)?;
                    let margin = b - (grid.estimate(d, nd) - 4.0 * grid.std_error(d, nd));
                    if margin < worst {
                        worst = margin;
                        worst_at = (d, nd, gamma);
                    }
                }
            }
        }
    }
    rep.push(
        "bound dominance",
        worst >= 0.0,
        format!(
            "smallest margin {worst:.3e} at d={}, nd={}, gamma={}",
            worst_at.0, worst_at.1, worst_at.2
        ),
    );
    Ok(())
}

/// Estimates Pr{sum of d Gaussians + nd clipped <= 0} for d = 1..=8,
/// nd = 10, gamma = 0.5, and checks strict decrease with disjoint 95% CIs.
pub fn monotonicity_estimates(samples: u64, seed: u64, workers: usize) -> Vec<(f64, f64)> {
    let grid = lemma2_mc_grid(8, 10, 0.5, samples, seed, workers);
    (1..=8)
        .map(|d| (grid.estimate(d, 10), 1.96 * grid.std_error(d, 10)))
        .collect()
}

pub fn monotone_with_disjoint_ci(est: &[(f64, f64)]) -> bool {
    est.windows(2).all(|w| w[0].0 - w[0].1 > w[1].0 + w[1].1)
}

fn check_monotonicity(rep: &mut ValidationReport, opts: &ValidationOptions) {
    let est = monotonicity_estimates(opts.monotonicity_samples, opts.seed ^ 0x77, opts.workers);
    let ok = monotone_with_disjoint_ci(&est);
    let shown: Vec<String> = est.iter().map(|(p, h)| format!("{p:.5}+-{h:.5}")).collect();
    rep.push("decrease in d", ok, shown.join(" "));
}

pub fn run_validation_suite(opts: &ValidationOptions) -> Result<ValidationReport> {
    let mut rep = ValidationReport::default();
    check_encoder_fixtures(&mut rep);
    check_dstar(&mut rep, opts.corrupt_dstar)?;
    check_ml(&mut rep, opts)?;
    check_dominance(&mut rep, opts)?;
    check_monotonicity(&mut rep, opts);
    Ok(rep)
}
