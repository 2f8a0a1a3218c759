//! Bound curves, Monte Carlo complexity curves and CSV output.

use super::config::{ExperimentConfig, ResolvedCode};
use crate::bounds::{
    compute_a_tilde, mean_positivity_threshold, solve_lambda, theorem1_bound, theorem2_bound,
    BoundVariant,
};
use crate::channel::{llr, transmit, ChannelConfig};
use crate::codes::{encode_block, encode_conv, BlockCode, Codeword};
use crate::decoders::{GdaDecoder, MlsdaDecoder};
use crate::error::{Error, Result};
use crate::numerics::{db_to_linear, RngStream};
use crate::trellis::Trellis;
use std::fmt::Write as _;

pub const CSV_HEADER: &str = "gamma_b_db,bound_be,bound_chernoff,sim_mean,sim_ci95_half,trials";

/// Golden-ratio increment separating the seeds of successive grid points.
const POINT_SEED_STEP: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CurvePoint {
    pub gamma_b_db: f64,
    pub bound_be: Option<f64>,
    pub bound_chernoff: Option<f64>,
    pub sim_mean: Option<f64>,
    pub sim_ci95_half: Option<f64>,
    pub trials: Option<u64>,
    /// Trials dropped for hitting the extension cap (not part of the CSV).
    pub overflow: u64,
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.16e}")).unwrap_or_default()
}

impl CurvePoint {
    pub fn csv_row(&self) -> String {
        format!(
            "{:.16e},{},{},{},{},{}",
            self.gamma_b_db,
            fmt_opt(self.bound_be),
            fmt_opt(self.bound_chernoff),
            fmt_opt(self.sim_mean),
            fmt_opt(self.sim_ci95_half),
            self.trials.map(|t| t.to_string()).unwrap_or_default()
        )
    }
}

pub fn curve_to_csv(points: &[CurvePoint]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for p in points {
        s.push_str(&p.csv_row());
        s.push('\n');
    }
    s
}

fn bound_at(code: &ResolvedCode, snr: f64, v: BoundVariant) -> Result<f64> {
    match code {
        ResolvedCode::Block(c) => theorem1_bound(c, snr, v),
        ResolvedCode::Conv(t) => theorem2_bound(t, snr, v),
    }
}

pub fn run_bound_curve(cfg: &ExperimentConfig) -> Result<Vec<CurvePoint>> {
    cfg.validate()?;
    let code = cfg.resolve_code()?;
    bound_curve_for(&code, cfg)
}

fn bound_curve_for(code: &ResolvedCode, cfg: &ExperimentConfig) -> Result<Vec<CurvePoint>> {
    cfg.snr_grid
        .iter()
        .map(|&snr| {
            let mut p = CurvePoint {
                gamma_b_db: snr,
                ..Default::default()
            };
            if cfg.variant.wants_be() {
                p.bound_be = Some(bound_at(code, snr, BoundVariant::berry_esseen())?);
            }
            if cfg.variant.wants_chernoff() {
                p.bound_chernoff = Some(bound_at(code, snr, BoundVariant::chernoff())?);
            }
            Ok(p)
        })
        .collect()
}

/// Complexity statistics for one SNR point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimStats {
    pub mean: f64,
    pub ci95_half: f64,
    pub trials: u64,
    pub overflow: u64,
    pub mean_total: f64,
}

/// Knobs for one Monte Carlo point.
#[derive(Debug, Clone, Copy)]
pub struct SimOptions {
    pub trials: u64,
    pub seed: u64,
    pub workers: usize,
    pub all_zero: bool,
    pub extension_cap: Option<u64>,
}

impl SimOptions {
    pub fn new(trials: u64, seed: u64) -> Self {
        SimOptions {
            trials,
            seed,
            workers: 1,
            all_zero: false,
            extension_cap: None,
        }
    }
}

/// Outcome of one trial: None if it overflowed the cap.
type TrialResult = Option<(u64, u64)>;

fn random_info(rng: &mut RngStream, len: usize, all_zero: bool) -> Vec<u8> {
    let mut v = vec![0u8; len];
    if !all_zero {
        rng.fill_bits(&mut v);
    }
    v
}

fn block_worker(
    code: &BlockCode,
    ch: &ChannelConfig,
    opts: &SimOptions,
    worker: usize,
) -> Result<Vec<(u64, TrialResult)>> {
    let mut rng = RngStream::new(opts.seed ^ worker as u64);
    let mut dec = GdaDecoder::new(code).with_cap(opts.extension_cap);
    let mut out = Vec::new();
    let mut t = worker as u64;
    while t < opts.trials {
        let info = random_info(&mut rng, code.k(), opts.all_zero);
        let cw = encode_block(code, &info)?;
        let phi = llr(&transmit(&cw, ch, &mut rng), ch);
        let r = match dec.decode(&phi) {
            Ok(o) => Some((o.branch_computations, o.branch_computations_total)),
            Err(Error::ExtensionCap { .. }) => None,
            Err(e) => return Err(e),
        };
        out.push((t, r));
        t += opts.workers as u64;
    }
    Ok(out)
}

fn conv_worker(
    trellis: &Trellis,
    ch: &ChannelConfig,
    opts: &SimOptions,
    worker: usize,
) -> Result<Vec<(u64, TrialResult)>> {
    let mut rng = RngStream::new(opts.seed ^ worker as u64);
    let mut dec = MlsdaDecoder::new(trellis);
    let mut out = Vec::new();
    let mut t = worker as u64;
    while t < opts.trials {
        let info = random_info(&mut rng, trellis.info_length(), opts.all_zero);
        let cw: Codeword = encode_conv(trellis.code(), &info)?;
        let phi = llr(&transmit(&cw, ch, &mut rng), ch);
        let o = dec.decode(&phi)?;
        out.push((t, Some((o.branch_computations, o.branch_computations_total))));
        t += opts.workers as u64;
    }
    Ok(out)
}

/// Runs `opts.trials` independent transmissions at one SNR. Trial t goes to
/// worker t mod W, whose stream is seeded with `opts.seed ^ W_index`.
pub fn simulate_point(code: &ResolvedCode, gamma_b_db: f64, opts: &SimOptions) -> Result<SimStats> {
    if opts.trials == 0 || opts.workers == 0 {
        return Err(Error::Config("trials and workers must be positive".into()));
    }
    let ch = match code {
        ResolvedCode::Block(c) => ChannelConfig::block(c.k(), c.n(), gamma_b_db),
        ResolvedCode::Conv(t) => ChannelConfig::conv(1, t.info_length(), t.code_length(), gamma_b_db),
    };
    let workers = opts.workers.min(opts.trials as usize).max(1);
    let opts = SimOptions { workers, ..*opts };
    let per_worker: Vec<Result<Vec<(u64, TrialResult)>>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let ch = &ch;
                let opts = &opts;
                s.spawn(move || match code {
                    ResolvedCode::Block(c) => block_worker(c, ch, opts, w),
                    ResolvedCode::Conv(t) => conv_worker(t, ch, opts, w),
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker panicked"))
            .collect()
    });
    let mut results: Vec<TrialResult> = vec![None; opts.trials as usize];
    for r in per_worker {
        for (t, v) in r? {
            results[t as usize] = v;
        }
    }
    // Exact integer accumulation in trial order.
    let (mut sum, mut sumsq, mut sum_total) = (0u128, 0u128, 0u128);
    let (mut used, mut overflow) = (0u64, 0u64);
    for r in &results {
        match r {
            Some((c, tot)) => {
                sum += *c as u128;
                sumsq += (*c as u128) * (*c as u128);
                sum_total += *tot as u128;
                used += 1;
            }
            None => overflow += 1,
        }
    }
    if used == 0 {
        return Ok(SimStats {
            mean: f64::NAN,
            ci95_half: f64::NAN,
            trials: 0,
            overflow,
            mean_total: f64::NAN,
        });
    }
    let tf = used as f64;
    let mean = sum as f64 / tf;
    let var = if used > 1 {
        let centered = sumsq as f64 - (sum as f64) * (sum as f64) / tf;
        (centered / (tf - 1.0)).max(0.0)
    } else {
        0.0
    };
    Ok(SimStats {
        mean,
        ci95_half: 1.96 * (var / tf).sqrt(),
        trials: used,
        overflow,
        mean_total: sum_total as f64 / tf,
    })
}

fn point_seed(seed: u64, idx: usize) -> u64 {
    seed.wrapping_add((idx as u64).wrapping_mul(POINT_SEED_STEP))
}

pub fn run_simulation_curve(cfg: &ExperimentConfig) -> Result<Vec<CurvePoint>> {
    cfg.validate()?;
    let code = cfg.resolve_code()?;
    simulation_curve_for(&code, cfg)
}

fn simulation_curve_for(code: &ResolvedCode, cfg: &ExperimentConfig) -> Result<Vec<CurvePoint>> {
    cfg.snr_grid
        .iter()
        .enumerate()
        .map(|(i, &snr)| {
            let opts = SimOptions {
                trials: cfg.trials,
                seed: point_seed(cfg.seed, i),
                workers: cfg.workers,
                all_zero: cfg.all_zero,
                extension_cap: cfg.extension_cap,
            };
            let st = simulate_point(code, snr, &opts)?;
            if st.overflow > 0 {
                eprintln!(
                    "gamma_b = {snr} dB: {} of {} trials hit the extension cap and were excluded",
                    st.overflow, cfg.trials
                );
            }
            Ok(CurvePoint {
                gamma_b_db: snr,
                sim_mean: (st.trials > 0).then_some(st.mean),
                sim_ci95_half: (st.trials > 0).then_some(st.ci95_half),
                trials: Some(st.trials),
                overflow: st.overflow,
                ..Default::default()
            })
        })
        .collect()
}

/// Bound and/or simulation per `cfg.mode`, merged per grid point.
pub fn run_curve(cfg: &ExperimentConfig) -> Result<Vec<CurvePoint>> {
    cfg.validate()?;
    let code = cfg.resolve_code()?;
    let mut points: Vec<CurvePoint> = cfg
        .snr_grid
        .iter()
        .map(|&g| CurvePoint {
            gamma_b_db: g,
            ..Default::default()
        })
        .collect();
    if cfg.mode.bound() {
        for (p, b) in points.iter_mut().zip(bound_curve_for(&code, cfg)?) {
            p.bound_be = b.bound_be;
            p.bound_chernoff = b.bound_chernoff;
        }
    }
    if cfg.mode.simulate() {
        for (p, s) in points.iter_mut().zip(simulation_curve_for(&code, cfg)?) {
            p.sim_mean = s.sim_mean;
            p.sim_ci95_half = s.sim_ci95_half;
            p.trials = s.trials;
            p.overflow = s.overflow;
        }
    }
    Ok(points)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtildeRow {
    pub d_over_n: f64,
    pub gamma_db: f64,
    pub n: u64,
    pub atilde: f64,
}

pub const ATILDE_HEADER: &str = "d_over_n,gamma_db,n,atilde";

/// Subexponential factor at d = round(d_over_n * n) for each n. Where the
/// saddle point does not exist the factor is reported as 1.
pub fn run_atilde_table(d_over_n: f64, gamma_db: f64, n_grid: &[u64]) -> Result<Vec<AtildeRow>> {
    if !(d_over_n > 0.0 && d_over_n < 1.0) {
        return Err(Error::Config(format!("d/n must lie in (0, 1), got {d_over_n}")));
    }
    let gamma = db_to_linear(gamma_db);
    n_grid
        .iter()
        .map(|&n| {
            let d = (d_over_n * n as f64).round() as u64;
            let mut atilde = 1.0;
            if d >= 1 && d < n && d as f64 / n as f64 >= mean_positivity_threshold(gamma) {
                if let Ok(l) = solve_lambda(d, n, gamma) {
                    atilde = compute_a_tilde(d, n - d, gamma, l, BoundVariant::berry_esseen())?.value;
                }
            }
            Ok(AtildeRow {
                d_over_n,
                gamma_db,
                n,
                atilde,
            })
        })
        .collect()
}

pub fn atilde_to_csv(rows: &[AtildeRow]) -> String {
    let mut s = String::from(ATILDE_HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(
            s,
            "{:.16e},{:.16e},{},{:.16e}",
            r.d_over_n, r.gamma_db, r.n, r.atilde
        );
    }
    s
}

pub fn dstar_to_csv(trellis: &Trellis) -> String {
    let mut s = String::from("level,state,dstar\n");
    for level in 0..=trellis.depth() {
        for state in 0..trellis.num_states() {
            if let Some(d) = trellis.dstar(level, state) {
                let _ = writeln!(s, "{level},{state},{d}");
            }
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::{CodeRef, ModeSel, VariantSel};

    fn cfg(code: &str, grid: Vec<f64>) -> ExperimentConfig {
        ExperimentConfig {
            code: Some(CodeRef::Name(code.into())),
            snr_grid: grid,
            trials: 200,
            seed: 42,
            ..Default::default()
        }
    }

    #[test]
    fn csv_schema() {
        let p = CurvePoint {
            gamma_b_db: 1.0,
            bound_be: Some(2.5),
            ..Default::default()
        };
        assert_eq!(p.csv_row(), "1.0000000000000000e0,2.5000000000000000e0,,,,");
        assert!(curve_to_csv(&[p]).starts_with(CSV_HEADER));
    }

    #[test]
    fn simulation_is_reproducible() {
        let mut c = cfg("golay24", vec![2.0, 3.0]);
        c.mode = ModeSel::Simulate;
        c.workers = 3;
        let a = curve_to_csv(&run_curve(&c).unwrap());
        let b = curve_to_csv(&run_curve(&c).unwrap());
        assert_eq!(a, b);
        assert!(a.lines().nth(1).unwrap().starts_with("2.0"));
    }

    #[test]
    fn bound_curve_is_monotone_and_worker_free() {
        let mut c = cfg("golay24", vec![0.0, 2.0, 4.0, 6.0]);
        c.mode = ModeSel::Bound;
        c.variant = VariantSel::Both;
        let pts = run_bound_curve(&c).unwrap();
        for w in pts.windows(2) {
            assert!(w[1].bound_be.unwrap() <= w[0].bound_be.unwrap());
        }
        c.workers = 4;
        assert_eq!(run_bound_curve(&c).unwrap(), pts);
    }

    #[test]
    fn atilde_table_small_n_is_one() {
        let rows = run_atilde_table(0.2, 1.0, &[10, 20, 40]).unwrap();
        assert!(rows.iter().all(|r| r.atilde == 1.0));
        assert!(run_atilde_table(1.5, 1.0, &[10]).is_err());
    }
}
