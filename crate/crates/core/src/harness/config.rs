//! JSON experiment and code-definition schema.

use crate::bounds::BoundVariant;
use crate::codes::{
    build_extended_golay, build_extended_qr48, conv_2_1_16, conv_2_1_6, conv_3_1_2,
    parse_octal_generators, BlockCode, ConvCode,
};
use crate::error::{Error, Result};
use crate::trellis::{build_trellis, Trellis};
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const BUILTIN_CODES: [&str; 5] = ["golay24", "qr48", "conv-3-1-2", "conv-2-1-6", "conv-2-1-16"];

/// Inline code definition.
///
/// Block: `generator_rows` are hex strings, bit i of the value = position i.
/// Conv: exactly one of `taps` (bit strings, first char = current input) or
/// `octal`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum CodeDef {
    Block {
        name: String,
        #[serde(default)]
        n: Option<usize>,
        #[serde(default)]
        generator_rows: Option<Vec<String>>,
    },
    Conv {
        name: String,
        #[serde(default)]
        m: Option<usize>,
        #[serde(default)]
        taps: Option<Vec<String>>,
        #[serde(default)]
        octal: Option<Vec<String>>,
        #[serde(default)]
        info_length: Option<usize>,
        #[serde(default)]
        note: Option<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CodeRef {
    Name(String),
    Def(CodeDef),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VariantSel {
    Be,
    Chernoff,
    #[default]
    Both,
}

impl VariantSel {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "be" => Ok(VariantSel::Be),
            "chernoff" => Ok(VariantSel::Chernoff),
            "both" => Ok(VariantSel::Both),
            _ => Err(Error::Config(format!("unknown variant '{s}'"))),
        }
    }

    pub fn wants_be(self) -> bool {
        self != VariantSel::Chernoff
    }

    pub fn wants_chernoff(self) -> bool {
        self != VariantSel::Be
    }

    pub fn variants(self) -> Vec<BoundVariant> {
        let mut v = Vec::new();
        if self.wants_be() {
            v.push(BoundVariant::berry_esseen());
        }
        if self.wants_chernoff() {
            v.push(BoundVariant::chernoff());
        }
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeSel {
    Bound,
    Simulate,
    #[default]
    Both,
}

impl ModeSel {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "bound" => Ok(ModeSel::Bound),
            "simulate" => Ok(ModeSel::Simulate),
            "both" => Ok(ModeSel::Both),
            _ => Err(Error::Config(format!("unknown mode '{s}'"))),
        }
    }

    pub fn bound(self) -> bool {
        self != ModeSel::Simulate
    }

    pub fn simulate(self) -> bool {
        self != ModeSel::Bound
    }
}

/// Settings for a subexponential-factor table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtildeSpec {
    pub d_over_n: Vec<f64>,
    pub gamma_db: Vec<f64>,
    pub n_grid: Vec<u64>,
}

fn default_trials() -> u64 {
    10_000
}

fn default_workers() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub code: Option<CodeRef>,
    /// Overrides the information length of a convolutional code.
    #[serde(default)]
    pub info_length: Option<usize>,
    #[serde(default)]
    pub snr_grid: Vec<f64>,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub variant: VariantSel,
    #[serde(default)]
    pub mode: ModeSel,
    #[serde(default = "default_workers")]
    pub workers: usize,
    #[serde(default)]
    pub all_zero: bool,
    /// Per-trial extension cap for the block decoder.
    #[serde(default)]
    pub extension_cap: Option<u64>,
    #[serde(default)]
    pub atilde: Option<AtildeSpec>,
    #[serde(default)]
    pub note: Option<String>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            code: None,
            info_length: None,
            snr_grid: Vec::new(),
            trials: default_trials(),
            seed: 0,
            variant: VariantSel::Both,
            mode: ModeSel::Both,
            workers: 1,
            all_zero: false,
            extension_cap: None,
            atilde: None,
            note: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.workers == 0 {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        if self.snr_grid.iter().any(|x| !x.is_finite()) {
            return Err(Error::Config("snr grid has a non-finite value".into()));
        }
        if self.snr_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("snr grid must be strictly increasing".into()));
        }
        Ok(())
    }

    pub fn resolve_code(&self) -> Result<ResolvedCode> {
        let code = self
            .code
            .as_ref()
            .ok_or_else(|| Error::Config("no code given".into()))?;
        resolve_code(code, self.info_length)
    }
}

/// Parses `start:stop:step` (inclusive of stop within half a step).
pub fn parse_snr_range(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || Error::Config(format!("bad snr range '{s}', want start:stop:step"));
    let nums = parts
        .iter()
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<Vec<f64>>>()?;
    match nums[..] {
        [x] => Ok(vec![x]),
        [a, b, step] if step > 0.0 && b >= a => {
            let count = ((b - a) / step + 0.5).floor() as usize;
            Ok((0..=count).map(|i| a + i as f64 * step).collect())
        }
        _ => Err(bad()),
    }
}

#[derive(Debug, Clone)]
pub enum ResolvedCode {
    Block(BlockCode),
    Conv(Trellis),
}

impl ResolvedCode {
    pub fn name(&self) -> &str {
        match self {
            ResolvedCode::Block(c) => c.name(),
            ResolvedCode::Conv(t) => t.code().name(),
        }
    }
}

const DEFAULT_INFO_LENGTH: usize = 100;

fn builtin_conv(name: &str) -> Option<ConvCode> {
    match name {
        "conv-3-1-2" => Some(conv_3_1_2()),
        "conv-2-1-6" => Some(conv_2_1_6()),
        "conv-2-1-16" => Some(conv_2_1_16()),
        _ => None,
    }
}

fn builtin_block(name: &str) -> Option<BlockCode> {
    match name {
        "golay24" => Some(build_extended_golay()),
        "qr48" => Some(build_extended_qr48()),
        _ => None,
    }
}

pub fn resolve_code(code: &CodeRef, info_length: Option<usize>) -> Result<ResolvedCode> {
    let conv = |c: ConvCode, l: Option<usize>| -> Result<ResolvedCode> {
        let l = info_length.or(l).unwrap_or(DEFAULT_INFO_LENGTH);
        Ok(ResolvedCode::Conv(build_trellis(&c, l)?))
    };
    match code {
        CodeRef::Name(name) => {
            if let Some(b) = builtin_block(name) {
                Ok(ResolvedCode::Block(b))
            } else if let Some(c) = builtin_conv(name) {
                conv(c, None)
            } else {
                Err(Error::Config(format!(
                    "unknown code '{name}', builtins are {}",
                    BUILTIN_CODES.join(", ")
                )))
            }
        }
        CodeRef::Def(CodeDef::Block {
            name,
            n,
            generator_rows,
        }) => match (n, generator_rows) {
            (None, None) => builtin_block(name)
                .map(ResolvedCode::Block)
                .ok_or_else(|| Error::Config(format!("unknown block code '{name}'"))),
            (Some(n), Some(rows)) => {
                let rows = rows
                    .iter()
                    .map(|h| {
                        u64::from_str_radix(h.trim_start_matches("0x"), 16)
                            .map_err(|_| Error::Config(format!("bad hex row '{h}'")))
                    })
                    .collect::<Result<Vec<u64>>>()?;
                Ok(ResolvedCode::Block(BlockCode::from_rows(name, *n, &rows)?))
            }
            _ => Err(Error::Config("block code needs both n and generator_rows".into())),
        },
        CodeRef::Def(CodeDef::Conv {
            name,
            m,
            taps,
            octal,
            info_length: l,
            ..
        }) => {
            let c = match (taps, octal) {
                (Some(t), None) => {
                    let m = m.ok_or_else(|| Error::Config("conv code needs m".into()))?;
                    let t: Vec<&str> = t.iter().map(String::as_str).collect();
                    ConvCode::from_tap_strings(name, m, &t)?
                }
                (None, Some(o)) => {
                    let m = m.ok_or_else(|| Error::Config("conv code needs m".into()))?;
                    let o: Vec<&str> = o.iter().map(String::as_str).collect();
                    parse_octal_generators(&o, m)?.with_name(name)
                }
                (None, None) => builtin_conv(name)
                    .ok_or_else(|| Error::Config(format!("unknown conv code '{name}'")))?,
                (Some(_), Some(_)) => {
                    return Err(Error::Config("give either taps or octal, not both".into()))
                }
            };
            conv(c, *l)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snr_ranges() {
        assert_eq!(parse_snr_range("1:3:1").unwrap(), vec![1.0, 2.0, 3.0]);
        assert_eq!(parse_snr_range("4:5:0.5").unwrap(), vec![4.0, 4.5, 5.0]);
        assert_eq!(parse_snr_range("2").unwrap(), vec![2.0]);
        assert!(parse_snr_range("3:1:1").is_err());
        assert!(parse_snr_range("a:b").is_err());
    }

    #[test]
    fn parse_configs() {
        let c = ExperimentConfig::from_json(
            r#"{"code": "golay24", "snr_grid": [1, 2], "mode": "bound", "variant": "be"}"#,
        )
        .unwrap();
        c.validate().unwrap();
        assert!(matches!(c.resolve_code().unwrap(), ResolvedCode::Block(_)));
        let c = ExperimentConfig::from_json(
            r#"{"code": {"type": "conv", "name": "x", "m": 6, "octal": ["634", "564"], "info_length": 20}}"#,
        )
        .unwrap();
        match c.resolve_code().unwrap() {
            ResolvedCode::Conv(t) => assert_eq!(t.info_length(), 20),
            _ => panic!(),
        }
        let c = ExperimentConfig::from_json(
            r#"{"code": {"type": "block", "name": "rep3", "n": 3, "generator_rows": ["7"]}}"#,
        )
        .unwrap();
        match c.resolve_code().unwrap() {
            ResolvedCode::Block(b) => assert_eq!((b.n(), b.k()), (3, 1)),
            _ => panic!(),
        }
        assert!(ExperimentConfig::from_json(r#"{"bogus": 1}"#).is_err());
        let bad = ExperimentConfig {
            snr_grid: vec![2.0, 1.0],
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        assert!(resolve_code(&CodeRef::Name("nope".into()), None).is_err());
    }
}
