//! Binary linear block codes and rate-1/n convolutional codes.

use crate::error::{Error, Result};
use std::sync::OnceLock;

/// Codeword bits, one `u8` (0 or 1) per position.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Codeword {
    pub bits: Vec<u8>,
}

impl Codeword {
    pub fn new(bits: Vec<u8>) -> Self {
        Codeword { bits }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn weight(&self) -> usize {
        self.bits.iter().filter(|&&b| b != 0).count()
    }

    pub fn to_bit_string(&self) -> String {
        self.bits.iter().map(|&b| if b != 0 { '1' } else { '0' }).collect()
    }

    pub fn from_bit_string(s: &str) -> Result<Self> {
        s.chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                '0' => Ok(0u8),
                '1' => Ok(1u8),
                _ => Err(Error::Config(format!("not a bit string: '{s}'"))),
            })
            .collect::<Result<Vec<u8>>>()
            .map(Codeword::new)
    }
}

/// An (n, k) binary linear code in systematic form [I | P], n <= 64.
///
/// Rows are packed: bit j of `rows[i]` is position j of generator row i.
#[derive(Debug, Clone)]
pub struct BlockCode {
    name: String,
    n: usize,
    k: usize,
    rows: Vec<u64>,
    // For each position j >= k, the info bits whose rows cover j.
    parity_masks: Vec<u64>,
    weights: OnceLock<(usize, u64)>,
}

impl PartialEq for BlockCode {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.rows == other.rows
    }
}

impl BlockCode {
    /// Takes any generator whose first k columns form an information set and
    /// row-reduces it into [I | P]. Columns are never permuted.
    pub fn from_rows(name: &str, n: usize, rows: &[u64]) -> Result<Self> {
        let k = rows.len();
        if n == 0 || n > 64 {
            return Err(Error::Construction(format!("n={n} outside 1..=64")));
        }
        if k == 0 || k > n {
            return Err(Error::Construction(format!("k={k} outside 1..=n")));
        }
        let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        if rows.iter().any(|&r| r & !mask != 0) {
            return Err(Error::Construction("row has bits beyond position n-1".into()));
        }
        let mut g = rows.to_vec();
        for col in 0..k {
            let bit = 1u64 << col;
            let pivot = (col..k).find(|&r| g[r] & bit != 0).ok_or_else(|| {
                Error::Construction(format!(
                    "first {k} columns are not an information set (column {col})"
                ))
            })?;
            g.swap(col, pivot);
            let p = g[col];
            for (r, row) in g.iter_mut().enumerate() {
                if r != col && *row & bit != 0 {
                    *row ^= p;
                }
            }
        }
        let parity_masks = (k..n)
            .map(|j| {
                g.iter()
                    .enumerate()
                    .filter(|(_, &r)| (r >> j) & 1 == 1)
                    .fold(0u64, |acc, (i, _)| acc | (1u64 << i))
            })
            .collect();
        Ok(BlockCode {
            name: name.to_string(),
            n,
            k,
            rows: g,
            parity_masks,
            weights: OnceLock::new(),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn rate(&self) -> f64 {
        self.k as f64 / self.n as f64
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    /// Generator row i as bits.
    pub fn row(&self, i: usize) -> Codeword {
        unpack(self.rows[i], self.n)
    }

    /// Codeword bit at position `j >= k` for the packed info word.
    #[inline]
    pub fn parity_bit(&self, info: u64, j: usize) -> u8 {
        ((info & self.parity_masks[j - self.k]).count_ones() & 1) as u8
    }

    /// Packed info word (bit i = info bit i) to packed codeword.
    pub fn encode_packed(&self, info: u64) -> u64 {
        let mut cw = 0u64;
        let mut rest = info;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            cw ^= self.rows[i];
            rest &= rest - 1;
        }
        cw
    }

    pub fn encode(&self, info: &[u8]) -> Result<Codeword> {
        encode_block(self, info)
    }

    /// Minimum nonzero weight and the number of words at that weight, by
    /// Gray-code enumeration of all 2^k codewords. Cached.
    pub fn min_distance(&self) -> (usize, u64) {
        *self.weights.get_or_init(|| {
            let dist = self.weight_distribution();
            let d = (1..dist.len()).find(|&w| dist[w] > 0).unwrap_or(0);
            (d, if d == 0 { 0 } else { dist[d] })
        })
    }

    /// Number of codewords of each weight 0..=n.
    pub fn weight_distribution(&self) -> Vec<u64> {
        let mut dist = vec![0u64; self.n + 1];
        let mut cw = 0u64;
        dist[0] = 1;
        for g in 1u64..(1u64 << self.k) {
            cw ^= self.rows[g.trailing_zeros() as usize];
            dist[cw.count_ones() as usize] += 1;
        }
        dist
    }

    pub fn is_codeword(&self, word: &Codeword) -> bool {
        if word.len() != self.n {
            return false;
        }
        let packed = pack(&word.bits);
        self.encode_packed(packed & ((1u64 << self.k) - 1)) == packed
    }
}

pub(crate) fn pack(bits: &[u8]) -> u64 {
    bits.iter()
        .enumerate()
        .fold(0u64, |acc, (i, &b)| acc | (((b & 1) as u64) << i))
}

pub(crate) fn unpack(word: u64, n: usize) -> Codeword {
    Codeword::new((0..n).map(|i| ((word >> i) & 1) as u8).collect())
}

pub fn encode_block(code: &BlockCode, info: &[u8]) -> Result<Codeword> {
    if info.len() != code.k {
        return Err(Error::LengthMismatch {
            expected: code.k,
            got: info.len(),
        });
    }
    Ok(unpack(code.encode_packed(pack(info)), code.n))
}

// GF(2)[x] helpers on u64, bit i = coefficient of x^i.

fn poly_degree(p: u64) -> i32 {
    63 - p.leading_zeros() as i32
}

fn poly_mod(mut a: u64, b: u64) -> u64 {
    let db = poly_degree(b);
    while a != 0 && poly_degree(a) >= db {
        a ^= b << (poly_degree(a) - db);
    }
    a
}

fn poly_gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = poly_mod(a, b);
        a = b;
        b = r;
    }
    a
}

fn quadratic_residues(p: u64) -> Vec<u64> {
    let mut q: Vec<u64> = (1..p).map(|x| x * x % p).collect();
    q.sort_unstable();
    q.dedup();
    q
}

/// Generator polynomial of the quadratic-residue code of prime length p
/// (p = 8m - 1), as gcd(e(x), x^p - 1) for an idempotent e(x) built from
/// the residues.
pub fn qr_generator_polynomial(p: u64) -> Result<u64> {
    if p >= 63 {
        return Err(Error::Construction(format!("p={p} too large")));
    }
    let q = quadratic_residues(p);
    let nonres: Vec<u64> = (1..p).filter(|x| !q.contains(x)).collect();
    let sum = |set: &[u64]| set.iter().fold(0u64, |acc, &r| acc | (1u64 << r));
    let xp1 = (1u64 << p) | 1;
    let target = (p - 1) / 2;
    for e in [sum(&q), 1 | sum(&q), sum(&nonres), 1 | sum(&nonres)] {
        let g = poly_gcd(xp1, e);
        // The code with this generator has dimension p - deg g.
        if poly_degree(g) as u64 == target {
            return Ok(g);
        }
    }
    Err(Error::Construction(format!("no QR generator of degree {target} for p={p}")))
}

fn extended_cyclic(name: &str, p: usize, g: u64) -> Result<BlockCode> {
    let k = p - poly_degree(g) as usize;
    let rows: Vec<u64> = (0..k)
        .map(|i| {
            let r = g << i;
            r | (((r.count_ones() & 1) as u64) << p)
        })
        .collect();
    BlockCode::from_rows(name, p + 1, &rows)
}

/// x^11 + x^10 + x^6 + x^5 + x^4 + x^2 + 1
pub const GOLAY_GENERATOR: u64 = 0xC75;

/// The (24, 12) extended Golay code.
pub fn build_extended_golay() -> BlockCode {
    extended_cyclic("golay24", 23, GOLAY_GENERATOR).expect("golay generator is valid")
}

/// The (48, 24) extended quadratic-residue code.
pub fn build_extended_qr48() -> BlockCode {
    let g = qr_generator_polynomial(47).expect("x^47 - 1 has a degree-23 factor");
    extended_cyclic("qr48", 47, g).expect("qr48 generator is valid")
}

/// A rate-1/n feedforward convolutional code of memory m.
///
/// `taps[i][j]` multiplies u_{t-j} in output i.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvCode {
    name: String,
    m: usize,
    taps: Vec<Vec<u8>>,
    masks: Vec<u32>,
}

pub const MAX_MEMORY: usize = 24;

impl ConvCode {
    pub fn new(name: &str, m: usize, taps: Vec<Vec<u8>>) -> Result<Self> {
        let c = Self::new_allow_delay(name, m, taps)?;
        if c.taps.iter().all(|t| t[0] == 0) {
            return Err(Error::Construction(
                "no tap vector uses the current input".into(),
            ));
        }
        Ok(c)
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }

    /// Same as `new` without requiring a current-input tap.
    pub fn new_allow_delay(name: &str, m: usize, taps: Vec<Vec<u8>>) -> Result<Self> {
        if m == 0 || m > MAX_MEMORY {
            return Err(Error::Construction(format!("memory m={m} outside 1..={MAX_MEMORY}")));
        }
        if taps.is_empty() {
            return Err(Error::Construction("no tap vectors".into()));
        }
        for t in &taps {
            if t.len() != m + 1 {
                return Err(Error::LengthMismatch {
                    expected: m + 1,
                    got: t.len(),
                });
            }
            if t.iter().any(|&b| b > 1) {
                return Err(Error::Construction("tap entries must be 0 or 1".into()));
            }
        }
        let masks = taps
            .iter()
            .map(|t| {
                t.iter()
                    .enumerate()
                    .fold(0u32, |acc, (j, &b)| acc | ((b as u32) << j))
            })
            .collect();
        Ok(ConvCode {
            name: name.to_string(),
            m,
            taps,
            masks,
        })
    }

    /// Parses tap vectors given as bit strings, first character = tap 0.
    pub fn from_tap_strings(name: &str, m: usize, taps: &[&str]) -> Result<Self> {
        let parsed = taps
            .iter()
            .map(|s| Codeword::from_bit_string(s).map(|c| c.bits))
            .collect::<Result<Vec<_>>>()?;
        Self::new(name, m, parsed)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n_out(&self) -> usize {
        self.taps.len()
    }

    pub fn k_in(&self) -> usize {
        1
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn taps(&self) -> &[Vec<u8>] {
        &self.taps
    }

    pub fn num_states(&self) -> usize {
        1 << self.m
    }

    pub fn tap_strings(&self) -> Vec<String> {
        self.taps
            .iter()
            .map(|t| Codeword::new(t.clone()).to_bit_string())
            .collect()
    }

    /// One encoder step: returns (next state, packed output, bit i = output i).
    #[inline]
    pub fn step(&self, state: usize, input: u8) -> (usize, u32) {
        let reg = ((state as u32) << 1) | (input as u32 & 1);
        let mut out = 0u32;
        for (i, &mask) in self.masks.iter().enumerate() {
            out |= ((reg & mask).count_ones() & 1) << i;
        }
        (reg as usize & (self.num_states() - 1), out)
    }

    /// Codeword length n(L + m) for `info_length` = L.
    pub fn code_length(&self, info_length: usize) -> usize {
        self.n_out() * (info_length + self.m)
    }
}

fn octal_to_taps(s: &str, m: usize) -> Result<Vec<u8>> {
    if s.is_empty() || !s.chars().all(|c| ('0'..='7').contains(&c)) {
        return Err(Error::InvalidOctal(s.to_string()));
    }
    let mut bits: Vec<u8> = s
        .chars()
        .flat_map(|c| {
            let v = c as u8 - b'0';
            [(v >> 2) & 1, (v >> 1) & 1, v & 1]
        })
        .collect();
    let first_one = bits.iter().position(|&b| b == 1).unwrap_or(bits.len());
    bits.drain(..first_one);
    if bits.len() > m + 1 {
        if bits[m + 1..].iter().all(|&b| b == 0) {
            bits.truncate(m + 1);
        } else {
            return Err(Error::TapLength {
                octal: s.to_string(),
                bits: bits.len(),
                max: m + 1,
            });
        }
    }
    bits.resize(m + 1, 0);
    Ok(bits)
}

/// Octal generators, expanded MSB first with leading zeros stripped, then
/// left-justified into m+1 taps: surplus trailing zero bits are dropped and
/// short patterns are padded with zeros. 634 with m = 6 gives 1100111.
pub fn parse_octal_generators(octal: &[&str], m: usize) -> Result<ConvCode> {
    let taps = octal
        .iter()
        .map(|s| octal_to_taps(s, m))
        .collect::<Result<Vec<_>>>()?;
    let name = format!("conv({})", octal.join(","));
    ConvCode::new(&name, m, taps)
}

/// Shift-register encoding of `info` followed by m zero tail bits.
pub fn encode_conv(code: &ConvCode, info: &[u8]) -> Result<Codeword> {
    if info.is_empty() {
        return Err(Error::Domain("info length must be at least 1".into()));
    }
    let n = code.n_out();
    let mut out = Vec::with_capacity(code.code_length(info.len()));
    let mut state = 0usize;
    let tail = std::iter::repeat_n(0u8, code.m());
    for u in info.iter().copied().chain(tail) {
        let (next, bits) = code.step(state, u);
        out.extend((0..n).map(|i| ((bits >> i) & 1) as u8));
        state = next;
    }
    Ok(Codeword::new(out))
}

/// The (3,1,2) code with taps 110, 101, 111.
pub fn conv_3_1_2() -> ConvCode {
    parse_octal_generators(&["6", "5", "7"], 2).expect("valid")
}

/// The (2,1,6) code, generators 634 and 564 (octal).
pub fn conv_2_1_6() -> ConvCode {
    parse_octal_generators(&["634", "564"], 6).expect("valid")
}

/// The (2,1,16) code, generators 1632044 and 1145734 (octal).
pub fn conv_2_1_16() -> ConvCode {
    ConvCode::from_tap_strings(
        "conv(1632044,1145734)",
        16,
        &["11100110100001001", "10011001011110111"],
    )
    .expect("valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn golay_structure() {
        let g = build_extended_golay();
        assert_eq!((g.n(), g.k()), (24, 12));
        for i in 0..12 {
            assert_eq!(g.rows()[i] & 0xFFF, 1 << i);
        }
        let dist = g.weight_distribution();
        assert_eq!(dist.iter().sum::<u64>(), 4096);
        assert_eq!(g.min_distance(), (8, 759));
        assert_eq!(dist[12], 2576);
        assert_eq!(dist[24], 1);
        assert!(dist.iter().enumerate().all(|(w, &c)| c == 0 || w % 4 == 0));
    }

    #[test]
    fn golay_generator_is_a_qr_factor() {
        let q = qr_generator_polynomial(23).unwrap();
        // Either factor of x^23 - 1 is fine; the other is the reciprocal.
        let reciprocal = (0..=11).fold(0u64, |acc, i| acc | (((q >> i) & 1) << (11 - i)));
        assert!(q == GOLAY_GENERATOR || reciprocal == GOLAY_GENERATOR);
        assert_eq!(poly_mod((1u64 << 23) | 1, GOLAY_GENERATOR), 0);
    }

    #[test]
    fn qr48_structure() {
        let c = build_extended_qr48();
        assert_eq!((c.n(), c.k()), (48, 24));
        let g = qr_generator_polynomial(47).unwrap();
        assert_eq!(poly_degree(g), 23);
        assert_eq!(poly_mod((1u64 << 47) | 1, g), 0);
        for &r in c.rows() {
            assert_eq!(r.count_ones() % 2, 0);
        }
    }

    #[test]
    fn systematic_reencoding() {
        let g = build_extended_golay();
        for info in [0u64, 1, 0x5A5, 0xFFF, 0x800] {
            let cw = g.encode_packed(info);
            assert_eq!(cw & 0xFFF, info);
            for j in 12..24 {
                assert_eq!(((cw >> j) & 1) as u8, g.parity_bit(info, j));
            }
            assert!(g.is_codeword(&unpack(cw, 24)));
        }
    }

    #[test]
    fn non_information_set_rejected() {
        // Column 0 is all zero.
        assert!(BlockCode::from_rows("bad", 4, &[0b0110, 0b1010]).is_err());
        assert!(BlockCode::from_rows("bad", 65, &[1]).is_err());
    }

    #[test]
    fn encode_block_length_check() {
        let g = build_extended_golay();
        assert!(matches!(
            encode_block(&g, &[0; 11]),
            Err(Error::LengthMismatch { expected: 12, got: 11 })
        ));
        assert_eq!(encode_block(&g, &[0; 12]).unwrap().weight(), 0);
        let mut e = vec![0u8; 12];
        e[5] = 1;
        assert_eq!(encode_block(&g, &e).unwrap(), g.row(5));
    }

    #[test]
    fn octal_fixtures() {
        let c = parse_octal_generators(&["634", "564"], 6).unwrap();
        assert_eq!(c.tap_strings(), vec!["1100111", "1011101"]);
        let c = conv_3_1_2();
        assert_eq!(c.tap_strings(), vec!["110", "101", "111"]);
        let c = parse_octal_generators(&["1632044", "1145734"], 16).unwrap();
        assert_eq!(c.taps(), conv_2_1_16().taps());
        assert_eq!(c.tap_strings()[0], "11100110100001001");
        assert!(matches!(
            parse_octal_generators(&["1632044"], 15),
            Err(Error::TapLength { bits: 19, max: 16, .. })
        ));
        assert!(matches!(
            parse_octal_generators(&["68"], 2),
            Err(Error::InvalidOctal(_))
        ));
        // A dropped bit that is 1 is still rejected.
        assert!(parse_octal_generators(&["77"], 2).is_err());
        assert_eq!(parse_octal_generators(&["1"], 3).unwrap().tap_strings(), vec!["1000"]);
    }

    #[test]
    fn small_code_reference_codeword() {
        let c = conv_3_1_2();
        let cw = encode_conv(&c, &[1, 1, 1, 0, 1]).unwrap();
        assert_eq!(cw.to_bit_string(), "111010001110100101011");
        assert_eq!(c.step(0, 1), (1, 0b111));
    }

    #[test]
    fn delay_only_encoder_rejected() {
        assert!(ConvCode::from_tap_strings("x", 2, &["011", "001"]).is_err());
        assert!(ConvCode::new_allow_delay("x", 2, vec![vec![0, 1, 1]]).is_ok());
        assert!(ConvCode::from_tap_strings("x", 2, &["11", "101"]).is_err());
    }

    proptest! {
        #[test]
        fn block_linearity(a in 0u64..4096, b in 0u64..4096) {
            let g = build_extended_golay();
            prop_assert_eq!(g.encode_packed(a ^ b), g.encode_packed(a) ^ g.encode_packed(b));
        }

        #[test]
        fn conv_linearity(a in proptest::collection::vec(0u8..2, 1..40), seed in any::<u64>()) {
            let c = conv_2_1_6();
            let b: Vec<u8> = (0..a.len()).map(|i| ((seed >> (i % 64)) & 1) as u8).collect();
            let x: Vec<u8> = a.iter().zip(&b).map(|(p, q)| p ^ q).collect();
            let ea = encode_conv(&c, &a).unwrap();
            let eb = encode_conv(&c, &b).unwrap();
            let ex = encode_conv(&c, &x).unwrap();
            let sum: Vec<u8> = ea.bits.iter().zip(&eb.bits).map(|(p, q)| p ^ q).collect();
            prop_assert_eq!(ex.bits, sum);
        }

        #[test]
        fn conv_time_invariance(a in proptest::collection::vec(0u8..2, 1..30)) {
            let c = conv_3_1_2();
            let mut shifted = vec![0u8];
            shifted.extend(&a);
            let e = encode_conv(&c, &a).unwrap();
            let es = encode_conv(&c, &shifted).unwrap();
            let n = c.n_out();
            prop_assert!(es.bits[..n].iter().all(|&b| b == 0));
            prop_assert_eq!(&es.bits[n..], &e.bits[..]);
        }
    }
}
