//! Best-first ML decoders with branch-metric counting, and their exhaustive
//! and dynamic-programming oracles.

use crate::codes::{encode_conv, pack, unpack, BlockCode, Codeword};
use crate::error::{Error, Result};
use crate::trellis::Trellis;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeOutcome {
    pub decoded: Codeword,
    /// Counted under the complexity convention (info levels only).
    pub branch_computations: u64,
    /// Every branch metric evaluated, tail levels included.
    pub branch_computations_total: u64,
    pub extensions: u64,
    /// Metric of the path that ended the search.
    pub final_metric: f64,
}

/// Min-heap entry ordered by (metric, insertion sequence).
#[derive(Debug, Clone, Copy)]
struct Entry<T> {
    metric: f64,
    seq: u64,
    item: T,
}

impl<T> PartialEq for Entry<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<T> Eq for Entry<T> {}

impl<T> PartialOrd for Entry<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T> Ord for Entry<T> {
    // Reversed so that BinaryHeap pops the smallest key.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .metric
            .total_cmp(&self.metric)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

#[derive(Debug, Clone, Copy)]
struct TreePath {
    level: u8,
    bits: u64,
}

/// Squared Euclidean distance between phi and the antipodal image of x.
pub fn ml_block_metric(phi: &[f64], word: &Codeword) -> f64 {
    phi.iter()
        .zip(&word.bits)
        .map(|(&p, &b)| {
            let s = if b == 0 { 1.0 } else { -1.0 };
            (p - s) * (p - s)
        })
        .sum()
}

/// Simplified GDA over the code tree of a systematic block code.
#[derive(Debug, Clone)]
pub struct GdaDecoder<'a> {
    code: &'a BlockCode,
    cap: Option<u64>,
    heap: BinaryHeap<Entry<TreePath>>,
    // Per position: branch metric for bit 0 and bit 1.
    costs: Vec<[f64; 2]>,
    trace: Option<Vec<f64>>,
}

impl<'a> GdaDecoder<'a> {
    pub fn new(code: &'a BlockCode) -> Self {
        GdaDecoder {
            code,
            cap: None,
            heap: BinaryHeap::new(),
            costs: Vec::with_capacity(code.n()),
            trace: None,
        }
    }

    /// Abort with `ExtensionCap` once more than `cap` paths were extended.
    pub fn with_cap(mut self, cap: Option<u64>) -> Self {
        self.cap = cap;
        self
    }

    /// Record the metric of every extended path.
    pub fn with_trace(mut self) -> Self {
        self.trace = Some(Vec::new());
        self
    }

    pub fn trace(&self) -> &[f64] {
        self.trace.as_deref().unwrap_or(&[])
    }

    pub fn decode(&mut self, phi: &[f64]) -> Result<DecodeOutcome> {
        let (n, k) = (self.code.n(), self.code.k());
        if phi.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: phi.len(),
            });
        }
        self.costs.clear();
        self.costs.extend(phi.iter().map(|&p| {
            let base = (p.abs() - 1.0) * (p.abs() - 1.0);
            [(p - 1.0) * (p - 1.0) - base, (p + 1.0) * (p + 1.0) - base]
        }));
        if let Some(t) = self.trace.as_mut() {
            t.clear();
        }
        self.heap.clear();
        let mut seq = 0u64;
        self.heap.push(Entry {
            metric: 0.0,
            seq,
            item: TreePath { level: 0, bits: 0 },
        });
        let (mut counted, mut total, mut extensions) = (0u64, 0u64, 0u64);
        while let Some(top) = self.heap.pop() {
            let TreePath { level, bits } = top.item;
            let level = level as usize;
            if level == n {
                return Ok(DecodeOutcome {
                    decoded: unpack(bits, n),
                    branch_computations: counted,
                    branch_computations_total: total,
                    extensions,
                    final_metric: top.metric,
                });
            }
            extensions += 1;
            if let Some(cap) = self.cap {
                if extensions > cap {
                    return Err(Error::ExtensionCap { cap });
                }
            }
            if let Some(t) = self.trace.as_mut() {
                t.push(top.metric);
            }
            let cost = self.costs[level];
            if level < k {
                counted += 2;
                total += 2;
                for b in 0..2u64 {
                    seq += 1;
                    self.heap.push(Entry {
                        metric: top.metric + cost[b as usize],
                        seq,
                        item: TreePath {
                            level: level as u8 + 1,
                            bits: bits | (b << level),
                        },
                    });
                }
            } else {
                total += 1;
                let info = bits & ((1u64 << k) - 1);
                let b = self.code.parity_bit(info, level) as u64;
                seq += 1;
                self.heap.push(Entry {
                    metric: top.metric + cost[b as usize],
                    seq,
                    item: TreePath {
                        level: level as u8 + 1,
                        bits: bits | (b << level),
                    },
                });
            }
        }
        unreachable!("the code tree always has a leaf")
    }
}

pub fn gda_decode(code: &BlockCode, phi: &[f64]) -> Result<DecodeOutcome> {
    GdaDecoder::new(code).decode(phi)
}

/// Exhaustive ML: smallest squared distance, ties to the lexicographically
/// smallest codeword (position 0 most significant).
pub fn brute_force_ml_block(code: &BlockCode, phi: &[f64]) -> Result<Codeword> {
    let (n, k) = (code.n(), code.k());
    if k > 24 {
        return Err(Error::Size(k));
    }
    if phi.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: phi.len(),
        });
    }
    let metric = |cw: u64| -> f64 {
        (0..n)
            .map(|j| {
                let s = if (cw >> j) & 1 == 0 { 1.0 } else { -1.0 };
                (phi[j] - s) * (phi[j] - s)
            })
            .sum()
    };
    let lex_less = |a: u64, b: u64| {
        let diff = a ^ b;
        diff != 0 && (a >> diff.trailing_zeros()) & 1 == 0
    };
    let mut cw = 0u64;
    let mut best = (metric(0), 0u64);
    for g in 1u64..(1u64 << k) {
        cw ^= code.rows()[g.trailing_zeros() as usize];
        let m = metric(cw);
        if m < best.0 || (m == best.0 && lex_less(cw, best.1)) {
            best = (m, cw);
        }
    }
    Ok(unpack(best.1, n))
}

/// zeta = sum over positions of (y_j xor x_j) |phi_j|.
pub fn zeta_metric(phi: &[f64], word: &Codeword) -> f64 {
    phi.iter()
        .zip(&word.bits)
        .map(|(&p, &b)| if ((p < 0.0) as u8) != b { p.abs() } else { 0.0 })
        .sum()
}

/// Per-level branch metric table indexed by packed output pattern.
fn branch_costs(phi: &[f64], n: usize, depth: usize) -> Vec<f64> {
    let patterns = 1usize << n;
    let mut costs = vec![0.0; depth * patterns];
    for level in 0..depth {
        let block = &phi[level * n..(level + 1) * n];
        for pat in 0..patterns {
            let mut c = 0.0;
            for (i, &p) in block.iter().enumerate() {
                let x = (pat >> i) & 1;
                if x != (p < 0.0) as usize {
                    c += p.abs();
                }
            }
            costs[level * patterns + pat] = c;
        }
    }
    costs
}

const NONE: u32 = u32::MAX;

#[derive(Debug, Clone, Copy)]
struct ArenaNode {
    parent: u32,
    input: u8,
}

/// Reusable workspace for the two-stack trellis decoder.
#[derive(Debug, Clone)]
pub struct MlsdaDecoder<'a> {
    trellis: &'a Trellis,
    arena: Vec<ArenaNode>,
    heap: BinaryHeap<Entry<(u32, u32)>>,
    // Per (level, state): arena index of the Open resident.
    open_slot: Vec<u32>,
    open_metric: Vec<f64>,
    closed: Vec<bool>,
    touched: Vec<u32>,
    closed_discards: u64,
}

impl<'a> MlsdaDecoder<'a> {
    pub fn new(trellis: &'a Trellis) -> Self {
        let cells = (trellis.depth() + 1) * trellis.num_states();
        MlsdaDecoder {
            trellis,
            arena: Vec::new(),
            heap: BinaryHeap::new(),
            open_slot: vec![NONE; cells],
            open_metric: vec![0.0; cells],
            closed: vec![false; cells],
            touched: Vec::new(),
            closed_discards: 0,
        }
    }

    /// Successors dropped in the last decode because their node was Closed.
    pub fn closed_discards(&self) -> u64 {
        self.closed_discards
    }

    fn reset(&mut self) {
        for &c in &self.touched {
            self.open_slot[c as usize] = NONE;
            self.closed[c as usize] = false;
        }
        self.touched.clear();
        self.arena.clear();
        self.heap.clear();
        self.closed_discards = 0;
    }

    pub fn decode(&mut self, phi: &[f64]) -> Result<DecodeOutcome> {
        let t = self.trellis;
        let n = t.code().n_out();
        let l = t.info_length();
        let depth = t.depth();
        let states = t.num_states();
        if phi.len() != t.code_length() {
            return Err(Error::LengthMismatch {
                expected: t.code_length(),
                got: phi.len(),
            });
        }
        self.reset();
        let costs = branch_costs(phi, n, depth);
        let patterns = 1usize << n;
        let fan_out = 1u64 << t.code().k_in();
        let mut seq = 0u64;
        self.arena.push(ArenaNode {
            parent: NONE,
            input: 0,
        });
        self.open_slot[0] = 0;
        self.open_metric[0] = 0.0;
        self.touched.push(0);
        self.heap.push(Entry {
            metric: 0.0,
            seq,
            item: (0, 0),
        });
        let (mut counted, mut total, mut extensions) = (0u64, 0u64, 0u64);
        while let Some(top) = self.heap.pop() {
            let (cell, idx) = top.item;
            if self.open_slot[cell as usize] != idx {
                continue;
            }
            self.open_slot[cell as usize] = NONE;
            let level = cell as usize / states;
            let state = cell as usize % states;
            if level == depth {
                debug_assert_eq!(state, 0);
                let mut info = vec![0u8; depth];
                let mut cur = idx;
                for pos in (0..depth).rev() {
                    let node = self.arena[cur as usize];
                    info[pos] = node.input;
                    cur = node.parent;
                }
                info.truncate(l);
                return Ok(DecodeOutcome {
                    decoded: encode_conv(t.code(), &info)?,
                    branch_computations: counted,
                    branch_computations_total: total,
                    extensions,
                    final_metric: top.metric,
                });
            }
            self.closed[cell as usize] = true;
            extensions += 1;
            if level < l {
                counted += fan_out;
                total += fan_out;
            } else {
                total += 1;
            }
            for u in 0..=t.max_input(level) {
                let (ns, out) = t.branch(state, u);
                let ncell = (level + 1) * states + ns;
                if self.closed[ncell] {
                    self.closed_discards += 1;
                    continue;
                }
                let metric = top.metric + costs[level * patterns + out as usize];
                let resident = self.open_slot[ncell];
                if resident != NONE && self.open_metric[ncell] <= metric {
                    continue;
                }
                if resident == NONE && !self.closed[ncell] {
                    self.touched.push(ncell as u32);
                }
                let new_idx = self.arena.len() as u32;
                self.arena.push(ArenaNode {
                    parent: idx,
                    input: u,
                });
                self.open_slot[ncell] = new_idx;
                self.open_metric[ncell] = metric;
                seq += 1;
                self.heap.push(Entry {
                    metric,
                    seq,
                    item: (ncell as u32, new_idx),
                });
            }
        }
        unreachable!("the goal node is always reachable")
    }
}

pub fn mlsda_decode(trellis: &Trellis, phi: &[f64]) -> Result<DecodeOutcome> {
    MlsdaDecoder::new(trellis).decode(phi)
}

/// Forward Viterbi recursion on zeta; returns the goal survivor and its
/// metric.
pub fn viterbi_ml(trellis: &Trellis, phi: &[f64]) -> Result<(Codeword, f64)> {
    let n = trellis.code().n_out();
    let depth = trellis.depth();
    let states = trellis.num_states();
    if phi.len() != trellis.code_length() {
        return Err(Error::LengthMismatch {
            expected: trellis.code_length(),
            got: phi.len(),
        });
    }
    let costs = branch_costs(phi, n, depth);
    let patterns = 1usize << n;
    let mut metric = vec![f64::INFINITY; states];
    metric[0] = 0.0;
    // Survivor input bit and predecessor state, per (level + 1, state).
    let mut back = vec![(0u32, 0u8); depth * states];
    for level in 0..depth {
        let mut next = vec![f64::INFINITY; states];
        for (s, &ms) in metric.iter().enumerate() {
            if ms.is_infinite() {
                continue;
            }
            for u in 0..=trellis.max_input(level) {
                let (ns, out) = trellis.branch(s, u);
                let m = ms + costs[level * patterns + out as usize];
                if m < next[ns] {
                    next[ns] = m;
                    back[level * states + ns] = (s as u32, u);
                }
            }
        }
        metric = next;
    }
    let mut info = vec![0u8; depth];
    let mut s = 0usize;
    for level in (0..depth).rev() {
        let (p, u) = back[level * states + s];
        info[level] = u;
        s = p as usize;
    }
    info.truncate(trellis.info_length());
    Ok((encode_conv(trellis.code(), &info)?, metric[0]))
}

/// Packs a block codeword for cheap comparisons.
pub fn pack_codeword(word: &Codeword) -> u64 {
    pack(&word.bits)
}
