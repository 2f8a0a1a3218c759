//! Terminated trellis of a convolutional code and the block-code code tree.

use crate::codes::{BlockCode, ConvCode};
use crate::error::{Error, Result};

/// Marks an unreachable (level, state) in the dense d* table.
pub const ABSENT: u32 = u32::MAX;

/// The (L+m)-section trellis. State j holds the last m inputs with the newest
/// one in bit 0.
#[derive(Debug, Clone)]
pub struct Trellis {
    code: ConvCode,
    info_length: usize,
    // Per state: packed outputs for input 0 and 1.
    outputs: Vec<[u32; 2]>,
    // Row-major (level, state), ABSENT where unreachable.
    dstar: Vec<u32>,
}

impl Trellis {
    pub fn code(&self) -> &ConvCode {
        &self.code
    }

    /// L
    pub fn info_length(&self) -> usize {
        self.info_length
    }

    /// L + m; valid levels are 0..=depth().
    pub fn depth(&self) -> usize {
        self.info_length + self.code.m()
    }

    /// N = n(L + m)
    pub fn code_length(&self) -> usize {
        self.code.code_length(self.info_length)
    }

    pub fn num_states(&self) -> usize {
        self.code.num_states()
    }

    pub fn is_reachable(&self, level: usize, state: usize) -> bool {
        self.dstar(level, state).is_some()
    }

    pub fn dstar(&self, level: usize, state: usize) -> Option<u32> {
        if level > self.depth() || state >= self.num_states() {
            return None;
        }
        match self.dstar[level * self.num_states() + state] {
            ABSENT => None,
            v => Some(v),
        }
    }

    /// Overwrites one d* entry. Used to corrupt the table in negative tests.
    pub fn set_dstar(&mut self, level: usize, state: usize, value: u32) {
        let s = self.num_states();
        self.dstar[level * s + state] = value;
    }

    pub fn dstar_table(&self) -> &[u32] {
        &self.dstar
    }

    pub fn states_at(&self, level: usize) -> Vec<usize> {
        (0..self.num_states())
            .filter(|&s| self.is_reachable(level, s))
            .collect()
    }

    /// Inputs allowed when leaving `level`: {0, 1} before L, {0} after.
    #[inline]
    pub fn max_input(&self, level: usize) -> u8 {
        if level < self.info_length {
            1
        } else {
            0
        }
    }

    /// Next state and packed output bits (bit i = output i).
    #[inline]
    pub fn branch(&self, state: usize, input: u8) -> (usize, u32) {
        let next = ((state << 1) | input as usize) & (self.num_states() - 1);
        (next, self.outputs[state][input as usize])
    }

    /// Checked transition out of a reachable node.
    pub fn transition(&self, level: usize, state: usize, input: u8) -> Option<(usize, u32)> {
        if level >= self.depth() || input > self.max_input(level) || !self.is_reachable(level, state)
        {
            return None;
        }
        Some(self.branch(state, input))
    }
}

pub fn build_trellis(code: &ConvCode, info_length: usize) -> Result<Trellis> {
    if info_length == 0 {
        return Err(Error::Domain("information length L must be at least 1".into()));
    }
    let states = code.num_states();
    let outputs = (0..states)
        .map(|s| [code.step(s, 0).1, code.step(s, 1).1])
        .collect();
    let mut t = Trellis {
        code: code.clone(),
        info_length,
        outputs,
        dstar: Vec::new(),
    };
    t.dstar = compute_dstar(&t);
    Ok(t)
}

/// Minimum Hamming weight over all paths into each node, by forward dynamic
/// programming from the root.
pub fn compute_dstar(trellis: &Trellis) -> Vec<u32> {
    let states = trellis.num_states();
    let levels = trellis.depth() + 1;
    let mut table = vec![ABSENT; levels * states];
    table[0] = 0;
    for level in 0..trellis.depth() {
        let (cur, next) = table[level * states..(level + 2) * states].split_at_mut(states);
        for (s, &w) in cur.iter().enumerate() {
            if w == ABSENT {
                continue;
            }
            for u in 0..=trellis.max_input(level) {
                let (ns, out) = trellis.branch(s, u);
                let cand = w + out.count_ones();
                if cand < next[ns] {
                    next[ns] = cand;
                }
            }
        }
    }
    table
}

/// Children of a code-tree node: two below level k, one (forced parity bit)
/// from level k on.
pub fn code_tree_successors(code: &BlockCode, prefix: &[u8]) -> Result<Vec<(Vec<u8>, u8)>> {
    let level = prefix.len();
    if level >= code.n() {
        return Err(Error::Domain(format!(
            "prefix length {level} is already a leaf of a length-{} tree",
            code.n()
        )));
    }
    let extend = |b: u8| {
        let mut p = prefix.to_vec();
        p.push(b);
        (p, b)
    };
    if level < code.k() {
        Ok(vec![extend(0), extend(1)])
    } else {
        let info = crate::codes::pack(&prefix[..code.k()]);
        Ok(vec![extend(code.parity_bit(info, level))])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{build_extended_golay, conv_2_1_6, conv_3_1_2, encode_conv, ConvCode};
    use proptest::prelude::*;

    /// d* from every input sequence's per-level prefix weights.
    fn dstar_exhaustive(t: &Trellis) -> Vec<u32> {
        let l = t.info_length();
        let n = t.code().n_out();
        let states = t.num_states();
        let mut table = vec![ABSENT; (t.depth() + 1) * states];
        for info in 0u64..(1 << l) {
            let bits: Vec<u8> = (0..l).map(|i| ((info >> i) & 1) as u8).collect();
            let cw = encode_conv(t.code(), &bits).unwrap();
            let mut state = 0usize;
            let mut w = 0u32;
            table[0] = 0;
            for level in 0..t.depth() {
                let u = if level < l { bits[level] } else { 0 };
                state = ((state << 1) | u as usize) & (states - 1);
                w += cw.bits[level * n..(level + 1) * n].iter().map(|&b| b as u32).sum::<u32>();
                let cell = &mut table[(level + 1) * states + state];
                *cell = (*cell).min(w);
            }
        }
        table
    }

    #[test]
    fn small_code_geometry() {
        let t = build_trellis(&conv_3_1_2(), 5).unwrap();
        assert_eq!(t.depth(), 7);
        assert_eq!(t.states_at(0), vec![0]);
        assert_eq!(t.states_at(1), vec![0, 1]);
        for l in 3..=5 {
            assert_eq!(t.states_at(l), vec![0, 1, 2, 3]);
        }
        assert_eq!(t.states_at(7), vec![0]);
        assert_eq!(t.transition(0, 0, 1), Some((1, 0b111)));
        assert_eq!(t.transition(5, 1, 1), None);
    }

    #[test]
    fn small_code_branch_labels() {
        let t = build_trellis(&conv_3_1_2(), 5).unwrap();
        // s0 -> s1: 111, s1 -> s2: 101, s2 -> s0: 011 (bit string order).
        let label = |s: usize, u: u8| {
            let (ns, out) = t.branch(s, u);
            (ns, (0..3).map(|i| if (out >> i) & 1 == 1 { '1' } else { '0' }).collect::<String>())
        };
        assert_eq!(label(0, 1), (1, "111".to_string()));
        assert_eq!(label(1, 0), (2, "101".to_string()));
        assert_eq!(label(2, 0), (0, "011".to_string()));
    }

    #[test]
    fn dstar_small_code_value() {
        let t = build_trellis(&conv_3_1_2(), 5).unwrap();
        assert_eq!(t.dstar(3, 3), Some(4));
        for l in 0..=t.depth() {
            assert_eq!(t.dstar(l, 0), Some(0));
        }
    }

    #[test]
    fn dstar_matches_exhaustive() {
        for l in 1..=8 {
            for code in [conv_3_1_2(), conv_2_1_6()] {
                let t = build_trellis(&code, l).unwrap();
                assert_eq!(t.dstar_table(), &dstar_exhaustive(&t)[..], "L={l}");
            }
        }
    }

    #[test]
    fn dstar_triangle_property() {
        let t = build_trellis(&conv_2_1_6(), 20).unwrap();
        for level in 0..t.depth() {
            for s in t.states_at(level) {
                for u in 0..=t.max_input(level) {
                    let (ns, out) = t.branch(s, u);
                    let a = t.dstar(level + 1, ns).unwrap();
                    assert!(a <= t.dstar(level, s).unwrap() + out.count_ones());
                }
            }
        }
        // Equality through at least one incoming branch.
        for level in 1..=t.depth() {
            for ns in t.states_at(level) {
                let target = t.dstar(level, ns).unwrap();
                let hit = t.states_at(level - 1).into_iter().any(|s| {
                    (0..=t.max_input(level - 1)).any(|u| {
                        let (x, out) = t.branch(s, u);
                        x == ns && t.dstar(level - 1, s).unwrap() + out.count_ones() == target
                    })
                });
                assert!(hit);
            }
        }
    }

    #[test]
    fn path_count_before_termination() {
        let t = build_trellis(&conv_3_1_2(), 6).unwrap();
        // Count paths to each node at level L.
        let states = t.num_states();
        let mut count = vec![0u64; states];
        count[0] = 1;
        for level in 0..6 {
            let mut next = vec![0u64; states];
            for s in 0..states {
                for u in 0..=t.max_input(level) {
                    next[t.branch(s, u).0] += count[s];
                }
            }
            count = next;
        }
        assert_eq!(count.iter().sum::<u64>(), 1 << 6);
    }

    #[test]
    fn code_tree_walk_spells_codewords() {
        let g = build_extended_golay();
        assert_eq!(code_tree_successors(&g, &[]).unwrap().len(), 2);
        let mut leaves = 0usize;
        let mut stack = vec![Vec::<u8>::new()];
        while let Some(p) = stack.pop() {
            if p.len() == g.n() {
                assert!(g.is_codeword(&crate::codes::Codeword::new(p)));
                leaves += 1;
                continue;
            }
            for (child, _) in code_tree_successors(&g, &p).unwrap() {
                stack.push(child);
            }
        }
        assert_eq!(leaves, 1 << 12);
        let prefix = vec![1u8; 12];
        let succ = code_tree_successors(&g, &prefix).unwrap();
        assert_eq!(succ.len(), 1);
        assert_eq!(succ[0].1, g.parity_bit(0xFFF, 12));
        assert!(code_tree_successors(&g, &[0; 24]).is_err());
    }

    proptest! {
        #[test]
        fn termination_forces_zero_state(l in 1usize..30, taps in proptest::collection::vec(1u32..128, 2..4)) {
            let taps: Vec<Vec<u8>> = taps.iter().map(|t| (0..7).map(|j| ((t >> j) & 1) as u8).collect()).collect();
            prop_assume!(taps.iter().any(|t| t[0] == 1));
            let code = ConvCode::new("p", 6, taps).unwrap();
            let t = build_trellis(&code, l).unwrap();
            prop_assert_eq!(t.states_at(t.depth()), vec![0]);
            prop_assert_eq!(t.states_at(0), vec![0]);
        }
    }
}
