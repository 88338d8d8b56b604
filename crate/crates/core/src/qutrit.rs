//! Explicit statevector model of a small bucket-brigade qRAM.
//!
//! Every switch is a three-level system, so the space is
//! `address (2^n) ⊗ switches (3^(2^n - 1)) ⊗ data (2^w)` and routing,
//! retrieval and unrouting act as basis permutations on the whole vector
//! rather than on one address at a time. Only practical for `n <= 3`.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::data::BitPath;
use crate::error::{Error, Result};
use crate::qram::{BranchedQuery, SwitchState};

pub const MAX_WIDTH: usize = 3;

const EMPTY: usize = 0;
const ZERO: usize = 1;
const ONE: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Basis {
    addr: u64,
    switches: usize,
    data: u64,
}

/// Dense amplitudes over the mixed-radix qRAM space.
#[derive(Debug, Clone, PartialEq)]
pub struct QutritTreeState {
    width: usize,
    word_bits: usize,
    amplitudes: Vec<Complex64>,
}

impl QutritTreeState {
    fn n_switches(width: usize) -> usize {
        (1 << width) - 1
    }

    fn switch_dim(&self) -> usize {
        3usize.pow(Self::n_switches(self.width) as u32)
    }

    /// Address register in the given superposition, switches all `Empty`,
    /// data register zero.
    pub fn new(width: usize, word_bits: usize, branches: &[(u64, Complex64)]) -> Result<Self> {
        if width > MAX_WIDTH {
            return Err(Error::TooManyQubits { qubits: width, cap: MAX_WIDTH });
        }
        let len = (1usize << width) * 3usize.pow(Self::n_switches(width) as u32) * (1usize << word_bits);
        let mut s = Self { width, word_bits, amplitudes: vec![Complex64::new(0.0, 0.0); len] };
        for &(addr, amp) in branches {
            if addr >> width != 0 {
                return Err(Error::IndexOutOfRange { index: addr as usize, dim: 1 << width });
            }
            let idx = s.encode(Basis { addr, switches: 0, data: 0 });
            s.amplitudes[idx] += amp;
        }
        Ok(s)
    }

    /// Builds the state a branch-wise query produces: every branch's
    /// retrieved word in the data register and the switch tree `Empty`.
    pub fn from_branches(width: usize, word_bits: usize, query: &BranchedQuery<u64>) -> Result<Self> {
        let mut s = Self::new(width, word_bits, &[])?;
        for b in &query.branches {
            let idx = s.encode(Basis { addr: b.address.value(), switches: 0, data: b.word });
            s.amplitudes[idx] += b.amplitude;
        }
        Ok(s)
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    fn encode(&self, b: Basis) -> usize {
        ((b.addr as usize * self.switch_dim()) + b.switches) * (1 << self.word_bits) + b.data as usize
    }

    fn decode(&self, idx: usize) -> Basis {
        let data = (idx % (1 << self.word_bits)) as u64;
        let rest = idx >> self.word_bits;
        Basis { addr: (rest / self.switch_dim()) as u64, switches: rest % self.switch_dim(), data }
    }

    fn trit(code: usize, k: usize) -> usize {
        (code / 3usize.pow(k as u32)) % 3
    }

    fn with_trit(code: usize, k: usize, value: usize) -> usize {
        let p = 3usize.pow(k as u32);
        code - Self::trit(code, k) * p + value * p
    }

    fn permute(&mut self, f: impl Fn(Basis) -> Basis) {
        let mut out = vec![Complex64::new(0.0, 0.0); self.amplitudes.len()];
        for (idx, amp) in self.amplitudes.iter().enumerate() {
            if *amp == Complex64::new(0.0, 0.0) {
                // permutations send zero to zero; skipping keeps this linear in support
                continue;
            }
            out[self.encode(f(self.decode(idx)))] += *amp;
        }
        self.amplitudes = out;
    }

    /// Follows stored directions for `levels` switches from the root.
    /// Returns the switch reached, or `None` if an `Empty` switch is hit
    /// on the way.
    fn walk(switches: usize, levels: usize) -> Option<usize> {
        let mut node = 0;
        for _ in 0..levels {
            node = match Self::trit(switches, node) {
                ZERO => 2 * node + 1,
                ONE => 2 * node + 2,
                _ => return None,
            };
        }
        Some(node)
    }

    /// Gate that stores address bit `k` (MSB first) at depth `k`: swaps
    /// `Empty` with the bit's state on the switch reached by the first `k`
    /// stored directions. Self-inverse.
    pub fn route_bit_gate(&mut self, k: usize) {
        let width = self.width;
        self.permute(|mut b| {
            let bit = (b.addr >> (width - 1 - k)) & 1;
            let target = if bit == 0 { ZERO } else { ONE };
            if let Some(node) = Self::walk(b.switches, k) {
                match Self::trit(b.switches, node) {
                    EMPTY => b.switches = Self::with_trit(b.switches, node, target),
                    s if s == target => b.switches = Self::with_trit(b.switches, node, EMPTY),
                    _ => {}
                }
            }
            b
        });
    }

    /// Data register ^= cell at the end of a complete stored path.
    pub fn retrieve_gate(&mut self, cells: &[u64]) {
        let width = self.width;
        self.permute(|mut b| {
            let mut node = 0usize;
            let mut cell = 0usize;
            let mut complete = true;
            for _ in 0..width {
                let d = match Self::trit(b.switches, node) {
                    ZERO => 0,
                    ONE => 1,
                    _ => {
                        complete = false;
                        break;
                    }
                };
                cell = (cell << 1) | d;
                node = 2 * node + 1 + d;
            }
            if complete {
                b.data ^= cells[cell];
            }
            b
        });
    }

    pub fn route(&mut self) {
        for k in 0..self.width {
            self.route_bit_gate(k);
        }
    }

    pub fn unroute(&mut self) {
        for k in (0..self.width).rev() {
            self.route_bit_gate(k);
        }
    }

    /// For every address with support, the switch configuration and data
    /// word it is paired with. `None` if an address is spread over several.
    pub fn assignments(&self, eps: f64) -> Option<BTreeMap<u64, (Vec<SwitchState>, u64)>> {
        let mut out = BTreeMap::new();
        for (idx, amp) in self.amplitudes.iter().enumerate() {
            if amp.norm() <= eps {
                continue;
            }
            let b = self.decode(idx);
            let switches = (0..Self::n_switches(self.width))
                .map(|k| match Self::trit(b.switches, k) {
                    ZERO => SwitchState::Zero,
                    ONE => SwitchState::One,
                    _ => SwitchState::Empty,
                })
                .collect();
            if out.insert(b.addr, (switches, b.data)).is_some() {
                return None;
            }
        }
        Some(out)
    }
}

/// Runs route, retrieve and unroute on the explicit model.
pub struct QutritRun {
    /// Per address: switch tree while routed, and the word retrieved.
    pub routed: BTreeMap<u64, (Vec<SwitchState>, u64)>,
    pub final_state: QutritTreeState,
}

pub fn run_query(
    width: usize,
    word_bits: usize,
    cells: &[u64],
    branches: &[(BitPath, Complex64)],
) -> Result<QutritRun> {
    if cells.len() != 1 << width {
        return Err(Error::CellCount { got: cells.len(), width });
    }
    if let Some(&w) = cells.iter().find(|&&c| c >> word_bits != 0) {
        return Err(Error::WordOverflow { register: "data".into(), value: w, width: word_bits });
    }
    let basis: Vec<(u64, Complex64)> = branches.iter().map(|(p, a)| (p.value(), *a)).collect();
    let mut s = QutritTreeState::new(width, word_bits, &basis)?;
    s.route();
    s.retrieve_gate(cells);
    let routed = s.assignments(0.0).ok_or(Error::DuplicateAddress("superposed switch state".into()))?;
    s.unroute();
    Ok(QutritRun { routed, final_state: s })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qram::{query_superposed, QramInstance};

    #[test]
    fn gates_are_self_inverse_on_every_basis_state() {
        for width in 1..=2 {
            let dim = (1usize << width) * 3usize.pow(((1 << width) - 1) as u32) * 4;
            for idx in 0..dim {
                let mut s = QutritTreeState::new(width, 2, &[]).unwrap();
                s.amplitudes[idx] = Complex64::new(1.0, 0.0);
                let start = s.clone();
                for k in 0..width {
                    s.route_bit_gate(k);
                    s.route_bit_gate(k);
                    assert_eq!(s, start);
                }
                s.retrieve_gate(&vec![3; 1 << width]);
                s.retrieve_gate(&vec![3; 1 << width]);
                assert_eq!(s, start);
            }
        }
    }

    #[test]
    fn matches_branchwise_for_n2() {
        let cells = vec![2u64, 0, 3, 1];
        let q = QramInstance::new(cells.clone()).unwrap();
        let branches =
            vec![("00".parse().unwrap(), Complex64::new(0.6, 0.0)), ("11".parse().unwrap(), Complex64::new(0.0, -0.8))];
        let run = run_query(2, 2, &cells, &branches).unwrap();
        let bq = query_superposed(&q, &branches).unwrap();
        for b in &bq.branches {
            let (switches, word) = &run.routed[&b.address.value()];
            assert_eq!(switches.as_slice(), b.routed.switches());
            assert_eq!(*word, b.word);
        }
        assert_eq!(run.final_state, QutritTreeState::from_branches(2, 2, &bq).unwrap());
    }

    #[test]
    fn rejects_wide_trees_and_words() {
        assert!(QutritTreeState::new(4, 1, &[]).is_err());
        assert!(run_query(1, 1, &[0, 2], &[]).is_err());
    }
}
