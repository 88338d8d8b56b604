//! Dense statevector over named qubit registers.
//!
//! Registers are packed into the basis index in layout order, the first
//! register in the most significant bits; inside a register the first bit
//! (bit 0) is the most significant. `dir=110` therefore reads as `|110>`.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use num_complex::Complex64;

use crate::data::BitPath;
use crate::error::{Error, Result};

pub const DEFAULT_QUBIT_CAP: usize = 24;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Residual allowed on a rotation target before it counts as not `|0>`.
const TARGET_RESIDUAL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Register {
    pub name: String,
    pub width: usize,
    shift: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegisterLayout {
    registers: Vec<Register>,
    qubits: usize,
}

impl RegisterLayout {
    pub fn new(registers: &[(&str, usize)]) -> Result<Self> {
        Self::with_cap(registers, DEFAULT_QUBIT_CAP)
    }

    pub fn with_cap(registers: &[(&str, usize)], cap: usize) -> Result<Self> {
        let qubits: usize = registers.iter().map(|r| r.1).sum();
        if qubits > cap {
            return Err(Error::TooManyQubits { qubits, cap });
        }
        let mut out: Vec<Register> = Vec::with_capacity(registers.len());
        let mut shift = qubits;
        for &(name, width) in registers {
            if out.iter().any(|r| r.name == name) {
                return Err(Error::DuplicateRegister(name.to_string()));
            }
            shift -= width;
            out.push(Register { name: name.to_string(), width, shift });
        }
        Ok(Self { registers: out, qubits })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.qubits
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn register(&self, name: &str) -> Result<&Register> {
        self.registers.iter().find(|r| r.name == name).ok_or_else(|| Error::UnknownRegister(name.to_string()))
    }

    pub fn width(&self, name: &str) -> Result<usize> {
        Ok(self.register(name)?.width)
    }

    /// Position (bit shift in the basis index) of qubit `bit` of `name`.
    pub fn qubit(&self, name: &str, bit: usize) -> Result<usize> {
        let r = self.register(name)?;
        if bit >= r.width {
            return Err(Error::QubitOutOfRange { register: name.to_string(), bit });
        }
        Ok(r.shift + r.width - 1 - bit)
    }

    fn value(r: &Register, index: usize) -> u64 {
        ((index >> r.shift) & ((1usize << r.width) - 1)) as u64
    }

    pub fn value_of(&self, index: usize, name: &str) -> Result<u64> {
        Ok(Self::value(self.register(name)?, index))
    }

    /// Resolves `(register, leading bits)` slices into a key reader.
    pub fn key(&self, slices: &[(&str, usize)]) -> Result<KeyReader> {
        let mut parts = Vec::with_capacity(slices.len());
        for &(name, bits) in slices {
            let r = self.register(name)?;
            if bits > r.width {
                return Err(Error::QubitOutOfRange { register: name.to_string(), bit: bits });
            }
            parts.push((r.shift + r.width - bits, bits));
        }
        Ok(KeyReader { parts })
    }

    /// Full basis indices of the states spanned by the `keep` registers
    /// (in layout order) with every other register zero.
    pub fn sub_indices(&self, keep: &[&str]) -> Result<Vec<usize>> {
        for k in keep {
            self.register(k)?;
        }
        let kept: Vec<&Register> = self.registers.iter().filter(|r| keep.contains(&r.name.as_str())).collect();
        let bits: usize = kept.iter().map(|r| r.width).sum();
        Ok((0..1usize << bits)
            .map(|j| {
                let mut index = 0usize;
                let mut rest = bits;
                for r in &kept {
                    rest -= r.width;
                    index |= ((j >> rest) & ((1usize << r.width) - 1)) << r.shift;
                }
                index
            })
            .collect())
    }

    /// Spreads amplitudes over the `keep` registers into the full space.
    pub fn embed(&self, keep: &[&str], amps: &[Complex64]) -> Result<Vec<Complex64>> {
        let idx = self.sub_indices(keep)?;
        if idx.len() != amps.len() {
            return Err(Error::DimensionMismatch { state: idx.len(), target: amps.len() });
        }
        let mut out = vec![ZERO; self.dim()];
        for (i, a) in idx.into_iter().zip(amps) {
            out[i] = *a;
        }
        Ok(out)
    }

    /// Basis index with the given register values, others zero.
    pub fn index_of(&self, assignment: &[(&str, u64)]) -> Result<usize> {
        let mut index = 0usize;
        for &(name, value) in assignment {
            let r = self.register(name)?;
            if r.width < 64 && value >> r.width != 0 {
                return Err(Error::WordOverflow { register: name.to_string(), value, width: r.width });
            }
            index |= (value as usize) << r.shift;
        }
        Ok(index)
    }
}

/// Reads the concatenation of leading bits of several registers.
#[derive(Debug, Clone)]
pub struct KeyReader {
    parts: Vec<(usize, usize)>,
}

impl KeyReader {
    pub fn read(&self, index: usize) -> u64 {
        self.parts
            .iter()
            .fold(0u64, |acc, &(shift, bits)| (acc << bits) | ((index >> shift) & ((1usize << bits) - 1)) as u64)
    }

    pub fn bits(&self) -> usize {
        self.parts.iter().map(|p| p.1).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
    layout: RegisterLayout,
}

impl StateVector {
    pub fn init_basis(layout: RegisterLayout, assignment: &[(&str, u64)]) -> Result<Self> {
        let index = layout.index_of(assignment)?;
        let mut amplitudes = vec![ZERO; layout.dim()];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self { amplitudes, layout })
    }

    pub fn from_amplitudes(layout: RegisterLayout, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != layout.dim() {
            return Err(Error::DimensionMismatch { state: layout.dim(), target: amplitudes.len() });
        }
        Ok(Self { amplitudes, layout })
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(Complex64::norm_sqr).sum()
    }

    fn debug_check_norm(&self) {
        debug_assert!((self.norm_sqr() - 1.0).abs() < 1e-9, "norm drifted to {}", self.norm_sqr());
    }

    fn rotate_pair(&mut self, i0: usize, i1: usize, p: f64, inverse: bool) {
        let c = p.sqrt();
        let s = (1.0 - p).max(0.0).sqrt();
        let (a0, a1) = (self.amplitudes[i0], self.amplitudes[i1]);
        if inverse {
            self.amplitudes[i0] = a0 * c + a1 * s;
            self.amplitudes[i1] = a1 * c - a0 * s;
        } else {
            self.amplitudes[i0] = a0 * c - a1 * s;
            self.amplitudes[i1] = a0 * s + a1 * c;
        }
    }

    fn check_probability(p: f64) -> Result<f64> {
        const SLACK: f64 = 1e-12;
        if !(-SLACK..=1.0 + SLACK).contains(&p) {
            return Err(Error::InvalidProbability(p));
        }
        Ok(p.clamp(0.0, 1.0))
    }

    fn controlled_ry(&mut self, control: &str, prefix: &BitPath, target: usize, p: f64, inverse: bool) -> Result<()> {
        let p = Self::check_probability(p)?;
        let key = self.layout.key(&[(control, prefix.depth())])?;
        let want = prefix.value();
        let mask = 1usize << target;
        let matching = |i: usize| i & mask == 0 && key.read(i) == want;
        if cfg!(debug_assertions) && !inverse {
            let dirty = (0..self.amplitudes.len())
                .filter(|&i| matching(i))
                .any(|i| self.amplitudes[i | mask].norm() > TARGET_RESIDUAL);
            if dirty {
                return Err(Error::RotationTargetNotZero);
            }
        }
        for i in 0..self.amplitudes.len() {
            if matching(i) {
                self.rotate_pair(i, i | mask, p, inverse);
            }
        }
        self.debug_check_norm();
        Ok(())
    }

    /// On branches whose `control` register starts with `prefix`, takes the
    /// target qubit from `|0>` to `sqrt(p)|0> + sqrt(1-p)|1>` (a real
    /// Y rotation). `target` is a position from [`RegisterLayout::qubit`].
    pub fn controlled_rotation(&mut self, control: &str, prefix: &BitPath, target: usize, p: f64) -> Result<()> {
        self.controlled_ry(control, prefix, target, p, false)
    }

    pub fn controlled_rotation_inverse(
        &mut self,
        control: &str,
        prefix: &BitPath,
        target: usize,
        p: f64,
    ) -> Result<()> {
        self.controlled_ry(control, prefix, target, p, true)
    }

    /// Rotation of `target` controlled by the values held in registers
    /// `a` and `b`. `prob(a, b)` gives the probability to keep on `|0>`, or
    /// `None` to leave the branch alone. Returns the rotated branch count.
    pub fn register_controlled_rotation(
        &mut self,
        target: usize,
        a: &str,
        b: &str,
        mut prob: impl FnMut(u64, u64) -> Result<Option<f64>>,
    ) -> Result<usize> {
        let ra = self.layout.register(a)?.clone();
        let rb = self.layout.register(b)?.clone();
        let mask = 1usize << target;
        let mut cache: HashMap<(u64, u64), Option<f64>> = HashMap::new();
        let mut rotated = 0;
        for i in 0..self.amplitudes.len() {
            if i & mask != 0 {
                continue;
            }
            let (a0, a1) = (self.amplitudes[i], self.amplitudes[i | mask]);
            if a0 == ZERO && a1 == ZERO {
                continue;
            }
            let key = (RegisterLayout::value(&ra, i), RegisterLayout::value(&rb, i));
            let p = match cache.get(&key) {
                Some(p) => *p,
                None => {
                    let p = prob(key.0, key.1)?.map(Self::check_probability).transpose()?;
                    cache.insert(key, p);
                    p
                }
            };
            let Some(p) = p else { continue };
            if cfg!(debug_assertions) && a1.norm() > TARGET_RESIDUAL {
                return Err(Error::RotationTargetNotZero);
            }
            self.rotate_pair(i, i | mask, p, false);
            rotated += 1;
        }
        self.debug_check_norm();
        Ok(rotated)
    }

    /// XORs `words[key]` into register `target`, where the key is read from
    /// `control` slices. Keys missing from `words` load zero.
    pub fn xor_load(&mut self, control: &[(&str, usize)], words: &HashMap<u64, u64>, target: &str) -> Result<()> {
        let key = self.layout.key(control)?;
        let r = self.layout.register(target)?.clone();
        for &w in words.values() {
            if r.width < 64 && w >> r.width != 0 {
                return Err(Error::WordOverflow { register: target.to_string(), value: w, width: r.width });
            }
        }
        let mut out = vec![ZERO; self.amplitudes.len()];
        for (i, amp) in self.amplitudes.iter().enumerate() {
            // a permutation maps zeros onto zeros
            if *amp == ZERO {
                continue;
            }
            let w = words.get(&key.read(i)).copied().unwrap_or(0);
            out[i ^ ((w as usize) << r.shift)] = *amp;
        }
        self.amplitudes = out;
        self.debug_check_norm();
        Ok(())
    }

    /// Negates every branch whose key has a nonzero flag.
    pub fn phase_oracle(&mut self, control: &[(&str, usize)], flags: &HashMap<u64, u64>) -> Result<()> {
        let key = self.layout.key(control)?;
        for (i, amp) in self.amplitudes.iter_mut().enumerate() {
            if *amp != ZERO && flags.get(&key.read(i)).copied().unwrap_or(0) & 1 == 1 {
                *amp = -*amp;
            }
        }
        Ok(())
    }

    pub fn x_on(&mut self, qubit: usize) {
        let mask = 1usize << qubit;
        for i in 0..self.amplitudes.len() {
            if i & mask == 0 {
                self.amplitudes.swap(i, i | mask);
            }
        }
    }

    pub fn cx_on(&mut self, control: usize, target: usize) {
        let (c, t) = (1usize << control, 1usize << target);
        for i in 0..self.amplitudes.len() {
            if i & c != 0 && i & t == 0 {
                self.amplitudes.swap(i, i | t);
            }
        }
    }

    pub fn z_on(&mut self, qubit: usize) {
        let mask = 1usize << qubit;
        for (i, amp) in self.amplitudes.iter_mut().enumerate() {
            if i & mask != 0 {
                *amp = -*amp;
            }
        }
    }

    /// `|<target|state>|^2 / <target|target>`.
    pub fn fidelity(&self, target: &[Complex64]) -> Result<f64> {
        fidelity(&self.amplitudes, target)
    }

    pub fn register_is_disentangled_zero(&self, register: &str, eps_amp: f64) -> Result<bool> {
        let r = self.layout.register(register)?;
        Ok(self.amplitudes.iter().enumerate().all(|(i, a)| a.norm() <= eps_amp || RegisterLayout::value(r, i) == 0))
    }

    /// Amplitudes over the `keep` registers (in layout order) on the
    /// branches where every other register is zero.
    pub fn reduced(&self, keep: &[&str]) -> Result<Vec<Complex64>> {
        Ok(self.layout.sub_indices(keep)?.into_iter().map(|i| self.amplitudes[i]).collect())
    }

    /// Total probability of each key value that carries weight above
    /// `eps_amp` on some branch.
    pub fn key_weights(&self, control: &[(&str, usize)], eps_amp: f64) -> Result<BTreeMap<u64, f64>> {
        let key = self.layout.key(control)?;
        let mut out = BTreeMap::new();
        for (i, a) in self.amplitudes.iter().enumerate() {
            if a.norm() > eps_amp {
                *out.entry(key.read(i)).or_insert(0.0) += a.norm_sqr();
            }
        }
        Ok(out)
    }

    /// Values of `register` on branches whose key is `key_value`.
    pub fn register_values_at(
        &self,
        control: &[(&str, usize)],
        register: &str,
        eps_amp: f64,
    ) -> Result<BTreeMap<u64, Vec<u64>>> {
        let key = self.layout.key(control)?;
        let r = self.layout.register(register)?;
        let mut out: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
        for (i, a) in self.amplitudes.iter().enumerate() {
            if a.norm() > eps_amp {
                let v = out.entry(key.read(i)).or_default();
                let x = RegisterLayout::value(r, i);
                if !v.contains(&x) {
                    v.push(x);
                }
            }
        }
        Ok(out)
    }

    /// One line per amplitude above `eps_amp`:
    /// `<bits, '|' between registers> <re> <im>`.
    pub fn dump(&self, eps_amp: f64) -> String {
        let mut out = String::new();
        for (i, a) in self.amplitudes.iter().enumerate() {
            if a.norm() <= eps_amp {
                continue;
            }
            let groups: Vec<String> = self
                .layout
                .registers
                .iter()
                .map(|r| {
                    let v = RegisterLayout::value(r, i);
                    (0..r.width).rev().map(|k| if (v >> k) & 1 == 1 { '1' } else { '0' }).collect()
                })
                .collect();
            let _ = writeln!(out, "{} {:.12} {:.12}", groups.join("|"), clean_zero(a.re), clean_zero(a.im));
        }
        out
    }
}

fn clean_zero(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x
    }
}

pub fn fidelity(state: &[Complex64], target: &[Complex64]) -> Result<f64> {
    if state.len() != target.len() {
        return Err(Error::DimensionMismatch { state: state.len(), target: target.len() });
    }
    let tt: f64 = target.iter().map(Complex64::norm_sqr).sum();
    if tt == 0.0 {
        return Ok(0.0);
    }
    let inner: Complex64 = target.iter().zip(state).map(|(t, s)| t.conj() * s).sum();
    Ok((inner.norm_sqr() / tt).clamp(0.0, 1.0))
}

pub fn init_basis(layout: RegisterLayout, assignment: &[(&str, u64)]) -> Result<StateVector> {
    StateVector::init_basis(layout, assignment)
}

#[cfg(test)]
#[allow(clippy::unusual_byte_groupings)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn example_layout() -> RegisterLayout {
        RegisterLayout::new(&[("dir", 3), ("a", 4), ("b", 4), ("c", 1)]).unwrap()
    }

    #[test]
    fn basis_states() {
        let s = StateVector::init_basis(RegisterLayout::new(&[("dir", 3)]).unwrap(), &[]).unwrap();
        assert_eq!(s.amplitudes()[0], c(1.0));
        assert_eq!(s.norm_sqr(), 1.0);

        let l = example_layout();
        let s = StateVector::init_basis(l.clone(), &[("dir", 0b110), ("a", 1), ("b", 2)]).unwrap();
        let idx = (0b110 << 9) | (1 << 5) | (2 << 1);
        assert_eq!(s.amplitudes()[idx], c(1.0));
        assert_eq!(s.norm_sqr(), 1.0);
        assert!(matches!(StateVector::init_basis(l, &[("a", 16)]), Err(Error::WordOverflow { .. })));
    }

    #[test]
    fn layout_errors() {
        assert!(matches!(RegisterLayout::new(&[("a", 2), ("a", 1)]), Err(Error::DuplicateRegister(_))));
        assert!(matches!(RegisterLayout::new(&[("a", 20), ("b", 5)]), Err(Error::TooManyQubits { .. })));
        assert!(RegisterLayout::with_cap(&[("a", 20), ("b", 5)], 25).is_ok());
        let l = example_layout();
        assert!(l.qubit("dir", 3).is_err());
        assert!(l.register("zz").is_err());
        assert_eq!(l.qubit("dir", 0).unwrap(), 11);
        assert_eq!(l.qubit("c", 0).unwrap(), 0);
    }

    #[test]
    fn root_rotation() {
        let l = RegisterLayout::new(&[("dir", 3)]).unwrap();
        let mut s = StateVector::init_basis(l.clone(), &[]).unwrap();
        s.controlled_rotation("dir", &BitPath::empty(), l.qubit("dir", 0).unwrap(), 0.8).unwrap();
        assert!((s.amplitudes()[0b000].re - 0.8f64.sqrt()).abs() < 1e-15);
        assert!((s.amplitudes()[0b100].re - 0.2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rotation_by_one_is_identity_and_prefix_limits_branches() {
        let l = RegisterLayout::new(&[("dir", 3)]).unwrap();
        let mut amps = vec![c(0.0); 8];
        amps[0b000] = c(0.4f64.sqrt());
        amps[0b110] = c(0.6f64.sqrt());
        let mut s = StateVector::from_amplitudes(l.clone(), amps).unwrap();
        let before = s.clone();
        s.controlled_rotation("dir", &"00".parse().unwrap(), 0, 1.0).unwrap();
        assert_eq!(s, before);

        s.controlled_rotation("dir", &"11".parse().unwrap(), 0, 0.5).unwrap();
        let h = (0.6f64 * 0.5).sqrt();
        assert!((s.amplitudes()[0b110].re - h).abs() < 1e-15);
        assert!((s.amplitudes()[0b111].re - h).abs() < 1e-15);
        assert_eq!(s.amplitudes()[0b000], before.amplitudes()[0b000]);
        assert_eq!(s.amplitudes()[0b001], c(0.0));
    }

    #[test]
    fn rotation_errors() {
        let l = RegisterLayout::new(&[("dir", 2)]).unwrap();
        let mut s = StateVector::init_basis(l.clone(), &[("dir", 1)]).unwrap();
        assert!(matches!(s.controlled_rotation("dir", &BitPath::empty(), 0, 1.5), Err(Error::InvalidProbability(_))));
        if cfg!(debug_assertions) {
            assert_eq!(s.controlled_rotation("dir", &BitPath::empty(), 0, 0.5), Err(Error::RotationTargetNotZero));
        }
    }

    #[test]
    fn xor_load_builds_pre_rotation_state() {
        let l = example_layout();
        let mut amps = vec![c(0.0); l.dim()];
        for (dir, p) in [(0b000usize, 0.4), (0b010, 0.4), (0b110, 0.2)] {
            amps[dir << 9] = c(f64::sqrt(p));
        }
        let mut s = StateVector::from_amplitudes(l.clone(), amps).unwrap();
        let before = s.clone();
        let a: HashMap<u64, u64> = [(0b00, 4), (0b01, 4), (0b11, 1)].into();
        let b: HashMap<u64, u64> = [(0b00, 4), (0b01, 4), (0b11, 2)].into();
        s.xor_load(&[("dir", 2)], &a, "a").unwrap();
        s.xor_load(&[("dir", 2)], &b, "b").unwrap();
        let idx = |d: usize, a: usize, b: usize| (d << 9) | (a << 5) | (b << 1);
        assert_eq!(s.amplitudes()[idx(0b000, 4, 4)], c(0.4f64.sqrt()));
        assert_eq!(s.amplitudes()[idx(0b010, 4, 4)], c(0.4f64.sqrt()));
        assert_eq!(s.amplitudes()[idx(0b110, 1, 2)], c(0.2f64.sqrt()));
        let mut sorted_before: Vec<f64> = before.amplitudes().iter().map(|a| a.re).collect();
        let mut sorted_after: Vec<f64> = s.amplitudes().iter().map(|a| a.re).collect();
        sorted_before.sort_by(f64::total_cmp);
        sorted_after.sort_by(f64::total_cmp);
        assert_eq!(sorted_before, sorted_after);

        s.xor_load(&[("dir", 2)], &b, "b").unwrap();
        s.xor_load(&[("dir", 2)], &a, "a").unwrap();
        assert_eq!(s, before);

        let too_big: HashMap<u64, u64> = [(0, 16)].into();
        assert!(matches!(s.xor_load(&[("dir", 2)], &too_big, "a"), Err(Error::WordOverflow { .. })));
    }

    #[test]
    fn pauli_gates() {
        let l = RegisterLayout::new(&[("dir", 3), ("c", 1)]).unwrap();
        let mut amps = vec![c(0.0); 16];
        amps[0b000_1] = c(0.5);
        amps[0b010_0] = c(0.5);
        amps[0b110_0] = c(0.5);
        amps[0b111_1] = c(0.5);
        let mut s = StateVector::from_amplitudes(l.clone(), amps).unwrap();
        let before = s.clone();
        let cq = l.qubit("c", 0).unwrap();
        s.z_on(cq);
        assert_eq!(s.amplitudes()[0b000_1], c(-0.5));
        assert_eq!(s.amplitudes()[0b111_1], c(-0.5));
        assert_eq!(s.amplitudes()[0b010_0], c(0.5));
        s.z_on(cq);
        assert_eq!(s, before);

        let mut s = StateVector::init_basis(l.clone(), &[]).unwrap();
        s.x_on(cq);
        assert_eq!(s.amplitudes()[1], c(1.0));
        s.cx_on(cq, l.qubit("dir", 2).unwrap());
        assert_eq!(s.amplitudes()[0b001_1], c(1.0));
    }

    #[test]
    fn fidelity_cases() {
        let l = RegisterLayout::new(&[("dir", 2)]).unwrap();
        let s = StateVector::init_basis(l.clone(), &[("dir", 1)]).unwrap();
        assert_eq!(s.fidelity(s.amplitudes()).unwrap(), 1.0);
        let t = StateVector::init_basis(l, &[("dir", 2)]).unwrap();
        assert_eq!(s.fidelity(t.amplitudes()).unwrap(), 0.0);
        assert!(matches!(s.fidelity(&[c(1.0)]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn disentangled_zero() {
        let l = example_layout();
        let s = StateVector::init_basis(l.clone(), &[("a", 1)]).unwrap();
        assert!(!s.register_is_disentangled_zero("a", 1e-10).unwrap());
        assert!(s.register_is_disentangled_zero("b", 1e-10).unwrap());

        let mut amps = vec![c(0.0); l.dim()];
        amps[0] = c((1.0f64 - 1e-12).sqrt());
        amps[1 << 5] = c(1e-6);
        let s = StateVector::from_amplitudes(l, amps).unwrap();
        assert!(!s.register_is_disentangled_zero("a", 1e-10).unwrap());
    }

    #[test]
    fn dump_and_reduce() {
        let l = RegisterLayout::new(&[("dir", 2), ("c", 1)]).unwrap();
        let mut amps = vec![c(0.0); 8];
        amps[0b00_0] = c(-0.6);
        amps[0b11_0] = c(0.8);
        let s = StateVector::from_amplitudes(l, amps).unwrap();
        assert_eq!(s.dump(1e-10), "00|0 -0.600000000000 0.000000000000\n11|0 0.800000000000 0.000000000000\n");
        assert_eq!(s.reduced(&["dir"]).unwrap(), vec![c(-0.6), c(0.0), c(0.0), c(0.8)]);
        let w = s.key_weights(&[("dir", 1)], 1e-10).unwrap();
        assert_eq!(w.len(), 2);
    }
}

#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    fn random_state(seed: Vec<f64>) -> StateVector {
        let l = RegisterLayout::new(&[("dir", 3), ("a", 2), ("c", 1)]).unwrap();
        let n: f64 = seed.iter().map(|x| x * x).sum::<f64>().sqrt();
        let amps = seed.iter().map(|x| Complex64::new(x / n, 0.0)).collect();
        StateVector::from_amplitudes(l, amps).unwrap()
    }

    proptest! {
        #[test]
        fn rotation_round_trip(
            seed in prop::collection::vec(0.1f64..1.0, 64),
            p in 0.0f64..=1.0,
            pre in 0u64..4,
        ) {
            let t = RegisterLayout::new(&[("dir", 3), ("a", 2), ("c", 1)]).unwrap().qubit("dir", 2).unwrap();
            // target qubit starts in |0> everywhere
            let seed: Vec<f64> = seed.iter().enumerate().map(|(i, x)| if i >> t & 1 == 1 { 0.0 } else { *x }).collect();
            let mut s = random_state(seed);
            let before = s.clone();
            let prefix = BitPath::from_value(pre, 2);
            s.controlled_rotation("dir", &prefix, t, p).unwrap();
            prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
            s.controlled_rotation_inverse("dir", &prefix, t, p).unwrap();
            for (x, y) in s.amplitudes().iter().zip(before.amplitudes()) {
                prop_assert!((x - y).norm() < 1e-12);
            }
        }

        #[test]
        fn xor_load_commutes_with_disjoint_phase(
            seed in prop::collection::vec(0.1f64..1.0, 64),
            words in prop::collection::vec(0u64..4, 4),
        ) {
            let s = random_state(seed);
            let map: HashMap<u64, u64> = words.iter().enumerate().map(|(k, w)| (k as u64, *w)).collect();
            let c = s.layout().qubit("c", 0).unwrap();
            let mut x = s.clone();
            x.xor_load(&[("dir", 2)], &map, "a").unwrap();
            x.z_on(c);
            let mut y = s.clone();
            y.z_on(c);
            y.xor_load(&[("dir", 2)], &map, "a").unwrap();
            prop_assert_eq!(&x, &y);
            prop_assert!((x.norm_sqr() - 1.0).abs() < 1e-12);
            x.xor_load(&[("dir", 2)], &map, "a").unwrap();
            x.z_on(c);
            prop_assert_eq!(x, s);
        }
    }
}
