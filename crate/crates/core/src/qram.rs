//! Bucket-brigade qRAM.
//!
//! The switch tree is stored in level order: switch `k` has children
//! `2k + 1` (reached by a stored `Zero`) and `2k + 2` (reached by a stored
//! `One`). A switch at depth `n - 1` leads to memory cells `2c` and `2c + 1`
//! where `c` is its offset inside that level, so the cell reached by a
//! stored path is the path's binary value.
//!
//! Address bits are sent one at a time, most significant first. A bit
//! crosses every non-empty switch, following its stored direction, and is
//! stored in the first empty switch it meets. Data moves by XOR onto the
//! bus, so retrieving twice with the same route restores the register and
//! the bus has to be cleared by a second retrieval.

use std::collections::HashSet;
use std::fmt::{self, Debug, Write as _};

use num_complex::Complex64;
use serde::Serialize;

use crate::data::BitPath;
use crate::error::{Error, Result};

/// A classical word that can be XOR-loaded onto the data bus.
pub trait Word: Copy + PartialEq + Debug + Send + Sync {
    fn zero() -> Self;
    fn xor(self, other: Self) -> Self;
    fn as_f64(self) -> f64;
}

impl Word for u64 {
    fn zero() -> Self {
        0
    }
    fn xor(self, other: Self) -> Self {
        self ^ other
    }
    fn as_f64(self) -> f64 {
        self as f64
    }
}

impl Word for u8 {
    fn zero() -> Self {
        0
    }
    fn xor(self, other: Self) -> Self {
        self ^ other
    }
    fn as_f64(self) -> f64 {
        self as f64
    }
}

/// Reals travel as their IEEE-754 bit pattern; `0.0` is the all-zero word.
impl Word for f64 {
    fn zero() -> Self {
        0.0
    }
    fn xor(self, other: Self) -> Self {
        f64::from_bits(self.to_bits() ^ other.to_bits())
    }
    fn as_f64(self) -> f64 {
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SwitchState {
    /// Waiting: the next bit to arrive is stored here.
    Empty,
    Zero,
    One,
}

impl SwitchState {
    fn from_bit(bit: u8) -> Self {
        if bit == 0 {
            SwitchState::Zero
        } else {
            SwitchState::One
        }
    }

    fn direction(self) -> Option<u8> {
        match self {
            SwitchState::Empty => None,
            SwitchState::Zero => Some(0),
            SwitchState::One => Some(1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RoutingEvent {
    BusLoad {
        bit: u8,
    },
    PassThrough {
        node: usize,
        dir: u8,
    },
    StoreBitAt {
        node: usize,
        bit: u8,
    },
    BusExtract {
        cell: usize,
    },
    /// Reverse of `PassThrough` while unrouting.
    ReversePass {
        node: usize,
        dir: u8,
    },
    /// Reverse of `StoreBitAt`: the switch goes back to `Empty`.
    ClearBitAt {
        node: usize,
        bit: u8,
    },
    BusUnload {
        bit: u8,
    },
}

impl fmt::Display for RoutingEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            RoutingEvent::BusLoad { bit } => write!(f, "BUS_LOAD node=0 dir={bit}"),
            RoutingEvent::PassThrough { node, dir } => write!(f, "PASS node={node} dir={dir}"),
            RoutingEvent::StoreBitAt { node, bit } => write!(f, "STORE node={node} dir={bit}"),
            RoutingEvent::BusExtract { cell } => write!(f, "BUS_EXTRACT node={cell}"),
            RoutingEvent::ReversePass { node, dir } => write!(f, "UNPASS node={node} dir={dir}"),
            RoutingEvent::ClearBitAt { node, bit } => write!(f, "CLEAR node={node} dir={bit}"),
            RoutingEvent::BusUnload { bit } => write!(f, "BUS_UNLOAD node=0 dir={bit}"),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct RouteCounters {
    /// Switch crossings (`PassThrough`), the `n(n-1)/2` quantity.
    pub routing_ops: usize,
    pub stores: usize,
    pub bus_loads: usize,
    /// Parallel time: each crossed level costs two steps (gates controlled
    /// on `|0>` and on `|1>`), each store one.
    pub time_steps: usize,
}

impl RouteCounters {
    fn add(&mut self, other: &RouteCounters) {
        self.routing_ops += other.routing_ops;
        self.stores += other.stores;
        self.bus_loads += other.bus_loads;
        self.time_steps += other.time_steps;
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RoutingLog {
    events: Vec<RoutingEvent>,
    pub forward: RouteCounters,
    pub reverse: RouteCounters,
    pub extracts: usize,
    /// Most switches simultaneously out of `Empty`.
    pub entangled_switches: usize,
    active_switches: usize,
}

impl RoutingLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn events(&self) -> &[RoutingEvent] {
        &self.events
    }

    pub fn routing_ops(&self) -> usize {
        self.forward.routing_ops
    }

    pub fn stores(&self) -> usize {
        self.forward.stores
    }

    pub fn time_steps(&self) -> usize {
        self.forward.time_steps
    }

    fn push(&mut self, event: RoutingEvent) {
        match event {
            RoutingEvent::BusLoad { .. } => self.forward.bus_loads += 1,
            RoutingEvent::PassThrough { .. } => {
                self.forward.routing_ops += 1;
                self.forward.time_steps += 2;
            }
            RoutingEvent::StoreBitAt { .. } => {
                self.forward.stores += 1;
                self.forward.time_steps += 1;
                self.active_switches += 1;
                self.entangled_switches = self.entangled_switches.max(self.active_switches);
            }
            RoutingEvent::BusExtract { .. } => self.extracts += 1,
            RoutingEvent::ReversePass { .. } => {
                self.reverse.routing_ops += 1;
                self.reverse.time_steps += 2;
            }
            RoutingEvent::ClearBitAt { .. } => {
                self.reverse.stores += 1;
                self.reverse.time_steps += 1;
                self.active_switches -= 1;
            }
            RoutingEvent::BusUnload { .. } => self.reverse.bus_loads += 1,
        }
        self.events.push(event);
    }

    /// One line per event: `STEP <k> <EVENT> node=<index> [dir=<0|1>]`.
    pub fn trace_text(&self) -> String {
        let mut out = String::new();
        for (k, e) in self.events.iter().enumerate() {
            let _ = writeln!(out, "STEP {k} {e}");
        }
        out
    }
}

pub fn time_steps(log: &RoutingLog) -> usize {
    log.time_steps()
}

#[derive(Debug, Clone, PartialEq)]
pub struct QramInstance<W: Word> {
    width: usize,
    switches: Vec<SwitchState>,
    cells: Vec<W>,
    bus_width: usize,
}

impl<W: Word> QramInstance<W> {
    /// A qRAM over `cells`, whose length must be a power of two.
    pub fn new(cells: Vec<W>) -> Result<Self> {
        if !cells.len().is_power_of_two() {
            return Err(Error::CellCount {
                got: cells.len(),
                width: cells.len().next_power_of_two().trailing_zeros() as usize,
            });
        }
        let width = cells.len().trailing_zeros() as usize;
        Ok(Self {
            width,
            switches: vec![SwitchState::Empty; (1 << width) - 1],
            cells,
            bus_width: std::mem::size_of::<W>() * 8,
        })
    }

    /// Sets the word size reported in metrics. Words are never truncated.
    pub fn with_bus_width(mut self, bits: usize) -> Self {
        self.bus_width = bits;
        self
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn bus_width(&self) -> usize {
        self.bus_width
    }

    pub fn cells(&self) -> &[W] {
        &self.cells
    }

    pub fn switches(&self) -> &[SwitchState] {
        &self.switches
    }

    pub fn is_empty_tree(&self) -> bool {
        self.switches.iter().all(|s| *s == SwitchState::Empty)
    }

    pub fn active_switches(&self) -> usize {
        self.switches.iter().filter(|s| **s != SwitchState::Empty).count()
    }

    /// Directions stored from the root down, stopping at the first `Empty`.
    pub fn stored_path(&self) -> BitPath {
        let mut bits = Vec::new();
        let mut node = 0;
        while node < self.switches.len() {
            match self.switches[node].direction() {
                Some(d) => {
                    bits.push(d);
                    node = 2 * node + 1 + d as usize;
                }
                None => break,
            }
        }
        BitPath::from_bits(bits).expect("directions are bits")
    }

    /// Sends one address bit in at the root.
    pub fn route_bit(&mut self, bit: u8, log: &mut RoutingLog) -> Result<()> {
        let bit = bit & 1;
        let mut node = 0;
        let mut crossed = Vec::new();
        loop {
            if node >= self.switches.len() {
                return Err(Error::RouteComplete(self.width));
            }
            match self.switches[node].direction() {
                Some(d) => {
                    crossed.push((node, d));
                    node = 2 * node + 1 + d as usize;
                }
                None => break,
            }
        }
        log.push(RoutingEvent::BusLoad { bit });
        for (node, dir) in crossed {
            log.push(RoutingEvent::PassThrough { node, dir });
        }
        self.switches[node] = SwitchState::from_bit(bit);
        log.push(RoutingEvent::StoreBitAt { node, bit });
        Ok(())
    }

    pub fn route_address(&mut self, addr: &BitPath, log: &mut RoutingLog) -> Result<()> {
        if addr.depth() != self.width {
            return Err(Error::AddressWidth { got: addr.depth(), expected: self.width });
        }
        if !self.is_empty_tree() {
            return Err(Error::TreeNotEmpty);
        }
        for &b in addr.bits() {
            self.route_bit(b, log)?;
        }
        Ok(())
    }

    /// XORs the addressed cell into `register` through the bus.
    pub fn retrieve(&self, register: &mut W, log: &mut RoutingLog) -> Result<()> {
        let path = self.stored_path();
        if path.depth() != self.width {
            return Err(Error::IncompleteRoute { stored: path.depth(), needed: self.width });
        }
        let cell = path.value() as usize;
        *register = register.xor(self.cells[cell]);
        log.push(RoutingEvent::BusExtract { cell });
        Ok(())
    }

    /// Replays the stored route backwards until every switch is `Empty`.
    pub fn unroute(&mut self, log: &mut RoutingLog) {
        let path = self.stored_path();
        let nodes = path_nodes(&path);
        for k in (0..path.depth()).rev() {
            let bit = path.bits()[k];
            let node = nodes[k];
            self.switches[node] = SwitchState::Empty;
            log.push(RoutingEvent::ClearBitAt { node, bit });
            for j in (0..k).rev() {
                log.push(RoutingEvent::ReversePass { node: nodes[j], dir: path.bits()[j] });
            }
            log.push(RoutingEvent::BusUnload { bit });
        }
    }
}

/// Switch indices visited by `path`, root first.
pub fn path_nodes(path: &BitPath) -> Vec<usize> {
    let mut node = 0;
    path.bits()
        .iter()
        .map(|&b| {
            let here = node;
            node = 2 * node + 1 + b as usize;
            here
        })
        .collect()
}

pub fn route_bit<W: Word>(q: &mut QramInstance<W>, bit: u8, log: &mut RoutingLog) -> Result<()> {
    q.route_bit(bit, log)
}

pub fn route_address<W: Word>(q: &mut QramInstance<W>, addr: &BitPath, log: &mut RoutingLog) -> Result<()> {
    q.route_address(addr, log)
}

pub fn retrieve<W: Word>(q: &QramInstance<W>, register: W, log: &mut RoutingLog) -> Result<W> {
    let mut r = register;
    q.retrieve(&mut r, log)?;
    Ok(r)
}

pub fn unroute<W: Word>(q: &mut QramInstance<W>, log: &mut RoutingLog) {
    q.unroute(log)
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueryBranch<W: Word> {
    pub address: BitPath,
    pub amplitude: Complex64,
    pub word: W,
    pub log: RoutingLog,
    /// The instance as it stood between routing and unrouting.
    pub routed: QramInstance<W>,
}

/// Costs of one superposed query, reported per branch.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct QueryMetrics {
    pub branches: usize,
    /// Largest single-branch crossing count; one coherent query costs this.
    pub routing_ops: usize,
    pub stores: usize,
    pub entangled_switches: usize,
    /// Max over branches of forward plus reverse parallel time.
    pub time_steps: usize,
    /// Summed over branches: the simulator's cost, not the device's.
    pub simulated_routing_ops: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BranchedQuery<W: Word> {
    pub branches: Vec<QueryBranch<W>>,
    pub metrics: QueryMetrics,
}

impl<W: Word> BranchedQuery<W> {
    pub fn words(&self) -> Vec<W> {
        self.branches.iter().map(|b| b.word).collect()
    }
}

/// Routes, retrieves and unroutes each basis address on its own copy of
/// the instance. Amplitudes are carried through untouched.
pub fn query_superposed<W: Word>(q: &QramInstance<W>, branches: &[(BitPath, Complex64)]) -> Result<BranchedQuery<W>> {
    if !q.is_empty_tree() {
        return Err(Error::TreeNotEmpty);
    }
    let mut seen = HashSet::with_capacity(branches.len());
    for (addr, _) in branches {
        if addr.depth() != q.width {
            return Err(Error::AddressWidth { got: addr.depth(), expected: q.width });
        }
        if !seen.insert(addr) {
            return Err(Error::DuplicateAddress(addr.to_string()));
        }
    }

    let mut out = Vec::with_capacity(branches.len());
    let mut metrics = QueryMetrics { branches: branches.len(), ..Default::default() };
    for (address, amplitude) in branches {
        let mut inst = q.clone();
        let mut log = RoutingLog::new();
        inst.route_address(address, &mut log)?;
        let routed = inst.clone();
        let mut word = W::zero();
        inst.retrieve(&mut word, &mut log)?;
        inst.unroute(&mut log);
        debug_assert!(inst.is_empty_tree());

        metrics.routing_ops = metrics.routing_ops.max(log.forward.routing_ops);
        metrics.stores = metrics.stores.max(log.forward.stores);
        metrics.entangled_switches = metrics.entangled_switches.max(log.entangled_switches);
        metrics.time_steps = metrics.time_steps.max(log.forward.time_steps + log.reverse.time_steps);
        metrics.simulated_routing_ops += log.forward.routing_ops + log.reverse.routing_ops;
        out.push(QueryBranch { address: address.clone(), amplitude: *amplitude, word, log, routed });
    }
    Ok(BranchedQuery { branches: out, metrics })
}

/// Sum of forward counters over several logs.
pub fn total_forward(logs: &[RoutingLog]) -> RouteCounters {
    let mut c = RouteCounters::default();
    for l in logs {
        c.add(&l.forward);
    }
    c
}

/// Switches a bucket brigade activates for one `n`-bit query.
pub fn bucket_brigade_activations(n: usize) -> u64 {
    n as u64
}

/// Switches a fanout decoder activates for one `n`-bit query: every switch
/// of level `i` is driven by address bit `i`, so all `2^n - 1` of them.
pub fn fanout_activations(n: usize) -> u64 {
    (1u64 << n) - 1
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fresh(n: usize) -> QramInstance<f64> {
        QramInstance::new(vec![0.0; 1 << n]).unwrap()
    }

    #[test]
    fn first_bit_is_stored_at_root() {
        let mut q = fresh(3);
        let mut log = RoutingLog::new();
        q.route_bit(1, &mut log).unwrap();
        assert_eq!(q.switches()[0], SwitchState::One);
        assert_eq!(log.routing_ops(), 0);
        assert_eq!(log.stores(), 1);
    }

    #[test]
    fn second_bit_follows_first() {
        let mut q = fresh(3);
        let mut log = RoutingLog::new();
        q.route_bit(1, &mut log).unwrap();
        q.route_bit(0, &mut log).unwrap();
        // child 1 of the root is switch 2
        assert_eq!(q.switches()[2], SwitchState::Zero);
        assert_eq!(q.switches()[1], SwitchState::Empty);
        assert_eq!(log.routing_ops(), 1);
    }

    #[test]
    fn full_route_110() {
        let mut q = fresh(3);
        let mut log = RoutingLog::new();
        q.route_address(&"110".parse().unwrap(), &mut log).unwrap();
        // hand trace: root(0)=One -> switch 2=One -> switch 6=Zero
        assert_eq!(q.switches()[0], SwitchState::One);
        assert_eq!(q.switches()[2], SwitchState::One);
        assert_eq!(q.switches()[6], SwitchState::Zero);
        assert_eq!(q.active_switches(), 3);
        assert_eq!(log.routing_ops(), 3);
        assert_eq!(log.stores(), 3);
        assert_eq!(log.entangled_switches, 3);
        assert_eq!(q.stored_path().to_string(), "110");
        assert!(matches!(q.route_bit(0, &mut log), Err(Error::RouteComplete(3))));
    }

    #[test]
    fn route_000_is_leftmost() {
        let mut q = fresh(3);
        q.route_address(&"000".parse().unwrap(), &mut RoutingLog::new()).unwrap();
        for node in [0, 1, 3] {
            assert_eq!(q.switches()[node], SwitchState::Zero);
        }
        assert_eq!(q.active_switches(), 3);
    }

    #[test]
    fn route_errors() {
        let mut q = fresh(3);
        let mut log = RoutingLog::new();
        assert!(matches!(
            q.route_address(&"11".parse().unwrap(), &mut log),
            Err(Error::AddressWidth { got: 2, expected: 3 })
        ));
        q.route_bit(1, &mut log).unwrap();
        let mut r = 0.0;
        assert!(matches!(q.retrieve(&mut r, &mut log), Err(Error::IncompleteRoute { stored: 1, needed: 3 })));
        assert!(matches!(q.route_address(&"110".parse().unwrap(), &mut log), Err(Error::TreeNotEmpty)));
        assert!(QramInstance::new(vec![0u64; 3]).is_err());
    }

    #[test]
    fn retrieve_is_xor_load() {
        let mut q = QramInstance::new(vec![4.0, 0.0, 4.0, 0.0, 0.0, 0.0, 1.0, 1.0]).unwrap();
        let mut log = RoutingLog::new();
        q.route_address(&"110".parse().unwrap(), &mut log).unwrap();
        let mut reg = 0.0;
        q.retrieve(&mut reg, &mut log).unwrap();
        assert_eq!(reg, 1.0);
        q.retrieve(&mut reg, &mut log).unwrap();
        assert_eq!(reg, 0.0);
        assert_eq!(log.extracts, 2);

        let mut q = QramInstance::new(vec![8.0, 2.0]).unwrap();
        q.route_address(&"1".parse().unwrap(), &mut RoutingLog::new()).unwrap();
        assert_eq!(retrieve(&q, 0.0, &mut RoutingLog::new()).unwrap(), 2.0);

        let mut q = QramInstance::new(vec![0b101u64, 0b011]).unwrap();
        q.route_address(&"0".parse().unwrap(), &mut RoutingLog::new()).unwrap();
        assert_eq!(retrieve(&q, 0b110, &mut RoutingLog::new()).unwrap(), 0b011);
    }

    #[test]
    fn single_cell_qram_needs_no_routing() {
        let q = QramInstance::new(vec![10.0]).unwrap();
        assert_eq!(q.width(), 0);
        assert_eq!(retrieve(&q, 0.0, &mut RoutingLog::new()).unwrap(), 10.0);
    }

    #[test]
    fn unroute_restores_and_mirrors_cost() {
        let cells: Vec<u64> = (0..8).collect();
        let start = QramInstance::new(cells).unwrap();
        for a in 0..8 {
            let mut q = start.clone();
            let mut log = RoutingLog::new();
            q.route_address(&BitPath::from_value(a, 3), &mut log).unwrap();
            q.unroute(&mut log);
            assert_eq!(q, start);
            assert_eq!(log.forward, log.reverse);
            assert_eq!(log.entangled_switches, 3);
        }
    }

    #[test]
    fn time_steps_follow_fig4_schedule() {
        let mut q = fresh(1);
        let mut log = RoutingLog::new();
        q.route_address(&"0".parse().unwrap(), &mut log).unwrap();
        assert_eq!(time_steps(&log), 1);

        // (a) store at root: 1; (b) two control steps at level 0 + store: 3;
        // (c) two control steps at levels 0 and 1 + store: 5.
        let schedule = 1 + (2 + 1) + (2 * 2 + 1);
        let mut q = fresh(3);
        let mut log = RoutingLog::new();
        q.route_address(&"101".parse().unwrap(), &mut log).unwrap();
        assert_eq!(time_steps(&log), schedule);
    }

    #[test]
    fn time_steps_grow_quadratically() {
        let steps: Vec<f64> = (1..=8)
            .map(|n| {
                let mut q = fresh(n);
                let mut log = RoutingLog::new();
                q.route_address(&BitPath::from_value(0, n), &mut log).unwrap();
                time_steps(&log) as f64
            })
            .collect();
        // least-squares fit of steps ~ c * n^2
        let (num, den) = (1..=8).zip(&steps).fold((0.0, 0.0), |(a, b), (n, s)| {
            let x = (n * n) as f64;
            (a + x * s, b + x * x)
        });
        let c = num / den;
        for (n, s) in (1..=8).zip(&steps) {
            assert!((s - c * (n * n) as f64).abs() < 1e-9, "n={n}");
        }
        assert!((c - 1.0).abs() < 1e-12);
    }

    #[test]
    fn trace_lines() {
        let mut q = fresh(2);
        let mut log = RoutingLog::new();
        q.route_address(&"10".parse().unwrap(), &mut log).unwrap();
        assert_eq!(
            log.trace_text(),
            "STEP 0 BUS_LOAD node=0 dir=1\n\
             STEP 1 STORE node=0 dir=1\n\
             STEP 2 BUS_LOAD node=0 dir=0\n\
             STEP 3 PASS node=0 dir=1\n\
             STEP 4 STORE node=2 dir=0\n"
        );
    }

    #[test]
    fn superposed_queries() {
        let q = QramInstance::new(vec![4.0, 0.0, 4.0, 0.0, 0.0, 0.0, 1.0, 1.0]).unwrap();
        let branches = vec![
            ("000".parse().unwrap(), Complex64::new(0.4f64.sqrt(), 0.0)),
            ("010".parse().unwrap(), Complex64::new(0.4f64.sqrt(), 0.0)),
            ("110".parse().unwrap(), Complex64::new(0.2f64.sqrt(), 0.0)),
        ];
        let res = query_superposed(&q, &branches).unwrap();
        assert_eq!(res.words(), vec![4.0, 4.0, 1.0]);
        for (b, (_, amp)) in res.branches.iter().zip(&branches) {
            assert_eq!(b.amplitude, *amp);
            assert_eq!(b.routed.active_switches(), 3);
        }
        assert_eq!(res.metrics.routing_ops, 3);
        assert_eq!(res.metrics.entangled_switches, 3);
        assert_eq!(res.metrics.time_steps, 18);
        assert_eq!(res.metrics.simulated_routing_ops, 18);

        let dup = vec![branches[0].clone(), branches[0].clone()];
        assert!(matches!(query_superposed(&q, &dup), Err(Error::DuplicateAddress(_))));
    }

    #[test]
    fn single_branch_equals_route_and_retrieve() {
        let q = QramInstance::new(vec![3u64, 1, 4, 1, 5, 9, 2, 6]).unwrap();
        let addr: BitPath = "101".parse().unwrap();
        let res = query_superposed(&q, &[(addr.clone(), Complex64::new(1.0, 0.0))]).unwrap();
        let mut direct = q.clone();
        let mut log = RoutingLog::new();
        direct.route_address(&addr, &mut log).unwrap();
        assert_eq!(res.branches[0].routed, direct);
        assert_eq!(res.branches[0].word, retrieve(&direct, 0, &mut log).unwrap());
    }

    #[test]
    fn exhaustive_basis_queries() {
        for n in 0..=5 {
            let cells: Vec<u64> = (0..1u64 << n).map(|i| i * 7 + 3).collect();
            let q = QramInstance::new(cells.clone()).unwrap();
            let branches: Vec<_> =
                (0..1u64 << n).map(|i| (BitPath::from_value(i, n), Complex64::new(1.0, 0.0))).collect();
            let res = query_superposed(&q, &branches).unwrap();
            assert_eq!(res.words(), cells);
        }
    }

    #[test]
    fn activation_counts() {
        assert_eq!(bucket_brigade_activations(10), 10);
        assert_eq!(fanout_activations(10), 1023);
        assert_eq!(fanout_activations(1), 1);
    }
}
