//! Amplitude encoding driven by qRAM lookups into a [`KpTree`].
//!
//! For each level `l = 1..=n`, with `p` the first `l - 1` target bits of a
//! branch:
//!
//! 1. load `a := B(p·0)` from the level-`l` qRAM and `b := B(p)` from the
//!    level-`(l-1)` qRAM, both by superposed query keyed on `p`;
//! 2. rotate target qubit `l - 1` so that it keeps `sqrt(a / b)` on `|0>`;
//! 3. repeat both queries to XOR `a` and `b` back to zero. The rotation
//!    only touched qubit `l - 1`, so the keys are unchanged.
//!
//! Signs are applied last through the sign qRAM, either by kicking a `Z`
//! phase off the data bus or by loading the sign into `c`, applying `Z`
//! to `c` and unloading it again.
//!
//! Plans may carry a key register (the row index of a matrix) that is
//! prepended to every qRAM address; this turns the vector routine into the
//! row map `|i>|0> -> |i> M_i / |M_i|`.

use std::collections::HashMap;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::Serialize;

use crate::data::{bit_width, BitPath, Tolerance};
use crate::error::{Error, Result};
use crate::kptree::{KpForest, KpTree};
use crate::qram::{query_superposed, QramInstance, QueryMetrics, RoutingLog, Word};
use crate::simulator::{RegisterLayout, StateVector};

pub const REG_A: &str = "a";
pub const REG_B: &str = "b";
pub const REG_C: &str = "c";

/// Largest integer cell value stored literally in the `a`/`b` registers.
const LITERAL_WIDTH_LIMIT: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum SignMethod {
    /// `Z` on the routed data bus, then clear the bus.
    #[default]
    PhaseKickback,
    /// Load the sign into `c`, `Z` on `c`, unload `c`.
    CnotFlip,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct PrepOptions {
    pub tolerance: Tolerance,
    pub sign_method: SignMethod,
}

/// How real cell values are written into the `a` and `b` registers.
#[derive(Debug, Clone, PartialEq)]
pub enum WordCodec {
    /// Every cell is a small nonnegative integer and is stored as itself.
    Literal { width: usize },
    /// Per-level tables; code `k > 0` stands for `table[k - 1]`, code 0 for 0.
    Indexed { a: Vec<Vec<f64>>, b: Vec<Vec<f64>> },
}

impl WordCodec {
    fn for_levels(levels: &[Vec<f64>]) -> Self {
        let integral = levels.iter().flatten().all(|&x| x >= 0.0 && x.fract() == 0.0 && x < 1e15);
        if integral {
            let max = levels.iter().flatten().fold(0.0f64, |m, &x| m.max(x)) as u64;
            let width = bit_width(max);
            if width <= LITERAL_WIDTH_LIMIT {
                return WordCodec::Literal { width };
            }
        }
        let distinct = |values: &mut dyn Iterator<Item = f64>| {
            let mut out: Vec<f64> = Vec::new();
            for v in values {
                if v != 0.0 && !out.iter().any(|x| x.to_bits() == v.to_bits()) {
                    out.push(v);
                }
            }
            out
        };
        let mut a = vec![Vec::new()];
        let mut b = vec![Vec::new()];
        for l in 1..levels.len() {
            a.push(distinct(&mut levels[l].iter().step_by(2).copied()));
            b.push(distinct(&mut levels[l - 1].iter().copied()));
        }
        WordCodec::Indexed { a, b }
    }

    fn widths(&self) -> (usize, usize) {
        match self {
            WordCodec::Literal { width } => (*width, *width),
            WordCodec::Indexed { a, b } => {
                let w = |t: &Vec<Vec<f64>>| t.iter().map(|x| bit_width(x.len() as u64)).max().unwrap_or(0);
                (w(a), w(b))
            }
        }
    }

    fn encode(table: &[f64], value: f64) -> Result<u64> {
        if value == 0.0 {
            return Ok(0);
        }
        table.iter().position(|x| x.to_bits() == value.to_bits()).map(|k| k as u64 + 1).ok_or(Error::NonFinite(value))
    }

    fn encode_a(&self, level: usize, value: f64) -> Result<u64> {
        match self {
            WordCodec::Literal { .. } => Ok(value as u64),
            WordCodec::Indexed { a, .. } => Self::encode(&a[level], value),
        }
    }

    fn encode_b(&self, level: usize, value: f64) -> Result<u64> {
        match self {
            WordCodec::Literal { .. } => Ok(value as u64),
            WordCodec::Indexed { b, .. } => Self::encode(&b[level], value),
        }
    }

    fn decode(table: &[f64], code: u64) -> f64 {
        match code {
            0 => 0.0,
            k => table.get(k as usize - 1).copied().unwrap_or(f64::NAN),
        }
    }

    pub fn decode_a(&self, level: usize, code: u64) -> f64 {
        match self {
            WordCodec::Literal { .. } => code as f64,
            WordCodec::Indexed { a, .. } => Self::decode(&a[level], code),
        }
    }

    pub fn decode_b(&self, level: usize, code: u64) -> f64 {
        match self {
            WordCodec::Literal { .. } => code as f64,
            WordCodec::Indexed { b, .. } => Self::decode(&b[level], code),
        }
    }
}

/// The qRAMs and register names one preparation needs.
#[derive(Debug, Clone)]
pub struct PrepPlan {
    n: usize,
    key: Option<(String, usize)>,
    target: String,
    level_qrams: Vec<QramInstance<f64>>,
    sign_qram: QramInstance<u64>,
    codec: WordCodec,
}

impl PrepPlan {
    /// Plan for a single vector, prepared into register `dir`.
    pub fn for_vector(tree: &KpTree) -> Self {
        Self::for_trees(std::slice::from_ref(tree), None, "dir")
    }

    /// Plan for the row-norm map over register `row`.
    pub fn for_norms(forest: &KpForest) -> Self {
        Self::for_trees(std::slice::from_ref(forest.norm_tree()), None, "row")
    }

    /// Plan for the row map: keyed on `row`, prepared into `col`.
    pub fn for_rows(forest: &KpForest) -> Self {
        let key = ("row".to_string(), forest.row_depth());
        Self::for_trees(forest.row_trees(), Some(key), "col")
    }

    /// One qRAM per level holding that level of every tree back to back,
    /// addressed by `key · prefix`.
    pub fn for_trees(trees: &[KpTree], key: Option<(String, usize)>, target: &str) -> Self {
        let n = trees[0].depth();
        debug_assert!(trees.iter().all(|t| t.depth() == n));
        debug_assert_eq!(trees.len(), 1 << key.as_ref().map_or(0, |k| k.1));
        let levels: Vec<Vec<f64>> =
            (0..=n).map(|l| trees.iter().flat_map(|t| t.levels()[l].iter().copied()).collect()).collect();
        let signs: Vec<u64> = trees.iter().flat_map(|t| t.sign_cells().iter().map(|&s| s as u64)).collect();
        let codec = WordCodec::for_levels(&levels);
        let (wa, wb) = codec.widths();
        let level_qrams = levels
            .iter()
            .enumerate()
            .map(|(l, cells)| {
                let bus = if l == 0 { wb } else { wa.max(wb) };
                QramInstance::new(cells.clone()).expect("level sizes are powers of two").with_bus_width(bus)
            })
            .collect();
        let sign_qram = QramInstance::new(signs).expect("sign cells are a power of two").with_bus_width(1);
        Self { n, key, target: target.to_string(), level_qrams, sign_qram, codec }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn target(&self) -> &str {
        &self.target
    }

    pub fn key_register(&self) -> Option<&str> {
        self.key.as_ref().map(|k| k.0.as_str())
    }

    fn key_bits(&self) -> usize {
        self.key.as_ref().map_or(0, |k| k.1)
    }

    pub fn codec(&self) -> &WordCodec {
        &self.codec
    }

    /// `(a, b)` register widths this plan needs.
    pub fn ancilla_widths(&self) -> (usize, usize) {
        self.codec.widths()
    }

    /// Memory cells of the level-`l` qRAM (`l = 0` is the roots).
    pub fn level_cells(&self, l: usize) -> &[f64] {
        self.level_qrams[l].cells()
    }

    pub fn sign_cells(&self) -> &[u64] {
        self.sign_qram.cells()
    }

    /// `[key][target][a][b][c]`.
    pub fn layout(&self) -> Result<RegisterLayout> {
        let (wa, wb) = self.ancilla_widths();
        let mut regs: Vec<(&str, usize)> = Vec::new();
        if let Some((k, w)) = &self.key {
            regs.push((k.as_str(), *w));
        }
        regs.extend([(self.target.as_str(), self.n), (REG_A, wa), (REG_B, wb), (REG_C, 1)]);
        RegisterLayout::new(&regs)
    }

    /// Key slices selecting `key · first prefix_bits of target`.
    fn control(&self, prefix_bits: usize) -> Vec<(&str, usize)> {
        let mut c = Vec::with_capacity(2);
        if let Some((k, w)) = &self.key {
            c.push((k.as_str(), *w));
        }
        c.push((self.target.as_str(), prefix_bits));
        c
    }
}

/// One superposed qRAM query issued by the pipeline.
#[derive(Debug, Clone, Serialize)]
pub struct QueryRecord {
    pub kind: &'static str,
    pub level: usize,
    pub metrics: QueryMetrics,
    /// `(address, retrieved word)` per branch.
    pub words: Vec<(String, f64)>,
    #[serde(skip)]
    pub logs: Vec<RoutingLog>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct PrepMetrics {
    pub qram_queries: usize,
    pub rotation_stages: usize,
    pub rotated_branches: usize,
    pub sign_stages: usize,
    /// Sum over queries of the per-branch crossing count.
    pub routing_ops: usize,
    pub max_entangled_switches: usize,
    /// Sum over queries of the max-over-branches parallel time.
    pub time_steps: usize,
    /// What the branch-wise simulation actually did, summed over branches.
    pub simulated_routing_ops: usize,
}

/// Everything a pipeline run records besides the state.
#[derive(Debug, Clone, Default)]
pub struct PrepLog {
    pub queries: Vec<QueryRecord>,
    pub trace: Vec<String>,
    pub metrics: PrepMetrics,
}

impl PrepLog {
    pub fn trace_text(&self) -> String {
        let mut s = String::new();
        for line in &self.trace {
            let _ = writeln!(s, "{line}");
        }
        s
    }

    fn record<W: Word>(
        &mut self,
        kind: &'static str,
        level: usize,
        header: String,
        q: crate::qram::BranchedQuery<W>,
    ) -> Vec<(BitPath, W)> {
        self.trace.push(header);
        for b in &q.branches {
            self.trace.push(format!(
                "  QUERY addr={} word={} routing_ops={} stores={} time_steps={}",
                b.address,
                fmt_num(b.word.as_f64()),
                b.log.forward.routing_ops,
                b.log.forward.stores,
                b.log.forward.time_steps + b.log.reverse.time_steps,
            ));
        }
        let m = &mut self.metrics;
        m.qram_queries += 1;
        m.routing_ops += q.metrics.routing_ops;
        m.max_entangled_switches = m.max_entangled_switches.max(q.metrics.entangled_switches);
        m.time_steps += q.metrics.time_steps;
        m.simulated_routing_ops += q.metrics.simulated_routing_ops;
        let words: Vec<(BitPath, W)> = q.branches.iter().map(|b| (b.address.clone(), b.word)).collect();
        self.queries.push(QueryRecord {
            kind,
            level,
            metrics: q.metrics,
            words: words.iter().map(|(p, w)| (p.to_string(), w.as_f64())).collect(),
            logs: q.branches.into_iter().map(|b| b.log).collect(),
        });
        words
    }
}

fn fmt_num(x: f64) -> String {
    format!("{x}")
}

fn join_cells<W: Word>(cells: &[W]) -> String {
    cells.iter().map(|c| fmt_num(c.as_f64())).collect::<Vec<_>>().join(",")
}

#[derive(Debug, Clone)]
pub struct PrepResult {
    pub state: StateVector,
    /// Expected amplitudes over the key and target registers.
    pub target: Vec<Complex64>,
    pub fidelity: f64,
    pub max_amplitude_error: f64,
    pub ancilla_clean: bool,
    pub log: PrepLog,
}

impl PrepResult {
    /// Prepared amplitudes over `registers`, ancillas projected to zero.
    pub fn amplitudes(&self, registers: &[&str]) -> Result<Vec<Complex64>> {
        self.state.reduced(registers)
    }
}

/// `a / b` clamped to `[0, 1]`. `b = 0` is a dead branch and an error.
pub fn rotation_probability(a: f64, b: f64) -> Result<f64> {
    if b.is_nan() || b <= 0.0 {
        return Err(Error::DeadBranch);
    }
    if a < 0.0 || a > b * (1.0 + 1e-12) {
        return Err(Error::InvalidProbability(a / b));
    }
    Ok((a / b).clamp(0.0, 1.0))
}

fn ensure_clean(s: &StateVector, reg: &str, tol: &Tolerance) -> Result<()> {
    if s.register_is_disentangled_zero(reg, tol.eps_amp)? {
        Ok(())
    } else {
        Err(Error::DirtyAncilla(reg.to_string()))
    }
}

/// Queries both qRAMs for level `l` and XORs the words into `a`/`b`.
fn query_ab(
    s: &mut StateVector,
    plan: &PrepPlan,
    l: usize,
    tol: &Tolerance,
    log: &mut PrepLog,
    unload: bool,
) -> Result<()> {
    if l == 0 || l > plan.n {
        return Err(Error::LevelOutOfRange { level: l, depth: plan.n });
    }
    let control = plan.control(l - 1);
    let key_width = plan.key_bits() + l - 1;
    let weights = s.key_weights(&control, tol.eps_amp)?;

    let b_branches: Vec<(BitPath, Complex64)> =
        weights.iter().map(|(&k, &w)| (BitPath::from_value(k, key_width), Complex64::new(w.sqrt(), 0.0))).collect();
    let a_branches: Vec<(BitPath, Complex64)> = b_branches.iter().map(|(p, amp)| (p.child(0), *amp)).collect();

    let (kind_a, kind_b) = if unload { ("UNLOAD_A", "UNLOAD_B") } else { ("LOAD_A", "LOAD_B") };
    let load = |s: &mut StateVector, log: &mut PrepLog, is_a: bool| -> Result<()> {
        let (qram, branches, kind, reg) = if is_a {
            (&plan.level_qrams[l], &a_branches, kind_a, REG_A)
        } else {
            (&plan.level_qrams[l - 1], &b_branches, kind_b, REG_B)
        };
        let q = query_superposed(qram, branches)?;
        let header = format!("LEVEL {l} {kind} cells={}", join_cells(qram.cells()));
        let words = log.record(kind, l, header, q);
        let mut codes = HashMap::with_capacity(words.len());
        for (addr, w) in words {
            let key = if is_a { addr.value() >> 1 } else { addr.value() };
            let code = if is_a { plan.codec.encode_a(l, w)? } else { plan.codec.encode_b(l, w)? };
            codes.insert(key, code);
        }
        s.xor_load(&control, &codes, reg)
    };

    if unload {
        load(s, log, false)?;
        load(s, log, true)?;
    } else {
        load(s, log, true)?;
        load(s, log, false)?;
    }
    Ok(())
}

/// Loads `a := B(p·0)` and `b := B(p)` on every branch, keyed on the first
/// `l - 1` target bits (plus the plan's key register).
pub fn load_ab_for_level(
    s: &mut StateVector,
    plan: &PrepPlan,
    l: usize,
    tol: &Tolerance,
    log: &mut PrepLog,
) -> Result<()> {
    ensure_clean(s, REG_A, tol)?;
    ensure_clean(s, REG_B, tol)?;
    query_ab(s, plan, l, tol, log, false)
}

/// Repeats the level-`l` queries so `a` and `b` return to zero.
pub fn unload_ab_for_level(
    s: &mut StateVector,
    plan: &PrepPlan,
    l: usize,
    tol: &Tolerance,
    log: &mut PrepLog,
) -> Result<()> {
    query_ab(s, plan, l, tol, log, true)?;
    ensure_clean(s, REG_A, tol)?;
    ensure_clean(s, REG_B, tol)
}

/// Rotates target qubit `l - 1` by `sqrt(a / b)`, read from the loaded
/// `a` and `b` registers.
pub fn rotate_level(s: &mut StateVector, plan: &PrepPlan, l: usize, tol: &Tolerance, log: &mut PrepLog) -> Result<()> {
    let control = plan.control(l - 1);
    let key_width = plan.key_bits() + l - 1;
    let a_vals = s.register_values_at(&control, REG_A, tol.eps_amp)?;
    let b_vals = s.register_values_at(&control, REG_B, tol.eps_amp)?;
    for (key, a) in &a_vals {
        let b = &b_vals[key];
        let (a, b) = (plan.codec.decode_a(l, a[0]), plan.codec.decode_b(l, b[0]));
        let p = rotation_probability(a, b)?;
        log.trace.push(format!("ROTATE prefix={} p={}", BitPath::from_value(*key, key_width), fmt_num(p)));
    }

    let target = s.layout().qubit(&plan.target, l - 1)?;
    let codec = &plan.codec;
    let rotated = s.register_controlled_rotation(target, REG_A, REG_B, |ac, bc| {
        let b = codec.decode_b(l, bc);
        if b == 0.0 {
            return Ok(None);
        }
        rotation_probability(codec.decode_a(l, ac), b).map(Some)
    })?;
    log.metrics.rotation_stages += 1;
    log.metrics.rotated_branches += rotated;
    Ok(())
}

/// Negates every branch whose sign cell is 1, leaving `c` clean.
pub fn apply_signs(
    s: &mut StateVector,
    plan: &PrepPlan,
    method: SignMethod,
    tol: &Tolerance,
    log: &mut PrepLog,
) -> Result<()> {
    ensure_clean(s, REG_C, tol)?;
    let control = plan.control(plan.n);
    let width = plan.key_bits() + plan.n;
    let branches: Vec<(BitPath, Complex64)> = s
        .key_weights(&control, tol.eps_amp)?
        .into_iter()
        .map(|(k, w)| (BitPath::from_value(k, width), Complex64::new(w.sqrt(), 0.0)))
        .collect();

    let sign_query = |log: &mut PrepLog, kind: &'static str| -> Result<HashMap<u64, u64>> {
        let q = query_superposed(&plan.sign_qram, &branches)?;
        let header = format!("SIGN {} cells={}", &kind[5..], join_cells(plan.sign_qram.cells()));
        let words = log.record(kind, plan.n, header, q);
        Ok(words.into_iter().map(|(p, w)| (p.value(), w)).collect())
    };

    let flags = sign_query(log, "SIGN_LOAD")?;
    match method {
        SignMethod::CnotFlip => {
            s.xor_load(&control, &flags, REG_C)?;
            s.z_on(s.layout().qubit(REG_C, 0)?);
            log.trace.push("SIGN Z c".to_string());
            let again = sign_query(log, "SIGN_UNLOAD")?;
            s.xor_load(&control, &again, REG_C)?;
        }
        SignMethod::PhaseKickback => {
            s.phase_oracle(&control, &flags)?;
            log.trace.push("SIGN Z bus".to_string());
            sign_query(log, "SIGN_UNLOAD")?;
        }
    }
    log.metrics.sign_stages += 1;
    ensure_clean(s, REG_C, tol)
}

/// All levels followed by the sign stage.
pub fn run_plan(s: &mut StateVector, plan: &PrepPlan, opts: &PrepOptions, log: &mut PrepLog) -> Result<()> {
    let tol = &opts.tolerance;
    for l in 1..=plan.n {
        load_ab_for_level(s, plan, l, tol, log)?;
        rotate_level(s, plan, l, tol, log)?;
        unload_ab_for_level(s, plan, l, tol, log)?;
    }
    apply_signs(s, plan, opts.sign_method, tol, log)
}

fn finish(
    state: StateVector,
    registers: &[&str],
    target: Vec<Complex64>,
    tol: &Tolerance,
    log: PrepLog,
) -> Result<PrepResult> {
    let ancilla_clean = [REG_A, REG_B, REG_C]
        .iter()
        .map(|r| state.register_is_disentangled_zero(r, tol.eps_amp))
        .collect::<Result<Vec<bool>>>()?
        .into_iter()
        .all(|x| x);
    let got = state.reduced(registers)?;
    let fidelity = crate::simulator::fidelity(state.amplitudes(), &state.layout().embed(registers, &target)?)?;
    let max_amplitude_error = got.iter().zip(&target).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    Ok(PrepResult { state, target, fidelity, max_amplitude_error, ancilla_clean, log })
}

fn normalized(values: &[f64], norm_sqr: f64) -> Vec<Complex64> {
    let n = norm_sqr.sqrt();
    values.iter().map(|v| Complex64::new(v / n, 0.0)).collect()
}

/// Prepares `v / |v|` from its tree into register `dir`.
pub fn prepare_vector(tree: &KpTree, opts: &PrepOptions) -> Result<PrepResult> {
    if tree.root().is_nan() || tree.root() <= 0.0 {
        return Err(Error::ZeroVector);
    }
    let plan = PrepPlan::for_vector(tree);
    let mut s = StateVector::init_basis(plan.layout()?, &[])?;
    let mut log = PrepLog::default();
    run_plan(&mut s, &plan, opts, &mut log)?;
    let target = normalized(&tree.signed_leaves(), tree.root());
    finish(s, &["dir"], target, &opts.tolerance, log)
}

/// `|i>|0> -> |i> M_i / |M_i|` over registers `row` and `col`.
pub fn prepare_row(forest: &KpForest, i: usize, opts: &PrepOptions) -> Result<PrepResult> {
    let tree = forest.row_tree(i)?;
    if tree.root().is_nan() || tree.root() <= 0.0 {
        return Err(Error::ZeroRow(i));
    }
    let plan = PrepPlan::for_rows(forest);
    let mut s = StateVector::init_basis(plan.layout()?, &[("row", i as u64)])?;
    let mut log = PrepLog::default();
    run_plan(&mut s, &plan, opts, &mut log)?;
    let cols = 1usize << forest.col_depth();
    let mut target = vec![Complex64::new(0.0, 0.0); forest.rows() * cols];
    for (j, a) in normalized(&tree.signed_leaves(), tree.root()).into_iter().enumerate() {
        target[i * cols + j] = a;
    }
    finish(s, &["row", "col"], target, &opts.tolerance, log)
}

/// `|0> -> sum_i |M_i| / |M|_F |i>` over register `row`.
pub fn prepare_norms(forest: &KpForest, opts: &PrepOptions) -> Result<PrepResult> {
    let tree = forest.norm_tree();
    if tree.root().is_nan() || tree.root() <= 0.0 {
        return Err(Error::ZeroMatrix);
    }
    let plan = PrepPlan::for_norms(forest);
    let mut s = StateVector::init_basis(plan.layout()?, &[])?;
    let mut log = PrepLog::default();
    run_plan(&mut s, &plan, opts, &mut log)?;
    let target = normalized(&tree.signed_leaves(), tree.root());
    finish(s, &["row"], target, &opts.tolerance, log)
}

/// Row norms into `row`, then the row map keyed on it:
/// `sum_ij M_ij / |M|_F |i>|j>`.
pub fn prepare_matrix(forest: &KpForest, opts: &PrepOptions) -> Result<PrepResult> {
    if forest.norm_tree().root().is_nan() || forest.norm_tree().root() <= 0.0 {
        return Err(Error::ZeroMatrix);
    }
    let norms = PrepPlan::for_norms(forest);
    let rows = PrepPlan::for_rows(forest);
    let (na, nb) = norms.ancilla_widths();
    let (ra, rb) = rows.ancilla_widths();
    let layout = RegisterLayout::new(&[
        ("row", forest.row_depth()),
        ("col", forest.col_depth()),
        (REG_A, na.max(ra)),
        (REG_B, nb.max(rb)),
        (REG_C, 1),
    ])?;
    let mut s = StateVector::init_basis(layout, &[])?;
    let mut log = PrepLog::default();
    run_plan(&mut s, &norms, opts, &mut log)?;
    run_plan(&mut s, &rows, opts, &mut log)?;

    let total = forest.norm_tree().root().sqrt();
    let target =
        forest.row_trees().iter().flat_map(|t| t.signed_leaves()).map(|v| Complex64::new(v / total, 0.0)).collect();
    finish(s, &["row", "col"], target, &opts.tolerance, log)
}
