//! Finite Kripke frames and models, truth evaluation, and validity.
//!
//! World sets are bitsets; each relation is stored as one successor bitset
//! per source world, so diamonds evaluate word-parallel. Frame validity
//! enumerates valuations only over the variables that actually occur in the
//! formula and refuses (rather than truncates) when the enumeration would
//! exceed the configured bit budget.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::bits::Bits;
use crate::formula::{Formula, Shape, Signature};
use crate::{Error, Result};

/// Default bound on `|vars(f)| * worlds` for valuation enumeration.
pub const DEFAULT_VALUATION_BITS: usize = 24;

/// A finite Kripke frame with `n` relations over worlds `0..worlds`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    sig: Signature,
    worlds: usize,
    /// `relations[i][x]` is the set of `R_i`-successors of `x`.
    relations: Vec<Vec<Bits>>,
}

impl Frame {
    pub fn new(sig: Signature, worlds: usize) -> Self {
        assert!(worlds >= 1, "frames are nonempty");
        Frame {
            sig,
            worlds,
            relations: (0..sig.n())
                .map(|_| vec![Bits::empty(worlds); worlds])
                .collect(),
        }
    }

    pub fn from_pairs(n: usize, worlds: usize, pairs: &[Vec<(usize, usize)>]) -> Result<Self> {
        if n < 1 {
            return Err(Error::BadFrame("n must be at least 1".into()));
        }
        if worlds < 1 {
            return Err(Error::BadFrame("worlds must be at least 1".into()));
        }
        if pairs.len() != n {
            return Err(Error::BadFrame(format!(
                "expected {n} relations, got {}",
                pairs.len()
            )));
        }
        let mut fr = Frame::new(Signature::new(n), worlds);
        for (i, rel) in pairs.iter().enumerate() {
            for &(u, v) in rel {
                if u >= worlds || v >= worlds {
                    return Err(Error::BadFrame(format!(
                        "pair ({u},{v}) out of range for {worlds} worlds"
                    )));
                }
                if fr.relations[i][u].get(v) {
                    return Err(Error::BadFrame(format!(
                        "duplicate pair ({u},{v}) in relation {i}"
                    )));
                }
                fr.relations[i][u].set(v, true);
            }
        }
        Ok(fr)
    }

    /// Unimodal frame from a single pair list.
    pub fn unimodal(worlds: usize, pairs: &[(usize, usize)]) -> Self {
        Frame::from_pairs(1, worlds, &[pairs.to_vec()]).expect("valid unimodal frame")
    }

    pub fn sig(&self) -> Signature {
        self.sig
    }

    pub fn worlds(&self) -> usize {
        self.worlds
    }

    pub fn add_edge(&mut self, modality: usize, u: usize, v: usize) {
        self.relations[modality][u].set(v, true);
    }

    pub fn has_edge(&self, modality: usize, u: usize, v: usize) -> bool {
        self.relations[modality][u].get(v)
    }

    pub fn successors(&self, modality: usize, u: usize) -> &Bits {
        &self.relations[modality][u]
    }

    /// The union relation `R_F = R_0 | ... | R_{n-1}` as adjacency sets.
    pub fn union_relation(&self) -> Vec<Bits> {
        let mut out = vec![Bits::empty(self.worlds); self.worlds];
        for rel in &self.relations {
            for (x, succ) in rel.iter().enumerate() {
                out[x].union_with(succ);
            }
        }
        out
    }

    /// All edges of one relation as sorted pairs.
    pub fn pairs(&self, modality: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (u, succ) in self.relations[modality].iter().enumerate() {
            for v in succ.iter_ones() {
                out.push((u, v));
            }
        }
        out
    }

    /// Restriction to a subset of worlds; returns the frame together with
    /// the map from old world indices to new ones.
    pub fn restrict(&self, keep: &Bits) -> (Frame, HashMap<usize, usize>) {
        let kept: Vec<usize> = keep.iter_ones().collect();
        assert!(!kept.is_empty(), "restriction must be nonempty");
        let map: HashMap<usize, usize> = kept.iter().enumerate().map(|(n, &o)| (o, n)).collect();
        let mut fr = Frame::new(self.sig, kept.len());
        for i in 0..self.sig.n() {
            for (new_u, &old_u) in kept.iter().enumerate() {
                for old_v in self.relations[i][old_u].iter_ones() {
                    if let Some(&new_v) = map.get(&old_v) {
                        fr.relations[i][new_u].set(new_v, true);
                    }
                }
            }
        }
        (fr, map)
    }

    /// Graphviz DOT rendering; edge labels carry the modality index.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph frame {\n");
        for w in 0..self.worlds {
            s.push_str(&format!("  {w};\n"));
        }
        for i in 0..self.sig.n() {
            for (u, v) in self.pairs(i) {
                s.push_str(&format!("  {u} -> {v} [label=\"{i}\"];\n"));
            }
        }
        s.push_str("}\n");
        s
    }
}

/// Serialized frame file: `{"n": .., "worlds": .., "relations": [[[u,v],..],..]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrameFile {
    pub n: usize,
    pub worlds: usize,
    pub relations: Vec<Vec<[usize; 2]>>,
}

impl FrameFile {
    pub fn from_frame(fr: &Frame) -> Self {
        FrameFile {
            n: fr.sig().n(),
            worlds: fr.worlds(),
            relations: (0..fr.sig().n())
                .map(|i| fr.pairs(i).into_iter().map(|(u, v)| [u, v]).collect())
                .collect(),
        }
    }

    pub fn to_frame(&self) -> Result<Frame> {
        let pairs: Vec<Vec<(usize, usize)>> = self
            .relations
            .iter()
            .map(|rel| rel.iter().map(|p| (p[0], p[1])).collect())
            .collect();
        Frame::from_pairs(self.n, self.worlds, &pairs)
    }
}

/// Parse a frame from JSON text.
pub fn frame_from_json(text: &str) -> Result<Frame> {
    let file: FrameFile = serde_json::from_str(text)?;
    file.to_frame()
}

/// Canonical JSON for a frame: sorted pairs, compact formatting.
pub fn frame_to_json(fr: &Frame) -> String {
    serde_json::to_string(&FrameFile::from_frame(fr)).expect("frame serializes")
}

/// Sets of worlds satisfying each variable `p_0..p_{k-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Valuation {
    sets: Vec<Bits>,
}

impl Valuation {
    pub fn new(sets: Vec<Bits>) -> Self {
        Valuation { sets }
    }

    pub fn empty(k: usize, worlds: usize) -> Self {
        Valuation {
            sets: vec![Bits::empty(worlds); k],
        }
    }

    pub fn k(&self) -> usize {
        self.sets.len()
    }

    pub fn get(&self, var: usize) -> &Bits {
        &self.sets[var]
    }

    pub fn set(&mut self, var: usize, worlds: Bits) {
        self.sets[var] = worlds;
    }
}

/// A frame with a valuation for variables `p_0..p_{k-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    pub frame: Frame,
    pub valuation: Valuation,
}

impl Model {
    pub fn new(frame: Frame, valuation: Valuation) -> Self {
        Model { frame, valuation }
    }

    pub fn k(&self) -> usize {
        self.valuation.k()
    }

    /// The set of worlds where `f` is true.
    pub fn truth_set(&self, f: &Formula) -> Result<Bits> {
        check_ranges(f, self.k(), self.frame.sig())?;
        let mut memo: HashMap<usize, Bits> = HashMap::new();
        Ok(self.eval(f, &mut memo))
    }

    /// Truth at a single world.
    pub fn satisfies(&self, world: usize, f: &Formula) -> Result<bool> {
        Ok(self.truth_set(f)?.get(world))
    }

    fn eval(&self, f: &Formula, memo: &mut HashMap<usize, Bits>) -> Bits {
        if let Some(b) = memo.get(&f.ptr_key()) {
            return b.clone();
        }
        let out = match f.shape() {
            Shape::Var(i) => self.valuation.get(i).clone(),
            Shape::Falsum => Bits::empty(self.frame.worlds()),
            Shape::Implies(a, b) => {
                let va = self.eval(a, memo);
                let vb = self.eval(b, memo);
                va.complement().union(&vb)
            }
            Shape::Diamond(i, a) => {
                let va = self.eval(a, memo);
                let mut out = Bits::empty(self.frame.worlds());
                for x in 0..self.frame.worlds() {
                    if self.frame.successors(i, x).intersects(&va) {
                        out.set(x, true);
                    }
                }
                out
            }
        };
        memo.insert(f.ptr_key(), out.clone());
        out
    }

    /// Restriction of the model to a subset of worlds.
    pub fn restrict(&self, keep: &Bits) -> (Model, HashMap<usize, usize>) {
        let (frame, map) = self.frame.restrict(keep);
        let mut valuation = Valuation::empty(self.k(), frame.worlds());
        for var in 0..self.k() {
            let mut set = Bits::empty(frame.worlds());
            for old in self.valuation.get(var).iter_ones() {
                if let Some(&new) = map.get(&old) {
                    set.set(new, true);
                }
            }
            valuation.set(var, set);
        }
        (Model { frame, valuation }, map)
    }
}

fn check_ranges(f: &Formula, k: usize, sig: Signature) -> Result<()> {
    if let Some(&v) = f.variables().iter().next_back() {
        if v >= k {
            return Err(Error::VariableOutOfRange { index: v, k });
        }
    }
    if let Some(m) = f.max_modality() {
        sig.check_modality(m)?;
    }
    Ok(())
}

/// Reachability bound for `reach`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reach {
    Steps(usize),
    Star,
}

/// `R_F^{<=m}` (with `R^0` the identity) or the reflexive-transitive closure
/// `R_F^*`, as per-source successor sets.
pub fn reach(fr: &Frame, bound: Reach) -> Vec<Bits> {
    let union = fr.union_relation();
    let n = fr.worlds();
    let identity: Vec<Bits> = (0..n).map(|x| Bits::singleton(n, x)).collect();
    match bound {
        Reach::Steps(m) => {
            // acc = R^{<=i}, power = R^i
            let mut acc = identity.clone();
            let mut power = identity;
            for _ in 0..m {
                power = compose(&power, &union);
                for (a, p) in acc.iter_mut().zip(&power) {
                    a.union_with(p);
                }
            }
            acc
        }
        Reach::Star => {
            let mut acc = identity;
            loop {
                let next = compose(&acc, &union);
                let mut changed = false;
                for (a, nx) in acc.iter_mut().zip(&next) {
                    if !nx.is_subset(a) {
                        a.union_with(nx);
                        changed = true;
                    }
                }
                if !changed {
                    return acc;
                }
            }
        }
    }
}

/// Relation composition: `(a . b)(x) = union of b(y) for y in a(x)`.
fn compose(a: &[Bits], b: &[Bits]) -> Vec<Bits> {
    a.iter()
        .map(|succ| {
            let mut out = Bits::empty(b.len());
            for y in succ.iter_ones() {
                out.union_with(&b[y]);
            }
            out
        })
        .collect()
}

pub fn relation_pairs(rel: &[Bits]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (x, succ) in rel.iter().enumerate() {
        for y in succ.iter_ones() {
            out.push((x, y));
        }
    }
    out
}

pub fn relation_eq(a: &[Bits], b: &[Bits]) -> bool {
    a == b
}

/// Compiled form of a formula for fast repeated evaluation over one frame
/// with varying valuations. Worlds are represented as bits of a `u64`.
pub(crate) struct CompiledFormula {
    /// Postorder ops; operands are indices of earlier slots.
    ops: Vec<CompiledOp>,
    pub vars: Vec<usize>,
}

pub(crate) enum CompiledOp {
    /// Index into the (dense) valuation array.
    Var(usize),
    Falsum,
    Implies(usize, usize),
    Diamond(usize, usize),
}

impl CompiledFormula {
    pub fn compile(f: &Formula) -> Self {
        let vars: Vec<usize> = f.variables().into_iter().collect();
        let var_slot: HashMap<usize, usize> =
            vars.iter().enumerate().map(|(s, &v)| (v, s)).collect();
        let mut ops = Vec::new();
        let mut memo: HashMap<usize, usize> = HashMap::new();
        fn go(
            f: &Formula,
            ops: &mut Vec<CompiledOp>,
            memo: &mut HashMap<usize, usize>,
            var_slot: &HashMap<usize, usize>,
        ) -> usize {
            if let Some(&i) = memo.get(&f.ptr_key()) {
                return i;
            }
            let op = match f.shape() {
                Shape::Var(v) => CompiledOp::Var(var_slot[&v]),
                Shape::Falsum => CompiledOp::Falsum,
                Shape::Implies(a, b) => {
                    let ia = go(a, ops, memo, var_slot);
                    let ib = go(b, ops, memo, var_slot);
                    CompiledOp::Implies(ia, ib)
                }
                Shape::Diamond(i, a) => {
                    let ia = go(a, ops, memo, var_slot);
                    CompiledOp::Diamond(i, ia)
                }
            };
            ops.push(op);
            let idx = ops.len() - 1;
            memo.insert(f.ptr_key(), idx);
            idx
        }
        go(f, &mut ops, &mut memo, &var_slot);
        CompiledFormula { ops, vars }
    }

    /// Evaluate over successor masks (one `u64` per world per modality);
    /// `valuation[slot]` is the world mask of the slot's variable. Returns
    /// the truth mask of the whole formula.
    pub fn eval_u64(&self, succ: &[Vec<u64>], worlds: usize, valuation: &[u64], buf: &mut Vec<u64>) -> u64 {
        let full: u64 = if worlds == 64 {
            u64::MAX
        } else {
            (1u64 << worlds) - 1
        };
        buf.clear();
        for op in &self.ops {
            let v = match *op {
                CompiledOp::Var(slot) => valuation[slot],
                CompiledOp::Falsum => 0,
                CompiledOp::Implies(a, b) => (!buf[a] | buf[b]) & full,
                CompiledOp::Diamond(i, a) => {
                    let target = buf[a];
                    let mut out = 0u64;
                    for (x, &s) in succ[i].iter().enumerate() {
                        if s & target != 0 {
                            out |= 1 << x;
                        }
                    }
                    out
                }
            };
            buf.push(v);
        }
        *buf.last().expect("nonempty program")
    }
}

/// Successor masks of a frame with at most 64 worlds.
pub(crate) fn succ_masks(fr: &Frame) -> Vec<Vec<u64>> {
    assert!(fr.worlds() <= 64);
    (0..fr.sig().n())
        .map(|i| {
            (0..fr.worlds())
                .map(|x| {
                    let mut m = 0u64;
                    for y in fr.successors(i, x).iter_ones() {
                        m |= 1 << y;
                    }
                    m
                })
                .collect()
        })
        .collect()
}

/// Frame validity: `f` is true at every world under every valuation of the
/// variables occurring in `f`. Enumeration is exhaustive over
/// `2^(|vars| * worlds)` valuations and refuses beyond `bits_limit`.
pub fn frame_validates_with(fr: &Frame, f: &Formula, bits_limit: usize) -> Result<bool> {
    if let Some(m) = f.max_modality() {
        fr.sig().check_modality(m)?;
    }
    let vars: Vec<usize> = f.variables().into_iter().collect();
    let bits = vars.len() * fr.worlds();
    if bits > bits_limit {
        return Err(Error::SizeLimit {
            bits,
            limit: bits_limit,
        });
    }
    let worlds = fr.worlds();
    if worlds <= 64 {
        let compiled = CompiledFormula::compile(f);
        let succ = succ_masks(fr);
        let full: u64 = if worlds == 64 {
            u64::MAX
        } else {
            (1u64 << worlds) - 1
        };
        let nv = compiled.vars.len();
        let mut valuation = vec![0u64; nv];
        let mut buf = Vec::with_capacity(compiled.ops.len());
        for assignment in 0u64..(1u64 << bits) {
            for (slot, val) in valuation.iter_mut().enumerate() {
                *val = (assignment >> (slot * worlds)) & full;
            }
            if compiled.eval_u64(&succ, worlds, &valuation, &mut buf) != full {
                return Ok(false);
            }
        }
        Ok(true)
    } else {
        // vars * worlds <= bits_limit and worlds > 64 forces vars = 0
        let model = Model::new(fr.clone(), Valuation::empty(0, worlds));
        Ok(model.truth_set(f)?.count() == worlds)
    }
}

/// `frame_validates_with` at the default bit budget.
pub fn frame_validates(fr: &Frame, f: &Formula) -> Result<bool> {
    frame_validates_with(fr, f, DEFAULT_VALUATION_BITS)
}
