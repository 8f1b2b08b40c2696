//! Finite free algebras of frame-class logics and their dual canonical
//! models.
//!
//! A frame-class logic is given by finitely many finite frames over a shared
//! signature. Its k-generated Lindenbaum-Tarski algebra is realized as the
//! subalgebra of the product of complex algebras, one factor per (frame,
//! valuation-of-k-variables) pair, generated by the variable diagonals. The
//! subalgebra is computed in two stages:
//!
//! 1. a partition of the coordinate set is refined until every diamond image
//!    of a block is a union of blocks; the blocks are exactly the atoms, so
//!    the dual canonical model (atoms, relations, valuation) is available
//!    without enumerating elements;
//! 2. when element labels are needed, a breadth-first worklist closure over
//!    atom masks enumerates all elements, labelling each with the formula
//!    that first produced it.
//!
//! Stage 1 alone powers the decision procedures; stage 2 is capped and backs
//! everything that needs defining formulas.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::analysis::transitivity_degree;
use crate::bits::Bits;
use crate::formula::{Formula, Signature};
use crate::kripke::{frame_to_json, Frame, FrameFile, Model, Valuation};
use crate::{Error, Result};

/// A logic presented by a nonempty finite list of finite frames over a
/// shared signature; `m` is the least bound making the compound diamond act
/// as reflexive-transitive reachability on every frame of the class.
#[derive(Debug, Clone)]
pub struct FrameClassLogic {
    frames: Vec<Frame>,
    sig: Signature,
    m: usize,
}

impl FrameClassLogic {
    pub fn new(frames: Vec<Frame>) -> Result<Self> {
        let first = frames
            .first()
            .ok_or_else(|| Error::BadFrame("a frame class needs at least one frame".into()))?;
        let sig = first.sig();
        if frames.iter().any(|f| f.sig() != sig) {
            return Err(Error::BadFrame(
                "all frames of a class must share one signature".into(),
            ));
        }
        let m = frames.iter().map(transitivity_degree).max().unwrap_or(0);
        Ok(FrameClassLogic { frames, sig, m })
    }

    pub fn frames(&self) -> &[Frame] {
        &self.frames
    }

    pub fn sig(&self) -> Signature {
        self.sig
    }

    /// Transitivity degree of the logic.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Canonical serialization of the class, used as the cache key.
    pub fn fingerprint(&self) -> String {
        let files: Vec<FrameFile> = self.frames.iter().map(FrameFile::from_frame).collect();
        serde_json::to_string(&files).expect("frames serialize")
    }
}

/// Budgets for algebra construction.
#[derive(Debug, Clone, Copy)]
pub struct BuildLimits {
    /// Maximal number of elements enumerated by the labelled closure.
    pub cap: usize,
    /// Maximal number of product coordinates.
    pub coord_budget: usize,
}

impl Default for BuildLimits {
    fn default() -> Self {
        BuildLimits {
            cap: 100_000,
            coord_budget: 1 << 20,
        }
    }
}

/// The product coordinate space: one coordinate per (frame, valuation,
/// world) triple, ordered by frame index, then valuation index, then world.
/// A valuation index encodes world membership for each variable: bit
/// `j * worlds + w` set means `w` satisfies `p_j`.
#[derive(Debug, Clone)]
pub struct CoordSpace {
    frames: Vec<Frame>,
    k: usize,
    offsets: Vec<usize>,
    nvals: Vec<usize>,
    total: usize,
    /// `succ[t][i][w]`: successor mask of world `w` under `R_i` in frame `t`.
    succ: Vec<Vec<Vec<u64>>>,
}

impl CoordSpace {
    fn new(logic: &FrameClassLogic, k: usize, budget: usize) -> Result<Self> {
        let mut offsets = Vec::new();
        let mut nvals = Vec::new();
        let mut total: usize = 0;
        for fr in logic.frames() {
            let w = fr.worlds();
            if w > 64 {
                return Err(Error::BadFrame(
                    "algebra construction supports at most 64 worlds per frame".into(),
                ));
            }
            let bits = k * w;
            if bits > 40 {
                return Err(Error::BitBudget {
                    coords: usize::MAX,
                    budget,
                });
            }
            let nv = 1usize << bits;
            offsets.push(total);
            nvals.push(nv);
            total = total
                .checked_add(nv * w)
                .ok_or(Error::BitBudget { coords: usize::MAX, budget })?;
            if total > budget {
                return Err(Error::BitBudget {
                    coords: total,
                    budget,
                });
            }
        }
        let succ = logic
            .frames()
            .iter()
            .map(|fr| {
                (0..fr.sig().n())
                    .map(|i| {
                        (0..fr.worlds())
                            .map(|w| {
                                let mut m = 0u64;
                                for y in fr.successors(i, w).iter_ones() {
                                    m |= 1 << y;
                                }
                                m
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Ok(CoordSpace {
            frames: logic.frames().to_vec(),
            k,
            offsets,
            nvals,
            total,
            succ,
        })
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Decode a coordinate into (frame index, valuation index, world).
    pub fn decode(&self, coord: usize) -> (usize, usize, usize) {
        let t = match self.offsets.binary_search(&coord) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        let w = self.frames[t].worlds();
        let rel = coord - self.offsets[t];
        (t, rel / w, rel % w)
    }

    /// The model of one (frame, valuation) block.
    pub fn model_at(&self, t: usize, v: usize) -> Model {
        let fr = self.frames[t].clone();
        let w = fr.worlds();
        let mut val = Valuation::empty(self.k, w);
        for j in 0..self.k {
            let mut set = Bits::empty(w);
            for world in 0..w {
                if v >> (j * w + world) & 1 == 1 {
                    set.set(world, true);
                }
            }
            val.set(j, set);
        }
        Model::new(fr, val)
    }

    /// Diagonal generator of variable `j`.
    fn generator(&self, j: usize) -> Bits {
        let mut out = Bits::empty(self.total);
        for (t, fr) in self.frames.iter().enumerate() {
            let w = fr.worlds();
            for v in 0..self.nvals[t] {
                let base = self.offsets[t] + v * w;
                for world in 0..w {
                    if v >> (j * w + world) & 1 == 1 {
                        out.set(base + world, true);
                    }
                }
            }
        }
        out
    }

    /// Coordinatewise diamond: within each block, a world holds the result
    /// iff one of its successors is in the argument.
    pub fn diamond(&self, i: usize, x: &Bits) -> Bits {
        let mut out = Bits::empty(self.total);
        for (t, fr) in self.frames.iter().enumerate() {
            let w = fr.worlds();
            let succ = &self.succ[t][i];
            for v in 0..self.nvals[t] {
                let base = self.offsets[t] + v * w;
                let block = x.extract(base, w);
                if block == 0 {
                    continue;
                }
                let mut img = 0u64;
                for (world, &s) in succ.iter().enumerate() {
                    if s & block != 0 {
                        img |= 1 << world;
                    }
                }
                out.inject(base, w, img);
            }
        }
        out
    }

    /// The coordinate vector a formula denotes: its truth profile over every
    /// (frame, valuation) block.
    pub fn formula_bits(&self, f: &Formula) -> Result<Bits> {
        let mut out = Bits::empty(self.total);
        for t in 0..self.frames.len() {
            let w = self.frames[t].worlds();
            for v in 0..self.nvals[t] {
                let model = self.model_at(t, v);
                let ts = model.truth_set(f)?;
                let base = self.offsets[t] + v * w;
                out.inject(base, w, ts.extract(0, w));
            }
        }
        Ok(out)
    }
}

/// Refine the coordinate partition until every diamond image of a block is a
/// union of blocks. The resulting blocks are the atoms of the generated
/// subalgebra; they are returned sorted lexicographically by bit vector.
fn stable_partition(space: &CoordSpace) -> Vec<Bits> {
    let total = space.total();
    let mut blocks: Vec<Bits> = if space.k() == 0 {
        vec![Bits::full(total)]
    } else {
        // group coordinates by their generator signature, in first-seen order
        let gens: Vec<Bits> = (0..space.k()).map(|j| space.generator(j)).collect();
        let mut index: HashMap<u64, usize> = HashMap::new();
        let mut out: Vec<Bits> = Vec::new();
        for c in 0..total {
            let mut sig = 0u64;
            for (j, g) in gens.iter().enumerate() {
                if g.get(c) {
                    sig |= 1 << j;
                }
            }
            let slot = *index.entry(sig).or_insert_with(|| {
                out.push(Bits::empty(total));
                out.len() - 1
            });
            out[slot].set(c, true);
        }
        out
    };

    let n = space.frames[0].sig().n();
    loop {
        let mut changed = false;
        let snapshot = blocks.clone();
        for block in &snapshot {
            for i in 0..n {
                let img = space.diamond(i, block);
                let mut next = Vec::with_capacity(blocks.len());
                for c in blocks.drain(..) {
                    let inter = c.intersection(&img);
                    if inter.is_empty_set() || inter == c {
                        next.push(c);
                    } else {
                        let diff = c.difference(&img);
                        next.push(inter);
                        next.push(diff);
                        changed = true;
                    }
                }
                blocks = next;
            }
        }
        if !changed {
            break;
        }
    }
    blocks.sort_by(|a, b| a.lex_cmp(b));
    blocks
}

struct DualParts {
    space: CoordSpace,
    atoms: Vec<Bits>,
    /// `dia_atom[i][a]`: atom mask of the diamond image of atom `a`.
    dia_atom: Vec<Vec<u64>>,
    /// `gen_mask[j]`: atom mask of generator `j`.
    gen_mask: Vec<u64>,
}

fn build_dual_parts(logic: &FrameClassLogic, k: usize, limits: &BuildLimits) -> Result<DualParts> {
    let space = CoordSpace::new(logic, k, limits.coord_budget)?;
    let atoms = stable_partition(&space);
    if atoms.len() > 63 {
        return Err(Error::CapExceeded {
            size: usize::MAX,
            cap: limits.cap,
        });
    }
    let atom_mask_of = |x: &Bits| -> u64 {
        let mut m = 0u64;
        for (a, ab) in atoms.iter().enumerate() {
            if ab.intersects(x) {
                debug_assert!(ab.is_subset(x), "partition must be stable");
                m |= 1 << a;
            }
        }
        m
    };
    let n = logic.sig().n();
    let dia_atom: Vec<Vec<u64>> = (0..n)
        .map(|i| {
            atoms
                .iter()
                .map(|ab| atom_mask_of(&space.diamond(i, ab)))
                .collect()
        })
        .collect();
    let gen_mask: Vec<u64> = (0..k).map(|j| atom_mask_of(&space.generator(j))).collect();
    Ok(DualParts {
        space,
        atoms,
        dia_atom,
        gen_mask,
    })
}

fn dual_model_from_parts(parts: &DualParts, logic: &FrameClassLogic, k: usize) -> Model {
    let b = parts.atoms.len();
    let mut frame = Frame::new(logic.sig(), b);
    for i in 0..logic.sig().n() {
        for target in 0..b {
            let img = parts.dia_atom[i][target];
            for a in 0..b {
                // a R_i target iff atom a lies under the diamond of target
                if img >> a & 1 == 1 {
                    frame.add_edge(i, a, target);
                }
            }
        }
    }
    let mut valuation = Valuation::empty(k, b);
    for j in 0..k {
        let mut set = Bits::empty(b);
        for a in 0..b {
            if parts.gen_mask[j] >> a & 1 == 1 {
                set.set(a, true);
            }
        }
        valuation.set(j, set);
    }
    Model::new(frame, valuation)
}

/// The finite k-canonical model of a frame-class logic, without element
/// labels: points are the atoms of the k-generated free algebra, in
/// lexicographic bit-vector order.
#[derive(Debug, Clone)]
pub struct DualModel {
    pub model: Model,
    pub k: usize,
    pub m: usize,
}

/// Build the dual canonical model directly from the atom partition; no
/// element enumeration, so only the coordinate budget applies.
pub fn canonical_dual(
    logic: &FrameClassLogic,
    k: usize,
    limits: &BuildLimits,
) -> Result<DualModel> {
    let parts = build_dual_parts(logic, k, limits)?;
    Ok(DualModel {
        model: dual_model_from_parts(&parts, logic, k),
        k,
        m: logic.m(),
    })
}

/// One element of a built free algebra: its coordinate vector and the
/// formula that first produced it.
#[derive(Debug, Clone)]
pub struct AlgebraElement {
    pub bits: Bits,
    pub label: Formula,
}

/// The k-generated free algebra of a frame-class logic, fully enumerated
/// with a defining formula for every element.
pub struct FreeAlgebra {
    logic: FrameClassLogic,
    k: usize,
    space: CoordSpace,
    atoms: Vec<Bits>,
    dia_atom: Vec<Vec<u64>>,
    gen_mask: Vec<u64>,
    /// Elements in discovery order, as atom masks.
    masks: Vec<u64>,
    labels: Vec<Formula>,
    index_of_mask: HashMap<u64, usize>,
}

/// Worklist closure of the generators and the bottom element under
/// complement, binary intersection, and the diamonds, breadth-first by
/// operation-application depth; the first formula deriving an element is
/// kept as its label.
pub fn build_free_algebra(
    logic: &FrameClassLogic,
    k: usize,
    limits: &BuildLimits,
) -> Result<FreeAlgebra> {
    let parts = build_dual_parts(logic, k, limits)?;
    let b = parts.atoms.len();
    let size = 1usize
        .checked_shl(b as u32)
        .filter(|&s| s <= limits.cap)
        .ok_or(Error::CapExceeded {
            size: 1usize.checked_shl(b as u32).unwrap_or(usize::MAX),
            cap: limits.cap,
        })?;
    let full: u64 = if b == 0 { 0 } else { (1u64 << b) - 1 };
    let n = logic.sig().n();

    let mut seen = vec![false; size.max(1)];
    let mut masks: Vec<u64> = Vec::with_capacity(size);
    let mut labels: Vec<Formula> = Vec::with_capacity(size);
    let push = |mask: u64,
                    label: Formula,
                    seen: &mut Vec<bool>,
                    masks: &mut Vec<u64>,
                    labels: &mut Vec<Formula>| {
        if !seen[mask as usize] {
            seen[mask as usize] = true;
            masks.push(mask);
            labels.push(label);
        }
    };

    push(0, Formula::falsum(), &mut seen, &mut masks, &mut labels);
    for j in 0..k {
        push(
            parts.gen_mask[j],
            Formula::var(j),
            &mut seen,
            &mut masks,
            &mut labels,
        );
    }

    let dia_of = |i: usize, mask: u64| -> u64 {
        let mut out = 0u64;
        let mut rest = mask;
        while rest != 0 {
            let a = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            out |= parts.dia_atom[i][a];
        }
        out
    };

    let mut i = 0;
    while i < masks.len() {
        let e = masks[i];
        let label = labels[i].clone();
        push(
            !e & full,
            Formula::not(label.clone()),
            &mut seen,
            &mut masks,
            &mut labels,
        );
        for mi in 0..n {
            push(
                dia_of(mi, e),
                Formula::diamond(mi, label.clone()),
                &mut seen,
                &mut masks,
                &mut labels,
            );
        }
        for j in 0..=i {
            let cand = e & masks[j];
            if !seen[cand as usize] {
                seen[cand as usize] = true;
                masks.push(cand);
                labels.push(Formula::and(labels[j].clone(), label.clone()));
            }
        }
        i += 1;
    }
    debug_assert_eq!(masks.len(), size, "closure must span the atom partition");

    let index_of_mask = masks
        .iter()
        .enumerate()
        .map(|(idx, &m)| (m, idx))
        .collect();
    Ok(FreeAlgebra {
        logic: logic.clone(),
        k,
        space: parts.space,
        atoms: parts.atoms,
        dia_atom: parts.dia_atom,
        gen_mask: parts.gen_mask,
        masks,
        labels,
        index_of_mask,
    })
}

impl FreeAlgebra {
    pub fn logic(&self) -> &FrameClassLogic {
        &self.logic
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.masks.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn space(&self) -> &CoordSpace {
        &self.space
    }

    pub fn label(&self, idx: usize) -> &Formula {
        &self.labels[idx]
    }

    /// Atom mask of an element (bit `a` set iff atom `a` lies below it).
    pub fn atom_mask(&self, idx: usize) -> u64 {
        self.masks[idx]
    }

    /// Coordinate vector of an element, reassembled from its atoms.
    pub fn element_bits(&self, idx: usize) -> Bits {
        let mut out = Bits::empty(self.space.total());
        let mut rest = self.masks[idx];
        while rest != 0 {
            let a = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            out.union_with(&self.atoms[a]);
        }
        out
    }

    pub fn element(&self, idx: usize) -> AlgebraElement {
        AlgebraElement {
            bits: self.element_bits(idx),
            label: self.labels[idx].clone(),
        }
    }

    /// Index of the element with the given atom mask, if enumerated.
    pub fn find_mask(&self, mask: u64) -> Option<usize> {
        self.index_of_mask.get(&mask).copied()
    }

    /// Indices of the generator elements `g_0..g_{k-1}`.
    pub fn generator_indices(&self) -> Vec<usize> {
        (0..self.k)
            .map(|j| self.index_of_mask[&self.gen_mask[j]])
            .collect()
    }

    /// Algebraic compound diamond: union of diamond powers up to `steps`.
    pub fn dia_le_mask(&self, steps: usize, mask: u64) -> u64 {
        let one = |m: u64| -> u64 {
            let mut out = 0u64;
            for i in 0..self.logic.sig().n() {
                let mut rest = m;
                while rest != 0 {
                    let a = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    out |= self.dia_atom[i][a];
                }
            }
            out
        };
        let mut acc = mask;
        let mut cur = mask;
        for _ in 0..steps {
            cur = one(cur);
            acc |= cur;
        }
        acc
    }
}

/// The finite k-canonical model of a frame-class logic: the atom dual of its
/// free algebra, each point carrying the defining formula of its atom.
#[derive(Debug, Clone)]
pub struct CanonicalModel {
    pub model: Model,
    pub atom_labels: Vec<Formula>,
    pub k: usize,
    pub m: usize,
}

/// Extract the dual canonical model from a built free algebra.
pub fn dual_canonical_model(alg: &FreeAlgebra) -> CanonicalModel {
    let parts = DualParts {
        space: alg.space.clone(),
        atoms: alg.atoms.clone(),
        dia_atom: alg.dia_atom.clone(),
        gen_mask: alg.gen_mask.clone(),
    };
    let model = dual_model_from_parts(&parts, &alg.logic, alg.k);
    let atom_labels = (0..alg.atoms.len())
        .map(|a| alg.labels[alg.index_of_mask[&(1u64 << a)]].clone())
        .collect();
    CanonicalModel {
        model,
        atom_labels,
        k: alg.k,
        m: alg.logic.m(),
    }
}

impl CanonicalModel {
    pub fn atom_count(&self) -> usize {
        self.model.frame.worlds()
    }

    /// Restrict the canonical model to its points of depth at most `h`,
    /// keeping atom order and labels; this realizes the canonical model of
    /// the height-h extension of the logic.
    pub fn restrict_to_depth(&self, h: usize) -> CanonicalModel {
        let depths = crate::analysis::depths(&self.model.frame);
        let keep = Bits::from_indices(
            self.atom_count(),
            &(0..self.atom_count())
                .filter(|&a| depths[a] <= h)
                .collect::<Vec<_>>(),
        );
        let (model, map) = self.model.restrict(&keep);
        let mut atom_labels = vec![Formula::falsum(); model.frame.worlds()];
        for (old, &new) in map.iter() {
            atom_labels[new] = self.atom_labels[*old].clone();
        }
        CanonicalModel {
            model,
            atom_labels,
            k: self.k,
            m: self.m,
        }
    }
}

/// The defining formula of an atom: its variable literal profile conjoined
/// with the atom's label; true exactly at that atom.
pub fn atom_formula(model: &CanonicalModel, atom: usize) -> Formula {
    let mut parts: Vec<Formula> = (0..model.k)
        .map(|j| {
            if model.model.valuation.get(j).get(atom) {
                Formula::var(j)
            } else {
                Formula::not(Formula::var(j))
            }
        })
        .collect();
    parts.push(model.atom_labels[atom].clone());
    Formula::big_and(parts)
}

/// Size of the subalgebra of the complex algebra of `fr` generated by the
/// given world sets, or an error once the closure exceeds `cap`.
pub fn subalgebra_size_probe(fr: &Frame, generators: &[Bits], cap: usize) -> Result<usize> {
    let worlds = fr.worlds();
    let mut seen: HashMap<Bits, usize> = HashMap::new();
    let mut queue: Vec<Bits> = Vec::new();
    let push = |x: Bits, seen: &mut HashMap<Bits, usize>, queue: &mut Vec<Bits>| {
        if !seen.contains_key(&x) {
            let idx = seen.len();
            seen.insert(x.clone(), idx);
            queue.push(x);
        }
    };
    push(Bits::empty(worlds), &mut seen, &mut queue);
    for g in generators {
        assert_eq!(g.len(), worlds);
        push(g.clone(), &mut seen, &mut queue);
    }
    let mut i = 0;
    while i < queue.len() {
        if queue.len() > cap {
            return Err(Error::CapExceeded {
                size: queue.len(),
                cap,
            });
        }
        let e = queue[i].clone();
        push(e.complement(), &mut seen, &mut queue);
        for mi in 0..fr.sig().n() {
            let mut img = Bits::empty(worlds);
            for x in 0..worlds {
                if fr.successors(mi, x).intersects(&e) {
                    img.set(x, true);
                }
            }
            push(img, &mut seen, &mut queue);
        }
        for j in 0..=i {
            let cand = e.intersection(&queue[j]);
            push(cand, &mut seen, &mut queue);
        }
        i += 1;
    }
    Ok(queue.len())
}

/// Shared cache of dual canonical models, keyed by (class fingerprint, k);
/// each key is built at most once even under concurrent access.
#[derive(Default)]
pub struct CanonicalCache {
    inner: Mutex<HashMap<(String, usize), Arc<OnceLock<std::result::Result<Arc<DualModel>, Error>>>>>,
}

impl CanonicalCache {
    pub fn new() -> Self {
        CanonicalCache::default()
    }

    pub fn get_or_build(
        &self,
        logic: &FrameClassLogic,
        k: usize,
        limits: &BuildLimits,
    ) -> Result<Arc<DualModel>> {
        let key = (logic.fingerprint(), k);
        let cell = {
            let mut map = self.inner.lock().expect("cache lock");
            map.entry(key).or_default().clone()
        };
        cell.get_or_init(|| canonical_dual(logic, k, limits).map(Arc::new))
            .clone()
    }
}

/// Convenience: the frame list serialized for documentation and reports.
pub fn class_description(logic: &FrameClassLogic) -> String {
    logic
        .frames()
        .iter()
        .map(frame_to_json)
        .collect::<Vec<_>>()
        .join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{
        cluster, cluster_chain, irreflexive_singleton, reflexive_singleton,
    };

    fn logic_of(frames: Vec<Frame>) -> FrameClassLogic {
        FrameClassLogic::new(frames).unwrap()
    }

    #[test]
    fn reflexive_singleton_k1_has_four_elements() {
        let logic = logic_of(vec![reflexive_singleton()]);
        let alg = build_free_algebra(&logic, 1, &BuildLimits::default()).unwrap();
        assert_eq!(alg.len(), 4);
        let mut rendered: Vec<String> =
            (0..4).map(|i| alg.label(i).render()).collect();
        rendered.sort();
        assert_eq!(
            rendered,
            vec![
                "(false -> false)",
                "(p0 -> false)",
                "false",
                "p0",
            ]
        );
    }

    #[test]
    fn irreflexive_singleton_k0() {
        let logic = logic_of(vec![irreflexive_singleton()]);
        let alg = build_free_algebra(&logic, 0, &BuildLimits::default()).unwrap();
        // {bottom, top}, and the diamond annihilates the top
        assert_eq!(alg.len(), 2);
        assert_eq!(alg.atom_mask(0), 0);
        let top_mask = alg.atom_mask(1);
        assert_ne!(top_mask, 0);
        let dia_top = alg.dia_le_mask(1, top_mask) & !top_mask;
        assert_eq!(dia_top, 0);
        // more precisely: one diamond step of top is bottom
        assert_eq!(alg.dia_le_mask(1, top_mask), top_mask); // includes 0 steps
        let dual = dual_canonical_model(&alg);
        assert_eq!(dual.atom_count(), 1);
        assert!(!dual.model.frame.has_edge(0, 0, 0));
    }

    /// Naive closure over explicit coordinate sets, as an independent oracle
    /// for the element count.
    fn naive_closure_size(logic: &FrameClassLogic, k: usize) -> usize {
        use std::collections::HashSet;
        let space = CoordSpace::new(logic, k, 1 << 20).unwrap();
        let mut seen: HashSet<Bits> = HashSet::new();
        let mut queue: Vec<Bits> = Vec::new();
        let add = |x: Bits, seen: &mut HashSet<Bits>, queue: &mut Vec<Bits>| {
            if seen.insert(x.clone()) {
                queue.push(x);
            }
        };
        add(Bits::empty(space.total()), &mut seen, &mut queue);
        for j in 0..k {
            add(space.generator(j), &mut seen, &mut queue);
        }
        let n = logic.sig().n();
        let mut i = 0;
        while i < queue.len() {
            let e = queue[i].clone();
            add(e.complement(), &mut seen, &mut queue);
            for mi in 0..n {
                add(space.diamond(mi, &e), &mut seen, &mut queue);
            }
            for j in 0..=i {
                add(e.intersection(&queue[j]), &mut seen, &mut queue);
            }
            i += 1;
        }
        queue.len()
    }

    #[test]
    fn two_cluster_closure_size_matches_naive_oracle() {
        let logic = logic_of(vec![cluster(2)]);
        let alg = build_free_algebra(&logic, 1, &BuildLimits::default()).unwrap();
        assert_eq!(alg.len(), naive_closure_size(&logic, 1));
    }

    #[test]
    fn dual_of_reflexive_singleton_k1() {
        let logic = logic_of(vec![reflexive_singleton()]);
        let alg = build_free_algebra(&logic, 1, &BuildLimits::default()).unwrap();
        let dual = dual_canonical_model(&alg);
        assert_eq!(dual.atom_count(), 2);
        let fr = &dual.model.frame;
        assert!(fr.has_edge(0, 0, 0) && fr.has_edge(0, 1, 1));
        assert!(!fr.has_edge(0, 0, 1) && !fr.has_edge(0, 1, 0));
        // one point satisfies p0, the other does not
        assert_eq!(dual.model.valuation.get(0).count(), 1);
    }

    #[test]
    fn s5_like_class_dual_shape() {
        // clusters of sizes 1 and 2; the 1-canonical model has 4 points in
        // 3 clusters: two reflexive singletons and one 2-cluster
        let logic = logic_of(vec![cluster(1), cluster(2)]);
        let alg = build_free_algebra(&logic, 1, &BuildLimits::default()).unwrap();
        let dual = dual_canonical_model(&alg);
        assert_eq!(dual.atom_count(), 4);
        let sk = crate::analysis::clusters(&dual.model.frame);
        let mut sizes: Vec<usize> = sk.clusters.iter().map(Vec::len).collect();
        sizes.sort();
        assert_eq!(sizes, vec![1, 1, 2]);
        assert_eq!(crate::analysis::height(&dual.model.frame), 1);
    }

    #[test]
    fn truth_lemma_on_small_algebras() {
        // truth lemma: the label of every element is true exactly at the
        // atoms below it, and the label denotes the element's bits on every
        // source (frame, valuation) block
        for logic in [
            logic_of(vec![reflexive_singleton()]),
            logic_of(vec![cluster_chain(&[2, 1])]),
            logic_of(vec![cluster(1), cluster(2)]),
        ] {
            for k in 0..=1 {
                let alg = build_free_algebra(&logic, k, &BuildLimits::default()).unwrap();
                let dual = dual_canonical_model(&alg);
                for idx in 0..alg.len() {
                    let label = alg.label(idx);
                    let ts = dual.model.truth_set(label).unwrap();
                    let mask = alg.atom_mask(idx);
                    for a in 0..alg.atom_count() {
                        assert_eq!(ts.get(a), mask >> a & 1 == 1, "k={k} idx={idx}");
                    }
                    assert_eq!(
                        alg.space().formula_bits(label).unwrap(),
                        alg.element_bits(idx),
                        "label soundness k={k} idx={idx}"
                    );
                }
            }
        }
    }

    #[test]
    fn atom_formula_isolates_each_atom() {
        for logic in [
            logic_of(vec![reflexive_singleton()]),
            logic_of(vec![cluster(1), cluster(2)]),
            logic_of(vec![cluster_chain(&[1, 1, 1])]),
        ] {
            let alg = build_free_algebra(&logic, 1, &BuildLimits::default()).unwrap();
            let dual = dual_canonical_model(&alg);
            for a in 0..dual.atom_count() {
                let alpha = atom_formula(&dual, a);
                let ts = dual.model.truth_set(&alpha).unwrap();
                assert_eq!(
                    ts.iter_ones().collect::<Vec<_>>(),
                    vec![a],
                    "alpha must isolate atom {a}"
                );
            }
        }
    }

    #[test]
    fn canonical_dual_agrees_with_labelled_dual() {
        for logic in [
            logic_of(vec![cluster_chain(&[1, 1])]),
            logic_of(vec![cluster(1), cluster(2)]),
            logic_of(vec![cluster_chain(&[2, 1]), irreflexive_singleton()]),
        ] {
            for k in 0..=1 {
                let alg = build_free_algebra(&logic, k, &BuildLimits::default()).unwrap();
                let labelled = dual_canonical_model(&alg);
                let plain = canonical_dual(&logic, k, &BuildLimits::default()).unwrap();
                assert_eq!(labelled.model, plain.model);
                assert_eq!(plain.m, logic.m());
            }
        }
    }

    #[test]
    fn cap_errors_report_size() {
        let logic = logic_of(vec![cluster_chain(&[1, 1])]);
        let limits = BuildLimits {
            cap: 3,
            coord_budget: 1 << 20,
        };
        match build_free_algebra(&logic, 1, &limits) {
            Err(Error::CapExceeded { size, cap: 3 }) => assert!(size > 3),
            other => panic!("expected cap error, got {:?}", other.map(|a| a.len())),
        }
        let tiny = BuildLimits {
            cap: 100_000,
            coord_budget: 4,
        };
        assert!(matches!(
            build_free_algebra(&logic, 1, &tiny),
            Err(Error::BitBudget { .. })
        ));
    }

    #[test]
    fn probe_examples() {
        use crate::analysis::omega_top_frame;
        // generator {0} on the 9-world limit frame: 8 elements
        let fr = omega_top_frame(8);
        let g = Bits::singleton(9, 0);
        let size = subalgebra_size_probe(&fr, &[g], 1000).unwrap();
        assert!(size <= 8, "got {size}");
        // the empty generator alone spans {empty, everything}
        let size = subalgebra_size_probe(&fr, &[Bits::empty(9)], 1000).unwrap();
        assert_eq!(size, 2);
    }

    #[test]
    fn cache_single_build_per_key() {
        let cache = CanonicalCache::new();
        let logic = logic_of(vec![cluster(2)]);
        let a = cache
            .get_or_build(&logic, 1, &BuildLimits::default())
            .unwrap();
        let b = cache
            .get_or_build(&logic, 1, &BuildLimits::default())
            .unwrap();
        assert!(Arc::ptr_eq(&a, &b));
    }
}
