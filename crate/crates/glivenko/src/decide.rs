//! Validity decisions.
//!
//! Named logics go through the signed tableau; frame-class logics are
//! decided exactly on their finite dual canonical models, with the
//! height-bounded extension decided on the depth-restricted dual. The two
//! routes are independent, which is what the verification suites exploit.
//!
//! The only named+height combination with an exact backend is the reflexive
//! transitive logic at height one, which coincides with the equivalence
//! logic; higher named heights would need canonical constructions outside
//! this crate's scope and are rejected.

use std::sync::Arc;

use crate::algebra::{BuildLimits, CanonicalCache, DualModel, FrameClassLogic};
use crate::analysis::{cluster, depths, maximal_elements};
use crate::bits::Bits;
use crate::formula::Formula;
use crate::kripke::{reach, Model, Reach, Valuation};
use crate::schemes::glivenko_h1;
use crate::tableau::{tableau_refute, NamedLogic};
use crate::{Error, Result};

/// A decidable logic: a named axiomatic logic or a frame-class logic,
/// optionally extended by a finite-height axiom.
#[derive(Debug, Clone)]
pub struct LogicSpec {
    pub base: LogicBase,
    pub height: Option<usize>,
}

#[derive(Debug, Clone)]
pub enum LogicBase {
    Named(NamedLogic),
    FrameClass(FrameClassLogic),
}

impl LogicSpec {
    pub fn named(logic: NamedLogic) -> Self {
        LogicSpec {
            base: LogicBase::Named(logic),
            height: None,
        }
    }

    pub fn frame_class(logic: FrameClassLogic) -> Self {
        LogicSpec {
            base: LogicBase::FrameClass(logic),
            height: None,
        }
    }

    pub fn with_height(mut self, h: usize) -> Self {
        self.height = Some(h);
        self
    }
}

/// The outcome of a decision: valid, or a finite countermodel together with
/// the world refuting the formula.
#[derive(Debug, Clone)]
pub struct Verdict {
    pub valid: bool,
    pub countermodel: Option<(Model, usize)>,
}

impl Verdict {
    pub fn valid() -> Self {
        Verdict {
            valid: true,
            countermodel: None,
        }
    }

    pub fn invalid(model: Model, world: usize) -> Self {
        Verdict {
            valid: false,
            countermodel: Some((model, world)),
        }
    }
}

/// Number of variables a formula needs: largest index plus one.
pub fn var_span(f: &Formula) -> usize {
    f.variables().iter().next_back().map_or(0, |&v| v + 1)
}

/// The cluster frames realizing the equivalence logic for k-variable
/// formulas: every point of an equivalence-logic canonical cluster carries a
/// distinct k-valuation, so clusters of sizes up to `2^k` suffice.
pub fn s5_frame_class(k: usize) -> FrameClassLogic {
    let max = 1usize << k;
    FrameClassLogic::new((1..=max).map(cluster).collect()).expect("cluster frames share signature")
}

/// Decide validity of `f` in the given logic.
pub fn decide(
    spec: &LogicSpec,
    f: &Formula,
    cache: &CanonicalCache,
    limits: &BuildLimits,
) -> Result<Verdict> {
    match (&spec.base, spec.height) {
        (LogicBase::Named(l), None) => decide_named(*l, f),
        (LogicBase::Named(NamedLogic::S4), Some(1)) => decide_named(NamedLogic::S5, f),
        (LogicBase::Named(l), Some(h)) => Err(Error::UnsupportedLogic(format!(
            "no exact backend for {} at height {h}",
            l.name()
        ))),
        (LogicBase::FrameClass(logic), None) => {
            let dual = cache.get_or_build(logic, var_span(f), limits)?;
            decide_on_dual(&dual, f)
        }
        (LogicBase::FrameClass(logic), Some(h)) => {
            decide_height_bounded(logic, h, f, cache, limits)
        }
    }
}

fn decide_named(logic: NamedLogic, f: &Formula) -> Result<Verdict> {
    match tableau_refute(logic, f)? {
        None => Ok(Verdict::valid()),
        Some((model, world)) => Ok(Verdict::invalid(model, world)),
    }
}

fn decide_on_dual(dual: &Arc<DualModel>, f: &Formula) -> Result<Verdict> {
    let ts = dual.model.truth_set(f)?;
    match (0..dual.model.frame.worlds()).find(|&a| !ts.get(a)) {
        None => Ok(Verdict::valid()),
        Some(atom) => Ok(Verdict::invalid(dual.model.clone(), atom)),
    }
}

/// Decide validity in the height-h extension of a frame-class logic: `f`
/// must hold at every point of depth at most `h` of the dual canonical
/// model, which is the canonical model of the extension.
pub fn decide_height_bounded(
    logic: &FrameClassLogic,
    h: usize,
    f: &Formula,
    cache: &CanonicalCache,
    limits: &BuildLimits,
) -> Result<Verdict> {
    assert!(h >= 1, "height bounds start at 1");
    let dual = cache.get_or_build(logic, var_span(f), limits)?;
    let d = depths(&dual.model.frame);
    let keep = Bits::from_indices(
        dual.model.frame.worlds(),
        &(0..dual.model.frame.worlds())
            .filter(|&a| d[a] <= h)
            .collect::<Vec<_>>(),
    );
    let (restricted, _) = dual.model.restrict(&keep);
    let ts = restricted.truth_set(f)?;
    match (0..restricted.frame.worlds()).find(|&a| !ts.get(a)) {
        None => Ok(Verdict::valid()),
        Some(atom) => Ok(Verdict::invalid(restricted, atom)),
    }
}

/// Constructive finite-model-property transfer: given that the height-one
/// translation of `f` fails in the logic, find a class frame and valuation
/// refuting it, restrict to a maximal cluster of the refuting cone, and
/// return that height-one model with a point refuting `f` itself.
pub fn fmp_transfer_witness(logic: &FrameClassLogic, f: &Formula) -> Result<(Model, usize)> {
    let k = var_span(f);
    let g = glivenko_h1(f, logic.m(), logic.sig());
    for fr in logic.frames() {
        let w = fr.worlds();
        let bits = k * w;
        if bits > 24 {
            return Err(Error::SizeLimit { bits, limit: 24 });
        }
        for v in 0u64..(1u64 << bits) {
            let mut valuation = Valuation::empty(k, w);
            for j in 0..k {
                let mut set = Bits::empty(w);
                for world in 0..w {
                    if v >> (j * w + world) & 1 == 1 {
                        set.set(world, true);
                    }
                }
                valuation.set(j, set);
            }
            let model = Model::new(fr.clone(), valuation);
            let ts = model.truth_set(&g)?;
            let refuting = (0..w).find(|&x| !ts.get(x));
            let Some(x) = refuting else { continue };
            // maximal cluster inside the cone of x
            let star = reach(fr, Reach::Star);
            let cone = star[x].clone();
            let maxes = maximal_elements(fr, &cone)?;
            let u = maxes.iter_ones().next().expect("cone is nonempty");
            let mut cluster_set = Bits::empty(w);
            for y in star[u].iter_ones() {
                if star[y].get(u) {
                    cluster_set.set(y, true);
                }
            }
            let (restricted, map) = model.restrict(&cluster_set);
            let fs = restricted.truth_set(f)?;
            let z = (0..restricted.frame.worlds())
                .find(|&y| !fs.get(y))
                .expect("a maximal cluster of a refuting cone refutes the formula");
            let _ = map;
            return Ok((restricted, z));
        }
    }
    Err(Error::TranslationValid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{
        chain_preorder, cluster_chain, height, random_frame, transitivity_degree,
    };
    use crate::formula::{box_le, dia_le, Signature};
    use crate::genrand::{formula_pool, rng_from_seed};
    use crate::kripke::frame_validates;
    use crate::parse::parse;
    use crate::schemes::{bh_fresh, embedd_pair};
    use rand::Rng;

    fn ctx() -> (CanonicalCache, BuildLimits) {
        (CanonicalCache::new(), BuildLimits::default())
    }

    #[test]
    fn named_examples() {
        let (cache, limits) = ctx();
        let sig = Signature::unimodal();
        let t = parse("p0 -> dia p0", sig).unwrap();
        assert!(decide(&LogicSpec::named(NamedLogic::S4), &t, &cache, &limits)
            .unwrap()
            .valid);
        let five = parse("p0 -> box dia p0", sig).unwrap();
        let verdict = decide(&LogicSpec::named(NamedLogic::S4), &five, &cache, &limits).unwrap();
        assert!(!verdict.valid);
        let (model, world) = verdict.countermodel.unwrap();
        assert!(model.frame.worlds() <= 3);
        assert!(!model.satisfies(world, &five).unwrap());
    }

    #[test]
    fn named_height_mapping() {
        let (cache, limits) = ctx();
        let sig = Signature::unimodal();
        // S4 at height 1 is the equivalence logic
        let five = parse("p0 -> box dia p0", sig).unwrap();
        let spec = LogicSpec::named(NamedLogic::S4).with_height(1);
        assert!(decide(&spec, &five, &cache, &limits).unwrap().valid);
        // other named heights have no exact backend
        let spec = LogicSpec::named(NamedLogic::S4).with_height(2);
        assert!(matches!(
            decide(&spec, &five, &cache, &limits),
            Err(Error::UnsupportedLogic(_))
        ));
    }

    #[test]
    fn frame_class_decide_matches_direct_validity() {
        // the canonical backend agrees with quantifying over all frames and
        // valuations, exhaustively over small formulas
        let (cache, limits) = ctx();
        let logics = [
            FrameClassLogic::new(vec![chain_preorder(2)]).unwrap(),
            FrameClassLogic::new(vec![cluster_chain(&[2, 1])]).unwrap(),
            FrameClassLogic::new(vec![cluster(2), chain_preorder(2)]).unwrap(),
        ];
        for logic in &logics {
            let spec = LogicSpec::frame_class(logic.clone());
            for f in crate::genrand::enumerate_formulas(1, 5, 2) {
                let via_dual = decide(&spec, &f, &cache, &limits).unwrap().valid;
                let direct = logic
                    .frames()
                    .iter()
                    .all(|fr| frame_validates(fr, &f).unwrap());
                assert_eq!(via_dual, direct, "formula {f}");
            }
        }
    }

    #[test]
    fn frame_class_countermodels_model_check() {
        let (cache, limits) = ctx();
        let logic = FrameClassLogic::new(vec![chain_preorder(3)]).unwrap();
        let spec = LogicSpec::frame_class(logic);
        for f in formula_pool(11, 60, Signature::unimodal(), 2, 2) {
            let verdict = decide(&spec, &f, &cache, &limits).unwrap();
            if let Some((model, world)) = verdict.countermodel {
                assert!(!model.satisfies(world, &f).unwrap(), "formula {f}");
            }
        }
    }

    #[test]
    fn height_bound_at_or_above_height_is_the_identity() {
        let (cache, limits) = ctx();
        let logic = FrameClassLogic::new(vec![chain_preorder(2)]).unwrap();
        for f in formula_pool(13, 40, Signature::unimodal(), 1, 2) {
            let dual = cache.get_or_build(&logic, var_span(&f), &limits).unwrap();
            let h = height(&dual.model.frame);
            let plain = decide(
                &LogicSpec::frame_class(logic.clone()),
                &f,
                &cache,
                &limits,
            )
            .unwrap();
            let bounded = decide_height_bounded(&logic, h, &f, &cache, &limits).unwrap();
            assert_eq!(plain.valid, bounded.valid, "formula {f}");
        }
    }

    #[test]
    fn height_one_distinguishes_the_pretransitivity_example() {
        // p0 -> box* dia* p0 holds at height one but not in the full logic
        let (cache, limits) = ctx();
        let logic = FrameClassLogic::new(vec![chain_preorder(3)]).unwrap();
        let m = logic.m();
        let sig = logic.sig();
        let f = Formula::implies(
            Formula::var(0),
            box_le(m, &dia_le(m, &Formula::var(0), sig), sig),
        );
        assert!(decide_height_bounded(&logic, 1, &f, &cache, &limits)
            .unwrap()
            .valid);
        assert!(
            !decide(&LogicSpec::frame_class(logic), &f, &cache, &limits)
                .unwrap()
                .valid
        );
    }

    #[test]
    fn embedding_pair_form_on_random_formulas() {
        // the boxed-pair equivalence between the height-one extension and
        // the base logic, on random formula pairs
        let (cache, limits) = ctx();
        let logics = [
            FrameClassLogic::new(vec![chain_preorder(2)]).unwrap(),
            FrameClassLogic::new(vec![cluster_chain(&[2, 1])]).unwrap(),
        ];
        let sig = Signature::unimodal();
        let mut rng = rng_from_seed(19);
        for logic in &logics {
            for _ in 0..40 {
                let psi = crate::genrand::random_formula(&mut rng, sig, 1, 2);
                let phi = crate::genrand::random_formula(&mut rng, sig, 1, 2);
                let (boxed, translated) = embedd_pair(&psi, &phi, logic.m(), sig);
                let lhs = decide_height_bounded(logic, 1, &boxed, &cache, &limits)
                    .unwrap()
                    .valid;
                let rhs = decide(
                    &LogicSpec::frame_class(logic.clone()),
                    &translated,
                    &cache,
                    &limits,
                )
                .unwrap()
                .valid;
                assert_eq!(lhs, rhs, "psi={psi} phi={phi}");
            }
        }
    }

    #[test]
    fn fmp_witness_examples() {
        let logic = FrameClassLogic::new(vec![chain_preorder(2)]).unwrap();
        // refuting falsum: every point refutes it, the witness is a cluster
        let (model, world) = fmp_transfer_witness(&logic, &Formula::falsum()).unwrap();
        assert!(!model.satisfies(world, &Formula::falsum()).unwrap());
        assert_eq!(height(&model.frame), 1);
        // refuting p0
        let (model, world) = fmp_transfer_witness(&logic, &Formula::var(0)).unwrap();
        assert!(!model.satisfies(world, &Formula::var(0)).unwrap());
        assert_eq!(height(&model.frame), 1);
        let m = transitivity_degree(&model.frame);
        assert!(frame_validates(&model.frame, &bh_fresh(1, m, model.frame.sig())).unwrap());
        // a valid translation yields no witness
        assert!(matches!(
            fmp_transfer_witness(&logic, &Formula::top()),
            Err(Error::TranslationValid)
        ));
    }

    #[test]
    fn fmp_witnesses_on_random_cases() {
        let (cache, limits) = ctx();
        let classes = [
            FrameClassLogic::new(vec![chain_preorder(2)]).unwrap(),
            FrameClassLogic::new(vec![cluster_chain(&[2, 1])]).unwrap(),
            FrameClassLogic::new(vec![random_frame(3, 1, 0.4, 3)]).unwrap(),
        ];
        let sig = Signature::unimodal();
        let mut rng = rng_from_seed(23);
        let mut found = 0;
        while found < 25 {
            let logic = &classes[rng.gen_range(0..classes.len())];
            let f = crate::genrand::random_formula(&mut rng, sig, 1, 2);
            let g = glivenko_h1(&f, logic.m(), logic.sig());
            let verdict = decide(&LogicSpec::frame_class(logic.clone()), &g, &cache, &limits)
                .unwrap();
            if verdict.valid {
                continue;
            }
            found += 1;
            let (model, world) = fmp_transfer_witness(logic, &f).unwrap();
            assert!(!model.satisfies(world, &f).unwrap());
            assert_eq!(height(&model.frame), 1);
            let m = transitivity_degree(&model.frame);
            assert!(
                frame_validates(&model.frame, &bh_fresh(1, m, model.frame.sig())).unwrap()
            );
        }
    }

    #[test]
    fn s5_cluster_class_agrees_with_tableau() {
        let (cache, limits) = ctx();
        let sig = Signature::unimodal();
        for (i, f) in formula_pool(29, 80, sig, 2, 2).into_iter().enumerate() {
            let via_tableau = decide(&LogicSpec::named(NamedLogic::S5), &f, &cache, &limits)
                .unwrap()
                .valid;
            let class = s5_frame_class(var_span(&f));
            let via_class = decide(&LogicSpec::frame_class(class), &f, &cache, &limits)
                .unwrap()
                .valid;
            assert_eq!(via_tableau, via_class, "case {i}: {f}");
        }
    }
}
