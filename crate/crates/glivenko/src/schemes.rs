//! The formula schemes: finite-height axioms, Jankov-Fine formulas, depth
//! formulas, and the translations between a logic and its height-bounded
//! extensions.

use crate::algebra::{atom_formula, CanonicalModel};
use crate::analysis::depths;
use crate::formula::{box_le, dia_le, Formula, Signature};
use crate::{Error, Result};

/// Guard for the generated Jankov-Fine and depth formulas, which grow
/// quadratically in the number of canonical points.
pub const SCHEME_NODE_CAP: u64 = 1_000_000;

/// The finite-height axiom instance `B_h(psi_1, .., psi_h)`:
/// `B_0 = false`, `B_i = psi_i -> box*(dia* psi_i | B_{i-1})`, with the
/// compound modalities expanded at bound `m`.
pub fn bh_instance(h: usize, psis: &[Formula], m: usize, sig: Signature) -> Result<Formula> {
    if psis.len() != h {
        return Err(Error::LengthMismatch {
            expected: h,
            got: psis.len(),
        });
    }
    let mut b = Formula::falsum();
    for psi in psis.iter().take(h) {
        b = Formula::implies(
            psi.clone(),
            box_le(m, &Formula::or(dia_le(m, psi, sig), b), sig),
        );
    }
    Ok(b)
}

/// The parameter-free instance `B_h(p_1, .., p_h)` used for height checks.
pub fn bh_fresh(h: usize, m: usize, sig: Signature) -> Formula {
    let psis: Vec<Formula> = (1..=h).map(Formula::var).collect();
    bh_instance(h, &psis, m, sig).expect("lengths match")
}

/// The height-one translation `dia* box* f`.
pub fn glivenko_h1(f: &Formula, m: usize, sig: Signature) -> Formula {
    dia_le(m, &box_le(m, f, sig), sig)
}

/// The boxed-pair forms related by the height-one embedding:
/// `(box* psi -> box* f, dia* box* psi -> dia* box* f)`.
pub fn embedd_pair(psi: &Formula, f: &Formula, m: usize, sig: Signature) -> (Formula, Formula) {
    let bp = box_le(m, psi, sig);
    let bf = box_le(m, f, sig);
    (
        Formula::implies(bp.clone(), bf.clone()),
        Formula::implies(dia_le(m, &bp, sig), dia_le(m, &bf, sig)),
    )
}

/// The shared frame-description part of the Jankov-Fine formulas of a finite
/// canonical model: boxed conjunctions asserting which atoms see which
/// through each modality, and a boxed disjunction confining evaluation to
/// the model's atoms.
pub fn jankov_gamma(model: &CanonicalModel) -> Result<Formula> {
    let atoms = model.atom_count();
    let n = model.model.frame.sig().n();
    let sig = model.model.frame.sig();
    let m = model.m;
    let alphas: Vec<Formula> = (0..atoms).map(|a| atom_formula(model, a)).collect();

    let mut edges = Vec::new();
    let mut non_edges = Vec::new();
    for i in 0..n {
        for b1 in 0..atoms {
            for b2 in 0..atoms {
                let dia = Formula::diamond(i, alphas[b2].clone());
                if model.model.frame.has_edge(i, b1, b2) {
                    edges.push(Formula::implies(alphas[b1].clone(), dia));
                } else {
                    non_edges.push(Formula::implies(alphas[b1].clone(), Formula::not(dia)));
                }
            }
        }
    }
    let gamma = Formula::big_and([
        box_le(m, &Formula::big_and(edges), sig),
        box_le(m, &Formula::big_and(non_edges), sig),
        box_le(m, &Formula::big_or(alphas), sig),
    ]);
    check_size(&gamma)?;
    Ok(gamma)
}

/// Jankov-Fine formulas `beta(a) = alpha(a) & gamma` for every atom of the
/// model, sharing one gamma.
pub fn jankov_fine_all(model: &CanonicalModel) -> Result<Vec<Formula>> {
    let gamma = jankov_gamma(model)?;
    Ok((0..model.atom_count())
        .map(|a| Formula::and(atom_formula(model, a), gamma.clone()))
        .collect())
}

/// Jankov-Fine formula of a single atom.
pub fn jankov_fine_beta(model: &CanonicalModel, atom: usize) -> Result<Formula> {
    assert!(atom < model.atom_count());
    Ok(jankov_fine_all(model)?.swap_remove(atom))
}

/// Depth formulas `B_{0..h}` derived from a canonical model: `B[i]` is the
/// disjunction of the Jankov-Fine formulas of the atoms of depth at most
/// `i`, built against the depth-h restriction of the model.
#[derive(Debug, Clone)]
pub struct DepthFormulaSet {
    pub formulas: Vec<Formula>,
    /// The model the formulas were derived from (the full canonical model).
    pub source: CanonicalModel,
    pub k: usize,
    pub m: usize,
    pub h: usize,
}

impl DepthFormulaSet {
    pub fn get(&self, i: usize) -> &Formula {
        &self.formulas[i]
    }
}

pub fn depth_formulas(model: &CanonicalModel, h: usize) -> Result<DepthFormulaSet> {
    let mut formulas = vec![Formula::falsum()];
    if h >= 1 {
        let restricted = model.restrict_to_depth(h);
        let betas = jankov_fine_all(&restricted)?;
        let ds = depths(&restricted.model.frame);
        for i in 1..=h {
            let b = Formula::big_or(
                (0..restricted.atom_count())
                    .filter(|&a| ds[a] <= i)
                    .map(|a| betas[a].clone()),
            );
            check_size(&b)?;
            formulas.push(b);
        }
    }
    Ok(DepthFormulaSet {
        formulas,
        source: model.clone(),
        k: model.k,
        m: model.m,
        h,
    })
}

/// The finite-height translation: the conjunction over `i <= h` of
/// `box*(box* f -> B_i) -> B_i`. Validity of `f` in the height-(h+1)
/// extension of the logic corresponds to validity of the translation in the
/// logic itself.
pub fn main_translation(f: &Formula, depth_set: &DepthFormulaSet) -> Result<Formula> {
    if let Some(&v) = f.variables().iter().next_back() {
        if v >= depth_set.k {
            return Err(Error::VariableOutOfRange {
                index: v,
                k: depth_set.k,
            });
        }
    }
    let sig = depth_set.source.model.frame.sig();
    let m = depth_set.m;
    let boxed_f = box_le(m, f, sig);
    let conjuncts = (0..=depth_set.h).map(|i| {
        let bi = depth_set.get(i).clone();
        Formula::implies(
            box_le(m, &Formula::implies(boxed_f.clone(), bi.clone()), sig),
            bi,
        )
    });
    let t = Formula::big_and(conjuncts);
    check_size(&t)?;
    Ok(t)
}

fn check_size(f: &Formula) -> Result<()> {
    let nodes = f.node_count();
    if nodes > SCHEME_NODE_CAP {
        Err(Error::FormulaTooLarge {
            nodes,
            cap: SCHEME_NODE_CAP,
        })
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{build_free_algebra, dual_canonical_model, BuildLimits, FrameClassLogic};
    use crate::analysis::{cluster, cluster_chain, random_frame, reflexive_singleton};
    use crate::formula::Substitution;
    use crate::kripke::{frame_validates, Frame};

    fn p(i: usize) -> Formula {
        Formula::var(i)
    }

    fn canonical(frames: Vec<Frame>, k: usize) -> CanonicalModel {
        let logic = FrameClassLogic::new(frames).unwrap();
        let alg = build_free_algebra(&logic, k, &BuildLimits::default()).unwrap();
        dual_canonical_model(&alg)
    }

    #[test]
    fn bh_base_and_unfolding() {
        let sig = Signature::unimodal();
        assert_eq!(bh_instance(0, &[], 1, sig).unwrap(), Formula::falsum());
        let b1 = bh_instance(1, &[p(1)], 1, sig).unwrap();
        let expected = Formula::implies(
            p(1),
            box_le(1, &Formula::or(dia_le(1, &p(1), sig), Formula::falsum()), sig),
        );
        assert_eq!(b1, expected);
        assert!(matches!(
            bh_instance(2, &[p(1)], 1, sig),
            Err(Error::LengthMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn bh_height_characterization_on_small_frames() {
        // a 2-cluster chain has height 2: B_2 valid, B_1 not
        let fr = cluster_chain(&[2, 1]);
        let sig = fr.sig();
        assert!(frame_validates(&fr, &bh_fresh(2, 1, sig)).unwrap());
        assert!(!frame_validates(&fr, &bh_fresh(1, 1, sig)).unwrap());
        // a 2-point cluster has height 1
        let cl = cluster(2);
        assert!(frame_validates(&cl, &bh_fresh(1, 1, sig)).unwrap());
    }

    #[test]
    fn bh_is_a_substitution_instance() {
        let sig = Signature::new(2);
        let psis = [
            Formula::and(p(0), Formula::diamond(1, p(1))),
            Formula::not(p(0)),
        ];
        let direct = bh_instance(2, &psis, 2, sig).unwrap();
        let fresh = bh_fresh(2, 2, sig);
        let subst = Substitution::new()
            .bind(1, psis[0].clone())
            .bind(2, psis[1].clone());
        assert_eq!(direct, fresh.substitute(&subst));
    }

    #[test]
    fn glivenko_shape() {
        let sig = Signature::unimodal();
        let g = glivenko_h1(&p(0), 1, sig);
        assert_eq!(g, dia_le(1, &box_le(1, &p(0), sig), sig));
        // dia* box* true is valid on arbitrary frames
        for seed in 0..30 {
            let fr = random_frame(1 + seed as usize % 5, 1, 0.4, seed);
            let m = crate::analysis::transitivity_degree(&fr);
            let g = glivenko_h1(&Formula::top(), m, sig);
            assert!(frame_validates(&fr, &g).unwrap(), "seed={seed}");
        }
    }

    #[test]
    fn embedd_pair_shape() {
        let sig = Signature::unimodal();
        let (first, second) = embedd_pair(&p(0), &p(0), 1, sig);
        let bp = box_le(1, &p(0), sig);
        assert_eq!(first, Formula::implies(bp.clone(), bp.clone()));
        assert_eq!(
            second,
            Formula::implies(dia_le(1, &bp, sig), dia_le(1, &bp, sig))
        );
    }

    #[test]
    fn pair_with_top_matches_glivenko_semantically() {
        // the second component for psi = true agrees with dia* box* f on
        // every model
        let sig = Signature::unimodal();
        let f = Formula::implies(p(0), Formula::diamond(0, p(0)));
        let (_, second) = embedd_pair(&Formula::top(), &f, 1, sig);
        let direct = glivenko_h1(&f, 1, sig);
        for seed in 0..30 {
            let fr = random_frame(1 + seed as usize % 5, 1, 0.4, seed);
            let model = crate::genrand::random_model(&fr, 1, seed ^ 0x5eed);
            assert_eq!(
                model.truth_set(&second).unwrap(),
                model.truth_set(&direct).unwrap(),
                "seed={seed}"
            );
        }
    }

    #[test]
    fn beta_isolates_atoms_within_model() {
        for (frames, k) in [
            (vec![reflexive_singleton()], 0),
            (vec![cluster_chain(&[1, 1])], 1),
            (vec![cluster(1), cluster(2)], 1),
        ] {
            let model = canonical(frames, k);
            let betas = jankov_fine_all(&model).unwrap();
            for (a, beta) in betas.iter().enumerate() {
                let ts = model.model.truth_set(beta).unwrap();
                assert_eq!(ts.iter_ones().collect::<Vec<_>>(), vec![a], "k={k} a={a}");
            }
        }
    }

    #[test]
    fn gamma_is_persistent_along_relations() {
        for (frames, k) in [
            (vec![cluster_chain(&[1, 1])], 1),
            (vec![cluster(1), cluster(2)], 1),
            (vec![cluster_chain(&[2, 1])], 1),
        ] {
            let model = canonical(frames, k);
            let gamma = jankov_gamma(&model).unwrap();
            let ts = model.model.truth_set(&gamma).unwrap();
            for i in 0..model.model.frame.sig().n() {
                for x in ts.iter_ones() {
                    assert!(
                        model.model.frame.successors(i, x).is_subset(&ts),
                        "gamma not closed under R_{i} at {x}"
                    );
                }
            }
        }
    }

    #[test]
    fn depth_formula_basics() {
        let model = canonical(vec![cluster_chain(&[1, 1])], 1);
        let ds = depth_formulas(&model, 1).unwrap();
        assert_eq!(ds.get(0), &Formula::falsum());
        // every point of the height-1 part satisfies B_1 and nothing deeper
        let full = &model.model;
        let d = depths(&full.frame);
        let ts = full.truth_set(ds.get(1)).unwrap();
        for a in 0..model.atom_count() {
            assert_eq!(ts.get(a), d[a] <= 1, "atom {a}");
        }
    }

    #[test]
    fn depth_formulas_monotone() {
        let model = canonical(vec![cluster_chain(&[1, 1, 1])], 1);
        let ds = depth_formulas(&model, 2).unwrap();
        let t1 = model.model.truth_set(ds.get(1)).unwrap();
        let t2 = model.model.truth_set(ds.get(2)).unwrap();
        assert!(t1.is_subset(&t2));
    }

    #[test]
    fn height_one_restriction_disjunction_covers_everything() {
        // in a height-1 canonical model, B_1 is a disjunction over all atoms
        // and holds everywhere
        let model = canonical(vec![cluster(1), cluster(2)], 1);
        let ds = depth_formulas(&model, 1).unwrap();
        let ts = model.model.truth_set(ds.get(1)).unwrap();
        assert_eq!(ts.count(), model.atom_count());
    }

    #[test]
    fn translation_at_height_zero_matches_glivenko_semantically() {
        let model = canonical(vec![cluster_chain(&[1, 1])], 1);
        let ds = depth_formulas(&model, 0).unwrap();
        let f = Formula::implies(p(0), Formula::diamond(0, p(0)));
        let t = main_translation(&f, &ds).unwrap();
        let g = glivenko_h1(&f, ds.m, model.model.frame.sig());
        for seed in 0..30 {
            let fr = random_frame(1 + seed as usize % 5, 1, 0.4, seed);
            let m = crate::genrand::random_model(&fr, 1, seed);
            assert_eq!(m.truth_set(&t).unwrap(), m.truth_set(&g).unwrap());
        }
    }

    #[test]
    fn translation_rejects_variable_overflow() {
        let model = canonical(vec![cluster_chain(&[1, 1])], 1);
        let ds = depth_formulas(&model, 1).unwrap();
        assert!(matches!(
            main_translation(&p(5), &ds),
            Err(Error::VariableOutOfRange { index: 5, k: 1 })
        ));
    }
}
