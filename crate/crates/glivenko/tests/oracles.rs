//! Cross-checks of the decision backends against independent brute-force
//! oracles. The oracle here evaluates formulas over raw successor masks and
//! never calls into the library's evaluator or provers.

use glivenko::decide::{decide, var_span, LogicSpec};
use glivenko::formula::{Formula, Shape, Signature};
use glivenko::genrand::{enumerate_formulas, formula_pool};
use glivenko::tableau::{tableau_refute, NamedLogic};

/// Truth mask of `f` over a frame given by successor masks, one world per
/// bit; plain recursion, no sharing, no caching.
fn eval_mask(f: &Formula, succ: &[u64], worlds: usize, val: &[u64]) -> u64 {
    let full = if worlds == 64 {
        u64::MAX
    } else {
        (1u64 << worlds) - 1
    };
    match f.shape() {
        Shape::Var(j) => val.get(j).copied().unwrap_or(0),
        Shape::Falsum => 0,
        Shape::Implies(a, b) => {
            (!eval_mask(a, succ, worlds, val) | eval_mask(b, succ, worlds, val)) & full
        }
        Shape::Diamond(_, a) => {
            let t = eval_mask(a, succ, worlds, val);
            let mut out = 0;
            for (w, &s) in succ.iter().enumerate() {
                if s & t != 0 {
                    out |= 1 << w;
                }
            }
            out
        }
    }
}

fn reflexive(succ: &[u64]) -> bool {
    succ.iter().enumerate().all(|(w, &s)| s >> w & 1 == 1)
}

fn transitive(succ: &[u64]) -> bool {
    succ.iter().all(|&s| {
        let mut rest = s;
        let mut reach = s;
        while rest != 0 {
            let y = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            reach |= succ[y];
        }
        reach & !s == 0
    })
}

fn symmetric(succ: &[u64], worlds: usize) -> bool {
    (0..worlds).all(|u| {
        (0..worlds).all(|v| (succ[u] >> v & 1) == (succ[v] >> u & 1))
    })
}

fn frame_fits(logic: NamedLogic, succ: &[u64], worlds: usize) -> bool {
    match logic {
        NamedLogic::K => true,
        NamedLogic::T => reflexive(succ),
        NamedLogic::K4 => transitive(succ),
        NamedLogic::S4 => reflexive(succ) && transitive(succ),
        NamedLogic::S5 => reflexive(succ) && transitive(succ) && symmetric(succ, worlds),
    }
}

/// Search all frames of the logic's class with up to `max_n` worlds for a
/// model refuting `f` somewhere.
fn brute_refutable(logic: NamedLogic, f: &Formula, max_n: usize) -> bool {
    let nvars = var_span(f);
    for worlds in 1..=max_n {
        let edges = worlds * worlds;
        for rel in 0u64..(1u64 << edges) {
            let succ: Vec<u64> = (0..worlds)
                .map(|w| rel >> (w * worlds) & ((1 << worlds) - 1))
                .collect();
            if !frame_fits(logic, &succ, worlds) {
                continue;
            }
            let bits = nvars * worlds;
            for assignment in 0u64..(1u64 << bits) {
                let val: Vec<u64> = (0..nvars)
                    .map(|j| assignment >> (j * worlds) & ((1 << worlds) - 1))
                    .collect();
                let full = (1u64 << worlds) - 1;
                if eval_mask(f, &succ, worlds, &val) != full {
                    return true;
                }
            }
        }
    }
    false
}

/// Whenever brute force refutes a formula within the bound, the tableau
/// must refute it too; tableau countermodels always model-check and match
/// the logic's frame conditions (asserted in the prover's own tests), so
/// this closes the loop in the other direction.
#[test]
fn tableau_agrees_with_brute_force_frame_search() {
    let formulas = enumerate_formulas(2, 5, 2);
    assert!(formulas.len() > 100);
    for logic in [
        NamedLogic::K,
        NamedLogic::T,
        NamedLogic::K4,
        NamedLogic::S4,
        NamedLogic::S5,
    ] {
        let max_n = if logic == NamedLogic::K { 4 } else { 3 };
        for f in &formulas {
            let refutation = tableau_refute(logic, f).unwrap();
            match &refutation {
                Some((model, world)) => {
                    assert!(
                        !model.satisfies(*world, f).unwrap(),
                        "{logic:?}: countermodel for {f} does not model-check"
                    );
                }
                None => {
                    assert!(
                        !brute_refutable(logic, f, max_n),
                        "{logic:?}: tableau claims {f} valid, brute force refutes it"
                    );
                }
            }
        }
    }
}

/// For the equivalence logic, validity of a formula with d diamond
/// subformulas is refutable within a single cluster of at most d+1 points,
/// so brute force over small clusters is a two-sided oracle.
#[test]
fn s5_tableau_is_exactly_cluster_validity() {
    let formulas = enumerate_formulas(2, 5, 2);
    for f in &formulas {
        let valid = tableau_refute(NamedLogic::S5, f).unwrap().is_none();
        let nvars = var_span(f);
        let dia_count = f
            .subformulas()
            .iter()
            .filter(|g| matches!(g.shape(), Shape::Diamond(..)))
            .count();
        let mut refuted = false;
        'sizes: for size in 1..=(dia_count + 1) {
            let succ: Vec<u64> = vec![(1 << size) - 1; size];
            let bits = nvars * size;
            for assignment in 0u64..(1u64 << bits) {
                let val: Vec<u64> = (0..nvars)
                    .map(|j| assignment >> (j * size) & ((1 << size) - 1))
                    .collect();
                if eval_mask(f, &succ, size, &val) != (1u64 << size) - 1 {
                    refuted = true;
                    break 'sizes;
                }
            }
        }
        assert_eq!(valid, !refuted, "formula {f}");
    }
}

/// The canonical-model backend and the tableau are independent routes;
/// on the cluster realization of the equivalence logic they must agree.
#[test]
fn frame_class_route_matches_tableau_on_random_formulas() {
    let cache = glivenko::algebra::CanonicalCache::new();
    let limits = glivenko::algebra::BuildLimits::default();
    for f in formula_pool(41, 120, Signature::unimodal(), 2, 3) {
        let via_tableau = tableau_refute(NamedLogic::S5, &f).unwrap().is_none();
        let class = glivenko::decide::s5_frame_class(var_span(&f));
        let verdict = decide(&LogicSpec::frame_class(class), &f, &cache, &limits).unwrap();
        assert_eq!(via_tableau, verdict.valid, "formula {f}");
    }
}
