//! Seeded random generation and deterministic enumeration of formulas,
//! models, and frames. Every function takes its randomness explicitly, so
//! suites are reproducible from a single seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::{height, random_frame};
use crate::bits::Bits;
use crate::formula::{Formula, Signature};
use crate::kripke::{reach, relation_pairs, Frame, Model, Reach, Valuation};

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random formula over `vars` variables with modal depth at most `depth`
/// and roughly `fuel` connectives.
pub fn random_formula_sized(
    rng: &mut ChaCha8Rng,
    sig: Signature,
    vars: usize,
    depth: usize,
    fuel: &mut usize,
) -> Formula {
    let leaf = |rng: &mut ChaCha8Rng| {
        if vars == 0 || rng.gen_range(0..5) == 0 {
            if rng.gen_bool(0.5) {
                Formula::falsum()
            } else {
                Formula::top()
            }
        } else {
            Formula::var(rng.gen_range(0..vars))
        }
    };
    if *fuel == 0 {
        return leaf(rng);
    }
    *fuel -= 1;
    let modal_ok = depth > 0;
    // weights: leaf 4, not 2, and 2, or 2, implies 3, iff 1, dia 4, box 4
    // (modal ones only while depth remains)
    let total = 14 + if modal_ok { 8 } else { 0 };
    match rng.gen_range(0..total) {
        0..=3 => leaf(rng),
        4..=5 => Formula::not(random_formula_sized(rng, sig, vars, depth, fuel)),
        6..=7 => Formula::and(
            random_formula_sized(rng, sig, vars, depth, fuel),
            random_formula_sized(rng, sig, vars, depth, fuel),
        ),
        8..=9 => Formula::or(
            random_formula_sized(rng, sig, vars, depth, fuel),
            random_formula_sized(rng, sig, vars, depth, fuel),
        ),
        10..=12 => Formula::implies(
            random_formula_sized(rng, sig, vars, depth, fuel),
            random_formula_sized(rng, sig, vars, depth, fuel),
        ),
        13 => Formula::iff(
            random_formula_sized(rng, sig, vars, depth, fuel),
            random_formula_sized(rng, sig, vars, depth, fuel),
        ),
        roll => {
            let i = rng.gen_range(0..sig.n());
            let sub = random_formula_sized(rng, sig, vars, depth - 1, fuel);
            if roll < 14 + 4 {
                Formula::diamond(i, sub)
            } else {
                Formula::box_(i, sub)
            }
        }
    }
}

/// `random_formula_sized` with a default connective budget.
pub fn random_formula(rng: &mut ChaCha8Rng, sig: Signature, vars: usize, depth: usize) -> Formula {
    random_formula_sized(rng, sig, vars, depth, &mut 20)
}

/// A reproducible pool of random formulas.
pub fn formula_pool(
    seed: u64,
    count: usize,
    sig: Signature,
    vars: usize,
    depth: usize,
) -> Vec<Formula> {
    let mut rng = rng_from_seed(seed);
    (0..count)
        .map(|_| random_formula(&mut rng, sig, vars, depth))
        .collect()
}

/// All kernel formulas over `vars` variables and the unimodal diamond with
/// at most `max_size` AST nodes and modal depth at most `max_depth`,
/// ordered by size and then by structural order within each size.
pub fn enumerate_formulas(vars: usize, max_size: usize, max_depth: usize) -> Vec<Formula> {
    let mut by_size: Vec<Vec<Formula>> = vec![Vec::new(); max_size + 1];
    if max_size == 0 {
        return Vec::new();
    }
    for v in 0..vars {
        by_size[1].push(Formula::var(v));
    }
    by_size[1].push(Formula::falsum());
    for size in 2..=max_size {
        let mut level = Vec::new();
        for f in &by_size[size - 1] {
            if f.modal_depth() < max_depth {
                level.push(Formula::diamond(0, f.clone()));
            }
        }
        for left in 1..size - 1 {
            let right = size - 1 - left;
            for a in &by_size[left] {
                for b in &by_size[right] {
                    level.push(Formula::implies(a.clone(), b.clone()));
                }
            }
        }
        level.sort();
        by_size[size] = level;
    }
    let mut out = Vec::new();
    for mut level in by_size {
        level.sort();
        out.append(&mut level);
    }
    out
}

/// A model over `fr` with a random valuation for `k` variables.
pub fn random_model(fr: &Frame, k: usize, seed: u64) -> Model {
    let mut rng = rng_from_seed(seed);
    let mut valuation = Valuation::empty(k, fr.worlds());
    for j in 0..k {
        let mut set = Bits::empty(fr.worlds());
        for w in 0..fr.worlds() {
            if rng.gen_bool(0.5) {
                set.set(w, true);
            }
        }
        valuation.set(j, set);
    }
    Model::new(fr.clone(), valuation)
}

/// The reflexive-transitive closure of a unimodal frame, as a frame.
pub fn preorder_closure(fr: &Frame) -> Frame {
    let star = reach(fr, Reach::Star);
    Frame::unimodal(fr.worlds(), &relation_pairs(&star))
}

/// Seeded random preorder with at most `max_worlds` worlds and height at
/// most `max_height`, found by closing random frames and rejecting taller
/// ones; the attempt count is deterministic for a fixed seed.
pub fn random_bounded_preorder(rng: &mut ChaCha8Rng, max_worlds: usize, max_height: usize) -> Frame {
    loop {
        let worlds = rng.gen_range(1..=max_worlds);
        let density = rng.gen_range(0.2..0.9);
        let fr = random_frame(worlds, 1, density, rng.gen());
        let closed = preorder_closure(&fr);
        if height(&closed) <= max_height {
            return closed;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::transitivity_degree;

    #[test]
    fn pools_are_deterministic() {
        let sig = Signature::new(2);
        let a = formula_pool(9, 20, sig, 2, 3);
        let b = formula_pool(9, 20, sig, 2, 3);
        assert_eq!(a, b);
        let c = formula_pool(10, 20, sig, 2, 3);
        assert_ne!(a, c);
    }

    #[test]
    fn enumeration_counts_and_order() {
        let fs = enumerate_formulas(1, 4, 2);
        // sizes are nondecreasing and every entry respects the bounds
        let mut last = 0;
        for f in &fs {
            let s = f.node_count();
            assert!(s >= last);
            last = s;
            assert!(s <= 4);
            assert!(f.modal_depth() <= 2);
            assert!(f.variables().iter().all(|&v| v < 1));
        }
        // size 1: p0, false; size 2: <0>p0, <0>false
        assert_eq!(fs.iter().filter(|f| f.node_count() == 1).count(), 2);
        assert_eq!(fs.iter().filter(|f| f.node_count() == 2).count(), 2);
        // distinct
        let set: std::collections::BTreeSet<_> = fs.iter().cloned().collect();
        assert_eq!(set.len(), fs.len());
    }

    #[test]
    fn enumeration_reaches_the_advertised_volume() {
        let fs = enumerate_formulas(1, 9, 2);
        assert!(fs.len() >= 2000, "got {}", fs.len());
    }

    #[test]
    fn bounded_preorders_are_preorders_of_bounded_height() {
        let mut rng = rng_from_seed(5);
        for _ in 0..30 {
            let fr = random_bounded_preorder(&mut rng, 6, 2);
            assert!(height(&fr) <= 2);
            assert_eq!(transitivity_degree(&fr), if is_trivial(&fr) { 0 } else { 1 });
        }
    }

    fn is_trivial(fr: &Frame) -> bool {
        // identity-only preorders have degree 0
        (0..fr.worlds()).all(|x| {
            fr.successors(0, x).iter_ones().all(|y| y == x)
        })
    }
}
