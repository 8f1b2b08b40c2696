//! Polymodal propositional formulas.
//!
//! The kernel AST has exactly four constructors: variables, falsum,
//! implication, and indexed diamonds. Every other connective (negation,
//! conjunction, disjunction, equivalence, verum, boxes) is an abbreviation
//! expanded at construction time. Formulas are immutable and share subtrees
//! through `Arc`, which keeps the large generated schemes (Jankov-Fine and
//! depth formulas) cheap to build and to evaluate.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use crate::{Error, Result};

/// Number of modalities; diamonds are indexed `0..n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Signature {
    n: usize,
}

impl Signature {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "signature needs at least one modality");
        Signature { n }
    }

    pub fn unimodal() -> Self {
        Signature::new(1)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn check_modality(&self, index: usize) -> Result<()> {
        if index < self.n {
            Ok(())
        } else {
            Err(Error::ModalityOutOfRange { index, n: self.n })
        }
    }
}

#[derive(Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Node {
    Var(u32),
    Falsum,
    Implies(Formula, Formula),
    Diamond(u32, Formula),
}

/// An immutable modal formula over the kernel connectives.
#[derive(Clone)]
pub struct Formula(Arc<Node>);

impl PartialEq for Formula {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || *self.0 == *other.0
    }
}

impl Eq for Formula {}

impl std::hash::Hash for Formula {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.0.hash(state)
    }
}

impl PartialOrd for Formula {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Formula {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            std::cmp::Ordering::Equal
        } else {
            self.0.cmp(&other.0)
        }
    }
}

impl std::fmt::Debug for Formula {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.render())
    }
}

impl std::fmt::Display for Formula {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.render())
    }
}

/// A view of the top connective, used for pattern matching outside this
/// module without exposing the internal `Arc`.
pub enum Shape<'a> {
    Var(usize),
    Falsum,
    Implies(&'a Formula, &'a Formula),
    Diamond(usize, &'a Formula),
}

impl Formula {
    pub fn var(index: usize) -> Self {
        Formula(Arc::new(Node::Var(index as u32)))
    }

    pub fn falsum() -> Self {
        Formula(Arc::new(Node::Falsum))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula(Arc::new(Node::Implies(a, b)))
    }

    pub fn diamond(index: usize, a: Formula) -> Self {
        Formula(Arc::new(Node::Diamond(index as u32, a)))
    }

    // Derived connectives, expanded on the spot.

    pub fn not(a: Formula) -> Self {
        Formula::implies(a, Formula::falsum())
    }

    pub fn top() -> Self {
        Formula::not(Formula::falsum())
    }

    /// `a | b` as `~a -> b`.
    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::implies(Formula::not(a), b)
    }

    /// `a & b` as `~(a -> ~b)`.
    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::not(Formula::implies(a, Formula::not(b)))
    }

    pub fn iff(a: Formula, b: Formula) -> Self {
        Formula::and(
            Formula::implies(a.clone(), b.clone()),
            Formula::implies(b, a),
        )
    }

    pub fn box_(index: usize, a: Formula) -> Self {
        Formula::not(Formula::diamond(index, Formula::not(a)))
    }

    /// n-ary disjunction, right-nested; the empty disjunction is falsum.
    pub fn big_or<I: IntoIterator<Item = Formula>>(items: I) -> Self {
        let v: Vec<Formula> = items.into_iter().collect();
        match v.split_last() {
            None => Formula::falsum(),
            Some((last, init)) => init
                .iter()
                .rev()
                .fold(last.clone(), |acc, f| Formula::or(f.clone(), acc)),
        }
    }

    /// n-ary conjunction, right-nested; the empty conjunction is verum.
    pub fn big_and<I: IntoIterator<Item = Formula>>(items: I) -> Self {
        let v: Vec<Formula> = items.into_iter().collect();
        match v.split_last() {
            None => Formula::top(),
            Some((last, init)) => init
                .iter()
                .rev()
                .fold(last.clone(), |acc, f| Formula::and(f.clone(), acc)),
        }
    }

    pub fn shape(&self) -> Shape<'_> {
        match &*self.0 {
            Node::Var(i) => Shape::Var(*i as usize),
            Node::Falsum => Shape::Falsum,
            Node::Implies(a, b) => Shape::Implies(a, b),
            Node::Diamond(i, a) => Shape::Diamond(*i as usize, a),
        }
    }

    /// Stable key for pointer-based memoization during evaluation.
    pub(crate) fn ptr_key(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    /// Simultaneous substitution of variables.
    pub fn substitute(&self, subst: &Substitution) -> Formula {
        let mut memo: HashMap<usize, Formula> = HashMap::new();
        self.substitute_memo(subst, &mut memo)
    }

    fn substitute_memo(
        &self,
        subst: &Substitution,
        memo: &mut HashMap<usize, Formula>,
    ) -> Formula {
        if let Some(f) = memo.get(&self.ptr_key()) {
            return f.clone();
        }
        let out = match &*self.0 {
            Node::Var(i) => match subst.get(*i as usize) {
                Some(f) => f.clone(),
                None => self.clone(),
            },
            Node::Falsum => self.clone(),
            Node::Implies(a, b) => {
                Formula::implies(a.substitute_memo(subst, memo), b.substitute_memo(subst, memo))
            }
            Node::Diamond(i, a) => {
                Formula::diamond(*i as usize, a.substitute_memo(subst, memo))
            }
        };
        memo.insert(self.ptr_key(), out.clone());
        out
    }

    /// All subformulas, including the formula itself.
    pub fn subformulas(&self) -> BTreeSet<Formula> {
        let mut out = BTreeSet::new();
        let mut seen: BTreeSet<usize> = BTreeSet::new();
        let mut stack = vec![self.clone()];
        while let Some(f) = stack.pop() {
            if !seen.insert(f.ptr_key()) {
                continue;
            }
            match &*f.0 {
                Node::Implies(a, b) => {
                    stack.push(a.clone());
                    stack.push(b.clone());
                }
                Node::Diamond(_, a) => stack.push(a.clone()),
                _ => {}
            }
            out.insert(f);
        }
        out
    }

    /// Indices of the variables occurring in the formula.
    pub fn variables(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        let mut seen: BTreeSet<usize> = BTreeSet::new();
        let mut stack = vec![self];
        while let Some(f) = stack.pop() {
            if !seen.insert(f.ptr_key()) {
                continue;
            }
            match &*f.0 {
                Node::Var(i) => {
                    out.insert(*i as usize);
                }
                Node::Implies(a, b) => {
                    stack.push(a);
                    stack.push(b);
                }
                Node::Diamond(_, a) => stack.push(a),
                Node::Falsum => {}
            }
        }
        out
    }

    /// Largest modality index occurring, if any.
    pub fn max_modality(&self) -> Option<usize> {
        let mut out = None;
        let mut seen: BTreeSet<usize> = BTreeSet::new();
        let mut stack = vec![self];
        while let Some(f) = stack.pop() {
            if !seen.insert(f.ptr_key()) {
                continue;
            }
            match &*f.0 {
                Node::Implies(a, b) => {
                    stack.push(a);
                    stack.push(b);
                }
                Node::Diamond(i, a) => {
                    out = Some(out.map_or(*i as usize, |m: usize| m.max(*i as usize)));
                    stack.push(a);
                }
                _ => {}
            }
        }
        out
    }

    /// Modal depth (maximal nesting of diamonds).
    pub fn modal_depth(&self) -> usize {
        fn go(f: &Formula, memo: &mut HashMap<usize, usize>) -> usize {
            if let Some(&d) = memo.get(&f.ptr_key()) {
                return d;
            }
            let d = match &*f.0 {
                Node::Var(_) | Node::Falsum => 0,
                Node::Implies(a, b) => go(a, memo).max(go(b, memo)),
                Node::Diamond(_, a) => go(a, memo) + 1,
            };
            memo.insert(f.ptr_key(), d);
            d
        }
        go(self, &mut HashMap::new())
    }

    /// Number of kernel AST nodes counted as a tree (shared subtrees counted
    /// once per occurrence), saturating at `u64::MAX`.
    pub fn node_count(&self) -> u64 {
        fn go(f: &Formula, memo: &mut HashMap<usize, u64>) -> u64 {
            if let Some(&s) = memo.get(&f.ptr_key()) {
                return s;
            }
            let s = match &*f.0 {
                Node::Var(_) | Node::Falsum => 1,
                Node::Implies(a, b) => 1u64.saturating_add(go(a, memo)).saturating_add(go(b, memo)),
                Node::Diamond(_, a) => 1u64.saturating_add(go(a, memo)),
            };
            memo.insert(f.ptr_key(), s);
            s
        }
        go(self, &mut HashMap::new())
    }

    /// Canonical parenthesized rendering, re-parsable by `parse`.
    pub fn render(&self) -> String {
        let mut s = String::new();
        self.render_into(&mut s);
        s
    }

    fn render_into(&self, out: &mut String) {
        match &*self.0 {
            Node::Var(i) => {
                out.push('p');
                out.push_str(&i.to_string());
            }
            Node::Falsum => out.push_str("false"),
            Node::Implies(a, b) => {
                out.push('(');
                a.render_into(out);
                out.push_str(" -> ");
                b.render_into(out);
                out.push(')');
            }
            Node::Diamond(i, a) => {
                out.push('<');
                out.push_str(&i.to_string());
                out.push_str("> ");
                a.render_into(out);
            }
        }
    }
}

/// One step of the compound diamond: the disjunction of all `<i> f`.
fn dia_step(f: &Formula, sig: Signature) -> Formula {
    Formula::big_or((0..sig.n()).map(|i| Formula::diamond(i, f.clone())))
}

/// The compound diamond `dia^{<=m} f`: the disjunction of `dia^0 f .. dia^m f`
/// where `dia^{i+1}` applies one more layer of single-step diamonds.
pub fn dia_le(m: usize, f: &Formula, sig: Signature) -> Formula {
    let mut powers = Vec::with_capacity(m + 1);
    let mut cur = f.clone();
    powers.push(cur.clone());
    for _ in 0..m {
        cur = dia_step(&cur, sig);
        powers.push(cur.clone());
    }
    Formula::big_or(powers)
}

/// The compound box `box^{<=m} f = ~dia^{<=m} ~f`.
pub fn box_le(m: usize, f: &Formula, sig: Signature) -> Formula {
    Formula::not(dia_le(m, &Formula::not(f.clone()), sig))
}

/// Replace every diamond of a unimodal formula by the compound diamond
/// `dia^{<=m}` over the target signature; boxes follow by duality since the
/// kernel expresses them as negated diamonds.
pub fn star_expand(f: &Formula, m: usize, sig: Signature) -> Result<Formula> {
    let mut memo: HashMap<usize, Formula> = HashMap::new();
    fn go(
        f: &Formula,
        m: usize,
        sig: Signature,
        memo: &mut HashMap<usize, Formula>,
    ) -> Result<Formula> {
        if let Some(g) = memo.get(&f.ptr_key()) {
            return Ok(g.clone());
        }
        let out = match &*f.0 {
            Node::Var(_) | Node::Falsum => f.clone(),
            Node::Implies(a, b) => Formula::implies(go(a, m, sig, memo)?, go(b, m, sig, memo)?),
            Node::Diamond(i, a) => {
                if *i != 0 {
                    return Err(Error::NotUnimodal { index: *i as usize });
                }
                dia_le(m, &go(a, m, sig, memo)?, sig)
            }
        };
        memo.insert(f.ptr_key(), out.clone());
        Ok(out)
    }
    go(f, m, sig, &mut memo)
}

/// A finite map from variable indices to formulas; identity elsewhere.
#[derive(Debug, Clone, Default)]
pub struct Substitution {
    map: BTreeMap<usize, Formula>,
}

impl Substitution {
    pub fn new() -> Self {
        Substitution::default()
    }

    pub fn bind(mut self, var: usize, f: Formula) -> Self {
        self.map.insert(var, f);
        self
    }

    pub fn get(&self, var: usize) -> Option<&Formula> {
        self.map.get(&var)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;

    fn p(i: usize) -> Formula {
        Formula::var(i)
    }

    #[test]
    fn render_kernel_forms() {
        assert_eq!(Formula::falsum().render(), "false");
        assert_eq!(Formula::diamond(0, p(1)).render(), "<0> p1");
        assert_eq!(
            Formula::implies(p(0), Formula::falsum()).render(),
            "(p0 -> false)"
        );
    }

    #[test]
    fn substitution_examples() {
        // (p0 -> p1)[p0 := false]  ==  false -> p1
        let f = Formula::implies(p(0), p(1));
        let s = Substitution::new().bind(0, Formula::falsum());
        assert_eq!(
            f.substitute(&s),
            Formula::implies(Formula::falsum(), p(1))
        );

        // <0> p0 [p0 := p0 & p1]
        let f = Formula::diamond(0, p(0));
        let s = Substitution::new().bind(0, Formula::and(p(0), p(1)));
        assert_eq!(
            f.substitute(&s),
            Formula::diamond(0, Formula::and(p(0), p(1)))
        );

        // identity
        assert_eq!(p(0).substitute(&Substitution::new()), p(0));
    }

    #[test]
    fn dia_le_unfoldings() {
        let sig1 = Signature::unimodal();
        let sig2 = Signature::new(2);
        assert_eq!(dia_le(0, &p(0), sig1), p(0));
        assert_eq!(
            dia_le(1, &p(0), sig1),
            Formula::or(p(0), Formula::diamond(0, p(0)))
        );
        assert_eq!(
            dia_le(1, &p(0), sig2),
            Formula::or(
                p(0),
                Formula::or(Formula::diamond(0, p(0)), Formula::diamond(1, p(0)))
            )
        );
    }

    #[test]
    fn dia_le_adds_exactly_m_to_modal_depth() {
        let sig = Signature::new(2);
        let f = Formula::implies(Formula::diamond(1, p(0)), p(1));
        for m in 0..4 {
            assert_eq!(dia_le(m, &f, sig).modal_depth(), f.modal_depth() + m);
        }
    }

    #[test]
    fn star_expand_examples() {
        let sig1 = Signature::unimodal();
        // <> p0 with m=1 becomes p0 | <0> p0
        let f = Formula::diamond(0, p(0));
        assert_eq!(
            star_expand(&f, 1, sig1).unwrap(),
            Formula::or(p(0), Formula::diamond(0, p(0)))
        );
        // no modalities: unchanged
        let sig2 = Signature::new(2);
        assert_eq!(star_expand(&p(0), 3, sig2).unwrap(), p(0));
        // box p0 with m=1 becomes ~(~p0 | <0> ~p0)
        let b = Formula::box_(0, p(0));
        let not_p = Formula::not(p(0));
        assert_eq!(
            star_expand(&b, 1, sig1).unwrap(),
            Formula::not(Formula::or(not_p.clone(), Formula::diamond(0, not_p)))
        );
        // distributes over implication
        let g = Formula::implies(Formula::diamond(0, p(0)), Formula::diamond(0, p(1)));
        let lhs = star_expand(&g, 2, sig1).unwrap();
        if let Shape::Implies(a, b) = lhs.shape() {
            assert_eq!(a, &star_expand(&Formula::diamond(0, p(0)), 2, sig1).unwrap());
            assert_eq!(b, &star_expand(&Formula::diamond(0, p(1)), 2, sig1).unwrap());
        } else {
            panic!("expected implication");
        }
        // non-unimodal input is rejected
        assert!(matches!(
            star_expand(&Formula::diamond(1, p(0)), 1, sig2),
            Err(Error::NotUnimodal { index: 1 })
        ));
    }

    #[test]
    fn subformulas_and_variables() {
        let f = Formula::implies(p(0), Formula::falsum());
        let subs = f.subformulas();
        assert_eq!(subs.len(), 3);
        assert!(subs.contains(&p(0)));
        assert!(subs.contains(&Formula::falsum()));
        assert!(subs.contains(&f));

        assert_eq!(
            Formula::diamond(0, p(2)).variables().into_iter().collect::<Vec<_>>(),
            vec![2]
        );
        assert!(Formula::falsum().variables().is_empty());
    }

    #[test]
    fn empty_big_ops() {
        assert_eq!(Formula::big_or([]), Formula::falsum());
        assert_eq!(Formula::big_and([]), Formula::top());
        assert_eq!(Formula::big_or([p(3)]), p(3));
        assert_eq!(Formula::big_and([p(3)]), p(3));
    }

    #[test]
    fn roundtrip_of_generated_schemes() {
        let sig = Signature::new(2);
        let f = box_le(2, &Formula::iff(p(0), Formula::diamond(1, p(1))), sig);
        assert_eq!(parse(&f.render(), sig).unwrap(), f);
    }
}
