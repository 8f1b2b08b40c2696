//! Signed tableau provers for the named unimodal logics K, T, K4, S4, S5.
//!
//! The prover tests satisfiability of the signed set `{F formula}`. Worlds
//! carry sets of signed interned subformulas; boolean rules saturate a
//! world, diamond demands spawn successors. Reflexive logics add the local
//! rule `F <>a  =>  F a`; transitive logics propagate `F <>a` to successors
//! and close a world as a repeat when its full signed set equals an
//! ancestor's, linking back instead of descending forever. S5 is handled as
//! a single cluster in which the truth of every diamond is global.
//!
//! An open saturated structure is turned into a finite countermodel whose
//! relation is closed to match the logic's frame condition; callers
//! model-check the result, so the prover's two answers are cross-checkable.

use std::collections::HashMap;

use crate::bits::Bits;
use crate::formula::{Formula, Shape, Signature};
use crate::kripke::{Frame, Model, Valuation};
use crate::{Error, Result};

/// The named logics with tableau backends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NamedLogic {
    K,
    T,
    K4,
    S4,
    S5,
}

impl NamedLogic {
    pub fn name(&self) -> &'static str {
        match self {
            NamedLogic::K => "k",
            NamedLogic::T => "t",
            NamedLogic::K4 => "k4",
            NamedLogic::S4 => "s4",
            NamedLogic::S5 => "s5",
        }
    }

    pub fn parse_name(s: &str) -> Option<NamedLogic> {
        match s.to_ascii_lowercase().as_str() {
            "k" => Some(NamedLogic::K),
            "t" => Some(NamedLogic::T),
            "k4" => Some(NamedLogic::K4),
            "s4" => Some(NamedLogic::S4),
            "s5" => Some(NamedLogic::S5),
            _ => None,
        }
    }

    fn reflexive(&self) -> bool {
        matches!(self, NamedLogic::T | NamedLogic::S4 | NamedLogic::S5)
    }

    fn transitive(&self) -> bool {
        matches!(self, NamedLogic::K4 | NamedLogic::S4)
    }
}

/// Search budget: processed signed formulas across all branches.
const STEP_BUDGET: u64 = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum INode {
    Var(u32),
    Falsum,
    Implies(u32, u32),
    Diamond(u32),
}

/// Hash-consed unimodal subformula table; structurally equal subtrees get
/// one id regardless of sharing in the input.
struct Interner {
    nodes: Vec<INode>,
    shallow: HashMap<(u8, u32, u32), u32>,
}

impl Interner {
    fn new() -> Self {
        Interner {
            nodes: Vec::new(),
            shallow: HashMap::new(),
        }
    }

    fn intern(&mut self, f: &Formula, ptr_memo: &mut HashMap<usize, u32>) -> Result<u32> {
        if let Some(&id) = ptr_memo.get(&f.ptr_key()) {
            return Ok(id);
        }
        let node = match f.shape() {
            Shape::Var(i) => INode::Var(i as u32),
            Shape::Falsum => INode::Falsum,
            Shape::Implies(a, b) => {
                let ia = self.intern(a, ptr_memo)?;
                let ib = self.intern(b, ptr_memo)?;
                INode::Implies(ia, ib)
            }
            Shape::Diamond(i, a) => {
                if i != 0 {
                    return Err(Error::NotUnimodal { index: i });
                }
                let ia = self.intern(a, ptr_memo)?;
                INode::Diamond(ia)
            }
        };
        let key = match node {
            INode::Var(i) => (0, i, 0),
            INode::Falsum => (1, 0, 0),
            INode::Implies(a, b) => (2, a, b),
            INode::Diamond(a) => (3, a, 0),
        };
        let id = match self.shallow.get(&key) {
            Some(&id) => id,
            None => {
                let id = self.nodes.len() as u32;
                self.nodes.push(node);
                self.shallow.insert(key, id);
                id
            }
        };
        ptr_memo.insert(f.ptr_key(), id);
        Ok(id)
    }

    fn diamond_ids(&self) -> Vec<u32> {
        self.nodes
            .iter()
            .enumerate()
            .filter_map(|(i, n)| matches!(n, INode::Diamond(_)).then_some(i as u32))
            .collect()
    }
}

// Signed ids: T f = 2*id, F f = 2*id + 1.
fn t_(id: u32) -> u32 {
    id * 2
}
fn f_(id: u32) -> u32 {
    id * 2 + 1
}
fn id_of(sid: u32) -> u32 {
    sid / 2
}
fn is_f(sid: u32) -> bool {
    sid & 1 == 1
}

type SignedSet = Bits;

/// Per-world work queues: non-branching rule applications are exhausted
/// before any true implication branches, which keeps the search shallow.
#[derive(Clone, Default)]
struct Todo {
    simple: Vec<u32>,
    branches: std::collections::VecDeque<u32>,
}

/// Insert a signed formula; false on clash with its opposite or `T false`.
fn add(set: &mut SignedSet, todo: &mut Todo, sid: u32, interner: &Interner) -> bool {
    if set.get(sid as usize) {
        return true;
    }
    if set.get((sid ^ 1) as usize) {
        return false;
    }
    let node = interner.nodes[id_of(sid) as usize];
    if !is_f(sid) && node == INode::Falsum {
        return false;
    }
    set.set(sid as usize, true);
    if !is_f(sid) && matches!(node, INode::Implies(..)) {
        todo.branches.push_back(sid);
    } else {
        todo.simple.push(sid);
    }
    true
}

/// Depth-first enumeration of the open saturated completions of a world's
/// signed set, in a fixed branch order.
struct BranchIter {
    stack: Vec<(SignedSet, Todo)>,
}

impl BranchIter {
    fn new(set: SignedSet, todo: Todo) -> Self {
        BranchIter {
            stack: vec![(set, todo)],
        }
    }

    fn next_saturated(
        &mut self,
        interner: &Interner,
        logic: NamedLogic,
        steps: &mut u64,
    ) -> Result<Option<SignedSet>> {
        'states: while let Some((mut set, mut todo)) = self.stack.pop() {
            loop {
                *steps += 1;
                if *steps > STEP_BUDGET {
                    return Err(Error::SearchBudget);
                }
                if let Some(sid) = todo.simple.pop() {
                    let node = interner.nodes[id_of(sid) as usize];
                    match (is_f(sid), node) {
                        (true, INode::Implies(a, b)) => {
                            if !add(&mut set, &mut todo, t_(a), interner)
                                || !add(&mut set, &mut todo, f_(b), interner)
                            {
                                continue 'states;
                            }
                        }
                        (true, INode::Diamond(a)) if logic.reflexive() => {
                            if !add(&mut set, &mut todo, f_(a), interner) {
                                continue 'states;
                            }
                        }
                        _ => {}
                    }
                } else if let Some(sid) = todo.branches.pop_front() {
                    let (a, b) = match interner.nodes[id_of(sid) as usize] {
                        INode::Implies(a, b) => (a, b),
                        _ => unreachable!(),
                    };
                    // already satisfied: no branching needed
                    if set.get(f_(a) as usize) || set.get(t_(b) as usize) {
                        continue;
                    }
                    // branch: F a explored first, T b saved for backtracking
                    let mut right_set = set.clone();
                    let mut right_todo = todo.clone();
                    if add(&mut right_set, &mut right_todo, t_(b), interner) {
                        self.stack.push((right_set, right_todo));
                    }
                    if !add(&mut set, &mut todo, f_(a), interner) {
                        continue 'states;
                    }
                } else {
                    return Ok(Some(set));
                }
            }
        }
        Ok(None)
    }
}

enum Edge {
    Child(Box<Tree>),
    Back(usize),
}

struct Tree {
    set: SignedSet,
    children: Vec<Edge>,
}

struct WorldProver<'a> {
    interner: &'a Interner,
    logic: NamedLogic,
    dias: Vec<u32>,
    steps: u64,
}

impl<'a> WorldProver<'a> {
    fn solve(&mut self, set: SignedSet, todo: Todo, ancestors: &mut Vec<SignedSet>) -> Result<Option<Tree>> {
        let mut iter = BranchIter::new(set, todo);
        while let Some(sat) = iter.next_saturated(self.interner, self.logic, &mut self.steps)? {
            if self.logic.transitive() {
                if let Some(pos) = ancestors.iter().position(|a| *a == sat) {
                    return Ok(Some(Tree {
                        set: sat,
                        children: vec![Edge::Back(pos)],
                    }));
                }
            }
            if let Some(tree) = self.expand(sat, ancestors)? {
                return Ok(Some(tree));
            }
        }
        Ok(None)
    }

    /// Spawn a successor for every diamond demand of a saturated set.
    fn expand(&mut self, sat: SignedSet, ancestors: &mut Vec<SignedSet>) -> Result<Option<Tree>> {
        let demands: Vec<u32> = self
            .dias
            .iter()
            .copied()
            .filter(|&d| sat.get(t_(d) as usize))
            .collect();
        if demands.is_empty() {
            return Ok(Some(Tree {
                set: sat,
                children: Vec::new(),
            }));
        }
        let false_dias: Vec<u32> = self
            .dias
            .iter()
            .copied()
            .filter(|&d| sat.get(f_(d) as usize))
            .collect();
        ancestors.push(sat);
        let mut children = Vec::new();
        for d in &demands {
            let inner = match self.interner.nodes[*d as usize] {
                INode::Diamond(a) => a,
                _ => unreachable!(),
            };
            let mut seed = Bits::empty(self.interner.nodes.len() * 2);
            let mut todo = Todo::default();
            let mut ok = add(&mut seed, &mut todo, t_(inner), self.interner);
            for &fd in &false_dias {
                if !ok {
                    break;
                }
                let fa = match self.interner.nodes[fd as usize] {
                    INode::Diamond(a) => a,
                    _ => unreachable!(),
                };
                ok = add(&mut seed, &mut todo, f_(fa), self.interner);
                if ok && self.logic.transitive() {
                    ok = add(&mut seed, &mut todo, f_(fd), self.interner);
                }
            }
            let child = if ok {
                self.solve(seed, todo, ancestors)?
            } else {
                None
            };
            match child {
                Some(t) => children.push(Edge::Child(Box::new(t))),
                None => {
                    ancestors.pop();
                    return Ok(None);
                }
            }
        }
        let sat = ancestors.pop().expect("pushed above");
        Ok(Some(Tree { set: sat, children }))
    }
}

/// Flatten the world tree into (signed set per world, edge list), root first.
fn flatten(tree: &Tree, path: &mut Vec<usize>, worlds: &mut Vec<SignedSet>, edges: &mut Vec<(usize, usize)>) -> usize {
    let w = worlds.len();
    worlds.push(tree.set.clone());
    path.push(w);
    for edge in &tree.children {
        match edge {
            Edge::Child(t) => {
                let c = flatten(t, path, worlds, edges);
                edges.push((w, c));
            }
            Edge::Back(pos) => edges.push((w, path[*pos])),
        }
    }
    path.pop();
    w
}

/// Assemble a model from world sets and raw edges, closing the relation to
/// match the logic's frame condition.
fn assemble_model(
    interner: &Interner,
    logic: NamedLogic,
    worlds: &[SignedSet],
    edges: &[(usize, usize)],
    nvars: usize,
) -> Model {
    let n = worlds.len();
    let mut adj = vec![vec![false; n]; n];
    for &(u, v) in edges {
        adj[u][v] = true;
    }
    if logic == NamedLogic::S5 {
        for row in adj.iter_mut() {
            for cell in row.iter_mut() {
                *cell = true;
            }
        }
    } else {
        if logic.transitive() {
            for mid in 0..n {
                for u in 0..n {
                    if adj[u][mid] {
                        for v in 0..n {
                            if adj[mid][v] {
                                adj[u][v] = true;
                            }
                        }
                    }
                }
            }
        }
        if logic.reflexive() {
            for (u, row) in adj.iter_mut().enumerate() {
                row[u] = true;
            }
        }
    }
    let mut frame = Frame::new(Signature::unimodal(), n);
    for (u, row) in adj.iter().enumerate() {
        for (v, &present) in row.iter().enumerate() {
            if present {
                frame.add_edge(0, u, v);
            }
        }
    }
    let mut valuation = Valuation::empty(nvars, n);
    for j in 0..nvars {
        let var_id = interner
            .shallow
            .get(&(0, j as u32, 0))
            .copied();
        let mut set = Bits::empty(n);
        if let Some(id) = var_id {
            for (w, ws) in worlds.iter().enumerate() {
                if ws.get(t_(id) as usize) {
                    set.set(w, true);
                }
            }
        }
        valuation.set(j, set);
    }
    Model::new(frame, valuation)
}

// ---------------------------------------------------------------------------
// S5: a single cluster with globally uniform diamonds
// ---------------------------------------------------------------------------

#[derive(Clone)]
struct S5State {
    worlds: Vec<SignedSet>,
    simple: Vec<(usize, u32)>,
    branches: std::collections::VecDeque<(usize, u32)>,
    /// ids with a global `F <>a` constraint
    fdia: Bits,
    /// ids with a witnessed `T <>a` demand
    tdia: Bits,
}

fn s5_add(state: &mut S5State, w: usize, sid: u32, interner: &Interner) -> bool {
    let set = &mut state.worlds[w];
    if set.get(sid as usize) {
        return true;
    }
    if set.get((sid ^ 1) as usize) {
        return false;
    }
    let node = interner.nodes[id_of(sid) as usize];
    if !is_f(sid) && node == INode::Falsum {
        return false;
    }
    set.set(sid as usize, true);
    if !is_f(sid) && matches!(node, INode::Implies(..)) {
        state.branches.push_back((w, sid));
    } else {
        state.simple.push((w, sid));
    }
    true
}

fn s5_solve(interner: &Interner, root_sid: u32, steps: &mut u64) -> Result<Option<Vec<SignedSet>>> {
    let width = interner.nodes.len() * 2;
    let ids = interner.nodes.len();
    let mut init = S5State {
        worlds: vec![Bits::empty(width)],
        simple: Vec::new(),
        branches: std::collections::VecDeque::new(),
        fdia: Bits::empty(ids),
        tdia: Bits::empty(ids),
    };
    if !s5_add(&mut init, 0, root_sid, interner) {
        return Ok(None);
    }
    let mut stack = vec![init];
    'states: while let Some(mut st) = stack.pop() {
        loop {
            *steps += 1;
            if *steps > STEP_BUDGET {
                return Err(Error::SearchBudget);
            }
            if let Some((w, sid)) = st.simple.pop() {
                let node = interner.nodes[id_of(sid) as usize];
                match (is_f(sid), node) {
                    (true, INode::Implies(a, b)) => {
                        if !s5_add(&mut st, w, t_(a), interner)
                            || !s5_add(&mut st, w, f_(b), interner)
                        {
                            continue 'states;
                        }
                    }
                    (false, INode::Diamond(a)) => {
                        let did = id_of(sid) as usize;
                        if st.fdia.get(did) {
                            continue 'states;
                        }
                        if st.tdia.get(did) {
                            continue;
                        }
                        st.tdia.set(did, true);
                        // spawn a witness world satisfying a and every
                        // global diamond prohibition
                        let nw = st.worlds.len();
                        st.worlds.push(Bits::empty(width));
                        if !s5_add(&mut st, nw, t_(a), interner) {
                            continue 'states;
                        }
                        let banned: Vec<usize> = st.fdia.iter_ones().collect();
                        for fd in banned {
                            let inner = match interner.nodes[fd] {
                                INode::Diamond(x) => x,
                                _ => unreachable!(),
                            };
                            if !s5_add(&mut st, nw, f_(inner), interner) {
                                continue 'states;
                            }
                        }
                    }
                    (true, INode::Diamond(a)) => {
                        let did = id_of(sid) as usize;
                        if st.tdia.get(did) {
                            continue 'states;
                        }
                        if st.fdia.get(did) {
                            continue;
                        }
                        st.fdia.set(did, true);
                        // a fails everywhere in the cluster
                        for wi in 0..st.worlds.len() {
                            if !s5_add(&mut st, wi, f_(a), interner) {
                                continue 'states;
                            }
                        }
                    }
                    _ => {}
                }
            } else if let Some((w, sid)) = st.branches.pop_front() {
                let (a, b) = match interner.nodes[id_of(sid) as usize] {
                    INode::Implies(a, b) => (a, b),
                    _ => unreachable!(),
                };
                if st.worlds[w].get(f_(a) as usize) || st.worlds[w].get(t_(b) as usize) {
                    continue;
                }
                let mut right = st.clone();
                if s5_add(&mut right, w, t_(b), interner) {
                    stack.push(right);
                }
                if !s5_add(&mut st, w, f_(a), interner) {
                    continue 'states;
                }
            } else {
                break;
            }
        }
        // saturated; the per-rule checks keep the global diamond sets
        // disjoint, re-assert for safety
        if st.fdia.intersects(&st.tdia) {
            continue 'states;
        }
        return Ok(Some(st.worlds));
    }
    Ok(None)
}

/// Decide the formula in the given named logic. `None` means valid;
/// otherwise a countermodel and the world refuting the formula.
pub fn tableau_refute(logic: NamedLogic, f: &Formula) -> Result<Option<(Model, usize)>> {
    let mut interner = Interner::new();
    let root = interner.intern(f, &mut HashMap::new())?;
    let nvars = f.variables().iter().next_back().map_or(0, |&v| v + 1);
    let mut steps = 0u64;
    match logic {
        NamedLogic::S5 => {
            let open = s5_solve(&interner, f_(root), &mut steps)?;
            Ok(open.map(|worlds| {
                let model = assemble_model(&interner, logic, &worlds, &[], nvars);
                (model, 0)
            }))
        }
        _ => {
            let width = interner.nodes.len() * 2;
            let mut seed = Bits::empty(width);
            let mut todo = Todo::default();
            if !add(&mut seed, &mut todo, f_(root), &interner) {
                return Ok(None);
            }
            let mut prover = WorldProver {
                interner: &interner,
                logic,
                dias: interner.diamond_ids(),
                steps,
            };
            let tree = prover.solve(seed, todo, &mut Vec::new())?;
            Ok(tree.map(|t| {
                let mut worlds = Vec::new();
                let mut edges = Vec::new();
                flatten(&t, &mut Vec::new(), &mut worlds, &mut edges);
                let model = assemble_model(&interner, logic, &worlds, &edges, nvars);
                (model, 0)
            }))
        }
    }
}

/// Validity in the named logic.
pub fn tableau_valid(logic: NamedLogic, f: &Formula) -> Result<bool> {
    Ok(tableau_refute(logic, f)?.is_none())
}
