//! Order-theoretic frame structure: transitivity degree, clusters, skeleton,
//! height, depth, top restrictions, heaviness, maximal elements, and the
//! frame builders used throughout the verification suites.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits::Bits;
use crate::formula::Signature;
use crate::kripke::{reach, relation_eq, Frame, Reach};
use crate::{Error, Result};

/// The cluster partition of a frame together with the partial order on
/// clusters induced by reachability.
#[derive(Debug, Clone)]
pub struct Skeleton {
    /// Clusters sorted by their smallest world; each cluster lists its
    /// worlds ascending.
    pub clusters: Vec<Vec<usize>>,
    /// `order[c]` is the set of clusters reachable from `c` (reflexive).
    pub order: Vec<Bits>,
    /// Cluster index of each world.
    pub cluster_of: Vec<usize>,
}

impl Skeleton {
    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    /// Strict order pairs `(c, d)` with `c < d`.
    pub fn strict_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (c, up) in self.order.iter().enumerate() {
            for d in up.iter_ones() {
                if d != c {
                    out.push((c, d));
                }
            }
        }
        out
    }
}

/// Clusters as equivalence classes of mutual reachability, i.e. the strongly
/// connected components of the union relation, with the skeleton order.
pub fn clusters(fr: &Frame) -> Skeleton {
    let star = reach(fr, Reach::Star);
    let n = fr.worlds();
    // x ~ y iff x R* y and y R* x; R* is reflexive so every world has a cluster
    let mut cluster_of = vec![usize::MAX; n];
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for x in 0..n {
        if cluster_of[x] != usize::MAX {
            continue;
        }
        let id = clusters.len();
        let members: Vec<usize> = star[x]
            .iter_ones()
            .filter(|&y| star[y].get(x))
            .collect();
        for &y in &members {
            cluster_of[y] = id;
        }
        clusters.push(members);
    }
    let count = clusters.len();
    let mut order = vec![Bits::empty(count); count];
    for x in 0..n {
        for y in star[x].iter_ones() {
            order[cluster_of[x]].set(cluster_of[y], true);
        }
    }
    Skeleton {
        clusters,
        order,
        cluster_of,
    }
}

/// Depth of each cluster: the height of the part of the skeleton above it
/// (a maximal cluster has depth 1).
fn cluster_depths(sk: &Skeleton) -> Vec<usize> {
    fn go(c: usize, sk: &Skeleton, memo: &mut [usize]) -> usize {
        if memo[c] != 0 {
            return memo[c];
        }
        let mut best = 0;
        for d in sk.order[c].iter_ones() {
            if d != c {
                best = best.max(go(d, sk, memo));
            }
        }
        memo[c] = best + 1;
        memo[c]
    }
    let mut memo = vec![0; sk.len()];
    for c in 0..sk.len() {
        go(c, sk, &mut memo);
    }
    memo
}

/// Height of the frame: the longest chain of clusters in the skeleton.
pub fn height(fr: &Frame) -> usize {
    let sk = clusters(fr);
    cluster_depths(&sk).into_iter().max().unwrap_or(0)
}

/// Depth of each world: the height of its generated subframe.
pub fn depths(fr: &Frame) -> Vec<usize> {
    let sk = clusters(fr);
    let cd = cluster_depths(&sk);
    (0..fr.worlds()).map(|x| cd[sk.cluster_of[x]]).collect()
}

/// Depth of a single world.
pub fn depth(fr: &Frame, world: usize) -> usize {
    depths(fr)[world]
}

/// Least `m` with `R^{<=m} = R^*`; exists for every finite frame.
pub fn transitivity_degree(fr: &Frame) -> usize {
    let star = reach(fr, Reach::Star);
    let mut m = 0;
    loop {
        if relation_eq(&reach(fr, Reach::Steps(m)), &star) {
            return m;
        }
        m += 1;
    }
}

/// Restriction of the frame to its worlds of depth at most `h`, together
/// with the re-indexing map from old to new world numbers.
pub fn top_restriction(fr: &Frame, h: usize) -> (Frame, HashMap<usize, usize>) {
    assert!(h >= 1, "top restriction needs h >= 1");
    let d = depths(fr);
    let keep = Bits::from_indices(
        fr.worlds(),
        &(0..fr.worlds()).filter(|&x| d[x] <= h).collect::<Vec<_>>(),
    );
    fr.restrict(&keep)
}

/// A frame is h-heavy if every world outside the depth-at-most-h part can
/// reach a world of depth exactly h.
pub fn is_h_heavy(fr: &Frame, h: usize) -> bool {
    assert!(h >= 1);
    let d = depths(fr);
    let star = reach(fr, Reach::Star);
    (0..fr.worlds()).all(|x| d[x] <= h || star[x].iter_ones().any(|y| d[y] == h))
}

/// The reachability-maximal elements of a nonempty subset: those `x` with
/// `x R* y` implying `y R* x` for all `y` in the subset.
pub fn maximal_elements(fr: &Frame, subset: &Bits) -> Result<Bits> {
    if subset.is_empty_set() {
        return Err(Error::EmptySubset);
    }
    let star = reach(fr, Reach::Star);
    let mut out = Bits::empty(fr.worlds());
    for x in subset.iter_ones() {
        let maximal = subset
            .iter_ones()
            .all(|y| !star[x].get(y) || star[y].get(x));
        if maximal {
            out.set(x, true);
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Frame builders
// ---------------------------------------------------------------------------

/// Worlds `0..=n_top` with `x R y` iff `x <= y` or `x = n_top`; the top world
/// stands for the limit point of the infinite version, so the whole frame is
/// a single cluster.
pub fn omega_top_frame(n_top: usize) -> Frame {
    assert!(n_top >= 1);
    let worlds = n_top + 1;
    let mut fr = Frame::new(Signature::unimodal(), worlds);
    for x in 0..worlds {
        for y in 0..worlds {
            if x <= y || x == n_top {
                fr.add_edge(0, x, y);
            }
        }
    }
    fr
}

/// Worlds `0..=n_top`; among `0..n_top` the relation excludes immediate
/// neighbours (`x R y` iff `x != y+1` and `y != x+1`), and every world sees
/// the top world, which stands for the limit point.
pub fn neighbor_exclusion_frame(n_top: usize) -> Frame {
    assert!(n_top >= 1);
    let worlds = n_top + 1;
    let mut fr = Frame::new(Signature::unimodal(), worlds);
    for x in 0..worlds {
        for y in 0..worlds {
            let base = x < n_top && y < n_top && x != y + 1 && y != x + 1;
            if base || y == n_top {
                fr.add_edge(0, x, y);
            }
        }
    }
    fr
}

/// Random frame: each of the `n * N * N` possible edges is present with the
/// given probability. Deterministic for a fixed seed.
pub fn random_frame(worlds: usize, n: usize, density: f64, seed: u64) -> Frame {
    assert!(worlds >= 1 && n >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fr = Frame::new(Signature::new(n), worlds);
    for i in 0..n {
        for x in 0..worlds {
            for y in 0..worlds {
                if rng.gen_bool(density.clamp(0.0, 1.0)) {
                    fr.add_edge(i, x, y);
                }
            }
        }
    }
    fr
}

/// Chain of total clusters, bottom to top; `cluster_chain(&[2, 1])` is the
/// three-point frame with a two-element cluster below a singleton.
pub fn cluster_chain(sizes: &[usize]) -> Frame {
    assert!(!sizes.is_empty() && sizes.iter().all(|&s| s >= 1));
    let worlds: usize = sizes.iter().sum();
    let mut fr = Frame::new(Signature::unimodal(), worlds);
    let mut start = 0;
    let mut starts = Vec::new();
    for &s in sizes {
        starts.push(start);
        start += s;
    }
    for (ci, &s) in sizes.iter().enumerate() {
        let lo = starts[ci];
        // total relation within the cluster
        for x in lo..lo + s {
            for y in lo..lo + s {
                fr.add_edge(0, x, y);
            }
        }
        // edges to every higher cluster
        for (cj, &t) in sizes.iter().enumerate().skip(ci + 1) {
            let lo2 = starts[cj];
            for x in lo..lo + s {
                for y in lo2..lo2 + t {
                    fr.add_edge(0, x, y);
                }
            }
        }
    }
    fr
}

/// Reflexive transitive chain of `h` singleton clusters.
pub fn chain_preorder(h: usize) -> Frame {
    cluster_chain(&vec![1; h])
}

/// Single total cluster of the given size.
pub fn cluster(size: usize) -> Frame {
    cluster_chain(&[size])
}

pub fn reflexive_singleton() -> Frame {
    Frame::unimodal(1, &[(0, 0)])
}

pub fn irreflexive_singleton() -> Frame {
    Frame::unimodal(1, &[])
}

/// Smallest Euclidean relation containing the frame's single relation:
/// closes under `x R y & x R z  =>  y R z`.
pub fn euclidean_closure(fr: &Frame) -> Frame {
    assert_eq!(fr.sig().n(), 1);
    let mut out = fr.clone();
    loop {
        let mut changed = false;
        for x in 0..out.worlds() {
            let succ = out.successors(0, x).clone();
            for y in succ.iter_ones() {
                if !succ.is_subset(out.successors(0, y)) {
                    let mut merged = out.successors(0, y).clone();
                    merged.union_with(&succ);
                    for z in merged.iter_ones() {
                        out.add_edge(0, y, z);
                    }
                    changed = true;
                }
            }
        }
        if !changed {
            return out;
        }
    }
}
