//! Seeded random trees, weights, symbols, and self maps shared by the
//! integration suites.
#![allow(dead_code)]

use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tree_hardy::operators::{OperatorInstance, SelfMap};
use tree_hardy::spaces::{self, Exponent, TreeFunction, Weight};
use tree_hardy::tree::{TruncatedTree, VertexId};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn binary(depth: usize) -> Arc<TruncatedTree> {
    Arc::new(TruncatedTree::build_homogeneous(2, depth).unwrap())
}

/// Random tree of depth 1..=max_depth with at most ~100 vertices.
pub fn random_tree(rng: &mut ChaCha8Rng, max_depth: usize) -> Arc<TruncatedTree> {
    loop {
        let depth = rng.gen_range(1..=max_depth);
        let tree = if rng.gen_bool(0.5) {
            let arity = rng.gen_range(1..=3);
            TruncatedTree::build_homogeneous(arity, depth).unwrap()
        } else {
            let mut sizes = vec![1usize];
            for _ in 0..depth {
                sizes.push(rng.gen_range(1..=6));
            }
            TruncatedTree::build_from_level_sizes(&sizes).unwrap()
        };
        if tree.vertex_count() <= 100 {
            return Arc::new(tree);
        }
    }
}

pub fn random_weight(rng: &mut ChaCha8Rng, tree: &TruncatedTree) -> Weight {
    Weight::from_values(
        tree,
        (0..tree.vertex_count())
            .map(|_| 0.25 + rng.gen::<f64>() * 3.75)
            .collect(),
    )
    .unwrap()
}

/// Signed symbol with occasional zeros.
pub fn random_symbol(rng: &mut ChaCha8Rng, tree: &TruncatedTree) -> TreeFunction {
    TreeFunction::from_values(
        tree,
        (0..tree.vertex_count())
            .map(|_| {
                if rng.gen_bool(0.15) {
                    0.0
                } else {
                    rng.gen_range(-2.0..2.0)
                }
            })
            .collect(),
    )
    .unwrap()
}

pub fn random_function(rng: &mut ChaCha8Rng, tree: &TruncatedTree) -> TreeFunction {
    TreeFunction::from_values(
        tree,
        (0..tree.vertex_count())
            .map(|_| rng.gen_range(-3.0..3.0))
            .collect(),
    )
    .unwrap()
}

/// Random function scaled to unit norm (support guaranteed nonempty).
pub fn random_unit_function(
    rng: &mut ChaCha8Rng,
    tree: &TruncatedTree,
    sigma: &Weight,
    p: Exponent,
) -> TreeFunction {
    let mut f = random_function(rng, tree);
    let n = spaces::norm(tree, sigma, p, &f);
    if n == 0.0 {
        return spaces::indicator_unit(tree, sigma, p, VertexId(0));
    }
    f.scale(n.recip());
    f
}

pub fn random_map(rng: &mut ChaCha8Rng, tree: &TruncatedTree) -> SelfMap {
    SelfMap::from_targets(
        tree,
        (0..tree.vertex_count())
            .map(|_| rng.gen_range(0..tree.vertex_count()))
            .collect(),
    )
    .unwrap()
}

/// Each level is mapped into a single randomly chosen target level.
pub fn random_level_respecting_map(rng: &mut ChaCha8Rng, tree: &TruncatedTree) -> SelfMap {
    let mut targets = Vec::with_capacity(tree.vertex_count());
    for n in 0..=tree.depth() {
        let m = rng.gen_range(0..=tree.depth());
        let ids = tree.level(m).unwrap();
        for _ in tree.level(n).unwrap() {
            targets.push(rng.gen_range(ids.start..ids.end));
        }
    }
    SelfMap::from_targets(tree, targets).unwrap()
}

/// Random permutation of the vertex set (onto by construction).
pub fn random_permutation(rng: &mut ChaCha8Rng, tree: &TruncatedTree) -> SelfMap {
    let mut targets: Vec<usize> = (0..tree.vertex_count()).collect();
    for i in (1..targets.len()).rev() {
        let j = rng.gen_range(0..=i);
        targets.swap(i, j);
    }
    SelfMap::from_targets(tree, targets).unwrap()
}

pub fn instance(
    tree: &Arc<TruncatedTree>,
    sigma1: Weight,
    sigma2: Weight,
    p: Exponent,
    q: Exponent,
    psi: TreeFunction,
    phi: SelfMap,
) -> OperatorInstance {
    OperatorInstance::new(Arc::clone(tree), sigma1, sigma2, p, q, psi, phi).unwrap()
}

/// Fully random instance on the given tree with the given exponents.
pub fn random_instance(
    rng: &mut ChaCha8Rng,
    tree: &Arc<TruncatedTree>,
    p: Exponent,
    q: Exponent,
) -> OperatorInstance {
    let sigma1 = random_weight(rng, tree);
    let sigma2 = random_weight(rng, tree);
    let psi = random_symbol(rng, tree);
    let phi = random_map(rng, tree);
    instance(tree, sigma1, sigma2, p, q, psi, phi)
}

pub fn assert_rel_close(a: f64, b: f64, tol: f64, what: &str) {
    assert!(
        tree_hardy::rel_close(a, b, tol),
        "{what}: {a} vs {b} (tol {tol})"
    );
}

pub fn assert_le_slack(a: f64, b: f64, tol: f64, what: &str) {
    assert!(
        a <= b + tol * b.abs().max(1.0),
        "{what}: {a} not <= {b} (tol {tol})"
    );
}
