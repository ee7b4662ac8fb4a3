//! Self maps φ, symbols ψ, the weighted composition operator
//! `f ↦ ψ · (f ∘ φ)`, and the preimage combinatorics its norm formulas
//! consume.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::spaces::{Exponent, TreeFunction, Weight};
use crate::tree::{TruncatedTree, VertexId};

/// An arbitrary vertex self-map of the truncation. Not required to respect
/// the graph structure in any way; constant maps and level collapses are
/// equally valid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelfMap {
    targets: Vec<usize>,
}

/// Which levels a parity collapse sends to their pinned vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl SelfMap {
    pub fn from_targets(tree: &TruncatedTree, targets: Vec<usize>) -> Result<Self> {
        if targets.len() != tree.vertex_count() {
            return Err(Error::Invalid(format!(
                "self map has {} targets but the tree has {} vertices",
                targets.len(),
                tree.vertex_count()
            )));
        }
        if let Some((v, t)) = targets
            .iter()
            .enumerate()
            .find(|(_, t)| **t >= tree.vertex_count())
        {
            return Err(Error::Invalid(format!(
                "target {t} of vertex {v} is outside the truncation"
            )));
        }
        Ok(Self { targets })
    }

    pub fn identity(tree: &TruncatedTree) -> Self {
        Self {
            targets: (0..tree.vertex_count()).collect(),
        }
    }

    pub fn constant(tree: &TruncatedTree, target: VertexId) -> Result<Self> {
        if !tree.contains(target) {
            return Err(Error::Invalid(format!(
                "constant target {target} is outside the truncation"
            )));
        }
        Ok(Self {
            targets: vec![target.0; tree.vertex_count()],
        })
    }

    /// Every vertex of level n is sent to `targets[n]`.
    pub fn level_collapse(tree: &TruncatedTree, level_targets: &[VertexId]) -> Result<Self> {
        if level_targets.len() != tree.depth() + 1 {
            return Err(Error::Invalid(format!(
                "level collapse needs {} targets, got {}",
                tree.depth() + 1,
                level_targets.len()
            )));
        }
        let mut targets = Vec::with_capacity(tree.vertex_count());
        for v in tree.vertices() {
            let t = level_targets[tree.level_of(v)];
            if !tree.contains(t) {
                return Err(Error::Invalid(format!(
                    "collapse target {t} is outside the truncation"
                )));
            }
            targets.push(t.0);
        }
        Ok(Self { targets })
    }

    /// Levels of the given parity collapse to their smallest-id vertex;
    /// every other vertex goes to the root.
    pub fn parity_collapse(tree: &TruncatedTree, parity: Parity) -> Self {
        let keep = match parity {
            Parity::Even => 0,
            Parity::Odd => 1,
        };
        let targets = tree
            .vertices()
            .map(|v| {
                let n = tree.level_of(v);
                if n % 2 == keep {
                    tree.first_of_level(n).expect("vertex level").0
                } else {
                    0
                }
            })
            .collect();
        Self { targets }
    }

    /// φ(x).
    #[inline]
    pub fn apply(&self, x: VertexId) -> VertexId {
        VertexId(self.targets[x.0])
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn is_identity(&self) -> bool {
        self.targets.iter().enumerate().all(|(v, t)| v == *t)
    }

    /// Whether every vertex of the truncation has a preimage.
    pub fn is_onto(&self, tree: &TruncatedTree) -> bool {
        let mut hit = vec![false; tree.vertex_count()];
        for &t in &self.targets {
            hit[t] = true;
        }
        hit.iter().all(|&h| h)
    }
}

/// One weighted composition operator `W: T_{σ1,p} → T_{σ2,q}`,
/// `W f = ψ · (f ∘ φ)`, with every component over the same truncation.
///
/// ψ ≡ 1 gives the composition operator; φ = identity gives the
/// multiplication operator.
#[derive(Debug, Clone)]
pub struct OperatorInstance {
    pub tree: Arc<TruncatedTree>,
    pub sigma1: Weight,
    pub sigma2: Weight,
    pub p: Exponent,
    pub q: Exponent,
    pub psi: TreeFunction,
    pub phi: SelfMap,
}

impl OperatorInstance {
    pub fn new(
        tree: Arc<TruncatedTree>,
        sigma1: Weight,
        sigma2: Weight,
        p: Exponent,
        q: Exponent,
        psi: TreeFunction,
        phi: SelfMap,
    ) -> Result<Self> {
        let v = tree.vertex_count();
        for (what, len) in [
            ("sigma1", sigma1.values().len()),
            ("sigma2", sigma2.values().len()),
            ("psi", psi.values().len()),
            ("phi", phi.targets().len()),
        ] {
            if len != v {
                return Err(Error::Invalid(format!(
                    "{what} is defined on {len} vertices but the tree has {v}"
                )));
            }
        }
        Ok(Self {
            tree,
            sigma1,
            sigma2,
            p,
            q,
            psi,
            phi,
        })
    }

    /// σ2(x)|ψ(x)| / σ1(φ(x)), the integrand every norm formula shares.
    #[inline]
    pub(crate) fn symbol_ratio(&self, x: VertexId) -> f64 {
        self.sigma2.at(x) * self.psi.evaluate(x).abs() / self.sigma1.at(self.phi.apply(x))
    }
}

/// W f = ψ · (f ∘ φ), pointwise.
pub fn apply(inst: &OperatorInstance, f: &TreeFunction) -> TreeFunction {
    let values = inst
        .tree
        .vertices()
        .map(|x| inst.psi.evaluate(x) * f.evaluate(inst.phi.apply(x)))
        .collect();
    TreeFunction::from_values(&inst.tree, values).expect("finite by construction")
}

/// The reduced symbol Ψ(x) = ψ(x)/σ1(φ(x)) that governs the ∞ → q operator
/// norm; equals W applied to 1/σ1.
pub fn weighted_symbol(inst: &OperatorInstance) -> TreeFunction {
    let values = inst
        .tree
        .vertices()
        .map(|x| inst.psi.evaluate(x) / inst.sigma1.at(inst.phi.apply(x)))
        .collect();
    TreeFunction::from_values(&inst.tree, values).expect("finite by construction")
}

/// N_φ(n, ·): how many level-n vertices map to each target. Targets with no
/// preimage in level n are absent.
pub fn preimage_counts(
    tree: &TruncatedTree,
    phi: &SelfMap,
    n: usize,
) -> Result<std::collections::BTreeMap<VertexId, usize>> {
    let mut counts = std::collections::BTreeMap::new();
    for x in tree.level(n)? {
        *counts.entry(phi.apply(VertexId(x))).or_insert(0) += 1;
    }
    Ok(counts)
}

/// N_{m,n} together with a vertex of level m attaining it (smallest id on
/// ties). Count 0 and no witness when no level-n vertex maps into level m.
pub fn max_preimage(
    tree: &TruncatedTree,
    phi: &SelfMap,
    m: usize,
    n: usize,
) -> Result<(usize, Option<VertexId>)> {
    tree.level(m)?;
    let counts = preimage_counts(tree, phi, n)?;
    let mut best = (0usize, None);
    for (w, c) in counts {
        if tree.level_of(w) == m && c > best.0 {
            best = (c, Some(w));
        }
    }
    Ok(best)
}

/// [φ(D_n)]: the set of levels hit by images of level-n vertices.
pub fn image_levels(tree: &TruncatedTree, phi: &SelfMap, n: usize) -> Result<BTreeSet<usize>> {
    Ok(tree
        .level(n)?
        .map(|x| tree.level_of(phi.apply(VertexId(x))))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces;

    fn binary(depth: usize) -> Arc<TruncatedTree> {
        Arc::new(TruncatedTree::build_homogeneous(2, depth).unwrap())
    }

    fn plain_instance(tree: &Arc<TruncatedTree>, phi: SelfMap) -> OperatorInstance {
        OperatorInstance::new(
            Arc::clone(tree),
            Weight::one(tree),
            Weight::one(tree),
            Exponent::Finite(1.0),
            Exponent::Finite(1.0),
            TreeFunction::constant(tree, 1.0),
            phi,
        )
        .unwrap()
    }

    #[test]
    fn apply_cases() {
        let t = binary(3);
        let f = TreeFunction::from_values(&t, (0..t.vertex_count()).map(|v| v as f64).collect())
            .unwrap();

        let id = plain_instance(&t, SelfMap::identity(&t));
        assert_eq!(apply(&id, &f), f);

        let root = plain_instance(&t, SelfMap::constant(&t, VertexId(0)).unwrap());
        let g = apply(&root, &f);
        assert!(t.vertices().all(|x| g.evaluate(x) == f.evaluate(VertexId(0))));

        let y = VertexId(3);
        let mut chi = plain_instance(&t, SelfMap::from_targets(&t, (0..15).rev().collect()).unwrap());
        chi.psi = TreeFunction::indicator(&t, y, 1.0);
        let ones = TreeFunction::constant(&t, 1.0);
        assert_eq!(apply(&chi, &ones), TreeFunction::indicator(&t, y, 1.0));
    }

    #[test]
    fn apply_is_linear() {
        let t = binary(2);
        let mut inst = plain_instance(&t, SelfMap::from_targets(&t, vec![0, 0, 1, 2, 2, 6, 3]).unwrap());
        inst.psi = TreeFunction::from_values(&t, vec![1.0, -2.0, 0.0, 0.5, 3.0, 1.0, -1.0]).unwrap();
        let f = TreeFunction::from_values(&t, (0..7).map(|v| v as f64 - 2.0).collect()).unwrap();
        let g = TreeFunction::from_values(&t, (0..7).map(|v| (v * v) as f64 * 0.1).collect()).unwrap();
        let (a, b) = (1.75, -0.5);
        let combo = TreeFunction::from_values(
            &t,
            (0..7).map(|v| a * f.values()[v] + b * g.values()[v]).collect(),
        )
        .unwrap();
        let lhs = apply(&inst, &combo);
        let wf = apply(&inst, &f);
        let wg = apply(&inst, &g);
        for x in t.vertices() {
            let rhs = a * wf.evaluate(x) + b * wg.evaluate(x);
            assert!((lhs.evaluate(x) - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()));
        }
    }

    #[test]
    fn weighted_symbol_cases() {
        let t = binary(2);
        let mut inst = plain_instance(&t, SelfMap::identity(&t));
        assert_eq!(weighted_symbol(&inst), inst.psi);

        inst.sigma1 = Weight::poly(&t, 1.0).unwrap();
        inst.psi = TreeFunction::from_values(
            &t,
            t.vertices().map(|v| inst.sigma1.at(inst.phi.apply(v))).collect(),
        )
        .unwrap();
        let psi_over = weighted_symbol(&inst);
        assert!(t.vertices().all(|v| psi_over.evaluate(v) == 1.0));

        let mut root = plain_instance(&t, SelfMap::constant(&t, VertexId(0)).unwrap());
        root.sigma1 = Weight::poly(&t, 1.0).unwrap();
        let psi_over = weighted_symbol(&root);
        assert!(t.vertices().all(|v| psi_over.evaluate(v) == 1.0));
    }

    #[test]
    fn preimage_count_cases() {
        let t = binary(3);
        let id = SelfMap::identity(&t);
        let counts = preimage_counts(&t, &id, 2).unwrap();
        assert_eq!(counts.len(), 4);
        assert!(counts.values().all(|&c| c == 1));

        let root = SelfMap::constant(&t, VertexId(0)).unwrap();
        for n in 0..=3 {
            let counts = preimage_counts(&t, &root, n).unwrap();
            assert_eq!(counts.len(), 1);
            assert_eq!(counts[&VertexId(0)], t.level_size(n).unwrap());
        }

        // full level collapse onto the pinned vertex of each level
        let pins: Vec<_> = (0..=3).map(|n| t.first_of_level(n).unwrap()).collect();
        let collapse = SelfMap::level_collapse(&t, &pins).unwrap();
        let counts = preimage_counts(&t, &collapse, 3).unwrap();
        assert_eq!(counts.len(), 1);
        assert_eq!(counts[&t.first_of_level(3).unwrap()], 8);

        // counts always resum to the level size
        for n in 0..=3 {
            let total: usize = preimage_counts(&t, &collapse, n).unwrap().values().sum();
            assert_eq!(total, t.level_size(n).unwrap());
        }
    }

    #[test]
    fn max_preimage_cases() {
        let t = binary(3);
        let id = SelfMap::identity(&t);
        assert_eq!(max_preimage(&t, &id, 2, 2).unwrap(), (1, Some(t.first_of_level(2).unwrap())));
        assert_eq!(max_preimage(&t, &id, 1, 2).unwrap(), (0, None));

        let root = SelfMap::constant(&t, VertexId(0)).unwrap();
        assert_eq!(max_preimage(&t, &root, 0, 3).unwrap(), (8, Some(VertexId(0))));
        assert_eq!(max_preimage(&t, &root, 1, 3).unwrap(), (0, None));

        let pins: Vec<_> = (0..=3).map(|n| t.first_of_level(n).unwrap()).collect();
        let collapse = SelfMap::level_collapse(&t, &pins).unwrap();
        for n in 0..=3 {
            let (count, w) = max_preimage(&t, &collapse, n, n).unwrap();
            assert_eq!(count, t.level_size(n).unwrap());
            assert_eq!(w, Some(t.first_of_level(n).unwrap()));
        }

        // the count agrees with the max of the per-target counts on level m
        let skew = SelfMap::from_targets(&t, vec![0, 0, 1, 1, 1, 2, 2, 3, 3, 3, 3, 4, 5, 5, 0]).unwrap();
        for m in 0..=3 {
            for n in 0..=3 {
                let (count, _) = max_preimage(&t, &skew, m, n).unwrap();
                let expected = preimage_counts(&t, &skew, n)
                    .unwrap()
                    .iter()
                    .filter(|(w, _)| t.level_of(**w) == m)
                    .map(|(_, c)| *c)
                    .max()
                    .unwrap_or(0);
                assert_eq!(count, expected);
            }
        }
    }

    #[test]
    fn image_level_cases() {
        let t = binary(3);
        let id = SelfMap::identity(&t);
        assert_eq!(image_levels(&t, &id, 2).unwrap(), BTreeSet::from([2]));

        let root = SelfMap::constant(&t, VertexId(0)).unwrap();
        assert_eq!(image_levels(&t, &root, 3).unwrap(), BTreeSet::from([0]));

        let par = SelfMap::parity_collapse(&t, Parity::Even);
        assert_eq!(image_levels(&t, &par, 2).unwrap(), BTreeSet::from([2]));
        assert_eq!(image_levels(&t, &par, 3).unwrap(), BTreeSet::from([0]));
    }

    #[test]
    fn onto_and_identity_probes() {
        let t = binary(2);
        assert!(SelfMap::identity(&t).is_identity());
        assert!(SelfMap::identity(&t).is_onto(&t));
        let root = SelfMap::constant(&t, VertexId(0)).unwrap();
        assert!(!root.is_identity());
        assert!(!root.is_onto(&t));
        // a permutation is onto without being the identity
        let perm = SelfMap::from_targets(&t, vec![1, 0, 2, 4, 3, 6, 5]).unwrap();
        assert!(perm.is_onto(&t));
        assert!(!perm.is_identity());
    }

    #[test]
    fn validation_rejects_out_of_range_targets() {
        let t = binary(1);
        assert!(SelfMap::from_targets(&t, vec![0, 3, 1]).is_err());
        assert!(SelfMap::constant(&t, VertexId(9)).is_err());
        assert!(SelfMap::from_targets(&t, vec![0, 1]).is_err());
    }

    #[test]
    fn instance_validation() {
        let t = binary(1);
        let t2 = binary(2);
        let bad = OperatorInstance::new(
            Arc::clone(&t),
            Weight::one(&t),
            Weight::one(&t2),
            Exponent::Finite(1.0),
            Exponent::Finite(1.0),
            TreeFunction::constant(&t, 1.0),
            SelfMap::identity(&t),
        );
        assert!(bad.is_err());
    }

    #[test]
    fn weighted_symbol_is_operator_applied_to_reciprocal_weight() {
        let t = binary(2);
        let mut inst = plain_instance(&t, SelfMap::from_targets(&t, vec![0, 2, 0, 1, 5, 6, 6]).unwrap());
        inst.sigma1 = Weight::from_values(&t, vec![0.5, 2.0, 1.5, 3.0, 0.25, 1.0, 4.0]).unwrap();
        inst.psi = TreeFunction::from_values(&t, vec![1.0, -1.0, 2.0, 0.0, 0.5, 3.0, -2.0]).unwrap();
        let lhs = weighted_symbol(&inst);
        let rhs = apply(&inst, &inst.sigma1.reciprocal_function());
        for x in t.vertices() {
            assert!((lhs.evaluate(x) - rhs.evaluate(x)).abs() < 1e-15);
        }
        let _ = spaces::norm(&t, &inst.sigma2, inst.q, &lhs);
    }
}
