//! Weights, tree functions, and the norms of the discrete weighted Hardy
//! spaces T_{σ,p} on a truncation.
//!
//! For finite p the norm is `sup_{n ≤ D} M_{σ,p}(n, f)` where
//! `M_{σ,p}(n,f) = ((1/c_n) Σ_{|x|=n} σ(x)^p |f(x)|^p)^{1/p}`; for p = ∞ it is
//! `max_x σ(x)|f(x)|`. Every supremum ranges over the truncation, so each
//! value is a depth-D lower approximation of its infinite-tree counterpart.
//!
//! Scalars are real: all the quantities computed here depend on |f| only, and
//! extremal functions can be chosen nonnegative.

use crate::error::{Error, Result};
use crate::numeric::{powp, rootp, KahanSum};
use crate::tree::{TruncatedTree, VertexId};

/// A finite exponent p > 0 or ∞.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn finite(p: f64) -> Result<Self> {
        if p.is_finite() && p > 0.0 {
            Ok(Exponent::Finite(p))
        } else {
            Err(Error::Invalid(format!(
                "exponent must be a finite positive number, got {p}"
            )))
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Exponent::Finite(_))
    }

    /// The finite value, if any.
    pub fn value(self) -> Option<f64> {
        match self {
            Exponent::Finite(p) => Some(p),
            Exponent::Infinity => None,
        }
    }
}

impl std::fmt::Display for Exponent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinity => write!(f, "inf"),
        }
    }
}

/// A strictly positive per-vertex scalar field.
#[derive(Debug, Clone, PartialEq)]
pub struct Weight {
    values: Vec<f64>,
}

impl Weight {
    pub fn from_values(tree: &TruncatedTree, values: Vec<f64>) -> Result<Self> {
        if values.len() != tree.vertex_count() {
            return Err(Error::Invalid(format!(
                "weight has {} values but the tree has {} vertices",
                values.len(),
                tree.vertex_count()
            )));
        }
        if let Some((v, w)) = values
            .iter()
            .enumerate()
            .find(|(_, w)| !w.is_finite() || **w <= 0.0)
        {
            return Err(Error::Invalid(format!(
                "weight must be strictly positive and finite, got {w} at vertex {v}"
            )));
        }
        Ok(Self { values })
    }

    /// σ ≡ 1.
    pub fn one(tree: &TruncatedTree) -> Self {
        Self {
            values: vec![1.0; tree.vertex_count()],
        }
    }

    /// σ(x) = (1 + |x|)^a.
    pub fn poly(tree: &TruncatedTree, a: f64) -> Result<Self> {
        Self::from_values(
            tree,
            tree.vertices()
                .map(|v| ((1 + tree.level_of(v)) as f64).powf(a))
                .collect(),
        )
    }

    /// σ(x) = b^{|x|}, b > 0.
    pub fn exponential(tree: &TruncatedTree, b: f64) -> Result<Self> {
        if !(b.is_finite() && b > 0.0) {
            return Err(Error::Invalid(format!("base must be positive, got {b}")));
        }
        Self::from_values(
            tree,
            tree.vertices()
                .map(|v| b.powi(tree.level_of(v) as i32))
                .collect(),
        )
    }

    #[inline]
    pub fn at(&self, v: VertexId) -> f64 {
        self.values[v.0]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// The function 1/σ, the canonical unit-norm element of T_{σ,∞}.
    pub fn reciprocal_function(&self) -> TreeFunction {
        TreeFunction {
            values: self.values.iter().map(|w| w.recip()).collect(),
        }
    }
}

/// A per-vertex real scalar field (signs allowed).
#[derive(Debug, Clone, PartialEq)]
pub struct TreeFunction {
    values: Vec<f64>,
}

impl TreeFunction {
    pub fn from_values(tree: &TruncatedTree, values: Vec<f64>) -> Result<Self> {
        if values.len() != tree.vertex_count() {
            return Err(Error::Invalid(format!(
                "function has {} values but the tree has {} vertices",
                values.len(),
                tree.vertex_count()
            )));
        }
        if let Some((v, x)) = values.iter().enumerate().find(|(_, x)| !x.is_finite()) {
            return Err(Error::Invalid(format!(
                "function values must be finite, got {x} at vertex {v}"
            )));
        }
        Ok(Self { values })
    }

    pub fn zero(tree: &TruncatedTree) -> Self {
        Self {
            values: vec![0.0; tree.vertex_count()],
        }
    }

    pub fn constant(tree: &TruncatedTree, c: f64) -> Self {
        Self {
            values: vec![c; tree.vertex_count()],
        }
    }

    /// χ_y scaled by `value`.
    pub fn indicator(tree: &TruncatedTree, y: VertexId, value: f64) -> Self {
        let mut f = Self::zero(tree);
        f.values[y.0] = value;
        f
    }

    /// Point evaluation f(x).
    #[inline]
    pub fn evaluate(&self, x: VertexId) -> f64 {
        self.values[x.0]
    }

    pub fn set(&mut self, x: VertexId, value: f64) {
        self.values[x.0] = value;
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Pointwise product σ·f.
    pub fn scaled_by(&self, sigma: &Weight) -> TreeFunction {
        TreeFunction {
            values: self
                .values
                .iter()
                .zip(&sigma.values)
                .map(|(f, w)| f * w)
                .collect(),
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for v in &mut self.values {
            *v *= factor;
        }
    }
}

/// M_{σ,p}(n, f), the weighted p-power mean over level n (p finite).
///
/// The sum of p-th powers is max-factored and compensated, so it neither
/// overflows nor loses the dominant term for large p or large magnitudes.
pub fn level_mean(
    tree: &TruncatedTree,
    sigma: &Weight,
    p: f64,
    n: usize,
    f: &TreeFunction,
) -> Result<f64> {
    let ids = tree.level(n)?;
    let c_n = ids.len() as f64;
    let mut m = 0.0f64;
    for v in ids.clone() {
        m = m.max((sigma.values[v] * f.values[v]).abs());
    }
    if m == 0.0 {
        return Ok(0.0);
    }
    let mut sum = KahanSum::default();
    for v in ids {
        sum.add(powp((sigma.values[v] * f.values[v]).abs() / m, p));
    }
    Ok(m * rootp(sum.value() / c_n, p))
}

/// ‖f‖_{σ,p} over the truncation: sup of level means for finite p, or
/// max_x σ(x)|f(x)| for p = ∞.
pub fn norm(tree: &TruncatedTree, sigma: &Weight, p: Exponent, f: &TreeFunction) -> f64 {
    match p {
        Exponent::Finite(p) => (0..=tree.depth())
            .map(|n| level_mean(tree, sigma, p, n, f).expect("level within depth"))
            .fold(0.0, f64::max),
        Exponent::Infinity => f
            .values
            .iter()
            .zip(&sigma.values)
            .map(|(f, w)| (f * w).abs())
            .fold(0.0, f64::max),
    }
}

/// The pointwise evaluation bound `(c_{|x|})^{1/p} / σ(x)`:
/// |f(x)| ≤ growth_bound(x) · ‖f‖_{σ,p} for every f, with equality for
/// [`indicator_unit`] at x.
pub fn growth_bound(tree: &TruncatedTree, sigma: &Weight, p: f64, x: VertexId) -> f64 {
    let c = tree.level_size(tree.level_of(x)).expect("vertex level") as f64;
    rootp(c, p) / sigma.at(x)
}

/// The unit-norm function concentrated at `y` that attains the growth bound:
/// `c_{|y|}^{1/p}/σ(y)` at y for finite p, `1/σ(y)` for p = ∞.
pub fn indicator_unit(
    tree: &TruncatedTree,
    sigma: &Weight,
    p: Exponent,
    y: VertexId,
) -> TreeFunction {
    let value = match p {
        Exponent::Finite(p) => growth_bound(tree, sigma, p, y),
        Exponent::Infinity => sigma.at(y).recip(),
    };
    TreeFunction::indicator(tree, y, value)
}

/// max_x σ2(x)/σ1(x) over the truncation. Always finite here; growth of this
/// value across depths is the signal that the identity embedding
/// T_{σ1,p} → T_{σ2,p} is unbounded on the full tree.
pub fn inclusion_constant(sigma1: &Weight, sigma2: &Weight) -> f64 {
    sigma1
        .values
        .iter()
        .zip(&sigma2.values)
        .map(|(s1, s2)| s2 / s1)
        .fold(0.0, f64::max)
}

/// Witness that an unbounded σ breaks the inclusion T_p ⊆ T_{σ,p}:
/// a function with ‖f‖_p = 1 whose σ-norm equals max_n σ(v_n) over vertices
/// v_n chosen with σ(v_n) > n, one per level.
///
/// Pass `chosen` to pin the vertices explicitly (they must satisfy the
/// thresholds and occupy pairwise distinct levels); otherwise they are
/// discovered greedily, preferring small levels and small ids.
pub fn witness_unbounded_sigma(
    tree: &TruncatedTree,
    sigma: &Weight,
    p: f64,
    chosen: Option<&[VertexId]>,
) -> Result<TreeFunction> {
    let picks = match chosen {
        Some(list) => {
            let mut used = std::collections::BTreeSet::new();
            for (i, &v) in list.iter().enumerate() {
                let threshold = (i + 1) as f64;
                if !tree.contains(v) {
                    return Err(Error::Invalid(format!("vertex {v} not in tree")));
                }
                if sigma.at(v) <= threshold {
                    return Err(Error::Invalid(format!(
                        "σ({v}) = {} does not exceed threshold {threshold}",
                        sigma.at(v)
                    )));
                }
                if !used.insert(tree.level_of(v)) {
                    return Err(Error::Invalid(
                        "witness vertices must occupy distinct levels".into(),
                    ));
                }
            }
            list.to_vec()
        }
        None => discover_thresholds(tree, |v| sigma.at(v), false)?,
    };
    let mut f = TreeFunction::zero(tree);
    for &v in &picks {
        let c = tree.level_size(tree.level_of(v))? as f64;
        f.set(v, rootp(c, p));
    }
    Ok(f)
}

/// Witness that a σ not bounded away from zero breaks T_{σ,p} ⊆ T_p:
/// a function with ‖f‖_{σ,p} ≤ 1 whose unweighted level mean at |v_n| equals
/// n, for vertices v_n chosen with σ(v_n) < 1/n, one per level.
pub fn witness_sigma_not_bounded_away(
    tree: &TruncatedTree,
    sigma: &Weight,
    p: f64,
) -> Result<TreeFunction> {
    let picks = discover_thresholds(tree, |v| sigma.at(v), true)?;
    let mut f = TreeFunction::zero(tree);
    for (i, &v) in picks.iter().enumerate() {
        let n = (i + 1) as f64;
        let c = tree.level_size(tree.level_of(v))? as f64;
        f.set(v, n * rootp(c, p));
    }
    Ok(f)
}

/// Greedy selection of one vertex per level with σ(v) > n (or σ(v) < 1/n when
/// `reciprocal`), for n = 1, 2, ... until no unused level qualifies.
fn discover_thresholds(
    tree: &TruncatedTree,
    sigma_at: impl Fn(VertexId) -> f64,
    reciprocal: bool,
) -> Result<Vec<VertexId>> {
    let mut used = vec![false; tree.depth() + 1];
    let mut picks = Vec::new();
    'outer: for n in 1.. {
        let threshold = n as f64;
        for (level, used_flag) in used.iter_mut().enumerate() {
            if *used_flag {
                continue;
            }
            for v in tree.level(level)? {
                let s = sigma_at(VertexId(v));
                let hit = if reciprocal {
                    s < threshold.recip()
                } else {
                    s > threshold
                };
                if hit {
                    *used_flag = true;
                    picks.push(VertexId(v));
                    continue 'outer;
                }
            }
        }
        break;
    }
    if picks.is_empty() {
        Err(Error::NoWitness(if reciprocal {
            "σ ≥ 1 everywhere at this depth".into()
        } else {
            "σ ≤ 1 everywhere at this depth".into()
        }))
    } else {
        Ok(picks)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rel_close;

    fn binary(depth: usize) -> TruncatedTree {
        TruncatedTree::build_homogeneous(2, depth).unwrap()
    }

    #[test]
    fn level_mean_cases() {
        let t = binary(3);
        let one = Weight::one(&t);
        let f = TreeFunction::constant(&t, 1.0);
        for p in [0.5, 1.0, 2.0, 7.0] {
            for n in 0..=3 {
                assert!(rel_close(level_mean(&t, &one, p, n, &f).unwrap(), 1.0, 1e-15));
            }
        }

        // indicator at a level-2 vertex: (1/c_2)^{1/p}
        let y = t.first_of_level(2).unwrap();
        let chi = TreeFunction::indicator(&t, y, 1.0);
        for p in [0.5, 1.0, 2.0] {
            let expect = rootp(0.25, p);
            assert!(rel_close(level_mean(&t, &one, p, 2, &chi).unwrap(), expect, 1e-15));
        }

        // half the level-2 vertices set to 1: sqrt(2/4)
        let mut f = TreeFunction::zero(&t);
        let lvl2 = t.level(2).unwrap();
        f.set(VertexId(lvl2.start), 1.0);
        f.set(VertexId(lvl2.start + 1), 1.0);
        let got = level_mean(&t, &one, 2.0, 2, &f).unwrap();
        let expect = (2.0f64 / 4.0).sqrt();
        assert!((got - expect).abs() < 1e-15);

        assert!(matches!(
            level_mean(&t, &one, 2.0, 9, &f),
            Err(Error::LevelOutOfRange { .. })
        ));
    }

    #[test]
    fn norm_cases() {
        let t = binary(3);
        let one = Weight::one(&t);
        let f = TreeFunction::constant(&t, 1.0);
        for p in [Exponent::Finite(0.5), Exponent::Finite(2.0), Exponent::Infinity] {
            assert!(rel_close(norm(&t, &one, p, &f), 1.0, 1e-15));
        }

        // indicator_unit has norm one for every exponent
        let y = t.first_of_level(3).unwrap();
        let sigma = Weight::poly(&t, 1.0).unwrap();
        for p in [Exponent::Finite(0.5), Exponent::Finite(1.0), Exponent::Finite(2.0), Exponent::Infinity] {
            let f = indicator_unit(&t, &sigma, p, y);
            assert!(rel_close(norm(&t, &sigma, p, &f), 1.0, 1e-12));
        }

        // σ(x) = 1+|x|, f(x) = 1/(1+|x|): the product is identically one
        let f = TreeFunction::from_values(
            &t,
            t.vertices().map(|v| 1.0 / (1 + t.level_of(v)) as f64).collect(),
        )
        .unwrap();
        assert!(rel_close(norm(&t, &sigma, Exponent::Infinity, &f), 1.0, 1e-15));

        assert_eq!(norm(&t, &one, Exponent::Finite(2.0), &TreeFunction::zero(&t)), 0.0);
    }

    #[test]
    fn evaluate_cases() {
        let t = binary(2);
        let chi = TreeFunction::indicator(&t, VertexId(0), 1.0);
        assert_eq!(chi.evaluate(VertexId(0)), 1.0);
        assert_eq!(chi.evaluate(VertexId(3)), 0.0);
        let c = TreeFunction::constant(&t, 2.5);
        assert_eq!(c.evaluate(VertexId(5)), 2.5);
    }

    #[test]
    fn growth_bound_cases() {
        let t = binary(3);
        let one = Weight::one(&t);
        let x = t.first_of_level(3).unwrap();
        assert_eq!(growth_bound(&t, &one, 1.0, x), 8.0);

        // c = 4, σ = 2, p = 2 → 4^{1/2}/2 = 1
        let mut vals = vec![1.0; t.vertex_count()];
        let x2 = t.first_of_level(2).unwrap();
        vals[x2.0] = 2.0;
        let sigma = Weight::from_values(&t, vals).unwrap();
        assert_eq!(growth_bound(&t, &sigma, 2.0, x2), 1.0);

        let path = TruncatedTree::build_homogeneous(1, 4).unwrap();
        let one = Weight::one(&path);
        for p in [0.5, 1.0, 3.0] {
            for v in path.vertices() {
                assert_eq!(growth_bound(&path, &one, p, v), 1.0);
            }
        }
    }

    #[test]
    fn growth_estimate_and_sharpness() {
        let t = binary(3);
        let sigma = Weight::exponential(&t, 1.5).unwrap();
        let f = TreeFunction::from_values(
            &t,
            (0..t.vertex_count()).map(|v| ((v * 7 % 5) as f64) - 2.0).collect(),
        )
        .unwrap();
        let p = 1.5;
        let nf = norm(&t, &sigma, Exponent::Finite(p), &f);
        for x in t.vertices() {
            let gb = growth_bound(&t, &sigma, p, x);
            assert!(f.evaluate(x).abs() <= gb * nf * (1.0 + 1e-12));
            let sharp = indicator_unit(&t, &sigma, Exponent::Finite(p), x);
            let ns = norm(&t, &sigma, Exponent::Finite(p), &sharp);
            assert!(rel_close(sharp.evaluate(x).abs(), gb * ns, 1e-12));
        }
    }

    #[test]
    fn indicator_unit_values() {
        let t = binary(3);
        let one = Weight::one(&t);
        let y = t.first_of_level(2).unwrap(); // c = 4
        let f = indicator_unit(&t, &one, Exponent::Finite(1.0), y);
        assert_eq!(f.evaluate(y), 4.0);
        assert!(rel_close(norm(&t, &one, Exponent::Finite(1.0), &f), 1.0, 1e-15));

        let f = indicator_unit(&t, &one, Exponent::Infinity, y);
        assert_eq!(f.evaluate(y), 1.0);

        let mut vals = vec![1.0; t.vertex_count()];
        vals[y.0] = 5.0;
        let sigma = Weight::from_values(&t, vals).unwrap();
        let f = indicator_unit(&t, &sigma, Exponent::Infinity, y);
        assert_eq!(f.evaluate(y), 0.2);
        assert!(rel_close(norm(&t, &sigma, Exponent::Infinity, &f), 1.0, 1e-15));
    }

    #[test]
    fn inclusion_constant_cases() {
        let t = binary(3);
        let sigma = Weight::poly(&t, 1.0).unwrap();
        assert_eq!(inclusion_constant(&sigma, &sigma), 1.0);

        let sq = Weight::poly(&t, 2.0).unwrap();
        assert_eq!(inclusion_constant(&sq, &sigma), 1.0); // attained at the root
        assert_eq!(inclusion_constant(&Weight::one(&t), &sigma), 4.0);
    }

    #[test]
    fn witness_unbounded_sigma_cases() {
        let t = binary(3);
        let one = Weight::one(&t);
        assert!(matches!(
            witness_unbounded_sigma(&t, &one, 1.0, None),
            Err(Error::NoWitness(_))
        ));

        for p in [0.5, 1.0, 2.0] {
            let sigma = Weight::exponential(&t, 2.0).unwrap();
            let f = witness_unbounded_sigma(&t, &sigma, p, None).unwrap();
            let plain = norm(&t, &one, Exponent::Finite(p), &f);
            let weighted = norm(&t, &sigma, Exponent::Finite(p), &f);
            assert!(rel_close(plain, 1.0, 1e-12));
            assert!(rel_close(weighted / plain, 8.0, 1e-12));
        }

        let t2 = binary(2);
        let sigma = Weight::poly(&t2, 1.0).unwrap();
        let one2 = Weight::one(&t2);
        let f = witness_unbounded_sigma(&t2, &sigma, 1.0, None).unwrap();
        let ratio = norm(&t2, &sigma, Exponent::Finite(1.0), &f)
            / norm(&t2, &one2, Exponent::Finite(1.0), &f);
        assert!(rel_close(ratio, 3.0, 1e-12));

        // explicit vertex lists are validated
        assert!(witness_unbounded_sigma(&t2, &sigma, 1.0, Some(&[VertexId(0)])).is_err());
        let f = witness_unbounded_sigma(&t2, &sigma, 1.0, Some(&[VertexId(1), VertexId(3)]))
            .unwrap();
        assert!(rel_close(norm(&t2, &sigma, Exponent::Finite(1.0), &f), 3.0, 1e-12));
    }

    #[test]
    fn witness_not_bounded_away_cases() {
        let t = binary(3);
        let one = Weight::one(&t);
        assert!(matches!(
            witness_sigma_not_bounded_away(&t, &one, 2.0),
            Err(Error::NoWitness(_))
        ));

        let sigma = Weight::poly(&t, -1.0).unwrap(); // 1/(1+|x|)
        for p in [0.5, 1.0, 2.0] {
            let f = witness_sigma_not_bounded_away(&t, &sigma, p).unwrap();
            assert!(norm(&t, &sigma, Exponent::Finite(p), &f) <= 1.0 + 1e-12);
            for n in 1..=3 {
                let got = level_mean(&t, &one, p, n, &f).unwrap();
                assert!(rel_close(got, n as f64, 1e-12), "level {n}: {got}");
            }
        }

        let sigma = Weight::exponential(&t, 0.5).unwrap(); // 2^{-|x|}
        let f = witness_sigma_not_bounded_away(&t, &sigma, 1.0).unwrap();
        assert!(level_mean(&t, &one, 1.0, 3, &f).unwrap() >= 3.0 - 1e-12);
    }

    #[test]
    fn weighted_norm_is_plain_norm_of_product() {
        let t = TruncatedTree::build_from_level_sizes(&[1, 3, 5, 2]).unwrap();
        let sigma = Weight::from_values(
            &t,
            (0..t.vertex_count()).map(|v| 0.3 + (v % 4) as f64).collect(),
        )
        .unwrap();
        let f = TreeFunction::from_values(
            &t,
            (0..t.vertex_count()).map(|v| (v as f64) * 0.7 - 3.0).collect(),
        )
        .unwrap();
        let one = Weight::one(&t);
        for p in [Exponent::Finite(0.5), Exponent::Finite(1.0), Exponent::Finite(3.0), Exponent::Infinity] {
            let lhs = norm(&t, &sigma, p, &f);
            let rhs = norm(&t, &one, p, &f.scaled_by(&sigma));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn large_exponents_and_magnitudes_do_not_overflow() {
        let t = binary(1);
        let one = Weight::one(&t);
        let f = TreeFunction::from_values(&t, vec![0.0, 1e300, 1e300]).unwrap();
        let got = norm(&t, &one, Exponent::Finite(2.0), &f);
        assert!(got.is_finite());
        assert!(rel_close(got, 1e300, 1e-12));

        let f = TreeFunction::from_values(&t, vec![0.0, 2.0, 1.0]).unwrap();
        let got = level_mean(&t, &one, 200.0, 1, &f).unwrap();
        assert!(got.is_finite() && got > 0.0);
        // dominated by the max term: 2 * (1/2)^{1/200}
        assert!(rel_close(got, 2.0 * 0.5f64.powf(1.0 / 200.0), 1e-9));
    }
}
