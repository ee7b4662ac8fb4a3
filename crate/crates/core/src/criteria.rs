//! Closed-form operator-norm values, bounds, compactness tail diagnostics,
//! and isometry checks for weighted composition operators between the
//! truncated spaces.
//!
//! Every value here is computed over the truncation and is therefore a
//! depth-D approximation of the corresponding infinite-tree quantity. Tail
//! sequences report evidence about the compactness criteria; they never
//! assert compactness itself.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{powp, rootp, KahanSum};
use crate::operators::{self, OperatorInstance};
use crate::spaces::{self, Exponent, TreeFunction};
use crate::tree::VertexId;

/// How a reported value relates to the true operator norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Exact,
    LowerBound,
    UpperBound,
}

/// One norm value produced by a specific formula.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub value: f64,
    pub kind: BoundKind,
    pub formula_id: String,
}

impl NormReport {
    fn new(value: f64, kind: BoundKind, formula_id: &str) -> Self {
        debug_assert!(value >= 0.0);
        Self {
            value,
            kind,
            formula_id: formula_id.to_string(),
        }
    }
}

fn require(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::WrongExponents(msg.into()))
    }
}

fn finite_pair(inst: &OperatorInstance) -> Result<f64> {
    match (inst.p, inst.q) {
        (Exponent::Finite(p), Exponent::Finite(q)) if p == q => Ok(p),
        _ => Err(Error::WrongExponents(
            "this result needs equal finite domain and target exponents".into(),
        )),
    }
}

/// ‖W‖ for W: T_{σ1,∞} → T_{σ2,q}: the σ2-q norm of the reduced symbol
/// Ψ = ψ/(σ1∘φ).
pub fn opnorm_inf_to_p(inst: &OperatorInstance) -> Result<NormReport> {
    require(
        !inst.p.is_finite(),
        "domain exponent must be ∞ for this formula",
    )?;
    let value = spaces::norm(
        &inst.tree,
        &inst.sigma2,
        inst.q,
        &operators::weighted_symbol(inst),
    );
    Ok(NormReport::new(value, BoundKind::Exact, "thm-inf-to-p"))
}

/// ‖W‖ for W: T_{σ1,p} → T_{σ2,∞}:
/// max_x σ2(x)|ψ(x)|/σ1(φ(x)) · c_{|φ(x)|}^{1/p}.
pub fn opnorm_p_to_inf(inst: &OperatorInstance) -> Result<NormReport> {
    let p = match (inst.p, inst.q) {
        (Exponent::Finite(p), Exponent::Infinity) => p,
        _ => {
            return Err(Error::WrongExponents(
                "this formula needs a finite domain exponent and target ∞".into(),
            ))
        }
    };
    let tree = &inst.tree;
    let value = tree
        .vertices()
        .map(|x| {
            let c = tree.level_size(tree.level_of(inst.phi.apply(x))).unwrap() as f64;
            inst.symbol_ratio(x) * rootp(c, p)
        })
        .fold(0.0, f64::max);
    Ok(NormReport::new(value, BoundKind::Exact, "thm-p-to-inf"))
}

/// Per-target-level accumulation shared by the p → p formulas:
/// for level n, the sums Σ_{x∈D_n, φ(x)=w} r(x)^p grouped by target w
/// (only targets that are actually hit appear).
fn target_sums(inst: &OperatorInstance, n: usize, p: f64) -> Vec<(VertexId, f64, usize)> {
    let tree = &inst.tree;
    let mut acc: std::collections::BTreeMap<VertexId, (f64, usize)> =
        std::collections::BTreeMap::new();
    for x in tree.level(n).unwrap() {
        let w = inst.phi.apply(VertexId(x));
        let entry = acc.entry(w).or_insert((0.0, 0));
        entry.0 += powp(inst.symbol_ratio(VertexId(x)), p);
        entry.1 += 1;
    }
    acc.into_iter()
        .map(|(w, (sum, count))| (w, sum, count))
        .collect()
}

/// Lower bound on ‖W‖ for p = q finite, realized by test functions
/// concentrated on the maximal-preimage-count vertex v_{m,n} of each hit
/// level (smallest id on count ties).
pub fn opnorm_pp_lower(inst: &OperatorInstance) -> Result<NormReport> {
    let p = finite_pair(inst)?;
    let tree = &inst.tree;
    let mut best = 0.0f64;
    for n in 0..=tree.depth() {
        let sums = target_sums(inst, n, p);
        // v_{m,n} per hit level m: the smallest-id vertex maximizing the
        // count; sums arrive in ascending id order, so strict improvement
        // keeps the smallest id on ties
        let mut per_level: std::collections::BTreeMap<usize, (usize, f64)> =
            std::collections::BTreeMap::new();
        for &(w, sum, count) in &sums {
            let entry = per_level.entry(tree.level_of(w)).or_insert((0, 0.0));
            if count > entry.0 {
                *entry = (count, sum);
            }
        }
        let mut total = KahanSum::default();
        for (m, (_, sum)) in &per_level {
            total.add(sum * tree.level_size(*m)? as f64);
        }
        best = best.max(total.value() / tree.level_size(n)? as f64);
    }
    Ok(NormReport::new(
        rootp(best, p),
        BoundKind::LowerBound,
        "thm-pp-lower",
    ))
}

/// Upper bound on ‖W‖ for p = q finite: every level-n vertex contributes the
/// full growth factor c_{|φ(x)|} of its own image.
pub fn opnorm_pp_upper(inst: &OperatorInstance) -> Result<NormReport> {
    let p = finite_pair(inst)?;
    let tree = &inst.tree;
    let mut best = 0.0f64;
    for n in 0..=tree.depth() {
        let mut total = KahanSum::default();
        for x in tree.level(n)? {
            let c = tree.level_size(tree.level_of(inst.phi.apply(VertexId(x))))? as f64;
            total.add(powp(inst.symbol_ratio(VertexId(x)), p) * c);
        }
        best = best.max(total.value() / tree.level_size(n)? as f64);
    }
    Ok(NormReport::new(
        rootp(best, p),
        BoundKind::UpperBound,
        "thm-pp-upper",
    ))
}

/// Upper bound on ‖W‖ for p = q finite via maximal preimage counts:
/// sup_n (1/c_n) Σ_m N_{m,n} c_m · max_{|x|=n, |φ(x)|=m} r(x)^p.
pub fn opnorm_pp_nmn_bound(inst: &OperatorInstance) -> Result<NormReport> {
    let p = finite_pair(inst)?;
    let tree = &inst.tree;
    let mut best = 0.0f64;
    for n in 0..=tree.depth() {
        let mut counts = vec![0usize; tree.vertex_count()];
        let mut sup = vec![0.0f64; tree.depth() + 1];
        let mut nmn = vec![0usize; tree.depth() + 1];
        for x in tree.level(n)? {
            let w = inst.phi.apply(VertexId(x));
            let m = tree.level_of(w);
            counts[w.0] += 1;
            nmn[m] = nmn[m].max(counts[w.0]);
            sup[m] = sup[m].max(powp(inst.symbol_ratio(VertexId(x)), p));
        }
        let mut total = KahanSum::default();
        for m in 0..=tree.depth() {
            if nmn[m] > 0 {
                total.add(nmn[m] as f64 * tree.level_size(m)? as f64 * sup[m]);
            }
        }
        best = best.max(total.value() / tree.level_size(n)? as f64);
    }
    Ok(NormReport::new(
        rootp(best, p),
        BoundKind::UpperBound,
        "prop-pp-nmn",
    ))
}

/// ‖W‖ for p = q finite, exact over the truncation: the supremum over the
/// unit ball decouples by levels of the argument, so each hit level m
/// contributes c_m times its best per-target sum. Exactness at finite depth
/// is validated against the brute-force maximizer before anything else
/// trusts it; the infinite-tree analogue is open, so reports carry a
/// truncation-derived label.
pub fn opnorm_pp_exact(inst: &OperatorInstance) -> Result<NormReport> {
    let p = finite_pair(inst)?;
    let tree = &inst.tree;
    let mut best = 0.0f64;
    for n in 0..=tree.depth() {
        let sums = target_sums(inst, n, p);
        let mut per_level_max = vec![0.0f64; tree.depth() + 1];
        for &(w, sum, _) in &sums {
            let m = tree.level_of(w);
            per_level_max[m] = per_level_max[m].max(sum);
        }
        let mut total = KahanSum::default();
        for (m, &level_max) in per_level_max.iter().enumerate() {
            if level_max > 0.0 {
                total.add(level_max * tree.level_size(m)? as f64);
            }
        }
        best = best.max(total.value() / tree.level_size(n)? as f64);
    }
    Ok(NormReport::new(
        rootp(best, p),
        BoundKind::Exact,
        "pp-exact-derived-at-truncation",
    ))
}

/// ‖C_φ‖ on the unweighted space for p = q finite:
/// ‖C_φ‖^p = sup_n (1/c_n) Σ_m N_{m,n} c_m. Requires ψ ≡ 1 and σ1 = σ2 ≡ 1.
pub fn opnorm_composition_pp(inst: &OperatorInstance) -> Result<NormReport> {
    let p = finite_pair(inst)?;
    if !inst.psi.values().iter().all(|&v| v == 1.0) {
        return Err(Error::UnsupportedInstance(
            "composition-operator formula needs ψ ≡ 1".into(),
        ));
    }
    if !inst.sigma1.values().iter().all(|&v| v == 1.0)
        || !inst.sigma2.values().iter().all(|&v| v == 1.0)
    {
        return Err(Error::UnsupportedInstance(
            "composition-operator formula needs σ1 = σ2 ≡ 1".into(),
        ));
    }
    let tree = &inst.tree;
    let mut best = 0.0f64;
    for n in 0..=tree.depth() {
        let mut total = KahanSum::default();
        for m in 0..=tree.depth() {
            let (count, _) = operators::max_preimage(tree, &inst.phi, m, n)?;
            if count > 0 {
                total.add(count as f64 * tree.level_size(m)? as f64);
            }
        }
        best = best.max(total.value() / tree.level_size(n)? as f64);
    }
    Ok(NormReport::new(
        rootp(best, p),
        BoundKind::Exact,
        "remark-composition",
    ))
}

/// ‖M_ψ‖ for φ = identity and p = q (finite or ∞):
/// the σ2-∞ norm of ψ/σ1, i.e. max_x σ2(x)|ψ(x)|/σ1(x).
pub fn opnorm_mult_pp(inst: &OperatorInstance) -> Result<NormReport> {
    if !inst.phi.is_identity() {
        return Err(Error::UnsupportedInstance(
            "multiplication-operator formula needs φ = identity".into(),
        ));
    }
    match (inst.p, inst.q) {
        (Exponent::Finite(p), Exponent::Finite(q)) if p == q => {}
        (Exponent::Infinity, Exponent::Infinity) => {}
        _ => {
            return Err(Error::WrongExponents(
                "multiplication-operator formula needs equal exponents".into(),
            ))
        }
    }
    let value = inst
        .tree
        .vertices()
        .map(|x| inst.symbol_ratio(x))
        .fold(0.0, f64::max);
    Ok(NormReport::new(value, BoundKind::Exact, "thm-mult"))
}

/// The six tail diagnostics behind the compactness criteria.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailCriterion {
    /// ∞ → ∞: sup over {|φ(x)| ≥ m} of r(x).
    InfInf,
    /// p → ∞: sup over {|φ(x)| ≥ m} of r(x) c_{|φ(x)|}^{1/p}.
    PInf,
    /// ∞ → q: sup_n (1/c_n) Σ_{|x|=n, |φ(x)|≥m} r(x)^q.
    InfP,
    /// p → p, sufficient: sup_n (1/c_n) Σ_{|x|=n, |φ(x)|≥m} r(x)^p c_{|φ(x)|}.
    PpSufficient,
    /// p → p, necessary: the same sum without the c factor.
    PpNecessary,
    /// multiplication: sup over {|x| ≥ m} of σ2(x)|ψ(x)|/σ1(x).
    Mult,
}

impl TailCriterion {
    pub fn id(self) -> &'static str {
        match self {
            TailCriterion::InfInf => "tail-inf-inf",
            TailCriterion::PInf => "tail-p-inf",
            TailCriterion::InfP => "tail-inf-p",
            TailCriterion::PpSufficient => "tail-pp-sufficient",
            TailCriterion::PpNecessary => "tail-pp-necessary",
            TailCriterion::Mult => "tail-mult",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "inf_inf" => Ok(TailCriterion::InfInf),
            "p_inf" => Ok(TailCriterion::PInf),
            "inf_p" => Ok(TailCriterion::InfP),
            "pp_sufficient" => Ok(TailCriterion::PpSufficient),
            "pp_necessary" => Ok(TailCriterion::PpNecessary),
            "mult" => Ok(TailCriterion::Mult),
            other => Err(Error::UnknownCriterion(other.into())),
        }
    }
}

/// What the finite tail suggests about the limit behaviour. Compactness is a
/// limit statement that a truncation cannot verify, so this is evidence, not
/// a theorem verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TailVerdict {
    Decaying,
    Flat,
    Inconclusive,
}

/// A tail sequence indexed by the cutoff m = 0..D, nonincreasing by
/// construction, with the decision-rule verdict attached.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailSequence {
    pub criterion_id: String,
    pub values: Vec<f64>,
    pub verdict: TailVerdict,
}

fn tail_verdict(values: &[f64], tol: f64) -> TailVerdict {
    let first = values[0];
    let last = *values.last().unwrap();
    if last <= tol {
        return TailVerdict::Decaying;
    }
    let ratio = last / first;
    let n = values.len();
    let strictly_decreasing_tail =
        n >= 3 && values[n - 3] > values[n - 2] && values[n - 2] > values[n - 1];
    if ratio <= 0.1 && strictly_decreasing_tail {
        TailVerdict::Decaying
    } else if ratio >= 0.9 {
        TailVerdict::Flat
    } else {
        TailVerdict::Inconclusive
    }
}

/// Evaluate one tail diagnostic for m = 0..D. The exponents of the instance
/// must match the criterion.
pub fn tail(inst: &OperatorInstance, criterion: TailCriterion, tol: f64) -> Result<TailSequence> {
    let tree = &inst.tree;
    let depth = tree.depth();
    match criterion {
        TailCriterion::InfInf => require(
            !inst.p.is_finite() && !inst.q.is_finite(),
            "inf_inf tail needs p = q = ∞",
        )?,
        TailCriterion::PInf => require(
            inst.p.is_finite() && !inst.q.is_finite(),
            "p_inf tail needs finite p and q = ∞",
        )?,
        TailCriterion::InfP => require(
            !inst.p.is_finite() && inst.q.is_finite(),
            "inf_p tail needs p = ∞ and finite q",
        )?,
        TailCriterion::PpSufficient | TailCriterion::PpNecessary => {
            finite_pair(inst).map(|_| ())?
        }
        TailCriterion::Mult => require(
            inst.p == inst.q,
            "mult tail needs equal exponents",
        )?,
    }

    let values: Vec<f64> = match criterion {
        TailCriterion::InfInf => (0..=depth)
            .map(|m| {
                tree.vertices()
                    .filter(|&x| tree.level_of(inst.phi.apply(x)) >= m)
                    .map(|x| inst.symbol_ratio(x))
                    .fold(0.0, f64::max)
            })
            .collect(),
        TailCriterion::PInf => {
            let p = inst.p.value().unwrap();
            (0..=depth)
                .map(|m| {
                    tree.vertices()
                        .filter(|&x| tree.level_of(inst.phi.apply(x)) >= m)
                        .map(|x| {
                            let c = tree
                                .level_size(tree.level_of(inst.phi.apply(x)))
                                .unwrap() as f64;
                            inst.symbol_ratio(x) * rootp(c, p)
                        })
                        .fold(0.0, f64::max)
                })
                .collect()
        }
        TailCriterion::InfP => {
            let q = inst.q.value().unwrap();
            (0..=depth)
                .map(|m| sup_level_sums(inst, m, q, false))
                .collect()
        }
        TailCriterion::PpSufficient => {
            let p = inst.p.value().unwrap();
            (0..=depth)
                .map(|m| sup_level_sums(inst, m, p, true))
                .collect()
        }
        TailCriterion::PpNecessary => {
            let p = inst.p.value().unwrap();
            (0..=depth)
                .map(|m| sup_level_sums(inst, m, p, false))
                .collect()
        }
        TailCriterion::Mult => (0..=depth)
            .map(|m| {
                tree.vertices()
                    .filter(|&x| tree.level_of(x) >= m)
                    .map(|x| {
                        inst.sigma2.at(x) * inst.psi.evaluate(x).abs() / inst.sigma1.at(x)
                    })
                    .fold(0.0, f64::max)
            })
            .collect(),
    };

    let verdict = tail_verdict(&values, tol);
    Ok(TailSequence {
        criterion_id: criterion.id().to_string(),
        values,
        verdict,
    })
}

/// sup_n (1/c_n) Σ_{|x|=n, |φ(x)| ≥ m} r(x)^e, optionally weighted by
/// c_{|φ(x)|}.
fn sup_level_sums(inst: &OperatorInstance, m: usize, e: f64, weight_by_image: bool) -> f64 {
    let tree = &inst.tree;
    let mut best = 0.0f64;
    for n in 0..=tree.depth() {
        let mut total = KahanSum::default();
        for x in tree.level(n).unwrap() {
            let image_level = tree.level_of(inst.phi.apply(VertexId(x)));
            if image_level >= m {
                let mut term = powp(inst.symbol_ratio(VertexId(x)), e);
                if weight_by_image {
                    term *= tree.level_size(image_level).unwrap() as f64;
                }
                total.add(term);
            }
        }
        best = best.max(total.value() / tree.level_size(n).unwrap() as f64);
    }
    best
}

/// Outcome of the ∞ → ∞ isometry characterization.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum IsometryVerdict {
    Isometric,
    NotIsometric { reason: String },
}

/// W: T_{σ1,∞} → T_{σ2,∞} is an isometry exactly when φ is onto (here: onto
/// the truncated vertex set) and each fibre's supremum of r equals one.
pub fn isometry_inf_inf_check(inst: &OperatorInstance, tol: f64) -> Result<IsometryVerdict> {
    require(
        !inst.p.is_finite() && !inst.q.is_finite(),
        "isometry check needs p = q = ∞",
    )?;
    let tree = &inst.tree;
    if !inst.phi.is_onto(tree) {
        return Ok(IsometryVerdict::NotIsometric {
            reason: "not onto".into(),
        });
    }
    let mut fibre_sup = vec![0.0f64; tree.vertex_count()];
    for x in tree.vertices() {
        let y = inst.phi.apply(x);
        fibre_sup[y.0] = fibre_sup[y.0].max(inst.symbol_ratio(x));
    }
    for (y, sup) in fibre_sup.iter().enumerate() {
        if (sup - 1.0).abs() > tol {
            return Ok(IsometryVerdict::NotIsometric {
                reason: format!("fibre supremum at vertex {y} is {sup}, not 1"),
            });
        }
    }
    Ok(IsometryVerdict::Isometric)
}

/// The two-point refutation showing no W: T_{σ1,p} → T_{σ2,∞} (p finite) is
/// an isometry: on any level with at least two vertices, the displayed g has
/// different domain and image norms whenever the fibre-normalization
/// necessary condition holds.
#[derive(Debug, Clone, PartialEq)]
pub struct IsometryRefutation {
    pub witness: TreeFunction,
    pub domain_norm: f64,
    pub image_norm: f64,
}

pub fn isometry_p_inf_refuter(inst: &OperatorInstance) -> Result<IsometryRefutation> {
    require(
        inst.p.is_finite() && !inst.q.is_finite(),
        "refuter needs finite p and target ∞",
    )?;
    let tree = &inst.tree;
    let m = (0..=tree.depth())
        .find(|&m| tree.level_size(m).unwrap() >= 2)
        .ok_or(Error::NoSuitableLevel)?;
    let lvl = tree.level(m)?;
    let y1 = VertexId(lvl.start);
    let y2 = VertexId(lvl.start + 1);
    let mut g = TreeFunction::zero(tree);
    g.set(y1, 0.5 / inst.sigma1.at(y1));
    g.set(y2, 1.0 / (3.0 * inst.sigma1.at(y2)));
    let domain_norm = spaces::norm(tree, &inst.sigma1, inst.p, &g);
    let image_norm = spaces::norm(tree, &inst.sigma2, inst.q, &operators::apply(inst, &g));
    Ok(IsometryRefutation {
        witness: g,
        domain_norm,
        image_norm,
    })
}
