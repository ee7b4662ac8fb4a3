//! Six ready-made operator configurations contrasting the boundedness and
//! compactness of the multiplication and composition factors with the
//! weighted composition operator they compose into.
//!
//! Each case fixes one pinned vertex x_n per level (the smallest id) and
//! builds the symbols around those pins; every attached check is decidable
//! on the truncation and scales with its depth.

use std::sync::Arc;

use crate::criteria;
use crate::error::{Error, Result};
use crate::numeric::{powp, rel_close, rootp};
use crate::operators::{self, OperatorInstance, Parity, SelfMap};
use crate::spaces::{self, Exponent, TreeFunction, Weight};
use crate::tree::{TruncatedTree, VertexId};

/// One named check: `pass` records whether `lhs` relates to `rhs` as claimed
/// (equality within tolerance, or `lhs ≤ rhs` with tolerance slack).
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct AssertionOutcome {
    pub name: String,
    pub pass: bool,
    pub lhs: f64,
    pub rhs: f64,
}

fn check_eq(name: &str, lhs: f64, rhs: f64, tol: f64) -> AssertionOutcome {
    AssertionOutcome {
        name: name.to_string(),
        pass: rel_close(lhs, rhs, tol),
        lhs,
        rhs,
    }
}

fn check_le(name: &str, lhs: f64, rhs: f64, tol: f64) -> AssertionOutcome {
    AssertionOutcome {
        name: name.to_string(),
        pass: lhs <= rhs + tol * rhs.abs().max(1.0),
        lhs,
        rhs,
    }
}

/// A configured operator with its evaluated checks.
#[derive(Debug, Clone)]
pub struct ExampleCase {
    pub id: u32,
    pub instance: OperatorInstance,
    pub assertions: Vec<AssertionOutcome>,
    /// Depth-monotone evidence that a factor operator is unbounded on the
    /// full tree, when the case provides one.
    pub unbounded_evidence: Option<f64>,
    /// The norm report certifying that the composed operator stays bounded.
    pub bounded_report: f64,
    pub warning: Option<String>,
}

impl ExampleCase {
    pub fn all_pass(&self) -> bool {
        self.assertions.iter().all(|a| a.pass)
    }
}

/// Pinned vertex of each level: the smallest id.
fn pins(tree: &TruncatedTree) -> Vec<VertexId> {
    (0..=tree.depth())
        .map(|n| tree.first_of_level(n).expect("level within depth"))
        .collect()
}

/// Function supported on the pinned vertices of the selected levels.
fn pinned_function(
    tree: &TruncatedTree,
    select: impl Fn(usize) -> bool,
    value: impl Fn(usize) -> f64,
) -> TreeFunction {
    let mut f = TreeFunction::zero(tree);
    for (n, &x) in pins(tree).iter().enumerate() {
        if select(n) {
            f.set(x, value(n));
        }
    }
    f
}

fn with_phi(inst: &OperatorInstance, phi: SelfMap) -> OperatorInstance {
    OperatorInstance {
        phi,
        ..inst.clone()
    }
}

fn with_psi(inst: &OperatorInstance, psi: TreeFunction) -> OperatorInstance {
    OperatorInstance {
        psi,
        ..inst.clone()
    }
}

/// Build example `id` (1..=6) on the given truncation with finite exponent
/// p (used for both domain and target). `tol` controls the pass threshold of
/// the evaluated assertions.
pub fn example(
    id: u32,
    tree: &Arc<TruncatedTree>,
    p: f64,
    tol: f64,
) -> Result<ExampleCase> {
    let p_exp = Exponent::finite(p)?;
    let depth = tree.depth();
    let warning = tree.growth_warning();
    let one = Weight::one(tree);
    let csize = |n: usize| tree.level_size(n).expect("level within depth") as f64;
    let max_even = (0..=depth).filter(|n| n % 2 == 0).max().unwrap();
    let max_odd = (0..=depth).filter(|n| n % 2 == 1).max();

    let case = match id {
        1 => {
            // ψ marks the pins, φ collapses each level onto its pin: the
            // composition factor blows up like c_n while ψ thins it back to
            // a contraction.
            let psi = pinned_function(tree, |_| true, |_| 1.0);
            let phi = SelfMap::level_collapse(tree, &pins(tree))?;
            let inst = OperatorInstance::new(
                Arc::clone(tree),
                one.clone(),
                one.clone(),
                p_exp,
                p_exp,
                psi,
                phi.clone(),
            )?;

            let paper_f = pinned_function(tree, |_| true, |n| rootp(csize(n), p));
            let comp_inst = with_psi(&inst, TreeFunction::constant(tree, 1.0));
            let cf = operators::apply(&comp_inst, &paper_f);
            let mean = powp(spaces::level_mean(tree, &one, p, depth, &cf)?, p);
            let comp_norm = criteria::opnorm_composition_pp(&comp_inst)?.value;
            let w_norm = criteria::opnorm_pp_exact(&inst)?.value;

            let assertions = vec![
                check_eq("collapsed-level-mean-equals-level-size", mean, csize(depth), tol),
                check_eq(
                    "composition-norm-pth-power-equals-top-level-size",
                    powp(comp_norm, p),
                    csize(depth),
                    tol,
                ),
                check_le("weighted-operator-norm-le-one", w_norm, 1.0, tol),
            ];
            ExampleCase {
                id,
                instance: inst,
                unbounded_evidence: Some(powp(comp_norm, p)),
                bounded_report: w_norm,
                assertions,
                warning,
            }
        }
        2 => {
            // ψ grows like c_n^{1/p} on the pins while φ collapses
            // everything to the root: the multiplication factor is
            // unbounded, the composed operator is a contraction.
            let psi = pinned_function(tree, |_| true, |n| rootp(csize(n), p));
            let phi = SelfMap::constant(tree, VertexId(0))?;
            let inst = OperatorInstance::new(
                Arc::clone(tree),
                one.clone(),
                one.clone(),
                p_exp,
                p_exp,
                psi,
                phi,
            )?;

            let mult_inst = with_phi(&inst, SelfMap::identity(tree));
            let mult_norm = criteria::opnorm_mult_pp(&mult_inst)?.value;
            let w_norm = criteria::opnorm_pp_exact(&inst)?.value;

            let assertions = vec![
                check_eq(
                    "mult-norm-equals-top-level-size-root",
                    mult_norm,
                    rootp(csize(depth), p),
                    tol,
                ),
                check_le("weighted-operator-norm-le-one", w_norm, 1.0, tol),
            ];
            ExampleCase {
                id,
                instance: inst,
                unbounded_evidence: Some(mult_norm),
                bounded_report: w_norm,
                assertions,
                warning,
            }
        }
        3 => {
            // parity split: even levels collapse onto their pins (blowing up
            // the composition factor), ψ grows on the odd pins (blowing up
            // the multiplication factor), and the two never meet.
            let psi = pinned_function(tree, |n| n % 2 == 1, |n| rootp(csize(n), p));
            let phi = SelfMap::parity_collapse(tree, Parity::Even);
            let inst = OperatorInstance::new(
                Arc::clone(tree),
                one.clone(),
                one.clone(),
                p_exp,
                p_exp,
                psi,
                phi.clone(),
            )?;

            let paper_f = pinned_function(tree, |_| true, |n| rootp(csize(n), p));
            let comp_inst = with_psi(&inst, TreeFunction::constant(tree, 1.0));
            let cf = operators::apply(&comp_inst, &paper_f);
            let mean = powp(spaces::level_mean(tree, &one, p, max_even, &cf)?, p);

            let mult_inst = with_phi(&inst, SelfMap::identity(tree));
            let mult_norm = criteria::opnorm_mult_pp(&mult_inst)?.value;
            let comp_norm = criteria::opnorm_composition_pp(&comp_inst)?.value;
            let w_norm = criteria::opnorm_pp_exact(&inst)?.value;

            // each factor's report advances only when its parity gains a
            // level, so the growth evidence combines both
            let evidence = powp(mult_norm, p) + powp(comp_norm, p);
            let expected_evidence = max_odd
                .map(|n| (1..=n).filter(|k| k % 2 == 1).map(csize).fold(0.0, f64::max))
                .unwrap_or(0.0)
                + (0..=max_even)
                    .filter(|k| k % 2 == 0)
                    .map(csize)
                    .fold(0.0, f64::max);

            let assertions = vec![
                check_eq(
                    "collapsed-even-level-mean-equals-level-size",
                    mean,
                    csize(max_even),
                    tol,
                ),
                check_eq("unbounded-evidence", evidence, expected_evidence, tol),
                check_le("weighted-operator-norm-le-one", w_norm, 1.0, tol),
            ];
            ExampleCase {
                id,
                instance: inst,
                unbounded_evidence: Some(evidence),
                bounded_report: w_norm,
                assertions,
                warning,
            }
        }
        4 => {
            // σ2/σ1 = 1+|x| is unbounded, so the embedding (the composition
            // factor at φ = id) degrades with depth, while ψ decays fast
            // enough that the multiplication tail is harmonic.
            let sigma1 = Weight::poly(tree, 1.0)?;
            let sigma2 = Weight::poly(tree, 2.0)?;
            let psi = TreeFunction::from_values(
                tree,
                tree.vertices()
                    .map(|v| {
                        let n = (1 + tree.level_of(v)) as f64;
                        (sigma1.at(v) / sigma2.at(v)) / n
                    })
                    .collect(),
            )?;
            let inst = OperatorInstance::new(
                Arc::clone(tree),
                sigma1.clone(),
                sigma2.clone(),
                p_exp,
                p_exp,
                psi,
                SelfMap::identity(tree),
            )?;

            let incl = spaces::inclusion_constant(&sigma1, &sigma2);
            let seq = criteria::tail(&inst, criteria::TailCriterion::Mult, tol)?;
            let deviation = seq
                .values
                .iter()
                .enumerate()
                .map(|(m, v)| (v - 1.0 / (1 + m) as f64).abs())
                .fold(0.0, f64::max);
            let w_norm = criteria::opnorm_mult_pp(&inst)?.value;

            let assertions = vec![
                check_eq(
                    "inclusion-constant-equals-depth-plus-one",
                    incl,
                    (depth + 1) as f64,
                    tol,
                ),
                check_le("mult-tail-is-harmonic", deviation, 0.0, tol),
                check_le("weighted-operator-norm-le-one", w_norm, 1.0, tol),
            ];
            ExampleCase {
                id,
                instance: inst,
                unbounded_evidence: None,
                bounded_report: w_norm,
                assertions,
                warning,
            }
        }
        5 => {
            // 1/σ1 is unbounded so the multiplication factor blows up, but a
            // constant φ reduces the composed operator to a point evaluation
            // capped by the growth bound at the target.
            let sigma1 = Weight::poly(tree, -1.0)?;
            let sigma2 = one.clone();
            let psi = sigma2.reciprocal_function();
            let target = VertexId(0);
            let inst = OperatorInstance::new(
                Arc::clone(tree),
                sigma1.clone(),
                sigma2,
                p_exp,
                p_exp,
                psi,
                SelfMap::constant(tree, target)?,
            )?;

            let mult_inst = with_phi(&inst, SelfMap::identity(tree));
            let mult_norm = criteria::opnorm_mult_pp(&mult_inst)?.value;
            let w_norm = criteria::opnorm_pp_exact(&inst)?.value;
            let cap = spaces::growth_bound(tree, &sigma1, p, target);

            let assertions = vec![
                check_eq(
                    "mult-norm-equals-depth-plus-one",
                    mult_norm,
                    (depth + 1) as f64,
                    tol,
                ),
                check_le("weighted-operator-norm-le-growth-cap", w_norm, cap, tol),
            ];
            ExampleCase {
                id,
                instance: inst,
                unbounded_evidence: Some(mult_norm),
                bounded_report: w_norm,
                assertions,
                warning,
            }
        }
        6 => {
            // both factors blow up (σ1 decays along the pins, the even
            // levels collapse), yet ψ only fires on odd levels whose images
            // sit at the root, so the composed operator is bounded by
            // evaluation there.
            let sigma1 = Weight::poly(tree, -1.0)?;
            let sigma2 = one.clone();
            let psi = pinned_function(tree, |n| n % 2 == 1, |_| 1.0);
            let phi = SelfMap::parity_collapse(tree, Parity::Even);
            let inst = OperatorInstance::new(
                Arc::clone(tree),
                sigma1.clone(),
                sigma2.clone(),
                p_exp,
                p_exp,
                psi,
                phi.clone(),
            )?;

            let paper_f = pinned_function(tree, |_| true, |n| {
                rootp(csize(n), p) * (n + 1) as f64 // c_n^{1/p} / σ1(x_n)
            });
            let comp_inst = with_psi(&inst, TreeFunction::constant(tree, 1.0));
            let cf = operators::apply(&comp_inst, &paper_f);
            let mean = spaces::level_mean(tree, &sigma2, p, max_even, &cf)?;
            let expected_mean = rootp(csize(max_even), p) * (max_even + 1) as f64;

            let wf = operators::apply(&inst, &paper_f);
            let w_of_f = spaces::norm(tree, &sigma2, p_exp, &wf);
            let root_value = paper_f.evaluate(VertexId(0)).abs();

            let mult_inst = with_phi(&inst, SelfMap::identity(tree));
            let mult_norm = criteria::opnorm_mult_pp(&mult_inst)?.value;
            let comp_norm = criteria::opnorm_pp_exact(&comp_inst)?.value;
            let w_norm = criteria::opnorm_pp_exact(&inst)?.value;

            let evidence = powp(mult_norm, p) + powp(comp_norm, p);
            let expected_evidence = max_odd
                .map(|n| {
                    (1..=n)
                        .filter(|k| k % 2 == 1)
                        .map(|k| powp((k + 1) as f64, p))
                        .fold(0.0, f64::max)
                })
                .unwrap_or(0.0)
                + (0..=max_even)
                    .filter(|k| k % 2 == 0)
                    .map(|k| csize(k) * powp((k + 1) as f64, p))
                    .fold(0.0, f64::max);

            let assertions = vec![
                check_eq("collapsed-even-level-mean-grows", mean, expected_mean, tol),
                check_le("weighted-image-norm-le-root-value", w_of_f, root_value, tol),
                check_eq("unbounded-evidence", evidence, expected_evidence, tol),
                check_le("weighted-operator-norm-le-one", w_norm, 1.0, tol),
            ];
            ExampleCase {
                id,
                instance: inst,
                unbounded_evidence: Some(evidence),
                bounded_report: w_norm,
                assertions,
                warning,
            }
        }
        other => return Err(Error::UnknownExample(other)),
    };
    Ok(case)
}
