//! Brute-force operator-norm estimation over the truncation's unit ball,
//! independent of the closed-form values in [`crate::criteria`].
//!
//! Every reported value is the measured norm of the operator applied to an
//! explicitly constructed feasible function, so it is a sound lower bound by
//! construction; the concentration strategy additionally attains the true
//! maximum over the unit ball.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{powp, rootp};
use crate::operators::{apply, OperatorInstance};
use crate::spaces::{self, Exponent, TreeFunction};
use crate::tree::VertexId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleStrategy {
    /// Exact maximizer: the optimum over the unit ball concentrates all mass
    /// of each argument level on that level's best target, because the
    /// objective is linear in the per-vertex masses t_w = σ1(w)^p f(w)^p and
    /// the feasible set is a product of scaled simplices (finite exponents),
    /// or a box (domain ∞).
    Concentration,
    /// Seeded multistart coordinate ascent with per-level renormalization.
    /// A lower bound only; used as an independent sanity check.
    RandomAscent,
}

/// Outcome of a brute-force search: the best value found, the feasible
/// function attaining it, and how much work it took.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub value: f64,
    pub extremal: TreeFunction,
    pub strategy: OracleStrategy,
    pub iterations: u64,
}

/// Estimate the operator norm of `inst` over the truncation's unit ball.
///
/// `budget` is the number of restarts for [`OracleStrategy::RandomAscent`]
/// (ignored by concentration); `seed` drives all randomness.
pub fn oracle_opnorm(
    inst: &OperatorInstance,
    strategy: OracleStrategy,
    budget: usize,
    seed: u64,
) -> Result<OracleResult> {
    match strategy {
        OracleStrategy::Concentration => concentration(inst),
        OracleStrategy::RandomAscent => {
            if budget == 0 {
                return Err(Error::Invalid("random_ascent needs budget >= 1".into()));
            }
            random_ascent(inst, budget, seed)
        }
    }
}

fn objective(inst: &OperatorInstance, f: &TreeFunction) -> f64 {
    spaces::norm(&inst.tree, &inst.sigma2, inst.q, &apply(inst, f))
}

fn concentration(inst: &OperatorInstance) -> Result<OracleResult> {
    match (inst.p, inst.q) {
        // unit ball is the box |f| ≤ 1/σ1; the objective is monotone in |f|
        // pointwise, so the corner 1/σ1 is optimal for every target exponent
        (Exponent::Infinity, _) => {
            let extremal = inst.sigma1.reciprocal_function();
            let value = objective(inst, &extremal);
            Ok(OracleResult {
                value,
                extremal,
                strategy: OracleStrategy::Concentration,
                iterations: 1,
            })
        }
        // a sup target is attained by a single one-hot function; scan them
        (Exponent::Finite(p), Exponent::Infinity) => {
            let tree = &inst.tree;
            let mut best_value = 0.0f64;
            let mut best = TreeFunction::zero(tree);
            let mut iterations = 0u64;
            for w in tree.vertices() {
                let candidate =
                    spaces::indicator_unit(tree, &inst.sigma1, Exponent::Finite(p), w);
                let value = objective(inst, &candidate);
                iterations += 1;
                if value > best_value {
                    best_value = value;
                    best = candidate;
                }
            }
            Ok(OracleResult {
                value: best_value,
                extremal: best,
                strategy: OracleStrategy::Concentration,
                iterations,
            })
        }
        (Exponent::Finite(p), Exponent::Finite(q)) => {
            if p != q {
                return Err(Error::WrongExponents(
                    "concentration supports finite exponents only when p = q".into(),
                ));
            }
            concentration_pp(inst, p)
        }
    }
}

/// Per-argument-level linear program, solved by inspection: with
/// t_w = σ1(w)^p f(w)^p the level-n objective is Σ_w B_n(w) t_w under
/// Σ_{|w|=m} t_w ≤ c_m, so the optimum puts t_w = c_m on each level's best
/// target. Candidate functions are built for every target level n and the
/// winner is measured through `apply` and the space norm.
fn concentration_pp(inst: &OperatorInstance, p: f64) -> Result<OracleResult> {
    let tree = &inst.tree;
    let vcount = tree.vertex_count();

    // preimage lists of φ
    let mut preimages: Vec<Vec<usize>> = vec![Vec::new(); vcount];
    for x in tree.vertices() {
        preimages[inst.phi.apply(x).0].push(x.0);
    }

    let mut best_value = 0.0f64;
    let mut best = TreeFunction::zero(tree);
    let mut iterations = 0u64;
    for n in 0..=tree.depth() {
        // B_n(w) = Σ_{x ∈ φ^{-1}(w) ∩ D_n} (σ2(x)|ψ(x)|)^p / σ1(w)^p
        let mut coef = vec![0.0f64; vcount];
        for (w, pre) in preimages.iter().enumerate() {
            let mut sum = 0.0;
            for &x in pre {
                if tree.level_of(VertexId(x)) == n {
                    sum += powp(
                        inst.sigma2.at(VertexId(x)) * inst.psi.evaluate(VertexId(x)).abs(),
                        p,
                    );
                }
            }
            if sum > 0.0 {
                coef[w] = sum / powp(inst.sigma1.at(VertexId(w)), p);
            }
        }
        // concentrate each level's full mass on its best target
        let mut candidate = TreeFunction::zero(tree);
        let mut touched = false;
        for m in 0..=tree.depth() {
            let ids = tree.level(m)?;
            let c_m = ids.len() as f64;
            let mut best_w: Option<usize> = None;
            let mut best_coef = 0.0;
            for w in ids {
                if coef[w] > best_coef {
                    best_coef = coef[w];
                    best_w = Some(w);
                }
            }
            if let Some(w) = best_w {
                candidate.set(
                    VertexId(w),
                    rootp(c_m, p) / inst.sigma1.at(VertexId(w)),
                );
                touched = true;
            }
        }
        if !touched {
            continue;
        }
        let value = objective(inst, &candidate);
        iterations += 1;
        if value > best_value {
            best_value = value;
            best = candidate;
        }
    }
    Ok(OracleResult {
        value: best_value,
        extremal: best,
        strategy: OracleStrategy::Concentration,
        iterations,
    })
}

const MAX_SWEEPS: usize = 50;

fn random_ascent(inst: &OperatorInstance, restarts: usize, seed: u64) -> Result<OracleResult> {
    let tree = &inst.tree;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best_value = 0.0f64;
    let mut best = TreeFunction::zero(tree);
    let mut iterations = 0u64;

    for _ in 0..restarts {
        let mut f = TreeFunction::from_values(
            tree,
            (0..tree.vertex_count()).map(|_| rng.gen::<f64>()).collect(),
        )
        .expect("random values are finite");
        project(inst, &mut f);
        let mut value = objective(inst, &f);
        iterations += 1;

        for _ in 0..MAX_SWEEPS {
            let mut improved = false;
            for v in tree.vertices() {
                let current = f.evaluate(v);
                for candidate in coordinate_candidates(inst, v, current) {
                    let mut g = f.clone();
                    g.set(v, candidate);
                    match inst.p {
                        Exponent::Finite(_) => renormalize_level(inst, &mut g, tree.level_of(v)),
                        Exponent::Infinity => {}
                    }
                    let candidate_value = objective(inst, &g);
                    iterations += 1;
                    if candidate_value > value {
                        value = candidate_value;
                        f = g;
                        improved = true;
                    }
                }
            }
            if !improved {
                break;
            }
        }

        if value > best_value {
            best_value = value;
            best = f;
        }
    }

    Ok(OracleResult {
        value: best_value,
        extremal: best,
        strategy: OracleStrategy::RandomAscent,
        iterations,
    })
}

fn coordinate_candidates(inst: &OperatorInstance, v: VertexId, current: f64) -> Vec<f64> {
    match inst.p {
        Exponent::Finite(_) => {
            if current == 0.0 {
                vec![1.0]
            } else {
                vec![0.0, current * 0.5, current * 2.0]
            }
        }
        Exponent::Infinity => {
            let cap = inst.sigma1.at(v).recip();
            vec![0.0, cap * 0.5, cap]
        }
    }
}

/// Scale one level so its σ1-p mean is exactly one (levels that are all zero
/// stay zero).
fn renormalize_level(inst: &OperatorInstance, f: &mut TreeFunction, level: usize) {
    let p = inst.p.value().expect("finite domain exponent");
    let mean = spaces::level_mean(&inst.tree, &inst.sigma1, p, level, f).expect("level in range");
    if mean > 0.0 {
        let ids = inst.tree.level(level).expect("level in range");
        for v in ids {
            let scaled = f.evaluate(VertexId(v)) / mean;
            f.set(VertexId(v), scaled);
        }
    }
}

fn project(inst: &OperatorInstance, f: &mut TreeFunction) {
    match inst.p {
        Exponent::Finite(_) => {
            for level in 0..=inst.tree.depth() {
                renormalize_level(inst, f, level);
            }
        }
        Exponent::Infinity => {
            for v in inst.tree.vertices() {
                let cap = inst.sigma1.at(v).recip();
                let clamped = f.evaluate(v).abs().min(cap);
                f.set(v, clamped);
            }
        }
    }
}
