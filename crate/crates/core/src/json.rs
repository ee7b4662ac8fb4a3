//! JSON wire formats for trees, weights, functions, self maps, and whole
//! operator instances, as consumed by the command-line front end.
//!
//! Exponents serialize as a plain number or the string `"inf"`. All specs
//! reparse bit-exactly from their own serialization.

use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::operators::{OperatorInstance, Parity, SelfMap};
use crate::spaces::{Exponent, TreeFunction, Weight};
use crate::tree::{TruncatedTree, VertexId};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TreeSpec {
    Homogeneous { arity: usize, depth: usize },
    Explicit { parents: Vec<Option<usize>> },
    Levels { sizes: Vec<usize> },
}

impl TreeSpec {
    pub fn build(&self) -> Result<TruncatedTree> {
        match self {
            TreeSpec::Homogeneous { arity, depth } => {
                TruncatedTree::build_homogeneous(*arity, *depth)
            }
            TreeSpec::Explicit { parents } => TruncatedTree::build_explicit(parents),
            TreeSpec::Levels { sizes } => TruncatedTree::build_from_level_sizes(sizes),
        }
    }

    /// Vertex count the spec would produce, without building anything.
    pub fn vertex_count(&self) -> Result<usize> {
        let overflow = || Error::Invalid("tree size overflows".into());
        match self {
            TreeSpec::Homogeneous { arity, depth } => {
                let mut total = 0usize;
                let mut c = 1usize;
                for n in 0..=*depth {
                    total = total.checked_add(c).ok_or_else(overflow)?;
                    if n < *depth {
                        c = c.checked_mul(*arity).ok_or_else(overflow)?;
                    }
                }
                Ok(total)
            }
            TreeSpec::Explicit { parents } => Ok(parents.len()),
            TreeSpec::Levels { sizes } => sizes
                .iter()
                .try_fold(0usize, |acc, &c| acc.checked_add(c))
                .ok_or_else(overflow),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum WeightSpec {
    One,
    /// σ(x) = (1+|x|)^exponent
    Poly { exponent: f64 },
    /// σ(x) = base^{|x|}
    Exp { base: f64 },
    Explicit { values: Vec<f64> },
}

impl WeightSpec {
    pub fn build(&self, tree: &TruncatedTree) -> Result<Weight> {
        match self {
            WeightSpec::One => Ok(Weight::one(tree)),
            WeightSpec::Poly { exponent } => Weight::poly(tree, *exponent),
            WeightSpec::Exp { base } => Weight::exponential(tree, *base),
            WeightSpec::Explicit { values } => Weight::from_values(tree, values.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FunctionSpec {
    One,
    Indicator { entries: Vec<(usize, f64)> },
    Explicit { values: Vec<f64> },
}

impl FunctionSpec {
    pub fn build(&self, tree: &TruncatedTree) -> Result<TreeFunction> {
        match self {
            FunctionSpec::One => Ok(TreeFunction::constant(tree, 1.0)),
            FunctionSpec::Indicator { entries } => {
                let mut f = TreeFunction::zero(tree);
                for &(v, value) in entries {
                    if v >= tree.vertex_count() {
                        return Err(Error::Invalid(format!(
                            "indicator entry at vertex {v} is outside the truncation"
                        )));
                    }
                    if !value.is_finite() {
                        return Err(Error::Invalid(format!(
                            "indicator value at vertex {v} must be finite"
                        )));
                    }
                    f.set(VertexId(v), value);
                }
                Ok(f)
            }
            FunctionSpec::Explicit { values } => TreeFunction::from_values(tree, values.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MapSpec {
    Identity,
    Constant { target: usize },
    /// One target per level; every level-n vertex maps to `targets[n]`.
    LevelCollapse { targets: Vec<usize> },
    /// Levels of the given parity collapse to their smallest-id vertex;
    /// everything else goes to the root.
    ParityCollapse { parity: ParitySpec },
    Explicit { values: Vec<usize> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParitySpec {
    Even,
    Odd,
}

impl MapSpec {
    pub fn build(&self, tree: &TruncatedTree) -> Result<SelfMap> {
        match self {
            MapSpec::Identity => Ok(SelfMap::identity(tree)),
            MapSpec::Constant { target } => SelfMap::constant(tree, VertexId(*target)),
            MapSpec::LevelCollapse { targets } => {
                let ids: Vec<VertexId> = targets.iter().map(|&t| VertexId(t)).collect();
                SelfMap::level_collapse(tree, &ids)
            }
            MapSpec::ParityCollapse { parity } => Ok(SelfMap::parity_collapse(
                tree,
                match parity {
                    ParitySpec::Even => Parity::Even,
                    ParitySpec::Odd => Parity::Odd,
                },
            )),
            MapSpec::Explicit { values } => SelfMap::from_targets(tree, values.clone()),
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Exponent::Finite(p) => serializer.serialize_f64(*p),
            Exponent::Infinity => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Number(p) => Exponent::finite(p).map_err(serde::de::Error::custom),
            Raw::Text(s) if s == "inf" => Ok(Exponent::Infinity),
            Raw::Text(s) => Err(serde::de::Error::custom(format!(
                "exponent must be a positive number or \"inf\", got {s:?}"
            ))),
        }
    }
}

fn default_tol() -> f64 {
    1e-9
}

/// A whole operator instance as stored on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub tree: TreeSpec,
    pub sigma1: WeightSpec,
    pub sigma2: WeightSpec,
    pub psi: FunctionSpec,
    pub phi: MapSpec,
    pub p: Exponent,
    pub q: Exponent,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

impl InstanceSpec {
    /// Validate everything against the tree and assemble the instance.
    /// `max_vertices` caps the truncation size.
    pub fn build(&self, max_vertices: usize) -> Result<OperatorInstance> {
        if !(self.tol.is_finite() && self.tol >= 0.0) {
            return Err(Error::Invalid(format!(
                "tolerance must be a nonnegative number, got {}",
                self.tol
            )));
        }
        // size check goes before construction so oversized specs fail
        // without allocating
        let vertices = self.tree.vertex_count()?;
        if vertices > max_vertices {
            return Err(Error::Invalid(format!(
                "tree has {vertices} vertices, exceeding the {max_vertices}-vertex cap"
            )));
        }
        let tree = Arc::new(self.tree.build()?);
        let sigma1 = self.sigma1.build(&tree)?;
        let sigma2 = self.sigma2.build(&tree)?;
        let psi = self.psi.build(&tree)?;
        let phi = self.phi.build(&tree)?;
        OperatorInstance::new(tree, sigma1, sigma2, self.p, self.q, psi, phi)
    }
}

/// Lossless instance spec for an already-built instance, with every
/// component in explicit form.
pub fn instance_to_spec(inst: &OperatorInstance, tree: TreeSpec) -> InstanceSpec {
    InstanceSpec {
        tree,
        sigma1: WeightSpec::Explicit {
            values: inst.sigma1.values().to_vec(),
        },
        sigma2: WeightSpec::Explicit {
            values: inst.sigma2.values().to_vec(),
        },
        psi: FunctionSpec::Explicit {
            values: inst.psi.values().to_vec(),
        },
        phi: MapSpec::Explicit {
            values: inst.phi.targets().to_vec(),
        },
        p: inst.p,
        q: inst.q,
        tol: default_tol(),
    }
}
