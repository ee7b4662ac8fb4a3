//! Finite-depth truncations of rooted trees with breadth-first vertex ids.
//!
//! Vertex ids are `0..V-1` in breadth-first order, so every level occupies a
//! contiguous id range and level slicing is O(1). All suprema computed
//! elsewhere in the crate range over the truncation only; results are
//! depth-D lower approximations of the corresponding infinite-tree values.

use std::fmt;

use crate::error::{Error, Result};

/// Vertex id in breadth-first order; the root is always `VertexId(0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub usize);

impl VertexId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A rooted tree truncated at a fixed depth.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedTree {
    depth: usize,
    parent: Vec<Option<usize>>,
    level_of: Vec<usize>,
    /// `level_start[n]..level_start[n+1]` is the id range of level n.
    level_start: Vec<usize>,
}

impl TruncatedTree {
    /// Homogeneous tree: every vertex has `arity` children, down to `depth`.
    pub fn build_homogeneous(arity: usize, depth: usize) -> Result<Self> {
        if arity == 0 {
            return Err(Error::Invalid("arity must be at least 1".into()));
        }
        let mut sizes = Vec::with_capacity(depth + 1);
        let mut c = 1usize;
        for n in 0..=depth {
            sizes.push(c);
            if n < depth {
                c = c.checked_mul(arity).ok_or_else(|| {
                    Error::Invalid("homogeneous tree too large".into())
                })?;
            }
        }
        Self::build_from_level_sizes(&sizes)
    }

    /// Build from an explicit parent array (`None` marks the root).
    ///
    /// Ids must already be in breadth-first order: every parent precedes its
    /// child and levels are contiguous.
    pub fn build_explicit(parents: &[Option<usize>]) -> Result<Self> {
        if parents.is_empty() {
            return Err(Error::MalformedTree("empty parent list".into()));
        }
        if parents[0].is_some() {
            return Err(Error::MalformedTree("vertex 0 must be the root".into()));
        }
        let mut level_of = vec![0usize; parents.len()];
        for (v, p) in parents.iter().enumerate().skip(1) {
            match p {
                None => {
                    return Err(Error::MalformedTree(format!(
                        "second root at vertex {v}"
                    )))
                }
                Some(p) if *p >= v => {
                    return Err(Error::MalformedTree(format!(
                        "vertex {v} references parent {p} that does not precede it"
                    )))
                }
                Some(p) => level_of[v] = level_of[*p] + 1,
            }
        }
        for v in 1..parents.len() {
            let step = level_of[v] as isize - level_of[v - 1] as isize;
            if !(0..=1).contains(&step) {
                return Err(Error::MalformedTree(format!(
                    "vertex ids are not in breadth-first level order near vertex {v}"
                )));
            }
        }
        let depth = *level_of.last().unwrap();
        let mut level_start = vec![0usize; depth + 2];
        for &l in &level_of {
            level_start[l + 1] += 1;
        }
        for n in 0..=depth {
            level_start[n + 1] += level_start[n];
        }
        Ok(Self {
            depth,
            parent: parents.to_vec(),
            level_of,
            level_start,
        })
    }

    /// Build from level sizes, attaching parents round-robin across the
    /// previous level. All quantities computed in this crate depend only on
    /// the level sizes and on the per-vertex data, never on adjacency, so any
    /// deterministic attachment is equivalent.
    pub fn build_from_level_sizes(sizes: &[usize]) -> Result<Self> {
        if sizes.is_empty() || sizes[0] != 1 {
            return Err(Error::MalformedTree(
                "level 0 must contain exactly the root".into(),
            ));
        }
        if let Some(n) = sizes.iter().position(|&c| c == 0) {
            return Err(Error::MalformedTree(format!("level {n} is empty")));
        }
        let total: usize = sizes.iter().sum();
        let mut parents = Vec::with_capacity(total);
        parents.push(None);
        let mut prev_start = 0usize;
        for (n, &c) in sizes.iter().enumerate().skip(1) {
            let prev_c = sizes[n - 1];
            for j in 0..c {
                parents.push(Some(prev_start + j % prev_c));
            }
            prev_start += prev_c;
        }
        Self::build_explicit(&parents)
    }

    /// Truncation depth D.
    #[inline]
    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Total number of vertices.
    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.level_of.len()
    }

    /// Id range of level `n`.
    pub fn level(&self, n: usize) -> Result<std::ops::Range<usize>> {
        if n > self.depth {
            return Err(Error::LevelOutOfRange {
                level: n,
                depth: self.depth,
            });
        }
        Ok(self.level_start[n]..self.level_start[n + 1])
    }

    /// c_n, the number of vertices at level `n`.
    pub fn level_size(&self, n: usize) -> Result<usize> {
        Ok(self.level(n)?.len())
    }

    /// `[c_0, ..., c_D]`.
    pub fn level_sizes(&self) -> Vec<usize> {
        (0..=self.depth)
            .map(|n| self.level_start[n + 1] - self.level_start[n])
            .collect()
    }

    /// |x|, the distance from the root.
    #[inline]
    pub fn level_of(&self, v: VertexId) -> usize {
        self.level_of[v.0]
    }

    pub fn parent(&self, v: VertexId) -> Option<VertexId> {
        self.parent[v.0].map(VertexId)
    }

    #[inline]
    pub fn contains(&self, v: VertexId) -> bool {
        v.0 < self.level_of.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        (0..self.vertex_count()).map(VertexId)
    }

    /// Smallest-id vertex of level `n`; the canonical pinned choice wherever
    /// a per-level representative is needed.
    pub fn first_of_level(&self, n: usize) -> Result<VertexId> {
        Ok(VertexId(self.level(n)?.start))
    }

    /// Warns when the level-size sequence does not look like the front of an
    /// unbounded sequence, which is the regime the space theory assumes.
    pub fn growth_warning(&self) -> Option<String> {
        let sizes = self.level_sizes();
        let max = *sizes.iter().max().unwrap();
        let last = *sizes.last().unwrap();
        if max == 1 {
            Some("level sizes are constant (c_n = 1); the ambient theory assumes unbounded c_n".into())
        } else if last < max {
            Some(format!(
                "level sizes peak at {max} before the final level (c_D = {last}); the ambient theory assumes unbounded c_n"
            ))
        } else {
            None
        }
    }
}
