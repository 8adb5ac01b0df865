//! Splits the cost of a recursively built order into the permanent charge of
//! every split (`beta`) and the residual cost inside every leaf (`alpha`).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::permutation::Permutation;
use crate::tournament::Tournament;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TraceNode {
    /// A split of the node's vertices into a left part ranked entirely before
    /// the right part.
    Internal { id: usize, left: Vec<usize>, right: Vec<usize> },
    Leaf { id: usize, vertices: Vec<usize> },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecursionTrace {
    pub nodes: Vec<TraceNode>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostAttribution {
    /// `(node id, beta)` for every internal node.
    pub internal: Vec<(usize, u64)>,
    /// `(node id, alpha)` for every leaf.
    pub leaves: Vec<(usize, u64)>,
}

impl CostAttribution {
    pub fn beta_sum(&self) -> u64 {
        self.internal.iter().map(|x| x.1).sum()
    }

    pub fn alpha_sum(&self) -> u64 {
        self.leaves.iter().map(|x| x.1).sum()
    }

    pub fn total(&self) -> u64 {
        self.beta_sum() + self.alpha_sum()
    }
}

pub fn attribute_costs(
    trace: &RecursionTrace,
    output: &Permutation,
    t: &Tournament,
) -> Result<CostAttribution> {
    let mut covered = vec![0u32; t.n()];
    let mut attribution = CostAttribution::default();
    for node in &trace.nodes {
        match node {
            TraceNode::Internal { id, left, right } => {
                let mut beta = 0u64;
                for &u in left {
                    for &v in right {
                        if u == v {
                            return Err(Error::TraceMismatch(format!(
                                "vertex {u} on both sides of node {id}"
                            )));
                        }
                        beta += t.beats(v, u) as u64;
                    }
                }
                attribution.internal.push((*id, beta));
            }
            TraceNode::Leaf { id, vertices } => {
                let mut ranked = Vec::with_capacity(vertices.len());
                for &v in vertices {
                    let r = output.try_rank(v).ok_or_else(|| {
                        Error::TraceMismatch(format!("leaf {id} vertex {v} missing from output"))
                    })?;
                    covered[v] += 1;
                    ranked.push((r, v));
                }
                ranked.sort_unstable();
                let mut alpha = 0u64;
                for (i, &(_, u)) in ranked.iter().enumerate() {
                    for &(_, v) in &ranked[i + 1..] {
                        alpha += t.beats(v, u) as u64;
                    }
                }
                attribution.leaves.push((*id, alpha));
            }
        }
    }
    for &v in output.order() {
        if covered[v] != 1 {
            return Err(Error::TraceMismatch(format!(
                "vertex {v} covered by {} leaves",
                covered[v]
            )));
        }
    }
    if covered.iter().map(|&c| c as usize).sum::<usize>() != output.len() {
        return Err(Error::TraceMismatch("leaves cover vertices outside the output".into()));
    }
    Ok(attribution)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, GeneratorSpec};
    use crate::permutation::cost;

    #[test]
    fn single_leaf() {
        let t = generate(&GeneratorSpec::uniform(7, 2)).unwrap();
        let pi = Permutation::new(vec![3, 1, 0, 6, 2, 5, 4]).unwrap();
        let trace = RecursionTrace {
            nodes: vec![TraceNode::Leaf { id: 0, vertices: (0..7).collect() }],
        };
        let a = attribute_costs(&trace, &pi, &t).unwrap();
        assert_eq!(a.beta_sum(), 0);
        assert_eq!(a.alpha_sum(), cost(&pi, &t));
    }

    #[test]
    fn split_identity_and_mismatch() {
        let t = generate(&GeneratorSpec::uniform(6, 9)).unwrap();
        let pi = Permutation::new(vec![4, 0, 2, 5, 1, 3]).unwrap();
        let trace = RecursionTrace {
            nodes: vec![
                TraceNode::Internal { id: 0, left: vec![4, 0, 2], right: vec![5, 1, 3] },
                TraceNode::Leaf { id: 1, vertices: vec![0, 2, 4] },
                TraceNode::Leaf { id: 2, vertices: vec![1, 3, 5] },
            ],
        };
        assert_eq!(attribute_costs(&trace, &pi, &t).unwrap().total(), cost(&pi, &t));

        let broken = RecursionTrace {
            nodes: vec![TraceNode::Leaf { id: 0, vertices: vec![0, 1, 2, 3, 4] }],
        };
        assert!(matches!(attribute_costs(&broken, &pi, &t), Err(Error::TraceMismatch(_))));
    }
}
