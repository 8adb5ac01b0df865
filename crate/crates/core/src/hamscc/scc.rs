//! Strongly connected components from a Hamiltonian path.

use std::fmt::Write;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stream::{EdgeConsumer, EdgeStream};
use crate::tournament::Tournament;

/// Components as contiguous intervals of a path, in path order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SccPartition {
    pub path: Vec<usize>,
    /// Inclusive `(start, end)` path positions.
    pub intervals: Vec<(usize, usize)>,
}

impl SccPartition {
    pub fn is_strongly_connected(&self) -> bool {
        self.intervals.len() == 1
    }

    /// Vertex sets in path order, each sorted.
    pub fn components(&self) -> Vec<Vec<usize>> {
        self.intervals
            .iter()
            .map(|&(a, b)| {
                let mut c = self.path[a..=b].to_vec();
                c.sort_unstable();
                c
            })
            .collect()
    }

    /// `strongly_connected:` header, then one `start end` line per component.
    pub fn to_text(&self) -> String {
        let mut s = format!("strongly_connected: {}\n", self.is_strongly_connected());
        for &(a, b) in &self.intervals {
            writeln!(s, "{a} {b}").unwrap();
        }
        s
    }
}

struct BackReach<'a> {
    pos: &'a [usize],
    f: Vec<usize>,
    broken: bool,
}

impl EdgeConsumer for BackReach<'_> {
    fn name(&self) -> &str {
        "scc-back-reach"
    }

    fn on_edge(&mut self, from: usize, to: usize) {
        let (pf, pt) = (self.pos[from], self.pos[to]);
        if pf == pt + 1 {
            self.broken = true;
        }
        self.f[from] = self.f[from].min(pt);
    }

    fn retained_words(&self) -> Option<usize> {
        Some(self.f.len())
    }
}

/// One pass computes `f(v)`, the earliest path position among the
/// out-neighbours of `v`; a component ends after position `i` exactly when
/// no later vertex reaches back to `i` or earlier.
pub fn scc_from_path(stream: &mut EdgeStream, path: &[usize]) -> Result<SccPartition> {
    let n = stream.n();
    if path.len() != n {
        return Err(Error::InvalidPath(format!("path has {} vertices, expected {n}", path.len())));
    }
    let mut pos = vec![usize::MAX; n];
    for (i, &v) in path.iter().enumerate() {
        if v >= n || pos[v] != usize::MAX {
            return Err(Error::InvalidPath(format!("vertex {v} at position {i} is out of range or repeated")));
        }
        pos[v] = i;
    }
    let mut c = BackReach { pos: &pos, f: vec![usize::MAX; n], broken: false };
    stream.run_pass("scc", &mut [&mut c])?;
    stream.meter_mut().release(n);
    if c.broken {
        return Err(Error::InvalidPath("a consecutive pair points backward".into()));
    }
    let mut intervals = Vec::new();
    let mut suffix = usize::MAX;
    let mut end = n.wrapping_sub(1);
    for i in (0..n).rev() {
        // boundary after i iff min over j > i of f(path[j]) exceeds i
        if i + 1 < n && suffix > i {
            intervals.push((i + 1, end));
            end = i;
        }
        suffix = suffix.min(c.f[path[i]]);
    }
    if n > 0 {
        intervals.push((0, end));
    }
    intervals.reverse();
    Ok(SccPartition { path: path.to_vec(), intervals })
}

/// Components in topological order of the condensation, each sorted.
pub fn tarjan_oracle(t: &Tournament) -> Vec<Vec<usize>> {
    let mut g = DiGraph::<(), ()>::with_capacity(t.n(), t.n() * t.n().saturating_sub(1) / 2);
    let nodes: Vec<_> = (0..t.n()).map(|_| g.add_node(())).collect();
    for (u, v) in t.edges() {
        g.add_edge(nodes[u], nodes[v], ());
    }
    let mut comps: Vec<Vec<usize>> = tarjan_scc(&g)
        .into_iter()
        .map(|c| {
            let mut c: Vec<usize> = c.into_iter().map(|x| x.index()).collect();
            c.sort_unstable();
            c
        })
        .collect();
    comps.reverse();
    comps
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, GeneratorSpec};
    use crate::hamscc::offline::ham_path_offline;
    use crate::stream::StreamOrder;

    fn run(t: &Tournament) -> SccPartition {
        let path = ham_path_offline(t, &(0..t.n()).collect::<Vec<_>>());
        scc_from_path(&mut EdgeStream::new(t.clone(), StreamOrder::Canonical), &path).unwrap()
    }

    #[test]
    fn transitive_is_all_singletons() {
        let t = generate(&GeneratorSpec::transitive(6)).unwrap();
        let p = run(&t);
        assert_eq!(p.intervals, (0..6).map(|i| (i, i)).collect::<Vec<_>>());
        assert!(!p.is_strongly_connected());
        assert_eq!(p.components(), tarjan_oracle(&t));
    }

    #[test]
    fn cycle_is_one_component() {
        let t = generate(&GeneratorSpec::cycle(3)).unwrap();
        let p = run(&t);
        assert!(p.is_strongly_connected());
        assert_eq!(p.to_text(), "strongly_connected: true\n0 2\n");
        assert_eq!(p.components(), tarjan_oracle(&t));
    }

    #[test]
    fn rejects_broken_paths() {
        let t = generate(&GeneratorSpec::transitive(4)).unwrap();
        let mut s = EdgeStream::new(t, StreamOrder::Canonical);
        assert!(matches!(scc_from_path(&mut s, &[3, 2, 1, 0]), Err(Error::InvalidPath(_))));
        assert!(matches!(scc_from_path(&mut s, &[0, 1, 2]), Err(Error::InvalidPath(_))));
        assert!(matches!(scc_from_path(&mut s, &[0, 1, 1, 2]), Err(Error::InvalidPath(_))));
    }

    #[test]
    fn planted_matches_oracle() {
        for seed in 0..20 {
            let t = generate(&GeneratorSpec::planted(40, 0.05, seed)).unwrap();
            assert_eq!(run(&t).components(), tarjan_oracle(&t), "seed {seed}");
        }
    }
}
