use crate::error::Result;
use crate::permutation::Permutation;
use crate::stream::{EdgeStream, IndegreeCounter};
use crate::tournament::Tournament;

/// Sorts by ascending indegree, ties by vertex id. One pass, `n` counters.
pub fn indegree_approx(stream: &mut EdgeStream) -> Result<Permutation> {
    let mut counter = IndegreeCounter::new(stream.n());
    stream.run_pass("indegree", &mut [&mut counter])?;
    let mut order: Vec<usize> = (0..stream.n()).collect();
    order.sort_by_key(|&v| (counter.indegree[v], v));
    let n = stream.n();
    stream.meter_mut().release(n);
    Permutation::new(order)
}

/// Offline indegree order of a vertex subset, indegrees counted inside it.
pub fn indegree_order(t: &Tournament, vertices: &[usize]) -> Vec<usize> {
    let mut keyed: Vec<(usize, usize)> = vertices
        .iter()
        .map(|&v| (vertices.iter().filter(|&&u| t.beats(u, v)).count(), v))
        .collect();
    keyed.sort_unstable();
    keyed.into_iter().map(|(_, v)| v).collect()
}
