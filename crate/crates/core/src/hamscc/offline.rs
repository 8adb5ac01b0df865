//! In-memory path builders.

use rand::Rng;

use crate::tournament::Tournament;

/// Insertion construction over `vertices` taken in the given order. Each
/// vertex goes to the leftmost valid slot.
pub fn ham_path_offline_by(vertices: &[usize], beats: impl Fn(usize, usize) -> bool) -> Vec<usize> {
    let mut path: Vec<usize> = Vec::with_capacity(vertices.len());
    for &v in vertices {
        let Some(&head) = path.first() else {
            path.push(v);
            continue;
        };
        if beats(v, head) {
            path.insert(0, v);
            continue;
        }
        match path.windows(2).position(|w| beats(w[0], v) && beats(v, w[1])) {
            Some(i) => path.insert(i + 1, v),
            None => path.push(v),
        }
    }
    path
}

/// Hamiltonian path of the sub-tournament on `vertices`, inserting in id
/// order.
pub fn ham_path_offline(t: &Tournament, vertices: &[usize]) -> Vec<usize> {
    let mut ids = vertices.to_vec();
    ids.sort_unstable();
    ham_path_offline_by(&ids, |a, b| t.beats(a, b))
}

/// Randomized pivot quicksort. The output is always a Hamiltonian path.
pub fn kwiksort_by(vertices: &[usize], beats: &impl Fn(usize, usize) -> bool, rng: &mut impl Rng) -> Vec<usize> {
    if vertices.len() <= 1 {
        return vertices.to_vec();
    }
    let pivot = vertices[rng.random_range(0..vertices.len())];
    let (left, right): (Vec<usize>, Vec<usize>) =
        vertices.iter().copied().filter(|&v| v != pivot).partition(|&v| beats(v, pivot));
    let mut out = kwiksort_by(&left, beats, rng);
    out.push(pivot);
    out.extend(kwiksort_by(&right, beats, rng));
    out
}

/// `path` lists every vertex once and each consecutive pair is a forward edge.
pub fn validate_ham_path(path: &[usize], t: &Tournament) -> bool {
    if path.len() != t.n() {
        return false;
    }
    let mut seen = vec![false; t.n()];
    for &v in path {
        if v >= t.n() || std::mem::replace(&mut seen[v], true) {
            return false;
        }
    }
    path.windows(2).all(|w| t.beats(w[0], w[1]))
}
