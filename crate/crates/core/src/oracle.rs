//! Exact minimum feedback arc set solvers used as test oracles and as the
//! small-leaf solver of the approximation pipeline.

use crate::error::{Error, Result};
use crate::permutation::Permutation;
use crate::tournament::Tournament;

pub const BRUTE_FORCE_CAP: usize = 9;
pub const EXACT_DP_CAP: usize = 20;

/// Minimum cost and the lexicographically first order achieving it.
pub fn brute_force(t: &Tournament, vertices: &[usize]) -> Result<(u64, Permutation)> {
    let n = vertices.len();
    if n > BRUTE_FORCE_CAP {
        return Err(Error::TooLarge { what: "brute_force", cap: BRUTE_FORCE_CAP, got: n });
    }
    let mut sorted = vertices.to_vec();
    sorted.sort_unstable();
    // back[a][b] = 1 when local b beats local a, i.e. b ranked after a is backward
    let back: Vec<Vec<u64>> = (0..n)
        .map(|a| (0..n).map(|b| t.beats(sorted[b], sorted[a]) as u64).collect())
        .collect();
    let mut idx: Vec<usize> = (0..n).collect();
    let mut best = (u64::MAX, idx.clone());
    loop {
        let mut c = 0u64;
        for i in 0..n {
            for j in i + 1..n {
                c += back[idx[i]][idx[j]];
            }
        }
        if c < best.0 {
            best = (c, idx.clone());
        }
        if !next_permutation(&mut idx) {
            break;
        }
    }
    let order = best.1.into_iter().map(|i| sorted[i]).collect();
    Ok((if n == 0 { 0 } else { best.0 }, Permutation::new(order)?))
}

fn next_permutation(a: &mut [usize]) -> bool {
    let Some(i) = a.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = a.iter().rposition(|&x| x > a[i]).unwrap();
    a.swap(i, j);
    a[i + 1..].reverse();
    true
}

/// Subset dynamic program: `dp[S] = min_v dp[S \ v] + |{u in S \ v : v -> u}|`,
/// placing `v` last among `S`.
pub fn exact_dp(t: &Tournament, vertices: &[usize]) -> Result<(u64, Permutation)> {
    let n = vertices.len();
    if n > EXACT_DP_CAP {
        return Err(Error::TooLarge { what: "exact_dp", cap: EXACT_DP_CAP, got: n });
    }
    let out: Vec<u32> = (0..n)
        .map(|a| {
            (0..n).filter(|&b| t.beats(vertices[a], vertices[b])).fold(0u32, |m, b| m | (1 << b))
        })
        .collect();
    let full = (1usize << n) - 1;
    let mut dp = vec![u32::MAX; 1 << n];
    let mut last = vec![0u8; 1 << n];
    dp[0] = 0;
    for s in 1..=full {
        let mut rest = s;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let prev = s & !(1 << v);
            let c = dp[prev] + (out[v] & prev as u32).count_ones();
            if c < dp[s] {
                dp[s] = c;
                last[s] = v as u8;
            }
        }
    }
    let mut order = Vec::with_capacity(n);
    let mut s = full;
    while s != 0 {
        let v = last[s] as usize;
        order.push(vertices[v]);
        s &= !(1 << v);
    }
    order.reverse();
    Ok((dp[full] as u64, Permutation::new(order)?))
}
