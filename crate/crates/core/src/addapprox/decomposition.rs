//! Sampled cut decomposition of a signed matrix.

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::cut::{CutDecomposition, CutRectangle, Matrix};
use crate::error::{Error, Result};

/// Largest side accepted by [`get_cut_decomposition`].
pub const DECOMPOSITION_CAP: usize = 64;
pub const T0_CAP: usize = 256;
pub const R0_CAP: usize = 32;
pub const S0_CAP: usize = 64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CdParams {
    pub epsilon: f64,
    pub delta: f64,
    pub t0: usize,
    pub r0: usize,
    pub s0: usize,
    /// `|U|`.
    pub p: usize,
    /// `|U_1| = |V_1|` inside the trial loop.
    pub q: usize,
    /// `|U_1| = |V_1|` for the re-estimate.
    pub q_prime: usize,
}

impl CdParams {
    /// Asymptotic constants with unit leading factors, clamped by the caps
    /// above. Sample sizes are clamped to the matrix sides later.
    pub fn new(epsilon: f64, delta: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::BadParam(format!("epsilon must lie in (0, 1), got {epsilon}")));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::BadParam(format!("delta must lie in (0, 1), got {delta}")));
        }
        let e4 = epsilon.powi(-4);
        let sat = |x: f64| if x.is_finite() && x < 1e12 { x.ceil().max(1.0) as usize } else { 1 << 40 };
        let t0 = sat(81.0 * e4).min(T0_CAP);
        let r0 = sat(e4).min(R0_CAP);
        let s0 = sat((t0 as f64 / delta).log2()).min(S0_CAP);
        let p = sat(e4 * ((t0 * r0 * s0) as f64 / delta).log2());
        let q = p.saturating_mul(r0);
        let q_prime = sat(
            (p * s0 * t0) as f64 / delta + epsilon.powi(-8) * ((s0 * t0) as f64 / delta).log2(),
        );
        Ok(CdParams { epsilon, delta, t0, r0, s0, p, q, q_prime })
    }
}

struct Draw {
    rows: Vec<bool>,
    cols: Vec<bool>,
}

fn subset(rng: &mut impl Rng, len: usize, k: usize) -> Vec<bool> {
    let mut mask = vec![false; len];
    for i in sample(rng, len, k.min(len)).iter() {
        mask[i] = true;
    }
    mask
}

fn masked_sum(w: &Matrix, rows: impl Fn(usize) -> bool, cols: impl Fn(usize) -> bool) -> f64 {
    let mut s = 0.0;
    for i in (0..w.rows()).filter(|&i| rows(i)) {
        s += w.row(i).iter().enumerate().filter(|&(j, _)| cols(j)).map(|(_, x)| x).sum::<f64>();
    }
    s
}

/// One candidate `(R̃, C̃)` from a random column and level.
fn trial(w: &Matrix, params: &CdParams, rng: &mut impl Rng) -> (f64, Draw) {
    let (m, n) = (w.rows(), w.cols());
    let v = rng.random_range(0..n);
    let nu: f64 = rng.random_range(-1.0..=1.0);
    let u = subset(rng, m, params.p);
    let u1 = subset(rng, m, params.q);
    let v1 = subset(rng, n, params.q);
    let r: Vec<bool> = (0..m)
        .map(|i| if nu >= 0.0 { w.get(i, v) >= nu } else { w.get(i, v) <= nu })
        .collect();
    let mut colsum = vec![0.0; n];
    for i in (0..m).filter(|&i| r[i] && u[i]) {
        for (c, x) in colsum.iter_mut().zip(w.row(i)) {
            *c += x;
        }
    }
    let c: Vec<bool> = colsum.iter().map(|&s| if nu >= 0.0 { s >= 0.0 } else { s < 0.0 }).collect();
    let scale = (m as f64 / params.q.min(m) as f64) * (n as f64 / params.q.min(n) as f64);
    let est = scale * masked_sum(w, |i| r[i] && u1[i], |j| c[j] && v1[j]);
    (est, Draw { rows: r, cols: c })
}

/// Outcome of one `s` iteration: a rectangle, or nothing above the gate.
fn attempt(w: &Matrix, params: &CdParams, rng: &mut impl Rng) -> Option<CutRectangle> {
    let (m, n) = (w.rows(), w.cols());
    let (mf, nf) = (m as f64, n as f64);
    let eps2mn = params.epsilon * params.epsilon * mf * nf;
    let mut best: Option<(f64, Draw)> = None;
    for _ in 0..params.r0 {
        let (est, d) = trial(w, params, rng);
        if best.as_ref().is_none_or(|(b, _)| est.abs() > b.abs()) {
            best = Some((est, d));
        }
    }
    let (_, Draw { rows: mut r, cols: mut c }) = best?;
    let (qr, qc) = (params.q_prime.min(m), params.q_prime.min(n));
    let u1 = subset(rng, m, qr);
    let v1 = subset(rng, n, qc);
    let scale = (mf / qr as f64) * (nf / qc as f64);
    let mut est = scale * masked_sum(w, |i| r[i] && u1[i], |j| c[j] && v1[j]);
    if est.abs() < eps2mn / 9.0 {
        return None;
    }
    let sign = est.signum();

    let mut rho = mf / qr as f64 * (0..m).filter(|&i| r[i] && u1[i]).count() as f64;
    if rho < 2.0 * mf / 5.0 {
        let w1 = scale * masked_sum(w, |i| u1[i], |j| c[j] && v1[j]);
        if sign * w1 >= eps2mn / 19.0 {
            r.fill(true);
            est = w1;
            rho = mf;
        } else {
            r.iter_mut().for_each(|x| *x = !*x);
            est = w1 - est;
            rho = mf - rho;
        }
    }
    let mut kappa = nf / qc as f64 * (0..n).filter(|&j| c[j] && v1[j]).count() as f64;
    if kappa < 2.0 * nf / 5.0 {
        let w2 = scale * masked_sum(w, |i| r[i] && u1[i], |j| v1[j]);
        if sign * w2 >= eps2mn / 39.0 {
            c.fill(true);
            est = w2;
            kappa = nf;
        } else {
            c.iter_mut().for_each(|x| *x = !*x);
            est = w2 - est;
            kappa = nf - kappa;
        }
    }
    if rho <= 0.0 || kappa <= 0.0 {
        return None;
    }
    Some(CutRectangle {
        rows: (0..m).filter(|&i| r[i]).collect(),
        cols: (0..n).filter(|&j| c[j]).collect(),
        density: est / (rho * kappa),
    })
}

/// Greedy sampled cut decomposition. Fails once `t_0` rectangles have been
/// appended without reaching the stopping gate.
pub fn get_cut_decomposition(a: &Matrix, params: &CdParams, rng: &mut impl Rng) -> Result<CutDecomposition> {
    let (m, n) = (a.rows(), a.cols());
    for (what, got) in [("decomposition rows", m), ("decomposition cols", n)] {
        if got > DECOMPOSITION_CAP {
            return Err(Error::TooLarge { what, cap: DECOMPOSITION_CAP, got });
        }
    }
    let mut out = CutDecomposition::new(m, n);
    if m == 0 || n == 0 {
        return Ok(out);
    }
    let mut w = a.clone();
    loop {
        let found = (0..params.s0).find_map(|_| attempt(&w, params, rng));
        let Some(rect) = found else { return Ok(out) };
        w.subtract_cut(&rect);
        out.rectangles.push(rect);
        if out.len() >= params.t0 {
            return Err(Error::DecompositionFailure(params.t0));
        }
    }
}
