//! Run configuration and the constant profiles that stand in for the hidden
//! `Θ(·)` factors of the algorithm.
//!
//! Every polylogarithmic factor is written as `c · λ^k` with
//! `λ = log₂ n / ε`. The `theory` profile uses the exponents of the
//! analysis with unit constants; the `desk` profile drops most of the powers
//! so that every branch runs at a few thousand vertices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    pub name: String,
    /// Cost-estimate sample count `c_cost · ε⁻⁴ · ln n`.
    pub c_cost: f64,
    /// High-cost leaf threshold `c_hi · ε² · N²`.
    pub c_hi: f64,
    /// Nodes of size at most `c_skip · λ^skip_pow` skip local improvement.
    pub c_skip: f64,
    pub skip_pow: i32,
    /// Long-move floor `B = ⌈log₂(c_b · ε N / log₂ n)⌉`.
    pub c_b: f64,
    /// Number of ensembles `c_i · λ^count_pow`.
    pub c_i: f64,
    pub count_pow: i32,
    /// Base ensemble size `c_m · λ^size_pow`, inflated by `n^{1/p}`.
    pub c_m: f64,
    pub size_pow: i32,
    /// Ensemble size never exceeds `c_cap` times the drawing node's size.
    pub c_cap: f64,
    /// Inner rounds per outer iteration `c_loop · λ^loop_pow`.
    pub c_loop: f64,
    pub loop_pow: i32,
    /// Batch sampling fraction `c_q · λ^-q_pow`.
    pub c_q: f64,
    pub q_pow: i32,
}

impl Profile {
    pub fn desk() -> Self {
        Profile {
            name: "desk".into(),
            c_cost: 1.0,
            c_hi: 1.0,
            c_skip: 1.0,
            skip_pow: 1,
            c_b: 1.0,
            c_i: 16.0,
            count_pow: 0,
            c_m: 8.0,
            size_pow: 0,
            c_cap: 4.0,
            c_loop: 2.0,
            loop_pow: 0,
            c_q: 0.01,
            q_pow: 2,
        }
    }

    pub fn theory() -> Self {
        Profile {
            name: "theory".into(),
            c_cost: 1.0,
            c_hi: 1.0,
            c_skip: 1.0,
            skip_pow: 3,
            c_b: 1.0,
            c_i: 1.0,
            count_pow: 6,
            c_m: 1.0,
            size_pow: 5,
            c_cap: f64::INFINITY,
            c_loop: 1.0,
            loop_pow: 2,
            c_q: 1.0,
            q_pow: 2,
        }
    }

    pub fn named(name: &str) -> Result<Self> {
        match name {
            "desk" => Ok(Self::desk()),
            "theory" => Ok(Self::theory()),
            _ => Err(Error::BadParam(format!("unknown profile `{name}`"))),
        }
    }

    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = || Error::BadParam(format!("`{key}` needs a number, got `{value}`"));
        let slot: &mut f64 = match key {
            "c_cost" => &mut self.c_cost,
            "c_hi" => &mut self.c_hi,
            "c_skip" => &mut self.c_skip,
            "c_b" | "c_B" => &mut self.c_b,
            "c_i" | "c_I" => &mut self.c_i,
            "c_m" => &mut self.c_m,
            "c_cap" => &mut self.c_cap,
            "c_loop" => &mut self.c_loop,
            "c_q" => &mut self.c_q,
            _ => return Err(Error::BadParam(format!("unknown constant `{key}`"))),
        };
        let v: f64 = value.parse().map_err(|_| bad())?;
        if v.is_nan() || v <= 0.0 {
            return Err(Error::BadParam(format!("`{key}` must be positive")));
        }
        *slot = v;
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PtasConfig {
    pub epsilon: f64,
    /// Level passes `p`.
    pub passes: usize,
    pub profile: Profile,
    pub seed: u64,
    /// Use the rayon pool where the work splits into independent pieces.
    pub parallel: bool,
}

impl Default for PtasConfig {
    fn default() -> Self {
        PtasConfig { epsilon: 0.4, passes: 2, profile: Profile::desk(), seed: 0, parallel: true }
    }
}

impl PtasConfig {
    pub fn new(epsilon: f64, passes: usize, seed: u64) -> Self {
        PtasConfig { epsilon, passes, seed, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::BadParam(format!("epsilon {} outside (0, 1)", self.epsilon)));
        }
        if self.passes == 0 {
            return Err(Error::BadParam("passes must be at least 1".into()));
        }
        Ok(())
    }

    /// Applies `key=value` lines. `profile` is applied before any `c_*`
    /// override regardless of line order. Blank lines and `#` comments are
    /// ignored.
    pub fn apply_config_text(&mut self, text: &str) -> Result<()> {
        let mut pairs = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: i + 1,
                msg: format!("expected key=value, got `{line}`"),
            })?;
            pairs.push((k.trim().to_string(), v.trim().to_string()));
        }
        if let Some((_, v)) = pairs.iter().rev().find(|(k, _)| k == "profile") {
            self.profile = Profile::named(v)?;
        }
        for (k, v) in pairs.iter().filter(|(k, _)| k != "profile") {
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = || Error::BadParam(format!("bad value `{value}` for `{key}`"));
        match key {
            "epsilon" => self.epsilon = value.parse().map_err(|_| bad())?,
            "passes" => self.passes = value.parse().map_err(|_| bad())?,
            "seed" => self.seed = value.parse().map_err(|_| bad())?,
            "parallel" => self.parallel = value.parse().map_err(|_| bad())?,
            "profile" => {
                if self.profile.name != value {
                    self.profile = Profile::named(value)?;
                }
            }
            _ => self.profile.set(key, value)?,
        }
        Ok(())
    }

    /// `λ = log₂ n / ε`.
    pub fn lambda(&self, n: usize) -> f64 {
        log2n(n) / self.epsilon
    }

    fn scaled(&self, c: f64, pow: i32, n: usize) -> f64 {
        c * self.lambda(n).powi(pow)
    }

    /// Leaves of at most this size are solved exactly.
    pub fn brute_floor(&self, n: usize) -> usize {
        let l = log2n(n);
        let floor = if l > 1.0 { (l / l.log2()).floor() as usize } else { 0 };
        floor.max(9)
    }

    pub fn skip_threshold(&self, n: usize) -> f64 {
        self.scaled(self.profile.c_skip, self.profile.skip_pow, n)
    }

    pub fn ensemble_count(&self, n: usize) -> usize {
        (self.scaled(self.profile.c_i, self.profile.count_pow, n).ceil() as usize).max(1)
    }

    /// Ensemble size before the `n^{1/p}` inflation.
    pub fn ensemble_base(&self, n: usize) -> f64 {
        self.scaled(self.profile.c_m, self.profile.size_pow, n)
    }

    /// Per-vertex ensemble size for a drawing node of `top` vertices.
    pub fn ensemble_size(&self, n: usize, top: usize) -> usize {
        let inflated = self.ensemble_base(n) * (n as f64).powf(1.0 / self.passes as f64);
        let capped = inflated.min(self.profile.c_cap * top as f64);
        (capped.ceil() as usize).max(1)
    }

    /// Lower tail used to judge whether a node kept enough of its inherited
    /// samples: half the un-inflated ensemble size.
    pub fn kept_floor(&self, n: usize) -> usize {
        (self.ensemble_base(n) / 2.0).ceil() as usize
    }

    pub fn inner_rounds(&self, n: usize) -> usize {
        (self.scaled(self.profile.c_loop, self.profile.loop_pow, n).ceil() as usize).max(1)
    }

    pub fn batch_fraction(&self, n: usize) -> f64 {
        self.scaled(self.profile.c_q, -self.profile.q_pow, n).min(1.0)
    }

    pub fn cost_samples(&self, n: usize) -> usize {
        let ln = (n.max(2) as f64).ln();
        (self.profile.c_cost * self.epsilon.powi(-4) * ln).ceil() as usize
    }

    pub fn high_cost(&self, size: usize) -> f64 {
        self.profile.c_hi * self.epsilon * self.epsilon * (size * size) as f64
    }

    /// Smallest move length `d` whose `⌈log₂ d⌉` reaches `B`.
    pub fn min_move_length(&self, n: usize, size: usize) -> usize {
        let x = self.profile.c_b * self.epsilon * size as f64 / log2n(n);
        if x <= 1.0 {
            return 1;
        }
        let b = x.log2().ceil() as u32;
        (1usize << (b - 1)) + 1
    }

    /// Per-sample mean sign a move must beat, `c · ε / log₂ n`.
    pub fn threshold(&self, n: usize, c: f64) -> f64 {
        c * self.epsilon / log2n(n)
    }
}

/// `log₂ n`, floored at 1 so the formulas stay finite on tiny inputs.
pub fn log2n(n: usize) -> f64 {
    (n.max(2) as f64).log2()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_text_overrides() {
        let mut c = PtasConfig::default();
        c.apply_config_text("c_q = 0.5\n# comment\nepsilon=0.3\nprofile=theory\npasses=3\n")
            .unwrap();
        assert_eq!(c.profile.name, "theory");
        assert_eq!(c.profile.c_q, 0.5);
        assert_eq!((c.epsilon, c.passes), (0.3, 3));
        assert!(c.apply_config_text("c_zz=1").is_err());
        assert!(c.apply_config_text("c_m=-1").is_err());
        assert!(matches!(c.apply_config_text("oops"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn desk_quantities() {
        let c = PtasConfig::new(0.4, 2, 0);
        let n = 4096;
        assert_eq!(c.brute_floor(n), 9);
        assert_eq!(c.skip_threshold(n), 30.0);
        assert_eq!(c.ensemble_count(n), 16);
        assert_eq!(c.ensemble_size(n, n), 512);
        assert_eq!(c.ensemble_size(n, 40), 160);
        assert_eq!(c.kept_floor(n), 4);
        // B = ceil(log2(0.4 * 4096 / 12)) = 8
        assert_eq!(c.min_move_length(n, n), 129);
        assert_eq!(c.min_move_length(n, 20), 1);
    }

    #[test]
    fn theory_thresholds_exceed_desk_sizes() {
        let c = PtasConfig { profile: Profile::theory(), ..PtasConfig::new(0.4, 2, 0) };
        assert!(c.skip_threshold(4096) > 4096.0);
    }
}
