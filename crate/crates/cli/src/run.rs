use std::collections::BTreeMap;
use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use tourney_core::addapprox::add_approx_mfas;
use tourney_core::hamscc::{ham_path_streaming, scc_from_path, tarjan_oracle, validate_ham_path};
use tourney_core::io::{read_path, Ingested};
use tourney_core::oracle::{brute_force, exact_dp, BRUTE_FORCE_CAP, EXACT_DP_CAP};
use tourney_core::ptas::{indegree_approx, kwiksort_baseline, run_ptas, PtasConfig};
use tourney_core::stream::{EdgeFilter, PhaseReport};
use tourney_core::{cost, generate, EdgeStream, GeneratorSpec, Permutation, StreamOrder, Tournament};

use crate::args::{Algo, GenKind, Instance, RunArgs};
use crate::error::CliError;

pub const PROFILE_ENV: &str = "TOURNEY_PROFILE";

/// Additive-approximation failure probability used by `--algo addapprox`.
const ADDAPPROX_ETA: f64 = 0.01;

#[derive(Clone, Debug)]
pub enum Source {
    Generated { kind: GenKind, n: usize, q: Option<f64> },
    File(PathBuf, Ingested),
}

/// A validated run request.
#[derive(Clone, Debug)]
pub struct RunSpec {
    pub algo: Algo,
    pub source: Source,
    pub seed: u64,
    pub config: PtasConfig,
    pub stream_order: StreamOrder,
    pub repeat: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Record {
    pub seed: u64,
    pub algo: Algo,
    pub n: usize,
    pub cost: u64,
    pub oracle_cost: Option<u64>,
    pub ratio: Option<f64>,
    pub passes: usize,
    pub peak_words: usize,
    pub phase_breakdown: BTreeMap<String, PhaseReport>,
    pub redo_count: Option<usize>,
    /// `Σβ + Σα = cost`, for runs that produce an attribution.
    pub attribution_check: Option<bool>,
    /// Every internal identity of this run held.
    pub identity_ok: bool,
    pub details: BTreeMap<&'static str, Value>,
}

pub fn generator_spec(instance: &Instance, seed: u64) -> Result<GeneratorSpec, CliError> {
    let kind = instance.gen.ok_or_else(|| CliError::invalid("gen", "required unless --input is given"))?;
    let n = instance.n.ok_or_else(|| CliError::invalid("n", "required with --gen"))?;
    if n == 0 {
        return Err(CliError::invalid("n", "must be at least 1"));
    }
    match (kind, instance.q) {
        (GenKind::Planted, Some(q)) if (0.0..=0.5).contains(&q) => Ok(GeneratorSpec::planted(n, q, seed)),
        (GenKind::Planted, Some(q)) => Err(CliError::invalid("q", format!("{q} outside [0, 0.5]"))),
        (GenKind::Planted, None) => Err(CliError::invalid("q", "required with --gen planted")),
        (_, Some(_)) => Err(CliError::invalid("q", "only meaningful with --gen planted")),
        (GenKind::Transitive, None) => Ok(GeneratorSpec::transitive(n)),
        (GenKind::Cycle, None) => Ok(GeneratorSpec::cycle(n)),
        (GenKind::Uniform, None) => Ok(GeneratorSpec::uniform(n, seed)),
    }
}

impl RunSpec {
    /// Validates `args`. `env_profile` overrides `--profile` when set.
    pub fn from_args(args: &RunArgs, env_profile: Option<String>) -> Result<Self, CliError> {
        if args.repeat == 0 {
            return Err(CliError::invalid("repeat", "must be at least 1"));
        }
        let source = match &args.input {
            Some(path) => {
                if args.instance.n.is_some() || args.instance.q.is_some() {
                    return Err(CliError::invalid("input", "conflicts with --n and --q"));
                }
                Source::File(path.clone(), read_path(path)?)
            }
            None => {
                let spec = generator_spec(&args.instance, args.instance.seed)?;
                Source::Generated { kind: args.instance.gen.unwrap(), n: spec.n, q: args.instance.q }
            }
        };

        let mut config = PtasConfig::default();
        let mut text = match &args.config {
            Some(path) => std::fs::read_to_string(path)?,
            None => String::new(),
        };
        if let Some(profile) = env_profile.filter(|p| !p.is_empty()).or_else(|| args.profile.clone()) {
            text.push_str(&format!("\nprofile={profile}\n"));
        }
        config.apply_config_text(&text).map_err(|e| CliError::invalid("config", e.to_string()))?;
        if let Some(eps) = args.epsilon {
            config.epsilon = eps;
        }
        if let Some(p) = args.passes {
            config.passes = p;
        }
        if !(config.epsilon > 0.0 && config.epsilon < 1.0) {
            return Err(CliError::invalid("epsilon", format!("{} outside (0, 1)", config.epsilon)));
        }
        if config.passes == 0 {
            return Err(CliError::invalid("passes", "must be at least 1"));
        }
        let stream_order = args
            .stream_order
            .parse()
            .map_err(|e: tourney_core::Error| CliError::invalid("stream-order", e.to_string()))?;

        let spec = RunSpec { algo: args.algo, source, seed: args.instance.seed, config, stream_order, repeat: args.repeat };
        spec.check_caps()?;
        Ok(spec)
    }

    pub fn n(&self) -> usize {
        match &self.source {
            Source::Generated { n, .. } => *n,
            Source::File(_, ingested) => ingested.tournament.n(),
        }
    }

    fn check_caps(&self) -> Result<(), CliError> {
        let n = self.n();
        let cap = match self.algo {
            Algo::OracleDp => Some(("exact_dp", EXACT_DP_CAP)),
            Algo::OracleBrute => Some(("brute_force", BRUTE_FORCE_CAP)),
            _ => None,
        };
        match cap {
            Some((what, cap)) if n > cap => Err(CliError::OracleCap { what, cap, got: n }),
            _ => Ok(()),
        }
    }

    fn stream(&self, seed: u64) -> Result<EdgeStream, CliError> {
        Ok(match &self.source {
            Source::Generated { kind, n, q } => {
                let instance = Instance { gen: Some(*kind), n: Some(*n), q: *q, seed };
                EdgeStream::new(generate(&generator_spec(&instance, seed)?)?, self.stream_order)
            }
            Source::File(_, ingested) => EdgeStream::from_ingested(ingested.clone(), self.stream_order),
        })
    }

    /// Echo of the request for the JSON header.
    pub fn describe(&self) -> Value {
        let (gen, n, q, input) = match &self.source {
            Source::Generated { kind, n, q } => (json!(kind), *n, *q, None),
            Source::File(path, ingested) => {
                (Value::Null, ingested.tournament.n(), None, Some(path.display().to_string()))
            }
        };
        json!({
            "algo": self.algo,
            "gen": gen,
            "input": input,
            "n": n,
            "q": q,
            "seed": self.seed,
            "epsilon": self.config.epsilon,
            "passes": self.config.passes,
            "profile": self.config.profile,
            "stream_order": self.stream_order.to_string(),
            "repeat": self.repeat,
        })
    }

    /// Runs every repetition; records come back sorted by seed.
    pub fn run(&self) -> Result<Vec<Record>, CliError> {
        (0..self.repeat as u64).into_par_iter().map(|i| self.run_one(self.seed.wrapping_add(i))).collect()
    }

    pub fn run_one(&self, seed: u64) -> Result<Record, CliError> {
        let mut stream = self.stream(seed)?;
        let n = stream.n();
        let all: Vec<usize> = (0..n).collect();
        let mut details = BTreeMap::new();
        let mut redo_count = None;
        let mut attribution_check = None;
        let mut identity_ok = true;

        let order: Vec<usize> = match self.algo {
            Algo::Ptas => {
                let config = PtasConfig { seed, ..self.config.clone() };
                let out = run_ptas(&mut stream, &config)?;
                let c = cost(&out.permutation, stream.oracle_tournament());
                let ok = out.attribution.total() == c;
                attribution_check = Some(ok);
                identity_ok &= ok;
                details.insert("brute_leaves", json!(out.ledger.brute_leaves));
                details.insert("addapprox_leaves", json!(out.ledger.addapprox_leaves));
                details.insert("addapprox_fallbacks", json!(out.ledger.addapprox_fallbacks));
                details.insert("base_case_passes", json!(out.ledger.base_case_passes));
                details.insert("levels", json!(out.ledger.levels.len()));
                out.permutation.into_order()
            }
            Algo::Indegree => indegree_approx(&mut stream)?.into_order(),
            Algo::Kwiksort => kwiksort_baseline(&mut stream, self.config.passes, seed)?.into_order(),
            Algo::Addapprox => {
                let t = collect(&mut stream, "addapprox")?;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let out = add_approx_mfas(&t, &all, self.config.epsilon, ADDAPPROX_ETA, &mut rng)?;
                details.insert("fallback", json!(out.fallback));
                details.insert("rectangles", json!(out.rectangles));
                details.insert("buckets", json!(out.buckets));
                out.order
            }
            Algo::OracleDp => exact_dp(&collect(&mut stream, "oracle")?, &all)?.1.into_order(),
            Algo::OracleBrute => {
                let t = collect(&mut stream, "oracle")?;
                let (c, pi) = brute_force(&t, &all)?;
                identity_ok &= c == exact_dp(&t, &all)?.0;
                pi.into_order()
            }
            Algo::Hampath | Algo::Scc => {
                let out = ham_path_streaming(&mut stream, self.config.passes, seed)?;
                redo_count = Some(out.redo_count);
                details.insert("redo_capped", json!(out.redo_capped));
                identity_ok &= validate_ham_path(&out.path, stream.oracle_tournament());
                if self.algo == Algo::Scc {
                    let part = scc_from_path(&mut stream, &out.path)?;
                    let components = part.components();
                    identity_ok &= components == tarjan_oracle(stream.oracle_tournament());
                    details.insert("components", json!(components.len()));
                    details.insert("strongly_connected", json!(part.is_strongly_connected()));
                }
                out.path
            }
        };

        let t = stream.oracle_tournament();
        let pi = Permutation::new(order)?;
        identity_ok &= pi.len() == n;
        let c = cost(&pi, t);
        let oracle_cost = match n <= EXACT_DP_CAP {
            true => Some(exact_dp(t, &all)?.0),
            false => None,
        };
        if matches!(self.algo, Algo::OracleDp | Algo::OracleBrute) {
            identity_ok &= oracle_cost == Some(c);
        }
        let ratio = oracle_cost.and_then(|opt| match (opt, c) {
            (0, 0) => Some(1.0),
            (0, _) => None,
            _ => Some(c as f64 / opt as f64),
        });
        let meter = stream.meter().report();
        Ok(Record {
            seed,
            algo: self.algo,
            n,
            cost: c,
            oracle_cost,
            ratio,
            passes: meter.passes,
            peak_words: meter.peak_words,
            phase_breakdown: meter.phase_breakdown,
            redo_count,
            attribution_check,
            identity_ok,
            details,
        })
    }
}

/// One metered pass that keeps every edge, for the offline solvers.
fn collect(stream: &mut EdgeStream, phase: &str) -> Result<Tournament, CliError> {
    let mut all = EdgeFilter::new(phase, |_, _| true);
    stream.run_pass(phase, &mut [&mut all])?;
    Ok(Tournament::from_edges(stream.n(), all.edges)?)
}
