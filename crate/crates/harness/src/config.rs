//! Experiment configuration, read from TOML.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use svi_core::feasibility::{FeasibilityConfig, SampleRule};
use svi_core::problem::GameParams;
use svi_core::solvers::{step_cap, AveragingMode, Method, SolverConfig, StepSchedule, DEFAULT_W4};

use crate::error::{HarnessError, Result};

/// The shipped zero-sum study configuration.
pub const SEC7_TOML: &str = include_str!("../configs/sec7.toml");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub output_dir: PathBuf,
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub problem: ProblemBlock,
    #[serde(default)]
    pub feasibility: FeasibilityBlock,
    #[serde(default)]
    pub evaluation: EvaluationBlock,
    #[serde(rename = "solver")]
    pub solvers: Vec<SolverBlock>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProblemBlock {
    /// Seed of the problem instance, shared by every run.
    pub seed: u64,
    pub player_dim: usize,
    pub num_constraints: usize,
    pub payoff_spectrum: [f64; 2],
    pub constraint_spectrum: [f64; 2],
    pub linear_range: [f64; 2],
    pub offset_range: [f64; 2],
    pub noise_stddev: f64,
    pub box_radius: f64,
}

impl Default for ProblemBlock {
    fn default() -> Self {
        let g = GameParams::default();
        Self {
            seed: 0,
            player_dim: g.player_dim,
            num_constraints: g.num_constraints,
            payoff_spectrum: g.payoff_spectrum.into(),
            constraint_spectrum: g.constraint_spectrum.into(),
            linear_range: g.linear_range.into(),
            offset_range: g.offset_range.into(),
            noise_stddev: g.noise_stddev,
            box_radius: g.box_radius,
        }
    }
}

impl ProblemBlock {
    pub fn game_params(&self) -> GameParams {
        GameParams {
            player_dim: self.player_dim,
            num_constraints: self.num_constraints,
            payoff_spectrum: self.payoff_spectrum.into(),
            constraint_spectrum: self.constraint_spectrum.into(),
            linear_range: self.linear_range.into(),
            offset_range: self.offset_range.into(),
            noise_stddev: self.noise_stddev,
            box_radius: self.box_radius,
        }
    }
}

/// Sample-count rule for the feasibility passes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum RuleBlock {
    Constant { n: u64 },
    Root { r: f64 },
    Log { base: f64 },
    MaxRoot { floor: u64, r: f64 },
}

impl RuleBlock {
    pub fn sample_rule(self) -> SampleRule {
        match self {
            RuleBlock::Constant { n } => SampleRule::Constant(n),
            RuleBlock::Root { r } => SampleRule::Root(r),
            RuleBlock::Log { base } => SampleRule::Log(base),
            RuleBlock::MaxRoot { floor, r } => SampleRule::MaxRoot { floor, r },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FeasibilityBlock {
    pub beta: f64,
    pub rule: RuleBlock,
}

impl Default for FeasibilityBlock {
    fn default() -> Self {
        Self {
            beta: 1.0,
            rule: RuleBlock::Root { r: 2.0 },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CloudKind {
    /// Per-block candidates, Cartesian product of the survivors.
    Product,
    /// Candidates over the whole box, filtered by every constraint.
    Joint,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvaluationBlock {
    pub cloud_candidates: usize,
    pub cloud: CloudKind,
    pub cloud_seed: u64,
    pub cadence: usize,
    pub record_wall_time: bool,
}

impl Default for EvaluationBlock {
    fn default() -> Self {
        Self {
            cloud_candidates: svi_core::metrics::DEFAULT_CLOUD_CANDIDATES,
            cloud: CloudKind::Product,
            cloud_seed: 7,
            cadence: 50,
            record_wall_time: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodName {
    Korpelevich,
    Popov,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepName {
    ConstantHorizon,
    Diminishing,
    ParameterFree,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AveragingName {
    Alpha,
    InvAlpha,
    Uniform,
}

impl AveragingName {
    pub fn mode(self) -> AveragingMode {
        match self {
            AveragingName::Alpha => AveragingMode::Alpha,
            AveragingName::InvAlpha => AveragingMode::InvAlpha,
            AveragingName::Uniform => AveragingMode::Uniform,
        }
    }
}

fn default_w4() -> f64 {
    DEFAULT_W4
}

fn default_horizon() -> usize {
    5000
}

fn default_averaging() -> AveragingName {
    AveragingName::InvAlpha
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverBlock {
    pub name: String,
    pub method: MethodName,
    pub step: StepName,
    pub alpha_bar: f64,
    #[serde(default = "default_w4")]
    pub w4: f64,
    /// Defaults to on, except for parameter-free steps which take no cap.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cap: Option<bool>,
    #[serde(default = "default_averaging")]
    pub averaging: AveragingName,
    #[serde(default = "default_horizon")]
    pub horizon: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<RuleBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
}

impl SolverBlock {
    pub fn cap_enabled(&self) -> bool {
        self.cap.unwrap_or(self.step != StepName::ParameterFree)
    }

    pub fn rule_or(&self, default: RuleBlock) -> RuleBlock {
        self.rule.unwrap_or(default)
    }

    /// Solver settings for one seed, given the problem's Lipschitz constant.
    pub fn solver_config(
        &self,
        feas: &FeasibilityBlock,
        lipschitz: f64,
        seed: u64,
    ) -> Result<SolverConfig<f64>> {
        let cap = if self.cap_enabled() {
            step_cap(self.w4, lipschitz).map_err(|e| field(&self.name, "w4", e))?
        } else {
            None
        };
        let steps = match self.step {
            StepName::ConstantHorizon => StepSchedule::constant_horizon(self.alpha_bar, cap),
            StepName::Diminishing => StepSchedule::diminishing(self.alpha_bar, cap),
            StepName::ParameterFree => StepSchedule::parameter_free(self.alpha_bar),
        }
        .map_err(|e| field(&self.name, "alpha_bar", e))?;
        let beta = self.beta.unwrap_or(feas.beta);
        let rule = self.rule_or(feas.rule).sample_rule();
        let feas = FeasibilityConfig::new(beta, rule).map_err(|e| field(&self.name, "beta", e))?;
        Ok(SolverConfig {
            method: match self.method {
                MethodName::Korpelevich => Method::Korpelevich,
                MethodName::Popov => Method::Popov,
            },
            steps,
            averaging: self.averaging.mode(),
            feas,
            horizon: self.horizon,
            master_seed: seed,
        })
    }
}

fn field(block: &str, name: &str, e: impl std::fmt::Display) -> HarnessError {
    HarnessError::Config(format!("solver `{block}`: {name}: {e}"))
}

fn bad(path: &str, msg: impl std::fmt::Display) -> HarnessError {
    HarnessError::Config(format!("{path}: {msg}"))
}

fn check_beta(path: &str, beta: f64) -> Result<()> {
    if beta > 0.0 && beta < 2.0 {
        Ok(())
    } else {
        Err(bad(
            path,
            format!("must lie in the open interval (0, 2), got {beta}"),
        ))
    }
}

fn check_rule(path: &str, rule: RuleBlock) -> Result<()> {
    rule.sample_rule().validate().map_err(|e| bad(path, e))
}

impl ExperimentConfig {
    /// Checks every block before any run starts.
    pub fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() {
            return Err(bad("seeds", "at least one seed is required"));
        }
        let unique: BTreeSet<_> = self.seeds.iter().collect();
        if unique.len() != self.seeds.len() {
            return Err(bad("seeds", "seeds must be distinct"));
        }
        self.problem
            .game_params()
            .validate()
            .map_err(|e| bad("problem", e))?;
        check_beta("feasibility.beta", self.feasibility.beta)?;
        check_rule("feasibility.rule", self.feasibility.rule)?;
        let ev = &self.evaluation;
        if ev.cloud_candidates == 0 {
            return Err(bad("evaluation.cloud_candidates", "must be >= 1"));
        }
        if ev.cadence == 0 {
            return Err(bad("evaluation.cadence", "must be >= 1"));
        }
        if self.solvers.is_empty() {
            return Err(bad("solver", "at least one [[solver]] block is required"));
        }
        let mut names = BTreeSet::new();
        for (i, s) in self.solvers.iter().enumerate() {
            let at = |f: &str| format!("solver[{i}].{f}");
            if s.name.is_empty()
                || !s
                    .name
                    .chars()
                    .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
            {
                return Err(bad(&at("name"), "use letters, digits, '-' and '_' only"));
            }
            if !names.insert(s.name.as_str()) {
                return Err(bad(&at("name"), format!("duplicate name `{}`", s.name)));
            }
            if !(s.alpha_bar > 0.0) || !s.alpha_bar.is_finite() {
                return Err(bad(
                    &at("alpha_bar"),
                    format!("must be > 0, got {}", s.alpha_bar),
                ));
            }
            if s.horizon == 0 {
                return Err(bad(&at("horizon"), "must be >= 1"));
            }
            if s.step == StepName::ParameterFree && s.cap == Some(true) {
                return Err(bad(&at("cap"), "parameter-free steps take no cap"));
            }
            if s.cap_enabled() && !(s.w4 > 0.0 && s.w4 < 1.0) {
                return Err(bad(&at("w4"), format!("must lie in (0, 1), got {}", s.w4)));
            }
            if let Some(b) = s.beta {
                check_beta(&at("beta"), b)?;
            }
            if let Some(r) = s.rule {
                check_rule(&at("rule"), r)?;
            }
        }
        Ok(())
    }

    /// Canonical TOML of the resolved configuration.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// SHA-256 of the canonical TOML, hex encoded.
    pub fn fingerprint(&self) -> String {
        use sha2::{Digest, Sha256};
        let digest = Sha256::digest(self.to_toml().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn with_overrides(mut self, o: &Overrides) -> Result<Self> {
        if let Some(s) = o.seed {
            self.seeds = vec![s];
        }
        if let Some(dir) = &o.out {
            self.output_dir = dir.clone();
        }
        if let Some(c) = o.cadence {
            self.evaluation.cadence = c;
        }
        if o.timing {
            self.evaluation.record_wall_time = true;
        }
        self.validate()?;
        Ok(self)
    }
}

/// Command-line overrides.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub cadence: Option<usize>,
    pub timing: bool,
}

pub fn parse_config_str(text: &str) -> Result<ExperimentConfig> {
    let cfg: ExperimentConfig =
        toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string().trim().to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn parse_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
    parse_config_str(&text).map_err(|e| match e {
        HarnessError::Config(m) => HarnessError::Config(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn sec7_config() -> ExperimentConfig {
    parse_config_str(SEC7_TOML).expect("shipped config is valid")
}
