use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::applications::synthetic::{MixtureSpec, RankingSpec};
use crate::bounds::Direction;
use crate::complexity::{ComplexityKind, DEFAULT_INNER_REPS, DEFAULT_OUTER_REPS};
use crate::domain::Domain;
use crate::error::Result;
use crate::statistics::{Kernel, LossFunction, WeightFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Seminorm,
    Complexity,
    Bound,
    Verify,
    Cluster,
    Rank,
}

impl ExperimentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentKind::Seminorm => "seminorm",
            ExperimentKind::Complexity => "complexity",
            ExperimentKind::Bound => "bound",
            ExperimentKind::Verify => "verify",
            ExperimentKind::Cluster => "cluster",
            ExperimentKind::Rank => "rank",
        }
    }
}

/// One experiment, as read from a JSON config file.
///
/// Sections that the chosen `kind` does not use are accepted and ignored.
/// After [`resolved`](Self::resolved) every default is explicit, and that
/// form is what result documents embed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    #[serde(default)]
    pub seed: u64,
    /// Sample size.
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub statistic: Option<StatisticSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<ClassSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampler: Option<SamplerSpec>,
    #[serde(default)]
    pub seminorm: SeminormSettings,
    #[serde(default)]
    pub complexity: ComplexitySettings,
    #[serde(default)]
    pub verify: VerifySettings,
    #[serde(default)]
    pub bound: BoundSettings,
    #[serde(default)]
    pub cluster: ClusterSettings,
    #[serde(default)]
    pub rank: RankSettings,
    #[serde(default)]
    pub output: OutputSettings,
}

impl ExperimentConfig {
    /// Fills `delta = 0.1` for the applications, which always certify.
    pub fn resolved(mut self) -> Self {
        if matches!(self.kind, ExperimentKind::Cluster | ExperimentKind::Rank) && self.delta.is_none() {
            self.delta = Some(0.1);
        }
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl DomainSpec {
    pub fn unit() -> Self {
        Self {
            lower: vec![0.0],
            upper: vec![1.0],
        }
    }

    pub fn build(&self) -> Result<Domain> {
        Domain::new(self.lower.clone(), self.upper.clone())
    }
}

impl Default for DomainSpec {
    fn default() -> Self {
        Self::unit()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelSpec {
    Product { arity: usize },
    Identity,
}

impl KernelSpec {
    pub fn build(&self) -> Kernel {
        match self {
            KernelSpec::Product { arity } => Kernel::product(*arity),
            KernelSpec::Identity => Kernel::identity(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum LossSpec {
    Ramp {
        #[serde(default = "one")]
        margin: f64,
    },
    Indicator,
    Sigmoid {
        scale: f64,
    },
}

fn one() -> f64 {
    1.0
}

impl Default for LossSpec {
    fn default() -> Self {
        LossSpec::Ramp { margin: 1.0 }
    }
}

impl LossSpec {
    pub fn build(&self) -> Result<LossFunction> {
        match self {
            LossSpec::Ramp { margin } => LossFunction::ramp_with_margin(*margin),
            LossSpec::Indicator => Ok(LossFunction::indicator()),
            LossSpec::Sigmoid { scale } => LossFunction::sigmoid(*scale),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightSpec {
    FZeta { zeta: f64 },
    Constant { value: f64 },
}

impl WeightSpec {
    pub fn build(&self) -> Result<WeightFunction> {
        match self {
            WeightSpec::FZeta { zeta } => WeightFunction::f_zeta(*zeta),
            WeightSpec::Constant { value } => Ok(WeightFunction::constant(*value)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum StatisticSpec {
    Mean {
        #[serde(default)]
        domain: DomainSpec,
    },
    UStatistic {
        kernel: KernelSpec,
        #[serde(default)]
        domain: DomainSpec,
    },
    VStatistic {
        kernel: KernelSpec,
        #[serde(default)]
        domain: DomainSpec,
    },
    Auc {
        #[serde(default)]
        loss: LossSpec,
        #[serde(default)]
        domain: DomainSpec,
    },
    LStatistic {
        weight: WeightSpec,
        #[serde(default)]
        domain: DomainSpec,
    },
    Ridge {
        lambda: f64,
        d: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ClassSpec {
    /// Scalar maps `x -> clamp(<w, x>)` into `domain`.
    Linear { weights: Vec<Vec<f64>>, domain: DomainSpec },
    /// `count` scalar maps `x -> clamp(w x)` with `w` evenly spaced in `[min, max]`.
    ScalarGrid {
        count: usize,
        min: f64,
        max: f64,
        domain: DomainSpec,
    },
    Identity { domain: DomainSpec },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum SamplerSpec {
    UniformBox { domain: DomainSpec },
    ClippedGaussian { mean: Vec<f64>, sd: f64, clip: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodName {
    Analytic,
    Empirical,
    Derivative,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SeminormSettings {
    pub methods: Vec<MethodName>,
    /// Statistic evaluations per empirical search.
    pub budget: u64,
    /// Probe points for derivative estimates.
    pub probes: usize,
    pub first_step: f64,
    pub second_step: f64,
    pub max_pairs: usize,
}

impl Default for SeminormSettings {
    fn default() -> Self {
        Self {
            methods: vec![MethodName::Analytic, MethodName::Empirical],
            budget: 100_000,
            probes: 64,
            first_step: 1e-4,
            second_step: 1e-3,
            max_pairs: 32,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ComplexitySettings {
    pub kind: ComplexityKind,
    pub outer: usize,
    pub inner: usize,
    pub se_inflation: f64,
}

impl Default for ComplexitySettings {
    fn default() -> Self {
        Self {
            kind: ComplexityKind::Gaussian,
            outer: DEFAULT_OUTER_REPS,
            inner: DEFAULT_INNER_REPS,
            se_inflation: 3.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifySettings {
    /// Random pairs `(x, x')` for the telescoping identity.
    pub pairs: usize,
    /// Random probes for each inequality check.
    pub probes: usize,
}

impl Default for VerifySettings {
    fn default() -> Self {
        Self { pairs: 100, probes: 100 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateSettings {
    pub outer: usize,
    pub population: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoundSettings {
    pub direction: Direction,
    /// Monte-Carlo check of the expected deviation against the bound.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub simulate: Option<SimulateSettings>,
}

impl Default for BoundSettings {
    fn default() -> Self {
        Self {
            direction: Direction::PopMinusEmp,
            simulate: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClusterSettings {
    pub k: usize,
    pub zeta: f64,
    pub mixture: MixtureSpec,
    pub max_iters: usize,
    pub restarts: usize,
    pub tolerance: f64,
    /// Random center sets forming the finite loss class whose Gaussian
    /// average enters the certificate (the fitted centers are added).
    pub candidate_sets: usize,
}

impl Default for ClusterSettings {
    fn default() -> Self {
        Self {
            k: 3,
            zeta: 0.125,
            mixture: MixtureSpec::benchmark(),
            max_iters: 100,
            restarts: 10,
            tolerance: 1e-10,
            candidate_sets: 32,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum CandidateSpec {
    Weights { weights: Vec<Vec<f64>> },
    /// Weight vectors drawn uniformly from `[-1, 1]^dim`.
    Random { random: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RankSettings {
    pub data: RankingSpec,
    pub candidates: CandidateSpec,
    pub loss: LossSpec,
    pub held_out_n: usize,
}

impl Default for RankSettings {
    fn default() -> Self {
        Self {
            data: RankingSpec {
                dim: 3,
                shift: 0.6,
                sd: 0.6,
            },
            candidates: CandidateSpec::Random { random: 8 },
            loss: LossSpec::default(),
            held_out_n: 2000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Json,
    /// The JSON document plus a CSV table next to it.
    JsonAndCsv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSettings {
    /// Standard output when absent.
    pub path: Option<PathBuf>,
    pub format: OutputFormat,
}

impl Default for OutputSettings {
    fn default() -> Self {
        Self {
            path: None,
            format: OutputFormat::Json,
        }
    }
}
