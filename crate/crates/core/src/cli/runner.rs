use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::config::{
    CandidateSpec, ClassSpec, ExperimentConfig, ExperimentKind, KernelSpec, MethodName, SamplerSpec, StatisticSpec,
};
use crate::applications::synthetic::uniform_in_ball;
use crate::applications::{
    center_recovery_error, clustering_certificate, held_out_auc, kmeans, linear_rankers, select_ranker,
    trimmed_kmeans, ClusteringResult, KMeansOptions, RankingSelection,
};
use crate::bounds::{expectation_certificate, uniform_bound_with, BoundCertificate, CertificateOptions, Direction};
use crate::class::{ClippedGaussian, FunctionClass, RawSampler, UniformBox};
use crate::complexity::{class_complexity, ComplexityEstimate, ComplexityKind};
use crate::domain::{Configuration, Domain, Negated, Statistic};
use crate::error::{Error, Result};
use crate::oracle::{
    fk_decompose_batch, fk_difference_check, jlip_lemma_check, lstat_condition_check, sup_deviation_estimate,
    CheckRecord, DeviationEstimate,
};
use crate::rng::SeededRng;
use crate::seminorms::{
    derivative_seminorms_with, empirical_seminorms, DerivativeOptions, SeminormMethod, SeminormReport,
};
use crate::statistics::{
    kmeans_loss, LStatistic, MeanStatistic, RidgeError, RidgeProblem, SmoothedAuc, UStatistic, VStatistic,
    WeightFunction,
};

/// Stream indices under the config seed, one per pipeline stage.
mod stage {
    pub const EMPIRICAL: u64 = 1;
    pub const DERIVATIVE: u64 = 2;
    pub const COMPLEXITY: u64 = 3;
    pub const SIMULATE: u64 = 4;
    pub const VERIFY_PAIRS: u64 = 5;
    pub const VERIFY_PROBES: u64 = 6;
    pub const DATA: u64 = 7;
    pub const FIT: u64 = 8;
    pub const BASELINE: u64 = 9;
    pub const CANDIDATES: u64 = 10;
    pub const HELD_OUT: u64 = 11;
}

/// `|lhs - sum F_k|` for one verified pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualRow {
    pub pair: usize,
    pub lhs: f64,
    pub residual: f64,
    pub alternative_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusteringSummary {
    pub trimmed: ClusteringResult,
    pub standard: ClusteringResult,
    /// `None` when `k` differs from the number of mixture centers.
    pub trimmed_recovery_error: Option<f64>,
    pub standard_recovery_error: Option<f64>,
    /// Trimmed objective plus the certificate total.
    pub objective_upper_bound: f64,
    /// Members of the loss class behind the complexity estimate.
    pub class_size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingSummary {
    pub selection: RankingSelection,
    pub held_out_auc: f64,
    pub held_out_n: usize,
}

/// Everything a run produces, with the resolved config that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultDocument {
    pub kind: ExperimentKind,
    pub version: String,
    pub config: ExperimentConfig,
    pub statistic: Option<String>,
    pub n: usize,
    pub seminorms: Vec<SeminormReport>,
    pub complexity: Option<ComplexityEstimate>,
    pub certificate: Option<BoundCertificate>,
    pub deviation: Option<DeviationEstimate>,
    pub residuals: Vec<ResidualRow>,
    pub clustering: Option<ClusteringSummary>,
    pub ranking: Option<RankingSummary>,
    pub checks: Vec<CheckRecord>,
    /// Whether every check passed.
    pub passed: bool,
}

impl ResultDocument {
    fn new(config: &ExperimentConfig, statistic: Option<String>) -> Self {
        Self {
            kind: config.kind,
            version: env!("CARGO_PKG_VERSION").to_string(),
            config: config.clone(),
            statistic,
            n: config.n,
            seminorms: Vec::new(),
            complexity: None,
            certificate: None,
            deviation: None,
            residuals: Vec::new(),
            clustering: None,
            ranking: None,
            checks: Vec::new(),
            passed: true,
        }
    }

    fn finish(mut self) -> Self {
        self.passed = self.checks.iter().all(|c| c.passed);
        self
    }
}

fn config_error(pointer: &str, message: impl Into<String>) -> Error {
    Error::Config {
        pointer: pointer.into(),
        message: message.into(),
    }
}

fn required<'a, T>(value: &'a Option<T>, field: &str, kind: ExperimentKind) -> Result<&'a T> {
    value
        .as_ref()
        .ok_or_else(|| config_error(&format!("/{field}"), format!("`{field}` is required for {} runs", kind.as_str())))
}

struct BuiltStatistic {
    stat: Box<dyn Statistic>,
    analytic: Option<SeminormReport>,
    weight: Option<WeightFunction>,
}

fn finite(report: SeminormReport) -> Option<SeminormReport> {
    [report.m_lip, report.j_lip, report.m_plain, report.j_plain]
        .iter()
        .all(|v| v.is_finite())
        .then_some(report)
}

fn kernel_domain(kernel: &KernelSpec, domain: &Domain) -> Result<()> {
    let inside = domain.lower().iter().chain(domain.upper()).all(|v| (0.0..=1.0).contains(v));
    if !inside || domain.dim() != 1 {
        let name = match kernel {
            KernelSpec::Product { .. } => "product",
            KernelSpec::Identity => "identity",
        };
        return Err(config_error(
            "/statistic/domain",
            format!("the {name} kernel needs a domain inside [0, 1]"),
        ));
    }
    Ok(())
}

fn build_statistic(spec: &StatisticSpec, n: usize) -> Result<BuiltStatistic> {
    let plain = |stat: Box<dyn Statistic>, analytic: SeminormReport| BuiltStatistic {
        stat,
        analytic: finite(analytic),
        weight: None,
    };
    Ok(match spec {
        StatisticSpec::Mean { domain } => {
            let f = MeanStatistic::new(n, domain.build()?)?;
            let a = f.analytic_seminorms();
            plain(Box::new(f), a)
        }
        StatisticSpec::UStatistic { kernel, domain } => {
            let domain = domain.build()?;
            kernel_domain(kernel, &domain)?;
            let f = UStatistic::new(kernel.build(), n, domain)?;
            let a = f.analytic_seminorms();
            plain(Box::new(f), a)
        }
        StatisticSpec::VStatistic { kernel, domain } => {
            let domain = domain.build()?;
            kernel_domain(kernel, &domain)?;
            let f = VStatistic::new(kernel.build(), n, domain)?;
            let a = f.analytic_seminorms();
            plain(Box::new(f), a)
        }
        StatisticSpec::Auc { loss, domain } => {
            let f = SmoothedAuc::new(loss.build()?, n, domain.build()?)?;
            let a = f.analytic_seminorms();
            plain(Box::new(f), a)
        }
        StatisticSpec::LStatistic { weight, domain } => {
            let weight = weight.build()?;
            let f = LStatistic::new(weight.clone(), n, domain.build()?)?;
            let a = f.analytic_seminorms();
            BuiltStatistic {
                stat: Box::new(f),
                analytic: finite(a),
                weight: Some(weight),
            }
        }
        StatisticSpec::Ridge { lambda, d } => BuiltStatistic {
            stat: Box::new(RidgeError::new(RidgeProblem::new(*lambda, *d)?, n)?),
            analytic: None,
            weight: None,
        },
    })
}

fn build_class(spec: &ClassSpec) -> Result<FunctionClass<Vec<f64>>> {
    match spec {
        ClassSpec::Linear { weights, domain } => FunctionClass::linear(weights, domain.build()?),
        ClassSpec::ScalarGrid {
            count,
            min,
            max,
            domain,
        } => {
            let weights: Vec<Vec<f64>> = (0..*count)
                .map(|j| {
                    let t = if *count == 1 { 0.0 } else { j as f64 / (*count - 1) as f64 };
                    vec![min + (max - min) * t]
                })
                .collect();
            FunctionClass::linear(&weights, domain.build()?)
        }
        ClassSpec::Identity { domain } => Ok(FunctionClass::identity(domain.build()?)),
    }
}

fn build_sampler(spec: &SamplerSpec) -> Result<Box<dyn RawSampler<Vec<f64>>>> {
    Ok(match spec {
        SamplerSpec::UniformBox { domain } => Box::new(UniformBox(domain.build()?)),
        SamplerSpec::ClippedGaussian { mean, sd, clip } => Box::new(ClippedGaussian {
            mean: mean.clone(),
            sd: *sd,
            clip: *clip,
        }),
    })
}

fn compute_seminorms(
    built: &BuiltStatistic,
    method: MethodName,
    config: &ExperimentConfig,
    root: &SeededRng,
) -> Result<SeminormReport> {
    let s = &config.seminorm;
    match method {
        MethodName::Analytic => built.analytic.clone().ok_or_else(|| {
            Error::Inapplicable(format!("no finite analytic seminorm bounds for `{}`", built.stat.label()))
        }),
        MethodName::Empirical => empirical_seminorms(&*built.stat, s.budget, &mut root.child(stage::EMPIRICAL)),
        MethodName::Derivative => {
            let opts = DerivativeOptions {
                first_step: s.first_step,
                second_step: s.second_step,
                max_pairs: s.max_pairs,
            };
            let diameter = built.stat.domain().diameter();
            derivative_seminorms_with(&*built.stat, diameter, s.probes, &opts, &mut root.child(stage::DERIVATIVE))
        }
    }
}

fn sandwich_check(label: &str, lower: &SeminormReport, upper: &SeminormReport) -> CheckRecord {
    let pairs = [
        (lower.m_lip, upper.m_lip),
        (lower.j_lip, upper.j_lip),
        (lower.m_plain, upper.m_plain),
        (lower.j_plain, upper.j_plain),
    ];
    let slack = pairs.iter().map(|(l, u)| u - l).fold(f64::INFINITY, f64::min);
    let inputs = json!({
        "statistic": label,
        "lower": [lower.m_lip, lower.j_lip, lower.m_plain, lower.j_plain],
        "upper": [upper.m_lip, upper.j_lip, upper.m_plain, upper.j_plain],
        "upper_method": upper.method.as_str(),
    });
    CheckRecord::new(
        format!("sandwich_{}", upper.method.as_str()),
        &inputs,
        slack,
        lower.is_dominated_by(upper, 1e-9),
    )
}

/// Executes the pipeline named by `config.kind`.
pub fn run(config: &ExperimentConfig) -> Result<ResultDocument> {
    let root = SeededRng::from_seed(config.seed);
    match config.kind {
        ExperimentKind::Seminorm => run_seminorm(config, &root),
        ExperimentKind::Complexity => run_complexity(config, &root),
        ExperimentKind::Bound => run_bound(config, &root),
        ExperimentKind::Verify => run_verify(config, &root),
        ExperimentKind::Cluster => run_cluster(config, &root),
        ExperimentKind::Rank => run_rank(config, &root),
    }
}

fn run_seminorm(config: &ExperimentConfig, root: &SeededRng) -> Result<ResultDocument> {
    let built = build_statistic(required(&config.statistic, "statistic", config.kind)?, config.n)?;
    let mut doc = ResultDocument::new(config, Some(built.stat.label().to_string()));
    for method in &config.seminorm.methods {
        doc.seminorms.push(compute_seminorms(&built, *method, config, root)?);
    }
    for lower in doc.seminorms.iter().filter(|r| r.method == SeminormMethod::EmpiricalSearch) {
        for upper in doc.seminorms.iter().filter(|r| r.method.is_upper_bound()) {
            doc.checks.push(sandwich_check(built.stat.label(), lower, upper));
        }
    }
    Ok(doc.finish())
}

fn estimate_class_complexity(
    config: &ExperimentConfig,
    class: &FunctionClass<Vec<f64>>,
    sampler: &dyn RawSampler<Vec<f64>>,
    root: &SeededRng,
) -> Result<ComplexityEstimate> {
    let c = &config.complexity;
    class_complexity(class, sampler, config.n, c.kind, c.outer, c.inner, &mut root.child(stage::COMPLEXITY))
}

fn run_complexity(config: &ExperimentConfig, root: &SeededRng) -> Result<ResultDocument> {
    let class = build_class(required(&config.class, "class", config.kind)?)?;
    let sampler = build_sampler(required(&config.sampler, "sampler", config.kind)?)?;
    let mut doc = ResultDocument::new(config, None);
    doc.complexity = Some(estimate_class_complexity(config, &class, &*sampler, root)?);
    Ok(doc.finish())
}

fn certificate(
    config: &ExperimentConfig,
    report: &SeminormReport,
    g: &ComplexityEstimate,
    direction: Direction,
) -> Result<BoundCertificate> {
    let opts = CertificateOptions {
        se_inflation: config.complexity.se_inflation,
        direction,
    };
    match config.delta {
        Some(delta) => uniform_bound_with(report, g, config.n, delta, &opts),
        None => expectation_certificate(report, g, config.n, &opts),
    }
}

fn run_bound(config: &ExperimentConfig, root: &SeededRng) -> Result<ResultDocument> {
    let built = build_statistic(required(&config.statistic, "statistic", config.kind)?, config.n)?;
    let class = build_class(required(&config.class, "class", config.kind)?)?;
    let sampler = build_sampler(required(&config.sampler, "sampler", config.kind)?)?;
    if config.complexity.kind != ComplexityKind::Gaussian {
        return Err(config_error("/complexity/kind", "certificates need a Gaussian average"));
    }
    let method = config
        .seminorm
        .methods
        .iter()
        .copied()
        .find(|m| *m != MethodName::Empirical)
        .ok_or(Error::UncertifiedSeminorms(SeminormMethod::EmpiricalSearch))?;
    let report = compute_seminorms(&built, method, config, root)?;
    let g = estimate_class_complexity(config, &class, &*sampler, root)?;
    let direction = config.bound.direction;
    let cert = certificate(config, &report, &g, direction)?;
    let mut doc = ResultDocument::new(config, Some(built.stat.label().to_string()));
    if let Some(sim) = config.bound.simulate {
        let rng = &mut root.child(stage::SIMULATE);
        let dev = match direction {
            Direction::PopMinusEmp => sup_deviation_estimate(&*built.stat, &class, &*sampler, sim.outer, sim.population, rng)?,
            Direction::EmpMinusPop => {
                let neg = Negated(&*built.stat);
                let mut d = sup_deviation_estimate(&neg, &class, &*sampler, sim.outer, sim.population, rng)?;
                d.direction = Direction::EmpMinusPop;
                d
            }
        };
        let allowance = cert.symmetrization_term + config.complexity.se_inflation * dev.std_error.unwrap_or(0.0);
        let slack = allowance - dev.mean;
        let inputs = json!({
            "statistic": built.stat.label(), "seed": config.seed, "n": config.n,
            "deviation": dev.mean, "symmetrization_term": cert.symmetrization_term,
        });
        doc.checks.push(CheckRecord::new("deviation_within_bound", &inputs, slack, slack >= 0.0));
        doc.deviation = Some(dev);
    }
    doc.seminorms.push(report);
    doc.complexity = Some(g);
    doc.certificate = Some(cert);
    Ok(doc.finish())
}

fn random_index(rng: &mut SeededRng, n: usize) -> usize {
    rng.random_range(0..n)
}

fn run_verify(config: &ExperimentConfig, root: &SeededRng) -> Result<ResultDocument> {
    let built = build_statistic(required(&config.statistic, "statistic", config.kind)?, config.n)?;
    let f = &*built.stat;
    let n = config.n;
    let domain = f.domain().clone();
    let mut doc = ResultDocument::new(config, Some(f.label().to_string()));

    let pair_root = root.child(stage::VERIFY_PAIRS);
    let pairs: Vec<(Configuration, Configuration)> = (0..config.verify.pairs)
        .map(|p| {
            let mut rng = pair_root.child(p as u64);
            let x = Configuration::uniform(&domain, n, &mut rng);
            let xp = Configuration::uniform(&domain, n, &mut rng);
            (x, xp)
        })
        .collect();
    let decompositions = fk_decompose_batch(f, &pairs)?;
    for (p, (d, (x, xp))) in decompositions.iter().zip(&pairs).enumerate() {
        doc.residuals.push(ResidualRow {
            pair: p,
            lhs: d.lhs,
            residual: d.residual,
            alternative_residual: d.alternative_residual,
        });
        doc.checks.push(d.record(&json!({"statistic": f.label(), "x": x, "x_prime": xp})));
    }

    let probe_root = root.child(stage::VERIFY_PROBES);
    if let Some(report) = &built.analytic {
        for p in 0..config.verify.probes {
            let mut rng = probe_root.child(p as u64);
            let x = Configuration::uniform(&domain, n, &mut rng);
            let xp = Configuration::uniform(&domain, n, &mut rng);
            let k = random_index(&mut rng, n);
            let a = domain.sample_point(&mut rng);
            let b = domain.sample_point(&mut rng);
            doc.checks.push(jlip_lemma_check(f, &x, &xp, k, &a, &b, report.j_lip)?);
            let y = Configuration::uniform(&domain, n, &mut rng);
            let yp = Configuration::uniform(&domain, n, &mut rng);
            doc.checks
                .push(fk_difference_check(f, &x, &xp, &y, &yp, k, report.m_lip, report.j_lip)?);
        }
    }
    if let (Some(weight), true) = (&built.weight, n >= 2) {
        let unit = Domain::unit(1);
        for p in 0..config.verify.probes {
            let mut rng = probe_root.child((config.verify.probes + p) as u64);
            let x = Configuration::uniform(&unit, n, &mut rng);
            let k = random_index(&mut rng, n);
            let l = (k + 1 + random_index(&mut rng, n - 1)) % n;
            let [y, yp, z, zp]: [f64; 4] = std::array::from_fn(|_| rng.random::<f64>());
            let (first, second) = lstat_condition_check(weight, &x, k, l, y, yp, z, zp)?;
            doc.checks.push(first);
            doc.checks.push(second);
        }
    }
    Ok(doc.finish())
}

fn run_cluster(config: &ExperimentConfig, root: &SeededRng) -> Result<ResultDocument> {
    let s = &config.cluster;
    let mixture = &s.mixture;
    let delta = config.delta.unwrap_or(0.1);
    let data = mixture.sample(config.n, &mut root.child(stage::DATA));
    let opts = KMeansOptions {
        max_iters: s.max_iters,
        restarts: s.restarts,
        tolerance: s.tolerance,
    };
    let trimmed = trimmed_kmeans(&data, s.k, s.zeta, &opts, &mut root.child(stage::FIT))?;
    let standard = kmeans(&data, s.k, &opts, &mut root.child(stage::BASELINE))?;
    let recovery = |r: &ClusteringResult| {
        (s.k == mixture.centers.len())
            .then(|| center_recovery_error(&r.centers, &mixture.centers))
            .transpose()
    };

    let radius = mixture.ball_radius;
    let mut rng = root.child(stage::CANDIDATES);
    let mut sets = vec![trimmed.centers.clone()];
    for _ in 0..s.candidate_sets {
        sets.push((0..s.k).map(|_| uniform_in_ball(mixture.dim(), radius, &mut rng)).collect::<Vec<_>>());
    }
    let mut losses = FunctionClass::new(Domain::interval(0.0, (2.0 * radius).powi(2))?);
    for (j, centers) in sets.into_iter().enumerate() {
        losses.push(format!("centers[{j}]"), move |x: &Vec<f64>| {
            vec![kmeans_loss(&centers, x).expect("matching dimensions")]
        });
    }
    let g = estimate_class_complexity(config, &losses, mixture, root)?;
    let cert = clustering_certificate(&trimmed, radius, s.zeta, config.n, &g, delta)?;

    let mut doc = ResultDocument::new(config, Some("trimmed_kmeans".into()));
    doc.clustering = Some(ClusteringSummary {
        trimmed_recovery_error: recovery(&trimmed)?,
        standard_recovery_error: recovery(&standard)?,
        objective_upper_bound: trimmed.objective + cert.total,
        class_size: losses.size(),
        trimmed,
        standard,
    });
    doc.seminorms.push(cert.seminorms.clone());
    doc.complexity = Some(g);
    doc.certificate = Some(cert);
    Ok(doc.finish())
}

fn run_rank(config: &ExperimentConfig, root: &SeededRng) -> Result<ResultDocument> {
    let s = &config.rank;
    let delta = config.delta.unwrap_or(0.1);
    let weights = match &s.candidates {
        CandidateSpec::Weights { weights } => weights.clone(),
        CandidateSpec::Random { random } => {
            let mut rng = root.child(stage::CANDIDATES);
            (0..*random)
                .map(|_| (0..s.data.dim).map(|_| rng.random_range(-1.0..=1.0)).collect())
                .collect()
        }
    };
    if weights.iter().any(|w| w.len() != s.data.dim) {
        return Err(config_error("/rank/candidates", "candidate weights must match the data dimension"));
    }
    let class = linear_rankers(&weights)?;
    let loss = s.loss.build()?;
    let sampler = s.data.sampler();
    let g = estimate_class_complexity(config, &class, &sampler, root)?;
    let data = sampler.sample_n(config.n, &mut root.child(stage::DATA));
    let selection = select_ranker(&class, &data, &loss, &g, delta)?;
    let held = held_out_auc(&class, selection.chosen_index, &sampler, s.held_out_n, &mut root.child(stage::HELD_OUT))?;

    let mut doc = ResultDocument::new(config, Some(format!("smoothed_auc[{}]", loss.label())));
    let slack = held - selection.certificate_lower_bound;
    let inputs = json!({"seed": config.seed, "n": config.n, "chosen": selection.chosen_index, "held_out_auc": held});
    doc.checks.push(CheckRecord::new("held_out_covered", &inputs, slack, slack >= 0.0));
    doc.complexity = Some(g);
    doc.ranking = Some(RankingSummary {
        selection,
        held_out_auc: held,
        held_out_n: s.held_out_n,
    });
    Ok(doc.finish())
}
