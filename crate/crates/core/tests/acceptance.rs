//! End-to-end acceptance checks. Each test prints one PASS/FAIL line.

use std::time::{Duration, Instant};

use rand::Rng;
use weakstat::applications::synthetic::{MixtureSpec, RankingSpec};
use weakstat::applications::{
    center_recovery_error, held_out_auc, kmeans, linear_rankers, select_ranker, trimmed_kmeans, KMeansOptions,
};
use weakstat::bounds::{expectation_certificate, uniform_bound, CertificateOptions, Direction};
use weakstat::class::{RawSampler, UniformBox};
use weakstat::complexity::{class_complexity, gaussian_average, rademacher_average, ComplexityEstimate, ComplexityKind};
use weakstat::oracle::{fk_decompose, lstat_condition_check, sup_deviation, sup_deviation_estimate};
use weakstat::seminorms::{
    analytic_seminorms_auc, analytic_seminorms_lstat, analytic_seminorms_ustat, derivative_seminorms,
    empirical_seminorms, KernelAverage,
};
use weakstat::statistics::{
    Kernel, LStatistic, LossFunction, MeanStatistic, RidgeError, RidgeProblem, SmoothedAuc, UStatistic, VStatistic,
    WeightFunction,
};
use weakstat::{Configuration, Domain, FunctionClass, SeededRng, SeminormReport, Statistic};

fn report(id: u32, ok: bool, elapsed: Duration, limit: Option<Duration>, detail: String) {
    let in_time = limit.is_none_or(|l| elapsed < l);
    let verdict = if ok && in_time { "PASS" } else { "FAIL" };
    let limit = limit.map(|l| format!(" (limit {}s)", l.as_secs())).unwrap_or_default();
    println!("{verdict} criterion {id}: {detail} [{:.2}s{limit}]", elapsed.as_secs_f64());
    assert!(ok, "criterion {id} failed: {detail}");
    assert!(in_time, "criterion {id} exceeded its runtime limit");
}

fn symmetric_class(members: usize) -> FunctionClass<Vec<f64>> {
    let weights: Vec<Vec<f64>> = (0..members)
        .map(|j| vec![-1.0 + 2.0 * j as f64 / (members - 1) as f64])
        .collect();
    FunctionClass::linear(&weights, Domain::interval(-1.0, 1.0).unwrap()).unwrap()
}

#[test]
fn criterion_01_mean_recovery() {
    let start = Instant::now();
    let mut worst = Vec::new();
    let mut ok = true;
    for n in [4usize, 16, 64] {
        let f = MeanStatistic::new(n, Domain::unit(1)).unwrap();
        let r = empirical_seminorms(&f, 100_000, &mut SeededRng::from_seed(n as u64)).unwrap();
        let scaled = r.m_lip * n as f64;
        ok &= (0.95..=1.0).contains(&scaled) && r.j_lip <= 1e-8;
        worst.push(format!("n={n}: n*m_lip={scaled:e} j_lip={:.1e}", r.j_lip));
    }
    report(1, ok, start.elapsed(), Some(Duration::from_secs(10)), worst.join(", "));
}

fn sandwich(f: &dyn Statistic, bound: &SeminormReport, seeds: u64) -> usize {
    (0..seeds)
        .filter(|&seed| {
            let r = empirical_seminorms(f, 20_000, &mut SeededRng::from_seed(seed)).unwrap();
            !r.is_dominated_by(bound, 1e-9)
        })
        .count()
}

#[test]
fn criterion_02_sandwich() {
    let start = Instant::now();
    let unit = Domain::unit(1);
    let mut violations = 0;
    let mut cases = 0;
    for n in [4, 8] {
        let f = SmoothedAuc::new(LossFunction::ramp(), n, unit.clone()).unwrap();
        violations += sandwich(&f, &analytic_seminorms_auc(1.0, n).unwrap(), 20);
        cases += 20;
    }
    let u = UStatistic::new(Kernel::product(2), 8, unit.clone()).unwrap();
    violations += sandwich(&u, &analytic_seminorms_ustat(1.0, 1.0, 2, 8, KernelAverage::U).unwrap(), 20);
    let weight = WeightFunction::f_zeta(0.25).unwrap();
    let l = LStatistic::new(weight.clone(), 8, unit.clone()).unwrap();
    violations += sandwich(&l, &analytic_seminorms_lstat(&weight, unit.diameter(), 8), 20);
    cases += 40;
    report(
        2,
        violations == 0,
        start.elapsed(),
        Some(Duration::from_secs(60)),
        format!("{violations} violations in {cases} searches"),
    );
}

fn families(n: usize) -> Vec<Box<dyn Statistic>> {
    let unit = Domain::unit(1);
    let arity = n.min(2);
    let mut out: Vec<Box<dyn Statistic>> = vec![
        Box::new(MeanStatistic::new(n, unit.clone()).unwrap()),
        Box::new(UStatistic::new(Kernel::product(arity), n, unit.clone()).unwrap()),
        Box::new(VStatistic::new(Kernel::product(arity), n, unit.clone()).unwrap()),
        Box::new(LStatistic::new(WeightFunction::f_zeta(0.25).unwrap(), n, unit.clone()).unwrap()),
        Box::new(RidgeError::new(RidgeProblem::new(0.5, 2).unwrap(), n).unwrap()),
    ];
    if n % 2 == 0 {
        out.push(Box::new(SmoothedAuc::new(LossFunction::ramp(), n, unit).unwrap()));
    }
    out
}

#[test]
fn criterion_03_telescoping_identity() {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut checked = 0;
    for n in 1..=10 {
        for f in families(n) {
            let mut rng = SeededRng::from_seed(1000 + n as u64);
            for _ in 0..100 {
                let x = Configuration::uniform(f.domain(), n, &mut rng);
                let xp = Configuration::uniform(f.domain(), n, &mut rng);
                let d = fk_decompose(&*f, &x, &xp).unwrap();
                worst = worst.max(d.residual).max(d.alternative_residual);
                checked += 1;
            }
        }
    }
    report(
        3,
        worst <= 1e-9,
        start.elapsed(),
        Some(Duration::from_secs(120)),
        format!("max residual {worst:.2e} over {checked} pairs"),
    );
}

#[test]
fn criterion_04_deviation_simulation() {
    let start = Instant::now();
    let n = 32;
    let domain = Domain::interval(-1.0, 1.0).unwrap();
    let class = symmetric_class(16);
    let sampler = UniformBox(domain.clone());
    let f = MeanStatistic::new(n, domain).unwrap();
    let g = class_complexity(&class, &sampler, n, ComplexityKind::Gaussian, 512, 2048, &mut SeededRng::from_seed(4))
        .unwrap();
    let bound = expectation_certificate(&f.analytic_seminorms(), &g, n, &CertificateOptions::default())
        .unwrap()
        .symmetrization_term;
    let deviations: Vec<f64> = (0..100)
        .map(|seed| {
            sup_deviation_estimate(&f, &class, &sampler, 1, 256, &mut SeededRng::from_seed(seed))
                .unwrap()
                .mean
        })
        .collect();
    let full = deviations.iter().filter(|d| **d > bound).count();
    let halved = deviations.iter().filter(|d| **d > bound / 2.0).count();
    report(
        4,
        full == 0 && halved > 0,
        start.elapsed(),
        Some(Duration::from_secs(300)),
        format!(
            "bound {bound:.4} (G = {:.4} +- {:.4}): {full} violations; halved bound: {halved} violations",
            g.mean, g.std_error
        ),
    );
}

#[test]
fn criterion_05_high_probability_coverage() {
    let start = Instant::now();
    let n = 32;
    let domain = Domain::interval(-1.0, 1.0).unwrap();
    let class = symmetric_class(16);
    let sampler = UniformBox(domain.clone());
    let f = MeanStatistic::new(n, domain).unwrap();
    let g = class_complexity(&class, &sampler, n, ComplexityKind::Gaussian, 256, 2048, &mut SeededRng::from_seed(5))
        .unwrap();
    let cert = uniform_bound(&f.analytic_seminorms(), &g, n, 0.1).unwrap();
    // every member w x has population mean exactly zero
    let population = vec![0.0; class.size()];
    let trials = 500;
    let violations = (0..trials)
        .filter(|&t| {
            let raw = sampler.sample_n(n, &mut SeededRng::from_seed(50_000 + t));
            sup_deviation(&f, &class, &raw, &population, Direction::PopMinusEmp).unwrap() > cert.total
        })
        .count();
    let allowed = 50.0 + 3.0 * (500.0f64 * 0.09).sqrt();
    report(
        5,
        (violations as f64) <= allowed,
        start.elapsed(),
        Some(Duration::from_secs(300)),
        format!("{violations} violations in {trials} trials (allowed {allowed:.1}), total {:.4}", cert.total),
    );
}

#[test]
fn criterion_06_closed_form_averages() {
    let start = Instant::now();
    let set = vec![vec![1.0, 0.0], vec![-1.0, 0.0]];
    let g = gaussian_average(&set, 100_000, &mut SeededRng::from_seed(6)).unwrap();
    let r = rademacher_average(&set, 10_000, &mut SeededRng::from_seed(6)).unwrap();
    let target = (2.0 / std::f64::consts::PI).sqrt();
    let gap = (g.mean - target).abs();
    let ok = gap <= 3.0 * g.std_error && r.mean == 1.0;
    report(
        6,
        ok,
        start.elapsed(),
        None,
        format!("G = {:.5} +- {:.5} (target {target:.5}), R = {}", g.mean, g.std_error, r.mean),
    );
}

#[test]
fn criterion_07_ridge_derivative_decay() {
    let start = Instant::now();
    let problem = RidgeProblem::new(0.5, 3).unwrap();
    let estimate = |n: usize| {
        let f = RidgeError::new(problem, n).unwrap();
        let r = derivative_seminorms(&f, f.domain().diameter(), 16, 1e-4, &mut SeededRng::from_seed(7)).unwrap();
        r.derivative.unwrap()
    };
    let (a, b) = (estimate(50), estimate(100));
    let first = a.max_gradient_norm / b.max_gradient_norm;
    let second = a.max_mixed_norm / b.max_mixed_norm;
    let ok = (1.4..=2.6).contains(&first) && (2.4..=6.0).contains(&second);
    report(
        7,
        ok,
        start.elapsed(),
        Some(Duration::from_secs(120)),
        format!("first-order ratio {first:.3}, second-order ratio {second:.3}"),
    );
}

#[test]
fn criterion_08_lstat_conditions() {
    let start = Instant::now();
    let weight = WeightFunction::f_zeta(0.25).unwrap();
    let n = 16;
    let unit = Domain::unit(1);
    let mut rng = SeededRng::from_seed(8);
    let mut violations = 0;
    let mut worst = f64::INFINITY;
    for _ in 0..10_000 {
        let x = Configuration::uniform(&unit, n, &mut rng);
        let k = rng.random_range(0..n);
        let l = (k + rng.random_range(1..n)) % n;
        let [y, yp, z, zp]: [f64; 4] = std::array::from_fn(|_| rng.random::<f64>());
        let (a, b) = lstat_condition_check(&weight, &x, k, l, y, yp, z, zp).unwrap();
        violations += usize::from(!a.passed) + usize::from(!b.passed);
        worst = worst.min(a.slack).min(b.slack);
    }
    report(
        8,
        violations == 0,
        start.elapsed(),
        None,
        format!("{violations} violations in 10000 probes, min slack {worst:.2e}"),
    );
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 0 {
        (v[m - 1] + v[m]) / 2.0
    } else {
        v[m]
    }
}

#[test]
fn criterion_09_robust_clustering() {
    let start = Instant::now();
    let spec = MixtureSpec::benchmark();
    let opts = KMeansOptions::default();
    let (mut trimmed, mut standard) = (Vec::new(), Vec::new());
    for seed in 0..50 {
        let mut rng = SeededRng::from_seed(9_000 + seed);
        let data = spec.sample(300, &mut rng);
        let t = trimmed_kmeans(&data, 3, 0.125, &opts, &mut rng).unwrap();
        let s = kmeans(&data, 3, &opts, &mut rng).unwrap();
        trimmed.push(center_recovery_error(&t.centers, &spec.centers).unwrap());
        standard.push(center_recovery_error(&s.centers, &spec.centers).unwrap());
    }
    let (mt, ms) = (median(trimmed), median(standard));
    report(
        9,
        mt < ms,
        start.elapsed(),
        Some(Duration::from_secs(180)),
        format!("median recovery error trimmed {mt:.4} vs standard {ms:.4}"),
    );
}

#[test]
fn criterion_10_ranking_certificate() {
    let start = Instant::now();
    let spec = RankingSpec {
        dim: 3,
        shift: 0.6,
        sd: 0.6,
    };
    let sampler = spec.sampler();
    let n = 200;
    let mut setup = SeededRng::from_seed(10);
    let weights: Vec<Vec<f64>> = (0..8)
        .map(|_| (0..3).map(|_| setup.random_range(-1.0..=1.0)).collect())
        .collect();
    let class = linear_rankers(&weights).unwrap();
    let g: ComplexityEstimate =
        class_complexity(&class, &sampler, n, ComplexityKind::Gaussian, 64, 2048, &mut setup).unwrap();
    let loss = LossFunction::ramp();
    let mut lowest_margin = f64::INFINITY;
    let covered = (0..200)
        .filter(|&t| {
            let mut rng = SeededRng::from_seed(10_000 + t);
            let data = sampler.sample_n(n, &mut rng);
            let sel = select_ranker(&class, &data, &loss, &g, 0.1).unwrap();
            let held = held_out_auc(&class, sel.chosen_index, &sampler, 2000, &mut rng).unwrap();
            lowest_margin = lowest_margin.min(held - sel.certificate_lower_bound);
            held >= sel.certificate_lower_bound
        })
        .count();
    report(
        10,
        covered >= 170,
        start.elapsed(),
        Some(Duration::from_secs(180)),
        format!("covered in {covered}/200 trials, smallest margin {lowest_margin:.4}"),
    );
}
