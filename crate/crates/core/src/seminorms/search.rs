use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::{certified_magnitude, distance, raw_double, raw_partial, SeminormMethod, SeminormReport, Witness};
use crate::domain::{Configuration, Domain, Statistic};
use crate::error::{Error, Result};
use crate::rng::SeededRng;

/// Tuning of the randomized seminorm search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    /// Share of each seminorm's budget spent on uniform exploration; the
    /// rest refines the incumbent.
    pub exploration_fraction: f64,
    /// Initial Gaussian refinement radius, relative to each coordinate's width.
    pub initial_radius: f64,
    /// Final refinement radius, relative to each coordinate's width.
    pub final_radius: f64,
    /// Pairs with `|y - y'|` below this are rejected.
    pub min_separation: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            exploration_fraction: 0.8,
            initial_radius: 0.25,
            final_radius: 1e-3,
            min_separation: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Target {
    MLip,
    JLip,
    M,
    J,
}

impl Target {
    const ALL: [Target; 4] = [Target::MLip, Target::JLip, Target::M, Target::J];

    fn interaction(self) -> bool {
        matches!(self, Target::JLip | Target::J)
    }

    fn cost(self) -> u64 {
        if self.interaction() {
            4
        } else {
            2
        }
    }
}

#[derive(Debug, Clone)]
struct Probe {
    k: usize,
    l: usize,
    x: Configuration,
    y: Vec<f64>,
    y_prime: Vec<f64>,
    z: Vec<f64>,
    z_prime: Vec<f64>,
}

impl Probe {
    fn witness(&self, interaction: bool, value: f64) -> Witness {
        Witness {
            k: self.k,
            l: interaction.then_some(self.l),
            x: self.x.clone(),
            y: self.y.clone(),
            y_prime: self.y_prime.clone(),
            z: interaction.then(|| self.z.clone()),
            z_prime: interaction.then(|| self.z_prime.clone()),
            value,
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Score {
    ratio: f64,
    plain: f64,
}

struct Outcome {
    ratio: f64,
    plain: f64,
    witness: Option<Witness>,
    evals: u64,
}

struct Searcher<'a> {
    f: &'a dyn Statistic,
    domain: &'a Domain,
    widths: Vec<f64>,
    n: usize,
    target: Target,
    opts: SearchOptions,
    scratch: Configuration,
}

impl Searcher<'_> {
    fn score(&mut self, p: &Probe) -> Score {
        self.scratch.as_mut_slice().copy_from_slice(p.x.as_slice());
        let sep = distance(&p.y, &p.y_prime);
        if sep < self.opts.min_separation {
            return Score::default();
        }
        let plain = if self.target.interaction() {
            let (dd, scale) = raw_double(self.f, &mut self.scratch, p.k, p.l, &p.y, &p.y_prime, &p.z, &p.z_prime);
            self.n as f64 * certified_magnitude(dd, scale)
        } else {
            let (d, scale) = raw_partial(self.f, &mut self.scratch, p.k, &p.y, &p.y_prime);
            certified_magnitude(d, scale)
        };
        Score {
            // the quotient and the computed separation each round once
            ratio: plain / sep * (1.0 - 4.0 * f64::EPSILON),
            plain,
        }
    }

    fn objective(&self, s: Score) -> f64 {
        match self.target {
            Target::MLip | Target::JLip => s.ratio,
            Target::M | Target::J => s.plain,
        }
    }

    fn explore(&self, i: u64, rng: &mut SeededRng) -> Probe {
        let n = self.n;
        let (k, l) = if self.target.interaction() {
            let pairs = (n * (n - 1)) as u64;
            let p = (i % pairs) as usize;
            let k = p / (n - 1);
            let mut l = p % (n - 1);
            if l >= k {
                l += 1;
            }
            (k, l)
        } else {
            ((i % n as u64) as usize, 0)
        };
        let x = Configuration::uniform(self.domain, n, rng);
        let y = self.domain.sample_point(rng);
        let mut y_prime = self.domain.sample_point(rng);
        for _ in 0..64 {
            if distance(&y, &y_prime) >= self.opts.min_separation {
                break;
            }
            y_prime = self.domain.sample_point(rng);
        }
        let (z, z_prime) = if self.target.interaction() {
            (self.domain.sample_point(rng), self.domain.sample_point(rng))
        } else {
            (Vec::new(), Vec::new())
        };
        Probe {
            k,
            l,
            x,
            y,
            y_prime,
            z,
            z_prime,
        }
    }

    fn perturb(&self, p: &Probe, radius: f64, rng: &mut SeededRng) -> Probe {
        let mut q = p.clone();
        let d = self.widths.len();
        let jitter = |v: &mut [f64], rng: &mut SeededRng| {
            for (c, v) in v.iter_mut().enumerate() {
                let c = c % d;
                let step: f64 = rng.sample(StandardNormal);
                *v = (*v + radius * self.widths[c] * step).clamp(self.domain.lower()[c], self.domain.upper()[c]);
            }
        };
        jitter(q.x.as_mut_slice(), rng);
        jitter(&mut q.y, rng);
        jitter(&mut q.y_prime, rng);
        jitter(&mut q.z, rng);
        jitter(&mut q.z_prime, rng);
        q
    }

    fn run(mut self, budget: u64, mut rng: SeededRng) -> Outcome {
        let probes = (budget / self.target.cost()).max(1);
        let explore = ((probes as f64 * self.opts.exploration_fraction).round() as u64).clamp(1, probes);
        let refine = probes - explore;

        let mut best_ratio = 0.0f64;
        let mut best_plain = 0.0f64;
        let mut ratio_probe: Option<Probe> = None;
        let mut incumbent: Option<(Probe, f64)> = None;
        let mut evals = 0u64;

        let mut record = |p: &Probe, s: Score, obj: f64, incumbent: &mut Option<(Probe, f64)>| {
            if s.ratio > best_ratio {
                best_ratio = s.ratio;
                ratio_probe = Some(p.clone());
            }
            best_plain = best_plain.max(s.plain);
            let better = match incumbent {
                None => true,
                Some((_, v)) => obj > *v && obj > *v * (1.0 + 1e-9),
            };
            if better {
                *incumbent = Some((p.clone(), obj));
            }
        };

        for i in 0..explore {
            let p = self.explore(i, &mut rng);
            let s = self.score(&p);
            evals += self.target.cost();
            let obj = self.objective(s);
            record(&p, s, obj, &mut incumbent);
        }

        let (r0, r1) = (self.opts.initial_radius, self.opts.final_radius);
        for t in 0..refine {
            let frac = if refine > 1 { t as f64 / (refine - 1) as f64 } else { 0.0 };
            let radius = r0 * (r1 / r0).powf(frac);
            let base = incumbent.as_ref().expect("exploration ran at least once").0.clone();
            let q = self.perturb(&base, radius, &mut rng);
            let s = self.score(&q);
            evals += self.target.cost();
            let obj = self.objective(s);
            record(&q, s, obj, &mut incumbent);
        }

        let interaction = self.target.interaction();
        Outcome {
            ratio: best_ratio,
            plain: best_plain,
            witness: ratio_probe.map(|p| p.witness(interaction, best_ratio)),
            evals,
        }
    }
}

/// Randomized lower bounds on the four seminorms of `f`, using
/// [`SearchOptions::default`].
///
/// The budget is split evenly across `M_Lip`, `J_Lip`, `M` and `J`; each
/// search gets at least one probe.
pub fn empirical_seminorms(f: &dyn Statistic, budget: u64, rng: &mut SeededRng) -> Result<SeminormReport> {
    empirical_seminorms_with(f, budget, &SearchOptions::default(), rng)
}

pub fn empirical_seminorms_with(
    f: &dyn Statistic,
    budget: u64,
    opts: &SearchOptions,
    rng: &mut SeededRng,
) -> Result<SeminormReport> {
    if budget == 0 {
        return Err(Error::ZeroBudget);
    }
    if !(opts.exploration_fraction > 0.0 && opts.exploration_fraction <= 1.0) {
        return Err(Error::OutOfRange(format!(
            "exploration fraction {} not in (0, 1]",
            opts.exploration_fraction
        )));
    }
    if !(opts.initial_radius > 0.0 && opts.final_radius > 0.0) {
        return Err(Error::OutOfRange("refinement radii must be positive".into()));
    }
    let n = f.n();
    let domain = f.domain();
    let widths: Vec<f64> = domain.lower().iter().zip(domain.upper()).map(|(lo, hi)| hi - lo).collect();
    let root = rng.fork();
    let per_target = budget / 4;

    let outcomes: Vec<Outcome> = Target::ALL
        .into_par_iter()
        .enumerate()
        .map(|(i, target)| {
            if target.interaction() && n < 2 {
                return Outcome {
                    ratio: 0.0,
                    plain: 0.0,
                    witness: None,
                    evals: 0,
                };
            }
            let searcher = Searcher {
                f,
                domain,
                widths: widths.clone(),
                n,
                target,
                opts: *opts,
                scratch: Configuration::new(n, domain.dim(), vec![0.0; n * domain.dim()])
                    .expect("statistic has positive shape"),
            };
            searcher.run(per_target, root.child(i as u64))
        })
        .collect();

    let [m_lip, j_lip, m, j]: [Outcome; 4] = outcomes.try_into().ok().expect("four searches");
    let evals = m_lip.evals + j_lip.evals + m.evals + j.evals;
    let (m_lip_value, m_witness) = pick(m_lip.ratio, m_lip.witness, m.ratio, m.witness);
    let (j_lip_value, j_witness) = pick(j_lip.ratio, j_lip.witness, j.ratio, j.witness);
    Ok(SeminormReport {
        m_lip: m_lip_value,
        j_lip: j_lip_value,
        m_plain: m.plain.max(m_lip.plain),
        j_plain: j.plain.max(j_lip.plain),
        method: SeminormMethod::EmpiricalSearch,
        search_evals: evals,
        argmax_witness: m_witness,
        interaction_witness: j_witness,
        derivative: None,
    })
}

fn pick(a: f64, wa: Option<Witness>, b: f64, wb: Option<Witness>) -> (f64, Option<Witness>) {
    if b > a {
        (b, wb)
    } else {
        (a, wa)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::FnStatistic;
    use crate::seminorms::{analytic_seminorms_auc, double_difference, partial_difference};
    use crate::statistics::{
        Kernel, LStatistic, LossFunction, MeanStatistic, SmoothedAuc, UStatistic, VStatistic, WeightFunction,
    };
    use proptest::prelude::*;

    #[test]
    fn zero_budget_rejected() {
        let f = MeanStatistic::new(3, Domain::unit(1)).unwrap();
        assert!(matches!(
            empirical_seminorms(&f, 0, &mut SeededRng::from_seed(0)),
            Err(Error::ZeroBudget)
        ));
    }

    #[test]
    fn mean_n5() {
        let f = MeanStatistic::new(5, Domain::unit(1)).unwrap();
        let r = empirical_seminorms(&f, 20_000, &mut SeededRng::from_seed(1)).unwrap();
        assert!(r.m_lip <= 0.2 * (1.0 + 1e-9) && r.m_lip > 0.19, "{}", r.m_lip);
        assert!(r.j_lip <= 1e-9);
        assert_eq!(r.method, SeminormMethod::EmpiricalSearch);
        assert!(r.search_evals > 0 && r.argmax_witness.is_some());
    }

    #[test]
    fn constant_statistic_is_zero() {
        let f = FnStatistic::new("const", 4, Domain::unit(2), |_: &Configuration| 3.5);
        let r = empirical_seminorms(&f, 4000, &mut SeededRng::from_seed(2)).unwrap();
        assert_eq!((r.m_lip, r.j_lip, r.m_plain, r.j_plain), (0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn auc_ramp_n4_against_grid_oracle() {
        let f = SmoothedAuc::new(LossFunction::ramp(), 4, Domain::unit(1)).unwrap();
        let r = empirical_seminorms(&f, 40_000, &mut SeededRng::from_seed(3)).unwrap();
        assert!(r.m_lip <= 0.5 * (1.0 + 1e-9));
        assert!(r.m_lip >= 0.45, "{}", r.m_lip);

        // exhaustive grid over x and (y, y') at step 0.1 for k = 0
        let grid: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
        let mut oracle = 0.0f64;
        for &a in &grid {
            for &b in &grid {
                for &c in &grid {
                    let x = Configuration::from_scalars(&[0.0, a, b, c]).unwrap();
                    for &y in &grid {
                        for &yp in &grid {
                            if y != yp {
                                let d = partial_difference(&f, &x, 0, &[y], &[yp]).unwrap();
                                oracle = oracle.max(d.abs() / (y - yp).abs());
                            }
                        }
                    }
                }
            }
        }
        assert!((oracle - 0.5).abs() < 1e-12);
        assert!(r.m_lip >= 0.9 * oracle);
    }

    #[test]
    fn witness_reproduces_value() {
        let f = UStatistic::new(Kernel::product(2), 6, Domain::unit(1)).unwrap();
        let r = empirical_seminorms(&f, 8000, &mut SeededRng::from_seed(4)).unwrap();
        let w = r.argmax_witness.unwrap();
        let d = partial_difference(&f, &w.x, w.k, &w.y, &w.y_prime).unwrap();
        let ratio = d.abs() / distance(&w.y, &w.y_prime);
        assert!(r.m_lip <= ratio && ratio - r.m_lip <= 1e-9 * r.m_lip.max(1.0));
        let w = r.interaction_witness.unwrap();
        let (z, zp) = (w.z.unwrap(), w.z_prime.unwrap());
        let dd = double_difference(&f, &w.x, w.k, w.l.unwrap(), &w.y, &w.y_prime, &z, &zp).unwrap();
        let ratio = 6.0 * dd.abs() / distance(&w.y, &w.y_prime);
        assert!(r.j_lip <= ratio && ratio - r.j_lip <= 1e-9 * r.j_lip.max(1.0));
    }

    #[test]
    fn deterministic_per_seed() {
        let f = VStatistic::new(Kernel::product(2), 5, Domain::unit(1)).unwrap();
        let a = empirical_seminorms(&f, 5000, &mut SeededRng::from_seed(9)).unwrap();
        let b = empirical_seminorms(&f, 5000, &mut SeededRng::from_seed(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn single_row_has_no_interaction() {
        let f = MeanStatistic::new(1, Domain::unit(1)).unwrap();
        let r = empirical_seminorms(&f, 100, &mut SeededRng::from_seed(0)).unwrap();
        assert_eq!(r.j_lip, 0.0);
        assert!((r.m_lip - 1.0).abs() < 1e-12);
    }

    #[test]
    fn budget_one_runs_one_probe_each() {
        let f = MeanStatistic::new(3, Domain::unit(1)).unwrap();
        let r = empirical_seminorms(&f, 1, &mut SeededRng::from_seed(0)).unwrap();
        assert_eq!(r.search_evals, 2 + 4 + 2 + 4);
    }

    fn sandwich_case(f: &dyn Statistic, analytic: &SeminormReport, seed: u64) -> std::result::Result<(), TestCaseError> {
        let e = empirical_seminorms(f, 2000, &mut SeededRng::from_seed(seed)).unwrap();
        prop_assert!(e.is_dominated_by(analytic, 1e-9), "{:?} vs {:?}", e, analytic);
        let diam = f.domain().diameter();
        prop_assert!(e.m_plain <= e.m_lip * diam * (1.0 + 1e-12));
        prop_assert!(e.j_plain <= e.j_lip * diam * (1.0 + 1e-12));
        Ok(())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn sandwich_mean(n in 1usize..12, seed in any::<u64>()) {
            let f = MeanStatistic::new(n, Domain::unit(1)).unwrap();
            sandwich_case(&f, &f.analytic_seminorms(), seed)?;
        }

        #[test]
        fn sandwich_ustat(n in 2usize..8, seed in any::<u64>()) {
            let f = UStatistic::new(Kernel::product(2), n, Domain::unit(1)).unwrap();
            sandwich_case(&f, &f.analytic_seminorms(), seed)?;
            let g = VStatistic::new(Kernel::product(2), n, Domain::unit(1)).unwrap();
            sandwich_case(&g, &g.analytic_seminorms(), seed)?;
        }

        #[test]
        fn sandwich_auc(half in 1usize..5, seed in any::<u64>(), margin in 0.2f64..2.0) {
            let loss = LossFunction::ramp_with_margin(margin).unwrap();
            let f = SmoothedAuc::new(loss.clone(), 2 * half, Domain::unit(1)).unwrap();
            sandwich_case(&f, &analytic_seminorms_auc(loss.lipschitz(), 2 * half).unwrap(), seed)?;
        }

        #[test]
        fn sandwich_lstat(n in 1usize..10, seed in any::<u64>(), zeta in 0.05f64..0.25, r in 0.1f64..3.0) {
            let f = LStatistic::new(WeightFunction::f_zeta(zeta).unwrap(), n, Domain::interval(-r, r).unwrap()).unwrap();
            sandwich_case(&f, &f.analytic_seminorms(), seed)?;
        }

        #[test]
        fn m_lip_is_subadditive(n in 2usize..6, a in -2.0f64..2.0, b in -2.0f64..2.0, seed in any::<u64>()) {
            // ratios evaluated on shared search points
            let f = UStatistic::new(Kernel::product(2), n, Domain::unit(1)).unwrap();
            let g = LStatistic::new(WeightFunction::f_zeta(0.2).unwrap(), n, Domain::unit(1)).unwrap();
            let h = |x: &Configuration| a * f.evaluate(x) + b * g.evaluate(x);
            let mut rng = SeededRng::from_seed(seed);
            let dom = Domain::unit(1);
            let (mut mf, mut mg, mut mh) = (0.0f64, 0.0f64, 0.0f64);
            for i in 0..300 {
                let x = Configuration::uniform(&dom, n, &mut rng);
                let (y, yp) = (dom.sample_point(&mut rng), dom.sample_point(&mut rng));
                let sep = distance(&y, &yp);
                if sep < 1e-12 { continue; }
                let k = i % n;
                let (xa, xb) = (x.with_row(k, &y), x.with_row(k, &yp));
                mf = mf.max((f.evaluate(&xa) - f.evaluate(&xb)).abs() / sep);
                mg = mg.max((g.evaluate(&xa) - g.evaluate(&xb)).abs() / sep);
                mh = mh.max((h(&xa) - h(&xb)).abs() / sep);
            }
            prop_assert!(mh <= a.abs() * mf + b.abs() * mg + 1e-12);
        }
    }
}
