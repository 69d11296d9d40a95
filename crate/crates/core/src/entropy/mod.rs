//! Entropy estimation straight from the laws of empirical means.
//!
//! The entropy at `x` is approximated by `min_r sup_{n ≤ n_max} (1/n) log
//! μ_n(B(x, r))`. For convex sets the liminf in the definition equals the
//! sup over `n`, so the only error left is the finite prefix.

mod mass;

pub use mass::{
    log_mass, log_mass_table, log_normal_interval, log_normal_tail, split_seed, LogMass,
    MonteCarloSpec,
};

use serde::{Deserialize, Serialize};

use crate::convex::{ConvexSet, Norm};
use crate::error::{check_dim, Error, Result};
use crate::extmath::{add_upper, log_sum_exp, ExtReal};
use crate::measures::{CramerSequence, DistributionSpec};

/// Relative slack in the subadditivity check, absorbing rounding in `u`.
pub const SUBADDITIVITY_TOL: f64 = 1e-12;

/// Gap below which a decay sequence counts as converged along `k_C ℕ`.
pub const CONVERGENCE_GAP: f64 = 0.05;

/// The sup-over-prefix values for one radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadiusRow {
    pub radius: f64,
    pub sup: ExtReal,
    /// Index achieving the sup (the smallest one on ties); `None` when every
    /// value is `−∞`.
    pub argmax: Option<usize>,
    /// Some value in the row came from a Monte Carlo run with no hits.
    pub censored: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyEstimate {
    pub point: Vec<f64>,
    pub estimate: ExtReal,
    pub table: Vec<RadiusRow>,
    /// `S(r)` was nonincreasing as `r` decreased.
    pub monotone: bool,
}

fn check_radii(radii: &[f64]) -> Result<()> {
    if radii.is_empty() {
        return Err(Error::invalid("radii must be non-empty"));
    }
    if radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
        return Err(Error::invalid("radii must be positive and finite"));
    }
    if radii.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::invalid("radii must be strictly decreasing"));
    }
    Ok(())
}

/// Entropy estimates at many points, sharing one pass over `μ_1..μ_{n_max}`.
/// Balls are closed.
pub fn entropy_table(
    spec: &DistributionSpec,
    points: &[Vec<f64>],
    radii: &[f64],
    n_max: usize,
    norm: Norm,
    mc: Option<&MonteCarloSpec>,
) -> Result<Vec<EntropyEstimate>> {
    check_radii(radii)?;
    for p in points {
        check_dim(spec.dim(), p.len())?;
    }
    let sets = points
        .iter()
        .flat_map(|p| {
            radii
                .iter()
                .map(move |&r| ConvexSet::ball(p.clone(), r, norm, false))
        })
        .collect::<Result<Vec<_>>>()?;
    let table = log_mass_table(spec, &sets, n_max, mc)?;
    Ok(points
        .iter()
        .zip(table.chunks(radii.len()))
        .map(|(p, rows)| {
            let table: Vec<RadiusRow> = rows
                .iter()
                .zip(radii)
                .map(|(row, &radius)| {
                    let (argmax, sup) = sup_with_index(row.iter().map(|m| m.value));
                    RadiusRow {
                        radius,
                        sup,
                        argmax,
                        censored: row.iter().any(|m| m.censored),
                    }
                })
                .collect();
            let estimate = table.iter().map(|r| r.sup).min().expect("radii non-empty");
            let monotone = table.windows(2).all(|w| w[1].sup <= w[0].sup);
            EntropyEstimate {
                point: p.clone(),
                estimate,
                table,
                monotone,
            }
        })
        .collect())
}

pub fn entropy_at(
    spec: &DistributionSpec,
    x: &[f64],
    radii: &[f64],
    n_max: usize,
    norm: Norm,
    mc: Option<&MonteCarloSpec>,
) -> Result<EntropyEstimate> {
    let mut v = entropy_table(spec, &[x.to_vec()], radii, n_max, norm, mc)?;
    Ok(v.pop().expect("one point"))
}

/// `(1-based index, value)` of the first maximum; `None` if all are `−∞`.
fn sup_with_index(values: impl Iterator<Item = ExtReal>) -> (Option<usize>, ExtReal) {
    let mut best = (None, ExtReal::NEG_INF);
    for (i, v) in values.enumerate() {
        if v > best.1 {
            best = (Some(i + 1), v);
        }
    }
    best
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayReport {
    /// `(n, (1/n) log μ_n(C))` for `n = 1..=n_max`.
    pub per_n: Vec<(usize, ExtReal)>,
    pub sup_value: ExtReal,
    /// Period of `{n : μ_n(C) > 0}`; `None` stands for `∞`.
    pub k_c: Option<usize>,
    /// `|value(n) − sup|` at the largest multiple `n ≤ n_max` of `k_C`.
    pub last_gap: Option<f64>,
    pub converged_along_kc: bool,
    pub warnings: Vec<String>,
}

impl DecayReport {
    pub fn from_values(values: Vec<ExtReal>) -> Self {
        let n_max = values.len();
        let finite: Vec<usize> = (1..=n_max).filter(|&n| values[n - 1].is_finite()).collect();
        let k_c = finite.iter().copied().reduce(gcd);
        let (_, sup_value) = sup_with_index(values.iter().copied());
        let last_gap = k_c.map(|k| {
            let n = n_max / k * k;
            (values[n - 1].value() - sup_value.value()).abs()
        });
        let mut warnings = Vec::new();
        if let Some(k) = k_c {
            if n_max < 4 * k {
                warnings.push(format!(
                    "n_max = {n_max} < 4·k_C = {}; the gcd may not have stabilised",
                    4 * k
                ));
            }
        }
        DecayReport {
            per_n: (1..=n_max).zip(values).collect(),
            sup_value,
            k_c,
            last_gap,
            converged_along_kc: last_gap.is_some_and(|g| g <= CONVERGENCE_GAP),
            warnings,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,value\n");
        for (n, v) in &self.per_n {
            s.push_str(&format!("{n},{v}\n"));
        }
        s
    }

    /// `{sup, k_C, converged_gap, converged, warnings}`; `k_C` is the string
    /// `"inf"` when infinite.
    pub fn summary_json(&self) -> serde_json::Value {
        serde_json::json!({
            "sup": self.sup_value,
            "k_C": match self.k_c {
                Some(k) => serde_json::json!(k),
                None => serde_json::json!("inf"),
            },
            "converged_gap": self.last_gap,
            "converged": self.converged_along_kc,
            "n_max": self.per_n.len(),
            "warnings": self.warnings,
        })
    }
}

/// Exact decay sequence `(1/n) log μ_n(C)` for `n ≤ n_max`.
pub fn decay_analysis(spec: &DistributionSpec, set: &ConvexSet, n_max: usize) -> Result<DecayReport> {
    let table = log_mass_table(spec, std::slice::from_ref(set), n_max, None)?;
    let values = table
        .into_iter()
        .next()
        .expect("one set")
        .into_iter()
        .map(|m| m.value)
        .collect();
    Ok(DecayReport::from_values(values))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeketeReport {
    /// `min_n u(n)/n` over the prefix.
    pub inf_rate: ExtReal,
    pub argmin: Option<usize>,
    /// `u` is finite on the whole second half of the prefix.
    pub controlled: bool,
    /// `u(n_max)/n_max` when controlled.
    pub tail_rate: Option<ExtReal>,
}

/// Checks `u(m+n) ≤ u(m) + u(n)` on the prefix (indexed from 1) and reports
/// `inf u(n)/n`, which is the limit of `u(n)/n` for subadditive `u`.
///
/// The witness of a violation is the first one in order of `m + n`, then
/// `m`, with `m ≤ n`.
pub fn fekete_limit(u: &[ExtReal]) -> Result<FeketeReport> {
    if u.is_empty() {
        return Err(Error::invalid("empty sequence"));
    }
    if let Some(i) = u.iter().position(|v| *v < ExtReal::ZERO) {
        return Err(Error::invalid(format!("u({}) is negative", i + 1)));
    }
    let len = u.len();
    for s in 2..=len {
        for m in 1..=s / 2 {
            let n = s - m;
            let bound = add_upper(u[m - 1], u[n - 1]);
            let slack = SUBADDITIVITY_TOL * (1.0 + bound.value().abs());
            if u[s - 1].is_pos_inf() && bound.is_finite()
                || bound.is_finite() && u[s - 1].value() > bound.value() + slack
            {
                return Err(Error::SubadditivityViolated {
                    m,
                    n,
                    gap: u[s - 1].value() - bound.value(),
                });
            }
        }
    }
    let mut best = (None, ExtReal::POS_INF);
    for (i, v) in u.iter().enumerate() {
        let rate = per_step(*v, i + 1);
        if rate < best.1 {
            best = (Some(i + 1), rate);
        }
    }
    let controlled = u[len / 2..].iter().all(|v| v.is_finite());
    Ok(FeketeReport {
        inf_rate: best.1,
        argmin: best.0,
        controlled,
        tail_rate: controlled.then(|| per_step(u[len - 1], len)),
    })
}

fn per_step(v: ExtReal, n: usize) -> ExtReal {
    if v.is_finite() {
        ExtReal::of(v.value() / n as f64)
    } else {
        v
    }
}

/// Admissible test functions for the Varadhan functional.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum TestFunction {
    /// `⟨λ, x⟩ + c`.
    Affine { lambda: Vec<f64>, c: f64 },
    /// `⟨λ, x⟩ + c` on `set`, `−∞` elsewhere.
    Restricted {
        lambda: Vec<f64>,
        c: f64,
        set: ConvexSet,
    },
}

impl TestFunction {
    pub fn dim(&self) -> usize {
        match self {
            TestFunction::Affine { lambda, .. } | TestFunction::Restricted { lambda, .. } => {
                lambda.len()
            }
        }
    }

    pub fn eval(&self, x: &[f64]) -> ExtReal {
        match self {
            TestFunction::Affine { lambda, c } => ExtReal::of(crate::measures::dot(lambda, x) + c),
            TestFunction::Restricted { lambda, c, set } => {
                if set.member(x, false) {
                    ExtReal::of(crate::measures::dot(lambda, x) + c)
                } else {
                    ExtReal::NEG_INF
                }
            }
        }
    }
}

/// `(1/n) log E e^{n f(X̄_n)}` for `n = 1..=n_max`, exactly over the atoms of
/// each `μ_n`.
pub fn varadhan_sequence(spec: &DistributionSpec, f: &TestFunction, n_max: usize) -> Result<Vec<ExtReal>> {
    check_dim(spec.dim(), f.dim())?;
    if let TestFunction::Restricted { set, .. } = f {
        if let Some(d) = set.dim() {
            check_dim(spec.dim(), d)?;
        }
    }
    let base = spec
        .to_atomic()
        .ok_or_else(|| Error::invalid("the Varadhan functional needs an atomic law"))?;
    let mut seq = CramerSequence::new(&base);
    let mut out = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let law = seq.step_mean()?;
        let nf = n as f64;
        let terms: Vec<ExtReal> = law
            .atoms()
            .map(|(p, lw)| crate::extmath::add_lower(f.eval(p).scale(nf), ExtReal::of(lw)))
            .collect();
        out.push(log_sum_exp(&terms).scale(1.0 / nf));
    }
    Ok(out)
}

pub fn varadhan_functional(spec: &DistributionSpec, f: &TestFunction, n: usize) -> Result<ExtReal> {
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    Ok(*varadhan_sequence(spec, f, n)?.last().expect("n ≥ 1"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convex::Constraint;
    use crate::measures::{AtomicMeasure, FiniteAlphabet, Gaussian};
    use crate::pressure::pressure;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn rademacher() -> DistributionSpec {
        DistributionSpec::rademacher()
    }

    fn xs(v: &[f64]) -> Vec<ExtReal> {
        v.iter().map(|&x| ExtReal::of(x)).collect()
    }

    #[test]
    fn log_mass_examples() {
        let origin = ConvexSet::singleton(&[0.0]).unwrap();
        let v = log_mass(&rademacher(), 2, &origin, None).unwrap();
        assert!((v.value.value() - 0.5 * 0.5f64.ln()).abs() < 1e-15);
        assert!(v.is_exact());
        assert_eq!(log_mass(&rademacher(), 1, &origin, None).unwrap().value, ExtReal::NEG_INF);

        let n01 = DistributionSpec::Gaussian(Gaussian::standard(1));
        let ray = ConvexSet::interval(0.5, f64::INFINITY).unwrap();
        let v = log_mass(&n01, 100, &ray, None).unwrap().value.value();
        // ln Φ̄(5) = ln 2.866515718791939e-7.
        assert!((v - 2.866_515_718_791_939e-7f64.ln() / 100.0).abs() < 1e-12, "{v}");
        let half = ConvexSet::halfspace(vec![-1.0], -0.5, false).unwrap();
        let w = log_mass(&n01, 100, &half, None).unwrap().value.value();
        assert!((v - w).abs() < 1e-14);

        let disk = ConvexSet::ball(vec![1.0, 1.0], 0.5, Norm::L2, false).unwrap();
        let g2 = DistributionSpec::Gaussian(Gaussian::standard(2));
        assert!(matches!(log_mass(&g2, 3, &disk, None), Err(Error::NeedMonteCarlo)));

        // x + 2y ≤ −1 under N(0, diag(1, 0.25)) / 4: the projection has
        // variance (1 + 4·0.25)/4 = 0.5, so the mass is Φ̄(1/√0.5).
        let g = DistributionSpec::Gaussian(Gaussian::new(vec![0.0, 0.0], vec![1.0, 0.25]).unwrap());
        let h = ConvexSet::halfspace(vec![1.0, 2.0], -1.0, false).unwrap();
        let v = log_mass(&g, 4, &h, None).unwrap().value.value();
        let oracle = (0.5 * libm::erfc(1.0 / 0.5f64.sqrt() / std::f64::consts::SQRT_2)).ln() / 4.0;
        assert!((v - oracle).abs() < 1e-14, "{v} {oracle}");
    }

    #[test]
    fn gaussian_monte_carlo_with_and_without_tilt() {
        let g = DistributionSpec::Gaussian(Gaussian::standard(2));
        let quadrant = ConvexSet::polytope(
            2,
            vec![
                Constraint { normal: vec![-1.0, 0.0], offset: -0.3 },
                Constraint { normal: vec![0.0, -1.0], offset: -0.3 },
            ],
        )
        .unwrap();
        let n = 60;
        let exact = 2.0 * log_normal_tail(0.3 * (n as f64).sqrt()) / n as f64;
        assert!(matches!(log_mass(&g, n, &quadrant, None), Err(Error::NeedMonteCarlo)));
        let plain = MonteCarloSpec {
            samples: 20_000,
            seed: 7,
            tilt: None,
        };
        let est = log_mass(&g, n, &quadrant, Some(&plain)).unwrap();
        assert!(!est.censored);
        assert!((est.value.value() - exact).abs() < 4.0 * est.std_error.unwrap(), "{est:?} vs {exact}");
        let tilted = MonteCarloSpec {
            tilt: Some(vec![0.3, 0.3]),
            ..plain
        };
        let est_t = log_mass(&g, n, &quadrant, Some(&tilted)).unwrap();
        let se = est_t.std_error.unwrap();
        assert!((est_t.value.value() - exact).abs() < 4.0 * se, "{est_t:?} vs {exact}");
        assert!(se < est.std_error.unwrap() / 3.0);
        assert_eq!(est_t, log_mass(&g, n, &quadrant, Some(&tilted)).unwrap());

        let far = ConvexSet::polytope(2, vec![Constraint { normal: vec![-1.0, -1.0], offset: -4.0 }]).unwrap();
        let few = MonteCarloSpec { samples: 100, seed: 1, tilt: None };
        let miss = log_mass(&g, n, &far, Some(&few)).unwrap();
        assert!(miss.censored && miss.value.is_neg_inf() && !miss.is_exact());
    }

    #[test]
    fn entropy_examples() {
        let coin = DistributionSpec::bernoulli(0.5).unwrap();
        let e = entropy_at(&coin, &[0.5], &[0.1, 0.05, 0.01], 2000, Norm::L2, None).unwrap();
        assert!(e.estimate.value().abs() < 0.05 && e.monotone);
        // The closed ball around 0 reaches x = 0.01, where the rate is
        // 0.0559 smaller than at 0; the estimate tracks the sup over the ball.
        let e = entropy_at(&coin, &[0.0], &[0.01], 2000, Norm::L2, None).unwrap();
        let s = |x: f64| -(x * x.ln() + (1.0 - x) * (1.0 - x).ln() + std::f64::consts::LN_2);
        assert!(e.estimate.value() <= s(0.01));
        assert!((e.estimate.value() - s(0.01)).abs() < 0.005, "{e:?}");
        let dirac = DistributionSpec::Atomic(AtomicMeasure::dirac(vec![2.0, -1.0]).unwrap());
        let e = entropy_at(&dirac, &[2.0, -1.0], &[1.0, 0.1, 1e-6], 30, Norm::Linf, None).unwrap();
        assert_eq!(e.estimate, ExtReal::ZERO);
        assert!(e.table.iter().all(|r| r.sup == ExtReal::ZERO));
        assert!(entropy_at(&coin, &[0.5], &[0.1, 0.2], 5, Norm::L2, None).is_err());
        assert!(entropy_at(&coin, &[0.5], &[], 5, Norm::L2, None).is_err());
    }

    #[test]
    fn entropy_vanishes_at_the_mean() {
        let m = AtomicMeasure::new(1, vec![(vec![-1.0], 0.3), (vec![0.5], 0.5), (vec![2.0], 0.2)]).unwrap();
        let spec = DistributionSpec::Atomic(m.clone());
        let mean = m.mean();
        let e = entropy_at(&spec, &mean, &[0.2, 0.05], 2000, Norm::L2, None).unwrap();
        assert!(e.estimate.value() <= 0.0 && e.estimate.value() > -0.05, "{e:?}");
    }

    #[test]
    fn decay_examples() {
        let r = decay_analysis(&rademacher(), &ConvexSet::singleton(&[0.0]).unwrap(), 200).unwrap();
        assert_eq!(r.k_c, Some(2));
        for (n, v) in &r.per_n {
            assert_eq!(n % 2 == 1, v.is_neg_inf(), "n={n}");
        }
        assert!(r.sup_value.value() > -0.02 && r.sup_value.value() < 0.0);
        assert!(r.converged_along_kc && r.warnings.is_empty());

        let one = DistributionSpec::Atomic(AtomicMeasure::dirac(vec![1.0]).unwrap());
        let r = decay_analysis(&one, &ConvexSet::singleton(&[1.0]).unwrap(), 10).unwrap();
        assert_eq!(r.k_c, Some(1));
        assert!(r.per_n.iter().all(|(_, v)| *v == ExtReal::ZERO));

        let r = decay_analysis(&one, &ConvexSet::singleton(&[2.0]).unwrap(), 10).unwrap();
        assert_eq!((r.k_c, r.last_gap, r.converged_along_kc), (None, None, false));
        assert!(r.summary_json()["k_C"] == "inf");

        let r = decay_analysis(&rademacher(), &ConvexSet::singleton(&[0.0]).unwrap(), 6).unwrap();
        assert_eq!(r.warnings.len(), 1);
        assert!(r.to_csv().starts_with("n,value\n1,-inf\n2,"));
    }

    #[test]
    fn truncated_geometric_has_period_two_at_three_halves() {
        let atoms: Vec<(Vec<f64>, f64)> = (1..=20).map(|m| (vec![m as f64], 0.5f64.powi(m))).collect();
        let spec = DistributionSpec::Atomic(AtomicMeasure::normalized(1, atoms).unwrap());
        let r = decay_analysis(&spec, &ConvexSet::singleton(&[1.5]).unwrap(), 12).unwrap();
        assert_eq!(r.k_c, Some(2));
        for (n, v) in &r.per_n {
            // n·3/2 is an integer sum of n atoms exactly when n is even.
            assert_eq!(n % 2 == 0, v.is_finite(), "n={n}");
        }
    }

    #[test]
    fn gaussian_decay_has_period_one() {
        let g = DistributionSpec::Gaussian(Gaussian::standard(1));
        let r = decay_analysis(&g, &ConvexSet::interval(0.5, f64::INFINITY).unwrap(), 2000).unwrap();
        assert_eq!(r.k_c, Some(1));
        assert!(r.per_n.windows(2).all(|w| w[1].1 >= w[0].1));
        assert!((r.per_n[1999].1.value() + 0.125).abs() <= 0.06);
    }

    #[test]
    fn fekete_examples() {
        let u: Vec<ExtReal> = (1..=1000).map(|n| ExtReal::of(n as f64 + 1.0)).collect();
        let r = fekete_limit(&u).unwrap();
        assert_eq!(r.inf_rate, ExtReal::of(1001.0 / 1000.0));
        assert_eq!(r.argmin, Some(1000));
        assert!(r.controlled);

        let c = 0.37;
        let u: Vec<ExtReal> = (1..=100).map(|n| ExtReal::of(c * n as f64)).collect();
        let r = fekete_limit(&u).unwrap();
        assert!((r.inf_rate.value() - c).abs() < 1e-15);

        let u: Vec<ExtReal> = (1..=50)
            .map(|n| if n % 2 == 0 { ExtReal::ZERO } else { ExtReal::POS_INF })
            .collect();
        let r = fekete_limit(&u).unwrap();
        assert_eq!((r.inf_rate, r.argmin, r.controlled, r.tail_rate), (ExtReal::ZERO, Some(2), false, None));

        let mut u = xs(&[1.0, 2.0, 3.0, 4.0]);
        u[2] = ExtReal::of(3.5);
        match fekete_limit(&u) {
            Err(Error::SubadditivityViolated { m, n, gap }) => {
                assert_eq!((m, n), (1, 2));
                assert!((gap - 0.5).abs() < 1e-15);
            }
            other => panic!("{other:?}"),
        }
        assert!(fekete_limit(&xs(&[-1.0])).is_err());
        assert!(fekete_limit(&[]).is_err());
    }

    #[test]
    fn varadhan_examples() {
        let m = AtomicMeasure::new(2, vec![(vec![0.0, 1.0], 0.25), (vec![2.0, -1.0], 0.75)]).unwrap();
        let spec = DistributionSpec::Atomic(m);
        let lambda = vec![0.7, -0.4];
        let f = TestFunction::Affine {
            lambda: lambda.clone(),
            c: 0.0,
        };
        let p = pressure(&spec, &lambda).unwrap().value();
        for v in varadhan_sequence(&spec, &f, 30).unwrap() {
            assert!((v.value() - p).abs() < 1e-12);
        }
        let zero = TestFunction::Affine {
            lambda: vec![0.0, 0.0],
            c: 0.0,
        };
        assert!(varadhan_functional(&spec, &zero, 7).unwrap().value().abs() < 1e-14);

        let f = TestFunction::Restricted {
            lambda: vec![0.0],
            c: 0.0,
            set: ConvexSet::singleton(&[0.0]).unwrap(),
        };
        let v = varadhan_functional(&rademacher(), &f, 2).unwrap().value();
        assert!((v - 0.5 * 0.5f64.ln()).abs() < 1e-15);
        assert!(varadhan_functional(&DistributionSpec::Gaussian(Gaussian::standard(1)), &f, 2).is_err());
    }

    #[test]
    fn product_lower_bound_on_convex_sets() {
        let m = AtomicMeasure::new(1, vec![(vec![0.0], 0.2), (vec![1.0], 0.5), (vec![3.0], 0.3)]).unwrap();
        let spec = DistributionSpec::Atomic(m);
        let sets = [
            ConvexSet::interval(0.9, 1.3).unwrap(),
            ConvexSet::open_interval(2.0, 2.5).unwrap(),
            ConvexSet::singleton(&[1.0]).unwrap(),
        ];
        let table = log_mass_table(&spec, &sets, 100, None).unwrap();
        for row in &table {
            let log_mass = |n: usize| row[n - 1].value.scale(n as f64);
            for m in 1..=50 {
                for n in 1..=50 {
                    let lhs = log_mass(m + n);
                    let rhs = crate::extmath::add_lower(log_mass(m), log_mass(n));
                    assert!(lhs.value() >= rhs.value() - 1e-9, "m={m} n={n}");
                }
            }
        }
    }

    #[test]
    fn alphabet_entropy_is_minus_relative_entropy() {
        let a = FiniteAlphabet::new(vec![1.0 / 3.0; 3]).unwrap();
        let spec = DistributionSpec::FiniteAlphabet(a);
        let nu = [0.5, 0.25, 0.25];
        let kl: f64 = nu.iter().map(|v| v * (v * 3.0f64).ln()).sum();
        assert!((kl - (1.5f64.ln() + 0.75f64.ln()) / 2.0).abs() < 1e-15);
        let e = entropy_at(&spec, &nu, &[0.02], 600, Norm::Linf, None).unwrap();
        assert!((e.estimate.value() + kl).abs() < 0.05, "{e:?}");
    }

    /// `(t, 1/|t|)` with `t ~ N(0, 1)` lives in the open upper half-plane, yet
    /// the mean of two draws lands arbitrarily close to the horizontal axis.
    #[test]
    fn heavy_tail_pairs_reach_the_axis() {
        let mut rng = ChaCha8Rng::seed_from_u64(split_seed(11, "heavy-tail"));
        let draw = |rng: &mut ChaCha8Rng| {
            let t: f64 = StandardNormal.sample(rng);
            [t, 1.0 / t.abs()]
        };
        let near_axis = ConvexSet::ball(vec![0.0, 0.0], 0.75, Norm::Linf, false).unwrap();
        let (mut singles, mut pairs) = (0, 0);
        for _ in 0..100_000 {
            let a = draw(&mut rng);
            let b = draw(&mut rng);
            assert!(a[1] > 0.0);
            if near_axis.member(&a, false) {
                singles += 1;
            }
            let mid = [(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0];
            if near_axis.member(&mid, false) {
                pairs += 1;
            }
        }
        // A single draw needs |t| ≤ 0.75 and 1/|t| ≤ 0.75 at once: impossible.
        assert_eq!(singles, 0);
        assert!(pairs > 100, "{pairs}");
    }

    proptest! {
        #[test]
        fn radius_monotonicity_and_sign(
            w in 0.05f64..0.95,
            x in -0.5f64..1.5,
            r0 in 0.05f64..0.5,
        ) {
            let spec = DistributionSpec::bernoulli(w).unwrap();
            let radii = [r0, r0 / 2.0, r0 / 8.0];
            let e = entropy_at(&spec, &[x], &radii, 60, Norm::L2, None).unwrap();
            prop_assert!(e.monotone);
            prop_assert!(e.estimate <= ExtReal::ZERO);
        }

        #[test]
        fn decay_support_matches_period(a in 1u8..4, b in 1u8..4, c in -3i8..6) {
            let m = AtomicMeasure::new(1, vec![(vec![a as f64], 0.5), (vec![-(b as f64)], 0.5)]).unwrap();
            let spec = DistributionSpec::Atomic(m);
            let r = decay_analysis(&spec, &ConvexSet::singleton(&[c as f64 / 2.0]).unwrap(), 40).unwrap();
            for (n, v) in &r.per_n {
                match r.k_c {
                    Some(k) => prop_assert!(v.is_neg_inf() || n % k == 0),
                    None => prop_assert!(v.is_neg_inf()),
                }
            }
        }
    }
}
