//! The default battery of checks for one law, with per-field overrides.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::*;
use crate::grid::Axis;

/// Every check, in report order.
pub const CHECK_NAMES: [&str; 10] = [
    "biconjugation",
    "chebyshev",
    "convex_upper_bound",
    "dom_cosupp",
    "duality",
    "hyperplane_convergence",
    "pressure_recovery",
    "sanov",
    "varadhan",
    "young",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChebyshevConfig {
    pub lambda: Vec<f64>,
    pub x: Vec<f64>,
    pub eps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SanovConfig {
    /// Types are the interior multiples of `1/denominator`.
    pub denominator: usize,
    pub radius: f64,
}

/// Overrides for [`run_suite`]; every field left out takes a default sized
/// to the law.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    /// Subset of [`CHECK_NAMES`]; all applicable checks by default.
    #[serde(default)]
    pub checks: Option<Vec<String>>,
    #[serde(default)]
    pub primal: Option<GridSpec>,
    #[serde(default)]
    pub dual: Option<GridSpec>,
    #[serde(default)]
    pub lambdas: Option<GridSpec>,
    #[serde(default)]
    pub n_max: Option<usize>,
    #[serde(default)]
    pub radii: Option<Vec<f64>>,
    #[serde(default)]
    pub tolerance: Option<f64>,
    #[serde(default)]
    pub sets: Option<Vec<ConvexSet>>,
    #[serde(default)]
    pub chebyshev: Option<ChebyshevConfig>,
    #[serde(default)]
    pub test_functions: Option<Vec<TestFunction>>,
    #[serde(default)]
    pub sanov: Option<SanovConfig>,
}

/// Axis-aligned box holding the bulk of the law: the atoms' extent, or four
/// standard deviations around a Gaussian mean.
fn bulk_box(spec: &DistributionSpec) -> Vec<(f64, f64)> {
    match spec {
        DistributionSpec::Atomic(m) => (0..m.dim())
            .map(|k| {
                m.atoms().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (p, _)| {
                    (lo.min(p[k]), hi.max(p[k]))
                })
            })
            .collect(),
        DistributionSpec::Gaussian(g) => g
            .mean()
            .iter()
            .zip(g.var())
            .map(|(m, v)| (m - 4.0 * v.sqrt(), m + 4.0 * v.sqrt()))
            .collect(),
        DistributionSpec::FiniteAlphabet(a) => vec![(0.0, 1.0); a.letters()],
        DistributionSpec::Product(parts) => parts.iter().flat_map(bulk_box).collect(),
    }
}

fn widths(bulk: &[(f64, f64)]) -> Vec<f64> {
    bulk.iter()
        .map(|(lo, hi)| if hi > lo { hi - lo } else { 1.0 })
        .collect()
}

fn padded_grid(bulk: &[(f64, f64)], count: usize) -> Result<GridSpec> {
    let axes = bulk
        .iter()
        .zip(widths(bulk))
        .map(|(&(lo, hi), w)| Axis::new(lo - 0.1 * w, hi + 0.1 * w, count))
        .collect::<Result<Vec<_>>>()?;
    GridSpec::new(axes)
}

fn is_selected(cfg: &SuiteConfig, name: &str) -> bool {
    cfg.checks.as_ref().is_none_or(|c| c.iter().any(|n| n == name))
}

/// What the law supports: exact entropies, cosupport geometry, Gaussian
/// closed forms.
struct Kind {
    dim: usize,
    atomic: bool,
    gaussian: bool,
    alphabet: bool,
}

impl Kind {
    fn of(spec: &DistributionSpec) -> Self {
        Kind {
            dim: spec.dim(),
            atomic: !matches!(spec, DistributionSpec::FiniteAlphabet(_)) && spec.to_atomic().is_some(),
            gaussian: spec.to_gaussian().is_some(),
            alphabet: matches!(spec, DistributionSpec::FiniteAlphabet(_)),
        }
    }

    fn applicable(&self, name: &str) -> bool {
        let low = self.dim <= 2;
        match name {
            "biconjugation" => true,
            "chebyshev" => self.atomic || self.gaussian,
            "duality" => self.dim == 1 && (self.atomic || self.gaussian),
            "young" | "pressure_recovery" => low && !self.alphabet,
            "convex_upper_bound" => low && self.atomic || self.dim == 1 && self.gaussian,
            "dom_cosupp" | "varadhan" => low && self.atomic,
            "hyperplane_convergence" => self.gaussian,
            "sanov" => self.alphabet,
            _ => false,
        }
    }
}

/// Runs every applicable (and selected) check; reports come back in
/// [`CHECK_NAMES`] order.
pub fn run_suite(spec: &DistributionSpec, cfg: &SuiteConfig) -> Result<Vec<CheckReport>> {
    if let Some(names) = &cfg.checks {
        if let Some(bad) = names.iter().find(|n| !CHECK_NAMES.contains(&n.as_str())) {
            return Err(Error::invalid(format!("unknown check '{bad}'")));
        }
    }
    let kind = Kind::of(spec);
    let names: Vec<&str> = CHECK_NAMES
        .iter()
        .copied()
        .filter(|n| is_selected(cfg, n) && kind.applicable(n))
        .collect();
    names.par_iter().map(|name| run_one(spec, cfg, &kind, name)).collect()
}

fn run_one(spec: &DistributionSpec, cfg: &SuiteConfig, kind: &Kind, name: &str) -> Result<CheckReport> {
    let bulk = bulk_box(spec);
    let w = widths(&bulk);
    let d = kind.dim;
    let one_d = d == 1;
    let tol = cfg.tolerance.unwrap_or(0.05);
    let primal = || match &cfg.primal {
        Some(g) => Ok(g.clone()),
        None => padded_grid(&bulk, if one_d { 501 } else { 61 }),
    };
    let dual = || match &cfg.dual {
        Some(g) => Ok(g.clone()),
        None if one_d => "[-40,40]x8001".parse(),
        None => GridSpec::cube(-20.0, 20.0, 201, d),
    };
    let n = |default: usize| cfg.n_max.unwrap_or(default);
    let mean: Vec<f64> = match (spec.to_gaussian(), spec.to_atomic()) {
        (Some(g), _) => g.mean().to_vec(),
        (_, Some(m)) => m.mean(),
        _ => bulk.iter().map(|(lo, hi)| 0.5 * (lo + hi)).collect(),
    };
    match name {
        "biconjugation" => {
            let line: GridSpec = "[-2,2]x401".parse()?;
            let f = |g: fn(f64) -> f64| GridFunction::from_fn(line.clone(), move |x| ExtReal::of(g(x[0])));
            let samples = vec![
                ("|x|".to_string(), f(f64::abs)),
                ("exp".to_string(), f(f64::exp)),
                ("double well".to_string(), f(|x| (x * x - 1.0).powi(2))),
                ("constant".to_string(), f(|_| 0.7)),
            ];
            check_biconjugation(&samples, &"[-32,32]x6401".parse()?, 4e-4)
        }
        "chebyshev" => {
            let c = match &cfg.chebyshev {
                Some(c) => c.clone(),
                None => ChebyshevConfig {
                    lambda: w.iter().map(|w| 2.0 / w).collect(),
                    x: bulk.iter().zip(&w).map(|((lo, _), w)| lo + 0.9 * w).collect(),
                    eps: 0.05,
                },
            };
            let n_max = n(if kind.gaussian { 200 } else { 500 }).min(if d == 1 { 2000 } else { 200 });
            check_chebyshev(spec, &c.lambda, &c.x, c.eps, n_max)
        }
        "duality" => {
            let primal = match &cfg.primal {
                Some(g) => g.clone(),
                None if kind.gaussian => {
                    let sd = w[0] / 8.0;
                    GridSpec::line(mean[0] - 2.0 * sd, mean[0] + 2.0 * sd, 21)?
                }
                None => GridSpec::line(bulk[0].0, bulk[0].0 + w[0], 21)?,
            };
            let scale = if kind.gaussian { 0.001 } else { 0.005 };
            let radii = cfg.radii.clone().unwrap_or_else(|| vec![scale * w[0]]);
            check_duality(spec, &primal, &dual()?, n(2000), &radii, tol)
        }
        "young" => {
            let lambdas = match &cfg.lambdas {
                Some(g) => g.clone(),
                None if one_d => "[-3,3]x61".parse()?,
                None => GridSpec::cube(-3.0, 3.0, 7, d)?,
            };
            check_young(spec, &lambdas, &primal()?, &dual()?)
        }
        "pressure_recovery" => {
            let pts: Vec<Vec<f64>> = match &cfg.lambdas {
                Some(g) => g.points().collect(),
                None if one_d => (-12..=12).map(|k| vec![k as f64 * 0.25]).collect(),
                None => GridSpec::cube(-2.0, 2.0, 5, d)?.points().collect(),
            };
            check_pressure_recovery(spec, &pts, &primal()?, &dual()?, tol)
        }
        "convex_upper_bound" => {
            let sets = match &cfg.sets {
                Some(s) => s.clone(),
                None => default_sets(&bulk, &mean, kind)?,
            };
            check_convex_upper_bound(spec, &sets, n(200), &primal()?, &dual()?)
        }
        "dom_cosupp" => {
            let (grid, radii, n_max) = if one_d {
                (padded_grid(&bulk, 101)?, vec![0.01 * w[0], 0.0005 * w[0]], n(1000))
            } else {
                let m = w.iter().cloned().fold(0.0, f64::max);
                (padded_grid(&bulk, 21)?, vec![0.05 * m, 0.002 * m], n(60))
            };
            let grid = cfg.primal.clone().unwrap_or(grid);
            let radii = cfg.radii.clone().unwrap_or(radii);
            check_dom_cosupp(spec, &grid, n_max, &radii)
        }
        "varadhan" => {
            let fs = match &cfg.test_functions {
                Some(f) => f.clone(),
                None => {
                    let lambda: Vec<f64> = w.iter().map(|w| 1.0 / w).collect();
                    let mut fs = vec![TestFunction::Affine {
                        lambda: lambda.clone(),
                        c: 0.0,
                    }];
                    if one_d {
                        fs.push(TestFunction::Restricted {
                            lambda,
                            c: 0.0,
                            set: ConvexSet::interval(mean[0], f64::INFINITY)?,
                        });
                    }
                    fs
                }
            };
            let n_max = n(if one_d { 300 } else { 60 });
            let (primal, dual) = (primal()?, dual()?);
            let mut cases = Vec::new();
            for (k, f) in fs.iter().enumerate() {
                for mut c in check_varadhan(spec, f, n_max, &primal, &dual)?.details {
                    c.witness = json!({ "function": k, "n": c.witness });
                    cases.push(c);
                }
            }
            Ok(CheckReport::from_cases("varadhan", cases))
        }
        "hyperplane_convergence" => {
            let sets = match &cfg.sets {
                Some(s) => s.clone(),
                None => {
                    let g = spec.to_gaussian().expect("Gaussian");
                    let sd = g.var()[0].sqrt();
                    let mut e1 = vec![0.0; d];
                    e1[0] = 1.0;
                    let lower = ConvexSet::halfspace(e1.iter().map(|v| -v).collect(), -(mean[0] + 0.5 * sd), false)?;
                    let upper = ConvexSet::halfspace(e1, mean[0] - 0.3 * sd, false)?;
                    vec![lower, ConvexSet::space(d), upper]
                }
            };
            check_hyperplane_convergence(spec, &sets, n(2000), tol)
        }
        "sanov" => {
            let DistributionSpec::FiniteAlphabet(a) = spec else {
                unreachable!("sanov runs on alphabets only")
            };
            let k = a.letters();
            let c = cfg.sanov.clone().unwrap_or(SanovConfig {
                denominator: if k <= 3 { 10 } else { k + 1 },
                radius: 0.02,
            });
            let types = type_grid(k, c.denominator, true);
            check_sanov(a.weights(), &types, n(if k <= 3 { 600 } else { 200 }), c.radius, tol)
        }
        _ => unreachable!("filtered against CHECK_NAMES"),
    }
}

/// A spread of convex sets around the bulk of the law: slabs, half-spaces, a
/// small open neighbourhood of the mean and a set far from the support.
fn default_sets(bulk: &[(f64, f64)], mean: &[f64], kind: &Kind) -> Result<Vec<ConvexSet>> {
    let w = widths(bulk);
    if kind.dim == 1 {
        let (lo, hi) = bulk[0];
        let w = w[0];
        if kind.gaussian {
            let sd = w / 8.0;
            return Ok(vec![
                ConvexSet::interval(mean[0] + 0.5 * sd, f64::INFINITY)?,
                ConvexSet::interval(f64::NEG_INFINITY, mean[0] - 0.3 * sd)?,
                ConvexSet::interval(mean[0] + sd, mean[0] + 2.0 * sd)?,
            ]);
        }
        return Ok(vec![
            ConvexSet::interval(lo + 0.6 * w, lo + 0.8 * w)?,
            ConvexSet::open_interval(mean[0] - 0.05 * w, mean[0] + 0.05 * w)?,
            ConvexSet::interval(lo + 0.75 * w, f64::INFINITY)?,
            ConvexSet::interval(f64::NEG_INFINITY, lo + 0.1 * w)?,
            ConvexSet::interval(hi + w, hi + 2.0 * w)?,
        ]);
    }
    let m = w.iter().cloned().fold(0.0, f64::max);
    let shifted: Vec<f64> = mean.iter().zip(&w).map(|(c, w)| c + 0.2 * w).collect();
    Ok(vec![
        ConvexSet::ball(mean.to_vec(), 0.1 * m, Norm::L2, true)?,
        ConvexSet::ball(shifted.clone(), 0.1 * m, Norm::Linf, false)?,
        ConvexSet::halfspace(vec![-1.0; kind.dim], -shifted.iter().sum::<f64>(), false)?,
        ConvexSet::ball(bulk.iter().map(|(_, hi)| hi + m).collect(), 0.1 * m, Norm::L1, false)?,
    ])
}
