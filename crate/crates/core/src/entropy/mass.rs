//! Per-n log-masses `(1/n) log μ_n(C)` for batches of convex sets.
//!
//! Exact paths: successive convolution for atomic laws, type-class
//! enumeration for finite alphabets, normal tails for Gaussians on
//! intervals and half-spaces. Anything else goes through Monte Carlo with
//! optional exponential tilting.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use libm::erfc;

use crate::convex::{ConvexSet, Interval};
use crate::error::{check_dim, Error, Result};
use crate::extmath::{ExtReal, LogSumExp};
use crate::measures::{
    dot, AtomicMeasure, CramerSequence, DistributionSpec, FiniteAlphabet, Gaussian, Sampler,
    DEFAULT_SUPPORT_BUDGET,
};
use crate::pressure::pressure;

/// Monte Carlo settings for masses without an exact path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonteCarloSpec {
    pub samples: usize,
    pub seed: u64,
    /// Exponential tilt `θ`: draws come from `e^{⟨θ,x⟩ − p(θ)} μ(dx)` and
    /// are reweighted by `e^{−⟨θ, Σx_i⟩ + n p(θ)}`.
    #[serde(default)]
    pub tilt: Option<Vec<f64>>,
}

/// `(1/n) log μ_n(C)` with its provenance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogMass {
    pub value: ExtReal,
    /// Delta-method standard error of `value`; `None` for exact values.
    pub std_error: Option<f64>,
    /// A Monte Carlo run that saw no hits: `value` is `−∞` but only as an
    /// estimate, not an exact zero mass.
    pub censored: bool,
}

impl LogMass {
    pub fn exact(value: ExtReal) -> Self {
        LogMass {
            value,
            std_error: None,
            censored: false,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.std_error.is_none() && !self.censored
    }
}

/// Derives an independent seed for a named sub-computation: the first eight
/// bytes (little-endian) of `SHA-256(seed.to_le_bytes() ‖ label)`.
pub fn split_seed(seed: u64, label: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(label.as_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("eight bytes"))
}

/// `log P(Z > z)` for a standard normal `Z`, accurate far into the tail.
pub fn log_normal_tail(z: f64) -> f64 {
    if z == f64::INFINITY {
        return f64::NEG_INFINITY;
    }
    if z == f64::NEG_INFINITY {
        return 0.0;
    }
    if z < 0.0 {
        return (-(0.5 * erfc(-z / std::f64::consts::SQRT_2))).ln_1p();
    }
    if z < 30.0 {
        return (0.5 * erfc(z / std::f64::consts::SQRT_2)).ln();
    }
    // Mills-ratio series; the first omitted term is below 1e-12 here.
    let r = 1.0 / (z * z);
    let series = 1.0 - r * (1.0 - 3.0 * r * (1.0 - 5.0 * r * (1.0 - 7.0 * r * (1.0 - 9.0 * r))));
    -0.5 * z * z - (z * (2.0 * std::f64::consts::PI).sqrt()).ln() + series.ln()
}

/// `log P(Y ∈ I)` for `Y ~ N(mean, sd²)`.
pub fn log_normal_interval(mean: f64, sd: f64, iv: &Interval) -> f64 {
    if iv.is_empty() || iv.lo == iv.hi {
        return f64::NEG_INFINITY;
    }
    let a = (iv.lo - mean) / sd;
    let b = (iv.hi - mean) / sd;
    if a > 0.0 {
        // Both ends in the upper tail: Φ̄(a) − Φ̄(b).
        let (ta, tb) = (log_normal_tail(a), log_normal_tail(b));
        ta + (-(tb - ta).exp()).ln_1p()
    } else if b < 0.0 {
        let (ta, tb) = (log_normal_tail(-b), log_normal_tail(-a));
        ta + (-(tb - ta).exp()).ln_1p()
    } else {
        // Φ(b) − Φ(a) = 1 − Φ̄(b) − Φ̄(−a), both tails at most ½.
        let upper = log_normal_tail(b).exp();
        let lower = log_normal_tail(-a).exp();
        (-(upper + lower)).ln_1p()
    }
}

/// How one set is evaluated against atom clouds.
enum Probe<'a> {
    Interval(Interval),
    Set(&'a ConvexSet),
}

impl<'a> Probe<'a> {
    fn new(set: &'a ConvexSet, dim: usize) -> Result<Self> {
        if let Some(d) = set.dim() {
            check_dim(dim, d)?;
        }
        Ok(match set.as_interval() {
            Some(iv) => Probe::Interval(iv),
            None => Probe::Set(set),
        })
    }

    /// `log μ(C)` for an atom cloud. 1-d clouds must be sorted ascending.
    fn log_mass(&self, law: &AtomicMeasure) -> f64 {
        let mut acc = LogSumExp::new();
        match self {
            Probe::Interval(iv) if law.dim() == 1 => {
                if iv.is_empty() {
                    return f64::NEG_INFINITY;
                }
                let n = law.len();
                let below = |x: f64| if iv.lo_closed { x < iv.lo } else { x <= iv.lo };
                let (mut start, mut end) = (0, n);
                while start < end {
                    let mid = (start + end) / 2;
                    if below(law.point(mid)[0]) {
                        start = mid + 1;
                    } else {
                        end = mid;
                    }
                }
                for i in start..n {
                    let x = law.point(i)[0];
                    if !iv.contains(x) {
                        break;
                    }
                    acc.push(law.log_weight(i));
                }
            }
            Probe::Interval(iv) => {
                for (p, lw) in law.atoms() {
                    if iv.contains(p[0]) {
                        acc.push(lw);
                    }
                }
            }
            Probe::Set(set) => {
                for (p, lw) in law.atoms() {
                    if set.member(p, false) {
                        acc.push(lw);
                    }
                }
            }
        }
        acc.total().value()
    }
}

/// `(1/n) log μ_n(C)` for every set and every `n ≤ n_max`, indexed
/// `[set][n − 1]`.
pub fn log_mass_table(
    spec: &DistributionSpec,
    sets: &[ConvexSet],
    n_max: usize,
    mc: Option<&MonteCarloSpec>,
) -> Result<Vec<Vec<LogMass>>> {
    if n_max == 0 {
        return Err(Error::invalid("n_max must be at least 1"));
    }
    let dim = spec.dim();
    for s in sets {
        if let Some(d) = s.dim() {
            check_dim(dim, d)?;
        }
    }
    match spec {
        DistributionSpec::FiniteAlphabet(a) => alphabet_table(a, sets, n_max),
        DistributionSpec::Gaussian(_) | DistributionSpec::Product(_) => {
            if let Some(g) = spec.to_gaussian() {
                return gaussian_table(spec, &g, sets, n_max, mc);
            }
            match spec.to_atomic_with_budget(DEFAULT_SUPPORT_BUDGET)? {
                Some(m) => atomic_table(&m, sets, n_max),
                None => match mc {
                    Some(mc) => monte_carlo_table(spec, sets, n_max, mc),
                    None => Err(Error::NeedMonteCarlo),
                },
            }
        }
        DistributionSpec::Atomic(m) => atomic_table(m, sets, n_max),
    }
}

/// Single-set convenience over [`log_mass_table`].
pub fn log_mass(
    spec: &DistributionSpec,
    n: usize,
    set: &ConvexSet,
    mc: Option<&MonteCarloSpec>,
) -> Result<LogMass> {
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    if let DistributionSpec::Gaussian(_) | DistributionSpec::Product(_) = spec {
        if let Some(g) = spec.to_gaussian() {
            if let Some(v) = gaussian_exact(&g, set, n) {
                return Ok(LogMass::exact(ExtReal::of(v)));
            }
            return match mc {
                Some(mc) => Ok(monte_carlo_one(spec, std::slice::from_ref(set), n, mc)?[0]),
                None => Err(Error::NeedMonteCarlo),
            };
        }
    }
    if let DistributionSpec::FiniteAlphabet(a) = spec {
        return Ok(alphabet_table(a, std::slice::from_ref(set), n)?[0][n - 1]);
    }
    let table = log_mass_table(spec, std::slice::from_ref(set), n, mc)?;
    Ok(table[0][n - 1])
}

fn atomic_table(m: &AtomicMeasure, sets: &[ConvexSet], n_max: usize) -> Result<Vec<Vec<LogMass>>> {
    let probes = sets
        .iter()
        .map(|s| Probe::new(s, m.dim()))
        .collect::<Result<Vec<_>>>()?;
    let mut out = vec![Vec::with_capacity(n_max); sets.len()];
    let mut seq = CramerSequence::new(m);
    for n in 1..=n_max {
        let law = seq.step_mean()?;
        let inv = 1.0 / n as f64;
        for (row, probe) in out.iter_mut().zip(&probes) {
            let lm = probe.log_mass(&law);
            row.push(LogMass::exact(ExtReal::of(lm * inv)));
        }
    }
    Ok(out)
}

/// Exact Gaussian path: 1-d intervals, or half-spaces / the whole space.
fn gaussian_exact(g: &Gaussian, set: &ConvexSet, n: usize) -> Option<f64> {
    let k = n as f64;
    let lm = if let Some(iv) = set.as_interval() {
        if g.dim() != 1 {
            return None;
        }
        log_normal_interval(g.mean()[0], (g.var()[0] / k).sqrt(), &iv)
    } else {
        match set {
            ConvexSet::Space { .. } => 0.0,
            ConvexSet::HalfSpace { normal, offset, .. } => {
                // ⟨λ, Ȳ⟩ ~ N(⟨λ, m⟩, Σ λ_j² σ_j² / n); open or closed alike.
                let m = dot(normal, g.mean());
                let v: f64 = normal.iter().zip(g.var()).map(|(l, s)| l * l * s).sum::<f64>() / k;
                log_normal_tail((m - offset) / v.sqrt())
            }
            _ => return None,
        }
    };
    Some(lm / k)
}

fn gaussian_table(
    spec: &DistributionSpec,
    g: &Gaussian,
    sets: &[ConvexSet],
    n_max: usize,
    mc: Option<&MonteCarloSpec>,
) -> Result<Vec<Vec<LogMass>>> {
    let exact: Vec<bool> = sets.iter().map(|s| gaussian_exact(g, s, 1).is_some()).collect();
    if exact.iter().any(|e| !e) && mc.is_none() {
        return Err(Error::NeedMonteCarlo);
    }
    let inexact: Vec<ConvexSet> = sets
        .iter()
        .zip(&exact)
        .filter(|(_, e)| !**e)
        .map(|(s, _)| s.clone())
        .collect();
    let mut out = vec![Vec::with_capacity(n_max); sets.len()];
    for n in 1..=n_max {
        let mc_rows = match (inexact.is_empty(), mc) {
            (false, Some(mc)) => monte_carlo_one(spec, &inexact, n, mc)?,
            _ => Vec::new(),
        };
        let mut mc_iter = mc_rows.into_iter();
        for (row, (set, &is_exact)) in out.iter_mut().zip(sets.iter().zip(&exact)) {
            if is_exact {
                let v = gaussian_exact(g, set, n).expect("exact path");
                row.push(LogMass::exact(ExtReal::of(v)));
            } else {
                row.push(mc_iter.next().expect("one estimate per inexact set"));
            }
        }
    }
    Ok(out)
}

fn monte_carlo_table(
    spec: &DistributionSpec,
    sets: &[ConvexSet],
    n_max: usize,
    mc: &MonteCarloSpec,
) -> Result<Vec<Vec<LogMass>>> {
    let mut out = vec![Vec::with_capacity(n_max); sets.len()];
    for n in 1..=n_max {
        for (row, v) in out.iter_mut().zip(monte_carlo_one(spec, sets, n, mc)?) {
            row.push(v);
        }
    }
    Ok(out)
}

/// The law `e^{⟨θ,x⟩ − p(θ)} μ(dx)`, as a sampler.
fn tilted_sampler(spec: &DistributionSpec, theta: &[f64]) -> Result<Sampler> {
    Ok(match spec {
        DistributionSpec::Atomic(m) => Sampler::atomic(&m.tilted(theta)?),
        DistributionSpec::FiniteAlphabet(a) => Sampler::atomic(&a.to_atomic().tilted(theta)?),
        DistributionSpec::Gaussian(g) => {
            let mean = g
                .mean()
                .iter()
                .zip(g.var())
                .zip(theta)
                .map(|((m, v), t)| m + v * t)
                .collect();
            Sampler::gaussian(&Gaussian::new(mean, g.var().to_vec())?)
        }
        DistributionSpec::Product(parts) => Sampler::Product(
            parts
                .iter()
                .zip(theta)
                .map(|(p, t)| tilted_sampler(p, std::slice::from_ref(t)))
                .collect::<Result<_>>()?,
        ),
    })
}

fn monte_carlo_one(
    spec: &DistributionSpec,
    sets: &[ConvexSet],
    n: usize,
    mc: &MonteCarloSpec,
) -> Result<Vec<LogMass>> {
    if mc.samples == 0 {
        return Err(Error::invalid("Monte Carlo needs at least one sample"));
    }
    let dim = spec.dim();
    let (sampler, theta, log_norm) = match &mc.tilt {
        Some(theta) => {
            check_dim(dim, theta.len())?;
            let p = pressure(spec, theta)?.value();
            (tilted_sampler(spec, theta)?, Some(theta.clone()), n as f64 * p)
        }
        None => (Sampler::for_spec(spec), None, 0.0),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(split_seed(mc.seed, &format!("n={n}")));
    let mut first = vec![LogSumExp::new(); sets.len()];
    let mut second = vec![LogSumExp::new(); sets.len()];
    let mut draw = Vec::with_capacity(dim);
    let mut sum = vec![0.0; dim];
    let mut mean = vec![0.0; dim];
    for _ in 0..mc.samples {
        sum.iter_mut().for_each(|s| *s = 0.0);
        for _ in 0..n {
            draw.clear();
            sampler.draw_into(&mut rng, &mut draw);
            for (s, x) in sum.iter_mut().zip(&draw) {
                *s += x;
            }
        }
        for (m, s) in mean.iter_mut().zip(&sum) {
            *m = s / n as f64;
        }
        let log_w = match &theta {
            Some(t) => log_norm - dot(t, &sum),
            None => 0.0,
        };
        for (k, set) in sets.iter().enumerate() {
            if set.member(&mean, false) {
                first[k].push(log_w);
                second[k].push(2.0 * log_w);
            }
        }
    }
    let count = mc.samples as f64;
    Ok(first
        .iter()
        .zip(&second)
        .map(|(f, s)| {
            let log_m1 = f.total().value() - count.ln();
            if log_m1 == f64::NEG_INFINITY {
                return LogMass {
                    value: ExtReal::NEG_INF,
                    std_error: None,
                    censored: true,
                };
            }
            let log_m2 = s.total().value() - count.ln();
            // Var(ŵ) = (E w² − (E w)²)/N; relative error of the mass estimate.
            let rel_var = ((log_m2 - 2.0 * log_m1).exp() - 1.0).max(0.0) / count;
            LogMass {
                value: ExtReal::of(log_m1 / n as f64),
                std_error: Some(rel_var.sqrt() / n as f64),
                censored: false,
            }
        })
        .collect())
}

/// `ln k!` for `k ≤ n`.
fn log_factorials(n: usize) -> Vec<f64> {
    let mut t = Vec::with_capacity(n + 1);
    t.push(0.0);
    for k in 1..=n {
        t.push(t[k - 1] + (k as f64).ln());
    }
    t
}

/// Exact masses from multinomial type classes: `μ_n(C) = Σ_{c/n ∈ C}
/// n!/∏c_i! ∏ w_i^{c_i}`, enumerating only counts inside the bounding box of
/// `C` intersected with the simplex.
fn alphabet_table(a: &FiniteAlphabet, sets: &[ConvexSet], n_max: usize) -> Result<Vec<Vec<LogMass>>> {
    let k = a.letters();
    let log_w: Vec<f64> = a.weights().iter().map(|w| w.ln()).collect();
    let lf = log_factorials(n_max);
    let boxes: Vec<Vec<(f64, f64)>> = sets
        .iter()
        .map(|s| {
            s.bounding_box()
                .unwrap_or_else(|| vec![(f64::NEG_INFINITY, f64::INFINITY); k])
        })
        .collect();
    let mut out = vec![Vec::with_capacity(n_max); sets.len()];
    for n in 1..=n_max {
        let nf = n as f64;
        for ((row, set), bbox) in out.iter_mut().zip(sets).zip(&boxes) {
            let ranges: Option<Vec<(usize, usize)>> = bbox
                .iter()
                .map(|&(lo, hi)| {
                    let lo = (lo * nf - 1e-9).ceil().max(0.0);
                    let hi = (hi * nf + 1e-9).floor().min(nf);
                    (lo <= hi).then_some((lo as usize, hi as usize))
                })
                .collect();
            let Some(ranges) = ranges else {
                row.push(LogMass::exact(ExtReal::NEG_INF));
                continue;
            };
            // The last count is determined by the others.
            let required = ranges[..k - 1]
                .iter()
                .fold(1usize, |acc, (lo, hi)| acc.saturating_mul(hi - lo + 1));
            if required > DEFAULT_SUPPORT_BUDGET {
                return Err(Error::BudgetExceeded {
                    what: "type classes",
                    required,
                    budget: DEFAULT_SUPPORT_BUDGET,
                });
            }
            let mut acc = LogSumExp::new();
            let mut counts = vec![0usize; k];
            let mut point = vec![0.0; k];
            enumerate_counts(&ranges, n, 0, &mut counts, &mut |c| {
                for (p, &ci) in point.iter_mut().zip(c) {
                    *p = ci as f64 / nf;
                }
                if set.member(&point, false) {
                    let mut lp = lf[n];
                    for (&ci, lw) in c.iter().zip(&log_w) {
                        lp += ci as f64 * lw - lf[ci];
                    }
                    acc.push(lp);
                }
            });
            row.push(LogMass::exact(ExtReal::of(acc.total().value() / nf)));
        }
    }
    Ok(out)
}

/// Visits every `c` with `Σc = n` and `ranges[i].0 ≤ c_i ≤ ranges[i].1`.
fn enumerate_counts(
    ranges: &[(usize, usize)],
    remaining: usize,
    i: usize,
    counts: &mut Vec<usize>,
    visit: &mut impl FnMut(&[usize]),
) {
    let k = ranges.len();
    let (lo, hi) = ranges[i];
    if i + 1 == k {
        if remaining >= lo && remaining <= hi {
            counts[i] = remaining;
            visit(counts);
        }
        return;
    }
    // The other coordinates can absorb at most this much.
    let rest_max: usize = ranges[i + 1..].iter().map(|r| r.1).sum();
    let rest_min: usize = ranges[i + 1..].iter().map(|r| r.0).sum();
    if rest_min > remaining {
        return;
    }
    let from = lo.max(remaining.saturating_sub(rest_max));
    let to = hi.min(remaining - rest_min);
    for c in from..=to {
        counts[i] = c;
        enumerate_counts(ranges, remaining - c, i + 1, counts, visit);
    }
}
