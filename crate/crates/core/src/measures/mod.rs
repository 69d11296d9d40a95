//! Input laws and the exact laws of their empirical means.
//!
//! An [`AtomicMeasure`] keeps its weights in log-space so that the n-fold
//! convolution behind [`mean_law`] survives the tiny masses of large `n`.
//! The convolution runs on *sums* `X₁ + … + X_n` (whose coordinates stay
//! exact for lattice laws) and only divides by `n` when a mean law is
//! handed out.

mod hull;

pub use hull::{cosupport, SupportPolytope};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::extmath::LogSumExp;

/// Atoms whose coordinates agree within this absolute tolerance are merged.
pub const MERGE_TOL: f64 = 1e-9;

/// Largest support (before merging) a convolution step may produce.
pub const DEFAULT_SUPPORT_BUDGET: usize = 10_000_000;

/// A finitely supported probability on ℝ^d.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicMeasure {
    dim: usize,
    coords: Vec<f64>,
    log_weights: Vec<f64>,
}

impl AtomicMeasure {
    /// Builds a probability from `(point, weight)` pairs.
    ///
    /// Weights must be positive and sum to one within `1e-9`; they are then
    /// renormalised exactly. Coinciding points are merged.
    pub fn new(dim: usize, atoms: Vec<(Vec<f64>, f64)>) -> Result<Self> {
        let total: f64 = atoms.iter().map(|(_, w)| *w).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(format!("weights sum to {total}, not 1")));
        }
        Self::normalized(dim, atoms)
    }

    /// Like [`AtomicMeasure::new`] but accepts any positive total mass and
    /// rescales it to one.
    pub fn normalized(dim: usize, atoms: Vec<(Vec<f64>, f64)>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dimension must be positive"));
        }
        if atoms.is_empty() {
            return Err(Error::invalid("a measure needs at least one atom"));
        }
        let mut coords = Vec::with_capacity(dim * atoms.len());
        let mut log_weights = Vec::with_capacity(atoms.len());
        for (point, w) in atoms {
            check_dim(dim, point.len())?;
            if point.iter().any(|c| !c.is_finite()) {
                return Err(Error::invalid("atom coordinates must be finite"));
            }
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::invalid(format!("atom weight {w} is not positive")));
            }
            coords.extend_from_slice(&point);
            log_weights.push(w.ln());
        }
        Ok(Self::from_log_parts(dim, coords, log_weights))
    }

    /// The point mass at `point`.
    pub fn dirac(point: Vec<f64>) -> Result<Self> {
        let dim = point.len();
        Self::new(dim, vec![(point, 1.0)])
    }

    /// Merges, sorts and renormalises raw parts.
    fn from_log_parts(dim: usize, coords: Vec<f64>, log_weights: Vec<f64>) -> Self {
        let (coords, mut log_weights) = merge_atoms(dim, &coords, &log_weights);
        let mut acc = LogSumExp::new();
        for &lw in &log_weights {
            acc.push(lw);
        }
        let log_total = acc.total().value();
        if log_total != 0.0 {
            for lw in &mut log_weights {
                *lw -= log_total;
            }
        }
        AtomicMeasure {
            dim,
            coords,
            log_weights,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of atoms.
    pub fn len(&self) -> usize {
        self.log_weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_weights.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.log_weights[i].exp()
    }

    pub fn log_weight(&self, i: usize) -> f64 {
        self.log_weights[i]
    }

    pub fn log_weights(&self) -> &[f64] {
        &self.log_weights
    }

    /// Iterates `(point, log_weight)`.
    pub fn atoms(&self) -> impl Iterator<Item = (&[f64], f64)> + '_ {
        self.coords
            .chunks_exact(self.dim)
            .zip(self.log_weights.iter().copied())
    }

    pub fn mean(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.dim];
        for (p, lw) in self.atoms() {
            let w = lw.exp();
            for (mj, pj) in m.iter_mut().zip(p) {
                *mj += w * pj;
            }
        }
        m
    }

    pub fn total_mass(&self) -> f64 {
        self.log_weights.iter().map(|lw| lw.exp()).sum()
    }

    /// Product measure of 1-d factors, one coordinate per factor.
    pub fn tensor(factors: &[AtomicMeasure], budget: usize) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::invalid("empty product"));
        }
        let required = factors.iter().try_fold(1usize, |acc, f| acc.checked_mul(f.len()));
        match required {
            Some(r) if r <= budget => {}
            other => {
                return Err(Error::BudgetExceeded {
                    what: "product measure",
                    required: other.unwrap_or(usize::MAX),
                    budget,
                })
            }
        }
        let mut coords: Vec<f64> = Vec::new();
        let mut log_weights = vec![0.0];
        let mut dim = 0;
        for f in factors {
            check_dim(1, f.dim)?;
            let mut next_c = Vec::with_capacity((dim + 1) * log_weights.len() * f.len());
            let mut next_w = Vec::with_capacity(log_weights.len() * f.len());
            for (i, &lw) in log_weights.iter().enumerate() {
                for (p, flw) in f.atoms() {
                    next_c.extend_from_slice(&coords[i * dim..(i + 1) * dim]);
                    next_c.push(p[0]);
                    next_w.push(lw + flw);
                }
            }
            coords = next_c;
            log_weights = next_w;
            dim += 1;
        }
        Ok(Self::from_log_parts(dim, coords, log_weights))
    }

    /// The law of `⟨θ, X⟩`-tilted draws: weights `w_i e^{⟨θ,x_i⟩ - p(θ)}`.
    pub fn tilted(&self, theta: &[f64]) -> Result<Self> {
        check_dim(self.dim, theta.len())?;
        let lw: Vec<f64> = self
            .atoms()
            .map(|(p, lw)| lw + dot(theta, p))
            .collect();
        Ok(Self::from_log_parts(self.dim, self.coords.clone(), lw))
    }
}

/// Sort-and-sweep merge of atoms whose quantised coordinates agree.
///
/// The output is sorted lexicographically by quantised coordinates and the
/// first atom of each run (in input order) supplies the coordinates.
fn merge_atoms(dim: usize, coords: &[f64], log_weights: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let len = log_weights.len();
    let keys: Vec<i64> = coords.iter().map(|&c| quantize(c)).collect();
    let mut order: Vec<usize> = (0..len).collect();
    order.sort_by(|&a, &b| keys[a * dim..(a + 1) * dim].cmp(&keys[b * dim..(b + 1) * dim]));

    let mut out_c = Vec::with_capacity(coords.len());
    let mut out_w = Vec::with_capacity(len);
    let mut i = 0;
    while i < len {
        let head = order[i];
        let key = &keys[head * dim..(head + 1) * dim];
        let mut acc = LogSumExp::new();
        let mut j = i;
        while j < len && &keys[order[j] * dim..(order[j] + 1) * dim] == key {
            acc.push(log_weights[order[j]]);
            j += 1;
        }
        let lw = acc.total().value();
        if lw > f64::NEG_INFINITY {
            out_c.extend_from_slice(&coords[head * dim..(head + 1) * dim]);
            out_w.push(lw);
        }
        i = j;
    }
    (out_c, out_w)
}

#[inline]
fn quantize(c: f64) -> i64 {
    (c / MERGE_TOL).round() as i64
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Iterates the laws of `X₁ + … + X_n` for `n = 1, 2, …` by successive
/// convolution with the base measure.
#[derive(Debug, Clone)]
pub struct CramerSequence<'a> {
    base: &'a AtomicMeasure,
    sum: Option<AtomicMeasure>,
    n: usize,
    budget: usize,
}

impl<'a> CramerSequence<'a> {
    pub fn new(base: &'a AtomicMeasure) -> Self {
        Self::with_budget(base, DEFAULT_SUPPORT_BUDGET)
    }

    pub fn with_budget(base: &'a AtomicMeasure, budget: usize) -> Self {
        CramerSequence {
            base,
            sum: None,
            n: 0,
            budget,
        }
    }

    /// Index of the most recently produced law (0 before the first step).
    pub fn n(&self) -> usize {
        self.n
    }

    /// Advances to the law of the next partial sum and returns it.
    pub fn step(&mut self) -> Result<&AtomicMeasure> {
        let next = match self.sum.take() {
            None => self.base.clone(),
            Some(prev) => {
                let required = prev.len().saturating_mul(self.base.len());
                if required > self.budget {
                    self.sum = Some(prev);
                    return Err(Error::BudgetExceeded {
                        what: "convolution",
                        required,
                        budget: self.budget,
                    });
                }
                convolve(&prev, self.base)
            }
        };
        self.n += 1;
        Ok(self.sum.insert(next))
    }

    /// Advances and returns the law of the empirical mean at the new `n`.
    pub fn step_mean(&mut self) -> Result<AtomicMeasure> {
        self.step()?;
        Ok(self.current_mean().expect("stepped"))
    }

    /// The law of the current partial sum.
    pub fn current_sum(&self) -> Option<&AtomicMeasure> {
        self.sum.as_ref()
    }

    /// The law of the current empirical mean.
    pub fn current_mean(&self) -> Option<AtomicMeasure> {
        let sum = self.sum.as_ref()?;
        let inv = self.n as f64;
        Some(AtomicMeasure {
            dim: sum.dim,
            coords: sum.coords.iter().map(|c| c / inv).collect(),
            log_weights: sum.log_weights.clone(),
        })
    }
}

fn convolve(a: &AtomicMeasure, b: &AtomicMeasure) -> AtomicMeasure {
    let dim = a.dim;
    let mut coords = Vec::with_capacity(a.len() * b.len() * dim);
    let mut lw = Vec::with_capacity(a.len() * b.len());
    for (p, pw) in a.atoms() {
        for (q, qw) in b.atoms() {
            coords.extend(p.iter().zip(q).map(|(x, y)| x + y));
            lw.push(pw + qw);
        }
    }
    AtomicMeasure::from_log_parts(dim, coords, lw)
}

/// Exact law of `(X₁ + … + X_n)/n` for i.i.d. `X_k ~ mu`.
pub fn mean_law(mu: &AtomicMeasure, n: usize) -> Result<AtomicMeasure> {
    mean_law_with_budget(mu, n, DEFAULT_SUPPORT_BUDGET)
}

pub fn mean_law_with_budget(mu: &AtomicMeasure, n: usize, budget: usize) -> Result<AtomicMeasure> {
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    let mut seq = CramerSequence::with_budget(mu, budget);
    for _ in 0..n {
        seq.step()?;
    }
    Ok(seq.current_mean().expect("n >= 1"))
}

/// Atom points of `mu`.
pub fn support(mu: &AtomicMeasure) -> Vec<Vec<f64>> {
    mu.atoms().map(|(p, _)| p.to_vec()).collect()
}

/// `supp(μ_n)`: the atom points of the mean law.
pub fn cramer_support(mu: &AtomicMeasure, n: usize) -> Result<Vec<Vec<f64>>> {
    Ok(support(&mean_law(mu, n)?))
}

/// A Gaussian with diagonal covariance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Gaussian {
    mean: Vec<f64>,
    var: Vec<f64>,
}

impl Gaussian {
    pub fn new(mean: Vec<f64>, var: Vec<f64>) -> Result<Self> {
        check_dim(mean.len(), var.len())?;
        if mean.is_empty() {
            return Err(Error::invalid("dimension must be positive"));
        }
        if mean.iter().any(|m| !m.is_finite()) {
            return Err(Error::invalid("Gaussian mean must be finite"));
        }
        if var.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(Error::invalid("Gaussian variances must be positive"));
        }
        Ok(Gaussian { mean, var })
    }

    pub fn standard(dim: usize) -> Self {
        Gaussian {
            mean: vec![0.0; dim],
            var: vec![1.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn var(&self) -> &[f64] {
        &self.var
    }
}

/// Law of the mean of `n` i.i.d. copies: `N(m, Σ/n)`.
pub fn gaussian_mean_law(g: &Gaussian, n: usize) -> Result<Gaussian> {
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    let k = n as f64;
    Ok(Gaussian {
        mean: g.mean.clone(),
        var: g.var.iter().map(|v| v / k).collect(),
    })
}

/// Categorical law on `k` letters, embedded on the standard basis of ℝ^k.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FiniteAlphabet {
    weights: Vec<f64>,
}

impl FiniteAlphabet {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.len() < 2 {
            return Err(Error::invalid("an alphabet needs at least two letters"));
        }
        if weights.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
            return Err(Error::invalid("alphabet weights must be positive"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(format!("alphabet weights sum to {total}, not 1")));
        }
        Ok(FiniteAlphabet {
            weights: weights.iter().map(|w| w / total).collect(),
        })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn letters(&self) -> usize {
        self.weights.len()
    }

    pub fn to_atomic(&self) -> AtomicMeasure {
        let k = self.weights.len();
        let atoms = self
            .weights
            .iter()
            .enumerate()
            .map(|(i, &w)| {
                let mut e = vec![0.0; k];
                e[i] = 1.0;
                (e, w)
            })
            .collect();
        AtomicMeasure::normalized(k, atoms).expect("validated alphabet")
    }
}

/// Declarative description of an input law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub enum DistributionSpec {
    Atomic(AtomicMeasure),
    Gaussian(Gaussian),
    /// Independent 1-d components, one coordinate each.
    Product(Vec<DistributionSpec>),
    FiniteAlphabet(FiniteAlphabet),
}

impl DistributionSpec {
    pub fn dim(&self) -> usize {
        match self {
            DistributionSpec::Atomic(m) => m.dim(),
            DistributionSpec::Gaussian(g) => g.dim(),
            DistributionSpec::Product(c) => c.len(),
            DistributionSpec::FiniteAlphabet(a) => a.letters(),
        }
    }

    pub fn bernoulli(p: f64) -> Result<Self> {
        Ok(DistributionSpec::Atomic(AtomicMeasure::new(
            1,
            vec![(vec![0.0], 1.0 - p), (vec![1.0], p)],
        )?))
    }

    /// `½δ₋₁ + ½δ₁`.
    pub fn rademacher() -> Self {
        DistributionSpec::Atomic(
            AtomicMeasure::new(1, vec![(vec![-1.0], 0.5), (vec![1.0], 0.5)]).expect("valid"),
        )
    }

    /// The atomic form of the law, when it has one.
    pub fn to_atomic(&self) -> Option<AtomicMeasure> {
        self.to_atomic_with_budget(DEFAULT_SUPPORT_BUDGET).ok().flatten()
    }

    pub fn to_atomic_with_budget(&self, budget: usize) -> Result<Option<AtomicMeasure>> {
        match self {
            DistributionSpec::Atomic(m) => Ok(Some(m.clone())),
            DistributionSpec::FiniteAlphabet(a) => Ok(Some(a.to_atomic())),
            DistributionSpec::Gaussian(_) => Ok(None),
            DistributionSpec::Product(parts) => {
                let mut factors = Vec::with_capacity(parts.len());
                for p in parts {
                    match p.to_atomic_with_budget(budget)? {
                        Some(m) => factors.push(m),
                        None => return Ok(None),
                    }
                }
                AtomicMeasure::tensor(&factors, budget).map(Some)
            }
        }
    }

    /// The Gaussian form of the law, when it has one.
    pub fn to_gaussian(&self) -> Option<Gaussian> {
        match self {
            DistributionSpec::Gaussian(g) => Some(g.clone()),
            DistributionSpec::Product(parts) => {
                let mut mean = Vec::with_capacity(parts.len());
                let mut var = Vec::with_capacity(parts.len());
                for p in parts {
                    let g = p.to_gaussian()?;
                    mean.extend_from_slice(&g.mean);
                    var.extend_from_slice(&g.var);
                }
                Some(Gaussian { mean, var })
            }
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
enum RawSpec {
    Atomic { atoms: Vec<RawAtom> },
    Gaussian { mean: Vec<f64>, var: Vec<f64> },
    Product { components: Vec<RawSpec> },
    Alphabet { weights: Vec<f64> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAtom {
    point: Vec<f64>,
    weight: f64,
}

impl TryFrom<RawSpec> for DistributionSpec {
    type Error = Error;

    fn try_from(raw: RawSpec) -> Result<Self> {
        match raw {
            RawSpec::Atomic { atoms } => {
                let dim = atoms.first().map(|a| a.point.len()).unwrap_or(0);
                let atoms = atoms.into_iter().map(|a| (a.point, a.weight)).collect();
                Ok(DistributionSpec::Atomic(AtomicMeasure::new(dim, atoms)?))
            }
            RawSpec::Gaussian { mean, var } => {
                Ok(DistributionSpec::Gaussian(Gaussian::new(mean, var)?))
            }
            RawSpec::Product { components } => {
                if components.is_empty() {
                    return Err(Error::invalid("a product needs components"));
                }
                let parts = components
                    .into_iter()
                    .map(DistributionSpec::try_from)
                    .collect::<Result<Vec<_>>>()?;
                for p in &parts {
                    check_dim(1, p.dim())?;
                }
                Ok(DistributionSpec::Product(parts))
            }
            RawSpec::Alphabet { weights } => {
                Ok(DistributionSpec::FiniteAlphabet(FiniteAlphabet::new(weights)?))
            }
        }
    }
}

impl From<DistributionSpec> for RawSpec {
    fn from(spec: DistributionSpec) -> Self {
        match spec {
            DistributionSpec::Atomic(m) => RawSpec::Atomic {
                atoms: m
                    .atoms()
                    .map(|(p, lw)| RawAtom {
                        point: p.to_vec(),
                        weight: lw.exp(),
                    })
                    .collect(),
            },
            DistributionSpec::Gaussian(g) => RawSpec::Gaussian {
                mean: g.mean,
                var: g.var,
            },
            DistributionSpec::Product(parts) => RawSpec::Product {
                components: parts.into_iter().map(RawSpec::from).collect(),
            },
            DistributionSpec::FiniteAlphabet(a) => RawSpec::Alphabet { weights: a.weights },
        }
    }
}

/// A sampler for one law, owning nothing but precomputed tables.
#[derive(Debug, Clone)]
pub(crate) enum Sampler {
    Atomic {
        dim: usize,
        coords: Vec<f64>,
        cumulative: Vec<f64>,
    },
    Gaussian {
        mean: Vec<f64>,
        sd: Vec<f64>,
    },
    Product(Vec<Sampler>),
}

impl Sampler {
    pub(crate) fn for_spec(spec: &DistributionSpec) -> Sampler {
        match spec {
            DistributionSpec::Atomic(m) => Sampler::atomic(m),
            DistributionSpec::FiniteAlphabet(a) => Sampler::atomic(&a.to_atomic()),
            DistributionSpec::Gaussian(g) => Sampler::gaussian(g),
            DistributionSpec::Product(parts) => {
                Sampler::Product(parts.iter().map(Sampler::for_spec).collect())
            }
        }
    }

    pub(crate) fn atomic(m: &AtomicMeasure) -> Sampler {
        let mut run = 0.0;
        let cumulative = m
            .log_weights
            .iter()
            .map(|lw| {
                run += lw.exp();
                run
            })
            .collect();
        Sampler::Atomic {
            dim: m.dim,
            coords: m.coords.clone(),
            cumulative,
        }
    }

    pub(crate) fn gaussian(g: &Gaussian) -> Sampler {
        Sampler::Gaussian {
            mean: g.mean.clone(),
            sd: g.var.iter().map(|v| v.sqrt()).collect(),
        }
    }

    /// Appends one draw to `out`.
    pub(crate) fn draw_into<R: Rng>(&self, rng: &mut R, out: &mut Vec<f64>) {
        match self {
            Sampler::Atomic {
                dim,
                coords,
                cumulative,
            } => {
                let total = *cumulative.last().expect("non-empty");
                let u: f64 = rng.random::<f64>() * total;
                let i = cumulative
                    .partition_point(|&c| c <= u)
                    .min(cumulative.len() - 1);
                out.extend_from_slice(&coords[i * dim..(i + 1) * dim]);
            }
            Sampler::Gaussian { mean, sd } => {
                for (m, s) in mean.iter().zip(sd) {
                    let z: f64 = rng.sample(StandardNormal);
                    out.push(m + s * z);
                }
            }
            Sampler::Product(parts) => {
                for p in parts {
                    p.draw_into(rng, out);
                }
            }
        }
    }
}

/// `count` i.i.d. draws from `spec`, reproducible from `seed`.
pub fn sample(spec: &DistributionSpec, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let sampler = Sampler::for_spec(spec);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = spec.dim();
    (0..count)
        .map(|_| {
            let mut v = Vec::with_capacity(dim);
            sampler.draw_into(&mut rng, &mut v);
            v
        })
        .collect()
}
