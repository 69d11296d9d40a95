//! Numerical checks of the identities and inequalities of the theory.
//!
//! Every check returns a [`CheckReport`] whose `passed` flag is recomputable
//! from its `details` alone: a case passes iff `margin ≤ tolerance`.

mod suite;

pub use suite::{run_suite, SuiteConfig, CHECK_NAMES};

use serde::Serialize;
use serde_json::{json, Value};

use crate::convex::{ConvexSet, Norm};
use crate::entropy::{decay_analysis, entropy_table, log_mass_table, varadhan_sequence, TestFunction};
use crate::error::{check_dim, Error, Result};
use crate::extmath::{add_lower, add_upper, ExtReal};
use crate::grid::{GridFunction, GridSpec};
use crate::legendre::{biconjugate, is_midpoint_convex, rate_function};
use crate::measures::{cosupport, dot, DistributionSpec, FiniteAlphabet, Gaussian, SupportPolytope};
use crate::pressure::pressure;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Case {
    pub label: String,
    pub witness: Value,
    pub lhs: ExtReal,
    pub rhs: ExtReal,
    pub margin: ExtReal,
    pub tolerance: f64,
}

impl Case {
    pub fn passes(&self) -> bool {
        self.margin.value() <= self.tolerance
    }

    fn slack(&self) -> f64 {
        self.margin.value() - self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub check_name: String,
    pub passed: bool,
    /// Tolerance of the worst case.
    pub tolerance: f64,
    pub worst_margin: ExtReal,
    pub worst_witness: Value,
    pub details: Vec<Case>,
}

impl CheckReport {
    /// The worst case is the one with the largest `margin − tolerance`
    /// (the first one on ties). An empty table passes vacuously.
    pub fn from_cases(name: &str, details: Vec<Case>) -> Self {
        let worst = details
            .iter()
            .fold(None::<&Case>, |best, c| match best {
                Some(b) if b.slack() >= c.slack() => Some(b),
                _ => Some(c),
            })
            .cloned();
        let (tolerance, worst_margin, worst_witness) = match worst {
            Some(c) => (c.tolerance, c.margin, c.witness),
            None => (0.0, ExtReal::NEG_INF, Value::Null),
        };
        CheckReport {
            check_name: name.to_string(),
            passed: worst_margin.value() <= tolerance,
            tolerance,
            worst_margin,
            worst_witness,
            details,
        }
    }

    /// Recomputes `passed` from the details table.
    pub fn recomputed_passed(&self) -> bool {
        self.details.iter().all(Case::passes)
    }
}

/// `lhs − rhs` as an amount of violation of `lhs ≤ rhs`.
pub fn excess(lhs: ExtReal, rhs: ExtReal) -> ExtReal {
    if lhs.is_neg_inf() || rhs.is_pos_inf() {
        ExtReal::NEG_INF
    } else if lhs.is_pos_inf() || rhs.is_neg_inf() {
        ExtReal::POS_INF
    } else {
        ExtReal::of(lhs.value() - rhs.value())
    }
}

/// `|a − b|`, zero when both are the same infinity.
pub fn abs_gap(a: ExtReal, b: ExtReal) -> ExtReal {
    if a == b {
        ExtReal::ZERO
    } else {
        ExtReal::of((a.value() - b.value()).abs())
    }
}

fn case(label: impl Into<String>, witness: Value, lhs: ExtReal, rhs: ExtReal, margin: ExtReal, tolerance: f64) -> Case {
    Case {
        label: label.into(),
        witness,
        lhs,
        rhs,
        margin,
        tolerance,
    }
}

/// `cosupp(μ)`: a polytope for atomic laws, everything for Gaussians.
enum Cosupport {
    Whole,
    Polytope(SupportPolytope),
}

impl Cosupport {
    fn of(spec: &DistributionSpec) -> Result<Self> {
        if spec.to_gaussian().is_some() {
            return Ok(Cosupport::Whole);
        }
        match spec.to_atomic() {
            Some(m) => Ok(Cosupport::Polytope(cosupport(&m)?)),
            None => Err(Error::invalid("cosupport needs an atomic or Gaussian law")),
        }
    }

    /// Signed distance to the boundary, positive inside.
    fn depth(&self, x: &[f64]) -> f64 {
        match self {
            Cosupport::Whole => f64::INFINITY,
            Cosupport::Polytope(p) => p.depth(x),
        }
    }
}

/// Lattice points at least one grid step inside the cosupport.
fn deep_points(spec: &DistributionSpec, primal: &GridSpec) -> Result<Vec<(usize, Vec<f64>)>> {
    let cs = Cosupport::of(spec)?;
    let step = primal.max_step();
    Ok(primal
        .points()
        .enumerate()
        .filter(|(_, x)| cs.depth(x) >= step - 1e-12)
        .collect())
}

/// Entropy estimates against `s = −p*` on the lattice points deep inside the
/// cosupport; margin `|estimate − s(x)|`.
pub fn check_duality(
    spec: &DistributionSpec,
    primal: &GridSpec,
    dual: &GridSpec,
    n_max: usize,
    radii: &[f64],
    tol: f64,
) -> Result<CheckReport> {
    let s = rate_function(spec, primal, dual)?;
    let pts = deep_points(spec, primal)?;
    if pts.is_empty() {
        return Err(Error::invalid("no lattice point lies inside the cosupport"));
    }
    let xs: Vec<Vec<f64>> = pts.iter().map(|(_, x)| x.clone()).collect();
    let est = entropy_table(spec, &xs, radii, n_max, Norm::L2, None)?;
    let cases = pts
        .iter()
        .zip(est)
        .map(|((i, x), e)| {
            let rhs = s.get(*i);
            case("x", json!(x), e.estimate, rhs, abs_gap(e.estimate, rhs), tol)
        })
        .collect();
    Ok(CheckReport::from_cases("duality", cases))
}

/// `p(λ) − s(x) ≥ ⟨λ, x⟩` with `s` from the discrete transform over `dual`.
/// One case per `λ`, witnessed by its worst `x`.
pub fn check_young(
    spec: &DistributionSpec,
    lambdas: &GridSpec,
    primal: &GridSpec,
    dual: &GridSpec,
) -> Result<CheckReport> {
    const TOL: f64 = 1e-6;
    check_dim(spec.dim(), lambdas.dim())?;
    let s = rate_function(spec, primal, dual)?;
    let mut cases = Vec::with_capacity(lambdas.len());
    for lambda in lambdas.points() {
        let p = pressure(spec, &lambda)?;
        let mut worst: Option<(Vec<f64>, ExtReal, ExtReal, ExtReal)> = None;
        for (i, x) in primal.points().enumerate() {
            let lhs = add_upper(ExtReal::of(dot(&lambda, &x)), s.get(i));
            let margin = excess(lhs, p);
            if worst.as_ref().is_none_or(|w| margin > w.3) {
                worst = Some((x, lhs, p, margin));
            }
        }
        let (x, lhs, rhs, margin) = worst.expect("non-empty grid");
        cases.push(case(
            "⟨λ,x⟩ + s(x) ≤ p(λ)",
            json!({ "lambda": lambda, "x": x }),
            lhs,
            rhs,
            margin,
            TOL,
        ));
    }
    Ok(CheckReport::from_cases("young", cases))
}

/// `(1/n) log μ_n(H) ≤ p(λ) − ⟨λ, x⟩ + ε` for `H = {⟨λ, y⟩ > ⟨λ, x⟩ − ε}`.
pub fn check_chebyshev(spec: &DistributionSpec, lambda: &[f64], x: &[f64], eps: f64, n_max: usize) -> Result<CheckReport> {
    const TOL: f64 = 1e-9;
    check_dim(spec.dim(), lambda.len())?;
    check_dim(spec.dim(), x.len())?;
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::invalid("eps must be positive"));
    }
    let level = dot(lambda, x) - eps;
    let h = if lambda.iter().all(|l| *l == 0.0) {
        ConvexSet::space(lambda.len())
    } else {
        ConvexSet::halfspace(lambda.iter().map(|l| -l).collect(), -level, true)?
    };
    let bound = ExtReal::of(pressure(spec, lambda)?.value() - dot(lambda, x) + eps);
    let row = log_mass_table(spec, std::slice::from_ref(&h), n_max, None)?.remove(0);
    let cases = row
        .iter()
        .enumerate()
        .map(|(i, m)| case("n", json!(i + 1), m.value, bound, excess(m.value, bound), TOL))
        .collect();
    Ok(CheckReport::from_cases("chebyshev", cases))
}

/// `p(λ) = sup_x (⟨λ, x⟩ + s(x))` with the sup over the primal lattice.
pub fn check_pressure_recovery(
    spec: &DistributionSpec,
    lambdas: &[Vec<f64>],
    primal: &GridSpec,
    dual: &GridSpec,
    tol: f64,
) -> Result<CheckReport> {
    let s = rate_function(spec, primal, dual)?;
    let mut cases = Vec::with_capacity(lambdas.len());
    for lambda in lambdas {
        let p = pressure(spec, lambda)?;
        let mut best = ExtReal::NEG_INF;
        for (i, x) in primal.points().enumerate() {
            best = best.max(add_lower(ExtReal::of(dot(lambda, &x)), s.get(i)));
        }
        cases.push(case("lambda", json!(lambda), p, best, abs_gap(p, best), tol));
    }
    Ok(CheckReport::from_cases("pressure_recovery", cases))
}

/// Lattice sup of `g` over `C̄ ∩ primal`.
fn lattice_sup_over(g: &GridFunction, set: &ConvexSet) -> ExtReal {
    g.sup_where(|x| set.member(x, true))
}

/// Some lattice point is interior to both `C` and the cosupport.
fn interiors_meet(cs: &Cosupport, set: &ConvexSet, primal: &GridSpec) -> Result<bool> {
    for x in primal.points() {
        if cs.depth(&x) > 0.0 && set.member(&x, false) && set.is_internal_point(&x)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// `(1/n) log μ_n(C) ≤ sup_{C̄} s` for every `n ≤ n_max`, with lattice
/// slack 0.02; when the interiors of `C` and the cosupport meet, the value at
/// the largest multiple of `k_C` must also be within 0.05 of the bound.
pub fn check_convex_upper_bound(
    spec: &DistributionSpec,
    sets: &[ConvexSet],
    n_max: usize,
    primal: &GridSpec,
    dual: &GridSpec,
) -> Result<CheckReport> {
    const BOUND_TOL: f64 = 0.02;
    const LIMIT_TOL: f64 = 0.05;
    let s = rate_function(spec, primal, dual)?;
    let cs = Cosupport::of(spec)?;
    let mut cases = Vec::new();
    for (k, set) in sets.iter().enumerate() {
        let bound = lattice_sup_over(&s, set);
        let report = decay_analysis(spec, set, n_max)?;
        for (n, v) in &report.per_n {
            cases.push(case(
                "bound",
                json!({ "set": k, "n": n }),
                *v,
                bound,
                excess(*v, bound),
                BOUND_TOL,
            ));
        }
        if let Some(kc) = report.k_c {
            if interiors_meet(&cs, set, primal)? {
                let n = n_max / kc * kc;
                let v = report.per_n[n - 1].1;
                cases.push(case(
                    "limit",
                    json!({ "set": k, "n": n, "k_C": kc }),
                    v,
                    bound,
                    abs_gap(v, bound),
                    LIMIT_TOL,
                ));
            }
        }
    }
    Ok(CheckReport::from_cases("convex_upper_bound", cases))
}

/// Lattice points a step inside the cosupport have finite entropy at the
/// largest radius; points outside its closure have zero mass at some radius
/// for every `n ≤ n_max`.
pub fn check_dom_cosupp(spec: &DistributionSpec, primal: &GridSpec, n_max: usize, radii: &[f64]) -> Result<CheckReport> {
    let cs = Cosupport::of(spec)?;
    let step = primal.max_step();
    let mut inside = Vec::new();
    let mut outside = Vec::new();
    for x in primal.points() {
        let d = cs.depth(&x);
        if d >= step - 1e-12 {
            inside.push(x);
        } else if d < -1e-12 {
            outside.push(x);
        }
    }
    let mut cases = Vec::new();
    for e in entropy_table(spec, &inside, radii, n_max, Norm::L2, None)? {
        let v = e.table[0].sup;
        // Pass (margin −1) when finite, fail (margin +1) otherwise.
        let margin = if v.is_finite() { -1.0 } else { 1.0 };
        cases.push(case("inside", json!(e.point), v, ExtReal::NEG_INF, ExtReal::of(margin), 0.0));
    }
    for e in entropy_table(spec, &outside, radii, n_max, Norm::L2, None)? {
        let exact_zero = e.table.iter().any(|r| r.sup.is_neg_inf() && !r.censored);
        let margin = if exact_zero { -1.0 } else { 1.0 };
        cases.push(case("outside", json!(e.point), e.estimate, ExtReal::NEG_INF, ExtReal::of(margin), 0.0));
    }
    Ok(CheckReport::from_cases("dom_cosupp", cases))
}

/// Varadhan bounds for a concave admissible `f`: every
/// `(1/n) log E e^{n f(X̄_n)}` is at most the lattice sup of `f +̇ s`
/// (upper addition), and the value at the largest `n` with a finite value is
/// within 0.05 of the lattice sup of `f ∔ s` (lower addition).
pub fn check_varadhan(
    spec: &DistributionSpec,
    f: &TestFunction,
    n_max: usize,
    primal: &GridSpec,
    dual: &GridSpec,
) -> Result<CheckReport> {
    const UPPER_TOL: f64 = 0.02;
    const LOWER_TOL: f64 = 0.05;
    let s = rate_function(spec, primal, dual)?;
    let mut upper = ExtReal::NEG_INF;
    let mut lower = ExtReal::NEG_INF;
    for (i, x) in primal.points().enumerate() {
        let fx = f.eval(&x);
        upper = upper.max(add_upper(fx, s.get(i)));
        lower = lower.max(add_lower(fx, s.get(i)));
    }
    let values = varadhan_sequence(spec, f, n_max)?;
    let mut cases: Vec<Case> = values
        .iter()
        .enumerate()
        .map(|(i, v)| case("upper", json!(i + 1), *v, upper, excess(*v, upper), UPPER_TOL))
        .collect();
    if let Some(i) = values.iter().rposition(|v| v.is_finite()) {
        cases.push(case("lower", json!(i + 1), values[i], lower, abs_gap(values[i], lower), LOWER_TOL));
    }
    Ok(CheckReport::from_cases("varadhan", cases))
}

/// For each sample: `f** ≤ f + 1e-9`; if `f` is midpoint convex,
/// `max|f** − f| ≤ tol`; otherwise `f − f** > 10·tol` somewhere.
pub fn check_biconjugation(samples: &[(String, GridFunction)], dual: &GridSpec, tol: f64) -> Result<CheckReport> {
    const BELOW_TOL: f64 = 1e-9;
    let mut cases = Vec::new();
    for (name, f) in samples {
        let g = biconjugate(f, dual)?;
        let mut above = (ExtReal::NEG_INF, 0usize);
        let mut below = (ExtReal::NEG_INF, 0usize);
        for (i, (fv, gv)) in f.values().iter().zip(g.values()).enumerate() {
            let a = excess(*gv, *fv);
            if a > above.0 {
                above = (a, i);
            }
            let b = excess(*fv, *gv);
            if b > below.0 {
                below = (b, i);
            }
        }
        let at = |i: usize| json!({ "sample": name, "x": f.grid().point(i) });
        cases.push(case("f** ≤ f", at(above.1), g.get(above.1), f.get(above.1), above.0, BELOW_TOL));
        if is_midpoint_convex(f, 1e-12) {
            let gap = above.0.max(below.0);
            let i = if above.0 >= below.0 { above.1 } else { below.1 };
            cases.push(case("convex: f** = f", at(i), g.get(i), f.get(i), gap, tol));
        } else {
            // Margin 10·tol − max(f − f**): passes when the gap is wide.
            let margin = match below.0 {
                v if v.is_pos_inf() => ExtReal::NEG_INF,
                v if v.is_neg_inf() => ExtReal::POS_INF,
                v => ExtReal::of(10.0 * tol - v.value()),
            };
            cases.push(case("non-convex: f** < f", at(below.1), g.get(below.1), f.get(below.1), margin, 0.0));
        }
    }
    Ok(CheckReport::from_cases("biconjugation", cases))
}

/// `D(ν ‖ μ) = Σ ν_i log(ν_i / μ_i)`.
pub fn relative_entropy(nu: &[f64], mu: &[f64]) -> f64 {
    nu.iter()
        .zip(mu)
        .filter(|(v, _)| **v > 0.0)
        .map(|(v, m)| v * (v / m).ln())
        .sum()
}

/// The types `c / m` with every `c_i ≥ 1` when `interior`.
pub fn type_grid(letters: usize, m: usize, interior: bool) -> Vec<Vec<f64>> {
    let lo = usize::from(interior);
    let mut out = Vec::new();
    let mut counts = vec![0usize; letters];
    fn rec(i: usize, left: usize, lo: usize, m: usize, counts: &mut Vec<usize>, out: &mut Vec<Vec<f64>>) {
        let k = counts.len();
        if i + 1 == k {
            if left >= lo {
                counts[i] = left;
                out.push(counts.iter().map(|&c| c as f64 / m as f64).collect());
            }
            return;
        }
        for c in lo..=left {
            counts[i] = c;
            rec(i + 1, left - c, lo, m, counts, out);
        }
    }
    if letters > 0 {
        rec(0, m, lo, m, &mut counts, &mut out);
    }
    out
}

/// Entropy estimates on type-class balls (sup-norm radius `radius`) against
/// `−D(ν ‖ μ)`.
pub fn check_sanov(weights: &[f64], types: &[Vec<f64>], n_max: usize, radius: f64, tol: f64) -> Result<CheckReport> {
    let a = FiniteAlphabet::new(weights.to_vec())?;
    for nu in types {
        check_dim(weights.len(), nu.len())?;
        if (nu.iter().sum::<f64>() - 1.0).abs() > 1e-9 || nu.iter().any(|v| *v < 0.0) {
            return Err(Error::invalid("types must be probability vectors"));
        }
    }
    let spec = DistributionSpec::FiniteAlphabet(a);
    let est = entropy_table(&spec, types, &[radius], n_max, Norm::Linf, None)?;
    let cases = est
        .into_iter()
        .map(|e| {
            let rhs = ExtReal::of(-relative_entropy(&e.point, weights));
            case("nu", json!(e.point), e.estimate, rhs, abs_gap(e.estimate, rhs), tol)
        })
        .collect();
    Ok(CheckReport::from_cases("sanov", cases))
}

/// `sup_C s` for a Gaussian and a 1-d interval, half-space or the whole
/// space, where `s(x) = −Σ (x_j − m_j)² / 2σ_j²`.
pub fn gaussian_sup_rate(g: &Gaussian, set: &ConvexSet) -> Option<f64> {
    if let Some(iv) = set.as_interval() {
        if g.dim() != 1 || iv.is_empty() {
            return None;
        }
        let m = g.mean()[0];
        let d = if m < iv.lo {
            iv.lo - m
        } else if m > iv.hi {
            m - iv.hi
        } else {
            0.0
        };
        return Some(-d * d / (2.0 * g.var()[0]));
    }
    match set {
        ConvexSet::Space { .. } => Some(0.0),
        ConvexSet::HalfSpace { normal, offset, .. } => {
            let excess = (dot(normal, g.mean()) - offset).max(0.0);
            let v: f64 = normal.iter().zip(g.var()).map(|(a, s)| a * a * s).sum();
            Some(-excess * excess / (2.0 * v))
        }
        _ => None,
    }
}

/// Gaussian decay sequences on intervals and half-spaces: nondecreasing in
/// `n`, within `tol` of the limit `sup_C s` at `n_max`, and `k_C = 1`.
pub fn check_hyperplane_convergence(
    spec: &DistributionSpec,
    sets: &[ConvexSet],
    n_max: usize,
    tol: f64,
) -> Result<CheckReport> {
    let Some(g) = spec.to_gaussian() else {
        return Err(Error::invalid("hyperplane convergence needs a Gaussian law"));
    };
    let mut cases = Vec::new();
    for (k, set) in sets.iter().enumerate() {
        let r = decay_analysis(spec, set, n_max)?;
        let kc_margin = if r.k_c == Some(1) { 0.0 } else { 1.0 };
        cases.push(case(
            "k_C = 1",
            json!({ "set": k, "k_C": r.k_c }),
            ExtReal::of(r.k_c.map_or(f64::INFINITY, |k| k as f64)),
            ExtReal::of(1.0),
            ExtReal::of(kc_margin),
            0.0,
        ));
        let mut drop = (ExtReal::NEG_INF, 1usize);
        for w in r.per_n.windows(2) {
            let d = excess(w[0].1, w[1].1);
            if d > drop.0 {
                drop = (d, w[1].0);
            }
        }
        if r.per_n.len() > 1 {
            let n = drop.1;
            cases.push(case(
                "monotone",
                json!({ "set": k, "n": n }),
                r.per_n[n - 2].1,
                r.per_n[n - 1].1,
                drop.0,
                1e-12,
            ));
        }
        let limit = gaussian_sup_rate(&g, set)
            .ok_or_else(|| Error::invalid("sets must be intervals or half-spaces"))?;
        let last = r.per_n[n_max - 1].1;
        let limit = ExtReal::of(limit);
        cases.push(case(
            "gap at n_max",
            json!({ "set": k, "n": n_max }),
            last,
            limit,
            abs_gap(last, limit),
            tol,
        ));
    }
    Ok(CheckReport::from_cases("hyperplane_convergence", cases))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::AtomicMeasure;

    fn coin() -> DistributionSpec {
        DistributionSpec::bernoulli(0.5).unwrap()
    }

    fn gauss() -> DistributionSpec {
        DistributionSpec::Gaussian(Gaussian::standard(1))
    }

    fn grid(s: &str) -> GridSpec {
        s.parse().unwrap()
    }

    fn assert_coherent(r: &CheckReport) {
        assert_eq!(r.passed, r.recomputed_passed(), "{}", r.check_name);
        assert_eq!(r.passed, r.worst_margin.value() <= r.tolerance);
    }

    #[test]
    fn report_plumbing() {
        let c = |m: f64, t: f64| case("c", Value::Null, ExtReal::ZERO, ExtReal::ZERO, ExtReal::of(m), t);
        let r = CheckReport::from_cases("x", vec![c(0.1, 0.2), c(0.3, 0.25), c(0.01, 0.0)]);
        assert!(!r.passed && r.worst_margin == ExtReal::of(0.3) && r.tolerance == 0.25);
        assert_coherent(&r);
        let r = CheckReport::from_cases("x", vec![]);
        assert!(r.passed);
        assert_eq!(excess(ExtReal::NEG_INF, ExtReal::NEG_INF), ExtReal::NEG_INF);
        assert_eq!(excess(ExtReal::of(1.0), ExtReal::NEG_INF), ExtReal::POS_INF);
        assert_eq!(abs_gap(ExtReal::POS_INF, ExtReal::POS_INF), ExtReal::ZERO);
    }

    #[test]
    fn duality_examples() {
        let r = check_duality(&coin(), &grid("[0,1]x21"), &grid("[-40,40]x4001"), 2000, &[0.01], 0.05).unwrap();
        assert!(r.passed, "{:?}", r.worst_margin);
        assert_eq!(r.details.len(), 19);
        assert_coherent(&r);
        let dirac = DistributionSpec::Atomic(AtomicMeasure::dirac(vec![0.3]).unwrap());
        assert!(check_duality(&dirac, &grid("[0,1]x11"), &grid("[-5,5]x11"), 10, &[0.1], 0.05).is_err());
        let r = check_duality(&gauss(), &grid("[-1.5,1.5]x13"), &grid("[-10,10]x2001"), 2000, &[0.01], 0.05).unwrap();
        assert!(r.passed, "{:?}", r.worst_margin);
    }

    #[test]
    fn young_examples() {
        let dual = grid("[-40,40]x8001");
        for (spec, primal) in [(coin(), grid("[0,1]x501")), (gauss(), grid("[-5,5]x501"))] {
            let r = check_young(&spec, &grid("[-3,3]x61"), &primal, &dual).unwrap();
            assert!(r.passed, "{:?}", r.worst_margin);
            assert_coherent(&r);
        }
    }

    #[test]
    fn chebyshev_examples() {
        let r = check_chebyshev(&coin(), &[2.0], &[0.9], 0.05, 500).unwrap();
        assert!(r.passed && r.details.len() == 500);
        let r = check_chebyshev(&coin(), &[0.0], &[0.9], 0.05, 50).unwrap();
        assert!(r.passed);
        let r = check_chebyshev(&gauss(), &[1.0], &[0.5], 0.01, 200).unwrap();
        assert!(r.passed, "{:?}", r.worst_margin);
    }

    #[test]
    fn pressure_recovery_examples() {
        let lambdas: Vec<Vec<f64>> = (-12..=12).map(|k| vec![k as f64 * 0.25]).collect();
        let dual = grid("[-40,40]x4001");
        let r = check_pressure_recovery(&coin(), &lambdas, &grid("[0,1]x501"), &dual, 0.05).unwrap();
        assert!(r.passed, "{:?}", r.worst_margin);
        let r = check_pressure_recovery(&gauss(), &[vec![2.0], vec![0.0]], &grid("[-6,6]x601"), &dual, 0.05).unwrap();
        assert!(r.passed && r.worst_margin.value() < 1e-3, "{:?}", r.worst_margin);
    }

    #[test]
    fn convex_bound_examples() {
        let dual = grid("[-40,40]x4001");
        let sets = vec![
            ConvexSet::interval(0.6, 0.8).unwrap(),
            ConvexSet::interval(2.0, 3.0).unwrap(),
        ];
        let r = check_convex_upper_bound(&coin(), &sets, 200, &grid("[-0.5,1.5]x401"), &dual).unwrap();
        assert!(r.passed, "{:?} {:?}", r.worst_margin, r.worst_witness);
        assert!(r.details.iter().any(|c| c.label == "limit"));
        let rad = DistributionSpec::rademacher();
        let sets = vec![ConvexSet::open_interval(-0.1, 0.1).unwrap()];
        let r = check_convex_upper_bound(&rad, &sets, 200, &grid("[-1.5,1.5]x301"), &dual).unwrap();
        assert!(r.passed, "{:?}", r.worst_margin);
    }

    #[test]
    fn dom_cosupp_examples() {
        let m = AtomicMeasure::new(1, vec![(vec![0.0], 1.0 / 3.0), (vec![1.0], 1.0 / 3.0), (vec![3.0], 1.0 / 3.0)]).unwrap();
        let spec = DistributionSpec::Atomic(m);
        let r = check_dom_cosupp(&spec, &grid("[-1,4]x101"), 100, &[0.01]).unwrap();
        assert!(r.passed);
        assert!(r.details.iter().filter(|c| c.label == "inside").count() > 50);
        assert!(r.details.iter().filter(|c| c.label == "outside").count() > 30);
        // A radius reaching across the boundary cannot certify zero mass.
        let r = check_dom_cosupp(&spec, &grid("[-1,4]x101"), 20, &[0.2]).unwrap();
        assert!(!r.passed);
        assert_coherent(&r);
    }

    #[test]
    fn varadhan_examples() {
        let dual = grid("[-40,40]x4001");
        let f = TestFunction::Restricted {
            lambda: vec![1.0],
            c: 0.0,
            set: ConvexSet::interval(0.0, f64::INFINITY).unwrap(),
        };
        let r = check_varadhan(&coin(), &f, 500, &grid("[0,1]x501"), &dual).unwrap();
        assert!(r.passed, "{:?}", r.worst_margin);
        let f = TestFunction::Restricted {
            lambda: vec![0.0],
            c: 0.0,
            set: ConvexSet::open_interval(-0.1, 0.1).unwrap(),
        };
        let r = check_varadhan(&DistributionSpec::rademacher(), &f, 300, &grid("[-1,1]x201"), &dual).unwrap();
        assert!(r.passed, "{:?}", r.worst_margin);
    }

    #[test]
    fn biconjugation_examples() {
        let line = grid("[-2,2]x401");
        let samples = vec![
            ("exp".to_string(), GridFunction::from_fn(line.clone(), |x| ExtReal::of(x[0].exp()))),
            (
                "double well".to_string(),
                GridFunction::from_fn(line.clone(), |x| ExtReal::of((x[0] * x[0] - 1.0).powi(2))),
            ),
            ("constant".to_string(), GridFunction::from_fn(line, |_| ExtReal::of(0.7))),
        ];
        let r = check_biconjugation(&samples, &grid("[-32,32]x6401"), 4e-4).unwrap();
        assert!(r.passed, "{:?} {:?}", r.worst_margin, r.worst_witness);
        assert_eq!(r.details.len(), 6);
    }

    #[test]
    fn sanov_examples() {
        assert_eq!(type_grid(3, 10, true).len(), 36);
        assert_eq!(type_grid(2, 4, false).len(), 5);
        let r = check_sanov(&[0.5, 0.5], &[vec![0.25, 0.75], vec![0.5, 0.5]], 400, 0.01, 0.05).unwrap();
        assert!(r.passed, "{:?}", r.worst_margin);
        assert_eq!(r.details[1].rhs, ExtReal::ZERO);
        assert!(check_sanov(&[0.5, 0.5], &[vec![0.2, 0.7]], 10, 0.01, 0.05).is_err());
    }

    #[test]
    fn hyperplane_examples() {
        let sets = vec![
            ConvexSet::interval(0.5, f64::INFINITY).unwrap(),
            ConvexSet::space(1),
            ConvexSet::interval(f64::NEG_INFINITY, -0.3).unwrap(),
        ];
        let r = check_hyperplane_convergence(&gauss(), &sets, 2000, 0.06).unwrap();
        assert!(r.passed, "{:?} {:?}", r.worst_margin, r.worst_witness);
        assert!(check_hyperplane_convergence(&coin(), &sets, 10, 0.06).is_err());
    }
}
