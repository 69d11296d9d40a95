//! The pressure `p(λ) = log E e^{⟨λ, X⟩}` (cumulant generating function).

use rayon::prelude::*;

use crate::error::{check_dim, Result};
use crate::extmath::{ExtReal, LogSumExp};
use crate::grid::{GridFunction, GridSpec};
use crate::measures::{dot, AtomicMeasure, DistributionSpec, FiniteAlphabet, Gaussian};

pub fn pressure(spec: &DistributionSpec, lambda: &[f64]) -> Result<ExtReal> {
    check_dim(spec.dim(), lambda.len())?;
    Ok(pressure_unchecked(spec, lambda))
}

fn pressure_unchecked(spec: &DistributionSpec, lambda: &[f64]) -> ExtReal {
    if lambda.iter().all(|l| *l == 0.0) {
        return ExtReal::ZERO;
    }
    match spec {
        DistributionSpec::Atomic(m) => atomic_pressure(m, lambda),
        DistributionSpec::Gaussian(g) => gaussian_pressure(g, lambda),
        DistributionSpec::FiniteAlphabet(a) => alphabet_pressure(a, lambda),
        DistributionSpec::Product(parts) => parts
            .iter()
            .zip(lambda)
            .fold(ExtReal::ZERO, |acc, (p, l)| {
                crate::extmath::add_upper(acc, pressure_unchecked(p, std::slice::from_ref(l)))
            }),
    }
}

/// `log Σ w_i e^{⟨λ, x_i⟩}` in log-space.
pub fn atomic_pressure(m: &AtomicMeasure, lambda: &[f64]) -> ExtReal {
    let mut acc = LogSumExp::new();
    for (p, lw) in m.atoms() {
        acc.push(dot(lambda, p) + lw);
    }
    acc.total()
}

pub fn gaussian_pressure(g: &Gaussian, lambda: &[f64]) -> ExtReal {
    let quad: f64 = g
        .var()
        .iter()
        .zip(lambda)
        .map(|(v, l)| v * l * l)
        .sum();
    ExtReal::of(dot(lambda, g.mean()) + 0.5 * quad)
}

fn alphabet_pressure(a: &FiniteAlphabet, lambda: &[f64]) -> ExtReal {
    let mut acc = LogSumExp::new();
    for (w, l) in a.weights().iter().zip(lambda) {
        acc.push(w.ln() + l);
    }
    acc.total()
}

/// Tabulates the pressure on every lattice point (in parallel, ordered).
pub fn pressure_grid(spec: &DistributionSpec, grid: &GridSpec) -> Result<GridFunction> {
    check_dim(spec.dim(), grid.dim())?;
    let values: Vec<ExtReal> = (0..grid.len())
        .into_par_iter()
        .map(|i| pressure_unchecked(spec, &grid.point(i)))
        .collect();
    GridFunction::new(grid.clone(), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::Gaussian;
    use proptest::prelude::*;

    fn coin() -> DistributionSpec {
        DistributionSpec::bernoulli(0.5).unwrap()
    }

    #[test]
    fn examples() {
        let r = DistributionSpec::rademacher();
        assert_eq!(pressure(&r, &[0.0]).unwrap(), ExtReal::ZERO);
        let v = pressure(&r, &[1.0]).unwrap().value();
        assert!((v - 1f64.cosh().ln()).abs() < 1e-15);
        assert!((v - 0.43378).abs() < 1e-5);
        let n = DistributionSpec::Gaussian(Gaussian::standard(1));
        assert_eq!(pressure(&n, &[2.0]).unwrap(), ExtReal::of(2.0));
        assert!(pressure(&n, &[1.0, 1.0]).is_err());
    }

    #[test]
    fn grid_examples() {
        let g = pressure_grid(&coin(), &GridSpec::line(-1.0, 1.0, 3).unwrap()).unwrap();
        let oracle = |l: f64| ((1.0 + l.exp()) / 2.0).ln();
        for (v, l) in g.values().iter().zip([-1.0, 0.0, 1.0]) {
            assert!((v.value() - oracle(l)).abs() < 1e-15);
        }
        let c = DistributionSpec::Atomic(AtomicMeasure::dirac(vec![0.5, -2.0]).unwrap());
        let grid = GridSpec::cube(-2.0, 2.0, 5, 2).unwrap();
        let g = pressure_grid(&c, &grid).unwrap();
        for (i, v) in g.values().iter().enumerate() {
            let l = grid.point(i);
            assert!((v.value() - (0.5 * l[0] - 2.0 * l[1])).abs() < 1e-12);
        }
        let n = DistributionSpec::Gaussian(Gaussian::standard(1));
        let g = pressure_grid(&n, &GridSpec::line(-3.0, 3.0, 7).unwrap()).unwrap();
        assert_eq!(g.get(0), ExtReal::of(4.5));
    }

    #[test]
    fn alphabet_matches_its_atomic_embedding() {
        let a = FiniteAlphabet::new(vec![0.2, 0.3, 0.5]).unwrap();
        let m = a.to_atomic();
        let l = [0.3, -1.2, 2.0];
        let x = alphabet_pressure(&a, &l).value();
        let y = atomic_pressure(&m, &l).value();
        assert!((x - y).abs() < 1e-14);
    }

    #[test]
    fn product_adds_component_pressures() {
        let p = DistributionSpec::Product(vec![coin(), DistributionSpec::Gaussian(Gaussian::standard(1))]);
        let v = pressure(&p, &[1.0, 2.0]).unwrap().value();
        assert!((v - (((1.0 + 1f64.exp()) / 2.0).ln() + 2.0)).abs() < 1e-14);
    }

    #[test]
    fn grid_convexity_and_zero() {
        let specs = [
            coin(),
            DistributionSpec::rademacher(),
            DistributionSpec::Gaussian(Gaussian::new(vec![0.3, -1.0], vec![2.0, 0.5]).unwrap()),
            DistributionSpec::Atomic(
                AtomicMeasure::new(2, vec![(vec![0.0, 1.0], 0.2), (vec![3.0, -1.0], 0.5), (vec![-2.0, 0.5], 0.3)]).unwrap(),
            ),
        ];
        for spec in &specs {
            let d = spec.dim();
            assert_eq!(pressure(spec, &vec![0.0; d]).unwrap(), ExtReal::ZERO);
            let grid = GridSpec::cube(-4.0, 4.0, 41, d).unwrap();
            let f = pressure_grid(spec, &grid).unwrap();
            let strides = grid.strides();
            for i in 0..grid.len() {
                for (k, &s) in strides.iter().enumerate() {
                    let idx = (i / s) % grid.axes()[k].count;
                    if idx == 0 || idx + 1 == grid.axes()[k].count {
                        continue;
                    }
                    let mid = f.get(i).value();
                    let avg = 0.5 * (f.get(i - s).value() + f.get(i + s).value());
                    assert!(mid <= avg + 1e-9, "{spec:?} {i}");
                }
            }
        }
    }

    #[test]
    fn large_lambda_does_not_overflow() {
        let v = pressure(&coin(), &[700.0]).unwrap().value();
        assert!((v - (700.0 - std::f64::consts::LN_2)).abs() < 1e-9);
        let v = pressure(&coin(), &[5000.0]).unwrap().value();
        assert!(v.is_finite());
    }

    proptest! {
        #[test]
        fn symmetric_laws_have_even_pressure(l in -50.0f64..50.0, a in 0.1f64..3.0, w in 0.05f64..0.45) {
            let m = AtomicMeasure::new(1, vec![(vec![-a], w), (vec![0.0], 1.0 - 2.0 * w), (vec![a], w)]).unwrap();
            let spec = DistributionSpec::Atomic(m);
            let p = pressure(&spec, &[l]).unwrap().value();
            let q = pressure(&spec, &[-l]).unwrap().value();
            prop_assert!((p - q).abs() <= 1e-12 * (1.0 + p.abs()));
        }
    }
}
