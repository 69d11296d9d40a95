//! Discrete Fenchel–Legendre transforms on uniform lattices.
//!
//! For a function tabulated at `x_i`, the discrete conjugate at a dual node
//! `λ` is `max_i (⟨λ, x_i⟩ − f(x_i))`. In one dimension this is computed in
//! `O(N + M)`: only vertices of the lower convex hull of `{(x_i, f(x_i))}`
//! can attain the maximum, and for increasing `λ` the maximising vertex
//! moves monotonically to the right. In higher dimensions the maximum
//! factorises over axes,
//!
//! ```text
//! f*(λ₁, λ₂) = max_{x₁} ( λ₁x₁ + max_{x₂} (λ₂x₂ − f(x₁, x₂)) ),
//! ```
//!
//! so the same 1-d sweep is applied one axis at a time. [`conjugate_brute`]
//! evaluates the definition directly and serves as the reference.
//!
//! `+∞` samples never attain the maximum and are skipped; a function equal
//! to `+∞` everywhere conjugates to `−∞`, and any `−∞` sample makes the
//! conjugate `+∞` everywhere. Ties resolve to the smallest index.

use rayon::prelude::*;

use crate::error::{check_dim, Error, Result};
use crate::extmath::ExtReal;
use crate::grid::{Axis, GridFunction, GridSpec, DEFAULT_GRID_BUDGET};
use crate::measures::DistributionSpec;
use crate::pressure::pressure_grid;

/// Cap on `primal × dual` pairs visited by [`conjugate_brute`].
pub const BRUTE_PAIR_BUDGET: usize = 50_000_000_000;

/// 1-d conjugate of samples `(xs[i], fs[i])` at ascending `lambdas`.
///
/// `xs` must be ascending. Returns raw `f64` with `±∞` allowed.
pub fn conjugate_samples(xs: &[f64], fs: &[f64], lambdas: &[f64]) -> Vec<f64> {
    debug_assert_eq!(xs.len(), fs.len());
    if fs.contains(&f64::NEG_INFINITY) {
        return vec![f64::INFINITY; lambdas.len()];
    }
    // Lower hull of the finite samples, as indices into xs/fs.
    let mut hull: Vec<usize> = Vec::with_capacity(xs.len());
    for i in 0..xs.len() {
        if fs[i] == f64::INFINITY {
            continue;
        }
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // Drop b unless a → b → i turns strictly left.
            let cross = (xs[b] - xs[a]) * (fs[i] - fs[a]) - (fs[b] - fs[a]) * (xs[i] - xs[a]);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    if hull.is_empty() {
        return vec![f64::NEG_INFINITY; lambdas.len()];
    }
    let mut k = 0;
    lambdas
        .iter()
        .map(|&l| {
            let val = |j: usize| l * xs[hull[j]] - fs[hull[j]];
            while k + 1 < hull.len() && val(k + 1) > val(k) {
                k += 1;
            }
            val(k)
        })
        .collect()
}

fn raw(values: &[ExtReal]) -> Vec<f64> {
    values.iter().map(|v| v.value()).collect()
}

fn wrap(values: Vec<f64>) -> Vec<ExtReal> {
    values.into_iter().map(ExtReal::of).collect()
}

/// Linear-time conjugate of a 1-d grid function onto `dual`.
pub fn conjugate_1d_fast(f: &GridFunction, dual: &GridSpec) -> Result<GridFunction> {
    check_dim(1, f.grid().dim())?;
    check_dim(1, dual.dim())?;
    let xs = f.grid().axes()[0].nodes();
    let lambdas = dual.axes()[0].nodes();
    let out = conjugate_samples(&xs, &raw(f.values()), &lambdas);
    GridFunction::new(dual.clone(), wrap(out))
}

/// Reference conjugate: the maximum over every primal node, per dual node.
pub fn conjugate_brute(f: &GridFunction, dual: &GridSpec) -> Result<GridFunction> {
    let grid = f.grid();
    check_dim(grid.dim(), dual.dim())?;
    let pairs = grid.len().saturating_mul(dual.len());
    if pairs > BRUTE_PAIR_BUDGET {
        return Err(Error::BudgetExceeded {
            what: "brute-force conjugate",
            required: pairs,
            budget: BRUTE_PAIR_BUDGET,
        });
    }
    let d = grid.dim();
    let fs = raw(f.values());
    if fs.contains(&f64::NEG_INFINITY) {
        return GridFunction::new(dual.clone(), vec![ExtReal::POS_INF; dual.len()]);
    }
    let primal: Vec<f64> = (0..grid.len()).flat_map(|i| grid.point(i)).collect();
    let values: Vec<f64> = (0..dual.len())
        .into_par_iter()
        .map(|j| {
            let l = dual.point(j);
            let mut best = f64::NEG_INFINITY;
            for (x, &fx) in primal.chunks_exact(d).zip(&fs) {
                if fx == f64::INFINITY {
                    continue;
                }
                let v = if d == 1 {
                    l[0] * x[0] - fx
                } else {
                    x.iter().zip(&l).map(|(a, b)| a * b).sum::<f64>() - fx
                };
                if v > best {
                    best = v;
                }
            }
            best
        })
        .collect();
    GridFunction::new(dual.clone(), wrap(values))
}

/// Conjugate onto `dual`: the linear-time sweep in 1-d, one sweep per axis
/// otherwise.
pub fn conjugate(f: &GridFunction, dual: &GridSpec) -> Result<GridFunction> {
    let grid = f.grid();
    check_dim(grid.dim(), dual.dim())?;
    if grid.dim() == 1 {
        return conjugate_1d_fast(f, dual);
    }
    // g holds λ-partial sups, as the *negated* function so each axis pass is
    // an ordinary conjugate: g_k = conj_k(g_{k-1}) with g_0 = f, and the
    // sign flips back after every pass.
    let mut shape: Vec<usize> = grid.axes().iter().map(|a| a.count).collect();
    let mut vals: Vec<f64> = raw(f.values());
    for (k, (pa, da)) in grid.axes().iter().zip(dual.axes()).enumerate() {
        let required: usize = shape
            .iter()
            .enumerate()
            .map(|(i, &c)| if i == k { da.count } else { c })
            .product();
        if required > 4 * DEFAULT_GRID_BUDGET.max(grid.len()).max(dual.len()) {
            return Err(Error::BudgetExceeded {
                what: "separable conjugate",
                required,
                budget: 4 * DEFAULT_GRID_BUDGET,
            });
        }
        vals = conjugate_axis(&vals, &shape, k, pa, da);
        shape[k] = da.count;
        if k + 1 < grid.dim() {
            // Next pass conjugates −(partial sup).
            for v in &mut vals {
                *v = -*v;
            }
        }
    }
    GridFunction::new(dual.clone(), wrap(vals))
}

/// Conjugates every fibre along axis `k` of a row-major array.
fn conjugate_axis(vals: &[f64], shape: &[usize], k: usize, primal: &Axis, dual: &Axis) -> Vec<f64> {
    let outer: usize = shape[..k].iter().product();
    let inner: usize = shape[k + 1..].iter().product();
    let (n, m) = (shape[k], dual.count);
    let xs = primal.nodes();
    let ls = dual.nodes();
    let fibres: Vec<(usize, usize, Vec<f64>)> = (0..outer)
        .into_par_iter()
        .flat_map_iter(|o| {
            let xs = &xs;
            let ls = &ls;
            (0..inner).map(move |i| {
                let fibre: Vec<f64> = (0..n).map(|t| vals[(o * n + t) * inner + i]).collect();
                (o, i, conjugate_samples(xs, &fibre, ls))
            })
        })
        .collect();
    let mut out = vec![0.0; outer * m * inner];
    for (o, i, res) in fibres {
        for (t, v) in res.into_iter().enumerate() {
            out[(o * m + t) * inner + i] = v;
        }
    }
    out
}

/// `f**` on the primal lattice of `f`, through `dual`.
pub fn biconjugate(f: &GridFunction, dual: &GridSpec) -> Result<GridFunction> {
    let star = conjugate(f, dual)?;
    conjugate(&star, f.grid())
}

/// `s = −p*`: pressure tabulated on `dual`, conjugated onto `primal`, negated.
pub fn rate_function(
    spec: &DistributionSpec,
    primal: &GridSpec,
    dual: &GridSpec,
) -> Result<GridFunction> {
    check_dim(spec.dim(), primal.dim())?;
    let p = pressure_grid(spec, dual)?;
    Ok(conjugate(&p, primal)?.map(|v| -v))
}

/// Midpoint convexity along every axis: `f(x) ≤ (f(x−h) + f(x+h))/2 + tol`.
/// Triples touching `+∞` are skipped.
pub fn is_midpoint_convex(f: &GridFunction, tol: f64) -> bool {
    axis_triples(f).all(|(a, b, c)| {
        if a.is_pos_inf() || c.is_pos_inf() {
            true
        } else {
            b.value() <= 0.5 * (a.value() + c.value()) + tol
        }
    })
}

/// Midpoint concavity along every axis; triples touching `−∞` are skipped.
pub fn is_midpoint_concave(f: &GridFunction, tol: f64) -> bool {
    is_midpoint_convex(&f.map(|v| -v), tol)
}

fn axis_triples(f: &GridFunction) -> impl Iterator<Item = (ExtReal, ExtReal, ExtReal)> + '_ {
    let grid = f.grid();
    let strides = grid.strides();
    (0..grid.len()).flat_map(move |i| {
        let strides = strides.clone();
        (0..grid.dim()).filter_map(move |k| {
            let s = strides[k];
            let idx = (i / s) % grid.axes()[k].count;
            if idx == 0 || idx + 1 == grid.axes()[k].count {
                None
            } else {
                Some((f.get(i - s), f.get(i), f.get(i + s)))
            }
        })
    })
}
