//! Uniform rectangular lattices and extended-real functions tabulated on them.
//!
//! Lattice points are enumerated in row-major order: the last axis varies
//! fastest.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::extmath::ExtReal;

/// Default cap on the number of lattice points.
pub const DEFAULT_GRID_BUDGET: usize = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(lo: f64, hi: f64, count: usize) -> Result<Self> {
        let a = Axis { lo, hi, count };
        a.validate()?;
        Ok(a)
    }

    fn validate(&self) -> Result<()> {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo < self.hi) {
            return Err(Error::invalid(format!(
                "axis needs finite lo < hi, got [{}, {}]",
                self.lo, self.hi
            )));
        }
        if self.count < 2 {
            return Err(Error::invalid("an axis needs at least two points"));
        }
        Ok(())
    }

    pub fn step(&self) -> f64 {
        (self.hi - self.lo) / (self.count - 1) as f64
    }

    /// The `i`-th node; the last node is `hi` exactly.
    #[inline]
    pub fn node(&self, i: usize) -> f64 {
        if i + 1 == self.count {
            self.hi
        } else {
            self.lo + (self.hi - self.lo) * (i as f64) / ((self.count - 1) as f64)
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.node(i)).collect()
    }
}

impl std::fmt::Display for Axis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{},{}]x{}", self.lo, self.hi, self.count)
    }
}

/// A uniform lattice in ℝ^d.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGrid", into = "RawGrid")]
pub struct GridSpec {
    axes: Vec<Axis>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RawGrid {
    Text(String),
    Axes(Vec<Axis>),
}

impl TryFrom<RawGrid> for GridSpec {
    type Error = Error;
    fn try_from(raw: RawGrid) -> Result<Self> {
        match raw {
            RawGrid::Text(s) => s.parse(),
            RawGrid::Axes(axes) => GridSpec::new(axes),
        }
    }
}

impl From<GridSpec> for RawGrid {
    fn from(g: GridSpec) -> Self {
        RawGrid::Text(g.to_string())
    }
}

impl GridSpec {
    pub fn new(axes: Vec<Axis>) -> Result<Self> {
        Self::with_budget(axes, DEFAULT_GRID_BUDGET)
    }

    pub fn with_budget(axes: Vec<Axis>, budget: usize) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::invalid("a grid needs at least one axis"));
        }
        for a in &axes {
            a.validate()?;
        }
        let total = axes
            .iter()
            .try_fold(1usize, |acc, a| acc.checked_mul(a.count))
            .unwrap_or(usize::MAX);
        if total > budget {
            return Err(Error::BudgetExceeded {
                what: "grid",
                required: total,
                budget,
            });
        }
        Ok(GridSpec { axes })
    }

    /// One-axis convenience constructor.
    pub fn line(lo: f64, hi: f64, count: usize) -> Result<Self> {
        GridSpec::new(vec![Axis::new(lo, hi, count)?])
    }

    /// The same axis repeated `dim` times.
    pub fn cube(lo: f64, hi: f64, count: usize, dim: usize) -> Result<Self> {
        GridSpec::new(vec![Axis::new(lo, hi, count)?; dim])
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.count).product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Largest axis step, the lattice resolution.
    pub fn max_step(&self) -> f64 {
        self.axes.iter().map(Axis::step).fold(0.0, f64::max)
    }

    /// Writes the lattice point with flat index `flat` into `out`.
    pub fn point_into(&self, mut flat: usize, out: &mut [f64]) {
        for (k, a) in self.axes.iter().enumerate().rev() {
            out[k] = a.node(flat % a.count);
            flat /= a.count;
        }
    }

    pub fn point(&self, flat: usize) -> Vec<f64> {
        let mut p = vec![0.0; self.dim()];
        self.point_into(flat, &mut p);
        p
    }

    pub fn points(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        (0..self.len()).map(|i| self.point(i))
    }

    /// Row-major strides.
    pub fn strides(&self) -> Vec<usize> {
        let mut s = vec![1; self.dim()];
        for k in (0..self.dim().saturating_sub(1)).rev() {
            s[k] = s[k + 1] * self.axes[k + 1].count;
        }
        s
    }
}

impl FromStr for GridSpec {
    type Err = Error;

    /// Parses `"[lo,hi]xN"`, with several axes joined by `×` (or `*`).
    fn from_str(s: &str) -> Result<Self> {
        let axes = s
            .split(['×', '*'])
            .map(parse_axis)
            .collect::<Result<Vec<_>>>()?;
        GridSpec::new(axes)
    }
}

fn parse_axis(s: &str) -> Result<Axis> {
    let bad = || Error::invalid(format!("cannot parse grid axis {s:?}; expected \"[lo,hi]xN\""));
    let s = s.trim();
    let body = s.strip_prefix('[').ok_or_else(bad)?;
    let (range, count) = body.split_once(']').ok_or_else(bad)?;
    let count = count.trim().strip_prefix('x').ok_or_else(bad)?;
    let (lo, hi) = range.split_once(',').ok_or_else(bad)?;
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    let count: usize = count.trim().parse().map_err(|_| bad())?;
    Axis::new(lo, hi, count)
}

impl std::fmt::Display for GridSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (i, a) in self.axes.iter().enumerate() {
            if i > 0 {
                f.write_str("×")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

/// An extended-real function on a lattice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    grid: GridSpec,
    values: Vec<ExtReal>,
}

impl GridFunction {
    pub fn new(grid: GridSpec, values: Vec<ExtReal>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::invalid(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        Ok(GridFunction { grid, values })
    }

    /// Tabulates `f` at every lattice point.
    pub fn from_fn(grid: GridSpec, mut f: impl FnMut(&[f64]) -> ExtReal) -> Self {
        let mut p = vec![0.0; grid.dim()];
        let values = (0..grid.len())
            .map(|i| {
                grid.point_into(i, &mut p);
                f(&p)
            })
            .collect();
        GridFunction { grid, values }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[ExtReal] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [ExtReal] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<ExtReal> {
        self.values
    }

    pub fn get(&self, flat: usize) -> ExtReal {
        self.values[flat]
    }

    /// Value at the lattice node nearest to `x`.
    pub fn at_nearest(&self, x: &[f64]) -> Result<ExtReal> {
        check_dim(self.grid.dim(), x.len())?;
        let mut flat = 0;
        for (a, xi) in self.grid.axes.iter().zip(x) {
            let i = ((xi - a.lo) / a.step()).round().clamp(0.0, (a.count - 1) as f64) as usize;
            flat = flat * a.count + i;
        }
        Ok(self.values[flat])
    }

    pub fn map(&self, f: impl Fn(ExtReal) -> ExtReal) -> GridFunction {
        GridFunction {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Maximum over the lattice points accepted by `keep`.
    pub fn sup_where(&self, mut keep: impl FnMut(&[f64]) -> bool) -> ExtReal {
        let mut p = vec![0.0; self.grid.dim()];
        let mut best = ExtReal::NEG_INF;
        for (i, &v) in self.values.iter().enumerate() {
            self.grid.point_into(i, &mut p);
            if keep(&p) {
                best = best.max(v);
            }
        }
        best
    }

    /// JSON header describing the lattice.
    pub fn header_json(&self) -> String {
        serde_json::to_string_pretty(&GridHeader {
            grid: self.grid.clone(),
            points: self.grid.len(),
            layout: "row-major, last axis fastest",
        })
        .expect("serialisable")
    }

    /// One line per lattice point, `x0,...,x{d-1},value`, row-major.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for k in 0..self.grid.dim() {
            let _ = write!(out, "x{k},");
        }
        out.push_str("value\n");
        let mut p = vec![0.0; self.grid.dim()];
        for (i, v) in self.values.iter().enumerate() {
            self.grid.point_into(i, &mut p);
            for c in &p {
                let _ = write!(out, "{c},");
            }
            let _ = writeln!(out, "{v}");
        }
        out
    }
}

#[derive(Serialize)]
struct GridHeader {
    grid: GridSpec,
    points: usize,
    layout: &'static str,
}
