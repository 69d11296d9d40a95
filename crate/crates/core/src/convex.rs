//! Symbolic convex sets in ℝ^d.
//!
//! Sets are trees of constructors. Membership is evaluated literally
//! ([`ConvexSet::contains`]) or with every strict inequality relaxed
//! ([`ConvexSet::contains_closure`]). The Minkowski gauge
//! `M_C(x) = inf{t ≥ 0 : x ∈ tC}` has closed forms for half-spaces and
//! centred balls and falls back to bisection on the monotone predicate
//! `t ↦ [x ∈ tC̄]` otherwise.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::extmath::ExtReal;
use crate::measures::dot;

/// Relative width at which gauge bisection stops.
pub const GAUGE_REL_TOL: f64 = 1e-10;

const GAUGE_T_MAX: f64 = 1e15;
const GAUGE_T_MIN: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    L1,
    L2,
    Linf,
}

impl Norm {
    pub fn eval(self, v: &[f64]) -> f64 {
        match self {
            Norm::L1 => v.iter().map(|x| x.abs()).sum(),
            Norm::L2 => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
            Norm::Linf => v.iter().fold(0.0, |m, x| m.max(x.abs())),
        }
    }

    fn dist(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Norm::L1 => a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum(),
            Norm::L2 => a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt(),
            Norm::Linf => a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs())),
        }
    }
}

/// A closed half-space `⟨normal, x⟩ ≤ offset`, the facet type of [`ConvexSet::HPolytope`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Constraint {
    pub normal: Vec<f64>,
    pub offset: f64,
}

/// A convex subset of ℝ^d.
///
/// Build values through the associated constructors or JSON; both validate
/// the invariants (non-zero normals, positive radii, non-zero dilations,
/// consistent dimensions).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSet", into = "RawSet")]
pub enum ConvexSet {
    /// `⟨normal, x⟩ < offset` when open, `≤` otherwise.
    HalfSpace {
        normal: Vec<f64>,
        offset: f64,
        open: bool,
    },
    Ball {
        center: Vec<f64>,
        radius: f64,
        norm: Norm,
        open: bool,
    },
    HPolytope {
        dim: usize,
        constraints: Vec<Constraint>,
    },
    Intersection(Vec<ConvexSet>),
    /// `inner + shift`.
    Translate {
        inner: Box<ConvexSet>,
        shift: Vec<f64>,
    },
    /// `factor · inner`.
    Dilate {
        inner: Box<ConvexSet>,
        factor: f64,
    },
    /// All of ℝ^d.
    Space { dim: usize },
}

/// An interval of the real line; `lo > hi` encodes the empty set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub const LINE: Interval = Interval {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
        lo_closed: false,
        hi_closed: false,
    };

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi || (self.lo == self.hi && !(self.lo_closed && self.hi_closed))
    }

    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lo_closed { x >= self.lo } else { x > self.lo };
        let below = if self.hi_closed { x <= self.hi } else { x < self.hi };
        above && below
    }

    fn intersect(self, o: Interval) -> Interval {
        let (lo, lo_closed) = match self.lo.partial_cmp(&o.lo).expect("no NaN") {
            std::cmp::Ordering::Greater => (self.lo, self.lo_closed),
            std::cmp::Ordering::Less => (o.lo, o.lo_closed),
            std::cmp::Ordering::Equal => (self.lo, self.lo_closed && o.lo_closed),
        };
        let (hi, hi_closed) = match self.hi.partial_cmp(&o.hi).expect("no NaN") {
            std::cmp::Ordering::Less => (self.hi, self.hi_closed),
            std::cmp::Ordering::Greater => (o.hi, o.hi_closed),
            std::cmp::Ordering::Equal => (self.hi, self.hi_closed && o.hi_closed),
        };
        Interval {
            lo,
            hi,
            lo_closed,
            hi_closed,
        }
    }

    fn affine(self, scale: f64, shift: f64) -> Interval {
        let (a, b) = (self.lo * scale + shift, self.hi * scale + shift);
        if scale > 0.0 {
            Interval {
                lo: a,
                hi: b,
                ..self
            }
        } else {
            Interval {
                lo: b,
                hi: a,
                lo_closed: self.hi_closed,
                hi_closed: self.lo_closed,
            }
        }
    }
}

impl ConvexSet {
    pub fn halfspace(normal: Vec<f64>, offset: f64, open: bool) -> Result<Self> {
        ConvexSet::HalfSpace {
            normal,
            offset,
            open,
        }
        .validated()
    }

    pub fn ball(center: Vec<f64>, radius: f64, norm: Norm, open: bool) -> Result<Self> {
        ConvexSet::Ball {
            center,
            radius,
            norm,
            open,
        }
        .validated()
    }

    pub fn polytope(dim: usize, constraints: Vec<Constraint>) -> Result<Self> {
        ConvexSet::HPolytope { dim, constraints }.validated()
    }

    pub fn intersection(sets: Vec<ConvexSet>) -> Result<Self> {
        ConvexSet::Intersection(sets).validated()
    }

    pub fn translate(inner: ConvexSet, shift: Vec<f64>) -> Result<Self> {
        ConvexSet::Translate {
            inner: Box::new(inner),
            shift,
        }
        .validated()
    }

    pub fn dilate(inner: ConvexSet, factor: f64) -> Result<Self> {
        ConvexSet::Dilate {
            inner: Box::new(inner),
            factor,
        }
        .validated()
    }

    pub fn space(dim: usize) -> Self {
        ConvexSet::Space { dim }
    }

    /// The closed interval `[lo, hi]`; infinite ends are allowed.
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Self::interval_with(lo, hi, false)
    }

    /// The open interval `(lo, hi)`.
    pub fn open_interval(lo: f64, hi: f64) -> Result<Self> {
        Self::interval_with(lo, hi, true)
    }

    fn interval_with(lo: f64, hi: f64, open: bool) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
            return Err(Error::invalid("bad interval bounds"));
        }
        let mut parts = Vec::new();
        if hi.is_finite() {
            parts.push(ConvexSet::halfspace(vec![1.0], hi, open)?);
        }
        if lo.is_finite() {
            parts.push(ConvexSet::halfspace(vec![-1.0], -lo, open)?);
        }
        match parts.len() {
            0 => Ok(ConvexSet::space(1)),
            1 => Ok(parts.pop().expect("one")),
            _ => ConvexSet::intersection(parts),
        }
    }

    /// The closed singleton `{p}`.
    pub fn singleton(p: &[f64]) -> Result<Self> {
        let d = p.len();
        let mut constraints = Vec::with_capacity(2 * d);
        for (i, &pi) in p.iter().enumerate() {
            let mut e = vec![0.0; d];
            e[i] = 1.0;
            constraints.push(Constraint {
                normal: e.clone(),
                offset: pi,
            });
            e[i] = -1.0;
            constraints.push(Constraint {
                normal: e,
                offset: -pi,
            });
        }
        ConvexSet::polytope(d, constraints)
    }

    fn validated(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    /// Checks the constructor invariants and returns the dimension, or
    /// `None` for an empty intersection list (which constrains nothing).
    pub fn validate(&self) -> Result<Option<usize>> {
        match self {
            ConvexSet::HalfSpace { normal, offset, .. } => {
                if normal.is_empty() || normal.iter().all(|v| *v == 0.0) {
                    return Err(Error::invalid("half-space normal must be non-zero"));
                }
                if normal.iter().any(|v| !v.is_finite()) || !offset.is_finite() {
                    return Err(Error::invalid("half-space data must be finite"));
                }
                Ok(Some(normal.len()))
            }
            ConvexSet::Ball { center, radius, .. } => {
                if center.is_empty() || center.iter().any(|v| !v.is_finite()) {
                    return Err(Error::invalid("ball centre must be finite and non-empty"));
                }
                if !(*radius > 0.0 && radius.is_finite()) {
                    return Err(Error::invalid("ball radius must be positive"));
                }
                Ok(Some(center.len()))
            }
            ConvexSet::HPolytope { dim, constraints } => {
                if *dim == 0 {
                    return Err(Error::invalid("polytope dimension must be positive"));
                }
                for c in constraints {
                    check_dim(*dim, c.normal.len())?;
                    if c.normal.iter().all(|v| *v == 0.0) {
                        return Err(Error::invalid("constraint normal must be non-zero"));
                    }
                    if c.normal.iter().any(|v| !v.is_finite()) || !c.offset.is_finite() {
                        return Err(Error::invalid("constraint data must be finite"));
                    }
                }
                Ok(Some(*dim))
            }
            ConvexSet::Intersection(sets) => {
                let mut dim = None;
                for s in sets {
                    if let Some(d) = s.validate()? {
                        match dim {
                            None => dim = Some(d),
                            Some(e) => check_dim(e, d)?,
                        }
                    }
                }
                Ok(dim)
            }
            ConvexSet::Translate { inner, shift } => {
                if shift.iter().any(|v| !v.is_finite()) {
                    return Err(Error::invalid("shift must be finite"));
                }
                match inner.validate()? {
                    Some(d) => check_dim(d, shift.len()).map(|_| Some(d)),
                    None => Ok(Some(shift.len())),
                }
            }
            ConvexSet::Dilate { inner, factor } => {
                if *factor == 0.0 || !factor.is_finite() {
                    return Err(Error::invalid("dilation factor must be finite and non-zero"));
                }
                inner.validate()
            }
            ConvexSet::Space { dim } => {
                if *dim == 0 {
                    return Err(Error::invalid("dimension must be positive"));
                }
                Ok(Some(*dim))
            }
        }
    }

    /// Dimension of the ambient space, when the tree determines it.
    pub fn dim(&self) -> Option<usize> {
        self.validate().ok().flatten()
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        match self.dim() {
            Some(d) => check_dim(d, x.len()),
            None => Ok(()),
        }
    }

    /// Literal membership.
    pub fn contains(&self, x: &[f64]) -> Result<bool> {
        self.check_point(x)?;
        Ok(self.member(x, false))
    }

    /// Membership in the set with every strict inequality relaxed.
    pub fn contains_closure(&self, x: &[f64]) -> Result<bool> {
        self.check_point(x)?;
        Ok(self.member(x, true))
    }

    /// Unchecked membership; `x` must have the set's dimension.
    pub(crate) fn member(&self, x: &[f64], closed: bool) -> bool {
        match self {
            ConvexSet::HalfSpace {
                normal,
                offset,
                open,
            } => {
                let s = dot(normal, x);
                if *open && !closed {
                    s < *offset
                } else {
                    s <= *offset
                }
            }
            ConvexSet::Ball {
                center,
                radius,
                norm,
                open,
            } => {
                let r = norm.dist(x, center);
                if *open && !closed {
                    r < *radius
                } else {
                    r <= *radius
                }
            }
            ConvexSet::HPolytope { constraints, .. } => {
                constraints.iter().all(|c| dot(&c.normal, x) <= c.offset)
            }
            ConvexSet::Intersection(sets) => sets.iter().all(|s| s.member(x, closed)),
            ConvexSet::Translate { inner, shift } => {
                let y: Vec<f64> = x.iter().zip(shift).map(|(a, b)| a - b).collect();
                inner.member(&y, closed)
            }
            ConvexSet::Dilate { inner, factor } => {
                let y: Vec<f64> = x.iter().map(|a| a / factor).collect();
                inner.member(&y, closed)
            }
            ConvexSet::Space { .. } => true,
        }
    }

    /// The set as an interval, for one-dimensional trees.
    pub fn as_interval(&self) -> Option<Interval> {
        if self.dim() != Some(1) {
            return None;
        }
        self.interval_1d()
    }

    fn interval_1d(&self) -> Option<Interval> {
        Some(match self {
            ConvexSet::HalfSpace {
                normal,
                offset,
                open,
            } => {
                let (a, c) = (normal[0], *offset);
                let edge = c / a;
                if a > 0.0 {
                    Interval {
                        hi: edge,
                        hi_closed: !open,
                        ..Interval::LINE
                    }
                } else {
                    Interval {
                        lo: edge,
                        lo_closed: !open,
                        ..Interval::LINE
                    }
                }
            }
            ConvexSet::Ball {
                center,
                radius,
                open,
                ..
            } => Interval {
                lo: center[0] - radius,
                hi: center[0] + radius,
                lo_closed: !open,
                hi_closed: !open,
            },
            ConvexSet::HPolytope { constraints, .. } => {
                let mut acc = Interval::LINE;
                for c in constraints {
                    let part = ConvexSet::HalfSpace {
                        normal: c.normal.clone(),
                        offset: c.offset,
                        open: false,
                    }
                    .interval_1d()?;
                    acc = acc.intersect(part);
                }
                acc
            }
            ConvexSet::Intersection(sets) => {
                let mut acc = Interval::LINE;
                for s in sets {
                    acc = acc.intersect(s.interval_1d()?);
                }
                acc
            }
            ConvexSet::Translate { inner, shift } => inner.interval_1d()?.affine(1.0, shift[0]),
            ConvexSet::Dilate { inner, factor } => inner.interval_1d()?.affine(*factor, 0.0),
            ConvexSet::Space { .. } => Interval::LINE,
        })
    }

    /// Axis-aligned bounds containing the set (possibly infinite).
    pub fn bounding_box(&self) -> Option<Vec<(f64, f64)>> {
        let d = self.dim()?;
        Some(self.bbox(d))
    }

    fn bbox(&self, d: usize) -> Vec<(f64, f64)> {
        let line = vec![(f64::NEG_INFINITY, f64::INFINITY); d];
        match self {
            ConvexSet::Ball { center, radius, .. } => {
                center.iter().map(|c| (c - radius, c + radius)).collect()
            }
            ConvexSet::HalfSpace { .. } | ConvexSet::HPolytope { .. } => {
                let constraints: Vec<(&[f64], f64)> = match self {
                    ConvexSet::HalfSpace { normal, offset, .. } => vec![(normal, *offset)],
                    ConvexSet::HPolytope { constraints, .. } => {
                        constraints.iter().map(|c| (&c.normal[..], c.offset)).collect()
                    }
                    _ => unreachable!(),
                };
                let mut b = line;
                for (n, off) in constraints {
                    let nz: Vec<usize> = (0..d).filter(|&i| n[i] != 0.0).collect();
                    if let [i] = nz[..] {
                        let edge = off / n[i];
                        if n[i] > 0.0 {
                            b[i].1 = b[i].1.min(edge);
                        } else {
                            b[i].0 = b[i].0.max(edge);
                        }
                    }
                }
                b
            }
            ConvexSet::Intersection(sets) => {
                let mut b = line;
                for s in sets {
                    for (acc, part) in b.iter_mut().zip(s.bbox(d)) {
                        acc.0 = acc.0.max(part.0);
                        acc.1 = acc.1.min(part.1);
                    }
                }
                b
            }
            ConvexSet::Translate { inner, shift } => inner
                .bbox(d)
                .into_iter()
                .zip(shift)
                .map(|((lo, hi), s)| (lo + s, hi + s))
                .collect(),
            ConvexSet::Dilate { inner, factor } => inner
                .bbox(d)
                .into_iter()
                .map(|(lo, hi)| {
                    let (a, b) = (lo * factor, hi * factor);
                    if *factor > 0.0 {
                        (a, b)
                    } else {
                        (b, a)
                    }
                })
                .collect(),
            ConvexSet::Space { .. } => line,
        }
    }

    /// Whether the set is certainly empty. Exact for one-dimensional sets;
    /// in higher dimensions only empty bounding boxes are detected.
    pub fn is_certainly_empty(&self) -> bool {
        if let Some(iv) = self.as_interval() {
            return iv.is_empty();
        }
        self.bounding_box()
            .is_some_and(|b| b.iter().any(|(lo, hi)| lo > hi))
    }

    /// Minkowski gauge `inf{t ≥ 0 : x ∈ tC}`.
    ///
    /// Requires the origin in the closure of `C`. Certainly-empty sets
    /// have gauge `+∞` away from the origin.
    pub fn gauge(&self, x: &[f64]) -> Result<ExtReal> {
        self.check_point(x)?;
        if x.iter().all(|v| *v == 0.0) {
            return Ok(ExtReal::ZERO);
        }
        let origin = vec![0.0; x.len()];
        if !self.member(&origin, true) {
            if self.is_certainly_empty() {
                return Ok(ExtReal::POS_INF);
            }
            return Err(Error::OriginNotInSet);
        }
        match self {
            ConvexSet::HalfSpace { normal, offset, .. } => {
                let s = dot(normal, x);
                Ok(if s <= 0.0 {
                    ExtReal::ZERO
                } else if *offset > 0.0 {
                    ExtReal::of(s / offset)
                } else {
                    ExtReal::POS_INF
                })
            }
            ConvexSet::Ball {
                center,
                radius,
                norm,
                ..
            } if center.iter().all(|c| *c == 0.0) => Ok(ExtReal::of(norm.eval(x) / radius)),
            ConvexSet::Space { .. } => Ok(ExtReal::ZERO),
            _ => Ok(self.gauge_bisect(x)),
        }
    }

    /// Gauge by bisection on `t ↦ [x/t ∈ C̄]`, valid whenever `0 ∈ C̄`.
    pub fn gauge_bisect(&self, x: &[f64]) -> ExtReal {
        let inside = |t: f64| {
            let y: Vec<f64> = x.iter().map(|v| v / t).collect();
            self.member(&y, true)
        };
        let (mut lo, mut hi);
        if inside(1.0) {
            hi = 1.0;
            lo = 0.5;
            while inside(lo) {
                hi = lo;
                lo *= 0.5;
                if lo < GAUGE_T_MIN {
                    return ExtReal::ZERO;
                }
            }
        } else {
            lo = 1.0;
            hi = 2.0;
            while !inside(hi) {
                lo = hi;
                hi *= 2.0;
                if hi > GAUGE_T_MAX {
                    return ExtReal::POS_INF;
                }
            }
        }
        while hi - lo > GAUGE_REL_TOL * hi {
            let mid = 0.5 * (lo + hi);
            if inside(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        ExtReal::of(0.5 * (lo + hi))
    }

    /// Whether `x` is an internal point: `M_{C−x}` finite in every direction.
    ///
    /// In ℝ^d it suffices to probe the `2d` signed basis directions: if
    /// `x ± s_i e_i ∈ C̄` for all `i`, the cross-polytope they span lies in
    /// `C̄` and `x` is interior. Points outside `C̄` are never internal.
    pub fn is_internal_point(&self, x: &[f64]) -> Result<bool> {
        self.check_point(x)?;
        if !self.member(x, true) {
            return Ok(false);
        }
        let shifted = ConvexSet::Translate {
            inner: Box::new(self.clone()),
            shift: x.iter().map(|v| -v).collect(),
        };
        let mut e = vec![0.0; x.len()];
        for i in 0..x.len() {
            for sign in [1.0, -1.0] {
                e[i] = sign;
                if !shifted.gauge_bisect(&e).is_finite() {
                    return Ok(false);
                }
            }
            e[i] = 0.0;
        }
        Ok(true)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
enum RawSet {
    Halfspace {
        normal: Vec<f64>,
        offset: f64,
        #[serde(default)]
        open: bool,
    },
    Ball {
        center: Vec<f64>,
        radius: f64,
        norm: Norm,
        #[serde(default)]
        open: bool,
    },
    Polytope {
        dim: usize,
        constraints: Vec<Constraint>,
    },
    Intersection {
        sets: Vec<RawSet>,
    },
    Translate {
        inner: Box<RawSet>,
        shift: Vec<f64>,
    },
    Dilate {
        inner: Box<RawSet>,
        factor: f64,
    },
    Space {
        dim: usize,
    },
    /// Shorthand for a 1-d interval; `null` ends are unbounded.
    Interval {
        lo: Option<f64>,
        hi: Option<f64>,
        #[serde(default)]
        open: bool,
    },
    /// Shorthand for a closed singleton.
    Point {
        point: Vec<f64>,
    },
}

impl TryFrom<RawSet> for ConvexSet {
    type Error = Error;

    fn try_from(raw: RawSet) -> Result<Self> {
        match raw {
            RawSet::Halfspace {
                normal,
                offset,
                open,
            } => ConvexSet::halfspace(normal, offset, open),
            RawSet::Ball {
                center,
                radius,
                norm,
                open,
            } => ConvexSet::ball(center, radius, norm, open),
            RawSet::Polytope { dim, constraints } => ConvexSet::polytope(dim, constraints),
            RawSet::Intersection { sets } => ConvexSet::intersection(
                sets.into_iter()
                    .map(ConvexSet::try_from)
                    .collect::<Result<_>>()?,
            ),
            RawSet::Translate { inner, shift } => ConvexSet::translate((*inner).try_into()?, shift),
            RawSet::Dilate { inner, factor } => ConvexSet::dilate((*inner).try_into()?, factor),
            RawSet::Space { dim } => ConvexSet::Space { dim }.validated(),
            RawSet::Interval { lo, hi, open } => ConvexSet::interval_with(
                lo.unwrap_or(f64::NEG_INFINITY),
                hi.unwrap_or(f64::INFINITY),
                open,
            ),
            RawSet::Point { point } => ConvexSet::singleton(&point),
        }
    }
}

impl From<ConvexSet> for RawSet {
    fn from(set: ConvexSet) -> Self {
        match set {
            ConvexSet::HalfSpace {
                normal,
                offset,
                open,
            } => RawSet::Halfspace {
                normal,
                offset,
                open,
            },
            ConvexSet::Ball {
                center,
                radius,
                norm,
                open,
            } => RawSet::Ball {
                center,
                radius,
                norm,
                open,
            },
            ConvexSet::HPolytope { dim, constraints } => RawSet::Polytope { dim, constraints },
            ConvexSet::Intersection(sets) => RawSet::Intersection {
                sets: sets.into_iter().map(RawSet::from).collect(),
            },
            ConvexSet::Translate { inner, shift } => RawSet::Translate {
                inner: Box::new((*inner).into()),
                shift,
            },
            ConvexSet::Dilate { inner, factor } => RawSet::Dilate {
                inner: Box::new((*inner).into()),
                factor,
            },
            ConvexSet::Space { dim } => RawSet::Space { dim },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unit_box_open() -> ConvexSet {
        ConvexSet::ball(vec![0.0, 0.0], 1.0, Norm::Linf, true).unwrap()
    }

    fn triangle() -> ConvexSet {
        ConvexSet::polytope(
            2,
            vec![
                Constraint { normal: vec![1.0, 1.0], offset: 1.0 },
                Constraint { normal: vec![-1.0, 0.0], offset: 0.0 },
                Constraint { normal: vec![0.0, -1.0], offset: 0.0 },
            ],
        )
        .unwrap()
    }

    #[test]
    fn membership_examples() {
        let b = unit_box_open();
        assert!(!b.contains(&[1.0, 0.0]).unwrap());
        assert!(b.contains_closure(&[1.0, 0.0]).unwrap());
        let h = ConvexSet::halfspace(vec![1.0], 0.0, true).unwrap();
        assert!(h.contains(&[-1.0]).unwrap());
        assert!(!h.contains(&[0.0]).unwrap());
        let seg = ConvexSet::polytope(
            1,
            vec![
                Constraint { normal: vec![-1.0], offset: 0.0 },
                Constraint { normal: vec![1.0], offset: 1.0 },
            ],
        )
        .unwrap();
        assert!(seg.contains(&[0.5]).unwrap());
        assert_eq!(
            seg.contains(&[0.5, 0.5]).unwrap_err(),
            Error::DimensionMismatch { expected: 1, got: 2 }
        );
    }

    #[test]
    fn invariants_enforced() {
        assert!(ConvexSet::halfspace(vec![0.0, 0.0], 1.0, false).is_err());
        assert!(ConvexSet::ball(vec![0.0], 0.0, Norm::L2, false).is_err());
        let b = unit_box_open();
        assert!(ConvexSet::dilate(b.clone(), 0.0).is_err());
        assert!(ConvexSet::translate(b.clone(), vec![1.0]).is_err());
        assert!(ConvexSet::intersection(vec![b, ConvexSet::space(3)]).is_err());
    }

    #[test]
    fn gauge_examples() {
        let b = unit_box_open();
        assert_eq!(b.gauge(&[3.0, -4.0]).unwrap(), ExtReal::of(4.0));
        // Same set through the bisection path.
        let g = b.gauge_bisect(&[3.0, -4.0]).value();
        assert!((g - 4.0).abs() < 1e-9 * 4.0, "{g}");
        assert_eq!(triangle().gauge(&[0.0, 0.0]).unwrap(), ExtReal::ZERO);

        let h = ConvexSet::halfspace(vec![1.0], 1.0, true).unwrap();
        assert_eq!(h.gauge(&[2.0]).unwrap(), ExtReal::of(2.0));
        assert_eq!(h.gauge(&[-5.0]).unwrap(), ExtReal::ZERO);
        assert!((h.gauge_bisect(&[2.0]).value() - 2.0).abs() < 1e-9);
        assert_eq!(h.gauge_bisect(&[-5.0]).value(), 0.0);
    }

    #[test]
    fn gauge_needs_origin() {
        let far = ConvexSet::ball(vec![5.0], 1.0, Norm::L2, false).unwrap();
        assert_eq!(far.gauge(&[1.0]).unwrap_err(), Error::OriginNotInSet);
        let empty = ConvexSet::intersection(vec![
            ConvexSet::interval(2.0, 3.0).unwrap(),
            ConvexSet::interval(4.0, 5.0).unwrap(),
        ])
        .unwrap();
        assert_eq!(empty.gauge(&[1.0]).unwrap(), ExtReal::POS_INF);
        assert_eq!(empty.gauge(&[0.0]).unwrap(), ExtReal::ZERO);
    }

    #[test]
    fn gauge_of_polytope_matches_facet_formula() {
        // For 0 in the interior of {⟨a_i,x⟩ ≤ b_i}, M(x) = max_i ⟨a_i,x⟩/b_i ∨ 0.
        let p = ConvexSet::polytope(
            2,
            vec![
                Constraint { normal: vec![1.0, 0.5], offset: 2.0 },
                Constraint { normal: vec![-1.0, 0.0], offset: 1.0 },
                Constraint { normal: vec![0.0, -1.0], offset: 3.0 },
            ],
        )
        .unwrap();
        for x in [[1.0, 1.0], [-2.0, 0.3], [0.5, -7.0], [4.0, 4.0]] {
            let oracle = [(1.0 * x[0] + 0.5 * x[1]) / 2.0, -x[0] / 1.0, -x[1] / 3.0]
                .into_iter()
                .fold(0.0f64, f64::max);
            let g = p.gauge(&x).unwrap().value();
            assert!((g - oracle).abs() <= 1e-9 * oracle.max(1.0), "{x:?} {g} {oracle}");
        }
    }

    #[test]
    fn internal_point_examples() {
        let seg = ConvexSet::interval(0.0, 1.0).unwrap();
        assert!(seg.is_internal_point(&[0.5]).unwrap());
        assert!(!seg.is_internal_point(&[1.0]).unwrap());
        assert!(!seg.is_internal_point(&[0.0]).unwrap());
        assert!(triangle().is_internal_point(&[0.2, 0.2]).unwrap());
        assert!(!triangle().is_internal_point(&[0.5, 0.5]).unwrap());
        assert!(!triangle().is_internal_point(&[0.0, 0.2]).unwrap());
        // A flat set has no internal point.
        let flat = ConvexSet::singleton(&[0.3, 0.3]).unwrap();
        assert!(!flat.is_internal_point(&[0.3, 0.3]).unwrap());
    }

    /// Interior by explicit margin: every constraint slack positive.
    #[test]
    fn internal_points_agree_with_margin_oracle() {
        let t = triangle();
        for i in 0..=20 {
            for j in 0..=20 {
                let x = [i as f64 / 20.0, j as f64 / 20.0];
                if !t.contains_closure(&x).unwrap() {
                    continue;
                }
                let margin = [1.0 - x[0] - x[1], x[0], x[1]]
                    .into_iter()
                    .fold(f64::INFINITY, f64::min);
                assert_eq!(t.is_internal_point(&x).unwrap(), margin > 1e-12, "{x:?}");
            }
        }
    }

    #[test]
    fn intervals() {
        let iv = ConvexSet::open_interval(-0.1, 0.1).unwrap().as_interval().unwrap();
        assert!(iv.contains(0.0) && !iv.contains(0.1));
        let iv = ConvexSet::interval(0.5, f64::INFINITY).unwrap().as_interval().unwrap();
        assert!(iv.contains(0.5) && iv.contains(1e9) && !iv.contains(0.49));
        let d = ConvexSet::dilate(
            ConvexSet::translate(ConvexSet::interval(0.0, 1.0).unwrap(), vec![1.0]).unwrap(),
            -2.0,
        )
        .unwrap();
        let iv = d.as_interval().unwrap();
        assert_eq!((iv.lo, iv.hi), (-4.0, -2.0));
        assert!(d.contains(&[-3.0]).unwrap());
        assert!(ConvexSet::singleton(&[0.0]).unwrap().as_interval().unwrap().contains(0.0));
    }

    #[test]
    fn bounding_boxes() {
        let b = ConvexSet::ball(vec![1.0, 2.0], 0.5, Norm::L2, true).unwrap();
        assert_eq!(b.bounding_box().unwrap(), vec![(0.5, 1.5), (1.5, 2.5)]);
        let t = triangle().bounding_box().unwrap();
        assert_eq!(t, vec![(0.0, f64::INFINITY), (0.0, f64::INFINITY)]);
    }

    #[test]
    fn json_grammar() {
        let s: ConvexSet = serde_json::from_str(
            r#"{"type":"ball","norm":"linf","center":[0,0],"radius":1,"open":true}"#,
        )
        .unwrap();
        assert_eq!(s, unit_box_open());
        let s: ConvexSet = serde_json::from_str(
            r#"{"type":"translate","shift":[2],"inner":{"type":"interval","lo":-1,"hi":null}}"#,
        )
        .unwrap();
        assert!(s.contains(&[1.0]).unwrap() && !s.contains(&[0.9]).unwrap());
        let back: ConvexSet = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(back, s);
        assert!(serde_json::from_str::<ConvexSet>(r#"{"type":"ball","norm":"l3","center":[0],"radius":1}"#).is_err());
        assert!(serde_json::from_str::<ConvexSet>(r#"{"type":"point","point":[0],"extra":0}"#).is_err());
    }

    fn symmetric_sets() -> Vec<ConvexSet> {
        vec![
            ConvexSet::ball(vec![0.0, 0.0], 1.5, Norm::L1, false).unwrap(),
            ConvexSet::ball(vec![0.0, 0.0], 0.7, Norm::L2, true).unwrap(),
            unit_box_open(),
            ConvexSet::polytope(
                2,
                vec![
                    Constraint { normal: vec![1.0, 2.0], offset: 1.0 },
                    Constraint { normal: vec![-1.0, -2.0], offset: 1.0 },
                    Constraint { normal: vec![1.0, -1.0], offset: 2.0 },
                    Constraint { normal: vec![-1.0, 1.0], offset: 2.0 },
                ],
            )
            .unwrap(),
            ConvexSet::dilate(unit_box_open(), -3.0).unwrap(),
        ]
    }

    proptest! {
        #[test]
        fn gauge_is_positively_homogeneous(x in prop::array::uniform2(-5.0f64..5.0), t in 0.0f64..10.0, which in 0usize..5) {
            let c = &symmetric_sets()[which];
            let g = c.gauge(&x).unwrap().value();
            let tx = [t * x[0], t * x[1]];
            let gt = c.gauge(&tx).unwrap().value();
            prop_assert!((gt - t * g).abs() <= 1e-8 * (1.0 + t * g));
        }

        #[test]
        fn gauge_is_subadditive_on_symmetric_sets(x in prop::array::uniform2(-5.0f64..5.0), y in prop::array::uniform2(-5.0f64..5.0), which in 0usize..5) {
            let c = &symmetric_sets()[which];
            let s = [x[0] + y[0], x[1] + y[1]];
            let lhs = c.gauge(&s).unwrap().value();
            let rhs = c.gauge(&x).unwrap().value() + c.gauge(&y).unwrap().value();
            prop_assert!(lhs <= rhs + 1e-8 * (1.0 + rhs));
        }

        #[test]
        fn open_sets_are_gauge_sublevel_sets(x in prop::array::uniform2(-3.0f64..3.0), which in 1usize..3) {
            let c = &symmetric_sets()[which];
            let g = c.gauge(&x).unwrap().value();
            if (g - 1.0).abs() > 1e-8 {
                prop_assert_eq!(c.contains(&x).unwrap(), g < 1.0);
            }
        }

        #[test]
        fn translate_and_dilate_are_coherent(x in prop::array::uniform2(-3.0f64..3.0), v in prop::array::uniform2(-2.0f64..2.0), t in 0.1f64..4.0) {
            let c = triangle();
            let tr = ConvexSet::translate(c.clone(), v.to_vec()).unwrap();
            let shifted = [x[0] - v[0], x[1] - v[1]];
            prop_assert_eq!(tr.contains(&x).unwrap(), c.contains(&shifted).unwrap());
            let di = ConvexSet::dilate(c.clone(), t).unwrap();
            prop_assert_eq!(di.contains(&x).unwrap(), c.contains(&[x[0] / t, x[1] / t]).unwrap());
        }
    }
}
