//! Thin-rod domains and their stretched reference geometry.
//!
//! A rod domain lives along the x1 axis between `ell0` and `ell1` with a
//! cross-section of diameter O(eps). All computations downstream work on the
//! stretched reference domain (y1, y2, y3) = (x1, x2/eps, x3/eps), which is
//! independent of eps; the thinness parameter reappears as a coefficient in
//! the assembled operator.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sampling density used when a closed-form extremum is not available for
/// the area bounds.
pub const AREA_BOUNDS_SAMPLES: usize = 1024;

/// Closed-form bound functions selectable by name in study configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Profile {
    /// h(x1) = value.
    Constant { value: f64 },
    /// h(x1) = offset + amplitude * sin(pi * (x1 - ell0) / (ell1 - ell0)).
    SinBump { offset: f64, amplitude: f64 },
    /// h(x1) = left for x1 < at, right for x1 >= at (right-continuous jump).
    Step { left: f64, right: f64, at: f64 },
}

impl Profile {
    pub fn eval(&self, x1: f64, ell0: f64, ell1: f64) -> f64 {
        match *self {
            Profile::Constant { value } => value,
            Profile::SinBump { offset, amplitude } => {
                let t = (x1 - ell0) / (ell1 - ell0);
                offset + amplitude * (std::f64::consts::PI * t).sin()
            }
            Profile::Step { left, right, at } => {
                if x1 < at {
                    left
                } else {
                    right
                }
            }
        }
    }

    /// Interior jump points, sorted.
    pub fn discontinuities(&self) -> Vec<f64> {
        match *self {
            Profile::Step { at, .. } => vec![at],
            _ => Vec::new(),
        }
    }

    /// Exact (min, max) over [ell0, ell1].
    pub fn bounds(&self, ell0: f64, ell1: f64) -> (f64, f64) {
        match *self {
            Profile::Constant { value } => (value, value),
            Profile::SinBump { offset, amplitude } => {
                // sin factor spans [0, 1] over the interval, extremum at the midpoint
                let _ = (ell0, ell1);
                if amplitude >= 0.0 {
                    (offset, offset + amplitude)
                } else {
                    (offset + amplitude, offset)
                }
            }
            Profile::Step { left, right, .. } => (left.min(right), left.max(right)),
        }
    }

    /// Lipschitz constant when the profile is Lipschitz.
    pub fn lipschitz(&self, ell0: f64, ell1: f64) -> Option<f64> {
        match *self {
            Profile::Constant { .. } => Some(0.0),
            Profile::SinBump { amplitude, .. } => {
                Some(amplitude.abs() * std::f64::consts::PI / (ell1 - ell0))
            }
            Profile::Step { .. } => None,
        }
    }

    fn validate(&self, ell0: f64, ell1: f64) -> Result<()> {
        let (lo, hi) = self.bounds(ell0, ell1);
        if !(lo.is_finite() && hi.is_finite()) || lo <= 0.0 {
            return Err(Error::Geometry(format!(
                "profile bounds ({lo}, {hi}) must be finite and positive"
            )));
        }
        if let Profile::Step { at, .. } = *self {
            if at <= ell0 || at >= ell1 {
                return Err(Error::Geometry(format!(
                    "step location {at} must lie strictly inside ({ell0}, {ell1})"
                )));
            }
        }
        Ok(())
    }
}

/// Catalog label for the rod geometry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RodKind {
    Prism,
    TwoPrism,
    ProfiledHeight,
    ProfiledWidth,
    ProfiledBox,
}

/// Cross-section description, axis-aligned rectangles throughout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CrossSection {
    /// Constant rectangle (0, width) x (0, height).
    Rectangle { width: f64, height: f64 },
    /// Outer square (-outer_half, outer_half)^2 before the junction, inner
    /// square after it. The junction plane belongs to the narrow prism.
    TwoSquare {
        outer_half: f64,
        inner_half: f64,
        junction: f64,
    },
    /// (0, 1) x (0, h(x1)).
    HeightProfile { profile: Profile },
    /// (0, h(x1)) x (0, 1).
    WidthProfile { profile: Profile },
    /// (-h1(x1), h2(x1)) x (-h3(x1), h4(x1)).
    BoxProfile {
        left: Profile,
        right: Profile,
        down: Profile,
        up: Profile,
    },
}

/// How a pair of area bounds was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AreaBounds {
    pub c0: f64,
    pub c1: f64,
    pub exact: bool,
    /// Sampling density used when `exact` is false.
    pub samples: Option<usize>,
}

/// A thin rod domain: axial interval, cross-section family and eps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RodDomain {
    ell0: f64,
    ell1: f64,
    eps: f64,
    section: CrossSection,
}

impl RodDomain {
    pub fn new(ell0: f64, ell1: f64, eps: f64, section: CrossSection) -> Result<Self> {
        if !(ell0 < ell1) || !ell0.is_finite() || !ell1.is_finite() {
            return Err(Error::Geometry(format!(
                "axial interval ({ell0}, {ell1}) must be finite with ell0 < ell1"
            )));
        }
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(Error::Geometry(format!("eps {eps} must lie in (0, 1]")));
        }
        match &section {
            CrossSection::Rectangle { width, height } => {
                if *width <= 0.0 || *height <= 0.0 {
                    return Err(Error::Geometry("rectangle extents must be positive".into()));
                }
            }
            CrossSection::TwoSquare {
                outer_half,
                inner_half,
                junction,
            } => {
                if *outer_half <= 0.0 || *inner_half <= 0.0 || *inner_half >= *outer_half {
                    return Err(Error::Geometry(
                        "two-prism squares need 0 < inner_half < outer_half".into(),
                    ));
                }
                // The conforming junction mesh relies on the 2:1 nesting of the
                // catalog geometry.
                if (*inner_half * 2.0 - *outer_half).abs() > 1e-12 * outer_half.abs() {
                    return Err(Error::Geometry(
                        "two-prism inner square must be half the outer square".into(),
                    ));
                }
                if *junction <= ell0 || *junction >= ell1 {
                    return Err(Error::Geometry(format!(
                        "junction {junction} must lie strictly inside ({ell0}, {ell1})"
                    )));
                }
            }
            CrossSection::HeightProfile { profile } | CrossSection::WidthProfile { profile } => {
                profile.validate(ell0, ell1)?;
            }
            CrossSection::BoxProfile {
                left,
                right,
                down,
                up,
            } => {
                for p in [left, right, down, up] {
                    p.validate(ell0, ell1)?;
                }
            }
        }
        Ok(RodDomain {
            ell0,
            ell1,
            eps,
            section,
        })
    }

    /// Unit-section prism (0, ell1) x (0,1) x (0,1).
    pub fn prism(ell1: f64, eps: f64) -> Result<Self> {
        RodDomain::new(
            0.0,
            ell1,
            eps,
            CrossSection::Rectangle {
                width: 1.0,
                height: 1.0,
            },
        )
    }

    /// Union of two prisms: section (-1,1)^2 up to ell1/2, (-1/2,1/2)^2 after.
    pub fn two_prism(ell1: f64, eps: f64) -> Result<Self> {
        RodDomain::new(
            0.0,
            ell1,
            eps,
            CrossSection::TwoSquare {
                outer_half: 1.0,
                inner_half: 0.5,
                junction: 0.5 * ell1,
            },
        )
    }

    pub fn profiled_height(ell1: f64, eps: f64, profile: Profile) -> Result<Self> {
        RodDomain::new(0.0, ell1, eps, CrossSection::HeightProfile { profile })
    }

    pub fn profiled_width(ell1: f64, eps: f64, profile: Profile) -> Result<Self> {
        RodDomain::new(0.0, ell1, eps, CrossSection::WidthProfile { profile })
    }

    pub fn ell0(&self) -> f64 {
        self.ell0
    }

    pub fn ell1(&self) -> f64 {
        self.ell1
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn section(&self) -> &CrossSection {
        &self.section
    }

    pub fn kind(&self) -> RodKind {
        match self.section {
            CrossSection::Rectangle { .. } => RodKind::Prism,
            CrossSection::TwoSquare { .. } => RodKind::TwoPrism,
            CrossSection::HeightProfile { .. } => RodKind::ProfiledHeight,
            CrossSection::WidthProfile { .. } => RodKind::ProfiledWidth,
            CrossSection::BoxProfile { .. } => RodKind::ProfiledBox,
        }
    }

    /// Interior axial coordinates where the cross-section jumps, sorted.
    pub fn discontinuities(&self) -> Vec<f64> {
        let mut d = match &self.section {
            CrossSection::Rectangle { .. } => Vec::new(),
            CrossSection::TwoSquare { junction, .. } => vec![*junction],
            CrossSection::HeightProfile { profile } | CrossSection::WidthProfile { profile } => {
                profile.discontinuities()
            }
            CrossSection::BoxProfile {
                left,
                right,
                down,
                up,
            } => {
                let mut all: Vec<f64> = [left, right, down, up]
                    .iter()
                    .flat_map(|p| p.discontinuities())
                    .collect();
                all.sort_by(f64::total_cmp);
                all.dedup();
                all
            }
        };
        d.sort_by(f64::total_cmp);
        d
    }

    /// Extents of the stretched cross-section at axial coordinate `x1`:
    /// ((y2_min, y2_max), (y3_min, y3_max)). Right limit at jumps.
    pub fn section_box(&self, x1: f64) -> Result<([f64; 2], [f64; 2])> {
        self.check_axial(x1)?;
        Ok(match &self.section {
            CrossSection::Rectangle { width, height } => ([0.0, *width], [0.0, *height]),
            CrossSection::TwoSquare {
                outer_half,
                inner_half,
                junction,
            } => {
                let h = if x1 < *junction {
                    *outer_half
                } else {
                    *inner_half
                };
                ([-h, h], [-h, h])
            }
            CrossSection::HeightProfile { profile } => {
                ([0.0, 1.0], [0.0, profile.eval(x1, self.ell0, self.ell1)])
            }
            CrossSection::WidthProfile { profile } => {
                ([0.0, profile.eval(x1, self.ell0, self.ell1)], [0.0, 1.0])
            }
            CrossSection::BoxProfile {
                left,
                right,
                down,
                up,
            } => (
                [
                    -left.eval(x1, self.ell0, self.ell1),
                    right.eval(x1, self.ell0, self.ell1),
                ],
                [
                    -down.eval(x1, self.ell0, self.ell1),
                    up.eval(x1, self.ell0, self.ell1),
                ],
            ),
        })
    }

    /// Cross-section area |D_{x1}| in the stretched reference domain.
    /// Right limit at discontinuities.
    pub fn area_profile(&self, x1: f64) -> Result<f64> {
        let (b2, b3) = self.section_box(x1)?;
        Ok((b2[1] - b2[0]) * (b3[1] - b3[0]))
    }

    /// Uniform bounds (c0, c1) with c0 <= |D_{x1}| <= c1 on [ell0, ell1].
    pub fn area_bounds(&self) -> (f64, f64) {
        let b = self.area_bounds_detailed();
        (b.c0, b.c1)
    }

    /// Bounds plus how they were obtained. Exact for the whole catalog; a
    /// dense sample is the fallback for future profile kinds.
    pub fn area_bounds_detailed(&self) -> AreaBounds {
        match self.exact_area_bounds() {
            Some((c0, c1)) => AreaBounds {
                c0,
                c1,
                exact: true,
                samples: None,
            },
            None => {
                let n = AREA_BOUNDS_SAMPLES;
                let mut c0 = f64::INFINITY;
                let mut c1 = f64::NEG_INFINITY;
                for i in 0..=n {
                    let t = i as f64 / n as f64;
                    let x = self.ell0 * (1.0 - t) + self.ell1 * t;
                    let a = self.area_profile(x).expect("sample point inside interval");
                    c0 = c0.min(a);
                    c1 = c1.max(a);
                }
                AreaBounds {
                    c0,
                    c1,
                    exact: false,
                    samples: Some(n + 1),
                }
            }
        }
    }

    fn exact_area_bounds(&self) -> Option<(f64, f64)> {
        match &self.section {
            CrossSection::Rectangle { width, height } => {
                let a = width * height;
                Some((a, a))
            }
            CrossSection::TwoSquare {
                outer_half,
                inner_half,
                ..
            } => {
                let wide = (2.0 * outer_half) * (2.0 * outer_half);
                let narrow = (2.0 * inner_half) * (2.0 * inner_half);
                Some((narrow.min(wide), narrow.max(wide)))
            }
            CrossSection::HeightProfile { profile } | CrossSection::WidthProfile { profile } => {
                let (lo, hi) = profile.bounds(self.ell0, self.ell1);
                Some((lo, hi))
            }
            CrossSection::BoxProfile {
                left,
                right,
                down,
                up,
            } => {
                // Area = (left + right)(down + up). The catalog profiles all
                // attain their extrema at the same stations (endpoints, the
                // midpoint, or step sides), so evaluating the area at the
                // union of candidate stations is exact.
                let mut candidates = vec![self.ell0, self.ell1, 0.5 * (self.ell0 + self.ell1)];
                for p in [left, right, down, up] {
                    for d in p.discontinuities() {
                        let nudge = 1e-12 * (self.ell1 - self.ell0);
                        candidates.push((d - nudge).max(self.ell0));
                        candidates.push(d);
                    }
                    if let Profile::SinBump { .. } = p {
                        // midpoint already included
                    }
                }
                let mut c0 = f64::INFINITY;
                let mut c1 = f64::NEG_INFINITY;
                for x in candidates {
                    let a = self.area_profile(x).ok()?;
                    c0 = c0.min(a);
                    c1 = c1.max(a);
                }
                Some((c0, c1))
            }
        }
    }

    /// x in G_eps -> y in G: (x1, x2/eps, x3/eps).
    pub fn stretch(&self, x: [f64; 3]) -> Result<[f64; 3]> {
        let y = [x[0], x[1] / self.eps, x[2] / self.eps];
        if !self.contains_stretched(y) {
            return Err(Error::Domain(format!(
                "point ({}, {}, {}) lies outside the thin domain",
                x[0], x[1], x[2]
            )));
        }
        Ok(y)
    }

    /// y in G -> x in G_eps.
    pub fn unstretch(&self, y: [f64; 3]) -> Result<[f64; 3]> {
        if !self.contains_stretched(y) {
            return Err(Error::Domain(format!(
                "point ({}, {}, {}) lies outside the reference domain",
                y[0], y[1], y[2]
            )));
        }
        Ok([y[0], y[1] * self.eps, y[2] * self.eps])
    }

    /// Closure membership test in the stretched domain, with a relative slack
    /// so mesh nodes on the boundary qualify.
    pub fn contains_stretched(&self, y: [f64; 3]) -> bool {
        let tol = 1e-12 * (self.ell1 - self.ell0).abs().max(1.0);
        if y[0] < self.ell0 - tol || y[0] > self.ell1 + tol {
            return false;
        }
        let x1 = y[0].clamp(self.ell0, self.ell1);
        match self.section_box(x1) {
            Ok((b2, b3)) => {
                y[1] >= b2[0] - tol
                    && y[1] <= b2[1] + tol
                    && y[2] >= b3[0] - tol
                    && y[2] <= b3[1] + tol
            }
            Err(_) => false,
        }
    }

    fn check_axial(&self, x1: f64) -> Result<()> {
        if x1 < self.ell0 || x1 > self.ell1 {
            return Err(Error::Domain(format!(
                "axial coordinate {x1} outside [{}, {}]",
                self.ell0, self.ell1
            )));
        }
        Ok(())
    }
}

/// Partition [a, b] into `n` elements with nodes on every breakpoint.
/// Elements are distributed across the sub-intervals proportionally to
/// length (largest remainder, at least one per sub-interval).
pub fn partition_with_breakpoints(a: f64, b: f64, breaks: &[f64], n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::Config("element count must be at least 1".into()));
    }
    let mut bounds = vec![a];
    for &d in breaks {
        if d <= a || d >= b {
            return Err(Error::Config(format!(
                "breakpoint {d} must lie strictly inside ({a}, {b})"
            )));
        }
        bounds.push(d);
    }
    bounds.push(b);
    for w in bounds.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::Config("breakpoints must be strictly increasing".into()));
        }
    }
    let segs = bounds.len() - 1;
    if n < segs {
        return Err(Error::Config(format!(
            "{n} elements cannot resolve {segs} segments (one element per segment minimum)"
        )));
    }
    let total = b - a;
    // Largest-remainder apportionment, deterministic tie-break by segment order.
    let mut counts = vec![1usize; segs];
    let mut frac: Vec<(usize, f64)> = Vec::with_capacity(segs);
    let mut assigned = segs;
    for (i, w) in bounds.windows(2).enumerate() {
        let share = (w[1] - w[0]) / total * n as f64;
        let extra = (share - 1.0).max(0.0);
        counts[i] += extra.floor() as usize;
        assigned += extra.floor() as usize;
        frac.push((i, extra - extra.floor()));
    }
    frac.sort_by(|l, r| r.1.total_cmp(&l.1).then(l.0.cmp(&r.0)));
    let mut k = 0;
    while assigned < n {
        counts[frac[k % segs].0] += 1;
        assigned += 1;
        k += 1;
    }
    let mut nodes = Vec::with_capacity(n + 1);
    for (i, w) in bounds.windows(2).enumerate() {
        let m = counts[i];
        for j in 0..m {
            let t = j as f64 / m as f64;
            nodes.push(w[0] * (1.0 - t) + w[1] * t);
        }
    }
    nodes.push(b);
    Ok(nodes)
}
