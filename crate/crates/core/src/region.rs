//! Compact evaluation regions inside the unit disc and their discretization.
//!
//! Text syntax (shapes joined by commas):
//! `circle:R`, `circle:R@cx,cy`, `disc:R:grid=M` (optionally `@cx,cy`),
//! `arc:R:from:to` (optionally `@cx,cy`), `point:re,im`.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::{Complex64, BOUNDARY_MARGIN};

pub const DEFAULT_SAMPLES_PER_SHAPE: usize = 512;
const GOLDEN_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    Circle { center: Complex64, radius: f64 },
    Arc { center: Complex64, radius: f64, from: f64, to: f64 },
    Disc { center: Complex64, radius: f64, rings: usize },
    Point { z: Complex64 },
}

/// A circle or arc through a sample, used to refine maxima between samples.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Curve {
    pub center: Complex64,
    pub radius: f64,
    /// Parameter bounds; `None` for a closed circle.
    pub bounds: Option<(f64, f64)>,
}

impl Curve {
    pub fn point(&self, phi: f64) -> Complex64 {
        self.center + Complex64::from_polar(self.radius, phi)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sample {
    pub z: Complex64,
    /// Index of the shape this sample belongs to.
    pub shape: usize,
    /// Curve parameter (angle about the curve center) and sample spacing.
    pub curve: Option<(Curve, f64, f64)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegionK {
    shapes: Vec<Shape>,
    samples: Vec<Sample>,
    per_shape: usize,
}

fn shape_max_modulus(s: &Shape) -> f64 {
    match *s {
        Shape::Circle { center, radius } | Shape::Disc { center, radius, .. } => center.norm() + radius,
        Shape::Point { z } => z.norm(),
        Shape::Arc { center, radius, from, to } => {
            let mut best = (center + Complex64::from_polar(radius, from))
                .norm()
                .max((center + Complex64::from_polar(radius, to)).norm());
            if center.norm() > 0.0 {
                // Farthest point from the origin is in the direction of the center.
                let phi = center.arg();
                let k = ((from - phi) / (2.0 * PI)).ceil();
                if phi + 2.0 * PI * k <= to {
                    best = best.max(center.norm() + radius);
                }
            } else {
                best = best.max(radius);
            }
            best
        }
    }
}

/// `M` equally spaced angles on `[-π, π)`, symmetric under negation.
fn circle_angles(m: usize) -> impl Iterator<Item = f64> {
    (0..m).map(move |j| PI * (2.0 * j as f64 - m as f64) / m as f64)
}

impl RegionK {
    pub fn new(shapes: Vec<Shape>) -> Result<Self> {
        Self::with_samples(shapes, DEFAULT_SAMPLES_PER_SHAPE)
    }

    pub fn with_samples(shapes: Vec<Shape>, per_shape: usize) -> Result<Self> {
        if shapes.is_empty() {
            return Err(Error::invalid("region: at least one shape is required"));
        }
        if per_shape == 0 {
            return Err(Error::invalid("region: samples per shape must be positive"));
        }
        for s in &shapes {
            Self::validate_shape(s)?;
        }
        let mut samples = Vec::new();
        for (idx, s) in shapes.iter().enumerate() {
            Self::discretize(idx, s, per_shape, &mut samples);
        }
        Ok(RegionK { shapes, samples, per_shape })
    }

    fn validate_shape(s: &Shape) -> Result<()> {
        let finite = |z: Complex64| z.re.is_finite() && z.im.is_finite();
        match *s {
            Shape::Circle { center, radius } | Shape::Disc { center, radius, .. } => {
                if !finite(center) || !radius.is_finite() || radius < 0.0 {
                    return Err(Error::invalid(format!("region: bad circle radius {radius}")));
                }
            }
            Shape::Arc { center, radius, from, to } => {
                if !finite(center) || !radius.is_finite() || radius < 0.0 || !(from <= to) || !to.is_finite() {
                    return Err(Error::invalid(format!("region: bad arc {radius}:{from}:{to}")));
                }
            }
            Shape::Point { z } => {
                if !finite(z) {
                    return Err(Error::invalid("region: non-finite point"));
                }
            }
        }
        if let Shape::Disc { rings, .. } = s {
            if *rings == 0 {
                return Err(Error::invalid("region: disc grid must be positive"));
            }
        }
        let r = shape_max_modulus(s);
        if r > 1.0 - BOUNDARY_MARGIN {
            return Err(Error::invalid(format!(
                "region: shape reaches modulus {r}; every point must satisfy |z| <= 1 - 1e-6"
            )));
        }
        Ok(())
    }

    fn discretize(idx: usize, s: &Shape, m: usize, out: &mut Vec<Sample>) {
        let push_circle = |out: &mut Vec<Sample>, center: Complex64, radius: f64, count: usize| {
            let curve = Curve { center, radius, bounds: None };
            let step = 2.0 * PI / count as f64;
            for phi in circle_angles(count) {
                out.push(Sample { z: curve.point(phi), shape: idx, curve: Some((curve, phi, step)) });
            }
        };
        match *s {
            Shape::Point { z } => out.push(Sample { z, shape: idx, curve: None }),
            Shape::Circle { center, radius } => {
                if radius == 0.0 {
                    out.push(Sample { z: center, shape: idx, curve: None });
                } else {
                    push_circle(out, center, radius, m);
                }
            }
            Shape::Disc { center, radius, rings } => {
                out.push(Sample { z: center, shape: idx, curve: None });
                if radius > 0.0 {
                    for i in 1..rings {
                        let rho = radius * i as f64 / rings as f64;
                        let count = (m * i).div_ceil(rings).max(8);
                        push_circle(out, center, rho, count);
                    }
                    push_circle(out, center, radius, m);
                }
            }
            Shape::Arc { center, radius, from, to } => {
                let curve = Curve { center, radius, bounds: Some((from, to)) };
                if m == 1 || to == from {
                    let phi = 0.5 * (from + to);
                    out.push(Sample { z: curve.point(phi), shape: idx, curve: Some((curve, phi, 0.5 * (to - from))) });
                } else {
                    let step = (to - from) / (m - 1) as f64;
                    for j in 0..m {
                        let phi = if j == m - 1 { to } else { from + step * j as f64 };
                        out.push(Sample { z: curve.point(phi), shape: idx, curve: Some((curve, phi, step)) });
                    }
                }
            }
        }
    }

    /// Parse the text syntax with the default sample count per shape.
    pub fn parse(s: &str) -> Result<Self> {
        Self::parse_with_samples(s, DEFAULT_SAMPLES_PER_SHAPE)
    }

    pub fn parse_with_samples(s: &str, per_shape: usize) -> Result<Self> {
        // Commas separate shapes and also coordinate pairs; a token that does
        // not start with a letter continues the previous shape.
        let mut specs: Vec<String> = Vec::new();
        for tok in s.split(',').map(str::trim) {
            if tok.is_empty() {
                return Err(Error::invalid(format!("region '{s}': empty component")));
            }
            if tok.starts_with(|c: char| c.is_ascii_alphabetic()) || specs.is_empty() {
                specs.push(tok.to_string());
            } else {
                let last = specs.last_mut().expect("nonempty");
                last.push(',');
                last.push_str(tok);
            }
        }
        let shapes = specs.iter().map(|t| parse_shape(t)).collect::<Result<Vec<_>>>()?;
        Self::with_samples(shapes, per_shape)
    }

    pub fn circle(radius: f64) -> Result<Self> {
        Self::new(vec![Shape::Circle { center: Complex64::new(0.0, 0.0), radius }])
    }

    pub fn disc(radius: f64, rings: usize) -> Result<Self> {
        Self::new(vec![Shape::Disc { center: Complex64::new(0.0, 0.0), radius, rings }])
    }

    pub fn points(zs: &[Complex64]) -> Result<Self> {
        Self::new(zs.iter().map(|&z| Shape::Point { z }).collect())
    }

    pub fn shapes(&self) -> &[Shape] {
        &self.shapes
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn sample_points(&self) -> Vec<Complex64> {
        self.samples.iter().map(|s| s.z).collect()
    }

    pub fn samples_per_shape(&self) -> usize {
        self.per_shape
    }

    /// Largest modulus of any point of the region (exact for the declared shapes).
    pub fn max_modulus(&self) -> f64 {
        self.shapes.iter().map(shape_max_modulus).fold(0.0, f64::max)
    }

    /// Point of largest modulus.
    pub fn max_modulus_point(&self) -> Complex64 {
        let mut best = (f64::NEG_INFINITY, Complex64::new(0.0, 0.0));
        for s in &self.shapes {
            let z = match *s {
                Shape::Point { z } => z,
                Shape::Circle { center, radius } | Shape::Disc { center, radius, .. } => {
                    let dir = if center.norm() > 0.0 { center / center.norm() } else { Complex64::new(1.0, 0.0) };
                    center + dir * radius
                }
                Shape::Arc { .. } => {
                    let r = shape_max_modulus(s);
                    self.samples
                        .iter()
                        .map(|x| x.z)
                        .filter(|z| (z.norm() - r).abs() < 1e-12)
                        .next()
                        .unwrap_or_else(|| {
                            self.samples.iter().map(|x| x.z).max_by(|a, b| a.norm().total_cmp(&b.norm())).unwrap()
                        })
                }
            };
            if z.norm() > best.0 {
                best = (z.norm(), z);
            }
        }
        best.1
    }

    /// Maximize `f` over the samples, then refine along the sample's curve by
    /// golden-section search to `1e-6` in the curve parameter.
    pub fn refine_max(&self, values: &[f64], f: impl Fn(Complex64) -> f64) -> (Complex64, f64) {
        let (i, &v) = values
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("region has samples");
        let s = self.samples[i];
        let Some((curve, phi, step)) = s.curve else {
            return (s.z, v);
        };
        let (mut lo, mut hi) = (phi - step, phi + step);
        if let Some((a, b)) = curve.bounds {
            lo = lo.max(a);
            hi = hi.min(b);
        }
        let (p, fp) = golden_max(|t| f(curve.point(t)), lo, hi, GOLDEN_TOL);
        if fp > v {
            (curve.point(p), fp)
        } else {
            (s.z, v)
        }
    }
}

/// Golden-section maximization on `[lo, hi]`.
pub fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        }
    }
    if f1 > f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

fn num(s: &str, what: &str, spec: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::invalid(format!("region '{spec}': cannot parse {what} '{s}'")))
}

fn parse_center(s: Option<&str>, spec: &str) -> Result<Complex64> {
    match s {
        None => Ok(Complex64::new(0.0, 0.0)),
        Some(c) => {
            let (a, b) = c
                .split_once(',')
                .ok_or_else(|| Error::invalid(format!("region '{spec}': center must be cx,cy")))?;
            Ok(Complex64::new(num(a, "center", spec)?, num(b, "center", spec)?))
        }
    }
}

fn parse_shape(spec: &str) -> Result<Shape> {
    let (body, center) = match spec.split_once('@') {
        Some((b, c)) => (b, Some(c)),
        None => (spec, None),
    };
    let parts: Vec<&str> = body.split(':').collect();
    let bad = || Error::invalid(format!("region '{spec}': unrecognized shape"));
    match parts.as_slice() {
        ["circle", r] => Ok(Shape::Circle { center: parse_center(center, spec)?, radius: num(r, "radius", spec)? }),
        ["disc", r] => Ok(Shape::Disc {
            center: parse_center(center, spec)?,
            radius: num(r, "radius", spec)?,
            rings: 16,
        }),
        ["disc", r, g] => {
            let m = g
                .strip_prefix("grid=")
                .ok_or_else(bad)?
                .parse::<usize>()
                .map_err(|_| Error::invalid(format!("region '{spec}': bad grid '{g}'")))?;
            Ok(Shape::Disc { center: parse_center(center, spec)?, radius: num(r, "radius", spec)?, rings: m })
        }
        ["arc", r, a, b] => Ok(Shape::Arc {
            center: parse_center(center, spec)?,
            radius: num(r, "radius", spec)?,
            from: num(a, "angle", spec)?,
            to: num(b, "angle", spec)?,
        }),
        ["point", xy] if center.is_none() => {
            let (a, b) = xy
                .split_once(',')
                .ok_or_else(|| Error::invalid(format!("region '{spec}': point must be re,im")))?;
            Ok(Shape::Point { z: Complex64::new(num(a, "point", spec)?, num(b, "point", spec)?) })
        }
        _ => Err(bad()),
    }
}

impl fmt::Display for RegionK {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let at = |c: Complex64| {
            if c == Complex64::new(0.0, 0.0) {
                String::new()
            } else {
                format!("@{},{}", c.re, c.im)
            }
        };
        let parts: Vec<String> = self
            .shapes
            .iter()
            .map(|s| match *s {
                Shape::Circle { center, radius } => format!("circle:{radius}{}", at(center)),
                Shape::Disc { center, radius, rings } => format!("disc:{radius}:grid={rings}{}", at(center)),
                Shape::Arc { center, radius, from, to } => format!("arc:{radius}:{from}:{to}{}", at(center)),
                Shape::Point { z } => format!("point:{},{}", z.re, z.im),
            })
            .collect();
        write!(f, "{}", parts.join(","))
    }
}
