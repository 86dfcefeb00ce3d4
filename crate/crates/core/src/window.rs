//! Finite boxes of `Z[i]` and subsets of them.
//!
//! A [`Window`] of radius `R` is `{a+bi : |a|, |b| <= R}`, optionally minus
//! the origin. Every largeness test and search runs inside one.

use std::cmp::Ordering;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::GaussInt;

/// A lattice point `(re, im)` with machine coordinates.
pub type Point = (i64, i64);

pub fn to_gauss(p: Point) -> GaussInt {
    GaussInt::from(p)
}

pub fn norm(p: Point) -> i64 {
    p.0 * p.0 + p.1 * p.1
}

fn half_plane(p: Point) -> u8 {
    if p.1 > 0 || (p.1 == 0 && p.0 >= 0) {
        0
    } else {
        1
    }
}

/// Order by norm, then by argument in `[0, 2π)`.
pub fn lattice_cmp(a: Point, b: Point) -> Ordering {
    norm(a).cmp(&norm(b)).then_with(|| {
        half_plane(a).cmp(&half_plane(b)).then_with(|| {
            let cross = a.0 as i128 * b.1 as i128 - a.1 as i128 * b.0 as i128;
            0.cmp(&cross)
        })
    })
}

/// All points of the box of `radius`, in canonical order.
pub fn box_points(radius: i64, include_zero: bool) -> Vec<Point> {
    let mut pts: Vec<Point> = (-radius..=radius)
        .flat_map(|a| (-radius..=radius).map(move |b| (a, b)))
        .filter(|&p| include_zero || p != (0, 0))
        .collect();
    pts.sort_by(|&a, &b| lattice_cmp(a, b));
    pts
}

pub fn add(a: Point, b: Point) -> Point {
    (a.0 + b.0, a.1 + b.1)
}

pub fn sub(a: Point, b: Point) -> Point {
    (a.0 - b.0, a.1 - b.1)
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Window {
    radius: u32,
    include_zero: bool,
}

impl Window {
    pub fn new(radius: u32, include_zero: bool) -> Result<Self> {
        if radius == 0 {
            return Err(Error::Invalid("window radius must be >= 1".into()));
        }
        Ok(Window {
            radius,
            include_zero,
        })
    }

    pub fn radius(&self) -> i64 {
        self.radius as i64
    }

    pub fn include_zero(&self) -> bool {
        self.include_zero
    }

    fn side(&self) -> i64 {
        2 * self.radius() + 1
    }

    pub fn in_box(&self, p: Point) -> bool {
        p.0.abs() <= self.radius() && p.1.abs() <= self.radius()
    }

    pub fn contains(&self, p: Point) -> bool {
        self.in_box(p) && (self.include_zero || p != (0, 0))
    }

    pub fn contains_gauss(&self, z: &GaussInt) -> bool {
        z.to_xy().is_some_and(|p| self.contains(p))
    }

    /// Row-major grid index over the full box (origin included).
    pub(crate) fn grid_index(&self, p: Point) -> usize {
        let r = self.radius();
        ((p.0 + r) * self.side() + (p.1 + r)) as usize
    }

    pub(crate) fn grid_len(&self) -> usize {
        (self.side() * self.side()) as usize
    }

    /// Member points in row-major grid order (re ascending, then im).
    pub fn grid_points(&self) -> impl Iterator<Item = Point> + '_ {
        let r = self.radius();
        (-r..=r)
            .flat_map(move |a| (-r..=r).map(move |b| (a, b)))
            .filter(|&p| self.contains(p))
    }

    /// Member points in canonical order.
    pub fn points(&self) -> Vec<Point> {
        box_points(self.radius(), self.include_zero)
    }

    pub fn len(&self) -> usize {
        self.grid_len() - usize::from(!self.include_zero)
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// A subset of a window.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct GaussSet {
    window: Window,
    bits: Vec<bool>,
}

impl GaussSet {
    pub fn empty(window: Window) -> Self {
        GaussSet {
            window,
            bits: vec![false; window.grid_len()],
        }
    }

    pub fn full(window: Window) -> Self {
        GaussSet::from_predicate(window, |_| true)
    }

    pub fn from_predicate(window: Window, mut pred: impl FnMut(Point) -> bool) -> Self {
        let mut set = GaussSet::empty(window);
        for p in window.grid_points() {
            if pred(p) {
                set.insert_unchecked(p);
            }
        }
        set
    }

    pub fn from_points(window: Window, points: impl IntoIterator<Item = Point>) -> Result<Self> {
        let mut set = GaussSet::empty(window);
        for p in points {
            set.insert(p)?;
        }
        Ok(set)
    }

    pub fn insert(&mut self, p: Point) -> Result<()> {
        if !self.window.contains(p) {
            return Err(Error::Invalid(format!(
                "point {} lies outside the window of radius {}{}",
                to_gauss(p),
                self.window.radius(),
                if self.window.include_zero() { "" } else { " (origin excluded)" }
            )));
        }
        self.insert_unchecked(p);
        Ok(())
    }

    fn insert_unchecked(&mut self, p: Point) {
        let k = self.window.grid_index(p);
        self.bits[k] = true;
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn contains(&self, p: Point) -> bool {
        self.window.contains(p) && self.bits[self.window.grid_index(p)]
    }

    pub fn contains_gauss(&self, z: &GaussInt) -> bool {
        z.to_xy().is_some_and(|p| self.contains(p))
    }

    /// Complement taken within the window.
    pub fn complement(&self) -> GaussSet {
        GaussSet::from_predicate(self.window, |p| !self.contains(p))
    }

    /// Members in canonical order.
    pub fn members(&self) -> Vec<Point> {
        self.window
            .points()
            .into_iter()
            .filter(|&p| self.contains(p))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.window.grid_points().filter(|&p| self.contains(p)).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_subset(&self, other: &GaussSet) -> bool {
        self.window
            .grid_points()
            .all(|p| !self.contains(p) || other.contains(p))
    }

    pub fn from_rule(window: Window, rule: &SetRule, default_seed: u64) -> Result<Self> {
        match rule {
            SetRule::ResidueClass { modulus, residue } => {
                if modulus.is_zero() {
                    return Err(Error::Invalid("residue-class modulus must be nonzero".into()));
                }
                Ok(GaussSet::from_predicate(window, |p| {
                    GaussInt::congruent_mod(&to_gauss(p), residue, modulus)
                        .expect("modulus checked nonzero")
                }))
            }
            SetRule::NormThreshold { min_norm } => {
                Ok(GaussSet::from_predicate(window, |p| norm(p) as u64 >= *min_norm))
            }
            SetRule::RealParity { parity } => {
                if *parity > 1 {
                    return Err(Error::Invalid("real-parity must be 0 or 1".into()));
                }
                Ok(GaussSet::from_predicate(window, |p| p.0.rem_euclid(2) == *parity as i64))
            }
            SetRule::Random {
                seed,
                numerator,
                denominator,
            } => {
                if *denominator == 0 || numerator > denominator {
                    return Err(Error::Invalid(
                        "random density must satisfy 0 <= numerator <= denominator, denominator > 0"
                            .into(),
                    ));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed.unwrap_or(default_seed));
                Ok(GaussSet::from_predicate(window, |_| {
                    rng.next_u64() % denominator < *numerator
                }))
            }
        }
    }
}

/// Named membership rules for [`GaussSet::from_rule`].
///
/// `random` draws one `u64` per window point from ChaCha8 seeded via
/// `seed_from_u64`, visiting points in row-major grid order, and keeps the
/// point when `draw % denominator < numerator`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SetRule {
    ResidueClass { modulus: GaussInt, residue: GaussInt },
    NormThreshold { min_norm: u64 },
    RealParity { parity: u8 },
    Random {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
        #[serde(default = "one")]
        numerator: u64,
        #[serde(default = "two")]
        denominator: u64,
    },
}

fn one() -> u64 {
    1
}

fn two() -> u64 {
    2
}
