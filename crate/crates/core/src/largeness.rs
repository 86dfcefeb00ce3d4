//! Finite-window detectors for syndetic, piecewise syndetic, thick, IP and
//! Δ sets, and the depth-`k` star duals of IP and Δ.
//!
//! Universal quantifiers range over the core sub-window where every
//! translate used stays inside the window: for translates of radius `g`
//! that core has radius `R - g`. Results are therefore monotone in `R`.
//! Star duals are approximated at a fixed depth `k`, which every report
//! carries alongside the outcome.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::GaussInt;
use crate::window::{self, box_points, to_gauss, GaussSet, Point};

pub const FS_MAX_LEN: usize = 20;
pub const IP_MAX_DEPTH: usize = 6;
pub const DELTA_MAX_DEPTH: usize = 8;

/// A finite sequence of distinct nonzero Gaussian integers.
#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Seq(Vec<GaussInt>);

impl Seq {
    pub fn new(entries: Vec<GaussInt>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Invalid("sequence must be nonempty".into()));
        }
        if let Some(k) = entries.iter().position(GaussInt::is_zero) {
            return Err(Error::Invalid(format!("sequence entry {k} is zero")));
        }
        let distinct: BTreeSet<&GaussInt> = entries.iter().collect();
        if distinct.len() != entries.len() {
            return Err(Error::Invalid("sequence entries must be distinct".into()));
        }
        Ok(Seq(entries))
    }

    pub fn from_points(points: &[Point]) -> Result<Self> {
        Seq::new(points.iter().copied().map(to_gauss).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[GaussInt] {
        &self.0
    }
}

impl fmt::Debug for Seq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟨")?;
        for (k, e) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "⟩")
    }
}

/// Every sum over a nonempty index set.
pub fn fs(x: &Seq) -> Result<BTreeSet<GaussInt>> {
    if x.len() > FS_MAX_LEN {
        return Err(Error::CapExceeded {
            name: "finite-sums length",
            value: x.len(),
            cap: FS_MAX_LEN,
        });
    }
    let mut sums: Vec<GaussInt> = Vec::with_capacity((1 << x.len()) - 1);
    for e in &x.0 {
        let extended: Vec<GaussInt> = sums.iter().map(|s| s + e).collect();
        sums.push(e.clone());
        sums.extend(extended);
    }
    Ok(sums.into_iter().collect())
}

/// Forward differences `x_m - x_n` for `n < m`.
pub fn delta(x: &Seq) -> Result<BTreeSet<GaussInt>> {
    if x.len() < 2 {
        return Err(Error::Invalid("delta needs a sequence of length >= 2".into()));
    }
    let v = &x.0;
    Ok((0..v.len())
        .flat_map(|n| (n + 1..v.len()).map(move |m| &v[m] - &v[n]))
        .collect())
}

/// `y_n = x_1 + … + x_n`; every partial sum must be nonzero and new.
pub fn partial_sums(x: &Seq) -> Result<Seq> {
    let mut acc = GaussInt::zero();
    let mut out: Vec<GaussInt> = Vec::with_capacity(x.len());
    for (k, e) in x.0.iter().enumerate() {
        acc = &acc + e;
        if acc.is_zero() {
            return Err(Error::PartialSum {
                index: k + 1,
                reason: "partial sum is zero",
            });
        }
        if out.contains(&acc) {
            return Err(Error::PartialSum {
                index: k + 1,
                reason: "partial sum repeats an earlier one",
            });
        }
        out.push(acc.clone());
    }
    Ok(Seq(out))
}

/// Translates `G` with `core ⊆ ∪_{t∈G} (−t + B)`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct SyndeticWitness {
    pub translates: Vec<GaussInt>,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct PiecewiseSyndeticWitness {
    pub translates: Vec<GaussInt>,
    pub offset: GaussInt,
}

/// Greedy cover of `targets` by translates from the box of `g_radius`:
/// repeatedly take the translate covering the most uncovered targets,
/// earliest in canonical order on ties.
fn greedy_cover(set: &GaussSet, targets: &[Point], g_radius: i64) -> Option<Vec<Point>> {
    let candidates = box_points(g_radius, true);
    let mut uncovered: Vec<Point> = targets.to_vec();
    let mut chosen: Vec<Point> = Vec::new();
    while !uncovered.is_empty() {
        let (best, hits) = candidates
            .iter()
            .map(|&t| {
                let hits = uncovered
                    .iter()
                    .filter(|&&s| set.contains(window::add(s, t)))
                    .count();
                (t, hits)
            })
            .fold((None, 0), |(bt, bh), (t, h)| if h > bh { (Some(t), h) } else { (bt, bh) });
        let best = best?;
        debug_assert!(hits > 0);
        uncovered.retain(|&s| !set.contains(window::add(s, best)));
        chosen.push(best);
    }
    if chosen.is_empty() {
        chosen.push((0, 0));
    }
    Some(chosen)
}

fn core_points(set: &GaussSet, translate_radius: i64) -> Vec<Point> {
    let w = set.window();
    box_points(w.radius() - translate_radius, w.include_zero())
}

/// Syndetic at `g_radius`: the core of radius `R - g` is covered by
/// `−t + B` for `t` in a subset of the box of radius `g`.
pub fn is_syndetic(set: &GaussSet, g_radius: u32) -> Result<Option<SyndeticWitness>> {
    let g = g_radius as i64;
    if g_radius == 0 || g > set.window().radius() {
        return Err(Error::Precondition(format!(
            "g_radius must be in 1..={}, got {g_radius}",
            set.window().radius()
        )));
    }
    let core = core_points(set, g);
    Ok(greedy_cover(set, &core, g).map(|ts| SyndeticWitness {
        translates: ts.into_iter().map(to_gauss).collect(),
    }))
}

/// Piecewise syndetic at `(g_radius, f_radius)`: some translate `x + F` of
/// the full box `F` of radius `f` sits inside the core of radius `R - g`
/// and its window points are covered by `−t + B` for `t` within radius `g`
/// (an excluded origin is not a point to cover).
///
/// The witness uses the smallest greedy cover found over all offsets; ties
/// go to the canonically least translate list, then the earliest offset.
pub fn is_piecewise_syndetic(
    set: &GaussSet,
    g_radius: u32,
    f_radius: u32,
) -> Result<Option<PiecewiseSyndeticWitness>> {
    let (g, f) = (g_radius as i64, f_radius as i64);
    let r = set.window().radius();
    if g_radius == 0 || f_radius == 0 || g + f >= r {
        return Err(Error::Precondition(format!(
            "need 1 <= g_radius, 1 <= f_radius and g_radius + f_radius < {r}"
        )));
    }
    let translates = box_points(g, true);
    let covered = |y: Point| translates.iter().any(|&t| set.contains(window::add(y, t)));
    let pattern = box_points(f, true);
    let mut best: Option<(Point, Vec<Point>)> = None;
    for x in box_points(r - g - f, true) {
        let targets: Vec<Point> = pattern
            .iter()
            .map(|&p| window::add(x, p))
            .filter(|&p| set.window().contains(p))
            .collect();
        if !targets.iter().all(|&p| covered(p)) {
            continue;
        }
        let mut ts = greedy_cover(set, &targets, g).expect("every target is covered");
        ts.sort_by(|&a, &b| window::lattice_cmp(a, b));
        if best.as_ref().is_none_or(|(_, b)| smaller_cover(&ts, b)) {
            let done = ts == [(0, 0)];
            best = Some((x, ts));
            if done {
                break;
            }
        }
    }
    Ok(best.map(|(x, ts)| PiecewiseSyndeticWitness {
        translates: ts.into_iter().map(to_gauss).collect(),
        offset: to_gauss(x),
    }))
}

fn smaller_cover(a: &[Point], b: &[Point]) -> bool {
    a.len()
        .cmp(&b.len())
        .then_with(|| {
            a.iter()
                .zip(b)
                .map(|(&p, &q)| window::lattice_cmp(p, q))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .is_lt()
}

/// Thick at `f_radius`: `B` contains `x + F` for the full box of radius
/// `f`. Returns the first such `x` in canonical order.
pub fn is_thick(set: &GaussSet, f_radius: u32) -> Result<Option<GaussInt>> {
    let f = f_radius as i64;
    let r = set.window().radius();
    if f_radius == 0 || f >= r {
        return Err(Error::Precondition(format!(
            "f_radius must be in 1..{r}, got {f_radius}"
        )));
    }
    let pattern = box_points(f, true);
    Ok(box_points(r - f, true)
        .into_iter()
        .find(|&x| pattern.iter().all(|&p| set.contains(window::add(x, p))))
        .map(to_gauss))
}

fn check_depth(k: usize, min: usize, cap: usize, name: &'static str) -> Result<()> {
    if k < min {
        return Err(Error::Invalid(format!("{name} must be >= {min}")));
    }
    if k > cap {
        return Err(Error::CapExceeded {
            name,
            value: k,
            cap,
        });
    }
    Ok(())
}

/// A length-`k` sequence whose finite sums all lie in `B`.
///
/// Depth-first over members in canonical order with increasing indices;
/// finite sums are symmetric, so this loses no witnesses.
pub fn contains_ip(set: &GaussSet, k: usize) -> Result<Option<Seq>> {
    check_depth(k, 1, IP_MAX_DEPTH, "IP depth")?;
    let members: Vec<Point> = set.members().into_iter().filter(|&p| p != (0, 0)).collect();

    fn dfs(
        set: &GaussSet,
        members: &[Point],
        start: usize,
        k: usize,
        chosen: &mut Vec<Point>,
        sums: &mut Vec<Point>,
    ) -> bool {
        if chosen.len() == k {
            return true;
        }
        for (idx, &x) in members.iter().enumerate().skip(start) {
            if !sums.iter().all(|&s| set.contains(window::add(s, x))) {
                continue;
            }
            let mark = sums.len();
            let extended: Vec<Point> = sums.iter().map(|&s| window::add(s, x)).collect();
            sums.push(x);
            sums.extend(extended);
            chosen.push(x);
            if dfs(set, members, idx + 1, k, chosen, sums) {
                return true;
            }
            chosen.pop();
            sums.truncate(mark);
        }
        false
    }

    let mut chosen = Vec::with_capacity(k);
    let mut sums = Vec::new();
    if dfs(set, &members, 0, k, &mut chosen, &mut sums) {
        Ok(Some(Seq::from_points(&chosen)?))
    } else {
        Ok(None)
    }
}

/// A length-`k` sequence whose forward differences all lie in `B`. Depth 1
/// would be vacuous and is rejected.
///
/// Searches offsets `y_j = x_j - x_1` (all in `B`), then shifts by the
/// first nonzero `x_1` in canonical order keeping every entry nonzero.
pub fn contains_delta(set: &GaussSet, k: usize) -> Result<Option<Seq>> {
    check_depth(k, 2, DELTA_MAX_DEPTH, "delta depth")?;
    let members: Vec<Point> = set.members().into_iter().filter(|&p| p != (0, 0)).collect();

    fn dfs(set: &GaussSet, candidates: &[Point], need: usize, chosen: &mut Vec<Point>) -> bool {
        if need == 0 {
            return true;
        }
        for &y in candidates {
            let next: Vec<Point> = candidates
                .iter()
                .copied()
                .filter(|&c| c != y && set.contains(window::sub(c, y)))
                .collect();
            if next.len() + 1 < need {
                continue;
            }
            chosen.push(y);
            if dfs(set, &next, need - 1, chosen) {
                return true;
            }
            chosen.pop();
        }
        false
    }

    let mut offsets = vec![(0, 0)];
    if !dfs(set, &members, k - 1, &mut offsets) {
        return Ok(None);
    }
    let start = box_points(k as i64 + set.window().radius() + 1, false)
        .into_iter()
        .find(|&x| offsets.iter().all(|&y| window::add(x, y) != (0, 0)))
        .expect("finitely many offsets exclude finitely many starts");
    let seq: Vec<Point> = offsets.iter().map(|&y| window::add(start, y)).collect();
    Ok(Some(Seq::from_points(&seq)?))
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Ip,
    Delta,
}

impl Family {
    pub fn witness(self, set: &GaussSet, k: usize) -> Result<Option<Seq>> {
        match self {
            Family::Ip => contains_ip(set, k),
            Family::Delta => contains_delta(set, k),
        }
    }
}

/// Depth-`k` star dual: the window complement of `B` holds no depth-`k`
/// witness of the family, so every such family member meets `B`.
pub fn is_star_k(set: &GaussSet, family: Family, k: usize) -> Result<bool> {
    Ok(family.witness(&set.complement(), k)?.is_none())
}
