//! Monochromatic image search and finite re-enactments of the abundance and
//! preservation results for matrices over `Q(i)`.
//!
//! Candidate vectors `z` are enumerated lexicographically over coordinates,
//! each coordinate running through a box in canonical (norm, then angle)
//! order. Searches may run in parallel; the reported witness is always the
//! first one in that order.

use std::collections::{BTreeSet, HashMap, HashSet};

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::GaussInt;
use crate::largeness::{self, Family, Seq};
use crate::linalg::{self, IprCertificate, MatrixQi, VectorQi, VectorZi};
use crate::window::{self, box_points, to_gauss, GaussSet, Point, Window};

pub const SCOPE: &str = "finite-window";

type Wide = (i128, i128);

fn cmul(a: Wide, b: Wide) -> Wide {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}

/// An integral matrix with machine-sized entries, for inner loops.
#[derive(Clone, Debug)]
struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Wide>,
}

impl IntMatrix {
    fn from_integral(a: &MatrixQi) -> Result<Self> {
        let ints = a
            .to_gauss_ints()
            .ok_or_else(|| Error::Invalid("matrix is not integral".into()))?;
        let entries = ints
            .iter()
            .map(|e| {
                e.to_xy()
                    .map(|(x, y)| (x as i128, y as i128))
                    .ok_or_else(|| Error::Invalid(format!("entry {e} exceeds 64-bit search range")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(IntMatrix {
            rows: a.rows(),
            cols: a.cols(),
            entries,
        })
    }

    fn image(&self, z: &[Point]) -> Vec<Wide> {
        (0..self.rows)
            .map(|r| {
                let row = &self.entries[r * self.cols..(r + 1) * self.cols];
                row.iter().zip(z).fold((0, 0), |acc, (&m, &(x, y))| {
                    let p = cmul(m, (x as i128, y as i128));
                    (acc.0 + p.0, acc.1 + p.1)
                })
            })
            .collect()
    }
}

fn narrow(w: Wide) -> Option<Point> {
    Some((i64::try_from(w.0).ok()?, i64::try_from(w.1).ok()?))
}

/// The candidate box `(box of radius)^v` in lexicographic order.
struct Candidates {
    coords: Vec<Point>,
    v: usize,
    total: usize,
}

impl Candidates {
    fn new(radius: u32, v: usize, include_zero: bool) -> Result<Self> {
        if radius == 0 {
            return Err(Error::Invalid("search radius must be >= 1".into()));
        }
        let coords = box_points(radius as i64, include_zero);
        let total = u32::try_from(v)
            .ok()
            .and_then(|v| coords.len().checked_pow(v))
            .ok_or_else(|| Error::Invalid("candidate space too large".into()))?;
        Ok(Candidates { coords, v, total })
    }

    fn decode(&self, mut idx: usize) -> Vec<Point> {
        let n = self.coords.len();
        let mut z = vec![(0, 0); self.v];
        for slot in z.iter_mut().rev() {
            *slot = self.coords[idx % n];
            idx /= n;
        }
        z
    }
}

fn to_vector(z: &[Point]) -> VectorZi {
    VectorZi::new(z.iter().copied().map(to_gauss).collect()).expect("nonempty candidate")
}

fn integer_matrix(a: &MatrixQi) -> Result<(BigInt, IntMatrix)> {
    let (n, b) = linalg::clear_denominators(a);
    Ok((n, IntMatrix::from_integral(&b)?))
}

/// Coloring rules for [`Coloring::from_rule`].
///
/// `residue` colors by the class of `t` modulo `modulus`, classes numbered
/// by the canonical order of their smallest representative (so there are
/// `norm(modulus)` colors). `norm-band` colors `t` by
/// `(norm(t) / width) mod k`. `random` draws one `u64` per window point in
/// row-major grid order from ChaCha8 seeded via `seed_from_u64` and takes
/// it modulo `k`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ColoringRule {
    Residue { modulus: GaussInt },
    RealParity,
    NormBand { width: u64 },
    Random {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
}

pub const MAX_RESIDUE_COLORS: u64 = 1 << 16;

/// A total coloring of a window with colors `0..colors`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Coloring {
    window: Window,
    colors: u32,
    assignment: Vec<u32>,
}

impl Coloring {
    pub fn from_fn(window: Window, colors: u32, mut f: impl FnMut(Point) -> u32) -> Result<Self> {
        if colors == 0 {
            return Err(Error::Invalid("a coloring needs at least one color".into()));
        }
        let mut assignment = vec![0; window.grid_len()];
        for p in window.grid_points() {
            let c = f(p);
            if c >= colors {
                return Err(Error::Invalid(format!("color {c} out of range 0..{colors}")));
            }
            assignment[window.grid_index(p)] = c;
        }
        Ok(Coloring {
            window,
            colors,
            assignment,
        })
    }

    pub fn from_assignment(window: Window, colors: u32, entries: &[(Point, u32)]) -> Result<Self> {
        let mut map = HashMap::with_capacity(entries.len());
        for &(p, c) in entries {
            if !window.contains(p) {
                return Err(Error::Invalid(format!("point {} is outside the window", to_gauss(p))));
            }
            if map.insert(p, c).is_some() {
                return Err(Error::Invalid(format!("point {} colored twice", to_gauss(p))));
            }
        }
        if let Some(p) = window.grid_points().find(|p| !map.contains_key(p)) {
            return Err(Error::Invalid(format!(
                "assignment is not total: {} has no color",
                to_gauss(p)
            )));
        }
        Coloring::from_fn(window, colors, |p| map[&p])
    }

    /// Residue and real-parity rules fix the number of colors; `colors` must
    /// agree with it.
    pub fn from_rule(window: Window, colors: u32, rule: &ColoringRule, default_seed: u64) -> Result<Self> {
        if colors == 0 {
            return Err(Error::Invalid("a coloring needs at least one color".into()));
        }
        let fixed = |natural: u32| {
            if natural == colors {
                Ok(())
            } else {
                Err(Error::Invalid(format!("rule produces {natural} colors, file declares {colors}")))
            }
        };
        let k = colors as u64;
        match rule {
            ColoringRule::Residue { modulus } => {
                let classes = ResidueClasses::new(modulus)?;
                fixed(classes.count())?;
                Coloring::from_fn(window, colors, |p| classes.index(p))
            }
            ColoringRule::RealParity => {
                fixed(2)?;
                Coloring::from_fn(window, colors, |p| p.0.rem_euclid(2) as u32)
            }
            ColoringRule::NormBand { width } => {
                if *width == 0 {
                    return Err(Error::Invalid("norm-band width must be >= 1".into()));
                }
                Coloring::from_fn(window, colors, |p| ((window::norm(p) as u64 / width) % k) as u32)
            }
            ColoringRule::Random { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed.unwrap_or(default_seed));
                Coloring::from_fn(window, colors, |_| (rng.next_u64() % k) as u32)
            }
        }
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn colors(&self) -> u32 {
        self.colors
    }

    pub fn color(&self, p: Point) -> Option<u32> {
        self.window
            .contains(p)
            .then(|| self.assignment[self.window.grid_index(p)])
    }

    pub fn color_gauss(&self, z: &GaussInt) -> Option<u32> {
        z.to_xy().and_then(|p| self.color(p))
    }
}

/// Residue classes modulo `m`, each keyed by its least member of norm at
/// most `norm(m)/2` in canonical order.
struct ResidueClasses {
    modulus: GaussInt,
    norm: i64,
    index: HashMap<Point, u32>,
}

impl ResidueClasses {
    fn new(modulus: &GaussInt) -> Result<Self> {
        if modulus.is_zero() {
            return Err(Error::Invalid("residue modulus must be nonzero".into()));
        }
        let norm = modulus
            .norm()
            .to_u64()
            .filter(|&n| n <= MAX_RESIDUE_COLORS)
            .ok_or_else(|| {
                Error::Invalid(format!("residue modulus norm exceeds {MAX_RESIDUE_COLORS}"))
            })? as i64;
        let mut classes = ResidueClasses {
            modulus: modulus.clone(),
            norm,
            index: HashMap::new(),
        };
        let reach = ((norm as f64 / 2.0).sqrt().ceil() as i64) + 1;
        for q in box_points(reach, true) {
            if 2 * window::norm(q) > norm {
                continue;
            }
            let key = classes.key(q);
            let next = classes.index.len() as u32;
            classes.index.entry(key).or_insert(next);
        }
        debug_assert_eq!(classes.index.len() as i64, norm);
        Ok(classes)
    }

    fn count(&self) -> u32 {
        self.norm as u32
    }

    fn key(&self, p: Point) -> Point {
        let (_, r) = to_gauss(p).div_rem(&self.modulus).expect("nonzero modulus");
        let shifts = [(0, 0), (1, 0), (0, 1), (-1, 0), (0, -1), (1, 1), (-1, 1), (-1, -1), (1, -1)];
        shifts
            .iter()
            .map(|&c| r.clone() + to_gauss(c) * self.modulus.clone())
            .filter_map(|q| q.to_xy())
            .filter(|&q| 2 * window::norm(q) <= self.norm)
            .min_by(|&a, &b| window::lattice_cmp(a, b))
            .expect("the remainder itself qualifies")
    }

    fn index(&self, p: Point) -> u32 {
        self.index[&self.key(p)]
    }
}

/// A verified monochromatic image `B·z` of the integral matrix `B = scale·A`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ImageCertificate {
    pub z: VectorZi,
    pub color: u32,
    pub image: Vec<GaussInt>,
    pub scale: GaussInt,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum SearchOutcome {
    Found(ImageCertificate),
    /// Some candidates had in-window images, none monochromatic.
    NoMonochromatic { in_window: u64, scanned: u64 },
    /// No candidate had its whole image inside the window.
    Exhausted { scanned: u64 },
}

fn in_window_colors(coloring: &Coloring, image: &[Wide]) -> Option<Vec<u32>> {
    image
        .iter()
        .map(|&w| narrow(w).and_then(|p| coloring.color(p)))
        .collect()
}

/// First `z ∈ (box(search_radius) \ {0})^v` in canonical order whose image
/// under the integral matrix `clear_denominators(A)` is monochromatic.
pub fn search_monochromatic(
    a: &MatrixQi,
    coloring: &Coloring,
    search_radius: u32,
) -> Result<SearchOutcome> {
    let (scale, b) = integer_matrix(a)?;
    let cands = Candidates::new(search_radius, b.cols, false)?;
    let mono = |idx: usize| -> Option<u32> {
        let colors = in_window_colors(coloring, &b.image(&cands.decode(idx)))?;
        let first = colors[0];
        colors.iter().all(|&c| c == first).then_some(first)
    };
    let hit = (0..cands.total).into_par_iter().find_first(|&idx| mono(idx).is_some());
    let scanned = cands.total as u64;
    if let Some(idx) = hit {
        let z = cands.decode(idx);
        let image = b.image(&z);
        return Ok(SearchOutcome::Found(ImageCertificate {
            z: to_vector(&z),
            color: mono(idx).expect("hit is monochromatic"),
            image: image
                .iter()
                .map(|&w| to_gauss(narrow(w).expect("in-window image")))
                .collect(),
            scale: GaussInt::new(scale, 0),
        }));
    }
    let in_window = (0..cands.total)
        .into_par_iter()
        .filter(|&idx| in_window_colors(coloring, &b.image(&cands.decode(idx))).is_some())
        .count() as u64;
    Ok(if in_window == 0 {
        SearchOutcome::Exhausted { scanned }
    } else {
        SearchOutcome::NoMonochromatic { in_window, scanned }
    })
}

/// Recheck a certificate through the arbitrary-precision product.
pub fn verify_image_certificate(a: &MatrixQi, coloring: &Coloring, cert: &ImageCertificate) -> bool {
    let (n, b) = linalg::clear_denominators(a);
    if cert.scale != GaussInt::new(n, 0) || cert.z.iter().any(GaussInt::is_zero) {
        return false;
    }
    let Ok(image) = linalg::apply(&b, &cert.z) else {
        return false;
    };
    let Some(image) = image.iter().map(|e| e.to_gauss_int()).collect::<Option<Vec<_>>>() else {
        return false;
    };
    image == cert.image
        && image
            .iter()
            .all(|e| coloring.color_gauss(e) == Some(cert.color))
}

/// Integer-scaled form of `A` for computing exact images `A·z = (n·A)·z / n`.
struct ExactImage {
    scale: i128,
    b: IntMatrix,
}

impl ExactImage {
    fn new(a: &MatrixQi) -> Result<Self> {
        let (n, b) = integer_matrix(a)?;
        let scale = n
            .to_i128()
            .ok_or_else(|| Error::Invalid("denominator lcm exceeds search range".into()))?;
        Ok(ExactImage { scale, b })
    }

    /// `A·z` when integral and machine-sized.
    fn image(&self, z: &[Point]) -> Option<Vec<Point>> {
        let n = self.scale;
        self.b
            .image(z)
            .into_iter()
            .map(|(x, y)| {
                if x % n != 0 || y % n != 0 {
                    return None;
                }
                narrow((x / n, y / n))
            })
            .collect()
    }
}

fn preimage_points(a: &MatrixQi, c: &GaussSet, radius: u32) -> Result<Vec<Vec<Point>>> {
    let exact = ExactImage::new(a)?;
    let cands = Candidates::new(radius, exact.b.cols, false)?;
    Ok((0..cands.total)
        .into_par_iter()
        .filter_map(|idx| {
            let z = cands.decode(idx);
            exact
                .image(&z)
                .is_some_and(|img| img.iter().all(|&p| c.contains(p)))
                .then_some(z)
        })
        .collect())
}

/// `W = {z ∈ (box(radius) \ {0})^v : A·z ∈ C^u}`; non-integral images are
/// never in `C^u`.
pub fn preimage_set(a: &MatrixQi, c: &GaussSet, radius: u32) -> Result<Vec<VectorZi>> {
    Ok(preimage_points(a, c, radius)?
        .iter()
        .map(|z| to_vector(z))
        .collect())
}

/// Whether every entry of `A·z` has positive real and imaginary parts.
pub fn positivity_filter(a: &MatrixQi, z: &VectorZi) -> Result<bool> {
    let img = linalg::apply(a, z)?;
    Ok(img.iter().all(|e| {
        let n = e.numer();
        n.re() > &BigInt::zero() && n.im() > &BigInt::zero()
    }))
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct ProjectionEvidence {
    pub family: Family,
    pub coordinate: usize,
    pub witness: Option<Seq>,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct AbundanceReport {
    pub scope: &'static str,
    pub rows: usize,
    pub cols: usize,
    pub search_radius: u32,
    pub window: Window,
    pub depth: usize,
    /// `|I|`: distinct integral in-window images of the search box.
    pub images: usize,
    /// `|I ∩ C^u|`.
    pub images_in_c: usize,
    pub ratio: String,
    pub projections: Vec<ProjectionEvidence>,
}

fn ratio_string(num: usize, den: usize) -> String {
    if den == 0 {
        return "undefined".into();
    }
    let g = num_integer::gcd(num, den);
    let (p, q) = (num / g, den / g);
    if q == 1 {
        p.to_string()
    } else {
        format!("{p}/{q}")
    }
}

/// Finite snapshot of how much of the image set `I` lands in `C^u`: the
/// density `|I ∩ C^u| / |I|` plus depth-`k` IP and Δ witnesses in each
/// coordinate projection of `I ∩ C^u`.
pub fn abundance_report(a: &MatrixQi, c: &GaussSet, radius: u32, depth: usize) -> Result<AbundanceReport> {
    let exact = ExactImage::new(a)?;
    let w = c.window();
    let cands = Candidates::new(radius, exact.b.cols, true)?;
    let images: BTreeSet<Vec<Point>> = (0..cands.total)
        .into_par_iter()
        .filter_map(|idx| {
            exact
                .image(&cands.decode(idx))
                .filter(|img| img.iter().all(|&p| w.contains(p)))
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect();
    let inside: Vec<&Vec<Point>> = images
        .iter()
        .filter(|y| y.iter().all(|&p| c.contains(p)))
        .collect();

    let mut projections = Vec::new();
    for family in [Family::Ip, Family::Delta] {
        for coordinate in 0..exact.b.rows {
            let proj = GaussSet::from_points(w, inside.iter().map(|y| y[coordinate]))?;
            projections.push(ProjectionEvidence {
                family,
                coordinate,
                witness: family.witness(&proj, depth)?,
            });
        }
    }
    Ok(AbundanceReport {
        scope: SCOPE,
        rows: exact.b.rows,
        cols: exact.b.cols,
        search_radius: radius,
        window: w,
        depth,
        images: images.len(),
        images_in_c: inside.len(),
        ratio: ratio_string(inside.len(), images.len()),
        projections,
    })
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum RamseyOutcome {
    /// `ys[m] - ys[n]` lies in `C` in every coordinate (`n < m`, 1-based).
    Pair { n: usize, m: usize },
    /// Fewer than two indices survived refinement at this coordinate.
    RefinementEmptied { coordinate: usize },
}

/// Coordinatewise refinement of an index list, in the shape of the Ramsey
/// argument: at coordinate `i`, greedily keep indices whose `i`-th
/// differences with every kept predecessor lie in `C`.
pub fn ramsey_refine(ys: &[VectorZi], c: &GaussSet) -> Result<RamseyOutcome> {
    if ys.len() < 2 {
        return Err(Error::Precondition("ramsey_refine needs at least two vectors".into()));
    }
    let u = ys[0].len();
    if ys.iter().any(|y| y.len() != u) {
        return Err(Error::Dimension("vectors of unequal length".into()));
    }
    let distinct: HashSet<&VectorZi> = ys.iter().collect();
    if distinct.len() != ys.len() {
        return Err(Error::Precondition("vectors must be pairwise distinct".into()));
    }
    let mut alive: Vec<usize> = (0..ys.len()).collect();
    #[allow(clippy::needless_range_loop)]
    for coordinate in 0..u {
        let mut kept: Vec<usize> = Vec::new();
        for &m in &alive {
            if kept
                .iter()
                .all(|&n| c.contains_gauss(&(&ys[m][coordinate] - &ys[n][coordinate])))
            {
                kept.push(m);
            }
        }
        if kept.len() < 2 {
            return Ok(RamseyOutcome::RefinementEmptied { coordinate });
        }
        alive = kept;
    }
    Ok(RamseyOutcome::Pair {
        n: alive[0] + 1,
        m: alive[1] + 1,
    })
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
#[serde(tag = "branch", rename_all = "kebab-case")]
#[allow(clippy::large_enum_variant)]
pub enum ProofcheckBranch {
    Solution {
        solution: VectorQi,
        verified: bool,
    },
    Obstruction {
        obstruction: VectorZi,
        obstruction_dot_ones: GaussInt,
        scale: GaussInt,
        prime: GaussInt,
        prime_norm: String,
        /// `max(norm(l), norm(l · (u·1)))`; the prime's norm must exceed it.
        required_norm: String,
        prime_verified: bool,
        scanned: u64,
        /// Candidates with `B·z ∈ P^u`. The argument forces zero.
        images_in_p: u64,
        /// Candidates with `u·(B·z) = 0`, expected to be all of them.
        annihilated: u64,
        target_nonzero_mod_prime: bool,
    },
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct ProofcheckReport {
    pub scope: &'static str,
    pub l: GaussInt,
    pub search_radius: u32,
    #[serde(flatten)]
    pub branch: ProofcheckBranch,
}

impl ProofcheckReport {
    /// Whether the finite re-enactment behaved as the argument predicts.
    pub fn consistent(&self) -> bool {
        match &self.branch {
            ProofcheckBranch::Solution { verified, .. } => *verified,
            ProofcheckBranch::Obstruction {
                prime_verified,
                scanned,
                images_in_p,
                annihilated,
                target_nonzero_mod_prime,
                ..
            } => *prime_verified && *images_in_p == 0 && annihilated == scanned && *target_nonzero_mod_prime,
        }
    }
}

fn divisible(t: Wide, r: Wide) -> bool {
    let n = r.0 * r.0 + r.1 * r.1;
    let p = cmul(t, (r.0, -r.1));
    p.0 % n == 0 && p.1 % n == 0
}

fn wide(z: &GaussInt) -> Result<Wide> {
    z.to_xy()
        .map(|(x, y)| (x as i128, y as i128))
        .ok_or_else(|| Error::Invalid(format!("{z} exceeds 64-bit search range")))
}

/// Finite re-enactment of the congruence argument: with an obstruction `u`,
/// choose a Gaussian prime `r` whose norm exceeds `norm(l)` and
/// `norm(l·(u·1))`, and confirm that no `z` in the box has every entry of
/// `B·z` in `P = {t ≠ 0 : t ≡ l mod r}`. Membership in `P` is decided
/// arithmetically, so no image is truncated away.
pub fn congruence_proofcheck(a: &MatrixQi, l: &GaussInt, radius: u32) -> Result<ProofcheckReport> {
    if l.is_zero() {
        return Err(Error::Precondition("l must be nonzero".into()));
    }
    let cert = linalg::certify(a);
    let branch = match cert {
        IprCertificate::Solution(s) => {
            let verified = linalg::verify_certificate(a, &IprCertificate::Solution(s.clone()));
            ProofcheckBranch::Solution {
                solution: s,
                verified,
            }
        }
        IprCertificate::Obstruction(u) => {
            let (scale, b) = integer_matrix(a)?;
            let dot = u.sum();
            let target = l * &dot;
            let required = target.norm().max(l.norm());
            // ceil(sqrt(required)), so that prime norm > bound² >= required.
            let mut bound = num_integer::Roots::sqrt(&required);
            if &bound * &bound < required {
                bound += 1u32;
            }
            let prime = GaussInt::choose_prime_exceeding(&bound);
            let prime_verified = prime.is_gaussian_prime() && prime.norm() > required;
            let target_nonzero_mod_prime = !GaussInt::congruent_mod(&target, &GaussInt::zero(), &prime)?;

            let r = wide(&prime)?;
            let lw = wide(l)?;
            let uw = u.iter().map(wide).collect::<Result<Vec<_>>>()?;
            let cands = Candidates::new(radius, b.cols, true)?;
            let (images_in_p, annihilated) = (0..cands.total)
                .into_par_iter()
                .map(|idx| {
                    let img = b.image(&cands.decode(idx));
                    let in_p = img
                        .iter()
                        .all(|&t| t != (0, 0) && divisible((t.0 - lw.0, t.1 - lw.1), r));
                    let dot = uw.iter().zip(&img).fold((0, 0), |acc, (&ue, &t)| {
                        let p = cmul(ue, t);
                        (acc.0 + p.0, acc.1 + p.1)
                    });
                    (u64::from(in_p), u64::from(dot == (0, 0)))
                })
                .reduce(|| (0, 0), |x, y| (x.0 + y.0, x.1 + y.1));
            ProofcheckBranch::Obstruction {
                obstruction: u,
                obstruction_dot_ones: dot,
                scale: GaussInt::new(scale, 0),
                prime_norm: prime.norm().to_string(),
                prime,
                required_norm: required.to_string(),
                prime_verified,
                scanned: cands.total as u64,
                images_in_p,
                annihilated,
                target_nonzero_mod_prime,
            }
        }
    };
    Ok(ProofcheckReport {
        scope: SCOPE,
        l: l.clone(),
        search_radius: radius,
        branch,
    })
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PreservationFamily {
    /// IP*.
    Ip,
    /// Δ*.
    Delta,
    /// PS*.
    Ps,
    Thick,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub struct PreservationParams {
    pub family: PreservationFamily,
    pub depth: usize,
    pub search_radius: u32,
    pub g_radius: u32,
    pub f_radius: u32,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct CoordinateEvidence {
    pub coordinate: usize,
    pub positive: bool,
    pub detail: Option<String>,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum JointEvidence {
    /// For the sequence `(j·w)_j`, `m·w - n·w` lies in `W`.
    DeltaPair {
        direction: VectorZi,
        n: usize,
        m: usize,
        difference: VectorZi,
        verified: bool,
    },
    DeltaRefinementEmptied { directions_tried: usize },
    /// No direction in the box passes the positivity filter.
    DeltaExhausted,
    ThickBox { offset: VectorZi, verified: bool },
    ThickAbsent { offsets_scanned: u64 },
    Skipped { reason: String },
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct PreservationReport {
    pub scope: &'static str,
    #[serde(flatten)]
    pub params: PreservationParams,
    pub window: Window,
    pub c_is_large: bool,
    pub c_detail: Option<String>,
    pub preimage_size: usize,
    pub coordinates: Vec<CoordinateEvidence>,
    pub joint: Option<JointEvidence>,
}

pub const MAX_DELTA_DIRECTIONS: usize = 4;
pub const MAX_THICK_OFFSETS: usize = 2_000_000;

fn describe(seq: &Seq) -> String {
    format!("{seq:?}")
}

/// Classify `C`, then `W = preimage_set(A, C, radius)`, for one family.
fn classify(set: &GaussSet, params: &PreservationParams) -> Result<(bool, Option<String>)> {
    Ok(match params.family {
        PreservationFamily::Ip | PreservationFamily::Delta => {
            let fam = if params.family == PreservationFamily::Ip {
                Family::Ip
            } else {
                Family::Delta
            };
            match fam.witness(&set.complement(), params.depth)? {
                None => (true, None),
                Some(seq) => (false, Some(format!("complement contains {}", describe(&seq)))),
            }
        }
        PreservationFamily::Ps => {
            match largeness::is_piecewise_syndetic(&set.complement(), params.g_radius, params.f_radius)? {
                None => (true, None),
                Some(w) => (
                    false,
                    Some(format!("complement piecewise syndetic at offset {}", w.offset)),
                ),
            }
        }
        PreservationFamily::Thick => match largeness::is_thick(set, params.f_radius)? {
            Some(x) => (true, Some(format!("box at offset {x}"))),
            None => (false, None),
        },
    })
}

fn joint_delta(a: &MatrixQi, c: &GaussSet, params: &PreservationParams) -> Result<JointEvidence> {
    let exact = ExactImage::new(a)?;
    let cands = Candidates::new(params.search_radius, a.cols(), false)?;
    let len = params.depth.max(2) as i64;
    let mut tried = 0;
    for idx in 0..cands.total {
        if tried == MAX_DELTA_DIRECTIONS {
            break;
        }
        let w = cands.decode(idx);
        if !positivity_filter(a, &to_vector(&w))? {
            continue;
        }
        let multiple = |k: i64| -> Vec<Point> { w.iter().map(|&(x, y)| (k * x, k * y)).collect() };
        let Some(images) = (1..=len).map(|k| exact.image(&multiple(k))).collect::<Option<Vec<_>>>() else {
            continue;
        };
        tried += 1;
        let ys: Vec<VectorZi> = images.iter().map(|img| to_vector(img)).collect();
        if let RamseyOutcome::Pair { n, m } = ramsey_refine(&ys, c)? {
            let difference = to_vector(&multiple((m - n) as i64));
            let img = linalg::apply(a, &difference)?;
            let verified = difference.iter().all(|e| !e.is_zero())
                && img
                    .iter()
                    .all(|e| e.to_gauss_int().is_some_and(|t| c.contains_gauss(&t)));
            return Ok(JointEvidence::DeltaPair {
                direction: to_vector(&w),
                n,
                m,
                difference,
                verified,
            });
        }
    }
    Ok(if tried == 0 {
        JointEvidence::DeltaExhausted
    } else {
        JointEvidence::DeltaRefinementEmptied {
            directions_tried: tried,
        }
    })
}

fn joint_thick(a: &MatrixQi, members: &HashSet<Vec<Point>>, params: &PreservationParams) -> Result<JointEvidence> {
    let v = a.cols();
    let f = params.f_radius;
    if f >= params.search_radius {
        return Ok(JointEvidence::Skipped {
            reason: "f_radius must be below the search radius".into(),
        });
    }
    let offsets = Candidates::new(params.search_radius - f, v, true)?;
    if offsets.total > MAX_THICK_OFFSETS {
        return Ok(JointEvidence::Skipped {
            reason: format!("{} offsets exceed the cap of {MAX_THICK_OFFSETS}", offsets.total),
        });
    }
    let pattern = Candidates::new(f, v, true)?;
    let hit = (0..offsets.total).into_par_iter().find_first(|&oi| {
        let x = offsets.decode(oi);
        (0..pattern.total).all(|pi| {
            let p = pattern.decode(pi);
            let z: Vec<Point> = x.iter().zip(&p).map(|(&a, &b)| window::add(a, b)).collect();
            members.contains(&z)
        })
    });
    Ok(match hit {
        Some(oi) => {
            let x = offsets.decode(oi);
            let verified = (0..pattern.total).all(|pi| {
                let p = pattern.decode(pi);
                let z: Vec<Point> = x.iter().zip(&p).map(|(&a, &b)| window::add(a, b)).collect();
                members.contains(&z)
            });
            JointEvidence::ThickBox {
                offset: to_vector(&x),
                verified,
            }
        }
        None => JointEvidence::ThickAbsent {
            offsets_scanned: offsets.total as u64,
        },
    })
}

/// Classify `C` for the family at depth `k`, compute `W`, then test each
/// coordinate projection of `W` (inside the search box, origin excluded)
/// with the matching detector, plus a joint witness search for Δ* (via
/// [`ramsey_refine`] on positive-cone directions) and thick.
pub fn preservation_experiment(a: &MatrixQi, c: &GaussSet, params: PreservationParams) -> Result<PreservationReport> {
    let (c_is_large, c_detail) = classify(c, &params)?;
    let w_points = preimage_points(a, c, params.search_radius)?;
    let proj_window = Window::new(params.search_radius, false)?;
    let mut coordinates = Vec::new();
    for coordinate in 0..a.cols() {
        let proj = GaussSet::from_points(proj_window, w_points.iter().map(|z| z[coordinate]))?;
        let (positive, detail) = classify(&proj, &params)?;
        coordinates.push(CoordinateEvidence {
            coordinate,
            positive,
            detail,
        });
    }
    let joint = match params.family {
        PreservationFamily::Delta => Some(joint_delta(a, c, &params)?),
        PreservationFamily::Thick => {
            let members: HashSet<Vec<Point>> = w_points.iter().cloned().collect();
            Some(joint_thick(a, &members, &params)?)
        }
        PreservationFamily::Ip | PreservationFamily::Ps => None,
    };
    Ok(PreservationReport {
        scope: SCOPE,
        params,
        window: c.window(),
        c_is_large,
        c_detail,
        preimage_size: w_points.len(),
        coordinates,
        joint,
    })
}
