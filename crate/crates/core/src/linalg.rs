//! Exact linear algebra over `Q(i)`.
//!
//! The central question is whether the all-ones vector lies in the column
//! space of a matrix `A`. Exactly one of two certificates exists: a vector
//! `s` with `A·s = 1`, or a Gaussian-integer vector `u` with `uᵀA = 0` and
//! `u·1 ≠ 0`. Both are computed by fraction-exact Gauss–Jordan elimination
//! and verified afterwards by plain multiplication.

use std::fmt;
use std::ops::Index;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{GaussInt, GaussRational};

/// A dense `rows × cols` matrix over `Q(i)`, row-major.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<GaussRational>>", into = "Vec<Vec<GaussRational>>")]
pub struct MatrixQi {
    rows: usize,
    cols: usize,
    entries: Vec<GaussRational>,
}

impl TryFrom<Vec<Vec<GaussRational>>> for MatrixQi {
    type Error = Error;
    fn try_from(rows: Vec<Vec<GaussRational>>) -> Result<Self> {
        MatrixQi::from_rows(rows)
    }
}

impl From<MatrixQi> for Vec<Vec<GaussRational>> {
    fn from(m: MatrixQi) -> Self {
        (0..m.rows).map(|r| m.row(r).to_vec()).collect()
    }
}

impl MatrixQi {
    pub fn new(rows: usize, cols: usize, entries: Vec<GaussRational>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension(format!(
                "matrix must be at least 1x1, got {rows}x{cols}"
            )));
        }
        if entries.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        Ok(MatrixQi {
            rows,
            cols,
            entries,
        })
    }

    pub fn from_rows(rows: Vec<Vec<GaussRational>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        MatrixQi::new(r, c, rows.into_iter().flatten().collect())
    }

    /// Convenience constructor from Gaussian-integer rows.
    pub fn from_int_rows(rows: &[&[(i64, i64)]]) -> Result<Self> {
        MatrixQi::from_rows(
            rows.iter()
                .map(|row| {
                    row.iter()
                        .map(|&z| GaussRational::from(GaussInt::from(z)))
                        .collect()
                })
                .collect(),
        )
    }

    /// The `(l+1) × 2` matrix whose images `A·(a, d)` are the progressions
    /// `a, a+d, …, a+l·d`.
    pub fn progression(l: usize) -> Self {
        let entries = (0..=l)
            .flat_map(|k| [GaussRational::one(), GaussRational::from(k as i64)])
            .collect();
        MatrixQi {
            rows: l + 1,
            cols: 2,
            entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &GaussRational {
        &self.entries[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[GaussRational] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn entries(&self) -> &[GaussRational] {
        &self.entries
    }

    pub fn is_integral(&self) -> bool {
        self.entries.iter().all(GaussRational::is_integral)
    }

    pub fn transpose(&self) -> MatrixQi {
        let entries = (0..self.cols)
            .flat_map(|c| (0..self.rows).map(move |r| (r, c)))
            .map(|(r, c)| self.get(r, c).clone())
            .collect();
        MatrixQi {
            rows: self.cols,
            cols: self.rows,
            entries,
        }
    }

    pub fn scale(&self, k: &BigInt) -> MatrixQi {
        MatrixQi {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e.scale_int(k)).collect(),
        }
    }

    /// Entries as Gaussian integers, row-major, if the matrix is integral.
    pub fn to_gauss_ints(&self) -> Option<Vec<GaussInt>> {
        self.entries.iter().map(GaussRational::to_gauss_int).collect()
    }
}

impl fmt::Debug for MatrixQi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<&[GaussRational]> = (0..self.rows).map(|r| self.row(r)).collect();
        f.debug_list().entries(rows).finish()
    }
}

macro_rules! vector_type {
    ($name:ident, $elem:ty, $repr:literal) => {
        #[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
        #[serde(try_from = $repr, into = $repr)]
        pub struct $name(Vec<$elem>);

        impl TryFrom<Vec<$elem>> for $name {
            type Error = Error;
            fn try_from(entries: Vec<$elem>) -> Result<Self> {
                $name::new(entries)
            }
        }

        impl From<$name> for Vec<$elem> {
            fn from(v: $name) -> Self {
                v.0
            }
        }

        impl $name {
            pub fn new(entries: Vec<$elem>) -> Result<Self> {
                if entries.is_empty() {
                    return Err(Error::Dimension("vectors must have length >= 1".into()));
                }
                Ok($name(entries))
            }

            pub fn len(&self) -> usize {
                self.0.len()
            }

            pub fn is_empty(&self) -> bool {
                self.0.is_empty()
            }

            pub fn iter(&self) -> std::slice::Iter<'_, $elem> {
                self.0.iter()
            }

            pub fn as_slice(&self) -> &[$elem] {
                &self.0
            }

            pub fn into_inner(self) -> Vec<$elem> {
                self.0
            }
        }

        impl Index<usize> for $name {
            type Output = $elem;
            fn index(&self, k: usize) -> &$elem {
                &self.0[k]
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "(")?;
                for (k, e) in self.0.iter().enumerate() {
                    if k > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{e}")?;
                }
                write!(f, ")")
            }
        }
    };
}

vector_type!(VectorQi, GaussRational, "Vec<GaussRational>");
vector_type!(VectorZi, GaussInt, "Vec<GaussInt>");

impl VectorQi {
    pub fn ones(len: usize) -> Self {
        VectorQi(vec![GaussRational::one(); len])
    }

    pub fn is_all_ones(&self) -> bool {
        self.0.iter().all(|e| *e == GaussRational::one())
    }
}

impl VectorZi {
    pub fn zeros(len: usize) -> Self {
        VectorZi(vec![GaussInt::zero(); len])
    }

    pub fn from_xy(entries: &[(i64, i64)]) -> Result<Self> {
        VectorZi::new(entries.iter().map(|&z| GaussInt::from(z)).collect())
    }

    pub fn to_rational(&self) -> VectorQi {
        VectorQi(self.0.iter().cloned().map(GaussRational::from).collect())
    }

    /// `self·1`, the sum of the entries.
    pub fn sum(&self) -> GaussInt {
        self.0.iter().fold(GaussInt::zero(), |acc, e| acc + e)
    }

    pub fn scale(&self, k: &GaussInt) -> VectorZi {
        VectorZi(self.0.iter().map(|e| e * k).collect())
    }

    pub fn add(&self, other: &VectorZi) -> Result<VectorZi> {
        if self.len() != other.len() {
            return Err(Error::Dimension(format!(
                "cannot add vectors of length {} and {}",
                self.len(),
                other.len()
            )));
        }
        Ok(VectorZi(
            self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect(),
        ))
    }

    pub fn sub(&self, other: &VectorZi) -> Result<VectorZi> {
        self.add(&VectorZi(other.0.iter().map(|e| -e).collect()))
    }
}

/// The two sides of the all-ones alternative.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", content = "vector", rename_all = "lowercase")]
pub enum IprCertificate {
    /// `A·s = 1`.
    Solution(VectorQi),
    /// `uᵀA = 0` and `u·1 ≠ 0`, content reduced to a unit.
    Obstruction(VectorZi),
}

impl IprCertificate {
    pub fn kind(&self) -> &'static str {
        match self {
            IprCertificate::Solution(_) => "solution",
            IprCertificate::Obstruction(_) => "obstruction",
        }
    }
}

/// Reduced row echelon form of `rows` (each of equal width), pivoting only
/// in the first `pivot_cols` columns. Returns the pivot column of each
/// leading row.
fn rref(rows: &mut [Vec<GaussRational>], pivot_cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut lead = 0;
    for c in 0..pivot_cols {
        if lead == rows.len() {
            break;
        }
        let Some(p) = (lead..rows.len()).find(|&r| !rows[r][c].is_zero()) else {
            continue;
        };
        rows.swap(lead, p);
        let inv = rows[lead][c]
            .inv()
            .expect("pivot entry is nonzero by construction");
        for e in rows[lead].iter_mut() {
            *e = &*e * &inv;
        }
        let pivot_row = rows[lead].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == lead || row[c].is_zero() {
                continue;
            }
            let factor = row[c].clone();
            for (e, p) in row.iter_mut().zip(&pivot_row) {
                *e = &*e - &(&factor * p);
            }
        }
        pivots.push(c);
        lead += 1;
    }
    pivots
}

fn rows_of(a: &MatrixQi) -> Vec<Vec<GaussRational>> {
    (0..a.rows).map(|r| a.row(r).to_vec()).collect()
}

/// Solve `A·s = 1` exactly; free variables are set to zero.
pub fn solve_all_ones(a: &MatrixQi) -> Option<VectorQi> {
    let mut aug = rows_of(a);
    for row in aug.iter_mut() {
        row.push(GaussRational::one());
    }
    let pivots = rref(&mut aug, a.cols);
    if aug[pivots.len()..].iter().any(|row| !row[a.cols].is_zero()) {
        return None;
    }
    let mut s = vec![GaussRational::zero(); a.cols];
    for (row, &c) in aug.iter().zip(&pivots) {
        s[c] = row[a.cols].clone();
    }
    Some(VectorQi(s))
}

/// Basis of `{y : yᵀA = 0}`, one vector per free column of `Aᵀ`.
pub fn left_null_space(a: &MatrixQi) -> Vec<VectorQi> {
    let mut t = rows_of(&a.transpose());
    let pivots = rref(&mut t, a.rows);
    (0..a.rows)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut y = vec![GaussRational::zero(); a.rows];
            y[free] = GaussRational::one();
            for (row, &p) in t.iter().zip(&pivots) {
                y[p] = -&row[free];
            }
            VectorQi(y)
        })
        .collect()
}

/// Clear denominators, divide out the Gaussian content and rotate so the
/// first nonzero entry is canonical.
pub fn integer_normalize(y: &VectorQi) -> VectorZi {
    let lcm = y.iter().fold(BigInt::one(), |acc, e| acc.lcm(e.denom()));
    let ints: Vec<GaussInt> = y
        .iter()
        .map(|e| {
            e.scale_int(&lcm)
                .to_gauss_int()
                .expect("lcm clears every denominator")
        })
        .collect();
    let content = ints
        .iter()
        .filter(|e| !e.is_zero())
        .fold(None::<GaussInt>, |acc, e| match acc {
            None => Some(e.canonical_associate()),
            Some(g) => Some(g.gcd(e).expect("nonzero operand")),
        });
    let Some(content) = content else {
        return VectorZi(ints);
    };
    let mut ints: Vec<GaussInt> = ints
        .iter()
        .map(|e| e.exact_div(&content).expect("content divides every entry"))
        .collect();
    let unit = ints
        .iter()
        .find(|e| !e.is_zero())
        .and_then(GaussInt::canonical_unit)
        .expect("some entry is nonzero");
    for e in ints.iter_mut() {
        *e = &*e * &unit;
    }
    VectorZi(ints)
}

/// A Gaussian-integer `u` with `uᵀA = 0` and `u·1 ≠ 0`, if one exists.
pub fn find_obstruction(a: &MatrixQi) -> Option<VectorZi> {
    left_null_space(a)
        .iter()
        .find(|y| !y.iter().fold(GaussRational::zero(), |acc, e| acc + e.clone()).is_zero())
        .map(integer_normalize)
}

/// Decide the alternative. Exactly one branch exists; anything else is an
/// elimination bug and panics.
pub fn certify(a: &MatrixQi) -> IprCertificate {
    match (solve_all_ones(a), find_obstruction(a)) {
        (Some(s), None) => IprCertificate::Solution(s),
        (None, Some(u)) => IprCertificate::Obstruction(u),
        (s, u) => panic!(
            "all-ones alternative violated for {a:?}: solution={s:?}, obstruction={u:?}"
        ),
    }
}

/// `(n, n·A)` with `n` the lcm of all entry denominators.
pub fn clear_denominators(a: &MatrixQi) -> (BigInt, MatrixQi) {
    let n = a.entries.iter().fold(BigInt::one(), |acc, e| acc.lcm(e.denom()));
    (n.clone(), a.scale(&n))
}

/// Exact `A·x` for a rational vector.
pub fn apply_rational(a: &MatrixQi, x: &VectorQi) -> Result<VectorQi> {
    if x.len() != a.cols {
        return Err(Error::Dimension(format!(
            "matrix has {} columns, vector has length {}",
            a.cols,
            x.len()
        )));
    }
    Ok(VectorQi(
        (0..a.rows)
            .map(|r| {
                a.row(r)
                    .iter()
                    .zip(x.iter())
                    .fold(GaussRational::zero(), |acc, (m, e)| acc + m * e)
            })
            .collect(),
    ))
}

/// Exact `A·z` for a Gaussian-integer vector.
pub fn apply(a: &MatrixQi, z: &VectorZi) -> Result<VectorQi> {
    apply_rational(a, &z.to_rational())
}

/// Exact row vector `uᵀA`.
pub fn left_apply(u: &VectorZi, a: &MatrixQi) -> Result<VectorQi> {
    apply(&a.transpose(), u)
}

/// Recompute a certificate from scratch with plain multiplication.
pub fn verify_certificate(a: &MatrixQi, cert: &IprCertificate) -> bool {
    match cert {
        IprCertificate::Solution(s) => {
            apply_rational(a, s).is_ok_and(|img| img.is_all_ones())
        }
        IprCertificate::Obstruction(u) => {
            let annihilates = left_apply(u, a).is_ok_and(|row| row.iter().all(|e| e.is_zero()));
            let content_is_unit = u
                .iter()
                .filter(|e| !e.is_zero())
                .try_fold(None::<GaussInt>, |acc, e| match acc {
                    None => Some(Some(e.canonical_associate())),
                    Some(g) => g.gcd(e).ok().map(Some),
                })
                .flatten()
                .is_some_and(|g| g.is_unit());
            annihilates && !u.sum().is_zero() && content_is_unit
        }
    }
}

/// Check `A·(t·w + x) = l·t·1 + A·x`, computing both sides independently.
///
/// Requires `l ≠ 0` and `A·w = l·1`.
pub fn verify_translation_identity(
    a: &MatrixQi,
    w: &VectorZi,
    l: &GaussInt,
    t: &GaussInt,
    x: &VectorZi,
) -> Result<bool> {
    if l.is_zero() {
        return Err(Error::Precondition("l must be nonzero".into()));
    }
    let target = GaussRational::from(l.clone());
    if !apply(a, w)?.iter().all(|e| *e == target) {
        return Err(Error::Precondition("A·w is not l·1".into()));
    }
    let lhs = apply(a, &w.scale(t).add(x)?)?;
    let lt = GaussRational::from(l * t);
    let ax = apply(a, x)?;
    let rhs: Vec<GaussRational> = ax.iter().map(|e| &lt + e).collect();
    Ok(lhs.as_slice() == rhs.as_slice())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> GaussRational {
        s.parse().unwrap()
    }

    fn mat(rows: &[&[&str]]) -> MatrixQi {
        MatrixQi::from_rows(rows.iter().map(|r| r.iter().map(|e| q(e)).collect()).collect()).unwrap()
    }

    fn zvec(entries: &[&str]) -> VectorZi {
        VectorZi::new(entries.iter().map(|e| e.parse().unwrap()).collect()).unwrap()
    }

    #[test]
    fn progression_matrix_has_solution() {
        let a = MatrixQi::progression(3);
        assert_eq!(a, mat(&[&["1", "0"], &["1", "1"], &["1", "2"], &["1", "3"]]));
        let s = solve_all_ones(&a).unwrap();
        assert_eq!(s.to_string(), "(1, 0)");
        assert!(find_obstruction(&a).is_none());
        assert_eq!(certify(&a), IprCertificate::Solution(s));
    }

    #[test]
    fn solve_examples() {
        assert_eq!(solve_all_ones(&mat(&[&["i"]])).unwrap().to_string(), "(-i)");
        assert!(solve_all_ones(&mat(&[&["1"], &["2"]])).is_none());
    }

    #[test]
    fn obstruction_examples() {
        assert_eq!(find_obstruction(&mat(&[&["1"], &["2"]])), Some(zvec(&["2", "-1"])));
        assert_eq!(find_obstruction(&mat(&[&["i"], &["2i"]])), Some(zvec(&["2", "-1"])));
        assert_eq!(certify(&mat(&[&["0"]])), IprCertificate::Obstruction(zvec(&["1"])));
        let c = certify(&mat(&[&["1"], &["2"]]));
        assert!(verify_certificate(&mat(&[&["1"], &["2"]]), &c));
    }

    #[test]
    fn obstruction_content_is_reduced() {
        // Left null space spanned by (1+i)/3·(2,-1) style vectors still
        // normalizes to a primitive, canonical-leading vector.
        let a = mat(&[&["(1+i)/3"], &["(2+2i)/3"], &["0"]]);
        let u = find_obstruction(&a).unwrap();
        assert!(verify_certificate(&a, &IprCertificate::Obstruction(u.clone())));
        assert!(u[0].is_canonical());
    }

    #[test]
    fn clear_denominator_examples() {
        assert_eq!(clear_denominators(&mat(&[&["1/2"]])), (BigInt::from(2), mat(&[&["1"]])));
        let a = MatrixQi::progression(2);
        assert_eq!(clear_denominators(&a), (BigInt::from(1), a.clone()));
        assert_eq!(
            clear_denominators(&mat(&[&["(1+i)/2", "1/3"]])),
            (BigInt::from(6), mat(&[&["3+3i", "2"]]))
        );
    }

    #[test]
    fn apply_examples() {
        let a = MatrixQi::progression(3);
        let img = apply(&a, &zvec(&["1+i", "2"])).unwrap();
        assert_eq!(img.to_string(), "(1+i, 3+i, 5+i, 7+i)");
        let zero = apply(&a, &VectorZi::zeros(2)).unwrap();
        assert!(zero.iter().all(GaussRational::is_zero));
        assert_eq!(apply(&mat(&[&["i"]]), &zvec(&["1"])).unwrap().to_string(), "(i)");
        assert!(matches!(apply(&a, &zvec(&["1"])), Err(Error::Dimension(_))));
    }

    #[test]
    fn translation_identity_examples() {
        let a = MatrixQi::progression(3);
        let w = zvec(&["1", "0"]);
        let l = GaussInt::one();
        assert!(verify_translation_identity(&a, &w, &l, &"3+i".parse().unwrap(), &zvec(&["1", "1"])).unwrap());
        assert!(verify_translation_identity(&a, &w, &l, &GaussInt::zero(), &zvec(&["2-i", "5"])).unwrap());
        assert!(matches!(
            verify_translation_identity(&a, &w, &GaussInt::zero(), &l, &w),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            verify_translation_identity(&a, &zvec(&["0", "1"]), &l, &l, &w),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn empty_shapes_rejected() {
        assert!(MatrixQi::new(0, 1, vec![]).is_err());
        assert!(VectorZi::new(vec![]).is_err());
        assert!(MatrixQi::from_rows(vec![vec![q("1")], vec![]]).is_err());
    }
}
