//! Brute-force oracles shared by the integration tests. Nothing here calls
//! the algorithms under test; sets and colorings are only read.

#![allow(dead_code)]

use std::collections::HashSet;

use gramsey::search::Coloring;
use gramsey::{GaussInt, GaussSet, MatrixQi};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type P = (i64, i64);

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn g(s: &str) -> GaussInt {
    s.parse().unwrap()
}

pub fn gi(p: P) -> GaussInt {
    GaussInt::new(p.0, p.1)
}

pub fn norm(p: P) -> i64 {
    p.0 * p.0 + p.1 * p.1
}

pub fn add(a: P, b: P) -> P {
    (a.0 + b.0, a.1 + b.1)
}

pub fn mul(a: P, b: P) -> P {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}

/// `d | z` via `z·conj(d) ≡ 0 (mod N(d))`.
pub fn divides(d: P, z: P) -> bool {
    let n = norm(d);
    if n == 0 {
        return z == (0, 0);
    }
    let p = mul(z, (d.0, -d.1));
    p.0 % n == 0 && p.1 % n == 0
}

/// All Gaussian integers with norm at most `n`.
pub fn disc(n: i64) -> Vec<P> {
    let r = (n as f64).sqrt() as i64 + 1;
    let mut out = Vec::new();
    for a in -r..=r {
        for b in -r..=r {
            if norm((a, b)) <= n {
                out.push((a, b));
            }
        }
    }
    out
}

/// The associate with positive real part and nonnegative imaginary part.
pub fn canonical(p: P) -> P {
    let mut q = p;
    for _ in 0..4 {
        if q.0 > 0 && q.1 >= 0 {
            return q;
        }
        q = (-q.1, q.0);
    }
    p
}

/// Prime iff the norm exceeds 1 and no `d` with `1 < N(d) <= sqrt(N(z))`
/// divides `z` (any factorization has a factor that small).
pub fn prime_oracle(z: P) -> bool {
    let n = norm(z);
    if n <= 1 {
        return false;
    }
    let mut k = 1;
    while (k + 1) * (k + 1) <= n {
        k += 1;
    }
    !disc(k).into_iter().any(|d| norm(d) > 1 && divides(d, z))
}

pub fn random_point(rng: &mut ChaCha8Rng, r: i64) -> P {
    (rng.random_range(-r..=r), rng.random_range(-r..=r))
}

pub struct Win {
    pub r: i64,
    pub include_zero: bool,
}

impl Win {
    pub fn of(set: &GaussSet) -> Self {
        Win {
            r: set.window().radius(),
            include_zero: set.window().include_zero(),
        }
    }

    pub fn contains(&self, p: P) -> bool {
        p.0.abs() <= self.r && p.1.abs() <= self.r && (self.include_zero || p != (0, 0))
    }
}

pub fn square(r: i64) -> Vec<P> {
    (-r..=r).flat_map(|a| (-r..=r).map(move |b| (a, b))).collect()
}

pub fn members(set: &GaussSet) -> HashSet<P> {
    square(set.window().radius())
        .into_iter()
        .filter(|&p| set.contains(p))
        .collect()
}

/// Every core point `s` (sup-norm at most `R - g`, inside the window) has
/// some `t` with `|t| <= g` and `s + t ∈ B`.
pub fn syndetic_oracle(set: &GaussSet, g: i64) -> bool {
    let w = Win::of(set);
    let b = members(set);
    square(w.r - g)
        .into_iter()
        .filter(|&s| w.contains(s))
        .all(|s| square(g).into_iter().any(|t| b.contains(&add(s, t))))
}

pub fn ps_oracle(set: &GaussSet, g: i64, f: i64) -> bool {
    let w = Win::of(set);
    let b = members(set);
    square(w.r - g - f).into_iter().any(|x| {
        square(f).into_iter().all(|p| {
            let s = add(x, p);
            !w.contains(s) || square(g).into_iter().any(|t| b.contains(&add(s, t)))
        })
    })
}

pub fn thick_oracle(set: &GaussSet, f: i64) -> bool {
    let w = Win::of(set);
    let b = members(set);
    square(w.r - f)
        .into_iter()
        .any(|x| square(f).into_iter().all(|p| b.contains(&add(x, p))))
}

fn nonzero_members(set: &GaussSet) -> Vec<P> {
    let mut v: Vec<P> = members(set).into_iter().filter(|&p| p != (0, 0)).collect();
    v.sort();
    v
}

/// Distinct nonzero `x_1..x_k` with every nonempty subset sum in `B`,
/// for `k <= 3`.
pub fn ip_oracle(set: &GaussSet, k: usize) -> bool {
    let b = members(set);
    let m = nonzero_members(set);
    match k {
        1 => !m.is_empty(),
        2 => m.iter().enumerate().any(|(i, &x)| {
            m[i + 1..].iter().any(|&y| b.contains(&add(x, y)))
        }),
        3 => m.iter().enumerate().any(|(i, &x)| {
            m[i + 1..].iter().enumerate().any(|(j, &y)| {
                b.contains(&add(x, y))
                    && m[i + j + 2..].iter().any(|&z| {
                        b.contains(&add(x, z)) && b.contains(&add(y, z)) && b.contains(&add(add(x, y), z))
                    })
            })
        }),
        _ => panic!("ip oracle handles k <= 3"),
    }
}

/// With steps `d_j = x_{j+1} - x_j`, a Δ witness of length `k` is a step
/// list whose contiguous block sums are all nonzero members of `B`.
pub fn delta_oracle(set: &GaussSet, k: usize) -> bool {
    let b = members(set);
    let m = nonzero_members(set);
    let ok = |p: P| p != (0, 0) && b.contains(&p);
    match k {
        2 => !m.is_empty(),
        3 => m.iter().any(|&d1| m.iter().any(|&d2| ok(add(d1, d2)))),
        4 => m.iter().any(|&d1| {
            m.iter().any(|&d2| {
                ok(add(d1, d2))
                    && m.iter()
                        .any(|&d3| ok(add(d2, d3)) && ok(add(add(d1, d2), d3)))
            })
        }),
        _ => panic!("delta oracle handles 2 <= k <= 4"),
    }
}

/// A matrix with entries `num/den`, kept in machine form for oracles.
#[derive(Clone, Debug)]
pub struct RawMatrix {
    pub rows: Vec<Vec<(P, i64)>>,
}

impl RawMatrix {
    pub fn random(rng: &mut ChaCha8Rng, u: usize, v: usize, bound: i64, max_den: i64) -> Self {
        let rows = (0..u)
            .map(|_| {
                (0..v)
                    .map(|_| (random_point(rng, bound), rng.random_range(1..=max_den)))
                    .collect()
            })
            .collect();
        RawMatrix { rows }
    }

    pub fn to_matrix(&self) -> MatrixQi {
        let text: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&(n, d)| format!("({})/{d}", gi(n)))
                    .collect()
            })
            .collect();
        MatrixQi::from_rows(
            text.iter()
                .map(|row| row.iter().map(|t| t.parse().unwrap()).collect())
                .collect(),
        )
        .unwrap()
    }

    /// Denominator lcm `L` of the reduced entries, and `L·A`.
    pub fn cleared(&self) -> (i64, Vec<Vec<P>>) {
        fn gcd(a: i64, b: i64) -> i64 {
            if b == 0 { a.abs() } else { gcd(b, a % b) }
        }
        let reduced: Vec<Vec<(P, i64)>> = self
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&(n, d)| {
                        let c = gcd(gcd(n.0, n.1), d);
                        ((n.0 / c, n.1 / c), d / c)
                    })
                    .collect()
            })
            .collect();
        let l = reduced
            .iter()
            .flatten()
            .fold(1, |acc, &(_, d)| acc / gcd(acc, d) * d);
        let b = reduced
            .iter()
            .map(|row| row.iter().map(|&(n, d)| (n.0 * (l / d), n.1 * (l / d))).collect())
            .collect();
        (l, b)
    }

    /// `A·z` when every entry is a Gaussian integer.
    pub fn exact_image(&self, z: &[P]) -> Option<Vec<P>> {
        let (l, b) = self.cleared();
        image(&b, z)
            .into_iter()
            .map(|p| (p.0 % l == 0 && p.1 % l == 0).then_some((p.0 / l, p.1 / l)))
            .collect()
    }
}

pub fn image(b: &[Vec<P>], z: &[P]) -> Vec<P> {
    b.iter()
        .map(|row| row.iter().zip(z).fold((0, 0), |acc, (&m, &x)| add(acc, mul(m, x))))
        .collect()
}

/// Monochromatic image anywhere in `(box \ {0})^v`, for `v <= 2`, by nested loops.
pub fn monochromatic_oracle(b: &[Vec<P>], coloring: &Coloring, radius: i64) -> bool {
    let coords: Vec<P> = square(radius).into_iter().filter(|&p| p != (0, 0)).collect();
    let mono = |z: &[P]| {
        let colors: Option<Vec<u32>> = image(b, z).into_iter().map(|p| coloring.color(p)).collect();
        colors.is_some_and(|c| c.iter().all(|&x| x == c[0]))
    };
    match b[0].len() {
        1 => coords.iter().any(|&a| mono(&[a])),
        2 => coords.iter().any(|&a| coords.iter().any(|&c| mono(&[a, c]))),
        v => panic!("oracle handles v <= 2, got {v}"),
    }
}
