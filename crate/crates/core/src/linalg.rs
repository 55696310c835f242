//! Exact linear algebra over the rationals and over small integers.

use num_integer::Integer;
use num_traits::{One, Zero};

use crate::rational::Rational;

/// Reduces `m` (rows of length `n`) to reduced row echelon form in place,
/// dropping zero rows. Returns the pivot column of each remaining row.
pub fn rref(m: &mut Vec<Vec<Rational>>, n: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = Rational::one() / &m[r][c];
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    *x -= &f * p;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    m.truncate(r);
    pivots
}

pub fn rank(rows: &[Vec<Rational>], n: usize) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m, n).len()
}

/// Basis of `{x : rows * x = 0}`, one vector per free column.
pub fn null_space(rows: &[Vec<Rational>], n: usize) -> Vec<Vec<Rational>> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m, n);
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); n];
            v[f] = Rational::one();
            for (row, &p) in m.iter().zip(&pivots) {
                v[p] = -row[f].clone();
            }
            v
        })
        .collect()
}

/// Row echelon basis of integer vectors, kept primitive (gcd 1) so entries
/// stay small. Used to accumulate the span of many assignment differences.
#[derive(Clone, Debug, Default)]
pub struct IntEchelon {
    n: usize,
    rows: Vec<(usize, Vec<i128>)>,
}

impl IntEchelon {
    pub fn new(n: usize) -> Self {
        IntEchelon { n, rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Adds `v` to the span; returns whether the rank grew.
    pub fn insert(&mut self, mut v: Vec<i128>) -> bool {
        debug_assert_eq!(v.len(), self.n);
        for (p, row) in &self.rows {
            if v[*p] != 0 {
                let g = row[*p].gcd(&v[*p]);
                let (a, b) = (row[*p] / g, v[*p] / g);
                for (x, y) in v.iter_mut().zip(row) {
                    *x = *x * a - y * b;
                }
                primitive(&mut v);
            }
        }
        let Some(p) = v.iter().position(|&x| x != 0) else { return false };
        let at = self.rows.partition_point(|(q, _)| *q < p);
        self.rows.insert(at, (p, v));
        true
    }

    pub fn rows(&self) -> impl Iterator<Item = &Vec<i128>> {
        self.rows.iter().map(|(_, r)| r)
    }

    pub fn to_rational(&self) -> Vec<Vec<Rational>> {
        self.rows()
            .map(|r| r.iter().map(|&x| Rational::from_integer(x.into())).collect())
            .collect()
    }
}

fn primitive(v: &mut [i128]) {
    let g = v.iter().fold(0i128, |g, &x| g.gcd(&x));
    if g > 1 {
        v.iter_mut().for_each(|x| *x /= g);
    }
}

/// Integer form of an RREF system: `scale[p] * x_pivot + sum(coeffs * x_free) = 0`.
pub struct PivotSystem {
    pub pivots: Vec<usize>,
    pub free: Vec<usize>,
    /// Per pivot row: the pivot's integer scale and integer coefficients on
    /// the free columns (in `free` order).
    pub rows: Vec<(i128, Vec<i128>)>,
}

impl PivotSystem {
    pub fn new(constraints: &[Vec<Rational>], n: usize) -> Self {
        let mut m = constraints.to_vec();
        let pivots = rref(&mut m, n);
        let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
        let rows = m
            .iter()
            .map(|row| {
                let l = row.iter().fold(num_bigint::BigInt::one(), |l, x| l.lcm(x.denom()));
                let to_int = |x: &Rational| -> i128 {
                    let v = x * Rational::from_integer(l.clone());
                    i128::try_from(v.to_integer()).expect("coefficients fit in i128")
                };
                let scale = i128::try_from(l.clone()).expect("denominator fits in i128");
                (scale, free.iter().map(|&f| to_int(&row[f])).collect())
            })
            .collect();
        PivotSystem { pivots, free, rows }
    }

    /// Every solution with all entries in `values` other than the zero vector.
    pub fn small_solutions(&self, n: usize, values: &[i64]) -> Vec<Vec<i64>> {
        let mut out = Vec::new();
        let mut z = vec![0i64; self.free.len()];
        self.walk(0, &mut z, n, values, &mut out);
        out
    }

    fn walk(&self, i: usize, z: &mut Vec<i64>, n: usize, values: &[i64], out: &mut Vec<Vec<i64>>) {
        if i < z.len() {
            for &v in values {
                z[i] = v;
                self.walk(i + 1, z, n, values, out);
            }
            return;
        }
        let mut x = vec![0i64; n];
        for (&f, &v) in self.free.iter().zip(z.iter()) {
            x[f] = v;
        }
        for (&p, (scale, coeffs)) in self.pivots.iter().zip(&self.rows) {
            let s: i128 = coeffs.iter().zip(z.iter()).map(|(a, &b)| a * b as i128).sum();
            if s % scale != 0 {
                return;
            }
            let val = -s / scale;
            if !values.iter().any(|&v| v as i128 == val) {
                return;
            }
            x[p] = val as i64;
        }
        if x.iter().any(|&v| v != 0) {
            out.push(x);
        }
    }
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
