//! Reference computations written without the library: naive polynomial
//! arithmetic, Pascal-triangle binomials and dense elimination over GF(p).
#![allow(dead_code)]

use std::collections::BTreeMap;

use fermat_closure::NormalHomogPoly;

pub type Poly = BTreeMap<(u64, u64, u64), u64>;

/// `C(n, j) mod p` for `j = 0..=n` from Pascal's rule.
pub fn binomial_row(n: u64, p: u64) -> Vec<u64> {
    let mut row = vec![1u64];
    for _ in 0..n {
        let mut next = vec![1u64; row.len() + 1];
        for j in 1..row.len() {
            next[j] = (row[j - 1] + row[j]) % p;
        }
        row = next;
    }
    row
}

pub fn from_lib(f: &NormalHomogPoly) -> Poly {
    f.terms()
        .iter()
        .map(|(m, &c)| ((m.x, m.y, m.z as u64), c as u64))
        .collect()
}

pub fn monomial(a: u64, b: u64, c: u64) -> Poly {
    Poly::from([((a, b, c), 1)])
}

fn add_term(f: &mut Poly, m: (u64, u64, u64), c: u64, p: u64) {
    let e = f.entry(m).or_insert(0);
    *e = (*e + c) % p;
    if *e == 0 {
        f.remove(&m);
    }
}

/// Reduce modulo `z^d - x^d - y^d` until every `z` exponent is below `d`.
pub fn reduce(f: &Poly, d: u64, p: u64) -> Poly {
    let mut cur = f.clone();
    while cur.keys().any(|m| m.2 >= d) {
        let mut next = Poly::new();
        for (&(a, b, c), &v) in &cur {
            if c < d {
                add_term(&mut next, (a, b, c), v, p);
            } else {
                add_term(&mut next, (a + d, b, c - d), v, p);
                add_term(&mut next, (a, b + d, c - d), v, p);
            }
        }
        cur = next;
    }
    cur
}

pub fn mul(f: &Poly, g: &Poly, d: u64, p: u64) -> Poly {
    let mut out = Poly::new();
    for (&(a, b, c), &u) in f {
        for (&(x, y, z), &v) in g {
            add_term(&mut out, (a + x, b + y, c + z), u * v % p, p);
        }
    }
    reduce(&out, d, p)
}

pub fn add(f: &Poly, g: &Poly, p: u64) -> Poly {
    let mut out = f.clone();
    for (&m, &c) in g {
        add_term(&mut out, m, c, p);
    }
    out
}

/// `z^e` reduced.
pub fn z_power(e: u64, d: u64, p: u64) -> Poly {
    reduce(&monomial(0, 0, e), d, p)
}

/// `sum h_i g_i` reduced.
pub fn combine(h: &[Poly], g: &[Poly], d: u64, p: u64) -> Poly {
    h.iter()
        .zip(g)
        .fold(Poly::new(), |acc, (a, b)| add(&acc, &mul(a, b, d, p), p))
}

fn inv(a: u64, p: u64) -> u64 {
    let mut r = 1u64;
    let (mut b, mut e) = (a % p, p - 2);
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

/// Rank of a dense matrix over GF(p).
pub fn rank(mut rows: Vec<Vec<u64>>, p: u64) -> usize {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..ncols {
        let Some(piv) = (rank..rows.len()).find(|&r| rows[r][col] % p != 0) else {
            continue;
        };
        rows.swap(piv, rank);
        let iv = inv(rows[rank][col], p);
        for v in rows[rank].iter_mut() {
            *v = *v * iv % p;
        }
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[col] != 0 {
                let f = row[col];
                for (x, &y) in row.iter_mut().zip(&pivot) {
                    *x = (*x + (p - f) * y) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Whether `target` is a linear combination of `cols` over GF(p).
pub fn in_span(cols: &[Vec<u64>], target: &[u64], p: u64) -> bool {
    let n = target.len();
    let rows = |with: bool| -> Vec<Vec<u64>> {
        (0..n)
            .map(|i| {
                let mut r: Vec<u64> = cols.iter().map(|c| c[i]).collect();
                if with {
                    r.push(target[i]);
                }
                r
            })
            .collect()
    };
    if cols.is_empty() {
        return target.iter().all(|&v| v % p == 0);
    }
    rank(rows(false), p) == rank(rows(true), p)
}

/// The bivariate ideal `(x^a, y^a, monomials, (x^d + y^d)^k)` in `K[x,y]`.
pub struct Bivariate {
    pub p: u64,
    pub d: u64,
    pub a: u64,
    pub monomials: Vec<(u64, u64)>,
    pub k: Option<u64>,
}

impl Bivariate {
    fn standard(&self, u: u64, v: u64) -> bool {
        u < self.a && v < self.a && !self.monomials.iter().any(|&(s, t)| u >= s && v >= t)
    }

    /// Columns `x^s y^t (x^d+y^d)^k` in degree `deg` with `s = r mod d`,
    /// projected on the standard monomials `x^u y^(deg-u)` with `u = r mod d`.
    fn strand(&self, deg: u64, r: u64) -> (Vec<u64>, Vec<Vec<u64>>) {
        let rows: Vec<u64> = (0..=deg)
            .filter(|&u| u % self.d == r && self.standard(u, deg - u))
            .collect();
        let mut cols = Vec::new();
        let Some(k) = self.k else {
            return (rows, cols);
        };
        if deg >= self.d * k {
            let binom = binomial_row(k, self.p);
            let src = deg - self.d * k;
            for s in (0..=src).filter(|s| s % self.d == r) {
                let col: Vec<u64> = rows
                    .iter()
                    .map(|&u| {
                        if u < s || (u - s) % self.d != 0 || (u - s) / self.d > k {
                            0
                        } else {
                            binom[((u - s) / self.d) as usize]
                        }
                    })
                    .collect();
                cols.push(col);
            }
        }
        (rows, cols)
    }

    /// Membership of a homogeneous `target`, given as `x`-exponent to coefficient.
    pub fn contains(&self, deg: u64, target: &BTreeMap<u64, u64>) -> bool {
        (0..self.d).all(|r| {
            let (rows, cols) = self.strand(deg, r);
            let t: Vec<u64> = rows
                .iter()
                .map(|u| target.get(u).copied().unwrap_or(0) % self.p)
                .collect();
            in_span(&cols, &t, self.p)
        })
    }

    pub fn contains_monomial(&self, u: u64, v: u64) -> bool {
        self.contains(u + v, &BTreeMap::from([(u, 1)]))
    }

    /// `dim K[x,y] / ideal`, which must be finite.
    pub fn colength(&self) -> u64 {
        let mut total = 0;
        for deg in 0..2 * self.a {
            for r in 0..self.d {
                let (rows, cols) = self.strand(deg, r);
                let image = if cols.is_empty() || rows.is_empty() {
                    0
                } else {
                    let m: Vec<Vec<u64>> = (0..rows.len())
                        .map(|i| cols.iter().map(|c| c[i]).collect())
                        .collect();
                    rank(m, self.p)
                };
                total += rows.len() as u64 - image as u64;
            }
        }
        total
    }
}

/// The `z^0` part of `(x^A, y^A, z^A)` in `K[x,y,z]/(x^d+y^d-z^d)` is
/// `(x^A, y^A, (x^d+y^d)^ceil(A/d))`.
pub fn pure_power_component(p: u64, d: u64, a: u64, c: u64) -> Bivariate {
    // z^A z^j lands on z^c for (A + j) = c mod d
    let j = (c + d * a - a) % d;
    Bivariate {
        p,
        d,
        a,
        monomials: Vec::new(),
        k: Some((a + j - c) / d),
    }
}

/// `x^(3q) y^(3q) in (x^(4q), y^(4q), z^(4q))` in the `d = 7` ring.
pub fn fermat7_member(p: u64, q: u64) -> bool {
    pure_power_component(p, 7, 4 * q, 0).contains_monomial(3 * q, 3 * q)
}

/// `l(R / (x^A, y^A, z^A, extra))` summed over the `d` free components.
pub fn pure_power_colength(p: u64, d: u64, a: u64, extra: &[(u64, u64)]) -> u64 {
    (0..d)
        .map(|c| {
            let mut b = pure_power_component(p, d, a, c);
            b.monomials = extra.to_vec();
            b.colength()
        })
        .sum()
}

/// Determinant over GF(p) of a square matrix.
pub fn det_mod(mut m: Vec<Vec<u64>>, p: u64) -> u64 {
    let n = m.len();
    let mut det = 1u64;
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| m[r][col] % p != 0) else {
            return 0;
        };
        if piv != col {
            m.swap(piv, col);
            det = (p - det) % p;
        }
        det = det * m[col][col] % p;
        let iv = inv(m[col][col], p);
        for r in col + 1..n {
            let f = m[r][col] * iv % p;
            for c in col..n {
                m[r][c] = (m[r][c] + (p - f) * m[col][c]) % p;
            }
        }
    }
    det
}
