//! Naive reference arithmetic for `GF(p)[x,y,z]/(x^d + y^d - z^d)`.
#![allow(dead_code)]

use std::collections::BTreeMap;

use fermat_closure::NormalHomogPoly;

pub type Poly = BTreeMap<(u64, u64, u64), u64>;

pub fn from_lib(f: &NormalHomogPoly) -> Poly {
    f.terms()
        .iter()
        .map(|(m, &c)| ((m.x, m.y, m.z as u64), c as u64))
        .collect()
}

fn add_term(f: &mut Poly, m: (u64, u64, u64), c: u64, p: u64) {
    let e = f.entry(m).or_insert(0);
    *e = (*e + c) % p;
    if *e == 0 {
        f.remove(&m);
    }
}

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

/// Normal monomials of degree `n`.
pub fn basis(n: u64, d: u64) -> Vec<(u64, u64, u64)> {
    let mut out = Vec::new();
    for c in 0..d.min(n + 1) {
        for a in 0..=n - c {
            out.push((a, n - c - a, c));
        }
    }
    out
}

fn inv(a: u64, p: u64) -> u64 {
    (1..p).find(|&b| a * b % p == 1).expect("unit")
}

pub fn rank(mut rows: Vec<Vec<u64>>, p: u64) -> usize {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..ncols {
        let Some(piv) = (rank..rows.len()).find(|&r| rows[r][col] % p != 0) else {
            continue;
        };
        rows.swap(piv, rank);
        let iv = inv(rows[rank][col], p);
        let pivot: Vec<u64> = rows[rank].iter().map(|v| v * iv % p).collect();
        for row in rows.iter_mut().skip(rank + 1) {
            let f = row[col];
            if f != 0 {
                for (x, &y) in row.iter_mut().zip(&pivot) {
                    *x = (*x + (p - f) * y) % p;
                }
            }
        }
        rows[rank] = pivot;
        rank += 1;
    }
    rank
}

/// Vectors of `u * g` over the normal monomials of degree `n`, for all
/// generators and all normal monomials `u`.
pub fn ideal_vectors(gens: &[Poly], degrees: &[u64], n: u64, d: u64, p: u64) -> (Vec<(u64, u64, u64)>, Vec<Vec<u64>>) {
    let rows = basis(n, d);
    let index: BTreeMap<_, _> = rows.iter().enumerate().map(|(i, m)| (*m, i)).collect();
    let mut vecs = Vec::new();
    for (g, &dg) in gens.iter().zip(degrees) {
        if dg > n {
            continue;
        }
        for u in basis(n - dg, d) {
            let prod = mul(g, &Poly::from([(u, 1)]), d, p);
            let mut v = vec![0; rows.len()];
            for (m, c) in prod {
                v[index[&m]] = c;
            }
            vecs.push(v);
        }
    }
    (rows, vecs)
}

/// `f in (gens)` by dense linear algebra on the degree-`deg f` piece.
pub fn member(f: &Poly, n: u64, gens: &[Poly], degrees: &[u64], d: u64, p: u64) -> bool {
    let (rows, vecs) = ideal_vectors(gens, degrees, n, d, p);
    let target: Vec<u64> = rows.iter().map(|m| f.get(m).copied().unwrap_or(0)).collect();
    let r0 = rank(vecs.clone(), p);
    let mut with = vecs;
    with.push(target);
    r0 == rank(with, p)
}
