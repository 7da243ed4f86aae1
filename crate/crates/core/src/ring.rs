//! Canonical forms in `R = GF(p)[x,y,z]/(x^d + y^d - z^d)`.
//!
//! Every element is represented in the basis of monomials `x^a y^b z^c` with
//! `c < d`, obtained by rewriting `z^d -> x^d + y^d`. `R` is free over
//! `GF(p)[x,y]` on `1, z, ..., z^(d-1)`, which makes the rewrite confluent.
//!
//! Besides the standard grading, `R` carries a grading by
//! `Z/d + Z/d + Z/d + Z` where `x^a y^b z^c` has degree
//! `(a mod d, b mod d, c mod d, a+b+c)`; the relation is homogeneous for it.
//! The finite part of that degree is a [`StrandKey`]. Monomials and powers of
//! `x^d + y^d` are homogeneous, so membership problems for them split into
//! independent strands roughly `d^2` times smaller than a graded piece.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, RwLock};

use serde::ser::{Serialize, SerializeStruct, Serializer};

use crate::error::{Error, Result};
use crate::gfp::{Fp, LucasTable, PrimeModulus};

/// Largest degree whose full monomial basis is kept in the context cache.
const BASIS_CACHE_LIMIT: u64 = 4096;

/// The Fermat ring for a fixed degree and characteristic.
#[derive(Debug)]
pub struct RingContext {
    d: u32,
    p: PrimeModulus,
    lucas: LucasTable,
    bases: RwLock<HashMap<u64, Arc<Vec<NormalMonomial>>>>,
}

impl RingContext {
    pub fn new(d: u32, p: PrimeModulus) -> Result<Self> {
        if d < 3 {
            return Err(Error::DegreeTooSmall(d));
        }
        if d % p.get() == 0 {
            return Err(Error::CharacteristicDividesDegree { d, p: p.get() });
        }
        Ok(RingContext {
            d,
            p,
            lucas: LucasTable::new(p),
            bases: RwLock::new(HashMap::new()),
        })
    }

    /// Convenience constructor from raw integers.
    pub fn with(d: u32, p: u64) -> Result<Self> {
        RingContext::new(d, PrimeModulus::new(p)?)
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn p(&self) -> PrimeModulus {
        self.p
    }

    pub fn binom(&self, n: u64, k: i64) -> u32 {
        self.lucas.binom(n, k)
    }

    /// Number of normal monomials of degree `n`.
    pub fn dim_graded_piece(&self, n: u64) -> u64 {
        let top = n.min(self.d as u64 - 1);
        (0..=top).map(|c| n - c + 1).sum()
    }

    /// Normal monomials of degree `n`, ordered by `(z, y, x)` ascending.
    pub fn basis(&self, n: u64) -> Arc<Vec<NormalMonomial>> {
        if let Some(b) = self.bases.read().expect("basis cache").get(&n) {
            return Arc::clone(b);
        }
        let top = n.min(self.d as u64 - 1) as u32;
        let mut out = Vec::with_capacity(self.dim_graded_piece(n) as usize);
        for z in 0..=top {
            let rest = n - z as u64;
            for y in 0..=rest {
                out.push(NormalMonomial { z, y, x: rest - y });
            }
        }
        let out = Arc::new(out);
        if n <= BASIS_CACHE_LIMIT {
            self.bases
                .write()
                .expect("basis cache")
                .insert(n, Arc::clone(&out));
        }
        out
    }

    pub fn strand_of(&self, m: &NormalMonomial) -> StrandKey {
        let d = self.d as u64;
        StrandKey {
            x: (m.x % d) as u32,
            y: (m.y % d) as u32,
            z: m.z,
        }
    }

    /// Normal monomials of degree `n` in the given strand, by `x` ascending.
    pub fn strand_basis(&self, n: u64, key: StrandKey) -> Vec<NormalMonomial> {
        let d = self.d as u64;
        let offset = key.x as u64 + key.y as u64 + key.z as u64;
        if n < offset || (n - offset) % d != 0 {
            return Vec::new();
        }
        let s = (n - offset) / d;
        (0..=s)
            .map(|i| NormalMonomial {
                z: key.z,
                y: key.y as u64 + d * (s - i),
                x: key.x as u64 + d * i,
            })
            .collect()
    }

    /// All strands with a nonempty basis in degree `n`.
    pub fn strands_in_degree(&self, n: u64) -> Vec<StrandKey> {
        let mut out = Vec::new();
        for z in 0..self.d {
            for y in 0..self.d {
                for x in 0..self.d {
                    let key = StrandKey { x, y, z };
                    let offset = (x + y + z) as u64;
                    if n >= offset && (n - offset) % self.d as u64 == 0 {
                        out.push(key);
                    }
                }
            }
        }
        out
    }

    /// Strand key of the product of monomials in strands `a` and `b`.
    pub fn strand_add(&self, a: StrandKey, b: StrandKey) -> StrandKey {
        StrandKey {
            x: (a.x + b.x) % self.d,
            y: (a.y + b.y) % self.d,
            z: (a.z + b.z) % self.d,
        }
    }

    /// Strand key `a - b`.
    pub fn strand_sub(&self, a: StrandKey, b: StrandKey) -> StrandKey {
        let d = self.d;
        StrandKey {
            x: (a.x + d - b.x) % d,
            y: (a.y + d - b.y) % d,
            z: (a.z + d - b.z) % d,
        }
    }

    /// Product of two normal monomials: one or two normal monomials, each with
    /// coefficient 1.
    pub fn mul_monomials(&self, a: &NormalMonomial, b: &NormalMonomial) -> MonomialProduct {
        let z = a.z + b.z;
        let x = a.x + b.x;
        let y = a.y + b.y;
        if z < self.d {
            MonomialProduct::One(NormalMonomial { z, y, x })
        } else {
            let z = z - self.d;
            let d = self.d as u64;
            MonomialProduct::Two(
                NormalMonomial { z, y, x: x + d },
                NormalMonomial { z, y: y + d, x },
            )
        }
    }

    /// Normal form of `x^a y^b z^c` for arbitrary `c`.
    pub fn monomial(&self, a: u64, b: u64, c: u64) -> NormalHomogPoly {
        let mut out = NormalHomogPoly::zero(a + b + c);
        self.add_monomial_into(&mut out.terms, a, b, c, 1);
        out
    }

    fn add_monomial_into(
        &self,
        acc: &mut BTreeMap<NormalMonomial, u32>,
        a: u64,
        b: u64,
        c: u64,
        coeff: u32,
    ) {
        let d = self.d as u64;
        let (k, r) = (c / d, (c % d) as u32);
        // z^c = z^r (x^d + y^d)^k
        for j in 0..=k {
            let binom = self.binom(k, j as i64);
            if binom == 0 {
                continue;
            }
            let m = NormalMonomial {
                z: r,
                y: b + d * (k - j),
                x: a + d * j,
            };
            add_term(acc, m, self.p.mul(coeff, binom), self.p);
        }
    }

    /// Canonical representative of a homogeneous raw polynomial.
    pub fn normal_form(&self, raw: &RawPoly) -> Result<NormalHomogPoly> {
        let degree = raw.homogeneous_degree()?;
        let mut out = NormalHomogPoly::zero(degree.unwrap_or(0));
        for (&(a, b, c), &coeff) in &raw.terms {
            let coeff = self.p.reduce(coeff);
            if coeff != 0 {
                self.add_monomial_into(&mut out.terms, a, b, c, coeff);
            }
        }
        Ok(out)
    }

    pub fn multiply(&self, f: &NormalHomogPoly, g: &NormalHomogPoly) -> NormalHomogPoly {
        let mut acc: HashMap<NormalMonomial, u32> = HashMap::new();
        let p = self.p;
        for (mf, &cf) in &f.terms {
            for (mg, &cg) in &g.terms {
                let c = p.mul(cf, cg);
                match self.mul_monomials(mf, mg) {
                    MonomialProduct::One(m) => add_term_hash(&mut acc, m, c, p),
                    MonomialProduct::Two(m1, m2) => {
                        add_term_hash(&mut acc, m1, c, p);
                        add_term_hash(&mut acc, m2, c, p);
                    }
                }
            }
        }
        NormalHomogPoly {
            degree: f.degree + g.degree,
            terms: acc.into_iter().filter(|&(_, c)| c != 0).collect(),
        }
    }

    /// Multiply by a single normal monomial.
    pub fn shift(&self, f: &NormalHomogPoly, m: &NormalMonomial) -> NormalHomogPoly {
        let mut out = NormalHomogPoly::zero(f.degree + m.degree());
        for (t, &c) in &f.terms {
            match self.mul_monomials(t, m) {
                MonomialProduct::One(u) => add_term(&mut out.terms, u, c, self.p),
                MonomialProduct::Two(u, v) => {
                    add_term(&mut out.terms, u, c, self.p);
                    add_term(&mut out.terms, v, c, self.p);
                }
            }
        }
        out
    }

    /// `f^n` by repeated squaring.
    pub fn pow(&self, f: &NormalHomogPoly, mut n: u64) -> NormalHomogPoly {
        let mut acc = self.one();
        let mut base = f.clone();
        while n > 0 {
            if n & 1 == 1 {
                acc = self.multiply(&acc, &base);
            }
            n >>= 1;
            if n > 0 {
                base = self.multiply(&base, &base);
            }
        }
        acc
    }

    /// `f^q` for `q` a power of `p`, computed termwise: Frobenius is additive
    /// and fixes the prime field.
    pub fn frobenius(&self, f: &NormalHomogPoly, q: u64) -> Result<NormalHomogPoly> {
        let degree = f
            .degree
            .checked_mul(q)
            .ok_or_else(|| Error::ExponentOverflow(format!("{} * {}", f.degree, q)))?;
        let mut out = NormalHomogPoly::zero(degree);
        for (m, &c) in &f.terms {
            let (a, b, z) = (m.x.checked_mul(q), m.y.checked_mul(q), (m.z as u64).checked_mul(q));
            let (Some(a), Some(b), Some(z)) = (a, b, z) else {
                return Err(Error::ExponentOverflow(format!("{m}^{q}")));
            };
            self.add_monomial_into(&mut out.terms, a, b, z, c);
        }
        Ok(out)
    }

    pub fn one(&self) -> NormalHomogPoly {
        self.monomial(0, 0, 0)
    }

    pub fn scale(&self, f: &NormalHomogPoly, c: u32) -> NormalHomogPoly {
        let c = self.p.reduce(c as u64);
        NormalHomogPoly {
            degree: f.degree,
            terms: f
                .terms
                .iter()
                .filter(|_| c != 0)
                .map(|(m, &v)| (*m, self.p.mul(v, c)))
                .collect(),
        }
    }

    pub fn add(&self, f: &NormalHomogPoly, g: &NormalHomogPoly) -> NormalHomogPoly {
        debug_assert!(f.is_zero() || g.is_zero() || f.degree == g.degree);
        let mut out = f.clone();
        if f.is_zero() {
            out.degree = g.degree;
        }
        for (m, &c) in &g.terms {
            add_term(&mut out.terms, *m, c, self.p);
        }
        out
    }

    pub fn sub(&self, f: &NormalHomogPoly, g: &NormalHomogPoly) -> NormalHomogPoly {
        self.add(f, &self.scale(g, self.p.neg(1)))
    }

    pub fn coeff(&self, value: u32) -> Fp {
        Fp::new(value as u64, self.p)
    }
}

/// Product of two normal monomials.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MonomialProduct {
    One(NormalMonomial),
    Two(NormalMonomial, NormalMonomial),
}

fn add_term(acc: &mut BTreeMap<NormalMonomial, u32>, m: NormalMonomial, c: u32, p: PrimeModulus) {
    if c == 0 {
        return;
    }
    use std::collections::btree_map::Entry;
    match acc.entry(m) {
        Entry::Vacant(e) => {
            e.insert(c);
        }
        Entry::Occupied(mut e) => {
            let v = p.add(*e.get(), c);
            if v == 0 {
                e.remove();
            } else {
                *e.get_mut() = v;
            }
        }
    }
}

fn add_term_hash(acc: &mut HashMap<NormalMonomial, u32>, m: NormalMonomial, c: u32, p: PrimeModulus) {
    let e = acc.entry(m).or_insert(0);
    *e = p.add(*e, c);
}

/// `x^x y^y z^z` with `z < d`. Ordering is lexicographic on `(z, y, x)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NormalMonomial {
    pub z: u32,
    pub y: u64,
    pub x: u64,
}

impl NormalMonomial {
    pub fn new(x: u64, y: u64, z: u32) -> Self {
        NormalMonomial { z, y, x }
    }

    pub fn degree(&self) -> u64 {
        self.x + self.y + self.z as u64
    }

    /// Whether `self` divides `other` as monomials in `x, y` with `self.z == 0`.
    pub fn divides_xy(&self, other: &NormalMonomial) -> bool {
        self.z == 0 && self.x <= other.x && self.y <= other.y
    }
}

impl fmt::Display for NormalMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (v, e) in [("x", self.x), ("y", self.y), ("z", self.z as u64)] {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        if first {
            write!(f, "1")?;
        }
        Ok(())
    }
}

/// Finite part of the multidegree: `(a mod d, b mod d, c)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StrandKey {
    pub x: u32,
    pub y: u32,
    pub z: u32,
}

/// A homogeneous element of `R` in normal form. Stored coefficients are
/// nonzero and reduced modulo the context's `p`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NormalHomogPoly {
    degree: u64,
    terms: BTreeMap<NormalMonomial, u32>,
}

impl NormalHomogPoly {
    pub fn zero(degree: u64) -> Self {
        NormalHomogPoly {
            degree,
            terms: BTreeMap::new(),
        }
    }

    /// Build from terms; zero coefficients are dropped, duplicates summed.
    pub fn from_terms(
        ctx: &RingContext,
        degree: u64,
        terms: impl IntoIterator<Item = (NormalMonomial, u32)>,
    ) -> Result<Self> {
        let mut out = NormalHomogPoly::zero(degree);
        for (m, c) in terms {
            if m.z >= ctx.d() {
                return Err(Error::Parse(format!("{m} is not in normal form")));
            }
            if m.degree() != degree {
                return Err(Error::NotHomogeneous(degree, m.degree()));
            }
            add_term(&mut out.terms, m, ctx.p().reduce(c as u64), ctx.p());
        }
        Ok(out)
    }

    pub fn degree(&self) -> u64 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &BTreeMap<NormalMonomial, u32> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &NormalMonomial) -> u32 {
        self.terms.get(m).copied().unwrap_or(0)
    }

    /// The single monomial, if this is a monomial times a scalar.
    pub fn as_monomial(&self) -> Option<(NormalMonomial, u32)> {
        if self.terms.len() == 1 {
            self.terms.iter().next().map(|(m, &c)| (*m, c))
        } else {
            None
        }
    }

    /// The strand key if all terms lie in one strand.
    pub fn strand(&self, ctx: &RingContext) -> Option<StrandKey> {
        let mut keys = self.terms.keys().map(|m| ctx.strand_of(m));
        let first = keys.next()?;
        keys.all(|k| k == first).then_some(first)
    }

    /// Split into strand components.
    pub fn strand_components(&self, ctx: &RingContext) -> BTreeMap<StrandKey, NormalHomogPoly> {
        let mut out: BTreeMap<StrandKey, NormalHomogPoly> = BTreeMap::new();
        for (m, &c) in &self.terms {
            out.entry(ctx.strand_of(m))
                .or_insert_with(|| NormalHomogPoly::zero(self.degree))
                .terms
                .insert(*m, c);
        }
        out
    }
}

impl fmt::Display for NormalHomogPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if *c != 1 || m.degree() == 0 {
                write!(f, "{c}")?;
                if m.degree() > 0 {
                    write!(f, "*")?;
                }
            }
            if m.degree() > 0 {
                write!(f, "{m}")?;
            }
        }
        Ok(())
    }
}

/// Serialized as `{"degree": n, "terms": [[a, b, c, coeff], ...]}`.
impl Serialize for NormalHomogPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("NormalHomogPoly", 2)?;
        st.serialize_field("degree", &self.degree)?;
        let terms: Vec<[u64; 4]> = self
            .terms
            .iter()
            .map(|(m, &c)| [m.x, m.y, m.z as u64, c as u64])
            .collect();
        st.serialize_field("terms", &terms)?;
        st.end()
    }
}

/// A polynomial in `x, y, z` with unrestricted `z` exponents, before
/// reduction modulo the Fermat relation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RawPoly {
    pub terms: BTreeMap<(u64, u64, u64), u64>,
}

impl RawPoly {
    pub fn monomial(a: u64, b: u64, c: u64) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert((a, b, c), 1);
        RawPoly { terms }
    }

    pub fn add_term(&mut self, a: u64, b: u64, c: u64, coeff: u64) {
        *self.terms.entry((a, b, c)).or_insert(0) += coeff;
    }

    /// Product in `Z[x,y,z]`, coefficients reduced modulo `p`.
    pub fn mul(&self, other: &RawPoly, p: PrimeModulus) -> RawPoly {
        let mut out = RawPoly::default();
        for (&(a, b, c), &u) in &self.terms {
            for (&(a2, b2, c2), &v) in &other.terms {
                let e = out.terms.entry((a + a2, b + b2, c + c2)).or_insert(0);
                *e = (*e + p.mul(p.reduce(u), p.reduce(v)) as u64) % p.get() as u64;
            }
        }
        out
    }

    /// Common total degree of all terms; `None` for the zero polynomial.
    pub fn homogeneous_degree(&self) -> Result<Option<u64>> {
        let mut degree = None;
        for &(a, b, c) in self.terms.keys() {
            let n = a + b + c;
            match degree {
                None => degree = Some(n),
                Some(d) if d != n => return Err(Error::NotHomogeneous(d, n)),
                _ => {}
            }
        }
        Ok(degree)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ctx(d: u32, p: u64) -> RingContext {
        RingContext::with(d, p).unwrap()
    }

    fn poly(ctx: &RingContext, terms: &[((u64, u64, u32), u32)]) -> NormalHomogPoly {
        let degree = terms.first().map_or(0, |((a, b, c), _)| a + b + *c as u64);
        NormalHomogPoly::from_terms(
            ctx,
            degree,
            terms.iter().map(|&((a, b, c), v)| (NormalMonomial::new(a, b, c), v)),
        )
        .unwrap()
    }

    #[test]
    fn construction_checks() {
        assert!(matches!(
            RingContext::with(7, 7),
            Err(Error::CharacteristicDividesDegree { d: 7, p: 7 })
        ));
        assert!(matches!(
            RingContext::with(6, 3),
            Err(Error::CharacteristicDividesDegree { .. })
        ));
        assert!(matches!(RingContext::with(2, 3), Err(Error::DegreeTooSmall(2))));
        assert!(matches!(RingContext::with(7, 9), Err(Error::NotPrime(9))));
    }

    #[test]
    fn normal_form_examples() {
        let r = ctx(7, 3);
        let z7 = r.normal_form(&RawPoly::monomial(0, 0, 7)).unwrap();
        assert_eq!(z7, poly(&r, &[((7, 0, 0), 1), ((0, 7, 0), 1)]));
        let xy = r.normal_form(&RawPoly::monomial(1, 1, 0)).unwrap();
        assert_eq!(xy, poly(&r, &[((1, 1, 0), 1)]));
        let z8 = r.normal_form(&RawPoly::monomial(0, 0, 8)).unwrap();
        assert_eq!(z8, poly(&r, &[((7, 0, 1), 1), ((0, 7, 1), 1)]));
        // z^14 = x^14 + 2 x^7 y^7 + y^14
        let z14 = r.normal_form(&RawPoly::monomial(0, 0, 14)).unwrap();
        assert_eq!(z14, poly(&r, &[((14, 0, 0), 1), ((7, 7, 0), 2), ((0, 14, 0), 1)]));
    }

    #[test]
    fn not_homogeneous() {
        let r = ctx(7, 3);
        let mut raw = RawPoly::monomial(1, 0, 0);
        raw.add_term(1, 1, 0, 1);
        assert!(matches!(r.normal_form(&raw), Err(Error::NotHomogeneous(1, 2))));
    }

    #[test]
    fn dimensions() {
        let r = ctx(7, 3);
        assert_eq!(r.dim_graded_piece(0), 1);
        assert_eq!(r.dim_graded_piece(7), 35);
        assert_eq!(r.dim_graded_piece(6), 28);
        for d in [3u32, 5, 7, 13] {
            let r = ctx(d, 2);
            for n in 0..=200u64 {
                let dim = r.dim_graded_piece(n);
                assert_eq!(dim as usize, r.basis(n).len());
                let by_strands: usize = r
                    .strands_in_degree(n)
                    .into_iter()
                    .map(|k| r.strand_basis(n, k).len())
                    .sum();
                assert_eq!(by_strands as u64, dim);
                let (d, n) = (d as u64, n);
                if n + 2 >= d {
                    assert_eq!(dim, d * n - d * (d - 3) / 2, "d={d} n={n}");
                }
            }
        }
    }

    #[test]
    fn multiply_examples() {
        let r = ctx(7, 3);
        let f = poly(&r, &[((2, 1, 3), 2), ((0, 0, 6), 1)]);
        assert_eq!(r.multiply(&f, &r.one()), f);
        let x3 = r.monomial(3, 0, 0);
        let y3 = r.monomial(0, 3, 0);
        assert_eq!(r.multiply(&x3, &y3), r.monomial(3, 3, 0));
        let z3 = r.monomial(0, 0, 3);
        let z5 = r.monomial(0, 0, 5);
        assert_eq!(r.multiply(&z3, &z5), r.monomial(0, 0, 8));
        assert_eq!(
            r.multiply(&z3, &z5),
            poly(&r, &[((7, 0, 1), 1), ((0, 7, 1), 1)])
        );
    }

    #[test]
    fn frobenius_matches_repeated_squaring() {
        for (d, p) in [(7u32, 2u64), (7, 3), (5, 3), (3, 5)] {
            let r = ctx(d, p);
            let f = poly(&r, &[((2, 1, 1), 1), ((1, 1, 2), 2 % p as u32), ((2, 0, 2), 1)]);
            let mut q = 1;
            for _ in 0..3 {
                q *= p;
                assert_eq!(r.frobenius(&f, q).unwrap(), r.pow(&f, q), "d={d} p={p} q={q}");
            }
        }
    }

    #[test]
    fn frobenius_overflow() {
        let r = ctx(7, 3);
        let f = r.monomial(1 << 40, 0, 0);
        assert!(matches!(r.frobenius(&f, 1 << 30), Err(Error::ExponentOverflow(_))));
    }

    #[test]
    fn strands_are_respected_by_products() {
        let r = ctx(7, 5);
        for a in r.basis(9).iter().step_by(7) {
            for b in r.basis(11).iter().step_by(5) {
                let key = r.strand_add(r.strand_of(a), r.strand_of(b));
                let prod = r.shift(&r.monomial(a.x, a.y, a.z as u64), b);
                assert_eq!(prod.strand(&r), Some(key));
                assert_eq!(r.strand_sub(key, r.strand_of(b)), r.strand_of(a));
            }
        }
    }

    fn raw_strategy() -> impl Strategy<Value = (u64, Vec<((u64, u64), u64)>)> {
        (0u64..20).prop_flat_map(|n| {
            (
                Just(n),
                proptest::collection::vec(((0..=n), (0..=n)), 1..5).prop_map(move |v| {
                    v.into_iter()
                        .map(|(a, b)| {
                            let a = a.min(n);
                            let b = b.min(n - a);
                            ((a, b), 1 + (a * 7 + b) % 4)
                        })
                        .collect()
                }),
            )
        })
    }

    fn raw_of(n: u64, terms: &[((u64, u64), u64)]) -> RawPoly {
        let mut raw = RawPoly::default();
        for &((a, b), c) in terms {
            raw.add_term(a, b, n - a - b, c);
        }
        raw
    }

    proptest! {
        #[test]
        fn normal_form_idempotent((n, terms) in raw_strategy(), pi in 0usize..3) {
            let r = ctx(7, [2u64, 3, 23][pi]);
            let f = r.normal_form(&raw_of(n, &terms)).unwrap();
            let mut back = RawPoly::default();
            for (m, &c) in f.terms() {
                back.add_term(m.x, m.y, m.z as u64, c as u64);
            }
            let again = r.normal_form(&back).unwrap();
            prop_assert_eq!(again.terms(), f.terms());
        }

        #[test]
        fn multiplicative((n1, t1) in raw_strategy(), (n2, t2) in raw_strategy(), pi in 0usize..3) {
            let p = [2u64, 3, 23][pi];
            let r = ctx(5, p);
            let (f, g) = (raw_of(n1, &t1), raw_of(n2, &t2));
            let lhs = r.normal_form(&f.mul(&g, r.p())).unwrap();
            let rhs = r.multiply(&r.normal_form(&f).unwrap(), &r.normal_form(&g).unwrap());
            prop_assert_eq!(lhs.terms(), rhs.terms());
        }
    }
}
