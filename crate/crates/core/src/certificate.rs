//! Binomial-matrix certificates for `x^3 y^3` against `(x^4, y^4, z^4)` in
//! `GF(p)[x,y,z]/(x^7 + y^7 - z^7)`.
//!
//! * `p = 7l + 3`: an explicit combination shows `x^3p y^3p in (x^4p, y^4p, z^4p)`.
//!   The coefficients solve `A a = e_(l+1)` for the Toeplitz matrix
//!   `A = (C(4l+2, 2l+1+i-j))`, whose determinant is a product of binomials.
//! * `p = 7l + 2`: the bivariate statement
//!   `x^3p y^3p not in (x^4p, y^4p, (x^7+y^7)^(4l+1))` reduces to the
//!   invertibility of `M5 = (C(2l+1, 1+i-j))`, with determinant
//!   `prod_(t<l) (3l-t)/(1+t)`. Flatness of Frobenius on `K[x,y]` and the
//!   identities `4p^2 = 28k + 16`, `p(4l+1) = 4k - l + 2` with
//!   `k = 7l^2 + 4l` carry this to level `p^2` in `R`.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gfp::{binom_exact, is_prime, PrimeModulus};
use crate::linalg::{self, Solution, SparseColumns};
use crate::ring::{NormalHomogPoly, NormalMonomial, RingContext};
use crate::semistability::fourth_powers;
use crate::system::{membership, MembershipResult};

/// Fermat degree of the certified family.
pub const CERT_DEGREE: u32 = 7;

/// Largest prime for which non-membership certificates are re-checked by the
/// generic solver during verification.
pub const DEFAULT_ORACLE_BOUND: u32 = 200;

/// The `r x s` matrix with entries `C(a, b + i - j)`, `1 <= i <= r`, `1 <= j <= s`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BinomialMatrixSpec {
    pub a: u64,
    pub b: i64,
    pub r: usize,
    pub s: usize,
}

impl BinomialMatrixSpec {
    pub fn entry(&self, i: usize, j: usize) -> BigUint {
        binom_exact(self.a, self.b + i as i64 - j as i64)
    }

    /// Rows of exact entries, 0-indexed.
    pub fn exact(&self) -> Vec<Vec<BigUint>> {
        (1..=self.r)
            .map(|i| (1..=self.s).map(|j| self.entry(i, j)).collect())
            .collect()
    }

    /// Columns of the reduction modulo `p`.
    pub fn mod_p(&self, p: PrimeModulus) -> SparseColumns {
        let mut m = SparseColumns::new(self.r);
        let lucas = crate::gfp::LucasTable::new(p);
        for j in 1..=self.s {
            m.cols.push(
                (1..=self.r)
                    .filter_map(|i| {
                        let v = lucas.binom(self.a, self.b + i as i64 - j as i64);
                        (v != 0).then_some((i - 1, v))
                    })
                    .collect(),
            );
        }
        m
    }
}

/// Result of the column reduction: the final matrix and the performed
/// operations `(source, target)`, each meaning `col[target] += col[source]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColumnReduction {
    pub matrix: Vec<Vec<BigUint>>,
    pub operations: Vec<(usize, usize)>,
}

/// Bring `(C(a, b+i-j))` to `(C(a+j-1, b+i-1))` by adjacent column additions.
///
/// In round `k` the columns `s-1, ..., k+1` (0-indexed) each receive their
/// left neighbour, which raises the top argument of every column right of
/// `k` by one.
pub fn column_reduce_binomial(spec: &BinomialMatrixSpec) -> ColumnReduction {
    let mut matrix = spec.exact();
    let mut operations = Vec::new();
    for k in 0..spec.s.saturating_sub(1) {
        for j in (k + 1..spec.s).rev() {
            for row in matrix.iter_mut() {
                let left = row[j - 1].clone();
                row[j] += left;
            }
            operations.push((j - 1, j));
        }
    }
    ColumnReduction { matrix, operations }
}

/// The factors `C(a+r-1-t, b)` and `C(b+t, b)` of the product formula.
fn van_zeipel_factors(a: u64, b: i64, r: usize) -> Result<Vec<(BigUint, BigUint)>> {
    if b < 0 {
        return Err(Error::DenominatorZero);
    }
    (0..r as u64)
        .map(|t| {
            let num = binom_exact(a + r as u64 - 1 - t, b);
            let den = binom_exact(b as u64 + t, b);
            if den.is_zero() {
                Err(Error::DenominatorZero)
            } else {
                Ok((num, den))
            }
        })
        .collect()
}

/// `det (C(a, b+i-j))_(r x r) = prod_(t=0)^(r-1) C(a+r-1-t, b) / C(b+t, b)`.
pub fn van_zeipel_det(a: u64, b: i64, r: usize) -> Result<BigRational> {
    let mut acc = BigRational::one();
    for (num, den) in van_zeipel_factors(a, b, r)? {
        acc *= BigRational::new(BigInt::from(num), BigInt::from(den));
    }
    Ok(acc)
}

/// The product formula evaluated factor by factor modulo `p`.
pub fn van_zeipel_det_mod_p(a: u64, b: i64, r: usize, p: PrimeModulus) -> Result<u32> {
    if b < 0 {
        return Err(Error::DenominatorZero);
    }
    let mut acc = 1u32;
    for t in 0..r as u64 {
        let num = crate::gfp::binom_mod_p(a + r as u64 - 1 - t, b, p).value();
        let den = crate::gfp::binom_mod_p(b as u64 + t, b, p).value();
        if den == 0 {
            return Err(Error::PDividesDenominator { p: p.get() });
        }
        acc = p.mul(acc, p.mul(num, p.inv(den)?));
    }
    Ok(acc)
}

/// Exact determinant by fraction-free (Bareiss) elimination.
pub fn exact_det(rows: &[Vec<BigUint>]) -> BigInt {
    let n = rows.len();
    let mut m: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| r.iter().map(|v| BigInt::from(v.clone())).collect())
        .collect();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            let Some(sw) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(k, sw);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    if n == 0 {
        BigInt::one()
    } else {
        sign * &m[n - 1][n - 1]
    }
}

/// One named integer identity `lhs = rhs` (or `lhs <= rhs`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExponentIdentity {
    pub name: String,
    pub lhs: i128,
    pub rhs: i128,
    pub relation: Relation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    Equal,
    AtMost,
}

impl ExponentIdentity {
    fn new(name: &str, lhs: i128, rhs: i128, relation: Relation) -> Self {
        ExponentIdentity {
            name: name.to_string(),
            lhs,
            rhs,
            relation,
        }
    }

    pub fn holds(&self) -> bool {
        match self.relation {
            Relation::Equal => self.lhs == self.rhs,
            Relation::AtMost => self.lhs <= self.rhs,
        }
    }
}

fn residue_ell(p: u64, residue: u64) -> Result<u64> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p % 7 != residue {
        return Err(Error::HypothesisFailed(format!(
            "p = {p} is not {residue} mod 7"
        )));
    }
    Ok(p / 7)
}

/// Coefficients for `x^3p y^3p in (x^4p, y^4p, z^4p)` when `p = 7l + 3`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MembershipCertificate37 {
    pub p: u32,
    pub ell: u64,
    /// `a_0, ..., a_2l` with `A a = e_(l+1)`.
    pub coefficients: Vec<u32>,
    /// `det A` modulo `p` from the product formula.
    pub det_a: u32,
    pub exponent_identities: Vec<ExponentIdentity>,
}

/// `p = 7l + 2`: `det M5` and the exponent bookkeeping for level `p^2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NonMembershipCertificate27 {
    pub p: u32,
    pub ell: u64,
    pub k: u64,
    pub det_m5: u32,
    pub exponent_identities: Vec<ExponentIdentity>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Certificate {
    Membership(MembershipCertificate37),
    NonMembership(NonMembershipCertificate27),
}

impl Certificate {
    pub fn p(&self) -> u32 {
        match self {
            Certificate::Membership(c) => c.p,
            Certificate::NonMembership(c) => c.p,
        }
    }

    /// `true` for membership at the certificate's level.
    pub fn claims_membership(&self) -> bool {
        matches!(self, Certificate::Membership(_))
    }

    /// Frobenius level `q` at which the claim is made: `p` or `p^2`.
    pub fn level(&self) -> u64 {
        match self {
            Certificate::Membership(c) => c.p as u64,
            Certificate::NonMembership(c) => (c.p as u64).pow(2),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }
}

/// `A = (C(4l+2, 2l+1+i-j))` of size `2l+1`.
pub fn membership_matrix(ell: u64) -> BinomialMatrixSpec {
    let n = 2 * ell as usize + 1;
    BinomialMatrixSpec {
        a: 4 * ell + 2,
        b: 2 * ell as i64 + 1,
        r: n,
        s: n,
    }
}

/// `M1 = (C(4l+1, 2l+i-j))` of size `(2l+1) x 2l`.
pub fn nonmembership_matrix(ell: u64) -> BinomialMatrixSpec {
    BinomialMatrixSpec {
        a: 4 * ell + 1,
        b: 2 * ell as i64,
        r: 2 * ell as usize + 1,
        s: 2 * ell as usize,
    }
}

/// `M5 = (C(2l+1, 1+i-j))` of size `l x l`.
pub fn m5_matrix(ell: u64) -> BinomialMatrixSpec {
    BinomialMatrixSpec {
        a: 2 * ell + 1,
        b: 1,
        r: ell as usize,
        s: ell as usize,
    }
}

fn membership_identities(ell: u64) -> Vec<ExponentIdentity> {
    let l = ell as i128;
    let p = 7 * l + 3;
    vec![
        ExponentIdentity::new("3p = 7(3l+1) + 2", 3 * p, 7 * (3 * l + 1) + 2, Relation::Equal),
        ExponentIdentity::new("4p = 28l + 12", 4 * p, 28 * l + 12, Relation::Equal),
        ExponentIdentity::new("4p + 2 = 7(4l+2)", 4 * p + 2, 7 * (4 * l + 2), Relation::Equal),
    ]
}

fn nonmembership_identities(ell: u64) -> Vec<ExponentIdentity> {
    let l = ell as i128;
    let p = 7 * l + 2;
    let k = 7 * l * l + 4 * l;
    vec![
        ExponentIdentity::new("p^2 = 7k + 4", p * p, 7 * k + 4, Relation::Equal),
        ExponentIdentity::new("4p^2 = 28k + 16", 4 * p * p, 28 * k + 16, Relation::Equal),
        ExponentIdentity::new("p(4l+1) = 4k - l + 2", p * (4 * l + 1), 4 * k - l + 2, Relation::Equal),
        ExponentIdentity::new("4k - l + 2 <= 4k + 2", 4 * k - l + 2, 4 * k + 2, Relation::AtMost),
    ]
}

/// Solve `A a = e_(l+1)` over `GF(p)` for `p = 7l + 3`.
pub fn build_membership_certificate(p: u64) -> Result<MembershipCertificate37> {
    let ell = residue_ell(p, 3)?;
    let pm = PrimeModulus::new(p)?;
    let spec = membership_matrix(ell);
    let dump = || format!("A = C({}, {} + i - j), size {}", spec.a, spec.b, spec.r);
    let det_a = van_zeipel_det_mod_p(spec.a, spec.b, spec.r, pm)
        .map_err(|_| Error::SingularSystem { p: pm.get(), dump: dump() })?;
    if det_a == 0 {
        return Err(Error::SingularSystem { p: pm.get(), dump: dump() });
    }
    let a = spec.mod_p(pm);
    let coefficients = match linalg::solve(&a, &[(ell as usize, 1)], pm) {
        Solution::In(x) => x,
        Solution::Out(_) => {
            return Err(Error::SingularSystem { p: pm.get(), dump: dump() });
        }
    };
    Ok(MembershipCertificate37 {
        p: pm.get(),
        ell,
        coefficients,
        det_a,
        exponent_identities: membership_identities(ell),
    })
}

/// `det M5 = prod_(t<l) (3l - t)/(1 + t)` modulo `p`.
pub fn det_m5_mod_p(ell: u64, p: PrimeModulus) -> Result<u32> {
    let mut acc = 1u32;
    for t in 0..ell {
        let num = p.reduce(3 * ell - t);
        let den = p.reduce(1 + t);
        acc = p.mul(acc, p.mul(num, p.inv(den)?));
    }
    Ok(acc)
}

/// Record `det M5` and the exponent identities for `p = 7l + 2`.
pub fn build_nonmembership_certificate(p: u64) -> Result<NonMembershipCertificate27> {
    let ell = residue_ell(p, 2)?;
    let pm = PrimeModulus::new(p)?;
    let det_m5 = det_m5_mod_p(ell, pm).map_err(|_| Error::ZeroDeterminant {
        p: pm.get(),
        dump: format!("l = {ell}: a factor 1 + t vanishes"),
    })?;
    if det_m5 == 0 {
        return Err(Error::ZeroDeterminant {
            p: pm.get(),
            dump: format!("l = {ell}: prod (3l - t)/(1 + t) = 0"),
        });
    }
    let exponent_identities = nonmembership_identities(ell);
    if let Some(bad) = exponent_identities.iter().find(|i| !i.holds()) {
        return Err(Error::Consistency(format!("identity {} fails", bad.name)));
    }
    Ok(NonMembershipCertificate27 {
        p: pm.get(),
        ell,
        k: 7 * ell * ell + 4 * ell,
        det_m5,
        exponent_identities,
    })
}

/// `x^a y^b` as a ring element.
fn xy(ctx: &RingContext, a: u64, b: u64) -> NormalHomogPoly {
    ctx.monomial(a, b, 0)
}

/// Coefficients of `(sum a_i X^i Y^(2l-i)) (X + Y)^(4l+2)` indexed by the
/// `X` exponent.
fn compressed_expansion(cert: &MembershipCertificate37, p: PrimeModulus) -> Vec<u32> {
    let ell = cert.ell;
    let n = 4 * ell + 2;
    let lucas = crate::gfp::LucasTable::new(p);
    let mut out = vec![0u32; (6 * ell + 3) as usize];
    for (i, &a) in cert.coefficients.iter().enumerate() {
        if a == 0 {
            continue;
        }
        for j in 0..=n {
            let c = lucas.binom(n, j as i64);
            let k = i + j as usize;
            out[k] = p.add(out[k], p.mul(a, c));
        }
    }
    out
}

/// The explicit combination `x^3p y^3p = h_1 x^4p + h_2 y^4p + h_3 z^4p` in `R`.
pub fn membership_combination(
    cert: &MembershipCertificate37,
    ctx: &RingContext,
) -> Result<MembershipResult> {
    let p = ctx.p();
    let ell = cert.ell;
    let pp = p.get() as u64;
    let cut = 4 * pp;
    // g = sum a_i x^7i y^7(2l-i); g (x^7 + y^7)^(4l+2) - x^7(3l+1) y^7(3l+1)
    // has only terms divisible by x^4p or y^4p
    let expansion = compressed_expansion(cert, p);
    let target = 3 * ell + 1;
    let (mut h1, mut h2) = (Vec::new(), Vec::new());
    let top = 6 * ell + 2;
    for (i, &c) in expansion.iter().enumerate() {
        let i = i as u64;
        let c = if i == target { p.sub(c, 1) } else { c };
        if c == 0 {
            continue;
        }
        // term c X^i Y^(6l+2-i), times x^2 y^2
        let (ex, ey) = (7 * i + 2, 7 * (top - i) + 2);
        if ex >= cut {
            h1.push((NormalMonomial::new(ex - cut, ey, 0), p.neg(c)));
        } else if ey >= cut {
            h2.push((NormalMonomial::new(ex, ey - cut, 0), p.neg(c)));
        } else {
            return Err(Error::Consistency(format!(
                "term X^{i} survives the cutoff for p = {pp}"
            )));
        }
    }
    let deg = 6 * pp - cut;
    // x^2 y^2 g z^2 times z^4p equals x^2 y^2 g (x^7+y^7)^(4l+2)
    let h3 = NormalHomogPoly::from_terms(
        ctx,
        deg,
        cert.coefficients.iter().enumerate().map(|(i, &a)| {
            let i = i as u64;
            (NormalMonomial::new(7 * i + 2, 7 * (2 * ell - i) + 2, 2), a)
        }),
    )?;
    Ok(MembershipResult::In {
        coefficients: vec![
            NormalHomogPoly::from_terms(ctx, deg, h1)?,
            NormalHomogPoly::from_terms(ctx, deg, h2)?,
            h3,
        ],
    })
}

fn frobenius_gens(ctx: &RingContext, q: u64) -> Vec<NormalHomogPoly> {
    fourth_powers(ctx)
        .iter()
        .map(|g| ctx.frobenius(g, q).expect("small exponents"))
        .collect()
}

fn verify_membership(cert: &MembershipCertificate37, ctx: &RingContext) -> bool {
    let p = ctx.p();
    let ell = cert.ell;
    if cert.p as u64 != 7 * ell + 3 || cert.coefficients.len() != 2 * ell as usize + 1 {
        return false;
    }
    if !cert.exponent_identities.iter().all(ExponentIdentity::holds)
        || cert.exponent_identities != membership_identities(ell)
    {
        return false;
    }
    let spec = membership_matrix(ell);
    if van_zeipel_det_mod_p(spec.a, spec.b, spec.r, p).ok() != Some(cert.det_a) || cert.det_a == 0 {
        return false;
    }
    // A a = e_(l+1)
    let a = spec.mod_p(p);
    let image = linalg::apply(&a, &cert.coefficients, p);
    if image
        .iter()
        .enumerate()
        .any(|(i, &v)| v != u32::from(i as u64 == ell))
    {
        return false;
    }
    // compressed variables: the surviving window X^(2l+1) .. X^(4l+1) holds
    // exactly X^(3l+1) Y^(3l+1)
    let expansion = compressed_expansion(cert, p);
    let window = (2 * ell + 1)..=(4 * ell + 1);
    let survivors: Vec<(u64, u32)> = window
        .map(|i| (i, expansion[i as usize]))
        .filter(|&(_, c)| c != 0)
        .collect();
    if survivors != vec![(3 * ell + 1, 1)] {
        return false;
    }
    // the full ring identity
    let q = p.get() as u64;
    let f = xy(ctx, 3 * q, 3 * q);
    match membership_combination(cert, ctx) {
        Ok(comb) => comb.verify(&f, &frobenius_gens(ctx, q), ctx),
        Err(_) => false,
    }
}

fn verify_nonmembership(cert: &NonMembershipCertificate27, ctx: &RingContext, oracle_bound: u32) -> bool {
    let p = ctx.p();
    let ell = cert.ell;
    if cert.p as u64 != 7 * ell + 2 || cert.k != 7 * ell * ell + 4 * ell {
        return false;
    }
    if det_m5_mod_p(ell, p).ok() != Some(cert.det_m5) || cert.det_m5 == 0 {
        return false;
    }
    if cert.exponent_identities != nonmembership_identities(ell)
        || !cert.exponent_identities.iter().all(ExponentIdentity::holds)
    {
        return false;
    }
    if cert.p > oracle_bound {
        return true;
    }
    bivariate_nonmembership_oracle(ctx).unwrap_or_default()
}

/// Generic check of `x^3p y^3p not in (x^4p, y^4p, (x^7+y^7)^(4l+1))`.
///
/// `K[x,y]` sits in `R` as the `z`-free part and `R` is free over it, so the
/// statement can be decided by the ring solver.
pub fn bivariate_nonmembership_oracle(ctx: &RingContext) -> Result<bool> {
    let p = ctx.p().get() as u64;
    let ell = p / 7;
    let f = xy(ctx, 3 * p, 3 * p);
    let binomial = ctx.pow(&ctx.add(&xy(ctx, 7, 0), &xy(ctx, 0, 7)), 4 * ell + 1);
    let gens = vec![xy(ctx, 4 * p, 0), xy(ctx, 0, 4 * p), binomial];
    let res = membership(&f, &gens, ctx, true)?;
    Ok(!res.is_in() && res.verify(&f, &gens, ctx))
}

/// Re-check a certificate against a ring context for `d = 7` and its prime.
pub fn verify_certificate(cert: &Certificate, ctx: &RingContext) -> bool {
    verify_certificate_with(cert, ctx, DEFAULT_ORACLE_BOUND)
}

pub fn verify_certificate_with(cert: &Certificate, ctx: &RingContext, oracle_bound: u32) -> bool {
    if ctx.d() != CERT_DEGREE || ctx.p().get() != cert.p() {
        return false;
    }
    match cert {
        Certificate::Membership(c) => verify_membership(c, ctx),
        Certificate::NonMembership(c) => verify_nonmembership(c, ctx, oracle_bound),
    }
}

/// Build and verify the certificate for `p` if `p` is 2 or 3 mod 7.
pub fn certificate_for(p: u64, ctx: &RingContext) -> Result<Option<Certificate>> {
    let cert = match p % 7 {
        3 => Certificate::Membership(build_membership_certificate(p)?),
        2 => Certificate::NonMembership(build_nonmembership_certificate(p)?),
        _ => return Ok(None),
    };
    if !verify_certificate(&cert, ctx) {
        return Err(Error::Consistency(format!(
            "certificate for p = {p} failed verification: {}",
            cert.to_json()?
        )));
    }
    Ok(Some(cert))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn column_reduction_examples() {
        let spec = BinomialMatrixSpec { a: 4, b: 1, r: 2, s: 2 };
        assert_eq!(spec.exact(), vec![vec![big(4), big(1)], vec![big(6), big(4)]]);
        let red = column_reduce_binomial(&spec);
        assert_eq!(red.matrix, vec![vec![big(4), big(5)], vec![big(6), big(10)]]);
        assert_eq!(red.operations, vec![(0, 1)]);
        let single = BinomialMatrixSpec { a: 9, b: 3, r: 4, s: 1 };
        let red = column_reduce_binomial(&single);
        assert_eq!(red.matrix, single.exact());
        assert!(red.operations.is_empty());
    }

    #[test]
    fn van_zeipel_examples() {
        assert_eq!(van_zeipel_det(4, 1, 2).unwrap(), BigRational::from_integer(10.into()));
        assert_eq!(van_zeipel_det(9, 4, 1).unwrap(), BigRational::from_integer(126.into()));
        assert!(matches!(van_zeipel_det(4, -1, 2), Err(Error::DenominatorZero)));
        let p23 = PrimeModulus::new(23).unwrap();
        assert_ne!(van_zeipel_det_mod_p(14, 7, 7, p23).unwrap(), 0);
        let p3 = PrimeModulus::new(3).unwrap();
        assert!(matches!(
            van_zeipel_det_mod_p(5, 2, 3, p3),
            Err(Error::PDividesDenominator { p: 3 })
        ));
    }

    #[test]
    fn bareiss_small() {
        let m = vec![vec![big(2), big(1)], vec![big(1), big(3)]];
        assert_eq!(exact_det(&m), BigInt::from(5));
        let m = vec![vec![big(0), big(1)], vec![big(1), big(0)]];
        assert_eq!(exact_det(&m), BigInt::from(-1));
    }

    #[test]
    fn membership_p3() {
        let cert = build_membership_certificate(3).unwrap();
        assert_eq!(cert.coefficients, vec![2]);
        let ctx = RingContext::with(7, 3).unwrap();
        assert!(verify_certificate(&Certificate::Membership(cert), &ctx));
    }

    #[test]
    fn nonmembership_p23() {
        let cert = build_nonmembership_certificate(23).unwrap();
        assert_eq!(cert.det_m5, 84 % 23);
        assert_eq!(cert.k, 75);
        let ctx = RingContext::with(7, 23).unwrap();
        assert!(verify_certificate(&Certificate::NonMembership(cert), &ctx));
    }

    #[test]
    fn wrong_residue() {
        assert!(matches!(build_membership_certificate(23), Err(Error::HypothesisFailed(_))));
        assert!(matches!(build_nonmembership_certificate(17), Err(Error::HypothesisFailed(_))));
        assert!(matches!(build_membership_certificate(10), Err(Error::NotPrime(10))));
    }

    #[test]
    fn tampered_certificates_fail() {
        let ctx = RingContext::with(7, 17).unwrap();
        let mut cert = build_membership_certificate(17).unwrap();
        cert.coefficients[0] = (cert.coefficients[0] + 1) % 17;
        assert!(!verify_certificate(&Certificate::Membership(cert), &ctx));
        let ctx = RingContext::with(7, 23).unwrap();
        let mut cert = build_nonmembership_certificate(23).unwrap();
        cert.det_m5 = 1;
        assert!(!verify_certificate(&Certificate::NonMembership(cert), &ctx));
        // context mismatch
        let cert = build_nonmembership_certificate(2).unwrap();
        assert!(!verify_certificate(&Certificate::NonMembership(cert), &ctx));
    }

    #[test]
    fn json_shape() {
        let cert = Certificate::Membership(build_membership_certificate(3).unwrap());
        let v: serde_json::Value = serde_json::from_str(&cert.to_json().unwrap()).unwrap();
        assert_eq!(v["kind"], "membership");
        assert_eq!(v["p"], 3);
        assert_eq!(v["ell"], 0);
        assert_eq!(v["coefficients"][0], 2);
        assert!(v["exponent_identities"].is_array());
        let cert = Certificate::NonMembership(build_nonmembership_certificate(2).unwrap());
        let v: serde_json::Value = serde_json::from_str(&cert.to_json().unwrap()).unwrap();
        assert_eq!(v["kind"], "non-membership");
        assert_eq!(v["det_m5"], 1);
    }
}
