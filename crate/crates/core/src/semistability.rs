//! Slopes of syzygy bundles on the Fermat curve and instability witnesses.
//!
//! For homogeneous `f_1, f_2, f_3` the syzygy bundle `Syz(f_1,f_2,f_3)(m)`
//! has rank 2 and degree `(2m - sum deg f_i) * d`. A nonzero syzygy of total
//! degree `m'` is a global section of `Syz(m')`; when that bundle has
//! negative degree the section destabilizes it.

use num_rational::Ratio;
use serde::Serialize;

use crate::closure::frobenius_power;
use crate::error::{Error, Result};
use crate::linalg::{self, SparseColumns};
use crate::ring::{NormalHomogPoly, NormalMonomial, RingContext};
use crate::system::{first_syzygy, has_syzygy, is_syzygy};

/// Genus of a smooth plane curve of degree `d`.
pub fn genus_plane_curve(d: u64) -> u64 {
    d.saturating_sub(1) * d.saturating_sub(2) / 2
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Twist {
    Integral(u64),
    /// The sum of degrees is odd; the twist would be `sum / 2`.
    NonIntegral { sum: u64 },
}

/// The twist `m` with `2m = d1 + d2 + d3`, where the syzygy bundle has degree 0.
pub fn balanced_twist(d1: u64, d2: u64, d3: u64) -> Twist {
    let sum = d1 + d2 + d3;
    if sum % 2 == 0 {
        Twist::Integral(sum / 2)
    } else {
        Twist::NonIntegral { sum }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SlopeData {
    /// Degree as a divisor degree on the curve (so a multiple of `d`).
    pub degree: i64,
    pub rank: u32,
}

impl SlopeData {
    /// Slope data of `Syz(f_1..f_n)(m)` for generators of the given degrees.
    pub fn syzygy_bundle(degrees: &[u64], m: u64, d: u32) -> Self {
        let n = degrees.len() as i64;
        let sum: i64 = degrees.iter().map(|&x| x as i64).sum();
        SlopeData {
            degree: ((n - 1) * m as i64 - sum) * d as i64,
            rank: (n - 1).max(0) as u32,
        }
    }

    pub fn slope(&self) -> Ratio<i64> {
        Ratio::new(self.degree, self.rank.max(1) as i64)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessSource {
    /// The explicit construction for pure fourth powers.
    Lemma,
    /// A kernel search over graded pieces.
    Search,
}

/// A nonzero syzygy of `(f_1^q, f_2^q, f_3^q)` in a twist of negative degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InstabilityWitness {
    pub e: u32,
    pub q: u64,
    /// Total degree `m'` of the syzygy.
    pub twist: u64,
    pub syzygy: Vec<NormalHomogPoly>,
    /// `2m' - q * sum deg f_i`, in units of `deg O(1)`.
    pub twisted_degree: i64,
    /// Slope data of `Syz(f^q)(m')`, which has the syzygy as a section.
    pub bundle: SlopeData,
    /// Lower bound `(q m - m') d` for the degree of the destabilizing line
    /// subbundle of `Syz(f^q)(q m)`, when the balanced twist `m` is integral.
    pub sub_degree: Option<i64>,
    pub quotient_degree: Option<i64>,
    pub source: WitnessSource,
}

impl InstabilityWitness {
    fn new(
        gens: &[NormalHomogPoly],
        e: u32,
        q: u64,
        twist: u64,
        syzygy: Vec<NormalHomogPoly>,
        source: WitnessSource,
        ctx: &RingContext,
    ) -> Self {
        let degrees: Vec<u64> = gens.iter().map(|g| g.degree() * q).collect();
        let sum: u64 = degrees.iter().sum();
        let twisted_degree = 2 * twist as i64 - sum as i64;
        let d = ctx.d() as i64;
        let (sub_degree, quotient_degree) = match balanced_twist_of(gens) {
            Twist::Integral(m) => {
                let sub = (q as i64 * m as i64 - twist as i64) * d;
                (Some(sub), Some(-sub))
            }
            Twist::NonIntegral { .. } => (None, None),
        };
        InstabilityWitness {
            e,
            q,
            twist,
            syzygy,
            twisted_degree,
            bundle: SlopeData::syzygy_bundle(&degrees, twist, ctx.d()),
            sub_degree,
            quotient_degree,
            source,
        }
    }

    /// Re-check the syzygy against the Frobenius powers of `gens`.
    pub fn verify(&self, gens: &[NormalHomogPoly], ctx: &RingContext) -> bool {
        let Ok(ideal) = frobenius_power(gens, self.e, ctx) else {
            return false;
        };
        ideal.q == self.q
            && self.twisted_degree < 0
            && self
                .syzygy
                .iter()
                .zip(&ideal.generators)
                .all(|(h, g)| h.is_zero() || h.degree() + g.degree() == self.twist)
            && is_syzygy(&self.syzygy, &ideal.generators, ctx)
    }
}

fn balanced_twist_of(gens: &[NormalHomogPoly]) -> Twist {
    match gens {
        [a, b, c] => balanced_twist(a.degree(), b.degree(), c.degree()),
        _ => Twist::NonIntegral {
            sum: gens.iter().map(|g| g.degree()).sum(),
        },
    }
}

/// `(x^4, y^4, z^4)` in the given ring.
pub fn fourth_powers(ctx: &RingContext) -> Vec<NormalHomogPoly> {
    vec![ctx.monomial(4, 0, 0), ctx.monomial(0, 4, 0), ctx.monomial(0, 0, 4)]
}

/// Explicit syzygy of `(x^4p, y^4p, z^4p)` in negative twisted degree.
///
/// Writes `p = d l + r`; requires `d/4 <= r < d/3`. With `t = 4r - d` one has
/// `z^4p = z^t (x^d + y^d)^(4l+1)`, and a kernel vector of a `2l x (2l+1)`
/// binomial matrix yields `h_3` with `h_3 (x^d+y^d)^(4l+1) in (x^4p, y^4p)`
/// in `K[x,y]`. The syzygy has total degree `d(6l+1) + 3t` and twisted
/// degree `12r - 4d`.
pub fn lemma_syzygy_construction(ctx: &RingContext) -> Result<InstabilityWitness> {
    let d = ctx.d() as u64;
    let p = ctx.p().get() as u64;
    let (l, r) = (p / d, p % d);
    if 4 * r < d || 3 * r >= d {
        return Err(Error::HypothesisFailed(format!(
            "p = {p} = {d}*{l} + {r} needs {d}/4 <= {r} < {d}/3"
        )));
    }
    let t = 4 * r - d;
    let n = 4 * l + 1;
    let four_p = 4 * p;
    // rows: exponents x^(t + d I) with 2l+1 <= I <= 4l; columns: multipliers
    let rows = (2 * l) as usize;
    let cols = (2 * l + 1) as usize;
    let mut m = SparseColumns::new(rows);
    for i in 0..cols as u64 {
        let col = (0..rows as u64)
            .filter_map(|k| {
                let big_i = 2 * l + 1 + k;
                let v = ctx.binom(n, big_i as i64 - 2 * l as i64 + i as i64);
                (v != 0).then_some((k as usize, v))
            })
            .collect();
        m.cols.push(col);
    }
    let kernel = linalg::kernel_basis(&m, ctx.p());
    let c = kernel.first().ok_or_else(|| {
        Error::Consistency(format!("no kernel vector for the d = {d}, p = {p} construction"))
    })?;
    let h3 = NormalHomogPoly::from_terms(
        ctx,
        2 * t + 2 * d * l,
        (0..cols as u64).map(|i| {
            (
                NormalMonomial::new(t + d * (2 * l - i), t + d * i, 0),
                c[i as usize],
            )
        }),
    )?;
    let binomial = ctx.pow(
        &ctx.add(&ctx.monomial(d, 0, 0), &ctx.monomial(0, d, 0)),
        n,
    );
    let product = ctx.multiply(&h3, &binomial);
    let pn = ctx.p();
    let mut h1_terms = Vec::new();
    let mut h2_terms = Vec::new();
    for (mono, &coef) in product.terms() {
        let neg = pn.neg(coef);
        if mono.x >= four_p {
            h1_terms.push((NormalMonomial::new(mono.x - four_p, mono.y, 0), neg));
        } else if mono.y >= four_p {
            h2_terms.push((NormalMonomial::new(mono.x, mono.y - four_p, 0), neg));
        } else {
            return Err(Error::Consistency(format!(
                "term {mono} survives modulo (x^{four_p}, y^{four_p})"
            )));
        }
    }
    let low = product.degree() - four_p;
    let zt = NormalMonomial::new(0, 0, t as u32);
    let h1 = ctx.shift(&NormalHomogPoly::from_terms(ctx, low, h1_terms)?, &zt);
    let h2 = ctx.shift(&NormalHomogPoly::from_terms(ctx, low, h2_terms)?, &zt);
    let twist = four_p + low + t;
    debug_assert_eq!(twist, d * (6 * l + 1) + 3 * t);
    let base = fourth_powers(ctx);
    let witness = InstabilityWitness::new(
        &base,
        1,
        p,
        twist,
        vec![h1, h2, h3],
        WitnessSource::Lemma,
        ctx,
    );
    if !witness.verify(&base, ctx) {
        return Err(Error::Consistency(format!(
            "constructed syzygy for d = {d}, p = {p} does not verify"
        )));
    }
    Ok(witness)
}

/// Search Frobenius levels `1..=e_max` for a syzygy of `(f_i^q)` in a twist
/// of negative degree. Levels whose largest searched twist exceeds
/// `degree_budget` are not searched.
///
/// Syzygy spaces grow with the twist (multiplication by `x` is injective),
/// so the smallest such twist is found by galloping down from the balanced
/// twist and then bisecting.
pub fn detect_instability(
    gens: &[NormalHomogPoly],
    e_max: u32,
    degree_budget: u64,
    ctx: &RingContext,
) -> Result<Option<InstabilityWitness>> {
    if gens.len() != 3 {
        return Err(Error::GeneratorCount(gens.len()));
    }
    if gens.iter().any(|g| g.is_zero()) {
        return Err(Error::HypothesisFailed("zero generator".into()));
    }
    for e in 1..=e_max {
        let ideal = frobenius_power(gens, e, ctx)?;
        let q = ideal.q;
        let fq = &ideal.generators;
        let sum: u64 = fq.iter().map(|g| g.degree()).sum();
        let lo = fq.iter().map(|g| g.degree()).min().unwrap_or(0);
        let hi = (sum - 1) / 2;
        if hi > degree_budget {
            break;
        }
        if lo > hi || !has_syzygy(fq, hi, ctx)? {
            continue;
        }
        // invariant: syzygies in degree b, none below a
        let (mut a, mut b) = (lo, hi);
        let mut step = 1;
        while b > a {
            let probe = b.saturating_sub(step).max(a);
            if has_syzygy(fq, probe, ctx)? {
                b = probe;
                step *= 2;
            } else {
                a = probe + 1;
                break;
            }
        }
        while a < b {
            let mid = a + (b - a) / 2;
            if has_syzygy(fq, mid, ctx)? {
                b = mid;
            } else {
                a = mid + 1;
            }
        }
        let syz = first_syzygy(fq, b, ctx)?.ok_or_else(|| {
            Error::Consistency(format!("syzygy dimension positive in degree {b} but none found"))
        })?;
        let w = InstabilityWitness::new(gens, e, q, b, syz, WitnessSource::Search, ctx);
        if !w.verify(gens, ctx) {
            return Err(Error::Consistency("instability witness does not verify".into()));
        }
        return Ok(Some(w));
    }
    Ok(None)
}
