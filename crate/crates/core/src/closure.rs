//! Frobenius powers, Frobenius closure and the tight-closure decision.
//!
//! Tight closure of `(f_1, f_2, f_3)` is decided through the following
//! criterion, used as a trusted theorem: if `p^u >= 2g + 1` and the `e`-th
//! Frobenius pull-back of the syzygy bundle at the balanced twist `m` has a
//! destabilizing line subbundle, then for `f` of degree `m`
//! `f in I*` iff `f^Q in I^[Q]` with `Q = p^(u+e)`.
//! Membership in the Frobenius closure also implies membership in the tight
//! closure and needs no hypothesis.

use serde::Serialize;

use crate::certificate::{certificate_for, Certificate};
use crate::error::{Error, Result};
use crate::hk::colength;
use crate::ring::{NormalHomogPoly, RingContext};
use crate::semistability::{
    balanced_twist, detect_instability, fourth_powers, genus_plane_curve,
    lemma_syzygy_construction, InstabilityWitness, Twist,
};
use crate::system::{membership, MembershipResult, SeparatingFunctional};

/// Default search limits.
pub const DEFAULT_E_MAX: u32 = 2;
/// Largest target degree handed to the generic solver by default.
pub const DEFAULT_DEGREE_BUDGET: u64 = 20_000;

/// `I^[q]` for `q = p^e`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrobeniusIdeal {
    pub base: Vec<NormalHomogPoly>,
    pub e: u32,
    pub q: u64,
    pub generators: Vec<NormalHomogPoly>,
}

pub fn frobenius_q(e: u32, ctx: &RingContext) -> Result<u64> {
    (ctx.p().get() as u64)
        .checked_pow(e)
        .ok_or_else(|| Error::ExponentOverflow(format!("{}^{e}", ctx.p().get())))
}

/// Raise every generator to the `p^e`-th power.
pub fn frobenius_power(gens: &[NormalHomogPoly], e: u32, ctx: &RingContext) -> Result<FrobeniusIdeal> {
    let q = frobenius_q(e, ctx)?;
    let generators = gens
        .iter()
        .map(|g| ctx.frobenius(g, q))
        .collect::<Result<Vec<_>>>()?;
    Ok(FrobeniusIdeal {
        base: gens.to_vec(),
        e,
        q,
        generators,
    })
}

/// Apply Frobenius to a combination `f = sum h_i g_i`, giving one for
/// `f^p = sum h_i^p g_i^p`.
pub fn frobenius_combination(h: &[NormalHomogPoly], ctx: &RingContext) -> Result<Vec<NormalHomogPoly>> {
    h.iter()
        .map(|x| ctx.frobenius(x, ctx.p().get() as u64))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum VerdictKind {
    InIdeal,
    InFrobeniusClosure { e: u32 },
    OutAtAllTested { e_max: u32 },
    TightIn,
    TightOut,
    Undecided { reason: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    /// Binomial-matrix certificate.
    Certificate,
    /// Graded linear algebra.
    Generic,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum ClosureCertificate {
    /// `f^q = sum h_i g_i^q`.
    Combination { q: u64, coefficients: Vec<NormalHomogPoly> },
    /// A functional separating `f^q` from `I^[q]`.
    Functional { q: u64, functional: SeparatingFunctional },
    Binomial(Certificate),
}

impl ClosureCertificate {
    fn from_membership(q: u64, res: MembershipResult) -> Self {
        match res {
            MembershipResult::In { coefficients } => ClosureCertificate::Combination { q, coefficients },
            MembershipResult::Out { functional } => ClosureCertificate::Functional { q, functional },
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            ClosureCertificate::Combination { .. } => "combination",
            ClosureCertificate::Functional { .. } => "functional",
            ClosureCertificate::Binomial(Certificate::Membership(_)) => "binomial-membership",
            ClosureCertificate::Binomial(Certificate::NonMembership(_)) => "binomial-nonmembership",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClosureVerdict {
    pub kind: VerdictKind,
    /// The level `q` at which the deciding membership question was answered.
    pub q: Option<u64>,
    pub route: Option<Route>,
    pub certificate: Option<ClosureCertificate>,
    pub witness: Option<InstabilityWitness>,
    /// Cross-checks and bookkeeping, e.g. `generic q=64 agrees`.
    pub notes: Vec<String>,
}

impl ClosureVerdict {
    fn new(kind: VerdictKind) -> Self {
        ClosureVerdict {
            kind,
            q: None,
            route: None,
            certificate: None,
            witness: None,
            notes: Vec::new(),
        }
    }

    fn undecided(reason: impl Into<String>) -> Self {
        Self::new(VerdictKind::Undecided {
            reason: reason.into(),
        })
    }

    pub fn is_undecided(&self) -> bool {
        matches!(self.kind, VerdictKind::Undecided { .. })
    }

    /// Short label such as `TightOut` or `InFrobeniusClosure(1)`.
    pub fn label(&self) -> String {
        match &self.kind {
            VerdictKind::InIdeal => "InIdeal".into(),
            VerdictKind::InFrobeniusClosure { e } => format!("InFrobeniusClosure({e})"),
            VerdictKind::OutAtAllTested { e_max } => format!("OutAtAllTested({e_max})"),
            VerdictKind::TightIn => "TightIn".into(),
            VerdictKind::TightOut => "TightOut".into(),
            VerdictKind::Undecided { .. } => "Undecided".into(),
        }
    }
}

/// Decide `f^q in I^[q]` for `q = p^e`, returning the membership certificate.
pub fn frobenius_membership(
    f: &NormalHomogPoly,
    gens: &[NormalHomogPoly],
    e: u32,
    ctx: &RingContext,
) -> Result<(u64, MembershipResult)> {
    let ideal = frobenius_power(gens, e, ctx)?;
    let fq = ctx.frobenius(f, ideal.q)?;
    let res = membership(&fq, &ideal.generators, ctx, true)?;
    Ok((ideal.q, res))
}

/// Smallest `e <= e_max` with `f^(p^e) in I^[p^e]`, with `e = 0` meaning
/// plain membership.
pub fn in_frobenius_closure(
    f: &NormalHomogPoly,
    gens: &[NormalHomogPoly],
    e_max: u32,
    ctx: &RingContext,
) -> Result<ClosureVerdict> {
    in_frobenius_closure_bounded(f, gens, e_max, u64::MAX, ctx)
}

/// As [`in_frobenius_closure`], but levels where `deg f^q` exceeds
/// `degree_budget` are not tested; the verdict then reports the last tested
/// level.
pub fn in_frobenius_closure_bounded(
    f: &NormalHomogPoly,
    gens: &[NormalHomogPoly],
    e_max: u32,
    degree_budget: u64,
    ctx: &RingContext,
) -> Result<ClosureVerdict> {
    if gens.is_empty() {
        return Err(Error::EmptyGenerators);
    }
    let mut tested = None;
    for e in 0..=e_max {
        let q = frobenius_q(e, ctx)?;
        if f.degree().saturating_mul(q) > degree_budget {
            break;
        }
        let (q, res) = frobenius_membership(f, gens, e, ctx)?;
        tested = Some(e);
        if res.is_in() {
            let kind = if e == 0 {
                VerdictKind::InIdeal
            } else {
                VerdictKind::InFrobeniusClosure { e }
            };
            let mut v = ClosureVerdict::new(kind);
            v.q = Some(q);
            v.route = Some(Route::Generic);
            v.certificate = Some(ClosureCertificate::from_membership(q, res));
            return Ok(v);
        }
    }
    Ok(match tested {
        Some(e) => {
            let mut v = ClosureVerdict::new(VerdictKind::OutAtAllTested { e_max: e });
            v.route = Some(Route::Generic);
            if e < e_max {
                v.notes.push(format!("levels above e = {e} exceed the degree budget"));
            }
            v
        }
        None => ClosureVerdict::undecided("degree budget too small for e = 0"),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBounds {
    /// Frobenius-closure levels tried before the instability route.
    pub e_max_frobenius: u32,
    /// Pull-back levels searched for an instability witness.
    pub e_max_instability: u32,
    /// Largest degree handed to the generic solver.
    pub degree_budget: u64,
    /// Use the binomial certificates where they apply.
    pub use_certificates: bool,
    /// Re-derive certificate verdicts with the generic solver when affordable.
    pub cross_check: bool,
}

impl Default for SearchBounds {
    fn default() -> Self {
        SearchBounds {
            e_max_frobenius: DEFAULT_E_MAX,
            e_max_instability: DEFAULT_E_MAX,
            degree_budget: DEFAULT_DEGREE_BUDGET,
            use_certificates: true,
            cross_check: true,
        }
    }
}

/// Smallest `u` with `p^u >= 2g + 1`.
pub fn genus_exponent(ctx: &RingContext) -> u32 {
    let bound = 2 * genus_plane_curve(ctx.d() as u64) + 1;
    let p = ctx.p().get() as u64;
    let mut u = 0;
    let mut pu = 1u64;
    while pu < bound {
        pu *= p;
        u += 1;
    }
    u
}

/// `(d, I, f) = (7, (x^4, y^4, z^4), x^3 y^3)`.
pub fn is_certified_family(f: &NormalHomogPoly, gens: &[NormalHomogPoly], ctx: &RingContext) -> bool {
    ctx.d() == 7 && gens == fourth_powers(ctx).as_slice() && *f == ctx.monomial(3, 3, 0)
}

fn check_tight_input(f: &NormalHomogPoly, gens: &[NormalHomogPoly], ctx: &RingContext) -> Result<()> {
    if gens.len() != 3 {
        return Err(Error::GeneratorCount(gens.len()));
    }
    let sum: u64 = gens.iter().map(|g| g.degree()).sum();
    match balanced_twist(gens[0].degree(), gens[1].degree(), gens[2].degree()) {
        Twist::Integral(m) if m == f.degree() => {}
        _ => {
            return Err(Error::UnbalancedDegrees {
                candidate: f.degree(),
                generator_sum: sum,
            })
        }
    }
    match colength(gens, ctx) {
        Ok(_) => Ok(()),
        Err(Error::NotCofinite(_)) | Err(Error::EmptyGenerators) => Err(Error::NotPrimary),
        Err(e) => Err(e),
    }
}

/// Generic membership of `x^3q y^3q` in `(x^4q, y^4q, z^4q)`; `None` when over budget.
fn generic_level_check(
    f: &NormalHomogPoly,
    gens: &[NormalHomogPoly],
    q: u64,
    bounds: &SearchBounds,
    ctx: &RingContext,
) -> Result<Option<bool>> {
    if f.degree().saturating_mul(q) > bounds.degree_budget {
        return Ok(None);
    }
    let fq = ctx.frobenius(f, q)?;
    let gq = gens
        .iter()
        .map(|g| ctx.frobenius(g, q))
        .collect::<Result<Vec<_>>>()?;
    Ok(Some(membership(&fq, &gq, ctx, true)?.is_in()))
}

fn certificate_route(
    f: &NormalHomogPoly,
    gens: &[NormalHomogPoly],
    ctx: &RingContext,
    bounds: &SearchBounds,
) -> Result<Option<ClosureVerdict>> {
    let p = ctx.p().get() as u64;
    let Some(cert) = certificate_for(p, ctx)? else {
        return Ok(None);
    };
    let mut v;
    let mut checks = vec![cert.level()];
    if cert.claims_membership() {
        v = ClosureVerdict::new(VerdictKind::TightIn);
        v.q = Some(p);
        v.notes.push(format!("f^{p} in I^[{p}] by explicit combination"));
    } else {
        let witness = lemma_syzygy_construction(ctx)?;
        let u = genus_exponent(ctx);
        let q = p
            .checked_pow(u + witness.e)
            .ok_or_else(|| Error::ExponentOverflow(format!("{p}^{}", u + witness.e)))?;
        // the level-p^2 statement lifts to q = p^j by flatness of Frobenius
        // on K[x,y] since 7 p^(j-2) (4k+2) <= 4q
        let Certificate::NonMembership(c) = &cert else {
            unreachable!("non-membership certificate expected")
        };
        let lift = 7 * (q / (p * p)) as u128 * (4 * c.k as u128 + 2);
        if q < p * p || lift > 4 * q as u128 {
            return Err(Error::Consistency(format!("cannot lift level p^2 to q = {q}")));
        }
        v = ClosureVerdict::new(VerdictKind::TightOut);
        v.q = Some(q);
        v.notes.push(format!("u = {u}, e = {}, lift 7*{}*(4k+2) = {lift} <= {}", witness.e, q / (p * p), 4 * q));
        v.witness = Some(witness);
        if q != cert.level() {
            checks.push(q);
        }
    }
    if bounds.cross_check {
        for level in checks {
            match generic_level_check(f, gens, level, bounds, ctx)? {
                Some(found) if found != cert.claims_membership() => {
                    return Err(Error::Consistency(format!(
                        "certificate for p = {p} claims membership = {} at q = {level}, generic solver disagrees",
                        cert.claims_membership()
                    )));
                }
                Some(_) => v.notes.push(format!("generic q={level} agrees")),
                None => v.notes.push(format!("generic q={level} skipped (budget)")),
            }
        }
    }
    v.route = Some(Route::Certificate);
    v.certificate = Some(ClosureCertificate::Binomial(cert));
    Ok(Some(v))
}

fn generic_route(
    f: &NormalHomogPoly,
    gens: &[NormalHomogPoly],
    ctx: &RingContext,
    bounds: &SearchBounds,
) -> Result<ClosureVerdict> {
    let fc = in_frobenius_closure_bounded(f, gens, bounds.e_max_frobenius, bounds.degree_budget, ctx)?;
    if matches!(
        fc.kind,
        VerdictKind::InIdeal | VerdictKind::InFrobeniusClosure { .. }
    ) {
        let mut v = fc;
        v.notes.push(format!("Frobenius closure: {}", v.label()));
        v.kind = VerdictKind::TightIn;
        return Ok(v);
    }
    let u = genus_exponent(ctx);
    let p = ctx.p().get() as u64;
    let needed = |e: u32| {
        p.checked_pow(u + e)
            .map(|q| (q, f.degree().saturating_mul(q)))
            .unwrap_or((u64::MAX, u64::MAX))
    };
    // levels whose final membership check fits the budget
    let mut e_cap = 0;
    while e_cap < bounds.e_max_instability && needed(e_cap + 1).1 <= bounds.degree_budget {
        e_cap += 1;
    }
    let witness = match detect_instability(gens, e_cap, bounds.degree_budget, ctx)? {
        Some(w) => w,
        None if e_cap < bounds.e_max_instability => {
            let (q, deg) = needed(e_cap + 1);
            return Err(Error::ExponentOverflow(format!(
                "deciding at e = {} needs degree {deg} at q = {q}, above the budget {}; a certificate route is required",
                e_cap + 1,
                bounds.degree_budget
            )));
        }
        None => return Ok(ClosureVerdict::undecided("no instability witness")),
    };
    let q = needed(witness.e).0;
    let ideal = frobenius_power(gens, 0, ctx)?;
    let fq = ctx.frobenius(f, q)?;
    let gq = ideal
        .base
        .iter()
        .map(|g| ctx.frobenius(g, q))
        .collect::<Result<Vec<_>>>()?;
    let res = membership(&fq, &gq, ctx, true)?;
    let mut v = ClosureVerdict::new(if res.is_in() {
        VerdictKind::TightIn
    } else {
        VerdictKind::TightOut
    });
    v.q = Some(q);
    v.route = Some(Route::Generic);
    v.notes.push(format!("u = {u}, e = {}", witness.e));
    v.certificate = Some(ClosureCertificate::from_membership(q, res));
    v.witness = Some(witness);
    Ok(v)
}

/// Decide `f in (f_1, f_2, f_3)*`.
pub fn decide_tight_closure(
    f: &NormalHomogPoly,
    gens: &[NormalHomogPoly],
    ctx: &RingContext,
    bounds: &SearchBounds,
) -> Result<ClosureVerdict> {
    check_tight_input(f, gens, ctx)?;
    if bounds.use_certificates && is_certified_family(f, gens, ctx) {
        if let Some(v) = certificate_route(f, gens, ctx, bounds)? {
            return Ok(v);
        }
    }
    generic_route(f, gens, ctx, bounds)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(d: u32, p: u64) -> RingContext {
        RingContext::with(d, p).unwrap()
    }

    #[test]
    fn frobenius_power_examples() {
        let r = ctx(7, 3);
        let gens = fourth_powers(&r);
        assert_eq!(frobenius_power(&gens, 0, &r).unwrap().generators, gens);
        let i1 = frobenius_power(&gens, 1, &r).unwrap();
        assert_eq!(i1.q, 3);
        assert_eq!(i1.generators[0], r.monomial(12, 0, 0));
        assert_eq!(i1.generators[2], r.monomial(0, 0, 12));
        let r2 = ctx(7, 2);
        let i6 = frobenius_power(&fourth_powers(&r2), 6, &r2).unwrap();
        assert_eq!(i6.generators[1], r2.monomial(0, 256, 0));
        assert!(matches!(frobenius_power(&gens, 60, &r), Err(Error::ExponentOverflow(_))));
    }

    #[test]
    fn closure_examples() {
        let r = ctx(7, 3);
        let gens = fourth_powers(&r);
        let v = in_frobenius_closure(&r.monomial(3, 3, 0), &gens, 2, &r).unwrap();
        assert_eq!(v.kind, VerdictKind::InFrobeniusClosure { e: 1 });
        let v = in_frobenius_closure(&r.monomial(4, 0, 0), &gens, 2, &r).unwrap();
        assert_eq!(v.kind, VerdictKind::InIdeal);
        let c = ctx(3, 2);
        let v = in_frobenius_closure(
            &c.monomial(0, 0, 2),
            &[c.monomial(1, 0, 0), c.monomial(0, 1, 0)],
            2,
            &c,
        )
        .unwrap();
        assert_eq!(v.kind, VerdictKind::InFrobeniusClosure { e: 1 });
    }

    #[test]
    fn combination_survives_frobenius() {
        let r = ctx(7, 3);
        let gens = fourth_powers(&r);
        let f = r.monomial(3, 3, 0);
        let (q, res) = frobenius_membership(&f, &gens, 1, &r).unwrap();
        let MembershipResult::In { coefficients } = res else {
            panic!("expected membership")
        };
        let lifted = MembershipResult::In {
            coefficients: frobenius_combination(&coefficients, &r).unwrap(),
        };
        let f2 = r.frobenius(&f, q * 3).unwrap();
        let g2 = frobenius_power(&gens, 2, &r).unwrap().generators;
        assert!(lifted.verify(&f2, &g2, &r));
    }

    #[test]
    fn genus_exponents() {
        assert_eq!(genus_exponent(&ctx(7, 2)), 5);
        assert_eq!(genus_exponent(&ctx(7, 23)), 2);
        assert_eq!(genus_exponent(&ctx(7, 37)), 1);
        assert_eq!(genus_exponent(&ctx(7, 31)), 1);
        assert_eq!(genus_exponent(&ctx(3, 5)), 1);
    }

    #[test]
    fn tight_input_errors() {
        let r = ctx(7, 3);
        let gens = fourth_powers(&r);
        let b = SearchBounds::default();
        assert!(matches!(
            decide_tight_closure(&r.monomial(3, 2, 0), &gens, &r, &b),
            Err(Error::UnbalancedDegrees { candidate: 5, generator_sum: 12 })
        ));
        assert!(matches!(
            decide_tight_closure(&r.monomial(3, 3, 0), &gens[..2], &r, &b),
            Err(Error::GeneratorCount(2))
        ));
        let not_primary = vec![r.monomial(4, 0, 0), r.monomial(2, 2, 0), r.monomial(3, 1, 0)];
        assert!(matches!(
            decide_tight_closure(&r.monomial(3, 3, 0), &not_primary, &r, &b),
            Err(Error::NotPrimary)
        ));
    }

    #[test]
    fn both_routes_p3() {
        let r = ctx(7, 3);
        let f = r.monomial(3, 3, 0);
        let gens = fourth_powers(&r);
        let cert = decide_tight_closure(&f, &gens, &r, &SearchBounds::default()).unwrap();
        assert_eq!(cert.kind, VerdictKind::TightIn);
        assert_eq!(cert.route, Some(Route::Certificate));
        let generic = SearchBounds {
            use_certificates: false,
            ..SearchBounds::default()
        };
        let v = decide_tight_closure(&f, &gens, &r, &generic).unwrap();
        assert_eq!(v.kind, VerdictKind::TightIn);
        assert_eq!(v.route, Some(Route::Generic));
    }
}
