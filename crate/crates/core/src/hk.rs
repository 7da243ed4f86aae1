//! Colengths of homogeneous ideals and Hilbert-Kunz sequences.

use std::io::Write;

use serde::Serialize;

use crate::closure::frobenius_power;
use crate::error::{Error, Result};
use crate::ring::{NormalHomogPoly, RingContext};
use crate::system::{ideal_dimension, membership};

/// Extra degrees past the saturation point that are re-checked in debug builds.
const SATURATION_SLACK: u64 = 3;

/// `dim R/J` for a homogeneous ideal `J` of finite colength.
///
/// Sums `dim R_n - dim J_n` until the first degree at or above the largest
/// generator degree where `J_n = R_n`.
pub fn colength(gens: &[NormalHomogPoly], ctx: &RingContext) -> Result<u64> {
    let gens: Vec<NormalHomogPoly> = gens.iter().filter(|g| !g.is_zero()).cloned().collect();
    if gens.is_empty() {
        return Err(Error::EmptyGenerators);
    }
    let min_deg = gens.iter().map(|g| g.degree()).min().unwrap_or(0);
    let max_deg = gens.iter().map(|g| g.degree()).max().unwrap_or(0);
    let bound = 3 * max_deg + ctx.d() as u64;
    let mut total = 0u64;
    for n in 0..=bound {
        let dim = ctx.dim_graded_piece(n);
        if n < min_deg {
            total += dim;
            continue;
        }
        let covered = ideal_dimension(&gens, n, ctx)?;
        if covered == dim && n >= max_deg {
            if cfg!(debug_assertions) {
                for extra in n + 1..=n + SATURATION_SLACK {
                    let d = ctx.dim_graded_piece(extra);
                    if ideal_dimension(&gens, extra, ctx)? != d {
                        return Err(Error::Consistency(format!(
                            "ideal saturated in degree {n} but not in degree {extra}"
                        )));
                    }
                }
            }
            return Ok(total);
        }
        total += dim - covered;
    }
    Err(Error::NotCofinite(bound))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HKRow {
    pub p: u32,
    pub e: u32,
    pub q: u64,
    pub colength: u64,
}

impl HKRow {
    /// `colength / q^2`.
    pub fn normalized(&self) -> f64 {
        self.colength as f64 / (self.q as f64 * self.q as f64)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HKSequence {
    pub p: u32,
    pub rows: Vec<HKRow>,
}

impl HKSequence {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["p", "e", "q", "colength", "normalized"])?;
        for r in &self.rows {
            w.write_record([
                r.p.to_string(),
                r.e.to_string(),
                r.q.to_string(),
                r.colength.to_string(),
                format!("{:.6}", r.normalized()),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Colengths of `I^[p^e]` for each `e` in the range.
pub fn hk_sequence(
    gens: &[NormalHomogPoly],
    e_range: std::ops::RangeInclusive<u32>,
    ctx: &RingContext,
) -> Result<HKSequence> {
    let mut rows = Vec::new();
    for e in e_range {
        let ideal = frobenius_power(gens, e, ctx)?;
        rows.push(HKRow {
            p: ctx.p().get(),
            e,
            q: ideal.q,
            colength: colength(&ideal.generators, ctx)?,
        });
    }
    Ok(HKSequence {
        p: ctx.p().get(),
        rows,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HKComparison {
    pub e: u32,
    pub q: u64,
    pub colength_ideal: u64,
    pub colength_extended: u64,
    /// `f^q` lies in `I^[q]`.
    pub member: bool,
}

impl HKComparison {
    pub fn equal(&self) -> bool {
        self.colength_ideal == self.colength_extended
    }
}

/// Compare `l(R/I^[q])` with `l(R/(I + (f))^[q])` level by level.
///
/// Equality at a level is equivalent to `f^q in I^[q]`; the two are computed
/// independently and any disagreement is reported as a consistency failure.
pub fn hk_compare(
    gens: &[NormalHomogPoly],
    f: &NormalHomogPoly,
    e_range: std::ops::RangeInclusive<u32>,
    ctx: &RingContext,
) -> Result<Vec<HKComparison>> {
    let mut extended = gens.to_vec();
    extended.push(f.clone());
    let mut out = Vec::new();
    for e in e_range {
        let ideal = frobenius_power(gens, e, ctx)?;
        let ext = frobenius_power(&extended, e, ctx)?;
        let fq = ctx.frobenius(f, ideal.q)?;
        let member = membership(&fq, &ideal.generators, ctx, true)?.is_in();
        let row = HKComparison {
            e,
            q: ideal.q,
            colength_ideal: colength(&ideal.generators, ctx)?,
            colength_extended: colength(&ext.generators, ctx)?,
            member,
        };
        if row.equal() != member {
            return Err(Error::Consistency(format!(
                "colength comparison at q = {} disagrees with membership ({} vs {}, member = {member})",
                row.q, row.colength_ideal, row.colength_extended
            )));
        }
        out.push(row);
    }
    Ok(out)
}
