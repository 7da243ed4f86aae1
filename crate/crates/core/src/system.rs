//! Membership and syzygies as graded linear algebra.
//!
//! For generators `g_1..g_n` and a target degree `m`, the multiplication map
//! `(h_i) -> sum h_i g_i` from `+ R_{m - deg g_i}` to `R_m` is assembled as a
//! sparse matrix whose columns are normal forms of `(basis monomial) * g_i`.
//! Membership asks whether `f` is in its image; syzygies are its kernel.
//!
//! Two reductions keep the systems small:
//! * strand compression: when every generator lies in a single strand, the
//!   map is block diagonal over strands and each block is solved separately;
//! * monomial pruning: a generator `c x^a y^b` contributes unit columns, so
//!   the rows it covers are removed up front and reinstated afterwards.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, Solution, SparseColumns};
use crate::ring::{MonomialProduct, NormalHomogPoly, NormalMonomial, RingContext, StrandKey};

/// Matrix of the multiplication map in one degree (optionally one strand).
#[derive(Clone, Debug)]
pub struct GradedLinearSystem {
    pub target_degree: u64,
    /// `m - deg g_i`, or `None` when the generator is zero or too large.
    pub source_degrees: Vec<Option<u64>>,
    pub strand: Option<StrandKey>,
    pub rows: Vec<NormalMonomial>,
    row_index: RowIndex,
    /// `(generator index, multiplier)` per column.
    pub columns: Vec<(usize, NormalMonomial)>,
    pub matrix: SparseColumns,
}

impl GradedLinearSystem {
    pub fn build(
        gens: &[NormalHomogPoly],
        m: u64,
        ctx: &RingContext,
        strand: Option<StrandKey>,
    ) -> Result<Self> {
        let rows = match strand {
            Some(key) => ctx.strand_basis(m, key),
            None => ctx.basis(m).to_vec(),
        };
        let row_index = RowIndex::new(&rows, m, ctx.d());
        let mut source_degrees = Vec::with_capacity(gens.len());
        let mut columns = Vec::new();
        let mut matrix = SparseColumns::new(rows.len());
        for (gi, g) in gens.iter().enumerate() {
            if g.is_zero() || g.degree() > m {
                source_degrees.push(None);
                continue;
            }
            let src = m - g.degree();
            source_degrees.push(Some(src));
            let multipliers = match strand {
                Some(key) => {
                    let gkey = g.strand(ctx).ok_or_else(|| {
                        Error::Consistency(format!("generator {gi} spans several strands"))
                    })?;
                    ctx.strand_basis(src, ctx.strand_sub(key, gkey))
                }
                None => ctx.basis(src).to_vec(),
            };
            let p = ctx.p();
            for u in multipliers {
                let mut col: Vec<(usize, u32)> = Vec::with_capacity(2 * g.len());
                let mut push = |mono: NormalMonomial, c: u32| -> Result<()> {
                    let i = row_index
                        .get(&mono)
                        .ok_or_else(|| Error::Consistency(format!("{mono} outside the system rows")))?;
                    col.push((i, c));
                    Ok(())
                };
                for (t, &c) in g.terms() {
                    match ctx.mul_monomials(t, &u) {
                        MonomialProduct::One(a) => push(a, c)?,
                        MonomialProduct::Two(a, b) => {
                            push(a, c)?;
                            push(b, c)?;
                        }
                    }
                }
                col.sort_unstable_by_key(|&(i, _)| i);
                let mut merged: Vec<(usize, u32)> = Vec::with_capacity(col.len());
                for (i, c) in col {
                    match merged.last_mut() {
                        Some((j, v)) if *j == i => *v = p.add(*v, c),
                        _ => merged.push((i, c)),
                    }
                }
                merged.retain(|&(_, v)| v != 0);
                matrix.cols.push(merged);
                columns.push((gi, u));
            }
        }
        Ok(GradedLinearSystem {
            target_degree: m,
            source_degrees,
            strand,
            rows,
            row_index,
            columns,
            matrix,
        })
    }

    pub fn row_of(&self, m: &NormalMonomial) -> Option<usize> {
        self.row_index.get(m)
    }

    fn vector_of(&self, f: &NormalHomogPoly) -> Result<Vec<(usize, u32)>> {
        f.terms()
            .iter()
            .map(|(m, &c)| {
                self.row_of(m)
                    .map(|i| (i, c))
                    .ok_or_else(|| Error::Consistency(format!("{m} outside the system rows")))
            })
            .collect()
    }

    /// Solve `A x = b` with monomial pruning.
    fn solve(&self, gens: &[NormalHomogPoly], b: &[(usize, u32)], ctx: &RingContext) -> Solution {
        let pruned = Pruned::new(self, gens, ctx);
        let p = ctx.p();
        let b_kept: Vec<(usize, u32)> = b
            .iter()
            .filter_map(|&(i, v)| pruned.row_map[i].map(|k| (k, v)))
            .collect();
        match linalg::solve(&pruned.matrix, &b_kept, p) {
            Solution::In(x) => {
                let mut coef = vec![0u32; self.columns.len()];
                let mut residual = vec![0u32; self.rows.len()];
                for &(i, v) in b {
                    residual[i] = v;
                }
                for (k, &j) in pruned.kept_cols.iter().enumerate() {
                    coef[j] = x[k];
                    if x[k] != 0 {
                        for &(i, v) in &self.matrix.cols[j] {
                            residual[i] = p.sub(residual[i], p.mul(v, x[k]));
                        }
                    }
                }
                for (i, &w) in residual.iter().enumerate() {
                    if w == 0 {
                        continue;
                    }
                    let (j, c) = pruned.covered[i].expect("uncovered residual vanishes");
                    coef[j] = p.add(coef[j], p.mul(w, p.inv(c).expect("unit")));
                }
                Solution::In(coef)
            }
            Solution::Out(y) => {
                let mut full = vec![0u32; self.rows.len()];
                for (i, k) in pruned.row_map.iter().enumerate() {
                    if let Some(k) = k {
                        full[i] = y[*k];
                    }
                }
                Solution::Out(full)
            }
        }
    }

    /// Dimension of the kernel.
    fn nullity(&self, gens: &[NormalHomogPoly], ctx: &RingContext) -> usize {
        let pruned = Pruned::new(self, gens, ctx);
        let monomial_cols = self.columns.len() - pruned.kept_cols.len();
        let covered = pruned.covered.iter().filter(|c| c.is_some()).count();
        (monomial_cols - covered) + pruned.kept_cols.len() - linalg::rank(&pruned.matrix, ctx.p())
    }

    /// Rank of the multiplication map.
    pub fn rank(&self, gens: &[NormalHomogPoly], ctx: &RingContext) -> usize {
        let pruned = Pruned::new(self, gens, ctx);
        let covered = pruned.covered.iter().filter(|c| c.is_some()).count();
        covered + linalg::rank(&pruned.matrix, ctx.p())
    }

    /// Kernel basis as coefficient vectors over the columns.
    fn kernel(&self, gens: &[NormalHomogPoly], ctx: &RingContext, limit: usize) -> Vec<Vec<u32>> {
        let p = ctx.p();
        let pruned = Pruned::new(self, gens, ctx);
        let mut out = Vec::new();
        // duplicated monomial columns
        for (j, (gi, _)) in self.columns.iter().enumerate() {
            if out.len() >= limit {
                return out;
            }
            if !pruned.is_monomial_gen[*gi] {
                continue;
            }
            let (i, cj) = self.matrix.cols[j][0];
            let (des, cd) = pruned.covered[i].expect("monomial column rows are covered");
            if des == j {
                continue;
            }
            let mut v = vec![0u32; self.columns.len()];
            v[j] = cd;
            v[des] = p.neg(cj);
            out.push(v);
        }
        for ker in linalg::kernel_basis(&pruned.matrix, p) {
            if out.len() >= limit {
                break;
            }
            let mut v = vec![0u32; self.columns.len()];
            let mut image = vec![0u32; self.rows.len()];
            for (k, &j) in pruned.kept_cols.iter().enumerate() {
                v[j] = ker[k];
                if ker[k] != 0 {
                    for &(i, e) in &self.matrix.cols[j] {
                        image[i] = p.add(image[i], p.mul(e, ker[k]));
                    }
                }
            }
            for (i, &w) in image.iter().enumerate() {
                if w != 0 {
                    let (des, c) = pruned.covered[i].expect("kernel image lies on covered rows");
                    v[des] = p.sub(v[des], p.mul(w, p.inv(c).expect("unit")));
                }
            }
            out.push(v);
        }
        out
    }

    /// Turn a coefficient vector over the columns into polynomials `h_i`.
    fn combination(&self, coef: &[u32], ctx: &RingContext) -> Vec<NormalHomogPoly> {
        let mut terms: Vec<Vec<(NormalMonomial, u32)>> = vec![Vec::new(); self.source_degrees.len()];
        for (&(gi, u), &c) in self.columns.iter().zip(coef) {
            if c != 0 {
                terms[gi].push((u, c));
            }
        }
        self.source_degrees
            .iter()
            .zip(terms)
            .map(|(deg, t)| {
                NormalHomogPoly::from_terms(ctx, deg.unwrap_or(0), t).expect("multipliers are normal")
            })
            .collect()
    }
}

/// Position of each row monomial, addressed by `(z, x)`.
#[derive(Clone, Debug)]
struct RowIndex {
    by_z: Vec<Vec<u32>>,
    degree: u64,
}

impl RowIndex {
    const ABSENT: u32 = u32::MAX;

    fn new(rows: &[NormalMonomial], degree: u64, d: u32) -> Self {
        let mut by_z = vec![Vec::new(); d as usize];
        for (i, r) in rows.iter().enumerate() {
            let slot = &mut by_z[r.z as usize];
            if slot.is_empty() {
                *slot = vec![Self::ABSENT; degree as usize + 1];
            }
            slot[r.x as usize] = i as u32;
        }
        RowIndex { by_z, degree }
    }

    fn get(&self, m: &NormalMonomial) -> Option<usize> {
        if m.degree() != self.degree {
            return None;
        }
        let i = *self.by_z.get(m.z as usize)?.get(m.x as usize)?;
        (i != Self::ABSENT).then_some(i as usize)
    }
}

/// The system with rows covered by monomial generators removed.
struct Pruned {
    is_monomial_gen: Vec<bool>,
    /// designated `(column, coefficient)` for each covered row
    covered: Vec<Option<(usize, u32)>>,
    /// new index of each uncovered row
    row_map: Vec<Option<usize>>,
    kept_cols: Vec<usize>,
    matrix: SparseColumns,
}

impl Pruned {
    fn new(sys: &GradedLinearSystem, gens: &[NormalHomogPoly], _ctx: &RingContext) -> Self {
        let is_monomial_gen: Vec<bool> = gens
            .iter()
            .map(|g| g.as_monomial().is_some_and(|(m, _)| m.z == 0))
            .collect();
        let nrows = sys.rows.len();
        let mut covered: Vec<Option<(usize, u32)>> = vec![None; nrows];
        let mut kept_cols = Vec::new();
        for (j, (gi, _)) in sys.columns.iter().enumerate() {
            if is_monomial_gen[*gi] {
                let (i, c) = sys.matrix.cols[j][0];
                covered[i].get_or_insert((j, c));
            } else {
                kept_cols.push(j);
            }
        }
        let mut row_map = vec![None; nrows];
        let mut next = 0;
        for (i, c) in covered.iter().enumerate() {
            if c.is_none() {
                row_map[i] = Some(next);
                next += 1;
            }
        }
        let mut matrix = SparseColumns::new(next);
        for &j in &kept_cols {
            matrix.cols.push(
                sys.matrix.cols[j]
                    .iter()
                    .filter_map(|&(i, v)| row_map[i].map(|k| (k, v)))
                    .collect(),
            );
        }
        Pruned {
            is_monomial_gen,
            covered,
            row_map,
            kept_cols,
            matrix,
        }
    }
}

/// A linear form on `R_m`, given by its values on normal monomials.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeparatingFunctional {
    pub degree: u64,
    #[serde(serialize_with = "weights_as_list")]
    pub weights: BTreeMap<NormalMonomial, u32>,
}

fn weights_as_list<S: serde::Serializer>(
    w: &BTreeMap<NormalMonomial, u32>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(w.iter().map(|(m, &c)| [m.x, m.y, m.z as u64, c as u64]))
}

impl SeparatingFunctional {
    pub fn eval(&self, f: &NormalHomogPoly, ctx: &RingContext) -> u32 {
        let p = ctx.p();
        f.terms().iter().fold(0, |acc, (m, &c)| {
            p.add(acc, p.mul(c, self.weights.get(m).copied().unwrap_or(0)))
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "lowercase")]
pub enum MembershipResult {
    /// `f = sum h_i g_i`.
    In { coefficients: Vec<NormalHomogPoly> },
    /// A functional vanishing on every `(monomial) * g_i` in degree `deg f`
    /// but not on `f`.
    Out { functional: SeparatingFunctional },
}

impl MembershipResult {
    pub fn is_in(&self) -> bool {
        matches!(self, MembershipResult::In { .. })
    }

    /// Re-check the certificate from scratch against the full graded piece.
    pub fn verify(&self, f: &NormalHomogPoly, gens: &[NormalHomogPoly], ctx: &RingContext) -> bool {
        let m = f.degree();
        match self {
            MembershipResult::In { coefficients } => {
                if coefficients.len() != gens.len() {
                    return false;
                }
                let mut sum = NormalHomogPoly::zero(m);
                for (h, g) in coefficients.iter().zip(gens) {
                    if h.is_zero() {
                        continue;
                    }
                    if h.degree() + g.degree() != m {
                        return false;
                    }
                    sum = ctx.add(&sum, &ctx.multiply(h, g));
                }
                sum.terms() == f.terms()
            }
            MembershipResult::Out { functional } => {
                if functional.eval(f, ctx) == 0 {
                    return false;
                }
                gens.iter()
                    .filter(|g| !g.is_zero() && g.degree() <= m)
                    .all(|g| {
                        ctx.basis(m - g.degree())
                            .iter()
                            .all(|u| functional.eval(&ctx.shift(g, u), ctx) == 0)
                    })
            }
        }
    }
}

fn strands_usable(gens: &[NormalHomogPoly], ctx: &RingContext) -> bool {
    gens.iter().all(|g| g.is_zero() || g.strand(ctx).is_some())
}

/// Decide `f in (gens)` and return a checkable certificate either way.
///
/// With `strand_compression`, and when every generator lies in one strand,
/// each strand component of `f` is solved on its own strand.
pub fn membership(
    f: &NormalHomogPoly,
    gens: &[NormalHomogPoly],
    ctx: &RingContext,
    strand_compression: bool,
) -> Result<MembershipResult> {
    if gens.is_empty() {
        return Err(Error::EmptyGenerators);
    }
    let m = f.degree();
    let zero_combination = || {
        gens.iter()
            .map(|g| NormalHomogPoly::zero(m.saturating_sub(g.degree())))
            .collect::<Vec<_>>()
    };
    if f.is_zero() {
        return Ok(MembershipResult::In {
            coefficients: zero_combination(),
        });
    }
    let parts: Vec<(Option<StrandKey>, NormalHomogPoly)> =
        if strand_compression && strands_usable(gens, ctx) {
            f.strand_components(ctx)
                .into_iter()
                .map(|(k, c)| (Some(k), c))
                .collect()
        } else {
            vec![(None, f.clone())]
        };
    let mut coefficients = zero_combination();
    for (key, part) in parts {
        let sys = GradedLinearSystem::build(gens, m, ctx, key)?;
        let b = sys.vector_of(&part)?;
        match sys.solve(gens, &b, ctx) {
            Solution::In(x) => {
                for (acc, h) in coefficients.iter_mut().zip(sys.combination(&x, ctx)) {
                    if !h.is_zero() {
                        *acc = ctx.add(acc, &h);
                    }
                }
            }
            Solution::Out(y) => {
                let weights = sys
                    .rows
                    .iter()
                    .zip(y)
                    .filter(|&(_, w)| w != 0)
                    .map(|(r, w)| (*r, w))
                    .collect();
                let result = MembershipResult::Out {
                    functional: SeparatingFunctional { degree: m, weights },
                };
                debug_assert!(result.verify(f, gens, ctx), "separating functional failed");
                return Ok(result);
            }
        }
    }
    let result = MembershipResult::In { coefficients };
    debug_assert!(result.verify(f, gens, ctx), "membership combination failed");
    Ok(result)
}

fn systems_for(
    gens: &[NormalHomogPoly],
    m: u64,
    ctx: &RingContext,
) -> Result<Vec<GradedLinearSystem>> {
    if gens.is_empty() {
        return Err(Error::EmptyGenerators);
    }
    if strands_usable(gens, ctx) {
        ctx.strands_in_degree(m)
            .into_iter()
            .map(|k| GradedLinearSystem::build(gens, m, ctx, Some(k)))
            .collect()
    } else {
        Ok(vec![GradedLinearSystem::build(gens, m, ctx, None)?])
    }
}

/// Check `sum h_i g_i = 0` in `R`.
pub fn is_syzygy(h: &[NormalHomogPoly], gens: &[NormalHomogPoly], ctx: &RingContext) -> bool {
    h.len() == gens.len()
        && h.iter().any(|x| !x.is_zero())
        && h.iter()
            .zip(gens)
            .map(|(a, g)| ctx.multiply(a, g))
            .fold(None::<NormalHomogPoly>, |acc, t| {
                Some(match acc {
                    None => t,
                    Some(s) => ctx.add(&s, &t),
                })
            })
            .is_some_and(|s| s.is_zero())
}

/// Basis of the syzygies of `gens` in total degree `m`, each re-verified.
pub fn syzygy_space(
    gens: &[NormalHomogPoly],
    m: u64,
    ctx: &RingContext,
) -> Result<Vec<Vec<NormalHomogPoly>>> {
    syzygies_limited(gens, m, ctx, usize::MAX)
}

fn syzygies_limited(
    gens: &[NormalHomogPoly],
    m: u64,
    ctx: &RingContext,
    limit: usize,
) -> Result<Vec<Vec<NormalHomogPoly>>> {
    let mut out = Vec::new();
    for sys in systems_for(gens, m, ctx)? {
        if out.len() >= limit {
            break;
        }
        for v in sys.kernel(gens, ctx, limit - out.len()) {
            let h = sys.combination(&v, ctx);
            if !is_syzygy(&h, gens, ctx) {
                return Err(Error::Consistency(format!(
                    "kernel vector in degree {m} is not a syzygy"
                )));
            }
            out.push(h);
        }
    }
    Ok(out)
}

/// One syzygy in degree `m`, if any exist.
pub fn first_syzygy(
    gens: &[NormalHomogPoly],
    m: u64,
    ctx: &RingContext,
) -> Result<Option<Vec<NormalHomogPoly>>> {
    Ok(syzygies_limited(gens, m, ctx, 1)?.into_iter().next())
}

/// Dimension of the syzygy space in degree `m`.
pub fn syzygy_dimension(gens: &[NormalHomogPoly], m: u64, ctx: &RingContext) -> Result<usize> {
    Ok(systems_for(gens, m, ctx)?
        .iter()
        .map(|s| s.nullity(gens, ctx))
        .sum())
}

/// Whether any syzygy exists in degree `m`; stops at the first strand that has one.
pub fn has_syzygy(gens: &[NormalHomogPoly], m: u64, ctx: &RingContext) -> Result<bool> {
    if gens.is_empty() {
        return Err(Error::EmptyGenerators);
    }
    if !strands_usable(gens, ctx) {
        return Ok(syzygy_dimension(gens, m, ctx)? > 0);
    }
    for k in ctx.strands_in_degree(m) {
        if GradedLinearSystem::build(gens, m, ctx, Some(k))?.nullity(gens, ctx) > 0 {
            return Ok(true);
        }
    }
    Ok(false)
}

/// `dim (gens)_m`, the degree-`m` piece of the ideal.
pub fn ideal_dimension(gens: &[NormalHomogPoly], m: u64, ctx: &RingContext) -> Result<u64> {
    Ok(systems_for(gens, m, ctx)?
        .iter()
        .map(|s| s.rank(gens, ctx) as u64)
        .sum())
}
