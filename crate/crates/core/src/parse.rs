//! Text syntax for ring elements.
//!
//! Terms are joined by `+` or `-`; a term is an optional integer coefficient
//! followed by powers of `x`, `y`, `z`. Exponents may be written with or
//! without `^`, and factors may be separated by `*`:
//! `x4`, `x^3*y^3`, `x7+y7`, `2xyz - z3`.

use crate::error::{Error, Result};
use crate::ring::{NormalHomogPoly, RawPoly, RingContext};

fn digits(s: &[u8], i: &mut usize) -> Option<u64> {
    let start = *i;
    while *i < s.len() && s[*i].is_ascii_digit() {
        *i += 1;
    }
    if *i == start {
        return None;
    }
    std::str::from_utf8(&s[start..*i]).ok()?.parse().ok()
}

/// Parse into `(x, y, z, coefficient, negated)` terms.
fn terms(text: &str) -> Result<Vec<(u64, u64, u64, u64, bool)>> {
    let s: Vec<u8> = text.bytes().filter(|b| !b.is_ascii_whitespace()).collect();
    if s.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    let err = |msg: &str, at: usize| Error::Parse(format!("{msg} at position {at} in `{text}`"));
    let mut out = Vec::new();
    let mut i = 0;
    loop {
        let mut negated = false;
        if i < s.len() && (s[i] == b'+' || s[i] == b'-') {
            negated = s[i] == b'-';
            i += 1;
        } else if !out.is_empty() {
            return Err(err("expected `+` or `-`", i));
        }
        let coefficient = digits(&s, &mut i);
        let mut exps = [0u64; 3];
        let mut factors = 0;
        loop {
            if i < s.len() && s[i] == b'*' && (coefficient.is_some() || factors > 0) {
                i += 1;
            }
            let Some(v) = s.get(i).and_then(|c| b"xyz".iter().position(|x| x == c)) else {
                break;
            };
            i += 1;
            if i < s.len() && s[i] == b'^' {
                i += 1;
            }
            let e = match digits(&s, &mut i) {
                Some(e) => e,
                None if i > 0 && s[i - 1] == b'^' => return Err(err("missing exponent", i)),
                None => 1,
            };
            exps[v] = exps[v]
                .checked_add(e)
                .ok_or_else(|| Error::ExponentOverflow(text.to_string()))?;
            factors += 1;
        }
        if coefficient.is_none() && factors == 0 {
            return Err(err("expected a term", i));
        }
        out.push((exps[0], exps[1], exps[2], coefficient.unwrap_or(1), negated));
        if i == s.len() {
            return Ok(out);
        }
    }
}

/// Parse a homogeneous polynomial and bring it to normal form.
pub fn parse_poly(text: &str, ctx: &RingContext) -> Result<NormalHomogPoly> {
    let p = ctx.p();
    let mut raw = RawPoly::default();
    for (a, b, c, coeff, negated) in terms(text)? {
        let v = p.reduce(coeff);
        let v = if negated { p.neg(v) } else { v };
        raw.add_term(a, b, c, v as u64);
    }
    ctx.normal_form(&raw)
}

/// Parse a comma-separated generator list.
pub fn parse_gens(text: &str, ctx: &RingContext) -> Result<Vec<NormalHomogPoly>> {
    text.split(',')
        .map(|g| parse_poly(g, ctx))
        .collect::<Result<Vec<_>>>()
        .and_then(|v| {
            if v.is_empty() {
                Err(Error::EmptyGenerators)
            } else {
                Ok(v)
            }
        })
}

/// Check the syntax without a ring.
pub fn check_syntax(text: &str) -> Result<()> {
    terms(text).map(|_| ())
}
