//! Batch experiments over ranges of primes.

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::certificate::{certificate_for, Certificate};
use crate::closure::{
    decide_tight_closure, in_frobenius_closure_bounded, is_certified_family, ClosureVerdict, Route,
    SearchBounds, VerdictKind, DEFAULT_DEGREE_BUDGET, DEFAULT_E_MAX,
};
use crate::error::{Error, Result};
use crate::gfp::{is_prime, primes_in};
use crate::hk::hk_compare;
use crate::parse::{check_syntax, parse_poly};
use crate::ring::{NormalHomogPoly, RingContext};
use crate::semistability::{detect_instability, fourth_powers, lemma_syzygy_construction, InstabilityWitness};
use crate::system::membership;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TestKind {
    Certificate,
    Frobenius,
    Hk,
    Instability,
    Membership,
    Tight,
}

impl TestKind {
    pub fn name(self) -> &'static str {
        match self {
            TestKind::Certificate => "certificate",
            TestKind::Frobenius => "frobenius",
            TestKind::Hk => "hk",
            TestKind::Instability => "instability",
            TestKind::Membership => "membership",
            TestKind::Tight => "tight",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.trim().to_lowercase()))
            .map_err(|_| Error::config("tests", format!("unknown test `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

fn default_e_max() -> u32 {
    DEFAULT_E_MAX
}

fn default_budget() -> u64 {
    DEFAULT_DEGREE_BUDGET
}

/// A scan description, loadable from JSON.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub d: u32,
    pub gens: Vec<String>,
    pub candidate: String,
    /// Explicit primes; combined with `primes_up_to` if both are given.
    #[serde(default)]
    pub primes: Vec<u64>,
    #[serde(default)]
    pub primes_up_to: Option<u64>,
    /// Keep only primes with these residues mod `d`; empty keeps all.
    #[serde(default)]
    pub residues: Vec<u64>,
    pub tests: Vec<TestKind>,
    #[serde(default = "default_e_max")]
    pub e_max: u32,
    #[serde(default = "default_budget")]
    pub degree_budget: u64,
    #[serde(default)]
    pub format: OutputFormat,
    #[serde(default)]
    pub deterministic: bool,
    #[serde(default)]
    pub jobs: Option<usize>,
}

pub const PRESETS: [&str; 3] = ["fermat7", "fermat5", "fermat3"];

impl ExperimentConfig {
    fn new(d: u32, gens: &[&str], candidate: &str, tests: Vec<TestKind>, e_max: u32) -> Self {
        ExperimentConfig {
            d,
            gens: gens.iter().map(|s| s.to_string()).collect(),
            candidate: candidate.into(),
            primes: Vec::new(),
            primes_up_to: Some(40),
            residues: Vec::new(),
            tests,
            e_max,
            degree_budget: DEFAULT_DEGREE_BUDGET,
            format: OutputFormat::Csv,
            deterministic: false,
            jobs: None,
        }
    }

    /// `fermat7`: `d = 7`, `(x^4, y^4, z^4)`, `x^3 y^3`.
    /// `fermat5`: `d = 5`, `(x^2, y^2, z^2)`, `xyz`.
    /// `fermat3`: `d = 3`, `(x, y)`, `z^2`.
    pub fn preset(name: &str) -> Result<Self> {
        use TestKind::*;
        Ok(match name {
            "fermat7" => Self::new(
                7,
                &["x4", "y4", "z4"],
                "x3y3",
                vec![Certificate, Frobenius, Instability, Tight],
                DEFAULT_E_MAX,
            ),
            "fermat5" => Self::new(5, &["x2", "y2", "z2"], "xyz", vec![Frobenius, Instability, Tight], 3),
            "fermat3" => Self::new(3, &["x", "y"], "z2", vec![Frobenius], 3),
            _ => {
                return Err(Error::config(
                    "preset",
                    format!("unknown preset `{name}`; expected one of {}", PRESETS.join(", ")),
                ))
            }
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::config("config", e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d < 3 {
            return Err(Error::config("d", format!("d = {} must be at least 3", self.d)));
        }
        if self.gens.is_empty() {
            return Err(Error::config("gens", "no generators"));
        }
        for g in self.gens.iter().chain(std::iter::once(&self.candidate)) {
            check_syntax(g).map_err(|e| Error::config("gens", e.to_string()))?;
        }
        if self.tests.is_empty() {
            return Err(Error::config("tests", "no tests selected"));
        }
        if self.e_max == 0 {
            return Err(Error::config("e_max", "must be at least 1"));
        }
        if self.degree_budget == 0 {
            return Err(Error::config("degree_budget", "must be positive"));
        }
        if self.jobs == Some(0) {
            return Err(Error::config("jobs", "must be at least 1"));
        }
        if let Some(&r) = self.residues.iter().find(|&&r| r >= self.d as u64) {
            return Err(Error::config("residues", format!("residue {r} is not reduced mod {}", self.d)));
        }
        if let Some(&p) = self.primes.iter().find(|&&p| !is_prime(p)) {
            return Err(Error::config("primes", format!("{p} is not prime")));
        }
        if self.primes.is_empty() && self.primes_up_to.is_none() {
            return Err(Error::config("primes", "no primes selected"));
        }
        Ok(())
    }

    /// The primes to scan, ascending, with notices for primes dropped
    /// because they divide `d`.
    pub fn prime_list(&self) -> (Vec<u64>, Vec<String>) {
        let mut primes = self.primes.clone();
        if let Some(n) = self.primes_up_to {
            primes.extend(primes_in(2, n));
        }
        primes.sort_unstable();
        primes.dedup();
        let d = self.d as u64;
        let mut notices = Vec::new();
        primes.retain(|&p| {
            if d % p == 0 {
                notices.push(format!("skipping p = {p}: it divides d = {d}"));
                false
            } else {
                true
            }
        });
        if !self.residues.is_empty() {
            primes.retain(|p| self.residues.contains(&(p % d)));
        }
        (primes, notices)
    }

    fn bounds(&self) -> SearchBounds {
        SearchBounds {
            e_max_frobenius: self.e_max,
            e_max_instability: self.e_max,
            degree_budget: self.degree_budget,
            use_certificates: true,
            cross_check: true,
        }
    }
}

/// How much weight a verdict carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Basis {
    /// Obtained through a closed-form construction that holds for the whole
    /// residue class and was re-verified at this prime.
    ProvedRoute,
    /// Obtained by bounded search; a statement about the tested levels only.
    SearchEvidence,
}

impl Basis {
    pub fn name(self) -> &'static str {
        match self {
            Basis::ProvedRoute => "proved-route",
            Basis::SearchEvidence => "search-evidence",
        }
    }
}

/// One row of a scan report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanRecord {
    pub p: u64,
    pub residue: u64,
    pub test: TestKind,
    pub exponent: Option<u64>,
    pub verdict: String,
    pub basis: Option<Basis>,
    pub certificate: String,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<u128>,
}

impl ScanRecord {
    /// The `verdict` column: label plus basis, e.g. `TightOut [proved-route]`.
    pub fn verdict_column(&self) -> String {
        match self.basis {
            Some(b) => format!("{} [{}]", self.verdict, b.name()),
            None => self.verdict.clone(),
        }
    }

    pub fn is_undecided(&self) -> bool {
        self.verdict == "Undecided"
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanReport {
    pub records: Vec<ScanRecord>,
    pub notices: Vec<String>,
}

struct Outcome {
    exponent: Option<u64>,
    verdict: String,
    basis: Option<Basis>,
    certificate: String,
    detail: String,
}

impl Outcome {
    fn new(verdict: impl Into<String>, basis: Option<Basis>) -> Self {
        Outcome {
            exponent: None,
            verdict: verdict.into(),
            basis,
            certificate: "none".into(),
            detail: String::new(),
        }
    }

    /// Turn non-fatal errors into rows; consistency failures abort the scan.
    fn from_error(err: Error) -> Result<Self> {
        if err.is_consistency_failure() {
            return Err(err);
        }
        let verdict = match err {
            Error::ExponentOverflow(_) => "Undecided",
            _ => "NotApplicable",
        };
        let mut o = Outcome::new(
            verdict,
            (verdict == "Undecided").then_some(Basis::SearchEvidence),
        );
        o.detail = err.to_string();
        Ok(o)
    }
}

/// Fail when a certificate claim and a generic membership answer disagree.
pub fn check_agreement(p: u64, q: u64, certificate_in: bool, generic_in: bool) -> Result<()> {
    if certificate_in != generic_in {
        return Err(Error::Consistency(format!(
            "p = {p}, q = {q}: certificate says {} but the generic solver says {}",
            in_out(certificate_in),
            in_out(generic_in)
        )));
    }
    Ok(())
}

fn in_out(b: bool) -> &'static str {
    if b {
        "IN"
    } else {
        "OUT"
    }
}

struct Instance {
    ctx: RingContext,
    gens: Vec<NormalHomogPoly>,
    f: NormalHomogPoly,
}

fn test_membership(inst: &Instance) -> Result<Outcome> {
    let res = membership(&inst.f, &inst.gens, &inst.ctx, true)?;
    if !res.verify(&inst.f, &inst.gens, &inst.ctx) {
        return Err(Error::Consistency("membership certificate does not verify".into()));
    }
    let mut o = Outcome::new(in_out(res.is_in()), Some(Basis::SearchEvidence));
    o.exponent = Some(1);
    o.certificate = if res.is_in() { "combination" } else { "functional" }.into();
    Ok(o)
}

fn test_frobenius(inst: &Instance, cfg: &ExperimentConfig) -> Result<Outcome> {
    let v = in_frobenius_closure_bounded(&inst.f, &inst.gens, cfg.e_max, cfg.degree_budget, &inst.ctx)?;
    let mut o = Outcome::new(v.label(), Some(Basis::SearchEvidence));
    o.exponent = v.q;
    if let Some(c) = &v.certificate {
        o.certificate = c.label().into();
    }
    o.detail = v.notes.join("; ");
    Ok(o)
}

fn test_certificate(inst: &Instance, cfg: &ExperimentConfig) -> Result<Outcome> {
    let p = inst.ctx.p().get() as u64;
    if !is_certified_family(&inst.f, &inst.gens, &inst.ctx) {
        let mut o = Outcome::new("NotApplicable", None);
        o.detail = "no binomial certificate for this ideal".into();
        return Ok(o);
    }
    let Some(cert) = certificate_for(p, &inst.ctx)? else {
        let mut o = Outcome::new("NotApplicable", None);
        o.detail = format!("p = {} mod 7 has no certificate", p % 7);
        return Ok(o);
    };
    let q = cert.level();
    let claim = cert.claims_membership();
    let mut o = Outcome::new(in_out(claim), Some(Basis::ProvedRoute));
    o.exponent = Some(q);
    o.certificate = match &cert {
        Certificate::Membership(c) => format!("binomial-membership det={}", c.det_a),
        Certificate::NonMembership(c) => format!("binomial-nonmembership det={}", c.det_m5),
    };
    if inst.f.degree().saturating_mul(q) <= cfg.degree_budget {
        let fq = inst.ctx.frobenius(&inst.f, q)?;
        let gq = inst
            .gens
            .iter()
            .map(|g| inst.ctx.frobenius(g, q))
            .collect::<Result<Vec<_>>>()?;
        let generic = membership(&fq, &gq, &inst.ctx, true)?.is_in();
        check_agreement(p, q, claim, generic)?;
        o.detail = format!("generic q={q} agrees");
    } else {
        o.detail = format!("generic q={q} over budget");
    }
    Ok(o)
}

fn lemma_applies(inst: &Instance) -> bool {
    let d = inst.ctx.d() as u64;
    let r = inst.ctx.p().get() as u64 % d;
    inst.gens == fourth_powers(&inst.ctx) && 4 * r >= d && 3 * r < d
}

fn witness_detail(w: &InstabilityWitness) -> String {
    format!(
        "e={} twist={} twisted_degree={} slope={}",
        w.e,
        w.twist,
        w.twisted_degree,
        w.bundle.slope()
    )
}

fn test_instability(inst: &Instance, cfg: &ExperimentConfig) -> Result<Outcome> {
    let (witness, basis, label) = if lemma_applies(inst) {
        (Some(lemma_syzygy_construction(&inst.ctx)?), Basis::ProvedRoute, "lemma-syzygy")
    } else {
        let w = detect_instability(&inst.gens, cfg.e_max, cfg.degree_budget, &inst.ctx)?;
        (w, Basis::SearchEvidence, "kernel-syzygy")
    };
    Ok(match witness {
        Some(w) => {
            let mut o = Outcome::new(format!("Unstable({})", w.e), Some(basis));
            o.exponent = Some(w.q);
            o.certificate = label.into();
            o.detail = witness_detail(&w);
            o
        }
        None => {
            let mut o = Outcome::new("NotFound", Some(Basis::SearchEvidence));
            o.detail = format!("searched e=1..{}", cfg.e_max);
            o
        }
    })
}

fn tight_outcome(v: &ClosureVerdict) -> Outcome {
    let basis = match (&v.kind, v.route) {
        (VerdictKind::Undecided { .. }, _) => Basis::SearchEvidence,
        (_, Some(Route::Certificate)) => Basis::ProvedRoute,
        _ => Basis::SearchEvidence,
    };
    let mut o = Outcome::new(v.label(), Some(basis));
    o.exponent = v.q;
    if let Some(c) = &v.certificate {
        o.certificate = c.label().into();
    }
    let mut detail = Vec::new();
    if let VerdictKind::Undecided { reason } = &v.kind {
        detail.push(reason.clone());
    }
    if let Some(w) = &v.witness {
        detail.push(witness_detail(w));
    }
    detail.extend(v.notes.iter().cloned());
    o.detail = detail.join("; ");
    o
}

fn test_tight(inst: &Instance, cfg: &ExperimentConfig) -> Result<Outcome> {
    let v = decide_tight_closure(&inst.f, &inst.gens, &inst.ctx, &cfg.bounds())?;
    Ok(tight_outcome(&v))
}

fn test_hk(inst: &Instance, cfg: &ExperimentConfig) -> Result<Outcome> {
    let p = inst.ctx.p().get() as u64;
    let maxdeg = inst.gens.iter().map(|g| g.degree()).max().unwrap_or(0).max(inst.f.degree());
    let mut e_top = 0;
    let mut q = 1u64;
    while e_top < cfg.e_max && maxdeg.saturating_mul(q.saturating_mul(p)) <= cfg.degree_budget {
        e_top += 1;
        q *= p;
    }
    if e_top == 0 {
        return Outcome::from_error(Error::ExponentOverflow(format!("p = {p}: level 1 exceeds the degree budget")));
    }
    let rows = hk_compare(&inst.gens, &inst.f, 1..=e_top, &inst.ctx)?;
    let equal = rows.iter().filter(|r| r.equal()).count();
    let verdict = if equal == rows.len() {
        "Equal"
    } else if equal == 0 {
        "Strict"
    } else {
        "Mixed"
    };
    let mut o = Outcome::new(verdict, Some(Basis::SearchEvidence));
    o.exponent = rows.last().map(|r| r.q);
    o.certificate = "colength".into();
    o.detail = rows
        .iter()
        .map(|r| format!("e={}:{}/{}", r.e, r.colength_ideal, r.colength_extended))
        .collect::<Vec<_>>()
        .join(" ");
    Ok(o)
}

fn run_test(test: TestKind, inst: &Instance, cfg: &ExperimentConfig) -> Result<Outcome> {
    let res = match test {
        TestKind::Membership => test_membership(inst),
        TestKind::Frobenius => test_frobenius(inst, cfg),
        TestKind::Certificate => test_certificate(inst, cfg),
        TestKind::Instability => test_instability(inst, cfg),
        TestKind::Tight => test_tight(inst, cfg),
        TestKind::Hk => test_hk(inst, cfg),
    };
    res.or_else(Outcome::from_error)
}

fn run_prime(p: u64, cfg: &ExperimentConfig) -> Result<Vec<ScanRecord>> {
    let ctx = RingContext::with(cfg.d, p)?;
    let gens = cfg
        .gens
        .iter()
        .map(|g| parse_poly(g, &ctx))
        .collect::<Result<Vec<_>>>()?;
    let f = parse_poly(&cfg.candidate, &ctx)?;
    let inst = Instance { ctx, gens, f };
    let mut tests = cfg.tests.clone();
    tests.sort_by_key(|t| t.name());
    tests.dedup();
    let mut out = Vec::new();
    for test in tests {
        let start = Instant::now();
        let o = run_test(test, &inst, cfg)?;
        out.push(ScanRecord {
            p,
            residue: p % cfg.d as u64,
            test,
            exponent: o.exponent,
            verdict: o.verdict,
            basis: o.basis,
            certificate: o.certificate,
            detail: o.detail,
            wall_ms: (!cfg.deterministic).then(|| start.elapsed().as_millis()),
        });
    }
    Ok(out)
}

/// Run every selected test at every selected prime.
///
/// Rows are ordered by prime, then test name, independent of scheduling.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ScanReport> {
    cfg.validate()?;
    let (primes, notices) = cfg.prime_list();
    let work = || -> Result<Vec<Vec<ScanRecord>>> { primes.par_iter().map(|&p| run_prime(p, cfg)).collect() };
    let per_prime = match cfg.jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::config("jobs", e.to_string()))?
            .install(work)?,
        None => work()?,
    };
    let mut records: Vec<ScanRecord> = per_prime.into_iter().flatten().collect();
    records.sort_by(|a, b| (a.p, a.test.name()).cmp(&(b.p, b.test.name())));
    Ok(ScanReport { records, notices })
}

/// Write the report as CSV (`p,residue,test,exponent,verdict,certificate,detail`)
/// or as a JSON array of rows.
pub fn emit_report<W: Write>(report: &ScanReport, format: OutputFormat, mut out: W) -> Result<()> {
    if report.records.is_empty() {
        return Err(Error::EmptyReport);
    }
    match format {
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["p", "residue", "test", "exponent", "verdict", "certificate", "detail"])?;
            for r in &report.records {
                let mut detail = r.detail.clone();
                if let Some(ms) = r.wall_ms {
                    if !detail.is_empty() {
                        detail.push_str("; ");
                    }
                    detail.push_str(&format!("wall_ms={ms}"));
                }
                w.write_record([
                    r.p.to_string(),
                    r.residue.to_string(),
                    r.test.name().to_string(),
                    r.exponent.map(|e| e.to_string()).unwrap_or_default(),
                    r.verdict_column(),
                    r.certificate.clone(),
                    detail,
                ])?;
            }
            w.flush()?;
        }
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut out, &report.records)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(preset: &str, primes: Vec<u64>) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::preset(preset).unwrap();
        cfg.primes = primes;
        cfg.primes_up_to = None;
        cfg.deterministic = true;
        cfg
    }

    #[test]
    fn presets_validate() {
        for name in PRESETS {
            ExperimentConfig::preset(name).unwrap().validate().unwrap();
        }
        assert!(matches!(
            ExperimentConfig::preset("fermat9"),
            Err(Error::ConfigInvalid { .. })
        ));
    }

    #[test]
    fn config_round_trip_and_rejections() {
        let cfg = ExperimentConfig::preset("fermat7").unwrap();
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(ExperimentConfig::from_json(&text).unwrap(), cfg);
        let minimal = r#"{"d":5,"gens":["x2","y2","z2"],"candidate":"xyz","primes":[7],"tests":["frobenius"]}"#;
        let m = ExperimentConfig::from_json(minimal).unwrap();
        assert_eq!(m.e_max, DEFAULT_E_MAX);
        assert_eq!(m.format, OutputFormat::Csv);
        for bad in [
            r#"{"d":5,"gens":["x2"],"candidate":"xyz","primes":[7],"tests":["frobenius"],"colour":1}"#,
            r#"{"d":5,"gens":["x2"],"candidate":"xyz","primes":[8],"tests":["frobenius"]}"#,
            r#"{"d":2,"gens":["x2"],"candidate":"xyz","primes":[7],"tests":["frobenius"]}"#,
            r#"{"d":5,"gens":["x^"],"candidate":"xyz","primes":[7],"tests":["frobenius"]}"#,
            r#"{"d":5,"gens":["x2"],"candidate":"xyz","tests":["frobenius"]}"#,
            r#"{"d":5,"gens":["x2"],"candidate":"xyz","primes":[7],"tests":["nope"]}"#,
            r#"{"d":5,"gens":["x2"],"candidate":"xyz","primes":[7],"tests":[]}"#,
        ] {
            assert!(
                matches!(ExperimentConfig::from_json(bad), Err(Error::ConfigInvalid { .. })),
                "{bad}"
            );
        }
    }

    #[test]
    fn prime_selection() {
        let mut cfg = ExperimentConfig::preset("fermat7").unwrap();
        cfg.primes_up_to = Some(31);
        cfg.primes = vec![7, 59];
        cfg.residues = vec![2, 3];
        let (primes, notices) = cfg.prime_list();
        assert_eq!(primes, vec![2, 3, 17, 23, 31, 59]);
        assert_eq!(notices.len(), 1);
        assert!(notices[0].contains("p = 7"));
    }

    #[test]
    fn fermat7_rows() {
        let report = run_experiment(&small("fermat7", vec![23, 3])).unwrap();
        let rows: Vec<(u64, &str, String)> = report
            .records
            .iter()
            .map(|r| (r.p, r.test.name(), r.verdict_column()))
            .collect();
        assert_eq!(
            rows,
            vec![
                (3, "certificate", "IN [proved-route]".to_string()),
                (3, "frobenius", "InFrobeniusClosure(1) [search-evidence]".to_string()),
                (3, "instability", "Unstable(2) [search-evidence]".to_string()),
                (3, "tight", "TightIn [proved-route]".to_string()),
                (23, "certificate", "OUT [proved-route]".to_string()),
                (23, "frobenius", "OutAtAllTested(2) [search-evidence]".to_string()),
                (23, "instability", "Unstable(1) [proved-route]".to_string()),
                (23, "tight", "TightOut [proved-route]".to_string()),
            ]
        );
        assert_eq!(report.records[4].exponent, Some(529));
        assert!(report.records[4].detail.contains("agrees"));
    }

    #[test]
    fn fermat3_and_hk_rows() {
        let mut cfg = small("fermat3", vec![2, 7]);
        cfg.tests.push(TestKind::Hk);
        cfg.tests.push(TestKind::Tight);
        let report = run_experiment(&cfg).unwrap();
        let by = |p, t: TestKind| report.records.iter().find(|r| r.p == p && r.test == t).unwrap();
        assert_eq!(by(2, TestKind::Frobenius).verdict, "InFrobeniusClosure(1)");
        assert_eq!(by(7, TestKind::Frobenius).verdict, "OutAtAllTested(3)");
        assert_eq!(by(2, TestKind::Hk).verdict, "Equal");
        assert_eq!(by(7, TestKind::Hk).verdict, "Strict");
        assert_eq!(by(2, TestKind::Tight).verdict, "NotApplicable");
    }

    #[test]
    fn deterministic_output_is_stable() {
        let cfg = small("fermat5", vec![2, 3, 7, 11]);
        let render = || {
            let mut buf = Vec::new();
            emit_report(&run_experiment(&cfg).unwrap(), OutputFormat::Csv, &mut buf).unwrap();
            buf
        };
        let a = render();
        assert_eq!(a, render());
        let text = String::from_utf8(a).unwrap();
        assert!(text.starts_with("p,residue,test,exponent,verdict,certificate,detail\n"));
        assert!(!text.contains("wall_ms"));
    }

    #[test]
    fn json_and_empty_reports() {
        let report = run_experiment(&small("fermat3", vec![5])).unwrap();
        let mut buf = Vec::new();
        emit_report(&report, OutputFormat::Json, &mut buf).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v.as_array().unwrap().len(), 1);
        assert_eq!(v[0]["basis"], "search-evidence");
        let empty = ScanReport {
            records: vec![],
            notices: vec![],
        };
        assert!(matches!(emit_report(&empty, OutputFormat::Csv, Vec::new()), Err(Error::EmptyReport)));
        let mut cfg = small("fermat7", vec![]);
        cfg.primes_up_to = Some(7);
        cfg.residues = vec![6];
        let report = run_experiment(&cfg).unwrap();
        assert!(matches!(emit_report(&report, OutputFormat::Csv, Vec::new()), Err(Error::EmptyReport)));
    }

    #[test]
    fn disagreement_is_a_consistency_failure() {
        assert!(check_agreement(23, 529, false, false).is_ok());
        let err = check_agreement(23, 529, false, true).unwrap_err();
        assert!(err.is_consistency_failure());
    }
}
