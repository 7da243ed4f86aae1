use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use fermat_closure::certificate::certificate_for;
use fermat_closure::closure::{
    decide_tight_closure, in_frobenius_closure_bounded, ClosureVerdict, SearchBounds, DEFAULT_DEGREE_BUDGET,
    DEFAULT_E_MAX,
};
use fermat_closure::hk::{hk_compare, hk_sequence};
use fermat_closure::parse::{parse_gens, parse_poly};
use fermat_closure::scan::{emit_report, run_experiment, ExperimentConfig, OutputFormat, TestKind};
use fermat_closure::semistability::{detect_instability, fourth_powers, lemma_syzygy_construction};
use fermat_closure::system::membership;
use fermat_closure::{Error, NormalHomogPoly, Result, RingContext};

#[derive(Parser, Debug)]
#[command(name = "fermat-closure", version, about = "Frobenius and tight closure in Fermat rings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(clap::Args, Debug, Default)]
struct Opts {
    /// Degree of the Fermat relation x^d + y^d = z^d.
    #[arg(long, global = true)]
    d: Option<u32>,
    /// Characteristic.
    #[arg(long, global = true)]
    p: Option<u64>,
    /// Comma-separated generators, e.g. x4,y4,z4.
    #[arg(long, global = true)]
    gens: Option<String>,
    /// Candidate element, e.g. x3y3.
    #[arg(long, global = true)]
    candidate: Option<String>,
    /// Largest Frobenius exponent tried.
    #[arg(long = "e-max", global = true)]
    e_max: Option<u32>,
    /// Largest degree handed to the generic solver.
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// fermat7, fermat5 or fermat3.
    #[arg(long, global = true)]
    preset: Option<String>,
    /// Scan all primes up to this bound.
    #[arg(long = "primes-up-to", global = true)]
    primes_up_to: Option<u64>,
    /// Comma-separated residues mod d to keep.
    #[arg(long, global = true, value_delimiter = ',')]
    residues: Option<Vec<u64>>,
    /// Comma-separated tests for scan.
    #[arg(long, global = true, value_delimiter = ',')]
    tests: Option<Vec<String>>,
    /// JSON experiment description.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write results to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Suppress timings so repeated runs are byte-identical.
    #[arg(long, global = true)]
    deterministic: bool,
    /// Worker threads for scan.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Exit with status 1 when the outcome is undecided.
    #[arg(long, global = true)]
    strict: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Ideal membership of the candidate.
    Membership,
    /// Frobenius-closure membership up to --e-max.
    Frobenius,
    /// Decide tight-closure membership.
    Tight,
    /// Build and verify the binomial certificate for d = 7.
    Certificate,
    /// Look for a destabilising syzygy of the Frobenius pull-backs.
    Instability,
    /// Colengths of Frobenius powers, compared with the candidate if given.
    Hk,
    /// Run tests over a range of primes.
    Scan,
}

enum Status {
    Decided,
    Undecided,
}

struct Session {
    opts: Opts,
    preset: Option<ExperimentConfig>,
}

impl Session {
    fn new(opts: Opts) -> Result<Self> {
        let preset = opts.preset.as_deref().map(ExperimentConfig::preset).transpose()?;
        Ok(Session { opts, preset })
    }

    fn d(&self) -> Result<u32> {
        self.opts
            .d
            .or(self.preset.as_ref().map(|c| c.d))
            .ok_or_else(|| Error::config("d", "missing --d"))
    }

    fn ctx(&self) -> Result<RingContext> {
        let p = self.opts.p.ok_or_else(|| Error::config("p", "missing --p"))?;
        RingContext::with(self.d()?, p)
    }

    fn gens(&self, ctx: &RingContext) -> Result<Vec<NormalHomogPoly>> {
        match (&self.opts.gens, &self.preset) {
            (Some(g), _) => parse_gens(g, ctx),
            (None, Some(c)) => c.gens.iter().map(|g| parse_poly(g, ctx)).collect(),
            (None, None) => Err(Error::config("gens", "missing --gens")),
        }
    }

    fn candidate(&self, ctx: &RingContext) -> Result<Option<NormalHomogPoly>> {
        match (&self.opts.candidate, &self.preset) {
            (Some(f), _) => parse_poly(f, ctx).map(Some),
            (None, Some(c)) => parse_poly(&c.candidate, ctx).map(Some),
            (None, None) => Ok(None),
        }
    }

    fn require_candidate(&self, ctx: &RingContext) -> Result<NormalHomogPoly> {
        self.candidate(ctx)?
            .ok_or_else(|| Error::config("candidate", "missing --candidate"))
    }

    fn e_max(&self) -> u32 {
        self.opts
            .e_max
            .or(self.preset.as_ref().map(|c| c.e_max))
            .unwrap_or(DEFAULT_E_MAX)
    }

    fn budget(&self) -> u64 {
        self.opts.budget.unwrap_or(DEFAULT_DEGREE_BUDGET)
    }

    fn format(&self) -> Format {
        self.opts.format.unwrap_or(Format::Text)
    }

    fn output(&self) -> Result<Box<dyn Write>> {
        Ok(match &self.opts.out {
            Some(path) => Box::new(BufWriter::new(File::create(path)?)),
            None => Box::new(io::stdout().lock()),
        })
    }

    fn scan_config(&self) -> Result<ExperimentConfig> {
        let o = &self.opts;
        let mut cfg = match (&o.config, &self.preset) {
            (Some(path), _) => ExperimentConfig::from_json(&std::fs::read_to_string(path)?)?,
            (None, Some(c)) => c.clone(),
            (None, None) => {
                let d = self.d()?;
                ExperimentConfig {
                    d,
                    gens: Vec::new(),
                    candidate: String::new(),
                    primes: Vec::new(),
                    primes_up_to: None,
                    residues: Vec::new(),
                    tests: vec![TestKind::Frobenius, TestKind::Tight],
                    e_max: DEFAULT_E_MAX,
                    degree_budget: DEFAULT_DEGREE_BUDGET,
                    format: OutputFormat::Csv,
                    deterministic: false,
                    jobs: None,
                }
            }
        };
        if let Some(d) = o.d {
            cfg.d = d;
        }
        if let Some(g) = &o.gens {
            cfg.gens = g.split(',').map(str::to_string).collect();
        }
        if let Some(f) = &o.candidate {
            cfg.candidate = f.clone();
        }
        if let Some(p) = o.p {
            cfg.primes = vec![p];
            cfg.primes_up_to = None;
        }
        if let Some(n) = o.primes_up_to {
            cfg.primes_up_to = Some(n);
        }
        if let Some(r) = &o.residues {
            cfg.residues = r.clone();
        }
        if let Some(t) = &o.tests {
            cfg.tests = t.iter().map(|s| TestKind::parse(s)).collect::<Result<_>>()?;
        }
        if let Some(e) = o.e_max {
            cfg.e_max = e;
        }
        if let Some(b) = o.budget {
            cfg.degree_budget = b;
        }
        match o.format {
            Some(Format::Csv) => cfg.format = OutputFormat::Csv,
            Some(Format::Json) => cfg.format = OutputFormat::Json,
            Some(Format::Text) => return Err(Error::config("format", "scan writes csv or json")),
            None => {}
        }
        cfg.deterministic |= o.deterministic;
        if o.jobs.is_some() {
            cfg.jobs = o.jobs;
        }
        if cfg.candidate.is_empty() {
            return Err(Error::config("candidate", "missing --candidate"));
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn print_json<T: serde::Serialize>(out: &mut dyn Write, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn print_verdict(out: &mut dyn Write, v: &ClosureVerdict, format: Format) -> Result<()> {
    if format == Format::Json {
        return print_json(out, v);
    }
    let mut line = v.label();
    if let Some(q) = v.q {
        line.push_str(&format!(" Q={q}"));
    }
    if let Some(r) = v.route {
        line.push_str(&format!(" route={}", serde_json::to_value(r)?.as_str().unwrap_or("")));
    }
    if let Some(c) = &v.certificate {
        line.push_str(&format!(" certificate={}", c.label()));
    }
    writeln!(out, "{line}")?;
    if let fermat_closure::closure::VerdictKind::Undecided { reason } = &v.kind {
        writeln!(out, "reason: {reason}")?;
    }
    if let Some(w) = &v.witness {
        writeln!(
            out,
            "witness: e={} q={} twist={} twisted_degree={}",
            w.e, w.q, w.twist, w.twisted_degree
        )?;
    }
    for n in &v.notes {
        writeln!(out, "note: {n}")?;
    }
    Ok(())
}

fn status_of(v: &ClosureVerdict) -> Status {
    if v.is_undecided() {
        Status::Undecided
    } else {
        Status::Decided
    }
}

fn run(command: &Command, s: &Session) -> Result<Status> {
    let format = s.format();
    match command {
        Command::Membership => {
            let ctx = s.ctx()?;
            let gens = s.gens(&ctx)?;
            let f = s.require_candidate(&ctx)?;
            let res = membership(&f, &gens, &ctx, true)?;
            if !res.verify(&f, &gens, &ctx) {
                return Err(Error::Consistency("membership certificate does not verify".into()));
            }
            let mut out = s.output()?;
            if format == Format::Json {
                print_json(&mut out, &res)?;
            } else {
                writeln!(out, "{}", if res.is_in() { "IN" } else { "OUT" })?;
            }
            Ok(Status::Decided)
        }
        Command::Frobenius => {
            let ctx = s.ctx()?;
            let gens = s.gens(&ctx)?;
            let f = s.require_candidate(&ctx)?;
            let v = in_frobenius_closure_bounded(&f, &gens, s.e_max(), s.budget(), &ctx)?;
            print_verdict(&mut s.output()?, &v, format)?;
            Ok(status_of(&v))
        }
        Command::Tight => {
            let ctx = s.ctx()?;
            let gens = s.gens(&ctx)?;
            let f = s.require_candidate(&ctx)?;
            let bounds = SearchBounds {
                e_max_frobenius: s.e_max(),
                e_max_instability: s.e_max(),
                degree_budget: s.budget(),
                ..SearchBounds::default()
            };
            let v = match decide_tight_closure(&f, &gens, &ctx, &bounds) {
                Err(Error::ExponentOverflow(msg)) => {
                    let mut out = s.output()?;
                    writeln!(out, "Undecided")?;
                    writeln!(out, "reason: {msg}")?;
                    return Ok(Status::Undecided);
                }
                other => other?,
            };
            print_verdict(&mut s.output()?, &v, format)?;
            Ok(status_of(&v))
        }
        Command::Certificate => {
            let p = s.opts.p.ok_or_else(|| Error::config("p", "missing --p"))?;
            let ctx = RingContext::with(s.d().unwrap_or(7), p)?;
            if ctx.d() != 7 {
                return Err(Error::config("d", "certificates exist for d = 7 only"));
            }
            let cert = certificate_for(p, &ctx)?
                .ok_or_else(|| Error::config("p", format!("p = {p} is {} mod 7; need 2 or 3", p % 7)))?;
            let mut out = s.output()?;
            if format == Format::Json {
                print_json(&mut out, &cert)?;
            } else {
                let claim = if cert.claims_membership() { "IN" } else { "OUT" };
                writeln!(out, "{claim} at q={} (verified)", cert.level())?;
                writeln!(out, "{}", cert.to_json()?)?;
            }
            Ok(Status::Decided)
        }
        Command::Instability => {
            let ctx = s.ctx()?;
            let gens = s.gens(&ctx)?;
            let d = ctx.d() as u64;
            let r = ctx.p().get() as u64 % d;
            let witness = if gens == fourth_powers(&ctx) && 4 * r >= d && 3 * r < d {
                Some(lemma_syzygy_construction(&ctx)?)
            } else {
                detect_instability(&gens, s.e_max(), s.budget(), &ctx)?
            };
            let mut out = s.output()?;
            match (&witness, format) {
                (_, Format::Json) => print_json(&mut out, &witness)?,
                (Some(w), _) => writeln!(
                    out,
                    "Unstable e={} q={} twist={} twisted_degree={} source={}",
                    w.e,
                    w.q,
                    w.twist,
                    w.twisted_degree,
                    serde_json::to_value(w.source)?.as_str().unwrap_or("")
                )?,
                (None, _) => writeln!(out, "NotFound through e={}", s.e_max())?,
            }
            Ok(Status::Decided)
        }
        Command::Hk => {
            let ctx = s.ctx()?;
            let gens = s.gens(&ctx)?;
            let mut out = s.output()?;
            match s.candidate(&ctx)? {
                Some(f) => {
                    let rows = hk_compare(&gens, &f, 1..=s.e_max(), &ctx)?;
                    if format == Format::Json {
                        print_json(&mut out, &rows)?;
                    } else {
                        writeln!(out, "e,q,colength_ideal,colength_extended,member")?;
                        for r in rows {
                            writeln!(
                                out,
                                "{},{},{},{},{}",
                                r.e, r.q, r.colength_ideal, r.colength_extended, r.member
                            )?;
                        }
                    }
                }
                None => {
                    let seq = hk_sequence(&gens, 1..=s.e_max(), &ctx)?;
                    if format == Format::Json {
                        print_json(&mut out, &seq)?;
                    } else {
                        seq.write_csv(out)?;
                    }
                }
            }
            Ok(Status::Decided)
        }
        Command::Scan => {
            let cfg = s.scan_config()?;
            let report = run_experiment(&cfg)?;
            for n in &report.notices {
                eprintln!("notice: {n}");
            }
            emit_report(&report, cfg.format, s.output()?)?;
            Ok(if report.records.iter().any(|r| r.is_undecided()) {
                Status::Undecided
            } else {
                Status::Decided
            })
        }
    }
}

fn exit_code(err: &Error) -> u8 {
    if err.is_consistency_failure() {
        3
    } else {
        2
    }
}

/// Parse `args` and run, returning the process exit status.
fn execute<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return err.exit_code() as u8;
        }
    };
    let strict = cli.opts.strict;
    let result = Session::new(cli.opts).and_then(|s| run(&cli.command, &s));
    match result {
        Ok(Status::Decided) => 0,
        Ok(Status::Undecided) if strict => 1,
        Ok(Status::Undecided) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code(&err)
        }
    }
}

fn main() -> ExitCode {
    ExitCode::from(execute(std::env::args_os()))
}
