use std::collections::BTreeMap;
use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use poisson_core::algebra::parse_rational;
use poisson_core::catalog::{Sign, StructureId, StructureSpec};
use poisson_core::exec::{with_jobs, ExecMode};
use poisson_core::harness::{
    run_check, run_cohomology, run_predict, run_specseq, run_verify, CohomologyTable, HarnessError,
    SpecseqReport, Status, Target, VerifyReport,
};
use poisson_core::predict::PredictedTable;

#[derive(Parser)]
#[command(
    name = "poisson-cohomology",
    version,
    about = "Formal Poisson cohomology of twisted quadratic structures on R^3"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Jacobi, compatibility, curl decomposition and d^2 = 0 per sector
    Check(Common),
    /// Direct cohomology dimensions per weight
    Cohomology(Common),
    /// Spectral-sequence pages, E_inf and the E_inf = G(H) comparison
    Specseq(Common),
    /// A closed-form prediction against direct computation
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = parse_target)]
        theorem: Target,
        /// Page package index for thm1
        #[arg(long, default_value_t = 1)]
        n: u32,
        /// Emit the predicted table instead of comparing
        #[arg(long)]
        predicted: bool,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long, value_parser = parse_structure)]
    structure: StructureId,
    /// k=v with a rational value p/q; repeatable
    #[arg(long = "param", value_parser = parse_param)]
    params: Vec<(String, String)>,
    #[arg(long, value_enum)]
    sign: Option<SignArg>,
    #[arg(long = "t-max", default_value_t = 6)]
    t_max: u32,
    /// Page range A..B
    #[arg(long, value_parser = parse_pages, default_value = "0..2")]
    pages: (u32, u32),
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    #[arg(long)]
    dump_reps: bool,
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SignArg {
    Plus,
    Minus,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
}

fn parse_structure(s: &str) -> Result<StructureId, String> {
    StructureId::parse(s)
        .ok_or_else(|| format!("unknown structure {s:?} (lambda4, lambda8, lambda11)"))
}

fn parse_target(s: &str) -> Result<Target, String> {
    Target::parse(s)
        .ok_or_else(|| format!("unknown theorem {s:?} (prop2, thm1, thm2, thm3, identities)"))
}

fn parse_param(s: &str) -> Result<(String, String), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected k=v, got {s:?}"))?;
    Ok((k.trim().to_string(), v.trim().to_string()))
}

fn parse_pages(s: &str) -> Result<(u32, u32), String> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| format!("expected A..B, got {s:?}"))?;
    let a: u32 = a.parse().map_err(|_| format!("bad page {a:?}"))?;
    let b: u32 = b.parse().map_err(|_| format!("bad page {b:?}"))?;
    if a > b {
        return Err(format!("empty page range {s:?}"));
    }
    Ok((a, b))
}

enum Failure {
    Usage(String),
    Mismatch,
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl Common {
    fn spec(&self) -> Result<StructureSpec, Failure> {
        let mut params = BTreeMap::new();
        for (k, v) in &self.params {
            let q = parse_rational(v).map_err(|e| Failure::Usage(format!("--param {k}: {e}")))?;
            if params.insert(k.clone(), q).is_some() {
                return Err(Failure::Usage(format!("--param {k} given twice")));
            }
        }
        let sign = self.sign.map(|s| match s {
            SignArg::Plus => Sign::Plus,
            SignArg::Minus => Sign::Minus,
        });
        StructureSpec::from_params(self.structure, &params, sign)
            .map_err(|e| Failure::Usage(e.to_string()))
    }

    fn mode(&self) -> ExecMode {
        ExecMode::from_jobs(self.jobs)
    }
}

fn emit_json<T: Serialize>(v: &T) -> io::Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, v)?;
    writeln!(out)
}

fn status(s: Status) -> &'static str {
    match s {
        Status::Pass => "PASS",
        Status::Fail => "FAIL",
    }
}

fn print_report(r: &VerifyReport, all: bool) -> io::Result<()> {
    let mut out = io::stdout().lock();
    for c in &r.cells {
        if !all && c.status == Status::Pass {
            continue;
        }
        let mut at = Vec::new();
        for (k, v) in [("t", c.weight), ("r", c.page), ("p", c.p), ("q", c.q)] {
            if let Some(v) = v {
                at.push(format!("{k}={v}"));
            }
        }
        if let Some(g) = c.grade {
            at.push(format!("grade={g}"));
        }
        writeln!(
            out,
            "{} {:<28} {:<28} expected={} actual={}",
            status(c.status),
            c.check,
            at.join(" "),
            c.expected,
            c.actual
        )?;
    }
    let failed = r.failures().count();
    writeln!(
        out,
        "{} {:?} {}: {} checks, {} failed",
        status(r.status),
        r.target,
        r.structure,
        r.cells.len(),
        failed
    )
}

fn print_cohomology(t: &CohomologyTable) -> io::Result<()> {
    let mut out = io::stdout().lock();
    writeln!(out, "{}", t.structure)?;
    if let Some(n) = &t.note {
        writeln!(out, "note: {n}")?;
    }
    writeln!(
        out,
        "{:>4} {:>4} {:>4} {:>4} {:>4}",
        "t", "H0", "H1", "H2", "H3"
    )?;
    let mut rows: BTreeMap<u32, [usize; 4]> = BTreeMap::new();
    for e in &t.entries {
        rows.entry(e.weight).or_default()[e.grade] = e.dim;
    }
    for (w, h) in &rows {
        writeln!(
            out,
            "{w:>4} {:>4} {:>4} {:>4} {:>4}",
            h[0], h[1], h[2], h[3]
        )?;
    }
    for e in &t.entries {
        if let Some(reps) = &e.representatives {
            for r in reps {
                writeln!(out, "t={} H{}: {r}", e.weight, e.grade)?;
            }
        }
    }
    Ok(())
}

fn print_predicted(p: &PredictedTable) -> io::Result<()> {
    let mut out = io::stdout().lock();
    writeln!(out, "{} {}", p.structure, p.source.name())?;
    for e in &p.entries {
        writeln!(
            out,
            "t={:<3} grade={} s={:<3} dim={} {}",
            e.weight, e.grade, e.s, e.dim, e.family
        )?;
    }
    Ok(())
}

fn print_specseq(r: &SpecseqReport) -> io::Result<()> {
    {
        let mut out = io::stdout().lock();
        for pg in r.pages.iter().chain(&r.limit) {
            let name = pg.page.map_or("inf".to_string(), |p| p.to_string());
            let cells: Vec<String> = pg
                .cells
                .iter()
                .filter(|c| c.dim > 0)
                .map(|c| format!("({},{}):{}", c.p, c.q, c.dim))
                .collect();
            writeln!(out, "t={:<3} E_{:<4} {}", pg.weight, name, cells.join(" "))?;
            for c in &pg.cells {
                for rep in c.reps.iter().flatten() {
                    writeln!(out, "    ({},{}) {rep}", c.p, c.q)?;
                }
            }
        }
    }
    print_report(&r.comparison, false)
}

fn run(cli: Cli) -> Result<(), Failure> {
    let io_err = |e: io::Error| Failure::Usage(e.to_string());
    let (common, target) = match &cli.command {
        Command::Check(c) | Command::Cohomology(c) | Command::Specseq(c) => (c, None),
        Command::Verify {
            common,
            theorem,
            n,
            predicted,
        } => (common, Some((*theorem, *n, *predicted))),
    };
    let spec = common.spec()?;
    let (mode, t_max, json) = (common.mode(), common.t_max, common.format == Format::Json);
    with_jobs(common.jobs, || match &cli.command {
        Command::Check(_) => {
            let r = run_check(&spec, t_max, mode)?;
            if json {
                emit_json(&r)
            } else {
                print_report(&r, true)
            }
            .map_err(io_err)?;
            r.passed().then_some(()).ok_or(Failure::Mismatch)
        }
        Command::Cohomology(c) => {
            let t = run_cohomology(&spec, t_max, c.dump_reps, mode)?;
            if json {
                emit_json(&t)
            } else {
                print_cohomology(&t)
            }
            .map_err(io_err)
        }
        Command::Specseq(c) => {
            let (a, b) = c.pages;
            let guard = t_max + 6;
            if b > guard {
                return Err(Failure::Usage(format!(
                    "page {b} is past the collapse bound plus guard ({guard}) for t <= {t_max}"
                )));
            }
            let r = run_specseq(&spec, t_max, a..=b, c.dump_reps, mode)?;
            if json {
                emit_json(&r)
            } else {
                print_specseq(&r)
            }
            .map_err(io_err)?;
            r.comparison.passed().then_some(()).ok_or(Failure::Mismatch)
        }
        Command::Verify { .. } => {
            let (theorem, n, predicted) = target.expect("verify carries a target");
            if predicted {
                let p = run_predict(&spec, theorem, t_max, n)?;
                return if json {
                    emit_json(&p)
                } else {
                    print_predicted(&p)
                }
                .map_err(io_err);
            }
            let r = run_verify(&spec, theorem, t_max, n, mode)?;
            if json {
                emit_json(&r)
            } else {
                print_report(&r, false)
            }
            .map_err(io_err)?;
            r.passed().then_some(()).ok_or(Failure::Mismatch)
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Mismatch) => ExitCode::from(1),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
