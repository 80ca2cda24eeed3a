//! The `rainbow` command line: argument parsing, input loading and report
//! rendering. Exit codes are 0 on success, 1 on usage or input errors and 2
//! when a certificate, bound or verification is rejected.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use rainbow_core::census::census_cached;
use rainbow_core::certificate::{load_certificate, verify_with_limit};
use rainbow_core::constructions::{
    balanced_parts, conjectured_f, iterated_blowup, limit_densities, materialize, parse_spec,
};
use rainbow_core::densities::{count_rainbow_triangles, density_expression, density_profile, Expression};
use rainbow_core::flags::{enumerate_flags, enumerate_types, FlagType};
use rainbow_core::optimizers::library::{
    bounds_report, bounds_text, derive_x_bounds, library_entry, library_names, nonpositive_set, run_entry,
    EntryResult, LibraryEntry,
};
use rainbow_core::optimizers::solver::render_enclosure;
use rainbow_core::optimizers::{isolate_roots, parse_upoly, PolyProgram, UPoly};
use rainbow_core::parallel::with_workers;
use rainbow_core::rational::{fmt_decimal, fmt_rational, parse_rational, Rational};
use rainbow_core::search::max_rainbow_exhaustive;
use rainbow_core::{ColoredGraph, Mode};

/// Diagnostics printed for a rejected certificate.
const MAX_DIAGNOSTICS: usize = 10;

#[derive(Parser, Debug)]
#[command(name = "rainbow", version, about = "Exact tools for rainbow triangles in 3-edge-colored complete graphs")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalArgs {
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Directory for cached censuses.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Ignore the cache directory.
    #[arg(long, global = true)]
    no_cache: bool,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct GraphInput {
    /// A graph file (first non-comment line `n:colors`) or `inline:n:colors`.
    #[arg(long, conflicts_with = "construct")]
    graph: Option<String>,
    /// `iterated:K` or `spec:FILE` with a blow-up spec.
    #[arg(long)]
    construct: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Number of isomorphism classes on `level` vertices.
    Census {
        #[arg(long, default_value_t = 6)]
        level: usize,
        #[arg(long, default_value = "colorblind", value_parser = parse_mode)]
        mode: Mode,
    },
    /// Named densities of a graph, or its full census profile with `--level`.
    Density {
        #[command(flatten)]
        input: GraphInput,
        #[arg(long)]
        level: Option<usize>,
        #[arg(long, default_value = "colorblind", value_parser = parse_mode)]
        mode: Mode,
    },
    /// Number of rainbow triangles.
    Rainbow {
        #[command(flatten)]
        input: GraphInput,
    },
    /// Builds a construction and prints it in text form.
    Blowup {
        #[arg(long)]
        construct: String,
    },
    /// Rainbow triangles of the balanced recursive construction on n vertices.
    Frec {
        #[arg(long)]
        n: usize,
    },
    /// Maximum number of rainbow triangles over all colorings of K_n.
    Search {
        #[arg(long)]
        n: usize,
        /// Extend census classes instead of scanning raw colorings.
        #[arg(long)]
        prune: bool,
    },
    /// Flag types and the number of flags over each at a level.
    Flags {
        #[arg(long, default_value_t = 6)]
        level: usize,
        /// Only types on this many vertices.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Checks a sum-of-squares certificate file.
    VerifyCert {
        #[arg(long)]
        file: PathBuf,
    },
    /// Solves a library program by name or a program file.
    Solve {
        #[arg(long)]
        program: String,
    },
    /// Derives the partition bounds and checks them against the stated values.
    Bounds,
    /// Real roots of a library polynomial or a polynomial file, in `t`.
    Roots {
        #[arg(long)]
        program: String,
        #[arg(long)]
        interval: Option<String>,
    },
    /// Limit densities of the iterated blow-up.
    Limits,
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse().map_err(|e: rainbow_core::Error| e.to_string())
}

/// Settings shared by all subcommands.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub cache_dir: Option<PathBuf>,
    pub workers: usize,
    pub format: Format,
    /// Width of displayed enclosures; exact paths never use it.
    pub tolerance: Rational,
}

impl RunConfig {
    fn cache(&self) -> Option<&Path> {
        self.cache_dir.as_deref()
    }
}

/// Exit code and captured output of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Output {
    pub code: u8,
    pub stdout: String,
    pub stderr: String,
}

enum Failure {
    Usage(String),
    /// A complete report whose verdict is negative.
    Rejected(String),
}

impl From<rainbow_core::Error> for Failure {
    fn from(e: rainbow_core::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type CmdResult = Result<String, Failure>;

/// Runs the command line `args` (program name first).
pub fn run<S: AsRef<str>>(args: &[S]) -> Output {
    let cli = match Cli::try_parse_from(args.iter().map(AsRef::as_ref)) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Output { code: 0, stdout: text, stderr: String::new() },
                _ => Output { code: 1, stdout: String::new(), stderr: text },
            };
        }
    };
    let workers = cli.global.workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let config = RunConfig {
        cache_dir: if cli.global.no_cache { None } else { cli.global.cache_dir.clone() },
        workers,
        format: cli.global.format,
        tolerance: Rational::new(1.into(), 10_000_000_000u64.into()),
    };
    let result = match with_workers(workers, || execute(&cli.command, &config)) {
        Ok(r) => r,
        Err(e) => Err(Failure::Usage(e.to_string())),
    };
    match result {
        Ok(stdout) => Output { code: 0, stdout, stderr: String::new() },
        Err(Failure::Rejected(stdout)) => Output { code: 2, stdout, stderr: String::new() },
        Err(Failure::Usage(msg)) => Output { code: 1, stdout: String::new(), stderr: format!("error: {msg}\n") },
    }
}

fn execute(cmd: &Command, cfg: &RunConfig) -> CmdResult {
    match cmd {
        Command::Census { level, mode } => census_cmd(*level, *mode, cfg),
        Command::Density { input, level, mode } => density_cmd(input, *level, *mode, cfg),
        Command::Rainbow { input } => rainbow_cmd(input, cfg),
        Command::Blowup { construct } => blowup_cmd(construct, cfg),
        Command::Frec { n } => frec_cmd(*n, cfg),
        Command::Search { n, prune } => search_cmd(*n, *prune, cfg),
        Command::Flags { level, n } => flags_cmd(*level, *n, cfg),
        Command::VerifyCert { file } => verify_cmd(file, cfg),
        Command::Solve { program } => solve_cmd(program, cfg),
        Command::Bounds => bounds_cmd(cfg),
        Command::Roots { program, interval } => roots_cmd(program, interval.as_deref(), cfg),
        Command::Limits => limits_cmd(cfg),
    }
}

fn exact(r: &Rational) -> Value {
    json!({ "exact": fmt_rational(r), "decimal": fmt_decimal(r, 10) })
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn no_csv(what: &str) -> Failure {
    Failure::Usage(format!("{what} has no csv form; use --format text or json"))
}

// ---- inputs ---------------------------------------------------------------

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

/// First line that is neither blank nor a `#` comment.
fn first_content_line(text: &str) -> Option<&str> {
    text.lines().map(str::trim).find(|l| !l.is_empty() && !l.starts_with('#'))
}

fn load_graph(input: &GraphInput) -> Result<ColoredGraph, Failure> {
    match (&input.graph, &input.construct) {
        (Some(g), None) => {
            if let Some(key) = g.strip_prefix("inline:") {
                return Ok(ColoredGraph::decode(key)?);
            }
            let text = read(Path::new(g))?;
            let line = first_content_line(&text).ok_or_else(|| Failure::Usage(format!("{g}: no graph found")))?;
            Ok(ColoredGraph::decode(line)?)
        }
        (None, Some(c)) => construct(c),
        _ => Err(Failure::Usage("give exactly one of --graph or --construct".into())),
    }
}

fn construct(spec: &str) -> Result<ColoredGraph, Failure> {
    if let Some(k) = spec.strip_prefix("iterated:") {
        let k: usize = k.parse().map_err(|_| Failure::Usage(format!("bad depth in {spec:?}")))?;
        return Ok(iterated_blowup(k)?);
    }
    if let Some(path) = spec.strip_prefix("spec:") {
        let text = read(Path::new(path))?;
        let body: String = text.lines().filter(|l| !l.trim_start().starts_with('#')).collect::<Vec<_>>().join(" ");
        return Ok(materialize(&parse_spec(&body)?)?);
    }
    Err(Failure::Usage(format!("--construct expects iterated:K or spec:FILE, got {spec:?}")))
}

// ---- subcommands ----------------------------------------------------------

fn census_cmd(level: usize, mode: Mode, cfg: &RunConfig) -> CmdResult {
    let c = census_cached(level, mode, cfg.cache())?;
    Ok(match cfg.format {
        Format::Text => format!("{}\n", c.len()),
        Format::Csv => {
            let mut out = String::from("id,key\n");
            for (id, k) in c.members().iter().enumerate() {
                writeln!(out, "{id},{k}").unwrap();
            }
            out
        }
        Format::Json => pretty(&json!({
            "level": level,
            "mode": mode.to_string(),
            "count": c.len(),
            "members": c.members().iter().map(|k| k.to_string()).collect::<Vec<_>>(),
        })),
    })
}

fn density_cmd(input: &GraphInput, level: Option<usize>, mode: Mode, cfg: &RunConfig) -> CmdResult {
    let g = load_graph(input)?;
    if let Some(level) = level {
        // loads the census into memory, from the cache when there is one
        let census = census_cached(level, mode, cfg.cache())?;
        let profile = density_profile(&g, level, mode)?;
        return Ok(match cfg.format {
            Format::Text | Format::Csv => profile.to_csv(&census),
            Format::Json => {
                let entries: Vec<Value> = (0..profile.counts.len())
                    .filter(|&id| profile.counts[id] != 0)
                    .map(|id| json!({ "id": id, "key": census.key(id).to_string(), "density": exact(&profile.entry(id)) }))
                    .collect();
                pretty(&json!({ "n": g.n(), "level": level, "mode": mode.to_string(), "entries": entries }))
            }
        });
    }
    let rows: Vec<(Expression, Rational)> = Expression::ALL
        .into_iter()
        .filter(|e| e.arity() <= g.n())
        .map(|e| density_expression(e, &g).map(|d| (e, d)))
        .collect::<rainbow_core::Result<_>>()?;
    Ok(match cfg.format {
        Format::Text => {
            let mut out = format!("n {}\n", g.n());
            for (e, d) in &rows {
                writeln!(out, "{e} {} ({})", fmt_rational(d), fmt_decimal(d, 10)).unwrap();
            }
            out
        }
        Format::Csv => {
            let mut out = String::from("expression,exact,decimal\n");
            for (e, d) in &rows {
                writeln!(out, "{e},{},{}", fmt_rational(d), fmt_decimal(d, 10)).unwrap();
            }
            out
        }
        Format::Json => {
            let map: serde_json::Map<String, Value> = rows.iter().map(|(e, d)| (e.to_string(), exact(d))).collect();
            pretty(&json!({ "n": g.n(), "densities": map }))
        }
    })
}

fn rainbow_cmd(input: &GraphInput, cfg: &RunConfig) -> CmdResult {
    let g = load_graph(input)?;
    let count = count_rainbow_triangles(&g);
    Ok(match cfg.format {
        Format::Text => format!("{count}\n"),
        Format::Csv => format!("n,rainbow_triangles\n{},{count}\n", g.n()),
        Format::Json => pretty(&json!({ "n": g.n(), "rainbow_triangles": count })),
    })
}

fn blowup_cmd(spec: &str, cfg: &RunConfig) -> CmdResult {
    let g = construct(spec)?;
    Ok(match cfg.format {
        Format::Text => format!("{}\n", g.encode()),
        Format::Csv => format!("n,graph\n{},{}\n", g.n(), g.encode()),
        Format::Json => pretty(&json!({ "n": g.n(), "graph": g.encode() })),
    })
}

fn frec_cmd(n: usize, cfg: &RunConfig) -> CmdResult {
    if n == 0 {
        return Err(Failure::Usage("--n must be positive".into()));
    }
    let f = conjectured_f(n);
    let parts = balanced_parts(n);
    Ok(match cfg.format {
        Format::Text => format!("{f}\n"),
        Format::Csv => format!("n,f,parts\n{n},{f},{}\n", parts.map(|p| p.to_string()).join(" ")),
        Format::Json => pretty(&json!({ "n": n, "f": f.to_string(), "parts": parts })),
    })
}

fn search_cmd(n: usize, prune: bool, cfg: &RunConfig) -> CmdResult {
    let r = max_rainbow_exhaustive(n, prune)?;
    Ok(match cfg.format {
        Format::Text => r.to_text(),
        Format::Csv => {
            let mut out = String::from("witness,rainbow_triangles\n");
            for w in &r.witnesses {
                writeln!(out, "{w},{}", r.maximum).unwrap();
            }
            out
        }
        Format::Json => pretty(&json!({
            "n": n,
            "maximum": r.maximum,
            "recurrence": conjectured_f(n).to_string(),
            "explored": r.explored,
            "witnesses": r.witnesses.iter().map(|k| k.to_string()).collect::<Vec<_>>(),
            "outside_construction": r.outside_construction().iter().map(|k| k.to_string()).collect::<Vec<_>>(),
        })),
    })
}

fn flags_cmd(level: usize, size: Option<usize>, cfg: &RunConfig) -> CmdResult {
    let sizes: Vec<usize> = match size {
        Some(s) if s >= level => return Err(Failure::Usage(format!("type size {s} must be below the level {level}"))),
        Some(s) => vec![s],
        None => (0..level).collect(),
    };
    let mut rows: Vec<(FlagType, usize)> = Vec::new();
    for s in sizes {
        for ty in enumerate_types(s)? {
            let count = enumerate_flags(&ty, level)?.len();
            rows.push((ty, count));
        }
    }
    Ok(match cfg.format {
        Format::Text => {
            let mut out = String::new();
            for (ty, count) in &rows {
                writeln!(out, "type {ty} size {} flags {count}", ty.size()).unwrap();
            }
            out
        }
        Format::Csv => {
            let mut out = String::from("type,size,flags\n");
            for (ty, count) in &rows {
                writeln!(out, "{ty},{},{count}", ty.size()).unwrap();
            }
            out
        }
        Format::Json => pretty(&json!({
            "level": level,
            "types": rows.iter().map(|(ty, c)| json!({ "type": ty.to_string(), "size": ty.size(), "flags": c })).collect::<Vec<_>>(),
        })),
    })
}

fn verify_cmd(file: &Path, cfg: &RunConfig) -> CmdResult {
    let c = load_certificate(file)?;
    let v = verify_with_limit(&c, MAX_DIAGNOSTICS)?;
    let report = match cfg.format {
        Format::Text => {
            let mut out = String::from(if v.accepted { "ACCEPTED\n" } else { "REJECTED\n" });
            if !v.accepted {
                writeln!(out, "nonzero residual on {} classes", v.nonzero).unwrap();
                for d in &v.diagnostics {
                    writeln!(out, "  {} {} {}", d.census_id, d.key, d.residual).unwrap();
                }
            }
            out
        }
        Format::Csv => return Err(no_csv("verify-cert")),
        Format::Json => pretty(&json!({
            "accepted": v.accepted,
            "nonzero": v.nonzero,
            "diagnostics": v.diagnostics.iter()
                .map(|d| json!({ "id": d.census_id, "key": d.key, "residual": d.residual }))
                .collect::<Vec<_>>(),
        })),
    };
    if v.accepted {
        Ok(report)
    } else {
        Err(Failure::Rejected(report))
    }
}

fn load_entry(program: &str) -> Result<LibraryEntry, Failure> {
    let path = Path::new(program);
    if path.is_file() {
        return Ok(LibraryEntry::Program(PolyProgram::from_text(&read(path)?)?));
    }
    library_entry(program).map_err(|_| {
        Failure::Usage(format!("{program:?} is neither a file nor a library program ({})", library_names().join(", ")))
    })
}

fn solve_cmd(program: &str, cfg: &RunConfig) -> CmdResult {
    let result = run_entry(load_entry(program)?)?;
    let report = match cfg.format {
        Format::Text => result.to_text(),
        Format::Csv => return Err(no_csv("solve")),
        Format::Json => pretty(&serde_json::to_value(result.report()).expect("reports serialize")),
    };
    let unverified = matches!(&result, EntryResult::Program(s) if s.optimum.as_ref().is_some_and(|o| !o.verified));
    if unverified {
        Err(Failure::Rejected(report))
    } else {
        Ok(report)
    }
}

fn bounds_cmd(cfg: &RunConfig) -> CmdResult {
    let checks = derive_x_bounds()?;
    let report = match cfg.format {
        Format::Text => bounds_text(&checks),
        Format::Csv => return Err(no_csv("bounds")),
        Format::Json => pretty(&serde_json::to_value(bounds_report(&checks)).expect("reports serialize")),
    };
    if checks.iter().all(|c| c.consistent) {
        Ok(report)
    } else {
        Err(Failure::Rejected(report))
    }
}

fn parse_interval(text: &str) -> Result<(Rational, Rational), Failure> {
    let (a, b) = text.split_once(',').ok_or_else(|| Failure::Usage(format!("--interval expects a,b, got {text:?}")))?;
    let (a, b) = (parse_rational(a)?, parse_rational(b)?);
    if a > b {
        return Err(Failure::Usage(format!("empty interval {text:?}")));
    }
    Ok((a, b))
}

/// `[-B, B]` with Cauchy's bound `B`, which holds every real root.
fn cauchy_interval(p: &UPoly) -> (Rational, Rational) {
    let lead = p.lead();
    let b = p.coeffs().iter().map(|c| {
            let r = c / &lead;
            if r < Rational::default() { -r } else { r }
        }).max().unwrap_or_default() + Rational::from_integer(1.into());
    (-b.clone(), b)
}

fn roots_cmd(program: &str, interval: Option<&str>, cfg: &RunConfig) -> CmdResult {
    let path = Path::new(program);
    let (name, poly, default) = if path.is_file() {
        let text = read(path)?;
        let body: String = text.lines().filter(|l| !l.trim_start().starts_with('#')).collect::<Vec<_>>().join(" ");
        let p = parse_upoly(&body)?;
        let d = cauchy_interval(&p);
        (path.display().to_string(), p, d)
    } else {
        match load_entry(program)? {
            LibraryEntry::Roots(r) => {
                if interval.is_none() {
                    let result = run_entry(LibraryEntry::Roots(r))?;
                    return Ok(match cfg.format {
                        Format::Text => result.to_text(),
                        Format::Csv => return Err(no_csv("roots")),
                        Format::Json => pretty(&serde_json::to_value(result.report()).expect("reports serialize")),
                    });
                }
                (r.name.clone(), r.poly.clone(), (r.lo.clone(), r.hi.clone()))
            }
            _ => return Err(Failure::Usage(format!("{program} is not a polynomial"))),
        }
    };
    if poly.degree().unwrap_or(0) == 0 {
        return Err(Failure::Usage("the polynomial must have positive degree".into()));
    }
    let (lo, hi) = match interval {
        Some(t) => parse_interval(t)?,
        None => default,
    };
    let iso = isolate_roots(&poly, &lo, &hi, &cfg.tolerance)?;
    let nonpos = nonpositive_set(&iso, &lo, &hi);
    let roots: Vec<_> = iso.roots.iter().map(|r| r.value(&cfg.tolerance)).collect();
    Ok(match cfg.format {
        Format::Text => {
            let mut out = format!("program {name}\npoly {poly}\ninterval [{}, {}]\n", fmt_rational(&lo), fmt_rational(&hi));
            for r in &roots {
                writeln!(out, "root {}", render_enclosure(r)).unwrap();
            }
            for (a, b) in &nonpos {
                writeln!(out, "nonpositive [{}, {}]", fmt_decimal(a, 10), fmt_decimal(b, 10)).unwrap();
            }
            out
        }
        Format::Csv => {
            let mut out = String::from("root_lo,root_hi\n");
            for r in &roots {
                writeln!(out, "{},{}", fmt_decimal(&r.lo, 10), fmt_decimal(&r.hi, 10)).unwrap();
            }
            out
        }
        Format::Json => pretty(&json!({
            "program": name,
            "poly": poly.to_string(),
            "interval": [fmt_rational(&lo), fmt_rational(&hi)],
            "roots": roots.iter().map(|r| serde_json::to_value(r.report()).expect("reports serialize")).collect::<Vec<_>>(),
            "nonpositive": nonpos.iter().map(|(a, b)| [fmt_decimal(a, 10), fmt_decimal(b, 10)]).collect::<Vec<_>>(),
        })),
    })
}

fn limits_cmd(cfg: &RunConfig) -> CmdResult {
    let rows = limit_densities();
    Ok(match cfg.format {
        Format::Text => {
            let mut out = String::new();
            for (e, d) in &rows {
                writeln!(out, "{e} {} ({})", fmt_rational(d), fmt_decimal(d, 10)).unwrap();
            }
            out
        }
        Format::Csv => {
            let mut out = String::from("expression,exact,decimal\n");
            for (e, d) in &rows {
                writeln!(out, "{e},{},{}", fmt_rational(d), fmt_decimal(d, 10)).unwrap();
            }
            out
        }
        Format::Json => {
            let map: serde_json::Map<String, Value> = rows.iter().map(|(e, d)| (e.to_string(), exact(d))).collect();
            pretty(&Value::Object(map))
        }
    })
}
