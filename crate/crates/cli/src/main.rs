//! `stable-stats`: exact and Monte Carlo moments of subspace-restriction
//! statistics, class tables and product expansions.
//!
//! Exit status: 0 on success, 1 when a verification fails, 2 on usage,
//! parse or cap errors.

use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use stable_stats::charpoly::product_expand;
use stable_stats::families::AmbientFamily;
use stable_stats::stats::{
    exact_joint_moment, mc_estimate, verdict, MomentResult, MomentValue, Statistic, Verdict,
};
use stable_stats::verify::{run, run_all, CriterionOutcome};
use stable_stats::{
    parse_class_spec, Error, FamilyKind, Field, GlFamily, SpFamily, SymFamily,
    DEFAULT_ENUMERATION_CAP,
};

#[derive(Parser, Debug)]
#[command(name = "stable-stats", version, about = "Subspace-restriction statistics of finite classical groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Expectation of a single statistic X_C.
    Expect(MomentArgs),
    /// Joint moment E[X_C1 ... X_Cr]; repeat --class for each factor.
    Moment(MomentArgs),
    /// Moments over a range of n with a stability verdict.
    Scan(MomentArgs),
    /// Conjugacy classes of G_d.
    Classes(ClassesArgs),
    /// Expand X_lhs * X_rhs into the X_D basis.
    Expand(ExpandArgs),
    /// Run the bundled acceptance checks.
    Verify(VerifyArgs),
}

#[derive(Args, Debug, Clone)]
struct FamilyArgs {
    #[arg(long, value_enum)]
    family: FamilyChoice,
    /// Field order, required for gl and sp.
    #[arg(long)]
    q: Option<u32>,
    /// Defining polynomial of F_q over F_p in `g`, e.g. `g^2+g+1`.
    #[arg(long)]
    modulus: Option<String>,
    /// Largest group or set an exact computation may enumerate.
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    cap: u64,
}

#[derive(Args, Debug)]
struct MomentArgs {
    #[command(flatten)]
    family: FamilyArgs,
    /// Class spec: eig:<elt>, invfac:[...], cycletype:[...] or sp:<index>.
    #[arg(long = "class", required = true)]
    classes: Vec<String>,
    /// A size `n` or an inclusive range `a..b`.
    #[arg(long)]
    n: String,
    #[arg(long, value_enum, default_value_t = ModeChoice::Exact)]
    mode: ModeChoice,
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args, Debug)]
struct ClassesArgs {
    #[command(flatten)]
    family: FamilyArgs,
    #[arg(long)]
    d: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args, Debug)]
struct ExpandArgs {
    #[command(flatten)]
    family: FamilyArgs,
    #[arg(long)]
    lhs: String,
    #[arg(long)]
    rhs: String,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Run only this criterion.
    #[arg(long)]
    criterion: Option<u32>,
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    cap: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum FamilyChoice {
    Gl,
    Sym,
    Sp,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum ModeChoice {
    Exact,
    Mc,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

/// Failure classes mapped onto exit statuses.
enum Failure {
    Verification(String),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        match e {
            Error::ExpansionMismatch { .. } => Failure::Verification(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Failure {
        Failure::Usage(format!("output: {e}"))
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Failure {
        Failure::Usage(format!("output: {e}"))
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

/// A document to print: JSON, or a CSV header plus rows.
struct Report {
    json: Value,
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
    passed: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let (format, result) = match &cli.command {
        Command::Expect(a) => (a.format, moments(a, "expect")),
        Command::Moment(a) => (a.format, moments(a, "moment")),
        Command::Scan(a) => (a.format, moments(a, "scan")),
        Command::Classes(a) => (a.format, classes(a)),
        Command::Expand(a) => (a.format, expand(a)),
        Command::Verify(a) => (a.format, verify(a)),
    };
    let outcome = result.and_then(|report| {
        emit(&report, format)?;
        Ok(report.passed)
    });
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(value) = std::env::var("STABLE_STATS_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| format!("STABLE_STATS_THREADS must be a positive integer, got {value:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| e.to_string())
}

fn emit(report: &Report, format: Format) -> Outcome<()> {
    let stdout = io::stdout();
    match format {
        Format::Json => {
            let mut out = stdout.lock();
            serde_json::to_writer_pretty(&mut out, &report.json)
                .map_err(|e| Failure::Usage(format!("output: {e}")))?;
            writeln!(out)?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(stdout.lock());
            w.write_record(&report.header)?;
            for row in &report.rows {
                w.write_record(row)?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

fn field_of(args: &FamilyArgs) -> Outcome<Field> {
    let q = args
        .q
        .ok_or_else(|| Failure::Usage(format!("--q is required for the {} family", kind_of(args.family))))?;
    let field = match &args.modulus {
        None => Field::of_order(q)?,
        Some(text) => {
            let p = (2..=q).find(|p| q % p == 0).ok_or(Error::FieldTooLarge(q as u64))?;
            let field = Field::with_modulus_text(p, text)?;
            if field.order() != q {
                return Err(Failure::Usage(format!(
                    "modulus {text} defines a field of order {}, not {q}",
                    field.order()
                )));
            }
            field
        }
    };
    Ok(field)
}

/// Runs `$body` with `$f` bound to the family selected by `$args`.
macro_rules! with_family {
    ($args:expr, $f:ident => $body:expr) => {{
        let args: &FamilyArgs = $args;
        match args.family {
            FamilyChoice::Gl => {
                let $f = GlFamily::with_cap(field_of(args)?, args.cap);
                $body
            }
            FamilyChoice::Sp => {
                let $f = SpFamily::with_cap(field_of(args)?, args.cap);
                $body
            }
            FamilyChoice::Sym => {
                if args.q.is_some() || args.modulus.is_some() {
                    return Err(Failure::Usage("--q and --modulus do not apply to the sym family".into()));
                }
                let $f = SymFamily::with_cap(args.cap);
                $body
            }
        }
    }};
}

fn kind_of(choice: FamilyChoice) -> FamilyKind {
    match choice {
        FamilyChoice::Gl => FamilyKind::Gl,
        FamilyChoice::Sym => FamilyKind::Sym,
        FamilyChoice::Sp => FamilyKind::Sp,
    }
}

fn family_config(args: &FamilyArgs) -> Value {
    json!({
        "family": kind_of(args.family).name(),
        "q": args.q,
        "modulus": args.modulus,
        "cap": args.cap,
    })
}

fn parse_range(text: &str) -> Outcome<Vec<usize>> {
    let bad = || Failure::Usage(format!("--n expects a size or a range a..b, got {text:?}"));
    let parse = |s: &str| s.trim().parse::<usize>().map_err(|_| bad());
    match text.split_once("..") {
        Some((a, b)) => {
            let (a, b) = (parse(a)?, parse(b.strip_prefix('=').unwrap_or(b))?);
            if a > b {
                return Err(bad());
            }
            Ok((a..=b).collect())
        }
        None => Ok(vec![parse(text)?]),
    }
}

fn statistic<F: AmbientFamily>(family: &F, spec: &str) -> Outcome<Statistic> {
    let label = parse_class_spec(spec, family.field())
        .map_err(|e| Failure::Usage(format!("class spec {spec:?}: {e}")))?;
    Ok(Statistic::new(family, label)?)
}

fn moments(args: &MomentArgs, command: &str) -> Outcome<Report> {
    let ns = parse_range(&args.n)?;
    if command == "expect" && args.classes.len() != 1 {
        return Err(Failure::Usage("expect takes exactly one --class; use moment for products".into()));
    }
    let (samples, seed) = match args.mode {
        ModeChoice::Exact => (None, None),
        ModeChoice::Mc => match (args.samples, args.seed) {
            (Some(s), Some(seed)) => (Some(s), Some(seed)),
            _ => return Err(Failure::Usage("--mode mc requires --samples and --seed".into())),
        },
    };
    with_family!(&args.family, family => {
        let stats = args
            .classes
            .iter()
            .map(|c| statistic(&family, c))
            .collect::<Outcome<Vec<_>>>()?;
        let mut results = Vec::new();
        for &n in &ns {
            let r = match (samples, seed) {
                (Some(samples), Some(seed)) => mc_estimate(&family, &stats, n, samples, seed)?,
                _ => exact_joint_moment(&family, &stats, n)?,
            };
            results.push(r);
        }
        let verdict = verdict(family.kind(), &stats, &results);
        let mut config = family_config(&args.family);
        config["command"] = json!(command);
        config["classes"] = json!(args.classes);
        config["n"] = json!(ns);
        config["mode"] = json!(match args.mode {
            ModeChoice::Exact => "exact",
            ModeChoice::Mc => "mc",
        });
        if let (Some(samples), Some(seed)) = (samples, seed) {
            config["samples"] = json!(samples);
            config["seed"] = json!(seed);
        }
        Ok(moment_report(&family, config, &results, verdict))
    })
}

fn factor_labels<F: AmbientFamily>(family: &F, r: &MomentResult) -> Vec<String> {
    r.factors
        .iter()
        .flat_map(|(label, k)| std::iter::repeat_n(family.format_label(label), *k))
        .collect()
}

fn moment_report<F: AmbientFamily>(
    family: &F,
    config: Value,
    results: &[MomentResult],
    verdict: Verdict,
) -> Report {
    let mut entries = Vec::new();
    let mut rows = Vec::new();
    for r in results {
        let factors = factor_labels(family, r);
        let (value, cells) = match &r.value {
            MomentValue::Exact(v) => (
                json!({"num": v.numer().to_string(), "den": v.denom().to_string()}),
                [v.numer().to_string(), v.denom().to_string(), String::new(), String::new(), String::new()],
            ),
            MomentValue::MonteCarlo { mean, stderr, samples } => (
                json!({"mean": mean, "stderr": stderr, "samples": samples}),
                [String::new(), String::new(), mean.to_string(), stderr.to_string(), samples.to_string()],
            ),
        };
        entries.push(json!({
            "n": r.n,
            "mode": r.mode().name(),
            "value": value,
            "factors": factors,
        }));
        let mut row = vec![r.n.to_string(), r.mode().name().to_string()];
        row.extend(cells);
        row.push(factors.join(" * "));
        row.push(verdict.name().to_string());
        rows.push(row);
    }
    Report {
        json: json!({"config": config, "results": entries, "verdict": verdict.name()}),
        header: vec!["n", "mode", "num", "den", "mean", "stderr", "samples", "factors", "verdict"],
        rows,
        passed: true,
    }
}

fn classes(args: &ClassesArgs) -> Outcome<Report> {
    with_family!(&args.family, family => {
        let mut entries = Vec::new();
        let mut rows = Vec::new();
        for class in family.classes(args.d)?.iter() {
            let label = family.format_label(&class.label);
            let rep = family.format_element(&class.representative);
            entries.push(json!({
                "label": label,
                "size": class.size.to_string(),
                "representative": rep,
            }));
            rows.push(vec![label, class.size.to_string(), rep]);
        }
        let mut config = family_config(&args.family);
        config["command"] = json!("classes");
        config["d"] = json!(args.d);
        Ok(Report {
            json: json!({
                "config": config,
                "group_order": family.group_order(args.d).to_string(),
                "classes": entries,
            }),
            header: vec!["label", "size", "representative"],
            rows,
            passed: true,
        })
    })
}

fn expand(args: &ExpandArgs) -> Outcome<Report> {
    with_family!(&args.family, family => {
        let lhs = statistic(&family, &args.lhs)?;
        let rhs = statistic(&family, &args.rhs)?;
        let p = product_expand(&family, lhs.label(), rhs.label())?;
        let mut entries = Vec::new();
        let mut rows = Vec::new();
        for (label, c) in p.terms() {
            let label = family.format_label(label);
            entries.push(json!({
                "label": label,
                "numerator": c.numer().to_string(),
                "denominator": c.denom().to_string(),
            }));
            rows.push(vec![label, c.numer().to_string(), c.denom().to_string()]);
        }
        let mut config = family_config(&args.family);
        config["command"] = json!("expand");
        config["lhs"] = json!(args.lhs);
        config["rhs"] = json!(args.rhs);
        Ok(Report {
            json: json!({"config": config, "terms": entries}),
            header: vec!["label", "numerator", "denominator"],
            rows,
            passed: true,
        })
    })
}

fn verify(args: &VerifyArgs) -> Outcome<Report> {
    let outcomes: Vec<CriterionOutcome> = match args.criterion {
        Some(id) => vec![run(id, args.cap)
            .ok_or_else(|| Failure::Usage(format!("no criterion numbered {id}")))?],
        None => run_all(args.cap),
    };
    for o in &outcomes {
        let status = if o.passed { "PASS" } else { "FAIL" };
        eprintln!("{status} criterion {}: {}", o.id, o.name);
    }
    let passed = outcomes.iter().all(|o| o.passed);
    let entries: Vec<Value> = outcomes
        .iter()
        .map(|o| json!({"id": o.id, "name": o.name, "passed": o.passed, "detail": o.detail}))
        .collect();
    let rows = outcomes
        .iter()
        .map(|o| vec![o.id.to_string(), o.name.to_string(), o.passed.to_string(), o.detail.clone()])
        .collect();
    Ok(Report {
        json: json!({
            "config": {"command": "verify", "cap": args.cap, "criterion": args.criterion},
            "criteria": entries,
            "passed": passed,
        }),
        header: vec!["id", "name", "passed", "detail"],
        rows,
        passed,
    })
}
