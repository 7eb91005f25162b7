use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use zslen::verify::{self, Status, VerifySuite};
use zslen::{
    delta_rho_star_product, delta_rho_with, enumerate_atoms, fp_atoms, fp_length_set, local_profile, min_delta,
    scan_exceptional, transfer_obstruction, AbelianGroup, Engine, Error, FPMonoid, GSequence, LengthCalculator,
    ResourceConfig, ScanOptions, SupportSet,
};

#[derive(Parser)]
#[command(
    name = "zslen",
    version,
    about = "Factorization-length invariants of zero-sum sequence monoids"
)]
struct Cli {
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Maximal number of atoms per enumeration
    #[arg(long, global = true)]
    budget_atoms: Option<u64>,
    /// Maximal atom length explored
    #[arg(long, global = true)]
    budget_length: Option<u64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Tsv,
    Text,
}

#[derive(Subcommand)]
enum Cmd {
    /// Enumerate the atoms (minimal zero-sum sequences) over a support
    Atoms(SupportArgs),
    /// Set of lengths, distances and elasticity of one zero-sum sequence
    Lengths {
        #[arg(long)]
        group: String,
        /// e.g. "1^10,9^10"
        #[arg(long)]
        sequence: String,
    },
    /// Minimal distance of the monoid of zero-sum sequences over a support
    MinDelta(SupportArgs),
    /// Delta_rho and Delta_rho* of a group
    DeltaRho {
        #[arg(long)]
        group: String,
        /// Enumerate qualifying supports even when a closed form applies
        #[arg(long)]
        enumerate: bool,
    },
    /// Scan even n for cyclic groups with Delta_rho*(C_n) = {1, n-2}
    CfScan {
        #[arg(long, default_value_t = 8)]
        lo: u64,
        #[arg(long)]
        hi: u64,
        #[arg(long, value_enum, default_value_t = EngineArg::E2)]
        engine: EngineArg,
        #[arg(long, default_value_t = 1)]
        shards: usize,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Also report the smallest witness for every non-exceptional n
        #[arg(long)]
        witnesses: bool,
    },
    /// Finitely primary monoids in Z_q x N
    Fp(FpArgs),
    /// Run verification suites
    Verify {
        /// Suite names (default: all)
        suites: Vec<String>,
        #[arg(long)]
        all: bool,
        /// List the known suites and exit
        #[arg(long)]
        list: bool,
    },
}

#[derive(Args)]
struct SupportArgs {
    #[arg(long)]
    group: String,
    /// Comma-separated elements (default: the whole group)
    #[arg(long)]
    support: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    E1,
    E2,
    Both,
}

#[derive(Args)]
struct FpArgs {
    /// Order of the unit class group
    #[arg(long, default_value_t = 1)]
    q: u64,
    /// Generators as class:value pairs, e.g. "1:3,0:5"
    #[arg(long)]
    gens: Option<String>,
    #[command(subcommand)]
    cmd: FpCmd,
}

#[derive(Subcommand)]
enum FpCmd {
    /// rho, d and min Delta of the monoid
    Profile,
    /// Atoms, certified up to a value cap
    Atoms {
        #[arg(long)]
        cap: Option<u64>,
    },
    /// Set of lengths of one element class:value
    Lengths {
        #[arg(long)]
        element: String,
    },
    /// What local minimal distances rule out about a transfer group
    Obstruction {
        #[arg(long, value_delimiter = ',')]
        d: Vec<u64>,
    },
    /// Delta_rho* of a product of local factors with the given distances
    Product {
        #[arg(long, value_delimiter = ',')]
        d: Vec<u64>,
    },
}

/// Command result: a JSON document plus its text and TSV renderings.
struct Output {
    json: Value,
    text: String,
    tsv: String,
    status: Status,
}

impl Output {
    fn new(json: Value, text: String, tsv: String) -> Self {
        Output {
            json,
            text,
            tsv,
            status: Status::Pass,
        }
    }

    fn emit(&self, f: Format) {
        let s = match f {
            Format::Json => serde_json::to_string_pretty(&self.json).expect("serializable"),
            Format::Text => self.text.clone(),
            Format::Tsv => self.tsv.clone(),
        };
        // a closed pipe (e.g. `| head`) is not an error worth a panic
        let mut out = std::io::stdout().lock();
        let _ = writeln!(out, "{}", s.trim_end()).and_then(|_| out.flush());
    }
}

fn jset<'a>(it: impl IntoIterator<Item = &'a u64>) -> Value {
    let v: Vec<u64> = it.into_iter().copied().collect();
    if v.is_empty() {
        json!("empty")
    } else {
        json!(v)
    }
}

fn tset<'a>(it: impl IntoIterator<Item = &'a u64>) -> String {
    let v: Vec<String> = it.into_iter().map(u64::to_string).collect();
    if v.is_empty() {
        "empty".into()
    } else {
        v.join(",")
    }
}

fn tsv_of(obj: &Map<String, Value>) -> String {
    obj.iter()
        .map(|(k, v)| {
            let v = match v {
                Value::Array(a) => a
                    .iter()
                    .map(|x| x.to_string().trim_matches('"').to_string())
                    .collect::<Vec<_>>()
                    .join(","),
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            format!("{k}\t{v}\n")
        })
        .collect()
}

fn object(json: Value) -> Output {
    let tsv = tsv_of(json.as_object().expect("object"));
    let text = serde_json::to_string(&json).expect("serializable");
    Output::new(json, text, tsv)
}

fn parse_group(s: &str) -> zslen::Result<AbelianGroup> {
    s.parse()
}

fn support_of(args: &SupportArgs) -> zslen::Result<SupportSet> {
    let g = parse_group(&args.group)?;
    match &args.support {
        Some(s) => SupportSet::parse(&g, s),
        None => Ok(SupportSet::full(&g)),
    }
}

fn parse_fp_element(s: &str) -> zslen::Result<(u64, u64)> {
    let bad = || Error::Parse(format!("element {s:?} is not class:value"));
    let (c, v) = s.split_once(':').ok_or_else(bad)?;
    Ok((
        c.trim().parse().map_err(|_| bad())?,
        v.trim().parse().map_err(|_| bad())?,
    ))
}

fn fp_monoid(a: &FpArgs) -> zslen::Result<FPMonoid> {
    let gens = a
        .gens
        .as_deref()
        .ok_or_else(|| Error::Precondition("--gens is required for this fp command".into()))?;
    FPMonoid::parse(a.q, gens)
}

fn run(cmd: &Cmd, budget: &ResourceConfig) -> zslen::Result<Output> {
    match cmd {
        Cmd::Atoms(a) => {
            let s = support_of(a)?;
            let set = enumerate_atoms(&s, budget)?;
            let atoms: Vec<String> = set.atoms().iter().map(|x| x.format(&s)).collect();
            let summary = json!({ "count": set.len(), "davenport": set.davenport() });
            let text = atoms.iter().map(|x| format!("{x}\n")).collect::<String>() + &summary.to_string();
            let tsv = set
                .atoms()
                .iter()
                .zip(&atoms)
                .map(|(x, f)| format!("{}\t{f}\n", x.len()))
                .collect();
            let mut json = summary;
            json["atoms"] = json!(atoms);
            Ok(Output::new(json, text, tsv))
        }
        Cmd::Lengths { group, sequence } => {
            let g = parse_group(group)?;
            let elems = zslen::sequence::split_top_level(sequence)
                .into_iter()
                .map(|t| g.parse_element(t.rsplit_once('^').map_or(t, |(e, _)| e)))
                .collect::<zslen::Result<Vec<_>>>()?;
            let s = SupportSet::new(&g, elems)?;
            let b = GSequence::parse(&s, sequence)?;
            if !b.is_zero_sum(&s) {
                return Err(Error::NotZeroSum);
            }
            let atoms = enumerate_atoms(&s, budget)?;
            let l = LengthCalculator::new(s.len(), atoms.atoms(), budget.max_memo).lengths(&b)?;
            let rho = l.rho();
            let delta: std::collections::BTreeSet<u64> = l.deltas().into_iter().collect();
            Ok(object(json!({
                "L": jset(l.values()),
                "delta": jset(&delta),
                "rho": rho.to_string(),
            })))
        }
        Cmd::MinDelta(a) => {
            let v = min_delta(&support_of(a)?, budget)?;
            let text = v.map_or("empty".into(), |x| x.to_string());
            let json = v.map_or(json!("empty"), |x| json!(x));
            Ok(Output::new(
                json!({ "min_delta": json }),
                text.clone(),
                format!("min_delta\t{text}\n"),
            ))
        }
        Cmd::DeltaRho { group, enumerate } => {
            let g = parse_group(group)?;
            let r = delta_rho_with(&g, budget, *enumerate)?;
            let mut obj = Map::new();
            obj.insert("star".into(), jset(&r.delta_rho_star));
            obj.insert("exact".into(), r.exact.as_ref().map_or(Value::Null, jset));
            obj.insert("upper".into(), jset(&r.upper));
            obj.insert("provenance".into(), json!(r.provenance.as_str()));
            obj.insert("enumerated".into(), json!(r.star_enumerated));
            if let Some(c) = &r.conjectured {
                obj.insert("conjectured".into(), jset(c));
            }
            Ok(object(Value::Object(obj)))
        }
        Cmd::CfScan {
            lo,
            hi,
            engine,
            shards,
            checkpoint,
            witnesses,
        } => {
            let opts = ScanOptions {
                engine: match engine {
                    EngineArg::E1 => Engine::E1,
                    EngineArg::E2 => Engine::E2,
                    EngineArg::Both => Engine::Both,
                },
                shards: *shards,
                checkpoint: checkpoint.clone(),
                witnesses: *witnesses,
            };
            let r = scan_exceptional(*lo, *hi, &opts)?;
            let mut summary = json!({
                "lo": r.lo,
                "hi": r.hi,
                "count": r.exceptional.len(),
                "resumed_shards": r.resumed_shards,
            });
            let text = r.exceptional.iter().map(|n| format!("{n}\n")).collect::<String>() + &summary.to_string();
            let mut tsv: String = r.exceptional.iter().map(|n| format!("{n}\texceptional\n")).collect();
            for (n, a) in &r.witnesses {
                tsv.push_str(&format!("{n}\t{a}\n"));
            }
            summary["exceptional"] = json!(r.exceptional);
            if *witnesses {
                summary["witnesses"] = json!(r.witnesses);
            }
            Ok(Output::new(summary, text, tsv))
        }
        Cmd::Fp(a) => match &a.cmd {
            FpCmd::Profile => {
                let p = local_profile(&fp_monoid(a)?)?;
                Ok(object(json!({
                    "rho": p.rho.to_string(),
                    "d": p.d,
                    "minDelta": p.min_delta.map_or(json!("empty"), |x| json!(x)),
                    "accepted": p.accepted,
                })))
            }
            FpCmd::Atoms { cap } => {
                let m = fp_monoid(a)?;
                let cap = cap.unwrap_or_else(|| 2 * m.generators().iter().map(|g| g.1).max().unwrap_or(0));
                let atoms = fp_atoms(&m, cap)?;
                let text = atoms.iter().map(|(c, v)| format!("{c}:{v}\n")).collect::<String>();
                let tsv = atoms.iter().map(|(c, v)| format!("{c}\t{v}\n")).collect();
                let json = json!({ "atoms": atoms.iter().map(|(c, v)| format!("{c}:{v}")).collect::<Vec<_>>() });
                Ok(Output::new(json, text, tsv))
            }
            FpCmd::Lengths { element } => {
                let l = fp_length_set(&fp_monoid(a)?, parse_fp_element(element)?)?;
                Ok(object(json!({ "L": jset(l.values()) })))
            }
            FpCmd::Obstruction { d } => {
                let r = transfer_obstruction(d)?;
                let text = r.conclusions.iter().map(|c| format!("{c}\n")).collect::<String>();
                let json = serde_json::to_value(&r).expect("serializable");
                let tsv = tsv_of(json.as_object().expect("object"));
                let text = if text.is_empty() { "no obstruction".into() } else { text };
                Ok(Output::new(json, text, tsv))
            }
            FpCmd::Product { d } => {
                let s = delta_rho_star_product(d)?;
                Ok(Output::new(
                    json!({ "star": jset(&s) }),
                    verify::fmt_set(&s),
                    format!("star\t{}\n", tset(&s)),
                ))
            }
        },
        Cmd::Verify { suites, all, list } => {
            if *list {
                let names = verify::SUITE_NAMES.join("\n");
                return Ok(Output::new(json!(verify::SUITE_NAMES), names.clone(), names));
            }
            let names: Vec<String> = if *all || suites.is_empty() {
                verify::SUITE_NAMES.iter().map(|s| s.to_string()).collect()
            } else {
                suites.clone()
            };
            let reports = names
                .iter()
                .map(|n| verify::run_suite(n, budget))
                .collect::<zslen::Result<Vec<VerifySuite>>>()?;
            Ok(verify_output(&reports))
        }
    }
}

fn verify_output(reports: &[VerifySuite]) -> Output {
    let mut text = String::new();
    let mut tsv = String::from("suite\tindex\tstatus\tdescription\texpected\tcomputed\n");
    for r in reports {
        text.push_str(&format!(
            "{}: {} ({} pass, {} fail, {} skip)\n",
            r.name,
            r.status().as_str(),
            r.count(Status::Pass),
            r.count(Status::Fail),
            r.count(Status::Skip)
        ));
        for (i, c) in r.checks.iter().enumerate() {
            text.push_str(&format!("  [{}] {}: {}", c.status.as_str(), i, c.description));
            if c.status != Status::Pass {
                text.push_str(&format!(" (expected {}, computed {})", c.expected, c.computed));
            }
            text.push('\n');
            tsv.push_str(&format!(
                "{}\t{i}\t{}\t{}\t{}\t{}\n",
                r.name,
                c.status.as_str(),
                c.description,
                c.expected,
                c.computed
            ));
        }
    }
    let status = reports.iter().map(VerifySuite::status).max().unwrap_or(Status::Pass);
    Output {
        json: serde_json::to_value(reports).expect("serializable"),
        text,
        tsv,
        status,
    }
}

fn exit_for_error(e: &Error) -> u8 {
    match e {
        Error::Budget { .. } => 3,
        Error::Parse(_)
        | Error::InvalidGroup(_)
        | Error::InvalidElement(_)
        | Error::RankMismatch { .. }
        | Error::Precondition(_)
        | Error::NotCoprime { .. }
        | Error::NotZeroSum
        | Error::CapTooSmall { .. } => 2,
        _ => 1,
    }
}

fn budget_for(cli: &Cli) -> zslen::Result<ResourceConfig> {
    let mut b = ResourceConfig::from_env()?;
    if let Some(a) = cli.budget_atoms {
        b.max_atoms = a;
    }
    if let Some(l) = cli.budget_length {
        b.max_length = Some(l);
    }
    Ok(b)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(w) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(w).build_global() {
            eprintln!("zslen: cannot start {w} workers: {e}");
            return ExitCode::from(2);
        }
    }
    let result = budget_for(&cli).and_then(|b| run(&cli.cmd, &b));
    match result {
        Ok(out) => {
            out.emit(cli.format);
            ExitCode::from(match out.status {
                Status::Pass => 0,
                Status::Fail => 1,
                Status::Skip => 3,
            })
        }
        Err(e) => {
            eprintln!("zslen: {e}");
            ExitCode::from(exit_for_error(&e))
        }
    }
}
