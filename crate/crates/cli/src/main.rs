//! `hpackets`: character tables, packet classifications, local verdicts and type computations.

mod verify;

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use heisenberg_packets::arith::is_prime;
use heisenberg_packets::char_theory::{column_sums, gram_matrix, irreducible_characters};
use heisenberg_packets::local::local_report;
use heisenberg_packets::packets::classify;
use heisenberg_packets::types::{derivative_type, is_speh_type, type_of};
use heisenberg_packets::{
    ClassFunction, Decomposition, FactorIrrep, FiniteGroup, FormalGL, GroupInvolution, InvolutionKind, LocalError,
    LocalPlace,
};
use num_traits::{One, Zero};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "hpackets", version, about = "Distinction computations on products of Heisenberg groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Character table summary with orthogonality checks.
    Irreps {
        #[command(flatten)]
        group: GroupArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Distinguished packets and period-vanishing tables.
    Classify {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long = "inv", value_enum)]
        involution: Involution,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Local verdicts at the given place types, against the global verdict.
    Local {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long = "inv", value_enum)]
        involution: Involution,
        /// Comma-separated list of place types.
        #[arg(long, value_enum, value_delimiter = ',', default_value = "all")]
        places: Vec<Place>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Type partition and derivative chain of a formal product, e.g. "Sp(3,d2) * Comp(2,t1,a)".
    Type {
        expression: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Randomized and exhaustive self-checks.
    Verify {
        #[arg(short = 'p', long = "primes", value_delimiter = ',', value_parser = parse_prime, default_value = "3,5")]
        primes: Vec<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of random principal-series instances.
        #[arg(long, default_value_t = 1000)]
        cases: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Args)]
struct GroupArgs {
    /// Comma-separated odd primes, one per Heisenberg factor.
    #[arg(short = 'p', long = "primes", value_delimiter = ',', value_parser = parse_prime, required = true)]
    primes: Vec<u64>,
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Write to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Involution {
    Trivial,
    Inversion,
    CentralFixing,
    Switching,
}

#[derive(Clone, Copy, ValueEnum)]
enum Place {
    All,
    Split,
    #[value(name = "Z")]
    Center,
    #[value(name = "L")]
    L,
    #[value(name = "Lp")]
    Lp,
    Trivial,
}

fn parse_prime(s: &str) -> Result<u64, String> {
    let p: u64 = s.trim().parse().map_err(|_| format!("'{s}' is not a number"))?;
    if p == 2 || !is_prime(p) {
        return Err(format!("{p} is not an odd prime"));
    }
    Ok(p)
}

enum Failure {
    Usage(String),
    Check(String),
}

type Outcome = Result<(), Failure>;

fn check<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Check(e.to_string())
}

fn emit<T: Serialize>(output: &OutputArgs, report: &T, rows: Vec<Vec<String>>, header: &[&str]) -> Outcome {
    let mut sink: Box<dyn Write> = match &output.out {
        Some(path) => Box::new(File::create(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?),
        None => Box::new(io::stdout().lock()),
    };
    let io_err = |e: &dyn std::fmt::Display| Failure::Usage(format!("write failed: {e}"));
    match output.format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut sink, report).map_err(|e| io_err(&e))?;
            writeln!(sink).map_err(|e| io_err(&e))?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(sink);
            w.write_record(header).map_err(|e| io_err(&e))?;
            for row in rows {
                w.write_record(&row).map_err(|e| io_err(&e))?;
            }
            w.flush().map_err(|e| io_err(&e))?;
        }
    }
    Ok(())
}

fn build_group(primes: &[u64]) -> Result<Arc<FiniteGroup>, Failure> {
    FiniteGroup::from_primes(primes).map(Arc::new).map_err(|e| Failure::Usage(e.to_string()))
}

fn build_involution(g: &Arc<FiniteGroup>, inv: Involution) -> Result<GroupInvolution, Failure> {
    let kind = match inv {
        Involution::Trivial => InvolutionKind::Trivial,
        Involution::Inversion => InvolutionKind::InversionType,
        Involution::CentralFixing => InvolutionKind::CentralFixing,
        Involution::Switching => InvolutionKind::Switching,
    };
    GroupInvolution::new(g, kind).map_err(|e| Failure::Usage(e.to_string()))
}

#[derive(Serialize)]
struct Count {
    value: u64,
    provenance: &'static str,
}

#[derive(Serialize)]
struct DegreeRow {
    degree: u64,
    count: u64,
}

#[derive(Serialize)]
struct IrrepsReport {
    group: String,
    order: Count,
    classes: Count,
    irreducibles: Count,
    degrees: Vec<DegreeRow>,
    degree_square_sum: Count,
    orthogonality: bool,
    column_orthogonality: bool,
    labels: Vec<String>,
}

fn factor_label(f: &FactorIrrep) -> String {
    match f {
        FactorIrrep::Linear { u, v } => format!("lin({u},{v})"),
        FactorIrrep::Regular { e } => format!("reg({e})"),
    }
}

fn cmd_irreps(group: &GroupArgs, output: &OutputArgs) -> Outcome {
    let g = build_group(&group.primes)?;
    let classes = g.classes();
    let irr = irreducible_characters(&g).map_err(check)?;
    let chars: Vec<ClassFunction> = irr.iter().map(|i| i.character.clone()).collect();
    let gram = gram_matrix(&chars).map_err(check)?;
    let orthogonality = gram
        .iter()
        .enumerate()
        .all(|(i, row)| row.iter().enumerate().all(|(j, v)| if i == j { v.is_one() } else { v.is_zero() }));
    let cols = column_sums(&chars).map_err(check)?;
    let column_orthogonality = cols.iter().enumerate().all(|(r, row)| {
        row.iter().enumerate().all(|(s, v)| {
            let expect = if r == s { (g.order() / classes.sizes[r]) as i64 } else { 0 };
            v.to_rational() == Some(num_rational::BigRational::from_integer(expect.into()))
        })
    });
    let mut degrees: Vec<DegreeRow> = Vec::new();
    let mut square_sum = 0u64;
    for c in &chars {
        let d = c.degree().to_rational().and_then(|d| d.to_integer().try_into().ok()).ok_or_else(|| {
            Failure::Check("non-integral degree".into())
        })?;
        square_sum += d * d;
        match degrees.iter_mut().find(|r| r.degree == d) {
            Some(r) => r.count += 1,
            None => degrees.push(DegreeRow { degree: d, count: 1 }),
        }
    }
    degrees.sort_by_key(|r| r.degree);
    let expected_classes: u64 = g.primes().iter().map(|p| p * p + p - 1).product();
    let report = IrrepsReport {
        group: g.name(),
        order: Count { value: g.order() as u64, provenance: "|G|=∏p_i³" },
        classes: Count { value: classes.len() as u64, provenance: "∏(p_i²+p_i−1)" },
        irreducibles: Count { value: irr.len() as u64, provenance: "number of conjugacy classes" },
        degrees,
        degree_square_sum: Count { value: square_sum, provenance: "Σχ(1)²=|G|" },
        orthogonality,
        column_orthogonality,
        labels: irr.iter().map(|i| i.label.iter().map(factor_label).collect::<Vec<_>>().join("x")).collect(),
    };
    let rows = irr
        .iter()
        .zip(&report.labels)
        .map(|(i, l)| vec![l.clone(), i.character.degree().to_rational().map(|d| d.to_string()).unwrap_or_default()])
        .collect();
    emit(output, &report, rows, &["label", "degree"])?;
    let ok = orthogonality
        && column_orthogonality
        && square_sum == g.order() as u64
        && classes.len() as u64 == expected_classes
        && irr.len() == classes.len();
    if ok {
        Ok(())
    } else {
        Err(Failure::Check("character table checks failed".into()))
    }
}

#[derive(Serialize)]
struct ClassifyReport {
    #[serde(flatten)]
    inner: heisenberg_packets::packets::ClassificationReport,
    packet_count: Count,
    distinguished_count: Count,
}

fn cmd_classify(group: &GroupArgs, inv: Involution, output: &OutputArgs) -> Outcome {
    let g = build_group(&group.primes)?;
    let sigma = build_involution(&g, inv)?;
    let inner = classify(&g, &sigma).map_err(check)?;
    let distinguished = inner.packets.iter().filter(|r| r.distinguished).count() as u64;
    let rows = inner
        .packets
        .iter()
        .map(|r| vec![r.label.to_string(), r.distinguished.to_string()])
        .collect();
    let report = ClassifyReport {
        packet_count: Count { value: inner.packets.len() as u64, provenance: "m(n)=∏(p_i−1)" },
        distinguished_count: Count {
            value: distinguished,
            provenance: "#{c : c(σ(z_i)) = c(z_i)^−1 for all i}",
        },
        inner,
    };
    if report.packet_count.value != report.inner.multiplicity {
        return Err(Failure::Check("packet count differs from multiplicity".into()));
    }
    emit(output, &report, rows, &["label", "distinguished"])
}

#[derive(Serialize)]
struct LocalCliReport {
    #[serde(flatten)]
    inner: heisenberg_packets::local::LocalReport,
    places: Vec<String>,
    contrast_count: Count,
    contrast: String,
}

fn expand_places(places: &[Place]) -> Vec<LocalPlace> {
    let mut out: Vec<LocalPlace> = Vec::new();
    for p in places {
        let add: Vec<LocalPlace> = match p {
            Place::All => LocalPlace::all(),
            Place::Split => vec![LocalPlace::split()],
            Place::Center => vec![LocalPlace::non_split(Decomposition::Center)],
            Place::L => vec![LocalPlace::non_split(Decomposition::LagrangianA0)],
            Place::Lp => vec![LocalPlace::non_split(Decomposition::LagrangianB0)],
            Place::Trivial => vec![LocalPlace::non_split(Decomposition::Trivial)],
        };
        for pl in add {
            if !out.contains(&pl) {
                out.push(pl);
            }
        }
    }
    out
}

fn cmd_local(group: &GroupArgs, inv: Involution, places: &[Place], output: &OutputArgs) -> Outcome {
    let g = build_group(&group.primes)?;
    let sigma = build_involution(&g, inv)?;
    let places = expand_places(places);
    let inner = local_report(&g, &sigma, &places).map_err(|e| match e {
        LocalError::Unsupported(_) | LocalError::NoPlaces => Failure::Usage(e.to_string()),
        other => check(other),
    })?;
    let contrasts = inner.labels.iter().filter(|l| l.contrast).count() as u64;
    let contrast = if contrasts > 0 {
        format!("{contrasts} packet(s) locally distinguished at every listed place but not distinguished")
    } else {
        "no packet is locally distinguished everywhere while failing to be distinguished".into()
    };
    let mut rows = Vec::new();
    for l in &inner.labels {
        for r in &l.places {
            let offsets: Vec<String> = r
                .offsets
                .iter()
                .map(|o| o.iter().map(i64::to_string).collect::<Vec<_>>().join(" "))
                .collect();
            rows.push(vec![
                l.label.to_string(),
                r.place.clone(),
                r.verdict.to_string(),
                offsets.join("; "),
                r.sigma_action.join("; "),
                l.packet_distinguished.to_string(),
            ]);
        }
    }
    let report = LocalCliReport {
        places: places.iter().map(|p| p.to_string()).collect(),
        contrast_count: Count {
            value: contrasts,
            provenance: "#{c : locally distinguished at every place, c(σ(z_i)) ≠ c(z_i)^−1}",
        },
        contrast,
        inner,
    };
    emit(
        output,
        &report,
        rows,
        &["label", "place", "verdict", "offsets", "sigma_action", "packet_distinguished"],
    )
}

#[derive(Serialize)]
struct ChainStep {
    k: usize,
    expression: String,
    partition: String,
}

#[derive(Serialize)]
struct SpehShape {
    r: u64,
    d: usize,
}

#[derive(Serialize)]
struct TypeReport {
    expression: String,
    size: u64,
    partition: Vec<u64>,
    partition_text: String,
    speh: Option<SpehShape>,
    chain: Vec<ChainStep>,
}

fn cmd_type(expression: &str, output: &OutputArgs) -> Outcome {
    let x: FormalGL = expression.parse().map_err(|e: heisenberg_packets::TypeError| Failure::Usage(e.to_string()))?;
    let t = type_of(&x).map_err(check)?;
    let mut chain = Vec::new();
    for k in 0..t.len() {
        let step = x.adduced_n(k).ok_or_else(|| Failure::Check(format!("adduced chain ended before step {k}")))?;
        let derived = derivative_type(&t, k).map_err(check)?;
        if type_of(&step).map_err(check)? != derived {
            return Err(Failure::Check(format!("derivative {k} disagrees with the adduced chain")));
        }
        chain.push(ChainStep {
            k,
            expression: step.to_string(),
            partition: derived.to_string(),
        });
    }
    let report = TypeReport {
        expression: x.to_string(),
        size: x.size(),
        partition: t.parts().to_vec(),
        partition_text: t.to_string(),
        speh: is_speh_type(&t).map(|(r, d)| SpehShape { r, d }),
        chain,
    };
    let rows = report.chain.iter().map(|s| vec![s.k.to_string(), s.expression.clone(), s.partition.clone()]).collect();
    emit(output, &report, rows, &["k", "expression", "partition"])
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Irreps { group, output } => cmd_irreps(&group, &output),
        Command::Classify { group, involution, output } => cmd_classify(&group, involution, &output),
        Command::Local { group, involution, places, output } => cmd_local(&group, involution, &places, &output),
        Command::Type { expression, output } => cmd_type(&expression, &output),
        Command::Verify { primes, seed, cases, output } => {
            let report = verify::run(&primes, seed, cases).map_err(|e| Failure::Usage(e.to_string()))?;
            let rows = report
                .checks
                .iter()
                .map(|c| vec![c.name.clone(), c.passed.to_string(), c.detail.clone()])
                .collect();
            emit(&output, &report, rows, &["check", "passed", "detail"])?;
            if report.checks.iter().all(|c| c.passed) {
                Ok(())
            } else {
                Err(Failure::Check("verification failed".into()))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("hpackets: check failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("hpackets: {msg}");
            ExitCode::from(2)
        }
    }
}
