//! Command-line front end: build simplicial sets from combinatorial input,
//! run Segal checks, compute Hall algebra tables, and exercise the
//! S-construction round trips.
//!
//! Exit codes: 0 when every requested property holds, 1 when a property
//! check fails (a witness is emitted), 2 on malformed input.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use segal::checks::{path_space_criterion, segal1_check, segal2_check};
use segal::double_category::{
    counit_comparison, p_construction, s_construction, unit_comparison, DoubleCategory,
};
use segal::graph::{graph_simplicial_set, Multigraph};
use segal::hall::HallAlgebra;
use segal::nerve::{nerve_of_partial_monoid, PartialMonoid};
use segal::tree::{tree_simplicial_set, RootedTree};
use segal::{SegalError, TruncatedSimplicialSet};

const DEFAULT_TRUNCATION: usize = 5;

#[derive(Parser)]
#[command(
    name = "segal",
    about = "Simplicial sets from combinatorial data: Segal checks, Hall algebras, S-construction",
    version
)]
struct Cli {
    /// Render reports as text instead of JSON
    #[arg(long, global = true)]
    human: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BuildKind {
    Graph,
    Tree,
    Monoid,
    PartialMonoid,
    DoubleCat,
    Simplex,
    Spine,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TableFormat {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Law {
    Assoc,
    Unital,
    Comm,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RoundtripKind {
    DoubleCat,
    Sset,
}

#[derive(Subcommand)]
enum Command {
    /// Build a truncated simplicial set and emit it as JSON
    Build {
        /// What the input file describes
        #[arg(long)]
        kind: BuildKind,
        /// Input JSON file (not used for simplex/spine)
        input: Option<PathBuf>,
        /// Dimension parameter for --kind simplex/spine
        #[arg(long)]
        n: Option<usize>,
        /// Truncation level (default 5; SEGAL_MAX_LEVEL overrides)
        #[arg(long)]
        truncate: Option<usize>,
        /// Write the result here instead of stdout
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run a check against a simplicial-set JSON file
    Check {
        input: PathBuf,
        /// Check the simplicial identities
        #[arg(long)]
        validate: bool,
        /// Check the 1-Segal condition at levels 2..=N
        #[arg(long = "1-segal")]
        one_segal: bool,
        /// Check the 2-Segal condition at levels 3..=N
        #[arg(long = "2-segal")]
        two_segal: bool,
        /// Compare the 2-Segal verdict against both path spaces
        #[arg(long = "path-criterion")]
        path_criterion: bool,
    },
    /// Compute the Hall algebra of a reduced 2-Segal set
    Hall {
        input: PathBuf,
        /// Multiplication table format embedded in the report
        #[arg(long, value_enum, default_value_t = TableFormat::Json)]
        table: TableFormat,
        /// Laws to verify (comma separated)
        #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Law::Assoc, Law::Unital])]
        laws: Vec<Law>,
        /// Skip the 2-Segal precheck
        #[arg(long)]
        skip_segal_check: bool,
        /// Write the report here instead of stdout
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Apply the S-construction to a pointed stable double category
    Sconstruct {
        input: PathBuf,
        #[arg(long)]
        truncate: Option<usize>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Extract the double category of a 2-Segal set
    Pconstruct {
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Verify an S/P round trip
    Roundtrip {
        /// double-cat: D vs P(S(D)); sset: X vs S(P(X))
        #[arg(long)]
        kind: RoundtripKind,
        input: PathBuf,
    },
}

/// Input problems exit with code 2; property failures return `Ok(1)` after
/// printing their witness.
enum CliError {
    Input(String),
}

impl From<SegalError> for CliError {
    fn from(e: SegalError) -> Self {
        CliError::Input(e.to_string())
    }
}

type CliResult = Result<i32, CliError>;

fn main() {
    let cli = Cli::parse();
    let human = cli.human;
    let code = match run(cli.command, human) {
        Ok(code) => code,
        Err(CliError::Input(message)) => {
            eprintln!("error: {message}");
            2
        }
    };
    std::process::exit(code);
}

fn read_json(path: &Path) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn read_sset(path: &Path) -> Result<TruncatedSimplicialSet, CliError> {
    Ok(TruncatedSimplicialSet::from_json(&read_json(path)?)?)
}

fn truncation(flag: Option<usize>) -> Result<usize, CliError> {
    if let Some(n) = flag {
        return Ok(n);
    }
    match std::env::var("SEGAL_MAX_LEVEL") {
        Ok(value) => value.parse().map_err(|_| {
            CliError::Input(format!("SEGAL_MAX_LEVEL={value} is not a number"))
        }),
        Err(_) => Ok(DEFAULT_TRUNCATION),
    }
}

fn emit(value: &Value, output: Option<&Path>) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("reports serialize");
    match output {
        Some(path) => std::fs::write(path, text + "\n")
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn run(command: Command, human: bool) -> CliResult {
    match command {
        Command::Build {
            kind,
            input,
            n,
            truncate,
            output,
        } => cmd_build(kind, input, n, truncate, output),
        Command::Check {
            input,
            validate,
            one_segal,
            two_segal,
            path_criterion,
        } => cmd_check(&input, validate, one_segal, two_segal, path_criterion, human),
        Command::Hall {
            input,
            table,
            laws,
            skip_segal_check,
            output,
        } => cmd_hall(&input, table, &laws, skip_segal_check, output, human),
        Command::Sconstruct {
            input,
            truncate,
            output,
        } => {
            let d = DoubleCategory::from_json(&read_json(&input)?)?;
            let s = s_construction(&d, truncation(truncate)?)?;
            emit(&s.to_json(), output.as_deref())?;
            Ok(0)
        }
        Command::Pconstruct { input, output } => cmd_pconstruct(&input, output),
        Command::Roundtrip { kind, input } => cmd_roundtrip(kind, &input, human),
    }
}

fn cmd_build(
    kind: BuildKind,
    input: Option<PathBuf>,
    n: Option<usize>,
    truncate: Option<usize>,
    output: Option<PathBuf>,
) -> CliResult {
    let level = truncation(truncate)?;
    let need_input = || {
        input
            .clone()
            .ok_or_else(|| CliError::Input("this kind needs an input file".into()))
    };
    let set = match kind {
        BuildKind::Graph => {
            let g = Multigraph::from_json(&read_json(&need_input()?)?)?;
            graph_simplicial_set(&g, level)?
        }
        BuildKind::Tree => {
            let t = RootedTree::from_json(&read_json(&need_input()?)?)?;
            tree_simplicial_set(&t, level)?
        }
        BuildKind::Monoid | BuildKind::PartialMonoid => {
            let m = PartialMonoid::from_json(&read_json(&need_input()?)?)?;
            if kind == BuildKind::Monoid && !m.is_total() {
                return Err(CliError::Input(
                    "monoid input has undefined products; use --kind partial-monoid".into(),
                ));
            }
            nerve_of_partial_monoid(&m, level)?
        }
        BuildKind::DoubleCat => {
            let d = DoubleCategory::from_json(&read_json(&need_input()?)?)?;
            s_construction(&d, level)?
        }
        BuildKind::Simplex => {
            let n = n.ok_or_else(|| CliError::Input("--kind simplex needs --n".into()))?;
            TruncatedSimplicialSet::standard_simplex(n, level)
        }
        BuildKind::Spine => {
            let n = n.ok_or_else(|| CliError::Input("--kind spine needs --n".into()))?;
            TruncatedSimplicialSet::spine(n, level)?
        }
    };
    emit(&set.to_json(), output.as_deref())?;
    Ok(0)
}

fn render_check(report: &Value, human: bool) {
    if human {
        let check = report["check"].as_str().unwrap_or("?");
        let verdict = report["verdict"].as_str().unwrap_or("?");
        let levels = &report["levels"];
        println!("{check} at levels {levels}: {verdict}");
        if let Some(witness) = report.get("witness").filter(|w| !w.is_null()) {
            println!("witness: {witness}");
        }
    } else {
        println!("{}", serde_json::to_string_pretty(report).expect("reports serialize"));
    }
}

fn cmd_check(
    input: &Path,
    validate: bool,
    one_segal: bool,
    two_segal: bool,
    path_criterion: bool,
    human: bool,
) -> CliResult {
    let selected = [validate, one_segal, two_segal, path_criterion]
        .iter()
        .filter(|&&b| b)
        .count();
    if selected != 1 {
        return Err(CliError::Input(
            "select exactly one of --validate, --1-segal, --2-segal, --path-criterion".into(),
        ));
    }
    let set = read_sset(input)?;
    let report = if validate {
        let outcome = set.validate();
        json!({
            "check": "validate",
            "levels": (0..=set.truncation()).collect::<Vec<_>>(),
            "verdict": if outcome.passed() { "pass" } else { "fail" },
            "witness": outcome.violations.first(),
        })
    } else if one_segal {
        segal1_check(&set).to_json()
    } else if two_segal {
        if set.truncation() < 3 {
            return Err(CliError::Input(format!(
                "2-Segal checks need truncation >= 3, input has {}",
                set.truncation()
            )));
        }
        segal2_check(&set).to_json()
    } else {
        path_space_criterion(&set)?.to_json()
    };
    render_check(&report, human);
    Ok(if report["verdict"] == "pass" { 0 } else { 1 })
}

fn cmd_hall(
    input: &Path,
    table: TableFormat,
    laws: &[Law],
    skip_segal_check: bool,
    output: Option<PathBuf>,
    human: bool,
) -> CliResult {
    let set = read_sset(input)?;
    if !set.is_reduced() {
        return Err(CliError::Input(format!(
            "Hall algebras need a reduced simplicial set; this one has {} zero-simplices",
            set.level_size(0)
        )));
    }
    if !skip_segal_check {
        let precheck = segal2_check(&set);
        if !precheck.passed() {
            let report = json!({
                "hall": null,
                "precheck": precheck.to_json(),
            });
            if human {
                println!("2-Segal precheck failed; no Hall algebra computed");
                render_check(&precheck.to_json(), true);
            } else {
                emit(&report, output.as_deref())?;
            }
            return Ok(1);
        }
    }
    let algebra = HallAlgebra::from_simplicial_set(&set)?;
    let table_value = match table {
        TableFormat::Json => algebra.to_json(),
        TableFormat::Csv => Value::String(algebra.table_csv()),
        TableFormat::Text => Value::String(algebra.table_text()),
    };
    let mut law_report = serde_json::Map::new();
    let mut all_pass = true;
    for law in laws {
        let (name, verdict) = match law {
            Law::Assoc => (
                "assoc",
                algebra.check_associative().map(|(x, y, z)| {
                    json!([algebra.basis()[x], algebra.basis()[y], algebra.basis()[z]])
                }),
            ),
            Law::Unital => (
                "unital",
                algebra
                    .check_unital()
                    .map(|x| json!([algebra.basis()[x]])),
            ),
            Law::Comm => (
                "comm",
                algebra
                    .check_commutative()
                    .map(|(x, y)| json!([algebra.basis()[x], algebra.basis()[y]])),
            ),
        };
        all_pass &= verdict.is_none();
        law_report.insert(
            name.into(),
            json!({
                "verdict": if verdict.is_none() { "pass" } else { "fail" },
                "witness": verdict,
            }),
        );
    }
    let report = json!({
        "dimension": algebra.dimension(),
        "unit": algebra.basis()[algebra.unit_index()],
        "table": table_value,
        "laws": law_report,
    });
    if human {
        println!("Hall algebra of dimension {}", algebra.dimension());
        match table {
            TableFormat::Csv => print!("{}", algebra.table_csv()),
            _ => print!("{}", algebra.table_text()),
        }
        for (name, entry) in report["laws"].as_object().unwrap() {
            println!("law {name}: {}", entry["verdict"].as_str().unwrap());
            if !entry["witness"].is_null() {
                println!("  witness: {}", entry["witness"]);
            }
        }
    } else {
        emit(&report, output.as_deref())?;
    }
    Ok(if all_pass { 0 } else { 1 })
}

fn cmd_pconstruct(input: &Path, output: Option<PathBuf>) -> CliResult {
    let set = read_sset(input)?;
    match p_construction(&set) {
        Ok(d) => {
            emit(&d.to_json(), output.as_deref())?;
            Ok(0)
        }
        Err(SegalError::BijectionFailed { map, reason }) => {
            // the input is structurally fine but fails the 2-Segal property
            println!(
                "{}",
                json!({
                    "verdict": "fail",
                    "bijection": map,
                    "witness": reason,
                })
            );
            Ok(1)
        }
        Err(e) => Err(e.into()),
    }
}

fn cmd_roundtrip(kind: RoundtripKind, input: &Path, human: bool) -> CliResult {
    let (report, pass) = match kind {
        RoundtripKind::DoubleCat => {
            let d = DoubleCategory::from_json(&read_json(input)?)?;
            match counit_comparison(&d) {
                Ok(counit) => (
                    json!({
                        "roundtrip": "double-cat",
                        "verdict": "pass",
                        "objects": counit.object_map.len(),
                        "hor": counit.hor_map.len(),
                        "ver": counit.ver_map.len(),
                        "squares": counit.square_map.len(),
                    }),
                    true,
                ),
                Err(SegalError::BijectionFailed { map, reason }) => (
                    json!({
                        "roundtrip": "double-cat",
                        "verdict": "fail",
                        "bijection": map,
                        "witness": reason,
                    }),
                    false,
                ),
                Err(e) => return Err(e.into()),
            }
        }
        RoundtripKind::Sset => {
            let set = read_sset(input)?;
            match unit_comparison(&set) {
                Ok(unit) => (
                    json!({
                        "roundtrip": "sset",
                        "verdict": "pass",
                        "levels": (0..=set.truncation()).collect::<Vec<_>>(),
                        "level_sizes": unit.s_of_p.level_sizes(),
                    }),
                    true,
                ),
                Err(SegalError::BijectionFailed { map, reason }) => (
                    json!({
                        "roundtrip": "sset",
                        "verdict": "fail",
                        "bijection": map,
                        "witness": reason,
                    }),
                    false,
                ),
                Err(e) => return Err(e.into()),
            }
        }
    };
    if human {
        println!(
            "roundtrip {}: {}",
            report["roundtrip"].as_str().unwrap(),
            report["verdict"].as_str().unwrap()
        );
        if !pass {
            println!("witness: {}", report["witness"]);
        }
    } else {
        println!("{}", serde_json::to_string_pretty(&report).expect("reports serialize"));
    }
    Ok(if pass { 0 } else { 1 })
}
