//! `etl`: check frames for perfect recall, model-check formulas, sweep claims
//! over enumerated frames, and export figures.
//!
//! Exit status: 0 when everything requested holds, 1 when a requested
//! property, formula or claim fails, 2 on usage, input or guard errors.

mod dot;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use etl_core::document::{
    parse_frame, parse_valuation, write_document, write_valuation, FrameDocument, MorphismDocument,
};
use etl_core::fixtures;
use etl_core::logic::{self, parse_formula, spr_axiom, star_axiom, star_axiom_named, Formula};
use etl_core::oracle::{
    default_ceiling, verify_claims, write_reports, ClaimId, EnumBounds, RelationFilter, SweepOptions,
};
use etl_core::verdicts::{property_verdict, verdict_table, PROPERTY_NAMES};
use etl_core::{Frame, Valuation};

#[derive(Parser)]
#[command(name = "etl", version, about = "Perfect recall in epistemic temporal logic frames")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the property table of a frame document.
    Check {
        file: PathBuf,
        /// Properties that must hold, comma-separated.
        #[arg(long, value_delimiter = ',')]
        prop: Vec<String>,
    },
    /// Evaluate a formula on a frame.
    Mc(McArgs),
    /// Sweep claims over all frames within the bounds.
    Verify(VerifyArgs),
    /// Render a frame document as Graphviz DOT.
    Dot { file: PathBuf },
    /// List or emit the shipped figure fixtures.
    Fixtures {
        #[command(subcommand)]
        action: FixtureAction,
    },
}

#[derive(Args)]
struct McArgs {
    file: PathBuf,
    /// Formula text; omit when using --axiom.
    formula: Option<String>,
    /// `star`, `star:<event>` or `spr`.
    #[arg(long, conflicts_with = "formula")]
    axiom: Option<String>,
    /// Valuation document `{"p": ["e1", ...]}`; atoms default to false.
    #[arg(long, conflicts_with = "all_valuations")]
    valuation: Option<PathBuf>,
    /// Decide frame validity over every valuation of the formula's atoms.
    #[arg(long)]
    all_valuations: bool,
    /// Largest number of valuations tried.
    #[arg(long)]
    ceiling: Option<u64>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Claim keys (see `etl verify list`), or `all`.
    #[arg(required = true)]
    claims: Vec<String>,
    #[arg(long, default_value_t = 2)]
    max_events: usize,
    #[arg(long, default_value_t = 2)]
    max_depth: usize,
    #[arg(long, default_value_t = 4)]
    max_hist: usize,
    /// Largest number of trees per frame.
    #[arg(long, default_value_t = 2)]
    trees: usize,
    #[arg(long, conflicts_with = "introspective")]
    s5: bool,
    #[arg(long)]
    introspective: bool,
    /// Largest number of candidate frames; defaults to ETL_CEILING or 2^32.
    #[arg(long)]
    ceiling: Option<u64>,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Violations listed per claim.
    #[arg(long, default_value_t = 5)]
    max_listed: usize,
}

#[derive(Subcommand)]
enum FixtureAction {
    List,
    /// Print one fixture document.
    Emit {
        name: String,
    },
    /// Write every fixture document into a directory as `<name>.json`.
    Write {
        dir: PathBuf,
    },
}

/// Failure carried to `main`: message and exit code.
struct Failure(u8, String);

type Outcome = Result<bool, Failure>;

fn input(msg: impl std::fmt::Display) -> Failure {
    Failure(2, msg.to_string())
}

fn load(path: &Path) -> Result<Frame, Failure> {
    let text = fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))?;
    parse_frame(&text).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn check(file: &Path, props: &[String]) -> Outcome {
    let frame = load(file)?;
    if let Some(bad) = props.iter().find(|p| !PROPERTY_NAMES.contains(&p.as_str())) {
        return Err(input(format!(
            "unknown property `{bad}`; known: {}",
            PROPERTY_NAMES.join(", ")
        )));
    }
    let rows = if props.is_empty() {
        verdict_table(&frame)
    } else {
        props
            .iter()
            .map(|p| property_verdict(&frame, p).expect("name checked"))
            .collect()
    };
    let width = rows.iter().map(|v| v.name.len()).max().unwrap_or(0);
    for v in &rows {
        let verdict = if v.holds { "holds" } else { "fails" };
        match &v.witness {
            Some(w) => println!("{:width$}  {verdict}  {w}", v.name),
            None => println!("{:width$}  {verdict}", v.name),
        }
    }
    // the bare table is informational; only requested properties decide
    Ok(props.is_empty() || rows.iter().all(|v| v.holds))
}

fn axiom(name: &str, frame: &Frame) -> Result<Formula, Failure> {
    let alphabet = frame.alphabet();
    let f = match name.split_once(':') {
        None if name == "spr" => spr_axiom(alphabet),
        None if name == "star" => alphabet
            .ids()
            .map(|e| star_axiom(e, alphabet).expect("event of this alphabet"))
            .reduce(Formula::and)
            .unwrap_or(Formula::Bool(true)),
        Some(("star", e)) => star_axiom_named(e, alphabet).map_err(input)?,
        _ => return Err(input(format!("unknown axiom `{name}`; use star, star:<event> or spr"))),
    };
    Ok(f)
}

fn formula_error(text: &str, e: logic::ParseError) -> Failure {
    let caret = " ".repeat(e.position());
    input(format!("formula: {e}\n  {text}\n  {caret}^"))
}

fn mc(a: &McArgs) -> Outcome {
    let frame = load(&a.file)?;
    let formula = match (&a.formula, &a.axiom) {
        (Some(text), None) => parse_formula(text, frame.alphabet()).map_err(|e| formula_error(text, e))?,
        (None, Some(name)) => axiom(name, &frame)?,
        _ => return Err(input("give a formula or --axiom")),
    };
    println!("formula {}", formula.display(frame.alphabet()));
    if a.all_valuations {
        let limit = a.ceiling.unwrap_or_else(default_valuation_limit);
        let check = logic::valid_on_frame_with_limit(&frame, &formula, limit).map_err(input)?;
        println!("valuations {}", check.valuations_checked);
        println!("valid {}", check.valid);
        if let Some((v, h)) = &check.countermodel {
            println!("countermodel {} {}", frame.display(*h), write_valuation(v, &frame));
        }
        return Ok(check.valid);
    }
    let v = match &a.valuation {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))?;
            parse_valuation(&text, &frame).map_err(|e| input(format!("{}: {e}", path.display())))?
        }
        None => Valuation::new(),
    };
    let ext = logic::extension(&frame, &v, &formula);
    for h in frame.histories() {
        println!("{}  {}", frame.display(h), ext.contains(h));
    }
    let valid = ext.len() == frame.len();
    println!("valid {valid}");
    Ok(valid)
}

/// ETL_CEILING also bounds the valuation sweep when set.
fn default_valuation_limit() -> u64 {
    std::env::var("ETL_CEILING")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(logic::DEFAULT_VALUATION_LIMIT)
}

fn verify(a: &VerifyArgs) -> Outcome {
    if a.claims.len() == 1 && a.claims[0] == "list" {
        for c in ClaimId::all() {
            println!("{:9} {:34} {}", c.key(), c.slug(), c.statement());
        }
        return Ok(true);
    }
    let claims: Vec<ClaimId> = if a.claims.iter().any(|c| c == "all") {
        ClaimId::all().collect()
    } else {
        a.claims
            .iter()
            .map(|c| ClaimId::parse(c))
            .collect::<Result<_, _>>()
            .map_err(input)?
    };
    let filter = if a.s5 {
        RelationFilter::S5
    } else if a.introspective {
        RelationFilter::Introspective
    } else {
        RelationFilter::All
    };
    let bounds = EnumBounds {
        max_events: a.max_events,
        max_depth: a.max_depth,
        max_histories: a.max_hist,
        min_trees: 1,
        max_trees: a.trees,
        filter,
        ceiling: a.ceiling.unwrap_or_else(default_ceiling),
        constructive: true,
    };
    let options = SweepOptions {
        workers: a.workers,
        max_listed: a.max_listed,
        valuation_limit: a.ceiling.unwrap_or_else(default_valuation_limit),
    };
    let reports = verify_claims(&claims, &bounds, &options).map_err(input)?;
    print!("{}", write_reports(&reports));
    Ok(reports.iter().all(|r| r.passed()))
}

fn fixture_document(name: &str) -> Option<String> {
    if let Some(fx) = fixtures::find(name) {
        let mut doc = FrameDocument::of(&fx.frame());
        doc.expect = fx
            .expect
            .iter()
            .map(|&(p, b)| (p.to_string(), b))
            .collect::<BTreeMap<_, _>>();
        return Some(write_document(&doc));
    }
    let m = fixtures::morphisms().into_iter().find(|m| m.name == name)?;
    let doc = MorphismDocument {
        source: Some(m.source.to_string()),
        target: Some(m.target.to_string()),
        map: m.map.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
    };
    Some(doc.write())
}

fn fixture_names() -> Vec<(&'static str, String)> {
    let frames = fixtures::all().into_iter().map(|f| (f.name, f.description.to_string()));
    let maps = fixtures::morphisms()
        .into_iter()
        .map(|m| (m.name, format!("bounded morphism from {} onto {}", m.source, m.target)));
    frames.chain(maps).collect()
}

fn fixtures_cmd(action: &FixtureAction) -> Outcome {
    match action {
        FixtureAction::List => {
            for (name, description) in fixture_names() {
                println!("{name:14} {description}");
            }
        }
        FixtureAction::Emit { name } => {
            let doc = fixture_document(name).ok_or_else(|| input(format!("unknown fixture `{name}`")))?;
            print!("{doc}");
        }
        FixtureAction::Write { dir } => {
            fs::create_dir_all(dir).map_err(|e| input(format!("{}: {e}", dir.display())))?;
            for (name, _) in fixture_names() {
                let path = dir.join(format!("{name}.json"));
                fs::write(&path, fixture_document(name).expect("listed fixture"))
                    .map_err(|e| input(format!("{}: {e}", path.display())))?;
            }
        }
    }
    Ok(true)
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Check { file, prop } => check(file, prop),
        Command::Mc(a) => mc(a),
        Command::Verify(a) => verify(a),
        Command::Dot { file } => {
            print!("{}", dot::render(&load(file)?));
            Ok(true)
        }
        Command::Fixtures { action } => fixtures_cmd(action),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
