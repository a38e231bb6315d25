//! `spectral-switch`: build scheme graphs, switch them, and certify cospectral mates.
//!
//! Exit codes: 0 success, 1 usage error, 2 invalid input or switching spec,
//! 3 inconclusive (verdict not reached or not distinguished), 4 resource cap.

mod input;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;
use spectral_switch::certify::{nonisomorphic, NonIsoVerdict, Outcome, DEFAULT_NODE_BUDGET};
use spectral_switch::families::{
    recipe_halfrange_2kk, recipe_j2n4, recipe_qkneser, recipe_sporadic, run_recipe, RunOptions, REPORT_SCHEMA_VERSION,
};
use spectral_switch::graph::{encode_graph6, Graph};
use spectral_switch::schemes::{Scheme, SchemeParams};
use spectral_switch::search::{partition_pattern, search_gm4, search_wqh33, star_pattern, SearchConfig, SearchMode};
use spectral_switch::spectra::{
    coefficient_hash, cospectral, eigenvalues_float, primes_from_seed, charpoly_mod_p, CospectralVerdict,
    DEFAULT_NUM_PRIMES, DEFAULT_SEED,
};
use spectral_switch::switching::ValidationReport;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Invalid(String),
    Inconclusive(String),
    Cap(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Invalid(_) => 2,
            CliError::Inconclusive(_) => 3,
            CliError::Cap(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Invalid(m) | CliError::Inconclusive(m) | CliError::Cap(m) => m,
        }
    }
}

impl From<spectral_switch::Error> for CliError {
    fn from(e: spectral_switch::Error) -> Self {
        match e.root() {
            spectral_switch::Error::CapExceeded { .. } => CliError::Cap(e.to_string()),
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "spectral-switch", version, about = "Cospectral mates in the Johnson and Grassmann schemes")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a generalized Johnson or Grassmann graph.
    Build(BuildArgs),
    /// Validate a switching spec and write the switched graph.
    Switch(SwitchArgs),
    /// Validate, switch, and certify a cospectral mate.
    Verify(VerifyArgs),
    /// Run a named construction end to end.
    Recipe(RecipeArgs),
    /// Search for switching sets.
    Search(SearchArgs),
    /// Characteristic polynomial fingerprints and optional eigenvalues.
    Spectrum(SpectrumArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Graph6,
    Json,
}

#[derive(Args)]
struct BuildArgs {
    /// Scheme parameters, e.g. `J{2}(8,4)` or `Jq{0}(4,2;q=2)`.
    params: String,
    #[arg(long, value_enum, default_value = "graph6")]
    format: Format,
    /// Output file; nothing is written when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SpectralArgs {
    /// Number of random primes for the charpoly comparison.
    #[arg(long, default_value_t = DEFAULT_NUM_PRIMES)]
    primes: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Args)]
struct SwitchArgs {
    /// Scheme parameters or a graph6 / edge-list JSON file.
    #[arg(long)]
    graph: String,
    /// Switching spec JSON.
    #[arg(long)]
    spec: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "graph6")]
    format: Format,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    graph: String,
    #[arg(long)]
    spec: PathBuf,
    #[command(flatten)]
    spectral: SpectralArgs,
    /// Search-tree node budget for canonical labeling.
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    node_budget: u64,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum RecipeName {
    J2n4,
    Halfrange,
    Qkneser,
    Sporadic,
}

#[derive(Args)]
struct RecipeArgs {
    #[arg(value_enum)]
    recipe: RecipeName,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    /// Sporadic recipe name: J1-11-4, J24-10-5 or J24-12-6.
    #[arg(long)]
    name: Option<String>,
    #[command(flatten)]
    spectral: SpectralArgs,
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    node_budget: u64,
    #[arg(long)]
    report: Option<PathBuf>,
    /// Directory for graph6 files of the graph and its mate.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Pattern {
    Partition,
    Star,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long, value_enum)]
    mode: Mode,
    #[arg(long)]
    graph: String,
    /// Maximum number of candidates examined.
    #[arg(long, default_value_t = u64::MAX)]
    limit: u64,
    /// Time budget in seconds.
    #[arg(long, default_value_t = 600.0)]
    budget: f64,
    /// Drop identity switches and keep one spec per mate isomorphism class.
    #[arg(long)]
    dedup: bool,
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    node_budget: u64,
    /// wqh33: JSON list of candidate sets (indices or labels).
    #[arg(long)]
    candidates: Option<PathBuf>,
    /// wqh33: second candidate list; defaults to the first.
    #[arg(long)]
    candidates2: Option<PathBuf>,
    /// wqh33: generate candidates on a Johnson scheme instead of reading them.
    #[arg(long, value_enum)]
    pattern: Option<Pattern>,
    /// Ground elements for the pattern, e.g. `1-9`.
    #[arg(long)]
    ground: Option<String>,
    /// Partition pattern: elements appended to each block, e.g. `10,11`.
    #[arg(long)]
    extras: Option<String>,
    /// Star pattern: number of sets per candidate.
    #[arg(long, default_value_t = 3)]
    pool: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Gm4,
    Wqh33,
}

#[derive(Args)]
struct SpectrumArgs {
    #[arg(long)]
    graph: String,
    /// Second graph to compare against.
    #[arg(long)]
    against: Option<String>,
    #[command(flatten)]
    spectral: SpectralArgs,
    /// Also print floating-point eigenvalues.
    #[arg(long)]
    eigenvalues: bool,
    #[arg(long)]
    report: Option<PathBuf>,
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Usage(e.to_string()))?;
    fs::write(path, text + "\n").map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))
}

fn write_graph(path: &Path, g: &Graph, format: Format) -> Result<(), CliError> {
    let bytes = match format {
        Format::Graph6 => {
            let mut b = encode_graph6(g)?;
            b.push(b'\n');
            b
        }
        Format::Json => {
            let text = serde_json::to_string(&g.to_edge_list()).map_err(|e| CliError::Usage(e.to_string()))?;
            text.into_bytes()
        }
    };
    fs::write(path, bytes).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))
}

fn degree_text(g: &Graph) -> String {
    match g.regular_degree() {
        Some(d) => format!("k-regular={d}"),
        None => "irregular".into(),
    }
}

fn cmd_build(a: BuildArgs) -> Result<(), CliError> {
    let params: SchemeParams = a.params.parse()?;
    let scheme = Scheme::with_cap(params, input::vertex_cap()?)?;
    let g = scheme.build();
    if let Some(out) = &a.out {
        write_graph(out, &g, a.format)?;
    }
    println!("n={} m={} {}", g.n(), g.edge_count(), degree_text(&g));
    Ok(())
}

fn validated(g: &Graph, spec_path: &Path) -> Result<(spectral_switch::switching::SwitchSpec, ValidationReport), CliError> {
    let spec = input::load_spec(spec_path, g)?;
    let report = spec.validate(g)?;
    if !report.valid {
        return Err(CliError::Invalid(format!("{} spec rejected: {}", spec.method(), report.summary())));
    }
    Ok((spec, report))
}

fn cmd_switch(a: SwitchArgs) -> Result<(), CliError> {
    let g = input::load_graph(&a.graph)?;
    let (spec, report) = validated(&g, &a.spec)?;
    let h = spec.apply(&g)?;
    if let Some(out) = &a.out {
        write_graph(out, &h, a.format)?;
    }
    println!(
        "{} spec valid; {} outside vertices switched; n={} m={} {}",
        spec.method(),
        report.switching_vertex_count(),
        h.n(),
        h.edge_count(),
        degree_text(&h)
    );
    Ok(())
}

#[derive(Serialize)]
struct VerifyReport {
    schema_version: &'static str,
    graph: String,
    method: String,
    validation: ValidationReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    cospectral: Option<CospectralVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    noniso: Option<NonIsoVerdict>,
    passed: bool,
}

fn cmd_verify(a: VerifyArgs) -> Result<(), CliError> {
    let g = input::load_graph(&a.graph)?;
    let spec = input::load_spec(&a.spec, &g)?;
    let validation = spec.validate(&g)?;
    let mut report = VerifyReport {
        schema_version: REPORT_SCHEMA_VERSION,
        graph: a.graph.clone(),
        method: spec.method().into(),
        validation,
        cospectral: None,
        noniso: None,
        passed: false,
    };
    if !report.validation.valid {
        let msg = format!("{} spec rejected: {}", spec.method(), report.validation.summary());
        if let Some(p) = &a.report {
            write_json(p, &report)?;
        }
        return Err(CliError::Invalid(msg));
    }
    let h = spec.apply(&g)?;
    let spectrum = cospectral(&g, &h, a.spectral.primes, a.spectral.seed)?;
    let noniso = nonisomorphic(&g, &h, a.node_budget);
    report.passed = spectrum.equal && noniso.distinguished;
    println!("valid: yes ({} switching vertices)", report.validation.switching_vertex_count());
    println!("cospectral: {} ({} primes, seed {})", spectrum.equal, spectrum.primes_used, spectrum.seed);
    println!("non-isomorphism: {}", verdict_text(&noniso));
    let outcome = if !spectrum.equal {
        Err(CliError::Inconclusive("switched graph is not cospectral; switching conditions may be wrong".into()))
    } else if !noniso.distinguished {
        Err(CliError::Inconclusive(match noniso.outcome {
            Outcome::Isomorphic => "switched graph is isomorphic to the original".into(),
            _ => format!("non-isomorphism undecided within {} nodes", noniso.node_budget),
        }))
    } else {
        Ok(())
    };
    report.cospectral = Some(spectrum);
    report.noniso = Some(noniso);
    if let Some(p) = &a.report {
        write_json(p, &report)?;
    }
    outcome
}

fn verdict_text(v: &NonIsoVerdict) -> String {
    match (v.outcome, v.level) {
        (Outcome::Distinguished, Some(l)) => format!("distinguished at {l}: {}", v.witness.as_deref().unwrap_or("")),
        (Outcome::Isomorphic, _) => "isomorphic (canonical forms agree)".into(),
        _ => format!("unknown (node budget {} exhausted)", v.node_budget),
    }
}

fn required<T>(v: Option<T>, flag: &str, recipe: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Usage(format!("recipe {recipe} needs --{flag}")))
}

fn cmd_recipe(a: RecipeArgs) -> Result<(), CliError> {
    let recipe = match a.recipe {
        RecipeName::J2n4 => recipe_j2n4(required(a.n, "n", "j2n4")?)?,
        RecipeName::Halfrange => recipe_halfrange_2kk(required(a.k, "k", "halfrange")?)?,
        RecipeName::Qkneser => recipe_qkneser(required(a.n, "n", "qkneser")?, required(a.k, "k", "qkneser")?)?,
        RecipeName::Sporadic => recipe_sporadic(&required(a.name, "name", "sporadic")?)?,
    };
    let opts = RunOptions {
        num_primes: a.spectral.primes,
        seed: a.spectral.seed,
        node_budget: a.node_budget,
        vertex_cap: input::vertex_cap()?,
        ..RunOptions::default()
    };
    let run = run_recipe(&recipe, &opts)?;
    let r = &run.report;
    println!("{} on {} ({} switching): n={} m={} {}", r.recipe, r.params, r.method, r.vertices, r.edges, r.degree.map_or("irregular".into(), |d| format!("k-regular={d}")));
    println!("cospectral: {} ({} primes, seed {})", r.cospectral.equal, r.cospectral.primes_used, r.cospectral.seed);
    println!("non-isomorphism: {}", verdict_text(&r.noniso));
    for w in &r.witnesses {
        println!("witness {:?}: {} {:?}", w.labels, if w.passed { "ok" } else { "FAILED" }, w.observed);
    }
    if let Some(t) = &r.triple_scan {
        println!(
            "triple scan: original {} ({}), mate {}",
            if t.original.holds() { "has a count-one triple" } else { "no count-one triple" },
            if t.original.exhaustive { "exhaustive" } else { "sampled" },
            if t.mate.holds() { "has a count-one triple" } else { "no count-one triple" },
        );
    }
    println!("passed: {}", r.passed);
    if let Some(p) = &a.report {
        write_json(p, r)?;
    }
    if let Some(dir) = &a.out_dir {
        fs::create_dir_all(dir).map_err(|e| CliError::Usage(format!("cannot create {}: {e}", dir.display())))?;
        write_graph(&dir.join(format!("{}.g6", r.recipe)), &run.graph, Format::Graph6)?;
        write_graph(&dir.join(format!("{}-mate.g6", r.recipe)), &run.mate, Format::Graph6)?;
    }
    if r.passed {
        Ok(())
    } else if r.noniso.outcome == Outcome::Unknown {
        Err(CliError::Inconclusive("non-isomorphism undecided within the node budget".into()))
    } else {
        Err(CliError::Invalid(format!("recipe {} failed its checks", r.recipe)))
    }
}

fn cmd_search(a: SearchArgs) -> Result<(), CliError> {
    if !(a.budget > 0.0 && a.budget.is_finite()) {
        return Err(CliError::Usage("--budget must be a positive number of seconds".into()));
    }
    let mode = match a.mode {
        Mode::Gm4 => SearchMode::Gm4,
        Mode::Wqh33 => SearchMode::Wqh33,
    };
    let mut cfg = SearchConfig::new(mode, a.limit, Duration::from_secs_f64(a.budget), a.dedup)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    cfg.node_budget = a.node_budget;
    let g = input::load_graph(&a.graph)?;
    let outcome = match mode {
        SearchMode::Gm4 => search_gm4(&g, &cfg)?,
        SearchMode::Wqh33 => {
            let first = match (&a.candidates, a.pattern) {
                (Some(p), None) => input::load_candidates(p, &g)?,
                (None, Some(pattern)) => {
                    let params: SchemeParams = a
                        .graph
                        .parse()
                        .map_err(|_| CliError::Usage("--pattern needs scheme parameters as --graph".into()))?;
                    let scheme = Scheme::with_cap(params, input::vertex_cap()?)?;
                    let ground = input::parse_elements(&required(a.ground.clone(), "ground", "pattern")?)?;
                    match pattern {
                        Pattern::Partition => {
                            let extras = input::parse_elements(&required(a.extras.clone(), "extras", "pattern")?)?;
                            partition_pattern(&scheme, &ground, &extras)?
                        }
                        Pattern::Star => star_pattern(&scheme, &ground, a.pool)?,
                    }
                }
                _ => return Err(CliError::Usage("wqh33 needs exactly one of --candidates or --pattern".into())),
            };
            let second = match &a.candidates2 {
                Some(p) => input::load_candidates(p, &g)?,
                None => first.clone(),
            };
            search_wqh33(&g, &first, &second, &cfg)?
        }
    };
    println!(
        "found {} spec(s); examined {} of {} candidates{}",
        outcome.found.len(),
        outcome.candidates_examined,
        outcome.candidates_total,
        if outcome.partial { " (partial)" } else { "" }
    );
    if let Some(out) = &a.out {
        let labelled: Vec<_> = outcome
            .found
            .iter()
            .map(|f| {
                let sets: Vec<Vec<usize>> = match &f.spec {
                    spectral_switch::switching::SwitchSpec::Gm(s) => s.cells().iter().map(|c| c.as_slice().to_vec()).collect(),
                    spectral_switch::switching::SwitchSpec::Wqh(s) => vec![s.c1().as_slice().to_vec(), s.c2().as_slice().to_vec()],
                };
                let labels: Vec<Vec<String>> = sets
                    .iter()
                    .map(|s| s.iter().map(|&v| g.label(v).map_or_else(|| v.to_string(), str::to_string)).collect())
                    .collect();
                json!({ "found": f, "labels": labels })
            })
            .collect();
        let doc = json!({
            "schema_version": REPORT_SCHEMA_VERSION,
            "graph": a.graph,
            "mode": outcome.mode,
            "candidates_examined": outcome.candidates_examined,
            "candidates_total": outcome.candidates_total.to_string(),
            "partial": outcome.partial,
            "elapsed_ms": outcome.elapsed_ms,
            "results": labelled,
        });
        write_json(out, &doc)?;
    }
    Ok(())
}

fn cmd_spectrum(a: SpectrumArgs) -> Result<(), CliError> {
    let g = input::load_graph(&a.graph)?;
    let primes = primes_from_seed(a.spectral.seed, a.spectral.primes);
    let mut per_prime = Vec::new();
    for &p in &primes {
        let h = coefficient_hash(&charpoly_mod_p(&g, p)?);
        println!("p={p} charpoly sha256={h}");
        per_prime.push(json!({ "prime": p, "hash": h }));
    }
    let mut doc = json!({
        "schema_version": REPORT_SCHEMA_VERSION,
        "graph": a.graph,
        "seed": a.spectral.seed,
        "charpoly": per_prime,
    });
    if a.eigenvalues {
        let ev = eigenvalues_float(&g)?;
        println!("eigenvalues: {}", ev.iter().map(|x| format!("{x:.6}")).collect::<Vec<_>>().join(" "));
        doc["eigenvalues"] = json!(ev);
    }
    if let Some(other) = &a.against {
        let h = input::load_graph(other)?;
        let v = cospectral(&g, &h, a.spectral.primes, a.spectral.seed)?;
        println!("cospectral with {other}: {}", v.equal);
        doc["comparison"] = json!(v);
    }
    if let Some(p) = &a.report {
        write_json(p, &doc)?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(CliError::Usage("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    match cli.command {
        Command::Build(a) => cmd_build(a),
        Command::Switch(a) => cmd_switch(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Recipe(a) => cmd_recipe(a),
        Command::Search(a) => cmd_search(a),
        Command::Spectrum(a) => cmd_spectrum(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
