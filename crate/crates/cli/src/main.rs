//! `kg`: construct quality-tiered temporal knowledge graphs from abstract
//! corpora, ground clinical synthesis in retrieved subgraphs, verify every
//! citation, and compute the evaluation statistics.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use tracekg::citeverify::{
    audit_output, render_audit_report, CachingClient, FixtureIndex, LiveClient, PubmedClient,
};
use tracekg::counterfactual::{classify_cf_outcome, inject_counterfactual, load_cases};
use tracekg::error::Error as CoreError;
use tracekg::files;
use tracekg::graphstore::{export_import_script, import_graph, write_edge_records, write_node_records, Graph};
use tracekg::judgepanel::{
    aggregate_nli, aggregate_panel, blind_and_shuffle, judge_case, stratified_sample, CaseInput,
    Round,
};
use tracekg::pairconfig::load_config_file;
use tracekg::pipeline::{
    render_audit_table, render_cf_table, render_judge_tables, render_kg_stats,
    render_metrics_table, render_nli_summary, run_phase1, run_phase2, summarize_arm_audits,
    Phase2Inputs,
};
use tracekg::providers::{
    EchoProvider, FixtureProvider, GenerationParams, HeuristicJudgeProvider, HttpProvider,
    ModelProvider,
};
use tracekg::synthesis::{
    Arm, ClinicalOutput, Document, HashingEmbedder, OutputType, PrivacyConfig,
};

#[derive(Parser)]
#[command(name = "kg", version, about = "Evidence-traceable temporal knowledge graphs")]
struct Cli {
    /// Force fixture/offline providers everywhere; no network access.
    #[arg(long, global = true)]
    offline: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Phase I: construct a knowledge graph from an abstract corpus.
    Build(BuildArgs),
    /// Run a retrieval query against a built or released graph.
    Query(QueryArgs),
    /// Phase II: synthesize clinical outputs for scenarios.
    Synthesize(SynthesizeArgs),
    /// Verify the citations of one or more outputs.
    Audit(AuditArgs),
    /// Compute per-scenario automated metrics over an output directory.
    Metrics(MetricsArgs),
    /// Run or aggregate the judge panel.
    Judge(JudgeArgs),
    /// Claim-support audit: sample candidate pairs or aggregate verdicts.
    NliAudit(NliAuditArgs),
    /// Counterfactual injection harness.
    Counterfactual(CfArgs),
    /// Statistics utilities over file inputs.
    Stats(StatsArgs),
    /// Export a graph as a Cypher import script.
    Export(ExportArgs),
    /// Emit the full report set from a data tree.
    Report(ReportArgs),
}

#[derive(Args)]
struct ReportArgs {
    /// Data tree root (holds pairs/, released/, fixtures/).
    #[arg(long, default_value = "data")]
    data: PathBuf,
    /// Output directory for report files.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BuildArgs {
    /// Disease-pair configuration file.
    #[arg(long)]
    pair: PathBuf,
    /// Abstract corpus (one JSON record per line).
    #[arg(long)]
    corpus: PathBuf,
    /// Curated backbone edges (edge records, optional).
    #[arg(long)]
    tier1: Option<PathBuf>,
    /// Recorded provider responses for offline extraction.
    #[arg(long)]
    providers: PathBuf,
    /// Extraction model ids present in the fixture file.
    #[arg(long, default_value = "model-a,model-b")]
    models: String,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct QueryArgs {
    #[arg(long)]
    pair: PathBuf,
    /// Directory holding nodes.jsonl and edges.jsonl.
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    disease: Option<String>,
    /// comparative | temporal | treatment | neighbourhood
    #[arg(long)]
    kind: String,
    /// Entity name or CUI for neighbourhood queries.
    #[arg(long)]
    entity: Option<String>,
    #[arg(long)]
    limit: Option<usize>,
}

#[derive(Args)]
struct SynthesizeArgs {
    #[arg(long)]
    pair: PathBuf,
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    scenarios: PathBuf,
    /// Restrict to one scenario id (default: all in the pair).
    #[arg(long)]
    scenario_id: Option<String>,
    /// vanilla | guideline_rag | heg_tkg (default: all three).
    #[arg(long)]
    arm: Option<String>,
    /// Directory of reference documents for the text-RAG arm.
    #[arg(long)]
    rag_corpus: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    /// Refuse to start when any component routes to a non-local host.
    #[arg(long)]
    strict_privacy: bool,
}

#[derive(Args)]
struct AuditArgs {
    /// Output file (.json output record or plain .txt) or a directory.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    pair: PathBuf,
    /// Local summary index; required in offline mode.
    #[arg(long)]
    index: Option<PathBuf>,
    /// Classify on titles only, ignoring MeSH terms.
    #[arg(long)]
    title_only: bool,
    /// Write per-output audit JSON next to a printed summary.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MetricsArgs {
    /// Directory of output records.
    #[arg(long)]
    outputs: PathBuf,
    #[arg(long)]
    scenarios: PathBuf,
    /// Write the per-scenario table as CSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct JudgeArgs {
    /// v1 (blind) or v2 (citation-aware).
    #[arg(long, default_value = "v1")]
    round: String,
    /// Directory of output records to judge.
    #[arg(long)]
    outputs: Option<PathBuf>,
    #[arg(long)]
    scenarios: Option<PathBuf>,
    #[arg(long)]
    pair: Option<PathBuf>,
    /// Summary index for the citation-aware round.
    #[arg(long)]
    index: Option<PathBuf>,
    /// Aggregate an existing score file instead of judging.
    #[arg(long)]
    aggregate: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "42")]
    seed: u64,
}

#[derive(Args)]
struct NliAuditArgs {
    /// Candidate (claim, PMID) rows to sample from.
    #[arg(long)]
    candidates: Option<PathBuf>,
    /// Existing verdict rows to aggregate.
    #[arg(long)]
    verdicts: Option<PathBuf>,
    #[arg(long, default_value = "200")]
    n: usize,
    #[arg(long, default_value = "42")]
    seed: u64,
    #[arg(long, default_value = "12")]
    floor: usize,
    #[arg(long, default_value = "5")]
    cap: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CfArgs {
    #[arg(long)]
    cases: PathBuf,
    #[arg(long)]
    pair: PathBuf,
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    scenarios: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct StatsArgs {
    /// mann-whitney | cohens-d | bootstrap | bh | wilson | alpha | kappa | icc | spearman
    op: String,
    /// JSON file arguments, op-dependent.
    #[arg(long)]
    a: Option<PathBuf>,
    #[arg(long)]
    b: Option<PathBuf>,
    #[arg(long)]
    values: Option<PathBuf>,
    #[arg(long)]
    matrix: Option<PathBuf>,
    #[arg(long)]
    successes: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value = "0.95")]
    level: f64,
    #[arg(long, default_value = "10000")]
    resamples: usize,
    #[arg(long, default_value = "42")]
    seed: u64,
    /// mean_a,sd_a,n_a,mean_b,sd_b,n_b for cohens-d.
    #[arg(long)]
    summary: Option<String>,
}

#[derive(Args)]
struct ExportArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            // Privacy-gate violations get their own exit code.
            if e.downcast_ref::<CoreError>()
                .is_some_and(|c| matches!(c, CoreError::Privacy { .. }))
            {
                ExitCode::from(3)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Build(args) => cmd_build(args),
        Command::Query(args) => cmd_query(args),
        Command::Synthesize(args) => cmd_synthesize(args, cli.offline),
        Command::Audit(args) => cmd_audit(args, cli.offline),
        Command::Metrics(args) => cmd_metrics(args),
        Command::Judge(args) => cmd_judge(args),
        Command::NliAudit(args) => cmd_nli(args),
        Command::Counterfactual(args) => cmd_counterfactual(args),
        Command::Stats(args) => cmd_stats(args),
        Command::Export(args) => cmd_export(args),
        Command::Report(args) => cmd_report(args),
    }
}

pub const PAIR_IDS: [&str; 3] = ["mg_lems", "dmd_bmd", "cidp_gbs"];

/// Emit every report file from the bundled data tree. Reruns are
/// byte-identical.
fn cmd_report(args: ReportArgs) -> Result<()> {
    std::fs::create_dir_all(&args.out)?;
    let released = args.data.join("released");

    // Graph structural statistics per pair plus totals.
    let mut per_pair = Vec::new();
    let mut pmid_union: std::collections::BTreeSet<String> = Default::default();
    for pair in PAIR_IDS {
        let dir = released.join("graphs").join(pair);
        if dir.join("edges.jsonl").exists() {
            let graph = load_graph(&dir)?;
            for e in graph.edges() {
                pmid_union.extend(e.pmid_list.iter().cloned());
            }
            per_pair.push((pair.to_string(), graph.stats()));
        }
    }
    if !per_pair.is_empty() {
        std::fs::write(
            args.out.join("kg_stats.txt"),
            render_kg_stats(&per_pair, Some(pmid_union.len())),
        )?;
    }

    // Per-scenario metrics table from the released metrics file.
    let metrics_path = released.join("metrics_s9.csv");
    if metrics_path.exists() {
        let rows = files::read_metrics_csv(&metrics_path)?;
        std::fs::write(args.out.join("metrics.txt"), render_metrics_table(&rows))?;
    }

    // Citation-audit summary over the released outputs.
    let index_path = args.data.join("fixtures").join("pubmed_index.json");
    if index_path.exists() && released.join("outputs").exists() {
        let index = FixtureIndex::load(&index_path)?;
        let mut per_arm: std::collections::BTreeMap<Arm, Vec<tracekg::citeverify::CitationAudit>> =
            std::collections::BTreeMap::new();
        for pair in PAIR_IDS {
            let cfg = load_config_file(args.data.join("pairs").join(format!("{pair}.yaml")))?;
            let dir = released.join("outputs").join(pair);
            if !dir.exists() {
                continue;
            }
            for (_, output) in load_outputs_from(&dir)? {
                let audit = audit_output(&output, &cfg, &index, false)?;
                per_arm.entry(output.arm).or_default().push(audit);
            }
        }
        let summaries: Vec<_> = per_arm
            .iter()
            .map(|(arm, audits)| summarize_arm_audits(*arm, audits))
            .collect();
        std::fs::write(args.out.join("audit_summary.txt"), render_audit_table(&summaries))?;
    }

    // Judge tables per round.
    let scores_path = released.join("judge_scores.jsonl");
    if scores_path.exists() {
        let records = files::load_score_records(&scores_path)?;
        for round in [Round::V1, Round::V2] {
            let subset: Vec<_> = records.iter().filter(|r| r.round == round).cloned().collect();
            let tables = aggregate_panel(&subset)?;
            std::fs::write(
                args.out.join(format!("judge_{}.txt", round.label())),
                render_judge_tables(round, &tables),
            )?;
        }
    }

    // Claim-support audit summary.
    let verdicts_path = released.join("nli_verdicts.jsonl");
    if verdicts_path.exists() {
        let rows = files::load_nli_rows(&verdicts_path)?;
        let summary = aggregate_nli(&rows, 42)?;
        std::fs::write(args.out.join("nli_summary.txt"), render_nli_summary(&summary))?;
    }

    // Counterfactual outcomes.
    let cf_path = released.join("cf_results.json");
    if cf_path.exists() {
        let results: Vec<tracekg::counterfactual::CfResult> =
            serde_json::from_str(&std::fs::read_to_string(&cf_path)?)?;
        std::fs::write(args.out.join("counterfactual.txt"), render_cf_table(&results))?;
    }

    println!("reports written to {}", args.out.display());
    Ok(())
}

fn load_graph(dir: &Path) -> Result<Graph> {
    import_graph(dir.join("nodes.jsonl"), dir.join("edges.jsonl"))
        .with_context(|| format!("importing graph from {}", dir.display()))
}

fn cmd_build(args: BuildArgs) -> Result<()> {
    let cfg = load_config_file(&args.pair)?;
    let corpus = files::load_corpus(&args.corpus)?;
    let tier1 = match &args.tier1 {
        Some(path) => tracekg::graphstore::read_edge_records(path)?,
        None => vec![],
    };
    let model_ids: Vec<&str> = args.models.split(',').map(str::trim).collect();
    let fixtures: Vec<FixtureProvider> = model_ids
        .iter()
        .map(|id| FixtureProvider::from_jsonl(*id, &args.providers))
        .collect::<tracekg::Result<_>>()?;
    let providers: Vec<&dyn ModelProvider> =
        fixtures.iter().map(|p| p as &dyn ModelProvider).collect();

    std::fs::create_dir_all(&args.out)?;
    let (graph, report) = match run_phase1(&cfg, &corpus, tier1, &providers, providers[0]) {
        Ok(built) => built,
        Err(e) => {
            // Retain an inspectable artifact naming the failed stage.
            std::fs::write(args.out.join("error.txt"), format!("{e}\n"))?;
            return Err(e.into());
        }
    };
    write_node_records(&graph, args.out.join("nodes.jsonl"))?;
    write_edge_records(graph.edges(), args.out.join("edges.jsonl"))?;
    std::fs::write(args.out.join("import.cypher"), export_import_script(&graph))?;
    std::fs::write(
        args.out.join("report.json"),
        serde_json::to_string_pretty(&report)?,
    )?;
    println!(
        "built {}: {} nodes, {} edges ({} GOLD / {} SILVER / {} BRONZE), screen pass rate {:.1}%",
        cfg.pair_id,
        report.stats.nodes,
        report.stats.edges,
        report.tier_histogram.gold,
        report.tier_histogram.silver,
        report.tier_histogram.bronze,
        report.screen_pass_rate * 100.0
    );
    Ok(())
}

fn cmd_query(args: QueryArgs) -> Result<()> {
    let cfg = load_config_file(&args.pair)?;
    let graph = load_graph(&args.graph)?;
    let edges: Vec<&tracekg::consensus::Edge> = match args.kind.as_str() {
        "comparative" => graph.query_comparative(disease(&args)?, &cfg)?,
        "temporal" => graph.query_temporal(disease(&args)?, &cfg)?,
        "treatment" => graph.query_treatment(disease(&args)?, &cfg)?,
        "neighbourhood" => {
            let entity = args
                .entity
                .as_deref()
                .context("--entity is required for neighbourhood queries")?;
            graph.query_neighbourhood(entity, args.limit, args.disease.as_deref())
        }
        other => bail!("unknown query kind `{other}`"),
    };
    for e in &edges {
        println!(
            "{}\t{} ->{}-> {}\t{}\t{}",
            e.edge_id,
            e.subject.surface,
            e.predicate,
            e.object.surface,
            e.quality_tier.label(),
            e.pmid_list.iter().cloned().collect::<Vec<_>>().join(",")
        );
    }
    eprintln!("{} edges", edges.len());
    Ok(())
}

fn disease(args: &QueryArgs) -> Result<&str> {
    args.disease
        .as_deref()
        .context("--disease is required for this query kind")
}

/// Synthesis provider: offline mode (or no endpoint) uses the echo
/// provider; otherwise an HTTP chat-completions endpoint from env vars.
fn synthesis_provider(offline: bool) -> (Box<dyn ModelProvider>, Option<String>) {
    if offline {
        return (Box::new(EchoProvider::new()), None);
    }
    match std::env::var("TRACEKG_SYNTH_ENDPOINT") {
        Ok(endpoint) if !endpoint.is_empty() => {
            let model =
                std::env::var("TRACEKG_SYNTH_MODEL").unwrap_or_else(|_| "default".to_string());
            let key = std::env::var("TRACEKG_SYNTH_API_KEY").ok();
            (
                Box::new(HttpProvider::new("http-synth", endpoint.clone(), model, key)),
                Some(endpoint),
            )
        }
        _ => (Box::new(EchoProvider::new()), None),
    }
}

fn load_rag_corpus(dir: Option<&PathBuf>) -> Result<Vec<Document>> {
    let Some(dir) = dir else {
        return Ok(vec![Document {
            id: "empty".into(),
            text: "No reference corpus configured.".into(),
        }]);
    };
    let mut docs = Vec::new();
    let mut entries: Vec<_> = std::fs::read_dir(dir)?.collect::<std::io::Result<_>>()?;
    entries.sort_by_key(|e| e.path());
    for entry in entries {
        let path = entry.path();
        if path.extension().is_some_and(|e| e == "txt") {
            docs.push(Document {
                id: path
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_default(),
                text: std::fs::read_to_string(&path)?,
            });
        }
    }
    Ok(docs)
}

fn cmd_synthesize(args: SynthesizeArgs, offline: bool) -> Result<()> {
    let cfg = load_config_file(&args.pair)?;
    let graph = load_graph(&args.graph)?;
    let scenarios = files::load_scenarios(&args.scenarios)?;
    let rag_corpus = load_rag_corpus(args.rag_corpus.as_ref())?;
    let embedder = HashingEmbedder::new();
    let (provider, endpoint) = synthesis_provider(offline);
    let privacy = PrivacyConfig::default().with_component("synthesis", endpoint);
    let arms: Vec<Arm> = match &args.arm {
        Some(a) => vec![Arm::parse(a)?],
        None => Arm::ALL.to_vec(),
    };
    let inputs = Phase2Inputs {
        graph: &graph,
        cfg: &cfg,
        rag_corpus: &rag_corpus,
        embedder: &embedder,
        provider: provider.as_ref(),
        params: GenerationParams::default(),
        privacy,
        strict_privacy: args.strict_privacy,
        injected: vec![],
    };
    std::fs::create_dir_all(&args.out)?;
    let mut produced = 0;
    for scenario in scenarios
        .iter()
        .filter(|s| s.disease_pair == cfg.pair_id)
        .filter(|s| args.scenario_id.as_deref().is_none_or(|id| id == s.id))
    {
        for arm in &arms {
            let (output, _) = run_phase2(&inputs, scenario, *arm)?;
            let stem = format!("{}__{}", scenario.id, arm.label());
            std::fs::write(args.out.join(format!("{stem}.txt")), &output.text)?;
            std::fs::write(
                args.out.join(format!("{stem}.json")),
                serde_json::to_string_pretty(&output)?,
            )?;
            produced += 1;
        }
    }
    println!("wrote {produced} outputs to {}", args.out.display());
    Ok(())
}

fn pubmed_client(offline: bool, index: Option<&PathBuf>) -> Result<Box<dyn PubmedClient>> {
    match index {
        Some(path) => {
            let index = FixtureIndex::load(path)
                .with_context(|| format!("loading summary index {}", path.display()))?;
            if offline {
                Ok(Box::new(index))
            } else {
                Ok(Box::new(CachingClient::new(
                    LiveClient::new(),
                    index,
                    Some(path.clone()),
                )))
            }
        }
        None if offline => bail!("offline audit requires --index"),
        None => Ok(Box::new(CachingClient::new(
            LiveClient::new(),
            FixtureIndex::new(),
            None,
        ))),
    }
}

fn load_outputs_from(path: &Path) -> Result<Vec<(PathBuf, ClinicalOutput)>> {
    let mut outputs = Vec::new();
    let mut push_file = |file: &Path| -> Result<()> {
        let name = file.file_name().unwrap_or_default().to_string_lossy();
        // Sidecars are not outputs.
        if name.ends_with(".manifest.json") || name.ends_with(".audit.json") {
            return Ok(());
        }
        // A .txt with a full .json twin is the same output; keep the twin.
        if name.ends_with(".txt") && file.with_extension("json").exists() {
            return Ok(());
        }
        match file.extension().and_then(|e| e.to_str()) {
            Some("json") => outputs.push((file.to_path_buf(), files::load_output(file)?)),
            Some("txt") => {
                let stem = file.file_stem().unwrap_or_default().to_string_lossy();
                let (scenario_id, arm) = match stem.rsplit_once("__") {
                    Some((id, arm)) => (id.to_string(), Arm::parse(arm).unwrap_or(Arm::Vanilla)),
                    None => (stem.into_owned(), Arm::Vanilla),
                };
                outputs.push((
                    file.to_path_buf(),
                    ClinicalOutput {
                        scenario_id,
                        arm,
                        text: std::fs::read_to_string(file)?,
                        evidence_manifest: vec![],
                        chunk_ids: vec![],
                        provider: "released".into(),
                        phi_compliant: true,
                        params: GenerationParams::default(),
                    },
                ));
            }
            _ => {}
        }
        Ok(())
    };
    if path.is_dir() {
        let mut entries: Vec<_> = std::fs::read_dir(path)?.collect::<std::io::Result<_>>()?;
        entries.sort_by_key(|e| e.path());
        for entry in entries {
            if entry.path().is_file() {
                push_file(&entry.path())?;
            }
        }
    } else {
        push_file(path)?;
    }
    Ok(outputs)
}

fn cmd_audit(args: AuditArgs, offline: bool) -> Result<()> {
    let cfg = load_config_file(&args.pair)?;
    let client = pubmed_client(offline, args.index.as_ref())?;
    let outputs = load_outputs_from(&args.input)?;
    if outputs.is_empty() {
        bail!("no outputs found under {}", args.input.display());
    }
    let mut per_arm: std::collections::BTreeMap<Arm, Vec<tracekg::citeverify::CitationAudit>> =
        std::collections::BTreeMap::new();
    for (path, output) in &outputs {
        let audit = audit_output(output, &cfg, client.as_ref(), args.title_only)?;
        if let Some(out_dir) = &args.out {
            std::fs::create_dir_all(out_dir)?;
            let stem = path.file_stem().unwrap_or_default().to_string_lossy();
            std::fs::write(
                out_dir.join(format!("{stem}.audit.json")),
                serde_json::to_string_pretty(&audit)?,
            )?;
            std::fs::write(
                out_dir.join(format!("{stem}.audit.txt")),
                render_audit_report(&audit),
            )?;
        }
        per_arm.entry(output.arm).or_default().push(audit);
    }
    let summaries: Vec<_> = per_arm
        .iter()
        .map(|(arm, audits)| summarize_arm_audits(*arm, audits))
        .collect();
    print!("{}", render_audit_table(&summaries));
    Ok(())
}

fn cmd_metrics(args: MetricsArgs) -> Result<()> {
    let scenarios = files::load_scenarios(&args.scenarios)?;
    let outputs = load_outputs_from(&args.outputs)?;
    let coefficients = tracekg::evalmetrics::ReliabilityCoefficients::default();
    let mut rows = Vec::new();
    for (_, output) in &outputs {
        let Some(scenario) = scenarios.iter().find(|s| s.id == output.scenario_id) else {
            continue;
        };
        let m = tracekg::evalmetrics::score_output(
            &scenario.id,
            output.arm,
            &output.text,
            &scenario.expected_key_features,
            &coefficients,
        )?;
        rows.push(files::MetricsRow {
            scenario_id: m.scenario_id,
            output_type: scenario.output_type.label().to_string(),
            arm: m.arm,
            fc: m.fc,
            ets: m.ets,
            pg: m.pg,
        });
    }
    if let Some(out) = &args.out {
        files::write_metrics_csv(&rows, out)?;
    }
    print!("{}", render_metrics_table(&rows));
    Ok(())
}

fn cmd_judge(args: JudgeArgs) -> Result<()> {
    if let Some(scores_path) = &args.aggregate {
        let round = parse_round(&args.round)?;
        let records: Vec<tracekg::judgepanel::ScoreRecord> =
            files::load_score_records(scores_path)?
                .into_iter()
                .filter(|r| r.round == round)
                .collect();
        let tables = aggregate_panel(&records)?;
        print!("{}", render_judge_tables(round, &tables));
        if let Some(out) = &args.out {
            std::fs::write(out, serde_json::to_string_pretty(&tables)?)?;
        }
        return Ok(());
    }

    let round = parse_round(&args.round)?;
    let outputs_dir = args.outputs.context("--outputs required to run judging")?;
    let scenarios = files::load_scenarios(args.scenarios.as_ref().context("--scenarios required")?)?;
    let cfg = load_config_file(args.pair.as_ref().context("--pair required")?)?;
    let outputs = load_outputs_from(&outputs_dir)?;
    let index: Box<dyn PubmedClient> = match &args.index {
        Some(path) => Box::new(FixtureIndex::load(path)?),
        None => Box::new(FixtureIndex::new()),
    };

    let cases: Vec<CaseInput> = outputs
        .iter()
        .filter_map(|(_, o)| {
            scenarios.iter().find(|s| s.id == o.scenario_id).map(|s| CaseInput {
                scenario_id: o.scenario_id.clone(),
                arm: o.arm,
                disease_pair: s.disease_pair.clone(),
                scenario_text: s.scenario_text.clone(),
                output_text: o.text.clone(),
            })
        })
        .collect();
    let (blinded, key) = blind_and_shuffle(&cases, args.seed)?;
    let judges = [
        HeuristicJudgeProvider::new("judge-a"),
        HeuristicJudgeProvider::new("judge-b"),
        HeuristicJudgeProvider::new("judge-c"),
    ];
    let mut records: Vec<serde_json::Value> = Vec::new();
    for case in &blinded {
        let (scenario_id, arm) = key.map.get(&case.blinded_id).unwrap();
        let audit = if round == Round::V2 {
            let output = outputs
                .iter()
                .map(|(_, o)| o)
                .find(|o| &o.scenario_id == scenario_id && o.arm == *arm)
                .unwrap();
            Some(audit_output(output, &cfg, index.as_ref(), false)?)
        } else {
            None
        };
        for judge in &judges {
            match judge_case(case, round, audit.as_ref(), judge) {
                Ok(scores) => records.push(serde_json::json!({
                    "disease_pair": case.disease_pair,
                    "scenario_id": scenario_id,
                    "arm": arm,
                    "judge": judge.id(),
                    "round": round.label(),
                    "d1": scores.d1, "d2": scores.d2, "d3": scores.d3,
                    "d4": scores.d4, "d5": scores.d5,
                    "justification": scores.brief_justification,
                })),
                Err(e) => eprintln!("case {} unscored by {}: {e}", case.blinded_id, judge.id()),
            }
        }
    }
    let out = args.out.unwrap_or_else(|| PathBuf::from("judge_scores.jsonl"));
    let mut text = String::new();
    for r in &records {
        text.push_str(&r.to_string());
        text.push('\n');
    }
    std::fs::write(&out, text)?;
    println!("wrote {} score records to {}", records.len(), out.display());
    Ok(())
}

fn parse_round(s: &str) -> Result<Round> {
    match s {
        "v1" => Ok(Round::V1),
        "v2" => Ok(Round::V2),
        other => bail!("unknown round `{other}` (expected v1 or v2)"),
    }
}

fn cmd_nli(args: NliAuditArgs) -> Result<()> {
    if let Some(verdicts) = &args.verdicts {
        let rows = files::load_nli_rows(verdicts)?;
        let summary = aggregate_nli(&rows, args.seed)?;
        print!("{}", render_nli_summary(&summary));
        if let Some(out) = &args.out {
            std::fs::write(out, serde_json::to_string_pretty(&summary)?)?;
        }
        return Ok(());
    }
    let candidates_path = args
        .candidates
        .context("--candidates or --verdicts is required")?;
    let candidates: Vec<tracekg::judgepanel::ClaimPmid> = files::read_jsonl(&candidates_path)?;
    let sample = stratified_sample(&candidates, args.n, args.seed, args.floor, args.cap)?;
    let out = args
        .out
        .unwrap_or_else(|| PathBuf::from("nli_sample.jsonl"));
    files::write_jsonl(&sample, &out)?;
    println!("sampled {} of {} candidates to {}", sample.len(), candidates.len(), out.display());
    Ok(())
}

fn cmd_counterfactual(args: CfArgs) -> Result<()> {
    let cfg = load_config_file(&args.pair)?;
    let graph = load_graph(&args.graph)?;
    let scenarios = files::load_scenarios(&args.scenarios)?;
    let cases = load_cases(&args.cases)?;
    let corpus_pmids: BTreeSet<String> = graph
        .edges()
        .iter()
        .flat_map(|e| e.pmid_list.iter().cloned())
        .collect();
    let embedder = HashingEmbedder::new();
    let provider = EchoProvider::new();
    let rag = vec![Document {
        id: "unused".into(),
        text: "unused".into(),
    }];
    let mut results = Vec::new();
    for case in cases.iter().filter(|c| c.disease_pair == cfg.pair_id) {
        let scenario = scenarios
            .iter()
            .find(|s| s.disease_pair == case.disease_pair && s.output_type == OutputType::Treatment)
            .or_else(|| scenarios.iter().find(|s| s.disease_pair == case.disease_pair))
            .with_context(|| format!("no scenario for pair {}", case.disease_pair))?;
        let injected = inject_counterfactual(&[], case, &corpus_pmids)?;
        let inputs = Phase2Inputs {
            graph: &graph,
            cfg: &cfg,
            rag_corpus: &rag,
            embedder: &embedder,
            provider: &provider,
            params: GenerationParams::default(),
            privacy: PrivacyConfig::default(),
            strict_privacy: false,
            injected,
        };
        let (output, _) = run_phase2(&inputs, scenario, Arm::HegTkg)?;
        results.push(classify_cf_outcome(&output, case));
    }
    print!("{}", render_cf_table(&results));
    if let Some(out) = &args.out {
        std::fs::write(out, serde_json::to_string_pretty(&results)?)?;
    }
    Ok(())
}

fn read_values(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

fn cmd_stats(args: StatsArgs) -> Result<()> {
    use tracekg::statkit;
    match args.op.as_str() {
        "mann-whitney" => {
            let a = read_values(args.a.as_ref().context("--a required")?)?;
            let b = read_values(args.b.as_ref().context("--b required")?)?;
            let r = statkit::mann_whitney_u(&a, &b)?;
            println!("U = {}, p = {:.6}", r.statistic, r.p_value);
        }
        "cohens-d" => {
            let summary = args.summary.context("--summary mean_a,sd_a,n_a,mean_b,sd_b,n_b")?;
            let parts: Vec<f64> = summary
                .split(',')
                .map(|p| p.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .context("parsing --summary")?;
            if parts.len() != 6 {
                bail!("--summary needs 6 comma-separated numbers");
            }
            let d = statkit::cohens_d(
                parts[0], parts[1], parts[2] as usize, parts[3], parts[4], parts[5] as usize,
            )?;
            println!("d = {d:.4}");
        }
        "bootstrap" => {
            let values = read_values(args.values.as_ref().context("--values required")?)?;
            let (lo, hi) =
                statkit::bootstrap_ci(&values, statkit::mean, args.resamples, args.seed, args.level)?;
            println!("[{lo:.4}, {hi:.4}]");
        }
        "bh" => {
            let p = read_values(args.values.as_ref().context("--values required")?)?;
            println!("{}", serde_json::to_string(&statkit::bh_correct(&p)?)?);
        }
        "wilson" => {
            let successes = args.successes.context("--successes required")?;
            let n = args.n.context("--n required")?;
            let (lo, hi) = statkit::wilson_ci(successes, n, args.level)?;
            println!("[{lo:.4}, {hi:.4}]");
        }
        "alpha" => {
            let text = std::fs::read_to_string(args.matrix.as_ref().context("--matrix required")?)?;
            let matrix: Vec<Vec<Option<f64>>> = serde_json::from_str(&text)?;
            let a = statkit::krippendorff_alpha(&matrix, statkit::AlphaMetric::Ordinal)?;
            println!("alpha = {a:.4}");
        }
        "kappa" => {
            let a = read_values(args.a.as_ref().context("--a required")?)?;
            let b = read_values(args.b.as_ref().context("--b required")?)?;
            let k = statkit::weighted_kappa_quadratic(&a, &b, (1.0, 5.0))?;
            println!("kappa = {k:.4}");
        }
        "icc" => {
            let text = std::fs::read_to_string(args.matrix.as_ref().context("--matrix required")?)?;
            let matrix: Vec<Vec<f64>> = serde_json::from_str(&text)?;
            println!("icc = {:.4}", statkit::icc_2_1(&matrix)?);
        }
        "spearman" => {
            let a = read_values(args.a.as_ref().context("--a required")?)?;
            let b = read_values(args.b.as_ref().context("--b required")?)?;
            let r = statkit::spearman_rho(&a, &b)?;
            println!("rho = {:.4}, p = {:.6}", r.statistic, r.p_value);
        }
        other => bail!("unknown stats op `{other}`"),
    }
    Ok(())
}

fn cmd_export(args: ExportArgs) -> Result<()> {
    let graph = load_graph(&args.graph)?;
    let script = export_import_script(&graph);
    match args.out {
        Some(path) => std::fs::write(path, script)?,
        None => print!("{script}"),
    }
    Ok(())
}

