//! Command dispatch for the `tdk` binary.
//!
//! Every command prints a short human summary, or with `--json` a
//! [`RunReport`]. Exit codes: 0 success / positive decision, 1 negative
//! decision, 2 usage, parse or input errors.

use std::collections::{BTreeMap, BTreeSet};
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use tdk_core::ces::{ces_decide, ces_solve_bounded, ces_solve_exact, CesInstance};
use tdk_core::generate::{duplication_instance, seeded};
use tdk_core::io::{emit_schedule, emit_strings, parse_graph, parse_schedule, parse_strings};
use tdk_core::kernel::{fpt_solve, kernelize};
use tdk_core::reductions::{
    build_witness, ces_to_td, clique_to_ces, BuildOptions, ReductionManifest, ReductionParams,
    VerifyFailure, VerifyOutcome, DEFAULT_SIZE_CAP,
};
use tdk_core::search::{decide_td, td_distance, DistanceOutcome, Verdict, WitnessStep};
use tdk_core::strings::{ContractionStep, SymbolTable, TokenString};
use tdk_core::{Graph, Kernel};

pub const REPORT_SCHEMA: &str = "tdk.run/v1";
pub const SIZE_CAP_ENV: &str = "TDK_SIZE_CAP";

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "tdk", version, about = "Tandem duplication distance toolkit")]
struct Cli {
    /// Print a JSON run report instead of a text summary.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact TD distance by iterative deepening.
    Distance {
        #[command(flatten)]
        pair: PairArgs,
        /// Search bound; defaults to |T| - |S|, which certifies infinity.
        #[arg(long)]
        max_k: Option<usize>,
    },
    /// Decide whether T reduces to S within k contractions.
    Decide {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        k: usize,
        /// Write the witness schedule here.
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Replace maximal stable blocks by fresh symbols.
    Kernelize {
        #[command(flatten)]
        pair: PairArgs,
        /// Write PREFIX.source.txt and PREFIX.target.txt.
        #[arg(long)]
        out_prefix: Option<PathBuf>,
    },
    /// Kernelize, check the size bounds, then search the kernel.
    FptSolve {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        k: usize,
    },
    /// Cost-Effective Subgraph.
    #[command(subcommand)]
    Ces(CesCommand),
    /// Hardness reduction builders.
    #[command(subcommand)]
    Reduce(ReduceCommand),
    /// Forward contraction schedule for a vertex subset of a built reduction.
    Witness {
        #[arg(long)]
        manifest: PathBuf,
        /// Comma-separated vertex ids, e.g. "0,2,5"; empty for none.
        #[arg(long, default_value = "")]
        subset: String,
        /// Write the schedule here instead of the default next to the manifest.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Replay a schedule from the target and compare with the source.
    Verify {
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        schedule: PathBuf,
        #[arg(long)]
        source: PathBuf,
    },
    /// Seeded random instance: an exemplar source and random duplications.
    Generate {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        source_len: usize,
        #[arg(long, default_value_t = 3)]
        dups: usize,
        /// Write PREFIX.source.txt and PREFIX.target.txt.
        #[arg(long)]
        out_prefix: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct PairArgs {
    #[arg(long)]
    source: PathBuf,
    #[arg(long)]
    target: PathBuf,
}

#[derive(Subcommand, Debug)]
enum CesCommand {
    /// Minimum-cost subset.
    Solve {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        c: u64,
        /// Enumerate only subsets of size at most c.
        #[arg(long)]
        bounded: bool,
    },
    /// Is there a subset of cost at most the budget?
    Decide {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        c: u64,
        #[arg(long, allow_hyphen_values = true)]
        budget: i64,
    },
}

#[derive(Subcommand, Debug)]
enum ReduceCommand {
    /// CLIQUE(G, k) to CES(G, 3k/2, r).
    CliqueToCes {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// CES(G, c, r) to an exemplar TD instance.
    CesToTd {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        c: u64,
        #[arg(long, allow_hyphen_values = true)]
        r: i64,
        /// Defaults to m + 1.
        #[arg(long)]
        d: Option<u64>,
        /// Defaults to m (n + m)^10.
        #[arg(long)]
        p: Option<u64>,
        /// Build even when the target exceeds the size cap.
        #[arg(long)]
        force: bool,
        /// Output prefix for .source.txt, .target.txt and .manifest.json.
        #[arg(long, default_value = "reduction")]
        out_prefix: PathBuf,
    },
}

#[derive(Serialize, Debug)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

/// Versioned JSON record of one command run.
#[derive(Serialize, Debug)]
pub struct RunReport {
    pub schema: &'static str,
    pub command: String,
    pub inputs: BTreeMap<String, InputDigest>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub result: Value,
    pub wall_time_ms: u64,
}

/// What a command hands back to the dispatcher.
struct Outcome {
    exit: i32,
    summary: String,
    result: Value,
}

impl Outcome {
    fn new(positive: bool, summary: String, result: Value) -> Self {
        Self {
            exit: if positive { EXIT_OK } else { EXIT_NEGATIVE },
            summary,
            result,
        }
    }
}

/// Files read by a command, with their digests.
#[derive(Default)]
struct Inputs(BTreeMap<String, InputDigest>);

impl Inputs {
    fn read(&mut self, role: &str, path: &Path) -> anyhow::Result<String> {
        let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        self.0.insert(
            role.to_owned(),
            InputDigest {
                path: path.display().to_string(),
                sha256: hex::encode(Sha256::digest(&bytes)),
            },
        );
        String::from_utf8(bytes).with_context(|| format!("{} is not UTF-8", path.display()))
    }

    /// Reads a file holding exactly one string.
    fn string(
        &mut self,
        role: &str,
        path: &Path,
        table: &mut SymbolTable,
    ) -> anyhow::Result<TokenString> {
        let text = self.read(role, path)?;
        let mut strings =
            parse_strings(&text, table).with_context(|| format!("parsing {}", path.display()))?;
        if strings.len() != 1 {
            bail!("{}: expected one string, found {}", path.display(), strings.len());
        }
        Ok(strings.remove(0))
    }

    fn graph(&mut self, path: &Path) -> anyhow::Result<Graph> {
        let text = self.read("graph", path)?;
        parse_graph(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

/// Runs the CLI on `args` (including the program name), writing the report
/// or summary to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version come through here too
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return EXIT_USAGE;
            }
            let _ = write!(out, "{}", e.render());
            return EXIT_OK;
        }
    };

    let started = Instant::now();
    let mut inputs = Inputs::default();
    let mut seed = None;
    let name = command_name(&cli.command);
    let outcome = match execute(cli.command, &mut inputs, &mut seed) {
        Ok(outcome) => outcome,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            return EXIT_USAGE;
        }
    };

    let written = if cli.json {
        let report = RunReport {
            schema: REPORT_SCHEMA,
            command: name,
            inputs: inputs.0,
            seed,
            result: outcome.result,
            wall_time_ms: started.elapsed().as_millis() as u64,
        };
        serde_json::to_string_pretty(&report)
            .map_err(anyhow::Error::from)
            .and_then(|s| Ok(writeln!(out, "{s}")?))
    } else {
        writeln!(out, "{}", outcome.summary).map_err(anyhow::Error::from)
    };
    if let Err(e) = written {
        let _ = writeln!(err, "error: {e:#}");
        return EXIT_USAGE;
    }
    outcome.exit
}

fn command_name(command: &Command) -> String {
    match command {
        Command::Distance { .. } => "distance",
        Command::Decide { .. } => "decide",
        Command::Kernelize { .. } => "kernelize",
        Command::FptSolve { .. } => "fpt-solve",
        Command::Ces(CesCommand::Solve { .. }) => "ces solve",
        Command::Ces(CesCommand::Decide { .. }) => "ces decide",
        Command::Reduce(ReduceCommand::CliqueToCes { .. }) => "reduce clique-to-ces",
        Command::Reduce(ReduceCommand::CesToTd { .. }) => "reduce ces-to-td",
        Command::Witness { .. } => "witness",
        Command::Verify { .. } => "verify",
        Command::Generate { .. } => "generate",
    }
    .to_owned()
}

fn size_cap() -> anyhow::Result<u64> {
    match std::env::var(SIZE_CAP_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .with_context(|| format!("{SIZE_CAP_ENV}={v:?} is not a non-negative integer")),
        Err(_) => Ok(DEFAULT_SIZE_CAP),
    }
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn write_file(path: &Path, contents: &str) -> anyhow::Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn witness_json(witness: &[WitnessStep], table: &SymbolTable) -> Value {
    witness
        .iter()
        .map(|w| {
            json!({
                "start": w.step.start,
                "half_len": w.step.half_len,
                "before": table.render(&w.before),
            })
        })
        .collect()
}

fn steps_json(steps: &[ContractionStep]) -> Value {
    steps
        .iter()
        .map(|s| json!({ "start": s.start, "half_len": s.half_len }))
        .collect()
}

fn parse_subset(text: &str, n: usize) -> anyhow::Result<BTreeSet<usize>> {
    let mut subset = BTreeSet::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let v: usize = part
            .parse()
            .with_context(|| format!("bad vertex id {part:?} in subset"))?;
        if v >= n {
            bail!("vertex {v} out of range for {n} vertices");
        }
        subset.insert(v);
    }
    Ok(subset)
}

fn execute(
    command: Command,
    inputs: &mut Inputs,
    seed: &mut Option<u64>,
) -> anyhow::Result<Outcome> {
    match command {
        Command::Distance { pair, max_k } => {
            let mut table = SymbolTable::new();
            let s = inputs.string("source", &pair.source, &mut table)?;
            let t = inputs.string("target", &pair.target, &mut table)?;
            let max_k = max_k.unwrap_or(t.len().saturating_sub(s.len()));
            Ok(match td_distance(&s, &t, max_k) {
                DistanceOutcome::Distance { distance, witness } => Outcome::new(
                    true,
                    format!("distance {distance}"),
                    json!({
                        "kind": "distance",
                        "distance": distance,
                        "witness": witness_json(&witness, &table),
                    }),
                ),
                DistanceOutcome::ExceedsBound { max_k } => Outcome::new(
                    false,
                    format!("distance exceeds {max_k}"),
                    json!({ "kind": "exceeds-bound", "max_k": max_k }),
                ),
                unreachable @ DistanceOutcome::Unreachable { .. } => Outcome::new(
                    false,
                    "unreachable".to_owned(),
                    serde_json::to_value(&unreachable)?,
                ),
            })
        }

        Command::Decide { pair, k, witness } => {
            let mut table = SymbolTable::new();
            let s = inputs.string("source", &pair.source, &mut table)?;
            let t = inputs.string("target", &pair.target, &mut table)?;
            let res = decide_td(&s, &t, k);
            let explored = res.explored;
            Ok(match res.verdict {
                Verdict::Reached { depth, witness: w } => {
                    if let Some(path) = &witness {
                        let steps: Vec<_> = w.iter().map(|x| x.step).collect();
                        write_file(path, &emit_schedule(&steps))?;
                    }
                    Outcome::new(
                        true,
                        format!("reached within {k} ({depth} contractions)"),
                        json!({
                            "kind": "reached",
                            "k": k,
                            "depth": depth,
                            "explored": explored,
                            "witness": witness_json(&w, &table),
                        }),
                    )
                }
                Verdict::NotWithinBound => Outcome::new(
                    false,
                    format!("not within {k}"),
                    json!({ "kind": "not-within-bound", "k": k, "explored": explored }),
                ),
            })
        }

        Command::Kernelize { pair, out_prefix } => {
            let mut table = SymbolTable::new();
            let s = inputs.string("source", &pair.source, &mut table)?;
            let t = inputs.string("target", &pair.target, &mut table)?;
            let kernel = kernelize(&s, &t)?;
            // kernel symbols get names of their own: K0, K1, ...
            let mut ktable = SymbolTable::new();
            for b in 0..kernel.provenance.len() {
                let sym = ktable.intern(&format!("K{b}"));
                debug_assert_eq!(sym, Kernel::block_symbol(b));
            }
            let blocks: Vec<Value> = kernel
                .provenance
                .iter()
                .enumerate()
                .map(|(b, run)| json!({ "symbol": format!("K{b}"), "tokens": table.render(run) }))
                .collect();
            if let Some(prefix) = &out_prefix {
                write_file(
                    &with_suffix(prefix, ".source.txt"),
                    &emit_strings(std::slice::from_ref(&kernel.s_prime), &ktable),
                )?;
                write_file(
                    &with_suffix(prefix, ".target.txt"),
                    &emit_strings(std::slice::from_ref(&kernel.t_prime), &ktable),
                )?;
            }
            Ok(Outcome::new(
                true,
                format!(
                    "|S'| = {}, |T'| = {}\nS' = {}\nT' = {}",
                    kernel.s_prime.len(),
                    kernel.t_prime.len(),
                    ktable.render(&kernel.s_prime),
                    ktable.render(&kernel.t_prime)
                ),
                json!({
                    "source": ktable.render(&kernel.s_prime),
                    "target": ktable.render(&kernel.t_prime),
                    "source_len": kernel.s_prime.len(),
                    "target_len": kernel.t_prime.len(),
                    "blocks": blocks,
                }),
            ))
        }

        Command::FptSolve { pair, k } => {
            let mut table = SymbolTable::new();
            let s = inputs.string("source", &pair.source, &mut table)?;
            let t = inputs.string("target", &pair.target, &mut table)?;
            let fpt = fpt_solve(&s, &t, k)?;
            let reached = fpt.result.is_reached();
            let summary = match (&fpt.rejected, fpt.result.depth()) {
                (Some(why), _) => format!("not within {k} (rejected: {why:?})"),
                (None, Some(depth)) => format!("reached within {k} ({depth} contractions)"),
                (None, None) => format!("not within {k}"),
            };
            Ok(Outcome::new(
                reached,
                summary,
                json!({
                    "reached": reached,
                    "k": k,
                    "depth": fpt.result.depth(),
                    "explored": fpt.result.explored,
                    "sizes": fpt.sizes,
                    "rejected": fpt.rejected,
                    "lifted_witness": fpt.lifted.as_deref().map(steps_json),
                }),
            ))
        }

        Command::Ces(CesCommand::Solve { graph, c, bounded }) => {
            let inst = CesInstance::new(inputs.graph(&graph)?, c)?;
            let sol = if bounded {
                ces_solve_bounded(&inst)
            } else {
                ces_solve_exact(&inst)?
            };
            Ok(Outcome::new(
                true,
                format!("cost {} with X = {:?}", sol.cost, sol.subset),
                json!({
                    "solver": if bounded { "bounded" } else { "exact" },
                    "c": c,
                    "cost": sol.cost,
                    // informational only: c|E| - cost
                    "profit": inst.trivial_cost() as i64 - sol.cost as i64,
                    "subset": sol.subset,
                }),
            ))
        }

        Command::Ces(CesCommand::Decide { graph, c, budget }) => {
            let inst = CesInstance::new(inputs.graph(&graph)?, c)?;
            let yes = ces_decide(&inst, budget)?;
            Ok(Outcome::new(
                yes,
                format!("{} (budget {budget})", if yes { "yes" } else { "no" }),
                json!({ "c": c, "budget": budget, "decision": yes }),
            ))
        }

        Command::Reduce(ReduceCommand::CliqueToCes { graph, k }) => {
            let g = inputs.graph(&graph)?;
            let reduced = clique_to_ces(&g, k)?;
            Ok(Outcome::new(
                true,
                format!("c = {}, r = {}", reduced.instance.c, reduced.r),
                json!({
                    "n": g.n(),
                    "m": g.m(),
                    "k": reduced.k,
                    "c": reduced.instance.c,
                    "r": reduced.r,
                }),
            ))
        }

        Command::Reduce(ReduceCommand::CesToTd {
            graph,
            c,
            r,
            d,
            p,
            force,
            out_prefix,
        }) => {
            let g = inputs.graph(&graph)?;
            let defaults = ReductionParams::full_scale(g.n(), g.m());
            let params = match (d, p, defaults) {
                (Some(d), Some(p), _) => ReductionParams { d, p },
                (d, p, Some(def)) => ReductionParams {
                    d: d.unwrap_or(def.d),
                    p: p.unwrap_or(def.p),
                },
                (_, _, None) => bail!("default p overflows for this graph; pass --d and --p"),
            };
            let options = BuildOptions {
                size_cap: size_cap()?,
                force,
            };
            let red = ces_to_td(&g, c, r, params, options)?;
            let source_path = with_suffix(&out_prefix, ".source.txt");
            let target_path = with_suffix(&out_prefix, ".target.txt");
            let manifest_path = with_suffix(&out_prefix, ".manifest.json");
            write_file(&source_path, &emit_strings(std::slice::from_ref(&red.source), &red.table))?;
            write_file(&target_path, &emit_strings(std::slice::from_ref(&red.target), &red.table))?;
            let mut manifest = red.manifest();
            manifest.source_file = Some(source_path.display().to_string());
            manifest.target_file = Some(target_path.display().to_string());
            write_file(&manifest_path, &(serde_json::to_string_pretty(&manifest)? + "\n"))?;
            Ok(Outcome::new(
                true,
                format!(
                    "|S| = {}, |T| = {}, budget {}, {}\nwrote {}",
                    red.source.len(),
                    red.target.len(),
                    red.budget,
                    serde_json::to_value(red.equivalence)?
                        .as_str()
                        .unwrap_or_default(),
                    manifest_path.display()
                ),
                json!({
                    "params": red.params,
                    "budget": red.budget,
                    "source_len": red.source.len(),
                    "target_len": red.target.len(),
                    "equivalence": red.equivalence,
                    "source_file": source_path.display().to_string(),
                    "target_file": target_path.display().to_string(),
                    "manifest_file": manifest_path.display().to_string(),
                }),
            ))
        }

        Command::Witness {
            manifest,
            subset,
            out,
        } => {
            let text = inputs.read("manifest", &manifest)?;
            let parsed: ReductionManifest = serde_json::from_str(&text)
                .with_context(|| format!("parsing {}", manifest.display()))?;
            // the manifest describes an instance that was already built once
            let red = parsed.rebuild(BuildOptions {
                size_cap: DEFAULT_SIZE_CAP,
                force: true,
            })?;
            let w = parse_subset(&subset, red.graph.n())?;
            let inst = CesInstance::new(red.graph.clone(), red.c)?;
            let cost = tdk_core::ces::ces_cost(&inst, &w)?;
            let sched = build_witness(&red, &w)?;
            let out = out.unwrap_or_else(|| {
                let stem = manifest.to_string_lossy();
                let stem = stem.strip_suffix(".manifest.json").unwrap_or(&stem);
                with_suffix(Path::new(stem), ".schedule.txt")
            });
            write_file(&out, &emit_schedule(&sched.steps))?;
            let length = sched.steps.len();
            let within = (length as i64) <= red.budget;
            Ok(Outcome::new(
                true,
                format!(
                    "{length} contractions (budget {}), cost(W) = {cost}, r = {}\nwrote {}",
                    red.budget,
                    red.r,
                    out.display()
                ),
                json!({
                    "subset": w,
                    "cost": cost,
                    "r": red.r,
                    "length": length,
                    "budget": red.budget,
                    "within_budget": within,
                    "phases": sched.phase_log,
                    "schedule_file": out.display().to_string(),
                }),
            ))
        }

        Command::Verify {
            target,
            schedule,
            source,
        } => {
            let mut table = SymbolTable::new();
            let s = inputs.string("source", &source, &mut table)?;
            let t = inputs.string("target", &target, &mut table)?;
            let text = inputs.read("schedule", &schedule)?;
            let steps = parse_schedule(&text)
                .with_context(|| format!("parsing {}", schedule.display()))?;
            Ok(
                match tdk_core::reductions::verify_contraction_sequence(&t, &steps, &s) {
                    VerifyOutcome::Verified { length } => Outcome::new(
                        true,
                        format!("verified ({length} contractions)"),
                        json!({ "verified": true, "length": length }),
                    ),
                    VerifyOutcome::Failed {
                        step_index,
                        failure,
                    } => {
                        let reason = match &failure {
                            VerifyFailure::InvalidStep { error } => error.to_string(),
                            VerifyFailure::FinalMismatch => "final string differs from source".into(),
                        };
                        Outcome::new(
                            false,
                            format!("failed at step {step_index}: {reason}"),
                            json!({
                                "verified": false,
                                "step_index": step_index,
                                "reason": reason,
                            }),
                        )
                    }
                },
            )
        }

        Command::Generate {
            seed: s,
            source_len,
            dups,
            out_prefix,
        } => {
            if source_len == 0 {
                bail!("--source-len must be positive");
            }
            *seed = Some(s);
            let inst = duplication_instance(&mut seeded(s), source_len, dups);
            let mut table = SymbolTable::new();
            for i in 0..source_len {
                table.intern(&format!("s{i}"));
            }
            let source = table.render(&inst.source);
            let target = table.render(&inst.target);
            if let Some(prefix) = &out_prefix {
                write_file(&with_suffix(prefix, ".source.txt"), &format!("{source}\n"))?;
                write_file(&with_suffix(prefix, ".target.txt"), &format!("{target}\n"))?;
            }
            Ok(Outcome::new(
                true,
                format!("{source}\n{target}"),
                json!({
                    "source": source,
                    "target": target,
                    "duplications": steps_json(&inst.duplications),
                }),
            ))
        }
    }
}
