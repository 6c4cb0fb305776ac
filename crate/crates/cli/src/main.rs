//! `lrc`: construct, analyze and verify locally recoverable codes stored as
//! JSON codebooks.
//!
//! Exit status: 0 on success, 1 when a checked property fails, 2 on usage,
//! I/O or format errors.

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use lrc_core::code::{check_singleton, is_mds, min_distance, parse_code_json, systematic_from_codebook};
use lrc_core::construct::{twist, ConstructionSpec, TwistSpec};
use lrc_core::locality::{information_locality, largest_search_cap, locality_profile};
use lrc_core::repair::{local_repair, recover_erasures, ErasurePattern, Recovery};
use lrc_core::structure::verify_structure;
use lrc_core::subcode::{check_locality_bound, run_subcode_retaining, ForcedStep, Strategy};
use lrc_core::{Codebook, Error, Limits, SystematicCode};

#[derive(Parser)]
#[command(name = "lrc", version, about = "Exhaustive analysis of locally recoverable codes")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Input file, `-` for stdin.
    #[arg(short, long, global = true, default_value = "-")]
    input: PathBuf,
    /// Output file, `-` for stdout.
    #[arg(short, long, global = true, default_value = "-")]
    output: PathBuf,
    /// Emit machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Maximum number of candidate subsets per repair-set search.
    #[arg(long, global = true)]
    cap: Option<u64>,
    /// Print progress details to stderr.
    #[arg(long, global = true)]
    verbose: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Build a codebook from a construction spec.
    Construct,
    /// Distance, Singleton bound and locality profile of a codebook.
    Analyze,
    /// Check n >= k + ceil(k/r) + d - 2.
    VerifyBound {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        r: usize,
    },
    /// Run the sub-code extraction procedure and print its trace.
    SubcodeTrace {
        #[arg(long)]
        r: usize,
        /// JSON list of forced steps, e.g. `[{"i":1,"S":[2,5]}]`.
        #[arg(long)]
        forced: Option<PathBuf>,
    },
    /// Verify the structure of a code meeting the locality bound.
    VerifyStructure {
        #[arg(long)]
        r: usize,
    },
    /// Apply per-coordinate alphabet permutations.
    Twist {
        #[arg(long, conflicts_with = "perms", required_unless_present = "perms")]
        seed: Option<u64>,
        /// JSON file `{"perms": [[...], ...]}`.
        #[arg(long)]
        perms: Option<PathBuf>,
    },
    /// Recover an erased word by codebook scan.
    Recover {
        /// JSON array with `null` at erased positions.
        #[arg(long)]
        pattern: PathBuf,
        /// Also repair each erasure from its witness set.
        #[arg(long)]
        local: bool,
    },
}

/// What a successful run concluded.
enum Verdict {
    Holds,
    Fails,
}

struct Context_ {
    global: Global,
}

impl Context_ {
    fn read(&self, path: &PathBuf) -> Result<String> {
        if path.as_os_str() == "-" {
            let mut text = String::new();
            io::stdin().read_to_string(&mut text).context("reading stdin")?;
            Ok(text)
        } else {
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
        }
    }

    fn write(&self, text: &str) -> Result<()> {
        if self.global.output.as_os_str() == "-" {
            let mut out = io::stdout().lock();
            match writeln!(out, "{text}").and_then(|_| out.flush()) {
                Err(e) if e.kind() == io::ErrorKind::BrokenPipe => {}
                other => other.context("writing stdout")?,
            }
        } else {
            fs::write(&self.global.output, format!("{text}\n"))
                .with_context(|| format!("writing {}", self.global.output.display()))?;
        }
        Ok(())
    }

    fn emit(&self, value: &Value, text: impl FnOnce() -> String) -> Result<()> {
        if self.global.json {
            self.write(&serde_json::to_string_pretty(value)?)
        } else {
            self.write(&text())
        }
    }

    fn note(&self, msg: impl FnOnce() -> String) {
        if self.global.verbose {
            eprintln!("{}", msg());
        }
    }

    fn limits(&self) -> Limits {
        let mut limits = Limits::default();
        if let Some(cap) = self.global.cap {
            limits.max_subsets = cap;
        }
        limits
    }

    fn codebook(&self) -> Result<(Codebook, Option<usize>)> {
        let text = self.read(&self.global.input)?;
        let (code, k) = parse_code_json(&text).context("parsing codebook")?;
        Ok((code.relimit(self.limits())?, k))
    }

    fn systematic(&self) -> Result<SystematicCode> {
        let (code, k) = self.codebook()?;
        let k = match k.or_else(|| code.dimension()) {
            Some(k) => k,
            None => bail!("code size {} is not a power of {}", code.len(), code.q()),
        };
        Ok(systematic_from_codebook(code, k)?)
    }
}

fn coords(set: &[usize]) -> String {
    let items: Vec<String> = set.iter().map(|c| (c + 1).to_string()).collect();
    format!("{{{}}}", items.join(","))
}

fn construct(ctx: &Context_) -> Result<Verdict> {
    let spec: ConstructionSpec =
        serde_json::from_str(&ctx.read(&ctx.global.input)?).context("parsing construction spec")?;
    let code = spec.build()?;
    ctx.note(|| format!("built {} words of length {}", code.code().len(), code.n()));
    ctx.write(&code.to_json())?;
    Ok(Verdict::Holds)
}

fn analyze(ctx: &Context_) -> Result<Verdict> {
    let (code, k) = ctx.codebook()?;
    let size_cap = largest_search_cap(&code);
    ctx.note(|| format!("searching repair sets up to size {size_cap}"));
    let d = min_distance(&code)?;
    let singleton = check_singleton(&code)?;
    let mds = code.dimension().map(|_| is_mds(&code)).transpose()?;
    let profile = locality_profile(&code, size_cap)?;
    let systematic = k
        .or_else(|| code.dimension())
        .and_then(|k| systematic_from_codebook(code.clone(), k).ok());
    let info_locality = systematic
        .as_ref()
        .map(|s| information_locality(s, size_cap))
        .transpose()?;

    let value = json!({
        "q": code.q(),
        "n": code.n(),
        "size": code.len(),
        "k": systematic.as_ref().map(SystematicCode::k).or(code.dimension()),
        "min_distance": d,
        "singleton": singleton,
        "is_mds": mds,
        "systematic": systematic.is_some(),
        "information_locality": info_locality.flatten(),
        "size_cap": size_cap,
        "locality_profile": profile,
    });
    ctx.emit(&value, || {
        let mut text = format!("q = {}, n = {}, K = {}\n", code.q(), code.n(), code.len());
        text += &format!("min distance d = {d}\n");
        text += &format!(
            "singleton: {} >= {:.3} ({}), slack {:.3}\n",
            singleton.lhs,
            singleton.rhs,
            if singleton.holds { "holds" } else { "VIOLATED" },
            singleton.slack
        );
        if let Some(mds) = mds {
            text += &format!("MDS: {mds}\n");
        }
        match (&systematic, info_locality.flatten()) {
            (Some(s), Some(r)) => text += &format!("systematic with k = {}, information locality {r}\n", s.k()),
            (Some(s), None) => text += &format!("systematic with k = {}, no information locality within {size_cap}\n", s.k()),
            (None, _) => text += "not systematic\n",
        }
        for e in &profile.entries {
            match &e.witness {
                Some(w) => text += &format!("  coordinate {}: locality {} via {}\n", e.coord + 1, w.len(), coords(w)),
                None => text += &format!("  coordinate {}: no repair set\n", e.coord + 1),
            }
        }
        text.trim_end().to_string()
    })?;
    Ok(if singleton.holds { Verdict::Holds } else { Verdict::Fails })
}

fn verify_bound(ctx: &Context_, n: usize, k: usize, d: usize, r: usize) -> Result<Verdict> {
    let report = check_locality_bound(n, k, d, r)?;
    ctx.emit(&serde_json::to_value(&report)?, || {
        let status = if report.optimal {
            "optimal"
        } else if report.holds {
            "holds"
        } else {
            "violated"
        };
        format!("n = {n} vs k + ceil(k/r) + d - 2 = {}: {status}", report.rhs)
    })?;
    Ok(if report.holds { Verdict::Holds } else { Verdict::Fails })
}

fn subcode_trace(ctx: &Context_, r: usize, forced: Option<&PathBuf>) -> Result<Verdict> {
    let code = ctx.systematic()?;
    let strategy = match forced {
        Some(path) => {
            let steps: Vec<ForcedStep> = serde_json::from_str(&ctx.read(path)?).context("parsing forced steps")?;
            Strategy::forced(steps)
        }
        None => Strategy::auto(),
    };
    let trace = run_subcode_retaining(&code, r, &strategy)?;
    if let Some(subs) = &trace.subcodes {
        ctx.note(|| {
            let sizes: Vec<String> = subs.iter().map(|c| c.len().to_string()).collect();
            format!("sub-code sizes: {} -> {}", trace.initial_size, sizes.join(" -> "))
        });
    }
    ctx.emit(&serde_json::to_value(&trace)?, || {
        let mut text = format!("|C_0| = {}\n", trace.initial_size);
        for (j, s) in trace.steps.iter().enumerate() {
            text += &format!(
                "step {}: i = {}, S = {}, T = {}, sigma = {:?}, |C_{}| = {}\n",
                j + 1,
                s.i + 1,
                coords(&s.set),
                coords(&s.new),
                s.sigma,
                j + 1,
                s.size_after
            );
        }
        text += &format!("ell = {}, R = {}", trace.ell, coords(&trace.fixed));
        text
    })?;
    Ok(Verdict::Holds)
}

fn verify_structure_cmd(ctx: &Context_, r: usize) -> Result<Verdict> {
    let code = ctx.systematic()?;
    match verify_structure(&code, r) {
        Ok(report) => {
            ctx.emit(&serde_json::to_value(&report)?, || {
                let mut text = format!("groups: {}\n", report.groups.iter().map(|g| coords(g)).collect::<Vec<_>>().join(" "));
                text += &format!(
                    "I = {}, L = {}, H = {}\n",
                    coords(&report.partition.info),
                    coords(&report.partition.light),
                    coords(&report.partition.heavy)
                );
                for (id, v) in &report.items {
                    text += &format!("{id}: {} ({})\n", if v.pass { "pass" } else { "FAIL" }, v.detail);
                }
                text.trim_end().to_string()
            })?;
            Ok(if report.all_pass() { Verdict::Holds } else { Verdict::Fails })
        }
        Err(Error::NotApplicable(reason)) => {
            let value = json!({ "optimal": false, "not_applicable": reason });
            ctx.emit(&value, || format!("not applicable: {reason}"))?;
            Ok(Verdict::Holds)
        }
        Err(e) => Err(e.into()),
    }
}

fn twist_cmd(ctx: &Context_, seed: Option<u64>, perms: Option<&PathBuf>) -> Result<Verdict> {
    let spec = match (seed, perms) {
        (Some(seed), _) => TwistSpec::Seed { seed },
        (None, Some(path)) => serde_json::from_str(&ctx.read(path)?).context("parsing twist spec")?,
        (None, None) => bail!("either --seed or --perms is required"),
    };
    let (code, k) = ctx.codebook()?;
    let twisted = twist(&code, &spec)?;
    let out = match k {
        Some(k) => systematic_from_codebook(twisted, k)?.to_json(),
        None => twisted.to_json(),
    };
    ctx.write(&out)?;
    Ok(Verdict::Holds)
}

fn recover(ctx: &Context_, pattern: &PathBuf, local: bool) -> Result<Verdict> {
    let (code, _) = ctx.codebook()?;
    let pattern: ErasurePattern = serde_json::from_str(&ctx.read(pattern)?).context("parsing erasure pattern")?;
    let recovery = recover_erasures(&code, &pattern)?;
    let local_result = if local {
        let profile = locality_profile(&code, largest_search_cap(&code))?;
        Some(match local_repair(&code, &pattern, &profile) {
            Ok(map) => {
                let fixes: serde_json::Map<String, Value> = map
                    .iter()
                    .map(|(c, fix)| Ok(((c + 1).to_string(), serde_json::to_value(fix)?)))
                    .collect::<Result<_>>()?;
                json!({ "repaired": fixes })
            }
            Err(Error::NeedsGlobalRepair { coord }) => json!({ "needs_global_repair": coord + 1 }),
            Err(e) => json!({ "error": e.to_string() }),
        })
    } else {
        None
    };
    let value = json!({ "recovery": recovery, "local": local_result });
    ctx.emit(&value, || {
        let mut text = match &recovery {
            Recovery::Unique { codeword } => format!("unique: {codeword:?}"),
            Recovery::Ambiguous { count } => format!("ambiguous: {count} matching codewords"),
            Recovery::Inconsistent => "inconsistent: no codeword matches".to_string(),
        };
        if let Some(l) = &local_result {
            text += &format!("\nlocal: {l}");
        }
        text
    })?;
    Ok(match recovery {
        Recovery::Unique { .. } => Verdict::Holds,
        _ => Verdict::Fails,
    })
}

fn run(cli: Cli) -> Result<Verdict> {
    let command = cli.command;
    let ctx = Context_ { global: cli.global };
    match &command {
        Command::Construct => construct(&ctx),
        Command::Analyze => analyze(&ctx),
        Command::VerifyBound { n, k, d, r } => verify_bound(&ctx, *n, *k, *d, *r),
        Command::SubcodeTrace { r, forced } => subcode_trace(&ctx, *r, forced.as_ref()),
        Command::VerifyStructure { r } => verify_structure_cmd(&ctx, *r),
        Command::Twist { seed, perms } => twist_cmd(&ctx, *seed, perms.as_ref()),
        Command::Recover { pattern, local } => recover(&ctx, pattern, *local),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Verdict::Holds) => ExitCode::SUCCESS,
        Ok(Verdict::Fails) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
