//! `fewrel`: random walks on marked finite groups, Schreier systems, and
//! surjection-probability sweeps for few-relator random presentations.

mod manifest;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Instant, SystemTime};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use fewrel::config::{parse_lengths, ExperimentConfig};
use fewrel::experiments::{c_of_m, sample_presentation, sweep, trial_rng};
use fewrel::fqlin::{generating_tuple_count, generation_probability};
use fewrel::groups::{parse_group_text, GroupSpec};
use fewrel::walk::{MixingLength, MixingResult, WalkChain};
use fewrel::words::count_reduced;
use fewrel::SchreierSystem;

use manifest::RunManifest;

#[derive(Parser)]
#[command(
    name = "fewrel",
    version,
    about = "Few-relator random groups: walks, Schreier systems, surjection sweeps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify the non-backtracking walk on a marked group and track its TV distance.
    Walk(WalkArgs),
    /// Build the Schreier system of `ker(f: F_n -> J)` over F_q.
    Schreier(SchreierArgs),
    /// Run a surjection-probability sweep from a config file.
    Surject(SurjectArgs),
    /// Dump random presentations.
    Sample(SampleArgs),
    /// Evaluate the closed-form counts.
    Count(CountArgs),
}

#[derive(Args)]
struct WalkArgs {
    /// Group file (`order k` table or `perm degree d` format).
    group: PathBuf,
    /// Lengths to report: `N` (meaning 1..N), `A..B`, or a comma list.
    #[arg(long, default_value = "100")]
    l: String,
    /// TV tolerance for the mixing length.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Write `l,tv,target` rows here.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Print the full TV table, not only the summary.
    #[arg(long)]
    verbose: bool,
}

#[derive(Args)]
struct SchreierArgs {
    #[arg(long)]
    n: usize,
    /// Finite quotient, e.g. `cyclic:2`, `symmetric:3`, `trivial`.
    #[arg(long)]
    j: String,
    /// Images of x_1..x_n in J, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    f: Vec<usize>,
    #[arg(long)]
    q: u32,
    /// Print the action matrices.
    #[arg(long)]
    verbose: bool,
    /// Export the system summary as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct SurjectArgs {
    /// Experiment config (`key = value` lines).
    #[arg(
        required_unless_present = "from_manifest",
        conflicts_with = "from_manifest"
    )]
    config: Option<PathBuf>,
    /// Rerun the experiment recorded in a manifest.
    #[arg(long)]
    from_manifest: Option<PathBuf>,
    /// Override the config's master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the config's trial count.
    #[arg(long)]
    trials: Option<usize>,
    /// Write the CSV table here instead of stdout.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Write the run manifest here (default: next to the CSV, else stderr).
    #[arg(long)]
    json: Option<PathBuf>,
    /// Worker threads for Monte Carlo trials.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    verbose: bool,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    l: usize,
    #[arg(long, default_value_t = 1)]
    rho: usize,
    /// Number of presentations.
    #[arg(long, default_value_t = 1)]
    count: u64,
    #[arg(long)]
    seed: u64,
}

#[derive(Args)]
struct CountArgs {
    /// Free rank; with `--l` prints |S_l|, with `--index` prints c(M).
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    l: Option<usize>,
    /// Field size |E| for the generating-tuple count.
    #[arg(long, requires = "m")]
    e: Option<u64>,
    /// Tuple length m for the generating-tuple count.
    #[arg(long, requires = "e")]
    m: Option<u32>,
    /// Prime q for the probability that `--relators` vectors span F_q^dim.
    #[arg(long, requires_all = ["dim", "relators"])]
    q: Option<u32>,
    #[arg(long)]
    dim: Option<u32>,
    #[arg(long)]
    relators: Option<u32>,
    /// Kernel index M for the bound c(M) <= M n.
    #[arg(long, requires = "n")]
    index: Option<usize>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Walk(a) => cmd_walk(a),
        Command::Schreier(a) => cmd_schreier(a),
        Command::Surject(a) => cmd_surject(a),
        Command::Sample(a) => cmd_sample(a),
        Command::Count(a) => cmd_count(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            match e.downcast_ref::<fewrel::Error>() {
                Some(fewrel::Error::Capacity { .. }) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn write_out(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn walk_lengths(spec: &str) -> Result<Vec<usize>> {
    let spec = spec.trim();
    if let Ok(max) = spec.parse::<usize>() {
        if max == 0 {
            bail!("--l must be positive");
        }
        return Ok((1..=max).collect());
    }
    Ok(parse_lengths(spec, 0)?)
}

fn describe(len: MixingLength) -> String {
    match len {
        MixingLength::Reached(l) => l.to_string(),
        MixingLength::NotReached { max_l } => format!("not reached by l = {max_l}"),
    }
}

fn cmd_walk(args: WalkArgs) -> Result<()> {
    let text = std::fs::read_to_string(&args.group)
        .with_context(|| format!("reading {}", args.group.display()))?;
    let group = parse_group_text(&text).with_context(|| format!("in {}", args.group.display()))?;
    let lengths = walk_lengths(&args.l)?;
    let max_l = *lengths.iter().max().expect("nonempty");
    println!("group order {}, marks {:?}", group.order(), group.marks());
    let chain = WalkChain::build(group, None)?;
    if !chain.is_irreducible() {
        println!(
            "reducible: marks generate proper subgroup {}",
            chain.group().generated()
        );
        return Ok(());
    }
    println!("irreducible: yes");
    let period = chain.period()?;
    println!("period: {period}");
    if period == 2 {
        println!("index-2 subgroup H: {}", chain.index2_subgroup()?);
    }
    let profile = chain.tv_profile(max_l)?;
    let mut csv = String::from("l,tv,target\n");
    for point in profile.iter().filter(|p| lengths.contains(&p.l)) {
        let target = match (period, point.l % 2) {
            (1, _) => "G",
            (_, 0) => "H",
            _ => "G\\H",
        };
        writeln!(csv, "{},{:.6e},{target}", point.l, point.tv)?;
        if args.verbose {
            println!("l = {:>4}  tv = {:.6e}  ({target})", point.l, point.tv);
        }
    }
    match chain.mixing_length(args.tol, max_l)? {
        MixingResult::Aperiodic(len) => {
            println!("mixing length (tol {}): {}", args.tol, describe(len))
        }
        MixingResult::Periodic { even, odd, .. } => println!(
            "mixing length (tol {}): even steps {}, odd steps {}",
            args.tol,
            describe(even),
            describe(odd)
        ),
    }
    if let Some(path) = &args.csv {
        write_out(path, &csv)?;
    }
    Ok(())
}

fn cmd_schreier(args: SchreierArgs) -> Result<()> {
    if args.f.len() != args.n {
        bail!("--f lists {} images but --n is {}", args.f.len(), args.n);
    }
    let spec: GroupSpec = args.j.parse()?;
    let j = spec.build()?.mark(args.f.clone())?;
    let sys = SchreierSystem::build(j, args.q)?;
    println!(
        "J = {spec} (order {}), f = {:?}, q = {}",
        sys.j().order(),
        args.f,
        args.q
    );
    println!("D = {}", sys.dimension());
    println!("transversal:");
    for (c, t) in sys.transversal().iter().enumerate() {
        let word = if t.is_empty() {
            "e".to_string()
        } else {
            t.to_string()
        };
        println!("  {c}: {word}");
    }
    let m = sys.min_module_generators();
    if m.is_exact() {
        println!("minimal module generators: m = {} (exact)", m.upper);
    } else {
        println!("minimal module generators: {} <= m <= {}", m.lower, m.upper);
    }
    if args.verbose {
        for (g, mat) in sys.action_matrices().iter().enumerate() {
            println!("action of {g}:\n{mat}");
        }
    }
    if let Some(path) = &args.json {
        write_out(path, &sys.summary().to_json())?;
    }
    Ok(())
}

fn cmd_surject(args: SurjectArgs) -> Result<()> {
    let mut cfg = match (&args.config, &args.from_manifest) {
        (_, Some(path)) => RunManifest::load(path)?.config()?,
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            ExperimentConfig::parse(&text).with_context(|| format!("in {}", path.display()))?
        }
        (None, None) => unreachable!("clap requires one source"),
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(trials) = args.trials {
        cfg.trials = trials;
    }
    if let Some(threads) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("configuring the thread pool")?;
    }
    let started = SystemTime::now();
    let clock = Instant::now();
    let report = sweep(&cfg)?;
    let manifest = RunManifest::new("surject", &cfg, started, clock.elapsed());

    let m = report.min_generators;
    eprintln!(
        "D = {}, m in [{}, {}], walk on K'xJ has period {}",
        report.dimension, m.lower, m.upper, report.period
    );
    if args.verbose {
        for row in &report.rows {
            let eps = row.epsilon.map_or("-".to_string(), |e| format!("{e:.4}"));
            eprintln!(
                "l = {:>4}  P(l in K) = {:.4}  eps = {eps}",
                row.l, row.fiber_mass
            );
        }
    }
    let csv = report.to_csv();
    match &args.csv {
        Some(path) => write_out(path, &csv)?,
        None => print!("{csv}"),
    }
    let manifest_path = args
        .json
        .clone()
        .or_else(|| args.csv.as_ref().map(|p| p.with_extension("manifest.json")));
    match manifest_path {
        Some(path) => write_out(&path, &manifest.to_json())?,
        None => eprintln!("{}", manifest.to_json()),
    }
    Ok(())
}

fn cmd_sample(args: SampleArgs) -> Result<()> {
    if args.n < 2 {
        bail!("--n must be at least 2");
    }
    let mut out = String::new();
    for k in 0..args.count {
        let mut rng = trial_rng(args.seed, 0, k);
        for w in sample_presentation(args.n, args.l, args.rho, &mut rng) {
            writeln!(out, "{w}")?;
        }
        if k + 1 < args.count {
            out.push('\n');
        }
    }
    print!("{out}");
    Ok(())
}

fn cmd_count(args: CountArgs) -> Result<()> {
    let mut printed = false;
    if let (Some(n), Some(l)) = (args.n, args.l) {
        println!("|S_{l}| over {n} generators = {}", count_reduced(n, l)?);
        printed = true;
    }
    if let (Some(e), Some(m)) = (args.e, args.m) {
        println!(
            "generating {m}-tuples of E^{m} with |E| = {e}: {}",
            generating_tuple_count(e, m)
        );
        printed = true;
    }
    if let (Some(q), Some(dim), Some(r)) = (args.q, args.dim, args.relators) {
        fewrel::Modulus::new(q)?;
        println!(
            "P({r} uniform vectors span F_{q}^{dim}) = {:.10}",
            generation_probability(q, dim, r)
        );
        printed = true;
    }
    if let (Some(n), Some(index)) = (args.n, args.index) {
        println!("c({index}) <= {}", c_of_m(index, n));
        printed = true;
    }
    if !printed {
        bail!("nothing to count: pass --n and --l, --e and --m, --q/--dim/--relators, or --n and --index");
    }
    Ok(())
}
