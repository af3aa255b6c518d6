use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pstc_core::channel::{db_to_linear, ebn0_to_esn0};
use pstc_core::encoder::{input_words, trace_path};
use pstc_core::generators::parse_generator_list;
use pstc_core::gtf::{
    analyze, transfer_function, EventScope, GtfMode, Reference, TruncationPolicy, DEFAULT_DELTA_P, DEFAULT_TERM_CAP,
};
use pstc_core::search::{free_distance, search_with_checkpoint, singleton_bound, SearchSpec};
use pstc_core::sim::{manifest, run_experiment, write_fer_csv, write_file, write_json, ExperimentConfig};
use pstc_core::trellis::{build_trellis, EncoderConfig};

mod reproduce;

#[derive(Parser)]
#[command(name = "pstc", version, about = "Pragmatic space-time trellis codes over block-fading MIMO channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Encode information bits and print the transmitted super-symbols.
    Encode(EncodeArgs),
    /// Monte Carlo frame error rate over an SNR sweep.
    Simulate(SimulateArgs),
    /// Diversity and performance factor of one code.
    Analyze(AnalyzeArgs),
    /// Exhaustive generator search.
    Search(SearchArgs),
    /// Regenerate a table or figure data set.
    Reproduce(reproduce::ReproduceArgs),
}

#[derive(Args, Clone)]
struct CodeArgs {
    /// Octal generators, comma separated, e.g. "06,13,11,16".
    #[arg(long)]
    generators: String,
    /// Transmit antennas.
    #[arg(long)]
    n: usize,
    /// Input bits per step.
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Bits per symbol: 1 for BPSK, 2 for QPSK.
    #[arg(long, default_value_t = 1)]
    h: usize,
    /// Constraint length.
    #[arg(long)]
    mu: usize,
    /// Super-symbols per frame.
    #[arg(long = "N", default_value_t = 130)]
    frame_len: usize,
}

#[derive(Args)]
struct EncodeArgs {
    #[command(flatten)]
    code: CodeArgs,
    /// Information bits as a 0/1 string; random bits when omitted.
    #[arg(long)]
    bits: Option<String>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args)]
struct SimulateArgs {
    /// JSON experiment config.
    #[arg(long)]
    config: PathBuf,
    /// CSV output path; overrides the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Manifest output path; overrides the config.
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Overwrite existing outputs.
    #[arg(long)]
    force: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum RefArg {
    All,
    Fixed,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScopeArg {
    Time0,
    AllStarts,
}

#[derive(Args, Clone)]
struct PolicyArgs {
    /// Hamming-weight truncation threshold.
    #[arg(long = "delta-h")]
    delta_h: Option<u32>,
    /// Eigen-product ratio threshold.
    #[arg(long = "delta-p", default_value_t = DEFAULT_DELTA_P)]
    delta_p: f64,
    /// Largest number of terms per trellis node.
    #[arg(long = "term-cap", default_value_t = DEFAULT_TERM_CAP)]
    term_cap: usize,
    /// Reference codeword mode.
    #[arg(long, value_enum, default_value_t = RefArg::All)]
    reference: RefArg,
}

impl PolicyArgs {
    fn policy(&self, d_f: u32) -> TruncationPolicy {
        TruncationPolicy {
            delta_h: Some(self.delta_h.unwrap_or(2 * d_f + 1)),
            delta_p: Some(self.delta_p),
            term_cap: self.term_cap,
            ..TruncationPolicy::default()
        }
    }

    fn mode(&self, scope: ScopeArg) -> GtfMode {
        let r = match self.reference {
            RefArg::All => Reference::AllCodewords,
            RefArg::Fixed => Reference::Fixed(None),
        };
        let s = match scope {
            ScopeArg::Time0 => EventScope::Time0,
            ScopeArg::AllStarts => EventScope::AllStarts,
        };
        GtfMode::new(r, s)
    }
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    code: CodeArgs,
    /// Fading blocks per frame.
    #[arg(long = "L", default_value_t = 1)]
    blocks: usize,
    /// Receive antennas.
    #[arg(long, default_value_t = 1)]
    m: usize,
    #[command(flatten)]
    policy: PolicyArgs,
    #[arg(long, value_enum, default_value_t = ScopeArg::Time0)]
    scope: ScopeArg,
    /// Eb/N0 points in dB for the asymptotic bound.
    #[arg(long, value_delimiter = ',')]
    ebn0: Vec<f64>,
    /// Write the transfer-function terms to this file.
    #[arg(long)]
    dump: Option<PathBuf>,
    /// Print JSON instead of text.
    #[arg(long)]
    json: bool,
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long, default_value_t = 1)]
    h: usize,
    #[arg(long)]
    mu: usize,
    #[arg(long = "L", default_value_t = 1)]
    blocks: usize,
    #[arg(long, default_value_t = 1)]
    m: usize,
    #[arg(long = "N", default_value_t = 130)]
    frame_len: usize,
    #[command(flatten)]
    policy: PolicyArgs,
    /// Evaluate one representative per symmetry orbit.
    #[arg(long)]
    symmetry: bool,
    /// Relative performance-factor spread of a class.
    #[arg(long = "class-tolerance", default_value_t = pstc_core::search::DEFAULT_CLASS_TOLERANCE)]
    class_tolerance: f64,
    /// Resumable progress file.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// CSV output path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON manifest path.
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Codes to print.
    #[arg(long, default_value_t = 20)]
    top: usize,
    #[arg(long)]
    force: bool,
}

fn parse_bits(s: &str) -> Result<Vec<u8>> {
    s.chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            _ => bail!("invalid bit '{c}'"),
        })
        .collect()
}

fn encode(a: EncodeArgs) -> Result<()> {
    let c = &a.code;
    let cfg = EncoderConfig::new(c.n, 1, c.k, c.h, c.mu, c.frame_len);
    let gens = parse_generator_list(&c.generators, c.k, c.mu)?;
    let t = build_trellis(&gens, &cfg)?;
    let bits = match &a.bits {
        Some(s) => parse_bits(s)?,
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
            (0..cfg.info_bits()).map(|_| rng.random::<bool>() as u8).collect()
        }
    };
    let words = input_words(&bits, &cfg)?;
    println!("# code {gens}, {} states", t.num_states());
    println!("t\tstate\tinput\toutput\tsymbols");
    for (i, (s, u)) in trace_path(&t, &words).into_iter().enumerate() {
        let w = t.output_word(s, u);
        let syms: Vec<String> = t
            .label(s, u)
            .symbols
            .iter()
            .map(|z| format!("{:+.4}{:+.4}j", z.re, z.im))
            .collect();
        println!(
            "{i}\t{s}\t{u}\t{w:0width$b}\t{}",
            syms.join(" "),
            width = c.n * c.h
        );
    }
    Ok(())
}

fn simulate(a: SimulateArgs) -> Result<()> {
    let mut cfg = ExperimentConfig::from_path(&a.config)?;
    if a.out.is_some() {
        cfg.output.csv = a.out.clone();
    }
    if a.manifest.is_some() {
        cfg.output.manifest = a.manifest.clone();
    }
    for p in [&cfg.output.csv, &cfg.output.manifest].into_iter().flatten() {
        pstc_core::sim::check_collision(p, a.force)?;
    }
    let (records, curve) = run_experiment(&cfg)?;
    let mut buf = Vec::new();
    write_fer_csv(&mut buf, &records)?;
    match &cfg.output.csv {
        Some(p) => write_file(p, &buf, a.force)?,
        None => print!("{}", String::from_utf8(buf)?),
    }
    if let Some(p) = &cfg.output.manifest {
        let extra = serde_json::json!({ "bound": curve, "records": records });
        write_json(p, &manifest(&cfg, extra), a.force)?;
    }
    Ok(())
}

fn analyze_cmd(a: AnalyzeArgs) -> Result<()> {
    let c = &a.code;
    let cfg = EncoderConfig::new(c.n, a.m, c.k, c.h, c.mu, c.frame_len);
    let gens = parse_generator_list(&c.generators, c.k, c.mu)?;
    let d_f = free_distance(&gens, &cfg)?;
    let policy = a.policy.policy(d_f);
    let mode = a.policy.mode(a.scope);
    let cm = analyze(&gens, &cfg, a.blocks, &policy, &mode)?;
    let sb = singleton_bound(c.n, c.k, c.h, a.blocks)?;
    if let Some(p) = &a.dump {
        let poly = transfer_function(&gens, &cfg, a.blocks, &policy, &mode)?;
        let mut buf = Vec::new();
        poly.dump(&mut buf)?;
        write_file(p, &buf, a.force)?;
    }
    let bounds: Vec<(f64, f64)> = a
        .ebn0
        .iter()
        .map(|&db| {
            let es = ebn0_to_esn0(db_to_linear(db), c.k, c.n, c.h, c.mu, c.frame_len, false);
            (db, cm.asymptotic_bound(es))
        })
        .collect();
    if a.json {
        let v = serde_json::json!({
            "generators": gens.to_string(),
            "d_f": d_f,
            "eta_min": cm.eta_min,
            "diversity_order": cm.diversity_order(),
            "singleton_bound": sb,
            "f_min_per_frame": cm.f_min_per_frame(),
            "frame_multiplier": cm.frame_multiplier,
            "min_terms": cm.min_terms,
            "terms": cm.terms.len(),
            "delta_h": policy.delta_h,
            "delta_p": policy.delta_p,
            "asymptotic_bound": bounds,
        });
        println!("{}", serde_json::to_string_pretty(&v)?);
        return Ok(());
    }
    println!("code                {gens}");
    println!("d_f                 {d_f}");
    println!("eta_min             {}", cm.eta_min);
    println!("eta_min*m           {}", cm.diversity_order());
    println!("singleton bound     {sb}");
    println!("F_min({})/N          {:.5}", a.m, cm.f_min_per_frame());
    println!("terms (min / all)   {} / {}", cm.min_terms, cm.terms.len());
    println!("delta_h, delta_p    {}, {}", policy.delta_h.unwrap_or(0), a.policy.delta_p);
    for (db, p) in bounds {
        println!("P_asym @ {db} dB     {p:.3e}");
    }
    Ok(())
}

fn search_cmd(a: SearchArgs) -> Result<()> {
    if a.policy.delta_h.is_none() {
        bail!("--delta-h is required for a search");
    }
    let mut spec = SearchSpec::new(a.n, a.k, a.h, a.mu, a.blocks, a.m, a.frame_len);
    spec.policy = a.policy.policy(0);
    spec.mode = a.policy.mode(ScopeArg::Time0);
    spec.symmetry = a.symmetry;
    spec.class_tolerance = a.class_tolerance;
    for p in [&a.out, &a.manifest].into_iter().flatten() {
        pstc_core::sim::check_collision(p, a.force)?;
    }
    let r = search_with_checkpoint(&spec, a.checkpoint.as_deref())?;
    println!(
        "candidates {}  evaluated {}  catastrophic {}  singleton bound {}",
        r.counts.enumerated, r.counts.evaluated, r.counts.catastrophic, r.singleton_bound
    );
    println!("diversity histogram {:?}", r.counts.diversity_histogram);
    let shown: Vec<u64> = r.class_sizes.iter().take(10).copied().collect();
    println!("class sizes {shown:?}");
    println!("generators\td_f\teta_min\tF_min/N\tclass\tmultiplicity");
    for c in r.codes.iter().take(a.top) {
        println!(
            "{}\t{}\t{}\t{:.5}\t{}\t{}",
            c.generators, c.d_f, c.eta_min, c.f_min, c.class, c.multiplicity
        );
    }
    if let Some(p) = &a.out {
        let mut buf = Vec::new();
        r.write_csv(&mut buf)?;
        write_file(p, &buf, a.force)?;
    }
    if let Some(p) = &a.manifest {
        write_json(p, &r.manifest(), a.force)?;
    }
    Ok(())
}

fn run() -> Result<()> {
    match Cli::parse().command {
        Command::Encode(a) => encode(a),
        Command::Simulate(a) => simulate(a).context("simulate failed"),
        Command::Analyze(a) => analyze_cmd(a),
        Command::Search(a) => search_cmd(a),
        Command::Reproduce(a) => reproduce::run(a),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
