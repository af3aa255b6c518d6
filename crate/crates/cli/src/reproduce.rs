//! Recipes that regenerate the published tables and figure data.

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::Result;
use clap::{Args, ValueEnum};
use serde_json::json;

use pstc_core::channel::{db_to_linear, ebn0_to_esn0};
use pstc_core::generators::parse_generator_list;
use pstc_core::gtf::{analyze, GtfMode, TruncationPolicy};
use pstc_core::search::{free_distance, search, singleton_bound, SearchReport, SearchSpec};
use pstc_core::sim::{
    check_collision, manifest, run_experiment, write_fer_csv, write_file, write_json, BoundSpec, ExperimentConfig,
    FerRecord, StopRule,
};
use pstc_core::trellis::EncoderConfig;

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Target {
    Table1,
    Table3,
    Table4,
    Fig6,
    Fig7,
    Fig8,
    Fig9,
}

#[derive(Args)]
pub struct ReproduceArgs {
    #[arg(value_enum)]
    target: Target,
    /// Output directory; defaults to `results/<target>`.
    #[arg(long = "out-dir")]
    out_dir: Option<PathBuf>,
    /// Smaller stop rule for a fast preview.
    #[arg(long)]
    quick: bool,
    /// Skip Monte Carlo columns of the tables.
    #[arg(long = "no-sim")]
    no_sim: bool,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    force: bool,
}

struct Ctx {
    dir: PathBuf,
    quick: bool,
    sim: bool,
    seed: u64,
    force: bool,
}

impl Ctx {
    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    fn stop(&self) -> StopRule {
        if self.quick {
            StopRule {
                min_errors: 100,
                max_frames: 50_000,
            }
        } else {
            StopRule::default()
        }
    }

    fn write_rows(&self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header)?;
        for r in rows {
            w.write_record(r)?;
        }
        write_file(&self.path(name), &w.into_inner()?, self.force)?;
        println!("wrote {}", self.path(name).display());
        Ok(())
    }

    /// Simulates one curve and writes `<name>.csv` plus `<name>.json`.
    fn curve(&self, name: &str, mut cfg: ExperimentConfig) -> Result<Vec<FerRecord>> {
        cfg.seed = self.seed;
        cfg.stop = self.stop();
        let t = Instant::now();
        let (records, bound) = run_experiment(&cfg)?;
        let mut buf = Vec::new();
        write_fer_csv(&mut buf, &records)?;
        write_file(&self.path(&format!("{name}.csv")), &buf, self.force)?;
        let extra = json!({ "bound": bound, "elapsed_s": t.elapsed().as_secs_f64() });
        write_json(&self.path(&format!("{name}.json")), &manifest(&cfg, extra), self.force)?;
        println!("wrote {} ({:.1?})", self.path(&format!("{name}.csv")).display(), t.elapsed());
        Ok(records)
    }

    fn fer_at(&self, cfg: ExperimentConfig) -> Result<Option<FerRecord>> {
        if !self.sim {
            return Ok(None);
        }
        let mut cfg = cfg;
        cfg.seed = self.seed;
        cfg.stop = self.stop();
        Ok(run_experiment(&cfg)?.0.first().copied())
    }
}

fn fmt(x: f64) -> String {
    format!("{x:.5}")
}

fn sci(x: f64) -> String {
    format!("{x:.3e}")
}

fn fer_cols(r: Option<FerRecord>) -> [String; 3] {
    match r {
        Some(r) => [sci(r.fer), r.frames.to_string(), r.errors.to_string()],
        None => Default::default(),
    }
}

struct Analysis {
    d_f: u32,
    eta_min: usize,
    f_min: f64,
    bound: f64,
}

#[allow(clippy::too_many_arguments)]
fn analysis(
    g: &str,
    n: usize,
    k: usize,
    h: usize,
    mu: usize,
    frame_len: usize,
    blocks: usize,
    m: usize,
    delta_h: u32,
    mode: &GtfMode,
    ebn0_db: f64,
) -> Result<Analysis> {
    let cfg = EncoderConfig::new(n, m, k, h, mu, frame_len);
    let gens = parse_generator_list(g, k, mu)?;
    let cm = analyze(&gens, &cfg, blocks, &TruncationPolicy::with_delta_h(delta_h), mode)?;
    let es = ebn0_to_esn0(db_to_linear(ebn0_db), k, n, h, mu, frame_len, false);
    Ok(Analysis {
        d_f: free_distance(&gens, &cfg)?,
        eta_min: cm.eta_min,
        f_min: cm.f_min_per_frame(),
        bound: cm.asymptotic_bound(es),
    })
}

fn sweep(lo: i32, hi: i32, step: i32) -> Vec<f64> {
    (lo..=hi).step_by(step as usize).map(f64::from).collect()
}

fn table1(c: &Ctx) -> Result<()> {
    let mut rows = Vec::new();
    for g in ["06,13,11,16", "05,11,06,16", "01,02,04,10"] {
        let a = analysis(g, 2, 2, 2, 2, 130, 1, 2, 9, &GtfMode::time0(), 15.0)?;
        let f0 = analysis(g, 2, 2, 2, 2, 130, 1, 2, 9, &GtfMode::fixed_zero(), 15.0)?;
        let mut e = ExperimentConfig::new(g, 2, 2, 2, 2, 130, 1, 2);
        e.ebn0_db = vec![15.0];
        let fer = fer_cols(c.fer_at(e)?);
        let mut row = vec![
            format!("({g})"),
            a.d_f.to_string(),
            (a.eta_min * 2).to_string(),
            fmt(a.f_min),
            fmt(f0.f_min),
            sci(a.bound),
        ];
        row.extend(fer);
        rows.push(row);
    }
    c.write_rows(
        "table1.csv",
        &["generators", "d_f", "eta_min_m", "f_min_N", "f_min_c0_N", "p_asym_15db", "fer_15db", "frames", "errors"],
        &rows,
    )
}

/// Rate 1/2 codes with the best free distance on the Gaussian channel.
const AWGN_CODES: [(usize, &str); 6] = [
    (2, "1,3"),
    (3, "5,7"),
    (4, "15,17"),
    (5, "23,35"),
    (6, "53,75"),
    (7, "133,171"),
];

fn awgn_delta_h(mu: usize) -> Result<u32> {
    let g = AWGN_CODES.iter().find(|c| c.0 == mu).map(|c| c.1).unwrap_or("1,3");
    let gens = parse_generator_list(g, 1, mu)?;
    Ok(2 * free_distance(&gens, &EncoderConfig::new(2, 1, 1, 1, mu, 130))? - 1)
}

fn table3(c: &Ctx) -> Result<()> {
    let listed = ["1,2", "3,4", "13,15", "23,31"];
    let mut rows = Vec::new();
    for (i, mu) in (2..=5).enumerate() {
        let dh = awgn_delta_h(mu)?;
        let g = listed[i];
        let g1 = AWGN_CODES[i].1;
        let a = analysis(g, 2, 1, 1, mu, 130, 1, 1, dh, &GtfMode::time0(), 20.0)?;
        let a1 = analysis(g1, 2, 1, 1, mu, 130, 1, 1, dh, &GtfMode::time0(), 20.0)?;
        let mut spec = SearchSpec::new(2, 1, 1, mu, 1, 1, 130);
        spec.policy = TruncationPolicy::with_delta_h(dh);
        let best = search(&spec)?;
        let top = best.top().expect("search found a code");
        let sim = |g: &str| -> Result<String> {
            let mut e = ExperimentConfig::new(g, 2, 1, 1, mu, 130, 1, 1);
            e.ebn0_db = vec![20.0];
            Ok(c.fer_at(e)?.map(|r| sci(r.fer)).unwrap_or_default())
        };
        rows.push(vec![
            mu.to_string(),
            format!("({g})"),
            format!("({g1})"),
            a.d_f.to_string(),
            a.eta_min.to_string(),
            fmt(a.f_min),
            a1.d_f.to_string(),
            fmt(a1.f_min),
            sim(g)?,
            sim(g1)?,
            dh.to_string(),
            format!("({})", top.generators.octal().join(",")),
            fmt(top.f_min),
        ]);
    }
    c.write_rows(
        "table3.csv",
        &[
            "mu",
            "generators",
            "generators_awgn",
            "d_f",
            "eta_min",
            "f_min_N",
            "d_f_awgn",
            "f_min_awgn_N",
            "fer_20db",
            "fer_awgn_20db",
            "delta_h",
            "search_best",
            "search_best_f_min_N",
        ],
        &rows,
    )
}

fn table4(c: &Ctx) -> Result<()> {
    let listed = ["1,3", "5,7", "07,15", "13,36", "57,75", "115,163"];
    let sb = singleton_bound(2, 1, 1, 8)?;
    let mut rows = Vec::new();
    for (i, mu) in (2..=7).enumerate() {
        let dh = awgn_delta_h(mu)?;
        let a = analysis(listed[i], 2, 1, 1, mu, 128, 8, 1, dh, &GtfMode::time0(), 20.0)?;
        let a1 = analysis(AWGN_CODES[i].1, 2, 1, 1, mu, 128, 8, 1, dh, &GtfMode::time0(), 20.0)?;
        rows.push(vec![
            mu.to_string(),
            format!("({})", listed[i]),
            a.eta_min.to_string(),
            sci(a.f_min),
            format!("({})", AWGN_CODES[i].1),
            a1.eta_min.to_string(),
            sci(a1.f_min),
            dh.to_string(),
            sb.to_string(),
        ]);
    }
    c.write_rows(
        "table4.csv",
        &[
            "mu",
            "generators",
            "eta_min",
            "f_min_N",
            "generators_awgn",
            "eta_min_awgn",
            "f_min_awgn_N",
            "delta_h",
            "singleton_bound",
        ],
        &rows,
    )
}

fn fig6(c: &Ctx) -> Result<()> {
    for m in [1usize, 2, 4] {
        for l in [1usize, 2, 5, 130] {
            let mut e = ExperimentConfig::new("133,171", 2, 1, 1, 7, 130, l, m);
            e.ebn0_db = match m {
                1 => sweep(0, 20, 2),
                2 => sweep(-2, 12, 1),
                _ => sweep(-5, 6, 1),
            };
            c.curve(&format!("fig6_m{m}_L{l}"), e)?;
        }
    }
    Ok(())
}

fn search_rows(r: &SearchReport, limit: usize) -> Vec<Vec<String>> {
    r.codes
        .iter()
        .take(limit)
        .map(|x| {
            vec![
                format!("({})", x.generators.octal().join(",")),
                x.d_f.to_string(),
                x.eta_min.to_string(),
                fmt(x.f_min),
                x.class.to_string(),
                x.multiplicity.to_string(),
            ]
        })
        .collect()
}

fn fig7(c: &Ctx) -> Result<()> {
    let header = ["generators", "d_f", "eta_min", "f_min_N", "class", "multiplicity"];
    let mut summary = Vec::new();
    for (name, mode) in [("all", GtfMode::time0()), ("fixed", GtfMode::fixed_zero())] {
        let mut spec = SearchSpec::new(2, 2, 2, 2, 1, 2, 130);
        spec.policy = TruncationPolicy::with_delta_h(9);
        spec.mode = mode;
        let t = Instant::now();
        let r = search(&spec)?;
        c.write_rows(&format!("fig7_search_{name}.csv"), &header, &search_rows(&r, usize::MAX))?;
        let mut m = r.manifest();
        m["elapsed_s"] = json!(t.elapsed().as_secs_f64());
        write_json(&c.path(&format!("fig7_search_{name}.json")), &m, c.force)?;
        let classes = r.class_sizes.len().min(if c.quick { 3 } else { 10 });
        for class in 1..=classes {
            let lead = r.class_members(class).next().expect("class has a leader");
            let mut e = ExperimentConfig::new(&lead.generators.octal().join(","), 2, 2, 2, 2, 130, 1, 2);
            e.ebn0_db = vec![9.0];
            let fer = c.fer_at(e)?;
            let mut row = vec![
                name.to_string(),
                class.to_string(),
                r.class_sizes[class - 1].to_string(),
                format!("({})", lead.generators.octal().join(",")),
                fmt(lead.f_min),
            ];
            row.extend(fer_cols(fer));
            summary.push(row);
        }
    }
    c.write_rows(
        "fig7_classes.csv",
        &["reference", "class", "size", "leader", "f_min_N", "fer_9db", "frames", "errors"],
        &summary,
    )
}

fn qpsk_curve(c: &Ctx, name: &str, g: &str, l: usize, bound: bool) -> Result<()> {
    let mut e = ExperimentConfig::new(g, 2, 2, 2, 2, 130, l, 2);
    e.ebn0_db = sweep(0, 16, 2);
    if bound {
        e.bound = Some(BoundSpec {
            delta_h: Some(9),
            ..BoundSpec::default()
        });
    }
    c.curve(name, e)?;
    Ok(())
}

fn fig8(c: &Ctx) -> Result<()> {
    for g in ["06,13,11,16", "05,11,06,16", "01,02,04,10"] {
        qpsk_curve(c, &format!("fig8_{}", g.replace(',', "_")), g, 1, true)?;
    }
    Ok(())
}

fn fig9(c: &Ctx) -> Result<()> {
    for g in ["05,06,13,17", "01,02,04,10"] {
        for l in [1usize, 2, 5, 130] {
            qpsk_curve(c, &format!("fig9_{}_L{l}", g.replace(',', "_")), g, l, l <= 5)?;
        }
    }
    Ok(())
}

fn target_name(t: Target) -> &'static str {
    match t {
        Target::Table1 => "table1",
        Target::Table3 => "table3",
        Target::Table4 => "table4",
        Target::Fig6 => "fig6",
        Target::Fig7 => "fig7",
        Target::Fig8 => "fig8",
        Target::Fig9 => "fig9",
    }
}

pub fn run(a: ReproduceArgs) -> Result<()> {
    let name = target_name(a.target);
    let dir = a.out_dir.unwrap_or_else(|| Path::new("results").join(name));
    let c = Ctx {
        dir,
        quick: a.quick,
        sim: !a.no_sim,
        seed: a.seed,
        force: a.force,
    };
    check_collision(&c.path(&format!("{name}.done")), c.force)?;
    let t = Instant::now();
    match a.target {
        Target::Table1 => table1(&c)?,
        Target::Table3 => table3(&c)?,
        Target::Table4 => table4(&c)?,
        Target::Fig6 => fig6(&c)?,
        Target::Fig7 => fig7(&c)?,
        Target::Fig8 => fig8(&c)?,
        Target::Fig9 => fig9(&c)?,
    }
    let stamp = json!({ "target": name, "quick": c.quick, "seed": c.seed, "elapsed_s": t.elapsed().as_secs_f64() });
    write_json(&c.path(&format!("{name}.done")), &stamp, true)?;
    Ok(())
}
