use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use vdw_core::bounds::{
    count_t1_t2_guarded, dense_subset_ap_floor, expected_loose_cycles, expected_loose_paths,
    janson_bound,
};
use vdw_core::containers::{
    cores_from_containers, verify_certificate, CoreParams, UniformHypergraph,
};
use vdw_core::focus::{bad_elements, build_focus_hypergraph, degree_stats};
use vdw_core::harness::config::install_workers;
use vdw_core::harness::estimate::DEFAULT_BOOTSTRAP;
use vdw_core::harness::sweep::{log_grid, DEFAULT_TRIALS};
use vdw_core::harness::{
    estimate_threshold, second_round_extension_rate, sweep_threshold, translate_interaction_rate,
    verify_lemma, GridPoint, HarnessConfig, SweepOptions, SweepSpec,
};
use vdw_core::ramsey::{find_ap_free_colouring, interacting_translates};
use vdw_core::random::{sample_binomial_subset, second_round, RandomSeed, SampleConfig};
use vdw_core::{enumerate_aps, ApSpace, GroundSubset, Result, VdwError};

#[derive(Parser)]
#[command(
    name = "vdw",
    version,
    about = "Van der Waerden thresholds in random subsets of Z/nZ"
)]
struct Cli {
    /// Key-value configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct Space {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 3)]
    k: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Dump every k-AP of Z/nZ as JSON lines.
    Apcat {
        #[command(flatten)]
        space: Space,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide A -> (k-AP)_2.
    Decide {
        #[command(flatten)]
        space: Space,
        /// File of residues (JSON array or separated by commas/whitespace).
        #[arg(long, conflicts_with = "inline")]
        set: Option<PathBuf>,
        /// Comma-separated residues.
        #[arg(long)]
        inline: Option<String>,
    },
    /// Draw Z_{n,p} with p = c n^{-1/(k-1)}.
    Sample {
        #[command(flatten)]
        space: Space,
        #[arg(long)]
        c: f64,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 0)]
        stream: u64,
    },
    /// Focus hypergraph H(Z, B, X): statistics, edges or bad elements.
    Focus {
        #[command(flatten)]
        space: Space,
        #[arg(long = "Z")]
        z: PathBuf,
        #[arg(long = "B")]
        b: PathBuf,
        /// Defaults to all of Z/nZ.
        #[arg(long = "X")]
        x: Option<PathBuf>,
        #[arg(long)]
        stats: bool,
        #[arg(long)]
        edges: bool,
        #[arg(long)]
        bad: bool,
    },
    /// Containers, certificate check and cores of a uniform hypergraph.
    Containers {
        /// JSON lines, one edge per line.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, default_value_t = 3)]
        k: usize,
    },
    /// Counting and probability bounds.
    Bounds {
        #[command(subcommand)]
        which: BoundsCommand,
    },
    /// Threshold sweep over a (n, c) grid.
    Sweep {
        #[arg(long, default_value_t = 3)]
        k: usize,
        /// Comma-separated sizes.
        #[arg(long, value_delimiter = ',')]
        ns: Option<Vec<usize>>,
        #[arg(long)]
        c_min: Option<f64>,
        #[arg(long)]
        c_max: Option<f64>,
        #[arg(long)]
        c_count: Option<usize>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Threshold estimates from a points.csv.
    Estimate {
        #[arg(long)]
        points: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BOOTSTRAP)]
        bootstrap: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Rate at which a fresh sparse round makes Z Ramsey.
    Secondround {
        #[command(flatten)]
        space: Space,
        #[arg(long = "Z")]
        z: PathBuf,
        #[arg(long)]
        epsilon: f64,
        #[arg(long)]
        c: f64,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Fraction of translates x with Z ∪ (B+x) Ramsey.
    Translates {
        #[command(flatten)]
        space: Space,
        #[arg(long = "Z")]
        z: PathBuf,
        #[arg(long = "B")]
        b: PathBuf,
    },
    /// Run a verification campaign; exit 0 pass, 1 fail, 2 error.
    Verify {
        campaign: String,
        /// Parameter override, `key=value`; repeatable.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        /// Write the full JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum BoundsCommand {
    /// Janson bound for the k-APs inside a set (default all of Z/nZ).
    Janson {
        #[command(flatten)]
        space: Space,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        set: Option<PathBuf>,
    },
    /// Forbidden loose-cycle / loose-path configuration counts in Z.
    T1t2 {
        #[command(flatten)]
        space: Space,
        #[arg(long = "Z")]
        z: PathBuf,
        #[arg(long, default_value_t = 4)]
        ell_max: usize,
        #[arg(long, default_value_t = vdw_core::bounds::CONFIG_GUARD)]
        guard: usize,
    },
    /// Exact loose cycle count and expectation.
    Loosecycles {
        #[command(flatten)]
        space: Space,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        ell: usize,
    },
    /// Exact loose path count and expectation.
    Loosepaths {
        #[command(flatten)]
        space: Space,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        ell: usize,
    },
    /// Fewest k-APs found in subsets of Z of relative size gamma.
    Apfloor {
        #[command(flatten)]
        space: Space,
        #[arg(long = "Z")]
        z: PathBuf,
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn parse_residues(n: usize, text: &str) -> Result<GroundSubset> {
    let t = text.trim();
    let members: Vec<u32> = if t.starts_with('[') {
        serde_json::from_str(t)?
    } else {
        t.split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse()
                    .map_err(|_| VdwError::Param(format!("not a residue: {s:?}")))
            })
            .collect::<Result<_>>()?
    };
    GroundSubset::from_members(n, members)
}

fn read_set(n: usize, path: &Path) -> Result<GroundSubset> {
    parse_residues(n, &std::fs::read_to_string(path)?)
}

fn print_json<T: Serialize>(v: &T) -> Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, v)?;
    writeln!(out)?;
    Ok(())
}

fn load_config(path: Option<&Path>) -> Result<HarnessConfig> {
    let cfg = match path {
        Some(p) => HarnessConfig::load(p)?,
        None => HarnessConfig::default(),
    };
    Ok(cfg.with_env())
}

fn run(cli: Cli) -> Result<ExitCode> {
    let mut cfg = load_config(cli.config.as_deref())?;
    install_workers(cfg.workers()?);
    let seed_or =
        |s: Option<u64>, cfg: &HarnessConfig| -> Result<u64> { s.map_or_else(|| cfg.seed(), Ok) };
    match cli.command {
        Command::Apcat { space, out } => {
            let cat = enumerate_aps(space.n, space.k)?;
            match out {
                Some(p) => cat.write_json_lines(BufWriter::new(File::create(p)?))?,
                None => cat.write_json_lines(io::stdout().lock())?,
            }
        }
        Command::Decide { space, set, inline } => {
            let fam = ApSpace::new(space.n, space.k)?;
            let a = match (set, inline) {
                (Some(p), _) => read_set(space.n, &p)?,
                (None, Some(s)) => parse_residues(space.n, &s)?,
                (None, None) => return Err(VdwError::Param("give --set or --inline".into())),
            };
            let (col, stats) = find_ap_free_colouring(&a, &fam)?;
            let witness = col.map(|c| json!({"red": c.red().to_vec(), "blue": c.blue().to_vec()}));
            print_json(
                &json!({"n": space.n, "k": space.k, "size": a.len(), "arrow": witness.is_none(),
                "witness": witness, "stats": stats}),
            )?;
        }
        Command::Sample {
            space,
            c,
            epsilon,
            seed,
            stream,
        } => {
            let cfg_s = SampleConfig::new(space.n, space.k, c, epsilon)?;
            let s = RandomSeed::new(seed_or(seed, &cfg)?, stream);
            let z = sample_binomial_subset(space.n, cfg_s.p, s)?;
            let second = match cfg_s.second_round_probability() {
                Some(q) => Some(second_round(&z, q, s)?.to_vec()),
                None => None,
            };
            print_json(
                &json!({"config": cfg_s, "seed": s, "members": z.to_vec(), "second_round": second}),
            )?;
        }
        Command::Focus {
            space,
            z,
            b,
            x,
            stats,
            edges,
            bad,
        } => {
            let fam = ApSpace::new(space.n, space.k)?;
            let z = read_set(space.n, &z)?;
            let b = read_set(space.n, &b)?;
            let x = match x {
                Some(p) => read_set(space.n, &p)?,
                None => GroundSubset::full(space.n),
            };
            let mut out = serde_json::Map::new();
            let all = !(stats || edges || bad);
            if stats || edges || all {
                let h = build_focus_hypergraph(&z, &b, &x, &fam)?;
                if stats || all {
                    out.insert("stats".into(), serde_json::to_value(degree_stats(&h))?);
                }
                if edges {
                    out.insert("edges".into(), serde_json::to_value(&h.edges)?);
                }
            }
            if bad {
                out.insert(
                    "bad".into(),
                    serde_json::to_value(bad_elements(&z, &b, &fam)?)?,
                );
            }
            print_json(&out)?;
        }
        Command::Containers { input, m, k } => {
            let h = UniformHypergraph::read_json_lines(BufReader::new(File::open(input)?), m)?;
            let fam = cores_from_containers(&h, &CoreParams::from_instance(&h, k))?;
            let rep = verify_certificate(&h, &fam.certificate)?;
            print_json(
                &json!({"m": h.m(), "ell": h.ell(), "e": h.e(), "verification": rep,
                "cores": fam.cores, "beta": fam.beta, "min_core": fam.min_core, "c_prime": fam.c_prime,
                "budget": fam.budget, "within_budget": fam.within_budget, "hypotheses": fam.hypotheses,
                "containers_outside_family": fam.certificate.containers_outside_family(),
                "fingerprints": fam.certificate.fingerprints}),
            )?;
        }
        Command::Bounds { which } => run_bounds(which, &cfg)?,
        Command::Sweep {
            k,
            ns,
            c_min,
            c_max,
            c_count,
            trials,
            seed,
            epsilon,
            out,
        } => {
            let ns = match ns {
                Some(v) => v,
                None => cfg
                    .get_list("ns")?
                    .unwrap_or_else(|| vec![1000, 2000, 4000, 8000]),
            };
            let cs = log_grid(
                c_min.map_or_else(|| cfg.get_or("c_min", 0.3), Ok)?,
                c_max.map_or_else(|| cfg.get_or("c_max", 5.0), Ok)?,
                c_count.map_or_else(|| cfg.get_or("c_count", 15), Ok)?,
            )?;
            let spec = SweepSpec {
                k,
                ns,
                cs,
                trials: trials.map_or_else(|| cfg.get_or("trials", DEFAULT_TRIALS), Ok)?,
                seed: seed_or(seed, &cfg)?,
                epsilon: epsilon.map_or_else(|| cfg.get("epsilon"), |e| Ok(Some(e)))?,
            };
            let table = sweep_threshold(
                &spec,
                &SweepOptions {
                    out_dir: out,
                    stop_after_points: None,
                },
            )?;
            let mut w = csv::Writer::from_writer(io::stdout().lock());
            for p in &table.points {
                w.serialize(p)?;
            }
            w.flush()?;
        }
        Command::Estimate {
            points,
            bootstrap,
            seed,
        } => {
            let mut r = csv::Reader::from_path(points)?;
            let pts: Vec<GridPoint> = r.deserialize().collect::<std::result::Result<_, _>>()?;
            let est =
                estimate_threshold(&pts, bootstrap, RandomSeed::new(seed_or(seed, &cfg)?, 0))?;
            print_json(&est)?;
        }
        Command::Secondround {
            space,
            z,
            epsilon,
            c,
            trials,
            seed,
        } => {
            let fam = ApSpace::new(space.n, space.k)?;
            let z = read_set(space.n, &z)?;
            let r = second_round_extension_rate(
                &z,
                epsilon,
                c,
                trials,
                &fam,
                RandomSeed::new(seed_or(seed, &cfg)?, 0),
            )?;
            print_json(&r)?;
        }
        Command::Translates { space, z, b } => {
            let fam = ApSpace::new(space.n, space.k)?;
            let z = read_set(space.n, &z)?;
            let b = read_set(space.n, &b)?;
            let rate = translate_interaction_rate(&z, &b, &fam)?;
            let x = interacting_translates(&z, &b, &fam)?;
            print_json(&json!({"rate": rate, "translates": x.to_vec()}))?;
        }
        Command::Verify {
            campaign,
            overrides,
            out,
        } => {
            for o in &overrides {
                let (k, v) = o
                    .split_once('=')
                    .ok_or_else(|| VdwError::Param(format!("expected key=value, got {o:?}")))?;
                cfg.set(k.trim(), v.trim());
            }
            let rep = verify_lemma(&campaign, &cfg)?;
            match out {
                Some(p) => serde_json::to_writer_pretty(BufWriter::new(File::create(p)?), &rep)?,
                None => print_json(&rep)?,
            }
            for c in &rep.checks {
                eprintln!(
                    "{} {}: {}/{} (need {})",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.name,
                    c.satisfied,
                    c.trials,
                    c.required
                );
            }
            return Ok(if rep.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            });
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn run_bounds(which: BoundsCommand, cfg: &HarnessConfig) -> Result<()> {
    match which {
        BoundsCommand::Janson { space, p, set } => {
            let fam = ApSpace::new(space.n, space.k)?;
            let c = match set {
                Some(path) => read_set(space.n, &path)?,
                None => GroundSubset::full(space.n),
            };
            print_json(&janson_bound(&fam.aps_within(&c)?, p)?)?;
        }
        BoundsCommand::T1t2 {
            space,
            z,
            ell_max,
            guard,
        } => {
            let fam = ApSpace::new(space.n, space.k)?;
            let z = read_set(space.n, &z)?;
            print_json(&count_t1_t2_guarded(&z, &fam, ell_max, guard, 64)?)?;
        }
        BoundsCommand::Loosecycles { space, p, ell } => {
            print_json(&expected_loose_cycles(space.n, p, space.k, ell)?)?;
        }
        BoundsCommand::Loosepaths { space, p, ell } => {
            print_json(&expected_loose_paths(space.n, p, space.k, ell)?)?;
        }
        BoundsCommand::Apfloor {
            space,
            z,
            gamma,
            p,
            trials,
            seed,
        } => {
            let fam = ApSpace::new(space.n, space.k)?;
            let z = read_set(space.n, &z)?;
            let s = RandomSeed::new(seed.map_or_else(|| cfg.seed(), Ok)?, 0);
            print_json(&dense_subset_ap_floor(&z, gamma, &fam, p, trials, s)?)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
