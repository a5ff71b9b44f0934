mod config;

use std::fs;
use std::path::Path;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use semitoric::catalog::{hirzebruch_toric_polygon, SystemInstance};
use semitoric::invariants::polygon::SemitoricPolygon;
use semitoric::invariants::{compute_invariants, InvariantOptions};
use semitoric::output::{momentum_image_svg, plain_polygon_svg, polygon_svg, region_map_svg, scan_csv, scan_svg};
use semitoric::singularities::{count_focus_focus, region_map, transition_scan, SearchOptions};
use semitoric::{Error, Execution};

use config::{ConfigError, FamilyName, Format, PlotKind, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "semitoric", version, about = "Singularities and symplectic invariants of semitoric systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    config: RunConfig,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Rank-0 singularities and the focus-focus count.
    Classify,
    /// Taylor series, height, polygon and twisting indices as JSON.
    Invariants,
    /// Focus-focus count along a parameter axis, or the two-focus region map.
    Scan,
    /// Momentum images and polygon representatives as SVG.
    Plot,
}

enum Failure {
    Config(String),
    Numeric(Error),
    Io(std::io::Error),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.0)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(m) => Failure::Config(m),
            Error::Io(e) => Failure::Io(e),
            e => Failure::Numeric(e),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

impl Failure {
    fn exit(&self) -> ExitCode {
        match self {
            Failure::Config(m) => {
                eprintln!("error: {m}");
                ExitCode::from(2)
            }
            Failure::Numeric(e) if e.is_near_degenerate() => {
                eprintln!("error: {e}");
                ExitCode::from(4)
            }
            Failure::Numeric(e) => {
                eprintln!("error: {e}");
                ExitCode::from(3)
            }
            Failure::Io(e) => {
                eprintln!("error: {e}");
                ExitCode::from(1)
            }
        }
    }
}

type Outcome = Result<(), Failure>;

/// Writes to `out`, or to stdout without one.
fn emit(out: Option<&Path>, content: &str) -> Outcome {
    match out {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            fs::write(p, content)?;
            log::info!("wrote {}", p.display());
        }
        None => print!("{content}"),
    }
    Ok(())
}

fn search(cfg: &RunConfig) -> SearchOptions {
    SearchOptions { seed: cfg.seed.unwrap_or(SearchOptions::default().seed), ..SearchOptions::default() }
}

fn params_json(sys: &SystemInstance) -> serde_json::Value {
    sys.params().into_iter().map(|(k, v)| (k.to_string(), json!(v))).collect::<serde_json::Map<_, _>>().into()
}

fn classify(cfg: &RunConfig) -> Outcome {
    let sys = cfg.system()?;
    let census = count_focus_focus(&sys, &search(cfg))?;
    let text = match cfg.format.unwrap_or(Format::Json) {
        Format::Json => {
            let doc = json!({
                "schema": "semitoric-census/1",
                "family": sys.name(),
                "params": params_json(&sys),
                "n_ff": census.n_ff,
                "singularities": census.records,
            });
            serde_json::to_string_pretty(&doc).map_err(Error::from)? + "\n"
        }
        Format::Csv => {
            let mut s = String::from("kind,point,lambda,eta\n");
            for r in &census.records {
                let pt: Vec<String> = r.point.coords.iter().map(|c| format!("{c:.10}")).collect();
                s.push_str(&format!(
                    "{},{},{:.10},{:.10}\n",
                    r.kind.label(),
                    pt.join(" "),
                    r.critical_value.0,
                    r.critical_value.1
                ));
            }
            s
        }
        Format::Svg => return Err(Failure::Config("classify writes json or csv".into())),
    };
    emit(cfg.out.as_deref(), &text)
}

fn invariant_options(cfg: &RunConfig) -> InvariantOptions {
    let mut opts = InvariantOptions { signs: cfg.sign.clone(), shear: cfg.shear.unwrap_or(0), ..Default::default() };
    if let Some(d) = cfg.degree {
        opts.degree = d;
    }
    if let Some(t) = cfg.tolerance {
        opts.taylor.max_residual = t;
    }
    opts
}

fn invariants(cfg: &RunConfig) -> Outcome {
    if cfg.format.is_some_and(|f| f != Format::Json) {
        return Err(Failure::Config("invariants writes json only".into()));
    }
    let sys = cfg.system()?;
    let doc = compute_invariants(&sys, &invariant_options(cfg))?;
    emit(cfg.out.as_deref(), &(doc.to_json()? + "\n"))
}

fn scan(cfg: &RunConfig) -> Outcome {
    let family = cfg.family()?;
    let format = cfg.format.unwrap_or(Format::Csv);
    let mode = Execution::default();
    let r1 = cfg.r1.unwrap_or(1.0);
    let (scan, axis) = match (family, cfg.axis.as_deref()) {
        (FamilyName::Twoff, None) => {
            let r2 = cfg.r2.ok_or_else(|| ConfigError("--R2 is required for the region map".into()))?;
            let map = region_map(r1, r2, cfg.grid.unwrap_or(64), mode)?;
            let text = match format {
                Format::Csv => map.to_csv(),
                Format::Svg => region_map_svg(&map),
                Format::Json => serde_json::to_string_pretty(&map).map_err(Error::from)? + "\n",
            };
            return emit(cfg.out.as_deref(), &text);
        }
        (FamilyName::Cam, Some("t")) => {
            let r2 = cfg.r2.ok_or_else(|| ConfigError("--R2 is required for a t scan".into()))?;
            let (a, b) = (cfg.from.unwrap_or(0.0), cfg.to.unwrap_or(1.0));
            (transition_scan("t", |t| SystemInstance::cam(r1, r2, t), a, b, cfg.grid.unwrap_or(200), mode)?, "t")
        }
        (FamilyName::Cam, Some("R")) => {
            let t = cfg.t.ok_or_else(|| ConfigError("--t is required for an R scan".into()))?;
            let (a, b) = (cfg.from.unwrap_or(0.1), cfg.to.unwrap_or(5.0));
            (transition_scan("R", |r| SystemInstance::cam(r1, r * r1, t), a, b, cfg.grid.unwrap_or(200), mode)?, "R")
        }
        (FamilyName::Twoff, Some(axis @ ("s1" | "s2"))) => {
            let r2 = cfg.r2.ok_or_else(|| ConfigError("--R2 is required".into()))?;
            let (a, b) = (cfg.from.unwrap_or(0.0), cfg.to.unwrap_or(1.0));
            let n = cfg.grid.unwrap_or(200);
            let result = if axis == "s1" {
                let s2 = cfg.s2.ok_or_else(|| ConfigError("--s2 is required for an s1 scan".into()))?;
                transition_scan("s1", |s| SystemInstance::two_focus(r1, r2, s, s2), a, b, n, mode)?
            } else {
                let s1 = cfg.s1.ok_or_else(|| ConfigError("--s1 is required for an s2 scan".into()))?;
                transition_scan("s2", |s| SystemInstance::two_focus(r1, r2, s1, s), a, b, n, mode)?
            };
            (result, axis)
        }
        (f, a) => return Err(Failure::Config(format!("no scan along {a:?} for family {f:?}"))),
    };
    log::info!("{} transitions along {axis}", scan.transitions.len());
    let text = match format {
        Format::Csv => scan_csv(&scan),
        Format::Svg => scan_svg(&scan),
        Format::Json => serde_json::to_string_pretty(&scan).map_err(Error::from)? + "\n",
    };
    emit(cfg.out.as_deref(), &text)
}

fn out_dir(cfg: &RunConfig, what: &str) -> Result<std::path::PathBuf, Failure> {
    let dir = cfg.out.clone().ok_or_else(|| ConfigError(format!("{what} writes several files; give --out DIR")))?;
    fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn plot(cfg: &RunConfig) -> Outcome {
    if cfg.format.is_some_and(|f| f != Format::Svg) {
        return Err(Failure::Config("plot writes svg only".into()));
    }
    let samples = cfg.grid.unwrap_or(200);
    match cfg.kind.unwrap_or(PlotKind::Image) {
        PlotKind::Image => {
            let sys = cfg.system()?;
            let census = count_focus_focus(&sys, &search(cfg))?;
            emit(cfg.out.as_deref(), &momentum_image_svg(&sys, &census, samples)?)
        }
        PlotKind::Montage => {
            let (r1, r2) = (cfg.r1.unwrap_or(1.0), cfg.r2.unwrap_or(1.5));
            let dir = out_dir(cfg, "montage")?;
            for t in [0.0, 0.25, 0.5, 0.75, 1.0] {
                let sys = SystemInstance::cam(r1, r2, t)?;
                let census = count_focus_focus(&sys, &search(cfg))?;
                emit(Some(&dir.join(format!("cam-t{t:.2}.svg"))), &momentum_image_svg(&sys, &census, samples)?)?;
            }
            Ok(())
        }
        PlotKind::Polygon => {
            let sys = cfg.system()?;
            let doc = compute_invariants(&sys, &invariant_options(cfg))?;
            let base: SemitoricPolygon = doc.polygon.into();
            match &cfg.twist {
                None => emit(cfg.out.as_deref(), &polygon_svg(&base)),
                Some(ks) => {
                    let k0 = *base
                        .twisting
                        .first()
                        .ok_or_else(|| ConfigError("--twist needs a focus-focus point".into()))?;
                    let dir = out_dir(cfg, "--twist")?;
                    let signs: String = base.signs.iter().map(|s| if *s > 0 { 'p' } else { 'm' }).collect();
                    for &k in ks {
                        let poly = base.apply_shear(k - k0);
                        emit(Some(&dir.join(format!("polygon-k{k}-e{signs}.svg"))), &polygon_svg(&poly))?;
                    }
                    Ok(())
                }
            }
        }
        PlotKind::Hirzebruch => {
            let v = hirzebruch_toric_polygon(
                cfg.hirzebruch_n.unwrap_or(1),
                cfg.alpha.unwrap_or(1.0),
                cfg.beta.unwrap_or(1.0),
            )?;
            emit(cfg.out.as_deref(), &plain_polygon_svg(&v))
        }
    }
}

fn run(command: Command, mut cfg: RunConfig) -> Outcome {
    if let Some(path) = cfg.config.clone() {
        let text = fs::read_to_string(&path)
            .map_err(|e| Failure::Config(format!("cannot read config {}: {e}", path.display())))?;
        cfg.merge_file(&text)?;
    }
    cfg.validate()?;
    if let Some(n) = cfg.threads {
        #[cfg(feature = "parallel")]
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::warn!("thread pool already configured: {e}");
        }
        #[cfg(not(feature = "parallel"))]
        log::warn!("built without the parallel feature; ignoring --threads {n}");
    }
    match command {
        Command::Classify => classify(&cfg),
        Command::Invariants => invariants(&cfg),
        Command::Scan => scan(&cfg),
        Command::Plot => plot(&cfg),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli.command, cli.config) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => f.exit(),
    }
}
