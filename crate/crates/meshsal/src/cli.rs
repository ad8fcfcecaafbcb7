//! Batch command-line interface: reproducible pipelines over the library
//! modules with key=value config files, seeded randomness, and an effective
//! config sidecar next to every output.
//!
//! Exit codes: 0 success, 2 user/input error, 3 internal invariant failure.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use nalgebra::Point3;

use crate::error::{Error, Result};
use crate::features::{extract_features, DirectionBases};
use crate::gaze::{
    classify_fixations, intersect_log, read_gaze_log, smooth_fixations, synth_gaze,
    write_fixation_report, write_gaze_log, GazeScenario, IvtParams, KernelParams, RotationSchedule,
    ScenarioEvent,
};
use crate::mesh::{LoadOptions, TexturedMesh};
use crate::obj::{load_mesh, save_mesh};
use crate::ply::write_heatmap_ply;
use crate::raycast::Bvh;
use crate::saliency::{
    baseline_predict, compare_maps, sampling_analysis, AnalysisParams, SaliencyMap,
};
use crate::simplify::{simplify_mesh, SimplifyParams};
use crate::texture::TextureImage;
use crate::texture_align::face_texture_features;

#[derive(Parser, Debug)]
#[command(name = "meshsal", about = "Textured-mesh saliency toolkit", version)]
pub struct Cli {
    /// Worker threads for parallel sections (default: logical cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// key=value config file; command-line flags win over file entries.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Seed for all randomness.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Gaze logs -> fixations -> per-face saliency map.
    Saliency(SaliencyArgs),
    /// Compare a predicted saliency map against ground truth (CC/SIM/KLD/SE).
    Metrics(MetricsArgs),
    /// Export the per-face geometric (and texture) feature table.
    Features(FeaturesArgs),
    /// Salient-vs-non-salient sampling analysis over curvature and variance.
    Analyze(AnalyzeArgs),
    /// Saliency-guided quadric simplification.
    Simplify(SimplifyArgs),
    /// Generate a synthetic gaze log from a scripted scenario.
    SynthGaze(SynthArgs),
    /// Export a vertex-colored PLY heatmap of a saliency map.
    Heatmap(HeatmapArgs),
}

#[derive(Args, Debug)]
pub struct SaliencyArgs {
    #[arg(long)]
    pub mesh: PathBuf,
    /// Gaze log CSV; repeat for multiple participants (fixations are pooled).
    #[arg(long = "log", required = true)]
    pub logs: Vec<PathBuf>,
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long)]
    pub speed: Option<f64>,
    #[arg(long)]
    pub sign: Option<f64>,
    #[arg(long)]
    pub velocity_threshold: Option<f64>,
    #[arg(long)]
    pub min_fixation_ms: Option<f64>,
    #[arg(long)]
    pub merge_angle: Option<f64>,
    #[arg(long)]
    pub sigma_angle: Option<f64>,
    #[arg(long)]
    pub uv_wrap: bool,
}

#[derive(Args, Debug)]
pub struct MetricsArgs {
    #[arg(long)]
    pub pred: PathBuf,
    #[arg(long)]
    pub truth: PathBuf,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct FeaturesArgs {
    #[arg(long)]
    pub mesh: PathBuf,
    /// Texture image (ppm/png); defaults to the mesh's material reference.
    #[arg(long)]
    pub texture: Option<PathBuf>,
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long)]
    pub bases_k: Option<usize>,
    /// Also emit the flattened patch grids (3*G^2 extra columns).
    #[arg(long)]
    pub include_grids: bool,
    /// Apply a seeded random rotation before extraction (augmentation).
    #[arg(long)]
    pub augment_rotation: bool,
    #[arg(long)]
    pub uv_wrap: bool,
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub mesh: PathBuf,
    #[arg(long)]
    pub map: PathBuf,
    #[arg(long)]
    pub texture: Option<PathBuf>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[arg(long)]
    pub repeats: Option<usize>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub quantile: Option<f64>,
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long)]
    pub uv_wrap: bool,
}

#[derive(Args, Debug)]
pub struct SimplifyArgs {
    #[arg(long)]
    pub mesh: PathBuf,
    #[arg(long)]
    pub target_faces: usize,
    #[arg(long)]
    pub saliency: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub allow_seam_collapse: bool,
    #[arg(long)]
    pub uv_wrap: bool,
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    #[arg(long)]
    pub mesh: PathBuf,
    /// Scenario CSV: `face,dwell_ms,saccade_ms` with a header line.
    #[arg(long)]
    pub scenario: PathBuf,
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long)]
    pub rate: Option<f64>,
    #[arg(long)]
    pub noise_sigma: Option<f64>,
    /// Viewer position as `x,y,z`.
    #[arg(long)]
    pub viewer: Option<String>,
    #[arg(long)]
    pub speed: Option<f64>,
    #[arg(long)]
    pub sign: Option<f64>,
    #[arg(long)]
    pub uv_wrap: bool,
}

#[derive(Args, Debug)]
pub struct HeatmapArgs {
    #[arg(long)]
    pub mesh: PathBuf,
    #[arg(long)]
    pub map: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub uv_wrap: bool,
}

/// key=value overrides loaded from `--config`; flags win over entries.
pub struct Overrides {
    entries: HashMap<String, String>,
}

impl Overrides {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let mut entries = HashMap::new();
        if let Some(path) = path {
            let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            for (lineno, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (k, v) = line.split_once('=').ok_or_else(|| {
                    Error::parse(path, lineno + 1, "expected key=value")
                })?;
                entries.insert(k.trim().to_string(), v.trim().to_string());
            }
        }
        Ok(Overrides { entries })
    }

    pub fn reject_unknown(&self, known: &[&str]) -> Result<()> {
        for key in self.entries.keys() {
            if !known.contains(&key.as_str()) {
                return Err(Error::invalid(format!("unknown config key `{key}`")));
            }
        }
        Ok(())
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.entries.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse::<T>()
                .map(Some)
                .map_err(|_| Error::invalid(format!("bad value for config key `{key}`: {raw}"))),
        }
    }
}

fn resolve<T: FromStr + ToString>(
    flag: Option<T>,
    cfg: &Overrides,
    key: &str,
    default: T,
    effective: &mut Vec<(String, String)>,
) -> Result<T> {
    let value = match flag {
        Some(v) => v,
        None => cfg.get::<T>(key)?.unwrap_or(default),
    };
    effective.push((key.to_string(), value.to_string()));
    Ok(value)
}

fn resolve_flag(
    flag: bool,
    cfg: &Overrides,
    key: &str,
    effective: &mut Vec<(String, String)>,
) -> Result<bool> {
    let value = if flag {
        true
    } else {
        cfg.get::<bool>(key)?.unwrap_or(false)
    };
    effective.push((key.to_string(), value.to_string()));
    Ok(value)
}

fn write_sidecar(mut effective: Vec<(String, String)>, path: &Path) -> Result<()> {
    effective.sort();
    let mut out = String::new();
    for (k, v) in effective {
        out.push_str(&format!("{k}={v}\n"));
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

fn ensure_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

/// Run the CLI, returning the process exit code.
pub fn run(cli: Cli) -> i32 {
    if let Some(threads) = cli.threads {
        // Ignore the error when a global pool already exists (tests).
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    let result = dispatch(cli);
    match result {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            2
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    let cfg = Overrides::load(cli.config.as_deref())?;
    let seed = match cli.seed {
        Some(s) => Some(s),
        None => cfg.get::<u64>("seed")?,
    };
    match cli.command {
        Command::Saliency(args) => cmd_saliency(args, &cfg),
        Command::Metrics(args) => cmd_metrics(args, &cfg),
        Command::Features(args) => cmd_features(args, &cfg, seed.unwrap_or(0)),
        Command::Analyze(args) => cmd_analyze(args, &cfg, seed.unwrap_or(0)),
        Command::Simplify(args) => cmd_simplify(args, &cfg),
        Command::SynthGaze(args) => cmd_synth(args, &cfg, seed.unwrap_or(0)),
        Command::Heatmap(args) => cmd_heatmap(args, &cfg),
    }
}

fn load_mesh_arg(path: &Path, uv_wrap: bool) -> Result<TexturedMesh> {
    load_mesh(path, LoadOptions { uv_wrap })
}

fn cmd_saliency(args: SaliencyArgs, cfg: &Overrides) -> Result<()> {
    cfg.reject_unknown(&[
        "seed",
        "speed",
        "sign",
        "velocity_threshold",
        "min_fixation_ms",
        "merge_angle",
        "sigma_angle",
        "uv_wrap",
    ])?;
    let mut eff = Vec::new();
    let speed = resolve(args.speed, cfg, "speed", 15.0, &mut eff)?;
    let sign = resolve(args.sign, cfg, "sign", -1.0, &mut eff)?;
    let velocity_threshold =
        resolve(args.velocity_threshold, cfg, "velocity_threshold", 30.0, &mut eff)?;
    let min_fixation_ms = resolve(args.min_fixation_ms, cfg, "min_fixation_ms", 100.0, &mut eff)?;
    let merge_angle = resolve(args.merge_angle, cfg, "merge_angle", 0.5, &mut eff)?;
    let sigma_angle = resolve(args.sigma_angle, cfg, "sigma_angle", 1.0, &mut eff)?;
    let uv_wrap = resolve_flag(args.uv_wrap, cfg, "uv_wrap", &mut eff)?;
    eff.push(("mesh".into(), args.mesh.display().to_string()));
    for (i, log) in args.logs.iter().enumerate() {
        eff.push((format!("log{i}"), log.display().to_string()));
    }

    let mesh = load_mesh_arg(&args.mesh, uv_wrap)?;
    let bvh = Bvh::build(&mesh);
    let schedule = RotationSchedule {
        angular_speed: speed,
        sign,
        ..Default::default()
    };
    let ivt = IvtParams {
        velocity_threshold,
        min_fixation_duration: min_fixation_ms,
        merge_angle,
        ..Default::default()
    };

    let mut all_fixations = Vec::new();
    for log_path in &args.logs {
        let log = read_gaze_log(log_path)?;
        let intersections = intersect_log(&log, &mesh, &bvh, &schedule)?;
        let fixations = classify_fixations(&intersections, &mesh, &ivt)?;
        all_fixations.extend(fixations);
    }

    let kernel = KernelParams {
        sigma_angle,
        ..Default::default()
    };
    let map = smooth_fixations(&all_fixations, &mesh, &kernel)?;

    ensure_dir(&args.out_dir)?;
    map.write_csv(args.out_dir.join("saliency.csv"))?;
    write_fixation_report(&all_fixations, args.out_dir.join("fixations.csv"))?;
    write_sidecar(eff, &args.out_dir.join("config.txt"))?;
    println!(
        "saliency: {} fixations over {} faces -> {}",
        all_fixations.len(),
        mesh.face_count(),
        args.out_dir.join("saliency.csv").display()
    );
    Ok(())
}

fn cmd_metrics(args: MetricsArgs, cfg: &Overrides) -> Result<()> {
    cfg.reject_unknown(&["seed"])?;
    let pred = SaliencyMap::read_csv(&args.pred)?;
    let truth = SaliencyMap::read_csv(&args.truth)?;
    let report = compare_maps(&pred, &truth)?;
    println!("{}", report.record_line());
    println!("{}", report.pretty());
    if let Some(out_dir) = &args.out_dir {
        ensure_dir(out_dir)?;
        fs::write(out_dir.join("metrics.csv"), report.record_line() + "\n")
            .map_err(|e| Error::io(out_dir.join("metrics.csv"), e))?;
        let eff = vec![
            ("pred".to_string(), args.pred.display().to_string()),
            ("truth".to_string(), args.truth.display().to_string()),
        ];
        write_sidecar(eff, &out_dir.join("config.txt"))?;
    }
    Ok(())
}

fn cmd_features(args: FeaturesArgs, cfg: &Overrides, seed: u64) -> Result<()> {
    cfg.reject_unknown(&[
        "seed",
        "grid",
        "bases_k",
        "include_grids",
        "augment_rotation",
        "uv_wrap",
    ])?;
    let mut eff = Vec::new();
    let grid = resolve(args.grid, cfg, "grid", 8usize, &mut eff)?;
    let bases_k = resolve(args.bases_k, cfg, "bases_k", DirectionBases::DEFAULT_K, &mut eff)?;
    let include_grids = resolve_flag(args.include_grids, cfg, "include_grids", &mut eff)?;
    let augment = resolve_flag(args.augment_rotation, cfg, "augment_rotation", &mut eff)?;
    let uv_wrap = resolve_flag(args.uv_wrap, cfg, "uv_wrap", &mut eff)?;
    eff.push(("seed".into(), seed.to_string()));
    eff.push(("mesh".into(), args.mesh.display().to_string()));

    let mut mesh = load_mesh_arg(&args.mesh, uv_wrap)?;
    if augment {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let rot = nalgebra::Rotation3::from_euler_angles(
            rng.gen_range(0.0..std::f64::consts::TAU),
            rng.gen_range(0.0..std::f64::consts::TAU),
            rng.gen_range(0.0..std::f64::consts::TAU),
        );
        mesh = TexturedMesh::new(
            mesh.vertices().iter().map(|v| rot * v).collect(),
            mesh.faces().to_vec(),
            mesh.uv_corners().map(|u| u.to_vec()),
            mesh.texture_path().map(|p| p.to_path_buf()),
        )?;
    }

    let texture_path = args
        .texture
        .clone()
        .or_else(|| mesh.texture_path().map(|p| p.to_path_buf()));
    let patches = match &texture_path {
        Some(tex_path) => {
            eff.push(("texture".into(), tex_path.display().to_string()));
            let tex = TextureImage::load(tex_path)?;
            Some(face_texture_features(&mesh, &tex, grid)?)
        }
        None => None,
    };

    let bases = DirectionBases::fibonacci(bases_k);
    let table = extract_features(&mesh, &bases, patches)?;
    ensure_dir(&args.out_dir)?;
    table.write_csv(args.out_dir.join("features.csv"), include_grids)?;
    write_sidecar(eff, &args.out_dir.join("config.txt"))?;
    println!(
        "features: {} faces -> {}",
        mesh.face_count(),
        args.out_dir.join("features.csv").display()
    );
    Ok(())
}

fn cmd_analyze(args: AnalyzeArgs, cfg: &Overrides, seed: u64) -> Result<()> {
    cfg.reject_unknown(&["seed", "repeats", "samples", "quantile", "grid", "uv_wrap"])?;
    let mut eff = Vec::new();
    let repeats = resolve(args.repeats, cfg, "repeats", 100usize, &mut eff)?;
    let samples = resolve(args.samples, cfg, "samples", 1000usize, &mut eff)?;
    let quantile = resolve(args.quantile, cfg, "quantile", 0.2, &mut eff)?;
    let grid = resolve(args.grid, cfg, "grid", 8usize, &mut eff)?;
    let uv_wrap = resolve_flag(args.uv_wrap, cfg, "uv_wrap", &mut eff)?;
    eff.push(("seed".into(), seed.to_string()));
    eff.push(("mesh".into(), args.mesh.display().to_string()));
    eff.push(("map".into(), args.map.display().to_string()));

    let mesh = load_mesh_arg(&args.mesh, uv_wrap)?;
    let map = SaliencyMap::read_csv(&args.map)?;
    if map.len() != mesh.face_count() {
        return Err(Error::MapLengthMismatch {
            expected: mesh.face_count(),
            got: map.len(),
        });
    }
    let curvature = crate::features::gaussian_curvature(&mesh);
    let texture_path = args
        .texture
        .clone()
        .or_else(|| mesh.texture_path().map(|p| p.to_path_buf()));
    let variance = match &texture_path {
        Some(tex_path) => {
            eff.push(("texture".into(), tex_path.display().to_string()));
            let tex = TextureImage::load(tex_path)?;
            face_texture_features(&mesh, &tex, grid)?
                .iter()
                .map(|p| p.color_variance)
                .collect()
        }
        None => vec![0.0; mesh.face_count()],
    };

    let report = sampling_analysis(
        &map,
        mesh.face_areas(),
        &curvature,
        &variance,
        &AnalysisParams {
            repeats,
            samples_per_repeat: samples,
            salient_quantile: quantile,
            seed,
        },
    )?;
    println!("{}", report.record_line());
    if let Some(out_dir) = &args.out_dir {
        ensure_dir(out_dir)?;
        fs::write(out_dir.join("analysis.csv"), report.record_line() + "\n")
            .map_err(|e| Error::io(out_dir.join("analysis.csv"), e))?;
        write_sidecar(eff, &out_dir.join("config.txt"))?;
    }
    Ok(())
}

fn cmd_simplify(args: SimplifyArgs, cfg: &Overrides) -> Result<()> {
    cfg.reject_unknown(&["seed", "lambda", "gamma", "allow_seam_collapse", "uv_wrap"])?;
    let mut eff = Vec::new();
    let lambda = resolve(args.lambda, cfg, "lambda", 9.0, &mut eff)?;
    let gamma = resolve(args.gamma, cfg, "gamma", 1.0, &mut eff)?;
    let allow_seam = resolve_flag(args.allow_seam_collapse, cfg, "allow_seam_collapse", &mut eff)?;
    let uv_wrap = resolve_flag(args.uv_wrap, cfg, "uv_wrap", &mut eff)?;
    eff.push(("mesh".into(), args.mesh.display().to_string()));
    eff.push(("target_faces".into(), args.target_faces.to_string()));

    let mesh = load_mesh_arg(&args.mesh, uv_wrap)?;
    let saliency = match &args.saliency {
        Some(path) => {
            eff.push(("saliency".into(), path.display().to_string()));
            Some(SaliencyMap::read_csv(path)?)
        }
        None => None,
    };
    let out = simplify_mesh(
        &mesh,
        saliency.as_ref(),
        args.target_faces,
        &SimplifyParams {
            lambda,
            gamma,
            allow_seam_collapse: allow_seam,
        },
    )?;
    save_mesh(&out, &args.out)?;
    write_sidecar(eff, &sidecar_path(&args.out))?;
    println!(
        "simplify: {} -> {} faces -> {}",
        mesh.face_count(),
        out.face_count(),
        args.out.display()
    );
    Ok(())
}

fn cmd_synth(args: SynthArgs, cfg: &Overrides, seed: u64) -> Result<()> {
    cfg.reject_unknown(&["seed", "rate", "noise_sigma", "viewer", "speed", "sign", "uv_wrap"])?;
    let mut eff = Vec::new();
    let rate = resolve(args.rate, cfg, "rate", 120.0, &mut eff)?;
    let noise_sigma = resolve(args.noise_sigma, cfg, "noise_sigma", 0.0, &mut eff)?;
    let speed = resolve(args.speed, cfg, "speed", 15.0, &mut eff)?;
    let sign = resolve(args.sign, cfg, "sign", -1.0, &mut eff)?;
    let uv_wrap = resolve_flag(args.uv_wrap, cfg, "uv_wrap", &mut eff)?;
    let viewer_raw = match &args.viewer {
        Some(v) => v.clone(),
        None => cfg.get::<String>("viewer")?.unwrap_or_else(|| "0,0,4".to_string()),
    };
    eff.push(("viewer".into(), viewer_raw.clone()));
    eff.push(("seed".into(), seed.to_string()));
    eff.push(("mesh".into(), args.mesh.display().to_string()));
    eff.push(("scenario".into(), args.scenario.display().to_string()));
    let viewer = parse_point(&viewer_raw)?;

    let mesh = load_mesh_arg(&args.mesh, uv_wrap)?;
    let events = read_scenario(&args.scenario)?;
    let scenario = GazeScenario {
        events,
        viewer,
        noise_sigma,
        seed,
    };
    let schedule = RotationSchedule {
        angular_speed: speed,
        sign,
        ..Default::default()
    };
    let log = synth_gaze(&scenario, &mesh, &schedule, rate)?;
    ensure_dir(&args.out_dir)?;
    write_gaze_log(&log, args.out_dir.join("gaze_log.csv"))?;
    write_scenario(&scenario.events, &args.out_dir.join("ground_truth.csv"))?;
    write_sidecar(eff, &args.out_dir.join("config.txt"))?;
    println!(
        "synth-gaze: {} samples -> {}",
        log.len(),
        args.out_dir.join("gaze_log.csv").display()
    );
    Ok(())
}

fn cmd_heatmap(args: HeatmapArgs, cfg: &Overrides) -> Result<()> {
    cfg.reject_unknown(&["seed", "uv_wrap"])?;
    let mut eff = Vec::new();
    let uv_wrap = resolve_flag(args.uv_wrap, cfg, "uv_wrap", &mut eff)?;
    eff.push(("mesh".into(), args.mesh.display().to_string()));
    eff.push(("map".into(), args.map.display().to_string()));
    let mesh = load_mesh_arg(&args.mesh, uv_wrap)?;
    let map = SaliencyMap::read_csv(&args.map)?;
    write_heatmap_ply(&mesh, &map, &args.out)?;
    write_sidecar(eff, &sidecar_path(&args.out))?;
    println!("heatmap: {}", args.out.display());
    Ok(())
}

fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".config");
    out.with_file_name(name)
}

fn parse_point(raw: &str) -> Result<Point3<f64>> {
    let parts: Vec<f64> = raw
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::invalid(format!("bad point `{raw}` (expected x,y,z)")))?;
    if parts.len() != 3 {
        return Err(Error::invalid(format!("bad point `{raw}` (expected x,y,z)")));
    }
    Ok(Point3::new(parts[0], parts[1], parts[2]))
}

/// Scenario CSV: `face,dwell_ms,saccade_ms` with a header line.
pub fn read_scenario(path: &Path) -> Result<Vec<ScenarioEvent>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut events = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if lineno == 0 || line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        if cols.len() != 3 {
            return Err(Error::parse(path, lineno + 1, "expected face,dwell_ms,saccade_ms"));
        }
        let face: u32 = cols[0]
            .parse()
            .map_err(|_| Error::parse(path, lineno + 1, "bad face index"))?;
        let dwell_ms: f64 = cols[1]
            .parse()
            .map_err(|_| Error::parse(path, lineno + 1, "bad dwell_ms"))?;
        let saccade_ms: f64 = cols[2]
            .parse()
            .map_err(|_| Error::parse(path, lineno + 1, "bad saccade_ms"))?;
        events.push(ScenarioEvent {
            face,
            dwell_ms,
            saccade_ms,
        });
    }
    if events.is_empty() {
        return Err(Error::invalid("scenario has no events"));
    }
    Ok(events)
}

pub fn write_scenario(events: &[ScenarioEvent], path: &Path) -> Result<()> {
    let mut out = String::from("face,dwell_ms,saccade_ms\n");
    for ev in events {
        out.push_str(&format!("{},{},{}\n", ev.face, ev.dwell_ms, ev.saccade_ms));
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Convenience used by examples: baseline curvature x variance prediction.
pub fn baseline_from_mesh(
    mesh: &TexturedMesh,
    texture: Option<&TextureImage>,
    grid: usize,
    w_curvature: f64,
    w_variance: f64,
) -> Result<SaliencyMap> {
    let curvature = crate::features::gaussian_curvature(mesh);
    let variance = match texture {
        Some(tex) => face_texture_features(mesh, tex, grid)?
            .iter()
            .map(|p| p.color_variance)
            .collect(),
        None => vec![0.0; mesh.face_count()],
    };
    if variance.iter().all(|&v| v == 0.0) {
        return baseline_predict(&curvature, &curvature, w_curvature + w_variance, 0.0);
    }
    baseline_predict(&curvature, &variance, w_curvature, w_variance)
}
