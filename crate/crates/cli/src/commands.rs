use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use tad_core::config::RunConfig;
use tad_core::dataset::{class_histogram, deserialize_dataset, serialize_dataset};
use tad_core::eval::grid::net_spec;
use tad_core::eval::report::parse_csv;
use tad_core::eval::{evaluate_model, grid_search, render_csv, render_grid_csv, render_text, report_rows, NetType};
use tad_core::features::NullformerCalibration;
use tad_core::nets::{load_model, save_model, Kind, NetworkSpec};
use tad_core::pipeline::{build_dataset, plan_scenes, scene_features, simulate_scene, SceneRole};
use tad_core::scene::{ingest_wav, write_wav, ArrayGeometry};
use tad_core::training::gradcheck::{grad_check, GRAD_TOLERANCE};
use tad_core::training::train;
use tad_core::{Result, TadError};

use crate::{Cli, Command};

const SCENE_INDEX: &str = "scenes.csv";
const SCENE_INDEX_HEADER: &str = "id,role,target_doa,interferer_doas,duration_s";

fn load_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

/// Config stored next to the inputs of a later stage, unless one is given
/// explicitly.
fn stage_config(cli: &Cli, dir: &Path) -> Result<RunConfig> {
    let stored = dir.join("config.toml");
    if cli.config.is_none() && stored.is_file() {
        let mut cfg = RunConfig::load(&stored)?;
        if let Some(seed) = cli.seed {
            cfg.seed = seed;
        }
        return Ok(cfg);
    }
    load_config(cli)
}

fn write_config(dir: &Path, cfg: &RunConfig) -> Result<()> {
    fs::write(dir.join("config.toml"), cfg.to_toml())?;
    Ok(())
}

fn parent_dir(path: &Path) -> PathBuf {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    }
}

fn parse_net(s: &str) -> Result<NetType> {
    s.parse()
}

pub fn run(cli: Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::Simulate { out } => simulate(&cli, out),
        Command::Features { scenes, out } => features(&cli, scenes, out),
        Command::Train { data, net, epochs, out } => {
            let mut cfg = stage_config(&cli, &parent_dir(data))?;
            if let Some(e) = epochs {
                cfg.train.epochs = *e;
            }
            if let Some(a) = net.smoothing {
                cfg.grid.smoothing = a;
            }
            cfg.validate()?;
            train_one(&cfg, data, parse_net(&net.net)?, net.layers, net.neurons, out)
        }
        Command::Eval { data, model, net, smoothing } => {
            let cfg = stage_config(&cli, &parent_dir(data))?;
            eval(data, model, parse_net(net)?, smoothing.unwrap_or(cfg.grid.smoothing))
        }
        Command::Grid { data, nets, layers, neurons, epochs, smoothing, jobs, out } => {
            let mut cfg = stage_config(&cli, &parent_dir(data))?;
            if !layers.is_empty() {
                cfg.grid.layers = layers.clone();
            }
            if !neurons.is_empty() {
                cfg.grid.neurons = neurons.clone();
            }
            if let Some(e) = epochs {
                cfg.train.epochs = *e;
            }
            if let Some(a) = smoothing {
                cfg.grid.smoothing = *a;
            }
            if let Some(j) = jobs {
                cfg.grid.jobs = *j;
            }
            cfg.validate()?;
            let types = if nets.is_empty() { NetType::ALL.to_vec() } else { nets.iter().map(|s| parse_net(s)).collect::<Result<_>>()? };
            grid(&cfg, data, &types, out)
        }
        Command::Gradcheck { net, layers, neurons } => {
            let cfg = load_config(&cli)?;
            let kinds = if net.is_empty() { Kind::ALL.to_vec() } else { net.iter().map(|s| s.parse()).collect::<Result<_>>()? };
            gradcheck(cfg.seed, &kinds, layers, neurons)
        }
        Command::Report { grid, csv } => {
            let rows = parse_csv(&fs::read_to_string(grid.join("report.csv"))?)?;
            print!("{}", if *csv { render_csv(&rows) } else { render_text(&rows) });
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn simulate(cli: &Cli, out: &Path) -> Result<ExitCode> {
    let cfg = load_config(cli)?;
    fs::create_dir_all(out)?;
    write_config(out, &cfg)?;
    let geometry = ArrayGeometry::behind_the_ear().with_sample_rate(cfg.scenes.sample_rate)?;
    let mut index = format!("{SCENE_INDEX_HEADER}\n");
    for plan in plan_scenes(&cfg.scenes, cfg.seed)? {
        let sim = simulate_scene(&plan, &geometry, &cfg.features)?;
        let stem = format!("scene{:03}", plan.id);
        write_wav(&out.join(format!("{stem}.wav")), &sim.recording)?;
        let mut sinr = String::from("block,sinr_db\n");
        let mut labels = String::from("block,label\n");
        for (t, (s, l)) in sim.sinr_db.iter().zip(&sim.labels).enumerate() {
            let _ = writeln!(sinr, "{t},{s:.6}");
            let _ = writeln!(labels, "{t},{}", u8::from(*l));
        }
        fs::write(out.join(format!("{stem}_sinr.csv")), sinr)?;
        fs::write(out.join(format!("{stem}_labels.csv")), labels)?;
        fs::write(out.join(format!("{stem}_hist.csv")), class_histogram(&sim.labels, &sim.sinr_db).to_csv())?;
        let interferers: Vec<String> = plan.spec.interferer_doas.iter().map(|d| format!("{d:.6}")).collect();
        let _ = writeln!(
            index,
            "{},{},{:.6},{},{}",
            plan.id,
            plan.role.as_str(),
            plan.spec.target_doa,
            interferers.join(";"),
            plan.spec.duration
        );
        println!("{stem}: {} blocks, {:.1}% positive", sim.labels.len(), 100.0 * positive_share(&sim.labels));
    }
    fs::write(out.join(SCENE_INDEX), index)?;
    Ok(ExitCode::SUCCESS)
}

fn positive_share(labels: &[bool]) -> f64 {
    labels.iter().filter(|&&l| l).count() as f64 / labels.len().max(1) as f64
}

struct IndexedScene {
    id: u32,
    role: SceneRole,
    target_doa: f64,
}

fn read_index(dir: &Path) -> Result<Vec<IndexedScene>> {
    let text = fs::read_to_string(dir.join(SCENE_INDEX))?;
    let mut lines = text.lines();
    if lines.next() != Some(SCENE_INDEX_HEADER) {
        return Err(TadError::Format { field: SCENE_INDEX.into(), message: "unexpected header".into() });
    }
    let bad = |line: &str| TadError::Format { field: SCENE_INDEX.into(), message: format!("malformed row `{line}`") };
    lines
        .filter(|l| !l.is_empty())
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 5 {
                return Err(bad(line));
            }
            let role = match f[1] {
                "train" => SceneRole::Train,
                "test" => SceneRole::Test,
                _ => return Err(bad(line)),
            };
            Ok(IndexedScene {
                id: f[0].parse().map_err(|_| bad(line))?,
                role,
                target_doa: f[2].parse().map_err(|_| bad(line))?,
            })
        })
        .collect()
}

fn read_labels(path: &Path) -> Result<Vec<bool>> {
    let text = fs::read_to_string(path)?;
    let field = path.display().to_string();
    text.lines()
        .skip(1)
        .filter(|l| !l.is_empty())
        .map(|l| match l.rsplit(',').next() {
            Some("0") => Ok(false),
            Some("1") => Ok(true),
            _ => Err(TadError::Format { field: field.clone(), message: format!("bad label row `{l}`") }),
        })
        .collect()
}

fn features(cli: &Cli, scenes: &Path, out: &Path) -> Result<ExitCode> {
    let cfg = stage_config(cli, scenes)?;
    let geometry = ArrayGeometry::behind_the_ear().with_sample_rate(cfg.scenes.sample_rate)?;
    let calibration = NullformerCalibration::build(&geometry)?;
    let mut feats = Vec::new();
    for scene in read_index(scenes)? {
        let stem = format!("scene{:03}", scene.id);
        let rec = ingest_wav(&scenes.join(format!("{stem}.wav")))?;
        let labels = read_labels(&scenes.join(format!("{stem}_labels.csv")))?;
        feats.push(scene_features(scene.id, scene.role, &rec, scene.target_doa, &labels, &geometry, &cfg.features, &calibration)?);
    }
    let built = build_dataset(&feats, &cfg.dataset, cfg.seed)?;
    let dir = parent_dir(out);
    fs::create_dir_all(&dir)?;
    serialize_dataset(&built.split, out)?;
    fs::write(out.with_extension("norm"), built.norm.to_text())?;
    write_config(&dir, &cfg)?;
    let s = &built.split;
    println!(
        "train {} / validation {} / test {} sequences (scenes {:?} / {:?} / {:?})",
        s.train.len(),
        s.validation.len(),
        s.test.len(),
        s.scenes.train,
        s.scenes.validation,
        s.scenes.test
    );
    Ok(ExitCode::SUCCESS)
}

fn train_one(cfg: &RunConfig, data: &Path, net: NetType, layers: usize, neurons: usize, out: &Path) -> Result<ExitCode> {
    let split = deserialize_dataset(data)?;
    let spec = net_spec(net, layers, neurons, split.train.m())?;
    let outcome = train(&spec, net.input_mode(cfg.grid.smoothing), &split.train, &split.validation, &cfg.train_config())?;
    fs::create_dir_all(out)?;
    save_model(&spec, &outcome.params, &out.join("model.tadm"))?;
    fs::write(out.join("epochs.csv"), outcome.log.to_csv())?;
    fs::write(out.join("timing.csv"), outcome.log.timing_csv())?;
    write_config(out, cfg)?;
    println!(
        "{net} L={layers} N={neurons}: best validation MCC {:.4} at epoch {} ({:?})",
        outcome.best_val_mcc, outcome.best_epoch, outcome.stop
    );
    Ok(ExitCode::SUCCESS)
}

fn eval(data: &Path, model: &Path, net: NetType, smoothing: f64) -> Result<ExitCode> {
    let split = deserialize_dataset(data)?;
    let (spec, params) = load_model(model)?;
    let expected = net_spec(net, spec.layers, spec.neurons, split.test.m())?;
    if expected != spec {
        return Err(TadError::InvalidArgument(format!("model is a {} network with input {}, not {net}", spec.kind, spec.input_dim)));
    }
    let r = evaluate_model(&spec, &params, &split.test, net.input_mode(smoothing))?;
    println!("acc={:.6} auc={:.6} mcc={:.6} P={} N={} L={}", r.acc, r.auc, r.mcc, r.params, r.neurons, r.layers);
    Ok(ExitCode::SUCCESS)
}

fn grid(cfg: &RunConfig, data: &Path, types: &[NetType], out: &Path) -> Result<ExitCode> {
    let split = deserialize_dataset(data)?;
    let result = grid_search(types, &split, &cfg.train_config(), &cfg.grid)?;
    fs::create_dir_all(out)?;
    write_config(out, cfg)?;
    fs::write(out.join("grid.csv"), render_grid_csv(&result))?;
    for &t in types {
        let rows: Vec<_> = result.entries.iter().filter(|e| e.net == t).collect();
        let mut csv = String::from("kind,L,N,P,val_mcc\n");
        for e in rows {
            let _ = writeln!(csv, "{},{},{},{},{:.6}", t.slug(), e.layers, e.neurons, e.params_count, e.val_mcc);
        }
        fs::write(out.join(format!("grid_{}.csv", t.slug())), csv)?;
    }
    for s in &result.selected {
        let e = &result.entries[s.entry];
        let spec: NetworkSpec = net_spec(s.net, e.layers, e.neurons, split.train.m())?;
        save_model(&spec, &e.params, &out.join(format!("{}.tadm", s.net.slug())))?;
        fs::write(out.join(format!("{}_epochs.csv", s.net.slug())), e.log.to_csv())?;
    }
    let rows = report_rows(&result);
    fs::write(out.join("report.csv"), render_csv(&rows))?;
    let text = render_text(&rows);
    fs::write(out.join("report.txt"), &text)?;
    print!("{text}");
    Ok(ExitCode::SUCCESS)
}

fn gradcheck(seed: u64, kinds: &[Kind], layers: &[usize], neurons: &[usize]) -> Result<ExitCode> {
    let mut worst = 0.0f64;
    for &kind in kinds {
        for &l in layers {
            for &n in neurons {
                let spec = NetworkSpec::new(kind, l, n, 8)?;
                let r = grad_check(&spec, seed)?;
                println!(
                    "{kind} L={l} N={n}: max relative error {:.3e} in {} [{}]",
                    r.max_rel_error,
                    r.worst_tensor,
                    if r.passed() { "ok" } else { "FAIL" }
                );
                worst = worst.max(r.max_rel_error);
            }
        }
    }
    if worst < GRAD_TOLERANCE {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("error: gradient check failed (max relative error {worst:.3e} >= {GRAD_TOLERANCE:e})");
        Ok(ExitCode::from(2))
    }
}
