//! One function per subcommand. Each returns the exit status it wants and writes its
//! artifacts under the configured output directory.

use nifs_core::conditions::{self, ConditionsConfig};
use nifs_core::dimension::{self, StreamSampler, SweepConfig};
use nifs_core::gibbs;
use nifs_core::nifs::MapSchedule;
use nifs_core::pressure::{self, BowenDimension, PressureConfig};
use nifs_core::raster;
use nifs_core::records;
use nifs_core::transversality::{self, ParamDisk, ScanConfig, SearchConfig, SearchRegion};
use nifs_core::Complex64;

use crate::config::{parse_disk, parse_path, RunConfig};
use crate::output::{ensure_dir, write_document, Provenance};
use crate::{CliError, Outcome};

fn internal(e: impl std::fmt::Display) -> CliError {
    CliError::Internal(e.to_string())
}

fn pressure_config(config: &RunConfig) -> PressureConfig {
    PressureConfig {
        max_depth: config.depth.unwrap_or(pressure::DEFAULT_MAX_DEPTH),
        ..PressureConfig::default()
    }
}

pub fn pressure(config: &RunConfig) -> Result<Outcome, CliError> {
    let schedule = config.schedule()?;
    let params = config.parameters(&schedule)?;
    let pc = pressure_config(config);
    let rows: Vec<_> = params
        .iter()
        .map(|&t| {
            (
                t,
                pressure::bowen_dimension(&schedule, t, &pc).map_err(|e| e.to_string()),
            )
        })
        .collect();
    let errors = rows.iter().filter(|r| r.1.is_err()).count();
    let infinite = rows
        .iter()
        .filter(|r| matches!(&r.1, Ok(b) if b.dimension == BowenDimension::Infinite))
        .count();
    let path = write_document(
        &config.out,
        "pressure.tsv",
        &Provenance::new("pressure", config),
        &records::pressure_table(&rows).body(),
    )?;
    if errors > 0 {
        eprintln!("warning: {errors} parameter(s) rejected; see the error column");
    }
    println!(
        "pressure: {} parameter(s), {infinite} infinite, {errors} rejected -> {}",
        rows.len(),
        path.display()
    );
    Ok(if infinite > 0 {
        Outcome::Marker
    } else {
        Outcome::Success
    })
}

fn sweep_config(config: &RunConfig) -> SweepConfig {
    SweepConfig {
        points: config.points.unwrap_or(100_000),
        tolerance: config.tol.unwrap_or(1e-6),
        seed: config.seed,
        pressure: pressure_config(config),
        ..SweepConfig::default()
    }
}

pub fn dim(config: &RunConfig) -> Result<Outcome, CliError> {
    let schedule = config.schedule()?;
    let params = config.parameters(&schedule)?;
    let sc = sweep_config(config);
    let result = dimension::dimension_sweep(&schedule, &params, &sc);
    let provenance = Provenance::new("dim", config);
    let path = write_document(
        &config.out,
        "dim.tsv",
        &provenance,
        &records::sweep_table(&result).body(),
    )?;
    if let Some(eps) = config.eps {
        for (k, r) in result.records.iter().enumerate() {
            if r.error.is_some() {
                continue;
            }
            let cloud = dimension::sample_limit_set(
                &schedule,
                r.t,
                sc.points,
                sc.tolerance,
                StreamSampler::Uniform,
                dimension::sweep_seed(&sc, k),
            )
            .map_err(internal)?;
            raster::render_cloud(&cloud, eps)
                .write_png(&config.out.join(format!("dim_{k}.png")), &provenance.png_text())
                .map_err(internal)?;
        }
    }
    let inconclusive = result
        .records
        .iter()
        .any(|r| r.area.as_ref().is_some_and(|a| a.verdict == dimension::AreaVerdict::Inconclusive));
    let infinite = result
        .records
        .iter()
        .any(|r| r.bowen == Some(BowenDimension::Infinite));
    println!(
        "dim: conforming fraction {:.4} over {} point(s) (threshold {} is an engineering choice) -> {}",
        result.conforming_fraction,
        result.records.len(),
        result.threshold,
        path.display()
    );
    Ok(if inconclusive || infinite {
        Outcome::Marker
    } else {
        Outcome::Success
    })
}

fn require_example(schedule: &MapSchedule) -> Result<(), CliError> {
    if schedule.is_example_family() {
        Ok(())
    } else {
        Err(CliError::Config(
            "transversality is implemented for the paper-example family only".into(),
        ))
    }
}

pub fn transversality(config: &RunConfig) -> Result<Outcome, CliError> {
    let schedule = config.schedule()?;
    require_example(&schedule)?;
    let (center, radius) = match &config.disk {
        Some(d) => parse_disk(d)?,
        None => (Complex64::new(0.3, 0.45), 0.2),
    };
    let region = ParamDisk::new(center, radius).clipped(config.clip.unwrap_or(0.72));
    if !(region.gap_inside_parameter_set() > 0.0) {
        return Err(CliError::Config(
            "transversality disk is not inside the parameter set; shrink it or lower --clip".into(),
        ));
    }
    let provenance = Provenance::new("transversality", config);
    let scan_config = ScanConfig {
        levels: config.levels.unwrap_or(20),
        pairs: config.pairs.unwrap_or(32),
        seed: config.seed,
        ..ScanConfig::default()
    };
    let scan = transversality::transversality_scan(&schedule, &region, &scan_config)
        .map_err(internal)?;
    let path = write_document(
        &config.out,
        "transversality.tsv",
        &provenance,
        &records::scan_table(&scan).body(),
    )?;
    println!(
        "transversality: K_hat {:.6} (spread {:.3}) over n = 1..{} -> {}",
        scan.k_hat,
        scan.k_spread,
        scan.rows.len(),
        path.display()
    );
    let mut outcome = Outcome::Success;
    let trials = config.trials.unwrap_or(0);
    if trials > 0 {
        let search_config = SearchConfig {
            trials,
            restarts: config.restarts.unwrap_or(transversality::DEFAULT_RESTARTS),
            region: SearchRegion::inside_parameter_set(1e-3),
            seed: config.seed,
            ..SearchConfig::default()
        };
        let report = transversality::double_zero_search(&search_config).map_err(internal)?;
        let path = write_document(
            &config.out,
            "double_zero.tsv",
            &provenance,
            &records::search_table(&report).body(),
        )?;
        println!(
            "double-zero search: min max(|f|,|f'|) = {:.6e} over {} trial(s), {} below {} -> {}",
            report.worst.value,
            report.trials,
            report.below_threshold,
            report.threshold,
            path.display()
        );
        if report.below_threshold > 0 {
            outcome = Outcome::Marker;
        }
    }
    if let Some(r) = config.mask_radius {
        let n = config.level.unwrap_or(1).max(1);
        let (omega, tau) = transversality::random_pair(&schedule, n, config.seed);
        let mask = transversality::sublevel_mask(&schedule, &region, &omega, &tau, r, 256)
            .map_err(internal)?;
        let path = config.out.join("transversality_mask.png");
        mask.write_png(&path, &provenance.png_text()).map_err(internal)?;
        println!("mask -> {}", path.display());
    }
    Ok(outcome)
}

pub fn conditions(config: &RunConfig) -> Result<Outcome, CliError> {
    let schedule = config.schedule()?;
    let params = config.parameters(&schedule)?;
    let cc = ConditionsConfig {
        depth: config.depth.unwrap_or(20),
        seed: config.seed,
        ..ConditionsConfig::default()
    };
    let report = conditions::verify_conditions(&schedule, &params, &cc)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let mut body = report.to_json();
    body.push('\n');
    let path = write_document(
        &config.out,
        "conditions.txt",
        &Provenance::new("conditions", config),
        &body,
    )?;
    for c in &report.conditions {
        let status = serde_json::to_value(&c.status).map_err(internal)?;
        println!("condition {} ({}): {}", c.condition, c.name, status["status"]);
    }
    println!("conditions -> {}", path.display());
    Ok(if report.any_failed() {
        Outcome::Marker
    } else {
        Outcome::Success
    })
}

pub fn gibbs(config: &RunConfig) -> Result<Outcome, CliError> {
    let schedule = config.schedule()?;
    let t = config.single_parameter(&schedule)?;
    let level = config.level.unwrap_or(3);
    let s = match config.s {
        Some(s) => s,
        None => match pressure::bowen_dimension(&schedule, t, &pressure_config(config))
            .map_err(|e| CliError::Config(e.to_string()))?
            .dimension
        {
            BowenDimension::Finite(s) => s,
            BowenDimension::Infinite => {
                eprintln!("Bowen dimension is infinite at t; pass --s");
                return Ok(Outcome::Marker);
            }
        },
    };
    let measure =
        gibbs::build_gibbs(&schedule, t, s, level).map_err(|e| CliError::Config(e.to_string()))?;
    let certificate = measure.certificate(&schedule, 1.0).map_err(internal)?;
    let path = write_document(
        &config.out,
        "gibbs.tsv",
        &Provenance::new("gibbs", config),
        &records::gibbs_table(&measure).body(),
    )?;
    println!(
        "gibbs: {} cylinder(s) at level {level}, s = {s}; certificate {} ({} checked, max log excess {:.3e}) -> {}",
        measure.len(),
        if certificate.holds() { "holds" } else { "violated" },
        certificate.checked,
        certificate.max_log_excess,
        path.display()
    );
    Ok(if certificate.holds() {
        Outcome::Success
    } else {
        Outcome::Marker
    })
}

pub fn render(config: &RunConfig) -> Result<Outcome, CliError> {
    let schedule = config.schedule()?;
    let t = config.single_parameter(&schedule)?;
    let cloud = dimension::sample_limit_set(
        &schedule,
        t,
        config.points.unwrap_or(100_000),
        config.tol.unwrap_or(1e-6),
        StreamSampler::Uniform,
        config.seed,
    )
    .map_err(|e| CliError::Config(e.to_string()))?;
    let eps = config.eps.unwrap_or(cloud.diameter() / 512.0);
    if !(eps > 0.0) {
        return Err(CliError::Config("render cell size must be positive".into()));
    }
    let image = raster::render_cloud(&cloud, eps);
    ensure_dir(&config.out)?;
    let path = config.out.join("render.png");
    image
        .write_png(&path, &Provenance::new("render", config).png_text())
        .map_err(internal)?;
    println!(
        "render: {}x{} pixels, {} covered -> {}",
        image.width,
        image.height,
        image.count(255),
        path.display()
    );
    Ok(Outcome::Success)
}

pub fn sweep(config: &RunConfig) -> Result<Outcome, CliError> {
    let schedule = config.schedule()?;
    let path = match &config.path {
        Some(p) => {
            let (from, to, steps) = parse_path(p)?;
            pressure::straight_path(from, to, steps)
        }
        None => config.parameters(&schedule)?,
    };
    let scan = pressure::bowen_continuity_scan(&schedule, &path, &pressure_config(config))
        .map_err(|e| CliError::Config(e.to_string()))?;
    let out = write_document(
        &config.out,
        "sweep.tsv",
        &Provenance::new("sweep", config),
        &records::continuity_table(&scan).body(),
    )?;
    println!(
        "sweep: {} point(s), max |delta s| {:.6e}, max ratio {:.6e} -> {}",
        scan.rows.len(),
        scan.max_abs_delta,
        scan.max_ratio,
        out.display()
    );
    let infinite = scan
        .rows
        .iter()
        .any(|r| r.result.dimension == BowenDimension::Infinite);
    Ok(if infinite {
        Outcome::Marker
    } else {
        Outcome::Success
    })
}
