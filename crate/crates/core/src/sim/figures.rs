//! Figure data: density grids, trajectory bundles and modular-value series.

use super::config::{fmt_f64, FigureName, RunConfig};
use super::csv::CsvTable;
use crate::cl::{cl_bohmian_position, cl_density, cl_local_modular_on_trajectory};
use crate::error::{Error, Result};
use crate::schrodinger::{bohmian_position, local_modular_on_trajectory, superposed_amplitude};
use crate::two_particle::common_bath_parts;
use crate::window::{overlap_window, WindowModel};
use rayon::prelude::*;
use std::path::{Path, PathBuf};

/// A column of values computed independently of its neighbours.
struct Series {
    label: String,
    values: Vec<Option<f64>>,
    notes: Vec<String>,
}

type Job<'a> = Box<dyn Fn() -> Result<Series> + Send + Sync + 'a>;

/// Run the jobs concurrently and return their results in submission order.
fn run_jobs(jobs: Vec<Job<'_>>) -> Result<Vec<Series>> {
    jobs.par_iter()
        .map(|job| job())
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

/// Compute the CSV tables of one figure. `cfg` must already hold the
/// figure's defaults and overrides; it is validated before anything runs.
pub fn generate_figure(name: FigureName, cfg: &RunConfig) -> Result<Vec<CsvTable>> {
    let cfg = RunConfig {
        figure: Some(name),
        ..cfg.clone()
    };
    cfg.validate()?;
    match name {
        FigureName::Fig1 => fig1(&cfg),
        FigureName::Fig2 | FigureName::Fig3 => Ok(vec![local_modular_figure(name, &cfg)?]),
        FigureName::Fig4 => Ok(vec![fig4(&cfg)?]),
    }
}

/// Write tables into `dir`, creating it if needed.
pub fn write_tables(tables: &[CsvTable], dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Config(format!("cannot create {}: {e}", dir.display())))?;
    tables
        .iter()
        .map(|t| {
            let path = dir.join(&t.file_name);
            std::fs::write(&path, t.render())
                .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))?;
            Ok(path)
        })
        .collect()
}

fn header(cfg: &RunConfig, file_name: &str, content: &str, notes: &[String]) -> Vec<String> {
    let name = cfg.figure.map_or("none", |f| f.as_str());
    let mut h = vec![
        format!("modvar {} {}", name, env!("CARGO_PKG_VERSION")),
        format!("file: {file_name}"),
        format!("content: {content}"),
        format!("reproduce: modvar figure {name} --config {file_name}"),
    ];
    h.extend(notes.iter().map(|n| format!("note: {n}")));
    h.extend(cfg.echo().into_iter().map(|l| format!("config {l}")));
    h
}

fn assemble(cfg: &RunConfig, file_name: &str, content: &str, first: (&str, Vec<f64>), series: Vec<Series>) -> CsvTable {
    let mut notes: Vec<String> = Vec::new();
    for s in &series {
        for n in &s.notes {
            let line = format!("{}: {n}", s.label);
            if !notes.contains(&line) {
                notes.push(line);
            }
        }
    }
    let mut columns = vec![first.0.to_string()];
    columns.extend(series.iter().map(|s| s.label.clone()));
    let mut table = CsvTable::new(file_name, columns);
    table.header = header(cfg, file_name, content, &notes);
    table.rows = first
        .1
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            std::iter::once(Some(x))
                .chain(series.iter().map(|s| s.values[i]))
                .collect()
        })
        .collect();
    table
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            if i + 1 == n {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}

fn start_position(cfg: &RunConfig, offset: f64) -> Result<f64> {
    let spec = cfg.superposition(cfg.alphas[0])?;
    Ok(spec.left().x0 + offset * spec.sigma0())
}

fn fig1(cfg: &RunConfig) -> Result<Vec<CsvTable>> {
    let c = cfg.constants()?;
    let spec = cfg.superposition(cfg.alphas[0])?;
    let bath = cfg.bath(cfg.temperatures[0])?;
    let xs = linspace(cfg.density_x_min, cfg.density_x_max, cfg.density_points);
    let slices = linspace(0.0, cfg.tmax, cfg.density_slices);
    let grid = cfg.time_grid()?;
    let mut tables = Vec::new();

    let density = |cl: bool| -> Result<CsvTable> {
        let jobs: Vec<Job> = slices
            .iter()
            .map(|&t| {
                let xs = &xs;
                Box::new(move || {
                    let values = xs
                        .iter()
                        .map(|&x| {
                            Some(if cl {
                                cl_density(&spec, &bath, &c, x, t)
                            } else {
                                superposed_amplitude(&spec, &c, x, t).norm_sqr()
                            })
                        })
                        .collect();
                    Ok(Series {
                        label: format!("t={}", fmt_f64(t)),
                        values,
                        notes: Vec::new(),
                    })
                }) as Job
            })
            .collect();
        let (file, content) = if cl {
            (
                "fig1_density_cl.csv",
                "cl probability density rho(x,t); one column per time slice",
            )
        } else {
            (
                "fig1_density_schrodinger.csv",
                "schrodinger probability density |Psi(x,t)|^2; one column per time slice",
            )
        };
        Ok(assemble(cfg, file, content, ("x", xs.clone()), run_jobs(jobs)?))
    };

    let trajectories = |cl: bool| -> Result<CsvTable> {
        let jobs: Vec<Job> = cfg
            .x0_offsets
            .iter()
            .map(|&offset| {
                let grid = &grid;
                Box::new(move || {
                    let x0 = start_position(cfg, offset)?;
                    let values = grid
                        .times()
                        .map(|t| {
                            Some(if cl {
                                cl_bohmian_position(spec.left(), &bath, &c, x0, t)
                            } else {
                                bohmian_position(spec.left(), &c, x0, t)
                            })
                        })
                        .collect();
                    Ok(Series {
                        label: format!("X0={}", fmt_f64(x0)),
                        values,
                        notes: Vec::new(),
                    })
                }) as Job
            })
            .collect();
        let (file, content) = if cl {
            (
                "fig1_trajectories_cl.csv",
                "cl Bohmian trajectories X(t) of the left packet",
            )
        } else {
            (
                "fig1_trajectories_schrodinger.csv",
                "schrodinger Bohmian trajectories X(t) of the left packet",
            )
        };
        Ok(assemble(
            cfg,
            file,
            content,
            ("t", grid.times().collect()),
            run_jobs(jobs)?,
        ))
    };

    if cfg.framework.includes_schrodinger() {
        tables.push(density(false)?);
        tables.push(trajectories(false)?);
    }
    if cfg.framework.includes_cl() {
        tables.push(density(true)?);
        tables.push(trajectories(true)?);
    }
    Ok(tables)
}

/// Local modular value along Bohmian trajectories: one series per
/// `(alpha, dynamics, X0)`.
fn local_modular_figure(name: FigureName, cfg: &RunConfig) -> Result<CsvTable> {
    let c = cfg.constants()?;
    let grid = cfg.time_grid()?;
    let mut jobs: Vec<Job> = Vec::new();
    for &alpha in &cfg.alphas {
        let spec = cfg.superposition(alpha)?;
        for &offset in &cfg.x0_offsets {
            let x0 = start_position(cfg, offset)?;
            if cfg.framework.includes_schrodinger() {
                let grid = &grid;
                jobs.push(Box::new(move || {
                    let out = local_modular_on_trajectory(&spec, &c, x0, grid);
                    Ok(Series {
                        label: format!("schrodinger alpha={} X0={}", fmt_f64(alpha), fmt_f64(x0)),
                        values: out.series.values().map(Some).collect(),
                        notes: out.warnings,
                    })
                }));
            }
            if cfg.framework.includes_cl() {
                for &temp in &cfg.temperatures {
                    let bath = cfg.bath(temp)?;
                    let grid = &grid;
                    jobs.push(Box::new(move || {
                        let out = cl_local_modular_on_trajectory(&spec, &bath, &c, x0, grid)?;
                        Ok(Series {
                            label: format!("cl T={} alpha={} X0={}", fmt_f64(temp), fmt_f64(alpha), fmt_f64(x0)),
                            values: out.series.values().map(Some).collect(),
                            notes: out.warnings,
                        })
                    }));
                }
            }
        }
    }
    let file = format!("{name}.csv");
    let content =
        "local modular value Re[rho(X+L,X) + rho(X-L,X)] / 2 rho(X,X) along Bohmian trajectories of the left packet";
    Ok(assemble(
        cfg,
        &file,
        content,
        ("t", grid.times().collect()),
        run_jobs(jobs)?,
    ))
}

/// Reduced modular value of one particle under a shared bath, blanked past
/// each temperature's non-overlap window.
fn fig4(cfg: &RunConfig) -> Result<CsvTable> {
    let c = cfg.constants()?;
    let grid = cfg.time_grid()?;
    let mut jobs: Vec<Job> = Vec::new();
    for &alpha in &cfg.alphas {
        let spec = cfg.superposition(alpha)?;
        for &temp in &cfg.temperatures {
            let bath = cfg.bath(temp)?;
            let grid = &grid;
            jobs.push(Box::new(move || {
                let window = overlap_window(&WindowModel::CommonBath(bath), &spec, &c, cfg.support_factor)?;
                let values: Vec<Option<f64>> = grid
                    .times()
                    .map(|t| (t <= window.t_max).then(|| common_bath_parts(&spec, &bath, &c, t).value()))
                    .collect();
                let mut notes = Vec::new();
                if values.iter().any(Option::is_none) {
                    notes.push(format!(
                        "blank past the two-particle window t_max = {}",
                        fmt_f64(window.t_max)
                    ));
                }
                Ok(Series {
                    label: format!("cl T={} alpha={}", fmt_f64(temp), fmt_f64(alpha)),
                    values,
                    notes,
                })
            }));
        }
    }
    let content = "reduced modular value <cos(p1 L/hbar)> of the first particle under a shared bath";
    Ok(assemble(
        cfg,
        "fig4.csv",
        content,
        ("t", grid.times().collect()),
        run_jobs(jobs)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::csv::parse_rows;

    fn small(name: FigureName) -> RunConfig {
        RunConfig {
            samples: 21,
            density_points: 91,
            density_slices: 5,
            ..RunConfig::for_figure(name)
        }
    }

    #[test]
    fn fig2_layout() {
        let tables = generate_figure(FigureName::Fig2, &small(FigureName::Fig2)).unwrap();
        assert_eq!(tables.len(), 1);
        let t = &tables[0];
        assert_eq!(t.series_count(), 6);
        assert_eq!(t.rows.len(), 21);
        let text = t.render();
        assert!(text.contains("# config gamma = 0.001\n"));
        assert!(text.contains("# config temperature = 2.0\n"));
    }

    #[test]
    fn fig3_and_fig4_counts() {
        let f3 = generate_figure(FigureName::Fig3, &small(FigureName::Fig3)).unwrap();
        assert_eq!(f3[0].series_count(), 12);
        let f4 = generate_figure(FigureName::Fig4, &small(FigureName::Fig4)).unwrap();
        assert_eq!(f4[0].series_count(), 6);
    }

    #[test]
    fn fig1_unitary_limit() {
        let mut cfg = small(FigureName::Fig1);
        cfg.gamma = 0.0;
        let tables = generate_figure(FigureName::Fig1, &cfg).unwrap();
        assert_eq!(tables.len(), 4);
        for (s, l) in [(0, 2), (1, 3)] {
            let a = parse_rows(&tables[s].render());
            let b = parse_rows(&tables[l].render());
            for (ra, rb) in a.iter().zip(&b) {
                for (x, y) in ra.iter().zip(rb) {
                    assert!((x.unwrap() - y.unwrap()).abs() < 1e-8);
                }
            }
        }
        assert_eq!(tables[1].series_count(), 9);
    }

    #[test]
    fn deterministic() {
        let cfg = small(FigureName::Fig3);
        let a = generate_figure(FigureName::Fig3, &cfg).unwrap();
        let b = generate_figure(FigureName::Fig3, &cfg).unwrap();
        assert_eq!(a[0].render(), b[0].render());
    }

    #[test]
    fn invalid_override_stops_early() {
        let mut cfg = small(FigureName::Fig2);
        cfg.sigma0 = -1.0;
        assert!(matches!(generate_figure(FigureName::Fig2, &cfg), Err(Error::Config(_))));
    }
}
