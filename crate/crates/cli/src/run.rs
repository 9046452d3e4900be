//! The five commands.

use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use tricrystal::dynamics::{
    deviation_norm, discrete_equilibrium, evolve, evolve_until, growth_rate, seed_mode, EvolveConfig, GrowthFit,
    State, Trajectory,
};
use tricrystal::graph::{build_grid, sample};
use tricrystal::profiles::Deriv;
use tricrystal::spectral::{
    assemble, growth_from_eigenvalue, lowest_eigenpairs_with_tol, morse_and_kernel, OperatorSpec, SpectrumReport,
};
use tricrystal::{EdgeGrid64, GraphField, ProfileFamily, YGraphSpec, EDGES};

use crate::config::{Command, RunConfig};
use crate::error::CliError;
use crate::output::{csv, num, opt_num, OutputDir};
use crate::svg::{LinePlot, Series};

pub const SPECTRUM_HEADER: &str = "lambda,c1,c2,c3,family,eigen_index,eigenvalue,morse_index,kernel_dim,mu_plus";

/// Deviation norm, well past the fit window, at which an instability run stops.
const INSTABILITY_STOP: f64 = 1.0;

/// Options that come from the command line rather than the file.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub plot: bool,
    /// Worker threads for `sweep`; `None` uses all cores.
    pub jobs: Option<usize>,
}

#[derive(Debug)]
pub struct RunSummary {
    /// Human-readable result lines.
    pub messages: Vec<String>,
    pub files: Vec<std::path::PathBuf>,
}

pub fn run(cfg: &RunConfig, out_root: &Path, opts: &RunOptions) -> Result<RunSummary, CliError> {
    let start = Instant::now();
    let mut out = OutputDir::create(out_root)?;
    let plot = opts.plot || cfg.plot;
    let messages = match cfg.command {
        Command::Profile => profile(cfg, &mut out, plot)?,
        Command::Spectrum => spectrum(cfg, &mut out, plot)?,
        Command::Evolve => run_evolve(cfg, &mut out, plot)?,
        Command::Instability => instability(cfg, &mut out, plot)?,
        Command::Sweep => sweep(cfg, &mut out, plot, opts.jobs)?,
    };
    let mut echo = cfg.echo();
    echo.insert("plot".into(), plot.to_string());
    out.write_manifest(echo, start.elapsed().as_secs_f64())?;
    Ok(RunSummary { messages, files: out.written().to_vec() })
}

fn grid(cfg: &RunConfig) -> Result<EdgeGrid64, CliError> {
    Ok(build_grid(cfg.length, cfg.n_points)?)
}

fn graph_spec(cfg: &RunConfig, lambda: f64) -> Result<YGraphSpec<f64>, CliError> {
    Ok(YGraphSpec::new(cfg.speeds, lambda)?)
}

fn family(cfg: &RunConfig, lambda: f64) -> Result<Option<ProfileFamily<f64>>, CliError> {
    let spec = graph_spec(cfg, lambda)?;
    Ok(match cfg.family.kind() {
        Some(kind) => Some(ProfileFamily::new(kind, spec)?),
        None => None,
    })
}

fn single_lambda(cfg: &RunConfig) -> Result<f64, CliError> {
    cfg.lambda.ok_or_else(|| CliError::Config(format!("command '{}' needs 'lambda'", cfg.command.name())))
}

/// Eigenpairs for one coupling, with the Morse index and kernel dimension checked.
pub fn spectrum_at(cfg: &RunConfig, lambda: f64) -> Result<SpectrumReport<f64>, CliError> {
    let g = grid(cfg)?;
    let mut op = match family(cfg, lambda)? {
        Some(fam) => OperatorSpec::linearized(fam, g),
        None => OperatorSpec::free(graph_spec(cfg, lambda)?, g),
    };
    if cfg.restricted {
        op = op.restricted();
    }
    let op = assemble(&op)?;
    let tol = cfg.kernel_tol.unwrap_or_else(|| tricrystal::spectral::default_kernel_tol(g.spacing()));
    let report = lowest_eigenpairs_with_tol(&op, cfg.k.min(op.dim()), tol)?;
    morse_and_kernel(&report)?;
    Ok(report)
}

/// `spectrum.csv` rows for one coupling.
pub fn spectrum_rows(cfg: &RunConfig, lambda: f64, report: &SpectrumReport<f64>) -> Vec<String> {
    let mu = growth_from_eigenvalue(report.lowest(), report.morse_index).mu_plus();
    let [c1, c2, c3] = cfg.speeds;
    report
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(i, &nu)| {
            format!(
                "{},{},{},{},{},{i},{},{},{},{}",
                num(lambda),
                num(c1),
                num(c2),
                num(c3),
                cfg.family,
                num(nu),
                report.morse_index,
                report.kernel_dim,
                opt_num(mu)
            )
        })
        .collect()
}

fn edge_series(u: &GraphField<f64>, x_max: f64) -> Vec<Series> {
    let g = u.grid();
    (0..EDGES)
        .map(|j| {
            let pts = g.nodes().zip(u.edge(j)).filter(|(x, _)| *x <= x_max).map(|(x, &v)| (x, v)).collect();
            Series::new(format!("edge {}", j + 1), pts)
        })
        .collect()
}

fn field_plot(title: &str, y_label: &str, u: &GraphField<f64>) -> String {
    let x_max = u.grid().length().min(10.0);
    let mut plot = LinePlot::new(title, "x (distance from the junction)", y_label);
    plot.series = edge_series(u, x_max);
    plot.render()
}

fn field_rows(u: &GraphField<f64>, w: &GraphField<f64>) -> Vec<String> {
    let g = u.grid();
    let mut rows = Vec::with_capacity(EDGES * g.n_points());
    for j in 0..EDGES {
        for (i, x) in g.nodes().enumerate() {
            rows.push(format!("{j},{},{},{}", num(x), num(u.edge(j)[i]), num(w.edge(j)[i])));
        }
    }
    rows
}

fn profile(cfg: &RunConfig, out: &mut OutputDir, plot: bool) -> Result<Vec<String>, CliError> {
    let lambda = single_lambda(cfg)?;
    let fam = family(cfg, lambda)?.ok_or_else(|| CliError::Config("profile needs a kink or antikink family".into()))?;
    let g = grid(cfg)?;
    let phase = fam.sample(&g, Deriv::Value)?;
    let fluxon = fam.sample(&g, Deriv::First)?;
    out.write("profile.csv", &csv("edge,x,phase,fluxon", &field_rows(&phase, &fluxon)))?;
    if plot {
        out.write("profile.svg", &field_plot(&format!("{} phase, lambda = {lambda}", cfg.family), "phase", &phase))?;
        out.write("fluxon.svg", &field_plot(&format!("{} fluxon density, lambda = {lambda}", cfg.family), "phase_x", &fluxon))?;
    }
    let s = fam.shifts();
    Ok(vec![format!(
        "{} at lambda = {lambda}: shape {}, shifts ({:.12}, {:.12}, {:.12})",
        cfg.family,
        fam.shape().name(),
        s[0],
        s[1],
        s[2]
    )])
}

fn spectrum(cfg: &RunConfig, out: &mut OutputDir, plot: bool) -> Result<Vec<String>, CliError> {
    let lambda = single_lambda(cfg)?;
    let report = spectrum_at(cfg, lambda)?;
    out.write("spectrum.csv", &csv(SPECTRUM_HEADER, &spectrum_rows(cfg, lambda, &report)))?;
    if plot {
        let pts = report.eigenvalues.iter().enumerate().map(|(i, &nu)| (i as f64, nu)).collect();
        let mut p = LinePlot::new(&format!("lowest eigenvalues, {} lambda = {lambda}", cfg.family), "index", "eigenvalue")
            .with_series(Series::new("eigenvalue", pts));
        p.markers = true;
        out.write("spectrum.svg", &p.render())?;
        out.write("mode0.svg", &field_plot("lowest eigenvector", "mode", &report.eigenvectors[0]))?;
    }
    let mu = growth_from_eigenvalue(report.lowest(), report.morse_index).mu_plus();
    Ok(vec![format!(
        "lowest eigenvalue {:.10}, Morse index {}, kernel dimension {}, growth rate {}",
        report.lowest(),
        report.morse_index,
        report.kernel_dim,
        mu.map_or("none".into(), |m| format!("{m:.10}"))
    )])
}

fn pulse(cfg: &RunConfig, g: &EdgeGrid64) -> Result<GraphField<f64>, CliError> {
    let p = cfg.pulse;
    Ok(sample(|j, x| if j == 0 { p.amplitude * (-((x - p.center) / p.width).powi(2)).exp() } else { 0.0 }, g)?)
}

fn evolve_config(cfg: &RunConfig, g: &EdgeGrid64, spec: &YGraphSpec<f64>, fam: Option<ProfileFamily<f64>>, t_end: f64) -> EvolveConfig<f64> {
    let mut ec = EvolveConfig::new(g, spec, t_end).with_record_every(cfg.record_every);
    if let Some(dt) = cfg.dt {
        ec = ec.with_dt(dt);
    }
    if let Some(f) = fam {
        ec = ec.with_background(f);
    }
    ec
}

fn background(fam: Option<&ProfileFamily<f64>>, g: &EdgeGrid64) -> Result<GraphField<f64>, CliError> {
    Ok(match fam {
        Some(f) => discrete_equilibrium(f, g)?,
        None => GraphField::zeros(*g),
    })
}

fn snapshot_rows(traj: &Trajectory<f64>, every: usize, stride: usize) -> Vec<String> {
    let mut rows = Vec::new();
    let last = traj.snapshots.len().saturating_sub(1);
    for (k, s) in traj.snapshots.iter().enumerate() {
        if k % every != 0 && k != last {
            continue;
        }
        let g = s.grid();
        for j in 0..EDGES {
            for (i, x) in g.nodes().enumerate() {
                if i % stride == 0 || i + 1 == g.n_points() {
                    rows.push(format!("{},{j},{},{},{}", num(s.time), num(x), num(s.u.edge(j)[i]), num(s.v.edge(j)[i])));
                }
            }
        }
    }
    rows
}

fn run_evolve(cfg: &RunConfig, out: &mut OutputDir, plot: bool) -> Result<Vec<String>, CliError> {
    let lambda = single_lambda(cfg)?;
    let spec = graph_spec(cfg, lambda)?;
    let fam = family(cfg, lambda)?;
    let g = grid(cfg)?;
    let bg = background(fam.as_ref(), &g)?;
    let s0 = State::at_rest(bg.add_scaled(1.0, &pulse(cfg, &g)?)?);
    let ec = evolve_config(cfg, &g, &spec, fam, cfg.t_end.unwrap_or(10.0));
    let traj = evolve(&s0, &ec, &spec)?;
    out.write("snapshots.csv", &csv("time,edge,x,u,v", &snapshot_rows(&traj, cfg.snapshot_every, cfg.snapshot_stride)))?;
    let rows: Vec<String> = traj
        .energy
        .rows
        .iter()
        .map(|r| format!("{},{},{},{}", num(r.time), num(r.energy), num(r.vertex_term), num(r.boundary_flux_estimate)))
        .collect();
    out.write("energy.csv", &csv("time,energy,vertex_term,boundary_flux_estimate", &rows))?;
    if plot {
        let e0 = traj.energy.rows[0].energy;
        let scale = if e0 != 0.0 { e0.abs() } else { 1.0 };
        let pts = traj.energy.rows.iter().map(|r| (r.time, (r.energy - e0) / scale)).collect();
        let p = LinePlot::new("relative energy change", "t", "(H - H0) / |H0|").with_series(Series::new("energy", pts));
        out.write("energy.svg", &p.render())?;
        let last = traj.snapshots.last().map(|s| &s.u).unwrap_or(&s0.u);
        out.write("final_state.svg", &field_plot("u at the final time", "u", last))?;
    }
    Ok(vec![format!(
        "{} steps of dt = {}, relative energy drift {:.3e}",
        ((ec.t_end / ec.dt).round()) as u64,
        ec.dt,
        traj.energy.relative_drift()
    )])
}

fn instability(cfg: &RunConfig, out: &mut OutputDir, plot: bool) -> Result<Vec<String>, CliError> {
    let lambda = single_lambda(cfg)?;
    let fam = family(cfg, lambda)?.ok_or_else(|| CliError::Config("instability needs a kink or antikink family".into()))?;
    let spec = *fam.spec();
    let g = grid(cfg)?;
    let cfg2 = RunConfig { k: cfg.k.max(2), ..cfg.clone() };
    let report = spectrum_at(&cfg2, lambda)?;
    let nu0 = report.lowest();
    let mu = growth_from_eigenvalue(nu0, report.morse_index).mu_plus();
    let bg = background(Some(&fam), &g)?;
    let eps = cfg.epsilon;
    let s0 = seed_mode(&bg, &report.eigenvectors[0], eps, mu.unwrap_or(0.0))?;
    // stop before the far boundary can reflect anything back to the junction
    let t_default = (cfg.length - 10.0).max(cfg.length / 2.0) / spec.max_speed();
    let ec = evolve_config(cfg, &g, &spec, Some(fam), cfg.t_end.unwrap_or(t_default));
    let mut failure = None;
    let traj = evolve_until(&s0, &ec, &spec, |s| match deviation_norm(s, &bg) {
        Ok(d) => d > INSTABILITY_STOP,
        Err(e) => {
            failure = Some(e);
            true
        }
    })?;
    if let Some(e) = failure {
        return Err(e.into());
    }
    let fit = growth_rate(&traj.snapshots, &bg, eps)?;
    let (sigma, r2) = match fit {
        GrowthFit::Exponential { sigma, r_squared, .. } => (Some(sigma), Some(r_squared)),
        GrowthFit::NoWindow { .. } => (None, None),
    };
    let rel = match (sigma, mu) {
        (Some(s), Some(m)) => Some((s - m).abs() / m),
        _ => None,
    };
    let row = format!("{},{},{},{},{},{}", num(lambda), num(nu0), opt_num(mu), opt_num(sigma), opt_num(rel), opt_num(r2));
    out.write("rate.csv", &csv("lambda,nu0,mu_spectral,sigma_measured,rel_err,r_squared", &[row]))?;
    let devs: Vec<(f64, f64)> =
        traj.snapshots.iter().map(|s| deviation_norm(s, &bg).map(|d| (s.time, d))).collect::<Result<_, _>>()?;
    let rows: Vec<String> = devs.iter().map(|&(t, d)| format!("{},{}", num(t), num(d))).collect();
    out.write("growth.csv", &csv("time,deviation", &rows))?;
    if plot {
        let mut p = LinePlot::new(&format!("deviation from the {} profile, lambda = {lambda}", cfg.family), "t", "|u - phi|")
            .with_series(Series::new("measured", devs.clone()));
        if let Some(m) = mu {
            let pred = devs.iter().map(|&(t, _)| (t, eps * (m * t).exp())).filter(|p| p.1 <= 10.0).collect();
            p = p.with_series(Series::new("eps exp(mu t)", pred));
        }
        p.log_y = true;
        out.write("growth.svg", &p.render())?;
    }
    let mut msg = vec![format!(
        "lowest eigenvalue {nu0:.10}, Morse index {}, predicted rate {}",
        report.morse_index,
        mu.map_or("none (stable)".into(), |m| format!("{m:.10}"))
    )];
    msg.push(match fit {
        GrowthFit::Exponential { sigma, r_squared, points, .. } => {
            format!("measured rate {sigma:.10} from {points} samples (r^2 = {r_squared:.8})")
        }
        GrowthFit::NoWindow { max_ratio } => format!("no exponential growth window; max deviation / epsilon = {max_ratio:.3}"),
    });
    Ok(msg)
}

/// Rows, lowest eigenvalue and Morse index for one coupling.
type SweepPoint = (Vec<String>, f64, usize);

fn sweep(cfg: &RunConfig, out: &mut OutputDir, plot: bool, jobs: Option<usize>) -> Result<Vec<String>, CliError> {
    let lambdas = cfg.lambda_values();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Config(format!("cannot start {} worker threads: {e}", jobs.unwrap_or(0))))?;
    let root = out.root().to_path_buf();
    let part_name = |i: usize| format!("parts/part_{i:04}.csv");
    std::fs::create_dir_all(root.join("parts")).map_err(|e| CliError::io(root.join("parts"), e))?;
    let results: Vec<Result<SweepPoint, CliError>> = pool.install(|| {
        lambdas
            .par_iter()
            .enumerate()
            .map(|(i, &lambda)| {
                let report = spectrum_at(cfg, lambda)?;
                let rows = spectrum_rows(cfg, lambda, &report);
                let path = root.join(part_name(i));
                std::fs::write(&path, csv(SPECTRUM_HEADER, &rows)).map_err(|e| CliError::io(&path, e))?;
                Ok((rows, report.lowest(), report.morse_index))
            })
            .collect()
    });
    let mut all = Vec::new();
    let mut msg = Vec::new();
    let mut curves: Vec<Vec<(f64, f64)>> = Vec::new();
    for (i, (res, &lambda)) in results.into_iter().zip(&lambdas).enumerate() {
        let (rows, nu0, morse) = res?;
        out.record(&part_name(i));
        for (k, row) in rows.iter().enumerate() {
            let nu: f64 = row.split(',').nth(6).and_then(|v| v.parse().ok()).unwrap_or(f64::NAN);
            if curves.len() <= k {
                curves.resize(k + 1, Vec::new());
            }
            curves[k].push((lambda, nu));
        }
        all.extend(rows);
        msg.push(format!("lambda = {lambda}: lowest eigenvalue {nu0:.10}, Morse index {morse}"));
    }
    out.write("sweep.csv", &csv(SPECTRUM_HEADER, &all))?;
    if plot {
        let mut p = LinePlot::new(&format!("{} spectrum against lambda", cfg.family), "lambda", "eigenvalue");
        for (k, mut pts) in curves.into_iter().enumerate() {
            pts.sort_by(|a, b| a.0.total_cmp(&b.0));
            p = p.with_series(Series::new(format!("nu_{k}"), pts));
        }
        out.write("sweep.svg", &p.render())?;
    }
    Ok(msg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    #[test]
    fn spectrum_rows_have_the_documented_columns() {
        let cfg = parse_config("command=spectrum\nfamily=kink\nlambda=-4\nL=20\nn=401\nk=3").unwrap();
        let report = spectrum_at(&cfg, -4.0).unwrap();
        let rows = spectrum_rows(&cfg, -4.0, &report);
        assert_eq!(rows.len(), 3);
        for r in &rows {
            assert_eq!(r.split(',').count(), SPECTRUM_HEADER.split(',').count());
        }
        assert!(rows[0].contains(",kink,0,"));
        assert!(!rows[0].ends_with(','), "unstable kink has a growth rate");
    }

    #[test]
    fn pulse_sits_on_the_first_edge() {
        let cfg = parse_config("command=evolve\nfamily=free\nlambda=2\nL=20\nn=201\npulse_amplitude=0.1").unwrap();
        let g = grid(&cfg).unwrap();
        let p = pulse(&cfg, &g).unwrap();
        assert!((p.edge(0).iter().cloned().fold(0.0, f64::max) - 0.1).abs() < 1e-3);
        assert_eq!(p.edge(1).iter().cloned().fold(0.0, f64::max), 0.0);
    }
}
