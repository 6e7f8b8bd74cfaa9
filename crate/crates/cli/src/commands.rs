use idma::analytic::{CfEvaluation, LimitVariant};
use idma::simulate::{empirical_cf, monte_carlo};
use idma::verify::{cf_convergence, hyperuniformity, HyperSimulation};
use serde::Serialize;

use crate::config::{Format, Resolved, DEFAULT_CONVERGE_GRID, DEFAULT_HYPER_GRID, DEFAULT_REPLICATES};
use crate::output::{num, opt, Sink};
use crate::{CliError, Command};

pub fn default_format(cmd: Command) -> Format {
    match cmd {
        Command::Conditions | Command::Converge | Command::Hyper => Format::Json,
        Command::Cf | Command::Cov | Command::Simulate => Format::Csv,
    }
}

pub fn run(cmd: Command, r: &Resolved, format: Format, threads: usize, sink: &mut Sink) -> Result<(), CliError> {
    match cmd {
        Command::Conditions => conditions(r, format, sink),
        Command::Cf => cf(r, format, threads, sink),
        Command::Cov => cov(r, format, sink),
        Command::Simulate => simulate(r, format, threads, sink),
        Command::Converge => converge(r, format, threads, sink),
        Command::Hyper => hyper(r, format, threads, sink),
    }
}

fn pool(threads: usize) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Other(format!("thread pool: {e}")))
}

fn bool_str(b: bool) -> String {
    b.to_string()
}

fn conditions(r: &Resolved, format: Format, sink: &mut Sink) -> Result<(), CliError> {
    let report = r.model.check_conditions(r.conditions_budget);
    match format {
        Format::Json => sink.json("conditions", &report),
        Format::Csv => {
            let values = [report.c1, report.c2, report.c3];
            let rows: Vec<Vec<String>> = (0..3)
                .map(|i| {
                    vec![
                        format!("c{}", i + 1),
                        num(values[i]),
                        num(report.error_estimates[i]),
                        bool_str(report.pass[i]),
                    ]
                })
                .collect();
            sink.csv("conditions", &["condition", "value", "error_estimate", "pass"], &rows)
        }
    }
}

fn cf(r: &Resolved, format: Format, threads: usize, sink: &mut Sink) -> Result<(), CliError> {
    let spec = r.fdd()?;
    let model = &r.model;
    let mut tables = pool(threads)?.install(|| -> Result<Vec<CfEvaluation>, CliError> {
        let mut tables = Vec::new();
        if r.ls.len() == 1 && r.zs[0] != 0.0 {
            let z0 = r.zs[0];
            tables.push(CfEvaluation::tabulate("stationary", &r.z_grid, |z| model.log_cf_stationary(z * z0))?);
        }
        if model.kernel().has_antiderivative() {
            tables.push(CfEvaluation::tabulate("window", &r.z_grid, |z| model.log_cf_window(&spec.scaled(z)))?);
            for v in [LimitVariant::Claimed, LimitVariant::BoundaryAugmented] {
                tables.push(CfEvaluation::tabulate(format!("limit_{}", v.name()), &r.z_grid, |z| {
                    model.log_cf_limit(&spec.scaled(z), v)
                })?);
            }
        } else {
            log::warn!("kernel has no antiderivative; only the stationary table is available");
        }
        Ok(tables)
    })?;
    if let Some(n) = r.replicates {
        let mc = monte_carlo(&r.sim_config(r.t, n)?, threads)?;
        let samples: Vec<f64> = mc
            .s
            .chunks_exact(mc.anchors)
            .map(|row| row.iter().zip(&r.zs).map(|(s, z)| s * z).sum())
            .collect();
        tables.push(empirical_cf(&samples, &r.z_grid, 3.0)?);
    }
    match format {
        Format::Json => {
            #[derive(Serialize)]
            struct Tables<'a> {
                tables: &'a [CfEvaluation],
            }
            sink.json("cf", &Tables { tables: &tables })
        }
        Format::Csv => {
            let rows: Vec<Vec<String>> = tables
                .iter()
                .flat_map(|t| {
                    t.points.iter().map(move |p| {
                        vec![
                            t.label.clone(),
                            num(p.z),
                            num(p.log_cf.re),
                            num(p.log_cf.im),
                            num(p.cf.re),
                            num(p.cf.im),
                            num(p.error),
                        ]
                    })
                })
                .collect();
            sink.csv(
                "cf",
                &["table", "z", "log_cf_re", "log_cf_im", "cf_re", "cf_im", "error"],
                &rows,
            )
        }
    }
}

fn cov(r: &Resolved, format: Format, sink: &mut Sink) -> Result<(), CliError> {
    let values = r
        .lags
        .iter()
        .map(|t| r.model.covariance(t))
        .collect::<Result<Vec<f64>, _>>()?;
    let integral = r.model.covariance_integral()?;
    match format {
        Format::Json => {
            #[derive(Serialize)]
            struct Row<'a> {
                t: &'a [f64],
                cov: f64,
            }
            #[derive(Serialize)]
            struct Report<'a> {
                rows: Vec<Row<'a>>,
                integral: idma::CovarianceIntegral,
            }
            let rows = r.lags.iter().zip(&values).map(|(t, &cov)| Row { t, cov }).collect();
            sink.json("cov", &Report { rows, integral })
        }
        Format::Csv => {
            let header: Vec<String> = if r.d == 1 {
                vec!["t".into(), "cov".into()]
            } else {
                (1..=r.d).map(|k| format!("t{k}")).chain(["cov".into()]).collect()
            };
            let header: Vec<&str> = header.iter().map(String::as_str).collect();
            let rows: Vec<Vec<String>> = r
                .lags
                .iter()
                .zip(&values)
                .map(|(t, &c)| t.iter().map(|&x| num(x)).chain([num(c)]).collect())
                .collect();
            sink.csv("cov", &header, &rows)?;
            sink.csv(
                "cov_integral",
                &["exact", "quadrature"],
                &[vec![num(integral.exact), num(integral.quadrature)]],
            )
        }
    }
}

fn simulate(r: &Resolved, format: Format, threads: usize, sink: &mut Sink) -> Result<(), CliError> {
    let n = r.replicates.unwrap_or(DEFAULT_REPLICATES);
    let mc = monte_carlo(&r.sim_config(r.t, n)?, threads)?;
    if let Some(e) = mc.max_step_error {
        log::info!("grid fallback used; largest step-error estimate {e:e}");
    }
    match format {
        Format::Json => sink.json("replicates", &mc),
        Format::Csv => {
            let mut rows = Vec::with_capacity(mc.s.len());
            for rep in 0..mc.replicates {
                for j in 0..mc.anchors {
                    let i = rep * mc.anchors + j;
                    rows.push(vec![
                        rep.to_string(),
                        j.to_string(),
                        num(mc.s[i]),
                        opt(mc.y.as_ref().map(|y| y[i])),
                    ]);
                }
            }
            sink.csv("replicates", &["replicate", "l_index", "S_value", "Y_value"], &rows)
        }
    }
}

fn converge(r: &Resolved, format: Format, threads: usize, sink: &mut Sink) -> Result<(), CliError> {
    let base = r.fdd()?;
    let grid = r.t_grid.clone().unwrap_or_else(|| DEFAULT_CONVERGE_GRID.to_vec());
    let report = pool(threads)?.install(|| cf_convergence(&r.model, &base, &grid, &r.z_grid, r.threshold))?;
    for e in &report.entries {
        if let Some(msg) = &e.error {
            log::warn!("T = {}: {msg}", e.t);
        }
    }
    match format {
        Format::Json => sink.json("converge", &report),
        Format::Csv => {
            let rows: Vec<Vec<String>> = report
                .entries
                .iter()
                .map(|e| {
                    vec![
                        num(e.t),
                        opt(e.dist_claimed),
                        opt(e.dist_boundary),
                        opt(e.error_estimate),
                        e.error.clone().unwrap_or_default(),
                    ]
                })
                .collect();
            sink.csv("converge", &["T", "dist_claimed", "dist_boundary", "error_estimate", "error"], &rows)?;
            sink.csv(
                "converge_summary",
                &["winner", "monotone_claimed", "monotone_boundary", "threshold"],
                &[vec![
                    report.winner.name().into(),
                    bool_str(report.monotone_claimed),
                    bool_str(report.monotone_boundary),
                    num(report.threshold),
                ]],
            )
        }
    }
}

fn hyper(r: &Resolved, format: Format, threads: usize, sink: &mut Sink) -> Result<(), CliError> {
    let grid = r.t_grid.clone().unwrap_or_else(|| DEFAULT_HYPER_GRID.to_vec());
    let sim = HyperSimulation {
        replicates: r.replicates.unwrap_or(0),
        seed: r.seed,
        epsilon: r.epsilon,
        threads,
    };
    let report = hyperuniformity(&r.model, &grid, sim)?;
    match format {
        Format::Json => sink.json("hyper", &report),
        Format::Csv => {
            let rows: Vec<Vec<String>> = report
                .rows
                .iter()
                .map(|row| {
                    vec![
                        num(row.t),
                        num(row.var_analytic),
                        opt(row.var_empirical),
                        opt(row.var_empirical_se),
                        num(row.var_control),
                    ]
                })
                .collect();
            sink.csv(
                "hyper",
                &["T", "var_analytic", "var_empirical", "var_empirical_se", "var_control"],
                &rows,
            )?;
            let class = serde_json::to_value(report.classification)?;
            sink.csv(
                "hyper_summary",
                &["control_slope", "control_intercept", "plateau", "empirical_plateau", "classification"],
                &[vec![
                    num(report.control_slope),
                    num(report.control_intercept),
                    bool_str(report.plateau),
                    report.empirical_plateau.map(bool_str).unwrap_or_default(),
                    class.as_str().unwrap_or_default().to_string(),
                ]],
            )
        }
    }
}
