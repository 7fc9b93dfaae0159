//! Command dispatch.

use dkern::basis::{MAX_JITTER, RCOND_FLOOR};
use dkern::domain::make_domain;
use dkern::kernel::{KernelOptions, DEFAULT_ZERO_SET_THRESHOLD, NEAR_ZERO_SET_RATIO, VANISHING_TOL};
use dkern::oracle::{annulus_reduced_kernel, annulus_reduced_m1, brute_force_mn, scaled_disc_kn, scaled_disc_mn};
use dkern::path::Path;
use dkern::ramadanov::{run_exhaustion, ExhaustionSpec};
use dkern::{Domain, KernelEvaluator, Polynomial, Weight, WeightSpec};
use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::json;

use crate::config::{Command, OracleSpec, Point, RunConfig, TestFunctionSpec};
use crate::error::CliError;
use crate::output::{Cell, Column, Report};

type Row = Vec<Cell>;

fn c(p: Point) -> Complex64 {
    Complex64::new(p[0], p[1])
}

fn tolerances(cfg: &RunConfig) -> serde_json::Value {
    json!({
        "path_tol": cfg.tol,
        "zero_set_threshold": cfg.zero_set_threshold.unwrap_or(DEFAULT_ZERO_SET_THRESHOLD),
        "near_zero_set_ratio": NEAR_ZERO_SET_RATIO,
        "vanishing_tol": VANISHING_TOL,
        "rcond_floor": RCOND_FLOOR,
        "max_jitter": MAX_JITTER,
    })
}

fn evaluator(cfg: &RunConfig) -> Result<KernelEvaluator, CliError> {
    let spec = cfg.domain.as_ref().expect("validated config has a domain");
    let domain = make_domain(spec)?;
    let weight = Weight::from_spec(cfg.weight.as_ref().expect("validated config has a weight"))?;
    let options = KernelOptions {
        order: cfg.order.expect("validated config has an order"),
        resolution: cfg.resolution.unwrap_or_default(),
        path_tol: cfg.tol.expect("validated config has a tolerance"),
        zero_set_threshold: cfg.zero_set_threshold.unwrap_or(DEFAULT_ZERO_SET_THRESHOLD),
    };
    Ok(KernelEvaluator::build(&domain, &weight, &options)?)
}

fn explicit_path(ke: &KernelEvaluator, cfg: &RunConfig, z: Complex64, zeta: Complex64) -> Result<Option<Path>, CliError> {
    match &cfg.waypoints {
        None => Ok(None),
        Some(ws) => {
            let mut vertices = vec![zeta];
            vertices.extend(ws.iter().map(|&w| c(w)));
            vertices.push(z);
            Ok(Some(Path::new(ke.domain(), vertices)?))
        }
    }
}

/// Evaluates `f` on every pair in parallel, keeping the configured order.
fn per_pair<F>(cfg: &RunConfig, f: F) -> Result<Vec<Row>, CliError>
where
    F: Fn(Complex64, Complex64) -> Result<Vec<Row>, CliError> + Sync,
{
    let rows: Vec<Vec<Row>> = cfg.point_pairs().par_iter().map(|&[z, zeta]| f(c(z), c(zeta))).collect::<Result<_, _>>()?;
    Ok(rows.into_iter().flatten().collect())
}

pub fn run(cfg: &RunConfig) -> Result<Report, CliError> {
    let (columns, rows, flags) = match cfg.command {
        Command::KernelEval => kernel_eval(cfg)?,
        Command::MEval => m_eval(cfg)?,
        Command::MixedPartial => mixed_partial(cfg)?,
        Command::ReproduceCheck => reproduce(cfg)?,
        Command::OracleCompare => oracle_compare(cfg)?,
        Command::Ramadanov => ramadanov(cfg)?,
    };
    Ok(Report { config: cfg.clone(), tolerances: tolerances(cfg), flags, columns, rows })
}

type Table = (Vec<Column>, Vec<Row>, Vec<String>);

fn kernel_eval(cfg: &RunConfig) -> Result<Table, CliError> {
    let ke = evaluator(cfg)?;
    let n = cfg.n.unwrap_or(1);
    let rows = per_pair(cfg, |z, zeta| {
        let v = ke.higher_order_kernel(z, zeta, n)?;
        Ok(vec![vec![Cell::Complex(z), Cell::Complex(zeta), Cell::Int(n as i64), Cell::Complex(v)]])
    })?;
    let cols = vec![Column::complex("z"), Column::complex("zeta"), Column::real("n"), Column::complex("value")];
    Ok((cols, rows, vec![]))
}

fn m_eval(cfg: &RunConfig) -> Result<Table, CliError> {
    let ke = evaluator(cfg)?;
    let n = cfg.n.unwrap_or(1);
    let rows = per_pair(cfg, |z, zeta| {
        let path = explicit_path(&ke, cfg, z, zeta)?;
        let m = ke.kernel_function_m(z, zeta, n, path.as_ref())?;
        Ok(vec![vec![
            Cell::Complex(z),
            Cell::Complex(zeta),
            Cell::Int(n as i64),
            Cell::Complex(m.value),
            Cell::Real(m.error_estimate),
            Cell::Int(m.path.vertices().len() as i64),
        ]])
    })?;
    let cols = vec![
        Column::complex("z"),
        Column::complex("zeta"),
        Column::real("n"),
        Column::complex("value"),
        Column::real("error_estimate"),
        Column::real("path_vertices"),
    ];
    Ok((cols, rows, vec![]))
}

fn mixed_partial(cfg: &RunConfig) -> Result<Table, CliError> {
    let ke = evaluator(cfg)?;
    let n = cfg.n.unwrap_or(1);
    let (r, s) = (cfg.r.unwrap_or(0), cfg.s.unwrap_or(0));
    let rows = per_pair(cfg, |z, zeta| {
        let path = explicit_path(&ke, cfg, z, zeta)?;
        let d = ke.m_mixed_partial(z, zeta, n, r, s, path.as_ref())?;
        Ok(vec![vec![
            Cell::Complex(z),
            Cell::Complex(zeta),
            Cell::Int(n as i64),
            Cell::Int(r as i64),
            Cell::Int(s as i64),
            Cell::Complex(d.value),
            Cell::Complex(d.integral),
            Cell::Complex(d.diagonal_term),
            Cell::Real(d.error_estimate),
        ]])
    })?;
    let cols = vec![
        Column::complex("z"),
        Column::complex("zeta"),
        Column::real("n"),
        Column::real("r"),
        Column::real("s"),
        Column::complex("value"),
        Column::complex("integral"),
        Column::complex("diagonal_term"),
        Column::real("error_estimate"),
    ];
    Ok((cols, rows, vec![]))
}

fn reproduce(cfg: &RunConfig) -> Result<Table, CliError> {
    let ke = evaluator(cfg)?;
    let n = cfg.n.unwrap_or(1);
    let zeta = c(cfg.zeta.expect("validated config has zeta"));
    let f = match cfg.test_function.as_ref().expect("validated config has a test function") {
        TestFunctionSpec::Power(m) => Polynomial::power(zeta, *m),
        TestFunctionSpec::Polynomial { center, coeffs } => Polynomial::new(c(*center), coeffs.iter().map(|&a| c(a)).collect()),
    };
    let residual = ke.reproduce_check(&f, zeta, n)?;
    let cols = vec![Column::complex("zeta"), Column::real("n"), Column::real("degree"), Column::real("residual")];
    let rows = vec![vec![Cell::Complex(zeta), Cell::Int(n as i64), Cell::Int(f.degree() as i64), Cell::Real(residual)]];
    Ok((cols, rows, vec![]))
}

fn compare_row(z: Complex64, zeta: Complex64, n: usize, quantity: &str, numeric: Complex64, oracle: Complex64, bound: f64) -> Row {
    vec![
        Cell::Complex(z),
        Cell::Complex(zeta),
        Cell::Int(n as i64),
        Cell::Text(quantity.to_string()),
        Cell::Complex(numeric),
        Cell::Complex(oracle),
        Cell::Real((numeric - oracle).norm()),
        Cell::Real(bound),
    ]
}

fn require_unit_weight(cfg: &RunConfig, oracle: &str) -> Result<(), CliError> {
    if cfg.weight != Some(WeightSpec::Constant(1.0)) {
        return Err(CliError::Config {
            path: "weight".into(),
            reason: format!("the {oracle} oracle needs weight {{\"constant\": 1}}"),
        });
    }
    Ok(())
}

fn oracle_compare(cfg: &RunConfig) -> Result<Table, CliError> {
    let ke = evaluator(cfg)?;
    let n = cfg.n.unwrap_or(1);
    let not_centered = |what: &str| CliError::Config {
        path: "domain".into(),
        reason: format!("the {what} oracle needs a domain centred at the origin"),
    };
    let rows = match cfg.oracle.as_ref().expect("validated config has an oracle") {
        OracleSpec::Disc => {
            require_unit_weight(cfg, "disc")?;
            let radius = match ke.domain() {
                Domain::Disc { center, radius } if center.norm() == 0.0 => *radius,
                Domain::Disc { .. } => return Err(not_centered("disc")),
                _ => return Err(CliError::Config { path: "domain".into(), reason: "the disc oracle needs a disc".into() }),
            };
            per_pair(cfg, |z, zeta| {
                let k = ke.higher_order_kernel(z, zeta, n)?;
                let m = ke.kernel_function_m(z, zeta, n, None)?.value;
                Ok(vec![
                    compare_row(z, zeta, n, "K", k, scaled_disc_kn(radius, z, zeta, n)?, 0.0),
                    compare_row(z, zeta, n, "M", m, scaled_disc_mn(radius, z, zeta, n)?, 0.0),
                ])
            })?
        }
        OracleSpec::Annulus => {
            require_unit_weight(cfg, "annulus")?;
            let inner = match ke.domain() {
                Domain::Annulus { center, inner, outer } if center.norm() == 0.0 && *outer == 1.0 => *inner,
                _ => {
                    return Err(CliError::Config {
                        path: "domain".into(),
                        reason: "the annulus oracle needs an annulus centred at the origin with outer radius 1".into(),
                    })
                }
            };
            per_pair(cfg, |z, zeta| {
                let k = ke.higher_order_kernel(z, zeta, 1)?;
                let m = ke.kernel_function_m(z, zeta, 1, None)?.value;
                let ks = annulus_reduced_kernel(inner, z, zeta)?;
                let ms = annulus_reduced_m1(inner, z, zeta)?;
                Ok(vec![
                    compare_row(z, zeta, 1, "K", k, ks.value, ks.tail_bound),
                    compare_row(z, zeta, 1, "M", m, ms.value, ms.tail_bound),
                ])
            })?
        }
        OracleSpec::BruteForce { order } => {
            let res = cfg.resolution.unwrap_or_default();
            per_pair(cfg, |z, zeta| {
                let bf = brute_force_mn(ke.domain(), ke.weight(), zeta, n, *order, &res)?;
                let k = ke.higher_order_kernel(z, zeta, n)?;
                let m = ke.kernel_function_m(z, zeta, n, None)?.value;
                Ok(vec![
                    compare_row(z, zeta, n, "K", k, bf.derivative(z), 0.0),
                    compare_row(z, zeta, n, "M", m, bf.value(z), 0.0),
                ])
            })?
        }
    };
    let cols = vec![
        Column::complex("z"),
        Column::complex("zeta"),
        Column::real("n"),
        Column::real("quantity"),
        Column::complex("numeric"),
        Column::complex("oracle"),
        Column::real("abs_diff"),
        Column::real("oracle_bound"),
    ];
    Ok((cols, rows, vec![]))
}

fn ramadanov(cfg: &RunConfig) -> Result<Table, CliError> {
    let spec = ExhaustionSpec {
        sequence: cfg.sequence.clone().expect("validated config has a sequence"),
        orders: cfg.orders.clone().unwrap_or_else(|| vec![1]),
        grid: cfg.grid.unwrap_or_default(),
        truncation_order: cfg.order,
        resolution: cfg.resolution.unwrap_or_default(),
        path_tol: cfg.tol.expect("validated config has a tolerance"),
        partials: cfg.partials.unwrap_or(true),
    };
    let table = run_exhaustion(&spec)?;
    let opt = |v: Option<f64>| v.map(Cell::Real).unwrap_or(Cell::Null);
    let rows = table
        .rows
        .iter()
        .map(|r| {
            vec![
                Cell::Int(r.j as i64),
                Cell::Real(r.domain_param),
                Cell::Int(r.n as i64),
                Cell::Real(r.sup_dev_m),
                opt(r.sup_dev_dzeta),
                opt(r.sup_dev_dzetabar),
                Cell::Complex(r.argmax.0),
                Cell::Complex(r.argmax.1),
                Cell::Real(r.sup_dev_k),
                opt(r.closed_form_sup_dev_m),
                Cell::Int(r.valid_pairs as i64),
                Cell::Int(r.truncation_order as i64),
            ]
        })
        .collect();
    let cols = vec![
        Column::real("j"),
        Column::real("domain_param"),
        Column::real("n"),
        Column::real("sup_dev_M"),
        Column::real("sup_dev_dzeta"),
        Column::real("sup_dev_dzetabar"),
        Column::complex("argmax_z"),
        Column::complex("argmax_zeta"),
        Column::real("sup_dev_K"),
        Column::real("closed_form_sup_dev_M"),
        Column::real("valid_pairs"),
        Column::real("truncation_order"),
    ];
    let flags = if table.convergence_hypothesis_fail { vec!["CONVERGENCE_HYPOTHESIS_FAIL".to_string()] } else { vec![] };
    Ok((cols, rows, flags))
}
