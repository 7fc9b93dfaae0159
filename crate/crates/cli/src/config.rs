//! Run configuration: strict JSON parsing, validation and defaults.

use dkern::domain::make_domain;
use dkern::kernel::{default_order, DEFAULT_ZERO_SET_THRESHOLD};
use dkern::ramadanov::{GridSpec, SequenceSpec};
use dkern::{DomainSpec, ResolutionSpec, WeightSpec};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub type Point = [f64; 2];

pub const DEFAULT_TOL: f64 = 1e-10;
const MAX_ORDER: usize = 5000;
const MAX_N: usize = 8;
const MAX_PARTIAL: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    KernelEval,
    MEval,
    MixedPartial,
    ReproduceCheck,
    OracleCompare,
    Ramadanov,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::KernelEval => "kernel-eval",
            Command::MEval => "m-eval",
            Command::MixedPartial => "mixed-partial",
            Command::ReproduceCheck => "reproduce-check",
            Command::OracleCompare => "oracle-compare",
            Command::Ramadanov => "ramadanov",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum TestFunctionSpec {
    /// `(z - ζ)^m` centred at the configured `zeta`.
    Power(usize),
    /// `Σ_m coeffs[m] (z - center)^m`
    Polynomial { center: Point, coeffs: Vec<Point> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum OracleSpec {
    /// Closed forms on the unit disc with `μ ≡ 1`.
    Disc,
    /// Laurent series on `r < |z| < 1` with `μ ≡ 1`, `n = 1` only.
    Annulus,
    /// Constrained least-norm solve in the span of the truncated basis.
    BruteForce { order: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<DomainSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<WeightSpec>,
    /// Basis truncation order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<ResolutionSpec>,
    /// Path-integral tolerance.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zero_set_threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<Point>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeta: Option<Point>,
    /// `[z, ζ]` pairs, evaluated in order after `z`/`zeta`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairs: Option<Vec<[Point; 2]>>,
    /// Interior vertices of the integration path from `ζ` to `z`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub waypoints: Option<Vec<Point>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub test_function: Option<TestFunctionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sequence: Option<SequenceSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orders: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partials: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

fn invalid(path: &str, reason: impl Into<String>) -> CliError {
    CliError::Config { path: path.to_string(), reason: reason.into() }
}

/// Parses, validates and fills defaults.
pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let raw: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let mut path = e.path().to_string();
        let reason = e.into_inner().to_string();
        if path == "." {
            path.clear();
        }
        // serde reports a missing key against its parent; name the key itself
        if let Some(field) = reason.strip_prefix("missing field `").and_then(|r| r.split('`').next()) {
            path = if path.is_empty() { field.to_string() } else { format!("{path}.{field}") };
        }
        invalid(&path, reason)
    })?;
    raw.effective()
}

fn check_point(path: &str, p: &Point) -> Result<(), CliError> {
    if p.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(invalid(path, "coordinates must be finite"))
    }
}

impl RunConfig {
    /// Validated copy with every default the command uses written out.
    pub fn effective(&self) -> Result<RunConfig, CliError> {
        let mut cfg = self.clone();
        let cmd = cfg.command;
        let is = |allowed: &[Command]| allowed.contains(&cmd);
        let pointwise = [Command::KernelEval, Command::MEval, Command::MixedPartial, Command::OracleCompare];

        let unused = |present: bool, field: &str, allowed: bool| -> Result<(), CliError> {
            if present && !allowed {
                Err(invalid(field, format!("not used by command {}", cmd.name())))
            } else {
                Ok(())
            }
        };
        unused(cfg.domain.is_some(), "domain", cmd != Command::Ramadanov)?;
        unused(cfg.weight.is_some(), "weight", cmd != Command::Ramadanov)?;
        unused(cfg.zero_set_threshold.is_some(), "zero_set_threshold", cmd != Command::Ramadanov)?;
        unused(cfg.n.is_some(), "n", cmd != Command::Ramadanov)?;
        unused(cfg.r.is_some(), "r", cmd == Command::MixedPartial)?;
        unused(cfg.s.is_some(), "s", cmd == Command::MixedPartial)?;
        unused(cfg.z.is_some(), "z", is(&pointwise))?;
        unused(cfg.pairs.is_some(), "pairs", is(&pointwise))?;
        unused(cfg.zeta.is_some(), "zeta", cmd != Command::Ramadanov)?;
        unused(cfg.waypoints.is_some(), "waypoints", is(&[Command::MEval, Command::MixedPartial]))?;
        unused(cfg.test_function.is_some(), "test_function", cmd == Command::ReproduceCheck)?;
        unused(cfg.oracle.is_some(), "oracle", cmd == Command::OracleCompare)?;
        for (present, field) in [
            (cfg.sequence.is_some(), "sequence"),
            (cfg.orders.is_some(), "orders"),
            (cfg.grid.is_some(), "grid"),
            (cfg.partials.is_some(), "partials"),
        ] {
            unused(present, field, cmd == Command::Ramadanov)?;
        }

        let resolution = cfg.resolution.unwrap_or_default();
        if !(2..=4096).contains(&resolution.radial) {
            return Err(invalid("resolution.radial", "must be in 2..=4096"));
        }
        if !(4..=8192).contains(&resolution.angular) {
            return Err(invalid("resolution.angular", "must be in 4..=8192"));
        }
        if resolution.subdivision > 8 {
            return Err(invalid("resolution.subdivision", "must be at most 8"));
        }
        if resolution.boundary_refine > 6 {
            return Err(invalid("resolution.boundary_refine", "must be at most 6"));
        }
        cfg.resolution = Some(resolution);

        let tol = cfg.tol.unwrap_or(DEFAULT_TOL);
        if !(tol.is_finite() && tol > 0.0 && tol < 1.0) {
            return Err(invalid("tol", "must be in (0, 1)"));
        }
        cfg.tol = Some(tol);

        if let Some(order) = cfg.order {
            if !(1..=MAX_ORDER).contains(&order) {
                return Err(invalid("order", format!("must be in 1..={MAX_ORDER}")));
            }
        }
        cfg.format = Some(cfg.format.unwrap_or(Format::Csv));

        if cmd == Command::Ramadanov {
            return cfg.fill_ramadanov();
        }

        let domain_spec = cfg.domain.as_ref().ok_or_else(|| invalid("domain", "required"))?;
        let domain = make_domain(domain_spec).map_err(|e| invalid("domain", e.to_string()))?;
        cfg.weight = Some(cfg.weight.take().unwrap_or(WeightSpec::Constant(1.0)));
        cfg.order = Some(cfg.order.unwrap_or_else(|| default_order(&domain)));
        let threshold = cfg.zero_set_threshold.unwrap_or(DEFAULT_ZERO_SET_THRESHOLD);
        if !(threshold.is_finite() && threshold > 0.0 && threshold <= 1.0) {
            return Err(invalid("zero_set_threshold", "must be in (0, 1]"));
        }
        cfg.zero_set_threshold = Some(threshold);

        let n = cfg.n.unwrap_or(1);
        if !(1..=MAX_N).contains(&n) {
            return Err(invalid("n", format!("must be in 1..={MAX_N}")));
        }
        cfg.n = Some(n);

        if cmd == Command::MixedPartial {
            let r = cfg.r.unwrap_or(0);
            let s = cfg.s.unwrap_or(0);
            if r > MAX_PARTIAL {
                return Err(invalid("r", format!("must be at most {MAX_PARTIAL}")));
            }
            if s > MAX_PARTIAL {
                return Err(invalid("s", format!("must be at most {MAX_PARTIAL}")));
            }
            cfg.r = Some(r);
            cfg.s = Some(s);
        }

        if let Some(z) = &cfg.z {
            check_point("z", z)?;
        }
        if let Some(zeta) = &cfg.zeta {
            check_point("zeta", zeta)?;
        }
        if let Some(pairs) = &cfg.pairs {
            for (i, [z, zeta]) in pairs.iter().enumerate() {
                check_point(&format!("pairs[{i}][0]"), z)?;
                check_point(&format!("pairs[{i}][1]"), zeta)?;
            }
        }
        if let Some(ws) = &cfg.waypoints {
            for (i, w) in ws.iter().enumerate() {
                check_point(&format!("waypoints[{i}]"), w)?;
            }
        }

        if is(&pointwise) {
            match (cfg.z.is_some(), cfg.zeta.is_some()) {
                (true, false) => return Err(invalid("zeta", "required when z is given")),
                (false, true) => return Err(invalid("z", "required when zeta is given")),
                _ => {}
            }
            if cfg.z.is_none() && cfg.pairs.as_ref().is_none_or(|p| p.is_empty()) {
                return Err(invalid("z", "give z and zeta, or a non-empty pairs list"));
            }
        }

        match cmd {
            Command::ReproduceCheck => {
                if cfg.zeta.is_none() {
                    return Err(invalid("zeta", "required"));
                }
                match &cfg.test_function {
                    None => return Err(invalid("test_function", "required")),
                    Some(TestFunctionSpec::Polynomial { center, coeffs }) => {
                        check_point("test_function.polynomial.center", center)?;
                        if coeffs.is_empty() {
                            return Err(invalid("test_function.polynomial.coeffs", "must not be empty"));
                        }
                        for (i, a) in coeffs.iter().enumerate() {
                            check_point(&format!("test_function.polynomial.coeffs[{i}]"), a)?;
                        }
                    }
                    Some(TestFunctionSpec::Power(_)) => {}
                }
            }
            Command::OracleCompare => match &cfg.oracle {
                None => return Err(invalid("oracle", "required")),
                Some(OracleSpec::BruteForce { order }) if !(1..=MAX_ORDER).contains(order) => {
                    return Err(invalid("oracle.brute_force.order", format!("must be in 1..={MAX_ORDER}")));
                }
                Some(OracleSpec::Annulus) if n != 1 => {
                    return Err(invalid("n", "the annulus oracle covers n = 1 only"));
                }
                _ => {}
            },
            _ => {}
        }
        Ok(cfg)
    }

    fn fill_ramadanov(mut self) -> Result<RunConfig, CliError> {
        if self.sequence.is_none() {
            return Err(invalid("sequence", "required"));
        }
        let orders = self.orders.take().unwrap_or_else(|| vec![1]);
        if orders.is_empty() {
            return Err(invalid("orders", "must not be empty"));
        }
        for (i, n) in orders.iter().enumerate() {
            if !(1..=MAX_N).contains(n) {
                return Err(invalid(&format!("orders[{i}]"), format!("must be in 1..={MAX_N}")));
            }
        }
        self.orders = Some(orders);
        let grid = self.grid.unwrap_or_default();
        if !(grid.radius.is_finite() && grid.radius > 0.0) {
            return Err(invalid("grid.radius", "must be positive"));
        }
        if !(1..=64).contains(&grid.points_per_axis) {
            return Err(invalid("grid.points_per_axis", "must be in 1..=64"));
        }
        if let Some(r) = grid.inner_radius {
            if !(r.is_finite() && r >= 0.0 && r <= grid.radius) {
                return Err(invalid("grid.inner_radius", "must be in [0, grid.radius]"));
            }
        }
        self.grid = Some(grid);
        self.partials = Some(self.partials.unwrap_or(true));
        Ok(self)
    }

    /// `[z, ζ]` pairs in evaluation order.
    pub fn point_pairs(&self) -> Vec<[Point; 2]> {
        let mut out = Vec::new();
        if let (Some(z), Some(zeta)) = (self.z, self.zeta) {
            out.push([z, zeta]);
        }
        if let Some(p) = &self.pairs {
            out.extend(p.iter().copied());
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fills_defaults_for_m_eval() {
        let cfg = parse_config(
            r#"{"command":"m-eval","domain":{"disc":{"radius":1}},"weight":{"constant":1},"n":1,"z":[0.5,0],"zeta":[0,0]}"#,
        )
        .unwrap();
        assert_eq!(cfg.order, Some(40));
        assert_eq!(cfg.tol, Some(1e-10));
        let res = cfg.resolution.unwrap();
        assert_eq!((res.radial, res.angular), (80, 160));
        assert_eq!(cfg.format, Some(Format::Csv));
    }

    #[test]
    fn missing_command_is_rejected() {
        let err = parse_config(r#"{"domain":{"disc":{"radius":1}}}"#).unwrap_err();
        assert_eq!(err.code(), "CONFIG_INVALID");
        assert!(matches!(err, CliError::Config { ref path, .. } if path == "command"), "{err}");
    }

    #[test]
    fn unknown_field_reports_its_path() {
        let err = parse_config(r#"{"command":"m-eval","resolution":{"radial":10,"bogus":1}}"#).unwrap_err();
        match err {
            CliError::Config { path, .. } => assert_eq!(path, "resolution.bogus"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn effective_config_is_a_fixed_point() {
        let cfg = parse_config(
            r#"{"command":"ramadanov","sequence":{"growing_discs":{"radii":[0.5,0.75,0.875],"limit":1}}}"#,
        )
        .unwrap();
        assert_eq!(cfg.orders, Some(vec![1]));
        assert_eq!(cfg.effective().unwrap(), cfg);
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(parse_config(&text).unwrap(), cfg);
    }

    #[test]
    fn fields_foreign_to_the_command_are_rejected() {
        let err = parse_config(
            r#"{"command":"kernel-eval","domain":{"disc":{"radius":1}},"z":[0,0],"zeta":[0,0],"r":1}"#,
        )
        .unwrap_err();
        assert!(matches!(err, CliError::Config { ref path, .. } if path == "r"));
    }
}
