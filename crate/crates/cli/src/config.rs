//! Strict line-oriented experiment configuration: `section.key = value`.
//!
//! Vectors are comma lists, matrices semicolon-separated rows. Unknown keys,
//! missing keys and invariant violations are all hard errors carrying the
//! offending line where one exists. Defaults are applied only where the
//! format defines one (θ-grid shape, branch choice, refinement count).

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use pathint_core::mgh::MgOperator;
use pathint_core::mppi::{CostWeighting, PiConfig, ThetaGrid};
use pathint_core::sde::TimeGrid;
use pathint_core::strategies::{Branch, Ex3Params, ParetoParams, WalrasianQuantumParams};

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "config error at line {line}: {}", self.message),
            None => write!(f, "config error: {}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

fn err(line: Option<usize>, message: impl Into<String>) -> ConfigError {
    ConfigError {
        line,
        message: message.into(),
    }
}

/// Which runner a config addresses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    WalrasianPath,
    WalrasianMc,
    Ex3Compare,
    Ex3Mc,
    ParetoPiCompare,
    FocScan,
    MghDefect,
}

impl ExperimentKind {
    pub fn id(&self) -> &'static str {
        match self {
            ExperimentKind::WalrasianPath => "walrasian_path",
            ExperimentKind::WalrasianMc => "walrasian_mc",
            ExperimentKind::Ex3Compare => "ex3_compare",
            ExperimentKind::Ex3Mc => "ex3_mc",
            ExperimentKind::ParetoPiCompare => "pareto_pi_compare",
            ExperimentKind::FocScan => "foc_scan",
            ExperimentKind::MghDefect => "mgh_defect",
        }
    }

    fn parse(value: &str, line: usize) -> Result<Self, ConfigError> {
        match value {
            "walrasian_path" => Ok(ExperimentKind::WalrasianPath),
            "walrasian_mc" => Ok(ExperimentKind::WalrasianMc),
            "ex3_compare" => Ok(ExperimentKind::Ex3Compare),
            "ex3_mc" => Ok(ExperimentKind::Ex3Mc),
            "pareto_pi_compare" => Ok(ExperimentKind::ParetoPiCompare),
            "foc_scan" => Ok(ExperimentKind::FocScan),
            "mgh_defect" => Ok(ExperimentKind::MghDefect),
            other => Err(err(Some(line), format!("unknown experiment id `{other}`"))),
        }
    }
}

/// Parsed per-experiment payload.
#[derive(Debug)]
pub enum Payload {
    Walrasian(WalrasianConfig),
    Ex3(Ex3Config),
    Pareto(ParetoConfig),
    FocScan(FocScanConfig),
    MghDefect(MghDefectConfig),
}

#[derive(Debug)]
pub struct WalrasianConfig {
    pub params: WalrasianQuantumParams,
    pub sigma0: f64,
    pub x0: f64,
    pub grid: TimeGrid,
    pub branch: Branch,
}

#[derive(Debug)]
pub struct Ex3Config {
    pub params: Ex3Params,
    pub x0: f64,
    pub grid: TimeGrid,
}

#[derive(Debug)]
pub struct ParetoConfig {
    pub params: ParetoParams,
    pub x0: Vec<f64>,
    pub pi: PiConfig,
    pub t_end: f64,
}

#[derive(Debug)]
pub struct FocScanConfig {
    pub params: WalrasianQuantumParams,
    pub sigma0: f64,
    pub s: f64,
    pub x: f64,
    pub u_min: f64,
    pub u_max: f64,
    pub points: usize,
}

#[derive(Debug)]
pub struct MghDefectConfig {
    pub op: MgOperator,
    pub a_min: f64,
    pub a_max: f64,
    pub b_min: f64,
    pub b_max: f64,
    pub nodes: usize,
    pub refinements: usize,
}

#[derive(Debug)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub seed: u64,
    pub n_paths: Option<usize>,
    pub payload: Payload,
    /// FNV-1a hash of the raw config bytes, recorded in the run manifest.
    pub source_hash: String,
}

/// FNV-1a 64-bit, hex-encoded.
pub fn fnv1a_hex(bytes: &[u8]) -> String {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        hash ^= *b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    format!("{hash:016x}")
}

struct RawConfig {
    entries: BTreeMap<String, (String, usize)>,
}

impl RawConfig {
    fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries = BTreeMap::new();
        for (idx, raw_line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw_line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(err(
                    Some(line_no),
                    format!("expected `key = value`, got `{line}`"),
                ));
            };
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if key.is_empty() {
                return Err(err(Some(line_no), "empty key"));
            }
            if entries.insert(key.clone(), (value, line_no)).is_some() {
                return Err(err(Some(line_no), format!("duplicate key `{key}`")));
            }
        }
        Ok(RawConfig { entries })
    }

    fn take(&mut self, key: &str) -> Result<(String, usize), ConfigError> {
        self.entries
            .remove(key)
            .ok_or_else(|| err(None, format!("missing required key `{key}`")))
    }

    fn take_optional(&mut self, key: &str) -> Option<(String, usize)> {
        self.entries.remove(key)
    }

    fn take_f64(&mut self, key: &str) -> Result<(f64, usize), ConfigError> {
        let (value, line) = self.take(key)?;
        let parsed = value.parse::<f64>().map_err(|_| {
            err(
                Some(line),
                format!("`{key}` must be a number, got `{value}`"),
            )
        })?;
        Ok((parsed, line))
    }

    fn take_usize(&mut self, key: &str) -> Result<(usize, usize), ConfigError> {
        let (value, line) = self.take(key)?;
        let parsed = value.parse::<usize>().map_err(|_| {
            err(
                Some(line),
                format!("`{key}` must be a count, got `{value}`"),
            )
        })?;
        Ok((parsed, line))
    }

    fn take_optional_f64(&mut self, key: &str) -> Result<Option<(f64, usize)>, ConfigError> {
        match self.take_optional(key) {
            None => Ok(None),
            Some((value, line)) => {
                let parsed = value.parse::<f64>().map_err(|_| {
                    err(
                        Some(line),
                        format!("`{key}` must be a number, got `{value}`"),
                    )
                })?;
                Ok(Some((parsed, line)))
            }
        }
    }

    fn take_vector(&mut self, key: &str) -> Result<(Vec<f64>, usize), ConfigError> {
        let (value, line) = self.take(key)?;
        let vector =
            parse_vector(&value).map_err(|detail| err(Some(line), format!("`{key}`: {detail}")))?;
        Ok((vector, line))
    }

    fn take_matrix(&mut self, key: &str) -> Result<(Vec<Vec<f64>>, usize), ConfigError> {
        let (value, line) = self.take(key)?;
        let mut rows = Vec::new();
        for row in value.split(';') {
            rows.push(
                parse_vector(row)
                    .map_err(|detail| err(Some(line), format!("`{key}`: {detail}")))?,
            );
        }
        Ok((rows, line))
    }

    fn finish(self) -> Result<(), ConfigError> {
        if let Some((key, (_, line))) = self.entries.into_iter().next() {
            return Err(err(Some(line), format!("unknown key `{key}`")));
        }
        Ok(())
    }
}

fn parse_vector(text: &str) -> Result<Vec<f64>, String> {
    let mut out = Vec::new();
    for part in text.split(',') {
        let part = part.trim();
        if part.is_empty() {
            return Err("empty vector entry".into());
        }
        out.push(
            part.parse::<f64>()
                .map_err(|_| format!("`{part}` is not a number"))?,
        );
    }
    Ok(out)
}

fn time_grid(raw: &mut RawConfig) -> Result<TimeGrid, ConfigError> {
    let (t, t_line) = raw.take_f64("grid.t")?;
    let (dt, dt_line) = raw.take_f64("grid.dt")?;
    if !(dt > 0.0) {
        return Err(err(Some(dt_line), "dt must be positive"));
    }
    TimeGrid::from_horizon(t, dt).map_err(|e| err(Some(t_line), e.to_string()))
}

fn positive(value: (f64, usize), key: &str) -> Result<f64, ConfigError> {
    if !(value.0 > 0.0) {
        return Err(err(Some(value.1), format!("`{key}` must be positive")));
    }
    Ok(value.0)
}

fn walrasian_params(raw: &mut RawConfig) -> Result<(WalrasianQuantumParams, f64), ConfigError> {
    let p = positive(raw.take_f64("model.p")?, "model.p")?;
    let c = positive(raw.take_f64("model.c")?, "model.c")?;
    let (zeta, zeta_line) = raw.take_f64("model.zeta")?;
    if !(zeta > 0.0 && zeta <= 1.0) {
        return Err(err(Some(zeta_line), "`model.zeta` must lie in (0, 1]"));
    }
    let a = positive(raw.take_f64("model.a")?, "model.a")?;
    let (lambda_star, lambda_line) = raw.take_f64("model.lambda_star")?;
    if lambda_star < 0.0 {
        return Err(err(
            Some(lambda_line),
            "`model.lambda_star` must be nonnegative",
        ));
    }
    let sigma0 = positive(raw.take_f64("model.sigma0")?, "model.sigma0")?;
    Ok((
        WalrasianQuantumParams {
            p,
            c,
            zeta,
            a,
            lambda_star,
        },
        sigma0,
    ))
}

/// Parses a config file and checks every invariant the types demand.
pub fn parse_config(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    let bytes = std::fs::read(path)
        .map_err(|e| err(None, format!("cannot read {}: {e}", path.display())))?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| err(None, "config is not valid UTF-8".to_string()))?;
    let mut config = parse_config_str(&text)?;
    config.source_hash = fnv1a_hex(&bytes);
    Ok(config)
}

pub fn parse_config_str(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let mut raw = RawConfig::parse(text)?;
    let (experiment_value, experiment_line) = raw.take("experiment")?;
    let experiment = ExperimentKind::parse(&experiment_value, experiment_line)?;

    let (seed_value, seed_line) = raw.take("run.seed")?;
    let seed = seed_value.parse::<u64>().map_err(|_| {
        err(
            Some(seed_line),
            format!("`run.seed` must be a u64, got `{seed_value}`"),
        )
    })?;
    let n_paths = match raw.take_optional("run.n_paths") {
        None => None,
        Some((value, line)) => Some(value.parse::<usize>().map_err(|_| {
            err(
                Some(line),
                format!("`run.n_paths` must be a count, got `{value}`"),
            )
        })?),
    };

    let payload = match experiment {
        ExperimentKind::WalrasianPath | ExperimentKind::WalrasianMc => {
            let (params, sigma0) = walrasian_params(&mut raw)?;
            let x0 = positive(raw.take_f64("model.x0")?, "model.x0")?;
            let grid = time_grid(&mut raw)?;
            let branch = match raw.take_optional("model.branch") {
                None => Branch::Minus,
                Some((value, line)) => match value.as_str() {
                    "minus" => Branch::Minus,
                    "plus" => Branch::Plus,
                    other => {
                        return Err(err(
                            Some(line),
                            format!("`model.branch` must be `minus` or `plus`, got `{other}`"),
                        ))
                    }
                },
            };
            Payload::Walrasian(WalrasianConfig {
                params,
                sigma0,
                x0,
                grid,
                branch,
            })
        }
        ExperimentKind::Ex3Compare | ExperimentKind::Ex3Mc => {
            let p = positive(raw.take_f64("model.p")?, "model.p")?;
            let b = positive(raw.take_f64("model.b")?, "model.b")?;
            let c = positive(raw.take_f64("model.c")?, "model.c")?;
            let (zeta, zeta_line) = raw.take_f64("model.zeta")?;
            if !(zeta > 0.0 && zeta <= 1.0) {
                return Err(err(Some(zeta_line), "`model.zeta` must lie in (0, 1]"));
            }
            let (lambda_star, lambda_line) = raw.take_f64("model.lambda_star")?;
            if lambda_star < 0.0 {
                return Err(err(
                    Some(lambda_line),
                    "`model.lambda_star` must be nonnegative",
                ));
            }
            let x0 = positive(raw.take_f64("model.x0")?, "model.x0")?;
            let grid = time_grid(&mut raw)?;
            Payload::Ex3(Ex3Config {
                params: Ex3Params {
                    p,
                    b,
                    c,
                    zeta,
                    lambda_star,
                },
                x0,
                grid,
            })
        }
        ExperimentKind::ParetoPiCompare => {
            let (k, k_line) = raw.take_usize("model.k")?;
            if k < 2 {
                return Err(err(Some(k_line), "`model.k` must be at least 2"));
            }
            let (alpha, alpha_line) = raw.take_vector("model.alpha")?;
            let alpha_sum: f64 = alpha.iter().sum();
            if (alpha_sum - 1.0).abs() > 1e-12 {
                return Err(err(
                    Some(alpha_line),
                    format!("`model.alpha` must sum to 1, got {alpha_sum}"),
                ));
            }
            let p = positive(raw.take_f64("model.p")?, "model.p")?;
            let c = positive(raw.take_f64("model.c")?, "model.c")?;
            let (omega1, _) = raw.take_f64("model.omega1")?;
            let (omega2, _) = raw.take_f64("model.omega2")?;
            let (zeta, zeta_line) = raw.take_f64("model.zeta")?;
            if !(zeta > 0.0 && zeta <= 1.0) {
                return Err(err(Some(zeta_line), "`model.zeta` must lie in (0, 1]"));
            }
            let (lambda_star, _) = raw.take_f64("model.lambda_star")?;
            let sigma0 = positive(raw.take_f64("model.sigma0")?, "model.sigma0")?;
            let (matrix_rows, matrix_line) = raw.take_matrix("model.a_matrix")?;
            let mut a_matrix = Vec::with_capacity(k * k);
            if matrix_rows.len() != k {
                return Err(err(
                    Some(matrix_line),
                    format!("`model.a_matrix` needs {k} rows"),
                ));
            }
            for row in &matrix_rows {
                if row.len() != k {
                    return Err(err(
                        Some(matrix_line),
                        format!("`model.a_matrix` rows need {k} entries"),
                    ));
                }
                a_matrix.extend_from_slice(row);
            }
            let (x0, x0_line) = raw.take_vector("model.x0")?;
            if x0.len() != k {
                return Err(err(Some(x0_line), format!("`model.x0` needs {k} entries")));
            }
            let params = ParetoParams {
                k,
                alpha,
                p,
                c,
                omega1,
                omega2,
                zeta,
                lambda_star,
                a_matrix,
                sigma0,
            };
            params
                .validate()
                .map_err(|e| err(Some(matrix_line), e.to_string()))?;

            let (rollouts, m_line) = raw.take_usize("pi.m")?;
            if rollouts == 0 {
                return Err(err(Some(m_line), "`pi.m` must be at least 1"));
            }
            let (horizon, h_line) = raw.take_usize("pi.h")?;
            if horizon == 0 {
                return Err(err(Some(h_line), "`pi.h` must be at least 1"));
            }
            let (gamma, _) = raw.take_f64("pi.gamma")?;
            let (kappa_u, _) = raw.take_f64("pi.kappa_u")?;
            let (u_min, _) = raw.take_f64("pi.u_min")?;
            let (u_max, u_max_line) = raw.take_f64("pi.u_max")?;
            if u_min > u_max {
                return Err(err(
                    Some(u_max_line),
                    "`pi.u_min` must not exceed `pi.u_max`",
                ));
            }
            let theta_count = match raw.take_optional("pi.theta_count") {
                None => 50,
                Some((value, line)) => value.parse::<usize>().map_err(|_| {
                    err(
                        Some(line),
                        format!("`pi.theta_count` must be a count, got `{value}`"),
                    )
                })?,
            };
            let theta_log10_min = raw
                .take_optional_f64("pi.theta_log10_min")?
                .map(|v| v.0)
                .unwrap_or(-2.0);
            let theta_log10_max = raw
                .take_optional_f64("pi.theta_log10_max")?
                .map(|v| v.0)
                .unwrap_or(2.0);
            if theta_count == 0 || theta_log10_min > theta_log10_max {
                return Err(err(None, "theta grid must be nonempty and ordered"));
            }

            let grid = time_grid(&mut raw)?;
            let pi = PiConfig {
                rollouts,
                horizon,
                gamma,
                kappa_u,
                u_min,
                u_max,
                theta: ThetaGrid {
                    count: theta_count,
                    log10_min: theta_log10_min,
                    log10_max: theta_log10_max,
                },
                dt: grid.dt(),
                weighting: CostWeighting::HighCost,
            };
            Payload::Pareto(ParetoConfig {
                params,
                x0,
                pi,
                t_end: grid.t_end(),
            })
        }
        ExperimentKind::FocScan => {
            let (params, sigma0) = walrasian_params(&mut raw)?;
            let (s, _) = raw.take_f64("scan.s")?;
            let x = positive(raw.take_f64("scan.x")?, "scan.x")?;
            let (u_min, _) = raw.take_f64("scan.u_min")?;
            let (u_max, u_line) = raw.take_f64("scan.u_max")?;
            if u_min >= u_max {
                return Err(err(Some(u_line), "`scan.u_min` must be below `scan.u_max`"));
            }
            let (points, points_line) = raw.take_usize("scan.points")?;
            if points < 2 {
                return Err(err(Some(points_line), "`scan.points` must be at least 2"));
            }
            Payload::FocScan(FocScanConfig {
                params,
                sigma0,
                s,
                x,
                u_min,
                u_max,
                points,
            })
        }
        ExperimentKind::MghDefect => {
            let (r, _) = raw.take_f64("mg.r")?;
            let (mu2, _) = raw.take_f64("mg.mu2")?;
            let (beta, _) = raw.take_f64("mg.beta")?;
            let (sigma2, _) = raw.take_f64("mg.sigma2")?;
            let (gamma, _) = raw.take_f64("mg.gamma")?;
            let (alpha, _) = raw.take_f64("mg.alpha")?;
            let (a_min, _) = raw.take_f64("grid2.a_min")?;
            let (a_max, a_line) = raw.take_f64("grid2.a_max")?;
            if a_min >= a_max {
                return Err(err(
                    Some(a_line),
                    "`grid2.a_min` must be below `grid2.a_max`",
                ));
            }
            let (b_min, _) = raw.take_f64("grid2.b_min")?;
            let (b_max, b_line) = raw.take_f64("grid2.b_max")?;
            if b_min >= b_max {
                return Err(err(
                    Some(b_line),
                    "`grid2.b_min` must be below `grid2.b_max`",
                ));
            }
            let (nodes, nodes_line) = raw.take_usize("grid2.n")?;
            if nodes < 3 {
                return Err(err(Some(nodes_line), "`grid2.n` must be at least 3"));
            }
            let refinements = match raw.take_optional("grid2.refinements") {
                None => 3,
                Some((value, line)) => {
                    let n = value.parse::<usize>().map_err(|_| {
                        err(
                            Some(line),
                            format!("`grid2.refinements` must be a count, got `{value}`"),
                        )
                    })?;
                    if n == 0 {
                        return Err(err(Some(line), "`grid2.refinements` must be at least 1"));
                    }
                    n
                }
            };
            Payload::MghDefect(MghDefectConfig {
                op: MgOperator {
                    r,
                    mu2,
                    beta,
                    sigma2,
                    gamma,
                    alpha,
                },
                a_min,
                a_max,
                b_min,
                b_max,
                nodes,
                refinements,
            })
        }
    };

    raw.finish()?;
    Ok(ExperimentConfig {
        experiment,
        seed,
        n_paths,
        payload,
        source_hash: fnv1a_hex(text.as_bytes()),
    })
}
