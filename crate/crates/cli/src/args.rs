use std::path::PathBuf;

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::ConfigError;

/// Verification driver for the smoothed second-moment machinery.
///
/// Every subcommand prints CSV (17 significant digits) to stdout, or writes
/// one file per table plus `manifest.json` under `--out`. Exit codes:
/// 0 all checks pass, 1 a check failed, 2 configuration error.
#[derive(Parser, Debug)]
#[command(name = "zmoment", version)]
pub struct Cli {
    /// JSON file with defaults; top-level keys `seed`, `workers` and one
    /// object per subcommand. Explicit flags win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Directory for CSV tables and the run manifest.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads [default: all cores].
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Append-only JSONL result cache; identical inputs are replayed.
    #[arg(long, global = true)]
    pub cache: Option<PathBuf>,
    /// Seed for randomly sampled points [default: 0].
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// ζ, χ and functional-equation residuals.
    /// Columns: re_s, im_s, re_zeta, im_zeta, abs_zeta, re_chi, im_chi, fe_residual.
    Zeta(ZetaArgs),
    /// Kernel window ω(t) against its interior/exterior bounds.
    /// Columns: t, re_omega, im_omega, deviation, region, quad_error, pass.
    Kernel(KernelArgs),
    /// Estermann identity residuals or the D(0, h/k) bound sweep.
    Estermann(EstermannArgs),
    /// Contour suites: j-crosscheck, residue, k-fit, gamma, geometry, w-trend.
    Contour(ContourArgs),
    /// Sharp moment of |ζA|² on [t_lo, T] and optional 𝔤(u) checks.
    /// Columns: kind, M, t_lo, t_hi, i_numeric, main_term, error_term, rel_error, b0, nodes, est_quad_error.
    Moment(MomentArgs),
    /// Error-term scan over (T, M) with a power-law fit.
    /// Tables: cells (T, M, i_numeric, main_term, error_term, rel_error, failure) and fit (param, value, ci95).
    Scan(ScanArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Auto,
    Em,
    Rs,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ZetaArgs {
    /// Heights t (comma separated) on the line Re s = sigma [default: 0,14.134725141734693,100].
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub t: Option<Vec<f64>>,
    /// Real part for the --t points [default: 0.5].
    #[arg(long, allow_hyphen_values = true)]
    pub sigma: Option<f64>,
    /// Extra real points s.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub s: Option<Vec<f64>>,
    /// Extra random points in −1 ≤ Re s ≤ 2, 0 ≤ Im s ≤ 100, drawn from --seed.
    #[arg(long)]
    pub random: Option<usize>,
    /// Evaluation mode [default: auto].
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    /// Assert fe_residual ≤ --tol on every row.
    #[arg(long, action = ArgAction::SetTrue)]
    pub check_functional: bool,
    /// Residual tolerance [default: 1e-8].
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KernelArgs {
    /// λ [default: 1000].
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Window start [default: 0].
    #[arg(long, allow_hyphen_values = true)]
    pub t1: Option<f64>,
    /// Window end [default: 1000].
    #[arg(long, allow_hyphen_values = true)]
    pub t2: Option<f64>,
    /// Decay exponent α of the bound T^−α [default: 2].
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Evaluation points [default: t1−500 to t2+500 in steps of 5].
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub t: Option<Vec<f64>>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstermannSuite {
    Identity,
    D0Bound,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EstermannArgs {
    /// Suite [default: identity].
    #[arg(long, value_enum)]
    pub suite: Option<EstermannSuite>,
    /// Im x of the identity points [default: 0.5,0.5,1].
    #[arg(long, value_delimiter = ',')]
    pub x_im: Option<Vec<f64>>,
    /// Fractions h/k paired with --x-im [default: 0/1,1/2,1/3].
    #[arg(long, value_delimiter = ',')]
    pub frac: Option<Vec<String>>,
    /// Line abscissa c in (1, 2) [default: 1.5].
    #[arg(long)]
    pub c: Option<f64>,
    /// Line integral cut |Im s| ≤ t_cut [default: 60].
    #[arg(long)]
    pub t_cut: Option<f64>,
    /// Also report every alternative reading of the identity.
    #[arg(long, action = ArgAction::SetTrue)]
    pub all_readings: bool,
    /// Residual tolerance [default: 1e-5].
    #[arg(long)]
    pub tol: Option<f64>,
    /// Largest k* for d0-bound [default: 40].
    #[arg(long)]
    pub k_max: Option<u64>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ContourSuite {
    JCrosscheck,
    Residue,
    KFit,
    Gamma,
    Geometry,
    WTrend,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    Standard,
    NoCos,
    Mirror,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ContourArgs {
    /// Suite [default: j-crosscheck].
    #[arg(long, value_enum)]
    pub suite: Option<ContourSuite>,
    /// λ values (gamma pairs them with --u) [defaults: 100; residue 50; gamma 10,100,1000].
    #[arg(long, value_delimiter = ',')]
    pub lambda: Option<Vec<f64>>,
    /// u values [defaults: j-crosscheck 0,25,50; residue 10; k-fit 100..1000; gamma 0,30,100].
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub u: Option<Vec<f64>>,
    /// y values for j-crosscheck [default: 3,4,5].
    #[arg(long, value_delimiter = ',')]
    pub y: Option<Vec<f64>>,
    /// Ray angles δ for residue [default: π/8, π/4, π/3].
    #[arg(long, value_delimiter = ',')]
    pub delta: Option<Vec<f64>>,
    /// Line abscissa c values [default: 1.5; geometry 1.1,1.5,1.9].
    #[arg(long, value_delimiter = ',')]
    pub c: Option<Vec<f64>>,
    /// Heights T for w-trend [default: 40,80,160,320].
    #[arg(long = "T", value_delimiter = ',')]
    #[serde(rename = "T")]
    pub big_t: Option<Vec<f64>>,
    /// w-trend uses λ = T^p [default: 1.9].
    #[arg(long)]
    pub lambda_power: Option<f64>,
    /// w-trend integrand variant [default: standard].
    #[arg(long, value_enum)]
    pub variant: Option<Variant>,
    /// Tolerance for the suite's main assertion [defaults: 1e-7, 1e-8, 1e-3, 1e-8].
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mollifier {
    Ones,
    Moebius,
    SmoothedMoebius,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MomentArgs {
    /// Preset coefficients [default: ones].
    #[arg(long, value_enum)]
    pub mollifier: Option<Mollifier>,
    /// Coefficient file (`m re im` per line); overrides --mollifier and --M.
    #[arg(long)]
    pub coeff_file: Option<PathBuf>,
    /// Length M of the preset [default: 1].
    #[arg(long = "M")]
    #[serde(rename = "M")]
    pub m: Option<usize>,
    /// Upper limit T [default: 1000].
    #[arg(long = "T")]
    #[serde(rename = "T")]
    pub big_t: Option<f64>,
    /// Lower limit [default: 0].
    #[arg(long)]
    pub t_lo: Option<f64>,
    /// Constant b₀ of the main term [default: 2γ].
    #[arg(long, allow_hyphen_values = true)]
    pub b0: Option<f64>,
    /// Quadrature density [default: one 16-node panel per mean zero spacing].
    #[arg(long)]
    pub nodes_per_unit: Option<f64>,
    /// Node budget [default: 2000000].
    #[arg(long)]
    pub max_nodes: Option<usize>,
    /// Assert |𝓔|/main ≤ this [default: 0.1].
    #[arg(long)]
    pub max_rel_error: Option<f64>,
    /// Points u for 𝔤(u) numeric vs main.
    #[arg(long, value_delimiter = ',')]
    pub g_at: Option<Vec<f64>>,
    /// Kernel λ for --g-at [default: 1000].
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Assert |𝔤 numeric/main − 1| ≤ this [default: 0.02].
    #[arg(long)]
    pub g_tol: Option<f64>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanArgs {
    /// Preset coefficients [default: moebius].
    #[arg(long, value_enum)]
    pub mollifier: Option<Mollifier>,
    /// Ascending M grid [default: 2,4,8].
    #[arg(long = "M", value_delimiter = ',')]
    #[serde(rename = "M")]
    pub m: Option<Vec<usize>>,
    /// Ascending T grid [default: 500,1000].
    #[arg(long = "T", value_delimiter = ',')]
    #[serde(rename = "T")]
    pub big_t: Option<Vec<f64>>,
    /// Constant b₀ [default: 2γ].
    #[arg(long, allow_hyphen_values = true)]
    pub b0: Option<f64>,
    /// Node budget per cell [default: 2000000].
    #[arg(long)]
    pub max_nodes: Option<usize>,
    /// Assert the fitted M exponent ≤ this [default: 2.5].
    #[arg(long)]
    pub max_m_exponent: Option<f64>,
}

/// The parsed `--config` file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub zeta: Option<Value>,
    pub kernel: Option<Value>,
    pub estermann: Option<Value>,
    pub contour: Option<Value>,
    pub moment: Option<Value>,
    pub scan: Option<Value>,
}

impl ConfigFile {
    pub fn load(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| ConfigError(format!("config {}: {e}", path.display())))
    }
}

/// Overlays the explicitly given flags on the config section.
pub fn merge<T: Serialize + DeserializeOwned>(flags: &T, section: Option<&Value>) -> Result<T, ConfigError> {
    let mut base = match section {
        Some(Value::Object(m)) => m.clone(),
        Some(_) => return Err(ConfigError("config sections must be JSON objects".into())),
        None => Default::default(),
    };
    let Value::Object(given) = serde_json::to_value(flags).expect("flags serialize") else {
        unreachable!("argument structs serialize to objects")
    };
    for (k, v) in given {
        // unset options and switches left off do not override the config
        if !matches!(v, Value::Null | Value::Bool(false)) {
            base.insert(k, v);
        }
    }
    serde_json::from_value(Value::Object(base)).map_err(|e| ConfigError(format!("config: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_config() {
        let flags = KernelArgs { lambda: Some(500.0), ..Default::default() };
        let section = serde_json::json!({"lambda": 100.0, "alpha": 3.0});
        let merged = merge(&flags, Some(&section)).unwrap();
        assert_eq!(merged.lambda, Some(500.0));
        assert_eq!(merged.alpha, Some(3.0));
        assert!(merge(&flags, Some(&serde_json::json!({"lamda": 1.0}))).is_err());
    }

    #[test]
    fn switches_left_off_keep_config() {
        let flags = ZetaArgs::default();
        let merged = merge(&flags, Some(&serde_json::json!({"check_functional": true}))).unwrap();
        assert!(merged.check_functional);
    }
}
