//! Config-driven experiment runner.
//!
//! A config is a TOML document with a `kind`, an `[output]` table and exactly
//! one parameter table named after the kind. Everything is validated before
//! any computation starts.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::channel::{Channel, Picture};
use crate::error::{OtocError, Result};
use crate::linalg::BipartiteSpace;
use crate::otoc::{g_choi, g_commutator_mc, g_exact, Method};
use crate::propagate::Integrator;
use crate::random::{random_mixed_unitary_kraus, rng_for};
use crate::record::{to_csv, to_json, write_text, OtocRecord};
use crate::special::{
    example1_channel, example1_curve, example1_generator, example2_curve, example2_generator, g_dephasing,
    g_eb, g_eb_basis_to_basis, random_dephasing_ensemble, DephasingBasis, EbChannelSpec,
};
use crate::spin_chain::{closed_timeseries, otoc_timeseries, uniform_grid, DissipationSpec, ModelKind, SpinChainModel};

const MAX_SAMPLES: usize = 10_000_000;
const MAX_POINTS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Example1,
    Example2,
    DephasingRandom,
    EbDemo,
    Spinchain,
    Crosscheck,
}

impl ExperimentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentKind::Example1 => "example1",
            ExperimentKind::Example2 => "example2",
            ExperimentKind::DephasingRandom => "dephasing-random",
            ExperimentKind::EbDemo => "eb-demo",
            ExperimentKind::Spinchain => "spinchain",
            ExperimentKind::Crosscheck => "crosscheck",
        }
    }

    pub fn describe(self) -> &'static str {
        match self {
            ExperimentKind::Example1 => "identity/swap mixture generated by a swap jump operator: G(t) vs closed form",
            ExperimentKind::Example2 => "swap Hamiltonian with Bell dephasing at rate lambda: G(t) vs closed form",
            ExperimentKind::DephasingRandom => "G of dephasing channels in Haar-random bases; mean and tail",
            ExperimentKind::EbDemo => "entanglement-breaking channels: closed forms vs exact evaluation",
            ExperimentKind::Spinchain => "dissipative TFIM / XXZ chains: G, G1, G2 time series",
            ExperimentKind::Crosscheck => "random unital channels: exact vs Choi vs commutator Monte-Carlo",
        }
    }

    pub fn all() -> [ExperimentKind; 6] {
        [
            ExperimentKind::Example1,
            ExperimentKind::Example2,
            ExperimentKind::DephasingRandom,
            ExperimentKind::EbDemo,
            ExperimentKind::Spinchain,
            ExperimentKind::Crosscheck,
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl OutputFormat {
    fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: PathBuf,
    #[serde(default)]
    pub format: OutputFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    #[serde(default)]
    pub t_min: f64,
    pub t_max: f64,
    pub n: usize,
}

impl TimeGrid {
    pub fn points(&self) -> Result<Vec<f64>> {
        uniform_grid(self.t_min, self.t_max, self.n)
    }

    fn validate(&self, field: &str) -> Result<()> {
        if self.n > MAX_POINTS {
            return Err(cfg(field, format!("at most {MAX_POINTS} time points")));
        }
        self.points().map(|_| ()).map_err(|e| cfg(field, e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntegratorChoice {
    #[default]
    Taylor,
    DormandPrince,
}

impl IntegratorChoice {
    pub fn integrator(self) -> Integrator {
        match self {
            IntegratorChoice::Taylor => Integrator::taylor(),
            IntegratorChoice::DormandPrince => Integrator::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Example1Params {
    pub times: TimeGrid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Example2Params {
    pub lambdas: Vec<f64>,
    pub times: TimeGrid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DephasingRandomParams {
    pub d_a: usize,
    pub d_b: usize,
    pub n_bases: usize,
    pub epsilon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EbDemoParams {
    pub d_a: usize,
    pub d_b: usize,
    pub n_random: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpinchainParams {
    pub sites: usize,
    #[serde(default = "one")]
    pub cut: usize,
    pub model: ModelKind,
    pub alphas: Vec<f64>,
    #[serde(default)]
    pub gamma: f64,
    #[serde(default)]
    pub gamma_equals_alpha: bool,
    #[serde(default)]
    pub integrator: IntegratorChoice,
    #[serde(default)]
    pub include_closed: bool,
    pub times: TimeGrid,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrosscheckParams {
    pub d_a: usize,
    pub d_b: usize,
    pub n_channels: usize,
    #[serde(default = "two")]
    pub n_unitaries: usize,
    #[serde(default)]
    pub mc_pairs: usize,
}

fn two() -> usize {
    2
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    #[serde(default)]
    pub seed: u64,
    pub output: OutputSpec,
    pub example1: Option<Example1Params>,
    pub example2: Option<Example2Params>,
    #[serde(rename = "dephasing-random")]
    pub dephasing_random: Option<DephasingRandomParams>,
    #[serde(rename = "eb-demo")]
    pub eb_demo: Option<EbDemoParams>,
    pub spinchain: Option<SpinchainParams>,
    pub crosscheck: Option<CrosscheckParams>,
}

fn cfg(field: &str, msg: impl std::fmt::Display) -> OtocError {
    OtocError::Config(format!("{field}: {msg}"))
}

fn check_rate(field: &str, v: f64) -> Result<()> {
    if !v.is_finite() || v < 0.0 {
        return Err(cfg(field, format!("must be finite and nonnegative, got {v}")));
    }
    Ok(())
}

fn check_dims(section: &str, d_a: usize, d_b: usize, max_d: usize) -> Result<()> {
    if d_a == 0 || d_b == 0 {
        return Err(cfg(&format!("{section}.d_a/d_b"), "dimensions must be positive"));
    }
    if d_a * d_b > max_d {
        return Err(cfg(&format!("{section}.d_a/d_b"), format!("d_A d_B = {} exceeds {max_d}", d_a * d_b)));
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let config: Self = toml::from_str(s).map_err(|e| OtocError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<(Self, String)> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| OtocError::Io { path: path.display().to_string(), source: e })?;
        Ok((Self::from_toml_str(&text)?, text))
    }

    /// Checks every downstream precondition; performs no computation.
    pub fn validate(&self) -> Result<()> {
        let present = [
            ("example1", self.example1.is_some()),
            ("example2", self.example2.is_some()),
            ("dephasing-random", self.dephasing_random.is_some()),
            ("eb-demo", self.eb_demo.is_some()),
            ("spinchain", self.spinchain.is_some()),
            ("crosscheck", self.crosscheck.is_some()),
        ];
        let kind = self.kind.as_str();
        for (name, is_set) in present {
            if name == kind && !is_set {
                return Err(cfg(kind, format!("missing [{kind}] table")));
            }
            if name != kind && is_set {
                return Err(cfg(name, format!("table [{name}] does not belong to kind \"{kind}\"")));
            }
        }
        if self.output.dir.as_os_str().is_empty() {
            return Err(cfg("output.dir", "must not be empty"));
        }
        match self.kind {
            ExperimentKind::Example1 => self.example1.as_ref().expect("checked").times.validate("example1.times")?,
            ExperimentKind::Example2 => {
                let p = self.example2.as_ref().expect("checked");
                if p.lambdas.is_empty() {
                    return Err(cfg("example2.lambdas", "must not be empty"));
                }
                for (i, &l) in p.lambdas.iter().enumerate() {
                    check_rate(&format!("example2.lambdas[{i}]"), l)?;
                }
                p.times.validate("example2.times")?;
            }
            ExperimentKind::DephasingRandom => {
                let p = self.dephasing_random.as_ref().expect("checked");
                check_dims("dephasing-random", p.d_a, p.d_b, 64)?;
                if p.d_a > p.d_b {
                    return Err(cfg("dephasing-random.d_a", format!("needs d_A <= d_B, got {} > {}", p.d_a, p.d_b)));
                }
                if p.n_bases < 10 || p.n_bases > MAX_SAMPLES {
                    return Err(cfg("dephasing-random.n_bases", format!("must lie in [10, {MAX_SAMPLES}]")));
                }
                if !(p.epsilon.is_finite() && p.epsilon > 0.0) {
                    return Err(cfg("dephasing-random.epsilon", "must be positive"));
                }
            }
            ExperimentKind::EbDemo => {
                let p = self.eb_demo.as_ref().expect("checked");
                check_dims("eb-demo", p.d_a, p.d_b, 16)?;
                if p.n_random > 100_000 {
                    return Err(cfg("eb-demo.n_random", "at most 100000"));
                }
            }
            ExperimentKind::Spinchain => {
                let p = self.spinchain.as_ref().expect("checked");
                let model = SpinChainModel::new(p.sites, p.model).map_err(|e| cfg("spinchain.model", e))?;
                crate::spin_chain::cut_space(&model, p.cut).map_err(|e| cfg("spinchain.cut", e))?;
                if p.alphas.is_empty() {
                    return Err(cfg("spinchain.alphas", "must not be empty"));
                }
                for (i, &a) in p.alphas.iter().enumerate() {
                    check_rate(&format!("spinchain.alphas[{i}]"), a)?;
                }
                check_rate("spinchain.gamma", p.gamma)?;
                if p.gamma_equals_alpha && p.gamma != 0.0 {
                    return Err(cfg("spinchain.gamma", "set either gamma or gamma_equals_alpha, not both"));
                }
                p.times.validate("spinchain.times")?;
            }
            ExperimentKind::Crosscheck => {
                let p = self.crosscheck.as_ref().expect("checked");
                check_dims("crosscheck", p.d_a, p.d_b, 16)?;
                if p.n_channels == 0 || p.n_channels > 100_000 {
                    return Err(cfg("crosscheck.n_channels", "must lie in [1, 100000]"));
                }
                if p.n_unitaries == 0 || p.n_unitaries > 64 {
                    return Err(cfg("crosscheck.n_unitaries", "must lie in [1, 64]"));
                }
                if p.mc_pairs == 1 || p.mc_pairs > MAX_SAMPLES {
                    return Err(cfg("crosscheck.mc_pairs", format!("must be 0 (off) or in [2, {MAX_SAMPLES}]")));
                }
            }
        }
        Ok(())
    }
}

/// One named table of records.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub name: String,
    pub records: Vec<OtocRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub kind: String,
    pub config_sha256: String,
    pub seed: u64,
    pub version: String,
    pub wall_time_s: f64,
    pub files: Vec<String>,
}

fn label(x: f64) -> String {
    // shortest round-trip form keeps file names stable and readable
    format!("{x}")
}

/// Runs a validated config and returns the result tables in output order.
pub fn run_tables(config: &ExperimentConfig) -> Result<Vec<ResultTable>> {
    config.validate()?;
    let seed = config.seed;
    match config.kind {
        ExperimentKind::Example1 => {
            let p = config.example1.as_ref().expect("validated");
            let times = p.times.points()?;
            let gen = example1_generator()?;
            let chans = gen.channels_on_grid(&times, Picture::Heisenberg, Integrator::taylor())?;
            let mut records = Vec::with_capacity(times.len());
            for (&t, ch) in times.iter().zip(&chans) {
                let v = g_exact(ch)?;
                let mixture = g_exact(&example1_channel(t)?)?.g;
                records.push(
                    OtocRecord::from_value(t, &v, None)
                        .with_extra("closed_form", example1_curve(t))
                        .with_extra("mixture", mixture),
                );
            }
            Ok(vec![ResultTable { name: "example1".into(), records }])
        }
        ExperimentKind::Example2 => {
            let p = config.example2.as_ref().expect("validated");
            let times = p.times.points()?;
            p.lambdas
                .iter()
                .map(|&lam| {
                    let gen = example2_generator(lam)?;
                    let chans = gen.channels_on_grid(&times, Picture::Heisenberg, Integrator::taylor())?;
                    let records = times
                        .iter()
                        .zip(&chans)
                        .map(|(&t, ch)| {
                            Ok(OtocRecord::from_value(t, &g_exact(ch)?, None)
                                .with_extra("closed_form", example2_curve(t, lam))
                                .with_extra("lambda", lam))
                        })
                        .collect::<Result<_>>()?;
                    Ok(ResultTable { name: format!("example2_lambda={}", label(lam)), records })
                })
                .collect()
        }
        ExperimentKind::DephasingRandom => {
            let p = config.dephasing_random.as_ref().expect("validated");
            let rep = random_dephasing_ensemble(p.d_a, p.d_b, p.n_bases, seed, p.epsilon)?;
            let records = rep
                .values
                .iter()
                .enumerate()
                .map(|(k, &g)| {
                    let mut r = OtocRecord::new(k as f64, g, Method::ClosedForm);
                    r.seed = Some(seed);
                    r
                })
                .collect();
            let mut summary = OtocRecord::new(0.0, rep.mean, Method::ClosedForm)
                .with_extra("SE", rep.std_err)
                .with_extra("mean_bound", rep.mean_bound)
                .with_extra("epsilon", rep.epsilon)
                .with_extra("tail", rep.tail)
                .with_extra("tail_bound", rep.tail_bound)
                .with_extra("n_bases", rep.n_bases as f64);
            summary.seed = Some(seed);
            Ok(vec![
                ResultTable { name: "dephasing_random_samples".into(), records },
                ResultTable { name: "dephasing_random_summary".into(), records: vec![summary] },
            ])
        }
        ExperimentKind::EbDemo => {
            let p = config.eb_demo.as_ref().expect("validated");
            let space = BipartiteSpace::new(p.d_a, p.d_b)?;
            let mut specs: Vec<(EbChannelSpec, Option<f64>)> = Vec::new();
            let comp = DephasingBasis::computational(space);
            if p.d_a == 2 && p.d_b == 2 {
                let bell = DephasingBasis::bell();
                specs.push((EbChannelSpec::basis_to_basis(&comp, &bell)?, Some(g_eb_basis_to_basis(&comp, &bell)?)));
                specs.push((EbChannelSpec::basis_to_basis(&bell, &bell)?, Some(g_dephasing(&bell))));
            }
            specs.push((EbChannelSpec::basis_to_basis(&comp, &comp)?, Some(g_dephasing(&comp))));
            for k in 0..p.n_random {
                let mut rng = rng_for(seed, k as u64);
                let from = DephasingBasis::haar(space, &mut rng);
                let to = DephasingBasis::haar(space, &mut rng);
                let b2b = g_eb_basis_to_basis(&from, &to)?;
                specs.push((EbChannelSpec::basis_to_basis(&from, &to)?, Some(b2b)));
            }
            let records = specs
                .iter()
                .enumerate()
                .map(|(k, (spec, b2b))| {
                    let closed = g_eb(spec);
                    let exact = g_exact(&spec.channel())?.g;
                    let mut r = OtocRecord::new(k as f64, closed, Method::ClosedForm)
                        .with_extra("exact", exact)
                        .with_extra("abs_diff", (closed - exact).abs());
                    if let Some(b) = b2b {
                        r = r.with_extra("basis_to_basis", *b);
                    }
                    r.seed = Some(seed);
                    Ok(r)
                })
                .collect::<Result<_>>()?;
            Ok(vec![ResultTable { name: "eb_demo".into(), records }])
        }
        ExperimentKind::Spinchain => {
            let p = config.spinchain.as_ref().expect("validated");
            let model = SpinChainModel::new(p.sites, p.model)?;
            let times = p.times.points()?;
            let mut tables = Vec::new();
            for &alpha in &p.alphas {
                let gamma = if p.gamma_equals_alpha { alpha } else { p.gamma };
                let diss = DissipationSpec::new(alpha, gamma)?;
                let records = otoc_timeseries(&model, &diss, p.cut, &times, p.integrator.integrator())?
                    .into_iter()
                    .map(|r| r.with_extra("alpha", alpha).with_extra("gamma", gamma))
                    .collect();
                tables.push(ResultTable { name: format!("spinchain_alpha={}", label(alpha)), records });
            }
            if p.include_closed {
                tables.push(ResultTable { name: "spinchain_closed".into(), records: closed_timeseries(&model, p.cut, &times)? });
            }
            Ok(tables)
        }
        ExperimentKind::Crosscheck => {
            let p = config.crosscheck.as_ref().expect("validated");
            let space = BipartiteSpace::new(p.d_a, p.d_b)?;
            let records = (0..p.n_channels)
                .map(|k| {
                    let mut rng = rng_for(seed, k as u64);
                    let ch = Channel::from_kraus(space, random_mixed_unitary_kraus(space.dim(), p.n_unitaries, &mut rng), Picture::Heisenberg)?;
                    let exact = g_exact(&ch)?;
                    let choi = g_choi(&ch)?.value.g;
                    let mut r = OtocRecord::from_value(k as f64, &exact, Some(seed))
                        .with_extra("choi", choi)
                        .with_extra("abs_diff", (exact.g - choi).abs());
                    if p.mc_pairs > 0 {
                        let mc = g_commutator_mc(&ch, p.mc_pairs, seed.wrapping_add(1 + k as u64))?;
                        r = r.with_extra("commutator_mc", mc.g).with_extra("mc_se", mc.std_err.unwrap_or(f64::NAN));
                    }
                    Ok(r)
                })
                .collect::<Result<_>>()?;
            Ok(vec![ResultTable { name: "crosscheck".into(), records }])
        }
    }
}

pub fn render(table: &ResultTable, format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Csv => to_csv(&table.records),
        OutputFormat::Json => to_json(&table.records),
    }
}

/// Runs the experiment and writes one file per table plus `manifest.json`.
pub fn run_to_dir(config: &ExperimentConfig, config_text: &str) -> Result<Manifest> {
    let start = Instant::now();
    let tables = run_tables(config)?;
    let dir = &config.output.dir;
    let mut files = Vec::new();
    for t in &tables {
        let name = format!("{}.{}", t.name, config.output.format.extension());
        write_text(&dir.join(&name), &render(t, config.output.format)?)?;
        files.push(name);
    }
    let manifest = Manifest {
        kind: config.kind.as_str().into(),
        config_sha256: sha256_hex(config_text.as_bytes()),
        seed: config.seed,
        version: env!("CARGO_PKG_VERSION").into(),
        wall_time_s: start.elapsed().as_secs_f64(),
        files,
    };
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    write_text(&dir.join("manifest.json"), &text)?;
    Ok(manifest)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base(kind: &str, table: &str) -> String {
        format!("kind = \"{kind}\"\nseed = 3\n[output]\ndir = \"out\"\n{table}")
    }

    #[test]
    fn parses_each_kind() {
        let cases = [
            base("example1", "[example1]\ntimes = { t_max = 5.0, n = 11 }\n"),
            base("example2", "[example2]\nlambdas = [0.0, 0.5]\ntimes = { t_max = 5.0, n = 11 }\n"),
            base("dephasing-random", "[dephasing-random]\nd_a = 2\nd_b = 2\nn_bases = 20\nepsilon = 0.1\n"),
            base("eb-demo", "[eb-demo]\nd_a = 2\nd_b = 2\nn_random = 3\n"),
            base("spinchain", "[spinchain]\nsites = 3\nmodel = { kind = \"tfim\", g = -1.05, h = 0.5 }\nalphas = [0.0, 0.05]\ntimes = { t_max = 2.0, n = 5 }\n"),
            base("crosscheck", "[crosscheck]\nd_a = 2\nd_b = 2\nn_channels = 4\nmc_pairs = 100\n"),
        ];
        for c in &cases {
            let config = ExperimentConfig::from_toml_str(c).unwrap();
            let tables = run_tables(&config).unwrap();
            assert!(!tables.is_empty() && tables.iter().all(|t| !t.records.is_empty()));
        }
    }

    #[test]
    fn rejects_malformed() {
        let bad = [
            "kind = \"nope\"\n[output]\ndir = \"o\"\n".to_string(),
            base("example1", "[example1]\ntimes = { t_max = 5.0, n = 11 }\nextra = 1\n"),
            base("example1", ""),
            base("example1", "[example1]\ntimes = { t_max = 5.0, n = 11 }\n[example2]\nlambdas = [1.0]\ntimes = { t_max = 1.0, n = 2 }\n"),
            base("example2", "[example2]\nlambdas = [-0.5]\ntimes = { t_max = 5.0, n = 11 }\n"),
            base("example2", "[example2]\nlambdas = []\ntimes = { t_max = 5.0, n = 11 }\n"),
            base("example2", "[example2]\nlambdas = [0.5]\ntimes = { t_max = -1.0, n = 11 }\n"),
            base("dephasing-random", "[dephasing-random]\nd_a = 4\nd_b = 2\nn_bases = 20\nepsilon = 0.1\n"),
            base("dephasing-random", "[dephasing-random]\nd_a = 2\nd_b = 2\nn_bases = 5\nepsilon = 0.1\n"),
            base("spinchain", "[spinchain]\nsites = 1\nmodel = { kind = \"tfim\", g = 1.0, h = 0.0 }\nalphas = [0.0]\ntimes = { t_max = 2.0, n = 5 }\n"),
            base("spinchain", "[spinchain]\nsites = 4\ncut = 4\nmodel = { kind = \"tfim\", g = 1.0, h = 0.0 }\nalphas = [0.0]\ntimes = { t_max = 2.0, n = 5 }\n"),
            base("spinchain", "[spinchain]\nsites = 4\nmodel = { kind = \"tfim\", g = 1.0 }\nalphas = [0.0]\ntimes = { t_max = 2.0, n = 5 }\n"),
            base("crosscheck", "[crosscheck]\nd_a = 8\nd_b = 8\nn_channels = 4\n"),
        ];
        for b in &bad {
            assert!(matches!(ExperimentConfig::from_toml_str(b), Err(OtocError::Config(_))), "accepted:\n{b}");
        }
    }

    #[test]
    fn example2_tracks_closed_form() {
        let c = base("example2", "[example2]\nlambdas = [0.5]\ntimes = { t_max = 15.0, n = 31 }\n");
        let tables = run_tables(&ExperimentConfig::from_toml_str(&c).unwrap()).unwrap();
        for r in &tables[0].records {
            assert!((r.g - r.extra["closed_form"]).abs() < 1e-9);
        }
    }
}
