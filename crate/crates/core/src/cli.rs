//! `srg-lab` command-line front end.
//!
//! Every command parses all of its inputs before writing anything, then
//! writes each artifact through a temporary file and a rename. A `run.json`
//! manifest records the command, the resolved configuration and the seed.

use std::ffi::OsString;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::certifier::{
    certify_hard, certify_passivity_corollary, certify_soft, Assumption, AssumptionChecklist,
    AssumptionStatus, Certificate, CertifyOptions, Evidence, PassivityEvidence, PassivityOptions,
    Verdict, Witnesses,
};
use crate::error::{Error, Result};
use crate::feedback::{estimate_loop_incremental_gain, solve_feedback, GainConfig, SolverConfig};
use crate::operators::OperatorSpec;
use crate::plot::{render_svg, Layer, PlotStyle};
use crate::regions::{containment_report, invert_region, negate_region, scale_region, Region};
use crate::sampler::{invert_cloud, sample_hard_srg, sample_soft_srg, scale_cloud, ExcitationConfig, SrgCloud};
use crate::signal::SampledSignal;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_NOT_CERTIFIED: i32 = 2;
pub const EXIT_INDETERMINATE: i32 = 3;

pub const THREADS_ENV: &str = "SRG_LAB_THREADS";

#[derive(Debug, Parser)]
#[command(name = "srg-lab", version, about = "Scaled relative graphs and SRG separation certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args, Serialize)]
struct Common {
    /// Output directory (created if missing).
    #[arg(long, short, default_value = ".")]
    out: PathBuf,
    /// Run configuration JSON; unknown keys are rejected.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides every seed in the configuration.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the certificate margin floor.
    #[arg(long)]
    margin_floor: Option<f64>,
    /// Overrides the excitation ensemble size.
    #[arg(long)]
    ensemble_size: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize)]
struct Premises {
    /// JSON assumption checklist.
    #[arg(long)]
    checklist: Option<PathBuf>,
    /// Marks a premise as asserted by the user (repeatable), e.g. `p_stable`.
    #[arg(long = "assert", value_name = "NAME")]
    asserted: Vec<String>,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Sample the soft SRG of an operator.
    SrgSoft {
        #[arg(long)]
        system: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Sample the hard SRG of an operator.
    SrgHard {
        #[arg(long)]
        system: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Transform and plot a region, optionally checking a cloud against it.
    Region {
        #[arg(long)]
        region: PathBuf,
        /// Applied in order: `invert`, `negate` or `scale:<tau>` (repeatable).
        #[arg(long = "transform")]
        transforms: Vec<String>,
        /// Cloud whose containment in the (transformed) region is reported.
        #[arg(long)]
        cloud: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Hard separation certificate.
    CertHard {
        /// SRG evidence for P: region or hard cloud JSON.
        #[arg(long)]
        p: PathBuf,
        /// Inverse SRG evidence for C.
        #[arg(long)]
        inv_c: PathBuf,
        /// Treat `--inv-c` as the SRG of C and invert it first.
        #[arg(long)]
        invert_c: bool,
        #[command(flatten)]
        premises: Premises,
        #[command(flatten)]
        common: Common,
    },
    /// Soft separation certificate over a τ grid.
    CertSoft {
        #[arg(long)]
        p: PathBuf,
        #[arg(long)]
        inv_c: PathBuf,
        #[arg(long)]
        invert_c: bool,
        /// Comma-separated τ values; must end at 1.
        #[arg(long, value_delimiter = ',')]
        tau_grid: Option<Vec<f64>>,
        #[command(flatten)]
        premises: Premises,
        #[command(flatten)]
        common: Common,
    },
    /// Passivity corollary certificate from operator specs.
    CertPassivity {
        #[arg(long)]
        system_p: PathBuf,
        #[arg(long)]
        system_c: PathBuf,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        epsilon: Option<f64>,
        /// Check the passivity premises against sampled hard clouds.
        #[arg(long)]
        sample_evidence: bool,
        #[command(flatten)]
        premises: Premises,
        #[command(flatten)]
        common: Common,
    },
    /// Solve the closed loop for one disturbance.
    Simulate {
        #[arg(long)]
        system_p: PathBuf,
        #[arg(long)]
        system_c: PathBuf,
        /// Disturbance CSV (`t` column then one column per channel).
        #[arg(long, conflicts_with = "step")]
        input: Option<PathBuf>,
        /// Constant disturbance of this amplitude over the excitation horizon.
        #[arg(long)]
        step: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Sampled closed-loop incremental gain.
    GainEstimate {
        #[arg(long)]
        system_p: PathBuf,
        #[arg(long)]
        system_c: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Plot clouds, regions and certificate witnesses.
    Plot {
        #[arg(long)]
        cloud: Vec<PathBuf>,
        #[arg(long)]
        region: Vec<PathBuf>,
        #[arg(long)]
        certificate: Option<PathBuf>,
        #[arg(long)]
        title: Option<String>,
        #[command(flatten)]
        common: Common,
    },
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::SrgSoft { common, .. }
            | Command::SrgHard { common, .. }
            | Command::Region { common, .. }
            | Command::CertHard { common, .. }
            | Command::CertSoft { common, .. }
            | Command::CertPassivity { common, .. }
            | Command::Simulate { common, .. }
            | Command::GainEstimate { common, .. }
            | Command::Plot { common, .. } => common,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Command::SrgSoft { .. } => "srg-soft",
            Command::SrgHard { .. } => "srg-hard",
            Command::Region { .. } => "region",
            Command::CertHard { .. } => "cert-hard",
            Command::CertSoft { .. } => "cert-soft",
            Command::CertPassivity { .. } => "cert-passivity",
            Command::Simulate { .. } => "simulate",
            Command::GainEstimate { .. } => "gain-estimate",
            Command::Plot { .. } => "plot",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PassivityIndices {
    pub delta: f64,
    pub epsilon: f64,
}

/// Contents of `--config`. Every section is optional; unknown keys are errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub excitation: ExcitationConfig,
    pub certify: CertifyOptions,
    pub tau_grid: Vec<f64>,
    pub passivity: Option<PassivityIndices>,
    pub passivity_options: PassivityOptions,
    pub solver: SolverConfig,
    pub gain: GainConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: None,
            excitation: ExcitationConfig::default(),
            certify: CertifyOptions::default(),
            tau_grid: vec![0.25, 0.5, 0.75, 1.0],
            passivity: None,
            passivity_options: PassivityOptions::default(),
            solver: SolverConfig::default(),
            gain: GainConfig::default(),
        }
    }
}

impl RunConfig {
    /// Parses strictly, naming the file, line and column on failure.
    pub fn from_path(path: &Path) -> Result<Self> {
        let cfg: RunConfig = parse_json_file(path)?;
        cfg.excitation.validate()?;
        cfg.gain.excitation.validate()?;
        Ok(cfg)
    }

    fn apply(&mut self, common: &Common) -> Result<()> {
        if let Some(s) = common.seed.or(self.seed) {
            self.seed = Some(s);
            self.excitation.seed = s;
            self.gain.excitation.seed = s;
            self.passivity_options.probe_seed = s;
        }
        self.seed = Some(self.excitation.seed);
        if let Some(f) = common.margin_floor {
            self.certify.margin_floor = f;
            self.passivity_options.certify.margin_floor = f;
        }
        if let Some(n) = common.ensemble_size {
            self.excitation.ensemble_size = n;
        }
        self.excitation.validate()?;
        Ok(())
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn parse_json_file<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = read(path)?;
    serde_json::from_str(&text).map_err(|e| json_error(path, &e))
}

/// `path:line:col: message`, without serde's trailing location.
fn json_error(path: &Path, e: &serde_json::Error) -> Error {
    let msg = e.to_string();
    let suffix = format!(" at line {} column {}", e.line(), e.column());
    let msg = msg.strip_suffix(&suffix).unwrap_or(&msg);
    Error::Parse(format!("{}:{}:{}: {msg}", path.display(), e.line(), e.column()))
}

fn load_system(path: &Path) -> Result<OperatorSpec> {
    let spec: OperatorSpec = parse_json_file(path)?;
    spec.validate()
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    Ok(spec)
}

fn load_region(path: &Path) -> Result<Region> {
    let r: Region = parse_json_file(path)?;
    r.validate().map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    Ok(r)
}

fn load_cloud(path: &Path) -> Result<SrgCloud> {
    let text = read(path)?;
    SrgCloud::from_json(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

/// Region or cloud, told apart by the cloud's `points` key.
fn load_evidence(path: &Path) -> Result<Evidence> {
    let text = read(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| json_error(path, &e))?;
    if value.get("points").is_some() {
        Ok(Evidence::Cloud(load_cloud(path)?))
    } else {
        Ok(Evidence::Region(load_region(path)?))
    }
}

fn invert_evidence(e: Evidence) -> Result<Evidence> {
    Ok(match e {
        Evidence::Region(r) => Evidence::Region(invert_region(&r)?),
        Evidence::Cloud(c) => Evidence::Cloud(invert_cloud(&c)),
    })
}

fn parse_assumption(name: &str) -> Result<Assumption> {
    serde_json::from_value(serde_json::Value::String(name.to_string()))
        .map_err(|_| Error::Parse(format!("unknown assumption `{name}`")))
}

fn load_checklist(p: &Premises) -> Result<AssumptionChecklist> {
    let mut list = match &p.checklist {
        Some(path) => parse_json_file(path)?,
        None => AssumptionChecklist::new(),
    };
    for name in &p.asserted {
        list.set(parse_assumption(name)?, AssumptionStatus::AssertedByUser, None);
    }
    Ok(list)
}

/// Artifacts are staged in memory and written only after every input parsed.
struct Outputs {
    dir: PathBuf,
    files: Vec<(String, Vec<u8>)>,
}

impl Outputs {
    fn new(dir: &Path) -> Self {
        Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        }
    }

    fn add(&mut self, name: &str, bytes: impl Into<Vec<u8>>) {
        self.files.push((name.to_string(), bytes.into()));
    }

    fn commit(self, manifest: &serde_json::Value) -> Result<()> {
        std::fs::create_dir_all(&self.dir)?;
        let mut names: Vec<&str> = self.files.iter().map(|(n, _)| n.as_str()).collect();
        names.push("run.json");
        let mut manifest = manifest.clone();
        manifest["artifacts"] = serde_json::json!(names);
        let run = serde_json::to_vec_pretty(&manifest)?;
        for (name, bytes) in self.files.iter().map(|(n, b)| (n.as_str(), b)).chain([("run.json", &run)]) {
            let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
            tmp.write_all(bytes)?;
            tmp.as_file().sync_all()?;
            tmp.persist(self.dir.join(name)).map_err(|e| Error::Io(e.error))?;
        }
        Ok(())
    }
}

fn cloud_csv(cloud: &SrgCloud) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    cloud.write_csv(&mut buf)?;
    Ok(buf)
}

fn verdict_exit(v: Verdict) -> i32 {
    match v {
        Verdict::Certified => EXIT_OK,
        Verdict::NotCertified => EXIT_NOT_CERTIFIED,
        Verdict::Indeterminate => EXIT_INDETERMINATE,
    }
}

fn evidence_layer<'a>(label: &str, e: &'a Evidence) -> Layer<'a> {
    match e {
        Evidence::Region(r) => Layer::Region {
            label: label.into(),
            region: r,
        },
        Evidence::Cloud(c) => Layer::Cloud {
            label: label.into(),
            cloud: c,
        },
    }
}

fn certificate_svg(p: &Evidence, inv_c: &Evidence, cert: &Certificate) -> Result<String> {
    render_svg(
        &[evidence_layer("P", p), evidence_layer("inverse C", inv_c)],
        cert.witnesses.as_ref(),
        &PlotStyle {
            title: Some(format!("{:?}: {:?}, margin {:.6}", cert.theorem, cert.verdict, cert.margin)),
            ..Default::default()
        },
    )
}

fn write_certificate(outputs: &mut Outputs, cert: &Certificate, svg: String) -> Result<()> {
    cert.validate()?;
    outputs.add("certificate.json", cert.to_json()?);
    outputs.add("certificate.svg", svg);
    Ok(())
}

fn execute(cmd: &Command) -> Result<i32> {
    let common = cmd.common();
    let mut cfg = match &common.config {
        Some(p) => RunConfig::from_path(p)?,
        None => RunConfig::default(),
    };
    cfg.apply(common)?;
    let mut out = Outputs::new(&common.out);
    let mut exit = EXIT_OK;

    match cmd {
        Command::SrgSoft { system, .. } | Command::SrgHard { system, .. } => {
            let spec = load_system(system)?;
            let hard = matches!(cmd, Command::SrgHard { .. });
            let cloud = if hard {
                sample_hard_srg(&spec, &cfg.excitation)?
            } else {
                sample_soft_srg(&spec, &cfg.excitation)?
            };
            let stem = if hard { "srg_hard" } else { "srg_soft" };
            let svg = render_svg(
                &[Layer::Cloud {
                    label: format!("{} SRG ({} points)", if hard { "hard" } else { "soft" }, cloud.len()),
                    cloud: &cloud,
                }],
                None,
                &PlotStyle::default(),
            )?;
            out.add(&format!("{stem}.json"), cloud.to_json()?);
            out.add(&format!("{stem}.csv"), cloud_csv(&cloud)?);
            out.add(&format!("{stem}.svg"), svg);
        }
        Command::Region {
            region, transforms, cloud, ..
        } => {
            let mut r = load_region(region)?;
            for t in transforms {
                r = match t.as_str() {
                    "invert" => invert_region(&r)?,
                    "negate" => negate_region(&r)?,
                    other => match other.strip_prefix("scale:").map(str::parse::<f64>) {
                        Some(Ok(tau)) => scale_region(&r, tau)?,
                        _ => return Err(Error::Parse(format!("unknown transform `{other}`"))),
                    },
                };
            }
            let cloud = cloud.as_deref().map(load_cloud).transpose()?;
            let mut layers = vec![Layer::Region {
                label: "region".into(),
                region: &r,
            }];
            if let Some(c) = &cloud {
                out.add("containment.json", serde_json::to_vec_pretty(&containment_report(c, &r)?)?);
                layers.push(Layer::Cloud {
                    label: "cloud".into(),
                    cloud: c,
                });
            }
            let svg = render_svg(&layers, None, &PlotStyle::default())?;
            out.add("region.json", serde_json::to_vec_pretty(&r)?);
            out.add("region.svg", svg);
        }
        Command::CertHard {
            p,
            inv_c,
            invert_c,
            premises,
            ..
        } => {
            let p = load_evidence(p)?;
            let mut c = load_evidence(inv_c)?;
            if *invert_c {
                c = invert_evidence(c)?;
            }
            let list = load_checklist(premises)?;
            let cert = certify_hard(&p, &c, &list, &cfg.certify)?;
            let svg = certificate_svg(&p, &c, &cert)?;
            write_certificate(&mut out, &cert, svg)?;
            exit = verdict_exit(cert.verdict);
        }
        Command::CertSoft {
            p,
            inv_c,
            invert_c,
            tau_grid,
            premises,
            ..
        } => {
            let p = load_evidence(p)?;
            let mut c = load_evidence(inv_c)?;
            if *invert_c {
                c = invert_evidence(c)?;
            }
            let list = load_checklist(premises)?;
            let grid = tau_grid.clone().unwrap_or_else(|| cfg.tau_grid.clone());
            let cert = certify_soft(&p, &c, &grid, &list, &cfg.certify)?;
            // Draw the inverse C side at the critical τ, where the witnesses live.
            let tau = cert.critical_tau.unwrap_or(1.0);
            let shown = match &c {
                Evidence::Region(r) => Evidence::Region(scale_region(r, 1.0 / tau)?),
                Evidence::Cloud(cl) => Evidence::Cloud(scale_cloud(cl, 1.0 / tau)?),
            };
            let svg = certificate_svg(&p, &shown, &cert)?;
            write_certificate(&mut out, &cert, svg)?;
            exit = verdict_exit(cert.verdict);
        }
        Command::CertPassivity {
            system_p,
            system_c,
            delta,
            epsilon,
            sample_evidence,
            premises,
            ..
        } => {
            let sp = load_system(system_p)?;
            let sc = load_system(system_c)?;
            let (delta, epsilon) = match (delta, epsilon, cfg.passivity) {
                (Some(d), Some(e), _) => (*d, *e),
                (d, e, Some(ix)) => (d.unwrap_or(ix.delta), e.unwrap_or(ix.epsilon)),
                _ => return Err(Error::Config("passivity indices need --delta and --epsilon or a passivity section".into())),
            };
            let list = load_checklist(premises)?;
            let evidence = if *sample_evidence {
                PassivityEvidence {
                    p_hard: Some(sample_hard_srg(&sp, &cfg.excitation)?),
                    neg_c_hard: Some(sample_hard_srg(&OperatorSpec::negate(sc.clone()), &cfg.excitation)?),
                }
            } else {
                PassivityEvidence::default()
            };
            let mut opts = cfg.passivity_options;
            opts.solver = cfg.solver;
            let cert = certify_passivity_corollary(&sp, &sc, delta, epsilon, &evidence, &list, &opts)?;
            let d = Region::sector_disk(delta, epsilon)?;
            let lhp = Region::half_plane(0.0, crate::regions::Side::Le)?;
            let mut layers = vec![
                Layer::Region {
                    label: format!("D({delta}, {epsilon})"),
                    region: &d,
                },
                Layer::Region {
                    label: "inverse C bound".into(),
                    region: &lhp,
                },
            ];
            if let Some(c) = &evidence.p_hard {
                layers.push(Layer::Cloud {
                    label: "P hard cloud".into(),
                    cloud: c,
                });
                out.add("p_hard.json", c.to_json()?);
            }
            if let Some(c) = &evidence.neg_c_hard {
                out.add("neg_c_hard.json", c.to_json()?);
            }
            let svg = render_svg(&layers, cert.witnesses.as_ref(), &PlotStyle::default())?;
            write_certificate(&mut out, &cert, svg)?;
            exit = verdict_exit(cert.verdict);
        }
        Command::Simulate {
            system_p,
            system_c,
            input,
            step,
            ..
        } => {
            let sp = load_system(system_p)?;
            let sc = load_system(system_c)?;
            let d1 = match (input, step) {
                (Some(path), _) => {
                    let file = std::fs::File::open(path)?;
                    SampledSignal::read_csv(file).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?
                }
                (None, Some(a)) => SampledSignal::from_fn(
                    cfg.excitation.dt,
                    cfg.excitation.samples(),
                    sp.io_dimension()?,
                    |_, _| *a,
                )?,
                (None, None) => return Err(Error::Config("simulate needs --input or --step".into())),
            };
            let trace = solve_feedback(&sp, &sc, &d1, &cfg.solver)?;
            let mut buf = Vec::new();
            trace.write_csv(&mut buf)?;
            out.add("trace.csv", buf);
        }
        Command::GainEstimate { system_p, system_c, .. } => {
            let sp = load_system(system_p)?;
            let sc = load_system(system_c)?;
            let mut g = cfg.gain.clone();
            g.solver = cfg.solver;
            let est = estimate_loop_incremental_gain(&sp, &sc, &g)?;
            out.add("gain_estimate.json", serde_json::to_vec_pretty(&est)?);
        }
        Command::Plot {
            cloud,
            region,
            certificate,
            title,
            ..
        } => {
            let clouds = cloud.iter().map(|p| load_cloud(p)).collect::<Result<Vec<_>>>()?;
            let regions = region.iter().map(|p| load_region(p)).collect::<Result<Vec<_>>>()?;
            let witnesses: Option<Witnesses> = match certificate {
                Some(p) => Certificate::from_json(&read(p)?)
                    .map_err(|e| Error::Parse(format!("{}: {e}", p.display())))?
                    .witnesses,
                None => None,
            };
            let mut layers = Vec::new();
            for (r, path) in regions.iter().zip(region) {
                layers.push(Layer::Region {
                    label: file_label(path),
                    region: r,
                });
            }
            for (c, path) in clouds.iter().zip(cloud) {
                layers.push(Layer::Cloud {
                    label: file_label(path),
                    cloud: c,
                });
            }
            let style = PlotStyle {
                title: title.clone(),
                ..Default::default()
            };
            out.add("plot.svg", render_svg(&layers, witnesses.as_ref(), &style)?);
        }
    }

    let manifest = serde_json::json!({
        "command": cmd.name(),
        "seed": cfg.seed,
        "exit_code": exit,
        "invocation": cmd,
        "config": cfg,
    });
    out.commit(&manifest)?;
    Ok(exit)
}

fn file_label(p: &Path) -> String {
    p.file_stem().map_or_else(|| p.display().to_string(), |s| s.to_string_lossy().into_owned())
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| Error::Config(format!("{THREADS_ENV} must be a positive integer, got `{raw}`")))?;
    // A second call in the same process (tests) keeps the first pool.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = configure_threads().and_then(|_| execute(&cli.command));
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("srg-lab {}: error: {e}", cli.command.name());
            EXIT_ERROR
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strict_config_rejects_unknown_keys() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.json");
        std::fs::write(&path, "{\n  \"excitation\": {\"tail_tolerence\": 1e-3}\n}").unwrap();
        let err = RunConfig::from_path(&path).unwrap_err().to_string();
        assert!(err.contains("tail_tolerence"), "{err}");
        assert!(err.contains("cfg.json:2:"), "{err}");
    }

    #[test]
    fn default_config_round_trips() {
        let cfg = RunConfig::default();
        let text = serde_json::to_string(&cfg).unwrap();
        let back: RunConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn assumption_names_parse() {
        assert_eq!(parse_assumption("p_stable").unwrap(), Assumption::PStable);
        assert!(parse_assumption("p_stabel").is_err());
    }

    #[test]
    fn seed_override_reaches_every_section() {
        let mut cfg = RunConfig::default();
        let common = Common {
            out: ".".into(),
            config: None,
            seed: Some(42),
            margin_floor: Some(1e-3),
            ensemble_size: None,
        };
        cfg.apply(&common).unwrap();
        assert_eq!(cfg.seed, Some(42));
        assert_eq!(cfg.excitation.seed, 42);
        assert_eq!(cfg.gain.excitation.seed, 42);
        assert_eq!(cfg.passivity_options.certify.margin_floor, 1e-3);
    }
}
