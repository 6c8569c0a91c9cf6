//! Command-line front end: spectra and steady-state branches as CSV, with
//! pole/residue and feature reports as JSON sidecars.

use clap::{Args, Parser, Subcommand};

use eomq::cli;
use eomq::config::{defaults, RunConfig, ScanConfig};

#[derive(Parser)]
#[command(
    name = "eomq",
    about = "Electro-opto-mechanical cavity + qubit: bistability, probe response, displacement spectra",
    version
)]
struct CliArgs {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct CommonOpts {
    /// JSON configuration file; flags override its values.
    #[arg(long)]
    config: Option<String>,
    /// CSV output path (omit to skip the CSV).
    #[arg(long)]
    out_csv: Option<String>,
    /// JSON output path (omit to print to stdout).
    #[arg(long)]
    out_json: Option<String>,
    /// Scan lower bound.
    #[arg(long)]
    x_min: Option<f64>,
    /// Scan upper bound.
    #[arg(long)]
    x_max: Option<f64>,
    /// Scan point count.
    #[arg(long)]
    points: Option<usize>,
    /// CSV significant digits (6..=17).
    #[arg(long)]
    precision: Option<usize>,

    #[command(flatten)]
    params: ParamOpts,
}

/// Parameter overrides; names mirror the config keys.
#[derive(Args, Clone, Default)]
struct ParamOpts {
    #[arg(long)]
    delta_a_eff: Option<f64>,
    #[arg(long)]
    delta_c: Option<f64>,
    #[arg(long)]
    omega_q: Option<f64>,
    #[arg(long)]
    g_om: Option<f64>,
    #[arg(long)]
    g_em: Option<f64>,
    #[arg(long)]
    g: Option<f64>,
    #[arg(long)]
    kappa_a: Option<f64>,
    #[arg(long)]
    kappa_c: Option<f64>,
    #[arg(long)]
    gamma_b: Option<f64>,
    #[arg(long)]
    gamma_d: Option<f64>,
    #[arg(long)]
    sigma_z: Option<f64>,
    #[arg(long)]
    g_om_bare: Option<f64>,
    #[arg(long)]
    e_p: Option<f64>,
    #[arg(long)]
    e_m: Option<f64>,
    /// Force the red-sideband configuration.
    #[arg(long)]
    red_sideband: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Steady-state photon-number branches over the pump amplitude.
    Bistability(CommonOpts),
    /// Probe absorption/dispersion spectrum with pole/residue analysis.
    Probe(CommonOpts),
    /// Mechanical displacement spectrum with peak extraction.
    Nms(CommonOpts),
    /// Feature extraction and comparison against closed-form predictions.
    Features(CommonOpts),
    /// Run the built-in oracle suites.
    Check(CommonOpts),
}

fn load_config(opts: &CommonOpts, default_scan: ScanConfig) -> Result<RunConfig, i32> {
    let mut cfg = match &opts.config {
        Some(path) => RunConfig::from_file(path).map_err(|e| {
            eprintln!("error: {e}");
            cli::EXIT_CONFIG
        })?,
        None => RunConfig::default(),
    };
    let o = &opts.params;
    let overrides = [
        o.delta_a_eff,
        o.delta_c,
        o.omega_q,
        o.g_om,
        o.g_em,
        o.g,
        o.kappa_a,
        o.kappa_c,
        o.gamma_b,
        o.gamma_d,
        o.sigma_z,
        o.g_om_bare,
        o.e_p,
        o.e_m,
    ];
    if overrides.iter().any(Option::is_some) || o.red_sideband {
        let mut p = cfg.params.unwrap_or_default();
        p.delta_a_eff = o.delta_a_eff.unwrap_or(p.delta_a_eff);
        p.delta_c = o.delta_c.unwrap_or(p.delta_c);
        p.omega_q = o.omega_q.unwrap_or(p.omega_q);
        p.g_om = o.g_om.unwrap_or(p.g_om);
        p.g_em = o.g_em.unwrap_or(p.g_em);
        p.g = o.g.unwrap_or(p.g);
        p.kappa_a = o.kappa_a.unwrap_or(p.kappa_a);
        p.kappa_c = o.kappa_c.unwrap_or(p.kappa_c);
        p.gamma_b = o.gamma_b.unwrap_or(p.gamma_b);
        p.gamma_d = o.gamma_d.unwrap_or(p.gamma_d);
        p.sigma_z = o.sigma_z.unwrap_or(p.sigma_z);
        p.g_om_bare = o.g_om_bare.unwrap_or(p.g_om_bare);
        p.e_p = o.e_p.unwrap_or(p.e_p);
        p.e_m = o.e_m.unwrap_or(p.e_m);
        cfg.params = Some(p);
        cfg.red_sideband |= o.red_sideband;
    }
    cli::apply_scan_overrides(&mut cfg, default_scan, opts.x_min, opts.x_max, opts.points);
    if opts.out_csv.is_some() {
        cfg.output.csv_path = opts.out_csv.clone();
    }
    if opts.out_json.is_some() {
        cfg.output.json_path = opts.out_json.clone();
    }
    if opts.precision.is_some() {
        cfg.output.precision = opts.precision;
    }
    Ok(cfg)
}

fn main() {
    let args = CliArgs::parse();
    let code = match args.command {
        Command::Bistability(opts) => match load_config(&opts, defaults::BISTABILITY) {
            Ok(cfg) => cli::run_bistability(&cfg),
            Err(code) => code,
        },
        Command::Probe(opts) => match load_config(&opts, defaults::PROBE) {
            Ok(cfg) => cli::run_probe(&cfg),
            Err(code) => code,
        },
        Command::Nms(opts) => match load_config(&opts, defaults::NMS) {
            Ok(cfg) => cli::run_nms(&cfg),
            Err(code) => code,
        },
        Command::Features(opts) => match load_config(&opts, defaults::PROBE) {
            Ok(cfg) => cli::run_features(&cfg),
            Err(code) => code,
        },
        Command::Check(opts) => match load_config(&opts, defaults::PROBE) {
            Ok(cfg) => {
                let cfg_opt = if opts.config.is_some() || cfg.params.is_some() {
                    Some(&cfg)
                } else {
                    None
                };
                cli::run_check(cfg_opt)
            }
            Err(code) => code,
        },
    };
    std::process::exit(code);
}
