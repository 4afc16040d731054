use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{ensure, Context, Result};
use bdmst_core::qsim::{
    gap_trace, pause_relax_evolve, triangle_toy, AnnealSchedule, RelaxParams, ScheduleCurves,
};
use clap::{Args, Subcommand};

use crate::output::write_atomic;

#[derive(Debug, Subcommand)]
pub enum SpectrumCommand {
    /// Low-lying spectrum of the embedded triangle toy for several chain strengths.
    GapTrace(GapTraceArgs),
    /// Final ground-state population of the toy under thermal relaxation, with and
    /// without a pause.
    Pause(PauseArgs),
}

#[derive(Debug, Args)]
pub struct ToyArgs {
    /// Local fields of the three logical spins.
    #[arg(long, value_delimiter = ',', num_args = 3, default_values_t = [0.2, 0.4, 0.6])]
    pub fields: Vec<f64>,
    /// CSV with columns `s,A,B`; the linear schedule when omitted.
    #[arg(long)]
    pub schedule: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct GapTraceArgs {
    #[command(flatten)]
    pub toy: ToyArgs,
    #[arg(long, value_delimiter = ',', default_values_t = [2.0, 4.0, 8.0])]
    pub jf: Vec<f64>,
    /// Number of intervals; the trace covers s = 1/N .. (N-1)/N.
    #[arg(long, default_value_t = 400)]
    pub grid: usize,
    /// Levels per grid point.
    #[arg(long, default_value_t = 4)]
    pub k: usize,
}

#[derive(Debug, Args)]
pub struct PauseArgs {
    #[command(flatten)]
    pub toy: ToyArgs,
    #[arg(long, value_delimiter = ',', default_values_t = [2.0, 8.0])]
    pub jf: Vec<f64>,
    /// Pause locations; a no-pause row is always written too.
    #[arg(long, value_delimiter = ',', required = true)]
    pub sp: Vec<f64>,
    #[arg(long, default_value_t = 10.0)]
    pub tp: f64,
    #[arg(long, default_value_t = 5.0)]
    pub ta: f64,
    #[arg(long)]
    pub temp: Option<f64>,
    #[arg(long)]
    pub gamma0: Option<f64>,
    #[arg(long)]
    pub k: Option<usize>,
    /// Points of the base ramp grid.
    #[arg(long)]
    pub grid: Option<usize>,
}

fn fields(args: &ToyArgs) -> Result<[f64; 3]> {
    ensure!(args.fields.len() == 3, "--fields needs exactly three values");
    Ok([args.fields[0], args.fields[1], args.fields[2]])
}

fn schedule(args: &ToyArgs, t_a: f64) -> Result<AnnealSchedule> {
    let mut sch = AnnealSchedule::new(t_a)?;
    if let Some(path) = &args.schedule {
        let file = fs::File::open(path)
            .with_context(|| format!("cannot open schedule file {}", path.display()))?;
        let curves = ScheduleCurves::from_csv(file)
            .with_context(|| format!("invalid schedule file {}", path.display()))?;
        sch = sch.with_curves(curves);
    }
    Ok(sch)
}

pub fn cmd_spectrum(cmd: &SpectrumCommand) -> Result<()> {
    match cmd {
        SpectrumCommand::GapTrace(a) => gap_traces(a),
        SpectrumCommand::Pause(a) => pause_scan(a),
    }
}

fn create_out(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn gap_traces(a: &GapTraceArgs) -> Result<()> {
    ensure!(a.grid >= 2, "--grid must be at least 2");
    ensure!(!a.jf.is_empty(), "--jf is empty");
    let sch = schedule(&a.toy, 1.0)?;
    let base = triangle_toy(fields(&a.toy)?, a.jf[0])?;
    let s_grid: Vec<f64> = (1..a.grid).map(|i| i as f64 / a.grid as f64).collect();
    let traces = gap_trace(&base, &a.jf, &sch, &s_grid, a.k)?;
    create_out(&a.toy.out)?;
    let mut summary = csv::Writer::from_writer(Vec::new());
    summary.write_record(["j_ferro", "s_star", "min_gap"])?;
    for (i, t) in traces.iter().enumerate() {
        let mut buf = Vec::new();
        t.write_csv(&mut buf)?;
        write_atomic(&a.toy.out.join(format!("trace_{i}_jf{}.csv", t.j_ferro)), &buf)?;
        let (s, g) = t.min_gap();
        summary.write_record([t.j_ferro.to_string(), s.to_string(), g.to_string()])?;
    }
    write_atomic(&a.toy.out.join("min_gap.csv"), &summary.into_inner()?)
}

fn pause_scan(a: &PauseArgs) -> Result<()> {
    let d = RelaxParams::default();
    let params = RelaxParams {
        temperature: a.temp.unwrap_or(d.temperature),
        gamma0: a.gamma0.unwrap_or(d.gamma0),
        k: a.k.unwrap_or(d.k),
        grid_points: a.grid.unwrap_or(d.grid_points),
        ..d
    };
    let h = fields(&a.toy)?;
    let base = schedule(&a.toy, a.ta)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["jf", "s_p", "t_p", "p_ground", "max_leakage", "leakage_exceeded"])?;
    for &jf in &a.jf {
        let toy = triangle_toy(h, jf)?;
        let pauses = std::iter::once(None).chain(a.sp.iter().map(|&s| Some(s)));
        for sp in pauses {
            let sch = match sp {
                Some(s) => base.clone().with_pause(s, a.tp)?,
                None => base.clone(),
            };
            let r = pause_relax_evolve(&toy, &sch, &params)
                .with_context(|| format!("jf {jf}, s_p {sp:?}"))?;
            w.write_record([
                jf.to_string(),
                sp.map_or(String::new(), |s| s.to_string()),
                sp.map_or("0".into(), |_| a.tp.to_string()),
                r.p_ground.to_string(),
                r.max_leakage.to_string(),
                r.leakage_exceeded.to_string(),
            ])?;
        }
    }
    create_out(&a.toy.out)?;
    write_atomic(&a.toy.out.join("pause.csv"), &w.into_inner()?)
}
