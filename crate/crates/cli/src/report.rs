use std::collections::HashMap;
use std::fs;
use std::path::Path;

use anyhow::{bail, ensure, Context, Result};
use bdmst_core::metrics::{
    bootstrap_percentiles, delta_tts, difference_of_medians, median, median_of_differences,
    read_results_csv, write_summary_csv, ExtReal, RunResult,
};

use crate::output::write_atomic;

pub struct ReportOptions<'a> {
    pub results: &'a Path,
    pub out: &'a Path,
    pub bootstrap: usize,
    pub seed: u64,
    /// Compare every pause point against the no-pause runs at this chain strength
    /// instead of the pause point's own.
    pub baseline_jf: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Point {
    t_a: f64,
    s_p: Option<f64>,
    t_p: f64,
    jf: f64,
}

impl Point {
    fn of(r: &RunResult) -> Point {
        Point {
            t_a: r.t_a,
            s_p: r.s_p,
            t_p: r.t_p,
            jf: r.jf,
        }
    }

    fn name(&self) -> String {
        match self.s_p {
            Some(s) => format!("t_a={},s_p={s},t_p={},jf={}", self.t_a, self.t_p, self.jf),
            None => format!("t_a={},jf={}", self.t_a, self.jf),
        }
    }
}

/// Groups rows by grid point, keeping first-appearance order.
fn group(rows: &[RunResult]) -> Vec<(Point, Vec<&RunResult>)> {
    let mut out: Vec<(Point, Vec<&RunResult>)> = Vec::new();
    for r in rows {
        let p = Point::of(r);
        match out.iter_mut().find(|(q, _)| *q == p) {
            Some((_, v)) => v.push(r),
            None => out.push((p, vec![r])),
        }
    }
    out
}

fn fmt(x: ExtReal) -> String {
    x.to_string()
}

pub fn cmd_report(opts: &ReportOptions) -> Result<()> {
    ensure!(opts.bootstrap > 0, "--bootstrap must be at least 1");
    let file = fs::File::open(opts.results)
        .with_context(|| format!("cannot open {}", opts.results.display()))?;
    let rows = read_results_csv(file).with_context(|| format!("reading {}", opts.results.display()))?;
    if rows.is_empty() {
        bail!("{} has no result rows", opts.results.display());
    }
    let groups = group(&rows);

    let mut summaries = Vec::new();
    for (p, rs) in &groups {
        let tts: Vec<ExtReal> = rs.iter().map(|r| r.tts).collect();
        let ps: Vec<ExtReal> = rs.iter().map(|r| ExtReal::Finite(r.p_success)).collect();
        summaries.push(bootstrap_percentiles(&format!("tts[{}]", p.name()), &tts, opts.bootstrap, opts.seed)?);
        summaries.push(bootstrap_percentiles(&format!("p_success[{}]", p.name()), &ps, opts.bootstrap, opts.seed)?);
    }

    let baselines: HashMap<(u64, u64), HashMap<&str, ExtReal>> = groups
        .iter()
        .filter(|(p, _)| p.s_p.is_none())
        .map(|(p, rs)| {
            let m = rs.iter().map(|r| (r.instance.as_str(), r.tts)).collect();
            ((p.t_a.to_bits(), p.jf.to_bits()), m)
        })
        .collect();

    let mut delta = csv::Writer::from_writer(Vec::new());
    delta.write_record([
        "t_a",
        "s_p",
        "t_p",
        "jf",
        "baseline_jf",
        "instances",
        "mod_delta_tts",
        "dom_delta_tts",
        "mod_delta_ratio",
        "dom_delta_ratio",
    ])?;
    for (p, rs) in groups.iter().filter(|(p, _)| p.s_p.is_some()) {
        let bjf = opts.baseline_jf.unwrap_or(p.jf);
        let Some(base) = baselines.get(&(p.t_a.to_bits(), bjf.to_bits())) else {
            eprintln!("warning: no baseline at t_a={} jf={bjf} for {}", p.t_a, p.name());
            continue;
        };
        let (mut no_pause, mut pause) = (Vec::new(), Vec::new());
        for r in rs {
            if let Some(&b) = base.get(r.instance.as_str()) {
                no_pause.push(b);
                pause.push(r.tts);
            }
        }
        if pause.is_empty() {
            continue;
        }
        let d: Vec<_> = no_pause.iter().zip(&pause).map(|(&a, &b)| delta_tts(a, b)).collect();
        let deltas: Vec<ExtReal> = d.iter().map(|x| x.delta).collect();
        let ratios: Vec<ExtReal> = d.iter().map(|x| x.ratio).collect();
        let dom = difference_of_medians(&no_pause, &pause)?;
        let dom_ratio = delta_tts(median(&no_pause)?, median(&pause)?).ratio;
        delta.write_record([
            p.t_a.to_string(),
            p.s_p.map_or(String::new(), |s| s.to_string()),
            p.t_p.to_string(),
            p.jf.to_string(),
            bjf.to_string(),
            pause.len().to_string(),
            fmt(median_of_differences(&no_pause, &pause)?),
            fmt(dom),
            fmt(median(&ratios)?),
            fmt(dom_ratio),
        ])?;
        let name = p.name();
        summaries.push(bootstrap_percentiles(&format!("delta_tts[{name}]"), &deltas, opts.bootstrap, opts.seed)?);
        summaries.push(bootstrap_percentiles(&format!("delta_ratio[{name}]"), &ratios, opts.bootstrap, opts.seed)?);
    }

    fs::create_dir_all(opts.out).with_context(|| format!("creating {}", opts.out.display()))?;
    let mut text = format!("# bootstrap B={} seed={}\n", opts.bootstrap, opts.seed).into_bytes();
    write_summary_csv(&summaries, &mut text)?;
    write_atomic(&opts.out.join("summary.csv"), &text)?;
    write_atomic(&opts.out.join("delta.csv"), &delta.into_inner()?)?;
    Ok(())
}
