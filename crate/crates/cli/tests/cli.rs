use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use bdmst_core::metrics::{read_results_csv, ExtReal};

fn bdmst(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bdmst"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("cfg.toml");
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

const SMALL: &str = r#"
[instances]
labels = ["m4ver1/w2"]
[sweep]
s_p = [0.3]
t_p = [1.0]
jf = [1.5]
baseline = false
[sampling]
reads = 40
gauges = 4
seed = 11
"#;

fn run_small(dir: &Path, extra: &str) -> Output {
    let cfg = write_config(dir, &format!("output_dir = {:?}\n{SMALL}{extra}", dir.join("out")));
    bdmst(&["run", "--config", &cfg])
}

#[test]
fn one_instance_one_point_gives_one_row_and_reruns_identically() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let o = run_small(a.path(), "");
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read(a.path().join("out/results.csv")).unwrap();
    let rows = read_results_csv(text.as_slice()).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!((rows[0].s_p, rows[0].t_p, rows[0].reads), (Some(0.3), 1.0, 40));
    assert!(run_small(b.path(), "").status.success());
    assert_eq!(text, fs::read(b.path().join("out/results.csv")).unwrap());
}

#[test]
fn resumed_runs_match_fresh_ones() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        &format!(
            "output_dir = {:?}\n{}",
            dir.path().join("out"),
            SMALL.replace("jf = [1.5]", "jf = [1.5, 2.0]")
        ),
    );
    assert!(bdmst(&["run", "--config", &cfg]).status.success());
    let fresh = fs::read(dir.path().join("out/results.csv")).unwrap();

    // drop one finished entry as if the run had been interrupted
    let mpath = dir.path().join("out/manifest.json");
    let mut m: serde_json::Value = serde_json::from_str(&fs::read_to_string(&mpath).unwrap()).unwrap();
    let entries = m["entries"].as_object_mut().unwrap();
    assert_eq!(entries.len(), 2);
    let last = entries.keys().next_back().unwrap().clone();
    entries.remove(&last);
    fs::write(&mpath, serde_json::to_string(&m).unwrap()).unwrap();
    fs::remove_file(dir.path().join("out/results.csv")).unwrap();

    let o = bdmst(&["run", "--config", &cfg]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(fresh, fs::read(dir.path().join("out/results.csv")).unwrap());

    // a changed configuration is not silently mixed into the old manifest
    let o = bdmst(&["run", "--config", &cfg, "--seed", "12"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("--fresh"));
}

#[test]
fn imported_reads_reproduce_sampled_results() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run_small(dir.path(), "save_reads = true\n").status.success());
    let sampled = read_results_csv(fs::read(dir.path().join("out/results.csv")).unwrap().as_slice()).unwrap();
    let other = tempfile::tempdir().unwrap();
    let extra = format!("sampler = \"import\"\nimport_dir = {:?}\n", dir.path().join("out/reads"));
    let o = run_small(other.path(), &extra);
    assert!(o.status.success(), "{}", stderr(&o));
    let imported = read_results_csv(fs::read(other.path().join("out/results.csv")).unwrap().as_slice()).unwrap();
    assert_eq!(sampled, imported);
}

#[test]
fn failed_grid_points_are_recorded_and_set_the_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        &format!("output_dir = {:?}\n{SMALL}[hardware]\nsize = 1\n", dir.path().join("out")),
    );
    let o = bdmst(&["run", "--config", &cfg]);
    assert!(!o.status.success());
    let errors = fs::read_to_string(dir.path().join("out/errors.csv")).unwrap();
    assert!(errors.starts_with("instance,jf,error\n"));
    assert!(errors.contains("m4ver1/w2"));
}

#[test]
fn config_errors_name_the_offending_key() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("[sampling]\nreads = 10\ngauges = 3\n", "sampling.gauges"),
        ("[sweep]\njf = []\n", "sweep.jf"),
        ("[sweep]\ns_p = [1.5]\n", "sweep.s_p"),
        ("[hardware]\ntopology = \"zephyr\"\n", "hardware.topology"),
        ("[sampling]\nsampler = \"import\"\n", "sampling.import_dir"),
        ("[sampling]\nread = 10\n", "read"),
    ];
    for (body, key) in cases {
        let cfg = write_config(dir.path(), body);
        let o = bdmst(&["run", "--config", &cfg]);
        assert!(!o.status.success());
        assert!(stderr(&o).contains(key), "{key}: {}", stderr(&o));
    }
}

#[test]
fn toy_gap_traces_are_written_per_chain_strength() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = bdmst(&["spectrum", "gap-trace", "--jf", "2,4,8", "--grid", "40", "--out", out]);
    assert!(o.status.success(), "{}", stderr(&o));
    let traces: Vec<_> = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.starts_with("trace_"))
        .collect();
    assert_eq!(traces.len(), 3);
    let first = fs::read_to_string(dir.path().join("trace_0_jf2.csv")).unwrap();
    assert_eq!(first.lines().next().unwrap(), "s,E0,E1,E2,E3,gap,PL0,PL1,j_ferro");
    assert_eq!(first.lines().count(), 40);
}

#[test]
fn missing_schedule_files_are_reported() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("none.csv");
    let o = bdmst(&[
        "spectrum",
        "gap-trace",
        "--schedule",
        missing.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("cannot open schedule file"), "{}", stderr(&o));
}

fn pause_ground(dir: &Path, grid: &str) -> f64 {
    let out = dir.join(grid);
    let o = bdmst(&[
        "spectrum", "pause", "--jf", "2", "--sp", "0.8", "--grid", grid, "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(out.join("pause.csv")).unwrap();
    let row = text.lines().nth(2).unwrap();
    row.split(',').nth(3).unwrap().parse().unwrap()
}

#[test]
fn pause_populations_converge_under_grid_refinement() {
    let dir = tempfile::tempdir().unwrap();
    let coarse = pause_ground(dir.path(), "126");
    let fine = pause_ground(dir.path(), "251");
    let finer = pause_ground(dir.path(), "501");
    assert!((fine - finer).abs() <= (coarse - fine).abs() + 1e-9);
    assert!((fine - finer).abs() < 1e-2, "{fine} vs {finer}");
}

#[test]
fn single_row_reports_echo_their_input() {
    let dir = tempfile::tempdir().unwrap();
    let results = dir.path().join("results.csv");
    fs::write(
        &results,
        "# provenance\ninstance,t_a,s_p,t_p,jf,gauges,reads,p_success,tts\n\
         m4ver1/w2,1.0,,0.0,1.5,4,40,0.5,6.643856189774724\n",
    )
    .unwrap();
    let out = dir.path().join("rep");
    let o = bdmst(&[
        "report", "--results", results.to_str().unwrap(), "--out", out.to_str().unwrap(),
        "--bootstrap", "50", "--seed", "9",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
    assert!(summary.starts_with("# bootstrap B=50 seed=9\nmetric,median,p35,p65,B,seed\n"));
    assert!(summary.contains("\"tts[t_a=1,jf=1.5]\",6.643856189774724,6.643856189774724,6.643856189774724,50,9"));
}

#[test]
fn infinite_tts_survives_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let results = dir.path().join("results.csv");
    fs::write(
        &results,
        "instance,t_a,s_p,t_p,jf,gauges,reads,p_success,tts\n\
         a/w1,1.0,,0.0,1.5,4,40,0.5,6.643856189774724\n\
         a/w1,1.0,0.3,1.0,1.5,4,40,0,inf\n",
    )
    .unwrap();
    let out = dir.path().join("rep");
    let o = bdmst(&[
        "report", "--results", results.to_str().unwrap(), "--out", out.to_str().unwrap(),
        "--bootstrap", "20",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let delta = fs::read_to_string(out.join("delta.csv")).unwrap();
    assert_eq!(delta.lines().nth(1).unwrap(), "1,0.3,1,1.5,1.5,1,-inf,-inf,-inf,-inf");
    let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
    assert!(summary.contains(",inf,inf,inf,20,1"));
    let medians: Vec<ExtReal> = summary
        .lines()
        .skip(2)
        .map(|l| l.rsplit(',').nth(3).unwrap().parse().unwrap())
        .collect();
    assert!(medians.contains(&ExtReal::NegInf));
}
