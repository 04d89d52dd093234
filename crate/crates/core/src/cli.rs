//! The `zzup` command line.
//!
//! Exit codes: 0 ok, 1 internal check failed, 2 invalid input, 3 op not
//! supported by the chosen engine.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};

use crate::barcode::Interval;
use crate::dpc::{self, Trajectories, VineyardOptions};
use crate::error::Error;
use crate::fzz::{barcode_from_scratch, FzzState};
use crate::io;
use crate::rep_updates::{OpResult, PersistenceState, VineEvent};

#[derive(Parser, Debug)]
#[command(name = "zzup", version, about = "Zigzag persistence barcodes under atomic filtration edits")]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Barcode of a filtration file, one `dim birth death` line per interval.
    Barcode { file: PathBuf },
    /// Applies an op script and prints the vines each op moves, then the barcode.
    Update {
        file: PathBuf,
        script: PathBuf,
        #[arg(long, value_enum, default_value_t = Engine::Rep)]
        engine: Engine,
        /// Compare with the from-scratch barcode after every op.
        #[arg(long)]
        check: bool,
    },
    /// Vineyard of a point-cloud CSV over decreasing distance thresholds.
    Vineyard {
        csv: PathBuf,
        #[arg(long, default_value_t = 2)]
        dim_cap: usize,
        /// Compare every k-th band with the from-scratch barcode; 0 never.
        #[arg(long, default_value_t = 0)]
        check_every: usize,
    },
    /// Op counts and timings of a vineyard run against from-scratch barcodes.
    Bench {
        /// Point-cloud CSV; without it a random walk is generated.
        #[arg(long)]
        points_csv: Option<PathBuf>,
        #[arg(long, default_value_t = 8)]
        points: usize,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        /// Largest per-sample move of a random walk coordinate.
        #[arg(long, default_value_t = 0.1)]
        step: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        dim_cap: usize,
        /// Omit wall-clock columns so the output is reproducible.
        #[arg(long)]
        no_times: bool,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Engine {
    Rep,
    Fzz,
    Both,
}

#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let code = match e {
            Error::UnsupportedOnFzzPath { .. } => 3,
            _ => 2,
        };
        Failure { code, msg: e.to_string() }
    }
}

fn internal(msg: String) -> Failure {
    Failure { code: 1, msg }
}

fn read(path: &PathBuf) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure { code: 2, msg: format!("{}: {e}", path.display()) })
}

fn iv(i: &Interval) -> String {
    format!("{} {} {}", i.dim, i.birth, i.death)
}

fn vine_lines(out: &mut String, r: &OpResult) {
    for v in &r.vines {
        let _ = match v {
            VineEvent::Kept { vine, from, to } if from == to => Ok(()),
            VineEvent::Kept { vine, from, to } => writeln!(out, "  moved {vine} {} -> {}", iv(from), iv(to)),
            VineEvent::Created { vine, to } => writeln!(out, "  born {vine} {}", iv(to)),
            VineEvent::Destroyed { vine, from } => writeln!(out, "  died {vine} {}", iv(from)),
        };
    }
}

pub fn execute(cli: &Cli) -> Result<String, Failure> {
    let mut out = String::new();
    match &cli.cmd {
        Cmd::Barcode { file } => {
            let f = io::parse_filtration(&read(file)?)?;
            out.push_str(&barcode_from_scratch(&f)?.to_string());
        }
        Cmd::Update { file, script, engine, check } => {
            let f = io::parse_filtration(&read(file)?)?;
            let script = io::parse_script(&read(script)?)?;
            let use_rep = *engine != Engine::Fzz;
            let use_fzz = *engine != Engine::Rep;
            let mut rep = if use_rep { Some(PersistenceState::from_filtration(&f)?) } else { None };
            let mut fzz = if use_fzz { Some(FzzState::from_filtration(&f)?) } else { None };
            for (k, op) in script.iter().enumerate() {
                let _ = writeln!(out, "op {k} {op}");
                let r1 = rep.as_mut().map(|s| s.apply(op)).transpose()?;
                let r2 = fzz.as_mut().map(|s| s.apply(op)).transpose()?;
                if let (Some(a), Some(b)) = (&r1, &r2) {
                    if a.vines != b.vines {
                        return Err(internal(format!("op {k}: engines report different vines")));
                    }
                }
                vine_lines(&mut out, r1.as_ref().or(r2.as_ref()).expect("one engine runs"));
                if *check {
                    let (cur, bc) = match (&rep, &fzz) {
                        (Some(s), _) => (s.filtration(), s.barcode()),
                        (None, Some(s)) => (s.filtration(), s.barcode()),
                        _ => unreachable!(),
                    };
                    if bc != barcode_from_scratch(cur)? {
                        return Err(internal(format!("op {k}: barcode differs from the from-scratch barcode")));
                    }
                    if let Some(s) = &rep {
                        s.certify().map_err(|e| internal(format!("op {k}: {e}")))?;
                    }
                }
            }
            let bc = match (&rep, &fzz) {
                (Some(a), Some(b)) if a.barcode() != b.barcode() => return Err(internal("engines disagree on the final barcode".into())),
                (Some(a), _) => a.barcode(),
                (None, Some(b)) => b.barcode(),
                _ => unreachable!(),
            };
            out.push_str("barcode\n");
            out.push_str(&bc.to_string());
        }
        Cmd::Vineyard { csv, dim_cap, check_every } => {
            let tr = io::parse_points(&read(csv)?)?;
            let opts = VineyardOptions { dim_cap: *dim_cap, check_every: *check_every, ..VineyardOptions::default() };
            let v = dpc::vineyard(&tr, &opts)?;
            out.push_str(&io::format_vineyard(&v));
        }
        Cmd::Bench { points_csv, points, samples, step, seed, dim_cap, no_times } => {
            let tr = match points_csv {
                Some(p) => io::parse_points(&read(p)?)?,
                None => dpc::random_walk(*points, *samples, *step, *seed),
            };
            out.push_str(&bench(&tr, *dim_cap, !*no_times)?);
        }
    }
    Ok(out)
}

/// Op-kind columns in table order.
pub const BENCH_COLUMNS: [(&str, &str); 8] = [
    ("fw_sw", "fs"),
    ("bw_sw", "bs"),
    ("ow_sw", "os"),
    ("iw_sw", "is"),
    ("iw_con", "ic"),
    ("ow_con", "oc"),
    ("iw_exp", "ie"),
    ("ow_exp", "oe"),
];

fn bench(tr: &Trajectories, dim_cap: usize, times: bool) -> Result<String, Failure> {
    let (counts, max_len, t_up, t_fs) = if tr.ids.is_empty() {
        (BTreeMap::new(), 0, Duration::ZERO, Duration::ZERO)
    } else {
        let opts = VineyardOptions { dim_cap, time_from_scratch: times, ..VineyardOptions::default() };
        let v = dpc::vineyard(tr, &opts)?;
        (v.stats.ops, v.stats.max_len, v.stats.t_update, v.stats.t_from_scratch)
    };
    let mut head: Vec<&str> = BENCH_COLUMNS.iter().map(|c| c.0).collect();
    head.push("MLen");
    let mut row: Vec<String> = BENCH_COLUMNS.iter().map(|c| counts.get(c.1).copied().unwrap_or(0).to_string()).collect();
    row.push(max_len.to_string());
    if times {
        head.extend(["T_update", "T_from_scratch"]);
        row.push(format!("{:.6}", t_up.as_secs_f64()));
        row.push(format!("{:.6}", t_fs.as_secs_f64()));
    }
    Ok(format!("{}\n{}\n", head.join(" "), row.join(" ")))
}

/// Parses `args`, runs, writes stdout/stderr and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if code == 0 { write!(stdout, "{e}") } else { write!(stderr, "{e}") };
            return code;
        }
    };
    match execute(&cli) {
        Ok(text) => {
            let _ = stdout.write_all(text.as_bytes());
            0
        }
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.msg);
            f.code
        }
    }
}
