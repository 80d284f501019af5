//! Command-line front end: argument handling, sweep orchestration and
//! CSV/JSON/SVG output.

pub mod args;
pub mod error;
pub mod run;
pub mod svg;
pub mod table;

use std::ffi::OsString;
use std::path::Path;

use clap::error::ErrorKind;
use clap::Parser;

pub use args::{Cli, Command, Format, RunConfig};
pub use error::{CliError, CliResult};
pub use run::run;
pub use table::Table;

/// Environment variable capping sweep concurrency; 0 or unset means one
/// thread per core.
pub const THREADS_VAR: &str = "PTSSH_THREADS";

/// Reads [`THREADS_VAR`] and sizes the global worker pool.
pub fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| CliError::usage(THREADS_VAR, format!("'{raw}' is not a thread count")))?;
    if n > 0 {
        // a pool that is already running keeps its size
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    Ok(())
}

/// Parses `args`, runs the command and returns the process exit status:
/// 0 on success, 1 on a domain error, 2 on a usage error.
pub fn run_main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
        }
    };
    let outcome = configure_threads()
        .and_then(|()| cli.into_config())
        .and_then(|cfg| run(&cfg));
    match outcome {
        Ok(paths) => {
            for p in paths {
                println!("wrote {}", p.display());
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Columns of a trace file read back into numbers.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceData {
    pub times: Vec<f64>,
    pub delta_e: Vec<f64>,
    /// `populations[k][j]` for level `j + 1` at row `k`.
    pub populations: Vec<Vec<f64>>,
}

/// Parses a `t,delta_e,p_1..p_2N` file.
pub fn read_trace(path: &Path) -> CliResult<TraceData> {
    let t = Table::read(path)?;
    let malformed = |message: &str| CliError::Table {
        path: path.to_path_buf(),
        message: message.to_string(),
    };
    if t.header.len() < 3 || t.header[0] != "t" || t.header[1] != "delta_e" {
        return Err(malformed("expected header t,delta_e,p_1,..."));
    }
    let mut data = TraceData {
        times: Vec::with_capacity(t.rows.len()),
        delta_e: Vec::with_capacity(t.rows.len()),
        populations: Vec::with_capacity(t.rows.len()),
    };
    for row in &t.rows {
        let nums: Option<Vec<f64>> = row.iter().map(|s| table::parse_number(s)).collect();
        let nums = nums.ok_or_else(|| malformed("non-numeric cell"))?;
        data.times.push(nums[0]);
        data.delta_e.push(nums[1]);
        data.populations.push(nums[2..].to_vec());
    }
    Ok(data)
}
