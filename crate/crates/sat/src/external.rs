use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use crate::cnf::{Cnf, SatOutcome};
use crate::dimacs::{parse_solver_output, write_dimacs};
use crate::SatError;

/// A SAT solver binary invoked as `<program> [args...] <file.cnf>`.
///
/// The solver must print its answer on stdout following the SAT
/// competition format (`s ...` and `v ...` lines).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExternalSolver {
    program: PathBuf,
    args: Vec<String>,
}

impl ExternalSolver {
    pub fn new(program: impl Into<PathBuf>) -> Self {
        ExternalSolver {
            program: program.into(),
            args: Vec::new(),
        }
    }

    pub fn with_args<I, S>(mut self, args: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.args = args.into_iter().map(Into::into).collect();
        self
    }

    pub fn program(&self) -> &Path {
        &self.program
    }

    pub(crate) fn solve(&self, cnf: &Cnf, deadline: Option<Instant>) -> Result<SatOutcome, SatError> {
        let mut file = tempfile::Builder::new()
            .prefix("cascade-")
            .suffix(".cnf")
            .tempfile()?;
        write_dimacs(cnf, &mut std::io::BufWriter::new(file.as_file_mut()))?;

        let mut command = Command::new(&self.program);
        #[cfg(unix)]
        {
            use std::os::unix::process::CommandExt;
            command.process_group(0);
        }
        let mut child = command
            .args(&self.args)
            .arg(file.path())
            .stdin(Stdio::null())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(|source| SatError::SolverNotFound {
                program: self.program.clone(),
                source,
            })?;

        let mut stdout = child.stdout.take().expect("stdout is piped");
        let reader = thread::spawn(move || {
            let mut text = String::new();
            stdout.read_to_string(&mut text).map(|_| text)
        });

        loop {
            if child.try_wait()?.is_some() {
                break;
            }
            if deadline.is_some_and(|d| Instant::now() >= d) {
                kill_group(&mut child);
                let _ = child.wait();
                // The reader finishes once every process holding the pipe is gone.
                drop(reader);
                return Ok(SatOutcome::Timeout);
            }
            thread::sleep(Duration::from_millis(5));
        }
        let text = reader
            .join()
            .map_err(|_| SatError::MalformedOutput {
                line: 0,
                message: "solver output reader panicked".into(),
            })??;
        parse_solver_output(&text, cnf.var_count())
    }
}

#[cfg(unix)]
fn kill_group(child: &mut std::process::Child) {
    // The solver runs in its own process group; take down any helpers too.
    unsafe {
        libc::kill(-(child.id() as libc::pid_t), libc::SIGKILL);
    }
}

#[cfg(not(unix))]
fn kill_group(child: &mut std::process::Child) {
    let _ = child.kill();
}
