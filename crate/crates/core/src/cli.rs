//! The `datatt` command line.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::Command;

use clap::{Args, Parser, Subcommand};

use crate::dump;
use crate::elab::{elaborate, Options};
use crate::extract::{self, ir::PrimTable};
use crate::program::CoreProgram;
use crate::surface::SourceMap;
use crate::translate::{check_repr_fns, translate_program};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "datatt", version, about = "Type checker and compiler for datatt programs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Type check the given files.
    Check(Input),
    /// Print the representation-free core program.
    Translate(Input),
    /// Compile to a JavaScript module.
    Compile {
        #[command(flatten)]
        input: Input,
        /// Write the module here instead of to standard output.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Compile and run `main` with the JavaScript runtime.
    Run(Input),
}

#[derive(Args, Debug)]
pub struct Input {
    /// Source files, concatenated in order.
    #[arg(required_unless_present = "from_core", conflicts_with = "from_core")]
    pub files: Vec<PathBuf>,
    /// Accept representation blocks without checking their coherence proofs.
    #[arg(long)]
    pub no_coherence_check: bool,
    /// Also print the translated core program to standard error.
    #[arg(long)]
    pub dump_core: bool,
    /// Log every conversion check to standard error.
    #[arg(long)]
    pub trace_conversion: bool,
    /// Read a core program produced by `translate` instead of source files.
    #[arg(long, value_name = "FILE")]
    pub from_core: Option<PathBuf>,
}

/// A failure together with the exit code it maps to.
pub struct Failure {
    pub code: i32,
    pub msg: String,
}

fn fail(code: i32, msg: impl Into<String>) -> Failure {
    Failure { code, msg: msg.into() }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| fail(EXIT_USAGE, format!("{}: {e}", path.display())))
}

/// Checks the input and returns its translation.
fn load(input: &Input) -> Result<CoreProgram, Failure> {
    if let Some(path) = &input.from_core {
        let prog = dump::parse_program(&read(path)?)
            .map_err(|e| fail(EXIT_ERROR, format!("{}: {e}", path.display())))?;
        return checked(translate_program(&prog));
    }
    let mut sm = SourceMap::default();
    for f in &input.files {
        sm.add(f.display().to_string(), read(f)?);
    }
    let opts = Options {
        coherence_check: !input.no_coherence_check,
        trace: input.trace_conversion,
    };
    let el = elaborate(&sm, opts).map_err(|e| fail(EXIT_ERROR, format!("{}: error: {}", sm.locate(e.span), e.kind)))?;
    for w in &el.warnings {
        eprintln!("{}: warning: {}", sm.locate(w.span), w.msg);
    }
    checked(translate_program(&el.env.to_program()))
}

fn checked(translated: CoreProgram) -> Result<CoreProgram, Failure> {
    check_repr_fns(&translated).map_err(|e| fail(EXIT_ERROR, format!("error: {e}")))?;
    Ok(translated)
}

fn compile(prog: &CoreProgram) -> Result<String, Failure> {
    extract::compile(prog, &PrimTable::default()).map_err(|e| fail(EXIT_ERROR, format!("error: {e}")))
}

fn prepare(input: &Input) -> Result<CoreProgram, Failure> {
    let prog = load(input)?;
    if input.dump_core {
        eprint!("{}", dump::program_to_string(&prog));
    }
    Ok(prog)
}

fn execute(cmd: &Cmd) -> Result<i32, Failure> {
    match cmd {
        Cmd::Check(input) => {
            prepare(input)?;
            Ok(EXIT_OK)
        }
        Cmd::Translate(input) => {
            let prog = load(input)?;
            print!("{}", dump::program_to_string(&prog));
            Ok(EXIT_OK)
        }
        Cmd::Compile { input, output } => {
            let js = compile(&prepare(input)?)?;
            match output {
                Some(path) => std::fs::write(path, js)
                    .map_err(|e| fail(EXIT_USAGE, format!("{}: {e}", path.display())))?,
                None => print!("{js}"),
            }
            Ok(EXIT_OK)
        }
        Cmd::Run(input) => {
            let js = compile(&prepare(input)?)?;
            run_js(&js)
        }
    }
}

/// Writes the module to a scratch directory and hands it to the runtime
/// named by `DTT_RUNTIME`.
fn run_js(js: &str) -> Result<i32, Failure> {
    let dir = tempfile::tempdir().map_err(|e| fail(EXIT_USAGE, format!("cannot create a scratch directory: {e}")))?;
    let path = dir.path().join("main.js");
    std::fs::write(&path, js).map_err(|e| fail(EXIT_USAGE, format!("{}: {e}", path.display())))?;
    let runtime = std::env::var("DTT_RUNTIME").unwrap_or_else(|_| "dtt-run".into());
    let out = Command::new(&runtime)
        .arg(&path)
        .output()
        .map_err(|e| fail(EXIT_USAGE, format!("cannot start runtime `{runtime}`: {e}")))?;
    std::io::stdout().write_all(&out.stdout).ok();
    std::io::stderr().write_all(&out.stderr).ok();
    Ok(out.status.code().unwrap_or(EXIT_ERROR))
}

/// Parses the arguments, runs the command and returns the exit code.
pub fn main_with_args(args: impl IntoIterator<Item = std::ffi::OsString>) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            e.print().ok();
            return code;
        }
    };
    let result = crate::with_big_stack(|| execute(&cli.command));
    std::io::stdout().flush().ok();
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("{}", f.msg);
            f.code
        }
    }
}
