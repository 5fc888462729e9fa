// Copyright 2026 The slitport Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Command-line front end: `run`, `check`, `paper` and `sweep`.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::gates::tail_bound;
use crate::protocol::{run_protocol, to_canonical_json, Mode, ProtocolError, RunInputs, RunOptions, RunReport};
use crate::script::{parse, parse_angle, parse_complex, validate, Diagnostic, ProtocolScript, PAPER_SCENARIO};

pub const EXIT_OK: i32 = 0;
pub const EXIT_LOW_FIDELITY: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_IMPOSSIBLE: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "slitport", version, about = "Simulate two-slit atomic teleportation through dispersive cavities")]
struct Cli
{
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command
{
    /// Run a protocol script.
    Run
    {
        script: PathBuf,
        #[command(flatten)]
        flags: RunFlags,
    },
    /// Parse and validate a script without running it.
    Check
    {
        script: PathBuf,
    },
    /// Run the built-in scenario with every checkpoint verified.
    Paper
    {
        #[command(flatten)]
        flags: RunFlags,
    },
    /// Run many independent instances over one parameter.
    Sweep
    {
        /// Script to sweep; defaults to the built-in scenario.
        script: Option<PathBuf>,
        #[arg(long)]
        param: SweepParam,
        /// Comma-separated list of values.
        #[arg(long, allow_hyphen_values = true)]
        values: String,
        /// Worker threads (default: available cores, at most 8).
        #[arg(long)]
        jobs: Option<usize>,
        #[command(flatten)]
        flags: RunFlags,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum SweepParam
{
    Alpha,
    Gt,
    Cb,
}

#[derive(Args, Debug, Clone)]
struct RunFlags
{
    /// Amplitude on |b> of the input (complex literal allowed).
    #[arg(long, allow_hyphen_values = true)]
    cb: Option<String>,
    /// Amplitude on |c> of the input (complex literal allowed).
    #[arg(long, allow_hyphen_values = true)]
    cc: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    #[arg(long)]
    truncation: Option<usize>,
    /// Probe angle g*t: a number, pi or pi/N.
    #[arg(long)]
    gt: Option<String>,
    /// Write the JSON report here.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Draw detection outcomes instead of post-selecting.
    #[arg(long)]
    sample: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Exit with status 1 if the final fidelity is below this.
    #[arg(long, default_value_t = 0.0)]
    min_fidelity: f64,
}

struct Io<'a>
{
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

/// Input-side failure carrying its messages.
struct Fail(Vec<String>);

impl From<Vec<Diagnostic>> for Fail
{
    fn from(d: Vec<Diagnostic>) -> Self
    {
        Fail(d.iter().map(ToString::to_string).collect())
    }
}

impl From<String> for Fail
{
    fn from(s: String) -> Self
    {
        Fail(vec![s])
    }
}

/// Parse `args` (program name first) and execute, writing to `out`/`err`.
/// Returns the process exit code.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args)
    {
        Ok(c) => c,
        Err(e) =>
        {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let mut io = Io { out, err };
    match cli.command
    {
        Command::Run { script, flags } => match load(&script)
        {
            Ok(s) => cmd_run(&s, &flags, false, &mut io),
            Err(f) => fail(f, &mut io),
        },
        Command::Check { script } => cmd_check(&script, &mut io),
        Command::Paper { flags } =>
        {
            let s = parse(PAPER_SCENARIO).expect("built-in scenario parses");
            cmd_run(&s, &flags, true, &mut io)
        }
        Command::Sweep { script, param, values, jobs, flags } =>
        {
            let s = match script
            {
                Some(p) => match load(&p)
                {
                    Ok(s) => s,
                    Err(f) => return fail(f, &mut io),
                },
                None => parse(PAPER_SCENARIO).expect("built-in scenario parses"),
            };
            cmd_sweep(&s, param, &values, jobs, &flags, &mut io)
        }
    }
}

fn fail(f: Fail, io: &mut Io) -> i32
{
    for m in f.0
    {
        let _ = writeln!(io.err, "error: {m}");
    }
    EXIT_INPUT
}

fn load(path: &Path) -> Result<ProtocolScript, Fail>
{
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(parse(&text)?)
}

fn amplitude(s: &str, name: &str) -> Result<Complex64, Fail>
{
    parse_complex(s).map_err(|e| Fail(vec![format!("--{name}: {e}")]))
}

/// Partner amplitude that completes `x` to a unit vector, chosen real and
/// non-negative.
fn complement(x: Complex64, name: &str) -> Result<Complex64, Fail>
{
    let rest = 1.0 - x.norm_sqr();
    if rest < -crate::fockspace::INPUT_NORM_TOLERANCE
    {
        return Err(Fail(vec![format!("--{name} has modulus above 1")]));
    }
    Ok(Complex64::new(rest.max(0.0).sqrt(), 0.0))
}

fn resolve_inputs(script: &ProtocolScript, flags: &RunFlags) -> Result<RunInputs, Fail>
{
    let mut inputs = script.inputs();
    if let Some(a) = flags.alpha
    {
        inputs.alpha = a;
    }
    if let Some(n) = flags.truncation
    {
        inputs.truncation = n;
    }
    if let Some(g) = &flags.gt
    {
        inputs.gt = parse_angle(g).map_err(|e| Fail(vec![format!("--gt: {e}")]))?.resolve(&inputs);
    }
    match (&flags.cb, &flags.cc)
    {
        (Some(b), Some(c)) =>
        {
            inputs.cb = amplitude(b, "cb")?;
            inputs.cc = amplitude(c, "cc")?;
        }
        (Some(b), None) =>
        {
            inputs.cb = amplitude(b, "cb")?;
            inputs.cc = complement(inputs.cb, "cb")?;
        }
        (None, Some(c)) =>
        {
            inputs.cc = amplitude(c, "cc")?;
            inputs.cb = complement(inputs.cc, "cc")?;
        }
        (None, None) => {}
    }
    Ok(inputs)
}

fn options(flags: &RunFlags, verify: bool) -> RunOptions
{
    RunOptions {
        mode: if flags.sample { Mode::Sample { seed: flags.seed } } else { Mode::PostSelect },
        verify_checkpoints: verify,
    }
}

fn error_code(e: &ProtocolError) -> i32
{
    if e.is_impossible_outcome() || matches!(e, ProtocolError::Undetected { .. })
    {
        EXIT_IMPOSSIBLE
    }
    else
    {
        EXIT_INPUT
    }
}

fn write_json(path: &Path, text: &str, io: &mut Io) -> bool
{
    match std::fs::write(path, format!("{text}\n"))
    {
        Ok(()) => true,
        Err(e) =>
        {
            let _ = writeln!(io.err, "error: {}: {e}", path.display());
            false
        }
    }
}

fn cmd_check(path: &Path, io: &mut Io) -> i32
{
    let script = match load(path)
    {
        Ok(s) => s,
        Err(f) => return fail(f, io),
    };
    let inputs = script.inputs();
    match validate(&script, &inputs)
    {
        Ok(p) =>
        {
            let _ = writeln!(io.out, "ok: {} screens, {} cavities, {} atoms, {} kernels, {} steps",
                p.layout.screens.len(), p.layout.cavities.len(), p.layout.atoms.len(),
                p.layout.kernels.len(), p.steps.len());
            EXIT_OK
        }
        Err(d) => fail(d.into(), io),
    }
}

fn cmd_run(script: &ProtocolScript, flags: &RunFlags, summary: bool, io: &mut Io) -> i32
{
    let inputs = match resolve_inputs(script, flags)
    {
        Ok(i) => i,
        Err(f) => return fail(f, io),
    };
    let program = match validate(script, &inputs)
    {
        Ok(p) => p,
        Err(d) => return fail(d.into(), io),
    };
    let report = match run_protocol(&program.layout, &program.steps, &inputs, options(flags, true))
    {
        Ok(r) => r,
        Err(f) =>
        {
            let _ = write!(io.out, "{}", f.report.table());
            let _ = writeln!(io.err, "error: {}", f.error);
            return error_code(&f.error);
        }
    };
    let _ = write!(io.out, "{}", report.table());
    if summary
    {
        print_checkpoints(&report, io);
    }
    if let Some(p) = &flags.json
    {
        if !write_json(p, &report.to_json(), io)
        {
            return EXIT_INPUT;
        }
    }
    match report.final_fidelity
    {
        Some(f) if f >= flags.min_fidelity => EXIT_OK,
        None if flags.min_fidelity <= 0.0 => EXIT_OK,
        _ =>
        {
            let _ = writeln!(io.err, "final fidelity below {}", flags.min_fidelity);
            EXIT_LOW_FIDELITY
        }
    }
}

fn print_checkpoints(report: &RunReport, io: &mut Io)
{
    let _ = writeln!(io.out, "\ncheckpoint fidelities:");
    let mut worst = 1.0f64;
    for r in report.checkpoints()
    {
        let f = r.checkpoint_fidelity.unwrap_or(f64::NAN);
        worst = worst.min(f);
        let name = r.name.trim_start_matches("checkpoint ");
        let _ = writeln!(io.out, "  {name:<20} {f:.15}  1-F = {:.3e}", 1.0 - f);
    }
    let _ = writeln!(io.out, "  worst 1-F = {:.3e}", 1.0 - worst);
}

#[derive(Serialize)]
struct SweepRun
{
    value: f64,
    truncation: usize,
    final_fidelity: Option<f64>,
    cumulative_probability: Option<f64>,
    error: Option<String>,
}

#[derive(Serialize)]
struct SweepReport
{
    param: SweepParam,
    runs: Vec<SweepRun>,
}

fn sweep_one(script: &ProtocolScript, base: &RunInputs, param: SweepParam, value: f64, flags: &RunFlags)
    -> (SweepRun, Option<i32>)
{
    let mut inputs = *base;
    let bad = |msg: String, code: i32, n: usize| {
        (SweepRun { value, truncation: n, final_fidelity: None, cumulative_probability: None, error: Some(msg) }, Some(code))
    };
    match param
    {
        SweepParam::Alpha =>
        {
            inputs.alpha = value;
            if flags.truncation.is_none()
            {
                inputs.truncation = tail_bound(4.0 * value * value).max(2);
            }
        }
        SweepParam::Gt => inputs.gt = value,
        SweepParam::Cb =>
        {
            if value.abs() > 1.0
            {
                return bad(format!("cb = {value} has modulus above 1"), EXIT_INPUT, inputs.truncation);
            }
            inputs.cb = Complex64::new(value, 0.0);
            inputs.cc = Complex64::new((1.0 - value * value).max(0.0).sqrt(), 0.0);
        }
    }
    let program = match validate(script, &inputs)
    {
        Ok(p) => p,
        Err(d) =>
        {
            let msg = d.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ");
            return bad(msg, EXIT_INPUT, inputs.truncation);
        }
    };
    match run_protocol(&program.layout, &program.steps, &inputs, options(flags, false))
    {
        Ok(r) => (SweepRun {
            value,
            truncation: inputs.truncation,
            final_fidelity: r.final_fidelity,
            cumulative_probability: Some(r.cumulative_probability),
            error: None,
        }, None),
        Err(f) => bad(f.error.to_string(), error_code(&f.error), inputs.truncation),
    }
}

fn cmd_sweep(script: &ProtocolScript, param: SweepParam, values: &str, jobs: Option<usize>,
    flags: &RunFlags, io: &mut Io) -> i32
{
    let mut parsed = Vec::new();
    for v in values.split(',').map(str::trim).filter(|v| !v.is_empty())
    {
        let x = if param == SweepParam::Gt
        {
            parse_angle(v).map(|a| a.resolve(&RunInputs::default()))
        }
        else
        {
            v.parse::<f64>().map_err(|_| format!("invalid number '{v}'"))
        };
        match x
        {
            Ok(x) if x.is_finite() => parsed.push(x),
            Ok(_) => return fail(format!("--values: non-finite value '{v}'").into(), io),
            Err(e) => return fail(format!("--values: {e}").into(), io),
        }
    }
    if parsed.is_empty()
    {
        return fail("--values is empty".to_owned().into(), io);
    }
    let base = match resolve_inputs(script, flags)
    {
        Ok(i) => i,
        Err(f) => return fail(f, io),
    };
    let threads = jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()).min(8)).max(1);
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build()
    {
        Ok(p) => p,
        Err(e) => return fail(format!("thread pool: {e}").into(), io),
    };
    let results: Vec<(SweepRun, Option<i32>)> = pool.install(|| {
        parsed.par_iter().map(|&v| sweep_one(script, &base, param, v, flags)).collect()
    });
    let first_code = results.iter().find_map(|(_, c)| *c);
    let ok = results.iter().filter(|(_, c)| c.is_none()).count();
    let report = SweepReport { param, runs: results.into_iter().map(|(r, _)| r).collect() };
    for r in &report.runs
    {
        let _ = match (&r.error, r.final_fidelity)
        {
            (Some(e), _) => writeln!(io.out, "{:>24.16e}  error: {e}", r.value),
            (None, f) => writeln!(io.out, "{:>24.16e}  fidelity {}  probability {:.16e}", r.value,
                f.map_or("n/a".to_owned(), |f| format!("{f:.15}")), r.cumulative_probability.unwrap_or(0.0)),
        };
    }
    let json = to_canonical_json(&report);
    match &flags.json
    {
        Some(p) =>
        {
            if !write_json(p, &json, io)
            {
                return EXIT_INPUT;
            }
        }
        None => { let _ = writeln!(io.out, "{json}"); }
    }
    if ok > 0 { EXIT_OK } else { first_code.unwrap_or(EXIT_INPUT) }
}
