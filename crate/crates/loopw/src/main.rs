use clap::{Parser, Subcommand};
use loopw::check::{check_program, CheckConfig, CheckReport};
use loopw::core_eval;
use loopw::diag::{Diagnostic, LineMap, Severity};
use loopw::index::ProofStatus;
use loopw::parser::parse_program;
use loopw::printer::formula_to_string;
use loopw::{runtime, smt, translate};
use std::path::PathBuf;

// Exit codes: 0 success, 1 type or verification failure, 2 usage or
// parse failure, 3 runtime failure.
const EXIT_OK: i32 = 0;
const EXIT_CHECK: i32 = 1;
const EXIT_USAGE: i32 = 2;
const EXIT_RUNTIME: i32 = 3;

#[derive(Parser)]
#[command(
    name = "loopw",
    version,
    about = "Type checker, verifier, interpreter and compiler for an indexed imperative language"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(clap::Args)]
struct CheckOpts {
    /// Treat undischarged verification conditions as errors.
    #[arg(long)]
    strict: bool,
    /// Valuation bound for the counterexample search.
    #[arg(long, default_value_t = 8)]
    bound: u64,
    /// Rewrite step budget per normalization.
    #[arg(long = "step-cap", default_value_t = 10_000)]
    step_cap: usize,
}

impl CheckOpts {
    fn config(&self, discharge: bool) -> CheckConfig {
        CheckConfig {
            bound: self.bound,
            step_cap: self.step_cap,
            discharge,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse and type-check a program, reporting diagnostics.
    Check {
        file: PathBuf,
        #[command(flatten)]
        opts: CheckOpts,
    },
    /// Print the verification conditions and their verdicts.
    Vcs {
        file: PathBuf,
        #[command(flatten)]
        opts: CheckOpts,
        /// Also write one SMT-LIB2 file per condition into this directory.
        #[arg(long = "emit-smt", value_name = "DIR")]
        emit_smt: Option<PathBuf>,
    },
    /// Type-check a program and run its entry procedure.
    Run {
        file: PathBuf,
        /// Decimal inputs for the entry procedure.
        inputs: Vec<u64>,
        /// Collect verification conditions without discharging them.
        #[arg(long = "no-discharge")]
        no_discharge: bool,
        #[command(flatten)]
        opts: CheckOpts,
    },
    /// Compile a checked program to the functional core and print it.
    Translate {
        file: PathBuf,
        #[command(flatten)]
        opts: CheckOpts,
    },
    /// Run the interpreter and the compiled core side by side on all
    /// input vectors with components 0..=MAX and report agreement.
    Compare {
        file: PathBuf,
        #[arg(long, default_value_t = 5)]
        max: u64,
        #[command(flatten)]
        opts: CheckOpts,
    },
}

fn main() {
    std::process::exit(real_main());
}

fn real_main() -> i32 {
    match Cli::parse().cmd {
        Cmd::Check { file, opts } => check_cmd(&file, &opts),
        Cmd::Vcs {
            file,
            opts,
            emit_smt,
        } => vcs_cmd(&file, &opts, emit_smt.as_deref()),
        Cmd::Run {
            file,
            inputs,
            no_discharge,
            opts,
        } => run_cmd(&file, &inputs, no_discharge, &opts),
        Cmd::Translate { file, opts } => translate_cmd(&file, &opts),
        Cmd::Compare { file, max, opts } => compare_cmd(&file, max, &opts),
    }
}

/// Loads and parses; on failure prints the diagnostics and reports the
/// usage/parse exit code.
fn load(file: &std::path::Path) -> Result<(String, loopw::Program), i32> {
    let src = match std::fs::read_to_string(file) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error\t0:0\tio\tcannot read {}: {e}", file.display());
            return Err(EXIT_USAGE);
        }
    };
    match parse_program(&src) {
        Ok(p) => Ok((src, p)),
        Err(diags) => {
            let lines = LineMap::new(&src);
            for d in &diags {
                eprintln!("{}", lines.render(d));
            }
            Err(EXIT_USAGE)
        }
    }
}

/// Diagnostics derived from obligation verdicts: refuted conditions are
/// always errors; undischarged ones are warnings, or errors in strict
/// mode.
fn obligation_diags(report: &CheckReport, strict: bool) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for ob in &report.obligations {
        match &ob.status {
            ProofStatus::Proven => {}
            ProofStatus::Refuted => out.push(Diagnostic::error(
                ob.span,
                ob.rule,
                format!("verification condition fails: {}", formula_to_string(&ob.goal)),
            )),
            ProofStatus::Unproven(reason) => {
                let msg = format!(
                    "verification condition not discharged ({reason}): {}",
                    formula_to_string(&ob.goal)
                );
                out.push(if strict {
                    Diagnostic::error(ob.span, ob.rule, msg)
                } else {
                    Diagnostic::warning(ob.span, ob.rule, msg)
                });
            }
        }
    }
    out
}

fn emit_diags(src: &str, diags: &[Diagnostic]) -> bool {
    let lines = LineMap::new(src);
    let mut any_error = false;
    for d in diags {
        eprintln!("{}", lines.render(d));
        any_error |= d.severity == Severity::Error;
    }
    any_error
}

/// Runs the checker and prints its diagnostics (including the ones
/// derived from obligations); returns the report and whether any error
/// was emitted.
fn checked(src: &str, p: &loopw::Program, cfg: &CheckConfig, strict: bool) -> (CheckReport, bool) {
    let report = check_program(p, cfg);
    let mut diags = report.diagnostics.clone();
    diags.extend(obligation_diags(&report, strict));
    let any_error = emit_diags(src, &diags);
    (report, any_error)
}

fn check_cmd(file: &std::path::Path, opts: &CheckOpts) -> i32 {
    let (src, p) = match load(file) {
        Ok(x) => x,
        Err(code) => return code,
    };
    let (_, any_error) = checked(&src, &p, &opts.config(true), opts.strict);
    if any_error {
        EXIT_CHECK
    } else {
        EXIT_OK
    }
}

fn vcs_cmd(file: &std::path::Path, opts: &CheckOpts, emit_smt: Option<&std::path::Path>) -> i32 {
    let (src, p) = match load(file) {
        Ok(x) => x,
        Err(code) => return code,
    };
    let report = check_program(&p, &opts.config(true));
    let any_type_error = emit_diags(&src, &report.diagnostics);
    let lines = LineMap::new(&src);
    for ob in &report.obligations {
        let (line, col) = lines.position(ob.span.start);
        println!(
            "{}\t{}\t{}:{}\t{}",
            ob.status.label(),
            ob.proc,
            line,
            col,
            formula_to_string(&ob.goal)
        );
    }
    if let Some(dir) = emit_smt {
        match smt::emit_smt(&p, &report.obligations, dir) {
            Ok(files) => eprintln!("wrote {} file(s) to {}", files.len(), dir.display()),
            Err(e) => {
                eprintln!("error\t0:0\tio\tcannot write {}: {e}", dir.display());
                return EXIT_USAGE;
            }
        }
    }
    let refuted = report
        .obligations
        .iter()
        .any(|o| o.status == ProofStatus::Refuted);
    let unproven = report
        .obligations
        .iter()
        .any(|o| matches!(o.status, ProofStatus::Unproven(_)));
    if any_type_error || refuted || (opts.strict && unproven) {
        EXIT_CHECK
    } else {
        EXIT_OK
    }
}

fn run_cmd(file: &std::path::Path, inputs: &[u64], no_discharge: bool, opts: &CheckOpts) -> i32 {
    let (src, p) = match load(file) {
        Ok(x) => x,
        Err(code) => return code,
    };
    let (_, any_error) = checked(&src, &p, &opts.config(!no_discharge), opts.strict);
    if any_error {
        return EXIT_CHECK;
    }
    match runtime::run(&p, inputs) {
        Ok(values) => {
            for v in values {
                println!("{v}");
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error\t0:0\truntime\t{e}");
            EXIT_RUNTIME
        }
    }
}

fn translate_cmd(file: &std::path::Path, opts: &CheckOpts) -> i32 {
    let (src, p) = match load(file) {
        Ok(x) => x,
        Err(code) => return code,
    };
    let (_, any_error) = checked(&src, &p, &opts.config(true), opts.strict);
    if any_error {
        return EXIT_CHECK;
    }
    match translate::translate(&p) {
        Ok(core) => {
            print!("{}", core.to_text());
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error\t0:0\ttranslate\t{e}");
            EXIT_CHECK
        }
    }
}

fn compare_cmd(file: &std::path::Path, max: u64, opts: &CheckOpts) -> i32 {
    let (src, p) = match load(file) {
        Ok(x) => x,
        Err(code) => return code,
    };
    let (_, any_error) = checked(&src, &p, &opts.config(true), opts.strict);
    if any_error {
        return EXIT_CHECK;
    }
    let core = match translate::translate(&p) {
        Ok(core) => core,
        Err(e) => {
            eprintln!("error\t0:0\ttranslate\t{e}");
            return EXIT_CHECK;
        }
    };
    let arity = p.entry_proc().lit.ins.len();
    let mut all_equal = true;
    for inputs in input_vectors(arity, max) {
        let lhs = runtime::run(&p, &inputs);
        let rhs = core_eval::run_core(&core, &inputs, core_eval::DEFAULT_FUEL).and_then(|v| {
            let mut out = Vec::new();
            core_eval::flatten_value(&v, &mut out)?;
            Ok(out)
        });
        let csv = |xs: &[u64]| {
            xs.iter()
                .map(u64::to_string)
                .collect::<Vec<_>>()
                .join(",")
        };
        let ins = csv(&inputs);
        match (lhs, rhs) {
            (Ok(a), Ok(b)) if a == b => println!("{ins}\tequal\t{}", csv(&a)),
            (a, b) => {
                all_equal = false;
                println!(
                    "{ins}\tdifferent\tinterpreter={} core={}",
                    match &a {
                        Ok(v) => csv(v),
                        Err(e) => format!("error({e})"),
                    },
                    match &b {
                        Ok(v) => csv(v),
                        Err(e) => format!("error({e})"),
                    }
                );
            }
        }
    }
    if all_equal {
        EXIT_OK
    } else {
        EXIT_CHECK
    }
}

/// All vectors of the given arity with components 0..=max, in
/// lexicographic order; the empty vector for arity 0.
fn input_vectors(arity: usize, max: u64) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    let mut cur = vec![0u64; arity];
    loop {
        out.push(cur.clone());
        let mut i = arity;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < max {
                cur[i] += 1;
                for c in cur.iter_mut().skip(i + 1) {
                    *c = 0;
                }
                break;
            }
        }
    }
}
