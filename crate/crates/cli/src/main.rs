//! `leibniz`: build, check, evaluate and lower Leibniz documents.
//!
//! Exit status: 0 on success, 1 for any usage, input or elaboration error,
//! 2 when rewriting exceeds the step limit. Diagnostics go to standard
//! error, one per line, as `path:line:col: CODE: message`.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use leibniz::context::ContextRef;
use leibniz::document::{document_name, emit_xml, load_xml, render_html, DocumentLoader, FileSource};
use leibniz::fp_derive::derive_fp;
use leibniz::rewrite::{normalize, NormalizeError, Trace, DEFAULT_STEP_LIMIT};
use leibniz::syntax::{render_equation, render_term};
use leibniz::{Asset, Document, Error, ErrorKind};

#[derive(Parser)]
#[command(name = "leibniz", version, about = "Leibniz documents: reader view, machine view, evaluation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write DOC.html and DOC.xml into a directory.
    Build {
        document: PathBuf,
        #[arg(short, long, value_name = "DIR")]
        output: PathBuf,
    },
    /// Elaborate a document and report the first error.
    Check { document: PathBuf },
    /// Print the normal form of an expression or of a labelled asset (`#label`).
    Eval {
        document: PathBuf,
        context: String,
        expression: String,
        #[arg(long, value_name = "N", default_value_t = DEFAULT_STEP_LIMIT)]
        steps: usize,
        /// Print every rewrite step to standard error.
        #[arg(long)]
        trace: bool,
    },
    /// Append the binary64 version of a context to a machine-view file.
    DeriveFp {
        document: PathBuf,
        context: String,
        #[arg(short, long, value_name = "OUT.xml")]
        output: PathBuf,
    },
    /// Write the machine view only.
    ExportXml {
        document: PathBuf,
        #[arg(short, long, value_name = "OUT.xml")]
        output: PathBuf,
    },
}

/// A diagnostic ready for printing, with the exit status it implies.
struct Failure {
    message: String,
    status: u8,
}

impl Failure {
    fn new(path: &str, e: &Error) -> Self {
        let path = e.file.as_deref().unwrap_or(path);
        let message = match e.pos {
            Some(pos) => format!("{path}:{pos}: {}: {}", e.code(), e.kind),
            None => format!("{path}: {}: {}", e.code(), e.kind),
        };
        let status = if matches!(e.kind, ErrorKind::StepLimitExceeded(_)) { 2 } else { 1 };
        Failure { message, status }
    }

    fn io(path: &Path, e: std::io::Error) -> Self {
        Failure {
            message: format!("{}: IoError: {e}", path.display()),
            status: 1,
        }
    }
}

type Outcome = Result<(), Failure>;

fn display(p: &Path) -> String {
    p.display().to_string()
}

fn load(path: &Path) -> Result<Document, Failure> {
    DocumentLoader::new(FileSource)
        .load(path)
        .map_err(|e| Failure::new(&display(path), &e))
}

fn write(path: &Path, bytes: &[u8]) -> Outcome {
    fs::write(path, bytes).map_err(|e| Failure::io(path, e))
}

fn build(document: &Path, dir: &Path) -> Outcome {
    let doc = load(document)?;
    fs::create_dir_all(dir).map_err(|e| Failure::io(dir, e))?;
    let stem = document_name(document);
    write(&dir.join(format!("{stem}.html")), &render_html(&doc))?;
    write(&dir.join(format!("{stem}.xml")), &emit_xml(&doc))
}

fn print_trace(trace: &Trace) {
    eprint!("{trace}");
}

fn run_normalize(ctx: &leibniz::Context, t: &leibniz::Term, steps: usize, trace: bool) -> Result<leibniz::Term, Failure> {
    match normalize(ctx, t, steps) {
        Ok((nf, tr)) => {
            if trace {
                print_trace(&tr);
            }
            Ok(nf)
        }
        Err(NormalizeError::StepLimitExceeded { limit, partial }) => {
            if trace {
                print_trace(&partial);
            }
            Err(Failure::new("<expression>", &Error::new(ErrorKind::StepLimitExceeded(limit))))
        }
        Err(NormalizeError::Invalid(e)) => Err(Failure::new("<expression>", &e)),
    }
}

fn eval(document: &Path, context: &str, expression: &str, steps: usize, trace: bool) -> Outcome {
    let doc = load(document)?;
    let ctx = doc
        .require_context(context)
        .map_err(|e| Failure::new(&display(document), &e))?;
    let out = match expression.strip_prefix('#') {
        Some(label) => match ctx.lookup_asset(label).map_err(|e| Failure::new(&display(document), &e))? {
            Asset::Term(t) => render_term(&run_normalize(ctx, t, steps, trace)?),
            Asset::Equation(eq) => {
                let left = run_normalize(ctx, &eq.left, steps, trace)?;
                let right = run_normalize(ctx, &eq.right, steps, trace)?;
                render_equation(&left, &right)
            }
        },
        None => {
            let t = ctx.parse_term(expression).map_err(|e| Failure::new("<expression>", &e))?;
            render_term(&run_normalize(ctx, &t, steps, trace)?)
        }
    };
    println!("{out}");
    Ok(())
}

fn derive(document: &Path, context: &str, output: &Path) -> Outcome {
    let path = display(document);
    let bytes = fs::read(document).map_err(|e| Failure::io(document, e))?;
    let mut doc = load_xml(&bytes).map_err(|e| Failure::new(&path, &e))?;
    let ctx = doc.require_context(context).map_err(|e| Failure::new(&path, &e))?;
    let derivation =
        derive_fp(ctx, ContextRef::new(doc.name.clone(), context)).map_err(|e| Failure::new(&path, &e))?;
    for lit in &derivation.inexact {
        eprintln!("{path}: inexact literal in {lit}");
    }
    doc.add_context(derivation.context).map_err(|e| Failure::new(&path, &e))?;
    write(output, &emit_xml(&doc))
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Build { document, output } => build(&document, &output),
        Command::Check { document } => load(&document).map(drop),
        Command::Eval {
            document,
            context,
            expression,
            steps,
            trace,
        } => eval(&document, &context, &expression, steps, trace),
        Command::DeriveFp {
            document,
            context,
            output,
        } => derive(&document, &context, &output),
        Command::ExportXml { document, output } => {
            let doc = load(&document)?;
            write(&output, &emit_xml(&doc))
        }
    }
}

// Rewriting recurses once per level of term depth, and rule sets can grow
// terms well past what the default main-thread stack holds.
const STACK_BYTES: usize = 1 << 30;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let worker = std::thread::Builder::new().stack_size(STACK_BYTES).spawn(move || run(cli));
    let outcome = match worker.map(|h| h.join()) {
        Ok(Ok(outcome)) => outcome,
        _ => Err(Failure {
            message: "internal error: evaluation thread failed".into(),
            status: 1,
        }),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.message);
            ExitCode::from(f.status)
        }
    }
}
