//! Command-line front end. Every command writes line-oriented `key=value`
//! output; exit codes are 0 on success, 1 on verification failure and 2 on
//! usage or input errors.

use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{ArgGroup, Args, Parser, Subcommand};
use rayon::prelude::*;
use thiserror::Error;

use crate::abelian::{abelianize, image};
use crate::certificates::{
    build_fibonacci_certificate, build_kb_circle_certificate, build_klein_certificate, build_rss_certificate,
    build_torus_bundle_certificate, parse_certificate, render_certificate, verify, GtCertificate, Method, Status,
    VerificationReport,
};
use crate::classify::{classify_circle_bundle, classify_sol, classify_torus_bundle, SolDescriptor, SpecialManifold, Surface, Verdict};
use crate::coset::{default_max_cosets, enumerate, CosetStatus};
use crate::presentation::{Family, Monodromy, Presentation};

#[derive(Debug, Parser)]
#[command(name = "gtcert", version, about = "Generalized torsion certificates for finitely presented groups")]
struct Cli {
    /// Print elapsed time to stderr.
    #[arg(long, global = true)]
    timings: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Show generators and relators of a presentation.
    Info {
        /// Family shorthand such as `fibonacci:m=5`, or a presentation file.
        presentation: String,
    },
    /// Abelian invariants and generator images in the abelianization.
    Abelianize { presentation: String },
    /// Todd-Coxeter enumeration of the cosets of a subgroup (trivial by default).
    Enumerate {
        presentation: String,
        #[arg(long)]
        max_cosets: Option<usize>,
        /// Comma-separated subgroup generators.
        #[arg(long)]
        subgroup: Option<String>,
        /// Print each generator's permutation.
        #[arg(long)]
        show_action: bool,
    },
    /// Build a certificate for a family member.
    Certify {
        #[arg(long)]
        family: String,
        /// `key=value`, repeatable or comma-separated.
        #[arg(long = "param", value_delimiter = ',')]
        params: Vec<String>,
        /// Write the certificate here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check certificate files.
    Verify {
        files: Vec<PathBuf>,
        /// Comma-separated: proof, coset, normal-form, abelian.
        #[arg(long, value_delimiter = ',', default_value = "proof")]
        method: Vec<String>,
        #[arg(long)]
        max_cosets: Option<usize>,
        /// Treat conditionally verified certificates as failures.
        #[arg(long)]
        strict: bool,
    },
    /// Bi-orderability verdict for a manifold descriptor.
    Classify(ClassifyArgs),
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("target").required(true).args(["torus_bundle", "sol", "circle_bundle"])))]
struct ClassifyArgs {
    /// Monodromy entries `a,b,c,d`.
    #[arg(long, allow_hyphen_values = true)]
    torus_bundle: Option<String>,
    /// `twisted-i-bundle`, `semibundle` or `torusbundle:a=..,b=..,c=..,d=..`.
    #[arg(long)]
    sol: Option<String>,
    /// `base=<s2|p2|klein|orientable|nonorientable>,orientable=<bool>`, plus
    /// `genus=`, `boundary=` and `special=<s3|s1xs2|twisted-s1xs2|solid-klein>`.
    #[arg(long)]
    circle_bundle: Option<String>,
    /// Where to write the certificate, when the verdict has one.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

type CliResult = Result<i32, CliError>;

fn input(e: impl ToString) -> CliError {
    CliError::Input(e.to_string())
}

/// Runs the command line `args` (program name first) and returns the exit code.
pub fn run(args: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    0
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    2
                }
            };
        }
    };
    let start = Instant::now();
    let result = match cli.command {
        Command::Info { presentation } => info(&presentation, out),
        Command::Abelianize { presentation } => abelianize_cmd(&presentation, out),
        Command::Enumerate { presentation, max_cosets, subgroup, show_action } => {
            enumerate_cmd(&presentation, max_cosets, subgroup.as_deref(), show_action, out)
        }
        Command::Certify { family, params, out: path } => certify(&family, &params, path.as_deref(), out),
        Command::Verify { files, method, max_cosets, strict } => verify_cmd(&files, &method, max_cosets, strict, out),
        Command::Classify(args) => classify(&args, out),
    };
    let code = match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    };
    if cli.timings {
        let _ = writeln!(err, "elapsed: {:.3}s", start.elapsed().as_secs_f64());
    }
    code
}

/// Family shorthand first, then a presentation file.
fn load_presentation(reference: &str) -> Result<Presentation, CliError> {
    match reference.parse::<Family>() {
        Ok(family) => family.build().map_err(input),
        Err(family_err) => match std::fs::read_to_string(reference) {
            Ok(text) => Presentation::parse(&text).map_err(|e| input(format!("{reference}: {e}"))),
            Err(io_err) => Err(input(format!("`{reference}` is not family shorthand ({family_err}) nor a readable file ({io_err})"))),
        },
    }
}

fn info(reference: &str, out: &mut dyn Write) -> CliResult {
    let p = load_presentation(reference)?;
    writeln!(out, "label={}", p.label())?;
    let names: Vec<&str> = (0..p.generator_count()).map(|i| p.alphabet().name(i)).collect();
    writeln!(out, "generators={}", names.join(" "))?;
    writeln!(out, "relators={}", p.relators().len())?;
    for (i, r) in p.relators().iter().enumerate() {
        writeln!(out, "relator.{i}={r}")?;
    }
    Ok(0)
}

fn abelianize_cmd(reference: &str, out: &mut dyn Write) -> CliResult {
    let p = load_presentation(reference)?;
    let inv = abelianize(&p);
    writeln!(out, "{inv}")?;
    for i in 0..p.generator_count() {
        let g = p.alphabet().generator(i);
        let img = image(&p, &inv, &g).map_err(input)?;
        writeln!(out, "generator={} {img} order={}", p.alphabet().name(i), inv.order_of_image(&img))?;
    }
    Ok(0)
}

fn enumerate_cmd(
    reference: &str,
    max_cosets: Option<usize>,
    subgroup: Option<&str>,
    show_action: bool,
    out: &mut dyn Write,
) -> CliResult {
    let p = load_presentation(reference)?;
    let subgroup = subgroup
        .map(|s| s.split(',').map(|w| p.parse_word(w.trim()).map_err(input)).collect::<Result<Vec<_>, _>>())
        .transpose()?
        .unwrap_or_default();
    let table = enumerate(&p, &subgroup, max_cosets.unwrap_or_else(default_max_cosets)).map_err(input)?;
    match table.status() {
        CosetStatus::Complete => {
            writeln!(out, "status=complete")?;
            writeln!(out, "n_cosets={}", table.n_cosets())?;
            if subgroup.is_empty() {
                writeln!(out, "order={}", table.n_cosets())?;
            } else {
                writeln!(out, "index={}", table.n_cosets())?;
            }
            if show_action {
                for (i, perm) in table.actions().iter().enumerate() {
                    writeln!(out, "action.{}={perm}", p.alphabet().name(i))?;
                }
            }
        }
        CosetStatus::Aborted { limit } => {
            writeln!(out, "status=aborted")?;
            writeln!(out, "max_cosets={limit}")?;
        }
    }
    Ok(0)
}

fn build_for_family(family: &Family) -> Result<GtCertificate, CliError> {
    let cert = match *family {
        Family::Klein => build_klein_certificate(),
        Family::KbCircle => build_kb_circle_certificate(),
        Family::Fibonacci { m } => build_fibonacci_certificate(m).map_err(input)?,
        Family::TorusBundle(Monodromy { a, b, c, d }) => build_torus_bundle_certificate(a, b, c, d).map_err(input)?,
        Family::Rss { p, q, m } => build_rss_certificate(p, q, m).map_err(input)?,
        Family::Free { .. } => return Err(input("free groups have no generalized torsion")),
    };
    Ok(cert)
}

fn certify(name: &str, params: &[String], path: Option<&Path>, out: &mut dyn Write) -> CliResult {
    let params = params
        .iter()
        .map(|kv| {
            kv.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| input(format!("expected key=value, got `{kv}`")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let family = Family::from_parts(name, &params).map_err(input)?;
    let cert = build_for_family(&family)?;
    let text = render_certificate(&cert).map_err(input)?;
    match path {
        None => out.write_all(text.as_bytes())?,
        Some(path) => {
            std::fs::write(path, &text).map_err(|e| input(format!("cannot write {}: {e}", path.display())))?;
            writeln!(out, "family={family}")?;
            writeln!(out, "base={}", cert.base)?;
            writeln!(out, "factors={}", cert.factors.len())?;
            writeln!(out, "total_multiplicity={}", cert.total_multiplicity())?;
            writeln!(out, "steps={}", cert.proof.steps.len())?;
            writeln!(out, "evidence={}", cert.evidence.kind())?;
            writeln!(out, "certificate={}", path.display())?;
        }
    }
    Ok(0)
}

fn parse_methods(names: &[String], max_cosets: usize) -> Result<Vec<Method>, CliError> {
    names
        .iter()
        .map(|n| match n.trim() {
            "proof" => Ok(Method::Proof),
            "coset" => Ok(Method::CosetTable { max_cosets }),
            "normal-form" => Ok(Method::NormalForm),
            "abelian" => Ok(Method::Abelian),
            other => Err(input(format!("unknown method `{other}`; expected proof, coset, normal-form or abelian"))),
        })
        .collect()
}

fn verify_file(path: &Path, methods: &[Method]) -> Result<VerificationReport, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read: {e}"))?;
    let cert = parse_certificate(&text, path.parent()).map_err(|e| e.to_string())?;
    Ok(verify(&cert, methods))
}

fn verify_cmd(files: &[PathBuf], methods: &[String], max_cosets: Option<usize>, strict: bool, out: &mut dyn Write) -> CliResult {
    let methods = parse_methods(methods, max_cosets.unwrap_or_else(default_max_cosets))?;
    let results: Vec<Result<VerificationReport, String>> = files.par_iter().map(|f| verify_file(f, &methods)).collect();
    let (mut verified, mut conditional, mut failed) = (0, 0, 0);
    for (path, result) in files.iter().zip(&results) {
        writeln!(out, "file={}", path.display())?;
        match result {
            Ok(report) => {
                match report.status {
                    Status::Verified => verified += 1,
                    Status::ConditionallyVerified => conditional += 1,
                    Status::Failed => failed += 1,
                }
                write!(out, "{report}")?;
            }
            Err(e) => {
                failed += 1;
                writeln!(out, "status=error")?;
                writeln!(out, "error={e}")?;
            }
        }
    }
    writeln!(
        out,
        "summary: {} certificates, {verified} verified, {conditional} conditionally verified, {failed} failed",
        files.len()
    )?;
    Ok(if failed > 0 || (strict && conditional > 0) { 1 } else { 0 })
}

fn parse_bool(key: &str, v: &str) -> Result<bool, CliError> {
    match v {
        "true" | "yes" => Ok(true),
        "false" | "no" => Ok(false),
        _ => Err(input(format!("`{key}` must be true or false, got `{v}`"))),
    }
}

fn parse_circle_bundle(text: &str) -> Result<(Surface, bool, Option<SpecialManifold>), CliError> {
    let (mut base, mut orientable, mut special, mut genus, mut boundary) = (None, None, None, None, 0u32);
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = item.split_once('=').ok_or_else(|| input(format!("expected key=value, got `{item}`")))?;
        let (k, v) = (k.trim(), v.trim());
        match k {
            "base" => base = Some(v.to_string()),
            "orientable" => orientable = Some(parse_bool(k, v)?),
            "genus" => genus = Some(v.parse::<u32>().map_err(|_| input(format!("bad genus `{v}`")))?),
            "boundary" => boundary = v.parse().map_err(|_| input(format!("bad boundary count `{v}`")))?,
            "special" => {
                special = Some(match v {
                    "s3" => SpecialManifold::S3,
                    "s1xs2" => SpecialManifold::S1xS2,
                    "twisted-s1xs2" => SpecialManifold::TwistedS1S2,
                    "solid-klein" => SpecialManifold::SolidKlein,
                    _ => return Err(input(format!("unknown special manifold `{v}`"))),
                })
            }
            _ => return Err(input(format!("unknown circle-bundle key `{k}`"))),
        }
    }
    let base = base.ok_or_else(|| input("circle bundle needs base="))?;
    let surface = match base.as_str() {
        "s2" => Surface::S2,
        "p2" => Surface::P2,
        "klein" => Surface::Klein,
        "orientable" | "nonorientable" => Surface::Other {
            genus: genus.ok_or_else(|| input(format!("base={base} needs genus=")))?,
            orientable: base == "orientable",
            boundary,
        },
        other => return Err(input(format!("unknown base surface `{other}`"))),
    };
    if genus.is_some() && !matches!(surface, Surface::Other { .. }) {
        return Err(input("genus= only applies to base=orientable or base=nonorientable"));
    }
    Ok((surface, orientable.ok_or_else(|| input("circle bundle needs orientable="))?, special))
}

fn parse_monodromy(text: &str) -> Result<Monodromy, CliError> {
    let entries = text
        .split(',')
        .map(|s| s.trim().parse::<i64>().map_err(|_| input(format!("bad matrix entry `{}`", s.trim()))))
        .collect::<Result<Vec<_>, _>>()?;
    match entries[..] {
        [a, b, c, d] => Ok(Monodromy::new(a, b, c, d)),
        _ => Err(input(format!("expected four entries a,b,c,d, got `{text}`"))),
    }
}

fn parse_sol(text: &str) -> Result<SolDescriptor, CliError> {
    match text {
        "twisted-i-bundle" => Ok(SolDescriptor::TwistedIBundleKlein),
        "semibundle" => Ok(SolDescriptor::KleinOrTorusSemibundle),
        _ => match text.parse::<Family>() {
            Ok(Family::TorusBundle(m)) => Ok(SolDescriptor::TorusBundle(m)),
            _ => Err(input(format!("unknown Sol descriptor `{text}`; expected twisted-i-bundle, semibundle or torusbundle:a=..,b=..,c=..,d=.."))),
        },
    }
}

fn classify(args: &ClassifyArgs, out: &mut dyn Write) -> CliResult {
    let verdict: Verdict = if let Some(text) = &args.torus_bundle {
        classify_torus_bundle(parse_monodromy(text)?).map_err(input)?
    } else if let Some(text) = &args.sol {
        classify_sol(parse_sol(text)?).map_err(input)?
    } else if let Some(text) = &args.circle_bundle {
        let (base, orientable, special) = parse_circle_bundle(text)?;
        classify_circle_bundle(base, orientable, special).map_err(input)?
    } else {
        return Err(input("one of --torus-bundle, --sol, --circle-bundle is required"));
    };
    writeln!(out, "verdict={}", verdict.status)?;
    writeln!(out, "reason={}", verdict.reason)?;
    match (&verdict.certificate, &args.out) {
        (None, _) => writeln!(out, "certificate=none")?,
        (Some(_), None) => writeln!(out, "certificate=available")?,
        (Some(cert), Some(path)) => {
            let text = render_certificate(cert).map_err(input)?;
            std::fs::write(path, text).map_err(|e| input(format!("cannot write {}: {e}", path.display())))?;
            writeln!(out, "certificate={}", path.display())?;
            writeln!(out, "certificate_status={}", verify(cert, &[]).status)?;
        }
    }
    Ok(0)
}
