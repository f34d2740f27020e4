//! Text format for certificates.
//!
//! ```text
//! format: gtcert/1
//! presentation: fibonacci:m=4
//! base: a1
//! factor: 1 | 1
//! factor: a2^-2 | 3
//! factor: a2^-1 | 1
//! target: a1 a2^2 a1^3 a2^-1 a1 a2^-1
//! step: a2^-1 a1^-1 | 2 | -1
//! ...
//! evidence: finite-quotient order=5
//! ```
//!
//! `presentation` is either family shorthand or a path to a presentation
//! file, resolved against the certificate's directory.

use std::path::Path;

use num_bigint::BigInt;

use super::{CertificateError, Evidence, Factor, GtCertificate, NormalFormEvidence};
use crate::presentation::{Family, Presentation};
use crate::word_problem::{parse_step, KleinElement, TbElement, TrivialityProof};

const FORMAT: &str = "gtcert/1";

fn render_evidence(e: &Evidence) -> String {
    match e {
        Evidence::AbelianizationNonzero => "abelianization".into(),
        Evidence::FiniteQuotient { order } => format!("finite-quotient order={order}"),
        Evidence::NormalForm(NormalFormEvidence::Klein(k)) => format!("normal-form klein {k}"),
        Evidence::NormalForm(NormalFormEvidence::TorusBundle { monodromy, element }) => {
            format!("normal-form torusbundle {monodromy} {element}")
        }
        Evidence::Cited(text) => format!("cited {text}"),
    }
}

/// Renders with the presentation given as family shorthand; fails when the
/// presentation is not a family member.
pub fn render_certificate(cert: &GtCertificate) -> Result<String, CertificateError> {
    let family: Family = cert
        .presentation
        .label()
        .parse()
        .map_err(|_| CertificateError::Precondition("presentation is not a named family; give a file reference".into()))?;
    if family.build().ok().as_ref() != Some(&cert.presentation) {
        return Err(CertificateError::Precondition(format!("presentation differs from `{family}`; give a file reference")));
    }
    Ok(render_certificate_with_reference(cert, &family.to_string()))
}

pub fn render_certificate_with_reference(cert: &GtCertificate, reference: &str) -> String {
    let mut out = format!("format: {FORMAT}\npresentation: {reference}\nbase: {}\n", cert.base);
    for f in &cert.factors {
        out.push_str(&format!("factor: {f}\n"));
    }
    out.push_str(&cert.proof.render());
    out.push_str(&format!("evidence: {}\n", render_evidence(&cert.evidence)));
    out
}

fn err(line: usize, message: impl Into<String>) -> CertificateError {
    CertificateError::Parse { line, message: message.into() }
}

fn key_values(text: &str) -> Vec<(&str, &str)> {
    text.split_whitespace().filter_map(|kv| kv.split_once('=')).collect()
}

fn big(line: usize, s: Option<&str>) -> Result<BigInt, CertificateError> {
    s.and_then(|s| s.parse().ok()).ok_or_else(|| err(line, "missing or malformed integer"))
}

fn parse_evidence(line: usize, text: &str) -> Result<Evidence, CertificateError> {
    let (kind, rest) = text.split_once(char::is_whitespace).unwrap_or((text, ""));
    let rest = rest.trim();
    let kv = key_values(rest);
    let get = |k: &str| kv.iter().find(|(key, _)| *key == k).map(|(_, v)| *v);
    match kind {
        "abelianization" => Ok(Evidence::AbelianizationNonzero),
        "finite-quotient" => {
            let order = get("order").and_then(|s| s.parse().ok()).ok_or_else(|| err(line, "finite-quotient needs order=N"))?;
            Ok(Evidence::FiniteQuotient { order })
        }
        "cited" if !rest.is_empty() => Ok(Evidence::Cited(rest.to_string())),
        "normal-form" => {
            let (engine, fields) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
            match engine {
                "klein" => Ok(Evidence::NormalForm(NormalFormEvidence::Klein(KleinElement::new(big(line, get("p"))?, big(line, get("q"))?)))),
                "torusbundle" => {
                    let matrix = fields.split_whitespace().next().unwrap_or("");
                    let monodromy = match format!("torusbundle:{matrix}").parse::<Family>() {
                        Ok(Family::TorusBundle(m)) => m,
                        Ok(_) => return Err(err(line, "bad monodromy")),
                        Err(e) => return Err(err(line, e.to_string())),
                    };
                    let v = get("v").ok_or_else(|| err(line, "torusbundle evidence needs v=x,y"))?;
                    let (v0, v1) = v.split_once(',').ok_or_else(|| err(line, "v must be x,y"))?;
                    let element = TbElement::new(big(line, Some(v0))?, big(line, Some(v1))?, big(line, get("k"))?);
                    Ok(Evidence::NormalForm(NormalFormEvidence::TorusBundle { monodromy, element }))
                }
                other => Err(err(line, format!("unknown normal-form engine `{other}`"))),
            }
        }
        other => Err(err(line, format!("unknown evidence kind `{other}`"))),
    }
}

fn load_presentation(line: usize, reference: &str, base_dir: Option<&Path>) -> Result<Presentation, CertificateError> {
    if let Ok(family) = reference.parse::<Family>() {
        return Ok(family.build()?);
    }
    let path = match base_dir {
        Some(dir) => dir.join(reference),
        None => Path::new(reference).to_path_buf(),
    };
    let text = std::fs::read_to_string(&path)
        .map_err(|e| err(line, format!("`{reference}` is neither family shorthand nor a readable file: {e}")))?;
    Ok(Presentation::parse(&text)?)
}

/// Parses a certificate; relative presentation paths resolve against `base_dir`.
pub fn parse_certificate(text: &str, base_dir: Option<&Path>) -> Result<GtCertificate, CertificateError> {
    let mut presentation: Option<Presentation> = None;
    let mut base = None;
    let mut factors = Vec::new();
    let mut evidence = None;
    let mut proof_lines = String::new();
    let mut format_seen = false;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (key, value) = trimmed.split_once(':').ok_or_else(|| err(line, format!("expected `key: value`, got `{trimmed}`")))?;
        let value = value.trim();
        let needs_pres = || presentation.as_ref().ok_or_else(|| err(line, "`presentation:` must come first"));
        match key.trim() {
            "format" => {
                if value != FORMAT {
                    return Err(err(line, format!("unsupported format version `{value}`")));
                }
                format_seen = true;
            }
            "presentation" => {
                if presentation.is_some() {
                    return Err(err(line, "second `presentation:` line"));
                }
                presentation = Some(load_presentation(line, value, base_dir)?);
            }
            "base" => base = Some(needs_pres()?.parse_word(value).map_err(|e| err(line, e.to_string()))?),
            "factor" => {
                let p = needs_pres()?;
                let (conj, mult) = value.rsplit_once('|').ok_or_else(|| err(line, "factor must be `conjugator | multiplicity`"))?;
                let conjugator = p.parse_word(conj.trim()).map_err(|e| err(line, e.to_string()))?;
                let multiplicity: u64 = mult.trim().parse().map_err(|_| err(line, format!("bad multiplicity `{}`", mult.trim())))?;
                if multiplicity == 0 {
                    return Err(err(line, "multiplicity must be positive"));
                }
                factors.push(Factor::new(conjugator, multiplicity));
            }
            "evidence" => evidence = Some(parse_evidence(line, value)?),
            "target" | "step" => {
                needs_pres()?;
                if key.trim() == "step" {
                    parse_step(presentation.as_ref().unwrap().alphabet(), value).map_err(|e| err(line, e.to_string()))?;
                }
                proof_lines.push_str(trimmed);
                proof_lines.push('\n');
            }
            other => return Err(err(line, format!("unknown key `{other}`"))),
        }
    }
    if !format_seen {
        return Err(err(1, format!("missing `format: {FORMAT}` header")));
    }
    let presentation = presentation.ok_or_else(|| err(1, "missing `presentation:`"))?;
    let proof = TrivialityProof::parse(presentation.alphabet(), &proof_lines).map_err(|e| err(0, e.to_string()))?;
    Ok(GtCertificate {
        base: base.ok_or_else(|| err(1, "missing `base:`"))?,
        evidence: evidence.ok_or_else(|| err(1, "missing `evidence:`"))?,
        presentation,
        factors,
        proof,
    })
}
