use num_integer::Integer;

use super::{factor_product, CertificateError, Evidence, Factor, GtCertificate, NormalFormEvidence};
use crate::presentation::{kb_circle_bundle, klein_bottle, rss};
use crate::word_problem::{compile_rewrite_trace, DerivationStep, KleinElement, Sign, TraceBuilder, TrivialityProof};
use crate::words::{Letter, Word};

/// `x` is generalized torsion in the Klein bottle group: `x (y^-1 x y) = 1`.
pub fn build_klein_certificate() -> GtCertificate {
    let p = klein_bottle();
    let base = p.alphabet().generator(0);
    let factors = vec![Factor::new(p.alphabet().identity(), 1), Factor::new(p.alphabet().generator(1), 1)];
    let target = factor_product(&base, &factors);
    let mut b = TraceBuilder::new(&p, &target).expect("same alphabet");
    // x y^-1 x y -> x y^-1 x y x x^-1 -> x x^-1 -> 1
    b.insert_pair(4, Letter::new(0, false)).expect("valid move");
    b.delete_relator(1, 0, Sign::Plus).expect("relator present");
    b.delete_pair(0).expect("valid move");
    let proof = compile_rewrite_trace(&p, &target, b.trace()).expect("trace ends empty");
    GtCertificate { presentation: p, base, factors, proof, evidence: Evidence::NormalForm(NormalFormEvidence::Klein(KleinElement::new(1, 0))) }
}

/// Base `[e, f]` and the factors of `[e^alpha, f]` as a product of its
/// conjugates, in the form `prod_{j = alpha-1 .. 0} [e, f]^(e^-j)`.
///
/// The identity holds in every group; when `[e^alpha, f] = 1` holds in a
/// given group, these factors form a generalized torsion certificate for
/// `[e, f]` there.
pub fn build_commutator_power_certificate(e: &Word, f: &Word, alpha: u64) -> Result<(Word, Vec<Factor>), CertificateError> {
    if alpha < 1 {
        return Err(CertificateError::Precondition("alpha must be positive".into()));
    }
    let base = e.commutator(f).map_err(|err| CertificateError::Precondition(err.to_string()))?;
    let factors = (0..alpha).rev().map(|j| Factor::new(e.pow_i64(-(j as i64)), 1)).collect();
    Ok((base, factors))
}

/// Certificate for `[x, y]` in `<x, y | x^2 y^2 central>`: there
/// `[x^2, y] = [x, y]^(x^-1) [x, y]` is itself a relator. Nontriviality of
/// `[x, y]` is cited, not checked.
pub fn build_kb_circle_certificate() -> GtCertificate {
    let p = kb_circle_bundle();
    let (x, y) = (p.alphabet().generator(0), p.alphabet().generator(1));
    let (base, factors) = build_commutator_power_certificate(&x, &y, 2).expect("alpha is 2");
    let target = factor_product(&base, &factors);
    let proof = TrivialityProof {
        target: target.clone(),
        steps: vec![DerivationStep { conjugator: p.alphabet().identity(), relator: 1, sign: Sign::Plus }],
    };
    debug_assert_eq!(&target, &p.relators()[1]);
    GtCertificate {
        presentation: p,
        base,
        factors,
        proof,
        evidence: Evidence::Cited("[x, y] is nontrivial: the group maps onto the nonabelian Klein bottle group".into()),
    }
}

/// Certificate for `t` in `G(p, q, m)` with `p >= 2q >= 2`:
/// `t^(p-2q) prod_j (t^(b t^(2j-1)) t^(b^-1 t^(2j)))` is conjugate to the
/// third relator.
pub fn build_rss_certificate(p: i64, q: i64, m: i64) -> Result<GtCertificate, CertificateError> {
    if q < 1 || p < 2 * q || p.gcd(&q) != 1 {
        return Err(CertificateError::Precondition(format!("rss certificate needs q >= 1, p >= 2q, gcd(p, q) = 1; got p={p}, q={q}")));
    }
    let pres = rss(p, q, m)?;
    let al = pres.alphabet().clone();
    let (a, bg, t) = (0, 1, 2);
    let base = al.generator(t);
    let mut factors = Vec::new();
    if p > 2 * q {
        factors.push(Factor::new(al.identity(), (p - 2 * q) as u64));
    }
    for j in 1..=q {
        factors.push(Factor::new(Word::reduce(&al, [(bg, 1), (t, 2 * j - 1)]), 1));
        factors.push(Factor::new(Word::reduce(&al, [(bg, -1), (t, 2 * j)]), 1));
    }
    let target = factor_product(&base, &factors);

    // target freely equals t^(p-2q) C^q t^(2q) with C = t^-1 b^-1 t b t^-1 b t b^-1
    let tl = |inv| Letter::new(t, inv);
    let bl = |inv| Letter::new(bg, inv);
    let al_ = |inv| Letter::new(a, inv);
    let c = [tl(true), bl(true), tl(false), bl(false), tl(true), bl(false), tl(false), bl(true)];
    let lead = (p - 2 * q) as usize;
    let mut expanded = vec![tl(false); lead];
    for _ in 0..q {
        expanded.extend_from_slice(&c);
    }
    expanded.extend(std::iter::repeat_n(tl(false), 2 * q as usize));

    let mut b = TraceBuilder::new(&pres, &target)?;
    b.expand_to(&expanded)?;
    // t^-1 b^-1 t -> a and t^-1 b t -> a^-1 turn each C into [a, b]
    for j in 0..q as usize {
        let o = lead + 4 * j;
        b.replace(o, 3, &[al_(false)])?;
        b.replace(o + 2, 3, &[al_(true)])?;
    }
    // conjugate t^p [a, b]^q by t^(2q) and erase it
    let n = 2 * q as usize;
    for i in 0..n {
        b.insert_pair(i, tl(true))?;
    }
    b.delete_relator(n, 2, Sign::Plus)?;
    for i in 0..n {
        b.delete_pair(n - 1 - i)?;
    }
    let proof = compile_rewrite_trace(&pres, &target, b.trace())?;
    Ok(GtCertificate { presentation: pres, base, factors, proof, evidence: Evidence::AbelianizationNonzero })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificates::{verify, Method, Status};
    use crate::presentation::free_group;

    #[test]
    fn klein_certificate_verifies() {
        let cert = build_klein_certificate();
        assert_eq!(cert.product().to_string(), "x y^-1 x y");
        assert_eq!(cert.proof.steps.len(), 1);
        let report = verify(&cert, &[Method::NormalForm]);
        assert_eq!(report.status, Status::Verified, "{report}");
    }

    #[test]
    fn commutator_power_identity_in_free_group() {
        let p = free_group(2);
        let (e, f) = (p.alphabet().generator(0), p.alphabet().generator(1));
        for alpha in 1..6u64 {
            let (base, factors) = build_commutator_power_certificate(&e, &f, alpha).unwrap();
            let lhs = e.pow_i64(alpha as i64).commutator(&f).unwrap();
            assert_eq!(factor_product(&base, &factors), lhs);
            assert_eq!(factors.len() as u64, alpha);
        }
        assert!(build_commutator_power_certificate(&e, &f, 0).is_err());
    }

    #[test]
    fn kb_circle_certificate_is_conditional() {
        let cert = build_kb_circle_certificate();
        assert_eq!(cert.product().to_string(), "x^2 y x^-2 y^-1");
        let report = verify(&cert, &[Method::Abelian]);
        assert_eq!(report.status, Status::ConditionallyVerified, "{report}");
    }

    #[test]
    fn rss_certificates_verify() {
        for (p, q, m) in [(5, 2, -3), (2, 1, 0), (7, 3, 2), (9, 2, 5)] {
            let cert = build_rss_certificate(p, q, m).unwrap();
            let report = verify(&cert, &[Method::Abelian]);
            assert_eq!(report.status, Status::Verified, "{p},{q},{m}: {report}");
            assert_eq!(cert.total_multiplicity(), p.into());
        }
        assert!(build_rss_certificate(3, 2, 0).is_err());
        assert!(build_rss_certificate(4, 2, 0).is_err());
    }
}
