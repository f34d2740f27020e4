//! Bi-orderability verdicts for torus bundles, circle bundles and Sol
//! manifolds with boundary, with certificates where one can be built.

use std::fmt;

use thiserror::Error;

use crate::certificates::{
    build_kb_circle_certificate, build_klein_certificate, build_torus_bundle_certificate, torus_case, CertificateError,
    Evidence, GtCertificate,
};
use crate::presentation::Monodromy;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("monodromy {0} has determinant {1}, expected 1 or -1")]
    NotUnimodular(Monodromy, i128),
    #[error("malformed descriptor: {0}")]
    Malformed(String),
    #[error(transparent)]
    Certificate(#[from] CertificateError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BiOrderability {
    BiOrderable,
    NotBiOrderable,
    OutOfScope,
}

impl fmt::Display for BiOrderability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BiOrderability::BiOrderable => "bi-orderable",
            BiOrderability::NotBiOrderable => "not-bi-orderable",
            BiOrderability::OutOfScope => "out-of-scope",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub status: BiOrderability,
    pub reason: String,
    pub certificate: Option<GtCertificate>,
}

impl Verdict {
    fn new(status: BiOrderability, reason: impl Into<String>) -> Self {
        Verdict { status, reason: reason.into(), certificate: None }
    }

    fn with_certificate(mut self, cert: GtCertificate) -> Self {
        self.certificate = Some(cert);
        self
    }
}

/// Whether `[[a, b], [c, d]]` has a positive real eigenvalue, by the signs of
/// trace, determinant and discriminant of `x^2 - tr x + det`.
pub fn has_positive_eigenvalue(m: Monodromy) -> bool {
    let (t, det) = (m.trace(), m.det());
    if det < 0 {
        return true;
    }
    let disc = t * t - 4 * det;
    disc >= 0 && t > 0
}

/// Torus bundles are bi-orderable exactly when the monodromy has a positive
/// eigenvalue. With `det = 1`, negative trace and a case-shaped matrix, the
/// negative verdict carries a certificate for the fiber `l`.
pub fn classify_torus_bundle(m: Monodromy) -> Result<Verdict, ClassifyError> {
    if !m.is_unimodular() {
        return Err(ClassifyError::NotUnimodular(m, m.det()));
    }
    if has_positive_eigenvalue(m) {
        return Ok(Verdict::new(BiOrderability::BiOrderable, "monodromy has a positive real eigenvalue"));
    }
    let verdict = Verdict::new(BiOrderability::NotBiOrderable, "monodromy has no positive real eigenvalue");
    if torus_case(m).is_some() {
        let cert = build_torus_bundle_certificate(m.a, m.b, m.c, m.d)?;
        return Ok(verdict.with_certificate(cert));
    }
    Ok(verdict)
}

/// Base surface of a circle bundle. `genus` counts handles for orientable
/// surfaces and cross-caps for non-orientable ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Surface {
    S2,
    P2,
    Klein,
    Other { genus: u32, orientable: bool, boundary: u32 },
}

impl Surface {
    /// Rewrites closed `Other` surfaces that have a dedicated variant.
    fn normalized(self) -> Result<Surface, ClassifyError> {
        match self {
            Surface::Other { orientable: false, genus: 0, .. } => {
                Err(ClassifyError::Malformed("a non-orientable surface needs at least one cross-cap".into()))
            }
            Surface::Other { genus: 0, orientable: true, boundary: 0 } => Ok(Surface::S2),
            Surface::Other { genus: 1, orientable: false, boundary: 0 } => Ok(Surface::P2),
            Surface::Other { genus: 2, orientable: false, boundary: 0 } => Ok(Surface::Klein),
            s => Ok(s),
        }
    }
}

/// Manifolds with bi-orderable groups that are not covered by the
/// circle-bundle rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpecialManifold {
    S3,
    S1xS2,
    TwistedS1S2,
    SolidKlein,
}

pub fn classify_circle_bundle(
    base: Surface,
    bundle_orientable: bool,
    special: Option<SpecialManifold>,
) -> Result<Verdict, ClassifyError> {
    if let Some(s) = special {
        let reason = match s {
            SpecialManifold::S3 => "trivial fundamental group",
            SpecialManifold::S1xS2 | SpecialManifold::TwistedS1S2 | SpecialManifold::SolidKlein => {
                "infinite cyclic fundamental group"
            }
        };
        return Ok(Verdict::new(BiOrderability::BiOrderable, reason));
    }
    let base = base.normalized()?;
    if !bundle_orientable {
        if base == Surface::S2 {
            return Err(ClassifyError::Malformed("every circle bundle over S2 is orientable".into()));
        }
        return Ok(Verdict::new(BiOrderability::NotBiOrderable, "a loop reverses the fiber f, so f f^t = 1"));
    }
    Ok(match base {
        Surface::S2 => Verdict::new(
            BiOrderability::NotBiOrderable,
            "finite cyclic fundamental group unless the manifold is S3 or S1xS2",
        ),
        Surface::P2 => Verdict::new(BiOrderability::NotBiOrderable, "fundamental group has torsion"),
        Surface::Klein => Verdict::new(BiOrderability::NotBiOrderable, "x^2 y^2 is central, so [x^2, y] = [x, y]^(x^-1) [x, y] = 1")
            .with_certificate(build_kb_circle_certificate()),
        Surface::Other { .. } => {
            Verdict::new(BiOrderability::BiOrderable, "orientable circle bundle over a surface other than S2, P2 and the Klein bottle")
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolDescriptor {
    TorusBundle(Monodromy),
    TwistedIBundleKlein,
    /// Union of two twisted I-bundles over the Klein bottle, or a torus
    /// semibundle containing one.
    KleinOrTorusSemibundle,
}

pub fn classify_sol(descriptor: SolDescriptor) -> Result<Verdict, ClassifyError> {
    match descriptor {
        SolDescriptor::TorusBundle(m) => classify_torus_bundle(m),
        SolDescriptor::TwistedIBundleKlein => Ok(Verdict::new(
            BiOrderability::NotBiOrderable,
            "fundamental group is the Klein bottle group, where x x^y = 1",
        )
        .with_certificate(build_klein_certificate())),
        SolDescriptor::KleinOrTorusSemibundle => {
            let cert = GtCertificate {
                evidence: Evidence::Cited("the Klein bottle in the semibundle is pi1-injective".into()),
                ..build_klein_certificate()
            };
            Ok(Verdict::new(BiOrderability::NotBiOrderable, "contains a pi1-injective Klein bottle").with_certificate(cert))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificates::{verify, Method, Status};
    use proptest::prelude::*;

    /// Eigenvalue sign oracle by bracketing roots of the characteristic
    /// polynomial over the rationals with exact integer arithmetic.
    fn oracle(m: Monodromy) -> bool {
        let (t, det) = (m.trace(), m.det());
        let p = |x: i128| x * x - t * x + det;
        // roots are bounded by |t| + |det| + 1; scan sign changes and double roots
        let bound = t.abs() + det.abs() + 1;
        let mut prev = p(0);
        if prev == 0 && t > 0 {
            return true;
        }
        for x in 1..=bound {
            let v = p(x);
            if v == 0 || (v < 0) != (prev < 0) {
                return true;
            }
            prev = v;
        }
        // a double root strictly between integers: vertex t/2 with p(t/2) = 0
        t > 0 && t * t == 4 * det
    }

    #[test]
    fn documented_torus_bundles() {
        let v = classify_torus_bundle(Monodromy::new(1, 0, 0, 1)).unwrap();
        assert_eq!(v.status, BiOrderability::BiOrderable);
        let v = classify_torus_bundle(Monodromy::new(-1, 0, 0, -1)).unwrap();
        assert_eq!(v.status, BiOrderability::NotBiOrderable);
        assert_eq!(verify(v.certificate.as_ref().unwrap(), &[Method::NormalForm]).status, Status::Verified);
        assert_eq!(classify_torus_bundle(Monodromy::new(2, 1, 1, 1)).unwrap().status, BiOrderability::BiOrderable);
        assert!(classify_torus_bundle(Monodromy::new(2, 0, 0, 1)).is_err());
        let v = classify_torus_bundle(Monodromy::new(0, -1, 1, 0)).unwrap();
        assert_eq!((v.status, v.certificate.is_none()), (BiOrderability::NotBiOrderable, true));
    }

    #[test]
    fn circle_bundles() {
        let c = |base, o, s| classify_circle_bundle(base, o, s).unwrap().status;
        assert_eq!(c(Surface::S2, true, Some(SpecialManifold::S3)), BiOrderability::BiOrderable);
        assert_eq!(c(Surface::Klein, true, None), BiOrderability::NotBiOrderable);
        let torus = Surface::Other { genus: 1, orientable: true, boundary: 0 };
        assert_eq!(c(torus, true, None), BiOrderability::BiOrderable);
        assert_eq!(c(torus, false, None), BiOrderability::NotBiOrderable);
        assert_eq!(c(Surface::Other { genus: 2, orientable: false, boundary: 0 }, true, None), BiOrderability::NotBiOrderable);
        assert_eq!(c(Surface::Other { genus: 2, orientable: false, boundary: 1 }, true, None), BiOrderability::BiOrderable);
        assert!(classify_circle_bundle(Surface::Other { genus: 0, orientable: false, boundary: 0 }, true, None).is_err());
        assert!(classify_circle_bundle(Surface::S2, false, None).is_err());
        let v = classify_circle_bundle(Surface::Klein, true, None).unwrap();
        assert_eq!(verify(v.certificate.as_ref().unwrap(), &[]).status, Status::ConditionallyVerified);
    }

    #[test]
    fn sol_descriptors() {
        let v = classify_sol(SolDescriptor::TwistedIBundleKlein).unwrap();
        assert_eq!(verify(v.certificate.as_ref().unwrap(), &[]).status, Status::Verified);
        let v = classify_sol(SolDescriptor::TorusBundle(Monodromy::new(0, -1, 1, -1))).unwrap();
        assert_eq!(v.status, BiOrderability::NotBiOrderable);
        assert!(v.certificate.is_some());
        let v = classify_sol(SolDescriptor::TorusBundle(Monodromy::new(1, 1, 0, 1))).unwrap();
        assert_eq!(v.status, BiOrderability::BiOrderable);
        let v = classify_sol(SolDescriptor::KleinOrTorusSemibundle).unwrap();
        assert_eq!(verify(v.certificate.as_ref().unwrap(), &[]).status, Status::ConditionallyVerified);
    }

    proptest! {
        #[test]
        fn eigenvalue_test_matches_oracle(a in -40i64..=40, b in -40i64..=40, c in -40i64..=40, d in -40i64..=40) {
            let m = Monodromy::new(a, b, c, d);
            prop_assert_eq!(has_positive_eigenvalue(m), oracle(m));
        }
    }
}
