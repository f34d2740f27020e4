use super::{factor_product, CertificateError, Evidence, Factor, GtCertificate, NormalFormEvidence};
use crate::presentation::{torus_bundle, Monodromy};
use crate::word_problem::{compile_rewrite_trace, TbElement, TraceBuilder, TraceError};
use crate::words::{Letter, Word};

const L: usize = 0;
const M: usize = 1;
const T: usize = 2;

/// Diagonal sign pattern of a monodromy with `det = 1` and negative trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TorusCase {
    /// `a <= 0` and `d <= 0`.
    NonPositiveDiagonal,
    /// `a > 0` and `d < 0`.
    MixedDiagonal,
}

/// The case shape of `A`, or `None` when the torus-bundle builder does not
/// apply (`det != 1`, `tr >= 0`, or `a < 0 < d`).
pub fn torus_case(a: Monodromy) -> Option<TorusCase> {
    if a.det() != 1 || a.trace() >= 0 {
        return None;
    }
    if a.a <= 0 && a.d <= 0 {
        Some(TorusCase::NonPositiveDiagonal)
    } else if a.a > 0 && a.d < 0 {
        Some(TorusCase::MixedDiagonal)
    } else {
        None
    }
}

fn power(generator: usize, e: i64) -> impl Iterator<Item = Letter> {
    std::iter::repeat_n(Letter::new(generator, e < 0), e.unsigned_abs() as usize)
}

fn multiplicity(x: i128) -> Result<u64, CertificateError> {
    u64::try_from(x).map_err(|_| CertificateError::Precondition(format!("multiplicity {x} out of range")))
}

/// The fiber `l` is generalized torsion when `det A = 1` and `tr A < 0`:
/// `l (l^t)^(-a-d) l^(t^2) = 1`, since `1 + tr(A) C + C^2 = 0` on the fiber
/// lattice.
pub fn build_torus_bundle_certificate(a: i64, b: i64, c: i64, d: i64) -> Result<GtCertificate, CertificateError> {
    let mono = Monodromy::new(a, b, c, d);
    let case = torus_case(mono).ok_or_else(|| {
        CertificateError::Precondition(format!(
            "monodromy {mono} needs det 1, negative trace and a, d <= 0 or a > 0 > d (det={}, tr={})",
            mono.det(),
            mono.trace()
        ))
    })?;
    let pres = torus_bundle(a, b, c, d)?;
    let al = pres.alphabet().clone();
    let base = al.generator(L);
    let t = al.generator(T);
    let mut factors = vec![Factor::new(al.identity(), 1)];
    match case {
        TorusCase::NonPositiveDiagonal => {
            for e in [d, a] {
                if e < 0 {
                    factors.push(Factor::new(t.clone(), multiplicity(-(e as i128))?));
                }
            }
        }
        TorusCase::MixedDiagonal => factors.push(Factor::new(t.clone(), multiplicity(-mono.trace())?)),
    }
    factors.push(Factor::new(t.pow_i64(2), 1));
    let target = factor_product(&base, &factors);
    let trace = fiber_trace(mono, &pres, &target)?;
    let proof = compile_rewrite_trace(&pres, &target, &trace)?;
    let evidence = Evidence::NormalForm(NormalFormEvidence::TorusBundle { monodromy: mono, element: TbElement::new(1, 0, 0) });
    Ok(GtCertificate { presentation: pres, base, factors, proof, evidence })
}

/// Image of `t^-1 z t` for a fiber letter `z`.
fn conjugated_block(mono: Monodromy, z: Letter) -> Vec<Letter> {
    let (x, y) = if z.generator() == L { (mono.a, mono.b) } else { (mono.c, mono.d) };
    if z.is_inverse() {
        power(M, -y).chain(power(L, -x)).collect()
    } else {
        power(L, x).chain(power(M, y)).collect()
    }
}

/// Swaps the adjacent fiber letters at `pos` with one commutator.
fn swap(b: &mut TraceBuilder, pos: usize) -> Result<(), TraceError> {
    let (u, v) = (b.letters()[pos], b.letters()[pos + 1]);
    b.replace(pos, 2, &[v, u])
}

/// Commutators needed to append `block` to `first^x second^y`, and the
/// resulting exponents.
fn collect_cost(block: &[Letter], first: usize, mut x: i64, mut y: i64) -> (u64, i64, i64) {
    let mut cost = 0;
    for z in block {
        if z.generator() == first {
            cost += y.unsigned_abs();
            x += z.sign();
        } else {
            y += z.sign();
        }
    }
    (cost, x, y)
}

/// Order of the fiber word `x = l^p (m^s)^q` and its commutator cost when
/// conjugated letter by letter and collected into `first^X second^Y`,
/// minimized over all orders.
fn best_order(mono: Monodromy, first: usize) -> (u64, Vec<Letter>) {
    let (p, q) = (mono.d.unsigned_abs() as usize, mono.b.unsigned_abs() as usize);
    let (l, m) = (Letter::new(L, false), Letter::new(M, mono.b < 0));
    let (bl, bm) = (conjugated_block(mono, l), conjugated_block(mono, m));
    let (_, lx, ly) = collect_cost(&bl, first, 0, 0);
    let (_, mx, my) = collect_cost(&bm, first, 0, 0);
    let start = if first == L { (1, 0) } else { (0, 1) };
    let at = |i: usize, j: usize| (start.0 + i as i64 * lx + j as i64 * mx, start.1 + i as i64 * ly + j as i64 * my);
    // cost[i][j]: cheapest way to conjugate i copies of l and j of m
    let mut cost = vec![vec![u64::MAX; q + 1]; p + 1];
    let mut from_l = vec![vec![false; q + 1]; p + 1];
    cost[0][0] = 0;
    for i in 0..=p {
        for j in 0..=q {
            let here = cost[i][j];
            if here == u64::MAX {
                continue;
            }
            let (x, y) = at(i, j);
            if i < p {
                let c = here + collect_cost(&bl, first, x, y).0;
                if c < cost[i + 1][j] {
                    cost[i + 1][j] = c;
                    from_l[i + 1][j] = true;
                }
            }
            if j < q {
                let c = here + collect_cost(&bm, first, x, y).0;
                if c < cost[i][j + 1] {
                    cost[i][j + 1] = c;
                    from_l[i][j + 1] = false;
                }
            }
        }
    }
    let mut order = Vec::with_capacity(p + q);
    let (mut i, mut j) = (p, q);
    while i + j > 0 {
        if from_l[i][j] {
            order.push(l);
            i -= 1;
        } else {
            order.push(m);
            j -= 1;
        }
    }
    order.reverse();
    (cost[p][q], order)
}

fn inconsistent(b: &TraceBuilder, message: &str) -> TraceError {
    TraceError::Inconsistent { step: b.trace().len(), message: message.into() }
}

/// Rewrites `l t^-1 l^T t^-1 l t^2` (with `T = -tr A`) to the empty word.
fn fiber_trace(mono: Monodromy, pres: &crate::Presentation, target: &Word) -> Result<Vec<crate::word_problem::Rewrite>, CertificateError> {
    let tr = (-mono.trace()) as usize;
    let (l, ti, tt) = (Letter::new(L, false), Letter::new(T, true), Letter::new(T, false));
    let mut start = vec![l, ti];
    start.extend(std::iter::repeat_n(l, tr));
    start.extend([ti, l, tt, tt]);
    let mut b = TraceBuilder::new(pres, target)?;
    b.expand_to(&start)?;

    // t^-1 l t -> l^a m^b, then merge into l t^-1 l^-d m^b t
    b.replace(2 + tr, 3, &conjugated_block(mono, l))?;
    b.free_reduce()?;
    let (p, q) = (mono.d.unsigned_abs() as usize, mono.b.unsigned_abs() as usize);
    let n = p + q;
    let mut expect = vec![l, ti];
    expect.extend(power(L, -mono.d).chain(power(M, mono.b)));
    expect.push(tt);
    if b.letters() != expect.as_slice() {
        return Err(inconsistent(&b, "unexpected word after the first substitution").into());
    }

    // conjugating letter by letter and collecting the images costs one
    // commutator per swap; pick the cheaper normal form and letter order
    let (first, goal) = {
        let (cl, ol) = best_order(mono, L);
        let (cm, om) = best_order(mono, M);
        if cl <= cm { (L, ol) } else { (M, om) }
    };
    for (k, &want) in goal.iter().enumerate() {
        if b.letters()[2 + k] != want {
            let j = (k + 1..n).find(|&j| b.letters()[2 + j] == want).expect("same letter multiset");
            for pos in (k..j).rev() {
                swap(&mut b, 2 + pos)?;
            }
        }
    }

    // collect into first^X second^Y at the front
    let (mut x, mut y) = if first == L { (1i64, 0i64) } else { (0, 1) };
    let mut len = 1usize;
    for k in 0..n {
        if k + 1 < n {
            b.insert_pair(len + 2, tt)?;
        }
        let block = conjugated_block(mono, b.letters()[len + 1]);
        b.replace(len, 3, &block)?;
        for _ in 0..block.len() {
            let z = b.letters()[len];
            if z.generator() != first {
                if y != 0 && y.signum() != z.sign() {
                    b.delete_pair(len - 1)?;
                    len -= 1;
                } else {
                    len += 1;
                }
                y += z.sign();
            } else {
                for s in 0..y.unsigned_abs() as usize {
                    swap(&mut b, len - 1 - s)?;
                }
                let xs = x.unsigned_abs() as usize;
                if x != 0 && x.signum() != z.sign() {
                    b.delete_pair(xs - 1)?;
                    len -= 1;
                } else {
                    len += 1;
                }
                x += z.sign();
            }
        }
    }
    if !b.letters().is_empty() {
        return Err(inconsistent(&b, "fiber word did not collect to the identity").into());
    }
    Ok(b.into_trace())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificates::{verify, Method, Status};
    use crate::word_problem::tb_eval;
    use proptest::prelude::*;

    fn lattice_oracle(m: Monodromy, factors: &[Factor]) -> [i128; 2] {
        // sum of C^k e1 weighted by multiplicity, with C = A^T and k the t-power of the conjugator
        let mut total = [0i128, 0];
        for f in factors {
            let k = f.conjugator.exponent_sum(T).to_string().parse::<u32>().unwrap();
            let mut v = [1i128, 0];
            for _ in 0..k {
                v = [m.a as i128 * v[0] + m.c as i128 * v[1], m.b as i128 * v[0] + m.d as i128 * v[1]];
            }
            total[0] += v[0] * f.multiplicity as i128;
            total[1] += v[1] * f.multiplicity as i128;
        }
        total
    }

    #[test]
    fn documented_matrices() {
        let cert = build_torus_bundle_certificate(0, -1, 1, -1).unwrap();
        assert_eq!(cert.product().to_string(), "l t^-1 l t^-1 l t^2");
        let cert = build_torus_bundle_certificate(1, 1, -3, -2).unwrap();
        let shown: Vec<String> = cert.factors.iter().map(ToString::to_string).collect();
        assert_eq!(shown, ["1 | 1", "t | 1", "t^2 | 1"]);
        let cert = build_torus_bundle_certificate(-1, 0, 0, -1).unwrap();
        let shown: Vec<String> = cert.factors.iter().map(ToString::to_string).collect();
        assert_eq!(shown, ["1 | 1", "t | 1", "t | 1", "t^2 | 1"]);
        let m = Monodromy::new(-1, 0, 0, -1);
        assert!(tb_eval(m, &cert.product()).unwrap().is_identity());
        assert_eq!(verify(&cert, &[Method::NormalForm]).status, Status::Verified);
    }

    #[test]
    fn rejects_non_case_shapes() {
        assert!(build_torus_bundle_certificate(2, 1, 1, 1).is_err()); // trace positive
        assert!(build_torus_bundle_certificate(-1, 1, 0, -2).is_err()); // det 2
        assert!(build_torus_bundle_certificate(-3, 1, -1, 0).is_ok());
        assert!(build_torus_bundle_certificate(-5, 3, -8, 2).is_err()); // a < 0 < d
        assert_eq!(torus_case(Monodromy::new(2, 1, -7, -3)), Some(TorusCase::MixedDiagonal));
    }

    #[test]
    fn large_entries() {
        for (a, b, c, d) in [(-50, 49, -51, 49 - 1), (-49, -50, -48, -49), (1, -50, 0, 1)] {
            let m = Monodromy::new(a, b, c, d);
            if torus_case(m).is_none() {
                continue;
            }
            let cert = build_torus_bundle_certificate(a, b, c, d).unwrap();
            assert_eq!(verify(&cert, &[]).status, Status::Verified);
        }
    }

    fn case_matrix() -> impl Strategy<Value = Monodromy> {
        (-12i64..=12, -12i64..=12, -12i64..=12).prop_filter_map("needs an integral c with det 1", |(a, b, d)| {
            if b == 0 || (a * d - 1) % b != 0 {
                return None;
            }
            let m = Monodromy::new(a, b, (a * d - 1) / b, d);
            torus_case(m).map(|_| m)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn certificates_verify(m in case_matrix()) {
            let cert = build_torus_bundle_certificate(m.a, m.b, m.c, m.d).unwrap();
            prop_assert_eq!(lattice_oracle(m, &cert.factors), [0, 0]);
            prop_assert!(tb_eval(m, &cert.product()).unwrap().is_identity());
            prop_assert_eq!(verify(&cert, &[]).status, Status::Verified);
        }
    }
}
