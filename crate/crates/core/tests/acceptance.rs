//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Every check compares library output with an oracle computed here.

use std::time::{Duration, Instant};

use gtcert::abelian::{abelianize, image, smith_normal_form, torsion_order, IntMatrix, Order};
use gtcert::certificates::{
    build_commutator_power_certificate, build_fibonacci_certificate, build_rss_certificate, build_torus_bundle_certificate,
    canonical_expression, claim_decomposition, factor_product, noncanonical_expression, torus_case, verify, Status,
};
use gtcert::classify::{classify_torus_bundle, BiOrderability};
use gtcert::coset::enumerate;
use gtcert::presentation::{fibonacci, free_group, rss, Monodromy};
use gtcert::word_problem::{check_proof, tb_eval, torus_alphabet, TbElement};
use gtcert::{Alphabet, Word};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fib(n: usize) -> BigInt {
    let (mut x, mut y) = (BigInt::zero(), BigInt::one());
    for _ in 0..n {
        let next = &x + &y;
        x = std::mem::replace(&mut y, next);
    }
    x
}

/// Signed letters `±(generator + 1)`, freely reduced with a stack.
fn naive_reduce(letters: impl IntoIterator<Item = i32>) -> Vec<i32> {
    let mut out: Vec<i32> = Vec::new();
    for x in letters {
        if out.last() == Some(&-x) {
            out.pop();
        } else {
            out.push(x);
        }
    }
    out
}

fn naive_inverse(w: &[i32]) -> Vec<i32> {
    w.iter().rev().map(|x| -x).collect()
}

fn naive_letters(w: &Word) -> Vec<i32> {
    w.letters().iter().map(|l| (l.generator() as i32 + 1) * if l.is_inverse() { -1 } else { 1 }).collect()
}

fn from_naive(al: &Alphabet, w: &[i32]) -> Word {
    Word::reduce(al, w.iter().map(|&x| ((x.unsigned_abs() - 1) as usize, x.signum() as i64)))
}

fn criterion_1() -> Outcome {
    let mut slowest = Duration::ZERO;
    for (m, order) in [(3, 8), (4, 5), (5, 11), (7, 29)] {
        let start = Instant::now();
        let table = enumerate(&fibonacci(m).unwrap(), &[], 1_000_000).map_err(|e| e.to_string())?;
        let elapsed = start.elapsed();
        slowest = slowest.max(elapsed);
        ensure(table.is_complete() && table.n_cosets() == order, || format!("m={m}: got {} cosets", table.n_cosets()))?;
        ensure(elapsed < Duration::from_secs(5), || format!("m={m} took {elapsed:?}"))?;
    }
    Ok(format!("orders 8, 5, 11, 29; slowest {:.3}s", slowest.as_secs_f64()))
}

fn criterion_2() -> Outcome {
    let mut checked = 0;
    for m in 3..=20usize {
        for i in 1..=m {
            let c = canonical_expression(m, i).map_err(|e| e.to_string())?;
            ensure(c.exponent_sum(1) == fib(i - 1), || format!("canonical m={m} i={i}: {}", c.exponent_sum(1)))?;
            let nc = noncanonical_expression(m, i).map_err(|e| e.to_string())?;
            let expected = if (m + i) % 2 == 0 { fib(m + 1 - i) } else { -fib(m + 1 - i) };
            ensure(nc.exponent_sum(1) == expected, || format!("noncanonical m={m} i={i}: {}", nc.exponent_sum(1)))?;
            checked += 2;
        }
    }
    Ok(format!("{checked} exponent sums for 3 <= m <= 20"))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    for m in 3..=12 {
        let cert = build_fibonacci_certificate(m).map_err(|e| format!("m={m}: {e}"))?;
        let product = cert.product();
        ensure(cert.proof.target == product, || format!("m={m}: proof target differs from product"))?;
        ensure(check_proof(&cert.presentation, &cert.proof) == Ok(true), || format!("m={m}: proof rejected"))?;
        if [3, 4, 5, 7].contains(&m) {
            let table = enumerate(&cert.presentation, &[], 1_000_000).map_err(|e| e.to_string())?;
            ensure(table.evaluate(&product).unwrap().is_identity(), || format!("m={m}: product nontrivial in table"))?;
            ensure(!table.evaluate(&cert.base).unwrap().is_identity(), || format!("m={m}: base trivial in table"))?;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(10), || format!("took {elapsed:?}"))?;
    Ok(format!("m = 3..12 proofs, tables for 3, 4, 5, 7; {:.3}s total", elapsed.as_secs_f64()))
}

/// Rejection-samples `det = 1`, `tr < 0` matrices in a case shape with entries in `[-50, 50]`.
fn sample_case_matrix(rng: &mut StdRng) -> Monodromy {
    loop {
        let (a, b, d) = (rng.gen_range(-50i64..=50), rng.gen_range(-50i64..=50), rng.gen_range(-50i64..=50));
        if b == 0 || (a * d - 1) % b != 0 {
            continue;
        }
        let c = (a * d - 1) / b;
        let m = Monodromy::new(a, b, c, d);
        if c.abs() <= 50 && torus_case(m).is_some() {
            return m;
        }
    }
}

fn criterion_4() -> Outcome {
    let mut rng = StdRng::seed_from_u64(4);
    let l = torus_alphabet().generator(0);
    let mut slowest = Duration::ZERO;
    let n = 240;
    for _ in 0..n {
        let m = sample_case_matrix(&mut rng);
        let start = Instant::now();
        let cert = build_torus_bundle_certificate(m.a, m.b, m.c, m.d).map_err(|e| format!("{m}: {e}"))?;
        let product = tb_eval(m, &cert.product()).map_err(|e| e.to_string())?;
        let base = tb_eval(m, &l).map_err(|e| e.to_string())?;
        let elapsed = start.elapsed();
        slowest = slowest.max(elapsed);
        ensure(product.is_identity(), || format!("{m}: product evaluates to {product}"))?;
        ensure(!base.is_identity(), || format!("{m}: l evaluates to identity"))?;
        ensure(elapsed < Duration::from_secs(1), || format!("{m}: took {elapsed:?}"))?;
    }
    Ok(format!("{n} matrices; slowest {:.3}s", slowest.as_secs_f64()))
}

/// Random `SL2(Z)` matrix as a product of elementary matrices.
fn random_sl2(rng: &mut StdRng, steps: usize) -> [[i64; 2]; 2] {
    let mut m = [[1i64, 0], [0, 1]];
    for _ in 0..steps {
        let k = rng.gen_range(-3i64..=3);
        m = if rng.gen_bool(0.5) {
            [[m[0][0] + k * m[1][0], m[0][1] + k * m[1][1]], m[1]]
        } else {
            [m[0], [m[1][0] + k * m[0][0], m[1][1] + k * m[0][1]]]
        };
    }
    m
}

fn criterion_5() -> Outcome {
    let mut rng = StdRng::seed_from_u64(5);
    let al = torus_alphabet();
    let (l, mg, t) = (al.generator(0), al.generator(1), al.generator(2));
    for _ in 0..100 {
        let [[a, b], [c, d]] = random_sl2(&mut rng, 6);
        let mono = Monodromy::new(a, b, c, d);
        let eval = |w: &Word| tb_eval(mono, w).map_err(|e| e.to_string());
        let lt = l.conjugate(&t).unwrap();
        let mt = mg.conjugate(&t).unwrap();
        let lt_d = lt.pow_i64(-d);
        let mt_b = mt.pow_i64(b);
        // normal forms predicted by the lattice action l^t = l^a m^b, m^t = l^c m^d
        let want_lt_d = TbElement::new(-(a as i128) * d as i128, -(b as i128) * d as i128, 0);
        let want_mt_b = TbElement::new(b as i128 * c as i128, b as i128 * d as i128, 0);
        ensure(eval(&lt_d)? == want_lt_d, || format!("{mono}: (l^t)^-d = {}", eval(&lt_d).unwrap()))?;
        ensure(eval(&mt_b)? == want_mt_b, || format!("{mono}: (m^t)^b = {}", eval(&mt_b).unwrap()))?;
        let rel = l.multiply(&lt_d).unwrap().multiply(&mt_b).unwrap();
        ensure(eval(&rel)?.is_identity(), || format!("{mono}: l (l^t)^-d (m^t)^b is not the identity"))?;
    }
    Ok("100 matrices".into())
}

fn criterion_6() -> Outcome {
    let mut cases = 0;
    let mut tight = 0;
    for p in 2..=9i64 {
        for q in 1..=p / 2 {
            if p.gcd(&q) != 1 {
                continue;
            }
            for m in -5..=5i64 {
                let cert = build_rss_certificate(p, q, m).map_err(|e| format!("({p},{q},{m}): {e}"))?;
                ensure(check_proof(&cert.presentation, &cert.proof) == Ok(true), || format!("({p},{q},{m}): proof rejected"))?;
                ensure(verify(&cert, &[]).status == Status::Verified, || format!("({p},{q},{m}): not verified"))?;
                let pres = rss(p, q, m).unwrap();
                let t = pres.alphabet().generator(2);
                let inv = abelianize(&pres);
                let img = image(&pres, &inv, &t).unwrap();
                let scaled: Vec<BigInt> = t.exponent_vector().iter().map(|x| x * p).collect();
                ensure(inv.image_of_vector(&scaled).is_zero(), || format!("({p},{q},{m}): p[t] != 0"))?;
                let order = match torsion_order(&pres, &t).unwrap() {
                    Order::Finite(n) => n,
                    Order::Infinite => return Err(format!("({p},{q},{m}): t has infinite order")),
                };
                ensure(inv.order_of_image(&img) == Order::Finite(order.clone()), || "order mismatch".into())?;
                ensure(BigInt::from(p).is_multiple_of(&order), || format!("({p},{q},{m}): order {order} does not divide p"))?;
                // invariant factors of Z_|m-2| + Z_p
                let k = BigInt::from((m - 2).abs());
                let g = k.gcd(&BigInt::from(p));
                let mut expected: Vec<BigInt> = vec![g.clone(), &k * p / &g];
                expected.retain(|x| !x.is_one());
                if m != 2 && inv.free_rank == 0 && inv.torsion == expected {
                    tight += 1;
                    ensure(order == BigInt::from(p), || format!("({p},{q},{m}): order {order}, expected {p}"))?;
                }
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} parameter triples; order = p checked on {tight}"))
}

fn random_free_word(rng: &mut StdRng, rank: i32, max_len: usize) -> Vec<i32> {
    let len = rng.gen_range(0..=max_len);
    (0..len).map(|_| rng.gen_range(1..=rank) * if rng.gen_bool(0.5) { 1 } else { -1 }).collect()
}

fn criterion_7() -> Outcome {
    let mut rng = StdRng::seed_from_u64(7);
    let p = free_group(3);
    let al = p.alphabet();
    for _ in 0..1000 {
        let e = random_free_word(&mut rng, 3, 10);
        let f = random_free_word(&mut rng, 3, 10);
        let alpha = rng.gen_range(1..=10u64);
        let (ew, fw) = (from_naive(al, &e), from_naive(al, &f));
        let (base, factors) = build_commutator_power_certificate(&ew, &fw, alpha).map_err(|e| e.to_string())?;
        // [e^alpha, f] from raw letters
        let e_pow: Vec<i32> = (0..alpha).flat_map(|_| e.iter().copied()).collect();
        let lhs = naive_reduce([e_pow.clone(), f.clone(), naive_inverse(&e_pow), naive_inverse(&f)].concat());
        let comm = naive_reduce([e.clone(), f.clone(), naive_inverse(&e), naive_inverse(&f)].concat());
        ensure(naive_letters(&base) == comm, || "base is not [e, f]".into())?;
        let product = naive_letters(&factor_product(&base, &factors));
        ensure(product == lhs, || format!("alpha={alpha}: product differs from [e^alpha, f]"))?;
        // [x^2, y] = [x, y]^(x^-1) [x, y]
        let x2: Vec<i32> = [e.clone(), e.clone()].concat();
        let lhs2 = naive_reduce([x2.clone(), f.clone(), naive_inverse(&x2), naive_inverse(&f)].concat());
        let rhs2 = naive_reduce([e.clone(), comm.clone(), naive_inverse(&e), comm.clone()].concat());
        ensure(lhs2 == rhs2, || "[x^2, y] identity failed".into())?;
        let (_, two) = build_commutator_power_certificate(&ew, &fw, 2).unwrap();
        ensure(naive_letters(&factor_product(&base, &two)) == lhs2, || "alpha = 2 factors differ from identity".into())?;
    }
    Ok("1000 instances".into())
}

fn criterion_8() -> Outcome {
    let mut rng = StdRng::seed_from_u64(8);
    let p = fibonacci(5).unwrap();
    let al = p.alphabet();
    let a = al.generator(0);
    for _ in 0..1000 {
        // a^m0 (b^n1 a^m1) ... b^-(n1 + ...), all a exponents positive
        let mut raw = vec![(0usize, rng.gen_range(1i64..=5))];
        let mut b_sum = 0;
        for _ in 0..rng.gen_range(0..=6) {
            let n = loop {
                let n = rng.gen_range(-5i64..=5);
                if n != 0 {
                    break n;
                }
            };
            b_sum += n;
            raw.push((1, n));
            raw.push((0, rng.gen_range(1i64..=5)));
        }
        if b_sum != 0 {
            raw.push((1, -b_sum));
        }
        let mut letters = Vec::new();
        for &(g, e) in &raw {
            let x = (g as i32 + 1) * e.signum() as i32;
            letters.extend(std::iter::repeat_n(x, e.unsigned_abs() as usize));
        }
        let w = from_naive(al, &letters);
        let factors = claim_decomposition(&w).map_err(|e| format!("{w}: {e}"))?;
        let mut expanded = Vec::new();
        for f in &factors {
            let c = naive_letters(&f.conjugator);
            for _ in 0..f.multiplicity {
                expanded.extend(naive_inverse(&c));
                expanded.push(1);
                expanded.extend(c.iter().copied());
            }
        }
        ensure(naive_reduce(expanded) == naive_reduce(letters), || format!("{w}: decomposition differs"))?;
        ensure(factor_product(&a, &factors) == w, || format!("{w}: product over base a differs"))?;
        let total: u64 = factors.iter().map(|f| f.multiplicity).sum();
        ensure(BigInt::from(total) == w.exponent_sum(0), || format!("{w}: multiplicities do not sum to the a-exponent"))?;
    }
    Ok("1000 words".into())
}

fn mat_mul(x: &[Vec<BigInt>], y: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let inner = y.len();
    let cols = y.first().map_or(0, Vec::len);
    x.iter().map(|row| (0..cols).map(|j| (0..inner).map(|k| &row[k] * &y[k][j]).sum()).collect()).collect()
}

/// Bareiss fraction-free elimination.
fn det(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    let mut a = m.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

fn to_rows(m: &IntMatrix) -> Vec<Vec<BigInt>> {
    (0..m.rows()).map(|r| m.row(r).to_vec()).collect()
}

fn criterion_9() -> Outcome {
    let mut rng = StdRng::seed_from_u64(9);
    for case in 0..500 {
        let (r, c) = (rng.gen_range(1..=8usize), rng.gen_range(1..=8usize));
        let rows: Vec<Vec<BigInt>> = (0..r).map(|_| (0..c).map(|_| BigInt::from(rng.gen_range(-100i64..=100))).collect()).collect();
        let snf = smith_normal_form(&IntMatrix::from_rows(&rows));
        let (u, d, v) = (to_rows(&snf.u), to_rows(&snf.d), to_rows(&snf.v));
        ensure(mat_mul(&mat_mul(&u, &rows), &v) == d, || format!("case {case}: U M V != D"))?;
        ensure(det(&u).abs().is_one() && det(&v).abs().is_one(), || format!("case {case}: U or V not unimodular"))?;
        for (i, row) in d.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                ensure(i == j || x.is_zero(), || format!("case {case}: D not diagonal"))?;
            }
        }
        let diag: Vec<BigInt> = (0..r.min(c)).map(|i| d[i][i].clone()).collect();
        ensure(diag.iter().all(|x| !x.is_negative()), || format!("case {case}: negative diagonal"))?;
        for w in diag.windows(2) {
            let divides = if w[0].is_zero() { w[1].is_zero() } else { w[1].is_multiple_of(&w[0]) };
            ensure(divides, || format!("case {case}: {} does not divide {}", w[0], w[1]))?;
        }
        let content = rows.iter().flatten().fold(BigInt::zero(), |g, x| g.gcd(x));
        ensure(diag[0] == content, || format!("case {case}: d1 = {} but gcd of entries = {content}", diag[0]))?;
    }
    Ok("500 matrices up to 8x8".into())
}

/// Positive eigenvalue by scanning the characteristic polynomial for a sign
/// change or root on the positive integers up to the root bound.
fn positive_eigenvalue_oracle(t: i128, det: i128) -> bool {
    let p = |x: i128| x * x - t * x + det;
    let bound = t.abs() + det.abs() + 1;
    let mut prev = p(0);
    for x in 1..=bound {
        let v = p(x);
        if v == 0 || (v < 0) != (prev < 0) {
            return true;
        }
        prev = v;
    }
    false
}

fn criterion_10() -> Outcome {
    let mut rng = StdRng::seed_from_u64(10);
    let (mut neg_det, mut certified) = (0, 0);
    let mut n = 0;
    while n < 1000 {
        let steps = rng.gen_range(1..=8);
        let [[a, b], [c, d]] = random_sl2(&mut rng, steps);
        // flip a row half the time for det = -1
        let m = if rng.gen_bool(0.5) { Monodromy::new(-a, -b, c, d) } else { Monodromy::new(a, b, c, d) };
        if [m.a, m.b, m.c, m.d].iter().any(|x| x.abs() > 50) {
            continue;
        }
        n += 1;
        let v = classify_torus_bundle(m).map_err(|e| e.to_string())?;
        let oracle = positive_eigenvalue_oracle(m.trace(), m.det());
        ensure((v.status == BiOrderability::BiOrderable) == oracle, || format!("{m}: {} vs oracle {oracle}", v.status))?;
        if m.det() == -1 {
            neg_det += 1;
            ensure(v.status == BiOrderability::BiOrderable, || format!("{m}: det -1 but {}", v.status))?;
        }
        if m.det() == 1 && m.trace() <= -2 && torus_case(m).is_some() {
            let cert = v.certificate.as_ref().ok_or_else(|| format!("{m}: no certificate"))?;
            ensure(verify(cert, &[]).status == Status::Verified, || format!("{m}: certificate not verified"))?;
            certified += 1;
        }
    }
    Ok(format!("1000 matrices; {neg_det} with det -1, {certified} certified"))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("finite Fibonacci group orders", criterion_1),
        ("exponent-sum closed forms", criterion_2),
        ("Fibonacci certificates", criterion_3),
        ("torus-bundle certificates", criterion_4),
        ("torus-bundle fiber relations", criterion_5),
        ("RSS certificates", criterion_6),
        ("free commutator identities", criterion_7),
        ("claim decomposition", criterion_8),
        ("Smith normal form", criterion_9),
        ("classifier agreement", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS criterion {}: {name} ({detail})", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {}: {name} ({why})", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
