//! Abelianization through integer Smith normal form.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::presentation::Presentation;
use crate::words::{Word, WordError};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, entries: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = BigInt::one();
        }
        m
    }

    /// Panics if `entries.len() != rows * cols`.
    pub fn from_vec(rows: usize, cols: usize, entries: Vec<BigInt>) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count does not match dimensions");
        IntMatrix { rows, cols, entries }
    }

    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            entries.extend(r.iter().cloned().map(Into::into));
        }
        IntMatrix { rows: rows.len(), cols, entries }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigInt) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[BigInt] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    /// Panics on a dimension mismatch.
    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out.entries[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    /// Row vector times matrix.
    pub fn left_apply(&self, x: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(x.len(), self.rows, "dimension mismatch");
        let mut out = vec![BigInt::zero(); self.cols];
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                *o += xi * self.get(i, j);
            }
        }
        out
    }

    /// Determinant by fraction-free (Bareiss) elimination. Panics if not square.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.entries.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k * n + k].is_zero() {
                let Some(swap) = (k + 1..n).find(|&i| !a[i * n + k].is_zero()) else {
                    return BigInt::zero();
                };
                for j in 0..n {
                    a.swap(k * n + j, swap * n + j);
                }
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i * n + j] * &a[k * n + k] - &a[i * n + k] * &a[k * n + j];
                    a[i * n + j] = v / &prev;
                }
            }
            prev = a[k * n + k].clone();
        }
        sign * &a[n * n - 1]
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i != j {
            for c in 0..self.cols {
                self.entries.swap(i * self.cols + c, j * self.cols + c);
            }
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i != j {
            for r in 0..self.rows {
                self.entries.swap(r * self.cols + i, r * self.cols + j);
            }
        }
    }

    /// row[dst] += k * row[src]
    fn add_row(&mut self, dst: usize, src: usize, k: &BigInt) {
        for c in 0..self.cols {
            let v = k * &self.entries[src * self.cols + c];
            self.entries[dst * self.cols + c] += v;
        }
    }

    /// col[dst] += k * col[src]
    fn add_col(&mut self, dst: usize, src: usize, k: &BigInt) {
        for r in 0..self.rows {
            let v = k * &self.entries[r * self.cols + src];
            self.entries[r * self.cols + dst] += v;
        }
    }

    fn negate_row(&mut self, r: usize) {
        for c in 0..self.cols {
            let v = -&self.entries[r * self.cols + c];
            self.entries[r * self.cols + c] = v;
        }
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for r in 0..self.rows {
            if r > 0 {
                f.write_str(", ")?;
            }
            f.write_str("[")?;
            for c in 0..self.cols {
                if c > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{}", self.get(r, c))?;
            }
            f.write_str("]")?;
        }
        f.write_str("]")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithForm {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl SmithForm {
    /// The diagonal of `D`.
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows.min(self.d.cols)).map(|i| self.d.get(i, i).clone()).collect()
    }
}

/// Returns `U, D, V` with `U * M * V = D`, `U` and `V` unimodular, `D` diagonal
/// with nonnegative entries `d_1 | d_2 | ...`.
///
/// The pivot is always the smallest nonzero entry by absolute value in the
/// remaining block, ties broken by lowest `(row, col)`.
pub fn smith_normal_form(m: &IntMatrix) -> SmithForm {
    let mut d = m.clone();
    let mut u = IntMatrix::identity(m.rows);
    let mut v = IntMatrix::identity(m.cols);
    let n = m.rows.min(m.cols);
    for t in 0..n {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..d.rows {
                for j in t..d.cols {
                    let x = d.get(i, j);
                    if x.is_zero() {
                        continue;
                    }
                    if best.is_none_or(|(bi, bj)| x.abs() < d.get(bi, bj).abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return SmithForm { u, d, v };
            };
            d.swap_rows(t, pi);
            u.swap_rows(t, pi);
            d.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let pivot = d.get(t, t).clone();
            let mut dirty = false;
            for i in t + 1..d.rows {
                if d.get(i, t).is_zero() {
                    continue;
                }
                let q = -d.get(i, t).div_floor(&pivot);
                d.add_row(i, t, &q);
                u.add_row(i, t, &q);
                dirty |= !d.get(i, t).is_zero();
            }
            for j in t + 1..d.cols {
                if d.get(t, j).is_zero() {
                    continue;
                }
                let q = -d.get(t, j).div_floor(&pivot);
                d.add_col(j, t, &q);
                v.add_col(j, t, &q);
                dirty |= !d.get(t, j).is_zero();
            }
            if dirty {
                continue;
            }
            let offending = (t + 1..d.rows).find(|&i| (t + 1..d.cols).any(|j| !d.get(i, j).is_multiple_of(&pivot)));
            if let Some(i) = offending {
                d.add_row(t, i, &BigInt::one());
                u.add_row(t, i, &BigInt::one());
                continue;
            }
            if pivot.is_negative() {
                d.negate_row(t);
                u.negate_row(t);
            }
            break;
        }
    }
    SmithForm { u, d, v }
}

/// Additive order of an element of a finitely generated abelian group.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Order {
    Finite(BigInt),
    Infinite,
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(n) => write!(f, "{n}"),
            Order::Infinite => f.write_str("infinite"),
        }
    }
}

/// Coordinates of an element of `Z^r + Z/d_1 + ... + Z/d_k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AbelianImage {
    /// Residues modulo the matching torsion coefficients.
    pub torsion: Vec<BigInt>,
    pub free: Vec<BigInt>,
}

impl AbelianImage {
    pub fn is_zero(&self) -> bool {
        self.torsion.iter().chain(&self.free).all(Zero::is_zero)
    }
}

impl fmt::Display for AbelianImage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[BigInt]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        write!(f, "free=[{}] torsion=[{}]", join(&self.free), join(&self.torsion))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbelianInvariants {
    /// Invariant factors `d_i >= 2` with `d_i | d_{i+1}`.
    pub torsion: Vec<BigInt>,
    pub free_rank: usize,
    /// Column transform `V`; a generator exponent vector `x` maps to `x V`.
    transform: IntMatrix,
    /// First coordinate of `x V` kept as a torsion coordinate.
    first_torsion: usize,
}

impl AbelianInvariants {
    pub fn from_relator_matrix(m: &IntMatrix) -> Self {
        let snf = smith_normal_form(m);
        let diag = snf.diagonal();
        let nonzero = diag.iter().take_while(|x| !x.is_zero()).count();
        let first_torsion = diag.iter().take_while(|x| x.is_one()).count();
        AbelianInvariants {
            torsion: diag[first_torsion..nonzero].to_vec(),
            free_rank: m.cols() - nonzero,
            transform: snf.v,
            first_torsion,
        }
    }

    pub fn generator_count(&self) -> usize {
        self.transform.rows()
    }

    pub fn is_trivial(&self) -> bool {
        self.torsion.is_empty() && self.free_rank == 0
    }

    /// Order of the whole group, when finite.
    pub fn order(&self) -> Order {
        if self.free_rank > 0 {
            Order::Infinite
        } else {
            Order::Finite(self.torsion.iter().product())
        }
    }

    /// Panics if `x` has the wrong length.
    pub fn image_of_vector(&self, x: &[BigInt]) -> AbelianImage {
        let y = self.transform.left_apply(x);
        let k = self.torsion.len();
        let torsion = self
            .torsion
            .iter()
            .zip(&y[self.first_torsion..self.first_torsion + k])
            .map(|(d, yi)| yi.mod_floor(d))
            .collect();
        let free = y[self.first_torsion + k..].to_vec();
        AbelianImage { torsion, free }
    }

    pub fn order_of_image(&self, image: &AbelianImage) -> Order {
        if image.free.iter().any(|x| !x.is_zero()) {
            return Order::Infinite;
        }
        let mut order = BigInt::one();
        for (d, y) in self.torsion.iter().zip(&image.torsion) {
            order = order.lcm(&(d / d.gcd(y)));
        }
        Order::Finite(order)
    }
}

impl fmt::Display for AbelianInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t: Vec<String> = self.torsion.iter().map(|d| d.to_string()).collect();
        write!(f, "rank={} torsion=[{}]", self.free_rank, t.join(","))
    }
}

/// Exponent-sum matrix: one row per relator, one column per generator.
pub fn relator_matrix(p: &Presentation) -> IntMatrix {
    let rows: Vec<Vec<BigInt>> = p.relators().iter().map(|r| r.exponent_vector()).collect();
    if rows.is_empty() {
        return IntMatrix::zeros(0, p.generator_count());
    }
    IntMatrix::from_rows(&rows)
}

pub fn abelianize(p: &Presentation) -> AbelianInvariants {
    AbelianInvariants::from_relator_matrix(&relator_matrix(p))
}

pub fn image(p: &Presentation, inv: &AbelianInvariants, w: &Word) -> Result<AbelianImage, WordError> {
    if w.alphabet() != p.alphabet() {
        return Err(WordError::AlphabetMismatch);
    }
    Ok(inv.image_of_vector(&w.exponent_vector()))
}

pub fn torsion_order(p: &Presentation, w: &Word) -> Result<Order, WordError> {
    let inv = abelianize(p);
    let img = image(p, &inv, w)?;
    Ok(inv.order_of_image(&img))
}
