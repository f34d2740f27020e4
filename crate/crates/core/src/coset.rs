//! Felsch-style Todd-Coxeter coset enumeration and permutation evaluation.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};
use thiserror::Error;

use crate::presentation::Presentation;
use crate::words::{reduce_letters, Letter, Word};

pub const DEFAULT_MAX_COSETS: usize = 1_000_000;
pub const MAX_COSETS_ENV: &str = "GTCERT_MAX_COSETS";

/// Default coset limit, overridable through `GTCERT_MAX_COSETS`.
pub fn default_max_cosets() -> usize {
    std::env::var(MAX_COSETS_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&n: &usize| n >= 1)
        .unwrap_or(DEFAULT_MAX_COSETS)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CosetError {
    #[error("coset table is incomplete (enumeration aborted at {limit} cosets)")]
    Incomplete { limit: usize },
    #[error("word is over a different alphabet than the table")]
    AlphabetMismatch,
    #[error("max_cosets must be at least 1")]
    InvalidLimit,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation(Vec<u32>);

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation((0..n as u32).collect())
    }

    /// Panics if `images` is not a permutation of `0..images.len()`.
    pub fn from_images(images: Vec<u32>) -> Self {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            assert!((i as usize) < images.len() && !seen[i as usize], "not a permutation");
            seen[i as usize] = true;
        }
        Permutation(images)
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn images(&self) -> &[u32] {
        &self.0
    }

    pub fn apply(&self, point: usize) -> usize {
        self.0[point] as usize
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i as u32 == j)
    }

    /// `self` followed by `other`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.degree(), other.degree(), "degree mismatch");
        Permutation(self.0.iter().map(|&i| other.0[i as usize]).collect())
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u32; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j as usize] = i as u32;
        }
        Permutation(inv)
    }

    pub fn order(&self) -> BigUint {
        let mut seen = vec![false; self.0.len()];
        let mut order = BigUint::one();
        for start in 0..self.0.len() {
            if seen[start] {
                continue;
            }
            let mut len = 0u64;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.0[i] as usize;
                len += 1;
            }
            order = order.lcm(&BigUint::from(len));
        }
        order
    }

    pub fn pow(&self, n: &BigInt) -> Permutation {
        let ord = BigInt::from(self.order());
        let mut e = n.mod_floor(&ord).to_u64().expect("reduced exponent fits");
        let mut base = self.clone();
        let mut acc = Permutation::identity(self.degree());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(&base);
            }
            base = base.compose(&base);
            e >>= 1;
        }
        acc
    }
}

impl fmt::Display for Permutation {
    /// One-based image list.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|i| (i + 1).to_string()).collect();
        f.write_str(&parts.join(" "))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CosetStatus {
    Complete,
    Aborted { limit: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetTable {
    presentation: Presentation,
    n_cosets: usize,
    /// One permutation per generator; empty unless complete.
    actions: Vec<Permutation>,
    status: CosetStatus,
}

impl CosetTable {
    pub fn n_cosets(&self) -> usize {
        self.n_cosets
    }

    pub fn status(&self) -> CosetStatus {
        self.status
    }

    pub fn is_complete(&self) -> bool {
        self.status == CosetStatus::Complete
    }

    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    pub fn actions(&self) -> &[Permutation] {
        &self.actions
    }

    fn check(&self, w: &Word) -> Result<(), CosetError> {
        if let CosetStatus::Aborted { limit } = self.status {
            return Err(CosetError::Incomplete { limit });
        }
        if w.alphabet() != self.presentation.alphabet() {
            return Err(CosetError::AlphabetMismatch);
        }
        Ok(())
    }

    /// Permutation of the cosets induced by right multiplication by `w`.
    pub fn evaluate(&self, w: &Word) -> Result<Permutation, CosetError> {
        self.check(w)?;
        let mut acc = Permutation::identity(self.n_cosets);
        for s in w.syllables() {
            acc = acc.compose(&self.actions[s.generator].pow(&s.exponent));
        }
        Ok(acc)
    }

    /// Image of the base coset under `w`, without building the full permutation.
    pub fn base_point_image(&self, w: &Word) -> Result<usize, CosetError> {
        self.check(w)?;
        let mut point = 0usize;
        for s in w.syllables() {
            let perm = &self.actions[s.generator];
            let perm = if s.exponent.is_negative() { perm.inverse() } else { perm.clone() };
            let n = s.exponent.abs().mod_floor(&BigInt::from(perm.order()));
            let mut k = n.to_u64().expect("reduced exponent fits");
            while k > 0 {
                point = perm.apply(point);
                k -= 1;
            }
        }
        Ok(point)
    }

    pub fn order_of(&self, w: &Word) -> Result<BigUint, CosetError> {
        Ok(self.evaluate(w)?.order())
    }
}

const UNDEF: u32 = u32::MAX;

struct Enumerator {
    ncols: usize,
    table: Vec<u32>,
    parent: Vec<u32>,
    live: usize,
    max_cosets: usize,
    /// Relator cyclic conjugates (and their inverses), grouped by first column.
    conjugates: Vec<Vec<Vec<usize>>>,
    subgroup: Vec<Vec<usize>>,
    deductions: Vec<(u32, usize)>,
    aborted: bool,
}

impl Enumerator {
    fn get(&self, c: u32, x: usize) -> u32 {
        self.table[c as usize * self.ncols + x]
    }

    fn put(&mut self, c: u32, x: usize, v: u32) {
        self.table[c as usize * self.ncols + x] = v;
    }

    fn n_allocated(&self) -> u32 {
        self.parent.len() as u32
    }

    fn rep(&mut self, c: u32) -> u32 {
        let mut r = c;
        while self.parent[r as usize] != r {
            r = self.parent[r as usize];
        }
        let mut c = c;
        while self.parent[c as usize] != r {
            let next = self.parent[c as usize];
            self.parent[c as usize] = r;
            c = next;
        }
        r
    }

    fn is_live(&self, c: u32) -> bool {
        self.parent[c as usize] == c
    }

    fn new_coset(&mut self) -> Option<u32> {
        if self.live >= self.max_cosets {
            self.aborted = true;
            return None;
        }
        let c = self.n_allocated();
        self.parent.push(c);
        self.table.extend(std::iter::repeat_n(UNDEF, self.ncols));
        self.live += 1;
        Some(c)
    }

    fn define(&mut self, c: u32, x: usize) -> Option<u32> {
        let d = self.new_coset()?;
        self.put(c, x, d);
        self.put(d, x ^ 1, c);
        self.deductions.push((c, x));
        Some(d)
    }

    /// Traces `word` from `start` to `start` in both directions and records a
    /// deduction or coincidence if one is forced. When `fill` is set, gaps
    /// are closed by defining new cosets.
    fn scan(&mut self, start: u32, word: &[usize], fill: bool) {
        // word[..i] is traced forward from `start` to `f`, word[j..] backward to `b`
        let mut f = start;
        let mut i = 0usize;
        let mut b = start;
        let mut j = word.len();
        loop {
            while i < j && self.get(f, word[i]) != UNDEF {
                f = self.get(f, word[i]);
                i += 1;
            }
            while j > i && self.get(b, word[j - 1] ^ 1) != UNDEF {
                b = self.get(b, word[j - 1] ^ 1);
                j -= 1;
            }
            if i == j {
                if f != b {
                    self.coincidence(f, b);
                }
                return;
            }
            if j == i + 1 {
                self.put(f, word[i], b);
                self.put(b, word[i] ^ 1, f);
                self.deductions.push((f, word[i]));
                return;
            }
            if !fill || self.define(f, word[i]).is_none() {
                return;
            }
        }
    }

    fn merge(&mut self, k: u32, l: u32, queue: &mut Vec<u32>) {
        let p = self.rep(k);
        let q = self.rep(l);
        if p == q {
            return;
        }
        let (mu, nu) = if p < q { (p, q) } else { (q, p) };
        self.parent[nu as usize] = mu;
        self.live -= 1;
        queue.push(nu);
    }

    fn coincidence(&mut self, a: u32, b: u32) {
        let mut queue = Vec::new();
        self.merge(a, b, &mut queue);
        let mut idx = 0;
        while idx < queue.len() {
            let e = queue[idx];
            idx += 1;
            for x in 0..self.ncols {
                let delta = self.get(e, x);
                if delta == UNDEF {
                    continue;
                }
                self.put(e, x, UNDEF);
                if self.get(delta, x ^ 1) == e {
                    self.put(delta, x ^ 1, UNDEF);
                }
                let mu = self.rep(e);
                let nu = self.rep(delta);
                let mx = self.get(mu, x);
                if mx != UNDEF {
                    self.merge(nu, mx, &mut queue);
                    continue;
                }
                let nx = self.get(nu, x ^ 1);
                if nx != UNDEF {
                    self.merge(mu, nx, &mut queue);
                    continue;
                }
                self.put(mu, x, nu);
                self.put(nu, x ^ 1, mu);
                self.deductions.push((mu, x));
            }
        }
    }

    fn process_deductions(&mut self) {
        while let Some((c, x)) = self.deductions.pop() {
            if !self.is_live(c) {
                continue;
            }
            let d = self.get(c, x);
            if d == UNDEF {
                continue;
            }
            for k in 0..self.conjugates[x].len() {
                if !self.is_live(c) {
                    break;
                }
                let w = std::mem::take(&mut self.conjugates[x][k]);
                self.scan(c, &w, false);
                self.conjugates[x][k] = w;
            }
            let d = if self.is_live(c) { self.get(c, x) } else { UNDEF };
            if d == UNDEF || !self.is_live(d) {
                continue;
            }
            let xi = x ^ 1;
            for k in 0..self.conjugates[xi].len() {
                if !self.is_live(d) {
                    break;
                }
                let w = std::mem::take(&mut self.conjugates[xi][k]);
                self.scan(d, &w, false);
                self.conjugates[xi][k] = w;
            }
        }
    }

    fn scan_subgroup(&mut self) {
        for k in 0..self.subgroup.len() {
            let w = std::mem::take(&mut self.subgroup[k]);
            self.scan(0, &w, true);
            self.subgroup[k] = w;
            if self.aborted {
                return;
            }
            self.process_deductions();
        }
    }

    fn first_gap(&self, from: u32) -> Option<(u32, usize)> {
        for c in from..self.n_allocated() {
            if !self.is_live(c) {
                continue;
            }
            for x in 0..self.ncols {
                if self.get(c, x) == UNDEF {
                    return Some((c, x));
                }
            }
        }
        None
    }

    /// Full consistency pass over a complete table. Returns true if nothing changed.
    fn verify_all(&mut self) -> bool {
        let before = (self.live, self.table.len());
        let mut rels: Vec<Vec<usize>> = Vec::new();
        for group in &self.conjugates {
            rels.extend(group.iter().cloned());
        }
        for c in 0..self.n_allocated() {
            for w in &rels {
                if !self.is_live(c) {
                    break;
                }
                self.scan(c, w, false);
            }
            self.process_deductions();
        }
        self.scan_subgroup();
        self.process_deductions();
        before == (self.live, self.table.len()) && self.first_gap(0).is_none()
    }

    fn run(&mut self) {
        self.new_coset().expect("max_cosets >= 1");
        self.scan_subgroup();
        let mut cursor = 0u32;
        loop {
            if self.aborted {
                return;
            }
            match self.first_gap(cursor) {
                Some((c, x)) => {
                    cursor = c;
                    if self.define(c, x).is_none() {
                        return;
                    }
                    self.process_deductions();
                }
                None => {
                    if self.first_gap(0).is_some() {
                        cursor = 0;
                        continue;
                    }
                    if self.verify_all() {
                        return;
                    }
                    cursor = 0;
                }
            }
        }
    }
}

fn columns(letters: &[Letter]) -> Vec<usize> {
    letters.iter().map(|l| l.column()).collect()
}

fn cyclically_reduce(letters: &[Letter]) -> Vec<Letter> {
    let mut w = reduce_letters(letters);
    while w.len() >= 2 && w[0] == w[w.len() - 1].inverse() {
        w.pop();
        w.remove(0);
    }
    w
}

/// Enumerates the cosets of the subgroup generated by `subgroup` in the group
/// presented by `p`. Stops with an `Aborted` status once more than
/// `max_cosets` cosets would be live at the same time.
pub fn enumerate(p: &Presentation, subgroup: &[Word], max_cosets: usize) -> Result<CosetTable, CosetError> {
    if max_cosets < 1 {
        return Err(CosetError::InvalidLimit);
    }
    if subgroup.iter().any(|w| w.alphabet() != p.alphabet()) {
        return Err(CosetError::AlphabetMismatch);
    }
    let ncols = 2 * p.generator_count();
    let mut conjugates: Vec<Vec<Vec<usize>>> = vec![Vec::new(); ncols];
    for r in p.relators() {
        let core = cyclically_reduce(&r.letters());
        if core.is_empty() {
            continue;
        }
        let inv: Vec<Letter> = core.iter().rev().map(|l| l.inverse()).collect();
        for w in [core, inv] {
            let cols = columns(&w);
            for k in 0..cols.len() {
                let mut rot = cols[k..].to_vec();
                rot.extend_from_slice(&cols[..k]);
                if !conjugates[rot[0]].contains(&rot) {
                    conjugates[rot[0]].push(rot);
                }
            }
        }
    }
    let subgroup_cols: Vec<Vec<usize>> = subgroup.iter().map(|w| columns(&w.letters())).collect();

    if ncols == 0 {
        let status = CosetStatus::Complete;
        return Ok(CosetTable { presentation: p.clone(), n_cosets: 1, actions: Vec::new(), status });
    }

    let mut e = Enumerator {
        ncols,
        table: Vec::new(),
        parent: Vec::new(),
        live: 0,
        max_cosets,
        conjugates,
        subgroup: subgroup_cols,
        deductions: Vec::new(),
        aborted: false,
    };
    e.run();
    if e.aborted {
        return Ok(CosetTable {
            presentation: p.clone(),
            n_cosets: e.live,
            actions: Vec::new(),
            status: CosetStatus::Aborted { limit: max_cosets },
        });
    }

    // renumber live cosets in definition order
    let mut index = vec![UNDEF; e.parent.len()];
    let mut n = 0u32;
    for c in 0..e.n_allocated() {
        if e.is_live(c) {
            index[c as usize] = n;
            n += 1;
        }
    }
    let mut actions = Vec::with_capacity(p.generator_count());
    for g in 0..p.generator_count() {
        let mut images = Vec::with_capacity(n as usize);
        for c in 0..e.n_allocated() {
            if e.is_live(c) {
                images.push(index[e.get(c, 2 * g) as usize]);
            }
        }
        actions.push(Permutation::from_images(images));
    }
    Ok(CosetTable { presentation: p.clone(), n_cosets: n as usize, actions, status: CosetStatus::Complete })
}
