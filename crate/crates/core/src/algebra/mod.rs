//! Polynomials in `a` and `a†` with complex coefficients.
//!
//! Two reorderings are provided. [`Polynomial::normal_order`] is an operator
//! identity: it rewrites `a a† → a† a + 1` until every creation operator
//! stands left of every annihilation operator. [`Polynomial::formal_normal_order`]
//! is the `:…:` map, which only counts letters and drops commutator terms.

mod parse;

pub use parse::parse_polynomial;

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::fock::{CMatrix, FockSpace, Operator, C64};

pub const DEFAULT_DEGREE_CAP: usize = 16;
/// Coefficients at or below this magnitude are dropped after combining like terms.
pub const PRUNE_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ladder {
    A,
    Adag,
}

impl Ladder {
    pub fn dagger(self) -> Ladder {
        match self {
            Ladder::A => Ladder::Adag,
            Ladder::Adag => Ladder::A,
        }
    }
}

pub type Word = Vec<Ladder>;

#[derive(Debug, Clone, PartialEq)]
pub struct LadderMonomial {
    pub coefficient: C64,
    pub word: Word,
}

/// Sum of words with nonzero coefficients; like words are combined.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    terms: BTreeMap<Word, C64>,
    cap: usize,
}

impl Default for Polynomial {
    fn default() -> Self {
        Polynomial::zero()
    }
}

fn prune<K: Ord>(terms: &mut BTreeMap<K, C64>) {
    terms.retain(|_, c| c.norm() > PRUNE_TOL);
}

fn clean(c: C64) -> C64 {
    // -0.0 and +0.0 compare equal but print differently
    C64::new(c.re + 0.0, c.im + 0.0)
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial { terms: BTreeMap::new(), cap: DEFAULT_DEGREE_CAP }
    }

    pub fn scalar(c: C64) -> Self {
        Self::monomial(c, Vec::new())
    }

    pub fn one() -> Self {
        Self::scalar(C64::new(1.0, 0.0))
    }

    pub fn a() -> Self {
        Self::monomial(C64::new(1.0, 0.0), vec![Ladder::A])
    }

    pub fn adag() -> Self {
        Self::monomial(C64::new(1.0, 0.0), vec![Ladder::Adag])
    }

    /// `μa + νa†`.
    pub fn linear(mu: C64, nu: C64) -> Self {
        Self::a().scale(mu).add(&Self::adag().scale(nu))
    }

    /// `a e^{−iφ} + a† e^{iφ}`.
    pub fn quadrature(phase: f64) -> Self {
        Self::linear(C64::from_polar(1.0, -phase), C64::from_polar(1.0, phase))
    }

    pub fn monomial(c: C64, word: Word) -> Self {
        let mut terms = BTreeMap::new();
        if c.norm() > PRUNE_TOL {
            terms.insert(word, clean(c));
        }
        Polynomial { terms, cap: DEFAULT_DEGREE_CAP }
    }

    pub fn from_monomials(monomials: impl IntoIterator<Item = LadderMonomial>) -> Result<Self> {
        let mut p = Polynomial::zero();
        for m in monomials {
            if m.word.len() > p.cap {
                return Err(Error::DegreeCap { degree: m.word.len(), cap: p.cap });
            }
            *p.terms.entry(m.word).or_insert(C64::new(0.0, 0.0)) += m.coefficient;
        }
        prune(&mut p.terms);
        p.terms.values_mut().for_each(|c| *c = clean(*c));
        Ok(p)
    }

    pub fn with_degree_cap(mut self, cap: usize) -> Result<Self> {
        if self.degree() > cap {
            return Err(Error::DegreeCap { degree: self.degree(), cap });
        }
        self.cap = cap;
        Ok(self)
    }

    pub fn degree_cap(&self) -> usize {
        self.cap
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &C64)> {
        self.terms.iter()
    }

    pub fn monomials(&self) -> Vec<LadderMonomial> {
        self.terms.iter().map(|(w, c)| LadderMonomial { coefficient: *c, word: w.clone() }).collect()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }

    /// The constant value if the polynomial has no ladder letters.
    pub fn as_scalar(&self) -> Option<C64> {
        match self.terms.len() {
            0 => Some(C64::new(0.0, 0.0)),
            1 => self.terms.get(&Vec::new()).copied(),
            _ => None,
        }
    }

    pub fn scale(&self, c: C64) -> Self {
        let mut terms: BTreeMap<Word, C64> = self.terms.iter().map(|(w, v)| (w.clone(), v * c)).collect();
        prune(&mut terms);
        terms.values_mut().for_each(|v| *v = clean(*v));
        Polynomial { terms, cap: self.cap }
    }

    pub fn add(&self, other: &Polynomial) -> Self {
        let mut terms = self.terms.clone();
        for (w, c) in &other.terms {
            *terms.entry(w.clone()).or_insert(C64::new(0.0, 0.0)) += c;
        }
        prune(&mut terms);
        terms.values_mut().for_each(|v| *v = clean(*v));
        Polynomial { terms, cap: self.cap.max(other.cap) }
    }

    pub fn sub(&self, other: &Polynomial) -> Self {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    /// Word concatenation with multiplied coefficients.
    pub fn multiply(&self, other: &Polynomial) -> Result<Self> {
        let cap = self.cap.max(other.cap);
        let degree = self.degree() + other.degree();
        if !self.is_empty() && !other.is_empty() && degree > cap {
            return Err(Error::DegreeCap { degree, cap });
        }
        let mut terms: BTreeMap<Word, C64> = BTreeMap::new();
        for (w1, c1) in &self.terms {
            for (w2, c2) in &other.terms {
                let mut w = w1.clone();
                w.extend_from_slice(w2);
                *terms.entry(w).or_insert(C64::new(0.0, 0.0)) += c1 * c2;
            }
        }
        prune(&mut terms);
        terms.values_mut().for_each(|v| *v = clean(*v));
        Ok(Polynomial { terms, cap })
    }

    pub fn pow(&self, n: u32) -> Result<Self> {
        let mut out = Polynomial::one();
        out.cap = self.cap;
        for _ in 0..n {
            out = out.multiply(self)?;
        }
        Ok(out)
    }

    /// Reversed words with `a ↔ a†` and conjugated coefficients.
    pub fn adjoint(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(w, c)| (w.iter().rev().map(|l| l.dagger()).collect(), clean(c.conj())))
            .collect();
        Polynomial { terms, cap: self.cap }
    }

    /// `p†p`.
    pub fn gram(&self) -> Result<Self> {
        self.adjoint().multiply(self)
    }

    /// Canonical form equal to `self` as an operator.
    pub fn normal_order(&self) -> NormalForm {
        let mut memo: HashMap<Word, BTreeMap<(u32, u32), f64>> = HashMap::new();
        let mut terms: BTreeMap<(u32, u32), C64> = BTreeMap::new();
        for (w, c) in &self.terms {
            for (&jk, &mult) in word_normal_form(w, &mut memo).iter() {
                *terms.entry(jk).or_insert(C64::new(0.0, 0.0)) += c * mult;
            }
        }
        NormalForm::from_map(terms)
    }

    /// The `:…:` map: each word goes to `a†^j a^k` by letter count alone.
    pub fn formal_normal_order(&self) -> NormalForm {
        let mut terms: BTreeMap<(u32, u32), C64> = BTreeMap::new();
        for (w, c) in &self.terms {
            let j = w.iter().filter(|&&l| l == Ladder::Adag).count() as u32;
            let k = w.len() as u32 - j;
            *terms.entry((j, k)).or_insert(C64::new(0.0, 0.0)) += c;
        }
        NormalForm::from_map(terms)
    }

    /// Evaluates the polynomial as a product of truncated letter matrices.
    /// Differs from the normal-form image near the top of the space.
    pub fn direct_matrix(&self, space: FockSpace) -> Operator {
        let a = space.annihilation();
        let ad = space.creation();
        let n = space.dim();
        let mut acc = CMatrix::zeros(n, n);
        for (w, c) in &self.terms {
            let mut m = CMatrix::identity(n, n);
            for l in w {
                m = match l {
                    Ladder::A => m * a.matrix(),
                    Ladder::Adag => m * ad.matrix(),
                };
            }
            acc += m * *c;
        }
        Operator::from_matrix(space, acc).expect("shape matches space")
    }
}

fn word_normal_form(
    word: &[Ladder],
    memo: &mut HashMap<Word, BTreeMap<(u32, u32), f64>>,
) -> BTreeMap<(u32, u32), f64> {
    if let Some(hit) = memo.get(word) {
        return hit.clone();
    }
    let pair = word.windows(2).position(|p| p[0] == Ladder::A && p[1] == Ladder::Adag);
    let out = match pair {
        None => {
            let j = word.iter().take_while(|&&l| l == Ladder::Adag).count() as u32;
            let mut m = BTreeMap::new();
            m.insert((j, word.len() as u32 - j), 1.0);
            m
        }
        Some(i) => {
            // u A Adag v  =  u Adag A v  +  u v
            let mut swapped = word.to_vec();
            swapped.swap(i, i + 1);
            let mut contracted = word[..i].to_vec();
            contracted.extend_from_slice(&word[i + 2..]);
            let mut m = word_normal_form(&swapped, memo);
            for (jk, c) in word_normal_form(&contracted, memo) {
                *m.entry(jk).or_insert(0.0) += c;
            }
            m
        }
    };
    memo.insert(word.to_vec(), out.clone());
    out
}

/// `Σ c_{jk} (a†)^j a^k` keyed by `(j, k)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct NormalForm {
    terms: BTreeMap<(u32, u32), C64>,
}

impl NormalForm {
    pub fn from_map(mut terms: BTreeMap<(u32, u32), C64>) -> Self {
        prune(&mut terms);
        terms.values_mut().for_each(|v| *v = clean(*v));
        NormalForm { terms }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = ((u32, u32), C64)>) -> Self {
        let mut map = BTreeMap::new();
        for (jk, c) in terms {
            *map.entry(jk).or_insert(C64::new(0.0, 0.0)) += c;
        }
        Self::from_map(map)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &C64)> {
        self.terms.iter()
    }

    pub fn get(&self, j: u32, k: u32) -> C64 {
        self.terms.get(&(j, k)).copied().unwrap_or(C64::new(0.0, 0.0))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|(j, k)| j + k).max().unwrap_or(0)
    }

    pub fn sub(&self, other: &NormalForm) -> NormalForm {
        let mut terms = self.terms.clone();
        for (jk, c) in &other.terms {
            *terms.entry(*jk).or_insert(C64::new(0.0, 0.0)) -= c;
        }
        Self::from_map(terms)
    }

    /// Conjugate transpose: `(a†^j a^k)† = a†^k a^j`.
    pub fn adjoint(&self) -> NormalForm {
        Self::from_map(self.terms.iter().map(|(&(j, k), c)| ((k, j), c.conj())).collect())
    }

    pub fn to_polynomial(&self) -> Polynomial {
        let terms: BTreeMap<Word, C64> = self
            .terms
            .iter()
            .map(|(&(j, k), c)| {
                let mut word = vec![Ladder::Adag; j as usize];
                word.extend(std::iter::repeat_n(Ladder::A, k as usize));
                (word, *c)
            })
            .collect();
        let cap = terms.keys().map(Vec::len).max().unwrap_or(0).max(DEFAULT_DEGREE_CAP);
        Polynomial { terms, cap }
    }

    /// Dense image. Matrix elements are those of the infinite-dimensional
    /// operator: `⟨m|a†^j a^k|n⟩ = √(n!/(n−k)!) √(m!/(m−j)!)` for `m − j = n − k ≥ 0`.
    pub fn to_matrix(&self, space: FockSpace) -> Operator {
        let dim = space.dim();
        let mut m = CMatrix::zeros(dim, dim);
        for (&(j, k), c) in &self.terms {
            let (j, k) = (j as usize, k as usize);
            for base in 0..dim {
                let (row, col) = (base + j, base + k);
                if row >= dim || col >= dim {
                    break;
                }
                let lower = ((base + 1)..=col).fold(1.0, |acc, q| acc * (q as f64).sqrt());
                let raise = ((base + 1)..=row).fold(1.0, |acc, q| acc * (q as f64).sqrt());
                m[(row, col)] += c * (lower * raise);
            }
        }
        Operator::from_matrix(space, m).expect("shape matches space")
    }
}

fn write_coefficient(f: &mut fmt::Formatter<'_>, c: &C64) -> fmt::Result {
    let re = c.re + 0.0;
    let im = c.im + 0.0;
    if im.is_sign_negative() {
        write!(f, "({re}-{}i)", -im)
    } else {
        write!(f, "({re}+{im}i)")
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (w, c)) in self.terms.iter().enumerate() {
            if idx > 0 {
                write!(f, " + ")?;
            }
            write_coefficient(f, c)?;
            for l in w {
                match l {
                    Ladder::A => write!(f, "*a")?,
                    Ladder::Adag => write!(f, "*ad")?,
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_polynomial().fmt(f)
    }
}
