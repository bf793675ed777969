//! Exact arithmetic for oracle tests: rationals and multivariate polynomials
//! over the rationals, plus an independent normal-ordering evaluator for
//! Virasoro vacuum expectation values.

use std::collections::{BTreeMap, HashMap};
use std::ops::{Add, Mul, Neg, Sub};

use lcft_core::virasoro::{diagrams_at_level, Ring, YoungDiagram};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rat(pub BigRational);

impl Rat {
    pub fn int(v: i64) -> Self {
        Rat(BigRational::from_integer(BigInt::from(v)))
    }
}

impl Add for Rat {
    type Output = Rat;
    fn add(self, o: Rat) -> Rat {
        Rat(self.0 + o.0)
    }
}
impl Sub for Rat {
    type Output = Rat;
    fn sub(self, o: Rat) -> Rat {
        Rat(self.0 - o.0)
    }
}
impl Mul for Rat {
    type Output = Rat;
    fn mul(self, o: Rat) -> Rat {
        Rat(self.0 * o.0)
    }
}
impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0)
    }
}
impl Ring for Rat {
    fn zero() -> Self {
        Rat::int(0)
    }
    fn from_i64(v: i64) -> Self {
        Rat::int(v)
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

/// Polynomial in a fixed number of variables; monomials keyed by exponents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, BigRational>,
}

impl Poly {
    pub fn constant(nvars: usize, v: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !v.is_zero() {
            terms.insert(vec![0; nvars], v);
        }
        Poly { nvars, terms }
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut terms = BTreeMap::new();
        terms.insert(e, BigRational::one());
        Poly { nvars, terms }
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v = v.clone() * r.clone();
        }
        out.terms.retain(|_, v| !v.is_zero());
        out
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    fn nv(&self, o: &Poly) -> usize {
        self.nvars.max(o.nvars)
    }
}

thread_local! {
    static NVARS: std::cell::Cell<usize> = const { std::cell::Cell::new(2) };
}

/// Number of variables used by `Ring::zero`/`from_i64` on this thread.
pub fn set_poly_vars(n: usize) {
    NVARS.with(|c| c.set(n));
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, o: Poly) -> Poly {
        let nvars = self.nv(&o);
        let mut terms = self.terms;
        for (e, v) in o.terms {
            let ent = terms.entry(e).or_insert_with(BigRational::zero);
            *ent = ent.clone() + v;
        }
        terms.retain(|_, v| !v.is_zero());
        Poly { nvars, terms }
    }
}
impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&-BigRational::one())
    }
}
impl Sub for Poly {
    type Output = Poly;
    fn sub(self, o: Poly) -> Poly {
        self + (-o)
    }
}
impl Mul for Poly {
    type Output = Poly;
    fn mul(self, o: Poly) -> Poly {
        let nvars = self.nv(&o);
        let mut terms: BTreeMap<Vec<u32>, BigRational> = BTreeMap::new();
        for (ea, va) in &self.terms {
            for (eb, vb) in &o.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                let ent = terms.entry(e).or_insert_with(BigRational::zero);
                *ent = ent.clone() + va.clone() * vb.clone();
            }
        }
        terms.retain(|_, v| !v.is_zero());
        Poly { nvars, terms }
    }
}
impl Ring for Poly {
    fn zero() -> Self {
        Poly::constant(NVARS.with(|c| c.get()), BigRational::zero())
    }
    fn from_i64(v: i64) -> Self {
        Poly::constant(NVARS.with(|c| c.get()), BigRational::from_integer(BigInt::from(v)))
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

/// `Delta` and `c / 12` as polynomials in `(Delta, c)`.
pub fn delta_c_vars() -> (Poly, Poly) {
    set_poly_vars(2);
    let twelfth = BigRational::new(BigInt::from(1), BigInt::from(12));
    (Poly::var(2, 0), Poly::var(2, 1).scale(&twelfth))
}

/// Vacuum expectation `<Psi| L_{w_0} L_{w_1} ... |Psi>` by straightforward
/// word rewriting: swap the first adjacent (positive, non-positive) pair
/// using `[L_a, L_b] = (a - b) L_{a+b} + c/12 (a^3 - a) delta_{a,-b}`.
pub struct WordOracle {
    delta: Poly,
    c12: Poly,
    memo: HashMap<Vec<i32>, Poly>,
}

impl WordOracle {
    pub fn new(delta: Poly, c12: Poly) -> Self {
        WordOracle { delta, c12, memo: HashMap::new() }
    }

    pub fn eval(&mut self, word: &[i32]) -> Poly {
        if word.is_empty() {
            return Poly::from_i64(1);
        }
        if *word.last().unwrap() > 0 || word[0] < 0 {
            return Poly::zero();
        }
        if word[0] == 0 {
            let rest = self.eval(&word[1..]);
            return self.delta.clone() * rest;
        }
        if let Some(v) = self.memo.get(word) {
            return v.clone();
        }
        let i = (0..word.len() - 1)
            .find(|&i| word[i] > 0 && word[i + 1] <= 0)
            .expect("word has a positive mode left of a non-positive one");
        let (a, b) = (word[i], word[i + 1]);
        let mut swapped = word.to_vec();
        swapped.swap(i, i + 1);
        let mut out = self.eval(&swapped);
        let mut merged = word[..i].to_vec();
        merged.push(a + b);
        merged.extend_from_slice(&word[i + 2..]);
        let m = self.eval(&merged);
        out = out + Poly::from_i64((a - b) as i64) * m;
        if a + b == 0 {
            let mut cut = word[..i].to_vec();
            cut.extend_from_slice(&word[i + 2..]);
            let k = self.eval(&cut);
            out = out + self.c12.clone() * Poly::from_i64((a as i64).pow(3) - a as i64) * k;
        }
        self.memo.insert(word.to_vec(), out.clone());
        out
    }

    /// `<L_{-nu} Psi, L_{-nu'} Psi>` with `L_{-nu} = L_{-nu(k)} ... L_{-nu(1)}`.
    pub fn pairing(&mut self, nu: &YoungDiagram, nu_prime: &YoungDiagram) -> Poly {
        // adjoint of L_{-nu(k)} ... L_{-nu(1)} is L_{nu(1)} ... L_{nu(k)}
        let mut word: Vec<i32> = nu.parts().iter().map(|&p| p as i32).collect();
        word.extend(nu_prime.parts().iter().rev().map(|&p| -(p as i32)));
        self.eval(&word)
    }

    pub fn gram(&mut self, level: usize) -> Vec<Vec<Poly>> {
        let basis = diagrams_at_level(level);
        basis
            .iter()
            .map(|a| basis.iter().map(|b| self.pairing(a, b)).collect())
            .collect()
    }
}

impl Poly {
    pub fn terms_iter(&self) -> impl Iterator<Item = (&Vec<u32>, &BigRational)> {
        self.terms.iter()
    }
}
