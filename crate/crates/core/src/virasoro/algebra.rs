//! Highest-weight Verma module: straightening of Virasoro words and the
//! Shapovalov pairing.
//!
//! A basis vector at level `N` is `L_{-nu(k)} ... L_{-nu(1)} Psi` for a
//! partition `nu` of `N` with `nu(1) >= ... >= nu(k)`, so the outermost
//! operator carries the smallest part. Everything is generic over the
//! coefficient ring, which lets the same engine run on floats and on exact
//! polynomials in `(Delta, c)`.

use std::collections::HashMap;
use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use super::young::{diagrams_at_level, YoungDiagram};

/// Coefficient ring for the commutator engine.
pub trait Ring:
    Clone + Debug + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    fn zero() -> Self;
    fn from_i64(v: i64) -> Self;
    fn is_zero(&self) -> bool;
}

impl Ring for f64 {
    fn zero() -> Self {
        0.0
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
}

impl Ring for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn from_i64(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
}

/// Sparse vector over partitions.
pub type Vector<T> = Vec<(YoungDiagram, T)>;

fn accumulate<T: Ring>(acc: &mut HashMap<YoungDiagram, T>, v: &Vector<T>, scale: &T) {
    for (y, c) in v {
        let add = c.clone() * scale.clone();
        match acc.get_mut(y) {
            Some(e) => *e = e.clone() + add,
            None => {
                acc.insert(y.clone(), add);
            }
        }
    }
}

fn finish<T: Ring>(acc: HashMap<YoungDiagram, T>) -> Vector<T> {
    let mut v: Vector<T> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
    v.sort_by(|a, b| b.0.cmp(&a.0));
    v
}

/// Verma module with highest weight `delta` and central term `c / 12`.
pub struct VermaModule<T: Ring> {
    delta: T,
    c_over_12: T,
    create_memo: HashMap<(u32, YoungDiagram), Vector<T>>,
    annihilate_memo: HashMap<(u32, YoungDiagram), Vector<T>>,
}

impl<T: Ring> VermaModule<T> {
    pub fn new(delta: T, c_over_12: T) -> Self {
        VermaModule {
            delta,
            c_over_12,
            create_memo: HashMap::new(),
            annihilate_memo: HashMap::new(),
        }
    }

    /// `L_{-k}` on a basis vector, rewritten in the canonical basis.
    pub fn create(&mut self, k: u32, nu: &YoungDiagram) -> Vector<T> {
        let one = T::from_i64(1);
        match nu.parts().last() {
            None => return vec![(YoungDiagram::from_sorted(vec![k]), one)],
            Some(&m) if k <= m => {
                let mut parts = nu.parts().to_vec();
                parts.push(k);
                return vec![(YoungDiagram::from_sorted(parts), one)];
            }
            _ => {}
        }
        let key = (k, nu.clone());
        if let Some(v) = self.create_memo.get(&key) {
            return v.clone();
        }
        let parts = nu.parts();
        let m = *parts.last().unwrap();
        let rest = YoungDiagram::from_sorted(parts[..parts.len() - 1].to_vec());
        // L_{-k} L_{-m} = L_{-m} L_{-k} + (m - k) L_{-(k+m)}
        let mut acc = HashMap::new();
        let inner = self.create(k, &rest);
        for (y, c) in inner {
            let v = self.create(m, &y);
            accumulate(&mut acc, &v, &c);
        }
        let merged = self.create(k + m, &rest);
        accumulate(&mut acc, &merged, &T::from_i64(m as i64 - k as i64));
        let out = finish(acc);
        self.create_memo.insert(key, out.clone());
        out
    }

    /// `L_n`, `n > 0`, on a basis vector.
    pub fn annihilate(&mut self, n: u32, nu: &YoungDiagram) -> Vector<T> {
        debug_assert!(n > 0);
        if nu.is_empty() || (n as usize) > nu.level() {
            return Vec::new();
        }
        let key = (n, nu.clone());
        if let Some(v) = self.annihilate_memo.get(&key) {
            return v.clone();
        }
        let parts = nu.parts();
        let m = *parts.last().unwrap();
        let rest = YoungDiagram::from_sorted(parts[..parts.len() - 1].to_vec());
        let mut acc = HashMap::new();
        // L_{-m} L_n |rest>
        let inner = self.annihilate(n, &rest);
        for (y, c) in inner {
            let v = self.create(m, &y);
            accumulate(&mut acc, &v, &c);
        }
        // (n + m) L_{n-m} |rest>
        let coeff = T::from_i64((n + m) as i64);
        if n > m {
            let v = self.annihilate(n - m, &rest);
            accumulate(&mut acc, &v, &coeff);
        } else if n == m {
            let weight = self.delta.clone() + T::from_i64(rest.level() as i64);
            accumulate(&mut acc, &vec![(rest.clone(), T::from_i64(1))], &(coeff * weight));
            // central term (c/12)(n^3 - n)
            let n3 = (n as i64).pow(3) - n as i64;
            let central = self.c_over_12.clone() * T::from_i64(n3);
            accumulate(&mut acc, &vec![(rest.clone(), T::from_i64(1))], &central);
        } else {
            let v = self.create(m - n, &rest);
            accumulate(&mut acc, &v, &coeff);
        }
        let out = finish(acc);
        self.annihilate_memo.insert(key, out.clone());
        out
    }

    /// Shapovalov matrices for levels `0..=max_level`, basis in
    /// [`diagrams_at_level`] order.
    pub fn gram_matrices(&mut self, max_level: usize) -> Vec<Vec<Vec<T>>> {
        let bases: Vec<Vec<YoungDiagram>> = (0..=max_level).map(diagrams_at_level).collect();
        let index: Vec<HashMap<YoungDiagram, usize>> = bases
            .iter()
            .map(|b| b.iter().cloned().enumerate().map(|(i, y)| (y, i)).collect())
            .collect();
        let mut grams: Vec<Vec<Vec<T>>> = vec![vec![vec![T::from_i64(1)]]];
        for n in 1..=max_level {
            let basis = &bases[n];
            let dim = basis.len();
            let mut g = vec![vec![T::zero(); dim]; dim];
            for (i, nu) in basis.iter().enumerate() {
                // <L_{-m} mu, v> = <mu, L_m v>, m the smallest part of nu
                let parts = nu.parts();
                let m = *parts.last().unwrap();
                let mu = YoungDiagram::from_sorted(parts[..parts.len() - 1].to_vec());
                let lower = n - m as usize;
                let mu_idx = index[lower][&mu];
                // the form is symmetric; fill the upper triangle and mirror
                for (j, nu2) in basis.iter().enumerate().skip(i) {
                    let image = self.annihilate(m, nu2);
                    let mut s = T::zero();
                    for (y, c) in image {
                        let k = index[lower][&y];
                        s = s + c * grams[lower][mu_idx][k].clone();
                    }
                    g[j][i] = s.clone();
                    g[i][j] = s;
                }
            }
            grams.push(g);
        }
        grams
    }
}

/// `<L_{-nu} Psi, L_{-nu'} Psi>`; zero across levels.
pub fn virasoro_pairing(nu: &YoungDiagram, nu_prime: &YoungDiagram, delta: Complex64, c: Complex64) -> Complex64 {
    if nu.level() != nu_prime.level() {
        return Complex64::new(0.0, 0.0);
    }
    let n = nu.level();
    let mut module = VermaModule::new(delta, c / 12.0);
    let grams = module.gram_matrices(n);
    let basis = diagrams_at_level(n);
    let i = basis.iter().position(|y| y == nu).expect("diagram in basis");
    let j = basis.iter().position(|y| y == nu_prime).expect("diagram in basis");
    grams[n][i][j]
}

/// Descendant three-point coefficient
/// `<L_{-nu} Delta| phi_{Delta2}(1) |Delta1> / <Delta| phi_{Delta2}(1) |Delta1>`.
///
/// Peeling the modes off one at a time with
/// `[L_n, phi(z)] = z^n (z d/dz + (n + 1) Delta2) phi(z)` turns each `L_{nu(i)}`
/// into the factor `Delta + nu(1) + ... + nu(i-1) + nu(i) Delta2 - Delta1`.
pub fn descendant_3pt<T: Ring>(delta1: T, delta2: T, delta: T, nu: &YoungDiagram) -> T {
    let mut w = T::from_i64(1);
    let mut level = 0i64;
    for &part in nu.parts() {
        let factor = delta.clone() + T::from_i64(level) + T::from_i64(part as i64) * delta2.clone()
            - delta1.clone();
        w = w * factor;
        level += part as i64;
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn level_one_and_two() {
        let (d, cc) = (c(0.37), c(5.3));
        let y1 = YoungDiagram::new(vec![1]).unwrap();
        assert!((virasoro_pairing(&y1, &y1, d, cc) - 2.0 * d).norm() < 1e-14);
        let y2 = YoungDiagram::new(vec![2]).unwrap();
        let y11 = YoungDiagram::new(vec![1, 1]).unwrap();
        assert!((virasoro_pairing(&y2, &y2, d, cc) - (4.0 * d + cc / 2.0)).norm() < 1e-14);
        assert!((virasoro_pairing(&y2, &y11, d, cc) - 6.0 * d).norm() < 1e-14);
        assert!((virasoro_pairing(&y11, &y11, d, cc) - 4.0 * d * (2.0 * d + 1.0)).norm() < 1e-13);
    }

    #[test]
    fn zero_weight_level_one() {
        let y1 = YoungDiagram::new(vec![1]).unwrap();
        assert_eq!(virasoro_pairing(&y1, &y1, c(0.0), c(123.0)), c(0.0));
    }

    #[test]
    fn cross_level_is_zero() {
        let a = YoungDiagram::new(vec![2, 1]).unwrap();
        let b = YoungDiagram::new(vec![2]).unwrap();
        assert_eq!(virasoro_pairing(&a, &b, c(1.1), c(30.0)), c(0.0));
    }

    #[test]
    fn level_three_known_matrix() {
        // standard level-3 Shapovalov entries, basis (3), (2,1) = L_{-1}L_{-2}, (1,1,1)
        let (d, cc) = (0.7, 11.0);
        let mut m = VermaModule::new(d, cc / 12.0);
        let g = m.gram_matrices(3);
        let g3 = &g[3];
        assert!((g3[0][0] - (6.0 * d + 2.0 * cc)).abs() < 1e-12);
        assert!((g3[0][2] - 24.0 * d).abs() < 1e-12);
        assert!((g3[2][2] - 24.0 * d * (d + 1.0) * (2.0 * d + 1.0)).abs() < 1e-10);
        // (2,1) is L_{-1} L_{-2} Psi
        assert!((g3[0][1] - (16.0 * d + 2.0 * cc)).abs() < 1e-12);
        let expect = 2.0 * (d + 2.0) * (4.0 * d + cc / 2.0) + 18.0 * d;
        assert!((g3[1][1] - expect).abs() < 1e-11);
        for i in 0..3 {
            for j in 0..3 {
                assert!((g3[i][j] - g3[j][i]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn descendant_level_one() {
        let y = YoungDiagram::new(vec![1]).unwrap();
        let w = descendant_3pt(0.3, 0.8, 2.1, &y);
        assert!((w - (2.1 + 0.8 - 0.3)).abs() < 1e-15);
        assert_eq!(descendant_3pt(0.3, 0.8, 2.1, &YoungDiagram::empty()), 1.0);
    }
}
