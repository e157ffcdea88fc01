//! Exact-weight perfect matchings by random evaluation of the Pfaffian of
//! a polynomial Tutte matrix modulo a 62-bit prime.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Matching, WeightedGraph};
use crate::error::{Error, Result};

/// The prime 2^62 - 57.
pub const MODULUS: u64 = (1 << 62) - 57;

#[derive(Clone, Copy, Debug)]
pub struct ExactMatchConfig {
    /// Largest allowed degree of the matching polynomial.
    pub max_degree: usize,
    /// Fresh random restarts when an extracted matching fails verification.
    pub attempts: usize,
}

impl Default for ExactMatchConfig {
    fn default() -> Self {
        ExactMatchConfig { max_degree: 4096, attempts: 4 }
    }
}

fn mul(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % MODULUS as u128) as u64
}

fn add(a: u64, b: u64) -> u64 {
    let s = a + b;
    if s >= MODULUS {
        s - MODULUS
    } else {
        s
    }
}

fn sub(a: u64, b: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + MODULUS - b
    }
}

fn pow(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul(r, a);
        }
        a = mul(a, a);
        e >>= 1;
    }
    r
}

fn inv(a: u64) -> u64 {
    pow(a, MODULUS - 2)
}

/// Pfaffian of a skew-symmetric matrix (upper triangle is read).
fn pfaffian(mut a: Vec<Vec<u64>>) -> u64 {
    let n = a.len();
    if n % 2 == 1 {
        return 0;
    }
    let mut pf = 1u64;
    let mut k = 0;
    while k < n {
        let Some(j) = (k + 1..n).find(|&j| a[k][j] != 0) else { return 0 };
        if j != k + 1 {
            a.swap(k + 1, j);
            for row in a.iter_mut() {
                row.swap(k + 1, j);
            }
            pf = sub(0, pf);
        }
        let piv = a[k][k + 1];
        pf = mul(pf, piv);
        let ip = inv(piv);
        let f: Vec<u64> = (0..n).map(|i| if i >= k + 2 { mul(a[k][i], ip) } else { 0 }).collect();
        for r in k + 2..n {
            for c in r + 1..n {
                let t = add(mul(f[r], a[k + 1][c]), mul(f[c], a[r][k + 1]));
                let v = sub(a[r][c], t);
                a[r][c] = v;
                a[c][r] = sub(0, v);
            }
        }
        k += 2;
    }
    pf
}

/// Coefficients of the polynomial through (x_i, y_i), x_i = 0..len.
fn interpolate(ys: &[u64]) -> Vec<u64> {
    let n = ys.len();
    let invs: Vec<u64> = (0..n as u64).map(|l| if l == 0 { 0 } else { inv(l) }).collect();
    let mut dd = ys.to_vec();
    for level in 1..n {
        for i in (level..n).rev() {
            dd[i] = mul(sub(dd[i], dd[i - 1]), invs[level]);
        }
    }
    let mut coef = vec![0u64; n];
    for i in (0..n).rev() {
        let mut next = vec![0u64; n];
        for d in 0..n - 1 {
            next[d + 1] = add(next[d + 1], coef[d]);
            next[d] = sub(next[d], mul(coef[d], i as u64));
        }
        next[0] = add(next[0], dd[i]);
        coef = next;
    }
    coef
}

/// Weights l_i with coefficient t of the interpolant through (i, y_i),
/// i = 0..=d, equal to sum_i l_i y_i.
fn coefficient_functional(d: usize, t: usize) -> Vec<u64> {
    // P(x) = prod_{j=0..=d} (x - j), low degree first.
    let mut p = vec![1u64];
    for j in 0..=d as u64 {
        let mut next = vec![0u64; p.len() + 1];
        for (k, &c) in p.iter().enumerate() {
            next[k + 1] = add(next[k + 1], c);
            next[k] = sub(next[k], mul(c, j));
        }
        p = next;
    }
    let mut fact = vec![1u64; d + 1];
    for i in 1..=d {
        fact[i] = mul(fact[i - 1], i as u64);
    }
    (0..=d)
        .map(|i| {
            // Coefficient t of P(x) / (x - i) by synthetic division from the top.
            let mut q = p[d + 1];
            for k in (t + 1..=d).rev() {
                q = add(p[k], mul(i as u64, q));
            }
            let mut den = mul(fact[i], fact[d - i]);
            if (d - i) % 2 == 1 {
                den = sub(0, den);
            }
            mul(q, inv(den))
        })
        .collect()
}

/// Generating polynomial of perfect matchings by total exponent, evaluated
/// with random edge scalars.
pub struct MatchingPolynomial<'g> {
    g: &'g WeightedGraph,
    exps: Vec<u64>,
    base: i128,
    degree: usize,
    rng: ChaCha8Rng,
    functional: Option<(usize, Vec<u64>)>,
}

impl<'g> MatchingPolynomial<'g> {
    /// None when the graph has no perfect matching for parity reasons.
    pub fn new(g: &'g WeightedGraph, exps: &[i64], seed: u64, cfg: ExactMatchConfig) -> Result<Option<Self>> {
        if exps.len() != g.edge_count() {
            return Err(Error::DimensionMismatch { expected: g.edge_count(), got: exps.len() });
        }
        if g.n % 2 == 1 {
            return Ok(None);
        }
        let real: Vec<i64> = exps.iter().zip(&g.edges).filter(|(_, e)| e.u != e.v).map(|(w, _)| *w).collect();
        let (lo, hi) = match (real.iter().min(), real.iter().max()) {
            (Some(&lo), Some(&hi)) => (lo, hi),
            _ => (0, 0),
        };
        let half = (g.n / 2) as i128;
        let degree = half * (hi as i128 - lo as i128);
        if degree > cfg.max_degree as i128 {
            return Err(Error::BoundExceeded(format!("matching polynomial degree {degree} exceeds {}", cfg.max_degree)));
        }
        Ok(Some(MatchingPolynomial {
            g,
            exps: exps.iter().map(|&w| (w as i128 - lo as i128).max(0) as u64).collect(),
            base: half * lo as i128,
            degree: degree as usize,
            rng: ChaCha8Rng::seed_from_u64(seed),
            functional: None,
        }))
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Coefficients indexed by total exponent minus `base()`.
    pub fn base(&self) -> i128 {
        self.base
    }

    fn evaluations(&mut self, keep: &[bool]) -> Vec<u64> {
        let g = self.g;
        let scal: Vec<u64> = (0..g.edge_count()).map(|_| self.rng.gen_range(1..MODULUS)).collect();
        let mut ys = Vec::with_capacity(self.degree + 1);
        for x in 0..=self.degree as u64 {
            let mut a = vec![vec![0u64; g.n]; g.n];
            for (e, ed) in g.edges.iter().enumerate() {
                if !keep[e] || ed.u == ed.v {
                    continue;
                }
                let (u, v) = (ed.u.min(ed.v), ed.u.max(ed.v));
                let term = mul(scal[e], pow(x, self.exps[e]));
                a[u][v] = add(a[u][v], term);
                a[v][u] = sub(0, a[u][v]);
            }
            ys.push(pfaffian(a));
        }
        ys
    }

    fn coefficients_with(&mut self, keep: &[bool]) -> Vec<u64> {
        if self.g.n == 0 {
            return vec![1];
        }
        let ys = self.evaluations(keep);
        interpolate(&ys)
    }

    /// Nonzero coefficients certify a matching of that total; zero ones
    /// are wrong with probability at most degree / MODULUS.
    pub fn coefficients(&mut self) -> Vec<u64> {
        let keep = vec![true; self.g.edge_count()];
        self.coefficients_with(&keep)
    }

    fn has_total(&mut self, keep: &[bool], r: i128) -> bool {
        let t = r - self.base;
        if t < 0 || t > self.degree as i128 {
            return false;
        }
        if self.g.n == 0 {
            return t == 0;
        }
        let t = t as usize;
        if self.functional.as_ref().is_none_or(|(ft, _)| *ft != t) {
            self.functional = Some((t, coefficient_functional(self.degree, t)));
        }
        let ys = self.evaluations(keep);
        let lam = &self.functional.as_ref().expect("set above").1;
        ys.iter().zip(lam).fold(0, |acc, (&y, &l)| add(acc, mul(y, l))) != 0
    }

    /// Edges of a perfect matching with exponent total r, by edge deletion.
    pub fn extract(&mut self, r: i128, attempts: usize) -> Option<Vec<usize>> {
        let m = self.g.edge_count();
        let full = vec![true; m];
        if !self.has_total(&full, r) {
            return None;
        }
        for _ in 0..attempts.max(1) {
            let mut keep = full.clone();
            for e in 0..m {
                keep[e] = false;
                if !self.has_total(&keep, r) {
                    keep[e] = true;
                }
            }
            let picked: Vec<usize> = (0..m).filter(|&e| keep[e]).collect();
            let mt = Matching { edges: picked.clone() };
            let total: i128 = picked.iter().map(|&e| self.exps[e] as i128).sum::<i128>() + self.base;
            if mt.is_perfect(self.g) && total == r {
                return Some(picked);
            }
        }
        None
    }
}

/// A perfect matching of total weight exactly r, or None.
///
/// Errs only towards None; returned matchings are verified.
pub fn exact_weight_matching_randomized(g: &WeightedGraph, r: i64, seed: u64, cfg: ExactMatchConfig) -> Result<Option<Matching>> {
    let mut ws = Vec::with_capacity(g.edge_count());
    for (e, ed) in g.edges.iter().enumerate() {
        if !ed.w.is_integer() {
            return Err(Error::Invalid(format!("edge {e} has non-integer weight {}", ed.w)));
        }
        ws.push(ed.w.to_i64().ok_or_else(|| Error::BoundExceeded(format!("edge {e} weight {}", ed.w)))?);
    }
    let Some(mut poly) = MatchingPolynomial::new(g, &ws, seed, cfg)? else { return Ok(None) };
    let Some(edges) = poly.extract(r as i128, cfg.attempts) else { return Ok(None) };
    let m = Matching { edges };
    Ok((m.is_perfect(g) && m.weight(g) == crate::exact_math::Rat::from_int(r)).then_some(m))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pfaffian_small() {
        // [[0,a],[−a,0]] has Pfaffian a.
        assert_eq!(pfaffian(vec![vec![0, 7], vec![MODULUS - 7, 0]]), 7);
        // 4x4: Pf = a01 a23 - a02 a13 + a03 a12.
        let (a01, a02, a03, a12, a13, a23) = (2u64, 3, 5, 7, 11, 13);
        let mut m = vec![vec![0u64; 4]; 4];
        for &(i, j, v) in &[(0, 1, a01), (0, 2, a02), (0, 3, a03), (1, 2, a12), (1, 3, a13), (2, 3, a23)] {
            m[i][j] = v;
            m[j][i] = MODULUS - v;
        }
        assert_eq!(pfaffian(m), 2 * 13 + 5 * 7 - 3 * 11);
    }

    #[test]
    fn interpolation_roundtrip() {
        let coef = [5u64, 0, 3, 1];
        let ys: Vec<u64> = (0..4u64).map(|x| coef.iter().rev().fold(0, |acc, &c| add(mul(acc, x), c))).collect();
        assert_eq!(interpolate(&ys), coef.to_vec());
        for t in 0..4 {
            let lam = coefficient_functional(3, t);
            assert_eq!(ys.iter().zip(&lam).fold(0, |acc, (&y, &l)| add(acc, mul(y, l))), coef[t]);
        }
    }

    #[test]
    fn examples() {
        let cfg = ExactMatchConfig::default();
        let g = WeightedGraph::from_triples(4, &[(0, 1, 2), (2, 3, 3)]).unwrap();
        let m = exact_weight_matching_randomized(&g, 5, 1, cfg).unwrap().unwrap();
        assert_eq!(m.edges, vec![0, 1]);
        assert!(exact_weight_matching_randomized(&g, 4, 1, cfg).unwrap().is_none());
        let e = WeightedGraph::from_triples(2, &[(0, 1, 0)]).unwrap();
        assert_eq!(exact_weight_matching_randomized(&e, 0, 1, cfg).unwrap().unwrap().edges, vec![0]);
        let big = WeightedGraph::from_triples(2, &[(0, 1, 0), (0, 1, 1 << 40)]).unwrap();
        assert!(matches!(exact_weight_matching_randomized(&big, 0, 1, cfg), Err(Error::BoundExceeded(_))));
    }
}
