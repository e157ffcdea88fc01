use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, SeqAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::Rat;
use crate::coalition::Coalition;
use crate::error::{Error, Result};

/// Dense row-major rational matrix.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RatMat {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl RatMat {
    pub fn zeros(rows: usize, cols: usize) -> RatMat {
        RatMat { rows, cols, data: vec![Rat::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> RatMat {
        let mut m = RatMat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rat::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>, cols: usize) -> Result<RatMat> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        let n = rows.len();
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch { expected: cols, got: r.len() });
            }
            data.extend(r);
        }
        Ok(RatMat { rows: n, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rat {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rat) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Rat] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Rat>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }
}

/// Reduced row echelon form. Returns the nonzero rows and their pivot columns.
pub fn rref(mut rows: Vec<Vec<Rat>>, cols: usize) -> (Vec<Vec<Rat>>, Vec<usize>) {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row).skip(c) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    (rows, pivots)
}

/// Rank over the rationals.
pub fn rank(m: &RatMat) -> usize {
    rref(m.to_rows(), m.cols()).1.len()
}

/// Integer vector, typically a non-zero constraint `a`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct IntVec(Vec<BigInt>);

impl IntVec {
    pub fn new(entries: Vec<BigInt>) -> IntVec {
        IntVec(entries)
    }

    pub fn from_i64s(entries: &[i64]) -> IntVec {
        IntVec(entries.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn zeros(n: usize) -> IntVec {
        IntVec(vec![BigInt::zero(); n])
    }

    pub fn incidence(c: Coalition, n: usize) -> IntVec {
        IntVec((0..n).map(|i| if c.contains(i) { BigInt::one() } else { BigInt::zero() }).collect())
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|x| x.is_zero())
    }

    pub fn get(&self, i: usize) -> &BigInt {
        &self.0[i]
    }

    /// Sum of entries over the members of `c`.
    pub fn sum_over(&self, c: Coalition) -> BigInt {
        c.members().map(|i| &self.0[i]).sum()
    }

    /// Entries as machine integers, when they all fit.
    pub fn to_i64s(&self) -> Option<Vec<i64>> {
        self.0.iter().map(|x| x.to_i64()).collect()
    }

    pub fn to_rats(&self) -> Vec<Rat> {
        self.0.iter().map(|x| Rat::from_bigint(x.clone())).collect()
    }

    /// Divides by the gcd and makes the first nonzero entry positive.
    pub fn canonical(&self) -> IntVec {
        let g = self.0.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
        if g.is_zero() {
            return self.clone();
        }
        let neg = self.0.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative());
        let g = if neg { -g } else { g };
        IntVec(self.0.iter().map(|x| x / &g).collect())
    }

    pub fn is_canonical(&self) -> bool {
        !self.is_zero() && *self == self.canonical()
    }

    pub fn negate(&self) -> IntVec {
        IntVec(self.0.iter().map(|x| -x).collect())
    }
}

impl fmt::Debug for IntVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter().map(|x| x.to_string())).finish()
    }
}

impl Serialize for IntVec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(self.0.len()))?;
        for x in &self.0 {
            match x.to_i64() {
                Some(v) => seq.serialize_element(&v)?,
                None => seq.serialize_element(&x.to_string())?,
            }
        }
        seq.end()
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum IntRepr {
    Num(i64),
    Str(String),
}

impl<'de> Deserialize<'de> for IntVec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<IntVec, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = IntVec;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a list of integers")
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> std::result::Result<IntVec, A::Error> {
                let mut out = Vec::new();
                while let Some(e) = seq.next_element::<IntRepr>()? {
                    out.push(match e {
                        IntRepr::Num(v) => BigInt::from(v),
                        IntRepr::Str(s) => {
                            let r: Rat = s.parse().map_err(de::Error::custom)?;
                            if !r.is_integer() {
                                return Err(de::Error::custom("expected an integer"));
                            }
                            r.numer().clone()
                        }
                    });
                }
                Ok(IntVec(out))
            }
        }
        d.deserialize_seq(V)
    }
}

/// A linear subspace of Q^n given by independent basis rows.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LinearSubspace {
    ambient_dim: usize,
    basis: Vec<Vec<Rat>>,
    reduced: Vec<Vec<Rat>>,
    pivots: Vec<usize>,
}

impl LinearSubspace {
    /// The zero subspace.
    pub fn zero(n: usize) -> LinearSubspace {
        LinearSubspace { ambient_dim: n, basis: vec![], reduced: vec![], pivots: vec![] }
    }

    /// Builds from rows that must be independent.
    pub fn new(basis: Vec<Vec<Rat>>, ambient_dim: usize) -> Result<LinearSubspace> {
        for r in &basis {
            if r.len() != ambient_dim {
                return Err(Error::DimensionMismatch { expected: ambient_dim, got: r.len() });
            }
        }
        let (reduced, pivots) = rref(basis.clone(), ambient_dim);
        if reduced.len() != basis.len() {
            return Err(Error::Invalid("basis rows are linearly dependent".into()));
        }
        Ok(LinearSubspace { ambient_dim, basis, reduced, pivots })
    }

    /// Span of arbitrary vectors; the stored basis is their RREF.
    pub fn span_of(vectors: Vec<Vec<Rat>>, ambient_dim: usize) -> Result<LinearSubspace> {
        for r in &vectors {
            if r.len() != ambient_dim {
                return Err(Error::DimensionMismatch { expected: ambient_dim, got: r.len() });
            }
        }
        let (reduced, pivots) = rref(vectors, ambient_dim);
        Ok(LinearSubspace { ambient_dim, basis: reduced.clone(), reduced, pivots })
    }

    pub fn span_of_coalitions(cs: &[Coalition], n: usize) -> LinearSubspace {
        LinearSubspace::span_of(cs.iter().map(|&c| incidence_rats(c, n)).collect(), n)
            .expect("incidence vectors have the ambient width")
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.reduced.len()
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient_dim
    }

    pub fn basis_rows(&self) -> &[Vec<Rat>] {
        &self.basis
    }

    fn residual_zero(&self, mut x: Vec<Rat>) -> bool {
        for (row, &p) in self.reduced.iter().zip(&self.pivots) {
            if x[p].is_zero() {
                continue;
            }
            let f = x[p].clone();
            for (xi, ri) in x.iter_mut().zip(row) {
                if !ri.is_zero() {
                    *xi -= &f * ri;
                }
            }
        }
        x.iter().all(Rat::is_zero)
    }

    pub fn contains(&self, x: &[Rat]) -> Result<bool> {
        if x.len() != self.ambient_dim {
            return Err(Error::DimensionMismatch { expected: self.ambient_dim, got: x.len() });
        }
        Ok(self.residual_zero(x.to_vec()))
    }

    pub fn contains_coalition(&self, c: Coalition) -> bool {
        if c.is_empty() {
            return true;
        }
        self.residual_zero(incidence_rats(c, self.ambient_dim))
    }

    /// Span of this subspace together with `v`.
    pub fn extended(&self, v: &[Rat]) -> Result<LinearSubspace> {
        let mut rows = self.reduced.clone();
        rows.push(v.to_vec());
        LinearSubspace::span_of(rows, self.ambient_dim)
    }
}

pub fn incidence_rats(c: Coalition, n: usize) -> Vec<Rat> {
    (0..n).map(|i| if c.contains(i) { Rat::one() } else { Rat::zero() }).collect()
}

/// True iff `x` lies in `l`.
pub fn in_span(l: &LinearSubspace, x: &[Rat]) -> Result<bool> {
    l.contains(x)
}

pub fn in_span_int(l: &LinearSubspace, x: &IntVec) -> Result<bool> {
    l.contains(&x.to_rats())
}

/// Scales a rational vector to the primitive integer vector on the same ray.
fn integerize(v: &[Rat]) -> IntVec {
    let l = v.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
    IntVec(v.iter().map(|x| x.numer() * (&l / x.denom())).collect()).canonical()
}

/// Canonical integer basis of the orthogonal complement of `l`.
pub fn integer_kernel_basis(l: &LinearSubspace) -> Result<Vec<IntVec>> {
    if l.is_full() {
        return Err(Error::FullSpace);
    }
    let n = l.ambient_dim;
    let mut null = Vec::new();
    for f in (0..n).filter(|c| !l.pivots.contains(c)) {
        let mut x = vec![Rat::zero(); n];
        x[f] = Rat::one();
        for (row, &p) in l.reduced.iter().zip(&l.pivots) {
            x[p] = -&row[f];
        }
        null.push(x);
    }
    let (rows, _) = rref(null, n);
    Ok(rows.iter().map(|r| integerize(r)).collect())
}

/// Orthogonal complement of a single vector, as a subspace.
pub fn hyperplane(a: &IntVec) -> Result<LinearSubspace> {
    if a.is_zero() {
        return Err(Error::ZeroVector);
    }
    let n = a.len();
    let row = LinearSubspace::span_of(vec![a.to_rats()], n)?;
    let basis = integer_kernel_basis(&row)?;
    LinearSubspace::new(basis.iter().map(|b| b.to_rats()).collect(), n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(v: &[i64]) -> Vec<Rat> {
        v.iter().map(|&x| Rat::from_int(x)).collect()
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&RatMat::identity(2)), 2);
        assert_eq!(rank(&RatMat::zeros(3, 3)), 0);
        let m = RatMat::from_rows(vec![r(&[1, 1, 0]), r(&[2, 2, 0]), r(&[0, 0, 1])], 3).unwrap();
        assert_eq!(rank(&m), 2);
    }

    #[test]
    fn span_examples() {
        let l = LinearSubspace::new(vec![r(&[1, 0, 0]), r(&[0, 1, 0])], 3).unwrap();
        assert!(in_span(&l, &r(&[1, 1, 0])).unwrap());
        assert!(!in_span(&l, &r(&[0, 0, 1])).unwrap());
        let l = LinearSubspace::new(vec![r(&[1, 1, 0])], 3).unwrap();
        assert!(in_span(&l, &r(&[2, 2, 0])).unwrap());
        assert!(in_span(&l, &r(&[2, 2])).is_err());
    }

    #[test]
    fn kernel_examples() {
        let k = integer_kernel_basis(&LinearSubspace::zero(2)).unwrap();
        assert_eq!(k, vec![IntVec::from_i64s(&[1, 0]), IntVec::from_i64s(&[0, 1])]);
        let l = LinearSubspace::new(vec![r(&[1, 1, 0])], 3).unwrap();
        let k = integer_kernel_basis(&l).unwrap();
        assert_eq!(k, vec![IntVec::from_i64s(&[1, -1, 0]), IntVec::from_i64s(&[0, 0, 1])]);
        let l = LinearSubspace::new(vec![r(&[1, 0, 0]), r(&[0, 1, 0])], 3).unwrap();
        assert_eq!(integer_kernel_basis(&l).unwrap(), vec![IntVec::from_i64s(&[0, 0, 1])]);
        let full = LinearSubspace::span_of(vec![r(&[1, 0]), r(&[0, 1])], 2).unwrap();
        assert_eq!(integer_kernel_basis(&full), Err(Error::FullSpace));
    }

    #[test]
    fn dependent_basis_rejected() {
        assert!(LinearSubspace::new(vec![r(&[1, 1]), r(&[2, 2])], 2).is_err());
    }

    #[test]
    fn canonical_form() {
        assert_eq!(IntVec::from_i64s(&[0, -4, 6]).canonical(), IntVec::from_i64s(&[0, 2, -3]));
    }

    #[test]
    fn hyperplane_examples() {
        let h = hyperplane(&IntVec::from_i64s(&[1, 0, 0])).unwrap();
        assert_eq!(h.basis_rows(), &[r(&[0, 1, 0]), r(&[0, 0, 1])][..]);
        let h = hyperplane(&IntVec::from_i64s(&[1, -1, 0])).unwrap();
        assert_eq!(h.basis_rows(), &[r(&[1, 1, 0]), r(&[0, 0, 1])][..]);
    }

    #[test]
    fn intvec_serde() {
        let v: IntVec = serde_json::from_str("[1, -2, \"3\"]").unwrap();
        assert_eq!(v, IntVec::from_i64s(&[1, -2, 3]));
        assert_eq!(serde_json::to_string(&v).unwrap(), "[1,-2,3]");
    }
}
