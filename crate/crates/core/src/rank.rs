//! Exact rank over the rationals by fraction-free sparse elimination.
//!
//! Vectors are sparse `(index, value)` lists sorted by index. Elimination runs
//! on `i128` with checked arithmetic and restarts on `BigInt` if any
//! intermediate overflows. Each reduced row is divided by the gcd of its
//! entries, which keeps entries small for the {-1,0,1} matrices used here.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

pub type SparseVec = Vec<(usize, i64)>;

trait Int: Clone + PartialEq + std::fmt::Debug {
    fn from_i64(v: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn is_neg(&self) -> bool;
    fn neg(&self) -> Self;
    fn mul(&self, o: &Self) -> Option<Self>;
    fn sub(&self, o: &Self) -> Option<Self>;
    fn gcd(&self, o: &Self) -> Self;
    fn div_exact(&self, o: &Self) -> Self;
    fn is_one(&self) -> bool;
}

impl Int for i128 {
    fn from_i64(v: i64) -> Self {
        v as i128
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn is_neg(&self) -> bool {
        *self < 0
    }
    fn neg(&self) -> Self {
        -*self
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        self.checked_mul(*o)
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        self.checked_sub(*o)
    }
    fn gcd(&self, o: &Self) -> Self {
        Integer::gcd(self, o)
    }
    fn div_exact(&self, o: &Self) -> Self {
        self / o
    }
    fn is_one(&self) -> bool {
        *self == 1
    }
}

impl Int for BigInt {
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_neg(&self) -> bool {
        Signed::is_negative(self)
    }
    fn neg(&self) -> Self {
        -self
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        Some(self * o)
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        Some(self - o)
    }
    fn gcd(&self, o: &Self) -> Self {
        Integer::gcd(self, o)
    }
    fn div_exact(&self, o: &Self) -> Self {
        self / o
    }
    fn is_one(&self) -> bool {
        *self == BigInt::from(1)
    }
}

type Row<I> = Vec<(usize, I)>;

/// Row echelon basis keyed by pivot column.
#[derive(Clone, Debug)]
struct Echelon<I> {
    rows: BTreeMap<usize, Row<I>>,
}

impl<I: Int> Echelon<I> {
    fn new() -> Self {
        Echelon { rows: BTreeMap::new() }
    }

    /// Reduce `v` against the basis. Returns the nonzero remainder, or `None`
    /// inside `Ok` when `v` is in the span. `Err` on overflow.
    fn reduce(&self, mut v: Row<I>) -> Result<Option<Row<I>>, ()> {
        loop {
            let Some(&(p, ref a)) = v.first() else { return Ok(None) };
            let Some(row) = self.rows.get(&p) else { return Ok(Some(v)) };
            let b = &row[0].1;
            // v <- b*v - a*row, which cancels column p
            let (a, b) = (a.clone(), b.clone());
            let mut out = Vec::with_capacity(v.len() + row.len());
            let (mut i, mut j) = (0, 0);
            while i < v.len() || j < row.len() {
                let ci = v.get(i).map_or(usize::MAX, |e| e.0);
                let cj = row.get(j).map_or(usize::MAX, |e| e.0);
                let (c, val) = if ci < cj {
                    i += 1;
                    (ci, v[i - 1].1.mul(&b).ok_or(())?)
                } else if cj < ci {
                    j += 1;
                    (cj, row[j - 1].1.mul(&a).ok_or(())?.neg())
                } else {
                    i += 1;
                    j += 1;
                    let x = v[i - 1].1.mul(&b).ok_or(())?;
                    let y = row[j - 1].1.mul(&a).ok_or(())?;
                    (ci, x.sub(&y).ok_or(())?)
                };
                if !val.is_zero() {
                    out.push((c, val));
                }
            }
            normalize(&mut out);
            v = out;
        }
    }

    fn insert(&mut self, v: Row<I>) -> Result<bool, ()> {
        match self.reduce(v)? {
            None => Ok(false),
            Some(r) => {
                self.rows.insert(r[0].0, r);
                Ok(true)
            }
        }
    }

    fn rank(&self) -> usize {
        self.rows.len()
    }
}

fn normalize<I: Int>(row: &mut Row<I>) {
    let Some(first) = row.first() else { return };
    let mut g = first.1.clone();
    for (_, x) in row.iter().skip(1) {
        if g.is_one() {
            break;
        }
        g = g.gcd(x);
    }
    if g.is_neg() {
        g = g.neg();
    }
    if !g.is_one() && !g.is_zero() {
        for (_, x) in row.iter_mut() {
            *x = x.div_exact(&g);
        }
    }
    if row[0].1.is_neg() {
        for (_, x) in row.iter_mut() {
            *x = x.neg();
        }
    }
}

fn to_row<I: Int>(v: &[(usize, i64)]) -> Row<I> {
    let mut r: Row<I> = v.iter().filter(|e| e.1 != 0).map(|&(c, x)| (c, I::from_i64(x))).collect();
    r.sort_by_key(|e| e.0);
    debug_assert!(r.windows(2).all(|w| w[0].0 < w[1].0), "duplicate index in sparse vector");
    normalize(&mut r);
    r
}

/// Incrementally maintained rank of a growing vector set.
#[derive(Clone, Debug)]
pub struct RankBasis {
    small: Option<Echelon<i128>>,
    big: Option<Echelon<BigInt>>,
    inserted: Vec<SparseVec>,
}

impl Default for RankBasis {
    fn default() -> Self {
        Self::new()
    }
}

impl RankBasis {
    pub fn new() -> Self {
        RankBasis { small: Some(Echelon::new()), big: None, inserted: Vec::new() }
    }

    /// Add a vector; returns true iff it increased the rank.
    pub fn insert(&mut self, v: &[(usize, i64)]) -> bool {
        if let Some(small) = &mut self.small {
            match small.insert(to_row(v)) {
                Ok(grew) => {
                    self.inserted.push(v.to_vec());
                    return grew;
                }
                Err(()) => {
                    let mut big = Echelon::new();
                    for w in &self.inserted {
                        big.insert(to_row(w)).expect("bigint cannot overflow");
                    }
                    self.small = None;
                    self.big = Some(big);
                }
            }
        }
        self.big.as_mut().expect("one mode active").insert(to_row(v)).expect("bigint cannot overflow")
    }

    pub fn contains(&self, v: &[(usize, i64)]) -> bool {
        match (&self.small, &self.big) {
            (Some(s), _) => match s.reduce(to_row(v)) {
                Ok(r) => r.is_none(),
                Err(()) => self.to_big().reduce(to_row(v)).unwrap().is_none(),
            },
            (None, Some(b)) => b.reduce(to_row(v)).unwrap().is_none(),
            _ => unreachable!(),
        }
    }

    fn to_big(&self) -> Echelon<BigInt> {
        let mut big = Echelon::new();
        for w in &self.inserted {
            big.insert(to_row(w)).unwrap();
        }
        big
    }

    pub fn rank(&self) -> usize {
        match (&self.small, &self.big) {
            (Some(s), _) => s.rank(),
            (None, Some(b)) => b.rank(),
            _ => unreachable!(),
        }
    }
}

/// Exact rank of a set of sparse vectors.
pub fn rank_sparse<V: AsRef<[(usize, i64)]>>(vectors: &[V]) -> usize {
    let mut basis = RankBasis::new();
    for v in vectors {
        basis.insert(v.as_ref());
    }
    basis.rank()
}

/// Exact rank of a dense integer matrix given by rows.
pub fn rank_dense(rows: &[Vec<i64>]) -> usize {
    let sparse: Vec<SparseVec> = rows.iter().map(|r| dense_to_sparse(r)).collect();
    rank_sparse(&sparse)
}

pub fn dense_to_sparse(r: &[i64]) -> SparseVec {
    r.iter().enumerate().filter(|e| *e.1 != 0).map(|(i, &x)| (i, x)).collect()
}

/// Integer coefficients `c` (not all zero) with `Σ c_i v_i = 0`, or `None`
/// when the vectors are linearly independent.
pub fn find_dependency(vectors: &[Vec<i64>]) -> Option<Vec<BigInt>> {
    let dim = vectors.iter().map(Vec::len).max().unwrap_or(0);
    let mut ech: Echelon<BigInt> = Echelon::new();
    for (i, v) in vectors.iter().enumerate() {
        // augment with the unit vector e_i after the real coordinates
        let mut row: Row<BigInt> =
            v.iter().enumerate().filter(|e| *e.1 != 0).map(|(c, &x)| (c, BigInt::from(x))).collect();
        row.push((dim + i, BigInt::from(1)));
        let r = ech.reduce(row).unwrap().expect("augmented row never vanishes");
        if r[0].0 >= dim {
            let mut coef = vec![BigInt::zero(); vectors.len()];
            for (c, x) in r {
                coef[c - dim] = x;
            }
            return Some(coef);
        }
        ech.rows.insert(r[0].0, r);
    }
    None
}
