//! Exact linear algebra over the rationals: dense matrices for the group layer
//! and an incremental sparse echelon form keyed by monomials for the
//! invariant-theory layer.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::rational::Q;

/// Dense square or rectangular matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Q>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix {
            rows,
            cols,
            data: vec![Q::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Q::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Q>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        QMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| crate::rational::q(x)).collect())
                .collect(),
        )
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[Q] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Q>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Q]) -> Vec<Q> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(Q::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    pub fn add(&self, other: &QMatrix) -> QMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &QMatrix) -> QMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, s: &Q) -> QMatrix {
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (QMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m[(r, c)].recip();
            for j in c..m.cols {
                let v = &m[(r, j)] * &inv;
                m[(r, j)] = v;
            }
            for i in 0..m.rows {
                if i != r && !m[(i, c)].is_zero() {
                    let f = m[(i, c)].clone();
                    for j in c..m.cols {
                        let v = &m[(r, j)] * &f;
                        if !v.is_zero() {
                            m[(i, j)] -= v;
                        }
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right kernel `{v : M v = 0}`, one vector per free column.
    pub fn nullspace(&self) -> Vec<Vec<Q>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Q::zero(); self.cols];
                v[f] = Q::one();
                for (row, &p) in pivots.iter().enumerate() {
                    v[p] = -r[(row, f)].clone();
                }
                v
            })
            .collect()
    }

    pub fn determinant(&self) -> Q {
        assert!(self.is_square());
        let mut m = self.clone();
        let n = self.rows;
        let mut det = Q::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m[(i, c)].is_zero()) else {
                return Q::zero();
            };
            if p != c {
                m.swap_rows(p, c);
                det = -det;
            }
            let pivot = m[(c, c)].clone();
            det *= &pivot;
            for i in c + 1..n {
                if m[(i, c)].is_zero() {
                    continue;
                }
                let f = &m[(i, c)] / &pivot;
                for j in c..n {
                    let v = &m[(c, j)] * &f;
                    m[(i, j)] -= v;
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Option<QMatrix> {
        assert!(self.is_square());
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = Q::one();
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = r[(i, n + j)].clone();
            }
        }
        Some(inv)
    }

    /// Coefficients `[1, c1, …, cn]` of `det(I − tM) = 1 + c1 t + … + cn t^n`,
    /// via the Faddeev–LeVerrier recursion.
    pub fn reversed_charpoly(&self) -> Vec<Q> {
        assert!(self.is_square());
        let n = self.rows;
        // det(λI − M) = λ^n + c1 λ^{n-1} + … + cn
        let mut coeffs = vec![Q::one()];
        let mut mk = Self::zeros(n, n);
        for k in 1..=n {
            // M_k = M·M_{k-1} + c_{k-1} I
            let mut next = self.mul(&mk);
            for i in 0..n {
                next[(i, i)] += &coeffs[k - 1];
            }
            mk = next;
            let am = self.mul(&mk);
            let tr = (0..n).fold(Q::zero(), |acc, i| acc + &am[(i, i)]);
            coeffs.push(-tr / Q::from_integer((k as i64).into()));
        }
        coeffs
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl std::ops::Index<(usize, usize)> for QMatrix {
    type Output = Q;
    fn index(&self, (i, j): (usize, usize)) -> &Q {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for QMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Q {
        &mut self.data[i * self.cols + j]
    }
}

pub type SparseVec<K> = BTreeMap<K, Q>;

/// Incremental row echelon form over sparse vectors. The pivot of a row is its
/// largest key, so with graded-lex monomial keys pivots are leading monomials.
#[derive(Debug, Clone)]
pub struct SparseEchelon<K: Ord + Clone> {
    rows: BTreeMap<K, SparseVec<K>>,
}

impl<K: Ord + Clone> Default for SparseEchelon<K> {
    fn default() -> Self {
        SparseEchelon {
            rows: BTreeMap::new(),
        }
    }
}

impl<K: Ord + Clone> SparseEchelon<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the stored rows: the result has no key equal to a
    /// stored pivot at a position where reduction applied.
    pub fn reduce(&self, v: &SparseVec<K>) -> SparseVec<K> {
        let mut v = v.clone();
        // walk pivots from largest to smallest; subtracting a row only touches
        // keys at or below its pivot
        let mut cursor: Option<K> = None;
        loop {
            let next = match &cursor {
                None => v.keys().next_back().cloned(),
                Some(c) => v.range(..c.clone()).next_back().map(|(k, _)| k.clone()),
            };
            let Some(key) = next else { break };
            if let Some(row) = self.rows.get(&key) {
                let f = v[&key].clone();
                sub_scaled(&mut v, row, &f);
            }
            cursor = Some(key);
        }
        v
    }

    /// Adds `v` if it is independent of the stored rows; returns its pivot.
    pub fn insert(&mut self, v: &SparseVec<K>) -> Option<K> {
        let r = self.reduce(v);
        let (lead, lc) = r.iter().next_back().map(|(k, c)| (k.clone(), c.clone()))?;
        let inv = lc.recip();
        let r: SparseVec<K> = r.into_iter().map(|(k, c)| (k, c * &inv)).collect();
        self.rows.insert(lead.clone(), r);
        Some(lead)
    }

    pub fn contains(&self, v: &SparseVec<K>) -> bool {
        self.reduce(v).is_empty()
    }

    pub fn pivots(&self) -> impl Iterator<Item = &K> {
        self.rows.keys()
    }

    /// Rows in reduced echelon form, keyed by pivot (ascending).
    pub fn reduced_rows(&self) -> Vec<(K, SparseVec<K>)> {
        let mut out: BTreeMap<K, SparseVec<K>> = BTreeMap::new();
        // ascending pivots: each row gets reduced against all smaller-pivot rows
        for (p, row) in &self.rows {
            let mut r = row.clone();
            for (q, qrow) in &out {
                if let Some(f) = r.get(q).cloned() {
                    sub_scaled(&mut r, qrow, &f);
                }
            }
            // reduce the already-stored rows against the new one
            let mut updated = BTreeMap::new();
            for (q, qrow) in std::mem::take(&mut out) {
                let mut qr = qrow;
                if let Some(f) = qr.get(p).cloned() {
                    sub_scaled(&mut qr, &r, &f);
                }
                updated.insert(q, qr);
            }
            out = updated;
            out.insert(p.clone(), r);
        }
        out.into_iter().collect()
    }
}

fn sub_scaled<K: Ord + Clone>(v: &mut SparseVec<K>, row: &SparseVec<K>, f: &Q) {
    for (k, c) in row {
        let delta = c * f;
        let e = v.entry(k.clone()).or_insert_with(Q::zero);
        *e -= delta;
        if e.is_zero() {
            v.remove(k);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, q_frac};

    #[test]
    fn determinant_and_inverse() {
        let m = QMatrix::from_i64(&[&[2, 1], &[1, 1]]);
        assert_eq!(m.determinant(), q(1));
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), QMatrix::identity(2));
        assert!(QMatrix::from_i64(&[&[1, 2], &[2, 4]]).inverse().is_none());
    }

    #[test]
    fn nullspace_of_rank_deficient() {
        let m = QMatrix::from_i64(&[&[1, 1, 0], &[0, 0, 1]]);
        let ns = m.nullspace();
        assert_eq!(ns.len(), 1);
        assert_eq!(m.mul_vec(&ns[0]), vec![q(0), q(0)]);
    }

    #[test]
    fn reversed_charpoly_of_rotation() {
        // det(I - tR) = 1 + t^2 for the quarter turn
        let r = QMatrix::from_i64(&[&[0, -1], &[1, 0]]);
        assert_eq!(r.reversed_charpoly(), vec![q(1), q(0), q(1)]);
        let d = QMatrix::from_rows(vec![vec![q_frac(1, 2), q(0)], vec![q(0), q(3)]]);
        // (1 - t/2)(1 - 3t)
        assert_eq!(
            d.reversed_charpoly(),
            vec![q(1), q_frac(-7, 2), q_frac(3, 2)]
        );
    }

    #[test]
    fn echelon_reduced_rows() {
        let mut e: SparseEchelon<u32> = SparseEchelon::new();
        let v = |xs: &[(u32, i64)]| xs.iter().map(|&(k, c)| (k, q(c))).collect::<SparseVec<u32>>();
        assert_eq!(e.insert(&v(&[(3, 1), (1, 2)])), Some(3));
        assert_eq!(e.insert(&v(&[(3, 2), (1, 4)])), None);
        assert_eq!(e.insert(&v(&[(1, 1), (0, 1)])), Some(1));
        let rows = e.reduced_rows();
        assert_eq!(rows[1].1, v(&[(3, 1), (0, -2)]));
        assert!(e.contains(&v(&[(3, 1), (0, -2)])));
    }
}
