//! Dense matrices over F_p and the row-reduction routines every flat
//! operation is built on.

use crate::error::{Error, Result};
use crate::field::PrimeField;

/// Row-major matrix of field elements. Zero-row matrices are valid (they
/// carry the direction space of a point).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

/// Result of reduction to reduced row-echelon form.
#[derive(Debug, Clone)]
pub struct RowEchelon {
    pub matrix: Matrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<u32>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data has the wrong length");
        Matrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn from_rows(rows: &[Vec<u32>], cols: usize) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch { expected: cols, got: r.len() });
            }
            data.extend_from_slice(r);
        }
        Ok(Matrix { rows: rows.len(), cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.at(r, c));
            }
        }
        t
    }

    /// Gauss–Jordan elimination. Pivot columns come out strictly increasing
    /// with unit pivots and zeros above and below.
    pub fn rref(&self, field: &PrimeField) -> RowEchelon {
        let mut m = self.clone();
        let p = field.modulus();
        for v in m.data.iter_mut() {
            *v %= p;
        }
        let mut rank = 0;
        let mut pivots = Vec::new();
        for col in 0..m.cols {
            let Some(pivot_row) = (rank..m.rows).find(|&r| m.at(r, col) != 0) else {
                continue;
            };
            m.swap_rows(rank, pivot_row);
            let inv = field.inv(m.at(rank, col)).expect("pivot is nonzero");
            for c in 0..m.cols {
                m.set(rank, c, field.mul(m.at(rank, c), inv));
            }
            for r in 0..m.rows {
                if r == rank || m.at(r, col) == 0 {
                    continue;
                }
                let factor = m.at(r, col);
                for c in 0..m.cols {
                    let v = field.sub(m.at(r, c), field.mul(factor, m.at(rank, c)));
                    m.set(r, c, v);
                }
            }
            pivots.push(col);
            rank += 1;
        }
        RowEchelon { matrix: m, rank, pivots }
    }

    pub fn rank(&self, field: &PrimeField) -> usize {
        self.rref(field).rank
    }

    /// Drops all-zero rows, keeping the first `rank` rows of an RREF matrix.
    pub fn truncated(&self, keep_rows: usize) -> Matrix {
        Matrix {
            rows: keep_rows,
            cols: self.cols,
            data: self.data[..keep_rows * self.cols].to_vec(),
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// Basis of `{v : M v = 0}` (column-vector kernel), one row per free
    /// column of the RREF. Empty matrix for a full-rank square map.
    pub fn nullspace(&self, field: &PrimeField) -> Matrix {
        let re = self.rref(field);
        let pivot_set: Vec<bool> = {
            let mut s = vec![false; self.cols];
            for &c in &re.pivots {
                s[c] = true;
            }
            s
        };
        let free: Vec<usize> = (0..self.cols).filter(|&c| !pivot_set[c]).collect();
        let mut out = Matrix::zeros(free.len(), self.cols);
        for (i, &fc) in free.iter().enumerate() {
            out.set(i, fc, 1);
            for (row, &pc) in re.pivots.iter().enumerate() {
                out.set(i, pc, field.neg(re.matrix.at(row, fc)));
            }
        }
        out
    }
}

/// Incremental row-echelon accumulator. Cheaper than a full RREF when all we
/// need is rank growth and span-membership tests.
#[derive(Debug, Clone)]
pub struct SpanBuilder<'a> {
    field: &'a PrimeField,
    /// (pivot column, row) pairs; each row has a unit leading entry at its
    /// pivot column and zeros at earlier pivot columns.
    rows: Vec<(usize, Vec<u32>)>,
}

impl<'a> SpanBuilder<'a> {
    pub fn new(field: &'a PrimeField) -> Self {
        SpanBuilder { field, rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduce `row` against the current span without inserting it. Returns
    /// the residue.
    fn residue(&self, row: &[u32]) -> Vec<u32> {
        let f = self.field;
        let mut v: Vec<u32> = row.iter().map(|&x| x % f.modulus()).collect();
        for (pc, basis) in &self.rows {
            let c = v[*pc];
            if c != 0 {
                for (x, b) in v.iter_mut().zip(basis.iter()) {
                    *x = f.sub(*x, f.mul(c, *b));
                }
            }
        }
        v
    }

    /// Insert a row; returns true if it enlarged the span.
    pub fn insert(&mut self, row: &[u32]) -> bool {
        let f = self.field;
        let mut v = self.residue(row);
        let Some(pc) = v.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = f.inv(v[pc]).expect("leading entry is nonzero");
        for x in v.iter_mut() {
            *x = f.mul(*x, inv);
        }
        self.rows.push((pc, v));
        true
    }

    pub fn insert_all(&mut self, m: &Matrix) {
        for r in 0..m.rows() {
            self.insert(m.row(r));
        }
    }

    pub fn contains(&self, row: &[u32]) -> bool {
        self.residue(row).iter().all(|&x| x == 0)
    }
}

/// Is `point - base` in the row span of `dirs`?
pub fn solve_membership(
    point: &[u32],
    base: &[u32],
    dirs: &Matrix,
    field: &PrimeField,
) -> Result<bool> {
    if point.len() != dirs.cols() || base.len() != dirs.cols() {
        return Err(Error::DimensionMismatch { expected: dirs.cols(), got: point.len().max(base.len()) });
    }
    let mut span = SpanBuilder::new(field);
    span.insert_all(dirs);
    let diff: Vec<u32> = point
        .iter()
        .zip(base.iter())
        .map(|(&a, &b)| field.sub(a, b))
        .collect();
    Ok(span.contains(&diff))
}

/// Solve the affine system `M x = rhs`. Returns a particular solution and a
/// basis of the homogeneous solution space, or `None` if inconsistent.
pub fn solve_affine_system(
    m: &Matrix,
    rhs: &[u32],
    field: &PrimeField,
) -> Option<(Vec<u32>, Matrix)> {
    assert_eq!(rhs.len(), m.rows(), "rhs length must match row count");
    let mut aug = Matrix::zeros(m.rows(), m.cols() + 1);
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            aug.set(r, c, m.at(r, c));
        }
        aug.set(r, m.cols(), rhs[r] % field.modulus());
    }
    let re = aug.rref(field);
    if re.pivots.contains(&m.cols()) {
        return None; // pivot in the rhs column: inconsistent
    }
    let mut particular = vec![0u32; m.cols()];
    for (row, &pc) in re.pivots.iter().enumerate() {
        particular[pc] = re.matrix.at(row, m.cols());
    }
    Some((particular, m.nullspace(field)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u32) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn rref_zero_matrix() {
        let re = Matrix::zeros(2, 2).rref(&f(3));
        assert_eq!(re.rank, 0);
        assert!(re.pivots.is_empty());
        assert_eq!(re.matrix, Matrix::zeros(2, 2));
    }

    #[test]
    fn rref_full_rank_over_f3() {
        // [[1,1],[1,2]] over F_3 reduces to the identity
        let m = Matrix::new(2, 2, vec![1, 1, 1, 2]);
        let re = m.rref(&f(3));
        assert_eq!(re.rank, 2);
        assert_eq!(re.pivots, vec![0, 1]);
        assert_eq!(re.matrix, Matrix::new(2, 2, vec![1, 0, 0, 1]));
    }

    #[test]
    fn rref_scales_single_row() {
        // [[2,4]] over F_5: scale by inv(2)=3 -> [[1,2]]
        let m = Matrix::new(1, 2, vec![2, 4]);
        let re = m.rref(&f(5));
        assert_eq!(re.rank, 1);
        assert_eq!(re.pivots, vec![0]);
        assert_eq!(re.matrix, Matrix::new(1, 2, vec![1, 2]));
    }

    #[test]
    fn membership_examples() {
        let field = f(3);
        let dirs = Matrix::new(1, 2, vec![1, 1]);
        assert!(solve_membership(&[0, 0], &[0, 0], &dirs, &field).unwrap());
        assert!(solve_membership(&[2, 2], &[0, 0], &dirs, &field).unwrap());
        assert!(!solve_membership(&[1, 0], &[0, 0], &dirs, &field).unwrap());
        assert!(matches!(
            solve_membership(&[1, 0, 0], &[0, 0], &dirs, &field),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn nullspace_annihilates() {
        let field = f(5);
        let m = Matrix::new(2, 4, vec![1, 2, 3, 4, 0, 1, 1, 2]);
        let ns = m.nullspace(&field);
        assert_eq!(ns.rows(), 2);
        for r in 0..ns.rows() {
            for mr in 0..m.rows() {
                let dot: u32 = (0..4).fold(0, |acc, c| {
                    field.add(acc, field.mul(m.at(mr, c), ns.at(r, c)))
                });
                assert_eq!(dot, 0);
            }
        }
    }

    #[test]
    fn affine_solver_consistent_and_not() {
        let field = f(3);
        let m = Matrix::new(2, 2, vec![1, 0, 0, 1]);
        let (sol, null) = solve_affine_system(&m, &[2, 1], &field).unwrap();
        assert_eq!(sol, vec![2, 1]);
        assert_eq!(null.rows(), 0);

        // x + y = 0 and x + y = 1 cannot both hold
        let m = Matrix::new(2, 2, vec![1, 1, 1, 1]);
        assert!(solve_affine_system(&m, &[0, 1], &field).is_none());
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_matrix() -> impl Strategy<Value = (u32, Matrix)> {
            (prop_oneof![Just(2u32), Just(3), Just(5)], 1usize..=5, 1usize..=5).prop_flat_map(
                |(p, rows, cols)| {
                    proptest::collection::vec(0u32..p, rows * cols)
                        .prop_map(move |data| (p, Matrix::new(rows, cols, data)))
                },
            )
        }

        proptest! {
            #[test]
            fn rref_is_idempotent((p, m) in arb_matrix()) {
                let field = PrimeField::new(p).unwrap();
                let once = m.rref(&field);
                let twice = once.matrix.rref(&field);
                prop_assert_eq!(&once.matrix, &twice.matrix);
                prop_assert_eq!(once.rank, twice.rank);
            }

            #[test]
            fn rank_equals_transpose_rank((p, m) in arb_matrix()) {
                let field = PrimeField::new(p).unwrap();
                prop_assert_eq!(m.rank(&field), m.transpose().rank(&field));
            }

            #[test]
            fn rref_pivots_are_clean((p, m) in arb_matrix()) {
                let field = PrimeField::new(p).unwrap();
                let re = m.rref(&field);
                let mut prev = None;
                for (row, &pc) in re.pivots.iter().enumerate() {
                    if let Some(q) = prev {
                        prop_assert!(pc > q);
                    }
                    prev = Some(pc);
                    prop_assert_eq!(re.matrix.at(row, pc), 1);
                    for r in 0..re.matrix.rows() {
                        if r != row {
                            prop_assert_eq!(re.matrix.at(r, pc), 0);
                        }
                    }
                }
            }
        }
    }
}
