//! Canonical affine flats in F_p^n.
//!
//! A k-flat is a coset `base + rowspan(dirs)`. The canonical form keeps
//! `dirs` in reduced row-echelon form and zeroes the base point's
//! coordinates at the pivot columns, so two flats are equal as values
//! exactly when they contain the same points. That makes flats hashable and
//! orderable, which everything downstream (families, dedup, deterministic
//! enumeration) relies on.

use std::sync::atomic::{AtomicU64, Ordering};

use crate::counting::{count_flats, power};
use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::linalg::{solve_affine_system, Matrix, SpanBuilder};

/// Default ceiling on the number of items any single enumeration may produce.
pub const DEFAULT_ENUMERATION_GUARD: u64 = 10_000_000;

static ENUMERATION_GUARD: AtomicU64 = AtomicU64::new(DEFAULT_ENUMERATION_GUARD);

pub fn enumeration_guard() -> u64 {
    ENUMERATION_GUARD.load(Ordering::Relaxed)
}

/// Override the enumeration guard process-wide (the CLI wires this to an
/// environment variable).
pub fn set_enumeration_guard(limit: u64) {
    ENUMERATION_GUARD.store(limit, Ordering::Relaxed);
}

fn check_guard(requested: u128) -> Result<()> {
    let guard = enumeration_guard();
    if requested > guard as u128 {
        return Err(Error::GuardExceeded { requested, guard });
    }
    Ok(())
}

/// An affine k-flat in canonical form. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AffineFlat {
    p: u32,
    n: usize,
    dirs: Matrix,
    base: Vec<u32>,
}

impl AffineFlat {
    /// Canonicalize an arbitrary generating pair: any `(base, spanning)`
    /// producing the same point set yields an identical value. `spanning`
    /// rows may be dependent; the rank determines the flat dimension.
    pub fn canonicalize(base: &[u32], spanning: &Matrix, field: &PrimeField) -> Result<Self> {
        let n = base.len();
        if spanning.rows() > 0 && spanning.cols() != n {
            return Err(Error::DimensionMismatch { expected: n, got: spanning.cols() });
        }
        let re = if spanning.rows() > 0 {
            spanning.rref(field)
        } else {
            Matrix::zeros(0, n).rref(field)
        };
        let dirs = re.matrix.truncated(re.rank);
        let mut b: Vec<u32> = base.iter().map(|&x| x % field.modulus()).collect();
        for (row, &pc) in re.pivots.iter().enumerate() {
            let c = b[pc];
            if c != 0 {
                for j in 0..n {
                    b[j] = field.sub(b[j], field.mul(c, dirs.at(row, j)));
                }
            }
        }
        Ok(AffineFlat { p: field.modulus(), n, dirs, base: b })
    }

    /// A 0-flat holding a single point.
    pub fn point(coords: &[u32], field: &PrimeField) -> Self {
        let n = coords.len();
        AffineFlat {
            p: field.modulus(),
            n,
            dirs: Matrix::zeros(0, n),
            base: coords.iter().map(|&x| x % field.modulus()).collect(),
        }
    }

    pub fn field(&self) -> PrimeField {
        PrimeField::new_unchecked(self.p)
    }

    pub fn modulus(&self) -> u32 {
        self.p
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dirs.rows()
    }

    pub fn base(&self) -> &[u32] {
        &self.base
    }

    pub fn dirs(&self) -> &Matrix {
        &self.dirs
    }

    fn check_same_ambient(&self, other: &AffineFlat) -> Result<()> {
        if self.p != other.p || self.n != other.n {
            return Err(Error::AmbientMismatch);
        }
        Ok(())
    }

    /// Number of points, `q^k`.
    pub fn point_count(&self) -> Result<u128> {
        power(self.p as u64, self.dim() as u32)
    }

    /// All points of the flat (guarded).
    pub fn points(&self) -> Result<Vec<Vec<u32>>> {
        check_guard(self.point_count()?)?;
        let field = self.field();
        let k = self.dim();
        let mut out = Vec::with_capacity(self.point_count()? as usize);
        let mut coeffs = vec![0u32; k];
        loop {
            let mut pt = self.base.clone();
            for (i, &c) in coeffs.iter().enumerate() {
                if c != 0 {
                    for j in 0..self.n {
                        pt[j] = field.add(pt[j], field.mul(c, self.dirs.at(i, j)));
                    }
                }
            }
            out.push(pt);
            if !increment(&mut coeffs, self.p) {
                break;
            }
        }
        Ok(out)
    }

    /// Points packed into mixed-radix `u64` codes; the cheap currency for
    /// union counting.
    pub fn point_codes(&self) -> Result<Vec<u64>> {
        Ok(self.points()?.iter().map(|pt| point_code(pt, self.p)).collect())
    }

    /// Does the flat contain the given point?
    pub fn contains_point(&self, point: &[u32]) -> Result<bool> {
        crate::linalg::solve_membership(point, &self.base, &self.dirs, &self.field())
    }

    /// Does `self` contain every point of `other`?
    pub fn contains_flat(&self, other: &AffineFlat) -> Result<bool> {
        self.check_same_ambient(other)?;
        let field = self.field();
        let mut span = SpanBuilder::new(&field);
        span.insert_all(&self.dirs);
        if span.rank() != self.dim() {
            unreachable!("canonical dirs are independent");
        }
        for r in 0..other.dirs.rows() {
            if !span.contains(other.dirs.row(r)) {
                return Ok(false);
            }
        }
        let diff: Vec<u32> = other
            .base
            .iter()
            .zip(self.base.iter())
            .map(|(&a, &b)| field.sub(a, b))
            .collect();
        Ok(span.contains(&diff))
    }

    /// Smallest flat containing both inputs.
    pub fn join(&self, other: &AffineFlat) -> Result<AffineFlat> {
        self.check_same_ambient(other)?;
        let field = self.field();
        let mut rows = self.dirs.row_vecs();
        rows.extend(other.dirs.row_vecs());
        let diff: Vec<u32> = other
            .base
            .iter()
            .zip(self.base.iter())
            .map(|(&a, &b)| field.sub(a, b))
            .collect();
        rows.push(diff);
        let spanning = Matrix::from_rows(&rows, self.n)?;
        AffineFlat::canonicalize(&self.base, &spanning, &field)
    }

    /// Exact intersection; `None` when the flats are disjoint. Works through
    /// the constraint representation: each flat is the solution set of a
    /// linear system, and the intersection solves the stacked system.
    pub fn intersect(&self, other: &AffineFlat) -> Result<Option<AffineFlat>> {
        self.check_same_ambient(other)?;
        let field = self.field();
        let (ca, da) = self.constraints(&field);
        let (cb, db) = other.constraints(&field);
        let mut rows = ca.row_vecs();
        rows.extend(cb.row_vecs());
        let stacked = Matrix::from_rows(&rows, self.n)?;
        let mut rhs = da;
        rhs.extend(db);
        match solve_affine_system(&stacked, &rhs, &field) {
            None => Ok(None),
            Some((point, dirs)) => {
                Ok(Some(AffineFlat::canonicalize(&point, &dirs, &field)?))
            }
        }
    }

    /// Dimension of the intersection, or `None` when disjoint. Cheaper than
    /// materializing the intersection flat.
    pub fn intersection_dim(&self, other: &AffineFlat) -> Result<Option<usize>> {
        self.check_same_ambient(other)?;
        let field = self.field();
        let mut span = SpanBuilder::new(&field);
        span.insert_all(&self.dirs);
        span.insert_all(&other.dirs);
        let joint_rank = span.rank();
        let diff: Vec<u32> = other
            .base
            .iter()
            .zip(self.base.iter())
            .map(|(&a, &b)| field.sub(a, b))
            .collect();
        if !span.contains(&diff) {
            return Ok(None);
        }
        Ok(Some(self.dim() + other.dim() - joint_rank))
    }

    /// Constraint form `{z : C z = d}` of the flat.
    fn constraints(&self, field: &PrimeField) -> (Matrix, Vec<u32>) {
        let c = self.dirs.nullspace(field);
        let d: Vec<u32> = (0..c.rows())
            .map(|r| {
                (0..self.n).fold(0u32, |acc, j| {
                    field.add(acc, field.mul(c.at(r, j), self.base[j]))
                })
            })
            .collect();
        (c, d)
    }

    /// All k'-flats contained in this flat, canonical and sorted. Transports
    /// the full enumeration of F_q^k through the flat's parametrization.
    pub fn subflats(&self, k_prime: usize) -> Result<Vec<AffineFlat>> {
        let k = self.dim();
        if k_prime > k {
            return Err(Error::InvalidDimension { what: "subflat dimension", value: k_prime, limit: k });
        }
        let field = self.field();
        if k_prime == k {
            return Ok(vec![self.clone()]);
        }
        check_guard(count_flats(k, k_prime, self.p as u64)?)?;
        let locals = enumerate_flats(&field, k, k_prime)?;
        let mut out = Vec::with_capacity(locals.len());
        for local in locals {
            // ambient point of a local coordinate vector
            let embed = |coords: &[u32]| -> Vec<u32> {
                let mut pt = self.base.clone();
                for (i, &c) in coords.iter().enumerate() {
                    if c != 0 {
                        for j in 0..self.n {
                            pt[j] = field.add(pt[j], field.mul(c, self.dirs.at(i, j)));
                        }
                    }
                }
                pt
            };
            let base = embed(local.base());
            let rows: Vec<Vec<u32>> = (0..local.dirs().rows())
                .map(|r| {
                    let mut v = vec![0u32; self.n];
                    for (i, &c) in local.dirs().row(r).iter().enumerate() {
                        if c != 0 {
                            for j in 0..self.n {
                                v[j] = field.add(v[j], field.mul(c, self.dirs.at(i, j)));
                            }
                        }
                    }
                    v
                })
                .collect();
            let spanning = Matrix::from_rows(&rows, self.n)?;
            out.push(AffineFlat::canonicalize(&base, &spanning, &field)?);
        }
        out.sort();
        out.dedup();
        Ok(out)
    }

    /// Deterministically extend the flat to the requested dimension by
    /// adjoining standard basis directions.
    pub fn extended_to_dim(&self, target: usize) -> Result<AffineFlat> {
        if target > self.n {
            return Err(Error::InvalidDimension { what: "target dimension", value: target, limit: self.n });
        }
        let field = self.field();
        let mut span = SpanBuilder::new(&field);
        span.insert_all(&self.dirs);
        let mut rows = self.dirs.row_vecs();
        for j in 0..self.n {
            if span.rank() >= target {
                break;
            }
            let mut unit = vec![0u32; self.n];
            unit[j] = 1;
            if span.insert(&unit) {
                rows.push(unit);
            }
        }
        let spanning = Matrix::from_rows(&rows, self.n)?;
        AffineFlat::canonicalize(&self.base, &spanning, &field)
    }
}

fn increment(coeffs: &mut [u32], p: u32) -> bool {
    for c in coeffs.iter_mut() {
        *c += 1;
        if *c < p {
            return true;
        }
        *c = 0;
    }
    false
}

/// Pack a point into a single mixed-radix code.
pub fn point_code(point: &[u32], p: u32) -> u64 {
    point.iter().rev().fold(0u64, |acc, &c| acc * p as u64 + c as u64)
}

/// Every k-dimensional direction space of F_p^n exactly once, as RREF
/// matrices: one pivot-column choice per subspace, free entries swept over
/// the field.
pub fn enumerate_direction_spaces(field: &PrimeField, n: usize, k: usize) -> Result<Vec<Matrix>> {
    if k > n {
        return Err(Error::InvalidDimension { what: "subspace dimension", value: k, limit: n });
    }
    let q = field.modulus() as u64;
    let total = crate::counting::gaussian_binomial(n, k, q)?;
    check_guard(total)?;
    let mut out = Vec::with_capacity(total as usize);
    for pivots in k_subsets(n, k) {
        let is_pivot = {
            let mut s = vec![false; n];
            for &c in &pivots {
                s[c] = true;
            }
            s
        };
        // free matrix entries: row i may be nonzero at columns past its pivot
        // that are not pivot columns themselves
        let mut free_cells = Vec::new();
        for (i, &pc) in pivots.iter().enumerate() {
            for j in (pc + 1)..n {
                if !is_pivot[j] {
                    free_cells.push((i, j));
                }
            }
        }
        let mut entries = vec![0u32; free_cells.len()];
        loop {
            let mut dirs = Matrix::zeros(k, n);
            for (i, &pc) in pivots.iter().enumerate() {
                dirs.set(i, pc, 1);
            }
            for (&(i, j), &v) in free_cells.iter().zip(entries.iter()) {
                dirs.set(i, j, v);
            }
            out.push(dirs);
            if !increment(&mut entries, field.modulus()) {
                break;
            }
        }
    }
    debug_assert_eq!(out.len() as u128, total);
    Ok(out)
}

/// Every k-flat of F_p^n exactly once, canonical and sorted. Each direction
/// space contributes one base point per assignment of its non-pivot
/// coordinates.
pub fn enumerate_flats(field: &PrimeField, n: usize, k: usize) -> Result<Vec<AffineFlat>> {
    if k > n {
        return Err(Error::InvalidDimension { what: "flat dimension", value: k, limit: n });
    }
    let q = field.modulus() as u64;
    let total = count_flats(n, k, q)?;
    check_guard(total)?;
    let mut out = Vec::with_capacity(total as usize);
    for dirs in enumerate_direction_spaces(field, n, k)? {
        let pivot_cols: Vec<usize> = {
            // rows are already RREF; pivots are each row's leading column
            (0..k).map(|r| (0..n).find(|&c| dirs.at(r, c) != 0).unwrap()).collect()
        };
        let is_pivot = {
            let mut s = vec![false; n];
            for &c in &pivot_cols {
                s[c] = true;
            }
            s
        };
        let free_cols: Vec<usize> = (0..n).filter(|&j| !is_pivot[j]).collect();
        let mut base_entries = vec![0u32; free_cols.len()];
        loop {
            let mut base = vec![0u32; n];
            for (&j, &v) in free_cols.iter().zip(base_entries.iter()) {
                base[j] = v;
            }
            out.push(AffineFlat { p: field.modulus(), n, dirs: dirs.clone(), base });
            if !increment(&mut base_entries, field.modulus()) {
                break;
            }
        }
    }
    debug_assert_eq!(out.len() as u128, total);
    out.sort();
    Ok(out)
}

fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for i in start..n {
            current.push(i);
            rec(i + 1, n, k, current, out);
            current.pop();
        }
    }
    rec(0, n, k, &mut current, &mut out);
    out
}
