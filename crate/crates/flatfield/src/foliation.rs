//! Foliation of the ambient space around a fixed m-flat.
//!
//! Given an m-flat S and parameters (k, q_int), the leaves are the
//! (m + k - q_int)-flats `S + V` over all (k - q_int)-dimensional subspaces
//! V of a fixed complement of S's direction space. For every pair of a
//! k-flat L and a (k-1)-flat P with `P inside L`, `dim(L ∩ S) = q_int`, and
//! `dim(P ∩ S) = q_int - 1` (empty when q_int = 0), exactly one leaf
//! contains L and no other leaf contains P. That routing is what lets
//! per-leaf counts add up without double counting.

use crate::error::{Error, Result};
use crate::flat::{enumerate_direction_spaces, AffineFlat};
use crate::linalg::Matrix;

#[derive(Debug, Clone)]
pub struct Foliation {
    pub center: AffineFlat,
    pub q_int: usize,
    pub k: usize,
    /// Canonically sorted leaves, each of dimension m + k - q_int.
    pub leaves: Vec<AffineFlat>,
}

/// Result of routing one qualifying (P, L) pair through a foliation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Routing {
    pub leaf: usize,
    /// True when L sits in exactly one leaf and P in no other leaf.
    pub unique: bool,
}

/// Build the foliation around `center` routing k-flats that meet it in
/// q_int-flats. Requires `0 <= q_int <= k-1` and `m + k - q_int <= n`.
pub fn foliate(center: &AffineFlat, q_int: usize, k: usize) -> Result<Foliation> {
    if k == 0 || q_int > k - 1 {
        return Err(Error::InvalidDimension { what: "intersection dimension", value: q_int, limit: k.saturating_sub(1) });
    }
    let m = center.dim();
    let n = center.ambient_dim();
    if m + k - q_int > n {
        return Err(Error::InvalidDimension { what: "leaf dimension", value: m + k - q_int, limit: n });
    }
    let field = center.field();

    // complement of the direction space: standard basis vectors at the
    // non-pivot columns of the RREF direction matrix
    let pivot_cols: Vec<usize> = (0..m)
        .map(|r| (0..n).find(|&c| center.dirs().at(r, c) != 0).unwrap())
        .collect();
    let mut is_pivot = vec![false; n];
    for &c in &pivot_cols {
        is_pivot[c] = true;
    }
    let complement_cols: Vec<usize> = (0..n).filter(|&j| !is_pivot[j]).collect();

    let mut leaves = Vec::new();
    for subspace in enumerate_direction_spaces(&field, n - m, k - q_int)? {
        let mut rows = center.dirs().row_vecs();
        for r in 0..subspace.rows() {
            let mut ambient = vec![0u32; n];
            for (local, &col) in complement_cols.iter().enumerate() {
                ambient[col] = subspace.at(r, local);
            }
            rows.push(ambient);
        }
        let spanning = Matrix::from_rows(&rows, n)?;
        leaves.push(AffineFlat::canonicalize(center.base(), &spanning, &field)?);
    }
    leaves.sort();
    leaves.dedup();
    Ok(Foliation { center: center.clone(), q_int, k, leaves })
}

impl Foliation {
    pub fn leaf_count(&self) -> usize {
        self.leaves.len()
    }

    /// Indices of all leaves containing the given flat.
    pub fn leaves_containing(&self, flat: &AffineFlat) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for (i, leaf) in self.leaves.iter().enumerate() {
            if leaf.contains_flat(flat)? {
                out.push(i);
            }
        }
        Ok(out)
    }

    /// Does the (P, L) pair qualify for unique routing?
    pub fn qualifies(&self, sub: &AffineFlat, flat: &AffineFlat) -> Result<bool> {
        if flat.dim() != self.k || sub.dim() + 1 != self.k {
            return Ok(false);
        }
        if !flat.contains_flat(sub)? {
            return Ok(false);
        }
        if flat.intersection_dim(&self.center)? != Some(self.q_int) {
            return Ok(false);
        }
        let sub_meet = sub.intersection_dim(&self.center)?;
        Ok(match self.q_int {
            0 => sub_meet.is_none(),
            q => sub_meet == Some(q - 1),
        })
    }

    /// Route a qualifying pair: find the leaf holding L and check that it is
    /// unique and that P avoids every other leaf.
    pub fn route(&self, sub: &AffineFlat, flat: &AffineFlat) -> Result<Routing> {
        let holding = self.leaves_containing(flat)?;
        if holding.len() != 1 {
            return Ok(Routing { leaf: holding.first().copied().unwrap_or(usize::MAX), unique: false });
        }
        let leaf = holding[0];
        for (i, other) in self.leaves.iter().enumerate() {
            if i != leaf && other.contains_flat(sub)? {
                return Ok(Routing { leaf, unique: false });
            }
        }
        Ok(Routing { leaf, unique: true })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimeField;
    use crate::flat::enumerate_flats;

    fn f(p: u32) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn axis_line(field: &PrimeField, n: usize) -> AffineFlat {
        let mut dir = vec![0u32; n];
        dir[0] = 1;
        AffineFlat::canonicalize(&vec![0; n], &Matrix::from_rows(&[dir], n).unwrap(), field)
            .unwrap()
    }

    #[test]
    fn line_in_f2_cubed_has_three_leaves() {
        let field = f(2);
        let s = axis_line(&field, 3);
        let fol = foliate(&s, 0, 1).unwrap();
        assert_eq!(fol.leaf_count(), 3);
        for leaf in &fol.leaves {
            assert_eq!(leaf.dim(), 2);
            assert!(leaf.contains_flat(&s).unwrap());
        }
        // the three 2-planes through S cover all 8 points
        let mut covered = std::collections::HashSet::new();
        for leaf in &fol.leaves {
            covered.extend(leaf.point_codes().unwrap());
        }
        assert_eq!(covered.len(), 8);
    }

    #[test]
    fn line_in_f3_cubed_has_four_leaves() {
        let field = f(3);
        let s = axis_line(&field, 3);
        assert_eq!(foliate(&s, 0, 1).unwrap().leaf_count(), 4);
    }

    #[test]
    fn plane_routing_around_line_in_f2_fourth() {
        // k = 2, q_int = 1, S a line in F_2^4: leaves are the seven 2-planes
        // S + V over 1-dim subspaces of the 3-dim complement
        let field = f(2);
        let s = axis_line(&field, 4);
        let fol = foliate(&s, 1, 2).unwrap();
        assert_eq!(fol.leaf_count(), 7);
        for leaf in &fol.leaves {
            assert_eq!(leaf.dim(), 2);
        }
    }

    #[test]
    fn every_qualifying_pair_routes_uniquely_small_case() {
        let field = f(2);
        let s = axis_line(&field, 3);
        let fol = foliate(&s, 0, 1).unwrap();
        let mut qualifying = 0;
        for flat in enumerate_flats(&field, 3, 1).unwrap() {
            for sub in flat.subflats(0).unwrap() {
                if fol.qualifies(&sub, &flat).unwrap() {
                    qualifying += 1;
                    assert!(fol.route(&sub, &flat).unwrap().unique);
                }
            }
        }
        assert!(qualifying > 0);
    }

    #[test]
    fn rejects_invalid_parameters() {
        let field = f(3);
        let s = axis_line(&field, 3);
        assert!(foliate(&s, 1, 1).is_err()); // q_int > k-1
        assert!(foliate(&s, 0, 3).is_err()); // leaf dimension 4 > n
    }
}
