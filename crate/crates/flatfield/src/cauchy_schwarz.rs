//! The triple-counting lower bound: with every member of **L** rich in
//! members of **P**, the set of triples `(P, L, L')` with `P` below both
//! flats cannot be smaller than `M^2 |L|^2 / |P|`. The report carries every
//! quantity exactly; the inequality itself is unconditional.

use std::collections::HashSet;

use crate::counting::power;
use crate::error::{Error, Result};
use crate::family::FlatFamily;
use crate::flat::AffineFlat;

/// Exact output of the triple-counting check.
#[derive(Debug, Clone)]
pub struct CauchySchwarzReport {
    pub flat_count: u64,
    pub sub_count: u64,
    pub richness: u64,
    /// |U|: ordered pairs (L, L') weighted by shared chosen subflats.
    pub triple_count: u128,
    /// The guaranteed floor `M^2 |L|^2 / |P|` as an exact fraction.
    pub lower_bound_num: u128,
    pub lower_bound_den: u128,
    /// `|L|^2 q^{k(m-k)}`: the pairwise-intersection term of the argument.
    pub pairwise_term: u128,
    /// Does `|L| q^{k(m-k)} <= M` hold on this instance?
    pub condition_met: bool,
    /// Achieved constant in `|P| >= |L| M / kappa`.
    pub kappa: f64,
}

impl CauchySchwarzReport {
    /// The unconditional inequality, compared exactly in integers.
    pub fn bound_holds(&self) -> bool {
        self.triple_count * self.lower_bound_den >= self.lower_bound_num
    }
}

/// Verify the triple-count bound for a family `flats` of m-flats and a
/// family `subs` of (k-1)-flats, with richness parameter `m_rich` (the
/// paper-facing `M`). Every member of `flats` must contain at least
/// `m_rich` members of `subs`; otherwise the offending flat is reported.
///
/// For each L the chosen subset keeps between `m_rich` and `2 m_rich`
/// contained members of `subs`, truncating in canonical order.
pub fn verify_cauchy_schwarz(
    flats: &FlatFamily,
    subs: &FlatFamily,
    m_rich: u64,
) -> Result<CauchySchwarzReport> {
    if m_rich == 0 {
        return Err(Error::HypothesisViolation("richness parameter must be positive".into()));
    }
    if subs.flat_dim() >= flats.flat_dim() {
        return Err(Error::DimensionMismatch { expected: flats.flat_dim(), got: subs.flat_dim() });
    }
    let m = flats.flat_dim();
    let k = subs.flat_dim() + 1;
    let q = flats.field().modulus() as u64;

    // chosen subsets P_L, indices into subs
    let mut chosen: Vec<Vec<usize>> = Vec::with_capacity(flats.len());
    for flat in flats.iter() {
        let mut inside = Vec::new();
        for (idx, sub) in subs.iter().enumerate() {
            if flat.contains_flat(sub)? {
                inside.push(idx);
            }
        }
        if (inside.len() as u64) < m_rich {
            return Err(Error::HypothesisViolation(format!(
                "flat {:?} contains only {} of the required {} subflats",
                flat.base(),
                inside.len(),
                m_rich
            )));
        }
        inside.truncate((2 * m_rich) as usize);
        chosen.push(inside);
    }

    // |U| over ordered pairs, including L = L'
    let sets: Vec<HashSet<usize>> = chosen.iter().map(|v| v.iter().copied().collect()).collect();
    let mut triple_count: u128 = 0;
    for a in 0..chosen.len() {
        for b in 0..chosen.len() {
            let (small, large) = if sets[a].len() <= sets[b].len() {
                (&sets[a], &sets[b])
            } else {
                (&sets[b], &sets[a])
            };
            triple_count += small.iter().filter(|i| large.contains(i)).count() as u128;
        }
    }

    let l = flats.len() as u128;
    let p = subs.len() as u128;
    let pairwise_term = l * l * power(q, (k * (m - k)) as u32)?;
    let condition_met = l * power(q, (k * (m - k)) as u32)? <= m_rich as u128;
    let kappa = if p == 0 {
        f64::INFINITY
    } else {
        (l as f64) * (m_rich as f64) / (p as f64)
    };
    Ok(CauchySchwarzReport {
        flat_count: flats.len() as u64,
        sub_count: subs.len() as u64,
        richness: m_rich,
        triple_count,
        lower_bound_num: (m_rich as u128).pow(2) * l * l,
        lower_bound_den: p.max(1),
        pairwise_term,
        condition_met,
        kappa,
    })
}

/// Convenience entry for line families: `subs` is the family of all points
/// covered by the lines.
pub fn points_of(family: &FlatFamily) -> Result<FlatFamily> {
    let codes = family.union_point_codes()?;
    Ok(crate::family::points_as_family(family.field(), family.ambient_dim(), &codes))
}

/// Subflat version of [`points_of`]: every (k-1)-flat below a member.
pub fn covered_hyperflats(family: &FlatFamily) -> Result<FlatFamily> {
    family.covered_subflats(family.flat_dim() - 1)
}

pub use crate::flat::point_code as encode_point;

#[allow(unused)]
fn witness_name(flat: &AffineFlat) -> String {
    format!("{:?}", flat.base())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimeField;
    use crate::flat::enumerate_flats;

    fn f(p: u32) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn lines_through_origin(field: &PrimeField) -> Vec<AffineFlat> {
        enumerate_flats(field, 2, 1)
            .unwrap()
            .into_iter()
            .filter(|l| l.contains_point(&[0, 0]).unwrap())
            .collect()
    }

    #[test]
    fn single_flat_is_trivially_above_bound() {
        let field = f(3);
        let lines = lines_through_origin(&field);
        let fam = FlatFamily::new(field, 2, 1, vec![lines[0].clone()]).unwrap();
        let pts = points_of(&fam).unwrap();
        let rep = verify_cauchy_schwarz(&fam, &pts, 3).unwrap();
        assert_eq!(rep.triple_count, 3); // |P_L| with L paired against itself
        assert!(rep.bound_holds());
    }

    #[test]
    fn concurrent_lines_instance() {
        // 3 concurrent lines through the origin of F_3^2, P = their 7 points,
        // M = 3: |U| = 9 diagonal + 6 off-diagonal = 15 >= 81/7.
        let field = f(3);
        let lines = lines_through_origin(&field);
        let fam = FlatFamily::new(field, 2, 1, lines.into_iter().take(3)).unwrap();
        let pts = points_of(&fam).unwrap();
        assert_eq!(pts.len(), 7);
        let rep = verify_cauchy_schwarz(&fam, &pts, 3).unwrap();
        assert_eq!(rep.triple_count, 15);
        assert_eq!(rep.lower_bound_num, 81);
        assert_eq!(rep.lower_bound_den, 7);
        assert!(rep.bound_holds());
    }

    #[test]
    fn parallel_lines_hit_the_bound_exactly() {
        let field = f(3);
        let mk = |y: u32| {
            AffineFlat::canonicalize(
                &[0, y],
                &crate::linalg::Matrix::from_rows(&[vec![1, 0]], 2).unwrap(),
                &field,
            )
            .unwrap()
        };
        let fam = FlatFamily::new(field, 2, 1, vec![mk(0), mk(1), mk(2)]).unwrap();
        let pts = points_of(&fam).unwrap();
        assert_eq!(pts.len(), 9);
        let rep = verify_cauchy_schwarz(&fam, &pts, 3).unwrap();
        assert_eq!(rep.triple_count, 9);
        assert_eq!(rep.lower_bound_num, 81);
        assert_eq!(rep.lower_bound_den, 9);
        assert!(rep.bound_holds());
        // equality case: 9 >= 81/9 = 9
        assert_eq!(rep.triple_count * rep.lower_bound_den, rep.lower_bound_num);
    }

    #[test]
    fn poor_flat_is_reported() {
        let field = f(3);
        let lines = lines_through_origin(&field);
        let fam = FlatFamily::new(field, 2, 1, lines.into_iter().take(2)).unwrap();
        let pts = points_of(&fam).unwrap();
        let err = verify_cauchy_schwarz(&fam, &pts, 10);
        assert!(matches!(err, Err(Error::HypothesisViolation(_))));
    }
}
