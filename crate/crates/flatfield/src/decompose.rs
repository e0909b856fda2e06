//! Greedy plane selection: split a family of k-flats into parts captured by
//! rich m-planes, descending from dimension d until at least half of some
//! level's survivors get captured.
//!
//! The procedure keeps five exactly-checkable postconditions:
//!  (a) parts are pairwise disjoint and each part sits inside its plane;
//!  (b) for m > k every part has at least `q^{(k+1)(m-1-k)+k}` members;
//!  (c) for m = k every part is a singleton;
//!  (d) the selected union keeps at least `2^{-(d-m+1)}` of the family;
//!  (e) above the selected level, no higher-dimensional plane is rich: every
//!      m'-plane with m < m' <= d holds fewer than `q^{(k+1)(m'-1-k)+k}`
//!      selected members.

use std::collections::HashSet;

use crate::axioms::max_members_in_flat;
use crate::counting::power;
use crate::error::{Error, Result};
use crate::family::FlatFamily;
use crate::flat::AffineFlat;

#[derive(Debug, Clone)]
pub struct Decomposition {
    pub d: usize,
    pub k: usize,
    /// Selected level, k <= m <= d.
    pub m: usize,
    /// The rich m-planes, in selection order.
    pub planes: Vec<AffineFlat>,
    /// Captured members per plane, parallel to `planes`.
    pub parts: Vec<FlatFamily>,
    /// Survivors per visited level: (m', remaining family after level m').
    pub residue_chain: Vec<(usize, FlatFamily)>,
    /// Union of all parts.
    pub selected: FlatFamily,
    pub input_size: u64,
}

/// Capture threshold at level m: `q^{(k+1)(m-1-k)+k}` for m > k. At m = k
/// the procedure switches to singletons instead.
pub fn capture_threshold(k: usize, m: usize, q: u64) -> Result<u128> {
    if m <= k {
        return Ok(1);
    }
    power(q, ((k + 1) * (m - 1 - k) + k) as u32)
}

/// Run the greedy selection. The rich m-plane found at each step is the one
/// capturing the most active members; ties break toward the canonically
/// smallest plane.
pub fn select_planes(family: &FlatFamily, d: usize) -> Result<Decomposition> {
    let k = family.flat_dim();
    let n = family.ambient_dim();
    if d < k || d > n {
        return Err(Error::InvalidDimension { what: "selection dimension", value: d, limit: n });
    }
    if family.is_empty() {
        return Err(Error::HypothesisViolation("plane selection needs a nonempty family".into()));
    }
    let q = family.field().modulus() as u64;
    let mut active: Vec<AffineFlat> = family.members().to_vec();
    let mut residue_chain = Vec::new();

    for m in ((k + 1)..=d).rev() {
        let entering = active.len();
        let threshold = capture_threshold(k, m, q)?;
        let mut planes = Vec::new();
        let mut parts = Vec::new();
        loop {
            let (best, witness) = max_members_in_flat(&active, m)?;
            if (best as u128) < threshold {
                break;
            }
            let plane = witness.expect("a positive count comes with a witness");
            let mut captured = Vec::new();
            active.retain(|l| match plane.contains_flat(l) {
                Ok(true) => {
                    captured.push(l.clone());
                    false
                }
                _ => true,
            });
            parts.push(FlatFamily::new(family.field(), n, k, captured)?);
            planes.push(plane);
        }
        let survivors = FlatFamily::new(family.field(), n, k, active.iter().cloned())?;
        residue_chain.push((m, survivors));
        if 2 * active.len() < entering {
            let selected: Vec<AffineFlat> =
                parts.iter().flat_map(|p| p.members().iter().cloned()).collect();
            return Ok(Decomposition {
                d,
                k,
                m,
                planes,
                parts,
                residue_chain,
                selected: FlatFamily::new(family.field(), n, k, selected)?,
                input_size: family.len() as u64,
            });
        }
    }

    // level m = k: every surviving member becomes its own plane
    let planes: Vec<AffineFlat> = active.clone();
    let parts: Vec<FlatFamily> = active
        .iter()
        .map(|l| FlatFamily::new(family.field(), n, k, vec![l.clone()]).expect("singleton"))
        .collect();
    let selected = FlatFamily::new(family.field(), n, k, active)?;
    Ok(Decomposition {
        d,
        k,
        m: k,
        planes,
        parts,
        residue_chain,
        selected,
        input_size: family.len() as u64,
    })
}

impl Decomposition {
    /// Check postconditions (a)-(e) against the original family, naming the
    /// first violated one. (e) is verified with the exact join-closure
    /// maximum over higher-dimensional planes.
    pub fn check_invariants(&self, original: &FlatFamily) -> Result<()> {
        let q = original.field().modulus() as u64;
        // (a) parts pairwise disjoint, members of the original, inside planes
        let mut seen: HashSet<&AffineFlat> = HashSet::new();
        for (plane, part) in self.planes.iter().zip(self.parts.iter()) {
            for member in part.iter() {
                if !seen.insert(member) {
                    return Err(Error::HypothesisViolation("(a) parts overlap".into()));
                }
                if !original.contains(member) {
                    return Err(Error::HypothesisViolation("(a) part member not in family".into()));
                }
                if !plane.contains_flat(member)? {
                    return Err(Error::HypothesisViolation("(a) member outside its plane".into()));
                }
            }
        }
        // (b)/(c) part sizes
        let threshold = capture_threshold(self.k, self.m, q)?;
        for part in &self.parts {
            if self.m > self.k {
                if (part.len() as u128) < threshold {
                    return Err(Error::HypothesisViolation("(b) part below threshold".into()));
                }
            } else if part.len() != 1 {
                return Err(Error::HypothesisViolation("(c) part not a singleton".into()));
            }
        }
        // (d) selected mass
        let lhs = self.selected.len() as u128 * (1u128 << (self.d - self.m + 1));
        if lhs < original.len() as u128 {
            return Err(Error::HypothesisViolation("(d) selected union too small".into()));
        }
        // (e) no rich higher plane among the selected members
        for m_prime in (self.m + 1)..=self.d {
            let cap = capture_threshold(self.k, m_prime, q)?;
            let (max, _) = max_members_in_flat(self.selected.members(), m_prime)?;
            if max as u128 >= cap {
                return Err(Error::HypothesisViolation(format!(
                    "(e) an {m_prime}-plane holds {max} selected members (cap {cap})"
                )));
            }
        }
        Ok(())
    }
}

/// One extracted quasi-extremizer plane: a d-plane rich in family lines,
/// with the exact share of the family's union it covers.
#[derive(Debug, Clone)]
pub struct QuasiExtremizer {
    pub plane: AffineFlat,
    pub lines: FlatFamily,
    /// Points of the family union inside the plane.
    pub covered_points: u64,
    /// `q^d`, the plane's own point count.
    pub plane_points: u64,
}

impl QuasiExtremizer {
    pub fn density(&self) -> f64 {
        self.covered_points as f64 / self.plane_points as f64
    }
}

/// Greedily extract disjoint-by-membership d-planes holding at least
/// `q^{2d-3}` family lines each, and measure the density of the family's
/// union inside each plane. Possibly empty; never an error for d >= 2.
pub fn extract_quasi_extremizers(family: &FlatFamily, d: usize) -> Result<Vec<QuasiExtremizer>> {
    if family.flat_dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, got: family.flat_dim() });
    }
    if d < 2 {
        return Err(Error::InvalidDimension { what: "plane dimension", value: d, limit: 2 });
    }
    if d > family.ambient_dim() {
        return Err(Error::InvalidDimension {
            what: "plane dimension",
            value: d,
            limit: family.ambient_dim(),
        });
    }
    let q = family.field().modulus() as u64;
    let threshold = power(q, (2 * d - 3) as u32)?;
    let union_codes = family.union_point_codes()?;
    let mut active: Vec<AffineFlat> = family.members().to_vec();
    let mut out = Vec::new();
    loop {
        let (best, witness) = max_members_in_flat(&active, d)?;
        if (best as u128) < threshold {
            break;
        }
        let plane = witness.expect("a positive count comes with a witness");
        let mut captured = Vec::new();
        active.retain(|l| match plane.contains_flat(l) {
            Ok(true) => {
                captured.push(l.clone());
                false
            }
            _ => true,
        });
        let covered = plane
            .point_codes()?
            .iter()
            .filter(|c| union_codes.contains(c))
            .count() as u64;
        out.push(QuasiExtremizer {
            plane_points: power(q, d as u32)? as u64,
            covered_points: covered,
            lines: FlatFamily::new(family.field(), family.ambient_dim(), 1, captured)?,
            plane,
        });
    }
    Ok(out)
}
