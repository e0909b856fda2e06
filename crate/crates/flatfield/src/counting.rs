//! Exact Grassmannian counts: the closed forms whose values the enumeration
//! routines must reproduce.

use crate::error::{Error, Result};

/// `q^e` as an exact u128, erroring on overflow.
pub fn power(q: u64, e: u32) -> Result<u128> {
    (q as u128).checked_pow(e).ok_or(Error::CountOverflow)
}

/// Gaussian binomial `[d choose k]_q`: the number of k-dimensional linear
/// subspaces of F_q^d. Computed by the stepwise product
/// `prod_{i=1..k} (q^{d-k+i} - 1)/(q^i - 1)`; every partial product is itself
/// a Gaussian binomial, so each division is exact.
pub fn gaussian_binomial(d: usize, k: usize, q: u64) -> Result<u128> {
    if k > d {
        return Err(Error::InvalidDimension { what: "subspace dimension", value: k, limit: d });
    }
    if q < 2 {
        return Err(Error::NotPrime(q as u32));
    }
    let mut acc: u128 = 1;
    for i in 1..=k {
        let num = power(q, (d - k + i) as u32)? - 1;
        let den = power(q, i as u32)? - 1;
        acc = acc.checked_mul(num).ok_or(Error::CountOverflow)?;
        debug_assert_eq!(acc % den, 0);
        acc /= den;
    }
    Ok(acc)
}

/// Number of affine k-flats in F_q^d: one direction space per subspace and
/// `q^{d-k}` distinct translates of each.
pub fn count_flats(d: usize, k: usize, q: u64) -> Result<u128> {
    let translates = power(q, (d - k) as u32)?;
    gaussian_binomial(d, k, q)?
        .checked_mul(translates)
        .ok_or(Error::CountOverflow)
}

/// Number of l'-flats of F_q^m containing a fixed l-flat. Containing flats
/// correspond one-to-one with (l'-l)-dimensional subspaces of an (m-l)-dim
/// complement.
pub fn count_containing(l: usize, l_prime: usize, m: usize, q: u64) -> Result<u128> {
    if l >= l_prime {
        return Err(Error::InvalidDimension { what: "containing dimension", value: l_prime, limit: l });
    }
    if l_prime > m {
        return Err(Error::InvalidDimension { what: "containing dimension", value: l_prime, limit: m });
    }
    gaussian_binomial(m - l, l_prime - l, q)
}

/// Number of hyperplanes ((k-1)-flats) of F_q^k disjoint from a fixed
/// l-flat: `q^{k-l} - 1`. A disjoint hyperplane must be a translate of a
/// hyperplane containing the l-flat's direction space, and one translate per
/// direction hits the flat.
pub fn count_disjoint_hyperplanes(l: usize, k: usize, q: u64) -> Result<u128> {
    if k == 0 || l > k - 1 {
        return Err(Error::InvalidDimension { what: "fixed flat dimension", value: l, limit: k.saturating_sub(1) });
    }
    Ok(power(q, (k - l) as u32)? - 1)
}

/// `q^x` for real exponents. Integral exponents stay exact.
pub fn real_power(q: u64, x: f64) -> f64 {
    if x.fract() == 0.0 && x.abs() < 1_000.0 {
        (q as f64).powi(x as i32)
    } else {
        (q as f64).powf(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_binomial_examples() {
        assert_eq!(gaussian_binomial(4, 0, 2).unwrap(), 1);
        assert_eq!(gaussian_binomial(6, 0, 3).unwrap(), 1);
        assert_eq!(gaussian_binomial(3, 1, 2).unwrap(), 7);
        assert_eq!(gaussian_binomial(4, 2, 2).unwrap(), 35);
        assert!(gaussian_binomial(2, 3, 2).is_err());
    }

    #[test]
    fn count_flats_examples() {
        assert_eq!(count_flats(2, 1, 3).unwrap(), 12);
        assert_eq!(count_flats(3, 1, 2).unwrap(), 28);
        assert_eq!(count_flats(3, 1, 3).unwrap(), 117);
        assert_eq!(count_flats(3, 2, 2).unwrap(), 14);
        for (d, q) in [(1, 2u64), (3, 3), (5, 5)] {
            assert_eq!(count_flats(d, d, q).unwrap(), 1);
        }
    }

    #[test]
    fn count_containing_examples() {
        assert_eq!(count_containing(1, 2, 3, 2).unwrap(), 3);
        assert_eq!(count_containing(0, 1, 2, 3).unwrap(), 4);
        assert_eq!(count_containing(1, 3, 3, 2).unwrap(), 1);
        assert!(count_containing(2, 2, 3, 2).is_err());
        assert!(count_containing(1, 4, 3, 2).is_err());
    }

    #[test]
    fn count_disjoint_hyperplanes_examples() {
        assert_eq!(count_disjoint_hyperplanes(1, 2, 3).unwrap(), 2);
        assert_eq!(count_disjoint_hyperplanes(0, 2, 2).unwrap(), 3);
        for q in [2u64, 3, 5, 7] {
            assert_eq!(count_disjoint_hyperplanes(0, 1, q).unwrap(), (q - 1) as u128);
        }
        assert!(count_disjoint_hyperplanes(2, 2, 3).is_err());
    }

    #[test]
    fn brackets_for_subspace_counts() {
        // q^{k(d-k)} <= [d choose k]_q <= 4^k q^{k(d-k)}, and the affine
        // analogue with one extra factor of q^{d-k}.
        for q in [2u64, 3, 5, 7] {
            for d in 0..=6usize {
                for k in 0..=d {
                    let g = gaussian_binomial(d, k, q).unwrap();
                    let base = power(q, (k * (d - k)) as u32).unwrap();
                    assert!(g >= base, "lower bracket failed at d={d} k={k} q={q}");
                    assert!(
                        g <= 4u128.pow(k as u32) * base,
                        "upper bracket failed at d={d} k={k} q={q}"
                    );
                    let g2 = count_flats(d, k, q).unwrap();
                    let base2 = power(q, ((k + 1) * (d - k)) as u32).unwrap();
                    assert!(g2 >= base2);
                    assert!(g2 <= 4u128.pow((k + 1) as u32) * base2);
                }
            }
        }
    }

    #[test]
    fn real_power_integral_is_exact() {
        assert_eq!(real_power(3, 2.0), 9.0);
        assert_eq!(real_power(2, 0.0), 1.0);
        assert!((real_power(3, 0.5) - 3f64.sqrt()).abs() < 1e-12);
    }
}
