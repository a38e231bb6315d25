use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

/// Exact binomial coefficient; zero when `k > n`.
pub fn binom(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    // acc * (n - i) / (i + 1) stays integral at every step
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Binomial coefficient narrowed to `u64`; panics on overflow.
pub fn binom_u64(n: u64, k: u64) -> u64 {
    binom(n, k).to_u64().expect("binomial coefficient fits in u64")
}

/// Number of `k`-dimensional subspaces of F_q^n.
pub fn gauss_binom(n: u64, k: u64, q: u64) -> BigUint {
    assert!(q >= 2, "gauss_binom needs q >= 2");
    if k > n {
        return BigUint::zero();
    }
    let qb = BigUint::from(q);
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..k {
        num *= qb.pow((n - i) as u32) - 1u32;
        den *= qb.pow((k - i) as u32) - 1u32;
    }
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;

    fn product_oracle(n: u64, k: u64) -> u128 {
        if k > n {
            return 0;
        }
        let num: u128 = ((n - k + 1)..=n).map(u128::from).product();
        let den: u128 = (1..=k).map(u128::from).product();
        num / den
    }

    #[test]
    fn small_values() {
        assert_eq!(binom(7, 2), BigUint::from(product_oracle(7, 2)));
        assert_eq!(binom(7, 2), BigUint::from(21u32));
        assert_eq!(binom(5, 7), BigUint::zero());
        for n in 0..30 {
            assert_eq!(binom(n, 0), BigUint::one());
        }
    }

    #[test]
    fn pascal_identity() {
        for n in 1..=40u64 {
            for k in 1..=n {
                assert_eq!(binom(n, k), binom(n - 1, k - 1) + binom(n - 1, k), "({n},{k})");
            }
        }
    }

    #[test]
    fn matches_product_oracle() {
        for n in 0..=30u64 {
            for k in 0..=n + 2 {
                assert_eq!(binom(n, k), BigUint::from(product_oracle(n, k)));
            }
        }
    }

    #[test]
    fn gaussian_values() {
        assert_eq!(gauss_binom(4, 2, 2), BigUint::from(35u32));
        assert_eq!(gauss_binom(6, 3, 2), BigUint::from(1395u32));
        for n in 0..8 {
            assert_eq!(gauss_binom(n, 0, 3), BigUint::one());
        }
        assert_eq!(gauss_binom(3, 5, 2), BigUint::zero());
    }

    #[test]
    fn q_pascal_identity() {
        for q in [2u64, 3, 4] {
            for n in 1..=12u64 {
                for k in 1..=n {
                    let lhs = gauss_binom(n, k, q);
                    let rhs = BigUint::from(q).pow(k as u32) * gauss_binom(n - 1, k, q)
                        + gauss_binom(n - 1, k - 1, q);
                    assert_eq!(lhs, rhs, "q={q} n={n} k={k}");
                }
            }
        }
    }

    #[test]
    fn exact_beyond_u64_and_symmetric() {
        let v = gauss_binom(20, 10, 4);
        assert!(v.bits() > 64);
        for n in 0..=16u64 {
            for k in 0..=n {
                assert_eq!(gauss_binom(n, k, 4), gauss_binom(n, n - k, 4));
            }
        }
    }
}
