//! Catalan numbers in exact arithmetic.

use num_bigint::BigUint;
use num_traits::One;

/// C_n = binom(2n, n)/(n + 1).
pub fn catalan(n: u64) -> BigUint {
    // C_{j+1} = C_j · 2(2j+1)/(j+2), exact at every step
    let mut c = BigUint::one();
    for j in 0..n {
        c = c * BigUint::from(2 * (2 * j + 1)) / BigUint::from(j + 2);
    }
    c
}

/// C_0, …, C_n.
pub fn catalan_table(n: u64) -> Vec<BigUint> {
    let mut out = Vec::with_capacity(n as usize + 1);
    let mut c = BigUint::one();
    for j in 0..=n {
        out.push(c.clone());
        c = c * BigUint::from(2 * (2 * j + 1)) / BigUint::from(j + 2);
    }
    out
}

/// binom(2n, n)/(n + 1) computed directly from the binomial coefficient.
pub fn catalan_closed_form(n: u64) -> BigUint {
    let mut binom = BigUint::one();
    for j in 0..n {
        binom = binom * BigUint::from(2 * n - j) / BigUint::from(j + 1);
    }
    binom / BigUint::from(n + 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        let t: Vec<u64> = catalan_table(6).iter().map(|c| c.try_into().unwrap()).collect();
        assert_eq!(t, vec![1, 1, 2, 5, 14, 42, 132]);
        assert_eq!(catalan(30), catalan_closed_form(30));
    }
}
