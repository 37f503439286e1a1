//! Exact autocorrelation coefficients η(m) of the gTM sequence, the
//! brute-force averaging oracle, Wiener sums Σ(N) with the growth bound,
//! the Ψ sequence iteration, and general-weight autocorrelations.
//!
//! The coefficients obey the linear recursion
//! `η(Lm + r) = (α_r η(m) + α_{L−r} η(m+1)) / L` with `L = k + ℓ` and
//! `α_r = L − r − 2·min(k, ℓ, r, L−r)`, together with `η(0) = 1`,
//! `η(−m) = η(m)` and `η(Lm) = η(m)`. All values are exact rationals
//! whose denominators divide a power of `L` times `L + 1`.

use std::collections::HashMap;
use std::sync::RwLock;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};

use crate::substitution::gtm_signs;
use crate::{Error, Params, Result};

fn big(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// The recursion coefficient `α_{k,ℓ,r} = k + ℓ − r − 2·min(k, ℓ, r, k+ℓ−r)`
/// for `0 ≤ r < L`; `α_0 = L`.
pub fn alpha(p: Params, r: u32) -> Result<i64> {
    let l_total = i64::from(p.length());
    let r = i64::from(r);
    if r >= l_total {
        return Err(Error::Domain(format!(
            "alpha index r={r} out of range [0, {l_total})"
        )));
    }
    let min = [i64::from(p.k()), i64::from(p.l()), r, l_total - r]
        .into_iter()
        .min()
        .expect("non-empty");
    Ok(l_total - r - 2 * min)
}

/// All coefficients `α_1 … α_{L−1}` in index order.
pub fn alpha_row(p: Params) -> Vec<i64> {
    (1..p.length())
        .map(|r| alpha(p, r).expect("r < L by construction"))
        .collect()
}

/// Memoized table of exact autocorrelation coefficients.
///
/// Queries are safe under concurrent use: the cache sits behind a
/// read-write lock and rationals are inserted fully formed, so readers
/// never observe a partially written value.
pub struct AutocorrTable {
    params: Params,
    alphas: Vec<i64>,
    cache: RwLock<HashMap<u64, BigRational>>,
}

impl AutocorrTable {
    pub fn new(params: Params) -> Self {
        let l_total = i64::from(params.length());
        let mut seed = HashMap::new();
        seed.insert(0, BigRational::one());
        // The recursion at m = 0, r = 1 is self-referential:
        // η(1) = (α_1 + α_{L−1} η(1)) / L with α_1 = L − 3 and
        // α_{L−1} = 1 − L + ... reduces to the unique solution
        // η(1) = (L − 3)/(L + 1).
        seed.insert(1, ratio(l_total - 3, l_total + 1));
        AutocorrTable {
            params,
            alphas: alpha_row(params),
            cache: RwLock::new(seed),
        }
    }

    pub fn params(&self) -> Params {
        self.params
    }

    /// The exact coefficient η(m); negative arguments use η(−m) = η(m).
    pub fn eta(&self, m: i64) -> BigRational {
        self.eta_u(m.unsigned_abs())
    }

    /// η(m) rounded to `f64`.
    pub fn eta_f64(&self, m: i64) -> f64 {
        self.eta(m).to_f64().expect("η(m) is finite")
    }

    fn eta_u(&self, mut m: u64) -> BigRational {
        let l_total = u64::from(self.params.length());
        // η(L·m) = η(m): strip trailing zero digits first so the cache
        // only ever stores reduced indices.
        while m >= l_total && m.is_multiple_of(l_total) {
            m /= l_total;
        }
        if let Some(hit) = self.cache.read().expect("lock poisoned").get(&m) {
            return hit.clone();
        }
        let r = (m % l_total) as usize; // 1 ≤ r < L here
        let q = m / l_total;
        let a_r = big(self.alphas[r - 1]);
        let a_lr = big(self.alphas[l_total as usize - r - 1]);
        let value = (a_r * self.eta_u(q) + a_lr * self.eta_u(q + 1)) / big(l_total as i64);
        self.cache
            .write()
            .expect("lock poisoned")
            .insert(m, value.clone());
        value
    }

    /// The exact Wiener sum `Σ(N) = η(0)² + 2·Σ_{n=1}^{N} η(n)²`.
    pub fn wiener_sum(&self, n: u64) -> BigRational {
        self.wiener_sums(n).pop().expect("non-empty")
    }

    /// All partial Wiener sums `Σ(0), Σ(1), …, Σ(n_max)`.
    pub fn wiener_sums(&self, n_max: u64) -> Vec<BigRational> {
        let mut out = Vec::with_capacity(n_max as usize + 1);
        let mut acc = BigRational::one();
        out.push(acc.clone());
        for n in 1..=n_max {
            let e = self.eta_u(n);
            acc += big(2) * (&e * &e);
            out.push(acc.clone());
        }
        out
    }
}

/// One-off exact coefficient; builds a throwaway table. Prefer
/// [`AutocorrTable`] for repeated queries.
pub fn eta(p: Params, m: i64) -> BigRational {
    AutocorrTable::new(p).eta(m)
}

/// The averaging oracle `(1/N) Σ_{n<N} v_n v_{n+m}` over the fixed-point
/// prefix; an estimate of η(m) independent of the recursion.
pub fn eta_bruteforce(p: Params, m: u64, n: u64) -> f64 {
    let signs = gtm_signs(p, (n + m) as usize);
    bruteforce_from_signs(&signs, m, n)
}

/// The same average computed from a precomputed sign prefix of length at
/// least `n + m`.
pub fn bruteforce_from_signs(signs: &[i8], m: u64, n: u64) -> f64 {
    let (m, n) = (m as usize, n as usize);
    assert!(
        signs.len() >= n + m,
        "sign prefix too short: {} < {}",
        signs.len(),
        n + m
    );
    let sum: i64 = (0..n)
        .map(|i| i64::from(signs[i]) * i64::from(signs[i + m]))
        .sum();
    sum as f64 / n as f64
}

/// The Wiener growth constant.
#[derive(Clone, Debug, PartialEq)]
pub struct GrowthBound {
    /// The constant q with `Σ(L·N) ≤ q·Σ(N)`.
    pub q: BigRational,
    /// True for the classical case `k = ℓ = 1`, where the sharper
    /// two-step bound `Σ(4N) ≤ (3/2)·Σ(2N)` with q = 3/2 applies.
    pub classical: bool,
}

/// The explicit growth constant from the Wiener-sum estimate:
/// `q = (L² + Σ_{r=1}^{L−1} (|α_r| + |α_{L−r}|)²) / L²` for `L > 2`,
/// and `q = 3/2` (flagged) in the classical case. Always `q < L`.
pub fn growth_bound_q(p: Params) -> GrowthBound {
    if p.is_classical() {
        return GrowthBound {
            q: ratio(3, 2),
            classical: true,
        };
    }
    let l_total = i64::from(p.length());
    let alphas = alpha_row(p);
    let sum: i64 = (1..l_total)
        .map(|r| {
            let pair = alphas[r as usize - 1].abs() + alphas[(l_total - r) as usize - 1].abs();
            pair * pair
        })
        .sum();
    GrowthBound {
        q: ratio(l_total * l_total + sum, l_total * l_total),
        classical: false,
    }
}

/// Applies the sequence map Ψ `steps` times to `(β_1, …, β_{T−1})`,
/// where `T = truncation` must be a power of `L` so the index block is
/// closed under the iteration. `β_0 ≡ 1` is implicit (it encodes
/// η(0) = 1). Entries stay within `[−1, 1]` and converge pointwise to
/// `(η(n))`.
pub fn psi_iterate(
    p: Params,
    beta: &[BigRational],
    steps: u32,
    truncation: u64,
) -> Result<Vec<BigRational>> {
    let l_total = u64::from(p.length());
    let mut power = l_total;
    while power < truncation {
        power = power.saturating_mul(l_total);
    }
    if power != truncation {
        return Err(Error::Domain(format!(
            "truncation {truncation} is not a positive power of L = {l_total}"
        )));
    }
    if beta.len() as u64 != truncation - 1 {
        return Err(Error::Domain(format!(
            "expected {} entries (β_1 … β_{}), got {}",
            truncation - 1,
            truncation - 1,
            beta.len()
        )));
    }
    let one = BigRational::one();
    if beta.iter().any(|b| b.abs() > one) {
        return Err(Error::Domain(
            "all Ψ inputs must satisfy |β_n| ≤ 1".to_string(),
        ));
    }

    let alphas = alpha_row(p);
    let l_big = big(l_total as i64);
    let mut current = beta.to_vec();
    let at = |v: &[BigRational], n: u64| -> BigRational {
        if n == 0 {
            BigRational::one()
        } else {
            v[n as usize - 1].clone()
        }
    };
    for _ in 0..steps {
        let mut next = Vec::with_capacity(current.len());
        for n in 1..truncation {
            let (q, r) = (n / l_total, n % l_total);
            let value = if r == 0 {
                at(&current, q)
            } else {
                let a_r = big(alphas[r as usize - 1]);
                let a_lr = big(alphas[(l_total - r) as usize - 1]);
                (a_r * at(&current, q) + a_lr * at(&current, q + 1)) / l_big.clone()
            };
            next.push(value);
        }
        current = next;
    }
    Ok(current)
}

/// A pair of complex scattering weights `h(1) = h₊`, `h(1̄) = h₋`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightPair {
    pub h_plus: Complex64,
    pub h_minus: Complex64,
}

/// The autocorrelation coefficient of the weighted comb:
/// `|h₊+h₋|²/4 + |h₊−h₋|²/4 · η(m)` (the coefficient of δ_m in γ_h).
/// The value is real; it is returned as a complex number with zero
/// imaginary part to match the general weighted-comb setting.
pub fn weighted_eta(table: &AutocorrTable, h: WeightPair, m: i64) -> Complex64 {
    let plus = (h.h_plus + h.h_minus).norm_sqr() / 4.0;
    let minus = (h.h_plus - h.h_minus).norm_sqr() / 4.0;
    Complex64::new(plus + minus * table.eta_f64(m), 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    fn params(k: u32, l: u32) -> Params {
        Params::new(k, l).unwrap()
    }

    #[test]
    fn alpha_examples() {
        assert_eq!(alpha(params(1, 1), 1).unwrap(), -1);
        assert_eq!(alpha(params(2, 1), 1).unwrap(), 0);
        assert_eq!(alpha(params(2, 1), 2).unwrap(), -1);
        for (k, l) in [(1, 1), (2, 1), (4, 7)] {
            let p = params(k, l);
            assert_eq!(alpha(p, 0).unwrap(), i64::from(p.length()));
            assert!(alpha(p, p.length()).is_err());
        }
    }

    #[test]
    fn alpha_sum_bound() {
        // |α_r| + |α_{L−r}| ≤ L, with the sharper bound L−2 at r = 1
        // when L > 2.
        for k in 1..=8u32 {
            for l in 1..=8u32 {
                let p = params(k, l);
                let l_total = i64::from(p.length());
                let a = alpha_row(p);
                for r in 1..p.length() as usize {
                    let pair = a[r - 1].abs() + a[p.length() as usize - r - 1].abs();
                    assert!(pair <= l_total);
                    if r == 1 && l_total > 2 {
                        assert!(pair <= l_total - 2);
                    }
                }
            }
        }
    }

    #[test]
    fn eta_examples() {
        assert_eq!(eta(params(1, 1), 1), ratio(-1, 3));
        for (k, l) in [(1, 1), (2, 1), (3, 5), (6, 6)] {
            let p = params(k, l);
            let l_total = i64::from(p.length());
            assert_eq!(eta(p, 1), ratio(l_total - 3, l_total + 1));
        }
        assert_eq!(eta(params(2, 1), 1), BigRational::zero());
        assert_eq!(eta(params(2, 1), 2), ratio(-1, 3));
        assert_eq!(eta(params(1, 1), 3), ratio(1, 3));
    }

    #[test]
    fn eta_symmetries() {
        for (k, l) in [(1, 1), (2, 1), (3, 2)] {
            let table = AutocorrTable::new(params(k, l));
            let l_total = i64::from(table.params().length());
            for m in 0..200i64 {
                assert_eq!(table.eta(-m), table.eta(m));
                assert_eq!(table.eta(l_total * m), table.eta(m));
                assert!(table.eta(m).abs() <= BigRational::one());
            }
        }
    }

    #[test]
    fn classic_recursion() {
        // For (1,1): η(2m) = η(m) and η(2m+1) = −(η(m) + η(m+1))/2.
        let table = AutocorrTable::new(params(1, 1));
        for m in 0..500i64 {
            assert_eq!(table.eta(2 * m), table.eta(m));
            assert_eq!(
                table.eta(2 * m + 1),
                -(table.eta(m) + table.eta(m + 1)) / big(2)
            );
        }
    }

    #[test]
    fn bruteforce_oracle_examples() {
        assert_eq!(eta_bruteforce(params(1, 1), 0, 4096), 1.0);
        let err = (eta_bruteforce(params(1, 1), 1, 1 << 16) + 1.0 / 3.0).abs();
        assert!(err <= 5e-3, "err = {err}");
        let err = eta_bruteforce(params(2, 1), 1, 3u64.pow(10)).abs();
        assert!(err <= 5e-3, "err = {err}");
    }

    #[test]
    fn wiener_sum_examples() {
        for (k, l) in [(1, 1), (2, 1), (4, 4)] {
            assert_eq!(AutocorrTable::new(params(k, l)).wiener_sum(0), big(1));
        }
        assert_eq!(AutocorrTable::new(params(1, 1)).wiener_sum(1), ratio(11, 9));
        assert_eq!(AutocorrTable::new(params(2, 1)).wiener_sum(2), ratio(11, 9));
    }

    #[test]
    fn growth_bound_examples() {
        let b = growth_bound_q(params(2, 1));
        assert_eq!(b.q, ratio(11, 9));
        assert!(!b.classical);
        let b = growth_bound_q(params(1, 1));
        assert_eq!(b.q, ratio(3, 2));
        assert!(b.classical);
        for (k, l) in [(2, 2), (3, 1), (5, 4)] {
            let p = params(k, l);
            let b = growth_bound_q(p);
            assert!(b.q < big(i64::from(p.length())), "q < L for ({k}, {l})");
        }
    }

    #[test]
    fn psi_eta_is_fixed_point() {
        for (k, l) in [(1, 1), (2, 1), (2, 2)] {
            let p = params(k, l);
            let table = AutocorrTable::new(p);
            let t = u64::from(p.length()).pow(3);
            let beta: Vec<_> = (1..t).map(|n| table.eta(n as i64)).collect();
            let out = psi_iterate(p, &beta, 3, t).unwrap();
            assert_eq!(out, beta, "({k}, {l})");
        }
    }

    #[test]
    fn psi_converges_at_index_one() {
        // β ≡ 0 for (2,1): index 1 converges to η(1) = 0.
        let p = params(2, 1);
        let t = 27u64;
        let beta = vec![BigRational::zero(); t as usize - 1];
        let out = psi_iterate(p, &beta, 30, t).unwrap();
        assert_eq!(out[0], BigRational::zero());

        // β ≡ 1 for (1,1): index 1 contracts to η(1) = −1/3 within 1e−6.
        let p = params(1, 1);
        let t = 16u64;
        let beta = vec![BigRational::one(); t as usize - 1];
        let out = psi_iterate(p, &beta, 40, t).unwrap();
        let err = (out[0].to_f64().unwrap() + 1.0 / 3.0).abs();
        assert!(err <= 1e-6, "err = {err}");
    }

    #[test]
    fn psi_norm_bound_and_validation() {
        let p = params(2, 1);
        assert!(psi_iterate(p, &[], 1, 10).is_err(), "10 is not a power of 3");
        let t = 9u64;
        let beta = vec![ratio(-1, 1); t as usize - 1];
        let out = psi_iterate(p, &beta, 5, t).unwrap();
        assert!(out.iter().all(|b| b.abs() <= BigRational::one()));
        let too_big = vec![ratio(3, 2); t as usize - 1];
        assert!(psi_iterate(p, &too_big, 1, t).is_err());
    }

    #[test]
    fn weighted_eta_examples() {
        let table = AutocorrTable::new(params(1, 1));
        let signed = WeightPair {
            h_plus: Complex64::new(1.0, 0.0),
            h_minus: Complex64::new(-1.0, 0.0),
        };
        for m in [0i64, 1, 5] {
            let w = weighted_eta(&table, signed, m);
            assert!((w.re - table.eta_f64(m)).abs() < 1e-15 && w.im == 0.0);
        }
        let constant = WeightPair {
            h_plus: Complex64::new(1.0, 0.0),
            h_minus: Complex64::new(1.0, 0.0),
        };
        assert_eq!(weighted_eta(&table, constant, 0).re, 1.0);
        let lopsided = WeightPair {
            h_plus: Complex64::new(1.0, 0.0),
            h_minus: Complex64::new(0.0, 0.0),
        };
        let w = weighted_eta(&table, lopsided, 1);
        assert!((w.re - 1.0 / 6.0).abs() < 1e-15);
    }
}
