//! Cospectrality through characteristic polynomials modulo random primes.
//!
//! `det(xI − A)` is computed over F_p by reducing `A` to upper Hessenberg form
//! with elimination similarities and then running the Hessenberg
//! characteristic-polynomial recurrence, both O(n³). Two graphs whose
//! polynomials differ modulo some prime are certainly not cospectral; equality
//! over several random 31-bit primes is reported together with a heuristic
//! error bound.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::graph::Graph;

pub const PRIME_LOW: u64 = 1 << 30;
pub const PRIME_HIGH: u64 = 1 << 31;
pub const DEFAULT_NUM_PRIMES: usize = 3;
pub const DEFAULT_SEED: u64 = 0x5eed;

/// Barrett reduction for a fixed odd modulus below 2^32.
#[derive(Debug, Clone, Copy)]
struct Modulus {
    p: u64,
    m: u64,
}

impl Modulus {
    fn new(p: u64) -> Self {
        debug_assert!(p > 2 && p < 1 << 32);
        Modulus { p, m: (u128::from(u64::MAX) + 1).div_euclid(u128::from(p)) as u64 }
    }

    #[inline(always)]
    fn reduce(self, x: u64) -> u64 {
        let q = ((u128::from(x) * u128::from(self.m)) >> 64) as u64;
        let r = x - q * self.p;
        if r >= self.p {
            r - self.p
        } else {
            r
        }
    }

    #[inline]
    fn mul(self, a: u64, b: u64) -> u64 {
        self.reduce(a * b)
    }

    fn pow(self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    fn inv(self, a: u64) -> u64 {
        self.pow(a, self.p - 2)
    }
}

fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    (u128::from(a) * u128::from(b) % u128::from(m)) as u64
}

fn pow_mod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_u64(acc, base, m);
        }
        base = mul_mod_u64(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin, exact for all `u64`.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &b in &BASES {
        if n % b == 0 {
            return n == b;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = pow_mod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// `count` distinct primes in `(2^30, 2^31)` drawn from a seeded ChaCha stream.
pub fn primes_from_seed(seed: u64, count: usize) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let candidate = rng.gen_range(PRIME_LOW + 1..PRIME_HIGH) | 1;
        if is_prime(candidate) && !out.contains(&candidate) {
            out.push(candidate);
        }
    }
    out
}

/// Coefficients of `det(xI − A)` over F_p, leading coefficient first:
/// `[1, c_{n−1}, …, c_0]`.
pub fn charpoly_mod_p(g: &Graph, p: u64) -> Result<Vec<u64>> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let n = g.n();
    if p == 2 {
        // Barrett path assumes an odd modulus; tiny case done directly.
        return Ok(charpoly_generic(adjacency_u64(g), n, 2));
    }
    if p >= 1 << 32 {
        return Err(Error::InvalidInput(format!("prime {p} exceeds 32 bits")));
    }
    let md = Modulus::new(p);
    let mut h = vec![0u32; n * n];
    for u in 0..n {
        for v in g.neighbors(u) {
            h[u * n + v] = 1;
        }
    }
    hessenberg(&mut h, n, md);
    let mut coeffs = hessenberg_charpoly(&h, n, md);
    coeffs.reverse();
    Ok(coeffs)
}

fn adjacency_u64(g: &Graph) -> Vec<u64> {
    let n = g.n();
    let mut a = vec![0u64; n * n];
    for u in 0..n {
        for v in g.neighbors(u) {
            a[u * n + v] = 1;
        }
    }
    a
}

/// Reduces `h` (row-major n×n, entries < p) to upper Hessenberg form in place.
fn hessenberg(h: &mut [u32], n: usize, md: Modulus) {
    let p = md.p;
    let mut src = vec![0u32; n];
    let mut factors = vec![0u64; n];
    for j in 0..n.saturating_sub(2) {
        let Some(r) = (j + 1..n).find(|&r| h[r * n + j] != 0) else {
            continue;
        };
        let piv = j + 1;
        if r != piv {
            for c in 0..n {
                h.swap(r * n + c, piv * n + c);
            }
            for row in h.chunks_mut(n) {
                row.swap(r, piv);
            }
        }
        let inv = md.inv(u64::from(h[piv * n + j]));
        src.copy_from_slice(&h[piv * n..(piv + 1) * n]);
        for i in piv + 1..n {
            factors[i] = md.mul(u64::from(h[i * n + j]), inv);
        }

        // rows: R_i -= u_i R_piv, only columns >= j are nonzero in R_piv
        let src_tail = &src[j..];
        let factors_ref = &factors;
        h[(piv + 1) * n..]
            .par_chunks_mut(n)
            .with_min_len(16)
            .enumerate()
            .for_each(|(off, row)| {
                let u = factors_ref[piv + 1 + off];
                if u == 0 {
                    return;
                }
                let neg = p - u;
                for (x, &s) in row[j..].iter_mut().zip(src_tail) {
                    *x = md.reduce(u64::from(*x) + neg * u64::from(s)) as u32;
                }
            });

        // columns: C_piv += Σ_i u_i C_i
        let f_tail = &factors[piv + 1..n];
        if f_tail.iter().all(|&u| u == 0) {
            continue;
        }
        h.par_chunks_mut(n).with_min_len(16).for_each(|row| {
            let acc: u128 = row[piv + 1..]
                .iter()
                .zip(f_tail)
                .map(|(&x, &u)| u128::from(u64::from(x) * u))
                .sum();
            let add = (acc % u128::from(p)) as u64;
            row[piv] = md.reduce(u64::from(row[piv]) + add) as u32;
        });
    }
}

/// Characteristic polynomial of an upper Hessenberg matrix, low degree first.
fn hessenberg_charpoly(h: &[u32], n: usize, md: Modulus) -> Vec<u64> {
    let p = md.p;
    let at = |r: usize, c: usize| u64::from(h[r * n + c]);
    let mut polys: Vec<Vec<u32>> = Vec::with_capacity(n + 1);
    polys.push(vec![1]);
    let mut acc: Vec<u128> = Vec::with_capacity(n + 1);
    for m in 1..=n {
        let prev = &polys[m - 1];
        acc.clear();
        acc.resize(m + 1, 0);
        let neg_diag = (p - at(m - 1, m - 1)) % p;
        for (c, &x) in prev.iter().enumerate() {
            acc[c + 1] += u128::from(x);
            acc[c] += u128::from(neg_diag * u64::from(x));
        }
        let mut t = 1u64;
        for i in (1..m).rev() {
            t = md.mul(t, at(i, i - 1));
            if t == 0 {
                break;
            }
            let coef = md.mul(at(i - 1, m - 1), t);
            if coef == 0 {
                continue;
            }
            let neg = p - coef;
            for (a, &x) in acc.iter_mut().zip(&polys[i - 1]) {
                *a += u128::from(neg * u64::from(x));
            }
        }
        polys.push(acc.iter().map(|&a| (a % u128::from(p)) as u32).collect());
    }
    polys[n].iter().map(|&x| u64::from(x)).collect()
}

/// Division-based elimination for any prime (used for p = 2).
fn charpoly_generic(mut a: Vec<u64>, n: usize, p: u64) -> Vec<u64> {
    let inv = |x: u64| pow_mod_u64(x, p - 2, p);
    for j in 0..n.saturating_sub(2) {
        let Some(r) = (j + 1..n).find(|&r| a[r * n + j] != 0) else { continue };
        let piv = j + 1;
        if r != piv {
            for c in 0..n {
                a.swap(r * n + c, piv * n + c);
            }
            for row in a.chunks_mut(n) {
                row.swap(r, piv);
            }
        }
        let iv = inv(a[piv * n + j]);
        for i in piv + 1..n {
            let u = a[i * n + j] * iv % p;
            if u == 0 {
                continue;
            }
            for c in 0..n {
                a[i * n + c] = (a[i * n + c] + (p - u) * a[piv * n + c]) % p;
            }
            for k in 0..n {
                a[k * n + piv] = (a[k * n + piv] + u * a[k * n + i]) % p;
            }
        }
    }
    let mut polys: Vec<Vec<u64>> = vec![vec![1]];
    for m in 1..=n {
        let mut next = vec![0u64; m + 1];
        for (c, &x) in polys[m - 1].iter().enumerate() {
            next[c + 1] = (next[c + 1] + x) % p;
            next[c] = (next[c] + (p - a[(m - 1) * n + m - 1]) % p * x) % p;
        }
        let mut t = 1;
        for i in (1..m).rev() {
            t = t * a[i * n + i - 1] % p;
            let coef = a[(i - 1) * n + m - 1] * t % p;
            for (c, &x) in polys[i - 1].iter().enumerate() {
                next[c] = (next[c] + (p - coef) % p * x) % p;
            }
        }
        polys.push(next);
    }
    let mut out = polys.pop().expect("n+1 polynomials");
    out.reverse();
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharPolySignature {
    pub primes: Vec<u64>,
    /// Per prime, leading coefficient first.
    pub coeffs: Vec<Vec<u64>>,
}

impl CharPolySignature {
    pub fn compute(g: &Graph, primes: &[u64]) -> Result<Self> {
        let coeffs = primes
            .par_iter()
            .map(|&p| charpoly_mod_p(g, p))
            .collect::<Result<Vec<_>>>()?;
        Ok(CharPolySignature { primes: primes.to_vec(), coeffs })
    }

    /// Hex SHA-256 of each prime's coefficient vector.
    pub fn hashes(&self) -> Vec<String> {
        self.coeffs.iter().map(|c| coefficient_hash(c)).collect()
    }
}

pub fn coefficient_hash(coeffs: &[u64]) -> String {
    let mut hasher = Sha256::new();
    for c in coeffs {
        hasher.update(c.to_le_bytes());
    }
    hasher.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrimeComparison {
    pub prime: u64,
    pub hash_first: String,
    pub hash_second: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CospectralVerdict {
    pub equal: bool,
    pub primes_used: usize,
    pub seed: u64,
    /// `(prime, power of x)` of the first coefficient that differs.
    pub first_disagreeing_coefficient: Option<(u64, usize)>,
    /// Heuristic probability that an `equal` verdict is wrong.
    pub error_bound: Option<f64>,
    pub comparisons: Vec<PrimeComparison>,
}

/// Upper bound on log2 of the largest |coefficient| of the characteristic
/// polynomial: at most 2^n principal minors, each bounded by Hadamard.
fn log2_coeff_bound(g: &Graph) -> f64 {
    let n = g.n() as f64;
    let max_deg = g.degree_sequence().into_iter().max().unwrap_or(0).max(1) as f64;
    (n + 0.5 * n * max_deg.log2()).max(1.0)
}

pub fn cospectral(g1: &Graph, g2: &Graph, num_primes: usize, seed: u64) -> Result<CospectralVerdict> {
    let mut verdict = CospectralVerdict {
        equal: false,
        primes_used: 0,
        seed,
        first_disagreeing_coefficient: None,
        error_bound: None,
        comparisons: Vec::new(),
    };
    if g1.n() != g2.n() {
        return Ok(verdict);
    }
    let n = g1.n();
    for p in primes_from_seed(seed, num_primes) {
        let (a, b) = rayon::join(|| charpoly_mod_p(g1, p), || charpoly_mod_p(g2, p));
        let (a, b) = (a?, b?);
        verdict.primes_used += 1;
        verdict.comparisons.push(PrimeComparison {
            prime: p,
            hash_first: coefficient_hash(&a),
            hash_second: coefficient_hash(&b),
        });
        if let Some(i) = a.iter().zip(&b).position(|(x, y)| x != y) {
            verdict.first_disagreeing_coefficient = Some((p, n - i));
            return Ok(verdict);
        }
    }
    verdict.equal = true;
    let l = log2_coeff_bound(g1).max(log2_coeff_bound(g2));
    let bound = (n as f64 * l / 30.0) * (-30.0 * num_primes as f64).exp2();
    verdict.error_bound = Some(bound.min(1.0));
    Ok(verdict)
}

pub const MAX_FLOAT_EIGEN_N: usize = 5000;

/// Eigenvalues in ascending order (report decoration only).
pub fn eigenvalues_float(g: &Graph) -> Result<Vec<f64>> {
    let n = g.n();
    if n > MAX_FLOAT_EIGEN_N {
        return Err(Error::InvalidInput(format!(
            "float eigenvalues limited to {MAX_FLOAT_EIGEN_N} vertices, got {n}"
        )));
    }
    let m = nalgebra::DMatrix::from_fn(n, n, |r, c| if g.has_edge(r, c) { 1.0 } else { 0.0 });
    let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u64 = 1_000_000_007;

    /// Faddeev–LeVerrier over exact integers; leading coefficient first.
    fn leverrier(g: &Graph) -> Vec<i128> {
        let n = g.n();
        let a: Vec<i128> = (0..n * n).map(|i| g.has_edge(i / n, i % n) as i128).collect();
        let matmul = |x: &[i128], y: &[i128]| {
            let mut out = vec![0i128; n * n];
            for r in 0..n {
                for k in 0..n {
                    let xv = x[r * n + k];
                    if xv != 0 {
                        for c in 0..n {
                            out[r * n + c] += xv * y[k * n + c];
                        }
                    }
                }
            }
            out
        };
        let mut coeffs = vec![1i128];
        let mut m = vec![0i128; n * n];
        for k in 1..=n {
            let last = *coeffs.last().unwrap();
            // M_k = A M_{k-1} + c_{n-k+1} I
            let mut mk = matmul(&a, &m);
            for i in 0..n {
                mk[i * n + i] += last;
            }
            let amk = matmul(&a, &mk);
            let tr: i128 = (0..n).map(|i| amk[i * n + i]).sum();
            assert_eq!(tr % k as i128, 0);
            coeffs.push(-tr / k as i128);
            m = mk;
        }
        coeffs
    }

    fn reduce(c: &[i128], p: u64) -> Vec<u64> {
        c.iter().map(|&x| x.rem_euclid(p as i128) as u64).collect()
    }

    #[test]
    fn small_known_polynomials() {
        assert_eq!(charpoly_mod_p(&Graph::empty(4), P).unwrap(), vec![1, 0, 0, 0, 0]);
        let k2 = Graph::complete(2);
        assert_eq!(charpoly_mod_p(&k2, P).unwrap(), vec![1, 0, P - 1]);
        let k3 = Graph::complete(3);
        // x^3 - 3x - 2
        assert_eq!(charpoly_mod_p(&k3, P).unwrap(), vec![1, 0, P - 3, P - 2]);
        assert_eq!(reduce(&leverrier(&k3), P), vec![1, 0, P - 3, P - 2]);
    }

    #[test]
    fn composite_modulus_rejected() {
        assert_eq!(charpoly_mod_p(&Graph::complete(3), 15).unwrap_err(), Error::NotPrime(15));
    }

    #[test]
    fn matches_exact_leverrier_on_small_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for p in [P, 2, 3, 13, (1 << 31) - 1] {
            for _ in 0..40 {
                let n = rng.gen_range(0..=12);
                let mut edges = Vec::new();
                for u in 0..n {
                    for v in u + 1..n {
                        if rng.gen_bool(0.4) {
                            edges.push((u, v));
                        }
                    }
                }
                let g = Graph::from_edges(n, &edges).unwrap();
                assert_eq!(charpoly_mod_p(&g, p).unwrap(), reduce(&leverrier(&g), p), "p={p} g={edges:?}");
            }
        }
    }

    #[test]
    fn miller_rabin() {
        let small: Vec<u64> = (0..60).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]);
        assert!(is_prime((1 << 31) - 1));
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to bases 2,3,5,7
        assert!(is_prime(18_446_744_073_709_551_557));
    }

    #[test]
    fn seeded_primes_are_distinct_and_in_range() {
        let ps = primes_from_seed(42, 5);
        assert_eq!(ps, primes_from_seed(42, 5));
        assert_ne!(ps, primes_from_seed(43, 5));
        for (i, &p) in ps.iter().enumerate() {
            assert!(p > PRIME_LOW && p < PRIME_HIGH && is_prime(p));
            assert!(!ps[..i].contains(&p));
        }
    }

    #[test]
    fn saltire_pair_is_cospectral() {
        let c4_k1 = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let star = Graph::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        let v = cospectral(&c4_k1, &star, 3, 1).unwrap();
        assert!(v.equal);
        assert_eq!(v.primes_used, 3);
        assert!(v.error_bound.unwrap() < 1e-20);
        // x^5 - 4x^3
        assert_eq!(reduce(&leverrier(&star), P), vec![1, 0, P - 4, 0, 0, 0]);
    }

    #[test]
    fn different_graphs_are_told_apart() {
        let p4 = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let star = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let v = cospectral(&p4, &star, 3, 9).unwrap();
        assert!(!v.equal);
        assert_eq!(v.primes_used, 1);
        assert!(v.first_disagreeing_coefficient.is_some());
        let v = cospectral(&p4, &Graph::empty(5), 3, 9).unwrap();
        assert!(!v.equal && v.primes_used == 0);
    }

    #[test]
    fn float_eigenvalues() {
        let ev = eigenvalues_float(&Graph::complete(2)).unwrap();
        assert!((ev[0] + 1.0).abs() < 1e-12 && (ev[1] - 1.0).abs() < 1e-12);
        assert!(eigenvalues_float(&Graph::empty(6)).unwrap().iter().all(|x| x.abs() < 1e-12));
    }
}
