//! Rabin-Karp polynomial fingerprints over a prime field.
//!
//! A window `s` of `w` bytes hashes to `s[0]·b + s[1]·b² + … + s[w-1]·b^w mod p`.
//! Sliding the window by one byte costs a constant number of field operations:
//! subtract the outgoing term, multiply by `b⁻¹`, add the incoming byte times
//! `b^w`.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// 2^61 - 1.
pub const MERSENNE_61: u64 = (1 << 61) - 1;

/// A fingerprint value, always reduced below the modulus it was computed with.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fp(u64);

impl Fp {
    #[inline]
    pub fn value(self) -> u64 {
        self.0
    }
}

impl std::fmt::LowerHex for Fp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        std::fmt::LowerHex::fmt(&self.0, f)
    }
}

/// Field parameters for fingerprinting windows of `q - 1` bytes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FingerprintParams {
    p: u64,
    b: u64,
    window: usize,
    b_pow_window: u64,
    b_inv: u64,
    seed: u64,
}

#[inline]
fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

fn is_small_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl FingerprintParams {
    /// Parameters for q-grams: windows of `q - 1` bytes, modulus 2^61 - 1 and a
    /// base drawn from `seed`.
    pub fn new(q: usize, seed: u64) -> Result<Self> {
        Self::build(q, seed, MERSENNE_61)
    }

    /// Same as [`FingerprintParams::new`] but over a caller-chosen small prime.
    /// Only useful to provoke collisions in tests.
    #[doc(hidden)]
    pub fn with_modulus(q: usize, seed: u64, p: u64) -> Result<Self> {
        if !(5..1 << 32).contains(&p) || !is_small_prime(p) {
            return Err(Error::invalid(format!(
                "test modulus {p} must be a prime in [5, 2^32)"
            )));
        }
        Self::build(q, seed, p)
    }

    fn build(q: usize, seed: u64, p: u64) -> Result<Self> {
        if q < 2 {
            return Err(Error::invalid(format!("q must be at least 2, got {q}")));
        }
        let window = q - 1;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = rng.random_range(2..=p - 2);
        // p is prime, so b^(p-2) is the inverse of b.
        let b_inv = pow_mod(b, p - 2, p);
        let b_pow_window = pow_mod(b, window as u64, p);
        Ok(FingerprintParams {
            p,
            b,
            window,
            b_pow_window,
            b_inv,
            seed,
        })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn base(&self) -> u64 {
        self.b
    }

    pub fn base_inverse(&self) -> u64 {
        self.b_inv
    }

    pub fn base_pow_window(&self) -> u64 {
        self.b_pow_window
    }

    /// Window length in bytes (`q - 1`).
    pub fn window(&self) -> usize {
        self.window
    }

    pub fn q(&self) -> usize {
        self.window + 1
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Fingerprint of a window of exactly `window()` bytes.
    pub fn hash(&self, s: &[u8]) -> Result<Fp> {
        if s.len() != self.window {
            return Err(Error::invalid(format!(
                "window has {} bytes, expected {}",
                s.len(),
                self.window
            )));
        }
        Ok(self.hash_unchecked(s))
    }

    pub(crate) fn hash_unchecked(&self, s: &[u8]) -> Fp {
        let mut acc = 0u64;
        let mut pow = self.b;
        for &c in s {
            acc = (acc + mul_mod(c as u64, pow, self.p)) % self.p;
            pow = mul_mod(pow, self.b, self.p);
        }
        Fp(acc)
    }

    /// Slides the window one byte: `fp` must be the fingerprint of a window
    /// starting with `out`; the result is the fingerprint of that window
    /// without `out` and with `incoming` appended.
    #[inline]
    pub fn roll(&self, fp: Fp, out: u8, incoming: u8) -> Fp {
        let p = self.p;
        let out_term = mul_mod(out as u64, self.b, p);
        let shifted = mul_mod((fp.0 + p - out_term) % p, self.b_inv, p);
        Fp((shifted + mul_mod(incoming as u64, self.b_pow_window, p)) % p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Inverse via the extended Euclidean algorithm, independent of `pow_mod`.
    fn ext_gcd_inverse(a: u64, p: u64) -> u64 {
        let (mut r0, mut r1) = (p as i128, a as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let quot = r0 / r1;
            (r0, r1) = (r1, r0 - quot * r1);
            (t0, t1) = (t1, t0 - quot * t1);
        }
        assert_eq!(r0, 1);
        t0.rem_euclid(p as i128) as u64
    }

    #[test]
    fn deterministic_for_seed() {
        let a = FingerprintParams::new(3, 1).unwrap();
        let b = FingerprintParams::new(3, 1).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.window(), 2);
        assert_ne!(a, FingerprintParams::new(3, 2).unwrap());
    }

    #[test]
    fn window_one_power_is_base() {
        let p = FingerprintParams::new(2, 7).unwrap();
        assert_eq!(p.window(), 1);
        assert_eq!(p.base_pow_window(), p.base());
    }

    #[test]
    fn inverse_matches_extended_gcd() {
        let p = FingerprintParams::new(5, 42).unwrap();
        assert_eq!(mul_mod(p.base(), p.base_inverse(), p.modulus()), 1);
        assert_eq!(ext_gcd_inverse(p.base(), p.modulus()), p.base_inverse());
        assert!(p.base() >= 2 && p.base() <= p.modulus() - 2);
    }

    #[test]
    fn rejects_small_q() {
        assert!(matches!(
            FingerprintParams::new(1, 0),
            Err(Error::InvalidParameter(_))
        ));
        assert!(FingerprintParams::with_modulus(3, 0, 6).is_err());
        assert!(FingerprintParams::with_modulus(3, 0, 5).is_ok());
    }

    #[test]
    fn hash_formula_instantiation() {
        let p = FingerprintParams::new(3, 9).unwrap();
        let (m, b) = (p.modulus() as u128, p.base() as u128);
        let expected = ((97 * b + 97 * (b * b % m)) % m) as u64;
        assert_eq!(p.hash(b"aa").unwrap().value(), expected);
        assert_ne!(p.hash(b"ab").unwrap(), p.hash(b"ba").unwrap());
        assert!(p.hash(b"abc").is_err());
    }

    #[test]
    fn roll_examples() {
        let p = FingerprintParams::new(3, 11).unwrap();
        let h = |s: &[u8]| p.hash(s).unwrap();
        assert_eq!(p.roll(h(b"ab"), b'a', b'a'), h(b"ba"));
        assert_eq!(p.roll(h(b"aa"), b'a', b'a'), h(b"aa"));

        let text = b"ababbbab";
        let mut fp = h(&text[..2]);
        let mut windows = vec![fp];
        for i in 2..text.len() {
            fp = p.roll(fp, text[i - 2], text[i]);
            windows.push(fp);
        }
        assert_eq!(windows.len(), 7);
        for (i, w) in windows.iter().enumerate() {
            assert_eq!(*w, h(&text[i..i + 2]));
        }
    }

    #[test]
    fn small_modulus_roll_consistent() {
        let p = FingerprintParams::with_modulus(4, 3, 5).unwrap();
        let text = b"abcdefgh";
        let mut fp = p.hash(&text[..3]).unwrap();
        for i in 3..text.len() {
            fp = p.roll(fp, text[i - 3], text[i]);
            assert_eq!(fp, p.hash(&text[i - 2..=i]).unwrap());
        }
    }

    proptest! {
        #[test]
        fn roll_matches_rehash(
            text in proptest::collection::vec(any::<u8>(), 1..200),
            q in 2usize..12,
            seed in any::<u64>(),
        ) {
            let params = FingerprintParams::new(q, seed).unwrap();
            let w = q - 1;
            prop_assume!(text.len() >= w);
            let mut fp = params.hash(&text[..w]).unwrap();
            for i in w..text.len() {
                fp = params.roll(fp, text[i - w], text[i]);
                prop_assert_eq!(fp, params.hash(&text[i + 1 - w..=i]).unwrap());
            }
        }
    }
}
