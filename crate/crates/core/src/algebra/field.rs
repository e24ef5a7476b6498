//! Prime fields and their extensions `F_q = F_p[x]/(π)`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest supported extension degree.
pub const MAX_DEGREE: usize = 8;

/// Upper bound on monic candidate factors tried by the irreducibility check.
const MAX_FACTOR_CANDIDATES: u64 = 20_000_000;

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let n = n as u64;
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// `F_q` with `q = p^f`, given by a monic irreducible `π` of degree `f` over `F_p`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldSpec {
    p: u32,
    f: usize,
    /// Coefficients of `π`, low to high, length `f + 1`.
    poly: Vec<u32>,
}

/// An element of `F_q` in the power basis `1, x, ..., x^{f-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement {
    pub coeffs: Vec<u32>,
}

impl FieldSpec {
    pub fn new(p: u32, poly: Vec<u32>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        if poly.len() < 2 {
            return Err(Error::InvalidField("defining polynomial must have degree >= 1".into()));
        }
        let f = poly.len() - 1;
        if f > MAX_DEGREE {
            return Err(Error::InvalidField(format!(
                "extension degree {f} exceeds the supported maximum {MAX_DEGREE}"
            )));
        }
        if let Some(c) = poly.iter().find(|&&c| c >= p) {
            return Err(Error::InvalidField(format!("coefficient {c} is not reduced mod {p}")));
        }
        if poly[f] != 1 {
            return Err(Error::InvalidField("defining polynomial must be monic".into()));
        }
        let spec = FieldSpec { p, f, poly };
        spec.check_irreducible()?;
        Ok(spec)
    }

    /// The prime field `F_p`, presented as `F_p[x]/(x)`.
    pub fn prime(p: u32) -> Result<Self> {
        Self::new(p, vec![0, 1])
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.f
    }

    pub fn poly(&self) -> &[u32] {
        &self.poly
    }

    pub fn order(&self) -> u64 {
        (self.p as u64).pow(self.f as u32)
    }

    fn check_irreducible(&self) -> Result<()> {
        let p = self.p as u64;
        let half = self.f / 2;
        let candidates: u64 = (1..=half).map(|k| p.saturating_pow(k as u32)).fold(0u64, |a, b| a.saturating_add(b));
        if candidates > MAX_FACTOR_CANDIDATES {
            return Err(Error::InvalidField(format!(
                "irreducibility search needs {candidates} candidate factors (limit {MAX_FACTOR_CANDIDATES})"
            )));
        }
        for k in 1..=half {
            let count = p.pow(k as u32);
            for idx in 0..count {
                let mut g = digits(idx, self.p, k);
                g.push(1);
                if poly_rem(&self.poly, &g, self.p).iter().all(|&c| c == 0) {
                    return Err(Error::InvalidField(format!("polynomial {:?} is divisible by {:?}", self.poly, g)));
                }
            }
        }
        Ok(())
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement { coeffs: vec![0; self.f] }
    }

    pub fn one(&self) -> FieldElement {
        let mut coeffs = vec![0; self.f];
        coeffs[0] = 1;
        FieldElement { coeffs }
    }

    /// Element whose base-`p` little-endian digits are the coefficients.
    pub fn element(&self, index: u64) -> FieldElement {
        debug_assert!(index < self.order());
        FieldElement { coeffs: digits(index, self.p, self.f) }
    }

    pub fn index_of(&self, a: &FieldElement) -> u64 {
        a.coeffs.iter().rev().fold(0u64, |acc, &c| acc * self.p as u64 + c as u64)
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.order()).map(move |i| self.element(i))
    }

    pub fn is_valid(&self, a: &FieldElement) -> bool {
        a.coeffs.len() == self.f && a.coeffs.iter().all(|&c| c < self.p)
    }

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        ff_add(a, b, self)
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        ff_mul(a, b, self)
    }

    pub fn neg(&self, a: &FieldElement) -> FieldElement {
        FieldElement { coeffs: a.coeffs.iter().map(|&c| (self.p - c) % self.p).collect() }
    }

    pub fn sub(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        self.add(a, &self.neg(b))
    }

    pub fn pow(&self, a: &FieldElement, mut exp: u64) -> FieldElement {
        let mut base = a.clone();
        let mut acc = self.one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: &FieldElement) -> Option<FieldElement> {
        if a.is_zero() {
            None
        } else {
            Some(self.pow(a, self.order() - 2))
        }
    }
}

impl FieldElement {
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }
}

pub fn ff_add(a: &FieldElement, b: &FieldElement, spec: &FieldSpec) -> FieldElement {
    debug_assert!(spec.is_valid(a) && spec.is_valid(b));
    FieldElement {
        coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(&x, &y)| ((x as u64 + y as u64) % spec.p as u64) as u32).collect(),
    }
}

pub fn ff_mul(a: &FieldElement, b: &FieldElement, spec: &FieldSpec) -> FieldElement {
    debug_assert!(spec.is_valid(a) && spec.is_valid(b));
    let p = spec.p as u64;
    let f = spec.f;
    let mut prod = vec![0u64; 2 * f - 1];
    for (i, &x) in a.coeffs.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.coeffs.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p;
        }
    }
    // π is monic: x^f ≡ -(π_0 + ... + π_{f-1} x^{f-1})
    for deg in (f..prod.len()).rev() {
        let c = prod[deg];
        if c == 0 {
            continue;
        }
        prod[deg] = 0;
        for k in 0..f {
            let t = c * spec.poly[k] as u64 % p;
            let slot = &mut prod[deg - f + k];
            *slot = (*slot + p - t) % p;
        }
    }
    FieldElement { coeffs: prod[..f].iter().map(|&c| c as u32).collect() }
}

/// Remainder of `a` modulo monic `b` over `F_p`.
fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let p = p as u64;
    let mut r: Vec<u64> = a.iter().map(|&c| c as u64).collect();
    let db = b.len() - 1;
    if r.len() <= db {
        return a.to_vec();
    }
    for deg in (db..r.len()).rev() {
        let c = r[deg];
        if c == 0 {
            continue;
        }
        for k in 0..=db {
            let t = c * b[k] as u64 % p;
            let slot = &mut r[deg - db + k];
            *slot = (*slot + p - t) % p;
        }
    }
    r.truncate(db);
    r.into_iter().map(|c| c as u32).collect()
}

/// Little-endian base-`p` digits of `n`, exactly `len` of them.
pub fn digits(mut n: u64, p: u32, len: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push((n % p as u64) as u32);
        n /= p as u64;
    }
    out
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}/", self.p, self.f)?;
        for (i, c) in self.poly.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl FromStr for FieldSpec {
    type Err = Error;

    /// Parses `p^f/c0,c1,...,cf` (coefficients low to high), or a bare prime `p`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = |msg: &str| Error::Parse(format!("field spec `{s}`: {msg}"));
        let Some((head, poly)) = s.split_once('/') else {
            let p: u32 = s.parse().map_err(|_| bad("expected `p^f/poly` or a prime"))?;
            return FieldSpec::prime(p);
        };
        let (p, f) = head.split_once('^').ok_or_else(|| bad("missing `^`"))?;
        let p: u32 = p.trim().parse().map_err(|_| bad("bad prime"))?;
        let f: usize = f.trim().parse().map_err(|_| bad("bad degree"))?;
        let poly = poly
            .split(',')
            .map(|c| c.trim().parse::<u32>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| bad("bad coefficient"))?;
        if poly.len() != f + 1 {
            return Err(bad(&format!("expected {} coefficients, got {}", f + 1, poly.len())));
        }
        FieldSpec::new(p, poly)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn f4() -> FieldSpec {
        "2^2/1,1,1".parse().unwrap()
    }

    fn f8() -> FieldSpec {
        "2^3/1,1,0,1".parse().unwrap()
    }

    #[test]
    fn x_squared_in_f4() {
        let k = f4();
        let x = k.element(2);
        assert_eq!(ff_mul(&x, &x, &k), FieldElement { coeffs: vec![1, 1] });
    }

    #[test]
    fn prime_field_identity() {
        let k = FieldSpec::prime(7).unwrap();
        for i in 0..7 {
            let a = k.element(i);
            assert_eq!(ff_mul(&a, &k.one(), &k), a);
        }
    }

    // Long division of x^4 by x^3 + x + 1 over F_2 gives remainder x^2 + x.
    #[test]
    fn x2_times_x2_in_f8() {
        let k = f8();
        let x2 = k.element(4);
        assert_eq!(ff_mul(&x2, &x2, &k).coeffs, vec![0, 1, 1]);
    }

    #[test]
    fn rejects_reducible_and_bad_input() {
        assert!("2^2/1,0,1".parse::<FieldSpec>().is_err()); // (x+1)^2
        assert!("3^2/2,0,1".parse::<FieldSpec>().is_err()); // x^2 - 1
        assert!("4^1/0,1".parse::<FieldSpec>().is_err());
        assert!("2^3/1,1,0,2".parse::<FieldSpec>().is_err());
        assert!("2^3/1,1,0".parse::<FieldSpec>().is_err());
        assert!("2^9/1,1,0,0,0,0,0,0,0,1".parse::<FieldSpec>().is_err());
        // x^4 + x^2 + 1 = (x^2 + x + 1)^2 has no roots, only a quadratic factor
        assert!("2^4/1,0,1,0,1".parse::<FieldSpec>().is_err());
    }

    #[test]
    fn display_round_trips() {
        let k: FieldSpec = "2^8/1,1,0,1,1,0,0,0,1".parse().unwrap();
        assert_eq!(k.to_string(), "2^8/1,1,0,1,1,0,0,0,1");
        assert_eq!(k.to_string().parse::<FieldSpec>().unwrap(), k);
        assert_eq!("5".parse::<FieldSpec>().unwrap(), FieldSpec::prime(5).unwrap());
    }

    #[test]
    fn field_axioms_on_random_triples() {
        let fields = [
            f4(),
            f8(),
            "3^2/1,0,1".parse().unwrap(),
            "2^8/1,1,0,1,1,0,0,0,1".parse().unwrap(),
            "5^3/2,3,0,1".parse::<FieldSpec>().unwrap(),
            FieldSpec::prime(13).unwrap(),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for k in &fields {
            for _ in 0..10_000 {
                let a = k.element(rng.gen_range(0..k.order()));
                let b = k.element(rng.gen_range(0..k.order()));
                let c = k.element(rng.gen_range(0..k.order()));
                assert_eq!(k.mul(&k.mul(&a, &b), &c), k.mul(&a, &k.mul(&b, &c)));
                assert_eq!(k.add(&k.add(&a, &b), &c), k.add(&a, &k.add(&b, &c)));
                assert_eq!(k.mul(&a, &k.add(&b, &c)), k.add(&k.mul(&a, &b), &k.mul(&a, &c)));
                assert_eq!(k.mul(&a, &b), k.mul(&b, &a));
                assert!(k.add(&a, &k.neg(&a)).is_zero());
                if let Some(ai) = k.inv(&a) {
                    assert_eq!(k.mul(&a, &ai), k.one());
                } else {
                    assert!(a.is_zero());
                }
            }
        }
    }

    #[test]
    fn index_round_trip() {
        let k: FieldSpec = "3^2/1,0,1".parse().unwrap();
        for i in 0..9 {
            assert_eq!(k.index_of(&k.element(i)), i);
        }
    }
}
