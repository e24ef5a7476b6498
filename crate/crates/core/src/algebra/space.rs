//! Vector spaces and their canonical point encoding.
//!
//! A vector of `F_p^k` is identified with the integer whose little-endian
//! base-`p` digits are its coordinates. For `V = F_q^d` the `F_p`-coordinates
//! are laid out entry by entry (each entry contributes `f` digits, low
//! coefficient first), so brick `i` occupies the digit range
//! `[i·m·f, (i+1)·m·f)`.

use crate::algebra::field::{digits, FieldElement, FieldSpec};
use crate::error::{Error, Result};

/// Points are limited to this many bits so tables stay addressable.
const MAX_POINT_BITS: f64 = 32.0;

/// `F_p^dim` with points `0..p^dim`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FpSpace {
    p: u32,
    dim: usize,
    size: usize,
}

impl FpSpace {
    pub fn new(p: u32, dim: usize) -> Result<Self> {
        if p < 2 {
            return Err(Error::InvalidParameter(format!("p = {p} is not a prime")));
        }
        if dim as f64 * (p as f64).log2() > MAX_POINT_BITS {
            return Err(Error::BudgetExceeded(format!("F_{p}^{dim} has more than 2^{MAX_POINT_BITS} points")));
        }
        Ok(FpSpace { p, dim, size: (p as usize).pow(dim as u32) })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of points, `p^dim`.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn contains(&self, x: usize) -> bool {
        x < self.size
    }

    /// The `k`-th unit vector.
    pub fn basis_point(&self, k: usize) -> usize {
        (self.p as usize).pow(k as u32)
    }

    pub fn digits(&self, x: usize) -> Vec<u32> {
        digits(x as u64, self.p, self.dim)
    }

    pub fn from_digits(&self, ds: &[u32]) -> usize {
        debug_assert_eq!(ds.len(), self.dim);
        ds.iter().rev().fold(0usize, |acc, &c| acc * self.p as usize + c as usize)
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        if self.p == 2 {
            return a ^ b;
        }
        let p = self.p as usize;
        let (mut a, mut b) = (a, b);
        let (mut out, mut place) = (0usize, 1usize);
        while a > 0 || b > 0 {
            out += ((a % p + b % p) % p) * place;
            a /= p;
            b /= p;
            place *= p;
        }
        out
    }

    pub fn neg(&self, a: usize) -> usize {
        if self.p == 2 {
            return a;
        }
        self.scale(self.p - 1, a)
    }

    pub fn sub(&self, a: usize, b: usize) -> usize {
        if self.p == 2 {
            return a ^ b;
        }
        self.add(a, self.neg(b))
    }

    /// `c · a` for a scalar `c` in `F_p`.
    pub fn scale(&self, c: u32, a: usize) -> usize {
        let p = self.p as usize;
        let c = c as usize % p;
        if c == 0 {
            return 0;
        }
        if c == 1 {
            return a;
        }
        let mut a = a;
        let (mut out, mut place) = (0usize, 1usize);
        while a > 0 {
            out += (a % p * c % p) * place;
            a /= p;
            place *= p;
        }
        out
    }
}

/// A vector of `F_q^d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Vector {
    pub entries: Vec<FieldElement>,
}

/// `V = F_q^d = V_1 ⊕ ... ⊕ V_n`, each brick `V_i` of `F_q`-dimension `m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VSpace {
    field: FieldSpec,
    m: usize,
    n: usize,
    points: FpSpace,
    brick: FpSpace,
}

impl VSpace {
    pub fn new(field: FieldSpec, m: usize, n: usize) -> Result<Self> {
        if m < 2 || n < 2 {
            return Err(Error::InvalidParameter(format!("need m > 1 and n > 1 bricks, got m = {m}, n = {n}")));
        }
        let f = field.degree();
        let points = FpSpace::new(field.p(), m * n * f)?;
        let brick = FpSpace::new(field.p(), m * f)?;
        Ok(VSpace { field, m, n, points, brick })
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn p(&self) -> u32 {
        self.field.p()
    }

    /// `F_q`-dimension of `V`.
    pub fn d(&self) -> usize {
        self.m * self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `F_p`-dimension of `V`.
    pub fn e(&self) -> usize {
        self.points.dim()
    }

    /// `F_p`-dimension of one brick.
    pub fn m_p(&self) -> usize {
        self.brick.dim()
    }

    /// `|V|`.
    pub fn size(&self) -> usize {
        self.points.size()
    }

    pub fn points(&self) -> &FpSpace {
        &self.points
    }

    pub fn brick_space(&self) -> &FpSpace {
        &self.brick
    }

    /// Brick `i` component of `x`, as a point of the brick space.
    pub fn project(&self, x: usize, i: usize) -> usize {
        x / self.brick.size().pow(i as u32) % self.brick.size()
    }

    /// The point of `V` that is `y` in brick `i` and zero elsewhere.
    pub fn embed(&self, i: usize, y: usize) -> usize {
        y * self.brick.size().pow(i as u32)
    }

    pub fn encode(&self, v: &Vector) -> Result<usize> {
        if v.entries.len() != self.d() {
            return Err(Error::DimensionMismatch { expected: self.d(), got: v.entries.len() });
        }
        let q = self.field.order() as usize;
        let mut x = 0usize;
        for entry in v.entries.iter().rev() {
            if !self.field.is_valid(entry) {
                return Err(Error::InvalidParameter(format!("{entry:?} is not in the field")));
            }
            x = x * q + self.field.index_of(entry) as usize;
        }
        Ok(x)
    }

    pub fn decode(&self, mut x: usize) -> Vector {
        let q = self.field.order() as usize;
        let entries = (0..self.d())
            .map(|_| {
                let e = self.field.element((x % q) as u64);
                x /= q;
                e
            })
            .collect();
        Vector { entries }
    }
}

impl Vector {
    /// Entries `i·m .. (i+1)·m`, the brick-`i` projection.
    pub fn brick(&self, i: usize, m: usize) -> &[FieldElement] {
        &self.entries[i * m..(i + 1) * m]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn add_matches_digitwise() {
        let s = FpSpace::new(3, 4).unwrap();
        for a in 0..s.size() {
            for b in (0..s.size()).step_by(7) {
                let da = s.digits(a);
                let db = s.digits(b);
                let sum: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % 3).collect();
                assert_eq!(s.add(a, b), s.from_digits(&sum));
                assert_eq!(s.sub(s.add(a, b), b), a);
            }
            assert_eq!(s.add(a, s.neg(a)), 0);
        }
    }

    #[test]
    fn encoding_is_brick_major() {
        let v = VSpace::new(FieldSpec::prime(2).unwrap(), 2, 2).unwrap();
        // 5 = 0b0101: brick 0 holds point 1, brick 1 holds point 1
        assert_eq!(v.project(5, 0), 1);
        assert_eq!(v.project(5, 1), 1);
        assert_eq!(v.embed(1, 2) + v.embed(0, 2), 10);
        for x in 0..v.size() {
            assert_eq!(v.encode(&v.decode(x)).unwrap(), x);
        }
    }

    #[test]
    fn extension_field_encoding() {
        let k: FieldSpec = "2^2/1,1,1".parse().unwrap();
        let v = VSpace::new(k.clone(), 2, 2).unwrap();
        assert_eq!(v.e(), 8);
        assert_eq!(v.m_p(), 4);
        let x = v.decode(0b1110_0100);
        assert_eq!(x.entries[0], k.element(0));
        assert_eq!(x.entries[1], k.element(1));
        assert_eq!(x.entries[2], k.element(2));
        assert_eq!(x.entries[3], k.element(3));
        assert_eq!(x.brick(1, 2), &[k.element(2), k.element(3)]);
    }

    #[test]
    fn rejects_degenerate_decompositions() {
        let k = FieldSpec::prime(2).unwrap();
        assert!(VSpace::new(k.clone(), 1, 4).is_err());
        assert!(VSpace::new(k, 4, 1).is_err());
    }
}
