//! Prime-field arithmetic and systematic Reed–Solomon parity coefficients.
//!
//! Only prime fields GF(p) are supported. Elements are `u64` values kept in
//! canonical form `0..p`.

use crate::error::{Error, Result};

/// The field of integers modulo a prime `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u64,
}

/// Binary and unary operations accepted by [`field_arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Inv,
    Div,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl PrimeField {
    /// Creates GF(p). Moduli are limited to `p < 2^32` so products fit in `u64`.
    pub fn new(p: u64) -> Result<Self> {
        if p >= 1 << 32 || !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(Self { p })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    /// Checks that `a` is a canonical element.
    pub fn element(&self, a: u64) -> Result<u64> {
        if a < self.p {
            Ok(a)
        } else {
            Err(Error::NotAnElement { value: a, p: self.p })
        }
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        (a + b) % self.p
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        (a + self.p - b) % self.p
    }

    pub fn neg(&self, a: u64) -> u64 {
        (self.p - a) % self.p
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        (a * b) % self.p
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1 % self.p;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse via the extended Euclidean algorithm.
    pub fn inv(&self, a: u64) -> Result<u64> {
        if a.is_multiple_of(self.p) {
            return Err(Error::DivisionByZero);
        }
        let (mut old_r, mut r) = (a as i128, self.p as i128);
        let (mut old_s, mut s) = (1i128, 0i128);
        while r != 0 {
            let quot = old_r / r;
            (old_r, r) = (r, old_r - quot * r);
            (old_s, s) = (s, old_s - quot * s);
        }
        debug_assert_eq!(old_r, 1);
        Ok(old_s.rem_euclid(self.p as i128) as u64)
    }

    pub fn div(&self, a: u64, b: u64) -> Result<u64> {
        Ok(self.mul(a, self.inv(b)?))
    }
}

/// Evaluates one field operation over GF(p), validating every input.
///
/// `b` must be present for every operation except [`FieldOp::Inv`], where it
/// is ignored.
pub fn field_arith(p: u64, op: FieldOp, a: u64, b: Option<u64>) -> Result<u64> {
    let field = PrimeField::new(p)?;
    let a = field.element(a)?;
    let rhs = || -> Result<u64> {
        let b = b.ok_or_else(|| Error::Shape(format!("{op:?} needs a second operand")))?;
        field.element(b)
    };
    match op {
        FieldOp::Add => Ok(field.add(a, rhs()?)),
        FieldOp::Sub => Ok(field.sub(a, rhs()?)),
        FieldOp::Mul => Ok(field.mul(a, rhs()?)),
        FieldOp::Div => field.div(a, rhs()?),
        FieldOp::Inv => field.inv(a),
    }
}

/// Parity coefficients of a systematic `[k + m, k, m + 1]` Reed–Solomon code
/// over GF(p).
///
/// Row `j` holds the coefficients of parity `j`: `parity_j = Σ_i c[j][i] x_i`.
/// The generator is the Vandermonde matrix on evaluation points
/// `0, 1, …, k + m − 1`, row-reduced so that its first `k` columns are the
/// identity.
pub fn systematic_mds_generator(p: u64, k: usize, m: usize) -> Result<Vec<Vec<u64>>> {
    let field = PrimeField::new(p)?;
    if k == 0 {
        return Err(Error::Shape("dimension k must be at least 1".into()));
    }
    let n = k + m;
    if (p as usize) < n {
        return Err(Error::AlphabetTooSmall { q: p as usize, needed: n });
    }

    // k x n Vandermonde generator: row a, column j holds j^a.
    let mut gen: Vec<Vec<u64>> = (0..k)
        .map(|a| (0..n).map(|j| field.pow(j as u64, a as u64)).collect())
        .collect();

    // Gauss-Jordan on the left k x k block.
    for col in 0..k {
        let pivot = (col..k)
            .find(|&row| gen[row][col] != 0)
            .ok_or_else(|| Error::InternalInvariantViolation("singular Vandermonde block".into()))?;
        gen.swap(col, pivot);
        let scale = field.inv(gen[col][col])?;
        for v in gen[col].iter_mut() {
            *v = field.mul(*v, scale);
        }
        for row in 0..k {
            if row != col && gen[row][col] != 0 {
                let factor = gen[row][col];
                let pivot_row = gen[col].clone();
                for (v, &p) in gen[row].iter_mut().zip(&pivot_row) {
                    *v = field.sub(*v, field.mul(factor, p));
                }
            }
        }
    }

    Ok((0..m)
        .map(|j| (0..k).map(|i| gen[i][k + j]).collect())
        .collect())
}
