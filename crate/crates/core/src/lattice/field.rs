//! Small finite fields `F_{p^j}` with precomputed tables.
//!
//! An element is stored as the integer `Σ c_i p^i` built from its
//! coefficients in the polynomial basis `1, x, x², …`.

use serde::{Deserialize, Serialize};

use super::LatticeError;

pub type Fq = u8;

/// Built-in defining polynomials: `(p, j, low coefficients of the monic
/// modulus)`. `x² + 1` is stored as `[1, 0]`.
const MODULI: &[(u32, u32, &[u32])] = &[
    (3, 1, &[0]),
    (3, 2, &[1, 0]),
    (3, 3, &[1, 2, 0]),
    (3, 4, &[2, 0, 0, 2]),
    (5, 1, &[0]),
    (5, 2, &[2, 0]),
    (5, 3, &[1, 1, 0]),
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u32,
    pub j: u32,
    pub q: u32,
    /// Monic modulus, lowest degree first, leading 1 included.
    pub modulus: Vec<u32>,
}

#[derive(Clone, Debug)]
pub struct FiniteField {
    spec: FieldSpec,
    add: Vec<Fq>,
    mul: Vec<Fq>,
    neg: Vec<Fq>,
    inv: Vec<Fq>,
    frob: Vec<Fq>,
}

impl FiniteField {
    pub fn new(p: u32, j: u32) -> Result<Self, LatticeError> {
        let low = MODULI
            .iter()
            .find(|(pp, jj, _)| *pp == p && *jj == j)
            .map(|(_, _, m)| *m)
            .ok_or(LatticeError::UnsupportedField { p, j })?;
        let q = p.pow(j);
        let mut modulus: Vec<u32> = low.to_vec();
        modulus.push(1);
        let digits = |a: u32| -> Vec<u32> { (0..j).map(|i| (a / p.pow(i)) % p).collect() };
        let pack =
            |c: &[u32]| -> u32 { c.iter().enumerate().map(|(i, v)| v * p.pow(i as u32)).sum() };

        let qs = q as usize;
        let mut add = vec![0; qs * qs];
        let mut mul = vec![0; qs * qs];
        for a in 0..q {
            let da = digits(a);
            for b in 0..q {
                let db = digits(b);
                let s: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[(a * q + b) as usize] = pack(&s) as Fq;
                let mut prod = vec![0u32; 2 * j as usize];
                for (i, x) in da.iter().enumerate() {
                    for (k, y) in db.iter().enumerate() {
                        prod[i + k] = (prod[i + k] + x * y) % p;
                    }
                }
                for deg in (j as usize..prod.len()).rev() {
                    let c = prod[deg];
                    if c == 0 {
                        continue;
                    }
                    prod[deg] = 0;
                    for (i, m) in low.iter().enumerate() {
                        let idx = deg - j as usize + i;
                        prod[idx] = (prod[idx] + (p - c) * m) % p;
                    }
                }
                mul[(a * q + b) as usize] = pack(&prod[..j as usize]) as Fq;
            }
        }
        let mut neg = vec![0; qs];
        let mut inv = vec![0; qs];
        for a in 0..qs {
            neg[a] = (0..qs).find(|b| add[a * qs + b] == 0).unwrap() as Fq;
            if a != 0 {
                inv[a] = (0..qs)
                    .find(|b| mul[a * qs + b] == 1)
                    .ok_or(LatticeError::ReducibleModulus { p, j })? as Fq;
            }
        }
        let mut frob = vec![0; qs];
        for (a, f) in frob.iter_mut().enumerate() {
            let mut acc: usize = 1;
            for _ in 0..p {
                acc = mul[acc * qs + a] as usize;
            }
            *f = acc as Fq;
        }
        Ok(FiniteField {
            spec: FieldSpec { p, j, q, modulus },
            add,
            mul,
            neg,
            inv,
            frob,
        })
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    pub fn p(&self) -> u32 {
        self.spec.p
    }

    pub fn q(&self) -> u32 {
        self.spec.q
    }

    pub fn elements(&self) -> impl Iterator<Item = Fq> {
        0..self.spec.q as Fq
    }

    #[inline]
    pub fn add(&self, a: Fq, b: Fq) -> Fq {
        self.add[a as usize * self.spec.q as usize + b as usize]
    }

    #[inline]
    pub fn sub(&self, a: Fq, b: Fq) -> Fq {
        self.add(a, self.neg[b as usize])
    }

    #[inline]
    pub fn mul(&self, a: Fq, b: Fq) -> Fq {
        self.mul[a as usize * self.spec.q as usize + b as usize]
    }

    #[inline]
    pub fn neg(&self, a: Fq) -> Fq {
        self.neg[a as usize]
    }

    /// Inverse of a nonzero element.
    #[inline]
    pub fn inv(&self, a: Fq) -> Fq {
        debug_assert!(a != 0);
        self.inv[a as usize]
    }

    /// `a ↦ a^p`.
    #[inline]
    pub fn frobenius(&self, a: Fq) -> Fq {
        self.frob[a as usize]
    }

    /// Order of the Frobenius as a permutation of the field.
    pub fn frobenius_order(&self) -> u32 {
        let mut k = 1;
        let mut cur: Vec<Fq> = self.frob.clone();
        while cur.iter().enumerate().any(|(i, v)| *v as usize != i) {
            cur = cur.iter().map(|v| self.frobenius(*v)).collect();
            k += 1;
        }
        k
    }
}
