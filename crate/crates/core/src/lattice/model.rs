//! Lattices in `F_Q((t))^4` between `t²·L₀` and `t⁻²·L₀`.
//!
//! A lattice `Λ` is stored through `t²·Λ / t⁴·L₀`, a t-stable subspace of
//! `(F_Q[t]/t⁴)^4`. Vectors have sixteen coefficients indexed by
//! `coordinate·4 + k`, where `k` is the exponent after the shift, so the
//! true exponent is `k − 2`. Coordinates are ordered `e1, e2, f1, f2`.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::field::{FieldSpec, FiniteField, Fq};
use super::LatticeError;

pub const RANK: usize = 4;
pub const DEPTH: usize = 4;
pub const DIM: usize = RANK * DEPTH;
/// True exponent of stored index `k = 0`.
pub const SHIFT: i32 = -2;

pub type Vector = [Fq; DIM];

/// Symplectic pairs `(c, d, sign)` with `⟨e_i, f_i⟩ = 1`.
const FORM: [(usize, usize, bool); 4] = [(0, 2, true), (2, 0, false), (1, 3, true), (3, 1, false)];

/// A lattice in canonical form: the reduced row echelon basis of its
/// stored subspace, pivots monic and in increasing column order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModelLattice {
    rows: Vec<Vector>,
}

impl ModelLattice {
    pub fn rows(&self) -> &[Vector] {
        &self.rows
    }

    /// `F_Q`-dimension of `Λ / t²L₀`.
    pub fn dim(&self) -> usize {
        self.rows.len()
    }
}

/// Exported form: an `R`-basis, each generator a list of four coordinate
/// polynomials with exponents starting at `shift`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeExport {
    pub shift: i32,
    pub basis: Vec<Vec<Vec<u32>>>,
}

#[derive(Clone, Debug)]
pub struct Model {
    field: FiniteField,
}

fn first_nonzero(v: &Vector) -> Option<usize> {
    v.iter().position(|c| *c != 0)
}

impl Model {
    pub fn new(p: u32, j: u32) -> Result<Self, LatticeError> {
        Ok(Model {
            field: FiniteField::new(p, j)?,
        })
    }

    pub fn field(&self) -> &FiniteField {
        &self.field
    }

    pub fn field_spec(&self) -> &FieldSpec {
        self.field.spec()
    }

    pub fn q(&self) -> u32 {
        self.field.q()
    }

    /// `t^power` times the basis vector `coord`.
    pub fn basis_vector(&self, coord: usize, power: i32) -> Result<Vector, LatticeError> {
        let k = power - SHIFT;
        if coord >= RANK || !(0..DEPTH as i32).contains(&k) {
            return Err(LatticeError::WindowOverflow);
        }
        let mut v = [0; DIM];
        v[coord * DEPTH + k as usize] = 1;
        Ok(v)
    }

    fn axpy(&self, a: Fq, x: &Vector, y: &mut Vector) {
        if a == 0 {
            return;
        }
        for (yi, xi) in y.iter_mut().zip(x) {
            *yi = self.field.add(*yi, self.field.mul(a, *xi));
        }
    }

    fn scale(&self, a: Fq, x: &mut Vector) {
        for xi in x.iter_mut() {
            *xi = self.field.mul(a, *xi);
        }
    }

    /// Reduced row echelon form of the span of `rows`.
    pub fn rref(&self, rows: impl IntoIterator<Item = Vector>) -> Vec<Vector> {
        let mut basis: Vec<Vector> = Vec::new();
        for mut v in rows {
            for b in &basis {
                let piv = first_nonzero(b).unwrap();
                let c = v[piv];
                if c != 0 {
                    self.axpy(self.field.neg(c), b, &mut v);
                }
            }
            let Some(piv) = first_nonzero(&v) else {
                continue;
            };
            let inv = self.field.inv(v[piv]);
            self.scale(inv, &mut v);
            for b in basis.iter_mut() {
                let c = b[piv];
                if c != 0 {
                    self.axpy(self.field.neg(c), &v, b);
                }
            }
            basis.push(v);
        }
        basis.sort_by_key(|b| first_nonzero(b).unwrap());
        basis
    }

    fn reduce(&self, rows: &[Vector], mut v: Vector) -> Vector {
        for b in rows {
            let piv = first_nonzero(b).unwrap();
            let c = v[piv];
            if c != 0 {
                self.axpy(self.field.neg(c), b, &mut v);
            }
        }
        v
    }

    fn shift_up(v: &Vector) -> Vector {
        let mut out = [0; DIM];
        for c in 0..RANK {
            for k in 0..DEPTH - 1 {
                out[c * DEPTH + k + 1] = v[c * DEPTH + k];
            }
        }
        out
    }

    fn shift_down(v: &Vector) -> Vector {
        let mut out = [0; DIM];
        for c in 0..RANK {
            for k in 1..DEPTH {
                out[c * DEPTH + k - 1] = v[c * DEPTH + k];
            }
        }
        out
    }

    /// Smallest lattice containing `gens` and `t²L₀`.
    pub fn span(&self, gens: &[Vector]) -> ModelLattice {
        let mut all = Vec::with_capacity(gens.len() * DEPTH);
        for g in gens {
            let mut v = *g;
            for _ in 0..DEPTH {
                all.push(v);
                v = Self::shift_up(&v);
            }
        }
        ModelLattice {
            rows: self.rref(all),
        }
    }

    /// `⟨t^{a0} e1, t^{a1} e2, t^{a2} f1, t^{a3} f2⟩`.
    pub fn diagonal(&self, powers: [i32; RANK]) -> Result<ModelLattice, LatticeError> {
        let gens = powers
            .iter()
            .enumerate()
            .map(|(c, a)| self.basis_vector(c, *a))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(self.span(&gens))
    }

    /// The reference lattice `L₀ = ⟨e1, e2, f1, f2⟩`.
    pub fn reference(&self) -> ModelLattice {
        self.diagonal([0; RANK]).unwrap()
    }

    pub fn contains_vector(&self, l: &ModelLattice, v: &Vector) -> bool {
        first_nonzero(&self.reduce(&l.rows, *v)).is_none()
    }

    pub fn is_sublattice(&self, a: &ModelLattice, b: &ModelLattice) -> bool {
        a.rows.iter().all(|v| self.contains_vector(b, v))
    }

    /// `dim_F(b/a)` for `a ⊆ b`.
    pub fn index(&self, a: &ModelLattice, b: &ModelLattice) -> Result<usize, LatticeError> {
        if !self.is_sublattice(a, b) {
            return Err(LatticeError::NotContained);
        }
        Ok(b.dim() - a.dim())
    }

    pub fn sum(&self, a: &ModelLattice, b: &ModelLattice) -> ModelLattice {
        ModelLattice {
            rows: self.rref(a.rows.iter().chain(&b.rows).copied()),
        }
    }

    /// Orthogonal complement under the coordinate dot product.
    fn complement(&self, rows: &[Vector]) -> Vec<Vector> {
        let r = self.rref(rows.iter().copied());
        let pivots: Vec<usize> = r.iter().map(|v| first_nonzero(v).unwrap()).collect();
        let mut out = Vec::with_capacity(DIM - r.len());
        for free in (0..DIM).filter(|c| !pivots.contains(c)) {
            let mut v = [0; DIM];
            v[free] = 1;
            for (row, piv) in r.iter().zip(&pivots) {
                v[*piv] = self.field.neg(row[free]);
            }
            out.push(v);
        }
        out
    }

    pub fn intersect(&self, a: &ModelLattice, b: &ModelLattice) -> ModelLattice {
        let mut perp = self.complement(&a.rows);
        perp.extend(self.complement(&b.rows));
        ModelLattice {
            rows: self.rref(self.complement(&perp)),
        }
    }

    /// Coefficientwise Frobenius.
    pub fn tau(&self, l: &ModelLattice) -> ModelLattice {
        let rows = l.rows.iter().map(|v| {
            let mut w = *v;
            for x in w.iter_mut() {
                *x = self.field.frobenius(*x);
            }
            w
        });
        ModelLattice {
            rows: self.rref(rows),
        }
    }

    /// `t·L₀ ⊆ Λ ⊆ t⁻¹·L₀`, the range in which points are searched.
    pub fn in_working_window(&self, l: &ModelLattice) -> bool {
        let outer = l.rows.iter().all(|v| (0..RANK).all(|c| v[c * DEPTH] == 0));
        outer && (0..RANK).all(|c| self.contains_vector(l, &self.basis_vector(c, 1).unwrap()))
    }

    /// `t·Λ`; needs `t·L₀ ⊆ Λ`.
    pub fn mul_t(&self, l: &ModelLattice) -> Result<ModelLattice, LatticeError> {
        for c in 0..RANK {
            if !self.contains_vector(l, &self.basis_vector(c, 1)?) {
                return Err(LatticeError::WindowOverflow);
            }
        }
        Ok(ModelLattice {
            rows: self.rref(l.rows.iter().map(Self::shift_up)),
        })
    }

    /// `t⁻¹·Λ`; needs `Λ ⊆ t⁻¹·L₀`.
    pub fn div_t(&self, l: &ModelLattice) -> Result<ModelLattice, LatticeError> {
        if l.rows.iter().any(|v| (0..RANK).any(|c| v[c * DEPTH] != 0)) {
            return Err(LatticeError::WindowOverflow);
        }
        let mut rows: Vec<Vector> = l.rows.iter().map(Self::shift_down).collect();
        for c in 0..RANK {
            rows.push(self.basis_vector(c, 1)?);
        }
        Ok(ModelLattice {
            rows: self.rref(rows),
        })
    }

    /// `{x : ⟨x, Λ⟩ ⊆ R}` for the symplectic form.
    pub fn dual(&self, l: &ModelLattice) -> ModelLattice {
        let mut constraints = Vec::with_capacity(l.rows.len() * DEPTH);
        for y in &l.rows {
            for k in 0..DEPTH {
                let mut a = [0; DIM];
                for (c, d, plus) in FORM {
                    for i in 0..=k {
                        let coef = y[d * DEPTH + k - i];
                        let coef = if plus { coef } else { self.field.neg(coef) };
                        a[c * DEPTH + i] = self.field.add(a[c * DEPTH + i], coef);
                    }
                }
                constraints.push(a);
            }
        }
        ModelLattice {
            rows: self.rref(self.complement(&constraints)),
        }
    }

    /// The `Q + 1` lattices strictly between `b` and `a` when `b ⊂² a` and
    /// `t·a ⊆ b`.
    pub fn lines_between(
        &self,
        b: &ModelLattice,
        a: &ModelLattice,
    ) -> Result<Vec<ModelLattice>, LatticeError> {
        if self.index(b, a)? != 2 || !self.is_sublattice(&self.mul_t_unchecked(a), b) {
            return Err(LatticeError::NotAPlane);
        }
        let mut extra: Vec<Vector> = Vec::new();
        let mut cur = b.rows.clone();
        for v in &a.rows {
            if first_nonzero(&self.reduce(&cur, *v)).is_some() {
                extra.push(*v);
                cur = self.rref(cur.iter().copied().chain([*v]));
                if extra.len() == 2 {
                    break;
                }
            }
        }
        let (u, v) = (extra[0], extra[1]);
        let mut out = Vec::with_capacity(self.q() as usize + 1);
        for c in self.field.elements() {
            let mut w = v;
            self.axpy(c, &u, &mut w);
            out.push(ModelLattice {
                rows: self.rref(b.rows.iter().copied().chain([w])),
            });
        }
        out.push(ModelLattice {
            rows: self.rref(b.rows.iter().copied().chain([u])),
        });
        Ok(out)
    }

    /// `t·Λ` with coefficients pushed past the window dropped.
    fn mul_t_unchecked(&self, l: &ModelLattice) -> ModelLattice {
        ModelLattice {
            rows: self.rref(l.rows.iter().map(Self::shift_up)),
        }
    }

    /// A deterministic `R`-basis read off the canonical form.
    pub fn export(&self, l: &ModelLattice) -> LatticeExport {
        let t_l = self.mul_t_unchecked(l).rows;
        let mut chosen: Vec<Vector> = Vec::new();
        let mut cur = t_l;
        for v in &l.rows {
            if first_nonzero(&self.reduce(&cur, *v)).is_some() {
                chosen.push(*v);
                cur = self.rref(cur.iter().copied().chain([*v]));
            }
        }
        let basis = chosen
            .iter()
            .map(|v| {
                (0..RANK)
                    .map(|c| (0..DEPTH).map(|k| v[c * DEPTH + k] as u32).collect())
                    .collect()
            })
            .collect();
        LatticeExport {
            shift: SHIFT,
            basis,
        }
    }

    pub fn import(&self, e: &LatticeExport) -> Result<ModelLattice, LatticeError> {
        if e.shift != SHIFT {
            return Err(LatticeError::WindowOverflow);
        }
        let mut gens = Vec::with_capacity(e.basis.len());
        for g in &e.basis {
            let mut v = [0; DIM];
            if g.len() != RANK {
                return Err(LatticeError::BadExport);
            }
            for (c, poly) in g.iter().enumerate() {
                if poly.len() != DEPTH {
                    return Err(LatticeError::BadExport);
                }
                for (k, x) in poly.iter().enumerate() {
                    if *x >= self.q() {
                        return Err(LatticeError::BadExport);
                    }
                    v[c * DEPTH + k] = *x as Fq;
                }
            }
            gens.push(v);
        }
        Ok(self.span(&gens))
    }

    pub fn describe(&self, l: &ModelLattice) -> LatticeDisplay {
        LatticeDisplay(self.export(l))
    }
}

/// Human-readable generators such as `e1 + 2t·f2`.
pub struct LatticeDisplay(pub LatticeExport);

impl fmt::Display for LatticeDisplay {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const NAMES: [&str; RANK] = ["e1", "e2", "f1", "f2"];
        let mut gens = Vec::new();
        for g in &self.0.basis {
            let mut terms = Vec::new();
            for (c, poly) in g.iter().enumerate() {
                for (k, x) in poly.iter().enumerate() {
                    if *x == 0 {
                        continue;
                    }
                    let e = k as i32 + self.0.shift;
                    let coef = if *x == 1 {
                        String::new()
                    } else {
                        format!("{x}·")
                    };
                    let tp = match e {
                        0 => String::new(),
                        1 => "t·".into(),
                        _ => format!("t^{e}·"),
                    };
                    terms.push(format!("{coef}{tp}{}", NAMES[c]));
                }
            }
            gens.push(terms.join(" + "));
        }
        write!(f, "⟨{}⟩", gens.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model() -> Model {
        Model::new(3, 2).unwrap()
    }

    #[test]
    fn reference_is_self_dual() {
        let m = model();
        let l0 = m.reference();
        assert_eq!(l0.dim(), 8);
        assert_eq!(m.dual(&l0), l0);
    }

    #[test]
    fn dual_of_superspecial_base() {
        let m = model();
        let a = m.diagonal([0, 0, 0, 1]).unwrap();
        assert_eq!(m.dual(&a), m.diagonal([0, -1, 0, 0]).unwrap());
    }

    #[test]
    fn indices() {
        let m = model();
        let a = m.diagonal([0, 0, 0, 1]).unwrap();
        let ta = m.mul_t(&m.reference()).unwrap();
        assert_eq!(m.index(&ta, &m.reference()).unwrap(), 4);
        let td = m.mul_t(&m.dual(&a)).unwrap();
        assert_eq!(m.index(&td, &a).unwrap(), 2);
        assert_eq!(m.index(&a, &a).unwrap(), 0);
        assert!(m.index(&m.reference(), &ta).is_err());
    }

    #[test]
    fn t_shifts_invert() {
        let m = model();
        let a = m.diagonal([0, 0, 0, 1]).unwrap();
        assert_eq!(m.div_t(&m.mul_t(&a).unwrap()).unwrap(), a);
        let tl = m.mul_t(&m.reference()).unwrap();
        assert_eq!(m.div_t(&tl).unwrap(), m.reference());
        let gens: Vec<Vector> = (0..3).map(|c| m.basis_vector(c, 1).unwrap()).collect();
        let deep = m.span(&gens);
        assert!(m.mul_t(&deep).is_err());
        let wide = m.diagonal([-2, 0, 0, 0]).unwrap();
        assert!(m.div_t(&wide).is_err());
        assert!(!m.in_working_window(&wide));
        assert!(!m.in_working_window(&deep));
        assert!(m.in_working_window(&a));
    }

    #[test]
    fn dual_of_t_multiple() {
        let m = model();
        let a = m.diagonal([0, 0, 0, 1]).unwrap();
        let lhs = m.dual(&m.mul_t(&a).unwrap());
        let rhs = m.div_t(&m.dual(&a)).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn sum_and_intersection_of_self() {
        let m = model();
        let a = m.diagonal([0, 1, -1, 0]).unwrap();
        assert_eq!(m.sum(&a, &a), a);
        assert_eq!(m.intersect(&a, &a), a);
    }

    #[test]
    fn prime_field_lattice_is_tau_fixed() {
        let m = model();
        let a = m.diagonal([0, 0, 0, 1]).unwrap();
        assert_eq!(m.tau(&a), a);
    }

    #[test]
    fn lines_between_count() {
        let m = model();
        let a = m.diagonal([0, 0, 0, 1]).unwrap();
        let b = m.mul_t(&m.dual(&a)).unwrap();
        let lines = m.lines_between(&b, &a).unwrap();
        assert_eq!(lines.len(), 10);
        let distinct: std::collections::BTreeSet<_> = lines.iter().collect();
        assert_eq!(distinct.len(), 10);
    }

    #[test]
    fn export_round_trip() {
        let m = model();
        let a = m.diagonal([0, 0, 0, 1]).unwrap();
        let e = m.export(&a);
        assert_eq!(e.basis.len(), 4);
        assert_eq!(m.import(&e).unwrap(), a);
        assert_eq!(m.describe(&a).to_string(), "⟨e1, e2, f1, t·f2⟩");
    }
}
