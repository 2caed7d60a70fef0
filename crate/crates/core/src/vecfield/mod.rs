//! Polynomial vector fields, 1-forms and 2-forms on a weighted superspace.
//!
//! Conventions: a field is `X = Σ f^m ∂_m` with coefficients on the left; a
//! 1-form `ω = Σ A_m dx^m` pairs as `ω(X) = Σ f^m A_m`. A 2-form is stored by
//! its values `Φ(∂_l, ∂_m)` for `l <= m` (the diagonal is needed for odd `l`),
//! with `Φ(∂_m, ∂_l) = -(-1)^{p_l p_m} Φ(∂_l, ∂_m)`.

mod text;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::scalar::{Field, Scalar};
use crate::superpoly::{same_table, PolyError, Polynomial, VariableTable};

pub use text::{parse_field, parse_form, slot_label};

fn sign(neg: bool, p: Polynomial) -> Polynomial {
    if neg {
        p.neg()
    } else {
        p
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VectorField {
    table: Arc<VariableTable>,
    coeffs: Vec<Polynomial>,
}

impl VectorField {
    pub fn zero(table: &Arc<VariableTable>) -> VectorField {
        VectorField {
            table: table.clone(),
            coeffs: vec![Polynomial::zero(table); table.len()],
        }
    }

    /// The coordinate field `∂_i`.
    pub fn partial(table: &Arc<VariableTable>, i: usize) -> VectorField {
        let mut x = VectorField::zero(table);
        x.coeffs[i] = Polynomial::one(table);
        x
    }

    pub fn from_coeffs(table: &Arc<VariableTable>, coeffs: Vec<Polynomial>) -> Result<VectorField, PolyError> {
        if coeffs.len() != table.len() || coeffs.iter().any(|c| !same_table(c.table(), table)) {
            return Err(PolyError::MixedTables);
        }
        Ok(VectorField {
            table: table.clone(),
            coeffs,
        })
    }

    /// `f ∂_i`.
    pub fn monomial(table: &Arc<VariableTable>, f: Polynomial, i: usize) -> VectorField {
        let mut x = VectorField::zero(table);
        x.coeffs[i] = f;
        x
    }

    pub fn table(&self) -> &Arc<VariableTable> {
        &self.table
    }

    pub fn field(&self) -> Field {
        self.table.field()
    }

    pub fn coeff(&self, i: usize) -> &Polynomial {
        &self.coeffs[i]
    }

    pub fn coeffs(&self) -> &[Polynomial] {
        &self.coeffs
    }

    pub fn set_coeff(&mut self, i: usize, p: Polynomial) {
        self.coeffs[i] = p;
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Parity of `f ∂_m` is `p(f) + p_m`; `None` when mixed. Zero is even.
    pub fn parity(&self) -> Option<bool> {
        let mut found: Option<bool> = None;
        for (m, c) in self.coeffs.iter().enumerate() {
            for (mono, _) in c.terms() {
                let p = mono.parity(&self.table) ^ self.table.is_odd(m);
                match found {
                    None => found = Some(p),
                    Some(q) if q != p => return None,
                    _ => {}
                }
            }
        }
        Some(found.unwrap_or(false))
    }

    /// Weighted degree `deg f - s_m`, when uniform.
    pub fn weighted_degree(&self) -> Option<i64> {
        let mut found: Option<i64> = None;
        for (m, c) in self.coeffs.iter().enumerate() {
            for (mono, _) in c.terms() {
                let d = mono.weighted_degree() as i64 - self.table.weight(m) as i64;
                match found {
                    None => found = Some(d),
                    Some(e) if e != d => return None,
                    _ => {}
                }
            }
        }
        found
    }

    /// Even and odd parts.
    pub fn parity_parts(&self) -> (VectorField, VectorField) {
        let mut even = VectorField::zero(&self.table);
        let mut odd = VectorField::zero(&self.table);
        for (m, c) in self.coeffs.iter().enumerate() {
            let pm = self.table.is_odd(m);
            even.coeffs[m] = c.filter(|mono| mono.parity(&self.table) == pm);
            odd.coeffs[m] = c.filter(|mono| mono.parity(&self.table) != pm);
        }
        (even, odd)
    }

    /// `X(f) = Σ f^m ∂_m f`.
    pub fn apply(&self, f: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero(&self.table);
        for (m, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let d = f.partial(m);
            if !d.is_zero() {
                out = out.add(&c.mul(&d));
            }
        }
        out
    }

    /// Super bracket `[X, Y] = X∘Y - (-1)^{p(X)p(Y)} Y∘X`, extended bilinearly
    /// over parity parts.
    pub fn bracket(&self, other: &VectorField) -> VectorField {
        assert!(same_table(&self.table, &other.table), "variable table mismatch");
        match (self.parity(), other.parity()) {
            (Some(px), Some(py)) => self.bracket_homogeneous(other, px && py),
            _ => {
                let (xe, xo) = self.parity_parts();
                let (ye, yo) = other.parity_parts();
                let mut out = xe.bracket_homogeneous(&ye, false);
                out = out.add(&xe.bracket_homogeneous(&yo, false));
                out = out.add(&xo.bracket_homogeneous(&ye, false));
                out.add(&xo.bracket_homogeneous(&yo, true))
            }
        }
    }

    fn bracket_homogeneous(&self, other: &VectorField, both_odd: bool) -> VectorField {
        let mut out = VectorField::zero(&self.table);
        for j in 0..self.table.len() {
            let a = self.apply(&other.coeffs[j]);
            let b = other.apply(&self.coeffs[j]);
            out.coeffs[j] = if both_odd { a.add(&b) } else { a.sub(&b) };
        }
        out
    }

    pub fn add(&self, other: &VectorField) -> VectorField {
        VectorField {
            table: self.table.clone(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn sub(&self, other: &VectorField) -> VectorField {
        VectorField {
            table: self.table.clone(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.sub(b)).collect(),
        }
    }

    pub fn neg(&self) -> VectorField {
        VectorField {
            table: self.table.clone(),
            coeffs: self.coeffs.iter().map(|a| a.neg()).collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> VectorField {
        VectorField {
            table: self.table.clone(),
            coeffs: self.coeffs.iter().map(|a| a.scale(c)).collect(),
        }
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, c: &Scalar, other: &VectorField) {
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            a.add_scaled(c, b);
        }
    }

    /// `f X`, multiplying every coefficient on the left.
    pub fn left_mul(&self, f: &Polynomial) -> VectorField {
        VectorField {
            table: self.table.clone(),
            coeffs: self.coeffs.iter().map(|a| f.mul(a)).collect(),
        }
    }

    /// Component of standard degree `p`: coefficients of standard degree `p + 1`.
    pub fn standard_component(&self, p: i64) -> VectorField {
        if p < -1 {
            return VectorField::zero(&self.table);
        }
        VectorField {
            table: self.table.clone(),
            coeffs: self.coeffs.iter().map(|a| a.standard_component((p + 1) as u32)).collect(),
        }
    }

    pub fn max_standard_degree(&self) -> Option<i64> {
        self.coeffs
            .iter()
            .filter_map(|c| c.max_standard_degree())
            .max()
            .map(|d| d as i64 - 1)
    }

    pub fn eval_at_origin(&self) -> Vec<Scalar> {
        self.coeffs.iter().map(|c| c.constant_term()).collect()
    }

    pub fn render(&self) -> String {
        text::render_slots(&self.table, &self.coeffs, false)
    }

    pub fn parse(table: &Arc<VariableTable>, text: &str) -> Result<VectorField, PolyError> {
        parse_field(table, text)
    }
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OneForm {
    table: Arc<VariableTable>,
    coeffs: Vec<Polynomial>,
}

impl OneForm {
    pub fn zero(table: &Arc<VariableTable>) -> OneForm {
        OneForm {
            table: table.clone(),
            coeffs: vec![Polynomial::zero(table); table.len()],
        }
    }

    /// The coordinate differential `dx^i`.
    pub fn differential(table: &Arc<VariableTable>, i: usize) -> OneForm {
        let mut w = OneForm::zero(table);
        w.coeffs[i] = Polynomial::one(table);
        w
    }

    pub fn from_coeffs(table: &Arc<VariableTable>, coeffs: Vec<Polynomial>) -> Result<OneForm, PolyError> {
        if coeffs.len() != table.len() || coeffs.iter().any(|c| !same_table(c.table(), table)) {
            return Err(PolyError::MixedTables);
        }
        Ok(OneForm {
            table: table.clone(),
            coeffs,
        })
    }

    pub fn table(&self) -> &Arc<VariableTable> {
        &self.table
    }

    /// `ω(∂_m)`.
    pub fn coeff(&self, m: usize) -> &Polynomial {
        &self.coeffs[m]
    }

    pub fn coeffs(&self) -> &[Polynomial] {
        &self.coeffs
    }

    pub fn set_coeff(&mut self, m: usize, p: Polynomial) {
        self.coeffs[m] = p;
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Parity `p(A_m) + p_m`, uniform over slots; zero is even.
    pub fn parity(&self) -> Option<bool> {
        let mut found: Option<bool> = None;
        for (m, c) in self.coeffs.iter().enumerate() {
            for (mono, _) in c.terms() {
                let p = mono.parity(&self.table) ^ self.table.is_odd(m);
                match found {
                    None => found = Some(p),
                    Some(q) if q != p => return None,
                    _ => {}
                }
            }
        }
        Some(found.unwrap_or(false))
    }

    /// `ω(X) = Σ f^m A_m`.
    pub fn pair(&self, x: &VectorField) -> Polynomial {
        let mut out = Polynomial::zero(&self.table);
        for (a, f) in self.coeffs.iter().zip(x.coeffs()) {
            if !a.is_zero() && !f.is_zero() {
                out = out.add(&f.mul(a));
            }
        }
        out
    }

    /// `dω(∂_l, ∂_m) = ∂_l A_m - (-1)^{p_l p_m} ∂_m A_l`.
    pub fn exterior_d(&self) -> TwoForm {
        let t = &self.table;
        let mut out = TwoForm::zero(t);
        for l in 0..t.len() {
            for m in l..t.len() {
                let both_odd = t.is_odd(l) && t.is_odd(m);
                let a = self.coeffs[m].partial(l);
                let b = self.coeffs[l].partial(m);
                let v = if both_odd { a.add(&b) } else { a.sub(&b) };
                out.set(l, m, v);
            }
        }
        out
    }

    pub fn add(&self, other: &OneForm) -> OneForm {
        OneForm {
            table: self.table.clone(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn sub(&self, other: &OneForm) -> OneForm {
        OneForm {
            table: self.table.clone(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.sub(b)).collect(),
        }
    }

    pub fn render(&self) -> String {
        text::render_slots(&self.table, &self.coeffs, true)
    }

    pub fn parse(table: &Arc<VariableTable>, text: &str) -> Result<OneForm, PolyError> {
        parse_form(table, text)
    }
}

impl fmt::Display for OneForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// `T_{αβ}(X, Y) = (-1)^{p(α) p(β(Y))} α(X) β(Y)` on coordinate pairs `l <= m`.
///
/// `T` itself is not super-antisymmetric; only combinations such as the wedge
/// (or the diagonal terms of a Maurer–Cartan sum) are, and those are fixed by
/// their values on `l <= m`.
pub fn tensor(alpha: &OneForm, beta: &OneForm) -> TwoForm {
    let t = alpha.table.clone();
    let pa = alpha.parity().expect("form of definite parity");
    let pb = beta.parity().expect("form of definite parity");
    let mut out = TwoForm::zero(&t);
    for l in 0..t.len() {
        if alpha.coeffs[l].is_zero() {
            continue;
        }
        for m in l..t.len() {
            if beta.coeffs[m].is_zero() {
                continue;
            }
            let neg = pa && (pb ^ t.is_odd(m));
            let v = sign(neg, alpha.coeffs[l].mul(&beta.coeffs[m]));
            out.add_at(l, m, &v);
        }
    }
    out
}

/// `α∧β = T_{αβ} - (-1)^{p(α)p(β)} T_{βα}`.
pub fn wedge(alpha: &OneForm, beta: &OneForm) -> TwoForm {
    let pa = alpha.parity().expect("form of definite parity");
    let pb = beta.parity().expect("form of definite parity");
    let a = tensor(alpha, beta);
    let b = tensor(beta, alpha);
    if pa && pb {
        a.add(&b)
    } else {
        a.sub(&b)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoForm {
    table: Arc<VariableTable>,
    slots: BTreeMap<(usize, usize), Polynomial>,
}

impl TwoForm {
    pub fn zero(table: &Arc<VariableTable>) -> TwoForm {
        TwoForm {
            table: table.clone(),
            slots: BTreeMap::new(),
        }
    }

    pub fn table(&self) -> &Arc<VariableTable> {
        &self.table
    }

    /// `Φ(∂_l, ∂_m)` for any order of `l`, `m`.
    pub fn get(&self, l: usize, m: usize) -> Polynomial {
        if l <= m {
            self.slots.get(&(l, m)).cloned().unwrap_or_else(|| Polynomial::zero(&self.table))
        } else {
            let v = self.get(m, l);
            let both_odd = self.table.is_odd(l) && self.table.is_odd(m);
            sign(!both_odd, v)
        }
    }

    fn set(&mut self, l: usize, m: usize, v: Polynomial) {
        debug_assert!(l <= m);
        if v.is_zero() {
            self.slots.remove(&(l, m));
        } else {
            self.slots.insert((l, m), v);
        }
    }

    fn add_at(&mut self, l: usize, m: usize, v: &Polynomial) {
        let cur = self.get(l, m);
        self.set(l, m, cur.add(v));
    }

    pub fn slots(&self) -> impl Iterator<Item = ((usize, usize), &Polynomial)> + '_ {
        self.slots.iter().map(|(k, v)| (*k, v))
    }

    pub fn is_zero(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn add(&self, other: &TwoForm) -> TwoForm {
        let mut out = self.clone();
        for (&(l, m), v) in &other.slots {
            out.add_at(l, m, v);
        }
        out
    }

    pub fn sub(&self, other: &TwoForm) -> TwoForm {
        self.add(&other.scale(&-self.table.field().one()))
    }

    pub fn scale(&self, c: &Scalar) -> TwoForm {
        let mut out = TwoForm::zero(&self.table);
        for (&(l, m), v) in &self.slots {
            out.set(l, m, v.scale(c));
        }
        out
    }

    /// `Φ(X, Y) = Σ f^l (-1)^{p_l p(g^m)} g^m Φ(∂_l, ∂_m)` for `X = Σ f^l ∂_l`,
    /// `Y = Σ g^m ∂_m`; `Y` must have coefficients of definite parity.
    pub fn eval(&self, x: &VectorField, y: &VectorField) -> Polynomial {
        let t = &self.table;
        let mut out = Polynomial::zero(t);
        for l in 0..t.len() {
            let f = x.coeff(l);
            if f.is_zero() {
                continue;
            }
            for m in 0..t.len() {
                let g = y.coeff(m);
                if g.is_zero() {
                    continue;
                }
                let phi = self.get(l, m);
                if phi.is_zero() {
                    continue;
                }
                let pg = g.parity().expect("coefficient of definite parity");
                let term = f.mul(&g.mul(&phi));
                out = out.add(&sign(t.is_odd(l) && pg, term));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::superpoly::table_from;

    fn g2_table() -> Arc<VariableTable> {
        table_from(
            Field::RATIONALS,
            &[("x1", false, 1), ("x2", false, 1), ("x3", false, 2), ("x4", false, 3), ("x5", false, 3)],
        )
        .unwrap()
    }

    #[test]
    fn bracket_of_g2_chart_fields() {
        let t = g2_table();
        let x1 = VectorField::parse(&t, "d1 - x2*d3 - x1*x2*d4 - x2^(2)*d5").unwrap();
        let x2 = VectorField::parse(&t, "d2").unwrap();
        assert_eq!(x1.bracket(&x2).render(), "d3 + x1*d4 + x2*d5");
        let simple = VectorField::parse(&t, "x1*d2").unwrap();
        assert_eq!(VectorField::partial(&t, 0).bracket(&simple).render(), "d2");
    }

    #[test]
    fn pairing_and_origin() {
        let t = g2_table();
        let w3 = OneForm::parse(&t, "dx3 + x2*dx1").unwrap();
        let x3 = VectorField::parse(&t, "d3 + x1*d4 + x2*d5").unwrap();
        assert_eq!(w3.pair(&x3).render(), "1");
        let e = x3.eval_at_origin();
        assert!(e[2].is_one() && e.iter().filter(|c| c.is_zero()).count() == 4);
        assert!(VectorField::parse(&t, "x1*d2").unwrap().eval_at_origin().iter().all(|c| c.is_zero()));
    }

    #[test]
    fn exterior_derivative_matches_structure_constants() {
        let t = g2_table();
        assert!(OneForm::differential(&t, 0).exterior_d().is_zero());
        let w1 = OneForm::differential(&t, 0);
        let w2 = OneForm::differential(&t, 1);
        let w3 = OneForm::parse(&t, "dx3 + x2*dx1").unwrap();
        let lhs = w3.exterior_d();
        let rhs = wedge(&w1, &w2).scale(&Field::RATIONALS.from_i64(-1));
        assert_eq!(lhs, rhs);
        let w5 = OneForm::parse(&t, "dx5 - x2*dx3 - x2^(2)*dx1").unwrap();
        let rhs5 = wedge(&w2, &w3).scale(&Field::RATIONALS.from_i64(-1));
        assert_eq!(w5.exterior_d(), rhs5);
    }

    #[test]
    fn odd_bracket_is_symmetric() {
        let t = table_from(Field::RATIONALS, &[("t", false, 2), ("th1", true, 1)]).unwrap();
        let x = VectorField::parse(&t, "dth1 + th1*dt").unwrap();
        // [X, X] = 2 X^2 = 2 dt
        assert_eq!(x.bracket(&x).render(), "2*dt");
    }

    #[test]
    fn standard_components_sum_back() {
        let t = g2_table();
        let x = VectorField::parse(&t, "d1 - x2*d3 - x1*x2*d4 - x2^(2)*d5").unwrap();
        let mut sum = VectorField::zero(&t);
        for p in -1..=x.max_standard_degree().unwrap() {
            sum = sum.add(&x.standard_component(p));
        }
        assert_eq!(sum, x);
        assert_eq!(x.weighted_degree(), Some(-1));
    }
}
