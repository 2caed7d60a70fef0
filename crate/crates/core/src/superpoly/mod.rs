//! Divided-power polynomial superalgebra in weighted even and odd
//! indeterminates.
//!
//! Even generators multiply by `x^(a) x^(b) = binom(a+b, a) x^(a+b)`; odd
//! generators anticommute and square to zero. Monomials store odd factors in
//! ascending index order.

mod parse;

pub(crate) use parse::split_terms;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::One;
use thiserror::Error;

use crate::scalar::{Field, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("operands use different variable tables")]
    MixedTables,
    #[error("polynomial has no definite parity")]
    IndefiniteParity,
    #[error("invalid variable table: {0}")]
    InvalidTable(String),
    #[error("unknown variable {0:?}")]
    UnknownVariable(String),
    #[error("cannot parse polynomial {text:?}: {reason}")]
    Parse { text: String, reason: String },
    #[error("even variable {0} is not declared a parameter of the Hodge star")]
    NonParameter(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Variable {
    pub name: String,
    pub odd: bool,
    pub weight: u32,
}

/// Indeterminates with names, parities and positive weights over one field.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VariableTable {
    field: Field,
    vars: Vec<Variable>,
}

impl VariableTable {
    pub fn new(field: Field, vars: Vec<Variable>) -> Result<Arc<VariableTable>, PolyError> {
        for (k, v) in vars.iter().enumerate() {
            if v.weight == 0 {
                return Err(PolyError::InvalidTable(format!("variable {} has weight 0", v.name)));
            }
            if !valid_name(&v.name) {
                return Err(PolyError::InvalidTable(format!("bad variable name {:?}", v.name)));
            }
            if vars[..k].iter().any(|w| w.name == v.name) {
                return Err(PolyError::InvalidTable(format!("duplicate name {}", v.name)));
            }
        }
        Ok(Arc::new(VariableTable { field, vars }))
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn var(&self, i: usize) -> &Variable {
        &self.vars[i]
    }

    pub fn vars(&self) -> &[Variable] {
        &self.vars
    }

    pub fn is_odd(&self, i: usize) -> bool {
        self.vars[i].odd
    }

    pub fn weight(&self, i: usize) -> u32 {
        self.vars[i].weight
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v.name == name)
    }

    pub fn name(&self, i: usize) -> &str {
        &self.vars[i].name
    }

    /// All monomials of weighted degree `w` in the variables admitted by `allow`,
    /// in ascending monomial order.
    pub fn monomials_of_weight(&self, w: u32, allow: impl Fn(usize) -> bool) -> Vec<Monomial> {
        let admitted: Vec<usize> = (0..self.len()).filter(|&i| allow(i)).collect();
        let mut out = Vec::new();
        let mut exps = vec![0u32; self.len()];
        self.enumerate(&admitted, 0, w, &mut exps, &mut out);
        for m in &mut out {
            m.wdeg = w;
        }
        out.sort();
        out
    }

    fn enumerate(&self, admitted: &[usize], pos: usize, left: u32, exps: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if left == 0 {
            out.push(Monomial {
                wdeg: 0,
                exps: exps.clone(),
            });
            return;
        }
        if pos == admitted.len() {
            return;
        }
        let i = admitted[pos];
        let s = self.vars[i].weight;
        let max = if self.vars[i].odd { 1 } else { left / s };
        for k in 0..=max.min(left / s) {
            exps[i] = k;
            self.enumerate(admitted, pos + 1, left - k * s, exps, out);
        }
        exps[i] = 0;
    }
}

fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() && c != 'd' => {}
        _ => return false,
    }
    name != "i" && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Divided-power monomial. The weighted degree is stored first so the derived
/// order is graded, then lexicographic on exponents.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    wdeg: u32,
    exps: Vec<u32>,
}

impl Monomial {
    pub fn one(table: &VariableTable) -> Monomial {
        Monomial {
            wdeg: 0,
            exps: vec![0; table.len()],
        }
    }

    pub fn from_exponents(table: &VariableTable, exps: Vec<u32>) -> Result<Monomial, PolyError> {
        if exps.len() != table.len() {
            return Err(PolyError::InvalidTable("exponent vector length".into()));
        }
        if exps.iter().enumerate().any(|(i, &e)| table.is_odd(i) && e > 1) {
            return Err(PolyError::InvalidTable("odd exponent above 1".into()));
        }
        let wdeg = exps.iter().enumerate().map(|(i, e)| e * table.weight(i)).sum();
        Ok(Monomial { wdeg, exps })
    }

    pub fn var(table: &VariableTable, i: usize) -> Monomial {
        let mut m = Monomial::one(table);
        m.exps[i] = 1;
        m.wdeg = table.weight(i);
        m
    }

    pub fn weighted_degree(&self) -> u32 {
        self.wdeg
    }

    pub fn standard_degree(&self) -> u32 {
        self.exps.iter().sum()
    }

    pub fn exponent(&self, i: usize) -> u32 {
        self.exps[i]
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exps
    }

    pub fn is_one(&self) -> bool {
        self.wdeg == 0 && self.exps.iter().all(|&e| e == 0)
    }

    pub fn parity(&self, table: &VariableTable) -> bool {
        self.exps
            .iter()
            .enumerate()
            .filter(|(i, &e)| e == 1 && table.is_odd(*i))
            .count()
            % 2
            == 1
    }

    /// Smallest variable index with a positive exponent.
    pub fn first_var(&self) -> Option<usize> {
        self.exps.iter().position(|&e| e > 0)
    }

    /// The monomial with one fewer factor of variable `i`.
    pub fn lowered(&self, table: &VariableTable, i: usize) -> Option<Monomial> {
        if self.exps[i] == 0 {
            return None;
        }
        let mut m = self.clone();
        m.exps[i] -= 1;
        m.wdeg -= table.weight(i);
        Some(m)
    }

    /// The monomial with one more factor of variable `i` (divided-power step).
    pub fn raised(&self, table: &VariableTable, i: usize) -> Option<Monomial> {
        if table.is_odd(i) && self.exps[i] == 1 {
            return None;
        }
        let mut m = self.clone();
        m.exps[i] += 1;
        m.wdeg += table.weight(i);
        Some(m)
    }

    /// Number of odd factors with index below `i`.
    fn odd_before(&self, table: &VariableTable, i: usize) -> usize {
        (0..i).filter(|&j| table.is_odd(j) && self.exps[j] == 1).count()
    }

    /// Product of two monomials: the resulting monomial and its coefficient,
    /// or `None` when an odd variable repeats.
    pub fn mul(&self, other: &Monomial, table: &VariableTable) -> Option<(Monomial, Scalar)> {
        let field = table.field();
        let mut coeff = field.one();
        let mut exps = Vec::with_capacity(self.exps.len());
        let mut swaps = 0usize;
        let mut odd_in_other_seen = 0usize;
        // walking indices downward: each odd factor of self must pass the odd
        // factors of other with smaller index
        let odd_other_total: usize = (0..self.exps.len())
            .filter(|&j| table.is_odd(j) && other.exps[j] == 1)
            .count();
        for i in 0..self.exps.len() {
            let (a, b) = (self.exps[i], other.exps[i]);
            if table.is_odd(i) {
                if a == 1 && b == 1 {
                    return None;
                }
                if a == 1 {
                    swaps += odd_in_other_seen;
                }
                if b == 1 {
                    odd_in_other_seen += 1;
                }
                exps.push(a + b);
            } else {
                if a > 0 && b > 0 {
                    coeff = &coeff * &field.from_bigint(&binomial(a + b, a));
                    if coeff.is_zero() {
                        return None;
                    }
                }
                exps.push(a + b);
            }
        }
        debug_assert_eq!(odd_in_other_seen, odd_other_total);
        if swaps % 2 == 1 {
            coeff = -coeff;
        }
        Some((
            Monomial {
                wdeg: self.wdeg + other.wdeg,
                exps,
            },
            coeff,
        ))
    }

    pub fn render(&self, table: &VariableTable) -> String {
        let mut parts = Vec::new();
        for (i, &e) in self.exps.iter().enumerate() {
            match e {
                0 => {}
                1 => parts.push(table.name(i).to_string()),
                k => parts.push(format!("{}^({k})", table.name(i))),
            }
        }
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }
}

fn binomial(n: u32, k: u32) -> BigInt {
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for j in 0..k {
        acc = acc * BigInt::from(n - j) / BigInt::from(j + 1);
    }
    acc
}

/// A polynomial over one variable table; no zero coefficients are stored.
#[derive(Debug, Clone)]
pub struct Polynomial {
    table: Arc<VariableTable>,
    terms: BTreeMap<Monomial, Scalar>,
}

impl PartialEq for Polynomial {
    fn eq(&self, other: &Polynomial) -> bool {
        same_table(&self.table, &other.table) && self.terms == other.terms
    }
}

impl Eq for Polynomial {}

pub(crate) fn same_table(a: &Arc<VariableTable>, b: &Arc<VariableTable>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl Polynomial {
    pub fn zero(table: &Arc<VariableTable>) -> Polynomial {
        Polynomial {
            table: table.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(table: &Arc<VariableTable>, c: Scalar) -> Polynomial {
        Polynomial::term(table, Monomial::one(table), c)
    }

    pub fn one(table: &Arc<VariableTable>) -> Polynomial {
        Polynomial::constant(table, table.field().one())
    }

    pub fn var(table: &Arc<VariableTable>, i: usize) -> Polynomial {
        Polynomial::term(table, Monomial::var(table, i), table.field().one())
    }

    pub fn term(table: &Arc<VariableTable>, m: Monomial, c: Scalar) -> Polynomial {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Polynomial {
            table: table.clone(),
            terms,
        }
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Scalar)>>(table: &Arc<VariableTable>, it: I) -> Polynomial {
        let mut p = Polynomial::zero(table);
        for (m, c) in it {
            p.add_term(m, &c);
        }
        p
    }

    pub fn table(&self) -> &Arc<VariableTable> {
        &self.table
    }

    pub fn field(&self) -> Field {
        self.table.field()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> + '_ {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_else(|| self.field().zero())
    }

    pub fn add_term(&mut self, m: Monomial, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c.clone());
            }
        }
    }

    pub fn constant_term(&self) -> Scalar {
        self.coeff(&Monomial::one(&self.table))
    }

    /// Definite parity; the zero polynomial is reported even.
    pub fn parity(&self) -> Option<bool> {
        let mut it = self.terms.keys().map(|m| m.parity(&self.table));
        match it.next() {
            None => Some(false),
            Some(p) => it.all(|q| q == p).then_some(p),
        }
    }

    pub fn weighted_degree(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(|m| m.wdeg);
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    pub fn weighted_component(&self, w: u32) -> Polynomial {
        self.filter(|m| m.wdeg == w)
    }

    pub fn standard_component(&self, p: u32) -> Polynomial {
        self.filter(|m| m.standard_degree() == p)
    }

    pub fn max_standard_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.standard_degree()).max()
    }

    pub fn filter(&self, keep: impl Fn(&Monomial) -> bool) -> Polynomial {
        Polynomial {
            table: self.table.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| keep(m))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn try_add(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.try_add(&other.neg())
    }

    pub fn try_mul(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check(other)?;
        let mut out = Polynomial::zero(&self.table);
        for (m, c) in &self.terms {
            for (n, d) in &other.terms {
                if let Some((mn, k)) = m.mul(n, &self.table) {
                    out.add_term(mn, &(&(c * d) * &k));
                }
            }
        }
        Ok(out)
    }

    fn check(&self, other: &Polynomial) -> Result<(), PolyError> {
        if same_table(&self.table, &other.table) {
            Ok(())
        } else {
            Err(PolyError::MixedTables)
        }
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        self.try_add(other).expect("variable table mismatch")
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.try_sub(other).expect("variable table mismatch")
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        self.try_mul(other).expect("variable table mismatch")
    }

    pub fn neg(&self) -> Polynomial {
        Polynomial {
            table: self.table.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(&self.table);
        }
        Polynomial {
            table: self.table.clone(),
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, c: &Scalar, other: &Polynomial) {
        if c.is_zero() {
            return;
        }
        for (m, v) in &other.terms {
            self.add_term(m.clone(), &(v * c));
        }
    }

    /// Partial derivative in variable `i`; divided powers drop by one and odd
    /// variables are reached by anticommuting past earlier odd factors.
    pub fn partial(&self, i: usize) -> Polynomial {
        let t = &self.table;
        let mut out = Polynomial::zero(t);
        for (m, c) in &self.terms {
            if let Some(lower) = m.lowered(t, i) {
                if t.is_odd(i) && m.odd_before(t, i) % 2 == 1 {
                    out.add_term(lower, &-c);
                } else {
                    out.add_term(lower, c);
                }
            }
        }
        out
    }

    /// `(-1)^{p(f) p(i)} ∂_i f`.
    pub fn nabla(&self, i: usize) -> Result<Polynomial, PolyError> {
        let p = self.parity().ok_or(PolyError::IndefiniteParity)?;
        let d = self.partial(i);
        Ok(if p && self.table.is_odd(i) { d.neg() } else { d })
    }

    /// The parity operator: odd monomials change sign.
    pub fn parity_op(&self) -> Polynomial {
        Polynomial {
            table: self.table.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let c = if m.parity(&self.table) { -c } else { c.clone() };
                    (m.clone(), c)
                })
                .collect(),
        }
    }

    /// Odd Fourier transform `f*(η) = ∫ exp(Σ η_i ξ_i) f(ξ) vol(ξ)` with
    /// `∫ ξ_1⋯ξ_N = 1`, i.e. `θ_I -> (−1)^{m(m−1)/2} sgn(I^c, I) θ_{I^c}` where
    /// `m = |I^c|`. Every even variable must be listed in `parameters`.
    pub fn hodge_star(&self, parameters: &[usize]) -> Result<Polynomial, PolyError> {
        let t = &self.table;
        for i in 0..t.len() {
            if !t.is_odd(i) && !parameters.contains(&i) {
                return Err(PolyError::NonParameter(t.name(i).to_string()));
            }
        }
        let odd: Vec<usize> = (0..t.len()).filter(|&i| t.is_odd(i)).collect();
        let mut out = Polynomial::zero(t);
        for (m, c) in &self.terms {
            let mut exps = m.exps.clone();
            // sign of the shuffle (I^c, I): pairs j in I^c, i in I with i < j
            let mut inversions = 0usize;
            let mut chosen_seen = 0usize;
            let mut size = 0usize;
            for &i in &odd {
                if m.exps[i] == 1 {
                    chosen_seen += 1;
                    exps[i] = 0;
                } else {
                    inversions += chosen_seen;
                    size += 1;
                    exps[i] = 1;
                }
            }
            // reordering the pairs η_j ξ_j into η_{I^c} ξ_{I^c}
            inversions += size * size.saturating_sub(1) / 2;
            let image = Monomial::from_exponents(t, exps).expect("odd exponents stay within 0..=1");
            let c = if inversions % 2 == 1 { -c } else { c.clone() };
            out.add_term(image, &c);
        }
        Ok(out)
    }

    /// Exact parse of the text grammar (`x1^(3)`, `th1*th2`, `-1/2*t`, `x^2`).
    pub fn parse(table: &Arc<VariableTable>, text: &str) -> Result<Polynomial, PolyError> {
        parse::parse_polynomial(table, text)
    }

    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        // within one degree, earlier variables first
        let mut ordered: Vec<_> = self.terms.iter().collect();
        ordered.sort_by(|a, b| a.0.wdeg.cmp(&b.0.wdeg).then_with(|| b.0.exps.cmp(&a.0.exps)));
        for (k, (m, c)) in ordered.into_iter().enumerate() {
            let (neg, prefix) = c.coefficient_prefix();
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let body = m.render(&self.table);
            match (prefix, m.is_one()) {
                (None, true) => out.push('1'),
                (None, false) => out.push_str(&body),
                (Some(p), true) => out.push_str(&p),
                (Some(p), false) => {
                    out.push_str(&p);
                    out.push('*');
                    out.push_str(&body);
                }
            }
        }
        out
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Builds a table from `(name, odd, weight)` triples.
pub fn table_from(field: Field, vars: &[(&str, bool, u32)]) -> Result<Arc<VariableTable>, PolyError> {
    VariableTable::new(
        field,
        vars.iter()
            .map(|(n, o, w)| Variable {
                name: n.to_string(),
                odd: *o,
                weight: *w,
            })
            .collect(),
    )
}
