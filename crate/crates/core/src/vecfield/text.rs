//! Text form of fields (`d3 + x1*d4`) and 1-forms (`dx3 + x2*dx1`).

use std::sync::Arc;

use super::{OneForm, VectorField};
use crate::superpoly::{split_terms, PolyError, Polynomial, VariableTable};

/// `d3` for a variable named `x3`, otherwise `d` followed by the name.
pub fn slot_label(table: &VariableTable, m: usize) -> String {
    let name = table.name(m);
    match name.strip_prefix('x') {
        Some(rest) if !rest.is_empty() && rest.chars().all(|c| c.is_ascii_digit()) => format!("d{rest}"),
        _ => format!("d{name}"),
    }
}

/// Fields list slots in ascending order, forms in descending order.
pub(super) fn render_slots(table: &VariableTable, coeffs: &[Polynomial], form: bool) -> String {
    let mut order: Vec<usize> = (0..coeffs.len()).collect();
    if form {
        order.reverse();
    }
    let mut out = String::new();
    for m in order {
        let c = &coeffs[m];
        if c.is_zero() {
            continue;
        }
        let label = if form {
            format!("d{}", table.name(m))
        } else {
            slot_label(table, m)
        };
        let (neg, body) = if c.len() == 1 {
            let r = c.render();
            match r.strip_prefix('-') {
                Some(rest) => (true, rest.to_string()),
                None => (false, r),
            }
        } else {
            (false, format!("({})", c.render()))
        };
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        if body == "1" {
            out.push_str(&label);
        } else {
            out.push_str(&body);
            out.push('*');
            out.push_str(&label);
        }
    }
    if out.is_empty() {
        "0".to_string()
    } else {
        out
    }
}

pub fn parse_field(table: &Arc<VariableTable>, text: &str) -> Result<VectorField, PolyError> {
    let coeffs = parse_slots(table, text)?;
    VectorField::from_coeffs(table, coeffs)
}

pub fn parse_form(table: &Arc<VariableTable>, text: &str) -> Result<OneForm, PolyError> {
    let coeffs = parse_slots(table, text)?;
    OneForm::from_coeffs(table, coeffs)
}

fn parse_slots(table: &Arc<VariableTable>, text: &str) -> Result<Vec<Polynomial>, PolyError> {
    let err = |reason: String| PolyError::Parse {
        text: text.to_string(),
        reason,
    };
    let cleaned: String = text
        .chars()
        .map(|c| if c == '\u{2212}' { '-' } else { c })
        .filter(|c| !c.is_whitespace())
        .collect();
    let mut coeffs = vec![Polynomial::zero(table); table.len()];
    if cleaned == "0" {
        return Ok(coeffs);
    }
    for (neg, term) in split_terms(&cleaned).map_err(err)? {
        let factors = split_top_level(&term, '*');
        let (last, rest) = factors.split_last().expect("split yields at least one piece");
        let slot = derivation_index(table, last).ok_or_else(|| err(format!("term {term:?} lacks a d-slot")))?;
        let mut c = Polynomial::one(table);
        for f in rest {
            let inner = f.strip_prefix('(').and_then(|g| g.strip_suffix(')')).unwrap_or(f);
            c = c.mul(&Polynomial::parse(table, inner)?);
        }
        if neg {
            c = c.neg();
        }
        coeffs[slot] = coeffs[slot].add(&c);
    }
    Ok(coeffs)
}

fn split_top_level(s: &str, sep: char) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        if ch == sep && depth == 0 {
            out.push(std::mem::take(&mut cur));
        } else {
            cur.push(ch);
        }
    }
    out.push(cur);
    out
}

fn derivation_index(table: &VariableTable, token: &str) -> Option<usize> {
    let rest = token.strip_prefix('d')?;
    if !rest.is_empty() && rest.chars().all(|c| c.is_ascii_digit()) {
        if let Some(i) = table.index_of(&format!("x{rest}")) {
            return Some(i);
        }
    }
    table.index_of(rest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Field;
    use crate::superpoly::table_from;

    #[test]
    fn field_and_form_round_trip() {
        let t = table_from(
            Field::RATIONALS,
            &[("x1", false, 1), ("x2", false, 1), ("t", false, 2), ("th1", true, 1)],
        )
        .unwrap();
        for s in ["d1 - x2*d2 + (x1 + x2)*dt", "-2*x1^(3)*d2", "th1*dt + dth1", "0"] {
            let x = parse_field(&t, s).unwrap();
            assert_eq!(parse_field(&t, &x.render()).unwrap(), x, "{s}");
        }
        let w = parse_form(&t, "dt - x1*dx2 + x2*dx1").unwrap();
        assert_eq!(w.render(), "dt - x1*dx2 + x2*dx1");
        assert_eq!(parse_form(&t, &w.render()).unwrap(), w);
        assert!(parse_field(&t, "x1").is_err());
    }
}
