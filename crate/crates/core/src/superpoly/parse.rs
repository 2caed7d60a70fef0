use std::sync::Arc;

use super::{Monomial, PolyError, Polynomial, VariableTable};
use crate::scalar::Scalar;

pub(super) fn parse_polynomial(table: &Arc<VariableTable>, text: &str) -> Result<Polynomial, PolyError> {
    let err = |reason: &str| PolyError::Parse {
        text: text.to_string(),
        reason: reason.to_string(),
    };
    let cleaned: String = text
        .chars()
        .map(|c| if c == '\u{2212}' { '-' } else { c })
        .filter(|c| !c.is_whitespace())
        .collect();
    if cleaned.is_empty() {
        return Err(err("empty input"));
    }
    let mut out = Polynomial::zero(table);
    for (neg, term) in split_terms(&cleaned).map_err(|r| err(&r))? {
        let mut poly = Polynomial::one(table);
        for factor in term.split('*') {
            if factor.is_empty() {
                return Err(err("empty factor"));
            }
            let f = parse_factor(table, factor).map_err(|r| err(&r))?;
            poly = poly.mul(&f);
        }
        if neg {
            poly = poly.neg();
        }
        out = out.add(&poly);
    }
    Ok(out)
}

/// Splits at top-level `+`/`-`, keeping parenthesized scalars intact.
pub(crate) fn split_terms(s: &str) -> Result<Vec<(bool, String)>, String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    let mut neg = false;
    for ch in s.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        if depth < 0 {
            return Err("unbalanced parentheses".into());
        }
        if depth == 0 && (ch == '+' || ch == '-') && !cur.ends_with(['^', '/', '*']) {
            if cur.is_empty() {
                neg ^= ch == '-';
            } else {
                out.push((neg, std::mem::take(&mut cur)));
                neg = ch == '-';
            }
        } else {
            cur.push(ch);
        }
    }
    if depth != 0 {
        return Err("unbalanced parentheses".into());
    }
    if cur.is_empty() {
        return Err("dangling sign".into());
    }
    out.push((neg, cur));
    Ok(out)
}

fn parse_factor(table: &Arc<VariableTable>, factor: &str) -> Result<Polynomial, String> {
    let field = table.field();
    let first = factor.chars().next().unwrap();
    let is_scalar = first.is_ascii_digit()
        || first == '('
        || factor == "i"
        || factor.starts_with("i/");
    if is_scalar {
        let inner = factor
            .strip_prefix('(')
            .and_then(|f| f.strip_suffix(')'))
            .unwrap_or(factor);
        let c: Scalar = field.parse(inner).map_err(|e| e.to_string())?;
        return Ok(Polynomial::constant(table, c));
    }
    let (name, power) = match factor.split_once('^') {
        Some((n, p)) => (n, Some(p)),
        None => (factor, None),
    };
    let i = table
        .index_of(name)
        .ok_or_else(|| format!("unknown variable {name:?}"))?;
    let x = Polynomial::var(table, i);
    match power {
        None => Ok(x),
        Some(p) => {
            if let Some(k) = p.strip_prefix('(').and_then(|q| q.strip_suffix(')')) {
                let k: u32 = k.parse().map_err(|_| format!("bad divided power {p:?}"))?;
                if table.is_odd(i) && k > 1 {
                    return Ok(Polynomial::zero(table));
                }
                let mut exps = vec![0; table.len()];
                exps[i] = k;
                let m = Monomial::from_exponents(table, exps).map_err(|e| e.to_string())?;
                Ok(Polynomial::term(table, m, field.one()))
            } else {
                // ordinary power x^k = k! x^(k)
                let k: u32 = p.parse().map_err(|_| format!("bad exponent {p:?}"))?;
                let mut acc = Polynomial::one(table);
                for _ in 0..k {
                    acc = acc.mul(&x);
                }
                Ok(acc)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::table_from;
    use super::*;
    use crate::scalar::Field;

    #[test]
    fn round_trip() {
        let t = table_from(
            Field::GAUSSIAN,
            &[("x1", false, 1), ("x2", false, 1), ("th1", true, 1), ("th2", true, 1)],
        )
        .unwrap();
        for s in [
            "x1^(3)",
            "th1*th2",
            "-1/2*x1 + x2^(2)",
            "1 - x1*x2",
            "(1+i)*th1 - i*th2",
            "3",
            "0",
        ] {
            let p = Polynomial::parse(&t, s).unwrap();
            assert_eq!(Polynomial::parse(&t, &p.render()).unwrap(), p, "{s}");
        }
        assert_eq!(Polynomial::parse(&t, "x1^3").unwrap().render(), "6*x1^(3)");
        assert_eq!(Polynomial::parse(&t, "th2*th1").unwrap().render(), "-th1*th2");
        assert_eq!(Polynomial::parse(&t, "x1 − x2").unwrap().render(), "x1 - x2");
    }

    #[test]
    fn parse_errors() {
        let t = table_from(Field::RATIONALS, &[("x1", false, 1)]).unwrap();
        assert!(Polynomial::parse(&t, "y").is_err());
        assert!(Polynomial::parse(&t, "x1 +").is_err());
        assert!(Polynomial::parse(&t, "(1").is_err());
        assert!(Polynomial::parse(&t, "x1**x1").is_err());
    }
}
