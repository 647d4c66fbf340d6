//! Plain-text constraint systems.
//!
//! ```text
//! # comment
//! vars: R1 R2 Ru0
//! R1 - Ru0 <= 0
//! Ru0 <= I(U0;Y1) + 1/2*C1 - 0.25
//! ```
//!
//! A term is `[sign] [q*] Name` or a bare number `q`, with `q` an integer,
//! `p/q`, or a decimal. Signs may be attached or stand alone. Names on the
//! left are rate variables, names on the right are atoms. Without a `vars:`
//! line, variables are declared in order of first appearance.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_traits::{One, Signed, Zero};

use super::{rat, AffineExpr, ConstraintSystem, LinearConstraint, PolytopeError, Rational};

fn err(line: usize, column: usize, message: impl Into<String>) -> PolytopeError {
    PolytopeError::Parse { line, column, message: message.into() }
}

/// Parses `12`, `-3/4`, `0.125` exactly.
fn parse_rational(s: &str) -> Option<Rational> {
    if let Some((p, q)) = s.split_once('/') {
        let (p, q): (i64, i64) = (p.parse().ok()?, q.parse().ok()?);
        return (q != 0).then(|| Rational::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) || frac.len() > 15 {
            return None;
        }
        let neg = int.starts_with('-');
        let int = int.trim_start_matches(['-', '+']);
        if !int.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let whole: i64 = if int.is_empty() { 0 } else { int.parse().ok()? };
        let den = 10i64.checked_pow(frac.len() as u32)?;
        let num = whole.checked_mul(den)?.checked_add(frac.parse::<i64>().ok()?)?;
        return Some(Rational::new(if neg { -num } else { num }, den));
    }
    s.parse::<i64>().ok().map(rat)
}

fn is_name_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

/// One side of a constraint: named terms plus a constant.
type Side = (Vec<(String, Rational)>, Rational);

fn parse_side(text: &str, line: usize, offset: usize) -> Result<Side, PolytopeError> {
    let mut terms = Vec::new();
    let mut constant = Rational::zero();
    let mut pending_sign: Option<(Rational, usize)> = None;
    let mut saw_any = false;
    let mut idx = 0;
    let bytes = text.as_bytes();
    while idx < bytes.len() {
        if bytes[idx].is_ascii_whitespace() {
            idx += 1;
            continue;
        }
        let start = idx;
        while idx < bytes.len() && !bytes[idx].is_ascii_whitespace() {
            idx += 1;
        }
        let tok = &text[start..idx];
        let col = offset + start + 1;
        if tok == "+" || tok == "-" {
            if pending_sign.is_some() {
                return Err(err(line, col, "two consecutive signs"));
            }
            pending_sign = Some((if tok == "-" { rat(-1) } else { rat(1) }, col));
            continue;
        }
        let (mut sign, body) = match tok.as_bytes()[0] {
            b'+' => (rat(1), &tok[1..]),
            b'-' => (rat(-1), &tok[1..]),
            _ => (rat(1), tok),
        };
        if let Some((s, _)) = pending_sign.take() {
            if body.len() != tok.len() {
                return Err(err(line, col, "two consecutive signs"));
            }
            sign = s;
        } else if saw_any && body.len() == tok.len() {
            return Err(err(line, col, format!("missing `+` or `-` before `{tok}`")));
        }
        saw_any = true;
        let body_col = col + (tok.len() - body.len());
        if body.is_empty() {
            return Err(err(line, col, "sign without a term"));
        }
        let (coef, name) = match body.split_once('*') {
            Some((q, name)) => {
                let q = parse_rational(q).ok_or_else(|| err(line, body_col, format!("bad coefficient `{q}`")))?;
                (q, Some(name))
            }
            None if body.starts_with(is_name_start) => (rat(1), Some(body)),
            None => {
                let q = parse_rational(body).ok_or_else(|| err(line, body_col, format!("bad term `{body}`")))?;
                (q, None)
            }
        };
        match name {
            Some(name) => {
                if !name.starts_with(is_name_start) {
                    let name_col = body_col + body.len() - name.len();
                    return Err(err(line, name_col, format!("bad name `{name}`")));
                }
                terms.push((name.to_string(), sign * coef));
            }
            None => constant += sign * coef,
        }
    }
    if let Some((_, col)) = pending_sign {
        return Err(err(line, col, "sign without a term"));
    }
    if !saw_any {
        return Err(err(line, offset + 1, "empty side"));
    }
    Ok((terms, constant))
}

/// Parses the text format.
pub fn parse_system(text: &str) -> Result<ConstraintSystem, PolytopeError> {
    let mut declared: Option<Vec<String>> = None;
    let mut seen: Vec<String> = Vec::new();
    let mut parsed: Vec<(usize, LinearConstraint)> = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        if let Some(rest) = content.trim_start().strip_prefix("vars:") {
            if declared.is_some() {
                return Err(err(line, 1, "duplicate `vars:` line"));
            }
            let rest_col = raw.len() - raw.trim_start().len() + "vars:".len();
            let mut vars = Vec::new();
            let mut pos = 0;
            for tok in rest.split_whitespace() {
                let at = rest[pos..].find(tok).map(|i| i + pos).unwrap_or(pos);
                pos = at + tok.len();
                if !tok.starts_with(is_name_start) {
                    return Err(err(line, rest_col + at + 1, format!("bad variable name `{tok}`")));
                }
                vars.push(tok.to_string());
            }
            declared = Some(vars);
            continue;
        }
        let Some(le) = content.find("<=") else {
            return Err(err(line, 1, "expected `<=`"));
        };
        if content[le + 2..].contains("<=") {
            return Err(err(line, le + 3 + content[le + 2..].find("<=").unwrap_or(0), "second `<=`"));
        }
        let (lhs, lconst) = parse_side(&content[..le], line, 0)?;
        let (rhs, rconst) = parse_side(&content[le + 2..], line, le + 2)?;
        for (v, _) in &lhs {
            if !seen.contains(v) {
                seen.push(v.clone());
            }
        }
        let mut expr = AffineExpr::constant(rconst - lconst);
        for (a, c) in rhs {
            expr = expr.with_term(a, c);
        }
        parsed.push((line, LinearConstraint::new(lhs, expr)));
    }
    let vars = match declared {
        Some(v) => v,
        None => seen,
    };
    let mut system = ConstraintSystem::new(vars);
    for (line, c) in parsed {
        system.push(c).map_err(|e| match e {
            PolytopeError::UnknownVariable(v) => err(line, 1, format!("variable `{v}` not in `vars:`")),
            other => other,
        })?;
    }
    Ok(system)
}

fn fmt_coef(c: &Rational) -> String {
    if c.is_integer() {
        c.to_integer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

fn write_terms<'a, I>(out: &mut String, terms: I, constant: Rational)
where
    I: IntoIterator<Item = (&'a str, &'a Rational)>,
{
    let mut first = true;
    let mut emit = |out: &mut String, c: Rational, name: Option<&str>| {
        let neg = c.is_negative();
        let mag = c.abs();
        match (first, neg) {
            (true, true) => out.push('-'),
            (true, false) => {}
            (false, true) => out.push_str(" - "),
            (false, false) => out.push_str(" + "),
        }
        first = false;
        match name {
            Some(n) if mag.is_one() => out.push_str(n),
            Some(n) => {
                let _ = write!(out, "{}*{}", fmt_coef(&mag), n);
            }
            None => out.push_str(&fmt_coef(&mag)),
        }
    };
    for (name, c) in terms {
        emit(out, *c, Some(name));
    }
    if !constant.is_zero() {
        emit(out, constant, None);
    }
    if first {
        out.push('0');
    }
}

/// Prints one right-hand side, e.g. `C1 + 1/2*I(U0;Y1) - 3`.
pub fn format_expr(expr: &AffineExpr) -> String {
    let mut out = String::new();
    write_terms(&mut out, expr.terms(), expr.constant_term());
    out
}

/// Prints a system in the text format; parsing the output yields an equal system.
pub fn format_system(system: &ConstraintSystem) -> String {
    let mut out = String::new();
    out.push_str("vars:");
    for v in system.variables() {
        out.push(' ');
        out.push_str(v);
    }
    out.push('\n');
    let order: BTreeMap<&str, usize> =
        system.variables().iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
    for c in system.constraints() {
        let mut lhs: Vec<(&str, &Rational)> = c.lhs().collect();
        lhs.sort_by_key(|(v, _)| order.get(v).copied().unwrap_or(usize::MAX));
        write_terms(&mut out, lhs, Rational::zero());
        out.push_str(" <= ");
        write_terms(&mut out, c.rhs().terms(), c.rhs().constant_term());
        out.push('\n');
    }
    out
}
