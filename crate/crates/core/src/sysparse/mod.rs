//! The plain-text system format.
//!
//! ```text
//! # comments run to end of line
//! vars x y
//! field sqrt(2)          # optional
//! dx/dt = x*y
//! dy/dt = y^2 - x - 1
//! manifold y - x - 1     # zero or more
//! ic 1 1                 # zero or more; floats allowed
//! horizon 3
//! rtol 1e-10
//! atol 1e-12
//! ```

mod lexer;
mod parser;

use std::fmt;

use crate::algebra::coeff::squarefree_part;
use crate::algebra::poly::{format_poly, TermOrder};
use crate::algebra::{vars_from, Coefficient, Field, Polynomial, RationalFunction, Vars, VectorField};

pub use lexer::{lex_line, Tok, Token};
use parser::{parse_number, ExprParser};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, col: usize, message: String) -> Self {
        ParseError { line, col, message }
    }
}

/// Initial condition; `exact` is present when every entry was an integer or
/// rational literal.
#[derive(Clone, Debug, PartialEq)]
pub struct InitialCondition {
    pub exact: Option<Vec<Coefficient>>,
    pub values: Vec<f64>,
}

impl InitialCondition {
    pub fn from_f64(values: &[f64]) -> Self {
        InitialCondition { exact: None, values: values.to_vec() }
    }

    pub fn from_exact(values: Vec<Coefficient>) -> Self {
        let f = values.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect();
        InitialCondition { exact: Some(values), values: f }
    }
}

impl fmt::Display for InitialCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = match &self.exact {
            Some(e) => e.iter().map(|c| c.to_string()).collect(),
            None => self.values.iter().map(|v| format!("{v}")).collect(),
        };
        f.write_str(&parts.join(" "))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SystemSpec {
    pub vars: Vars,
    pub field: Field,
    pub field_line: Option<usize>,
    pub field_decl: Option<i64>,
    pub vector_field: VectorField,
    pub manifolds: Vec<Polynomial>,
    pub ics: Vec<InitialCondition>,
    pub horizon: Option<f64>,
    pub rtol: Option<f64>,
    pub atol: Option<f64>,
}

impl SystemSpec {
    pub fn dim(&self) -> usize {
        self.vars.len()
    }
}

fn end_of(line_no: usize, text: &str) -> (usize, usize) {
    (line_no, text.chars().count() + 1)
}

/// Parse a polynomial expression over `vars`, e.g. for a command-line argument.
pub fn parse_polynomial(text: &str, vars: &Vars, field: Option<i64>) -> Result<Polynomial, ParseError> {
    let toks = lex_line(text, 1)?;
    ExprParser::new(&toks, vars, field, end_of(1, text)).parse_all()
}

/// Parse a comma- or space-separated list of numbers, e.g. `1,1` or `0.5 -2`.
pub fn parse_numbers(text: &str) -> Result<InitialCondition, ParseError> {
    let toks = lex_line(text, 1)?;
    numbers_from(&toks, end_of(1, text))
}

fn numbers_from(toks: &[Token], end: (usize, usize)) -> Result<InitialCondition, ParseError> {
    let mut exact = Some(Vec::new());
    let mut values = Vec::new();
    let mut i = 0;
    while i < toks.len() {
        let (c, v, used) = parse_number(&toks[i..], end)?;
        match (c, exact.as_mut()) {
            (Some(c), Some(list)) => list.push(c),
            _ => exact = None,
        }
        values.push(v);
        i += used;
        if let Some(Token { tok: Tok::Comma, .. }) = toks.get(i) {
            i += 1;
            if i == toks.len() {
                return Err(ParseError::new(end.0, end.1, "expected a number after `,`".into()));
            }
        }
    }
    Ok(InitialCondition { exact, values })
}

fn single_float(toks: &[Token], end: (usize, usize), what: &str) -> Result<f64, ParseError> {
    let (_, v, used) = parse_number(toks, end)?;
    if let Some(t) = toks.get(used) {
        return Err(ParseError::new(t.line, t.col, format!("unexpected {} after {what} value", t.tok.describe())));
    }
    Ok(v)
}

pub fn parse_system(text: &str) -> Result<SystemSpec, ParseError> {
    let mut vars: Option<(Vars, usize)> = None;
    let mut field_decl: Option<(i64, usize)> = None;
    let mut rhs: Vec<Option<Polynomial>> = Vec::new();
    let mut manifolds = Vec::new();
    let mut ics = Vec::new();
    let (mut horizon, mut rtol, mut atol) = (None, None, None);
    let mut last_line = 1;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let toks = lex_line(raw, line_no)?;
        let Some(first) = toks.first() else { continue };
        let end = end_of(line_no, raw);
        let Tok::Ident(word) = &first.tok else {
            return Err(ParseError::new(line_no, first.col, format!("expected a statement, found {}", first.tok.describe())));
        };
        let rest = &toks[1..];
        let need_vars = |vars: &Option<(Vars, usize)>| -> Result<Vars, ParseError> {
            vars.as_ref()
                .map(|(v, _)| v.clone())
                .ok_or_else(|| ParseError::new(line_no, first.col, "`vars` must be declared first".into()))
        };

        // derivative line: d<var> / dt = expr
        if word.len() > 1
            && word.starts_with('d')
            && matches!(rest.first(), Some(Token { tok: Tok::Slash, .. }))
        {
            let vs = need_vars(&vars)?;
            let name = &word[1..];
            let Some(i) = vs.iter().position(|v| v == name) else {
                return Err(ParseError::new(line_no, first.col + 1, format!("undeclared variable `{name}`")));
            };
            match rest.get(1) {
                Some(Token { tok: Tok::Ident(t), .. }) if t == "dt" => {}
                Some(t) => return Err(ParseError::new(t.line, t.col, format!("expected `dt`, found {}", t.tok.describe()))),
                None => return Err(ParseError::new(end.0, end.1, "expected `dt`, found end of line".into())),
            }
            match rest.get(2) {
                Some(Token { tok: Tok::Equals, .. }) => {}
                Some(t) => return Err(ParseError::new(t.line, t.col, format!("expected `=`, found {}", t.tok.describe()))),
                None => return Err(ParseError::new(end.0, end.1, "expected `=`, found end of line".into())),
            }
            if rhs[i].is_some() {
                return Err(ParseError::new(line_no, first.col, format!("second equation for `{name}`")));
            }
            let p = ExprParser::new(&rest[3..], &vs, field_decl.map(|f| f.0), end).parse_all()?;
            rhs[i] = Some(p);
            continue;
        }

        match word.as_str() {
            "vars" => {
                if vars.is_some() {
                    return Err(ParseError::new(line_no, first.col, "`vars` declared twice".into()));
                }
                let mut names: Vec<String> = Vec::new();
                for t in rest {
                    match &t.tok {
                        Tok::Ident(n) if n == "sqrt" || n == "dt" => {
                            return Err(ParseError::new(t.line, t.col, format!("`{n}` is reserved")));
                        }
                        Tok::Ident(n) if names.contains(n) => {
                            return Err(ParseError::new(t.line, t.col, format!("variable `{n}` declared twice")));
                        }
                        Tok::Ident(n) => names.push(n.clone()),
                        other => {
                            return Err(ParseError::new(t.line, t.col, format!("expected a variable name, found {}", other.describe())));
                        }
                    }
                }
                if names.is_empty() {
                    return Err(ParseError::new(end.0, end.1, "expected at least one variable name".into()));
                }
                rhs = vec![None; names.len()];
                vars = Some((vars_from(&names), line_no));
            }
            "field" => {
                if field_decl.is_some() {
                    return Err(ParseError::new(line_no, first.col, "`field` declared twice".into()));
                }
                if rhs.iter().any(|r| r.is_some()) || !manifolds.is_empty() {
                    return Err(ParseError::new(line_no, first.col, "`field` must precede every expression".into()));
                }
                let d = parse_field(rest, end)?;
                field_decl = Some((d, line_no));
            }
            "manifold" => {
                let vs = need_vars(&vars)?;
                let p = ExprParser::new(rest, &vs, field_decl.map(|f| f.0), end).parse_all()?;
                if p.is_constant() {
                    return Err(ParseError::new(line_no, first.col, "manifold must be a nonconstant polynomial".into()));
                }
                manifolds.push(p);
            }
            "ic" => {
                let vs = need_vars(&vars)?;
                let ic = numbers_from(rest, end)?;
                if ic.values.len() != vs.len() {
                    return Err(ParseError::new(
                        line_no,
                        first.col,
                        format!("initial condition has {} values, expected {}", ic.values.len(), vs.len()),
                    ));
                }
                ics.push(ic);
            }
            "horizon" | "rtol" | "atol" => {
                let v = single_float(rest, end, word)?;
                let bad = match word.as_str() {
                    "horizon" => !(v >= 0.0 && v.is_finite()),
                    _ => !(v > 0.0 && v < 1.0),
                };
                if bad {
                    return Err(ParseError::new(line_no, first.col, format!("`{word}` value {v} out of range")));
                }
                let slot = match word.as_str() {
                    "horizon" => &mut horizon,
                    "rtol" => &mut rtol,
                    _ => &mut atol,
                };
                *slot = Some(v);
            }
            other => {
                return Err(ParseError::new(line_no, first.col, format!("unknown statement `{other}`")));
            }
        }
    }

    let Some((vars, vars_line)) = vars else {
        return Err(ParseError::new(last_line, 1, "missing `vars` declaration".into()));
    };
    let mut comps = Vec::new();
    for (i, r) in rhs.into_iter().enumerate() {
        match r {
            Some(p) => comps.push(p),
            None => {
                return Err(ParseError::new(vars_line, 1, format!("missing equation `d{}/dt = ...`", vars[i])));
            }
        }
    }
    let vector_field = VectorField::new(comps).expect("one component per variable");
    let field = match field_decl {
        Some((d, _)) => Field::Quadratic(d),
        None => Field::Rational,
    };
    Ok(SystemSpec {
        vars,
        field,
        field_line: field_decl.map(|f| f.1),
        field_decl: field_decl.map(|f| f.0),
        vector_field,
        manifolds,
        ics,
        horizon,
        rtol,
        atol,
    })
}

fn parse_field(rest: &[Token], end: (usize, usize)) -> Result<i64, ParseError> {
    let expect = |i: usize, want: &Tok, what: &str| -> Result<(), ParseError> {
        match rest.get(i) {
            Some(t) if &t.tok == want => Ok(()),
            Some(t) => Err(ParseError::new(t.line, t.col, format!("expected {what}, found {}", t.tok.describe()))),
            None => Err(ParseError::new(end.0, end.1, format!("expected {what}, found end of line"))),
        }
    };
    expect(0, &Tok::Ident("sqrt".into()), "`sqrt`")?;
    expect(1, &Tok::LParen, "`(`")?;
    let (neg, at) = match rest.get(2) {
        Some(Token { tok: Tok::Minus, .. }) => (true, 3),
        _ => (false, 2),
    };
    let (k, kt) = match rest.get(at) {
        Some(t @ Token { tok: Tok::Int(k), .. }) => (k.clone(), t.clone()),
        Some(t) => return Err(ParseError::new(t.line, t.col, format!("expected an integer, found {}", t.tok.describe()))),
        None => return Err(ParseError::new(end.0, end.1, "expected an integer, found end of line".into())),
    };
    expect(at + 1, &Tok::RParen, "`)`")?;
    if let Some(t) = rest.get(at + 2) {
        return Err(ParseError::new(t.line, t.col, format!("unexpected {}", t.tok.describe())));
    }
    let k: i64 = i64::try_from(&k).map_err(|_| ParseError::new(kt.line, kt.col, "discriminant too large".into()))?;
    let k = if neg { -k } else { k };
    if k == 0 {
        return Err(ParseError::new(kt.line, kt.col, "field discriminant must be nonzero".into()));
    }
    let (free, _) = squarefree_part(k);
    if free == 1 {
        return Err(ParseError::new(kt.line, kt.col, format!("sqrt({k}) is rational; no extension needed")));
    }
    Ok(free)
}

/// Print a polynomial in the input syntax (descending term order).
pub fn print_poly(p: &Polynomial) -> String {
    format_poly(p, TermOrder::Descending)
}

pub fn print_ratfunc(r: &RationalFunction) -> String {
    r.to_string()
}

/// Render a whole system back to the file format.
pub fn print_system(spec: &SystemSpec) -> String {
    let mut out = String::new();
    out.push_str(&format!("vars {}\n", spec.vars.join(" ")));
    if let Some(d) = spec.field_decl {
        out.push_str(&format!("field sqrt({d})\n"));
    }
    for (v, c) in spec.vars.iter().zip(spec.vector_field.components()) {
        out.push_str(&format!("d{v}/dt = {}\n", print_poly(c)));
    }
    for m in &spec.manifolds {
        out.push_str(&format!("manifold {}\n", print_poly(m)));
    }
    for ic in &spec.ics {
        out.push_str(&format!("ic {ic}\n"));
    }
    if let Some(h) = spec.horizon {
        out.push_str(&format!("horizon {h}\n"));
    }
    if let Some(r) = spec.rtol {
        out.push_str(&format!("rtol {r}\n"));
    }
    if let Some(a) = spec.atol {
        out.push_str(&format!("atol {a}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn planar_example() {
        let s = parse_system("vars x y\n dx/dt = x*y\n dy/dt = y^2 - x - 1").unwrap();
        assert_eq!(s.dim(), 2);
        assert_eq!(print_poly(s.vector_field.component(0)), "x*y");
        assert_eq!(print_poly(s.vector_field.component(1)), "y^2 - x - 1");
    }

    #[test]
    fn one_dimensional() {
        let s = parse_system("vars x\n dx/dt = x^2").unwrap();
        assert_eq!(s.dim(), 1);
        assert_eq!(s.vector_field.component(0).to_string(), "x^2");
    }

    #[test]
    fn quadratic_field_manifold() {
        let s = parse_system("vars x y\n field sqrt(2)\n dx/dt = y\n dy/dt = x\n manifold y - (1+sqrt(2))*x").unwrap();
        assert_eq!(s.field, Field::Quadratic(2));
        assert_eq!(s.manifolds[0].to_string(), "y - (1 + sqrt(2))*x");
        assert!(s.manifolds[0].terms().any(|(_, c)| !c.is_rational()));
    }

    #[test]
    fn sqrt_without_field_rejected() {
        let e = parse_system("vars x y\ndx/dt = sqrt(2)*x\ndy/dt = y").unwrap_err();
        assert_eq!((e.line, e.col), (2, 9));
    }

    #[test]
    fn mixed_extension_rejected() {
        let e = parse_system("vars x\nfield sqrt(2)\ndx/dt = sqrt(-1)*x").unwrap_err();
        assert_eq!(e.line, 3);
        assert!(e.message.contains("mixed"));
    }

    #[test]
    fn error_positions() {
        let e = parse_system("vars x y\ndx/dt = x*z\ndy/dt = y").unwrap_err();
        assert_eq!((e.line, e.col), (2, 11));
        assert!(e.message.contains("undeclared"));
        let e = parse_system("vars x y\ndx/dt = x^-1\ndy/dt = y").unwrap_err();
        assert_eq!((e.line, e.col), (2, 11));
        let e = parse_system("vars x y\ndx/dt = 0.5*x\ndy/dt = y").unwrap_err();
        assert_eq!((e.line, e.col), (2, 9));
        let e = parse_system("vars x y\ndx/dt = x\n").unwrap_err();
        assert!(e.message.contains("dy/dt"));
    }

    #[test]
    fn options_and_ics() {
        let s = parse_system("vars x y # comment\ndx/dt = x\ndy/dt = -y\nic 1 -1/2\nic 0.5, 2\nhorizon 3\nrtol 1e-10\natol 1e-12").unwrap();
        assert_eq!(s.ics.len(), 2);
        assert_eq!(s.ics[0].exact.as_ref().unwrap()[1], Coefficient::from_ratio(-1, 2));
        assert!(s.ics[1].exact.is_none());
        assert_eq!(s.ics[1].values, vec![0.5, 2.0]);
        assert_eq!(s.horizon, Some(3.0));
        assert_eq!(s.rtol, Some(1e-10));
    }

    #[test]
    fn zero_prints_as_zero() {
        let v = vars_from(&["x"]);
        assert_eq!(print_poly(&Polynomial::zero(&v)), "0");
    }

    #[test]
    fn system_roundtrip() {
        let src = "vars x y\nfield sqrt(2)\ndx/dt = x*y - 1/2*sqrt(2)\ndy/dt = y^2 - x - 1\nmanifold (1 + sqrt(2))*x - y\nic 1 1\nhorizon 3\n";
        let s = parse_system(src).unwrap();
        let again = parse_system(&print_system(&s)).unwrap();
        assert_eq!(s, again);
    }
}
