use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::algebra::coeff::squarefree_part;
use crate::algebra::{Coefficient, Polynomial, Vars};

use super::lexer::{Tok, Token};
use super::ParseError;

/// Recursive-descent parser for one polynomial expression.
///
/// ```text
/// expr  := term (('+' | '-') term)*
/// term  := unary ('*' unary)*
/// unary := '-' unary | power
/// power := atom ('^' INT)?
/// atom  := INT ('/' INT)? | 'sqrt' '(' INT ')' | IDENT | '(' expr ')'
/// ```
pub struct ExprParser<'a> {
    toks: &'a [Token],
    pos: usize,
    vars: &'a Vars,
    field: Option<i64>,
    /// Position reported when the input ends early.
    end: (usize, usize),
}

impl<'a> ExprParser<'a> {
    pub fn new(toks: &'a [Token], vars: &'a Vars, field: Option<i64>, end: (usize, usize)) -> Self {
        ExprParser { toks, pos: 0, vars, field, end }
    }

    pub fn parse_all(mut self) -> Result<Polynomial, ParseError> {
        let p = self.expr()?;
        if let Some(t) = self.toks.get(self.pos) {
            return Err(self.err_at(t, format!("unexpected {} after expression", t.tok.describe())));
        }
        Ok(p)
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn err_at(&self, t: &Token, msg: String) -> ParseError {
        ParseError::new(t.line, t.col, msg)
    }

    fn err_here(&self, msg: &str) -> ParseError {
        match self.toks.get(self.pos) {
            Some(t) => self.err_at(t, format!("{msg}, found {}", t.tok.describe())),
            None => ParseError::new(self.end.0, self.end.1, format!("{msg}, found end of line")),
        }
    }

    fn expr(&mut self) -> Result<Polynomial, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial, ParseError> {
        let mut acc = self.unary()?;
        while let Some(Tok::Star) = self.peek() {
            self.pos += 1;
            acc = &acc * &self.unary()?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Polynomial, ParseError> {
        if let Some(Tok::Minus) = self.peek() {
            self.pos += 1;
            return Ok(-self.unary()?);
        }
        self.power()
    }

    fn power(&mut self) -> Result<Polynomial, ParseError> {
        let base = self.atom()?;
        if let Some(Tok::Caret) = self.peek() {
            self.pos += 1;
            let Some(t) = self.toks.get(self.pos) else {
                return Err(self.err_here("expected exponent"));
            };
            match &t.tok {
                Tok::Int(n) => {
                    let e = n.to_u32().filter(|&e| e <= 64).ok_or_else(|| {
                        self.err_at(t, format!("exponent {n} is too large"))
                    })?;
                    self.pos += 1;
                    return Ok(base.pow(e));
                }
                _ => {
                    return Err(self.err_at(
                        t,
                        format!("exponent must be a non-negative integer literal, found {}", t.tok.describe()),
                    ))
                }
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Polynomial, ParseError> {
        let Some(t) = self.toks.get(self.pos) else {
            return Err(self.err_here("expected a term"));
        };
        match &t.tok {
            Tok::Int(n) => {
                self.pos += 1;
                let mut value = BigRational::from_integer(n.clone());
                if let (Some(Tok::Slash), Some(Token { tok: Tok::Int(d), .. })) =
                    (self.peek(), self.toks.get(self.pos + 1))
                {
                    if d.is_zero() {
                        return Err(self.err_at(&self.toks[self.pos + 1], "zero denominator".into()));
                    }
                    value = BigRational::new(n.clone(), d.clone());
                    self.pos += 2;
                } else if let Some(Tok::Slash) = self.peek() {
                    self.pos += 1;
                    return Err(self.err_here("expected integer denominator"));
                }
                Ok(Polynomial::constant(self.vars, Coefficient::from_rational(value)))
            }
            Tok::Float(s) => Err(self.err_at(
                t,
                format!("floating-point literal `{s}` not allowed in a polynomial; use a rational a/b"),
            )),
            Tok::Ident(name) if name == "sqrt" => {
                let at = t.clone();
                self.pos += 1;
                self.expect(Tok::LParen, "expected `(` after sqrt")?;
                let neg = if let Some(Tok::Minus) = self.peek() {
                    self.pos += 1;
                    true
                } else {
                    false
                };
                let Some(Token { tok: Tok::Int(k), .. }) = self.toks.get(self.pos).cloned() else {
                    return Err(self.err_here("expected integer inside sqrt"));
                };
                self.pos += 1;
                self.expect(Tok::RParen, "expected `)`")?;
                let c = self.sqrt_literal(if neg { -k } else { k }, &at)?;
                Ok(Polynomial::constant(self.vars, c))
            }
            Tok::Ident(name) => match self.vars.iter().position(|v| v == name) {
                Some(i) => {
                    self.pos += 1;
                    Ok(Polynomial::var(self.vars, i))
                }
                None => Err(self.err_at(t, format!("undeclared variable `{name}`"))),
            },
            Tok::LParen => {
                self.pos += 1;
                let p = self.expr()?;
                self.expect(Tok::RParen, "expected `)`")?;
                Ok(p)
            }
            other => Err(self.err_at(t, format!("expected a term, found {}", other.describe()))),
        }
    }

    fn expect(&mut self, tok: Tok, msg: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err_here(msg))
        }
    }

    fn sqrt_literal(&self, k: BigInt, at: &Token) -> Result<Coefficient, ParseError> {
        let k = k
            .to_i64()
            .ok_or_else(|| self.err_at(at, "sqrt argument too large".into()))?;
        if k == 0 {
            return Ok(Coefficient::zero());
        }
        let (free, square) = squarefree_part(k);
        if free == 1 {
            return Ok(Coefficient::from_int(square));
        }
        match self.field {
            Some(d) if d == free => Ok(&Coefficient::from_int(square) * &Coefficient::sqrt_of(d)),
            Some(d) => Err(self.err_at(
                at,
                format!("sqrt({k}) needs sqrt({free}) but the declared field is sqrt({d}); mixed extensions are not supported"),
            )),
            None => Err(self.err_at(at, format!("sqrt({k}) used without a `field sqrt({free})` declaration"))),
        }
    }
}

/// Parse a signed number for initial conditions and options: integer,
/// rational `a/b`, or float. Returns the exact value when the literal is exact.
pub fn parse_number(toks: &[Token], end: (usize, usize)) -> Result<(Option<Coefficient>, f64, usize), ParseError> {
    let mut i = 0;
    let mut neg = false;
    if let Some(Token { tok: Tok::Minus, .. }) = toks.first() {
        neg = true;
        i = 1;
    } else if let Some(Token { tok: Tok::Plus, .. }) = toks.first() {
        i = 1;
    }
    let Some(t) = toks.get(i) else {
        return Err(ParseError::new(end.0, end.1, "expected a number, found end of line".into()));
    };
    let sign = if neg { -1.0 } else { 1.0 };
    match &t.tok {
        Tok::Int(n) => {
            let mut r = BigRational::from_integer(n.clone());
            let mut used = i + 1;
            if let (Some(Token { tok: Tok::Slash, .. }), Some(Token { tok: Tok::Int(d), line, col })) =
                (toks.get(i + 1), toks.get(i + 2))
            {
                if d.is_zero() {
                    return Err(ParseError::new(*line, *col, "zero denominator".into()));
                }
                r = BigRational::new(n.clone(), d.clone());
                used = i + 3;
            }
            if neg {
                r = -r;
            }
            let c = Coefficient::from_rational(r);
            let v = c.to_f64().expect("rational");
            Ok((Some(c), v, used))
        }
        Tok::Float(s) => {
            let v: f64 = s
                .parse()
                .map_err(|_| ParseError::new(t.line, t.col, format!("bad number `{s}`")))?;
            Ok((None, sign * v, i + 1))
        }
        other => Err(ParseError::new(t.line, t.col, format!("expected a number, found {}", other.describe()))),
    }
}
