//! Closed-form right-hand-side terms and their text representation.
//!
//! A right-hand side is a sum of terms drawn from a small family:
//!
//! ```text
//! c                          constant
//! c * A^2 * B                monomial (mass-action products)
//! c * S / (c2 + S)           Michaelis-Menten saturation, c2 > 0
//! c * t^p                    time polynomial
//! c * sin(w * t + phi)       sinusoid in time
//! ```
//!
//! Terms are combined with `+` and `-`; a leading `-` negates the first
//! term. The empty sum is written `0`. Coefficients may be omitted (`A * B`
//! means `1 * A * B`). Numbers accept decimal and scientific notation.
//! The identifiers `t` and `sin` are reserved.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Identifiers that cannot be used as variable names.
pub const RESERVED_NAMES: [&str; 2] = ["t", "sin"];

#[derive(Debug, Clone, PartialEq)]
pub enum Term {
    Constant {
        coef: f64,
    },
    /// `coef * Π x_i^a_i`; powers sorted by variable index, non-empty, exponents ≥ 1.
    Monomial {
        coef: f64,
        powers: Vec<(usize, u32)>,
    },
    /// `coef * x / (half_sat + x)`.
    MichaelisMenten {
        coef: f64,
        var: usize,
        half_sat: f64,
    },
    TimePoly {
        coef: f64,
        degree: u32,
    },
    TimeSin {
        coef: f64,
        omega: f64,
        phase: f64,
    },
}

impl Term {
    pub fn constant(coef: f64) -> Self {
        Term::Constant { coef }
    }

    /// Builds a monomial, merging repeated variables and sorting by index.
    pub fn monomial(coef: f64, factors: impl IntoIterator<Item = (usize, u32)>) -> Result<Self> {
        let mut powers: Vec<(usize, u32)> = Vec::new();
        for (var, exp) in factors {
            if exp == 0 {
                return Err(Error::invalid("monomial exponents must be >= 1"));
            }
            match powers.iter_mut().find(|(v, _)| *v == var) {
                Some((_, e)) => *e += exp,
                None => powers.push((var, exp)),
            }
        }
        if powers.is_empty() {
            return Ok(Term::Constant { coef });
        }
        powers.sort_unstable();
        Ok(Term::Monomial { coef, powers })
    }

    pub fn michaelis_menten(coef: f64, var: usize, half_sat: f64) -> Result<Self> {
        if !(half_sat > 0.0 && half_sat.is_finite()) {
            return Err(Error::invalid(format!(
                "Michaelis-Menten constant must be positive and finite, got {half_sat}"
            )));
        }
        Ok(Term::MichaelisMenten {
            coef,
            var,
            half_sat,
        })
    }

    pub fn time_poly(coef: f64, degree: u32) -> Self {
        Term::TimePoly { coef, degree }
    }

    pub fn time_sin(coef: f64, omega: f64, phase: f64) -> Self {
        Term::TimeSin { coef, omega, phase }
    }

    pub fn coef(&self) -> f64 {
        match *self {
            Term::Constant { coef }
            | Term::Monomial { coef, .. }
            | Term::MichaelisMenten { coef, .. }
            | Term::TimePoly { coef, .. }
            | Term::TimeSin { coef, .. } => coef,
        }
    }

    pub fn with_coef(&self, coef: f64) -> Self {
        let mut out = self.clone();
        match &mut out {
            Term::Constant { coef: c }
            | Term::Monomial { coef: c, .. }
            | Term::MichaelisMenten { coef: c, .. }
            | Term::TimePoly { coef: c, .. }
            | Term::TimeSin { coef: c, .. } => *c = coef,
        }
        out
    }

    /// Variables this term reads, ignoring the coefficient.
    pub fn variables(&self) -> Vec<usize> {
        match self {
            Term::Monomial { powers, .. } => powers.iter().map(|&(v, _)| v).collect(),
            Term::MichaelisMenten { var, .. } => vec![*var],
            _ => Vec::new(),
        }
    }

    pub fn depends_on_time(&self) -> bool {
        matches!(self, Term::TimePoly { .. } | Term::TimeSin { .. })
    }

    /// Value of the term without its coefficient.
    pub fn eval_unit(&self, state: &[f64], t: f64) -> Result<f64> {
        Ok(match self {
            Term::Constant { .. } => 1.0,
            Term::Monomial { powers, .. } => powers
                .iter()
                .map(|&(v, e)| state[v].powi(e as i32))
                .product(),
            Term::MichaelisMenten { var, half_sat, .. } => {
                let x = state[*var];
                let denom = half_sat + x;
                if denom <= 0.0 {
                    return Err(Error::NonPositiveDenominator {
                        variable: *var,
                        value: denom,
                    });
                }
                x / denom
            }
            Term::TimePoly { degree, .. } => t.powi(*degree as i32),
            Term::TimeSin { omega, phase, .. } => (omega * t + phase).sin(),
        })
    }

    pub fn eval(&self, state: &[f64], t: f64) -> Result<f64> {
        Ok(self.coef() * self.eval_unit(state, t)?)
    }

    /// Exact time derivative of a time-only term; `None` for state-dependent terms.
    pub fn time_derivative(&self) -> Option<Option<Term>> {
        match *self {
            Term::Constant { .. } => Some(None),
            Term::TimePoly { degree: 0, .. } => Some(None),
            Term::TimePoly { coef, degree } => Some(Some(Term::TimePoly {
                coef: coef * degree as f64,
                degree: degree - 1,
            })),
            // d/dt sin(wt + p) = w cos(wt + p) = w sin(wt + p + pi/2)
            Term::TimeSin { coef, omega, phase } => Some(Some(Term::TimeSin {
                coef: coef * omega,
                omega,
                phase: phase + std::f64::consts::FRAC_PI_2,
            })),
            Term::Monomial { .. } | Term::MichaelisMenten { .. } => None,
        }
    }

    /// Applies `f` to every variable index in the term.
    pub fn remap(&self, f: impl Fn(usize) -> usize) -> Result<Term> {
        Ok(match self {
            Term::Monomial { coef, powers } => {
                Term::monomial(*coef, powers.iter().map(|&(v, e)| (f(v), e)))?
            }
            Term::MichaelisMenten {
                coef,
                var,
                half_sat,
            } => Term::MichaelisMenten {
                coef: *coef,
                var: f(*var),
                half_sat: *half_sat,
            },
            other => other.clone(),
        })
    }

    fn max_var(&self) -> Option<usize> {
        self.variables().into_iter().max()
    }
}

/// Sum of closed-form terms. Zero-coefficient terms are never stored, so the
/// empty sum is the only representation of the zero function.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Rhs {
    terms: Vec<Term>,
}

impl Rhs {
    pub fn zero() -> Self {
        Rhs { terms: Vec::new() }
    }

    pub fn new(terms: impl IntoIterator<Item = Term>) -> Result<Self> {
        let mut out = Vec::new();
        for term in terms {
            if !term.coef().is_finite() {
                return Err(Error::invalid("term coefficient must be finite"));
            }
            match term {
                Term::TimeSin { omega, phase, .. } if !(omega.is_finite() && phase.is_finite()) => {
                    return Err(Error::invalid("sinusoid frequency and phase must be finite"));
                }
                _ => {}
            }
            if term.coef() != 0.0 {
                out.push(term);
            }
        }
        Ok(Rhs { terms: out })
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Variables appearing with a nonzero coefficient.
    pub fn support(&self) -> BTreeSet<usize> {
        self.terms.iter().flat_map(Term::variables).collect()
    }

    pub fn depends_on_time(&self) -> bool {
        self.terms.iter().any(Term::depends_on_time)
    }

    pub fn is_time_only(&self) -> bool {
        self.terms.iter().all(|t| t.variables().is_empty())
    }

    pub fn max_var(&self) -> Option<usize> {
        self.terms.iter().filter_map(Term::max_var).max()
    }

    pub fn eval(&self, state: &[f64], t: f64) -> Result<f64> {
        let mut sum = 0.0;
        for term in &self.terms {
            sum += term.eval(state, t)?;
        }
        Ok(sum)
    }

    /// Exact derivative in time of a time-only sum; `None` if any term reads the state.
    pub fn time_derivative(&self) -> Option<Rhs> {
        let mut terms = Vec::new();
        for term in &self.terms {
            if let Some(d) = term.time_derivative()? {
                terms.push(d);
            }
        }
        Some(Rhs::new(terms).expect("derivative of finite terms is finite"))
    }

    pub fn remap(&self, f: impl Fn(usize) -> usize + Copy) -> Result<Rhs> {
        Rhs::new(
            self.terms
                .iter()
                .map(|t| t.remap(f))
                .collect::<Result<Vec<_>>>()?,
        )
    }

    pub fn format(&self, names: &[String]) -> String {
        format_rhs(self, names)
    }

    pub fn parse(text: &str, names: &[String]) -> Result<Rhs> {
        parse_rhs(text, names)
    }
}

pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Formats a number so that parsing it back yields the same bits.
pub(crate) fn fmt_num(x: f64) -> String {
    format!("{x}")
}

fn format_term_magnitude(term: &Term, names: &[String]) -> String {
    let c = fmt_num(term.coef().abs());
    match term {
        Term::Constant { .. } => c,
        Term::Monomial { powers, .. } => {
            let mut s = c;
            for &(v, e) in powers {
                let _ = write!(s, " * {}", names[v]);
                if e != 1 {
                    let _ = write!(s, "^{e}");
                }
            }
            s
        }
        Term::MichaelisMenten { var, half_sat, .. } => {
            let n = &names[*var];
            format!("{c} * {n} / ({} + {n})", fmt_num(*half_sat))
        }
        Term::TimePoly { degree, .. } => match degree {
            1 => format!("{c} * t"),
            p => format!("{c} * t^{p}"),
        },
        Term::TimeSin { omega, phase, .. } => {
            let sign = if phase.is_sign_negative() { '-' } else { '+' };
            format!(
                "{c} * sin({} * t {sign} {})",
                fmt_num(*omega),
                fmt_num(phase.abs())
            )
        }
    }
}

pub fn format_rhs(rhs: &Rhs, names: &[String]) -> String {
    if rhs.terms.is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, term) in rhs.terms.iter().enumerate() {
        let neg = term.coef().is_sign_negative();
        match (i, neg) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        out.push_str(&format_term_magnitude(term, names));
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

struct Lexed {
    tok: Tok,
    col: usize,
    text: String,
}

fn lex(text: &str, line: usize, col0: usize) -> Result<Vec<Lexed>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = col0 + i;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let single = match c {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(tok) = single {
            out.push(Lexed {
                tok,
                col,
                text: c.to_string(),
            });
            i += 1;
            continue;
        }
        if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let s: String = chars[start..i].iter().collect();
            let v: f64 = s
                .parse()
                .map_err(|_| Error::syntax(line, col, format!("invalid number `{s}`")))?;
            out.push(Lexed {
                tok: Tok::Num(v),
                col,
                text: s,
            });
            continue;
        }
        if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push(Lexed {
                tok: Tok::Ident(s.clone()),
                col,
                text: s,
            });
            continue;
        }
        return Err(Error::syntax(line, col, format!("unexpected character `{c}`")));
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Lexed>,
    pos: usize,
    names: &'a [String],
    line: usize,
    end_col: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|l| &l.tok)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_col, |l| l.col)
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        let found = self
            .toks
            .get(self.pos)
            .map_or("end of input".to_string(), |l| format!("`{}`", l.text));
        Error::syntax(self.line, self.col(), format!("{}, found {found}", msg.into()))
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &Tok, what: &str) -> Result<()> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.err(format!("expected {what}")))
        }
    }

    fn number(&mut self) -> Result<f64> {
        match self.peek() {
            Some(Tok::Num(v)) => {
                let v = *v;
                self.pos += 1;
                Ok(v)
            }
            _ => Err(self.err("expected a number")),
        }
    }

    fn signed_number(&mut self) -> Result<f64> {
        if self.eat(&Tok::Minus) {
            Ok(-self.number()?)
        } else {
            self.number()
        }
    }

    fn integer(&mut self) -> Result<u32> {
        let col = self.col();
        match self.toks.get(self.pos) {
            Some(Lexed {
                tok: Tok::Num(_),
                text,
                ..
            }) if text.chars().all(|c| c.is_ascii_digit()) => {
                let v = text
                    .parse::<u32>()
                    .map_err(|_| Error::syntax(self.line, col, "exponent out of range"))?;
                self.pos += 1;
                Ok(v)
            }
            _ => Err(self.err("expected an integer exponent")),
        }
    }

    fn variable(&mut self) -> Result<usize> {
        let col = self.col();
        match self.peek().cloned() {
            Some(Tok::Ident(name)) => {
                if RESERVED_NAMES.contains(&name.as_str()) {
                    return Err(self.err("expected a variable name"));
                }
                self.pos += 1;
                self.names.iter().position(|n| *n == name).ok_or_else(|| {
                    Error::syntax(
                        self.line,
                        col,
                        format!("unknown variable `{name}` (known: {})", self.names.join(", ")),
                    )
                })
            }
            _ => Err(self.err("expected a variable name")),
        }
    }

    fn power(&mut self) -> Result<u32> {
        if self.eat(&Tok::Caret) {
            let col = self.col();
            let e = self.integer()?;
            if e == 0 {
                return Err(Error::syntax(self.line, col, "exponent must be >= 1"));
            }
            Ok(e)
        } else {
            Ok(1)
        }
    }

    fn is_ident(&self, name: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == name)
    }

    fn term(&mut self, sign: f64) -> Result<Term> {
        let mut coef = sign;
        if let Some(Tok::Num(v)) = self.peek() {
            coef *= *v;
            self.pos += 1;
            if !self.eat(&Tok::Star) {
                return Ok(Term::constant(coef));
            }
        }
        if self.is_ident("sin") {
            self.pos += 1;
            self.expect(&Tok::LParen, "`(`")?;
            let omega = if self.is_ident("t") {
                1.0
            } else {
                let w = self.signed_number()?;
                self.eat(&Tok::Star);
                w
            };
            if !self.is_ident("t") {
                return Err(self.err("expected `t`"));
            }
            self.pos += 1;
            let phase = if self.eat(&Tok::Plus) {
                self.signed_number()?
            } else if self.eat(&Tok::Minus) {
                -self.number()?
            } else {
                0.0
            };
            self.expect(&Tok::RParen, "`)`")?;
            return Ok(Term::time_sin(coef, omega, phase));
        }
        if self.is_ident("t") {
            self.pos += 1;
            let degree = if self.eat(&Tok::Caret) {
                self.integer()?
            } else {
                1
            };
            return Ok(Term::time_poly(coef, degree));
        }
        let first = self.variable()?;
        if self.eat(&Tok::Slash) {
            self.expect(&Tok::LParen, "`(`")?;
            let col = self.col();
            let half_sat = self.number()?;
            self.expect(&Tok::Plus, "`+`")?;
            let again = self.variable()?;
            if again != first {
                return Err(Error::syntax(
                    self.line,
                    col,
                    "Michaelis-Menten denominator must use the numerator variable",
                ));
            }
            self.expect(&Tok::RParen, "`)`")?;
            return Term::michaelis_menten(coef, first, half_sat)
                .map_err(|e| Error::syntax(self.line, col, e.to_string()));
        }
        let mut factors = vec![(first, self.power()?)];
        while self.eat(&Tok::Star) {
            let v = self.variable()?;
            factors.push((v, self.power()?));
        }
        Term::monomial(coef, factors)
    }

    fn rhs(&mut self) -> Result<Rhs> {
        let mut terms = Vec::new();
        let mut sign = if self.eat(&Tok::Minus) {
            -1.0
        } else {
            self.eat(&Tok::Plus);
            1.0
        };
        loop {
            terms.push(self.term(sign)?);
            sign = match self.peek() {
                Some(Tok::Plus) => 1.0,
                Some(Tok::Minus) => -1.0,
                None => break,
                _ => return Err(self.err("expected `+`, `-` or end of expression")),
            };
            self.pos += 1;
        }
        Rhs::new(terms).map_err(|e| Error::syntax(self.line, self.end_col, e.to_string()))
    }
}

/// Parses an expression located at `line`, starting at 1-based column `col0`.
pub(crate) fn parse_rhs_at(text: &str, names: &[String], line: usize, col0: usize) -> Result<Rhs> {
    let toks = lex(text, line, col0)?;
    if toks.is_empty() {
        return Err(Error::syntax(line, col0, "empty expression"));
    }
    let mut p = Parser {
        toks,
        pos: 0,
        names,
        line,
        end_col: col0 + text.chars().count(),
    };
    p.rhs()
}

pub fn parse_rhs(text: &str, names: &[String]) -> Result<Rhs> {
    parse_rhs_at(text, names, 1, 1)
}
