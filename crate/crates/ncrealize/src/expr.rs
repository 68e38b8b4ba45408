//! NC rational expressions over `z1 .. zd`: parsing, printing, compilation
//! to FM realizations, and direct series interpretation.
//!
//! Grammar (whitespace insensitive):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*')? factor)*        multiplication keeps order
//! factor := '-' factor | base ('^' '-' '1')*
//! base   := number ('i')? | 'z' INT | '(' expr ')' | 'inv' '(' expr ')'
//! ```
//!
//! Unary minus binds tighter than '+'. Inversion is admissible only for
//! subexpressions with nonzero value at 0; compilation checks this bottom-up
//! through the accumulated `D` of each FM realization.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::realization::FmRealization;
use crate::series::{TruncatedSeries, INVERSION_TOL};
use crate::word::Word;

/// AST of an NC rational expression. `Mul` children keep their order.
#[derive(Clone, Debug, PartialEq)]
pub enum NcExpression {
    Const(Complex64),
    Var(u32),
    Add(Box<NcExpression>, Box<NcExpression>),
    Sub(Box<NcExpression>, Box<NcExpression>),
    Mul(Box<NcExpression>, Box<NcExpression>),
    Neg(Box<NcExpression>),
    Inv(Box<NcExpression>),
    Scale(Complex64, Box<NcExpression>),
}

impl NcExpression {
    /// Largest variable index appearing in the expression.
    pub fn max_var(&self) -> u32 {
        match self {
            NcExpression::Const(_) => 0,
            NcExpression::Var(j) => *j,
            NcExpression::Add(l, r) | NcExpression::Sub(l, r) | NcExpression::Mul(l, r) => {
                l.max_var().max(r.max_var())
            }
            NcExpression::Neg(e) | NcExpression::Inv(e) | NcExpression::Scale(_, e) => e.max_var(),
        }
    }

    /// Expression depth (leaves have depth 1).
    pub fn depth(&self) -> usize {
        match self {
            NcExpression::Const(_) | NcExpression::Var(_) => 1,
            NcExpression::Add(l, r) | NcExpression::Sub(l, r) | NcExpression::Mul(l, r) => {
                1 + l.depth().max(r.depth())
            }
            NcExpression::Neg(e) | NcExpression::Inv(e) | NcExpression::Scale(_, e) => {
                1 + e.depth()
            }
        }
    }
}

struct Parser<'a> {
    input: &'a [u8],
    pos: usize,
}

/// Parses an NC rational expression.
pub fn parse(text: &str) -> Result<NcExpression> {
    let mut p = Parser {
        input: text.as_bytes(),
        pos: 0,
    };
    p.skip_ws();
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.input.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(e)
}

/// Parses and validates variable indices against the alphabet size.
pub fn parse_with_alphabet(text: &str, d: usize) -> Result<NcExpression> {
    let e = parse(text)?;
    let max = e.max_var();
    if max as usize > d {
        return Err(Error::LetterOutOfRange { letter: max, d });
    }
    Ok(e)
}

impl<'a> Parser<'a> {
    fn error(&self, message: &str) -> Error {
        Error::Parse {
            position: self.pos,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.input.len() && self.input[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.input.get(self.pos).copied()
    }

    fn eat(&mut self, byte: u8) -> bool {
        if self.peek() == Some(byte) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<NcExpression> {
        let mut acc = self.term()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    self.skip_ws();
                    let rhs = self.term()?;
                    acc = NcExpression::Add(Box::new(acc), Box::new(rhs));
                }
                Some(b'-') => {
                    self.pos += 1;
                    self.skip_ws();
                    let rhs = self.term()?;
                    acc = NcExpression::Sub(Box::new(acc), Box::new(rhs));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn starts_factor(&self) -> bool {
        matches!(
            self.peek(),
            Some(b'z') | Some(b'(') | Some(b'i') | Some(b'0'..=b'9') | Some(b'.')
        )
    }

    fn term(&mut self) -> Result<NcExpression> {
        let mut acc = self.factor()?;
        loop {
            self.skip_ws();
            if self.eat(b'*') {
                self.skip_ws();
                let rhs = self.factor()?;
                acc = NcExpression::Mul(Box::new(acc), Box::new(rhs));
            } else if self.starts_factor() {
                // implicit multiplication by juxtaposition
                let rhs = self.factor()?;
                acc = NcExpression::Mul(Box::new(acc), Box::new(rhs));
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<NcExpression> {
        self.skip_ws();
        if self.eat(b'-') {
            self.skip_ws();
            let inner = self.factor()?;
            return Ok(NcExpression::Neg(Box::new(inner)));
        }
        let mut base = self.base()?;
        loop {
            self.skip_ws();
            let save = self.pos;
            if self.eat(b'^') {
                self.skip_ws();
                if self.eat(b'-') {
                    self.skip_ws();
                    if self.eat(b'1') {
                        base = NcExpression::Inv(Box::new(base));
                        continue;
                    }
                }
                self.pos = save;
                return Err(self.error("only the exponent ^-1 is supported"));
            }
            return Ok(base);
        }
    }

    fn base(&mut self) -> Result<NcExpression> {
        self.skip_ws();
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.skip_ws();
                if !self.eat(b')') {
                    return Err(self.error("expected ')'"));
                }
                Ok(e)
            }
            Some(b'i') => {
                // either the literal i or the keyword inv(
                if self.input[self.pos..].starts_with(b"inv") {
                    let save = self.pos;
                    self.pos += 3;
                    self.skip_ws();
                    if !self.eat(b'(') {
                        self.pos = save;
                        return Err(self.error("expected '(' after inv"));
                    }
                    let e = self.expr()?;
                    self.skip_ws();
                    if !self.eat(b')') {
                        return Err(self.error("expected ')'"));
                    }
                    Ok(NcExpression::Inv(Box::new(e)))
                } else {
                    self.pos += 1;
                    Ok(NcExpression::Const(Complex64::new(0.0, 1.0)))
                }
            }
            Some(b'z') => {
                self.pos += 1;
                let start = self.pos;
                while self.peek().is_some_and(|b| b.is_ascii_digit()) {
                    self.pos += 1;
                }
                if start == self.pos {
                    return Err(self.error("expected a variable index after 'z'"));
                }
                let text = std::str::from_utf8(&self.input[start..self.pos]).unwrap();
                let j: u32 = text
                    .parse()
                    .map_err(|_| self.error("variable index out of range"))?;
                if j == 0 {
                    return Err(self.error("variable indices start at 1"));
                }
                Ok(NcExpression::Var(j))
            }
            Some(b'0'..=b'9') | Some(b'.') => {
                let start = self.pos;
                while self
                    .peek()
                    .is_some_and(|b| b.is_ascii_digit() || b == b'.' || b == b'e' || b == b'E')
                {
                    // exponent sign
                    let b = self.input[self.pos];
                    self.pos += 1;
                    if (b == b'e' || b == b'E') && matches!(self.peek(), Some(b'+') | Some(b'-')) {
                        self.pos += 1;
                    }
                }
                let text = std::str::from_utf8(&self.input[start..self.pos]).unwrap();
                let value: f64 = text.parse().map_err(|_| Error::Parse {
                    position: start,
                    message: "malformed number".into(),
                })?;
                if self.eat(b'i') {
                    Ok(NcExpression::Const(Complex64::new(0.0, value)))
                } else {
                    Ok(NcExpression::Const(Complex64::new(value, 0.0)))
                }
            }
            _ => Err(self.error("expected a number, variable, '(' or inv(")),
        }
    }
}

fn fmt_complex(v: Complex64) -> String {
    let fmt_f = |x: f64| {
        if x == x.trunc() && x.abs() < 1e15 {
            format!("{}", x as i64)
        } else {
            format!("{x}")
        }
    };
    if v.im == 0.0 {
        fmt_f(v.re)
    } else if v.re == 0.0 {
        format!("{}i", fmt_f(v.im))
    } else if v.im < 0.0 {
        format!("({} - {}i)", fmt_f(v.re), fmt_f(-v.im))
    } else {
        format!("({} + {}i)", fmt_f(v.re), fmt_f(v.im))
    }
}

/// Prints an expression in a form that reparses to the same AST (parser
/// output round-trips exactly; programmatic `Scale` nodes and full complex
/// constants reparse to semantically equal trees).
pub fn print(e: &NcExpression) -> String {
    match e {
        NcExpression::Const(v) => fmt_complex(*v),
        NcExpression::Var(j) => format!("z{j}"),
        NcExpression::Add(l, r) => format!("{} + {}", print(l), print_term_guard(r)),
        NcExpression::Sub(l, r) => format!("{} - {}", print(l), print_term_guard(r)),
        NcExpression::Mul(l, r) => {
            format!("{} * {}", print_left_factor(l), print_right_factor(r))
        }
        NcExpression::Neg(inner) => format!("-{}", print_atom_guard(inner)),
        NcExpression::Inv(inner) => format!("inv({})", print(inner)),
        NcExpression::Scale(v, inner) => {
            format!("{} * {}", fmt_complex(*v), print_right_factor(inner))
        }
    }
}

fn print_term_guard(e: &NcExpression) -> String {
    match e {
        NcExpression::Add(..) | NcExpression::Sub(..) => format!("({})", print(e)),
        _ => print(e),
    }
}

// left multiplication child: a leading Mul chain reparses left-associated
fn print_left_factor(e: &NcExpression) -> String {
    match e {
        NcExpression::Add(..) | NcExpression::Sub(..) | NcExpression::Neg(..) => {
            format!("({})", print(e))
        }
        _ => print(e),
    }
}

// right multiplication child: also guard Mul/Scale to keep the nesting
fn print_right_factor(e: &NcExpression) -> String {
    match e {
        NcExpression::Add(..)
        | NcExpression::Sub(..)
        | NcExpression::Neg(..)
        | NcExpression::Mul(..)
        | NcExpression::Scale(..) => format!("({})", print(e)),
        _ => print(e),
    }
}

// unary minus binds to a single factor, so anything composite needs parens
fn print_atom_guard(e: &NcExpression) -> String {
    match e {
        NcExpression::Const(..) | NcExpression::Var(..) | NcExpression::Inv(..) => print(e),
        _ => format!("({})", print(e)),
    }
}

/// Compiles an expression to an FM realization over `d` variables via the
/// block algebra; every `Inv` node checks regularity at 0 and reports the
/// offending subexpression on failure.
pub fn compile(e: &NcExpression, d: usize) -> Result<FmRealization> {
    compile_with_tolerance(e, d, INVERSION_TOL)
}

pub fn compile_with_tolerance(e: &NcExpression, d: usize, tolerance: f64) -> Result<FmRealization> {
    match e {
        NcExpression::Const(v) => Ok(FmRealization::constant(d, *v)),
        NcExpression::Var(j) => FmRealization::variable(d, *j),
        NcExpression::Add(l, r) => {
            compile_with_tolerance(l, d, tolerance)?.add(&compile_with_tolerance(r, d, tolerance)?)
        }
        NcExpression::Sub(l, r) => {
            compile_with_tolerance(l, d, tolerance)?.sub(&compile_with_tolerance(r, d, tolerance)?)
        }
        NcExpression::Mul(l, r) => {
            compile_with_tolerance(l, d, tolerance)?.mul(&compile_with_tolerance(r, d, tolerance)?)
        }
        NcExpression::Neg(inner) => Ok(compile_with_tolerance(inner, d, tolerance)?.neg()),
        NcExpression::Scale(v, inner) => Ok(compile_with_tolerance(inner, d, tolerance)?.scale(*v)),
        NcExpression::Inv(inner) => {
            let base = compile_with_tolerance(inner, d, tolerance)?;
            base.invert_with_tolerance(tolerance)
                .map_err(|err| match err {
                    Error::NotInvertibleAtZero { .. } => {
                        Error::NotAnalyticAtZero { expr: print(inner) }
                    }
                    other => other,
                })
        }
    }
}

/// Interprets the expression directly over truncated series: the oracle
/// route against which `compile` is validated.
pub fn interpret_series(
    e: &NcExpression,
    d: usize,
    degree_bound: usize,
) -> Result<TruncatedSeries> {
    match e {
        NcExpression::Const(v) => Ok(TruncatedSeries::constant(d, degree_bound, *v)),
        NcExpression::Var(j) => TruncatedSeries::monomial(d, degree_bound, Word::from([*j])),
        NcExpression::Add(l, r) => {
            interpret_series(l, d, degree_bound)?.add(&interpret_series(r, d, degree_bound)?)
        }
        NcExpression::Sub(l, r) => {
            interpret_series(l, d, degree_bound)?.sub(&interpret_series(r, d, degree_bound)?)
        }
        NcExpression::Mul(l, r) => {
            interpret_series(l, d, degree_bound)?.mul(&interpret_series(r, d, degree_bound)?)
        }
        NcExpression::Neg(inner) => Ok(interpret_series(inner, d, degree_bound)?.neg()),
        NcExpression::Scale(v, inner) => Ok(interpret_series(inner, d, degree_bound)?.scale(*v)),
        NcExpression::Inv(inner) => {
            let base = interpret_series(inner, d, degree_bound)?;
            base.invert_with_tolerance(INVERSION_TOL)
                .map_err(|err| match err {
                    Error::NotInvertibleAtZero { .. } => {
                        Error::NotAnalyticAtZero { expr: print(inner) }
                    }
                    other => other,
                })
        }
    }
}

/// Draws a random expression of bounded depth; inversion nodes are retried
/// so the whole expression stays regular at 0.
pub fn random_expression(
    rng: &mut rand_chacha::ChaCha8Rng,
    d: usize,
    max_depth: usize,
) -> NcExpression {
    use crate::sampling::uniform;
    if max_depth <= 1 {
        return if uniform(rng) < 0.4 {
            let re = 2.0 * uniform(rng) - 1.0;
            let im = if uniform(rng) < 0.3 {
                2.0 * uniform(rng) - 1.0
            } else {
                0.0
            };
            NcExpression::Const(Complex64::new(re, im))
        } else {
            NcExpression::Var(1 + (uniform(rng) * d as f64) as u32)
        };
    }
    let roll = uniform(rng);
    if roll < 0.25 {
        NcExpression::Add(
            Box::new(random_expression(rng, d, max_depth - 1)),
            Box::new(random_expression(rng, d, max_depth - 1)),
        )
    } else if roll < 0.45 {
        NcExpression::Sub(
            Box::new(random_expression(rng, d, max_depth - 1)),
            Box::new(random_expression(rng, d, max_depth - 1)),
        )
    } else if roll < 0.7 {
        NcExpression::Mul(
            Box::new(random_expression(rng, d, max_depth - 1)),
            Box::new(random_expression(rng, d, max_depth - 1)),
        )
    } else if roll < 0.8 {
        NcExpression::Neg(Box::new(random_expression(rng, d, max_depth - 1)))
    } else {
        // inversion: retry until the inner expression is regular at 0 with a
        // comfortable margin, shifting by a constant as a fallback
        for _ in 0..10 {
            let inner = random_expression(rng, d, max_depth - 1);
            if let Ok(s) = interpret_series(&inner, d, 0) {
                if s.coeff(&Word::empty()).norm() > 0.2 {
                    return NcExpression::Inv(Box::new(inner));
                }
            }
        }
        let inner = random_expression(rng, d, max_depth - 1);
        let shifted = NcExpression::Add(
            Box::new(NcExpression::Const(Complex64::new(1.5, 0.0))),
            Box::new(inner),
        );
        NcExpression::Inv(Box::new(shifted))
    }
}
