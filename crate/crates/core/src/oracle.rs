//! Realizable zero patterns of parametrized matrix families over `Q` and `F_p`.
//!
//! A family lists parameters, constraints (`=` and `!=`), a matrix of rational
//! expressions and named loci of extra constraints. Sampling solves equality
//! constraints one parameter at a time and records every zero pattern met, each
//! with an exact witness. The result is a lower bound on the realizable patterns.

use crate::blueprint::GenSet;
use crate::catalog::{Cell, GroupModel};
use crate::error::{Error, Result};
use crate::spectrum::SpectrumPoset;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Arithmetic expression over the parameters of a family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    /// Integer literal.
    Num(BigInt),
    /// Parameter by index.
    Var(usize),
    /// Negation.
    Neg(Box<Expr>),
    /// Sum.
    Add(Box<Expr>, Box<Expr>),
    /// Difference.
    Sub(Box<Expr>, Box<Expr>),
    /// Product.
    Mul(Box<Expr>, Box<Expr>),
    /// Quotient.
    Div(Box<Expr>, Box<Expr>),
    /// Integer power, possibly negative.
    Pow(Box<Expr>, i32),
}

impl Expr {
    fn vars(&self, out: &mut BTreeSet<usize>) {
        match self {
            Expr::Num(_) => {}
            Expr::Var(i) => {
                out.insert(*i);
            }
            Expr::Neg(a) | Expr::Pow(a, _) => a.vars(out),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.vars(out);
                b.vars(out);
            }
        }
    }

    /// Renders the expression with the given parameter names.
    pub fn render(&self, names: &[String]) -> String {
        match self {
            Expr::Num(n) => n.to_string(),
            Expr::Var(i) => names[*i].clone(),
            Expr::Neg(a) => format!("(-{})", a.render(names)),
            Expr::Add(a, b) => format!("({} + {})", a.render(names), b.render(names)),
            Expr::Sub(a, b) => format!("({} - {})", a.render(names), b.render(names)),
            Expr::Mul(a, b) => format!("({} * {})", a.render(names), b.render(names)),
            Expr::Div(a, b) => format!("({} / {})", a.render(names), b.render(names)),
            Expr::Pow(a, e) => format!("({}^{e})", a.render(names)),
        }
    }
}

/// A constraint `lhs = rhs` or `lhs != rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    /// Left side.
    pub lhs: Expr,
    /// Right side.
    pub rhs: Expr,
    /// True for `=`, false for `!=`.
    pub equal: bool,
}

impl Constraint {
    fn render(&self, names: &[String]) -> String {
        format!("{} {} {}", self.lhs.render(names), if self.equal { "=" } else { "!=" }, self.rhs.render(names))
    }
}

/// A named set of extra constraints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Locus {
    /// Name.
    pub name: String,
    /// Constraints.
    pub constraints: Vec<Constraint>,
}

/// A parametrized matrix family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamFamily {
    /// Parameter names.
    pub params: Vec<String>,
    /// Constraints every sample satisfies.
    pub constraints: Vec<Constraint>,
    /// Square matrix of entries.
    pub matrix: Vec<Vec<Expr>>,
    /// Named loci.
    pub loci: Vec<Locus>,
}

impl ParamFamily {
    /// Matrix dimension.
    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    /// Text form accepted by [`parse_family`].
    pub fn render(&self) -> String {
        let cs = |v: &[Constraint]| v.iter().map(|c| c.render(&self.params)).collect::<Vec<_>>().join(", ");
        let rows: Vec<String> = self
            .matrix
            .iter()
            .map(|r| format!("[{}]", r.iter().map(|e| e.render(&self.params)).collect::<Vec<_>>().join(", ")))
            .collect();
        let mut out = format!("params: {}\n", self.params.join(", "));
        out.push_str(&format!("constraints: {}\n", cs(&self.constraints)));
        out.push_str(&format!("matrix: [{}]\n", rows.join(", ")));
        if !self.loci.is_empty() {
            out.push_str("loci:\n");
            for l in &self.loci {
                out.push_str(&format!("  {} {{ {} }}\n", l.name, cs(&l.constraints)));
            }
        }
        out
    }
}

// ---------------------------------------------------------------------------
// parsing

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Sym(&'static str),
}

fn lex(text: &str, base: usize) -> Result<Vec<(Tok, usize)>> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let mut j = i;
            while j < chars.len() && chars[j].1.is_ascii_digit() {
                j += 1;
            }
            let end = chars.get(j).map_or(text.len(), |x| x.0);
            out.push((Tok::Num(text[pos..end].parse().expect("digits")), base + pos));
            i = j;
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let mut j = i;
            while j < chars.len() && (chars[j].1.is_alphanumeric() || chars[j].1 == '_' || chars[j].1 == '\'') {
                j += 1;
            }
            let end = chars.get(j).map_or(text.len(), |x| x.0);
            out.push((Tok::Ident(text[pos..end].to_string()), base + pos));
            i = j;
            continue;
        }
        let two: String = chars[i..chars.len().min(i + 2)].iter().map(|x| x.1).collect();
        let sym = match two.as_str() {
            "!=" => Some("!="),
            "**" => Some("^"),
            _ => None,
        };
        if let Some(s) = sym {
            out.push((Tok::Sym(s), base + pos));
            i += 2;
            continue;
        }
        let s = match c {
            '+' => "+",
            '-' | '−' => "-",
            '*' | '·' => "*",
            '/' => "/",
            '^' => "^",
            '(' => "(",
            ')' => ")",
            '=' => "=",
            '≠' => "!=",
            ',' => ",",
            _ => return Err(Error::Parse { pos: base + pos, msg: format!("unexpected character {c:?}") }),
        };
        out.push((Tok::Sym(s), base + pos));
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    at: usize,
    end: usize,
    params: &'a [String],
}

impl Parser<'_> {
    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |t| t.1)
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.0)
    }

    fn eat(&mut self, s: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Sym(x)) if *x == s) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn fail<T>(&self, msg: &str) -> Result<T> {
        Err(Error::Parse { pos: self.pos(), msg: msg.into() })
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut acc = self.term()?;
        loop {
            if self.eat("+") {
                acc = Expr::Add(Box::new(acc), Box::new(self.term()?));
            } else if self.eat("-") {
                acc = Expr::Sub(Box::new(acc), Box::new(self.term()?));
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut acc = self.unary()?;
        loop {
            if self.eat("*") {
                acc = Expr::Mul(Box::new(acc), Box::new(self.unary()?));
            } else if self.eat("/") {
                acc = Expr::Div(Box::new(acc), Box::new(self.unary()?));
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat("-") {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat("+") {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat("^") {
            let neg = self.eat("-");
            match self.peek().cloned() {
                Some(Tok::Num(n)) => {
                    self.at += 1;
                    let e = n.to_i32().filter(|&e| e <= 64).ok_or(Error::Parse { pos: self.pos(), msg: "exponent too large".into() })?;
                    return Ok(Expr::Pow(Box::new(base), if neg { -e } else { e }));
                }
                _ => return self.fail("expected an integer exponent"),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.at += 1;
                Ok(Expr::Num(n))
            }
            Some(Tok::Ident(name)) => match self.params.iter().position(|p| *p == name) {
                Some(i) => {
                    self.at += 1;
                    Ok(Expr::Var(i))
                }
                None => self.fail(&format!("unknown parameter {name}")),
            },
            Some(Tok::Sym("(")) => {
                self.at += 1;
                let e = self.expr()?;
                if !self.eat(")") {
                    return self.fail("expected ')'");
                }
                Ok(e)
            }
            Some(_) => self.fail("expected an expression"),
            None => self.fail("unexpected end of input"),
        }
    }

    fn constraint(&mut self) -> Result<Constraint> {
        let lhs = self.expr()?;
        let equal = if self.eat("=") {
            true
        } else if self.eat("!=") {
            false
        } else {
            return self.fail("expected '=' or '!='");
        };
        let rhs = self.expr()?;
        Ok(Constraint { lhs, rhs, equal })
    }

    fn done(&self) -> Result<()> {
        if self.at < self.toks.len() {
            return self.fail("unexpected trailing input");
        }
        Ok(())
    }
}

fn parser<'a>(text: &str, base: usize, params: &'a [String]) -> Result<Parser<'a>> {
    Ok(Parser { toks: lex(text, base)?, at: 0, end: base + text.len(), params })
}

/// Parses one expression over the given parameters.
pub fn parse_expr(text: &str, params: &[String]) -> Result<Expr> {
    let mut p = parser(text, 0, params)?;
    let e = p.expr()?;
    p.done()?;
    Ok(e)
}

/// Parses a comma-separated constraint list; an empty list is allowed.
pub fn parse_constraints(text: &str, params: &[String]) -> Result<Vec<Constraint>> {
    parse_constraints_at(text, 0, params)
}

fn parse_constraints_at(text: &str, base: usize, params: &[String]) -> Result<Vec<Constraint>> {
    let mut p = parser(text, base, params)?;
    let mut out = Vec::new();
    if p.toks.is_empty() {
        return Ok(out);
    }
    loop {
        out.push(p.constraint()?);
        if !p.eat(",") {
            break;
        }
    }
    p.done()?;
    Ok(out)
}

/// Splits `[[..],[..]]` into rows of entry texts with byte offsets.
fn split_matrix(text: &str, base: usize) -> Result<Vec<Vec<(String, usize)>>> {
    let mut rows = Vec::new();
    let mut depth = 0usize;
    let mut cur: Vec<(String, usize)> = Vec::new();
    let mut start = 0usize;
    for (i, c) in text.char_indices() {
        match c {
            '[' => {
                depth += 1;
                if depth == 2 {
                    cur.clear();
                    start = i + 1;
                }
            }
            ']' => {
                if depth == 0 {
                    return Err(Error::Parse { pos: base + i, msg: "unbalanced ']'".into() });
                }
                if depth == 2 {
                    cur.push((text[start..i].to_string(), base + start));
                    rows.push(std::mem::take(&mut cur));
                }
                depth -= 1;
            }
            '(' if depth >= 2 => depth += 10,
            ')' if depth >= 12 => depth -= 10,
            ',' if depth == 2 => {
                cur.push((text[start..i].to_string(), base + start));
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(Error::Parse { pos: base + text.len(), msg: "unbalanced '['".into() });
    }
    Ok(rows)
}

/// Parses the family text format (`params:`, `constraints:`, `matrix:`, `loci:`).
pub fn parse_family(text: &str) -> Result<ParamFamily> {
    let mut params: Option<Vec<String>> = None;
    let mut constraints = (String::new(), 0usize);
    let mut matrix: Option<(String, usize)> = None;
    let mut loci: Vec<(String, usize)> = Vec::new();
    let mut in_loci = false;
    let mut offset = 0usize;
    for line in text.split_inclusive('\n') {
        let base = offset;
        offset += line.len();
        let body = line.split('#').next().unwrap_or("");
        let trimmed = body.trim();
        if trimmed.is_empty() {
            continue;
        }
        let lead = body.len() - body.trim_start().len();
        let key_of = |k: &str| trimmed.strip_prefix(k).map(|r| (r.to_string(), base + lead + k.len()));
        if let Some((rest, _)) = key_of("params:") {
            params = Some(rest.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect());
            in_loci = false;
        } else if let Some(c) = key_of("constraints:") {
            constraints = c;
            in_loci = false;
        } else if let Some(m) = key_of("matrix:") {
            matrix = Some(m);
            in_loci = false;
        } else if let Some((rest, at)) = key_of("loci:") {
            in_loci = true;
            if !rest.trim().is_empty() {
                loci.push((rest, at));
            }
        } else if in_loci {
            loci.push((body.to_string(), base));
        } else if let Some((m, _)) = matrix.as_mut() {
            // matrix rows may continue on following lines
            m.push_str(body);
        } else {
            return Err(Error::Parse { pos: base + lead, msg: "expected a section key".into() });
        }
    }
    let params = params.ok_or(Error::Parse { pos: 0, msg: "missing params:".into() })?;
    let cons = parse_constraints_at(&constraints.0, constraints.1, &params)?;
    let (mtext, mpos) = matrix.ok_or(Error::Parse { pos: text.len(), msg: "missing matrix:".into() })?;
    let mut rows = Vec::new();
    for row in split_matrix(&mtext, mpos)? {
        let mut r = Vec::new();
        for (e, at) in row {
            let mut p = parser(&e, at, &params)?;
            let x = p.expr()?;
            p.done()?;
            r.push(x);
        }
        rows.push(r);
    }
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(Error::Parse { pos: mpos, msg: "matrix must be square and nonempty".into() });
    }
    let mut parsed_loci = Vec::new();
    for (l, at) in loci {
        let open = l.find('{').ok_or(Error::Parse { pos: at, msg: "expected '{'".into() })?;
        let close = l.rfind('}').ok_or(Error::Parse { pos: at + l.len(), msg: "expected '}'".into() })?;
        let name = l[..open].trim().to_string();
        if name.is_empty() {
            return Err(Error::Parse { pos: at, msg: "locus needs a name".into() });
        }
        let cs = parse_constraints_at(&l[open + 1..close], at + open + 1, &params)?;
        parsed_loci.push(Locus { name, constraints: cs });
    }
    Ok(ParamFamily { params, constraints: cons, matrix: rows, loci: parsed_loci })
}

// ---------------------------------------------------------------------------
// fields

/// A sampling field: the rationals or a prime field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FieldKind {
    /// `Q`.
    Rationals,
    /// `F_p`.
    Prime(u64),
    /// `F_{2^k}`, elements as bit vectors in a polynomial basis.
    Binary(u32),
}

/// Irreducible polynomials over `F_2` of degree 2..=8.
const BINARY_MODULI: [u64; 7] = [0b111, 0b1011, 0b10011, 0b100101, 0b1000011, 0b10000011, 0b100011011];

fn binary_mul(a: u64, b: u64, k: u32) -> u64 {
    let m = BINARY_MODULI[k as usize - 2];
    let mut acc = 0u64;
    for i in 0..k {
        if b >> i & 1 == 1 {
            acc ^= a << i;
        }
    }
    for i in (k..2 * k).rev() {
        if acc >> i & 1 == 1 {
            acc ^= m << (i - k);
        }
    }
    acc
}

impl FieldKind {
    /// Tag such as `Q` or `F3`.
    pub fn tag(&self) -> String {
        match self {
            FieldKind::Rationals => "Q".into(),
            FieldKind::Prime(p) => format!("F{p}"),
            FieldKind::Binary(k) => format!("F{}", 1u64 << k),
        }
    }

    /// Number of elements, or `None` for `Q`.
    pub fn order(&self) -> Option<u64> {
        match self {
            FieldKind::Rationals => None,
            FieldKind::Prime(p) => Some(*p),
            FieldKind::Binary(k) => Some(1 << k),
        }
    }

    /// Characteristic.
    pub fn characteristic(&self) -> u64 {
        match self {
            FieldKind::Rationals => 0,
            FieldKind::Prime(p) => *p,
            FieldKind::Binary(_) => 2,
        }
    }

    /// Parses `Q`, `F<p>` or `F<2^k>` (also a bare order).
    pub fn parse(s: &str) -> Result<FieldKind> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("q") || t == "0" {
            return Ok(FieldKind::Rationals);
        }
        let digits = t.strip_prefix('F').or_else(|| t.strip_prefix('f')).unwrap_or(t);
        let p: u64 = digits.parse().map_err(|_| Error::Invalid(format!("unknown field {t}")))?;
        if p > 2 && p.is_power_of_two() && p <= 256 {
            return Ok(FieldKind::Binary(p.trailing_zeros()));
        }
        if !(2..=1_000_003).contains(&p) || (2..).take_while(|d| d * d <= p).any(|d| p % d == 0) {
            return Err(Error::Invalid(format!("{p} is not a supported prime")));
        }
        Ok(FieldKind::Prime(p))
    }
}

/// A field element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Val {
    /// Rational number.
    Q(BigRational),
    /// Residue modulo the field's prime.
    P(u64),
}

impl fmt::Display for Val {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Val::Q(q) => write!(f, "{q}"),
            Val::P(x) => write!(f, "{x}"),
        }
    }
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = (acc as u128 * b as u128 % p as u128) as u64;
        }
        b = (b as u128 * b as u128 % p as u128) as u64;
        e >>= 1;
    }
    acc
}

impl FieldKind {
    fn from_int(&self, n: &BigInt) -> Val {
        match self {
            FieldKind::Rationals => Val::Q(BigRational::from_integer(n.clone())),
            FieldKind::Prime(p) => {
                let m = BigInt::from(*p);
                Val::P((((n % &m) + &m) % &m).to_u64().expect("residue"))
            }
            FieldKind::Binary(_) => Val::P(u64::from(n.bit(0))),
        }
    }

    fn is_zero(&self, a: &Val) -> bool {
        match a {
            Val::Q(q) => q.is_zero(),
            Val::P(x) => *x == 0,
        }
    }

    fn add(&self, a: &Val, b: &Val) -> Val {
        match (a, b, self) {
            (Val::Q(x), Val::Q(y), _) => Val::Q(x + y),
            (Val::P(x), Val::P(y), FieldKind::Prime(p)) => Val::P((x + y) % p),
            (Val::P(x), Val::P(y), FieldKind::Binary(_)) => Val::P(x ^ y),
            _ => unreachable!("mixed field elements"),
        }
    }

    fn neg(&self, a: &Val) -> Val {
        match (a, self) {
            (Val::Q(x), _) => Val::Q(-x),
            (Val::P(x), FieldKind::Prime(p)) => Val::P((p - x) % p),
            (Val::P(x), FieldKind::Binary(_)) => Val::P(*x),
            _ => unreachable!("mixed field elements"),
        }
    }

    fn mul(&self, a: &Val, b: &Val) -> Val {
        match (a, b, self) {
            (Val::Q(x), Val::Q(y), _) => Val::Q(x * y),
            (Val::P(x), Val::P(y), FieldKind::Prime(p)) => Val::P((*x as u128 * *y as u128 % *p as u128) as u64),
            (Val::P(x), Val::P(y), FieldKind::Binary(k)) => Val::P(binary_mul(*x, *y, *k)),
            _ => unreachable!("mixed field elements"),
        }
    }

    fn inv(&self, a: &Val) -> Option<Val> {
        if self.is_zero(a) {
            return None;
        }
        Some(match (a, self) {
            (Val::Q(x), _) => Val::Q(x.recip()),
            (Val::P(x), FieldKind::Prime(p)) => Val::P(pow_mod(*x, p - 2, *p)),
            (Val::P(x), FieldKind::Binary(k)) => {
                let mut acc = 1;
                for _ in 0..(1u64 << k) - 2 {
                    acc = binary_mul(acc, *x, *k);
                }
                Val::P(acc)
            }
            _ => unreachable!("mixed field elements"),
        })
    }

    fn pow(&self, a: &Val, e: i32) -> Option<Val> {
        let base = if e < 0 { self.inv(a)? } else { a.clone() };
        let mut acc = self.from_int(&BigInt::one());
        for _ in 0..e.unsigned_abs() {
            acc = self.mul(&acc, &base);
        }
        Some(acc)
    }

    /// Evaluates an expression; `None` on division by zero.
    pub fn eval(&self, e: &Expr, vals: &[Val]) -> Option<Val> {
        Some(match e {
            Expr::Num(n) => self.from_int(n),
            Expr::Var(i) => vals[*i].clone(),
            Expr::Neg(a) => self.neg(&self.eval(a, vals)?),
            Expr::Add(a, b) => self.add(&self.eval(a, vals)?, &self.eval(b, vals)?),
            Expr::Sub(a, b) => self.add(&self.eval(a, vals)?, &self.neg(&self.eval(b, vals)?)),
            Expr::Mul(a, b) => self.mul(&self.eval(a, vals)?, &self.eval(b, vals)?),
            Expr::Div(a, b) => self.mul(&self.eval(a, vals)?, &self.inv(&self.eval(b, vals)?)?),
            Expr::Pow(a, k) => self.pow(&self.eval(a, vals)?, *k)?,
        })
    }

    fn holds(&self, c: &Constraint, vals: &[Val]) -> Option<bool> {
        let l = self.eval(&c.lhs, vals)?;
        let r = self.eval(&c.rhs, vals)?;
        Some((l == r) == c.equal)
    }

    fn random<R: Rng>(&self, rng: &mut R) -> Val {
        match self {
            FieldKind::Rationals => {
                let n = BigInt::from(rng.gen_range(-7i64..=7));
                let d = if rng.gen_bool(0.25) { rng.gen_range(2i64..=4) } else { 1 };
                Val::Q(BigRational::new(n, BigInt::from(d)))
            }
            FieldKind::Prime(p) => Val::P(rng.gen_range(0..*p)),
            FieldKind::Binary(k) => Val::P(rng.gen_range(0..1u64 << k)),
        }
    }

    /// Parses a value as printed by `Display`.
    pub fn parse_val(&self, s: &str) -> Result<Val> {
        let bad = || Error::Invalid(format!("bad field value {s}"));
        match self {
            FieldKind::Rationals => s.parse::<BigRational>().map(Val::Q).map_err(|_| bad()),
            FieldKind::Prime(_) | FieldKind::Binary(_) => {
                let q = self.order().expect("finite");
                s.parse::<u64>().ok().filter(|x| *x < q).map(Val::P).ok_or_else(bad)
            }
        }
    }
}

/// Roots in `x` of `f(x) = lhs − rhs` with the other parameters fixed.
fn solve_for<R: Rng>(field: FieldKind, c: &Constraint, vals: &mut [Val], x: usize, rng: &mut R) -> bool {
    let f = |vals: &mut [Val], v: Val| -> Option<Val> {
        vals[x] = v;
        let l = field.eval(&c.lhs, vals)?;
        let r = field.eval(&c.rhs, vals)?;
        Some(field.add(&l, &field.neg(&r)))
    };
    match field {
        FieldKind::Prime(_) | FieldKind::Binary(_) => {
            let q = field.order().expect("finite");
            let roots: Vec<u64> = (0..q).filter(|&v| f(vals, Val::P(v)).is_some_and(|y| field.is_zero(&y))).collect();
            if roots.is_empty() {
                return false;
            }
            vals[x] = Val::P(roots[rng.gen_range(0..roots.len())]);
            true
        }
        FieldKind::Rationals => {
            // fit a polynomial of degree ≤ 2 through nonsingular sample points
            let mut pts: Vec<(BigRational, BigRational)> = Vec::new();
            for k in 0..12i64 {
                let xv = BigRational::from_integer(BigInt::from(k * 3 + 1));
                if let Some(Val::Q(y)) = f(vals, Val::Q(xv.clone())) {
                    pts.push((xv, y));
                }
                if pts.len() == 4 {
                    break;
                }
            }
            if pts.len() < 4 {
                return false;
            }
            let coeffs = quadratic_through(&pts[..3]);
            let (x3, y3) = &pts[3];
            if eval_quadratic(&coeffs, x3) != *y3 {
                return false;
            }
            let [a, b, cc] = coeffs;
            let mut roots: Vec<BigRational> = Vec::new();
            if a.is_zero() {
                if !b.is_zero() {
                    roots.push(-cc / b);
                }
            } else {
                let disc = &b * &b - BigRational::from_integer(BigInt::from(4)) * &a * &cc;
                if let Some(s) = rational_sqrt(&disc) {
                    let two_a = BigRational::from_integer(BigInt::from(2)) * &a;
                    roots.push((-&b + &s) / &two_a);
                    roots.push((-&b - &s) / &two_a);
                }
            }
            roots.retain(|r| f(vals, Val::Q(r.clone())).is_some_and(|y| field.is_zero(&y)));
            if roots.is_empty() {
                return false;
            }
            vals[x] = Val::Q(roots[rng.gen_range(0..roots.len())].clone());
            true
        }
    }
}

fn quadratic_through(p: &[(BigRational, BigRational)]) -> [BigRational; 3] {
    // Newton form, expanded
    let (x0, y0) = &p[0];
    let (x1, y1) = &p[1];
    let (x2, y2) = &p[2];
    let d01 = (y1 - y0) / (x1 - x0);
    let d12 = (y2 - y1) / (x2 - x1);
    let a = (&d12 - &d01) / (x2 - x0);
    let b = &d01 - &a * (x0 + x1);
    let c = y0 - &d01 * x0 + &a * x0 * x1;
    [a, b, c]
}

fn eval_quadratic(c: &[BigRational; 3], x: &BigRational) -> BigRational {
    &c[0] * x * x + &c[1] * x + &c[2]
}

fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    (&n * &n == *q.numer() && &d * &d == *q.denom()).then(|| BigRational::new(n, d))
}

/// One attempt at a parameter tuple satisfying all constraints.
fn sample_tuple<R: Rng>(field: FieldKind, nparams: usize, cons: &[&Constraint], rng: &mut R) -> Option<Vec<Val>> {
    let mut vals: Vec<Val> = (0..nparams).map(|_| field.random(rng)).collect();
    let mut fixed = vec![false; nparams];
    for c in cons.iter().filter(|c| c.equal) {
        let mut vs = BTreeSet::new();
        c.lhs.vars(&mut vs);
        c.rhs.vars(&mut vs);
        let mut open: Vec<usize> = vs.into_iter().filter(|&v| !fixed[v]).collect();
        if open.is_empty() {
            continue;
        }
        // solve for one open parameter; the others keep their random values
        let mut solved = false;
        let start = rng.gen_range(0..open.len());
        open.rotate_left(start);
        for &x in &open {
            let backup = vals.clone();
            if solve_for(field, c, &mut vals, x, rng) {
                solved = true;
                break;
            }
            vals = backup;
        }
        if !solved {
            return None;
        }
        for v in open {
            fixed[v] = true;
        }
    }
    cons.iter().all(|c| field.holds(c, &vals) == Some(true)).then_some(vals)
}

// ---------------------------------------------------------------------------
// reports

/// A witness for a pattern.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    /// Field tag.
    pub field: String,
    /// Locus name (`generic` for the family constraints alone).
    pub locus: String,
    /// Parameter values, in parameter order.
    pub values: Vec<String>,
}

/// A realized zero pattern.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PatternEntry {
    /// Zero positions `(row, column)`, 1-based.
    pub zeros: Vec<(usize, usize)>,
    /// Characteristics with a witness.
    pub characteristics: BTreeSet<u64>,
    /// One witness per (field, locus) cell that met the pattern.
    pub witnesses: Vec<Witness>,
}

/// Realized patterns of a family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PatternReport {
    /// Matrix dimension.
    pub dim: usize,
    /// Seed of the sampler.
    pub seed: u64,
    /// Samples per field per locus.
    pub samples: usize,
    /// Field tags.
    pub fields: Vec<String>,
    /// Patterns keyed by the zero-position bitset (bit `i·dim + j`).
    pub patterns: BTreeMap<u64, PatternEntry>,
    /// Cells whose constraints could not be met.
    pub warnings: Vec<String>,
}

impl PatternReport {
    /// Adds the patterns of another report over the same dimension.
    pub fn merge(&mut self, other: PatternReport) {
        for (k, e) in other.patterns {
            match self.patterns.get_mut(&k) {
                Some(mine) => {
                    mine.characteristics.extend(e.characteristics);
                    mine.witnesses.extend(e.witnesses);
                }
                None => {
                    self.patterns.insert(k, e);
                }
            }
        }
        self.warnings.extend(other.warnings);
    }

    /// Bitsets of the realized patterns.
    pub fn bitsets(&self) -> BTreeSet<u64> {
        self.patterns.keys().copied().collect()
    }

    /// JSON form.
    pub fn to_json(&self) -> serde_json::Value {
        let n = self.dim;
        serde_json::json!({
            "dim": n,
            "seed": self.seed,
            "samples": self.samples,
            "fields": self.fields,
            "patterns": self.patterns.iter().map(|(k, e)| serde_json::json!({
                "bits": (0..n * n).map(|i| if k >> i & 1 == 1 { '1' } else { '0' }).collect::<String>(),
                "zeros": e.zeros,
                "characteristics": e.characteristics,
                "witnesses": e.witnesses,
            })).collect::<Vec<_>>(),
            "warnings": self.warnings,
        })
    }
}

/// Sampling options.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleConfig {
    /// Fields to sample.
    pub fields: Vec<FieldKind>,
    /// Samples per field per locus.
    pub samples: usize,
    /// Seed.
    pub seed: u64,
    /// Attempts per sample before giving up on it.
    pub retries: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            fields: vec![FieldKind::Rationals, FieldKind::Prime(2), FieldKind::Prime(3), FieldKind::Binary(2), FieldKind::Prime(5)],
            samples: 2000,
            seed: 0x5eed,
            retries: 20,
        }
    }
}

fn zero_bits(field: FieldKind, f: &ParamFamily, vals: &[Val]) -> Option<u64> {
    let n = f.dim();
    let mut bits = 0u64;
    for (i, row) in f.matrix.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            if field.is_zero(&field.eval(e, vals)?) {
                bits |= 1 << (i * n + j);
            }
        }
    }
    Some(bits)
}

/// Samples every (field, locus) cell, the family constraints alone forming the
/// `generic` locus.
pub fn realizable_patterns(f: &ParamFamily, cfg: &OracleConfig) -> PatternReport {
    let n = f.dim();
    let generic = Locus { name: "generic".into(), constraints: Vec::new() };
    let loci: Vec<&Locus> = std::iter::once(&generic).chain(f.loci.iter()).collect();
    let cells: Vec<(usize, FieldKind, usize)> = cfg
        .fields
        .iter()
        .enumerate()
        .flat_map(|(fi, &k)| (0..loci.len()).map(move |li| (fi, k, li)))
        .collect();
    let results: Vec<(BTreeMap<u64, Witness>, Option<String>)> = cells
        .par_iter()
        .map(|&(fi, field, li)| {
            let locus = loci[li];
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ ((fi as u64) << 32) ^ (li as u64).wrapping_mul(0x9e37_79b9));
            let cons: Vec<&Constraint> = locus.constraints.iter().chain(f.constraints.iter()).collect();
            let mut found: BTreeMap<u64, Witness> = BTreeMap::new();
            let mut hits = 0;
            for _ in 0..cfg.samples {
                for _ in 0..cfg.retries.max(1) {
                    if let Some(vals) = sample_tuple(field, f.params.len(), &cons, &mut rng) {
                        if let Some(bits) = zero_bits(field, f, &vals) {
                            hits += 1;
                            found.entry(bits).or_insert_with(|| Witness {
                                field: field.tag(),
                                locus: locus.name.clone(),
                                values: vals.iter().map(|v| v.to_string()).collect(),
                            });
                            break;
                        }
                    }
                }
            }
            let warn = (hits == 0).then(|| format!("{}: locus {} not met", field.tag(), locus.name));
            (found, warn)
        })
        .collect();
    let mut patterns: BTreeMap<u64, PatternEntry> = BTreeMap::new();
    let mut warnings = Vec::new();
    for (&(_, field, _), (found, warn)) in cells.iter().zip(results) {
        warnings.extend(warn);
        for (bits, w) in found {
            let e = patterns.entry(bits).or_insert_with(|| PatternEntry {
                zeros: (0..n * n).filter(|i| bits >> i & 1 == 1).map(|i| (i / n + 1, i % n + 1)).collect(),
                characteristics: BTreeSet::new(),
                witnesses: Vec::new(),
            });
            e.characteristics.insert(field.characteristic());
            e.witnesses.push(w);
        }
    }
    PatternReport {
        dim: n,
        seed: cfg.seed,
        samples: cfg.samples,
        fields: cfg.fields.iter().map(|k| k.tag()).collect(),
        patterns,
        warnings,
    }
}

/// Re-evaluates every witness of a report against the family (or charts).
pub fn verify_witnesses(charts: &[ParamFamily], r: &PatternReport) -> bool {
    r.patterns.iter().all(|(&bits, e)| {
        e.witnesses.iter().all(|w| {
            let Ok(field) = FieldKind::parse(&w.field) else { return false };
            charts.iter().any(|f| {
                if f.params.len() != w.values.len() {
                    return false;
                }
                let Ok(vals) = w.values.iter().map(|s| field.parse_val(s)).collect::<Result<Vec<_>>>() else {
                    return false;
                };
                let locus = f.loci.iter().find(|l| l.name == w.locus).map(|l| l.constraints.as_slice()).unwrap_or(&[]);
                locus.iter().chain(&f.constraints).all(|c| field.holds(c, &vals) == Some(true))
                    && zero_bits(field, f, &vals) == Some(bits)
            })
        })
    })
}

/// Patterns of several charts of one group, merged.
pub fn realizable_patterns_charts(charts: &[ParamFamily], cfg: &OracleConfig) -> PatternReport {
    let mut it = charts.iter();
    let first = it.next().expect("at least one chart");
    let mut r = realizable_patterns(first, cfg);
    for f in it {
        r.merge(realizable_patterns(f, cfg));
    }
    r
}

/// Agreement between realized patterns and spectrum points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpectrumComparison {
    /// Points realized by some pattern.
    pub matched: Vec<String>,
    /// Spectrum points without a pattern.
    pub missing: Vec<String>,
    /// Patterns that are no spectrum point, as zero generator sets.
    pub extra: Vec<String>,
}

impl SpectrumComparison {
    /// True when the two sets coincide.
    pub fn agrees(&self) -> bool {
        self.missing.is_empty() && self.extra.is_empty()
    }
}

/// Generators vanishing under a zero-position bitset, per the model's layout.
pub fn pattern_generators(g: &GroupModel, bits: u64) -> Result<GenSet> {
    let lay = g.layout.as_ref().ok_or_else(|| Error::Unsupported(format!("{} is not a matrix model", g.name)))?;
    let n = lay.dim;
    let mut out = GenSet::EMPTY;
    for i in 0..n {
        for j in 0..n {
            if let Cell::Gen(k) = lay.cells[i][j] {
                if bits >> (i * n + j) & 1 == 1 {
                    out = out.union(GenSet::from_indices([k]));
                }
            }
        }
    }
    Ok(out)
}

/// Compares the patterns of a report with the points of a spectrum.
pub fn compare_with_spectrum(g: &GroupModel, s: &SpectrumPoset, r: &PatternReport) -> Result<SpectrumComparison> {
    let names = &g.presentation.names;
    let pats: BTreeSet<GenSet> = r.patterns.keys().map(|&b| pattern_generators(g, b)).collect::<Result<_>>()?;
    let pts: BTreeSet<GenSet> = s.points.iter().map(|p| p.vars).collect();
    let label = |v: &GenSet| crate::spectrum::PrimePoint { vars: *v }.label(names);
    Ok(SpectrumComparison {
        matched: s.points.iter().filter(|p| pats.contains(&p.vars)).map(|p| p.label(names)).collect(),
        missing: s.points.iter().filter(|p| !pats.contains(&p.vars)).map(|p| p.label(names)).collect(),
        extra: pats.iter().filter(|v| !pts.contains(v)).map(label).collect(),
    })
}

/// Built-in families (as lists of charts): `sl2`, `psl2-conj`, `psl2-adj`.
pub fn builtin_family(name: &str) -> Option<Vec<ParamFamily>> {
    let texts: &[&str] = match name {
        "sl2" | "sl:2" => &[SL2],
        "psl2-conj" => &[PSL2_CONJ],
        "psl2-adj" => &[PSL2_ADJ_BOREL, PSL2_ADJ_BIG],
        _ => return None,
    };
    Some(texts.iter().map(|t| parse_family(t).expect("built-in family parses")).collect())
}

/// Name of the built-in family matching a catalog model, if any.
pub fn family_for_model(model: &str) -> Option<&'static str> {
    match model {
        "sl:2" | "sl2" => Some("sl2"),
        "psl2-conj" => Some("psl2-conj"),
        "psl2-adj" => Some("psl2-adj"),
        _ => None,
    }
}

/// All determinant-one `2×2` matrices.
pub const SL2: &str = "\
params: a, b, c, d
constraints: a*d - b*c = 1
matrix: [[a, b], [c, d]]
loci:
  a0 { a = 0 }
  b0 { b = 0 }
  c0 { c = 0 }
  d0 { d = 0 }
  diagonal { b = 0, c = 0 }
  antidiagonal { a = 0, d = 0 }
";

/// Conjugation action of `SL_2` on `2×2` matrices.
pub const PSL2_CONJ: &str = "\
params: a, b, c, d
constraints: a*d - b*c = 1
matrix: [[a*d, -a*c, b*d, -b*c], [-a*b, a^2, -b^2, a*b], [c*d, -c^2, d^2, -c*d], [-b*c, a*c, -b*d, a*d]]
loci:
  a0 { a = 0 }
  b0 { b = 0 }
  c0 { c = 0 }
  d0 { d = 0 }
  diagonal { b = 0, c = 0 }
  antidiagonal { a = 0, d = 0 }
";

/// Adjoint action of `SL_2`, Borel cell.
pub const PSL2_ADJ_BOREL: &str = "\
params: lambda, t
constraints: lambda != 0
matrix: [[lambda^-2, lambda^-2*t, -lambda^-2*t^2], [0, 1, -2*t], [0, 0, lambda^2]]
loci:
  t0 { t = 0 }
  t_nonzero { t != 0 }
";

/// Adjoint action of `SL_2`, big cell.
pub const PSL2_ADJ_BIG: &str = "\
params: lambda, s, t
constraints: lambda != 0
matrix: [[lambda^-2*s^2, -s + lambda^-2*t*s^2, -lambda^2 + 2*s*t - lambda^-2*s^2*t^2], [2*lambda^-2*s, -1 + 2*lambda^-2*s*t, 2*t - 2*lambda^-2*s*t^2], [-lambda^-2, -lambda^-2*t, lambda^-2*t^2]]
loci:
  s0_t0 { s = 0, t = 0 }
  s0 { s = 0, t != 0 }
  t0 { t = 0, s != 0 }
  st_lambda2 { s*t = lambda^2, s != 0 }
  two_st_lambda2 { 2*s*t = lambda^2, s != 0 }
";

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> OracleConfig {
        OracleConfig { samples: 200, ..OracleConfig::default() }
    }

    #[test]
    fn parses_and_round_trips() {
        for name in ["sl2", "psl2-conj", "psl2-adj"] {
            for f in builtin_family(name).unwrap() {
                assert_eq!(parse_family(&f.render()).unwrap(), f);
            }
        }
        let p = vec!["lambda".to_string(), "t".to_string()];
        assert!(parse_expr("-lambda^-2*t^2", &p).is_ok());
        assert!(parse_constraints("lambda*t = 1", &p).is_ok());
    }

    #[test]
    fn parse_errors_carry_positions() {
        let p = vec!["a".to_string()];
        assert_eq!(parse_expr("a + * a", &p), Err(Error::Parse { pos: 4, msg: "expected an expression".into() }));
        assert!(matches!(parse_expr("a + b", &p), Err(Error::Parse { pos: 4, .. })));
        let bad = "params: a\nconstraints: a = = 1\nmatrix: [[a]]\n";
        assert!(matches!(parse_family(bad), Err(Error::Parse { pos: 27, .. })));
    }

    #[test]
    fn field_arithmetic() {
        let f = FieldKind::Prime(5);
        let p = vec!["x".to_string()];
        let e = parse_expr("x^-1 * x", &p).unwrap();
        assert_eq!(f.eval(&e, &[Val::P(3)]), Some(Val::P(1)));
        assert_eq!(f.eval(&e, &[Val::P(0)]), None);
        let q = FieldKind::Rationals;
        let e = parse_expr("(x + 1)/2", &p).unwrap();
        assert_eq!(q.eval(&e, &[q.parse_val("1/3").unwrap()]).unwrap().to_string(), "2/3");
        let f4 = FieldKind::parse("F4").unwrap();
        assert_eq!(f4, FieldKind::Binary(2));
        let cube = parse_expr("x^3", &p).unwrap();
        for x in 1..4 {
            assert_eq!(f4.eval(&cube, &[Val::P(x)]), Some(Val::P(1)));
        }
        assert!(FieldKind::parse("F6").is_err());
    }

    #[test]
    fn conj_loci() {
        let f = &builtin_family("psl2-conj").unwrap()[0];
        let r = realizable_patterns(f, &small());
        let diag: u64 = [1u64, 2, 3, 4, 6, 7, 8, 9, 11, 12, 13, 14].iter().map(|i| 1 << i).sum();
        let anti: u64 = [0u64, 1, 2, 4, 5, 7, 8, 10, 11, 13, 14, 15].iter().map(|i| 1 << i).sum();
        assert!(r.patterns.contains_key(&diag));
        assert!(r.patterns.contains_key(&anti));
        assert!(verify_witnesses(std::slice::from_ref(f), &r));
    }

    #[test]
    fn adjoint_antidiagonal() {
        let f = &builtin_family("psl2-adj").unwrap()[1];
        let r = realizable_patterns(f, &small());
        let anti: u64 = [0u64, 1, 3, 5, 7, 8].iter().map(|i| 1 << i).sum();
        assert!(r.patterns[&anti].witnesses.iter().any(|w| w.locus == "s0_t0"));
    }
}
