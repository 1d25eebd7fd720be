//! The term language shared by the three calculi.
//!
//! Terms keep their binder names for display. Comparison, hashing and
//! ordering go through the nameless [`Canon`] encoding, so `==` on [`Term`]
//! is α-equivalence.

use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Names reserved for the variables introduced by translations.
pub const RESERVED_Z: &str = "__z";
pub const RESERVED_W: &str = "__w";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Calculus {
    Cbv,
    Cbn,
    Bang,
}

impl Calculus {
    pub const ALL: [Calculus; 3] = [Calculus::Cbv, Calculus::Cbn, Calculus::Bang];

    pub fn name(self) -> &'static str {
        match self {
            Calculus::Cbv => "cbv",
            Calculus::Cbn => "cbn",
            Calculus::Bang => "bang",
        }
    }
}

impl fmt::Display for Calculus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Calculus {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cbv" => Ok(Calculus::Cbv),
            "cbn" => Ok(Calculus::Cbn),
            "bang" => Ok(Calculus::Bang),
            _ => Err(Error::Unknown {
                what: "calculus",
                name: s.to_string(),
            }),
        }
    }
}

#[derive(Clone, Debug)]
pub enum Term {
    Var(String),
    Lam(String, Box<Term>),
    BangLam(String, Box<Term>),
    App(Box<Term>, Box<Term>),
    Bang(Box<Term>),
    Choice(Box<Term>, Box<Term>),
}

/// Nameless form of a term: bound variables become de Bruijn indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Canon {
    Bound(u32),
    Free(String),
    Lam(Box<Canon>),
    BangLam(Box<Canon>),
    App(Box<Canon>, Box<Canon>),
    Bang(Box<Canon>),
    Choice(Box<Canon>, Box<Canon>),
}

/// One step of a path from the root of a term to a subterm.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Step {
    Fun,
    Arg,
    Body,
    Left,
    Right,
    BangBody,
}

impl Step {
    pub fn name(self) -> &'static str {
        match self {
            Step::Fun => "fun",
            Step::Arg => "arg",
            Step::Body => "body",
            Step::Left => "left",
            Step::Right => "right",
            Step::BangBody => "bang-body",
        }
    }
}

impl FromStr for Step {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "fun" => Step::Fun,
            "arg" => Step::Arg,
            "body" => Step::Body,
            "left" => Step::Left,
            "right" => Step::Right,
            "bang-body" => Step::BangBody,
            _ => {
                return Err(Error::Unknown {
                    what: "position step",
                    name: s.to_string(),
                })
            }
        })
    }
}

/// A path from the root of a term. The empty path is the root.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Position(pub Vec<Step>);

impl Position {
    pub fn root() -> Self {
        Position(Vec::new())
    }

    pub fn steps(&self) -> &[Step] {
        &self.0
    }

    pub fn child(&self, s: Step) -> Position {
        let mut v = self.0.clone();
        v.push(s);
        Position(v)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("root");
        }
        let parts: Vec<&str> = self.0.iter().map(|s| s.name()).collect();
        f.write_str(&parts.join("."))
    }
}

impl FromStr for Position {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "root" {
            return Ok(Position::root());
        }
        s.split('.')
            .map(Step::from_str)
            .collect::<Result<Vec<_>>>()
            .map(Position)
    }
}

impl Term {
    pub fn var(x: impl Into<String>) -> Term {
        Term::Var(x.into())
    }

    pub fn lam(x: impl Into<String>, body: Term) -> Term {
        Term::Lam(x.into(), Box::new(body))
    }

    pub fn bang_lam(x: impl Into<String>, body: Term) -> Term {
        Term::BangLam(x.into(), Box::new(body))
    }

    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Box::new(f), Box::new(a))
    }

    pub fn bang(t: Term) -> Term {
        Term::Bang(Box::new(t))
    }

    pub fn choice(l: Term, r: Term) -> Term {
        Term::Choice(Box::new(l), Box::new(r))
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::Lam(_, b) | Term::BangLam(_, b) | Term::Bang(b) => 1 + b.size(),
            Term::App(a, b) | Term::Choice(a, b) => 1 + a.size() + b.size(),
        }
    }

    /// Variables and λ-abstractions.
    pub fn is_value(&self) -> bool {
        matches!(self, Term::Var(_) | Term::Lam(..))
    }

    pub fn has_bang_constructs(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::BangLam(..) | Term::Bang(_) => true,
            Term::Lam(_, b) => b.has_bang_constructs(),
            Term::App(a, b) | Term::Choice(a, b) => {
                a.has_bang_constructs() || b.has_bang_constructs()
            }
        }
    }

    pub fn has_choice(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Choice(..) => true,
            Term::Lam(_, b) | Term::BangLam(_, b) | Term::Bang(b) => b.has_choice(),
            Term::App(a, b) => a.has_choice() || b.has_choice(),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        let mut bound = Vec::new();
        collect_free(self, &mut bound, &mut out);
        out
    }

    pub fn occurs_free(&self, x: &str) -> bool {
        match self {
            Term::Var(y) => y == x,
            Term::Lam(y, b) | Term::BangLam(y, b) => y != x && b.occurs_free(x),
            Term::Bang(b) => b.occurs_free(x),
            Term::App(a, b) | Term::Choice(a, b) => a.occurs_free(x) || b.occurs_free(x),
        }
    }

    /// Capture-avoiding substitution `self[arg/x]`.
    pub fn subst(&self, x: &str, arg: &Term) -> Term {
        let fv = arg.free_vars();
        self.subst_with(x, arg, &fv)
    }

    fn subst_with(&self, x: &str, arg: &Term, fv: &BTreeSet<String>) -> Term {
        match self {
            Term::Var(y) => {
                if y == x {
                    arg.clone()
                } else {
                    self.clone()
                }
            }
            Term::Lam(y, b) => {
                let (y, b) = subst_binder(y, b, x, arg, fv);
                Term::Lam(y, Box::new(b))
            }
            Term::BangLam(y, b) => {
                let (y, b) = subst_binder(y, b, x, arg, fv);
                Term::BangLam(y, Box::new(b))
            }
            Term::Bang(b) => Term::Bang(Box::new(b.subst_with(x, arg, fv))),
            Term::App(a, b) => Term::App(
                Box::new(a.subst_with(x, arg, fv)),
                Box::new(b.subst_with(x, arg, fv)),
            ),
            Term::Choice(a, b) => Term::Choice(
                Box::new(a.subst_with(x, arg, fv)),
                Box::new(b.subst_with(x, arg, fv)),
            ),
        }
    }

    pub fn canonical(&self) -> Canon {
        let mut env: Vec<&str> = Vec::new();
        canon(self, &mut env)
    }

    pub fn alpha_eq(&self, other: &Term) -> bool {
        let mut ea = Vec::new();
        let mut eb = Vec::new();
        alpha(self, other, &mut ea, &mut eb)
    }

    pub fn at(&self, pos: &Position) -> Option<&Term> {
        let mut t = self;
        for s in pos.steps() {
            t = t.child(*s)?;
        }
        Some(t)
    }

    pub fn child(&self, s: Step) -> Option<&Term> {
        match (self, s) {
            (Term::App(f, _), Step::Fun) => Some(f),
            (Term::App(_, a), Step::Arg) => Some(a),
            (Term::Lam(_, b), Step::Body) | (Term::BangLam(_, b), Step::Body) => Some(b),
            (Term::Choice(l, _), Step::Left) => Some(l),
            (Term::Choice(_, r), Step::Right) => Some(r),
            (Term::Bang(b), Step::BangBody) => Some(b),
            _ => None,
        }
    }

    /// Rebuilds the term with the subterm at `pos` replaced by `f(subterm)`.
    pub fn replace_at(&self, pos: &[Step], f: &mut dyn FnMut(&Term) -> Term) -> Option<Term> {
        let Some((s, rest)) = pos.split_first() else {
            return Some(f(self));
        };
        Some(match (self, s) {
            (Term::App(a, b), Step::Fun) => Term::App(Box::new(a.replace_at(rest, f)?), b.clone()),
            (Term::App(a, b), Step::Arg) => Term::App(a.clone(), Box::new(b.replace_at(rest, f)?)),
            (Term::Lam(x, b), Step::Body) => Term::Lam(x.clone(), Box::new(b.replace_at(rest, f)?)),
            (Term::BangLam(x, b), Step::Body) => {
                Term::BangLam(x.clone(), Box::new(b.replace_at(rest, f)?))
            }
            (Term::Choice(a, b), Step::Left) => {
                Term::Choice(Box::new(a.replace_at(rest, f)?), b.clone())
            }
            (Term::Choice(a, b), Step::Right) => {
                Term::Choice(a.clone(), Box::new(b.replace_at(rest, f)?))
            }
            (Term::Bang(b), Step::BangBody) => Term::Bang(Box::new(b.replace_at(rest, f)?)),
            _ => return None,
        })
    }

    /// Fails when the term uses `!` or `λ!` outside the linear calculus.
    pub fn check_calculus(&self, calculus: Calculus) -> Result<()> {
        if calculus != Calculus::Bang {
            if let Some(c) = first_bang_construct(self) {
                return Err(Error::ForeignConstructor {
                    construct: c,
                    calculus,
                });
            }
        }
        Ok(())
    }
}

fn first_bang_construct(t: &Term) -> Option<&'static str> {
    match t {
        Term::Var(_) => None,
        Term::BangLam(..) => Some("bang abstraction `\\!x.`"),
        Term::Bang(_) => Some("bang `!`"),
        Term::Lam(_, b) => first_bang_construct(b),
        Term::App(a, b) | Term::Choice(a, b) => {
            first_bang_construct(a).or_else(|| first_bang_construct(b))
        }
    }
}

fn collect_free<'a>(t: &'a Term, bound: &mut Vec<&'a str>, out: &mut BTreeSet<String>) {
    match t {
        Term::Var(x) => {
            if !bound.contains(&x.as_str()) {
                out.insert(x.clone());
            }
        }
        Term::Lam(x, b) | Term::BangLam(x, b) => {
            bound.push(x);
            collect_free(b, bound, out);
            bound.pop();
        }
        Term::Bang(b) => collect_free(b, bound, out),
        Term::App(a, b) | Term::Choice(a, b) => {
            collect_free(a, bound, out);
            collect_free(b, bound, out);
        }
    }
}

fn subst_binder(
    y: &str,
    body: &Term,
    x: &str,
    arg: &Term,
    fv: &BTreeSet<String>,
) -> (String, Term) {
    if y == x || !body.occurs_free(x) {
        return (y.to_string(), body.clone());
    }
    if fv.contains(y) {
        let fresh = fresh_name(y, |c| c == x || fv.contains(c) || body.occurs_free(c));
        let renamed = body.subst(y, &Term::Var(fresh.clone()));
        let b = renamed.subst_with(x, arg, fv);
        (fresh, b)
    } else {
        (y.to_string(), body.subst_with(x, arg, fv))
    }
}

/// Appends primes to `base` until `taken` rejects the candidate.
pub fn fresh_name(base: &str, taken: impl Fn(&str) -> bool) -> String {
    let mut c = format!("{base}'");
    while taken(&c) {
        c.push('\'');
    }
    c
}

fn canon<'a>(t: &'a Term, env: &mut Vec<&'a str>) -> Canon {
    match t {
        Term::Var(x) => match env.iter().rev().position(|y| *y == x) {
            Some(i) => Canon::Bound(i as u32),
            None => Canon::Free(x.clone()),
        },
        Term::Lam(x, b) => {
            env.push(x);
            let c = canon(b, env);
            env.pop();
            Canon::Lam(Box::new(c))
        }
        Term::BangLam(x, b) => {
            env.push(x);
            let c = canon(b, env);
            env.pop();
            Canon::BangLam(Box::new(c))
        }
        Term::Bang(b) => Canon::Bang(Box::new(canon(b, env))),
        Term::App(a, b) => Canon::App(Box::new(canon(a, env)), Box::new(canon(b, env))),
        Term::Choice(a, b) => Canon::Choice(Box::new(canon(a, env)), Box::new(canon(b, env))),
    }
}

fn lookup(env: &[&str], x: &str) -> Option<usize> {
    env.iter().rev().position(|y| *y == x)
}

fn alpha<'a>(a: &'a Term, b: &'a Term, ea: &mut Vec<&'a str>, eb: &mut Vec<&'a str>) -> bool {
    match (a, b) {
        (Term::Var(x), Term::Var(y)) => match (lookup(ea, x), lookup(eb, y)) {
            (Some(i), Some(j)) => i == j,
            (None, None) => x == y,
            _ => false,
        },
        (Term::Lam(x, p), Term::Lam(y, q)) | (Term::BangLam(x, p), Term::BangLam(y, q)) => {
            ea.push(x);
            eb.push(y);
            let r = alpha(p, q, ea, eb);
            ea.pop();
            eb.pop();
            r
        }
        (Term::Bang(p), Term::Bang(q)) => alpha(p, q, ea, eb),
        (Term::App(p1, p2), Term::App(q1, q2)) | (Term::Choice(p1, p2), Term::Choice(q1, q2)) => {
            alpha(p1, q1, ea, eb) && alpha(p2, q2, ea, eb)
        }
        _ => false,
    }
}

impl PartialEq for Term {
    fn eq(&self, other: &Self) -> bool {
        self.alpha_eq(other)
    }
}

impl Eq for Term {}

impl Hash for Term {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.canonical().hash(state)
    }
}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Term {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.canonical().cmp(&other.canonical())
    }
}

// ---------------------------------------------------------------------------
// Printing

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_term(self, f)
    }
}

fn fmt_term(t: &Term, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match t {
        Term::Choice(l, r) => {
            match **l {
                Term::Choice(..) | Term::Lam(..) | Term::BangLam(..) => fmt_paren(l, f)?,
                _ => fmt_term(l, f)?,
            }
            f.write_str(" (+) ")?;
            match **r {
                Term::Choice(..) => fmt_paren(r, f),
                _ => fmt_term(r, f),
            }
        }
        Term::Lam(x, b) => {
            write!(f, "\\{x}. ")?;
            fmt_term(b, f)
        }
        Term::BangLam(x, b) => {
            write!(f, "\\!{x}. ")?;
            fmt_term(b, f)
        }
        Term::App(..) => fmt_app(t, f),
        Term::Var(_) | Term::Bang(_) => fmt_atom(t, f),
    }
}

fn fmt_app(t: &Term, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match t {
        Term::App(fun, arg) => {
            match **fun {
                Term::App(..) => fmt_app(fun, f)?,
                Term::Var(_) | Term::Bang(_) => fmt_atom(fun, f)?,
                _ => fmt_paren(fun, f)?,
            }
            f.write_str(" ")?;
            fmt_atom(arg, f)
        }
        _ => fmt_atom(t, f),
    }
}

fn fmt_atom(t: &Term, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match t {
        Term::Var(x) => f.write_str(x),
        Term::Bang(b) => {
            f.write_str("!")?;
            fmt_atom(b, f)
        }
        _ => fmt_paren(t, f),
    }
}

fn fmt_paren(t: &Term, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    f.write_str("(")?;
    fmt_term(t, f)?;
    f.write_str(")")
}

// ---------------------------------------------------------------------------
// Parsing

#[derive(Clone, Copy, Debug)]
pub struct ParseOptions {
    /// Run the affine check on linear-calculus input.
    pub affine_check: bool,
    /// Accept the translation variables `__z` and `__w`.
    pub allow_reserved: bool,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions {
            affine_check: true,
            allow_reserved: false,
        }
    }
}

pub fn parse(text: &str, calculus: Calculus) -> Result<Term> {
    parse_with(text, calculus, ParseOptions::default())
}

pub fn parse_with(text: &str, calculus: Calculus, opts: ParseOptions) -> Result<Term> {
    let tokens = lex(text, opts.allow_reserved)?;
    let mut p = Parser { tokens, pos: 0 };
    let t = p.term()?;
    if let Some(tok) = p.peek() {
        return Err(p.error_at(tok, "unexpected input after the end of the term"));
    }
    t.check_calculus(calculus)?;
    if calculus == Calculus::Bang && opts.affine_check {
        let violations = crate::bang::affine_violations(&t);
        if !violations.is_empty() {
            return Err(Error::NotAffine(violations));
        }
    }
    Ok(t)
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Lambda,
    Bang,
    Dot,
    LParen,
    RParen,
    Plus,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str, allow_reserved: bool) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let ident_char = |c: char| c.is_ascii_alphanumeric() || c == '_' || c == '\'';
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let push = |out: &mut Vec<Token>, tok| {
            out.push(Token {
                tok,
                line: l0,
                column: c0,
            })
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
                continue;
            }
            c if c.is_whitespace() => {}
            '-' if chars.get(i + 1) == Some(&'-') => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            '\\' | 'λ' => push(&mut out, Tok::Lambda),
            '!' => push(&mut out, Tok::Bang),
            '.' => push(&mut out, Tok::Dot),
            '⊕' => push(&mut out, Tok::Plus),
            '(' if chars.get(i + 1) == Some(&'+') && chars.get(i + 2) == Some(&')') => {
                push(&mut out, Tok::Plus);
                i += 3;
                col += 3;
                continue;
            }
            '(' => push(&mut out, Tok::LParen),
            ')' => push(&mut out, Tok::RParen),
            c if c.is_ascii_alphabetic() || (c == '_' && chars.get(i + 1) == Some(&'_')) => {
                let start = i;
                while i < chars.len() && ident_char(chars[i]) {
                    i += 1;
                }
                let name: String = chars[start..i].iter().collect();
                col += i - start;
                if name.starts_with('_') && !allow_reserved {
                    return Err(Error::Syntax {
                        line: l0,
                        column: c0,
                        message: format!("`{name}` is reserved"),
                    });
                }
                push(&mut out, Tok::Ident(name));
                continue;
            }
            _ => {
                return Err(Error::Syntax {
                    line,
                    column: col,
                    message: format!("unexpected character `{c}`"),
                })
            }
        }
        i += 1;
        col += 1;
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn peek_tok(&self) -> Option<&Tok> {
        self.peek().map(|t| &t.tok)
    }

    fn error_at(&self, tok: &Token, msg: &str) -> Error {
        Error::Syntax {
            line: tok.line,
            column: tok.column,
            message: msg.to_string(),
        }
    }

    fn error_here(&self, msg: &str) -> Error {
        match self.peek() {
            Some(t) => self.error_at(t, msg),
            None => {
                let (line, column) = self
                    .tokens
                    .last()
                    .map(|t| (t.line, t.column + 1))
                    .unwrap_or((1, 1));
                Error::Syntax {
                    line,
                    column,
                    message: format!("{msg} (at end of input)"),
                }
            }
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if self.peek_tok() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error_here(&format!("expected {what}")))
        }
    }

    fn term(&mut self) -> Result<Term> {
        let left = self.app()?;
        if self.peek_tok() != Some(&Tok::Plus) {
            return Ok(left);
        }
        self.pos += 1;
        let right = self.app()?;
        if self.peek_tok() == Some(&Tok::Plus) {
            return Err(self.error_here("`(+)` is not associative; add parentheses"));
        }
        Ok(Term::choice(left, right))
    }

    fn app(&mut self) -> Result<Term> {
        if self.peek_tok() == Some(&Tok::Lambda) {
            return self.lambda();
        }
        let mut t = self.atom()?;
        loop {
            match self.peek_tok() {
                Some(Tok::Ident(_)) | Some(Tok::LParen) | Some(Tok::Bang) => {
                    let a = self.atom()?;
                    t = Term::app(t, a);
                }
                Some(Tok::Lambda) => {
                    let a = self.lambda()?;
                    return Ok(Term::app(t, a));
                }
                _ => return Ok(t),
            }
        }
    }

    fn lambda(&mut self) -> Result<Term> {
        self.expect(Tok::Lambda, "`\\`")?;
        let banged = if self.peek_tok() == Some(&Tok::Bang) {
            self.pos += 1;
            true
        } else {
            false
        };
        let name = match self.peek_tok() {
            Some(Tok::Ident(x)) => x.clone(),
            _ => return Err(self.error_here("expected a binder name")),
        };
        self.pos += 1;
        self.expect(Tok::Dot, "`.` after the binder")?;
        let body = self.term()?;
        Ok(if banged {
            Term::bang_lam(name, body)
        } else {
            Term::lam(name, body)
        })
    }

    fn atom(&mut self) -> Result<Term> {
        match self.peek_tok().cloned() {
            Some(Tok::Ident(x)) => {
                self.pos += 1;
                Ok(Term::Var(x))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let t = self.term()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(t)
            }
            Some(Tok::Bang) => {
                self.pos += 1;
                let body = if self.peek_tok() == Some(&Tok::Lambda) {
                    self.lambda()?
                } else {
                    self.atom()?
                };
                Ok(Term::bang(body))
            }
            _ => Err(self.error_here("expected a term")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Term {
        parse(s, Calculus::Cbv).unwrap()
    }

    fn pb(s: &str) -> Term {
        parse(s, Calculus::Bang).unwrap()
    }

    #[test]
    fn parse_examples() {
        assert!(
            matches!(p("\\x. x"), Term::Lam(ref x, ref b) if x == "x" && matches!(**b, Term::Var(ref y) if y == "x"))
        );
        match p("(\\x.x) (+) y") {
            Term::Choice(l, r) => {
                assert!(matches!(*l, Term::Lam(..)));
                assert!(matches!(*r, Term::Var(ref y) if y == "y"));
            }
            t => panic!("unexpected {t:?}"),
        }
        match pb("\\!x. !x") {
            Term::BangLam(x, b) => {
                assert_eq!(x, "x");
                assert!(
                    matches!(*b, Term::Bang(ref v) if matches!(**v, Term::Var(ref y) if y == "x"))
                );
            }
            t => panic!("unexpected {t:?}"),
        }
    }

    #[test]
    fn print_examples() {
        assert_eq!(Term::lam("x", Term::var("x")).to_string(), "\\x. x");
        let xyz = Term::app(Term::app(Term::var("x"), Term::var("y")), Term::var("z"));
        assert_eq!(xyz.to_string(), "x y z");
        let c = Term::choice(Term::var("x"), Term::choice(Term::var("y"), Term::var("z")));
        assert_eq!(c.to_string(), "x (+) (y (+) z)");
        assert_eq!(pb("(\\!x. !x) !(I I)").to_string(), "(\\!x. !x) !(I I)");
        assert_eq!(p("x (y z)").to_string(), "x (y z)");
        assert_eq!(p("(\\x. x) (+) y").to_string(), "(\\x. x) (+) y");
        assert_eq!(p("\\x. x (+) y").to_string(), "\\x. x (+) y");
    }

    #[test]
    fn choice_is_not_associative() {
        let e = parse("x (+) y (+) z", Calculus::Cbv).unwrap_err();
        assert!(
            matches!(
                e,
                Error::Syntax {
                    line: 1,
                    column: 9,
                    ..
                }
            ),
            "{e:?}"
        );
    }

    #[test]
    fn lambda_extends_right() {
        assert_eq!(
            p("\\x. x y (+) z"),
            Term::lam("x", Term::choice(p("x y"), p("z")))
        );
        assert_eq!(p("f \\x. x"), Term::app(p("f"), p("\\x. x")));
    }

    #[test]
    fn syntax_errors_carry_location() {
        let e = parse("(\\x. x\n  y", Calculus::Cbv).unwrap_err();
        assert!(matches!(e, Error::Syntax { line: 2, .. }), "{e:?}");
        let e = parse("x $", Calculus::Cbv).unwrap_err();
        assert_eq!(
            e,
            Error::Syntax {
                line: 1,
                column: 3,
                message: "unexpected character `$`".into()
            }
        );
        assert!(parse("", Calculus::Cbv).is_err());
        assert!(parse("\\. x", Calculus::Cbv).is_err());
    }

    #[test]
    fn comments_are_skipped() {
        assert_eq!(p("-- identity\n\\x. x -- trailing"), p("\\y. y"));
    }

    #[test]
    fn foreign_constructors_rejected() {
        assert!(matches!(
            parse("!x", Calculus::Cbv),
            Err(Error::ForeignConstructor {
                calculus: Calculus::Cbv,
                ..
            })
        ));
        assert!(matches!(
            parse("\\!x. x", Calculus::Cbn),
            Err(Error::ForeignConstructor { .. })
        ));
    }

    #[test]
    fn reserved_names() {
        assert!(parse("__z x", Calculus::Cbv).is_err());
        let opts = ParseOptions {
            allow_reserved: true,
            ..Default::default()
        };
        let t = parse_with("__z x y", Calculus::Cbv, opts).unwrap();
        assert_eq!(t.to_string(), "__z x y");
    }

    #[test]
    fn free_vars_examples() {
        let set = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<BTreeSet<_>>();
        assert_eq!(p("\\x. x y").free_vars(), set(&["y"]));
        assert_eq!(p("x (+) \\x.x").free_vars(), set(&["x"]));
        assert_eq!(pb("\\!x. !(x y)").free_vars(), set(&["y"]));
    }

    #[test]
    fn subst_examples() {
        let r = p("\\y. x").subst("x", &p("\\z. z"));
        assert_eq!(r.to_string(), "\\y. \\z. z");
        let r = p("\\y. x").subst("x", &p("y"));
        assert_eq!(r.to_string(), "\\y'. y");
        let r = p("x x").subst("x", &p("\\z.z"));
        assert_eq!(r.to_string(), "(\\z. z) (\\z. z)");
        // shadowing leaves the body alone
        assert_eq!(p("\\x. x").subst("x", &p("y")).to_string(), "\\x. x");
        // the fresh name also avoids names free in the body
        let r = p("\\y. x y'").subst("x", &p("y"));
        assert_eq!(r.to_string(), "\\y''. y y'");
    }

    #[test]
    fn alpha_examples() {
        assert!(p("\\x. x").alpha_eq(&p("\\y. y")));
        assert!(!p("\\x. x y").alpha_eq(&p("\\y. y y")));
        assert!(pb("\\!x.!x").alpha_eq(&pb("\\!z.!z")));
        assert!(!pb("\\!x. x").alpha_eq(&pb("\\x. x")));
        assert_ne!(p("\\x. \\y. x"), p("\\x. \\y. y"));
        assert_eq!(p("\\x. \\y. x").canonical(), p("\\a. \\b. a").canonical());
    }

    #[test]
    fn values() {
        assert!(p("\\x. x (+) y").is_value());
        assert!(!p("(\\x.x)(\\y.y)").is_value());
        assert!(!p("x (+) y").is_value());
        assert!(p("x").is_value());
    }

    #[test]
    fn positions() {
        let t = p("x (I I) (I I)");
        let pos: Position = "fun.arg".parse().unwrap();
        assert_eq!(t.at(&pos).unwrap().to_string(), "I I");
        assert_eq!(pos.to_string(), "fun.arg");
        assert_eq!("root".parse::<Position>().unwrap(), Position::root());
        assert!(t.at(&"body".parse().unwrap()).is_none());
        let r = t.replace_at(pos.steps(), &mut |_| Term::var("z")).unwrap();
        assert_eq!(r.to_string(), "x z (I I)");
    }
}
