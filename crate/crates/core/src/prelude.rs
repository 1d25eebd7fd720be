//! Named fixtures (`T`, `F`, `I`, `D`, `O3`, `XOR`) substituted for free
//! occurrences of their names.

use crate::error::{Error, Result};
use crate::syntax::{parse_with, Calculus, ParseOptions, Term};

pub const STANDARD: &str = r"-- booleans
T = \x. \y. x
F = \x. \y. y
-- combinators
I = \x. x
D = \x. x x
O3 = \x. x x x
-- XOR a b = if a then not b else b
XOR = \a. \b. a (b F T) b
";

#[derive(Clone, Debug, Default)]
pub struct Prelude {
    defs: Vec<(String, Term)>,
}

impl Prelude {
    pub fn empty() -> Prelude {
        Prelude::default()
    }

    pub fn standard() -> Prelude {
        Prelude::parse(STANDARD).expect("standard prelude parses")
    }

    /// One `NAME = term` definition per line; `--` starts a comment.
    /// Later definitions may use earlier ones.
    pub fn parse(text: &str) -> Result<Prelude> {
        let mut p = Prelude::empty();
        p.extend_from_text(text)?;
        Ok(p)
    }

    pub fn extend_from_text(&mut self, text: &str) -> Result<()> {
        let opts = ParseOptions {
            affine_check: false,
            allow_reserved: false,
        };
        for (i, line) in text.lines().enumerate() {
            let code = line.split("--").next().unwrap_or("").trim();
            if code.is_empty() {
                continue;
            }
            let Some((name, body)) = code.split_once('=') else {
                return Err(Error::Syntax {
                    line: i + 1,
                    column: 1,
                    message: "expected `NAME = term`".into(),
                });
            };
            let name = name.trim();
            if name.is_empty()
                || !name
                    .chars()
                    .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
                || !name.starts_with(|c: char| c.is_ascii_alphabetic())
            {
                return Err(Error::Syntax {
                    line: i + 1,
                    column: 1,
                    message: format!("bad definition name `{name}`"),
                });
            }
            let term = parse_with(body, Calculus::Bang, opts).map_err(|e| match e {
                Error::Syntax {
                    column, message, ..
                } => Error::Syntax {
                    line: i + 1,
                    column: column + line.find('=').unwrap_or(0) + 1,
                    message,
                },
                other => other,
            })?;
            let term = self.expand(&term);
            self.defs.retain(|(n, _)| n != name);
            self.defs.push((name.to_string(), term));
        }
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&Term> {
        self.defs.iter().find(|(n, _)| n == name).map(|(_, t)| t)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.defs.iter().map(|(n, _)| n.as_str())
    }

    pub fn expand(&self, term: &Term) -> Term {
        let mut t = term.clone();
        for (name, def) in self.defs.iter().rev() {
            if t.occurs_free(name) {
                t = t.subst(name, def);
            }
        }
        t
    }
}
