use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use lop_core::bang::affine_check;
use lop_core::prelude::Prelude;
use lop_core::syntax::{parse_with, ParseOptions};
use lop_core::{Calculus, Error, Term};

/// Where the input term comes from, and which definitions it may use.
#[derive(Args, Debug)]
pub struct TermInput {
    /// Term given on the command line.
    #[arg(
        short = 'e',
        long = "expr",
        value_name = "TERM",
        conflicts_with = "file"
    )]
    pub expr: Option<String>,

    /// File holding the term.
    #[arg(value_name = "FILE")]
    pub file: Option<PathBuf>,

    /// Extra definitions (`NAME = term` per line), on top of the standard
    /// prelude.
    #[arg(long, value_name = "FILE", env = "LOP_PRELUDE")]
    pub prelude: Option<PathBuf>,

    /// Do not load the standard prelude.
    #[arg(long)]
    pub no_prelude: bool,
}

impl TermInput {
    pub fn is_given(&self) -> bool {
        self.expr.is_some() || self.file.is_some()
    }

    fn text(&self) -> Result<String> {
        match (&self.expr, &self.file) {
            (Some(e), _) => Ok(e.clone()),
            (None, Some(p)) => {
                fs::read_to_string(p).with_context(|| format!("cannot read {}", p.display()))
            }
            (None, None) => bail!("no input term: pass -e TERM or a file"),
        }
    }

    pub fn prelude(&self) -> Result<Prelude> {
        let mut p = if self.no_prelude {
            Prelude::empty()
        } else {
            Prelude::standard()
        };
        if let Some(path) = &self.prelude {
            let text = fs::read_to_string(path)
                .with_context(|| format!("cannot read prelude {}", path.display()))?;
            p.extend_from_text(&text)
                .with_context(|| format!("in prelude {}", path.display()))?;
        }
        Ok(p)
    }

    /// Parses the input in `calculus`, expands prelude names and checks the
    /// result against the calculus.
    pub fn term(&self, calculus: Calculus) -> Result<Term> {
        let opts = ParseOptions {
            affine_check: false,
            ..ParseOptions::default()
        };
        let raw = parse_with(&self.text()?, calculus, opts)?;
        let t = self.prelude()?.expand(&raw);
        t.check_calculus(calculus)?;
        if calculus == Calculus::Bang {
            let (ok, violations) = affine_check(&t);
            if !ok {
                return Err(Error::NotAffine(violations).into());
            }
        }
        Ok(t)
    }
}
