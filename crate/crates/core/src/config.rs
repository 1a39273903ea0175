//! Flat `key = value` experiment configs, one key per line, `#` comments.
//!
//! ```text
//! # trivial J: probability that 2 relators fail to generate F_3^2
//! n = 2
//! l = 10..50 step 10
//! rho = 2
//! j = trivial
//! f = 0 0
//! q = 3
//! trials = 100000
//! seed = 1
//! ```
//!
//! `l` accepts a single length, a comma list (`4, 8, 16`) or an inclusive
//! range with optional step (`2..40 step 2`).

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fqlin::Modulus;
use crate::groups::{Elem, GroupSpec, MarkedFiniteGroup};
use crate::schreier::SchreierSystem;

const KEYS: [&str; 8] = ["n", "l", "rho", "j", "f", "q", "trials", "seed"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExperimentConfig {
    pub n: usize,
    pub lengths: Vec<usize>,
    pub rho: usize,
    #[serde(serialize_with = "display")]
    pub j: GroupSpec,
    pub f: Vec<Elem>,
    pub q: u32,
    pub trials: usize,
    pub seed: u64,
}

fn display<S: serde::Serializer>(spec: &GroupSpec, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(spec)
}

/// Parses a length list such as `7`, `4, 8, 16` or `2..40 step 2`; `line`
/// is used in error messages.
pub fn parse_lengths(value: &str, line: usize) -> Result<Vec<usize>> {
    let bad = |what: &str| Error::parse(line, format!("bad length spec {value:?}: {what}"));
    let num = |t: &str| {
        t.trim()
            .parse::<usize>()
            .map_err(|_| bad("expected integers"))
    };
    let lengths: Vec<usize> = if let Some((range, step)) = value.split_once("step") {
        let step = num(step)?;
        let (a, b) = range
            .split_once("..")
            .ok_or_else(|| bad("step needs a range"))?;
        if step == 0 {
            return Err(bad("step must be positive"));
        }
        (num(a)?..=num(b)?).step_by(step).collect()
    } else if let Some((a, b)) = value.split_once("..") {
        (num(a)?..=num(b)?).collect()
    } else {
        value.split(',').map(num).collect::<Result<_>>()?
    };
    if lengths.is_empty() || lengths.contains(&0) {
        return Err(bad("lengths must be positive and nonempty"));
    }
    Ok(lengths)
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut values: [Option<(usize, String)>; 8] = Default::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| Error::parse(line, "expected `key = value`"))?;
            let key = key.trim();
            let slot = KEYS
                .iter()
                .position(|&k| k == key)
                .ok_or_else(|| Error::parse(line, format!("unknown key {key:?}")))?;
            if values[slot].is_some() {
                return Err(Error::parse(line, format!("duplicate key {key:?}")));
            }
            values[slot] = Some((line, value.trim().to_string()));
        }
        let take = |k: usize| -> Result<(usize, String)> {
            values[k]
                .clone()
                .ok_or_else(|| Error::invalid(format!("missing field `{}`", KEYS[k])))
        };
        fn int<T: std::str::FromStr>((line, v): (usize, String), key: &str) -> Result<T> {
            v.parse().map_err(|_| {
                Error::parse(
                    line,
                    format!("`{key}` must be a nonnegative integer, got {v:?}"),
                )
            })
        }
        let (l_line, l_text) = take(1)?;
        let (j_line, j_text) = take(3)?;
        let (f_line, f_text) = take(4)?;
        let f = f_text
            .split_whitespace()
            .map(|t| {
                t.parse()
                    .map_err(|_| Error::parse(f_line, format!("bad f-image {t:?}")))
            })
            .collect::<Result<Vec<Elem>>>()?;
        let config = ExperimentConfig {
            n: int(take(0)?, "n")?,
            lengths: parse_lengths(&l_text, l_line)?,
            rho: int(take(2)?, "rho")?,
            j: j_text
                .parse()
                .map_err(|e: Error| Error::parse(j_line, e.to_string()))?,
            f,
            q: int(take(5)?, "q")?,
            trials: int(take(6)?, "trials")?,
            seed: int(take(7)?, "seed")?,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::invalid("n must be at least 2"));
        }
        if self.rho < 1 {
            return Err(Error::invalid("rho must be at least 1"));
        }
        if self.trials < 1 {
            return Err(Error::invalid("trials must be at least 1"));
        }
        if self.f.len() != self.n {
            return Err(Error::invalid(format!(
                "f lists {} images but n = {}",
                self.f.len(),
                self.n
            )));
        }
        Modulus::new(self.q)?;
        Ok(())
    }

    /// The marked quotient `J` with marks `f`.
    pub fn marked_j(&self) -> Result<MarkedFiniteGroup> {
        self.j.build()?.mark(self.f.clone())
    }

    pub fn system(&self) -> Result<SchreierSystem> {
        SchreierSystem::build(self.marked_j()?, self.q)
    }

    /// Canonical text form; parses back to an equal config.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let lengths: Vec<String> = self.lengths.iter().map(|l| l.to_string()).collect();
        let f: Vec<String> = self.f.iter().map(|x| x.to_string()).collect();
        writeln!(out, "n = {}", self.n).unwrap();
        writeln!(out, "l = {}", lengths.join(", ")).unwrap();
        writeln!(out, "rho = {}", self.rho).unwrap();
        writeln!(out, "j = {}", self.j).unwrap();
        writeln!(out, "f = {}", f.join(" ")).unwrap();
        writeln!(out, "q = {}", self.q).unwrap();
        writeln!(out, "trials = {}", self.trials).unwrap();
        writeln!(out, "seed = {}", self.seed).unwrap();
        out
    }
}
