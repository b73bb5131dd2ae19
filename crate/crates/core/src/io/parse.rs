//! The line-oriented ideal format.
//!
//! ```text
//! # the cusp
//! char: 0
//! vars: x1 x2 x3
//! gen: x1^2 - x2^3
//! ```
//!
//! `invertible: <name>+` marks variables that are units on the chart. A term is
//! `[coeff*] name^exp (* name^exp)*`; coefficients are integers or fractions.

use std::collections::HashMap;
use std::fmt;

use crate::chart::Chart;
use crate::error::{Error, Result};
use crate::field::{check_char, parse_q, FieldElement};
use crate::ideal::{normalize_generator, terms_str, Generator, Term, VarClass};
use crate::stratum::Stratum;

/// An ideal file before normalization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdealFile {
    pub characteristic: u64,
    pub vars: Vec<String>,
    pub invertible: Vec<String>,
    /// Generator source strings with their 1-based line and column.
    pub generators: Vec<(usize, usize, String)>,
}

fn perr(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, col, msg: msg.into() }
}

fn is_name_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_name_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

fn names(line: usize, col0: usize, rest: &str) -> Result<Vec<String>> {
    let mut out: Vec<String> = Vec::new();
    let mut col = col0;
    for w in rest.split(|c: char| c.is_whitespace() || c == ',') {
        if !w.is_empty() {
            if !w.starts_with(is_name_start) || !w.chars().all(is_name_char) {
                return Err(perr(line, col, format!("bad variable name {w:?}")));
            }
            if out.iter().any(|o| o == w) {
                return Err(perr(line, col, format!("variable {w} declared twice")));
            }
            out.push(w.to_string());
        }
        col += w.chars().count() + 1;
    }
    Ok(out)
}

impl IdealFile {
    pub fn parse(text: &str) -> Result<IdealFile> {
        let mut characteristic = None;
        let mut vars = None;
        let mut invertible = Vec::new();
        let mut generators = Vec::new();
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let body = raw.split('#').next().unwrap_or("");
            if body.trim().is_empty() {
                continue;
            }
            let indent = body.len() - body.trim_start().len();
            let Some((key, rest)) = body.split_once(':') else {
                return Err(perr(line, indent + 1, "expected `key: value`"));
            };
            let vcol = key.len() + 2;
            match key.trim() {
                "char" => {
                    let p: u64 = rest
                        .trim()
                        .parse()
                        .map_err(|_| perr(line, vcol, format!("bad characteristic {:?}", rest.trim())))?;
                    check_char(p).map_err(|e| perr(line, vcol, e.to_string()))?;
                    characteristic = Some(p);
                }
                "vars" => {
                    let v = names(line, vcol, rest)?;
                    if v.is_empty() {
                        return Err(perr(line, vcol, "no variables declared"));
                    }
                    if v.len() > 64 {
                        return Err(perr(line, vcol, "at most 64 variables are supported"));
                    }
                    vars = Some(v);
                }
                "invertible" => invertible = names(line, vcol, rest)?,
                "gen" => {
                    let lead = rest.chars().count() - rest.trim_start().chars().count();
                    let col = key.chars().count() + 2 + lead;
                    generators.push((line, col, rest.trim().to_string()));
                }
                other => return Err(perr(line, indent + 1, format!("unknown key {other:?}"))),
            }
        }
        let characteristic = characteristic.ok_or_else(|| perr(1, 1, "missing `char:` line"))?;
        let vars = vars.ok_or_else(|| perr(1, 1, "missing `vars:` line"))?;
        if let Some(w) = invertible.iter().find(|w| !vars.contains(w)) {
            return Err(Error::Input(format!("invertible variable {w} is not declared")));
        }
        if generators.is_empty() {
            return Err(Error::Input("no generators".into()));
        }
        Ok(IdealFile { characteristic, vars, invertible, generators })
    }

    /// The root chart: every declared hypersurface in `E`, generators normalized.
    pub fn chart(&self) -> Result<Chart> {
        let p = self.characteristic;
        let inv = Stratum::from_indices(self.invertible.iter().map(|w| self.vars.iter().position(|v| v == w).unwrap()));
        let mut lookup: HashMap<String, usize> = HashMap::new();
        let probe = Chart::root(p, &self.vars, inv, Vec::new());
        for (i, v) in probe.vars.iter().enumerate() {
            lookup.insert(v.name.clone(), i);
            lookup.entry(v.display_name()).or_insert(i);
        }
        let classes = probe.classes();
        let mut gens = Vec::new();
        for (line, col0, src) in &self.generators {
            let (line, col0) = (*line, *col0);
            let terms = parse_terms(src, p, &lookup, self.vars.len()).map_err(|(c, m)| perr(line, col0 + c, m))?;
            if terms.len() > 2 {
                return Err(perr(line, col0, format!("{} terms: a generator has at most two", terms.len())));
            }
            let g = normalize_generator(&terms, &classes).map_err(|e| perr(line, col0, e.to_string()))?;
            gens.push(g);
        }
        let mut ch = Chart::root(p, &self.vars, inv, gens);
        ch.renormalize()?;
        Ok(ch)
    }
}

/// Parses the text of an ideal file into its root chart.
pub fn parse_ideal(text: &str) -> Result<Chart> {
    IdealFile::parse(text)?.chart()
}

type TermResult<T> = std::result::Result<T, (usize, String)>;

/// A term list; errors carry a 0-based character offset.
fn parse_terms(src: &str, p: u64, lookup: &HashMap<String, usize>, n: usize) -> TermResult<Vec<Term>> {
    let cs: Vec<char> = src.chars().collect();
    let mut i = 0;
    let skip = |i: &mut usize| {
        while *i < cs.len() && cs[*i].is_whitespace() {
            *i += 1;
        }
    };
    let mut terms = Vec::new();
    skip(&mut i);
    let mut first = true;
    while i < cs.len() || first {
        let mut neg = false;
        if i < cs.len() && (cs[i] == '+' || cs[i] == '-') {
            neg = cs[i] == '-';
            i += 1;
            skip(&mut i);
        } else if !first {
            return Err((i, "expected `+` or `-`".into()));
        }
        first = false;
        let start = i;
        let mut coeff: Option<FieldElement> = None;
        let mut exp = vec![0i64; n];
        loop {
            skip(&mut i);
            if i >= cs.len() {
                return Err((i, "expected a factor".into()));
            }
            if cs[i].is_ascii_digit() {
                let s = i;
                while i < cs.len() && (cs[i].is_ascii_digit() || cs[i] == '/') {
                    i += 1;
                }
                let text: String = cs[s..i].iter().collect();
                let v = parse_q(&text).ok_or((s, format!("bad number {text:?}")))?;
                if coeff.is_some() {
                    return Err((s, "more than one coefficient in a term".into()));
                }
                let c = FieldElement::new(p, v).map_err(|e| (s, e.to_string()))?;
                if c.is_zero() {
                    return Err((s, "zero coefficient".into()));
                }
                coeff = Some(c);
            } else if is_name_start(cs[i]) {
                let s = i;
                while i < cs.len() && is_name_char(cs[i]) {
                    i += 1;
                }
                let name: String = cs[s..i].iter().collect();
                let &v = lookup.get(&name).ok_or((s, format!("undeclared variable {name}")))?;
                let mut e = 1i64;
                if i < cs.len() && cs[i] == '^' {
                    i += 1;
                    let es = i;
                    if i < cs.len() && cs[i] == '-' {
                        i += 1;
                    }
                    while i < cs.len() && cs[i].is_ascii_digit() {
                        i += 1;
                    }
                    let text: String = cs[es..i].iter().collect();
                    e = text.parse().map_err(|_| (es, format!("bad exponent {text:?}")))?;
                }
                exp[v] = exp[v].checked_add(e).ok_or((s, "exponent overflow".to_string()))?;
            } else {
                return Err((i, format!("unexpected {:?}", cs[i])));
            }
            skip(&mut i);
            if i < cs.len() && cs[i] == '*' {
                i += 1;
                continue;
            }
            break;
        }
        if i == start {
            return Err((i, "empty term".into()));
        }
        let mut c = coeff.unwrap_or_else(|| FieldElement::one(p));
        if neg {
            c = c.neg();
        }
        terms.push(Term { coeff: c, exp });
    }
    Ok(terms)
}

/// Prints a chart's working ideal in the input format. Requires `mpart = 1`.
pub struct ChartSource<'a>(pub &'a Chart);

impl fmt::Display for ChartSource<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ch = self.0;
        writeln!(f, "char: {}", ch.characteristic)?;
        let names: Vec<String> = ch.vars.iter().map(|v| v.name.clone()).collect();
        writeln!(f, "vars: {}", names.join(" "))?;
        let inv: Vec<String> = ch.vars.iter().filter(|v| v.class == VarClass::Y).map(|v| v.name.clone()).collect();
        if !inv.is_empty() {
            writeln!(f, "invertible: {}", inv.join(" "))?;
        }
        for g in &ch.ideal.gens {
            writeln!(f, "gen: {}", generator_str(g, ch))?;
        }
        Ok(())
    }
}

pub fn generator_str(g: &Generator, ch: &Chart) -> String {
    terms_str(&g.terms(), &ch.names())
}
