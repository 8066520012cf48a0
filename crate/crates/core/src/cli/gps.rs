//! The `.gps` series file: a header `gps m n`, a `radius` line and one
//! `coeff : e_1 … e_{m+n}` line per term, exponents in descending
//! lexicographic order.

use std::path::Path;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exponents::{ExponentVector, VariableSignature};
use crate::rational::{self, Rational};
use crate::series::GenSeries;

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn rat(line: usize, tok: &str) -> Result<Rational> {
    rational::parse_canonical(tok).ok_or_else(|| err(line, format!("malformed rational `{tok}`")))
}

fn natural(line: usize, tok: &str) -> Result<usize> {
    tok.parse().map_err(|_| err(line, format!("expected a natural number, got `{tok}`")))
}

/// Parses `.gps` text. Blank lines and `#` comments are ignored. A missing
/// `radius` line means unit radii.
pub fn parse_series(text: &str) -> Result<GenSeries> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
        .peekable();
    let (hl, header) = lines.next().ok_or_else(|| err(1, "empty file, expected `gps m n`"))?;
    let h: Vec<&str> = header.split_whitespace().collect();
    let (m, n) = match h.as_slice() {
        ["gps", m, n] => (natural(hl, m)?, natural(hl, n)?),
        _ => return Err(err(hl, format!("expected `gps m n`, got `{header}`"))),
    };
    let mut radius = vec![Rational::from_integer(1.into()); m + n];
    if let Some((rl, r)) = lines.peek().copied() {
        if let Some(rest) = r.strip_prefix("radius") {
            lines.next();
            let toks: Vec<&str> = rest.split_whitespace().collect();
            if toks.len() != m + n {
                return Err(err(rl, format!("{} radii for {} variables", toks.len(), m + n)));
            }
            radius = toks.iter().map(|t| rat(rl, t)).collect::<Result<_>>()?;
        }
    }
    let sig = VariableSignature::new(m, n, radius).map_err(|e| err(hl + 1, e.to_string()))?;
    let mut terms: Vec<(Rational, ExponentVector)> = Vec::new();
    for (ln, l) in lines {
        let (c, e) = l.split_once(':').ok_or_else(|| err(ln, format!("expected `coeff : exponents`, got `{l}`")))?;
        let c = rat(ln, c.trim())?;
        if c.is_zero() {
            return Err(err(ln, "zero coefficient"));
        }
        let toks: Vec<&str> = e.split_whitespace().collect();
        if toks.len() != m + n {
            return Err(err(ln, format!("{} exponents for {} variables", toks.len(), m + n)));
        }
        let e = ExponentVector::new(toks.iter().map(|t| rat(ln, t)).collect::<Result<_>>()?).map_err(|x| err(ln, x.to_string()))?;
        e.check_signature(&sig).map_err(|x| err(ln, x.to_string()))?;
        if let Some((_, prev)) = terms.last() {
            if *prev == e {
                return Err(err(ln, format!("duplicate exponent {e}")));
            }
            if *prev < e {
                return Err(err(ln, format!("exponent {e} out of order after {prev}")));
            }
        }
        terms.push((c, e));
    }
    GenSeries::from_terms(&sig, terms)
}

pub fn serialize_series(f: &GenSeries) -> String {
    let sig = f.signature();
    let mut out = format!("gps {} {}\nradius", sig.m(), sig.n());
    for r in sig.radius() {
        out.push(' ');
        out.push_str(&rational::format(r));
    }
    out.push('\n');
    let terms: Vec<_> = f.terms().collect();
    for (e, c) in terms.into_iter().rev() {
        out.push_str(&rational::format(c));
        out.push_str(" :");
        for x in e.entries() {
            out.push(' ');
            out.push_str(&rational::format(x));
        }
        out.push('\n');
    }
    out
}

pub fn parse_series_file(path: &Path) -> Result<GenSeries> {
    let text = std::fs::read_to_string(path).map_err(|e| err(0, format!("{}: {e}", path.display())))?;
    parse_series(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    #[test]
    fn difference() {
        let f = parse_series("gps 2 0\n1 : 1 0\n-1 : 0 1\n").unwrap();
        assert_eq!(f.to_string(), GenSeries::from_frac_terms(&VariableSignature::unit(2, 0), &[((1, 1), &[(1, 1), (0, 1)]), ((-1, 1), &[(0, 1), (1, 1)])]).unwrap().to_string());
    }

    #[test]
    fn fractional_exponent() {
        let f = parse_series("gps 2 0\nradius 1 1/2\n1/2 : 3/2 0 # half\n").unwrap();
        let (e, c) = f.terms().next().unwrap();
        assert_eq!(*c, frac(1, 2));
        assert_eq!(e.entries(), &[frac(3, 2), frac(0, 1)]);
        assert_eq!(serialize_series(&f), "gps 2 0\nradius 1 1/2\n1/2 : 3/2 0\n");
    }

    #[test]
    fn errors_carry_lines() {
        let line = |t: &str| match parse_series(t) {
            Err(Error::Parse { line, .. }) => line,
            other => panic!("{other:?}"),
        };
        assert_eq!(line("gps 2 0\n# c\n1 : 1 0\n2 : 1 0\n"), 4);
        assert_eq!(line("gps 1 1\nradius 1 1\n1 : 0 1/2\n"), 3);
        assert_eq!(line("gps 1 0\n1/0 : 1\n"), 2);
        assert_eq!(line("gps 1 0\n2/4 : 1\n"), 2);
        assert_eq!(line("gps 1 0\n1 : 1\n1 : 2\n"), 3);
        assert_eq!(line("gps x 0\n"), 1);
    }
}
