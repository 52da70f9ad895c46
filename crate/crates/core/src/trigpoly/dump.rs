//! Canonical text dump: one line per term, `q1 .. qd re_num/re_den im_num/im_den`,
//! sorted lexicographically by frequency.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::{gr, Frequency, TrigPoly};
use crate::error::{Error, Result};

fn frac(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn write_dump(p: &TrigPoly) -> String {
    let mut s = String::new();
    for (q, c) in p.terms() {
        for x in q.coords() {
            write!(s, "{x} ").unwrap();
        }
        writeln!(s, "{} {}", frac(&c.re), frac(&c.im)).unwrap();
    }
    s
}

fn parse_frac(tok: &str, line: usize) -> Result<BigRational> {
    let bad = || Error::Parse(format!("line {line}: bad rational {tok:?}"));
    let (n, d) = tok.split_once('/').ok_or_else(bad)?;
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d == BigInt::from(0) {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

/// Parses a dump of a `d`-dimensional polynomial. Blank lines and `#` comments are skipped.
pub fn parse_dump(text: &str, d: usize) -> Result<TrigPoly> {
    let mut p = TrigPoly::zero(d);
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != d + 2 {
            return Err(Error::Parse(format!(
                "line {line_no}: expected {} fields, found {}",
                d + 2,
                toks.len()
            )));
        }
        let q = toks[..d]
            .iter()
            .map(|t| {
                t.parse::<BigInt>()
                    .map_err(|_| Error::Parse(format!("line {line_no}: bad integer {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let re = parse_frac(toks[d], line_no)?;
        let im = parse_frac(toks[d + 1], line_no)?;
        p.add_term(Frequency(q), gr(re, im));
    }
    Ok(p)
}
