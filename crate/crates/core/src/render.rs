//! Text form of divisor classes: `57H-18E`, `15H-5E_1-4E_{2..13}`,
//! `H-E_{1,2}+E_3`, `O`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::picard::Divisor;

fn index_list(idx: &[usize]) -> String {
    let mut parts = Vec::new();
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && idx[j + 1] == idx[j] + 1 {
            j += 1;
        }
        if j - i >= 2 {
            parts.push(format!("{}..{}", idx[i], idx[j]));
        } else {
            parts.extend(idx[i..=j].iter().map(|x| x.to_string()));
        }
        i = j + 1;
    }
    parts.join(",")
}

fn write_term(out: &mut String, coeff: &BigInt, symbol: &str) {
    if coeff.is_negative() {
        out.push('-');
    } else if !out.is_empty() {
        out.push('+');
    }
    let mag = coeff.abs();
    if !mag.is_one() {
        out.push_str(&mag.to_string());
    }
    out.push_str(symbol);
}

impl fmt::Display for Divisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        if !self.d().is_zero() {
            write_term(&mut out, self.d(), "H");
        }
        // group indices by multiplicity, in order of first appearance
        let mut groups: Vec<(&BigInt, Vec<usize>)> = Vec::new();
        for (i, v) in self.m().iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            match groups.iter_mut().find(|(g, _)| *g == v) {
                Some((_, idx)) => idx.push(i + 1),
                None => groups.push((v, vec![i + 1])),
            }
        }
        for (v, idx) in groups {
            let symbol = if idx.len() == self.n() {
                "E".to_string()
            } else if idx.len() == 1 {
                format!("E_{}", idx[0])
            } else {
                format!("E_{{{}}}", index_list(&idx))
            };
            write_term(&mut out, &-v, &symbol);
        }
        if out.is_empty() {
            out.push('O');
        }
        f.write_str(&out)
    }
}

fn parse_indices(spec: &str, n: usize) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for part in spec.split(',') {
        let part = part.trim();
        let parse_one = |t: &str| -> Result<usize> {
            let i: usize = t
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad exceptional index '{t}'")))?;
            if i == 0 || i > n {
                return Err(Error::Parse(format!("index {i} out of range 1..={n}")));
            }
            Ok(i)
        };
        match part.split_once("..") {
            Some((a, b)) => {
                let (a, b) = (parse_one(a)?, parse_one(b)?);
                if a > b {
                    return Err(Error::Parse(format!("empty index range {a}..{b}")));
                }
                out.extend(a..=b);
            }
            None => out.push(parse_one(part)?),
        }
    }
    Ok(out)
}

impl Divisor {
    /// Parses the text form on a surface with `n` points. Accepts `-` or the
    /// Unicode minus sign.
    pub fn parse(s: &str, n: usize) -> Result<Divisor> {
        if n == 0 {
            return Err(Error::NoPoints);
        }
        let text: String = s
            .replace('\u{2212}', "-")
            .chars()
            .filter(|c| !c.is_whitespace())
            .collect();
        if text.is_empty() {
            return Err(Error::Parse("empty divisor".into()));
        }
        let mut d = BigInt::zero();
        let mut m = vec![BigInt::zero(); n];
        if text == "O" || text == "0" {
            return Divisor::new(d, m);
        }
        let bytes = text.as_bytes();
        let mut pos = 0;
        while pos < bytes.len() {
            let mut sign = BigInt::one();
            if bytes[pos] == b'+' || bytes[pos] == b'-' {
                if bytes[pos] == b'-' {
                    sign = -sign;
                }
                pos += 1;
            } else if pos != 0 {
                return Err(Error::Parse(format!(
                    "expected '+' or '-' at offset {pos} in '{s}'"
                )));
            }
            let start = pos;
            while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                pos += 1;
            }
            let coeff = if start == pos {
                BigInt::one()
            } else {
                BigInt::from_str(&text[start..pos]).expect("digits")
            } * sign;
            match bytes.get(pos) {
                Some(b'H') => {
                    pos += 1;
                    d += coeff;
                }
                Some(b'E') => {
                    pos += 1;
                    let indices = if bytes.get(pos) == Some(&b'_') {
                        pos += 1;
                        if bytes.get(pos) == Some(&b'{') {
                            let close = text[pos..]
                                .find('}')
                                .ok_or_else(|| Error::Parse(format!("unclosed '{{' in '{s}'")))?;
                            let spec = &text[pos + 1..pos + close];
                            pos += close + 1;
                            parse_indices(spec, n)?
                        } else {
                            let st = pos;
                            while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                                pos += 1;
                            }
                            parse_indices(&text[st..pos], n)?
                        }
                    } else {
                        (1..=n).collect()
                    };
                    for i in indices {
                        m[i - 1] -= &coeff;
                    }
                }
                _ => {
                    return Err(Error::Parse(format!(
                        "expected 'H' or 'E' at offset {pos} in '{s}'"
                    )))
                }
            }
        }
        Divisor::new(d, m)
    }
}
