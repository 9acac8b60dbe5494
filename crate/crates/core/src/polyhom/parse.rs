//! Shorthand polynomial input ("z^2 + t*z*w", "(z+w)(z-w)", "zw") and the
//! JSON coefficient-list form.

use std::collections::BTreeMap;

use serde_json::Value;

use super::{HomPoly, PolyError, Scalar};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Z,
    W,
    I,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(s: &str) -> Result<Vec<Tok>, PolyError> {
    let cs: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut k = 0;
    while k < cs.len() {
        let c = cs[k];
        match c {
            ' ' | '\t' | '\n' => k += 1,
            '+' => {
                out.push(Tok::Plus);
                k += 1
            }
            '-' => {
                out.push(Tok::Minus);
                k += 1
            }
            '*' => {
                out.push(Tok::Star);
                k += 1
            }
            '/' => {
                out.push(Tok::Slash);
                k += 1
            }
            '^' => {
                out.push(Tok::Caret);
                k += 1
            }
            '(' => {
                out.push(Tok::LParen);
                k += 1
            }
            ')' => {
                out.push(Tok::RParen);
                k += 1
            }
            d if d.is_ascii_digit() || d == '.' => {
                let st = k;
                while k < cs.len() && (cs[k].is_ascii_digit() || cs[k] == '.') {
                    k += 1;
                }
                // Exponent part: e.g. 1e-3 (only when followed by a digit or sign+digit).
                if k + 1 < cs.len() && (cs[k] == 'e' || cs[k] == 'E') {
                    let mut j = k + 1;
                    if cs[j] == '+' || cs[j] == '-' {
                        j += 1;
                    }
                    if j < cs.len() && cs[j].is_ascii_digit() {
                        k = j;
                        while k < cs.len() && cs[k].is_ascii_digit() {
                            k += 1;
                        }
                    }
                }
                out.push(Tok::Num(cs[st..k].iter().collect()));
            }
            a if a.is_alphabetic() || a == '_' => {
                let st = k;
                while k < cs.len() && (cs[k].is_alphanumeric() || cs[k] == '_') {
                    k += 1;
                }
                let word: String = cs[st..k].iter().collect();
                if word.chars().all(|x| matches!(x, 'z' | 'w' | 'i')) {
                    for x in word.chars() {
                        out.push(match x {
                            'z' => Tok::Z,
                            'w' => Tok::W,
                            _ => Tok::I,
                        });
                    }
                } else {
                    out.push(Tok::Ident(word));
                }
            }
            other => return Err(PolyError::Parse(format!("unexpected character '{other}'"))),
        }
    }
    Ok(out)
}

/// Sparse bivariate polynomial keyed by (z-exponent, w-exponent).
type Sparse<S> = BTreeMap<(usize, usize), S>;

fn sp_const<S: Scalar>(c: S) -> Sparse<S> {
    let mut m = Sparse::new();
    m.insert((0, 0), c);
    m
}

fn sp_add<S: Scalar>(mut a: Sparse<S>, b: Sparse<S>, sign: bool) -> Sparse<S> {
    for (k, v) in b {
        let v = if sign { v } else { -v };
        let e = a.remove(&k).map_or(v.clone(), |x| x + v);
        a.insert(k, e);
    }
    a
}

fn sp_mul<S: Scalar>(a: &Sparse<S>, b: &Sparse<S>) -> Sparse<S> {
    let mut out = Sparse::new();
    for (&(i, j), x) in a {
        for (&(k, l), y) in b {
            let key = (i + k, j + l);
            let v = x.clone() * y.clone();
            let e = out.remove(&key).map_or(v.clone(), |o: S| o + v);
            out.insert(key, e);
        }
    }
    out
}

fn sp_as_const<S: Scalar>(a: &Sparse<S>) -> Option<S> {
    let mut c = S::zero();
    for (&(i, j), v) in a {
        if i + j > 0 {
            if !v.is_zero() {
                return None;
            }
        } else {
            c = v.clone();
        }
    }
    Some(c)
}

struct Parser<'a, S> {
    toks: Vec<Tok>,
    pos: usize,
    params: &'a [(&'a str, S)],
}

impl<'a, S: Scalar> Parser<'a, S> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<Sparse<S>, PolyError> {
        let mut acc = match self.peek() {
            Some(Tok::Minus) => {
                self.next();
                sp_add(Sparse::new(), self.term()?, false)
            }
            Some(Tok::Plus) => {
                self.next();
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.next();
                    acc = sp_add(acc, self.term()?, true);
                }
                Some(Tok::Minus) => {
                    self.next();
                    acc = sp_add(acc, self.term()?, false);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Sparse<S>, PolyError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.next();
                    acc = sp_mul(&acc, &self.factor()?);
                }
                Some(Tok::Slash) => {
                    self.next();
                    let d = self.factor()?;
                    let c = sp_as_const(&d)
                        .ok_or_else(|| PolyError::Parse("division by a non-constant".into()))?;
                    if c.is_zero() {
                        return Err(PolyError::Parse("division by zero".into()));
                    }
                    acc = acc.into_iter().map(|(k, v)| (k, v / c.clone())).collect();
                }
                Some(Tok::Num(_) | Tok::Ident(_) | Tok::Z | Tok::W | Tok::I | Tok::LParen) => {
                    acc = sp_mul(&acc, &self.factor()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Sparse<S>, PolyError> {
        let base = self.atom()?;
        if let Some(Tok::Caret) = self.peek() {
            self.next();
            let e = match self.next() {
                Some(Tok::Num(n)) => n
                    .parse::<u32>()
                    .map_err(|_| PolyError::Parse(format!("bad exponent '{n}'")))?,
                other => return Err(PolyError::Parse(format!("expected exponent, found {other:?}"))),
            };
            let mut acc = sp_const(S::one());
            for _ in 0..e {
                acc = sp_mul(&acc, &base);
            }
            return Ok(acc);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Sparse<S>, PolyError> {
        match self.next() {
            Some(Tok::Num(n)) => Ok(sp_const(S::parse_scalar(&n).map_err(PolyError::Parse)?)),
            Some(Tok::I) => Ok(sp_const(S::parse_scalar("i").map_err(PolyError::Parse)?)),
            Some(Tok::Z) => Ok(Sparse::from([((1, 0), S::one())])),
            Some(Tok::W) => Ok(Sparse::from([((0, 1), S::one())])),
            Some(Tok::Ident(name)) => self
                .params
                .iter()
                .find(|(k, _)| *k == name)
                .map(|(_, v)| sp_const(v.clone()))
                .ok_or_else(|| PolyError::Parse(format!("unknown symbol '{name}'"))),
            Some(Tok::LParen) => {
                let e = self.expr()?;
                match self.next() {
                    Some(Tok::RParen) => Ok(e),
                    _ => Err(PolyError::Parse("missing ')'".into())),
                }
            }
            Some(Tok::Minus) => Ok(sp_add(Sparse::new(), self.factor()?, false)),
            other => Err(PolyError::Parse(format!("unexpected token {other:?}"))),
        }
    }
}

/// Parse shorthand like `"z^2 + t*z*w"`. `degree` fixes the homogeneous
/// degree (needed for `"0"`); `params` binds named constants.
pub fn parse_hompoly<S: Scalar>(
    s: &str,
    degree: Option<usize>,
    params: &[(&str, S)],
) -> Result<HomPoly<S>, PolyError> {
    let toks = tokenize(s)?;
    if toks.is_empty() {
        return Err(PolyError::Parse("empty polynomial".into()));
    }
    let mut p = Parser { toks, pos: 0, params };
    let sp = p.expr()?;
    if p.pos < p.toks.len() {
        return Err(PolyError::Parse(format!("trailing input at token {}", p.pos)));
    }
    let nonzero: Vec<_> = sp.iter().filter(|(_, v)| !v.is_zero()).collect();
    let mut deg = degree;
    for (&(i, j), _) in &nonzero {
        match deg {
            None => deg = Some(i + j),
            Some(d) if d != i + j => {
                return Err(PolyError::Parse(format!(
                    "not homogeneous of degree {d}: term z^{i} w^{j}"
                )))
            }
            _ => {}
        }
    }
    let d = deg.unwrap_or(0);
    let mut out = vec![S::zero(); d + 1];
    for (&(_, j), v) in nonzero {
        out[j] = v.clone();
    }
    Ok(HomPoly::new(out))
}

/// Accepts a shorthand string, a list of coefficient strings, or a list of
/// `[re, im]` pairs.
pub fn poly_from_json<S: Scalar>(
    v: &Value,
    degree: Option<usize>,
    params: &[(&str, S)],
) -> Result<HomPoly<S>, PolyError> {
    let p = match v {
        Value::String(s) => parse_hompoly(s, degree, params)?,
        Value::Array(items) => {
            let mut cs = Vec::with_capacity(items.len());
            for (k, it) in items.iter().enumerate() {
                cs.push(scalar_from_json::<S>(it).map_err(|e| PolyError::Parse(format!("coefficient {k}: {e}")))?);
            }
            if cs.is_empty() {
                return Err(PolyError::Parse("empty coefficient list".into()));
            }
            HomPoly::new(cs)
        }
        Value::Number(_) => HomPoly::new(vec![scalar_from_json::<S>(v).map_err(PolyError::Parse)?]),
        _ => return Err(PolyError::Parse("expected a string or an array".into())),
    };
    if let Some(d) = degree {
        if p.degree() != d {
            return Err(PolyError::DegreeMismatch { expected: d, found: p.degree() });
        }
    }
    Ok(p)
}

pub fn scalar_from_json<S: Scalar>(v: &Value) -> Result<S, String> {
    match v {
        Value::String(s) => S::parse_scalar(s),
        Value::Number(n) => S::parse_scalar(&n.to_string()),
        Value::Array(pair) if pair.len() == 2 => {
            let re = pair[0].as_f64().ok_or("re must be a number")?;
            let im = pair[1].as_f64().ok_or("im must be a number")?;
            match S::BACKEND {
                super::Backend::Float => S::from_c64(num_complex::Complex64::new(re, im)).ok_or("conversion".into()),
                super::Backend::Exact => {
                    let g = super::GaussRat::from_f64_exact(num_complex::Complex64::new(re, im))
                        .ok_or("non-finite coefficient")?;
                    Ok(S::from_gauss(&g))
                }
            }
        }
        _ => Err("expected \"a/b+c/d i\", a number, or [re, im]".into()),
    }
}

/// Exact backend: list of strings; float backend: list of `[re, im]`.
pub fn poly_to_json<S: Scalar>(p: &HomPoly<S>) -> Value {
    Value::Array(p.coeffs().iter().map(scalar_to_json).collect())
}

pub fn scalar_to_json<S: Scalar>(c: &S) -> Value {
    match S::BACKEND {
        super::Backend::Exact => Value::String(c.to_string()),
        super::Backend::Float => {
            let z = c.to_c64();
            serde_json::json!([z.re, z.im])
        }
    }
}
