//! Finite fields F_{p^n} = F_p[x]/(m(x)).
//!
//! Elements are stored as a single integer index: the coefficient vector
//! `(c_0, ..., c_{n-1})` read as a base-`p` number with `c_0` least
//! significant. Index 0 is zero and index 1 is one. Multiplication goes
//! through log/antilog tables when the order is at most [`LOG_TABLE_LIMIT`]
//! and through polynomial reduction above that.

mod poly;
mod subfield;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub use subfield::{admissibility_check, AdmissibilityReport, AdmissibilityTable, Subfield};

/// Default cap on `p^n`.
pub const DEFAULT_ORDER_CAP: u64 = 1 << 20;

/// Largest order for which log/antilog tables are built.
pub const LOG_TABLE_LIMIT: u32 = 1 << 16;

/// A field element, identified by its index in `[0, order)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Elem(pub u32);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    pub fn index(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ElemOp {
    Add,
    Sub,
    Neg,
    Mul,
    Div,
    Inv,
}

struct LogTables {
    log: Vec<u32>,
    // exp has length 2(q-1) so log sums never need a reduction
    exp: Vec<u32>,
}

struct Inner {
    p: u32,
    n: u32,
    modulus: Vec<u32>,
    order: u32,
    tables: Option<LogTables>,
}

/// A validated finite field. Cheap to clone; all tables are shared and
/// immutable.
#[derive(Clone)]
pub struct Field(Arc<Inner>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p && self.0.n == other.0.n && self.0.modulus == other.0.modulus)
    }
}

impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Field({})", self)
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let inner = &self.0;
        if inner.n == 1 && inner.modulus == [0, 1] {
            write!(f, "{}", inner.p)
        } else {
            let coeffs: Vec<String> = inner.modulus.iter().map(|c| c.to_string()).collect();
            write!(f, "{}^{}/[{}]", inner.p, inner.n, coeffs.join(","))
        }
    }
}

impl Field {
    /// Build F_{p^n}. Without a modulus the smallest irreducible monic
    /// polynomial of degree `n` is used, ordering candidates by their
    /// coefficients from the highest degree down.
    pub fn new(p: u64, n: u32, modulus: Option<&[u32]>) -> Result<Field> {
        Self::with_cap(p, n, modulus, DEFAULT_ORDER_CAP)
    }

    pub fn prime(p: u64) -> Result<Field> {
        Self::new(p, 1, None)
    }

    pub fn with_cap(p: u64, n: u32, modulus: Option<&[u32]>, cap: u64) -> Result<Field> {
        if !poly::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if n == 0 {
            return Err(Error::ZeroDegree);
        }
        let order = (p as u128).checked_pow(n).unwrap_or(u128::MAX);
        if order > cap as u128 || order > u32::MAX as u128 {
            return Err(Error::OrderTooLarge { p, n, cap });
        }
        let order = order as u32;
        let modulus: Vec<u64> = match modulus {
            Some(m) => {
                let text = format_coeffs(m);
                if m.len() != n as usize + 1
                    || m[n as usize] != 1
                    || m.iter().any(|&c| c as u64 >= p)
                {
                    return Err(Error::BadModulus(text, n));
                }
                let m: Vec<u64> = m.iter().map(|&c| c as u64).collect();
                if !poly::is_irreducible(&m, p) {
                    return Err(Error::ReducibleModulus(text, p as u32));
                }
                m
            }
            None => smallest_irreducible(p, n),
        };
        let mut inner = Inner {
            p: p as u32,
            n,
            modulus: modulus.iter().map(|&c| c as u32).collect(),
            order,
            tables: None,
        };
        if order <= LOG_TABLE_LIMIT {
            inner.tables = Some(build_tables(&inner));
        }
        Ok(Field(Arc::new(inner)))
    }

    /// Parse `p`, `p^n` or `p^n/[c0,...,cn]`.
    pub fn parse(spec: &str) -> Result<Field> {
        Self::parse_with_cap(spec, DEFAULT_ORDER_CAP)
    }

    pub fn parse_with_cap(spec: &str, cap: u64) -> Result<Field> {
        let bad = || Error::MalformedFieldSpec(spec.to_string());
        let text: String = spec.chars().filter(|c| !c.is_whitespace()).collect();
        let (head, modulus) = match text.split_once('/') {
            Some((h, m)) => {
                let body = m
                    .strip_prefix('[')
                    .and_then(|m| m.strip_suffix(']'))
                    .ok_or_else(bad)?;
                let coeffs = body
                    .split(',')
                    .map(|c| c.parse::<u32>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| bad())?;
                (h.to_string(), Some(coeffs))
            }
            None => (text.clone(), None),
        };
        let (p, n) = match head.split_once('^') {
            Some((p, n)) => (
                p.parse::<u64>().map_err(|_| bad())?,
                n.parse::<u32>().map_err(|_| bad())?,
            ),
            None => (head.parse::<u64>().map_err(|_| bad())?, 1),
        };
        Field::with_cap(p, n, modulus.as_deref(), cap)
    }

    pub fn p(&self) -> u32 {
        self.0.p
    }

    pub fn n(&self) -> u32 {
        self.0.n
    }

    pub fn order(&self) -> u32 {
        self.0.order
    }

    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    pub fn spec_string(&self) -> String {
        self.to_string()
    }

    pub fn elem(&self, index: u64) -> Result<Elem> {
        if index < self.order() as u64 {
            Ok(Elem(index as u32))
        } else {
            Err(Error::ElementOutOfRange(index, self.order()))
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        (0..self.order()).map(Elem)
    }

    pub fn nonzero(&self) -> impl Iterator<Item = Elem> {
        (1..self.order()).map(Elem)
    }

    /// Coefficient vector `(c_0, ..., c_{n-1})`.
    pub fn coeffs(&self, a: Elem) -> Vec<u32> {
        let p = self.p();
        let mut x = a.0;
        (0..self.n())
            .map(|_| {
                let c = x % p;
                x /= p;
                c
            })
            .collect()
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<Elem> {
        let p = self.p() as u64;
        if coeffs.len() > self.n() as usize || coeffs.iter().any(|&c| c as u64 >= p) {
            return Err(Error::InvalidArgument(format!(
                "coefficients {coeffs:?} do not describe an element of {self}"
            )));
        }
        let mut idx = 0u64;
        for &c in coeffs.iter().rev() {
            idx = idx * p + c as u64;
        }
        Ok(Elem(idx as u32))
    }

    /// The element `x` (the class of the indeterminate); equals `p` as an
    /// index when `n > 1`.
    pub fn generator_x(&self) -> Elem {
        if self.n() == 1 {
            Elem(0)
        } else {
            Elem(self.p())
        }
    }

    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        let p = self.0.p;
        if p == 2 {
            return Elem(a.0 ^ b.0);
        }
        if self.0.n == 1 {
            return Elem(((a.0 as u64 + b.0 as u64) % p as u64) as u32);
        }
        let (mut x, mut y) = (a.0, b.0);
        let mut r = 0u32;
        let mut place = 1u32;
        for _ in 0..self.0.n {
            let s = (x % p + y % p) % p;
            r += s * place;
            x /= p;
            y /= p;
            place = place.wrapping_mul(p);
        }
        Elem(r)
    }

    pub fn neg(&self, a: Elem) -> Elem {
        let p = self.0.p;
        if p == 2 {
            return a;
        }
        if self.0.n == 1 {
            return Elem((p - a.0) % p);
        }
        let mut x = a.0;
        let mut r = 0u32;
        let mut place = 1u32;
        for _ in 0..self.0.n {
            let s = (p - x % p) % p;
            r += s * place;
            x /= p;
            place = place.wrapping_mul(p);
        }
        Elem(r)
    }

    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a.0 == 0 || b.0 == 0 {
            return Elem::ZERO;
        }
        match &self.0.tables {
            Some(t) => Elem(t.exp[(t.log[a.0 as usize] + t.log[b.0 as usize]) as usize]),
            None => Elem(mul_poly(&self.0, a.0, b.0)),
        }
    }

    pub fn inv(&self, a: Elem) -> Result<Elem> {
        if a.0 == 0 {
            return Err(Error::DivisionByZero);
        }
        match &self.0.tables {
            Some(t) => {
                let q1 = self.order() - 1;
                let l = t.log[a.0 as usize];
                Ok(Elem(t.exp[((q1 - l) % q1) as usize]))
            }
            None => Ok(self.pow(a, self.order() as u64 - 2)),
        }
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Elem, mut e: u64) -> Elem {
        let mut result = Elem::ONE;
        let mut base = a;
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul(result, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        result
    }

    /// The Frobenius map `z -> z^p`.
    pub fn frobenius(&self, a: Elem) -> Elem {
        self.pow(a, self.p() as u64)
    }

    pub fn apply(&self, op: ElemOp, a: Elem, b: Option<Elem>) -> Result<Elem> {
        let need_b = || {
            b.ok_or_else(|| Error::InvalidArgument(format!("{op:?} needs a second operand")))
        };
        Ok(match op {
            ElemOp::Add => self.add(a, need_b()?),
            ElemOp::Sub => self.sub(a, need_b()?),
            ElemOp::Mul => self.mul(a, need_b()?),
            ElemOp::Div => self.div(a, need_b()?)?,
            ElemOp::Neg => self.neg(a),
            ElemOp::Inv => self.inv(a)?,
        })
    }

    pub fn subfields(&self) -> Vec<Subfield> {
        subfield::subfields(self)
    }
}

impl FromStr for Field {
    type Err = Error;

    fn from_str(s: &str) -> Result<Field> {
        Field::parse(s)
    }
}

impl Serialize for Field {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Field {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Field, D::Error> {
        let s = String::deserialize(d)?;
        Field::parse(&s).map_err(serde::de::Error::custom)
    }
}

fn format_coeffs(m: &[u32]) -> String {
    let parts: Vec<String> = m.iter().map(|c| c.to_string()).collect();
    format!("[{}]", parts.join(","))
}

fn smallest_irreducible(p: u64, n: u32) -> Vec<u64> {
    let count = p.pow(n);
    // Counting upward in this encoding compares coefficients from x^{n-1}
    // down to the constant term.
    for v in 0..count {
        let mut m = Vec::with_capacity(n as usize + 1);
        let mut x = v;
        for _ in 0..n {
            m.push(x % p);
            x /= p;
        }
        m.push(1);
        if poly::is_irreducible(&m, p) {
            return m;
        }
    }
    unreachable!("an irreducible polynomial of every degree exists over F_{p}")
}

fn mul_poly(f: &Inner, a: u32, b: u32) -> u32 {
    let n = f.n as usize;
    let p = f.p as u64;
    let mut da = [0u64; 32];
    let mut db = [0u64; 32];
    let (mut x, mut y) = (a, b);
    for i in 0..n {
        da[i] = (x % f.p) as u64;
        db[i] = (y % f.p) as u64;
        x /= f.p;
        y /= f.p;
    }
    let mut prod = [0u64; 64];
    for i in 0..n {
        if da[i] == 0 {
            continue;
        }
        for j in 0..n {
            prod[i + j] = (prod[i + j] + da[i] * db[j]) % p;
        }
    }
    // x^n = -(m_0 + ... + m_{n-1} x^{n-1})
    for k in (n..2 * n - 1).rev() {
        let c = prod[k];
        if c == 0 {
            continue;
        }
        for i in 0..n {
            let m = f.modulus[i] as u64;
            prod[k - n + i] = (prod[k - n + i] + c * ((p - m) % p)) % p;
        }
        prod[k] = 0;
    }
    let mut r = 0u64;
    for i in (0..n).rev() {
        r = r * p + prod[i];
    }
    r as u32
}

fn pow_poly(f: &Inner, a: u32, mut e: u64) -> u32 {
    let mut result = 1u32;
    let mut base = a;
    while e > 0 {
        if e & 1 == 1 {
            result = mul_poly(f, result, base);
        }
        base = mul_poly(f, base, base);
        e >>= 1;
    }
    result
}

fn primitive_element(f: &Inner) -> u32 {
    let q1 = f.order as u64 - 1;
    if q1 == 1 {
        return 1;
    }
    let factors = poly::prime_factors(q1);
    (2..f.order)
        .find(|&g| factors.iter().all(|&l| pow_poly(f, g, q1 / l) != 1))
        .expect("the multiplicative group of a finite field is cyclic")
}

fn build_tables(f: &Inner) -> LogTables {
    let q1 = (f.order - 1) as usize;
    let g = primitive_element(f);
    let mut log = vec![0u32; f.order as usize];
    let mut exp = vec![0u32; 2 * q1];
    let mut e = 1u32;
    for i in 0..q1 {
        exp[i] = e;
        exp[i + q1] = e;
        log[e as usize] = i as u32;
        e = mul_poly(f, e, g);
    }
    LogTables { log, exp }
}
