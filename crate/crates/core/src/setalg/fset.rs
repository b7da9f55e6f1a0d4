use std::cmp::Ordering;
use std::fmt;

use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::field::{Elem, Field};

/// A subset of a finite field, one bit per element index.
#[derive(Clone)]
pub struct FSet {
    field: Field,
    bits: Vec<u64>,
    len: usize,
}

impl FSet {
    pub fn empty(field: &Field) -> FSet {
        let words = (field.order() as usize).div_ceil(64);
        FSet {
            field: field.clone(),
            bits: vec![0; words],
            len: 0,
        }
    }

    pub fn full(field: &Field) -> FSet {
        FSet::from_elems(field, field.elements())
    }

    /// F* as a set.
    pub fn units(field: &Field) -> FSet {
        FSet::from_elems(field, field.nonzero())
    }

    pub fn from_elems(field: &Field, elems: impl IntoIterator<Item = Elem>) -> FSet {
        let mut s = FSet::empty(field);
        for e in elems {
            s.insert(e);
        }
        s
    }

    pub fn from_indices(field: &Field, indices: impl IntoIterator<Item = u64>) -> Result<FSet> {
        let mut s = FSet::empty(field);
        for i in indices {
            s.insert(field.elem(i)?);
        }
        Ok(s)
    }

    /// Parse a bracketed index list such as `[1,2,4]`.
    pub fn parse(field: &Field, literal: &str) -> Result<FSet> {
        let bad = || Error::MalformedSetLiteral(literal.to_string());
        let text: String = literal.chars().filter(|c| !c.is_whitespace()).collect();
        let body = text
            .strip_prefix('[')
            .and_then(|t| t.strip_suffix(']'))
            .ok_or_else(bad)?;
        if body.is_empty() {
            return Ok(FSet::empty(field));
        }
        let indices = body
            .split(',')
            .map(|t| t.parse::<u64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| bad())?;
        FSet::from_indices(field, indices)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn contains(&self, e: Elem) -> bool {
        let i = e.0 as usize;
        i < self.field.order() as usize && self.bits[i / 64] >> (i % 64) & 1 == 1
    }

    /// Inserts `e`; returns true when it was not already present.
    pub fn insert(&mut self, e: Elem) -> bool {
        let i = e.0 as usize;
        assert!(i < self.field.order() as usize, "element {i} outside field");
        let word = &mut self.bits[i / 64];
        let mask = 1u64 << (i % 64);
        if *word & mask == 0 {
            *word |= mask;
            self.len += 1;
            true
        } else {
            false
        }
    }

    pub fn remove(&mut self, e: Elem) -> bool {
        let i = e.0 as usize;
        if i >= self.field.order() as usize {
            return false;
        }
        let word = &mut self.bits[i / 64];
        let mask = 1u64 << (i % 64);
        if *word & mask != 0 {
            *word &= !mask;
            self.len -= 1;
            true
        } else {
            false
        }
    }

    /// Members in increasing index order.
    pub fn iter(&self) -> impl Iterator<Item = Elem> + '_ {
        self.bits.iter().enumerate().flat_map(|(w, &word)| {
            let mut rest = word;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let tz = rest.trailing_zeros();
                rest &= rest - 1;
                Some(Elem((w * 64) as u32 + tz))
            })
        })
    }

    pub fn elems(&self) -> Vec<Elem> {
        self.iter().collect()
    }

    pub fn indices(&self) -> Vec<u32> {
        self.iter().map(|e| e.0).collect()
    }

    pub fn first(&self) -> Option<Elem> {
        self.iter().next()
    }

    pub fn same_field(&self, other: &FSet) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    pub fn is_subset(&self, other: &FSet) -> bool {
        self.bits.len() == other.bits.len()
            && self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }

    pub fn union(&self, other: &FSet) -> FSet {
        self.zip_words(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &FSet) -> FSet {
        self.zip_words(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &FSet) -> FSet {
        self.zip_words(other, |a, b| a & !b)
    }

    pub fn intersection_len(&self, other: &FSet) -> usize {
        self.bits
            .iter()
            .zip(&other.bits)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    fn zip_words(&self, other: &FSet, f: impl Fn(u64, u64) -> u64) -> FSet {
        assert_eq!(self.bits.len(), other.bits.len(), "sets over different fields");
        let bits: Vec<u64> = self.bits.iter().zip(&other.bits).map(|(&a, &b)| f(a, b)).collect();
        let len = bits.iter().map(|w| w.count_ones() as usize).sum();
        FSet {
            field: self.field.clone(),
            bits,
            len,
        }
    }

    /// Image of the set under an arbitrary map on elements.
    pub fn map(&self, f: impl Fn(Elem) -> Elem) -> FSet {
        FSet::from_elems(&self.field, self.iter().map(f))
    }

    /// Compares the increasing index sequences lexicographically.
    pub fn cmp_lex(&self, other: &FSet) -> Ordering {
        self.iter().cmp(other.iter())
    }
}

impl PartialEq for FSet {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.bits == other.bits
    }
}

impl Eq for FSet {}

impl std::hash::Hash for FSet {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.bits.hash(state);
    }
}

impl fmt::Debug for FSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for FSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|e| e.0.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// Serializes as the increasing list of member indices.
impl Serialize for FSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.len))?;
        for e in self.iter() {
            seq.serialize_element(&e.0)?;
        }
        seq.end()
    }
}

/// JSON export form `{field, indices}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct SetExport {
    pub field: String,
    pub indices: Vec<u32>,
}

impl FSet {
    pub fn export(&self) -> SetExport {
        SetExport {
            field: self.field.to_string(),
            indices: self.indices(),
        }
    }

    pub fn import(export: &SetExport) -> Result<FSet> {
        let field = Field::parse(&export.field)?;
        FSet::from_indices(&field, export.indices.iter().map(|&i| i as u64))
    }
}
