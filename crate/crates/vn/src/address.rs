use std::fmt;

use serde::{Serialize, Serializer};

use crate::Error;

/// A finite word over `{0, .., n-1}`; the empty word is the root.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Address(pub Vec<u8>);

impl Address {
    pub fn root() -> Self {
        Address(Vec::new())
    }

    pub fn from_letters(letters: &[u8]) -> Self {
        Address(letters.to_vec())
    }

    /// Parse a digit word; `e` is the root.
    pub fn parse(s: &str, n: usize) -> Result<Self, Error> {
        let s = s.trim();
        if s == "e" {
            return Ok(Address::root());
        }
        if s.is_empty() {
            return Err(Error::Parse("empty address (use `e` for the root)".into()));
        }
        let mut w = Vec::with_capacity(s.len());
        for c in s.chars() {
            let d = c
                .to_digit(10)
                .ok_or_else(|| Error::Parse(format!("non-digit letter {c:?} in address {s:?}")))?;
            if d as usize >= n {
                return Err(Error::Parse(format!("letter {d} is not below arity {n} in address {s:?}")));
            }
            w.push(d as u8);
        }
        Ok(Address(w))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn is_prefix_of(&self, other: &Address) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn is_proper_prefix_of(&self, other: &Address) -> bool {
        self.len() < other.len() && self.is_prefix_of(other)
    }

    pub fn child(&self, i: u8) -> Address {
        let mut w = self.0.clone();
        w.push(i);
        Address(w)
    }

    pub fn concat(&self, tail: &[u8]) -> Address {
        let mut w = self.0.clone();
        w.extend_from_slice(tail);
        Address(w)
    }

    pub fn parent(&self) -> Option<Address> {
        if self.0.is_empty() {
            None
        } else {
            Some(Address(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    /// The part of `self` after `prefix`, if `prefix` is a prefix.
    pub fn strip_prefix(&self, prefix: &Address) -> Option<&[u8]> {
        self.0.strip_prefix(prefix.0.as_slice())
    }

    pub fn max_letter(&self) -> Option<u8> {
        self.0.iter().copied().max()
    }
}

impl fmt::Display for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("e");
        }
        for &d in &self.0 {
            if d < 10 {
                write!(f, "{d}")?;
            } else {
                // wide arities have no text codec; keep Display total anyway
                write!(f, "[{d}]")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Address {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Checks that `leaves` is the leaf set of a finite `n`-ary tree.
pub fn is_complete_code(leaves: &[Address], n: usize) -> bool {
    code_problem(leaves, n).is_none()
}

/// Describes why `leaves` fails to be a complete prefix code, if it does.
pub fn code_problem(leaves: &[Address], n: usize) -> Option<String> {
    if leaves.is_empty() {
        return Some("empty code".into());
    }
    let mut v: Vec<&[u8]> = leaves.iter().map(|a| a.letters()).collect();
    v.sort();
    for w in v.windows(2) {
        if w[1].starts_with(w[0]) {
            let (a, b) = (Address(w[0].to_vec()), Address(w[1].to_vec()));
            return Some(if a == b {
                format!("address {a} repeated")
            } else {
                format!("overlapping prefix code: {a} is a prefix of {b}")
            });
        }
    }
    if v.iter().any(|w| w.iter().any(|&d| d as usize >= n)) {
        return Some(format!("letter out of range for arity {n}"));
    }
    check_complete(&v, 0, n)
}

fn check_complete(v: &[&[u8]], depth: usize, n: usize) -> Option<String> {
    // v is sorted and prefix-free and all entries share their first `depth` letters
    if v.len() == 1 && v[0].len() == depth {
        return None;
    }
    let stem = Address(v[0][..depth].to_vec());
    let mut start = 0;
    for letter in 0..n as u8 {
        let end = start + v[start..].iter().take_while(|w| w[depth] == letter).count();
        if end == start {
            return Some(format!("incomplete prefix code: nothing below {}", stem.child(letter)));
        }
        if let Some(p) = check_complete(&v[start..end], depth + 1, n) {
            return Some(p);
        }
        start = end;
    }
    None
}

/// The internal vertices (carets) of the tree whose leaf set is `leaves`.
pub fn internal_nodes(leaves: &[Address]) -> Vec<Address> {
    let mut set = std::collections::BTreeSet::new();
    for l in leaves {
        for k in 0..l.len() {
            set.insert(Address(l.0[..k].to_vec()));
        }
    }
    set.into_iter().collect()
}

/// Replaces every complete sibling set by its parent until none is left. Input must be prefix-free.
pub fn collapse_cones(cones: &[Address], n: usize) -> Vec<Address> {
    let mut v: Vec<Address> = cones.to_vec();
    v.sort();
    v.dedup();
    let mut stack: Vec<Address> = Vec::with_capacity(v.len());
    for c in v {
        stack.push(c);
        while stack.len() >= n {
            let top = &stack[stack.len() - n..];
            let Some(parent) = top[0].parent() else { break };
            let full = top.iter().enumerate().all(|(k, a)| {
                a.len() == parent.len() + 1 && parent.is_prefix_of(a) && a.0[parent.len()] as usize == k
            });
            if !full {
                break;
            }
            stack.truncate(stack.len() - n);
            stack.push(parent);
        }
    }
    stack
}

/// Maximal cones disjoint from the union of the prefix-free set `cones`.
pub fn complement_cones(cones: &[Address], n: usize) -> Vec<Address> {
    let mut v: Vec<Address> = cones.to_vec();
    v.sort();
    v.dedup();
    let mut out = Vec::new();
    complement_rec(&Address::root(), &v, n, &mut out);
    out
}

fn complement_rec(node: &Address, below: &[Address], n: usize, out: &mut Vec<Address>) {
    if below.is_empty() {
        out.push(node.clone());
        return;
    }
    if below.iter().any(|c| c.is_prefix_of(node)) {
        return;
    }
    for i in 0..n as u8 {
        let child = node.child(i);
        let lo = below.partition_point(|c| c < &child);
        let hi = lo + below[lo..].iter().take_while(|c| child.is_prefix_of(c)).count();
        complement_rec(&child, &below[lo..hi], n, out);
    }
}
