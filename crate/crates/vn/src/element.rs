//! Elements of V_n as prefix-replacement tables.

use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::address::{code_problem, Address};
use crate::point::Point;
use crate::Error;

/// A bijection between two complete prefix codes, acting by `u·w ↦ v·w`.
///
/// Rules are kept sorted by domain address. Equality is structural, so two
/// tables for the same map compare equal only after [`Element::reduce`].
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Element {
    n: usize,
    rules: Vec<(Address, Address)>,
}

impl Element {
    pub fn identity(n: usize) -> Self {
        assert!(n >= 2, "arity must be at least 2");
        Element { n, rules: vec![(Address::root(), Address::root())] }
    }

    /// Validates and sorts a rule table.
    pub fn from_rules(n: usize, mut rules: Vec<(Address, Address)>) -> Result<Self, Error> {
        if n < 2 {
            return Err(Error::Invalid(format!("arity {n} is below 2")));
        }
        rules.sort();
        let dom: Vec<Address> = rules.iter().map(|r| r.0.clone()).collect();
        let ran: Vec<Address> = rules.iter().map(|r| r.1.clone()).collect();
        if let Some(p) = code_problem(&dom, n) {
            return Err(Error::Invalid(format!("domain: {p}")));
        }
        if let Some(p) = code_problem(&ran, n) {
            return Err(Error::Invalid(format!("range: {p}")));
        }
        Ok(Element { n, rules })
    }

    /// Trusted constructor; `rules` must already be sorted and valid.
    pub(crate) fn from_sorted(n: usize, rules: Vec<(Address, Address)>) -> Self {
        debug_assert!(rules.windows(2).all(|w| w[0].0 < w[1].0));
        Element { n, rules }
    }

    /// Build from string pairs, mostly for tests.
    pub fn from_pairs(n: usize, pairs: &[(&str, &str)]) -> Result<Self, Error> {
        let mut rules = Vec::with_capacity(pairs.len());
        for (d, r) in pairs {
            rules.push((Address::parse(d, n)?, Address::parse(r, n)?));
        }
        Element::from_rules(n, rules)
    }

    pub fn arity(&self) -> usize {
        self.n
    }

    pub fn rules(&self) -> &[(Address, Address)] {
        &self.rules
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn domain_leaves(&self) -> Vec<Address> {
        self.rules.iter().map(|r| r.0.clone()).collect()
    }

    pub fn range_leaves(&self) -> Vec<Address> {
        let mut v: Vec<Address> = self.rules.iter().map(|r| r.1.clone()).collect();
        v.sort();
        v
    }

    /// Number of carets in the domain tree.
    pub fn carets(&self) -> usize {
        (self.rules.len() - 1) / (self.n - 1)
    }

    pub fn is_identity(&self) -> bool {
        self.rules.iter().all(|(d, r)| d == r)
    }

    /// Index of the rule whose domain leaf is a prefix of `w`, if any.
    pub fn rule_covering(&self, w: &[u8]) -> Option<usize> {
        // the covering leaf is the greatest domain address <= w
        let idx = self.rules.partition_point(|(d, _)| d.letters() <= w);
        if idx == 0 {
            return None;
        }
        let i = idx - 1;
        if w.starts_with(self.rules[i].0.letters()) {
            Some(i)
        } else {
            None
        }
    }

    /// Rule index for domain leaf `leaf`.
    pub fn rule_of(&self, leaf: &Address) -> Option<usize> {
        self.rules.binary_search_by(|(d, _)| d.cmp(leaf)).ok()
    }

    /// The image of the cone `w`, when `w` lies inside a single domain cone.
    pub fn image_word(&self, w: &Address) -> Option<Address> {
        let i = self.rule_covering(w.letters())?;
        let (d, r) = &self.rules[i];
        Some(r.concat(&w.letters()[d.len()..]))
    }

    /// The preimage of the cone `w`, when `w` lies inside a single range cone.
    pub fn preimage_word(&self, w: &Address) -> Option<Address> {
        self.rules
            .iter()
            .find(|(_, r)| r.is_prefix_of(w))
            .map(|(d, r)| d.concat(&w.letters()[r.len()..]))
    }

    /// Domain leaves lying inside the cone `c` (for a `c` that is not below a leaf).
    fn domain_below(&self, c: &Address) -> &[(Address, Address)] {
        let lo = self.rules.partition_point(|(d, _)| d < c);
        let hi = lo + self.rules[lo..].iter().take_while(|(d, _)| c.is_prefix_of(d)).count();
        &self.rules[lo..hi]
    }

    /// `self` followed by `other`.
    pub fn compose(&self, other: &Element) -> Result<Element, Error> {
        if self.n != other.n {
            return Err(Error::Arity(self.n, other.n));
        }
        let mut out = Vec::with_capacity(self.rules.len() + other.rules.len());
        for (u, v) in &self.rules {
            if let Some(i) = other.rule_covering(v.letters()) {
                let (d, r) = &other.rules[i];
                out.push((u.clone(), r.concat(&v.letters()[d.len()..])));
            } else {
                for (d, r) in other.domain_below(v) {
                    out.push((u.concat(&d.letters()[v.len()..]), r.clone()));
                }
            }
        }
        out.sort();
        Ok(Element::from_sorted(self.n, out).reduce())
    }

    pub fn invert(&self) -> Element {
        let mut out: Vec<(Address, Address)> = self.rules.iter().map(|(d, r)| (r.clone(), d.clone())).collect();
        out.sort();
        Element::from_sorted(self.n, out)
    }

    /// Collapses every full sibling set that maps in order onto a sibling set.
    pub fn reduce(&self) -> Element {
        let n = self.n;
        let mut stack: Vec<(Address, Address)> = Vec::with_capacity(self.rules.len());
        for rule in &self.rules {
            stack.push(rule.clone());
            while stack.len() >= n {
                let top = &stack[stack.len() - n..];
                if !collapsible(top) {
                    break;
                }
                let d = top[0].0.parent().unwrap();
                let r = top[0].1.parent().unwrap();
                stack.truncate(stack.len() - n);
                stack.push((d, r));
            }
        }
        Element::from_sorted(n, stack)
    }

    pub fn is_reduced(&self) -> bool {
        self.reduce().rules.len() == self.rules.len()
    }

    /// Simple augmentation at a domain leaf.
    pub fn expand_at(&self, leaf: &Address) -> Result<Element, Error> {
        if leaf.max_letter().is_some_and(|m| m as usize >= self.n) {
            return Err(Error::Invalid(format!("address {leaf} has a letter outside arity {}", self.n)));
        }
        let i = self
            .rule_of(leaf)
            .ok_or_else(|| Error::Invalid(format!("{leaf} is not a domain leaf")))?;
        let (d, r) = self.rules[i].clone();
        let mut out = Vec::with_capacity(self.rules.len() + self.n - 1);
        out.extend_from_slice(&self.rules[..i]);
        for k in 0..self.n as u8 {
            out.push((d.child(k), r.child(k)));
        }
        out.extend_from_slice(&self.rules[i + 1..]);
        Ok(Element::from_sorted(self.n, out))
    }

    /// Simple augmentation at the domain leaf mapping to range leaf `leaf`.
    pub fn expand_range_at(&self, leaf: &Address) -> Result<Element, Error> {
        let d = self
            .rules
            .iter()
            .find(|(_, r)| r == leaf)
            .map(|(d, _)| d.clone())
            .ok_or_else(|| Error::Invalid(format!("{leaf} is not a range leaf")))?;
        self.expand_at(&d)
    }

    /// Expands until `cone` is a domain leaf or lies below one.
    pub fn expand_to_contain(&self, cone: &Address) -> Element {
        let mut e = self.clone();
        loop {
            if e.rule_covering(cone.letters()).is_some() {
                return e;
            }
            let i = e.rules.partition_point(|(d, _)| d < cone);
            // the leaf just above `cone` on its path is a proper prefix; find it
            let leaf = e.rules[..i]
                .iter()
                .rev()
                .find(|(d, _)| d.is_prefix_of(cone))
                .map(|(d, _)| d.clone());
            match leaf {
                Some(l) => e = e.expand_at(&l).unwrap(),
                None => return e, // cone is internal: already a union of leaves
            }
        }
    }

    pub fn apply_point(&self, p: &Point) -> Point {
        let depth = self.rules.iter().map(|r| r.0.len()).max().unwrap_or(0);
        let w = p.prefix(depth);
        let i = self.rule_covering(&w).expect("complete code covers every point");
        let (d, r) = &self.rules[i];
        p.strip_cone(d).expect("covering cone").prepend(r.letters())
    }

    /// Slope exponent `|u| - |v|` of the rule whose domain cone contains `p`.
    pub fn slope_exponent_at(&self, p: &Point) -> i64 {
        let depth = self.rules.iter().map(|r| r.0.len()).max().unwrap_or(0);
        let i = self.rule_covering(&p.prefix(depth)).expect("complete code");
        let (d, r) = &self.rules[i];
        d.len() as i64 - r.len() as i64
    }

    /// `f⁻¹ · self · f`.
    pub fn conjugate(&self, f: &Element) -> Result<Element, Error> {
        f.invert().compose(self)?.compose(f)
    }

    /// `self^k` for any integer `k`.
    pub fn pow(&self, k: i64) -> Element {
        let base = if k < 0 { self.invert() } else { self.clone() };
        let mut acc = Element::identity(self.n);
        let mut sq = base.reduce();
        let mut k = k.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.compose(&sq).unwrap();
            }
            k >>= 1;
            if k > 0 {
                sq = sq.compose(&sq).unwrap();
            }
        }
        acc
    }

    pub fn same_map(&self, other: &Element) -> bool {
        self.n == other.n && self.reduce() == other.reduce()
    }

    pub fn commutes_with(&self, other: &Element) -> bool {
        self.compose(other).ok() == other.compose(self).ok()
    }

    /// Domain cones on which the element is not the identity; their union is the support.
    pub fn support(&self) -> Vec<Address> {
        self.reduce().rules.into_iter().filter(|(d, r)| d != r).map(|(d, _)| d).collect()
    }

    pub fn order(&self) -> Result<crate::revealing::Order, Error> {
        crate::revealing::order(self)
    }

    pub fn random(n: usize, size: usize, seed: u64) -> Element {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        random_with(&mut rng, n, size)
    }

    pub fn parse(text: &str) -> Result<Element, Error> {
        parse_element(text)
    }

    pub fn to_text(&self) -> String {
        serialize_element(self)
    }
}

fn collapsible(top: &[(Address, Address)]) -> bool {
    let (d0, r0) = &top[0];
    if d0.is_root() || r0.is_root() {
        return false;
    }
    let dp = &d0.letters()[..d0.len() - 1];
    let rp = &r0.letters()[..r0.len() - 1];
    top.iter().enumerate().all(|(k, (d, r))| {
        d.len() == d0.len()
            && r.len() == r0.len()
            && d.letters()[..dp.len()] == *dp
            && r.letters()[..rp.len()] == *rp
            && d.letters()[dp.len()] as usize == k
            && r.letters()[rp.len()] as usize == k
    })
}

/// A random code from `size` leaf expansions, an independent range code, a uniform bijection.
pub fn random_with<R: Rng>(rng: &mut R, n: usize, size: usize) -> Element {
    let dom = random_code(rng, n, size);
    let mut ran = random_code(rng, n, size);
    ran.shuffle(rng);
    let mut rules: Vec<(Address, Address)> = dom.into_iter().zip(ran).collect();
    rules.sort();
    Element::from_sorted(n, rules).reduce()
}

fn random_code<R: Rng>(rng: &mut R, n: usize, size: usize) -> Vec<Address> {
    let mut leaves = vec![Address::root()];
    for _ in 0..size {
        let i = rng.gen_range(0..leaves.len());
        let l = leaves.swap_remove(i);
        leaves.extend((0..n as u8).map(|k| l.child(k)));
    }
    leaves.sort();
    leaves
}

/// Parses the `V <n>` text format. `/` is accepted as a line separator.
pub fn parse_element(text: &str) -> Result<Element, Error> {
    let mut lines = text
        .split(['\n', '/'])
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let head = lines.next().ok_or_else(|| Error::Parse("missing `V <n>` header".into()))?;
    let n: usize = head
        .strip_prefix('V')
        .map(str::trim)
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::Parse(format!("bad header {head:?}, expected `V <n>`")))?;
    if !(2..=10).contains(&n) {
        return Err(Error::Parse(format!("arity {n} outside the text codec range 2..=10")));
    }
    let mut rules = Vec::new();
    for line in lines {
        let (d, r) = line
            .split_once("->")
            .ok_or_else(|| Error::Parse(format!("rule {line:?} lacks `->`")))?;
        rules.push((Address::parse(d, n)?, Address::parse(r, n)?));
    }
    if rules.is_empty() {
        return Err(Error::Parse("no rules".into()));
    }
    let mut sorted_dom: Vec<&Address> = rules.iter().map(|r| &r.0).collect();
    sorted_dom.sort();
    if sorted_dom.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Parse("non-bijective table: a domain address has two images".into()));
    }
    let mut sorted_ran: Vec<&Address> = rules.iter().map(|r| &r.1).collect();
    sorted_ran.sort();
    if sorted_ran.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Parse("non-bijective table: a range address is hit twice".into()));
    }
    Element::from_rules(n, rules).map_err(|e| match e {
        Error::Invalid(m) => Error::Parse(m),
        other => other,
    })
}

pub fn serialize_element(e: &Element) -> String {
    let mut s = format!("V {}\n", e.n);
    for (d, r) in &e.rules {
        s.push_str(&format!("{d} -> {r}\n"));
    }
    s
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize_element(self))
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "V{}{{", self.n)?;
        for (i, (d, r)) in self.rules.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{d}->{r}")?;
        }
        f.write_str("}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x0() -> Element {
        Element::from_pairs(2, &[("0", "00"), ("10", "01"), ("11", "1")]).unwrap()
    }

    fn pt(pre: &str, per: &str) -> Point {
        let w = |s: &str| if s.is_empty() { Address::root() } else { Address::parse(s, 2).unwrap() };
        Point::new(w(pre), w(per))
    }

    #[test]
    fn parse_roundtrip() {
        let e = parse_element("V 2 / 0->00 / 10->01 / 11->1").unwrap();
        assert_eq!(e, x0());
        assert_eq!(parse_element(&e.to_text()).unwrap(), e);
        assert_eq!(parse_element("V 2\n# c\ne -> e\n").unwrap(), Element::identity(2));
        assert!(parse_element("V 2 / 0->00 / 10->01").is_err());
        assert!(parse_element("V 2 / 0->0 / 1->0").is_err());
        assert!(parse_element("V 2 / 0->2 / 1->1").is_err());
        assert!(parse_element("V 2 / a->0 / 1->1").is_err());
        assert!(parse_element("V 2 / 0->0 / 1->1 / 10->10").is_err());
    }

    #[test]
    fn serialize_sorted() {
        let e = parse_element("V 2\n11 -> 1\n0 -> 00\n10 -> 01\n").unwrap();
        assert_eq!(e.to_text(), "V 2\n0 -> 00\n10 -> 01\n11 -> 1\n");
    }

    #[test]
    fn compose_basics() {
        let x = x0();
        assert!(x.compose(&x.invert()).unwrap().is_identity());
        assert_eq!(Element::identity(2).compose(&x).unwrap(), x);
        let x2 = x.compose(&x).unwrap();
        let want = Element::from_pairs(2, &[("0", "000"), ("10", "001"), ("110", "01"), ("111", "1")]).unwrap();
        assert_eq!(x2, want);
        assert_eq!(x2, x.pow(2));
        for p in [pt("", "1"), pt("0", "1"), pt("10", "0"), pt("", "01")] {
            assert_eq!(x2.apply_point(&p), x.apply_point(&x.apply_point(&p)));
        }
    }

    #[test]
    fn invert_and_reduce() {
        let x = x0();
        assert_eq!(x.invert(), Element::from_pairs(2, &[("00", "0"), ("01", "10"), ("1", "11")]).unwrap());
        let s = Element::from_pairs(2, &[("0", "0"), ("1", "1")]).unwrap();
        assert_eq!(s.reduce(), Element::identity(2));
        assert_eq!(x.reduce(), x);
        let big = x.expand_at(&Address::parse("0", 2).unwrap()).unwrap();
        assert_eq!(big.len(), 4);
        assert_eq!(big.reduce(), x);
        assert!(x.expand_at(&Address(vec![2])).is_err());
        assert!(x.expand_at(&Address::parse("1", 2).unwrap()).is_err());
    }

    #[test]
    fn points() {
        let x = x0();
        assert_eq!(x.apply_point(&pt("", "1")), pt("", "1"));
        assert_eq!(x.apply_point(&pt("10", "0")), pt("01", "0"));
        assert_eq!(x.slope_exponent_at(&pt("", "1")), 1);
        assert_eq!(x.slope_exponent_at(&pt("", "0")), -1);
    }

    #[test]
    fn random_is_deterministic_and_valid() {
        for seed in 0..200 {
            let e = Element::random(2, 6, seed);
            assert_eq!(e, Element::random(2, 6, seed));
            assert!(Element::from_rules(2, e.rules().to_vec()).is_ok());
            assert!(e.len() <= 7);
        }
        for seed in 0..20 {
            let e = Element::random(2, 1, seed);
            assert!(e.is_identity() || e == Element::from_pairs(2, &[("0", "1"), ("1", "0")]).unwrap());
        }
    }

    #[test]
    fn powers() {
        let t = Element::from_pairs(2, &[("0", "1"), ("1", "0")]).unwrap();
        assert!(t.pow(2).is_identity());
        assert_eq!(t.pow(-1), t);
        let x = x0();
        assert!(x.pow(3).compose(&x.pow(-3)).unwrap().is_identity());
    }
}
