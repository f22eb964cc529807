use std::fmt;

use serde::Serialize;

use crate::address::Address;

/// The point `preperiod · period^∞` of the Cantor set, kept in normal form:
/// primitive period and shortest preperiod.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Point {
    pub preperiod: Address,
    pub period: Address,
}

impl Point {
    /// Panics on an empty period.
    pub fn new(preperiod: Address, period: Address) -> Self {
        assert!(!period.is_root(), "period word must be nonempty");
        let mut pre = preperiod.0;
        let mut per = primitive_root(&period.0).to_vec();
        while let (Some(&a), Some(&b)) = (pre.last(), per.last()) {
            if a != b {
                break;
            }
            pre.pop();
            per.rotate_right(1);
        }
        Point { preperiod: Address(pre), period: Address(per) }
    }

    pub fn periodic(period: Address) -> Self {
        Point::new(Address::root(), period)
    }

    /// The first `k` letters of the infinite word.
    pub fn prefix(&self, k: usize) -> Vec<u8> {
        let mut w: Vec<u8> = self.preperiod.0.iter().copied().take(k).collect();
        let per = &self.period.0;
        let mut i = 0;
        while w.len() < k {
            w.push(per[i % per.len()]);
            i += 1;
        }
        w
    }

    /// Whether `cone` is a prefix of this point.
    pub fn in_cone(&self, cone: &Address) -> bool {
        self.prefix(cone.len()) == cone.0
    }

    /// Splits off `cone` (which must contain the point), returning the tail point.
    pub fn strip_cone(&self, cone: &Address) -> Option<Point> {
        if !self.in_cone(cone) {
            return None;
        }
        let per = self.period.len();
        let pre = self.preperiod.len();
        if cone.len() <= pre {
            Some(Point::new(Address(self.preperiod.0[cone.len()..].to_vec()), self.period.clone()))
        } else {
            let shift = (cone.len() - pre) % per;
            let mut p = self.period.0.clone();
            p.rotate_left(shift);
            Some(Point::new(Address::root(), Address(p)))
        }
    }

    /// `prefix · self`.
    pub fn prepend(&self, prefix: &[u8]) -> Point {
        Point::new(Address(prefix.iter().chain(self.preperiod.0.iter()).copied().collect()), self.period.clone())
    }
}

fn primitive_root(w: &[u8]) -> &[u8] {
    let n = w.len();
    for d in 1..=n {
        if n.is_multiple_of(d) && (d..n).all(|i| w[i] == w[i - d]) {
            return &w[..d];
        }
    }
    w
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.preperiod.is_root() {
            write!(f, "({})^inf", self.period)
        } else {
            write!(f, "{}({})^inf", self.preperiod, self.period)
        }
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
