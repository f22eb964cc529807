//! Difference components, iterated augmentation chains, revealing pairs and rollings.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;

use serde::Serialize;
use serde_json::{json, Value};

use crate::address::{internal_nodes, Address};
use crate::element::Element;
use crate::point::Point;
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    /// carets of the domain tree missing from the range tree
    DomainMinusRange,
    RangeMinusDomain,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct DiffComponent {
    pub side: Side,
    pub root: Address,
    pub leaves: Vec<Address>,
}

impl DiffComponent {
    /// Carets of the component, as words relative to the root.
    pub fn shape(&self) -> Vec<Address> {
        let rel: Vec<Address> = self
            .leaves
            .iter()
            .map(|l| Address(l.strip_prefix(&self.root).unwrap().to_vec()))
            .collect();
        internal_nodes(&rel)
    }

    pub fn contains_leaf(&self, a: &Address) -> bool {
        self.leaves.binary_search(a).is_ok()
    }

    pub fn carets(&self) -> usize {
        self.shape().len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum IacKind {
    Repeller,
    Attractor,
    SourceSink,
    PeriodicNeutral,
}

impl fmt::Display for IacKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IacKind::Repeller => "repeller",
            IacKind::Attractor => "attractor",
            IacKind::SourceSink => "source-sink",
            IacKind::PeriodicNeutral => "periodic-neutral",
        })
    }
}

/// Consecutive entries are images of one another under the element.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Iac {
    pub kind: IacKind,
    pub chain: Vec<Address>,
}

/// Spine data for a repeller or attractor component.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpineData {
    pub side: Side,
    pub root: Address,
    pub spine: Address,
    /// The repelling or attracting chain, in the order the element moves along it.
    pub chain: Vec<Address>,
    /// The periodic points of the orbit, in orbit order.
    pub orbit: Vec<Point>,
}

impl SpineData {
    pub fn is_repeller(&self) -> bool {
        self.side == Side::DomainMinusRange
    }

    /// Orbit length (`s` for a repeller, `-r` for an attractor).
    pub fn period(&self) -> usize {
        self.orbit.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RevealingPair {
    pub element: Element,
    pub components: Vec<DiffComponent>,
    pub iacs: Vec<Iac>,
    pub spines: Vec<SpineData>,
    pub neutral_periodic_orbits: Vec<Vec<Address>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Order {
    Finite(u64),
    Infinite,
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(k) => write!(f, "{k}"),
            Order::Infinite => f.write_str("infinite"),
        }
    }
}

/// Leaf lookup tables for one tree pair.
struct Tables {
    fwd: HashMap<Address, Address>,
    back: HashMap<Address, Address>,
    range_sorted: Vec<Address>,
}

impl Tables {
    fn new(e: &Element) -> Self {
        let fwd: HashMap<_, _> = e.rules().iter().cloned().collect();
        let back: HashMap<_, _> = e.rules().iter().map(|(d, r)| (r.clone(), d.clone())).collect();
        Tables { fwd, back, range_sorted: e.range_leaves() }
    }

    fn in_domain(&self, a: &Address) -> bool {
        self.fwd.contains_key(a)
    }

    fn in_range(&self, a: &Address) -> bool {
        self.back.contains_key(a)
    }

    fn range_leaf_above(&self, a: &Address) -> Option<Address> {
        let i = self.range_sorted.partition_point(|r| r <= a);
        (i > 0 && self.range_sorted[i - 1].is_prefix_of(a)).then(|| self.range_sorted[i - 1].clone())
    }

    /// From a domain leaf, forward through neutral leaves. The flag is true when the orbit closed up.
    fn forward(&self, start: &Address) -> (Vec<Address>, bool) {
        let mut chain = vec![start.clone()];
        let mut cur = self.fwd[start].clone();
        loop {
            if &cur == start {
                return (chain, true);
            }
            chain.push(cur.clone());
            match self.fwd.get(&cur) {
                Some(next) => cur = next.clone(),
                None => return (chain, false),
            }
        }
    }

    /// From a range leaf, backward through neutral leaves; returned in forward order.
    fn backward(&self, end: &Address) -> Vec<Address> {
        let mut chain = vec![end.clone()];
        let mut cur = self.back[end].clone();
        loop {
            if &cur == end {
                break;
            }
            chain.push(cur.clone());
            match self.back.get(&cur) {
                Some(prev) => cur = prev.clone(),
                None => break,
            }
        }
        chain.reverse();
        chain
    }
}

pub fn difference_components(e: &Element) -> Vec<DiffComponent> {
    let t = Tables::new(e);
    let mut by_root: HashMap<(Side, Address), Vec<Address>> = HashMap::new();
    for (d, _) in e.rules() {
        if !t.in_range(d) {
            if let Some(root) = t.range_leaf_above(d) {
                by_root.entry((Side::DomainMinusRange, root)).or_default().push(d.clone());
            }
        }
    }
    for r in &t.range_sorted {
        if !t.in_domain(r) {
            if let Some(i) = e.rule_covering(r.letters()) {
                let root = e.rules()[i].0.clone();
                by_root.entry((Side::RangeMinusDomain, root)).or_default().push(r.clone());
            }
        }
    }
    let mut comps: Vec<DiffComponent> = by_root
        .into_iter()
        .map(|((side, root), mut leaves)| {
            leaves.sort();
            DiffComponent { side, root, leaves }
        })
        .collect();
    comps.sort_by(|a, b| (&a.root, a.side).cmp(&(&b.root, b.side)));
    comps
}

/// Chains and periodic orbits of every leaf of the pair (for any tree pair).
fn analyze(e: &Element) -> (Vec<DiffComponent>, Vec<Iac>, Vec<Vec<Address>>) {
    let t = Tables::new(e);
    let comps = difference_components(e);
    let mut iacs = Vec::new();
    for c in comps.iter().filter(|c| c.side == Side::DomainMinusRange) {
        for l in &c.leaves {
            let (chain, _) = t.forward(l);
            let end = chain.last().unwrap();
            let kind = if end.is_proper_prefix_of(l) { IacKind::Repeller } else { IacKind::SourceSink };
            iacs.push(Iac { kind, chain });
        }
    }
    for c in comps.iter().filter(|c| c.side == Side::RangeMinusDomain) {
        for l in &c.leaves {
            let chain = t.backward(l);
            let first = &chain[0];
            if first.is_proper_prefix_of(l) {
                iacs.push(Iac { kind: IacKind::Attractor, chain });
            } else if !t.in_range(first) && t.range_leaf_above(first).is_some() {
                // started at a leaf of the domain-side difference: already recorded
            } else {
                iacs.push(Iac { kind: IacKind::SourceSink, chain });
            }
        }
    }
    let mut seen: HashSet<Address> = HashSet::new();
    let mut orbits = Vec::new();
    for (d, _) in e.rules() {
        if !t.in_range(d) || seen.contains(d) {
            continue;
        }
        let (chain, closed) = t.forward(d);
        if closed {
            seen.extend(chain.iter().cloned());
            // start each orbit at its least address
            let k = (0..chain.len()).min_by_key(|&i| &chain[i]).unwrap();
            let mut c = chain;
            c.rotate_left(k);
            orbits.push(c);
        }
    }
    orbits.sort();
    for o in &orbits {
        iacs.push(Iac { kind: IacKind::PeriodicNeutral, chain: o.clone() });
    }
    (comps, iacs, orbits)
}

/// The chain of `leaf` according to the four cases for leaves of a tree pair.
pub fn trace_iac(e: &Element, leaf: &Address) -> Result<Iac, Error> {
    let t = Tables::new(e);
    let in_a = t.in_domain(leaf);
    let in_b = t.in_range(leaf);
    if !in_a && !in_b {
        return Err(Error::Invalid(format!("{leaf} is not a leaf of either tree")));
    }
    let (_, iacs, _) = analyze(e);
    iacs.into_iter()
        .find(|i| i.chain.contains(leaf))
        .ok_or_else(|| Error::Invalid(format!("no chain through {leaf}")))
}

pub fn is_revealing(e: &Element) -> bool {
    let (comps, iacs, _) = analyze(e);
    comps.iter().all(|c| {
        let want = if c.side == Side::DomainMinusRange { IacKind::Repeller } else { IacKind::Attractor };
        iacs.iter().any(|i| {
            i.kind == want && {
                let l = if want == IacKind::Repeller { &i.chain[0] } else { i.chain.last().unwrap() };
                c.contains_leaf(l) && c.root.is_prefix_of(l)
            }
        })
    })
}

impl RevealingPair {
    /// Classifies a tree pair that is already revealing.
    pub fn from_element(e: Element) -> Result<RevealingPair, Error> {
        if !is_revealing(&e) {
            return Err(Error::Invalid("tree pair is not revealing".into()));
        }
        let (components, iacs, orbits) = analyze(&e);
        let mut spines = Vec::new();
        for c in &components {
            let iac = iacs
                .iter()
                .find(|i| match (c.side, i.kind) {
                    (Side::DomainMinusRange, IacKind::Repeller) => c.contains_leaf(&i.chain[0]),
                    (Side::RangeMinusDomain, IacKind::Attractor) => c.contains_leaf(i.chain.last().unwrap()),
                    _ => false,
                })
                .expect("revealing");
            spines.push(spine_of(c, iac));
        }
        Ok(RevealingPair { element: e, components, iacs, spines, neutral_periodic_orbits: orbits })
    }

    pub fn is_torsion(&self) -> bool {
        self.components.is_empty()
    }

    pub fn component(&self, root: &Address) -> Option<&DiffComponent> {
        self.components.iter().find(|c| &c.root == root)
    }

    pub fn spine_of(&self, root: &Address) -> Option<&SpineData> {
        self.spines.iter().find(|s| &s.root == root)
    }

    pub fn repellers(&self) -> impl Iterator<Item = &SpineData> {
        self.spines.iter().filter(|s| s.is_repeller())
    }

    pub fn attractors(&self) -> impl Iterator<Item = &SpineData> {
        self.spines.iter().filter(|s| !s.is_repeller())
    }

    pub fn source_sink_chains(&self) -> impl Iterator<Item = &Iac> {
        self.iacs.iter().filter(|i| i.kind == IacKind::SourceSink)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "element": self.element.to_text(),
            "components": self.components,
            "iacs": self.iacs,
            "spines": self.spines.iter().map(|s| json!({
                "side": s.side,
                "root": s.root,
                "spine": s.spine,
                "chain": s.chain,
            })).collect::<Vec<_>>(),
            "orbits": self.spines.iter().map(|s| json!({
                "root": s.root,
                "kind": if s.is_repeller() { "repelling" } else { "attracting" },
                "points": s.orbit,
            })).chain(self.neutral_periodic_orbits.iter().map(|o| json!({
                "kind": "periodic-neutral",
                "leaves": o,
            }))).collect::<Vec<_>>(),
        })
    }
}

fn spine_of(c: &DiffComponent, iac: &Iac) -> SpineData {
    let ch = &iac.chain;
    let (top, bottom) = match c.side {
        Side::DomainMinusRange => (ch.last().unwrap(), &ch[0]),
        Side::RangeMinusDomain => (&ch[0], ch.last().unwrap()),
    };
    let spine = Address(bottom.strip_prefix(top).unwrap().to_vec());
    let pts: Vec<&Address> = match c.side {
        Side::DomainMinusRange => ch[..ch.len() - 1].iter().collect(),
        Side::RangeMinusDomain => ch[..ch.len() - 1].iter().collect(),
    };
    let orbit = pts.into_iter().map(|g| Point::new(g.clone(), spine.clone())).collect();
    SpineData { side: c.side, root: c.root.clone(), spine, chain: ch.clone(), orbit }
}

/// Spine word and periodic orbit of a repeller or attractor component.
pub fn spine_and_periodic_orbit(rp: &RevealingPair, comp: &DiffComponent) -> Result<(Address, Vec<Point>), Error> {
    rp.spines
        .iter()
        .find(|s| s.root == comp.root && s.side == comp.side)
        .map(|s| (s.spine.clone(), s.orbit.clone()))
        .ok_or_else(|| Error::Invalid(format!("component at {} has no repeller or attractor", comp.root)))
}

/// Expands the domain leaf `at` by the caret shape `shape` (relative words, parents first).
fn expand_by_shape(e: &Element, at: &Address, shape: &[Address]) -> Element {
    let mut cur = e.clone();
    for p in shape {
        cur = cur.expand_at(&at.concat(p.letters())).expect("shape is expanded top-down");
    }
    cur
}

/// One migration step on the domain side, if some component's root is fed by a foreign chain.
fn migrate_domain_side(e: &Element) -> Option<Element> {
    let t = Tables::new(e);
    for c in difference_components(e).iter().filter(|c| c.side == Side::DomainMinusRange) {
        let chain = t.backward(&c.root);
        if c.root.is_proper_prefix_of(&chain[0]) {
            continue;
        }
        let mu = &chain[chain.len() - 2];
        return Some(expand_by_shape(e, mu, &c.shape()));
    }
    None
}

/// Builds a revealing pair for `e` by migrating components back along the chains feeding them.
pub fn make_revealing(e: &Element) -> Result<RevealingPair, Error> {
    let start = e.reduce();
    let carets = start.carets();
    let guard = 10 * carets * carets;
    let mut cur = start.clone();
    let mut steps = 0;
    while !is_revealing(&cur) {
        let next = migrate_domain_side(&cur).or_else(|| migrate_domain_side(&cur.invert()).map(|x| x.invert()));
        match next {
            Some(n) if steps < guard => cur = n,
            _ => {
                cur = fallback_search(&start, 20_000).ok_or_else(|| {
                    Error::Guard(format!("no revealing pair after {steps} migrations and the exhaustive search"))
                })?;
                break;
            }
        }
        steps += 1;
    }
    debug_assert!(cur.same_map(e));
    RevealingPair::from_element(cur)
}

/// Breadth-first search over sequences of simple expansions.
pub fn fallback_search(e: &Element, max_states: usize) -> Option<Element> {
    let mut seen: HashSet<Element> = HashSet::new();
    let mut queue = VecDeque::from([e.clone()]);
    seen.insert(e.clone());
    while let Some(cur) = queue.pop_front() {
        if is_revealing(&cur) {
            return Some(cur);
        }
        for (d, _) in cur.rules() {
            let next = cur.expand_at(d).unwrap();
            if seen.len() < max_states && seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    None
}

pub fn order(e: &Element) -> Result<Order, Error> {
    let rp = make_revealing(e)?;
    if !rp.is_torsion() {
        return Ok(Order::Infinite);
    }
    Ok(Order::Finite(rp.neutral_periodic_orbits.iter().fold(1u64, |acc, o| lcm(acc, o.len() as u64))))
}

pub(crate) fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub(crate) fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rolling {
    /// Move a repeller or attractor component one step along its orbit.
    TypeII { root: Address },
    /// One caret along a periodic neutral orbit or a source-sink chain through `leaf`.
    TypeE { leaf: Address },
    /// Cancelling tree along the orbit of the component's repeller or attractor.
    TypeI { root: Address, delta: Address },
}

pub fn rolling(rp: &RevealingPair, mv: &Rolling) -> Result<RevealingPair, Error> {
    let e = &rp.element;
    let next = match mv {
        Rolling::TypeII { root } => {
            let c = rp.component(root).ok_or_else(|| Error::Invalid(format!("no component rooted at {root}")))?;
            let s = rp.spine_of(root).unwrap();
            let at = match c.side {
                Side::DomainMinusRange => &s.chain[s.chain.len() - 2],
                Side::RangeMinusDomain => &s.chain[0],
            };
            expand_by_shape(e, at, &c.shape())
        }
        Rolling::TypeE { leaf } => {
            let iac = rp
                .iacs
                .iter()
                .find(|i| matches!(i.kind, IacKind::PeriodicNeutral | IacKind::SourceSink) && i.chain.contains(leaf))
                .ok_or_else(|| Error::Invalid(format!("{leaf} is not on a periodic orbit or source-sink chain")))?;
            let leaves: &[Address] = match iac.kind {
                IacKind::PeriodicNeutral => &iac.chain,
                _ => &iac.chain[..iac.chain.len() - 1],
            };
            let mut cur = e.clone();
            for l in leaves {
                cur = cur.expand_at(l)?;
            }
            cur
        }
        Rolling::TypeI { root, delta } => {
            let c = rp.component(root).ok_or_else(|| Error::Invalid(format!("no component rooted at {root}")))?;
            let s = rp.spine_of(root).unwrap();
            if delta.is_root() || delta.len() >= s.spine.len() || !delta.is_prefix_of(&s.spine) {
                return Err(Error::Invalid(format!(
                    "{delta} is not a proper nonempty prefix of the spine {}",
                    s.spine
                )));
            }
            let cancel: Vec<Address> = c.shape().into_iter().filter(|p| !delta.is_prefix_of(p)).collect();
            let mut cur = e.clone();
            for l in &s.chain[..s.chain.len() - 1] {
                cur = expand_by_shape(&cur, l, &cancel);
            }
            cur
        }
    };
    RevealingPair::from_element(next)
}

/// Cones splitting the Cantor set into the torsion part and the rest.
pub fn partition_tz(rp: &RevealingPair) -> (Vec<Address>, Vec<Address>) {
    let t: BTreeSet<Address> = rp.neutral_periodic_orbits.iter().flatten().cloned().collect();
    let mut z: BTreeSet<Address> = rp.components.iter().map(|c| c.root.clone()).collect();
    let tables = Tables::new(&rp.element);
    for i in &rp.iacs {
        if i.kind != IacKind::PeriodicNeutral {
            for a in &i.chain {
                if tables.in_domain(a) && tables.in_range(a) {
                    z.insert(a.clone());
                }
            }
        }
    }
    (t.into_iter().collect(), z.into_iter().collect())
}

pub fn slope_exponent_at(e: &Element, p: &Point) -> i64 {
    e.slope_exponent_at(p)
}
