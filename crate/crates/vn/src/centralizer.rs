//! Centralizers: the torsion side (cycle census, g₁ generators), the slope
//! homomorphism on non-torsion components, the stair construction and the
//! per-class finite groups.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use serde_json::{json, Value};

use crate::address::{complement_cones, Address};
use crate::flowgraph::{build_flow_graph, component_signature, cone_in_union, min_rotation, ComponentKind, FlowGraph, VertexKind};
use crate::revealing::{make_revealing, Order, RevealingPair};
use crate::{par, Element, Error, Point};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TorsionEntry {
    pub m: usize,
    pub count: usize,
    pub r: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TorsionDescriptor {
    pub n: usize,
    pub entries: Vec<TorsionEntry>,
}

impl TorsionDescriptor {
    pub fn s(&self) -> usize {
        self.entries.len()
    }

    /// `K ≅ Maps(C_n, Z_m)^r`
    pub fn k_tag(&self, e: &TorsionEntry) -> String {
        let sup = if e.r > 1 { format!("^{}", e.r) } else { String::new() };
        format!("Maps(C_{},Z_{}){}", self.n, e.m, sup)
    }

    /// `Q ≅ G_{n,r}`
    pub fn q_tag(&self, e: &TorsionEntry) -> String {
        format!("G_{{{},{}}}", self.n, e.r)
    }
}

/// Number of periodic neutral orbits of each length.
pub fn cycle_census(rp: &RevealingPair) -> BTreeMap<usize, usize> {
    let mut m = BTreeMap::new();
    for o in &rp.neutral_periodic_orbits {
        *m.entry(o.len()).or_insert(0) += 1;
    }
    m
}

pub fn torsion_descriptor(rp: &RevealingPair) -> TorsionDescriptor {
    let n = rp.element.arity();
    let entries = cycle_census(rp)
        .into_iter()
        .map(|(m, count)| TorsionEntry { m, count, r: (count - 1) % (n - 1) + 1 })
        .collect();
    TorsionDescriptor { n, entries }
}

fn repelling_points(rp: &RevealingPair) -> Vec<Point> {
    rp.repellers().flat_map(|s| s.orbit.iter().cloned()).collect()
}

/// Sum of the slope exponents of `g` at the repelling points of α.
pub fn s_exponent(g: &Element, rp_alpha: &RevealingPair) -> Result<i64, Error> {
    if !g.commutes_with(&rp_alpha.element) {
        return Err(Error::NotCommuting);
    }
    Ok(repelling_points(rp_alpha).iter().map(|p| g.slope_exponent_at(p)).sum())
}

/// Acts as `e` on the union of `cones` and as the identity elsewhere.
pub fn restrict(e: &Element, cones: &[Address]) -> Result<Element, Error> {
    let n = e.arity();
    let mut inside: Vec<Address> = cones.to_vec();
    inside.sort();
    inside.dedup();
    let outside = complement_cones(&inside, n);
    let mut rules = Vec::new();
    let mut work: Vec<(Address, Address)> = e.rules().to_vec();
    while let Some((d, r)) = work.pop() {
        if cone_in_union(&inside, &d, n) {
            if !cone_in_union(&inside, &r, n) {
                return Err(Error::NotInvariant(format!("{d} maps to {r}, outside the support")));
            }
            rules.push((d, r));
        } else if cone_in_union(&outside, &d, n) {
            if !cone_in_union(&outside, &r, n) {
                return Err(Error::NotInvariant(format!("{d} maps to {r}, inside the support")));
            }
        } else {
            for i in 0..n as u8 {
                work.push((d.child(i), r.child(i)));
            }
        }
    }
    rules.extend(outside.into_iter().map(|c| (c.clone(), c)));
    Ok(Element::from_rules(n, rules)?.reduce())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StairCandidate {
    pub source: Point,
    pub target: Point,
    pub exponent: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum StairError {
    #[error("bad candidate: {0}")]
    Precondition(String),
    #[error("no such element: {0}")]
    Inconsistent(String),
    #[error("inconclusive within the depth bound: {0}")]
    Inconclusive(String),
}

fn tail_class(p: &Point) -> Address {
    min_rotation(&p.period)
}

/// Partial affine rule table, grown under g∘α = α∘g.
struct Saturation<'a> {
    n: usize,
    alpha: &'a Element,
    alpha_inv: Element,
    table: BTreeMap<Address, Address>,
    work: Vec<(Address, Address)>,
    cap: usize,
    involutive: bool,
    inserted: usize,
}

const MAX_INSERTS: usize = 400_000;

impl<'a> Saturation<'a> {
    fn covering(&self, u: &Address) -> Option<(Address, Address)> {
        for k in 0..=u.len() {
            let p = Address::from_letters(&u.letters()[..k]);
            if let Some(q) = self.table.get(&p) {
                return Some((p, q.clone()));
            }
        }
        None
    }

    fn insert(&mut self, u: Address, v: Address) -> Result<(), StairError> {
        if u.len() > self.cap || v.len() > self.cap {
            return Ok(());
        }
        if let Some((p, q)) = self.covering(&u) {
            let tail = u.strip_prefix(&p).unwrap();
            if q.concat(tail) != v {
                return Err(StairError::Inconsistent(format!("{u} -> {v} contradicts {p} -> {q}")));
            }
            return Ok(());
        }
        let below: Vec<(Address, Address)> = self
            .table
            .range(u.clone()..)
            .take_while(|(k, _)| u.is_prefix_of(k))
            .map(|(k, w)| (k.clone(), w.clone()))
            .collect();
        for (k, w) in &below {
            if v.concat(k.strip_prefix(&u).unwrap()) != *w {
                return Err(StairError::Inconsistent(format!("{u} -> {v} contradicts {k} -> {w}")));
            }
        }
        for (k, _) in below {
            self.table.remove(&k);
        }
        self.inserted += 1;
        if self.inserted > MAX_INSERTS {
            return Err(StairError::Inconclusive("rule table grew past its limit".into()));
        }
        self.table.insert(u.clone(), v.clone());
        self.work.push((u.clone(), v.clone()));
        if self.involutive && u != v {
            self.insert(v, u)?;
        }
        Ok(())
    }

    fn push_through(e: &Element, u: &Address, v: &Address, cap: usize, out: &mut Vec<(Address, Address)>) {
        match (e.image_word(u), e.image_word(v)) {
            (Some(a), Some(b)) => out.push((a, b)),
            _ if u.len() >= cap || v.len() >= cap => {}
            _ => {
                for i in 0..e.arity() as u8 {
                    Self::push_through(e, &u.child(i), &v.child(i), cap, out);
                }
            }
        }
    }

    fn run(&mut self) -> Result<(), StairError> {
        while let Some((u, v)) = self.work.pop() {
            if self.table.get(&u) != Some(&v) {
                continue;
            }
            let mut out = Vec::new();
            Self::push_through(self.alpha, &u, &v, self.cap, &mut out);
            Self::push_through(&self.alpha_inv, &u, &v, self.cap, &mut out);
            for (a, b) in out {
                self.insert(a, b)?;
            }
        }
        Ok(())
    }

    fn holes(&self) -> Vec<Address> {
        let keys: Vec<Address> = self.table.keys().cloned().collect();
        complement_cones(&keys, self.n)
    }

    /// Fill holes whose parent sits at least `min_parent` deep, using the
    /// affine map that every rule below that parent agrees on.
    fn complete(&mut self, min_parent: usize) -> Result<bool, StairError> {
        let mut guesses = Vec::new();
        for h in self.holes() {
            let Some(p) = h.parent() else { continue };
            if p.len() < min_parent {
                continue;
            }
            let mut image: Option<Address> = None;
            let mut ok = true;
            for (k, w) in self.table.range(p.clone()..).take_while(|(k, _)| p.is_prefix_of(k)) {
                let tail = k.strip_prefix(&p).unwrap();
                let Some(q) = w.letters().strip_suffix(tail) else {
                    ok = false;
                    break;
                };
                let q = Address::from_letters(q);
                match &image {
                    None => image = Some(q),
                    Some(prev) if *prev == q => {}
                    Some(_) => {
                        ok = false;
                        break;
                    }
                }
            }
            if let (true, Some(q)) = (ok, image) {
                let last = *h.letters().last().unwrap();
                guesses.push((h, q.child(last)));
            }
        }
        let progress = !guesses.is_empty();
        for (h, w) in guesses {
            self.insert(h, w)?;
        }
        Ok(progress)
    }
}

/// Saturates a seed rule into a full element supported on `region`.
fn saturate(
    alpha: &Element,
    region: &[Address],
    seed: (Address, Address),
    depth_bound: usize,
    involutive: bool,
) -> Result<Element, StairError> {
    let n = alpha.arity();
    let alpha_depth = alpha.rules().iter().map(|(d, r)| d.len().max(r.len())).max().unwrap_or(0);
    let cap = 2 * depth_bound + 2 * alpha_depth + seed.0.len().abs_diff(seed.1.len()) + 4;
    let mut s = Saturation {
        n,
        alpha,
        alpha_inv: alpha.invert(),
        table: BTreeMap::new(),
        work: Vec::new(),
        cap: cap.max(seed.0.len().max(seed.1.len()) + alpha_depth + 2),
        involutive,
        inserted: 0,
    };
    for c in complement_cones(region, n) {
        s.table.insert(c.clone(), c);
    }
    s.insert(seed.0, seed.1)?;
    loop {
        s.run()?;
        if s.holes().is_empty() {
            break;
        }
        if !s.complete(depth_bound)? {
            return Err(StairError::Inconclusive(format!("{} uncovered cones remain", s.holes().len())));
        }
    }
    let rules: Vec<(Address, Address)> = s.table.into_iter().collect();
    let g = Element::from_rules(n, rules).map_err(|e| StairError::Inconsistent(e.to_string()))?;
    Ok(g.reduce())
}

/// Cone rule `r[..d] -> s[..d-k]` that carries `r` to `s`, seeded at least `min_depth` deep.
fn seed_rule(cand: &StairCandidate, min_depth: usize) -> Option<(Address, Address)> {
    let (r, s, k) = (&cand.source, &cand.target, cand.exponent);
    let start = min_depth.max(r.preperiod.len()).max((s.preperiod.len() as i64 + k).max(0) as usize);
    let span = r.period.len().max(s.period.len());
    for d in start..start + span + 1 {
        let e = d as i64 - k;
        if e < 0 {
            continue;
        }
        let cu = Address(r.prefix(d));
        let cv = Address(s.prefix(e as usize));
        if r.strip_cone(&cu) == s.strip_cone(&cv) {
            return Some((cu, cv));
        }
    }
    None
}

fn component_of_point(fg: &FlowGraph, p: &Point) -> Option<usize> {
    let v = fg.vertices.iter().position(|v| v.kind == VertexKind::RepellerOrbit && v.points.contains(p))?;
    fg.components.iter().position(|c| c.vertices.contains(&v))
}

fn verify(alpha: &Element, g: &Element, cand: &StairCandidate, region: &[Address]) -> Result<(), StairError> {
    if !g.commutes_with(alpha) {
        return Err(StairError::Inconclusive("assembled table does not commute".into()));
    }
    if g.apply_point(&cand.source) != cand.target || g.slope_exponent_at(&cand.source) != cand.exponent {
        return Err(StairError::Inconclusive("assembled table misses the candidate germ".into()));
    }
    if let Some(c) = g.support().iter().find(|c| !cone_in_union(region, c, alpha.arity())) {
        return Err(StairError::Inconclusive(format!("support escapes at {c}")));
    }
    Ok(())
}

/// The element commuting with `alpha_i`, supported in the component of
/// `cand.source`, sending source to target with the given slope exponent.
/// Elements whose tree pair needs leaves deeper than `depth_bound` may be missed.
pub fn stair_extend(alpha_i: &Element, cand: &StairCandidate, depth_bound: usize) -> Result<Element, StairError> {
    let rp = make_revealing(alpha_i).map_err(|e| StairError::Precondition(e.to_string()))?;
    let fg = build_flow_graph(&rp);
    stair_with(&rp, &fg, cand, depth_bound)
}

fn stair_with(rp: &RevealingPair, fg: &FlowGraph, cand: &StairCandidate, depth_bound: usize) -> Result<Element, StairError> {
    let reps = repelling_points(rp);
    if !reps.contains(&cand.source) {
        return Err(StairError::Precondition(format!("{} is not a repelling point", cand.source)));
    }
    if !reps.contains(&cand.target) {
        return Err(StairError::Precondition(format!("{} is not a repelling point", cand.target)));
    }
    let cs = component_of_point(fg, &cand.source).expect("repeller vertex");
    let ct = component_of_point(fg, &cand.target).expect("repeller vertex");
    if cs != ct {
        return Err(StairError::Precondition("source and target lie in different components".into()));
    }
    if orbit_len(rp, &cand.source) != orbit_len(rp, &cand.target) {
        return Err(StairError::Precondition("orbit lengths differ".into()));
    }
    if tail_class(&cand.source) != tail_class(&cand.target) {
        return Err(StairError::Precondition("target is not tail-equivalent to source".into()));
    }
    let seed = seed_rule(cand, depth_bound).ok_or_else(|| StairError::Precondition("no aligned seed cone".into()))?;
    let region = &fg.components[cs].support.cones;
    let g = saturate(&rp.element, region, seed, depth_bound, false)?;
    verify(&rp.element, &g, cand, region)?;
    Ok(g)
}

fn orbit_len(rp: &RevealingPair, p: &Point) -> usize {
    rp.spines.iter().find(|s| s.orbit.contains(p)).map(|s| s.orbit.len()).unwrap_or(0)
}

#[derive(Clone, Debug)]
pub struct FiniteGroup {
    pub elements: Vec<Element>,
    /// `table[i][j]` is the index of `elements[i]` followed by `elements[j]`.
    pub table: Vec<Vec<usize>>,
    pub complete: bool,
    pub closed: bool,
}

impl FiniteGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn element_orders(&self) -> Vec<u64> {
        self.elements
            .iter()
            .map(|g| match g.order() {
                Ok(Order::Finite(k)) => k,
                _ => 0,
            })
            .collect()
    }

    pub fn is_abelian(&self) -> bool {
        let k = self.order();
        (0..k).all(|i| (0..k).all(|j| self.table[i][j] == self.table[j][i]))
    }

    /// A short isomorphism-type name read off the table.
    pub fn name(&self) -> String {
        let k = self.order();
        let orders = self.element_orders();
        if k == 1 {
            "1".into()
        } else if orders.iter().any(|&o| o as usize == k) {
            format!("Z_{k}")
        } else if self.is_abelian() && orders.iter().all(|&o| o <= 2) {
            let r = k.trailing_zeros();
            vec!["Z_2"; r as usize].join(" × ")
        } else {
            format!("A_{{{k}}}")
        }
    }

    fn from_elements(mut elements: Vec<Element>, complete: bool) -> FiniteGroup {
        elements.sort_by_key(|g| g.to_text());
        elements.dedup();
        // identity first
        if let Some(i) = elements.iter().position(|g| g.is_identity()) {
            let id = elements.remove(i);
            elements.insert(0, id);
        }
        let index: BTreeMap<Element, usize> = elements.iter().cloned().enumerate().map(|(i, g)| (g, i)).collect();
        let mut closed = true;
        let mut table = vec![vec![usize::MAX; elements.len()]; elements.len()];
        for (i, a) in elements.iter().enumerate() {
            if !index.contains_key(&a.invert().reduce()) {
                closed = false;
            }
            for (j, b) in elements.iter().enumerate() {
                match a.compose(b).ok().and_then(|c| index.get(&c).copied()) {
                    Some(k) => table[i][j] = k,
                    None => closed = false,
                }
            }
        }
        FiniteGroup { elements, table, complete, closed }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "order": self.order(),
            "name": self.name(),
            "elements": self.elements.iter().map(|g| g.to_text()).collect::<Vec<_>>(),
            "table": self.table,
            "complete": self.complete,
            "closed": self.closed,
        })
    }
}

/// Torsion elements of the centralizer of a one-component non-torsion element,
/// found by running the stair construction over all admissible candidates.
pub fn enumerate_torsion_centralizer(alpha_i: &Element, depth_bound: usize) -> Result<FiniteGroup, Error> {
    let rp = make_revealing(alpha_i)?;
    let fg = build_flow_graph(&rp);
    let Some(comp) = fg.components.iter().find(|c| c.kind == ComponentKind::NonTorsion) else {
        return Err(Error::Invalid("element has no non-torsion component".into()));
    };
    let base_vertex = comp
        .vertices
        .iter()
        .copied()
        .find(|&v| fg.vertices[v].kind == VertexKind::RepellerOrbit)
        .expect("non-torsion component has a repeller");
    let base = fg.vertices[base_vertex].points[0].clone();
    let len = fg.vertices[base_vertex].points.len();
    let mut cands = Vec::new();
    for &v in &comp.vertices {
        let vx = &fg.vertices[v];
        if vx.kind != VertexKind::RepellerOrbit || vx.points.len() != len {
            continue;
        }
        for t in &vx.points {
            if tail_class(t) != tail_class(&base) {
                continue;
            }
            let b = depth_bound as i64;
            for k in -b..=b {
                cands.push(StairCandidate { source: base.clone(), target: t.clone(), exponent: k });
            }
        }
    }
    let results = par::map(&cands, |c| stair_with(&rp, &fg, c, depth_bound));
    let mut complete = true;
    let mut found = Vec::new();
    for r in results {
        match r {
            Ok(g) => {
                if matches!(g.order(), Ok(Order::Finite(_))) {
                    found.push(g);
                }
            }
            Err(StairError::Inconclusive(_)) => complete = false,
            Err(_) => {}
        }
    }
    Ok(FiniteGroup::from_elements(found, complete))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Exact,
    Heuristic,
}

#[derive(Clone, Debug)]
pub struct IccClass {
    /// Flow-graph component indices.
    pub members: Vec<usize>,
    /// Swaps certifying the merges, one per non-leading member.
    pub swaps: Vec<Element>,
    pub status: Status,
}

impl IccClass {
    pub fn q(&self) -> usize {
        self.members.len()
    }
}

/// A centralizer element exchanging components `a` and `b`, if one is found.
fn certify_swap(rp: &RevealingPair, fg: &FlowGraph, a: usize, b: usize, depth_bound: usize) -> Result<Element, bool> {
    let alpha = &rp.element;
    let n = alpha.arity();
    let reps = |c: usize| -> Vec<(Point, usize)> {
        fg.components[c]
            .vertices
            .iter()
            .filter(|&&v| fg.vertices[v].kind == VertexKind::RepellerOrbit)
            .flat_map(|&v| fg.vertices[v].points.iter().map(move |p| (p.clone(), fg.vertices[v].points.len())))
            .collect()
    };
    let (base, len) = reps(a)[0].clone();
    let mut region: Vec<Address> = fg.components[a].support.cones.clone();
    region.extend(fg.components[b].support.cones.iter().cloned());
    region = crate::address::collapse_cones(&region, n);
    let mut exps = vec![0i64];
    for k in 1..=depth_bound as i64 {
        exps.push(k);
        exps.push(-k);
    }
    let mut inconclusive = false;
    for (t, tl) in reps(b) {
        if tl != len || tail_class(&t) != tail_class(&base) {
            continue;
        }
        for &k in &exps {
            let cand = StairCandidate { source: base.clone(), target: t.clone(), exponent: k };
            let Some(seed) = seed_rule(&cand, depth_bound) else { continue };
            match saturate(alpha, &region, seed, depth_bound, true).and_then(|g| verify(alpha, &g, &cand, &region).map(|_| g)) {
                Ok(g) => return Ok(g),
                Err(StairError::Inconclusive(_)) => inconclusive = true,
                Err(_) => {}
            }
        }
    }
    Err(inconclusive)
}

/// Groups non-torsion components that some centralizer element exchanges.
pub fn icc_partition(fg: &FlowGraph, alpha: &Element, depth_bound: usize) -> Result<Vec<IccClass>, Error> {
    let rp = make_revealing(alpha)?;
    if *fg != build_flow_graph(&rp) {
        return Err(Error::Invalid("flow graph was not built from this element's revealing pair".into()));
    }
    let nontorsion: Vec<usize> =
        (0..fg.components.len()).filter(|&c| fg.components[c].kind == ComponentKind::NonTorsion).collect();
    let mut groups: BTreeMap<Vec<u8>, Vec<usize>> = BTreeMap::new();
    for &c in &nontorsion {
        let sig = component_signature(fg, c)?;
        groups.entry(serde_json::to_vec(&sig).expect("signature serializes")).or_default().push(c);
    }
    let mut classes = Vec::new();
    for members in groups.into_values() {
        let mut open: Vec<usize> = members;
        let mut separated_cleanly = true;
        let mut built: Vec<IccClass> = Vec::new();
        while let Some(lead) = (!open.is_empty()).then(|| open.remove(0)) {
            let mut class = IccClass { members: vec![lead], swaps: vec![], status: Status::Exact };
            let mut rest = Vec::new();
            for &c in &open {
                match certify_swap(&rp, fg, lead, c, depth_bound) {
                    Ok(g) => {
                        class.members.push(c);
                        class.swaps.push(g);
                    }
                    Err(_) => rest.push(c),
                }
            }
            if !rest.is_empty() {
                separated_cleanly = false;
            }
            open = rest;
            built.push(class);
        }
        for mut c in built {
            if !separated_cleanly {
                c.status = Status::Heuristic;
            }
            classes.push(c);
        }
    }
    classes.sort_by_key(|c| c.members[0]);
    Ok(classes)
}

#[derive(Clone, Debug)]
pub struct ClassDescriptor {
    pub members: Vec<usize>,
    pub q: usize,
    pub group: FiniteGroup,
    pub s_value: i64,
    pub status: Status,
}

#[derive(Clone, Debug)]
pub struct CentralizerDescriptor {
    pub torsion: TorsionDescriptor,
    pub classes: Vec<ClassDescriptor>,
    pub formula: String,
}

impl CentralizerDescriptor {
    pub fn t(&self) -> usize {
        self.classes.len()
    }

    /// Exact when every class is exact and every group search was complete.
    pub fn is_exact(&self) -> bool {
        self.classes.iter().all(|c| c.status == Status::Exact && c.group.complete && c.group.closed)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "torsion": {
                "s": self.torsion.s(),
                "entries": self.torsion.entries.iter().map(|e| json!({
                    "m": e.m, "count": e.count, "r": e.r,
                    "K": self.torsion.k_tag(e), "Q": self.torsion.q_tag(e),
                })).collect::<Vec<_>>(),
            },
            "t": self.t(),
            "classes": self.classes.iter().map(|c| json!({
                "members": c.members,
                "q": c.q,
                "A": c.group.to_json(),
                "S": c.s_value,
                "status": c.status,
            })).collect::<Vec<_>>(),
            "exact": self.is_exact(),
            "formula": self.formula,
        })
    }
}

pub fn centralizer_descriptor(alpha: &Element, depth_bound: usize) -> Result<CentralizerDescriptor, Error> {
    let rp = make_revealing(alpha)?;
    let fg = build_flow_graph(&rp);
    let torsion = torsion_descriptor(&rp);
    let classes = icc_partition(&fg, &rp.element, depth_bound)?;
    let mut out = Vec::new();
    for c in classes {
        let lead = &fg.components[c.members[0]].support;
        let alpha_c = restrict(&rp.element, &lead.cones)?;
        let group = enumerate_torsion_centralizer(&alpha_c, depth_bound)?;
        let rp_c = make_revealing(&alpha_c)?;
        let s_value = s_exponent(&alpha_c, &rp_c)?;
        out.push(ClassDescriptor { q: c.q(), members: c.members, group, s_value, status: c.status });
    }
    let formula = render_formula(&torsion, &out);
    Ok(CentralizerDescriptor { torsion, classes: out, formula })
}

fn render_formula(t: &TorsionDescriptor, classes: &[ClassDescriptor]) -> String {
    let mut parts: Vec<String> = t.entries.iter().map(|e| format!("{} ⋊ {}", t.k_tag(e), t.q_tag(e))).collect();
    for c in classes {
        let base = if c.group.order() == 1 { "Z".to_string() } else { format!("({} ⋊ Z)", c.group.name()) };
        parts.push(if c.q > 1 { format!("{base} ≀ P_{}", c.q) } else { base });
    }
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join(" × ")
    }
}

/// Generator rotating the first children of an `m`-orbit of periodic neutral leaves.
pub fn build_g1(alpha: &Element, m: usize) -> Result<Element, Error> {
    let rp = make_revealing(alpha)?;
    let n = alpha.arity();
    let orbit = rp
        .neutral_periodic_orbits
        .iter()
        .filter(|o| o.len() == m)
        .min_by(|a, b| a.iter().min().cmp(&b.iter().min()))
        .ok_or_else(|| Error::Invalid(format!("no periodic neutral orbit of length {m}")))?;
    // orbit lists λ, λα, λα², … starting from its least leaf
    let lam: Vec<Address> = orbit.clone();
    let mut leaves: BTreeSet<Address> = BTreeSet::new();
    for l in &lam {
        for i in 0..n as u8 {
            leaves.insert(l.child(i));
        }
    }
    let kids: Vec<Address> = leaves.iter().cloned().collect();
    let mut rules: Vec<(Address, Address)> = complement_cones(&kids, n).into_iter().map(|c| (c.clone(), c)).collect();
    for (r, l) in lam.iter().enumerate() {
        rules.push((l.child(0), lam[(r + 1) % m].child(0)));
        for i in 1..n as u8 {
            rules.push((l.child(i), l.child(i)));
        }
    }
    Ok(Element::from_rules(n, rules)?.reduce())
}
