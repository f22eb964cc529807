//! Flow graphs and discrete train tracks of revealing pairs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{json, Value};

use crate::address::{collapse_cones, is_complete_code, Address};
use crate::point::Point;
use crate::revealing::{IacKind, RevealingPair, Side};
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VertexKind {
    RepellerOrbit,
    AttractorOrbit,
    PeriodicNeutralLeaf,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FlowVertex {
    pub kind: VertexKind,
    /// Orbit points for orbit vertices, empty for leaf vertices.
    pub points: Vec<Point>,
    /// The leaf for a periodic leaf vertex; the component root for orbit vertices.
    pub address: Address,
    /// Spine word for orbit vertices.
    pub spine: Option<Address>,
}

impl FlowVertex {
    pub fn label(&self) -> String {
        match self.kind {
            VertexKind::PeriodicNeutralLeaf => self.address.to_string(),
            _ => self.points.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(" "),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EdgeKind {
    SourceSinkLine,
    PeriodicSelfLoop,
    NeutralStep,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FlowEdge {
    pub kind: EdgeKind,
    pub from: usize,
    pub to: usize,
    /// The chain for source-sink lines.
    pub label: Vec<Address>,
}

/// A union of cones together with the finitely many limit points it carries.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Support {
    #[serde(skip)]
    pub arity: usize,
    pub cones: Vec<Address>,
    pub points: Vec<Point>,
}

impl Support {
    /// Whether the cone `c` lies inside the union of `self.cones`.
    pub fn contains_cone(&self, c: &Address) -> bool {
        cone_in_union(&self.cones, c, self.arity)
    }

    pub fn contains_point(&self, p: &Point) -> bool {
        self.cones.iter().any(|c| p.in_cone(c))
    }
}

/// Whether the cone `c` lies inside the union of the prefix-free set `cones`.
pub fn cone_in_union(cones: &[Address], c: &Address, n: usize) -> bool {
    if cones.iter().any(|u| u.is_prefix_of(c)) {
        return true;
    }
    let rel: Vec<Address> = cones.iter().filter_map(|u| u.strip_prefix(c).map(|w| Address(w.to_vec()))).collect();
    !rel.is_empty() && is_complete_code(&rel, n)
}

/// Whether two prefix-free cone sets have the same union.
pub fn cone_union_eq(a: &[Address], b: &[Address], n: usize) -> bool {
    a.iter().all(|c| cone_in_union(b, c, n)) && b.iter().all(|c| cone_in_union(a, c, n))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ComponentKind {
    Torsion,
    NonTorsion,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FlowComponent {
    pub kind: ComponentKind,
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
    pub support: Support,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FlowGraph {
    pub arity: usize,
    pub vertices: Vec<FlowVertex>,
    pub edges: Vec<FlowEdge>,
    pub components: Vec<FlowComponent>,
}

pub fn build_flow_graph(rp: &RevealingPair) -> FlowGraph {
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    // orbit vertex per difference component, keyed by root
    let mut by_root: BTreeMap<Address, usize> = BTreeMap::new();
    for s in &rp.spines {
        by_root.insert(s.root.clone(), vertices.len());
        vertices.push(FlowVertex {
            kind: if s.is_repeller() { VertexKind::RepellerOrbit } else { VertexKind::AttractorOrbit },
            points: s.orbit.clone(),
            address: s.root.clone(),
            spine: Some(s.spine.clone()),
        });
    }
    let mut leaf_vertex: BTreeMap<Address, usize> = BTreeMap::new();
    for o in &rp.neutral_periodic_orbits {
        for l in o {
            leaf_vertex.insert(l.clone(), vertices.len());
            vertices.push(FlowVertex {
                kind: VertexKind::PeriodicNeutralLeaf,
                points: vec![],
                address: l.clone(),
                spine: None,
            });
        }
    }
    let comp_of = |leaf: &Address, side: Side| -> usize {
        let c = rp
            .components
            .iter()
            .find(|c| c.side == side && c.contains_leaf(leaf))
            .expect("chain endpoint lies in a component");
        by_root[&c.root]
    };
    for i in rp.iacs.iter().filter(|i| i.kind == IacKind::SourceSink) {
        let from = comp_of(&i.chain[0], Side::DomainMinusRange);
        let to = comp_of(i.chain.last().unwrap(), Side::RangeMinusDomain);
        edges.push(FlowEdge { kind: EdgeKind::SourceSinkLine, from, to, label: i.chain.clone() });
    }
    for s in &rp.spines {
        if s.period() > 1 {
            let v = by_root[&s.root];
            edges.push(FlowEdge { kind: EdgeKind::PeriodicSelfLoop, from: v, to: v, label: vec![] });
        }
    }
    for o in &rp.neutral_periodic_orbits {
        if o.len() > 1 {
            for k in 0..o.len() {
                let (a, b) = (&o[k], &o[(k + 1) % o.len()]);
                edges.push(FlowEdge {
                    kind: EdgeKind::NeutralStep,
                    from: leaf_vertex[a],
                    to: leaf_vertex[b],
                    label: vec![],
                });
            }
        }
    }
    let components = components_of(rp, &vertices, &edges);
    FlowGraph { arity: rp.element.arity(), vertices, edges, components }
}

fn components_of(rp: &RevealingPair, vertices: &[FlowVertex], edges: &[FlowEdge]) -> Vec<FlowComponent> {
    let nv = vertices.len();
    let mut parent: Vec<usize> = (0..nv).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut x = x;
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for e in edges {
        let (a, b) = (find(&mut parent, e.from), find(&mut parent, e.to));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for v in 0..nv {
        let r = find(&mut parent, v);
        groups.entry(r).or_default().push(v);
    }
    let tables: BTreeSet<Address> = rp.element.domain_leaves().into_iter().collect();
    let ranges: BTreeSet<Address> = rp.element.range_leaves().into_iter().collect();
    let neutral = |a: &Address| tables.contains(a) && ranges.contains(a);
    let mut out = Vec::new();
    for (_, vs) in groups {
        let es: Vec<usize> = (0..edges.len()).filter(|&i| vs.contains(&edges[i].from)).collect();
        let torsion = vs.iter().all(|&v| vertices[v].kind == VertexKind::PeriodicNeutralLeaf);
        let mut cones: BTreeSet<Address> = BTreeSet::new();
        let mut points: BTreeSet<Point> = BTreeSet::new();
        for &v in &vs {
            let vx = &vertices[v];
            cones.insert(vx.address.clone());
            points.extend(vx.points.iter().cloned());
            if let Some(s) = rp.spines.iter().find(|s| s.root == vx.address && vx.kind != VertexKind::PeriodicNeutralLeaf) {
                cones.extend(s.chain.iter().filter(|a| neutral(a)).cloned());
            }
        }
        for &e in &es {
            cones.extend(edges[e].label.iter().filter(|a| neutral(a)).cloned());
        }
        out.push(FlowComponent {
            kind: if torsion { ComponentKind::Torsion } else { ComponentKind::NonTorsion },
            vertices: vs,
            edges: es,
            support: Support {
                arity: rp.element.arity(),
                cones: collapse_cones(&cones.into_iter().collect::<Vec<_>>(), rp.element.arity()), points: points.into_iter().collect() },
        });
    }
    out
}

pub fn component_support(fg: &FlowGraph, c: usize) -> Result<&Support, Error> {
    fg.components
        .get(c)
        .map(|c| &c.support)
        .ok_or_else(|| Error::Invalid(format!("no component {c}")))
}

/// Least cyclic rotation of a word.
pub fn min_rotation(w: &Address) -> Address {
    let l = w.letters();
    (0..l.len().max(1))
        .map(|k| {
            let mut v = l.to_vec();
            let k = k.min(v.len());
            v.rotate_left(k);
            v
        })
        .min()
        .map(Address)
        .unwrap_or_default()
}

/// Isomorphism-class code of a non-torsion component.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Signature {
    /// (orbit length, spine up to rotation) per repelling orbit, sorted
    pub repellers: Vec<(usize, Address)>,
    pub attractors: Vec<(usize, Address)>,
    /// canonical colour sequence and adjacency of the repeller-to-attractor graph
    pub canonical: Vec<u8>,
}

pub fn component_signature(fg: &FlowGraph, c: usize) -> Result<Signature, Error> {
    let comp = fg.components.get(c).ok_or_else(|| Error::Invalid(format!("no component {c}")))?;
    if comp.kind == ComponentKind::Torsion {
        return Err(Error::Invalid("torsion components carry no signature".into()));
    }
    let colour = |v: usize| {
        let x = &fg.vertices[v];
        (x.kind, x.points.len(), min_rotation(x.spine.as_ref().unwrap()))
    };
    let mut repellers = Vec::new();
    let mut attractors = Vec::new();
    for &v in &comp.vertices {
        let (k, len, sp) = colour(v);
        match k {
            VertexKind::RepellerOrbit => repellers.push((len, sp)),
            _ => attractors.push((len, sp)),
        }
    }
    repellers.sort();
    attractors.sort();
    // simple directed adjacency: flow-line multiplicities change under elementary rollings
    let vs = &comp.vertices;
    let mut adj = vec![vec![false; vs.len()]; vs.len()];
    for &e in &comp.edges {
        let ed = &fg.edges[e];
        if ed.kind == EdgeKind::SourceSinkLine {
            let a = vs.iter().position(|&v| v == ed.from).unwrap();
            let b = vs.iter().position(|&v| v == ed.to).unwrap();
            adj[a][b] = true;
        }
    }
    let mut palette: Vec<_> = vs.iter().map(|&v| colour(v)).collect();
    palette.sort();
    palette.dedup();
    let colours: Vec<usize> = vs.iter().map(|&v| palette.binary_search(&colour(v)).unwrap()).collect();
    let canonical = canonical_form(&colours, &adj);
    Ok(Signature { repellers, attractors, canonical })
}

/// Canonical code of a vertex-coloured digraph: colour refinement, then
/// individualisation over every remaining tie, keeping the least encoding.
pub fn canonical_form(colours: &[usize], adj: &[Vec<bool>]) -> Vec<u8> {
    let cells = refine(colours, adj);
    let mut best: Option<Vec<u8>> = None;
    search(&cells, adj, &mut best);
    best.unwrap_or_default()
}

fn refine(colours: &[usize], adj: &[Vec<bool>]) -> Vec<usize> {
    let n = colours.len();
    let mut c = colours.to_vec();
    loop {
        let keys: Vec<(usize, Vec<usize>, Vec<usize>)> = (0..n)
            .map(|v| {
                let mut out: Vec<usize> = (0..n).filter(|&u| adj[v][u]).map(|u| c[u]).collect();
                let mut inn: Vec<usize> = (0..n).filter(|&u| adj[u][v]).map(|u| c[u]).collect();
                out.sort();
                inn.sort();
                (c[v], out, inn)
            })
            .collect();
        let mut sorted = keys.clone();
        sorted.sort();
        sorted.dedup();
        let next: Vec<usize> = keys.iter().map(|k| sorted.binary_search(k).unwrap()).collect();
        let classes = |x: &[usize]| x.iter().collect::<BTreeSet<_>>().len();
        if classes(&next) == classes(&c) {
            return next;
        }
        c = next;
    }
}

fn search(cells: &[usize], adj: &[Vec<bool>], best: &mut Option<Vec<u8>>) {
    let n = cells.len();
    let mut count = BTreeMap::new();
    for &c in cells {
        *count.entry(c).or_insert(0) += 1;
    }
    let tie = count.iter().find(|(_, &k)| k > 1).map(|(&c, _)| c);
    match tie {
        None => {
            // cells are a permutation: vertex v gets position cells[v]
            let mut order = vec![0; n];
            for v in 0..n {
                order[cells[v]] = v;
            }
            let mut code = Vec::with_capacity(n * n);
            for &a in &order {
                for &b in &order {
                    code.push(adj[a][b] as u8);
                }
            }
            if best.as_ref().is_none_or(|b| code < *b) {
                *best = Some(code);
            }
        }
        Some(c) => {
            for v in (0..n).filter(|&v| cells[v] == c) {
                // individualise v ahead of the rest of its cell
                let split: Vec<usize> = (0..n).map(|u| 2 * cells[u] + usize::from(cells[u] == c && u != v)).collect();
                search(&refine(&split, adj), adj, best);
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Arc {
    pub label: Address,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Circle {
    pub kind: VertexKind,
    /// Arcs in drawing order: clockwise for periodic orbits, counter-clockwise otherwise.
    pub arcs: Vec<Arc>,
    pub reflected: bool,
    /// For repeller / attractor circles: the spine arc's top and bottom labels and the attached tree.
    pub spine: Option<SpineGlue>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpineGlue {
    pub word: Address,
    pub top: Address,
    pub bottom: Address,
    pub tree_root: Address,
    pub tree_leaves: Vec<Address>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Line {
    pub source: Address,
    pub sink: Address,
    /// demarcation labels, one per node of the chain
    pub labels: Vec<Address>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TrainTrack {
    pub circles: Vec<Circle>,
    pub lines: Vec<Line>,
}

impl TrainTrack {
    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("serialisable")
    }
}

pub fn build_train_track(rp: &RevealingPair) -> TrainTrack {
    let mut circles = Vec::new();
    for o in &rp.neutral_periodic_orbits {
        circles.push(Circle {
            kind: VertexKind::PeriodicNeutralLeaf,
            arcs: o.iter().map(|l| Arc { label: l.clone() }).collect(),
            reflected: false,
            spine: None,
        });
    }
    for s in &rp.spines {
        let comp = rp.component(&s.root).unwrap();
        let (arcs, top, bottom) = if s.is_repeller() {
            // γ_0 .. γ_{s-1}; the spine arc runs from γ_s down to γ_0
            (&s.chain[..s.chain.len() - 1], s.chain.last().unwrap(), &s.chain[0])
        } else {
            (&s.chain[..s.chain.len() - 1], &s.chain[0], s.chain.last().unwrap())
        };
        circles.push(Circle {
            kind: if s.is_repeller() { VertexKind::RepellerOrbit } else { VertexKind::AttractorOrbit },
            arcs: arcs.iter().map(|l| Arc { label: l.clone() }).collect(),
            reflected: !s.is_repeller(),
            spine: Some(SpineGlue {
                word: s.spine.clone(),
                top: top.clone(),
                bottom: bottom.clone(),
                tree_root: comp.root.clone(),
                tree_leaves: comp.leaves.clone(),
            }),
        });
    }
    let lines = rp
        .source_sink_chains()
        .map(|i| Line { source: i.chain[0].clone(), sink: i.chain.last().unwrap().clone(), labels: i.chain.clone() })
        .collect();
    TrainTrack { circles, lines }
}

fn esc(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

pub fn flow_graph_dot(fg: &FlowGraph) -> String {
    let mut s = String::from("digraph flowgraph {\n");
    for (i, v) in fg.vertices.iter().enumerate() {
        let kind = serde_json::to_value(v.kind).unwrap();
        let _ = writeln!(s, "  n{i} [kind={}, label=\"{}\"];", kind, esc(&v.label()));
    }
    for e in &fg.edges {
        let kind = serde_json::to_value(e.kind).unwrap();
        let label: Vec<String> = e.label.iter().map(|a| a.to_string()).collect();
        let _ = writeln!(s, "  n{} -> n{} [kind={}, label=\"{}\"];", e.from, e.to, kind, label.join(","));
    }
    s.push_str("}\n");
    s
}

pub fn train_track_dot(tt: &TrainTrack) -> String {
    let mut s = String::from("graph traintrack {\n");
    let mut node = 0usize;
    for (ci, c) in tt.circles.iter().enumerate() {
        let kind = serde_json::to_value(c.kind).unwrap();
        let first = node;
        for a in &c.arcs {
            let _ = writeln!(s, "  c{ci}_{node} [kind={kind}, label=\"{}\", reflected={}];", a.label, c.reflected);
            node += 1;
        }
        for k in first..node {
            let next = if k + 1 == node { first } else { k + 1 };
            let _ = writeln!(s, "  c{ci}_{k} -- c{ci}_{next};");
        }
    }
    for (li, l) in tt.lines.iter().enumerate() {
        for (k, a) in l.labels.iter().enumerate() {
            let _ = writeln!(s, "  l{li}_{k} [kind=\"line\", label=\"{a}\"];");
            if k > 0 {
                let _ = writeln!(s, "  l{li}_{} -- l{li}_{k};", k - 1);
            }
        }
    }
    s.push_str("}\n");
    s
}

pub fn flow_graph_json(fg: &FlowGraph) -> Value {
    json!({
        "vertices": fg.vertices.iter().map(|v| json!({
            "kind": v.kind,
            "label": v.label(),
            "address": v.address,
            "spine": v.spine,
        })).collect::<Vec<_>>(),
        "edges": fg.edges,
        "components": fg.components,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::Element;
    use crate::revealing::{make_revealing, rolling, Rolling};

    fn a(s: &str) -> Address {
        Address::parse(s, 10).unwrap()
    }

    fn x0() -> Element {
        Element::from_pairs(2, &[("0", "00"), ("10", "01"), ("11", "1")]).unwrap()
    }

    fn mu() -> Element {
        Element::from_pairs(
            2,
            &[("00", "000"), ("010", "001"), ("011", "01"), ("10", "100"), ("110", "101"), ("111", "11")],
        )
        .unwrap()
    }

    #[test]
    fn identity_graph() {
        let fg = build_flow_graph(&make_revealing(&Element::identity(2)).unwrap());
        assert_eq!(fg.vertices.len(), 1);
        assert!(fg.edges.is_empty());
        assert_eq!(fg.components.len(), 1);
        assert_eq!(fg.components[0].kind, ComponentKind::Torsion);
        assert_eq!(fg.components[0].support.cones, vec![a("e")]);
        assert_eq!(flow_graph_dot(&fg).lines().count(), 3);
    }

    #[test]
    fn x0_graph() {
        let fg = build_flow_graph(&make_revealing(&x0()).unwrap());
        assert_eq!(fg.vertices.len(), 2);
        assert_eq!(fg.edges.len(), 1);
        assert_eq!(fg.edges[0].label, vec![a("10"), a("01")]);
        assert_eq!(fg.components.len(), 1);
        let sup = &fg.components[0].support;
        assert!(is_complete_code(&sup.cones, 2));
        assert_eq!(sup.points.len(), 2);
        let sig = component_signature(&fg, 0).unwrap();
        assert_eq!(sig.repellers, vec![(1, a("1"))]);
        assert_eq!(sig.attractors, vec![(1, a("0"))]);
        let rp2 = rolling(&make_revealing(&x0()).unwrap(), &Rolling::TypeII { root: a("1") }).unwrap();
        let fg2 = build_flow_graph(&rp2);
        assert_eq!(component_signature(&fg2, 0).unwrap(), sig);
    }

    #[test]
    fn transposition_graph() {
        let t = Element::from_pairs(2, &[("0", "1"), ("1", "0")]).unwrap();
        let fg = build_flow_graph(&make_revealing(&t).unwrap());
        assert_eq!(fg.vertices.len(), 2);
        assert_eq!(fg.edges.len(), 2);
        assert_eq!(fg.components.len(), 1);
        assert!(component_signature(&fg, 0).is_err());
        let tt = build_train_track(&make_revealing(&t).unwrap());
        assert_eq!(tt.circles.len(), 1);
        assert_eq!(tt.circles[0].arcs.len(), 2);
    }

    #[test]
    fn mu_components() {
        let fg = build_flow_graph(&make_revealing(&mu()).unwrap());
        assert_eq!(fg.components.len(), 2);
        assert_eq!(fg.components[0].support.cones, vec![a("0")]);
        assert_eq!(fg.components[1].support.cones, vec![a("1")]);
        assert_eq!(component_signature(&fg, 0).unwrap(), component_signature(&fg, 1).unwrap());
    }

    #[test]
    fn x0_train_track() {
        let tt = build_train_track(&make_revealing(&x0()).unwrap());
        assert_eq!(tt.circles.len(), 2);
        assert!(tt.circles.iter().all(|c| c.arcs.len() == 1));
        let att = tt.circles.iter().find(|c| c.kind == VertexKind::AttractorOrbit).unwrap();
        assert!(att.reflected);
        assert_eq!(tt.lines.len(), 1);
        assert_eq!(tt.lines[0].labels.len(), 2);
    }

    #[test]
    fn canonical_form_is_label_independent() {
        let adj1 = vec![vec![false, true, false], vec![false, false, false], vec![false, true, false]];
        let adj2 = vec![vec![false, false, false], vec![true, false, false], vec![true, false, false]];
        assert_eq!(canonical_form(&[0, 1, 0], &adj1), canonical_form(&[1, 0, 0], &adj2));
    }

    #[test]
    fn cone_union() {
        let cones = vec![a("00"), a("01"), a("1")];
        assert!(cone_in_union(&cones, &a("0"), 2));
        assert!(cone_in_union(&cones, &a("e"), 2));
        assert!(cone_in_union(&cones, &a("011"), 2));
        assert!(!cone_in_union(&[a("00")], &a("0"), 2));
        assert!(!cone_in_union(&cones, &a("e"), 3));
    }
}
