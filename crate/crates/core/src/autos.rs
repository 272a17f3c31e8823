//! Automorphisms of A_Γ given by generator images, the commuting family
//! G(e₀,T₀), bounded innerness certificates, and the projection/lift between
//! A_Γ and the free groups F(L_v) on links.
//!
//! Composition is right-to-left: `compose(φ, ψ)` applies ψ first. Conjugation
//! by g is `x ↦ g x g⁻¹`.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::graph::{DefiningGraph, NodeId, Structure};
use crate::words::{Letter, Raag, RaagWord, WordError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutError {
    #[error("automorphisms act on different groups")]
    ContextMismatch,
    #[error("expected {expected} generator images, got {got}")]
    ImageCount { expected: usize, got: usize },
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("invalid generator choices: {0}")]
    InvalidChoice(String),
    #[error("the defining graph is not a tree")]
    NotATree,
    #[error("conjugator for `{0}` has letters outside the link")]
    ConjugatorOutsideLink(String),
    #[error("`{0}` is not in the link of `{1}`")]
    NotInLink(String, String),
    #[error("the local map is not an automorphism of the free group on the link")]
    NotAutomorphism,
    #[error("lift postcondition failed: {0}")]
    LiftPostcondition(String),
}

/// An endomorphism of A_Γ recorded by the images of the generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RaagAutomorphism {
    raag: Raag,
    images: Vec<RaagWord>,
}

impl RaagAutomorphism {
    pub fn identity(raag: &Raag) -> Self {
        Self {
            images: (0..raag.rank()).map(RaagWord::generator).collect(),
            raag: raag.clone(),
        }
    }

    /// Images are reduced on the way in.
    pub fn from_images(raag: &Raag, images: Vec<RaagWord>) -> Result<Self, AutError> {
        if images.len() != raag.rank() {
            return Err(AutError::ImageCount {
                expected: raag.rank(),
                got: images.len(),
            });
        }
        let images = images
            .iter()
            .map(|w| raag.reduce(w))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            raag: raag.clone(),
            images,
        })
    }

    /// Identity except on the listed generators.
    pub fn with_images(raag: &Raag, changes: &[(NodeId, RaagWord)]) -> Result<Self, AutError> {
        let mut images: Vec<RaagWord> = (0..raag.rank()).map(RaagWord::generator).collect();
        for (v, w) in changes {
            raag.check(&RaagWord::generator(*v))?;
            images[*v] = w.clone();
        }
        Self::from_images(raag, images)
    }

    /// x ↦ g x g⁻¹ for x in `support`.
    pub fn partial_conjugation(raag: &Raag, support: &[NodeId], by: &RaagWord) -> Self {
        let changes: Vec<(NodeId, RaagWord)> = support
            .iter()
            .map(|&x| (x, RaagWord::generator(x).conjugated_by(by)))
            .collect();
        Self::with_images(raag, &changes).expect("support nodes belong to the group")
    }

    /// Conjugation by g on every generator.
    pub fn inner(raag: &Raag, by: &RaagWord) -> Self {
        let all: Vec<NodeId> = (0..raag.rank()).collect();
        Self::partial_conjugation(raag, &all, by)
    }

    /// v ↦ v w^exp.
    pub fn right_transvection(raag: &Raag, v: NodeId, w: NodeId, exp: i64) -> Self {
        let image = RaagWord::generator(v).concat(&RaagWord::power(w, exp));
        Self::with_images(raag, &[(v, image)]).expect("nodes belong to the group")
    }

    /// v ↦ w^exp v.
    pub fn left_transvection(raag: &Raag, v: NodeId, w: NodeId, exp: i64) -> Self {
        let image = RaagWord::power(w, exp).concat(&RaagWord::generator(v));
        Self::with_images(raag, &[(v, image)]).expect("nodes belong to the group")
    }

    pub fn raag(&self) -> &Raag {
        &self.raag
    }

    pub fn image(&self, v: NodeId) -> &RaagWord {
        &self.images[v]
    }

    pub fn images(&self) -> &[RaagWord] {
        &self.images
    }

    /// φ(w), reduced.
    pub fn apply(&self, w: &RaagWord) -> RaagWord {
        let mut out = RaagWord::empty();
        for l in w.letters() {
            if l.inverse {
                out = out.concat(&self.images[l.node].inverse());
            } else {
                out = out.concat(&self.images[l.node]);
            }
        }
        self.raag.reduce_unchecked(&out)
    }

    /// Images agree as group elements.
    pub fn equals(&self, other: &Self) -> bool {
        self.raag == other.raag
            && self
                .images
                .iter()
                .zip(&other.images)
                .all(|(a, b)| self.raag.equal_unchecked(a, b))
    }

    pub fn is_identity(&self) -> bool {
        self.images
            .iter()
            .enumerate()
            .all(|(v, w)| w.len() == 1 && w.letters()[0] == Letter::new(v, false))
    }

    /// Commuting generators have commuting images.
    pub fn respects_relations(&self) -> bool {
        let g = self.raag.graph();
        g.edges().iter().all(|&(a, b)| {
            let (x, y) = (&self.images[a], &self.images[b]);
            self.raag.equal_unchecked(&x.concat(y), &y.concat(x))
        })
    }

    /// Canonical images, usable as a hash key for equality of automorphisms.
    pub fn canonical_key(&self) -> Vec<RaagWord> {
        self.images
            .iter()
            .map(|w| self.raag.canonical_unchecked(w))
            .collect()
    }

    pub fn format_images(&self) -> BTreeMap<String, String> {
        let g = self.raag.graph();
        g.nodes()
            .map(|v| (g.name(v).to_string(), self.raag.format(&self.images[v])))
            .collect()
    }
}

/// `φ ∘ ψ`: apply ψ first, then φ.
pub fn compose(phi: &RaagAutomorphism, psi: &RaagAutomorphism) -> Result<RaagAutomorphism, AutError> {
    if phi.raag != psi.raag {
        return Err(AutError::ContextMismatch);
    }
    Ok(RaagAutomorphism {
        raag: phi.raag.clone(),
        images: psi.images.iter().map(|w| phi.apply(w)).collect(),
    })
}

/// An automorphism together with a verified two-sided inverse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Invertible {
    pub forward: RaagAutomorphism,
    pub inverse: RaagAutomorphism,
}

impl Invertible {
    pub fn new(forward: RaagAutomorphism, inverse: RaagAutomorphism) -> Result<Self, AutError> {
        let left = compose(&forward, &inverse)?;
        let right = compose(&inverse, &forward)?;
        if !(left.is_identity() && right.is_identity()) {
            return Err(AutError::InvalidChoice("inverse does not compose to the identity".into()));
        }
        Ok(Self { forward, inverse })
    }

    pub fn power(&self, k: i64) -> RaagAutomorphism {
        let base = if k < 0 { &self.inverse } else { &self.forward };
        let mut acc = RaagAutomorphism::identity(base.raag());
        for _ in 0..k.unsigned_abs() {
            acc = compose(base, &acc).expect("same group");
        }
        acc
    }
}

/// φ ψ φ⁻¹ ψ⁻¹
pub fn commutator(phi: &Invertible, psi: &Invertible) -> RaagAutomorphism {
    let tail = compose(&phi.inverse, &psi.inverse).expect("same group");
    let tail = compose(&psi.forward, &tail).expect("same group");
    compose(&phi.forward, &tail).expect("same group")
}

/// Searches for g with |g| ≤ `bound` and φ(x) = g x g⁻¹ for every generator.
///
/// Every φ(x) must cyclically reduce to `c_x · x · c_x⁻¹`, and then g lies in
/// `c_x · ⟨st(x)⟩`. The search enumerates that coset for one generator x, so
/// a `None` is exact for conjugators up to the bound.
pub fn is_inner_bounded(phi: &RaagAutomorphism, bound: usize) -> Option<RaagWord> {
    let raag = phi.raag();
    let g = raag.graph();
    if phi.is_identity() {
        return Some(RaagWord::empty());
    }
    let mut seeds = Vec::with_capacity(g.node_count());
    for x in g.nodes() {
        let (c, core) = raag.cyclic_reduce_unchecked(phi.image(x));
        if core != RaagWord::generator(x) {
            return None;
        }
        seeds.push(c);
    }
    let verifies = |cand: &RaagWord| {
        g.nodes().all(|x| {
            let lhs = RaagWord::generator(x).conjugated_by(cand);
            raag.equal_unchecked(&lhs, phi.image(x))
        })
    };
    for c in &seeds {
        if c.len() <= bound && verifies(c) {
            return Some(c.clone());
        }
    }
    // Smallest coset to walk: fewest star letters, shortest seed.
    let x0 = g
        .nodes()
        .min_by_key(|&x| (g.degree(x), seeds[x].len()))
        .expect("nonempty graph");
    let c0 = &seeds[x0];
    let star: Vec<NodeId> = std::iter::once(x0).chain(g.neighbors(x0).iter().copied()).collect();
    let letters: Vec<Letter> = star
        .iter()
        .flat_map(|&v| [Letter::new(v, false), Letter::new(v, true)])
        .collect();
    let max_len = bound + c0.len();
    let mut seen: HashSet<RaagWord> = HashSet::from([RaagWord::empty()]);
    let mut frontier = vec![RaagWord::empty()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for z in &frontier {
            for &l in &letters {
                let mut w = z.clone();
                w.push(l);
                let w = raag.canonical_unchecked(&w);
                if w.len() != z.len() + 1 || !seen.insert(w.clone()) {
                    continue;
                }
                let cand = raag.mul(c0, &w);
                if cand.len() <= bound && verifies(&cand) {
                    return Some(cand);
                }
                next.push(w);
            }
        }
        frontier = next;
    }
    None
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "type")]
pub enum GeneratorKind {
    /// Conjugation by `by` of one component of Γ − {center}.
    PartialConj {
        center: NodeId,
        component: Vec<NodeId>,
        by: NodeId,
    },
    /// leaf ↦ leaf · v, v the neighbour of the leaf.
    LeafTransvRight { leaf: NodeId, by: NodeId },
    /// leaf ↦ leaf · v̂.
    LeafTransvRightHat { leaf: NodeId, by: NodeId },
    /// v ↦ v · v̄
    TransvRight { node: NodeId, by: NodeId },
    /// v ↦ v̄ · v
    TransvLeft { node: NodeId, by: NodeId },
}

impl GeneratorKind {
    pub fn describe(&self, g: &DefiningGraph) -> String {
        match self {
            GeneratorKind::PartialConj { component, by, .. } => {
                let names: Vec<&str> = component.iter().map(|&x| g.name(x)).collect();
                format!("conj({{{}}}) by {}", names.join(","), g.name(*by))
            }
            GeneratorKind::LeafTransvRight { leaf, by }
            | GeneratorKind::LeafTransvRightHat { leaf, by }
            | GeneratorKind::TransvRight { node: leaf, by } => {
                format!("{0} -> {0} {1}", g.name(*leaf), g.name(*by))
            }
            GeneratorKind::TransvLeft { node, by } => {
                format!("{0} -> {1} {0}", g.name(*node), g.name(*by))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub kind: GeneratorKind,
    pub auto: Invertible,
}

/// The edge e₀, spanning tree T₀ of Γ₀, and the maps v ↦ v̂ and v ↦ v̄.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorChoices {
    pub e0: (NodeId, NodeId),
    pub t0: Vec<(NodeId, NodeId)>,
    /// v̂ for v ∈ V₀.
    pub hat: BTreeMap<NodeId, NodeId>,
    /// v̄ for v ∉ V₀.
    pub bar: BTreeMap<NodeId, NodeId>,
}

fn norm(e: (NodeId, NodeId)) -> (NodeId, NodeId) {
    (e.0.min(e.1), e.0.max(e.1))
}

impl GeneratorChoices {
    /// e₀ prefers an edge of Γ₀ with two non-hub endpoints, then one, then the
    /// lexicographically first; T₀ grows breadth-first from e₀.
    pub fn default_for(g: &DefiningGraph, s: &Structure) -> Result<Self, AutError> {
        let mut edges: Vec<(NodeId, NodeId)> = s
            .gamma0
            .edges
            .iter()
            .map(|&(a, b)| if g.name_cmp(a, b).is_le() { (a, b) } else { (b, a) })
            .collect();
        edges.sort_by(|x, y| (g.name(x.0), g.name(x.1)).cmp(&(g.name(y.0), g.name(y.1))));
        let nonhubs = |&(a, b): &(NodeId, NodeId)| {
            usize::from(!s.pieces.is_hub(a)) + usize::from(!s.pieces.is_hub(b))
        };
        let e0 = edges
            .iter()
            .copied()
            .max_by(|x, y| nonhubs(x).cmp(&nonhubs(y)).then_with(|| {
                // earlier edges win ties
                (g.name(y.0), g.name(y.1)).cmp(&(g.name(x.0), g.name(x.1)))
            }))
            .ok_or_else(|| AutError::InvalidChoice("Γ₀ has no edges".into()))?;
        Self::new(g, s, e0, None)
    }

    /// Validates e₀ and T₀ (or grows T₀ breadth-first when not given) and
    /// derives v̂ and v̄.
    pub fn new(
        g: &DefiningGraph,
        s: &Structure,
        e0: (NodeId, NodeId),
        t0: Option<Vec<(NodeId, NodeId)>>,
    ) -> Result<Self, AutError> {
        let in0 = |v: NodeId| s.gamma0.contains(v);
        let (v0, w0) = e0;
        if !(in0(v0) && in0(w0) && g.adjacent(v0, w0)) {
            return Err(AutError::InvalidChoice(format!(
                "e0 {}-{} is not an edge of Γ₀",
                g.name(v0),
                g.name(w0)
            )));
        }
        let t0 = match t0 {
            Some(t) => t.into_iter().map(norm).collect::<Vec<_>>(),
            None => bfs_tree(g, s, e0),
        };
        let tree: BTreeSet<(NodeId, NodeId)> = t0.iter().copied().collect();
        if !tree.contains(&norm(e0)) {
            return Err(AutError::InvalidChoice("T0 does not contain e0".into()));
        }
        for &(a, b) in &tree {
            if !(in0(a) && in0(b) && g.adjacent(a, b)) {
                return Err(AutError::InvalidChoice(format!(
                    "T0 edge {}-{} is not an edge of Γ₀",
                    g.name(a),
                    g.name(b)
                )));
            }
        }
        if tree.len() + 1 != s.gamma0.nodes.len() {
            return Err(AutError::InvalidChoice("T0 does not span Γ₀ as a tree".into()));
        }
        // orient T₀ − e₀ towards e₀
        let mut hat = BTreeMap::from([(v0, w0), (w0, v0)]);
        let mut queue = VecDeque::from([v0, w0]);
        while let Some(x) = queue.pop_front() {
            for &(a, b) in &tree {
                let y = if a == x {
                    b
                } else if b == x {
                    a
                } else {
                    continue;
                };
                if !hat.contains_key(&y) {
                    hat.insert(y, x);
                    queue.push_back(y);
                }
            }
        }
        if hat.len() != s.gamma0.nodes.len() {
            return Err(AutError::InvalidChoice("T0 is not connected".into()));
        }
        let mut bar = BTreeMap::new();
        for v in g.nodes().filter(|&v| !in0(v)) {
            let pick = |pool: &mut dyn Iterator<Item = NodeId>| {
                pool.filter(|&w| s.order.leq(v, w))
                    .min_by(|&a, &b| g.name_cmp(a, b))
            };
            let chosen = pick(&mut s.gamma0.u.iter().copied())
                .or_else(|| pick(&mut s.gamma0.nodes.iter().copied()))
                .ok_or_else(|| {
                    AutError::InvalidChoice(format!("no node of Γ₀ dominates {}", g.name(v)))
                })?;
            if g.adjacent(v, chosen) {
                return Err(AutError::InvalidChoice(format!(
                    "{} is adjacent to its dominator {}",
                    g.name(v),
                    g.name(chosen)
                )));
            }
            bar.insert(v, chosen);
        }
        Ok(Self { e0, t0, hat, bar })
    }
}

fn bfs_tree(g: &DefiningGraph, s: &Structure, e0: (NodeId, NodeId)) -> Vec<(NodeId, NodeId)> {
    let mut seen = BTreeSet::from([e0.0, e0.1]);
    let mut queue = VecDeque::from([e0.0, e0.1]);
    let mut tree = vec![norm(e0)];
    while let Some(x) = queue.pop_front() {
        let mut next: Vec<NodeId> = g
            .neighbors(x)
            .iter()
            .copied()
            .filter(|&y| s.gamma0.contains(y))
            .collect();
        next.sort_by(|&a, &b| g.name_cmp(a, b));
        for y in next {
            if seen.insert(y) {
                tree.push(norm((x, y)));
                queue.push_back(y);
            }
        }
    }
    tree
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CommutationCertificate {
    pub first: usize,
    pub second: usize,
    /// Conjugator of the commutator; empty when the pair commutes in Aut.
    /// `None` means no conjugator was found up to `bound`.
    pub conjugator: Option<String>,
    pub bound: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InnerWitness {
    /// Exponents (a, b) of the conjugation by v₀^a w₀^b.
    pub conjugation: (i64, i64),
    pub exponents: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InnerLattice {
    pub rank: usize,
    pub witnesses: Vec<InnerWitness>,
    /// The exponent box exceeded the search cap and was not fully explored.
    pub partial: bool,
}

#[derive(Debug, Clone)]
pub struct GeneratorSet {
    pub raag: Raag,
    pub generators: Vec<Generator>,
    pub choices: GeneratorChoices,
    pub certificates: Vec<CommutationCertificate>,
    pub inner_lattice: Option<InnerLattice>,
}

impl GeneratorSet {
    pub fn count(&self) -> usize {
        self.generators.len()
    }

    /// Generator count minus the rank of the inner lattice, once computed.
    pub fn outer_rank(&self) -> Option<usize> {
        self.inner_lattice.as_ref().map(|l| self.count() - l.rank)
    }

    pub fn uncertified_pairs(&self) -> usize {
        self.certificates.iter().filter(|c| c.conjugator.is_none()).count()
    }

    /// Runs [`verify_commuting`] and [`inner_lattice`] and stores the results.
    pub fn certify(&mut self, bound: usize, exponent_bound: i64) {
        self.certificates = verify_commuting(self, bound);
        self.inner_lattice = Some(inner_lattice(self, exponent_bound));
    }

    pub fn to_json(&self) -> serde_json::Value {
        let g = self.raag.graph();
        let name = |v: NodeId| g.name(v).to_string();
        let generators: Vec<serde_json::Value> = self
            .generators
            .iter()
            .enumerate()
            .map(|(i, gen)| {
                serde_json::json!({
                    "id": i,
                    "kind": match gen.kind {
                        GeneratorKind::PartialConj { .. } => "PartialConj",
                        GeneratorKind::LeafTransvRight { .. } => "LeafTransvRight",
                        GeneratorKind::LeafTransvRightHat { .. } => "LeafTransvRightHat",
                        GeneratorKind::TransvRight { .. } => "TransvRight",
                        GeneratorKind::TransvLeft { .. } => "TransvLeft",
                    },
                    "description": gen.kind.describe(g),
                    "images": gen.auto.forward.format_images(),
                })
            })
            .collect();
        let pairs = |m: &BTreeMap<NodeId, NodeId>| -> BTreeMap<String, String> {
            m.iter().map(|(&a, &b)| (name(a), name(b))).collect()
        };
        serde_json::json!({
            "composition": "right-to-left (compose(f, g) applies g first)",
            "generators": generators,
            "choices": {
                "e0": [name(self.choices.e0.0), name(self.choices.e0.1)],
                "t0": self.choices.t0.iter().map(|&(a, b)| [name(a), name(b)]).collect::<Vec<_>>(),
                "hat": pairs(&self.choices.hat),
                "bar": pairs(&self.choices.bar),
            },
            "certificates": self.certificates,
            "inner_lattice": self.inner_lattice,
            "outer_rank": self.outer_rank(),
        })
    }
}

/// Builds the generators of G(e₀,T₀): partial conjugations by v̂ of the
/// components of Γ − {v} away from v̂, two right transvections per leaf, and a
/// right and left transvection per non-leaf outside Γ₀. Certificates are left
/// empty; see [`GeneratorSet::certify`].
pub fn build_generator_set(
    g: &DefiningGraph,
    s: &Structure,
    choices: GeneratorChoices,
) -> Result<GeneratorSet, AutError> {
    let raag = Raag::new(g.clone());
    let mut generators = Vec::new();
    let invertible = |f: RaagAutomorphism, b: RaagAutomorphism| Invertible::new(f, b);

    for &v in &s.gamma0.nodes {
        let hat = choices.hat[&v];
        for comp in g.components_without(Some(v)) {
            if comp.contains(&hat) {
                continue;
            }
            let by = RaagWord::generator(hat);
            let auto = invertible(
                RaagAutomorphism::partial_conjugation(&raag, &comp, &by),
                RaagAutomorphism::partial_conjugation(&raag, &comp, &by.inverse()),
            )?;
            let mut component = comp;
            component.sort_by(|&a, &b| g.name_cmp(a, b));
            generators.push(Generator {
                kind: GeneratorKind::PartialConj {
                    center: v,
                    component,
                    by: hat,
                },
                auto,
            });
        }
    }
    for u in g.nodes_by_name() {
        if s.gamma0.contains(u) {
            continue;
        }
        if g.is_leaf(u) {
            let v = *g.neighbors(u).iter().next().unwrap();
            let hat = *choices.hat.get(&v).ok_or_else(|| {
                AutError::InvalidChoice(format!("leaf neighbour {} not in Γ₀", g.name(v)))
            })?;
            for (by, is_hat) in [(v, false), (hat, true)] {
                let auto = invertible(
                    RaagAutomorphism::right_transvection(&raag, u, by, 1),
                    RaagAutomorphism::right_transvection(&raag, u, by, -1),
                )?;
                let kind = if is_hat {
                    GeneratorKind::LeafTransvRightHat { leaf: u, by }
                } else {
                    GeneratorKind::LeafTransvRight { leaf: u, by }
                };
                generators.push(Generator { kind, auto });
            }
        } else {
            let by = choices.bar[&u];
            generators.push(Generator {
                kind: GeneratorKind::TransvRight { node: u, by },
                auto: invertible(
                    RaagAutomorphism::right_transvection(&raag, u, by, 1),
                    RaagAutomorphism::right_transvection(&raag, u, by, -1),
                )?,
            });
            generators.push(Generator {
                kind: GeneratorKind::TransvLeft { node: u, by },
                auto: invertible(
                    RaagAutomorphism::left_transvection(&raag, u, by, 1),
                    RaagAutomorphism::left_transvection(&raag, u, by, -1),
                )?,
            });
        }
    }
    for gen in &generators {
        if !gen.auto.forward.respects_relations() {
            return Err(AutError::InvalidChoice(format!(
                "{} does not respect the relations",
                gen.kind.describe(g)
            )));
        }
    }
    Ok(GeneratorSet {
        raag,
        generators,
        choices,
        certificates: Vec::new(),
        inner_lattice: None,
    })
}

/// Certifies that every commutator of two generators is inner, with a
/// conjugator of length at most `bound`.
pub fn verify_commuting(gs: &GeneratorSet, bound: usize) -> Vec<CommutationCertificate> {
    let mut out = Vec::new();
    for i in 0..gs.count() {
        for j in i + 1..gs.count() {
            let c = commutator(&gs.generators[i].auto, &gs.generators[j].auto);
            let conjugator = is_inner_bounded(&c, bound).map(|w| gs.raag.format(&w));
            out.push(CommutationCertificate {
                first: i,
                second: j,
                conjugator,
                bound,
            });
        }
    }
    out
}

/// Largest exponent box explored by [`inner_lattice`].
pub const INNER_SEARCH_CAP: u64 = 3u64.pow(14);

/// Finds products Π gᵢ^{eᵢ} (eᵢ ∈ [−b, b], generator order) equal in Aut to
/// conjugation by v₀^a w₀^b with |a|, |b| ≤ 1, and returns the rank of the
/// lattice of (a, b) realised.
pub fn inner_lattice(gs: &GeneratorSet, exponent_bound: i64) -> InnerLattice {
    let raag = &gs.raag;
    let (v0, w0) = gs.choices.e0;
    let mut targets: HashMap<Vec<RaagWord>, (i64, i64)> = HashMap::new();
    for a in -1..=1i64 {
        for b in -1..=1i64 {
            if (a, b) == (0, 0) {
                continue;
            }
            let g = RaagWord::power(v0, a).concat(&RaagWord::power(w0, b));
            targets.insert(RaagAutomorphism::inner(raag, &g).canonical_key(), (a, b));
        }
    }
    let width = (2 * exponent_bound + 1) as u64;
    let total = width.checked_pow(gs.count() as u32).unwrap_or(u64::MAX);
    let partial = total > INNER_SEARCH_CAP;
    // Fix the trailing generators at exponent 0 when the box is too large.
    let mut searched = gs.count();
    while width.checked_pow(searched as u32).unwrap_or(u64::MAX) > INNER_SEARCH_CAP {
        searched -= 1;
    }
    let powers: Vec<Vec<RaagAutomorphism>> = gs.generators[..searched]
        .iter()
        .map(|gen| (-exponent_bound..=exponent_bound).map(|k| gen.auto.power(k)).collect())
        .collect();

    let mut found: BTreeMap<(i64, i64), Vec<i64>> = BTreeMap::new();
    let mut exps = vec![0i64; gs.count()];
    let id = RaagAutomorphism::identity(raag);
    walk(&powers, 0, &id, exponent_bound, &mut exps, &targets, &mut found);

    let pairs: Vec<(i64, i64)> = found.keys().copied().collect();
    let rank = lattice_rank(&pairs);
    InnerLattice {
        rank,
        witnesses: found
            .into_iter()
            .map(|(conjugation, exponents)| InnerWitness {
                conjugation,
                exponents,
            })
            .collect(),
        partial,
    }
}

fn walk(
    powers: &[Vec<RaagAutomorphism>],
    depth: usize,
    acc: &RaagAutomorphism,
    b: i64,
    exps: &mut Vec<i64>,
    targets: &HashMap<Vec<RaagWord>, (i64, i64)>,
    found: &mut BTreeMap<(i64, i64), Vec<i64>>,
) {
    if depth == powers.len() {
        if let Some(&pair) = targets.get(&acc.canonical_key()) {
            found.entry(pair).or_insert_with(|| exps.clone());
        }
        return;
    }
    for (i, k) in (-b..=b).enumerate() {
        exps[depth] = k;
        if k == 0 {
            walk(powers, depth + 1, acc, b, exps, targets, found);
        } else {
            let next = compose(acc, &powers[depth][i]).expect("same group");
            walk(powers, depth + 1, &next, b, exps, targets, found);
        }
    }
    exps[depth] = 0;
}

fn lattice_rank(pairs: &[(i64, i64)]) -> usize {
    let nonzero: Vec<&(i64, i64)> = pairs.iter().filter(|p| **p != (0, 0)).collect();
    match nonzero.first() {
        None => 0,
        Some(&&(a, b)) => {
            if nonzero.iter().any(|&&(c, d)| a * d - b * c != 0) {
                2
            } else {
                1
            }
        }
    }
}

/// The image of an automorphism under retraction onto the free group F(L_v).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalAutomorphism {
    pub center: NodeId,
    /// L_v sorted by name; local generator i is `basis[i]`.
    pub basis: Vec<NodeId>,
    pub auto: RaagAutomorphism,
}

impl LocalAutomorphism {
    /// Free group F(L_v) with generators named after the link nodes.
    pub fn free_group(g: &DefiningGraph, v: NodeId) -> (Raag, Vec<NodeId>) {
        let mut basis: Vec<NodeId> = g.neighbors(v).iter().copied().collect();
        basis.sort_by(|&a, &b| g.name_cmp(a, b));
        let names: Vec<&str> = basis.iter().map(|&w| g.name(w)).collect();
        (Raag::free(&names), basis)
    }

    /// The local automorphism w ↦ g_w w g_w⁻¹ given conjugators written over
    /// the nodes of L_v (missing entries mean g_w = 1).
    pub fn from_conjugators(
        g: &DefiningGraph,
        v: NodeId,
        conjugators: &BTreeMap<NodeId, RaagWord>,
    ) -> Result<Self, AutError> {
        let (free, basis) = Self::free_group(g, v);
        let local_of: HashMap<NodeId, NodeId> =
            basis.iter().enumerate().map(|(i, &w)| (w, i)).collect();
        for &w in conjugators.keys() {
            if !local_of.contains_key(&w) {
                return Err(AutError::NotInLink(g.name(w).into(), g.name(v).into()));
            }
        }
        let mut images = Vec::with_capacity(basis.len());
        for (i, &w) in basis.iter().enumerate() {
            let gw = conjugators.get(&w).cloned().unwrap_or_default();
            let local = to_local(&gw, &local_of)
                .ok_or_else(|| AutError::ConjugatorOutsideLink(g.name(w).into()))?;
            images.push(RaagWord::generator(i).conjugated_by(&local));
        }
        Ok(Self {
            center: v,
            basis,
            auto: RaagAutomorphism::from_images(&free, images)?,
        })
    }

    /// Whether the images form a basis of F(L_v).
    pub fn is_automorphism(&self) -> bool {
        is_free_basis(self.auto.raag(), self.auto.images())
    }

    /// Trivial in Out(F(L_v)).
    pub fn is_inner(&self) -> bool {
        free_inner_conjugator(&self.auto).is_some()
    }
}

fn to_local(w: &RaagWord, local_of: &HashMap<NodeId, NodeId>) -> Option<RaagWord> {
    w.letters()
        .iter()
        .map(|l| local_of.get(&l.node).map(|&i| Letter::new(i, l.inverse)))
        .collect::<Option<Vec<_>>>()
        .map(RaagWord::from_letters)
}

/// P_v: retract each φ̂(w), w ∈ L_v, onto F(L_v) by deleting letters outside
/// the link, then freely reduce.
pub fn project_local(phi: &RaagAutomorphism, v: NodeId) -> LocalAutomorphism {
    let g = phi.raag().graph();
    let (free, basis) = LocalAutomorphism::free_group(g, v);
    let local_of: HashMap<NodeId, NodeId> =
        basis.iter().enumerate().map(|(i, &w)| (w, i)).collect();
    let images = basis
        .iter()
        .map(|&w| {
            let kept = phi.image(w).retract(|x| local_of.contains_key(&x));
            to_local(&kept, &local_of).expect("retracted onto the link")
        })
        .collect();
    LocalAutomorphism {
        center: v,
        basis,
        auto: RaagAutomorphism::from_images(&free, images).expect("local words are valid"),
    }
}

/// Lifts w ↦ g_w w g_w⁻¹ on F(L_v) to A_Γ for a tree Γ: v is fixed, and every
/// node in the component of Γ − {v} through w is conjugated by g_w. The
/// result is checked to project back to the input at v and to inner
/// automorphisms at every other node of V₀.
pub fn lift_local(
    g: &DefiningGraph,
    v: NodeId,
    conjugators: &BTreeMap<NodeId, RaagWord>,
) -> Result<RaagAutomorphism, AutError> {
    if !g.is_tree() {
        return Err(AutError::NotATree);
    }
    let local = LocalAutomorphism::from_conjugators(g, v, conjugators)?;
    if !local.is_automorphism() {
        return Err(AutError::NotAutomorphism);
    }
    let raag = Raag::new(g.clone());
    let mut images: Vec<RaagWord> = g.nodes().map(RaagWord::generator).collect();
    for comp in g.components_without(Some(v)) {
        let w = *comp
            .iter()
            .find(|&&x| g.adjacent(v, x))
            .expect("each component of a tree minus v meets the link");
        let gw = conjugators.get(&w).cloned().unwrap_or_default();
        for x in comp {
            images[x] = RaagWord::generator(x).conjugated_by(&gw);
        }
    }
    let lifted = RaagAutomorphism::from_images(&raag, images)?;
    if !lifted.respects_relations() {
        return Err(AutError::LiftPostcondition("relations not preserved".into()));
    }
    if !project_local(&lifted, v).auto.equals(&local.auto) {
        return Err(AutError::LiftPostcondition(format!(
            "projection at {} differs from the input",
            g.name(v)
        )));
    }
    for u in g.nodes().filter(|&u| u != v && !g.is_leaf(u)) {
        if !project_local(&lifted, u).is_inner() {
            return Err(AutError::LiftPostcondition(format!(
                "projection at {} is not trivial",
                g.name(u)
            )));
        }
    }
    Ok(lifted)
}

/// Exact innerness test in a free group: returns h with φ(x) = h x h⁻¹ for
/// all generators x.
pub fn free_inner_conjugator(phi: &RaagAutomorphism) -> Option<RaagWord> {
    let raag = phi.raag();
    debug_assert_eq!(raag.graph().edge_count(), 0, "free group expected");
    let n = raag.rank();
    let mut seeds = Vec::with_capacity(n);
    for x in 0..n {
        let (c, core) = raag.cyclic_reduce_unchecked(phi.image(x));
        if core != RaagWord::generator(x) {
            return None;
        }
        seeds.push(c);
    }
    if n == 0 {
        return Some(RaagWord::empty());
    }
    // h = c₀ x₀^a, and |a| ≤ |c₀| + |c₁| whenever a second generator exists.
    let span = seeds.iter().map(|c| c.len() as i64).sum::<i64>() + 1;
    (-span..=span).find_map(|a| {
        let h = raag.mul(&seeds[0], &RaagWord::power(0, a));
        (0..n)
            .all(|x| raag.equal_unchecked(&RaagWord::generator(x).conjugated_by(&h), phi.image(x)))
            .then_some(h)
    })
}

/// Whether `images` is a basis of the free group `raag`: as many elements as
/// the rank, and the Stallings folding of their loops is the rose.
pub fn is_free_basis(raag: &Raag, images: &[RaagWord]) -> bool {
    let n = raag.rank();
    if images.len() != n {
        return false;
    }
    // vertex 0 is the basepoint
    let mut parent: Vec<usize> = vec![0];
    let mut edges: Vec<(usize, Letter, usize)> = Vec::new();
    for w in images {
        let w = raag.reduce_unchecked(w);
        if w.is_empty() {
            return false;
        }
        let mut at = 0;
        for (i, &l) in w.letters().iter().enumerate() {
            let to = if i + 1 == w.len() {
                0
            } else {
                parent.push(parent.len());
                parent.len() - 1
            };
            edges.push((at, l, to));
            at = to;
        }
    }
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        let mut y = x;
        while parent[y] != r {
            let next = parent[y];
            parent[y] = r;
            y = next;
        }
        r
    }
    loop {
        let mut changed = false;
        let mut out: HashMap<(usize, Letter), usize> = HashMap::new();
        for &(a, l, b) in &edges {
            for (from, label, to) in [(a, l, b), (b, l.inv(), a)] {
                let from = find(&mut parent, from);
                let to = find(&mut parent, to);
                match out.get(&(from, label)) {
                    Some(&t) => {
                        let t = find(&mut parent, t);
                        if t != to {
                            parent[t] = to;
                            changed = true;
                        }
                    }
                    None => {
                        out.insert((from, label), to);
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    let root = find(&mut parent, 0);
    let single = (0..parent.len()).all(|x| find(&mut parent, x) == root);
    let used: BTreeSet<NodeId> = edges.iter().map(|e| e.1.node).collect();
    single && used.len() == n
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn setup(g: &DefiningGraph) -> (Raag, Structure) {
        (Raag::new(g.clone()), Structure::analyze(g).unwrap())
    }

    fn id(g: &DefiningGraph, n: &str) -> NodeId {
        g.node(n).unwrap()
    }

    #[test]
    fn compose_transvections_on_a_leaf() {
        let g = fixtures::p5();
        let (r, _) = setup(&g);
        let psi = RaagAutomorphism::right_transvection(&r, id(&g, "a"), id(&g, "c"), 1);
        let phi = RaagAutomorphism::right_transvection(&r, id(&g, "a"), id(&g, "b"), 1);
        let both = compose(&phi, &psi).unwrap();
        let canon = r.canonical(both.image(id(&g, "a"))).unwrap();
        assert_eq!(r.format(&canon), "a b c");
        assert!(both.equals(&compose(&psi, &phi).unwrap()));
    }

    #[test]
    fn compose_units_and_inverses() {
        let g = fixtures::p5();
        let (r, _) = setup(&g);
        let by = RaagWord::generator(id(&g, "b"));
        let supp = [id(&g, "d"), id(&g, "e")];
        let phi = RaagAutomorphism::partial_conjugation(&r, &supp, &by);
        let inv = RaagAutomorphism::partial_conjugation(&r, &supp, &by.inverse());
        assert!(compose(&phi, &inv).unwrap().is_identity());
        let one = RaagAutomorphism::identity(&r);
        assert_eq!(compose(&one, &phi).unwrap(), phi);
        let other = Raag::new(fixtures::c5l());
        assert_eq!(
            compose(&phi, &RaagAutomorphism::identity(&other)),
            Err(AutError::ContextMismatch)
        );
    }

    #[test]
    fn inner_search_examples() {
        let g = fixtures::p5();
        let (r, _) = setup(&g);
        let b = RaagWord::generator(id(&g, "b"));
        let conj = RaagAutomorphism::inner(&r, &b);
        assert_eq!(is_inner_bounded(&conj, 1), Some(b.clone()));
        let partial = RaagAutomorphism::partial_conjugation(&r, &[id(&g, "d"), id(&g, "e")], &b);
        // a and c commute with b, so this is conjugation by b
        assert_eq!(is_inner_bounded(&partial, 4), Some(b.clone()));
        let c = RaagWord::generator(id(&g, "c"));
        let outer = RaagAutomorphism::partial_conjugation(&r, &[id(&g, "e")], &c);
        assert_eq!(is_inner_bounded(&outer, 4), None);
        assert_eq!(is_inner_bounded(&RaagAutomorphism::identity(&r), 0), Some(RaagWord::empty()));
        // a longer conjugator is found even though no image exposes it whole
        let g2 = r.parse_word("c d b").unwrap();
        let conj2 = RaagAutomorphism::inner(&r, &g2);
        let found = is_inner_bounded(&conj2, 3).unwrap();
        assert!(RaagAutomorphism::inner(&r, &found).equals(&conj2));
        assert_eq!(is_inner_bounded(&conj2, 2), None);
    }

    fn descriptions(gs: &GeneratorSet, g: &DefiningGraph) -> Vec<String> {
        gs.generators.iter().map(|x| x.kind.describe(g)).collect()
    }

    #[test]
    fn p5_generator_set() {
        let g = fixtures::p5();
        let (_, s) = setup(&g);
        let choices = GeneratorChoices::new(&g, &s, (id(&g, "b"), id(&g, "c")), None).unwrap();
        let mut gs = build_generator_set(&g, &s, choices).unwrap();
        assert_eq!(
            descriptions(&gs, &g),
            [
                "conj({a}) by c",
                "conj({d,e}) by b",
                "conj({e}) by c",
                "a -> a b",
                "a -> a c",
                "e -> e d",
                "e -> e c",
            ]
        );
        gs.certify(4, 1);
        assert_eq!(gs.uncertified_pairs(), 0);
        let lattice = gs.inner_lattice.as_ref().unwrap();
        assert_eq!(lattice.rank, 2);
        assert!(!lattice.partial);
        assert_eq!(gs.outer_rank(), Some(5));
    }

    #[test]
    fn c5l_generator_set() {
        let g = fixtures::c5l();
        let (_, s) = setup(&g);
        let t0 = vec![
            (id(&g, "v1"), id(&g, "v2")),
            (id(&g, "v2"), id(&g, "v3")),
            (id(&g, "v3"), id(&g, "v4")),
            (id(&g, "v4"), id(&g, "v5")),
        ];
        let choices =
            GeneratorChoices::new(&g, &s, (id(&g, "v3"), id(&g, "v4")), Some(t0)).unwrap();
        assert_eq!(choices.hat[&id(&g, "v1")], id(&g, "v2"));
        let mut gs = build_generator_set(&g, &s, choices).unwrap();
        assert_eq!(
            descriptions(&gs, &g),
            ["conj({u}) by v2", "u -> u v1", "u -> u v2"]
        );
        gs.certify(4, 1);
        assert_eq!(gs.uncertified_pairs(), 0);
        assert_eq!(gs.inner_lattice.as_ref().unwrap().rank, 0);
        assert_eq!(gs.outer_rank(), Some(3));
    }

    #[test]
    fn invalid_choices_rejected() {
        let g = fixtures::p5();
        let (_, s) = setup(&g);
        // a–b is not in Γ₀
        assert!(GeneratorChoices::new(&g, &s, (id(&g, "a"), id(&g, "b")), None).is_err());
        // T₀ missing e₀
        let t0 = vec![(id(&g, "c"), id(&g, "d"))];
        assert!(GeneratorChoices::new(&g, &s, (id(&g, "b"), id(&g, "c")), Some(t0)).is_err());
        // not spanning
        let t0 = vec![(id(&g, "b"), id(&g, "c"))];
        assert!(GeneratorChoices::new(&g, &s, (id(&g, "b"), id(&g, "c")), Some(t0)).is_err());
    }

    #[test]
    fn default_choices_prefer_nonhub_edges() {
        let g = fixtures::c5l();
        let (_, s) = setup(&g);
        let c = GeneratorChoices::default_for(&g, &s).unwrap();
        assert!(!s.pieces.is_hub(c.e0.0) && !s.pieces.is_hub(c.e0.1));
        let g = fixtures::p5();
        let (_, s) = setup(&g);
        let c = GeneratorChoices::default_for(&g, &s).unwrap();
        assert_eq!(c.e0, (id(&g, "b"), id(&g, "c")));
    }

    #[test]
    fn square_bar_falls_back_to_gamma0() {
        let g = fixtures::square();
        let (_, s) = setup(&g);
        let c = GeneratorChoices::default_for(&g, &s).unwrap();
        assert_eq!(c.bar[&id(&g, "c")], id(&g, "a"));
        assert_eq!(c.bar[&id(&g, "d")], id(&g, "b"));
        let gs = build_generator_set(&g, &s, c).unwrap();
        // (π−1) + 2(ν−ν₀) = 0 + 4
        assert_eq!(gs.count(), 4);
    }

    #[test]
    fn commuting_pairs() {
        let g = fixtures::p5();
        let (r, _) = setup(&g);
        let gen = |v: &str| RaagWord::generator(id(&g, v));
        let inv_pair = |supp: &[NodeId], by: RaagWord| {
            Invertible::new(
                RaagAutomorphism::partial_conjugation(&r, supp, &by),
                RaagAutomorphism::partial_conjugation(&r, supp, &by.inverse()),
            )
            .unwrap()
        };
        let outer = inv_pair(&[id(&g, "d"), id(&g, "e")], gen("b"));
        let inner = inv_pair(&[id(&g, "e")], gen("c"));
        assert!(is_inner_bounded(&commutator(&outer, &inner), 4).is_some());

        let t = |w: &str| {
            Invertible::new(
                RaagAutomorphism::right_transvection(&r, id(&g, "a"), id(&g, w), 1),
                RaagAutomorphism::right_transvection(&r, id(&g, "a"), id(&g, w), -1),
            )
            .unwrap()
        };
        assert!(commutator(&t("b"), &t("c")).is_identity());

        let disjoint = inv_pair(&[id(&g, "a")], gen("c"));
        assert!(commutator(&disjoint, &inner).is_identity());
    }

    #[test]
    fn projections() {
        let g = fixtures::p5();
        let (r, _) = setup(&g);
        let phi = RaagAutomorphism::partial_conjugation(
            &r,
            &[id(&g, "d"), id(&g, "e")],
            &RaagWord::generator(id(&g, "b")),
        );
        let at_c = project_local(&phi, id(&g, "c"));
        assert_eq!(
            at_c.auto.format_images(),
            BTreeMap::from([("b".into(), "b".into()), ("d".into(), "b d b^-1".into())])
        );
        assert!(at_c.is_automorphism());
        assert!(at_c.is_inner());
        let at_b = project_local(&phi, id(&g, "b"));
        assert!(at_b.auto.is_identity());
        let one = RaagAutomorphism::identity(&r);
        assert!(project_local(&one, id(&g, "d")).auto.is_identity());
    }

    #[test]
    fn spider_projection_is_outer() {
        let g = fixtures::spider();
        let r = Raag::new(g.clone());
        let comp = [id(&g, "x3"), id(&g, "y3")];
        let phi = RaagAutomorphism::partial_conjugation(&r, &comp, &RaagWord::generator(id(&g, "x1")));
        let at_c = project_local(&phi, id(&g, "c"));
        assert!(at_c.is_automorphism());
        assert!(!at_c.is_inner());
        assert!(project_local(&phi, id(&g, "x1")).is_inner());
    }

    #[test]
    fn lift_examples() {
        let g = fixtures::p5();
        let (r, _) = setup(&g);
        let c = id(&g, "c");
        let b = RaagWord::generator(id(&g, "b"));
        let d = RaagWord::generator(id(&g, "d"));

        let lifted = lift_local(&g, c, &BTreeMap::from([(id(&g, "d"), b.clone())])).unwrap();
        let expected =
            RaagAutomorphism::partial_conjugation(&r, &[id(&g, "d"), id(&g, "e")], &b);
        assert!(lifted.equals(&expected));

        assert!(lift_local(&g, c, &BTreeMap::new()).unwrap().is_identity());

        let lifted = lift_local(&g, c, &BTreeMap::from([(id(&g, "b"), d.clone())])).unwrap();
        let images = lifted.format_images();
        assert_eq!(images["b"], "d b d^-1");
        assert_eq!(images["a"], "d a d^-1");
        assert_eq!(images["e"], "e");
        assert_eq!(images["c"], "c");
    }

    #[test]
    fn lift_errors() {
        let g = fixtures::c5l();
        assert_eq!(
            lift_local(&g, id(&g, "v1"), &BTreeMap::new()),
            Err(AutError::NotATree)
        );
        let g = fixtures::p5();
        let bad = BTreeMap::from([(id(&g, "d"), RaagWord::generator(id(&g, "a")))]);
        assert!(matches!(
            lift_local(&g, id(&g, "c"), &bad),
            Err(AutError::ConjugatorOutsideLink(_))
        ));
        let s = fixtures::spider();
        let (x1, x2) = (id(&s, "x1"), id(&s, "x2"));
        let not_onto = BTreeMap::from([
            (x1, RaagWord::generator(x2)),
            (x2, RaagWord::generator(x1)),
        ]);
        assert_eq!(lift_local(&s, id(&s, "c"), &not_onto), Err(AutError::NotAutomorphism));
        let bad = BTreeMap::from([(id(&g, "a"), RaagWord::empty())]);
        assert!(matches!(lift_local(&g, id(&g, "c"), &bad), Err(AutError::NotInLink(..))));
    }

    #[test]
    fn free_basis_detection() {
        let f = Raag::free(&["x", "y"]);
        let w = |s: &str| f.parse_word(s).unwrap();
        assert!(is_free_basis(&f, &[w("x"), w("y")]));
        assert!(is_free_basis(&f, &[w("x y"), w("y")]));
        assert!(is_free_basis(&f, &[w("y x y^-1"), w("y")]));
        assert!(!is_free_basis(&f, &[w("x^2"), w("y")]));
        assert!(!is_free_basis(&f, &[w("y x y^-1"), w("x y x^-1")]));
        assert!(!is_free_basis(&f, &[w("x"), w("x")]));
    }

    #[test]
    fn free_innerness() {
        let f = Raag::free(&["x", "y", "z"]);
        let h = f.parse_word("y^-1 x^2 z").unwrap();
        let conj = RaagAutomorphism::inner(&f, &h);
        let found = free_inner_conjugator(&conj).unwrap();
        assert!(f.equal(&found, &h).unwrap());
        let partial =
            RaagAutomorphism::partial_conjugation(&f, &[0], &RaagWord::generator(1));
        assert_eq!(free_inner_conjugator(&partial), None);
    }
}
