//! Contractibility certificate for L(r,s), r ≥ 2.
//!
//! The base is the star of α₀ = {a, ā} when s = 0, or of β₀ = {a, b} when
//! s ≥ 1 (b = b₁). The remaining vertices are added by increasing size and each
//! descending link must be a cone on the vertex with inside I ∪ {ā} (resp.
//! I ∪ {b}). Vertices of size |H| − 2 have no such apex; their link must be all
//! of their link and isomorphic to L(r, s−1), which is certified recursively.

use std::collections::{BTreeSet, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{build_complex, compatible, enumerate_ideal_edges, HalfEdgeSet, IdealEdge, IdealError, Mask, SimplicialComplex};

/// How vertices of equal size are ordered.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TieOrder {
    /// By inside mask.
    Lexicographic,
    /// Uniformly shuffled from a seed.
    Shuffled(u64),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MorseCertificate {
    pub r: usize,
    pub s: usize,
    pub vertices: usize,
    /// Inside of α₀ or β₀.
    pub base: Vec<String>,
    pub base_star: usize,
    /// Vertices whose descending link was checked to be a cone.
    pub cone_steps: usize,
    /// Outsides of the maximal vertices whose link was matched with L(r,s−1).
    pub link_steps: Vec<Vec<String>>,
    pub recursive: Option<Box<MorseCertificate>>,
    pub certified: bool,
    pub failure: Option<String>,
}

/// Replays the collapse of L(r,s) onto the base star. `c` must be the legal
/// complex L(r,s).
pub fn morse_collapse_certificate(
    c: &SimplicialComplex,
    ties: TieOrder,
) -> Result<MorseCertificate, IdealError> {
    let h = c.half_edges;
    if !c.legal_only {
        return Err(IdealError::WrongComplex { r: h.r, s: h.s });
    }
    if h.r < 2 {
        return Err(IdealError::HypothesisViolated(h.r));
    }
    let base_mask: Mask = if h.s == 0 { 0b11 } else { 1 | 1 << (2 * h.r) };
    let apex_bit: Mask = base_mask & !1;
    let mut cert = MorseCertificate {
        r: h.r,
        s: h.s,
        vertices: c.vertices.len(),
        base: h.names(base_mask),
        base_star: 0,
        cone_steps: 0,
        link_steps: Vec::new(),
        recursive: None,
        certified: false,
        failure: None,
    };
    let index: HashMap<Mask, usize> = c
        .vertices
        .iter()
        .enumerate()
        .map(|(i, e)| (e.inside, i))
        .collect();
    let Some(&base) = index.get(&base_mask) else {
        cert.failure = Some("base vertex missing".into());
        return Ok(cert);
    };
    let mut in_star = vec![false; c.vertices.len()];
    in_star[base] = true;
    for u in c.neighbors(base) {
        in_star[u] = true;
    }
    cert.base_star = in_star.iter().filter(|&&x| x).count();

    let mut rng = match ties {
        TieOrder::Lexicographic => None,
        TieOrder::Shuffled(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
    };
    let mut rest: Vec<(usize, u64, usize)> = (0..c.vertices.len())
        .filter(|&v| !in_star[v])
        .map(|v| {
            let key = match rng.as_mut() {
                Some(r) => r.gen(),
                None => c.vertices[v].inside as u64,
            };
            (c.vertices[v].size(), key, v)
        })
        .collect();
    rest.sort_unstable();
    // star vertices come first (position 0)
    let mut position = vec![0usize; c.vertices.len()];
    for (p, &(_, _, v)) in rest.iter().enumerate() {
        position[v] = p + 1;
    }

    let max_size = h.len() - 2;
    for &(size, _, v) in &rest {
        let alpha = c.vertices[v];
        let descending: Vec<usize> = c
            .neighbors(v)
            .filter(|&u| position[u] < position[v])
            .collect();
        let apex_mask = alpha.inside | apex_bit;
        if size < max_size && apex_mask != alpha.inside {
            let Some(&apex) = index.get(&apex_mask) else {
                cert.failure = Some(format!("apex of {:?} is not legal", h.names(alpha.inside)));
                return Ok(cert);
            };
            if !descending.contains(&apex) {
                cert.failure = Some(format!(
                    "apex of {:?} is not in its descending link",
                    h.names(alpha.inside)
                ));
                return Ok(cert);
            }
            if let Some(&bad) = descending.iter().find(|&&u| u != apex && !c.adjacency[u][apex]) {
                cert.failure = Some(format!(
                    "descending link of {:?} is not a cone: {:?} misses the apex",
                    h.names(alpha.inside),
                    h.names(c.vertices[bad].inside)
                ));
                return Ok(cert);
            }
            cert.cone_steps += 1;
        } else {
            if h.s == 0 || size != max_size {
                cert.failure = Some(format!("no apex for {:?}", h.names(alpha.inside)));
                return Ok(cert);
            }
            let link: Vec<usize> = c.neighbors(v).collect();
            if link.len() != descending.len() {
                cert.failure = Some(format!(
                    "descending link of maximal {:?} is not its whole link",
                    h.names(alpha.inside)
                ));
                return Ok(cert);
            }
            if let Err(why) = link_matches_smaller(c, alpha, &link) {
                cert.failure = Some(why);
                return Ok(cert);
            }
            if cert.recursive.is_none() {
                let smaller = HalfEdgeSet::new(h.r, h.s - 1)?;
                let sub = morse_collapse_certificate(&build_complex(&smaller, true)?, ties)?;
                if !sub.certified {
                    cert.failure = Some(format!("L({},{}) is not certified", h.r, h.s - 1));
                    cert.recursive = Some(Box::new(sub));
                    return Ok(cert);
                }
                cert.recursive = Some(Box::new(sub));
            }
            cert.link_steps.push(h.names(alpha.outside(&h)));
        }
    }
    cert.certified = true;
    Ok(cert)
}

/// Checks that the link of a maximal β (outside {b, x}) is isomorphic to
/// L(r, s−1), where {b, x} is merged into one half-edge that takes over x's
/// role (partner of x̄ if x is paired, a single otherwise).
fn link_matches_smaller(c: &SimplicialComplex, beta: IdealEdge, link: &[usize]) -> Result<(), String> {
    let h = c.half_edges;
    let b = 2 * h.r;
    let outside = beta.outside(&h);
    if outside >> b & 1 == 0 || outside.count_ones() != 2 {
        return Err(format!("unexpected maximal vertex {:?}", h.names(beta.inside)));
    }
    let x = (0..h.len()).find(|&y| y != b && outside >> y & 1 == 1).unwrap();
    let smaller = HalfEdgeSet { r: h.r, s: h.s - 1 };
    // old id → new id; the merged half-edge is `merged`
    let mut relabel = vec![usize::MAX; h.len()];
    let merged;
    if x < 2 * h.r {
        for y in 0..2 * h.r {
            relabel[y] = y;
        }
        merged = x;
        for (k, y) in (b + 1..h.len()).enumerate() {
            relabel[y] = 2 * h.r + k;
        }
    } else {
        for y in 0..2 * h.r {
            relabel[y] = y;
        }
        let mut next = 2 * h.r;
        for y in b + 1..h.len() {
            if y != x {
                relabel[y] = next;
                next += 1;
            }
        }
        merged = next;
    }
    let map = |e: &IdealEdge| -> Option<Mask> {
        let cut = e.inside & outside;
        if cut != 0 && cut != outside {
            return None;
        }
        let mut m: Mask = 0;
        for y in 0..h.len() {
            if e.inside >> y & 1 == 1 && outside >> y & 1 == 0 {
                m |= 1 << relabel[y];
            }
        }
        if cut == outside {
            m |= 1 << merged;
        }
        Some(m)
    };
    let mut images = Vec::with_capacity(link.len());
    for &u in link {
        let m = map(&c.vertices[u])
            .ok_or_else(|| format!("link vertex {:?} splits the outside", h.names(c.vertices[u].inside)))?;
        images.push(IdealEdge { inside: m });
    }
    let image_set: BTreeSet<IdealEdge> = images.iter().copied().collect();
    let target: BTreeSet<IdealEdge> = enumerate_ideal_edges(&smaller, true).into_iter().collect();
    if image_set.len() != images.len() || image_set != target {
        return Err(format!(
            "link of {:?} does not match the legal ideal edges of L({},{})",
            h.names(beta.inside),
            smaller.r,
            smaller.s
        ));
    }
    for i in 0..link.len() {
        for j in i + 1..link.len() {
            if c.adjacency[link[i]][link[j]] != compatible(&smaller, &images[i], &images[j]) {
                return Err(format!(
                    "compatibility differs in the link of {:?}",
                    h.names(beta.inside)
                ));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn legal(r: usize, s: usize) -> SimplicialComplex {
        build_complex(&HalfEdgeSet::new(r, s).unwrap(), true).unwrap()
    }

    #[test]
    fn small_certificates() {
        let l20 = morse_collapse_certificate(&legal(2, 0), TieOrder::Lexicographic).unwrap();
        assert!(l20.certified);
        assert_eq!((l20.vertices, l20.cone_steps), (1, 0));

        let l21 = morse_collapse_certificate(&legal(2, 1), TieOrder::Lexicographic).unwrap();
        assert!(l21.certified, "{:?}", l21.failure);
        assert!(!l21.link_steps.is_empty());
        let sub = l21.recursive.as_ref().unwrap();
        assert_eq!((sub.r, sub.s), (2, 0));

        let l30 = morse_collapse_certificate(&legal(3, 0), TieOrder::Lexicographic).unwrap();
        assert!(l30.certified);
        assert!(l30.cone_steps > 0);
    }

    #[test]
    fn hypothesis_and_shape_errors() {
        let l13 = legal(1, 3);
        assert_eq!(
            morse_collapse_certificate(&l13, TieOrder::Lexicographic),
            Err(IdealError::HypothesisViolated(1))
        );
        let b = build_complex(&HalfEdgeSet::new(2, 1).unwrap(), false).unwrap();
        assert!(morse_collapse_certificate(&b, TieOrder::Lexicographic).is_err());
    }

    #[test]
    fn any_tie_order_works() {
        for (r, s) in [(2, 2), (3, 0), (3, 1)] {
            let c = legal(r, s);
            for seed in 0..8 {
                let cert = morse_collapse_certificate(&c, TieOrder::Shuffled(seed)).unwrap();
                assert!(cert.certified, "L({r},{s}) seed {seed}: {:?}", cert.failure);
            }
        }
    }

    #[test]
    fn full_complex_fails_the_cone_check() {
        // B(v) is not L(v); relabelling it as legal should break a check
        let mut b = build_complex(&HalfEdgeSet::new(2, 1).unwrap(), false).unwrap();
        b.legal_only = true;
        let cert = morse_collapse_certificate(&b, TieOrder::Lexicographic).unwrap();
        assert!(!cert.certified);
        assert!(cert.failure.is_some());
    }
}
