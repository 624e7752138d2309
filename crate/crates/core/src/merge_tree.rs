//! Merge-tree presentations `(G, R, gr)`.
//!
//! Relations identify two generators at a grade no smaller than either
//! endpoint's grade. The component functor at `s` is `G_s / ~_s`, where `~_s`
//! is generated by the relations of grade `<= s`.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::barcode::{Barcode, Interval};
use crate::cost::{Cost, Exponent};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::union_find::UnionFind;

/// Default cap on generators for the brute-force search over bijections.
pub const DEFAULT_SIGMA_LIMIT: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generator {
    pub id: u32,
    #[serde(with = "rational::serde_str")]
    pub grade: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relation {
    pub id: u32,
    pub ends: [u32; 2],
    #[serde(with = "rational::serde_str")]
    pub grade: Rational,
}

#[derive(Serialize, Deserialize)]
struct PresentationJson {
    generators: Vec<Generator>,
    #[serde(default)]
    relations: Vec<Relation>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PresentationJson", into = "PresentationJson")]
pub struct MergeTreePresentation {
    generators: Vec<Generator>,
    relations: Vec<Relation>,
    index: HashMap<u32, usize>,
}

impl TryFrom<PresentationJson> for MergeTreePresentation {
    type Error = Error;
    fn try_from(j: PresentationJson) -> Result<Self> {
        MergeTreePresentation::new(j.generators, j.relations)
    }
}

impl From<MergeTreePresentation> for PresentationJson {
    fn from(p: MergeTreePresentation) -> Self {
        PresentationJson { generators: p.generators, relations: p.relations }
    }
}

impl MergeTreePresentation {
    pub fn new(generators: Vec<Generator>, relations: Vec<Relation>) -> Result<Self> {
        let mut index = HashMap::with_capacity(generators.len());
        for (i, g) in generators.iter().enumerate() {
            if index.insert(g.id, i).is_some() {
                return Err(Error::InvalidPresentation(format!("duplicate generator id {}", g.id)));
            }
        }
        let mut seen = HashSet::new();
        for r in &relations {
            if !seen.insert(r.id) {
                return Err(Error::InvalidPresentation(format!("duplicate relation id {}", r.id)));
            }
            if r.ends[0] == r.ends[1] {
                return Err(Error::InvalidPresentation(format!("relation {} identifies a generator with itself", r.id)));
            }
            for e in r.ends {
                let g = index.get(&e).map(|&i| &generators[i]).ok_or_else(|| {
                    Error::InvalidPresentation(format!("relation {} refers to unknown generator {e}", r.id))
                })?;
                if r.grade < g.grade {
                    return Err(Error::InvalidPresentation(format!(
                        "relation {} at {} precedes generator {e} at {}",
                        r.id,
                        rational::format(&r.grade),
                        rational::format(&g.grade)
                    )));
                }
            }
        }
        Ok(MergeTreePresentation { generators, relations, index })
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn generator(&self, id: u32) -> Result<&Generator> {
        self.index.get(&id).map(|&i| &self.generators[i]).ok_or(Error::UnknownId(id))
    }

    pub fn relation(&self, id: u32) -> Result<&Relation> {
        self.relations.iter().find(|r| r.id == id).ok_or(Error::UnknownId(id))
    }

    fn max_grade(&self) -> Option<&Rational> {
        self.generators.iter().map(|g| &g.grade).chain(self.relations.iter().map(|r| &r.grade)).max()
    }

    /// Union-find over generator positions using relations of grade `<= s`.
    fn merged_at(&self, s: &Rational) -> UnionFind {
        let mut uf = UnionFind::new(self.generators.len());
        for r in self.relations.iter().filter(|r| &r.grade <= s) {
            uf.union(self.index[&r.ends[0]], self.index[&r.ends[1]]);
        }
        uf
    }

    /// The classes of `G_s / ~_s`, each sorted by id, ordered by smallest id.
    pub fn components_at(&self, s: &Rational) -> Vec<Vec<u32>> {
        let mut uf = self.merged_at(s);
        let mut classes: BTreeMap<usize, Vec<u32>> = BTreeMap::new();
        for (i, g) in self.generators.iter().enumerate() {
            if &g.grade <= s {
                classes.entry(uf.find(i)).or_default().push(g.id);
            }
        }
        let mut out: Vec<Vec<u32>> = classes.into_values().collect();
        for c in &mut out {
            c.sort_unstable();
        }
        out.sort();
        out
    }

    pub fn is_merge_tree(&self) -> bool {
        match self.max_grade() {
            Some(top) => self.components_at(top).len() == 1,
            None => false,
        }
    }

    /// Earliest grade at which the branches of `g` and `h` lie in one class.
    pub fn mrg(&self, g: u32, h: u32) -> Result<Rational> {
        let gg = self.generator(g)?.grade.clone();
        let hg = self.generator(h)?.grade.clone();
        if !self.is_merge_tree() {
            return Err(Error::InvalidPresentation("not a merge tree (more than one final component)".into()));
        }
        if g == h {
            return Ok(gg);
        }
        let (a, b) = (self.index[&g], self.index[&h]);
        let mut order: Vec<&Relation> = self.relations.iter().collect();
        order.sort_by(|x, y| x.grade.cmp(&y.grade).then(x.id.cmp(&y.id)));
        let mut uf = UnionFind::new(self.generators.len());
        for r in order {
            uf.union(self.index[&r.ends[0]], self.index[&r.ends[1]]);
            if uf.find(a) == uf.find(b) {
                return Ok(r.grade.clone().max(gg).max(hg));
            }
        }
        unreachable!("a merge tree connects every pair of generators")
    }

    /// Degree-0 barcode by the elder rule. Empty intervals are dropped.
    pub fn barcode(&self) -> Barcode {
        enum Event<'a> {
            Birth(usize, &'a Generator),
            Merge(&'a Relation),
        }
        let mut events: Vec<(&Rational, u8, u32, Event)> = self
            .generators
            .iter()
            .enumerate()
            .map(|(i, g)| (&g.grade, 0, g.id, Event::Birth(i, g)))
            .chain(self.relations.iter().map(|r| (&r.grade, 1, r.id, Event::Merge(r))))
            .collect();
        events.sort_by(|a, b| a.0.cmp(b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

        let mut uf = UnionFind::new(self.generators.len());
        // Per root: (birth grade, smallest generator id).
        let mut oldest: Vec<Option<(Rational, u32)>> = vec![None; self.generators.len()];
        let mut intervals = Vec::new();
        for (grade, _, _, event) in events {
            match event {
                Event::Birth(i, g) => oldest[i] = Some((g.grade.clone(), g.id)),
                Event::Merge(r) => {
                    let (ra, rb) = (uf.find(self.index[&r.ends[0]]), uf.find(self.index[&r.ends[1]]));
                    if ra == rb {
                        continue;
                    }
                    let a = oldest[ra].take().expect("born before related");
                    let b = oldest[rb].take().expect("born before related");
                    let (elder, younger) = if a <= b { (a, b) } else { (b, a) };
                    if &younger.0 < grade {
                        intervals.push(Interval::finite(younger.0, grade.clone()));
                    }
                    let root = uf.union(ra, rb);
                    oldest[root] = Some(elder);
                }
            }
        }
        intervals.extend(oldest.into_iter().flatten().map(|(birth, _)| Interval::infinite(birth)));
        Barcode::new(intervals)
    }
}

/// A compatibility bijection between two presentations, given on ids.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bijection {
    pub generators: BTreeMap<u32, u32>,
    pub relations: BTreeMap<u32, u32>,
}

impl Bijection {
    pub fn identity(p: &MergeTreePresentation) -> Self {
        Bijection {
            generators: p.generators.iter().map(|g| (g.id, g.id)).collect(),
            relations: p.relations.iter().map(|r| (r.id, r.id)).collect(),
        }
    }

    pub fn inverse(&self) -> Self {
        Bijection {
            generators: self.generators.iter().map(|(&a, &b)| (b, a)).collect(),
            relations: self.relations.iter().map(|(&a, &b)| (b, a)).collect(),
        }
    }

    /// Checks that this is a compatibility bijection from `p` to `q`.
    pub fn check(&self, p: &MergeTreePresentation, q: &MergeTreePresentation) -> Result<()> {
        let bad = |m: String| Err(Error::IncompatiblePresentations(m));
        if self.generators.len() != p.generators.len() || q.generators.len() != p.generators.len() {
            return bad("generator counts differ".into());
        }
        if self.relations.len() != p.relations.len() || q.relations.len() != p.relations.len() {
            return bad("relation counts differ".into());
        }
        let images: HashSet<u32> = self.generators.values().copied().collect();
        if images.len() != self.generators.len() {
            return bad("generator map is not injective".into());
        }
        for g in &p.generators {
            match self.generators.get(&g.id) {
                Some(t) if q.index.contains_key(t) => {}
                _ => return bad(format!("generator {} has no image in the target", g.id)),
            }
        }
        let images: HashSet<u32> = self.relations.values().copied().collect();
        if images.len() != self.relations.len() {
            return bad("relation map is not injective".into());
        }
        for r in &p.relations {
            let Some(t) = self.relations.get(&r.id) else {
                return bad(format!("relation {} has no image", r.id));
            };
            let Ok(target) = q.relation(*t) else {
                return bad(format!("relation {} maps to unknown relation {t}", r.id));
            };
            let mut mapped = [self.generators[&r.ends[0]], self.generators[&r.ends[1]]];
            let mut ends = target.ends;
            mapped.sort_unstable();
            ends.sort_unstable();
            if mapped != ends {
                return bad(format!("relation {} does not map onto the endpoints of relation {t}", r.id));
            }
        }
        Ok(())
    }
}

/// `d^p(P, Q)` along the compatibility bijection `sigma`.
pub fn dp_cost(p: &MergeTreePresentation, q: &MergeTreePresentation, sigma: &Bijection, exponent: Exponent) -> Result<Cost> {
    sigma.check(p, q)?;
    let diffs: Vec<Rational> = p
        .generators
        .iter()
        .map(|g| &g.grade - &q.generator(sigma.generators[&g.id]).expect("checked").grade)
        .chain(p.relations.iter().map(|r| &r.grade - &q.relation(sigma.relations[&r.id]).expect("checked").grade))
        .collect();
    Ok(Cost::from_differences(exponent, &diffs))
}

/// Minimum of [`dp_cost`] over every compatibility bijection, by exhaustive search.
///
/// Returns the optimum and one bijection attaining it, or [`Error::Infeasible`].
pub fn min_sigma_cost(
    p: &MergeTreePresentation,
    q: &MergeTreePresentation,
    exponent: Exponent,
    limit: usize,
) -> Result<(Cost, Bijection)> {
    let n = p.generators.len();
    if n > limit {
        return Err(Error::SizeLimitExceeded(format!("{n} generators exceeds the limit of {limit}")));
    }
    if q.generators.len() != n || q.relations.len() != p.relations.len() {
        return Err(Error::Infeasible);
    }

    // Q's relations grouped by endpoint pair (as positions), grades sorted.
    let mut q_groups: HashMap<(usize, usize), Vec<&Relation>> = HashMap::new();
    for r in &q.relations {
        let (a, b) = (q.index[&r.ends[0]], q.index[&r.ends[1]]);
        q_groups.entry((a.min(b), a.max(b))).or_default().push(r);
    }
    for group in q_groups.values_mut() {
        group.sort_by(|x, y| x.grade.cmp(&y.grade).then(x.id.cmp(&y.id)));
    }

    let mut best: Option<(Cost, Vec<usize>)> = None;
    let mut perm: Vec<usize> = (0..n).collect();
    let mut visit = |perm: &[usize]| {
        let mut p_groups: HashMap<(usize, usize), Vec<&Relation>> = HashMap::new();
        for r in &p.relations {
            let (a, b) = (perm[p.index[&r.ends[0]]], perm[p.index[&r.ends[1]]]);
            p_groups.entry((a.min(b), a.max(b))).or_default().push(r);
        }
        if p_groups.len() != q_groups.len() {
            return;
        }
        let mut diffs: Vec<Rational> = Vec::with_capacity(n + p.relations.len());
        for (key, group) in &mut p_groups {
            let Some(target) = q_groups.get(key) else { return };
            if target.len() != group.len() {
                return;
            }
            // Sorted pairing is optimal for any convex per-pair cost.
            group.sort_by(|x, y| x.grade.cmp(&y.grade).then(x.id.cmp(&y.id)));
            diffs.extend(group.iter().zip(target).map(|(a, b)| &a.grade - &b.grade));
        }
        diffs.extend((0..n).map(|i| &p.generators[i].grade - &q.generators[perm[i]].grade));
        let cost = Cost::from_differences(exponent, &diffs);
        if best.as_ref().is_none_or(|(b, _)| cost.cmp_cost(b).is_lt()) {
            best = Some((cost, perm.to_vec()));
        }
    };
    permutations(&mut perm, 0, &mut visit);

    let (cost, perm) = best.ok_or(Error::Infeasible)?;
    let mut sigma = Bijection::default();
    for (i, g) in p.generators.iter().enumerate() {
        sigma.generators.insert(g.id, q.generators[perm[i]].id);
    }
    let mut used = HashSet::new();
    let mut p_rel: Vec<&Relation> = p.relations.iter().collect();
    p_rel.sort_by(|x, y| x.grade.cmp(&y.grade).then(x.id.cmp(&y.id)));
    for r in p_rel {
        let (a, b) = (perm[p.index[&r.ends[0]]], perm[p.index[&r.ends[1]]]);
        let target = q_groups[&(a.min(b), a.max(b))]
            .iter()
            .find(|t| !used.contains(&t.id))
            .expect("group sizes match");
        used.insert(target.id);
        sigma.relations.insert(r.id, target.id);
    }
    Ok((cost, sigma))
}

fn permutations(perm: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == perm.len() {
        visit(perm);
        return;
    }
    for i in k..perm.len() {
        perm.swap(k, i);
        permutations(perm, k + 1, visit);
        perm.swap(k, i);
    }
}
