//! Multiparameter presentations over GF(q).
//!
//! A presentation is a list of graded generators (the standard basis of
//! `F^G`) and graded relation vectors in `F^G`. Vectors are dense and indexed
//! by generator position, not by id; `vector` converts from ids.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::assignment::solve_weighted;
use crate::cost::{Cost, Exponent, Weight};
use crate::error::{Error, Result};
use crate::field::{same_span, span_rank, FieldMatrix, FieldVector, Modulus};
use crate::rational::{self, Rational};

/// A point of `R^t` with the product order.
pub trait Grade: Clone + Eq + fmt::Debug {
    fn coords(&self) -> &[Rational];

    fn from_coords(coords: Vec<Rational>) -> Result<Self>;

    fn leq(&self, other: &Self) -> bool {
        self.coords().iter().zip(other.coords()).all(|(a, b)| a <= b)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Grade2([Rational; 2]);

impl Grade2 {
    pub fn new(x: Rational, y: Rational) -> Self {
        Grade2([x, y])
    }

    pub fn ints(x: i64, y: i64) -> Self {
        Grade2([rational::int(x), rational::int(y)])
    }

    pub fn x(&self) -> &Rational {
        &self.0[0]
    }

    pub fn y(&self) -> &Rational {
        &self.0[1]
    }

    pub fn shifted(&self, dx: i64, dy: i64) -> Self {
        Grade2([&self.0[0] + rational::int(dx), &self.0[1] + rational::int(dy)])
    }
}

impl Grade for Grade2 {
    fn coords(&self) -> &[Rational] {
        &self.0
    }

    fn from_coords(coords: Vec<Rational>) -> Result<Self> {
        let [x, y]: [Rational; 2] = coords
            .try_into()
            .map_err(|c: Vec<Rational>| Error::Parse(format!("expected 2 coordinates, got {}", c.len())))?;
        Ok(Grade2([x, y]))
    }
}

impl fmt::Display for Grade2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", rational::format(self.x()), rational::format(self.y()))
    }
}

/// A point of `R^t` for any `t >= 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GradeN(pub Vec<Rational>);

impl Grade for GradeN {
    fn coords(&self) -> &[Rational] {
        &self.0
    }

    fn from_coords(coords: Vec<Rational>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Parse("grade needs at least one coordinate".into()));
        }
        Ok(GradeN(coords))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleGenerator<G> {
    pub id: u32,
    pub grade: G,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleRelation<G> {
    pub id: u32,
    pub coeffs: FieldVector,
    pub grade: G,
}

/// `(G, R, gr)` with `r` in the span of generators graded `<= gr(r)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation<G: Grade> {
    modulus: Modulus,
    generators: Vec<ModuleGenerator<G>>,
    relations: Vec<ModuleRelation<G>>,
    positions: HashMap<u32, usize>,
}

pub type TwoParamPresentation = Presentation<Grade2>;

impl<G: Grade> Presentation<G> {
    pub fn new(modulus: Modulus, generators: Vec<ModuleGenerator<G>>, relations: Vec<ModuleRelation<G>>) -> Result<Self> {
        let invalid = |m: String| Err(Error::InvalidPresentation(m));
        let mut positions = HashMap::with_capacity(generators.len());
        for (i, g) in generators.iter().enumerate() {
            if positions.insert(g.id, i).is_some() {
                return invalid(format!("duplicate generator id {}", g.id));
            }
        }
        let arity = generators.first().map(|g| g.grade.coords().len()).or_else(|| relations.first().map(|r| r.grade.coords().len()));
        let mut relation_ids = BTreeSet::new();
        for r in &relations {
            if !relation_ids.insert(r.id) {
                return invalid(format!("duplicate relation id {}", r.id));
            }
            if r.coeffs.len() != generators.len() {
                return invalid(format!("relation {} has {} coefficients for {} generators", r.id, r.coeffs.len(), generators.len()));
            }
            for (i, &c) in r.coeffs.iter().enumerate() {
                if c >= modulus.get() {
                    return invalid(format!("relation {} has unreduced coefficient {c}", r.id));
                }
                if c != 0 && !generators[i].grade.leq(&r.grade) {
                    return invalid(format!("relation {} involves generator {} of later grade", r.id, generators[i].id));
                }
            }
        }
        let all_grades = generators.iter().map(|g| &g.grade).chain(relations.iter().map(|r| &r.grade));
        if let Some(t) = arity {
            if all_grades.into_iter().any(|g| g.coords().len() != t) {
                return invalid("grades have differing numbers of coordinates".into());
            }
        }
        Ok(Presentation { modulus, generators, relations, positions })
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn generators(&self) -> &[ModuleGenerator<G>] {
        &self.generators
    }

    pub fn relations(&self) -> &[ModuleRelation<G>] {
        &self.relations
    }

    /// Position of generator `id` in the coordinate order.
    pub fn position(&self, id: u32) -> Result<usize> {
        self.positions.get(&id).copied().ok_or(Error::UnknownId(id))
    }

    /// Dense vector from `(generator id, coefficient)` pairs.
    pub fn vector(&self, terms: &[(u32, i64)]) -> Result<FieldVector> {
        let mut v = vec![0; self.generators.len()];
        for &(id, c) in terms {
            let i = self.position(id)?;
            v[i] = self.modulus.add(v[i], self.modulus.reduce(c));
        }
        Ok(v)
    }

    pub fn unit(&self, position: usize) -> FieldVector {
        let mut v = vec![0; self.generators.len()];
        v[position] = 1;
        v
    }

    pub fn generator_vectors_at(&self, pt: &G) -> Vec<FieldVector> {
        (0..self.generators.len()).filter(|&i| self.generators[i].grade.leq(pt)).map(|i| self.unit(i)).collect()
    }

    pub fn relation_vectors_at(&self, pt: &G) -> Vec<FieldVector> {
        self.relations.iter().filter(|r| r.grade.leq(pt)).map(|r| r.coeffs.clone()).collect()
    }

    /// `dim <G_pt> / <R_pt>`.
    pub fn dim_at(&self, pt: &G) -> usize {
        let gens = self.generators.iter().filter(|g| g.grade.leq(pt)).count();
        let rels = self.relation_vectors_at(pt);
        gens - span_rank(self.modulus, self.generators.len(), &rels).expect("relation vectors have presentation length")
    }

    /// Whether the class of `v` in `F^G / <R>` lies in the image of the module at `pt`.
    pub fn in_image(&self, v: &[u32], pt: &G) -> Result<bool> {
        let dim = self.generators.len();
        if v.len() != dim {
            return Err(Error::DimensionMismatch(format!("vector of length {} for {dim} generators", v.len())));
        }
        let mut basis = self.generator_vectors_at(pt);
        basis.extend(self.relations.iter().map(|r| r.coeffs.clone()));
        let before = span_rank(self.modulus, dim, &basis)?;
        basis.push(v.iter().map(|&c| self.modulus.reduce(i64::from(c))).collect());
        Ok(span_rank(self.modulus, dim, &basis)? == before)
    }

    /// Distinct values of each coordinate over all grades, ascending.
    fn axis_values(&self) -> Vec<BTreeSet<Rational>> {
        let mut axes: Vec<BTreeSet<Rational>> = Vec::new();
        for g in self.generators.iter().map(|g| &g.grade).chain(self.relations.iter().map(|r| &r.grade)) {
            for (i, c) in g.coords().iter().enumerate() {
                if axes.len() <= i {
                    axes.push(BTreeSet::new());
                }
                axes[i].insert(c.clone());
            }
        }
        axes
    }

    /// All grid points built from coordinates occurring in `self` or `other`.
    pub fn critical_grid(&self, other: &Self) -> Result<Vec<G>> {
        let mut axes = self.axis_values();
        for (i, values) in other.axis_values().into_iter().enumerate() {
            if axes.len() <= i {
                axes.push(BTreeSet::new());
            }
            axes[i].extend(values);
        }
        let mut points: Vec<Vec<Rational>> = vec![Vec::new()];
        for values in &axes {
            points = points
                .into_iter()
                .flat_map(|prefix| {
                    values.iter().map(move |v| {
                        let mut p = prefix.clone();
                        p.push(v.clone());
                        p
                    })
                })
                .collect();
        }
        if axes.is_empty() {
            return Ok(Vec::new());
        }
        points.into_iter().map(G::from_coords).collect()
    }

    fn map_grades<H: Grade>(&self, f: impl Fn(&G) -> Result<H>) -> Result<Presentation<H>> {
        let generators =
            self.generators.iter().map(|g| Ok(ModuleGenerator { id: g.id, grade: f(&g.grade)? })).collect::<Result<_>>()?;
        let relations = self
            .relations
            .iter()
            .map(|r| Ok(ModuleRelation { id: r.id, coeffs: r.coeffs.clone(), grade: f(&r.grade)? }))
            .collect::<Result<_>>()?;
        Presentation::new(self.modulus, generators, relations)
    }
}

/// Pads every grade with zeros up to `t` coordinates.
pub fn lift_to_t(p: &TwoParamPresentation, t: usize) -> Result<Presentation<GradeN>> {
    if t < 2 {
        return Err(Error::DimensionMismatch(format!("cannot lift to t = {t} < 2")));
    }
    p.map_grades(|g| {
        let mut c = g.coords().to_vec();
        c.resize(t, rational::int(0));
        Ok(GradeN(c))
    })
}

/// Drops every coordinate after the first two.
pub fn project_to_2(p: &Presentation<GradeN>) -> Result<TwoParamPresentation> {
    p.map_grades(|g| {
        if g.0.len() < 2 {
            return Err(Error::DimensionMismatch("grade has fewer than 2 coordinates".into()));
        }
        Ok(Grade2::new(g.0[0].clone(), g.0[1].clone()))
    })
}

fn grade_weight<G: Grade>(a: &G, b: &G, p: Exponent) -> Weight {
    a.coords()
        .iter()
        .zip(b.coords())
        .fold(Weight::zero(p), |acc, (x, y)| acc.combine(&Weight::of_difference(&(x - y), p), p))
}

/// Generator and relation correspondences induced by `sigma`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SigmaMatch {
    /// `generators[i]` is the position in `Q` of `sigma(g_i)`.
    pub generators: Vec<usize>,
    /// `relations[i]` is the index in `Q` matched to relation `i` of `P`.
    pub relations: Vec<usize>,
}

/// Checks that `sigma: F^{G_P} -> F^{G_Q}` maps generators to generators and
/// the relation multiset onto the relation multiset. Among equal relation
/// vectors the pairing minimizing the grade cost is chosen.
pub fn sigma_match<G: Grade>(p: &Presentation<G>, q: &Presentation<G>, sigma: &FieldMatrix, exponent: Exponent) -> Result<SigmaMatch> {
    let not_compatible = |m: String| Err(Error::NotSigmaCompatible(m));
    if p.modulus != q.modulus || sigma.modulus() != p.modulus {
        return Err(Error::ModulusMismatch(p.modulus.get(), q.modulus.get()));
    }
    let (np, nq) = (p.generators.len(), q.generators.len());
    if sigma.rows() != nq || sigma.cols() != np {
        return Err(Error::DimensionMismatch(format!("sigma is {}x{}, expected {nq}x{np}", sigma.rows(), sigma.cols())));
    }
    if np != nq || p.relations.len() != q.relations.len() {
        return not_compatible("generator or relation counts differ".into());
    }
    let mut generators = Vec::with_capacity(np);
    let mut hit = vec![false; nq];
    for j in 0..np {
        let col = sigma.column(j);
        let support: Vec<usize> = (0..nq).filter(|&i| col[i] != 0).collect();
        match support.as_slice() {
            [i] if col[*i] == 1 && !hit[*i] => {
                hit[*i] = true;
                generators.push(*i);
            }
            _ => return not_compatible(format!("sigma does not send generator {} to a generator", p.generators[j].id)),
        }
    }

    let mut groups: BTreeMap<FieldVector, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
    for (i, r) in p.relations.iter().enumerate() {
        groups.entry(sigma.mat_vec(&r.coeffs)?).or_default().0.push(i);
    }
    for (j, r) in q.relations.iter().enumerate() {
        groups.entry(r.coeffs.clone()).or_default().1.push(j);
    }
    let mut relations = vec![usize::MAX; p.relations.len()];
    for (vector, (ps, qs)) in &groups {
        if ps.len() != qs.len() {
            return not_compatible(format!("relation vector {vector:?} occurs {} times in sigma(R) and {} times in R'", ps.len(), qs.len()));
        }
        let weights: Vec<Vec<Option<Weight>>> = ps
            .iter()
            .map(|&i| qs.iter().map(|&j| Some(grade_weight(&p.relations[i].grade, &q.relations[j].grade, exponent))).collect())
            .collect();
        let assignment = solve_weighted(&weights, exponent).expect("complete bipartite graph has a perfect matching");
        for (a, &b) in assignment.iter().enumerate() {
            relations[ps[a]] = qs[b];
        }
    }
    Ok(SigmaMatch { generators, relations })
}

/// `d^p(P, Q, sigma)`: the p-norm of all grade displacements under `sigma`.
pub fn dp_cost2<G: Grade>(p: &Presentation<G>, q: &Presentation<G>, sigma: &FieldMatrix, exponent: Exponent) -> Result<Cost> {
    let m = sigma_match(p, q, sigma, exponent)?;
    let gens = p.generators.iter().zip(&m.generators).map(|(g, &j)| grade_weight(&g.grade, &q.generators[j].grade, exponent));
    let rels = p.relations.iter().zip(&m.relations).map(|(r, &j)| grade_weight(&r.grade, &q.relations[j].grade, exponent));
    let total = gens.chain(rels).fold(Weight::zero(exponent), |acc, w| acc.combine(&w, exponent));
    Ok(Cost::from_weight(exponent, total))
}

/// `target` presented in a new basis: column `j` of `iota` is the image in
/// `F^{G_source}` of the `j`-th generator of `target`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Regeneration<G: Grade> {
    pub source: Presentation<G>,
    pub target: Presentation<G>,
    pub iota: FieldMatrix,
}

impl<G: Grade> Regeneration<G> {
    /// Grid points where generator or relation spans disagree.
    pub fn mismatches(&self) -> Result<Vec<G>> {
        let (s, t) = (&self.source, &self.target);
        let n = s.generators.len();
        if t.generators.len() != n || self.iota.rows() != n || self.iota.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "iota is {}x{} between {n} and {} generators",
                self.iota.rows(),
                self.iota.cols(),
                t.generators.len()
            )));
        }
        if s.modulus != t.modulus || self.iota.modulus() != s.modulus {
            return Err(Error::ModulusMismatch(s.modulus.get(), t.modulus.get()));
        }
        let columns: Vec<FieldVector> = (0..n).map(|j| self.iota.column(j)).collect();
        let images: Vec<FieldVector> = t.relations.iter().map(|r| self.iota.mat_vec(&r.coeffs)).collect::<Result<_>>()?;
        let mut bad = Vec::new();
        for pt in s.critical_grid(t)? {
            let g_target: Vec<FieldVector> =
                (0..n).filter(|&j| t.generators[j].grade.leq(&pt)).map(|j| columns[j].clone()).collect();
            let r_target: Vec<FieldVector> =
                t.relations.iter().zip(&images).filter(|(r, _)| r.grade.leq(&pt)).map(|(_, v)| v.clone()).collect();
            let same = same_span(s.modulus, n, &s.generator_vectors_at(&pt), &g_target)?
                && same_span(s.modulus, n, &s.relation_vectors_at(&pt), &r_target)?;
            if !same {
                bad.push(pt);
            }
        }
        Ok(bad)
    }
}

/// Whether `r.target` is a regeneration of `r.source` through `r.iota`.
pub fn check_regeneration<G: Grade>(r: &Regeneration<G>) -> Result<bool> {
    if r.iota.rows() == r.iota.cols() && r.iota.invert().is_err() {
        return Ok(false);
    }
    Ok(r.mismatches()?.is_empty())
}

#[derive(Serialize, Deserialize)]
struct GeneratorJson {
    id: u32,
    grade: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct RelationJson {
    id: u32,
    coeffs: BTreeMap<String, i64>,
    grade: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct PresentationJson {
    q: u32,
    generators: Vec<GeneratorJson>,
    relations: Vec<RelationJson>,
}

fn grade_to_json<G: Grade>(g: &G) -> Vec<String> {
    g.coords().iter().map(rational::format).collect()
}

fn grade_from_json<G: Grade>(g: &[String]) -> Result<G> {
    G::from_coords(g.iter().map(|c| rational::parse(c)).collect::<Result<_>>()?)
}

impl<G: Grade> TryFrom<PresentationJson> for Presentation<G> {
    type Error = Error;

    fn try_from(raw: PresentationJson) -> Result<Self> {
        let modulus = Modulus::new(raw.q)?;
        let generators: Vec<ModuleGenerator<G>> = raw
            .generators
            .iter()
            .map(|g| Ok(ModuleGenerator { id: g.id, grade: grade_from_json(&g.grade)? }))
            .collect::<Result<_>>()?;
        let positions: HashMap<u32, usize> = generators.iter().enumerate().map(|(i, g)| (g.id, i)).collect();
        let mut relations = Vec::with_capacity(raw.relations.len());
        for r in &raw.relations {
            let mut coeffs = vec![0; generators.len()];
            for (key, &c) in &r.coeffs {
                let id: u32 = key.parse().map_err(|_| Error::Parse(format!("bad generator id {key:?}")))?;
                let i = *positions.get(&id).ok_or(Error::UnknownId(id))?;
                coeffs[i] = modulus.add(coeffs[i], modulus.reduce(c));
            }
            relations.push(ModuleRelation { id: r.id, coeffs, grade: grade_from_json(&r.grade)? });
        }
        Presentation::new(modulus, generators, relations)
    }
}

impl<G: Grade> From<&Presentation<G>> for PresentationJson {
    fn from(p: &Presentation<G>) -> Self {
        PresentationJson {
            q: p.modulus.get(),
            generators: p.generators.iter().map(|g| GeneratorJson { id: g.id, grade: grade_to_json(&g.grade) }).collect(),
            relations: p
                .relations
                .iter()
                .map(|r| RelationJson {
                    id: r.id,
                    coeffs: r
                        .coeffs
                        .iter()
                        .enumerate()
                        .filter(|(_, &c)| c != 0)
                        .map(|(i, &c)| (p.generators[i].id.to_string(), i64::from(c)))
                        .collect(),
                    grade: grade_to_json(&r.grade),
                })
                .collect(),
        }
    }
}

impl<G: Grade> Serialize for Presentation<G> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PresentationJson::from(self).serialize(s)
    }
}

impl<'de, G: Grade> Deserialize<'de> for Presentation<G> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Presentation::try_from(PresentationJson::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}
