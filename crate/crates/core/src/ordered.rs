//! One-parameter presentations with a fixed total order on `G ∪ R`, and the
//! standard column-reduction barcode.

use serde::{Deserialize, Serialize};

use crate::barcode::{Barcode, Death, Interval};
use crate::error::{Error, Result};
use crate::field::{FieldVector, Modulus};
use crate::rational::{self, Rational};
use crate::two_param::TwoParamPresentation;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderedGenerator {
    pub id: u32,
    #[serde(with = "rational::serde_str")]
    pub grade: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderedRelation {
    pub id: u32,
    pub coeffs: FieldVector,
    #[serde(with = "rational::serde_str")]
    pub grade: Rational,
}

/// Position of an element in the generator or relation list.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Cell {
    Generator(usize),
    Relation(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderedPresentation {
    modulus: Modulus,
    generators: Vec<OrderedGenerator>,
    relations: Vec<OrderedRelation>,
    order: Vec<Cell>,
}

impl OrderedPresentation {
    /// Validates `order`: a permutation of all cells along which grades never
    /// decrease, with every relation graded at or after its support.
    pub fn new(
        modulus: Modulus,
        generators: Vec<OrderedGenerator>,
        relations: Vec<OrderedRelation>,
        order: Vec<Cell>,
    ) -> Result<Self> {
        let invalid = |m: String| Err(Error::InvalidPresentation(m));
        let (ng, nr) = (generators.len(), relations.len());
        let mut seen_g = vec![false; ng];
        let mut seen_r = vec![false; nr];
        for c in &order {
            let slot = match *c {
                Cell::Generator(i) if i < ng => &mut seen_g[i],
                Cell::Relation(i) if i < nr => &mut seen_r[i],
                _ => return invalid(format!("order refers to missing cell {c:?}")),
            };
            if std::mem::replace(slot, true) {
                return invalid(format!("order repeats cell {c:?}"));
            }
        }
        if order.len() != ng + nr {
            return invalid("order does not cover every generator and relation".into());
        }
        let grade = |c: &Cell| match *c {
            Cell::Generator(i) => &generators[i].grade,
            Cell::Relation(i) => &relations[i].grade,
        };
        if order.windows(2).any(|w| grade(&w[0]) > grade(&w[1])) {
            return invalid("order is not compatible with grades".into());
        }
        for r in &relations {
            if r.coeffs.len() != ng {
                return invalid(format!("relation {} has {} coefficients for {ng} generators", r.id, r.coeffs.len()));
            }
            if r.coeffs.iter().zip(&generators).any(|(&c, g)| c != 0 && g.grade > r.grade) {
                return invalid(format!("relation {} involves a later generator", r.id));
            }
        }
        Ok(OrderedPresentation { modulus, generators, relations, order })
    }

    /// Orders by grade, generators before relations, then by id.
    pub fn with_default_order(modulus: Modulus, generators: Vec<OrderedGenerator>, relations: Vec<OrderedRelation>) -> Result<Self> {
        let key = |c: &Cell| match *c {
            Cell::Generator(i) => (&generators[i].grade, 0, generators[i].id),
            Cell::Relation(i) => (&relations[i].grade, 1, relations[i].id),
        };
        let mut order: Vec<Cell> =
            (0..generators.len()).map(Cell::Generator).chain((0..relations.len()).map(Cell::Relation)).collect();
        order.sort_by(|a, b| key(a).cmp(&key(b)));
        OrderedPresentation::new(modulus, generators, relations, order)
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn generators(&self) -> &[OrderedGenerator] {
        &self.generators
    }

    pub fn relations(&self) -> &[OrderedRelation] {
        &self.relations
    }

    pub fn order(&self) -> &[Cell] {
        &self.order
    }

    /// Same matrix and order with new grades.
    pub fn regraded(&self, generator_grades: Vec<Rational>, relation_grades: Vec<Rational>) -> Result<Self> {
        if generator_grades.len() != self.generators.len() || relation_grades.len() != self.relations.len() {
            return Err(Error::DimensionMismatch("grade count differs from presentation".into()));
        }
        let generators =
            self.generators.iter().zip(generator_grades).map(|(g, grade)| OrderedGenerator { id: g.id, grade }).collect();
        let relations = self
            .relations
            .iter()
            .zip(relation_grades)
            .map(|(r, grade)| OrderedRelation { id: r.id, coeffs: r.coeffs.clone(), grade })
            .collect();
        OrderedPresentation::new(self.modulus, generators, relations, self.order.clone())
    }

    /// `(generator position, relation position)` pairs from reducing the
    /// relation matrix with rows and columns in the presentation order.
    pub fn pairing(&self) -> Vec<(usize, usize)> {
        let q = self.modulus;
        let rows: Vec<usize> = self.order.iter().filter_map(|c| if let Cell::Generator(i) = *c { Some(i) } else { None }).collect();
        let mut row_of = vec![0; self.generators.len()];
        for (r, &g) in rows.iter().enumerate() {
            row_of[g] = r;
        }
        let mut owner: Vec<Option<usize>> = vec![None; rows.len()];
        let mut reduced: Vec<FieldVector> = Vec::new();
        let mut pairs = Vec::new();
        for cell in &self.order {
            let Cell::Relation(j) = *cell else { continue };
            let mut col = vec![0u32; rows.len()];
            for (g, &c) in self.relations[j].coeffs.iter().enumerate() {
                col[row_of[g]] = c;
            }
            let low = loop {
                let Some(low) = col.iter().rposition(|&c| c != 0) else { break None };
                match owner[low] {
                    None => break Some(low),
                    Some(k) => {
                        let factor = q.mul(col[low], q.inv(reduced[k][low]));
                        for (a, &b) in col.iter_mut().zip(&reduced[k]) {
                            *a = q.sub(*a, q.mul(factor, b));
                        }
                    }
                }
            };
            if let Some(low) = low {
                owner[low] = Some(reduced.len());
                pairs.push((rows[low], j));
            }
            reduced.push(col);
        }
        pairs.sort_unstable();
        pairs
    }

    /// One interval per generator; empty intervals are kept.
    pub fn barcode(&self) -> Barcode {
        let mut death = vec![Death::Infinite; self.generators.len()];
        for (g, r) in self.pairing() {
            death[g] = Death::Finite(self.relations[r].grade.clone());
        }
        let intervals = self
            .generators
            .iter()
            .zip(death)
            .map(|(g, d)| Interval::new(g.grade.clone(), d).expect("relations are graded after their support"))
            .collect();
        Barcode::new(intervals)
    }
}

/// Keeps only x-coordinates and orders by x, generators first, then id.
pub fn project_x(p: &TwoParamPresentation) -> OrderedPresentation {
    let generators = p.generators().iter().map(|g| OrderedGenerator { id: g.id, grade: g.grade.x().clone() }).collect();
    let relations = p
        .relations()
        .iter()
        .map(|r| OrderedRelation { id: r.id, coeffs: r.coeffs.clone(), grade: r.grade.x().clone() })
        .collect();
    OrderedPresentation::with_default_order(p.modulus(), generators, relations).expect("projection preserves validity")
}

pub fn barcode_1param(p: &OrderedPresentation) -> Barcode {
    p.barcode()
}
