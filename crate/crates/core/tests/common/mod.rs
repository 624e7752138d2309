//! Independent reference implementations and random instance generators
//! shared by the integration tests. Nothing here calls into the algorithms
//! it is used to check.
#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::BTreeSet;

use num_traits::{Signed, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

use presdist::barcode::{Barcode, Interval};
use presdist::gadgets::BalPartInstance;
use presdist::merge_tree::{Generator, MergeTreePresentation, Relation};
use presdist::ordered::{OrderedGenerator, OrderedPresentation, OrderedRelation};
use presdist::rational::{frac, int, Rational};
use presdist::{Exponent, Modulus};

// ---------------------------------------------------------------- barcodes

/// Components at `s` by repeated relabelling: `label[g]` is the smallest
/// generator index reachable through relations of grade `<= s`.
fn labels_at(p: &MergeTreePresentation, s: &Rational) -> Vec<Option<usize>> {
    let gens = p.generators();
    let pos = |id: u32| gens.iter().position(|g| g.id == id).unwrap();
    let mut label: Vec<Option<usize>> = gens.iter().enumerate().map(|(i, g)| (&g.grade <= s).then_some(i)).collect();
    loop {
        let mut changed = false;
        for r in p.relations().iter().filter(|r| &r.grade <= s) {
            let (a, b) = (pos(r.ends[0]), pos(r.ends[1]));
            let (la, lb) = (label[a].unwrap(), label[b].unwrap());
            if la != lb {
                let (keep, drop) = (la.min(lb), la.max(lb));
                for l in label.iter_mut().flatten() {
                    if *l == drop {
                        *l = keep;
                    }
                }
                changed = true;
            }
        }
        if !changed {
            return label;
        }
    }
}

/// Rank function: classes at `b` that contain a generator born by `a`.
fn rank(p: &MergeTreePresentation, a: &Rational, b: &Rational) -> i64 {
    let label = labels_at(p, b);
    let classes: BTreeSet<usize> =
        p.generators().iter().zip(&label).filter(|(g, _)| &g.grade <= a).map(|(_, l)| l.unwrap()).collect();
    classes.len() as i64
}

/// Degree-0 barcode by inclusion-exclusion on the rank function over the
/// critical grades.
pub fn barcode_by_class_counts(p: &MergeTreePresentation) -> Barcode {
    let crit: Vec<Rational> = p
        .generators()
        .iter()
        .map(|g| g.grade.clone())
        .chain(p.relations().iter().map(|r| r.grade.clone()))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let r = |i: Option<usize>, j: usize| i.map_or(0, |i| rank(p, &crit[i], &crit[j]));
    let last = crit.len() - 1;
    let mut out = Vec::new();
    for i in 0..crit.len() {
        let prev = i.checked_sub(1);
        for j in i + 1..crit.len() {
            let mult = r(Some(i), j - 1) - r(prev, j - 1) - r(Some(i), j) + r(prev, j);
            assert!(mult >= 0, "negative multiplicity");
            out.extend(std::iter::repeat_n(Interval::finite(crit[i].clone(), crit[j].clone()), mult as usize));
        }
        let mult = r(Some(i), last) - r(prev, last);
        out.extend(std::iter::repeat_n(Interval::infinite(crit[i].clone()), mult as usize));
    }
    Barcode::new(out)
}

// ---------------------------------------------------------------- matchings

fn pow(x: &Rational, p: Exponent) -> Rational {
    match p {
        Exponent::Integer(k) => (0..k).fold(int(1), |acc, _| acc * x),
        Exponent::Infinity => x.clone(),
        Exponent::Real(_) => unreachable!("exact exponents only"),
    }
}

fn add(acc: Rational, term: Rational, p: Exponent) -> Rational {
    match p {
        Exponent::Infinity => acc.max(term),
        _ => acc + term,
    }
}

fn pair_term(x: &Interval, y: &Interval, p: Exponent) -> Option<Rational> {
    let db = pow(&(&x.birth - &y.birth).abs(), p);
    match (x.death.finite(), y.death.finite()) {
        (None, None) => Some(db),
        (Some(a), Some(b)) => Some(add(db, pow(&(a - b).abs(), p), p)),
        _ => None,
    }
}

fn diagonal_term(x: &Interval, p: Exponent) -> Option<Rational> {
    let half = (x.death.finite()? - &x.birth) / int(2);
    let t = pow(&half, p);
    Some(add(t.clone(), t, p))
}

/// Minimum p-th power cost over every partial matching, or `None` when every
/// matching costs infinity.
pub fn exhaustive_wasserstein(x: &Barcode, y: &Barcode, p: Exponent) -> Option<Rational> {
    fn go(
        i: usize,
        x: &[Interval],
        y: &[Interval],
        used: &mut Vec<bool>,
        acc: Rational,
        p: Exponent,
        best: &mut Option<Rational>,
    ) {
        if i == x.len() {
            let mut total = acc;
            for (j, iv) in y.iter().enumerate() {
                if !used[j] {
                    match diagonal_term(iv, p) {
                        Some(t) => total = add(total, t, p),
                        None => return,
                    }
                }
            }
            if best.as_ref().is_none_or(|b| &total < b) {
                *best = Some(total);
            }
            return;
        }
        if let Some(t) = diagonal_term(&x[i], p) {
            go(i + 1, x, y, used, add(acc.clone(), t, p), p, best);
        }
        for j in 0..y.len() {
            if used[j] {
                continue;
            }
            if let Some(t) = pair_term(&x[i], &y[j], p) {
                used[j] = true;
                go(i + 1, x, y, used, add(acc.clone(), t, p), p, best);
                used[j] = false;
            }
        }
    }
    let mut best = None;
    go(0, &x.intervals, &y.intervals, &mut vec![false; y.len()], Rational::zero(), p, &mut best);
    best
}

// ---------------------------------------------------------------- partitions

/// Whether the sizes split into `k` bins of equal sum, by dynamic
/// programming over the sums of the first `k - 1` bins.
pub fn balpart_feasible(sizes: &[u64], k: usize) -> bool {
    let n: u64 = sizes.iter().sum();
    if k == 0 || !n.is_multiple_of(k as u64) {
        return false;
    }
    let t = n / k as u64;
    let mut states: BTreeSet<Vec<u64>> = BTreeSet::from([vec![0; k - 1]]);
    let mut placed = 0;
    for &s in sizes {
        placed += s;
        let mut next = BTreeSet::new();
        for st in &states {
            let rest = placed - s - st.iter().sum::<u64>();
            if rest + s <= t {
                next.insert(st.clone());
            }
            for b in 0..k - 1 {
                if st[b] + s <= t {
                    let mut v = st.clone();
                    v[b] += s;
                    next.insert(v);
                }
            }
        }
        states = next;
    }
    states.contains(&vec![t; k - 1])
}

/// A yes-instance with `k` bins of sum `bin`, each bin cut into at most
/// `max_parts` pieces, shuffled.
pub fn solvable_balpart(rng: &mut impl Rng, k: usize, bin: u64, max_parts: usize) -> BalPartInstance {
    let mut sizes = Vec::new();
    for _ in 0..k {
        let parts = rng.gen_range(1..=max_parts.min(bin as usize));
        let mut cuts: Vec<u64> = (1..bin).collect::<Vec<_>>();
        cuts.shuffle(rng);
        let mut cuts: Vec<u64> = cuts.into_iter().take(parts - 1).collect();
        cuts.sort_unstable();
        let mut last = 0;
        for c in cuts.into_iter().chain([bin]) {
            sizes.push(c - last);
            last = c;
        }
    }
    sizes.shuffle(rng);
    BalPartInstance::new(sizes, k).unwrap()
}

/// `n` cut into `m` positive sizes uniformly among compositions.
pub fn random_balpart(rng: &mut impl Rng, k: usize, n: u64, m: usize) -> BalPartInstance {
    let mut cuts: Vec<u64> = (1..n).collect();
    cuts.shuffle(rng);
    let mut cuts: Vec<u64> = cuts.into_iter().take(m - 1).collect();
    cuts.sort_unstable();
    let mut sizes = Vec::new();
    let mut last = 0;
    for c in cuts.into_iter().chain([n]) {
        sizes.push(c - last);
        last = c;
    }
    BalPartInstance::new(sizes, k).unwrap()
}

// ---------------------------------------------------------------- matrices

/// Gauss-Jordan inverse over GF(q) on plain vectors.
pub fn inverse_mod(a: &[Vec<u32>], q: u32) -> Option<Vec<Vec<u32>>> {
    let n = a.len();
    let q64 = q as u64;
    let inv = |x: u64| (1..q64).find(|y| x * y % q64 == 1).unwrap();
    let mut m: Vec<Vec<u64>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| row.iter().map(|&v| v as u64).chain((0..n).map(|j| (i == j) as u64)).collect())
        .collect();
    for c in 0..n {
        let piv = (c..n).find(|&r| m[r][c] != 0)?;
        m.swap(c, piv);
        let f = inv(m[c][c]);
        for v in &mut m[c] {
            *v = *v * f % q64;
        }
        for r in 0..n {
            if r != c && m[r][c] != 0 {
                let f = m[r][c];
                for j in 0..2 * n {
                    m[r][j] = (m[r][j] + q64 * q64 - f * m[c][j]) % q64;
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[n..].iter().map(|&v| v as u32).collect()).collect())
}

pub fn product_mod(a: &[Vec<u32>], b: &[Vec<u32>], q: u32) -> Vec<Vec<u32>> {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| ((0..n).map(|k| a[i][k] as u64 * b[k][j] as u64).sum::<u64>() % q as u64) as u32).collect())
        .collect()
}

/// Every `n x n` matrix over GF(q) that vanishes outside `support`.
pub fn matrices_on(support: &[Vec<bool>], q: u32) -> Vec<Vec<Vec<u32>>> {
    let n = support.len();
    let cells: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|&(i, j)| support[i][j]).collect();
    let total = (q as u64).pow(cells.len() as u32);
    (0..total)
        .map(|mut code| {
            let mut m = vec![vec![0; n]; n];
            for &(i, j) in &cells {
                m[i][j] = (code % q as u64) as u32;
                code /= q as u64;
            }
            m
        })
        .collect()
}

/// Whether some `A` on `P` has an inverse on `Q`, by enumeration.
pub fn ci_feasible(p: &[Vec<bool>], q: &[Vec<bool>], field: u32) -> bool {
    matrices_on(p, field).iter().any(|a| {
        inverse_mod(a, field)
            .is_some_and(|b| b.iter().enumerate().all(|(i, row)| row.iter().enumerate().all(|(j, &v)| v == 0 || q[i][j])))
    })
}

// ---------------------------------------------------------------- presentations

/// Grades in `0..=span` with occasional halves.
fn grade(rng: &mut impl Rng, lo: &Rational, span: i64) -> Rational {
    let g = int(rng.gen_range(0..=span));
    let g = if rng.gen_bool(0.2) { g + frac(1, 2) } else { g };
    if &g < lo {
        lo.clone()
    } else {
        g
    }
}

pub fn random_merge_tree(rng: &mut impl Rng, max_generators: usize) -> MergeTreePresentation {
    let ng = rng.gen_range(1..=max_generators);
    let gens: Vec<Generator> = (0..ng as u32).map(|id| Generator { id, grade: grade(rng, &int(0), 5) }).collect();
    let nr = if ng < 2 { 0 } else { rng.gen_range(0..=ng + 2) };
    let rels = (0..nr as u32)
        .map(|id| {
            let a = rng.gen_range(0..ng);
            let b = (a + rng.gen_range(1..ng)) % ng;
            let lo = gens[a].grade.clone().max(gens[b].grade.clone());
            Relation { id, ends: [a as u32, b as u32], grade: grade(rng, &lo, 7) }
        })
        .collect();
    MergeTreePresentation::new(gens, rels).unwrap()
}

pub fn random_ordered(rng: &mut impl Rng, max_generators: usize, modulus: Modulus) -> OrderedPresentation {
    let ng = rng.gen_range(1..=max_generators);
    let gens: Vec<OrderedGenerator> = (0..ng as u32).map(|id| OrderedGenerator { id, grade: grade(rng, &int(0), 4) }).collect();
    let nr = rng.gen_range(0..=ng + 1);
    let q = modulus.get();
    let rels = (0..nr as u32)
        .map(|id| {
            let coeffs: Vec<u32> = (0..ng).map(|_| if rng.gen_bool(0.5) { rng.gen_range(1..q) } else { 0 }).collect();
            let lo = gens.iter().zip(&coeffs).filter(|(_, &c)| c != 0).map(|(g, _)| g.grade.clone()).max().unwrap_or(int(0));
            OrderedRelation { id, coeffs, grade: grade(rng, &lo, 6) }
        })
        .collect();
    OrderedPresentation::with_default_order(modulus, gens, rels).unwrap()
}

/// New grades that are non-decreasing along the presentation order, ties
/// allowed to split or merge.
pub fn perturb_along_order(rng: &mut impl Rng, p: &OrderedPresentation) -> OrderedPresentation {
    use presdist::ordered::Cell;
    let mut gens = vec![int(0); p.generators().len()];
    let mut rels = vec![int(0); p.relations().len()];
    let mut current = int(rng.gen_range(-3..=3));
    for cell in p.order() {
        current += frac(rng.gen_range(0..=3), 2);
        match *cell {
            Cell::Generator(i) => gens[i] = current.clone(),
            Cell::Relation(i) => rels[i] = current.clone(),
        }
    }
    p.regraded(gens, rels).unwrap()
}

pub fn random_barcode(rng: &mut impl Rng, max_len: usize) -> Barcode {
    let len = rng.gen_range(0..=max_len);
    let intervals = (0..len)
        .map(|_| {
            let b = grade(rng, &int(-3), 3) - int(3);
            if rng.gen_bool(0.15) {
                Interval::infinite(b)
            } else {
                let d = &b + grade(rng, &int(0), 4);
                Interval::finite(b, d)
            }
        })
        .collect();
    Barcode::new(intervals)
}

/// A merge tree: a random spanning tree plus a few extra relations.
pub fn random_connected_merge_tree(rng: &mut impl Rng, max_generators: usize) -> MergeTreePresentation {
    let ng = rng.gen_range(1..=max_generators);
    let gens: Vec<Generator> = (0..ng as u32).map(|id| Generator { id, grade: grade(rng, &int(0), 5) }).collect();
    let mut ends: Vec<(usize, usize)> = (1..ng).map(|b| (rng.gen_range(0..b), b)).collect();
    if ng > 1 {
        for _ in 0..rng.gen_range(0..=2) {
            let a = rng.gen_range(0..ng);
            ends.push((a, (a + rng.gen_range(1..ng)) % ng));
        }
    }
    let rels = ends
        .into_iter()
        .enumerate()
        .map(|(id, (a, b))| {
            let lo = gens[a].grade.clone().max(gens[b].grade.clone());
            Relation { id: id as u32, ends: [a as u32, b as u32], grade: grade(rng, &lo, 7) }
        })
        .collect();
    MergeTreePresentation::new(gens, rels).unwrap()
}

/// The same generators and relation endpoints as `p` with fresh valid grades.
pub fn regrade_merge_tree(rng: &mut impl Rng, p: &MergeTreePresentation) -> MergeTreePresentation {
    let gens: Vec<Generator> = p.generators().iter().map(|g| Generator { id: g.id, grade: grade(rng, &int(0), 5) }).collect();
    let grade_of = |id: u32| gens.iter().find(|g| g.id == id).unwrap().grade.clone();
    let rels = p
        .relations()
        .iter()
        .map(|r| {
            let lo = grade_of(r.ends[0]).max(grade_of(r.ends[1]));
            Relation { id: r.id, ends: r.ends, grade: grade(rng, &lo, 7) }
        })
        .collect();
    MergeTreePresentation::new(gens, rels).unwrap()
}

pub fn random_two_param(rng: &mut impl Rng, max_generators: usize, modulus: Modulus) -> presdist::TwoParamPresentation {
    use presdist::two_param::{ModuleGenerator, ModuleRelation};
    use presdist::Grade2;
    let ng = rng.gen_range(1..=max_generators);
    let gens: Vec<ModuleGenerator<Grade2>> =
        (0..ng as u32).map(|id| ModuleGenerator { id, grade: Grade2::ints(rng.gen_range(0..4), rng.gen_range(0..4)) }).collect();
    let q = modulus.get();
    let rels = (0..rng.gen_range(0..=ng + 1) as u32)
        .map(|id| {
            let coeffs: Vec<u32> = (0..ng).map(|_| if rng.gen_bool(0.5) { rng.gen_range(1..q) } else { 0 }).collect();
            let (mut x, mut y) = (int(0), int(0));
            for (g, _) in gens.iter().zip(&coeffs).filter(|(_, &c)| c != 0) {
                x = x.max(g.grade.x().clone());
                y = y.max(g.grade.y().clone());
            }
            let grade = Grade2::new(x + int(rng.gen_range(0..3)), y + int(rng.gen_range(0..3)));
            ModuleRelation { id, coeffs, grade }
        })
        .collect();
    presdist::TwoParamPresentation::new(modulus, gens, rels).unwrap()
}

/// Rank of a list of vectors over GF(q) by row reduction.
pub fn rank_mod(vectors: &[Vec<u32>], q: u32) -> usize {
    let q64 = q as u64;
    let inv = |x: u64| (1..q64).find(|y| x * y % q64 == 1).unwrap();
    let mut rows: Vec<Vec<u64>> = vectors.iter().map(|v| v.iter().map(|&c| c as u64 % q64).collect()).collect();
    let width = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..width {
        let Some(piv) = (rank..rows.len()).find(|&r| rows[r][c] != 0) else { continue };
        rows.swap(rank, piv);
        let f = inv(rows[rank][c]);
        for v in &mut rows[rank] {
            *v = *v * f % q64;
        }
        for r in 0..rows.len() {
            if r != rank && rows[r][c] != 0 {
                let f = rows[r][c];
                for j in 0..width {
                    rows[r][j] = (rows[r][j] + q64 * q64 - f * rows[rank][j]) % q64;
                }
            }
        }
        rank += 1;
    }
    rank
}
