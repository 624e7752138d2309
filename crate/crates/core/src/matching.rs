//! Partial matchings between barcodes and the p-Wasserstein distance.
//!
//! An interval `[a, b)` is the point `(a, b)`; an unmatched interval pays the
//! distance to its diagonal projection `((a+b)/2, (a+b)/2)`. Infinite intervals
//! can only be matched to each other, at cost `|a - a'|`; anything else makes
//! the cost infinite.

use serde::{Deserialize, Serialize};

use crate::assignment::solve_weighted as solve;
use crate::barcode::{Barcode, Death, Interval};
use crate::cost::{Cost, Exponent, Weight};
use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Matching {
    pub pairs: Vec<(usize, usize)>,
    pub unmatched_x: Vec<usize>,
    pub unmatched_y: Vec<usize>,
}

impl Matching {
    fn validate(&self, nx: usize, ny: usize) -> Result<()> {
        let mut seen_x = vec![false; nx];
        let mut seen_y = vec![false; ny];
        let xs = self.pairs.iter().map(|p| p.0).chain(self.unmatched_x.iter().copied());
        let ys = self.pairs.iter().map(|p| p.1).chain(self.unmatched_y.iter().copied());
        for (seen, indices, side) in [(&mut seen_x, xs.collect::<Vec<_>>(), "X"), (&mut seen_y, ys.collect(), "Y")] {
            for i in indices {
                let slot = seen
                    .get_mut(i)
                    .ok_or_else(|| Error::InvalidMatching(format!("index {i} out of range for {side}")))?;
                if *slot {
                    return Err(Error::InvalidMatching(format!("index {i} of {side} used twice")));
                }
                *slot = true;
            }
            if let Some(i) = seen.iter().position(|s| !s) {
                return Err(Error::InvalidMatching(format!("index {i} of {side} not covered")));
            }
        }
        Ok(())
    }
}

/// Weight of matching `x` to `y`, or `None` if that costs infinity.
fn pair_weight(x: &Interval, y: &Interval, p: Exponent) -> Option<Weight> {
    let birth = Weight::of_difference(&(&x.birth - &y.birth), p);
    match (&x.death, &y.death) {
        (Death::Infinite, Death::Infinite) => Some(birth),
        (Death::Finite(a), Death::Finite(b)) => Some(birth.combine(&Weight::of_difference(&(a - b), p), p)),
        _ => None,
    }
}

/// Weight of leaving `x` unmatched, or `None` for an infinite interval.
fn diagonal_weight(x: &Interval, p: Exponent) -> Option<Weight> {
    let d = x.death.finite()?;
    let half = (d - &x.birth) / Rational::from_integer(2.into());
    let w = Weight::of_difference(&half, p);
    Some(w.combine(&w, p))
}

pub fn p_cost(x: &Barcode, y: &Barcode, matching: &Matching, p: Exponent) -> Result<Cost> {
    matching.validate(x.len(), y.len())?;
    let mut acc = Weight::zero(p);
    let terms = matching
        .pairs
        .iter()
        .map(|&(i, j)| pair_weight(&x.intervals[i], &y.intervals[j], p))
        .chain(matching.unmatched_x.iter().map(|&i| diagonal_weight(&x.intervals[i], p)))
        .chain(matching.unmatched_y.iter().map(|&j| diagonal_weight(&y.intervals[j], p)));
    for term in terms {
        match term {
            Some(w) => acc = acc.combine(&w, p),
            None => return Ok(Cost::Infinite),
        }
    }
    Ok(Cost::from_weight(p, acc))
}

/// Optimal p-Wasserstein cost and a matching realizing it.
pub fn wasserstein(x: &Barcode, y: &Barcode, p: Exponent) -> (Cost, Matching) {
    let (xf, xi): (Vec<usize>, Vec<usize>) = (0..x.len()).partition(|&i| !x.intervals[i].is_infinite());
    let (yf, yi): (Vec<usize>, Vec<usize>) = (0..y.len()).partition(|&j| !y.intervals[j].is_infinite());
    let mut matching = Matching::default();

    // Finite part: rows are X then diagonal copies of Y; columns are Y then
    // diagonal copies of X.
    let (a, b) = (xf.len(), yf.len());
    let mut w: Vec<Vec<Option<Weight>>> = vec![vec![None; a + b]; a + b];
    for (r, &i) in xf.iter().enumerate() {
        for (c, &j) in yf.iter().enumerate() {
            w[r][c] = pair_weight(&x.intervals[i], &y.intervals[j], p);
        }
        w[r][b + r] = diagonal_weight(&x.intervals[i], p);
    }
    for (c, &j) in yf.iter().enumerate() {
        w[a + c][c] = diagonal_weight(&y.intervals[j], p);
        for r in 0..a {
            w[a + c][b + r] = Some(Weight::zero(p));
        }
    }
    let assignment = solve(&w, p).expect("diagonal augmentation always admits a perfect matching");
    for (r, &c) in assignment.iter().enumerate() {
        match (r < a, c < b) {
            (true, true) => matching.pairs.push((xf[r], yf[c])),
            (true, false) => matching.unmatched_x.push(xf[r]),
            (false, true) => matching.unmatched_y.push(yf[c]),
            (false, false) => {}
        }
    }

    // Infinite part: only matched among themselves.
    if xi.len() == yi.len() {
        let w: Vec<Vec<Option<Weight>>> = xi
            .iter()
            .map(|&i| yi.iter().map(|&j| pair_weight(&x.intervals[i], &y.intervals[j], p)).collect())
            .collect();
        let assignment = solve(&w, p).expect("infinite intervals of equal count can always be matched");
        matching.pairs.extend(assignment.iter().enumerate().map(|(r, &c)| (xi[r], yi[c])));
    } else {
        let mut xs = xi.clone();
        let mut ys = yi.clone();
        xs.sort_by(|&i, &j| x.intervals[i].birth.cmp(&x.intervals[j].birth));
        ys.sort_by(|&i, &j| y.intervals[i].birth.cmp(&y.intervals[j].birth));
        let k = xs.len().min(ys.len());
        matching.pairs.extend(xs.iter().zip(&ys).map(|(&i, &j)| (i, j)));
        matching.unmatched_x.extend(&xs[k..]);
        matching.unmatched_y.extend(&ys[k..]);
    }

    matching.pairs.sort_unstable();
    matching.unmatched_x.sort_unstable();
    matching.unmatched_y.sort_unstable();
    let cost = p_cost(x, y, &matching, p).expect("constructed matching is valid");
    (cost, matching)
}

/// Convenience: `wasserstein(x, y, p).0` as the exact p-th power, when finite and exact.
pub fn wasserstein_pow_p(x: &Barcode, y: &Barcode, p: Exponent) -> Option<Rational> {
    wasserstein(x, y, p).0.exact_pow_p().cloned()
}
