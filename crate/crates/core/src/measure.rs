//! Probability measures on vertices (or multigraph edges), exact rationals.

use crate::bits::VertexSet;
use crate::{Error, Result};
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use std::str::FromStr;

/// Exact rational scalar used throughout. i128 components keep all the
/// arithmetic in this crate far away from overflow: denominators stay small
/// because measures are built over a common denominator and only ever combined
/// with the fixed constants of the pair lemmas.
pub type Rat = Ratio<i128>;

pub fn rat(num: i128, den: i128) -> Rat {
    Ratio::new(num, den)
}

/// Parse `"p/q"` or a plain integer.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (s, "1"),
    };
    let n =
        i128::from_str(num).map_err(|_| Error::Input(format!("bad rational numerator {num:?}")))?;
    let d =
        i128::from_str(den).map_err(|_| Error::Input(format!("bad rational denominator {den:?}")))?;
    if d == 0 {
        return Err(Error::Input("zero denominator".into()));
    }
    Ok(Ratio::new(n, d))
}

pub fn rat_string(r: &Rat) -> String {
    if r.denom() == &1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// A probability measure on the index range `0..len` (vertices of a graph, or
/// edge indices of a multigraph). Weights are nonnegative and sum to exactly 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Measure {
    weights: Vec<Rat>,
}

impl Measure {
    /// Uniform measure on `n` elements.
    pub fn uniform(n: usize) -> Self {
        assert!(n > 0, "uniform measure needs at least one element");
        Measure {
            weights: vec![rat(1, n as i128); n],
        }
    }

    /// Weights must be nonnegative and sum to exactly 1.
    pub fn from_weights(weights: Vec<Rat>) -> Result<Self> {
        if weights.iter().any(|w| w.is_negative()) {
            return Err(Error::Validation("negative weight in measure".into()));
        }
        let total: Rat = weights.iter().sum();
        if !total.is_one() {
            return Err(Error::Validation(format!(
                "measure total is {}, expected 1",
                rat_string(&total)
            )));
        }
        Ok(Measure { weights })
    }

    /// Normalize arbitrary nonnegative weights to a probability measure.
    pub fn normalized(weights: Vec<Rat>) -> Result<Self> {
        if weights.iter().any(|w| w.is_negative()) {
            return Err(Error::Validation("negative weight in measure".into()));
        }
        let total: Rat = weights.iter().sum();
        if total.is_zero() {
            return Err(Error::Validation("all weights zero".into()));
        }
        Ok(Measure {
            weights: weights.into_iter().map(|w| w / total).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weight(&self, i: usize) -> Rat {
        self.weights[i]
    }

    pub fn weights(&self) -> &[Rat] {
        &self.weights
    }

    /// Total mass of a set of indices.
    pub fn mass(&self, s: &VertexSet) -> Rat {
        s.iter().map(|v| self.weights[v]).sum()
    }

    pub fn mass_of_iter<I: IntoIterator<Item = usize>>(&self, it: I) -> Rat {
        it.into_iter().map(|v| self.weights[v]).sum()
    }

    pub fn max_weight(&self) -> Rat {
        self.weights.iter().cloned().max().unwrap_or_else(Rat::zero)
    }

    /// The measure conditioned on `s` (mass of `s` rescaled to 1); weights
    /// outside `s` become zero. Errors when `s` carries no mass.
    pub fn conditioned_on(&self, s: &VertexSet) -> Result<Measure> {
        let total = self.mass(s);
        if total.is_zero() {
            return Err(Error::Precondition("conditioning on a null set".into()));
        }
        let weights = (0..self.weights.len())
            .map(|v| {
                if s.contains(v) {
                    self.weights[v] / total
                } else {
                    Rat::zero()
                }
            })
            .collect();
        Ok(Measure { weights })
    }

    /// Integer view `(scaled weights, denominator)` with a common denominator,
    /// for exhaustive-search hot paths. Errors out only for measures whose
    /// denominators do not fit; callers then stay on the rational path.
    pub fn scaled_integers(&self) -> Option<(Vec<u128>, u128)> {
        let mut den: i128 = 1;
        for w in &self.weights {
            den = num_integer::lcm(den, *w.denom());
            if den > (1 << 80) {
                return None;
            }
        }
        let mut out = Vec::with_capacity(self.weights.len());
        for w in &self.weights {
            let scaled = w.numer().checked_mul(den / w.denom())?;
            out.push(u128::try_from(scaled).ok()?);
        }
        Some((out, den as u128))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_sums_to_one() {
        let m = Measure::uniform(7);
        let full = VertexSet::full(7);
        assert!(m.mass(&full).is_one());
    }

    #[test]
    fn rejects_bad_totals() {
        assert!(Measure::from_weights(vec![rat(1, 2), rat(1, 3)]).is_err());
        assert!(Measure::from_weights(vec![rat(-1, 2), rat(3, 2)]).is_err());
        assert!(Measure::from_weights(vec![rat(1, 2), rat(1, 2)]).is_ok());
    }

    #[test]
    fn parse_and_print() {
        assert_eq!(parse_rat("3/14").unwrap(), rat(3, 14));
        assert_eq!(parse_rat("2").unwrap(), rat(2, 1));
        assert_eq!(rat_string(&rat(6, 4)), "3/2");
        assert_eq!(rat_string(&rat(4, 2)), "2");
        assert!(parse_rat("1/0").is_err());
    }

    #[test]
    fn scaled_view_matches() {
        let m = Measure::from_weights(vec![rat(1, 6), rat(1, 2), rat(1, 3)]).unwrap();
        let (w, den) = m.scaled_integers().unwrap();
        assert_eq!(den, 6);
        assert_eq!(w, vec![1, 3, 2]);
    }
}
