//! Class vectors and the total orders over paths.
//!
//! A [`ClassVector`] accumulates, per edge class, either the number of edges
//! of that class along a path or their summed length. Two comparison rules
//! are provided:
//!
//! * [`Comparison::WorstClass`] looks only at the worst class present
//!   and the accumulated value at that class. Paths that agree on both are
//!   class-equal and the remaining tie is broken by length.
//! * [`Comparison::ReverseLex`] compares entries from the worst class down to
//!   class 1. It refines the worst-class rule and is invariant under adding a
//!   common suffix.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::graph::{ClassId, ColoredGraph, VertexId};

/// Absolute tolerance used when comparing the real-valued queue keys.
pub const COST_TOLERANCE: f64 = 1e-9;

type Entries = SmallVec<[f64; 4]>;

/// Per-class accumulation of a path's edges, or the maximal `Top` element
/// used for vertices that have not been reached yet.
#[derive(Clone, Debug, PartialEq)]
pub enum ClassVector {
    Finite(Entries),
    Top,
}

impl ClassVector {
    pub fn zeros(classes: usize) -> Self {
        ClassVector::Finite(SmallVec::from_elem(0.0, classes))
    }

    /// A vector with `amount` at `class` and zero elsewhere.
    pub fn unit(classes: usize, class: ClassId, amount: f64) -> Self {
        let mut v = SmallVec::from_elem(0.0, classes);
        v[class.index()] = amount;
        ClassVector::Finite(v)
    }

    pub fn from_entries(entries: &[f64]) -> Self {
        ClassVector::Finite(SmallVec::from_slice(entries))
    }

    pub fn top() -> Self {
        ClassVector::Top
    }

    pub fn is_top(&self) -> bool {
        matches!(self, ClassVector::Top)
    }

    /// Entries indexed by `class - 1`; `None` for `Top`.
    pub fn entries(&self) -> Option<&[f64]> {
        match self {
            ClassVector::Finite(v) => Some(v),
            ClassVector::Top => None,
        }
    }

    pub fn get(&self, class: ClassId) -> Option<f64> {
        self.entries().map(|e| e[class.index()])
    }

    pub fn len(&self) -> Option<usize> {
        self.entries().map(<[f64]>::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == Some(0)
    }

    pub fn is_zero(&self) -> bool {
        self.entries().is_some_and(|e| e.iter().all(|&x| x == 0.0))
    }

    /// Componentwise sum. `Top` absorbs.
    pub fn try_add(&self, other: &ClassVector) -> Result<ClassVector> {
        match (self, other) {
            (ClassVector::Finite(a), ClassVector::Finite(b)) => {
                if a.len() != b.len() {
                    return Err(Error::LengthMismatch {
                        left: a.len(),
                        right: b.len(),
                    });
                }
                Ok(ClassVector::Finite(
                    a.iter().zip(b.iter()).map(|(x, y)| x + y).collect(),
                ))
            }
            _ => Ok(ClassVector::Top),
        }
    }

    /// Componentwise sum for vectors known to share a length.
    pub(crate) fn plus(&self, other: &ClassVector) -> ClassVector {
        self.try_add(other).expect("class vectors of one search share a length")
    }

    pub(crate) fn add_at(&mut self, class: ClassId, amount: f64) {
        if let ClassVector::Finite(v) = self {
            v[class.index()] += amount;
        }
    }

    /// Highest class with a positive entry, or 0 for the zero vector.
    pub fn worst_class(&self) -> Result<usize> {
        match self {
            ClassVector::Finite(v) => Ok(worst_index(v)),
            ClassVector::Top => Err(Error::TopHasNoWorstClass),
        }
    }

    pub fn try_compare(&self, other: &ClassVector, cmp: Comparison) -> Result<Ordering> {
        match (self, other) {
            (ClassVector::Top, ClassVector::Top) => Ok(Ordering::Equal),
            (ClassVector::Top, _) => Ok(Ordering::Greater),
            (_, ClassVector::Top) => Ok(Ordering::Less),
            (ClassVector::Finite(a), ClassVector::Finite(b)) => {
                if a.len() != b.len() {
                    return Err(Error::LengthMismatch {
                        left: a.len(),
                        right: b.len(),
                    });
                }
                Ok(compare_entries(a, b, cmp))
            }
        }
    }

    /// Comparison for vectors known to share a length.
    pub fn compare(&self, other: &ClassVector, cmp: Comparison) -> Ordering {
        self.try_compare(other, cmp)
            .expect("class vectors of one search share a length")
    }
}

fn worst_index(v: &[f64]) -> usize {
    v.iter().rposition(|&x| x > 0.0).map_or(0, |i| i + 1)
}

fn compare_entries(a: &[f64], b: &[f64], cmp: Comparison) -> Ordering {
    match cmp {
        Comparison::WorstClass => {
            let (wa, wb) = (worst_index(a), worst_index(b));
            wa.cmp(&wb).then_with(|| {
                if wa == 0 {
                    Ordering::Equal
                } else {
                    a[wa - 1].total_cmp(&b[wa - 1])
                }
            })
        }
        Comparison::ReverseLex => a
            .iter()
            .rev()
            .zip(b.iter().rev())
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal),
    }
}

impl fmt::Display for ClassVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassVector::Top => f.write_str("TOP"),
            ClassVector::Finite(v) => {
                f.write_str("[")?;
                for (i, x) in v.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    if x.fract() == 0.0 && x.abs() < 1e15 {
                        write!(f, "{}", *x as i64)?;
                    } else {
                        write!(f, "{x:.3}")?;
                    }
                }
                f.write_str("]")
            }
        }
    }
}

pub fn cv_add(a: &ClassVector, b: &ClassVector) -> Result<ClassVector> {
    a.try_add(b)
}

pub fn worst_class(a: &ClassVector) -> Result<usize> {
    a.worst_class()
}

pub fn cv_compare(a: &ClassVector, b: &ClassVector, mode: OrderMode) -> Result<Ordering> {
    a.try_compare(b, mode.comparison)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    #[default]
    WorstClass,
    ReverseLex,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Accumulation {
    /// Number of edges of each class.
    #[default]
    Count,
    /// Summed length of the edges of each class.
    Length,
}

impl Accumulation {
    /// Contribution of one edge of `class` and `weight` to a class vector.
    pub fn edge_vector(self, classes: usize, class: ClassId, weight: f64) -> ClassVector {
        match self {
            Accumulation::Count => ClassVector::unit(classes, class, 1.0),
            Accumulation::Length => ClassVector::unit(classes, class, weight),
        }
    }

    pub(crate) fn amount(self, weight: f64) -> f64 {
        match self {
            Accumulation::Count => 1.0,
            Accumulation::Length => weight,
        }
    }
}

/// How paths are ranked: the comparison rule and what a class vector counts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OrderMode {
    pub comparison: Comparison,
    pub accumulation: Accumulation,
}

impl OrderMode {
    pub const fn new(comparison: Comparison, accumulation: Accumulation) -> Self {
        OrderMode {
            comparison,
            accumulation,
        }
    }

    pub const ALL: [OrderMode; 4] = [
        OrderMode::new(Comparison::WorstClass, Accumulation::Count),
        OrderMode::new(Comparison::WorstClass, Accumulation::Length),
        OrderMode::new(Comparison::ReverseLex, Accumulation::Count),
        OrderMode::new(Comparison::ReverseLex, Accumulation::Length),
    ];
}

impl fmt::Display for OrderMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self.comparison {
            Comparison::WorstClass => "worst",
            Comparison::ReverseLex => "revlex",
        };
        let a = match self.accumulation {
            Accumulation::Count => "count",
            Accumulation::Length => "length",
        };
        write!(f, "{c}/{a}")
    }
}

/// Priority of an edge in the edge queue.
///
/// `k1` adds the class-to-go estimate to `k2`; `k3` adds the cost-to-go
/// estimate to `k4`.
#[derive(Clone, Debug, PartialEq)]
pub struct QueueKey {
    pub k1: ClassVector,
    pub k2: ClassVector,
    pub k3: f64,
    pub k4: f64,
}

pub fn cost_compare(a: f64, b: f64) -> Ordering {
    if (a - b).abs() <= COST_TOLERANCE {
        Ordering::Equal
    } else {
        a.partial_cmp(&b).unwrap_or(Ordering::Equal)
    }
}

/// Lexicographic comparison over `(k1, k2, k3, k4)`.
pub fn key_compare(a: &QueueKey, b: &QueueKey, cmp: Comparison) -> Ordering {
    a.k1.compare(&b.k1, cmp)
        .then_with(|| a.k2.compare(&b.k2, cmp))
        .then_with(|| cost_compare(a.k3, b.k3))
        .then_with(|| cost_compare(a.k4, b.k4))
}

#[derive(Clone, Debug, PartialEq)]
pub struct PathSignature {
    pub theta: ClassVector,
    pub length: f64,
    pub hops: usize,
}

impl PathSignature {
    pub fn empty(classes: usize) -> Self {
        PathSignature {
            theta: ClassVector::zeros(classes),
            length: 0.0,
            hops: 0,
        }
    }

    /// Class first, then length (with [`COST_TOLERANCE`]).
    pub fn compare(&self, other: &PathSignature, cmp: Comparison) -> Ordering {
        self.theta
            .compare(&other.theta, cmp)
            .then_with(|| cost_compare(self.length, other.length))
    }

    /// Sum of per-class entries of a count-mode signature; equals `hops`.
    pub fn class_counts(&self) -> Option<Vec<usize>> {
        self.theta.entries().map(|e| e.iter().map(|&x| x as usize).collect())
    }
}

/// Evaluates every edge along `path` and accumulates its signature.
pub fn path_signature(path: &[VertexId], graph: &ColoredGraph, accumulation: Accumulation) -> Result<PathSignature> {
    let mut sig = PathSignature::empty(graph.class_count());
    for pair in path.windows(2) {
        let edge = graph
            .find_edge(pair[0], pair[1])
            .ok_or(Error::NotAdjacent(pair[0], pair[1]))?;
        let eval = graph.evaluate_edge(edge)?;
        sig.theta.add_at(eval.class, accumulation.amount(eval.weight));
        sig.length += eval.weight;
        sig.hops += 1;
    }
    Ok(sig)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cv(e: &[f64]) -> ClassVector {
        ClassVector::from_entries(e)
    }

    const WORST: Comparison = Comparison::WorstClass;
    const REVLEX: Comparison = Comparison::ReverseLex;

    #[test]
    fn addition() {
        assert_eq!(cv(&[1., 0., 0.]).plus(&cv(&[0., 2., 0.])), cv(&[1., 2., 0.]));
        let x = cv(&[3., 1., 4.]);
        assert_eq!(x.plus(&ClassVector::zeros(3)), x);
        assert_eq!(ClassVector::Top.plus(&cv(&[1., 0., 0.])), ClassVector::Top);
        assert!(matches!(
            cv(&[1., 0.]).try_add(&cv(&[1., 0., 0.])),
            Err(Error::LengthMismatch { left: 2, right: 3 })
        ));
    }

    #[test]
    fn worst_class_of_vectors() {
        assert_eq!(cv(&[0., 0., 0.]).worst_class().unwrap(), 0);
        assert_eq!(cv(&[2., 0., 0.]).worst_class().unwrap(), 1);
        assert_eq!(cv(&[0., 1., 4.]).worst_class().unwrap(), 3);
        assert_eq!(ClassVector::Top.worst_class(), Err(Error::TopHasNoWorstClass));
    }

    #[test]
    fn comparison_examples() {
        assert_eq!(cv(&[1., 0., 0.]).compare(&cv(&[0., 1., 0.]), WORST), Ordering::Less);
        assert_eq!(cv(&[5., 0., 1.]).compare(&cv(&[0., 0., 2.]), WORST), Ordering::Less);
        assert_eq!(cv(&[3., 1., 0.]).compare(&cv(&[7., 1., 0.]), WORST), Ordering::Equal);
        assert_eq!(cv(&[3., 1., 0.]).compare(&cv(&[7., 1., 0.]), REVLEX), Ordering::Less);
        for c in [WORST, REVLEX] {
            assert_eq!(ClassVector::Top.compare(&cv(&[9., 9., 9.]), c), Ordering::Greater);
            assert_eq!(ClassVector::Top.compare(&ClassVector::Top, c), Ordering::Equal);
        }
        assert!(cv(&[1.]).try_compare(&cv(&[1., 2.]), WORST).is_err());
    }

    #[test]
    fn key_ordering() {
        let key = |k1: &[f64], k3: f64| QueueKey {
            k1: cv(k1),
            k2: cv(k1),
            k3,
            k4: 0.0,
        };
        assert_eq!(
            key_compare(&key(&[1., 0.], 100.0), &key(&[0., 1.], 1.0), WORST),
            Ordering::Less
        );
        assert_eq!(
            key_compare(&key(&[1., 0.], 3.0), &key(&[1., 0.], 4.0), WORST),
            Ordering::Less
        );
        assert_eq!(
            key_compare(&key(&[1., 0.], 3.0), &key(&[1., 0.], 3.0 + 1e-12), WORST),
            Ordering::Equal
        );
    }

    #[test]
    fn rendering() {
        assert_eq!(cv(&[2., 0., 0.]).to_string(), "[2,0,0]");
        assert_eq!(cv(&[1.5, 0., 2.25]).to_string(), "[1.500,0,2.250]");
        assert_eq!(ClassVector::Top.to_string(), "TOP");
    }
}
