//! Base cost functions `c(j)` and distribution rules `f(j)` on `{0, .., n+1}`.
//!
//! Both are stored on `1..=n`. The extended accessors follow the usual
//! boundary conventions: `f(0) = c(0) = 0`, `f(n+1) = f(n)` and `c(n+1)` is
//! an infinite sentinel that never enters arithmetic.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance used by the structural predicates.
pub const PREDICATE_TOL: f64 = 1e-12;

/// Value of `c(j)` on the extended domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Extended {
    Finite(f64),
    Infinite,
}

impl Extended {
    pub fn finite(self) -> Option<f64> {
        match self {
            Extended::Finite(v) => Some(v),
            Extended::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Extended::Infinite)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CostFunction {
    values: Vec<f64>,
}

impl CostFunction {
    /// `c(j) = j^d` for `j = 1..=n`.
    pub fn polynomial(d: f64, n: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::EmptyPlayerSet);
        }
        if !(d.is_finite() && d >= 0.0) {
            return Err(Error::InvalidValue {
                index: 0,
                value: d,
                reason: "exponent must be finite and nonnegative",
            });
        }
        Ok(Self {
            values: (1..=n).map(|j| (j as f64).powf(d)).collect(),
        })
    }

    /// Builds `c(1..=n)` from explicit values; `normalize` rescales so that `c(1) = 1`.
    pub fn from_values(values: &[f64], normalize: bool) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyPlayerSet);
        }
        for (i, &v) in values.iter().enumerate() {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidValue {
                    index: i + 1,
                    value: v,
                    reason: "cost values must be finite and strictly positive",
                });
            }
        }
        let scale = if normalize { values[0] } else { 1.0 };
        Ok(Self {
            values: values.iter().map(|v| v / scale).collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Extended accessor on `0..=n+1` (anything past `n` is the infinite sentinel).
    pub fn at(&self, j: usize) -> Extended {
        match j {
            0 => Extended::Finite(0.0),
            j if j <= self.n() => Extended::Finite(self.values[j - 1]),
            _ => Extended::Infinite,
        }
    }

    /// `c(j)` for `j` in `0..=n`.
    ///
    /// Panics past `n`; callers must short-circuit structurally zero terms
    /// before reaching the sentinel.
    pub fn value(&self, j: usize) -> f64 {
        match self.at(j) {
            Extended::Finite(v) => v,
            Extended::Infinite => panic!("c({j}) is the infinite sentinel (n = {})", self.n()),
        }
    }

    /// `coef * c(j)`, exactly zero when `coef == 0` regardless of `j`.
    pub fn weighted(&self, coef: usize, j: usize) -> f64 {
        if coef == 0 {
            0.0
        } else {
            coef as f64 * self.value(j)
        }
    }

    pub fn is_normalized(&self) -> bool {
        (self.values[0] - 1.0).abs() <= PREDICATE_TOL
    }

    pub fn normalized(&self) -> Self {
        let scale = self.values[0];
        Self {
            values: self.values.iter().map(|v| v / scale).collect(),
        }
    }

    /// Nondecreasing and convex on `[n-1]`, using `c(0) = 0`.
    pub fn is_convex_nondecreasing(&self) -> bool {
        let n = self.n();
        (1..n).all(|j| {
            let (prev, cur, next) = (self.value(j - 1), self.value(j), self.value(j + 1));
            next >= cur - PREDICATE_TOL && next - cur >= cur - prev - PREDICATE_TOL
        })
    }

    /// Truncates to the first `n` players.
    pub fn truncated(&self, n: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::EmptyPlayerSet);
        }
        if n > self.n() {
            return Err(Error::SizeMismatch {
                expected: self.n(),
                found: n,
            });
        }
        Ok(Self {
            values: self.values[..n].to_vec(),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistributionRule {
    values: Vec<f64>,
}

impl DistributionRule {
    pub fn from_values(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyPlayerSet);
        }
        for (i, &v) in values.iter().enumerate() {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidValue {
                    index: i + 1,
                    value: v,
                    reason: "rule values must be finite and nonnegative",
                });
            }
        }
        Ok(Self {
            values: values.to_vec(),
        })
    }

    /// Equal split, `f(j) = 1/j`.
    pub fn shapley(n: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::EmptyPlayerSet);
        }
        Ok(Self {
            values: (1..=n).map(|j| 1.0 / j as f64).collect(),
        })
    }

    /// `f(j) = 1 - c(j-1)/c(j)`, so `f(1) = 1`.
    pub fn marginal_contribution(c: &CostFunction) -> Self {
        Self {
            values: (1..=c.n())
                .map(|j| 1.0 - c.value(j - 1) / c.value(j))
                .collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Extended accessor on `0..=n+1`.
    pub fn at(&self, j: usize) -> f64 {
        let n = self.n();
        match j {
            0 => 0.0,
            j if j <= n => self.values[j - 1],
            j if j == n + 1 => self.values[n - 1],
            _ => panic!("f({j}) is outside 0..=n+1 (n = {n})"),
        }
    }

    /// Rescales so that `f(1) = 1`. Fails when `f(1) = 0`.
    pub fn normalized(&self) -> Result<Self> {
        let head = self.values[0];
        if head <= 0.0 {
            return Err(Error::InvalidValue {
                index: 1,
                value: head,
                reason: "cannot normalize a rule with f(1) = 0",
            });
        }
        Ok(Self {
            values: self.values.iter().map(|v| v / head).collect(),
        })
    }

    pub fn truncated(&self, n: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::EmptyPlayerSet);
        }
        if n > self.n() {
            return Err(Error::SizeMismatch {
                expected: self.n(),
                found: n,
            });
        }
        Ok(Self {
            values: self.values[..n].to_vec(),
        })
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.n() == other.n()
            && self
                .values
                .iter()
                .zip(&other.values)
                .all(|(a, b)| (a - b).abs() <= tol)
    }
}

/// `coef * f(j) * c(j)`, exactly zero when `coef == 0`.
///
/// This is the only place where `f` and `c` meet on the extended domain, so
/// the `b = 0` short-circuit in front of `c(n+1)` lives here.
pub fn weighted_share(coef: usize, f: &DistributionRule, c: &CostFunction, j: usize) -> f64 {
    if coef == 0 {
        0.0
    } else {
        coef as f64 * f.at(j) * c.value(j)
    }
}

fn check_sizes(f: &DistributionRule, c: &CostFunction) -> Result<()> {
    if f.n() != c.n() {
        return Err(Error::SizeMismatch {
            expected: c.n(),
            found: f.n(),
        });
    }
    Ok(())
}

/// `f(j+1)c(j+1) >= f(j)c(j)` for every `1 <= j <= n-1`.
pub fn is_fc_nondecreasing(f: &DistributionRule, c: &CostFunction) -> Result<bool> {
    check_sizes(f, c)?;
    Ok((1..c.n()).all(|j| {
        f.at(j + 1) * c.value(j + 1) >= f.at(j) * c.value(j) - PREDICATE_TOL
    }))
}

/// `f(j) <= f_MC(j)` pointwise.
pub fn is_dominated_by_mc(f: &DistributionRule, c: &CostFunction) -> Result<bool> {
    check_sizes(f, c)?;
    let mc = DistributionRule::marginal_contribution(c);
    Ok((1..=c.n()).all(|j| f.at(j) <= mc.at(j) + PREDICATE_TOL))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SequenceKind {
    Cost,
    Rule,
}

/// On-disk form shared by cost functions and rules:
/// `{"n": int, "values": [...], "kind": "cost" | "rule"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceFile {
    pub n: usize,
    pub values: Vec<f64>,
    pub kind: SequenceKind,
}

impl SequenceFile {
    fn check(&self, kind: SequenceKind) -> Result<()> {
        if self.kind != kind {
            return Err(Error::Precondition(format!(
                "expected a {kind:?} file, found {:?}",
                self.kind
            )));
        }
        if self.values.len() != self.n {
            return Err(Error::SizeMismatch {
                expected: self.n,
                found: self.values.len(),
            });
        }
        Ok(())
    }
}

impl From<&CostFunction> for SequenceFile {
    fn from(c: &CostFunction) -> Self {
        Self {
            n: c.n(),
            values: c.values.clone(),
            kind: SequenceKind::Cost,
        }
    }
}

impl From<&DistributionRule> for SequenceFile {
    fn from(f: &DistributionRule) -> Self {
        Self {
            n: f.n(),
            values: f.values.clone(),
            kind: SequenceKind::Rule,
        }
    }
}

impl TryFrom<SequenceFile> for CostFunction {
    type Error = Error;

    fn try_from(file: SequenceFile) -> Result<Self> {
        file.check(SequenceKind::Cost)?;
        CostFunction::from_values(&file.values, false)
    }
}

impl TryFrom<SequenceFile> for DistributionRule {
    type Error = Error;

    fn try_from(file: SequenceFile) -> Result<Self> {
        file.check(SequenceKind::Rule)?;
        DistributionRule::from_values(&file.values)
    }
}

impl Serialize for CostFunction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SequenceFile::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for CostFunction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let file = SequenceFile::deserialize(d)?;
        CostFunction::try_from(file).map_err(serde::de::Error::custom)
    }
}

impl Serialize for DistributionRule {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SequenceFile::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for DistributionRule {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let file = SequenceFile::deserialize(d)?;
        DistributionRule::try_from(file).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn polynomial_costs() {
        assert_eq!(CostFunction::polynomial(1.0, 3).unwrap().values(), &[1.0, 2.0, 3.0]);
        assert_eq!(CostFunction::polynomial(2.0, 3).unwrap().values(), &[1.0, 4.0, 9.0]);
        let c = CostFunction::polynomial(1.2, 20).unwrap();
        assert!(close(c.value(2), 2f64.powf(1.2), 1e-15));
        assert!(close(c.value(2), 2.29740, 1e-5));
        assert!(c.is_normalized());
        assert!(matches!(CostFunction::polynomial(1.0, 0), Err(Error::EmptyPlayerSet)));
    }

    #[test]
    fn costs_from_values() {
        let c = CostFunction::from_values(&[2.0, 4.0, 6.0], true).unwrap();
        assert_eq!(c.values(), &[1.0, 2.0, 3.0]);
        let c = CostFunction::from_values(&[1.0, 4.0, 9.0], false).unwrap();
        assert_eq!(c.values(), &[1.0, 4.0, 9.0]);
        // decreasing positive costs are legal
        assert!(CostFunction::from_values(&[1.0, 0.5], false).is_ok());
        assert!(CostFunction::from_values(&[1.0, -1.0], false).is_err());
        assert!(CostFunction::from_values(&[1.0, -1.0], true).is_err());
        assert!(CostFunction::from_values(&[0.0], false).is_err());
        assert!(CostFunction::from_values(&[], false).is_err());
    }

    #[test]
    fn shapley_matches_table() {
        let f = DistributionRule::shapley(7).unwrap();
        assert!(close(f.at(2), 0.5, 5e-4));
        assert!(close(f.at(3), 0.333, 5e-4));
        assert!(close(f.at(7), 0.143, 5e-4));
        assert_eq!(DistributionRule::shapley(1).unwrap().at(1), 1.0);
        assert!(close(DistributionRule::shapley(5).unwrap().at(5), 0.2, 5e-4));
    }

    #[test]
    fn marginal_contribution_matches_table() {
        let c = CostFunction::polynomial(1.2, 20).unwrap();
        let f = DistributionRule::marginal_contribution(&c);
        // This column of the reference table is truncated, not rounded, to 3 decimals.
        let table = [1.0, 0.564, 0.385, 0.291, 0.234, 0.196, 0.168];
        for (j, want) in table.iter().enumerate() {
            let got = f.at(j + 1);
            assert!(close(got, *want, 1e-3), "f_MC({}) = {got}", j + 1);
            assert_eq!((got * 1000.0).floor() / 1000.0, *want);
        }
        let linear = CostFunction::polynomial(1.0, 6).unwrap();
        let mc = DistributionRule::marginal_contribution(&linear);
        assert!(mc.approx_eq(&DistributionRule::shapley(6).unwrap(), 1e-15));
        let sq = CostFunction::polynomial(2.0, 4).unwrap();
        assert_eq!(DistributionRule::marginal_contribution(&sq).at(2), 0.75);
    }

    #[test]
    fn extended_accessors() {
        let c = CostFunction::polynomial(2.0, 3).unwrap();
        let f = DistributionRule::shapley(3).unwrap();
        assert_eq!(c.at(0), Extended::Finite(0.0));
        assert!(c.at(4).is_infinite());
        assert_eq!(f.at(0), 0.0);
        assert_eq!(f.at(4), f.at(3));
        assert_eq!(c.weighted(0, 4), 0.0);
        assert_eq!(weighted_share(0, &f, &c, 4), 0.0);
    }

    #[test]
    #[should_panic(expected = "infinite sentinel")]
    fn sentinel_never_becomes_a_number() {
        let c = CostFunction::polynomial(2.0, 3).unwrap();
        c.weighted(1, 4);
    }

    #[test]
    fn fc_monotonicity() {
        let sq = CostFunction::polynomial(2.0, 6).unwrap();
        let lin = CostFunction::polynomial(1.0, 6).unwrap();
        let sv = DistributionRule::shapley(6).unwrap();
        assert!(is_fc_nondecreasing(&sv, &sq).unwrap());
        assert!(is_fc_nondecreasing(&sv, &lin).unwrap());
        let mc = DistributionRule::marginal_contribution(&sq);
        assert!(is_fc_nondecreasing(&mc, &sq).unwrap());
        let dec = DistributionRule::from_values(&[1.0, 0.1, 0.01, 0.0, 0.0, 0.0]).unwrap();
        assert!(!is_fc_nondecreasing(&dec, &lin).unwrap());
        let short = DistributionRule::shapley(3).unwrap();
        assert!(is_fc_nondecreasing(&short, &sq).is_err());
    }

    #[test]
    fn convexity() {
        assert!(CostFunction::polynomial(1.5, 10).unwrap().is_convex_nondecreasing());
        assert!(!CostFunction::polynomial(0.5, 10).unwrap().is_convex_nondecreasing());
        let affine = CostFunction::from_values(&[1.0, 2.0, 3.0], false).unwrap();
        assert!(affine.is_convex_nondecreasing());
    }

    #[test]
    fn fc_is_one_at_one() {
        for d in [1.0, 1.4, 2.0] {
            let c = CostFunction::polynomial(d, 5).unwrap();
            let sv = DistributionRule::shapley(5).unwrap();
            let mc = DistributionRule::marginal_contribution(&c);
            assert_eq!(sv.at(1) * c.value(1), 1.0);
            assert_eq!(mc.at(1) * c.value(1), 1.0);
        }
    }

    #[test]
    fn json_format() {
        let c = CostFunction::polynomial(2.0, 2).unwrap();
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(text, r#"{"n":2,"values":[1.0,4.0],"kind":"cost"}"#);
        let back: CostFunction = serde_json::from_str(&text).unwrap();
        assert_eq!(back, c);
        assert!(serde_json::from_str::<DistributionRule>(&text).is_err());
        let bad = r#"{"n":3,"values":[1.0],"kind":"rule"}"#;
        assert!(serde_json::from_str::<DistributionRule>(bad).is_err());
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn mc_dominates_sv_for_convex_costs(
                increments in proptest::collection::vec(0.0f64..3.0, 1..12),
                first in 0.1f64..5.0,
            ) {
                // Convex nondecreasing: sorted nonnegative increments on top of c(1) - c(0).
                let mut steps = increments.clone();
                steps.sort_by(|a, b| a.partial_cmp(b).unwrap());
                let mut values = vec![first];
                let mut last_step = first;
                for s in steps {
                    last_step += s;
                    let next = values.last().unwrap() + last_step;
                    values.push(next);
                }
                let c = CostFunction::from_values(&values, false).unwrap();
                prop_assert!(c.is_convex_nondecreasing());
                let mc = DistributionRule::marginal_contribution(&c);
                let sv = DistributionRule::shapley(c.n()).unwrap();
                for j in 1..=c.n() {
                    prop_assert!(mc.at(j) >= sv.at(j) - 1e-12);
                }
            }
        }
    }
}
