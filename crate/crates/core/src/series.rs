//! Truncated power series in `q` whose coefficients are finite combinations
//! `sum c * w^j * lambda(key)` with rational `c`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::padic::{p_pow, CyclotomicCounter, PadicError, Phase, Q};
use crate::symbols::{SymbolKey, SymbolTable};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TermKey {
    pub q: u32,
    pub sym: SymbolKey,
    pub w: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormalSeries {
    rmax: u32,
    terms: BTreeMap<TermKey, Q>,
}

impl FormalSeries {
    pub fn new(rmax: u32) -> Self {
        FormalSeries { rmax, terms: BTreeMap::new() }
    }

    pub fn rmax(&self) -> u32 {
        self.rmax
    }

    pub fn add_term(&mut self, q: u32, sym: SymbolKey, w: i64, coeff: &Q) {
        if q > self.rmax || coeff.is_zero() {
            return;
        }
        let k = TermKey { q, sym, w };
        let e = self.terms.entry(k).or_insert_with(Q::zero);
        *e += coeff;
        if e.is_zero() {
            self.terms.remove(&k);
        }
    }

    pub fn add_series(&mut self, o: &FormalSeries) {
        for (k, c) in &o.terms {
            self.add_term(k.q, k.sym, k.w, c);
        }
    }

    /// `self += f * q^dq * w^dw * o`
    pub fn add_scaled(&mut self, o: &FormalSeries, f: &Q, dq: u32, dw: i64) {
        for (k, c) in &o.terms {
            self.add_term(k.q + dq, k.sym, k.w + dw, &(c * f));
        }
    }

    pub fn scaled(&self, f: &Q) -> FormalSeries {
        let mut out = FormalSeries::new(self.rmax);
        out.add_scaled(self, f, 0, 0);
        out
    }

    pub fn sub(&self, o: &FormalSeries) -> FormalSeries {
        let mut out = self.clone();
        out.add_scaled(o, &-Q::one(), 0, 0);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&TermKey, &Q)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, q: u32) -> Vec<(SymbolKey, i64, Q)> {
        self.terms.iter().filter(|(k, _)| k.q == q).map(|(k, c)| (k.sym, k.w, c.clone())).collect()
    }

    /// Multiply by `sum_j (p^6 w q^2)^j`.
    pub fn times_zeta(&self, p: u64) -> FormalSeries {
        let mut out = FormalSeries::new(self.rmax);
        let mut j = 0u32;
        while 2 * j <= self.rmax {
            out.add_scaled(self, &p_pow(p, 6 * j as i64), 2 * j, j as i64);
            j += 1;
        }
        out
    }

    pub fn with_rmax(&self, rmax: u32) -> FormalSeries {
        let mut out = FormalSeries::new(rmax);
        out.add_series(self);
        out
    }

    pub fn render(&self, table: &SymbolTable) -> Vec<CoefficientRecord> {
        (0..=self.rmax)
            .map(|q| CoefficientRecord {
                q_power: q,
                terms: self
                    .coefficient(q)
                    .into_iter()
                    .map(|(k, w, c)| TermRecord { symbol: table.describe(&k), w_power: w, rational: c.to_string() })
                    .collect(),
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TermRecord {
    pub symbol: String,
    pub w_power: i64,
    pub rational: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoefficientRecord {
    pub q_power: u32,
    pub terms: Vec<TermRecord>,
}

/// One coefficient where two series disagree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Discrepancy {
    pub q_power: u32,
    pub symbol: String,
    pub w_power: i64,
    pub left: String,
    pub right: String,
}

pub fn diff(left: &FormalSeries, right: &FormalSeries, table: &SymbolTable) -> Vec<Discrepancy> {
    let d = left.sub(right);
    d.iter()
        .map(|(k, _)| {
            let get = |s: &FormalSeries| s.terms.get(k).cloned().unwrap_or_else(Q::zero).to_string();
            Discrepancy {
                q_power: k.q,
                symbol: table.describe(&k.sym),
                w_power: k.w,
                left: get(left),
                right: get(right),
            }
        })
        .collect()
}

/// Accumulates `coeff * psi(phase) * w^j q^n lambda(key)` and rationalizes
/// the root-of-unity sums at the end.
#[derive(Clone, Debug)]
pub struct PhaseAccumulator {
    p: u64,
    rmax: u32,
    cells: BTreeMap<TermKey, CyclotomicCounter>,
}

impl PhaseAccumulator {
    pub fn new(p: u64, rmax: u32) -> Self {
        PhaseAccumulator { p, rmax, cells: BTreeMap::new() }
    }

    pub fn add(&mut self, q: u32, sym: SymbolKey, w: i64, phase: Phase, coeff: &Q) {
        if q > self.rmax || coeff.is_zero() {
            return;
        }
        let p = self.p;
        self.cells.entry(TermKey { q, sym, w }).or_insert_with(|| CyclotomicCounter::new(p, 0)).add_phase(phase, coeff);
    }

    pub fn merge(&mut self, o: PhaseAccumulator) {
        for (k, c) in o.cells {
            let p = self.p;
            self.cells.entry(k).or_insert_with(|| CyclotomicCounter::new(p, 0)).add_counter(&c);
        }
    }

    pub fn finish(self) -> Result<FormalSeries, PadicError> {
        let mut out = FormalSeries::new(self.rmax);
        for (k, c) in self.cells {
            let v = c.to_rational().ok_or(PadicError::NotRational)?;
            out.add_term(k.q, k.sym, k.w, &v);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::{q_frac, q_int};

    fn key(n: i64) -> SymbolKey {
        SymbolKey { a: 0, b: 0, beta: 0, c: 0, nu: n }
    }

    #[test]
    fn truncation_and_cancellation() {
        let mut s = FormalSeries::new(2);
        s.add_term(3, key(0), 0, &q_int(1));
        assert!(s.is_zero());
        s.add_term(1, key(1), 0, &q_int(2));
        s.add_term(1, key(1), 0, &q_int(-2));
        assert!(s.is_zero());
    }

    #[test]
    fn zeta_factor() {
        let mut s = FormalSeries::new(4);
        s.add_term(0, key(0), 0, &q_int(1));
        let z = s.times_zeta(3);
        assert_eq!(z.coefficient(2), vec![(key(0), 1, q_int(729))]);
        assert_eq!(z.coefficient(4), vec![(key(0), 2, q_int(531441))]);
    }

    #[test]
    fn accumulator_rationalizes() {
        let mut acc = PhaseAccumulator::new(3, 1);
        for j in 0..3 {
            acc.add(0, key(0), 0, Phase::of(&q_frac(j, 3), 3), &q_int(2));
        }
        acc.add(1, key(0), 0, Phase::ZERO, &q_int(5));
        let s = acc.finish().unwrap();
        assert_eq!(s.coefficient(0), vec![]);
        assert_eq!(s.coefficient(1), vec![(key(0), 0, q_int(5))]);
        let mut bad = PhaseAccumulator::new(3, 0);
        bad.add(0, key(0), 0, Phase::of(&q_frac(1, 3), 3), &q_int(1));
        assert!(bad.finish().is_err());
    }
}
