use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{Evaluation, Gauge, GaugeVerdict, Witness};
use crate::error::{Error, Result};
use crate::ext::ExtInt;
use crate::ilp::{solve_ilp, IlpOutcome, LinearProgram};
use crate::monomial::ExponentVector;
use crate::signature::Signature;
use crate::Rational;

const DEFAULT_BUDGET: usize = 200_000;
const NODE_LIMIT: usize = 20_000;

/// `p^cost x^exponent` lies in the ring of definition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub exponent: ExponentVector,
    pub cost: BigInt,
}

impl Generator {
    pub fn new(exponent: ExponentVector, cost: impl Into<BigInt>) -> Self {
        Generator { exponent, cost: cost.into() }
    }
}

/// Multiplicity of each generator in a product.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Combination {
    pub counts: Vec<BigInt>,
}

impl Combination {
    fn empty(n: usize) -> Self {
        Combination { counts: alloc::vec![BigInt::zero(); n] }
    }

    fn bump(&self, i: usize, by: &BigInt) -> Self {
        let mut c = self.clone();
        c.counts[i] += by;
        c
    }

    fn plus(&self, other: &Combination, times: &BigInt) -> Self {
        Combination { counts: self.counts.iter().zip(&other.counts).map(|(a, b)| a + b * times).collect() }
    }

    pub fn cost(&self, gens: &[Generator]) -> BigInt {
        self.counts.iter().zip(gens).map(|(k, g)| k * &g.cost).sum()
    }

    pub fn exponent(&self, gens: &[Generator], n: usize) -> ExponentVector {
        self.counts.iter().zip(gens).fold(ExponentVector::zero(n), |acc, (k, g)| {
            acc.add(&g.exponent.scale(&Rational::from_integer(k.clone())))
        })
    }

    pub fn render(&self, sig: &Signature, gens: &[Generator]) -> String {
        let parts: Vec<String> = self
            .counts
            .iter()
            .zip(gens)
            .filter(|(k, _)| !k.is_zero())
            .map(|(k, g)| {
                let m = sig.format_monomial(&g.exponent);
                if k.is_one() {
                    format!("[{m}]")
                } else {
                    format!("{k}*[{m}]")
                }
            })
            .collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join(" + ")
        }
    }
}

/// Result of the brute-force enumerator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Minimum {
    pub value: ExtInt,
    pub combination: Option<Combination>,
}

pub(crate) enum Search {
    Finite { value: BigInt, combination: Combination },
    Empty,
    /// `base + m * cycle` realizes the target for every `m >= 0`, and the cycle has negative cost.
    Unbounded { base: Combination, cycle: Combination },
    Exhausted,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct AxisStep {
    index: usize,
    cost: BigInt,
}

/// A ring of definition generated as an `O_k`-algebra by monomials `p^c x^e`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorGauge {
    sig: Arc<Signature>,
    gens: Vec<Generator>,
    budget: usize,
    graded: Vec<usize>,
    flat: Vec<usize>,
    /// Per coordinate, the cheapest `+1` and `-1` unit steps, when every flat generator is such a step.
    axis: Option<Vec<(Option<AxisStep>, Option<AxisStep>)>>,
}

impl GeneratorGauge {
    pub fn new(sig: Arc<Signature>, gens: Vec<Generator>) -> Result<Self> {
        let mut kept = Vec::new();
        for g in gens {
            sig.check(&g.exponent)?;
            if g.exponent.is_zero() {
                if g.cost.is_negative() {
                    return Err(Error::Definition(format!(
                        "constant generator with cost {} would make p invertible in the ring of definition",
                        g.cost
                    )));
                }
                continue;
            }
            kept.push(g);
        }
        let graded_coord: Vec<bool> = sig.vars().iter().map(|v| !v.invertible).collect();
        let is_graded = |g: &Generator| g.exponent.entries().iter().zip(&graded_coord).any(|(x, &c)| c && x.is_positive());
        let graded: Vec<usize> = (0..kept.len()).filter(|&i| is_graded(&kept[i])).collect();
        let flat: Vec<usize> = (0..kept.len()).filter(|&i| !is_graded(&kept[i])).collect();
        let axis = axis_table(sig.len(), &kept, &flat);
        Ok(GeneratorGauge { sig, gens: kept, budget: DEFAULT_BUDGET, graded, flat, axis })
    }

    /// Caps the number of dynamic-programming states before giving up.
    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    pub fn signature(&self) -> &Arc<Signature> {
        &self.sig
    }

    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    /// The same gauge with more generators appended after the existing ones.
    pub fn extended(&self, extra: Vec<Generator>) -> Result<GeneratorGauge> {
        let mut gens = self.gens.clone();
        gens.extend(extra);
        Ok(GeneratorGauge::new(self.sig.clone(), gens)?.with_budget(self.budget))
    }

    fn graded_coords(&self) -> Vec<usize> {
        (0..self.sig.len()).filter(|&i| !self.sig.vars()[i].invertible).collect()
    }

    pub(crate) fn search(&self, e: &ExponentVector) -> Search {
        let n = self.sig.len();
        let graded_coords = self.graded_coords();
        let within = |x: &ExponentVector| graded_coords.iter().all(|&c| x.get(c) <= e.get(c));
        let mut states: BTreeMap<ExponentVector, (BigInt, Combination)> = BTreeMap::new();
        states.insert(ExponentVector::zero(n), (BigInt::zero(), Combination::empty(self.gens.len())));
        for &i in &self.graded {
            let g = &self.gens[i];
            let mut frontier: Vec<ExponentVector> = states.keys().cloned().collect();
            while !frontier.is_empty() {
                let mut next = Vec::new();
                for key in frontier {
                    let nk = key.add(&g.exponent);
                    if !within(&nk) {
                        continue;
                    }
                    let (cost, comb) = &states[&key];
                    let cand = (cost + &g.cost, comb.bump(i, &BigInt::one()));
                    let better = match states.get(&nk) {
                        None => true,
                        Some(old) => cand < *old,
                    };
                    if better {
                        states.insert(nk.clone(), cand);
                        next.push(nk);
                    }
                }
                if states.len() > self.budget {
                    return Search::Exhausted;
                }
                frontier = next;
            }
        }

        let mut best: Option<(BigInt, Combination)> = None;
        let mut unbounded: Option<(Combination, Combination)> = None;
        let mut undecided = false;
        for (key, (cost, comb)) in &states {
            if graded_coords.iter().any(|&c| key.get(c) != e.get(c)) {
                continue;
            }
            let r = e.sub(key);
            match self.residual(&r) {
                Residual::Infeasible => {}
                Residual::Finite(extra) => {
                    let total = comb.plus(&extra, &BigInt::one());
                    let cand = (cost + extra.cost(&self.gens), total);
                    if best.as_ref().is_none_or(|b| cand < *b) {
                        best = Some(cand);
                    }
                }
                Residual::Unbounded { base, cycle } => {
                    if unbounded.is_none() {
                        unbounded = Some((comb.plus(&base, &BigInt::one()), cycle));
                    }
                }
                Residual::Undecided => undecided = true,
            }
        }
        if let Some((base, cycle)) = unbounded {
            return Search::Unbounded { base, cycle };
        }
        if undecided {
            return Search::Exhausted;
        }
        match best {
            Some((value, combination)) => Search::Finite { value, combination },
            None => Search::Empty,
        }
    }

    fn residual(&self, r: &ExponentVector) -> Residual {
        let n = self.gens.len();
        if r.is_zero() && self.flat.is_empty() {
            return Residual::Finite(Combination::empty(n));
        }
        if self.flat.is_empty() {
            return Residual::Infeasible;
        }
        if let Some(axis) = &self.axis {
            let mut comb = Combination::empty(n);
            let mut cycle = None;
            for (c, (plus, minus)) in axis.iter().enumerate() {
                if let (Some(a), Some(b)) = (plus, minus) {
                    if (&a.cost + &b.cost).is_negative() && cycle.is_none() {
                        let mut cy = Combination::empty(n);
                        cy.counts[a.index] += 1;
                        cy.counts[b.index] += 1;
                        cycle = Some(cy);
                    }
                }
                let x = r.get(c);
                if x.is_zero() {
                    continue;
                }
                if !x.is_integer() {
                    return Residual::Infeasible;
                }
                let step = if x.is_positive() { plus } else { minus };
                match step {
                    Some(s) => comb.counts[s.index] += x.to_integer().abs(),
                    None => return Residual::Infeasible,
                }
            }
            return match cycle {
                Some(cycle) => Residual::Unbounded { base: comb, cycle },
                None => Residual::Finite(comb),
            };
        }
        let k = self.flat.len();
        let objective: Vec<Rational> = self.flat.iter().map(|&i| Rational::from_integer(self.gens[i].cost.clone())).collect();
        let mut lp = LinearProgram::new(k, objective);
        for c in 0..self.sig.len() {
            let row: Vec<Rational> = self.flat.iter().map(|&i| self.gens[i].exponent.get(c).clone()).collect();
            if row.iter().all(Zero::is_zero) {
                if !r.get(c).is_zero() {
                    return Residual::Infeasible;
                }
                continue;
            }
            lp.push_le(row.clone(), r.get(c).clone());
            lp.push_le(row.iter().map(|x| -x).collect(), -r.get(c).clone());
        }
        let lift = |point: &[BigInt]| {
            let mut comb = Combination::empty(n);
            for (j, &i) in self.flat.iter().enumerate() {
                comb.counts[i] = point[j].clone();
            }
            comb
        };
        match solve_ilp(&lp, NODE_LIMIT) {
            IlpOutcome::Infeasible => Residual::Infeasible,
            IlpOutcome::Optimal { point, .. } => Residual::Finite(lift(&point)),
            IlpOutcome::Unbounded { point, ray } => {
                let cycle = lift(&ray);
                if cycle.cost(&self.gens).is_negative() {
                    Residual::Unbounded { base: lift(&point), cycle }
                } else {
                    Residual::Undecided
                }
            }
            IlpOutcome::Undecided { .. } => Residual::Undecided,
        }
    }

    pub(crate) fn explain(&self, e: &ExponentVector, horizon: u32) -> Result<Evaluation> {
        self.sig.check(e)?;
        Ok(match self.search(e) {
            Search::Finite { value, combination } => Evaluation {
                verdict: GaugeVerdict::Exact(value),
                shift: None,
                combination: Some(combination),
            },
            Search::Empty => Evaluation::plain(GaugeVerdict::PlusInf),
            Search::Exhausted => Evaluation::plain(GaugeVerdict::Inconclusive { horizon }),
            Search::Unbounded { base, cycle } => {
                let witnesses = (1..=horizon)
                    .map(|d| {
                        let comb = descend(&self.gens, &base, &cycle, &BigInt::from(-i64::from(d)));
                        Witness {
                            monomial: e.clone(),
                            shift: ExponentVector::zero(e.len()),
                            value: comb.cost(&self.gens),
                        }
                    })
                    .collect();
                Evaluation::plain(GaugeVerdict::MinusInfCertified { depth: horizon, witnesses })
            }
        })
    }
}

/// `base + m * cycle` for the least `m` bringing the cost to at most `target`.
pub(crate) fn descend(gens: &[Generator], base: &Combination, cycle: &Combination, target: &BigInt) -> Combination {
    let b = base.cost(gens);
    if b <= *target {
        return base.clone();
    }
    let drop = -cycle.cost(gens);
    let m = (b - target).div_ceil(&drop);
    base.plus(cycle, &m)
}

enum Residual {
    Infeasible,
    Finite(Combination),
    Unbounded { base: Combination, cycle: Combination },
    Undecided,
}

fn axis_table(n: usize, gens: &[Generator], flat: &[usize]) -> Option<Vec<(Option<AxisStep>, Option<AxisStep>)>> {
    let mut table: Vec<(Option<AxisStep>, Option<AxisStep>)> = alloc::vec![(None, None); n];
    for &i in flat {
        let g = &gens[i];
        let nz: Vec<usize> = (0..n).filter(|&c| !g.exponent.get(c).is_zero()).collect();
        if nz.len() != 1 {
            return None;
        }
        let c = nz[0];
        let x = g.exponent.get(c);
        let slot = if x.is_one() {
            &mut table[c].0
        } else if *x == -Rational::one() {
            &mut table[c].1
        } else {
            return None;
        };
        if slot.as_ref().is_none_or(|s| g.cost < s.cost) {
            *slot = Some(AxisStep { index: i, cost: g.cost.clone() });
        }
    }
    Some(table)
}

impl Gauge for GeneratorGauge {
    fn signature(&self) -> &Arc<Signature> {
        &self.sig
    }

    fn explain(&self, e: &ExponentVector, horizon: u32) -> Result<Evaluation> {
        GeneratorGauge::explain(self, e, horizon)
    }
}

/// Exhaustive minimum over generator multisets with at most `bound` members.
pub fn generator_gauge_oracle(g: &GeneratorGauge, e: &ExponentVector, bound: usize) -> Minimum {
    let graded: Vec<usize> = (0..g.sig.len()).filter(|&i| !g.sig.vars()[i].invertible).collect();
    let gens = &g.gens;
    let mut best: Option<(BigInt, Combination)> = None;
    let mut counts = alloc::vec![BigInt::zero(); gens.len()];

    #[allow(clippy::too_many_arguments)]
    fn walk(
        start: usize,
        left: usize,
        sum: &ExponentVector,
        cost: &BigInt,
        target: &ExponentVector,
        graded: &[usize],
        gens: &[Generator],
        counts: &mut Vec<BigInt>,
        best: &mut Option<(BigInt, Combination)>,
    ) {
        if sum == target {
            let cand = (cost.clone(), Combination { counts: counts.clone() });
            if best.as_ref().is_none_or(|b| cand < *b) {
                *best = Some(cand);
            }
        }
        if left == 0 {
            return;
        }
        for i in start..gens.len() {
            let next = sum.add(&gens[i].exponent);
            if graded.iter().any(|&c| next.get(c) > target.get(c)) {
                continue;
            }
            counts[i] += 1;
            walk(i, left - 1, &next, &(cost + &gens[i].cost), target, graded, gens, counts, best);
            counts[i] -= 1;
        }
    }

    walk(0, bound, &ExponentVector::zero(e.len()), &BigInt::zero(), e, &graded, gens, &mut counts, &mut best);
    match best {
        Some((v, c)) => Minimum { value: ExtInt::Finite(v), combination: Some(c) },
        None => Minimum { value: ExtInt::PosInf, combination: None },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature::VarDecl;

    fn ring() -> Arc<Signature> {
        Arc::new(Signature::new(2, alloc::vec![VarDecl::invertible("T"), VarDecl::plain("Z")]).unwrap())
    }

    fn gen(t: i64, z: i64, c: i64) -> Generator {
        Generator::new(ExponentVector::from_ints(&[t, z]), c)
    }

    #[test]
    fn empty_list_supports_only_one() {
        let g = GeneratorGauge::new(ring(), Vec::new()).unwrap();
        assert_eq!(g.evaluate(&ExponentVector::from_ints(&[0, 0]), 4).unwrap(), GaugeVerdict::Exact(BigInt::zero()));
        assert_eq!(g.evaluate(&ExponentVector::from_ints(&[1, 0]), 4).unwrap(), GaugeVerdict::PlusInf);
        assert_eq!(generator_gauge_oracle(&g, &ExponentVector::from_ints(&[0, 1]), 5).value, ExtInt::PosInf);
    }

    #[test]
    fn single_generator_costs_itself() {
        let g = GeneratorGauge::new(ring(), alloc::vec![gen(1, 0, 1), gen(-1, 0, 1), gen(1, 1, -1)]).unwrap();
        let e = ExponentVector::from_ints(&[1, 1]);
        assert_eq!(g.evaluate(&e, 4).unwrap(), GaugeVerdict::Exact(BigInt::from(-1)));
        assert_eq!(generator_gauge_oracle(&g, &e, 6).value, ExtInt::int(-1));
        // Z = T^-1 * T Z costs 1 - 1
        let z = ExponentVector::from_ints(&[0, 1]);
        assert_eq!(g.evaluate(&z, 4).unwrap(), GaugeVerdict::Exact(BigInt::zero()));
    }

    #[test]
    fn negative_cycle_is_minus_inf() {
        let g = GeneratorGauge::new(ring(), alloc::vec![gen(1, 0, 1), gen(-1, 0, -2)]).unwrap();
        match g.evaluate(&ExponentVector::from_ints(&[3, 0]), 5).unwrap() {
            GaugeVerdict::MinusInfCertified { depth, witnesses } => {
                assert_eq!(depth, 5);
                for (k, w) in witnesses.iter().enumerate() {
                    assert!(w.value <= BigInt::from(-(k as i64) - 1));
                }
            }
            v => panic!("{v}"),
        }
    }

    #[test]
    fn constant_generators() {
        assert!(GeneratorGauge::new(ring(), alloc::vec![gen(0, 0, -1)]).is_err());
        let g = GeneratorGauge::new(ring(), alloc::vec![gen(0, 0, 3)]).unwrap();
        assert!(g.generators().is_empty());
    }

    #[test]
    fn non_axis_flat_generators_use_the_ilp() {
        let g = GeneratorGauge::new(ring(), alloc::vec![gen(2, 0, 1), gen(-3, 0, 1)]).unwrap();
        // 1 = 2*2 - 3
        assert_eq!(g.evaluate(&ExponentVector::from_ints(&[1, 0]), 4).unwrap(), GaugeVerdict::Exact(BigInt::from(3)));
        assert_eq!(generator_gauge_oracle(&g, &ExponentVector::from_ints(&[1, 0]), 8).value, ExtInt::int(3));
    }

    #[test]
    fn budget_gives_inconclusive() {
        let g = GeneratorGauge::new(ring(), alloc::vec![gen(1, 1, 0), gen(-1, 1, 0), gen(0, 1, 0)])
            .unwrap()
            .with_budget(3);
        assert!(matches!(
            g.evaluate(&ExponentVector::from_ints(&[0, 6]), 4).unwrap(),
            GaugeVerdict::Inconclusive { .. }
        ));
    }
}
