//! Ideals of subsets of a time scale, their dual filters and an axiom checker.
//!
//! Membership is three-valued. Structural information (bounds, periodic
//! tails) decides exactly; otherwise the set is examined up to the horizon
//! and the answer is evidence-graded, with `Unknown` when the evidence is
//! mixed.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::density::{density, DensityOutcome};
use crate::error::Result;
use crate::measure::components_measure;
use crate::real::Real;
use crate::set::{Bound, TsSet};
use crate::settings::Settings;
use crate::timescale::{Periodicity, TimeScale};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Membership {
    In,
    NotIn,
    Unknown,
}

impl Membership {
    pub fn negate(self) -> Membership {
        match self {
            Membership::In => Membership::NotIn,
            Membership::NotIn => Membership::In,
            Membership::Unknown => Membership::Unknown,
        }
    }
}

impl fmt::Display for Membership {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Membership::In => "in",
            Membership::NotIn => "not_in",
            Membership::Unknown => "unknown",
        };
        write!(f, "{s}")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct IdealFlags {
    pub nontrivial: bool,
    /// Contains every bounded set.
    pub b_admissible: bool,
    pub bap: bool,
}

pub type MembershipFn = dyn Fn(&TimeScale, &TsSet, &Settings) -> Result<Membership> + Send + Sync;
/// Maps a disjoint family `A_j` to a family `B_j` with `A_j Δ B_j` bounded.
pub type BapWitness = dyn Fn(&[TsSet]) -> Vec<TsSet> + Send + Sync;

#[derive(Clone)]
enum Rule {
    MeasureZero,
    DensityZero,
    Bounded,
    Generated(Vec<TsSet>),
    Custom(Arc<MembershipFn>),
}

#[derive(Clone)]
pub struct Ideal {
    name: String,
    ts: TimeScale,
    rule: Rule,
    flags: IdealFlags,
    witness: Option<Arc<BapWitness>>,
}

impl fmt::Debug for Ideal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ideal({} on {})", self.name, self.ts)
    }
}

impl Ideal {
    /// Sets of Δ-measure zero.
    pub fn measure_zero(ts: &TimeScale) -> Ideal {
        Ideal {
            name: "measure_zero".into(),
            ts: ts.clone(),
            rule: Rule::MeasureZero,
            flags: IdealFlags {
                nontrivial: true,
                b_admissible: false,
                bap: false,
            },
            witness: None,
        }
    }

    /// Sets of density zero.
    pub fn density_zero(ts: &TimeScale) -> Ideal {
        Ideal {
            name: "density_zero".into(),
            ts: ts.clone(),
            rule: Rule::DensityZero,
            flags: IdealFlags {
                nontrivial: true,
                b_admissible: true,
                bap: false,
            },
            witness: None,
        }
    }

    /// Bounded sets; the smallest ideal containing every bounded set.
    pub fn bounded(ts: &TimeScale) -> Ideal {
        Ideal {
            name: "bounded".into(),
            ts: ts.clone(),
            rule: Rule::Bounded,
            flags: IdealFlags {
                nontrivial: true,
                b_admissible: true,
                bap: true,
            },
            witness: Some(Arc::new(|family: &[TsSet]| family.to_vec())),
        }
    }

    /// Subsets of finite unions of the generators.
    pub fn generated(ts: &TimeScale, generators: Vec<TsSet>, settings: &Settings) -> Result<Ideal> {
        let mut ideal = Ideal {
            name: format!("generated({})", generators.len()),
            ts: ts.clone(),
            rule: Rule::Generated(generators),
            flags: IdealFlags {
                nontrivial: true,
                b_admissible: false,
                bap: false,
            },
            witness: None,
        };
        ideal.flags.nontrivial = ideal.membership(&TsSet::full(), settings)? != Membership::In;
        Ok(ideal)
    }

    /// An arbitrary membership rule. Nothing guarantees it is an ideal;
    /// `check_ideal_axioms` is the way to find out.
    pub fn custom(ts: &TimeScale, name: impl Into<String>, flags: IdealFlags, rule: Arc<MembershipFn>) -> Ideal {
        Ideal {
            name: name.into(),
            ts: ts.clone(),
            rule: Rule::Custom(rule),
            flags,
            witness: None,
        }
    }

    pub fn with_bap_witness(mut self, witness: Arc<BapWitness>) -> Ideal {
        self.witness = Some(witness);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn timescale(&self) -> &TimeScale {
        &self.ts
    }

    pub fn flags(&self) -> IdealFlags {
        self.flags
    }

    pub fn bap_witness(&self) -> Option<&Arc<BapWitness>> {
        self.witness.as_ref()
    }

    pub fn membership(&self, s: &TsSet, settings: &Settings) -> Result<Membership> {
        s.validate(&self.ts)?;
        match &self.rule {
            Rule::MeasureZero => self.measure_zero_membership(s, settings),
            Rule::DensityZero => self.density_zero_membership(s, settings),
            Rule::Bounded => self.bounded_membership(s, settings),
            Rule::Generated(gens) => {
                let outside = s.difference(&TsSet::union_all(gens.clone()));
                Ok(if is_empty_up_to_horizon(&self.ts, &outside, settings)? {
                    Membership::In
                } else {
                    Membership::NotIn
                })
            }
            Rule::Custom(f) => f(&self.ts, s, settings),
        }
    }

    fn measure_zero_membership(&self, s: &TsSet, settings: &Settings) -> Result<Membership> {
        let cs = s.resolve(&self.ts, &settings.horizon(&self.ts), &settings.resolve)?;
        Ok(if components_measure(&self.ts, &cs).is_zero() {
            Membership::In
        } else {
            Membership::NotIn
        })
    }

    fn density_zero_membership(&self, s: &TsSet, settings: &Settings) -> Result<Membership> {
        let bounded = self.bounded_membership(s, settings)?;
        if bounded == Membership::In {
            return Ok(Membership::In);
        }
        if self.ts.periodicity() == Periodicity::Aperiodic {
            // On a geometric tail every point carries a fixed fraction of
            // its window, so only finite sets have density zero.
            return Ok(bounded);
        }
        let tol = settings.density.tol;
        let s = s.without_bounded_parts(&self.ts, &settings.resolve)?;
        Ok(match density(&self.ts, &s, settings)?.outcome {
            DensityOutcome::Exact { value } => {
                if value.is_zero() {
                    Membership::In
                } else {
                    Membership::NotIn
                }
            }
            DensityOutcome::Estimated { value, halfwidth } => {
                if value + halfwidth < tol {
                    Membership::In
                } else if value - halfwidth > tol {
                    Membership::NotIn
                } else {
                    Membership::Unknown
                }
            }
            // No limit means in particular no limit equal to zero.
            DensityOutcome::DoesNotExist { .. } => Membership::NotIn,
            DensityOutcome::Inconclusive { .. } => Membership::Unknown,
        })
    }

    fn bounded_membership(&self, s: &TsSet, settings: &Settings) -> Result<Membership> {
        match s.bound(&self.ts, &settings.resolve)? {
            Bound::Empty | Bound::Known(_) => return Ok(Membership::In),
            Bound::Unbounded => return Ok(Membership::NotIn),
            Bound::Unknown => {}
        }
        let h = settings.horizon(&self.ts);
        let cs = s.without_bounded_parts(&self.ts, &settings.resolve)?.resolve(&self.ts, &h, &settings.resolve)?;
        let Some(last) = cs.last() else {
            return Ok(Membership::In);
        };
        let epochs = settings.bounded_clear_epochs.max(1);
        let cut = |q: u32| h / Real::int(1i128 << q);
        if last.hi <= cut(epochs) {
            return Ok(Membership::In);
        }
        let hits = |q: u32| {
            let (lo, hi) = (cut(q + 1), cut(q));
            cs.iter().any(|c| c.hi > lo && c.lo <= hi)
        };
        let recent = (0..epochs).all(hits);
        // Reaching past `cut(epochs)` is already established above.
        let recurring = (0..RECURRENCE_EPOCHS).filter(|q| hits(*q)).count() * 2 >= RECURRENCE_EPOCHS as usize;
        Ok(if recent || recurring {
            Membership::NotIn
        } else {
            Membership::Unknown
        })
    }

    pub fn filter(&self) -> FilterView<'_> {
        FilterView { underlying: self }
    }
}

/// Window, in epochs before the horizon, in which a set that reaches the
/// last epochs and meets at least half of the window counts as unbounded.
const RECURRENCE_EPOCHS: u32 = 8;

fn is_empty_up_to_horizon(ts: &TimeScale, s: &TsSet, settings: &Settings) -> Result<bool> {
    if s.bound(ts, &settings.resolve)? == Bound::Empty {
        return Ok(true);
    }
    Ok(s.resolve(ts, &settings.horizon(ts), &settings.resolve)?.is_empty())
}

/// `A ⊆ B`, checked up to the horizon.
pub fn is_subset(ts: &TimeScale, a: &TsSet, b: &TsSet, settings: &Settings) -> Result<bool> {
    is_empty_up_to_horizon(ts, &a.difference(b), settings)
}

/// The filter of complements of ideal members.
#[derive(Clone, Copy)]
pub struct FilterView<'a> {
    pub underlying: &'a Ideal,
}

impl FilterView<'_> {
    pub fn contains(&self, s: &TsSet, settings: &Settings) -> Result<Membership> {
        in_filter(self, s, settings)
    }
}

pub fn in_filter(filter: &FilterView<'_>, s: &TsSet, settings: &Settings) -> Result<Membership> {
    filter.underlying.membership(&s.complement(), settings)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    EmptyIn,
    UnionClosure,
    SubsetClosure,
    Nontrivial,
    BAdmissible,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub axiom: Axiom,
    pub witnesses: Vec<String>,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct AxiomReport {
    pub checks: usize,
    pub unknown: usize,
    pub violations: Vec<Violation>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    fn record(&mut self, axiom: Axiom, got: Membership, want: Membership, witnesses: Vec<String>) {
        self.checks += 1;
        if got == Membership::Unknown {
            self.unknown += 1;
        } else if got != want {
            self.violations.push(Violation {
                axiom,
                witnesses,
                detail: format!("expected {want}, got {got}"),
            });
        }
    }
}

/// Checks `∅ ∈ I`, closure under unions and subsets over all pairs of the
/// sample family, nontriviality, and containment of bounded samples when
/// the ideal claims B-admissibility.
pub fn check_ideal_axioms(ideal: &Ideal, samples: &[TsSet], settings: &Settings) -> Result<AxiomReport> {
    let ts = ideal.timescale();
    let mut report = AxiomReport::default();
    report.record(Axiom::EmptyIn, ideal.membership(&TsSet::empty(), settings)?, Membership::In, vec!["∅".into()]);
    if ideal.flags().nontrivial {
        report.record(Axiom::Nontrivial, ideal.membership(&TsSet::full(), settings)?, Membership::NotIn, vec!["T".into()]);
    }
    let members: Vec<Membership> = samples
        .par_iter()
        .map(|s| ideal.membership(s, settings))
        .collect::<Result<_>>()?;
    if ideal.flags().b_admissible {
        for (s, m) in samples.iter().zip(&members) {
            if matches!(s.bound(ts, &settings.resolve)?, Bound::Empty | Bound::Known(_)) {
                report.record(Axiom::BAdmissible, *m, Membership::In, vec![s.to_string()]);
            }
        }
    }
    let n = samples.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|(i, j)| i != j).collect();
    let results: Vec<Vec<(Axiom, Membership, Vec<String>)>> = pairs
        .par_iter()
        .map(|&(i, j)| -> Result<Vec<(Axiom, Membership, Vec<String>)>> {
            let (a, b) = (&samples[i], &samples[j]);
            let mut out = Vec::new();
            if i < j && members[i] == Membership::In && members[j] == Membership::In {
                let u = ideal.membership(&a.union(b), settings)?;
                out.push((Axiom::UnionClosure, u, vec![a.to_string(), b.to_string()]));
            }
            if members[j] == Membership::In && is_subset(ts, a, b, settings)? {
                out.push((Axiom::SubsetClosure, members[i], vec![a.to_string(), b.to_string()]));
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    for (axiom, got, witnesses) in results.into_iter().flatten() {
        report.record(axiom, got, Membership::In, witnesses);
    }
    Ok(report)
}
