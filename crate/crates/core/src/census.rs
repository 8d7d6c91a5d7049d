//! Exhaustive sweeps over all projective classes of trivectors on
//! GF(q)^n, bucketed by type.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exterior::{binom, AlternatingFunctional};
use crate::field::Field;
use crate::geometry::projective_vectors;
use crate::hyperplane::{
    projective_class_count, reference_table, signature, Gf2Trivector, Hyperplane, HyperplaneError,
    ReferenceTable, TypeSignature,
};

#[derive(Debug, Error)]
pub enum CensusError {
    #[error("{count} classes exceed the cap of {cap}")]
    CapExceeded { count: String, cap: u64 },
    #[error("census needs 3 <= n <= {max}, got {n}", max = Gf2Trivector::MAX_N)]
    BadDimension { n: usize },
    #[error(transparent)]
    Hyperplane(#[from] HyperplaneError),
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusReport {
    pub n: usize,
    pub field: String,
    pub classes: u64,
    /// type label (or "Unknown") -> classes
    pub buckets: BTreeMap<String, u64>,
    pub ranks: BTreeMap<usize, u64>,
    /// classes whose R_up is empty
    pub empty_upper_radical: u64,
    pub spread_like: u64,
    /// spreads whose lines failed to partition the points
    pub bad_spreads: u64,
    /// distinct signatures seen, with their counts
    pub signatures: Vec<(TypeSignature, u64)>,
}

#[derive(Default)]
struct Acc {
    sigs: BTreeMap<String, (TypeSignature, u64)>,
    bad_spreads: u64,
}

impl Acc {
    fn add(mut self, sig: TypeSignature, bad_spread: bool) -> Acc {
        let key = serde_json::to_string(&sig).unwrap();
        self.sigs.entry(key).or_insert((sig, 0)).1 += 1;
        self.bad_spreads += bad_spread as u64;
        self
    }

    fn merge(mut self, other: Acc) -> Acc {
        for (k, (s, c)) in other.sigs {
            self.sigs.entry(k).or_insert((s, 0)).1 += c;
        }
        self.bad_spreads += other.bad_spreads;
        self
    }
}

fn spread_partitions(h: &Hyperplane) -> Result<bool, HyperplaneError> {
    let f = h.field();
    let lines = h.upper_radical_from_poles()?;
    let q = f.order();
    let points = h.points().len() as u64;
    if lines.len() as u64 * (q + 1) != points {
        return Ok(false);
    }
    Ok(h.points()
        .iter()
        .all(|p| lines.iter().filter(|l| l.contains_vector(f, p)).count() == 1))
}

/// Sweeps every class; GF(2) goes through the bit-packed path. The result
/// does not depend on the number of rayon workers.
pub fn census(f: &Field, n: usize, cap: u64) -> Result<CensusReport, CensusError> {
    if !(3..=Gf2Trivector::MAX_N).contains(&n) {
        return Err(CensusError::BadDimension { n });
    }
    let count = projective_class_count(f.order(), n, 3);
    if count > cap as u128 {
        return Err(CensusError::CapExceeded {
            count: count.to_string(),
            cap,
        });
    }
    let table = reference_table(f, n)?;
    let acc = if f.order() == 2 {
        (1u64..=count as u64)
            .into_par_iter()
            .fold(Acc::default, |acc, bits| {
                let t = Gf2Trivector::from_bits(n, bits);
                let sig = t.signature();
                let bad = sig.spread && t.spread_lines().is_none();
                acc.add(sig, bad)
            })
            .reduce(Acc::default, Acc::merge)
    } else {
        let dim = binom(n, 3);
        projective_vectors(f, dim)
            .par_bridge()
            .map(|c| -> Result<(TypeSignature, bool), HyperplaneError> {
                let h = Hyperplane::new(AlternatingFunctional::new(f, n, 3, c)?)?;
                let sig = signature(&h)?;
                let bad = sig.spread && !spread_partitions(&h)?;
                Ok((sig, bad))
            })
            .try_fold(Acc::default, |acc, r| r.map(|(s, b)| acc.add(s, b)))
            .try_reduce(Acc::default, |a, b| Ok(a.merge(b)))?
    };
    Ok(finish(f, n, &table, acc))
}

fn finish(f: &Field, n: usize, table: &ReferenceTable, acc: Acc) -> CensusReport {
    let mut r = CensusReport {
        n,
        field: f.spec(),
        bad_spreads: acc.bad_spreads,
        ..Default::default()
    };
    for (sig, c) in acc.sigs.into_values() {
        r.classes += c;
        let label = table
            .lookup(&sig)
            .map_or_else(|| "Unknown".to_string(), |l| l.to_string());
        *r.buckets.entry(label).or_insert(0) += c;
        *r.ranks.entry(sig.rank).or_insert(0) += c;
        if sig.upper_radical_size == 0 {
            r.empty_upper_radical += c;
        }
        if sig.spread {
            r.spread_like += c;
        }
        r.signatures.push((sig, c));
    }
    r
}
