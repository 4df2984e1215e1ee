//! Sweeps, fidelity-class detection over signal subsets, and
//! asymptotic-coefficient fitting.

use crate::closedform;
use crate::error::{Error, Result};
use crate::protocol::{self, ent_from_tel_fidelity, tel_fidelity, OutcomeSet, SetFamily};
use rayon::prelude::*;
use std::fmt;

/// How a fidelity value was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    BruteForce,
    ClosedForm,
    MonteCarlo,
}

impl Method {
    pub fn tag(self) -> &'static str {
        match self {
            Method::BruteForce => "bruteforce",
            Method::ClosedForm => "closedform",
            Method::MonteCarlo => "montecarlo",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// One sweep row. `tel_fidelity` always satisfies the fidelity relation
/// against `ent_fidelity` exactly (Monte Carlo rows store the measured mean
/// as `tel_fidelity` and invert the relation for `ent_fidelity`).
#[derive(Debug, Clone)]
pub struct FidelityRecord {
    pub d: usize,
    pub n_ports: usize,
    pub set: String,
    pub method: Method,
    pub ent_fidelity: f64,
    pub tel_fidelity: f64,
}

/// One class of label subsets sharing a fidelity value (within tolerance).
#[derive(Debug, Clone)]
pub struct FidelityClass {
    /// Mean fidelity of the members.
    pub fidelity: f64,
    /// Largest member-to-member spread inside the class.
    pub spread: f64,
    pub members: Vec<String>,
}

/// Partition of all size-`k` label subsets by brute-force fidelity.
#[derive(Debug, Clone)]
pub struct ClassReport {
    pub d: usize,
    pub n_ports: usize,
    pub subset_size: usize,
    pub tolerance: f64,
    /// Classes in ascending fidelity order.
    pub classes: Vec<FidelityClass>,
}

/// Default class tolerance: tight for qubits (where equality is a theorem),
/// looser above (empirical, guards eigensolver jitter).
pub fn default_class_tolerance(d: usize) -> f64 {
    if d == 2 {
        1e-9
    } else {
        1e-6
    }
}

/// All size-`k` subsets of the `D^2` Bell labels, lexicographic.
pub fn label_subsets(d: usize, k: usize) -> Result<Vec<Vec<(usize, usize)>>> {
    if k < 1 || k > d * d {
        return Err(Error::usage(format!(
            "subset size {k} out of range 1..={}",
            d * d
        )));
    }
    let labels: Vec<(usize, usize)> = (0..d).flat_map(|x| (0..d).map(move |y| (x, y))).collect();
    Ok(k_subsets(labels.len(), k)
        .into_iter()
        .map(|idx| idx.into_iter().map(|i| labels[i]).collect())
        .collect())
}

fn k_subsets(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    if k == 0 || k > m {
        return out;
    }
    loop {
        out.push(idx.clone());
        // Advance the rightmost index that can still move.
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + m - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Brute-forces every size-`k` subset of the `D^2` Bell labels and buckets
/// the fidelities with the given tolerance. For qubits every size yields a
/// single class; in higher dimensions the partition is empirical.
pub fn classify(d: usize, n_ports: usize, k: usize, tolerance: f64) -> Result<ClassReport> {
    let subsets = label_subsets(d, k)?;
    let evaluated: Vec<(String, f64)> = subsets
        .par_iter()
        .map(|pairs| {
            let set = OutcomeSet::new(d, n_ports, pairs)?;
            let f = protocol::ent_fidelity_bruteforce(&set)?;
            Ok((set.descriptor(), f))
        })
        .collect::<Result<_>>()?;

    let mut sorted = evaluated;
    sorted.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("fidelities are finite"));

    let mut classes: Vec<FidelityClass> = Vec::new();
    let mut current: Vec<(String, f64)> = Vec::new();
    for (desc, f) in sorted {
        if let Some(&(_, last)) = current.last() {
            if f - last > tolerance {
                classes.push(finish_class(std::mem::take(&mut current)));
            }
        }
        current.push((desc, f));
    }
    if !current.is_empty() {
        classes.push(finish_class(current));
    }
    Ok(ClassReport {
        d,
        n_ports,
        subset_size: k,
        tolerance,
        classes,
    })
}

fn finish_class(mut members: Vec<(String, f64)>) -> FidelityClass {
    let lo = members.first().map(|m| m.1).unwrap_or(0.0);
    let hi = members.last().map(|m| m.1).unwrap_or(0.0);
    let mean = members.iter().map(|m| m.1).sum::<f64>() / members.len() as f64;
    members.sort_by(|a, b| a.0.cmp(&b.0));
    FidelityClass {
        fidelity: mean,
        spread: hi - lo,
        members: members.into_iter().map(|m| m.0).collect(),
    }
}

/// Least-squares fit of `a` in `F = 1 - 1/(aN)` by regressing `1/(1-F)`
/// against `N` through the origin. Points with `F >= 1` are excluded;
/// fewer than three usable points is an error.
pub fn fit_asymptote(series: &[(usize, f64)]) -> Result<f64> {
    let usable: Vec<(f64, f64)> = series
        .iter()
        .filter(|&&(_, f)| f < 1.0)
        .map(|&(n, f)| (n as f64, 1.0 / (1.0 - f)))
        .collect();
    if usable.len() < 3 {
        return Err(Error::usage(format!(
            "need at least 3 points below fidelity 1, have {}",
            usable.len()
        )));
    }
    let num: f64 = usable.iter().map(|(n, y)| n * y).sum();
    let den: f64 = usable.iter().map(|(n, _)| n * n).sum();
    Ok(num / den)
}

/// One sweep point: a protocol at a size, evaluated by one method.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub d: usize,
    pub n_ports: usize,
    pub family: SetFamily,
    pub method: Method,
}

/// Monte Carlo settings shared by a sweep.
#[derive(Debug, Clone, Copy)]
pub struct McSettings {
    pub samples: usize,
    pub seed: u64,
}

impl Default for McSettings {
    fn default() -> Self {
        McSettings {
            samples: 100_000,
            seed: DEFAULT_SEED,
        }
    }
}

/// Seed used when the caller does not override one; fixed so runs reproduce.
pub const DEFAULT_SEED: u64 = 7;

/// A failed sweep point, kept alongside the successful records.
#[derive(Debug, Clone)]
pub struct SweepError {
    pub d: usize,
    pub n_ports: usize,
    pub set: String,
    pub method: Method,
    pub error: Error,
}

/// Evaluates every point (in parallel), collecting per-point failures
/// instead of aborting. Points whose canonical label sets coincide are
/// evaluated once; records come back sorted by `(d, n, set, method)`.
pub fn sweep(points: &[SweepPoint], mc: McSettings) -> (Vec<FidelityRecord>, Vec<SweepError>) {
    let mut seen = std::collections::HashSet::new();
    let mut kept: Vec<(usize, &SweepPoint)> = Vec::new();
    for (idx, p) in points.iter().enumerate() {
        match OutcomeSet::family(&p.family, p.d, p.n_ports) {
            Ok(set) => {
                if seen.insert((p.d, p.n_ports, set.descriptor(), p.method)) {
                    kept.push((idx, p));
                }
            }
            // Invalid points are kept so the failure is reported.
            Err(_) => kept.push((idx, p)),
        }
    }
    let results: Vec<std::result::Result<FidelityRecord, SweepError>> = kept
        .par_iter()
        .map(|&(idx, p)| evaluate_point(p, idx, mc))
        .collect();
    let mut records = Vec::new();
    let mut errors = Vec::new();
    for r in results {
        match r {
            Ok(rec) => records.push(rec),
            Err(e) => errors.push(e),
        }
    }
    records.sort_by(|a, b| {
        (a.d, a.n_ports, &a.set, a.method).cmp(&(b.d, b.n_ports, &b.set, b.method))
    });
    (records, errors)
}

fn evaluate_point(
    point: &SweepPoint,
    index: usize,
    mc: McSettings,
) -> std::result::Result<FidelityRecord, SweepError> {
    let fail = |set: String, error: Error| SweepError {
        d: point.d,
        n_ports: point.n_ports,
        set,
        method: point.method,
        error,
    };
    let set = OutcomeSet::family(&point.family, point.d, point.n_ports)
        .map_err(|e| fail(format!("<{}>", point.family.tag()), e))?;
    let desc = set.descriptor();
    let (ent, tel) = match point.method {
        Method::BruteForce => {
            let f = protocol::ent_fidelity_bruteforce(&set).map_err(|e| fail(desc.clone(), e))?;
            (f, tel_fidelity(f, point.d))
        }
        Method::ClosedForm => {
            let f = closed_form_fidelity(&point.family, point.d, point.n_ports)
                .map_err(|e| fail(desc.clone(), e))?;
            (f, tel_fidelity(f, point.d))
        }
        Method::MonteCarlo => {
            // Independent stream per sweep point, derived from the base seed.
            let seed = mc.seed ^ (index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
            let est = protocol::tel_fidelity_monte_carlo(&set, mc.samples, seed)
                .map_err(|e| fail(desc.clone(), e))?;
            (ent_from_tel_fidelity(est.mean, point.d), est.mean)
        }
    };
    Ok(FidelityRecord {
        d: point.d,
        n_ports: point.n_ports,
        set: desc,
        method: point.method,
        ent_fidelity: ent,
        tel_fidelity: tel,
    })
}

/// Whether a family has a closed form at this dimension (without computing
/// anything).
pub fn has_closed_form(family: &SetFamily, d: usize) -> bool {
    match family {
        SetFamily::Pbt | SetFamily::Pbqct2 | SetFamily::Pbqct3 => d == 2,
        SetFamily::ParallelSt | SetFamily::GenPbqct2 => true,
        SetFamily::Custom(_) => false,
    }
}

/// Closed-form dispatch per family; families without one are a usage error.
pub fn closed_form_fidelity(family: &SetFamily, d: usize, n_ports: usize) -> Result<f64> {
    match family {
        SetFamily::Pbt => {
            if d != 2 {
                return Err(Error::usage(
                    "pbt closed form covers d = 2; use bruteforce for qudits",
                ));
            }
            Ok(closedform::pbt_fidelity(n_ports))
        }
        SetFamily::Pbqct2 => {
            if d != 2 {
                return Err(Error::usage("pbqct2 is a qubit family (d = 2)"));
            }
            Ok(closedform::pbqct2_fidelity(n_ports))
        }
        SetFamily::Pbqct3 => {
            if d != 2 {
                return Err(Error::usage("pbqct3 is a qubit family (d = 2)"));
            }
            Ok(closedform::pbqct3_fidelity(n_ports))
        }
        SetFamily::ParallelSt => Ok(1.0),
        SetFamily::GenPbqct2 => closedform::gen_pbqct2_fidelity(d, n_ports),
        SetFamily::Custom(_) => Err(Error::usage(
            "custom label sets have no closed form; use bruteforce",
        )),
    }
}
