//! Signal ensembles, square-root-measurement POVMs, and the end-to-end
//! teleportation channel with classical port selection plus quantum
//! correction.
//!
//! An [`OutcomeSet`] fixes the protocol: dimension `D`, port count `N`, and
//! the per-port set of generalized-Bell labels; the same set applies to
//! every port, so the ensembles are invariant under port permutations.
//! Outcome `(i; x, y)` is carried by the signal state
//! `g(i;x,y) = D^(1-N) |Psi(x,y)><Psi(x,y)|` on `(A0, A_i)`, identity
//! elsewhere; the measurement is the square-root measurement of the ensemble
//! completed by the uniform kernel term, and the receiver keeps port `B_i`
//! and applies the Weyl correction `W(x,y)`.

use crate::error::{Error, Result};
use crate::haar::HaarSampler;
use crate::linalg::{
    embed, herm_eig, kron, partial_trace, psd_inv_sqrt, psd_sqrt, DenseOperator,
    DEFAULT_KERNEL_TOL, DIM_CAP, HERMITICITY_TOL,
};
use crate::weyl::{bell_state, max_entangled_state, weyl_op, WeylIndex};
use crate::C64;
use std::f64::consts::TAU;

/// Named protocol families (canonical per-port label sets).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SetFamily {
    /// One label per port: `{(0,0)}`. No quantum correction needed.
    Pbt,
    /// Qubit two-label set `{Psi^0, Psi^3}` (labels `(0,0), (0,1)`).
    Pbqct2,
    /// Qubit three-label set `{Psi^0, Psi^1, Psi^3}`.
    Pbqct3,
    /// The complete generalized-Bell basis per port; acts as independent
    /// standard teleportations.
    ParallelSt,
    /// One shift row of the Bell basis, all phases: `{(0, y) : y}`. The
    /// signal sum is diagonal in the computational basis; equals `Pbqct2`
    /// at `D = 2`.
    GenPbqct2,
    /// Explicit label list.
    Custom(Vec<(usize, usize)>),
}

impl SetFamily {
    pub fn tag(&self) -> &'static str {
        match self {
            SetFamily::Pbt => "pbt",
            SetFamily::Pbqct2 => "pbqct2",
            SetFamily::Pbqct3 => "pbqct3",
            SetFamily::ParallelSt => "parallel-st",
            SetFamily::GenPbqct2 => "gen-pbqct2",
            SetFamily::Custom(_) => "custom",
        }
    }
}

/// Protocol descriptor: dimension, port count, and the per-port label set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutcomeSet {
    d: usize,
    n_ports: usize,
    per_port: Vec<(usize, usize)>,
}

impl OutcomeSet {
    /// Builds from an explicit label set; labels are deduplicated and kept in
    /// lexicographic order.
    pub fn new(d: usize, n_ports: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        if d < 2 {
            return Err(Error::usage(format!("dimension {d} must be at least 2")));
        }
        if n_ports < 1 {
            return Err(Error::usage("port count must be at least 1"));
        }
        if pairs.is_empty() {
            return Err(Error::usage("per-port label set must be nonempty"));
        }
        let mut per_port = pairs.to_vec();
        for &(x, y) in &per_port {
            if x >= d || y >= d {
                return Err(Error::usage(format!(
                    "label ({x},{y}) out of range for dimension {d}"
                )));
            }
        }
        per_port.sort_unstable();
        per_port.dedup();
        Ok(OutcomeSet {
            d,
            n_ports,
            per_port,
        })
    }

    pub fn family(family: &SetFamily, d: usize, n_ports: usize) -> Result<Self> {
        let pairs: Vec<(usize, usize)> = match family {
            SetFamily::Pbt => vec![(0, 0)],
            SetFamily::Pbqct2 => {
                if d != 2 {
                    return Err(Error::usage("pbqct2 is a qubit family (d = 2)"));
                }
                vec![(0, 0), (0, 1)]
            }
            SetFamily::Pbqct3 => {
                if d != 2 {
                    return Err(Error::usage("pbqct3 is a qubit family (d = 2)"));
                }
                vec![(0, 0), (1, 0), (0, 1)]
            }
            SetFamily::ParallelSt => (0..d).flat_map(|x| (0..d).map(move |y| (x, y))).collect(),
            SetFamily::GenPbqct2 => (0..d).map(|y| (0, y)).collect(),
            SetFamily::Custom(pairs) => pairs.clone(),
        };
        OutcomeSet::new(d, n_ports, &pairs)
    }

    /// Qubit sets from Bell labels `s` in {0,1,2,3}
    /// (0 -> (0,0), 1 -> (1,0), 2 -> (1,1), 3 -> (0,1)).
    pub fn from_bell_labels(n_ports: usize, labels: &[u8]) -> Result<Self> {
        let pairs: Vec<(usize, usize)> = labels
            .iter()
            .map(|&s| {
                let idx = crate::weyl::BellLabel::new(s)?.weyl_index();
                Ok((idx.shift, idx.phase))
            })
            .collect::<Result<_>>()?;
        OutcomeSet::new(2, n_ports, &pairs)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n_ports(&self) -> usize {
        self.n_ports
    }

    pub fn per_port(&self) -> &[(usize, usize)] {
        &self.per_port
    }

    pub fn per_port_size(&self) -> usize {
        self.per_port.len()
    }

    /// Total outcome count `N * |per-port set|`.
    pub fn outcome_count(&self) -> usize {
        self.n_ports * self.per_port.len()
    }

    /// The Bell-label view of a qubit set, when `d = 2`.
    pub fn bell_labels(&self) -> Option<Vec<u8>> {
        if self.d != 2 {
            return None;
        }
        let mut labels: Vec<u8> = self
            .per_port
            .iter()
            .map(|&(x, y)| match (x, y) {
                (0, 0) => 0,
                (1, 0) => 1,
                (1, 1) => 2,
                _ => 3,
            })
            .collect();
        labels.sort_unstable();
        Some(labels)
    }

    /// Canonical string for the label set: `x.y` pairs joined by `+`.
    pub fn descriptor(&self) -> String {
        self.per_port
            .iter()
            .map(|(x, y)| format!("{x}.{y}"))
            .collect::<Vec<_>>()
            .join("+")
    }

    /// Dimension of the measured space `D^(N+1)`, capacity-checked.
    pub fn measured_dim(&self) -> Result<usize> {
        checked_pow(self.d, self.n_ports + 1)
    }

    /// Outcomes in deterministic order: ports ascending, labels lex.
    pub fn outcomes(&self) -> impl Iterator<Item = (usize, (usize, usize))> + '_ {
        (1..=self.n_ports).flat_map(move |i| self.per_port.iter().map(move |&p| (i, p)))
    }
}

fn checked_pow(base: usize, exp: usize) -> Result<usize> {
    let mut acc: usize = 1;
    for _ in 0..exp {
        acc = acc
            .checked_mul(base)
            .filter(|&x| x <= DIM_CAP)
            .ok_or(Error::Capacity {
                required: usize::MAX,
                cap: DIM_CAP,
            })?;
    }
    Ok(acc)
}

fn omega(d: usize, k: usize) -> C64 {
    let angle = TAU * (k % d) as f64 / d as f64;
    C64::new(angle.cos(), angle.sin())
}

/// Signal state `g(i; x, y)` on the `N+1` factors `A_0, A_1 .. A_N`:
/// the Bell projector `(x,y)` on `(A_0, A_i)` times identity, weighted
/// `D^(1-N)` so that the trace is 1.
pub fn signal_state(set: &OutcomeSet, port: usize, pair: (usize, usize)) -> Result<DenseOperator> {
    check_outcome(set, port, pair)?;
    set.measured_dim()?;
    let d = set.d();
    let space = vec![d; set.n_ports() + 1];
    let proj = bell_state(WeylIndex::new(d, pair.0, pair.1)?).projector();
    let weight = 1.0 / (d as f64).powi(set.n_ports() as i32 - 1);
    Ok(embed(&proj, &[0, port], &space)?.scale(C64::new(weight, 0.0)))
}

fn check_outcome(set: &OutcomeSet, port: usize, pair: (usize, usize)) -> Result<()> {
    if port < 1 || port > set.n_ports() {
        return Err(Error::usage(format!(
            "port {port} out of range 1..={}",
            set.n_ports()
        )));
    }
    if !set.per_port().contains(&pair) {
        return Err(Error::usage(format!(
            "label ({},{}) is not in the per-port set",
            pair.0, pair.1
        )));
    }
    Ok(())
}

/// Signal sum operator `G = sum of all signal states`; Hermitian PSD with
/// trace equal to the outcome count.
pub fn signal_sum(set: &OutcomeSet) -> Result<DenseOperator> {
    let dim = set.measured_dim()?;
    let mut g = DenseOperator::zeros(dim).into_factored(vec![set.d(); set.n_ports() + 1])?;
    for (port, pair) in set.outcomes() {
        g.add_assign(&signal_state(set, port, pair)?)?;
    }
    Ok(g)
}

/// The sparse column structure of a signal state: `g = w * sum_k |c_k><c_k|`
/// where each `|c_k>` is the Bell state on `(A_0, A_i)` tensored with a basis
/// state of the remaining factors, so `D` nonzero amplitudes per column.
fn signal_columns(set: &OutcomeSet, port: usize, pair: (usize, usize)) -> Vec<Vec<(usize, C64)>> {
    let d = set.d();
    let n = set.n_ports();
    let n_factors = n + 1;
    // Row-major strides over [d; n+1].
    let mut strides = vec![1usize; n_factors];
    for i in (0..n_factors - 1).rev() {
        strides[i] = strides[i + 1] * d;
    }
    let others: Vec<usize> = (1..=n).filter(|&i| i != port).collect();
    let comp_count = d.pow(others.len() as u32);
    let inv = 1.0 / (d as f64).sqrt();
    let mut cols = Vec::with_capacity(comp_count);
    for k in 0..comp_count {
        // Decode k into digits over the spectator factors (most significant
        // first) to get the base index of this column.
        let mut base = 0usize;
        let mut rem = k;
        for (slot, &f) in others.iter().enumerate() {
            let place = d.pow((others.len() - 1 - slot) as u32);
            let digit = rem / place;
            rem %= place;
            base += digit * strides[f];
        }
        let mut col = Vec::with_capacity(d);
        for j in 0..d {
            let row0 = (j + d - pair.0) % d;
            let idx = base + row0 * strides[0] + j * strides[port];
            col.push((idx, omega(d, (j * pair.1) % d) * inv));
        }
        cols.push(col);
    }
    cols
}

/// POVM of the protocol: the square-root-measurement elements completed by
/// the uniform kernel term.
pub struct Povm {
    pub elements: Vec<PovmElement>,
    /// Kernel completion `(I - sum of SRM elements) / |outcomes|`, already
    /// folded into every element.
    pub delta: DenseOperator,
}

pub struct PovmElement {
    pub port: usize,
    pub label: (usize, usize),
    pub op: DenseOperator,
}

/// Builds the POVM: `Pi(m) = G^(-1/2) g(m) G^(-1/2) + Delta` with
/// `Delta = (I - sum SRM) / |outcomes|`. Elements sum to the identity;
/// `Tr[g(m) Delta] = 0` because `Delta` lives on the kernel of `G`.
pub fn build_povm(set: &OutcomeSet) -> Result<Povm> {
    let dim = set.measured_dim()?;
    let g = signal_sum(set)?;
    let h = psd_inv_sqrt(&g, DEFAULT_KERNEL_TOL)?;
    let weight = 1.0 / (set.d() as f64).powi(set.n_ports() as i32 - 1);

    let mut srm: Vec<(usize, (usize, usize), DenseOperator)> = Vec::new();
    let mut total = DenseOperator::zeros(dim);
    for (port, pair) in set.outcomes() {
        let cols = signal_columns(set, port, pair);
        let mut sigma = DenseOperator::zeros(dim);
        for col in &cols {
            // v = H c (c has D nonzeros).
            let mut v = vec![C64::ZERO; dim];
            for &(idx, amp) in col {
                for (row, out) in v.iter_mut().enumerate() {
                    *out += h.entry(row, idx) * amp;
                }
            }
            let data = sigma.data_mut();
            for (r, vr) in v.iter().enumerate() {
                if *vr == C64::ZERO {
                    continue;
                }
                let row = &mut data[r * dim..(r + 1) * dim];
                for (c, vc) in v.iter().enumerate() {
                    row[c] += vr * vc.conj();
                }
            }
        }
        let sigma = sigma.scale(C64::new(weight, 0.0));
        total.add_assign(&sigma)?;
        srm.push((port, pair, sigma));
    }

    let mut delta = DenseOperator::identity(dim)
        .sub(&total)?
        .scale(C64::new(1.0 / set.outcome_count() as f64, 0.0));
    // For full-rank signal sums the completion is exactly zero; sweep out the
    // eigensolver dust so PSD checks stay clean.
    for z in delta.data_mut() {
        if z.norm() < 1e-12 {
            *z = C64::ZERO;
        }
    }

    let factors = vec![set.d(); set.n_ports() + 1];
    let elements = srm
        .into_iter()
        .map(|(port, label, sigma)| {
            Ok(PovmElement {
                port,
                label,
                op: sigma.add(&delta)?.into_factored(factors.clone())?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Povm {
        elements,
        delta: delta.into_factored(factors)?,
    })
}

/// Entanglement fidelity of the protocol by the brute-force trace formula:
/// `F = D^(-2) * sum over outcomes of Tr[G^(-1/2) g(m) G^(-1/2) g(m)]`.
pub fn ent_fidelity_bruteforce(set: &OutcomeSet) -> Result<f64> {
    Ok(ent_fidelity_terms(set)?.0)
}

/// Per-outcome fidelity contribution: `(port, label, value)`.
pub type OutcomeTerm = (usize, (usize, usize), f64);

/// Same computation, also returning the per-outcome contributions (the trace
/// terms already carrying the global `D^(-2)` prefactor).
pub fn ent_fidelity_terms(set: &OutcomeSet) -> Result<(f64, Vec<OutcomeTerm>)> {
    let g = signal_sum(set)?;
    let h = psd_inv_sqrt(&g, DEFAULT_KERNEL_TOL)?;
    let d = set.d();
    let n = set.n_ports();
    let dim = h.dim();
    let hdata = h.data();
    // Tr[H g H g] = w^2 * sum_{k,l} |<c_k|H|c_l>|^2 with w = D^(1-N).
    let col_weight = 1.0 / (d as f64).powi(2 * (n as i32 - 1));
    let prefactor = 1.0 / (d as f64 * d as f64);
    let mut total = 0.0;
    let mut terms = Vec::new();
    for (port, pair) in set.outcomes() {
        let cols = signal_columns(set, port, pair);
        let mut acc = 0.0;
        for ck in &cols {
            for cl in &cols {
                let mut m = C64::ZERO;
                for &(ik, ak) in ck {
                    let row = &hdata[ik * dim..(ik + 1) * dim];
                    for &(il, al) in cl {
                        m += ak.conj() * row[il] * al;
                    }
                }
                acc += m.norm_sqr();
            }
        }
        let term = prefactor * col_weight * acc;
        total += term;
        terms.push((port, pair, term));
    }
    Ok((total, terms))
}

/// Teleportation fidelity from entanglement fidelity: `f = (F D + 1)/(D + 1)`.
pub fn tel_fidelity(ent_fidelity: f64, d: usize) -> f64 {
    (ent_fidelity * d as f64 + 1.0) / (d as f64 + 1.0)
}

/// Entanglement fidelity back from teleportation fidelity.
pub fn ent_from_tel_fidelity(tel_fidelity: f64, d: usize) -> f64 {
    (tel_fidelity * (d as f64 + 1.0) - 1.0) / d as f64
}

/// Classical decoding for outcome `(i; x, y)`: select port `B_i` from the
/// receiver's register and conjugate by the correction `W(x,y)`.
pub fn decode(
    set: &OutcomeSet,
    port: usize,
    pair: (usize, usize),
    ports_state: &DenseOperator,
) -> Result<DenseOperator> {
    check_outcome(set, port, pair)?;
    let expected: Vec<usize> = vec![set.d(); set.n_ports()];
    match ports_state.factors() {
        Some(f) if f == expected.as_slice() => {}
        _ => {
            return Err(Error::usage(
                "receiver state must carry one factor of dimension D per port",
            ))
        }
    }
    let selected = partial_trace(ports_state, &[port - 1])?;
    let w = weyl_op(WeylIndex::new(set.d(), pair.0, pair.1)?);
    selected.conjugate_by(&w)
}

/// Channel output: the decoded density operator and the per-outcome weights.
pub struct ChannelResult {
    /// Decoded state on one `D`-dimensional system (tensored with the
    /// reference when one is attached).
    pub output: DenseOperator,
    pub weights: Vec<OutcomeWeight>,
}

pub struct OutcomeWeight {
    pub port: usize,
    pub label: (usize, usize),
    pub weight: f64,
}

/// Measurement and decoding machinery reusable across channel inputs:
/// square roots of the POVM elements plus the per-outcome corrections.
pub struct PreparedChannel {
    d: usize,
    n_ports: usize,
    d_ref: usize,
    outcomes: Vec<(usize, (usize, usize))>,
    sqrt_elements: Vec<DenseOperator>,
    corrections: Vec<DenseOperator>,
}

impl PreparedChannel {
    /// `d_ref` is the dimension of a bystander reference system the channel
    /// acts trivially on (1 for none).
    pub fn new(set: &OutcomeSet, d_ref: usize) -> Result<Self> {
        let d = set.d();
        let n = set.n_ports();
        let d_a = set.measured_dim()?;
        let d_b = checked_pow(d, n)?;
        // The joint vector lives on sender x receiver x reference.
        d_a.checked_mul(d_b)
            .and_then(|x| x.checked_mul(d_ref))
            .filter(|&x| x <= DIM_CAP)
            .ok_or(Error::Capacity {
                required: usize::MAX,
                cap: DIM_CAP,
            })?;
        let povm = build_povm(set)?;
        let ref_id = DenseOperator::identity(d_ref);
        let mut outcomes = Vec::new();
        let mut sqrt_elements = Vec::new();
        let mut corrections = Vec::new();
        for el in &povm.elements {
            outcomes.push((el.port, el.label));
            sqrt_elements.push(psd_sqrt(&el.op)?);
            let w = weyl_op(WeylIndex::new(d, el.label.0, el.label.1)?);
            corrections.push(kron(&w, &ref_id)?);
        }
        Ok(PreparedChannel {
            d,
            n_ports: n,
            d_ref,
            outcomes,
            sqrt_elements,
            corrections,
        })
    }

    /// Applies the channel to the pure input `|phi>` on (input qudit x
    /// reference). Returns the *unnormalized-by-outcome but total-trace-1*
    /// decoded state and the per-outcome weights.
    pub fn apply_pure(&self, phi: &[C64]) -> Result<(DenseOperator, Vec<OutcomeWeight>)> {
        let d = self.d;
        let n = self.n_ports;
        let d_r = self.d_ref;
        if phi.len() != d * d_r {
            return Err(Error::DimensionMismatch {
                expected: d * d_r,
                got: phi.len(),
            });
        }
        let d_a = d.pow(n as u32 + 1);
        let d_b = d.pow(n as u32);
        let w_dim = d_b * d_r;
        let inv_sqrt_ports = 1.0 / (d_b as f64).sqrt();

        let mut output = DenseOperator::zeros(d * d_r);
        let mut weights = Vec::with_capacity(self.outcomes.len());
        let mut u = vec![C64::ZERO; d_a * w_dim];
        for (idx, &(port, label)) in self.outcomes.iter().enumerate() {
            let s = &self.sqrt_elements[idx];
            // u[(a, v, r)] = sum_{a0} sqrtPi[a, (a0, v)] phi[(a0, r)] / sqrt(D^N):
            // the resource projects the port block of the sender onto the
            // receiver's basis label v.
            u.iter_mut().for_each(|z| *z = C64::ZERO);
            for a in 0..d_a {
                let srow = s.data();
                let srow = &srow[a * d_a..(a + 1) * d_a];
                let urow = &mut u[a * w_dim..(a + 1) * w_dim];
                for a0 in 0..d {
                    let block = &srow[a0 * d_b..(a0 + 1) * d_b];
                    for (v, &sval) in block.iter().enumerate() {
                        if sval == C64::ZERO {
                            continue;
                        }
                        for r in 0..d_r {
                            urow[v * d_r + r] += sval * phi[a0 * d_r + r];
                        }
                    }
                }
            }
            for z in u.iter_mut() {
                *z *= inv_sqrt_ports;
            }
            // rho on (B-ports x reference) = Tr over the measured block.
            let mut rho = vec![C64::ZERO; w_dim * w_dim];
            for a in 0..d_a {
                let urow = &u[a * w_dim..(a + 1) * w_dim];
                for (wr, uw) in urow.iter().enumerate() {
                    if *uw == C64::ZERO {
                        continue;
                    }
                    let val = *uw;
                    let out_row = &mut rho[wr * w_dim..(wr + 1) * w_dim];
                    for (wc, uc) in urow.iter().enumerate() {
                        out_row[wc] += val * uc.conj();
                    }
                }
            }
            let mut rho =
                DenseOperator::from_rows(w_dim, rho)?.into_factored(port_ref_factors(d, n, d_r))?;
            let weight = rho.trace().re;
            weights.push(OutcomeWeight {
                port,
                label,
                weight,
            });
            // Select the announced port, keep the reference, correct.
            rho = partial_trace(&rho, &[port - 1, n])?;
            let corrected = rho.conjugate_by(&self.corrections[idx])?;
            output.add_assign(&corrected)?;
        }
        let output = output.into_factored(vec![d, d_r])?;
        Ok((output, weights))
    }
}

fn port_ref_factors(d: usize, n: usize, d_ref: usize) -> Vec<usize> {
    let mut f = vec![d; n];
    f.push(d_ref);
    f
}

/// The full teleportation channel applied to a density operator on the
/// `D`-dimensional input. Output is trace-1; per-outcome weights sum to 1.
pub fn teleport_channel(set: &OutcomeSet, rho: &DenseOperator) -> Result<ChannelResult> {
    if rho.dim() != set.d() {
        return Err(Error::DimensionMismatch {
            expected: set.d(),
            got: rho.dim(),
        });
    }
    if !rho.is_hermitian(HERMITICITY_TOL) {
        return Err(Error::domain("input state is not Hermitian"));
    }
    if (rho.trace().re - 1.0).abs() > 1e-8 {
        return Err(Error::domain("input state does not have unit trace"));
    }
    let prepared = PreparedChannel::new(set, 1)?;
    apply_prepared(&prepared, set, rho)
}

fn apply_prepared(
    prepared: &PreparedChannel,
    set: &OutcomeSet,
    rho: &DenseOperator,
) -> Result<ChannelResult> {
    let eig = herm_eig(rho)?;
    let mut output = DenseOperator::zeros(set.d() * prepared.d_ref);
    let mut weights: Vec<OutcomeWeight> = prepared
        .outcomes
        .iter()
        .map(|&(port, label)| OutcomeWeight {
            port,
            label,
            weight: 0.0,
        })
        .collect();
    for (k, &lambda) in eig.values.iter().enumerate() {
        if lambda <= 1e-14 {
            continue;
        }
        let phi: Vec<C64> = (0..rho.dim()).map(|r| eig.vectors.entry(r, k)).collect();
        let (out_k, w_k) = prepared.apply_pure(&phi)?;
        output.add_assign(&out_k.scale(C64::new(lambda, 0.0)))?;
        for (acc, w) in weights.iter_mut().zip(&w_k) {
            acc.weight += lambda * w.weight;
        }
    }
    let output = if prepared.d_ref == 1 {
        output.into_factored(vec![set.d()])?
    } else {
        output.into_factored(vec![set.d(), prepared.d_ref])?
    };
    Ok(ChannelResult { output, weights })
}

/// Entanglement fidelity evaluated on the assembled channel: feed half of a
/// maximally entangled pair through the channel and project back. Agrees
/// with [`ent_fidelity_bruteforce`]; that equality is what licenses the
/// trace formula.
pub fn ent_fidelity_via_channel(set: &OutcomeSet) -> Result<f64> {
    let d = set.d();
    let prepared = PreparedChannel::new(set, d)?;
    let pair = max_entangled_state(d)?;
    let (out, _) = prepared.apply_pure(pair.amplitudes())?;
    let v = out.apply(pair.amplitudes())?;
    let f: C64 = pair
        .amplitudes()
        .iter()
        .zip(&v)
        .map(|(a, b)| a.conj() * b)
        .sum();
    Ok(f.re)
}

/// Monte Carlo estimate of the teleportation fidelity.
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

/// Averages `<phi| channel(phi) |phi>` over seeded Haar-random pure inputs.
/// Deterministic in `(set, samples, seed)`.
pub fn tel_fidelity_monte_carlo(set: &OutcomeSet, samples: usize, seed: u64) -> Result<McEstimate> {
    if samples == 0 {
        return Err(Error::usage("sample count must be at least 1"));
    }
    let prepared = PreparedChannel::new(set, 1)?;
    let mut sampler = HaarSampler::new(seed);
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for k in 0..samples {
        let phi = sampler.state(set.d())?;
        let (out, _) = prepared.apply_pure(phi.amplitudes())?;
        let v = out.apply(phi.amplitudes())?;
        let f: C64 = phi
            .amplitudes()
            .iter()
            .zip(&v)
            .map(|(a, b)| a.conj() * b)
            .sum();
        let x = f.re;
        let delta = x - mean;
        mean += delta / (k as f64 + 1.0);
        m2 += delta * (x - mean);
    }
    let std_error = if samples > 1 {
        (m2 / (samples as f64 - 1.0) / samples as f64).sqrt()
    } else {
        0.0
    };
    Ok(McEstimate {
        mean,
        std_error,
        samples,
    })
}

fn check_distance_args(d: usize, n_ports: usize, p_size: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::usage(format!("dimension {d} must be at least 2")));
    }
    if n_ports < 1 {
        return Err(Error::usage("port count must be at least 1"));
    }
    if p_size < 1 || p_size > d * d {
        return Err(Error::usage(format!(
            "per-port set size {p_size} out of range 1..={}",
            d * d
        )));
    }
    Ok(())
}

/// Squared Hilbert-Schmidt distance between the signal sum and `alpha * I`
/// for a per-port set of the given size (the value is size-only: label
/// choices do not enter):
/// `|m|/D^(N+1) * (D^2 + |m| - |m|/N) - 2 alpha |m| + alpha^2 D^(N+1)`.
pub fn signal_distance(d: usize, n_ports: usize, p_size: usize, alpha: f64) -> Result<f64> {
    check_distance_args(d, n_ports, p_size)?;
    let m = (n_ports * p_size) as f64;
    let dp = (d as f64).powi(n_ports as i32 + 1);
    let d2 = (d * d) as f64;
    Ok(m / dp * (d2 + m - m / n_ports as f64) - 2.0 * alpha * m + alpha * alpha * dp)
}

/// Minimizer and minimum of [`signal_distance`] over `alpha`:
/// `alpha* = |m| / D^(N+1)`, minimum `(N / D^(N+1)) (D^2 - |p|) |p|`.
pub fn signal_distance_min(d: usize, n_ports: usize, p_size: usize) -> Result<(f64, f64)> {
    check_distance_args(d, n_ports, p_size)?;
    let m = (n_ports * p_size) as f64;
    let dp = (d as f64).powi(n_ports as i32 + 1);
    let alpha_star = m / dp;
    let minimum = n_ports as f64 / dp * ((d * d - p_size) * p_size) as f64;
    Ok((alpha_star, minimum))
}

/// Direct numeric `Tr[(G - alpha I)(G - alpha I)†]` for the canonical set of
/// the given size (the first `p_size` labels in lexicographic order).
pub fn signal_distance_numeric(d: usize, n_ports: usize, p_size: usize, alpha: f64) -> Result<f64> {
    check_distance_args(d, n_ports, p_size)?;
    let pairs: Vec<(usize, usize)> = (0..d)
        .flat_map(|x| (0..d).map(move |y| (x, y)))
        .take(p_size)
        .collect();
    let set = OutcomeSet::new(d, n_ports, &pairs)?;
    let g = signal_sum(&set)?;
    let shifted = g.sub(&DenseOperator::identity(g.dim()).scale(C64::new(alpha, 0.0)))?;
    let norm = shifted.frobenius_norm();
    Ok(norm * norm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{permute_factors, StateVector};
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn dense_trace_route(set: &OutcomeSet) -> f64 {
        // Literal Tr[H g H g] with dense products, for cross-checking the
        // sparse-column evaluation.
        let g = signal_sum(set).unwrap();
        let h = psd_inv_sqrt(&g, DEFAULT_KERNEL_TOL).unwrap();
        let mut total = 0.0;
        for (port, pair) in set.outcomes() {
            let gm = signal_state(set, port, pair).unwrap();
            let prod = h.mul(&gm).unwrap().mul(&h).unwrap().mul(&gm).unwrap();
            total += prod.trace().re;
        }
        total / (set.d() * set.d()) as f64
    }

    #[test]
    fn outcome_set_canonicalizes() {
        let set = OutcomeSet::new(2, 2, &[(0, 1), (0, 0), (0, 1)]).unwrap();
        assert_eq!(set.per_port(), &[(0, 0), (0, 1)]);
        assert_eq!(set.descriptor(), "0.0+0.1");
        assert_eq!(set.outcome_count(), 4);
        assert_eq!(set.bell_labels(), Some(vec![0, 3]));
    }

    #[test]
    fn family_sets() {
        let pbt = OutcomeSet::family(&SetFamily::Pbt, 3, 2).unwrap();
        assert_eq!(pbt.per_port(), &[(0, 0)]);
        let full = OutcomeSet::family(&SetFamily::ParallelSt, 2, 1).unwrap();
        assert_eq!(full.per_port_size(), 4);
        let gen = OutcomeSet::family(&SetFamily::GenPbqct2, 3, 1).unwrap();
        assert_eq!(gen.per_port(), &[(0, 0), (0, 1), (0, 2)]);
        let q2 = OutcomeSet::family(&SetFamily::Pbqct2, 2, 4).unwrap();
        let gen2 = OutcomeSet::family(&SetFamily::GenPbqct2, 2, 4).unwrap();
        assert_eq!(q2, gen2);
        assert!(OutcomeSet::family(&SetFamily::Pbqct2, 3, 1).is_err());
    }

    #[test]
    fn signal_state_single_port_is_bell_projector() {
        let set = OutcomeSet::new(2, 1, &[(1, 0)]).unwrap();
        let g = signal_state(&set, 1, (1, 0)).unwrap();
        let expected = bell_state(WeylIndex::new(2, 1, 0).unwrap()).projector();
        assert!(g.max_abs_diff(&expected) < 1e-14);
    }

    #[test]
    fn signal_state_has_trace_one_and_expected_rank() {
        let set = OutcomeSet::new(2, 2, &[(0, 0)]).unwrap();
        let g = signal_state(&set, 1, (0, 0)).unwrap();
        assert_relative_eq!(g.trace().re, 1.0, epsilon = 1e-12);
        let eig = herm_eig(&g).unwrap();
        assert_relative_eq!(eig.values[0], 0.5, epsilon = 1e-12);
        assert_relative_eq!(eig.values[1], 0.5, epsilon = 1e-12);
        assert!(eig.values[2].abs() < 1e-12);
    }

    #[test]
    fn signal_state_spectators_trace_to_bell_projector() {
        // Tracing out everything but (A0, A_i) leaves exactly the Bell
        // projector: the D^(1-N) weight cancels the spectator dimension.
        let set = OutcomeSet::from_bell_labels(3, &[0, 3]).unwrap();
        let g = signal_state(&set, 1, (0, 0)).unwrap();
        let reduced = partial_trace(&g, &[0, 1]).unwrap();
        let bell = bell_state(WeylIndex::new(2, 0, 0).unwrap()).projector();
        assert!(reduced.max_abs_diff(&bell) < 1e-12);
    }

    #[test]
    fn signal_states_pairwise_traces() {
        // Tr[g g'] = delta(labels) / 2^(N-1) on the same port (qubits).
        let set = OutcomeSet::from_bell_labels(3, &[0, 1, 3]).unwrap();
        let n = set.n_ports();
        for &a in set.per_port() {
            for &b in set.per_port() {
                let ga = signal_state(&set, 1, a).unwrap();
                let gb = signal_state(&set, 1, b).unwrap();
                let t = ga.mul(&gb).unwrap().trace().re;
                let expected = if a == b {
                    1.0 / 2f64.powi(n as i32 - 1)
                } else {
                    0.0
                };
                assert_relative_eq!(t, expected, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn signal_sum_full_set_is_scaled_identity() {
        for (d, n) in [(2usize, 2usize), (2, 3), (3, 2)] {
            let set = OutcomeSet::family(&SetFamily::ParallelSt, d, n).unwrap();
            let g = signal_sum(&set).unwrap();
            let scale = n as f64 / (d as f64).powi(n as i32 - 1);
            let expected = DenseOperator::identity(g.dim()).scale(c(scale, 0.0));
            assert!(g.max_abs_diff(&expected) < 1e-12);
        }
    }

    #[test]
    fn signal_sum_trace_counts_outcomes() {
        let set = OutcomeSet::from_bell_labels(3, &[0, 3]).unwrap();
        let g = signal_sum(&set).unwrap();
        assert_relative_eq!(g.trace().re, set.outcome_count() as f64, epsilon = 1e-10);
    }

    #[test]
    fn pbqct2_signal_sum_spectrum_n2() {
        // Eigenvalues {1, 1/2, 0} with multiplicities {2, 4, 2}; the trace
        // must come out to the outcome count 4.
        let set = OutcomeSet::from_bell_labels(2, &[0, 3]).unwrap();
        let g = signal_sum(&set).unwrap();
        let eig = herm_eig(&g).unwrap();
        let mut counts = [0usize; 3];
        for &v in &eig.values {
            if (v - 1.0).abs() < 1e-10 {
                counts[0] += 1;
            } else if (v - 0.5).abs() < 1e-10 {
                counts[1] += 1;
            } else if v.abs() < 1e-10 {
                counts[2] += 1;
            } else {
                panic!("unexpected eigenvalue {v}");
            }
        }
        assert_eq!(counts, [2, 4, 2]);
    }

    #[test]
    fn pbqct2_signal_sum_diagonal_formula() {
        // G is diagonal in the computational basis with eigenvalue
        // 2^(-N) (N + (1-2 z0) sum_i (1-2 z_i)) at |z0; z>.
        let n = 3;
        let set = OutcomeSet::from_bell_labels(n, &[0, 3]).unwrap();
        let g = signal_sum(&set).unwrap();
        let dim = g.dim();
        for row in 0..dim {
            for col in 0..dim {
                if row != col {
                    assert!(g.entry(row, col).norm() < 1e-12);
                    continue;
                }
                let bits: Vec<i32> = (0..=n).map(|f| ((row >> (n - f)) & 1) as i32).collect();
                let z0 = bits[0];
                let s: i32 = bits[1..].iter().map(|&z| 1 - 2 * z).sum();
                let expected = (n as f64 + ((1 - 2 * z0) * s) as f64) / 2f64.powi(n as i32);
                assert_relative_eq!(g.entry(row, col).re, expected, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn pbqct3_signal_sum_complements_singlet_ensemble() {
        // G{0,1,3} = (N / 2^(N-1)) I - G{2}.
        let n = 3;
        let set = OutcomeSet::from_bell_labels(n, &[0, 1, 3]).unwrap();
        let g = signal_sum(&set).unwrap();
        let singlet = OutcomeSet::from_bell_labels(n, &[2]).unwrap();
        let g1 = signal_sum(&singlet).unwrap();
        let scale = n as f64 / 2f64.powi(n as i32 - 1);
        let expected = DenseOperator::identity(g.dim())
            .scale(c(scale, 0.0))
            .sub(&g1)
            .unwrap();
        assert!(g.max_abs_diff(&expected) < 1e-12);
    }

    #[test]
    fn povm_full_set_elements_are_scaled_signals() {
        let n = 2;
        let set = OutcomeSet::family(&SetFamily::ParallelSt, 2, n).unwrap();
        let povm = build_povm(&set).unwrap();
        assert!(povm.delta.max_abs_entry() < 1e-12);
        for el in &povm.elements {
            let g = signal_state(&set, el.port, el.label).unwrap();
            let expected = g.scale(c(2f64.powi(n as i32 - 1) / n as f64, 0.0));
            assert!(el.op.max_abs_diff(&expected) < 1e-10);
        }
    }

    #[test]
    fn povm_completeness_and_kernel_orthogonality() {
        for set in [
            OutcomeSet::from_bell_labels(2, &[0, 3]).unwrap(),
            OutcomeSet::from_bell_labels(2, &[0, 1, 3]).unwrap(),
            OutcomeSet::family(&SetFamily::Pbt, 3, 2).unwrap(),
            OutcomeSet::family(&SetFamily::GenPbqct2, 3, 2).unwrap(),
        ] {
            let povm = build_povm(&set).unwrap();
            let dim = povm.delta.dim();
            let mut total = DenseOperator::zeros(dim);
            for el in &povm.elements {
                total.add_assign(&el.op).unwrap();
            }
            assert!(
                total.max_abs_diff(&DenseOperator::identity(dim)) < 1e-10,
                "set {}",
                set.descriptor()
            );
            for el in &povm.elements {
                let g = signal_state(&set, el.port, el.label).unwrap();
                let overlap = g.mul(&povm.delta).unwrap().trace().norm();
                assert!(overlap < 1e-12);
            }
        }
    }

    #[test]
    fn pbqct2_delta_is_scaled_two_dim_projector() {
        let n = 3;
        let set = OutcomeSet::from_bell_labels(n, &[0, 3]).unwrap();
        let povm = build_povm(&set).unwrap();
        let dim = 1 << (n + 1);
        // Kernel basis: |0; 1..1> and |1; 0..0>.
        let k0 = (1 << n) - 1; // 0 followed by all ones
        let k1 = 1 << n; // 1 followed by zeros
        let mut expected = DenseOperator::zeros(dim);
        let w = 1.0 / set.outcome_count() as f64;
        expected.set_entry(k0, k0, c(w, 0.0));
        expected.set_entry(k1, k1, c(w, 0.0));
        assert!(povm.delta.max_abs_diff(&expected) < 1e-10);
    }

    #[test]
    fn pbqct2_povm_block_structure() {
        // Pi(1,s) - Delta = sum_n |Psi^s(n)><Psi^s(n)| (x) I(n) with
        // |Psi^(0/3)(n)> = (|00>/sqrt(N-n) ± |11>/sqrt(1+n))/sqrt(2),
        // blocks labeled by the number of ones among the spectator qubits.
        let n = 3usize;
        let set = OutcomeSet::from_bell_labels(n, &[0, 3]).unwrap();
        let povm = build_povm(&set).unwrap();
        for (label, sign) in [((0usize, 0usize), 1.0), ((0, 1), -1.0)] {
            let el = povm
                .elements
                .iter()
                .find(|e| e.port == 1 && e.label == label)
                .unwrap();
            let sigma = el.op.sub(&povm.delta).unwrap();
            let dim = 1 << (n + 1);
            let mut expected = DenseOperator::zeros(dim);
            let rest = 1 << (n - 1);
            for k in 0..rest {
                let ones = (k as u32).count_ones() as usize;
                let a00 = 1.0 / (2.0 * (n - ones) as f64).sqrt();
                let a11 = sign / (2.0 * (1 + ones) as f64).sqrt();
                // Full indices of |z0 z1 k>: |00 k> and |11 k>.
                let i00 = k;
                let i11 = (1 << n) + (1 << (n - 1)) + k;
                let pairs = [(i00, a00), (i11, a11)];
                for (ia, va) in pairs {
                    for (ib, vb) in pairs {
                        let prev = expected.entry(ia, ib);
                        expected.set_entry(ia, ib, prev + c(va * vb, 0.0));
                    }
                }
            }
            assert!(
                sigma.max_abs_diff(&expected) < 1e-10,
                "label {label:?}: diff {}",
                sigma.max_abs_diff(&expected)
            );
        }
    }

    #[test]
    fn brute_force_fidelity_reference_points() {
        let full = OutcomeSet::family(&SetFamily::ParallelSt, 2, 2).unwrap();
        assert_relative_eq!(
            ent_fidelity_bruteforce(&full).unwrap(),
            1.0,
            epsilon = 1e-10
        );

        let pbt1 = OutcomeSet::family(&SetFamily::Pbt, 2, 1).unwrap();
        assert_relative_eq!(
            ent_fidelity_bruteforce(&pbt1).unwrap(),
            0.25,
            epsilon = 1e-12
        );

        let q2 = OutcomeSet::from_bell_labels(1, &[0, 3]).unwrap();
        assert_relative_eq!(ent_fidelity_bruteforce(&q2).unwrap(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn sparse_trace_matches_dense_route() {
        for set in [
            OutcomeSet::from_bell_labels(2, &[0, 3]).unwrap(),
            OutcomeSet::from_bell_labels(3, &[0, 1, 3]).unwrap(),
            OutcomeSet::family(&SetFamily::GenPbqct2, 3, 2).unwrap(),
            OutcomeSet::new(3, 2, &[(1, 2), (2, 0), (0, 1)]).unwrap(),
        ] {
            let fast = ent_fidelity_bruteforce(&set).unwrap();
            let dense = dense_trace_route(&set);
            assert_relative_eq!(fast, dense, epsilon = 1e-11);
        }
    }

    #[test]
    fn per_port_contributions_equal() {
        let set = OutcomeSet::from_bell_labels(3, &[0, 3]).unwrap();
        let (_, terms) = ent_fidelity_terms(&set).unwrap();
        let mut per_port = vec![0.0; set.n_ports()];
        for (port, _, t) in &terms {
            per_port[port - 1] += t;
        }
        for p in &per_port[1..] {
            assert_relative_eq!(*p, per_port[0], epsilon = 1e-12);
        }
    }

    #[test]
    fn fidelity_invariant_under_factor_relabeling() {
        // Permuting the port factors of every signal state relabels the
        // ensemble; the fidelity must not move.
        let set = OutcomeSet::new(2, 3, &[(0, 0), (1, 1)]).unwrap();
        let perm = [0usize, 2, 3, 1]; // A0 fixed, ports cycled
        let mut g = DenseOperator::zeros(1 << 4)
            .into_factored(vec![2; 4])
            .unwrap();
        let mut signals = Vec::new();
        for (port, pair) in set.outcomes() {
            let s = permute_factors(&signal_state(&set, port, pair).unwrap(), &perm).unwrap();
            g.add_assign(&s).unwrap();
            signals.push(s);
        }
        let h = psd_inv_sqrt(&g, DEFAULT_KERNEL_TOL).unwrap();
        let mut total = 0.0;
        for s in &signals {
            total += h
                .mul(s)
                .unwrap()
                .mul(&h)
                .unwrap()
                .mul(s)
                .unwrap()
                .trace()
                .re;
        }
        let relabeled = total / 4.0;
        let original = ent_fidelity_bruteforce(&set).unwrap();
        assert_relative_eq!(relabeled, original, epsilon = 1e-12);
    }

    #[test]
    fn tel_fidelity_relation_points() {
        assert_relative_eq!(tel_fidelity(1.0, 2), 1.0);
        assert_relative_eq!(tel_fidelity(0.0, 2), 1.0 / 3.0);
        assert_relative_eq!(tel_fidelity(0.5, 2), 2.0 / 3.0);
        assert_relative_eq!(ent_from_tel_fidelity(tel_fidelity(0.37, 5), 5), 0.37);
    }

    #[test]
    fn parallel_st_channel_is_identity_qubit() {
        let set = OutcomeSet::family(&SetFamily::ParallelSt, 2, 1).unwrap();
        let phi = crate::haar::haar_state(2, 11).unwrap();
        let rho = phi.projector();
        let res = teleport_channel(&set, &rho).unwrap();
        assert!(res.output.max_abs_diff(&rho) < 1e-10);
        let total: f64 = res.weights.iter().map(|w| w.weight).sum();
        assert_relative_eq!(total, 1.0, epsilon = 1e-10);
        // Bell measurement on a maximally mixed marginal: all outcomes
        // equally likely.
        for w in &res.weights {
            assert_relative_eq!(w.weight, 0.25, epsilon = 1e-10);
        }
    }

    #[test]
    fn parallel_st_channel_is_identity_qutrit() {
        // Pins the correction convention in d > 2, where W, its adjoint and
        // its conjugate genuinely differ.
        let set = OutcomeSet::family(&SetFamily::ParallelSt, 3, 1).unwrap();
        let phi = crate::haar::haar_state(3, 5).unwrap();
        let rho = phi.projector();
        let res = teleport_channel(&set, &rho).unwrap();
        assert!(res.output.max_abs_diff(&rho) < 1e-10);
    }

    #[test]
    fn channel_weights_sum_to_one() {
        let set = OutcomeSet::from_bell_labels(2, &[0, 3]).unwrap();
        let rho = DenseOperator::identity(2).scale(c(0.5, 0.0));
        let res = teleport_channel(&set, &rho).unwrap();
        let total: f64 = res.weights.iter().map(|w| w.weight).sum();
        assert_relative_eq!(total, 1.0, epsilon = 1e-10);
        assert_relative_eq!(res.output.trace().re, 1.0, epsilon = 1e-10);
        assert!(res.output.hermiticity_defect() < 1e-10);
        let min = herm_eig(&res.output)
            .unwrap()
            .values
            .last()
            .copied()
            .unwrap();
        assert!(min >= -1e-10, "output not PSD: min eigenvalue {min:.3e}");
    }

    #[test]
    fn decode_selects_port_and_corrects() {
        let set = OutcomeSet::new(2, 2, &[(0, 0), (1, 0)]).unwrap();
        // Receiver holds |+> on port 1 and |0> on port 2.
        let zero = StateVector::basis(2, 0).unwrap();
        let plus = StateVector::unit(
            vec![c(1.0 / 2f64.sqrt(), 0.0), c(1.0 / 2f64.sqrt(), 0.0)],
            None,
        )
        .unwrap();
        let two_port = crate::linalg::kron(&plus.projector(), &zero.projector())
            .unwrap()
            .into_factored(vec![2, 2])
            .unwrap();
        let out = decode(&set, 1, (0, 0), &two_port).unwrap();
        assert!(out.max_abs_diff(&plus.projector()) < 1e-12);
        // (1,0) applies X: |+> is invariant.
        let out_x = decode(&set, 1, (1, 0), &two_port).unwrap();
        assert!(out_x.max_abs_diff(&plus.projector()) < 1e-12);
        // On port 2 the X correction flips |0> to |1>.
        let out2 = decode(&set, 2, (1, 0), &two_port).unwrap();
        let one = StateVector::basis(2, 1).unwrap();
        assert!(out2.max_abs_diff(&one.projector()) < 1e-12);
    }

    #[test]
    fn monte_carlo_parallel_st_is_exact_per_sample() {
        let set = OutcomeSet::family(&SetFamily::ParallelSt, 2, 1).unwrap();
        let est = tel_fidelity_monte_carlo(&set, 50, 3).unwrap();
        assert!((est.mean - 1.0).abs() < 1e-10);
        assert!(est.std_error < 1e-10);
    }

    #[test]
    fn monte_carlo_deterministic_per_seed() {
        let set = OutcomeSet::family(&SetFamily::Pbt, 2, 1).unwrap();
        let a = tel_fidelity_monte_carlo(&set, 200, 9).unwrap();
        let b = tel_fidelity_monte_carlo(&set, 200, 9).unwrap();
        assert_eq!(a.mean, b.mean);
        let c = tel_fidelity_monte_carlo(&set, 200, 10).unwrap();
        assert!(a.mean != c.mean);
    }

    #[test]
    fn monte_carlo_matches_relation_at_small_n() {
        let set = OutcomeSet::family(&SetFamily::Pbt, 2, 1).unwrap();
        let est = tel_fidelity_monte_carlo(&set, 20_000, 12).unwrap();
        let expected = tel_fidelity(0.25, 2);
        // The single-port channel is covariant, so the sample variance is
        // rounding dust; keep the 3-sigma bound floored above f64 noise.
        assert!(
            (est.mean - expected).abs() <= (3.0 * est.std_error).max(1e-10),
            "mean {} expected {} se {}",
            est.mean,
            expected,
            est.std_error
        );
    }

    #[test]
    fn distance_formula_examples() {
        let (alpha_star, minimum) = signal_distance_min(2, 1, 2).unwrap();
        assert_relative_eq!(alpha_star, 0.5, epsilon = 1e-14);
        assert_relative_eq!(minimum, 1.0, epsilon = 1e-14);
        assert_relative_eq!(
            signal_distance(2, 1, 2, alpha_star).unwrap(),
            minimum,
            epsilon = 1e-14
        );
        // Complete set: G proportional to identity, zero distance.
        let (_, zero) = signal_distance_min(2, 3, 4).unwrap();
        assert_relative_eq!(zero, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn distance_size_symmetry_and_convexity() {
        for d in [2usize, 3] {
            for n in 1..=3 {
                for k in 1..=(d * d) {
                    let (_, lo) = signal_distance_min(d, n, k).unwrap();
                    if d * d - k >= 1 {
                        let (_, lo_mirror) = signal_distance_min(d, n, d * d - k).unwrap();
                        assert_relative_eq!(lo, lo_mirror, epsilon = 1e-12);
                    }
                    // Parabola in alpha with vertex at alpha*.
                    let (a_star, _) = signal_distance_min(d, n, k).unwrap();
                    let f0 = signal_distance(d, n, k, a_star).unwrap();
                    for da in [-0.1, 0.05, 0.2] {
                        let f = signal_distance(d, n, k, a_star + da).unwrap();
                        let dp = (d as f64).powi(n as i32 + 1);
                        assert_relative_eq!(f - f0, dp * da * da, max_relative = 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn distance_formula_matches_numeric() {
        for d in [2usize, 3] {
            for n in 1..=2 {
                for k in [1usize, 2, d * d] {
                    let (a_star, _) = signal_distance_min(d, n, k).unwrap();
                    for alpha in [0.0, a_star, a_star + 0.3] {
                        let formula = signal_distance(d, n, k, alpha).unwrap();
                        let numeric = signal_distance_numeric(d, n, k, alpha).unwrap();
                        assert_relative_eq!(formula, numeric, epsilon = 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn capacity_errors_surface() {
        let set = OutcomeSet::family(&SetFamily::Pbt, 2, 25).unwrap();
        assert!(matches!(signal_sum(&set), Err(Error::Capacity { .. })));
    }
}
