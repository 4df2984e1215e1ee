//! Analytic entanglement fidelities for the protocol family, plus the
//! asymptotic models. These scale far beyond brute-force capacity and serve
//! as the oracle the dense path is checked against.

use crate::error::{Error, Result};

/// Cap on composition enumeration; beyond this the operation refuses rather
/// than silently subsampling.
pub const COMPOSITION_CAP: usize = 10_000_000;

/// Half-integer spin stored as twice its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Half(pub i32);

impl Half {
    pub fn from_int(v: i32) -> Self {
        Half(2 * v)
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }

    fn plus_half(self) -> Half {
        Half(self.0 + 1)
    }

    fn minus_half(self) -> Half {
        Half(self.0 - 1)
    }
}

/// Spin-z sign of the added half-spin in a Clebsch-Gordan coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

/// `<j1, m1, 1/2, ±1/2 | j, m1 ± 1/2>` for `j = j1 ± 1/2`, the closed forms of
/// spin-1/2 coupling. Errors on an invalid `(j1, m1)` pair or a target `j`
/// that is not reachable.
pub fn cg_half(j1: Half, m1: Half, j: Half, sign: Sign) -> Result<f64> {
    if j1.0 < 0 || (j1.0 - m1.0) % 2 != 0 || m1.0.abs() > j1.0 {
        return Err(Error::domain(format!(
            "invalid spin pair (j1={}, m1={})",
            j1.value(),
            m1.value()
        )));
    }
    let two_j1 = j1.0 as f64;
    let two_m1 = m1.0 as f64;
    let denom = two_j1 + 1.0; // = 2 j1 + 1
    let up = j.0 == j1.0 + 1;
    if !up && j.0 != j1.0 - 1 {
        return Err(Error::domain(format!(
            "target j={} is not j1 ± 1/2 for j1={}",
            j.value(),
            j1.value()
        )));
    }
    let val = match (up, sign) {
        // <j1,m1,1/2,+1/2 | j1+1/2, m1+1/2> = sqrt((j1+m1+1)/(2j1+1))
        (true, Sign::Plus) => (((two_j1 + two_m1) / 2.0 + 1.0) / denom).sqrt(),
        // <j1,m1,1/2,-1/2 | j1+1/2, m1-1/2> = sqrt((j1-m1+1)/(2j1+1))
        (true, Sign::Minus) => (((two_j1 - two_m1) / 2.0 + 1.0) / denom).sqrt(),
        // <j1,m1,1/2,+1/2 | j1-1/2, m1+1/2> = -sqrt((j1-m1)/(2j1+1))
        (false, Sign::Plus) => -(((two_j1 - two_m1) / 2.0) / denom).sqrt(),
        // <j1,m1,1/2,-1/2 | j1-1/2, m1-1/2> = sqrt((j1+m1)/(2j1+1))
        (false, Sign::Minus) => (((two_j1 + two_m1) / 2.0) / denom).sqrt(),
    };
    Ok(val)
}

/// Total-spin sector of a register of spin-1/2 systems.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinLabel {
    /// Total spin `s`.
    pub spin: Half,
    /// Number of irreducible blocks with this spin.
    pub multiplicity: f64,
}

/// Spin sectors of `m` qubits: `s` runs from `m/2` down to 0 or 1/2 by parity,
/// with multiplicity `(2s+1) m! / ((m/2 - s)! (m/2 + s + 1)!)`. The
/// multiplicities weighted by `2s+1` sum to `2^m`.
pub fn spin_sectors(m: usize) -> Vec<SpinLabel> {
    let two_max = m as i32;
    let mut out = Vec::new();
    let mut two_s = two_max % 2;
    while two_s <= two_max {
        let s = Half(two_s);
        let a = (two_max - two_s) / 2; // m/2 - s
        let b = (two_max + two_s) / 2 + 1; // m/2 + s + 1
        let ln_mult = (two_s as f64 + 1.0).ln() + ln_factorial(m)
            - ln_factorial(a as usize)
            - ln_factorial(b as usize);
        out.push(SpinLabel {
            spin: s,
            multiplicity: ln_mult.exp().round(),
        });
        two_s += 2;
    }
    out
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)).exp()
}

/// Entanglement fidelity of qubit port-based teleportation with `n` ports.
pub fn pbt_fidelity(n: usize) -> f64 {
    assert!(n >= 1, "port count must be at least 1");
    let nf = n as f64;
    let mut sum = 0.0;
    for k in 0..=n {
        let kf = k as f64;
        let term = (nf - 2.0 * kf - 1.0) / (kf + 1.0).sqrt()
            + (nf - 2.0 * kf + 1.0) / (nf - kf + 1.0).sqrt();
        sum += term * term * binomial(n, k);
    }
    sum / 2f64.powi(n as i32 + 3)
}

/// Entanglement fidelity of qubit PBQCT-2 (two Bell labels per port) with `n`
/// ports: `(N / 2^(N+2)) sum_n ((N-n)^(-1/2) + (1+n)^(-1/2))^2 C(N-1, n)`.
pub fn pbqct2_fidelity(n: usize) -> f64 {
    assert!(n >= 1, "port count must be at least 1");
    let nf = n as f64;
    let mut sum = 0.0;
    for k in 0..n {
        let kf = k as f64;
        let term = 1.0 / (nf - kf).sqrt() + 1.0 / (1.0 + kf).sqrt();
        sum += term * term * binomial(n - 1, k);
    }
    nf / 2f64.powi(n as i32 + 2) * sum
}

/// Signal-sum eigenvalues for qubit PBQCT-3, without the `2^(-N)` weight:
/// the symmetric branch (total spin = port-block spin + 1/2) carries
/// `3N/2 + s'`, the antisymmetric branch `3N/2 - s' - 1`, where `s'` is the
/// spin of the N-port block.
fn pbqct3_lambda_minus(n: usize, two_s: i32) -> f64 {
    1.5 * n as f64 + two_s as f64 / 2.0
}

fn pbqct3_lambda_plus(n: usize, two_s: i32) -> f64 {
    1.5 * n as f64 - two_s as f64 / 2.0 - 1.0
}

fn inv_sqrt_or_zero(x: f64) -> f64 {
    if x <= 1e-14 {
        0.0
    } else {
        1.0 / x.sqrt()
    }
}

/// Diagonal weights of the support-restricted `G^(-1/2)` in the two coupling
/// branches, as functions of the spectator-block spin `s` and its projection
/// `s_z` (the `2^(N/2)` scale of the eigenvalues is factored out; the caller
/// reinstates it). The `s = 0` fractions with vanishing numerators are 0.
fn pbqct3_c(n: usize, s: Half, s_z: Half) -> (f64, f64) {
    let sv = s.value();
    let zv = s_z.value();
    let lam_minus_lo = inv_sqrt_or_zero(pbqct3_lambda_minus(n, s.minus_half().0));
    let lam_minus_hi = inv_sqrt_or_zero(pbqct3_lambda_minus(n, s.plus_half().0));
    let lam_plus_lo = inv_sqrt_or_zero(pbqct3_lambda_plus(n, s.minus_half().0));
    let lam_plus_hi = inv_sqrt_or_zero(pbqct3_lambda_plus(n, s.plus_half().0));

    let c_minus = if s.0 == 0 {
        lam_minus_hi * ((1.0 + sv).powi(2) - zv * zv) / ((1.0 + sv) * (1.0 + 2.0 * sv))
    } else {
        lam_minus_lo * zv * zv / (sv * (1.0 + 2.0 * sv))
            + lam_minus_hi * ((1.0 + sv).powi(2) - zv * zv) / ((1.0 + sv) * (1.0 + 2.0 * sv))
    };
    let c_plus = if s.0 == 0 {
        lam_plus_hi * zv * zv / ((1.0 + sv) * (1.0 + 2.0 * sv))
    } else {
        lam_plus_lo * (sv * sv - zv * zv) / (sv * (1.0 + 2.0 * sv))
            + lam_plus_hi * zv * zv / ((1.0 + sv) * (1.0 + 2.0 * sv))
    };
    (c_plus, c_minus)
}

/// Entanglement fidelity of qubit PBQCT-3 (three Bell labels per port):
/// a multiplicity-weighted Clebsch-Gordan sum over the spin sectors of the
/// `N-1` spectator qubits,
/// `F = 3N 2^(-N) sum_{s, s_z} mult(s) (c_plus + c_minus)^2`.
pub fn pbqct3_fidelity(n: usize) -> f64 {
    assert!(n >= 1, "port count must be at least 1");
    let mut sum = 0.0;
    for sector in spin_sectors(n - 1) {
        let s = sector.spin;
        let mut sector_sum = 0.0;
        let mut two_z = -s.0;
        while two_z <= s.0 {
            let (c_plus, c_minus) = pbqct3_c(n, s, Half(two_z));
            sector_sum += (c_plus + c_minus) * (c_plus + c_minus);
            two_z += 2;
        }
        sum += sector.multiplicity * sector_sum;
    }
    3.0 * n as f64 / 2f64.powi(n as i32) * sum
}

/// Same weights assembled from raw Clebsch-Gordan products instead of the
/// simplified fractions; used to cross-check [`pbqct3_fidelity`]'s kernel.
/// The two coupling paths per branch are spectator `s` -> port block
/// `s ± 1/2` -> total spin, and terms whose intermediate projections fall
/// outside their multiplets vanish.
pub fn pbqct3_c_from_cg(n: usize, s: Half, s_z: Half) -> Result<(f64, f64)> {
    let cg = |j1: Half, m1: Half, j: Half, sign: Sign| -> Result<f64> {
        if m1.0.abs() > j1.0 || j1.0 < 0 {
            return Ok(0.0);
        }
        // Total projection must fit the target multiplet.
        let m_tot = match sign {
            Sign::Plus => m1.plus_half(),
            Sign::Minus => m1.minus_half(),
        };
        if m_tot.0.abs() > j.0 {
            return Ok(0.0);
        }
        cg_half(j1, m1, j, sign)
    };
    let s_up = s.plus_half();
    let s_dn = s.minus_half();
    let z_up = s_z.plus_half();
    let z_dn = s_z.minus_half();

    // Symmetric branch: total spin = block spin + 1/2.
    let mut c_minus = 0.0;
    {
        // Path through block spin s+1/2, total spin s+1.
        let amp = cg(s_up, z_up, Half(s.0 + 2), Sign::Minus)? * cg(s, s_z, s_up, Sign::Plus)?
            + cg(s_up, z_dn, Half(s.0 + 2), Sign::Plus)? * cg(s, s_z, s_up, Sign::Minus)?;
        c_minus += 0.5 * inv_sqrt_or_zero(pbqct3_lambda_minus(n, s_up.0)) * amp * amp;
    }
    if s.0 > 0 {
        // Path through block spin s-1/2, total spin s.
        let amp = cg(s_dn, z_up, s, Sign::Minus)? * cg(s, s_z, s_dn, Sign::Plus)?
            + cg(s_dn, z_dn, s, Sign::Plus)? * cg(s, s_z, s_dn, Sign::Minus)?;
        c_minus += 0.5 * inv_sqrt_or_zero(pbqct3_lambda_minus(n, s_dn.0)) * amp * amp;
    }

    // Antisymmetric branch: total spin = block spin - 1/2.
    let mut c_plus = 0.0;
    if s.0 > 0 {
        // Path through block spin s-1/2, total spin s-1.
        let amp = cg(s_dn, z_up, Half(s.0 - 2), Sign::Minus)? * cg(s, s_z, s_dn, Sign::Plus)?
            + cg(s_dn, z_dn, Half(s.0 - 2), Sign::Plus)? * cg(s, s_z, s_dn, Sign::Minus)?;
        c_plus += 0.5 * inv_sqrt_or_zero(pbqct3_lambda_plus(n, s_dn.0)) * amp * amp;
    }
    {
        // Path through block spin s+1/2, total spin s.
        let amp = cg(s_up, z_up, s, Sign::Minus)? * cg(s, s_z, s_up, Sign::Plus)?
            + cg(s_up, z_dn, s, Sign::Plus)? * cg(s, s_z, s_up, Sign::Minus)?;
        c_plus += 0.5 * inv_sqrt_or_zero(pbqct3_lambda_plus(n, s_up.0)) * amp * amp;
    }
    Ok((c_plus, c_minus))
}

/// Occupation vector labeling one block of the generalized PBQCT-2 POVM.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Composition(pub Vec<usize>);

/// All length-`d` vectors with entries in `[0, n-1]` summing to
/// `q_size * (n-1)`, in ascending lexicographic order.
pub fn compositions(d: usize, n: usize, q_size: usize) -> Result<Vec<Composition>> {
    if d < 2 {
        return Err(Error::usage(format!("dimension {d} must be at least 2")));
    }
    if n < 1 {
        return Err(Error::usage("port count must be at least 1"));
    }
    if q_size < 1 || q_size > d {
        return Err(Error::usage(format!(
            "q size {q_size} out of range 1..={d}"
        )));
    }
    let total = q_size * (n - 1);
    let max_entry = n - 1;
    let mut out = Vec::new();
    let mut current = vec![0usize; d];
    fill_compositions(&mut out, &mut current, 0, total, max_entry, d)?;
    Ok(out)
}

fn fill_compositions(
    out: &mut Vec<Composition>,
    current: &mut Vec<usize>,
    pos: usize,
    remaining: usize,
    max_entry: usize,
    d: usize,
) -> Result<()> {
    if pos == d {
        if remaining == 0 {
            if out.len() >= COMPOSITION_CAP {
                return Err(Error::Capacity {
                    required: out.len() + 1,
                    cap: COMPOSITION_CAP,
                });
            }
            out.push(Composition(current.clone()));
        }
        return Ok(());
    }
    // Prune: the tail can absorb at most (d - pos - 1) * max_entry.
    let tail_cap = (d - pos - 1) * max_entry;
    let lo = remaining.saturating_sub(tail_cap);
    let hi = remaining.min(max_entry);
    for v in lo..=hi {
        current[pos] = v;
        fill_compositions(out, current, pos + 1, remaining - v, max_entry, d)?;
    }
    current[pos] = 0;
    Ok(())
}

fn ln_multinomial(n: usize, parts: &[usize]) -> f64 {
    ln_factorial(n) - parts.iter().map(|&p| ln_factorial(p)).sum::<f64>()
}

/// Entanglement fidelity of the generalized PBQCT-2 protocol in dimension `d`
/// (per-port signal set: one shift row of the generalized Bell basis):
/// `F = (N / D^(N+2)) sum over occupation vectors of
/// (sum_i (1+n_i)^(-1/2))^2 * multinomial(N-1; n)`.
/// Reduces to [`pbqct2_fidelity`] at `d = 2`.
pub fn gen_pbqct2_fidelity(d: usize, n: usize) -> Result<f64> {
    let comps = compositions(d, n, 1)?;
    let mut sum = 0.0;
    for comp in &comps {
        let weight: f64 = comp
            .0
            .iter()
            .map(|&ni| 1.0 / (1.0 + ni as f64).sqrt())
            .sum();
        sum += weight * weight * ln_multinomial(n - 1, &comp.0).exp();
    }
    Ok(n as f64 / (d as f64).powi(n as i32 + 2) * sum)
}

/// Named protocol families with known asymptotic coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProtocolTag {
    Pbt,
    Pbqct2,
    Pbqct3,
    GenPbqct2,
    /// Qudit PBT reference value (no closed form implemented here).
    PbtQudit,
}

/// The `a` in the large-`N` model `F -> 1 - 1/(aN)`.
pub fn asymptotic_coefficient(tag: ProtocolTag, d: usize) -> Result<f64> {
    match tag {
        ProtocolTag::Pbt => {
            if d != 2 {
                return Err(Error::usage("pbt coefficient is tabulated for d = 2"));
            }
            Ok(4.0 / 3.0)
        }
        ProtocolTag::Pbqct2 => {
            if d != 2 {
                return Err(Error::usage("pbqct2 coefficient is tabulated for d = 2"));
            }
            Ok(4.0)
        }
        ProtocolTag::Pbqct3 => {
            if d != 2 {
                return Err(Error::usage("pbqct3 coefficient is tabulated for d = 2"));
            }
            Ok(12.0)
        }
        ProtocolTag::GenPbqct2 => {
            if d < 2 {
                return Err(Error::usage("dimension must be at least 2"));
            }
            Ok(4.0 / (d as f64 - 1.0))
        }
        ProtocolTag::PbtQudit => {
            if d < 2 {
                return Err(Error::usage("dimension must be at least 2"));
            }
            Ok(4.0 / ((d * d) as f64 - 1.0))
        }
    }
}

/// `1 - 1/(aN)`.
pub fn asymptotic_model(a: f64, n: usize) -> f64 {
    assert!(a > 0.0, "coefficient must be positive");
    1.0 - 1.0 / (a * n as f64)
}
