//! Dense complex linear algebra on composite Hilbert spaces.
//!
//! Everything downstream (signal states, POVMs, channels) is carried by
//! [`DenseOperator`], a square complex matrix in row-major order with an
//! optional factor-dimension list for subsystem bookkeeping, and by
//! [`StateVector`]. Operators are immutable after construction and safe to
//! share read-only across sweep workers.

use crate::error::{Error, Result};
use crate::C64;
use nalgebra::DMatrix;

/// Dimension cap for any constructed operator or state. Brute force is meant
/// for the desk-scale regime; anything larger is refused rather than thrashed.
pub const DIM_CAP: usize = 1 << 20;

/// Max-entry tolerance for Hermiticity checks; entrywise construction errors
/// dominate rounding at these sizes.
pub const HERMITICITY_TOL: f64 = 1e-10;

/// Eigenvalues below `DEFAULT_KERNEL_TOL * lambda_max` count as kernel when
/// inverting on the support.
pub const DEFAULT_KERNEL_TOL: f64 = 1e-12;

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 {
        return Err(Error::usage("dimension must be positive"));
    }
    if dim > DIM_CAP {
        return Err(Error::Capacity {
            required: dim,
            cap: DIM_CAP,
        });
    }
    Ok(())
}

/// Square complex matrix on a composite Hilbert space, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    dim: usize,
    factors: Option<Vec<usize>>,
    data: Vec<C64>,
}

impl DenseOperator {
    pub fn zeros(dim: usize) -> Self {
        DenseOperator {
            dim,
            factors: None,
            data: vec![C64::ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut op = Self::zeros(dim);
        for i in 0..dim {
            op.data[i * dim + i] = C64::ONE;
        }
        op
    }

    /// Builds from row-major entries.
    pub fn from_rows(dim: usize, data: Vec<C64>) -> Result<Self> {
        check_dim(dim)?;
        if data.len() != dim * dim {
            return Err(Error::usage(format!(
                "entry count {} does not match dim {}^2",
                data.len(),
                dim
            )));
        }
        Ok(DenseOperator {
            dim,
            factors: None,
            data,
        })
    }

    /// Builds from row-major entries with a factor-dimension list whose
    /// product must equal the matrix dimension.
    pub fn with_factors(factors: Vec<usize>, data: Vec<C64>) -> Result<Self> {
        let dim: usize = factors.iter().product();
        let mut op = Self::from_rows(dim, data)?;
        op.factors = Some(factors);
        Ok(op)
    }

    /// Attaches (or replaces) the factor list.
    pub fn into_factored(mut self, factors: Vec<usize>) -> Result<Self> {
        let prod: usize = factors.iter().product();
        if prod != self.dim {
            return Err(Error::usage(format!(
                "factor product {} does not match dim {}",
                prod, self.dim
            )));
        }
        self.factors = Some(factors);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn factors(&self) -> Option<&[usize]> {
        self.factors.as_deref()
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    #[inline]
    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.data[row * self.dim + col]
    }

    #[inline]
    pub fn set_entry(&mut self, row: usize, col: usize, value: C64) {
        self.data[row * self.dim + col] = value;
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).sum()
    }

    pub fn adjoint(&self) -> DenseOperator {
        let n = self.dim;
        let mut data = vec![C64::ZERO; n * n];
        for i in 0..n {
            for j in 0..n {
                data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        DenseOperator {
            dim: n,
            factors: self.factors.clone(),
            data,
        }
    }

    pub fn scale(&self, s: C64) -> DenseOperator {
        DenseOperator {
            dim: self.dim,
            factors: self.factors.clone(),
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &DenseOperator) -> Result<DenseOperator> {
        self.check_same_dim(other)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Ok(DenseOperator {
            dim: self.dim,
            factors: self.factors.clone(),
            data,
        })
    }

    pub fn sub(&self, other: &DenseOperator) -> Result<DenseOperator> {
        self.check_same_dim(other)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Ok(DenseOperator {
            dim: self.dim,
            factors: self.factors.clone(),
            data,
        })
    }

    pub fn add_assign(&mut self, other: &DenseOperator) -> Result<()> {
        self.check_same_dim(other)?;
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
        Ok(())
    }

    /// `self * other`, skipping zero entries of `self` (signals and POVM
    /// elements are sparse enough for this to pay off).
    pub fn mul(&self, other: &DenseOperator) -> Result<DenseOperator> {
        self.check_same_dim(other)?;
        let n = self.dim;
        let mut data = vec![C64::ZERO; n * n];
        for i in 0..n {
            let arow = &self.data[i * n..(i + 1) * n];
            let orow = &mut data[i * n..(i + 1) * n];
            for (k, &aik) in arow.iter().enumerate() {
                if aik == C64::ZERO {
                    continue;
                }
                let brow = &other.data[k * n..(k + 1) * n];
                for (o, &b) in orow.iter_mut().zip(brow) {
                    *o += aik * b;
                }
            }
        }
        Ok(DenseOperator {
            dim: n,
            factors: self.factors.clone(),
            data,
        })
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: v.len(),
            });
        }
        let n = self.dim;
        let mut out = vec![C64::ZERO; n];
        for (i, slot) in out.iter_mut().enumerate() {
            let row = &self.data[i * n..(i + 1) * n];
            *slot = row.iter().zip(v).map(|(a, b)| a * b).sum();
        }
        Ok(out)
    }

    /// `U * self * U†`.
    pub fn conjugate_by(&self, u: &DenseOperator) -> Result<DenseOperator> {
        u.mul(self)?.mul(&u.adjoint())
    }

    pub fn max_abs_diff(&self, other: &DenseOperator) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `max |M - M†|` entrywise.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                let d = (self.data[i * n + j] - self.data[j * n + i].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    fn check_same_dim(&self, other: &DenseOperator) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        Ok(())
    }

    fn require_factors(&self) -> Result<&[usize]> {
        self.factors
            .as_deref()
            .ok_or_else(|| Error::usage("operator carries no factor-dimension list"))
    }
}

/// Pure state on a (possibly composite) Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    dim: usize,
    factors: Option<Vec<usize>>,
    amplitudes: Vec<C64>,
}

impl StateVector {
    /// A normalized state; rejects vectors whose norm is off by more
    /// than 1e-12.
    pub fn unit(amplitudes: Vec<C64>, factors: Option<Vec<usize>>) -> Result<Self> {
        let s = Self::unnormalized(amplitudes, factors)?;
        let norm = s.norm();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::domain(format!("state norm {norm} is not 1")));
        }
        Ok(s)
    }

    /// An explicitly unnormalized intermediate (post-measurement branches,
    /// accumulation buffers).
    pub fn unnormalized(amplitudes: Vec<C64>, factors: Option<Vec<usize>>) -> Result<Self> {
        let dim = amplitudes.len();
        check_dim(dim)?;
        if let Some(f) = &factors {
            let prod: usize = f.iter().product();
            if prod != dim {
                return Err(Error::usage(format!(
                    "factor product {prod} does not match state dim {dim}"
                )));
            }
        }
        Ok(StateVector {
            dim,
            factors,
            amplitudes,
        })
    }

    /// Computational basis state `|k>`.
    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        check_dim(dim)?;
        if k >= dim {
            return Err(Error::usage(format!("basis index {k} out of range {dim}")));
        }
        let mut amplitudes = vec![C64::ZERO; dim];
        amplitudes[k] = C64::ONE;
        Ok(StateVector {
            dim,
            factors: None,
            amplitudes,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn factors(&self) -> Option<&[usize]> {
        self.factors.as_deref()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|self><self|`.
    pub fn projector(&self) -> DenseOperator {
        let n = self.dim;
        let mut data = vec![C64::ZERO; n * n];
        for (i, a) in self.amplitudes.iter().enumerate() {
            if *a == C64::ZERO {
                continue;
            }
            for (j, b) in self.amplitudes.iter().enumerate() {
                data[i * n + j] = a * b.conj();
            }
        }
        DenseOperator {
            dim: n,
            factors: self.factors.clone(),
            data,
        }
    }

    pub fn into_factored(mut self, factors: Vec<usize>) -> Result<Self> {
        let prod: usize = factors.iter().product();
        if prod != self.dim {
            return Err(Error::usage(format!(
                "factor product {} does not match dim {}",
                prod, self.dim
            )));
        }
        self.factors = Some(factors);
        Ok(self)
    }
}

fn merged_factors(
    a_dim: usize,
    a: Option<&[usize]>,
    b_dim: usize,
    b: Option<&[usize]>,
) -> Vec<usize> {
    let mut f = a.map(|s| s.to_vec()).unwrap_or_else(|| vec![a_dim]);
    match b {
        Some(s) => f.extend_from_slice(s),
        None => f.push(b_dim),
    }
    f
}

/// Tensor product; the factor list of the result is the concatenation of the
/// operands' lists (operands without one count as a single factor).
pub fn kron(a: &DenseOperator, b: &DenseOperator) -> Result<DenseOperator> {
    let dim = a.dim.checked_mul(b.dim).ok_or(Error::Capacity {
        required: usize::MAX,
        cap: DIM_CAP,
    })?;
    check_dim(dim)?;
    let (na, nb) = (a.dim, b.dim);
    let mut data = vec![C64::ZERO; dim * dim];
    for ia in 0..na {
        for ja in 0..na {
            let av = a.data[ia * na + ja];
            if av == C64::ZERO {
                continue;
            }
            for ib in 0..nb {
                let row = (ia * nb + ib) * dim + ja * nb;
                for jb in 0..nb {
                    data[row + jb] = av * b.data[ib * nb + jb];
                }
            }
        }
    }
    Ok(DenseOperator {
        dim,
        factors: Some(merged_factors(a.dim, a.factors(), b.dim, b.factors())),
        data,
    })
}

/// Tensor product of states.
pub fn kron_state(a: &StateVector, b: &StateVector) -> Result<StateVector> {
    let dim = a.dim.checked_mul(b.dim).ok_or(Error::Capacity {
        required: usize::MAX,
        cap: DIM_CAP,
    })?;
    check_dim(dim)?;
    let mut amplitudes = Vec::with_capacity(dim);
    for av in &a.amplitudes {
        for bv in &b.amplitudes {
            amplitudes.push(av * bv);
        }
    }
    Ok(StateVector {
        dim,
        factors: Some(merged_factors(a.dim, a.factors(), b.dim, b.factors())),
        amplitudes,
    })
}

fn strides(factors: &[usize]) -> Vec<usize> {
    let mut s = vec![1usize; factors.len()];
    for i in (0..factors.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * factors[i + 1];
    }
    s
}

fn check_target_list(targets: &[usize], n_factors: usize) -> Result<()> {
    if targets.is_empty() {
        return Err(Error::usage("target factor list is empty"));
    }
    let mut seen = vec![false; n_factors];
    for &t in targets {
        if t >= n_factors {
            return Err(Error::usage(format!(
                "factor index {t} out of range (have {n_factors} factors)"
            )));
        }
        if seen[t] {
            return Err(Error::usage(format!("factor index {t} repeated")));
        }
        seen[t] = true;
    }
    Ok(())
}

/// Places `op` (whose factors must match `space[targets]`, in that order) on
/// the listed factors of the composite space, identity elsewhere.
pub fn embed(op: &DenseOperator, targets: &[usize], space: &[usize]) -> Result<DenseOperator> {
    check_target_list(targets, space.len())?;
    let sub_dims: Vec<usize> = targets.iter().map(|&t| space[t]).collect();
    let sub_dim: usize = sub_dims.iter().product();
    if sub_dim != op.dim {
        return Err(Error::DimensionMismatch {
            expected: sub_dim,
            got: op.dim,
        });
    }
    let full_dim: usize = space.iter().product();
    check_dim(full_dim)?;

    let full_strides = strides(space);
    let sub_strides = strides(&sub_dims);
    // Offset of each sub-space basis index inside the full space.
    let sub_offsets: Vec<usize> = (0..sub_dim)
        .map(|mut s| {
            let mut off = 0;
            for (k, &t) in targets.iter().enumerate() {
                let digit = s / sub_strides[k];
                s %= sub_strides[k];
                off += digit * full_strides[t];
            }
            off
        })
        .collect();

    // Enumerate complement configurations.
    let comp: Vec<usize> = (0..space.len()).filter(|i| !targets.contains(i)).collect();
    let comp_dims: Vec<usize> = comp.iter().map(|&c| space[c]).collect();
    let comp_count: usize = comp_dims.iter().product();
    let comp_strides = strides(&comp_dims);
    let comp_offsets: Vec<usize> = (0..comp_count)
        .map(|mut s| {
            let mut off = 0;
            for (k, &c) in comp.iter().enumerate() {
                let digit = s / comp_strides[k];
                s %= comp_strides[k];
                off += digit * full_strides[c];
            }
            off
        })
        .collect();

    let mut data = vec![C64::ZERO; full_dim * full_dim];
    for r in 0..sub_dim {
        for c in 0..sub_dim {
            let v = op.data[r * sub_dim + c];
            if v == C64::ZERO {
                continue;
            }
            for &co in &comp_offsets {
                data[(sub_offsets[r] + co) * full_dim + (sub_offsets[c] + co)] = v;
            }
        }
    }
    Ok(DenseOperator {
        dim: full_dim,
        factors: Some(space.to_vec()),
        data,
    })
}

/// Reorders the tensor factors: output slot `j` carries input factor `perm[j]`.
pub fn permute_factors(op: &DenseOperator, perm: &[usize]) -> Result<DenseOperator> {
    let factors = op.require_factors()?;
    if perm.len() != factors.len() {
        return Err(Error::usage(
            "permutation length does not match factor count",
        ));
    }
    check_target_list(perm, factors.len())?;
    let new_factors: Vec<usize> = perm.iter().map(|&p| factors[p]).collect();
    let map = index_permutation(factors, perm);
    let n = op.dim;
    let mut data = vec![C64::ZERO; n * n];
    for r in 0..n {
        let nr = map[r];
        for c in 0..n {
            data[nr * n + map[c]] = op.data[r * n + c];
        }
    }
    Ok(DenseOperator {
        dim: n,
        factors: Some(new_factors),
        data,
    })
}

/// Same reordering for states.
pub fn permute_state_factors(state: &StateVector, perm: &[usize]) -> Result<StateVector> {
    let factors = state
        .factors
        .as_deref()
        .ok_or_else(|| Error::usage("state carries no factor-dimension list"))?;
    if perm.len() != factors.len() {
        return Err(Error::usage(
            "permutation length does not match factor count",
        ));
    }
    check_target_list(perm, factors.len())?;
    let new_factors: Vec<usize> = perm.iter().map(|&p| factors[p]).collect();
    let map = index_permutation(factors, perm);
    let mut amplitudes = vec![C64::ZERO; state.dim];
    for (i, &a) in state.amplitudes.iter().enumerate() {
        amplitudes[map[i]] = a;
    }
    Ok(StateVector {
        dim: state.dim,
        factors: Some(new_factors),
        amplitudes,
    })
}

/// For each old flat index, the new flat index after factor reordering.
fn index_permutation(factors: &[usize], perm: &[usize]) -> Vec<usize> {
    let dim: usize = factors.iter().product();
    let old_strides = strides(factors);
    let new_factors: Vec<usize> = perm.iter().map(|&p| factors[p]).collect();
    let new_strides = strides(&new_factors);
    (0..dim)
        .map(|idx| {
            let mut out = 0;
            for (slot, &p) in perm.iter().enumerate() {
                let digit = (idx / old_strides[p]) % factors[p];
                out += digit * new_strides[slot];
            }
            out
        })
        .collect()
}

/// Traces out every factor not listed in `keep`; kept factors stay in their
/// original relative order. Tracing everything yields a 1x1 matrix holding
/// the trace.
pub fn partial_trace(op: &DenseOperator, keep: &[usize]) -> Result<DenseOperator> {
    let factors = op.require_factors()?;
    let mut keep = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    for &k in &keep {
        if k >= factors.len() {
            return Err(Error::usage(format!(
                "keep index {k} out of range (have {} factors)",
                factors.len()
            )));
        }
    }
    let full_strides = strides(factors);
    let keep_dims: Vec<usize> = keep.iter().map(|&k| factors[k]).collect();
    let out_dim: usize = keep_dims.iter().product::<usize>().max(1);
    let keep_strides = strides(&keep_dims);
    let keep_offsets: Vec<usize> = (0..out_dim)
        .map(|mut s| {
            let mut off = 0;
            for (i, &k) in keep.iter().enumerate() {
                let digit = s / keep_strides[i];
                s %= keep_strides[i];
                off += digit * full_strides[k];
            }
            off
        })
        .collect();

    let traced: Vec<usize> = (0..factors.len()).filter(|i| !keep.contains(i)).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&t| factors[t]).collect();
    let traced_count: usize = traced_dims.iter().product::<usize>().max(1);
    let traced_strides = strides(&traced_dims);
    let traced_offsets: Vec<usize> = (0..traced_count)
        .map(|mut s| {
            let mut off = 0;
            for (i, &t) in traced.iter().enumerate() {
                let digit = s / traced_strides[i];
                s %= traced_strides[i];
                off += digit * full_strides[t];
            }
            off
        })
        .collect();

    let n = op.dim;
    let mut data = vec![C64::ZERO; out_dim * out_dim];
    for r in 0..out_dim {
        for c in 0..out_dim {
            let mut acc = C64::ZERO;
            for &t in &traced_offsets {
                acc += op.data[(keep_offsets[r] + t) * n + (keep_offsets[c] + t)];
            }
            data[r * out_dim + c] = acc;
        }
    }
    let out_factors = if keep_dims.is_empty() {
        vec![1]
    } else {
        keep_dims
    };
    DenseOperator::with_factors(out_factors, data)
}

/// Eigendecomposition of a Hermitian operator.
#[derive(Debug, Clone)]
pub struct HermEig {
    /// Eigenvalues in descending order.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as the columns, ordered like `values`.
    pub vectors: DenseOperator,
}

/// Hermitian eigendecomposition: `m = V diag(values) V†`. Rejects inputs with
/// a Hermiticity defect above [`HERMITICITY_TOL`].
pub fn herm_eig(m: &DenseOperator) -> Result<HermEig> {
    let defect = m.hermiticity_defect();
    if defect > HERMITICITY_TOL {
        return Err(Error::domain(format!(
            "operator is not Hermitian (defect {defect:.3e})"
        )));
    }
    let n = m.dim;
    let mat = DMatrix::from_fn(n, n, |i, j| m.data[i * n + j]);
    let se = mat.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        se.eigenvalues[b]
            .partial_cmp(&se.eigenvalues[a])
            .expect("eigenvalues are finite")
    });
    let values: Vec<f64> = order.iter().map(|&k| se.eigenvalues[k]).collect();
    let mut data = vec![C64::ZERO; n * n];
    for (col, &k) in order.iter().enumerate() {
        for row in 0..n {
            data[row * n + col] = se.eigenvectors[(row, k)];
        }
    }
    Ok(HermEig {
        values,
        vectors: DenseOperator {
            dim: n,
            factors: m.factors.clone(),
            data,
        },
    })
}

/// Rebuilds `V f(diag) V†` from an eigendecomposition.
fn rebuild(eig: &HermEig, f: impl Fn(f64) -> f64) -> DenseOperator {
    let n = eig.vectors.dim;
    let v = &eig.vectors;
    // V * diag(f) first: scale columns.
    let mut scaled = v.clone();
    for row in 0..n {
        for col in 0..n {
            scaled.data[row * n + col] *= f(eig.values[col]);
        }
    }
    scaled
        .mul(&v.adjoint())
        .expect("dimensions agree by construction")
}

fn psd_eig(m: &DenseOperator) -> Result<HermEig> {
    let eig = herm_eig(m)?;
    if let Some(&min) = eig.values.last() {
        if min < -HERMITICITY_TOL {
            return Err(Error::domain(format!(
                "operator has negative eigenvalue {min:.3e}"
            )));
        }
    }
    Ok(eig)
}

/// Inverse square root on the support: eigenvalues below
/// `kernel_tol * lambda_max` map to zero, the rest to `lambda^(-1/2)`.
pub fn psd_inv_sqrt(m: &DenseOperator, kernel_tol: f64) -> Result<DenseOperator> {
    let eig = psd_eig(m)?;
    let lambda_max = eig.values.first().copied().unwrap_or(0.0).max(0.0);
    let cut = kernel_tol * lambda_max;
    Ok(rebuild(
        &eig,
        |l| if l <= cut { 0.0 } else { 1.0 / l.sqrt() },
    ))
}

/// Positive square root, clamping tiny negative eigenvalues to zero.
pub fn psd_sqrt(m: &DenseOperator) -> Result<DenseOperator> {
    let eig = psd_eig(m)?;
    Ok(rebuild(&eig, |l| if l <= 0.0 { 0.0 } else { l.sqrt() }))
}

/// Projector onto the support (eigenvalues above `kernel_tol * lambda_max`).
pub fn support_projector(m: &DenseOperator, kernel_tol: f64) -> Result<DenseOperator> {
    let eig = psd_eig(m)?;
    let lambda_max = eig.values.first().copied().unwrap_or(0.0).max(0.0);
    let cut = kernel_tol * lambda_max;
    Ok(rebuild(&eig, |l| if l <= cut { 0.0 } else { 1.0 }))
}
