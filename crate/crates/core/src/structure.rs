//! Structured linear algebra for the band matrix `B(m, ω)`.
//!
//! `B(m, ω)` is the `m × m` matrix whose row `l < m` carries `-1` at column
//! `m - l` and `+1` at column `m - l + 1`, and whose last row is `ω e_1`. Its
//! gram matrix `BᵀB` is the classical tridiagonal chain with `ω² + 1` in the
//! top-left corner and `1` in the bottom-right corner.
//!
//! Index convention: row indices `l` and group indices `i` are 1-based in the
//! public API (`1..=m` and `1..=n`), matching how components are numbered.
//! Vectors are plain `&[f64]` slices indexed from 0, so coordinate `j`
//! (1-based) lives at `x[j - 1]`.
//!
//! Rows are never materialized in the hot paths: every product touches at
//! most two coordinates per row.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dimension `m`, corner weight `ω` and group count `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandSpec {
    pub m: usize,
    #[serde(with = "crate::hexfloat")]
    pub omega: f64,
    pub n: usize,
}

impl BandSpec {
    pub fn new(m: usize, omega: f64, n: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::Invalid(format!("band dimension m = {m} must be >= 2")));
        }
        if n < 2 {
            return Err(Error::Invalid(format!("group count n = {n} must be >= 2")));
        }
        if !(omega >= 0.0) || !omega.is_finite() {
            return Err(Error::Invalid(format!("corner weight omega = {omega} must be finite and >= 0")));
        }
        Ok(BandSpec { m, omega, n })
    }
}

/// Which coordinate block the nested subspaces grow from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SubspaceOrientation {
    /// `F_k = span{e_m, …, e_{m-k+1}}`.
    Tail,
    /// `G_k = span{e_1, …, e_k}`.
    Head,
}

/// Support of one row of `B(m, ω)`, 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowSupport {
    /// `-1` at `lo`, `+1` at `lo + 1`.
    Pair(usize),
    /// `ω` at coordinate 0.
    Corner,
}

#[inline]
pub fn row_support(m: usize, l: usize) -> RowSupport {
    if l == m {
        RowSupport::Corner
    } else {
        RowSupport::Pair(m - l - 1)
    }
}

/// `b_lᵀ x`, no bounds check on `l`.
#[inline]
pub fn row_dot(spec: &BandSpec, l: usize, x: &[f64]) -> f64 {
    match row_support(spec.m, l) {
        RowSupport::Pair(lo) => x[lo + 1] - x[lo],
        RowSupport::Corner => spec.omega * x[0],
    }
}

#[inline]
fn row_norm_sq(spec: &BandSpec, l: usize) -> f64 {
    match row_support(spec.m, l) {
        RowSupport::Pair(_) => 2.0,
        RowSupport::Corner => spec.omega * spec.omega,
    }
}

/// `out += scale · b_l`, no bounds check.
#[inline]
fn axpy_row(spec: &BandSpec, l: usize, scale: f64, out: &mut [f64]) {
    match row_support(spec.m, l) {
        RowSupport::Pair(lo) => {
            out[lo] -= scale;
            out[lo + 1] += scale;
        }
        RowSupport::Corner => out[0] += scale * spec.omega,
    }
}

/// Dense row `b_l`. Test and reporting use only.
pub fn row_vector(spec: &BandSpec, l: usize) -> Result<Vec<f64>> {
    if l == 0 || l > spec.m {
        return Err(Error::IndexOutOfRange { index: l, max: spec.m });
    }
    let mut v = vec![0.0; spec.m];
    axpy_row(spec, l, 1.0, &mut v);
    Ok(v)
}

/// The rows of `B(m, ω)` split into `n` groups.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowPartition {
    /// `groups[i - 1]` lists the 1-based rows of group `i`, ascending.
    pub groups: Vec<Vec<usize>>,
    pub orientation: SubspaceOrientation,
}

impl RowPartition {
    pub fn n(&self) -> usize {
        self.groups.len()
    }

    pub fn group(&self, i: usize) -> Result<&[usize]> {
        if i == 0 || i > self.groups.len() {
            return Err(Error::IndexOutOfRange { index: i, max: self.groups.len() });
        }
        Ok(&self.groups[i - 1])
    }
}

/// Tail-oriented partition: row `l` belongs to group `i` iff `l ≡ i - 1 (mod n)`.
pub fn partition_rows(spec: &BandSpec) -> RowPartition {
    partition_rows_oriented(spec, SubspaceOrientation::Tail)
}

/// Head orientation keys each row by `m - l` instead of `l`: the pair row
/// linking coordinates `s` and `s + 1` goes to group `i` iff `s ≡ i - 1
/// (mod n)`, and the corner row lands in group 1.
pub fn partition_rows_oriented(spec: &BandSpec, orientation: SubspaceOrientation) -> RowPartition {
    let mut groups = vec![Vec::new(); spec.n];
    for l in 1..=spec.m {
        let key = match orientation {
            SubspaceOrientation::Tail => l,
            SubspaceOrientation::Head => spec.m - l,
        };
        groups[key % spec.n].push(l);
    }
    for g in &mut groups {
        g.sort_unstable();
    }
    RowPartition { groups, orientation }
}

/// `out += scale · B_iᵀB_i x`.
pub fn accumulate_group_gram(
    spec: &BandSpec,
    partition: &RowPartition,
    i: usize,
    x: &[f64],
    scale: f64,
    out: &mut [f64],
) -> Result<()> {
    let rows = partition.group(i)?;
    check_len(spec.m, x.len())?;
    check_len(spec.m, out.len())?;
    for &l in rows {
        let d = row_dot(spec, l, x);
        axpy_row(spec, l, scale * d, out);
    }
    Ok(())
}

/// `B_iᵀB_i x`.
pub fn apply_group_gram(spec: &BandSpec, partition: &RowPartition, i: usize, x: &[f64]) -> Result<Vec<f64>> {
    let mut out = vec![0.0; spec.m];
    accumulate_group_gram(spec, partition, i, x, 1.0, &mut out)?;
    Ok(out)
}

/// `‖B_i x‖²`.
pub fn group_norm_sq(spec: &BandSpec, partition: &RowPartition, i: usize, x: &[f64]) -> Result<f64> {
    let rows = partition.group(i)?;
    check_len(spec.m, x.len())?;
    Ok(rows.iter().map(|&l| row_dot(spec, l, x).powi(2)).sum())
}

/// `‖B x‖²` over all rows.
pub fn full_norm_sq(spec: &BandSpec, x: &[f64]) -> f64 {
    (1..=spec.m).map(|l| row_dot(spec, l, x).powi(2)).sum()
}

/// `out += scale · BᵀB x` over all rows.
pub fn accumulate_full_gram(spec: &BandSpec, x: &[f64], scale: f64, out: &mut [f64]) {
    for l in 1..=spec.m {
        let d = row_dot(spec, l, x);
        axpy_row(spec, l, scale * d, out);
    }
}

/// `(I + c2 · B_iᵀB_i)⁻¹ y`.
///
/// Rows inside a group have disjoint supports, so `B_i B_iᵀ` is diagonal and
/// the Woodbury form `I - B_iᵀ(c2⁻¹ I + B_i B_iᵀ)⁻¹ B_i` costs one pass over
/// the group.
pub fn solve_shifted_group_gram(
    spec: &BandSpec,
    partition: &RowPartition,
    i: usize,
    c2: f64,
    y: &[f64],
) -> Result<Vec<f64>> {
    if !(c2 > 0.0) {
        return Err(Error::Invalid(format!("shift c2 = {c2} must be positive")));
    }
    let rows = partition.group(i)?;
    check_len(spec.m, y.len())?;
    let mut out = y.to_vec();
    for &l in rows {
        let weight = c2 / (1.0 + c2 * row_norm_sq(spec, l));
        let d = row_dot(spec, l, y);
        axpy_row(spec, l, -weight * d, &mut out);
    }
    Ok(out)
}

/// Smallest `k` such that `x` lies in the `k`-dimensional subspace of the
/// given orientation, up to `tol · (1 + max|x|)`.
pub fn subspace_index(x: &[f64], orientation: SubspaceOrientation, tol: f64) -> usize {
    let scale = x.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let threshold = tol * (1.0 + scale);
    let significant = |v: &f64| v.abs() > threshold;
    match orientation {
        SubspaceOrientation::Tail => match x.iter().position(significant) {
            Some(j) => x.len() - j,
            None => 0,
        },
        SubspaceOrientation::Head => match x.iter().rposition(significant) {
            Some(j) => j + 1,
            None => 0,
        },
    }
}

/// Default relative tolerance for subspace membership.
pub const SUBSPACE_TOL: f64 = 1e-12;

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}
