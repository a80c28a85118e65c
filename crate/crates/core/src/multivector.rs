//! Exterior algebra over R^d with sparse coefficients indexed by
//! lexicographic multi-indices: wedge products, the induced inner product
//! and the Hodge star.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{GeoError, Result};

/// Hard cap on the ambient dimension.
pub const MAX_DIM: usize = 16;
/// Hard cap on the number of basis k-vectors C(d,k).
pub const MAX_COEFFS: usize = 1 << 20;

/// A strictly increasing sequence of 1-based indices in `[1, d]`,
/// labelling a basis element of grade-k exterior algebra. Ordering is the
/// lexicographic order of the index sequence, which fixes the storage
/// layout everywhere.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MultiIndex(Vec<u8>);

impl MultiIndex {
    pub fn new(indices: Vec<u8>, d: usize) -> Result<Self> {
        if d > MAX_DIM {
            return Err(GeoError::Capacity(format!("ambient dimension {d} > {MAX_DIM}")));
        }
        for w in indices.windows(2) {
            if w[0] >= w[1] {
                return Err(GeoError::DimensionMismatch(
                    "multi-index must be strictly increasing".into(),
                ));
            }
        }
        if let (Some(&first), Some(&last)) = (indices.first(), indices.last()) {
            if first < 1 || last as usize > d {
                return Err(GeoError::DimensionMismatch(format!(
                    "multi-index entries must lie in [1, {d}]"
                )));
            }
        }
        Ok(MultiIndex(indices))
    }

    pub fn grade(&self) -> usize {
        self.0.len()
    }

    pub fn indices(&self) -> &[u8] {
        &self.0
    }

    /// Complement within `[1, d]`, in increasing order.
    pub fn complement(&self, d: usize) -> MultiIndex {
        let mut present = [false; MAX_DIM + 1];
        for &i in &self.0 {
            present[i as usize] = true;
        }
        MultiIndex((1..=d as u8).filter(|&i| !present[i as usize]).collect())
    }

    /// Parity sign of the permutation (self, complement) relative to (1..d).
    pub fn complement_sign(&self, d: usize) -> f64 {
        let comp = self.complement(d);
        let mut perm: Vec<u8> = self.0.clone();
        perm.extend_from_slice(&comp.0);
        permutation_sign(&perm)
    }

    /// All grade-k multi-indices over `[1, d]` in lexicographic order.
    pub fn all(d: usize, k: usize) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        let mut cur: Vec<u8> = (1..=k as u8).collect();
        if k == 0 {
            return vec![MultiIndex(Vec::new())];
        }
        if k > d {
            return out;
        }
        loop {
            out.push(MultiIndex(cur.clone()));
            // next combination
            let mut i = k;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                if cur[i] < (d - (k - 1 - i)) as u8 {
                    cur[i] += 1;
                    for j in i + 1..k {
                        cur[j] = cur[j - 1] + 1;
                    }
                    break;
                }
            }
        }
    }
}

fn permutation_sign(perm: &[u8]) -> f64 {
    let mut inversions = 0usize;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn binom(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: usize = 1;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// Element of grade-k exterior algebra over R^d with sparse coefficient map.
/// Coefficients absent from the map are zero.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Multivector {
    d: usize,
    k: usize,
    coeffs: BTreeMap<MultiIndex, f64>,
}

impl Multivector {
    pub fn zero(d: usize, k: usize) -> Result<Self> {
        check_capacity(d, k)?;
        Ok(Multivector {
            d,
            k,
            coeffs: BTreeMap::new(),
        })
    }

    /// Basis k-vector e_I with coefficient 1.
    pub fn basis(d: usize, index: MultiIndex) -> Result<Self> {
        check_capacity(d, index.grade())?;
        let k = index.grade();
        let mut coeffs = BTreeMap::new();
        coeffs.insert(index, 1.0);
        Ok(Multivector { d, k, coeffs })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn grade(&self) -> usize {
        self.k
    }

    pub fn coeff(&self, index: &MultiIndex) -> f64 {
        self.coeffs.get(index).copied().unwrap_or(0.0)
    }

    pub fn set_coeff(&mut self, index: MultiIndex, value: f64) {
        if value == 0.0 {
            self.coeffs.remove(&index);
        } else {
            self.coeffs.insert(index, value);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, &f64)> {
        self.coeffs.iter()
    }

    pub fn scale(&self, s: f64) -> Multivector {
        Multivector {
            d: self.d,
            k: self.k,
            coeffs: self.coeffs.iter().map(|(i, c)| (i.clone(), c * s)).collect(),
        }
    }

    pub fn add(&self, other: &Multivector) -> Result<Multivector> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (i, c) in &other.coeffs {
            let v = out.coeff(i) + c;
            out.set_coeff(i.clone(), v);
        }
        Ok(out)
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.values().map(|c| c * c).sum::<f64>().sqrt()
    }

    fn check_compatible(&self, other: &Multivector) -> Result<()> {
        if self.d != other.d || self.k != other.k {
            return Err(GeoError::DimensionMismatch(format!(
                "multivectors of grade/dim ({}, {}) vs ({}, {})",
                self.k, self.d, other.k, other.d
            )));
        }
        Ok(())
    }
}

fn check_capacity(d: usize, k: usize) -> Result<()> {
    if d > MAX_DIM {
        return Err(GeoError::Capacity(format!("ambient dimension {d} > {MAX_DIM}")));
    }
    if k > d {
        return Err(GeoError::DimensionMismatch(format!("grade {k} > dimension {d}")));
    }
    if binom(d, k) > MAX_COEFFS {
        return Err(GeoError::Capacity(format!(
            "C({d},{k}) exceeds the coefficient cap {MAX_COEFFS}"
        )));
    }
    Ok(())
}

/// Wedge product of `k` vectors in R^d. The coefficient at an index set I is
/// the k x k determinant of the rows I of the column-stacked vectors.
pub fn wedge(vectors: &[Vec<f64>]) -> Result<Multivector> {
    let k = vectors.len();
    if k == 0 {
        return Err(GeoError::DimensionMismatch("wedge of zero vectors".into()));
    }
    let d = vectors[0].len();
    if k > d {
        return Err(GeoError::DimensionMismatch(format!("{k} vectors in dimension {d}")));
    }
    for v in vectors {
        if v.len() != d {
            return Err(GeoError::DimensionMismatch(
                "wedge factors must share the ambient dimension".into(),
            ));
        }
    }
    check_capacity(d, k)?;

    let mut out = Multivector::zero(d, k)?;
    for index in MultiIndex::all(d, k) {
        let mut sub = DMatrix::zeros(k, k);
        for (r, &row) in index.indices().iter().enumerate() {
            for (c, v) in vectors.iter().enumerate() {
                sub[(r, c)] = v[row as usize - 1];
            }
        }
        let det = sub.determinant();
        if det != 0.0 {
            out.set_coeff(index, det);
        }
    }
    Ok(out)
}

/// Inner product induced by the Euclidean structure: sum over shared index
/// sets of coefficient products.
pub fn inner(a: &Multivector, b: &Multivector) -> Result<f64> {
    a.check_compatible(b)?;
    let mut s = 0.0;
    for (i, c) in a.iter() {
        s += c * b.coeff(i);
    }
    Ok(s)
}

/// Hodge star: grade k -> grade d-k with `*(e_I) = sign(I, I^c) e_{I^c}`,
/// the sign being the permutation parity of (I, I^c) relative to (1..d).
/// This convention makes the star a linear isometry.
pub fn hodge_star(a: &Multivector) -> Result<Multivector> {
    let d = a.dim();
    let mut out = Multivector::zero(d, d - a.grade())?;
    for (index, &c) in a.iter() {
        let sign = index.complement_sign(d);
        let comp = index.complement(d);
        let v = out.coeff(&comp) + sign * c;
        out.set_coeff(comp, v);
    }
    Ok(out)
}
