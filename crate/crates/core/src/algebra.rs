//! The real Clifford algebra `R_n` with generators `e_1 .. e_n`, `e_j^2 = -1`.
//!
//! Elements are stored densely: `2^n` coefficients indexed by the bitmask of
//! the multi-index (bit `j - 1` set means `e_j` occurs in the ordered monomial).

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use crate::{Error, Result};

pub const MIN_DIM: usize = 2;
pub const MAX_DIM: usize = 12;

pub fn check_dim(n: usize) -> Result<()> {
    if (MIN_DIM..=MAX_DIM).contains(&n) {
        Ok(())
    } else {
        Err(Error::Config(alloc::format!(
            "dimension {n} outside [{MIN_DIM}, {MAX_DIM}]"
        )))
    }
}

/// Ordered multi-index `A = {j_1 < .. < j_l}`, stored as a bitmask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct MultiIndex(u16);

impl MultiIndex {
    pub const EMPTY: MultiIndex = MultiIndex(0);

    pub fn from_bits(bits: u16) -> Self {
        MultiIndex(bits)
    }

    /// Builds the index from 1-based generator labels; repeated labels are ignored.
    pub fn from_generators(gens: &[usize]) -> Self {
        let mut bits = 0u16;
        for &j in gens {
            debug_assert!((1..=MAX_DIM).contains(&j));
            bits |= 1 << (j - 1);
        }
        MultiIndex(bits)
    }

    /// The generator `e_j` (1-based).
    pub fn generator(j: usize) -> Self {
        Self::from_generators(&[j])
    }

    pub fn bits(self) -> u16 {
        self.0
    }

    pub fn grade(self) -> u32 {
        self.0.count_ones()
    }

    pub fn contains(self, j: usize) -> bool {
        self.0 & (1 << (j - 1)) != 0
    }

    fn check(self, n: usize) -> Result<()> {
        if (self.0 as usize) >> n != 0 {
            return Err(Error::Config(alloc::format!(
                "multi-index {:#b} does not fit dimension {n}",
                self.0
            )));
        }
        Ok(())
    }
}

/// Sign of `e_A e_B` relative to `e_{A xor B}`, as +1.0 or -1.0.
///
/// Counts the transpositions that sort the concatenated word, then one
/// factor `-1` per repeated generator.
#[inline]
pub(crate) fn product_sign(a: u16, b: u16) -> f64 {
    let mut shifted = a >> 1;
    let mut swaps = 0u32;
    while shifted != 0 {
        swaps += (shifted & b).count_ones();
        shifted >>= 1;
    }
    swaps += (a & b).count_ones();
    if swaps & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `e_A e_B = sign * e_C` with `C = A xor B`.
pub fn basis_product(a: MultiIndex, b: MultiIndex, n: usize) -> Result<(i8, MultiIndex)> {
    check_dim(n)?;
    a.check(n)?;
    b.check(n)?;
    let sign = if product_sign(a.0, b.0) > 0.0 { 1 } else { -1 };
    Ok((sign, MultiIndex(a.0 ^ b.0)))
}

/// `(-1)^{l(l+1)/2}`: the sign conjugation puts on a blade of grade `l`.
#[inline]
pub(crate) fn conj_sign(bits: u16) -> f64 {
    match bits.count_ones() % 4 {
        0 | 3 => 1.0,
        _ => -1.0,
    }
}

/// Dense element of `R_n`.
#[derive(Clone, PartialEq)]
pub struct Multivector {
    dim: usize,
    coeffs: Vec<f64>,
}

impl fmt::Debug for Multivector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Multivector(n={}; ", self.dim)?;
        let mut first = true;
        for (a, c) in self.coeffs.iter().enumerate() {
            if *c == 0.0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}")?;
            if a != 0 {
                write!(f, "e")?;
                for j in 0..self.dim {
                    if a & (1 << j) != 0 {
                        write!(f, "{}", j + 1)?;
                    }
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, ")")
    }
}

impl Multivector {
    pub fn zero(n: usize) -> Self {
        debug_assert!(check_dim(n).is_ok());
        Multivector {
            dim: n,
            coeffs: vec![0.0; 1 << n],
        }
    }

    pub fn scalar(n: usize, s: f64) -> Self {
        let mut m = Self::zero(n);
        m.coeffs[0] = s;
        m
    }

    pub fn one(n: usize) -> Self {
        Self::scalar(n, 1.0)
    }

    pub fn basis(n: usize, a: MultiIndex) -> Self {
        let mut m = Self::zero(n);
        m.coeffs[a.bits() as usize] = 1.0;
        m
    }

    /// The generator `e_j`, 1-based.
    pub fn e(n: usize, j: usize) -> Self {
        Self::basis(n, MultiIndex::generator(j))
    }

    /// `sum_j v_j e_j`; the dimension is `v.len()`.
    pub fn vector(v: &[f64]) -> Self {
        let mut m = Self::zero(v.len());
        for (j, &x) in v.iter().enumerate() {
            m.coeffs[1 << j] = x;
        }
        m
    }

    pub fn from_coeffs(n: usize, coeffs: Vec<f64>) -> Result<Self> {
        check_dim(n)?;
        if coeffs.len() != 1 << n {
            return Err(Error::Config(alloc::format!(
                "expected {} coefficients for n = {n}, got {}",
                1usize << n,
                coeffs.len()
            )));
        }
        Ok(Multivector { dim: n, coeffs })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn coeff(&self, a: MultiIndex) -> f64 {
        self.coeffs[a.bits() as usize]
    }

    /// Scalar part `Re(f) = f_empty`.
    pub fn re(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.norm_sq())
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    /// True when every coefficient above grade one is at most `tol` in magnitude.
    pub fn is_paravector(&self, tol: f64) -> bool {
        self.coeffs
            .iter()
            .enumerate()
            .all(|(a, c)| (a as u16).count_ones() <= 1 || c.abs() <= tol)
    }

    pub fn scale(&self, s: f64) -> Self {
        Multivector {
            dim: self.dim,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// `self += s * other`.
    pub fn axpy(&mut self, s: f64, other: &Multivector) {
        assert_eq!(self.dim, other.dim, "multivector dimension mismatch");
        for (c, o) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *c += s * o;
        }
    }

    /// Clifford conjugation: the anti-automorphism with `conj(e_j) = -e_j`.
    pub fn conj(&self) -> Self {
        Multivector {
            dim: self.dim,
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(a, c)| c * conj_sign(a as u16))
                .collect(),
        }
    }

    /// Geometric product `self * other`.
    pub fn gmul(&self, other: &Multivector) -> Result<Multivector> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        let mut out = Multivector::zero(self.dim);
        mul_into(&self.coeffs, &other.coeffs, &mut out.coeffs);
        Ok(out)
    }

    /// `<f, g> = Re(f conj(g)) = sum_A f_A g_A`.
    pub fn inner(&self, other: &Multivector) -> Result<f64> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(dot(&self.coeffs, &other.coeffs))
    }

    /// `e_j * self` without forming `e_j`.
    pub fn left_generator(&self, j: usize) -> Multivector {
        let g = 1u16 << (j - 1);
        let mut out = Multivector::zero(self.dim);
        for (a, &c) in self.coeffs.iter().enumerate() {
            if c != 0.0 {
                let a = a as u16;
                out.coeffs[(g ^ a) as usize] += product_sign(g, a) * c;
            }
        }
        out
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Accumulates `a * b` into `out` (which is overwritten).
pub(crate) fn mul_into(a: &[f64], b: &[f64], out: &mut [f64]) {
    for o in out.iter_mut() {
        *o = 0.0;
    }
    for (ia, &ca) in a.iter().enumerate() {
        if ca == 0.0 {
            continue;
        }
        let mask = sign_mask(ia as u16);
        for (ib, &cb) in b.iter().enumerate() {
            if cb == 0.0 {
                continue;
            }
            let v = ca * cb;
            out[ia ^ ib] += if ((ib as u16) & mask).count_ones() & 1 == 0 { v } else { -v };
        }
    }
}

/// Generators `j` whose presence in `B` flips the sign of `e_A e_B`:
/// `product_sign(a, b) = (-1)^{popcount(b & sign_mask(a))}`.
#[inline]
fn sign_mask(a: u16) -> u16 {
    let mut mask = 0u16;
    for j in 0..MAX_DIM as u32 {
        let above = (a >> j >> 1).count_ones();
        let own = (a >> j) & 1;
        if (above + own as u32) & 1 == 1 {
            mask |= 1 << j;
        }
    }
    mask
}

/// `|Re(ab) - Re(ba)|`; zero up to rounding for every pair.
pub fn re_cyclic_check(a: &Multivector, b: &Multivector) -> Result<f64> {
    let ab = a.gmul(b)?;
    let ba = b.gmul(a)?;
    Ok((ab.re() - ba.re()).abs())
}

impl Mul for &Multivector {
    type Output = Multivector;

    fn mul(self, rhs: &Multivector) -> Multivector {
        self.gmul(rhs).expect("multivector dimension mismatch")
    }
}

impl Add for &Multivector {
    type Output = Multivector;

    fn add(self, rhs: &Multivector) -> Multivector {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for &Multivector {
    type Output = Multivector;

    fn sub(self, rhs: &Multivector) -> Multivector {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl AddAssign<&Multivector> for Multivector {
    fn add_assign(&mut self, rhs: &Multivector) {
        self.axpy(1.0, rhs);
    }
}

impl SubAssign<&Multivector> for Multivector {
    fn sub_assign(&mut self, rhs: &Multivector) {
        self.axpy(-1.0, rhs);
    }
}

impl Neg for &Multivector {
    type Output = Multivector;

    fn neg(self) -> Multivector {
        self.scale(-1.0)
    }
}
