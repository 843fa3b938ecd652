//! Points, cubes and zero matrices over the Boolean cube.
//!
//! A point of `B^n` is stored in a single `u64` with variable `x_{j+1}` at
//! bit `j`, so `n` is limited to [`MAX_VARS`]. Textual forms always list `x_1`
//! first: the string `"100"` is the point with `x_1 = 1`.

use std::cmp::Ordering;
use std::fmt;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};

/// Largest supported number of variables.
pub const MAX_VARS: usize = 64;

/// Set of zero-row indices (0-based).
pub type RowSet = FixedBitSet;

pub(crate) fn check_dim(n: usize) -> Result<()> {
    if n == 0 || n > MAX_VARS {
        return Err(Error::invalid(format!(
            "number of variables must be in 1..={MAX_VARS}, got {n}"
        )));
    }
    Ok(())
}

#[inline]
pub(crate) fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Sort key that orders `n`-bit words as their strings `x_1 x_2 ... x_n`.
#[inline]
pub(crate) fn lex_key(bits: u64, n: usize) -> u64 {
    bits.reverse_bits() >> (64 - n)
}

/// `min(#zeros, #ones)` of a non-empty bit vector.
pub fn vector_weight<I: IntoIterator<Item = bool>>(bits: I) -> Result<usize> {
    let (mut len, mut ones) = (0usize, 0usize);
    for b in bits {
        len += 1;
        ones += b as usize;
    }
    if len == 0 {
        return Err(Error::invalid("vector weight of an empty vector"));
    }
    Ok(ones.min(len - ones))
}

/// A vertex of the Boolean cube `B^n`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Point {
    bits: u64,
    n: usize,
}

impl Point {
    pub fn new(bits: u64, n: usize) -> Result<Self> {
        check_dim(n)?;
        if bits & !full_mask(n) != 0 {
            return Err(Error::invalid(format!("point {bits:#x} has bits beyond n = {n}")));
        }
        Ok(Point { bits, n })
    }

    pub(crate) fn from_raw(bits: u64, n: usize) -> Self {
        debug_assert!(bits & !full_mask(n) == 0);
        Point { bits, n }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let n = s.len();
        check_dim(n)?;
        let mut bits = 0u64;
        for (j, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => bits |= 1 << j,
                _ => return Err(Error::invalid(format!("bad character {c:?} in point {s:?}"))),
            }
        }
        Ok(Point { bits, n })
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Value of variable `j` (0-based).
    pub fn get(&self, j: usize) -> bool {
        self.bits >> j & 1 == 1
    }

    pub fn ones(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn weight(&self) -> usize {
        self.ones().min(self.n - self.ones())
    }

    pub fn negate(&self) -> Point {
        Point::from_raw(!self.bits & full_mask(self.n), self.n)
    }

    pub fn flip(&self, j: usize) -> Point {
        Point::from_raw(self.bits ^ (1 << j), self.n)
    }

    pub fn hamming(&self, other: &Point) -> Result<usize> {
        same_dim(self.n, other.n)?;
        Ok((self.bits ^ other.bits).count_ones() as usize)
    }

    pub(crate) fn lex_key(&self) -> u64 {
        lex_key(self.bits, self.n)
    }
}

/// Points compare in the order of their strings.
impl Ord for Point {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n
            .cmp(&other.n)
            .then_with(|| self.lex_key().cmp(&other.lex_key()))
    }
}

impl PartialOrd for Point {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for j in 0..self.n {
            f.write_str(if self.get(j) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Point({self})")
    }
}

fn same_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// True iff `u` and `v` are at Hamming distance exactly one.
pub fn adjacent(u: &Point, v: &Point) -> Result<bool> {
    Ok(u.hamming(v)? == 1)
}

/// Per-variable value of a cube.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ternary {
    Zero,
    One,
    Free,
}

/// An elementary conjunction. `fixed` marks the variables that appear as
/// literals, `value` their signs; `value` is always a subset of `fixed`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Cube {
    fixed: u64,
    value: u64,
    n: usize,
}

impl Cube {
    pub fn new(fixed: u64, value: u64, n: usize) -> Result<Self> {
        check_dim(n)?;
        if fixed & !full_mask(n) != 0 || value & !fixed != 0 {
            return Err(Error::invalid("cube value bits must lie inside the fixed mask"));
        }
        Ok(Cube { fixed, value, n })
    }

    pub(crate) fn from_raw(fixed: u64, value: u64, n: usize) -> Self {
        debug_assert!(value & !fixed == 0 && fixed & !full_mask(n) == 0);
        Cube { fixed, value, n }
    }

    /// The empty conjunction (constant 1).
    pub fn full(n: usize) -> Result<Self> {
        Cube::new(0, 0, n)
    }

    /// Parses `0`, `1` and `-` (or `*`) per variable.
    pub fn parse(s: &str) -> Result<Self> {
        let n = s.len();
        check_dim(n)?;
        let (mut fixed, mut value) = (0u64, 0u64);
        for (j, c) in s.chars().enumerate() {
            match c {
                '0' => fixed |= 1 << j,
                '1' => {
                    fixed |= 1 << j;
                    value |= 1 << j;
                }
                '-' | '*' => {}
                _ => return Err(Error::invalid(format!("bad character {c:?} in cube {s:?}"))),
            }
        }
        Ok(Cube { fixed, value, n })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn fixed_mask(&self) -> u64 {
        self.fixed
    }

    pub fn value_mask(&self) -> u64 {
        self.value
    }

    pub fn get(&self, j: usize) -> Ternary {
        if self.fixed >> j & 1 == 0 {
            Ternary::Free
        } else if self.value >> j & 1 == 1 {
            Ternary::One
        } else {
            Ternary::Zero
        }
    }

    pub fn rank(&self) -> usize {
        self.fixed.count_ones() as usize
    }

    /// Number of positive literals.
    pub fn rank_pos(&self) -> usize {
        self.value.count_ones() as usize
    }

    /// Number of negated literals.
    pub fn rank_neg(&self) -> usize {
        self.rank() - self.rank_pos()
    }

    /// `|N_K| = 2^(n - rank)`, saturating at `u64::MAX` for `n - rank = 64`.
    pub fn volume(&self) -> u64 {
        let free = self.n - self.rank();
        if free >= 64 {
            u64::MAX
        } else {
            1 << free
        }
    }

    #[inline]
    pub(crate) fn contains_bits(&self, p: u64) -> bool {
        (p ^ self.value) & self.fixed == 0
    }

    pub fn contains(&self, p: &Point) -> Result<bool> {
        same_dim(self.n, p.n)?;
        Ok(self.contains_bits(p.bits))
    }

    /// Same cube with variable `j` freed.
    pub fn without(&self, j: usize) -> Cube {
        Cube::from_raw(self.fixed & !(1 << j), self.value & !(1 << j), self.n)
    }

    /// True iff every point of `self` lies in `other`.
    pub fn is_subcube_of(&self, other: &Cube) -> bool {
        self.n == other.n
            && other.fixed & !self.fixed == 0
            && (self.value ^ other.value) & other.fixed == 0
    }

    pub(crate) fn intersects(&self, other: &Cube) -> bool {
        (self.value ^ other.value) & self.fixed & other.fixed == 0
    }

    /// Iterates the points of `N_K` in increasing numeric order of their bits.
    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        let free = !self.fixed & full_mask(self.n);
        let mut sub = 0u64;
        let mut done = false;
        std::iter::from_fn(move || {
            if done {
                return None;
            }
            let p = Point::from_raw(self.value | sub, self.n);
            sub = sub.wrapping_sub(free) & free;
            done = sub == 0;
            Some(p)
        })
    }

    fn code(&self, j: usize) -> u8 {
        match self.get(j) {
            Ternary::Zero => 0,
            Ternary::One => 1,
            Ternary::Free => 2,
        }
    }
}

/// True iff every fixed position of `cube` agrees with `p`.
pub fn cube_contains(cube: &Cube, p: &Point) -> Result<bool> {
    cube.contains(p)
}

/// Canonical order: rank ascending, then the ternary string with
/// `0 < 1 < -`.
impl Ord for Cube {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n
            .cmp(&other.n)
            .then_with(|| self.rank().cmp(&other.rank()))
            .then_with(|| {
                (0..self.n)
                    .map(|j| self.code(j).cmp(&other.code(j)))
                    .find(|o| o.is_ne())
                    .unwrap_or(Ordering::Equal)
            })
    }
}

impl PartialOrd for Cube {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Cube {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for j in 0..self.n {
            f.write_str(match self.get(j) {
                Ternary::Zero => "0",
                Ternary::One => "1",
                Ternary::Free => "-",
            })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Cube {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cube({self})")
    }
}

/// A disjunction of cubes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dnf {
    n: usize,
    cubes: Vec<Cube>,
}

impl Dnf {
    pub fn new(n: usize, cubes: Vec<Cube>) -> Result<Self> {
        check_dim(n)?;
        if let Some(c) = cubes.iter().find(|c| c.n != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: c.n,
            });
        }
        Ok(Dnf { n, cubes })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn cubes(&self) -> &[Cube] {
        &self.cubes
    }

    /// Number of conjunctions.
    pub fn length(&self) -> usize {
        self.cubes.len()
    }

    /// Total number of literal occurrences.
    pub fn rank(&self) -> usize {
        self.cubes.iter().map(Cube::rank).sum()
    }

    pub fn eval(&self, p: &Point) -> Result<bool> {
        same_dim(self.n, p.n)?;
        Ok(self.cubes.iter().any(|c| c.contains_bits(p.bits)))
    }
}

/// The `k x n` matrix whose rows are the zeros of a function.
///
/// Rows are distinct and kept in canonical (string-lexicographic) order; row
/// indices used throughout the crate are 0-based positions in that order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ZeroMatrix {
    n: usize,
    rows: Vec<u64>,
}

impl ZeroMatrix {
    /// Builds the matrix, sorting rows canonically. Duplicate rows are an
    /// error.
    pub fn new(n: usize, rows: Vec<Point>) -> Result<Self> {
        check_dim(n)?;
        let mut raw = Vec::with_capacity(rows.len());
        for p in &rows {
            same_dim(n, p.n)?;
            raw.push(p.bits);
        }
        Self::from_bits(n, raw)
    }

    pub fn from_bits(n: usize, mut rows: Vec<u64>) -> Result<Self> {
        check_dim(n)?;
        if rows.iter().any(|&r| r & !full_mask(n) != 0) {
            return Err(Error::invalid(format!("row has bits beyond n = {n}")));
        }
        rows.sort_unstable_by_key(|&r| lex_key(r, n));
        if let Some(w) = rows.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::invalid(format!(
                "duplicate zero row {}",
                Point::from_raw(w[0], n)
            )));
        }
        Ok(ZeroMatrix { n, rows })
    }

    pub fn from_strs<S: AsRef<str>>(rows: &[S]) -> Result<Self> {
        let first = rows
            .first()
            .ok_or_else(|| Error::invalid("cannot infer n from an empty row list"))?;
        let n = first.as_ref().len();
        let pts = rows
            .iter()
            .map(|s| Point::parse(s.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, pts)
    }

    /// The function with no zeros (constant 1).
    pub fn empty(n: usize) -> Result<Self> {
        check_dim(n)?;
        Ok(ZeroMatrix { n, rows: Vec::new() })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, i: usize) -> Point {
        Point::from_raw(self.rows[i], self.n)
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = Point> + '_ {
        self.rows.iter().map(move |&r| Point::from_raw(r, self.n))
    }

    pub(crate) fn raw_rows(&self) -> &[u64] {
        &self.rows
    }

    pub fn entry(&self, i: usize, j: usize) -> bool {
        self.rows[i] >> j & 1 == 1
    }

    pub fn is_zero(&self, p: &Point) -> bool {
        p.n == self.n && self.index_of(p.bits).is_some()
    }

    pub(crate) fn index_of(&self, bits: u64) -> Option<usize> {
        let n = self.n;
        self.rows
            .binary_search_by_key(&lex_key(bits, n), |&r| lex_key(r, n))
            .ok()
    }

    /// Column `j` as an indicator over rows.
    pub fn column(&self, j: usize) -> Result<IndicatorVector> {
        self.check_col(j)?;
        let mut bits = FixedBitSet::with_capacity(self.k());
        for (i, &r) in self.rows.iter().enumerate() {
            bits.set(i, r >> j & 1 == 1);
        }
        Ok(IndicatorVector { bits })
    }

    pub(crate) fn check_col(&self, j: usize) -> Result<()> {
        if j >= self.n {
            return Err(Error::invalid(format!(
                "column {j} out of range for n = {}",
                self.n
            )));
        }
        Ok(())
    }

    pub(crate) fn check_row(&self, i: usize) -> Result<()> {
        if i >= self.k() {
            return Err(Error::invalid(format!(
                "row {i} out of range for k = {}",
                self.k()
            )));
        }
        Ok(())
    }

    /// Number of one-points `|N_f| = 2^n - k`, if it fits.
    pub fn ones_count(&self) -> Option<u64> {
        if self.n >= 64 {
            None
        } else {
            Some((1u64 << self.n) - self.k() as u64)
        }
    }

    /// Iterates the one-points of the function in increasing numeric order.
    /// Only sensible for small `n`.
    pub fn one_points(&self) -> impl Iterator<Item = Point> + '_ {
        let mut zeros = self.rows.clone();
        zeros.sort_unstable();
        let end = full_mask(self.n);
        let n = self.n;
        (0..=end)
            .filter(move |b| zeros.binary_search(b).is_err())
            .map(move |b| Point::from_raw(b, n))
    }
}

impl fmt::Debug for ZeroMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows().map(|p| p.to_string())).finish()
    }
}

/// Complements every column with more ones than zeros. Ties are left alone.
/// Returns the reduced matrix and the mask of flipped columns.
pub fn normalize_reduced(m: &ZeroMatrix) -> (ZeroMatrix, u64) {
    let k = m.k();
    let mut mask = 0u64;
    for j in 0..m.n {
        let ones = m.rows.iter().filter(|&&r| r >> j & 1 == 1).count();
        if ones > k - ones {
            mask |= 1 << j;
        }
    }
    (apply_flip(m, mask), mask)
}

/// XORs every row with `mask`.
pub fn apply_flip(m: &ZeroMatrix, mask: u64) -> ZeroMatrix {
    let mask = mask & full_mask(m.n);
    let mut rows: Vec<u64> = m.rows.iter().map(|r| r ^ mask).collect();
    rows.sort_unstable_by_key(|&r| lex_key(r, m.n));
    ZeroMatrix { n: m.n, rows }
}

/// True iff two zeros are at Hamming distance one.
pub fn has_adjacent_zeros(m: &ZeroMatrix) -> bool {
    let mut sorted = m.rows.clone();
    sorted.sort_unstable();
    m.rows.iter().any(|&r| {
        (0..m.n).any(|j| {
            let q = r ^ (1 << j);
            sorted.binary_search(&q).is_ok()
        })
    })
}

/// `E(t)` (rows with a one in column `t`) and its complement `Z(t)`.
pub fn column_sets(m: &ZeroMatrix, t: usize) -> Result<(RowSet, RowSet)> {
    let e = m.column(t)?.bits;
    let mut z = e.clone();
    z.toggle_range(..);
    Ok((e, z))
}

/// A vector of `B_k`, read as a set of zero-row indices.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IndicatorVector {
    bits: FixedBitSet,
}

impl IndicatorVector {
    pub fn zeros(k: usize) -> Self {
        IndicatorVector {
            bits: FixedBitSet::with_capacity(k),
        }
    }

    /// The all-ones vector `I_k`.
    pub fn ones(k: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(k);
        bits.insert_range(..);
        IndicatorVector { bits }
    }

    /// `e_i^k` for 0-based `i`: the single bit at position `i`.
    pub fn unit(i: usize, k: usize) -> Result<Self> {
        if i >= k {
            return Err(Error::invalid(format!("unit index {i} out of range for k = {k}")));
        }
        let mut v = Self::zeros(k);
        v.bits.insert(i);
        Ok(v)
    }

    pub fn from_bits(bits: FixedBitSet) -> Self {
        IndicatorVector { bits }
    }

    pub fn from_bools(bools: &[bool]) -> Self {
        let mut bits = FixedBitSet::with_capacity(bools.len());
        for (i, &b) in bools.iter().enumerate() {
            bits.set(i, b);
        }
        IndicatorVector { bits }
    }

    /// Parses a `0`/`1` string, position 0 first.
    pub fn parse(s: &str) -> Result<Self> {
        let bools = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::invalid(format!("bad character {c:?} in vector {s:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_bools(&bools))
    }

    /// Inverse of [`IndicatorVector::chi`].
    pub fn from_chi(value: u64, k: usize) -> Result<Self> {
        if k > 64 || (k < 64 && value >> k != 0) {
            return Err(Error::invalid(format!("{value} is not a valid chi value for k = {k}")));
        }
        let mut v = Self::zeros(k);
        for i in 0..k {
            v.bits.set(i, value >> i & 1 == 1);
        }
        Ok(v)
    }

    /// Integer whose binary expansion is this vector, position 0 least
    /// significant.
    pub fn chi(&self) -> Result<u64> {
        if self.len() > 64 {
            return Err(Error::invalid("chi is only defined here for k <= 64"));
        }
        Ok(self.bits.ones().map(|i| 1u64 << i).sum())
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn as_bits(&self) -> &FixedBitSet {
        &self.bits
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits.contains(i)
    }

    pub fn count_ones(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_zero(&self) -> bool {
        self.bits.is_clear()
    }

    pub fn weight(&self) -> Result<usize> {
        vector_weight((0..self.len()).map(|i| self.get(i)))
    }

    /// Whether the first coordinate is set (membership in `B_k^1`).
    pub fn first(&self) -> Option<bool> {
        (!self.is_empty()).then(|| self.get(0))
    }

    pub fn negate(&self) -> Self {
        let mut bits = self.bits.clone();
        bits.toggle_range(..);
        IndicatorVector { bits }
    }

    /// Inner product over the integers.
    pub fn dot(&self, other: &Self) -> usize {
        self.bits.intersection_count(&other.bits)
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.bits.is_subset(&other.bits)
    }
}

impl fmt::Display for IndicatorVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len() {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for IndicatorVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IndicatorVector({self})")
    }
}
