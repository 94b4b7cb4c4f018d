//! Pixel-processor-array register planes.
//!
//! A [`BitPlane`] stands in for one digital register (DREG) across the whole
//! 256×256 array and a [`GrayPlane`] for a captured 8-bit frame. Every kernel
//! here is a pure function producing a new plane; the sequential code is
//! exactly equivalent to the array-wide parallel operation it emulates.
//!
//! Indexing is `(x, y)` = (row, column). Row 0 is the top of the image and
//! row 255 the bottom, nearest to the robot.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Side length of the square array.
pub const SIZE: usize = 256;
/// Pixels per plane.
pub const PIXELS: usize = SIZE * SIZE;

const WORDS: usize = SIZE / 64;

type Row = [u64; WORDS];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PpaError {
    #[error("pixel ({x}, {y}) is outside the {SIZE}x{SIZE} array")]
    OutOfRange { x: usize, y: usize },
    #[error("bounding box requested on an empty plane")]
    EmptyPlane,
    #[error("expected {PIXELS} pixels, got {0}")]
    BadDimensions(usize),
}

/// 8-bit grayscale frame, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct GrayPlane {
    pixels: Box<[u8]>,
}

impl GrayPlane {
    pub fn filled(value: u8) -> Self {
        Self { pixels: vec![value; PIXELS].into_boxed_slice() }
    }

    pub fn from_vec(pixels: Vec<u8>) -> Result<Self, PpaError> {
        if pixels.len() != PIXELS {
            return Err(PpaError::BadDimensions(pixels.len()));
        }
        Ok(Self { pixels: pixels.into_boxed_slice() })
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[x * SIZE + y]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: u8) {
        self.pixels[x * SIZE + y] = value;
    }

    /// Row-major bytes, row 0 first.
    pub fn as_bytes(&self) -> &[u8] {
        &self.pixels
    }

    pub fn row_mut(&mut self, x: usize) -> &mut [u8] {
        &mut self.pixels[x * SIZE..(x + 1) * SIZE]
    }
}

impl fmt::Debug for GrayPlane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let min = self.pixels.iter().min().copied().unwrap_or(0);
        let max = self.pixels.iter().max().copied().unwrap_or(0);
        write!(f, "GrayPlane {{ {SIZE}x{SIZE}, min: {min}, max: {max} }}")
    }
}

/// Array position, row `x` and column `y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PixelCoord {
    pub x: usize,
    pub y: usize,
}

impl PixelCoord {
    pub fn new(x: usize, y: usize) -> Result<Self, PpaError> {
        if x >= SIZE || y >= SIZE {
            return Err(PpaError::OutOfRange { x, y });
        }
        Ok(Self { x, y })
    }
}

/// Tight axis-aligned extent of a set of pixels, inclusive on both ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundingBox {
    pub x_min: usize,
    pub x_max: usize,
    pub y_min: usize,
    pub y_max: usize,
}

impl BoundingBox {
    /// Bottom edge midpoint: `(x_max, floor((y_min + y_max) / 2))`.
    pub fn bottom_center(&self) -> PixelCoord {
        PixelCoord { x: self.x_max, y: (self.y_min + self.y_max) / 2 }
    }

    pub fn height(&self) -> usize {
        self.x_max - self.x_min + 1
    }

    pub fn width(&self) -> usize {
        self.y_max - self.y_min + 1
    }
}

/// Comparison sense for [`threshold`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    /// bit = 1 where pixel ≥ t
    Above,
    /// bit = 1 where pixel < t
    Below,
}

impl Polarity {
    pub fn flipped(self) -> Self {
        match self {
            Polarity::Above => Polarity::Below,
            Polarity::Below => Polarity::Above,
        }
    }
}

/// Order in which [`scan_first_event_in`] reads out the array.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScanOrder {
    /// Rows top to bottom, columns left to right within a row.
    #[default]
    RowMajor,
    /// Rows bottom to top, columns right to left.
    ReverseRowMajor,
}

/// One-bit register plane, bit-packed four `u64` words per row.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitPlane {
    rows: Box<[Row; SIZE]>,
}

impl Default for BitPlane {
    fn default() -> Self {
        Self::zeros()
    }
}

impl BitPlane {
    pub fn zeros() -> Self {
        Self { rows: Box::new([[0; WORDS]; SIZE]) }
    }

    pub fn ones() -> Self {
        Self { rows: Box::new([[u64::MAX; WORDS]; SIZE]) }
    }

    /// Builds a plane by evaluating `f(x, y)` at every pixel.
    pub fn from_fn(mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut plane = Self::zeros();
        for x in 0..SIZE {
            for y in 0..SIZE {
                if f(x, y) {
                    plane.set(x, y, true);
                }
            }
        }
        plane
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        (self.rows[x][y / 64] >> (y % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        let mask = 1u64 << (y % 64);
        if value {
            self.rows[x][y / 64] |= mask;
        } else {
            self.rows[x][y / 64] &= !mask;
        }
    }

    pub fn popcount(&self) -> u32 {
        self.rows.iter().flatten().map(|w| w.count_ones()).sum()
    }

    pub fn is_empty(&self) -> bool {
        !global_or(self)
    }

    /// Coordinates of all set bits in row-major order.
    pub fn ones_iter(&self) -> impl Iterator<Item = PixelCoord> + '_ {
        self.rows.iter().enumerate().flat_map(|(x, row)| {
            row.iter()
                .enumerate()
                .flat_map(move |(w, &word)| BitIter(word).map(move |b| PixelCoord { x, y: w * 64 + b }))
        })
    }

    fn zip_with(&self, other: &Self, op: impl Fn(u64, u64) -> u64) -> Self {
        let mut out = Self::zeros();
        for ((o, a), b) in out.rows.iter_mut().zip(self.rows.iter()).zip(other.rows.iter()) {
            for i in 0..WORDS {
                o[i] = op(a[i], b[i]);
            }
        }
        out
    }

    pub fn and(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn or(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a | b)
    }
}

impl fmt::Debug for BitPlane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitPlane {{ popcount: {} }}", self.popcount())
    }
}

struct BitIter(u64);

impl Iterator for BitIter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let b = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(b)
    }
}

// Column shifts across the packed words. `toward_high` moves column y to y+1.
#[inline]
fn shift_toward_high(r: &Row) -> Row {
    let mut out = [0; WORDS];
    for i in 0..WORDS {
        out[i] = r[i] << 1;
        if i > 0 {
            out[i] |= r[i - 1] >> 63;
        }
    }
    out
}

#[inline]
fn shift_toward_low(r: &Row) -> Row {
    let mut out = [0; WORDS];
    for i in 0..WORDS {
        out[i] = r[i] >> 1;
        if i + 1 < WORDS {
            out[i] |= r[i + 1] << 63;
        }
    }
    out
}

#[inline]
fn row_op(a: &Row, b: &Row, op: impl Fn(u64, u64) -> u64) -> Row {
    let mut out = [0; WORDS];
    for i in 0..WORDS {
        out[i] = op(a[i], b[i]);
    }
    out
}

/// Binarises a frame. Obstacles must come out as 1.
pub fn threshold(g: &GrayPlane, t: u8, polarity: Polarity) -> BitPlane {
    let mut out = BitPlane::zeros();
    for (x, row) in g.pixels.chunks_exact(SIZE).enumerate() {
        for (w, chunk) in row.chunks_exact(64).enumerate() {
            let word = chunk.iter().rev().fold(0u64, |w, &p| (w << 1) | (p < t) as u64);
            out.rows[x][w] = match polarity {
                Polarity::Below => word,
                Polarity::Above => !word,
            };
        }
    }
    out
}

/// 3×3 erosion. Pixels outside the array read as 0.
pub fn erode3x3(b: &BitPlane) -> BitPlane {
    let mut horiz = [[0u64; WORDS]; SIZE];
    for (h, r) in horiz.iter_mut().zip(b.rows.iter()) {
        let left = shift_toward_high(r);
        let right = shift_toward_low(r);
        *h = row_op(&row_op(r, &left, |a, b| a & b), &right, |a, b| a & b);
    }
    let mut out = BitPlane::zeros();
    for x in 0..SIZE {
        if x == 0 || x == SIZE - 1 {
            continue;
        }
        out.rows[x] = row_op(&row_op(&horiz[x - 1], &horiz[x], |a, b| a & b), &horiz[x + 1], |a, b| a & b);
    }
    out
}

/// 3×3 dilation.
pub fn dilate3x3(b: &BitPlane) -> BitPlane {
    let mut horiz = [[0u64; WORDS]; SIZE];
    for (h, r) in horiz.iter_mut().zip(b.rows.iter()) {
        let left = shift_toward_high(r);
        let right = shift_toward_low(r);
        *h = row_op(&row_op(r, &left, |a, b| a | b), &right, |a, b| a | b);
    }
    let mut out = BitPlane::zeros();
    for x in 0..SIZE {
        let mut acc = horiz[x];
        if x > 0 {
            acc = row_op(&acc, &horiz[x - 1], |a, b| a | b);
        }
        if x + 1 < SIZE {
            acc = row_op(&acc, &horiz[x + 1], |a, b| a | b);
        }
        out.rows[x] = acc;
    }
    out
}

/// Speckle removal: 3×3 morphological opening.
pub fn filter_noise(b: &BitPlane) -> BitPlane {
    dilate3x3(&erode3x3(b))
}

/// True iff any bit in the plane is set.
pub fn global_or(b: &BitPlane) -> bool {
    b.rows.iter().flatten().any(|&w| w != 0)
}

/// First set bit in row-major order, or `None` on an empty plane.
pub fn scan_first_event(b: &BitPlane) -> Option<PixelCoord> {
    scan_first_event_in(b, ScanOrder::RowMajor)
}

pub fn scan_first_event_in(b: &BitPlane, order: ScanOrder) -> Option<PixelCoord> {
    match order {
        ScanOrder::RowMajor => {
            for (x, row) in b.rows.iter().enumerate() {
                for (w, &word) in row.iter().enumerate() {
                    if word != 0 {
                        return Some(PixelCoord { x, y: w * 64 + word.trailing_zeros() as usize });
                    }
                }
            }
            None
        }
        ScanOrder::ReverseRowMajor => {
            for (x, row) in b.rows.iter().enumerate().rev() {
                for (w, &word) in row.iter().enumerate().rev() {
                    if word != 0 {
                        return Some(PixelCoord { x, y: w * 64 + 63 - word.leading_zeros() as usize });
                    }
                }
            }
            None
        }
    }
}

/// Plane with exactly one bit set at `c`.
pub fn load_point(c: PixelCoord) -> Result<BitPlane, PpaError> {
    if c.x >= SIZE || c.y >= SIZE {
        return Err(PpaError::OutOfRange { x: c.x, y: c.y });
    }
    let mut out = BitPlane::zeros();
    out.set(c.x, c.y, true);
    Ok(out)
}

/// Grows `r` within `m` along its own row until stable.
#[inline]
fn fill_row(r: Row, m: &Row) -> Row {
    let mut cur = row_op(&r, m, |a, b| a & b);
    loop {
        let grown =
            row_op(&row_op(&cur, &shift_toward_high(&cur), |a, b| a | b), &shift_toward_low(&cur), |a, b| a | b);
        let next = row_op(&grown, m, |a, b| a & b);
        if next == cur {
            return cur;
        }
        cur = next;
    }
}

/// Union of the 4-connected components of `mask` touched by `seed`.
///
/// Seed bits lying on 0 mask pixels contribute nothing, so a seed disjoint
/// from the mask yields an empty plane.
pub fn flood(seed: &BitPlane, mask: &BitPlane) -> BitPlane {
    let mut cur = seed.and(mask);
    // Alternating top-down and bottom-up sweeps; each sweep propagates
    // vertically from the previous row and then fills horizontally.
    loop {
        let mut changed = false;
        for x in 0..SIZE {
            let mut r = cur.rows[x];
            if x > 0 {
                r = row_op(&r, &cur.rows[x - 1], |a, b| a | b);
            }
            let r = fill_row(r, &mask.rows[x]);
            if r != cur.rows[x] {
                cur.rows[x] = r;
                changed = true;
            }
        }
        for x in (0..SIZE).rev() {
            let mut r = cur.rows[x];
            if x + 1 < SIZE {
                r = row_op(&r, &cur.rows[x + 1], |a, b| a | b);
            }
            let r = fill_row(r, &mask.rows[x]);
            if r != cur.rows[x] {
                cur.rows[x] = r;
                changed = true;
            }
        }
        if !changed {
            return cur;
        }
    }
}

/// Tight bounds of all set bits.
pub fn scan_bounding_box(b: &BitPlane) -> Result<BoundingBox, PpaError> {
    let mut x_min = None;
    let mut x_max = 0;
    let mut col_union = [0u64; WORDS];
    for (x, row) in b.rows.iter().enumerate() {
        if row.iter().any(|&w| w != 0) {
            x_min.get_or_insert(x);
            x_max = x;
            col_union = row_op(&col_union, row, |a, b| a | b);
        }
    }
    let x_min = x_min.ok_or(PpaError::EmptyPlane)?;
    let first = col_union.iter().position(|&w| w != 0).expect("non-empty row union");
    let last = col_union.iter().rposition(|&w| w != 0).expect("non-empty row union");
    Ok(BoundingBox {
        x_min,
        x_max,
        y_min: first * 64 + col_union[first].trailing_zeros() as usize,
        y_max: last * 64 + 63 - col_union[last].leading_zeros() as usize,
    })
}

pub fn xor(a: &BitPlane, b: &BitPlane) -> BitPlane {
    a.zip_with(b, |a, b| a ^ b)
}

pub fn not(a: &BitPlane) -> BitPlane {
    let mut out = a.clone();
    out.rows.iter_mut().flatten().for_each(|w| *w = !*w);
    out
}
