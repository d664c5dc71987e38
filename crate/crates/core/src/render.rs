//! Level-`k` approximations of a carpet as binary PBM images.
//!
//! The allowed word `(a_1, b_1) ... (a_k, b_k)` fills the cell with column
//! `sum a_i l^(k-i)` and height `sum b_i m^(k-i)` in a grid of `l^k x m^k`
//! cells. Rows are written top-down, so the origin of the unit square is the
//! bottom-left corner of the image.

use std::io::{self, Write};

use crate::carpet::CarpetSpec;
use crate::error::{Error, Result};

pub const MAX_CELLS: u128 = 1 << 26;
pub const MAX_PIXELS: u128 = 1 << 30;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RasterImage {
    /// Grid size in cells.
    pub cells_x: usize,
    pub cells_y: usize,
    /// Pixels per cell side.
    pub scale: usize,
    pub filled: u64,
    /// Row-major, `occupied[row * cells_x + col]`, row 0 at the top.
    occupied: Vec<bool>,
}

impl RasterImage {
    pub fn width(&self) -> usize {
        self.cells_x * self.scale
    }

    pub fn height(&self) -> usize {
        self.cells_y * self.scale
    }

    /// Whether the cell in `row` (from the top) and `col` is filled.
    pub fn cell(&self, row: usize, col: usize) -> bool {
        self.occupied[row * self.cells_x + col]
    }

    /// Writes a binary (`P4`) portable bitmap; filled cells are black.
    pub fn write_pbm<W: Write>(&self, mut out: W) -> io::Result<()> {
        write!(out, "P4\n{} {}\n", self.width(), self.height())?;
        let row_bytes = self.width().div_ceil(8);
        let mut row = vec![0u8; row_bytes];
        for r in 0..self.cells_y {
            row.iter_mut().for_each(|b| *b = 0);
            for c in 0..self.cells_x {
                if self.cell(r, c) {
                    for px in c * self.scale..(c + 1) * self.scale {
                        row[px / 8] |= 0x80 >> (px % 8);
                    }
                }
            }
            for _ in 0..self.scale {
                out.write_all(&row)?;
            }
        }
        Ok(())
    }

    pub fn to_pbm(&self) -> Vec<u8> {
        let mut v = Vec::new();
        self.write_pbm(&mut v).expect("writing to a vector");
        v
    }
}

/// Rasterizes the level-`k` approximation of `spec`.
pub fn render_carpet(spec: &CarpetSpec, k: usize, scale: usize) -> Result<RasterImage> {
    if k == 0 || scale == 0 {
        return Err(Error::Precondition("render needs k >= 1 and scale >= 1".into()));
    }
    let pow = |b: u32| -> Option<u128> { (b as u128).checked_pow(k as u32) };
    let (cx, cy) = match (pow(spec.l()), pow(spec.m())) {
        (Some(x), Some(y)) => (x, y),
        _ => {
            return Err(Error::RenderBudget {
                cells: u128::MAX,
                limit: MAX_CELLS,
            })
        }
    };
    let cells = cx.saturating_mul(cy);
    if cells > MAX_CELLS {
        return Err(Error::RenderBudget {
            cells,
            limit: MAX_CELLS,
        });
    }
    let pixels = cells * (scale as u128) * (scale as u128);
    if pixels > MAX_PIXELS {
        return Err(Error::RenderBudget {
            cells: pixels,
            limit: MAX_PIXELS,
        });
    }
    let (cx, cy) = (cx as usize, cy as usize);
    let sft = spec.sft()?;
    let digits = spec.digits();
    let mut occupied = vec![false; cx * cy];
    let mut filled = 0u64;
    // (last symbol, depth, column, height)
    let mut stack: Vec<(usize, usize, usize, usize)> = (0..digits.len())
        .map(|s| (s, 1, digits[s].0 as usize, digits[s].1 as usize))
        .collect();
    while let Some((s, d, x, y)) = stack.pop() {
        if d == k {
            let row = cy - 1 - y;
            occupied[row * cx + x] = true;
            filled += 1;
            continue;
        }
        for &t in sft.successors(s) {
            let (a, b) = digits[t];
            stack.push((
                t,
                d + 1,
                x * spec.l() as usize + a as usize,
                y * spec.m() as usize + b as usize,
            ));
        }
    }
    Ok(RasterImage {
        cells_x: cx,
        cells_y: cy,
        scale,
        filled,
        occupied,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;

    #[test]
    fn full_torus_is_filled() {
        let spec = CarpetSpec::from_column_counts(3, 2, &[3, 3]).unwrap();
        let img = render_carpet(&spec, 3, 1).unwrap();
        assert_eq!(img.filled, 27 * 8);
        assert!((0..8).all(|r| (0..27).all(|c| img.cell(r, c))));
    }

    #[test]
    fn single_digit_is_origin_corner() {
        let spec = CarpetSpec::full(3, 2, vec![(0, 0)]).unwrap();
        let img = render_carpet(&spec, 2, 2).unwrap();
        assert_eq!(img.filled, 1);
        assert!(img.cell(3, 0));
        let pbm = img.to_pbm();
        assert!(pbm.starts_with(b"P4\n18 8\n"));
        let body = &pbm[b"P4\n18 8\n".len()..];
        assert_eq!(body.len(), 3 * 8);
        // bottom two pixel rows carry the two leftmost pixels
        assert_eq!(&body[18..], &[0xC0, 0, 0, 0xC0, 0, 0]);
        assert!(body[..18].iter().all(|&b| b == 0));
    }

    #[test]
    fn filled_cells_match_word_count() {
        let spec = CarpetSpec::new(
            4,
            3,
            vec![(0, 2), (3, 1), (2, 0), (1, 0)],
            vec![
                vec![true, true, false, true],
                vec![true, false, true, false],
                vec![false, true, true, true],
                vec![true, true, true, false],
            ],
        )
        .unwrap();
        for k in 1..=4 {
            let img = render_carpet(&spec, k, 1).unwrap();
            assert_eq!(BigUint::from(img.filled), spec.sft().unwrap().word_count(k));
        }
    }

    #[test]
    fn budget() {
        let spec = CarpetSpec::from_column_counts(3, 2, &[2, 1]).unwrap();
        assert!(matches!(render_carpet(&spec, 11, 1), Err(Error::RenderBudget { .. })));
        assert!(render_carpet(&spec, 10, 1).is_ok());
        assert!(matches!(render_carpet(&spec, 10, 8), Err(Error::RenderBudget { .. })));
    }
}
