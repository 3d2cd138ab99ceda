use alloc::vec::Vec;

use crate::error::{check_len, Error, Result};

/// Image dimensions: `rows` (n) by `cols` (m).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Shape {
    pub rows: usize,
    pub cols: usize,
}

impl Shape {
    pub fn new(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyImage { rows, cols });
        }
        Ok(Self { rows, cols })
    }

    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Column-major index of pixel `(row, col)`, both zero-based.
    #[inline]
    pub fn index(&self, row: usize, col: usize) -> usize {
        col * self.rows + row
    }

    /// Row-major index of pixel `(row, col)`, both zero-based.
    #[inline]
    pub fn row_major_index(&self, row: usize, col: usize) -> usize {
        row * self.cols + col
    }

    pub(crate) fn check_same(&self, other: &Shape) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::ShapeMismatch {
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: other.rows,
                right_cols: other.cols,
            })
        }
    }
}

/// A grayscale image with real-valued intensities, stored column-major.
///
/// Pixel `(i, j)` (zero-based row `i`, column `j`) lives at
/// `data[j * rows + i]`. Intensities are nominally in `[0, 255]` but are never
/// clamped here; clamping only happens when writing 8-bit files.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    shape: Shape,
    data: Vec<f64>,
}

impl Image {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        let shape = Shape::new(rows, cols)?;
        check_len(shape.len(), data.len())?;
        Ok(Self { shape, data })
    }

    pub fn from_shape(shape: Shape, data: Vec<f64>) -> Result<Self> {
        Self::new(shape.rows, shape.cols, data)
    }

    pub fn filled(rows: usize, cols: usize, value: f64) -> Result<Self> {
        let shape = Shape::new(rows, cols)?;
        Ok(Self {
            shape,
            data: alloc::vec![value; shape.len()],
        })
    }

    /// Builds an image from a row-major raster (the order used by most file formats).
    pub fn from_row_major(rows: usize, cols: usize, raster: &[f64]) -> Result<Self> {
        let shape = Shape::new(rows, cols)?;
        check_len(shape.len(), raster.len())?;
        let data = crate::grid::apply_pt(shape, raster)?;
        Ok(Self { shape, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let shape = Shape::new(rows, cols)?;
        let mut data = Vec::with_capacity(shape.len());
        for j in 0..cols {
            for i in 0..rows {
                data.push(f(i, j));
            }
        }
        Ok(Self { shape, data })
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn rows(&self) -> usize {
        self.shape.rows
    }

    pub fn cols(&self) -> usize {
        self.shape.cols
    }

    /// Column-major pixel values.
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[self.shape.index(row, col)]
    }

    /// Pixel values in row-major (raster) order.
    pub fn to_row_major(&self) -> Vec<f64> {
        crate::grid::apply_p(self.shape, &self.data).expect("image invariant")
    }

    pub fn map(&self, mut f: impl FnMut(f64) -> f64) -> Image {
        Image {
            shape: self.shape,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }
}
