//! Dense tensor containers with a fixed channel-major layout, plus the raw
//! binary tensor file format used to exchange functional test data.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::fixed::{Fixed16, QFormat};

/// A height x width x channels tensor stored channel-major: the flat index
/// of (z, t, k) is `(k * height + z) * width + t`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3<T> {
    pub height: usize,
    pub width: usize,
    pub channels: usize,
    data: Vec<T>,
}

impl<T: Copy> Tensor3<T> {
    pub fn filled(height: usize, width: usize, channels: usize, value: T) -> Self {
        Tensor3 {
            height,
            width,
            channels,
            data: vec![value; height * width * channels],
        }
    }

    pub fn from_fn(
        height: usize,
        width: usize,
        channels: usize,
        mut f: impl FnMut(usize, usize, usize) -> T,
    ) -> Self {
        let mut data = Vec::with_capacity(height * width * channels);
        for k in 0..channels {
            for z in 0..height {
                for t in 0..width {
                    data.push(f(z, t, k));
                }
            }
        }
        Tensor3 {
            height,
            width,
            channels,
            data,
        }
    }

    pub fn from_vec(height: usize, width: usize, channels: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != height * width * channels {
            return Err(Error::ShapeMismatch(format!(
                "tensor data length {} does not match {}x{}x{}",
                data.len(),
                height,
                width,
                channels
            )));
        }
        Ok(Tensor3 {
            height,
            width,
            channels,
            data,
        })
    }

    #[inline]
    fn index(&self, z: usize, t: usize, k: usize) -> usize {
        debug_assert!(z < self.height && t < self.width && k < self.channels);
        (k * self.height + z) * self.width + t
    }

    #[inline]
    pub fn get(&self, z: usize, t: usize, k: usize) -> T {
        self.data[self.index(z, t, k)]
    }

    #[inline]
    pub fn set(&mut self, z: usize, t: usize, k: usize, value: T) {
        let i = self.index(z, t, k);
        self.data[i] = value;
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn map<U: Copy>(&self, f: impl Fn(T) -> U) -> Tensor3<U> {
        Tensor3 {
            height: self.height,
            width: self.width,
            channels: self.channels,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }
}

/// Filters and biases of one convolutional layer. Weights are indexed by
/// (j, i, k, q): filter row, filter column, input channel, output channel.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterBank<T> {
    pub h_f: usize,
    pub w_f: usize,
    pub c_in: usize,
    pub c_out: usize,
    weights: Vec<T>,
    biases: Vec<T>,
}

impl<T: Copy> FilterBank<T> {
    pub fn from_fn(
        h_f: usize,
        w_f: usize,
        c_in: usize,
        c_out: usize,
        mut weight: impl FnMut(usize, usize, usize, usize) -> T,
        mut bias: impl FnMut(usize) -> T,
    ) -> Self {
        let mut weights = Vec::with_capacity(h_f * w_f * c_in * c_out);
        for q in 0..c_out {
            for k in 0..c_in {
                for j in 0..h_f {
                    for i in 0..w_f {
                        weights.push(weight(j, i, k, q));
                    }
                }
            }
        }
        let biases = (0..c_out).map(&mut bias).collect();
        FilterBank {
            h_f,
            w_f,
            c_in,
            c_out,
            weights,
            biases,
        }
    }

    #[inline]
    pub fn weight(&self, j: usize, i: usize, k: usize, q: usize) -> T {
        debug_assert!(j < self.h_f && i < self.w_f && k < self.c_in && q < self.c_out);
        self.weights[((q * self.c_in + k) * self.h_f + j) * self.w_f + i]
    }

    #[inline]
    pub fn bias(&self, q: usize) -> T {
        self.biases[q]
    }

    /// One filter flattened in the canonical accumulation order
    /// (channel-major, then filter row, then column).
    pub fn flatten_filter(&self, q: usize) -> Vec<T> {
        let mut out = Vec::with_capacity(self.h_f * self.w_f * self.c_in);
        for k in 0..self.c_in {
            for j in 0..self.h_f {
                for i in 0..self.w_f {
                    out.push(self.weight(j, i, k, q));
                }
            }
        }
        out
    }
}

/// Row-major matrix used for fully-connected weights (m rows of n).
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    pub rows: usize,
    pub cols: usize,
    data: Vec<T>,
}

impl<T: Copy> Matrix<T> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "matrix data length {} does not match {}x{}",
                data.len(),
                rows,
                cols
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> T {
        debug_assert!(r < self.rows && c < self.cols);
        self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }
}

/// Magic bytes of the binary tensor file format.
pub const TENSOR_MAGIC: [u8; 4] = *b"GFT1";

/// Write an activation tensor as raw little-endian 16-bit samples behind a
/// 16-byte header (magic, height, width, channels).
pub fn write_tensor(path: &Path, tensor: &Tensor3<Fixed16>) -> Result<()> {
    let mut file = File::create(path)?;
    file.write_all(&TENSOR_MAGIC)?;
    file.write_all(&(tensor.height as u32).to_le_bytes())?;
    file.write_all(&(tensor.width as u32).to_le_bytes())?;
    file.write_all(&(tensor.channels as u32).to_le_bytes())?;
    let mut bytes = Vec::with_capacity(tensor.len() * 2);
    for sample in tensor.data() {
        bytes.extend_from_slice(&sample.raw().to_le_bytes());
    }
    file.write_all(&bytes)?;
    Ok(())
}

/// Read a tensor written by [`write_tensor`]. Samples are interpreted as
/// activation-format values.
pub fn read_tensor(path: &Path) -> Result<Tensor3<Fixed16>> {
    let mut file = File::open(path)?;
    let mut header = [0u8; 16];
    file.read_exact(&mut header)?;
    if header[0..4] != TENSOR_MAGIC {
        return Err(Error::InvalidArgument(format!(
            "bad tensor magic in {}",
            path.display()
        )));
    }
    let h = u32::from_le_bytes(header[4..8].try_into().unwrap()) as usize;
    let w = u32::from_le_bytes(header[8..12].try_into().unwrap()) as usize;
    let c = u32::from_le_bytes(header[12..16].try_into().unwrap()) as usize;
    let mut bytes = Vec::new();
    file.read_to_end(&mut bytes)?;
    if bytes.len() != h * w * c * 2 {
        return Err(Error::ShapeMismatch(format!(
            "tensor payload is {} bytes, expected {} for {}x{}x{}",
            bytes.len(),
            h * w * c * 2,
            h,
            w,
            c
        )));
    }
    let data = bytes
        .chunks_exact(2)
        .map(|b| Fixed16::from_raw(i16::from_le_bytes([b[0], b[1]]), QFormat::Activation))
        .collect();
    Tensor3::from_vec(h, w, c, data)
}
