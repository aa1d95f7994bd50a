//! Layer geometry descriptors. Input extents are post-padding: padded
//! pixels are explicit zeros in the input tensor, so output dimensions
//! follow the plain sliding-window formula with no padding term.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Geometry of one convolutional layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvLayerConfig {
    /// Input activation-map height, padding included.
    pub h_in: usize,
    /// Input activation-map width, padding included.
    pub w_in: usize,
    /// Input channels.
    pub c_in: usize,
    /// Filter height.
    pub h_f: usize,
    /// Filter width.
    pub w_f: usize,
    /// Stride.
    pub s: usize,
    /// Output channels.
    pub c_out: usize,
}

impl ConvLayerConfig {
    pub fn new(
        h_in: usize,
        w_in: usize,
        c_in: usize,
        h_f: usize,
        w_f: usize,
        s: usize,
        c_out: usize,
    ) -> Result<Self> {
        let cfg = ConvLayerConfig {
            h_in,
            w_in,
            c_in,
            h_f,
            w_f,
            s,
            c_out,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.h_in == 0
            || self.w_in == 0
            || self.c_in == 0
            || self.h_f == 0
            || self.w_f == 0
            || self.s == 0
            || self.c_out == 0
        {
            return Err(Error::Dimension("all layer fields must be >= 1".into()));
        }
        if self.h_f > self.h_in || self.w_f > self.w_in {
            return Err(Error::Dimension(format!(
                "filter {}x{} larger than input {}x{}",
                self.h_f, self.w_f, self.h_in, self.w_in
            )));
        }
        if !(self.h_in - self.h_f).is_multiple_of(self.s)
            || !(self.w_in - self.w_f).is_multiple_of(self.s)
        {
            return Err(Error::Dimension(format!(
                "input {}x{} minus filter {}x{} not divisible by stride {}",
                self.h_in, self.w_in, self.h_f, self.w_f, self.s
            )));
        }
        Ok(())
    }

    /// Output extents: ((h_in - h_f + s)/s, (w_in - w_f + s)/s).
    pub fn output_dims(&self) -> (usize, usize) {
        (
            (self.h_in - self.h_f + self.s) / self.s,
            (self.w_in - self.w_f + self.s) / self.s,
        )
    }

    pub fn output_pixels(&self) -> u64 {
        let (h, w) = self.output_dims();
        h as u64 * w as u64
    }

    pub fn macs(&self) -> u64 {
        self.output_pixels()
            * self.c_out as u64
            * self.h_f as u64
            * self.w_f as u64
            * self.c_in as u64
    }

    /// Two operations per multiply-accumulate.
    pub fn ops(&self) -> u64 {
        2 * self.macs()
    }

    pub fn weight_count(&self) -> u64 {
        self.h_f as u64 * self.w_f as u64 * self.c_in as u64 * self.c_out as u64
    }
}

/// Geometry of one fully-connected layer: n inputs, m outputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FcLayerConfig {
    pub n: usize,
    pub m: usize,
}

impl FcLayerConfig {
    pub fn new(n: usize, m: usize) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::Dimension("fc layer needs n >= 1 and m >= 1".into()));
        }
        Ok(FcLayerConfig { n, m })
    }

    pub fn macs(&self) -> u64 {
        self.n as u64 * self.m as u64
    }

    pub fn ops(&self) -> u64 {
        2 * self.macs()
    }

    pub fn weight_count(&self) -> u64 {
        self.macs()
    }
}

/// One layer of a network descriptor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum LayerConfig {
    Conv(ConvLayerConfig),
    Fc(FcLayerConfig),
}

impl LayerConfig {
    pub fn validate(&self) -> Result<()> {
        match self {
            LayerConfig::Conv(c) => c.validate(),
            LayerConfig::Fc(f) => {
                FcLayerConfig::new(f.n, f.m)?;
                Ok(())
            }
        }
    }

    pub fn is_conv(&self) -> bool {
        matches!(self, LayerConfig::Conv(_))
    }

    pub fn macs(&self) -> u64 {
        match self {
            LayerConfig::Conv(c) => c.macs(),
            LayerConfig::Fc(f) => f.macs(),
        }
    }

    pub fn ops(&self) -> u64 {
        2 * self.macs()
    }

    pub fn weight_count(&self) -> u64 {
        match self {
            LayerConfig::Conv(c) => c.weight_count(),
            LayerConfig::Fc(f) => f.weight_count(),
        }
    }
}
