//! Bit-true 16-bit fixed-point datapath shared by the reference
//! implementations and the cycle-accurate engine.
//!
//! Activations are Q13.2 (2 fractional bits), weights Q0.15 (15 fractional
//! bits). A multiply-accumulate aligns the 31-bit product back to the
//! activation scale with an arithmetic shift right by 15 and accumulates
//! into a saturating 24-bit register.

/// Fixed-point format of a 16-bit sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QFormat {
    /// Activation samples: 2 fractional bits.
    Activation,
    /// Weight samples: 15 fractional bits.
    Weight,
}

impl QFormat {
    pub const fn frac_bits(self) -> u32 {
        match self {
            QFormat::Activation => 2,
            QFormat::Weight => 15,
        }
    }

    /// Smallest representable step.
    pub fn lsb(self) -> f64 {
        1.0 / (1u32 << self.frac_bits()) as f64
    }
}

/// A 16-bit two's-complement sample tagged with its format.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fixed16 {
    raw: i16,
    format: QFormat,
}

impl Fixed16 {
    pub const fn from_raw(raw: i16, format: QFormat) -> Self {
        Fixed16 { raw, format }
    }

    pub const fn zero(format: QFormat) -> Self {
        Fixed16 { raw: 0, format }
    }

    pub const fn raw(self) -> i16 {
        self.raw
    }

    pub const fn format(self) -> QFormat {
        self.format
    }

    /// Round-to-nearest-even quantization, saturating at the format range.
    /// Saturation is silent; use [`Fixed16::quantize_counted`] to track it.
    pub fn quantize(x: f64, format: QFormat) -> Self {
        let mut sat = 0;
        Self::quantize_counted(x, format, &mut sat)
    }

    /// Quantize, incrementing `saturations` when the value clamps.
    pub fn quantize_counted(x: f64, format: QFormat, saturations: &mut u64) -> Self {
        let scaled = (x * (1u32 << format.frac_bits()) as f64).round_ties_even();
        let raw = if scaled > i16::MAX as f64 {
            *saturations += 1;
            i16::MAX
        } else if scaled < i16::MIN as f64 {
            *saturations += 1;
            i16::MIN
        } else {
            scaled as i16
        };
        Fixed16 { raw, format }
    }

    /// Real value represented by this sample: `raw * 2^(-frac_bits)`.
    pub fn value(self) -> f64 {
        self.raw as f64 * self.format.lsb()
    }
}

/// Saturation bounds of the 24-bit accumulator.
pub const ACC24_MAX: i32 = (1 << 23) - 1;
pub const ACC24_MIN: i32 = -(1 << 23);

/// A 24-bit two's-complement accumulator kept at the activation scale
/// (2 fractional bits). Saturates instead of wrapping.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Acc24(i32);

impl Acc24 {
    pub const ZERO: Acc24 = Acc24(0);

    /// Seed the accumulator from an activation-format bias.
    pub fn from_bias(bias: Fixed16) -> Self {
        debug_assert_eq!(bias.format(), QFormat::Activation);
        Acc24(bias.raw() as i32)
    }

    pub const fn raw(self) -> i32 {
        self.0
    }

    pub fn relu(self) -> Self {
        Acc24(self.0.max(0))
    }

    /// Requantize to an activation sample, clamping to the 16-bit range.
    pub fn to_activation(self, saturations: &mut u64) -> Fixed16 {
        let raw = if self.0 > i16::MAX as i32 {
            *saturations += 1;
            i16::MAX
        } else if self.0 < i16::MIN as i32 {
            *saturations += 1;
            i16::MIN
        } else {
            self.0 as i16
        };
        Fixed16::from_raw(raw, QFormat::Activation)
    }
}

/// One multiply-accumulate step of the PE datapath.
///
/// The 31-bit product of an activation (Q13.2) and a weight (Q0.15) carries
/// 17 fractional bits; an arithmetic shift right by 15 (rounding toward
/// negative infinity) restores the activation scale before the saturating
/// 24-bit add.
pub fn mac(acc: Acc24, x: Fixed16, w: Fixed16, saturations: &mut u64) -> Acc24 {
    debug_assert_eq!(x.format(), QFormat::Activation);
    debug_assert_eq!(w.format(), QFormat::Weight);
    let product = (x.raw() as i32) * (w.raw() as i32);
    let aligned = product >> 15;
    let sum = acc.raw() + aligned;
    if sum > ACC24_MAX {
        *saturations += 1;
        Acc24(ACC24_MAX)
    } else if sum < ACC24_MIN {
        *saturations += 1;
        Acc24(ACC24_MIN)
    } else {
        Acc24(sum)
    }
}
