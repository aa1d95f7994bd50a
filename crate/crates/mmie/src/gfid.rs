//! The generalized fully-connected inspired dataflow (GFID).
//!
//! A 1-D filter-row pass over `n` output pixels is described by a sparse
//! schedule matrix: rows are clock cycles, columns are output pixels, and
//! the entry at (r, c) names the weight multiplied into output `c` at
//! cycle `r`. Column `c` starts at cycle `s*c` and runs the `w_f` weights
//! in order, so an entry exists iff `0 <= r - s*c <= w_f - 1` and then its
//! zero-based weight index is `k = r - s*c`.
//!
//! This module also derives the per-mode facts the engine needs: the
//! minimum active PE count, the reconfigurable tile grouping, and the
//! utilization-factor formulas.

use num_integer::Integer;

use crate::error::{Error, Result};

/// The five (filter width, stride) pairs the reconfigurable tile supports.
pub const SUPPORTED_MODES: [(usize, usize); 5] = [(1, 1), (3, 1), (5, 1), (7, 2), (11, 4)];

/// Physical PEs per reconfigurable tile.
pub const PES_PER_TILE: usize = 6;

/// Registers per weight-generator register set, capping supported filter
/// widths at 11.
pub const REGISTERS_PER_SET: usize = 11;

/// Schedule matrix of one filter-row pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GfidSchedule {
    pub w_f: usize,
    pub s: usize,
    /// Output pixels per row segment (columns).
    pub n: usize,
}

/// Build the schedule matrix for a filter row of width `w_f`, stride `s`
/// and `n` output pixels.
pub fn build_schedule(w_f: usize, s: usize, n: usize) -> Result<GfidSchedule> {
    if w_f == 0 || s == 0 || n == 0 {
        return Err(Error::Precondition(
            "schedule needs w_f >= 1, s >= 1, n >= 1".into(),
        ));
    }
    Ok(GfidSchedule { w_f, s, n })
}

impl GfidSchedule {
    /// Clock cycles of the pass: `s*n + w_f - s`.
    pub fn rows(&self) -> usize {
        self.s * self.n + self.w_f - self.s
    }

    pub fn cols(&self) -> usize {
        self.n
    }

    /// Zero-based weight index at (row, col), if the cell is scheduled.
    pub fn weight_index(&self, row: usize, col: usize) -> Option<usize> {
        if col >= self.n || row >= self.rows() {
            return None;
        }
        let start = self.s * col;
        if row >= start && row - start < self.w_f {
            Some(row - start)
        } else {
            None
        }
    }

    /// All scheduled cells as (row, col, weight_index).
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        (0..self.n).flat_map(move |c| (0..self.w_f).map(move |k| (self.s * c + k, c, k)))
    }

    pub fn row_entry_count(&self, row: usize) -> usize {
        (0..self.n)
            .filter(|&c| self.weight_index(row, c).is_some())
            .count()
    }

    /// Largest number of simultaneously scheduled columns over all cycles.
    pub fn max_row_entries(&self) -> usize {
        (0..self.rows())
            .map(|r| self.row_entry_count(r))
            .max()
            .unwrap_or(0)
    }

    /// Render the matrix as a text grid with one-based weight labels,
    /// matching the shape used in schedule listings.
    pub fn grid_string(&self) -> String {
        let cell = |r: usize, c: usize| match self.weight_index(r, c) {
            Some(k) => format!("W{}", k + 1),
            None => "0".to_string(),
        };
        let width = (0..self.rows())
            .flat_map(|r| (0..self.n).map(move |c| (r, c)))
            .map(|(r, c)| cell(r, c).len())
            .max()
            .unwrap_or(1);
        let mut out = String::new();
        for r in 0..self.rows() {
            let row: Vec<String> = (0..self.n)
                .map(|c| format!("{:>width$}", cell(r, c)))
                .collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }
}

/// Minimum number of simultaneously active PEs for a (w_f, s) pass:
/// `ceil(w_f / s)`.
pub fn active_pe_count(w_f: usize, s: usize) -> usize {
    w_f.div_ceil(s)
}

/// Utilization factor of a pass run on `t` provisioned PEs
/// producing `n` outputs: `(n/t * w_f) / (s*n + w_f - s)`.
pub fn utilization(w_f: usize, s: usize, t: usize, n: usize) -> Result<f64> {
    if t < active_pe_count(w_f, s) {
        return Err(Error::Precondition(format!(
            "{t} PEs cannot run a ({w_f}, {s}) pass; {} are active at peak",
            active_pe_count(w_f, s)
        )));
    }
    if !n.is_multiple_of(t) {
        return Err(Error::Precondition(format!(
            "utilization assumes n ({n}) is a multiple of t ({t})"
        )));
    }
    let busy = (n as f64 / t as f64) * w_f as f64;
    Ok(busy / (s * n + w_f - s) as f64)
}

/// Limit of the utilization factor for large `n`: `w_f / (t * s)`.
pub fn utilization_max(w_f: usize, s: usize, t: usize) -> f64 {
    w_f as f64 / (t as f64 * s as f64)
}

/// PEs per logical tile when the 6-PE reconfigurable tile runs a mode:
/// the smallest divisor of 6 that covers the active PE count.
fn mode_t_group(w_f: usize, s: usize) -> Result<usize> {
    if !SUPPORTED_MODES.contains(&(w_f, s)) {
        return Err(Error::UnsupportedMode { w_f, s });
    }
    let t = active_pe_count(w_f, s);
    let t_group = [1, 2, 3, 6]
        .into_iter()
        .find(|d| *d >= t)
        .expect("supported modes need at most 6 PEs");
    Ok(t_group)
}

/// Utilization factor of a supported mode with the tile grouping the
/// engine actually provisions (t_group PEs per logical tile, which may
/// exceed the active count). Aggregate busy share, so `n` need not be a
/// multiple of the group size.
pub fn mode_utilization(w_f: usize, s: usize, n: usize) -> Result<f64> {
    let t_group = mode_t_group(w_f, s)?;
    Ok((n * w_f) as f64 / (t_group * (s * n + w_f - s)) as f64)
}

/// Large-n limit of [`mode_utilization`].
pub fn mode_utilization_limit(w_f: usize, s: usize) -> Result<f64> {
    let t_group = mode_t_group(w_f, s)?;
    Ok(utilization_max(w_f, s, t_group))
}

/// Least common multiple of a set of per-mode PE counts: the PE count a
/// statically partitioned tile would need to serve all of them at full
/// utilization.
pub fn lcm_pe_count(t_values: &[usize]) -> Result<usize> {
    if t_values.is_empty() || t_values.contains(&0) {
        return Err(Error::Precondition(
            "lcm needs a non-empty set of positive integers".into(),
        ));
    }
    Ok(t_values.iter().fold(1usize, |acc, &t| acc.lcm(&t)))
}

/// How a supported mode maps onto the engine's reconfigurable tiles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TileModeConfig {
    pub w_f: usize,
    pub s: usize,
    /// Minimum active PEs of the mode.
    pub t: usize,
    /// PEs per logical tile as provisioned (divides 6).
    pub t_group: usize,
    /// Output pixels processed per segment by one logical tile.
    pub n_eff: usize,
    /// Logical tiles available across the whole engine.
    pub p_eff: usize,
}

impl TileModeConfig {
    /// Mode configuration for an engine with `tiles` physical tiles of
    /// [`PES_PER_TILE`] PEs and `acc_depth` partial-sum slots per PE.
    pub fn for_engine(w_f: usize, s: usize, tiles: usize, acc_depth: usize) -> Result<Self> {
        if w_f > REGISTERS_PER_SET {
            return Err(Error::UnsupportedMode { w_f, s });
        }
        let t_group = mode_t_group(w_f, s)?;
        Ok(TileModeConfig {
            w_f,
            s,
            t: active_pe_count(w_f, s),
            t_group,
            n_eff: acc_depth * t_group,
            p_eff: tiles * PES_PER_TILE / t_group,
        })
    }

    /// Mode configuration for the baseline 32-tile, 64-deep engine.
    pub fn baseline(w_f: usize, s: usize) -> Result<Self> {
        Self::for_engine(w_f, s, 32, 64)
    }

    pub fn logical_tiles_per_physical(&self) -> usize {
        PES_PER_TILE / self.t_group
    }

    /// Cycles of one segment pass of `n` outputs.
    pub fn pass_cycles(&self, n: usize) -> u64 {
        (self.s * n + self.w_f - self.s) as u64
    }
}
