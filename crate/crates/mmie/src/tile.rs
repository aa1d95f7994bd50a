//! Cycle-accurate functional model of one reconfigurable tile: six PEs
//! grouped into logical tiles per mode, the weight-generator rotation
//! path, per-PE partial-sum memories, and the weight-passing stall at
//! output-row boundaries.
//!
//! The weight generator is modeled functionally: what matters is which
//! weight reaches which PE at each cycle, which the schedule matrix
//! determines. Register-set contents are exposed only as the rotation
//! path, a multiset of the loaded weights plus the zero slots that pad
//! the path out to a whole number of registers per set.

use crate::error::{Error, Result};
use crate::gfid::{build_schedule, GfidSchedule, TileModeConfig, PES_PER_TILE};
use crate::model::fixed::{mac, Acc24, Fixed16, QFormat};

/// Partial-sum memory depth per PE.
pub const ACC_DEPTH: usize = 64;

/// One processing element: a MAC unit with its partial-sum memory.
#[derive(Debug, Clone)]
pub struct PeState {
    acc: Vec<Acc24>,
    pub busy_cycles: u64,
}

impl PeState {
    fn new() -> Self {
        PeState {
            acc: vec![Acc24::ZERO; ACC_DEPTH],
            busy_cycles: 0,
        }
    }
}

/// Observability counters for a tile run.
#[derive(Debug, Clone, Default)]
pub struct TileTrace {
    pub total_cycles: u64,
    /// Busy cycles per physical PE.
    pub busy_cycles: [u64; PES_PER_TILE],
    pub weight_loads: u64,
    pub pixel_reads: u64,
    /// (cycle, pe, weight_index, acc_slot) rows, kept only when the tile
    /// records traces.
    events: Vec<(u64, usize, Option<usize>, Option<usize>)>,
}

impl TileTrace {
    pub fn busy_total(&self) -> u64 {
        self.busy_cycles.iter().sum()
    }

    /// Busy share of the PEs provisioned for `active_tiles` logical tiles.
    pub fn busy_ratio(&self, t_group: usize, active_tiles: usize) -> f64 {
        if self.total_cycles == 0 {
            return 0.0;
        }
        self.busy_total() as f64 / (t_group * active_tiles) as f64 / self.total_cycles as f64
    }

    fn merge(&mut self, other: &TileTrace) {
        self.total_cycles += other.total_cycles;
        for (a, b) in self.busy_cycles.iter_mut().zip(other.busy_cycles) {
            *a += b;
        }
        self.weight_loads += other.weight_loads;
        self.pixel_reads += other.pixel_reads;
        self.events.extend(other.events.iter().cloned());
    }

    /// Cycle trace as CSV rows: cycle,pe,busy,weight_index,acc_slot.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("cycle,pe,busy,weight_index,acc_slot\n");
        for &(cycle, pe, k, slot) in &self.events {
            let busy = k.is_some() as u8;
            let k = k.map(|v| v.to_string()).unwrap_or_default();
            let slot = slot.map(|v| v.to_string()).unwrap_or_default();
            out.push_str(&format!("{cycle},{pe},{busy},{k},{slot}\n"));
        }
        out
    }
}

/// Functional weight generator for one logical tile.
#[derive(Debug, Clone)]
pub struct WeightGenerator {
    mode: TileModeConfig,
    weights: Vec<Fixed16>,
}

impl WeightGenerator {
    pub fn new(mode: TileModeConfig, weights: &[Fixed16]) -> Result<Self> {
        if weights.len() != mode.w_f {
            return Err(Error::ShapeMismatch(format!(
                "weight generator expects {} weights, got {}",
                mode.w_f,
                weights.len()
            )));
        }
        Ok(WeightGenerator {
            mode,
            weights: weights.to_vec(),
        })
    }

    /// The registers participating in the rotation: the first `s` registers
    /// of each of the logical tile's `t_group` register sets. Slots beyond
    /// the `w_f` loaded weights stay zero so they cancel out of the MACs.
    pub fn rotation_path(&self) -> Vec<Fixed16> {
        let slots = self.mode.t_group * self.mode.s;
        debug_assert!(slots >= self.mode.w_f);
        let mut path = self.weights.clone();
        path.resize(slots, Fixed16::zero(QFormat::Weight));
        path
    }

    /// Weight delivered for output column `col` at cycle `r`, per the
    /// schedule matrix.
    pub fn weight_at(&self, schedule: &GfidSchedule, r: usize, col: usize) -> Option<Fixed16> {
        schedule.weight_index(r, col).map(|k| self.weights[k])
    }
}

/// One reconfigurable tile.
#[derive(Debug, Clone)]
pub struct Tile {
    pub mode: TileModeConfig,
    pes: Vec<PeState>,
    pub saturations: u64,
    record_trace: bool,
}

impl Tile {
    /// Partition the tile's six PEs into logical sub-tiles for a mode.
    pub fn configure(mode: TileModeConfig) -> Result<Tile> {
        if !PES_PER_TILE.is_multiple_of(mode.t_group) {
            return Err(Error::UnsupportedMode {
                w_f: mode.w_f,
                s: mode.s,
            });
        }
        Ok(Tile {
            mode,
            pes: (0..PES_PER_TILE).map(|_| PeState::new()).collect(),
            saturations: 0,
            record_trace: false,
        })
    }

    pub fn record_trace(&mut self, on: bool) {
        self.record_trace = on;
    }

    pub fn logical_tiles(&self) -> usize {
        PES_PER_TILE / self.mode.t_group
    }

    /// Extra cycles charged when weight passing crosses an output-row
    /// boundary: the shift of `w_f` positions replaces the usual one-cycle
    /// advance, so each of the `h_out - 1` boundaries adds `w_f - 1`.
    pub fn weight_passing_stall(&self) -> u64 {
        (self.mode.w_f - 1) as u64
    }

    /// Zero the first `n_slots` partial sums of a logical tile, or seed
    /// them with a bias value.
    pub fn seed_accumulators(&mut self, logical_tile: usize, n: usize, bias: Option<Fixed16>) {
        let t_group = self.mode.t_group;
        let init = bias.map(Acc24::from_bias).unwrap_or(Acc24::ZERO);
        for c in 0..n {
            let pe = logical_tile * t_group + c % t_group;
            self.pes[pe].acc[c / t_group] = init;
        }
    }

    /// Partial sums of the first `n` outputs of a logical tile.
    pub fn outputs(&self, logical_tile: usize, n: usize) -> Vec<Acc24> {
        let t_group = self.mode.t_group;
        (0..n)
            .map(|c| self.pes[logical_tile * t_group + c % t_group].acc[c / t_group])
            .collect()
    }

    /// Run one filter-row pass of `n` outputs per logical tile. Each entry
    /// of `weights_per_tile` drives one logical tile (all share the pixel
    /// stream). With `accumulate` unset the touched partial sums are
    /// zeroed first; set, the MACs add onto the stored partial values.
    pub fn run_row_pass(
        &mut self,
        pixels: &[Fixed16],
        weights_per_tile: &[&[Fixed16]],
        n: usize,
        accumulate: bool,
    ) -> Result<TileTrace> {
        let mode = self.mode;
        if n > mode.t_group * ACC_DEPTH {
            return Err(Error::Capacity(format!(
                "{n} outputs exceed the {} partial sums of a {}-PE logical tile",
                mode.t_group * ACC_DEPTH,
                mode.t_group
            )));
        }
        if weights_per_tile.len() > self.logical_tiles() {
            return Err(Error::Capacity(format!(
                "{} weight sets for {} logical tiles",
                weights_per_tile.len(),
                self.logical_tiles()
            )));
        }
        let schedule = build_schedule(mode.w_f, mode.s, n)?;
        if pixels.len() != schedule.rows() {
            return Err(Error::ShapeMismatch(format!(
                "pass of {} outputs needs {} pixels, got {}",
                n,
                schedule.rows(),
                pixels.len()
            )));
        }
        let generators: Vec<WeightGenerator> = weights_per_tile
            .iter()
            .map(|w| WeightGenerator::new(mode, w))
            .collect::<Result<_>>()?;

        if !accumulate {
            for lt in 0..generators.len() {
                self.seed_accumulators(lt, n, None);
            }
        }

        let mut trace = TileTrace::default();
        for (r, &pixel) in pixels.iter().enumerate() {
            trace.pixel_reads += 1;
            for (lt, gen) in generators.iter().enumerate() {
                for p_local in 0..mode.t_group {
                    let pe = lt * mode.t_group + p_local;
                    let found = self.active_column(&schedule, r, p_local, n);
                    if let Some((col, k)) = found {
                        let slot = col / mode.t_group;
                        let weight = gen.weight_at(&schedule, r, col).expect("scheduled cell");
                        debug_assert_eq!(schedule.weight_index(r, col), Some(k));
                        self.pes[pe].acc[slot] =
                            mac(self.pes[pe].acc[slot], pixel, weight, &mut self.saturations);
                        self.pes[pe].busy_cycles += 1;
                        trace.busy_cycles[pe] += 1;
                        if self.record_trace {
                            trace.events.push((r as u64, pe, Some(k), Some(slot)));
                        }
                    } else if self.record_trace {
                        trace.events.push((r as u64, pe, None, None));
                    }
                }
            }
        }
        trace.total_cycles = schedule.rows() as u64;
        trace.weight_loads += (generators.len() * mode.w_f) as u64;
        Ok(trace)
    }

    /// The single output column a PE can serve at cycle `r`: columns of the
    /// same residue class are `s * t_group >= w_f` cycles apart, so at most
    /// one is in flight.
    fn active_column(
        &self,
        schedule: &GfidSchedule,
        r: usize,
        p_local: usize,
        n: usize,
    ) -> Option<(usize, usize)> {
        let mode = self.mode;
        let c_max = (r / mode.s).min(n - 1);
        let c_min = (r + 1).saturating_sub(mode.w_f).div_ceil(mode.s);
        (c_min..=c_max)
            .filter(|c| c % mode.t_group == p_local)
            .find_map(|c| schedule.weight_index(r, c).map(|k| (c, k)))
    }

    /// Run consecutive output rows of `w_out` pixels through one logical
    /// tile arrangement, inserting the weight-passing stall between rows.
    /// Returns the per-row partial sums and the merged trace; total cycles
    /// come to `h_out * (s*w_out + w_f - s) + (h_out-1) * (w_f-1)`.
    pub fn run_output_rows(
        &mut self,
        input_rows: &[Vec<Fixed16>],
        weights_per_tile: &[&[Fixed16]],
        w_out: usize,
    ) -> Result<(Vec<Vec<Acc24>>, TileTrace)> {
        let mut trace = TileTrace::default();
        let mut outputs = Vec::with_capacity(input_rows.len());
        for (z, pixels) in input_rows.iter().enumerate() {
            if z > 0 {
                trace.total_cycles += self.weight_passing_stall();
            }
            let pass = self.run_row_pass(pixels, weights_per_tile, w_out, false)?;
            trace.merge(&pass);
            outputs.push(self.outputs(0, w_out));
        }
        Ok((outputs, trace))
    }

    /// Fully-connected pass: every PE acts as an independent neuron fed a
    /// private weight stream through the multiplexers, sharing the pixel
    /// stream. Utilization is 100% for the active PEs.
    pub fn run_fc_pass(
        &mut self,
        pixels: &[Fixed16],
        weight_streams: &[&[Fixed16]],
        biases: &[Fixed16],
    ) -> Result<(Vec<Acc24>, TileTrace)> {
        if weight_streams.len() > PES_PER_TILE {
            return Err(Error::Capacity(format!(
                "{} weight streams for {} PEs",
                weight_streams.len(),
                PES_PER_TILE
            )));
        }
        if weight_streams.iter().any(|ws| ws.len() != pixels.len()) {
            return Err(Error::ShapeMismatch(
                "each weight stream must match the pixel stream length".into(),
            ));
        }
        if biases.len() != weight_streams.len() {
            return Err(Error::ShapeMismatch("one bias per active PE".into()));
        }
        let mut trace = TileTrace::default();
        for (pe, bias) in biases.iter().enumerate() {
            self.pes[pe].acc[0] = Acc24::from_bias(*bias);
        }
        for (j, &pixel) in pixels.iter().enumerate() {
            trace.pixel_reads += 1;
            for (pe, stream) in weight_streams.iter().enumerate() {
                self.pes[pe].acc[0] =
                    mac(self.pes[pe].acc[0], pixel, stream[j], &mut self.saturations);
                self.pes[pe].busy_cycles += 1;
                trace.busy_cycles[pe] += 1;
                trace.weight_loads += 1;
                if self.record_trace {
                    trace.events.push((j as u64, pe, Some(j), Some(0)));
                }
            }
        }
        trace.total_cycles = pixels.len() as u64;
        let outs = (0..weight_streams.len())
            .map(|pe| self.pes[pe].acc[0])
            .collect();
        Ok((outs, trace))
    }
}
