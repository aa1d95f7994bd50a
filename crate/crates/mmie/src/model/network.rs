//! Network descriptors: the three built-in CNN geometries plus JSON
//! load/store for custom networks.
//!
//! Built-in layer tables store post-padding input extents, so the sliding
//! window formula applies directly. The two-group convolutions of the
//! 8-layer network (layers 2, 4 and 5) are encoded with the per-group
//! input channel count, which reproduces the published multiply-accumulate
//! and weight totals.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::layer::{ConvLayerConfig, FcLayerConfig, LayerConfig};

/// An ordered list of layer geometries.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkDescriptor {
    pub name: String,
    pub layers: Vec<LayerConfig>,
}

impl NetworkDescriptor {
    pub fn new(name: impl Into<String>, layers: Vec<LayerConfig>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::Dimension("network has no layers".into()));
        }
        for layer in &layers {
            layer.validate()?;
        }
        Ok(NetworkDescriptor {
            name: name.into(),
            layers,
        })
    }

    pub fn conv_layers(&self) -> impl Iterator<Item = &ConvLayerConfig> {
        self.layers.iter().filter_map(|l| match l {
            LayerConfig::Conv(c) => Some(c),
            LayerConfig::Fc(_) => None,
        })
    }

    pub fn fc_layers(&self) -> impl Iterator<Item = &FcLayerConfig> {
        self.layers.iter().filter_map(|l| match l {
            LayerConfig::Fc(f) => Some(f),
            LayerConfig::Conv(_) => None,
        })
    }

    pub fn conv_macs(&self) -> u64 {
        self.conv_layers().map(|c| c.macs()).sum()
    }

    pub fn conv_ops(&self) -> u64 {
        2 * self.conv_macs()
    }

    pub fn conv_weights(&self) -> u64 {
        self.conv_layers().map(|c| c.weight_count()).sum()
    }

    pub fn fc_macs(&self) -> u64 {
        self.fc_layers().map(|f| f.macs()).sum()
    }

    pub fn fc_weights(&self) -> u64 {
        self.fc_layers().map(|f| f.weight_count()).sum()
    }

    /// Divide channel counts (and fully-connected extents) by `divisor`,
    /// clamping to one. Shrinks simulation work while preserving every
    /// filter mode and the weight-passing behavior, since cycle formulas
    /// are linear in channel counts.
    pub fn scale_channels(&self, divisor: usize) -> Result<NetworkDescriptor> {
        if divisor == 0 {
            return Err(Error::InvalidArgument("scale divisor must be >= 1".into()));
        }
        if divisor == 1 {
            return Ok(self.clone());
        }
        let scale = |c: usize| (c / divisor).max(1);
        let layers = self
            .layers
            .iter()
            .map(|l| match l {
                LayerConfig::Conv(c) => LayerConfig::Conv(ConvLayerConfig {
                    c_in: scale(c.c_in),
                    c_out: scale(c.c_out),
                    ..*c
                }),
                LayerConfig::Fc(f) => LayerConfig::Fc(FcLayerConfig {
                    n: scale(f.n),
                    m: scale(f.m),
                }),
            })
            .collect();
        NetworkDescriptor::new(format!("{}/{}", self.name, divisor), layers)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let net: NetworkDescriptor = serde_json::from_str(json)?;
        NetworkDescriptor::new(net.name, net.layers)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }
}

fn conv(h_in: usize, w_in: usize, c_in: usize, hw_f: usize, s: usize, c_out: usize) -> LayerConfig {
    LayerConfig::Conv(ConvLayerConfig {
        h_in,
        w_in,
        c_in,
        h_f: hw_f,
        w_f: hw_f,
        s,
        c_out,
    })
}

fn fc(n: usize, m: usize) -> LayerConfig {
    LayerConfig::Fc(FcLayerConfig { n, m })
}

/// 5 convolutional + 3 fully-connected layers. Layers 2, 4 and 5 are
/// two-group convolutions, stored with the per-group input channel count.
pub fn alexnet() -> NetworkDescriptor {
    NetworkDescriptor::new(
        "alexnet",
        vec![
            conv(227, 227, 3, 11, 4, 96),
            conv(31, 31, 48, 5, 1, 256),
            conv(15, 15, 256, 3, 1, 384),
            conv(15, 15, 192, 3, 1, 384),
            conv(15, 15, 192, 3, 1, 256),
            fc(9216, 4096),
            fc(4096, 4096),
            fc(4096, 1000),
        ],
    )
    .expect("builtin geometry is valid")
}

/// 13 convolutional layers, all 3x3 stride 1, + 3 fully-connected layers.
pub fn vgg16() -> NetworkDescriptor {
    NetworkDescriptor::new(
        "vgg16",
        vec![
            conv(226, 226, 3, 3, 1, 64),
            conv(226, 226, 64, 3, 1, 64),
            conv(114, 114, 64, 3, 1, 128),
            conv(114, 114, 128, 3, 1, 128),
            conv(58, 58, 128, 3, 1, 256),
            conv(58, 58, 256, 3, 1, 256),
            conv(58, 58, 256, 3, 1, 256),
            conv(30, 30, 256, 3, 1, 512),
            conv(30, 30, 512, 3, 1, 512),
            conv(30, 30, 512, 3, 1, 512),
            conv(16, 16, 512, 3, 1, 512),
            conv(16, 16, 512, 3, 1, 512),
            conv(16, 16, 512, 3, 1, 512),
            fc(25088, 4096),
            fc(4096, 4096),
            fc(4096, 1000),
        ],
    )
    .expect("builtin geometry is valid")
}

/// 49 convolutional layers (one 7x7/2, sixteen 3x3/1, thirty-two 1x1/1)
/// plus one fully-connected layer. Bottleneck blocks that downsample do so
/// in their leading 1x1 layer; a stride-2 1x1 convolution reads every
/// second pixel only, so it is encoded as stride 1 on the subsampled input
/// grid. Projection shortcuts, element-wise additions, pooling and batch
/// norm are not part of the dataflow workload and are omitted.
pub fn resnet50() -> NetworkDescriptor {
    let mut layers = vec![conv(229, 229, 3, 7, 2, 64)];
    let mut bottleneck = |sp: usize, c_in: usize, mid: usize, c_out: usize| {
        layers.push(conv(sp, sp, c_in, 1, 1, mid));
        layers.push(conv(sp + 2, sp + 2, mid, 3, 1, mid));
        layers.push(conv(sp, sp, mid, 1, 1, c_out));
    };
    bottleneck(56, 64, 64, 256);
    for _ in 0..2 {
        bottleneck(56, 256, 64, 256);
    }
    bottleneck(28, 256, 128, 512);
    for _ in 0..3 {
        bottleneck(28, 512, 128, 512);
    }
    bottleneck(14, 512, 256, 1024);
    for _ in 0..5 {
        bottleneck(14, 1024, 256, 1024);
    }
    bottleneck(7, 1024, 512, 2048);
    for _ in 0..2 {
        bottleneck(7, 2048, 512, 2048);
    }
    layers.push(fc(2048, 1000));
    NetworkDescriptor::new("resnet50", layers).expect("builtin geometry is valid")
}

/// Look up a built-in network by name.
pub fn builtin_network(name: &str) -> Result<NetworkDescriptor> {
    match name.to_ascii_lowercase().as_str() {
        "alexnet" => Ok(alexnet()),
        "vgg16" | "vggnet16" | "vggnet-16" => Ok(vgg16()),
        "resnet50" | "resnet-50" => Ok(resnet50()),
        other => Err(Error::UnknownNetwork(other.into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_name_is_rejected() {
        assert!(matches!(
            builtin_network("lenet"),
            Err(Error::UnknownNetwork(_))
        ));
    }

    #[test]
    fn alexnet_structure_and_totals() {
        let net = alexnet();
        assert_eq!(net.conv_layers().count(), 5);
        assert_eq!(net.fc_layers().count(), 3);
        let first = net.conv_layers().next().unwrap();
        assert_eq!((first.h_f, first.s), (11, 4));
        // published totals: 666M conv MACs, 2.3M conv weights, 58.6M fc weights
        assert_eq!(net.conv_macs(), 665_784_864);
        assert_eq!(net.conv_weights(), 2_332_704);
        assert_eq!(net.fc_weights(), 58_621_952);
        assert_eq!((net.conv_macs() as f64 / 1e6).round() as u64, 666);
    }

    #[test]
    fn vgg16_structure_and_totals() {
        let net = vgg16();
        assert_eq!(net.conv_layers().count(), 13);
        assert!(net.conv_layers().all(|c| c.w_f == 3 && c.s == 1));
        assert_eq!(net.fc_layers().count(), 3);
        // published totals: 30.6G conv ops, 14.7M conv weights, 124M fc weights
        assert_eq!(net.conv_macs(), 15_346_630_656);
        assert_eq!(net.conv_weights(), 14_710_464);
        assert_eq!(net.fc_weights(), 123_633_664);
        let gops = net.conv_ops() as f64 / 1e9;
        assert!((gops - 30.6).abs() / 30.6 < 0.005, "conv ops {gops} Gops");
    }

    #[test]
    fn resnet50_structure_and_totals() {
        let net = resnet50();
        assert_eq!(net.conv_layers().count(), 49);
        assert_eq!(net.fc_layers().count(), 1);
        let by_mode = |w_f: usize, s: usize| {
            net.conv_layers()
                .filter(|c| c.w_f == w_f && c.s == s)
                .count()
        };
        assert_eq!(by_mode(7, 2), 1);
        assert_eq!(by_mode(3, 1), 16);
        assert_eq!(by_mode(1, 1), 32);
        // 7G conv ops; fc is the classifier head (2M weights)
        assert_eq!(net.conv_macs(), 3_496_263_680);
        assert_eq!((net.conv_ops() as f64 / 1e9).round() as u64, 7);
        assert_eq!(net.fc_weights(), 2_048_000);
        // Without the four projection shortcuts the conv weight total is
        // 20.7M; the published 23.5M figure includes them.
        assert_eq!(net.conv_weights(), 20_686_016);
    }

    #[test]
    fn builtin_modes_are_all_supported() {
        let supported = [(1, 1), (3, 1), (5, 1), (7, 2), (11, 4)];
        for name in ["alexnet", "vgg16", "resnet50"] {
            let net = builtin_network(name).unwrap();
            for c in net.conv_layers() {
                assert!(
                    supported.contains(&(c.w_f, c.s)),
                    "{name}: ({}, {})",
                    c.w_f,
                    c.s
                );
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let net = alexnet();
        let json = net.to_json().unwrap();
        let back = NetworkDescriptor::from_json(&json).unwrap();
        assert_eq!(net, back);
    }

    #[test]
    fn scale_channels_clamps_to_one() {
        let scaled = vgg16().scale_channels(64).unwrap();
        let first = scaled.conv_layers().next().unwrap();
        assert_eq!((first.c_in, first.c_out), (1, 1));
        let last_fc = scaled.fc_layers().last().unwrap();
        assert_eq!((last_fc.n, last_fc.m), (64, 15));
    }
}
