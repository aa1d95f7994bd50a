//! Layer and network descriptors, tensors, and the bit-true fixed-point
//! datapath shared by the reference implementations and the engine.

pub mod fixed;
pub mod layer;
pub mod network;
pub mod tensor;

pub use fixed::{mac, Acc24, Fixed16, QFormat, ACC24_MAX, ACC24_MIN};
pub use layer::{ConvLayerConfig, FcLayerConfig, LayerConfig};
pub use network::{alexnet, builtin_network, resnet50, vgg16, NetworkDescriptor};
pub use tensor::{read_tensor, write_tensor, FilterBank, Matrix, Tensor3};
