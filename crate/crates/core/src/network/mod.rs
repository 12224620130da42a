//! Feed-forward networks with dense and Hadamard representation (HR) layers,
//! hand-derived backpropagation, Adam and text checkpoints.

mod activation;
mod adam;
mod checkpoint;
mod layers;
mod net;

pub use activation::{activation_apply, ActivationKind};
pub use adam::{adam_step, AdamState};
pub use checkpoint::{load_checkpoint, parse_checkpoint, render_checkpoint, save_checkpoint};
pub use layers::{
    hr_backward, hr_forward, DenseCache, DenseLayer, HrCache, HrGradients, HrLayer, LayerNorm,
    Projection, LAYER_NORM_EPS,
};
pub use net::{
    forward, init_network, ForwardTrace, HiddenSpec, Layer, LayerCache, LayerKind, Network,
    NetworkSpec,
};
