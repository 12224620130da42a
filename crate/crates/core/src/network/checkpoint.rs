//! Plain-text checkpoints.
//!
//! ```text
//! HRCK 1
//! arch dense:tanh hr:tanh+ln dense:identity
//! layer0.A
//! 128 32
//! -1.2345678901234567e-1
//! ...
//! ```
//!
//! After the header and the architecture line, every parameter tensor is a
//! name line, a `rows cols` line and `rows * cols` row-major values, one per
//! line, rendered with 17 significant digits. Biases and LayerNorm vectors
//! are stored as `n 1` columns.

use std::fs;
use std::path::Path;

use crate::network::{
    ActivationKind, DenseLayer, HrLayer, Layer, LayerNorm, Network, Projection,
};
use crate::numerics::Matrix;
use crate::{Error, Result};

const MAGIC: &str = "HRCK";
const VERSION: u32 = 1;

fn layer_tag(layer: &Layer) -> String {
    let (kind, act, ln) = match layer {
        Layer::Dense(d) => (
            "dense",
            d.activation.map_or("identity", ActivationKind::name),
            d.projection.norm.is_some(),
        ),
        Layer::Hr(h) => ("hr", h.activation.name(), h.branch1.norm.is_some()),
    };
    format!("{kind}:{act}{}", if ln { "+ln" } else { "" })
}

/// Serializes `net` to the checkpoint text format.
pub fn render_checkpoint(net: &Network) -> String {
    let mut out = format!("{MAGIC} {VERSION}\narch");
    for layer in net.layers() {
        out.push(' ');
        out.push_str(&layer_tag(layer));
    }
    out.push('\n');
    for (name, (rows, cols), data) in net.named_tensors() {
        out.push_str(&format!("{name}\n{rows} {cols}\n"));
        for v in data {
            out.push_str(&format!("{v:.16e}\n"));
        }
    }
    out
}

/// Writes via a temporary sibling file and rename.
pub fn save_checkpoint(net: &Network, path: impl AsRef<Path>) -> Result<()> {
    crate::harness::write_atomic(path.as_ref(), render_checkpoint(net).as_bytes())
}

pub fn load_checkpoint(path: impl AsRef<Path>) -> Result<Network> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_checkpoint(&text)
}

fn parse_err(block: &str, message: impl Into<String>) -> Error {
    Error::Parse {
        block: block.to_string(),
        message: message.into(),
    }
}

struct Lines<'a> {
    inner: std::iter::Peekable<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn next(&mut self, block: &str, what: &str) -> Result<&'a str> {
        self.inner
            .next()
            .map(str::trim)
            .ok_or_else(|| parse_err(block, format!("unexpected end of file, expected {what}")))
    }
}

fn read_tensor(lines: &mut Lines<'_>, expected: &str) -> Result<Matrix> {
    let name = lines.next(expected, "block name")?;
    if name != expected {
        return Err(parse_err(expected, format!("found block `{name}` instead")));
    }
    let dims = lines.next(expected, "dims line")?;
    let parts: Vec<&str> = dims.split_whitespace().collect();
    let [r, c] = parts.as_slice() else {
        return Err(parse_err(expected, format!("bad dims line `{dims}`")));
    };
    let rows: usize = r
        .parse()
        .map_err(|_| parse_err(expected, format!("bad row count `{r}`")))?;
    let cols: usize = c
        .parse()
        .map_err(|_| parse_err(expected, format!("bad column count `{c}`")))?;
    let mut data = Vec::with_capacity(rows * cols);
    for i in 0..rows * cols {
        let line = lines.next(expected, &format!("value {i} of {}", rows * cols))?;
        let v: f64 = line
            .parse()
            .map_err(|_| parse_err(expected, format!("bad value `{line}`")))?;
        data.push(v);
    }
    Matrix::new(rows, cols, data).map_err(|e| parse_err(expected, e.to_string()))
}

fn read_vector(lines: &mut Lines<'_>, name: &str, len: usize) -> Result<Vec<f64>> {
    let m = read_tensor(lines, name)?;
    if m.shape() != (len, 1) {
        return Err(parse_err(
            name,
            format!("expected dims {len} 1, found {:?}", m.shape()),
        ));
    }
    Ok(m.into_vec())
}

fn read_projection(lines: &mut Lines<'_>, prefix: &str, ln: bool) -> Result<Projection> {
    let weights = read_tensor(lines, &format!("{prefix}A"))?;
    let bias = read_vector(lines, &format!("{prefix}b"), weights.rows())?;
    let norm = if ln {
        let gain = read_vector(lines, &format!("{prefix}ln.gain"), weights.rows())?;
        let offset = read_vector(lines, &format!("{prefix}ln.offset"), weights.rows())?;
        Some(LayerNorm { gain, offset })
    } else {
        None
    };
    Projection::new(weights, bias, norm).map_err(|e| parse_err(prefix, e.to_string()))
}

/// Parses checkpoint text. Nothing is returned unless the whole file is valid.
pub fn parse_checkpoint(text: &str) -> Result<Network> {
    let mut lines = Lines {
        inner: text.lines().peekable(),
    };
    let header = lines.next("header", "header line")?;
    let version = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
        [MAGIC, v] => v
            .parse::<u32>()
            .map_err(|_| parse_err("header", format!("bad version `{v}`")))?,
        _ => return Err(parse_err("header", format!("bad header `{header}`"))),
    };
    if version != VERSION {
        return Err(Error::UnsupportedVersion(version));
    }
    let arch = lines.next("arch", "architecture line")?;
    let tags: Vec<&str> = match arch.strip_prefix("arch") {
        Some(rest) => rest.split_whitespace().collect(),
        None => return Err(parse_err("arch", format!("bad architecture line `{arch}`"))),
    };
    if tags.is_empty() {
        return Err(parse_err("arch", "no layers"));
    }

    let mut layers = Vec::with_capacity(tags.len());
    for (i, tag) in tags.iter().enumerate() {
        let block = format!("layer{i}");
        let (kind, rest) = tag
            .split_once(':')
            .ok_or_else(|| parse_err(&block, format!("bad layer tag `{tag}`")))?;
        let (act, ln) = match rest.strip_suffix("+ln") {
            Some(a) => (a, true),
            None => (rest, false),
        };
        let activation = match act {
            "identity" => None,
            other => Some(
                other
                    .parse::<ActivationKind>()
                    .map_err(|e| parse_err(&block, e.to_string()))?,
            ),
        };
        let layer = match kind {
            "dense" => Layer::Dense(DenseLayer::new(
                read_projection(&mut lines, &format!("{block}."), ln)?,
                activation,
            )),
            "hr" => {
                let activation = activation
                    .ok_or_else(|| parse_err(&block, "HR layer needs an activation"))?;
                let b1 = read_projection(&mut lines, &format!("{block}.branch1."), ln)?;
                let b2 = read_projection(&mut lines, &format!("{block}.branch2."), ln)?;
                Layer::Hr(HrLayer::new(b1, b2, activation).map_err(|e| parse_err(&block, e.to_string()))?)
            }
            other => return Err(parse_err(&block, format!("unknown layer kind `{other}`"))),
        };
        layers.push(layer);
    }
    if let Some(extra) = lines.inner.find(|l| !l.trim().is_empty()) {
        return Err(parse_err("trailer", format!("unexpected trailing line `{extra}`")));
    }
    Network::new(layers).map_err(|e| parse_err("arch", e.to_string()))
}
