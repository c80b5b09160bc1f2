//! Line-oriented text format for networks.
//!
//! ```text
//! version 1
//! input_dim 1
//! metadata 2
//! name clip01
//! role clip
//! layers 2
//! layer 0
//! rows 2
//! cols 1
//! activated true
//! weights 0.3333333333333333 1.0
//! bias 0.3333333333333333 1.0
//! layer 1
//! ...
//! end
//! ```
//!
//! Weights are row-major. Floats are printed in shortest round-trip form, so a
//! write/read cycle reproduces every parameter bit for bit.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::network::{AffineLayer, FeedforwardNetwork};
use crate::scalar::Scalar;

pub const FORMAT_VERSION: u32 = 1;

/// Serializes a network to the text format.
pub fn serialize_network<T: Scalar>(net: &FeedforwardNetwork<T>) -> String {
    let mut out = String::new();
    write_network(net, &mut out);
    out
}

/// Parses a network from the text format. Trailing content after `end` is an error.
pub fn deserialize_network<T: Scalar>(text: &str) -> Result<FeedforwardNetwork<T>> {
    let mut reader = TextReader::new(text);
    let net = read_network(&mut reader)?;
    reader.expect_eof()?;
    Ok(net)
}

/// Appends one network document to `out`.
pub fn write_network<T: Scalar>(net: &FeedforwardNetwork<T>, out: &mut String) {
    let _ = writeln!(out, "version {FORMAT_VERSION}");
    let _ = writeln!(out, "input_dim {}", net.input_dim());
    let _ = writeln!(out, "metadata {}", net.metadata().len());
    for (k, v) in net.metadata() {
        let _ = writeln!(out, "{k} {v}");
    }
    let _ = writeln!(out, "layers {}", net.layers().len());
    for (i, layer) in net.layers().iter().enumerate() {
        let _ = writeln!(out, "layer {i}");
        let _ = writeln!(out, "rows {}", layer.rows());
        let _ = writeln!(out, "cols {}", layer.cols());
        let _ = writeln!(out, "activated {}", layer.activated());
        write_values(out, "weights", layer.weights());
        write_values(out, "bias", layer.bias());
    }
    out.push_str("end\n");
}

pub(crate) fn write_values<T: Scalar>(out: &mut String, key: &str, values: &[T]) {
    out.push_str(key);
    for v in values {
        let _ = write!(out, " {v:?}");
    }
    out.push('\n');
}

/// Reads one network document, leaving the reader positioned after `end`.
pub fn read_network<T: Scalar>(r: &mut TextReader<'_>) -> Result<FeedforwardNetwork<T>> {
    let version: u32 = r.field("version", "network")?.parse_one()?;
    if version != FORMAT_VERSION {
        return Err(r.error(format!("unsupported version {version}")));
    }
    let input_dim: usize = r.field("input_dim", "network")?.parse_one()?;
    let n_meta: usize = r.field("metadata", "network")?.parse_one()?;
    let mut metadata = BTreeMap::new();
    for i in 0..n_meta {
        let (line, text) = r
            .next_line()
            .ok_or_else(|| r.eof_error(&format!("metadata entry {i}")))?;
        let (k, v) = text.split_once(' ').unwrap_or((text, ""));
        if k.is_empty() {
            return Err(Error::Parse {
                line,
                message: "empty metadata key".into(),
            });
        }
        metadata.insert(k.to_string(), v.to_string());
    }
    let n_layers: usize = r.field("layers", "network")?.parse_one()?;
    let mut layers = Vec::with_capacity(n_layers);
    for i in 0..n_layers {
        let ctx = format!("layer {i}");
        let idx: usize = r.field("layer", &ctx)?.parse_one()?;
        if idx != i {
            return Err(r.error(format!("expected layer {i}, found layer {idx}")));
        }
        let rows: usize = r.field("rows", &ctx)?.parse_one()?;
        let cols: usize = r.field("cols", &ctx)?.parse_one()?;
        let activated: bool = r.field("activated", &ctx)?.parse_one()?;
        let weights: Vec<T> = r.field("weights", &ctx)?.parse_all()?;
        let bias: Vec<T> = r.field("bias", &ctx)?.parse_all()?;
        let line = r.line;
        let layer = AffineLayer::new(rows, cols, weights, bias, activated).map_err(|e| Error::Parse {
            line,
            message: format!("{ctx}: {e}"),
        })?;
        layers.push(layer);
    }
    r.field("end", "network")?;
    let line = r.line;
    let net = FeedforwardNetwork::new(input_dim, layers).map_err(|e| Error::Parse {
        line,
        message: e.to_string(),
    })?;
    Ok(net.with_metadata_map(metadata))
}

/// Cursor over non-empty lines with 1-based line numbers.
pub struct TextReader<'a> {
    lines: std::iter::Peekable<std::iter::Enumerate<std::str::Lines<'a>>>,
    line: usize,
}

/// The payload of one `key values...` line.
pub struct Field<'a> {
    line: usize,
    key: &'a str,
    rest: &'a str,
}

impl<'a> TextReader<'a> {
    pub fn new(text: &'a str) -> Self {
        Self {
            lines: text.lines().enumerate().peekable(),
            line: 0,
        }
    }

    fn next_line(&mut self) -> Option<(usize, &'a str)> {
        for (i, l) in self.lines.by_ref() {
            let l = l.trim_end();
            if !l.is_empty() {
                self.line = i + 1;
                return Some((i + 1, l));
            }
        }
        None
    }

    fn eof_error(&self, what: &str) -> Error {
        Error::Parse {
            line: self.line + 1,
            message: format!("unexpected end of input: missing {what}"),
        }
    }

    pub fn error(&self, message: String) -> Error {
        Error::Parse {
            line: self.line,
            message,
        }
    }

    /// Reads the next line and checks its key.
    pub fn field(&mut self, key: &str, context: &str) -> Result<Field<'a>> {
        let (line, text) = self
            .next_line()
            .ok_or_else(|| self.eof_error(&format!("field `{key}` ({context})")))?;
        let (k, rest) = text.split_once(' ').unwrap_or((text, ""));
        if k != key {
            return Err(Error::Parse {
                line,
                message: format!("expected field `{key}` ({context}), found `{k}`"),
            });
        }
        Ok(Field { line, key: k, rest })
    }

    pub fn expect_eof(&mut self) -> Result<()> {
        match self.next_line() {
            None => Ok(()),
            Some((line, text)) => Err(Error::Parse {
                line,
                message: format!("trailing content `{text}`"),
            }),
        }
    }
}

impl Field<'_> {
    pub fn parse_one<V: std::str::FromStr>(&self) -> Result<V> {
        let mut parts = self.rest.split_whitespace();
        let (Some(tok), None) = (parts.next(), parts.next()) else {
            return Err(Error::Parse {
                line: self.line,
                message: format!("field `{}` expects exactly one value", self.key),
            });
        };
        tok.parse().map_err(|_| Error::Parse {
            line: self.line,
            message: format!("field `{}`: cannot parse `{tok}`", self.key),
        })
    }

    pub fn parse_all<V: std::str::FromStr>(&self) -> Result<Vec<V>> {
        self.rest
            .split_whitespace()
            .map(|tok| {
                tok.parse().map_err(|_| Error::Parse {
                    line: self.line,
                    message: format!("field `{}`: cannot parse `{tok}`", self.key),
                })
            })
            .collect()
    }

    pub fn text(&self) -> &str {
        self.rest
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::clip01_fragment;

    #[test]
    fn clip_round_trip() {
        let clip = clip01_fragment::<f64>();
        let text = serialize_network(&clip);
        let back: FeedforwardNetwork<f64> = deserialize_network(&text).unwrap();
        assert_eq!(back, clip);
        assert_eq!(serialize_network(&back), text);
    }

    #[test]
    fn truncated_stream_names_missing_field() {
        let text = serialize_network(&clip01_fragment::<f64>());
        let cut: String = text.lines().take(11).map(|l| format!("{l}\n")).collect();
        let err = deserialize_network::<f64>(&cut).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("missing field"), "{msg}");
        assert!(msg.contains("`bias`"), "{msg}");
    }

    #[test]
    fn bad_token_reports_line() {
        let text = serialize_network(&clip01_fragment::<f64>()).replace("rows 2", "rows two");
        match deserialize_network::<f64>(&text).unwrap_err() {
            Error::Parse { line, message } => {
                assert_eq!(line, 8);
                assert!(message.contains("rows"));
            }
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn rejects_non_finite_and_shape_errors() {
        let text = serialize_network(&clip01_fragment::<f64>());
        let nan = text.replacen("bias 0.3333333333333333 1.0", "bias NaN 1.0", 1);
        assert!(deserialize_network::<f64>(&nan).is_err());
        let short = text.replacen("bias 0.3333333333333333 1.0", "bias 1.0", 1);
        assert!(deserialize_network::<f64>(&short).is_err());
        let trailing = format!("{text}extra\n");
        assert!(deserialize_network::<f64>(&trailing).is_err());
    }
}
