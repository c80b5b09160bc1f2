//! Text document holding a whole composition.
//!
//! ```text
//! kst-composition 1
//! d 2
//! domain 0.0 1.0
//! lambda 0.5 0.5
//! inner 0
//! <network document>
//! ...
//! outer
//! <network document>
//! end-composition
//! ```

use super::compose::{compose_kst, KstComposition};
use crate::error::Result;
use crate::format::{read_network, write_network, write_values, TextReader};

const COMPOSITION_VERSION: u32 = 1;

pub fn serialize_composition(comp: &KstComposition) -> String {
    let mut out = format!("kst-composition {COMPOSITION_VERSION}\nd {}\n", comp.d());
    let (a, b) = comp.domain();
    write_values(&mut out, "domain", &[a, b]);
    write_values(&mut out, "lambda", comp.lambda());
    for (i, net) in comp.inner().iter().enumerate() {
        out.push_str(&format!("inner {i}\n"));
        write_network(net, &mut out);
    }
    out.push_str("outer\n");
    write_network(comp.outer(), &mut out);
    out.push_str("end-composition\n");
    out
}

pub fn deserialize_composition(text: &str) -> Result<KstComposition> {
    let mut r = TextReader::new(text);
    let version: u32 = r.field("kst-composition", "header")?.parse_one()?;
    if version != COMPOSITION_VERSION {
        return Err(r.error(format!("unsupported composition version {version}")));
    }
    let d: usize = r.field("d", "composition")?.parse_one()?;
    let domain: Vec<f64> = r.field("domain", "composition")?.parse_all()?;
    if domain.len() != 2 {
        return Err(r.error(format!("domain needs 2 values, found {}", domain.len())));
    }
    let lambda: Vec<f64> = r.field("lambda", "composition")?.parse_all()?;
    if lambda.len() != d {
        return Err(r.error(format!("lambda needs {d} values, found {}", lambda.len())));
    }
    let mut inner = Vec::with_capacity(2 * d + 1);
    for i in 0..2 * d + 1 {
        let idx: usize = r.field("inner", &format!("inner network {i}"))?.parse_one()?;
        if idx != i {
            return Err(r.error(format!("expected inner network {i}, found {idx}")));
        }
        inner.push(read_network(&mut r)?);
    }
    r.field("outer", "composition")?;
    let outer = read_network(&mut r)?;
    r.field("end-composition", "composition")?;
    r.expect_eof()?;
    compose_kst((domain[0], domain[1]), lambda, inner, outer)
}
