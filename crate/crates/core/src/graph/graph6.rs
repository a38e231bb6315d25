//! The graph6 interchange format: size header, then the upper triangle in
//! column-major order packed six bits per byte, each byte offset by 63.

use super::{Graph, GraphBuilder};
use crate::error::{Error, Result};

const MAX_N: u64 = 68_719_476_735;
const HEADER: &[u8] = b">>graph6<<";

pub fn encode_graph6(g: &Graph) -> Result<Vec<u8>> {
    let n = g.n() as u64;
    if n > MAX_N {
        return Err(Error::InvalidInput(format!("graph6 cannot encode {n} vertices")));
    }
    let mut out = Vec::with_capacity(8 + (g.n() * g.n()).div_ceil(12));
    if n <= 62 {
        out.push(n as u8 + 63);
    } else if n <= 258_047 {
        out.push(126);
        push_sextets(&mut out, n, 3);
    } else {
        out.extend_from_slice(&[126, 126]);
        push_sextets(&mut out, n, 6);
    }

    let mut acc = 0u8;
    let mut filled = 0;
    for j in 1..g.n() {
        for i in 0..j {
            acc = (acc << 1) | g.has_edge(i, j) as u8;
            filled += 1;
            if filled == 6 {
                out.push(acc + 63);
                acc = 0;
                filled = 0;
            }
        }
    }
    if filled > 0 {
        out.push((acc << (6 - filled)) + 63);
    }
    Ok(out)
}

fn push_sextets(out: &mut Vec<u8>, value: u64, count: u32) {
    for i in (0..count).rev() {
        out.push(((value >> (6 * i)) & 0x3f) as u8 + 63);
    }
}

/// Decodes one graph6 record. An optional `>>graph6<<` header and a trailing
/// newline are accepted.
pub fn decode_graph6(bytes: &[u8]) -> Result<Graph> {
    let mut start = 0;
    if bytes.starts_with(HEADER) {
        start = HEADER.len();
    }
    let mut end = bytes.len();
    while end > start && matches!(bytes[end - 1], b'\n' | b'\r') {
        end -= 1;
    }
    let data = &bytes[..end];
    let err = |offset: usize, reason: &str| Error::Graph6 { offset, reason: reason.to_string() };

    for (i, &b) in data.iter().enumerate().skip(start) {
        if !(63..=126).contains(&b) {
            return Err(err(i, &format!("byte {b:#04x} outside 63..=126")));
        }
    }

    let mut pos = start;
    let read = |pos: usize, count: usize| -> Result<u64> {
        if pos + count > data.len() {
            return Err(err(data.len(), "truncated size header"));
        }
        Ok(data[pos..pos + count].iter().fold(0u64, |acc, &b| (acc << 6) | u64::from(b - 63)))
    };
    let first = *data.get(pos).ok_or_else(|| err(pos, "empty input"))?;
    let n = if first < 126 {
        pos += 1;
        u64::from(first - 63)
    } else if data.get(pos + 1) == Some(&126) {
        let n = read(pos + 2, 6)?;
        pos += 8;
        n
    } else {
        let n = read(pos + 1, 3)?;
        pos += 4;
        n
    };
    let n = usize::try_from(n).map_err(|_| err(start, "vertex count too large"))?;

    let nbits = n * n.saturating_sub(1) / 2;
    let need = nbits.div_ceil(6);
    let body = &data[pos..];
    if body.len() < need {
        return Err(err(data.len(), &format!("expected {need} adjacency bytes, found {}", body.len())));
    }
    if body.len() > need {
        return Err(err(pos + need, "trailing bytes after adjacency data"));
    }

    let mut b = GraphBuilder::new(n);
    let mut k = 0usize;
    for j in 1..n {
        for i in 0..j {
            let byte = body[k / 6] - 63;
            if byte >> (5 - k % 6) & 1 == 1 {
                b.set(i, j, true);
            }
            k += 1;
        }
    }
    Ok(b.build())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn known_encodings() {
        // reference strings produced by networkx.to_graph6_bytes
        let p3 = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(encode_graph6(&p3).unwrap(), b"Bg");
        let p3_center2 = Graph::from_edges(3, &[(0, 2), (1, 2)]).unwrap();
        assert_eq!(encode_graph6(&p3_center2).unwrap(), b"BW");
        assert_eq!(encode_graph6(&Graph::empty(1)).unwrap(), b"@");
        assert_eq!(encode_graph6(&Graph::empty(0)).unwrap(), b"?");
    }

    #[test]
    fn long_header_form() {
        let g = Graph::from_edges(100, &[(0, 99), (3, 50)]).unwrap();
        let enc = encode_graph6(&g).unwrap();
        assert_eq!(&enc[..4], &[126, 63, 64, 99]);
        assert_eq!(decode_graph6(&enc).unwrap(), g);
    }

    #[test]
    fn header_and_newline_accepted() {
        let g = decode_graph6(b">>graph6<<Bg\n").unwrap();
        assert_eq!(g, Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap());
    }

    #[test]
    fn malformed_inputs_report_offsets() {
        assert!(matches!(decode_graph6(b""), Err(Error::Graph6 { offset: 0, .. })));
        assert!(matches!(decode_graph6(b"B"), Err(Error::Graph6 { offset: 1, .. })));
        assert!(matches!(decode_graph6(b"Bg?"), Err(Error::Graph6 { offset: 2, .. })));
        assert!(matches!(decode_graph6(b"B "), Err(Error::Graph6 { offset: 1, .. })));
        assert!(matches!(decode_graph6(b"~?"), Err(Error::Graph6 { .. })));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn round_trip(n in 0usize..=50, seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let density: f64 = rng.gen();
            let mut b = GraphBuilder::new(n);
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(density) {
                        b.set(u, v, true);
                    }
                }
            }
            let g = b.build();
            let enc = encode_graph6(&g).unwrap();
            prop_assert_eq!(decode_graph6(&enc).unwrap(), g);
        }
    }
}
