//! Graph and observed-pair persistence.
//!
//! Two on-disk forms are supported:
//!
//! * SNAP-style edge lists: whitespace-separated `u v` pairs, one edge per
//!   line, `#` comments allowed. On save a `# nodes N edges M` header is
//!   written; on load such a header (when present and consistent) preserves
//!   isolated vertices, otherwise vertex ids are compacted to `0..n-1` in
//!   sorted order of the original ids.
//! * A little-endian binary cache (magic `PGMG`): version, flags, `n`, `m`,
//!   CSR offsets (`u64`), neighbor array (`u32`), optional weights (`f64`).
//!
//! Observed pairs get their own container (magic `PGMP`) bundling both
//! graphs, the hidden truth permutation, and the sampling probability.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{DropReport, Graph, GraphBuilder};
use crate::sample::ObservedPair;

const GRAPH_MAGIC: &[u8; 4] = b"PGMG";
const PAIR_MAGIC: &[u8; 4] = b"PGMP";
const CACHE_VERSION: u16 = 1;
const FLAG_WEIGHTS: u16 = 1;

/// Result of loading an edge list: the graph, the original vertex ids in
/// index order, and the counts of dropped lines.
#[derive(Debug, Clone)]
pub struct LoadedEdgeList {
    pub graph: Graph,
    /// `original_ids[i]` is the id the input file used for vertex `i`.
    pub original_ids: Vec<u64>,
    pub dropped: DropReport,
}

/// Parses a SNAP-style edge list.
pub fn load_edge_list(path: impl AsRef<Path>) -> Result<LoadedEdgeList> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);

    let mut edges: Vec<(u64, u64)> = Vec::new();
    let mut header_nodes: Option<u64> = None;
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('#') {
            // save_edge_list writes "# nodes N edges M"; SNAP datasets use
            // "# Nodes: N Edges: M" - accept both spellings.
            let tokens: Vec<&str> = comment
                .split(|c: char| c.is_whitespace() || c == ':')
                .filter(|t| !t.is_empty())
                .collect();
            for w in tokens.windows(2) {
                if w[0].eq_ignore_ascii_case("nodes") {
                    if let Ok(v) = w[1].parse::<u64>() {
                        header_nodes = Some(v);
                    }
                }
            }
            continue;
        }
        let mut it = trimmed.split_whitespace();
        let u = it
            .next()
            .ok_or_else(|| Error::parse(path, lineno, "missing first vertex id"))?;
        let v = it
            .next()
            .ok_or_else(|| Error::parse(path, lineno, "missing second vertex id"))?;
        if it.next().is_some() {
            return Err(Error::parse(path, lineno, "expected exactly two fields"));
        }
        let u: u64 = u
            .parse()
            .map_err(|_| Error::parse(path, lineno, format!("bad vertex id {u:?}")))?;
        let v: u64 = v
            .parse()
            .map_err(|_| Error::parse(path, lineno, format!("bad vertex id {v:?}")))?;
        edges.push((u, v));
    }
    if edges.is_empty() {
        return Err(Error::parse(path, 0, "no edges in file"));
    }

    let max_id = edges.iter().map(|&(u, v)| u.max(v)).max().unwrap();
    let (n, original_ids, remap): (usize, Vec<u64>, Option<std::collections::HashMap<u64, u32>>) =
        match header_nodes {
            Some(hn) if hn > max_id => {
                // dense id space declared by the header; keep ids as-is
                (hn as usize, (0..hn).collect(), None)
            }
            _ => {
                let mut ids: Vec<u64> = edges.iter().flat_map(|&(u, v)| [u, v]).collect();
                ids.sort_unstable();
                ids.dedup();
                let map: std::collections::HashMap<u64, u32> = ids
                    .iter()
                    .enumerate()
                    .map(|(i, &id)| (id, i as u32))
                    .collect();
                (ids.len(), ids, Some(map))
            }
        };

    let mut builder = GraphBuilder::new(n)?;
    for (u, v) in edges {
        let (a, b) = match &remap {
            Some(map) => (map[&u], map[&v]),
            None => (u as u32, v as u32),
        };
        builder.add_edge(a, b)?;
    }
    let (graph, dropped) = builder.finish_with_report();
    Ok(LoadedEdgeList {
        graph,
        original_ids,
        dropped,
    })
}

/// Writes a SNAP-style edge list with a `# nodes N edges M` header.
pub fn save_edge_list(graph: &Graph, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let mut run = || -> std::io::Result<()> {
        writeln!(w, "# nodes {} edges {}", graph.n(), graph.edge_count())?;
        for (u, v) in graph.edges() {
            writeln!(w, "{u} {v}")?;
        }
        w.flush()
    };
    run().map_err(|e| Error::io(path, e))
}

fn write_u16(w: &mut impl Write, v: u16) -> std::io::Result<()> {
    w.write_all(&v.to_le_bytes())
}
fn write_u64(w: &mut impl Write, v: u64) -> std::io::Result<()> {
    w.write_all(&v.to_le_bytes())
}

fn read_exact<const N: usize>(r: &mut impl Read) -> std::io::Result<[u8; N]> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf)?;
    Ok(buf)
}
fn read_u16(r: &mut impl Read) -> std::io::Result<u16> {
    Ok(u16::from_le_bytes(read_exact::<2>(r)?))
}
fn read_u64(r: &mut impl Read) -> std::io::Result<u64> {
    Ok(u64::from_le_bytes(read_exact::<8>(r)?))
}

fn write_graph_body(w: &mut impl Write, graph: &Graph) -> std::io::Result<()> {
    let (offsets, neighbors, weights) = graph.raw_parts();
    let flags = if weights.is_some() { FLAG_WEIGHTS } else { 0 };
    write_u16(w, CACHE_VERSION)?;
    write_u16(w, flags)?;
    write_u64(w, (offsets.len() - 1) as u64)?;
    write_u64(w, neighbors.len() as u64)?;
    for &o in offsets {
        write_u64(w, o)?;
    }
    for &v in neighbors {
        w.write_all(&v.to_le_bytes())?;
    }
    if let Some(ws) = weights {
        for &x in ws {
            w.write_all(&x.to_le_bytes())?;
        }
    }
    Ok(())
}

fn read_graph_body(r: &mut impl Read) -> Result<Graph> {
    let fmt = |m: &str| Error::DataFormat(m.to_string());
    let version = read_u16(r).map_err(|_| fmt("truncated graph header"))?;
    if version != CACHE_VERSION {
        return Err(fmt(&format!("unsupported graph cache version {version}")));
    }
    let flags = read_u16(r).map_err(|_| fmt("truncated graph header"))?;
    let n = read_u64(r).map_err(|_| fmt("truncated graph header"))? as usize;
    let m = read_u64(r).map_err(|_| fmt("truncated graph header"))? as usize;
    let mut offsets = Vec::with_capacity(n + 1);
    for _ in 0..=n {
        offsets.push(read_u64(r).map_err(|_| fmt("truncated offsets"))?);
    }
    if offsets[0] != 0 || offsets[n] as usize != m {
        return Err(fmt("inconsistent CSR offsets"));
    }
    let mut neighbors = Vec::with_capacity(m);
    for _ in 0..m {
        let b = read_exact::<4>(r).map_err(|_| fmt("truncated neighbor array"))?;
        neighbors.push(u32::from_le_bytes(b));
    }
    let weights = if flags & FLAG_WEIGHTS != 0 {
        let mut ws = Vec::with_capacity(n);
        for _ in 0..n {
            let b = read_exact::<8>(r).map_err(|_| fmt("truncated weight array"))?;
            ws.push(f64::from_le_bytes(b));
        }
        Some(ws)
    } else {
        None
    };
    Ok(Graph::from_raw_parts(offsets, neighbors, weights))
}

/// Writes the binary graph cache.
pub fn save_graph_cache(graph: &Graph, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let run = |w: &mut BufWriter<File>| -> std::io::Result<()> {
        w.write_all(GRAPH_MAGIC)?;
        write_graph_body(w, graph)?;
        w.flush()
    };
    run(&mut w).map_err(|e| Error::io(path, e))
}

/// Reads the binary graph cache.
pub fn load_graph_cache(path: impl AsRef<Path>) -> Result<Graph> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = BufReader::new(file);
    let magic = read_exact::<4>(&mut r).map_err(|e| Error::io(path, e))?;
    if &magic != GRAPH_MAGIC {
        return Err(Error::DataFormat(format!(
            "{}: not a graph cache (bad magic)",
            path.display()
        )));
    }
    read_graph_body(&mut r)
}

/// Loads a graph from either format, deciding by the magic bytes.
pub fn load_graph_auto(path: impl AsRef<Path>) -> Result<Graph> {
    let path = path.as_ref();
    let mut file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut magic = [0u8; 4];
    let is_cache = match file.read(&mut magic) {
        Ok(4) => &magic == GRAPH_MAGIC,
        _ => false,
    };
    if is_cache {
        load_graph_cache(path)
    } else {
        Ok(load_edge_list(path)?.graph)
    }
}

/// Writes an observed pair (both graphs, truth, s) to one binary file.
pub fn save_observed_pair(pair: &ObservedPair, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let run = |w: &mut BufWriter<File>| -> std::io::Result<()> {
        w.write_all(PAIR_MAGIC)?;
        write_u16(w, CACHE_VERSION)?;
        w.write_all(&pair.s.to_le_bytes())?;
        write_u64(w, pair.n() as u64)?;
        for a in 0..pair.n() as u32 {
            w.write_all(&pair.truth(a).to_le_bytes())?;
        }
        write_graph_body(w, &pair.g1)?;
        write_graph_body(w, &pair.g2)?;
        w.flush()
    };
    run(&mut w).map_err(|e| Error::io(path, e))
}

/// Reads an observed pair written by [`save_observed_pair`].
pub fn load_observed_pair(path: impl AsRef<Path>) -> Result<ObservedPair> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = BufReader::new(file);
    let fmt = |m: &str| Error::DataFormat(format!("{}: {m}", path.display()));
    let magic = read_exact::<4>(&mut r).map_err(|_| fmt("truncated pair file"))?;
    if &magic != PAIR_MAGIC {
        return Err(fmt("not an observed-pair file (bad magic)"));
    }
    let version = read_u16(&mut r).map_err(|_| fmt("truncated pair header"))?;
    if version != CACHE_VERSION {
        return Err(fmt(&format!("unsupported pair file version {version}")));
    }
    let s = f64::from_le_bytes(read_exact::<8>(&mut r).map_err(|_| fmt("truncated pair header"))?);
    let n = read_u64(&mut r).map_err(|_| fmt("truncated pair header"))? as usize;
    let mut truth = Vec::with_capacity(n);
    for _ in 0..n {
        let b = read_exact::<4>(&mut r).map_err(|_| fmt("truncated truth map"))?;
        truth.push(u32::from_le_bytes(b));
    }
    let g1 = read_graph_body(&mut r)?;
    let g2 = read_graph_body(&mut r)?;
    ObservedPair::from_parts(g1, g2, truth, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::generate_chung_lu;
    use crate::sample::sample_observed_pair;
    use crate::weights::WeightedGraphSpec;

    fn tmp(name: &str) -> std::path::PathBuf {
        let dir = std::env::temp_dir().join("pgmatch-io-tests");
        std::fs::create_dir_all(&dir).unwrap();
        dir.join(format!("{}-{name}", std::process::id()))
    }

    #[test]
    fn parses_simple_edge_list() {
        let path = tmp("path.txt");
        std::fs::write(&path, "# a comment\n0 1\n1 2\n").unwrap();
        let loaded = load_edge_list(&path).unwrap();
        assert_eq!(loaded.graph.n(), 3);
        assert_eq!(loaded.graph.edge_count(), 2);
        assert_eq!(loaded.original_ids, vec![0, 1, 2]);
        assert_eq!(loaded.dropped, DropReport::default());
    }

    #[test]
    fn drops_self_loops_with_count() {
        let path = tmp("loop.txt");
        std::fs::write(&path, "1 1\n1 2\n").unwrap();
        let loaded = load_edge_list(&path).unwrap();
        assert_eq!(loaded.dropped.self_loops, 1);
        assert_eq!(loaded.graph.edge_count(), 1);
    }

    #[test]
    fn compacts_sparse_ids() {
        let path = tmp("sparse.txt");
        std::fs::write(&path, "10 400\n400 7\n").unwrap();
        let loaded = load_edge_list(&path).unwrap();
        assert_eq!(loaded.graph.n(), 3);
        assert_eq!(loaded.original_ids, vec![7, 10, 400]);
        assert!(loaded.graph.has_edge(1, 2)); // 10 -- 400
    }

    #[test]
    fn reports_parse_errors_with_line_numbers() {
        let path = tmp("bad.txt");
        std::fs::write(&path, "0 1\nnot an edge\n").unwrap();
        match load_edge_list(&path) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
        let empty = tmp("empty.txt");
        std::fs::write(&empty, "# only comments\n").unwrap();
        assert!(load_edge_list(&empty).is_err());
    }

    #[test]
    fn edge_list_round_trip_preserves_adjacency() {
        let spec = WeightedGraphSpec::new(1000, 2.5, 5.0, 3).unwrap();
        let g = generate_chung_lu(&spec).unwrap();
        let path = tmp("roundtrip.txt");
        save_edge_list(&g, &path).unwrap();
        let loaded = load_edge_list(&path).unwrap();
        // header preserves isolated vertices, ids stay dense
        assert_eq!(loaded.graph.n(), g.n());
        for v in 0..g.n() as u32 {
            assert_eq!(loaded.graph.neighbors(v), g.neighbors(v));
        }
    }

    #[test]
    fn cache_round_trip_is_exact() {
        let spec = WeightedGraphSpec::new(500, 2.5, 5.0, 4).unwrap();
        let g = generate_chung_lu(&spec).unwrap();
        let path = tmp("cache.bin");
        save_graph_cache(&g, &path).unwrap();
        let loaded = load_graph_cache(&path).unwrap();
        assert_eq!(g, loaded);
        let auto = load_graph_auto(&path).unwrap();
        assert_eq!(g, auto);
    }

    #[test]
    fn pair_round_trip_is_exact() {
        let spec = WeightedGraphSpec::new(200, 2.5, 5.0, 5).unwrap();
        let g = generate_chung_lu(&spec).unwrap();
        let pair = sample_observed_pair(&g, 0.8, 9).unwrap();
        let path = tmp("pair.bin");
        save_observed_pair(&pair, &path).unwrap();
        let loaded = load_observed_pair(&path).unwrap();
        assert_eq!(pair, loaded);
    }

    #[test]
    fn bad_magic_is_a_data_error() {
        let path = tmp("garbage.bin");
        std::fs::write(&path, b"GARBAGE!").unwrap();
        assert!(load_graph_cache(&path).is_err());
        assert!(load_observed_pair(&path).is_err());
    }
}
