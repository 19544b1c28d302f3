//! Offline serialization of path ensembles.
//!
//! Binary layout (all little-endian):
//!
//! ```text
//! magic   8 bytes  b"HOMGPB01"
//! d       u32      state dimension
//! n       u32      regime count
//! N       u64      path count
//! grid    u64      uniform grid length (horizon/dt nodes, before jump insertion)
//! eps     f64      scaling tag (0 = rescaled process)
//! seed    u64      master seed
//! then per path:
//!   len   u64      node count for this path (>= grid; jumps are inserted)
//!   times f64 * len
//!   states f64 * len * d   (row-major per node)
//!   regimes u16 * len
//! ```

use std::io::{Read, Write};

use crate::sde::bundle::{PathBundle, PathRecord};
use crate::{Error, Result};

const MAGIC: &[u8; 8] = b"HOMGPB01";

pub fn write_bundle(bundle: &PathBundle, mut w: impl Write) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&(bundle.d as u32).to_le_bytes())?;
    w.write_all(&(bundle.n as u32).to_le_bytes())?;
    w.write_all(&(bundle.paths.len() as u64).to_le_bytes())?;
    let grid = (bundle.horizon / bundle.dt).ceil() as u64 + 1;
    w.write_all(&grid.to_le_bytes())?;
    w.write_all(&bundle.eps.to_le_bytes())?;
    w.write_all(&bundle.master_seed.to_le_bytes())?;
    for p in &bundle.paths {
        w.write_all(&(p.times.len() as u64).to_le_bytes())?;
        for t in &p.times {
            w.write_all(&t.to_le_bytes())?;
        }
        for x in &p.states {
            w.write_all(&x.to_le_bytes())?;
        }
        for r in &p.regimes {
            w.write_all(&r.to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn read_bundle(mut r: impl Read) -> Result<PathBundle> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Config("not a path bundle file".into()));
    }
    let mut b4 = [0u8; 4];
    let mut b8 = [0u8; 8];
    r.read_exact(&mut b4)?;
    let d = u32::from_le_bytes(b4) as usize;
    r.read_exact(&mut b4)?;
    let n = u32::from_le_bytes(b4) as usize;
    r.read_exact(&mut b8)?;
    let n_paths = u64::from_le_bytes(b8) as usize;
    r.read_exact(&mut b8)?;
    let _grid = u64::from_le_bytes(b8);
    r.read_exact(&mut b8)?;
    let eps = f64::from_le_bytes(b8);
    r.read_exact(&mut b8)?;
    let master_seed = u64::from_le_bytes(b8);
    let mut paths = Vec::with_capacity(n_paths);
    let mut horizon = 0.0f64;
    for _ in 0..n_paths {
        r.read_exact(&mut b8)?;
        let len = u64::from_le_bytes(b8) as usize;
        let mut times = Vec::with_capacity(len);
        for _ in 0..len {
            r.read_exact(&mut b8)?;
            times.push(f64::from_le_bytes(b8));
        }
        let mut states = Vec::with_capacity(len * d);
        for _ in 0..len * d {
            r.read_exact(&mut b8)?;
            states.push(f64::from_le_bytes(b8));
        }
        let mut regimes = Vec::with_capacity(len);
        let mut b2 = [0u8; 2];
        for _ in 0..len {
            r.read_exact(&mut b2)?;
            regimes.push(u16::from_le_bytes(b2));
        }
        if let Some(&last) = times.last() {
            horizon = horizon.max(last);
        }
        paths.push(PathRecord { times, states, regimes });
    }
    Ok(PathBundle {
        d,
        n,
        eps,
        master_seed,
        horizon,
        dt: f64::NAN,
        paths,
        warnings: Vec::new(),
    })
}

/// CSV export of selected paths: columns `path,node,t,regime,x0..x{d-1}`.
pub fn write_paths_csv(bundle: &PathBundle, select: &[usize], w: impl Write) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    let mut header = vec!["path".to_string(), "node".into(), "t".into(), "regime".into()];
    for k in 0..bundle.d {
        header.push(format!("x{k}"));
    }
    wtr.write_record(&header)?;
    for &pi in select {
        let p = bundle
            .paths
            .get(pi)
            .ok_or_else(|| Error::Dimension(format!("path index {pi} out of range")))?;
        for node in 0..p.len() {
            let mut rec = vec![
                pi.to_string(),
                node.to_string(),
                p.times[node].to_string(),
                p.regimes[node].to_string(),
            ];
            for v in p.state(node, bundle.d) {
                rec.push(v.to_string());
            }
            wtr.write_record(&rec)?;
        }
    }
    wtr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::test_specs;
    use crate::sde::bundle::simulate_bar_paths;

    #[test]
    fn binary_round_trip_is_exact() {
        let spec = test_specs::benchmark();
        let bundle = simulate_bar_paths(&spec, 0.2, &[0.1], 1, 1.5, 0.1, 5, 77).unwrap();
        let mut buf = Vec::new();
        write_bundle(&bundle, &mut buf).unwrap();
        let back = read_bundle(buf.as_slice()).unwrap();
        assert_eq!(back.d, bundle.d);
        assert_eq!(back.paths, bundle.paths);
    }

    #[test]
    fn csv_export_has_expected_shape() {
        let spec = test_specs::pure_bm(2);
        let bundle = simulate_bar_paths(&spec, 0.0, &[0.0, 0.0], 0, 0.5, 0.1, 3, 1).unwrap();
        let mut buf = Vec::new();
        write_paths_csv(&bundle, &[0, 2], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "path,node,t,regime,x0,x1");
        assert_eq!(lines.len(), 1 + 2 * bundle.paths[0].len());
    }
}
