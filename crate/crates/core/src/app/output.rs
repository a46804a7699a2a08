//! Line-out CSV, binary conserved dump and profile text.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::run::{ProfileReport, Simulation};
use crate::error::{FksError, Result};
use crate::phase_space::{Conserved, ConservedField, SpatialGrid};

pub const DUMP_HEADER_BYTES: usize = 12;

/// `(u, T)` from conservative values, without validity checks.
fn velocity_temperature(c: &Conserved) -> ([f64; 3], f64) {
    let u = c.mom.map(|m| m / c.rho);
    let u2 = u[0] * u[0] + u[1] * u[1] + u[2] * u[2];
    (u, (2.0 * c.energy / c.rho - u2) / 3.0)
}

/// Moments along the main diagonal `(i, i, i)`, one row per cell.
pub fn diagonal_csv(field: &ConservedField, sgrid: &SpatialGrid) -> String {
    let n = sgrid.n_per_axis();
    let mut s = String::from("x,rho,ux,uy,uz,T\n");
    for i in 0..n {
        let c = &field.cells()[sgrid.index(i, i, i)];
        let (u, t) = velocity_temperature(c);
        let _ = writeln!(s, "{},{},{},{},{},{}", sgrid.center_1d(i), c.rho, u[0], u[1], u[2], t);
    }
    s
}

/// Three little-endian `u32` extents, then five little-endian `f64` per
/// cell, x fastest.
pub fn encode_dump(field: &ConservedField, n: [usize; 3]) -> Vec<u8> {
    let mut out = Vec::with_capacity(DUMP_HEADER_BYTES + field.len() * 40);
    for e in n {
        out.extend_from_slice(&(e as u32).to_le_bytes());
    }
    for c in field.cells() {
        for v in c.as_array() {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

pub fn decode_dump(bytes: &[u8]) -> Result<([usize; 3], ConservedField)> {
    let bad = |m: String| FksError::Dimension(format!("conserved dump: {m}"));
    if bytes.len() < DUMP_HEADER_BYTES {
        return Err(bad(format!("{} bytes is shorter than the header", bytes.len())));
    }
    let mut n = [0usize; 3];
    for (a, e) in n.iter_mut().enumerate() {
        *e = u32::from_le_bytes(bytes[4 * a..4 * a + 4].try_into().unwrap()) as usize;
    }
    let cells = n[0] * n[1] * n[2];
    let want = DUMP_HEADER_BYTES + cells * 40;
    if bytes.len() != want {
        return Err(bad(format!(
            "{}x{}x{} needs {want} bytes, file has {}",
            n[0],
            n[1],
            n[2],
            bytes.len()
        )));
    }
    let vals: Vec<f64> = bytes[DUMP_HEADER_BYTES..]
        .chunks_exact(8)
        .map(|b| f64::from_le_bytes(b.try_into().unwrap()))
        .collect();
    let field = vals
        .chunks_exact(5)
        .map(|c| Conserved::from_array([c[0], c[1], c[2], c[3], c[4]]))
        .collect();
    Ok((n, ConservedField::new(field)))
}

pub fn read_dump(path: &Path) -> Result<([usize; 3], ConservedField)> {
    let bytes = std::fs::read(path).map_err(|e| FksError::io(path, e))?;
    decode_dump(&bytes)
}

pub fn profile_text(report: &ProfileReport) -> String {
    format!("{}\n# key=value\n{}", report.table(), report.key_values())
}

#[derive(Debug, Clone)]
pub struct OutputPaths {
    pub csv: PathBuf,
    pub dump: PathBuf,
    pub profile: PathBuf,
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| FksError::io(path, e))
}

/// Writes `diagonal.csv`, `conserved.bin` and `profile.txt` into `dir`.
pub fn emit_outputs(sim: &Simulation, dir: &Path) -> Result<OutputPaths> {
    std::fs::create_dir_all(dir).map_err(|e| FksError::io(dir, e))?;
    let paths = OutputPaths {
        csv: dir.join("diagonal.csv"),
        dump: dir.join("conserved.bin"),
        profile: dir.join("profile.txt"),
    };
    let n = sim.sgrid.n_per_axis();
    write(&paths.csv, diagonal_csv(&sim.conserved, &sim.sgrid).as_bytes())?;
    write(&paths.dump, &encode_dump(&sim.conserved, [n; 3]))?;
    write(&paths.profile, profile_text(&sim.report).as_bytes())?;
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(n: usize) -> ConservedField {
        ConservedField::new(
            (0..n * n * n)
                .map(|j| {
                    let r = 1.0 + j as f64 / 7.0;
                    Conserved {
                        rho: r,
                        mom: [0.1 * r, -0.2, 1.0 / 3.0],
                        energy: 3.0 * r,
                    }
                })
                .collect(),
        )
    }

    #[test]
    fn dump_size_and_round_trip() {
        let f = field(4);
        let bytes = encode_dump(&f, [4; 3]);
        assert_eq!(bytes.len(), 2572);
        assert_eq!(&bytes[..4], &4u32.to_le_bytes());
        let (n, back) = decode_dump(&bytes).unwrap();
        assert_eq!(n, [4; 3]);
        assert_eq!(back, f);
        assert!(decode_dump(&bytes[..2571]).is_err());
    }

    #[test]
    fn csv_rows() {
        let g = SpatialGrid::new(4, 0.0, 2.0).unwrap();
        let csv = diagonal_csv(&field(4), &g);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[0], "x,rho,ux,uy,uz,T");
        assert!(lines[1].starts_with("0.25,1,0.1,"));
    }
}
