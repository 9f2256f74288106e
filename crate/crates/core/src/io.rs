//! CSV and JSON emission plus checksums.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::gaussian::{CovarianceState, HusimiField};
use crate::info::MutualInformation;
use crate::ring::MeanFieldTrajectory;

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

fn write_with<F>(path: &Path, f: F) -> Result<()>
where
    F: FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
{
    let mut w = create(path)?;
    f(&mut w).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}

fn join(values: impl IntoIterator<Item = f64>) -> String {
    values
        .into_iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    write_with(path, |w| writeln!(w, "{text}"))
}

/// `t,re_alpha_1,im_alpha_1,...` with one row per stored sample.
pub fn write_trajectory_csv(path: &Path, traj: &MeanFieldTrajectory) -> Result<()> {
    let n = traj.last().n_nodes();
    write_with(path, |w| {
        let header: Vec<String> = (1..=n)
            .flat_map(|l| [format!("re_alpha_{l}"), format!("im_alpha_{l}")])
            .collect();
        writeln!(w, "t,{}", header.join(","))?;
        for s in &traj.states {
            let vals = s.alpha.iter().flat_map(|z| [z.re, z.im]);
            writeln!(w, "{},{}", s.t, join(vals))?;
        }
        Ok(())
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct CovarianceHeader {
    pub t: f64,
    pub n_nodes: usize,
    pub hbar: f64,
    pub ordering: String,
}

/// Row-major `2N x 2N` CSV preceded by a `# {json}` header line.
pub fn write_covariance_csv(path: &Path, c: &CovarianceState, hbar: f64) -> Result<()> {
    let header = CovarianceHeader {
        t: c.t,
        n_nodes: c.n_nodes(),
        hbar,
        ordering: "q_1,p_1,...,q_N,p_N".into(),
    };
    let header = serde_json::to_string(&header)?;
    write_with(path, |w| {
        writeln!(w, "# {header}")?;
        for row in c.matrix.row_iter() {
            writeln!(w, "{}", join(row.iter().copied()))?;
        }
        Ok(())
    })
}

pub fn read_covariance_csv(path: &Path) -> Result<(CovarianceState, CovarianceHeader)> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut lines = BufReader::new(file).lines();
    let first = lines
        .next()
        .transpose()
        .map_err(|e| Error::io(path, e))?
        .unwrap_or_default();
    let json = first.strip_prefix('#').ok_or_else(|| {
        Error::Config(format!("{}: missing '# {{json}}' header line", path.display()))
    })?;
    let header: CovarianceHeader = serde_json::from_str(json.trim())?;
    let dim = 2 * header.n_nodes;
    let mut values = Vec::with_capacity(dim * dim);
    for (i, line) in lines.enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        for field in line.split(',') {
            values.push(field.trim().parse::<f64>().map_err(|e| {
                Error::Config(format!("{}: row {}: {e}", path.display(), i + 1))
            })?);
        }
    }
    if values.len() != dim * dim {
        return Err(Error::Config(format!(
            "{}: expected {} entries, found {}",
            path.display(),
            dim * dim,
            values.len()
        )));
    }
    let c = CovarianceState::new(header.t, DMatrix::from_row_slice(dim, dim, &values))?;
    Ok((c, header))
}

/// `q,p,density` rows after a `# {json}` line describing the grid.
pub fn write_husimi_csv(path: &Path, field: &HusimiField) -> Result<()> {
    let header = serde_json::json!({
        "node": field.node,
        "center": field.grid.center,
        "extent": field.grid.extent,
        "resolution": field.grid.resolution,
        "mean": field.mean,
        "covariance": field.covariance,
        "normalization": "probability density over (q, p); multiply by 2 hbar for the density over z = (q + i p)/sqrt(2 hbar)",
    });
    write_with(path, |w| {
        writeln!(w, "# {header}")?;
        writeln!(w, "q,p,density")?;
        let n = field.grid.resolution;
        for j in 0..n {
            for i in 0..n {
                writeln!(w, "{},{},{}", field.grid.q(i), field.grid.p(j), field.at(i, j))?;
            }
        }
        Ok(())
    })
}

pub fn write_mi_scan_csv(path: &Path, rows: &[(usize, MutualInformation)]) -> Result<()> {
    write_with(path, |w| {
        writeln!(w, "L,S2_A,S2_B,S2_AB,I2")?;
        for (l, mi) in rows {
            writeln!(w, "{l},{},{},{},{}", mi.s2_a, mi.s2_b, mi.s2_ab, mi.i2)?;
        }
        Ok(())
    })
}

/// Generic table writer: `header` columns, rows of numbers.
pub fn write_table_csv(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    write_with(path, |w| {
        writeln!(w, "{}", header.join(","))?;
        for row in rows {
            writeln!(w, "{}", join(row.iter().copied()))?;
        }
        Ok(())
    })
}

/// `t,re_a_1,im_a_1,n_1,...` for per-site expectations.
pub fn write_moments_csv(
    path: &Path,
    samples: &[(f64, Vec<Complex64>, Vec<f64>)],
) -> Result<()> {
    let n = samples.first().map_or(0, |s| s.1.len());
    write_with(path, |w| {
        let header: Vec<String> = (1..=n)
            .flat_map(|l| [format!("re_a_{l}"), format!("im_a_{l}"), format!("n_{l}")])
            .collect();
        writeln!(w, "t,{}", header.join(","))?;
        for (t, a, occ) in samples {
            let vals = a.iter().zip(occ).flat_map(|(z, n)| [z.re, z.im, *n]);
            writeln!(w, "{t},{}", join(vals))?;
        }
        Ok(())
    })
}

/// Density matrix rows with real and imaginary parts interleaved.
pub fn write_density_csv(path: &Path, rho: &DMatrix<Complex64>) -> Result<()> {
    write_with(path, |w| {
        for row in rho.row_iter() {
            writeln!(w, "{}", join(row.iter().flat_map(|z| [z.re, z.im])))?;
        }
        Ok(())
    })
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn covariance_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.csv");
        let m = DMatrix::from_fn(4, 4, |i, j| 0.5 * (i == j) as u8 as f64 + 0.01 * (i + j) as f64 / 3.0);
        let c = CovarianceState::new(3.25, m).unwrap();
        write_covariance_csv(&path, &c, 1.0).unwrap();
        let (back, header) = read_covariance_csv(&path).unwrap();
        assert_eq!(back, c);
        assert_eq!(header.n_nodes, 2);
    }

    #[test]
    fn malformed_covariance_is_a_config_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "1,2\n3,4\n").unwrap();
        assert!(matches!(read_covariance_csv(&path), Err(Error::Config(_))));
    }

    #[test]
    fn checksum_of_known_bytes() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x");
        std::fs::write(&path, b"abc").unwrap();
        assert_eq!(
            sha256_file(&path).unwrap(),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
