//! Binary kernel cache: `DKRN` magic, u32 version, u32 order, f64 beta, then
//! the row-major f64 entries. All fields little-endian.

use std::io::{Read, Write};

use ndarray::Array2;

use super::DiffusionKernel;
use crate::error::{Error, Result};

pub const CACHE_MAGIC: &[u8; 4] = b"DKRN";
pub const CACHE_VERSION: u32 = 1;
/// Row sums of a reloaded kernel must be this close to 1.
const ROW_SUM_TOL: f64 = 1e-10;

pub fn write_kernel_cache<W: Write>(kernel: &DiffusionKernel, mut out: W) -> Result<()> {
    let n = u32::try_from(kernel.order())
        .map_err(|_| Error::InvalidParameter("kernel too large for cache format".into()))?;
    out.write_all(CACHE_MAGIC)?;
    out.write_all(&CACHE_VERSION.to_le_bytes())?;
    out.write_all(&n.to_le_bytes())?;
    out.write_all(&kernel.beta.to_le_bytes())?;
    for x in kernel.matrix.iter() {
        out.write_all(&x.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_kernel_cache<R: Read>(mut input: R) -> Result<DiffusionKernel> {
    let mut magic = [0u8; 4];
    input.read_exact(&mut magic)?;
    if &magic != CACHE_MAGIC {
        return Err(Error::Format("not a kernel cache (bad magic)".into()));
    }
    let mut word = [0u8; 4];
    input.read_exact(&mut word)?;
    let version = u32::from_le_bytes(word);
    if version != CACHE_VERSION {
        return Err(Error::Format(format!("unsupported kernel cache version {version}")));
    }
    input.read_exact(&mut word)?;
    let n = u32::from_le_bytes(word) as usize;
    let mut dword = [0u8; 8];
    input.read_exact(&mut dword)?;
    let beta = f64::from_le_bytes(dword);

    let mut bytes = vec![0u8; n * n * 8];
    input.read_exact(&mut bytes).map_err(|_| Error::Format("truncated kernel cache".into()))?;
    let entries: Vec<f64> =
        bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect();
    let matrix = Array2::from_shape_vec((n, n), entries).map_err(|e| Error::Format(e.to_string()))?;
    let kernel = DiffusionKernel::from_matrix(beta, matrix)?;
    let dev = kernel.row_sum_deviation();
    if dev > ROW_SUM_TOL {
        return Err(Error::Format(format!("kernel row sums deviate from 1 by {dev:e}")));
    }
    Ok(kernel)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::WeightedGraph;
    use crate::kernel::diffusion_kernel;
    use crate::spectral::{laplacian, LaplacianMode};

    #[test]
    fn round_trip_and_validation() {
        let g = WeightedGraph::from_index_edges(3, &[(0, 1, 1.0), (1, 2, 2.0)]).unwrap();
        let dec = laplacian(&g, LaplacianMode::Weighted).decompose().unwrap();
        let k = diffusion_kernel(&dec, 0.05).unwrap();
        let mut buf = Vec::new();
        write_kernel_cache(&k, &mut buf).unwrap();
        assert_eq!(&buf[..4], b"DKRN");
        assert_eq!(buf.len(), 4 + 4 + 4 + 8 + 9 * 8);
        let back = read_kernel_cache(buf.as_slice()).unwrap();
        assert_eq!(back.beta, 0.05);
        assert_eq!(back.matrix, k.matrix);

        let mut corrupt = buf.clone();
        let last = corrupt.len() - 8;
        corrupt[last..].copy_from_slice(&5.0f64.to_le_bytes());
        assert!(matches!(read_kernel_cache(corrupt.as_slice()), Err(Error::Format(_))));
        assert!(matches!(read_kernel_cache(&buf[..30]), Err(Error::Format(_))));
        let mut bad = buf;
        bad[0] = b'X';
        assert!(matches!(read_kernel_cache(bad.as_slice()), Err(Error::Format(_))));
    }
}
