//! Parsers for list-valued flags and for `--state` / `--op` specifications.

use std::fs;
use std::path::Path;

use qfi_lab::hermitian::matrix::from_pairs;
use qfi_lab::hermitian::{random_pure_vector, rng_from_seed, CMatrix, DensityMatrix, GeneratorBasis, Observable};
use qfi_lab::spin::{collective_operator, Axis};
use serde::Deserialize;

use crate::CliError;

/// `3`, `2..6` (inclusive), `5,15,25`, or a mix such as `2..4,7`.
pub fn parse_dims(s: &str) -> Result<Vec<usize>, CliError> {
    let bad = || CliError::Usage(format!("cannot parse dimension list '{s}'"));
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim) {
        if let Some((a, b)) = part.split_once("..") {
            let a: usize = a.trim().parse().map_err(|_| bad())?;
            let b: usize = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
            if a > b {
                return Err(bad());
            }
            out.extend(a..=b);
        } else {
            out.push(part.parse().map_err(|_| bad())?);
        }
    }
    if out.is_empty() {
        return Err(bad());
    }
    Ok(out)
}

/// Comma-separated positive integers.
pub fn parse_list(s: &str) -> Result<Vec<usize>, CliError> {
    s.split(',')
        .map(|p| p.trim().parse::<usize>().map_err(|_| CliError::Usage(format!("cannot parse integer list '{s}'"))))
        .collect()
}

/// `start:stop:count` (inclusive, evenly spaced) or comma-separated values.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Usage(format!("cannot parse grid '{s}'"));
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() == 3 {
        let a: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let b: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
        return match n {
            0 => Err(bad()),
            1 => Ok(vec![a]),
            _ => Ok((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()),
        };
    }
    s.split(',').map(|p| p.trim().parse::<f64>().map_err(|_| bad())).collect()
}

/// On-disk matrix: `{"dim": d, "matrix": [[re, im], ...]}`, row-major.
#[derive(Debug, Deserialize)]
pub struct MatrixFile {
    pub dim: usize,
    pub matrix: Vec<[f64; 2]>,
}

fn load_matrix(path: &str) -> Result<CMatrix<f64>, CliError> {
    let text = fs::read_to_string(Path::new(path)).map_err(|e| CliError::Io(format!("{path}: {e}")))?;
    let file: MatrixFile = serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{path}: {e}")))?;
    let pairs: Vec<(f64, f64)> = file.matrix.iter().map(|p| (p[0], p[1])).collect();
    Ok(from_pairs(file.dim, &pairs)?)
}

/// `key=value` options after the family name.
fn options(body: &str) -> Vec<(&str, &str)> {
    body.split(',').filter(|s| !s.is_empty()).map(|kv| kv.split_once('=').unwrap_or((kv, ""))).collect()
}

fn option<T: std::str::FromStr>(opts: &[(&str, &str)], key: &str, spec: &str) -> Result<Option<T>, CliError> {
    match opts.iter().find(|(k, _)| *k == key) {
        None => Ok(None),
        Some((_, v)) => v.parse().map(Some).map_err(|_| CliError::Usage(format!("bad value for '{key}' in '{spec}'"))),
    }
}

/// `mixed:d=N`, `pure:random,d=N,seed=S`, `pure:d=N` (first basis state),
/// `diag:p1,p2,...` or `file:path.json`.
pub fn parse_state(spec: &str) -> Result<DensityMatrix<f64>, CliError> {
    let (kind, body) = spec.split_once(':').unwrap_or((spec, ""));
    let opts = options(body);
    let need_d = || -> Result<usize, CliError> {
        option(&opts, "d", spec)?.ok_or_else(|| CliError::Usage(format!("state '{spec}' needs d=")))
    };
    match kind {
        "mixed" => Ok(DensityMatrix::maximally_mixed(need_d()?)),
        "pure" => {
            let d = need_d()?;
            if opts.iter().any(|(k, _)| *k == "random") {
                let seed = option(&opts, "seed", spec)?.unwrap_or(0u64);
                Ok(DensityMatrix::pure(&random_pure_vector(d, &mut rng_from_seed(seed)))?)
            } else {
                let mut p = vec![0.0; d];
                p[0] = 1.0;
                Ok(DensityMatrix::diagonal(&p)?)
            }
        }
        "diag" => {
            let p = body
                .split(',')
                .map(|x| x.trim().parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| CliError::Usage(format!("cannot parse '{spec}'")))?;
            Ok(DensityMatrix::diagonal(&p)?)
        }
        "file" => Ok(DensityMatrix::new(load_matrix(body)?)?),
        _ => Err(CliError::Usage(format!("unknown state family '{kind}'"))),
    }
}

/// A generator index (Gell-Mann ordering), `sx`/`sy`/`sz` for a qubit,
/// `jx`/`jy`/`jz` for a register of `log2 d` qubits, a Pauli string such as
/// `pauli:XZI`, or `file:path.json`.
pub fn parse_op(spec: &str, dim: usize) -> Result<Observable<f64>, CliError> {
    let op = match spec {
        "sx" => Observable::pauli_x(),
        "sy" => Observable::pauli_y(),
        "sz" => Observable::pauli_z(),
        "jx" | "jy" | "jz" => {
            let n = dim.trailing_zeros() as usize;
            if dim < 2 || 1 << n != dim {
                return Err(CliError::Usage(format!("'{spec}' needs a qubit register, got dimension {dim}")));
            }
            let axis: Axis = spec[1..].parse()?;
            collective_operator(n, axis)?.operator
        }
        _ => {
            if let Some(path) = spec.strip_prefix("file:") {
                Observable::new(load_matrix(path)?)?
            } else if let Some(word) = spec.strip_prefix("pauli:") {
                pauli_string(word)?
            } else if let Ok(k) = spec.parse::<usize>() {
                let basis = GeneratorBasis::gell_mann(dim)?;
                if k >= basis.len() {
                    return Err(CliError::Usage(format!("generator index {k} out of range 0..{}", basis.len())));
                }
                basis.generator(k).clone()
            } else {
                return Err(CliError::Usage(format!("cannot parse operator '{spec}'")));
            }
        }
    };
    if op.dim() != dim {
        return Err(qfi_lab::Error::DimensionMismatch { expected: dim, got: op.dim() }.into());
    }
    Ok(op)
}

fn pauli_string(word: &str) -> Result<Observable<f64>, CliError> {
    if word.is_empty() {
        return Err(CliError::Usage("empty Pauli string".into()));
    }
    let mut m = CMatrix::<f64>::identity(1, 1);
    for c in word.chars() {
        let p = match c.to_ascii_uppercase() {
            'I' => CMatrix::identity(2, 2),
            'X' => Observable::pauli_x().matrix().clone(),
            'Y' => Observable::pauli_y().matrix().clone(),
            'Z' => Observable::pauli_z().matrix().clone(),
            _ => return Err(CliError::Usage(format!("bad Pauli letter '{c}'"))),
        };
        m = m.kronecker(&p);
    }
    Ok(Observable::new(m)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimension_lists() {
        assert_eq!(parse_dims("3").unwrap(), vec![3]);
        assert_eq!(parse_dims("2..5").unwrap(), vec![2, 3, 4, 5]);
        assert_eq!(parse_dims("5,15,25").unwrap(), vec![5, 15, 25]);
        assert_eq!(parse_dims("2..3,7").unwrap(), vec![2, 3, 7]);
        assert!(parse_dims("5..2").is_err());
        assert!(parse_dims("x").is_err());
    }

    #[test]
    fn grids() {
        assert_eq!(parse_grid("0:1:3").unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(parse_grid("0.25,0.5").unwrap(), vec![0.25, 0.5]);
        assert!(parse_grid("0:1:0").is_err());
    }

    #[test]
    fn named_states_and_operators() {
        let s = parse_state("mixed:d=2").unwrap();
        assert!((s.purity() - 0.5).abs() < 1e-15);
        let p = parse_state("pure:random,d=4,seed=7").unwrap();
        assert_eq!(p.rank(), 1);
        assert_eq!(p, parse_state("pure:random,d=4,seed=7").unwrap());
        assert!(parse_state("mixed").is_err());
        assert!(parse_state("blob:d=2").is_err());
        assert_eq!(parse_op("sz", 2).unwrap(), Observable::pauli_z());
        assert_eq!(parse_op("pauli:Z", 2).unwrap(), Observable::pauli_z());
        assert_eq!(parse_op("pauli:ZZ", 4).unwrap().dim(), 4);
        assert_eq!(parse_op("7", 3).unwrap(), GeneratorBasis::gell_mann(3).unwrap().generator(7).clone());
        assert!(matches!(parse_op("sz", 3), Err(CliError::Library(qfi_lab::Error::DimensionMismatch { .. }))));
        assert!(parse_op("8", 3).is_err());
        assert!(parse_op("jz", 8).is_ok() && parse_op("jz", 6).is_err());
    }
}
