//! File inputs, atomic outputs and seed derivation.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use lg_core::xl::LiouvillianAnsatz;
use lg_core::PauliSum;

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn require_files(paths: &[&Path]) -> Result<()> {
    for p in paths {
        if !p.is_file() {
            bail!("input file {} does not exist", p.display());
        }
    }
    Ok(())
}

pub fn out_path(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}

/// Pauli sum from either the `<re> <im> <letters>` line format or JSON
/// `{"n": .., "terms": [[re, im, "XZ"], ..]}`.
pub fn read_pauli_sum(path: &Path) -> Result<PauliSum> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if text.trim_start().starts_with('{') {
        #[derive(serde::Deserialize)]
        struct File {
            n: usize,
            terms: Vec<(f64, f64, String)>,
        }
        let f: File = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        Ok(PauliSum::from_triples(f.n, &f.terms)?)
    } else {
        PauliSum::parse_text(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

/// Line format accepted by [`read_pauli_sum`].
pub fn pauli_sum_text(sum: &PauliSum) -> String {
    sum.to_triples().into_iter().map(|(re, im, s)| format!("{re:?} {im:?} {s}\n")).collect()
}

/// `xxz:<sites>`, `local:<n>:<k>` or a JSON file path.
pub fn read_ansatz(arg: &str) -> Result<LiouvillianAnsatz> {
    let parts: Vec<&str> = arg.split(':').collect();
    let num = |s: &str| s.parse::<usize>().with_context(|| format!("bad number {s:?} in ansatz {arg:?}"));
    match parts.as_slice() {
        ["xxz", n] => Ok(LiouvillianAnsatz::xxz_chain(num(n)?)?),
        ["local", n, k] => Ok(LiouvillianAnsatz::full_local(num(n)?, num(k)?)?),
        _ => {
            let path = Path::new(arg);
            require_files(&[path])?;
            Ok(LiouvillianAnsatz::read(path)?)
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Per-row seed, independent of evaluation order.
pub fn row_seed(base: u64, n: usize, rep: usize) -> u64 {
    splitmix64(splitmix64(base ^ splitmix64(n as u64)) ^ rep as u64)
}
