//! On-disk store of spectrum dumps. Entries are named by the SHA-256 of their
//! serialized key; an entry whose stored key differs from the requested one
//! is recomputed and overwritten.

use std::fs;
use std::path::{Path, PathBuf};

use bpdirac::basis::{Basis, NuclearModel};
use bpdirac::dirac::{AngularKappa, DiracSpectrum, SolveOptions, SpectrumKey};
use bpdirac::BigReal;
use sha2::{Digest, Sha256};

use crate::CliError;

pub struct Entry {
    pub hash: String,
    pub key: Option<SpectrumKey>,
    pub bytes: u64,
}

pub struct Cache {
    dir: Option<PathBuf>,
}

fn io(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

pub fn key_of(basis: &Basis, nuc: &NuclearModel, kappa: AngularKappa, c: &BigReal) -> SpectrumKey {
    let digits = basis.ctx().digits();
    SpectrumKey {
        z: nuc.z,
        kappa,
        basis: basis.spec().clone(),
        nuclear: *nuc,
        digits,
        speed_of_light: c.to_sci(digits as usize),
    }
}

pub fn hash(key: &SpectrumKey) -> String {
    let json = serde_json::to_string(key).expect("key serializes");
    Sha256::digest(json.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

impl Cache {
    pub fn new(dir: Option<PathBuf>) -> Self {
        Self { dir }
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    fn path(&self, hash: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{hash}.json")))
    }

    /// Reads a matching entry or computes the spectrum and stores it.
    pub fn spectrum(
        &self,
        basis: &Basis,
        nuc: &NuclearModel,
        kappa: AngularKappa,
        c: &BigReal,
    ) -> Result<DiracSpectrum, CliError> {
        let key = key_of(basis, nuc, kappa, c);
        let Some(path) = self.path(&hash(&key)) else {
            return Ok(DiracSpectrum::compute(basis, nuc, kappa, c, SolveOptions::default())?);
        };
        if let Ok(text) = fs::read_to_string(&path) {
            match DiracSpectrum::from_json(&text) {
                Ok(s) if s.key() == key => return Ok(s),
                _ => eprintln!("cache: entry {} does not match its key, recomputing", path.display()),
            }
        }
        let s = DiracSpectrum::compute(basis, nuc, kappa, c, SolveOptions::default())?;
        let dir = path.parent().expect("entry has a directory");
        fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
        let tmp = path.with_extension("json.tmp");
        fs::write(&tmp, s.to_json()).map_err(|e| io(&tmp, e))?;
        fs::rename(&tmp, &path).map_err(|e| io(&path, e))?;
        Ok(s)
    }

    pub fn entries(&self) -> Result<Vec<Entry>, CliError> {
        let Some(dir) = &self.dir else {
            return Ok(vec![]);
        };
        if !dir.exists() {
            return Ok(vec![]);
        }
        let mut out = Vec::new();
        for item in fs::read_dir(dir).map_err(|e| io(dir, e))? {
            let item = item.map_err(|e| io(dir, e))?;
            let path = item.path();
            let Some(hash) = path
                .file_name()
                .and_then(|n| n.to_str())
                .and_then(|n| n.strip_suffix(".json"))
            else {
                continue;
            };
            let bytes = item.metadata().map_err(|e| io(&path, e))?.len();
            let key = fs::read_to_string(&path)
                .ok()
                .and_then(|t| serde_json::from_str::<SpectrumKey>(&t).ok());
            out.push(Entry {
                hash: hash.to_string(),
                key,
                bytes,
            });
        }
        out.sort_by(|a, b| a.hash.cmp(&b.hash));
        Ok(out)
    }

    /// Removes entries whose hash starts with one of `prefixes`, or all of
    /// them. Returns the number removed.
    pub fn evict(&self, prefixes: &[String], all: bool) -> Result<usize, CliError> {
        let mut removed = 0;
        for e in self.entries()? {
            if all || prefixes.iter().any(|p| e.hash.starts_with(p.as_str())) {
                let path = self.path(&e.hash).expect("entries imply a directory");
                fs::remove_file(&path).map_err(|err| io(&path, err))?;
                removed += 1;
            }
        }
        Ok(removed)
    }
}
