use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::CliError;

/// One `out/<command>/<label>/` directory; every file written through it is
/// listed with its SHA-256 in `manifest.txt`.
#[derive(Debug)]
pub struct OutDir {
    pub dir: PathBuf,
    files: Vec<(String, String)>,
}

impl OutDir {
    pub fn create(root: &Path, command: &str, label: &str) -> Result<Self, CliError> {
        let dir = root.join(command).join(label);
        std::fs::create_dir_all(&dir).map_err(|source| CliError::Io {
            path: dir.clone(),
            source,
        })?;
        Ok(OutDir { dir, files: Vec::new() })
    }

    pub fn write(&mut self, name: &str, bytes: impl AsRef<[u8]>) -> Result<PathBuf, CliError> {
        let path = self.dir.join(name);
        let bytes = bytes.as_ref();
        std::fs::write(&path, bytes).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
        self.files.push((name.to_string(), hex::encode(Sha256::digest(bytes))));
        Ok(path)
    }

    /// Writes `manifest.txt`: `<sha256>  <name>` lines sorted by name.
    pub fn finish(mut self) -> Result<PathBuf, CliError> {
        self.files.sort();
        let text: String = self.files.iter().map(|(n, h)| format!("{h}  {n}\n")).collect();
        let path = self.dir.join("manifest.txt");
        std::fs::write(&path, text).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
        Ok(self.dir)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_lists_hashes() {
        let tmp = tempfile::tempdir().unwrap();
        let mut o = OutDir::create(tmp.path(), "geom", "48x33").unwrap();
        o.write("b.txt", "hello").unwrap();
        o.write("a.txt", "").unwrap();
        let dir = o.finish().unwrap();
        let m = std::fs::read_to_string(dir.join("manifest.txt")).unwrap();
        assert_eq!(
            m,
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855  a.txt\n\
             2cf24dba5fb0a30e26e83b2ac5b9e29e1b161e5c1fa7425e73043362938b9824  b.txt\n"
        );
        assert!(dir.ends_with("geom/48x33"));
    }
}
