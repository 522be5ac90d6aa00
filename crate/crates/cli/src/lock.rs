//! Advisory lock: `<store>.lock`, created exclusively and removed on drop.

use std::ffi::OsString;
use std::fs::{self, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};

#[derive(Debug)]
pub struct StoreLock {
    path: PathBuf,
}

pub fn lock_path(store: &Path) -> PathBuf {
    let mut name = OsString::from(store.as_os_str());
    name.push(".lock");
    PathBuf::from(name)
}

impl StoreLock {
    pub fn acquire(store: &Path) -> io::Result<Self> {
        let path = lock_path(store);
        let mut file = OpenOptions::new()
            .write(true)
            .create_new(true)
            .open(&path)
            .map_err(|e| {
                if e.kind() == io::ErrorKind::AlreadyExists {
                    io::Error::new(
                        e.kind(),
                        format!(
                            "store is in use: {} exists (remove it if no other evolve process is running)",
                            path.display()
                        ),
                    )
                } else {
                    e
                }
            })?;
        writeln!(file, "{}", std::process::id())?;
        Ok(Self { path })
    }
}

impl Drop for StoreLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}
