//! On-disk cache of solved phase sequences, one text file per key.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};

use super::{solve_phases, PhaseSequence, TargetFunction};
use crate::error::{Error, Result};

static WRITE_SEQ: AtomicUsize = AtomicUsize::new(0);

#[derive(Debug, Clone)]
pub struct PhaseCache {
    dir: PathBuf,
}

impl PhaseCache {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(PhaseCache { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, target: &TargetFunction, degree: usize, tol: f64) -> PathBuf {
        self.dir.join(format!("{target}-d{degree}-tol{tol:e}.phases"))
    }

    /// Loads a cached sequence, re-solving when absent, unreadable or not
    /// accurate enough.
    pub fn get_or_solve(&self, target: &TargetFunction, degree: usize, tol: f64) -> Result<PhaseSequence> {
        let path = self.path(target, degree, tol);
        if let Ok(text) = fs::read_to_string(&path) {
            if let Ok(phis) = parse(&text) {
                let ps = PhaseSequence::from_phis(phis, target.clone());
                if ps.degree == degree && ps.achieved_error <= tol {
                    return Ok(ps);
                }
            }
        }
        let ps = solve_phases(target, degree, tol)?;
        self.store(&path, &ps)?;
        Ok(ps)
    }

    fn store(&self, path: &Path, ps: &PhaseSequence) -> Result<()> {
        let mut text = format!(
            "# {}\n# degree {}\n# achieved_error {:e}\n",
            ps.target, ps.degree, ps.achieved_error
        );
        for phi in &ps.phis {
            text.push_str(&format!("{phi:?}\n"));
        }
        let seq = WRITE_SEQ.fetch_add(1, Ordering::Relaxed);
        let tmp = path.with_extension(format!("tmp{}-{seq}", std::process::id()));
        fs::write(&tmp, text)?;
        fs::rename(&tmp, path)?;
        Ok(())
    }
}

fn parse(text: &str) -> Result<Vec<f64>> {
    let phis = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|(i, l)| {
            l.trim().parse::<f64>().map_err(|e| Error::Parse { line: i + 1, message: e.to_string() })
        })
        .collect::<Result<Vec<f64>>>()?;
    if phis.is_empty() {
        return Err(Error::Parse { line: 0, message: "no phases".into() });
    }
    Ok(phis)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_reuse() {
        let dir = tempfile::tempdir().unwrap();
        let cache = PhaseCache::new(dir.path()).unwrap();
        let target = TargetFunction::SinHalf { tau: 1.5 };
        let first = cache.get_or_solve(&target, 5, 1e-3).unwrap();
        let files: Vec<_> = fs::read_dir(dir.path()).unwrap().collect();
        assert_eq!(files.len(), 1);
        let second = cache.get_or_solve(&target, 5, 1e-3).unwrap();
        assert_eq!(first.phis, second.phis);
    }

    #[test]
    fn corrupt_entry_is_resolved() {
        let dir = tempfile::tempdir().unwrap();
        let cache = PhaseCache::new(dir.path()).unwrap();
        let target = TargetFunction::CosHalf { tau: 1.0 };
        fs::write(cache.path(&target, 4, 1e-3), "not a number\n").unwrap();
        let ps = cache.get_or_solve(&target, 4, 1e-3).unwrap();
        assert!(ps.achieved_error <= 1e-3);
    }
}
