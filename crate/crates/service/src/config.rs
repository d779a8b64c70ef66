use std::net::SocketAddr;
use std::path::PathBuf;

/// Listen address, data directory and job worker count.
#[derive(Debug, Clone)]
pub struct Config {
    pub addr: SocketAddr,
    pub data_dir: PathBuf,
    pub workers: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            addr: SocketAddr::from(([127, 0, 0, 1], 8080)),
            data_dir: PathBuf::from("oppenheim-data"),
            workers: std::thread::available_parallelism().map(|n| n.get()).unwrap_or(2),
        }
    }
}

impl Config {
    /// Defaults overridden by `OPPENHEIM_ADDR`, `OPPENHEIM_DATA_DIR` and
    /// `OPPENHEIM_WORKERS` when set.
    pub fn from_env() -> Result<Self, String> {
        let mut c = Config::default();
        if let Ok(a) = std::env::var("OPPENHEIM_ADDR") {
            c.addr = a.parse().map_err(|e| format!("OPPENHEIM_ADDR: {e}"))?;
        }
        if let Ok(d) = std::env::var("OPPENHEIM_DATA_DIR") {
            c.data_dir = PathBuf::from(d);
        }
        if let Ok(w) = std::env::var("OPPENHEIM_WORKERS") {
            c.workers = w.parse().map_err(|e| format!("OPPENHEIM_WORKERS: {e}"))?;
        }
        if c.workers == 0 {
            return Err("worker count must be positive".into());
        }
        Ok(c)
    }
}
