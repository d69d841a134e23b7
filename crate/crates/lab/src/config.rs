//! Run configuration records and their stable content hash.

use serde::Serialize;
use std::collections::BTreeMap;

/// FNV-1a over the canonical JSON encoding; struct field order is fixed at
/// compile time, so equal configs hash equally across runs and platforms.
pub fn config_hash<T: Serialize>(cfg: &T) -> String {
    let json = serde_json::to_string(cfg).expect("config serializes");
    let mut h: u64 = 0xcbf29ce484222325;
    for b in json.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    format!("{h:016x}")
}

/// Reproducibility envelope written next to every command's outputs.
#[derive(Debug, Serialize)]
pub struct RunRecord<C: Serialize> {
    pub version: u32,
    pub tool: &'static str,
    pub tool_version: &'static str,
    pub command: &'static str,
    pub config: C,
    pub config_hash: String,
    pub seed: u64,
    pub deterministic: bool,
    /// Requested worker cap (`--threads` / `STEKLOV_LAB_THREADS`); execution
    /// is sequential either way, the cap is recorded for provenance.
    pub threads: usize,
    /// Wall-clock timings; omitted under `--deterministic` so identical
    /// configs give byte-identical records.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings_ms: Option<BTreeMap<String, u64>>,
    pub residual_summary: BTreeMap<String, f64>,
    pub artifacts: Vec<String>,
}

impl<C: Serialize> RunRecord<C> {
    pub fn new(
        command: &'static str,
        config: C,
        seed: u64,
        deterministic: bool,
        threads: usize,
    ) -> Self {
        let config_hash = config_hash(&config);
        Self {
            version: 1,
            tool: "steklov-lab",
            tool_version: env!("CARGO_PKG_VERSION"),
            command,
            config,
            config_hash,
            seed,
            deterministic,
            threads,
            timings_ms: if deterministic {
                None
            } else {
                Some(BTreeMap::new())
            },
            residual_summary: BTreeMap::new(),
            artifacts: Vec::new(),
        }
    }

    pub fn time(&mut self, key: &str, ms: u64) {
        if let Some(t) = self.timings_ms.as_mut() {
            t.insert(key.to_string(), ms);
        }
    }
}

/// Worker cap resolution: `--threads`, else `STEKLOV_LAB_THREADS`, else 1.
pub fn resolve_threads(flag: Option<usize>) -> usize {
    flag.or_else(|| {
        std::env::var("STEKLOV_LAB_THREADS")
            .ok()
            .and_then(|s| s.parse().ok())
    })
    .unwrap_or(1)
    .max(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Demo {
        a: u32,
        b: String,
    }

    #[test]
    fn hash_stable_and_distinct() {
        let x = Demo {
            a: 1,
            b: "q".into(),
        };
        let y = Demo {
            a: 1,
            b: "q".into(),
        };
        let z = Demo {
            a: 2,
            b: "q".into(),
        };
        assert_eq!(config_hash(&x), config_hash(&y));
        assert_ne!(config_hash(&x), config_hash(&z));
    }

    #[test]
    fn deterministic_record_has_no_timings() {
        let mut r = RunRecord::new(
            "demo",
            Demo {
                a: 1,
                b: "x".into(),
            },
            7,
            true,
            1,
        );
        r.time("solve", 123);
        let json = serde_json::to_string(&r).unwrap();
        assert!(!json.contains("timings_ms"));
    }
}
