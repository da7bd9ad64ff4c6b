use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::Instance;

/// A generator name with integer parameters, written `NAME:K=V,...`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorSpec {
    pub name: String,
    pub params: BTreeMap<String, u64>,
}

pub const GENERATORS: [&str; 4] = ["uniform-int", "two-scale", "one-point", "rounded"];

impl std::str::FromStr for GeneratorSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, rest) = s.split_once(':').unwrap_or((s, ""));
        let name = name.trim().to_string();
        if !GENERATORS.contains(&name.as_str()) {
            return Err(Error::validation("generator", format!("unknown generator {name:?}")));
        }
        let mut params = BTreeMap::new();
        for part in rest.split(',').filter(|p| !p.trim().is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::validation("generator", format!("expected K=V, got {part:?}")))?;
            let v: u64 = v
                .trim()
                .parse()
                .map_err(|_| Error::validation("generator", format!("bad value in {part:?}")))?;
            params.insert(k.trim().to_string(), v);
        }
        Ok(GeneratorSpec { name, params })
    }
}

impl GeneratorSpec {
    fn get(&self, key: &str, default: u64) -> u64 {
        self.params.get(key).copied().unwrap_or(default)
    }

    fn positive(&self, key: &str, default: u64) -> Result<u64> {
        match self.get(key, default) {
            0 => Err(Error::validation("generator", format!("{key} must be positive"))),
            v => Ok(v),
        }
    }
}

/// Weights in 0..=wmax with at least one positive entry.
fn random_weights(rng: &mut ChaCha8Rng, machines: usize, wmax: u64) -> Vec<u64> {
    let mut w: Vec<u64> = (0..machines).map(|_| rng.gen_range(0..=wmax)).collect();
    if w.iter().all(|&x| x == 0) {
        let i = rng.gen_range(0..machines);
        w[i] = wmax.max(1);
    }
    w
}

/// Deterministic in (spec, seed).
///
/// - `uniform-int:n,pmax,M,wmax`: sizes uniform in 1..=pmax, weights in 0..=wmax.
/// - `two-scale:n,M,pmax,gap,k`: one job of pmax·(n·k)^gap, the rest in 1..=pmax; unit weights.
/// - `one-point:n,pmax,m,M`: all probability on m machines.
/// - `rounded:n,M,lmax,k,wmax`: sizes ⌈(1+1/k)^ℓ⌉ with ℓ uniform in 0..=lmax.
pub fn generate_instance(spec: &GeneratorSpec, seed: u64) -> Result<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = spec.positive("n", 5)? as usize;
    match spec.name.as_str() {
        "uniform-int" => {
            let pmax = spec.positive("pmax", 9)?;
            let machines = spec.positive("M", 3)? as usize;
            let p = (0..n).map(|_| rng.gen_range(1..=pmax)).collect();
            let w = random_weights(&mut rng, machines, spec.get("wmax", 2));
            Instance::new(p, w)
        }
        "two-scale" => {
            let machines = spec.positive("M", 2)? as usize;
            let pmax = spec.positive("pmax", 3)?;
            let gap = spec.positive("gap", 4)? as u32;
            let k = spec.positive("k", 2)?;
            let big = (n as u64 * k)
                .checked_pow(gap)
                .and_then(|f| f.checked_mul(pmax))
                .ok_or_else(|| Error::validation("generator", "two-scale job size overflows u64"))?;
            let mut p: Vec<u64> = (1..n).map(|_| rng.gen_range(1..=pmax)).collect();
            p.insert(0, big);
            Instance::new(p, vec![1; machines])
        }
        "one-point" => {
            let pmax = spec.positive("pmax", 9)?;
            let m = spec.positive("m", 2)? as usize;
            let machines = spec.get("M", m as u64) as usize;
            if machines < m {
                return Err(Error::validation("generator", format!("M={machines} below m={m}")));
            }
            let p = (0..n).map(|_| rng.gen_range(1..=pmax)).collect();
            let mut w = vec![0; machines];
            w[m - 1] = 1;
            Instance::new(p, w)
        }
        "rounded" => {
            let machines = spec.positive("M", 3)? as usize;
            let lmax = spec.get("lmax", 7) as i64;
            let k = spec.positive("k", 2)?;
            let growth = crate::rational::Rational::new(k + 1, k);
            let table: Vec<u64> = (0..=lmax)
                .map(|l| growth.pow(l).ceil_u64())
                .collect::<Result<_>>()?;
            let p = (0..n).map(|_| table[rng.gen_range(0..table.len())]).collect();
            let w = random_weights(&mut rng, machines, spec.get("wmax", 2));
            Instance::new(p, w)
        }
        other => Err(Error::validation("generator", format!("unknown generator {other:?}"))),
    }
}
