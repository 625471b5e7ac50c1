use faer::{c64, Mat};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::FcsSpec;
use crate::error::{Error, Result};
use crate::qlinalg::{dagger, matmul, random, svd};

fn zero() -> c64 {
    c64::new(0.0, 0.0)
}

/// AKLT blocks for spin levels (+, 0, -).
pub fn aklt() -> FcsSpec {
    let a = (2.0f64 / 3.0).sqrt();
    let z = (1.0f64 / 3.0).sqrt();
    let mut plus = Mat::<c64>::zeros(2, 2);
    plus[(0, 1)] = c64::new(a, 0.0);
    let mut mid = Mat::<c64>::zeros(2, 2);
    mid[(0, 0)] = c64::new(-z, 0.0);
    mid[(1, 1)] = c64::new(z, 0.0);
    let mut minus = Mat::<c64>::zeros(2, 2);
    minus[(1, 0)] = c64::new(-a, 0.0);
    FcsSpec::from_blocks(&[plus, mid, minus]).expect("static shape")
}

/// Random isometry: rows of a Gaussian `b × (d·b)` matrix orthonormalized.
pub fn random_spec(d: usize, b: usize, seed: u64) -> Result<FcsSpec> {
    if d == 0 || b == 0 || d * b < b {
        return Err(Error::InvalidParameter("random spec needs d, b >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = random::ginibre(&mut rng, b, d * b);
    let dec = svd(g.as_ref())?;
    let v = matmul(dec.u.as_ref(), dagger(dec.v.as_ref()).as_ref());
    FcsSpec::new(d, b, v)
}

/// `b = 1` product state with every site in `|0⟩`.
pub fn product(d: usize) -> Result<FcsSpec> {
    let v = Mat::from_fn(1, d, |_, j| if j == 0 { c64::new(1.0, 0.0) } else { zero() });
    FcsSpec::new(d, 1, v)
}

/// `V_0 = 1_b`, other levels zero: `Ê` is the identity map.
pub fn identity(d: usize, b: usize) -> Result<FcsSpec> {
    let v = Mat::from_fn(b, d * b, |i, j| if j == i { c64::new(1.0, 0.0) } else { zero() });
    FcsSpec::new(d, b, v)
}

/// `V_s = |s⟩⟨s|` with `b = d`: cat-like, degenerate peripheral spectrum.
pub fn ghz(d: usize) -> Result<FcsSpec> {
    let v = Mat::from_fn(d, d * d, |i, j| if j == i * d + i { c64::new(1.0, 0.0) } else { zero() });
    FcsSpec::new(d, d, v)
}

fn parse_args(s: &str) -> Result<Vec<(Option<String>, u64)>> {
    s.split(',')
        .map(|part| {
            let part = part.trim();
            let (key, val) = match part.split_once('=') {
                Some((k, v)) => (Some(k.trim().to_string()), v.trim()),
                None => (None, part),
            };
            val.parse::<u64>()
                .map(|v| (key, v))
                .map_err(|_| Error::UnknownName(format!("bad argument `{part}`")))
        })
        .collect()
}

/// Looks up a named spec: `aklt`, `random(d,b,seed=N)`, `product(d)`,
/// `identity(d,b)` or `ghz(d)`.
pub fn builtin_spec(name: &str) -> Result<FcsSpec> {
    let name = name.trim();
    if name.eq_ignore_ascii_case("aklt") {
        return Ok(aklt());
    }
    let (head, args) = match name.split_once('(') {
        Some((h, rest)) if rest.ends_with(')') => (h.trim(), parse_args(&rest[..rest.len() - 1])?),
        _ => return Err(Error::UnknownName(name.to_string())),
    };
    let vals: Vec<usize> = args.iter().map(|(_, v)| *v as usize).collect();
    match (head, vals.as_slice()) {
        ("random", [d, b, _]) => {
            let seed = args[2].1;
            if args[2].0.as_deref().is_some_and(|k| k != "seed") {
                return Err(Error::UnknownName(name.to_string()));
            }
            random_spec(*d, *b, seed)
        }
        ("product", [d]) => product(*d),
        ("identity", [d, b]) => identity(*d, *b),
        ("ghz", [d]) => ghz(*d),
        _ => Err(Error::UnknownName(name.to_string())),
    }
}
