#![allow(dead_code)]

use pspo::chain_env::PolicyParams;

/// Central difference of `f` along every coordinate of `x`.
pub fn central_differences(x: &[f64], h: f64, f: impl Fn(&[f64]) -> f64) -> Vec<f64> {
    (0..x.len())
        .map(|i| {
            let mut up = x.to_vec();
            let mut down = x.to_vec();
            up[i] += h;
            down[i] -= h;
            (f(&up) - f(&down)) / (2.0 * h)
        })
        .collect()
}

/// Packs length logits followed by the quality logit.
pub fn pack(policy: &PolicyParams) -> Vec<f64> {
    let mut v = policy.length_logits().to_vec();
    v.push(policy.quality_param());
    v
}

pub fn unpack(v: &[f64]) -> PolicyParams {
    PolicyParams::new(v[..v.len() - 1].to_vec(), v[v.len() - 1]).unwrap()
}

pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / numeric.abs().max(analytic.abs()).max(1e-8)
}

pub fn logit(q: f64) -> f64 {
    (q / (1.0 - q)).ln()
}

pub fn bundled_dataset_path() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data/synthetic_steps.jsonl")
}
