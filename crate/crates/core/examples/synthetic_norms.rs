//! Regenerates the packaged synthetic similarity and typicality norms.
//!
//! Each category gets a point in a small latent space (cluster centre plus
//! seeded jitter); similarity on the 0–20 scale decays with squared distance,
//! and typicality is a 1–7 rating that follows the rank of each category's mean
//! similarity to the rest of its domain. The output only stands in for real norm data so the
//! toolkit can run end to end without it.
//!
//! Run: `cargo run -p induction-core --example synthetic_norms -- crates/core/data/norms`

use std::fmt::Write as _;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Cluster<'a> = ([f64; 3], &'a [&'a str]);

const MAMMALS: &[Cluster] = &[
    ([0.0, 0.0, 0.0], &["cow", "pig", "sheep", "horse", "donkey", "llama", "camel"]),
    ([1.1, 0.5, 0.0], &["cat", "dog", "hamster", "rabbit", "mouse"]),
    ([-0.6, 1.3, 0.2], &["elephant", "rhino", "giraffe", "zebra", "lion", "tiger", "hippo"]),
    ([0.9, -0.9, 0.4], &["hedgehog", "squirrel", "beaver", "deer", "fox", "wolf"]),
    ([2.6, 1.6, 2.4], &["bat", "kangaroo", "monkey"]),
];

const BIRDS: &[Cluster] = &[
    ([0.0, 0.0, 0.0], &["blackbird", "robin", "sparrow", "swallow", "crow", "magpie", "dove", "canary"]),
    ([1.2, 0.4, 0.2], &["duck", "swan", "heron", "stork", "seagull"]),
    ([-0.7, 1.2, 0.3], &["eagle", "falcon", "owl", "vulture"]),
    ([0.8, -1.2, 0.9], &["chicken", "rooster", "turkey", "peacock"]),
    ([2.5, -1.8, 2.6], &["ostrich", "penguin", "parrot"]),
];

const VEHICLES: &[Cluster] = &[
    ([0.0, 0.0, 0.0], &["car", "taxi", "van", "truck", "jeep", "bus", "caravan"]),
    ([1.0, 0.6, 0.1], &["bicycle", "moped", "motorbike", "skateboard"]),
    ([-0.6, 1.0, -0.4], &["train", "tram", "tractor"]),
    ([0.9, -1.1, 0.8], &["carriage", "cart", "sled", "hovercraft"]),
    ([2.4, 1.9, 2.7], &["airplane", "helicopter", "rocket", "zeppelin"]),
    ([-2.2, -1.6, 2.2], &["boat", "submarine"]),
];

/// Categories whose typicality is measured against (the first-experiment set).
const MAMMALS_CORE: &[&str] = &[
    "bat", "beaver", "camel", "cat", "cow", "deer", "dog", "donkey", "elephant", "giraffe", "hamster", "hedgehog",
    "horse", "kangaroo", "lion", "llama", "mouse", "pig", "rabbit", "rhino", "sheep", "squirrel", "tiger", "zebra",
];

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

fn build(name: &str, clusters: &[Cluster], core: Option<&[&str]>, seed: u64) -> (String, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut labels = Vec::new();
    let mut points = Vec::new();
    for (centre, members) in clusters {
        for m in *members {
            let p: Vec<f64> = centre.iter().map(|c| c + 0.45 * normal(&mut rng)).collect();
            labels.push(m.to_string());
            points.push(p);
        }
    }
    let n = labels.len();
    let mut sim = vec![vec![20.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d2: f64 = points[i].iter().zip(&points[j]).map(|(a, b)| (a - b).powi(2)).sum();
            let v = (20.0 * (-d2 / 4.0).exp() * 100.0).round() / 100.0;
            sim[i][j] = v;
            sim[j][i] = v;
        }
    }

    let in_core = |l: &str| core.map_or(true, |c| c.contains(&l));
    let core_idx: Vec<usize> = (0..n).filter(|&i| in_core(&labels[i])).collect();
    let mean_sim: Vec<f64> = (0..n)
        .map(|i| {
            let others: Vec<f64> = core_idx.iter().filter(|&&j| j != i).map(|&j| sim[i][j]).collect();
            others.iter().sum::<f64>() / others.len() as f64
        })
        .collect();
    // Rank-uniform typicality keeps the order of mean similarity while
    // spreading ratings evenly, so both z-score tails are populated.
    let core_means: Vec<f64> = core_idx.iter().map(|&i| mean_sim[i]).collect();
    let denom = (core_means.len() - 1) as f64;
    let typicality: Vec<f64> = mean_sim
        .iter()
        .map(|m| core_means.iter().filter(|c| *c < m).count() as f64 / denom)
        .collect();

    let mut sim_csv = String::from("category");
    for l in &labels {
        let _ = write!(sim_csv, ",{l}");
    }
    sim_csv.push('\n');
    for i in 0..n {
        sim_csv.push_str(&labels[i]);
        for j in 0..n {
            if i == j {
                sim_csv.push(',');
            } else {
                let _ = write!(sim_csv, ",{}", sim[i][j]);
            }
        }
        sim_csv.push('\n');
    }

    let mut typ_csv = String::from("category,rating\n");
    for i in 0..n {
        let t = 1.0 + 6.0 * typicality[i].min(1.0);
        let _ = writeln!(typ_csv, "{},{}", labels[i], (t * 1000.0).round() / 1000.0);
    }
    eprintln!("{name}: {n} categories");
    (sim_csv, typ_csv)
}

fn main() {
    let out: PathBuf = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "crates/core/data/norms".into())
        .into();
    std::fs::create_dir_all(&out).expect("create output directory");
    for (name, clusters, core, seed) in [
        ("mammals", MAMMALS, Some(MAMMALS_CORE), 11u64),
        ("birds", BIRDS, None, 12),
        ("vehicles", VEHICLES, None, 13),
    ] {
        let (sim, typ) = build(name, clusters, core, seed);
        std::fs::write(out.join(format!("{name}_similarity.csv")), sim).expect("write similarity");
        std::fs::write(out.join(format!("{name}_typicality.csv")), typ).expect("write typicality");
    }
}
