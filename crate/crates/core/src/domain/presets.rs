//! Named domains used by the verification suite and the CLI.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::finsler::{wulff_polygon, NormSpec, Polygon};

/// `[0, 1]²`.
pub fn unit_square() -> Polygon {
    Polygon::rectangle(0.0, 0.0, 1.0, 1.0).expect("valid rectangle")
}

/// `[-1/2, 1/2]²`, unit area and centered at the origin.
pub fn centered_square() -> Polygon {
    Polygon::rectangle(-0.5, -0.5, 0.5, 0.5).expect("valid rectangle")
}

/// Regular hexagon of unit area centered at the origin.
pub fn hexagon() -> Polygon {
    let r = (2.0 / (3.0 * 3f64.sqrt())).sqrt();
    Polygon::regular(6, r, [0.0, 0.0], 0.0).expect("valid hexagon")
}

/// Regular `sides`-gon inscribed in the Euclidean disk of radius `radius`.
pub fn disk(sides: usize, radius: f64) -> Result<Polygon> {
    Polygon::regular(sides, radius, [0.0, 0.0], 0.0)
}

/// `]-1/(2k), 1/(2k)[ × ]-k/2, k/2[`, unit area for every `k`.
pub fn thin_rectangle(k: f64) -> Result<Polygon> {
    if !(k > 0.0) || !k.is_finite() {
        return Err(Error::InvalidInput(format!("thin rectangle k = {k}")));
    }
    Polygon::rectangle(-0.5 / k, -0.5 * k, 0.5 / k, 0.5 * k)
}

/// Seeded random convex polygon of unit area with its centroid at the origin.
///
/// Vertices lie on a random ellipse at sorted random angles with a minimum
/// angular gap, which keeps interior angles away from 0 and π.
pub fn random_convex(seed: u64, vertices: usize) -> Result<Polygon> {
    if vertices < 3 {
        return Err(Error::InvalidInput("need at least 3 vertices".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a: f64 = rng.gen_range(0.7..1.3);
    let b: f64 = rng.gen_range(0.7..1.3);
    let rot: f64 = rng.gen_range(0.0..PI);
    let gap = PI / vertices as f64;
    let slack = 2.0 * PI - gap * vertices as f64;
    let mut cuts: Vec<f64> = (0..vertices).map(|_| rng.gen_range(0.0..slack)).collect();
    cuts.sort_by(f64::total_cmp);
    let pts: Vec<[f64; 2]> = cuts
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let th = c + gap * i as f64;
            let (x, y) = (a * th.cos(), b * th.sin());
            [x * rot.cos() - y * rot.sin(), x * rot.sin() + y * rot.cos()]
        })
        .collect();
    let poly = Polygon::new_any_orientation(pts)?;
    let c = poly.centroid();
    let s = 1.0 / poly.area().sqrt();
    poly.transformed(s, [-s * c[0], -s * c[1]])
}

/// Wulff polygon of `norm` with area `area`, centered at the origin.
pub fn wulff_with_area(norm: &NormSpec, area: f64, sides: usize) -> Result<Polygon> {
    let r = (area / norm.kappa()).sqrt();
    wulff_polygon(norm, r, [0.0, 0.0], sides)
}

const MAX_DISK_SIDES: usize = 1 << 16;

/// Looks up a domain by name: `unit-square`, `square`, `hexagon`, `disk`,
/// `disk-<sides>`, `thin-<k>`, `random-<seed>`.
pub fn named(name: &str) -> Result<Polygon> {
    let bad = || Error::InvalidInput(format!("unknown domain preset {name:?}"));
    match name {
        "unit-square" => Ok(unit_square()),
        "square" => Ok(centered_square()),
        "hexagon" => Ok(hexagon()),
        "disk" => disk(256, 1.0),
        _ => {
            if let Some(s) = name.strip_prefix("disk-") {
                match s.parse::<usize>() {
                    Ok(k) if (3..=MAX_DISK_SIDES).contains(&k) => disk(k, 1.0),
                    _ => Err(bad()),
                }
            } else if let Some(k) = name.strip_prefix("thin-") {
                thin_rectangle(k.parse().map_err(|_| bad())?)
            } else if let Some(seed) = name.strip_prefix("random-") {
                random_convex(seed.parse().map_err(|_| bad())?, 9)
            } else {
                Err(bad())
            }
        }
    }
}
