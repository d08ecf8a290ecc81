#![allow(dead_code)]

use ik6rp::{Chain, DhRow, JointType, Joints, Pattern, Study};
use rand::Rng;

pub fn chain_2rp3r() -> Chain {
    Chain::from_table(&[
        ('R', None, Some(0.0), 0.1, 90.0),
        ('R', None, Some(0.0), -0.425, 0.0),
        ('P', Some(0.0), None, -0.39225, 0.0),
        ('R', None, Some(0.10915), 0.01, 90.0),
        ('R', None, Some(0.09465), 0.0, -90.0),
        ('R', None, Some(0.0), 0.0, 0.0),
    ])
    .unwrap()
}

pub fn pose_2rp3r() -> Study {
    Study::new([190.335, 213.413, 9.36544, 164.774, -35.3968, -32.883, 74.4773, 79.2444]).unwrap()
}

pub const SOLUTIONS_2RP3R: [[f64; 6]; 4] = [
    [-16.1819, -70.8614, 0.0810177, 81.6927, -60.0253, 32.9097],
    [40.9555, -58.2515, -0.123834, 133.782, -9.67835, -36.9601],
    [60.0, -70.0, -0.2, 40.0, 19.0, 67.0],
    [79.2813, -71.455, -0.266949, 55.7351, 36.9289, 51.0502],
];

pub fn chain_2r2p2r() -> Chain {
    Chain::from_table(&[
        ('R', None, Some(0.0), 0.2, 23.0),
        ('R', None, Some(0.3), 0.2, 23.0),
        ('P', Some(-45.0), None, 0.3, 45.0),
        ('P', Some(71.0), None, 0.4, 35.0),
        ('R', None, Some(0.3), 0.0, 20.0),
        ('R', None, Some(0.0), 0.0, 0.0),
    ])
    .unwrap()
}

pub fn pose_2r2p2r() -> Study {
    Study::new([-5.37543, 64.9811, -75.9243, 69.384, -59.0113, 6.15132, -22.5377, -34.995]).unwrap()
}

pub const SOLUTIONS_2R2P2R: [[f64; 6]; 4] = [
    [-4.2843, 70.5556, -0.378641, 0.639115, -110.876, -167.772],
    [10.0, 20.0, 0.1, -0.1, 31.0, 55.0],
    [104.328, -64.1116, 0.0119017, 0.579609, 10.0365, 107.717],
    [128.106, -72.0589, -0.33362, 1.03798, -35.978, 157.911],
];

/// Largest deviation of `got` from `want`, split into angles (degrees) and offsets.
pub fn deviation(chain: &Chain, got: &[f64; 6], want: &[f64; 6]) -> (f64, f64) {
    let (mut ang, mut off) = (0.0f64, 0.0f64);
    for (i, row) in chain.rows().iter().enumerate() {
        let d = (got[i] - want[i]).abs();
        match row.joint() {
            JointType::Revolute => ang = ang.max(d.min(360.0 - d)),
            JointType::Prismatic => off = off.max(d),
        }
    }
    (ang, off)
}

fn away<R: Rng>(rng: &mut R, margin: f64, hi: f64) -> f64 {
    let v = rng.gen_range(margin..hi);
    if rng.gen_bool(0.5) {
        v
    } else {
        -v
    }
}

/// Twist angle whose half-tangent keeps `margin` away from 0 and ±1.
fn twist<R: Rng>(rng: &mut R, margin: f64) -> f64 {
    loop {
        let a: f64 = rng.gen_range(-150.0..150.0);
        let l = (a.to_radians() / 2.0).tan().abs();
        if l >= margin && (l - 1.0).abs() >= margin {
            return a;
        }
    }
}

/// Random normalized chain of the given pattern with all link parameters at
/// least `margin` away from the degeneracy thresholds.
pub fn random_chain<R: Rng>(rng: &mut R, pattern: Pattern, margin: f64) -> Chain {
    let types = pattern.types();
    let rows: Vec<DhRow<f64>> = (0..6)
        .map(|i| {
            let (a, alpha) = if i == 5 { (0.0, 0.0) } else { (away(rng, margin, 1.0), twist(rng, margin)) };
            match types[i] {
                JointType::Revolute => {
                    let d = if i == 0 || i == 5 { 0.0 } else { away(rng, margin, 1.0) };
                    DhRow::new(i + 1, JointType::Revolute, None, Some(d), a, alpha)
                }
                JointType::Prismatic => {
                    DhRow::new(i + 1, JointType::Prismatic, Some(rng.gen_range(-170.0..170.0)), None, a, alpha)
                }
            }
            .unwrap()
        })
        .collect();
    Chain::new([rows[0], rows[1], rows[2], rows[3], rows[4], rows[5]]).unwrap()
}

/// Random joints: θ in (−170°, 170°), d in (−1, 1).
pub fn random_joints<R: Rng>(rng: &mut R, chain: &Chain) -> Joints {
    let ext: [f64; 6] = std::array::from_fn(|i| match chain.rows()[i].joint() {
        JointType::Revolute => rng.gen_range(-170.0..170.0),
        JointType::Prismatic => rng.gen_range(-1.0..1.0),
    });
    Joints::from_external(chain, ext).unwrap()
}
