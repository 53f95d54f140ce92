use nalgebra::{Point3, Vector3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::geometry::{PointCloud, TriMesh};
use crate::io::palette::PALETTE;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ball {
    pub center: Point3<f64>,
    pub radius: f64,
}

/// A cluster of balls standing in for a rock stockpile. The exposed union
/// surface plays the role of the visible stockpile surface and each ball is
/// one ground-truth particle.
#[derive(Debug, Clone, PartialEq)]
pub struct BallPile {
    pub balls: Vec<Ball>,
}

impl BallPile {
    /// Strictly inside any ball.
    pub fn contains(&self, p: &Point3<f64>) -> bool {
        self.balls.iter().any(|b| (p - b.center).norm() < b.radius)
    }

    /// Center distance over radius sum for a ball pair; 1.0 means tangent,
    /// below 1.0 overlapping.
    pub fn contact_ratio(&self, i: usize, j: usize) -> f64 {
        let a = &self.balls[i];
        let b = &self.balls[j];
        (a.center - b.center).norm() / (a.radius + b.radius)
    }

    pub fn bounds(&self) -> (Point3<f64>, Point3<f64>) {
        let mut min = Point3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY);
        let mut max = Point3::new(f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
        for b in &self.balls {
            for axis in 0..3 {
                min[axis] = min[axis].min(b.center[axis] - b.radius);
                max[axis] = max[axis].max(b.center[axis] + b.radius);
            }
        }
        (min, max)
    }

    /// Fraction of ball `i`'s sphere that lies outside all other balls,
    /// estimated from `samples` deterministic directions.
    pub fn exposure(&self, i: usize, samples: usize) -> f64 {
        let ball = &self.balls[i];
        let mut rng = ChaCha8Rng::seed_from_u64(0x0b5e_5afe + i as u64);
        let mut outside = 0usize;
        for _ in 0..samples {
            let dir = random_unit(&mut rng);
            let p = ball.center + dir * ball.radius;
            let covered = self
                .balls
                .iter()
                .enumerate()
                .any(|(j, b)| j != i && (p - b.center).norm() < b.radius);
            if !covered {
                outside += 1;
            }
        }
        outside as f64 / samples as f64
    }

    /// Sample the exposed union surface with exact radial normals.
    ///
    /// `density` is points per unit surface area. Points strictly inside
    /// another ball are rejected, so the cloud covers only the visible
    /// surface. Returns the cloud (with per-ball colors) and the ground-truth
    /// ball id of every point. Deterministic for a given seed.
    pub fn sample_surface(&self, density: f64, seed: u64) -> (PointCloud, Vec<u32>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut positions = Vec::new();
        let mut normals = Vec::new();
        let mut colors = Vec::new();
        let mut ball_ids = Vec::new();
        for (i, ball) in self.balls.iter().enumerate() {
            let area = 4.0 * std::f64::consts::PI * ball.radius * ball.radius;
            let n = (density * area).ceil() as usize;
            let color = PALETTE[i % PALETTE.len()];
            for _ in 0..n {
                let dir = random_unit(&mut rng);
                let p = ball.center + dir * ball.radius;
                let covered = self
                    .balls
                    .iter()
                    .enumerate()
                    .any(|(j, b)| j != i && (p - b.center).norm() < b.radius);
                if covered {
                    continue;
                }
                positions.push(p);
                normals.push(dir);
                colors.push(color);
                ball_ids.push(i as u32);
            }
        }
        (
            PointCloud {
                positions,
                normals: Some(normals),
                colors: Some(colors),
            },
            ball_ids,
        )
    }

    /// Ground-truth ball id for every face of a reconstructed mesh: the ball
    /// whose sphere surface is closest to the face centroid.
    pub fn face_ground_truth(&self, mesh: &TriMesh) -> Vec<u32> {
        (0..mesh.face_count() as u32)
            .map(|f| {
                let c = mesh.face_centroid(f);
                let mut best = 0u32;
                let mut best_dist = f64::INFINITY;
                for (i, b) in self.balls.iter().enumerate() {
                    let d = ((c - b.center).norm() - b.radius).abs();
                    if d < best_dist {
                        best_dist = d;
                        best = i as u32;
                    }
                }
                best
            })
            .collect()
    }
}

fn random_unit(rng: &mut ChaCha8Rng) -> Vector3<f64> {
    loop {
        let x: f64 = StandardNormal.sample(rng);
        let y: f64 = StandardNormal.sample(rng);
        let z: f64 = StandardNormal.sample(rng);
        let v = Vector3::new(x, y, z);
        let norm = v.norm();
        if norm > 1e-6 {
            return v / norm;
        }
    }
}

/// Center for a ball of radius `r` tangent to `base` in direction `dir`
/// (unnormalized), with contact ratio `q`.
fn beside(base: &Ball, dir: Vector3<f64>, r: f64, q: f64) -> Point3<f64> {
    base.center + dir.normalize() * (q * (base.radius + r))
}

/// Center for a ball of radius `r` resting on two balls with contact ratios
/// `qa`/`qb`: the highest point on the locus satisfying both center
/// distances.
fn resting_on_two(a: &Ball, b: &Ball, r: f64, qa: f64, qb: f64) -> Point3<f64> {
    let da = qa * (a.radius + r);
    let db = qb * (b.radius + r);
    let axis = b.center - a.center;
    let len = axis.norm();
    assert!(
        len > 1e-9 && da + db > len && len + da.min(db) > da.max(db),
        "resting position infeasible: |ab|={len}, da={da}, db={db}"
    );
    let u = axis / len;
    let t = (len * len + da * da - db * db) / (2.0 * len);
    let rho = (da * da - t * t).sqrt();
    let ring_center = a.center + u * t;
    let up = Vector3::z();
    let w = up - u * up.dot(&u);
    let w_norm = w.norm();
    assert!(w_norm > 1e-9, "support axis is vertical");
    ring_center + w / w_norm * rho
}

/// Sampling density (points per unit area) of the frozen pile clouds.
pub const PILE_CLOUD_DENSITY: f64 = 400.0;
/// Sampling seed of the frozen pile clouds.
pub const PILE_CLOUD_SEED: u64 = 42;

/// The frozen ten-ball stockpile cloud with ground-truth ball ids: the
/// reference input for end-to-end reconstruction and segmentation runs.
pub fn ten_ball_cloud() -> (PointCloud, Vec<u32>) {
    ten_ball_pile().sample_surface(PILE_CLOUD_DENSITY, PILE_CLOUD_SEED)
}

/// The frozen two-ball stockpile cloud with ground-truth ball ids.
pub fn two_ball_cloud() -> (PointCloud, Vec<u32>) {
    two_ball_pile().sample_surface(PILE_CLOUD_DENSITY, PILE_CLOUD_SEED)
}

/// Two overlapping balls: the smallest stockpile with one particle seam.
pub fn two_ball_pile() -> BallPile {
    BallPile {
        balls: vec![
            Ball {
                center: Point3::new(-0.88, 0.0, 0.0),
                radius: 1.0,
            },
            Ball {
                center: Point3::new(0.88, 0.0, 0.0),
                radius: 0.8,
            },
        ],
    }
}

/// Ten-ball stockpile with radii spanning 1.0 down to 0.33. Balls sit tangent
/// or slightly overlapping (contact ratios near 1) so the seams between
/// particles stay sharp, the way separate rocks meet in a real pile.
pub fn ten_ball_pile() -> BallPile {
    let ball = |center: Point3<f64>, radius: f64| Ball { center, radius };

    // Base layer: four balls in a loose rhombus.
    let b0 = ball(Point3::new(-0.95, -0.75, 0.0), 1.0);
    let b1 = ball(Point3::new(0.95, -0.75, 0.0), 0.9);
    let b2 = ball(beside(&b0, Vector3::new(0.10, 1.78, 0.05), 0.8, 0.99), 0.8);
    let b3 = ball(beside(&b1, Vector3::new(0.05, 1.60, 0.0), 0.7, 0.995), 0.7);

    // Second layer: nestled in the pockets between base balls.
    let b4 = ball(resting_on_two(&b0, &b1, 0.62, 0.995, 0.995), 0.62);
    let b5 = ball(resting_on_two(&b0, &b2, 0.55, 1.0, 1.0), 0.55);
    let b6 = ball(resting_on_two(&b1, &b3, 0.48, 0.995, 0.995), 0.48);
    let b7 = ball(resting_on_two(&b2, &b3, 0.42, 1.0, 1.0), 0.42);
    let b8 = ball(resting_on_two(&b4, &b5, 0.36, 1.0, 1.0), 0.36);
    let b9 = ball(resting_on_two(&b4, &b6, 0.33, 0.995, 0.995), 0.33);

    BallPile {
        balls: vec![b0, b1, b2, b3, b4, b5, b6, b7, b8, b9],
    }
}
