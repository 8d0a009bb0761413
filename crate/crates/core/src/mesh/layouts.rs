//! Block layouts of the master mesh, one per geometry family.
//!
//! Curved boundaries are resolved by polar blocks whose rays end on a square
//! or a tensor grid; every block shares its interface nodes exactly with its
//! neighbours so the assembled mesh is conforming.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)] // shadowed by std float methods whenever std is linked
use num_traits::Float;

use super::builder::Builder;
use super::lines::{graded_lines, layers, uniform, SizeField, SizeSource};
use super::{MasterMesh, MeshOptions, Region};
use crate::error::Result;
use crate::geometry::{star_vertices, ComplexLayout, DomainDescription, ExtensionChoice, Family, HoleShape, Sign};
use crate::Point;

type P2 = [f64; 2];

fn lerp(p: P2, q: P2, t: f64) -> Point {
    [p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1]), 0.0]
}

fn lines(lo: f64, hi: f64, required: &[f64], sources: &[(f64, f64, f64)], o: &MeshOptions) -> Vec<f64> {
    let field = SizeField {
        sources: sources.iter().map(|&(lo, hi, h)| SizeSource { lo, hi, h }).collect(),
        growth: o.growth(),
        h_max: o.h_max(),
    };
    graded_lines(lo, hi, required, &field)
}

fn sorted_unique(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    v
}

fn even_at_least(x: f64) -> usize {
    let n = x.ceil().max(2.0) as usize;
    n + n % 2
}

pub(crate) fn build_master(domain: &DomainDescription, o: &MeshOptions) -> Result<MasterMesh> {
    let s = domain.params.size;
    let mesh = match domain.family {
        Family::DiskHole(shape) => disk_hole(shape, s, o),
        Family::SquareHalfDisk(sign) => half_disk(sign, s, o),
        Family::SquareCorner(sign) => square_corner(sign, s, o),
        Family::SquareComplex(layout) => square_complex(layout, s, o),
        Family::TwoHoles => two_holes(s, o),
        Family::CubeBox(sign) => cube(false, sign, s, o),
        Family::CubeCorner(sign) => cube(true, sign, s, o),
        Family::Round => round(s, o),
        Family::Fillet => fillet(domain.params.extension, o),
    };
    Ok(mesh)
}

/// Add the rings between successive closed or open node rows `levels[k]`,
/// `levels[k+1]`, using the layer parameters `ts[k]`.
fn rings(b: &mut Builder, levels: &[Vec<P2>], ts: &[Vec<f64>], region: impl Fn(usize, &Point) -> Option<Region>) {
    for k in 0..levels.len() - 1 {
        let (inner, outer, t) = (&levels[k], &levels[k + 1], &ts[k]);
        b.block2(inner.len(), t.len(), |i, j| lerp(inner[i], outer[i], t[j]), |c| region(k, c));
    }
}

/// Distance from the origin to the hole boundary along direction `theta`.
fn hole_radius(shape: HoleShape, r: f64, theta: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    match shape {
        HoleShape::Circle => r,
        HoleShape::Square => r / c.abs().max(s.abs()),
        HoleShape::Star => {
            let v = star_vertices(r);
            let k = ((theta / (PI / 10.0)).floor() as usize).min(19);
            let (p, q) = (v[k], v[(k + 1) % 20]);
            let e = [q[0] - p[0], q[1] - p[1]];
            (p[0] * e[1] - p[1] * e[0]) / (c * e[1] - s * e[0])
        }
    }
}

/// Unit disk with a centred hole: O-grid of square core, inner ring (in the
/// hole) and outer ring (in Ω), all on the same rays.
fn disk_hole(shape: HoleShape, r: f64, o: &MeshOptions) -> MasterMesh {
    let (perimeter, rho_min, rho_mean) = match shape {
        HoleShape::Circle => (2.0 * PI * r, r, r),
        HoleShape::Square => (8.0 * r, r, 1.12 * r),
        HoleShape::Star => {
            let v = star_vertices(r);
            (20.0 * (v[1][0] - v[0][0]).hypot(v[1][1] - v[0][1]), r, 1.35 * r)
        }
    };
    let h = o.h_feature(r);
    let n_min = (perimeter / h).max(2.0 * PI / o.h_max());
    let n = 40 * ((n_min / 40.0).ceil() as usize);
    let core_half = 0.5 * rho_min;
    let mut core = Vec::with_capacity(n + 1);
    let mut hole = Vec::with_capacity(n + 1);
    let mut outer = Vec::with_capacity(n + 1);
    for j in 0..=n {
        let th = 2.0 * PI * (j % n) as f64 / n as f64;
        let (s, c) = th.sin_cos();
        let q = core_half / c.abs().max(s.abs());
        core.push([q * c, q * s]);
        let rho = hole_radius(shape, r, th);
        hole.push([rho * c, rho * s]);
        outer.push([c, s]);
    }
    let h0 = perimeter / n as f64;
    let g_polar = 1.0 + 2.0 * PI / n as f64;
    let t_in = layers(rho_mean - 1.12 * core_half, h0, o.growth(), rho_mean, true);
    let t_out = layers(1.0 - rho_mean, h0, o.growth().min(g_polar).max(1.0 + 1e-3), o.h_max(), false);
    let mut b = Builder::new(2);
    // Core: tensor grid on the x-coordinates of the bottom side and the
    // y-coordinates of the left side of the core square.
    let q = n / 4;
    let xs: Vec<f64> = (0..=q).map(|i| core[5 * n / 8 + i][0]).collect();
    let ys: Vec<f64> = (0..=q).map(|i| core[5 * n / 8 - i][1]).collect();
    b.block2(q + 1, q + 1, |i, j| [xs[i], ys[j], 0.0], |_| Some(Region::Neg(0)));
    rings(&mut b, &[core, hole, outer], &[t_in, t_out], |k, _| Some(if k == 0 { Region::Neg(0) } else { Region::Star }));
    b.finish()
}

/// Circle of radius `rho` centred in the square box `c ± a`: core square,
/// inner ring, outer ring reaching the box sides. Box-side nodes are `c + s_i`
/// in both directions.
struct DiskInBox {
    c: P2,
    rho: f64,
    s: Vec<f64>,
}

impl DiskInBox {
    fn new(c: P2, rho: f64, a: f64, h: f64) -> Self {
        let n = even_at_least(PI * rho / (2.0 * h)).max(even_at_least(2.0 * a / (2.0 * h)));
        DiskInBox { c, rho, s: uniform(-a, a, n) }
    }

    fn a(&self) -> f64 {
        *self.s.last().unwrap()
    }

    fn xs(&self) -> Vec<f64> {
        self.s.iter().map(|s| self.c[0] + s).collect()
    }

    fn ys(&self) -> Vec<f64> {
        self.s.iter().map(|s| self.c[1] + s).collect()
    }

    fn spacing(&self) -> f64 {
        self.s[1] - self.s[0]
    }

    fn contains(&self, p: &Point) -> bool {
        let a = self.a();
        (p[0] - self.c[0]).abs() < a && (p[1] - self.c[1]).abs() < a
    }

    /// Add the insert; `region(part, centroid)` with part 0 = core, 1 = inner
    /// ring, 2 = outer ring.
    fn add(&self, b: &mut Builder, o: &MeshOptions, region: impl Fn(usize, &Point) -> Option<Region>) {
        let n = self.s.len() - 1;
        let s = &self.s;
        let (c, rho, a) = (self.c, self.rho, self.a());
        let beta = 0.5 * rho / a;
        let mut offsets: Vec<P2> = Vec::with_capacity(4 * n + 1);
        for m in 0..=4 * n {
            let (side, i) = (m / n, m % n);
            offsets.push(match side {
                0 => [s[i], s[0]],
                1 => [s[n], s[i]],
                2 => [s[n - i], s[n]],
                3 => [s[0], s[n - i]],
                _ => [s[0], s[0]],
            });
        }
        let boxp: Vec<P2> = offsets.iter().map(|d| [c[0] + d[0], c[1] + d[1]]).collect();
        let core: Vec<P2> = offsets.iter().map(|d| [c[0] + beta * d[0], c[1] + beta * d[1]]).collect();
        let circle: Vec<P2> = offsets
            .iter()
            .map(|d| {
                let l = d[0].hypot(d[1]);
                [c[0] + rho * d[0] / l, c[1] + rho * d[1] / l]
            })
            .collect();
        let h0 = 2.0 * PI * rho / (4 * n) as f64;
        let mean_box = 1.1222 * a;
        let t_in = layers(rho - 0.5 * 1.1222 * rho, h0, o.growth(), rho, true);
        let g = o.growth().min(1.0 + 2.0 * PI / (4 * n) as f64).max(1.0 + 1e-3);
        let t_out = layers(mean_box - rho, h0, g, self.spacing(), false);
        b.block2(n + 1, n + 1, |i, j| [c[0] + beta * s[i], c[1] + beta * s[j], 0.0], |p| region(0, p));
        rings(b, &[core, circle, boxp], &[t_in, t_out], |k, p| region(k + 1, p));
    }
}

/// Unit square with a half disk on the top side.
fn half_disk(sign: Sign, eps: f64, o: &MeshOptions) -> MasterMesh {
    let h = o.h_feature(eps);
    let a = (2.0 * eps).min(0.5 * (eps + 0.5));
    let ins = DiskInBox::new([0.5, 1.0], eps, a, h);
    let hb = ins.spacing();
    let xs = lines(0.0, 1.0, &ins.xs(), &[(0.5 - a, 0.5 + a, hb)], o);
    let below: Vec<f64> = ins.ys().into_iter().filter(|&y| y <= 1.0).collect();
    let ys = lines(0.0, 1.0, &below, &[(1.0 - a, 1.0, hb)], o);
    let mut b = Builder::new(2);
    b.block2(xs.len(), ys.len(), |i, j| [xs[i], ys[j], 0.0], |p| if ins.contains(p) { None } else { Some(Region::Star) });
    ins.add(&mut b, o, |part, p| {
        let above = p[1] > 1.0;
        match (part, sign, above) {
            (2, _, true) => None,
            (2, _, false) => Some(Region::Star),
            (_, Sign::Negative, false) => Some(Region::Neg(0)),
            (_, Sign::Negative, true) => None,
            (_, Sign::Positive, false) => Some(Region::Star),
            (_, Sign::Positive, true) => Some(Region::Pos(0)),
        }
    });
    b.finish()
}

fn square_corner(sign: Sign, eps: f64, o: &MeshOptions) -> MasterMesh {
    let h = o.h_feature(eps);
    let a = 1.0 - eps;
    let xs = lines(0.0, 1.0, &[a], &[(a, 1.0, h)], o);
    let ys = match sign {
        Sign::Negative => lines(0.0, 1.0, &[a], &[(a, 1.0, h)], o),
        Sign::Positive => lines(0.0, 1.0 + eps, &[1.0], &[(1.0, 1.0 + eps, h)], o),
    };
    let mut b = Builder::new(2);
    b.block2(xs.len(), ys.len(), |i, j| [xs[i], ys[j], 0.0], |p| {
        let right = p[0] > a;
        match sign {
            Sign::Negative if right && p[1] > a => Some(Region::Neg(0)),
            Sign::Positive if p[1] > 1.0 => right.then_some(Region::Pos(0)),
            _ => Some(Region::Star),
        }
    });
    b.finish()
}

fn square_complex(layout: ComplexLayout, eps: f64, o: &MeshOptions) -> MasterMesh {
    let h = o.h_feature(eps);
    let (p0, p1, n0, n1) = match layout {
        ComplexLayout::Offset => (0.5 - eps, 0.5, 0.5, 0.5 + eps),
        ComplexLayout::Straddle => (0.5 - 0.75 * eps, 0.5 + 0.25 * eps, 0.5 - 0.25 * eps, 0.5 + 0.75 * eps),
    };
    let xs = lines(0.0, 1.0, &[p0, p1, n0, n1], &[(p0, n1, h)], o);
    let ys = lines(0.0, 1.0 + eps, &[1.0 - eps, 1.0], &[(1.0 - eps, 1.0 + eps, h)], o);
    let mut b = Builder::new(2);
    b.block2(xs.len(), ys.len(), |i, j| [xs[i], ys[j], 0.0], |p| {
        if p[1] > 1.0 {
            (p[0] > p0 && p[0] < p1).then_some(Region::Pos(0))
        } else if p[1] > 1.0 - eps && p[0] > n0 && p[0] < n1 {
            Some(Region::Neg(0))
        } else {
            Some(Region::Star)
        }
    });
    b.finish()
}

fn two_holes(r: f64, o: &MeshOptions) -> MasterMesh {
    let small = DiskInBox::new([1.1 * r, 1.1 * r], r, 1.1 * r, o.h_feature(r));
    let big = DiskInBox::new([0.89, 0.89], 0.1, 0.11, o.h_feature(0.1));
    let mut req = small.xs();
    req.extend(big.xs());
    let src = [(0.0, 2.2 * r, small.spacing()), (0.78, 1.0, big.spacing())];
    let xs = lines(0.0, 1.0, &req, &src, o);
    let mut b = Builder::new(2);
    b.block2(xs.len(), xs.len(), |i, j| [xs[i], xs[j], 0.0], |p| {
        if small.contains(p) || big.contains(p) {
            None
        } else {
            Some(Region::Star)
        }
    });
    small.add(&mut b, o, |part, _| Some(if part < 2 { Region::Neg(0) } else { Region::Star }));
    big.add(&mut b, o, |part, _| Some(if part < 2 { Region::Neg(1) } else { Region::Star }));
    b.finish()
}

fn cube(corner: bool, sign: Sign, eps: f64, o: &MeshOptions) -> MasterMesh {
    let h = o.h_feature(eps);
    let x0 = if corner { 1.0 - eps } else { 0.5 - 0.5 * eps };
    let x1 = x0 + eps;
    let xs = lines(0.0, 1.0, &[x0, x1], &[(x0, x1, h)], o);
    let zs = lines(0.0, 1.0, &[eps], &[(0.0, eps, h)], o);
    let ys = match sign {
        Sign::Negative => lines(0.0, 1.0, &[1.0 - eps], &[(1.0 - eps, 1.0, h)], o),
        Sign::Positive => lines(0.0, 1.0 + eps, &[1.0], &[(1.0, 1.0 + eps, h)], o),
    };
    let mut b = Builder::new(3);
    b.block3(&xs, &ys, &zs, |p| {
        let in_xz = p[0] > x0 && p[0] < x1 && p[2] < eps;
        match sign {
            Sign::Negative if in_xz && p[1] > 1.0 - eps => Some(Region::Neg(0)),
            Sign::Positive if p[1] > 1.0 => in_xz.then_some(Region::Pos(0)),
            _ => Some(Region::Star),
        }
    });
    b.finish()
}

/// Quarter-annulus insert in the square `c + (sx·[0, a]) × (sy·[0, a])`: a
/// core square of half-size `core`, rings at the given radii and a last ring
/// reaching the two far sides. `far_x` holds offsets `u ∈ [0, a]` of the nodes
/// on the far side parallel to x, `far_y` those on the far side parallel to y.
struct CornerInsert {
    c: P2,
    sx: f64,
    sy: f64,
    a: f64,
    core: f64,
    far_x: Vec<f64>,
    far_y: Vec<f64>,
    radii: Vec<f64>,
}

impl CornerInsert {
    fn core_point(&self, u: f64, v: f64) -> P2 {
        [self.c[0] + self.sx * (self.core * u / self.a), self.c[1] + self.sy * (self.core * v / self.a)]
    }

    /// Node rows: core boundary, each circle, far sides; all on the same rays.
    fn levels(&self) -> Vec<Vec<P2>> {
        let a = self.a;
        let mut rays: Vec<(f64, f64)> = self.far_x.iter().map(|&u| (u, a)).collect();
        rays.extend(self.far_y.iter().rev().skip(1).map(|&v| (a, v)));
        let mut out = vec![rays.iter().map(|&(u, v)| self.core_point(u, v)).collect::<Vec<_>>()];
        for &r in &self.radii {
            out.push(
                rays.iter()
                    .map(|&(u, v)| {
                        let l = u.hypot(v);
                        [self.c[0] + self.sx * (r * u / l), self.c[1] + self.sy * (r * v / l)]
                    })
                    .collect(),
            );
        }
        out.push(rays.iter().map(|&(u, v)| [self.c[0] + self.sx * u, self.c[1] + self.sy * v]).collect());
        out
    }

    /// Coordinates along the two axis rays (the near sides), from `c` outward:
    /// `(x-coordinates along the v = 0 ray, y-coordinates along the u = 0 ray)`.
    fn near_sides(&self, ts: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
        let levels = self.levels();
        let last = levels[0].len() - 1;
        let mut xs: Vec<f64> = self.far_x.iter().map(|&u| self.core_point(u, 0.0)[0]).collect();
        let mut ys: Vec<f64> = self.far_y.iter().map(|&v| self.core_point(0.0, v)[1]).collect();
        for k in 0..levels.len() - 1 {
            for &t in &ts[k][1..] {
                xs.push(lerp(levels[k][last], levels[k + 1][last], t)[0]);
                ys.push(lerp(levels[k][0], levels[k + 1][0], t)[1]);
            }
        }
        (xs, ys)
    }

    /// Add the insert; `region(part, centroid)` with part 0 = core and part
    /// `k ≥ 1` the ring ending on level `k`.
    fn add(&self, b: &mut Builder, ts: &[Vec<f64>], region: impl Fn(usize, &Point) -> Option<Region>) {
        let core_nodes: Vec<P2> = self
            .far_y
            .iter()
            .flat_map(|&v| self.far_x.iter().map(move |&u| (u, v)))
            .map(|(u, v)| self.core_point(u, v))
            .collect();
        let nx = self.far_x.len();
        b.block2(nx, self.far_y.len(), |i, j| [core_nodes[i + nx * j][0], core_nodes[i + nx * j][1], 0.0], |p| region(0, p));
        rings(b, &self.levels(), ts, |k, p| region(k + 1, p));
    }
}

/// Unit square whose top-left corner is rounded with radius `r`.
fn round(r: f64, o: &MeshOptions) -> MasterMesh {
    let h = o.h_feature(r);
    let n_far = ((0.25 * PI * r / h).ceil() as usize).max(2);
    let ins = CornerInsert {
        c: [r, 1.0 - r],
        sx: -1.0,
        sy: 1.0,
        a: r,
        core: 0.5 * r,
        far_x: uniform(0.0, r, n_far),
        far_y: uniform(0.0, r, n_far),
        radii: vec![r],
    };
    let n_gap = (((2.0f64.sqrt() - 1.0) * r / h).ceil() as usize).max(2);
    let ts = vec![layers(0.45 * r, h, o.growth(), h, true), uniform(0.0, 1.0, n_gap)];
    let mut b = Builder::new(2);
    ins.add(&mut b, &ts, |part, _| Some(if part == 2 { Region::Neg(0) } else { Region::Star }));
    if r < 1.0 {
        let (near_x, near_y) = ins.near_sides(&ts);
        // The insert fixes the lines inside its square; outside they are graded.
        let mut xs = sorted_unique(near_x);
        xs.extend(lines(r, 1.0, &[], &[(r, r, h)], o).into_iter().skip(1));
        let mut ys = lines(0.0, 1.0 - r, &[], &[(1.0 - r, 1.0 - r, h)], o);
        ys.pop();
        ys.extend(sorted_unique(near_y));
        b.block2(xs.len(), ys.len(), |i, j| [xs[i], ys[j], 0.0], |p| {
            if p[0] < r && p[1] > 1.0 - r {
                None
            } else {
                Some(Region::Star)
            }
        });
    }
    b.finish()
}

/// L-shaped Ω0 = (0,1)² \ [1/2,1]² with the fillet of radius 1/2 centred at
/// (1,1) filling part of the removed square.
fn fillet(extension: ExtensionChoice, o: &MeshOptions) -> MasterMesh {
    let h = o.h_feature(0.5);
    let h_corner = h / 16.0;
    let field = SizeField {
        sources: vec![SizeSource { lo: 0.5, hi: 0.5, h: h_corner }],
        growth: o.growth(),
        h_max: o.h_max().min(h),
    };
    let xs = graded_lines(0.0, 1.0, &[0.5], &field);
    let upper: Vec<f64> = xs.iter().filter(|&&x| x >= 0.5).map(|&x| 1.0 - x).rev().collect();
    let ins = CornerInsert {
        c: [1.0, 1.0],
        sx: -1.0,
        sy: -1.0,
        a: 0.5,
        core: 0.125,
        far_x: upper.clone(),
        far_y: upper,
        radii: vec![0.25, 0.5],
    };
    let ts = vec![
        layers(0.11, h, o.growth(), h, false),
        layers(0.25, h, o.growth(), h, false),
        layers(0.5 * 2.0f64.sqrt() - 0.5, h_corner, o.growth(), h, true),
    ];
    let mut b = Builder::new(2);
    b.block2(xs.len(), xs.len(), |i, j| [xs[i], xs[j], 0.0], |p| {
        if p[0] > 0.5 && p[1] > 0.5 {
            None
        } else {
            Some(Region::Star)
        }
    });
    ins.add(&mut b, &ts, |part, _| match (part, extension) {
        (3, _) => Some(Region::Pos(0)),
        (_, ExtensionChoice::Identity) => None,
        (_, ExtensionChoice::BoundingBox) => Some(Region::Ext(0)),
        (2, ExtensionChoice::CustomArc) => Some(Region::Ext(0)),
        (_, ExtensionChoice::CustomArc) => None,
    });
    b.finish()
}
