//! Planar primitives: points, poses and axis-aligned rectangles.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn add(&self, dx: f64, dy: f64) -> Point2 {
        Point2::new(self.x + dx, self.y + dy)
    }
}

/// Wraps an angle into `(-pi, pi]`.
pub fn normalize_angle(theta: f64) -> f64 {
    let mut a = theta % (2.0 * PI);
    if a <= -PI {
        a += 2.0 * PI;
    } else if a > PI {
        a -= 2.0 * PI;
    }
    a
}

/// Planar pose. `theta` is kept in `(-pi, pi]` by every constructor.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Pose2D {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

impl Pose2D {
    pub fn new(x: f64, y: f64, theta: f64) -> Self {
        Self {
            x,
            y,
            theta: normalize_angle(theta),
        }
    }

    pub fn position(&self) -> Point2 {
        Point2::new(self.x, self.y)
    }

    /// Pose at `from` oriented toward `target`.
    pub fn facing(from: Point2, target: Point2) -> Self {
        let theta = (target.y - from.y).atan2(target.x - from.x);
        Pose2D::new(from.x, from.y, theta)
    }
}

/// Axis-aligned rectangle stored as center and half extents.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub cx: f64,
    pub cy: f64,
    pub hx: f64,
    pub hy: f64,
}

impl Rect {
    pub const fn new(cx: f64, cy: f64, hx: f64, hy: f64) -> Self {
        Self { cx, cy, hx, hy }
    }

    pub fn from_bounds(min_x: f64, min_y: f64, max_x: f64, max_y: f64) -> Self {
        Self {
            cx: 0.5 * (min_x + max_x),
            cy: 0.5 * (min_y + max_y),
            hx: 0.5 * (max_x - min_x),
            hy: 0.5 * (max_y - min_y),
        }
    }

    pub fn min_x(&self) -> f64 {
        self.cx - self.hx
    }
    pub fn max_x(&self) -> f64 {
        self.cx + self.hx
    }
    pub fn min_y(&self) -> f64 {
        self.cy - self.hy
    }
    pub fn max_y(&self) -> f64 {
        self.cy + self.hy
    }

    pub fn center(&self) -> Point2 {
        Point2::new(self.cx, self.cy)
    }

    /// Closed containment test.
    pub fn contains(&self, p: Point2) -> bool {
        (p.x - self.cx).abs() <= self.hx && (p.y - self.cy).abs() <= self.hy
    }

    /// Euclidean distance from `p` to the rectangle; zero inside.
    pub fn distance_to(&self, p: Point2) -> f64 {
        let dx = ((p.x - self.cx).abs() - self.hx).max(0.0);
        let dy = ((p.y - self.cy).abs() - self.hy).max(0.0);
        dx.hypot(dy)
    }

    /// True when the interiors overlap. Touching edges do not count.
    pub fn intersects(&self, other: &Rect) -> bool {
        (self.cx - other.cx).abs() < self.hx + other.hx
            && (self.cy - other.cy).abs() < self.hy + other.hy
    }

    /// True when the closed disc overlaps the rectangle interior.
    pub fn overlaps_disc(&self, c: Point2, r: f64) -> bool {
        self.distance_to(c) < r
    }

    /// Disc lies entirely inside the closed rectangle.
    pub fn contains_disc(&self, c: Point2, r: f64) -> bool {
        (c.x - self.cx).abs() + r <= self.hx + 1e-12 && (c.y - self.cy).abs() + r <= self.hy + 1e-12
    }

    /// Segment test by Liang-Barsky clipping against the closed rectangle.
    pub fn segment_intersects(&self, a: Point2, b: Point2) -> bool {
        let dx = b.x - a.x;
        let dy = b.y - a.y;
        let mut t0 = 0.0_f64;
        let mut t1 = 1.0_f64;
        let checks = [
            (-dx, a.x - self.min_x()),
            (dx, self.max_x() - a.x),
            (-dy, a.y - self.min_y()),
            (dy, self.max_y() - a.y),
        ];
        for (p, q) in checks {
            if p == 0.0 {
                if q < 0.0 {
                    return false;
                }
            } else {
                let t = q / p;
                if p < 0.0 {
                    if t > t1 {
                        return false;
                    }
                    t0 = t0.max(t);
                } else {
                    if t < t0 {
                        return false;
                    }
                    t1 = t1.min(t);
                }
            }
        }
        t0 <= t1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn angle_wraps_to_half_open_interval() {
        assert_eq!(normalize_angle(PI), PI);
        assert!((normalize_angle(-PI) - PI).abs() < 1e-12);
        assert!((normalize_angle(3.0 * PI) - PI).abs() < 1e-9);
        assert!((normalize_angle(0.5) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn rect_distance_corner() {
        let r = Rect::new(0.0, 0.0, 1.0, 1.0);
        assert!((r.distance_to(Point2::new(4.0, 5.0)) - 5.0).abs() < 1e-12);
        assert_eq!(r.distance_to(Point2::new(0.5, 0.5)), 0.0);
    }

    #[test]
    fn touching_rects_do_not_intersect() {
        let a = Rect::new(0.0, 0.0, 1.0, 1.0);
        let b = Rect::new(2.0, 0.0, 1.0, 1.0);
        assert!(!a.intersects(&b));
        assert!(a.intersects(&Rect::new(1.9, 0.0, 1.0, 1.0)));
    }

    #[test]
    fn segment_clipping_cases() {
        let r = Rect::new(0.0, 0.0, 1.0, 1.0);
        assert!(r.segment_intersects(Point2::new(-2.0, 0.0), Point2::new(2.0, 0.0)));
        assert!(!r.segment_intersects(Point2::new(-2.0, 2.0), Point2::new(2.0, 2.0)));
        assert!(!r.segment_intersects(Point2::new(-3.0, 0.0), Point2::new(-2.0, 0.5)));
        assert!(r.segment_intersects(Point2::new(0.2, 0.2), Point2::new(0.3, 0.3)));
    }

    fn sampled_hit(r: &Rect, a: Point2, b: Point2) -> bool {
        (0..=4000).any(|k| {
            let t = k as f64 / 4000.0;
            r.contains(Point2::new(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)))
        })
    }

    proptest! {
        #[test]
        fn segment_test_matches_dense_sampling(
            ax in -3.0..3.0f64, ay in -3.0..3.0f64,
            bx in -3.0..3.0f64, by in -3.0..3.0f64,
        ) {
            let r = Rect::new(0.1, -0.2, 0.7, 0.4);
            let a = Point2::new(ax, ay);
            let b = Point2::new(bx, by);
            let exact = r.segment_intersects(a, b);
            // Sampling can only miss grazing hits, never invent one.
            if sampled_hit(&r, a, b) {
                prop_assert!(exact);
            }
            if exact && !sampled_hit(&r, a, b) {
                let mut near = f64::INFINITY;
                for k in 0..=4000 {
                    let t = k as f64 / 4000.0;
                    near = near.min(r.distance_to(Point2::new(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y))));
                }
                prop_assert!(near < 1e-2);
            }
        }

        #[test]
        fn normalized_angle_in_range(a in -100.0..100.0f64) {
            let n = normalize_angle(a);
            prop_assert!(n > -PI && n <= PI);
            prop_assert!(((a - n) / (2.0 * PI)).fract().abs() < 1e-9
                || (1.0 - ((a - n) / (2.0 * PI)).fract().abs()) < 1e-9);
        }
    }
}
