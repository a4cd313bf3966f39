//! Triangle and segment quadrature rules.
//!
//! Triangle rules are given in barycentric coordinates with weights that sum to
//! one; multiply by the triangle area.

use crate::geometry::Point;

/// A point in barycentric coordinates with its normalized weight.
#[derive(Debug, Clone, Copy)]
pub struct QuadPoint {
    pub bary: [f64; 3],
    pub weight: f64,
}

/// Edge-midpoint rule, exact for quadratics.
pub const MIDPOINT3: [QuadPoint; 3] = [
    QuadPoint { bary: [0.5, 0.5, 0.0], weight: 1.0 / 3.0 },
    QuadPoint { bary: [0.0, 0.5, 0.5], weight: 1.0 / 3.0 },
    QuadPoint { bary: [0.5, 0.0, 0.5], weight: 1.0 / 3.0 },
];

const A1: f64 = 0.059_715_871_789_769_82;
const B1: f64 = 0.470_142_064_105_115_1;
const W1: f64 = 0.132_394_152_788_506_2;
const A2: f64 = 0.797_426_985_353_087_3;
const B2: f64 = 0.101_286_507_323_456_34;
const W2: f64 = 0.125_939_180_544_827_16;

/// Seven-point rule, exact for polynomials of degree five.
pub const GAUSS7: [QuadPoint; 7] = [
    QuadPoint { bary: [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0], weight: 0.225 },
    QuadPoint { bary: [A1, B1, B1], weight: W1 },
    QuadPoint { bary: [B1, A1, B1], weight: W1 },
    QuadPoint { bary: [B1, B1, A1], weight: W1 },
    QuadPoint { bary: [A2, B2, B2], weight: W2 },
    QuadPoint { bary: [B2, A2, B2], weight: W2 },
    QuadPoint { bary: [B2, B2, A2], weight: W2 },
];

/// Two-point Gauss rule on [0, 1]: `(parameter, weight)` pairs.
pub const GAUSS2_SEGMENT: [(f64, f64); 2] = [
    (0.211_324_865_405_187_1, 0.5),
    (0.788_675_134_594_812_9, 0.5),
];

#[inline]
pub fn map_point(p: &[Point; 3], bary: &[f64; 3]) -> Point {
    Point::new(
        bary[0] * p[0].x + bary[1] * p[1].x + bary[2] * p[2].x,
        bary[0] * p[0].y + bary[1] * p[1].y + bary[2] * p[2].y,
    )
}

/// Integral of `f` over triangle `p` (of area `area`) with the given rule.
pub fn integrate<F: Fn(Point) -> f64>(rule: &[QuadPoint], p: &[Point; 3], area: f64, f: F) -> f64 {
    rule.iter().map(|q| q.weight * f(map_point(p, &q.bary))).sum::<f64>() * area
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::signed_area;

    /// Exact integral of x^a y^b over the unit right triangle: a! b! / (a+b+2)!.
    fn monomial_exact(a: u32, b: u32) -> f64 {
        let fact = |n: u32| (1..=n).map(f64::from).product::<f64>();
        fact(a) * fact(b) / fact(a + b + 2)
    }

    fn check_rule(rule: &[QuadPoint], degree: u32) {
        let w: f64 = rule.iter().map(|q| q.weight).sum();
        assert!((w - 1.0).abs() < 1e-15);
        let p = [Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.0, 1.0)];
        let area = signed_area(p[0], p[1], p[2]);
        for a in 0..=degree {
            for b in 0..=(degree - a) {
                let got = integrate(rule, &p, area, |x| libm::pow(x.x, a as f64) * libm::pow(x.y, b as f64));
                let exact = monomial_exact(a, b);
                assert!((got - exact).abs() < 1e-15, "x^{a} y^{b}: {got} vs {exact}");
            }
        }
    }

    #[test]
    fn midpoint_rule_degree_two() {
        check_rule(&MIDPOINT3, 2);
    }

    #[test]
    fn seven_point_rule_degree_five() {
        check_rule(&GAUSS7, 5);
    }

    #[test]
    fn segment_rule_degree_three() {
        for k in 0..=3 {
            let got: f64 = GAUSS2_SEGMENT.iter().map(|(t, w)| w * libm::pow(*t, k as f64)).sum();
            assert!((got - 1.0 / (k as f64 + 1.0)).abs() < 1e-15);
        }
    }
}
