//! Parameter planes in `delta`, driven by free critical orbits: the
//! quadratic family through `G` and the cubic `z^3 - 1`.

use rayon::prelude::*;

use crate::basins::{classify_orbit, IterSettings, OrbitClass, PlaneSpec};
use crate::colour::speed_colour;
use crate::maps::{cubic_critical_points, gdelta_critical_points, gdelta_eval, TraubMap};
use crate::poly::Complexd;
use crate::sphere::{chordal, SpherePoint};

/// Chordal radius around 0 or infinity that counts as captured.
pub const CAPTURE_RADIUS: f64 = 1e-6;
/// Steps after capture during which the orbit must keep contracting.
const CONFIRM_STEPS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamClass {
    ToZero,
    ToInfinity,
    ToRoot(usize),
    Other,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParamOutcome {
    pub class: ParamClass,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamKind {
    Quadratic,
    Cubic,
}

impl ParamKind {
    /// Critical orbits tracked per parameter.
    pub fn orbits(self) -> usize {
        match self {
            ParamKind::Quadratic => 1,
            ParamKind::Cubic => 2,
        }
    }
}

impl std::str::FromStr for ParamKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "quadratic" => Ok(ParamKind::Quadratic),
            "cubic" => Ok(ParamKind::Cubic),
            other => Err(format!("unknown parameter plane kind `{other}`")),
        }
    }
}

/// Default settings for parameter planes (300 iterations).
pub fn param_settings() -> IterSettings {
    IterSettings::default().with_max_iter(300)
}

/// Follows `c+` under `G`. Only `c+` is needed: the orbit of `c-` is its
/// image under `z -> 1/z`.
pub fn classify_parameter_quadratic(delta: Complexd, s: &IterSettings) -> ParamOutcome {
    let (c_plus, _) = gdelta_critical_points(delta);
    follow_quadratic(delta, SpherePoint::Finite(c_plus), s.max_iter)
}

/// Follows `c-` under `G`; mirrors [`classify_parameter_quadratic`].
pub fn classify_parameter_quadratic_minus(delta: Complexd, s: &IterSettings) -> ParamOutcome {
    let (_, c_minus) = gdelta_critical_points(delta);
    follow_quadratic(delta, c_minus, s.max_iter)
}

fn follow_quadratic(delta: Complexd, start: SpherePoint, max_iter: usize) -> ParamOutcome {
    let zero = SpherePoint::Finite(Complexd::new(0.0, 0.0));
    let mut z = start;
    for it in 0..=max_iter {
        for (target, class) in [(zero, ParamClass::ToZero), (SpherePoint::Infinity, ParamClass::ToInfinity)] {
            if chordal(z, target) < CAPTURE_RADIUS && stays_captured(delta, z, target) {
                return ParamOutcome { class, iterations: it };
            }
        }
        z = gdelta_eval(delta, z);
    }
    ParamOutcome { class: ParamClass::Other, iterations: max_iter }
}

fn stays_captured(delta: Complexd, mut z: SpherePoint, target: SpherePoint) -> bool {
    let mut dist = chordal(z, target);
    for _ in 0..CONFIRM_STEPS {
        z = gdelta_eval(delta, z);
        let next = chordal(z, target);
        if next > dist || next >= CAPTURE_RADIUS {
            return false;
        }
        dist = next;
    }
    true
}

/// The map for `z^3 - 1` with roots ordered `1, e^(2 pi i/3), e^(4 pi i/3)`.
pub fn cubic_map(delta: Complexd) -> TraubMap {
    let roots: Vec<Complexd> = (0..3)
        .map(|k| Complexd::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / 3.0))
        .collect();
    TraubMap::from_roots(&roots, delta).expect("three roots")
}

/// Follows `c+` and `c-` on the ray through 1 under the map for `z^3 - 1`;
/// the other free critical points are rotations of these.
pub fn classify_parameter_cubic(delta: Complexd, s: &IterSettings) -> (ParamOutcome, ParamOutcome) {
    let m = cubic_map(delta);
    let cp = cubic_critical_points(delta);
    let follow = |c: Complexd| {
        let out = classify_orbit(&m, SpherePoint::from_complex(c), s);
        let class = match out.class {
            OrbitClass::Root(i) => ParamClass::ToRoot(i),
            OrbitClass::Infinity => ParamClass::ToInfinity,
            OrbitClass::Other => ParamClass::Other,
        };
        ParamOutcome { class, iterations: out.iterations }
    };
    (follow(cp.c_plus), follow(cp.c_minus))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParamRaster {
    pub kind: ParamKind,
    pub spec: PlaneSpec,
    pub max_iter: usize,
    /// Row-major, `kind.orbits()` consecutive outcomes per pixel.
    pub outcomes: Vec<ParamOutcome>,
}

impl ParamRaster {
    pub fn pixel(&self, col: usize, row: usize) -> &[ParamOutcome] {
        let n = self.kind.orbits();
        let k = (row * self.spec.px_w + col) * n;
        &self.outcomes[k..k + n]
    }

    /// Black unless every tracked orbit reaches a root (for the quadratic
    /// plane both 0 and infinity are roots); otherwise coloured by the
    /// slowest orbit.
    pub fn is_black(&self, col: usize, row: usize) -> bool {
        self.pixel(col, row).iter().any(|o| match o.class {
            ParamClass::Other => true,
            ParamClass::ToInfinity => self.kind == ParamKind::Cubic,
            _ => false,
        })
    }

    pub fn colour(&self, col: usize, row: usize) -> [u8; 3] {
        if self.is_black(col, row) {
            return [0, 0, 0];
        }
        let slowest = self.pixel(col, row).iter().map(|o| o.iterations).max().unwrap_or(0);
        speed_colour(slowest, self.max_iter)
    }

    pub fn rgb(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.spec.len() * 3);
        for row in 0..self.spec.px_h {
            for col in 0..self.spec.px_w {
                out.extend_from_slice(&self.colour(col, row));
            }
        }
        out
    }
}

pub fn render_param_plane(kind: ParamKind, spec: PlaneSpec, s: &IterSettings) -> ParamRaster {
    let outcomes: Vec<ParamOutcome> = (0..spec.len())
        .into_par_iter()
        .flat_map_iter(|k| {
            let delta = spec.point(k % spec.px_w, k / spec.px_w);
            match kind {
                ParamKind::Quadratic => vec![classify_parameter_quadratic(delta, s)],
                ParamKind::Cubic => {
                    let (a, b) = classify_parameter_cubic(delta, s);
                    vec![a, b]
                }
            }
        })
        .collect();
    ParamRaster { kind, spec, max_iter: s.max_iter, outcomes }
}

pub fn render_param_plane_with_workers(
    kind: ParamKind,
    spec: PlaneSpec,
    s: &IterSettings,
    workers: usize,
) -> ParamRaster {
    match rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build() {
        Ok(pool) => pool.install(|| render_param_plane(kind, spec, s)),
        Err(_) => render_param_plane(kind, spec, s),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::gdelta_eval_c;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complexd {
        Complexd::new(re, im)
    }

    #[test]
    fn quadratic_examples() {
        let s = param_settings();
        assert_eq!(classify_parameter_quadratic(c(0.5, 0.0), &s).class, ParamClass::ToZero);
        assert_eq!(
            classify_parameter_quadratic(c(1.0, 0.0), &s),
            ParamOutcome { class: ParamClass::ToZero, iterations: 0 }
        );
        assert_ne!(classify_parameter_quadratic(c(100.0, 0.0), &s).class, ParamClass::ToZero);
    }

    #[test]
    fn minus_orbit_mirrors_plus_orbit() {
        let s = param_settings();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..300 {
            let delta = c(rng.gen_range(-2.0..4.0), rng.gen_range(-3.0..3.0));
            let plus = classify_parameter_quadratic(delta, &s);
            let minus = classify_parameter_quadratic_minus(delta, &s);
            let mirrored = match minus.class {
                ParamClass::ToZero => ParamClass::ToInfinity,
                ParamClass::ToInfinity => ParamClass::ToZero,
                other => other,
            };
            assert_eq!(plus.class, mirrored, "delta {delta}");
        }
    }

    #[test]
    fn first_image_of_c_plus_in_unit_interval() {
        for k in 1..100 {
            let delta = k as f64 / 100.0;
            let (cp, _) = gdelta_critical_points(c(delta, 0.0));
            let g = gdelta_eval_c(c(delta, 0.0), cp).finite().unwrap();
            assert!(g.im.abs() < 1e-12 && g.re > 0.0 && g.re < 1.0, "delta {delta}: {g}");
            assert!((g + cp.powu(3)).norm() < 1e-12);
        }
    }

    #[test]
    fn cubic_examples() {
        let s = param_settings();
        let (plus, minus) = classify_parameter_cubic(c(1.0, 0.0), &s);
        assert_eq!(plus, ParamOutcome { class: ParamClass::ToRoot(0), iterations: 0 });
        assert_eq!(minus.class, ParamClass::ToRoot(0));
        let (plus, minus) = classify_parameter_cubic(c(0.5, 0.0), &s);
        assert!(matches!(plus.class, ParamClass::ToRoot(_)));
        assert!(matches!(minus.class, ParamClass::ToRoot(_)));
    }

    #[test]
    fn cubic_minus_image_is_the_maximum_on_the_negative_axis() {
        let delta = c(0.1, 0.0);
        let m = cubic_map(delta);
        let cm = cubic_critical_points(delta).c_minus;
        assert!(cm.re < 0.0 && cm.im == 0.0);
        let t = |x: f64| m.traub_step(SpherePoint::Finite(c(x, 0.0))).unwrap().finite().unwrap().re;
        let peak = t(cm.re);
        for k in 1..4000 {
            let x = -4.0 * k as f64 / 4000.0;
            assert!(t(x) <= peak + 1e-12, "T({x}) = {} exceeds {peak}", t(x));
        }
    }

    #[test]
    fn planes_are_deterministic_and_coloured() {
        let s = param_settings();
        let spec = PlaneSpec::square(c(0.5, 0.0), 2.0, 21);
        let one = render_param_plane_with_workers(ParamKind::Quadratic, spec, &s, 1);
        assert_eq!(render_param_plane_with_workers(ParamKind::Quadratic, spec, &s, 3), one);
        for col in 0..21 {
            let d = spec.point(col, 10);
            if d.re > 0.0 && d.re <= 1.0 {
                assert!(!one.is_black(col, 10), "delta {d}");
            }
        }
        let single = render_param_plane(ParamKind::Cubic, PlaneSpec::square(c(1.0, 0.0), 0.01, 1), &s);
        assert!(!single.is_black(0, 0));
        assert_eq!(single.rgb().len(), 3);
    }
}
