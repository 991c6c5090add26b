//! Orbit classification and rasters of the dynamical plane.

mod topology;

use rayon::prelude::*;

use crate::maps::{InfinityClass, TraubMap};
use crate::poly::Complexd;
use crate::sphere::{chordal, SpherePoint};

pub use topology::{hole_count, immediate_basin, unbounded_probe, BasinError, ComponentMask};

/// Class id used in rasters for orbits escaping to an attracting infinity.
pub const CLASS_INFINITY: u8 = 254;
/// Class id for everything else: non-root attractors, cycles, exhaustion.
pub const CLASS_OTHER: u8 = 255;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterSettings {
    pub max_iter: usize,
    /// Chordal radius around a root that counts as converged.
    pub root_tol: f64,
    /// Modulus past which an orbit has escaped (only when infinity attracts).
    pub escape_radius: f64,
    /// Steps between anchor resets in the cycle detector.
    pub cycle_window: usize,
    /// Retry `Other` pixels next to root pixels with four times the budget.
    pub retry_stalled: bool,
}

impl Default for IterSettings {
    fn default() -> Self {
        Self {
            max_iter: 500,
            root_tol: 1e-10,
            escape_radius: 1e8,
            cycle_window: 40,
            retry_stalled: false,
        }
    }
}

impl IterSettings {
    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn validate(&self) -> Result<(), &'static str> {
        if self.max_iter == 0 {
            return Err("max_iter must be at least 1");
        }
        if !(self.root_tol > 0.0) {
            return Err("root_tol must be positive");
        }
        if !(self.escape_radius > 1.0) {
            return Err("escape_radius must exceed 1");
        }
        if self.cycle_window == 0 {
            return Err("cycle_window must be at least 1");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OrbitClass {
    Root(usize),
    Infinity,
    Other,
}

impl OrbitClass {
    pub fn id(self) -> u8 {
        match self {
            OrbitClass::Root(i) => i as u8,
            OrbitClass::Infinity => CLASS_INFINITY,
            OrbitClass::Other => CLASS_OTHER,
        }
    }

    pub fn from_id(id: u8) -> Self {
        match id {
            CLASS_INFINITY => OrbitClass::Infinity,
            CLASS_OTHER => OrbitClass::Other,
            i => OrbitClass::Root(i as usize),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitOutcome {
    pub class: OrbitClass,
    pub iterations: usize,
    pub last: SpherePoint,
}

/// A rectangular viewport sampled at pixel centres; row 0 is the top edge
/// (largest imaginary part).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneSpec {
    pub center: Complexd,
    pub width: f64,
    pub px_w: usize,
    pub px_h: usize,
}

impl PlaneSpec {
    pub fn new(center: Complexd, width: f64, px_w: usize, px_h: usize) -> Self {
        Self { center, width, px_w, px_h }
    }

    pub fn square(center: Complexd, width: f64, px: usize) -> Self {
        Self::new(center, width, px, px)
    }

    pub fn height(&self) -> f64 {
        self.width * self.px_h as f64 / self.px_w as f64
    }

    pub fn len(&self) -> usize {
        self.px_w * self.px_h
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Centre of pixel `(col, row)`.
    pub fn point(&self, col: usize, row: usize) -> Complexd {
        let re = ((col as f64 + 0.5) / self.px_w as f64 - 0.5) * self.width;
        let im = (0.5 - (row as f64 + 0.5) / self.px_h as f64) * self.height();
        self.center + Complexd::new(re, im)
    }

    /// The pixel containing `z`, if inside the viewport.
    pub fn pixel_of(&self, z: Complexd) -> Option<(usize, usize)> {
        let u = (z.re - self.center.re) / self.width + 0.5;
        let v = 0.5 - (z.im - self.center.im) / self.height();
        if !(0.0..1.0).contains(&u) || !(0.0..1.0).contains(&v) {
            return None;
        }
        let col = ((u * self.px_w as f64) as usize).min(self.px_w - 1);
        let row = ((v * self.px_h as f64) as usize).min(self.px_h - 1);
        Some((col, row))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BasinRaster {
    pub spec: PlaneSpec,
    /// Row-major class ids: root index, [`CLASS_INFINITY`] or [`CLASS_OTHER`].
    pub classes: Vec<u8>,
    pub iters: Vec<u32>,
    /// Root positions, indexed like the root classes.
    pub roots: Vec<Complexd>,
}

impl BasinRaster {
    pub fn class_at(&self, col: usize, row: usize) -> u8 {
        self.classes[row * self.spec.px_w + col]
    }

    pub fn count(&self, id: u8) -> usize {
        self.classes.iter().filter(|&&c| c == id).count()
    }

    pub fn root_fraction(&self) -> f64 {
        let roots = self.classes.iter().filter(|&&c| (c as usize) < self.roots.len()).count();
        roots as f64 / self.classes.len() as f64
    }
}

/// Iterates `T` from `z0` until it settles on a root, escapes to an
/// attracting infinity, cycles away from the roots, or runs out of steps.
pub fn classify_orbit(m: &TraubMap, z0: SpherePoint, s: &IterSettings) -> OrbitOutcome {
    let infinity = m.infinity_class();
    classify_with(m, z0, s, infinity)
}

fn classify_with(m: &TraubMap, z0: SpherePoint, s: &IterSettings, infinity: InfinityClass) -> OrbitOutcome {
    let roots = m.roots();
    let infinity_attracts = infinity.is_attracting();
    let infinity_fixed = matches!(infinity, InfinityClass::Fixed(_));
    let cycle_tol = s.root_tol.sqrt();
    let other = |iterations, last| OrbitOutcome { class: OrbitClass::Other, iterations, last };

    let mut z = z0;
    let mut anchor = z0;
    for it in 0..=s.max_iter {
        let mut near_root = false;
        for (i, &(a, _)) in roots.iter().enumerate() {
            let dist = chordal(z, SpherePoint::Finite(a));
            if dist < s.root_tol {
                let confirmed = m
                    .traub_step(z)
                    .map(|next| chordal(next, SpherePoint::Finite(a)) < 10.0 * s.root_tol)
                    .unwrap_or(false);
                if confirmed {
                    return OrbitOutcome { class: OrbitClass::Root(i), iterations: it, last: z };
                }
            }
            near_root |= dist < cycle_tol;
        }
        if infinity_attracts && z.norm() > s.escape_radius {
            return OrbitOutcome { class: OrbitClass::Infinity, iterations: it, last: z };
        }
        if z.is_infinite() && infinity_fixed && !infinity_attracts {
            return other(it, z);
        }
        if it == s.max_iter {
            break;
        }
        if it > 0 {
            if !near_root && chordal(z, anchor) < s.root_tol {
                return other(it, z);
            }
            if it % s.cycle_window == 0 {
                anchor = z;
            }
        }
        z = match m.traub_step(z) {
            Ok(next) => next,
            Err(_) => return other(it, z),
        };
    }
    other(s.max_iter, z)
}

/// Renders on the global rayon pool.
pub fn render_dynamical_plane(m: &TraubMap, spec: PlaneSpec, s: &IterSettings) -> BasinRaster {
    let infinity = m.infinity_class();
    let outcomes: Vec<(u8, u32)> = (0..spec.len())
        .into_par_iter()
        .map(|k| pixel(m, &spec, k, s, infinity))
        .collect();
    let (mut classes, mut iters): (Vec<u8>, Vec<u32>) = outcomes.into_iter().unzip();

    if s.retry_stalled {
        let longer = s.with_max_iter(s.max_iter.saturating_mul(4));
        let n_roots = m.roots().len() as u8;
        let stalled: Vec<usize> = (0..spec.len())
            .filter(|&k| classes[k] == CLASS_OTHER && borders_root(&classes, &spec, k, n_roots))
            .collect();
        let retried: Vec<(u8, u32)> = stalled
            .par_iter()
            .map(|&k| pixel(m, &spec, k, &longer, infinity))
            .collect();
        for (&k, (c, it)) in stalled.iter().zip(retried) {
            classes[k] = c;
            iters[k] = it;
        }
    }

    BasinRaster {
        spec,
        classes,
        iters,
        roots: m.roots().iter().map(|&(a, _)| a).collect(),
    }
}

/// Renders with exactly `workers` threads. Output does not depend on `workers`.
pub fn render_dynamical_plane_with_workers(
    m: &TraubMap,
    spec: PlaneSpec,
    s: &IterSettings,
    workers: usize,
) -> BasinRaster {
    match rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build() {
        Ok(pool) => pool.install(|| render_dynamical_plane(m, spec, s)),
        Err(_) => render_dynamical_plane(m, spec, s),
    }
}

fn pixel(m: &TraubMap, spec: &PlaneSpec, k: usize, s: &IterSettings, infinity: InfinityClass) -> (u8, u32) {
    let z = spec.point(k % spec.px_w, k / spec.px_w);
    let out = classify_with(m, SpherePoint::Finite(z), s, infinity);
    (out.class.id(), out.iterations as u32)
}

fn borders_root(classes: &[u8], spec: &PlaneSpec, k: usize, n_roots: u8) -> bool {
    let (col, row) = (k % spec.px_w, k / spec.px_w);
    let is_root = |c: usize, r: usize| classes[r * spec.px_w + c] < n_roots;
    (col > 0 && is_root(col - 1, row))
        || (col + 1 < spec.px_w && is_root(col + 1, row))
        || (row > 0 && is_root(col, row - 1))
        || (row + 1 < spec.px_h && is_root(col, row + 1))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassStats {
    pub class: OrbitClass,
    pub pixels: usize,
    pub fraction: f64,
    /// Mean iteration count over this class's pixels (0 when empty).
    pub mean_iterations: f64,
}

/// Per-class pixel fractions and mean iterations: every root in order, then
/// infinity, then other.
pub fn raster_stats(r: &BasinRaster) -> Vec<ClassStats> {
    let mut classes: Vec<OrbitClass> = (0..r.roots.len()).map(OrbitClass::Root).collect();
    classes.push(OrbitClass::Infinity);
    classes.push(OrbitClass::Other);
    let total = r.classes.len();
    classes
        .into_iter()
        .map(|class| {
            let id = class.id();
            let (pixels, iter_sum) = r
                .classes
                .iter()
                .zip(&r.iters)
                .filter(|(&c, _)| c == id)
                .fold((0usize, 0u64), |(n, s), (_, &it)| (n + 1, s + it as u64));
            ClassStats {
                class,
                pixels,
                fraction: if total == 0 { 0.0 } else { pixels as f64 / total as f64 },
                mean_iterations: if pixels == 0 { 0.0 } else { iter_sum as f64 / pixels as f64 },
            }
        })
        .collect()
}
