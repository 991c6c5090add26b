//! Raster topology: immediate basins by flood fill, holes, border contact.

use std::collections::VecDeque;

use super::{render_dynamical_plane, BasinRaster, IterSettings, PlaneSpec};
use crate::maps::TraubMap;
use crate::poly::Complexd;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BasinError {
    #[error("root index {0} out of range")]
    NoSuchRoot(usize),
    #[error("root {0} lies outside the viewport")]
    RootOutsideViewport(Complexd),
    #[error("pixel containing root {index} has class {found}; resolution too coarse")]
    RootPixelMisclassified { index: usize, found: u8 },
}

/// A 4-connected set of pixels grown from `seed`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentMask {
    pub spec: PlaneSpec,
    pub bits: Vec<bool>,
    pub seed: (usize, usize),
}

impl ComponentMask {
    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn touches_border(&self) -> bool {
        let (w, h) = (self.spec.px_w, self.spec.px_h);
        (0..w).any(|c| self.bits[c] || self.bits[(h - 1) * w + c])
            || (0..h).any(|r| self.bits[r * w] || self.bits[r * w + w - 1])
    }
}

/// Flood fill (4-connected) of the class `root_index` from the pixel that
/// contains the root.
pub fn immediate_basin(r: &BasinRaster, root_index: usize) -> Result<ComponentMask, BasinError> {
    let root = *r.roots.get(root_index).ok_or(BasinError::NoSuchRoot(root_index))?;
    let seed = r.spec.pixel_of(root).ok_or(BasinError::RootOutsideViewport(root))?;
    let found = r.class_at(seed.0, seed.1);
    if found as usize != root_index {
        return Err(BasinError::RootPixelMisclassified { index: root_index, found });
    }
    let bits = flood(r.spec.px_w, r.spec.px_h, seed, false, |k| r.classes[k] == found);
    Ok(ComponentMask { spec: r.spec, bits, seed })
}

/// Components of the complement (8-connected) that do not reach the border.
pub fn hole_count(mask: &ComponentMask) -> usize {
    let (w, h) = (mask.spec.px_w, mask.spec.px_h);
    let mut seen = vec![false; w * h];
    let mut holes = 0;
    for start in 0..w * h {
        if mask.bits[start] || seen[start] {
            continue;
        }
        let comp = flood(w, h, (start % w, start / w), true, |k| !mask.bits[k]);
        let mut touches = false;
        for (k, &inside) in comp.iter().enumerate() {
            if inside {
                seen[k] = true;
                let (c, r) = (k % w, k / w);
                touches |= c == 0 || r == 0 || c + 1 == w || r + 1 == h;
            }
        }
        if !touches {
            holes += 1;
        }
    }
    holes
}

fn flood(
    w: usize,
    h: usize,
    seed: (usize, usize),
    diagonal: bool,
    member: impl Fn(usize) -> bool,
) -> Vec<bool> {
    let mut bits = vec![false; w * h];
    let mut queue = VecDeque::new();
    let start = seed.1 * w + seed.0;
    bits[start] = true;
    queue.push_back(start);
    while let Some(k) = queue.pop_front() {
        let (c, r) = ((k % w) as isize, (k / w) as isize);
        for (dc, dr) in [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)]
            .into_iter()
            .take(if diagonal { 8 } else { 4 })
        {
            let (nc, nr) = (c + dc, r + dr);
            if nc < 0 || nr < 0 || nc >= w as isize || nr >= h as isize {
                continue;
            }
            let n = nr as usize * w + nc as usize;
            if !bits[n] && member(n) {
                bits[n] = true;
                queue.push_back(n);
            }
        }
    }
    bits
}

/// Border-contact heuristic for unboundedness: for each width, whether the
/// immediate basin of `root_index` reaches the edge of a `px`-square view.
pub fn unbounded_probe(
    m: &TraubMap,
    root_index: usize,
    center: Complexd,
    widths: &[f64],
    px: usize,
    s: &IterSettings,
) -> Result<Vec<bool>, BasinError> {
    widths
        .iter()
        .map(|&w| {
            let r = render_dynamical_plane(m, PlaneSpec::square(center, w, px), s);
            immediate_basin(&r, root_index).map(|mask| mask.touches_border())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basins::CLASS_OTHER;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complexd {
        Complexd::new(re, im)
    }

    fn mask_from(w: usize, h: usize, f: impl Fn(usize, usize) -> bool) -> ComponentMask {
        let bits = (0..w * h).map(|k| f(k % w, k / w)).collect();
        ComponentMask { spec: PlaneSpec::new(c(0.0, 0.0), 1.0, w, h), bits, seed: (0, 0) }
    }

    fn raster(w: usize, h: usize, classes: Vec<u8>, root: Complexd) -> BasinRaster {
        BasinRaster {
            spec: PlaneSpec::new(c(0.0, 0.0), 2.0, w, h),
            iters: vec![0; classes.len()],
            classes,
            roots: vec![root],
        }
    }

    #[test]
    fn flood_fill_whole_and_half() {
        let r = raster(10, 10, vec![0; 100], c(0.0, 0.0));
        assert_eq!(immediate_basin(&r, 0).unwrap().count(), 100);

        let classes = (0..100).map(|k| if k % 10 < 5 { 0 } else { CLASS_OTHER }).collect();
        let r = raster(10, 10, classes, c(-0.5, 0.0));
        let mask = immediate_basin(&r, 0).unwrap();
        assert_eq!(mask.count(), 50);
        assert!(mask.bits[0] && !mask.bits[9]);
    }

    #[test]
    fn flood_fill_errors() {
        let r = raster(4, 4, vec![CLASS_OTHER; 16], c(0.0, 0.0));
        assert!(matches!(immediate_basin(&r, 0), Err(BasinError::RootPixelMisclassified { .. })));
        let r = raster(4, 4, vec![0; 16], c(5.0, 0.0));
        assert!(matches!(immediate_basin(&r, 0), Err(BasinError::RootOutsideViewport(_))));
        assert!(matches!(immediate_basin(&r, 3), Err(BasinError::NoSuchRoot(3))));
    }

    #[test]
    fn disk_and_annulus() {
        let disk = mask_from(41, 41, |x, y| {
            let (dx, dy) = (x as f64 - 20.0, y as f64 - 20.0);
            dx * dx + dy * dy < 150.0
        });
        assert_eq!(hole_count(&disk), 0);
        assert!(!disk.touches_border());
        let annulus = mask_from(41, 41, |x, y| {
            let (dx, dy) = (x as f64 - 20.0, y as f64 - 20.0);
            let r2 = dx * dx + dy * dy;
            (50.0..150.0).contains(&r2)
        });
        assert_eq!(hole_count(&annulus), 1);
    }

    #[test]
    fn diagonal_gaps_do_not_count_as_holes() {
        // four pixels around an empty centre, touching only diagonally: the
        // centre leaks out through the corners under 8-connectivity
        let ring = mask_from(5, 5, |x, y| {
            let edge = x == 1 || x == 3 || y == 1 || y == 3;
            let inner = (1..=3).contains(&x) && (1..=3).contains(&y);
            let corner = (x == 1 || x == 3) && (y == 1 || y == 3);
            edge && inner && !corner
        });
        assert_eq!(hole_count(&ring), 0);
    }

    proptest! {
        #[test]
        fn hole_count_matches_union_find(w in 1usize..24, h in 1usize..24, seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let bits: Vec<bool> = (0..w * h).map(|_| rng.gen_bool(0.55)).collect();
            let mask = ComponentMask { spec: PlaneSpec::new(c(0.0, 0.0), 1.0, w, h), bits: bits.clone(), seed: (0, 0) };
            prop_assert_eq!(hole_count(&mask), crate::verify::hole_count_union_find(w, h, &bits));
        }
    }
}
