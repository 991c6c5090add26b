//! Fixed colour maps for rasters.

/// Hue in degrees, saturation and value in `[0, 1]`; channels rounded half-up.
pub fn hsv_to_rgb(hue: f64, sat: f64, val: f64) -> [u8; 3] {
    let h = hue.rem_euclid(360.0) / 60.0;
    let sector = h.floor();
    let f = h - sector;
    let p = val * (1.0 - sat);
    let q = val * (1.0 - sat * f);
    let t = val * (1.0 - sat * (1.0 - f));
    let (r, g, b) = match sector as u32 {
        0 => (val, t, p),
        1 => (q, val, p),
        2 => (p, val, t),
        3 => (p, q, val),
        4 => (t, p, val),
        _ => (val, p, q),
    };
    let ch = |x: f64| (x.clamp(0.0, 1.0) * 255.0 + 0.5).floor() as u8;
    [ch(r), ch(g), ch(b)]
}

/// Dynamical plane: root `i` of `n_roots` gets hue `360 i / n_roots`, darker
/// with more iterations; infinity is white, everything else black.
pub fn basin_colour(class: u8, iterations: u32, n_roots: usize, max_iter: usize) -> [u8; 3] {
    use crate::basins::{CLASS_INFINITY, CLASS_OTHER};
    match class {
        CLASS_OTHER => [0, 0, 0],
        CLASS_INFINITY => [255, 255, 255],
        i if (i as usize) < n_roots => {
            let max = max_iter.max(1) as f64;
            let shade = (iterations as f64).min(max) / max;
            hsv_to_rgb(360.0 * i as f64 / n_roots as f64, 1.0, 1.0 - 0.8 * shade)
        }
        _ => [0, 0, 0],
    }
}

/// Parameter plane: hue runs from red (fast) to blue (slow).
pub fn speed_colour(iterations: usize, max_iter: usize) -> [u8; 3] {
    let max = max_iter.max(1) as f64;
    hsv_to_rgb(240.0 * (iterations as f64).min(max) / max, 1.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primaries() {
        assert_eq!(hsv_to_rgb(0.0, 1.0, 1.0), [255, 0, 0]);
        assert_eq!(hsv_to_rgb(120.0, 1.0, 1.0), [0, 255, 0]);
        assert_eq!(hsv_to_rgb(240.0, 1.0, 1.0), [0, 0, 255]);
        assert_eq!(hsv_to_rgb(360.0, 1.0, 1.0), [255, 0, 0]);
        assert_eq!(hsv_to_rgb(60.0, 1.0, 0.5), [128, 128, 0]);
        assert_eq!(hsv_to_rgb(0.0, 0.0, 0.2), [51, 51, 51]);
    }

    #[test]
    fn basin_palette() {
        assert_eq!(basin_colour(255, 3, 3, 500), [0, 0, 0]);
        assert_eq!(basin_colour(254, 3, 3, 500), [255, 255, 255]);
        assert_eq!(basin_colour(0, 0, 3, 500), [255, 0, 0]);
        assert_eq!(basin_colour(1, 0, 3, 500), [0, 255, 0]);
        assert_eq!(basin_colour(0, 500, 3, 500), [51, 0, 0]);
        assert_eq!(basin_colour(0, 9999, 3, 500), [51, 0, 0]);
    }

    #[test]
    fn speed_palette() {
        assert_eq!(speed_colour(0, 300), [255, 0, 0]);
        assert_eq!(speed_colour(300, 300), [0, 0, 255]);
    }
}
