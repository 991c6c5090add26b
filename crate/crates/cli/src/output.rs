//! Bit-exact output formats: binary PPM and the per-class stats CSV.

use std::io::{self, Write};

use traubdyn::basins::{ClassStats, OrbitClass};

/// Binary "P6" image, maxval 255, rows top to bottom.
pub fn write_ppm(mut w: impl Write, width: usize, height: usize, rgb: &[u8]) -> io::Result<()> {
    assert_eq!(rgb.len(), width * height * 3, "pixel buffer does not match dimensions");
    write!(w, "P6\n{width} {height}\n255\n")?;
    w.write_all(rgb)?;
    w.flush()
}

/// Parses a P6 file back into `(width, height, rgb)`. Comments are not
/// supported; this only needs to read what [`write_ppm`] produces.
#[cfg(test)]
pub fn read_ppm(bytes: &[u8]) -> Option<(usize, usize, Vec<u8>)> {
    let mut fields = Vec::with_capacity(4);
    let mut pos = 0;
    while fields.len() < 4 {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return None;
        }
        fields.push(std::str::from_utf8(&bytes[start..pos]).ok()?);
    }
    // exactly one whitespace byte separates the header from the raster
    pos += 1;
    if fields[0] != "P6" || fields[3] != "255" {
        return None;
    }
    let width: usize = fields[1].parse().ok()?;
    let height: usize = fields[2].parse().ok()?;
    let data = bytes.get(pos..)?;
    (data.len() == width * height * 3).then(|| (width, height, data.to_vec()))
}

pub fn class_label(class: OrbitClass) -> String {
    match class {
        OrbitClass::Root(i) => format!("root{i}"),
        OrbitClass::Infinity => "infinity".to_string(),
        OrbitClass::Other => "other".to_string(),
    }
}

pub fn stats_csv(stats: &[ClassStats]) -> String {
    let mut out = String::from("class,pixel_fraction,mean_iterations\n");
    for s in stats {
        out.push_str(&format!(
            "{},{},{}\n",
            class_label(s.class),
            format_sig(s.fraction, 10),
            format_sig(s.mean_iterations, 10)
        ));
    }
    out
}

/// Shortest form of `x` at `sig` significant digits, like C's `%.{sig}g`.
pub fn format_sig(x: f64, sig: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", sig - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= sig as i32 {
        format!("{}e{}{:02}", trim_zeros(mantissa), if exp < 0 { '-' } else { '+' }, exp.abs())
    } else {
        let decimals = (sig as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
