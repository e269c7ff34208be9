//! Line-oriented body description files.
//!
//! One patch per line; `#` starts a comment. Numbers are written in Rust's
//! shortest round-trip form, so `parse(write(patches)) == patches` bit for bit.
//!
//! ```text
//! record     = parabolic | plane | sphere , { " | " trim }
//! parabolic  = "parabolic" AXIS(height) AXIS(arg) SIGN ALPHA C "at" X Y Z
//! plane      = "plane" PX PY PZ NX NY NZ "at" X Y Z
//! sphere     = "sphere" RADIUS "at" X Y Z
//! trim       = "range" AXIS MIN MAX        (MIN <= q[AXIS] <= MAX)
//!            | "abs" AXIS MIN MAX          (MIN <= |q[AXIS]| <= MAX)
//!            | "parab" AXIS AXIS(arg) ALPHA C   (|q[AXIS]| <= ALPHA q[arg]^2 - C)
//! ```
//!
//! `at X Y Z` is the patch frame origin; plane points and all trims are in
//! coordinates relative to it. A parabolic record describes
//! `q[height] = SIGN * (ALPHA q[arg]^2 - C)` with material on the side where
//! `SIGN * q[height] < ALPHA q[arg]^2 - C`. Plane normals point away from the
//! material.

use std::fmt::Write as _;

use thiserror::Error;

use crate::geom::{Axis, Patch, Surface, TrimConstraint, UnitVec3, Vec3};

#[derive(Debug, Error, Clone, PartialEq)]
#[error("body file line {line}: {message}")]
pub struct BodyFileError {
    pub line: usize,
    pub message: String,
}

pub fn write_body_file(patches: &[Patch]) -> String {
    let mut out = String::from("# mirror body, one patch per line\n");
    for p in patches {
        match p.surface {
            Surface::ParabolicCylinder {
                height,
                arg,
                sign,
                alpha,
                c,
            } => {
                let _ = write!(out, "parabolic {height} {arg} {sign} {alpha} {c}");
            }
            Surface::Plane { point, normal } => {
                let _ = write!(
                    out,
                    "plane {} {} {} {} {} {}",
                    point.x, point.y, point.z, normal.x, normal.y, normal.z
                );
            }
            Surface::Sphere { radius } => {
                let _ = write!(out, "sphere {radius}");
            }
        }
        let _ = write!(out, " at {} {} {}", p.origin.x, p.origin.y, p.origin.z);
        for t in &p.trim {
            let _ = match *t {
                TrimConstraint::Range { axis, min, max } => {
                    write!(out, " | range {axis} {min} {max}")
                }
                TrimConstraint::AbsRange { axis, min, max } => {
                    write!(out, " | abs {axis} {min} {max}")
                }
                TrimConstraint::Parabolic {
                    axis,
                    arg,
                    alpha,
                    c,
                } => write!(out, " | parab {axis} {arg} {alpha} {c}"),
            };
        }
        out.push('\n');
    }
    out
}

pub fn parse_body_file(text: &str) -> Result<Vec<Patch>, BodyFileError> {
    let mut patches = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        patches.push(parse_record(line).map_err(|message| BodyFileError {
            line: i + 1,
            message,
        })?);
    }
    Ok(patches)
}

struct Tokens<'a> {
    inner: std::str::SplitWhitespace<'a>,
}

impl<'a> Tokens<'a> {
    fn word(&mut self, what: &str) -> Result<&'a str, String> {
        self.inner.next().ok_or_else(|| format!("missing {what}"))
    }

    fn num(&mut self, what: &str) -> Result<f64, String> {
        let w = self.word(what)?;
        let v: f64 = w
            .parse()
            .map_err(|_| format!("{what}: '{w}' is not a number"))?;
        if !v.is_finite() {
            return Err(format!("{what} must be finite"));
        }
        Ok(v)
    }

    fn axis(&mut self, what: &str) -> Result<Axis, String> {
        let w = self.word(what)?;
        Axis::parse(w).ok_or_else(|| format!("{what}: expected x, y or z, got '{w}'"))
    }

    fn vec(&mut self, what: &str) -> Result<Vec3, String> {
        Ok(Vec3::new(self.num(what)?, self.num(what)?, self.num(what)?))
    }

    fn keyword(&mut self, kw: &str) -> Result<(), String> {
        match self.inner.next() {
            Some(w) if w == kw => Ok(()),
            Some(w) => Err(format!("expected '{kw}', got '{w}'")),
            None => Err(format!("missing '{kw}'")),
        }
    }

    fn finish(&mut self) -> Result<(), String> {
        match self.inner.next() {
            None => Ok(()),
            Some(w) => Err(format!("unexpected token '{w}'")),
        }
    }
}

fn parse_record(line: &str) -> Result<Patch, String> {
    let mut parts = line.split('|');
    let head = parts.next().unwrap_or("");
    let mut t = Tokens {
        inner: head.split_whitespace(),
    };
    let surface = match t.word("patch kind")? {
        "parabolic" => {
            let height = t.axis("height axis")?;
            let arg = t.axis("argument axis")?;
            if height == arg {
                return Err("height and argument axes must differ".into());
            }
            let sign = t.num("sign")?;
            if sign != 1.0 && sign != -1.0 {
                return Err(format!("sign must be 1 or -1, got {sign}"));
            }
            let alpha = t.num("alpha")?;
            if alpha <= 0.0 {
                return Err(format!("alpha must be positive, got {alpha}"));
            }
            let c = t.num("c")?;
            Surface::ParabolicCylinder {
                height,
                arg,
                sign,
                alpha,
                c,
            }
        }
        "plane" => {
            let point = t.vec("plane point")?;
            let n = t.vec("plane normal")?;
            let normal = if (n.norm() - 1.0).abs() <= 1e-12 {
                UnitVec3::new_unchecked(n)
            } else {
                n.normalize().ok_or("plane normal must be non-zero")?
            };
            Surface::Plane { point, normal }
        }
        "sphere" => {
            let radius = t.num("radius")?;
            if radius <= 0.0 {
                return Err(format!("radius must be positive, got {radius}"));
            }
            Surface::Sphere { radius }
        }
        other => return Err(format!("unknown patch kind '{other}'")),
    };
    t.keyword("at")?;
    let origin = t.vec("frame origin")?;
    t.finish()?;

    let mut trim = Vec::new();
    for part in parts {
        let mut t = Tokens {
            inner: part.split_whitespace(),
        };
        let c = match t.word("trim kind")? {
            "range" => TrimConstraint::Range {
                axis: t.axis("trim axis")?,
                min: t.num("min")?,
                max: t.num("max")?,
            },
            "abs" => TrimConstraint::AbsRange {
                axis: t.axis("trim axis")?,
                min: t.num("min")?,
                max: t.num("max")?,
            },
            "parab" => TrimConstraint::Parabolic {
                axis: t.axis("trim axis")?,
                arg: t.axis("trim argument axis")?,
                alpha: t.num("alpha")?,
                c: t.num("c")?,
            },
            other => return Err(format!("unknown trim kind '{other}'")),
        };
        t.finish()?;
        trim.push(c);
    }
    Ok(Patch {
        surface,
        origin,
        trim,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::{make_invisible_union, make_slab_2d_body, rotate_body_quarter_turn_x};

    #[test]
    fn paper_bodies_round_trip_exactly() {
        let union = make_invisible_union(1.0, 1.0, 0.6).unwrap();
        let slab = rotate_body_quarter_turn_x(&make_slab_2d_body(0.7, 1.3, 0.2, 0.9).unwrap());
        for body in [union, slab] {
            let text = write_body_file(&body.patches);
            let back = parse_body_file(&text).unwrap();
            assert_eq!(back, body.patches);
            assert_eq!(write_body_file(&back), text);
        }
    }

    #[test]
    fn parses_hand_written_records() {
        let text = "\
# two faces
parabolic y x 1 1 0.25 at 0 0 0 | abs x 0.6 1 | parab z x 1 0.25
plane 1 0 0 2 0 0 at 0 0 0 | abs y 0 0.75   # normal gets normalized
sphere 0.5 at 1 2 3
";
        let p = parse_body_file(text).unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(p[0].trim.len(), 2);
        match p[1].surface {
            Surface::Plane { normal, .. } => assert_eq!(normal.get(), Vec3::new(1.0, 0.0, 0.0)),
            _ => panic!(),
        }
        assert_eq!(p[2].origin, Vec3::new(1.0, 2.0, 3.0));
    }

    #[test]
    fn errors_name_the_line() {
        let err = parse_body_file("\n\nplane 1 0 0 0 0 0 at 0 0 0\n").unwrap_err();
        assert_eq!(err.line, 3);
        assert!(parse_body_file("cone 1 at 0 0 0").is_err());
        assert!(parse_body_file("sphere 1 at 0 0").is_err());
        assert!(parse_body_file("sphere 1 at 0 0 0 extra").is_err());
        assert!(parse_body_file("parabolic y y 1 1 0.25 at 0 0 0").is_err());
        assert!(parse_body_file("parabolic y x 2 1 0.25 at 0 0 0").is_err());
        assert!(parse_body_file("sphere 1 at 0 0 0 | wiggle x 0 1").is_err());
    }
}
