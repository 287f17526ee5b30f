//! Reflection-symmetry sectors.
//!
//! A sector fixes a parity under some of the axis reflections `x_k -> -x_k`
//! and, optionally, under the swap `x1 <-> x2`. Functions in the sector
//! satisfy `u(g x) = chi(g) u(x)` for every `g` in the generated group, so
//! they are determined by their values on one representative per orbit.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::Parity;

fn sign(p: Parity) -> f64 {
    match p {
        Parity::Even => 1.0,
        Parity::Odd => -1.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Sector {
    /// Parity under `x_k -> -x_k`; `None` leaves the reflection unused.
    pub flips: [Option<Parity>; 3],
    /// Parity under `x1 <-> x2`.
    pub swap: Option<Parity>,
}

/// One element `x -> F(S(x))` of the group: optional swap then flips.
#[derive(Debug, Clone, Copy)]
struct Element {
    swap: bool,
    flips: [bool; 3],
    character: f64,
}

impl Sector {
    pub const FULL: Sector = Sector {
        flips: [None, None, None],
        swap: None,
    };

    pub fn even_z() -> Self {
        Self::FULL.with_z(Parity::Even)
    }

    pub fn odd_z() -> Self {
        Self::FULL.with_z(Parity::Odd)
    }

    pub fn with_z(mut self, p: Parity) -> Self {
        self.flips[2] = Some(p);
        self
    }

    /// Sector of the square-symmetry group acting on `(x1, x2)` by class
    /// name: `a1`, `a2`, `b1`, `b2` (both reflections of equal parity, with
    /// a swap parity) or `e` (odd in `x1`, even in `x2`, no swap).
    pub fn square_class(name: &str) -> Result<Self> {
        use Parity::*;
        let (f, s) = match name {
            "a1" => ([Some(Even), Some(Even)], Some(Even)),
            "a2" => ([Some(Even), Some(Even)], Some(Odd)),
            "b1" => ([Some(Odd), Some(Odd)], Some(Even)),
            "b2" => ([Some(Odd), Some(Odd)], Some(Odd)),
            "e" => ([Some(Odd), Some(Even)], None),
            other => return Err(Error::config(format!("unknown symmetry class {other:?}"))),
        };
        Ok(Sector {
            flips: [f[0], f[1], None],
            swap: s,
        })
        .and_then(Sector::validated)
    }

    /// All sectors of the full reflection group in 3D, with the number of
    /// times each spectrum occurs in the full problem. Together they
    /// partition the spectrum.
    pub fn partition_3d() -> Vec<(Sector, usize)> {
        let mut out = Vec::new();
        for z in [Parity::Even, Parity::Odd] {
            for class in ["a1", "a2", "b1", "b2", "e"] {
                let s = Sector::square_class(class).unwrap().with_z(z);
                out.push((s, if class == "e" { 2 } else { 1 }));
            }
        }
        out
    }

    /// The corresponding 2D partition on `(x1, x2)`.
    pub fn partition_2d() -> Vec<(Sector, usize)> {
        ["a1", "a2", "b1", "b2", "e"]
            .iter()
            .map(|c| (Sector::square_class(c).unwrap(), if *c == "e" { 2 } else { 1 }))
            .collect()
    }

    pub fn validated(self) -> Result<Self> {
        if self.swap.is_some() && self.flips[0] != self.flips[1] {
            return Err(Error::domain(
                "a swap-symmetric sector needs equal parities under the x1 and x2 reflections",
            ));
        }
        Ok(self)
    }

    pub fn is_full(&self) -> bool {
        *self == Self::FULL
    }

    fn elements(&self) -> Vec<Element> {
        let mut out = Vec::new();
        let swaps: &[bool] = if self.swap.is_some() { &[false, true] } else { &[false] };
        for &sw in swaps {
            for mask in 0..8u8 {
                let flips = [mask & 1 != 0, mask & 2 != 0, mask & 4 != 0];
                if (0..3).any(|k| flips[k] && self.flips[k].is_none()) {
                    continue;
                }
                let mut character = if sw { sign(self.swap.unwrap()) } else { 1.0 };
                for k in 0..3 {
                    if flips[k] {
                        character *= sign(self.flips[k].unwrap());
                    }
                }
                out.push(Element {
                    swap: sw,
                    flips,
                    character,
                });
            }
        }
        out
    }

    pub fn group_order(&self) -> usize {
        self.elements().len()
    }

    fn act(e: &Element, p: &[i64]) -> [i64; 3] {
        let mut q = [0i64; 3];
        q[..p.len()].copy_from_slice(p);
        if e.swap {
            q.swap(0, 1);
        }
        for k in 0..p.len() {
            if e.flips[k] {
                q[k] = -q[k];
            }
        }
        q
    }

    /// Maps lattice coordinates to their orbit representative (nonnegative
    /// on reflected axes, `p0 >= p1` under swap) and returns the character
    /// relating the two values: `u(p) = chi * u(rep)`.
    pub fn canonicalize(&self, p: &[i64]) -> ([i64; 3], f64) {
        let mut q = [0i64; 3];
        q[..p.len()].copy_from_slice(p);
        let mut chi = 1.0;
        for k in 0..p.len() {
            if let Some(par) = self.flips[k] {
                if q[k] < 0 {
                    q[k] = -q[k];
                    chi *= sign(par);
                }
            }
        }
        if let Some(par) = self.swap {
            if q[0] < q[1] {
                q.swap(0, 1);
                chi *= sign(par);
            }
        }
        (q, chi)
    }

    /// Orbit size of a representative and whether the sector forces the
    /// value there to vanish (some stabilizing element has character -1).
    pub fn orbit(&self, rep: &[i64]) -> (usize, bool) {
        let elements = self.elements();
        let mut stab = 0;
        let mut killed = false;
        for e in &elements {
            let q = Self::act(e, rep);
            if q[..rep.len()] == *rep {
                stab += 1;
                if e.character < 0.0 {
                    killed = true;
                }
            }
        }
        (elements.len() / stab, killed)
    }

    pub fn name(&self) -> String {
        if self.is_full() {
            return "full".into();
        }
        let mut parts = Vec::new();
        let class = match (self.flips[0], self.flips[1], self.swap) {
            (Some(Parity::Even), Some(Parity::Even), Some(Parity::Even)) => Some("a1".to_string()),
            (Some(Parity::Even), Some(Parity::Even), Some(Parity::Odd)) => Some("a2".to_string()),
            (Some(Parity::Odd), Some(Parity::Odd), Some(Parity::Even)) => Some("b1".to_string()),
            (Some(Parity::Odd), Some(Parity::Odd), Some(Parity::Odd)) => Some("b2".to_string()),
            (Some(Parity::Odd), Some(Parity::Even), None) => Some("e".to_string()),
            (None, None, None) => None,
            (a, b, s) => {
                let f = |p: Option<Parity>| p.map_or("any".to_string(), |p| p.to_string());
                Some(format!("x1_{}_x2_{}_swap_{}", f(a), f(b), f(s)))
            }
        };
        if let Some(c) = class {
            parts.push(c);
        }
        if let Some(z) = self.flips[2] {
            parts.push(format!("{z}_z"));
        }
        parts.join("_")
    }
}

impl fmt::Display for Sector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for Sector {
    type Err = Error;
    /// Accepts `full`, `even_z`, `odd_z`, a square class (`a1`, ..., `e`),
    /// or a class followed by `_even_z` / `_odd_z`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        match s.as_str() {
            "full" => return Ok(Sector::FULL),
            "even_z" | "evenz" => return Ok(Sector::even_z()),
            "odd_z" | "oddz" => return Ok(Sector::odd_z()),
            _ => {}
        }
        if let Some(c) = s.strip_suffix("_even_z") {
            return Ok(Sector::square_class(c)?.with_z(Parity::Even));
        }
        if let Some(c) = s.strip_suffix("_odd_z") {
            return Ok(Sector::square_class(c)?.with_z(Parity::Odd));
        }
        Sector::square_class(&s)
    }
}
