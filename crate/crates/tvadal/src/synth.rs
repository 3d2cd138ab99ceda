//! Deterministic synthetic test images.
//!
//! | name                 | content                                                        |
//! |----------------------|----------------------------------------------------------------|
//! | `squares`            | 0 in the top-left quadrant (`i < n/2`, `j < m/2`), 255 elsewhere |
//! | `gradient-ramp`      | `255 (i + j) / (n + m - 2)`, a linear ramp between opposite corners |
//! | `checkerboard`       | unit cells, 255 where `i + j` is odd, 0 elsewhere               |
//! | `edges-plus-texture` | left half: vertical stripes two pixels wide alternating 96/160; right half: background 40 with a disc of 200 centred at `(n/2, 3m/4)`, radius `min(n, m)/5` |

use std::fmt;
use std::str::FromStr;

use thiserror::Error;
use tvadal_core::Image;

pub const DEFAULT_SIZE: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Synthetic {
    Squares,
    GradientRamp,
    Checkerboard,
    EdgesPlusTexture,
}

impl Synthetic {
    pub const ALL: [Synthetic; 4] = [
        Synthetic::Squares,
        Synthetic::GradientRamp,
        Synthetic::Checkerboard,
        Synthetic::EdgesPlusTexture,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Synthetic::Squares => "squares",
            Synthetic::GradientRamp => "gradient-ramp",
            Synthetic::Checkerboard => "checkerboard",
            Synthetic::EdgesPlusTexture => "edges-plus-texture",
        }
    }

    pub fn render(self, rows: usize, cols: usize) -> Result<Image, SynthError> {
        let (n, m) = (rows, cols);
        let img = match self {
            Synthetic::Squares => Image::from_fn(n, m, |i, j| {
                if i < n / 2 && j < m / 2 {
                    0.0
                } else {
                    255.0
                }
            }),
            Synthetic::GradientRamp => {
                let span = (n + m).saturating_sub(2).max(1) as f64;
                Image::from_fn(n, m, |i, j| 255.0 * (i + j) as f64 / span)
            }
            Synthetic::Checkerboard => {
                Image::from_fn(n, m, |i, j| if (i + j) % 2 == 1 { 255.0 } else { 0.0 })
            }
            Synthetic::EdgesPlusTexture => {
                let (ci, cj) = (n as f64 / 2.0, 3.0 * m as f64 / 4.0);
                let r = n.min(m) as f64 / 5.0;
                Image::from_fn(n, m, |i, j| {
                    if j < m / 2 {
                        if (j / 2) % 2 == 0 {
                            96.0
                        } else {
                            160.0
                        }
                    } else {
                        let (di, dj) = (i as f64 - ci, j as f64 - cj);
                        if di * di + dj * dj <= r * r {
                            200.0
                        } else {
                            40.0
                        }
                    }
                })
            }
        };
        Ok(img?)
    }
}

impl fmt::Display for Synthetic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Synthetic {
    type Err = SynthError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Synthetic::ALL
            .into_iter()
            .find(|g| g.name() == s)
            .ok_or_else(|| SynthError::UnknownName(s.to_owned()))
    }
}

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("unknown synthetic image {0:?} (expected squares, gradient-ramp, checkerboard or edges-plus-texture)")]
    UnknownName(String),

    #[error("bad synthetic size {0:?} (expected ROWSxCOLS)")]
    BadSize(String),

    #[error(transparent)]
    Image(#[from] tvadal_core::Error),
}

/// Renders the named generator at `rows x cols`.
pub fn synth_image(name: &str, rows: usize, cols: usize) -> Result<Image, SynthError> {
    name.parse::<Synthetic>()?.render(rows, cols)
}

/// A parsed `synthetic:NAME[:ROWSxCOLS]` source.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SyntheticSpec {
    pub kind: Synthetic,
    pub rows: usize,
    pub cols: usize,
}

impl SyntheticSpec {
    /// Parses the part after `synthetic:`. The size defaults to 128x128.
    pub fn parse(spec: &str) -> Result<Self, SynthError> {
        let (name, size) = match spec.split_once(':') {
            Some((name, size)) => (name, Some(size)),
            None => (spec, None),
        };
        let kind = name.parse()?;
        let (rows, cols) = match size {
            None => (DEFAULT_SIZE, DEFAULT_SIZE),
            Some(size) => {
                let bad = || SynthError::BadSize(size.to_owned());
                let (r, c) = size.split_once(['x', 'X']).ok_or_else(bad)?;
                let r: usize = r.parse().map_err(|_| bad())?;
                let c: usize = c.parse().map_err(|_| bad())?;
                if r == 0 || c == 0 {
                    return Err(bad());
                }
                (r, c)
            }
        };
        Ok(Self { kind, rows, cols })
    }

    pub fn render(&self) -> Result<Image, SynthError> {
        self.kind.render(self.rows, self.cols)
    }
}
