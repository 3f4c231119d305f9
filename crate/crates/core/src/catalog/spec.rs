//! Catalog descriptors and their compact text form.
//!
//! ```text
//! equator:n=<int>
//! clifford:k=<int>,n=<int>,r=<minimal|einstein|float>
//! cartan
//! profile:g=<int>,m=<int>,<int>
//! ```

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Radius `r1` of the first factor of a Clifford torus `S^k(r1) × S^{n-k}(r2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TorusRadius {
    /// `r1 = sqrt(k/n)`, the minimal torus.
    Minimal,
    /// `r1 = sqrt((k-1)/(n-2))`, the Einstein torus (`2 <= k <= n-2`).
    Einstein,
    Value(f64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum HypersurfaceSpec {
    /// Totally geodesic `S^n = {x_1 = 0}` in `S^{n+1}`.
    Equator {
        n: usize,
    },
    CliffordTorus {
        k: usize,
        n: usize,
        radius: TorusRadius,
    },
    /// Minimal Cartan isoparametric hypersurface (`g = 3`, `n = 3`) in `S^4`.
    CartanCubic,
    /// Analytic isoparametric profile; no immersion is constructed.
    IsoparametricProfile {
        g: usize,
        m_plus: usize,
        m_minus: usize,
    },
}

pub const SUPPORTED_G: [usize; 5] = [1, 2, 3, 4, 6];

impl HypersurfaceSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Equator { n } if n < 2 => Err(Error::InvalidSurface(format!("equator needs n >= 2, got {n}"))),
            Self::CliffordTorus { k, n, radius } => {
                if n < 2 || k < 1 || k > n - 1 {
                    return Err(Error::InvalidSurface(format!(
                        "clifford torus needs 1 <= k <= n-1 and n >= 2, got k={k}, n={n}"
                    )));
                }
                if radius == TorusRadius::Einstein && (k < 2 || k + 2 > n) {
                    return Err(Error::InvalidSurface(format!(
                        "einstein radius needs 2 <= k <= n-2, got k={k}, n={n}"
                    )));
                }
                let r1 = self.torus_r1().expect("torus");
                if !(r1 > 0.0 && r1 < 1.0) {
                    return Err(Error::InvalidSurface(format!("radius must lie in (0, 1), got {r1}")));
                }
                Ok(())
            }
            Self::IsoparametricProfile { g, m_plus, m_minus } => {
                if !SUPPORTED_G.contains(&g) {
                    return Err(Error::UnsupportedG(g));
                }
                if m_plus == 0 || m_minus == 0 {
                    return Err(Error::InvalidSurface("multiplicities must be positive".into()));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Intrinsic dimension `n`.
    pub fn dim(&self) -> usize {
        match *self {
            Self::Equator { n } | Self::CliffordTorus { n, .. } => n,
            Self::CartanCubic => 3,
            Self::IsoparametricProfile { g, m_plus, m_minus } => {
                (0..g).map(|j| if j % 2 == 0 { m_plus } else { m_minus }).sum()
            }
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim() + 2
    }

    /// Resolved first radius of a torus.
    pub fn torus_r1(&self) -> Option<f64> {
        match *self {
            Self::CliffordTorus { k, n, radius } => Some(match radius {
                TorusRadius::Minimal => (k as f64 / n as f64).sqrt(),
                TorusRadius::Einstein => ((k as f64 - 1.0) / (n as f64 - 2.0)).sqrt(),
                TorusRadius::Value(r) => r,
            }),
            _ => None,
        }
    }

    /// Whether an explicit immersion (points, normals) is available.
    pub fn has_immersion(&self) -> bool {
        !matches!(self, Self::IsoparametricProfile { .. })
    }
}

impl fmt::Display for TorusRadius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Minimal => f.write_str("minimal"),
            Self::Einstein => f.write_str("einstein"),
            Self::Value(r) => write!(f, "{r}"),
        }
    }
}

impl fmt::Display for HypersurfaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Equator { n } => write!(f, "equator:n={n}"),
            Self::CliffordTorus { k, n, radius } => write!(f, "clifford:k={k},n={n},r={radius}"),
            Self::CartanCubic => f.write_str("cartan"),
            Self::IsoparametricProfile { g, m_plus, m_minus } => {
                write!(f, "profile:g={g},m={m_plus},{m_minus}")
            }
        }
    }
}

impl Serialize for HypersurfaceSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Cursor over the spec text; columns are 1-based in error messages.
struct Cursor<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse { column: self.pos + 1, message: message.into() })
    }

    fn rest(&self) -> &'a str {
        &self.text[self.pos..]
    }

    fn expect(&mut self, lit: &str) -> Result<()> {
        if self.rest().starts_with(lit) {
            self.pos += lit.len();
            Ok(())
        } else {
            self.err(format!("expected `{lit}`"))
        }
    }

    fn token(&mut self) -> &'a str {
        let rest = self.rest();
        let end = rest.find([',', ':', '=']).unwrap_or(rest.len());
        self.pos += end;
        &rest[..end]
    }

    fn uint(&mut self, what: &str) -> Result<usize> {
        let start = self.pos;
        let tok = self.token();
        tok.parse::<usize>().or_else(|_| {
            self.pos = start;
            self.err(format!("expected non-negative integer for {what}, found `{tok}`"))
        })
    }

    fn keyed_uint(&mut self, key: &str) -> Result<usize> {
        self.expect(key)?;
        self.expect("=")?;
        self.uint(key)
    }

    fn finish(&self) -> Result<()> {
        if self.pos == self.text.len() {
            Ok(())
        } else {
            self.err(format!("unexpected trailing input `{}`", self.rest()))
        }
    }
}

impl FromStr for HypersurfaceSpec {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut c = Cursor { text, pos: 0 };
        let kind = c.token();
        let spec = match kind {
            "equator" => {
                c.expect(":")?;
                let n = c.keyed_uint("n")?;
                c.finish()?;
                Self::Equator { n }
            }
            "clifford" => {
                c.expect(":")?;
                let k = c.keyed_uint("k")?;
                c.expect(",")?;
                let n = c.keyed_uint("n")?;
                let radius = if c.rest().is_empty() {
                    TorusRadius::Minimal
                } else {
                    c.expect(",")?;
                    c.expect("r")?;
                    c.expect("=")?;
                    let start = c.pos;
                    match c.token() {
                        "minimal" => TorusRadius::Minimal,
                        "einstein" => TorusRadius::Einstein,
                        tok => match tok.parse::<f64>() {
                            Ok(r) if r.is_finite() => TorusRadius::Value(r),
                            _ => {
                                c.pos = start;
                                return c
                                    .err(format!("expected `minimal`, `einstein` or a number for r, found `{tok}`"));
                            }
                        },
                    }
                };
                c.finish()?;
                Self::CliffordTorus { k, n, radius }
            }
            "cartan" => {
                c.finish()?;
                Self::CartanCubic
            }
            "profile" => {
                c.expect(":")?;
                let g = c.keyed_uint("g")?;
                c.expect(",")?;
                let m_plus = c.keyed_uint("m")?;
                c.expect(",")?;
                let m_minus = c.uint("m")?;
                c.finish()?;
                Self::IsoparametricProfile { g, m_plus, m_minus }
            }
            other => {
                c.pos = 0;
                return c
                    .err(format!("unknown surface kind `{other}` (expected equator, clifford, cartan or profile)"));
            }
        };
        let value_column = text.find('=').map_or(1, |i| i + 2);
        spec.validate().map_err(|e| Error::Parse { column: value_column, message: e.to_string() })?;
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    #[allow(clippy::approx_constant)]
    fn parses_catalog_forms() {
        let cases = [
            ("equator:n=4", HypersurfaceSpec::Equator { n: 4 }),
            (
                "clifford:k=1,n=4,r=minimal",
                HypersurfaceSpec::CliffordTorus { k: 1, n: 4, radius: TorusRadius::Minimal },
            ),
            (
                "clifford:k=2,n=4,r=0.7071",
                HypersurfaceSpec::CliffordTorus { k: 2, n: 4, radius: TorusRadius::Value(0.7071) },
            ),
            ("cartan", HypersurfaceSpec::CartanCubic),
            ("profile:g=3,m=1,1", HypersurfaceSpec::IsoparametricProfile { g: 3, m_plus: 1, m_minus: 1 }),
        ];
        for (text, want) in cases {
            let got: HypersurfaceSpec = text.parse().unwrap();
            assert_eq!(got, want);
            assert_eq!(got.to_string().parse::<HypersurfaceSpec>().unwrap(), want);
        }
        assert_eq!(
            "clifford:k=1,n=4,r=minimal".parse::<HypersurfaceSpec>().unwrap().to_string(),
            "clifford:k=1,n=4,r=minimal"
        );
    }

    #[test]
    fn einstein_radius_resolves() {
        let s: HypersurfaceSpec = "clifford:k=2,n=4,r=einstein".parse().unwrap();
        assert!((s.torus_r1().unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rejects_out_of_range_k() {
        let err = "clifford:k=0,n=4".parse::<HypersurfaceSpec>().unwrap_err();
        assert!(matches!(err, Error::Parse { .. }), "{err}");
        assert!(err.to_string().contains("1 <= k <= n-1"));
    }

    #[test]
    fn errors_carry_positions() {
        match "clifford:k=x,n=4".parse::<HypersurfaceSpec>() {
            Err(Error::Parse { column, .. }) => assert_eq!(column, 12),
            other => panic!("{other:?}"),
        }
        match "sphere:n=3".parse::<HypersurfaceSpec>() {
            Err(Error::Parse { column, .. }) => assert_eq!(column, 1),
            other => panic!("{other:?}"),
        }
        match "cartan:n=3".parse::<HypersurfaceSpec>() {
            Err(Error::Parse { column, .. }) => assert_eq!(column, 7),
            other => panic!("{other:?}"),
        }
        assert!("profile:g=5,m=1,1".parse::<HypersurfaceSpec>().is_err());
        assert!("clifford:k=1,n=4,r=1.5".parse::<HypersurfaceSpec>().is_err());
        assert!("clifford:k=1,n=4,r=einstein".parse::<HypersurfaceSpec>().is_err());
    }

    #[test]
    fn profile_dimension_alternates() {
        let d = |g, a, b| HypersurfaceSpec::IsoparametricProfile { g, m_plus: a, m_minus: b }.dim();
        assert_eq!(d(3, 1, 1), 3);
        assert_eq!(d(4, 2, 2), 8);
        assert_eq!(d(2, 1, 3), 4);
        assert_eq!(d(6, 1, 1), 6);
        assert_eq!(d(4, 1, 2), 6);
    }
}
