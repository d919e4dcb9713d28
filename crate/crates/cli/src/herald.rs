use std::fmt;
use std::str::FromStr;

use gkp_channel::loss::HeraldOutcome;
use num_complex::Complex64;

/// A loss-mode outcome as written on the command line:
/// `none`, `het:RE,IM`, `photon:J` or `hom:X,PHI`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HeraldSpec(pub HeraldOutcome);

impl HeraldSpec {
    pub fn outcome(&self) -> HeraldOutcome {
        self.0
    }
}

fn pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected two comma-separated numbers, got `{s}`"))?;
    let parse = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}"));
    Ok((parse(a)?, parse(b)?))
}

impl FromStr for HeraldSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let outcome = match kind.trim().to_ascii_lowercase().as_str() {
            "none" if rest.is_empty() => HeraldOutcome::None,
            "het" | "heterodyne" => {
                let (re, im) = pair(rest)?;
                HeraldOutcome::Heterodyne(Complex64::new(re, im))
            }
            "photon" | "photons" => {
                let j = rest.trim().parse::<usize>().map_err(|e| format!("photon count `{rest}`: {e}"))?;
                HeraldOutcome::PhotonCount(j)
            }
            "hom" | "homodyne" => {
                let (x, phi) = pair(rest)?;
                HeraldOutcome::Homodyne { x, phi }
            }
            _ => return Err(format!("unknown herald `{s}`; use none, het:RE,IM, photon:J or hom:X,PHI")),
        };
        Ok(Self(outcome))
    }
}

impl fmt::Display for HeraldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            HeraldOutcome::None => write!(f, "none"),
            HeraldOutcome::Heterodyne(mu) => write!(f, "het:{},{}", mu.re, mu.im),
            HeraldOutcome::PhotonCount(j) => write!(f, "photon:{j}"),
            HeraldOutcome::Homodyne { x, phi } => write!(f, "hom:{x},{phi}"),
        }
    }
}

/// `LO:HI:N`, inclusive of both ends.
#[derive(Clone, Debug, PartialEq)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Range {
    pub fn values(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.lo];
        }
        (0..self.n)
            .map(|i| {
                if i + 1 == self.n {
                    self.hi
                } else {
                    self.lo + (self.hi - self.lo) * i as f64 / (self.n - 1) as f64
                }
            })
            .collect()
    }
}

impl FromStr for Range {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, n] = parts.as_slice() else {
            return Err(format!("expected LO:HI:N, got `{s}`"));
        };
        let lo: f64 = lo.parse().map_err(|e| format!("`{lo}`: {e}"))?;
        let hi: f64 = hi.parse().map_err(|e| format!("`{hi}`: {e}"))?;
        let n: usize = n.parse().map_err(|e| format!("`{n}`: {e}"))?;
        if n == 0 {
            return Err("a range needs at least one point".into());
        }
        if !(lo <= hi) {
            return Err(format!("range start {lo} exceeds end {hi}"));
        }
        Ok(Self { lo, hi, n })
    }
}

/// `MQ,MP`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SyndromeArg(pub f64, pub f64);

impl FromStr for SyndromeArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (q, p) = pair(s)?;
        Ok(Self(q, p))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heralds_round_trip() {
        for s in ["none", "het:0.7,-0.2", "photon:2", "hom:0.5,1.5"] {
            let h: HeraldSpec = s.parse().unwrap();
            assert_eq!(h.to_string(), s);
        }
        assert!("photon:-1".parse::<HeraldSpec>().is_err());
        assert!("het:1".parse::<HeraldSpec>().is_err());
        assert!("laser".parse::<HeraldSpec>().is_err());
    }

    #[test]
    fn ranges_hit_both_ends() {
        let r: Range = "0.02:0.5:20".parse().unwrap();
        let v = r.values();
        assert_eq!(v.len(), 20);
        assert_eq!((v[0], v[19]), (0.02, 0.5));
        assert_eq!("0.3:0.3:1".parse::<Range>().unwrap().values(), vec![0.3]);
        assert!("1:0:3".parse::<Range>().is_err());
        assert!("0:1:0".parse::<Range>().is_err());
    }
}
