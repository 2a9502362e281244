use serde::{Deserialize, Serialize};

use super::{mask, CylinderSet, PiecewiseCylinderMap, ProductMeasure, Word};
use crate::error::{Error, Result};
use crate::rational::{q_ratio, Q};

/// Which group acts and how.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum ActionKind {
    /// `Z` acting by the dyadic adding machine `T`.
    AddingMachine,
    /// `Z^2`: two commuting odometers, on the odd and on the even coordinates.
    OdometerPair,
    /// `count` commuting involutions, `σ_j` flipping coordinate `j`.
    Involutions { count: u32 },
    /// `Z/2` flipping the first coordinate only.
    FirstBitSwap,
    /// Arbitrary generators given by their pieces, e.g. `"10->01"`.
    Custom { generators: Vec<CustomGenerator> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CustomGenerator {
    pub name: String,
    pub pieces: Vec<String>,
    /// Name of the inverse generator; the generator itself if omitted.
    #[serde(default)]
    pub inverse: Option<String>,
}

/// One element of the symmetric generating set.
#[derive(Clone, Debug)]
pub struct Generator {
    pub name: String,
    pub map: PiecewiseCylinderMap,
    /// Index of the inverse generator in the same list.
    pub inverse: usize,
}

/// A nonsingular action of a countable group, truncated at a piece depth.
#[derive(Clone, Debug)]
pub struct GammaAction {
    pub kind: ActionKind,
    pub truncation: u32,
    pub generators: Vec<Generator>,
}

/// Odometer carrying through the listed coordinates in order, every other
/// coordinate being a spectator.
pub fn odometer_pieces(positions: &[u32], truncation: u32) -> Vec<(Word, Word)> {
    let mut pieces = Vec::new();
    for (k, &stop) in positions.iter().enumerate() {
        if stop > truncation {
            break;
        }
        let carried = &positions[..k];
        let mut fixed = 1u64 << (stop - 1);
        let mut ones = 0u64;
        for &p in carried {
            fixed |= 1 << (p - 1);
            ones |= 1 << (p - 1);
        }
        let free: Vec<u32> = (1..stop).filter(|i| fixed >> (i - 1) & 1 == 0).collect();
        for a in 0..1u64 << free.len() {
            let mut spect = 0u64;
            for (j, &p) in free.iter().enumerate() {
                spect |= (a >> j & 1) << (p - 1);
            }
            let src = Word::new(spect | ones, stop);
            let tgt = Word::new(spect | 1 << (stop - 1), stop);
            pieces.push((src, tgt));
        }
    }
    pieces
}

/// `σ_j`: flip coordinate `j`.
pub fn flip_pieces(j: u32) -> Vec<(Word, Word)> {
    (0..1u64 << j)
        .map(|w| (Word::new(w, j), Word::new(w ^ 1 << (j - 1), j)))
        .collect()
}

fn parse_piece(s: &str) -> Result<(Word, Word)> {
    let (a, b) = s
        .split_once("->")
        .ok_or_else(|| Error::invalid(format!("piece {s:?} must look like 10->01")))?;
    Ok((Word::parse(a)?, Word::parse(b)?))
}

impl GammaAction {
    pub fn new(kind: ActionKind, truncation: u32) -> Result<Self> {
        if truncation == 0 || truncation > 40 {
            return Err(Error::invalid("truncation depth must lie in 1..=40"));
        }
        let pw = |pieces| PiecewiseCylinderMap::new(pieces, truncation);
        let gen = |name: &str, map, inverse| Generator {
            name: name.to_string(),
            map,
            inverse,
        };
        let generators = match &kind {
            ActionKind::AddingMachine => {
                let all: Vec<u32> = (1..=truncation).collect();
                let t = pw(odometer_pieces(&all, truncation))?;
                let ti = t.inverse();
                vec![gen("T", t, 1), gen("T^-1", ti, 0)]
            }
            ActionKind::OdometerPair => {
                let odd: Vec<u32> = (1..=truncation).step_by(2).collect();
                let even: Vec<u32> = (2..=truncation).step_by(2).collect();
                let a = pw(odometer_pieces(&odd, truncation))?;
                let b = pw(odometer_pieces(&even, truncation))?;
                let (ai, bi) = (a.inverse(), b.inverse());
                vec![gen("a", a, 1), gen("a^-1", ai, 0), gen("b", b, 3), gen("b^-1", bi, 2)]
            }
            ActionKind::Involutions { count } => {
                if *count > truncation.min(16) {
                    return Err(Error::SizeGuard(format!(
                        "{count} involutions need piece depth beyond {}",
                        truncation.min(16)
                    )));
                }
                (1..=*count)
                    .map(|j| Ok(gen(&format!("s{j}"), pw(flip_pieces(j))?, (j - 1) as usize)))
                    .collect::<Result<_>>()?
            }
            ActionKind::FirstBitSwap => vec![gen("s1", pw(flip_pieces(1))?, 0)],
            ActionKind::Custom { generators } => {
                let mut out = Vec::new();
                for g in generators {
                    let pieces = g.pieces.iter().map(|s| parse_piece(s)).collect::<Result<_>>()?;
                    let inv_name = g.inverse.as_deref().unwrap_or(&g.name);
                    let inverse = generators
                        .iter()
                        .position(|h| h.name == inv_name)
                        .ok_or_else(|| Error::invalid(format!("unknown inverse {inv_name}")))?;
                    out.push(gen(&g.name, pw(pieces)?, inverse));
                }
                out
            }
        };
        let action = GammaAction {
            kind,
            truncation,
            generators,
        };
        action.check_symmetric()?;
        Ok(action)
    }

    fn check_symmetric(&self) -> Result<()> {
        for (i, g) in self.generators.iter().enumerate() {
            let inv = self
                .generators
                .get(g.inverse)
                .ok_or_else(|| Error::invalid("inverse index out of range"))?;
            if inv.inverse != i {
                return Err(Error::invalid(format!("{} and {} are not mutually inverse", g.name, inv.name)));
            }
            let mut a = g.map.pieces.clone();
            let mut b = inv.map.inverse().pieces;
            a.sort();
            b.sort();
            if a != b {
                return Err(Error::invalid(format!("{} is not the inverse of {}", inv.name, g.name)));
            }
        }
        Ok(())
    }

    /// The first `n` generators; for involutions these are `σ_1..σ_n`.
    pub fn first(&self, n: usize) -> &[Generator] {
        &self.generators[..n.min(self.generators.len())]
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// Name of the acting group.
    pub fn presentation(&self) -> String {
        match &self.kind {
            ActionKind::AddingMachine => "Z".into(),
            ActionKind::OdometerPair => "Z^2".into(),
            ActionKind::Involutions { count } => format!("(Z/2)^{count}"),
            ActionKind::FirstBitSwap => "Z/2".into(),
            ActionKind::Custom { .. } => "custom".into(),
        }
    }
}

/// The overflow set `{x : (σx, x) ∉ S_l for some σ}` at a working depth.
#[derive(Clone, Debug)]
pub struct Overflow {
    /// Includes the remainder, so it is an upper bound for the true set.
    pub set: CylinderSet,
    pub measure: Q,
    /// Words on which some generator is not described by a piece of depth `<= D`.
    pub remainder: CylinderSet,
    pub remainder_measure: Q,
}

/// Default bound for the unresolved remainder at depth `d`, per generator:
/// twice the heaviest depth-`d` cylinder (`2^{1-d}` for the uniform measure).
pub fn default_remainder_bound(mu: &ProductMeasure, d: u32) -> Q {
    let heaviest = (1..=d).fold(Q::from_integer(1.into()), |acc, i| {
        let c = mu.coord(i);
        acc * q_ratio(c.zero.max(c.one) as u128, c.den() as u128)
    });
    heaviest * Q::from_integer(2.into())
}

pub fn orbit_overflow(
    mu: &ProductMeasure,
    gens: &[Generator],
    l: u32,
    d: u32,
    remainder_bound: Option<&Q>,
) -> Result<Overflow> {
    let table = mu.table(d)?;
    let mut set = CylinderSet::empty(d);
    let mut remainder = CylinderSet::empty(d);
    for g in gens {
        for (x, img) in g.map.image_table(d).into_iter().enumerate() {
            match img {
                None => {
                    remainder.insert(x as u64);
                    set.insert(x as u64);
                }
                Some(y) => {
                    if ((x as u64 ^ y as u64) & mask(d)) >> l != 0 {
                        set.insert(x as u64);
                    }
                }
            }
        }
    }
    let remainder_measure = table.of_set(&remainder);
    let bound = remainder_bound.cloned().unwrap_or_else(|| {
        default_remainder_bound(mu, d) * Q::from_integer((gens.len().max(1) as i64).into())
    });
    if remainder_measure > bound {
        return Err(Error::DepthExhausted(format!(
            "unresolved remainder {} at depth {d} exceeds {}",
            crate::rational::fmt_q(&remainder_measure),
            crate::rational::fmt_q(&bound)
        )));
    }
    Ok(Overflow {
        measure: table.of_set(&set),
        set,
        remainder,
        remainder_measure,
    })
}
