//! Exact rational numbers used for every graph-market quantity.

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::Zero;

use crate::Error;

/// Canonical rational; the denominator is always positive.
pub type Rat = Ratio<i128>;

pub fn rat(num: i128, den: i128) -> Rat {
    Rat::new(num, den)
}

pub fn int(n: i128) -> Rat {
    Rat::from_integer(n)
}

/// Parses `"p/q"`, `"p"` or a plain decimal such as `"0.49"` into an exact rational.
pub fn parse_rat(s: &str) -> Result<Rat, Error> {
    let t = s.trim();
    let bad = || Error::Input(format!("not a rational: {s:?}"));
    if let Some((p, q)) = t.split_once('/') {
        let p: i128 = p.trim().parse().map_err(|_| bad())?;
        let q: i128 = q.trim().parse().map_err(|_| bad())?;
        if q == 0 {
            return Err(Error::Input(format!("zero denominator in {s:?}")));
        }
        return Ok(Rat::new(p, q));
    }
    if let Some((whole, frac)) = t.split_once('.') {
        if frac.is_empty() || frac.len() > 30 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = whole.starts_with('-');
        let w: i128 = match whole.trim_start_matches(['-', '+']) {
            "" => 0,
            d => d.parse().map_err(|_| bad())?,
        };
        let den = 10i128.pow(frac.len() as u32);
        let f: i128 = frac.parse().map_err(|_| bad())?;
        let mag = Rat::new(w * den + f, den);
        return Ok(if neg { -mag } else { mag });
    }
    t.parse::<i128>().map(int).map_err(|_| bad())
}

/// Always renders as `p/q`, including integers (`3/1`).
pub fn fmt_rat(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn to_f64(r: &Rat) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Least common multiple of the denominators, or `None` on overflow.
pub fn common_denominator<'a>(vals: impl IntoIterator<Item = &'a Rat>) -> Option<i128> {
    let mut l: i128 = 1;
    for v in vals {
        let d = *v.denom();
        let g = l.gcd(&d);
        l = (l / g).checked_mul(d)?;
    }
    Some(l)
}

/// `v * scale` as an integer; `scale` must be a multiple of the denominator.
pub fn scaled(v: &Rat, scale: i128) -> Option<i128> {
    v.numer().checked_mul(scale / v.denom())
}

/// Harmonic number H_k.
pub fn harmonic(k: usize) -> Rat {
    (1..=k as i128).fold(Rat::zero(), |acc, i| acc + Rat::new(1, i))
}
