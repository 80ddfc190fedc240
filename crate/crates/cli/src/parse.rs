//! Flag value parsers: complex scalars written "a+bi", "a-bi", "a" or "bi",
//! and parameter lists written "v1,v2:3,..." where ":m" repeats an entry.

use wfunc::{Complex, ParamList};

fn real(s: &str) -> Result<f64, String> {
    s.parse::<f64>().map_err(|_| format!("cannot read {s:?} as a number"))
}

pub fn complex(s: &str) -> Result<Complex, String> {
    let s = s.trim();
    if s.is_empty() || s.contains(char::is_whitespace) {
        return Err(format!("complex value {s:?} must be non-empty and contain no spaces"));
    }
    let Some(body) = s.strip_suffix('i') else {
        return Ok(Complex::new(real(s)?, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let imag = |t: &str| match t {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        t => real(t),
    };
    match split {
        Some(k) => Ok(Complex::new(real(&body[..k])?, imag(&body[k..])?)),
        None => Ok(Complex::new(0.0, imag(body)?)),
    }
}

pub fn param_list(s: &str) -> Result<ParamList, String> {
    let mut list = ParamList::new();
    for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let (value, mult) = match item.rsplit_once(':') {
            Some((v, m)) => (
                v,
                m.parse::<u32>().map_err(|_| format!("bad multiplicity in {item:?}"))?,
            ),
            None => (item, 1),
        };
        list.push(complex(value)?, mult);
    }
    Ok(list)
}
