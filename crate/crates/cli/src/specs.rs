//! Parsers for state, observable, complex-number and coefficient specs.

use jointeig::hilbert::{pauli, Axis};
use jointeig::{BellLabel, Ket, Observable, C64};

/// A parse failure with the character position where it happened.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("invalid {what} '{input}' at position {position}: {message}")]
pub struct SpecError {
    pub what: &'static str,
    pub input: String,
    pub position: usize,
    pub message: String,
}

fn fail(what: &'static str, input: &str, position: usize, message: impl Into<String>) -> SpecError {
    SpecError { what, input: input.to_string(), position, message: message.into() }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateSpec {
    pub text: String,
    pub ket: Ket,
    /// Norm of the amplitudes as typed, before normalization.
    pub input_norm: f64,
}

/// `singlet`, `psi-`, `psi+`, `phi-`, `phi+`, `basis:+-+` or `amps:a0,a1,...`.
pub fn parse_state(s: &str) -> Result<StateSpec, SpecError> {
    const WHAT: &str = "state spec";
    if let Some(label) = BellLabel::parse(s) {
        return Ok(StateSpec { text: s.into(), ket: label.state(), input_norm: 1.0 });
    }
    if let Some(rest) = s.strip_prefix("basis:") {
        if rest.is_empty() {
            return Err(fail(WHAT, s, 6, "expected at least one '+' or '-'"));
        }
        if let Some((i, ch)) = rest.char_indices().find(|(_, ch)| *ch != '+' && *ch != '-') {
            return Err(fail(WHAT, s, 6 + i, format!("expected '+' or '-', found '{ch}'")));
        }
        if rest.len() > 3 {
            return Err(fail(WHAT, s, 9, "at most three particles"));
        }
        let ket = Ket::basis(rest).map_err(|e| fail(WHAT, s, 6, e.to_string()))?;
        return Ok(StateSpec { text: s.into(), ket, input_norm: 1.0 });
    }
    if let Some(rest) = s.strip_prefix("amps:") {
        let mut amps = Vec::new();
        let mut offset = 5;
        for part in rest.split(',') {
            let z = parse_complex(part).map_err(|e| fail(WHAT, s, offset + e.position, e.message))?;
            amps.push(z);
            offset += part.len() + 1;
        }
        if !matches!(amps.len(), 2 | 4 | 8) {
            return Err(fail(WHAT, s, 5, format!("expected 2, 4 or 8 amplitudes, found {}", amps.len())));
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let ket = Ket::normalized(amps).map_err(|e| fail(WHAT, s, 5, e.to_string()))?;
        return Ok(StateSpec { text: s.into(), ket, input_norm: norm });
    }
    Err(fail(WHAT, s, 0, "expected singlet, psi-, psi+, phi-, phi+, basis:<signs> or amps:<list>"))
}

/// A real or complex number: `0.6`, `-1e-3`, `0.8i`, `-i`, `0.6-0.8i`.
pub fn parse_complex(s: &str) -> Result<C64, SpecError> {
    const WHAT: &str = "complex number";
    let t = s.trim();
    let lead = s.len() - s.trim_start().len();
    if t.is_empty() {
        return Err(fail(WHAT, s, 0, "empty"));
    }
    let Some(body) = t.strip_suffix('i') else {
        return t.parse::<f64>().map(|re| C64::new(re, 0.0)).map_err(|_| fail(WHAT, s, lead, "not a number"));
    };
    // split at the last sign that is not the leading one and not part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re_txt, im_txt) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("", body),
    };
    let im = match im_txt {
        "" | "+" => 1.0,
        "-" => -1.0,
        x => x.parse::<f64>().map_err(|_| fail(WHAT, s, lead + re_txt.len(), "bad imaginary part"))?,
    };
    let re = if re_txt.is_empty() {
        0.0
    } else {
        re_txt.parse::<f64>().map_err(|_| fail(WHAT, s, lead, "bad real part"))?
    };
    Ok(C64::new(re, im))
}

#[derive(Debug, Clone)]
pub struct ObservableSpec {
    pub text: String,
    pub left: Observable,
    pub right: Observable,
}

/// Two axis letters, e.g. `zz`, `xz`, `yy`.
pub fn parse_observable(s: &str) -> Result<ObservableSpec, SpecError> {
    const WHAT: &str = "observable spec";
    let chars: Vec<char> = s.chars().collect();
    if chars.len() != 2 {
        return Err(fail(WHAT, s, chars.len().min(2), "expected two axis letters from x, y, z"));
    }
    let axis = |i: usize| {
        Axis::from_letter(chars[i].to_ascii_lowercase())
            .ok_or_else(|| fail(WHAT, s, i, format!("expected x, y or z, found '{}'", chars[i])))
    };
    Ok(ObservableSpec { text: s.to_ascii_lowercase(), left: pauli(axis(0)?), right: pauli(axis(1)?) })
}

/// `i,j` with zero-based particle indices.
pub fn parse_pair(s: &str) -> Result<(usize, usize), SpecError> {
    const WHAT: &str = "particle pair";
    let (a, b) = s.split_once(',').ok_or_else(|| fail(WHAT, s, s.len(), "expected 'i,j'"))?;
    let i = a.trim().parse().map_err(|_| fail(WHAT, s, 0, "not an index"))?;
    let j = b.trim().parse().map_err(|_| fail(WHAT, s, a.len() + 1, "not an index"))?;
    Ok((i, j))
}

/// `cx,cz` coefficients of the Bell-operator combination.
pub fn parse_coefficients(s: &str) -> Result<(f64, f64), SpecError> {
    const WHAT: &str = "coefficient pair";
    let (a, b) = s.split_once(',').ok_or_else(|| fail(WHAT, s, s.len(), "expected 'cx,cz'"))?;
    let cx = a.trim().parse().map_err(|_| fail(WHAT, s, 0, "not a number"))?;
    let cz = b.trim().parse().map_err(|_| fail(WHAT, s, a.len() + 1, "not a number"))?;
    Ok((cx, cz))
}
