//! Line-oriented text format for circuits.
//!
//! ```text
//! # adds two 2-bit numbers
//! qubits 4
//! input 0101
//! gate H 1
//! gate CPHASE(1) 1 0
//! defgate ROOTX 1
//! 0.5+0.5j 0.5-0.5j
//! 0.5-0.5j 0.5+0.5j
//! endgate
//! gate ROOTX 3
//! ```
//!
//! Keywords and gate names are case-insensitive; `#` starts a comment.
//! `qubits N` must be the first directive. `input` takes a
//! most-significant-first bitstring of length N. `defgate NAME ARITY`
//! introduces a custom unitary as 2^ARITY rows of 2^ARITY complex entries
//! (`re`, `re+imj`, or `re-imj`), terminated by `endgate`. `gate` applies a
//! built-in (`H`, `X`, `CNOT`, `CCNOT`, `SWAP`, `PHASE(q)`, `CPHASE(q)`,
//! `PHASEDG(q)`, `CPHASEDG(q)`) or a defgate to the listed qubits; operand 0
//! is the gate's least-significant local bit.

use std::fmt;

use num_complex::Complex64;

use crate::basis::{BasisState, MAX_WIDTH};
use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::gate::{GateApplication, GateMatrix, MAX_ARITY};
use crate::gates;

/// A parse failure with its 1-based line number.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParseErrorKind {
    MissingQubits,
    DuplicateQubits,
    InvalidQubitCount(String),
    DuplicateInput,
    InvalidBitstring(String),
    InputLengthMismatch { expected: usize, got: usize },
    UnknownDirective(String),
    MissingToken(&'static str),
    TrailingTokens(String),
    UnknownGateName(String),
    MissingParameter(String),
    UnexpectedParameter(String),
    InvalidParameter(String),
    WrongOperandCount { gate: String, expected: usize, got: usize },
    InvalidOperand(String),
    RepeatedOperand(usize),
    QubitOutOfRange { qubit: usize, width: usize },
    InvalidGateName(String),
    DefgateNameTaken(String),
    InvalidArity(String),
    WrongEntryCount { expected: usize, got: usize },
    InvalidComplex(String),
    NonUnitaryDefgate { name: String, deviation: f64 },
    UnterminatedDefgate(String),
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ParseErrorKind::*;
        write!(f, "line {}: ", self.line)?;
        match &self.kind {
            MissingQubits => write!(f, "first directive must be 'qubits N'"),
            DuplicateQubits => write!(f, "duplicate 'qubits' directive"),
            InvalidQubitCount(t) => {
                write!(f, "invalid qubit count '{t}' (expected 1..={MAX_WIDTH})")
            }
            DuplicateInput => write!(f, "duplicate 'input' directive"),
            InvalidBitstring(t) => write!(f, "invalid bitstring '{t}'"),
            InputLengthMismatch { expected, got } => {
                write!(f, "input bitstring has {got} bits, circuit has {expected} qubits")
            }
            UnknownDirective(t) => write!(f, "unknown directive '{t}'"),
            MissingToken(what) => write!(f, "missing {what}"),
            TrailingTokens(t) => write!(f, "unexpected trailing tokens '{t}'"),
            UnknownGateName(t) => write!(f, "unknown gate '{t}'"),
            MissingParameter(t) => write!(f, "gate '{t}' requires a parameter"),
            UnexpectedParameter(t) => write!(f, "gate '{t}' takes no parameter"),
            InvalidParameter(t) => {
                write!(f, "invalid parameter '{t}' (expected a non-negative integer)")
            }
            WrongOperandCount { gate, expected, got } => {
                write!(f, "gate '{gate}' expects {expected} operands, got {got}")
            }
            InvalidOperand(t) => write!(f, "invalid qubit index '{t}'"),
            RepeatedOperand(q) => write!(f, "operand qubit {q} repeated"),
            QubitOutOfRange { qubit, width } => {
                write!(f, "qubit index {qubit} out of range for width {width}")
            }
            InvalidGateName(t) => write!(f, "invalid gate name '{t}'"),
            DefgateNameTaken(t) => write!(f, "gate name '{t}' already defined"),
            InvalidArity(t) => write!(f, "invalid arity '{t}' (expected 1..={MAX_ARITY})"),
            WrongEntryCount { expected, got } => {
                write!(f, "matrix row has {got} entries, expected {expected}")
            }
            InvalidComplex(t) => write!(f, "invalid complex literal '{t}'"),
            NonUnitaryDefgate { name, deviation } => {
                write!(f, "defgate '{name}' is not unitary (max deviation {deviation:.3e})")
            }
            UnterminatedDefgate(name) => {
                write!(f, "defgate '{name}' is missing rows or 'endgate'")
            }
        }
    }
}

impl std::error::Error for ParseError {}

type ParseResult<T> = std::result::Result<T, ParseError>;

fn err<T>(line: usize, kind: ParseErrorKind) -> ParseResult<T> {
    Err(ParseError { line, kind })
}

/// A parsed circuit file: the source text, the circuit, the custom gate
/// table, and the optional declared input.
#[derive(Clone, Debug)]
pub struct CircuitDocument {
    source: String,
    circuit: Circuit,
    defgates: Vec<(String, GateMatrix)>,
    default_input: Option<BasisState>,
}

impl CircuitDocument {
    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    pub fn defgates(&self) -> &[(String, GateMatrix)] {
        &self.defgates
    }

    pub fn default_input(&self) -> Option<&BasisState> {
        self.default_input.as_ref()
    }

    /// Render the document back to text: header, input, defgate blocks,
    /// then one line per gate application.
    pub fn serialize(&self) -> Result<String> {
        let mut out = format!("qubits {}\n", self.circuit.width());
        if let Some(input) = &self.default_input {
            out.push_str(&format!("input {input}\n"));
        }
        for (name, gate) in &self.defgates {
            out.push_str(&format_defgate(name, gate));
        }
        for app in self.circuit.gates() {
            out.push_str(&gate_line(app, &self.defgates)?);
        }
        Ok(out)
    }
}

const KEYWORDS: [&str; 5] = ["QUBITS", "INPUT", "GATE", "DEFGATE", "ENDGATE"];
const BUILTIN_BASES: [&str; 9] = [
    "H", "X", "CNOT", "CCNOT", "SWAP", "PHASE", "CPHASE", "PHASEDG", "CPHASEDG",
];

/// Strip comments and whitespace; `None` when nothing remains.
fn significant(line: &str) -> Option<&str> {
    let body = match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    };
    let trimmed = body.trim();
    (!trimmed.is_empty()).then_some(trimmed)
}

/// Parse `re`, `re+imj`, `re-imj`, or a bare imaginary `imj`. Rejects
/// non-finite values.
fn parse_complex(token: &str) -> Option<Complex64> {
    let (body, imaginary) = match token.strip_suffix(['j', 'J']) {
        Some(b) => (b, true),
        None => (token, false),
    };
    if !imaginary {
        let re: f64 = body.parse().ok()?;
        return re.is_finite().then(|| Complex64::new(re, 0.0));
    }
    // split at the sign between the parts, ignoring a leading sign and
    // exponent signs
    let bytes = body.as_bytes();
    let mut split = None;
    for i in (1..bytes.len()).rev() {
        if matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'e' | b'E') {
            split = Some(i);
            break;
        }
    }
    let (re, im): (f64, f64) = match split {
        Some(i) => (body[..i].parse().ok()?, body[i..].parse().ok()?),
        None => (0.0, body.parse().ok()?),
    };
    (re.is_finite() && im.is_finite()).then(|| Complex64::new(re, im))
}

fn format_complex(value: Complex64) -> String {
    if value.im == 0.0 {
        format!("{}", value.re)
    } else if value.im < 0.0 {
        format!("{}-{}j", value.re, -value.im)
    } else {
        format!("{}+{}j", value.re, value.im)
    }
}

fn format_defgate(name: &str, gate: &GateMatrix) -> String {
    let dim = gate.dim();
    let mut out = format!("defgate {} {}\n", name, gate.arity());
    for row in 0..dim {
        let cells: Vec<String> = (0..dim).map(|col| format_complex(gate.entry(row, col))).collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    out.push_str("endgate\n");
    out
}

/// Split `NAME` / `NAME(PARAM)` into a canonical uppercase base and the raw
/// parameter text.
fn split_gate_spec(spec: &str) -> std::result::Result<(String, Option<&str>), ParseErrorKind> {
    match spec.find('(') {
        Some(open) => {
            if !spec.ends_with(')') || open == 0 {
                return Err(ParseErrorKind::InvalidGateName(spec.to_string()));
            }
            let base = spec[..open].to_ascii_uppercase();
            let param = &spec[open + 1..spec.len() - 1];
            Ok((base, Some(param)))
        }
        None => Ok((spec.to_ascii_uppercase(), None)),
    }
}

/// Construct one of the built-in gates from a canonical base name and
/// parameter, or `None` when the base is not built-in.
fn builtin_gate(base: &str, param: Option<&str>) -> std::result::Result<Option<GateMatrix>, ParseErrorKind> {
    let parameterless = |gate: GateMatrix| match param {
        Some(_) => Err(ParseErrorKind::UnexpectedParameter(base.to_string())),
        None => Ok(Some(gate)),
    };
    let phase_family = |make: fn(u32) -> GateMatrix| match param {
        None => Err(ParseErrorKind::MissingParameter(base.to_string())),
        Some(text) => {
            let q: u32 = text
                .trim()
                .parse()
                .map_err(|_| ParseErrorKind::InvalidParameter(text.to_string()))?;
            Ok(Some(make(q)))
        }
    };
    match base {
        "H" => parameterless(gates::hadamard()),
        "X" => parameterless(gates::pauli_x()),
        "CNOT" => parameterless(gates::cnot()),
        "CCNOT" => parameterless(gates::ccnot()),
        "SWAP" => parameterless(gates::swap()),
        "PHASE" => phase_family(gates::phase),
        "CPHASE" => phase_family(gates::cphase),
        "PHASEDG" => phase_family(gates::phase_dg),
        "CPHASEDG" => phase_family(gates::cphase_dg),
        _ => Ok(None),
    }
}

/// Parse a circuit document. Every failure carries a line number; no input
/// text panics.
pub fn parse_circuit(text: &str) -> ParseResult<CircuitDocument> {
    let raw: Vec<&str> = text.lines().collect();
    let mut pos = 0usize;
    let mut circuit: Option<Circuit> = None;
    let mut default_input: Option<BasisState> = None;
    let mut defgates: Vec<(String, GateMatrix)> = Vec::new();

    while pos < raw.len() {
        let lineno = pos + 1;
        let Some(content) = significant(raw[pos]) else {
            pos += 1;
            continue;
        };
        pos += 1;

        let mut tokens = content.split_whitespace();
        let keyword = tokens.next().expect("significant line has a token").to_ascii_lowercase();

        if keyword == "qubits" {
            if circuit.is_some() {
                return err(lineno, ParseErrorKind::DuplicateQubits);
            }
            let count_tok = match tokens.next() {
                Some(t) => t,
                None => return err(lineno, ParseErrorKind::MissingToken("qubit count")),
            };
            if let Some(rest) = tokens.next() {
                return err(lineno, ParseErrorKind::TrailingTokens(rest.to_string()));
            }
            let width: usize = match count_tok.parse() {
                Ok(n) if n >= 1 && n <= MAX_WIDTH => n,
                _ => return err(lineno, ParseErrorKind::InvalidQubitCount(count_tok.to_string())),
            };
            circuit = Some(Circuit::new(width).expect("width validated"));
            continue;
        }

        let Some(circuit_ref) = circuit.as_mut() else {
            return err(lineno, ParseErrorKind::MissingQubits);
        };
        let width = circuit_ref.width();

        match keyword.as_str() {
            "input" => {
                let bits_tok = match tokens.next() {
                    Some(t) => t,
                    None => return err(lineno, ParseErrorKind::MissingToken("input bitstring")),
                };
                if let Some(rest) = tokens.next() {
                    return err(lineno, ParseErrorKind::TrailingTokens(rest.to_string()));
                }
                if default_input.is_some() {
                    return err(lineno, ParseErrorKind::DuplicateInput);
                }
                if bits_tok.chars().any(|c| c != '0' && c != '1') {
                    return err(lineno, ParseErrorKind::InvalidBitstring(bits_tok.to_string()));
                }
                if bits_tok.len() != width {
                    return err(
                        lineno,
                        ParseErrorKind::InputLengthMismatch {
                            expected: width,
                            got: bits_tok.len(),
                        },
                    );
                }
                default_input =
                    Some(BasisState::from_bitstring(bits_tok).expect("validated bitstring"));
            }
            "defgate" => {
                let name_tok = match tokens.next() {
                    Some(t) => t,
                    None => return err(lineno, ParseErrorKind::MissingToken("defgate name")),
                };
                let arity_tok = match tokens.next() {
                    Some(t) => t,
                    None => return err(lineno, ParseErrorKind::MissingToken("defgate arity")),
                };
                if let Some(rest) = tokens.next() {
                    return err(lineno, ParseErrorKind::TrailingTokens(rest.to_string()));
                }
                let valid_name = name_tok
                    .chars()
                    .all(|c| c.is_ascii_alphanumeric() || c == '_')
                    && name_tok.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_');
                if !valid_name {
                    return err(lineno, ParseErrorKind::InvalidGateName(name_tok.to_string()));
                }
                let name = name_tok.to_ascii_uppercase();
                if KEYWORDS.contains(&name.as_str())
                    || BUILTIN_BASES.contains(&name.as_str())
                    || defgates.iter().any(|(n, _)| n == &name)
                {
                    return err(lineno, ParseErrorKind::DefgateNameTaken(name_tok.to_string()));
                }
                let arity: usize = match arity_tok.parse() {
                    Ok(a) if (1..=MAX_ARITY).contains(&a) => a,
                    _ => return err(lineno, ParseErrorKind::InvalidArity(arity_tok.to_string())),
                };
                let dim = 1usize << arity;

                let mut entries: Vec<Complex64> = Vec::with_capacity(dim * dim);
                let mut rows = 0usize;
                while rows < dim {
                    let row_lineno;
                    let row_content = loop {
                        if pos >= raw.len() {
                            return err(lineno, ParseErrorKind::UnterminatedDefgate(name));
                        }
                        let candidate = significant(raw[pos]);
                        pos += 1;
                        if let Some(c) = candidate {
                            row_lineno = pos; // already advanced: pos is 1-based lineno
                            break c;
                        }
                    };
                    if row_content.eq_ignore_ascii_case("endgate") {
                        return err(lineno, ParseErrorKind::UnterminatedDefgate(name));
                    }
                    let cells: Vec<&str> = row_content.split_whitespace().collect();
                    if cells.len() != dim {
                        return err(
                            row_lineno,
                            ParseErrorKind::WrongEntryCount {
                                expected: dim,
                                got: cells.len(),
                            },
                        );
                    }
                    for cell in cells {
                        match parse_complex(cell) {
                            Some(v) => entries.push(v),
                            None => {
                                return err(row_lineno, ParseErrorKind::InvalidComplex(cell.to_string()))
                            }
                        }
                    }
                    rows += 1;
                }
                // consume the endgate terminator
                let terminator = loop {
                    if pos >= raw.len() {
                        return err(lineno, ParseErrorKind::UnterminatedDefgate(name));
                    }
                    let candidate = significant(raw[pos]);
                    pos += 1;
                    if let Some(c) = candidate {
                        break c;
                    }
                };
                if !terminator.eq_ignore_ascii_case("endgate") {
                    return err(lineno, ParseErrorKind::UnterminatedDefgate(name));
                }

                match GateMatrix::new(name.clone(), arity, entries) {
                    Ok(gate) => defgates.push((name, gate)),
                    Err(Error::NotUnitary { deviation, .. }) => {
                        return err(
                            lineno,
                            ParseErrorKind::NonUnitaryDefgate { name, deviation },
                        )
                    }
                    Err(_) => {
                        return err(lineno, ParseErrorKind::InvalidComplex(String::new()));
                    }
                }
            }
            "gate" => {
                let spec_tok = match tokens.next() {
                    Some(t) => t,
                    None => return err(lineno, ParseErrorKind::MissingToken("gate name")),
                };
                let (base, param) = match split_gate_spec(spec_tok) {
                    Ok(pair) => pair,
                    Err(kind) => return err(lineno, kind),
                };
                let gate = match builtin_gate(&base, param) {
                    Ok(Some(g)) => g,
                    Ok(None) => match defgates.iter().find(|(n, _)| n == &base) {
                        Some((_, g)) => {
                            if param.is_some() {
                                return err(lineno, ParseErrorKind::UnexpectedParameter(base));
                            }
                            g.clone()
                        }
                        None => {
                            return err(lineno, ParseErrorKind::UnknownGateName(spec_tok.to_string()))
                        }
                    },
                    Err(kind) => return err(lineno, kind),
                };

                let mut operands = Vec::with_capacity(gate.arity());
                for tok in tokens {
                    let q: usize = match tok.parse() {
                        Ok(q) => q,
                        Err(_) => return err(lineno, ParseErrorKind::InvalidOperand(tok.to_string())),
                    };
                    if q >= width {
                        return err(lineno, ParseErrorKind::QubitOutOfRange { qubit: q, width });
                    }
                    if operands.contains(&q) {
                        return err(lineno, ParseErrorKind::RepeatedOperand(q));
                    }
                    operands.push(q);
                }
                if operands.len() != gate.arity() {
                    return err(
                        lineno,
                        ParseErrorKind::WrongOperandCount {
                            gate: spec_tok.to_string(),
                            expected: gate.arity(),
                            got: operands.len(),
                        },
                    );
                }
                let app = GateApplication::new(gate, operands).expect("operands validated");
                circuit_ref.push(app).expect("width validated");
            }
            "endgate" => {
                return err(lineno, ParseErrorKind::UnknownDirective("endgate".to_string()));
            }
            other => {
                return err(lineno, ParseErrorKind::UnknownDirective(other.to_string()));
            }
        }
    }

    let Some(circuit) = circuit else {
        return err(raw.len().max(1), ParseErrorKind::MissingQubits);
    };
    Ok(CircuitDocument {
        source: text.to_string(),
        circuit,
        defgates,
        default_input,
    })
}

fn gate_line(app: &GateApplication, defgates: &[(String, GateMatrix)]) -> Result<String> {
    let name = app.gate().name();
    let resolvable = match canonical_builtin(name) {
        Some(canon) => {
            canon.arity() == app.gate().arity() && app.gate().max_entry_distance(&canon) <= 1e-12
        }
        None => defgates.iter().any(|(n, g)| {
            n == name && g.arity() == app.gate().arity() && app.gate().max_entry_distance(g) <= 1e-12
        }),
    };
    if !resolvable {
        return Err(Error::UnserializableGate(name.to_string()));
    }
    let ops: Vec<String> = app.operands().iter().map(|q| q.to_string()).collect();
    Ok(format!("gate {} {}\n", name, ops.join(" ")))
}

/// The built-in gate a canonical name denotes, when it does.
fn canonical_builtin(name: &str) -> Option<GateMatrix> {
    let (base, param) = split_gate_spec(name).ok()?;
    builtin_gate(&base, param).ok().flatten()
}

/// Render a bare circuit whose gates are all named built-ins. Custom
/// matrices need a [`CircuitDocument`] with a registered defgate table.
pub fn serialize_circuit(circuit: &Circuit) -> Result<String> {
    let mut out = format!("qubits {}\n", circuit.width());
    for app in circuit.gates() {
        out.push_str(&gate_line(app, &[])?);
    }
    Ok(out)
}
