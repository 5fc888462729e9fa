// Copyright 2026 The slitport Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{Amplitude, Angle, AtomState, Command, CommandKind, ConfigEntry, Diagnostic, ProtocolScript, Truncation};
use crate::oracle::CheckpointId;
use crate::protocol::{AtomKind, DetectTarget};

type LineResult<T> = Result<T, String>;

/// Parse a script, failing with every line-numbered error found.
pub fn parse(text: &str) -> Result<ProtocolScript, Vec<Diagnostic>>
{
    let (script, errors) = parse_lenient(text);
    if errors.is_empty() { Ok(script) } else { Err(errors) }
}

/// Parse every well-formed line and collect diagnostics for the rest.
pub fn parse_lenient(text: &str) -> (ProtocolScript, Vec<Diagnostic>)
{
    let mut commands = Vec::new();
    let mut errors = Vec::new();
    for (i, raw) in text.lines().enumerate()
    {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty()
        {
            continue;
        }
        match parse_line(body)
        {
            Ok(kind) => commands.push(Command { line, kind }),
            Err(message) => errors.push(Diagnostic { line, message }),
        }
    }
    (ProtocolScript { commands }, errors)
}

fn ident(tok: &str, what: &str) -> LineResult<String>
{
    let mut chars = tok.chars();
    let ok = matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_');
    if ok { Ok(tok.to_owned()) } else { Err(format!("invalid {what} '{tok}'")) }
}

fn real(tok: &str) -> LineResult<f64>
{
    match tok.parse::<f64>()
    {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(format!("invalid number '{tok}'")),
    }
}

/// Parse a complex literal: `re`, `re+imi`, `re-imi` or `imi`.
pub fn complex(tok: &str) -> LineResult<Complex64>
{
    let err = || format!("invalid complex number '{tok}'");
    let Some(body) = tok.strip_suffix('i')
    else
    {
        return real(tok).map(|x| Complex64::new(x, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len()).rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split
    {
        Some(k) => (real(&body[..k]).map_err(|_| err())?, &body[k..]),
        None => (0.0, body),
    };
    let im = match im
    {
        "" | "+" => 1.0,
        "-" => -1.0,
        s => real(s).map_err(|_| err())?,
    };
    Ok(Complex64::new(re, im))
}

/// Parse an angle: a number, `pi`, `pi/N` or `$gt`.
pub fn angle(tok: &str) -> LineResult<Angle>
{
    if tok == "pi"
    {
        return Ok(Angle::Pi);
    }
    if tok == "$gt"
    {
        return Ok(Angle::Gt);
    }
    if let Some(n) = tok.strip_prefix("pi/")
    {
        return match n.parse::<u32>()
        {
            Ok(n) if n > 0 => Ok(Angle::PiOver(n)),
            _ => Err(format!("invalid angle '{tok}'")),
        };
    }
    real(tok).map(Angle::Number).map_err(|_| format!("invalid angle '{tok}'"))
}

fn amplitude(tok: &str) -> LineResult<Amplitude>
{
    if tok == "$alpha" { Ok(Amplitude::Alpha) } else { complex(tok).map(Amplitude::Value) }
}

fn count(tok: &str) -> LineResult<usize>
{
    tok.parse::<usize>().map_err(|_| format!("invalid integer '{tok}'"))
}

fn truncation(tok: &str) -> LineResult<Truncation>
{
    if tok == "$truncation" { Ok(Truncation::Param) } else { count(tok).map(Truncation::Value) }
}

fn expect_kw(tok: Option<&&str>, kw: &str) -> LineResult<()>
{
    match tok
    {
        Some(t) if *t == kw => Ok(()),
        Some(t) => Err(format!("expected '{kw}', found '{t}'")),
        None => Err(format!("expected '{kw}'")),
    }
}

fn arity(toks: &[&str], n: usize, usage: &str) -> LineResult<()>
{
    if toks.len() == n { Ok(()) } else { Err(format!("usage: {usage}")) }
}

fn matrix(text: &str) -> LineResult<DMatrix<Complex64>>
{
    let inner = text.trim().strip_prefix('[').and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| "matrix literal must be enclosed in [ ]".to_owned())?;
    let mut rows: Vec<Vec<Complex64>> = Vec::new();
    for r in inner.split(';')
    {
        let row = r.split_whitespace().map(complex).collect::<LineResult<Vec<_>>>()?;
        if row.is_empty()
        {
            return Err("empty matrix row".to_owned());
        }
        if let Some(first) = rows.first()
        {
            if first.len() != row.len()
            {
                return Err("matrix rows differ in length".to_owned());
            }
        }
        rows.push(row);
    }
    let (nr, nc) = (rows.len(), rows[0].len());
    Ok(DMatrix::from_row_iterator(nr, nc, rows.into_iter().flatten()))
}

fn parse_line(body: &str) -> LineResult<CommandKind>
{
    let toks: Vec<&str> = body.split_whitespace().collect();
    let kw = toks[0];
    match kw
    {
        "config" =>
        {
            arity(&toks, 3, "config (alpha|truncation|gt|cb|cc) value")?;
            let v = toks[2];
            let e = match toks[1]
            {
                "alpha" => ConfigEntry::Alpha(real(v)?),
                "truncation" => ConfigEntry::Truncation(count(v)?),
                "gt" => match angle(v)?
                {
                    Angle::Gt => return Err("config gt cannot refer to itself".to_owned()),
                    a => ConfigEntry::Gt(a),
                },
                "cb" => ConfigEntry::Cb(complex(v)?),
                "cc" => ConfigEntry::Cc(complex(v)?),
                k => return Err(format!("unknown config key '{k}'")),
            };
            Ok(CommandKind::Config(e))
        }
        "cavity" =>
        {
            let usage = "cavity id alpha number [truncation int]";
            if toks.len() != 4 && toks.len() != 6
            {
                return Err(format!("usage: {usage}"));
            }
            expect_kw(toks.get(2), "alpha")?;
            let trunc = if toks.len() == 6
            {
                expect_kw(toks.get(4), "truncation")?;
                Some(truncation(toks[5])?)
            }
            else
            {
                None
            };
            Ok(CommandKind::Cavity { id: ident(toks[1], "cavity id")?, alpha: amplitude(toks[3])?, truncation: trunc })
        }
        "atom" =>
        {
            arity(&toks, 5, "atom id (lambda3|qubit2) state label")?;
            let kind = match toks[2]
            {
                "lambda3" => AtomKind::Lambda3,
                "qubit2" => AtomKind::Qubit2,
                k => return Err(format!("unknown atom kind '{k}'")),
            };
            expect_kw(toks.get(3), "state")?;
            let state = if toks[4] == "input" { AtomState::Input } else { AtomState::Label(ident(toks[4], "label")?) };
            Ok(CommandKind::Atom { id: ident(toks[1], "atom id")?, kind, state })
        }
        "screen" =>
        {
            if toks.len() < 3
            {
                return Err("usage: screen id label+".to_owned());
            }
            let slits = toks[2..].iter().map(|t| ident(t, "slit label")).collect::<LineResult<Vec<_>>>()?;
            Ok(CommandKind::Screen { id: ident(toks[1], "screen id")?, slits })
        }
        "bind" =>
        {
            arity(&toks, 4, "bind screen slit cavity")?;
            Ok(CommandKind::Bind {
                screen: ident(toks[1], "screen id")?,
                slit: ident(toks[2], "slit label")?,
                cavity: ident(toks[3], "cavity id")?,
            })
        }
        "kernel" =>
        {
            let usage = "kernel id from-screen to-screen [row; row]";
            let open = body.find('[').ok_or_else(|| format!("usage: {usage}"))?;
            let head: Vec<&str> = body[..open].split_whitespace().collect();
            arity(&head, 4, usage)?;
            Ok(CommandKind::Kernel {
                id: ident(head[1], "kernel id")?,
                from: ident(head[2], "screen id")?,
                to: ident(head[3], "screen id")?,
                matrix: matrix(&body[open..])?,
            })
        }
        "split" =>
        {
            arity(&toks, 3, "split atom screen")?;
            Ok(CommandKind::Split { atom: ident(toks[1], "atom id")?, screen: ident(toks[2], "screen id")? })
        }
        "pass" =>
        {
            arity(&toks, 5, "pass atom screen phi angle")?;
            expect_kw(toks.get(3), "phi")?;
            Ok(CommandKind::Pass {
                atom: ident(toks[1], "atom id")?,
                screen: ident(toks[2], "screen id")?,
                phi: angle(toks[4])?,
            })
        }
        "detect" =>
        {
            arity(&toks, 4, "detect atom (internal|position) label")?;
            let target = match toks[2]
            {
                "internal" => DetectTarget::Internal,
                "position" => DetectTarget::Position,
                t => return Err(format!("expected 'internal' or 'position', found '{t}'")),
            };
            Ok(CommandKind::Detect { atom: ident(toks[1], "atom id")?, target, label: ident(toks[3], "label")? })
        }
        "propagate" =>
        {
            arity(&toks, 3, "propagate atom kernel")?;
            Ok(CommandKind::Propagate { atom: ident(toks[1], "atom id")?, kernel: ident(toks[2], "kernel id")? })
        }
        "inject" =>
        {
            arity(&toks, 3, "inject cavity number")?;
            Ok(CommandKind::Inject { cavity: ident(toks[1], "cavity id")?, beta: amplitude(toks[2])? })
        }
        "jcpass" =>
        {
            arity(&toks, 5, "jcpass atom cavity gt angle")?;
            expect_kw(toks.get(3), "gt")?;
            Ok(CommandKind::JcPass {
                atom: ident(toks[1], "atom id")?,
                cavity: ident(toks[2], "cavity id")?,
                gt: angle(toks[4])?,
            })
        }
        "checkpoint" =>
        {
            arity(&toks, 2, "checkpoint name")?;
            toks[1].parse::<CheckpointId>().map(CommandKind::Checkpoint).map_err(|e| e.to_string())
        }
        k => Err(format!("unknown command '{k}'")),
    }
}
