//! The line-oriented presentation file format.
//!
//! ```text
//! # comments run to end of line
//! pgroup p=3
//! gens a b c
//! order a 9
//! order b 3
//! order c 3
//! pow a = c^2          # omitted: identity
//! comm b a = c^-1      # [b, a]; omitted: trivial
//! ```

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use super::{validate_structure, Diagnostic, Location, PcPresentation, Word};

fn at_line(line: usize) -> Location {
    Location { line: Some(line), relation: None }
}

struct Parser {
    diags: Vec<Diagnostic>,
    prime: Option<u64>,
    generators: Option<Vec<String>>,
    orders: Vec<Option<u64>>,
    powers: Vec<Option<Word>>,
    comms: BTreeMap<(usize, usize), Word>,
    relation_lines: HashMap<String, usize>,
}

impl Parser {
    fn err(&mut self, line: usize, msg: impl Into<String>) {
        self.diags.push(Diagnostic::error(at_line(line), msg));
    }

    fn index(&mut self, line: usize, name: &str) -> Option<usize> {
        let idx = self.generators.as_ref().and_then(|g| g.iter().position(|n| n == name));
        if idx.is_none() {
            self.err(line, format!("undeclared generator {name}"));
        }
        idx
    }

    fn word(&mut self, line: usize, tokens: &[&str]) -> Option<Word> {
        if tokens.is_empty() {
            self.err(line, "missing word after '='");
            return None;
        }
        if tokens == ["1"] {
            return Some(Word::identity());
        }
        let mut factors = Vec::with_capacity(tokens.len());
        let mut ok = true;
        for tok in tokens {
            let (name, exp) = match tok.split_once('^') {
                Some((n, e)) => match e.parse::<i64>() {
                    Ok(e) => (n, e),
                    Err(_) => {
                        self.err(line, format!("bad exponent in factor {tok:?}"));
                        ok = false;
                        continue;
                    }
                },
                None => (*tok, 1),
            };
            match self.index(line, name) {
                Some(i) => factors.push((i, exp)),
                None => ok = false,
            }
        }
        ok.then_some(Word(factors))
    }

    fn header(&mut self, line: usize, tokens: &[&str]) {
        let p = match tokens {
            ["pgroup", p] => p.strip_prefix("p=").and_then(|v| v.parse::<u64>().ok()),
            _ => None,
        };
        match p {
            Some(p) => self.prime = Some(p),
            None => self.err(line, "expected `pgroup p=<prime>`"),
        }
    }

    fn gens(&mut self, line: usize, tokens: &[&str]) {
        if tokens.first() != Some(&"gens") {
            self.err(line, "expected `gens <name> ...`");
            self.generators = Some(Vec::new());
            return;
        }
        let names: Vec<String> = tokens[1..].iter().map(|s| s.to_string()).collect();
        for (i, name) in names.iter().enumerate() {
            if names[..i].contains(name) {
                self.err(line, format!("duplicate generator name {name}"));
            }
        }
        self.orders = vec![None; names.len()];
        self.powers = vec![None; names.len()];
        self.generators = Some(names);
    }

    fn declaration(&mut self, line: usize, tokens: &[&str]) {
        match tokens {
            ["order", name, value] => {
                let Some(i) = self.index(line, name) else { return };
                let Ok(v) = value.parse::<u64>() else {
                    self.err(line, format!("bad order {value:?}"));
                    return;
                };
                if self.orders[i].replace(v).is_some() {
                    self.err(line, format!("duplicate order for {name}"));
                }
                self.relation_lines.insert(format!("order {name}"), line);
            }
            ["pow", name, "=", rest @ ..] => {
                let i = self.index(line, name);
                let w = self.word(line, rest);
                if let (Some(i), Some(w)) = (i, w) {
                    if self.powers[i].replace(w).is_some() {
                        self.err(line, format!("duplicate power relation for {name}"));
                    }
                    self.relation_lines.insert(format!("pow {name}"), line);
                }
            }
            ["comm", hi, lo, "=", rest @ ..] => {
                let h = self.index(line, hi);
                let l = self.index(line, lo);
                let w = self.word(line, rest);
                let (Some(h), Some(l), Some(w)) = (h, l, w) else { return };
                if h <= l {
                    self.err(line, format!("commutator must be written [hi, lo] with index({hi}) > index({lo})"));
                    return;
                }
                if self.comms.contains_key(&(h, l)) || self.relation_lines.contains_key(&format!("comm {hi} {lo}")) {
                    self.err(line, format!("duplicate commutator relation [{hi}, {lo}]"));
                    return;
                }
                self.relation_lines.insert(format!("comm {hi} {lo}"), line);
                if !w.is_identity() {
                    self.comms.insert((h, l), w);
                }
            }
            _ => self.err(line, format!("unrecognised declaration `{}`", tokens.join(" "))),
        }
    }
}

/// Parses the text format. On failure every error found is reported, each
/// with a line number where one is known.
pub fn parse_presentation(text: &str) -> Result<PcPresentation, Vec<Diagnostic>> {
    let mut parser = Parser {
        diags: Vec::new(),
        prime: None,
        generators: None,
        orders: Vec::new(),
        powers: Vec::new(),
        comms: BTreeMap::new(),
        relation_lines: HashMap::new(),
    };
    let mut last_line = 0;
    let mut seen_header = false;
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        last_line = line;
        let content = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = content.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        if !seen_header {
            seen_header = true;
            parser.header(line, &tokens);
        } else if parser.generators.is_none() {
            parser.gens(line, &tokens);
        } else {
            parser.declaration(line, &tokens);
        }
    }
    if !seen_header {
        parser.err(last_line.max(1), "empty presentation: expected `pgroup p=<prime>`");
    } else if parser.generators.is_none() {
        parser.err(last_line, "missing `gens` line");
    }
    let generators = parser.generators.take().unwrap_or_default();
    for (i, o) in parser.orders.iter().enumerate() {
        if o.is_none() {
            let msg = format!("missing order for generator {}", generators[i]);
            parser.diags.push(Diagnostic::error(Location::default(), msg));
        }
    }
    if parser.diags.iter().any(Diagnostic::is_error) {
        return Err(parser.diags);
    }

    let pres = PcPresentation {
        prime: parser.prime.unwrap_or(0),
        generators,
        relative_orders: parser.orders.iter().map(|o| o.unwrap_or(0)).collect(),
        power_relations: parser.powers.into_iter().map(Option::unwrap_or_default).collect(),
        commutator_relations: parser.comms,
    };
    let mut structural = validate_structure(&pres);
    for d in &mut structural {
        if let Some(rel) = &d.location.relation {
            d.location.line = parser.relation_lines.get(rel).copied();
        }
    }
    if structural.iter().any(Diagnostic::is_error) {
        Err(structural)
    } else {
        Ok(pres)
    }
}

fn render_word(pres: &PcPresentation, word: &Word) -> String {
    if word.is_identity() {
        return "1".into();
    }
    word.factors()
        .iter()
        .map(|&(g, e)| match e {
            1 => pres.generators[g].clone(),
            e => format!("{}^{e}", pres.generators[g]),
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Canonical text: header, generators, one `order` line per generator, then
/// the non-trivial power and commutator relations in index order.
pub fn serialize_presentation(pres: &PcPresentation) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "pgroup p={}", pres.prime);
    out.push_str("gens");
    for name in &pres.generators {
        out.push(' ');
        out.push_str(name);
    }
    out.push('\n');
    for (name, o) in pres.generators.iter().zip(&pres.relative_orders) {
        let _ = writeln!(out, "order {name} {o}");
    }
    for (i, w) in pres.power_relations.iter().enumerate() {
        if !w.is_identity() {
            let _ = writeln!(out, "pow {} = {}", pres.generators[i], render_word(pres, w));
        }
    }
    for (&(hi, lo), w) in &pres.commutator_relations {
        let _ = writeln!(
            out,
            "comm {} {} = {}",
            pres.generators[hi],
            pres.generators[lo],
            render_word(pres, w)
        );
    }
    out
}
