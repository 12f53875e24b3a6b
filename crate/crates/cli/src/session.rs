//! State of an interactive session.

use nda_core::exprlang::eval_str;
use nda_core::{Arithmetic, Law};

use crate::output::{self, Format};
use crate::{build_arith, laws_report, CliError};

pub const DEFAULT_ARITH: &str = "projective:id@int:0:100";

const HELP: &str = "\
expressions: numbers, + - * and parentheses, one of == != < << <<< at the top
:arith <spec>      switch arithmetic, e.g. :arith projective:pow:2@int:0:100
:laws <list> <R>   check laws on [0, R], e.g. :laws assoc-add,dist 50
:format <fmt>      table, json or csv
:history           list evaluated inputs
:quit              leave";

#[derive(Debug)]
pub struct Session {
    arith: Arithmetic,
    format: Format,
    history: Vec<String>,
}

/// What a line produced. Errors are reported, never fatal.
#[derive(Debug, PartialEq)]
pub enum Reply {
    Output(String),
    Error(String),
    Quit,
}

impl Session {
    pub fn new(arith: Arithmetic, format: Format) -> Self {
        Session {
            arith,
            format,
            history: Vec::new(),
        }
    }

    pub fn arith(&self) -> &Arithmetic {
        &self.arith
    }

    pub fn history(&self) -> &[String] {
        &self.history
    }

    pub fn handle(&mut self, line: &str) -> Reply {
        // Keep leading blanks so error offsets match the typed line.
        let line = line.trim_end_matches(['\n', '\r']);
        if line.trim().is_empty() {
            return Reply::Output(String::new());
        }
        let result = match line.trim_start().strip_prefix(':') {
            Some(directive) => return self.directive(directive),
            None => self.evaluate(line),
        };
        match result {
            Ok(s) => Reply::Output(s),
            Err(e) => Reply::Error(e.message),
        }
    }

    fn evaluate(&mut self, line: &str) -> Result<String, CliError> {
        self.history.push(line.trim().to_string());
        let result = eval_str(line, &self.arith)?;
        Ok(output::eval_result(
            &self.arith,
            line.trim(),
            &result,
            self.format,
        ))
    }

    fn directive(&mut self, d: &str) -> Reply {
        let mut parts = d.split_whitespace();
        let name = parts.next().unwrap_or("");
        let args: Vec<&str> = parts.collect();
        let result = match (name, args.as_slice()) {
            ("quit" | "q", []) => return Reply::Quit,
            ("help", []) => Ok(format!("{HELP}\n")),
            ("arith", []) => Ok(format!("{}\n", self.arith)),
            ("arith", [spec]) => build_arith(spec, None).map(|ar| {
                self.arith = ar;
                format!("arithmetic: {}\n", self.arith)
            }),
            ("format", [fmt]) => fmt
                .parse::<Format>()
                .map(|f| {
                    self.format = f;
                    String::new()
                })
                .map_err(CliError::usage),
            ("laws", [list, r]) => match (Law::parse_list(list), r.parse::<usize>()) {
                (Ok(laws), Ok(r)) => laws_report(&self.arith, &laws, r, self.format),
                (Err(e), _) => Err(e.into()),
                (_, Err(_)) => Err(CliError::usage(format!("bad range `{r}`"))),
            },
            ("history", []) => Ok(self
                .history
                .iter()
                .enumerate()
                .map(|(i, h)| format!("{:>4}  {h}\n", i + 1))
                .collect()),
            _ => Err(CliError::usage(format!(
                "unknown directive `:{d}` (try :help)"
            ))),
        };
        match result {
            Ok(s) => Reply::Output(s),
            Err(e) => Reply::Error(e.message),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn session() -> Session {
        Session::new(DEFAULT_ARITH.parse().unwrap(), Format::Table)
    }

    #[test]
    fn switching_arithmetics() {
        let mut s = session();
        s.handle(":arith projective:pow:2@int:0:100");
        assert_eq!(s.handle("2+2"), Reply::Output("2\n".into()));
        s.handle(":arith dual:id@int:0:100");
        assert_eq!(s.handle("2+2"), Reply::Output("4\n".into()));
    }

    #[test]
    fn laws_directive() {
        let mut s = session();
        s.handle(":arith projective:pow:1.5@int:0:100");
        let Reply::Output(out) = s.handle(":laws assoc-add 50") else {
            panic!()
        };
        assert!(out.contains("fails"));
        assert!(out.contains("(2, 3, 3)"));
    }

    #[test]
    fn errors_do_not_end_the_session() {
        let mut s = session();
        match s.handle("2 + ") {
            Reply::Error(e) => assert!(e.contains("offset 4"), "{e}"),
            r => panic!("{r:?}"),
        }
        assert!(matches!(s.handle(":arith nonsense"), Reply::Error(_)));
        assert!(matches!(s.handle("500 + 1"), Reply::Error(_)));
        assert!(matches!(s.handle(":bogus"), Reply::Error(_)));
        assert_eq!(s.handle("1+1"), Reply::Output("2\n".into()));
        assert_eq!(s.arith().to_string(), DEFAULT_ARITH);
        assert_eq!(s.history().len(), 3);
        assert_eq!(s.handle(":quit"), Reply::Quit);
    }
}
