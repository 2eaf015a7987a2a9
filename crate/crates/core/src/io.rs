//! The line-oriented problem-file format and deterministic result
//! serialization.
//!
//! ```text
//! problem
//! vars <n>
//! abducibles <i> <i> ...
//! kb dnf|affine
//! <dnf: one term per line, signed ints; affine: "v v ... = b" per line>
//! end
//! query clause|term|cnf|eqdisj
//! <clause/term: one line; cnf: one clause per line; eqdisj: one equation per line>
//! end
//! ```
//!
//! `#` starts a comment; blank lines are skipped. A line consisting of the
//! single token `0` denotes the empty term or clause.

use thiserror::Error;

use crate::affine::{AffineSystem, EquationDisjunction, LinearEquation};
use crate::engine::{AbductionProblem, InvalidProblem, KnowledgeBase, Query, SolveOutcome};
use crate::formula::{Clause, Cnf, Dnf, Literal, Term, VarId, VarSet};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ProblemFileError {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("validation error: {0}")]
    Validation(#[from] InvalidProblem),
}

/// A warning attached to a source line (currently only dropped
/// inconsistent terms).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Warning {
    pub line: usize,
    pub message: String,
}

/// A parsed problem plus the diagnostics collected along the way.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemFile {
    pub problem: AbductionProblem,
    pub warnings: Vec<Warning>,
}

fn parse_err(line: usize, message: impl Into<String>) -> ProblemFileError {
    ProblemFileError::Parse {
        line,
        message: message.into(),
    }
}

struct Lines<'a> {
    inner: std::iter::Peekable<std::vec::IntoIter<(usize, Vec<&'a str>)>>,
    last_line: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let rows: Vec<(usize, Vec<&str>)> = text
            .lines()
            .enumerate()
            .filter_map(|(i, raw)| {
                let stripped = raw.split('#').next().unwrap_or("");
                let tokens: Vec<&str> = stripped.split_whitespace().collect();
                if tokens.is_empty() {
                    None
                } else {
                    Some((i + 1, tokens))
                }
            })
            .collect();
        Lines {
            last_line: text.lines().count(),
            inner: rows.into_iter().peekable(),
        }
    }

    fn next(&mut self) -> Option<(usize, Vec<&'a str>)> {
        self.inner.next()
    }

    fn expect(&mut self, what: &str) -> Result<(usize, Vec<&'a str>), ProblemFileError> {
        let last = self.last_line;
        self.next()
            .ok_or_else(|| parse_err(last, format!("unexpected end of file, expected {what}")))
    }
}

fn parse_count(token: &str, line: usize, what: &str) -> Result<u32, ProblemFileError> {
    token
        .parse::<u32>()
        .ok()
        .filter(|&v| v >= 1)
        .ok_or_else(|| {
            parse_err(
                line,
                format!("{what} must be a positive integer, got {token:?}"),
            )
        })
}

/// Signed-integer literals; the lone token `0` denotes the empty list.
fn parse_literals(tokens: &[&str], line: usize) -> Result<Vec<Literal>, ProblemFileError> {
    if tokens == ["0"] {
        return Ok(Vec::new());
    }
    tokens
        .iter()
        .map(|t| {
            t.parse::<i64>()
                .ok()
                .and_then(Literal::from_signed)
                .ok_or_else(|| {
                    parse_err(
                        line,
                        format!("expected a nonzero signed integer, got {t:?}"),
                    )
                })
        })
        .collect()
}

/// An equation line "v v ... = b".
fn parse_equation(tokens: &[&str], line: usize) -> Result<LinearEquation, ProblemFileError> {
    let eq_pos = tokens
        .iter()
        .position(|&t| t == "=")
        .ok_or_else(|| parse_err(line, "equation lines need the form \"v v ... = b\""))?;
    if eq_pos + 2 != tokens.len() {
        return Err(parse_err(line, "exactly one bit must follow \"=\""));
    }
    let rhs = match tokens[eq_pos + 1] {
        "0" => false,
        "1" => true,
        other => {
            return Err(parse_err(
                line,
                format!("right-hand side must be 0 or 1, got {other:?}"),
            ))
        }
    };
    let vars = tokens[..eq_pos]
        .iter()
        .map(|t| parse_count(t, line, "equation variable").map(VarId::new))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(LinearEquation::new(vars, rhs))
}

fn check_kb_var_range(max: Option<VarId>, n: u32, line: usize) -> Result<(), ProblemFileError> {
    if let Some(v) = max {
        if v.get() > n {
            return Err(parse_err(
                line,
                format!(
                    "variable {} out of range, the problem declares {} variables",
                    v.get(),
                    n
                ),
            ));
        }
    }
    Ok(())
}

/// Parses the grammar above; knowledge-base variable ranges are checked at
/// parse time, query and abducible ranges at validation time.
pub fn parse_problem(text: &str) -> Result<ProblemFile, ProblemFileError> {
    let mut lines = Lines::new(text);
    let mut warnings = Vec::new();

    let (line, tokens) = lines.expect("the header line \"problem\"")?;
    if tokens != ["problem"] {
        return Err(parse_err(line, "the first line must be \"problem\""));
    }

    let (line, tokens) = lines.expect("a \"vars <n>\" line")?;
    if tokens.len() != 2 || tokens[0] != "vars" {
        return Err(parse_err(line, "expected \"vars <n>\""));
    }
    let n = parse_count(tokens[1], line, "variable count")?;

    let (line, tokens) = lines.expect("an \"abducibles ...\" line")?;
    if tokens.first() != Some(&"abducibles") {
        return Err(parse_err(line, "expected \"abducibles <i> ...\""));
    }
    let abducibles: VarSet = tokens[1..]
        .iter()
        .map(|t| parse_count(t, line, "abducible").map(VarId::new))
        .collect::<Result<_, _>>()?;

    let (line, tokens) = lines.expect("a \"kb dnf|affine\" line")?;
    if tokens.len() != 2 || tokens[0] != "kb" {
        return Err(parse_err(line, "expected \"kb dnf\" or \"kb affine\""));
    }
    let kb = match tokens[1] {
        "dnf" => {
            let mut terms = Vec::new();
            loop {
                let (line, tokens) = lines.expect("a term line or \"end\"")?;
                if tokens == ["end"] {
                    break;
                }
                let lits = parse_literals(&tokens, line)?;
                check_kb_var_range(lits.iter().map(|l| l.var).max(), n, line)?;
                match Term::try_new(lits) {
                    Some(t) => terms.push(t),
                    None => warnings.push(Warning {
                        line,
                        message: "inconsistent term dropped (it denotes false)".into(),
                    }),
                }
            }
            KnowledgeBase::Dnf(Dnf::new(n, terms))
        }
        "affine" => {
            let mut rows = Vec::new();
            loop {
                let (line, tokens) = lines.expect("an equation line or \"end\"")?;
                if tokens == ["end"] {
                    break;
                }
                let eq = parse_equation(&tokens, line)?;
                check_kb_var_range(eq.max_var(), n, line)?;
                rows.push(eq);
            }
            KnowledgeBase::Affine(AffineSystem::new(n, rows))
        }
        other => return Err(parse_err(line, format!("unknown kb form {other:?}"))),
    };

    let (line, tokens) = lines.expect("a \"query <form>\" line")?;
    if tokens.len() != 2 || tokens[0] != "query" {
        return Err(parse_err(line, "expected \"query clause|term|cnf|eqdisj\""));
    }
    let query_form = tokens[1];
    let query = match query_form {
        "clause" | "term" => {
            let (body_line, body) = lines.expect("a literal line")?;
            if body == ["end"] {
                return Err(parse_err(
                    body_line,
                    format!("query {query_form} takes one literal line"),
                ));
            }
            let lits = parse_literals(&body, body_line)?;
            let (end_line, end) = lines.expect("\"end\"")?;
            if end != ["end"] {
                return Err(parse_err(
                    end_line,
                    format!("query {query_form} takes a single line"),
                ));
            }
            if query_form == "clause" {
                Query::Clause(Clause::new(lits))
            } else {
                match Term::try_new(lits) {
                    Some(t) => Query::Term(t),
                    None => {
                        return Err(ProblemFileError::Validation(
                            InvalidProblem::UnsatisfiableQuery,
                        ))
                    }
                }
            }
        }
        "cnf" => {
            let mut clauses = Vec::new();
            loop {
                let (body_line, body) = lines.expect("a clause line or \"end\"")?;
                if body == ["end"] {
                    break;
                }
                clauses.push(Clause::new(parse_literals(&body, body_line)?));
            }
            let max = clauses.iter().filter_map(Clause::max_var).max();
            if let Some(v) = max {
                if v.get() > n {
                    return Err(ProblemFileError::Validation(
                        InvalidProblem::QueryVarOutOfRange { var: v.get(), n },
                    ));
                }
            }
            Query::Cnf(Cnf::new(n, clauses))
        }
        "eqdisj" => {
            let mut eqs = Vec::new();
            loop {
                let (body_line, body) = lines.expect("an equation line or \"end\"")?;
                if body == ["end"] {
                    break;
                }
                eqs.push(parse_equation(&body, body_line)?);
            }
            let max = eqs.iter().filter_map(LinearEquation::max_var).max();
            if let Some(v) = max {
                if v.get() > n {
                    return Err(ProblemFileError::Validation(
                        InvalidProblem::QueryVarOutOfRange { var: v.get(), n },
                    ));
                }
            }
            Query::EquationDisjunction(EquationDisjunction::new(n, eqs))
        }
        other => return Err(parse_err(line, format!("unknown query form {other:?}"))),
    };

    if let Some((line, _)) = lines.next() {
        return Err(parse_err(
            line,
            "unexpected content after the query section",
        ));
    }

    let problem = AbductionProblem::new(kb, query, abducibles)?;
    Ok(ProblemFile { problem, warnings })
}

fn literal_line(lits: &[Literal]) -> String {
    if lits.is_empty() {
        return "0".into();
    }
    lits.iter()
        .map(|l| l.to_signed().to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn equation_line(eq: &LinearEquation) -> String {
    let mut parts: Vec<String> = eq.vars().iter().map(|v| v.get().to_string()).collect();
    parts.push("=".into());
    parts.push(if eq.rhs() { "1" } else { "0" }.into());
    parts.join(" ")
}

/// Canonical text form; parsing it back yields an equal problem.
pub fn serialize_problem(p: &AbductionProblem) -> String {
    let mut out = String::from("problem\n");
    out.push_str(&format!("vars {}\n", p.num_vars()));
    let abds: Vec<String> = p.abducibles().iter().map(|v| v.get().to_string()).collect();
    if abds.is_empty() {
        out.push_str("abducibles\n");
    } else {
        out.push_str(&format!("abducibles {}\n", abds.join(" ")));
    }
    match p.kb() {
        KnowledgeBase::Dnf(f) => {
            out.push_str("kb dnf\n");
            for t in f.terms() {
                out.push_str(&literal_line(t.literals()));
                out.push('\n');
            }
        }
        KnowledgeBase::Affine(s) => {
            out.push_str("kb affine\n");
            for row in s.rows() {
                out.push_str(&equation_line(row));
                out.push('\n');
            }
        }
    }
    out.push_str("end\n");
    match p.query() {
        Query::Clause(c) => {
            out.push_str("query clause\n");
            out.push_str(&literal_line(c.literals()));
            out.push('\n');
        }
        Query::Term(t) => {
            out.push_str("query term\n");
            out.push_str(&literal_line(t.literals()));
            out.push('\n');
        }
        Query::Cnf(f) => {
            out.push_str("query cnf\n");
            for c in f.clauses() {
                out.push_str(&literal_line(c.literals()));
                out.push('\n');
            }
        }
        Query::EquationDisjunction(d) => {
            out.push_str("query eqdisj\n");
            for eq in d.equations() {
                out.push_str(&equation_line(eq));
                out.push('\n');
            }
        }
    }
    out.push_str("end\n");
    out
}

/// Stable outcome text: a status line, plus the literal line for found
/// explanations (sorted by variable, empty for the empty hypothesis).
pub fn serialize_outcome(outcome: &SolveOutcome) -> String {
    match outcome {
        SolveOutcome::Best(e) => format!("BEST\n{}\n", e.as_partial()),
        SolveOutcome::NoExplanation => "NO EXPLANATION\n".into(),
        SolveOutcome::Unsupported(reason) => format!("UNSUPPORTED: {reason}\n"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::Hypothesis;
    use crate::formula::PartialAssignment;

    const AFFINE_EXAMPLE: &str = "\
problem
vars 4
abducibles 1 3
kb affine
1 3 = 1
1 2 4 = 0
end
query eqdisj
3 = 0
end
";

    #[test]
    fn parses_the_affine_example() {
        let parsed = parse_problem(AFFINE_EXAMPLE).unwrap();
        let p = &parsed.problem;
        assert_eq!(p.num_vars(), 4);
        match p.kb() {
            KnowledgeBase::Affine(s) => assert_eq!(s.rows().len(), 2),
            other => panic!("expected affine kb, got {other:?}"),
        }
        match p.query() {
            Query::EquationDisjunction(d) => assert_eq!(d.equations().len(), 1),
            other => panic!("expected eqdisj query, got {other:?}"),
        }
        let abds: Vec<u32> = p.abducibles().iter().map(VarId::get).collect();
        assert_eq!(abds, vec![1, 3]);
        assert!(parsed.warnings.is_empty());
    }

    #[test]
    fn out_of_range_abducibles_are_a_validation_error() {
        let text = "\
problem
vars 4
abducibles 9
kb dnf
1
end
query clause
1
end
";
        match parse_problem(text) {
            Err(ProblemFileError::Validation(InvalidProblem::AbducibleOutOfRange {
                var: 9,
                n: 4,
            })) => {}
            other => panic!("expected a validation error, got {other:?}"),
        }
    }

    #[test]
    fn inconsistent_terms_are_dropped_with_a_warning() {
        let text = "\
problem
vars 2
abducibles 1
kb dnf
1 -1
2
end
query clause
2
end
";
        let parsed = parse_problem(text).unwrap();
        assert_eq!(parsed.warnings.len(), 1);
        assert_eq!(parsed.warnings[0].line, 5);
        match parsed.problem.kb() {
            KnowledgeBase::Dnf(f) => assert_eq!(f.terms().len(), 1),
            other => panic!("expected dnf kb, got {other:?}"),
        }
    }

    #[test]
    fn kb_variable_range_is_a_parse_error() {
        let text = "\
problem
vars 2
abducibles 1
kb dnf
3
end
query clause
1
end
";
        match parse_problem(text) {
            Err(ProblemFileError::Parse { line: 5, .. }) => {}
            other => panic!("expected a parse error on line 5, got {other:?}"),
        }
    }

    #[test]
    fn query_variable_range_is_a_validation_error() {
        let text = "\
problem
vars 2
abducibles 1
kb dnf
1
end
query clause
1 9
end
";
        match parse_problem(text) {
            Err(ProblemFileError::Validation(InvalidProblem::QueryVarOutOfRange {
                var: 9,
                n: 2,
            })) => {}
            other => panic!("expected a validation error, got {other:?}"),
        }
    }

    #[test]
    fn comments_and_blank_lines_are_skipped() {
        let text = "\
# a small implication
problem

vars 2
abducibles 1   # only x1 may be hypothesized
kb dnf
-1
2
end
query clause
2
end
";
        let parsed = parse_problem(text).unwrap();
        assert_eq!(parsed.problem.num_vars(), 2);
    }

    #[test]
    fn round_trips_are_stable() {
        for text in [
            AFFINE_EXAMPLE,
            "problem\nvars 3\nabducibles\nkb dnf\n-1 2\n3\nend\nquery cnf\n1 2\n3\nend\n",
            "problem\nvars 2\nabducibles 1 2\nkb dnf\n-1\n2\nend\nquery term\n2\nend\n",
        ] {
            let first = parse_problem(text).unwrap().problem;
            let second = parse_problem(&serialize_problem(&first)).unwrap().problem;
            assert_eq!(first, second);
        }
    }

    #[test]
    fn outcome_serialization_is_fixed() {
        let best = SolveOutcome::Best(Hypothesis::new(
            PartialAssignment::from_literals([Literal::from_signed(1).unwrap()]).unwrap(),
        ));
        assert_eq!(serialize_outcome(&best), "BEST\n1\n");
        assert_eq!(
            serialize_outcome(&SolveOutcome::Best(Hypothesis::empty())),
            "BEST\n\n"
        );
        assert_eq!(
            serialize_outcome(&SolveOutcome::NoExplanation),
            "NO EXPLANATION\n"
        );
        assert_eq!(
            serialize_outcome(&SolveOutcome::Unsupported("why".into())),
            "UNSUPPORTED: why\n"
        );
    }
}
