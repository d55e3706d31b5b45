//! Line-oriented scenario scripts: one event per line, `#` starts a
//! comment, blank lines are skipped. The first event must be `init`.
//!
//! ```text
//! init a=7 w=7
//! remove 6
//! remove random
//! add
//! lookup n=1000
//! measure balance,complexity keys=50000
//! dump-state state.json
//! ```

use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Event {
    Init {
        a: Option<u32>,
        w: Option<u32>,
        resources: Option<Vec<String>>,
    },
    Remove(Target),
    Add(Option<String>),
    Lookup {
        n: usize,
    },
    Measure {
        metrics: MetricSet,
        keys: Option<usize>,
        trials: Option<u32>,
    },
    DumpState(String),
    Load(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Target {
    Random,
    Named(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Balance,
    Complexity,
    UpdateCost,
    Throughput,
}

/// `all` expands at execution time to every metric the algorithm supports.
#[derive(Debug, Clone, PartialEq)]
pub enum MetricSet {
    All,
    List(Vec<Metric>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line > 0 {
            write!(f, "line {}: {}", self.line, self.message)
        } else {
            write!(f, "{}", self.message)
        }
    }
}

impl std::error::Error for ParseError {}

pub fn parse(text: &str) -> Result<Vec<Event>, ParseError> {
    let mut events = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line_no = no + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let head = tokens.next().unwrap();
        let rest: Vec<&str> = tokens.collect();
        let fail = |message: String| ParseError {
            line: line_no,
            message,
        };
        let event = match head {
            "init" => parse_init(&rest).map_err(fail)?,
            "remove" => match rest.as_slice() {
                ["random"] => Event::Remove(Target::Random),
                [name] => Event::Remove(Target::Named((*name).to_string())),
                _ => return Err(fail("remove takes exactly one target".into())),
            },
            "add" => match rest.as_slice() {
                [] => Event::Add(None),
                [name] => Event::Add(Some((*name).to_string())),
                _ => return Err(fail("add takes at most one id".into())),
            },
            "lookup" => match rest.as_slice() {
                [arg] => match kv(arg) {
                    Some(("n", v)) => Event::Lookup {
                        n: v.parse()
                            .map_err(|_| fail(format!("invalid lookup count '{v}'")))?,
                    },
                    _ => return Err(fail("lookup requires n=<count>".into())),
                },
                _ => return Err(fail("lookup requires n=<count>".into())),
            },
            "measure" => parse_measure(&rest).map_err(fail)?,
            "dump-state" => match rest.as_slice() {
                [path] => Event::DumpState((*path).to_string()),
                _ => return Err(fail("dump-state takes exactly one path".into())),
            },
            "load" => match rest.as_slice() {
                [path] => Event::Load((*path).to_string()),
                _ => return Err(fail("load takes exactly one path".into())),
            },
            other => return Err(fail(format!("unknown event '{other}'"))),
        };
        if events.is_empty() && !matches!(event, Event::Init { .. }) {
            return Err(ParseError {
                line: line_no,
                message: "first event must be init".into(),
            });
        }
        events.push(event);
    }
    if events.is_empty() {
        return Err(ParseError {
            line: 0,
            message: "script has no events".into(),
        });
    }
    Ok(events)
}

fn kv(token: &str) -> Option<(&str, &str)> {
    token.split_once('=')
}

fn parse_init(rest: &[&str]) -> Result<Event, String> {
    let mut a = None;
    let mut w = None;
    let mut resources = None;
    for token in rest {
        match kv(token) {
            Some(("a", v)) => {
                a = Some(v.parse().map_err(|_| format!("invalid a '{v}'"))?);
            }
            Some(("w", v)) => {
                w = Some(v.parse().map_err(|_| format!("invalid w '{v}'"))?);
            }
            Some(("resources", v)) => {
                let names: Vec<String> = v
                    .split(',')
                    .filter(|s| !s.is_empty())
                    .map(str::to_string)
                    .collect();
                if names.is_empty() {
                    return Err("resources= needs at least one name".into());
                }
                resources = Some(names);
            }
            _ => return Err(format!("unknown init argument '{token}'")),
        }
    }
    if a.is_none() && resources.is_none() {
        return Err("init requires a= or resources=".into());
    }
    Ok(Event::Init { a, w, resources })
}

fn parse_measure(rest: &[&str]) -> Result<Event, String> {
    let Some((list, args)) = rest.split_first() else {
        return Err("measure requires a metric list".into());
    };
    let metrics = if *list == "all" {
        MetricSet::All
    } else {
        let mut out = Vec::new();
        for name in list.split(',').filter(|s| !s.is_empty()) {
            out.push(match name {
                "balance" => Metric::Balance,
                "complexity" => Metric::Complexity,
                "update-cost" => Metric::UpdateCost,
                "throughput" => Metric::Throughput,
                "all" => return Err("'all' cannot be combined with other metrics".into()),
                other => return Err(format!("unknown metric '{other}'")),
            });
        }
        if out.is_empty() {
            return Err("measure requires a metric list".into());
        }
        MetricSet::List(out)
    };
    let mut keys = None;
    let mut trials = None;
    for token in args {
        match kv(token) {
            Some(("keys", v)) => {
                keys = Some(v.parse().map_err(|_| format!("invalid keys '{v}'"))?);
            }
            Some(("trials", v)) => {
                trials = Some(v.parse().map_err(|_| format!("invalid trials '{v}'"))?);
            }
            _ => return Err(format!("unknown measure argument '{token}'")),
        }
    }
    Ok(Event::Measure {
        metrics,
        keys,
        trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_full_grammar() {
        let text = "\
# churn scenario
init a=7 w=7
remove 6
remove random
add
lookup n=100   # trailing comment
measure balance,update-cost keys=5000 trials=50
measure all
dump-state out.json
load out.json
";
        let events = parse(text).unwrap();
        assert_eq!(events.len(), 9);
        assert_eq!(
            events[0],
            Event::Init {
                a: Some(7),
                w: Some(7),
                resources: None
            }
        );
        assert_eq!(events[2], Event::Remove(Target::Random));
        assert_eq!(
            events[5],
            Event::Measure {
                metrics: MetricSet::List(vec![Metric::Balance, Metric::UpdateCost]),
                keys: Some(5000),
                trials: Some(50),
            }
        );
        assert_eq!(events[6].clone(), Event::Measure {
            metrics: MetricSet::All,
            keys: None,
            trials: None,
        });
    }

    #[test]
    fn init_accepts_resources() {
        let events = parse("init a=16 resources=alpha,beta,gamma\n").unwrap();
        assert_eq!(
            events[0],
            Event::Init {
                a: Some(16),
                w: None,
                resources: Some(vec!["alpha".into(), "beta".into(), "gamma".into()])
            }
        );
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = parse("init a=4\nbogus 12\n").unwrap_err();
        assert_eq!(err.line, 2);
        assert!(err.message.contains("bogus"));

        let err = parse("remove 3\n").unwrap_err();
        assert_eq!(err.line, 1);
        assert!(err.message.contains("first event must be init"));

        let err = parse("# only a comment\n").unwrap_err();
        assert!(err.message.contains("no events"));

        let err = parse("init a=4\nmeasure balance,all\n").unwrap_err();
        assert_eq!(err.line, 2);
    }
}
