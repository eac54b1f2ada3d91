//! `family:key=value,...` descriptors.
//!
//! ```text
//! w:n=4
//! ghz:d=3,n=3
//! schmidt:l=0.5/0.3/0.2,n=3
//! cluster:n=20
//! graph:n=4,edges=1-2,2-3,3-4      (edges must come last)
//! singlet4:a=0.6,theta=1.0
//! singlet6
//! state:path/to/state.json
//! ```

use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::graphstate::Graph;

#[derive(Clone, Debug, PartialEq)]
pub enum Descriptor {
    W { n: usize },
    Ghz { d: usize, n: usize },
    Schmidt { lambdas: Vec<f64>, n: usize },
    Cluster { n: usize },
    Graph { graph: Graph },
    Singlet4 { a: f64, theta: f64 },
    Singlet6,
    File { path: PathBuf },
}

struct Fields<'a> {
    items: Vec<(&'a str, &'a str, usize)>,
}

impl<'a> Fields<'a> {
    fn get(&self, key: &str) -> Option<(&'a str, usize)> {
        self.items
            .iter()
            .find(|(k, _, _)| *k == key)
            .map(|&(_, v, p)| (v, p))
    }

    fn required<T: std::str::FromStr>(&self, key: &str, family: &str, end: usize) -> Result<T> {
        let (v, pos) = self.get(key).ok_or_else(|| Error::Parse {
            position: end,
            message: format!("`{family}` needs `{key}=`"),
        })?;
        v.parse().map_err(|_| Error::Parse {
            position: pos,
            message: format!("bad value `{v}` for `{key}`"),
        })
    }

    fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        for &(k, _, p) in &self.items {
            if !allowed.contains(&k) {
                return Err(Error::Parse {
                    position: p - k.len() - 1,
                    message: format!("unknown key `{k}`"),
                });
            }
        }
        Ok(())
    }
}

fn split_fields(body: &str, offset: usize) -> Result<Fields<'_>> {
    let mut items = Vec::new();
    let mut rest = body;
    let mut pos = offset;
    while !rest.is_empty() {
        let eq = rest.find('=').ok_or_else(|| Error::Parse {
            position: pos,
            message: "expected `key=value`".into(),
        })?;
        let key = &rest[..eq];
        if key.is_empty() || key.contains(',') {
            return Err(Error::Parse {
                position: pos,
                message: format!("bad key `{key}`"),
            });
        }
        let vstart = pos + eq + 1;
        let after = &rest[eq + 1..];
        let (value, consumed) = if key == "edges" {
            (after, after.len())
        } else {
            match after.find(',') {
                Some(c) => (&after[..c], c + 1),
                None => (after, after.len()),
            }
        };
        items.push((key, value, vstart));
        rest = &after[consumed..];
        pos = vstart + consumed;
    }
    Ok(Fields { items })
}

pub fn parse_descriptor(text: &str) -> Result<Descriptor> {
    let text = text.trim();
    let (family, body, off) = match text.find(':') {
        Some(i) => (&text[..i], &text[i + 1..], i + 1),
        None => (text, "", text.len()),
    };
    let end = text.len();
    if family == "state" {
        if body.is_empty() {
            return Err(Error::Parse {
                position: off,
                message: "`state` needs a file path".into(),
            });
        }
        return Ok(Descriptor::File { path: body.into() });
    }
    let f = split_fields(body, off)?;
    let d = match family {
        "w" => {
            f.check_keys(&["n"])?;
            Descriptor::W {
                n: f.required("n", family, end)?,
            }
        }
        "ghz" => {
            f.check_keys(&["d", "n"])?;
            Descriptor::Ghz {
                d: f.required("d", family, end)?,
                n: f.required("n", family, end)?,
            }
        }
        "schmidt" => {
            f.check_keys(&["l", "n"])?;
            let (raw, pos) = f.get("l").ok_or_else(|| Error::Parse {
                position: end,
                message: "`schmidt` needs `l=`".into(),
            })?;
            let mut lambdas = Vec::new();
            let mut p = pos;
            for part in raw.split('/') {
                lambdas.push(part.parse().map_err(|_| Error::Parse {
                    position: p,
                    message: format!("bad weight `{part}`"),
                })?);
                p += part.len() + 1;
            }
            Descriptor::Schmidt {
                lambdas,
                n: f.required("n", family, end)?,
            }
        }
        "cluster" => {
            f.check_keys(&["n"])?;
            Descriptor::Cluster {
                n: f.required("n", family, end)?,
            }
        }
        "graph" => {
            f.check_keys(&["n", "edges"])?;
            let n = f.required("n", family, end)?;
            let (edges, pos) = f.get("edges").ok_or_else(|| Error::Parse {
                position: end,
                message: "`graph` needs `edges=`".into(),
            })?;
            let graph = Graph::from_edge_list(n, edges).map_err(|e| match e {
                Error::Parse { position, message } => Error::Parse {
                    position: position + pos,
                    message,
                },
                other => other,
            })?;
            Descriptor::Graph { graph }
        }
        "singlet4" => {
            f.check_keys(&["a", "theta"])?;
            Descriptor::Singlet4 {
                a: f.required("a", family, end)?,
                theta: f.required("theta", family, end)?,
            }
        }
        "singlet6" => {
            f.check_keys(&[])?;
            Descriptor::Singlet6
        }
        _ => {
            return Err(Error::Parse {
                position: 0,
                message: format!("unknown family `{family}`"),
            })
        }
    };
    Ok(d)
}
