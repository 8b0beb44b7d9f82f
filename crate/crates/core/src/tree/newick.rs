use std::collections::BTreeSet;

use super::PhyloTree;
use crate::error::{Error, Result};
use crate::fmt::sig12;

struct Parser {
    chars: Vec<char>,
    pos: usize,
    leaf_labels: BTreeSet<String>,
}

fn err<T>(offset: usize, message: impl Into<String>) -> Result<T> {
    Err(Error::Parse {
        offset,
        message: message.into(),
    })
}

impl Parser {
    fn new(src: &str) -> Self {
        Parser {
            chars: src.chars().collect(),
            pos: 0,
            leaf_labels: BTreeSet::new(),
        }
    }

    fn skip_ws(&mut self) -> Result<()> {
        loop {
            match self.chars.get(self.pos) {
                Some(c) if c.is_whitespace() => self.pos += 1,
                Some('[') => {
                    let start = self.pos;
                    while self.chars.get(self.pos).is_some_and(|c| *c != ']') {
                        self.pos += 1;
                    }
                    if self.pos >= self.chars.len() {
                        return err(start, "unterminated comment");
                    }
                    self.pos += 1;
                }
                _ => return Ok(()),
            }
        }
    }

    fn peek(&mut self) -> Result<Option<char>> {
        self.skip_ws()?;
        Ok(self.chars.get(self.pos).copied())
    }

    fn label(&mut self) -> Result<Option<String>> {
        if self.peek()? == Some('\'') {
            let start = self.pos;
            self.pos += 1;
            let mut out = String::new();
            loop {
                match self.chars.get(self.pos) {
                    None => return err(start, "unterminated quoted label"),
                    Some('\'') if self.chars.get(self.pos + 1) == Some(&'\'') => {
                        out.push('\'');
                        self.pos += 2;
                    }
                    Some('\'') => {
                        self.pos += 1;
                        return Ok(Some(out));
                    }
                    Some(c) => {
                        out.push(*c);
                        self.pos += 1;
                    }
                }
            }
        }
        let start = self.pos;
        while let Some(c) = self.chars.get(self.pos) {
            if c.is_whitespace() || "(),:;[]'".contains(*c) {
                break;
            }
            self.pos += 1;
        }
        if self.pos == start {
            Ok(None)
        } else {
            Ok(Some(self.chars[start..self.pos].iter().collect()))
        }
    }

    fn length(&mut self) -> Result<f64> {
        if self.peek()? != Some(':') {
            return Ok(0.0);
        }
        self.pos += 1;
        self.skip_ws()?;
        let start = self.pos;
        while let Some(c) = self.chars.get(self.pos) {
            if c.is_ascii_digit() || "+-.eE".contains(*c) {
                self.pos += 1;
            } else {
                break;
            }
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        match text.parse::<f64>() {
            Ok(v) if !v.is_finite() => err(start, format!("non-finite branch length '{text}'")),
            Ok(v) if v < 0.0 => err(start, format!("negative branch length {text}")),
            Ok(v) => Ok(v),
            Err(_) => err(start, format!("invalid branch length '{text}'")),
        }
    }

    /// Parses one subtree into `tree`, attached under `parent` (or as the root).
    fn subtree(&mut self, tree: &mut Option<PhyloTree>, parent: Option<usize>) -> Result<usize> {
        let id = match parent {
            None => {
                *tree = Some(PhyloTree::with_root(None, 0.0));
                0
            }
            Some(p) => tree.as_mut().expect("root exists").add_child(p, None, 0.0),
        };
        let is_internal = self.peek()? == Some('(');
        if is_internal {
            self.pos += 1;
            loop {
                self.subtree(tree, Some(id))?;
                match self.peek()? {
                    Some(',') => self.pos += 1,
                    Some(')') => {
                        self.pos += 1;
                        break;
                    }
                    Some(c) => return err(self.pos, format!("expected ',' or ')', found '{c}'")),
                    None => {
                        return err(self.pos, "unbalanced parentheses: unexpected end of input")
                    }
                }
            }
        }
        let label_at = self.pos;
        let name = self.label()?;
        let length = self.length()?;
        if !is_internal {
            match &name {
                None => return err(label_at, "leaf without a label"),
                Some(n) if !self.leaf_labels.insert(n.clone()) => {
                    return err(label_at, format!("duplicate leaf label '{n}'"));
                }
                _ => {}
            }
        }
        let t = tree.as_mut().expect("root exists");
        t.nodes[id].name = name;
        t.nodes[id].length = length;
        Ok(id)
    }
}

/// Parses a single Newick tree terminated by `;`.
///
/// Missing branch lengths default to 0. Errors carry the character offset.
pub fn parse_newick(text: &str) -> Result<PhyloTree> {
    let mut p = Parser::new(text);
    if p.peek()?.is_none() {
        return err(0, "empty input");
    }
    let mut tree = None;
    p.subtree(&mut tree, None)?;
    match p.peek()? {
        Some(';') => p.pos += 1,
        Some(')') => return err(p.pos, "unbalanced parentheses: unexpected ')'"),
        Some(c) => return err(p.pos, format!("expected ';', found '{c}'")),
        None => return err(p.pos, "missing terminating ';'"),
    }
    if let Some(c) = p.peek()? {
        return err(
            p.pos,
            format!("trailing characters after ';' starting with '{c}'"),
        );
    }
    Ok(tree.expect("parsed a root"))
}

fn quote_label(name: &str) -> String {
    let plain = !name.is_empty()
        && !name
            .chars()
            .any(|c| c.is_whitespace() || "(),:;[]'".contains(c));
    if plain {
        name.to_string()
    } else {
        format!("'{}'", name.replace('\'', "''"))
    }
}

/// Canonical Newick text: children ordered by their smallest leaf label,
/// every non-root edge carries an explicit length (12 significant digits).
pub fn serialize_newick(t: &PhyloTree) -> String {
    let min_labels = t.min_labels();
    let mut out = String::new();
    write_node(t, t.root(), &min_labels, &mut out);
    let root = t.node(t.root());
    if root.length != 0.0 {
        out.push(':');
        out.push_str(&sig12(root.length));
    }
    out.push(';');
    out
}

fn write_node(t: &PhyloTree, v: usize, min_labels: &[String], out: &mut String) {
    let node = t.node(v);
    if !node.children.is_empty() {
        out.push('(');
        for (k, c) in t.sorted_children(v, min_labels).into_iter().enumerate() {
            if k > 0 {
                out.push(',');
            }
            write_node(t, c, min_labels, out);
            out.push(':');
            out.push_str(&sig12(t.node(c).length));
        }
        out.push(')');
    }
    if let Some(name) = &node.name {
        out.push_str(&quote_label(name));
    }
}
