//! Newick reading and writing.
//!
//! An unrooted binary tree is written rooted at an internal vertex, so the
//! outermost parentheses hold exactly three subtrees and every other internal
//! node holds two. Branch lengths, internal labels and comments are rejected.

use std::collections::BTreeSet;
use std::path::Path;

use crate::error::{Error, Result};
use crate::tree::{PhyloTree, Taxon, FRESH_PREFIX};

/// Parses a user-supplied Newick string. Labels with the reserved `_z`
/// prefix are rejected.
pub fn parse_newick(text: &str) -> Result<PhyloTree> {
    Parser::new(text, 0, false).parse()
}

/// Like [`parse_newick`] but accepts engine-minted `_z` labels, for reading
/// back kernels and traces.
pub fn parse_newick_allow_fresh(text: &str) -> Result<PhyloTree> {
    Parser::new(text, 0, true).parse()
}

/// Canonical serialization: children sorted by smallest contained label,
/// rooted at the internal vertex adjacent to the smallest label.
pub fn write_newick(tree: &PhyloTree) -> String {
    tree.to_newick()
}

/// Parses an instance: two Newick lines (T, then T'). Blank lines and lines
/// starting with `#` are skipped.
pub fn parse_instance(text: &str) -> Result<(PhyloTree, PhyloTree)> {
    parse_instance_with(text, false)
}

pub fn parse_instance_with(text: &str, allow_fresh: bool) -> Result<(PhyloTree, PhyloTree)> {
    let mut trees = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        trees.push(Parser::new(line, i, allow_fresh).parse()?);
    }
    if trees.len() != 2 {
        return Err(Error::Instance(format!(
            "expected exactly two trees, found {}",
            trees.len()
        )));
    }
    let tp = trees.pop().unwrap();
    let t = trees.pop().unwrap();
    if !t.taxa().eq(tp.taxa()) {
        return Err(Error::TaxonMismatch);
    }
    Ok((t, tp))
}

pub fn read_instance(path: &Path) -> Result<(PhyloTree, PhyloTree)> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Instance(format!("{}: {e}", path.display())))?;
    parse_instance(&text)
}

/// Two-line instance text.
pub fn format_instance(t: &PhyloTree, tp: &PhyloTree) -> String {
    format!("{}\n{}\n", t.to_newick(), tp.to_newick())
}

struct Node {
    children: Vec<usize>,
    label: Option<String>,
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    allow_fresh: bool,
    nodes: Vec<Node>,
}

impl Parser {
    fn new(text: &str, line: usize, allow_fresh: bool) -> Self {
        Parser {
            chars: text.chars().collect(),
            pos: 0,
            line,
            allow_fresh,
            nodes: Vec::new(),
        }
    }

    fn err(&self, message: impl Into<String>) -> Error {
        // Multi-line input: count newlines before the error position.
        let before = &self.chars[..self.pos.min(self.chars.len())];
        let extra_lines = before.iter().filter(|&&c| c == '\n').count();
        let column = before.iter().rev().take_while(|&&c| c != '\n').count() + 1;
        Error::Syntax {
            line: self.line + extra_lines + 1,
            column,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn parse(mut self) -> Result<PhyloTree> {
        let root = self.subtree()?;
        self.skip_ws();
        match self.peek() {
            Some(';') => self.pos += 1,
            Some(c) => return Err(self.err(format!("expected ';', found '{c}'"))),
            None => return Err(self.err("missing terminating ';'")),
        }
        self.skip_ws();
        if let Some(c) = self.peek() {
            return Err(self.err(format!("unexpected '{c}' after ';'")));
        }
        self.build(root)
    }

    fn subtree(&mut self) -> Result<usize> {
        self.skip_ws();
        let node = if self.peek() == Some('(') {
            self.pos += 1;
            let mut children = vec![self.subtree()?];
            loop {
                self.skip_ws();
                match self.peek() {
                    Some(',') => {
                        self.pos += 1;
                        children.push(self.subtree()?);
                    }
                    Some(')') => {
                        self.pos += 1;
                        break;
                    }
                    Some(c) => return Err(self.err(format!("expected ',' or ')', found '{c}'"))),
                    None => return Err(self.err("unbalanced parentheses")),
                }
            }
            self.skip_ws();
            if self.peek().is_some_and(is_label_char) {
                return Err(self.err("internal node labels are not supported"));
            }
            Node {
                children,
                label: None,
            }
        } else {
            let start = self.pos;
            while self.peek().is_some_and(is_label_char) {
                self.pos += 1;
            }
            if start == self.pos {
                return Err(match self.peek() {
                    Some(c) => self.err(format!("expected a label or '(', found '{c}'")),
                    None => self.err("unexpected end of input"),
                });
            }
            let label: String = self.chars[start..self.pos].iter().collect();
            if !self.allow_fresh && label.starts_with(FRESH_PREFIX) {
                return Err(Error::ReservedLabel(label));
            }
            Node {
                children: Vec::new(),
                label: Some(label),
            }
        };
        self.skip_ws();
        match self.peek() {
            Some(':') => return Err(self.err("branch lengths are not supported")),
            Some('[') => return Err(self.err("comments are not supported")),
            _ => {}
        }
        self.nodes.push(node);
        Ok(self.nodes.len() - 1)
    }

    /// A rooted tree arrives with a root of two children. When one of them is
    /// internal, the root is suppressed by handing the other child to it.
    fn unroot(&mut self, root: usize) -> usize {
        let children = self.nodes[root].children.clone();
        if children.len() != 2 {
            return root;
        }
        let Some(&inner) = children.iter().find(|&&c| self.nodes[c].label.is_none()) else {
            return root;
        };
        let other = if children[0] == inner { children[1] } else { children[0] };
        self.nodes[inner].children.push(other);
        self.nodes[root].children.clear();
        inner
    }

    fn build(mut self, root: usize) -> Result<PhyloTree> {
        let old_root = root;
        let root = self.unroot(root);
        if root != old_root {
            // The old root is the last node pushed; dropping it keeps indices.
            debug_assert_eq!(old_root, self.nodes.len() - 1);
            self.nodes.pop();
        }
        let n = self.nodes.len();
        let mut labels = Vec::with_capacity(n);
        let mut edges = Vec::with_capacity(n);
        let mut seen = BTreeSet::new();
        for (i, node) in self.nodes.iter().enumerate() {
            if let Some(l) = &node.label {
                if !seen.insert(l.clone()) {
                    return Err(Error::DuplicateLabel(l.clone()));
                }
                labels.push(Some(Taxon::new(l)));
            } else {
                let degree = node.children.len() + usize::from(i != root);
                if degree != 3 {
                    return Err(Error::NonBinary { degree });
                }
                labels.push(None);
            }
            for &c in &node.children {
                edges.push((i, c));
            }
        }
        if self.nodes[root].label.is_some() {
            return Err(Error::NonBinary { degree: 0 });
        }
        PhyloTree::from_edges(labels, &edges)
    }
}

fn is_label_char(c: char) -> bool {
    !c.is_whitespace() && !matches!(c, '(' | ')' | ',' | ';' | ':' | '[' | ']' | '\'')
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_trees() {
        let t = parse_newick("(a,b,(c,d));").unwrap();
        assert_eq!(t.num_taxa(), 4);
        assert_eq!((0..t.num_vertices()).filter(|&v| !t.is_leaf(v)).count(), 2);
        assert_eq!(parse_newick("(a,b,c);").unwrap().to_newick(), "(a,b,c);");
    }

    #[test]
    fn rooted_input_is_unrooted() {
        let t = parse_newick("((a,b),(c,d));").unwrap();
        assert_eq!(write_newick(&t), "(a,b,(c,d));");
        let u = parse_newick("(((a,b),c),(d,e));").unwrap();
        assert_eq!(write_newick(&u), "(a,b,(c,(d,e)));");
    }

    #[test]
    fn canonical_rotation() {
        let t = parse_newick("((c,d),b,a);").unwrap();
        assert_eq!(write_newick(&t), "(a,b,(c,d));");
        let u = parse_newick("(d,(b,a),c);").unwrap();
        assert_eq!(write_newick(&u), "(a,b,(c,d));");
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(parse_newick("(a,b);").unwrap_err(), Error::NonBinary { degree: 2 });
        assert_eq!(
            parse_newick("(a,b,c,d);").unwrap_err(),
            Error::NonBinary { degree: 4 }
        );
        assert!(matches!(parse_newick("(a,a,b);"), Err(Error::DuplicateLabel(_))));
        assert!(matches!(parse_newick("(a,_z0,b);"), Err(Error::ReservedLabel(_))));
        assert!(parse_newick_allow_fresh("(a,_z0,b);").is_ok());
        assert!(matches!(parse_newick("(a:1,b,c);"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_newick("(a,b,c)x;"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_newick("(a,b,c)"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_newick("(a,(b,c);"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_newick("a;"), Err(Error::NonBinary { .. })));
    }

    #[test]
    fn instance_errors_report_lines() {
        let text = "# header\n(a,b,(c,d));\n(a,c,(b,d);\n";
        match parse_instance(text) {
            Err(Error::Syntax { line, column, .. }) => {
                assert_eq!(line, 3);
                assert_eq!(column, 11);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(
            parse_instance("(a,b,(c,d));\n(a,b,(c,e));\n").unwrap_err(),
            Error::TaxonMismatch
        );
        let (t, tp) = parse_instance("(a,b,(c,d));\n\n(a,c,(b,d));\n").unwrap();
        assert_eq!(format_instance(&t, &tp), "(a,b,(c,d));\n(a,(b,d),c);\n");
    }
}
