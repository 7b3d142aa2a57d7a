//! Dotted-name globs: `*` matches a run of characters without `.`, `**`
//! matches any run including `.` (possibly empty).

#[derive(Clone, Debug, PartialEq, Eq)]
enum Token {
    Literal(char),
    Star,
    DoubleStar,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Glob {
    source: String,
    tokens: Vec<Token>,
}

impl Glob {
    pub fn new(pattern: &str) -> Self {
        let mut tokens = Vec::new();
        let mut chars = pattern.chars().peekable();
        while let Some(c) = chars.next() {
            if c == '*' {
                let mut run = 1;
                while chars.peek() == Some(&'*') {
                    chars.next();
                    run += 1;
                }
                tokens.push(if run >= 2 { Token::DoubleStar } else { Token::Star });
            } else {
                tokens.push(Token::Literal(c));
            }
        }
        Glob {
            source: pattern.to_string(),
            tokens,
        }
    }

    pub fn as_str(&self) -> &str {
        &self.source
    }

    pub fn matches(&self, name: &str) -> bool {
        let text: Vec<char> = name.chars().collect();
        // reachable[j]: pattern prefix consumed so far can end at text position j
        let mut reachable = vec![false; text.len() + 1];
        reachable[0] = true;
        for token in &self.tokens {
            let mut next = vec![false; text.len() + 1];
            match token {
                Token::Literal(c) => {
                    for j in 0..text.len() {
                        if reachable[j] && text[j] == *c {
                            next[j + 1] = true;
                        }
                    }
                }
                Token::Star => {
                    for j in 0..=text.len() {
                        if reachable[j] || (j > 0 && next[j - 1] && text[j - 1] != '.') {
                            next[j] = true;
                        }
                    }
                }
                Token::DoubleStar => {
                    for j in 0..=text.len() {
                        if reachable[j] || (j > 0 && next[j - 1]) {
                            next[j] = true;
                        }
                    }
                }
            }
            reachable = next;
            if !reachable.iter().any(|&r| r) {
                return false;
            }
        }
        reachable[text.len()]
    }
}
