//! Minimal robots.txt evaluation: user-agent groups, Allow/Disallow with
//! `*` wildcards and `$` anchors, longest match wins, ties go to Allow.

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RobotsRules {
    /// `(allow, pattern)` pairs of the group that applies to us.
    rules: Vec<(bool, String)>,
}

#[derive(Debug, Default)]
struct Group {
    agents: Vec<String>,
    rules: Vec<(bool, String)>,
}

impl RobotsRules {
    pub fn allow_all() -> Self {
        Self::default()
    }

    /// Parses a robots.txt body for the given product token.
    pub fn parse(body: &str, agent: &str) -> Self {
        let agent = agent.to_ascii_lowercase();
        let mut groups: Vec<Group> = Vec::new();
        let mut in_agents = false;
        for line in body.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            let Some((key, value)) = line.split_once(':') else {
                continue;
            };
            let key = key.trim().to_ascii_lowercase();
            let value = value.trim();
            match key.as_str() {
                "user-agent" => {
                    if !in_agents {
                        groups.push(Group::default());
                        in_agents = true;
                    }
                    if let Some(g) = groups.last_mut() {
                        g.agents.push(value.to_ascii_lowercase());
                    }
                }
                "allow" | "disallow" => {
                    in_agents = false;
                    if let Some(g) = groups.last_mut() {
                        if !value.is_empty() {
                            g.rules.push((key == "allow", value.to_string()));
                        }
                    }
                }
                _ => {}
            }
        }
        let names_us = |g: &&Group| g.agents.iter().any(|a| a != "*" && agent.contains(a.as_str()));
        let wildcard = |g: &&Group| g.agents.iter().any(|a| a == "*");
        let chosen: Vec<&Group> = if groups.iter().any(|g| names_us(&g)) {
            groups.iter().filter(names_us).collect()
        } else {
            groups.iter().filter(wildcard).collect()
        };
        Self {
            rules: chosen.into_iter().flat_map(|g| g.rules.iter().cloned()).collect(),
        }
    }

    pub fn is_allowed(&self, path: &str) -> bool {
        let mut best: Option<(usize, bool)> = None;
        for (allow, pattern) in &self.rules {
            if pattern_matches(pattern, path) {
                let len = pattern.len();
                best = match best {
                    Some((l, a)) if l > len || (l == len && a) => Some((l, a)),
                    _ => Some((len, *allow)),
                };
            }
        }
        best.is_none_or(|(_, allow)| allow)
    }
}

fn pattern_matches(pattern: &str, path: &str) -> bool {
    let (pattern, anchored) = match pattern.strip_suffix('$') {
        Some(p) => (p, true),
        None => (pattern, false),
    };
    let parts: Vec<&str> = pattern.split('*').collect();
    let mut pos = 0;
    for (i, part) in parts.iter().enumerate() {
        if i == 0 {
            if !path.starts_with(part) {
                return false;
            }
            pos = part.len();
            continue;
        }
        match path[pos..].find(part) {
            Some(found) => pos += found + part.len(),
            None => return false,
        }
    }
    if anchored {
        if parts.len() > 1 {
            let last = parts[parts.len() - 1];
            return path.ends_with(last) && pos <= path.len();
        }
        return pos == path.len();
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    const ROBOTS: &str = "User-agent: *\nDisallow: /private/\nAllow: /private/open\nDisallow: /*.pdf$\n\nUser-agent: BadBot\nDisallow: /\n";

    #[test]
    fn wildcard_group() {
        let r = RobotsRules::parse(ROBOTS, "ClaimCheckBot/0.1");
        assert!(r.is_allowed("/news/story"));
        assert!(!r.is_allowed("/private/x"));
        assert!(r.is_allowed("/private/open/doc"));
        assert!(!r.is_allowed("/files/a.pdf"));
        assert!(r.is_allowed("/files/a.pdf.html"));
    }

    #[test]
    fn specific_group_wins() {
        let r = RobotsRules::parse(ROBOTS, "badbot");
        assert!(!r.is_allowed("/anything"));
        let r = RobotsRules::parse(
            "User-agent: claimcheckbot\nDisallow:\n\nUser-agent: *\nDisallow: /",
            "ClaimCheckBot",
        );
        assert!(r.is_allowed("/x"));
    }

    #[test]
    fn empty_allows_everything() {
        assert!(RobotsRules::parse("", "x").is_allowed("/"));
        assert!(RobotsRules::allow_all().is_allowed("/a"));
    }
}
