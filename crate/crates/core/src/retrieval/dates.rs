use std::sync::LazyLock;

use chrono::{DateTime, NaiveDate};
use regex::Regex;

const FORMATS: &[&str] = &[
    "%Y-%m-%d",
    "%Y/%m/%d",
    "%B %d, %Y",
    "%b %d, %Y",
    "%b. %d, %Y",
    "%B %d %Y",
    "%b %d %Y",
    "%d %B %Y",
    "%d %b %Y",
    "%d %b, %Y",
    "%d %B, %Y",
];

/// Parses the date formats commonly found in search results and page
/// metadata. Relative dates ("3 days ago") and ambiguous numeric forms
/// (`01/02/2020`) return `None`.
pub fn parse_loose_date(raw: &str) -> Option<NaiveDate> {
    let s = raw.trim();
    if s.is_empty() {
        return None;
    }
    if s.len() >= 10 && s.is_char_boundary(10) {
        if let Ok(d) = NaiveDate::parse_from_str(&s[..10], "%Y-%m-%d") {
            return Some(d);
        }
    }
    if let Ok(dt) = DateTime::parse_from_rfc2822(s) {
        return Some(dt.date_naive());
    }
    let cleaned = s.trim_end_matches('.').replace("Sept", "Sep");
    FORMATS.iter().find_map(|f| NaiveDate::parse_from_str(&cleaned, f).ok())
}

static DATE_IN_TEXT: LazyLock<Regex> = LazyLock::new(|| {
    let month = r"(?:Jan|Feb|Mar|Apr|May|Jun|Jul|Aug|Sep|Sept|Oct|Nov|Dec)[a-z]*\.?";
    Regex::new(&format!(
        r"\b(\d{{4}}-\d{{2}}-\d{{2}})|\b({month} \d{{1,2}},? \d{{4}})|\b(\d{{1,2}} {month},? \d{{4}})"
    ))
    .expect("valid regex")
});

/// Finds the first recognizable date inside free text such as a byline.
pub fn find_date_in_text(text: &str) -> Option<NaiveDate> {
    DATE_IN_TEXT.find_iter(text).find_map(|m| parse_loose_date(m.as_str()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> NaiveDate {
        s.parse().unwrap()
    }

    #[test]
    fn formats() {
        assert_eq!(parse_loose_date("2020-01-15"), Some(d("2020-01-15")));
        assert_eq!(parse_loose_date("2020-01-15T10:00:00+00:00"), Some(d("2020-01-15")));
        assert_eq!(parse_loose_date("Oct 26, 2020"), Some(d("2020-10-26")));
        assert_eq!(parse_loose_date("October 26, 2020"), Some(d("2020-10-26")));
        assert_eq!(parse_loose_date("26 Oct 2020"), Some(d("2020-10-26")));
        assert_eq!(parse_loose_date("Sept. 3, 2019"), Some(d("2019-09-03")));
        assert_eq!(
            parse_loose_date("Tue, 1 Jul 2003 10:52:37 +0200"),
            Some(d("2003-07-01"))
        );
        assert_eq!(parse_loose_date("3 days ago"), None);
        assert_eq!(parse_loose_date("01/02/2020"), None);
        assert_eq!(parse_loose_date(""), None);
    }

    #[test]
    fn dates_in_bylines() {
        assert_eq!(
            find_date_in_text("By Jane Doe | Published March 3, 2021"),
            Some(d("2021-03-03"))
        );
        assert_eq!(find_date_in_text("Updated 2019-12-01 08:00"), Some(d("2019-12-01")));
        assert_eq!(find_date_in_text("no date here"), None);
    }
}
