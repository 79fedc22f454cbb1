use std::collections::HashSet;
use std::sync::LazyLock;

use chrono::NaiveDate;
use regex::Regex;
use url::Url;

use super::{FetchError, ResultReference};

static ROW_SPLIT: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?i)<tr[\s>]").unwrap());
static HREF: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r#"(?i)href\s*=\s*["']([^"']+)["']"#).unwrap());
static RESULT_SLUG: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(power_ssj2008-(\d{8})-\d{5})(\.[A-Za-z0-9]+)?$").unwrap());
static STRUCK: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)<(s|strike|del)[\s>]").unwrap());
static TAG: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"<[^>]*>").unwrap());
static TEXT_MARKER: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"\b(NC|(?i:non-?compliant|not\s+accepted|withdrawn))\b").unwrap()
});

fn listing_marker(chunk: &str) -> Option<String> {
    let text = TAG.replace_all(chunk, " ");
    if let Some(m) = TEXT_MARKER.find(&text) {
        return Some(m.as_str().to_string());
    }
    STRUCK.is_match(chunk).then(|| "struck-through".to_string())
}

/// Extracts result references from the publisher's HTML listing.
///
/// Every table row (or line, for listings without tables) that links to a
/// result slug is an entry; the entry must offer a `.txt` variant.
pub fn parse_index(html: &str, base_url: &str) -> Result<Vec<ResultReference>, FetchError> {
    let base = Url::parse(base_url).map_err(|e| FetchError::IndexFormat {
        construct: format!("base URL {base_url:?}: {e}"),
    })?;
    let chunks: Vec<&str> = if ROW_SPLIT.is_match(html) {
        ROW_SPLIT.split(html).skip(1).collect()
    } else {
        html.lines().collect()
    };

    let mut seen = HashSet::new();
    let mut refs = Vec::new();
    for chunk in chunks {
        let result_links: Vec<&str> = HREF
            .captures_iter(chunk)
            .map(|c| c.get(1).unwrap().as_str())
            .filter(|href| RESULT_SLUG.is_match(href.split(['?', '#']).next().unwrap_or(href)))
            .collect();
        let Some(&first) = result_links.first() else {
            continue;
        };
        let txt = result_links
            .iter()
            .find(|h| h.to_ascii_lowercase().ends_with(".txt"))
            .ok_or_else(|| FetchError::IndexFormat {
                construct: format!("result entry without .txt link: href={first:?}"),
            })?;
        let url = base.join(txt).map_err(|e| FetchError::IndexFormat {
            construct: format!("href={txt:?}: {e}"),
        })?;
        let path = txt.split(['?', '#']).next().unwrap_or(txt);
        let caps = RESULT_SLUG.captures(path).expect("filtered above");
        let result_id = caps[1].to_string();
        let published = NaiveDate::parse_from_str(&caps[2], "%Y%m%d").ok();
        if !seen.insert(result_id.clone()) {
            continue;
        }
        refs.push(ResultReference {
            result_id,
            url: url.to_string(),
            publication_marker: listing_marker(chunk),
            published,
        });
    }
    Ok(refs)
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = "https://www.spec.org/power_ssj2008/results/power_ssj2008.html";

    #[test]
    fn rows_with_text_links() {
        let html = r#"<table>
<tr><th>Sponsor</th><th>System</th></tr>
<tr><td>Lenovo</td><td><a href="res2023q1/power_ssj2008-20230221-01234.html">HTML</a>
 | <a href="res2023q1/power_ssj2008-20230221-01234.txt">Text</a></td></tr>
<tr><td>Acme <span>NC</span></td><td><a href="res2010q1/power_ssj2008-20100126-00214.txt">Text</a></td></tr>
<tr><td><s>Old</s></td><td><a href="res2008q4/power_ssj2008-20081103-00088.txt">Text</a></td></tr>
</table>"#;
        let refs = parse_index(html, BASE).unwrap();
        assert_eq!(refs.len(), 3);
        assert_eq!(refs[0].result_id, "power_ssj2008-20230221-01234");
        assert_eq!(
            refs[0].url,
            "https://www.spec.org/power_ssj2008/results/res2023q1/power_ssj2008-20230221-01234.txt"
        );
        assert_eq!(refs[0].publication_marker, None);
        assert_eq!(refs[0].published, NaiveDate::from_ymd_opt(2023, 2, 21));
        assert_eq!(refs[1].publication_marker.as_deref(), Some("NC"));
        assert_eq!(refs[2].publication_marker.as_deref(), Some("struck-through"));
    }

    #[test]
    fn empty_listing() {
        assert!(parse_index("<html><body>No results</body></html>", BASE).unwrap().is_empty());
    }

    #[test]
    fn entry_without_txt_is_an_error() {
        let html = r#"<tr><td><a href="res/power_ssj2008-20230221-01234.html">HTML</a></td></tr>"#;
        let err = parse_index(html, BASE).unwrap_err();
        match err {
            FetchError::IndexFormat { construct } => assert!(construct.contains("01234.html")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn duplicate_ids_collapse() {
        let html = "<a href=\"a/power_ssj2008-20230221-01234.txt\">x</a>\n<a href=\"b/power_ssj2008-20230221-01234.txt\">y</a>\n";
        assert_eq!(parse_index(html, BASE).unwrap().len(), 1);
    }
}
