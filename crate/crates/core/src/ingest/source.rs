use std::collections::BTreeSet;

/// Source-code extensions kept for analysis.
pub const DEFAULT_EXTENSIONS: [&str; 21] = [
    "py", "java", "rb", "c", "cpp", "h", "php", "sh", "cs", "scss", "html", "scala", "js", "css",
    "clj", "ctp", "erb", "go", "haml", "hs", "sql",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceFilter {
    extensions: BTreeSet<String>,
}

impl Default for SourceFilter {
    fn default() -> Self {
        SourceFilter::new(DEFAULT_EXTENSIONS.iter().copied())
    }
}

impl SourceFilter {
    /// Extensions are matched case-sensitively without the leading dot.
    pub fn new<I, S>(extensions: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        SourceFilter {
            extensions: extensions
                .into_iter()
                .map(|e| e.as_ref().trim_start_matches('.').to_string())
                .collect(),
        }
    }

    pub fn extensions(&self) -> impl Iterator<Item = &str> {
        self.extensions.iter().map(String::as_str)
    }

    pub fn accepts(&self, file_path: &str) -> bool {
        is_source_file(file_path, &self.extensions)
    }
}

/// True iff the final extension is listed and no part of the path contains
/// "test" in any letter case. Both `/` and `\` separate path segments.
pub fn is_source_file(file_path: &str, extensions: &BTreeSet<String>) -> bool {
    if file_path.to_lowercase().contains("test") {
        return false;
    }
    let name = file_path.rsplit(['/', '\\']).next().unwrap_or(file_path);
    match name.rsplit_once('.') {
        Some((stem, ext)) if !stem.is_empty() => extensions.contains(ext),
        _ => false,
    }
}
