use crate::data::TriageRecord;

/// Lowercase and split on any run of non-alphanumeric characters,
/// dropping empty pieces.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|s| !s.is_empty())
        .map(|s| s.to_lowercase())
        .collect()
}

/// All text tokens of a record: notes, then medications, then symptoms.
pub fn record_tokens(record: &TriageRecord) -> Vec<String> {
    let mut tokens = tokenize(&record.notes);
    for m in &record.medications {
        tokens.extend(tokenize(m));
    }
    for s in &record.symptoms {
        tokens.extend(tokenize(s));
    }
    tokens
}
