/// Splits `text` into sentences of lowercased alphanumeric tokens.
///
/// Sentences end at `.`, `!`, `?` and newlines. Tokens are maximal runs of
/// alphanumeric characters; every other character separates tokens. Sentences
/// without tokens are dropped.
pub fn tokenize_and_split(text: &str) -> Vec<Vec<String>> {
    let mut sentences = Vec::new();
    let mut sentence: Vec<String> = Vec::new();
    let mut token = String::new();

    for ch in text.chars() {
        if ch.is_alphanumeric() {
            token.extend(ch.to_lowercase());
            continue;
        }
        if !token.is_empty() {
            sentence.push(std::mem::take(&mut token));
        }
        if matches!(ch, '.' | '!' | '?' | '\n') && !sentence.is_empty() {
            sentences.push(std::mem::take(&mut sentence));
        }
    }
    if !token.is_empty() {
        sentence.push(token);
    }
    if !sentence.is_empty() {
        sentences.push(sentence);
    }
    sentences
}
