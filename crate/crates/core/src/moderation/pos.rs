//! Coarse part-of-speech tagging: closed-class word lists, a few suffix
//! rules, and noun as the fallback.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoarseTag {
    Noun,
    Verb,
    Adjective,
    Adverb,
    Other,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PosCounts {
    pub noun: usize,
    pub verb: usize,
    pub adjective: usize,
    pub adverb: usize,
    pub other: usize,
}

impl PosCounts {
    pub fn add(&mut self, tag: CoarseTag) {
        match tag {
            CoarseTag::Noun => self.noun += 1,
            CoarseTag::Verb => self.verb += 1,
            CoarseTag::Adjective => self.adjective += 1,
            CoarseTag::Adverb => self.adverb += 1,
            CoarseTag::Other => self.other += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.noun + self.verb + self.adjective + self.adverb + self.other
    }
}

const FUNCTION_WORDS: &[&str] = &[
    // determiners
    "a", "an", "the", "this", "that", "these", "those", "each", "every", "some", "any", "no", "all",
    "both", "either", "neither", "another", "such",
    // pronouns
    "i", "me", "my", "mine", "myself", "you", "your", "yours", "yourself", "he", "him", "his",
    "himself", "she", "her", "hers", "herself", "it", "its", "itself", "we", "us", "our", "ours",
    "they", "them", "their", "theirs", "who", "whom", "whose", "what", "which", "someone",
    "something", "anyone", "anything", "everyone", "everything", "nothing", "i'm", "you're",
    "it's", "that's",
    // prepositions
    "about", "above", "across", "after", "against", "along", "among", "around", "as", "at",
    "before", "behind", "below", "beside", "between", "beyond", "by", "despite", "down", "during",
    "for", "from", "in", "inside", "into", "near", "of", "off", "on", "onto", "out", "outside",
    "over", "past", "per", "since", "through", "throughout", "to", "toward", "towards", "under",
    "until", "up", "upon", "with", "within", "without",
    // conjunctions and particles
    "and", "or", "but", "nor", "so", "yet", "because", "if", "while", "although", "though",
    "unless", "whether", "than",
];

const VERBS: &[&str] = &[
    "is", "am", "are", "was", "were", "be", "been", "being", "have", "has", "had", "do", "does",
    "did", "can", "could", "will", "would", "shall", "should", "may", "might", "must", "get",
    "got", "make", "made", "keep", "try", "use", "look", "see", "seem", "seems", "speak", "talk",
    "say", "said", "think", "know", "need", "feel", "sound", "sounds", "smile", "move", "don't",
    "didn't", "doesn't", "can't", "won't",
];

const ADVERBS: &[&str] = &[
    "very", "not", "too", "really", "also", "just", "always", "never", "often", "sometimes",
    "quite", "well", "more", "most", "less", "here", "there", "now", "then", "again", "maybe",
    "perhaps", "still", "even", "almost", "enough", "indeed", "rather", "soon", "only",
];

const ADJECTIVES: &[&str] = &[
    "good", "great", "nice", "bad", "poor", "clear", "better", "best", "worse", "worst", "fine",
    "strong", "weak", "loud", "quiet", "soft", "calm", "natural", "confident", "friendly",
    "lovely", "early", "ugly", "likely", "lonely", "silly", "little", "big", "small", "long",
    "short", "fast", "slow", "high", "low", "new", "old", "awesome", "cool", "happy", "sad",
    "nervous", "relaxed", "stiff", "monotone", "professional", "engaging", "interesting",
];

const NOUN_EXCEPTIONS: &[&str] = &[
    "thing", "things", "something", "nothing", "everything", "anything", "morning", "evening",
    "ceiling", "feeling", "speed", "seed", "bed", "family", "reply", "supply", "belly", "rally",
    "hand", "hands",
];

/// Tags one already-lowercased word.
pub fn tag_word(word: &str) -> CoarseTag {
    if word.is_empty() || word.chars().all(|c| c.is_ascii_digit()) {
        return CoarseTag::Other;
    }
    if FUNCTION_WORDS.contains(&word) {
        return CoarseTag::Other;
    }
    if VERBS.contains(&word) {
        return CoarseTag::Verb;
    }
    if ADVERBS.contains(&word) {
        return CoarseTag::Adverb;
    }
    if ADJECTIVES.contains(&word) {
        return CoarseTag::Adjective;
    }
    if NOUN_EXCEPTIONS.contains(&word) {
        return CoarseTag::Noun;
    }
    let long = word.chars().count() > 4;
    if long && word.ends_with("ly") {
        CoarseTag::Adverb
    } else if long && (word.ends_with("ing") || word.ends_with("ed")) {
        CoarseTag::Verb
    } else if ["ous", "ful", "ive", "less", "able"].iter().any(|s| word.ends_with(s)) {
        CoarseTag::Adjective
    } else {
        CoarseTag::Noun
    }
}

/// Word-level tags for free text (split on anything but letters, digits and apostrophes).
pub fn tag_text(text: &str) -> Vec<(String, CoarseTag)> {
    text.split(|c: char| !(c.is_alphanumeric() || c == '\''))
        .map(|w| w.trim_matches('\'').to_lowercase())
        .filter(|w| !w.is_empty())
        .map(|w| {
            let tag = tag_word(&w);
            (w, tag)
        })
        .collect()
}

pub fn pos_counts(text: &str) -> PosCounts {
    let mut counts = PosCounts::default();
    for (_, tag) in tag_text(text) {
        counts.add(tag);
    }
    counts
}
