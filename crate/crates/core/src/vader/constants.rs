//! Heuristic constants and word lists of the VADER rule set.
//!
//! All values are copied from the reference implementation
//! (`vaderSentiment` 3.3.2, `vaderSentiment.py`, MIT licensed) so that
//! scores agree with it to floating-point rounding.

/// Booster increment (`B_INCR`).
pub const BOOSTER_INCR: f64 = 0.293;
/// Dampener increment (`B_DECR`).
pub const BOOSTER_DECR: f64 = -0.293;
/// ALL-CAPS emphasis on a sentiment word or booster (`C_INCR`).
pub const CAPS_INCR: f64 = 0.733;
/// Multiplier applied to a negated valence (`N_SCALAR`).
pub const NEGATION_SCALAR: f64 = -0.74;
/// Normalization constant of the compound score (`normalize(alpha=15)`).
pub const NORMALIZE_ALPHA: f64 = 15.0;

/// Booster decay for the word two positions back.
pub const BOOSTER_DECAY_2: f64 = 0.95;
/// Booster decay for the word three positions back.
pub const BOOSTER_DECAY_3: f64 = 0.9;
/// "never so/this good" amplification.
pub const NEVER_SO_SCALAR: f64 = 1.25;

/// Weight on sentiment before a contrastive conjunction.
pub const BUT_BEFORE_WEIGHT: f64 = 0.5;
/// Weight on sentiment after a contrastive conjunction.
pub const BUT_AFTER_WEIGHT: f64 = 1.5;

/// Per-'!' increment (`_amplify_ep`), capped at [`EXCLAMATION_MAX_COUNT`].
pub const EXCLAMATION_INCR: f64 = 0.292;
pub const EXCLAMATION_MAX_COUNT: usize = 4;
/// Per-'?' increment when 2 or 3 are present (`_amplify_qm`).
pub const QUESTION_INCR: f64 = 0.18;
/// Flat question-mark increment for more than 3.
pub const QUESTION_CAP: f64 = 0.96;

/// Classification cutoff on the compound score.
pub const DEFAULT_THRESHOLD: f64 = 0.05;

pub const NEGATIONS: &[&str] = &[
    "aint", "arent", "cannot", "cant", "couldnt", "darent", "didnt", "doesnt", "ain't", "aren't",
    "can't", "couldn't", "daren't", "didn't", "doesn't", "dont", "hadnt", "hasnt", "havent",
    "isnt", "mightnt", "mustnt", "neither", "don't", "hadn't", "hasn't", "haven't", "isn't",
    "mightn't", "mustn't", "neednt", "needn't", "never", "none", "nope", "nor", "not", "nothing",
    "nowhere", "oughtnt", "shant", "shouldnt", "uhuh", "wasnt", "werent", "oughtn't", "shan't",
    "shouldn't", "uh-uh", "wasn't", "weren't", "without", "wont", "wouldnt", "won't", "wouldn't",
    "rarely", "seldom", "despite",
];

pub const BOOSTERS_UP: &[&str] = &[
    "absolutely", "amazingly", "awfully", "completely", "considerable", "considerably",
    "decidedly", "deeply", "effing", "enormous", "enormously", "entirely", "especially",
    "exceptional", "exceptionally", "extreme", "extremely", "fabulously", "flipping", "flippin",
    "frackin", "fracking", "fricking", "frickin", "frigging", "friggin", "fully", "fuckin",
    "fucking", "fuggin", "fugging", "greatly", "hella", "highly", "hugely", "incredible",
    "incredibly", "intensely", "major", "majorly", "more", "most", "particularly", "purely",
    "quite", "really", "remarkably", "so", "substantially", "thoroughly", "total", "totally",
    "tremendous", "tremendously", "uber", "unbelievably", "unusually", "utter", "utterly", "very",
];

pub const BOOSTERS_DOWN: &[&str] = &[
    "almost", "barely", "hardly", "just enough", "kind of", "kinda", "kindof", "kind-of", "less",
    "little", "marginal", "marginally", "occasional", "occasionally", "partly", "scarce",
    "scarcely", "slight", "slightly", "somewhat", "sort of", "sorta", "sortof", "sort-of",
];

/// Idioms and phrases containing lexicon words, with replacement valences.
pub const SPECIAL_CASES: &[(&str, f64)] = &[
    ("the shit", 3.0),
    ("the bomb", 3.0),
    ("bad ass", 1.5),
    ("badass", 1.5),
    ("bus stop", 0.0),
    ("yeah right", -2.0),
    ("kiss of death", -1.5),
    ("to die for", 3.0),
    ("beating heart", 3.5),
];

pub const CONTRASTIVE_CONJUNCTIONS: &[&str] = &["but"];
