//! Seeded synthetic data: the planted-token classification task and a
//! tweet-like vaccine corpus for runs where the real export is unavailable.

use chrono::{Duration, TimeZone, Utc};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ingest::TweetRecord;
use crate::polarity::Polarity;

pub const POS_TOKEN: &str = "pos";
pub const NEG_TOKEN: &str = "neg";

/// Token sequences of 4–12 filler words. Class 2 sequences contain
/// [`POS_TOKEN`] once, class 1 contain [`NEG_TOKEN`] once, class 0 neither.
pub fn planted_task(n: usize, seed: u64) -> (Vec<Vec<String>>, Vec<Polarity>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fillers: Vec<String> = (0..50).map(|i| format!("w{i}")).collect();
    let mut docs = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let len = rng.gen_range(4..=12);
        let mut doc: Vec<String> = (0..len).map(|_| fillers.choose(&mut rng).unwrap().clone()).collect();
        let label = Polarity::from_index(rng.gen_range(0..3)).unwrap();
        let marker = match label {
            Polarity::Positive => Some(POS_TOKEN),
            Polarity::Negative => Some(NEG_TOKEN),
            Polarity::Neutral => None,
        };
        if let Some(m) = marker {
            let at = rng.gen_range(0..len);
            doc[at] = m.to_owned();
        }
        docs.push(doc);
        labels.push(label);
    }
    (docs, labels)
}

const OPENERS: &[&str] = &[
    "Got my first dose of",
    "Just received the",
    "Waiting for my second shot of",
    "My mom finally got",
    "Booked an appointment for",
    "The rollout of",
    "Latest news on",
    "Reports about",
    "Thinking about getting",
    "Nurses are administering",
    "Our clinic started offering",
    "Health officials discussed",
];

const VACCINES: &[&str] = &[
    "Pfizer",
    "Moderna",
    "AstraZeneca",
    "Covaxin",
    "Sputnik V",
    "Sinovac",
    "Sinopharm",
    "the vaccine",
    "PfizerBioNTech",
];

const POSITIVE: &[&str] = &[
    "feeling great",
    "so grateful to the staff",
    "thank you to the amazing nurses",
    "finally some hope",
    "happy and relieved",
    "best day this year",
    "excellent news for everyone",
    "proud of science",
    "what a wonderful team",
    "love how smooth it was",
    "safe and effective",
    "glad it was easy",
];

const NEGATIVE: &[&str] = &[
    "my arm is so sore",
    "feeling awful today",
    "worried about side effects",
    "terrible organization",
    "horrible headache all night",
    "scared and anxious",
    "angry about the delays",
    "sad news from the hospital",
    "this chaos is ridiculous",
    "fever and pain since yesterday",
    "no doses left again",
    "a disaster for the elderly",
];

const NEUTRAL: &[&str] = &[
    "at the clinic today",
    "in the city center",
    "according to the ministry",
    "doses delivered this week",
    "appointment scheduled for Monday",
    "more details tomorrow",
    "second dose in four weeks",
    "registration opens at noon",
    "data released by the agency",
    "phase three results published",
];

const BOOSTERS: &[&str] = &["very", "really", "extremely", "quite", "so"];

const HASHTAGS: &[&str] = &[
    "CovidVaccine",
    "PfizerBioNTech",
    "Moderna",
    "covid19",
    "vaccine",
    "Covaxin",
    "SputnikV",
    "AstraZeneca",
    "vaccinated",
    "COVID19",
];

const SOURCES: &[(&str, u32)] = &[
    ("Twitter for Android", 35),
    ("Twitter Web App", 30),
    ("Twitter for iPhone", 25),
    ("TweetDeck", 5),
    ("Hootsuite Inc.", 5),
];

const LOCATIONS: &[&str] = &[
    "New York, NY",
    "London, England",
    "Toronto, Ontario",
    "Mumbai, India",
    "United States",
    "Canada",
    "India",
    "UK",
    "Los Angeles, CA",
    "Berlin, Germany",
    "Moscow, Russia",
    "",
];

fn weighted_source(rng: &mut ChaCha8Rng) -> &'static str {
    let total: u32 = SOURCES.iter().map(|s| s.1).sum();
    let mut r = rng.gen_range(0..total);
    for (name, w) in SOURCES {
        if r < *w {
            return name;
        }
        r -= w;
    }
    SOURCES[0].0
}

/// A tweet-like corpus over Dec 2020 – Jul 2021 with ids "1".."n".
///
/// Text mixes openers, vaccine names, sentiment phrases (sometimes negated
/// or boosted), neutral detail, hashtags and links. No labels are attached;
/// score the text to get them.
pub fn vaccine_corpus(n: usize, seed: u64) -> Vec<TweetRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = Utc.with_ymd_and_hms(2020, 12, 12, 0, 0, 0).unwrap();
    let span_secs = 230 * 24 * 3600;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut parts: Vec<String> = Vec::new();
        parts.push(format!(
            "{} {}",
            OPENERS.choose(&mut rng).unwrap(),
            VACCINES.choose(&mut rng).unwrap()
        ));
        let mood = rng.gen_range(0..10);
        let phrase = match mood {
            0..=3 => Some(POSITIVE.choose(&mut rng).unwrap()),
            4..=5 => Some(NEGATIVE.choose(&mut rng).unwrap()),
            _ => None,
        };
        if let Some(p) = phrase {
            let mut p = p.to_string();
            if rng.gen_bool(0.2) {
                p = format!("{} {}", BOOSTERS.choose(&mut rng).unwrap(), p);
            }
            if rng.gen_bool(0.1) {
                p = format!("not {p}");
            }
            parts.push(p);
        }
        if rng.gen_bool(0.7) {
            parts.push(NEUTRAL.choose(&mut rng).unwrap().to_string());
        }
        if rng.gen_bool(0.15) {
            parts.push(POSITIVE.choose(&mut rng).unwrap().to_string());
        }
        if rng.gen_bool(0.1) {
            parts.push(NEGATIVE.choose(&mut rng).unwrap().to_string());
        }
        let n_tags = [0usize, 0, 1, 1, 1, 2, 2, 3][rng.gen_range(0..8)];
        let mut tags: Vec<String> = Vec::new();
        for _ in 0..n_tags {
            let t = HASHTAGS.choose(&mut rng).unwrap().to_string();
            if !tags.contains(&t) {
                tags.push(t);
            }
        }
        let mut text = parts.join(", ");
        for t in &tags {
            text.push_str(&format!(" #{t}"));
        }
        if rng.gen_bool(0.4) {
            text.push_str(&format!(" https://t.co/{:010x}", rng.gen::<u64>() & 0xff_ffff_ffff));
        }
        // Volume ramps up towards spring.
        let frac: f64 = rng.gen::<f64>().sqrt();
        let date = start + Duration::seconds((frac * span_secs as f64) as i64);
        let location = LOCATIONS.choose(&mut rng).unwrap();
        out.push(TweetRecord {
            id: (i + 1).to_string(),
            user_name: format!("user{}", rng.gen_range(0..5000)),
            user_location: (!location.is_empty()).then(|| location.to_string()),
            user_description: None,
            user_created: None,
            user_followers: Some(rng.gen_range(0..20_000)),
            user_friends: Some(rng.gen_range(0..5_000)),
            user_favourites: Some(rng.gen_range(0..50_000)),
            user_verified: Some(rng.gen_bool(0.05)),
            date,
            text,
            hashtags: tags,
            source: weighted_source(&mut rng).to_owned(),
            retweets: Some(rng.gen_range(0..20)),
            favorites: Some(rng.gen_range(0..100)),
            is_retweet: Some(false),
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn planted_labels_match_markers() {
        let (docs, labels) = planted_task(500, 1);
        for (d, l) in docs.iter().zip(&labels) {
            let has_pos = d.iter().any(|t| t == POS_TOKEN);
            let has_neg = d.iter().any(|t| t == NEG_TOKEN);
            assert_eq!(*l == Polarity::Positive, has_pos);
            assert_eq!(*l == Polarity::Negative, has_neg);
        }
        assert_eq!(planted_task(50, 9), planted_task(50, 9));
    }

    #[test]
    fn corpus_is_deterministic_and_dated() {
        let a = vaccine_corpus(200, 3);
        assert_eq!(a, vaccine_corpus(200, 3));
        let end = Utc.with_ymd_and_hms(2021, 8, 1, 0, 0, 0).unwrap();
        assert!(a.iter().all(|r| r.date < end && !r.text.trim().is_empty()));
        assert!(a.iter().any(|r| !r.hashtags.is_empty()));
    }
}
