"""Regenerate the VADER oracle fixtures from the reference implementation.

    pip download vaderSentiment==3.3.2 --no-deps -d /tmp/vd
    python3 -m zipfile -e /tmp/vd/vaderSentiment-3.3.2-py2.py3-none-any.whl /tmp/vd/x
    PYTHONPATH=/tmp/vd/x python3 gen_vader_fixtures.py

Writes vader_golden.jsonl (100 hand-picked sentences) and vader_fuzz.jsonl
(random sentences built from lexicon, booster and negation vocabulary).
Output rounding is disabled so values carry full double precision.
"""
import json
import os
import random

from vaderSentiment import vaderSentiment as vs

vs.round = lambda x, n=None: x
analyzer = vs.SentimentIntensityAnalyzer()

HERE = os.path.dirname(os.path.abspath(__file__))

GOLDEN = [
    "VADER is smart, handsome, and funny.",
    "VADER is smart, handsome, and funny!",
    "VADER is very smart, handsome, and funny.",
    "VADER is VERY SMART, handsome, and FUNNY.",
    "VADER is VERY SMART, handsome, and FUNNY!!!",
    "VADER is VERY SMART, uber handsome, and FRIGGIN FUNNY!!!",
    "VADER is not smart, handsome, nor funny.",
    "The book was good.",
    "At least it isn't a horrible book.",
    "The book was only kind of good.",
    "The plot was good, but the characters are uncompelling and the dialog is not great.",
    "Today SUX!",
    "Today only kinda sux! But I'll get by, lol",
    "Make sure you :) or :D today!",
    "Catch utf-8 emoji such as 💘 and 💋 and 😁",
    "Not bad at all",
    "Sentiment analysis has never been good.",
    "Sentiment analysis has never been this good!",
    "Most automated sentiment analysis tools are shit.",
    "With VADER, sentiment analysis is the shit!",
    "Other sentiment analysis tools can be quite bad.",
    "On the other hand, VADER is quite bad ass",
    "VADER is such a badass!",
    "Without a doubt, excellent idea.",
    "Roger Dodger is one of the most compelling variations on this theme.",
    "Roger Dodger is at least compelling as a variation on the theme.",
    "Roger Dodger is one of the least compelling variations on this theme.",
    "Not such a badass after all.",
    "Without a doubt, an excellent idea.",
    "It was one of the worst movies I've seen, despite good reviews.",
    "Unbelievably bad acting!!",
    "Poor direction.",
    "VERY poor production.",
    "The movie was bad.",
    "Very bad movie.",
    "VERY BAD movie!",
    "Same folks said daikon paste could treat a cytokine storm #PfizerBioNTech",
    "While the world has been on the wrong side of history this year hopefully the biggest vaccination effort weveev",
    "#coronavirus #SputnikV #AstraZeneca #PfizerBioNTech #Moderna #Covid19 Russian vaccine is created to last 2 4 years",
    "Facts are immutable, Senator, even when you're not ethically sturdy enough to acknowledge them 1 You were born i",
    "Does anyone have any useful advice/guidance for whether the COVID vaccine is safe whilst breastfeeding",
    "it is a bit sad to claim the fame for success of #vaccination on patriotic competition between USA Canada UK and",
    "There have not been many bright days in 2020 but here are some of the best",
    "Covid vaccine You getting it #CovidVaccine #covid19 #PfizerBioNTech #Moderna",
    "#CovidVaccine States will start getting #COVID19Vaccine Monday #US says #pakustv #NYC #Healthcare #GlobalGoals",
    "Same folks said daikon paste could treat a cytokine storm PfizerBioNTech",
    "Does anyone have any useful adviceguidance for whether the COVID vaccine is safe whilst breastfeeding",
    "There have been many bright days in 2020 and here are some of the best",
    "good",
    "not good",
    "no good",
    "no problem at all",
    "I have no doubt this vaccine works",
    "This is not the worst thing ever",
    "I am so happy I got my second dose",
    "I am SO HAPPY I got my second dose",
    "The side effects were kind of awful",
    "The side effects were sort of awful but I am grateful",
    "Feeling slightly sick after the shot",
    "Feeling extremely sick after the shot",
    "I'm not sure the vaccine is safe??",
    "Is the vaccine safe???",
    "Is the vaccine safe????",
    "Is it safe?",
    "Thank you to all the nurses!!!!!",
    "Thank you to all the nurses!",
    "what a disaster",
    "What a DISASTER this rollout has been",
    "never so good",
    "never this bad",
    "without doubt the best",
    "the least helpful answer",
    "at least helpful",
    "very least helpful",
    "least helpful",
    "this is the bomb",
    "yeah right like that will work",
    "kiss of death for the program",
    "a vaccine to die for",
    "bus stop queues everywhere",
    "he is a badass nurse",
    "that was a bad ass move",
    "I don't like waiting in line",
    "Nobody hates the vaccine",
    "The rollout isn't great, but it isn't terrible either",
    "Great news! But the supply is limited and people are angry",
    "Great news but the supply is limited and people are angry",
    "I love love love this",
    "LOL the line was so long",
    "I'm scared of needles :(",
    "Got my jab today :-)",
    "Got my jab today 😷 feeling fine 👍",
    "Deaths reported after vaccination in Norway",
    "Hope everyone stays safe and healthy",
    "Pfizer vaccine approved for emergency use",
    "Moderna shipments delayed again, frustrating",
    "I feel absolutely fantastic after my booster",
    "I feel barely okay after my booster",
    "Not happy, not sad, just tired",
    "",
]

assert len(GOLDEN) == 100, len(GOLDEN)


def scores(text):
    d = analyzer.polarity_scores(text)
    return {"text": text, "pos": d["pos"], "neg": d["neg"], "neu": d["neu"], "compound": d["compound"]}


def write(path, texts):
    with open(path, "w", encoding="utf-8") as f:
        for t in texts:
            f.write(json.dumps(scores(t), ensure_ascii=False) + "\n")


def fuzz_sentences(n, seed=20210717):
    rng = random.Random(seed)
    lex_words = sorted(k for k in analyzer.lexicon if k.isalpha() and k.islower())
    boosters = sorted(k for k in vs.BOOSTER_DICT if " " not in k)
    negations = sorted(k for k in vs.NEGATE)
    fillers = ["the", "vaccine", "shot", "dose", "people", "today", "is", "was", "and",
               "of", "so", "this", "no", "or", "nor", "but", "least", "at", "very",
               "kind", "of", "sort", "never", "without", "doubt", "to", "die", "for",
               "the", "bomb", "bad", "ass", "yeah", "right", ":)", ":(", ":D", "😁", "💔"]
    out = []
    for _ in range(n):
        words = []
        for _ in range(rng.randint(1, 14)):
            r = rng.random()
            if r < 0.35:
                w = rng.choice(lex_words)
            elif r < 0.5:
                w = rng.choice(boosters)
            elif r < 0.62:
                w = rng.choice(negations)
            else:
                w = rng.choice(fillers)
            c = rng.random()
            if c < 0.12:
                w = w.upper()
            elif c < 0.2:
                w = w.capitalize()
            p = rng.random()
            if p < 0.08:
                w += "!" * rng.randint(1, 5)
            elif p < 0.14:
                w += "?" * rng.randint(1, 5)
            elif p < 0.2:
                w += rng.choice([",", ".", "...", ";"])
            words.append(w)
        out.append(" ".join(words))
    return out


if __name__ == "__main__":
    write(os.path.join(HERE, "vader_golden.jsonl"), GOLDEN)
    write(os.path.join(HERE, "vader_fuzz.jsonl"), fuzz_sentences(2000))
