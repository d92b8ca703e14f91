"""Regenerates metric_fixture.json: reference BLEU / ROUGE values computed
with NLTK (sentence_bleu, smoothing method1) and Google's rouge-score.

    pip install nltk rouge-score
    python3 make_metric_fixture.py > metric_fixture.json
"""
import json
import re

from nltk.translate.bleu_score import SmoothingFunction, sentence_bleu
from rouge_score import rouge_scorer

PAIRS = [
    ("Genre: The user enjoys science fiction", "Genre: The user enjoys science fiction"),
    ("Genre: The user enjoys science fiction", "Decade: 1990s only"),
    ("Genre: The user enjoys science fiction\nTone: Dark and brooding",
     "Genre: The user enjoys science fiction and horror\nTone: Dark and brooding\nHumor: Dry wit"),
    ("Tone: Dark", "Genre: The user enjoys science fiction\nTone: Dark and brooding"),
    ("the the the the the the the", "the cat is on the mat"),
    ("the cat", "the cat is on the mat"),
    ("cat", "the cat is on the mat"),
    ("mat on the cat is the", "the cat is on the mat"),
    ("Directors: Kubrick and Tarkovsky\nDecade: 1970s", "Decade: 1970s\nDirectors: Kubrick and Tarkovsky"),
    ("Visual Style: noir, high-contrast lighting; long takes!",
     "Visual Style: noir lighting with long takes"),
    ("Special Effects: practical effects over CGI\nAtmosphere: eerie",
     "Special Effects: practical effects\nAtmosphere: eerie and tense\nFilm Era: New Hollywood"),
    ("Humor: slapstick", "Humor: slapstick"),
    ("a b c d e f g h", "h g f e d c b a"),
    ("a b a b a b", "a b c a b c a b c"),
    ("Film Era: Golden Age of Hollywood", "Film Era: the golden age of hollywood cinema"),
    ("Genre: Thriller\nGenre2: Thriller Thriller", "Genre: Thriller"),
    ("Decade: 1980s and 1990s", "Decade: 1990s and 1980s"),
    ("Atmosphere: cozy, warm, nostalgic", "Atmosphere: cold, clinical, detached"),
    ("x y", "x y z w v u t s r q p"),
    ("Tone: hopeful\nHumor: dry\nGenre: drama\nDecade: 2000s\nDirectors: Nolan",
     "Directors: Nolan\nDecade: 2000s\nGenre: drama\nHumor: dry\nTone: hopeful\nVisual Style: muted"),
]


def tokens(text):
    return re.findall(r"[a-z0-9]+", text.lower())


def bleu(cand, ref):
    c, r = tokens(cand), tokens(ref)
    if not c:
        return 0.0
    n = min(4, len(c))
    return sentence_bleu([r], c, weights=tuple([1.0 / n] * n),
                         smoothing_function=SmoothingFunction().method1)


scorer = rouge_scorer.RougeScorer(["rouge1", "rougeL"], use_stemmer=False)
rows = []
for cand, ref in PAIRS:
    s = scorer.score(ref, cand)
    rows.append({
        "candidate": cand,
        "reference": ref,
        "bleu": float(bleu(cand, ref)),
        "rouge1_f": s["rouge1"].fmeasure,
        "rougeL_f": s["rougeL"].fmeasure,
    })
print(json.dumps(rows, indent=1))
