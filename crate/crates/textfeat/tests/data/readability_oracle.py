"""Independent oracle for readability_golden.csv.

Counts words, sentences, syllables, letters, polysyllables, long words and
unfamiliar words with regular expressions, then evaluates the formulas.
Run from this directory: python3 readability_oracle.py > readability_golden.csv
"""
import csv
import math
import re
import sys

TEXTS = [
    "The cat sat.",
    "The cat sat on the mat. The dog ran away!",
    "Readability formulas estimate how difficult a passage is to understand.",
    "Is this working? Yes it is. Absolutely wonderful news for everyone involved!",
    "I love this game so much!!! Best day ever",
    "Government officials announced comprehensive infrastructure investments yesterday.",
    "no punctuation here at all just words flowing on",
    "Short. Very short. Tiny.",
    "The quick brown fox jumps over the lazy dog. It was a beautiful morning in the village.",
    "Statistics and probability are fundamental to scientific understanding of variability.",
    "We will vote tomorrow, and then we will see what happens with the referendum results.",
    "Version 2.5 was released in 2022. Upgrade now!",
    "make table queue rhythm free create little apple",
    "Excellent! Unbelievable! Astonishing! Incredible!",
    "My family went to the park and we had a picnic with sandwiches and lemonade.",
    "Photosynthesis converts electromagnetic radiation into chemical energy within chloroplasts.",
    "Why? Because. Okay then, fine.",
    "The children played happily while their parents talked about politics and economics.",
    "a b c d e f g. h i j k.",
    "Everyone should understand the importance of democratic participation and civic responsibility in modern societies.",
]

def load_familiar(path):
    words = set()
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if line and not line.startswith("#"):
                words.update(w.lower() for w in line.split())
    return words

def word_tokens(text):
    return [t for t in re.findall(r"\S+", text) if re.search(r"\w", t) and re.search(r"[^\W_]", t)]

def sentences(text):
    if not word_tokens(text):
        return 0
    parts = re.split(r"[.!?](?=\s|$)", text)
    n = sum(1 for p in parts if re.search(r"[^\W_]", p))
    return max(n, 1)

def syllables(word):
    letters = "".join(c for c in word.lower() if c.isalpha())
    if not letters:
        return 1 if re.search(r"[^\W_]", word) else 0
    groups = len(re.findall(r"[aeiouy]+", letters))
    if re.search(r"[^aeiouyl]e$", letters) and len(letters) > 2 and groups > 1:
        groups -= 1
    return max(groups, 1)

def familiar_form(w, familiar):
    if re.fullmatch(r"[0-9]+", w) or w in familiar:
        return True
    for suffix in ["'s", "s", "es", "ed", "d", "ing", "ly"]:
        if w.endswith(suffix) and len(w) > len(suffix) and w[: -len(suffix)] in familiar:
            return True
    return False

def normalize(token):
    return re.sub(r"^[\W_]+|[\W_]+$", "", token).lower()

def scores(text, familiar):
    ws = word_tokens(text)
    s = sentences(text)
    if not ws or s == 0:
        return [math.nan] * 9 + [0.0, 0.0]
    w = len(ws)
    syl = sum(syllables(t) for t in ws)
    letters = sum(len(re.findall(r"[^\W_]", t)) for t in ws)
    poly = sum(1 for t in ws if syllables(t) >= 3)
    long_words = sum(1 for t in ws if len(re.findall(r"[^\W_]", t)) > 6)
    difficult = sum(1 for t in ws if not familiar_form(normalize(t), familiar))
    pct = 100.0 * difficult / w
    dale = 0.1579 * pct + 0.0496 * w / s + (3.6365 if pct > 5.0 else 0.0)
    return [
        11.8 * syl / w + 0.39 * w / s - 15.59,
        4.71 * letters / w + 0.5 * w / s - 21.43,
        0.0588 * (100.0 * letters / w) - 0.296 * (100.0 * s / w) - 15.8,
        206.835 - 84.6 * syl / w - 1.015 * w / s,
        0.4 * (w / s + 100.0 * poly / w),
        1.0430 * math.sqrt(poly * 30.0 / s) + 3.1291,
        w / s + 100.0 * long_words / w,
        long_words / s,
        dale,
        float(poly),
        float(difficult),
    ]

def main():
    familiar = load_familiar("../../data/familiar.txt")
    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["text"] + [f"r{i}" for i in range(1, 12)])
    for t in TEXTS:
        out.writerow([t] + [repr(v) for v in scores(t, familiar)])

main()
