"""Freeze reference English Snowball stems into tests/fixtures/stems.tsv.

Usage: python snowball_english.py WORDLIST > stems.tsv
Requires the snowballstemmer package (3.x).
"""

import random
import sys

import snowballstemmer

SUFFIXES = ["", "s", "es", "ed", "ing", "ly", "ness", "ation", "ational", "izer", "ization", "ities",
            "ity", "ful", "fully", "lessly", "ously", "ively", "ement", "ical", "ically", "able", "ibly",
            "er", "ies", "y", "eed", "eedly", "ingly", "edly", "ism", "alism", "ence", "ance", "ion",
            "al", "ative", "icate", "alize", "ogist"]

SPECIAL = ["skis", "skies", "dying", "lying", "tying", "idly", "gently", "ugly", "early", "only",
           "singly", "sky", "news", "howe", "atlas", "cosmos", "bias", "andes", "inning", "outing",
           "canning", "herring", "earring", "proceed", "exceed", "succeed", "evening", "added",
           "generalizations", "communities", "universe", "university", "international", "organic",
           "past", "pasted", "lateral", "emergency", "kiwis", "gas", "gaps", "ties", "cries", "yay",
           "happiness", "blacklivesmatter", "prioritize", "cities", "priorities", "psychologist"]


def main() -> None:
    base = sorted({w.strip() for w in open(sys.argv[1]) if w.strip().isalpha() and len(w.strip()) <= 14})
    rng = random.Random(2018)
    words = set(SPECIAL)
    for w in rng.sample(base, min(1500, len(base))):
        words.add(w)
        for s in rng.sample(SUFFIXES, 3):
            words.add(w + s)
    stemmer = snowballstemmer.stemmer("english")
    for w in sorted(words):
        print(f"{w}\t{stemmer.stemWord(w)}")


if __name__ == "__main__":
    main()
