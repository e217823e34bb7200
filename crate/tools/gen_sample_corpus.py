#!/usr/bin/env python3
"""Regenerates data/sample_corpus.csv.

The corpus is synthetic but shaped like real color-name collections: ~28
hue anchors, each with a handful of names, jittered RGB samples, six
sources, inconsistent raw formatting, and merged-word spellings of some
multi-word names. Deterministic for a fixed seed.
"""

import csv
import random
from pathlib import Path

SEED = 20240813
ROWS = 1000
OUT = Path(__file__).resolve().parent.parent / "data" / "sample_corpus.csv"

SOURCES = ["webcolors", "survey", "catalog", "paints", "textiles", "naming"]

# (base_rgb, [names]); merged spellings are listed explicitly so their
# spaced counterparts always coexist in the corpus.
ANCHORS = [
    ((220, 20, 60), ["red", "crimson", "blood red", "brick red", "fire red", "scarlet"]),
    ((135, 206, 235), ["sky blue", "light sky blue", "baby blue", "ice blue", "lightskyblue", "skyblue"]),
    ((0, 191, 255), ["deep sky blue", "cerulean", "azure", "deepskyblue"]),
    ((25, 25, 112), ["navy blue", "midnight blue", "indigo", "navyblue"]),
    ((65, 105, 225), ["royal blue", "cobalt", "sapphire", "royalblue"]),
    ((0, 128, 128), ["teal", "teal blue", "petrol", "tealblue"]),
    ((34, 139, 34), ["forest green", "evergreen", "pine green", "forestgreen"]),
    ((46, 139, 87), ["sea green", "dark sea green", "viridian", "seagreen", "darkseagreen"]),
    ((152, 251, 152), ["mint green", "seafoam", "pistachio", "mintgreen"]),
    ((50, 205, 50), ["lime green", "chartreuse", "spring green", "limegreen"]),
    ((128, 128, 0), ["olive green", "moss green", "khaki"]),
    ((255, 215, 0), ["golden yellow", "sun yellow", "gold", "amber"]),
    ((250, 240, 100), ["lemon yellow", "canary yellow", "butter yellow"]),
    ((255, 140, 0), ["burnt orange", "pumpkin orange", "tangerine", "apricot"]),
    ((255, 127, 80), ["coral", "salmon", "peach"]),
    ((255, 105, 180), ["hot pink", "rose pink", "magenta", "fuchsia", "hotpink"]),
    ((255, 209, 220), ["pastel pink", "baby pink", "blush"]),
    ((128, 0, 128), ["royal purple", "plum purple", "violet", "amethyst"]),
    ((150, 120, 200), ["lavender purple", "lilac", "mauve"]),
    ((139, 69, 19), ["chocolate brown", "coffee brown", "saddle brown", "umber"]),
    ((194, 178, 128), ["sand brown", "beige", "tan", "ecru"]),
    ((128, 0, 32), ["maroon", "burgundy", "oxblood", "wine red"]),
    ((128, 128, 128), ["slate gray", "ash gray", "stone gray", "slategray"]),
    ((54, 69, 79), ["charcoal gray", "graphite", "gunmetal"]),
    ((242, 240, 235), ["snow white", "pearl white", "cream white", "ivory", "snowwhite"]),
    ((12, 12, 12), ["jet black", "coal black", "onyx", "jetblack"]),
    ((64, 224, 208), ["turquoise", "aqua", "cyan"]),
    ((135, 196, 111), ["mantis", "bud green", "fern green", "asparagus"]),
]


def clamp(v):
    return max(0, min(255, v))


def letters_only(name):
    return "".join(c for c in name.lower() if c.isalpha())


def format_variant(name, rng):
    style = rng.randrange(6)
    if style == 0:
        return name
    if style == 1:
        return name.title()
    if style == 2:
        return name.upper()
    if style == 3:
        return name.replace(" ", "-")
    if style == 4:
        return name.replace(" ", "_")
    return f" {name} "


def main():
    rng = random.Random(SEED)
    used = set()  # (letters_only, rgb): distinct post-segmentation rows
    rows = []
    anchor_idx = 0
    while len(rows) < ROWS:
        base, names = ANCHORS[anchor_idx % len(ANCHORS)]
        anchor_idx += 1
        name = rng.choice(names)
        for _ in range(20):
            if rng.random() < 0.08:
                rgb = base
            else:
                rgb = tuple(clamp(c + rng.randint(-14, 14)) for c in base)
            key = (letters_only(name), rgb)
            if key not in used:
                used.add(key)
                break
        else:
            continue
        raw = format_variant(name, rng)
        hexcode = "#{:02x}{:02x}{:02x}".format(*rgb)
        source = rng.choice(SOURCES)
        rows.append((raw, hexcode, "{};{};{}".format(*rgb), source))

    OUT.parent.mkdir(parents=True, exist_ok=True)
    with OUT.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["name", "hex", "rgb", "source"])
        writer.writerows(rows)
    print(f"wrote {len(rows)} rows to {OUT}")


if __name__ == "__main__":
    main()
