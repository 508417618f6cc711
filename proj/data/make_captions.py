"""Generates the desk-scale caption corpus (face-photo style captions).

Usage: python3 make_captions.py [count] [seed] > captions.txt
"""
import random
import sys

SUBJECTS = ["a woman", "a man", "a young woman", "a young man", "an old man", "an old woman",
            "a girl", "a boy", "a smiling woman", "a smiling man"]
HAIR = ["blond hair", "black hair", "brown hair", "gray hair", "red hair", "curly hair",
        "short hair", "long hair", "wavy hair", "straight hair"]
EXTRAS = ["glasses", "a beard", "a mustache", "earrings", "a hat", "a necklace", "bangs",
          "heavy makeup", "a big smile", "rosy cheeks"]
ACTIONS = ["smiling", "looking at the camera", "looking to the side", "with her mouth open",
           "with his mouth open", "posing for a photo", "standing outdoors", "in front of a wall",
           "wearing a black shirt", "wearing a white shirt"]


def caption(rng):
    parts = [rng.choice(SUBJECTS), "with", rng.choice(HAIR)]
    if rng.random() < 0.6:
        parts += ["and", rng.choice(EXTRAS)]
    if rng.random() < 0.5:
        parts.append(rng.choice(ACTIONS))
    text = " ".join(parts)
    if len(text.split()) > 12:
        return None
    return text


def main():
    count = int(sys.argv[1]) if len(sys.argv) > 1 else 200
    seed = int(sys.argv[2]) if len(sys.argv) > 2 else 11
    rng = random.Random(seed)
    seen = set()
    out = []
    while len(out) < count:
        c = caption(rng)
        if c is None or c in seen:
            continue
        seen.add(c)
        out.append(c)
    print("\n".join(out))


if __name__ == "__main__":
    main()
