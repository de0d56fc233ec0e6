#!/usr/bin/env python3
"""Generate a small synthetic English-like treebank in CoNLL-U format.

Sentences come from a seeded probabilistic grammar with UD part-of-speech
tags and relations: noun phrases with determiners, adjectives and
compounds, prepositional phrases whose attachment depends on the
preposition, auxiliaries, adverbs, object and complement clauses,
coordination and final punctuation.

    python3 scripts/gen_synthetic_ud.py --seed 7 --train 1000 --dev 200 --out data
"""

import argparse
import os
import random

LEX = {
    "DET": ["the", "a", "this", "every", "some", "that", "no"],
    "ADJ": ["old", "red", "quiet", "large", "small", "new", "strange", "happy",
            "long", "green", "cold", "bright"],
    "NOUN": ["dog", "cat", "teacher", "book", "garden", "river", "letter", "city",
             "child", "table", "window", "song", "doctor", "car", "house", "friend",
             "storm", "market", "key", "story", "bridge", "student", "bottle", "tree"],
    "PROPN": ["Anna", "Boris", "Paris", "Chen", "Maria", "Oslo", "Tom"],
    "PRON": ["she", "he", "they", "we", "it", "I", "you"],
    "VERB_T": ["saw", "found", "read", "opened", "painted", "bought", "wrote",
               "carried", "liked", "watched", "built", "lost"],
    "VERB_I": ["slept", "arrived", "laughed", "waited", "smiled", "left", "ran"],
    "VERB_C": ["said", "thought", "knew", "believed", "noticed"],
    "AUX": ["will", "can", "must", "did", "should"],
    "ADV": ["quickly", "often", "never", "slowly", "today", "again", "soon"],
    "ADP_V": ["into", "towards", "after", "during", "through"],
    "ADP_N": ["of", "with", "from"],
    "ADP_X": ["near", "behind", "under", "on", "in"],
    "CCONJ": ["and", "but", "or"],
    "SCONJ": ["that", "because", "while", "if"],
    "NUM": ["two", "three", "five", "ten"],
}


class Builder:
    def __init__(self, rng):
        self.rng = rng
        self.tokens = []  # [form, upos, head (index into tokens or -1), deprel]

    def add(self, form, upos, deprel):
        self.tokens.append([form, upos, None, deprel])
        return len(self.tokens) - 1

    def attach(self, dep, head):
        self.tokens[dep][2] = head

    def word(self, cls):
        return self.rng.choice(LEX[cls])

    # Each phrase method returns (ordered token ids, head id).

    def noun_phrase(self, depth, allow_pp=True):
        r = self.rng
        if r.random() < 0.2:
            upos = "PRON" if r.random() < 0.6 else "PROPN"
            h = self.add(self.word(upos), upos, "_")
            return [h], h
        ids = []
        deps = []
        if r.random() < 0.85:
            d = self.add(self.word("DET"), "DET", "det")
            ids.append(d)
            deps.append(d)
        elif r.random() < 0.3:
            d = self.add(self.word("NUM"), "NUM", "nummod")
            ids.append(d)
            deps.append(d)
        for _ in range(r.choice([0, 0, 0, 1, 1, 2])):
            a = self.add(self.word("ADJ"), "ADJ", "amod")
            ids.append(a)
            deps.append(a)
        if r.random() < 0.1:
            c = self.add(self.word("NOUN"), "NOUN", "compound")
            ids.append(c)
            deps.append(c)
        h = self.add(self.word("NOUN"), "NOUN", "_")
        ids.append(h)
        for d in deps:
            self.attach(d, h)
        if allow_pp and depth < 2 and r.random() < 0.3:
            cls = "ADP_N" if r.random() < 0.7 else "ADP_X"
            pp_ids, pp_head = self.prep_phrase(cls, depth + 1)
            self.tokens[pp_head][3] = "nmod"
            self.attach(pp_head, h)
            ids += pp_ids
        return ids, h

    def prep_phrase(self, cls, depth):
        case = self.add(self.word(cls), "ADP", "case")
        np_ids, np_head = self.noun_phrase(depth, allow_pp=depth < 2)
        self.attach(case, np_head)
        return [case] + np_ids, np_head

    def clause(self, depth):
        r = self.rng
        ids = []
        subj_ids, subj = self.noun_phrase(depth)
        self.tokens[subj][3] = "nsubj"
        ids += subj_ids
        pre = []
        if r.random() < 0.25:
            a = self.add(self.word("AUX"), "AUX", "aux")
            pre.append(a)
        if r.random() < 0.2:
            a = self.add(self.word("ADV"), "ADV", "advmod")
            pre.append(a)
        ids += pre
        kind = r.choices(["T", "I", "C"], weights=[6, 3, 1 if depth < 1 else 0])[0]
        v = self.add(self.word("VERB_" + kind), "VERB", "_")
        ids.append(v)
        self.attach(subj, v)
        for a in pre:
            self.attach(a, v)
        if kind == "T":
            obj_ids, obj = self.noun_phrase(depth)
            self.tokens[obj][3] = "obj"
            self.attach(obj, v)
            ids += obj_ids
        elif kind == "C":
            m = self.add("that", "SCONJ", "mark") if r.random() < 0.7 else None
            c_ids, c = self.clause(depth + 1)
            self.tokens[c][3] = "ccomp"
            self.attach(c, v)
            if m is not None:
                self.attach(m, c)
                ids.append(m)
            ids += c_ids
            return ids, v
        for _ in range(r.choice([0, 0, 1, 1, 2])):
            cls = r.choice(["ADP_V", "ADP_X", "ADP_X"])
            pp_ids, pp = self.prep_phrase(cls, depth + 1)
            self.tokens[pp][3] = "obl"
            self.attach(pp, v)
            ids += pp_ids
        if r.random() < 0.15:
            a = self.add(self.word("ADV"), "ADV", "advmod")
            self.attach(a, v)
            ids.append(a)
        if depth < 1 and r.random() < 0.12:
            m = self.add(self.word("SCONJ"), "SCONJ", "mark")
            c_ids, c = self.clause(depth + 1)
            self.tokens[c][3] = "advcl"
            self.attach(m, c)
            self.attach(c, v)
            ids += [m] + c_ids
        return ids, v

    def sentence(self):
        r = self.rng
        ids, root = self.clause(0)
        self.tokens[root][3] = "root"
        self.attach(root, -1)
        if r.random() < 0.15:
            cc = self.add(self.word("CCONJ"), "CCONJ", "cc")
            c_ids, c = self.clause(1)
            self.tokens[c][3] = "conj"
            self.attach(cc, c)
            self.attach(c, root)
            ids += [cc] + c_ids
        p = self.add("." if r.random() < 0.9 else "!", "PUNCT", "punct")
        self.attach(p, root)
        ids.append(p)
        return ids


def render(builder, ids, sent_id):
    pos = {tok: i + 1 for i, tok in enumerate(ids)}
    forms = [builder.tokens[t][0] for t in ids]
    forms[0] = forms[0][0].upper() + forms[0][1:]
    text = ""
    lines = [f"# sent_id = {sent_id}"]
    rows = []
    for i, t in enumerate(ids):
        form, upos, head, rel = builder.tokens[t]
        form = forms[i]
        nxt = builder.tokens[ids[i + 1]][1] if i + 1 < len(ids) else None
        space_after = nxt != "PUNCT" and i + 1 < len(ids)
        text += form + (" " if space_after else "")
        h = 0 if head == -1 else pos[head]
        misc = "_" if space_after or i + 1 == len(ids) else "SpaceAfter=No"
        lemma = form.lower() if upos != "PROPN" else form
        rows.append(f"{i + 1}\t{form}\t{lemma}\t{upos}\t_\t_\t{h}\t{rel}\t_\t{misc}")
    lines.append(f"# text = {text}")
    return "\n".join(lines + rows) + "\n\n"


def generate(rng, count, prefix, max_len):
    out = []
    while len(out) < count:
        b = Builder(rng)
        ids = b.sentence()
        if len(ids) > max_len:
            continue
        out.append(render(b, ids, f"{prefix}-{len(out) + 1:04d}"))
    return "".join(out)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--train", type=int, default=1000)
    ap.add_argument("--dev", type=int, default=200)
    ap.add_argument("--max-len", type=int, default=40)
    ap.add_argument("--out", default="data")
    args = ap.parse_args()
    rng = random.Random(args.seed)
    os.makedirs(args.out, exist_ok=True)
    for name, count in [("train", args.train), ("dev", args.dev)]:
        path = os.path.join(args.out, f"synthetic-{name}.conllu")
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(generate(rng, count, name, args.max_len))


if __name__ == "__main__":
    main()
