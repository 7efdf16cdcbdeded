"""MBR over a handful of text hypotheses with lexical utilities.

The candidates double as pseudo-references, so the pick is the sentence that
agrees most with the others.
"""

from ambr import exact_mbr, make_rng, ambr
from ambr.core import Instance
from ambr.metrics import lexical_oracle, rouge_l_f1, sentence_bleu, tokenize, unigram_f1

HYPOTHESES = [
    "the cat sat on the mat",
    "a cat sat on the mat",
    "the cat is sitting on the mat",
    "the dog sat on the rug",
    "on the mat sat the cat",
    "the cat sat on a mat today",
]


def main():
    a, b = tokenize(HYPOTHESES[0]), tokenize(HYPOTHESES[1])
    print(f"unigram F1 {unigram_f1(a, b):.3f}  ROUGE-L {rouge_l_f1(a, b):.3f}  "
          f"BLEU {sentence_bleu(a, b):.3f}")

    inst = Instance(id="cats", candidates=HYPOTHESES)
    for name in ("unigram_f1", "rouge_l", "bleu"):
        sel = exact_mbr(inst, lexical_oracle(inst, name))
        print(f"{name:>10}: {HYPOTHESES[sel.chosen]!r}")

    T = 12
    sel = ambr(inst, lexical_oracle(inst, "rouge_l", budget=T), T, make_rng(0))
    print(f"AMBR with {T} ROUGE-L calls: {HYPOTHESES[sel.chosen]!r}")


if __name__ == "__main__":
    main()
