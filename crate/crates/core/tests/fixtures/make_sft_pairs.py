"""Build sft_pairs.jsonl from corpus.jsonl: instruction/response pairs for the SFT formatters."""

import json
import os
import random

HERE = os.path.dirname(os.path.abspath(__file__))
SEED = 20250612

TABLE_PAIR = {
    "id": "pair-table",
    "instruction": (
        "Provide a detailed analysis of Candace Parker's defensive techniques in her recent games, "
        'excluding the words "aggressive" and "blocking", in the format of a sports commentary script.'
    ),
    "response": (
        "[Sports Commentary Script]\n"
        "[Opening Scene: A packed basketball arena, with fans eagerly awaiting the analysis of "
        "Candace Parker’s recent performances on the court.]\n"
        "Commentator 1: Welcome back, basketball fans! Tonight, we're diving into the defensive "
        "prowess of Candace Parker..."
    ),
}


def main():
    with open(os.path.join(HERE, "corpus.jsonl"), encoding="utf-8") as f:
        lines = [json.loads(l)["text"] for l in f][:1000]
    lines = [l.strip() for l in lines if len(l.split()) >= 4]
    rng = random.Random(SEED)
    pairs = [TABLE_PAIR]
    for i in range(100):
        instruction = rng.choice(lines)
        response = "\n".join(rng.sample(lines, rng.randint(2, 5)))
        pairs.append({"id": f"pair-{i:03d}", "instruction": instruction, "response": response})
    with open(os.path.join(HERE, "sft_pairs.jsonl"), "w", encoding="utf-8") as f:
        for p in pairs:
            f.write(json.dumps(p, ensure_ascii=False) + "\n")
    print(f"pairs={len(pairs)}")


if __name__ == "__main__":
    main()
