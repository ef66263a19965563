# Copyright 2026 The entailrank Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Regenerates the synthetic test fixtures in this directory.

The fixtures are committed; rerun only when changing their shape:
    python3 make_fixtures.py
"""

import json
import os
import random

HERE = os.path.dirname(os.path.abspath(__file__))

TOPICS = [
    ["immigration", "officer", "refugee", "claimant", "removal", "risk"],
    ["procedural", "fairness", "hearing", "notice", "tribunal", "bias"],
    ["standard", "review", "reasonableness", "deference", "decision", "maker"],
    ["evidence", "credibility", "testimony", "documents", "inconsistent", "weight"],
    ["judicial", "application", "leave", "federal", "court", "jurisdiction"],
    ["humanitarian", "compassionate", "hardship", "children", "interests", "best"],
    ["patent", "infringement", "claims", "construction", "invention", "prior"],
    ["costs", "award", "tariff", "solicitor", "client", "discretion"],
    ["delay", "abuse", "process", "stay", "prejudice", "proceedings"],
    ["visa", "student", "permit", "study", "program", "financial"],
]
FILLER = ["the", "of", "and", "to", "in", "that", "is", "was", "for", "on", "by", "with",
          "applicant", "respondent", "minister", "paragraph", "act", "section", "found", "held"]
PLACEHOLDERS = ["FRAGMENT_SUPPRESSED", "REFERENCE_SUPPRESSED", "CITATION_SUPPRESSED"]


def sentence(rng, topic, n, topical_share):
    words = []
    for _ in range(n):
        if rng.random() < topical_share:
            words.append(rng.choice(topic))
        else:
            words.append(rng.choice(FILLER))
    words[0] = words[0].capitalize()
    if rng.random() < 0.3:
        words.insert(rng.randrange(len(words) + 1), rng.choice(PLACEHOLDERS))
    return " ".join(words) + "."


def make_fixture_20(rng):
    instances = []
    for qi in range(20):
        topic = TOPICS[qi % len(TOPICS)]
        n_cand = rng.randint(5, 9)
        n_gold = 2 if qi % 4 == 0 else 1
        gold_idx = sorted(rng.sample(range(n_cand), n_gold))
        cands = []
        for ci in range(n_cand):
            if ci in gold_idx:
                text = sentence(rng, topic, rng.randint(14, 24), 0.45)
            else:
                other = TOPICS[rng.randrange(len(TOPICS))]
                text = sentence(rng, other, rng.randint(12, 26), 0.25)
            cands.append({"para_id": "%03d" % (ci + 1), "text": text})
        instances.append({
            "query_id": "q%03d" % (qi + 1),
            "query_text": sentence(rng, topic, rng.randint(10, 16), 0.5),
            "candidates": cands,
            "gold": ["%03d" % (g + 1) for g in gold_idx],
        })
    return instances


MODELS = ["bert_large", "roberta_large", "legal_bert_base", "deberta_v3_large", "monot5_3b"]
MODEL_SIGNAL = {"bert_large": 0.8, "roberta_large": 1.0, "legal_bert_base": 0.9,
                "deberta_v3_large": 1.3, "monot5_3b": 1.6}


def write_score_files(rng, instances):
    os.makedirs(os.path.join(HERE, "scores"), exist_ok=True)
    for model in MODELS:
        lines = []
        for inst in instances:
            gold = set(inst["gold"])
            for c in inst["candidates"]:
                s = rng.gauss(0.0, 1.0) + (MODEL_SIGNAL[model] if c["para_id"] in gold else 0.0)
                if model == "monot5_3b":
                    s = 1.0 / (1.0 + 2.718281828459045 ** (-s))
                lines.append("%s\t%s\t%.6f" % (inst["query_id"], c["para_id"], s))
        with open(os.path.join(HERE, "scores", model + ".tsv"), "w") as f:
            f.write("\n".join(lines) + "\n")


def make_stats_fixture(rng):
    # 5 queries, 20 candidates, 6 positives: averages 4.0 and 1.2.
    sizes = [3, 4, 5, 4, 4]
    golds = [1, 2, 1, 1, 1]
    out = []
    for qi, (n, g) in enumerate(zip(sizes, golds)):
        cands = [{"para_id": "p%d" % (i + 1), "text": sentence(rng, TOPICS[qi], 8, 0.5)}
                 for i in range(n)]
        out.append({"query_id": "s%d" % (qi + 1),
                    "query_text": sentence(rng, TOPICS[qi], 6, 0.5),
                    "candidates": cands,
                    "gold": ["p%d" % (i + 1) for i in range(g)]})
    return out


def write_jsonl(name, instances):
    with open(os.path.join(HERE, name), "w") as f:
        for inst in instances:
            f.write(json.dumps(inst) + "\n")


def main():
    rng = random.Random(20230601)
    fixture = make_fixture_20(rng)
    write_jsonl("fixture_20.jsonl", fixture)
    write_score_files(rng, fixture)
    write_jsonl("stats_fixture.jsonl", make_stats_fixture(rng))


if __name__ == "__main__":
    main()
