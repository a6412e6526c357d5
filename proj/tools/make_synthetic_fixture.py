#!/usr/bin/env python3
"""Writes the bundled three-task synthetic instruction corpus.

The three tasks stand in for general QA, arithmetic and code generation. They
are template generated so that input lengths overlap across tasks and every
task has several hundred samples. Output is deterministic for a given seed.

    python3 tools/make_synthetic_fixture.py --out data/synthetic --per-task 360
"""

import argparse
import json
import pathlib
import random

CAPITALS = {
    "france": "paris", "germany": "berlin", "italy": "rome", "spain": "madrid",
    "portugal": "lisbon", "japan": "tokyo", "china": "beijing", "india": "delhi",
    "egypt": "cairo", "kenya": "nairobi", "peru": "lima", "chile": "santiago",
    "canada": "ottawa", "mexico": "mexico", "brazil": "brasilia", "norway": "oslo",
    "sweden": "stockholm", "finland": "helsinki", "poland": "warsaw", "greece": "athens",
    "turkey": "ankara", "russia": "moscow", "austria": "vienna", "ireland": "dublin",
    "cuba": "havana", "iran": "tehran", "iraq": "baghdad", "thailand": "bangkok",
    "vietnam": "hanoi", "nepal": "kathmandu",
}
COLORS = {
    "sky": "blue", "grass": "green", "snow": "white", "coal": "black", "blood": "red",
    "banana": "yellow", "orange": "orange", "cloud": "white", "lemon": "yellow", "leaf": "green",
}
QA_TEMPLATES = [
    ("what is the capital of {c} ?", "the capital of {c} is {a} ."),
    ("name the capital city of {c} .", "{a} is the capital of {c} ."),
    ("which city is the capital of {c} ?", "the capital is {a} ."),
    ("tell me the capital of the country {c} please .", "the capital of {c} is {a} ."),
]
COLOR_TEMPLATES = [
    ("what color is the {c} usually ?", "the {c} is usually {a} ."),
    ("tell me the usual color of a {c} .", "a {c} is {a} ."),
]
MATH_OPS = [
    ("plus", lambda x, y: x + y),
    ("minus", lambda x, y: x - y),
    ("times", lambda x, y: x * y),
]
MATH_TEMPLATES = [
    ("what is {x} {op} {y} ?", "{x} {op} {y} equals {r} ."),
    ("compute {x} {op} {y} and give the answer .", "the answer is {r} ."),
    ("please calculate the value of {x} {op} {y} .", "{r}"),
]
CODE_OPS = [
    ("sum", "add", "{a} + {b}"),
    ("difference", "sub", "{a} - {b}"),
    ("product", "mul", "{a} * {b}"),
    ("maximum", "biggest", "max ( {a} , {b} )"),
    ("minimum", "smallest", "min ( {a} , {b} )"),
]
CODE_TEMPLATES = [
    "write a python function that returns the {what} of {a} and {b} .",
    "implement a function computing the {what} of {a} and {b} in python .",
    "give me python code for the {what} of two numbers {a} and {b} .",
]
VARS = ["x", "y", "a", "b", "m", "n", "p", "q"]


def qa_samples(rng, count):
    out = []
    while len(out) < count:
        if rng.random() < 0.75:
            c, a = rng.choice(sorted(CAPITALS.items()))
            q, r = rng.choice(QA_TEMPLATES)
        else:
            c, a = rng.choice(sorted(COLORS.items()))
            q, r = rng.choice(COLOR_TEMPLATES)
        out.append({"instruction": q.format(c=c), "input": "", "output": r.format(c=c, a=a)})
    return out


def math_samples(rng, count):
    out = []
    while len(out) < count:
        op, fn = rng.choice(MATH_OPS)
        x, y = rng.randint(0, 12), rng.randint(0, 12)
        q, r = rng.choice(MATH_TEMPLATES)
        out.append({"instruction": q.format(x=x, op=op, y=y), "output": r.format(x=x, op=op, y=y, r=fn(x, y))})
    return out


def code_samples(rng, count):
    out = []
    while len(out) < count:
        what, name, body = rng.choice(CODE_OPS)
        a, b = rng.sample(VARS, 2)
        q = rng.choice(CODE_TEMPLATES)
        code = "def {n} ( {a} , {b} ) : return ".format(n=name, a=a, b=b) + body.format(a=a, b=b)
        sample = {"instruction": q.format(what=what, a=a, b=b), "output": code}
        if rng.random() < 0.3:
            sample["input"] = "use one line ."
        out.append(sample)
    return out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="data/synthetic")
    ap.add_argument("--per-task", type=int, default=360)
    ap.add_argument("--seed", type=int, default=20240501)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name, make in (("qa", qa_samples), ("math", math_samples), ("code", code_samples)):
        with open(out / f"{name}.jsonl", "w", encoding="utf-8") as f:
            for s in make(rng, args.per_task):
                f.write(json.dumps(s) + "\n")


if __name__ == "__main__":
    main()
