"""Regenerates the bundled fixture tree. Output is fixed by the seed."""
import json
import random

rng = random.Random(20241)

EMOTIONS = ["anger", "disgust", "fear", "joy", "love", "sadness", "surprise"]

DIALECT = [
    "he ain't never coming back to this town",
    "she steady talking about that new job",
    "they be at the park every single weekend",
    "my cousin done finished the whole plate already",
    "she a teacher at the school down the street",
    "we was at some random-ass party last night",
    "i told his ass to stop calling my phone",
    "y'all finna see how this game ends tonight",
    "he been knew about the surprise for weeks",
    "that movie had me crying like a baby fr",
]
NEUTRAL = [
    "the weather today is really nice and warm",
    "i finished reading a great book this morning",
    "our team won the match by two points",
    "the new coffee shop opened near my office",
    "traffic on the bridge was slow again today",
    "my sister sent me photos from her trip",
    "we cooked dinner together and watched a show",
    "the library extended its hours for the summer",
]
TAILS = ["so happy", "so mad", "kinda scared", "really sad", "love it", "gross honestly", "wow unreal", ""]

# 2x2 grid of unit tracts, plus a far tract that no neighborhood claims.
TRACTS = {
    "17031000100": (0.0, 0.0),
    "17031000200": (1.0, 0.0),
    "17031000300": (0.0, 1.0),
    "17031000400": (1.0, 1.0),
    "17031000500": (5.0, 5.0),
}
HOODS = [("Bronzeville", ["17031000100"]), ("Hyde Park", ["17031000200"]), ("Lakeview", ["17031000300", "17031000400"])]
DEMO = {
    "17031000100": (2000, 80.0, 12.0),
    "17031000200": (1500, 45.0, 40.0),
    "17031000300": (1000, 10.0, 75.0),
    "17031000400": (3000, 20.0, 70.0),
    "17031000500": (500, 30.0, 60.0),
}


def corpus():
    posts = []
    for i in range(60):
        base = rng.choice(DIALECT if i % 2 == 0 else NEUTRAL)
        tail = rng.choice(TAILS)
        text = (base + " " + tail).strip()
        if i % 11 == 3:
            text = "@" + rng.choice(["dre", "kay_b", "mo"]) + " " + text
        if i % 13 == 5:
            text += " \U0001F602"
        post = {"id": f"p{i:03d}", "text": text}
        if i % 9 != 4:
            geoid = list(TRACTS)[:4][i % 4] if i % 17 != 7 else "17031000500"
            x, y = TRACTS[geoid]
            post["lon"] = round(-87.7 + (x + 0.1 + 0.8 * rng.random()) * 0.01, 6)
            post["lat"] = round(41.8 + (y + 0.1 + 0.8 * rng.random()) * 0.01, 6)
        posts.append(post)
    posts.append({"id": "p900", "text": "check this out https://example.com right now please"})
    posts.append({"id": "p901", "text": "so tired today"})
    return posts


def annotations(ids):
    rows = []
    raters = [("in1", "ingroup"), ("in2", "ingroup"), ("out1", "outgroup"), ("out2", "outgroup")]
    for pid in ids:
        for rater, group in raters:
            labels = {e: rng.choice([1, 1, 1, 2, 2, 3]) for e in EMOTIONS}
            rows.append({"post_id": pid, "annotator_id": rater, "group": group, "labels": labels})
    return rows


def predictions(ids, model, kind):
    out = []
    for pid in ids:
        if kind == "scores":
            scores = {e: round(rng.random() * 0.2, 4) for e in EMOTIONS}
            out.append({"post_id": pid, "model_id": model, "scores": scores})
        elif rng.random() < 0.05:
            out.append({"post_id": pid, "model_id": model, "prompt_schema": "few", "refusal": True})
        else:
            labels = sorted(rng.sample(EMOTIONS + ["admiration", "annoyance"], rng.randint(1, 3)))
            out.append({"post_id": pid, "model_id": model, "prompt_schema": "few", "labels": labels})
    return out


def square(x, y):
    lon0, lat0 = -87.7 + x * 0.01, 41.8 + y * 0.01
    return [[lon0, lat0], [lon0 + 0.01, lat0], [lon0 + 0.01, lat0 + 0.01], [lon0, lat0 + 0.01], [lon0, lat0]]


def write_jsonl(path, rows):
    with open(path, "w") as f:
        for r in rows:
            f.write(json.dumps(r, ensure_ascii=False) + "\n")


def main():
    posts = corpus()
    write_jsonl("corpus.jsonl", posts)
    ids = [p["id"] for p in posts[:60]]
    write_jsonl("annotations.jsonl", annotations(ids[:40]))
    write_jsonl("predictions.jsonl", predictions(ids[:40], "spanemo", "scores") + predictions(ids[:40], "gpt-4", "labels"))
    write_jsonl("full_predictions.jsonl", predictions(ids, "spanemo", "scores"))
    features = [
        {"type": "Feature", "properties": {"GEOID": g}, "geometry": {"type": "Polygon", "coordinates": [square(*xy)]}}
        for g, xy in TRACTS.items()
    ]
    with open("tracts.geojson", "w") as f:
        json.dump({"type": "FeatureCollection", "features": features}, f, indent=1)
        f.write("\n")
    with open("demographics.csv", "w") as f:
        f.write("GEOID,population,pct_black,pct_white\n")
        for g, (pop, b, w) in DEMO.items():
            f.write(f"{g},{pop},{b},{w}\n")
    with open("neighborhoods.csv", "w") as f:
        f.write("neighborhood,GEOID\n")
        for name, geoids in HOODS:
            for g in geoids:
                f.write(f"{name},{g}\n")
    lexicon = [
        ("happy", "joy"), ("love", "joy"), ("love", "positive"), ("mad", "anger"), ("scared", "fear"),
        ("sad", "sadness"), ("crying", "sadness"), ("gross", "disgust"), ("wow", "surprise"),
        ("surprise", "surprise"), ("surprise", "anticipation"), ("great", "trust"), ("nice", "trust"),
    ]
    with open("lexicon.tsv", "w") as f:
        f.write("# word\temotion\tflag (fixture sample)\n")
        for w, e in lexicon:
            f.write(f"{w}\t{e}\t1\n")
        f.write("bridge\tfear\t0\n")


if __name__ == "__main__":
    main()
