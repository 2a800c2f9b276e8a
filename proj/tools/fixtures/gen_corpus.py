#!/usr/bin/env python3
"""Generate the simulation fixture under data/.

Writes stopwords.txt, lexicon.tsv, ontology.tsv, corpus/ (100 html pages plus
manifest.tsv), seed_stores/ (personal profiles and sckb.jsonl) and
simulation.json. Output is deterministic. Requires nltk for the Porter stemmer
used to pre-normalize words stored in the seed profiles.

    python3 tools/fixtures/gen_corpus.py [--out data]
"""

import argparse
import json
import random
import re
import shutil
from pathlib import Path

from nltk.stem.porter import PorterStemmer

STOPWORDS = """a about above after again against all am an and any are as at be because been before
being below between both but by can could did do does doing down during each few for from further had
has have having he her here hers herself him himself his how i if in into is it its itself just me
more most my myself no nor not now of off on once only or other our ours ourselves out over own same
she should so some such than that the their theirs them themselves then there these they this those
through to too under until up very was we were what when where which while who whom why will with
would you your yours yourself yourselves like also""".split()

_stemmer = PorterStemmer(mode=PorterStemmer.ORIGINAL_ALGORITHM)
_stop = set(STOPWORDS)


def norm_term(tok):
    t = tok.lower()
    while True:
        s = t if len(t) <= 2 or not t.isalpha() else _stemmer.stem(t)
        if s == t:
            return t
        t = s


def normalize(text):
    out = []
    for tok in re.split(r"[^0-9A-Za-z]+", text.lower()):
        if not tok or tok in _stop:
            continue
        term = norm_term(tok)
        if term in _stop or term in out:
            continue
        out.append(term)
    return out


# Each task: an ambiguous keyword whose first lexicon sense is not the one the
# searcher wants. Pages of the intended sense all carry the concept terms;
# `narrow` words sit in the target (both) and one sibling page (the first).
TASKS = [
    {
        "id": "T1", "kw": "jaguar",
        "wrong": [("jaguar.n.car", "a british maker of luxury saloon cars", "jag", [
            "The new saloon has a supercharged engine and a leather cabin.",
            "Dealers report strong demand for the luxury coupe.",
            "The gearbox and suspension were tuned for top speed on the motorway.",
            "Owners praise the horsepower and the quiet ride.",
            "A road test measured the speed and braking distance of the sedan.",
            "The british factory builds every car by hand.",
        ])],
        "intended": ("jaguar.n.cat", "a large spotted wild cat of the americas", "panther", [
            "The wild cat is a feline predator that patrols a large territory.",
            "A spotted coat hides the predator among jungle shadows.",
            "Each feline cub stays with its mother for two years.",
            "These cats swim well and often hunt along the river bank.",
            "The predator has a powerful bite and sharp claws.",
            "Conservation groups track the feline across the americas.",
        ]),
        "concept": ("bigcat", "big cats", "cat, feline, predator"),
        "wrong_concepts": [("sportscar", "sports cars", "car, saloon, engine")],
        "q2": "speed", "narrow": ["prey", "rainforest"],
        "seeds": ["jaguar", "jaguar top speed", "jaguar rainforest prey"],
    },
    {
        "id": "T2", "kw": "python",
        "wrong": [("python.n.snake", "a constricting snake of tropical asia", "boa", [
            "The snake kills by coiling around its victim.",
            "Keepers measured the length of the reptile at five metres.",
            "This constricting reptile swallows animals whole.",
            "The tropical species lays a clutch of leathery eggs.",
            "A reptile of this length needs a large heated enclosure.",
            "Scales and heat sensing pits help the snake in the dark.",
        ])],
        "intended": ("python.n.language", "a programming language for scripting and automation", "cpython", [
            "The interpreter runs code written in a clean readable syntax.",
            "Developers install each library with a package manager.",
            "A module groups related code and can be imported by other programs.",
            "The interpreter ships with a large standard library.",
            "Type hints and syntax checks help developers catch bugs early.",
            "Teams use the interpreter for scripting, testing and automation.",
        ]),
        "concept": ("proglang", "programming languages", "interpreter, syntax, library"),
        "wrong_concepts": [("reptiles", "reptiles", "reptile, snake, scales")],
        "q2": "length", "narrow": ["decorator", "generator"],
        "seeds": ["python", "python length", "python decorator generator"],
    },
    {
        "id": "T3", "kw": "java",
        "wrong": [
            ("java.n.island", "an island of indonesia", "jawa", [
                "The island is home to active volcanoes and rice terraces.",
                "Jakarta sits on the north coast of the island.",
                "Ferries connect the island with Bali and Sumatra.",
                "Visitors climb the volcano at sunrise.",
            ]),
            ("java.n.coffee", "coffee brewed from beans grown in the east indies", "joe", [
                "Roasters blend the beans for a rich cup of coffee.",
                "Arabica beans are roasted dark for espresso.",
                "Baristas grind the beans fresh for every brew.",
            ]),
        ],
        "intended": ("java.n.platform", "a platform for portable object oriented software", "jvm", [
            "The virtual machine runs compiled classes on any operating system.",
            "Each class file holds bytecode for the virtual machine.",
            "The compiler checks types before classes are packaged into a jar.",
            "Enterprise servers host the virtual machine for web services.",
            "The runtime manages memory for every class instance.",
            "Build tools compile classes and resolve dependencies.",
        ]),
        "concept": ("runtime", "virtual machines", "virtual, machine, bytecode, compiler"),
        "wrong_concepts": [("volcanic", "volcanic islands", "volcano, island, indonesia"),
                           ("coffee", "coffee drinks", "coffee, espresso, roast")],
        "q2": "beans", "narrow": ["garbage", "collector"],
        "seeds": ["java", "java beans", "java garbage collector"],
    },
    {
        "id": "T4", "kw": "mercury",
        "wrong": [("mercury.n.planet", "the smallest planet and nearest the sun", "", [
            "The planet completes an orbit in eighty eight days.",
            "Craters cover the surface of the planet.",
            "A spacecraft mapped the planet from orbit.",
            "Surface temperatures swing wildly between day and night.",
            "The planet has almost no atmosphere.",
            "Astronomers time the transit across the solar disc.",
        ])],
        "intended": ("mercury.n.element", "a heavy silvery toxic metallic element", "quicksilver", [
            "The liquid metal is toxic when its vapour is inhaled.",
            "Old gauges used the liquid metal to measure pressure.",
            "Fish can accumulate the toxic metal from polluted water.",
            "Spills of the liquid metal require careful cleanup.",
            "Dentists once used the metal in amalgam fillings.",
            "Regulators limit the toxic metal in industrial waste.",
        ]),
        "concept": ("chem", "chemical elements", "metal, liquid, toxic"),
        "wrong_concepts": [("solar", "solar system", "planet, orbit, crater")],
        "q2": "orbit", "narrow": ["thermometer", "poisoning"],
        "seeds": ["mercury", "mercury orbit", "mercury thermometer poisoning"],
    },
    {
        "id": "T5", "kw": "bass",
        "wrong": [("bass.n.fish", "a freshwater fish prized by anglers", "perch", [
            "Anglers cast a lure near weed beds at dawn.",
            "The fish strikes hard and fights near the surface.",
            "A lure that mimics a minnow works well in spring.",
            "Lakes are stocked with the fish every year.",
            "Tournament anglers weigh their catch at the dock.",
            "Cold fronts make the fish sluggish.",
        ])],
        "intended": ("bass.n.instrument", "a stringed instrument with the lowest musical range", "contrabass", [
            "The player locks in with the drummer to drive the groove.",
            "Four heavy strings give the instrument its deep tone.",
            "Flatwound strings produce a warm thump on old records.",
            "The groove sits under the melody and the chords.",
            "Players rest the instrument on a strap and pluck with fingers.",
            "A good groove depends on timing more than notes.",
        ]),
        "concept": ("rhythm", "rhythm section", "groove, strings, drummer"),
        "wrong_concepts": [("angling", "angling", "angler, lure, fishing")],
        "q2": "lure", "narrow": ["fretless", "amplifier"],
        "seeds": ["bass", "bass lure", "bass fretless amplifier"],
    },
    {
        "id": "T6", "kw": "apple",
        "wrong": [("apple.n.fruit", "the edible round fruit of an orchard tree", "pippin", [
            "Orchard growers pick the fruit in early autumn.",
            "A crisp fruit makes the best pie filling.",
            "Bakers slice the fruit thin for a tart pie.",
            "Cider presses crush the fruit into juice.",
            "The tree blooms with white blossom in spring.",
            "Heritage varieties grow in old orchard rows.",
        ])],
        "intended": ("apple.n.company", "a company that designs consumer electronics and computers", "iphone", [
            "The firm reported record revenue from its handset sales.",
            "Shareholders watched the firm announce new laptops.",
            "Its operating system updates reach millions of handsets.",
            "Analysts expect the firm to expand its services revenue.",
            "The handset lineup now includes a larger display.",
            "Retail stores sell laptops, tablets and accessories.",
        ]),
        "concept": ("techfirm", "technology firms", "firm, handset, revenue"),
        "wrong_concepts": [("orchard", "orchard fruit", "orchard, tree, cider")],
        "q2": "pie", "narrow": ["keynote", "smartphone"],
        "seeds": ["apple", "apple pie", "apple keynote smartphone"],
    },
]

FILLER_TOPICS = [
    ("Tomato seedlings", "Seedlings need warm soil, steady watering and plenty of light in the greenhouse."),
    ("Sourdough starter", "A starter of flour and water ferments for days before the first loaf is baked."),
    ("Marathon training", "Runners build mileage slowly and taper in the final weeks before race day."),
    ("Knitting basics", "Needles, yarn and patience are all a beginner needs for a first scarf."),
    ("Home composting", "Kitchen scraps and dry leaves turn into rich compost within a season."),
    ("Watercolour painting", "Pigment, paper and water combine in washes that dry with soft edges."),
    ("Chess openings", "Opening principles favour central control and rapid development of pieces."),
    ("Bicycle repair", "A patch kit and tyre levers fix most punctures at the roadside."),
    ("Birdwatching", "Binoculars and a field notebook help identify warblers in the hedgerow."),
    ("Tea ceremony", "Whisked green tea is served in a quiet room with careful gestures."),
    ("Pottery wheel", "Clay is centred on the wheel before the walls are pulled upward."),
    ("Kayak touring", "Paddlers pack dry bags and check tides before crossing open water."),
    ("Rose pruning", "Gardeners cut roses back to outward facing buds in late winter."),
    ("Bread baking", "A hot oven and steam give the loaf a crackling crust."),
    ("Photography light", "Golden hour light softens shadows for outdoor portraits."),
    ("Beekeeping", "Hives are inspected on calm days to check the queen and the brood."),
    ("Camping stoves", "A small stove boils water quickly on a windless evening."),
    ("Origami cranes", "A square sheet folds into a crane with a series of valley folds."),
    ("Rock climbing", "Climbers belay each other and clip ropes into bolts on the wall."),
    ("Vegetable soup", "Onions, carrots and celery simmer slowly into a hearty soup."),
    ("Sailing knots", "A bowline forms a fixed loop that will not slip under load."),
    ("Woodworking joints", "Dovetail joints lock drawers together without nails."),
    ("Houseplant care", "Most houseplants prefer bright indirect light and moist soil."),
    ("Calligraphy", "A broad nib creates thick and thin strokes in italic script letters."),
    ("Star gazing", "A dark sky away from city lights reveals the band of the galaxy."),
    ("Jam making", "Berries and sugar boil until the jam sets on a cold saucer."),
    ("Piano practice", "Slow scales with a metronome build even finger strength."),
]

GENERIC = [
    "This page collects notes for readers new to the subject.",
    "Further reading is listed at the end of the article.",
    "The guide was updated with reader feedback.",
    "Photos and diagrams accompany the overview.",
]


def page(title, keywords, description, sentences):
    body = "\n".join(f"<p>{s}</p>" for s in sentences)
    return (
        "<!DOCTYPE html>\n<html>\n<head>\n"
        f"<title>{title}</title>\n"
        f'<meta name="keywords" content="{", ".join(keywords)}">\n'
        f'<meta name="description" content="{description}">\n'
        "</head>\n<body>\n"
        f"<h1>{title}</h1>\n{body}\n"
        "</body>\n</html>\n"
    )


def build(out: Path):
    rng = random.Random(7)
    docs = []  # (name, url, html, meta) meta = dict of flags
    ontology = []
    lexicon = []
    tasks_cfg = []
    sckb = []
    task_targets = {}

    for t in TASKS:
        kw = t["kw"]
        for sid, gloss, syn, _ in t["wrong"]:
            lexicon.append((kw, sid, gloss, syn))
        isid, igloss, isyn, ipool = t["intended"]
        lexicon.append((kw, isid, igloss, isyn))
        cid, clabel, cterms = t["concept"]
        ontology.append((cid, clabel, cterms))
        for w in t["wrong_concepts"]:
            ontology.append(w)

        # wrong-sense pages, the q2 word in most of them
        n = 0
        for sid, gloss, syn, pool in t["wrong"]:
            count = 6 if len(t["wrong"]) == 1 else (4 if n == 0 else 3)
            for i in range(count):
                sents = rng.sample(pool, k=min(3, len(pool)))
                tf = 2 + i % 3
                lead = f"{kw.capitalize()} {gloss.split(' ', 1)[1]}."
                extra = [f"More about {kw} here." for _ in range(tf - 1)]
                q2 = [f"Readers often ask about {t['q2']}."] if i % 3 != 2 else []
                words = normalize(gloss)[:2]
                docs.append({
                    "task": t["id"], "kind": "wrong", "sense": sid,
                    "title": f"{kw.capitalize()} {words[0]} {i + 1}",
                    "keywords": [kw, " ".join(words)],
                    "desc": gloss,
                    "sents": [lead] + sents + extra + q2 + [rng.choice(GENERIC)],
                })
            n += 1

        # intended-sense pages; index 0 is the target
        for i in range(6):
            sents = rng.sample(ipool, k=3)
            concept_sent = f"It is one of the {clabel} people ask about; see {cterms}."
            gloss_sent = f"In short, {igloss}."
            if i == 0:
                tf = 1
                body = [gloss_sent, concept_sent] + ipool + [
                    f"A detailed look at {t['narrow'][0]} and {t['narrow'][1]} follows.",
                    f"Notes on {t['narrow'][0]} close the article.",
                ] + GENERIC
                lead_word = next(w for w in igloss.split() if w not in _stop)
                kwds = [f"{lead_word} {t['narrow'][0]}", t["narrow"][1]]
            else:
                tf = 1 if i == 5 else 2 + i % 2
                body = [gloss_sent, concept_sent] + sents
                if i == 1:
                    body.append(f"Some {t['narrow'][0]} tips are included.")
                body.append(rng.choice(GENERIC))
                kwds = [kw, clabel]
            first = f"The {kw} pages." if tf == 1 else " ".join([f"{kw.capitalize()} notes."] * tf)
            docs.append({
                "task": t["id"], "kind": "target" if i == 0 else "intended", "sense": isid,
                "title": f"{clabel.capitalize()} guide {i + 1}" if i else f"{clabel.capitalize()} in depth",
                "keywords": kwds,
                "desc": igloss,
                "sents": [first] + body,
            })

    for title, text in FILLER_TOPICS:
        docs.append({"task": None, "kind": "filler", "sense": None, "title": title,
                     "keywords": [title.lower()], "desc": text,
                     "sents": [text, rng.choice(GENERIC), rng.choice(GENERIC)]})

    assert len(docs) == 100, len(docs)
    order = list(range(len(docs)))
    rng.shuffle(order)
    if out.exists():
        shutil.rmtree(out / "corpus", ignore_errors=True)
        shutil.rmtree(out / "seed_stores", ignore_errors=True)
    (out / "corpus").mkdir(parents=True, exist_ok=True)
    manifest = []
    for pos, idx in enumerate(order):
        d = docs[idx]
        d["id"] = pos + 1
        name = f"doc{pos + 1:03d}.html"
        d["url"] = f"https://fixture.example/{d['task'] or 'misc'}/{pos + 1:03d}"
        (out / "corpus" / name).write_text(page(d["title"], d["keywords"], d["desc"], d["sents"]))
        manifest.append(f"{name}\t{d['url']}")
    (out / "corpus" / "manifest.tsv").write_text("\n".join(manifest) + "\n")

    # constraint checks on normalized text
    def terms(d):
        return set(normalize(" ".join([d["title"], " ".join(d["sents"])])))

    for t in TASKS:
        kw = norm_term(t["kw"])
        mine = [d for d in docs if d["task"] == t["id"]]
        target = next(d for d in mine if d["kind"] == "target")
        intended_words = set(normalize(t["intended"][1] + " " + t["intended"][2])) - {kw}
        wrong_words = set()
        for _, gloss, syn, _ in t["wrong"]:
            wrong_words |= set(normalize(gloss + " " + syn)) - {kw}
        q2 = norm_term(t["q2"])
        narrow = [norm_term(w) for w in t["narrow"]]
        for d in mine:
            tt = terms(d)
            assert kw in tt, (d["title"], kw)
            if d["kind"] == "wrong":
                assert not (tt & intended_words), (d["title"], tt & intended_words)
            else:
                assert not (tt & wrong_words), (d["title"], tt & wrong_words)
                assert q2 not in tt, (d["title"], q2)
                cterms = set(normalize(t["concept"][2]))
                assert cterms <= tt, (d["title"], cterms - tt)
        assert set(narrow) <= terms(target)
        task_targets[t["id"]] = target
        tasks_cfg.append({"task_id": t["id"], "target_doc_ids": [target["id"]], "seed_queries": t["seeds"]})

        # SCKB: what earlier searchers chose for this task
        sense = {"keyword": kw, "sense_id": t["intended"][0],
                 "words": [w for w in normalize(t["intended"][1] + " " + t["intended"][2]) if w != kw],
                 "score": 0.0}
        meta = {"words": [sense["words"][0], narrow[0]]}
        sckb.append({
            "entry_id": f"sckb-{len(sckb) + 1}", "user_id": "", "timestamp": 1000 + len(sckb),
            "raw_query": t["kw"], "query_keywords": [kw], "selected_terms": [sense],
            "selected_meta_keywords": [meta],
            "selected_concepts": [{"concept_id": t["concept"][0], "label_terms": normalize(t["concept"][1])}],
            "clicked_urls": [target["url"]], "extracted_meta_keywords": [],
            "contributor_count": 3,
        })
        t["_sense"] = sense

    # unrelated shared history
    for title, _ in FILLER_TOPICS[:6]:
        words = normalize(title)
        sckb.append({
            "entry_id": f"sckb-{len(sckb) + 1}", "user_id": "", "timestamp": 1000 + len(sckb),
            "raw_query": title.lower(), "query_keywords": words, "selected_terms": [],
            "selected_meta_keywords": [], "selected_concepts": [], "clicked_urls": [],
            "extracted_meta_keywords": [{"words": words}], "contributor_count": 1,
        })

    stores = out / "seed_stores"
    (stores / "profiles").mkdir(parents=True, exist_ok=True)
    with open(stores / "sckb.jsonl", "w") as f:
        for e in sckb:
            f.write(json.dumps(e) + "\n")
    subjects = 10
    for s in range(subjects):
        user = f"subject-{s + 1:02d}"
        missing = {s % 6, (s + 3) % 6}
        lines = []
        for ti, t in enumerate(TASKS):
            if ti in missing:
                continue
            lines.append({
                "entry_id": f"{user}-{len(lines) + 1}", "user_id": user, "timestamp": 500 + ti,
                "raw_query": t["kw"], "query_keywords": [norm_term(t["kw"])], "selected_terms": [t["_sense"]],
                "selected_meta_keywords": [], "selected_concepts": [], "clicked_urls": [],
                "extracted_meta_keywords": [],
            })
        with open(stores / "profiles" / f"{user}.jsonl", "w") as f:
            for e in lines:
                f.write(json.dumps(e) + "\n")

    (out / "stopwords.txt").write_text("\n".join(STOPWORDS) + "\n")
    with open(out / "lexicon.tsv", "w") as f:
        f.write("# lemma\tsense_id\tgloss\tsynonyms\n")
        for row in lexicon:
            f.write("\t".join(row) + "\n")
    with open(out / "ontology.tsv", "w") as f:
        f.write("# concept_id\tlabel\trelated_terms\tparent_id\n")
        for cid, label, terms_ in ontology:
            f.write(f"{cid}\t{label}\t{terms_}\n")
    config = {
        "corpus": "corpus", "lexicon": "lexicon.tsv", "ontology": "ontology.tsv",
        "stopwords": "stopwords.txt", "seed_stores": "seed_stores", "subjects": subjects,
        "agent": {"p_accept": 0.8, "max_queries": 5},
        "service": {"page_size": 10, "query_cap": 20, "sckb": True},
        "tasks": tasks_cfg,
    }
    (out / "simulation.json").write_text(json.dumps(config, indent=2) + "\n")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=str(Path(__file__).resolve().parents[2] / "data"))
    build(Path(ap.parse_args().out))
