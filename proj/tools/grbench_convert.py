#!/usr/bin/env python3
"""Convert a GRBench-style domain dump into this engine's file pair.

The published per-domain dumps keep the whole graph in one JSON object whose
top-level keys group nodes by type, with adjacency inlined per node:

    {
      "paper_nodes": {
        "2154362193": {
          "features": {"title": "...", "abstract": "...", "year": "1993"},
          "neighbors": {"author": ["98581309", ...], "venue": [...]}
        },
        ...
      },
      "author_nodes": { ... }
    }

and the questions in a JSON list (or JSONL) of objects carrying at least a
question and an answer, usually also a qid and a difficulty label:

    [{"qid": "academic-42", "question": "...", "answer": "...",
      "difficulty": "medium"}, ...]

This tool maps that layout onto the engine's format:

  * a type-group key "X_nodes" (or plain "X") becomes node type "X";
  * every node keeps its feature map verbatim (values coerced to strings;
    list values are joined with ", ");
  * every entry of every per-node neighbor list becomes one directed edge
    {"src", "dst", "relation"} named after the list's key — duplicates are
    dropped here and again by the loader;
  * the schema's feature_keys per type are the union of observed keys in
    first-seen order, and each relation's target type is the type observed
    for its neighbor ids.

Two schema facts are not recoverable from the dump and come from a hints
file (--hints, JSON) instead:

    {
      "searchable": {"paper": "title", "author": "name"},
      "inverse":    {"paper": {"author": "paper"}, "author": {"paper": "author"}},
      "definition": "optional prose pasted into prompts as the graph definition"
    }

  * "searchable" names the feature retrieval indexes per type; a type
    without an entry falls back to "title" or "name" when the type has that
    key, else its first feature key.
  * "inverse" names the reverse relation per (type, relation); relations
    without an entry are declared one-way (the loader then materializes no
    reverse direction, exactly mirroring the dump).  Dumps that already
    store both directions need no inverse hints.  A hinted inverse the dump
    never uses as a forward list is declared on the target type here, since
    the engine requires every named inverse to exist as a relation.

Questions map field-for-field: qid (generated "{domain}-{index}" when
absent), question, answers ([answer] or the list under "answer"/"answers"),
difficulty (default "easy"), domain (--domain flag).

Usage:
    tools/grbench_convert.py --graph academic/graph.json \
        --qa academic/data.json --domain academic \
        --hints academic_hints.json --out data/academic
"""

import argparse
import json
import sys
from pathlib import Path


def type_of_group(key: str) -> str:
    return key[: -len("_nodes")] if key.endswith("_nodes") else key


def as_text(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, list):
        return ", ".join(as_text(v) for v in value)
    if value is None:
        return ""
    return str(value)


def load_questions(path: Path):
    text = path.read_text(encoding="utf-8").strip()
    if text.startswith("["):
        return json.loads(text)
    return [json.loads(line) for line in text.splitlines() if line.strip()]


def convert_graph(dump: dict, hints: dict):
    node_type = {}  # id -> type
    for group, members in dump.items():
        for node_id in members:
            node_type[str(node_id)] = type_of_group(group)

    nodes = []
    edges = []
    seen_edges = set()
    feature_keys = {}  # type -> ordered keys
    relations = {}  # type -> {relation: target type}

    for group, members in dump.items():
        type_name = type_of_group(group)
        keys = feature_keys.setdefault(type_name, [])
        rels = relations.setdefault(type_name, {})
        for node_id, body in members.items():
            node_id = str(node_id)
            features = {k: as_text(v) for k, v in body.get("features", {}).items()}
            for k in features:
                if k not in keys:
                    keys.append(k)
            nodes.append({"id": node_id, "type": type_name, "features": features})
            for relation, neighbor_ids in body.get("neighbors", {}).items():
                for neighbor in neighbor_ids:
                    neighbor = str(neighbor)
                    target = node_type.get(neighbor)
                    if target is None:
                        print(
                            f"warning: {node_id} -> {neighbor} ({relation}) "
                            "points outside the dump; edge skipped",
                            file=sys.stderr,
                        )
                        continue
                    rels.setdefault(relation, target)
                    key = (node_id, relation, neighbor)
                    if key not in seen_edges:
                        seen_edges.add(key)
                        edges.append(
                            {"src": node_id, "dst": neighbor, "relation": relation}
                        )

    searchable_hints = hints.get("searchable", {})
    inverse_hints = hints.get("inverse", {})

    # A hinted inverse must exist as a declared relation on the target type;
    # dumps that only store one direction will not have it, so declare it
    # (and point it back) on the hint's behalf.
    synthesized_inverse = {}  # (type, relation) -> inverse name
    for type_name, mapping in inverse_hints.items():
        for relation, inverse in mapping.items():
            target = relations.get(type_name, {}).get(relation)
            if target is None or not inverse:
                continue
            relations.setdefault(target, {}).setdefault(inverse, type_name)
            feature_keys.setdefault(target, [])
            synthesized_inverse.setdefault((target, inverse), relation)

    def inverse_of(type_name: str, relation: str) -> str:
        explicit = inverse_hints.get(type_name, {}).get(relation)
        if explicit is not None:
            return explicit
        return synthesized_inverse.get((type_name, relation), "")

    node_types = []
    for type_name, keys in feature_keys.items():
        searchable = searchable_hints.get(type_name)
        if searchable is None:
            for candidate in ("title", "name"):
                if candidate in keys:
                    searchable = candidate
                    break
            else:
                searchable = keys[0] if keys else ""
        neighbors = [
            {
                "relation": relation,
                "target": target,
                "inverse": inverse_of(type_name, relation),
            }
            for relation, target in relations[type_name].items()
        ]
        node_types.append(
            {
                "name": type_name,
                "features": keys,
                "searchable": searchable,
                "neighbors": neighbors,
            }
        )

    schema = {"node_types": node_types}
    if hints.get("definition"):
        schema["definition"] = hints["definition"]
    return {"schema": schema, "graph": {"nodes": nodes, "edges": edges}}


def convert_questions(items, domain: str):
    out = []
    for index, item in enumerate(items):
        answers = item.get("answers")
        if answers is None:
            answer = item.get("answer")
            answers = answer if isinstance(answer, list) else [as_text(answer)]
        out.append(
            {
                "qid": as_text(item.get("qid") or f"{domain}-{index}"),
                "question": as_text(item.get("question", "")),
                "answers": [as_text(a) for a in answers],
                "difficulty": as_text(item.get("difficulty") or "easy"),
                "domain": domain,
            }
        )
    return out


def main() -> int:
    parser = argparse.ArgumentParser(
        description="Convert a GRBench-style domain dump into graph.json + "
        "questions.jsonl for this engine."
    )
    parser.add_argument("--graph", required=True, type=Path, help="dump graph JSON")
    parser.add_argument("--qa", required=True, type=Path, help="dump QA JSON/JSONL")
    parser.add_argument("--domain", required=True, help="domain label for questions")
    parser.add_argument("--hints", type=Path, help="schema hints JSON (see docstring)")
    parser.add_argument("--out", required=True, type=Path, help="output directory")
    args = parser.parse_args()

    hints = json.loads(args.hints.read_text(encoding="utf-8")) if args.hints else {}
    dump = json.loads(args.graph.read_text(encoding="utf-8"))
    converted = convert_graph(dump, hints)
    questions = convert_questions(load_questions(args.qa), args.domain)

    args.out.mkdir(parents=True, exist_ok=True)
    graph_path = args.out / "graph.json"
    graph_path.write_text(json.dumps(converted, indent=2) + "\n", encoding="utf-8")
    qa_path = args.out / "questions.jsonl"
    with qa_path.open("w", encoding="utf-8") as out:
        for item in questions:
            out.write(json.dumps(item) + "\n")

    print(
        f"wrote {graph_path} ({len(converted['graph']['nodes'])} nodes, "
        f"{len(converted['graph']['edges'])} edges) and {qa_path} "
        f"({len(questions)} questions)"
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
