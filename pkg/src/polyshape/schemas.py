"""JSON schemas for the files the tool reads and writes."""

RLE = {"type": "string", "pattern": r"^\d+,\d+:[0-9a-f]+(/[0-9a-f]+)*$"}
CELL = {"type": "array", "items": {"type": "integer"}, "minItems": 2, "maxItems": 2}
PLACED = {
    "type": "object",
    "required": ["piece", "cells"],
    "properties": {"piece": {"type": "integer", "minimum": 0}, "cells": {"type": "array", "items": CELL, "minItems": 1}},
}

INSTANCE_SCHEMA = {
    "type": "object",
    "required": ["sets"],
    "properties": {
        "mode": {"enum": ["common-multiple", "shape-logic"]},
        "allow_reflect": {"type": "boolean"},
        "limits": {"type": "object"},
        "sets": {
            "type": "array",
            "minItems": 2,
            "items": {
                "anyOf": [
                    {"type": "string"},
                    {
                        "type": "object",
                        "required": ["pieces"],
                        "properties": {
                            "label": {"type": "string"},
                            "pieces": {"type": "array", "minItems": 1, "items": {"type": ["string", "object"]}},
                        },
                    },
                ]
            },
        },
    },
}

SOLUTION_SCHEMA = {
    "type": "object",
    "required": ["goal", "tilings"],
    "properties": {
        "goal": RLE,
        "area": {"type": "integer", "minimum": 1},
        "tilings": {"type": "array", "minItems": 1, "items": {"type": "array", "items": PLACED}},
    },
}

CERTIFICATE_SCHEMA = {
    "type": "object",
    "required": ["instance", "solution"],
    "properties": {"instance": INSTANCE_SCHEMA, "solution": SOLUTION_SCHEMA},
}

LEDGER_RECORD_SCHEMA = {
    "type": "object",
    "required": ["instance_id", "sets", "mode", "box", "area", "status", "wall_ms", "conflicts"],
    "properties": {
        "instance_id": {"type": "string"},
        "sets": {"type": "array", "items": {"type": "string"}},
        "mode": {"enum": ["common-multiple", "shape-logic"]},
        "box": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 2, "maxItems": 2},
        "area": {"type": "integer", "minimum": 1},
        "status": {"enum": ["sat", "unsat", "unknown"]},
        "wall_ms": {"type": "number", "minimum": 0},
        "conflicts": {"type": "integer", "minimum": 0},
        "reason": {"type": "string"},
        "blocks": {"type": "integer"},
        "shape_rle": RLE,
        "tilings": SOLUTION_SCHEMA["properties"]["tilings"],
    },
}

PACKING_SCHEMA = {
    "type": "object",
    "required": ["region", "placements"],
    "properties": {"region": RLE, "placements": {"type": "array", "items": PLACED}},
}

CENSUS_SCHEMA = {
    "type": "object",
    "required": ["minimal_area", "shapes", "checked"],
    "properties": {
        "minimal_area": {"type": ["integer", "null"]},
        "shapes": {"type": "array", "items": RLE},
        "checked": {"type": "integer", "minimum": 0},
    },
}

JIGSAW_TILING_SCHEMA = {
    "type": "object",
    "required": ["box", "cells"],
    "properties": {
        "box": {"type": "array", "items": {"type": "integer"}, "minItems": 2, "maxItems": 2},
        "cells": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["x", "y", "piece", "turns"],
                "properties": {k: {"type": "integer"} for k in ("x", "y", "piece", "turns")},
            },
        },
    },
}

RECT_REPORT_SCHEMA = {
    "type": "object",
    "required": ["cap", "regions", "images", "tileable", "counterexamples", "ok"],
    "properties": {
        "cap": {"type": "integer"},
        "regions": {"type": "integer"},
        "images": {"type": "integer"},
        "tileable": {"type": "array", "items": RLE},
        "counterexamples": {"type": "array"},
        "ok": {"type": "boolean"},
    },
}

ZIGZAG_SCHEMA = {
    "type": "object",
    "required": ["label", "pieces"],
    "properties": {"label": {"type": "string"}, "pieces": {"type": "array", "minItems": 1, "items": RLE}},
}
