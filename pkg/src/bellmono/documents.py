"""JSON documents for expressions and boxes.

Rationals travel as ``"p/q"`` strings with the sign on ``p`` and ``q >= 1``.
Expression coefficients are nested as ``coefficients[x][y][a][b]``.  Box
tables are sparse maps ``"x,y1,..,yK|a,b1,..,bK" -> "p/q"`` with 0-based
indices; absent keys are zero.
"""

from __future__ import annotations

import json
import re
from dataclasses import replace
from fractions import Fraction
from pathlib import Path

from bellmono import bell
from bellmono.bell import BellExpression
from bellmono.model import ConditionalBox, Scenario

_RATIONAL = re.compile(r"\s*-?\d+(/\d+)?\s*")


class DocumentError(ValueError):
    pass


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def parse_rational(text) -> Fraction:
    if isinstance(text, bool) or not isinstance(text, (str, int)):
        raise DocumentError(f"expected a rational string 'p/q', got {text!r}")
    if isinstance(text, str) and not _RATIONAL.fullmatch(text):
        raise DocumentError(f"bad rational {text!r}")
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise DocumentError(f"bad rational {text!r}") from exc


def _fmt_matrix(m):
    return [[format_rational(v) for v in row] for row in m]


def _parse_matrix(m, name):
    try:
        return [[parse_rational(v) for v in row] for row in m]
    except TypeError as exc:
        raise DocumentError(f"{name} must be a nested array") from exc


def expression_to_document(expr: BellExpression) -> dict:
    sc = expr.scenario
    doc = {
        "scenario": {"alice_settings": expr.m_a, "bob_settings": expr.m_b, "outcomes": expr.d},
        "provenance": expr.kind,
        "coefficients": [
            [
                [[format_rational(expr.coefficient(a, b, x, y)) for b in range(sc.outcomes)] for a in range(sc.outcomes)]
                for y in range(expr.m_b)
            ]
            for x in range(expr.m_a)
        ],
    }
    if expr.mu is not None:
        doc["mu"] = _fmt_matrix(expr.mu)
    if expr.predicate is not None:
        doc["predicate"] = [[list(v) for v in row] for row in expr.predicate]
    if expr.alpha is not None:
        doc["alpha"] = _fmt_matrix(expr.alpha)
    if expr.lambdas is not None:
        doc["lambda"] = [format_rational(v) for v in expr.lambdas]
    if expr.sigma is not None:
        doc["sigma"] = [[list(p) for p in row] for row in expr.sigma]
    if expr.chain_length is not None:
        doc["chain_length"] = expr.chain_length
    if expr.active_settings != tuple(range(expr.m_b)):
        doc["active_settings"] = list(expr.active_settings)
    if expr.setting_labels is not None:
        doc["setting_labels"] = list(expr.setting_labels)
    return doc


def _rebuild(kind, m_a, m_b, d, doc):
    """Expression implied by the family parameters, or None if they are absent."""
    if kind == "xor_game" and "mu" in doc and "predicate" in doc:
        return bell.xor_game(m_a, m_b, _parse_matrix(doc["mu"], "mu"), doc["predicate"], d=d)
    if kind == "chained" and "mu" in doc:
        return bell.chained(doc.get("chain_length", m_a), _parse_matrix(doc["mu"], "mu"))
    if kind == "unique_game" and "mu" in doc and "sigma" in doc:
        return bell.unique_game(m_a, m_b, d, _parse_matrix(doc["mu"], "mu"), doc["sigma"])
    if kind == "correlation" and "alpha" in doc and "lambda" in doc:
        lambdas = [parse_rational(v) for v in doc["lambda"]]
        return bell.correlation_expression(m_a, m_b, d, _parse_matrix(doc["alpha"], "alpha"), lambdas)
    if kind == "table" and (m_a, m_b, d) == (3, 3, 4):
        return bell.claim3_expression()
    return None


def expression_from_document(doc: dict) -> BellExpression:
    try:
        sc = doc["scenario"]
        m_a, m_b, d = sc["alice_settings"], sc["bob_settings"], sc["outcomes"]
        kind = doc.get("provenance", "general")
        raw = doc["coefficients"]
    except (KeyError, TypeError) as exc:
        raise DocumentError(f"expression document is missing {exc}") from exc
    if not all(isinstance(v, int) and v >= 1 for v in (m_a, m_b, d)):
        raise DocumentError("scenario entries must be positive integers")
    coeffs = {}
    try:
        if len(raw) != m_a:
            raise DocumentError("coefficients must be indexed [x][y][a][b]")
        for x in range(m_a):
            for y in range(m_b):
                for a in range(d):
                    if len(raw[x][y][a]) != d:
                        raise DocumentError("coefficients must be indexed [x][y][a][b]")
                    for b in range(d):
                        coeffs[(a, b, x, y)] = parse_rational(raw[x][y][a][b])
    except (IndexError, TypeError) as exc:
        raise DocumentError("coefficients must be indexed [x][y][a][b]") from exc

    try:
        template = _rebuild(kind, m_a, m_b, d, doc)
    except (ValueError, TypeError, IndexError) as exc:
        raise DocumentError(f"invalid {kind} parameters: {exc}") from exc
    active = doc.get("active_settings")
    labels = doc.get("setting_labels")
    if template is not None:
        if active is not None:
            removed = set(range(m_b)) - set(active)
            template = bell.restrict_bob_settings(template, removed)
        expected = BellExpression(template.scenario, coeffs)
        if expected.coefficients != template.coefficients:
            raise DocumentError(f"coefficients disagree with the {kind} parameters")
        if labels is not None:
            template = replace(template, setting_labels=tuple(labels))
        return template
    if kind not in ("general",):
        raise DocumentError(f"provenance {kind!r} needs its family parameters")
    return BellExpression(
        Scenario.bipartite(m_a, m_b, d),
        coeffs,
        mu=None if "mu" not in doc else tuple(tuple(r) for r in _parse_matrix(doc["mu"], "mu")),
        active_settings=None if active is None else tuple(active),
        setting_labels=None if labels is None else tuple(labels),
    )


def box_to_document(box: ConditionalBox) -> dict:
    sc = box.scenario
    table = {}
    for (inputs, outputs), p in box.table.items():
        if p:
            key = ",".join(map(str, inputs)) + "|" + ",".join(map(str, outputs))
            table[key] = format_rational(p)
    return {
        "scenario": {
            "alice_settings": sc.alice_settings,
            "bob_settings": list(sc.bob_settings),
            "outcomes": sc.outcomes,
            "parties": sc.parties,
        },
        "table": table,
    }


def box_from_document(doc: dict) -> ConditionalBox:
    try:
        sc = doc["scenario"]
        scenario = Scenario(sc["alice_settings"], tuple(sc["bob_settings"]), sc["outcomes"])
        raw = doc["table"]
    except (KeyError, TypeError, ValueError) as exc:
        raise DocumentError(f"bad box document: {exc}") from exc
    if sc.get("parties", scenario.parties) != scenario.parties:
        raise DocumentError("'parties' disagrees with bob_settings")
    entries = {}
    for key, value in raw.items():
        try:
            ins, outs = key.split("|")
            cell = (tuple(int(v) for v in ins.split(",")), tuple(int(v) for v in outs.split(",")))
        except ValueError as exc:
            raise DocumentError(f"bad table key {key!r}") from exc
        entries[cell] = parse_rational(value)
    try:
        box = ConditionalBox.from_sparse(scenario, entries)
        box.validate()
    except ValueError as exc:
        raise DocumentError(str(exc)) from exc
    return box


def read_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise DocumentError(f"cannot read {path}: {exc}") from exc


def write_json(path, doc) -> None:
    Path(path).write_text(json.dumps(doc, indent=1) + "\n", encoding="utf-8")
