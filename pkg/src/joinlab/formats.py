"""JSON file formats: systems, couplings, factor pairs and triple laws.

Rationals are written as ``"p/q"`` strings.  Paths inside a file are resolved
relative to the file that names them.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .asymptotics import MarkovShift, markov_shift
from .core import FactorMap, FiniteSystem, format_rational, identity_factor, make_finite_system, \
    to_fraction, trivial_factor
from .errors import FactorMismatch, InvalidMeasure, JoinlabError
from .independence import TripleLaw
from .joinings import Coupling, validate_joining
from .relative import FactorPair

SCHEMA_VERSION = 1


class FormatError(JoinlabError):
    pass


def load_json(source: str | Path | dict, base: Path | None = None) -> tuple[dict, Path]:
    """Accept a path, an inline dict, or a JSON string; return (document, base directory)."""
    if isinstance(source, dict):
        return source, base or Path.cwd()
    text = str(source)
    if text.lstrip().startswith("{"):
        try:
            return json.loads(text), base or Path.cwd()
        except json.JSONDecodeError as exc:
            raise FormatError(f"invalid inline JSON: {exc}") from exc
    path = Path(text)
    if base is not None and not path.is_absolute():
        path = base / path
    try:
        doc = json.loads(path.read_text())
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise FormatError(f"{path}: expected a JSON object")
    return doc, path.parent


def _rational(value, allow_float: bool = False):
    if isinstance(value, float):
        if not allow_float:
            raise FormatError(f"decimal number {value!r} needs --float; write exact values as \"p/q\"")
        return value
    if isinstance(value, (int, str)) and not isinstance(value, bool):
        return to_fraction(value)
    raise FormatError(f"expected a rational, got {value!r}")


def prune_zero_mass(perm: list[int], measure: list[Fraction]) -> tuple[list[int], list[Fraction]]:
    """Drop zero-mass states and renumber the rest in order.

    Invariance makes the zero-mass set T-invariant, so the restriction is
    still a permutation.
    """
    keep = [i for i, m in enumerate(measure) if m != 0]
    index = {x: k for k, x in enumerate(keep)}
    try:
        new_perm = [index[perm[x]] for x in keep]
    except KeyError as exc:
        raise InvalidMeasure("a positive-mass state maps to a zero-mass state") from exc
    return new_perm, [measure[x] for x in keep]


def parse_system(doc: dict, allow_float: bool = False, prune: bool = False) -> FiniteSystem | MarkovShift:
    kind = doc.get("type")
    if kind == "finite":
        try:
            perm = [int(p) for p in doc["perm"]]
            measure = [_rational(m) for m in doc["measure"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"malformed finite system: {exc}") from exc
        if prune:
            perm, measure = prune_zero_mass(perm, measure)
        return make_finite_system(perm, measure)
    if kind == "markov":
        try:
            alphabet = [str(s) for s in doc["alphabet"]]
            transition = [[_rational(v, allow_float) for v in row] for row in doc["transition"]]
            stationary = doc.get("stationary")
        except (KeyError, TypeError) as exc:
            raise FormatError(f"malformed markov system: {exc}") from exc
        if stationary is not None:
            stationary = [_rational(v, allow_float) for v in stationary]
        exact = not allow_float
        if exact and any(isinstance(v, float) for row in transition for v in row):
            raise FormatError("decimal transition entries need --float")
        return markov_shift(transition, stationary, exact=exact, symbols=alphabet)
    raise FormatError(f"unknown system type {kind!r}; expected 'finite' or 'markov'")


def load_system(source, base: Path | None = None, allow_float: bool = False, prune: bool = False):
    doc, _ = load_json(source, base)
    return parse_system(doc, allow_float, prune)


def load_finite(source, base: Path | None = None, prune: bool = False) -> FiniteSystem:
    system = load_system(source, base, prune=prune)
    if not isinstance(system, FiniteSystem):
        raise FormatError("expected a finite system")
    return system


def load_markov(source, allow_float: bool = False) -> MarkovShift:
    system = load_system(source, allow_float=allow_float)
    if not isinstance(system, MarkovShift):
        raise FormatError("expected a markov system")
    return system


def load_coupling(source, prune: bool = False) -> Coupling:
    doc, base = load_json(source)
    try:
        left = load_finite(doc["left"], base, prune)
        right = load_finite(doc["right"], base, prune)
        weights = [[_rational(v) for v in row] for row in doc["weights"]]
    except (KeyError, TypeError) as exc:
        raise FormatError(f"malformed coupling file: {exc}") from exc
    return validate_joining(weights, left, right)


def coupling_document(coupling: Coupling) -> dict:
    return coupling.to_json()


def load_factor_pair(source, left: FiniteSystem, right: FiniteSystem) -> FactorPair:
    """A factor-pair file, or one of the keywords ``trivial`` / ``identity``."""
    if source == "trivial":
        return FactorPair(trivial_factor(left), trivial_factor(right))
    if source == "identity":
        if left != right:
            raise FactorMismatch("'identity' factor pair needs identical systems")
        return FactorPair(identity_factor(left), identity_factor(right))
    doc, base = load_json(source)
    try:
        target = load_finite(doc["target"], base)
        left_map = [int(z) for z in doc["left_map"]]
        right_map = [int(z) for z in doc["right_map"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed factor-pair file: {exc}") from exc
    return FactorPair(FactorMap(left, target, tuple(left_map)), FactorMap(right, target, tuple(right_map)))


def load_triple_law(source) -> TripleLaw:
    """``{"alphabet_size": n, "weights": [[i, j, k, "p/q"], ...]}``."""
    doc, _ = load_json(source)
    try:
        n = int(doc["alphabet_size"])
        weights = {}
        for entry in doc["weights"]:
            i, j, k, w = entry
            weights[(int(i), int(j), int(k))] = weights.get((int(i), int(j), int(k)), 0) + _rational(w)
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed triple-law file: {exc}") from exc
    try:
        return TripleLaw.from_dict(n, weights, doc.get("symbols"))
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


def triple_law_document(law: TripleLaw) -> dict:
    doc = {
        "alphabet_size": law.alphabet_size,
        "weights": [[i, j, k, format_rational(w)] for (i, j, k), w in law.weights],
    }
    if law.symbols is not None:
        doc["symbols"] = [s if isinstance(s, str) else "".join(map(str, s)) for s in law.symbols]
    return doc


def dumps(doc: dict) -> str:
    """Canonical JSON: fixed key order and separators, so reports are byte-stable."""
    return json.dumps({"schema": SCHEMA_VERSION, **doc}, indent=2, sort_keys=True, ensure_ascii=False)
