import io
import json
from pathlib import Path

import pytest

from joinlab import formats
from joinlab.cli import main
from joinlab.core import cycle_system
from joinlab.joinings import Coupling, enumerate_vertices, joining_polytope

DATA = Path(__file__).resolve().parent.parent / "data"


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main([str(a) for a in argv], out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def d(name):
    return DATA / name


# Every subcommand with representative flags; used for the determinism check too.
COMMANDS = [
    ("disjoint", d("identity2.json"), d("cycle2.json")),
    ("disjoint", d("cycle2.json"), d("cycle2.json")),
    ("joinings", d("cycle3.json"), d("cycle3.json")),
    ("joinings", d("cycle2.json"), d("cycle2.json"), "--decompose", "product"),
    ("joinings", d("cycle2.json"), d("cycle2.json"), "--metric", "product", d("diag_cycle2.json")),
    ("relative", d("cycle4.json"), d("cycle4.json"), "--factor-pair", d("parity_pair.json")),
    ("relative", d("cycle4.json"), d("cycle4.json"), "--factor-pair", "trivial"),
    ("factors", d("cycle4.json")),
    ("mixing", d("symmetric.json"), "--sets", "0", "0", "--horizon", "8", "--ornstein", "2"),
    ("mixing", d("bernoulli.json"), "--sets", "0", "0", "0", "--triple", "2", "3", "--furstenberg", "2", "10"),
    ("mixing", d("symmetric_float.json"), "--float", "--sets", "0", "01,10", "--horizon", "5"),
    ("triple", "--xor", "1/2", "2", "--uniform-oracle"),
    ("triple", d("z4_even.json"), "--haar", "4"),
    ("triple", "--xor", "1/2", "1", "--growth", "4"),
]


# -- disjoint -------------------------------------------------------------------

def test_disjoint_examples():
    code, out, _ = run("disjoint", d("identity2.json"), d("cycle2.json"))
    assert code == 0 and out == "disjoint\n"

    code, out, _ = run("disjoint", d("cycle2.json"), d("cycle2.json"))
    assert code == 3
    assert out.splitlines() == ["not disjoint", "witness (non-product vertex):", "    0  1/2", "  1/2    0"]


def test_malformed_input(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, err = run("disjoint", bad, d("cycle2.json"))
    assert code == 1 and "not valid JSON" in err

    skew = tmp_path / "skew.json"
    skew.write_text(json.dumps({"type": "finite", "perm": [1, 0], "measure": ["1/3", "2/3"]}))
    assert run("disjoint", skew, d("cycle2.json"))[0] == 1

    floaty = tmp_path / "floaty.json"
    floaty.write_text(json.dumps({"type": "finite", "perm": [0], "measure": [1.0]}))
    assert run("factors", floaty)[0] == 1

    assert run("disjoint", d("cycle2.json"))[0] == 1
    assert run("frobnicate")[0] == 1


def test_cap_exceeded():
    code, _, err = run("disjoint", d("cycle3.json"), d("cycle4.json"), "--cap", "4")
    assert code == 2 and "cap" in err
    assert run("--cap", "4", "joinings", d("cycle3.json"), d("cycle3.json"))[0] == 2
    assert run("factors", d("cycle4.json"), "--factor-cap", "3")[0] == 2


def test_zero_mass_pruning(tmp_path):
    padded = tmp_path / "padded.json"
    padded.write_text(json.dumps({"type": "finite", "perm": [1, 0, 2], "measure": ["1/2", "1/2", "0"]}))
    assert run("factors", padded)[0] == 1
    code, out, _ = run("factors", padded, "--prune-zero")
    assert code == 0 and out.startswith("2 factors")


# -- joinings -------------------------------------------------------------------

def test_vertices_listing():
    code, out, _ = run("joinings", d("cycle2.json"), d("cycle2.json"), "--vertices")
    assert code == 0
    assert out.splitlines() == [
        "2 vertices",
        "vertex 0 (ergodic):", "    0  1/2", "  1/2    0",
        "vertex 1 (ergodic):", "  1/2    0", "    0  1/2",
    ]


def test_decompose_and_metric():
    code, out, _ = run("joinings", d("cycle2.json"), d("cycle2.json"), "--decompose", "product")
    assert (code, out) == (0, "1/2 · Δ_Id + 1/2 · Δ_T\n")

    code, out, _ = run("joinings", d("cycle2.json"), d("cycle2.json"),
                       "--metric", d("diag_cycle2.json"), d("diag_cycle2.json"))
    assert (code, out) == (0, "0\n")
    code, out, _ = run("joinings", d("cycle2.json"), d("cycle2.json"),
                       "--metric", "product", d("diag_cycle2.json"))
    assert out == "9/64\n"


def test_decompose_non_ergodic_system():
    code, out, _ = run("joinings", d("identity2.json"), d("cycle2.json"), "--decompose", "product")
    assert (code, out) == (0, "1/2 · orbit(0,0) + 1/2 · orbit(1,0)\n")


def test_coupling_file_must_match_systems():
    code, _, err = run("joinings", d("cycle3.json"), d("cycle3.json"), "--decompose", d("diag_cycle2.json"))
    assert code == 1 and "differ" in err


# -- relative and factors ------------------------------------------------------

def test_relative_examples():
    code, out, _ = run("relative", d("cycle4.json"), d("cycle4.json"), "--factor-pair", d("parity_pair.json"))
    assert code == 0
    lines = out.splitlines()
    assert lines[1:5] == ["  1/8    0  1/8    0", "    0  1/8    0  1/8"] * 2
    assert lines[-1] == "differs from product: non-disjointness witness"

    code, out, _ = run("relative", d("cycle4.json"), d("cycle4.json"), "--factor-pair", "trivial")
    assert code == 0 and out.splitlines()[-1] == "trivial factor: equals the product joining"


def test_relative_mismatch(tmp_path):
    bad = tmp_path / "pair.json"
    bad.write_text(json.dumps({"target": str(d("cycle2.json")), "left_map": [0, 1, 0, 1], "right_map": [0, 1, 2]}))
    assert run("relative", d("cycle4.json"), d("cycle3.json"), "--factor-pair", bad)[0] == 1
    assert run("relative", d("cycle4.json"), d("cycle3.json"), "--factor-pair", "identity")[0] == 1


def test_factors_listing():
    code, out, _ = run("factors", d("cycle3.json"))
    assert code == 0
    assert out.splitlines() == [
        "2 factors",
        "map [0, 1, 2] -> perm [1, 2, 0] measure [1/3, 1/3, 1/3]  (itself)",
        "map [0, 0, 0] -> perm [0] measure [1]  (trivial)",
    ]


# -- mixing ---------------------------------------------------------------------

def column(out):
    rows = [line.split() for line in out.splitlines()]
    return [r[1] for r in rows if len(r) == 2 and r[0].isdigit()]


def test_mixing_examples():
    code, out, _ = run("mixing", d("bernoulli.json"), "--sets", "0", "0", "--horizon", "5")
    assert code == 0 and column(out)[1:] == ["1/4"] * 5

    from fractions import Fraction as F
    code, out, _ = run("mixing", d("symmetric.json"), "--sets", "0", "0", "--horizon", "12")
    assert code == 0
    assert column(out) == [str(F(1, 4) + F(1, 4) * F(4, 5) ** n) for n in range(13)]

    code, out, _ = run("mixing", d("bernoulli.json"), "--sets", "0", "--furstenberg", "2", "100")
    assert code == 0 and out.splitlines()[-1] == "furstenberg k=2 n=100: 1/8"


def test_mixing_negative_findings():
    code, out, _ = run("mixing", d("swap.json"), "--sets", "0", "0", "--horizon", "3")
    assert code == 3 and "not mixing" in out
    code, out, _ = run("mixing", d("symmetric.json"), "--sets", "0", "0", "--ornstein", "1/2")
    assert code == 3 and "violated" in out


def test_mixing_errors(tmp_path):
    assert run("mixing", d("symmetric.json"), "--sets", "0", "0", "--horizon", "1001")[0] == 2
    code, out, _ = run("mixing", d("symmetric.json"), "--sets", "0", "0", "--horizon", "1001", "--float")
    assert code == 0 and len(column(out)) == 1002  # float mode lifts the horizon cap
    reducible = tmp_path / "reducible.json"
    reducible.write_text(json.dumps({"type": "markov", "alphabet": ["a", "b"],
                                     "transition": [["1", "0"], ["0", "1"]],
                                     "stationary": ["1/2", "1/2"]}))
    code, _, err = run("mixing", reducible, "--sets", "a", "b")
    assert code == 1 and "reducible" in err
    assert run("mixing", d("symmetric.json"), "--sets", "2", "0")[0] == 1
    assert run("mixing", d("symmetric.json"), "--sets", "0", "0", "--triple", "1", "1")[0] == 1


def test_named_alphabet(tmp_path):
    chain = tmp_path / "ab.json"
    chain.write_text(json.dumps({"type": "markov", "alphabet": ["a", "b"],
                                 "transition": [["9/10", "1/10"], ["1/10", "9/10"]]}))
    code, out, _ = run("mixing", chain, "--sets", "a", "a", "--horizon", "1")
    assert code == 0 and column(out) == ["1/2", "9/20"]


# -- triple -----------------------------------------------------------------------

def test_triple_examples():
    code, out, _ = run("triple", "--xor", "1/2", "1", "--uniform-oracle")
    assert code == 0 and out.splitlines()[-1] == "uniform on {0,1}: confirmed"

    code, out, _ = run("triple", d("z4_even.json"), "--haar", "4")
    assert code == 0 and out.splitlines()[-1] == "H = {0,2}, Haar: confirmed"

    code, out, _ = run("triple", d("diagonal.json"), "--uniform-oracle")
    assert code == 1 and "pairwise independence: failed" in out.splitlines()

    code, out, _ = run("triple", "--xor", "1/2", "1", "--growth", "6")
    assert code == 0 and "a_m: 2 2 2 2 2 2" in out and out.endswith("verdict: entropy >= log 2\n")


def test_triple_haar_on_product_group():
    code, out, _ = run("triple", d("xor.json"), "--haar", "2")
    assert code == 0 and "H = {0,1}" in out


def test_triple_needs_a_law():
    assert run("triple", "--uniform-oracle")[0] == 1


# -- contracts ------------------------------------------------------------------

@pytest.mark.parametrize("argv", COMMANDS, ids=lambda a: " ".join(str(x) for x in a[:1] + a[3:4]))
@pytest.mark.parametrize("as_json", [False, True])
def test_reports_are_byte_deterministic(argv, as_json):
    flags = ["--json"] if as_json else []
    first = run(*argv, *flags)
    second = run(*argv, *flags)
    assert first == second
    if as_json:
        assert json.loads(first[1])["schema"] == 1


def test_global_flags_before_or_after_subcommand():
    assert run("--json", "factors", d("cycle3.json")) == run("factors", d("cycle3.json"), "--json")


def test_json_couplings_round_trip():
    code, out, _ = run("disjoint", d("cycle2.json"), d("cycle2.json"), "--json")
    witness = json.loads(out)["witness"]
    coupling = formats.load_coupling(witness)
    assert coupling.weights == ((0, 0.5), (0.5, 0)) and coupling.to_json() == witness

    code, out, _ = run("joinings", d("cycle3.json"), d("cycle3.json"), "--json")
    docs = json.loads(out)["vertices"]
    reparsed = [formats.load_coupling({k: v for k, v in doc.items() if k != "ergodic"}) for doc in docs]
    c3 = cycle_system(3)
    assert reparsed == enumerate_vertices(joining_polytope(c3, c3))
    assert all(isinstance(c, Coupling) for c in reparsed)


def test_json_written_to_file_round_trips(tmp_path):
    code, out, _ = run("relative", d("cycle4.json"), d("cycle4.json"), "--factor-pair", "trivial", "--json")
    path = tmp_path / "coupling.json"
    path.write_text(json.dumps(json.loads(out)["joining"]))
    code, out, _ = run("joinings", d("cycle4.json"), d("cycle4.json"), "--metric", "product", path)
    assert (code, out) == (0, "0\n")
