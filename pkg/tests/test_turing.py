import json
import warnings

import pytest

from aaulc.turing import (
    VOID_STATE,
    Cell,
    Halts,
    MachineError,
    Move,
    NoHaltWithinBound,
    TuringMachine,
    halts_within,
    load_machine,
    machine_from_doc,
    machine_to_doc,
    run,
)

from gen import random_machine, rng

# 2-state busy beaver: A0 -> 1RB, A1 -> 1LB, B0 -> 1LA, B1 -> 1R(halt).
# Traced by hand: head 0,1,0,-1,-2,-1 at m = 0..5, halt state at m = 6.
BB2 = TuringMachine(
    ("0", "1"), ("A", "H", "B"),
    {("0", "A"): ("1", "B", Move.RIGHT), ("1", "A"): ("1", "B", Move.LEFT),
     ("0", "B"): ("1", "A", Move.LEFT), ("1", "B"): ("1", "H", Move.RIGHT),
     ("0", "H"): ("0", "H", Move.REMAIN), ("1", "H"): ("1", "H", Move.REMAIN)},
    "A", "H")


def test_halt_machine_first_row(t_halt):
    table = run(t_halt, (-3, 3), (0, 2))
    assert {table[(n, 1)].state for n in range(-3, 4)} == {"s_end"}
    assert [n for n in range(-3, 4) if table[(n, 1)].head] == [0]
    assert {table[(n, 1)].symbol for n in range(-3, 4)} == {"a0"}


def test_negative_rows_are_void(t_mark):
    table = run(t_mark, (0, 6), (-3, 2))
    assert table[(5, -3)] == Cell("a0", VOID_STATE, 0)


def test_mark_machine_hand_simulation(t_mark):
    table = run(t_mark, (-2, 6), (0, 4))
    expected = {
        0: ("a0 a0 a0 a0 a0 a0 a0 a0 a0", "s0", 0),
        1: ("a0 a0 b a0 a0 a0 a0 a0 a0", "s1", 1),
        2: ("a0 a0 b b a0 a0 a0 a0 a0", "s1", 2),
        3: ("a0 a0 b b b a0 a0 a0 a0", "s1", 3),
        4: ("a0 a0 b b b b a0 a0 a0", "s1", 4),
    }
    for m, (symbols, state, head) in expected.items():
        row = [table[(n, m)] for n in range(-2, 7)]
        assert " ".join(c.symbol for c in row) == symbols
        assert {c.state for c in row} == {state}
        assert [n for n, c in zip(range(-2, 7), row) if c.head] == [head]


def test_halts_within(t_halt, t_loop):
    assert halts_within(t_halt, 5) == Halts(1)
    assert halts_within(t_halt, 0) == NoHaltWithinBound(0)
    assert halts_within(t_loop, 1000) == NoHaltWithinBound(1000)
    assert halts_within(BB2, 100) == Halts(6)
    assert halts_within(BB2, 5) == NoHaltWithinBound(5)


def test_busy_beaver_head_track():
    table = run(BB2, (-3, 3), (0, 6))
    assert [table.head_at[m] for m in range(6)] == [0, 1, 0, -1, -2, -1]
    assert [c.symbol for _, row in table.rows() for c in row][-7:] == ["0", "1", "1", "1", "1", "0", "0"]


def test_head_outside_window_is_tracked(t_loop):
    table = run(t_loop, (-2, 2), (0, 10))
    assert table.head_at[10] == 10
    assert not any(table[(n, 10)].head for n in range(-2, 3))


def _check_contract(tm, n_range, m_range):
    big = run(tm, n_range, m_range)
    small_n = (n_range[0] + 2, n_range[1] - 2)
    small_m = (m_range[0] + 1, m_range[1] - 3)
    small = run(tm, small_n, small_m)
    for key, cell in small.cells.items():
        assert big.cells[key] == cell
    assert run(tm, n_range, m_range) == big
    for m, row in big.rows():
        if m < 0:
            assert all(c == Cell(tm.blank, VOID_STATE, 0) for c in row)
            continue
        assert len({c.state for c in row}) == 1
        heads = [n for n, c in zip(range(n_range[0], n_range[1] + 1), row) if c.head]
        inside = n_range[0] <= big.head_at[m] <= n_range[1]
        assert heads == ([big.head_at[m]] if inside else [])
        if m > 0:
            prev = big.head_at[m - 1]
            for n, c in zip(range(n_range[0], n_range[1] + 1), row):
                if n != prev:
                    assert c.symbol == big[(n, m - 1)].symbol


def test_run_contract_random_machines():
    g = rng(21)
    for _ in range(20):
        _check_contract(random_machine(g), (-10, 10), (-2, 50))


def test_validation():
    good = machine_to_doc(BB2)
    machine_from_doc(good).validate(allow_start_reentry=True)
    bad = json.loads(json.dumps(good))
    bad["delta"] = bad["delta"][1:]
    with pytest.raises(MachineError, match="not total"):
        machine_from_doc(bad).validate(allow_start_reentry=True)
    bad = json.loads(json.dumps(good))
    bad["delta"][0]["move"] = "X"
    with pytest.raises(MachineError):
        machine_from_doc(bad)
    with pytest.raises(MachineError, match="reserved"):
        TuringMachine(("a0",), ("s0", "s_end", VOID_STATE), {}, "s0", "s_end").validate()
    with pytest.raises(MachineError):
        TuringMachine(("a0",), ("s0", "s_end"), {}, "s0", "s9").validate()
    with pytest.raises(MachineError):
        machine_from_doc({"alphabet": ["a0"]})


def test_start_reentry_warns():
    with pytest.warns(UserWarning, match="re-occurs"):
        BB2.validate()
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        BB2.validate(allow_start_reentry=True)


def test_default_start_and_end_are_first_two_states(tmp_path):
    path = tmp_path / "m.json"
    doc = machine_to_doc(BB2)
    del doc["start"], doc["end"]
    path.write_text(json.dumps(doc))
    tm = load_machine(path, allow_start_reentry=True)
    assert (tm.start, tm.end) == ("A", "H")
