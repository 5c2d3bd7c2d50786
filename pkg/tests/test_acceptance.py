"""Exit criteria.  Each test records one PASS/FAIL line, shown in the
terminal summary (and printed immediately with ``pytest -s``)."""

import dataclasses
import time
import warnings

import pytest

from aaulc.cli import main
from aaulc.encoder import Vocabulary, encode_phi, encode_transitions
from aaulc.gridmodel import build_grid_model, parse_world_id, verify_run_encoding
from aaulc.kripke import Model, bisim_partition, quotient
from aaulc.semantics import (
    BOUNDED,
    QuantStrategy,
    apply_update,
    check_arbitrary,
    evaluate,
)
from aaulc.syntax import (
    TOP,
    And,
    ArrowUpdate,
    Box,
    Common,
    Neg,
    Or,
    Update,
    agents_of,
    conj,
    parse_formula,
    print_formula,
    split_and,
    update,
)
from aaulc.turing import VOID_STATE, Cell, run

from conftest import DATA, machine
from gen import (
    bisimilarity_oracle,
    random_formula,
    random_machine,
    random_model,
    random_update,
    rng,
)

RESULTS = []
N_RANGE, M_RANGE = (-8, 8), (-2, 12)
MACHINES = ("t_halt", "t_loop", "t_mark")


def record(number, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


def _flip_symbol(grid, world):
    """Replace the symbol atom at ``world`` by another one (or drop it)."""
    voc = grid.vocabulary
    props = set(grid.model.valuation[world])
    current = next(p for p in props if p in voc.symbol_atoms.values())
    props.discard(current)
    others = [s for s in voc.symbol_atoms.values() if s != current]
    if others:
        props.add(others[0])
    val = dict(grid.model.valuation)
    val[world] = props
    m = grid.model
    return dataclasses.replace(grid, model=Model(m.worlds, m.agents, m.relations, val))


def _corrupt_first_transition(tm):
    """Send the very first transition to a wrong next state."""
    key = (tm.blank, tm.start)
    written, nxt, move = tm.delta[key]
    wrong = next(s for s in tm.states if s != nxt)
    return dataclasses.replace(tm, delta={**tm.delta, key: (written, wrong, move)})


@pytest.mark.parametrize("name", MACHINES)
def test_1_lemma1_mechanized(name, capsys):
    tm = machine(name)
    path = str(DATA / f"{name}.json")
    start = time.perf_counter()
    code = main(["grid", path, "verify", "--allow-start-reentry",
                 "--n-range", *map(str, N_RANGE), "--m-range", *map(str, M_RANGE)])
    elapsed = time.perf_counter() - start
    out = capsys.readouterr().out.splitlines()
    clean = code == 0 and out and all(line.endswith(" PASS") for line in out)
    names = {line.split()[1] for line in out}
    required = {"position_1", "position_2", "one_state", "same_state", "one_symbol", "void_state",
                "initial_symbol", "unchanged", "position_change", "state_change", "symbol_change"}

    grid = build_grid_model(tm, N_RANGE, M_RANGE)
    flipped = verify_run_encoding(tm, _flip_symbol(grid, "3,5"))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        corrupted_grid = build_grid_model(_corrupt_first_transition(tm), N_RANGE, M_RANGE)
    corrupted = verify_run_encoding(tm, corrupted_grid)
    flip_ok = "unchanged" in {r.name for r in flipped.failures()}
    corrupt_ok = "state_change" in {r.name for r in corrupted.failures()}
    record(1, clean and required <= names and elapsed < 5.0 and flip_ok and corrupt_ok,
           f"{name}: {len(out)} conjuncts PASS in {elapsed:.2f}s (< 5 s); flipped symbol -> "
           f"{[r.line() for r in flipped.failures()]}; corrupted delta -> "
           f"{[r.line() for r in corrupted.failures()]}")


def test_2_theorem_direction():
    halt_grid = build_grid_model(machine("t_halt"), N_RANGE, M_RANGE)
    halt_worlds = [w for w in halt_grid.model.worlds if "st_s_end" in halt_grid.model.valuation[w]]
    loop_grid = build_grid_model(machine("t_loop"), N_RANGE, (-2, 200))
    loop_worlds = [w for w in loop_grid.model.worlds if "st_s_end" in loop_grid.model.valuation[w]]
    first = min(parse_world_id(w)[1] for w in halt_worlds) if halt_worlds else None
    record(2, bool(halt_worlds) and first == 1 and not loop_worlds,
           f"t_halt window has {len(halt_worlds)} st_s_end worlds (first row m={first}); "
           f"t_loop window up to m=200 ({len(loop_grid.model.worlds)} worlds) has {len(loop_worlds)}")


def test_3_card_example(capsys, card_model):
    u_cards = "[{(T,b,T),(aceSpades,a,aceSpades),(kingHearts,a,kingHearts)}]"
    model_path = str(DATA / "card_model.json")
    verdicts = {}
    for world, card in (("AS", "aceSpades"), ("KH", "kingHearts")):
        for agent in ("a", "b"):
            main(["check", model_path, world, f"{u_cards}[{agent}]{card}"])
            verdicts[(world, agent)] = capsys.readouterr().out.strip()
    after = apply_update(card_model, parse_formula(u_cards + "T").update)
    hand = {"a": {("AS", "AS"), ("KH", "KH")}, "b": set(card_model.relations["b"])}
    ok = all(verdicts[(w, "a")] == "TRUE" and verdicts[(w, "b")] == "FALSE" for w in ("AS", "KH"))
    ok = ok and {a: set(after.relations[a]) for a in after.agents} == hand
    record(3, ok, f"check verdicts {verdicts}; updated arrows match hand application: "
                  f"{ {a: set(after.relations[a]) for a in after.agents} == hand }")


def test_4_update_laws():
    g = rng(400)
    shrink_violations = triv_violations = empty_violations = 0
    for _ in range(200):
        m = random_model(g, 6, agents=("a", "b", "c")[:g.randint(1, 3)])
        after = apply_update(m, random_update(g, agents=m.agents))
        if after.worlds != m.worlds or after.valuation != m.valuation or \
                any(not after.relations[a] <= m.relations[a] for a in m.agents):
            shrink_violations += 1
        triv = update(*((TOP, a, TOP) for a in m.agents))
        f = random_formula(g, 4, agents=m.agents)
        triv_violations += sum(evaluate(m, w, Update(triv, f)) != evaluate(m, w, f) for w in m.worlds)
        emptied = apply_update(m, ArrowUpdate(()))
        empty_violations += any(emptied.relations[a] for a in m.agents)
    record(4, shrink_violations == triv_violations == empty_violations == 0,
           f"200 models: shrinkage violations {shrink_violations}, trivial-update violations "
           f"{triv_violations}, empty-update violations {empty_violations}")


def test_5_bisimulation():
    g = rng(500)
    partition_violations = quotient_violations = 0
    for _ in range(200):
        m = random_model(g, 6, agents=("a", "b", "c")[:g.randint(1, 3)])
        part = bisim_partition(m)
        oracle = bisimilarity_oracle(m)
        partition_violations += sum(part.same_block(u, v) != ((u, v) in oracle)
                                    for u in m.worlds for v in m.worlds)
        q, to_rep = quotient(m, part)
        f = random_formula(g, 4, agents=m.agents)
        quotient_violations += sum(evaluate(m, w, f) != evaluate(q, to_rep[w], f) for w in m.worlds)
    record(5, partition_violations == quotient_violations == 0,
           f"200 models: partition/oracle disagreements {partition_violations}, "
           f"quotient eval disagreements {quotient_violations}")


def _block_pairs(m):
    part = bisim_partition(m)
    return sum(len({(part.block_of[u], part.block_of[v]) for u, v in m.relations[a]}) for a in m.agents)


def test_6_exact_quantifier_soundness():
    """Models are sampled from the <= 3 class, <= 2 agent family with at most
    12 realised class-to-class arrows (<= 4096 profiles) to keep runtime low."""
    g = rng(600)
    bounded = QuantStrategy(mode=BOUNDED, max_clauses=3, max_depth=2)
    loop = Model(("w",), ("a",), {"a": [("w", "w")]})
    hand = (check_arbitrary(loop, "w", parse_formula("<a>T")) is False and
            check_arbitrary(loop, "w", parse_formula("[a]<a>T")) is True)
    fixed_bodies = [parse_formula(s) for s in (
        "<a>T", "[a]<a>T", "<a><a>T -> [a]<a>T", "<a>T -> [b][a]<a>T", "[a]p & ~[b]p", "<a>p")]
    models = refuted = disagreements = exact_true = instantiation_failures = 0
    while models < 60:
        agents = ("a", "b")[:g.randint(1, 2)]
        m = random_model(g, 4, agents=agents, atoms=("p",), density=g.uniform(0.1, 0.4))
        if len(bisim_partition(m)) > 3 or _block_pairs(m) > 12:
            continue
        models += 1
        bodies = [random_formula(g, 3, agents=agents, atoms=("p", "q"), updates=g.random() < 0.3)
                  for _ in range(2)]
        bodies += [f for f in fixed_bodies if agents_of(f) <= set(agents)]
        for body in bodies:
            for w in m.worlds:
                exact = check_arbitrary(m, w, body)
                assert exact is not None
                if check_arbitrary(m, w, body, bounded) is False:
                    refuted += 1
                    disagreements += exact is not False
                if exact:
                    exact_true += 1
                    for _ in range(100):
                        u = random_update(g, agents=agents, atoms=("p", "q"), body_depth=2)
                        instantiation_failures += not evaluate(m, w, Update(u, body))
    record(6, hand and refuted > 0 and disagreements == 0 and instantiation_failures == 0,
           f"{models} models; bounded refutations {refuted}, exact disagreed on {disagreements}; "
           f"{exact_true} exact TRUE verdicts x 100 random updates, {instantiation_failures} failures; "
           f"1-world loop hand cases {'match' if hand else 'MISMATCH'}")


def test_7_common_knowledge_fixpoint():
    g = rng(700)
    violations = 0
    for _ in range(100):
        m = random_model(g, 6, agents=("a", "b", "c")[:g.randint(1, 3)])
        f = random_formula(g, 3, agents=m.agents)
        unfolded = conj(Box(a, And(f, Common(f))) for a in m.agents)
        violations += sum(evaluate(m, w, Common(f)) != evaluate(m, w, unfolded) for w in m.worlds)
    record(7, violations == 0, f"100 model/formula pairs, {violations} violations")


def _run_contract_violations(tm, steps=50):
    n_range, m_range = (-steps - 2, steps + 2), (-3, steps)
    big = run(tm, n_range, m_range)
    bad = 0
    small = run(tm, (-5, 5), (-1, steps // 2))
    bad += sum(big.cells[k] != c for k, c in small.cells.items())
    bad += run(tm, n_range, m_range) != big
    for m, row in big.rows():
        if m < 0:
            bad += sum(c != Cell(tm.blank, VOID_STATE, 0) for c in row)
            continue
        bad += len({c.state for c in row}) != 1
        bad += sum(c.head for c in row) != 1
    return bad


def test_8_run_contract():
    g = rng(800)
    machines = [machine(n) for n in MACHINES] + [random_machine(g, 4, 3) for _ in range(20)]
    violations = sum(_run_contract_violations(tm) for tm in machines)
    record(8, violations == 0, f"{len(machines)} machines x 50 steps, {violations} violations")


def test_9_encoder_shape():
    tm = machine("t_mark")
    voc = Vocabulary.for_machine(tm)
    assert len(voc.state_atoms) == 4 and len(tm.alphabet) == 2
    phi = encode_phi(tm, voc)
    top = split_and(phi)
    implications = [f for f in split_and(encode_transitions(tm, voc))
                    if isinstance(f, Or) and isinstance(f.left, Neg)]
    printed = print_formula(phi)
    reparsed = parse_formula(printed)
    stable = print_formula(reparsed) == printed and reparsed == phi
    expected = 3 * len(tm.alphabet) * len(tm.states)
    record(9, len(top) == 5 and len(implications) == expected and stable,
           f"{len(top)} top-level conjuncts, {len(implications)} transition implications "
           f"(expected {expected}), print/parse stable: {stable} ({len(printed)} chars)")
