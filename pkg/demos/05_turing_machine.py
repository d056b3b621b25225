"""A Turing machine as a formula.

An alternating machine over the two-symbol alphabet compiles into a
simultaneous fixpoint: one component per machine state, mapping an
encoded tape and head position to acceptance.  Checking the compiled
formula over a tiny counter system decides the word problem, and a direct
simulator confirms every verdict.  The second half rebuilds the input
from state labels instead, making the formula independent of the word.
"""

import itertools

from hflcheck import evaluate
from hflcheck.denote import full
from hflcheck.encodings import Atm, atm_accepts, format_atm, machine_formula
from hflcheck.lts import gen_counter_lts, gen_counter_lts_labeled

# Universal start: both branches must accept.  Branch one walks right and
# accepts on tt; branch two flips the first cell and accepts on ff.
machine = Atm(
    states=("q0", "q1", "q2", "qa", "qr"),
    exists=frozenset({"q1", "q2"}),
    forall=frozenset({"q0"}),
    accept="qa",
    reject="qr",
    start="q0",
    delta={
        ("q0", True): (("q1", True, 1), ("q2", False, 0)),
        ("q0", False): (("q1", False, 1), ("q2", True, 0)),
        ("q1", True): (("qa", True, 0),),
        ("q1", False): (("qr", False, 0),),
        ("q2", True): (("qr", True, 0),),
        ("q2", False): (("qa", False, 0),),
    },
)
print(format_atm(machine))

p = 3  # tape length 2^p = 8 cells
system = gen_counter_lts(p)
print(f"checking all words shorter than {p} over a {p}-state model:")
for length in range(p):
    for word in itertools.product((True, False), repeat=length):
        phi = machine_formula(machine, 0, p, word)
        val = evaluate(system, phi)
        simulated = atm_accepts(machine, word, 2**p)
        spelled = "".join("t" if b else "f" for b in word) or "(empty)"
        outcome = "accept" if val == full(p) else "reject"
        print(f"  {spelled:>8}: formula={outcome:<7} simulator="
              f"{'accept' if simulated else 'reject'}")
        assert (val == full(p)) == simulated

print("\nword-independent variant: the input lives in the state labels")
phi_fixed = machine_formula(machine, 0, p, None)
for word in ((True,), (False, True)):
    labeled = gen_counter_lts_labeled(p, word)
    val = evaluate(labeled, phi_fixed)
    spelled = "".join("t" if b else "f" for b in word)
    print(f"  labels={spelled:<4} -> "
          f"{'accept' if val == full(p) else 'reject'}")
    assert (val == full(p)) == atm_accepts(machine, word, 2**p)
