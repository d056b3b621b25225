"""Counting to 256 with two states.

Over a p-state system, sets of states encode p-bit numbers; functions
from sets to sets encode numbers up to 2^(p * 2^p).  The increment,
comparison and quantifier formulas of the library do real arithmetic on
those encodings.  Here p = 2, so level-1 numbers range over 0..255 while
the model itself has just two states.
"""

from hflcheck import Evaluator, index_of, number_repr
from hflcheck.encodings import counter_formula
from hflcheck.lts import gen_counter_lts
from hflcheck.types import big_f

p = 2
system = gen_counter_lts(p)
ev = Evaluator(system)

print(f"model: {p} states; level-0 range {big_f(0, p)}; "
      f"level-1 range {big_f(1, p)}")

inc = ev.eval_closed(counter_formula("inc", 1, p))
lt = ev.eval_closed(counter_formula("lt", 1, p))

def run(value, *args):
    for a in args:
        value = ev.apply_value(value, a)
    return ev.reify_value(value)

print("\ncounting: 0 -> 1 -> 2 -> ... (level 1, via the increment formula)")
current = number_repr(0, 1, p)
for step in range(5):
    nxt = run(inc, current)
    print(f"  inc({index_of(current):3d}) = {index_of(nxt):3d}")
    current = nxt

print("\nwraparound at the top of the range:")
top = number_repr(big_f(1, p) - 1, 1, p)
print(f"  inc({index_of(top)}) = {index_of(run(inc, top))}")

print("\ncomparisons are 2-valued: the full state set means true")
for i, j in ((3, 200), (200, 3), (77, 77)):
    verdict = run(lt, number_repr(i, 1, p), number_repr(j, 1, p))
    print(f"  lt({i}, {j}) -> {sorted(verdict.states())}")
