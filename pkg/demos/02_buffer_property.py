"""A non-regular property: buffer underflow detection.

No finite automaton can count unboundedly, but a fixpoint at type
Pr -> Pr can.  The formula below finds paths spelling a word generated by
X -> out | in X X: one more `out` than `in`, never out-heavy before the
end.  We sweep every in/out word up to length 6 and compare the verdict
with plain arithmetic on the word.
"""

import itertools

from hflcheck import holds, print_formula
from hflcheck.encodings import buffer_formula
from hflcheck.lts import gen_word_lts


def underflow_prefix(word):
    for cut in range(1, len(word) + 1):
        prefix, balance = word[:cut], 0
        for a in prefix[:-1]:
            balance += 1 if a == "in" else -1
            if balance < 0:
                break
        else:
            if balance + (1 if prefix[-1] == "in" else -1) == -1:
                return True
    return False


phi = buffer_formula()
print("underflow formula:")
print(" ", print_formula(phi))

total = mismatches = 0
shown = 0
for length in range(7):
    for word in itertools.product(("in", "out"), repeat=length):
        verdict = holds(gen_word_lts(word), 0, phi)
        expected = underflow_prefix(word)
        total += 1
        mismatches += verdict != expected
        if shown < 6 and length == 3:
            print(f"  {'.'.join(word):<12} underflow={verdict}")
            shown += 1

print(f"\nchecked {total} words, {mismatches} disagreements with arithmetic")
assert mismatches == 0
