"""Smoke test for the baselab_py extension module."""

import baselab_py as bl

ctx = bl.SupportContext(["p", "q"], basis="b1", fresh=0, max_rules=None)

socrates = bl.Base("fact man.\nrule man => mortal.")
assert socrates.derives("mortal")
assert not socrates.derives("god")

identity = bl.Formula("p -o p")
assert ctx.valid(identity)
assert ctx.countermodel(identity) is None

p_to_q = bl.Formula("p -o q")
assert not ctx.valid(p_to_q)
assert ctx.countermodel(p_to_q) is not None

b = bl.Base("fact p.")
assert ctx.supports(b, bl.Formula("p"))
assert ctx.entails(bl.Base(), [bl.Formula("p"), bl.Formula("p -o q")], bl.Formula("q"))

clause = bl.Formula("(p -> q) -> q")
assert clause.is_clausal()
assert str(clause.to_base().to_formula()) == str(clause)

assert bl.classical_valid(bl.Formula("p + (p -o zero)"))
assert not bl.intuitionistic_valid(bl.Formula("p + (p -o zero)"))

support_valid, oracle_valid, agree = ctx.compare(bl.Formula("p * q -o q * p"))
assert support_valid and oracle_valid and agree

try:
    bl.Formula("p -o")
except ValueError as e:
    print("parse error surfaced:", e)
else:
    raise AssertionError("expected a parse error")

print("smoke ok", ctx.stats())
