"""Three perturbations of staircase maps on the interval, each with its certificate."""

import random

from peano_chaos.construct import (break_chain_transitivity, lc_approx, mixing_perturbation,
                                   random_chain, shadowing_perturbation)
from peano_chaos.cover import refinement_chain
from peano_chaos.pl_map import identity, sup_distance, tent
from peano_chaos.spaces import interval
from peano_chaos.verify import chain_transitive, gn_membership, shadowing_witness

g = interval()

# a trapping set destroys chain transitivity
f = lc_approx(identity(g), "1/8", "1/8")
h, cert = break_chain_transitivity(f, "1/4")
print(f"break-ct: d={sup_distance(f, h).upper}  gap={cert.gap}  replay={cert.replay(h)}  "
      f"ct={chain_transitive(h).verdict}")

# windows between plateaus force mixing on H_2
H = refinement_chain(g, 2)[-1]
res = mixing_perturbation(f, H, "7/8")
print(f"mixing: xi={res.xi}  n0={res.n0}  G_2 at K={res.horizon}: "
      f"{gn_membership(res.g, H, res.horizon).verdict}")

# shadowing: random pseudo-orbits are traced by true orbits
f = lc_approx(tent(g), "1/200", "1/8")
sh = shadowing_perturbation(f, "1/5", "3/10")
rng = random.Random(0)
hits = 0
for _ in range(20):
    chain = random_chain(sh.g, sh.delta, 40, rng)
    hits += shadowing_witness(sh.g, chain, "1/5", delta=sh.delta) is not None
print(f"shadowing: delta={sh.delta}  shadowed {hits}/20 chains of length 40")
