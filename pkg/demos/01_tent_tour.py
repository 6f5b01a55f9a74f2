"""A tour of the verifiers on the tent map, all in exact arithmetic."""

from peano_chaos import Cell, iterate
from peano_chaos.pl_map import tent
from peano_chaos.verify import chain_transitive, leo_order, periodic_atlas

f = tent()
g = f.graph

# [0, 1/4] -> [0, 1/2] -> [0, 1]: two steps to cover the interval
c = Cell(g, [(0, 0, "1/4")])
print("leo order of [0, 1/4]:", leo_order(f, c, 10))

for k in (1, 2, 3):
    atlas = periodic_atlas(f, k)
    pts = sorted(str(p.t) for p in atlas.points())
    print(f"points of period dividing <= {k}: {pts}  (density radius {atlas.density_radius})")

rep = chain_transitive(f)
for lvl in rep.levels:
    chain = lvl.chain(g.point(0, "1/3"), g.point(0, "7/9"), f)
    print(f"delta={lvl.delta}: {lvl.verdict}, sample chain of length {len(chain.points)} "
          f"replays={chain.replay(f)}")

print("pieces of tent^10:", len(iterate(f, 10).pieces))
