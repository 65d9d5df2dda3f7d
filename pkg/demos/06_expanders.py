"""
Group laws versus expanding maps
================================

For f coming from a group law, the quadruple
(f(x,y), f(x,y'), f(x',y), f(x',y')) satisfies f1 f4 = f2 f3 and only
about q^3 of the q^4 quadruples occur.
"""

from graphonreg.expander import expansion_probe, quadruple_census

for tag in ("add", "mul", "mul_twist", "add_square_cube"):
    for q in (5, 7, 11):
        c = quadruple_census(tag, q)
        print(f"{tag:16s} q={q:2d}  image {c.image_size:6d} / {c.domain_size ** 4:6d}"
              f"  ratio {c.ratio:.4f}  syzygy {c.syzygy_holds}")

# x^2 + y^3 splits as g(x) + h(y), so it satisfies the additive syzygy too
rep = expansion_probe("mul", 31, c=0.5, C=1.0)
print("mul on F_31, smallest image fraction", round(rep.min_image_fraction, 3),
      "from", min(rep.fractions, key=rep.fractions.get), "->", rep.verdict)
