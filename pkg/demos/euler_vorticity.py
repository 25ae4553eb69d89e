"""Vorticity form of the 2D Euler equations.

The operator w_x D_y - w_y D_x needs two first-grading corrections to become
skew in the graded sense.  After that its Schouten self-bracket reduces to
zero, so it stays Hamiltonian even when boundary terms are tracked.
"""
import itertools
import random
import time

from varcalc import format_any, is_hamiltonian, jacobi_residual, parse_density, skew_part
from varcalc.fixtures import EULER2D

spec = EULER2D.spec
op = EULER2D.operator()
v = is_hamiltonian(op)
print("operator     ", format_any(op))
print("used         ", format_any(v.operator_used))
print("pre-NF terms ", len(v.pre_nf.terms))
print("residual     ", format_any(v.residual))

#%% a few brackets of enstrophy-like functionals
K = skew_part(op)
names = ["theta()*w^2", "theta()*w*w_x", "theta()*w_y^2*w", "theta()*w_xy"]
dens = [parse_density(spec, s) for s in names]
rnd = random.Random(1)
for F, G, H in rnd.sample(list(itertools.combinations(dens, 3)), 3):
    t0 = time.perf_counter()
    r = jacobi_residual(K, F, G, H)
    print(f"Jacobi({format_any(F)}, {format_any(G)}, {format_any(H)}) = {format_any(r)}"
          f"  [{time.perf_counter() - t0:.2f}s]")
