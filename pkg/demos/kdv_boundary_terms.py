"""The second KdV operator with and without boundary bookkeeping.

D^3 + (2/3) u D + (1/3) u_x is the textbook second Hamiltonian structure of KdV.
Once every integration by parts leaves a theta-graded trace behind, its
Schouten self-bracket no longer vanishes.
"""
from varcalc import format_any, is_hamiltonian, parse_density, skew_part
from varcalc.brackets import sn_jacobi_pair
from varcalc.fixtures import KDV1, KDV2

spec = KDV2.spec
op = KDV2.operator()
print("operator      ", format_any(op))

# The raw operator is not skew-adjoint once boundary terms count; its skew part
# picks up theta(1), theta(2), theta(3) corrections.
K = skew_part(op)
print("skew part     ", format_any(K))

#%% graded verdict
v = is_hamiltonian(op)
print("\n[Psi, Psi] before NF:", format_any(v.pre_nf))
print("[Psi, Psi] after NF: ", format_any(v.residual))
print("Hamiltonian (graded):", v.is_hamiltonian)

#%% classical verdict: drop the gradings and test for a total divergence
c = is_hamiltonian(op, "classical")
print("Hamiltonian (classical):", c.is_hamiltonian)

#%% the first structure is fine in both senses
print("\nKdV-1 graded:", is_hamiltonian(KDV1.operator()).is_hamiltonian)

#%% Jacobi identity on concrete functionals
F, G, H = (parse_density(spec, s) for s in ("theta()*u", "theta()*u^2", "theta()*u_x^2*u"))
jac, t = sn_jacobi_pair(K, F, G, H)
print("\n{{F,G},H} + c.p.     =", format_any(jac))
print("[Psi,Psi](dF,dG,dH)  =", format_any(t))
