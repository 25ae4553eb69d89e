"""A short walk through the building blocks."""
from varcalc import (
    FieldSpec,
    adjoint,
    canonicalize_one_vector,
    commutator,
    differential_of_functional,
    evolutionary_action,
    exterior_d,
    format_any,
    grading_zero_nf,
    hamiltonian_vector_field,
    parse_density,
    parse_operator,
    parse_tensor,
    poisson_bracket,
    skew_part,
    to_latex,
)
from varcalc.jet import higher_euler
from varcalc.printer import format_poly

spec = FieldSpec(("x",), ("u",))
d = lambda s: parse_density(spec, s)  # noqa: E731

# theta(1) u integrates to minus the derivative, with no boundary lost
print(format_any(grading_zero_nf(d("theta(1)*u"))))

# higher Euler operators of u u_xx
f = d("theta()*u*u_xx").grade0()
for k in range(3):
    print(f"E^{k}:", format_poly(spec, higher_euler(f, 0, (k,))))

# the differential keeps its slot structure; d of it vanishes
F = d("theta()*u*u_x^2 + theta(1)*u^3")
dF = differential_of_functional(F)
print("dF   =", format_any(dF))
print("d dF =", format_any(exterior_d(dF)))

#%% operators
D = parse_operator(spec, "theta()*D[x]")
print("\nadjoint of D :", format_any(adjoint(D)))
K = skew_part(D)
print("skew part    :", format_any(K))
print("LaTeX        :", to_latex(K))

#%% brackets and vector fields
H = d("theta()*u^2/2")
print("\n{u, u^2/2} =", format_any(grading_zero_nf(poisson_bracket(K, d("theta()*u"), H))))
xi = hamiltonian_vector_field(K, H)
print("I dH       =", format_any(xi))
print("xi(u^3)    =", format_any(grading_zero_nf(evolutionary_action(xi, d("theta()*u^3")))))
eta = hamiltonian_vector_field(K, d("theta()*u^3"))
print("[xi, eta]  =", format_any(commutator(xi, eta)))

# a 1-vector with a derivative on the slot, moved into canonical form
print(format_any(canonicalize_one_vector(parse_tensor(spec, "theta()*u*xi_1"))))
