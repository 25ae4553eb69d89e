"""The three reference operators, built from DSL strings."""
from __future__ import annotations

from dataclasses import dataclass

from .graded import GradedOperator
from .jet import FieldSpec
from .parser import make_spec, parse_operator


@dataclass(frozen=True)
class Fixture:
    name: str
    dims: str
    fields: str
    op: str

    @property
    def spec(self) -> FieldSpec:
        return make_spec(self.dims, self.fields)

    def operator(self) -> GradedOperator:
        return parse_operator(self.spec, self.op)


KDV1 = Fixture("kdv1", "x", "u", "theta()*D[x]")
KDV2 = Fixture("kdv2", "x", "u", "theta()*(D[x]^3 + (2/3)*u*D[x] + (1/3)*u_x)")
EULER2D = Fixture("euler2d", "x,y", "w", "theta()*(w_x*D[y] - w_y*D[x])")

FIXTURES = {f.name: f for f in (KDV1, KDV2, EULER2D)}
