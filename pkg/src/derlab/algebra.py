"""Validated finite-dimensional algebras over F_p given by structure constants.

An algebra is the ambient data for a whole session: every module, diagram
and complex in the library refers back to one Algebra instance.  Sessions
over a non-self-injective algebra are rejected at setup (the gate lives in
`require_self_injective`), because every construction downstream assumes
projectives and injectives coincide.
"""

from __future__ import annotations

from typing import List, Optional, Sequence

import numpy as np

from .field import Mat, FieldError, is_prime


class AlgebraError(ValueError):
    pass


class Algebra:
    """Unital associative F_p-algebra with basis e_0..e_{dim-1}.

    mul[i][j][k] is the e_k-coordinate of e_i * e_j.  The optional radical
    is a list of coordinate vectors spanning a nilpotent two-sided ideal;
    declaring it enables minimal covers in the module layer.
    """

    def __init__(
        self,
        p: int,
        basis_labels: Sequence[str],
        unit: Sequence[int],
        mul,
        radical: Optional[Sequence[Sequence[int]]] = None,
    ) -> None:
        self.p = int(p)
        self.basis_labels = [str(x) for x in basis_labels]
        self.dim = len(self.basis_labels)
        self.unit = np.mod(np.asarray(list(unit), dtype=np.int64), self.p)
        self.mul = np.mod(np.asarray(mul, dtype=np.int64), self.p)
        if radical is None:
            self.radical = None
        else:
            self.radical = Mat(self.p, np.asarray([list(v) for v in radical], dtype=np.int64).T) if len(radical) else Mat.zeros(self.p, self.dim, 0)
        self._op: Optional["Algebra"] = None
        self._regular_action: Optional[List[Mat]] = None

    # -- derived data ---------------------------------------------------

    def right_regular_action(self) -> List[Mat]:
        """Matrices of right multiplication by each basis element on Lambda."""
        if self._regular_action is None:
            # (e_i * e_k)_j = mul[i][k][j]; columns indexed by i
            self._regular_action = [Mat(self.p, self.mul[:, k, :].T) for k in range(self.dim)]
        return self._regular_action

    def act(self, coeffs) -> Mat:
        """Matrix of right multiplication by the element with given coordinates."""
        action = self.right_regular_action()
        out = Mat.zeros(self.p, self.dim, self.dim)
        for k, c in enumerate(np.asarray(coeffs, dtype=np.int64) % self.p):
            if c:
                out = out + action[k].scale(int(c))
        return out

    def opposite(self) -> "Algebra":
        if self._op is None:
            op = Algebra(
                self.p,
                self.basis_labels,
                self.unit,
                self.mul.transpose(1, 0, 2),
                None,
            )
            op.radical = self.radical
            op._op = self
            self._op = op
        return self._op

    def __repr__(self) -> str:
        return f"Algebra(p={self.p}, dim={self.dim}, basis={self.basis_labels})"


def validate_algebra(alg: Algebra) -> Algebra:
    """Check primality, unitality, associativity and the declared radical.

    Returns the same object on success; raises AlgebraError naming the
    failing axiom (with a witness triple for associativity).
    """
    if not is_prime(alg.p):
        raise AlgebraError(f"p = {alg.p} is not prime")
    if alg.mul.shape != (alg.dim, alg.dim, alg.dim):
        raise AlgebraError(f"structure constants have shape {alg.mul.shape}, expected {(alg.dim,)*3}")
    if alg.unit.shape != (alg.dim,):
        raise AlgebraError(f"unit vector has length {alg.unit.shape}, expected {alg.dim}")

    p, mul, u = alg.p, alg.mul, alg.unit
    # unit * e_j = e_j and e_i * unit = e_i
    left = np.einsum("i,ijm->jm", u, mul) % p
    right = np.einsum("j,ijm->im", u, mul) % p
    eye = np.eye(alg.dim, dtype=np.int64)
    if not np.array_equal(left, eye):
        j = int(np.nonzero((left - eye) % p)[0][0])
        raise AlgebraError(f"unit failure: unit * {alg.basis_labels[j]} != {alg.basis_labels[j]}")
    if not np.array_equal(right, eye):
        i = int(np.nonzero((right - eye) % p)[0][0])
        raise AlgebraError(f"unit failure: {alg.basis_labels[i]} * unit != {alg.basis_labels[i]}")

    # associativity on all basis triples
    lhs = np.einsum("ijl,lkm->ijkm", mul, mul) % p  # (e_i e_j) e_k
    rhs = np.einsum("jkl,ilm->ijkm", mul, mul) % p  # e_i (e_j e_k)
    if not np.array_equal(lhs, rhs):
        bad = np.argwhere((lhs - rhs) % p)
        i, j, k, _ = (int(x) for x in bad[0])
        names = alg.basis_labels
        raise AlgebraError(
            f"non-associative: ({names[i]}*{names[j]})*{names[k]} != {names[i]}*({names[j]}*{names[k]})"
        )

    if alg.radical is not None:
        _validate_radical(alg)
    return alg


def _validate_radical(alg: Algebra) -> None:
    from .field import column_space_basis, hstack, in_column_span, rank

    rad = alg.radical
    if rad.rows != alg.dim:
        raise AlgebraError("radical vectors have the wrong length")
    span = column_space_basis(rad)
    # two-sided ideal: e_i * r and r * e_i stay in the span
    for k in range(alg.dim):
        right_mult = alg.right_regular_action()[k] @ span  # r * e_k
        # e_k * r: (e_k * e_i)_j = mul[k][i][j], columns indexed by i
        left_mat = Mat(alg.p, alg.mul[k, :, :].T)
        left_mult = left_mat @ span
        if not in_column_span(span, right_mult) or not in_column_span(span, left_mult):
            raise AlgebraError(f"declared radical is not a two-sided ideal (fails at basis element {alg.basis_labels[k]})")
    # nilpotency: powers of the ideal must hit zero
    power = span
    for _ in range(alg.dim + 1):
        if power.cols == 0 or power.is_zero():
            return
        cols = []
        for i in range(power.cols):
            x = power.col(i)
            for j in range(span.cols):
                cols.append(alg.act(span.a[:, j]) @ x)  # x * r_j
        power = column_space_basis(hstack(cols)) if cols else Mat.zeros(alg.p, alg.dim, 0)
    raise AlgebraError("declared radical is not nilpotent")


def is_self_injective(alg: Algebra) -> bool:
    """Is the linear dual of the regular module projective over the opposite?"""
    from . import modules

    reg = modules.regular_module(alg)
    dual = modules.dual_module(reg)
    return modules.is_projective(dual)


def require_self_injective(alg: Algebra) -> Algebra:
    if not is_self_injective(alg):
        raise AlgebraError("algebra is not self-injective; session refused")
    return alg


def algebra_from_dict(data: dict) -> Algebra:
    """Load from the JSON document format; integers are reduced mod p."""
    try:
        alg = Algebra(
            int(data["p"]),
            data["basis"],
            data["unit"],
            data["mul"],
            data.get("radical"),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise AlgebraError(f"malformed algebra document: {exc}") from exc
    return validate_algebra(alg)


def algebra_to_dict(alg: Algebra) -> dict:
    out = {
        "p": alg.p,
        "dim": alg.dim,
        "basis": list(alg.basis_labels),
        "unit": [int(x) for x in alg.unit],
        "mul": alg.mul.tolist(),
    }
    if alg.radical is not None:
        out["radical"] = [ [int(x) for x in alg.radical.a[:, j]] for j in range(alg.radical.cols) ]
    return out


def dual_numbers(p: int = 2) -> Algebra:
    """F_p[x]/(x^2), the default session algebra: basis {1, x}, x*x = 0."""
    mul = np.zeros((2, 2, 2), dtype=np.int64)
    mul[0, 0, 0] = 1  # 1*1 = 1
    mul[0, 1, 1] = 1  # 1*x = x
    mul[1, 0, 1] = 1  # x*1 = x
    # x*x = 0
    return validate_algebra(Algebra(p, ["1", "x"], [1, 0], mul, radical=[[0, 1]]))


def group_algebra_c2(p: int = 2) -> Algebra:
    """F_p[C_2]: basis {1, g}, g*g = 1.  Over F_2 this is self-injective."""
    mul = np.zeros((2, 2, 2), dtype=np.int64)
    mul[0, 0, 0] = 1
    mul[0, 1, 1] = 1
    mul[1, 0, 1] = 1
    mul[1, 1, 0] = 1
    rad = [[1, 1]] if p == 2 else None  # (1+g) spans the radical only at p=2
    return validate_algebra(Algebra(p, ["1", "g"], [1, 0], mul, radical=rad))


def upper_triangular_2x2(p: int = 2) -> Algebra:
    """2x2 upper-triangular matrices: basis {e11, e22, e12}.  Not self-injective."""
    names = ["e11", "e22", "e12"]
    mul = np.zeros((3, 3, 3), dtype=np.int64)
    # e11*e11 = e11, e22*e22 = e22, e11*e12 = e12, e12*e22 = e12
    mul[0, 0, 0] = 1
    mul[1, 1, 1] = 1
    mul[0, 2, 2] = 1
    mul[2, 1, 2] = 1
    return validate_algebra(Algebra(p, names, [1, 1, 0], mul, radical=[[0, 0, 1]]))
