"""Hermite normal form and integer solutions of linear systems."""

from zhorn.lattice import IntMatrix, hermite_normal_form, rank_rational, solve_diophantine

# Column HNF: H = M U with U unimodular.
M = IntMatrix.from_rows([[2, 4, 4], [-6, 6, 12]])
H, U = hermite_normal_form(M)
print("M =", M.tolist())
print("H =", H.tolist())
print("U =", U.tolist())
assert M @ U == H

# The integer solutions of 2x + 4y = 6 form the line (1, 1) + t (2, -1).
L = solve_diophantine(IntMatrix.from_rows([[2, 4]]), [6])
print("2x + 4y = 6:", L.particular, "+ span", L.basis)
print("points for t = -2..2:", [L.point([t]) for t in range(-2, 3)])

# 2x = 3 has rational but no integer solutions.
print("2x = 3:", solve_diophantine(IntMatrix.from_rows([[2]]), [3]))
print("rank of [[1, 2], [2, 4]]:", rank_rational([[1, 2], [2, 4]]))
