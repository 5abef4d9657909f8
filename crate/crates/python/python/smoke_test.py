"""Smoke test for the pyqinsdel extension (build with `maturin develop` first)."""

import pyqinsdel as q

x, y = [0, 1, 2], [1, 1, 2]
print("edit matrix:", q.edit_matrix(x, y))
print("candidates:", q.candidates(x, y), "J =", q.oracle_j(x, y))

code = q.Code(l=2, t=2)
mu = code.random_message(seed=7)
codeword = code.encode(mu)
worst = 1.0
for j2 in range(1, code.n + 2):
    for j1 in range(1, code.n + 2):
        received = code.channel(codeword, j2, j1, "mixed")
        for p, state, report in code.decode_branches(received):
            worst = min(worst, state.fidelity(mu))
print(f"min fidelity over all 36 channel positions: {worst:.12f}")
assert worst >= 1 - 1e-9
print("ok")
