"""Exact collapsed-LDA posterior for a 2-document, 2-token-each corpus (V=2, K=2).

Every Gamma ratio in the collapsed joint is a rising factorial, so with
rational priors the joint is an exact fraction. Prints the 16 normalized
state probabilities (states in lexicographic order of (z00, z01, z10, z11)),
the per-token marginals, and the log joint of the all-zero state.
"""
from fractions import Fraction
from itertools import product
import math

ALPHA = Fraction(1, 2)
ETA = Fraction(1, 4)
K, V = 2, 2
DOCS = [[0, 1], [1, 1]]


def rising(a, n):
    out = Fraction(1)
    for i in range(n):
        out *= a + i
    return out


def joint(z):
    p = Fraction(1)
    n_kv = [[0] * V for _ in range(K)]
    for d, doc in enumerate(DOCS):
        n_dk = [0] * K
        for n, w in enumerate(doc):
            n_dk[z[d][n]] += 1
            n_kv[z[d][n]][w] += 1
        p /= rising(K * ALPHA, len(doc))
        for k in range(K):
            p *= rising(ALPHA, n_dk[k])
    for k in range(K):
        p /= rising(V * ETA, sum(n_kv[k]))
        for v in range(V):
            p *= rising(ETA, n_kv[k][v])
    return p


states = list(product(range(K), repeat=4))
weights = [joint([[s[0], s[1]], [s[2], s[3]]]) for s in states]
total = sum(weights)
for s, w in zip(states, weights):
    q = w / total
    print(s, q, repr(float(q)))
for t in range(4):
    m = sum(w for s, w in zip(states, weights) if s[t] == 0) / total
    print("token", t, "P(z=0) =", m)
print("log joint all-zero =", repr(math.log(weights[0].numerator) - math.log(weights[0].denominator)))
