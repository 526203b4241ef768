"""Plane maps over GF(q) and the permutations they induce on rational points."""
