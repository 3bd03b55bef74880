"""Exact engine for incidence loci and Euclid-chain maps between Grassmannians of an algebra."""

__all__ = [
    "exact_linalg",
    "algebra_core",
    "subspace",
    "incidence",
    "euclid",
    "toy_oracle",
    "rng_streams",
    "codecs",
    "errors",
]
