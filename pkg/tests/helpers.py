"""Shared builders for the test suite: random PD matrices, streams, rule bases."""

import numpy as np

from driftfis.fis import FuzzySystem, create_rule


def random_pd(rng, d, scale=1.0):
    """Random symmetric positive definite matrix with eigenvalues in ~[0.3, 1.3]*scale."""
    q, _ = np.linalg.qr(rng.standard_normal((d, d)))
    eigs = scale * rng.uniform(0.3, 1.3, size=d)
    return q @ np.diag(eigs) @ q.T


def random_orthogonal(rng, d):
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    # fix signs so the factorization is unique-ish; any orthogonal q works here
    return q * np.sign(np.diag(r))


def gaussian_stream(rng, n, centers, sigma=0.5, labels=None):
    """Class-conditional spherical Gaussians, one center per class, shuffled order."""
    centers = np.asarray(centers, dtype=float)
    c, d = centers.shape
    y = rng.integers(0, c, size=n) if labels is None else np.asarray(labels)
    X = centers[y] + rng.normal(0.0, sigma, size=(n, d))
    return X, y


def random_system(rng, n_rules, d, c, omega=100.0, spread=3.0):
    """Rule base with random centers/PD covariances and random consequent coefficients."""
    rules = []
    for i in range(n_rules):
        rule = create_rule(
            x=rng.uniform(-spread, spread, size=d),
            label=int(rng.integers(0, c)),
            sigma_init=1.0,
            omega=omega,
            n_classes=c,
            rule_id=i,
        )
        cov = random_pd(rng, d)
        rule.premise.cov = cov
        from driftfis.linalg import regularized_inverse
        rule.premise.cov_inv = regularized_inverse(cov)
        rule.consequent.coeffs = rng.standard_normal((d + 1, c))
        rules.append(rule)
    return FuzzySystem(n_features=d, n_classes=c, rules=rules)
