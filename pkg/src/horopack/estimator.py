"""scikit-learn style facade over the packing optimizer.

``fit`` takes a list of catalog symbols (or simplices), solves each packing
problem once and stores the results; ``predict`` returns optimal densities.

    >>> est = PackingDensityEstimator(n_samples=2000).fit(["V3", "Z3"])
    >>> est.predict(["Z3"]).round(6)
    array([0.853276])
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError
from sklearn.utils.validation import check_is_fitted

from .catalog import Catalog, CoxeterSimplex, get_simplex, load_catalog
from .packing import optimize


def check_simplex(obj, catalog: Catalog | None = None) -> CoxeterSimplex:
    """Resolve a symbol or pass through a simplex; raise on anything else."""
    if isinstance(obj, CoxeterSimplex):
        return obj
    if isinstance(obj, str):
        return get_simplex(obj, catalog)
    raise TypeError(f"expected a catalog symbol or CoxeterSimplex, got {type(obj).__name__}")


def check_simplices(X, catalog: Catalog | None = None) -> list:
    if isinstance(X, (str, CoxeterSimplex)):
        X = [X]
    X = list(X)
    if not X:
        raise ValueError("need at least one simplex")
    return [check_simplex(x, catalog) for x in X]


class PackingDensityEstimator(BaseEstimator):
    """Optimal horoball packing density per Coxeter simplex tiling.

    Parameters
    ----------
    n_samples : int
        Interior samples for the falsification check.
    seed : int
        Base seed of the sampler.
    n_jobs : int
        Worker threads for the sampler.
    falsification : bool
        Run the interior sampler and vertex enumeration.
    volume : {None, "closed", "quadrature"}
        Simplex volume source; None picks the closed form when one exists.
    catalog : Catalog or None
        Catalog used to resolve symbols.
    """

    def __init__(self, n_samples=10000, seed=0, n_jobs=1, falsification=True,
                 volume=None, catalog=None):
        self.n_samples = n_samples
        self.seed = seed
        self.n_jobs = n_jobs
        self.falsification = falsification
        self.volume = volume
        self.catalog = catalog

    def _validate_params(self):
        if int(self.n_samples) < 0:
            raise ValueError("n_samples must be non-negative")
        if int(self.n_jobs) < 1:
            raise ValueError("n_jobs must be at least 1")
        if self.volume not in (None, "closed", "quadrature"):
            raise ValueError(f"unknown volume source {self.volume!r}")

    def fit(self, X, y=None):
        self._validate_params()
        simplices = check_simplices(X, self.catalog)
        self.results_ = {}
        for s in simplices:
            self.results_[s.key] = optimize(
                s, n_samples=int(self.n_samples), seed=int(self.seed),
                jobs=int(self.n_jobs), falsification=bool(self.falsification),
                volume=self.volume)
        self.keys_ = tuple(self.results_)
        return self

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self, "results_")
        out = []
        for s in check_simplices(X, self.catalog):
            if s.key not in self.results_:
                raise NotFittedError(f"{s.key} was not part of the fitted set")
            out.append(self.results_[s.key].density)
        return np.array(out)

    def fit_predict(self, X, y=None) -> np.ndarray:
        return self.fit(X).predict(X)

    def score(self, X, y=None) -> float:
        """Negative largest residual against the reference densities."""
        sims = check_simplices(X, self.catalog)
        pred = self.predict(sims)
        ref = np.array([s.reference.density for s in sims])
        return -float(np.max(np.abs(pred - ref)))

    @classmethod
    def full_catalog(cls, **params) -> "PackingDensityEstimator":
        return cls(**params).fit(list(load_catalog()))
