"""Multiple-scale perturbation toolkit: root expansions, asymptotic series,
amplitude equations for weakly nonlinear ODEs and envelope solvers for
dispersive PDEs and Kerr optics."""

__version__ = "0.1.0"
