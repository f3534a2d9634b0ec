"""Monte Carlo experiments on maxima of Gaussian fields: variance of the
maximum, stability of the argmax under Ornstein-Uhlenbeck noise, and
multiple near-maximal, nearly orthogonal peaks."""

__version__ = "0.1.0"
