"""
Numerical checks of finite-dimensional operational-probabilistic theories: Jordan algebras,
symmetric cones, classical/real/complex quantum backends and a circuit language.
"""

__version__ = '0.3.0'  # pragma: no cover
