"""
Euler Haar - generalized Euler angles, Haar measures and exact moment integrals on SU(N) and SO(N).
"""

__version__ = "0.1.0"
