"""Nano-quadrotor system-identification benchmark toolkit.

Simulation of closed-loop flights, flight-log preprocessing, rotor
coefficient estimation, baseline predictors, and the multi-horizon
prediction evaluation protocol.
"""

__version__ = "0.1.0"
