"""biflock - two-ensemble Cucker-Smale simulator and theory checks."""

__version__ = "0.1.0"
