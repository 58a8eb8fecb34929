"""Node density estimation from distance order statistics in random wireless networks."""

__version__ = '1.0.0'
