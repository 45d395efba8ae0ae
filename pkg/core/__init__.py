"""
Numerical core package

Modules are imported directly by callers to keep import order acyclic.
"""
