"""Exact functor calculus on finite diagrams of compacta."""
__version__ = "0.1.0"
