"""Numerical laboratory for critical Adams and Trudinger-Moser extremals."""
