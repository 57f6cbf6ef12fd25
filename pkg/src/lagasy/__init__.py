"""Asymptotic evaluation of Laguerre-type orthogonal polynomials."""
