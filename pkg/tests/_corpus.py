"""Shared formula corpus: <= 2 parameters, <= 3 bound variables, atom
degree <= 2, mixing conjunction, disjunction and inequations."""

CORPUS_TEXTS = [
    "params t . t = 0",
    "params t . t - 1 = 0",
    "params t . t != 0",
    "params t . t = 0 | t - 1 = 0",
    "params t . t = 0 & t - 1 = 0",
    "params t . t^2 - 1 = 0",
    "params t . t != 0 | t - 1 = 0",
    "params t . t != 0 & t != 1",
    "params t . !(t = 0 | t^2 - 1 = 0)",
    "params t . t = 0 | t - 1 = 0 | t - 2 = 0",
    "params t . (t = 0 | t - 1 = 0) & t^2 = 0",
    "params t . 2*t - 1 = 0",
    "params t . t^2 - t = 0",
    "params t . 0 = 0",
    "params t . 1 = 0",
    "params t . exists x . t*x - 1 = 0",
    "params t . exists x . x^2 - t = 0",
    "params t . exists x . t - 2*x = 0",
    "params t . exists x . t*x - 1 = 0 | t = 0",
    "params t . exists x . x^2 - t = 0 & t != 0",
    "params t . exists x y . t - x^2 - y^2 = 0",
    "params t . exists x . t*x^2 - x = 0",
    "params t . exists x . t - x = 0 & x^2 - x != 0",
    "params u v . u = 0 | v = 0",
    "params u v . u = 0 & v = 0",
    "params u v . u*v = 0",
    "params u v . u != 0 | v = 0",
    "params u v . u - v = 0",
    "params u v . exists x . u*x - v = 0",
    "params u v . u*v - 1 = 0",
    "params u v . u != v",
    "params u v . (u = 0 & v = 0) | u - 1 = 0",
    "params u v . exists x . u - x^2 = 0 & v - x = 0",
    "params t . exists x . (t - x = 0 | t + x = 0) & x - 1 = 0",
]


def corpus():
    from ringlower.parser import parse_formula

    return [parse_formula(text) for text in CORPUS_TEXTS]
