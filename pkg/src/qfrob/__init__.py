"""Frobenius intertwiners for p-adic q-hypergeometric difference equations.

Modules:
    padic     truncated p-adic scalars
    qseries   truncated power series and matrices of them
    qspecial  q-numbers, q-Pochhammer symbols, Morita and Koblitz gamma
    hyperq    the q-hypergeometric system, its frames and congruences
    frobq     intertwiners and the digit-by-digit search
    cohom     the q -> 1 limit: hypergeometric, projective and Bessel systems
    cyclo     identities at roots of unity
    cli       command-line driver
"""

__version__ = "0.1.0"
