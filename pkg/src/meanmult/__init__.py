"""Mean values of multiplicative functions at desk scale.

Library layout:

- primes: prime sieves, weighted prime sums, least-factor cache
- powerseries: exact truncated integer series (GMP-backed)
- multiplicative: function specs, dense sieved tables, convolution,
  partial-summation identity, unconditional mean-value inequalities
- characters: Dirichlet characters, twisting, exceptional-quadratic scan
- hecke: exact eigenvalue tables (eta product / recurrence / files),
  normalization, sign and nonvanishing extraction, moment sums
- halasz: the distance functional rho, lambda minimization, the mean-value
  bound report, Euler-product diagnostics
- constructions: the interval-sign adversarial function and its diagnostics
- experiments: progression/sign/moment/Wirsing/D-sweep report runners
- cli: the ``meanmult`` command
"""

__version__ = "0.1.0"
