__version__ = '1.0.0'
__doc__ = '''
# Table of Contents
- Introduction
  - [hyperell](#hyperell)
  - [Version](#current-version)
  - [Features](#available-features)
- Installation
  - [pip](#hyperell-installation)
- Execution:
  - [CLI](#execution)
  - [Verification suites](#verification-suites)

# hyperell

**hyperell** evaluates six families of hyperelliptic integrals three
independent ways (direct quadrature, the u = p + ab/p reduction to complete
elliptic integrals, and Lauricella F_D representations), and checks the
identities that tie them together: formulae for pi, analytic continuation of
F_D to the cut, singular moduli and the H = R G identities at those moduli.

## Current Version

### `1.0.0`

### Available features

- Complete elliptic integral K(k) via the arithmetic-geometric mean, the
  moduli k+ and k- of a parameter pair, Landen descent
- Tanh-sinh quadrature with algebraic endpoint exponents and a semi-infinite map
- I1..I6 by direct quadrature, by their u-domain integrals and in closed form
- Lauricella F_D^(n) by total-degree series and by its Euler integral,
  the argument reduction when c equals the sum of exponents, Gauss 2F1
- Six formulae for pi, continuation of F_D^(3) at argument 2
- Singular moduli from a closed-form table, by bisection and from theta
  constants; the sixteen tabulated H = R G identities
- Verification suites with text, JSON and CSV reports

## hyperell installation

```bash
pip install -e .
```

## Execution

```bash
hyperell eval K k=0.5
hyperell eval pi index=1 a=2 b=1
hyperell eval fd a=0.5 b=0.5 c=1 x=0.2,-0.3 method=series
hyperell eval lambda n=3
```

### Verification suites

```bash
hyperell verify legendre
hyperell verify all --format json --out report.json --jobs 4
hyperell dump-verify-toml-template verify_params
hyperell verify properties --config verify_params.toml
```

The command exits with status 1 when any check fails.
'''
