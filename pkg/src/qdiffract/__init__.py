"""Wide-angle Fraunhofer diffraction: quantum-measurement model vs. the
Fresnel-Kirchhoff and Rayleigh-Sommerfeld scalar theories.

Conventions used throughout the package:

* lengths in micrometres, momenta stored as wavenumbers ``k = p / hbar`` in
  rad/um, angles in radians (degrees only at the CLI/CSV boundary);
* aperture and longitudinal Fourier transforms omit the ``(2 pi hbar)``
  prefactors, which cancel in every exported ratio.
"""

__version__ = "0.1.0"
