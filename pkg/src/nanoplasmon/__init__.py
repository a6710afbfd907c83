"""Design engine for emitter to nanowire plasmon interfaces.

Submodules: ``specfun`` (Bessel functions of complex argument), ``materials``,
``wire_modes`` (plasmon dispersion), ``emitter_coupling`` (decay channels
near a wire), ``tip_model`` (paraboloidal tip), ``outcoupler`` (fiber
coupling and end-to-end efficiency) and ``cli``.
"""

__version__ = "0.1.0"
