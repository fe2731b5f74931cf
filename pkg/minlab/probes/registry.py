from minlab.probes import blowup, orbits, pseudoarc, rigidity, skew
from minlab.probes.base import ProbeRouter

probe_registry = ProbeRouter()
probe_registry.include_router(orbits.router)
probe_registry.include_router(blowup.router)
probe_registry.include_router(skew.router)
probe_registry.include_router(rigidity.router)
probe_registry.include_router(pseudoarc.router)
