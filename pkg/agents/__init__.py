# Agents: fixture bundles and family workers
from agents.bundles import FixtureBundle, parse_bundle
from agents.twist_agent import TwistFamilyAgent, twist_family
from agents.zeta_agent import ZetaFamilyAgent, zeta_family

__all__ = [
    "FixtureBundle",
    "parse_bundle",
    "TwistFamilyAgent",
    "twist_family",
    "ZetaFamilyAgent",
    "zeta_family",
]
