import logging
import time
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Optional

from agents.bundles import FixtureBundle
from core.config import settings
from core.geodesics import FamilyTableRow, curve_intersection_plus, place_at_boundary, systole_profile
from core.moves import carrying_matrix
from core.pa_engine import LoopAssembly, PACertificate, assemble, certify_pa, twist_period
from core.run_state import RunPhase, RunState

logger = logging.getLogger(__name__)


class TwistFamilyAgent:
    """
    Семейство ζ_u = φ² ψ^{-u}, где ψ^{-1} - твист вдоль кривой роли "twist"
    в том направлении, которое трек реализует расщеплениями (twist_period).

    Для каждого u строится склеенный период, сертифицируется растяжение,
    считается i(λ_u, α) в начале периода и оценка 4√(i⁺i⁻) длины α
    в середине окна твистов.
    """

    def __init__(self, bundle: FixtureBundle, tol: Optional[Fraction] = None,
                 grid_steps: Optional[int] = None, state: Optional[RunState] = None):
        self.bundle = bundle
        self.tol = settings.tol if tol is None else Fraction(tol)
        self.grid_steps = settings.grid_steps if grid_steps is None else grid_steps
        self.state = state

        self.phi = bundle.loop("phi")
        self.curve = bundle.curve_for("twist")
        self.psi = twist_period(bundle.track, self.curve)

        self.stats: Dict[str, Any] = {
            "rows": 0,
            "splits": 0,
            "monotone": True,
            "bounded": True,
        }
        self._base_cert: Optional[PACertificate] = None
        self.fixed_bound = self._fixed_bound()
        logger.info(f"твист вдоль {list(self.curve.branch_cycle)}: {len(self.psi)} расщеплений, "
                    f"граница i(λ, α) <= {self.fixed_bound}")

    def _fixed_bound(self) -> Fraction:
        """max_j (½ Σ_{концы вне α} A[b][j]) / colsum_j(A) для префикса φ²"""
        matrix = carrying_matrix(assemble([self.phi, self.phi]).period.seq)
        best = Fraction(0)
        for j in range(matrix.size):
            column = matrix.column(j)
            off = sum(column[end[0] - 1] for end, _ in self.curve.off_ends)
            best = max(best, Fraction(off, 2 * sum(column)))
        return best

    @property
    def base_certificate(self) -> PACertificate:
        if self._base_cert is None:
            self._base_cert = certify_pa(self.phi, self.tol)
        return self._base_cert

    def loop_for(self, u: int) -> LoopAssembly:
        return assemble([self.phi, self.phi] + [self.psi] * u)

    def _record(self, name: str, summary: Dict[str, Any], started: float, phase: RunPhase = RunPhase.CERTIFY):
        if self.state is not None:
            self.state.add_step(phase, name, summary, time.time() - started)

    def row(self, u: int) -> FamilyTableRow:
        started = time.time()
        assembly = self.loop_for(u)
        ps = assembly.period
        cert = certify_pa(ps, self.tol)
        self._record(f"twist u={u}: certify", {"splits": len(ps), "alpha": str(cert.dilatation)}, started)

        started = time.time()
        track = ps.start
        intersection = curve_intersection_plus(track, cert.lambda_plus, self.curve)
        notes = []
        if intersection > self.fixed_bound:
            self.stats["bounded"] = False
            notes.append(f"i(λ, α) = {intersection} больше границы {self.fixed_bound}")

        middle = 2 + u // 2
        placed = place_at_boundary(assembly, self.curve, middle, "alpha")
        profile = systole_profile(cert, ps, [placed], self.grid_steps, self.tol)
        floor = profile.curves[0].floor

        if u == 0:
            squared = self.base_certificate.dilatation ** 2
            if not squared.overlaps(cert.dilatation):
                notes.append(f"растяжение φ² {cert.dilatation} не совпадает с квадратом {squared}")
        self._record(f"twist u={u}: profile", {"i_plus": str(intersection), "floor": str(floor)},
                     started, RunPhase.PROFILE)

        self.stats["rows"] += 1
        self.stats["splits"] += len(ps)
        return FamilyTableRow(
            param=u,
            alpha_lo=cert.dilatation.lo,
            alpha_hi=cert.dilatation.hi,
            period_log_lo=profile.period_log.lo,
            period_log_hi=profile.period_log.hi,
            supmin_lo=floor.lo,
            supmin_hi=floor.hi,
            positivity_power=cert.positivity_power,
            intersection_lo=intersection,
            intersection_hi=intersection,
            notes=notes
        )

    def run(self, u_values: Iterable[int]) -> List[FamilyTableRow]:
        rows = []
        for u in u_values:
            rows.append(self.row(u))
            if len(rows) > 1 and not rows[-2].period_log_hi < rows[-1].period_log_lo:
                self.stats["monotone"] = False
                logger.warning(f"длина периода не возрастает между u={rows[-2].param} и u={u}")
        return rows


def twist_family(bundle: FixtureBundle, u_values: Iterable[int], tol: Optional[Fraction] = None,
                 grid_steps: Optional[int] = None, state: Optional[RunState] = None) -> List[FamilyTableRow]:
    return TwistFamilyAgent(bundle, tol, grid_steps, state).run(u_values)
