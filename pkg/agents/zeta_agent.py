import logging
import time
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Optional

from agents.bundles import FixtureBundle
from core.config import settings
from core.errors import CertificationError, NotTightError, SemanticValidationError
from core.geodesics import FamilyTableRow, PlacedCurve, place_at_boundary, systole_profile
from core.matrices import CarryingMatrix
from core.moves import min_weight_bound
from core.pa_engine import LoopAssembly, assemble, certify_pa, period_matrix, positivity_power
from core.run_state import RunPhase, RunState

logger = logging.getLogger(__name__)

LOOPS = ("phi0", "phi1", "phi2")
SUBTRACKS = ("sigma0", "sigma1", "sigma2")
TRANSLATES = (-1, 0, 1)


def check_zeta_structure(bundle: FixtureBundle) -> Dict[str, int]:
    """
    Структурные условия набора: σ₁ ∪ σ₂ = τ, σ₁ ∩ σ₂ = σ₀, 3g-3+m >= 4,
    периоды φ₀, φ₁, φ₂ и роли gamma1, gamma2 на месте, блок φ_i на σ_i
    примитивен.

    Returns:
        Степень положительности блока каждого периода на его подтреке

    Raises:
        SemanticValidationError: с именем нарушенного условия
    """
    for name in SUBTRACKS:
        if name not in bundle.subtracks:
            raise SemanticValidationError("zeta-subtracks", f"нет подтрека {name}")
    for name in LOOPS:
        bundle.loop(name)
    for role in ("gamma1", "gamma2"):
        bundle.curve_for(role)

    sigma0, sigma1, sigma2 = (bundle.subtracks[name] for name in SUBTRACKS)
    missing = set(bundle.track.branches) - (sigma1 | sigma2)
    if missing:
        raise SemanticValidationError("zeta-cover", f"ветви {sorted(missing)} не лежат ни в σ₁, ни в σ₂")
    if sigma1 & sigma2 != sigma0:
        raise SemanticValidationError(
            "zeta-overlap", f"σ₁ ∩ σ₂ = {sorted(sigma1 & sigma2)}, а σ₀ = {sorted(sigma0)}")
    if bundle.track.surface.complexity < 4:
        raise SemanticValidationError(
            "zeta-complexity", f"3g-3+m = {bundle.track.surface.complexity} < 4")

    powers = {}
    for loop_name, sub_name in zip(LOOPS, SUBTRACKS):
        block = restricted(period_matrix(bundle.loop(loop_name)), bundle.subtracks[sub_name])
        power = positivity_power(block)
        logger.info(f"{loop_name} на {sub_name}: степень положительности {power}")
        if power is None:
            raise SemanticValidationError(
                "zeta-tight", f"ни одна степень блока {loop_name} на {sub_name} не положительна")
        powers[loop_name] = power
    return powers


def restricted(matrix: CarryingMatrix, branches: Iterable[int]) -> CarryingMatrix:
    """Блок матрицы на строках и столбцах данных ветвей"""
    index = sorted(branches)
    return CarryingMatrix(tuple(tuple(matrix.rows[i - 1][j - 1] for j in index) for i in index))


class ZetaFamilyAgent:
    """
    Семейство ζ(k) = φ₁ ∘ φ₀^{2k} ∘ φ₂ ∘ φ₀^{2k}.

    Кривые γ₁, γ₂ ставятся на каждую границу блоков склеенного периода
    и сдвигаются на ±1 период; sup по периоду min по кривым оценки длины
    должен убывать с ростом k.
    """

    def __init__(self, bundle: FixtureBundle, tol: Optional[Fraction] = None,
                 grid_steps: Optional[int] = None, state: Optional[RunState] = None,
                 require_square_positive: bool = True):
        self.diagnostics = check_zeta_structure(bundle)
        self.bundle = bundle
        self.tol = settings.tol if tol is None else Fraction(tol)
        self.grid_steps = settings.grid_steps if grid_steps is None else grid_steps
        self.state = state
        self.require_square_positive = require_square_positive
        self.loops = {name: bundle.loop(name) for name in LOOPS}
        self.gammas = {role: bundle.curve_for(role) for role in ("gamma1", "gamma2")}

        self.stats: Dict[str, Any] = {
            "rows": 0,
            "splits": 0,
            "decreasing": True,
        }

    def loop_for(self, k: int) -> LoopAssembly:
        if k < 1:
            raise ValueError(f"k должно быть положительным, получено {k}")
        phi0, phi1, phi2 = (self.loops[name] for name in LOOPS)
        return assemble([phi1] + [phi0] * (2 * k) + [phi2] + [phi0] * (2 * k))

    def curve_family(self, assembly: LoopAssembly) -> List[PlacedCurve]:
        family = []
        for boundary in range(len(assembly.boundaries)):
            for role, curve in self.gammas.items():
                for translate in TRANSLATES:
                    name = f"{role}@{boundary}{translate:+d}"
                    family.append(place_at_boundary(assembly, curve, boundary, name, translate))
        return family

    def _record(self, name: str, summary: Dict[str, Any], started: float, phase: RunPhase):
        if self.state is not None:
            self.state.add_step(phase, name, summary, time.time() - started)

    def row(self, k: int) -> FamilyTableRow:
        started = time.time()
        assembly = self.loop_for(k)
        ps = assembly.period
        matrix = period_matrix(ps)
        square = matrix @ matrix
        if not square.is_positive and self.require_square_positive:
            raise CertificationError(
                f"ζ({k})²: матрица периода не положительна (min = {square.min_entry}, "
                f"нулей {square.size ** 2 - square.nonzero_count}); "
                f"блоки φ_i на σ_i: {self.diagnostics}")
        cert = certify_pa(ps, self.tol)
        self._record(f"zeta k={k}: certify", {"splits": len(ps), "alpha": str(cert.dilatation)},
                     started, RunPhase.CERTIFY)

        started = time.time()
        family = self.curve_family(assembly)
        profile = systole_profile(cert, ps, family, self.grid_steps, self.tol)
        self._record(f"zeta k={k}: profile", {"curves": len(family), "sup_min": str(profile.sup_min_bound)},
                     started, RunPhase.PROFILE)

        notes = [f"{name}|σ: {power}" for name, power in self.diagnostics.items()]
        try:
            notes.append(f"c = {min_weight_bound(ps.seq)}")
        except NotTightError:
            notes.append("последовательность не tight, c не вычислена")

        self.stats["rows"] += 1
        self.stats["splits"] += len(ps)
        return FamilyTableRow(
            param=k,
            alpha_lo=cert.dilatation.lo,
            alpha_hi=cert.dilatation.hi,
            period_log_lo=profile.period_log.lo,
            period_log_hi=profile.period_log.hi,
            supmin_lo=profile.sup_min_bound.lo,
            supmin_hi=profile.sup_min_bound.hi,
            positivity_power=cert.positivity_power,
            square_positive=square.is_positive,
            notes=notes
        )

    def run(self, k_values: Iterable[int]) -> List[FamilyTableRow]:
        rows = []
        for k in k_values:
            rows.append(self.row(k))
            if len(rows) > 1 and rows[-1].supmin_hi > rows[-2].supmin_hi:
                self.stats["decreasing"] = False
                logger.warning(f"sup min не убывает между k={rows[-2].param} и k={k}")
        return rows


def zeta_family(bundle: FixtureBundle, k_values: Iterable[int], tol: Optional[Fraction] = None,
                grid_steps: Optional[int] = None, state: Optional[RunState] = None) -> List[FamilyTableRow]:
    return ZetaFamilyAgent(bundle, tol, grid_steps, state).run(k_values)
