"""Core data models for roughmetrics reports and documents."""

from __future__ import annotations

from enum import Enum
from typing import Any, Optional, Union

from pydantic import BaseModel, ConfigDict, Field


class ReportModel(BaseModel):
    """Base for every serialized report; infinities survive a JSON round trip."""

    model_config = ConfigDict(use_enum_values=True, ser_json_inf_nan="constants")


class SpaceKind(str, Enum):
    """Source of a finite metric space."""

    MATRIX = "matrix"
    EUCLIDEAN = "euclidean"
    TAXICAB = "taxicab"
    SNOWFLAKE = "snowflake"
    CONSTRUCTION = "construction"


class NormKind(str, Enum):
    """Target norm of an embedding."""

    EUCLIDEAN = "euclidean"
    TAXICAB = "taxicab"
    MIXED = "mixed"


class ViolationKind(str, Enum):
    """Metric axiom named by a validation violation."""

    SYMMETRY = "symmetry"
    IDENTITY = "identity"
    POSITIVITY = "positivity"
    TRIANGLE = "triangle"


class ConstructionFamily(str, Enum):
    """Example families that can be built from a construction spec."""

    GEOMETRIC_SRA_SEQUENCE = "geometric_sra_sequence"
    CANTOR_APPROX = "cantor_approx"
    LAAKSO_LEVEL = "laakso_level"
    METRIC_TREE = "metric_tree"
    HILBERT_SEQUENCE = "hilbert_sequence"
    HEISENBERG_AXIS = "heisenberg_axis"
    NO_CONVERSE = "no_converse"
    DYADIC_DOUBLING = "dyadic_doubling"
    HILBERT_TRIANGLES = "hilbert_triangles"
    SIMPLEX_WITH_CENTER = "simplex_with_center"


class WitnessOutcome(str, Enum):
    """How an index-set iteration ended."""

    MEDIAL_SUBSET = "medial_subset"
    TERMINATED = "terminated"


class CliqueColor(str, Enum):
    """Outcome of a monochromatic clique search."""

    RED = "red"
    BLUE = "blue"
    NONE = "none"


class ExtractionMethod(str, Enum):
    """Stage that produced an extracted SRA subset."""

    TRIVIAL = "trivial"
    RED_CLIQUE = "red_clique"
    DIRECT_SEARCH = "direct_search"
    NOT_FOUND = "not_found"


class Prop2Status(str, Enum):
    """Outcome of the decay-index check on a bounded turning medial set."""

    INDEX_FOUND = "index_found"
    SIZE_REPORT = "size_report"
    PRECONDITION_FAILED = "precondition_failed"
    NO_INDEX = "no_index"


# --- metric core ---


class Violation(ReportModel):
    """A single metric-axiom violation."""

    kind: ViolationKind = Field(..., description="Violated axiom")
    indices: list[int] = Field(..., description="Pair (i, j) or triple (i, j, k) with k the detour")
    residual: float = Field(..., description="Signed amount by which the axiom fails")


class ValidationReport(ReportModel):
    """Result of checking the metric axioms."""

    passed: bool = Field(..., description="True iff no violation exceeded the tolerance")
    tolerance: float = Field(..., description="Tolerance used")
    violations: list[Violation] = Field(default_factory=list)

    @classmethod
    def from_violations(cls, violations: list[Violation], tolerance: float) -> ValidationReport:
        """Build a report whose pass flag mirrors the violation list."""
        return cls(passed=not violations, tolerance=tolerance, violations=violations)

    def format_report(self, limit: int = 20) -> str:
        """Format the report as human-readable text."""
        if self.passed:
            return "✓ Metric axioms hold"

        lines = [f"✗ {len(self.violations)} violation(s):"]
        for violation in self.violations[:limit]:
            lines.append(
                f"  [{violation.kind}] {tuple(violation.indices)} residual {violation.residual:.6g}"
            )
        if len(self.violations) > limit:
            lines.append(f"  ... {len(self.violations) - limit} more")
        return "\n".join(lines)


class ComparisonAngles(ReportModel):
    """Angles of the planar comparison triangle of a triple."""

    triple: list[int] = Field(..., description="Indices (i, j, k)")
    angles: list[float] = Field(..., description="Angles at i, j, k in radians")
    degenerate: bool = Field(default=False, description="Collinear (or non-metric) triple")


class DoublingProbe(ReportModel):
    """Largest greedy r/2-separated subset of a closed r-ball found over a grid."""

    count: int = Field(..., description="Maximum packing count (doubling lower bound)")
    center: int = Field(..., description="Center attaining the count")
    radius: float = Field(..., description="Radius attaining the count")


# --- SRA analysis ---


class TripleRow(ReportModel):
    """Required parameter of one unordered triple."""

    i: int
    j: int
    k: int
    required_alpha: float


class SraReport(ReportModel):
    """Minimal SRA parameter of a space."""

    required_alpha: float = Field(..., description="Least alpha >= 0 with SRA(alpha)")
    argmax_triple: Optional[list[int]] = Field(
        default=None, description="Endpoints x, y then middle point z of a maximizing triple"
    )
    per_triple_table: Optional[list[TripleRow]] = Field(default=None)


class SraCheck(ReportModel):
    """Answer to 'does the space satisfy SRA(alpha)'."""

    alpha: float
    passed: bool
    required_alpha: float
    violating_triple: Optional[list[int]] = Field(
        default=None, description="Endpoints x, y then middle point z of the first violation"
    )


class UncPair(ReportModel):
    """UNC feasibility of one pair."""

    x: int
    y: int
    feasible: bool
    lam: Optional[float] = Field(default=None, description="Witness parameter in (delta, 1-delta)")
    blocking: list[list[float]] = Field(
        default_factory=list, description="Merged blocking intervals inside the window"
    )


class UncReport(ReportModel):
    """Uniform non-convexity check."""

    delta: float
    passed: bool
    pairs: list[UncPair] = Field(default_factory=list)


class EfBounds(ReportModel):
    """Lower and upper cardinality bounds of angle-restricted sets in R^n."""

    n: int
    alpha: float
    lower: float
    upper: float
    lower_exponent: float = Field(..., description="Base-2 exponent of the lower bound")
    upper_exponent: float = Field(..., description="Base-2 exponent of the upper bound")
    overflow: bool = Field(default=False, description="A bound exceeded double precision")


# --- ordered sets ---


class OrderReport(ReportModel):
    """Kernels and discrete quantities of an ordered set."""

    size: int
    lambda_contracting: float
    lambda_expanding: float
    medial_theta: float
    bounded_turning: Optional[float] = None
    length: Optional[float] = None
    diameter: Optional[float] = None


class ElementaryCheck(ReportModel):
    """Combination of one-sided kernels into a full SRA statement."""

    lam: float
    preconditions_met: bool
    lambda_contracting: float
    lambda_expanding: float
    medial_theta: float
    sra_holds: bool = Field(..., description="Brute-force SRA(lam) verdict on the whole set")

    @property
    def confirmed(self) -> bool:
        """True unless the preconditions hold while the conclusion fails."""
        return self.sra_holds or not self.preconditions_met


# --- constructions ---


class ConstructionSpec(ReportModel):
    """Family name plus parameters, the 'construction' kind of a space file."""

    family: ConstructionFamily
    params: dict[str, Any] = Field(default_factory=dict)
    seed: Optional[int] = None


# --- subset search ---


class SearchResult(ReportModel):
    """Outcome of a maximum SRA subset search."""

    alpha: float
    cardinality: int
    subset: list[int]
    nodes_explored: int
    proved_optimal: bool


class GrowthRow(ReportModel):
    """One size of a growth profile."""

    size: int
    points: int
    result: SearchResult


class GrowthProfile(ReportModel):
    """Maximum SRA cardinality as a family grows (finite evidence only)."""

    alpha: float
    rows: list[GrowthRow] = Field(default_factory=list)
    note: str = "finite probe: bounded profiles are evidence, not proof, of SRA freeness"


# --- witness engine ---


class ConstantsBundle(ReportModel):
    """Derived scalars of the length-versus-diameter machinery."""

    theta: float
    m: int
    rho: float
    c1: float
    lambda1: float
    big_c: float
    alpha: Optional[float] = None
    k: Optional[int] = None
    m_star: Optional[float] = None
    p: Optional[int] = None
    ramsey_bound: Optional[float] = None
    lambda0: Optional[float] = None


class WitnessStep(ReportModel):
    """One index set of the iteration."""

    t: int = Field(..., description="1-based step number")
    indices: list[int] = Field(..., description="Current index set (0-based positions)")
    triple: Optional[list[int]] = Field(default=None, description="Violating triple (i, j, k)")
    d_t: Optional[int] = Field(default=None, description="Indices removed at this step")
    weighted_sum: float


class WitnessTrace(ReportModel):
    """Full record of an index-set iteration."""

    n: int
    theta: float
    m: int
    rho: float
    steps: list[WitnessStep] = Field(default_factory=list)
    outcome: WitnessOutcome
    medial_subset: Optional[list[int]] = None


class LemmaStep(ReportModel):
    """Per-step weighted-sum inequality evaluation."""

    t: int
    holds: bool
    lhs: float
    rhs: float
    residual: float = Field(..., description="lhs - rhs (holds when <= tolerance)")


class LemmaCheck(ReportModel):
    """Weighted-sum inequality over all executed steps."""

    lam: float
    preconditions_met: bool
    lambda_expanding: float
    steps: list[LemmaStep] = Field(default_factory=list)

    @property
    def all_hold(self) -> bool:
        return self.preconditions_met and all(step.holds for step in self.steps)


class LengthBound(ReportModel):
    """Discrete length against C times discrete diameter."""

    length: float
    diameter: float
    big_c: float
    holds: bool


class CliqueResult(ReportModel):
    """Monochromatic clique search outcome."""

    color: CliqueColor
    subset: list[int] = Field(default_factory=list)
    nodes_explored: int = 0
    exhausted: bool = Field(default=False, description="A search hit its node budget")


class Prop2Result(ReportModel):
    """Decay-index check on a bounded turning medial ordered set."""

    status: Prop2Status
    p: Optional[int] = None
    size: int
    index: Optional[int] = Field(default=None, description="0-based witnessing index")
    medial_theta: float
    bounded_turning: float
    premise_holds: bool


class ExtractionResult(ReportModel):
    """End-to-end SRA subset extraction from an ordered set."""

    alpha: float
    k: int
    subset: Optional[list[int]] = Field(default=None, description="Positions in the input order")
    certified: bool = False
    method: ExtractionMethod
    witness: bool = Field(
        default=False, description="Trivial or red-clique subset, not a direct search find"
    )
    reversed_input: bool = False
    constants: Optional[ConstantsBundle] = None
    medial_subset: Optional[list[int]] = None
    blue_clique: Optional[list[int]] = None
    falsification_artifact: bool = False
    length_bound: Optional[LengthBound] = Field(
        default=None, description="L(S) against C D(S) when the iteration terminated"
    )
    stages: list[str] = Field(default_factory=list, description="Diagnostics per stage")


# --- embeddings ---


class Distortion(ReportModel):
    """Bi-Lipschitz distortion of a map into a normed space."""

    expansion: float = Field(..., description="max ||F(x)-F(y)|| / d(x,y)")
    contraction: float = Field(..., description="max d(x,y) / ||F(x)-F(y)||")
    lipschitz: float = Field(..., description="max(expansion, contraction)")
    spread: float = Field(..., description="expansion * contraction")
    rescaled: float = Field(..., description="Least L after optimal uniform rescaling")


class EmbeddingResult(ReportModel):
    """Coordinates of a map into a normed space."""

    success: bool = True
    message: str = ""
    coords: list[list[float]] = Field(default_factory=list)
    target_norm: NormKind = NormKind.EUCLIDEAN
    split: Optional[int] = Field(
        default=None, description="Mixed norm: taxicab on coordinates [0, split), Euclidean after"
    )
    dimension: int = 0
    distortion: Optional[Distortion] = None
    exact: bool = False
    cross_level_ratios: Optional[list[float]] = Field(
        default=None, description="Min and max ratio over pairs in different levels"
    )
    within_cluster_ratios: Optional[list[float]] = None


class SequenceConditions(ReportModel):
    """Decay conditions of a tree height sequence, checked on a finite prefix."""

    delta: float
    m: int
    cond3: bool = Field(..., description="t_(k+m) <= (1 - delta) t_k wherever both are known")
    cond3_failure: Optional[int] = Field(default=None, description="First failing k (1-based)")
    cond4_sup: int = Field(..., description="max over k of sup{m: t_(k+m) > t_k / 2}")
    lag_bound: float = Field(..., description="Lag bound implied by (delta, m)")


# --- command reports ---


class AnalysisReport(ReportModel):
    """Everything `analyze` computed for one space."""

    name: str = ""
    n: int
    diameter: float
    ultrametric: bool
    sra: Optional[SraReport] = None
    check: Optional[SraCheck] = None
    max_lp_exponent: Optional[float] = None
    lp_lower_bound: Optional[float] = None
    unc: Optional[UncReport] = None
    angles: Optional[ComparisonAngles] = None


class OrderCheckReport(ReportModel):
    """Everything `order-check` computed for one ordered set."""

    order: OrderReport
    elementary: Optional[ElementaryCheck] = None
    trace: Optional[WitnessTrace] = None
    lemma: Optional[LemmaCheck] = None
    termination: Optional[LengthBound] = None


# --- space documents ---


class SpaceDocument(BaseModel):
    """JSON schema of a space file."""

    name: str = ""
    kind: SpaceKind
    points: Optional[list[str]] = None
    matrix: Optional[list[list[float]]] = None
    coords: Optional[list[list[float]]] = None
    alpha: Optional[float] = None
    base: Optional[SpaceDocument] = None
    family: Optional[ConstructionFamily] = None
    params: Optional[dict[str, Any]] = None

    model_config = ConfigDict(use_enum_values=True, extra="forbid")


class OrderedSetDocument(BaseModel):
    """JSON schema of an ordered-set file."""

    space: Union[SpaceDocument, str]
    order: Optional[list[int]] = None
