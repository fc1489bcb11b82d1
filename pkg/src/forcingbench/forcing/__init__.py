from .base import (  # noqa: F401
    CohCondition,
    D2Condition,
    EmCondition,
    FallowReport,
    StageRecord,
    Transcript,
    bounded_halt,
    extends,
    fallow_check,
)
from .coh import CohConfig, coh_step, run_coh  # noqa: F401
from .d2 import D2Config, Delta2Partition, d2_step, run_d2, select_color  # noqa: F401
from .em import EmConfig, em_step, run_em  # noqa: F401
from .pipeline import PipelineConfig, rt2_pipeline  # noqa: F401
from .verify import AuditReport, verify_transcript  # noqa: F401
