"""Two-channel session replication: wire format, board replication, session
state machine, and click delivery policies."""

from .clicks import ClickMode, DeliveryStalled, click_delivery
from .replication import (
    PoseStream,
    Replica,
    SeqGap,
    apply_delta,
    board_from_snapshot,
    delta_deselect,
    delta_drop,
    delta_pick,
    delta_select,
    ingest_pose,
    snapshot_of,
)
from .session import (
    IllegalTransition,
    JoinEvent,
    NAMED_CONDITIONS,
    Phase,
    ResumeEvent,
    SessionState,
    TaskCompleteEvent,
    TrainingDoneEvent,
    condition_order_for_pair,
    new_session,
    session_step,
)
from .wire import (
    BadMagic,
    ButtonEvent,
    Channel,
    CubeMove,
    CubeRecord,
    DeltaOp,
    EmbodimentFrame,
    FrameStream,
    Highlight,
    Join,
    Joint,
    LengthMismatch,
    MsgType,
    NO_CELL,
    NO_CUBE,
    PoseSample,
    RoleAssign,
    SeqCounter,
    SessionMessage,
    StateDelta,
    StateSnapshot,
    TaskComplete,
    TaskStart,
    TruncatedPayload,
    UnknownType,
    channel_of,
    decode,
    decode_prefix,
    encode,
    message_channel,
    message_type,
)

__all__ = [name for name in dir() if not name.startswith("_")]
