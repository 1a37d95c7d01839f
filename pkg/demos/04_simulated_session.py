# Full headless sessions over the simulated network: a clean run, a lossy
# run, and a frame-naive assembler who misreads reversed directions.

from negspace.geometry import Role
from negspace.runtime import (
    AgentPolicy,
    Interpretation,
    NetworkModel,
    simulate_session,
)
from negspace.tasks import format_summary, score_log, summarize


def describe(title, result):
    rows = [score_log(log) for log in result.task_logs]
    print(f"== {title}")
    print(f"   virtual duration {result.duration_s:.0f}s, "
          f"replicas converged: {result.replicas_converged}")
    print(f"   stats: {result.stats}")
    print(format_summary(summarize(rows)))
    print()


# Two cooperative frame-aware agents on a clean network: training plus all
# eight tasks, not a single wrong selection or placement.
describe("frame-aware agents, lossless network",
         simulate_session(seed=1))

# Same agents, 30% datagram loss with jitter: clicks get retried, the
# reliable channel keeps both replicas in lockstep.
describe("frame-aware agents, 30% datagram loss",
         simulate_session(seed=1, network=NetworkModel(latency_ms=25,
                                                       jitter_ms=15, loss=0.3)))

# A frame-naive assembler misreads reversed verbal directions: errors show up
# exactly in the conditions whose verbal channels the awareness matrix marks
# as mismatched (and the pair recalibrates, as study pairs did).
naive = (AgentPolicy(role=Role.INSTRUCTOR),
         AgentPolicy(role=Role.ASSEMBLER,
                     interpretation=Interpretation.FRAME_NAIVE,
                     misread_probability=0.9))
describe("frame-naive assembler, misread probability 0.9",
         simulate_session(seed=4, policies=naive))
