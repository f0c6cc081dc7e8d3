from .episode import EpisodeRecord, run_episode
from .evaluate import EvaluationResult, TABLE_KINDS, evaluate
from .replay import LogParseError, ReplayDivergence, replay, write_episode_log
from .train import LearningCurve, epsilon_schedule, train

__all__ = [
    "EpisodeRecord",
    "EvaluationResult",
    "LearningCurve",
    "LogParseError",
    "ReplayDivergence",
    "TABLE_KINDS",
    "epsilon_schedule",
    "evaluate",
    "replay",
    "run_episode",
    "train",
    "write_episode_log",
]
