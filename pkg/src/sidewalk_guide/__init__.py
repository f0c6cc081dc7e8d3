"""Sidewalk navigation simulator with learning obstacle avoidance and a
conversational guide."""

__version__ = "0.1.0"
