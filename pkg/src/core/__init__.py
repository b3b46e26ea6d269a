"""Rate engine for time-sharing traitor-tracing codes."""
