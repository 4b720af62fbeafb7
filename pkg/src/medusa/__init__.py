"""Space-time medusa complexes and their extended and image persistence."""
