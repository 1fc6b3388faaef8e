"""Applications built on single-target queries."""
