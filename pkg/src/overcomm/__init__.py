"""Partitions, transversals and greedy overcommutative semigroup varieties."""
