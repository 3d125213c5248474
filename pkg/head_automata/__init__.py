"""
Head automata toolkit

Probabilistic head acceptors for dependency language modeling and head
transducers for recursive lexical translation.
"""
