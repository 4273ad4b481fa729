"""Generic Markov-chain machinery and the error hierarchy."""
