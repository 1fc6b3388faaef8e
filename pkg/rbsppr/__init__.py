"""Import this library to answer single-target Personalized PageRank queries."""
