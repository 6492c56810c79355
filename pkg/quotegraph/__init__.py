"""
Quotation network construction.

Turns a corpus of news articles with attributed quotations into a directed
network of who mentions whom, enriches its nodes with Wikidata attributes and
computes structural and demographic statistics.
"""
