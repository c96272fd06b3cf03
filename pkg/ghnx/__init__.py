"""ghnx: graph hypernetworks for neural architecture search"""
