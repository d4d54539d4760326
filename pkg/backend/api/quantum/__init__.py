"""
Fragmented classical-shadow estimation.

    simulator   dense statevector / density-matrix simulation, Haar gates
    pauli       sparse Pauli strings and observables
    cutter      circuit -> fragment graph, kappa/Gamma/Delta partition
    shadows     state and Choi-state classical shadows, matched estimator
    recombine   contraction of per-fragment traces over edge operators
    oracle      exact Choi matrices and cut-identity checks
    bounds      sample-complexity quotes and error-propagation checks
    ansatz      clustered ansatz, random observables and cut instances
    experiments grid runner, CSV output and unobserved-pattern statistics
"""
