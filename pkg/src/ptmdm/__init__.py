"""Matrix-diagonalization spectra of PT-symmetric Hamiltonians in a Hermite basis."""
