"""Crystal B(infinity) of Borcherds-Cartan data embedded in integer path vectors and cut out by linear forms."""
