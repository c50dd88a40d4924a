"""Crystal, polyhedral and enumeration modules for polycrystal."""
