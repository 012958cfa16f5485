"""Online Steiner tree with predicted terminals."""
