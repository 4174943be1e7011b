"""First-order Horn clauses with quantified variables."""
