"""Dunkl calculus on finite root systems and numerical checks of Hardy-type inequalities."""
