//! Recursive Brascamp-Lieb certificate (to be filled in).
