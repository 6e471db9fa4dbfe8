//! Glauber dynamics and gap estimation (to be filled in).
