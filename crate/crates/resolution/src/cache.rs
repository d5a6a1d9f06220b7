//! Resolution cache files (filled in below).
