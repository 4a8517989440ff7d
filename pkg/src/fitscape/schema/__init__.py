"""JSON schemas packaged with the library."""
