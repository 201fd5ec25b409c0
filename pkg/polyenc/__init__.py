# Package marker for the type-encoding toolkit.
