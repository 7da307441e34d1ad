# Puts the repository root on sys.path so the feature packages import as top-level modules.
