"""Backend clients: HTTP implementations and their recorded-fixture twins."""
