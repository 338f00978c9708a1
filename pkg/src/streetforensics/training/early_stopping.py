import math


class EarlyStopping:
    """Stop after `patience` consecutive epochs that fail to strictly lower the best validation loss."""

    def __init__(self, patience: int):
        if patience < 1:
            raise ValueError("patience must be at least 1")
        self.patience = patience
        self.best_loss = math.inf
        self.best_epoch = 0
        self.counter = 0

    def improves(self, val_loss: float) -> bool:
        return val_loss < self.best_loss

    def update(self, epoch: int, val_loss: float) -> bool:
        """Record one epoch; returns True when it set a new best."""
        if self.improves(val_loss):
            self.best_loss = val_loss
            self.best_epoch = epoch
            self.counter = 0
            return True
        self.counter += 1
        return False

    @property
    def should_stop(self) -> bool:
        return self.counter >= self.patience
