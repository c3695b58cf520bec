import sys


class ProgressBar():
    INIT_VALUE = 1

    def __init__(self, total, prefix=''):
        """
        Args:
            total: total number of steps.
            prefix: label printed before the bar.
        """
        self.total = total
        self.prefix = prefix
        self.step = ProgressBar.INIT_VALUE
        self.se_sum = 0.

    def print(self, mean_se):
        """
        Call in a loop to create terminal progress bar.
        Args:
            mean_se: mean SE of the step that just finished.
        """
        self.se_sum += mean_se
        length = 10
        fill = '█'
        suffix = f"mean SE: {self.se_sum / self.step:.4f} bit/s/Hz"
        percent = f"{100 * (self.step / float(self.total)):.1f}"

        filled_length = int(length * self.step // self.total)
        progression_bar = fill * filled_length + '-' * (length - filled_length)
        prefix = f"{self.prefix}{self.step}/{self.total}"
        print(f"\r{prefix} |{progression_bar}| {percent}% {suffix}",
              end="", file=sys.stderr, flush=True)
        # Print New Line on Complete
        if self.step == self.total:
            self.step = ProgressBar.INIT_VALUE
            self.se_sum = 0.
            print(file=sys.stderr)
            return

        self.step += 1
