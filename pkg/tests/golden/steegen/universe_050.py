import csv
import os

rows = []
# next onset as self-reported by the participant
next_onset = "reported"
cycle_filter = ("reported", 25, 35)
fertility_window = "window_wide"
relationship = "trichotomous_a"
certainty = "sure_only"
print(next_onset, cycle_filter, fertility_window, relationship, certainty)
