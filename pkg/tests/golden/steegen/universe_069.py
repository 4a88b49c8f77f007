import csv
import os

rows = []
# next onset as self-reported by the participant
next_onset = "reported"
cycle_filter = None
fertility_window = "window_narrow"
relationship = "dichotomous"
certainty = "sure_only"
print(next_onset, cycle_filter, fertility_window, relationship, certainty)
