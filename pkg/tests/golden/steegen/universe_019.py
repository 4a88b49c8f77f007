import csv
import os

rows = []
# next onset as self-reported by the participant
next_onset = "reported"
cycle_filter = None
fertility_window = "cycle_day"
relationship = "trichotomous_a"
certainty = "sure_only"
print(next_onset, cycle_filter, fertility_window, relationship, certainty)
