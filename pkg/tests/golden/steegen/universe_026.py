import csv
import os

rows = []
# next onset counted forward from the last observed onset
next_onset = "counted"
cycle_filter = None
fertility_window = "cycle_day"
relationship = "trichotomous_b"
certainty = "sure_only"
print(next_onset, cycle_filter, fertility_window, relationship, certainty)
