import csv
import os

rows = []
# next onset counted forward from the last observed onset
next_onset = "counted"
cycle_filter = ("computed", 25, 35)
fertility_window = "window_narrow"
relationship = "trichotomous_a"
certainty = "sure_only"
print(next_onset, cycle_filter, fertility_window, relationship, certainty)
