words = "the quick brown fox jumps".split()
lengths = {w: len(w) for w in words}
longest = max(lengths, key=lengths.get)
print(longest, lengths[longest])
