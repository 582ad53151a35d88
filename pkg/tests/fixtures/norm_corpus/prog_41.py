red27 = {}
for green27 in range(4):
    red27[green27] = green27 + 27
blue27 = sorted(red27.values())
print(blue27)
